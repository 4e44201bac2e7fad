//! Exact arithmetic, symbolic reduction and bounded search for a catalog of
//! classical equation problems.

pub mod arith;
pub mod catalog;
pub mod cli;
pub mod engines;
pub mod expr;
pub mod mpoly;
pub mod poly;
pub mod sexpr;
pub mod verify;
