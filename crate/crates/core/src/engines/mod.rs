//! Solving engines: symbolic reduction, rational decisions, generators and
//! bounded searches. All are pure functions of (problem, bindings, bounds).

pub mod decide;
pub mod generators;
pub mod reduce;
pub mod search;

use thiserror::Error;

use crate::expr::EvalError;
use crate::poly::PolyError;

pub use decide::decide_rational;
pub use generators::{
    congruum, congruum_search, cube_plus_square, euclid_triple, euclid_triples, product_of_cubes, salary_problem,
    sum_two_cubes, Congruum,
};
pub use reduce::{reduce_problem, ReductionKind, ReductionTrace, Rule, Step};
pub use search::{congruence_search, congruum_shape, search_integer, search_rational};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("problem {id} is not reducible by this pipeline: {reason}")]
    NotReducible { id: u32, reason: String },
    #[error("problem {id}: parameter(s) {} need a value (use --param)", names.join(", "))]
    UnboundParameter { id: u32, names: Vec<String> },
    #[error("invalid bound: {0}")]
    InvalidBound(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl EngineError {
    pub(crate) fn not_reducible(reason: impl Into<String>) -> Self {
        EngineError::NotReducible { id: 0, reason: reason.into() }
    }
}

pub(crate) fn require_bound(p: &crate::catalog::ProblemSpec, b: &crate::expr::Assignment) -> Result<(), EngineError> {
    let names = p.unbound_parameters(b);
    if names.is_empty() {
        Ok(())
    } else {
        Err(EngineError::UnboundParameter { id: p.id, names })
    }
}

/// Runs `f` on a pool with `threads` workers (all cores when `None`).
pub(crate) fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    match builder.build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
