//! S-expression syntax for relations in catalog files.
//!
//! ```text
//! relation := (= expr expr) | (> expr expr) | (isSquare expr) | (isCube expr)
//! expr     := integer | integer/integer | symbol
//!           | (+ expr expr...) | (* expr expr...) | (- expr) | (- expr expr)
//!           | (/ expr expr) | (^ expr k) | (sqrt expr) | (cbrt expr) | (root k expr)
//! ```
//!
//! `+` and `*` fold to the left; `(- e)` is read as `(* -1 e)`. Symbols are
//! resolved against the owning problem's unknowns and parameters.

use thiserror::Error;

use crate::arith::{format_rational, parse_rational};
use crate::expr::{Expr, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Variable,
    Parameter,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SexprError {
    #[error("at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("undeclared symbol `{0}`")]
    Undeclared(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open(usize),
    Close(usize),
    Atom(usize, String),
}

impl Token {
    fn offset(&self) -> usize {
        match self {
            Token::Open(o) | Token::Close(o) | Token::Atom(o, _) => *o,
        }
    }
}

fn tokenize(s: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut chars = s.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            '(' => {
                out.push(Token::Open(i));
                chars.next();
            }
            ')' => {
                out.push(Token::Close(i));
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let start = i;
                let mut atom = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c == '(' || c == ')' || c.is_whitespace() {
                        break;
                    }
                    atom.push(c);
                    chars.next();
                }
                out.push(Token::Atom(start, atom));
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
enum Sx {
    Atom(usize, String),
    List(usize, Vec<Sx>),
}

impl Sx {
    fn offset(&self) -> usize {
        match self {
            Sx::Atom(o, _) | Sx::List(o, _) => *o,
        }
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> SexprError {
    SexprError::Syntax { offset, message: message.into() }
}

fn read(text: &str) -> Result<Sx, SexprError> {
    let tokens = tokenize(text);
    let mut pos = 0;
    let sx = read_one(&tokens, &mut pos, text.len())?;
    if let Some(t) = tokens.get(pos) {
        return Err(syntax(t.offset(), "trailing input after expression"));
    }
    Ok(sx)
}

fn read_one(tokens: &[Token], pos: &mut usize, end: usize) -> Result<Sx, SexprError> {
    match tokens.get(*pos) {
        None => Err(syntax(end, "unexpected end of input")),
        Some(Token::Close(o)) => Err(syntax(*o, "unexpected `)`")),
        Some(Token::Atom(o, a)) => {
            *pos += 1;
            Ok(Sx::Atom(*o, a.clone()))
        }
        Some(Token::Open(o)) => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos) {
                    None => return Err(syntax(*o, "unclosed `(`")),
                    Some(Token::Close(_)) => {
                        *pos += 1;
                        return Ok(Sx::List(*o, items));
                    }
                    _ => items.push(read_one(tokens, pos, end)?),
                }
            }
        }
    }
}

fn is_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn looks_numeric(s: &str) -> bool {
    s.strip_prefix('-').unwrap_or(s).starts_with(|c: char| c.is_ascii_digit())
}

struct Reader<'a> {
    resolve: &'a dyn Fn(&str) -> Option<SymbolKind>,
}

impl Reader<'_> {
    fn expr(&self, sx: &Sx) -> Result<Expr, SexprError> {
        match sx {
            Sx::Atom(o, a) if looks_numeric(a) => parse_rational(a)
                .map(Expr::Const)
                .map_err(|e| syntax(*o, e.to_string())),
            Sx::Atom(_, a) if is_symbol(a) => match (self.resolve)(a) {
                Some(SymbolKind::Variable) => Ok(Expr::Var(a.clone())),
                Some(SymbolKind::Parameter) => Ok(Expr::Param(a.clone())),
                None => Err(SexprError::Undeclared(a.clone())),
            },
            Sx::Atom(o, a) => Err(syntax(*o, format!("bad atom `{a}`"))),
            Sx::List(o, items) => {
                let Some((Sx::Atom(_, head), args)) = items.split_first() else {
                    return Err(syntax(*o, "expected an operator after `(`"));
                };
                self.apply(*o, head, args)
            }
        }
    }

    fn exponent(&self, sx: &Sx) -> Result<u32, SexprError> {
        match sx {
            Sx::Atom(o, a) => a.parse::<u32>().map_err(|_| syntax(*o, format!("expected a small nonnegative integer, got `{a}`"))),
            Sx::List(o, _) => Err(syntax(*o, "expected an integer literal")),
        }
    }

    fn apply(&self, o: usize, head: &str, args: &[Sx]) -> Result<Expr, SexprError> {
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(syntax(o, format!("`{head}` takes {n} argument(s), got {}", args.len())))
            }
        };
        match head {
            "+" | "*" => {
                if args.len() < 2 {
                    return Err(syntax(o, format!("`{head}` needs at least 2 arguments")));
                }
                let mut acc = self.expr(&args[0])?;
                for a in &args[1..] {
                    let rhs = self.expr(a)?;
                    acc = if head == "+" { Expr::add(acc, rhs) } else { Expr::mul(acc, rhs) };
                }
                Ok(acc)
            }
            "-" => match args {
                [a] => Ok(Expr::mul(Expr::int(-1), self.expr(a)?)),
                [a, b] => Ok(Expr::sub(self.expr(a)?, self.expr(b)?)),
                _ => Err(syntax(o, "`-` takes 1 or 2 arguments")),
            },
            "/" => {
                arity(2)?;
                Ok(Expr::div(self.expr(&args[0])?, self.expr(&args[1])?))
            }
            "^" => {
                arity(2)?;
                Ok(Expr::pow(self.expr(&args[0])?, self.exponent(&args[1])?))
            }
            "sqrt" => {
                arity(1)?;
                Ok(Expr::root(self.expr(&args[0])?, 2))
            }
            "cbrt" => {
                arity(1)?;
                Ok(Expr::root(self.expr(&args[0])?, 3))
            }
            "root" => {
                arity(2)?;
                let k = self.exponent(&args[0])?;
                if k < 2 {
                    return Err(syntax(args[0].offset(), "root index must be at least 2"));
                }
                Ok(Expr::root(self.expr(&args[1])?, k))
            }
            other => Err(syntax(o, format!("unknown operator `{other}`"))),
        }
    }

    fn relation(&self, sx: &Sx) -> Result<Relation, SexprError> {
        let Sx::List(o, items) = sx else {
            return Err(syntax(sx.offset(), "a relation must be a list"));
        };
        let Some((Sx::Atom(_, head), args)) = items.split_first() else {
            return Err(syntax(*o, "expected a relation keyword"));
        };
        let need = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(syntax(*o, format!("`{head}` takes {n} argument(s), got {}", args.len())))
            }
        };
        match head.as_str() {
            "=" => {
                need(2)?;
                Ok(Relation::Equals(self.expr(&args[0])?, self.expr(&args[1])?))
            }
            ">" => {
                need(2)?;
                Ok(Relation::Greater(self.expr(&args[0])?, self.expr(&args[1])?))
            }
            "isSquare" => {
                need(1)?;
                Ok(Relation::IsSquare(self.expr(&args[0])?))
            }
            "isCube" => {
                need(1)?;
                Ok(Relation::IsCube(self.expr(&args[0])?))
            }
            other => Err(syntax(*o, format!("unknown relation `{other}`"))),
        }
    }
}

pub fn parse_relation(
    text: &str,
    resolve: &dyn Fn(&str) -> Option<SymbolKind>,
) -> Result<Relation, SexprError> {
    Reader { resolve }.relation(&read(text)?)
}

pub fn parse_expr(text: &str, resolve: &dyn Fn(&str) -> Option<SymbolKind>) -> Result<Expr, SexprError> {
    Reader { resolve }.expr(&read(text)?)
}

pub fn expr_to_sexpr(e: &Expr) -> String {
    match e {
        Expr::Const(c) => format_rational(c),
        Expr::Var(n) | Expr::Param(n) => n.clone(),
        Expr::Add(..) | Expr::Mul(..) => {
            let head = if matches!(e, Expr::Add(..)) { "+" } else { "*" };
            let mut args = Vec::new();
            let mut cur = e;
            loop {
                match (cur, head) {
                    (Expr::Add(a, b), "+") | (Expr::Mul(a, b), "*") => {
                        args.push(expr_to_sexpr(b));
                        cur = a;
                    }
                    _ => {
                        args.push(expr_to_sexpr(cur));
                        break;
                    }
                }
            }
            args.reverse();
            format!("({head} {})", args.join(" "))
        }
        Expr::Sub(a, b) => format!("(- {} {})", expr_to_sexpr(a), expr_to_sexpr(b)),
        Expr::Div(a, b) => format!("(/ {} {})", expr_to_sexpr(a), expr_to_sexpr(b)),
        Expr::Pow(a, k) => format!("(^ {} {k})", expr_to_sexpr(a)),
        Expr::Root(a, 2) => format!("(sqrt {})", expr_to_sexpr(a)),
        Expr::Root(a, 3) => format!("(cbrt {})", expr_to_sexpr(a)),
        Expr::Root(a, k) => format!("(root {k} {})", expr_to_sexpr(a)),
    }
}

pub fn relation_to_sexpr(r: &Relation) -> String {
    match r {
        Relation::Equals(l, rr) => format!("(= {} {})", expr_to_sexpr(l), expr_to_sexpr(rr)),
        Relation::Greater(l, rr) => format!("(> {} {})", expr_to_sexpr(l), expr_to_sexpr(rr)),
        Relation::IsSquare(e) => format!("(isSquare {})", expr_to_sexpr(e)),
        Relation::IsCube(e) => format!("(isCube {})", expr_to_sexpr(e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn xy(name: &str) -> Option<SymbolKind> {
        match name {
            "x" | "y" => Some(SymbolKind::Variable),
            "n" => Some(SymbolKind::Parameter),
            _ => None,
        }
    }

    #[test]
    fn parses_problem_1_relation() {
        let r = parse_relation("(isSquare (+ (^ x 2) (^ y 2)))", &xy).unwrap();
        assert_eq!(r.to_string(), "isSquare(x^2 + y^2)");
    }

    #[test]
    fn undeclared_symbol_is_reported() {
        let err = parse_relation("(= (+ x w) 10)", &xy).unwrap_err();
        assert_eq!(err, SexprError::Undeclared("w".into()));
    }

    #[test]
    fn syntax_errors_are_located() {
        match parse_relation("(= x", &xy).unwrap_err() {
            SexprError::Syntax { offset, .. } => assert_eq!(offset, 0),
            e => panic!("unexpected {e:?}"),
        }
        assert!(parse_relation("(= x 0.5)", &xy).is_err());
        assert!(parse_relation("(root 1 x)", &xy).is_err());
        assert!(parse_relation("(frob x)", &xy).is_err());
        assert!(parse_relation("(= x 1) extra", &xy).is_err());
    }

    #[test]
    fn parameters_are_distinguished() {
        let e = parse_expr("(- (^ x 2) n)", &xy).unwrap();
        assert_eq!(e, Expr::sub(Expr::pow(Expr::var("x"), 2), Expr::param("n")));
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (-20i64..20, 1i64..6).prop_map(|(a, b)| Expr::Const(crate::arith::ratio(a, b).unwrap())),
            Just(Expr::var("x")),
            Just(Expr::var("y")),
            Just(Expr::param("n")),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
                (inner.clone(), 0u32..4).prop_map(|(a, k)| Expr::pow(a, k)),
                (inner, 2u32..5).prop_map(|(a, k)| Expr::root(a, k)),
            ]
        })
    }

    proptest! {
        #[test]
        fn sexpr_round_trip(e in arb_expr()) {
            let text = expr_to_sexpr(&e);
            prop_assert_eq!(parse_expr(&text, &xy).unwrap(), e);
        }
    }
}
