//! A small expression language for density functions `p(x; t)`.
//!
//! Expressions range over atom coordinates `x1..xm` and parameters `t1..td`,
//! with `+ - * / ^`, unary minus, comparisons, `if(cond, a, b)` and the
//! functions `exp log sin cos abs sign min max`. The constant `pi` is
//! accepted as a literal.
//!
//! ```
//! use igk_dsl::{differentiate, eval, parse};
//!
//! let e = parse("t1*(1-t1)").unwrap();
//! let de = differentiate(&e, 0).unwrap();
//! assert_eq!(eval(&de, &[], &[0.25]).unwrap(), 0.5);
//! assert_eq!(parse(&e.to_string()).unwrap(), e);
//! ```

mod ast;
mod diff;
mod error;
mod eval;
mod parse;
pub mod random;

pub use ast::{BinOp, CmpOp, Expr, Func};
pub use diff::differentiate;
pub use error::{DslError, Result};
pub use eval::eval;
pub use parse::{parse, parse_with_arity};
