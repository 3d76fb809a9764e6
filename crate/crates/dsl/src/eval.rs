use crate::ast::{BinOp, Expr, Func};
use crate::error::{DslError, Result};

fn domain(reason: impl Into<String>, e: &Expr) -> DslError {
    DslError::Domain {
        reason: reason.into(),
        subexpr: e.to_string(),
    }
}

/// Evaluates `e` at the given atom coordinates and parameter values.
///
/// Every invalid operation (log of a nonpositive number, division by zero,
/// overflow, non-real powers) is reported as [`DslError::Domain`] naming the
/// offending subexpression; a successful result is always finite. Only the
/// selected branch of an `if` is evaluated.
pub fn eval(e: &Expr, coords: &[f64], params: &[f64]) -> Result<f64> {
    let v = match e {
        Expr::Num(v) => *v,
        Expr::Coord(i) => *coords.get(*i).ok_or(DslError::Arity {
            kind: "coordinate",
            index: i + 1,
            available: coords.len(),
        })?,
        Expr::Param(i) => *params.get(*i).ok_or(DslError::Arity {
            kind: "parameter",
            index: i + 1,
            available: params.len(),
        })?,
        Expr::Neg(a) => -eval(a, coords, params)?,
        Expr::Binary(op, a, b) => {
            let x = eval(a, coords, params)?;
            let y = eval(b, coords, params)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y == 0.0 {
                        return Err(domain("division by zero", e));
                    }
                    x / y
                }
                BinOp::Pow => {
                    if x < 0.0 && y.fract() != 0.0 {
                        return Err(domain(format!("negative base {x} with non-integer exponent {y}"), e));
                    }
                    if x == 0.0 && y < 0.0 {
                        return Err(domain("zero raised to a negative power", e));
                    }
                    x.powf(y)
                }
            }
        }
        Expr::Cmp(op, a, b) => {
            let x = eval(a, coords, params)?;
            let y = eval(b, coords, params)?;
            if op.holds(x, y) {
                1.0
            } else {
                0.0
            }
        }
        Expr::Call(func, args) => {
            let x = eval(&args[0], coords, params)?;
            match func {
                Func::Exp => x.exp(),
                Func::Log => {
                    if x <= 0.0 {
                        return Err(domain(format!("log of nonpositive value {x}"), e));
                    }
                    x.ln()
                }
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Abs => x.abs(),
                Func::Sign => {
                    if x > 0.0 {
                        1.0
                    } else if x < 0.0 {
                        -1.0
                    } else {
                        0.0
                    }
                }
                Func::Min => x.min(eval(&args[1], coords, params)?),
                Func::Max => x.max(eval(&args[1], coords, params)?),
            }
        }
        Expr::If(c, a, b) => {
            if eval(c, coords, params)? != 0.0 {
                eval(a, coords, params)?
            } else {
                eval(b, coords, params)?
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(format!("non-finite result {v}"), e))
    }
}
