//! Symbolic partial derivatives with respect to a parameter `t_j`.

use crate::ast::{BinOp, Expr, Func};
use crate::error::{DslError, Result};

fn is_const(e: &Expr, v: f64) -> bool {
    e.as_constant() == Some(v)
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) => Expr::constant(x + y),
        (Some(0.0), _) => b,
        (_, Some(0.0)) => a,
        _ => Expr::binary(BinOp::Add, a, b),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) => Expr::constant(x - y),
        (Some(0.0), _) => neg(b),
        (_, Some(0.0)) => a,
        _ => Expr::binary(BinOp::Sub, a, b),
    }
}

fn neg(a: Expr) -> Expr {
    if let Some(v) = a.as_constant() {
        return Expr::constant(-v);
    }
    match a {
        Expr::Neg(inner) => *inner,
        other => Expr::negate(other),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) => Expr::constant(x * y),
        (Some(0.0), _) | (_, Some(0.0)) => Expr::Num(0.0),
        (Some(1.0), _) => b,
        (_, Some(1.0)) => a,
        (Some(-1.0), _) => neg(b),
        (_, Some(-1.0)) => neg(a),
        _ => Expr::binary(BinOp::Mul, a, b),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) {
        return Expr::Num(0.0);
    }
    if is_const(&b, 1.0) {
        return a;
    }
    Expr::binary(BinOp::Div, a, b)
}

fn unsupported(e: &Expr, j: usize) -> DslError {
    DslError::Unsupported {
        node: e.to_string(),
        param: j + 1,
    }
}

/// Exact partial derivative of `e` with respect to parameter index `j`
/// (zero-based, so `j = 0` is `t1`).
///
/// `abs`, `sign`, `min` and `max` whose arguments depend on `t_j` are
/// rejected with [`DslError::Unsupported`]; callers fall back to finite
/// differences. `if` is differentiated branchwise and keeps its condition,
/// so on a parameter-dependent boundary the derivative is the one of the
/// branch the condition selects. Comparisons are piecewise constant and
/// differentiate to zero. A power whose exponent depends on `t_j` is
/// handled as `exp(b * log(a))`.
pub fn differentiate(e: &Expr, j: usize) -> Result<Expr> {
    if !e.depends_on_param(j) {
        return Ok(Expr::Num(0.0));
    }
    Ok(match e {
        Expr::Num(_) | Expr::Coord(_) => Expr::Num(0.0),
        Expr::Param(i) => Expr::Num(if *i == j { 1.0 } else { 0.0 }),
        Expr::Neg(a) => neg(differentiate(a, j)?),
        Expr::Binary(op, a, b) => {
            let da = differentiate(a, j)?;
            let db = differentiate(b, j)?;
            let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
            match op {
                BinOp::Add => add(da, db),
                BinOp::Sub => sub(da, db),
                BinOp::Mul => add(mul(da, b.clone()), mul(a, db)),
                BinOp::Div => sub(
                    div(da, b.clone()),
                    div(mul(a, db), Expr::binary(BinOp::Pow, b, Expr::Num(2.0))),
                ),
                BinOp::Pow if !b.depends_on_param(j) => {
                    let lowered = match b.as_constant() {
                        Some(v) => Expr::constant(v - 1.0),
                        None => sub(b.clone(), Expr::Num(1.0)),
                    };
                    let power = if is_const(&lowered, 1.0) {
                        a
                    } else if is_const(&lowered, 0.0) {
                        Expr::Num(1.0)
                    } else {
                        Expr::binary(BinOp::Pow, a, lowered)
                    };
                    mul(mul(b, power), da)
                }
                BinOp::Pow => {
                    // d(a^b) = a^b * (b' log a + b a'/a)
                    let whole = Expr::binary(BinOp::Pow, a.clone(), b.clone());
                    let log_a = Expr::call(Func::Log, a.clone());
                    mul(whole, add(mul(db, log_a), div(mul(b, da), a)))
                }
            }
        }
        Expr::Cmp(..) => Expr::Num(0.0),
        Expr::Call(func, args) => {
            let a = &args[0];
            match func {
                Func::Exp => mul(e.clone(), differentiate(a, j)?),
                Func::Log => div(differentiate(a, j)?, a.clone()),
                Func::Sin => mul(Expr::call(Func::Cos, a.clone()), differentiate(a, j)?),
                Func::Cos => mul(neg(Expr::call(Func::Sin, a.clone())), differentiate(a, j)?),
                Func::Abs | Func::Sign | Func::Min | Func::Max => return Err(unsupported(e, j)),
            }
        }
        Expr::If(c, a, b) => Expr::If(
            c.clone(),
            Box::new(differentiate(a, j)?),
            Box::new(differentiate(b, j)?),
        ),
    })
}
