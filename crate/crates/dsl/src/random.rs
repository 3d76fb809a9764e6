//! Random expression generators for property tests.

use rand::Rng;

use crate::ast::{BinOp, CmpOp, Expr, Func};

fn literal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    match rng.random_range(0..4) {
        0 => rng.random_range(0..10) as f64,
        1 => rng.random_range(0.0..10.0),
        2 => rng.random_range(0.0..1.0) * 10f64.powi(rng.random_range(-12..12)),
        _ => (rng.random_range(0.0..100.0) * 1000.0_f64).round() / 1000.0,
    }
}

fn leaf<R: Rng + ?Sized>(rng: &mut R, coords: usize, params: usize) -> Expr {
    match rng.random_range(0..3) {
        0 if coords > 0 => Expr::Coord(rng.random_range(0..coords)),
        1 if params > 0 => Expr::Param(rng.random_range(0..params)),
        _ => Expr::Num(literal(rng)),
    }
}

/// Any syntactically valid tree, including non-smooth and conditional nodes.
pub fn random_expr<R: Rng + ?Sized>(rng: &mut R, depth: u32, coords: usize, params: usize) -> Expr {
    if depth == 0 || rng.random_bool(0.2) {
        return leaf(rng, coords, params);
    }
    let sub = |rng: &mut R| random_expr(rng, depth - 1, coords, params);
    match rng.random_range(0..6) {
        0 => Expr::negate(sub(rng)),
        1 | 2 => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow][rng.random_range(0..5)];
            Expr::binary(op, sub(rng), sub(rng))
        }
        3 => {
            let op = [CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge, CmpOp::Eq][rng.random_range(0..5)];
            Expr::Cmp(op, Box::new(sub(rng)), Box::new(sub(rng)))
        }
        4 => {
            let func = [
                Func::Exp,
                Func::Log,
                Func::Sin,
                Func::Cos,
                Func::Abs,
                Func::Sign,
                Func::Min,
                Func::Max,
            ][rng.random_range(0..8)];
            let args = (0..func.arity()).map(|_| sub(rng)).collect();
            Expr::Call(func, args)
        }
        _ => Expr::If(Box::new(sub(rng)), Box::new(sub(rng)), Box::new(sub(rng))),
    }
}

/// A smooth tree that evaluates to a finite value for all coordinates and
/// parameters in `[-1, 1]`, with derivatives of moderate size.
///
/// Denominators and logarithm arguments are kept away from zero, and the
/// only conditionals have parameter-free conditions.
pub fn random_smooth_expr<R: Rng + ?Sized>(rng: &mut R, depth: u32, coords: usize, params: usize) -> Expr {
    if depth == 0 || rng.random_bool(0.15) {
        return match rng.random_range(0..3) {
            0 if coords > 0 => Expr::Coord(rng.random_range(0..coords)),
            2 => Expr::Num((rng.random_range(0.1..2.0) * 1000.0_f64).round() / 1000.0),
            _ => Expr::Param(rng.random_range(0..params.max(1))),
        };
    }
    let sub = |rng: &mut R| random_smooth_expr(rng, depth - 1, coords, params);
    let num = Expr::Num;
    match rng.random_range(0..12) {
        0 => Expr::binary(BinOp::Add, sub(rng), sub(rng)),
        1 => Expr::binary(BinOp::Sub, sub(rng), sub(rng)),
        2 => Expr::binary(BinOp::Mul, sub(rng), sub(rng)),
        3 => {
            let den = Expr::binary(BinOp::Add, num(1.5), Expr::call(Func::Sin, sub(rng)));
            Expr::binary(BinOp::Div, sub(rng), den)
        }
        4 => Expr::call(Func::Exp, Expr::call(Func::Sin, sub(rng))),
        5 => Expr::call(
            Func::Log,
            Expr::binary(BinOp::Add, num(2.0), Expr::call(Func::Cos, sub(rng))),
        ),
        6 => Expr::call(Func::Sin, sub(rng)),
        7 => Expr::call(Func::Cos, sub(rng)),
        8 => Expr::binary(BinOp::Pow, sub(rng), num(rng.random_range(2..4) as f64)),
        9 => {
            let base = Expr::binary(BinOp::Add, num(2.0), Expr::call(Func::Sin, sub(rng)));
            Expr::binary(BinOp::Pow, base, Expr::call(Func::Cos, sub(rng)))
        }
        10 if coords > 0 => {
            let cond = Expr::Cmp(CmpOp::Ge, Box::new(Expr::Coord(0)), Box::new(num(0.0)));
            Expr::If(Box::new(cond), Box::new(sub(rng)), Box::new(sub(rng)))
        }
        _ => Expr::negate(sub(rng)),
    }
}
