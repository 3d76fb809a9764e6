use igk_dsl::random::{random_expr, random_smooth_expr};
use igk_dsl::{differentiate, eval, parse, DslError, Expr};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Richardson-extrapolated central difference in parameter `j`.
fn fd_partial(e: &Expr, x: &[f64], t: &[f64], j: usize) -> f64 {
    let central = |h: f64| {
        let mut tp = t.to_vec();
        let mut tm = t.to_vec();
        tp[j] += h;
        tm[j] -= h;
        (eval(e, x, &tp).unwrap() - eval(e, x, &tm).unwrap()) / (2.0 * h)
    };
    let h = 1e-3;
    (4.0 * central(h / 2.0) - central(h)) / 3.0
}

proptest! {
    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_expr(&mut rng, 5, 3, 3);
        let printed = e.to_string();
        let back = parse(&printed).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn symbolic_matches_finite_differences(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_smooth_expr(&mut rng, 4, 2, 2);
        let x: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
        let t: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
        for j in 0..2 {
            let de = differentiate(&e, j).unwrap();
            let sym = eval(&de, &x, &t).unwrap();
            let fd = fd_partial(&e, &x, &t, j);
            prop_assert!((sym - fd).abs() <= 1e-7 * sym.abs().max(1.0), "{} d/dt{}: {} vs {}", e, j + 1, sym, fd);
        }
    }

    #[test]
    fn evaluation_is_total(seed in any::<u64>(), x in -3.0..3.0f64, t in -3.0..3.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_expr(&mut rng, 5, 1, 1);
        match eval(&e, &[x], &[t]) {
            Ok(v) => prop_assert!(v.is_finite()),
            Err(DslError::Domain { .. }) => {}
            Err(other) => prop_assert!(false, "unexpected error {other}"),
        }
        // deterministic
        prop_assert_eq!(eval(&e, &[x], &[t]), eval(&e, &[x], &[t]));
    }
}

#[test]
fn printer_is_fully_parenthesized() {
    let e = parse("1 + 2*t1^2 - -x1").unwrap();
    assert_eq!(e.to_string(), "((1.0 + (2.0 * (t1 ^ 2.0))) - (-x1))");
    assert_eq!(parse("if(x1>=0,t1,1)").unwrap().to_string(), "if((x1 >= 0.0), t1, 1.0)");
}
