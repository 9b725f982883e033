//! Property-based tests for the module invariants: expression round-trips,
//! simplifier guarantees, derivative linearity, polynomial evaluation oracles,
//! node-count monotonicity, and energy ordering.

use proptest::prelude::*;
use solvagen::catalog;
use solvagen::expr::{self, Expr, Rational};
use solvagen::polys::PolynomialFamily;
use solvagen::solver::{self, Direction, RadialGrid};

/// Random expression trees over the single variable `r`. Constants and
/// exponents are kept small so that evaluation stays finite over the sample
/// window more often than not; non-finite samples are skipped, not failed.
fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-4.0..4.0f64).prop_map(Expr::Num),
        (1i64..6).prop_map(|n| Expr::Num(n as f64)),
        Just(Expr::var("r")),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Add),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::Mul),
            (inner.clone(), -2i64..3, 1i64..3)
                .prop_map(|(e, n, d)| Expr::Pow(Box::new(e), Rational::new(n, d))),
            inner.clone().prop_map(|e| Expr::Exp(Box::new(e))),
            inner.clone().prop_map(|e| Expr::Sin(Box::new(e))),
            inner.clone().prop_map(|e| Expr::Cos(Box::new(e))),
            inner.clone().prop_map(|e| Expr::Tanh(Box::new(e))),
            inner.prop_map(|e| Expr::Sech(Box::new(e))),
        ]
    })
}

/// Sample points away from 0 so negative powers stay representable.
const SAMPLES: [f64; 7] = [0.17, 0.4, 0.73, 1.1, 1.6, 2.3, 3.1];

/// Compare two expressions pointwise, skipping points where either side
/// fails to evaluate or overflows. Returns the number of comparable points.
fn assert_value_equal(a: &Expr, b: &Expr, tol: f64, what: &str) -> usize {
    let mut compared = 0;
    for &r in &SAMPLES {
        let (Ok(x), Ok(y)) = (a.eval1("r", r), b.eval1("r", r)) else {
            continue;
        };
        if !x.is_finite() || !y.is_finite() || x.abs() > 1e12 {
            continue;
        }
        let dev = (x - y).abs() / x.abs().max(1.0);
        assert!(dev < tol, "{what} at r={r}: {x} vs {y} (dev {dev:.3e})");
        compared += 1;
    }
    compared
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    /// parse(print(e)) is value-equal to e.
    #[test]
    fn print_parse_roundtrip(e in arb_expr()) {
        let text = e.to_string();
        let back = expr::parse(&text)
            .unwrap_or_else(|err| panic!("reparse of `{text}` failed: {err}"));
        assert_value_equal(&e, &back, 1e-12, "roundtrip");
    }

    /// simplify never changes the value of an expression.
    #[test]
    fn simplify_preserves_value(e in arb_expr()) {
        assert_value_equal(&e, &e.simplify(), 1e-10, "simplify");
    }

    /// simplify is idempotent: a second pass is a tree-level no-op.
    #[test]
    fn simplify_idempotent(e in arb_expr()) {
        let once = e.simplify();
        prop_assert_eq!(&once.simplify(), &once);
    }

    /// d/dr is linear: diff(a*f + b*g) = a*diff(f) + b*diff(g).
    #[test]
    fn derivative_linearity(
        f in arb_expr(),
        g in arb_expr(),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
    ) {
        let combo = Expr::add(vec![
            Expr::mul(vec![Expr::Num(a), f.clone()]),
            Expr::mul(vec![Expr::Num(b), g.clone()]),
        ]);
        let lhs = combo.diff("r");
        let rhs = Expr::add(vec![
            Expr::mul(vec![Expr::Num(a), f.diff("r")]),
            Expr::mul(vec![Expr::Num(b), g.diff("r")]),
        ]);
        assert_value_equal(&lhs, &rhs, 1e-10, "diff linearity");
    }

    /// Laguerre recurrence evaluation matches the explicit series expansion.
    #[test]
    fn laguerre_recurrence_matches_series(
        n in 0u32..=8,
        alpha in 0.1..4.0f64,
        x in 0.05..10.0f64,
    ) {
        let fam = PolynomialFamily::Laguerre { n, alpha };
        let direct = fam.eval(x).unwrap();
        let series = fam.as_expr(&Expr::var("x")).unwrap().eval1("x", x).unwrap();
        let dev = (direct - series).abs() / direct.abs().max(1.0);
        prop_assert!(dev < 1e-10, "L_{n}^{alpha}({x}): {direct} vs {series}");
    }

    /// Jacobi recurrence evaluation matches the explicit series expansion.
    #[test]
    fn jacobi_recurrence_matches_series(
        n in 0u32..=8,
        alpha in -0.4..3.0f64,
        beta in -0.4..3.0f64,
        x in -0.95..0.95f64,
    ) {
        let fam = PolynomialFamily::Jacobi { n, alpha, beta };
        let direct = fam.eval(x).unwrap();
        let series = fam.as_expr(&Expr::var("x")).unwrap().eval1("x", x).unwrap();
        let dev = (direct - series).abs() / direct.abs().max(1.0);
        prop_assert!(dev < 1e-10, "P_{n}^({alpha},{beta})({x}): {direct} vs {series}");
    }

    /// Forward-shot solutions gain nodes monotonically with energy
    /// (particle in a box: V = 0 on (0, 1), so sign changes are exact).
    #[test]
    fn node_count_monotone_in_energy(e1 in 5.0..400.0f64, delta in 1.0..200.0f64) {
        let grid = RadialGrid::over(0.0, 1.0, 2000).unwrap();
        let zero = Expr::Num(0.0);
        let lo = solver::numerov_integrate(&zero, e1, &grid, Direction::Forward).unwrap();
        let hi = solver::numerov_integrate(&zero, e1 + delta, &grid, Direction::Forward).unwrap();
        prop_assert!(solver::count_nodes(&lo) <= solver::count_nodes(&hi));
    }

    /// Analytic spectra increase strictly with the radial state index.
    #[test]
    fn energies_strictly_ordered(omega in 0.3..4.0f64, beta in 2.6..8.0f64) {
        for sys in [
            catalog::harmonic_oscillator(3, 0, omega).unwrap(),
            catalog::morse_like(3, 1.0, beta).unwrap(),
            catalog::coulomb(3, 0, 2.0).unwrap(),
        ] {
            let cap = sys.max_state().unwrap_or(4).min(4);
            let energies: Vec<f64> =
                (0..=cap).map(|k| sys.energy(k).unwrap()).collect();
            for pair in energies.windows(2) {
                prop_assert!(pair[0] < pair[1], "{}: {energies:?}", sys.id);
            }
        }
    }
}
