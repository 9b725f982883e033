//! The coordinate/gauge transformation that turns an orthogonal-polynomial
//! equation Q'' + M Q' + J Q = 0 into a D-dimensional radial Schroedinger
//! equation (hbar = 2m = 1): r -> g(r), psi = f^-1(r) Q(g(r)).
//!
//! Produces the modulating function f(r), the effective right-hand side
//! -(E - V(r)), and the wavefunction template; candidate mappings g(r) are
//! checked against their defining first-order relation numerically.

use serde::Serialize;
use thiserror::Error;

use crate::expr::Expr;
use crate::polys::{FamilyError, PolynomialFamily};

/// Defining constraint on the mapping g(r); each variant names the
/// combination of g and its derivatives that must equal the constant c^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// g'^2 / g^2 = c^2 (exponential mapping)
    PowerOverSquare,
    /// g'^2 / g = c^2 (quadratic mapping)
    PowerOverG,
    /// g'^2 = c^2 (linear mapping)
    PowerPlain,
    /// g''^2 / g'^2 = c^2; same exponential g as `PowerOverSquare`
    SecondDeriv,
    /// g'^2 / (1 - g^2) = c^2 (circular mapping)
    OneMinusG2,
    /// g'^2 / (1 - g^2)^2 = c^2 (hyperbolic-tangent mapping)
    OneMinusG2Sq,
    /// g'^2 / (1 - g)^2 = c^2 (shifted exponential mapping)
    OneMinusG,
}

/// A concrete mapping r -> g(r) together with the relation it satisfies.
#[derive(Clone, Debug)]
pub struct Mapping {
    pub g: Expr,
    pub relation: Relation,
    pub c: f64,
    /// Integration constant of the relation (the A in A e^{-c r}); unused by
    /// the purely algebraic mappings.
    pub scale: f64,
}

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("degenerate mapping: g' vanishes on the sample domain")]
    DegenerateMapping,
    #[error(transparent)]
    Family(#[from] FamilyError),
}

impl Mapping {
    /// The closed-form g(r) satisfying `relation` with constant c and
    /// integration constant `scale` where it applies.
    pub fn new(relation: Relation, c: f64, scale: f64) -> Mapping {
        let r = Expr::var("r");
        let g = match relation {
            Relation::PowerOverSquare | Relation::SecondDeriv => {
                // A e^{-c r}
                Expr::Mul(vec![
                    Expr::Num(scale),
                    Expr::Mul(vec![Expr::Num(-c), r]).exp(),
                ])
            }
            Relation::PowerOverG => {
                // (c^2/4) r^2
                Expr::Mul(vec![Expr::Num(c * c / 4.0), r.powi(2)])
            }
            Relation::PowerPlain => Expr::Mul(vec![Expr::Num(c), r]),
            Relation::OneMinusG2 => Expr::Sin(Box::new(Expr::Mul(vec![Expr::Num(c), r]))),
            Relation::OneMinusG2Sq => {
                Expr::Tanh(Box::new(Expr::Mul(vec![Expr::Num(c), r])))
            }
            Relation::OneMinusG => {
                // 1 - A e^{-c r}
                Expr::Add(vec![
                    Expr::Num(1.0),
                    Expr::Mul(vec![
                        Expr::Num(-scale),
                        Expr::Mul(vec![Expr::Num(-c), r]).exp(),
                    ]),
                ])
            }
        };
        Mapping { g: g.simplify(), relation, c, scale }
    }

    /// Checks the relation residual |lhs - c^2| at 50 log-spaced points;
    /// passes iff the maximum stays below 1e-9 * c^2.
    pub fn verify(&self) -> (bool, f64) {
        let g1 = self.g.diff("r").simplify();
        let g2 = g1.diff("r").simplify();
        let c2 = self.c * self.c;
        let mut max_dev: f64 = 0.0;
        for r in sample_points(self.c) {
            let gv = self.g.eval1("r", r);
            let g1v = g1.eval1("r", r);
            let g2v = g2.eval1("r", r);
            let (Ok(gv), Ok(g1v), Ok(g2v)) = (gv, g1v, g2v) else {
                return (false, f64::INFINITY);
            };
            let lhs = match self.relation {
                Relation::PowerOverSquare => (g1v / gv) * (g1v / gv),
                Relation::PowerOverG => g1v * g1v / gv,
                Relation::PowerPlain => g1v * g1v,
                Relation::SecondDeriv => (g2v / g1v) * (g2v / g1v),
                Relation::OneMinusG2 => g1v * g1v / (1.0 - gv * gv),
                Relation::OneMinusG2Sq => {
                    let w = 1.0 - gv * gv;
                    g1v * g1v / (w * w)
                }
                Relation::OneMinusG => {
                    let w = 1.0 - gv;
                    g1v * g1v / (w * w)
                }
            };
            let dev = (lhs - c2).abs();
            if !dev.is_finite() {
                return (false, f64::INFINITY);
            }
            max_dev = max_dev.max(dev);
        }
        (max_dev < 1e-9 * c2, max_dev)
    }

    /// g'(r), with the sign flipped to keep it positive on the sample domain
    /// (a decreasing g only changes f by a constant phase absorbed into N).
    fn g_prime_positive(&self) -> Result<Expr, TransformError> {
        let g1 = self.g.diff("r").simplify();
        let mut sign = 0.0;
        for r in [0.3 / self.c, 0.7 / self.c, 1.0 / self.c] {
            if let Ok(v) = g1.eval1("r", r) {
                if v.abs() > 1e-14 {
                    sign = v.signum();
                    break;
                }
            }
        }
        match sign {
            s if s > 0.0 => Ok(g1),
            s if s < 0.0 => Ok(Expr::Mul(vec![Expr::Num(-1.0), g1]).simplify()),
            _ => Err(TransformError::DegenerateMapping),
        }
    }
}

fn sample_points(c: f64) -> impl Iterator<Item = f64> {
    // log-spaced over [0.01, 1.2]/c: stays clear of both endpoints where the
    // circular and hyperbolic relations lose precision to cancellation
    let lo = (0.01 / c).ln();
    let hi = (1.2 / c).ln();
    (0..50).map(move |i| (lo + (hi - lo) * i as f64 / 49.0).exp())
}

/// Schwartzian derivative {g, r} = g'''/g' - (3/2)(g''/g')^2 as an
/// expression in r.
pub fn schwartzian(g: &Expr) -> Result<Expr, TransformError> {
    let g1 = g.diff("r").simplify();
    let mut nonzero = false;
    for i in 1..=8 {
        let r = 0.15 * i as f64;
        if matches!(g1.eval1("r", r), Ok(v) if v.abs() > 1e-14) {
            nonzero = true;
            break;
        }
    }
    if !nonzero {
        return Err(TransformError::DegenerateMapping);
    }
    let g2 = g1.diff("r").simplify();
    let g3 = g2.diff("r").simplify();
    let ratio = g2.div(g1.clone());
    Ok(Expr::Add(vec![
        g3.div(g1),
        Expr::Mul(vec![Expr::Num(-1.5), ratio.powi(2)]),
    ])
    .simplify())
}

/// Modulating function f(r) = r^{(D-1)/2} g'^{1/2} exp(-1/2 int M dg);
/// psi = f^-1 Q(g).
pub fn modulating_function(
    fam: &PolynomialFamily,
    map: &Mapping,
    d: u32,
) -> Result<Expr, TransformError> {
    fam.validate()?;
    let g1 = map.g_prime_positive()?;
    let mut factors = Vec::new();
    if d != 1 {
        factors.push(Expr::var("r").pow_real((d as f64 - 1.0) / 2.0));
    }
    factors.push(g1.sqrt());
    factors.push(fam.exp_half_m_integral(&map.g).powi(-1));
    Ok(Expr::Mul(factors).simplify())
}

/// The full right side of the transformed radial equation, i.e. -(E - V):
/// (1/4) g'^2 [M^2 + 2 M' - 4 J] - 1/2 {g,r} - (D-1)(D-3)/(4 r^2).
pub fn effective_rhs(
    fam: &PolynomialFamily,
    map: &Mapping,
    d: u32,
) -> Result<Expr, TransformError> {
    fam.validate()?;
    let (m, j) = fam.characteristic();
    let mg = m.subst("g", &map.g);
    let mpg = m.diff("g").simplify().subst("g", &map.g);
    let jg = j.subst("g", &map.g);
    let g1 = map.g.diff("r").simplify();
    let bracket = Expr::Add(vec![
        mg.powi(2),
        Expr::Mul(vec![Expr::Num(2.0), mpg]),
        Expr::Mul(vec![Expr::Num(-4.0), jg]),
    ]);
    let mut terms = vec![
        Expr::Mul(vec![Expr::Num(0.25), g1.powi(2), bracket]),
        Expr::Mul(vec![Expr::Num(-0.5), schwartzian(&map.g)?]),
    ];
    let bg = (d as f64 - 1.0) * (d as f64 - 3.0) / 4.0;
    if bg != 0.0 {
        terms.push(Expr::Mul(vec![Expr::Num(-bg), Expr::var("r").powi(-2)]));
    }
    Ok(Expr::Add(terms).simplify())
}

/// psi(r)/N = f^-1(r) Q(g(r)) with Q expanded through the polynomial's
/// explicit series.
pub fn wavefunction_template(
    fam: &PolynomialFamily,
    map: &Mapping,
    d: u32,
) -> Result<Expr, TransformError> {
    let g1 = map.g_prime_positive()?;
    let q = fam.as_expr(&map.g)?;
    let mut factors = Vec::new();
    if d != 1 {
        factors.push(Expr::var("r").pow_real(-(d as f64 - 1.0) / 2.0));
    }
    factors.push(g1.pow_real(-0.5));
    factors.push(fam.exp_half_m_integral(&map.g));
    factors.push(q);
    Ok(Expr::Mul(factors).simplify())
}

/// Finite-difference Schwartzian oracle: 4th-order stencils for g', g'' and
/// a Richardson-extrapolated 5-point stencil for g'''. Used to cross-check
/// the symbolic `schwartzian` independently of the expression engine's
/// differentiation rules.
pub fn schwartzian_numeric(g: &Expr, r: f64, h: f64) -> Result<f64, TransformError> {
    let f = |x: f64| -> Result<f64, TransformError> {
        g.eval1("r", x)
            .map_err(|_| TransformError::DegenerateMapping)
    };
    let (m2, m1, p0, p1, p2) = (
        f(r - 2.0 * h)?,
        f(r - h)?,
        f(r)?,
        f(r + h)?,
        f(r + 2.0 * h)?,
    );
    let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    let d2 = (-p2 + 16.0 * p1 - 30.0 * p0 + 16.0 * m1 - m2) / (12.0 * h * h);
    let d3_at = |hh: f64| -> Result<f64, TransformError> {
        Ok(
            (f(r + 2.0 * hh)? - 2.0 * f(r + hh)? + 2.0 * f(r - hh)? - f(r - 2.0 * hh)?)
                / (2.0 * hh * hh * hh),
        )
    };
    let d3 = (4.0 * d3_at(h)? - d3_at(2.0 * h)?) / 3.0;
    if d1 == 0.0 {
        return Err(TransformError::DegenerateMapping);
    }
    Ok(d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1))
}

/// All three products of the transformation for one (family, mapping, D).
pub struct TransformResult {
    pub f: Expr,
    pub rhs: Expr,
    pub psi_template: Expr,
}

pub fn transform(
    fam: &PolynomialFamily,
    map: &Mapping,
    d: u32,
) -> Result<TransformResult, TransformError> {
    Ok(TransformResult {
        f: modulating_function(fam, map, d)?,
        rhs: effective_rhs(fam, map, d)?,
        psi_template: wavefunction_template(fam, map, d)?,
    })
}
