//! The four orthogonal-polynomial families and their characteristic
//! functions M(g), J(g) of the defining equation Q'' + M Q' + J Q = 0.
//!
//! Every family offers two independent evaluation routes: a stable
//! recurrence ([`PolynomialFamily::eval`]) and an explicit expansion as a
//! symbolic expression ([`PolynomialFamily::as_expr`]). The test suite holds
//! the two against each other.

use thiserror::Error;

use crate::expr::{Expr, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum PolynomialFamily {
    /// Associated Laguerre L_n^alpha; alpha may be any real.
    Laguerre { n: u32, alpha: f64 },
    /// Terminating Gauss series 2F1(-n, beta, gamma; x).
    Hypergeometric { n: u32, beta: f64, gamma: f64 },
    /// Associated Legendre P_n^m with the Condon-Shortley phase (-1)^m.
    Legendre { n: u32, m: i32 },
    /// Jacobi P_n^(alpha,beta); alpha, beta real and > -1 for orthogonality.
    Jacobi { n: u32, alpha: f64, beta: f64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum FamilyError {
    #[error("invalid family parameters: {0}")]
    InvalidParameters(String),
    #[error("singular point x = {0} of the characteristic functions")]
    SingularPoint(f64),
}

impl PolynomialFamily {
    pub fn degree(&self) -> u32 {
        match *self {
            PolynomialFamily::Laguerre { n, .. }
            | PolynomialFamily::Hypergeometric { n, .. }
            | PolynomialFamily::Legendre { n, .. }
            | PolynomialFamily::Jacobi { n, .. } => n,
        }
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        match *self {
            PolynomialFamily::Laguerre { .. } | PolynomialFamily::Jacobi { .. } => Ok(()),
            PolynomialFamily::Legendre { n, m } => {
                if m.unsigned_abs() > n {
                    Err(FamilyError::InvalidParameters(format!(
                        "associated Legendre needs |m| <= n, got n={n}, m={m}"
                    )))
                } else {
                    Ok(())
                }
            }
            PolynomialFamily::Hypergeometric { n, gamma, .. } => {
                // gamma must avoid 0, -1, ..., -(n-1) so the series
                // coefficients stay finite
                let rounded = gamma.round();
                if (gamma - rounded).abs() < 1e-12
                    && rounded <= 0.0
                    && rounded > -(n as f64)
                {
                    Err(FamilyError::InvalidParameters(format!(
                        "2F1 with gamma = {gamma} has a vanishing Pochhammer denominator"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Evaluates the polynomial by three-term recurrence (terminating series
    /// for the hypergeometric case).
    pub fn eval(&self, x: f64) -> Result<f64, FamilyError> {
        self.validate()?;
        Ok(match *self {
            PolynomialFamily::Laguerre { n, alpha } => eval_laguerre(n, alpha, x),
            PolynomialFamily::Hypergeometric { n, beta, gamma } => {
                eval_hyp2f1_terminating(n, beta, gamma, x)
            }
            PolynomialFamily::Legendre { n, m } => eval_assoc_legendre(n, m, x),
            PolynomialFamily::Jacobi { n, alpha, beta } => eval_jacobi(n, alpha, beta, x),
        })
    }

    /// Explicit finite-sum expansion, evaluated symbolically at `arg`.
    ///
    /// This is an independent route from [`PolynomialFamily::eval`]; it is
    /// also what the wavefunction templates embed, since the expression node
    /// set has no polynomial primitive.
    pub fn as_expr(&self, arg: &Expr) -> Result<Expr, FamilyError> {
        self.validate()?;
        let e = match *self {
            PolynomialFamily::Laguerre { n, alpha } => {
                // L_n^a(x) = sum_k (-1)^k binom(n+a, n-k) x^k / k!
                let mut terms = Vec::new();
                for k in 0..=n {
                    let c = sign(k) * binom_real(n as f64 + alpha, n - k) / factorial(k);
                    terms.push(coeff_times_power(c, arg, k));
                }
                Expr::Add(terms)
            }
            PolynomialFamily::Hypergeometric { n, beta, gamma } => {
                // sum_k (-n)_k (beta)_k / ((gamma)_k k!) x^k
                let mut terms = Vec::new();
                for k in 0..=n {
                    let c = pochhammer(-(n as f64), k) * pochhammer(beta, k)
                        / (pochhammer(gamma, k) * factorial(k));
                    terms.push(coeff_times_power(c, arg, k));
                }
                Expr::Add(terms)
            }
            PolynomialFamily::Legendre { n, m } => return assoc_legendre_expr(n, m, arg),
            PolynomialFamily::Jacobi { n, alpha, beta } => {
                // sum_s binom(n+a, n-s) binom(n+b, s) ((x-1)/2)^s ((x+1)/2)^(n-s)
                let xm1 = Expr::Mul(vec![
                    Expr::Num(0.5),
                    Expr::Add(vec![arg.clone(), Expr::Num(-1.0)]),
                ]);
                let xp1 = Expr::Mul(vec![
                    Expr::Num(0.5),
                    Expr::Add(vec![arg.clone(), Expr::Num(1.0)]),
                ]);
                let mut terms = Vec::new();
                for s in 0..=n {
                    let c = binom_real(n as f64 + alpha, n - s) * binom_real(n as f64 + beta, s);
                    terms.push(Expr::Mul(vec![
                        Expr::Num(c),
                        xm1.clone().powi(s as i64),
                        xp1.clone().powi((n - s) as i64),
                    ]));
                }
                Expr::Add(terms)
            }
        };
        Ok(e.simplify())
    }

    /// Characteristic functions (M, J) of Q'' + M Q' + J Q = 0, as
    /// expressions in the variable `g`.
    pub fn characteristic(&self) -> (Expr, Expr) {
        let g = Expr::var("g");
        match *self {
            PolynomialFamily::Laguerre { n, alpha } => {
                // M = (alpha + 1 - g)/g,  J = n/g
                let m = Expr::Add(vec![Expr::Num(alpha + 1.0), g.clone().neg()])
                    .div(g.clone());
                let j = Expr::Num(n as f64).div(g);
                (m, j)
            }
            PolynomialFamily::Hypergeometric { n, beta, gamma } => {
                // with a = -n: M = (gamma - (a+b+1) g)/(g (1-g)),
                //              J = -a b / (g (1-g))
                let a = -(n as f64);
                let denom = Expr::Mul(vec![
                    g.clone(),
                    Expr::Add(vec![Expr::Num(1.0), g.clone().neg()]),
                ]);
                let m = Expr::Add(vec![
                    Expr::Num(gamma),
                    Expr::Mul(vec![Expr::Num(-(a + beta + 1.0)), g]),
                ])
                .div(denom.clone());
                let j = Expr::Num(-a * beta).div(denom);
                (m, j)
            }
            PolynomialFamily::Legendre { n, m } => {
                // M = -2g/(1-g^2),  J = (n(n+1) - m^2/(1-g^2))/(1-g^2)
                let one_m_g2 = Expr::Add(vec![Expr::Num(1.0), g.clone().powi(2).neg()]);
                let mm = Expr::Mul(vec![Expr::Num(-2.0), g]).div(one_m_g2.clone());
                let j = Expr::Add(vec![
                    Expr::Num((n * (n + 1)) as f64),
                    Expr::Num(-((m * m) as f64)).div(one_m_g2.clone()),
                ])
                .div(one_m_g2);
                (mm, j)
            }
            PolynomialFamily::Jacobi { n, alpha, beta } => {
                // M = (b - a - (a+b+2) g)/(1-g^2),
                // J = n(n+a+b+1)/(1-g^2)
                let one_m_g2 = Expr::Add(vec![Expr::Num(1.0), g.clone().powi(2).neg()]);
                let m = Expr::Add(vec![
                    Expr::Num(beta - alpha),
                    Expr::Mul(vec![Expr::Num(-(alpha + beta + 2.0)), g]),
                ])
                .div(one_m_g2.clone());
                let j = Expr::Num(n as f64 * (n as f64 + alpha + beta + 1.0)).div(one_m_g2);
                (m, j)
            }
        }
    }

    /// Closed-form antiderivative of M(g): a sum of `a_i ln(b_i(g))` terms
    /// plus an optional linear term `c g` (integration constant fixed to 0).
    pub fn m_integral(&self) -> MIntegral {
        let g = Expr::var("g");
        match *self {
            PolynomialFamily::Laguerre { alpha, .. } => MIntegral {
                log_terms: vec![(g, alpha + 1.0)],
                linear: -1.0,
            },
            PolynomialFamily::Hypergeometric { n, beta, gamma } => {
                let a = -(n as f64);
                MIntegral {
                    log_terms: vec![
                        (g.clone(), gamma),
                        (
                            Expr::Add(vec![Expr::Num(1.0), g.neg()]),
                            a + beta + 1.0 - gamma,
                        ),
                    ],
                    linear: 0.0,
                }
            }
            PolynomialFamily::Legendre { .. } => MIntegral {
                log_terms: vec![(
                    Expr::Add(vec![Expr::Num(1.0), g.powi(2).neg()]),
                    1.0,
                )],
                linear: 0.0,
            },
            PolynomialFamily::Jacobi { alpha, beta, .. } => MIntegral {
                log_terms: vec![
                    (
                        Expr::Add(vec![Expr::Num(1.0), g.clone().neg()]),
                        alpha + 1.0,
                    ),
                    (Expr::Add(vec![Expr::Num(1.0), g]), beta + 1.0),
                ],
                linear: 0.0,
            },
        }
    }

    /// `exp(1/2 * int M dg)` with `g` replaced by `g_of_r`, built from
    /// power factors rather than a literal exp(ln(..)) chain.
    pub fn exp_half_m_integral(&self, g_of_r: &Expr) -> Expr {
        let parts = self.m_integral();
        let mut factors = Vec::new();
        for (base, a) in &parts.log_terms {
            if *a == 0.0 {
                continue;
            }
            factors.push(base.subst("g", g_of_r).pow_real(a / 2.0));
        }
        if parts.linear != 0.0 {
            factors.push(
                Expr::Mul(vec![Expr::Num(parts.linear / 2.0), g_of_r.clone()]).exp(),
            );
        }
        Expr::Mul(factors).simplify()
    }

    /// Residual |Q'' + M Q' + J Q| at x, with exact polynomial derivatives.
    pub fn ode_residual(&self, x: f64) -> Result<f64, FamilyError> {
        let g = Expr::var("g");
        let q = self.as_expr(&g)?;
        let q1 = q.diff("g").simplify();
        let q2 = q1.diff("g").simplify();
        let (m, j) = self.characteristic();
        let mv = m.eval1("g", x).map_err(|_| FamilyError::SingularPoint(x))?;
        let jv = j.eval1("g", x).map_err(|_| FamilyError::SingularPoint(x))?;
        if !mv.is_finite() || !jv.is_finite() || mv.abs() > 1e12 || jv.abs() > 1e12 {
            return Err(FamilyError::SingularPoint(x));
        }
        let qv = q.eval1("g", x).expect("polynomial eval");
        let q1v = q1.eval1("g", x).expect("polynomial eval");
        let q2v = q2.eval1("g", x).expect("polynomial eval");
        Ok((q2v + mv * q1v + jv * qv).abs())
    }
}

/// Antiderivative of M(g) in the form `sum a_i ln(b_i(g)) + linear*g`.
pub struct MIntegral {
    pub log_terms: Vec<(Expr, f64)>,
    pub linear: f64,
}

fn sign(k: u32) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k as u64).map(|v| v as f64).product()
}

/// Generalized binomial coefficient binom(a, k) for real a.
fn binom_real(a: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    for j in 0..k {
        acc *= (a - j as f64) / (k - j) as f64;
    }
    acc
}

fn pochhammer(a: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    for j in 0..k {
        acc *= a + j as f64;
    }
    acc
}

fn coeff_times_power(c: f64, arg: &Expr, k: u32) -> Expr {
    if k == 0 {
        Expr::Num(c)
    } else {
        Expr::Mul(vec![Expr::Num(c), arg.clone().powi(k as i64)])
    }
}

fn eval_laguerre(n: u32, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut lkm1 = 1.0;
    let mut lk = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * lk - (kf + alpha) * lkm1) / (kf + 1.0);
        lkm1 = lk;
        lk = next;
    }
    lk
}

fn eval_hyp2f1_terminating(n: u32, beta: f64, gamma: f64, x: f64) -> f64 {
    // Horner-style accumulation over term ratios
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..n {
        let kf = k as f64;
        term *= (kf - n as f64) * (beta + kf) / ((gamma + kf) * (kf + 1.0)) * x;
        sum += term;
    }
    sum
}

fn eval_assoc_legendre(n: u32, m: i32, x: f64) -> f64 {
    let ma = m.unsigned_abs();
    let mut value = {
        // P_m^m = (-1)^m (2m-1)!! (1-x^2)^(m/2), climbed up in degree
        let mut pmm = 1.0;
        if ma > 0 {
            let somx2 = ((1.0 - x) * (1.0 + x)).sqrt();
            let mut fact = 1.0;
            for _ in 0..ma {
                pmm *= -fact * somx2;
                fact += 2.0;
            }
        }
        if n == ma {
            pmm
        } else {
            let mut pmmp1 = x * (2.0 * ma as f64 + 1.0) * pmm;
            if n == ma + 1 {
                pmmp1
            } else {
                let mut pll = 0.0;
                for l in (ma + 2)..=n {
                    let lf = l as f64;
                    pll = (x * (2.0 * lf - 1.0) * pmmp1 - (lf + ma as f64 - 1.0) * pmm)
                        / (lf - ma as f64);
                    pmm = pmmp1;
                    pmmp1 = pll;
                }
                pll
            }
        }
    };
    if m < 0 {
        // P_n^{-m} = (-1)^m (n-m)!/(n+m)! P_n^m
        let mut ratio = 1.0;
        for j in (n - ma + 1)..=(n + ma) {
            ratio /= j as f64;
        }
        value *= sign(ma) * ratio;
    }
    value
}

fn eval_jacobi(n: u32, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut pkm1 = 1.0;
    let mut pk = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let kf = k as f64;
        let c1 = 2.0 * kf * (kf + a + b) * (2.0 * kf + a + b - 2.0);
        let c2 = (2.0 * kf + a + b - 1.0)
            * ((2.0 * kf + a + b) * (2.0 * kf + a + b - 2.0) * x + a * a - b * b);
        let c3 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * (2.0 * kf + a + b);
        let next = (c2 * pk - c3 * pkm1) / c1;
        pkm1 = pk;
        pk = next;
    }
    pk
}

/// Expanded associated Legendre: (-1)^m (1-x^2)^(m/2) d^m/dx^m P_n(x).
fn assoc_legendre_expr(n: u32, m: i32, arg: &Expr) -> Result<Expr, FamilyError> {
    let x = Expr::var("_x");
    // explicit Legendre sum: 2^-n sum_k (-1)^k binom(n,k) binom(2n-2k,n) x^(n-2k)
    let mut terms = Vec::new();
    for k in 0..=(n / 2) {
        let c = sign(k) * binom_real(n as f64, k) * binom_real((2 * n - 2 * k) as f64, n)
            / 2f64.powi(n as i32);
        terms.push(coeff_times_power(c, &x, n - 2 * k));
    }
    let mut p = Expr::Add(terms);
    let ma = m.unsigned_abs();
    for _ in 0..ma {
        p = p.diff("_x").simplify();
    }
    let mut factors = vec![Expr::Num(sign(ma)), p];
    if ma > 0 {
        let one_m_x2 = Expr::Add(vec![Expr::Num(1.0), x.clone().powi(2).neg()]);
        factors.push(one_m_x2.pow(Rational::new(ma as i64, 2)));
    }
    if m < 0 {
        let mut ratio = 1.0;
        for j in (n - ma + 1)..=(n + ma) {
            ratio /= j as f64;
        }
        factors.push(Expr::Num(sign(ma) * ratio));
    }
    Ok(Expr::Mul(factors).subst("_x", arg).simplify())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_zero_is_one() {
        for fam in [
            PolynomialFamily::Laguerre { n: 0, alpha: 2.7 },
            PolynomialFamily::Hypergeometric { n: 0, beta: 1.0, gamma: 2.0 },
            PolynomialFamily::Legendre { n: 0, m: 0 },
            PolynomialFamily::Jacobi { n: 0, alpha: 0.3, beta: -0.4 },
        ] {
            assert_eq!(fam.eval(0.37).unwrap(), 1.0);
        }
    }

    #[test]
    fn laguerre_first_degree() {
        // L_1^1(2) = alpha + 1 - x = 0
        let fam = PolynomialFamily::Laguerre { n: 1, alpha: 1.0 };
        assert!(fam.eval(2.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn hyp2f1_binomial_identity() {
        // 2F1(-2, 1, 1; x) = (1-x)^2
        let fam = PolynomialFamily::Hypergeometric { n: 2, beta: 1.0, gamma: 1.0 };
        let v = fam.eval(0.5).unwrap();
        assert!((v - 0.25).abs() < 1e-14);
    }

    #[test]
    fn jacobi_zero_zero_is_legendre() {
        let fam = PolynomialFamily::Jacobi { n: 1, alpha: 0.0, beta: 0.0 };
        assert!((fam.eval(0.7).unwrap() - 0.7).abs() < 1e-14);
    }

    #[test]
    fn invalid_parameters_rejected() {
        let fam = PolynomialFamily::Legendre { n: 1, m: 3 };
        assert!(fam.eval(0.0).is_err());
        let fam = PolynomialFamily::Hypergeometric { n: 3, beta: 1.0, gamma: -1.0 };
        assert!(fam.eval(0.0).is_err());
        // gamma = -3 is outside the forbidden window for n = 3
        let fam = PolynomialFamily::Hypergeometric { n: 3, beta: 1.0, gamma: -3.0 };
        assert!(fam.eval(0.25).is_ok());
    }

    #[test]
    fn characteristic_values() {
        let fam = PolynomialFamily::Laguerre { n: 3, alpha: 1.0 };
        let (m, j) = fam.characteristic();
        assert!((m.eval1("g", 2.0).unwrap() - 0.0).abs() < 1e-14);
        assert!((j.eval1("g", 2.0).unwrap() - 1.5).abs() < 1e-14);

        let fam = PolynomialFamily::Hypergeometric { n: 1, beta: 2.0, gamma: 3.0 };
        let (m, _) = fam.characteristic();
        assert!((m.eval1("g", 0.5).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn recurrence_matches_series() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let fams: Vec<(PolynomialFamily, f64, f64)> = (0..=8)
            .flat_map(|n| {
                vec![
                    (PolynomialFamily::Laguerre { n, alpha: 1.5 }, 0.0, 20.0),
                    (PolynomialFamily::Laguerre { n, alpha: -0.3 }, 0.0, 20.0),
                    (
                        PolynomialFamily::Hypergeometric { n, beta: 2.5, gamma: 1.75 },
                        -0.9,
                        0.9,
                    ),
                    (PolynomialFamily::Legendre { n, m: (n as i32).min(2) }, -0.99, 0.99),
                    (
                        PolynomialFamily::Jacobi { n, alpha: 0.5, beta: -0.25 },
                        -0.99,
                        0.99,
                    ),
                ]
            })
            .collect();
        for (fam, lo, hi) in fams {
            let series = fam.as_expr(&Expr::var("g")).unwrap();
            for _ in 0..100 {
                let x = rng.gen_range(lo..hi);
                let a = fam.eval(x).unwrap();
                let b = series.eval1("g", x).unwrap();
                assert!(
                    (a - b).abs() <= 1e-10 * a.abs().max(1.0),
                    "{fam:?} at {x}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn negative_order_legendre() {
        // P_2^{-1}(x) = -P_2^1(x)/6
        let pos = PolynomialFamily::Legendre { n: 2, m: 1 };
        let neg = PolynomialFamily::Legendre { n: 2, m: -1 };
        let x = 0.4;
        assert!(
            (neg.eval(x).unwrap() + pos.eval(x).unwrap() / 6.0).abs() < 1e-14
        );
    }

    #[test]
    fn ode_residual_small() {
        let cases = vec![
            (PolynomialFamily::Laguerre { n: 2, alpha: 1.0 }, 1.0),
            (PolynomialFamily::Jacobi { n: 3, alpha: 0.5, beta: 0.5 }, 0.2),
            (PolynomialFamily::Legendre { n: 2, m: 1 }, 0.3),
            (PolynomialFamily::Hypergeometric { n: 2, beta: 3.0, gamma: 1.5 }, 0.4),
        ];
        for (fam, x) in cases {
            let r = fam.ode_residual(x).unwrap();
            assert!(r < 1e-10, "{fam:?}: residual {r}");
        }
    }

    #[test]
    fn ode_residual_catalog_sweep() {
        // defining property of M, J across all families
        for n in 0..=6u32 {
            let fam = PolynomialFamily::Laguerre { n, alpha: 2.0 };
            for i in 1..=20 {
                assert!(fam.ode_residual(i as f64).unwrap() < 1e-8);
            }
            let fam = PolynomialFamily::Jacobi { n, alpha: 1.0, beta: 0.5 };
            let fam2 = PolynomialFamily::Legendre { n, m: (n as i32).min(1) };
            for i in 0..=18 {
                let x = -0.9 + 0.1 * i as f64;
                assert!(fam.ode_residual(x).unwrap() < 1e-8);
                if x.abs() > 1e-9 {
                    assert!(fam2.ode_residual(x).unwrap() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn singular_point_reported() {
        let fam = PolynomialFamily::Laguerre { n: 2, alpha: 1.0 };
        assert!(matches!(
            fam.ode_residual(0.0),
            Err(FamilyError::SingularPoint(_))
        ));
    }

    #[test]
    fn laguerre_orthogonality_quadrature() {
        // int_0^inf x^a e^-x L_1^a L_2^a dx = 0, trapezoid on [0, 60]
        let a = 1.0;
        let l1 = PolynomialFamily::Laguerre { n: 1, alpha: a };
        let l2 = PolynomialFamily::Laguerre { n: 2, alpha: a };
        let n = 60_000;
        let h = 60.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let x = i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * x.powf(a) * (-x).exp() * l1.eval(x).unwrap() * l2.eval(x).unwrap();
        }
        acc *= h;
        assert!(acc.abs() < 1e-6, "orthogonality integral {acc}");
    }

    #[test]
    fn exp_half_m_integral_laguerre() {
        // g^((a+1)/2) e^(-g/2) at g = 2, a = 1 -> 2/e
        let fam = PolynomialFamily::Laguerre { n: 0, alpha: 1.0 };
        let e = fam.exp_half_m_integral(&Expr::var("g"));
        let v = e.eval1("g", 2.0).unwrap();
        assert!((v - 2.0 / 1f64.exp()).abs() < 1e-12);
    }
}
