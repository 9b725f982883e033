//! The solvable systems of Tables 1-3, each carried as a `QuantumSystem`
//! with its closed-form E(n), V(r), psi_n(r), constraints and provenance
//! status. Formulas are kept table-verbatim; systems whose printed symbols
//! do not pin down a consistent reading are flagged `PaperAmbiguous` and
//! left for the numerical verifier to adjudicate rather than silently fixed.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{parse, Expr};
use crate::polys::PolynomialFamily;
use crate::transform::{wavefunction_template, Mapping, Relation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Verified,
    PaperAmbiguous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Morse,
    Oscillator,
    Coulomb,
    HyperOscillator,
    Hulthen,
    Eckart,
    HulthenDelta,
    TrigPoschlTeller,
    SechPoschlTeller,
    TrigScarf,
    RosenMorse,
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown system id `{0}`")]
    UnknownSystem(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// One solvable system: family generator, mapping, dimension, parameters,
/// and closed forms.
#[derive(Clone, Debug)]
pub struct QuantumSystem {
    pub id: &'static str,
    kind: Kind,
    pub d: u32,
    pub ell: u32,
    pub params: BTreeMap<String, f64>,
    pub status: Status,
    pub family_name: &'static str,
    pub constraints: Vec<String>,
    pub notes: Vec<String>,
}

/// Grid advice for the numerical solver: interval, point count, and the
/// near-origin power u ~ r^nu when the left end sits at the origin.
#[derive(Clone, Copy, Debug)]
pub struct DomainHint {
    pub r_lo: f64,
    pub r_hi: f64,
    pub n_points: usize,
    pub origin_seed: Option<f64>,
}

/// Serializable one-row summary for listings.
#[derive(Serialize)]
pub struct Listing {
    pub id: &'static str,
    pub family: &'static str,
    pub status: Status,
    pub dimension: u32,
    pub ell: u32,
    pub params: BTreeMap<String, f64>,
    pub constraints: Vec<String>,
    pub notes: Vec<String>,
}

fn pe(s: &str) -> Expr {
    parse(s).expect("catalog expression").simplify()
}

/// Appends the -(D-1)(D-3)/(4 r^2) background of the non-power-law rows.
fn with_background(v: Expr, d: u32) -> Expr {
    let bg = (d as f64 - 1.0) * (d as f64 - 3.0) / 4.0;
    if bg == 0.0 {
        v
    } else {
        Expr::Add(vec![
            v,
            Expr::Mul(vec![Expr::Num(-bg), Expr::var("r").powi(-2)]),
        ])
        .simplify()
    }
}

fn check(cond: bool, msg: &str) -> Result<(), CatalogError> {
    if cond {
        Ok(())
    } else {
        Err(CatalogError::InvalidParameter(msg.to_string()))
    }
}

pub fn morse_like(d: u32, c1: f64, beta: f64) -> Result<QuantumSystem, CatalogError> {
    check(d >= 1, "D >= 1")?;
    check(c1 > 0.0, "c1 > 0")?;
    check(beta > 0.5, "beta > 1/2")?;
    Ok(QuantumSystem {
        id: "morse",
        kind: Kind::Morse,
        d,
        ell: 0,
        params: BTreeMap::from([
            ("c1".into(), c1),
            ("A1".into(), 1.0),
            ("beta".into(), beta),
        ]),
        status: Status::Verified,
        family_name: "laguerre",
        constraints: vec!["beta >= n + 1/2".into()],
        notes: vec![
            "second-derivative relation g''^2/g'^2 = c^2 yields the same exponential \
             mapping and system (alias)"
                .into(),
        ],
    })
}

pub fn harmonic_oscillator(
    d: u32,
    ell: u32,
    omega: f64,
) -> Result<QuantumSystem, CatalogError> {
    check(d >= 1, "D >= 1")?;
    check(omega > 0.0, "omega > 0")?;
    Ok(QuantumSystem {
        id: "oscillator",
        kind: Kind::Oscillator,
        d,
        ell,
        params: BTreeMap::from([("omega".into(), omega)]),
        status: Status::Verified,
        family_name: "laguerre",
        constraints: vec!["n - ell even and >= 0 (n = 2 n_r + ell)".into()],
        notes: vec![],
    })
}

pub fn coulomb(d: u32, ell: u32, strength: f64) -> Result<QuantumSystem, CatalogError> {
    check(d >= 2 || ell == 0, "D >= 2 or (D = 1 with ell = 0)")?;
    check(d >= 1, "D >= 1")?;
    check(strength > 0.0, "strength > 0")?;
    Ok(QuantumSystem {
        id: "coulomb",
        kind: Kind::Coulomb,
        d,
        ell,
        params: BTreeMap::from([("strength".into(), strength)]),
        status: Status::Verified,
        family_name: "laguerre",
        constraints: vec!["n = n_r + ell + (D-1)/2 > 0".into()],
        notes: vec!["strength 2 is the atomic-unit coupling e^2 = 2".into()],
    })
}

pub fn hyper_oscillator(
    d: u32,
    ell: u32,
    n: u32,
    beta: f64,
) -> Result<QuantumSystem, CatalogError> {
    check(d >= 1, "D >= 1")?;
    Ok(QuantumSystem {
        id: "hyper-oscillator",
        kind: Kind::HyperOscillator,
        d,
        ell,
        params: BTreeMap::from([
            ("p1".into(), 2.0),
            ("n".into(), n as f64),
            ("beta".into(), beta),
        ]),
        status: Status::PaperAmbiguous,
        family_name: "hypergeometric",
        constraints: vec!["domain 0 < r < 1 (g = r^2 < 1)".into()],
        notes: vec![
            "the table's symbol c = ell + D/2 never appears in its printed formulas; \
             formulas taken verbatim"
                .into(),
        ],
    })
}

pub fn hulthen_like(
    d: u32,
    p2: f64,
    a2: f64,
    n: u32,
    beta1: f64,
) -> Result<QuantumSystem, CatalogError> {
    check(d >= 1, "D >= 1")?;
    check(p2 > 0.0, "p2 > 0")?;
    check(a2 > 0.0 && a2 <= 1.0, "0 < A2 <= 1")?;
    check(beta1 > n as f64 + 1.0, "beta1 > n + 1")?;
    Ok(QuantumSystem {
        id: "hulthen",
        kind: Kind::Hulthen,
        d,
        ell: 0,
        params: BTreeMap::from([
            ("p2".into(), p2),
            ("A2".into(), a2),
            ("n".into(), n as f64),
            ("beta1".into(), beta1),
        ]),
        status: Status::Verified,
        family_name: "hypergeometric",
        constraints: vec!["beta1 > n + 1 (bound state exists)".into()],
        notes: vec![],
    })
}

pub fn eckart_like(
    d: u32,
    p3: f64,
    a3: f64,
    n: u32,
    gamma1: f64,
) -> Result<QuantumSystem, CatalogError> {
    check(d >= 1, "D >= 1")?;
    check(p3 > 0.0, "p3 > 0")?;
    check(a3 > 0.0 && a3 <= 1.0, "0 < A3 <= 1")?;
    Ok(QuantumSystem {
        id: "eckart",
        kind: Kind::Eckart,
        d,
        ell: 0,
        params: BTreeMap::from([
            ("p3".into(), p3),
            ("A3".into(), a3),
            ("n".into(), n as f64),
            ("gamma1".into(), gamma1),
        ]),
        status: Status::PaperAmbiguous,
        family_name: "hypergeometric",
        constraints: vec!["-beta(n+1) + n + 1 = gamma1^2 (table definition)".into()],
        notes: vec![
            "table psi's 2F1 argument (1 - exp(-p3 r)) disagrees with g = \
             1 - A3 exp(-p3 r); repulsive V admits no bound states yet E_n < 0"
                .into(),
        ],
    })
}

pub fn hulthen_delta(
    d: u32,
    p4: f64,
    a4: f64,
    n: u32,
    delta: f64,
) -> Result<QuantumSystem, CatalogError> {
    check(d >= 1, "D >= 1")?;
    check(p4 > 0.0, "p4 > 0")?;
    check(a4 > 0.0 && a4 <= 1.0, "0 < A4 <= 1")?;
    check(delta > n as f64 + 1.0, "delta > n + 1")?;
    Ok(QuantumSystem {
        id: "hulthen-delta",
        kind: Kind::HulthenDelta,
        d,
        ell: 0,
        params: BTreeMap::from([
            ("p4".into(), p4),
            ("A4".into(), a4),
            ("n".into(), n as f64),
            ("delta".into(), delta),
        ]),
        status: Status::Verified,
        family_name: "hypergeometric",
        constraints: vec!["delta > n + 1".into()],
        notes: vec![
            "alias of the Hulthen row via delta; the table omits the square on its \
             printed E_n, restored here"
                .into(),
        ],
    })
}

pub fn trig_poschl_teller(
    d: u32,
    p1: f64,
    m: u32,
    n: u32,
) -> Result<QuantumSystem, CatalogError> {
    check(d >= 1, "D >= 1")?;
    check(p1 > 0.0, "p1 > 0")?;
    check(m >= 1, "m^2 > 1/4")?;
    check(n >= m, "|m| <= n")?;
    Ok(QuantumSystem {
        id: "trig-poschl-teller",
        kind: Kind::TrigPoschlTeller,
        d,
        ell: 0,
        params: BTreeMap::from([
            ("p1".into(), p1),
            ("m".into(), m as f64),
            ("n".into(), n as f64),
        ]),
        status: Status::Verified,
        family_name: "legendre",
        constraints: vec![
            "m^2 > 1/4".into(),
            "n >= m; cell bounded by the tan^2 poles".into(),
        ],
        notes: vec![],
    })
}

pub fn sech_poschl_teller(
    d: u32,
    p2: f64,
    n: u32,
    m: u32,
) -> Result<QuantumSystem, CatalogError> {
    check(d >= 1, "D >= 1")?;
    check(p2 > 0.0, "p2 > 0")?;
    check(n >= 2, "n >= 2 (well depth)")?;
    check(m >= 2 && m <= n, "2 <= m <= n")?;
    Ok(QuantumSystem {
        id: "sech-poschl-teller",
        kind: Kind::SechPoschlTeller,
        d,
        ell: 0,
        params: BTreeMap::from([
            ("p2".into(), p2),
            ("n".into(), n as f64),
            ("m".into(), m as f64),
        ]),
        status: Status::Verified,
        family_name: "legendre",
        constraints: vec!["2 <= m <= n; m = 1 is the zero-energy threshold".into()],
        notes: vec!["n is a depth parameter; m indexes the states".into()],
    })
}

pub fn trig_scarf(
    d: u32,
    p3: f64,
    n: u32,
    alpha: f64,
    beta: f64,
) -> Result<QuantumSystem, CatalogError> {
    check(d >= 1, "D >= 1")?;
    check(p3 > 0.0, "p3 > 0")?;
    check(alpha > -1.0 && beta > -1.0, "alpha, beta > -1")?;
    Ok(QuantumSystem {
        id: "trig-scarf",
        kind: Kind::TrigScarf,
        d,
        ell: 0,
        params: BTreeMap::from([
            ("p3".into(), p3),
            ("n".into(), n as f64),
            ("alpha".into(), alpha),
            ("beta".into(), beta),
        ]),
        status: Status::PaperAmbiguous,
        family_name: "jacobi",
        constraints: vec!["cell bounded by the sec tan poles".into()],
        notes: vec![
            "table V/E are mutually inconsistent with the printed psi: the psi \
             satisfies the equation with tan^2 coefficient ((2a^2+2b^2-1)/4)p^2, \
             sec tan coefficient ((a^2-b^2)/2)p^2 and energy -E_table"
                .into(),
        ],
    })
}

pub fn rosen_morse(
    d: u32,
    p4: f64,
    n: u32,
    alpha: f64,
    beta: f64,
) -> Result<QuantumSystem, CatalogError> {
    check(d >= 1, "D >= 1")?;
    check(p4 > 0.0, "p4 > 0")?;
    check(alpha > -1.0 && beta > -1.0, "alpha, beta > -1")?;
    Ok(QuantumSystem {
        id: "rosen-morse",
        kind: Kind::RosenMorse,
        d,
        ell: 0,
        params: BTreeMap::from([
            ("p4".into(), p4),
            ("n".into(), n as f64),
            ("alpha".into(), alpha),
            ("beta".into(), beta),
        ]),
        status: Status::PaperAmbiguous,
        family_name: "jacobi",
        constraints: vec!["alpha, beta > -1; V depends on n through c3^2".into()],
        notes: vec![
            "the printed psi satisfies the equation with the table's V but energy \
             -E_table (sign)"
                .into(),
        ],
    })
}

/// All systems at the default parameter sets used by the CLI.
pub fn all_systems() -> Vec<QuantumSystem> {
    vec![
        morse_like(3, 1.0, 5.5).unwrap(),
        harmonic_oscillator(3, 0, 1.0).unwrap(),
        coulomb(3, 0, 2.0).unwrap(),
        hyper_oscillator(3, 0, 1, 4.0).unwrap(),
        hulthen_like(3, 1.0, 1.0, 0, 3.0).unwrap(),
        eckart_like(3, 1.0, 1.0, 0, 1.0).unwrap(),
        hulthen_delta(3, 1.0, 1.0, 0, 3.0).unwrap(),
        trig_poschl_teller(3, 1.0, 1, 2).unwrap(),
        sech_poschl_teller(3, 1.0, 4, 4).unwrap(),
        trig_scarf(3, 1.0, 0, 2.0, 1.0).unwrap(),
        rosen_morse(3, 1.0, 0, 3.0, 1.0).unwrap(),
    ]
}

/// Builds the system `id` with optional dimension/ell/parameter overrides on
/// top of the defaults.
pub fn build(
    id: &str,
    d: Option<u32>,
    ell: Option<u32>,
    overrides: &BTreeMap<String, f64>,
) -> Result<QuantumSystem, CatalogError> {
    let base = all_systems()
        .into_iter()
        .find(|s| s.id == id)
        .ok_or_else(|| CatalogError::UnknownSystem(id.to_string()))?;
    let d = d.unwrap_or(base.d);
    let ell = ell.unwrap_or(base.ell);
    let mut p = base.params.clone();
    for (k, v) in overrides {
        if !p.contains_key(k) {
            return Err(CatalogError::InvalidParameter(format!(
                "system `{id}` has no parameter `{k}`"
            )));
        }
        p.insert(k.clone(), *v);
    }
    let int = |key: &str| -> Result<u32, CatalogError> {
        let v = p[key];
        if v < 0.0 || v.fract() != 0.0 {
            return Err(CatalogError::InvalidParameter(format!(
                "`{key}` must be a non-negative integer, got {v}"
            )));
        }
        Ok(v as u32)
    };
    match base.kind {
        Kind::Morse => morse_like(d, p["c1"], p["beta"]),
        Kind::Oscillator => harmonic_oscillator(d, ell, p["omega"]),
        Kind::Coulomb => coulomb(d, ell, p["strength"]),
        Kind::HyperOscillator => hyper_oscillator(d, ell, int("n")?, p["beta"]),
        Kind::Hulthen => hulthen_like(d, p["p2"], p["A2"], int("n")?, p["beta1"]),
        Kind::Eckart => eckart_like(d, p["p3"], p["A3"], int("n")?, p["gamma1"]),
        Kind::HulthenDelta => hulthen_delta(d, p["p4"], p["A4"], int("n")?, p["delta"]),
        Kind::TrigPoschlTeller => trig_poschl_teller(d, p["p1"], int("m")?, int("n")?),
        Kind::SechPoschlTeller => sech_poschl_teller(d, p["p2"], int("n")?, int("m")?),
        Kind::TrigScarf => trig_scarf(d, p["p3"], int("n")?, p["alpha"], p["beta"]),
        Kind::RosenMorse => rosen_morse(d, p["p4"], int("n")?, p["alpha"], p["beta"]),
    }
}

impl QuantumSystem {
    fn p(&self, name: &str) -> f64 {
        self.params[name]
    }

    pub fn listing(&self) -> Listing {
        Listing {
            id: self.id,
            family: self.family_name,
            status: self.status,
            dimension: self.d,
            ell: self.ell,
            params: self.params.clone(),
            constraints: self.constraints.clone(),
            notes: self.notes.clone(),
        }
    }

    /// The paper's quantum-number label for the k-th bound state (k = node
    /// count).
    pub fn label(&self, k: u32) -> u32 {
        match self.kind {
            Kind::Oscillator => 2 * k + self.ell,
            Kind::TrigPoschlTeller => self.p("m") as u32 + k,
            Kind::SechPoschlTeller => self.p("n") as u32 - k,
            _ => k,
        }
    }

    /// Highest admissible state ordinal, if the bound set is finite.
    pub fn max_state(&self) -> Option<u32> {
        match self.kind {
            Kind::Morse => Some((self.p("beta") - 0.5 + 1e-9).floor() as u32),
            Kind::Hulthen => Some(((self.p("beta1") - 1.0).ceil() - 1.0).max(0.0) as u32),
            Kind::HulthenDelta => {
                Some(((self.p("delta") - 1.0).ceil() - 1.0).max(0.0) as u32)
            }
            Kind::SechPoschlTeller => Some(self.p("n") as u32 - 2),
            _ => None,
        }
    }

    fn check_state(&self, k: u32) -> Result<(), CatalogError> {
        if let Some(max) = self.max_state() {
            if k > max {
                return Err(CatalogError::Constraint(format!(
                    "state {k} exceeds the bound set of `{}` (max {max})",
                    self.id
                )));
            }
        }
        Ok(())
    }

    /// Node count of the k-th state.
    pub fn nodes(&self, k: u32) -> u32 {
        k
    }

    /// Closed-form energy of the k-th state, table-verbatim (up to the
    /// restored square on the Hulthen alias).
    pub fn energy(&self, k: u32) -> Result<f64, CatalogError> {
        self.check_state(k)?;
        let kf = k as f64;
        Ok(match self.kind {
            Kind::Morse => {
                let c1 = self.p("c1");
                let a = 2.0 * self.p("beta") - 2.0 * kf - 1.0;
                -c1 * c1 * a * a / 4.0
            }
            Kind::Oscillator => {
                self.p("omega") * (2.0 * kf + self.ell as f64 + self.d as f64 / 2.0)
            }
            Kind::Coulomb => {
                let s = self.p("strength");
                let npr = kf + self.ell as f64 + (self.d as f64 - 1.0) / 2.0;
                -s * s / (4.0 * npr * npr)
            }
            Kind::HyperOscillator => {
                let b = self.p("beta");
                let c = self.ell as f64 + self.d as f64 / 2.0;
                -2.0 * (-2.0 * kf * (b + 1.0) + c * (c + kf - b - 2.0))
            }
            Kind::Hulthen | Kind::HulthenDelta => {
                let (p, b1) = match self.kind {
                    Kind::Hulthen => (self.p("p2"), self.p("beta1")),
                    _ => (self.p("p4"), self.p("delta")),
                };
                let s = (b1 * b1 - (kf + 1.0) * (kf + 1.0)) / (2.0 * (kf + 1.0));
                -p * p * s * s
            }
            Kind::Eckart => {
                let p = self.p("p3");
                let g1 = self.p("gamma1");
                let s = (g1 * g1 + (kf + 1.0) * (kf + 1.0)) / (2.0 * (kf + 1.0));
                -p * p * s * s
            }
            Kind::TrigPoschlTeller => {
                let p = self.p("p1");
                let m = self.p("m");
                let n = m + kf;
                -p * p * (m * m - n * (n + 1.0) - 0.5)
            }
            Kind::SechPoschlTeller => {
                let p = self.p("p2");
                let m = self.p("n") - kf;
                -(m - 1.0) * (m - 1.0) * p * p
            }
            Kind::TrigScarf => {
                let p = self.p("p3");
                let (a, b) = (self.p("alpha"), self.p("beta"));
                0.25 * ((a - b) * (a - b)
                    - 4.0 * kf * (kf + a + b + 1.0)
                    - 2.0 * (a + b)
                    - 2.0)
                    * p
                    * p
            }
            Kind::RosenMorse => {
                let p = self.p("p4");
                let (a, b) = (self.p("alpha"), self.p("beta"));
                0.25 * ((a - b) * (a - b) - 4.0 * kf * (kf + a + b + 1.0)
                    - 2.0 * (a + b))
                    * p
                    * p
            }
        })
    }

    /// The polynomial entering the k-th wavefunction, when the table pins
    /// one down.
    pub fn family(&self, k: u32) -> PolynomialFamily {
        let kf = k as f64;
        match self.kind {
            Kind::Morse => PolynomialFamily::Laguerre {
                n: k,
                alpha: 2.0 * self.p("beta") - 2.0 * kf - 1.0,
            },
            Kind::Oscillator => PolynomialFamily::Laguerre {
                n: k,
                alpha: self.ell as f64 + (self.d as f64 - 2.0) / 2.0,
            },
            Kind::Coulomb => PolynomialFamily::Laguerre {
                n: k,
                alpha: 2.0 * self.ell as f64 + self.d as f64 - 2.0,
            },
            Kind::HyperOscillator => PolynomialFamily::Hypergeometric {
                n: k,
                beta: self.p("beta") + 1.0,
                gamma: self.ell as f64 + self.d as f64 / 2.0,
            },
            Kind::Hulthen | Kind::HulthenDelta => {
                let b1 = match self.kind {
                    Kind::Hulthen => self.p("beta1"),
                    _ => self.p("delta"),
                };
                PolynomialFamily::Hypergeometric {
                    n: k,
                    beta: (b1 * b1 + kf + 1.0) / (kf + 1.0),
                    gamma: (b1 * b1 - kf * kf - kf) / (kf + 1.0),
                }
            }
            Kind::Eckart => PolynomialFamily::Hypergeometric {
                n: k,
                beta: (kf - (self.p("gamma1").powi(2) - 1.0)) / (kf + 1.0),
                gamma: 2.0,
            },
            Kind::TrigPoschlTeller => PolynomialFamily::Legendre {
                n: self.p("m") as u32 + k,
                m: self.p("m") as i32,
            },
            Kind::SechPoschlTeller => PolynomialFamily::Legendre {
                n: self.p("n") as u32 - 1,
                m: (self.p("n") as u32 - k) as i32 - 1,
            },
            Kind::TrigScarf | Kind::RosenMorse => PolynomialFamily::Jacobi {
                n: k,
                alpha: self.p("alpha"),
                beta: self.p("beta"),
            },
        }
    }

    /// The mapping r -> g(r) of the defining relation (per-state where the
    /// relation constant depends on the state, as for Coulomb).
    pub fn mapping(&self, k: u32) -> Mapping {
        match self.kind {
            Kind::Morse => Mapping::new(Relation::PowerOverSquare, self.p("c1"), self.p("A1")),
            Kind::Oscillator => {
                Mapping::new(Relation::PowerOverG, (2.0 * self.p("omega")).sqrt(), 1.0)
            }
            Kind::Coulomb => {
                let npr = k as f64 + self.ell as f64 + (self.d as f64 - 1.0) / 2.0;
                Mapping::new(Relation::PowerPlain, self.p("strength") / npr, 1.0)
            }
            Kind::HyperOscillator => Mapping::new(Relation::PowerOverG, self.p("p1"), 1.0),
            Kind::Hulthen => {
                Mapping::new(Relation::PowerOverSquare, self.p("p2"), self.p("A2"))
            }
            Kind::HulthenDelta => {
                Mapping::new(Relation::SecondDeriv, self.p("p4"), self.p("A4"))
            }
            Kind::Eckart => Mapping::new(Relation::OneMinusG, self.p("p3"), self.p("A3")),
            Kind::TrigPoschlTeller => Mapping::new(Relation::OneMinusG2, self.p("p1"), 1.0),
            Kind::SechPoschlTeller => {
                Mapping::new(Relation::OneMinusG2Sq, self.p("p2"), 1.0)
            }
            Kind::TrigScarf => Mapping::new(Relation::OneMinusG2, self.p("p3"), 1.0),
            Kind::RosenMorse => Mapping::new(Relation::OneMinusG2Sq, self.p("p4"), 1.0),
        }
    }

    /// Table-verbatim potential V(r).
    pub fn potential(&self) -> Expr {
        let d = self.d;
        let cf = (self.ell as i64 * (self.ell as i64 + d as i64 - 2)) as f64;
        match self.kind {
            Kind::Morse => {
                let (c1, a1, b) = (self.p("c1"), self.p("A1"), self.p("beta"));
                with_background(
                    pe(&format!(
                        "{:?}*exp(-{c1:?}*r)*(({a1:?}*exp(-{c1:?}*r))/4 - {b:?})",
                        a1 * c1 * c1
                    )),
                    d,
                )
            }
            Kind::Oscillator => {
                let w = self.p("omega");
                let mut s = format!("({:?}/4)*r^2", w * w);
                if cf != 0.0 {
                    s.push_str(&format!(" + {cf:?}/r^2"));
                }
                pe(&s)
            }
            Kind::Coulomb => {
                let mut s = format!("-{:?}/r", self.p("strength"));
                if cf != 0.0 {
                    s.push_str(&format!(" + {cf:?}/r^2"));
                }
                pe(&s)
            }
            Kind::HyperOscillator => {
                let (b, n) = (self.p("beta"), self.p("n"));
                let c = self.ell as f64 + d as f64 / 2.0;
                let t1 = -4.0 * n * (b + 1.0);
                let t2 = 2.0 * c * (2.0 * c + 2.0 * n - 2.0 * b - 4.0);
                let t3 = (-n + b - c + 1.0).powi(2) - 1.0;
                let mut s = format!(
                    "(r^2/(1-r^2))*({t1:?} + {t2:?} + ({t3:?})/(4*(1-r^2)))"
                );
                if cf != 0.0 {
                    s.push_str(&format!(" + {cf:?}/r^2"));
                }
                pe(&s)
            }
            Kind::Hulthen | Kind::HulthenDelta => {
                let (p, a, b1) = match self.kind {
                    Kind::Hulthen => (self.p("p2"), self.p("A2"), self.p("beta1")),
                    _ => (self.p("p4"), self.p("A4"), self.p("delta")),
                };
                with_background(
                    pe(&format!(
                        "-({:?}*exp(-{p:?}*r))/(1-{a:?}*exp(-{p:?}*r))",
                        b1 * b1 * a * p * p
                    )),
                    d,
                )
            }
            Kind::Eckart => {
                let (p, a, g1) = (self.p("p3"), self.p("A3"), self.p("gamma1"));
                with_background(
                    pe(&format!(
                        "({:?}*exp(-{p:?}*r))/(1-{a:?}*exp(-{p:?}*r))",
                        p * p * a * g1 * g1
                    )),
                    d,
                )
            }
            Kind::TrigPoschlTeller => {
                let (p, m) = (self.p("p1"), self.p("m"));
                with_background(
                    pe(&format!("{:?}*tan({p:?}*r)^2", p * p * (m * m - 0.25))),
                    d,
                )
            }
            Kind::SechPoschlTeller => {
                let (p, n) = (self.p("p2"), self.p("n"));
                with_background(
                    pe(&format!("-{:?}*sech({p:?}*r)^2", n * (n - 1.0) * p * p)),
                    d,
                )
            }
            Kind::TrigScarf => {
                let p = self.p("p3");
                let (a, b) = (self.p("alpha"), self.p("beta"));
                let c1s = (a * a - b * b) / 2.0 * p * p;
                let c2s = (a * a + b * b) / 2.0 * p * p;
                with_background(
                    pe(&format!(
                        "{c1s:?}*tan({p:?}*r)^2 + {c2s:?}*tan({p:?}*r)/cos({p:?}*r)"
                    )),
                    d,
                )
            }
            Kind::RosenMorse => {
                let p = self.p("p4");
                let (a, b, n) = (self.p("alpha"), self.p("beta"), self.p("n"));
                let c3s = ((2.0 * n + a + b + 1.0).powi(2) - 1.0) / 4.0 * p * p;
                let c4s = (a * a - b * b) / 2.0 * p * p;
                with_background(
                    pe(&format!(
                        "{c3s:?}*tanh({p:?}*r)^2 + {c4s:?}*tanh({p:?}*r)"
                    )),
                    d,
                )
            }
        }
    }

    /// Unnormalized analytic wavefunction of the k-th state. Verified
    /// systems go through the transformation template (value-equal to the
    /// table column); ambiguous ones reproduce the table verbatim.
    pub fn psi(&self, k: u32) -> Result<Expr, CatalogError> {
        self.check_state(k)?;
        match self.kind {
            Kind::Morse
            | Kind::Oscillator
            | Kind::Coulomb
            | Kind::Hulthen
            | Kind::HulthenDelta
            | Kind::TrigPoschlTeller
            | Kind::SechPoschlTeller => {
                wavefunction_template(&self.family(k), &self.mapping(k), self.d)
                    .map_err(|e| CatalogError::InvalidParameter(e.to_string()))
            }
            Kind::HyperOscillator => {
                let (b, c) = (self.p("beta"), self.ell as f64 + self.d as f64 / 2.0);
                let kf = k as f64;
                let g = Expr::var("r").powi(2);
                let mut factors = Vec::new();
                if self.ell > 0 {
                    factors.push(Expr::var("r").powi(self.ell as i64));
                }
                factors.push(
                    pe("1 - r^2").pow_real((-kf + b - c + 2.0) / 2.0),
                );
                factors.push(
                    self.family(k)
                        .as_expr(&g)
                        .map_err(|e| CatalogError::InvalidParameter(e.to_string()))?,
                );
                Ok(Expr::Mul(factors).simplify())
            }
            Kind::Eckart => {
                let (p, a, g1) = (self.p("p3"), self.p("A3"), self.p("gamma1"));
                let kf = k as f64;
                let kappa = (g1 * g1 + (kf + 1.0) * (kf + 1.0)) / (2.0 * (kf + 1.0));
                let mut factors = radial_prefactor(self.d);
                factors.push(pe(&format!("1 - {a:?}*exp(-{p:?}*r)")));
                factors.push(pe(&format!("exp(-{:?}*r)", p * kappa)));
                let arg = pe(&format!("1 - exp(-{p:?}*r)"));
                factors.push(
                    self.family(k)
                        .as_expr(&arg)
                        .map_err(|e| CatalogError::InvalidParameter(e.to_string()))?,
                );
                Ok(Expr::Mul(factors).simplify())
            }
            Kind::TrigScarf => {
                let p = self.p("p3");
                let (a, b) = (self.p("alpha"), self.p("beta"));
                let mut factors = radial_prefactor(self.d);
                factors.push(
                    Expr::Cos(Box::new(pe(&format!("{p:?}*r"))))
                        .pow_real((a + b + 1.0) / 2.0),
                );
                factors.push(
                    pe(&format!(
                        "(1+sin({p:?}*r))/(1-sin({p:?}*r))"
                    ))
                    .pow_real((b - a) / 4.0),
                );
                let arg = pe(&format!("sin({p:?}*r)"));
                factors.push(
                    self.family(k)
                        .as_expr(&arg)
                        .map_err(|e| CatalogError::InvalidParameter(e.to_string()))?,
                );
                Ok(Expr::Mul(factors).simplify())
            }
            Kind::RosenMorse => {
                let p = self.p("p4");
                let (a, b) = (self.p("alpha"), self.p("beta"));
                let mut factors = radial_prefactor(self.d);
                factors.push(
                    Expr::Sech(Box::new(pe(&format!("{p:?}*r")))).pow_real((a + b) / 2.0),
                );
                factors.push(pe(&format!("exp({:?}*r)", -(a - b) / 2.0 * p)));
                let arg = pe(&format!("tanh({p:?}*r)"));
                factors.push(
                    self.family(k)
                        .as_expr(&arg)
                        .map_err(|e| CatalogError::InvalidParameter(e.to_string()))?,
                );
                Ok(Expr::Mul(factors).simplify())
            }
        }
    }

    /// Solver grid advice for the k-th state.
    pub fn domain_hint(&self, k: u32) -> DomainHint {
        match self.kind {
            Kind::Morse => {
                let c1 = self.p("c1");
                DomainHint {
                    // left wall where A1 e^{-c1 r} ~ 140 kills u; Morse's well
                    // bottom sits at negative r, so the problem lives on the
                    // full line
                    r_lo: -(140.0 / self.p("A1")).ln() / c1,
                    r_hi: 35.0 / c1,
                    n_points: 16000,
                    origin_seed: None,
                }
            }
            Kind::Oscillator => {
                let w = self.p("omega");
                let e = self.energy(k).unwrap_or(w * 10.0);
                let nu = if self.d == 1 {
                    self.ell as f64
                } else {
                    self.ell as f64 + (self.d as f64 - 1.0) / 2.0
                };
                DomainHint {
                    r_lo: 0.0,
                    r_hi: 2.0 * (e / w).sqrt() / w.sqrt() + 8.0 / w.sqrt(),
                    n_points: 4000,
                    origin_seed: Some(nu),
                }
            }
            Kind::Coulomb => {
                let npr = k as f64 + self.ell as f64 + (self.d as f64 - 1.0) / 2.0;
                DomainHint {
                    r_lo: 0.0,
                    r_hi: 30.0 * npr * npr,
                    n_points: 20000,
                    origin_seed: Some(self.ell as f64 + (self.d as f64 - 1.0) / 2.0),
                }
            }
            Kind::Hulthen | Kind::HulthenDelta => {
                let p = match self.kind {
                    Kind::Hulthen => self.p("p2"),
                    _ => self.p("p4"),
                };
                let kappa = (-self.energy(k).unwrap_or(-1.0)).sqrt().max(0.3);
                DomainHint {
                    r_lo: 0.0,
                    r_hi: 18.0 / kappa + 5.0 / p,
                    n_points: 8000,
                    origin_seed: Some(1.0),
                }
            }
            Kind::Eckart => DomainHint {
                r_lo: 0.0,
                r_hi: 20.0 / self.p("p3"),
                n_points: 8000,
                origin_seed: Some(1.0),
            },
            Kind::HyperOscillator => DomainHint {
                r_lo: 0.0,
                r_hi: 1.0 - 1e-6,
                n_points: 4000,
                origin_seed: Some(self.ell as f64 + (self.d as f64 - 1.0) / 2.0),
            },
            Kind::TrigPoschlTeller | Kind::TrigScarf => {
                let p = match self.kind {
                    Kind::TrigPoschlTeller => self.p("p1"),
                    _ => self.p("p3"),
                };
                // hard-wall truncation shifts E by ~offset^{2m+1}/offset,
                // so the cell must stop very close to the tan^2 singularity
                let half = std::f64::consts::FRAC_PI_2 / p - 2e-4 / p;
                DomainHint {
                    r_lo: -half,
                    r_hi: half,
                    n_points: 24000,
                    origin_seed: None,
                }
            }
            Kind::SechPoschlTeller => {
                let p = self.p("p2");
                DomainHint {
                    r_lo: -20.0 / p,
                    r_hi: 20.0 / p,
                    n_points: 12000,
                    origin_seed: None,
                }
            }
            Kind::RosenMorse => {
                let p = self.p("p4");
                DomainHint {
                    r_lo: -18.0 / p,
                    r_hi: 18.0 / p,
                    n_points: 12000,
                    origin_seed: None,
                }
            }
        }
    }
}

fn radial_prefactor(d: u32) -> Vec<Expr> {
    if d == 1 {
        vec![]
    } else {
        vec![Expr::var("r").pow_real(-(d as f64 - 1.0) / 2.0)]
    }
}
