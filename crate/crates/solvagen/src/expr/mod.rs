//! Minimal computer-algebra core: single-variable expression trees with
//! parsing, exact differentiation, best-effort simplification and numeric
//! evaluation.
//!
//! Expressions are immutable values; every operation returns a new tree.
//! Simplification is value-preserving but makes no canonical-form promise.

mod parser;

pub use parser::parse;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Reduced rational number, used for exponents of [`Expr::Pow`].
///
/// Keeping exponents rational keeps differentiation closed over the node set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational with zero denominator");
        if num == 0 {
            return Rational { num: 0, den: 1 };
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = -num;
            den = -den;
        }
        Rational { num, den }
    }

    pub fn int(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_one(&self) -> bool {
        self.num == 1 && self.den == 1
    }

    pub fn add(&self, other: Rational) -> Rational {
        Rational::new(self.num * other.den + other.num * self.den, self.den * other.den)
    }

    pub fn sub(&self, other: Rational) -> Rational {
        Rational::new(self.num * other.den - other.num * self.den, self.den * other.den)
    }

    pub fn mul(&self, other: Rational) -> Rational {
        Rational::new(self.num * other.num, self.den * other.den)
    }

    /// Best small-denominator rational approximation of `x`, if one exists
    /// within `tol`. Used when parsing exponents and building power factors.
    pub fn approximate(x: f64, max_den: i64, tol: f64) -> Option<Rational> {
        if !x.is_finite() {
            return None;
        }
        // continued-fraction expansion
        let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, x.floor() as i64, 1i64);
        let mut frac = x - x.floor();
        for _ in 0..40 {
            if (x - p1 as f64 / q1 as f64).abs() <= tol * x.abs().max(1.0) {
                return Some(Rational::new(p1, q1));
            }
            if frac.abs() < 1e-15 {
                break;
            }
            let r = 1.0 / frac;
            let a = r.floor();
            frac = r - a;
            let a = a as i64;
            let (p2, q2) = (a.checked_mul(p1)?.checked_add(p0)?, a.checked_mul(q1)?.checked_add(q0)?);
            p0 = p1;
            q0 = q1;
            p1 = p2;
            q1 = q2;
            if q1 > max_den {
                return None;
            }
        }
        if q1 <= max_den && (x - p1 as f64 / q1 as f64).abs() <= tol * x.abs().max(1.0) {
            Some(Rational::new(p1, q1))
        } else {
            None
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Symbolic expression over one or more real variables.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, Rational),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Tan(Box<Expr>),
    Sinh(Box<Expr>),
    Cosh(Box<Expr>),
    Tanh(Box<Expr>),
    Sech(Box<Expr>),
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("domain error: {0}")]
    Domain(String),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        Expr::Add(terms)
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        Expr::Mul(factors)
    }

    pub fn neg(self) -> Expr {
        Expr::Mul(vec![Expr::Num(-1.0), self])
    }

    pub fn sub(self, other: Expr) -> Expr {
        Expr::Add(vec![self, other.neg()])
    }

    pub fn div(self, other: Expr) -> Expr {
        Expr::Mul(vec![self, Expr::Pow(Box::new(other), Rational::int(-1))])
    }

    pub fn pow(self, q: Rational) -> Expr {
        Expr::Pow(Box::new(self), q)
    }

    pub fn powi(self, n: i64) -> Expr {
        self.pow(Rational::int(n))
    }

    pub fn sqrt(self) -> Expr {
        self.pow(Rational::new(1, 2))
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    pub fn ln(self) -> Expr {
        Expr::Ln(Box::new(self))
    }

    /// `base^a` for a real exponent: a `Pow` node when `a` is (close to) a
    /// small rational, otherwise `exp(a*ln(base))`.
    pub fn pow_real(self, a: f64) -> Expr {
        match Rational::approximate(a, 64, 1e-12) {
            Some(q) => self.pow(q),
            None => Expr::Mul(vec![Expr::Num(a), self.ln()]).exp(),
        }
    }

    /// Free variables of the expression.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Add(xs) | Expr::Mul(xs) => {
                for x in xs {
                    x.collect_vars(out);
                }
            }
            Expr::Pow(b, _) => b.collect_vars(out),
            Expr::Exp(u)
            | Expr::Ln(u)
            | Expr::Sin(u)
            | Expr::Cos(u)
            | Expr::Tan(u)
            | Expr::Sinh(u)
            | Expr::Cosh(u)
            | Expr::Tanh(u)
            | Expr::Sech(u) => u.collect_vars(out),
        }
    }

    /// Substitutes `replacement` for every occurrence of variable `var`.
    pub fn subst(&self, var: &str, replacement: &Expr) -> Expr {
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Var(v) => {
                if v == var {
                    replacement.clone()
                } else {
                    self.clone()
                }
            }
            Expr::Add(xs) => Expr::Add(xs.iter().map(|x| x.subst(var, replacement)).collect()),
            Expr::Mul(xs) => Expr::Mul(xs.iter().map(|x| x.subst(var, replacement)).collect()),
            Expr::Pow(b, q) => Expr::Pow(Box::new(b.subst(var, replacement)), *q),
            Expr::Exp(u) => Expr::Exp(Box::new(u.subst(var, replacement))),
            Expr::Ln(u) => Expr::Ln(Box::new(u.subst(var, replacement))),
            Expr::Sin(u) => Expr::Sin(Box::new(u.subst(var, replacement))),
            Expr::Cos(u) => Expr::Cos(Box::new(u.subst(var, replacement))),
            Expr::Tan(u) => Expr::Tan(Box::new(u.subst(var, replacement))),
            Expr::Sinh(u) => Expr::Sinh(Box::new(u.subst(var, replacement))),
            Expr::Cosh(u) => Expr::Cosh(Box::new(u.subst(var, replacement))),
            Expr::Tanh(u) => Expr::Tanh(Box::new(u.subst(var, replacement))),
            Expr::Sech(u) => Expr::Sech(Box::new(u.subst(var, replacement))),
        }
    }

    /// Evaluates with the given variable bindings.
    ///
    /// Domain violations (log of a non-positive value, negative power of
    /// zero, fractional power of a negative base) are reported as errors,
    /// never as silent NaN.
    pub fn eval(&self, env: &HashMap<String, f64>) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var(name) => env
                .get(name)
                .copied()
                .ok_or_else(|| EvalError::Unbound(name.clone())),
            Expr::Add(xs) => {
                let mut acc = 0.0;
                for x in xs {
                    acc += x.eval(env)?;
                }
                Ok(acc)
            }
            Expr::Mul(xs) => {
                let mut acc = 1.0;
                for x in xs {
                    acc *= x.eval(env)?;
                }
                Ok(acc)
            }
            Expr::Pow(b, q) => {
                let base = b.eval(env)?;
                pow_rational(base, *q)
            }
            Expr::Exp(u) => Ok(u.eval(env)?.exp()),
            Expr::Ln(u) => {
                let v = u.eval(env)?;
                if v <= 0.0 {
                    Err(EvalError::Domain(format!("ln of non-positive value {v}")))
                } else {
                    Ok(v.ln())
                }
            }
            Expr::Sin(u) => Ok(u.eval(env)?.sin()),
            Expr::Cos(u) => Ok(u.eval(env)?.cos()),
            Expr::Tan(u) => Ok(u.eval(env)?.tan()),
            Expr::Sinh(u) => Ok(u.eval(env)?.sinh()),
            Expr::Cosh(u) => Ok(u.eval(env)?.cosh()),
            Expr::Tanh(u) => Ok(u.eval(env)?.tanh()),
            Expr::Sech(u) => Ok(1.0 / u.eval(env)?.cosh()),
        }
    }

    /// Evaluation with a single bound variable.
    pub fn eval1(&self, var: &str, x: f64) -> Result<f64, EvalError> {
        let mut env = HashMap::with_capacity(1);
        env.insert(var.to_string(), x);
        self.eval(&env)
    }

    /// Exact symbolic derivative with respect to `var`.
    pub fn diff(&self, var: &str) -> Expr {
        match self {
            Expr::Num(_) => Expr::Num(0.0),
            Expr::Var(v) => {
                if v == var {
                    Expr::Num(1.0)
                } else {
                    Expr::Num(0.0)
                }
            }
            Expr::Add(xs) => Expr::Add(xs.iter().map(|x| x.diff(var)).collect()),
            Expr::Mul(xs) => {
                // product rule over the factor list
                let mut terms = Vec::with_capacity(xs.len());
                for (i, _) in xs.iter().enumerate() {
                    let mut factors = Vec::with_capacity(xs.len());
                    for (j, x) in xs.iter().enumerate() {
                        if i == j {
                            factors.push(x.diff(var));
                        } else {
                            factors.push(x.clone());
                        }
                    }
                    terms.push(Expr::Mul(factors));
                }
                Expr::Add(terms)
            }
            Expr::Pow(b, q) => {
                if q.is_zero() {
                    return Expr::Num(0.0);
                }
                Expr::Mul(vec![
                    Expr::Num(q.as_f64()),
                    b.clone().pow(q.sub(Rational::int(1))),
                    b.diff(var),
                ])
            }
            Expr::Exp(u) => Expr::Mul(vec![u.diff(var), self.clone()]),
            Expr::Ln(u) => Expr::Mul(vec![u.diff(var), u.clone().powi(-1)]),
            Expr::Sin(u) => Expr::Mul(vec![u.diff(var), Expr::Cos(u.clone())]),
            Expr::Cos(u) => Expr::Mul(vec![Expr::Num(-1.0), u.diff(var), Expr::Sin(u.clone())]),
            Expr::Tan(u) => Expr::Mul(vec![u.diff(var), Expr::Cos(u.clone()).powi(-2)]),
            Expr::Sinh(u) => Expr::Mul(vec![u.diff(var), Expr::Cosh(u.clone())]),
            Expr::Cosh(u) => Expr::Mul(vec![u.diff(var), Expr::Sinh(u.clone())]),
            Expr::Tanh(u) => Expr::Mul(vec![u.diff(var), Expr::Cosh(u.clone()).powi(-2)]),
            Expr::Sech(u) => Expr::Mul(vec![
                Expr::Num(-1.0),
                u.diff(var),
                Expr::Sech(u.clone()),
                Expr::Tanh(u.clone()),
            ]),
        }
    }

    /// Constant folding, identity elimination and light power merging.
    /// Value-preserving on the common domain; idempotent on its own output.
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Num(_) | Expr::Var(_) => self.clone(),
            Expr::Add(xs) => simplify_add(xs),
            Expr::Mul(xs) => simplify_mul(xs),
            Expr::Pow(b, q) => simplify_pow(b.simplify(), *q),
            Expr::Exp(u) => {
                let u = u.simplify();
                match u {
                    Expr::Num(v) => Expr::Num(v.exp()),
                    Expr::Ln(inner) => *inner,
                    other => Expr::Exp(Box::new(other)),
                }
            }
            Expr::Ln(u) => {
                let u = u.simplify();
                match u {
                    Expr::Num(v) if v > 0.0 => Expr::Num(v.ln()),
                    Expr::Exp(inner) => *inner,
                    other => Expr::Ln(Box::new(other)),
                }
            }
            Expr::Sin(u) => fold_unary(u.simplify(), f64::sin, Expr::Sin),
            Expr::Cos(u) => fold_unary(u.simplify(), f64::cos, Expr::Cos),
            Expr::Tan(u) => fold_unary(u.simplify(), f64::tan, Expr::Tan),
            Expr::Sinh(u) => fold_unary(u.simplify(), f64::sinh, Expr::Sinh),
            Expr::Cosh(u) => fold_unary(u.simplify(), f64::cosh, Expr::Cosh),
            Expr::Tanh(u) => fold_unary(u.simplify(), f64::tanh, Expr::Tanh),
            Expr::Sech(u) => fold_unary(u.simplify(), |x| 1.0 / x.cosh(), Expr::Sech),
        }
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 1.0)
    }
}

fn pow_rational(base: f64, q: Rational) -> Result<f64, EvalError> {
    if q.is_zero() {
        return Ok(1.0);
    }
    if base == 0.0 {
        if q.as_f64() < 0.0 {
            return Err(EvalError::Domain("negative power of zero".into()));
        }
        return Ok(0.0);
    }
    if base < 0.0 {
        if q.is_integer() {
            return Ok(base.powi(q.num() as i32));
        }
        return Err(EvalError::Domain(format!(
            "fractional power {q} of negative base {base}"
        )));
    }
    if q.is_integer() && q.num().abs() <= 64 {
        Ok(base.powi(q.num() as i32))
    } else {
        Ok(base.powf(q.as_f64()))
    }
}

fn fold_unary(arg: Expr, f: impl Fn(f64) -> f64, ctor: impl Fn(Box<Expr>) -> Expr) -> Expr {
    match arg {
        Expr::Num(v) => Expr::Num(f(v)),
        other => ctor(Box::new(other)),
    }
}

/// Structural total order, used to sort Add/Mul children deterministically.
fn cmp_expr(a: &Expr, b: &Expr) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    fn rank(e: &Expr) -> u8 {
        match e {
            Expr::Num(_) => 0,
            Expr::Var(_) => 1,
            Expr::Pow(..) => 2,
            Expr::Mul(_) => 3,
            Expr::Add(_) => 4,
            Expr::Exp(_) => 5,
            Expr::Ln(_) => 6,
            Expr::Sin(_) => 7,
            Expr::Cos(_) => 8,
            Expr::Tan(_) => 9,
            Expr::Sinh(_) => 10,
            Expr::Cosh(_) => 11,
            Expr::Tanh(_) => 12,
            Expr::Sech(_) => 13,
        }
    }
    match rank(a).cmp(&rank(b)) {
        Ordering::Equal => {}
        ord => return ord,
    }
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => x.total_cmp(y),
        (Expr::Var(x), Expr::Var(y)) => x.cmp(y),
        (Expr::Pow(bx, qx), Expr::Pow(by, qy)) => cmp_expr(bx, by).then_with(|| {
            (qx.num() * qy.den()).cmp(&(qy.num() * qx.den()))
        }),
        (Expr::Add(xs), Expr::Add(ys)) | (Expr::Mul(xs), Expr::Mul(ys)) => {
            for (x, y) in xs.iter().zip(ys.iter()) {
                match cmp_expr(x, y) {
                    Ordering::Equal => {}
                    ord => return ord,
                }
            }
            xs.len().cmp(&ys.len())
        }
        (Expr::Exp(x), Expr::Exp(y))
        | (Expr::Ln(x), Expr::Ln(y))
        | (Expr::Sin(x), Expr::Sin(y))
        | (Expr::Cos(x), Expr::Cos(y))
        | (Expr::Tan(x), Expr::Tan(y))
        | (Expr::Sinh(x), Expr::Sinh(y))
        | (Expr::Cosh(x), Expr::Cosh(y))
        | (Expr::Tanh(x), Expr::Tanh(y))
        | (Expr::Sech(x), Expr::Sech(y)) => cmp_expr(x, y),
        _ => Ordering::Equal,
    }
}

fn simplify_add(xs: &[Expr]) -> Expr {
    let mut flat = Vec::new();
    for x in xs {
        match x.simplify() {
            Expr::Add(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    // collect coefficients of structurally identical terms
    let mut constant = 0.0;
    let mut terms: Vec<(Expr, f64)> = Vec::new();
    for t in flat {
        match t {
            Expr::Num(v) => constant += v,
            other => {
                let (coef, core) = split_coefficient(other);
                if let Some(slot) = terms.iter_mut().find(|(c, _)| *c == core) {
                    slot.1 += coef;
                } else {
                    terms.push((core, coef));
                }
            }
        }
    }
    let mut out: Vec<Expr> = Vec::new();
    for (core, coef) in terms {
        if coef == 0.0 {
            continue;
        }
        if coef == 1.0 {
            out.push(core);
        } else {
            out.push(attach_coefficient(coef, core));
        }
    }
    out.sort_by(cmp_expr);
    if constant != 0.0 || out.is_empty() {
        out.insert(0, Expr::Num(constant));
    }
    if out.len() == 1 {
        out.pop().unwrap()
    } else {
        Expr::Add(out)
    }
}

/// Splits a term into (numeric coefficient, residual factor).
fn split_coefficient(e: Expr) -> (f64, Expr) {
    match e {
        Expr::Mul(factors) => {
            let mut coef = 1.0;
            let mut rest = Vec::new();
            for f in factors {
                match f {
                    Expr::Num(v) => coef *= v,
                    other => rest.push(other),
                }
            }
            let core = match rest.len() {
                0 => Expr::Num(1.0),
                1 => rest.pop().unwrap(),
                _ => Expr::Mul(rest),
            };
            (coef, core)
        }
        other => (1.0, other),
    }
}

fn attach_coefficient(coef: f64, core: Expr) -> Expr {
    if core.is_one() {
        return Expr::Num(coef);
    }
    match core {
        Expr::Mul(mut fs) => {
            fs.insert(0, Expr::Num(coef));
            Expr::Mul(fs)
        }
        other => Expr::Mul(vec![Expr::Num(coef), other]),
    }
}

fn simplify_mul(xs: &[Expr]) -> Expr {
    let mut flat = Vec::new();
    for x in xs {
        match x.simplify() {
            Expr::Mul(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    let mut coef = 1.0;
    // (base, exponent) pairs for power merging
    let mut powers: Vec<(Expr, Rational)> = Vec::new();
    let mut exp_args: Vec<Expr> = Vec::new();
    for f in flat {
        match f {
            Expr::Num(v) => coef *= v,
            Expr::Exp(arg) => exp_args.push(*arg),
            Expr::Pow(base, q) => merge_power(&mut powers, *base, q),
            other => merge_power(&mut powers, other, Rational::int(1)),
        }
    }
    if coef == 0.0 {
        return Expr::Num(0.0);
    }
    let mut out = Vec::new();
    for (base, q) in powers {
        let p = simplify_pow(base, q);
        match p {
            Expr::Num(v) => coef *= v,
            other => out.push(other),
        }
    }
    if !exp_args.is_empty() {
        let arg = simplify_add(&exp_args);
        if let Expr::Num(v) = arg {
            coef *= v.exp();
        } else {
            out.push(Expr::Exp(Box::new(arg)));
        }
    }
    out.sort_by(cmp_expr);
    if coef != 1.0 || out.is_empty() {
        out.insert(0, Expr::Num(coef));
    }
    if out.len() == 1 {
        out.pop().unwrap()
    } else {
        Expr::Mul(out)
    }
}

fn merge_power(powers: &mut Vec<(Expr, Rational)>, base: Expr, q: Rational) {
    if let Some(slot) = powers.iter_mut().find(|(b, _)| *b == base) {
        slot.1 = slot.1.add(q);
    } else {
        powers.push((base, q));
    }
}

fn simplify_pow(base: Expr, q: Rational) -> Expr {
    if q.is_zero() {
        return Expr::Num(1.0);
    }
    if q.is_one() {
        return base;
    }
    match base {
        Expr::Num(v) => match pow_rational(v, q) {
            Ok(out) if out.is_finite() => Expr::Num(out),
            _ => Expr::Pow(Box::new(Expr::Num(v)), q),
        },
        Expr::Pow(inner, p) => simplify_pow(*inner, p.mul(q)),
        Expr::Exp(arg) => {
            Expr::Exp(Box::new(simplify_mul(&[Expr::Num(q.as_f64()), *arg])))
        }
        other => Expr::Pow(Box::new(other), q),
    }
}

// Pretty printer. Output re-parses to a value-equal expression.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f, 0)
    }
}

/// precedence levels: 0 add, 1 mul, 2 pow/atom
fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
    match e {
        Expr::Num(v) => {
            if *v < 0.0 && prec > 0 {
                write!(f, "({v})")
            } else {
                write!(f, "{v}")
            }
        }
        Expr::Var(name) => write!(f, "{name}"),
        Expr::Add(xs) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                write_expr(x, f, 1)?;
            }
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
        Expr::Mul(xs) => {
            if prec > 1 {
                write!(f, "(")?;
            }
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, "*")?;
                }
                write_expr(x, f, 2)?;
            }
            if prec > 1 {
                write!(f, ")")?;
            }
            Ok(())
        }
        Expr::Pow(b, q) => {
            // `^` parses right-associatively, so a Pow base needs parens
            if prec > 2 {
                write!(f, "(")?;
            }
            write_expr(b, f, 3)?;
            if q.is_integer() && q.num() >= 0 {
                write!(f, "^{}", q.num())?;
            } else {
                write!(f, "^({q})")?;
            }
            if prec > 2 {
                write!(f, ")")?;
            }
            Ok(())
        }
        Expr::Exp(u) => write_call(f, "exp", u),
        Expr::Ln(u) => write_call(f, "ln", u),
        Expr::Sin(u) => write_call(f, "sin", u),
        Expr::Cos(u) => write_call(f, "cos", u),
        Expr::Tan(u) => write_call(f, "tan", u),
        Expr::Sinh(u) => write_call(f, "sinh", u),
        Expr::Cosh(u) => write_call(f, "cosh", u),
        Expr::Tanh(u) => write_call(f, "tanh", u),
        Expr::Sech(u) => write_call(f, "sech", u),
    }
}

fn write_call(f: &mut fmt::Formatter<'_>, name: &str, arg: &Expr) -> fmt::Result {
    write!(f, "{name}(")?;
    write_expr(arg, f, 0)?;
    write!(f, ")")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, var: &str, x: f64) -> f64 {
        parse(src).unwrap().eval1(var, x).unwrap()
    }

    #[test]
    fn parse_and_eval_basics() {
        assert_eq!(ev("exp(-2*r)", "r", 0.0), 1.0);
        assert_eq!(ev("r^2 + 1", "r", 3.0), 10.0);
        assert_eq!(ev("tanh(r)*sech(r)", "r", 0.0), 0.0);
        assert!((ev("pi", "r", 0.0) - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn eval_domain_errors() {
        let e = parse("1/g").unwrap();
        assert!(matches!(e.eval1("g", 0.0), Err(EvalError::Domain(_))));
        let e = parse("ln(g)").unwrap();
        assert!((e.eval1("g", std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(e.eval1("g", -1.0), Err(EvalError::Domain(_))));
        let e = parse("g^(1/2)").unwrap();
        assert!((e.eval1("g", 2.25).unwrap() - 1.5).abs() < 1e-15);
        assert!(matches!(e.eval1("g", -2.0), Err(EvalError::Domain(_))));
    }

    #[test]
    fn diff_power_rule() {
        let d = parse("r^2").unwrap().diff("r").simplify();
        assert!((d.eval1("r", 3.0).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn diff_chain_rule() {
        let e = parse("exp(-2*r)").unwrap();
        let d = e.diff("r");
        assert!((d.eval1("r", 0.0).unwrap() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn diff_matches_finite_difference() {
        let samples = [
            ("sin(2*r)", 0.0),
            ("sin(2*r)", 0.7),
            ("tanh(r)*sech(r)", 0.4),
            ("r^3 + exp(-r)*cos(r)", 1.3),
            ("ln(1 + r^2)", 0.9),
        ];
        let h = 1e-5;
        for (src, x) in samples {
            let e = parse(src).unwrap();
            let d = e.diff("r");
            let fd = (e.eval1("r", x + h).unwrap() - e.eval1("r", x - h).unwrap()) / (2.0 * h);
            assert!(
                (d.eval1("r", x).unwrap() - fd).abs() < 1e-6,
                "{src} at {x}"
            );
        }
    }

    #[test]
    fn simplify_identities() {
        let e = parse("0*r + r^1").unwrap().simplify();
        assert_eq!(e, Expr::var("r"));
        let e = parse("(2+3)*g").unwrap().simplify();
        assert_eq!(e, Expr::Mul(vec![Expr::Num(5.0), Expr::var("g")]));
        // product of exponentials merges into one
        let e = parse("exp(-c*r)*exp(-c*r)").unwrap().simplify();
        let v = {
            let mut env = HashMap::new();
            env.insert("c".to_string(), 2.0);
            env.insert("r".to_string(), 0.5);
            e.eval(&env).unwrap()
        };
        assert!((v - (-2.0f64).exp()).abs() < 1e-15);
        let n_exp = format!("{e}").matches("exp").count();
        assert_eq!(n_exp, 1);
    }

    #[test]
    fn simplify_preserves_value() {
        let cases = [
            "r^2*r^3",
            "(1 - r)*(1 + r) + r^2",
            "exp(r)*exp(-r/2)*r^0",
            "2*sin(r) + 3*sin(r) - sin(r)",
            "cos(r)^2/cos(r)",
        ];
        for src in cases {
            let e = parse(src).unwrap();
            let s = e.simplify();
            for i in 0..20 {
                let x = 0.1 + 0.17 * i as f64;
                let a = e.eval1("r", x).unwrap();
                let b = s.eval1("r", x).unwrap();
                assert!(
                    (a - b).abs() <= 1e-12 * a.abs().max(1.0),
                    "{src} at {x}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn simplify_idempotent() {
        let cases = [
            "r^2*r^3 + 0*r",
            "exp(-c*r)*exp(-c*r)",
            "(2+3)*g + g",
            "sin(r)*cos(r)*sin(r)",
            "1/(r*r)",
        ];
        for src in cases {
            let once = parse(src).unwrap().simplify();
            let twice = once.simplify();
            assert_eq!(once, twice, "{src}");
        }
    }

    #[test]
    fn subst_replaces_variable() {
        let e = parse("g^2 + ln(g)").unwrap();
        let g = parse("exp(-r)").unwrap();
        let sub = e.subst("g", &g);
        let expect = (-2.0f64).exp() + -1.0;
        assert!((sub.eval1("r", 1.0).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn roundtrip_display_parse() {
        let cases = [
            "r^2 + 1",
            "-r + 2*exp(-3*r)",
            "sin(2*r)*cos(r)^2",
            "r^(1/2) + r^(-3/2)",
            "tanh(r)*sech(r) - 1/(1 + r^2)",
        ];
        for src in cases {
            let e = parse(src).unwrap();
            let printed = format!("{e}");
            let back = parse(&printed).unwrap_or_else(|err| panic!("{printed}: {err}"));
            for i in 0..50 {
                let x = 0.05 + 0.11 * i as f64;
                let a = e.eval1("r", x).unwrap();
                let b = back.eval1("r", x).unwrap();
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{src} -> {printed}");
            }
        }
    }

    #[test]
    fn rational_approximation() {
        assert_eq!(Rational::approximate(0.5, 64, 1e-12), Some(Rational::new(1, 2)));
        assert_eq!(Rational::approximate(-1.5, 64, 1e-12), Some(Rational::new(-3, 2)));
        assert_eq!(Rational::approximate(2.0, 64, 1e-12), Some(Rational::int(2)));
        assert_eq!(Rational::approximate(std::f64::consts::PI, 10, 1e-12), None);
    }
}
