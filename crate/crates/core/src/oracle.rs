//! Slow double-double reference evaluations used to validate the fast path.
//!
//! The oracle shares no arithmetic with [`crate::series`]: coefficients come
//! from the closed form (`q^{n(n+nu)}` through `exp(n(n+nu) ln q)` and direct
//! q-Pochhammer products) instead of the ratio recurrence, every operation is
//! carried out in double-double (about 31 significant digits), and the term
//! list is summed from the smallest term back to the largest.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use qd::Quad;

use crate::error::{Error, Result};
use crate::qcore::{Family, QParams};
use crate::series::{Form, FunctionId, Weight, RATIO_CAP};

/// Relative rounding unit assumed per double-double operation, with slack.
const DD_UNIT: f64 = 7.888_609_052_210_118e-31; // 2^-100

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionSpec {
    pub significant_digits: u32,
    pub term_cap: usize,
}

impl PrecisionSpec {
    pub const MIN_DIGITS: u32 = 25;
    pub const MAX_DIGITS: u32 = 31;

    pub fn new(significant_digits: u32, term_cap: usize) -> Result<Self> {
        if !(Self::MIN_DIGITS..=Self::MAX_DIGITS).contains(&significant_digits) {
            return Err(Error::InvalidArgument(format!(
                "oracle precision must be {}..={} digits, got {significant_digits}",
                Self::MIN_DIGITS,
                Self::MAX_DIGITS
            )));
        }
        if term_cap < 2 {
            return Err(Error::InvalidArgument("oracle term cap must be at least 2".into()));
        }
        Ok(Self { significant_digits, term_cap })
    }

    fn target(&self) -> f64 {
        10f64.powi(-(self.significant_digits as i32))
    }
}

impl Default for PrecisionSpec {
    fn default() -> Self {
        Self { significant_digits: 30, term_cap: 20_000 }
    }
}

fn dd(x: f64) -> Quad {
    Quad::from(x)
}

/// Complex double-double.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexDd {
    pub re: Quad,
    pub im: Quad,
}

impl ComplexDd {
    pub const ZERO: Self = Self { re: Quad::ZERO, im: Quad::ZERO };
    pub const ONE: Self = Self { re: Quad::ONE, im: Quad::ZERO };

    pub fn from_c64(z: Complex64) -> Self {
        Self { re: dd(z.re), im: dd(z.im) }
    }

    pub fn scale(self, k: Quad) -> Self {
        Self { re: self.re * k, im: self.im * k }
    }

    /// Leading-order modulus, accurate to double precision.
    pub fn norm_f64(self) -> f64 {
        (self.re.0 + self.re.1).hypot(self.im.0 + self.im.1)
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

impl Add for ComplexDd {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for ComplexDd {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for ComplexDd {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: ComplexDd,
    pub certified_error: f64,
    pub terms: usize,
}

impl OracleValue {
    pub fn to_c64(&self) -> Complex64 {
        self.value.to_c64()
    }

    /// `|z - value|`, formed in double-double before rounding.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        (ComplexDd::from_c64(z) - self.value).norm_f64()
    }
}

/// Closed-form coefficient magnitudes `|a_n|` in double-double, with an
/// accumulated relative error estimate.
struct ClosedForm {
    family: Family,
    nu: Quad,
    ln_q: Quad,
    q: Quad,
    q_pow_k: Quad,
    shifted_pow: Quad,
    qq: Quad,
    qb: Quad,
    four_pow: Quad,
    n: usize,
}

impl ClosedForm {
    fn new(family: Family, p: &QParams) -> Self {
        let q = dd(p.q());
        let ln_q = q.ln();
        let nu = dd(p.nu());
        Self {
            family,
            nu,
            ln_q,
            q,
            q_pow_k: Quad::ONE,
            shifted_pow: ((nu + Quad::ONE) * ln_q).exp(),
            qq: Quad::ONE,
            qb: Quad::ONE,
            four_pow: Quad::ONE,
            n: 0,
        }
    }

    /// Signed `a_n` and the relative error weight for the current `n`, then
    /// advance to `n + 1`.
    fn next(&mut self) -> (Quad, f64) {
        let n = dd(self.n as f64);
        let exponent = match self.family {
            Family::Second => n * (n + self.nu),
            Family::Third => n * (n + Quad::ONE) * dd(0.5),
        };
        let arg = exponent * self.ln_q;
        let denom = match self.family {
            Family::Second => self.four_pow * self.qq * self.qb,
            Family::Third => self.qq * self.qb,
        };
        let mag = arg.exp() / denom;
        let signed = if self.n % 2 == 0 { mag } else { -mag };
        let rel = 8.0 + 8.0 * self.n as f64 + arg.0.abs();

        // advance the products to n + 1
        self.q_pow_k *= self.q;
        self.qq *= Quad::ONE - self.q_pow_k;
        self.qb *= Quad::ONE - self.shifted_pow;
        self.shifted_pow *= self.q;
        self.four_pow *= dd(4.0);
        self.n += 1;
        (signed, rel)
    }
}

struct TermList {
    terms: Vec<ComplexDd>,
    rounding_weight: f64,
    tail: f64,
}

/// Terms `w(n) a_n z^k` (`k = n - first`) until the geometric tail bound
/// drops below the precision target.
fn build_terms(
    family: Family,
    p: &QParams,
    z: ComplexDd,
    weight: impl Fn(usize) -> f64,
    first: usize,
    prec: &PrecisionSpec,
) -> Result<TermList> {
    let mut coeffs = ClosedForm::new(family, p);
    for _ in 0..first {
        coeffs.next();
    }
    let target = prec.target();
    let mut terms = Vec::new();
    let mut rounding_weight = 0.0;
    let mut z_pow = ComplexDd::ONE;
    let (a, mut rel) = coeffs.next();
    let mut term = z_pow.scale(a * dd(weight(first)));
    let mut n = first;
    loop {
        let mag = term.norm_f64();
        terms.push(term);
        rounding_weight += (rel + 4.0 * (n - first) as f64) * mag;

        n += 1;
        z_pow = z_pow * z;
        let (a, next_rel) = coeffs.next();
        rel = next_rel;
        let next = z_pow.scale(a * dd(weight(n)));
        let next_mag = next.norm_f64();
        let bound = if next_mag == 0.0 {
            Some(0.0)
        } else if next_mag <= RATIO_CAP * mag {
            Some(next_mag / (1.0 - RATIO_CAP) * (1.0 + 1e-14))
        } else {
            None
        };
        if let Some(tail) = bound {
            if tail <= target {
                return Ok(TermList { terms, rounding_weight, tail });
            }
        }
        if terms.len() >= prec.term_cap {
            return Err(Error::TruncationFailure {
                terms: terms.len(),
                tail_bound: bound.unwrap_or(f64::INFINITY),
            });
        }
        term = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Order {
    #[cfg(test)]
    Forward,
    Backward,
}

fn sum_terms(terms: &[ComplexDd], order: Order) -> ComplexDd {
    match order {
        #[cfg(test)]
        Order::Forward => terms.iter().fold(ComplexDd::ZERO, |acc, &t| acc + t),
        Order::Backward => terms.iter().rev().fold(ComplexDd::ZERO, |acc, &t| acc + t),
    }
}

fn oracle_eval_ordered(f: FunctionId, p: &QParams, z: Complex64, prec: &PrecisionSpec, order: Order) -> Result<OracleValue> {
    let r = z.norm();
    if r.is_nan() || r > 1.0 {
        return Err(Error::InvalidArgument(format!("z = {z} lies outside the closed unit disk")));
    }
    let zd = ComplexDd::from_c64(z);
    let (first, weight): (usize, fn(usize) -> f64) = match f.form {
        Form::Normalized | Form::Reduced => (0, |_| 1.0),
        Form::Derivative => (0, |n| (n + 1) as f64),
        Form::ReducedDerivative => (1, |n| n as f64),
    };
    let list = build_terms(f.family, p, zd, weight, first, prec)?;
    let sum = sum_terms(&list.terms, order);
    let mut certified = list.tail + DD_UNIT * (list.rounding_weight + 2.0 * sum.norm_f64());
    let value = if f.form == Form::Normalized {
        let h = zd * sum;
        certified = z.norm() * certified + DD_UNIT * 2.0 * h.norm_f64();
        h
    } else {
        sum
    };
    if z.norm_sqr() == 0.0 && f.form != Form::ReducedDerivative {
        certified = 0.0;
    }
    Ok(OracleValue { value, certified_error: certified, terms: list.terms.len() })
}

/// Extended-precision value of `f` at `z`, summed backward.
pub fn oracle_eval(f: FunctionId, p: &QParams, z: Complex64, prec: &PrecisionSpec) -> Result<OracleValue> {
    oracle_eval_ordered(f, p, z, prec, Order::Backward)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSum {
    pub value: Quad,
    pub certified_error: f64,
}

impl OracleSum {
    pub fn to_f64(&self) -> f64 {
        self.value.0 + self.value.1
    }

    pub fn distance_to(&self, x: f64) -> f64 {
        let d = dd(x) - self.value;
        (d.0 + d.1).abs()
    }
}

/// `sum_{n >= from} w(n) |a_n|` in double-double.
pub fn oracle_coefficient_tail_sum(
    family: Family,
    p: &QParams,
    from: usize,
    weight: Weight,
    prec: &PrecisionSpec,
) -> Result<OracleSum> {
    let w: fn(usize) -> f64 = match weight {
        Weight::Unit => |_| 1.0,
        Weight::NPlusOne => |n| (n + 1) as f64,
    };
    let list = build_terms(family, p, ComplexDd::ONE, w, from, prec)?;
    let abs_terms: Vec<Quad> = list.terms.iter().map(|t| t.re.abs()).collect();
    let value = abs_terms.iter().rev().fold(Quad::ZERO, |acc, &t| acc + t);
    let value_f = value.0 + value.1;
    Ok(OracleSum {
        value,
        certified_error: list.tail + DD_UNIT * (list.rounding_weight + 2.0 * value_f),
    })
}

/// `1 + sum_{n>=1} w(n) |a_n|`, the sum the lemma bounds majorize.
pub fn oracle_coefficient_sum(family: Family, p: &QParams, weight: Weight, prec: &PrecisionSpec) -> Result<OracleSum> {
    oracle_coefficient_tail_sum(family, p, 0, weight, prec)
}

/// Partial sums of `1 + sum x^n` and `1 + sum (n+1) x^n` against their
/// closed forms `1/(1-x)` and `1/(1-x)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricIdentity {
    pub lhs1: f64,
    pub rhs1: f64,
    pub lhs2: f64,
    pub rhs2: f64,
    /// `|lhs1 - rhs1|` formed in double-double.
    pub discrepancy1: f64,
    pub discrepancy2: f64,
    pub certified1: f64,
    pub certified2: f64,
}

impl GeometricIdentity {
    pub fn agrees(&self) -> bool {
        self.discrepancy1 <= self.certified1 && self.discrepancy2 <= self.certified2
    }
}

pub fn geometric_identity_check(x: f64, prec: &PrecisionSpec) -> Result<GeometricIdentity> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::InvalidArgument(format!("geometric ratio must lie in (0, 1), got {x}")));
    }
    let xd = dd(x);
    let target = prec.target();
    let series = |weight: fn(usize) -> f64| -> Result<(Quad, f64)> {
        let mut terms = Vec::new();
        let mut pow = Quad::ONE;
        let mut n = 0usize;
        let mut rounding = 0.0;
        loop {
            let t = pow * dd(weight(n));
            let mag = t.0.abs();
            rounding += (4.0 + 4.0 * n as f64) * mag;
            terms.push(t);
            n += 1;
            pow *= xd;
            let next = (pow * dd(weight(n))).0.abs();
            let ratio = next / mag;
            if ratio < 1.0 {
                let tail = next / (1.0 - ratio) * (1.0 + 1e-14);
                if tail <= target {
                    let sum = terms.iter().rev().fold(Quad::ZERO, |acc, &t| acc + t);
                    return Ok((sum, tail + DD_UNIT * rounding));
                }
            }
            if terms.len() >= prec.term_cap {
                return Err(Error::TruncationFailure { terms: terms.len(), tail_bound: f64::INFINITY });
            }
        }
    };
    let (lhs1, cert1) = series(|_| 1.0)?;
    let (lhs2, cert2) = series(|n| (n + 1) as f64)?;
    let gap = Quad::ONE - xd;
    let rhs1 = Quad::ONE / gap;
    let rhs2 = rhs1 * rhs1;
    let hi = |v: Quad| v.0 + v.1;
    Ok(GeometricIdentity {
        lhs1: hi(lhs1),
        rhs1: hi(rhs1),
        lhs2: hi(lhs2),
        rhs2: hi(rhs2),
        discrepancy1: hi(lhs1 - rhs1).abs(),
        discrepancy2: hi(lhs2 - rhs2).abs(),
        certified1: cert1 + DD_UNIT * 4.0 * hi(rhs1),
        certified2: cert2 + DD_UNIT * 4.0 * hi(rhs2),
    })
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;
    use crate::series::{eval, TruncationPolicy};

    fn params(q: f64, nu: f64) -> QParams {
        QParams::new(q, nu).unwrap()
    }

    const H2: FunctionId = FunctionId::new(Family::Second, Form::Normalized);
    const H3: FunctionId = FunctionId::new(Family::Third, Form::Normalized);

    #[test]
    fn precision_validation() {
        assert!(PrecisionSpec::new(24, 100).is_err());
        assert!(PrecisionSpec::new(32, 100).is_err());
        assert!(PrecisionSpec::new(25, 1).is_err());
        assert!(PrecisionSpec::new(25, 100).is_ok());
    }

    #[test]
    fn origin_is_exact() {
        let o = oracle_eval(H2, &params(0.5, 1.0), Complex64::new(0.0, 0.0), &PrecisionSpec::default()).unwrap();
        assert_eq!(o.to_c64(), Complex64::new(0.0, 0.0));
        assert_eq!(o.certified_error, 0.0);
    }

    #[test]
    fn matches_hand_sum_and_reference() {
        let o = oracle_eval(H2, &params(0.5, 1.0), Complex64::new(0.5, 0.0), &PrecisionSpec::default()).unwrap();
        // 0.5 - 0.0416667 + 0.0004960 - 0.0000012
        let hand = 0.5 - 0.041_666_7 + 0.000_496_0 - 0.000_001_2;
        assert!((o.to_c64().re - hand).abs() < 1e-6);
        // 40-digit reference: 0.45882818468627833185...
        let d = o.value.re - Quad(0.458_828_184_686_278_3, 0.0);
        assert!((d.0).abs() < 1e-16);
        assert!(o.certified_error < 1e-29);
    }

    #[test]
    fn certified_error_small_near_boundary() {
        let o = oracle_eval(H3, &params(0.25, 1.0), Complex64::new(0.99, 0.0), &PrecisionSpec::default()).unwrap();
        assert!(o.certified_error < 1e-25);
        assert!((o.to_c64().re - 0.664_517_585_065_393_75).abs() < 1e-16);
    }

    #[test]
    fn forward_and_backward_agree() {
        let prec = PrecisionSpec::default();
        for &(q, nu, re, im) in &[(0.5, 1.0, 0.5, 0.2), (0.9, -0.4, -0.7, 0.6), (0.05, 4.0, 0.0, 0.99)] {
            for form in [Form::Normalized, Form::Derivative, Form::Reduced, Form::ReducedDerivative] {
                for fam in [Family::Second, Family::Third] {
                    let f = FunctionId::new(fam, form);
                    let z = Complex64::new(re, im);
                    let b = oracle_eval_ordered(f, &params(q, nu), z, &prec, Order::Backward).unwrap();
                    let fw = oracle_eval_ordered(f, &params(q, nu), z, &prec, Order::Forward).unwrap();
                    assert!((b.value - fw.value).norm_f64() <= b.certified_error + fw.certified_error);
                }
            }
        }
    }

    #[test]
    fn fast_path_within_its_bound() {
        let prec = PrecisionSpec::default();
        let pol = TruncationPolicy::default();
        for form in [Form::Normalized, Form::Derivative, Form::Reduced, Form::ReducedDerivative] {
            let f = FunctionId::new(Family::Third, form);
            let z = Complex64::new(0.0, 0.9);
            let p = params(0.25, 1.0);
            let fast = eval(f, &p, z, &pol).unwrap();
            let o = oracle_eval(f, &p, z, &prec).unwrap();
            assert!(o.distance_to(fast.value) <= fast.tail_bound + o.certified_error, "{form:?}");
        }
    }

    #[test]
    fn coefficient_sums_against_lemma_constants() {
        let prec = PrecisionSpec::default();
        let s = oracle_coefficient_sum(Family::Second, &params(0.1, 1.0), Weight::Unit, &prec).unwrap();
        assert!(s.to_f64() <= 3.24 / 3.14);
        assert!(s.distance_to(1.002_805_907_064_560_555_9) < 1e-16);
        let s = oracle_coefficient_sum(Family::Third, &params(0.01, 1.0), Weight::NPlusOne, &prec).unwrap();
        assert!(s.to_f64() <= (0.9801f64 / 0.8801).powi(2));
        assert!(s.distance_to(1.020_207_071_522_334_8) < 1e-16);
        let s = oracle_coefficient_sum(Family::Second, &params(1e-6, 1.0), Weight::Unit, &prec).unwrap();
        assert!((s.to_f64() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn geometric_identities() {
        let prec = PrecisionSpec::default();
        let g = geometric_identity_check(0.5, &prec).unwrap();
        assert_eq!(g.rhs1, 2.0);
        assert_eq!(g.rhs2, 4.0);
        assert!((g.lhs1 - 2.0).abs() < 1e-15 && (g.lhs2 - 4.0).abs() < 1e-15);
        assert!(g.agrees());
        let g = geometric_identity_check(0.99, &prec).unwrap();
        assert!(g.agrees(), "{g:?}");
        assert!(geometric_identity_check(1.0, &prec).is_err());
    }
}
