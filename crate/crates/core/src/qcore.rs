//! q-Pochhammer symbols and the coefficient streams of the normalized
//! second and third Jackson q-Bessel functions.
//!
//! The normalized functions have the shape `h(z) = z + sum_{n>=1} a_n z^{n+1}`
//! with
//!
//! ```text
//! K_n = (-1)^n q^{n(n+nu)}     / (4^n (q;q)_n (q^{nu+1};q)_n)   (second family)
//! T_n = (-1)^n q^{n(n+1)/2}    / (    (q;q)_n (q^{nu+1};q)_n)   (third family)
//! ```
//!
//! Coefficients are generated by forward recurrence on the ratio
//! `a_n / a_{n-1}`, which stays representable long after `q^{n(n+nu)}` alone
//! would underflow.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Which normalized q-Bessel function a coefficient stream belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Jackson's second q-Bessel function, coefficients `K_n`.
    Second,
    /// Jackson's third (Hahn-Exton) q-Bessel function, coefficients `T_n`.
    Third,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Second => f.write_str("second"),
            Family::Third => f.write_str("third"),
        }
    }
}

/// The parameter pair `(q, nu)` with `0 < q < 1` and `nu > -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QParams {
    q: f64,
    nu: f64,
}

impl QParams {
    pub fn new(q: f64, nu: f64) -> Result<Self> {
        if q.is_finite() && nu.is_finite() && q > 0.0 && q < 1.0 && nu > -1.0 {
            Ok(Self { q, nu })
        } else {
            Err(Error::InvalidParams { q, nu })
        }
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `q^nu`.
    #[inline]
    pub fn q_pow_nu(&self) -> f64 {
        self.q.powf(self.nu)
    }

    /// `(1 - q)(1 - q^nu)`, the quantity every hypothesis is phrased in.
    /// Non-positive when `nu <= 0`.
    pub fn p_factor(&self) -> f64 {
        one_minus_pow(self.q, 1.0) * one_minus_pow(self.q, self.nu)
    }
}

impl fmt::Display for QParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(q = {}, nu = {})", self.q, self.nu)
    }
}

/// One series coefficient `a_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficient {
    pub index: usize,
    pub value: f64,
}

impl Coefficient {
    /// `(-1)^index`, the sign every coefficient carries.
    pub fn expected_sign(&self) -> f64 {
        if self.index % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// `1 - q^s` without cancellation when `q^s` is close to 1.
pub(crate) fn one_minus_pow(q: f64, s: f64) -> f64 {
    let qs = q.powf(s);
    if qs > 0.5 {
        -(s * q.ln()).exp_m1()
    } else {
        1.0 - qs
    }
}

/// Finite q-Pochhammer symbol `(a;q)_n = prod_{k=1}^{n} (1 - a q^{k-1})`.
///
/// `n = 0` yields exactly 1.
pub fn q_pochhammer(a: f64, q: f64, n: usize) -> f64 {
    let mut prod = 1.0;
    let mut aq = a;
    for _ in 0..n {
        prod *= 1.0 - aq;
        aq *= q;
    }
    prod
}

/// Infinite q-Pochhammer symbol `(a;q)_inf`, truncated at the first factor
/// `k` with `|a| q^{k-1} / (1 - q) < epsilon`.
///
/// Past that point the logarithm of the remaining product is bounded by the
/// geometric series `|a| q^{k-1} / (1 - q)`, so the relative truncation error
/// is at most about `epsilon`.
pub fn q_pochhammer_inf(a: f64, q: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidArgument(format!("q = {q} outside (0, 1)")));
    }
    let inv_gap = 1.0 / (1.0 - q);
    let mut prod = 1.0;
    let mut aq = a;
    while aq.abs() * inv_gap >= epsilon {
        prod *= 1.0 - aq;
        aq *= q;
        if prod == 0.0 {
            break;
        }
    }
    Ok(prod)
}

/// Ratio `a_n / a_{n-1}` of consecutive coefficients, for `n >= 1`.
fn coefficient_ratio(family: Family, p: &QParams, n: usize) -> f64 {
    let q = p.q;
    let nf = n as f64;
    let den = one_minus_pow(q, nf) * one_minus_pow(q, p.nu + nf);
    match family {
        Family::Second => -q.powf(2.0 * nf - 1.0 + p.nu) / (4.0 * den),
        Family::Third => -q.powf(nf) / den,
    }
}

/// Iterator over `a_0, a_1, a_2, ...` for one family.
#[derive(Debug, Clone)]
pub struct CoefficientStream {
    family: Family,
    params: QParams,
    next_index: usize,
    current: f64,
}

impl CoefficientStream {
    pub fn new(family: Family, params: QParams) -> Self {
        Self {
            family,
            params,
            next_index: 0,
            current: 1.0,
        }
    }
}

impl Iterator for CoefficientStream {
    type Item = Coefficient;

    fn next(&mut self) -> Option<Coefficient> {
        let index = self.next_index;
        if index > 0 {
            self.current *= coefficient_ratio(self.family, &self.params, index);
        }
        self.next_index += 1;
        Some(Coefficient {
            index,
            value: self.current,
        })
    }
}

/// `a_n` for the given family.
pub fn coefficient(family: Family, p: &QParams, n: usize) -> Coefficient {
    CoefficientStream::new(family, *p)
        .nth(n)
        .expect("coefficient stream is infinite")
}

/// `K_n` of the second family.
pub fn coefficient_k(p: &QParams, n: usize) -> Coefficient {
    coefficient(Family::Second, p, n)
}

/// `T_n` of the third family.
pub fn coefficient_t(p: &QParams, n: usize) -> Coefficient {
    coefficient(Family::Third, p, n)
}

/// `c_nu(q) = (q;q)_inf / (q^{nu+1};q)_inf`.
pub fn normalization_c(p: &QParams, epsilon: f64) -> Result<f64> {
    let num = q_pochhammer_inf(p.q, p.q, epsilon)?;
    let den = q_pochhammer_inf(p.q.powf(p.nu + 1.0), p.q, epsilon)?;
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(q: f64, nu: f64) -> QParams {
        QParams::new(q, nu).unwrap()
    }

    fn long_product(a: f64, q: f64) -> f64 {
        q_pochhammer(a, q, 200)
    }

    #[test]
    fn params_reject_out_of_range() {
        assert!(QParams::new(0.0, 1.0).is_err());
        assert!(QParams::new(1.0, 1.0).is_err());
        assert!(QParams::new(1.5, 1.0).is_err());
        assert!(QParams::new(0.5, -1.0).is_err());
        assert!(QParams::new(f64::NAN, 1.0).is_err());
        assert!(QParams::new(0.5, -0.999).is_ok());
    }

    #[test]
    fn finite_pochhammer_examples() {
        assert_eq!(q_pochhammer(0.7, 0.3, 0), 1.0);
        assert_eq!(q_pochhammer(0.5, 0.5, 2), 0.375);
        assert_eq!(q_pochhammer(0.0, 0.5, 7), 1.0);
    }

    #[test]
    fn infinite_pochhammer_matches_long_product() {
        assert_eq!(q_pochhammer_inf(0.0, 0.5, 1e-15).unwrap(), 1.0);
        for (a, q) in [(0.5, 0.5), (0.9, 0.1)] {
            let v = q_pochhammer_inf(a, q, 1e-15).unwrap();
            assert!((v - long_product(a, q)).abs() < 1e-14, "{a} {q}");
        }
        // 50-digit product
        let v = q_pochhammer_inf(0.5, 0.5, 1e-15).unwrap();
        assert!((v - 0.288_788_095_086_602_42).abs() < 1e-15);
        let v = q_pochhammer_inf(0.9, 0.1, 1e-15).unwrap();
        assert!((v - 0.090_090_827_198_198_848).abs() < 1e-15);
    }

    #[test]
    fn infinite_pochhammer_rejects_bad_epsilon() {
        assert!(matches!(
            q_pochhammer_inf(0.5, 0.5, 0.0),
            Err(Error::InvalidEpsilon(_))
        ));
        assert!(q_pochhammer_inf(0.5, 0.5, -1.0).is_err());
        assert!(q_pochhammer_inf(0.5, 0.5, f64::NAN).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let p = params(0.5, 1.0);
        assert_eq!(coefficient_k(&p, 0).value, 1.0);
        // -q^{1+nu} / (4 (1-q)(1-q^{nu+1})) = -0.25 / 1.5
        let k1 = coefficient_k(&p, 1).value;
        assert!((k1 + 1.0 / 6.0).abs() < 1e-16);
        assert!(coefficient_k(&p, 3).value < 0.0);

        let p = params(0.25, 1.0);
        assert_eq!(coefficient_t(&p, 0).value, 1.0);
        // -q / ((1-q)(1-q^2))
        let t1 = coefficient_t(&p, 1).value;
        assert!((t1 + 16.0 / 45.0).abs() < 1e-15);
        assert!(coefficient_t(&p, 2).value > 0.0);
    }

    #[test]
    fn coefficients_match_closed_form() {
        for &(q, nu) in &[(0.3, 0.7), (0.8, -0.6), (0.05, 4.0)] {
            let p = params(q, nu);
            let b = q.powf(nu + 1.0);
            for n in 0..12 {
                let n_f = n as f64;
                let den = q_pochhammer(q, q, n) * q_pochhammer(b, q, n);
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let k = sign * q.powf(n_f * (n_f + nu)) / (4f64.powi(n as i32) * den);
                let t = sign * q.powf(0.5 * n_f * (n_f + 1.0)) / den;
                let ck = coefficient_k(&p, n).value;
                let ct = coefficient_t(&p, n).value;
                assert!((ck - k).abs() <= 1e-12 * k.abs(), "K {q} {nu} {n}");
                assert!((ct - t).abs() <= 1e-12 * t.abs(), "T {q} {nu} {n}");
            }
        }
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalization_c(&params(0.5, 0.0), 1e-15).unwrap(), 1.0);
        let c = normalization_c(&params(0.5, 1.0), 1e-15).unwrap();
        assert!((c - 0.5).abs() < 1e-15);
        // (q;q)_inf / (q^3;q)_inf = (1-q)(1-q^2) = 0.891
        let c = normalization_c(&params(0.1, 2.0), 1e-15).unwrap();
        let oracle = long_product(0.1, 0.1) / long_product(1e-3, 0.1);
        assert!((c - oracle).abs() < 1e-13);
        assert!((c - 0.891).abs() < 1e-13);
        assert!(normalization_c(&params(0.1, 2.0), 0.0).is_err());
    }

    #[test]
    fn nonpositive_nu_still_defines_coefficients() {
        let p = params(0.6, -0.5);
        for c in CoefficientStream::new(Family::Second, p).take(10) {
            assert!(c.value.is_finite() && c.value != 0.0);
            assert_eq!(c.value.signum(), c.expected_sign());
        }
        assert!(p.p_factor() < 0.0);
    }

    proptest! {
        #[test]
        fn pochhammer_step(a in -2.0f64..2.0, q in 0.01f64..0.99, n in 0usize..40) {
            let lhs = q_pochhammer(a, q, n + 1);
            let rhs = q_pochhammer(a, q, n) * (1.0 - a * q.powi(n as i32));
            prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.abs().max(1e-300) + 1e-300);
        }

        #[test]
        fn coefficient_signs_alternate(q in 0.01f64..0.99, nu in -0.99f64..6.0, n in 0usize..15) {
            let p = QParams::new(q, nu).unwrap();
            for c in [coefficient_k(&p, n), coefficient_t(&p, n)] {
                if c.value != 0.0 {
                    prop_assert_eq!(c.value.signum(), c.expected_sign());
                }
            }
        }

        #[test]
        fn lemma_majorants(q in 0.01f64..0.99, nu in 0.01f64..6.0, n in 1usize..20) {
            let p = QParams::new(q, nu).unwrap();
            let qn = q.powf(nu);
            let pf = (1.0 - q) * (1.0 - qn);
            let k_major = (qn / (4.0 * pf)).powi(n as i32);
            let t_major = (q.sqrt() / pf).powi(n as i32);
            prop_assert!(coefficient_k(&p, n).value.abs() <= k_major * (1.0 + 1e-12));
            prop_assert!(coefficient_t(&p, n).value.abs() <= t_major * (1.0 + 1e-12));
        }
    }
}
