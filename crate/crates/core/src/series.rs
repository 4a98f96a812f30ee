//! Evaluation of the normalized q-Bessel functions, their derivatives,
//! partial sums and reduced forms on the closed unit disk.
//!
//! Every infinite-series evaluation returns an [`EvalResult`] whose
//! `tail_bound` is an absolute error bound covering both the discarded tail
//! and the floating-point rounding of the retained terms.
//!
//! # Truncation
//!
//! For both families the coefficient ratio `|a_{n+1} / a_n|` is strictly
//! decreasing in `n` (the numerator is a falling power of `q`, the
//! denominator `(1 - q^{n+1})(1 - q^{nu+n+1})` is rising), and the polynomial
//! weights `n + 1` or `n` only contribute ratios `(n+2)/(n+1)` that also
//! decrease. Hence once the measured term ratio `rho_n = |t_{n+1} / t_n|`
//! drops to `RATIO_CAP`, every later ratio is at most `RATIO_CAP` as well and
//! the tail after `t_n` is bounded by `|t_{n+1}| / (1 - RATIO_CAP)`. The
//! super-geometric decay of the coefficients guarantees this happens for
//! every `nu > -1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::compensated::{ComplexNeumaier, Neumaier};
use crate::error::{Error, Result};
use crate::qcore::{normalization_c, one_minus_pow, CoefficientStream, Family, QParams};

/// Ratio threshold after which the remaining terms are dominated by a
/// geometric series.
pub const RATIO_CAP: f64 = 0.5;

/// Absolute truncation target of [`coefficient_tail_sum`].
pub const TAIL_SUM_EPSILON: f64 = 1e-15;

/// Term cap of [`coefficient_tail_sum`].
pub const TAIL_SUM_MAX_TERMS: usize = 10_000;

const EPS: f64 = f64::EPSILON;

/// Which transform of a normalized function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Form {
    /// `h(z) = sum a_n z^{n+1}`.
    Normalized,
    /// `h'(z) = sum (n+1) a_n z^n`.
    Derivative,
    /// `g(z) = h(z) / z = sum a_n z^n`, with `g(0) = 1`.
    Reduced,
    /// `g'(z) = sum_{n>=1} n a_n z^{n-1}`.
    ReducedDerivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionId {
    pub family: Family,
    pub form: Form,
}

impl FunctionId {
    pub const fn new(family: Family, form: Form) -> Self {
        Self { family, form }
    }
}

/// Absolute accuracy target and term cap for series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub epsilon: f64,
    pub max_terms: usize,
}

impl TruncationPolicy {
    pub fn new(epsilon: f64, max_terms: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        if max_terms < 2 {
            return Err(Error::InvalidArgument(format!(
                "max_terms must be at least 2, got {max_terms}"
            )));
        }
        Ok(Self { epsilon, max_terms })
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            epsilon: 1e-15,
            max_terms: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalResult {
    pub value: Complex64,
    /// Absolute error bound: truncation remainder plus rounding.
    pub tail_bound: f64,
    pub terms_used: usize,
}

/// Partial-sum order `m >= 1`: `(h)_m(z) = z + sum_{n=1}^{m} a_n z^{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PartialSpec(usize);

impl PartialSpec {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("partial sum order m must be >= 1".into()));
        }
        Ok(Self(m))
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.0
    }
}

/// Per-coefficient weight applied in a coefficient sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Weight {
    Unit,
    NPlusOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TermWeight {
    Unit,
    NPlusOne,
    /// `n a_n z^{n-1}`, starting at `n = 1`.
    N,
}

impl TermWeight {
    fn first_index(self) -> usize {
        match self {
            TermWeight::N => 1,
            _ => 0,
        }
    }

    fn at(self, n: usize) -> f64 {
        match self {
            TermWeight::Unit => 1.0,
            TermWeight::NPlusOne => (n + 1) as f64,
            TermWeight::N => n as f64,
        }
    }
}

impl From<Weight> for TermWeight {
    fn from(w: Weight) -> Self {
        match w {
            Weight::Unit => TermWeight::Unit,
            Weight::NPlusOne => TermWeight::NPlusOne,
        }
    }
}

fn check_disk(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "z = {z} lies outside the closed unit disk"
        )));
    }
    Ok(())
}

/// Sums `sum_k w(n) a_n z^k` with `n = k + first_index`, adaptively.
fn sum_series(
    family: Family,
    p: &QParams,
    z: Complex64,
    weight: TermWeight,
    policy: &TruncationPolicy,
) -> Result<EvalResult> {
    check_disk(z)?;
    let mut coeffs = CoefficientStream::new(family, *p).skip(weight.first_index());
    let first = coeffs.next().expect("infinite stream");
    let lead = weight.at(first.index) * first.value;

    if z.norm_sqr() == 0.0 {
        let tail_bound = if weight == TermWeight::N {
            EPS * (16.0 * first.index as f64 + 8.0) * lead.abs()
        } else {
            0.0
        };
        return Ok(EvalResult {
            value: Complex64::new(lead, 0.0),
            tail_bound,
            terms_used: 1,
        });
    }

    let mut sum = ComplexNeumaier::default();
    let mut rounding_weight = 0.0;
    let mut term = Complex64::new(lead, 0.0);
    let mut index = first.index;
    let mut z_pow = Complex64::new(1.0, 0.0);
    let mut used = 0usize;

    loop {
        sum.add(term);
        used += 1;
        let mag = term.norm();
        rounding_weight += (16.0 * index as f64 + 8.0) * mag;

        let c = coeffs.next().expect("infinite stream");
        z_pow *= z;
        index = c.index;
        let next = z_pow * (weight.at(c.index) * c.value);
        let next_mag = next.norm();

        let truncation = if next_mag == 0.0 {
            Some(f64::MIN_POSITIVE)
        } else if next_mag <= RATIO_CAP * mag {
            Some(next_mag / (1.0 - RATIO_CAP))
        } else {
            None
        };

        if let Some(t) = truncation {
            if t <= policy.epsilon {
                let value = sum.value();
                if !(value.re.is_finite() && value.im.is_finite()) {
                    return Err(Error::NonFinite { terms: used });
                }
                let rounding = EPS * (2.0 * value.norm() + rounding_weight);
                return Ok(EvalResult {
                    value,
                    tail_bound: t + rounding,
                    terms_used: used,
                });
            }
        }
        if !next_mag.is_finite() {
            return Err(Error::NonFinite { terms: used });
        }
        if used >= policy.max_terms {
            return Err(Error::TruncationFailure {
                terms: used,
                tail_bound: truncation.unwrap_or(f64::INFINITY),
            });
        }
        term = next;
    }
}

/// `g(z) = h(z) / z = sum_{n>=0} a_n z^n`.
pub fn eval_reduced(
    family: Family,
    p: &QParams,
    z: Complex64,
    policy: &TruncationPolicy,
) -> Result<EvalResult> {
    sum_series(family, p, z, TermWeight::Unit, policy)
}

/// `g'(z) = sum_{n>=1} n a_n z^{n-1}`.
pub fn eval_reduced_deriv(
    family: Family,
    p: &QParams,
    z: Complex64,
    policy: &TruncationPolicy,
) -> Result<EvalResult> {
    sum_series(family, p, z, TermWeight::N, policy)
}

/// The normalized function `h(z) = z g(z)`.
pub fn eval_h(
    family: Family,
    p: &QParams,
    z: Complex64,
    policy: &TruncationPolicy,
) -> Result<EvalResult> {
    let g = eval_reduced(family, p, z, policy)?;
    let value = z * g.value;
    Ok(EvalResult {
        value,
        tail_bound: z.norm() * g.tail_bound + 2.0 * EPS * value.norm(),
        terms_used: g.terms_used,
    })
}

/// `h'(z) = sum_{n>=0} (n+1) a_n z^n`.
pub fn eval_h_deriv(
    family: Family,
    p: &QParams,
    z: Complex64,
    policy: &TruncationPolicy,
) -> Result<EvalResult> {
    sum_series(family, p, z, TermWeight::NPlusOne, policy)
}

/// Dispatch on a [`FunctionId`].
pub fn eval(
    f: FunctionId,
    p: &QParams,
    z: Complex64,
    policy: &TruncationPolicy,
) -> Result<EvalResult> {
    match f.form {
        Form::Normalized => eval_h(f.family, p, z, policy),
        Form::Derivative => eval_h_deriv(f.family, p, z, policy),
        Form::Reduced => eval_reduced(f.family, p, z, policy),
        Form::ReducedDerivative => eval_reduced_deriv(f.family, p, z, policy),
    }
}

fn finite_sum(family: Family, p: &QParams, m: PartialSpec, z: Complex64, weight: TermWeight) -> Complex64 {
    let mut sum = ComplexNeumaier::default();
    let mut z_pow = Complex64::new(1.0, 0.0);
    for c in CoefficientStream::new(family, *p).take(m.m() + 1) {
        sum.add(z_pow * (weight.at(c.index) * c.value));
        z_pow *= z;
    }
    sum.value()
}

/// `g_m(z) = 1 + sum_{n=1}^{m} a_n z^n`.
pub fn eval_partial_reduced(family: Family, p: &QParams, m: PartialSpec, z: Complex64) -> Complex64 {
    finite_sum(family, p, m, z, TermWeight::Unit)
}

/// `(h)_m(z) = z + sum_{n=1}^{m} a_n z^{n+1}`.
pub fn eval_partial(family: Family, p: &QParams, m: PartialSpec, z: Complex64) -> Complex64 {
    z * eval_partial_reduced(family, p, m, z)
}

/// `(h)_m'(z) = 1 + sum_{n=1}^{m} (n+1) a_n z^n`.
pub fn eval_partial_deriv(family: Family, p: &QParams, m: PartialSpec, z: Complex64) -> Complex64 {
    finite_sum(family, p, m, z, TermWeight::NPlusOne)
}

/// The unnormalized functions at real `x > 0`:
///
/// ```text
/// J2(x) = (q^{nu+1};q)_inf / (q;q)_inf * sum (-1)^n (x/2)^{2n+nu} q^{n(n+nu)}  / ((q;q)_n (q^{nu+1};q)_n)
/// J3(x) = (q^{nu+1};q)_inf / (q;q)_inf * sum (-1)^n  x^{2n+nu}    q^{n(n+1)/2} / ((q;q)_n (q^{nu+1};q)_n)
/// ```
///
/// Terms are built from the closed form, not from the coefficient
/// recurrence, so the normalization identity is a genuine cross-check.
pub fn eval_j(family: Family, p: &QParams, x: f64, policy: &TruncationPolicy) -> Result<EvalResult> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidArgument(format!("J requires real x > 0, got {x}")));
    }
    let (q, nu) = (p.q(), p.nu());
    let base = match family {
        Family::Second => x / 2.0,
        Family::Third => x,
    };
    let q_exponent = |n: f64| match family {
        Family::Second => n * (n + nu),
        Family::Third => 0.5 * n * (n + 1.0),
    };
    let shifted = q.powf(nu + 1.0);
    let base_sq = base * base;

    // Denominator products (q;q)_n and (q^{nu+1};q)_n, advanced in step.
    let mut qq = 1.0;
    let mut qb = 1.0;
    let term_at = |n: usize, qq: f64, qb: f64| {
        let nf = n as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        sign * base_sq.powi(n as i32) * q.powf(q_exponent(nf)) / (qq * qb)
    };

    let mut sum = Neumaier::default();
    let mut rounding_weight = 0.0;
    let mut term = term_at(0, qq, qb);
    let mut n = 0usize;
    let (series, truncation) = loop {
        sum.add(term);
        rounding_weight += (16.0 * n as f64 + 8.0) * term.abs();
        n += 1;
        qq *= one_minus_pow(q, n as f64);
        qb *= 1.0 - shifted * q.powi(n as i32 - 1);
        let next = term_at(n, qq, qb);
        let bound = if next == 0.0 {
            Some(f64::MIN_POSITIVE)
        } else if next.abs() <= RATIO_CAP * term.abs() {
            Some(next.abs() / (1.0 - RATIO_CAP))
        } else {
            None
        };
        match bound {
            Some(t) if t <= policy.epsilon => break (sum.value(), t),
            _ if n >= policy.max_terms => {
                return Err(Error::TruncationFailure {
                    terms: n,
                    tail_bound: bound.unwrap_or(f64::INFINITY),
                })
            }
            _ => term = next,
        }
    };

    let c = normalization_c(p, policy.epsilon)?;
    let prefactor = base.powf(nu) / c;
    let value = prefactor * series;
    if !value.is_finite() {
        return Err(Error::NonFinite { terms: n });
    }
    let series_err = truncation + EPS * (2.0 * series.abs() + rounding_weight);
    // c carries a relative truncation error of about 2 epsilon.
    let tail_bound = prefactor.abs() * series_err + (2.0 * policy.epsilon + 8.0 * EPS) * value.abs();
    Ok(EvalResult {
        value: Complex64::new(value, 0.0),
        tail_bound,
        terms_used: n,
    })
}

/// `sum_{n >= from} w(n) |a_n|`, truncated once the geometric tail bound
/// falls below [`TAIL_SUM_EPSILON`].
pub fn coefficient_tail_sum(family: Family, p: &QParams, from: usize, weight: Weight) -> Result<f64> {
    if from == 0 {
        return Err(Error::InvalidArgument("tail sum must start at index >= 1".into()));
    }
    let weight = TermWeight::from(weight);
    let mut coeffs = CoefficientStream::new(family, *p).skip(from);
    let first = coeffs.next().expect("infinite stream");
    let mut term = weight.at(first.index) * first.value.abs();
    let mut sum = Neumaier::default();
    let mut used = 0usize;
    loop {
        sum.add(term);
        used += 1;
        let c = coeffs.next().expect("infinite stream");
        let next = weight.at(c.index) * c.value.abs();
        if next == 0.0 || (next <= RATIO_CAP * term && next / (1.0 - RATIO_CAP) <= TAIL_SUM_EPSILON) {
            return Ok(sum.value());
        }
        if !next.is_finite() {
            return Err(Error::NonFinite { terms: used });
        }
        if used >= TAIL_SUM_MAX_TERMS {
            return Err(Error::TruncationFailure {
                terms: used,
                tail_bound: f64::INFINITY,
            });
        }
        term = next;
    }
}
