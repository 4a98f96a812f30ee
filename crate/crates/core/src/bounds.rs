//! Hypothesis predicates and lower-bound constants for the modulus lemmas
//! and the four partial-sum ratio theorems.
//!
//! All formulas are written in terms of
//!
//! ```text
//! P = (1 - q)(1 - q^nu),  M = 4P,  x = q^nu,  s = sqrt(q)
//! ```
//!
//! Each theorem bound exists in two variants. `Literal` evaluates the
//! printed formula verbatim. `Pattern` follows the shape of the first theorem,
//! whose bounds are `2 - L` and `1 / L` for the matching lemma constant `L`;
//! derivative theorems use `L^2`. Both are reported side by side.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::qcore::{Family, QParams};
use crate::series::{coefficient_tail_sum, PartialSpec, Weight};

/// The twelve inequalities: four lemma modulus bounds and eight ratio bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Inequality {
    #[serde(rename = "L1_value")]
    L1Value,
    #[serde(rename = "L1_deriv")]
    L1Deriv,
    #[serde(rename = "L2_value")]
    L2Value,
    #[serde(rename = "L2_deriv")]
    L2Deriv,
    #[serde(rename = "T1_ratio")]
    T1Ratio,
    #[serde(rename = "T1_reciprocal")]
    T1Reciprocal,
    #[serde(rename = "T2_derivRatio")]
    T2DerivRatio,
    #[serde(rename = "T2_derivReciprocal")]
    T2DerivReciprocal,
    #[serde(rename = "T3_ratio")]
    T3Ratio,
    #[serde(rename = "T3_reciprocal")]
    T3Reciprocal,
    #[serde(rename = "T4_derivRatio")]
    T4DerivRatio,
    #[serde(rename = "T4_derivReciprocal")]
    T4DerivReciprocal,
}

/// Which of a theorem's two claims.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    /// Lower bound on `Re{full / partial}`.
    Ratio,
    /// Lower bound on `Re{partial / full}`.
    Reciprocal,
}

/// Which function pair a ratio inequality compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RatioKind {
    /// `h / h_m`, evaluated as `g / g_m`.
    Value,
    /// `h' / h_m'`.
    Derivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Direction {
    FullOverPartial,
    PartialOverFull,
}

/// Lemma numbers and theorem numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statement {
    L1,
    L2,
    T1,
    T2,
    T3,
    T4,
}

impl Statement {
    pub const THEOREMS: [Statement; 4] = [Statement::T1, Statement::T2, Statement::T3, Statement::T4];

    pub fn family(self) -> Family {
        match self {
            Statement::L1 | Statement::T1 | Statement::T2 => Family::Second,
            Statement::L2 | Statement::T3 | Statement::T4 => Family::Third,
        }
    }

    /// Lemmas use `>`, theorems `>=`.
    pub fn is_strict(self) -> bool {
        matches!(self, Statement::L1 | Statement::L2)
    }

    /// `LHS - RHS` of the governing hypothesis.
    pub fn margin(self, p: &QParams) -> f64 {
        let c = Constants::new(p);
        match self {
            Statement::L1 => c.m - c.x,
            Statement::L2 => c.p - c.s,
            Statement::T1 => 2.0 * c.p - c.x,
            Statement::T2 => c.p - c.x,
            Statement::T3 => c.p - 2.0 * c.s,
            Statement::T4 => c.p - 4.0 * c.s,
        }
    }

    pub fn theorem_inequality(self, part: Part) -> Option<Inequality> {
        use Inequality::*;
        Some(match (self, part) {
            (Statement::T1, Part::Ratio) => T1Ratio,
            (Statement::T1, Part::Reciprocal) => T1Reciprocal,
            (Statement::T2, Part::Ratio) => T2DerivRatio,
            (Statement::T2, Part::Reciprocal) => T2DerivReciprocal,
            (Statement::T3, Part::Ratio) => T3Ratio,
            (Statement::T3, Part::Reciprocal) => T3Reciprocal,
            (Statement::T4, Part::Ratio) => T4DerivRatio,
            (Statement::T4, Part::Reciprocal) => T4DerivReciprocal,
            _ => return None,
        })
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Statement::L1 => "L1",
            Statement::L2 => "L2",
            Statement::T1 => "T1",
            Statement::T2 => "T2",
            Statement::T3 => "T3",
            Statement::T4 => "T4",
        };
        f.write_str(s)
    }
}

impl Inequality {
    pub const ALL: [Inequality; 12] = [
        Inequality::L1Value,
        Inequality::L1Deriv,
        Inequality::L2Value,
        Inequality::L2Deriv,
        Inequality::T1Ratio,
        Inequality::T1Reciprocal,
        Inequality::T2DerivRatio,
        Inequality::T2DerivReciprocal,
        Inequality::T3Ratio,
        Inequality::T3Reciprocal,
        Inequality::T4DerivRatio,
        Inequality::T4DerivReciprocal,
    ];

    pub const THEOREM_BOUNDS: [Inequality; 8] = [
        Inequality::T1Ratio,
        Inequality::T1Reciprocal,
        Inequality::T2DerivRatio,
        Inequality::T2DerivReciprocal,
        Inequality::T3Ratio,
        Inequality::T3Reciprocal,
        Inequality::T4DerivRatio,
        Inequality::T4DerivReciprocal,
    ];

    pub fn statement(self) -> Statement {
        use Inequality::*;
        match self {
            L1Value | L1Deriv => Statement::L1,
            L2Value | L2Deriv => Statement::L2,
            T1Ratio | T1Reciprocal => Statement::T1,
            T2DerivRatio | T2DerivReciprocal => Statement::T2,
            T3Ratio | T3Reciprocal => Statement::T3,
            T4DerivRatio | T4DerivReciprocal => Statement::T4,
        }
    }

    pub fn is_lemma(self) -> bool {
        matches!(self.statement(), Statement::L1 | Statement::L2)
    }

    pub fn family(self) -> Family {
        self.statement().family()
    }

    /// Derivative-based statements: the lemma derivative bounds and the
    /// second and fourth theorems.
    pub fn is_derivative(self) -> bool {
        use Inequality::*;
        matches!(
            self,
            L1Deriv | L2Deriv | T2DerivRatio | T2DerivReciprocal | T4DerivRatio | T4DerivReciprocal
        )
    }

    /// `None` for lemma modulus bounds.
    pub fn part(self) -> Option<Part> {
        use Inequality::*;
        match self {
            T1Ratio | T2DerivRatio | T3Ratio | T4DerivRatio => Some(Part::Ratio),
            T1Reciprocal | T2DerivReciprocal | T3Reciprocal | T4DerivReciprocal => Some(Part::Reciprocal),
            _ => None,
        }
    }

    pub fn ratio_kind(self) -> RatioKind {
        if self.is_derivative() {
            RatioKind::Derivative
        } else {
            RatioKind::Value
        }
    }

    pub fn direction(self) -> Option<Direction> {
        self.part().map(|p| match p {
            Part::Ratio => Direction::FullOverPartial,
            Part::Reciprocal => Direction::PartialOverFull,
        })
    }

    /// The lemma value bound that the pattern variant is built from.
    fn lemma_source(self) -> Inequality {
        match self.family() {
            Family::Second => Inequality::L1Value,
            Family::Third => Inequality::L2Value,
        }
    }

    pub fn name(self) -> &'static str {
        use Inequality::*;
        match self {
            L1Value => "L1_value",
            L1Deriv => "L1_deriv",
            L2Value => "L2_value",
            L2Deriv => "L2_deriv",
            T1Ratio => "T1_ratio",
            T1Reciprocal => "T1_reciprocal",
            T2DerivRatio => "T2_derivRatio",
            T2DerivReciprocal => "T2_derivReciprocal",
            T3Ratio => "T3_ratio",
            T3Reciprocal => "T3_reciprocal",
            T4DerivRatio => "T4_derivRatio",
            T4DerivReciprocal => "T4_derivReciprocal",
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Literal,
    Pattern,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Literal => "literal",
            Variant::Pattern => "pattern",
        })
    }
}

/// An inequality together with the bound variant it is tested against.
/// Lemma bounds admit only [`Variant::Literal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct InequalityId {
    pub inequality: Inequality,
    pub variant: Variant,
}

impl InequalityId {
    pub fn new(inequality: Inequality, variant: Variant) -> Result<Self> {
        if inequality.is_lemma() && variant == Variant::Pattern {
            return Err(Error::InvalidArgument(format!(
                "{inequality} has no pattern variant"
            )));
        }
        Ok(Self { inequality, variant })
    }

    pub fn literal(inequality: Inequality) -> Self {
        Self {
            inequality,
            variant: Variant::Literal,
        }
    }

    pub fn pattern(inequality: Inequality) -> Result<Self> {
        Self::new(inequality, Variant::Pattern)
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.inequality, self.variant)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypothesisStatus {
    pub holds: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremBound {
    pub id: InequalityId,
    pub params: QParams,
    pub hypothesis_holds: bool,
    pub hypothesis_margin: f64,
    pub bound_value: Option<f64>,
}

/// The re-parameterized quantities shared by every bound formula.
#[derive(Debug, Clone, Copy)]
struct Constants {
    /// `(1 - q)(1 - q^nu)`
    p: f64,
    /// `4P`
    m: f64,
    /// `q^nu`
    x: f64,
    /// `sqrt(q)`
    s: f64,
    q: f64,
}

impl Constants {
    fn new(params: &QParams) -> Self {
        let p = params.p_factor();
        Self {
            p,
            m: 4.0 * p,
            x: params.q_pow_nu(),
            s: params.q().sqrt(),
            q: params.q(),
        }
    }

    /// Scale constant of the Mobius construction for the ratio claim:
    /// `(M - x)/x`, `(M - x)^2/(8Px - x^2)`, `(P - s)/s`, `(P - s)^2/(2Ps - q)`.
    fn proof_scale(&self, statement: Statement) -> f64 {
        let Constants { p, m, x, s, q } = *self;
        match statement {
            Statement::T1 => (m - x) / x,
            Statement::T2 => (m - x).powi(2) / (8.0 * p * x - x * x),
            Statement::T3 => (p - s) / s,
            Statement::T4 => (p - s).powi(2) / (2.0 * p * s - q),
            Statement::L1 | Statement::L2 => unreachable!("lemmas have no Mobius construction"),
        }
    }
}

pub fn hypothesis_check(statement: Statement, p: &QParams) -> HypothesisStatus {
    let margin = statement.margin(p);
    let holds = if statement.is_strict() {
        margin > 0.0
    } else {
        margin >= 0.0
    };
    HypothesisStatus { holds, margin }
}

fn require(statement: Statement, id: InequalityId, p: &QParams) -> Result<()> {
    let h = hypothesis_check(statement, p);
    if h.holds {
        Ok(())
    } else {
        Err(Error::HypothesisViolated { id, margin: h.margin })
    }
}

/// Modulus bounds: `M/(M - x)` and `(P/(P - s))`, or their squares.
pub fn lemma_bound(inequality: Inequality, p: &QParams) -> Result<f64> {
    if !inequality.is_lemma() {
        return Err(Error::InvalidArgument(format!("{inequality} is not a lemma bound")));
    }
    require(inequality.statement(), InequalityId::literal(inequality), p)?;
    let c = Constants::new(p);
    let value = match inequality.statement() {
        Statement::L1 => c.m / (c.m - c.x),
        _ => c.p / (c.p - c.s),
    };
    Ok(if inequality.is_derivative() { value * value } else { value })
}

/// The theorem lower bounds as printed.
pub fn literal_bound(inequality: Inequality, p: &QParams) -> Result<f64> {
    if inequality.is_lemma() {
        return Err(Error::InvalidArgument(format!("{inequality} is not a theorem bound")));
    }
    require(inequality.statement(), InequalityId::literal(inequality), p)?;
    let Constants { p, m, x, s, q } = Constants::new(p);
    use Inequality::*;
    Ok(match inequality {
        T1Ratio => (m - 2.0 * x) / (m - x),
        T1Reciprocal => (m - x) / m,
        T2DerivRatio => (16.0 * p * (p - x) + 2.0 * x * x) / (8.0 * p * x - x * x),
        T2DerivReciprocal => (m - x).powi(2) / (8.0 * p * x - x * x),
        T3Ratio => (p - 2.0 * s) / s,
        T3Reciprocal => (p - s) / s,
        T4DerivRatio => (p * p - 4.0 * p * s + 2.0 * q) / (2.0 * p * s - q),
        T4DerivReciprocal => (p - s).powi(2) / (2.0 * p * s - q),
        L1Value | L1Deriv | L2Value | L2Deriv => unreachable!(),
    })
}

/// `2 - L` and `1/L` (value theorems) or `2 - L^2` and `1/L^2` (derivative
/// theorems), with `L` the lemma value bound of the same family.
pub fn pattern_bound(inequality: Inequality, p: &QParams) -> Result<f64> {
    let id = InequalityId::pattern(inequality)?;
    require(inequality.statement(), id, p)?;
    let l = lemma_bound(inequality.lemma_source(), p)?;
    let l = if inequality.is_derivative() { l * l } else { l };
    Ok(match inequality.part() {
        Some(Part::Ratio) => 2.0 - l,
        Some(Part::Reciprocal) => 1.0 / l,
        None => unreachable!(),
    })
}

pub fn bound_value(id: InequalityId, p: &QParams) -> Result<f64> {
    if id.inequality.is_lemma() {
        return lemma_bound(id.inequality, p);
    }
    match id.variant {
        Variant::Literal => literal_bound(id.inequality, p),
        Variant::Pattern => pattern_bound(id.inequality, p),
    }
}

pub fn theorem_bound(id: InequalityId, p: &QParams) -> TheoremBound {
    let h = hypothesis_check(id.inequality.statement(), p);
    TheoremBound {
        id,
        params: *p,
        hypothesis_holds: h.holds,
        hypothesis_margin: h.margin,
        bound_value: if h.holds { bound_value(id, p).ok() } else { None },
    }
}

/// Scale `C` (ratio claims) or `1 + C` (reciprocal claims) used when
/// rewriting `Re{ratio} >= bound` as `|w| <= 1`.
pub fn mobius_scale(inequality: Inequality, p: &QParams) -> Result<f64> {
    let part = inequality
        .part()
        .ok_or_else(|| Error::InvalidArgument(format!("{inequality} has no Mobius construction")))?;
    let c = Constants::new(p).proof_scale(inequality.statement());
    Ok(match part {
        Part::Ratio => c,
        Part::Reciprocal => 1.0 + c,
    })
}

fn coefficient_weight(inequality: Inequality) -> Weight {
    if inequality.is_derivative() {
        Weight::NPlusOne
    } else {
        Weight::Unit
    }
}

/// Left-hand side of the sufficient coefficient inequality used in each
/// theorem's proof:
///
/// ```text
/// sum_{n=1}^{m} w_n |a_n| + C sum_{n>m} w_n |a_n|
/// ```
///
/// with `w_n = 1` or `n + 1` and `C` the constant printed in that inequality.
/// For the first theorem's reciprocal claim the printed constant is `M/x`;
/// for the other three theorems both claims print the same `C`.
pub fn coefficient_inequality_lhs(id: InequalityId, p: &QParams, m: PartialSpec) -> Result<f64> {
    let inequality = id.inequality;
    if inequality.is_lemma() {
        return Err(Error::InvalidArgument(format!("{inequality} is not a theorem bound")));
    }
    let statement = inequality.statement();
    require(statement, id, p)?;
    let consts = Constants::new(p);
    let scale = match inequality {
        Inequality::T1Reciprocal => consts.m / consts.x,
        _ => consts.proof_scale(statement),
    };
    let weight = coefficient_weight(inequality);
    let family = statement.family();
    let all = coefficient_tail_sum(family, p, 1, weight)?;
    let tail = coefficient_tail_sum(family, p, m.m() + 1, weight)?;
    let head = (all - tail).max(0.0);
    Ok(head + scale * tail)
}

/// Scaled full coefficient sum `C * sum_{n>=1} w_n |a_n|`, the equivalent
/// form of each lemma bound restated on the coefficients.
pub fn full_coefficient_check(lemma: Inequality, p: &QParams) -> Result<f64> {
    if !lemma.is_lemma() {
        return Err(Error::InvalidArgument(format!("{lemma} is not a lemma bound")));
    }
    require(lemma.statement(), InequalityId::literal(lemma), p)?;
    let c = Constants::new(p);
    let scale = match lemma {
        Inequality::L1Value => c.proof_scale(Statement::T1),
        Inequality::L1Deriv => c.proof_scale(Statement::T2),
        Inequality::L2Value => c.proof_scale(Statement::T3),
        Inequality::L2Deriv => c.proof_scale(Statement::T4),
        _ => unreachable!(),
    };
    let sum = coefficient_tail_sum(lemma.family(), p, 1, coefficient_weight(lemma))?;
    Ok(scaled_sum(scale, sum))
}

fn scaled_sum(scale: f64, sum: f64) -> f64 {
    scale * sum
}
