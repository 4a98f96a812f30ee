//! Empirical checks of the lemma and theorem inequalities on a finite
//! sample of the open unit disk, plus a scan over the `(q, nu)` plane.
//!
//! A sampled minimum is only an upper bound on the true infimum, so a
//! `Satisfied` verdict means "satisfied on the sample", never "proved".

use std::collections::HashSet;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitDisc};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{
    bound_value, hypothesis_check, lemma_bound, mobius_scale, Direction, Inequality, InequalityId, RatioKind,
    Statement, Variant,
};
use crate::error::{Error, Result};
use crate::qcore::{Family, QParams};
use crate::series::{
    eval_h, eval_h_deriv, eval_partial_deriv, eval_partial_reduced, eval_reduced, PartialSpec, TruncationPolicy,
};

/// Denominators below this modulus are reported instead of divided by.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Relative slack allowed on sampled lemma maxima.
pub const LEMMA_RELATIVE_TOLERANCE: f64 = 1e-12;

/// Default partial-sum orders swept by checks.
pub const DEFAULT_M_SWEEP: [usize; 5] = [1, 2, 3, 5, 10];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskGrid {
    pub radii: Vec<f64>,
    pub angles_per_radius: usize,
    pub random_points: usize,
    pub seed: u64,
}

impl Default for DiskGrid {
    fn default() -> Self {
        Self {
            radii: vec![0.1, 0.3, 0.5, 0.7, 0.9, 0.99],
            angles_per_radius: 64,
            random_points: 256,
            seed: 0x5eed,
        }
    }
}

impl DiskGrid {
    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return Err(Error::InvalidGrid(format!("radius {r} outside (0, 1)")));
        }
        let lattice = self.radii.len() * self.angles_per_radius;
        if lattice == 0 && self.random_points == 0 {
            return Err(Error::InvalidGrid("grid contains no points".into()));
        }
        Ok(())
    }
}

/// `exp(2 pi i k / n)`, exact at multiples of a quarter turn.
fn unit_root(k: usize, n: usize) -> Complex64 {
    if (4 * k) % n == 0 {
        match (4 * k / n) % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64)
    }
}

/// Radial-angular lattice followed by seeded uniform points, all strictly
/// inside the unit disk and without duplicates.
pub fn sample_disk(grid: &DiskGrid) -> Result<Vec<Complex64>> {
    grid.validate()?;
    let mut seen = HashSet::new();
    let mut points = Vec::with_capacity(grid.radii.len() * grid.angles_per_radius + grid.random_points);
    let mut push = |z: Complex64, points: &mut Vec<Complex64>| {
        // +0.0 and -0.0 compare equal but hash differently
        let key = ((z.re + 0.0).to_bits(), (z.im + 0.0).to_bits());
        if z.norm() < 1.0 && seen.insert(key) {
            points.push(z);
            true
        } else {
            false
        }
    };
    for &r in &grid.radii {
        for k in 0..grid.angles_per_radius {
            push(unit_root(k, grid.angles_per_radius) * r, &mut points);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let mut accepted = 0;
    while accepted < grid.random_points {
        let [x, y]: [f64; 2] = UnitDisc.sample(&mut rng);
        if push(Complex64::new(x, y), &mut points) {
            accepted += 1;
        }
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioMinimum {
    pub min: f64,
    pub argmin: Complex64,
}

/// The ratio of a full function to its partial sum (or the reverse) at `z`.
pub fn ratio_at(
    family: Family,
    p: &QParams,
    m: PartialSpec,
    kind: RatioKind,
    direction: Direction,
    z: Complex64,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    let (full, partial) = match kind {
        RatioKind::Value => (
            eval_reduced(family, p, z, policy)?.value,
            eval_partial_reduced(family, p, m, z),
        ),
        RatioKind::Derivative => (
            eval_h_deriv(family, p, z, policy)?.value,
            eval_partial_deriv(family, p, m, z),
        ),
    };
    let (num, den) = match direction {
        Direction::FullOverPartial => (full, partial),
        Direction::PartialOverFull => (partial, full),
    };
    let modulus = den.norm();
    if modulus < DENOMINATOR_FLOOR {
        return Err(Error::DenominatorNearZero { z, modulus });
    }
    Ok(num / den)
}

/// Minimum of `Re{ratio}` over `points` and the origin (where it is 1).
///
/// Ties keep the earliest point, so the result does not depend on how the
/// work is scheduled.
pub fn min_real_ratio(
    family: Family,
    p: &QParams,
    m: PartialSpec,
    kind: RatioKind,
    direction: Direction,
    points: &[Complex64],
    policy: &TruncationPolicy,
) -> Result<RatioMinimum> {
    let origin = Complex64::new(0.0, 0.0);
    let values: Vec<Result<f64>> = points
        .par_iter()
        .map(|&z| ratio_at(family, p, m, kind, direction, z, policy).map(|r| r.re))
        .collect();
    let mut best = RatioMinimum {
        min: ratio_at(family, p, m, kind, direction, origin, policy)?.re,
        argmin: origin,
    };
    for (value, &z) in values.into_iter().zip(points) {
        let v = value?;
        if v < best.min {
            best = RatioMinimum { min: v, argmin: z };
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Satisfied,
    Violated,
    HypothesisFailed,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
            Verdict::HypothesisFailed => "hypothesis-failed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub policy: TruncationPolicy,
    /// Absolute slack on `empirical_min - bound`.
    pub tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            policy: TruncationPolicy::default(),
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub id: InequalityId,
    pub params: QParams,
    pub m: usize,
    pub hypothesis_margin: f64,
    pub bound_value: Option<f64>,
    pub empirical_min: Option<f64>,
    pub argmin: Option<Complex64>,
    pub margin: Option<f64>,
    pub verdict: Verdict,
}

fn theorem_only(id: InequalityId) -> Result<(Direction, RatioKind)> {
    match id.inequality.direction() {
        Some(d) => Ok((d, id.inequality.ratio_kind())),
        None => Err(Error::InvalidArgument(format!(
            "{} is a lemma bound; use check_lemma",
            id.inequality
        ))),
    }
}

pub fn check_inequality(
    id: InequalityId,
    p: &QParams,
    m: PartialSpec,
    points: &[Complex64],
    options: &VerifyOptions,
) -> Result<BoundCheck> {
    let (direction, kind) = theorem_only(id)?;
    let hypothesis = hypothesis_check(id.inequality.statement(), p);
    let mut record = BoundCheck {
        id,
        params: *p,
        m: m.m(),
        hypothesis_margin: hypothesis.margin,
        bound_value: None,
        empirical_min: None,
        argmin: None,
        margin: None,
        verdict: Verdict::HypothesisFailed,
    };
    if !hypothesis.holds {
        return Ok(record);
    }
    let bound = bound_value(id, p)?;
    let found = min_real_ratio(id.inequality.family(), p, m, kind, direction, points, &options.policy)?;
    let margin = found.min - bound;
    record.bound_value = Some(bound);
    record.empirical_min = Some(found.min);
    record.argmin = Some(found.argmin);
    record.margin = Some(margin);
    record.verdict = if margin >= -options.tolerance {
        Verdict::Satisfied
    } else {
        Verdict::Violated
    };
    Ok(record)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub statement: Statement,
    pub params: QParams,
    pub hypothesis_margin: f64,
    pub max_abs_value: Option<f64>,
    pub argmax_value: Option<Complex64>,
    pub max_abs_deriv: Option<f64>,
    pub argmax_deriv: Option<Complex64>,
    pub value_bound: Option<f64>,
    pub deriv_bound: Option<f64>,
    pub value_verdict: Verdict,
    pub deriv_verdict: Verdict,
}

fn max_modulus<F>(points: &[Complex64], f: F) -> Result<(f64, Complex64)>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let values: Vec<Result<f64>> = points.par_iter().map(|&z| f(z).map(|v| v.norm())).collect();
    let mut best = (f64::NEG_INFINITY, Complex64::new(0.0, 0.0));
    for (v, &z) in values.into_iter().zip(points) {
        let v = v?;
        if v > best.0 {
            best = (v, z);
        }
    }
    Ok(best)
}

/// Sampled maxima of `|h|` and `|h'|` against the lemma modulus bounds.
pub fn check_lemma(
    statement: Statement,
    p: &QParams,
    points: &[Complex64],
    options: &VerifyOptions,
) -> Result<LemmaReport> {
    let (value_id, deriv_id) = match statement {
        Statement::L1 => (Inequality::L1Value, Inequality::L1Deriv),
        Statement::L2 => (Inequality::L2Value, Inequality::L2Deriv),
        other => return Err(Error::InvalidArgument(format!("{other} is not a lemma"))),
    };
    let hypothesis = hypothesis_check(statement, p);
    let mut report = LemmaReport {
        statement,
        params: *p,
        hypothesis_margin: hypothesis.margin,
        max_abs_value: None,
        argmax_value: None,
        max_abs_deriv: None,
        argmax_deriv: None,
        value_bound: None,
        deriv_bound: None,
        value_verdict: Verdict::HypothesisFailed,
        deriv_verdict: Verdict::HypothesisFailed,
    };
    if !hypothesis.holds {
        return Ok(report);
    }
    let family = statement.family();
    let policy = &options.policy;
    let (max_v, at_v) = max_modulus(points, |z| Ok(eval_h(family, p, z, policy)?.value))?;
    let (max_d, at_d) = max_modulus(points, |z| Ok(eval_h_deriv(family, p, z, policy)?.value))?;
    let vb = lemma_bound(value_id, p)?;
    let db = lemma_bound(deriv_id, p)?;
    let verdict = |max: f64, bound: f64| {
        if max <= bound * (1.0 + LEMMA_RELATIVE_TOLERANCE) {
            Verdict::Satisfied
        } else {
            Verdict::Violated
        }
    };
    report.max_abs_value = Some(max_v);
    report.argmax_value = Some(at_v);
    report.max_abs_deriv = Some(max_d);
    report.argmax_deriv = Some(at_d);
    report.value_bound = Some(vb);
    report.deriv_bound = Some(db);
    report.value_verdict = verdict(max_v, vb);
    report.deriv_verdict = verdict(max_d, db);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MobiusWitness {
    pub id: InequalityId,
    pub z: Complex64,
    pub w_value: Complex64,
}

impl MobiusWitness {
    /// The tested predicate `|w| <= 1`.
    pub fn holds(&self) -> bool {
        self.w_value.norm() <= 1.0
    }
}

/// `w = (R - 1)/(R + 1)` with `R = scale * (ratio - bound)`, so that
/// `Re{ratio} >= bound` exactly when `|w| <= 1`.
pub fn mobius_witness_eval(
    id: InequalityId,
    p: &QParams,
    m: PartialSpec,
    z: Complex64,
    policy: &TruncationPolicy,
) -> Result<MobiusWitness> {
    let (direction, kind) = theorem_only(id)?;
    let bound = bound_value(id, p)?;
    let scale = mobius_scale(id.inequality, p)?;
    let ratio = ratio_at(id.inequality.family(), p, m, kind, direction, z, policy)?;
    let r = (ratio - bound) * scale;
    let denom = r + 1.0;
    if denom.norm() < 1e-12 {
        return Err(Error::WitnessSingular { id, z });
    }
    Ok(MobiusWitness {
        id,
        z,
        w_value: (r - 1.0) / denom,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtlasSpec {
    pub inequality: Inequality,
    pub variant: Variant,
    pub q_range: (f64, f64),
    pub nu_range: (f64, f64),
    pub steps: (usize, usize),
    pub m_sweep: Vec<usize>,
}

impl AtlasSpec {
    pub fn validate(&self) -> Result<()> {
        InequalityId::new(self.inequality, self.variant)?;
        theorem_only(InequalityId::literal(self.inequality))?;
        let (q0, q1) = self.q_range;
        let (n0, n1) = self.nu_range;
        if !(q0 > 0.0 && q1 < 1.0 && q0 <= q1) {
            return Err(Error::InvalidArgument(format!("q range [{q0}, {q1}] not inside (0, 1)")));
        }
        if !(n0 > -1.0 && n0 <= n1 && n1.is_finite()) {
            return Err(Error::InvalidArgument(format!("nu range [{n0}, {n1}] not inside (-1, inf)")));
        }
        if self.steps.0 == 0 || self.steps.1 == 0 {
            return Err(Error::InvalidArgument("atlas steps must be positive".into()));
        }
        if self.m_sweep.is_empty() || self.m_sweep.contains(&0) {
            return Err(Error::InvalidArgument("m sweep must be a non-empty list of orders >= 1".into()));
        }
        Ok(())
    }
}

fn linspace(range: (f64, f64), n: usize, i: usize) -> f64 {
    if n == 1 {
        range.0
    } else {
        range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtlasCell {
    pub q: f64,
    pub nu: f64,
    pub hypothesis: bool,
    /// Worst record over the m sweep (smallest margin).
    pub check: Option<BoundCheck>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtlasSummary {
    pub cells: usize,
    pub hypothesis_holds: f64,
    pub satisfied: f64,
    pub violated: f64,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtlasReport {
    pub id: InequalityId,
    pub cells: Vec<AtlasCell>,
    pub summary: AtlasSummary,
}

fn atlas_cell(id: InequalityId, q: f64, nu: f64, spec: &AtlasSpec, points: &[Complex64], options: &VerifyOptions) -> AtlasCell {
    let p = match QParams::new(q, nu) {
        Ok(p) => p,
        Err(e) => {
            return AtlasCell { q, nu, hypothesis: false, check: None, error: Some(e.to_string()) };
        }
    };
    let hypothesis = hypothesis_check(id.inequality.statement(), &p).holds;
    let mut worst: Option<BoundCheck> = None;
    for &m in &spec.m_sweep {
        let m = PartialSpec::new(m).expect("validated m sweep");
        match check_inequality(id, &p, m, points, options) {
            Ok(c) => {
                let replace = match (&worst, c.margin) {
                    (None, _) => true,
                    (Some(w), Some(new)) => w.margin.is_some_and(|old| new < old),
                    _ => false,
                };
                if replace {
                    worst = Some(c);
                }
                if c.verdict == Verdict::HypothesisFailed {
                    break;
                }
            }
            Err(e) => {
                return AtlasCell {
                    q,
                    nu,
                    hypothesis,
                    check: worst,
                    error: Some(format!("m = {}: {e}", m.m())),
                };
            }
        }
    }
    AtlasCell { q, nu, hypothesis, check: worst, error: None }
}

/// Scan the `(q, nu)` rectangle, q-major. Per-cell evaluation failures are
/// recorded on the cell and do not abort the scan.
pub fn atlas(spec: &AtlasSpec, points: &[Complex64], options: &VerifyOptions) -> Result<AtlasReport> {
    spec.validate()?;
    let id = InequalityId::new(spec.inequality, spec.variant)?;
    let (nq, nn) = spec.steps;
    let coords: Vec<(f64, f64)> = (0..nq)
        .flat_map(|i| (0..nn).map(move |j| (i, j)))
        .map(|(i, j)| (linspace(spec.q_range, nq, i), linspace(spec.nu_range, nn, j)))
        .collect();
    let cells: Vec<AtlasCell> = coords
        .par_iter()
        .map(|&(q, nu)| atlas_cell(id, q, nu, spec, points, options))
        .collect();

    let total = cells.len();
    let frac = |pred: &dyn Fn(&AtlasCell) -> bool| cells.iter().filter(|c| pred(c)).count() as f64 / total as f64;
    let verdict_is = |v: Verdict| move |c: &AtlasCell| c.error.is_none() && c.check.is_some_and(|k| k.verdict == v);
    let summary = AtlasSummary {
        cells: total,
        hypothesis_holds: frac(&|c| c.hypothesis),
        satisfied: frac(&verdict_is(Verdict::Satisfied)),
        violated: frac(&verdict_is(Verdict::Violated)),
        errors: cells.iter().filter(|c| c.error.is_some()).count(),
    };
    Ok(AtlasReport { id, cells, summary })
}
