//! Randomized cross-checks of the fast path against the oracle.

use qbp_core::oracle::{geometric_identity_check, oracle_coefficient_tail_sum};
use qbp_core::{
    check_lemma, coefficient_tail_sum, eval, oracle_eval, sample_disk, Complex64, Family, Form, FunctionId,
    PrecisionSpec, QParams, Statement, Verdict, Weight,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::Output;
use crate::config::RunConfig;
use crate::exit::{CliError, Exit};

/// Relative slack on top of the reported bounds when comparing with the oracle.
pub const RELATIVE_SLACK: f64 = 1e-13;

#[derive(Serialize)]
struct CheckLog {
    check: &'static str,
    case: usize,
    passed: bool,
    detail: Value,
}

#[derive(Serialize)]
struct Summary {
    cases: usize,
    seed: u64,
    checks_run: usize,
    passed: usize,
    failed: usize,
    checks: Vec<CheckLog>,
}

fn disk_point(rng: &mut ChaCha8Rng, max_radius: f64) -> Complex64 {
    let r = max_radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
}

fn failure(e: impl ToString) -> (bool, Value) {
    (false, json!({ "error": e.to_string() }))
}

fn oracle_equivalence(f: FunctionId, p: &QParams, z: Complex64, cfg: &RunConfig) -> (bool, Value) {
    let fast = match eval(f, p, z, &cfg.policy()) {
        Ok(r) => r,
        Err(e) => return failure(e),
    };
    let reference = match oracle_eval(f, p, z, &PrecisionSpec::default()) {
        Ok(r) => r,
        Err(e) => return failure(e),
    };
    let distance = reference.distance_to(fast.value);
    let allowance = fast.tail_bound + reference.certified_error + RELATIVE_SLACK * fast.value.norm();
    let detail = json!({
        "family": f.family,
        "form": f.form,
        "q": p.q(),
        "nu": p.nu(),
        "z": [z.re, z.im],
        "distance": distance,
        "allowance": allowance,
    });
    (distance <= allowance, detail)
}

fn coefficient_sum(family: Family, p: &QParams, weight: Weight) -> (bool, Value) {
    let fast = match coefficient_tail_sum(family, p, 1, weight) {
        Ok(v) => v,
        Err(e) => return failure(e),
    };
    let reference = match oracle_coefficient_tail_sum(family, p, 1, weight, &PrecisionSpec::default()) {
        Ok(v) => v,
        Err(e) => return failure(e),
    };
    let distance = reference.distance_to(fast);
    let allowance = qbp_core::series::TAIL_SUM_EPSILON + RELATIVE_SLACK * fast.abs();
    let detail = json!({
        "family": family,
        "weight": weight,
        "q": p.q(),
        "nu": p.nu(),
        "fast": fast,
        "distance": distance,
        "allowance": allowance,
    });
    (distance <= allowance, detail)
}

fn lemma(statement: Statement, p: &QParams, points: &[Complex64], cfg: &RunConfig) -> (bool, Value) {
    match check_lemma(statement, p, points, &cfg.verify_options()) {
        Ok(r) => {
            let ok = r.value_verdict != Verdict::Violated && r.deriv_verdict != Verdict::Violated;
            (ok, serde_json::to_value(&r).unwrap_or(Value::Null))
        }
        Err(e) => failure(e),
    }
}

pub fn run(cases: usize, cfg: &RunConfig) -> Result<Output, CliError> {
    let seed = cfg.grid.seed;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = if cases == 0 { Vec::new() } else { sample_disk(&cfg.grid)? };
    let mut checks = Vec::new();
    let mut log = |check, case, (passed, detail): (bool, Value)| {
        checks.push(CheckLog { check, case, passed, detail });
    };

    for case in 0..cases {
        let p = QParams::new(rng.random_range(0.05..0.95), rng.random_range(-0.5..5.0))?;
        let z = disk_point(&mut rng, 0.99);
        for family in [Family::Second, Family::Third] {
            for form in [Form::Normalized, Form::Derivative] {
                log("oracle-equivalence", case, oracle_equivalence(FunctionId::new(family, form), &p, z, cfg));
            }
            let weight = if case % 2 == 0 { Weight::Unit } else { Weight::NPlusOne };
            log("coefficient-sum", case, coefficient_sum(family, &p, weight));
        }

        let statement = if case % 2 == 0 { Statement::L1 } else { Statement::L2 };
        let lp = QParams::new(rng.random_range(0.005..0.3), rng.random_range(0.0..4.0))?;
        log("lemma", case, lemma(statement, &lp, &points, cfg));

        let x: f64 = rng.random_range(0.01..0.99);
        let geometric = match geometric_identity_check(x, &PrecisionSpec::default()) {
            Ok(g) => (g.agrees(), json!({ "x": x, "discrepancy": [g.discrepancy1, g.discrepancy2], "certified": [g.certified1, g.certified2] })),
            Err(e) => failure(e),
        };
        log("geometric-identity", case, geometric);
    }

    let passed = checks.iter().filter(|c| c.passed).count();
    let summary = Summary {
        cases,
        seed,
        checks_run: checks.len(),
        passed,
        failed: checks.len() - passed,
        checks,
    };
    let exit = if summary.failed == 0 { Exit::Ok } else { Exit::SelftestFailed };
    let mut payload = serde_json::to_string_pretty(&summary)
        .map_err(|e| CliError::new(Exit::Validation, format!("cannot serialize output: {e}")))?;
    payload.push('\n');
    Ok(Output { payload, exit })
}
