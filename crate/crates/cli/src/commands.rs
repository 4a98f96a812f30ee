use qbp_core::{
    atlas, check_inequality, eval_h, eval_h_deriv, eval_partial, eval_partial_deriv, sample_disk, AtlasCell,
    AtlasSpec, BoundCheck, Complex64, EvalResult, InequalityId, PartialSpec, QParams, Variant, Verdict,
};
use serde::Serialize;

use crate::args::{theorem_inequality, AtlasArgs, AtlasVariantArg, CheckArgs, EvalArgs, VariantArg};
use crate::config::RunConfig;
use crate::exit::{CliError, Exit};

pub struct Output {
    pub payload: String,
    pub exit: Exit,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::new(Exit::Validation, format!("cannot serialize output: {e}")))
}

#[derive(Serialize)]
struct EvalRecord {
    value_re: f64,
    value_im: f64,
    tail_bound: f64,
    terms_used: usize,
}

pub fn eval(args: &EvalArgs, cfg: &RunConfig) -> Result<Output, CliError> {
    let p = QParams::new(args.q, args.nu)?;
    let z = Complex64::new(args.z_re, args.z_im);
    let family = args.family.into();
    let result = match args.partial {
        Some(m) => {
            let m = PartialSpec::new(m)?;
            if z.norm().is_nan() || z.norm() > 1.0 {
                return Err(CliError::new(Exit::Validation, format!("z = {z} lies outside the closed unit disk")));
            }
            let value = if args.deriv {
                eval_partial_deriv(family, &p, m, z)
            } else {
                eval_partial(family, &p, m, z)
            };
            // finite sum: nothing is truncated
            EvalResult { value, tail_bound: 0.0, terms_used: m.m() + 1 }
        }
        None if args.deriv => eval_h_deriv(family, &p, z, &cfg.policy())?,
        None => eval_h(family, &p, z, &cfg.policy())?,
    };
    Ok(Output {
        payload: to_json(&EvalRecord {
            value_re: result.value.re,
            value_im: result.value.im,
            tail_bound: result.tail_bound,
            terms_used: result.terms_used,
        })?,
        exit: Exit::Ok,
    })
}

#[derive(Serialize)]
struct CheckReport {
    verdict: &'static str,
    records: Vec<BoundCheck>,
}

/// Violations take priority over failed hypotheses.
fn overall(records: &[BoundCheck]) -> (Exit, &'static str) {
    if records.iter().any(|r| r.verdict == Verdict::Violated) {
        (Exit::Violated, Verdict::Violated.as_str())
    } else if records.iter().any(|r| r.verdict == Verdict::HypothesisFailed) {
        (Exit::HypothesisFailed, Verdict::HypothesisFailed.as_str())
    } else {
        (Exit::Ok, Verdict::Satisfied.as_str())
    }
}

pub fn check(args: &CheckArgs, cfg: &RunConfig) -> Result<Output, CliError> {
    let p = QParams::new(args.q, args.nu)?;
    let inequality = theorem_inequality(args.theorem, args.part);
    let variants: &[Variant] = match args.variant {
        VariantArg::Literal => &[Variant::Literal],
        VariantArg::Pattern => &[Variant::Pattern],
        VariantArg::Both => &[Variant::Literal, Variant::Pattern],
    };
    let points = sample_disk(&cfg.grid)?;
    let options = cfg.verify_options();
    let mut records = Vec::new();
    for &variant in variants {
        let id = InequalityId::new(inequality, variant)?;
        for &m in &cfg.m_sweep {
            records.push(check_inequality(id, &p, PartialSpec::new(m)?, &points, &options)?);
        }
    }
    let (exit, verdict) = overall(&records);
    Ok(Output { payload: to_json(&CheckReport { verdict, records })?, exit })
}

pub const ATLAS_HEADER: [&str; 7] = ["q", "nu", "hypothesis", "bound", "empirical_min", "margin", "verdict"];

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn atlas_row(cell: &AtlasCell) -> [String; 7] {
    let check = cell.check.as_ref();
    let verdict = match (&cell.error, check) {
        (Some(_), _) => "error",
        (None, Some(c)) => c.verdict.as_str(),
        (None, None) => Verdict::HypothesisFailed.as_str(),
    };
    [
        cell.q.to_string(),
        cell.nu.to_string(),
        cell.hypothesis.to_string(),
        opt(check.and_then(|c| c.bound_value)),
        opt(check.and_then(|c| c.empirical_min)),
        opt(check.and_then(|c| c.margin)),
        verdict.to_string(),
    ]
}

pub fn atlas_cmd(args: &AtlasArgs, cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = AtlasSpec {
        inequality: theorem_inequality(args.theorem, args.part),
        variant: match args.variant {
            AtlasVariantArg::Literal => Variant::Literal,
            AtlasVariantArg::Pattern => Variant::Pattern,
        },
        q_range: (args.q_min, args.q_max),
        nu_range: (args.nu_min, args.nu_max),
        steps: args.steps,
        m_sweep: cfg.m_sweep.clone(),
    };
    let points = sample_disk(&cfg.grid)?;
    let report = atlas(&spec, &points, &cfg.verify_options())?;

    let csv_err = |e: csv::Error| CliError::new(Exit::Validation, format!("cannot write CSV: {e}"));
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(ATLAS_HEADER).map_err(csv_err)?;
    for cell in &report.cells {
        writer.write_record(atlas_row(cell)).map_err(csv_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::new(Exit::Validation, format!("cannot write CSV: {e}")))?;
    let payload = String::from_utf8(bytes).expect("CSV output is UTF-8");
    Ok(Output { payload, exit: Exit::Ok })
}
