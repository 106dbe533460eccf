use clap::{Args, ValueEnum};
use diracwalk_core::dirac::{asymptotic_moment, finite_time_moment, CutoffBall, FiniteTimeGrid};
use diracwalk_core::laws::{law_moment, DiracLimitLaw, Law};
use diracwalk_core::quadrature::DEFAULT_SEED;
use diracwalk_core::{IntegrationResult, IntegrationSpec, Method, MultiIndex, PhysParams, Qubit4};
use serde_json::{json, Value};

use super::parse_qubit;
use crate::numparse::{parse_index_list, parse_real};
use crate::output::{emit, json_text};
use crate::{CliError, Global, Units};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Spherical,
    MonteCarlo,
}

#[derive(Args, Debug, Clone)]
pub struct MomentsArgs {
    /// Momentum dimension, 1..4.
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Cutoff ratio lambda / (m c).
    #[arg(long, default_value = "1")]
    pub lambda: String,
    /// Initial four-component qubit.
    #[arg(long, allow_hyphen_values = true)]
    pub qubit: String,
    #[arg(long)]
    pub normalize: bool,
    /// Multi-indices separated by ';', e.g. "2,0,0;1,1,0".
    #[arg(long)]
    pub alpha: Option<String>,
    /// All multi-indices up to this total degree (default 2 without --alpha).
    #[arg(long)]
    pub max_degree: Option<u32>,
    /// Comma-separated times for the finite-time series.
    #[arg(long)]
    pub t: Option<String>,
    /// Quadrature tolerance on normalized moments.
    #[arg(long, default_value = "1e-10")]
    pub tol: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Spherical)]
    pub method: MethodArg,
    /// Seed for Monte Carlo quadrature.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub units: Units,
}

fn result_json(r: &IntegrationResult) -> Value {
    json!({ "value": r.value, "error": r.error, "converged": r.converged, "evaluations": r.evaluations })
}

fn failed_json(e: &diracwalk_core::Error) -> Value {
    json!({ "value": null, "converged": false, "message": e.to_string() })
}

pub fn alphas(a: &MomentsArgs) -> Result<Vec<MultiIndex>, CliError> {
    let mut out = vec![];
    if let Some(s) = &a.alpha {
        for part in s.split(';').filter(|p| !p.trim().is_empty()) {
            let idx = MultiIndex::new(&parse_index_list(part)?);
            idx.check_dim(a.d)?;
            out.push(idx);
        }
    }
    if let Some(k) = a.max_degree.or(if a.alpha.is_none() { Some(2) } else { None }) {
        out.extend(MultiIndex::all_up_to(a.d, k));
    }
    Ok(out)
}

/// Everything needed to evaluate one report.
pub struct Setup {
    pub q: Qubit4,
    pub ball: CutoffBall,
    pub law: Law,
    pub params: PhysParams,
    pub spec: IntegrationSpec,
    pub times: Vec<f64>,
}

pub fn setup(a: &MomentsArgs) -> Result<Setup, CliError> {
    if !(1..=4).contains(&a.d) {
        return Err(diracwalk_core::Error::UnsupportedDimension(a.d).into());
    }
    let params = a.units.params()?;
    let ratio = parse_real(&a.lambda)?;
    let q = parse_qubit::<4>(&a.qubit, a.normalize)?;
    let ball = CutoffBall::from_ratio(a.d, ratio, &params)?;
    let law = Law::Dirac(DiracLimitLaw::new(a.d, ratio, &q, params)?);
    let method = match a.method {
        MethodArg::Spherical => Method::SphericalProduct,
        MethodArg::MonteCarlo => Method::MonteCarlo,
    };
    let spec = IntegrationSpec::new(method, parse_real(&a.tol)?).with_seed(a.seed);
    let times = match &a.t {
        Some(s) => s.split(',').map(|x| parse_real(x.trim())).collect::<Result<Vec<_>, _>>()?,
        None => vec![],
    };
    Ok(Setup { q, ball, law, params, spec, times })
}

/// One report entry; the flag is false when some path failed to converge.
pub fn entry(s: &Setup, alpha: &MultiIndex) -> (Value, bool) {
    let asym = asymptotic_moment(&s.q, alpha, &s.ball, &s.params, &s.spec);
    let law = law_moment(&s.law, alpha, &s.spec);
    let mut ok = true;
    let asym_v = match &asym {
        Ok(r) => {
            ok &= r.converged;
            Some(r.value)
        }
        Err(_) => {
            ok = false;
            None
        }
    };
    let law_v = match &law {
        Ok(r) => {
            ok &= r.converged;
            Some(r.value)
        }
        Err(_) => {
            ok = false;
            None
        }
    };
    let mut series = vec![];
    let mut last_dev = f64::INFINITY;
    let mut decreasing = true;
    for &t in &s.times {
        match finite_time_moment(&s.q, alpha, &s.ball, t, &FiniteTimeGrid::default(), &s.params) {
            Ok(m) => {
                // the zeroth moment is the total probability, shell included
                let value = if alpha.is_zero() { m.value + m.excluded_shell_mass } else { m.value };
                let dev = asym_v.map(|a| (value - a).abs());
                if let Some(d) = dev {
                    decreasing &= d < last_dev || d <= 1e-12;
                    last_dev = d;
                }
                series.push(json!({
                    "t": t,
                    "value": value,
                    "excluded_shell_mass": m.excluded_shell_mass,
                    "step": m.step,
                    "deviation": dev,
                }));
            }
            Err(e) => {
                ok = false;
                series.push(json!({ "t": t, "value": null, "message": e.to_string() }));
            }
        }
    }
    let mut v = json!({
        "alpha": alpha.0,
        "asymptotic": asym.as_ref().map(result_json).unwrap_or_else(failed_json),
        "law": law.as_ref().map(result_json).unwrap_or_else(failed_json),
        "deviation": asym_v.zip(law_v).map(|(a, l)| (a - l).abs()),
        "converged": ok,
    });
    if !s.times.is_empty() {
        v["finite_t"] = Value::Array(series);
        v["finite_t_decreasing"] = json!(decreasing);
    }
    (v, ok)
}

pub fn run(a: &MomentsArgs, g: &Global) -> Result<(), CliError> {
    if g.format == Some(crate::output::Format::Csv) {
        return Err(CliError::Usage("moments writes JSON reports only".into()));
    }
    let s = setup(a)?;
    let mut entries = vec![];
    let mut all_ok = true;
    for alpha in alphas(a)? {
        let (e, ok) = entry(&s, &alpha);
        all_ok &= ok;
        entries.push(e);
    }
    let report = json!({
        "schema": 1,
        "command": "moments",
        "config": g.canonical.to_json(),
        "converged": all_ok,
        "entries": entries,
    });
    emit(&json_text(&report), g.out.as_deref())?;
    if g.strict && !all_ok {
        return Err(CliError::NotConverged("at least one moment entry did not converge".into()));
    }
    Ok(())
}
