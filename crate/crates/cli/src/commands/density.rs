use std::f64::consts::FRAC_1_SQRT_2;

use clap::{Args, ValueEnum};
use diracwalk_core::laws::{law_moment, support_radius, DiracLimitLaw, KonnoLaw, Law, TwoDimLaw};
use diracwalk_core::{IntegrationResult, IntegrationSpec, Method, MultiIndex, Qubit2, C64};
use serde_json::json;

use super::{parse_coin_entries, parse_qubit, require};
use crate::numparse::{parse_complex, parse_real};
use crate::output::{emit, Format, Table};
use crate::{CliError, Global, Units};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LawKind {
    /// One-dimensional walk law.
    Konno,
    /// Two-dimensional walk law.
    Sqw2,
    /// Dirac law with an ultraviolet cutoff.
    Dirac,
}

#[derive(Args, Debug, Clone)]
pub struct DensityArgs {
    #[arg(long, value_enum)]
    pub law: LawKind,
    /// Coin entry a (konno).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Coin entry b (konno, with --qubit for the weighted law).
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Coin parameter p (sqw2).
    #[arg(long)]
    pub p: Option<String>,
    /// Initial qubit; adds the weighted density column.
    #[arg(long, allow_hyphen_values = true)]
    pub qubit: Option<String>,
    #[arg(long)]
    pub normalize: bool,
    /// Momentum dimension (dirac), 1..4.
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Cutoff ratio lambda / (m c) (dirac).
    #[arg(long, default_value = "1")]
    pub lambda: String,
    #[command(flatten)]
    pub units: Units,
    /// Grid points per axis.
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Append the quadrature of the tabulated law.
    #[arg(long)]
    pub check_norm: bool,
    /// Quadrature tolerance for --check-norm.
    #[arg(long, default_value = "1e-9")]
    pub tol: String,
}

/// Cell centers of `n` equal cells on `(lo, hi)`.
pub fn cell_centers(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let w = (hi - lo) / n as f64;
    (0..n).map(|i| lo + (i as f64 + 0.5) * w).collect()
}

/// Konno law with zero slope, whose density is `mu` itself.
pub fn symmetric_konno(a_abs: f64) -> Result<KonnoLaw, CliError> {
    let h = C64::from(FRAC_1_SQRT_2);
    let q = Qubit2::new([h, C64::new(0.0, FRAC_1_SQRT_2)])?;
    Ok(KonnoLaw::new(C64::from(a_abs), C64::from((1.0 - a_abs * a_abs).max(0.0).sqrt()), q)?)
}

pub struct Tabulated {
    pub table: Table,
    pub law: Law,
}

pub fn tabulate(a: &DensityArgs) -> Result<Tabulated, CliError> {
    if a.grid == 0 {
        return Err(CliError::Usage("--grid must be positive".into()));
    }
    let n = a.grid;
    match a.law {
        LawKind::Konno => {
            let law = match (&a.b, &a.qubit) {
                (Some(b), Some(q)) => {
                    let (ca, cb) = parse_coin_entries(require(&a.a, "a")?, b)?;
                    KonnoLaw::new(ca, cb, parse_qubit::<2>(q, a.normalize)?)?
                }
                (None, None) => symmetric_konno(parse_complex(require(&a.a, "a")?)?.norm())?,
                _ => return Err(CliError::Usage("the weighted konno law needs both --b and --qubit".into())),
            };
            let weighted = a.qubit.is_some();
            let aa = law.a_abs();
            let mut t = Table::new(if weighted { &["v", "mu", "nu"] } else { &["v", "mu"] });
            for v in cell_centers(-aa, aa, n) {
                let mu = diracwalk_core::laws::konno_mu(v, aa);
                if weighted {
                    t.push(vec![v, mu, law.density(v)]);
                } else {
                    t.push(vec![v, mu]);
                }
            }
            Ok(Tabulated { table: t, law: Law::Konno(law) })
        }
        LawKind::Sqw2 => {
            let law = TwoDimLaw::new(parse_real(require(&a.p, "p")?)?)?;
            let (r1, r2) = (law.p.sqrt(), (1.0 - law.p).sqrt());
            let mut t = Table::new(&["v1", "v2", "mu"]);
            for v1 in cell_centers(-r1, r1, n) {
                for v2 in cell_centers(-r2, r2, n) {
                    t.push(vec![v1, v2, law.density(&[v1, v2])]);
                }
            }
            Ok(Tabulated { table: t, law: Law::TwoDim(law) })
        }
        LawKind::Dirac => {
            let d = a.d;
            if !(1..=4).contains(&d) {
                return Err(diracwalk_core::Error::UnsupportedDimension(d).into());
            }
            let params = a.units.params()?;
            let ratio = parse_real(&a.lambda)?;
            let Some(qs) = &a.qubit else {
                let law = DiracLimitLaw::from_coeffs(d, ratio, vec![0.0; d], params)?;
                let vm = law.support_radius();
                let scale = params.c.powi(d as i32);
                let mut t = Table::new(&["v", "mu", "mu_raw"]);
                for i in 0..n {
                    let v = vm * i as f64 / n as f64;
                    let mu = law.mu(v);
                    t.push(vec![v, mu, mu / scale]);
                }
                return Ok(Tabulated { table: t, law: Law::Dirac(law) });
            };
            let law = DiracLimitLaw::new(d, ratio, &parse_qubit::<4>(qs, a.normalize)?, params)?;
            let vm = support_radius(ratio, &params);
            let centers = cell_centers(-vm, vm, n);
            let t = match d {
                1 => {
                    let mut t = Table::new(&["v", "nu", "nu_raw"]);
                    for &v in &centers {
                        t.push(vec![v, law.density(&[v]), law.density_raw(&[v])]);
                    }
                    t
                }
                2 => {
                    let mut t = Table::new(&["v1", "v2", "nu", "nu_raw"]);
                    for &v1 in &centers {
                        for &v2 in &centers {
                            t.push(vec![v1, v2, law.density(&[v1, v2]), law.density_raw(&[v1, v2])]);
                        }
                    }
                    t
                }
                _ => {
                    return Err(CliError::Usage(
                        "weighted Dirac tables are written for d = 1, 2; use the radial table without --qubit".into(),
                    ))
                }
            };
            Ok(Tabulated { table: t, law: Law::Dirac(law) })
        }
    }
}

pub fn norm(law: &Law, tol: f64) -> Result<IntegrationResult, CliError> {
    let spec = IntegrationSpec::new(Method::Adaptive, tol);
    Ok(law_moment(law, &MultiIndex::zeros(law.dim()), &spec)?)
}

pub fn run(a: &DensityArgs, g: &Global) -> Result<(), CliError> {
    let mut tab = tabulate(a)?;
    let mut unconverged = None;
    if a.check_norm {
        let r = norm(&tab.law, parse_real(&a.tol)?)?;
        tab.table.notes.push(("norm".into(), json!(r.value)));
        tab.table.notes.push(("norm_error".into(), json!(r.error)));
        tab.table.notes.push(("norm_converged".into(), json!(r.converged)));
        let line = format!("norm = {:.6} (error estimate {:e}, converged {})", r.value, r.error, r.converged);
        if g.out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
        if !r.converged {
            unconverged = Some(format!("norm quadrature {} with error {}", r.value, r.error));
        }
    }
    let format = g.format.unwrap_or(Format::Csv);
    emit(&tab.table.render(format, &g.canonical), g.out.as_deref())?;
    match unconverged {
        Some(msg) if g.strict => Err(CliError::NotConverged(msg)),
        _ => Ok(()),
    }
}
