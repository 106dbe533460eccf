use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};

use clap::Args;
use diracwalk_core::laws::{dirac_mu, konno_mu, mu2, DiracLimitLaw, KonnoLaw};
use diracwalk_core::walk::{coin2, evolve, pseudovelocity_histogram};
use diracwalk_core::{PhysParams, Qubit2, Qubit4, C64};

use super::density::cell_centers;
use crate::config::Canonical;
use crate::output::{emit, Table};
use crate::CliError;

#[derive(Args, Debug, Clone)]
pub struct FiguresArgs {
    /// Figure number, 1..7.
    #[arg(long)]
    pub id: u32,
}

/// Grid sizes used for every figure.
pub const CURVE_POINTS: usize = 400;
pub const SURFACE_POINTS: usize = 100;
pub const HISTOGRAM_BINS: usize = 80;
/// Steps for the empirical two-dimensional walk panels.
pub const WALK_STEPS: u32 = 200;

pub struct Panel {
    pub file: String,
    /// Caption parameters, recorded in the CSV comment line.
    pub params: Vec<(&'static str, String)>,
    pub table: Table,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn konno_curve(a_abs: f64) -> Table {
    let mut t = Table::new(&["v", "mu"]);
    for v in cell_centers(-a_abs, a_abs, CURVE_POINTS) {
        t.push(vec![v, konno_mu(v, a_abs)]);
    }
    t
}

fn konno_weighted(law: &KonnoLaw) -> Table {
    let aa = law.a_abs();
    let mut t = Table::new(&["v", "nu"]);
    for v in cell_centers(-aa, aa, CURVE_POINTS) {
        t.push(vec![v, law.density(v)]);
    }
    t
}

fn mu2_surface(p: f64) -> Table {
    let mut t = Table::new(&["v1", "v2", "mu"]);
    let (r1, r2) = (p.sqrt(), (1.0 - p).sqrt());
    for v1 in cell_centers(-r1, r1, SURFACE_POINTS) {
        for v2 in cell_centers(-r2, r2, SURFACE_POINTS) {
            t.push(vec![v1, v2, mu2(v1, v2, p)]);
        }
    }
    t
}

fn dirac_radial(ratio: f64) -> Table {
    let pp = PhysParams::default();
    let mut t = Table::new(&["v", "mu"]);
    for i in 0..500 {
        let v = i as f64 / 500.0;
        t.push(vec![v, dirac_mu(3, v, ratio, &pp)]);
    }
    t
}

fn dirac_weighted(d: usize, ratio: f64, q: &Qubit4) -> Result<Table, CliError> {
    let law = DiracLimitLaw::new(d, ratio, q, PhysParams::default())?;
    let vm = law.support_radius();
    let n = if d == 1 { CURVE_POINTS } else { SURFACE_POINTS };
    let centers = cell_centers(-vm, vm, n);
    Ok(if d == 1 {
        let mut t = Table::new(&["v", "nu"]);
        for &v in &centers {
            t.push(vec![v, law.density(&[v])]);
        }
        t
    } else {
        let mut t = Table::new(&["v1", "v2", "nu"]);
        for &v1 in &centers {
            for &v2 in &centers {
                t.push(vec![v1, v2, law.density(&[v1, v2])]);
            }
        }
        t
    })
}

/// Empirical pseudovelocity density of the two-dimensional walk.
fn walk_histogram(p: f64, q: &Qubit4) -> Result<Table, CliError> {
    let s = evolve(q, &coin2(p)?, WALK_STEPS)?;
    let h = pseudovelocity_histogram(&s, HISTOGRAM_BINS)?;
    let centers = h.centers();
    let area = (2.0 / HISTOGRAM_BINS as f64).powi(2);
    let mut t = Table::new(&["v1", "v2", "density"]);
    for (idx, m) in h.masses.iter().enumerate() {
        t.push(vec![centers[idx / HISTOGRAM_BINS], centers[idx % HISTOGRAM_BINS], m / area]);
    }
    Ok(t)
}

fn s(x: &str) -> String {
    x.to_string()
}

pub fn panels(id: u32) -> Result<Vec<Panel>, CliError> {
    let h = FRAC_1_SQRT_2;
    let r8 = 8f64.sqrt().recip();
    Ok(match id {
        1 => vec![Panel { file: s("fig1.csv"), params: vec![("a", s("1/sqrt(2)"))], table: konno_curve(h) }],
        2 => vec![Panel { file: s("fig2.csv"), params: vec![("p", s("1/2"))], table: mu2_surface(0.5) }],
        3 => vec![
            Panel { file: s("fig3_lambda1.csv"), params: vec![("d", s("3")), ("lambda", s("1"))], table: dirac_radial(1.0) },
            Panel { file: s("fig3_lambda10.csv"), params: vec![("d", s("3")), ("lambda", s("10"))], table: dirac_radial(10.0) },
        ],
        4 => {
            let qa = Qubit4::new([c(0.5, 0.0), c(0.0, -0.5), c(-0.5, 0.0), c(0.0, 0.5)])?;
            let qb = Qubit4::new([c(h, 0.0), c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0)])?;
            vec![
                Panel {
                    file: s("fig4a.csv"),
                    params: vec![("p", s("1/2")), ("qubit", s("1/2,-i/2,-1/2,i/2")), ("t", WALK_STEPS.to_string())],
                    table: walk_histogram(0.5, &qa)?,
                },
                Panel {
                    file: s("fig4b.csv"),
                    params: vec![("lambda", s("1")), ("qubit", s("1/sqrt(2),1/sqrt(2),0,0"))],
                    table: dirac_weighted(2, 1.0, &qb)?,
                },
            ]
        }
        5 => {
            let qa = Qubit4::new([c(0.5, 0.0), c(0.0, 0.5), c(0.0, 0.5), c(-0.5, 0.0)])?;
            let qb = Qubit4::new([c(-r8, -r8), c(-r8, -r8), c(r8, r8), c(r8, -r8)])?;
            vec![
                Panel {
                    file: s("fig5a.csv"),
                    params: vec![("p", s("1/2")), ("qubit", s("1/2,i/2,i/2,-1/2")), ("t", WALK_STEPS.to_string())],
                    table: walk_histogram(0.5, &qa)?,
                },
                Panel {
                    file: s("fig5b.csv"),
                    params: vec![("lambda", s("1")), ("qubit", s("-(1+i)/(2sqrt(2)),-(1+i)/(2sqrt(2)),(1+i)/(2sqrt(2)),(1-i)/(2sqrt(2))"))],
                    table: dirac_weighted(2, 1.0, &qb)?,
                },
            ]
        }
        6 => {
            let law = KonnoLaw::new(c(0.0, 0.7f64.sqrt()), c(0.0, 0.3f64.sqrt()), Qubit2::new([c(h, 0.0), c(0.0, h)])?)?;
            let qb = Qubit4::new([c(h, 0.0), c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0)])?;
            vec![
                Panel {
                    file: s("fig6a.csv"),
                    params: vec![("a", s("i sqrt(7/10)")), ("b", s("i sqrt(3/10)")), ("qubit", s("1/sqrt(2),i/sqrt(2)"))],
                    table: konno_weighted(&law),
                },
                Panel {
                    file: s("fig6b.csv"),
                    params: vec![("lambda", s("3")), ("qubit", s("1/sqrt(2),1/sqrt(2),0,0"))],
                    table: dirac_weighted(1, 3.0, &qb)?,
                },
            ]
        }
        7 => {
            let r5 = 5f64.sqrt().recip();
            let r10 = 10f64.sqrt().recip();
            let law = KonnoLaw::new(c(0.7f64.sqrt(), 0.0), c(0.0, 0.3f64.sqrt()), Qubit2::new([c(r5, 0.0), c(0.0, 2.0 * r5)])?)?;
            let qb = Qubit4::new([c(r10, 0.0), c(r10, 0.0), c(2.0 * r10, 0.0), c(2.0 * r10, 0.0)])?;
            vec![
                Panel {
                    file: s("fig7a.csv"),
                    params: vec![("a", s("sqrt(7/10)")), ("b", s("i sqrt(3/10)")), ("qubit", s("1/sqrt(5),2i/sqrt(5)"))],
                    table: konno_weighted(&law),
                },
                Panel {
                    file: s("fig7b.csv"),
                    params: vec![("lambda", s("3")), ("qubit", s("1/sqrt(10),1/sqrt(10),2/sqrt(10),2/sqrt(10)"))],
                    table: dirac_weighted(1, 3.0, &qb)?,
                },
            ]
        }
        other => return Err(CliError::Usage(format!("unknown figure id {other}; expected 1..7"))),
    })
}

pub fn write_panels(id: u32, dir: &Path, canonical: &Canonical) -> Result<Vec<PathBuf>, CliError> {
    let mut written = vec![];
    for p in panels(id)? {
        let mut cfg = canonical.clone();
        cfg.values.insert("panel".into(), p.file.trim_end_matches(".csv").to_string());
        for (k, v) in &p.params {
            cfg.values.insert(k.to_string(), v.replace(' ', ""));
        }
        let path = dir.join(&p.file);
        emit(&p.table.to_csv(&cfg), Some(&path))?;
        written.push(path);
    }
    Ok(written)
}

pub fn run(a: &FiguresArgs, g: &crate::Global) -> Result<(), CliError> {
    if g.format == Some(crate::output::Format::Json) {
        return Err(CliError::Usage("figures writes CSV files only".into()));
    }
    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
    for p in write_panels(a.id, &dir, &g.canonical)? {
        println!("{}", p.display());
    }
    Ok(())
}
