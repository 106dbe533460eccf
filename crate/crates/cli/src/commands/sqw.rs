use clap::Args;
use diracwalk_core::walk::{coin2, distribution, evolve, moment, pseudovelocity_histogram, WalkState};
use diracwalk_core::MultiIndex;
use serde_json::json;

use super::{parse_coin1, parse_qubit, require};
use crate::numparse::parse_real;
use crate::output::{emit, Format, Table};
use crate::{CliError, Global};

#[derive(Args, Debug, Clone)]
pub struct SqwArgs {
    /// Lattice dimension, 1 or 2.
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Coin entry a (d = 1).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Coin entry b (d = 1).
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Coin parameter p in (0, 1) (d = 2).
    #[arg(long)]
    pub p: Option<String>,
    /// Initial qubit, 2d comma-separated complex components.
    #[arg(long, allow_hyphen_values = true)]
    pub qubit: String,
    /// Rescale the qubit to unit norm instead of rejecting it.
    #[arg(long)]
    pub normalize: bool,
    /// Number of steps.
    #[arg(long)]
    pub t: u32,
    /// Write a pseudovelocity histogram with this many bins per axis.
    #[arg(long)]
    pub histogram: Option<usize>,
}

pub fn simulate(a: &SqwArgs) -> Result<WalkState, CliError> {
    match a.d {
        1 => {
            let coin = parse_coin1(require(&a.a, "a")?, require(&a.b, "b")?)?;
            let q = parse_qubit::<2>(&a.qubit, a.normalize)?;
            Ok(evolve(&q, &coin, a.t)?)
        }
        2 => {
            let coin = coin2(parse_real(require(&a.p, "p")?)?)?;
            let q = parse_qubit::<4>(&a.qubit, a.normalize)?;
            Ok(evolve(&q, &coin, a.t)?)
        }
        d => Err(diracwalk_core::Error::UnsupportedDimension(d).into()),
    }
}

pub fn run(a: &SqwArgs, g: &Global) -> Result<(), CliError> {
    let s = simulate(a)?;
    let d = a.d;
    let axes: Vec<String> = (1..=d).map(|j| if d == 1 { String::new() } else { j.to_string() }).collect();
    let mut table = match a.histogram {
        Some(bins) => {
            let h = pseudovelocity_histogram(&s, bins)?;
            let mut cols: Vec<String> = axes.iter().map(|j| format!("v{j}")).collect();
            cols.push("mass".into());
            let mut t = Table { columns: cols, ..Default::default() };
            let c = h.centers();
            for (idx, &m) in h.masses.iter().enumerate() {
                let mut row = if d == 1 { vec![c[idx]] } else { vec![c[idx / bins], c[idx % bins]] };
                row.push(m);
                t.push(row);
            }
            t
        }
        None => {
            let mut cols: Vec<String> = axes.iter().map(|j| format!("x{j}")).collect();
            cols.push("prob".into());
            let mut t = Table { columns: cols, ..Default::default() };
            for (x, p) in distribution(&s).iter() {
                if p != 0.0 {
                    let mut row: Vec<f64> = x.iter().map(|&xi| xi as f64).collect();
                    row.push(p);
                    t.push(row);
                }
            }
            t
        }
    };
    let mut summary = vec![];
    if a.t > 0 {
        let tf = a.t as f64;
        for j in 0..d {
            let mut e = vec![0u32; d];
            e[j] = 1;
            let m1 = moment(&s, &MultiIndex::new(&e))? / tf;
            e[j] = 2;
            let m2 = moment(&s, &MultiIndex::new(&e))? / (tf * tf);
            let tag = if d == 1 { String::new() } else { (j + 1).to_string() };
            summary.push((format!("mean_v{tag}"), m1));
            summary.push((format!("mean_v{tag}_sq"), m2));
        }
    }
    summary.push(("total".into(), distribution(&s).total()));
    for (k, v) in &summary {
        table.notes.push((k.clone(), json!(v)));
    }
    let format = g.format.unwrap_or(Format::Csv);
    emit(&table.render(format, &g.canonical), g.out.as_deref())?;
    let line = summary.iter().map(|(k, v)| format!("{k} = {v}")).collect::<Vec<_>>().join(", ");
    if g.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}
