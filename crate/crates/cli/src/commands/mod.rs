pub mod density;
pub mod figures;
pub mod moments;
pub mod sqw;

use diracwalk_core::walk::{coin1, Coin, COIN_NORM_TOL};
use diracwalk_core::linalg::Qubit;
use diracwalk_core::C64;

use crate::numparse::{parse_complex, parse_complex_list};
use crate::CliError;

/// Coin entries within this distance of `|a|^2 + |b|^2 = 1` are rescaled
/// onto the unit sphere, so truncated decimals like `0.70710678` work.
pub const COIN_RESCALE_TOL: f64 = 1e-6;

/// Parse a qubit with `N` components. Without `normalize` the norm must be 1.
pub fn parse_qubit<const N: usize>(s: &str, normalize: bool) -> Result<Qubit<N>, CliError> {
    let amps = parse_complex_list(s)?;
    if amps.len() != N {
        return Err(diracwalk_core::Error::QubitLength { expected: N, got: amps.len() }.into());
    }
    let arr: [C64; N] = amps.try_into().expect("length checked");
    Ok(if normalize { Qubit::normalized(arr)? } else { Qubit::new(arr)? })
}

/// Parse `a` and `b` of a one-dimensional coin.
pub fn parse_coin_entries(a: &str, b: &str) -> Result<(C64, C64), CliError> {
    let (a, b) = (parse_complex(a)?, parse_complex(b)?);
    let n = a.norm_sqr() + b.norm_sqr();
    let dev = (n - 1.0).abs();
    if dev > COIN_NORM_TOL && dev <= COIN_RESCALE_TOL {
        eprintln!("note: rescaling coin entries by 1/sqrt({n}) onto |a|^2 + |b|^2 = 1");
        let s = n.sqrt().recip();
        return Ok((a * s, b * s));
    }
    Ok((a, b))
}

pub fn parse_coin1(a: &str, b: &str) -> Result<Coin, CliError> {
    let (a, b) = parse_coin_entries(a, b)?;
    Ok(coin1(a, b)?)
}

pub fn require<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str, CliError> {
    v.as_deref().ok_or_else(|| CliError::Usage(format!("--{flag} is required here")))
}
