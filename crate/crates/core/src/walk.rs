//! Discrete-time simple quantum walk on `Z^d`, `d = 1, 2`.
//!
//! One step applies the coin at every site and then translates component
//! `2j-1` (the `e^{+i k_j}` entry of the shift) by `-e_j` and component `2j`
//! by `+e_j`. This is the direction fixed by the Fourier pair
//! `Psi(x) = int dk/2pi e^{i k.x} Psi^(k)`: the moment formula with
//! `i d/dk` acting on `e^{i k t}` gives `<X> = -t`.
//!
//! The state is stored densely on the box `[-R, R]^d` with `R = t`, which
//! contains the whole `L^1` light cone; amplitudes are never pruned.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{check_unitary, Mat2, Mat4, Qubit, C64, I, ZERO};
use crate::quadrature::pairwise_sum;
use crate::MultiIndex;

/// Tolerance on `|a|^2 + |b|^2 = 1` for the one-dimensional coin.
pub const COIN_NORM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coin {
    /// `[[a, b], [-conj(b), conj(a)]]`.
    OneDim { a: C64, b: C64, matrix: Mat2 },
    /// The `p`-parameterized 4x4 die.
    TwoDim { p: f64, matrix: Mat4 },
}

/// One-dimensional coin with rows `(a, b)` and `(-conj b, conj a)`.
///
/// `a = 0` is accepted here (it is a valid walk) but has no Konno limit law.
pub fn coin1(a: C64, b: C64) -> Result<Coin> {
    let n = a.norm_sqr() + b.norm_sqr();
    if !n.is_finite() || (n - 1.0).abs() > COIN_NORM_TOL {
        return Err(Error::CoinNotUnitary { norm_sqr: n });
    }
    let matrix = Mat2::from_rows([[a, b], [-b.conj(), a.conj()]]);
    Ok(Coin::OneDim { a, b, matrix })
}

/// Two-dimensional coin for `p` in `(0, 1)`.
pub fn coin2(p: f64) -> Result<Coin> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::CoinParameter(p));
    }
    let s = C64::from((p * (1.0 - p)).sqrt());
    let (pp, qq) = (C64::from(p), C64::from(1.0 - p));
    let matrix = Mat4::from_rows([
        [-pp, qq, s, s],
        [qq, -pp, s, s],
        [s, s, -qq, pp],
        [s, s, pp, -qq],
    ]);
    Ok(Coin::TwoDim { p, matrix })
}

impl Coin {
    pub fn dim(&self) -> usize {
        match self {
            Coin::OneDim { .. } => 1,
            Coin::TwoDim { .. } => 2,
        }
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        match self {
            Coin::OneDim { matrix, .. } => check_unitary(matrix, tol),
            Coin::TwoDim { matrix, .. } => check_unitary(matrix, tol),
        }
    }

    fn apply(&self, v: &[C64], out: &mut [C64]) {
        match self {
            Coin::OneDim { matrix, .. } => {
                let r = matrix.mul_vec(&[v[0], v[1]]);
                out.copy_from_slice(&r);
            }
            Coin::TwoDim { matrix, .. } => {
                let r = matrix.mul_vec(&[v[0], v[1], v[2], v[3]]);
                out.copy_from_slice(&r);
            }
        }
    }

    /// One-step evolution matrix in wave-number space, `S(k) A`, written
    /// into `out` (row-major, `2d x 2d`).
    fn step_matrix(&self, k: &[f64]) -> Vec<C64> {
        let n = 2 * self.dim();
        let mut out = vec![ZERO; n * n];
        for j in 0..self.dim() {
            let plus = C64::from_polar(1.0, k[j]);
            let minus = plus.conj();
            for c in 0..n {
                out[(2 * j) * n + c] = plus * self.entry(2 * j, c);
                out[(2 * j + 1) * n + c] = minus * self.entry(2 * j + 1, c);
            }
        }
        out
    }

    fn entry(&self, r: usize, c: usize) -> C64 {
        match self {
            Coin::OneDim { matrix, .. } => matrix[(r, c)],
            Coin::TwoDim { matrix, .. } => matrix[(r, c)],
        }
    }
}

/// Wavefunction of the walker at integer time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkState {
    dim: usize,
    t: u32,
    /// Half-width `R` of the stored box `[-R, R]^d`.
    radius: i64,
    /// `(2R+1)^d` sites times `2d` components.
    amps: Vec<C64>,
}

impl WalkState {
    /// All amplitude at the origin with internal state `q`.
    pub fn at_origin<const N: usize>(q: &Qubit<N>) -> Result<Self> {
        let dim = match N {
            2 => 1,
            4 => 2,
            _ => return Err(Error::UnsupportedDimension(N / 2)),
        };
        Ok(WalkState { dim, t: 0, radius: 0, amps: q.amplitudes().to_vec() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn time(&self) -> u32 {
        self.t
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    fn width(&self) -> i64 {
        2 * self.radius + 1
    }

    fn components(&self) -> usize {
        2 * self.dim
    }

    fn site_index(&self, x: &[i64]) -> Option<usize> {
        let w = self.width();
        let mut idx = 0i64;
        for &xj in x {
            if xj.abs() > self.radius {
                return None;
            }
            idx = idx * w + (xj + self.radius);
        }
        Some(idx as usize)
    }

    fn site_of(&self, mut idx: usize) -> Vec<i64> {
        let w = self.width() as usize;
        let mut x = vec![0i64; self.dim];
        for j in (0..self.dim).rev() {
            x[j] = (idx % w) as i64 - self.radius;
            idx /= w;
        }
        x
    }

    /// Amplitude vector at site `x`; `None` outside the stored box.
    pub fn amplitude(&self, x: &[i64]) -> Option<&[C64]> {
        if x.len() != self.dim {
            return None;
        }
        let n = self.components();
        self.site_index(x).map(|i| &self.amps[i * n..(i + 1) * n])
    }

    /// Sites carrying a nonzero amplitude, with their amplitude vectors.
    pub fn occupied(&self) -> impl Iterator<Item = (Vec<i64>, &[C64])> + '_ {
        let n = self.components();
        self.amps
            .chunks(n)
            .enumerate()
            .filter(|(_, a)| a.iter().any(|z| *z != ZERO))
            .map(move |(i, a)| (self.site_of(i), a))
    }

    pub fn total_probability(&self) -> f64 {
        let per_site: Vec<f64> = self.amps.chunks(self.components()).map(|a| a.iter().map(|z| z.norm_sqr()).sum()).collect();
        pairwise_sum(&per_site)
    }
}

/// One time step: coin at every site, then the conditional shift.
pub fn step(s: &WalkState, coin: &Coin) -> Result<WalkState> {
    if s.dim != coin.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim, got: coin.dim() });
    }
    let n = s.components();
    let mut coined = vec![ZERO; s.amps.len()];
    coined.par_chunks_mut(n).zip(s.amps.par_chunks(n)).for_each(|(out, inp)| coin.apply(inp, out));

    let radius = s.radius + 1;
    let w = 2 * radius + 1;
    let sites = (w as usize).pow(s.dim as u32);
    let mut amps = vec![ZERO; sites * n];
    let old_w = s.width();
    let dim = s.dim;
    amps.par_chunks_mut(n).enumerate().for_each(|(idx, out)| {
        let mut y = [0i64; 2];
        let mut rem = idx as i64;
        for j in (0..dim).rev() {
            y[j] = rem % w - radius;
            rem /= w;
        }
        for j in 0..dim {
            // component 2j arrives from y + e_j, component 2j+1 from y - e_j
            for (comp, delta) in [(2 * j, 1i64), (2 * j + 1, -1i64)] {
                let mut src = 0i64;
                let mut inside = true;
                for l in 0..dim {
                    let xl = if l == j { y[l] + delta } else { y[l] };
                    if xl.abs() > s.radius {
                        inside = false;
                        break;
                    }
                    src = src * old_w + (xl + s.radius);
                }
                if inside {
                    out[comp] = coined[src as usize * n + comp];
                }
            }
        }
    });
    Ok(WalkState { dim, t: s.t + 1, radius, amps })
}

/// Evolve the walker from the origin with internal state `q` for `t` steps.
pub fn evolve<const N: usize>(q: &Qubit<N>, coin: &Coin, t: u32) -> Result<WalkState> {
    let mut s = WalkState::at_origin(q)?;
    if s.dim != coin.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim, got: coin.dim() });
    }
    for _ in 0..t {
        s = step(&s, coin)?;
    }
    Ok(s)
}

/// Position distribution `P(x, t) = ||Psi(x, t)||^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    dim: usize,
    t: u32,
    radius: i64,
    probs: Vec<f64>,
}

pub fn distribution(s: &WalkState) -> Distribution {
    let probs = s.amps.chunks(s.components()).map(|a| a.iter().map(|z| z.norm_sqr()).sum()).collect();
    Distribution { dim: s.dim, t: s.t, radius: s.radius, probs }
}

impl Distribution {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn time(&self) -> u32 {
        self.t
    }

    pub fn get(&self, x: &[i64]) -> f64 {
        if x.len() != self.dim || x.iter().any(|xj| xj.abs() > self.radius) {
            return 0.0;
        }
        let w = 2 * self.radius + 1;
        let idx = x.iter().fold(0i64, |acc, xj| acc * w + (xj + self.radius));
        self.probs[idx as usize]
    }

    /// `(site, probability)` for every site with nonzero probability, in
    /// lexicographic site order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, f64)> + '_ {
        let w = 2 * self.radius + 1;
        self.probs.iter().enumerate().filter(|(_, p)| **p > 0.0).map(move |(i, &p)| {
            let mut x = vec![0i64; self.dim];
            let mut rem = i as i64;
            for j in (0..self.dim).rev() {
                x[j] = rem % w - self.radius;
                rem /= w;
            }
            (x, p)
        })
    }

    pub fn total(&self) -> f64 {
        pairwise_sum(&self.probs)
    }

    /// Probability of the pseudovelocities `x / t` satisfying `pred`.
    pub fn pseudovelocity_mass<F: Fn(&[f64]) -> bool>(&self, pred: F) -> Result<f64> {
        if self.t == 0 {
            return Err(Error::ZeroTime);
        }
        let t = self.t as f64;
        let masses: Vec<f64> = self
            .iter()
            .filter_map(|(x, p)| {
                let v: Vec<f64> = x.iter().map(|&xj| xj as f64 / t).collect();
                pred(&v).then_some(p)
            })
            .collect();
        Ok(pairwise_sum(&masses))
    }
}

/// Joint moment `sum_x prod_j x_j^{alpha_j} P(x, t)` by direct summation.
pub fn moment(s: &WalkState, alpha: &MultiIndex) -> Result<f64> {
    alpha.check_dim(s.dim)?;
    let d = distribution(s);
    let terms: Vec<f64> = d
        .iter()
        .map(|(x, p)| {
            let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
            alpha.monomial(&xf) * p
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Options for the wave-number-space moment evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KGrid {
    /// Points per axis; `None` picks `16 (t + 1)` rounded up to a power of two.
    pub points: Option<usize>,
    /// Half-width `m` of the central first-derivative stencil (order `2m`).
    pub stencil: usize,
    /// Allowed disagreement between the `N` and `2N` evaluations, relative
    /// to `max(1, |value|)`.
    pub tol: f64,
}

impl Default for KGrid {
    fn default() -> Self {
        KGrid { points: None, stencil: 8, tol: 1e-6 }
    }
}

/// Weights `c_s`, `s = 1..=m`, of the order-`2m` central first derivative
/// `f'(x) ~ sum_s c_s (f(x + s h) - f(x - s h)) / h`.
pub fn central_first_derivative_weights(m: usize) -> Vec<f64> {
    let fact = |n: usize| (1..=n).fold(1.0f64, |acc, k| acc * k as f64);
    (1..=m)
        .map(|s| {
            let sign = if s % 2 == 1 { 1.0 } else { -1.0 };
            sign * fact(m) * fact(m) / (s as f64 * fact(m - s) * fact(m + s))
        })
        .collect()
}

fn kspace_moment_on_grid<const N: usize>(q: &Qubit<N>, coin: &Coin, t: u32, alpha: &MultiIndex, n: usize, stencil: usize) -> f64 {
    let d = coin.dim();
    let comps = 2 * d;
    let total = n.pow(d as u32);
    let h = 2.0 * PI / n as f64;
    let kval = |m: usize| -PI + h * m as f64;

    // Psi^(k, t) = (S(k) A)^t q on the periodic grid
    let mut psi: Vec<C64> = vec![ZERO; total * comps];
    psi.par_chunks_mut(comps).enumerate().for_each(|(idx, out)| {
        let k: Vec<f64> = if d == 1 { vec![kval(idx)] } else { vec![kval(idx / n), kval(idx % n)] };
        let v = coin.step_matrix(&k);
        let mut cur: Vec<C64> = q.amplitudes().to_vec();
        let mut next = vec![ZERO; comps];
        for _ in 0..t {
            for r in 0..comps {
                next[r] = (0..comps).map(|c| v[r * comps + c] * cur[c]).sum();
            }
            std::mem::swap(&mut cur, &mut next);
        }
        out.copy_from_slice(&cur);
    });

    // apply (i d/dk_j)^{alpha_j} with periodic central differences
    let weights = central_first_derivative_weights(stencil);
    let mut deriv = psi.clone();
    for (axis, &a) in alpha.0.iter().enumerate() {
        let stride = if d == 1 || axis == 1 { 1 } else { n };
        for _ in 0..a {
            let src = deriv.clone();
            deriv.par_chunks_mut(comps).enumerate().for_each(|(idx, out)| {
                let pos = (idx / stride) % n;
                let base = idx - pos * stride;
                for c in 0..comps {
                    let mut acc = ZERO;
                    for (s, w) in weights.iter().enumerate() {
                        let s = s + 1;
                        let fwd = base + ((pos + s) % n) * stride;
                        let bwd = base + ((pos + n - s) % n) * stride;
                        acc += (src[fwd * comps + c] - src[bwd * comps + c]) * *w;
                    }
                    out[c] = I * acc / h;
                }
            });
        }
    }
    let terms: Vec<f64> = psi
        .chunks(comps)
        .zip(deriv.chunks(comps))
        .map(|(p, dp)| p.iter().zip(dp).map(|(a, b)| (a.conj() * b).re).sum())
        .collect();
    pairwise_sum(&terms) / total as f64
}

/// Joint moment from the wave-number-space formula
/// `int dk/(2pi)^d Psi^dagger prod (i d/dk_j)^{alpha_j} Psi`, using a
/// periodic trapezoid grid and high-order central differences. The value at
/// `N` points per axis is checked against `2N`; disagreement beyond
/// `grid.tol` is a convergence failure.
pub fn moment_kspace<const N: usize>(q: &Qubit<N>, coin: &Coin, t: u32, alpha: &MultiIndex, grid: &KGrid) -> Result<f64> {
    let d = coin.dim();
    if N != 2 * d {
        return Err(Error::DimensionMismatch { expected: 2 * d, got: N });
    }
    alpha.check_dim(d)?;
    if grid.stencil == 0 {
        return Err(Error::InvalidParameter("stencil half-width must be positive".into()));
    }
    let n = grid.points.unwrap_or_else(|| (16 * (t as usize + 1)).next_power_of_two());
    if n < 2 * grid.stencil + 1 {
        return Err(Error::GridResolution(format!("{n} points cannot hold a {}-point stencil", 2 * grid.stencil + 1)));
    }
    let coarse = kspace_moment_on_grid(q, coin, t, alpha, n, grid.stencil);
    let fine = kspace_moment_on_grid(q, coin, t, alpha, 2 * n, grid.stencil);
    let scale = fine.abs().max(1.0);
    if (fine - coarse).abs() > grid.tol * scale {
        return Err(Error::Convergence(format!(
            "k-grid moment changed from {coarse} to {fine} between N = {n} and N = {}",
            2 * n
        )));
    }
    Ok(fine)
}

/// Histogram of the pseudovelocity `x / t` on `[-1, 1]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub dim: usize,
    pub bins: usize,
    /// Row-major masses, `bins^dim` entries.
    pub masses: Vec<f64>,
}

impl Histogram {
    /// Bin edges along each axis (`bins + 1` values from -1 to 1).
    pub fn edges(&self) -> Vec<f64> {
        (0..=self.bins).map(|k| -1.0 + 2.0 * k as f64 / self.bins as f64).collect()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.bins).map(|k| -1.0 + (2.0 * k as f64 + 1.0) / self.bins as f64).collect()
    }

    pub fn total(&self) -> f64 {
        pairwise_sum(&self.masses)
    }

    pub fn bin_of(&self, v: f64) -> usize {
        let k = ((v + 1.0) * 0.5 * self.bins as f64).floor();
        (k.max(0.0) as usize).min(self.bins - 1)
    }
}

pub fn pseudovelocity_histogram(s: &WalkState, bins: usize) -> Result<Histogram> {
    if s.t == 0 {
        return Err(Error::ZeroTime);
    }
    if bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    let mut h = Histogram { dim: s.dim, bins, masses: vec![0.0; bins.pow(s.dim as u32)] };
    let t = s.t as f64;
    for (x, p) in distribution(s).iter() {
        let idx = x.iter().fold(0usize, |acc, &xj| acc * bins + h.bin_of(xj as f64 / t));
        h.masses[idx] += p;
    }
    Ok(h)
}

/// Eigenphases `omega` of `V(k) = S(k) A` for a one-dimensional coin, with
/// eigenvalues `e^{i omega}`, sorted ascending in `(-pi, pi]`.
pub fn dispersion_sqw1(coin: &Coin, k: f64) -> Result<(f64, f64)> {
    if coin.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: coin.dim() });
    }
    let v = coin.step_matrix(&[k]);
    let tr = v[0] + v[3];
    let det = v[0] * v[3] - v[1] * v[2];
    let disc = (tr * tr - det * 4.0).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    let (a, b) = (l1.arg(), l2.arg());
    Ok(if a <= b { (a, b) } else { (b, a) })
}

/// Effective quasi-energies `E = -hbar omega` of `V(k) = e^{-i H(k) / hbar}`.
pub fn effective_energies(coin: &Coin, k: f64, hbar: f64) -> Result<(f64, f64)> {
    let (w1, w2) = dispersion_sqw1(coin, k)?;
    let (e1, e2) = (-hbar * w1, -hbar * w2);
    Ok(if e1 <= e2 { (e1, e2) } else { (e2, e1) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Qubit2, Qubit4, ONE};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn hadamard() -> Coin {
        coin1(C64::from(FRAC_1_SQRT_2), C64::from(FRAC_1_SQRT_2)).unwrap()
    }

    fn q10() -> Qubit2 {
        Qubit2::basis(0).unwrap()
    }

    #[test]
    fn coin1_shapes() {
        let c = hadamard();
        assert!(c.is_unitary(1e-12));
        match coin1(ONE, ZERO).unwrap() {
            Coin::OneDim { matrix, .. } => assert_eq!(matrix, Mat2::identity()),
            _ => unreachable!(),
        }
        let c = coin1(I * (0.7f64).sqrt(), I * (0.3f64).sqrt()).unwrap();
        assert!(c.is_unitary(1e-12));
        assert!(matches!(coin1(ONE, ONE), Err(Error::CoinNotUnitary { .. })));
        assert!(coin1(ZERO, ONE).is_ok());
    }

    #[test]
    fn coin2_half_sign_pattern() {
        let Coin::TwoDim { matrix, .. } = coin2(0.5).unwrap() else { unreachable!() };
        let signs = [[-1.0, 1.0, 1.0, 1.0], [1.0, -1.0, 1.0, 1.0], [1.0, 1.0, -1.0, 1.0], [1.0, 1.0, 1.0, -1.0]];
        for r in 0..4 {
            let mut row = 0.0;
            for c in 0..4 {
                assert!((matrix[(r, c)] - C64::from(0.5 * signs[r][c])).norm() < 1e-15);
                row += matrix[(r, c)].norm_sqr();
            }
            assert!((row - 1.0).abs() < 1e-15);
        }
        for p in [0.01, 0.3, 0.5, 0.77, 0.99] {
            assert!(coin2(p).unwrap().is_unitary(1e-12));
        }
        assert!(coin2(0.0).is_err());
        assert!(coin2(1.0).is_err());
    }

    #[test]
    fn ballistic_identity_coin_moves_left() {
        let c = coin1(ONE, ZERO).unwrap();
        let s = evolve(&q10(), &c, 7).unwrap();
        let d = distribution(&s);
        assert_eq!(d.get(&[-7]), 1.0);
        assert_eq!(moment(&s, &MultiIndex::new(&[1])).unwrap(), -7.0);
    }

    #[test]
    fn hadamard_one_and_two_steps() {
        let c = hadamard();
        let s1 = evolve(&q10(), &c, 1).unwrap();
        let d1 = distribution(&s1);
        assert!((d1.get(&[-1]) - 0.5).abs() < 1e-15);
        assert!((d1.get(&[1]) - 0.5).abs() < 1e-15);
        let s2 = step(&s1, &c).unwrap();
        let d2 = distribution(&s2);
        assert!((d2.get(&[-2]) - 0.25).abs() < 1e-15);
        assert!((d2.get(&[0]) - 0.5).abs() < 1e-15);
        assert!((d2.get(&[2]) - 0.25).abs() < 1e-15);
        assert_eq!(d2.get(&[1]), 0.0);
        assert!((moment(&s2, &MultiIndex::new(&[2])).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_steps_is_delta() {
        let q = Qubit2::new([C64::from(0.6), I * 0.8]).unwrap();
        let s = evolve(&q, &hadamard(), 0).unwrap();
        assert_eq!(s.amplitude(&[0]).unwrap(), q.amplitudes());
        assert_eq!(distribution(&s).iter().count(), 1);
        assert_eq!(moment(&s, &MultiIndex::zeros(1)).unwrap(), 1.0);
    }

    #[test]
    fn dimension_mismatch() {
        let s = WalkState::at_origin(&Qubit4::basis(0).unwrap()).unwrap();
        assert!(matches!(step(&s, &hadamard()), Err(Error::DimensionMismatch { .. })));
        assert!(evolve(&q10(), &coin2(0.5).unwrap(), 3).is_err());
        let s = evolve(&q10(), &hadamard(), 3).unwrap();
        assert!(moment(&s, &MultiIndex::new(&[1, 0])).is_err());
    }

    #[test]
    fn two_dim_support_in_l1_ball() {
        let q = Qubit4::new([C64::from(0.5), -I * 0.5, C64::from(-0.5), I * 0.5]).unwrap();
        let s = evolve(&q, &coin2(0.5).unwrap(), 12).unwrap();
        let d = distribution(&s);
        for (x, _) in d.iter() {
            assert!(x[0].abs() + x[1].abs() <= 12);
        }
        assert!((d.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kspace_matches_real_space() {
        let c = hadamard();
        let g = KGrid::default();
        let v = moment_kspace(&q10(), &c, 2, &MultiIndex::new(&[1]), &g).unwrap();
        assert!(v.abs() < 1e-9);
        let id = coin1(ONE, ZERO).unwrap();
        let v = moment_kspace(&q10(), &id, 5, &MultiIndex::new(&[1]), &g).unwrap();
        assert!((v + 5.0).abs() < 1e-9);
        let v = moment_kspace(&q10(), &c, 5, &MultiIndex::zeros(1), &g).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coarse_kgrid_fails_loudly() {
        let g = KGrid { points: Some(8), stencil: 1, tol: 1e-6 };
        let r = moment_kspace(&q10(), &hadamard(), 10, &MultiIndex::new(&[2]), &g);
        assert!(matches!(r, Err(Error::Convergence(_))), "{r:?}");
    }

    #[test]
    fn stencil_weights_low_order() {
        assert_eq!(central_first_derivative_weights(1), vec![0.5]);
        let w = central_first_derivative_weights(2);
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-15 && (w[1] + 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn histogram_examples() {
        let c = coin1(ONE, ZERO).unwrap();
        let s = evolve(&q10(), &c, 10).unwrap();
        let h = pseudovelocity_histogram(&s, 8).unwrap();
        assert_eq!(h.masses[0], 1.0);
        assert_eq!(h.masses.iter().filter(|m| **m > 0.0).count(), 1);

        let s = evolve(&q10(), &hadamard(), 2).unwrap();
        let h = pseudovelocity_histogram(&s, 4).unwrap();
        let want = [0.25, 0.0, 0.5, 0.25];
        for (m, w) in h.masses.iter().zip(want) {
            assert!((m - w).abs() < 1e-15);
        }
        assert!((h.total() - 1.0).abs() < 1e-15);
        assert_eq!(h.edges(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);

        let s0 = evolve(&q10(), &c, 0).unwrap();
        assert!(matches!(pseudovelocity_histogram(&s0, 4), Err(Error::ZeroTime)));
    }

    #[test]
    fn dispersion_examples() {
        let id = coin1(ONE, ZERO).unwrap();
        for k in [-2.0, -0.3, 0.7, 2.5] {
            let (a, b) = dispersion_sqw1(&id, k).unwrap();
            assert!((a + k.abs()).abs() < 1e-14 && (b - k.abs()).abs() < 1e-14);
        }
        let (a, b) = dispersion_sqw1(&hadamard(), 0.0).unwrap();
        assert!((a + PI / 4.0).abs() < 1e-14 && (b - PI / 4.0).abs() < 1e-14);
        let (e1, e2) = effective_energies(&hadamard(), 0.0, 1.0).unwrap();
        assert!((e1 + PI / 4.0).abs() < 1e-14 && (e2 - PI / 4.0).abs() < 1e-14);
    }
}
