//! Free Dirac particle in momentum space with `d = 1..4` active momentum
//! components.
//!
//! `d` selects which gamma matrices carry momentum: `gamma_1` for `d = 1`,
//! `gamma_1, gamma_2` for `d = 2`, `gamma_1..gamma_3` for `d = 3`, and
//! `gamma_1..gamma_3, gamma_5` for `d = 4` (the fourth component plays the
//! role of `p_5`). The Hamiltonian is
//! `H(p) = gamma_4 (i c sum_k gamma_k p_k + m c^2)` and the unitary
//! Foldy-Wouthuysen-Tani matrix `U(p)` brings it to `E(p) gamma_4`.
//!
//! The initial state is a constant spinor `q` on the cutoff ball `|p| < lambda`
//! and zero outside; all moments are normalized by the ball volume.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linalg::{gamma, inner, norm_sqr, Mat4, PhysParams, Qubit4, C64, I, ZERO};
use crate::quadrature::{self, gauss_legendre, pairwise_sum, sphere_rule, unit_ball_volume, IntegrationResult, IntegrationSpec, Method};
use crate::MultiIndex;

fn check_dim(d: usize) -> Result<()> {
    if (1..=4).contains(&d) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

/// Momentum with `d` active components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Momentum {
    dim: usize,
    comps: [f64; 4],
}

impl Momentum {
    pub fn new(comps: &[f64]) -> Result<Self> {
        check_dim(comps.len())?;
        if comps.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("momentum components must be finite".into()));
        }
        let mut c = [0.0; 4];
        c[..comps.len()].copy_from_slice(comps);
        Ok(Momentum { dim: comps.len(), comps: c })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Momentum { dim, comps: [0.0; 4] })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[f64] {
        &self.comps[..self.dim]
    }

    pub fn norm(&self) -> f64 {
        self.components().iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Relativistic velocity with `d` components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Velocity {
    dim: usize,
    comps: [f64; 4],
}

impl Velocity {
    pub fn new(comps: &[f64]) -> Result<Self> {
        check_dim(comps.len())?;
        if comps.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("velocity components must be finite".into()));
        }
        let mut c = [0.0; 4];
        c[..comps.len()].copy_from_slice(comps);
        Ok(Velocity { dim: comps.len(), comps: c })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[f64] {
        &self.comps[..self.dim]
    }

    pub fn norm(&self) -> f64 {
        self.components().iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Ultraviolet cutoff `|p| < lambda` in `d` momentum dimensions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffBall {
    pub dim: usize,
    /// Cutoff momentum (momentum units).
    pub lambda: f64,
}

impl CutoffBall {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("cutoff must be positive, got {lambda}")));
        }
        Ok(CutoffBall { dim, lambda })
    }

    /// Cutoff from the dimensionless ratio `Lambda = lambda / (m c)`.
    pub fn from_ratio(dim: usize, ratio: f64, params: &PhysParams) -> Result<Self> {
        Self::new(dim, ratio * params.mc())
    }

    pub fn ratio(&self, params: &PhysParams) -> f64 {
        self.lambda / params.mc()
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim).expect("dimension checked at construction") * self.lambda.powi(self.dim as i32)
    }
}

/// Gamma matrices multiplying the active momentum components.
pub fn momentum_gammas(d: usize) -> Result<Vec<Mat4>> {
    check_dim(d)?;
    [1, 2, 3, 5].iter().take(d).map(|&nu| gamma(nu)).collect()
}

/// `E(p) = sqrt((p c)^2 + (m c^2)^2)`.
pub fn energy(p: &Momentum, params: &PhysParams) -> f64 {
    (p.norm() * params.c).hypot(params.rest_energy())
}

fn energy_of_norm(pn: f64, params: &PhysParams) -> f64 {
    (pn * params.c).hypot(params.rest_energy())
}

/// `i c sum_k gamma_k p_k`.
fn momentum_term(p: &Momentum, params: &PhysParams) -> Mat4 {
    let gs = momentum_gammas(p.dim).expect("momentum dimension validated");
    gs.iter()
        .zip(p.components())
        .fold(Mat4::zeros(), |acc, (g, &pk)| acc + g.scale(I * (params.c * pk)))
}

pub fn hamiltonian(p: &Momentum, params: &PhysParams) -> Mat4 {
    let g4 = gamma(4).expect("gamma_4");
    g4 * (momentum_term(p, params) + Mat4::identity().scale(C64::from(params.rest_energy())))
}

/// Foldy-Wouthuysen-Tani matrix
/// `U(p) = (sqrt(E + mc^2) I + i c sum_k gamma_k p_k / sqrt(E + mc^2)) / sqrt(2E)`.
pub fn fwt_matrix(p: &Momentum, params: &PhysParams) -> Mat4 {
    let e = energy(p, params);
    let s = (e + params.rest_energy()).sqrt();
    let scale = 1.0 / (2.0 * e).sqrt();
    (Mat4::identity().scale(C64::from(s)) + momentum_term(p, params).scale(C64::from(1.0 / s))).scale(C64::from(scale))
}

/// Energy, FWT matrix and projection coefficients `C_j = w_j q` at one
/// momentum, where `w_j` is the `j`-th row of `U(p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralData {
    pub energy: f64,
    pub u: Mat4,
    pub coeffs: [C64; 4],
}

impl SpectralData {
    pub fn new(q: &Qubit4, p: &Momentum, params: &PhysParams) -> Self {
        let u = fwt_matrix(p, params);
        SpectralData { energy: energy(p, params), u, coeffs: u.mul_vec(q.amplitudes()) }
    }

    /// Row `w_j(p)` of `U(p)`, `j = 0..4`.
    pub fn row(&self, j: usize) -> [C64; 4] {
        self.u.row(j)
    }

    /// `|C_1|^2 + |C_2|^2`.
    pub fn positive_weight(&self) -> f64 {
        self.coeffs[0].norm_sqr() + self.coeffs[1].norm_sqr()
    }

    /// `|C_3|^2 + |C_4|^2`.
    pub fn negative_weight(&self) -> f64 {
        self.coeffs[2].norm_sqr() + self.coeffs[3].norm_sqr()
    }
}

/// Projection coefficients `C_j(p)`.
pub fn coefficients(q: &Qubit4, p: &Momentum, params: &PhysParams) -> [C64; 4] {
    fwt_matrix(p, params).mul_vec(q.amplitudes())
}

fn phases(e: f64, t: f64, hbar: f64) -> [C64; 4] {
    let m = C64::from_polar(1.0, -e * t / hbar);
    [m, m, m.conj(), m.conj()]
}

/// Closed-form `Psi^(p, t) = e^{-iEt/hbar}(w_1 C_1 + w_2 C_2) + e^{iEt/hbar}(w_3 C_3 + w_4 C_4)`
/// with `w_j` entering as conjugate-transposed rows of `U(p)`.
pub fn evolve_spinor(q: &Qubit4, p: &Momentum, t: f64, params: &PhysParams) -> [C64; 4] {
    let sd = SpectralData::new(q, p, params);
    let ph = phases(sd.energy, t, params.hbar);
    let mut out = [ZERO; 4];
    for j in 0..4 {
        let w = sd.row(j);
        let amp = ph[j] * sd.coeffs[j];
        for (o, wk) in out.iter_mut().zip(w) {
            *o += wk.conj() * amp;
        }
    }
    out
}

/// `e^{-iHt/hbar} q` from `H^2 = E^2`: `cos(Et/hbar) q - i sin(Et/hbar) H q / E`.
pub fn evolve_spinor_exp(q: &Qubit4, p: &Momentum, t: f64, params: &PhysParams) -> [C64; 4] {
    let e = energy(p, params);
    let h = hamiltonian(p, params);
    let hq = h.mul_vec(q.amplitudes());
    let (s, c) = (e * t / params.hbar).sin_cos();
    let mut out = [ZERO; 4];
    for k in 0..4 {
        out[k] = q.amplitudes()[k] * c - I * hq[k] * (s / e);
    }
    out
}

/// One-step walk matrix `V(p) = U^{-1} diag(e^{-iE/hbar} x2, e^{iE/hbar} x2) U`.
pub fn walk_matrix(p: &Momentum, params: &PhysParams) -> Mat4 {
    let u = fwt_matrix(p, params);
    let e = energy(p, params);
    u.dagger() * Mat4::diag(phases(e, 1.0, params.hbar)) * u
}

/// `v_j = c^2 p_j / E(p)`.
pub fn momentum_to_velocity(p: &Momentum, params: &PhysParams) -> Velocity {
    let e = energy(p, params);
    let mut comps = [0.0; 4];
    for (v, pk) in comps.iter_mut().zip(p.components()) {
        *v = params.c * params.c * pk / e;
    }
    Velocity { dim: p.dim, comps }
}

/// `p_j = m v_j / sqrt(1 - v^2/c^2)`; fails for `|v| >= c`.
pub fn velocity_to_momentum(v: &Velocity, params: &PhysParams) -> Result<Momentum> {
    let speed = v.norm();
    if speed >= params.c {
        return Err(Error::Superluminal { speed, c: params.c });
    }
    let gamma = 1.0 / (1.0 - (speed / params.c).powi(2)).sqrt();
    let mut comps = [0.0; 4];
    for (p, vk) in comps.iter_mut().zip(v.components()) {
        *p = params.mass * vk * gamma;
    }
    Ok(Momentum { dim: v.dim, comps })
}

/// `det(dv_j / dp_k) = (c^2 / E)^d (m c^2 / E)^2`; for `d = 3` this is
/// `c^10 m^2 / E^5`.
pub fn jacobian(p: &Momentum, params: &PhysParams) -> f64 {
    let e = energy(p, params);
    (params.c * params.c / e).powi(p.dim as i32) * (params.rest_energy() / e).powi(2)
}

/// The same Jacobian in velocity form, `(1 - v^2/c^2)^{(d+2)/2} / m^d`.
pub fn jacobian_from_velocity(v: &Velocity, params: &PhysParams) -> f64 {
    let beta2 = (v.norm() / params.c).powi(2);
    (1.0 - beta2).powf((v.dim as f64 + 2.0) / 2.0) / params.mass.powi(v.dim as i32)
}

/// Default quadrature settings for ball moments: spherical-product rule,
/// tolerance relative to the normalized moment.
pub fn default_moment_spec() -> IntegrationSpec {
    IntegrationSpec::new(Method::SphericalProduct, 1e-11)
}

/// Integrate `f` over the cutoff ball and divide by its volume; `spec.tol`
/// applies to the normalized value.
fn ball_average<F>(f: F, ball: &CutoffBall, spec: &IntegrationSpec) -> Result<IntegrationResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let vol = ball.volume();
    let scaled = IntegrationSpec { tol: spec.tol * vol, ..spec.clone() };
    let mut r = quadrature::integrate_ball(f, ball.dim, ball.lambda, &scaled)?;
    r.value /= vol;
    r.error /= vol;
    Ok(r)
}

/// Long-time limit of `<prod V_j^{alpha_j}>`:
/// the ball average of `[|C1|^2 + |C2|^2 + (-1)^{|alpha|}(|C3|^2 + |C4|^2)] prod (dE/dp_j)^{alpha_j}`
/// with `dE/dp_j = c^2 p_j / E`.
pub fn asymptotic_moment(
    q: &Qubit4,
    alpha: &MultiIndex,
    ball: &CutoffBall,
    params: &PhysParams,
    spec: &IntegrationSpec,
) -> Result<IntegrationResult> {
    alpha.check_dim(ball.dim)?;
    if alpha.is_zero() {
        return Ok(IntegrationResult { value: 1.0, error: 0.0, evaluations: 0, converged: true });
    }
    let sign = if alpha.total().is_multiple_of(2) { 1.0 } else { -1.0 };
    let c2 = params.c * params.c;
    let f = |x: &[f64]| {
        let p = Momentum::new(x).expect("finite quadrature node");
        let sd = SpectralData::new(q, &p, params);
        let weight = sd.positive_weight() + sign * sd.negative_weight();
        let grad: Vec<f64> = x.iter().map(|pk| c2 * pk / sd.energy).collect();
        weight * alpha.monomial(&grad)
    };
    ball_average(f, ball, spec)
}

/// Finite-difference and quadrature settings for [`finite_time_moment`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteTimeGrid {
    /// Finite-difference step in momentum; `None` picks
    /// `0.02 hbar / (c t)` capped at `lambda / 100`.
    pub step: Option<f64>,
    /// Upper bound on `h t max|dE/dp| / hbar`, the phase advance per step.
    pub max_phase_per_step: f64,
    /// Gauss-Legendre nodes per radial panel.
    pub nodes_per_panel: usize,
    /// Sphere-rule order for `d >= 2`.
    pub angular_order: usize,
}

impl Default for FiniteTimeGrid {
    fn default() -> Self {
        FiniteTimeGrid { step: None, max_phase_per_step: 0.05, nodes_per_panel: 16, angular_order: 12 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteTimeMoment {
    /// `<prod V_j^{alpha_j}>` at time `t`, restricted to the interior region.
    pub value: f64,
    /// Probability in the boundary shell excluded from differentiation.
    pub excluded_shell_mass: f64,
    /// Radius of the interior region.
    pub interior_radius: f64,
    pub step: f64,
    pub evaluations: usize,
}

/// Finite-difference weights (Fornberg) for the `order`-th derivative at 0
/// from nodes `-half..=half` with unit spacing.
pub fn fd_weights(order: usize, half: usize) -> Vec<f64> {
    let nodes: Vec<f64> = (-(half as i64)..=half as i64).map(|k| k as f64).collect();
    let n = nodes.len();
    let m = order;
    // c[j][k]: weight of node j for derivative k
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

/// Composite Gauss-Legendre nodes on `[a, b]` with panels of width at most
/// `max_width`.
fn composite_gl(a: f64, b: f64, max_width: f64, nodes: usize) -> Vec<(f64, f64)> {
    let panels = ((b - a) / max_width).ceil().max(1.0) as usize;
    let (x, w) = gauss_legendre(nodes);
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * nodes);
    for k in 0..panels {
        let lo = a + width * k as f64;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((lo + 0.5 * width * (xi + 1.0), 0.5 * width * wi));
        }
    }
    out
}

/// Position moments of the cutoff wave packet at finite time `t`, divided by
/// `t^{|alpha|}`: the ball average of
/// `Re Psi^dagger prod (i hbar d/dp_j)^{alpha_j} Psi`.
///
/// Derivatives are central differences of the closed-form `Psi^(p, t)` and
/// are only taken on `|p| < lambda - 2h`; the mass of the excluded shell is
/// reported. The sharp cutoff makes `Psi^` discontinuous at `|p| = lambda`,
/// so the boundary contributions are not part of the value.
pub fn finite_time_moment(
    q: &Qubit4,
    alpha: &MultiIndex,
    ball: &CutoffBall,
    t: f64,
    grid: &FiniteTimeGrid,
    params: &PhysParams,
) -> Result<FiniteTimeMoment> {
    alpha.check_dim(ball.dim)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
    }
    let d = ball.dim;
    let lambda = ball.lambda;
    let vmax = params.c * params.c * lambda / energy_of_norm(lambda, params);
    let h = grid.step.unwrap_or_else(|| (0.02 * params.hbar / (params.c * t)).min(lambda / 100.0));
    let phase_per_step = h * t * vmax / params.hbar;
    if !(h > 0.0) || phase_per_step > grid.max_phase_per_step {
        return Err(Error::GridResolution(format!(
            "step {h} advances the phase by {phase_per_step:.3} rad per step at t = {t} (limit {})",
            grid.max_phase_per_step
        )));
    }
    let r_in = lambda - 2.0 * h;
    if r_in <= 0.0 {
        return Err(Error::GridResolution(format!("step {h} leaves no interior inside lambda = {lambda}")));
    }
    let excluded_shell_mass = 1.0 - (r_in / lambda).powi(d as i32);

    // one stencil per axis
    let stencils: Vec<Vec<(i64, f64)>> = alpha
        .0
        .iter()
        .map(|&a| {
            let a = a as usize;
            if a == 0 {
                return vec![(0, 1.0)];
            }
            let half = 4 + a / 2;
            fd_weights(a, half)
                .into_iter()
                .enumerate()
                .filter(|(_, w)| *w != 0.0)
                .map(|(k, w)| (k as i64 - half as i64, w / h.powi(a as i32)))
                .collect()
        })
        .collect();
    let prefactor = (I * params.hbar).powu(alpha.total());

    let integrand = |x: &[f64]| -> f64 {
        let p = Momentum::new(x).expect("finite node");
        let psi = evolve_spinor(q, &p, t, params);
        let mut acc = [ZERO; 4];
        let mut offs = [0i64; 4];
        // iterate over the tensor stencil
        let sizes: Vec<usize> = stencils.iter().map(|s| s.len()).collect();
        let total: usize = sizes.iter().product();
        for flat in 0..total {
            let mut rem = flat;
            let mut w = 1.0;
            for j in 0..d {
                let (o, wj) = stencils[j][rem % sizes[j]];
                rem /= sizes[j];
                offs[j] = o;
                w *= wj;
            }
            let mut shifted = [0.0; 4];
            for j in 0..d {
                shifted[j] = x[j] + offs[j] as f64 * h;
            }
            let pp = Momentum::new(&shifted[..d]).expect("finite node");
            let v = evolve_spinor(q, &pp, t, params);
            for k in 0..4 {
                acc[k] += v[k] * w;
            }
        }
        let dpsi = acc.map(|z| z * prefactor);
        inner(&psi, &dpsi).re
    };

    // radial panels narrow enough to follow the oscillation e^{-2iEt/hbar}
    let panel = (PI * params.hbar / (2.0 * vmax * t + 1e-300)).min(r_in / 4.0);
    let stencil_points: usize = stencils.iter().map(|s| s.len()).product::<usize>() + 1;
    let (value, evaluations) = if d == 1 {
        let nodes = composite_gl(-r_in, r_in, panel, grid.nodes_per_panel);
        let terms: Vec<f64> = nodes.par_iter().map(|&(x, w)| w * integrand(&[x])).collect();
        (pairwise_sum(&terms), nodes.len() * stencil_points)
    } else {
        let radial = composite_gl(0.0, r_in, panel, grid.nodes_per_panel);
        let (dirs, weights) = sphere_rule(d, grid.angular_order)?;
        let terms: Vec<f64> = radial
            .par_iter()
            .map(|&(r, wr)| {
                let shell: Vec<f64> = dirs
                    .iter()
                    .zip(&weights)
                    .map(|(u, wu)| {
                        let mut x = [0.0; 4];
                        for k in 0..d {
                            x[k] = r * u[k];
                        }
                        wu * integrand(&x[..d])
                    })
                    .collect();
                wr * r.powi(d as i32 - 1) * pairwise_sum(&shell)
            })
            .collect();
        (pairwise_sum(&terms), radial.len() * dirs.len() * stencil_points)
    };
    let value = value / ball.volume() / t.powi(alpha.total() as i32);
    Ok(FiniteTimeMoment { value, excluded_shell_mass, interior_radius: r_in, step: h, evaluations })
}

/// Periodic box used to synthesize the position-space wavefunction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxSpec {
    /// Side length `L`.
    pub length: f64,
    /// Lattice points per axis.
    pub points: usize,
}

impl BoxSpec {
    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }
}

/// Normalized position distribution on the periodic box lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct PositionDistribution {
    pub dim: usize,
    pub t: f64,
    pub spacing: f64,
    pub points: usize,
    /// Row-major over axes, site index `k` along an axis maps to
    /// `x = (k - N) dx` for `k >= N/2` and `x = k dx` otherwise.
    pub probs: Vec<f64>,
}

impl PositionDistribution {
    fn coord(&self, k: usize) -> f64 {
        let n = self.points;
        let signed = if k >= n / 2 { k as i64 - n as i64 } else { k as i64 };
        signed as f64 * self.spacing
    }

    /// `(x, probability)` over every lattice site.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        let n = self.points;
        self.probs.iter().enumerate().map(move |(idx, &p)| {
            let mut x = vec![0.0; self.dim];
            let mut rem = idx;
            for j in (0..self.dim).rev() {
                x[j] = self.coord(rem % n);
                rem /= n;
            }
            (x, p)
        })
    }

    pub fn total(&self) -> f64 {
        pairwise_sum(&self.probs)
    }

    /// Probability of sites with `|x| > radius`.
    pub fn mass_outside(&self, radius: f64) -> f64 {
        let m: Vec<f64> =
            self.iter().filter(|(x, _)| x.iter().map(|v| v * v).sum::<f64>().sqrt() > radius).map(|(_, p)| p).collect();
        pairwise_sum(&m)
    }

    /// Probability of pseudovelocities `x / t` satisfying `pred`.
    pub fn pseudovelocity_mass<F: Fn(&[f64]) -> bool>(&self, pred: F) -> Result<f64> {
        if self.t <= 0.0 {
            return Err(Error::ZeroTime);
        }
        let m: Vec<f64> = self
            .iter()
            .filter(|(x, _)| {
                let v: Vec<f64> = x.iter().map(|xj| xj / self.t).collect();
                pred(&v)
            })
            .map(|(_, p)| p)
            .collect();
        Ok(pairwise_sum(&m))
    }
}

/// Synthesize `|Psi(x, t)|^2` on a periodic box by summing the plane waves
/// `e^{i p.x / hbar} Psi^(p, t)` over the box momenta inside the cutoff
/// ball. Requires `c t < L / 2` and a Nyquist momentum `pi hbar / dx` above
/// `lambda`.
pub fn synth_position(
    q: &Qubit4,
    ball: &CutoffBall,
    t: f64,
    bx: &BoxSpec,
    params: &PhysParams,
) -> Result<PositionDistribution> {
    let d = ball.dim;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    if bx.points < 2 || !(bx.length > 0.0) {
        return Err(Error::BoxPrecondition("box needs positive length and at least two points".into()));
    }
    if params.c * t >= bx.length / 2.0 {
        return Err(Error::BoxPrecondition(format!("c t = {} must stay below L/2 = {}", params.c * t, bx.length / 2.0)));
    }
    let dx = bx.spacing();
    let nyquist = PI * params.hbar / dx;
    if ball.lambda >= nyquist {
        return Err(Error::BoxPrecondition(format!("cutoff {} is not below the Nyquist momentum {nyquist}", ball.lambda)));
    }
    let n = bx.points;
    let total = n
        .checked_pow(d as u32)
        .filter(|&s| s <= 1 << 26)
        .ok_or_else(|| Error::BoxPrecondition(format!("{n}^{d} lattice sites is too large")))?;
    let dp = 2.0 * PI * params.hbar / bx.length;
    let mom = |k: usize| -> f64 {
        let signed = if k >= n / 2 { k as i64 - n as i64 } else { k as i64 };
        signed as f64 * dp
    };

    // four component fields in momentum space
    let mut fields: Vec<Vec<C64>> = vec![vec![ZERO; total]; 4];
    let values: Vec<[C64; 4]> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut p = [0.0; 4];
            let mut rem = idx;
            for j in (0..d).rev() {
                p[j] = mom(rem % n);
                rem /= n;
            }
            let pm = Momentum::new(&p[..d]).expect("finite momentum");
            if pm.norm() < ball.lambda {
                evolve_spinor(q, &pm, t, params)
            } else {
                [ZERO; 4]
            }
        })
        .collect();
    for (idx, v) in values.iter().enumerate() {
        for c in 0..4 {
            fields[c][idx] = v[c];
        }
    }

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(n);
    for field in fields.iter_mut() {
        for axis in 0..d {
            let stride = n.pow((d - 1 - axis) as u32);
            let mut line = vec![ZERO; n];
            for start in 0..total {
                // visit each line once, from its first element
                if !(start / stride).is_multiple_of(n) {
                    continue;
                }
                for k in 0..n {
                    line[k] = field[start + k * stride];
                }
                fft.process(&mut line);
                for k in 0..n {
                    field[start + k * stride] = line[k];
                }
            }
        }
    }
    let probs: Vec<f64> = (0..total).map(|i| fields.iter().map(|f| f[i].norm_sqr()).sum()).collect();
    let norm = pairwise_sum(&probs);
    if !(norm > 0.0) {
        return Err(Error::BoxPrecondition("no box momenta inside the cutoff ball".into()));
    }
    let probs = probs.into_iter().map(|p| p / norm).collect();
    Ok(PositionDistribution { dim: d, t, spacing: dx, points: n, probs })
}

/// Unit-norm check used by tests and callers that build spinors by hand.
pub fn spinor_norm(v: &[C64; 4]) -> f64 {
    norm_sqr(v).sqrt()
}

/// Identity helper: `U(0) = I`.
pub fn rest_frame_fwt(dim: usize, params: &PhysParams) -> Result<Mat4> {
    Ok(fwt_matrix(&Momentum::zero(dim)?, params))
}
