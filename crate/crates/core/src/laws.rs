//! Closed-form pseudovelocity limit laws.
//!
//! Velocities are raw (units of `c`); Dirac densities are expressed per
//! `d^d(v/c)`, so `integral nu prod dv_j / c = 1`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{PhysParams, Qubit2, Qubit4, C64};
use crate::quadrature::{self, integrate_1d_open, unit_ball_volume, IntegrationResult, IntegrationSpec, Method};
use crate::walk::{Coin, COIN_NORM_TOL};
use crate::MultiIndex;

/// Konno density `sqrt(1 - |a|^2) / (pi (1 - v^2) sqrt(|a|^2 - v^2))` on
/// `|v| < |a|`, zero elsewhere.
pub fn konno_mu(v: f64, a_abs: f64) -> f64 {
    if !(a_abs > 0.0 && a_abs < 1.0) || v.abs() >= a_abs {
        return 0.0;
    }
    konno_mu_dist(v, a_abs - v.abs(), a_abs + v.abs(), a_abs)
}

/// Same density with the distances to the support edges passed separately,
/// so quadrature nodes next to `+-|a|` keep full precision.
fn konno_mu_dist(v: f64, d_near: f64, d_far: f64, a_abs: f64) -> f64 {
    (1.0 - a_abs * a_abs).sqrt() / (PI * (1.0 - v * v) * (d_near * d_far).sqrt())
}

/// One-dimensional walk law with coin `[[a, b], [-conj b, conj a]]` and
/// initial qubit `q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KonnoLaw {
    pub a: C64,
    pub b: C64,
    pub q: Qubit2,
    slope: f64,
}

impl KonnoLaw {
    pub fn new(a: C64, b: C64, q: Qubit2) -> Result<Self> {
        let n = a.norm_sqr() + b.norm_sqr();
        if (n - 1.0).abs() > COIN_NORM_TOL {
            return Err(Error::CoinNotUnitary { norm_sqr: n });
        }
        let aa = a.norm();
        if !(aa > 0.0 && aa < 1.0) {
            return Err(Error::CoinParameter(aa));
        }
        let [q1, q2] = *q.amplitudes();
        let cross = q1 * q2.conj() * a * b.conj();
        let slope = q1.norm_sqr() - q2.norm_sqr() + 2.0 * cross.re / a.norm_sqr();
        Ok(KonnoLaw { a, b, q, slope })
    }

    pub fn from_coin(coin: &Coin, q: Qubit2) -> Result<Self> {
        match *coin {
            Coin::OneDim { a, b, .. } => Self::new(a, b, q),
            Coin::TwoDim { .. } => Err(Error::DimensionMismatch { expected: 1, got: 2 }),
        }
    }

    /// `s` in `nu = mu (1 - s v)`.
    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn a_abs(&self) -> f64 {
        self.a.norm()
    }

    pub fn support_radius(&self) -> f64 {
        self.a_abs()
    }

    pub fn density(&self, v: f64) -> f64 {
        konno_mu(v, self.a_abs()) * (1.0 - self.slope * v)
    }
}

pub fn konno_nu(v: f64, law: &KonnoLaw) -> f64 {
    law.density(v)
}

/// Two-dimensional walk density
/// `2 / (pi^2 (v1+v2+1)(v1-v2+1)(v1+v2-1)(v1-v2-1))` inside the ellipse
/// `v1^2/p + v2^2/(1-p) < 1`.
pub fn mu2(v1: f64, v2: f64, p: f64) -> f64 {
    if !(p > 0.0 && p < 1.0) || v1 * v1 / p + v2 * v2 / (1.0 - p) >= 1.0 {
        return 0.0;
    }
    2.0 / (PI * PI * (v1 + v2 + 1.0) * (v1 - v2 + 1.0) * (v1 + v2 - 1.0) * (v1 - v2 - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoDimLaw {
    pub p: f64,
}

impl TwoDimLaw {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::CoinParameter(p));
        }
        Ok(TwoDimLaw { p })
    }

    pub fn density(&self, v: &[f64]) -> f64 {
        mu2(v[0], v[1], self.p)
    }

    /// Polar angles on the rescaled unit disk of the four points where the
    /// ellipse touches the lines `|v1| + |v2| = 1`.
    pub fn singular_angles(&self) -> Vec<f64> {
        let th = (1.0 - self.p).sqrt().atan2(self.p.sqrt());
        vec![th, PI - th, PI + th, 2.0 * PI - th]
    }
}

/// `mu2` on the rescaled unit disk `v = (sqrt(p) r cos th, sqrt(1-p) r sin th)`.
/// Each linear factor is `1 - r cos(th - phi_i) = (1 - r) + 2 r sin^2((th - phi_i)/2)`
/// with `phi_i` the tangent angles; `one_minus_r` and the angle offsets are
/// passed in so the factors stay accurate next to the tangent points.
fn mu2_disk(r: f64, one_minus_r: f64, offsets: &[f64; 4]) -> f64 {
    let prod: f64 = offsets.iter().map(|d| one_minus_r + 2.0 * r * (0.5 * d).sin().powi(2)).product();
    2.0 / (PI * PI * prod)
}

/// Nested tanh-sinh over the ellipse, split at the tangent angles.
fn mu2_moment(l: &TwoDimLaw, alpha: &MultiIndex, spec: &IntegrationSpec) -> Result<IntegrationResult> {
    let (sx, sy) = (l.p.sqrt(), (1.0 - l.p).sqrt());
    let jac = sx * sy;
    let phis = l.singular_angles();
    let mut cuts = phis.clone();
    cuts.push(phis[0] + 2.0 * PI);
    let outer_tol = spec.tol / (4.0 * jac);
    let inner_tol = outer_tol / (20.0 * 2.0 * PI);
    let outer = IntegrationSpec { method: Method::DoubleExponential, tol: outer_tol, breakpoints: vec![], ..spec.clone() };
    let inner = IntegrationSpec { tol: inner_tol, ..outer.clone() };
    let mut parts = Vec::with_capacity(4);
    for (k, w) in cuts.windows(2).enumerate() {
        let mut evals = 0usize;
        let mut ok = true;
        let mut res = integrate_1d_open(
            |th, da, db| {
                // the radial integral grows like log(1/offset); nodes this
                // close to a tangent angle carry weight below 1e-97
                if da.min(db) < 1e-100 {
                    return 0.0;
                }
                let mut offsets = [0.0; 4];
                for (i, o) in offsets.iter_mut().enumerate() {
                    *o = th - phis[i];
                }
                offsets[k] = da;
                offsets[(k + 1) % 4] = -db;
                let (s, c) = th.sin_cos();
                let r = integrate_1d_open(
                    |r, _, one_minus_r| {
                        let v = [sx * r * c, sy * r * s];
                        r * alpha.monomial(&v) * mu2_disk(r, one_minus_r, &offsets)
                    },
                    0.0,
                    1.0,
                    &inner,
                )
                .expect("valid inner interval");
                evals += r.evaluations;
                ok &= r.converged;
                r.value
            },
            w[0],
            w[1],
            &outer,
        )?;
        res.evaluations = evals;
        res.converged &= ok;
        parts.push(res);
    }
    let mut r = IntegrationResult::combine(&parts, spec.tol / jac);
    r.value *= jac;
    r.error *= jac;
    r.converged = r.converged && r.error <= spec.tol;
    Ok(r)
}

/// `v_max = c Lambda / sqrt(1 + Lambda^2)`.
pub fn support_radius(ratio: f64, params: &PhysParams) -> f64 {
    params.c * ratio / ratio.hypot(1.0)
}

/// `(unit ball volume) lambda^d / (2 pi hbar)^d`; `lambda^3 / (6 pi^2 hbar^3)` for `d = 3`.
pub fn normalization_constant(d: usize, lambda: f64, params: &PhysParams) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("cutoff must be positive, got {lambda}")));
    }
    Ok(unit_ball_volume(d)? * (lambda / (2.0 * PI * params.hbar)).powi(d as i32))
}

/// `integral_{|p| < lambda} d^d p / (2 pi hbar)^d` by quadrature.
pub fn cutoff_norm_quadrature(d: usize, lambda: f64, params: &PhysParams, spec: &IntegrationSpec) -> Result<IntegrationResult> {
    let scale = (2.0 * PI * params.hbar).powi(-(d as i32));
    quadrature::integrate_ball(|_| scale, d, lambda, spec)
}

/// Radial Dirac density
/// `(1 / V_d) Lambda^{-d} (1 - v^2/c^2)^{-(d+2)/2}` for `v < v_max`, per `d^d(v/c)`.
/// The prefactors `1/V_d` are `1/2, 1/pi, 3/(4 pi), 2/pi^2` for `d = 1..4`.
pub fn dirac_mu(d: usize, v: f64, ratio: f64, params: &PhysParams) -> f64 {
    let Ok(vol) = unit_ball_volume(d) else { return 0.0 };
    if !(ratio > 0.0) || v.abs() >= support_radius(ratio, params) {
        return 0.0;
    }
    let beta2 = (v / params.c).powi(2);
    (1.0 - beta2).powf(-(d as f64 + 2.0) / 2.0) / (vol * ratio.powi(d as i32))
}

/// Weight coefficients `c_1..c_d` of `1 + sum_j c_j v_j / c`:
/// `2Re(q1 q4* + q2 q3*)`, `2Im(q1* q4 - q2* q3)`, `2Re(q1 q3* - q2 q4*)`,
/// `2Im(q1* q3 + q2* q4)`.
pub fn dirac_weight_coeffs(d: usize, q: &Qubit4) -> Result<Vec<f64>> {
    if !(1..=4).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    let [q1, q2, q3, q4] = *q.amplitudes();
    let all = [
        2.0 * (q1 * q4.conj() + q2 * q3.conj()).re,
        2.0 * (q1.conj() * q4 - q2.conj() * q3).im,
        2.0 * (q1 * q3.conj() - q2 * q4.conj()).re,
        2.0 * (q1.conj() * q3 + q2.conj() * q4).im,
    ];
    Ok(all[..d].to_vec())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiracLimitLaw {
    pub dim: usize,
    /// `Lambda = lambda / (m c)`.
    pub ratio: f64,
    pub coeffs: Vec<f64>,
    pub params: PhysParams,
}

impl DiracLimitLaw {
    pub fn new(dim: usize, ratio: f64, q: &Qubit4, params: PhysParams) -> Result<Self> {
        Self::from_coeffs(dim, ratio, dirac_weight_coeffs(dim, q)?, params)
    }

    pub fn from_coeffs(dim: usize, ratio: f64, coeffs: Vec<f64>, params: PhysParams) -> Result<Self> {
        if !(1..=4).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if coeffs.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: coeffs.len() });
        }
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::InvalidParameter(format!("cutoff ratio must be positive, got {ratio}")));
        }
        let cn: f64 = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if cn > 1.0 + 1e-9 {
            return Err(Error::InvalidParameter(format!("weight coefficients have norm {cn} > 1")));
        }
        Ok(DiracLimitLaw { dim, ratio, coeffs, params })
    }

    pub fn support_radius(&self) -> f64 {
        support_radius(self.ratio, &self.params)
    }

    /// `mu_Dirac(|v|)`, per `d^d(v/c)`.
    pub fn mu(&self, speed: f64) -> f64 {
        dirac_mu(self.dim, speed, self.ratio, &self.params)
    }

    pub fn weight(&self, v: &[f64]) -> f64 {
        1.0 + self.coeffs.iter().zip(v).map(|(c, vj)| c * vj / self.params.c).sum::<f64>()
    }

    /// `nu_Dirac(v) = mu_Dirac(|v|) (1 + sum_j c_j v_j / c)`, per `d^d(v/c)`.
    pub fn density(&self, v: &[f64]) -> f64 {
        let speed = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        self.mu(speed) * self.weight(v)
    }

    /// Same density per `d^d v`.
    pub fn density_raw(&self, v: &[f64]) -> f64 {
        self.density(v) / self.params.c.powi(self.dim as i32)
    }

    /// `mu_Dirac` mass with `|v| > speed`, from the substitution
    /// `v / c = P / sqrt(1 + P^2)` that maps the law to the uniform ball.
    pub fn mass_beyond(&self, speed: f64) -> f64 {
        let beta = (speed / self.params.c).clamp(0.0, 1.0);
        if beta >= 1.0 {
            return 0.0;
        }
        let pstar = beta / (1.0 - beta * beta).sqrt();
        (1.0 - (pstar / self.ratio).powi(self.dim as i32)).max(0.0)
    }
}

pub fn dirac_nu(v: &[f64], law: &DiracLimitLaw) -> Result<f64> {
    if v.len() != law.dim {
        return Err(Error::DimensionMismatch { expected: law.dim, got: v.len() });
    }
    Ok(law.density(v))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Law {
    Konno(KonnoLaw),
    TwoDim(TwoDimLaw),
    Dirac(DiracLimitLaw),
}

impl Law {
    pub fn dim(&self) -> usize {
        match self {
            Law::Konno(_) => 1,
            Law::TwoDim(_) => 2,
            Law::Dirac(l) => l.dim,
        }
    }

    /// Density per unit (raw) velocity volume.
    pub fn density(&self, v: &[f64]) -> f64 {
        match self {
            Law::Konno(l) => l.density(v[0]),
            Law::TwoDim(l) => l.density(v),
            Law::Dirac(l) => l.density_raw(v),
        }
    }
}

/// `integral prod v_j^{alpha_j} nu(v) dv` by quadrature.
///
/// Konno laws use tanh-sinh with the support edges as endpoints; the
/// two-dimensional law uses polar tanh-sinh split at the tangent points;
/// Dirac laws integrate over the velocity ball with `spec.method`
/// (`Adaptive` means the spherical product rule).
pub fn law_moment(law: &Law, alpha: &MultiIndex, spec: &IntegrationSpec) -> Result<IntegrationResult> {
    alpha.check_dim(law.dim())?;
    match law {
        Law::Konno(l) => {
            let a = l.a_abs();
            let s = l.slope();
            let k = alpha.0[0] as i32;
            let de = IntegrationSpec { method: Method::DoubleExponential, ..spec.clone() };
            integrate_1d_open(
                |v, da, db| {
                    let d_near = da.min(db);
                    let d_far = 2.0 * a - d_near;
                    v.powi(k) * konno_mu_dist(v, d_near, d_far, a) * (1.0 - s * v)
                },
                -a,
                a,
                &de,
            )
        }
        Law::TwoDim(l) => mu2_moment(l, alpha, spec),
        Law::Dirac(l) => {
            let ball_spec = match spec.method {
                Method::Adaptive => IntegrationSpec { method: Method::SphericalProduct, ..spec.clone() },
                _ => spec.clone(),
            };
            quadrature::integrate_ball(|v| alpha.monomial(v) * l.density_raw(v), l.dim, l.support_radius(), &ball_spec)
        }
    }
}
