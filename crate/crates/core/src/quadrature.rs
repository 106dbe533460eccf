//! Numerical integration: adaptive Gauss-Kronrod and tanh-sinh rules on
//! intervals, spherical-product rules over balls in two to four dimensions,
//! polar double-exponential rules for the ellipse, and seeded Monte-Carlo.
//!
//! Every routine returns an [`IntegrationResult`]; failing to reach the
//! requested tolerance is not an error, it is reported through
//! `converged = false` together with the best estimate.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x5eed_d1ac_0b0b_2009;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Globally adaptive 15/31-point Gauss-Kronrod.
    Adaptive,
    /// Tanh-sinh; never evaluates the integrand on the domain boundary.
    DoubleExponential,
    /// Adaptive radial rule times a fixed-order sphere rule, escalated.
    SphericalProduct,
    /// Uniform sampling with a standard-error estimate.
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Interval { a: f64, b: f64 },
    Ball { dim: usize, radius: f64 },
    /// `v1^2 / p + v2^2 / (1 - p) < 1`.
    Ellipse { p: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrationSpec {
    /// Absolute target for the error estimate.
    pub tol: f64,
    pub max_evals: usize,
    pub method: Method,
    pub seed: u64,
    /// Interior points where the integrand is singular or kinked: abscissae
    /// for intervals, polar angles for two-dimensional double-exponential
    /// rules.
    pub breakpoints: Vec<f64>,
}

impl Default for IntegrationSpec {
    fn default() -> Self {
        IntegrationSpec {
            tol: 1e-10,
            max_evals: 5_000_000,
            method: Method::Adaptive,
            seed: DEFAULT_SEED,
            breakpoints: Vec::new(),
        }
    }
}

impl IntegrationSpec {
    pub fn new(method: Method, tol: f64) -> Self {
        IntegrationSpec { tol, method, ..Default::default() }
    }

    pub fn with_max_evals(mut self, n: usize) -> Self {
        self.max_evals = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_breakpoints(mut self, pts: Vec<f64>) -> Self {
        self.breakpoints = pts;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_evals == 0 {
            return Err(Error::InvalidParameter("max_evals must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl IntegrationResult {
    /// Turn a non-converged result into an error.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Convergence(format!(
                "estimate {} with error {} after {} evaluations",
                self.value, self.error, self.evaluations
            )))
        }
    }

    pub fn combine(parts: &[IntegrationResult], tol: f64) -> IntegrationResult {
        let value = pairwise_sum(&parts.iter().map(|r| r.value).collect::<Vec<_>>());
        let error = parts.iter().map(|r| r.error).sum::<f64>();
        IntegrationResult {
            value,
            error,
            evaluations: parts.iter().map(|r| r.evaluations).sum(),
            converged: parts.iter().all(|r| r.converged) && error <= tol,
        }
    }
}

/// Pairwise (cascade) summation; the reduction order depends only on the
/// length of the input.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Volume of the unit ball in `d` dimensions, `d <= 4`.
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    match d {
        1 => Ok(2.0),
        2 => Ok(PI),
        3 => Ok(4.0 * PI / 3.0),
        4 => Ok(PI * PI / 2.0),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

// 15-point Gauss / 31-point Kronrod, from QUADPACK qk31.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 16] = [
    0.998002298693397060285172840152271,
    0.987992518020485428489565718586613,
    0.967739075679139134257347978784337,
    0.937273392400705904307758947710209,
    0.897264532344081900882509656454496,
    0.848206583410427216200648320774217,
    0.790418501442465932967649294817947,
    0.724417731360170047416186054613938,
    0.650996741297416970533735895313275,
    0.570972172608538847537226737253911,
    0.485081863640239680693655740232351,
    0.394151347077563369897207370981045,
    0.299180007153168812166780024266389,
    0.201194093997434522300628303394596,
    0.101142066918717499027074231447392,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 8] = [
    0.030753241996117268354628393577204,
    0.070366047488108124709267416450667,
    0.107159220467171935011869546685869,
    0.139570677926154314447804794511028,
    0.166269205816993933553200860481209,
    0.186161000015562211026800561866423,
    0.198431485327111576456118326443839,
    0.202578241925561272880620199967519,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 16] = [
    0.005377479872923348987792051430128,
    0.015007947329316122538374763075807,
    0.025460847326715320186874001019653,
    0.035346360791375846222037948478360,
    0.044589751324764876608227299373280,
    0.053481524690928087265343147239430,
    0.062009567800670640285139230960803,
    0.069854121318728258709520077099147,
    0.076849680757720378894432777482659,
    0.083080502823133021038289247286104,
    0.088564443056211770647275443693774,
    0.093126598170825321225486872747346,
    0.096642726983623678505179907627589,
    0.099173598721791959332393173484603,
    0.100769845523875595044946662617570,
    0.101330007014791549017374792767493,
];

/// One Gauss-Kronrod panel: (kronrod value, error estimate).
fn gk31<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[7];
    let mut res_k = fc * WGK[15];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 15];
    let mut fv2 = [0.0; 15];
    for j in 0..15 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[15] * (fc - mean).abs();
    for j in 0..15 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (res_k * half, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adaptive_gk<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, spec: &IntegrationSpec) -> IntegrationResult {
    let mut heap = BinaryHeap::new();
    let mut cuts = vec![a];
    cuts.extend(spec.breakpoints.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    let mut evals = 0;
    for w in cuts.windows(2) {
        let (value, error) = gk31(&mut f, w[0], w[1]);
        evals += 31;
        heap.push(Panel { a: w[0], b: w[1], value, error });
    }
    loop {
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= spec.tol || evals + 62 > spec.max_evals {
            let mut values: Vec<(f64, f64)> = heap.iter().map(|p| (p.a, p.value)).collect();
            values.sort_by(|x, y| x.0.total_cmp(&y.0));
            let value = pairwise_sum(&values.iter().map(|v| v.1).collect::<Vec<_>>());
            return IntegrationResult { value, error, evaluations: evals, converged: error <= spec.tol };
        }
        let worst = heap.pop().expect("non-empty panel heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision; keep it and stop
            heap.push(worst);
            let error: f64 = heap.iter().map(|p| p.error).sum();
            let value = heap.iter().map(|p| p.value).sum();
            return IntegrationResult { value, error, evaluations: evals, converged: error <= spec.tol };
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk31(&mut f, lo, hi);
            heap.push(Panel { a: lo, b: hi, value, error });
        }
        evals += 62;
    }
}

/// Tanh-sinh on `(a, b)`. The integrand receives `(x, x - a, b - x)`; the
/// two distances are computed directly from the transformation so they stay
/// accurate where `x` itself rounds to an endpoint.
fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(mut f: F, a: f64, b: f64, spec: &IntegrationSpec) -> IntegrationResult {
    const MAX_LEVEL: usize = 12;
    const T_MAX: f64 = 6.5;
    let width = b - a;
    let half = 0.5 * width;
    let mut evals = 0usize;

    // contribution of abscissa t (weight without the step factor h)
    let mut term = |t: f64, evals: &mut usize| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let du = FRAC_PI_2 * t.cosh();
        // distance from the nearer endpoint, in units of the width
        let e = (-2.0 * u.abs()).exp();
        let near = e / (1.0 + e);
        let dist = width * near;
        if dist <= 0.0 {
            return 0.0;
        }
        let (mut x, da, db) = if u < 0.0 { (a + dist, dist, width - dist) } else { (b - dist, width - dist, dist) };
        if !(da > 0.0 && db > 0.0) {
            return 0.0;
        }
        // keep x strictly inside when it rounds onto an endpoint
        if x <= a {
            x = a.next_up();
        } else if x >= b {
            x = b.next_down();
        }
        // dx/dt = half * du / cosh(u)^2 = 4 * half * du * near * (1 - near)
        let w = 4.0 * half * du * near * (1.0 - near);
        if w == 0.0 {
            return 0.0;
        }
        *evals += 1;
        w * f(x, da, db)
    };

    let mut h = 1.0;
    let mut sum = term(0.0, &mut evals);
    let n0 = (T_MAX / h) as i64;
    for k in 1..=n0 {
        let t = k as f64 * h;
        sum += term(t, &mut evals) + term(-t, &mut evals);
    }
    let mut estimate = sum * h;
    let mut error = f64::INFINITY;
    for _level in 1..=MAX_LEVEL {
        h *= 0.5;
        let n = (T_MAX / h) as i64;
        let mut add = 0.0;
        let mut k = 1;
        while k <= n {
            let t = k as f64 * h;
            add += term(t, &mut evals) + term(-t, &mut evals);
            k += 2;
        }
        sum += add;
        let next = sum * h;
        // level differences can vanish in floating point; round-off bounds the estimate
        error = (next - estimate).abs().max(4.0 * f64::EPSILON * next.abs());
        estimate = next;
        if !estimate.is_finite() {
            break;
        }
        if error <= spec.tol || evals > spec.max_evals {
            break;
        }
    }
    IntegrationResult { value: estimate, error, evaluations: evals, converged: error <= spec.tol }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidParameter(format!("interval requires finite a < b, got ({a}, {b})")));
    }
    Ok(())
}

/// Integrate `f` over `(a, b)`.
///
/// `Adaptive` uses Gauss-Kronrod panels split at `spec.breakpoints`;
/// `DoubleExponential` uses tanh-sinh on each sub-interval and never touches
/// the endpoints.
pub fn integrate_1d<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, spec: &IntegrationSpec) -> Result<IntegrationResult> {
    match spec.method {
        Method::DoubleExponential => integrate_1d_open(|x, _, _| f(x), a, b, spec),
        _ => {
            spec.validate()?;
            check_interval(a, b)?;
            Ok(adaptive_gk(f, a, b, spec))
        }
    }
}

/// Tanh-sinh integration for integrands with endpoint singularities. `f`
/// receives `(x, x - a, b - x)` where `a, b` are the endpoints of the
/// sub-interval being integrated (sub-intervals are cut at
/// `spec.breakpoints`).
pub fn integrate_1d_open<F: FnMut(f64, f64, f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &IntegrationSpec,
) -> Result<IntegrationResult> {
    spec.validate()?;
    check_interval(a, b)?;
    let mut cuts = vec![a];
    cuts.extend(spec.breakpoints.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    let pieces = cuts.len() - 1;
    let sub = IntegrationSpec { tol: spec.tol / pieces as f64, ..spec.clone() };
    let parts: Vec<IntegrationResult> = cuts.windows(2).map(|w| tanh_sinh(&mut f, w[0], w[1], &sub)).collect();
    Ok(IntegrationResult::combine(&parts, spec.tol))
}

/// Quadrature rule on the unit sphere `S^{d-1}`: (directions, weights).
/// `order` controls the number of nodes per angular coordinate.
pub fn sphere_rule(d: usize, order: usize) -> Result<(Vec<[f64; 4]>, Vec<f64>)> {
    let mut dirs = Vec::new();
    let mut weights = Vec::new();
    match d {
        1 => {
            dirs.push([1.0, 0.0, 0.0, 0.0]);
            dirs.push([-1.0, 0.0, 0.0, 0.0]);
            weights.extend([1.0, 1.0]);
        }
        2 => {
            let n = 2 * order;
            for k in 0..n {
                let th = 2.0 * PI * (k as f64 + 0.5) / n as f64;
                dirs.push([th.cos(), th.sin(), 0.0, 0.0]);
                weights.push(2.0 * PI / n as f64);
            }
        }
        3 => {
            let (z, wz) = gauss_legendre(order);
            let nphi = 2 * order;
            for (zi, wi) in z.iter().zip(&wz) {
                let s = (1.0 - zi * zi).sqrt();
                for k in 0..nphi {
                    let ph = 2.0 * PI * (k as f64 + 0.5) / nphi as f64;
                    dirs.push([s * ph.cos(), s * ph.sin(), *zi, 0.0]);
                    weights.push(wi * 2.0 * PI / nphi as f64);
                }
            }
        }
        4 => {
            // Hopf coordinates with u = sin^2(eta): measure du/2 dxi1 dxi2
            let (x, wx) = gauss_legendre(order);
            let nxi = 2 * order;
            let dxi = 2.0 * PI / nxi as f64;
            for (xi, wi) in x.iter().zip(&wx) {
                let u = 0.5 * (xi + 1.0);
                let wu = 0.5 * wi;
                let (cu, su) = ((1.0 - u).sqrt(), u.sqrt());
                for k1 in 0..nxi {
                    let a1 = dxi * (k1 as f64 + 0.5);
                    for k2 in 0..nxi {
                        let a2 = dxi * (k2 as f64 + 0.5);
                        dirs.push([cu * a1.cos(), cu * a1.sin(), su * a2.cos(), su * a2.sin()]);
                        weights.push(0.5 * wu * dxi * dxi);
                    }
                }
            }
        }
        _ => return Err(Error::UnsupportedDimension(d)),
    }
    Ok((dirs, weights))
}

fn spherical_product<F>(f: &F, d: usize, radius: f64, order: usize, spec: &IntegrationSpec) -> Result<IntegrationResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let (dirs, weights) = sphere_rule(d, order)?;
    let radial_spec = IntegrationSpec { method: Method::Adaptive, tol: spec.tol * 0.5, ..spec.clone() };
    let evals_per_shell = dirs.len();
    let mut shell_calls = 0usize;
    let mut result = adaptive_gk(
        |r| {
            shell_calls += 1;
            let terms: Vec<f64> = dirs
                .iter()
                .zip(&weights)
                .map(|(u, w)| {
                    let mut x = [0.0; 4];
                    for k in 0..d {
                        x[k] = r * u[k];
                    }
                    w * f(&x[..d])
                })
                .collect();
            r.powi(d as i32 - 1) * pairwise_sum(&terms)
        },
        0.0,
        radius,
        &IntegrationSpec { max_evals: (spec.max_evals / evals_per_shell.max(1)).max(62), ..radial_spec },
    );
    result.evaluations = shell_calls * evals_per_shell;
    Ok(result)
}

fn monte_carlo_ball<F>(f: &F, d: usize, radius: f64, spec: &IntegrationSpec) -> IntegrationResult
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    const CHUNK: usize = 4096;
    let chunks = spec.max_evals.div_ceil(CHUNK).max(1);
    let partial: Vec<(f64, f64, usize)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(c as u64);
            let (mut s, mut s2) = (0.0, 0.0);
            let mut x = [0.0; 4];
            for _ in 0..CHUNK {
                let mut r2 = 0.0;
                for xk in x.iter_mut().take(d) {
                    *xk = radius * (2.0 * rng.gen::<f64>() - 1.0);
                    r2 += *xk * *xk;
                }
                let v = if r2 < radius * radius { f(&x[..d]) } else { 0.0 };
                s += v;
                s2 += v * v;
            }
            (s, s2, CHUNK)
        })
        .collect();
    let n: usize = partial.iter().map(|p| p.2).sum();
    let s = pairwise_sum(&partial.iter().map(|p| p.0).collect::<Vec<_>>());
    let s2 = pairwise_sum(&partial.iter().map(|p| p.1).collect::<Vec<_>>());
    let nf = n as f64;
    let mean = s / nf;
    let var = (s2 / nf - mean * mean).max(0.0);
    let vol = (2.0 * radius).powi(d as i32);
    let error = vol * (var / (nf - 1.0)).sqrt();
    IntegrationResult { value: vol * mean, error, evaluations: n, converged: error <= spec.tol }
}

/// Polar tanh-sinh over the disk of radius `radius`; `spec.breakpoints` are
/// polar angles where the angular integrand is singular.
fn polar_double_exponential<F>(f: &F, radius: f64, spec: &IntegrationSpec) -> Result<IntegrationResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut cuts: Vec<f64> = spec.breakpoints.iter().map(|t| t.rem_euclid(2.0 * PI)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    if cuts.is_empty() {
        cuts.push(0.0);
    }
    let first = cuts[0];
    cuts.push(first + 2.0 * PI);
    let pieces = cuts.len() - 1;
    let inner_tol = spec.tol / (20.0 * 2.0 * PI);
    let outer_tol = spec.tol / (2.0 * pieces as f64);
    let inner_spec = IntegrationSpec { tol: inner_tol, breakpoints: vec![], ..spec.clone() };
    let outer_spec = IntegrationSpec { tol: outer_tol, breakpoints: vec![], ..spec.clone() };
    let parts: Vec<IntegrationResult> = cuts
        .windows(2)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|w| {
            let mut inner_evals = 0usize;
            let mut inner_ok = true;
            let mut res = tanh_sinh(
                |th, _, _| {
                    let (s, c) = th.sin_cos();
                    let r = tanh_sinh(|r, _, _| r * f(&[r * c, r * s]), 0.0, radius, &inner_spec);
                    inner_evals += r.evaluations;
                    inner_ok &= r.converged;
                    r.value
                },
                w[0],
                w[1],
                &outer_spec,
            );
            res.evaluations = inner_evals;
            res.converged &= inner_ok;
            res
        })
        .collect();
    Ok(IntegrationResult::combine(&parts, spec.tol))
}

/// Integrate over the ball `|x| < radius` in `d` dimensions.
///
/// Methods: `SphericalProduct` (d = 1..4) escalates the sphere-rule order
/// until two consecutive orders agree; `MonteCarlo` samples uniformly with a
/// seeded generator; `DoubleExponential` (d = 2) uses polar tanh-sinh with the
/// declared singular angles; `Adaptive` behaves like `SphericalProduct`.
/// With the default `Adaptive` hint, d = 4 falls back to Monte-Carlo.
pub fn integrate_ball<F>(f: F, d: usize, radius: f64, spec: &IntegrationSpec) -> Result<IntegrationResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    spec.validate()?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
    }
    if !(1..=4).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    match (spec.method, d) {
        (Method::MonteCarlo, _) | (Method::Adaptive, 4) => Ok(monte_carlo_ball(&f, d, radius, spec)),
        (Method::DoubleExponential, 2) => polar_double_exponential(&f, radius, spec),
        (Method::DoubleExponential, _) => Err(Error::InvalidParameter(format!(
            "double-exponential ball rule is only available for d = 2, got d = {d}"
        ))),
        (_, 1) => integrate_1d(|x| f(&[x]), -radius, radius, &IntegrationSpec { method: Method::Adaptive, ..spec.clone() }),
        _ => {
            let mut order = 8;
            let mut prev = spherical_product(&f, d, radius, order, spec)?;
            let max_order = if d == 4 { 64 } else { 256 };
            loop {
                order *= 2;
                let next = spherical_product(&f, d, radius, order, spec)?;
                let diff = (next.value - prev.value).abs();
                let error = next.error + diff;
                let evaluations = prev.evaluations + next.evaluations;
                if error <= spec.tol || order >= max_order || evaluations > spec.max_evals {
                    return Ok(IntegrationResult {
                        value: next.value,
                        error,
                        evaluations,
                        converged: error <= spec.tol && next.converged,
                    });
                }
                prev = IntegrationResult { evaluations, ..next };
            }
        }
    }
}

/// Integrate over the ellipse `v1^2 / p + v2^2 / (1 - p) < 1` by rescaling
/// the axes onto the unit disk. Breakpoints, when given, are polar angles
/// on the unit disk.
pub fn integrate_ellipse<F>(f: F, p: f64, spec: &IntegrationSpec) -> Result<IntegrationResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("ellipse parameter p must lie in (0, 1), got {p}")));
    }
    let (sx, sy) = (p.sqrt(), (1.0 - p).sqrt());
    let jac = sx * sy;
    let scaled = IntegrationSpec { tol: spec.tol / jac, ..spec.clone() };
    let mut r = integrate_ball(|u: &[f64]| f(&[sx * u[0], sy * u[1]]), 2, 1.0, &scaled)?;
    r.value *= jac;
    r.error *= jac;
    Ok(r)
}

/// Dispatch on a [`Domain`]; the integrand takes a coordinate slice.
pub fn integrate<F>(f: F, domain: &Domain, spec: &IntegrationSpec) -> Result<IntegrationResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    match *domain {
        Domain::Interval { a, b } => integrate_1d(|x| f(&[x]), a, b, spec),
        Domain::Ball { dim, radius } => integrate_ball(f, dim, radius, spec),
        Domain::Ellipse { p } => integrate_ellipse(f, p, spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(method: Method, tol: f64) -> IntegrationSpec {
        IntegrationSpec::new(method, tol)
    }

    #[test]
    fn gauss_legendre_exactness() {
        let (x, w) = gauss_legendre(10);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact up to degree 19
        let i18: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((i18 - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn kronrod_table_exactness() {
        // 31-point Kronrod integrates x^44 exactly on [-1, 1]
        let (v, _) = gk31(&mut |x: f64| x.powi(44), -1.0, 1.0);
        assert!((v - 2.0 / 45.0).abs() < 1e-15);
        // Gauss and Kronrod agree on x^28, so one panel is accepted
        let r = integrate_1d(|x| x.powi(28), -1.0, 1.0, &spec(Method::Adaptive, 1e-12)).unwrap();
        assert!((r.value - 2.0 / 29.0).abs() < 1e-15);
        assert_eq!(r.evaluations, 31);
    }

    #[test]
    fn constant_on_unit_interval() {
        for m in [Method::Adaptive, Method::DoubleExponential] {
            let r = integrate_1d(|_| 1.0, 0.0, 1.0, &spec(m, 1e-13)).unwrap();
            assert!((r.value - 1.0).abs() < 1e-14, "{m:?}: {}", r.value);
            assert!(r.converged);
        }
    }

    #[test]
    fn arcsine_weight_gives_pi() {
        let r = integrate_1d_open(|_, da, db| 1.0 / (da * db).sqrt(), -1.0, 1.0, &spec(Method::DoubleExponential, 1e-10))
            .unwrap();
        assert!((r.value - PI).abs() < 1e-8, "{}", r.value);
        // plain evaluation loses the sub-ulp neighbourhood of the endpoints
        let r = integrate_1d(|x| 1.0 / (1.0 - x * x).sqrt(), -1.0, 1.0, &spec(Method::DoubleExponential, 1e-10)).unwrap();
        assert!((r.value - PI).abs() < 1e-7, "{}", r.value);
    }

    #[test]
    fn double_exponential_never_touches_endpoints() {
        let r = integrate_1d(
            |x| {
                assert!(x > 0.0 && x < 1.0);
                x.ln()
            },
            0.0,
            1.0,
            &spec(Method::DoubleExponential, 1e-10),
        )
        .unwrap();
        assert!((r.value + 1.0).abs() < 1e-10);
    }

    #[test]
    fn breakpoints_split_kink() {
        let s = spec(Method::Adaptive, 1e-12).with_breakpoints(vec![0.3]);
        let r = integrate_1d(|x| (x - 0.3).abs(), 0.0, 1.0, &s).unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn ball_volumes() {
        let r = integrate_ball(|_| 1.0, 3, 1.0, &spec(Method::SphericalProduct, 1e-12)).unwrap();
        assert!((r.value - 4.0 * PI / 3.0).abs() < 1e-10);
        let r = integrate_ball(|_| 1.0, 2, 2.0, &spec(Method::SphericalProduct, 1e-12)).unwrap();
        assert!((r.value - 4.0 * PI).abs() < 1e-10);
        let r = integrate_ball(|_| 1.0, 4, 1.0, &spec(Method::SphericalProduct, 1e-12)).unwrap();
        assert!((r.value - PI * PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn four_ball_monte_carlo_within_error() {
        let s = spec(Method::MonteCarlo, 1e-2).with_max_evals(400_000);
        let r = integrate_ball(|_| 1.0, 4, 1.0, &s).unwrap();
        assert!((r.value - PI * PI / 2.0).abs() < 4.0 * r.error, "{} +- {}", r.value, r.error);
        // deterministic for a fixed seed
        let again = integrate_ball(|_| 1.0, 4, 1.0, &s).unwrap();
        assert_eq!(r.value.to_bits(), again.value.to_bits());
        let other = integrate_ball(|_| 1.0, 4, 1.0, &s.clone().with_seed(7)).unwrap();
        assert_ne!(r.value.to_bits(), other.value.to_bits());
    }

    #[test]
    fn odd_integrand_vanishes() {
        for d in 2..=4 {
            let r = integrate_ball(|x| x[0], d, 1.3, &spec(Method::SphericalProduct, 1e-12)).unwrap();
            assert!(r.value.abs() <= r.error.max(1e-14), "d={d}: {}", r.value);
        }
    }

    #[test]
    fn second_moment_of_ball() {
        // int_{|x|<1} x_1^2 = vol_d / (d + 2)
        for d in 2..=4 {
            let r = integrate_ball(|x| x[0] * x[0], d, 1.0, &spec(Method::SphericalProduct, 1e-12)).unwrap();
            let want = unit_ball_volume(d).unwrap() / (d as f64 + 2.0);
            assert!((r.value - want).abs() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn ellipse_area_and_odd() {
        for p in [0.3, 0.5, 0.7] {
            let s = spec(Method::SphericalProduct, 1e-12);
            let r = integrate_ellipse(|_| 1.0, p, &s).unwrap();
            assert!((r.value - PI * (p * (1.0 - p)).sqrt()).abs() < 1e-12);
            let r = integrate_ellipse(|v| v[0].powi(3) + v[0] * v[1], p, &s).unwrap();
            assert!(r.value.abs() < 1e-13);
        }
    }

    #[test]
    fn polar_double_exponential_area() {
        let s = spec(Method::DoubleExponential, 1e-9).with_breakpoints(vec![0.5, 2.0]);
        let r = integrate_ball(|_| 1.0, 2, 1.0, &s).unwrap();
        assert!((r.value - PI).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn invalid_arguments() {
        let s = IntegrationSpec::default();
        assert!(integrate_1d(|x| x, 1.0, 0.0, &s).is_err());
        assert!(integrate_ball(|_| 1.0, 5, 1.0, &s).is_err());
        assert!(integrate_ball(|_| 1.0, 2, -1.0, &s).is_err());
        assert!(integrate_ellipse(|_| 1.0, 1.0, &s).is_err());
        assert!(integrate_1d(|x| x, 0.0, 1.0, &IntegrationSpec { tol: 0.0, ..s }).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        let s = spec(Method::Adaptive, 1e-15).with_max_evals(31);
        let r = integrate_1d(|x| (50.0 * x).sin().abs(), 0.0, 1.0, &s).unwrap();
        assert!(!r.converged);
        assert!(r.require_converged().is_err());
    }

    #[test]
    fn pairwise_sum_matches_naive_for_small() {
        let xs: Vec<f64> = (0..100).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&xs), 4950.0);
    }
}
