#![allow(clippy::needless_range_loop)]

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use diracwalk_core::laws::*;
use diracwalk_core::quadrature::{integrate_1d, integrate_1d_open};
use diracwalk_core::{IntegrationSpec, Method, MultiIndex, PhysParams, Qubit2, Qubit4, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec(tol: f64) -> IntegrationSpec {
    IntegrationSpec::new(Method::Adaptive, tol)
}

fn random_qubit4(rng: &mut ChaCha8Rng) -> Qubit4 {
    Qubit4::normalized([0; 4].map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))).unwrap()
}

#[test]
fn konno_mu_normalized() {
    for a in [0.3, FRAC_1_SQRT_2, 0.9] {
        let r = integrate_1d_open(
            |v, da, db| {
                let near = da.min(db);
                (1.0 - a * a).sqrt() / (PI * (1.0 - v * v) * (near * (2.0 * a - near)).sqrt())
            },
            -a,
            a,
            &IntegrationSpec::new(Method::DoubleExponential, 1e-10),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-6, "a={a}: {}", r.value);
        // the public density agrees with the formula away from the edges
        assert!((konno_mu(0.5 * a, a) - (1.0 - a * a).sqrt() / (PI * (1.0 - 0.25 * a * a) * (0.75 * a * a).sqrt())).abs() < 1e-14);
    }
}

#[test]
fn konno_laws_normalized_for_random_coins() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let aa: f64 = rng.gen_range(0.05..0.95);
        let (pa, pb) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
        let a = C64::from_polar(aa, pa);
        let b = C64::from_polar((1.0 - aa * aa).sqrt(), pb);
        let q = Qubit2::normalized([C64::new(rng.gen(), rng.gen()), C64::new(rng.gen(), rng.gen())]).unwrap();
        let law = KonnoLaw::new(a, b, q).unwrap();
        let r = law_moment(&Law::Konno(law), &MultiIndex::zeros(1), &spec(1e-10)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
        // the linear weight keeps nu nonnegative on the support
        assert!(law.slope().abs() * aa <= 1.0 + 1e-12);
    }
}

#[test]
fn mu2_normalized() {
    for p in [0.3, 0.5, 0.7] {
        let law = Law::TwoDim(TwoDimLaw::new(p).unwrap());
        let r = law_moment(&law, &MultiIndex::zeros(2), &spec(1e-6)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-4, "p={p}: {}", r.value);
    }
}

#[test]
fn dirac_mu_normalized() {
    let pp = PhysParams::default();
    for d in 1..=4 {
        for lam in [0.5, 1.0, 3.0, 10.0] {
            let law = Law::Dirac(DiracLimitLaw::from_coeffs(d, lam, vec![0.0; d], pp).unwrap());
            let r = law_moment(&law, &MultiIndex::zeros(d), &IntegrationSpec::new(Method::SphericalProduct, 1e-9)).unwrap();
            assert!((r.value - 1.0).abs() < 1e-6, "d={d} Lambda={lam}: {}", r.value);
        }
    }
}

#[test]
fn three_dimensional_antiderivative() {
    // radial integral of v^2 (1 - v^2)^{-5/2} is v^3 / (3 (1 - v^2)^{3/2})
    let pp = PhysParams::default();
    for lam in [0.5, 1.0, 3.0, 10.0] {
        let vm = support_radius(lam, &pp);
        let anti = vm.powi(3) / (3.0 * (1.0 - vm * vm).powf(1.5));
        assert!((anti - lam.powi(3) / 3.0).abs() < 1e-9 * lam.powi(3));
        let r = integrate_1d(|v| 4.0 * PI * v * v * dirac_mu(3, v, lam, &pp), 0.0, vm, &spec(1e-12)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8, "Lambda={lam}: {}", r.value);
    }
}

#[test]
fn dirac_density_matches_closed_form() {
    let pp = PhysParams::new(1.0, 2.0, 1.0).unwrap();
    let v = 0.9;
    let want = 3.0 / (4.0 * PI) * (1.0 - 0.81 / 4.0f64).powf(-2.5);
    assert!((dirac_mu(3, v, 1.0, &pp) - want).abs() < 1e-14);
    // raw density divides by c^d
    let law = DiracLimitLaw::from_coeffs(3, 1.0, vec![0.0; 3], pp).unwrap();
    assert!((law.density_raw(&[v, 0.0, 0.0]) - want / 8.0).abs() < 1e-14);
}

#[test]
fn weight_coefficients_are_bilinear_expectations() {
    // c_k = <q| i gamma_4 gamma_k |q> with gamma_5 for the fourth slot
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g4 = diracwalk_core::gamma(4).unwrap();
    for _ in 0..100 {
        let q = random_qubit4(&mut rng);
        let c = dirac_weight_coeffs(4, &q).unwrap();
        for (slot, nu) in [1, 2, 3, 5].into_iter().enumerate() {
            let m = (g4 * diracwalk_core::gamma(nu).unwrap()).scale(C64::new(0.0, 1.0));
            let mq = m.mul_vec(q.amplitudes());
            let e = diracwalk_core::linalg::inner(q.amplitudes(), &mq);
            assert!((e.re - c[slot]).abs() < 1e-13 && e.im.abs() < 1e-13);
        }
        assert!(c.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-12);
    }
}

#[test]
fn dirac_nu_nonnegative_on_support_grid() {
    let pp = PhysParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 64;
    for d in 1..=3 {
        let law0 = DiracLimitLaw::from_coeffs(d, 1.0, vec![0.0; d], pp).unwrap();
        let vm = law0.support_radius();
        let grid: Vec<f64> = (0..n).map(|i| -vm + (2.0 * i as f64 + 1.0) * vm / n as f64).collect();
        for _ in 0..10_000 {
            let q = random_qubit4(&mut rng);
            let law = DiracLimitLaw::new(d, 1.0, &q, pp).unwrap();
            let c = &law.coeffs;
            let min_weight = 1.0 - c.iter().map(|x| x * x).sum::<f64>().sqrt() * vm;
            assert!(min_weight > 0.0);
            // grid point most opposed to the coefficient vector
            let probe: Vec<f64> = c.iter().map(|cj| -cj.signum() * grid[n - 1]).collect();
            assert!(law.density(&probe) >= 0.0);
        }
        // exhaustive grid for a worst-case coefficient vector
        let mut c = vec![0.0; d];
        c[0] = 1.0;
        let law = DiracLimitLaw::from_coeffs(d, 1.0, c, pp).unwrap();
        let total = n.pow(d as u32);
        for idx in 0..total {
            let mut v = vec![0.0; d];
            let mut rem = idx;
            for j in 0..d {
                v[j] = grid[rem % n];
                rem /= n;
            }
            assert!(law.density(&v) >= 0.0);
        }
    }
}

#[test]
fn inverted_bell_shape() {
    let pp = PhysParams::default();
    for d in 1..=4 {
        for lam in [0.5, 1.0, 10.0] {
            let vm = support_radius(lam, &pp);
            let mut last = 0.0;
            for i in 1..200 {
                let v = vm * i as f64 / 200.0;
                let m = dirac_mu(d, v, lam, &pp);
                assert!(m > last, "d={d} Lambda={lam} v={v}");
                last = m;
            }
        }
    }
    for a in [0.3, 0.9] {
        let mut last = 0.0;
        for i in 0..100 {
            let v = a * i as f64 / 100.0;
            let m = konno_mu(v, a);
            assert!(m > last);
            last = m;
        }
    }
}

#[test]
fn concentration_near_light_speed() {
    let pp = PhysParams::default();
    let mut last = 0.0;
    for lam in [1.0, 10.0, 100.0] {
        let law = DiracLimitLaw::from_coeffs(3, lam, vec![0.0; 3], pp).unwrap();
        let vm = law.support_radius();
        let cut = 0.99 * vm;
        let r = integrate_1d(|v| 4.0 * PI * v * v * law.mu(v), cut, vm, &spec(1e-12)).unwrap();
        assert!((r.value - law.mass_beyond(cut)).abs() < 1e-8);
        assert!(r.value > last, "Lambda={lam}: {} !> {last}", r.value);
        last = r.value;
    }
}

#[test]
fn konno_fig7_slope() {
    // a = sqrt(.7), b = i sqrt(.3), q = (1, 2i)/sqrt(5)
    let a = C64::from(0.7f64.sqrt());
    let b = C64::new(0.0, 0.3f64.sqrt());
    let q = Qubit2::new([C64::from(1.0 / 5f64.sqrt()), C64::new(0.0, 2.0 / 5f64.sqrt())]).unwrap();
    let law = KonnoLaw::new(a, b, q).unwrap();
    let want = -0.6 - 0.8 * 0.21f64.sqrt() / 0.7;
    assert!((law.slope() - want).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moments_are_phase_invariant(
        re in proptest::array::uniform4(-1.0f64..1.0),
        im in proptest::array::uniform4(-1.0f64..1.0),
        theta in 0.0f64..TAU,
        a1 in 0u32..3,
        a2 in 0u32..3,
    ) {
        let amps = [0, 1, 2, 3].map(|k| C64::new(re[k], im[k]));
        prop_assume!(amps.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3);
        let q = Qubit4::normalized(amps).unwrap();
        let pp = PhysParams::default();
        let law = Law::Dirac(DiracLimitLaw::new(2, 1.0, &q, pp).unwrap());
        let rot = Law::Dirac(DiracLimitLaw::new(2, 1.0, &q.with_phase(theta), pp).unwrap());
        let alpha = MultiIndex::new(&[a1, a2]);
        let s = IntegrationSpec::new(Method::SphericalProduct, 1e-10);
        let m = law_moment(&law, &alpha, &s).unwrap().value;
        let mr = law_moment(&rot, &alpha, &s).unwrap().value;
        prop_assert!((m - mr).abs() < 1e-12);
    }

    #[test]
    fn konno_density_nonnegative(aa in 0.05f64..0.95, pa in 0.0f64..TAU, pb in 0.0f64..TAU,
                                 r in 0.0f64..1.0, ph in 0.0f64..TAU, v in -1.0f64..1.0) {
        let a = C64::from_polar(aa, pa);
        let b = C64::from_polar((1.0 - aa * aa).sqrt(), pb);
        let q = Qubit2::new([C64::from(r.sqrt()), C64::from_polar((1.0 - r).sqrt(), ph)]).unwrap();
        let law = KonnoLaw::new(a, b, q).unwrap();
        prop_assert!(konno_nu(v, &law) >= 0.0);
    }
}
