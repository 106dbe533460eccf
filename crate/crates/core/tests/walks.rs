use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use diracwalk_core::laws::{law_moment, KonnoLaw, Law};
use diracwalk_core::walk::*;
use diracwalk_core::{IntegrationSpec, Method, MultiIndex, Qubit2, Qubit4, C64};
use proptest::prelude::*;

fn hadamard() -> Coin {
    let h = C64::from(FRAC_1_SQRT_2);
    coin1(h, h).unwrap()
}

fn coin_from(aa: f64, pa: f64, pb: f64) -> Coin {
    coin1(C64::from_polar(aa, pa), C64::from_polar((1.0 - aa * aa).sqrt(), pb)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn probability_is_conserved_1d(aa in 0.0f64..1.0, pa in 0.0f64..TAU, pb in 0.0f64..TAU,
                                   r in 0.0f64..1.0, ph in 0.0f64..TAU, t in 0u32..1000) {
        let coin = coin_from(aa, pa, pb);
        let q = Qubit2::new([C64::from(r.sqrt()), C64::from_polar((1.0 - r).sqrt(), ph)]).unwrap();
        let s = evolve(&q, &coin, t).unwrap();
        prop_assert!((distribution(&s).total() - 1.0).abs() < 1e-10);
        for (x, p) in distribution(&s).iter() {
            prop_assert!(x[0].unsigned_abs() <= t as u64 || p == 0.0);
        }
    }

    #[test]
    fn probability_is_conserved_2d(p in 0.01f64..0.99, t in 0u32..60,
                                   re in proptest::array::uniform4(-1.0f64..1.0),
                                   im in proptest::array::uniform4(-1.0f64..1.0)) {
        let amps = [0, 1, 2, 3].map(|k| C64::new(re[k], im[k]));
        prop_assume!(amps.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3);
        let q = Qubit4::normalized(amps).unwrap();
        let s = evolve(&q, &coin2(p).unwrap(), t).unwrap();
        let dist = distribution(&s);
        prop_assert!((dist.total() - 1.0).abs() < 1e-10);
        for (x, _) in dist.iter() {
            prop_assert!(x[0].unsigned_abs() + x[1].unsigned_abs() <= t as u64);
        }
    }
}

#[test]
fn hadamard_small_times_exact() {
    let q = Qubit2::basis(0).unwrap();
    let s = evolve(&q, &hadamard(), 2).unwrap();
    let d = distribution(&s);
    // 1/sqrt(2) is not representable, so "exact" means within a few ulps
    assert!((d.get(&[-2]) - 0.25).abs() < 1e-15);
    assert!((d.get(&[2]) - 0.25).abs() < 1e-15);
    assert!((d.get(&[0]) - 0.5).abs() < 1e-15);
    assert_eq!(d.get(&[1]), 0.0);
    assert!((moment(&s, &MultiIndex::new(&[2])).unwrap() - 2.0).abs() < 1e-15);
}

#[test]
fn kspace_moments_match_real_space() {
    let q1 = Qubit2::normalized([C64::new(0.6, 0.1), C64::new(-0.2, 0.7)]).unwrap();
    let coin = coin_from(0.8, 0.3, 1.1);
    for t in [1u32, 5, 12, 20] {
        let s = evolve(&q1, &coin, t).unwrap();
        for alpha in MultiIndex::all_up_to(1, 3) {
            let real = moment(&s, &alpha).unwrap();
            let k = moment_kspace(&q1, &coin, t, &alpha, &KGrid::default()).unwrap();
            assert!((real - k).abs() < 1e-6 * real.abs().max(1.0), "t={t} alpha={alpha}: {real} vs {k}");
        }
    }
    let q2 = Qubit4::normalized([C64::new(0.5, 0.0), C64::new(0.0, 0.5), C64::new(0.5, 0.1), C64::new(-0.3, 0.5)]).unwrap();
    let c2 = coin2(0.35).unwrap();
    for t in [3u32, 10] {
        let s = evolve(&q2, &c2, t).unwrap();
        for alpha in MultiIndex::all_up_to(2, 3) {
            let real = moment(&s, &alpha).unwrap();
            let k = moment_kspace(&q2, &c2, t, &alpha, &KGrid::default()).unwrap();
            assert!((real - k).abs() < 1e-6 * real.abs().max(1.0), "t={t} alpha={alpha}: {real} vs {k}");
        }
    }
}

#[test]
fn symmetric_hadamard_walk_has_zero_drift() {
    let q = Qubit2::new([C64::from(FRAC_1_SQRT_2), C64::new(0.0, FRAC_1_SQRT_2)]).unwrap();
    let s = evolve(&q, &hadamard(), 1000).unwrap();
    let v1 = moment(&s, &MultiIndex::new(&[1])).unwrap() / 1000.0;
    assert!(v1.abs() < 0.01, "{v1}");
}

#[test]
fn konno_support_mass_shrinks() {
    let q = Qubit2::basis(0).unwrap();
    let a = FRAC_1_SQRT_2;
    let mut last = f64::INFINITY;
    for t in [100u32, 250, 500] {
        let s = evolve(&q, &hadamard(), t).unwrap();
        let m = distribution(&s).pseudovelocity_mass(|v| v[0].abs() > a + 0.05).unwrap();
        assert!(m < last, "t={t}: {m}");
        last = m;
    }
}

#[test]
fn linear_weight_matches_simulated_drift() {
    // asymmetric coin and qubit; the linear reading predicts
    // <V> = -s (1 - sqrt(1 - |a|^2)) and <V^2> = 1 - sqrt(1 - |a|^2)
    let a = C64::from(0.7f64.sqrt());
    let b = C64::new(0.0, 0.3f64.sqrt());
    let q = Qubit2::new([C64::from(1.0 / 5f64.sqrt()), C64::new(0.0, 2.0 / 5f64.sqrt())]).unwrap();
    let law = KonnoLaw::new(a, b, q).unwrap();
    let spec = IntegrationSpec::new(Method::Adaptive, 1e-10);
    let m1 = law_moment(&Law::Konno(law), &MultiIndex::new(&[1]), &spec).unwrap().value;
    let m2 = law_moment(&Law::Konno(law), &MultiIndex::new(&[2]), &spec).unwrap().value;
    let even = 1.0 - 0.3f64.sqrt();
    assert!((m1 + law.slope() * even).abs() < 1e-8);
    assert!((m2 - even).abs() < 1e-8);
    let t = 1000;
    let s = evolve(&q, &coin1(a, b).unwrap(), t).unwrap();
    let v1 = moment(&s, &MultiIndex::new(&[1])).unwrap() / t as f64;
    let v2 = moment(&s, &MultiIndex::new(&[2])).unwrap() / (t as f64).powi(2);
    assert!((v1 - m1).abs() < 0.01, "{v1} vs {m1}");
    assert!((v2 - m2).abs() < 0.01, "{v2} vs {m2}");
}

#[test]
fn grover_walk_stays_in_ellipse() {
    let q = Qubit4::normalized([C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)]).unwrap();
    let p: f64 = 0.5;
    let (ax, ay) = (p.sqrt() + 0.05, (1.0 - p).sqrt() + 0.05);
    let mut last = f64::INFINITY;
    for t in [50u32, 100] {
        let s = evolve(&q, &coin2(p).unwrap(), t).unwrap();
        let m = distribution(&s)
            .pseudovelocity_mass(|v| (v[0] / ax).powi(2) + (v[1] / ay).powi(2) >= 1.0)
            .unwrap();
        assert!(m < last);
        last = m;
    }
}

#[test]
fn dispersion_of_identity_and_hadamard() {
    let id = coin1(C64::from(1.0), C64::from(0.0)).unwrap();
    for k in [-2.0, 0.3, 1.2] {
        let (w1, w2) = dispersion_sqw1(&id, k).unwrap();
        assert!((w1 + k.abs()).abs() < 1e-14 && (w2 - k.abs()).abs() < 1e-14);
    }
    let (w1, w2) = dispersion_sqw1(&hadamard(), 0.0).unwrap();
    assert!((w1 + std::f64::consts::FRAC_PI_4).abs() < 1e-14);
    assert!((w2 - std::f64::consts::FRAC_PI_4).abs() < 1e-14);
}
