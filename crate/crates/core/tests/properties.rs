use proptest::prelude::*;

use relgas::claws::{density, noether_current, LawId};
use relgas::config::RunConfig;
use relgas::equivalence::dilate;
use relgas::interp::MonotoneCubic;
use relgas::jet::{Jet1, Jet2};
use relgas::lagrangian::{accel, el_residual, el_residual_scale, g_factor};
use relgas::solver::characteristic_speeds;

fn jet1() -> impl Strategy<Value = Jet1> {
    (-2.0..2.0f64, -1.0..1.0f64, -2.0..2.0f64, -0.95..0.95f64, 0.1..6.0f64)
        .prop_map(|(xi, t, phi, p, q)| Jet1::new(xi, t, phi, p, q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn conserved_densities_are_noether_currents(jet in jet1(), s0 in 0.05..5.0f64, gamma in 1.05..3.0f64) {
        for id in [LawId::T1, LawId::T2, LawId::T3, LawId::T5] {
            let a = density(id, &jet, s0, gamma).unwrap();
            let b = noether_current(id, &jet, s0, gamma).unwrap();
            let scale = 1.0 + a.0.abs().max(a.1.abs());
            prop_assert!((a.0 - b.0).abs() <= 1e-12 * scale && (a.1 - b.1).abs() <= 1e-12 * scale, "{id}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn dilation_maps_solutions_to_solutions(
        jet in jet1(),
        txi in -2.0..2.0f64,
        xixi in -2.0..2.0f64,
        s0 in 0.05..5.0f64,
        s0p in -2.0..2.0f64,
        gamma in 1.05..3.0f64,
        a in -1.0..1.0f64,
    ) {
        let tt = accel(jet.phi_t, jet.phi_xi, txi, xixi, s0, s0p, gamma).unwrap();
        let on = Jet2::new(jet, tt, txi, xixi).unwrap();
        let (d, s0p_d) = dilate(&on, s0p, a);
        let r = el_residual(&d, s0, s0p_d, gamma).unwrap();
        let scale = el_residual_scale(&d, s0, s0p_d, gamma).unwrap();
        prop_assert!(r.abs() <= 1e-12 * scale.max(1e-300), "{r} vs {scale}");
    }

    #[test]
    fn pressure_factor_exceeds_one(p in -0.99..0.99f64, q in 0.05..10.0f64, s0 in 0.0..5.0f64, gamma in 1.05..3.0f64) {
        prop_assert!(g_factor(p, q, s0, gamma).unwrap() >= 1.0);
    }

    #[test]
    fn sound_stays_inside_the_light_cone(p in -0.95..0.95f64, q in 0.1..6.0f64, s0 in 0.01..5.0f64, gamma in 1.05..2.0f64) {
        let (lp, lm, disc) = characteristic_speeds(p, q, s0, gamma).unwrap();
        prop_assert!(disc > 0.0);
        for l in [lp, lm] {
            let dxdt = p + q * l;
            prop_assert!(dxdt.abs() < 1.0, "{dxdt}");
        }
    }

    #[test]
    fn interpolation_preserves_monotone_data(
        steps in prop::collection::vec((0.01..1.0f64, 0.0..1.0f64), 3..40),
        probes in prop::collection::vec(0.0..1.0f64, 1..50),
    ) {
        let mut x = vec![0.0];
        let mut y = vec![0.0];
        for (dx, dy) in &steps {
            x.push(x.last().unwrap() + dx);
            y.push(y.last().unwrap() + dy);
        }
        let f = MonotoneCubic::new(&x, &y).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            prop_assert_eq!(f.eval(*xi).unwrap(), *yi);
        }
        let hi = *x.last().unwrap();
        let mut sorted: Vec<f64> = probes.iter().map(|s| s * hi).collect();
        sorted.sort_by(f64::total_cmp);
        let vals: Vec<f64> = sorted.iter().map(|v| f.eval(*v).unwrap()).collect();
        for w in vals.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12, "{:?}", w);
        }
    }

    #[test]
    fn config_hash_ignores_key_order_and_comments(n in 8usize..500, cfl in 0.05..1.0f64, seed in 0u64..1000) {
        let a = RunConfig::parse(&format!("n = {n}\ncfl = {cfl}\nseed = {seed}\n")).unwrap();
        let b = RunConfig::parse(&format!("# reordered\nseed = {seed}  # rng\n\ncfl = {cfl}\nn = {n}\n")).unwrap();
        prop_assert_eq!(a.hash(), b.hash());
        let c = RunConfig::parse(&format!("n = {}\ncfl = {cfl}\nseed = {seed}\n", n + 1)).unwrap();
        prop_assert_ne!(a.hash(), c.hash());
    }
}
