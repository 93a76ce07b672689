use std::ops::ControlFlow;

use axiswalk::excursion::{excursion_gain_sums, has_monotone_axis, track_excursions};
use axiswalk::stats::{ks_distance, tail_exponent_fit, EmpiricalDistribution};
use axiswalk::{run_path, simulate_path, Engine, LatticeState, ModelKind, ModelSpec, RngStream};
use proptest::prelude::*;

fn any_kind() -> impl Strategy<Value = ModelKind> {
    prop::sample::select(ModelKind::ALL.to_vec())
}

fn any_alpha() -> impl Strategy<Value = f64> {
    (1u32..=400).prop_map(|k| k as f64 / 100.0)
}

fn path(model: &ModelSpec, n: u64, seed: u64, stream: u64) -> Vec<LatticeState> {
    let mut out = Vec::with_capacity(n as usize + 1);
    simulate_path(model, LatticeState::new(1, 1), n, &mut RngStream::new(seed, stream), &mut |_, s| {
        out.push(s);
        ControlFlow::Continue(())
    })
    .unwrap();
    out
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, 1..60)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kernels_are_normalized_nearest_neighbour(
        kind in any_kind(),
        alpha in any_alpha(),
        x in -40i64..40,
        y in -40i64..40,
    ) {
        let m = ModelSpec::new(kind, alpha).unwrap();
        let s = LatticeState::new(x, y);
        prop_assume!(m.check_state(s).is_ok());
        let succ = m.transition_distribution(s).unwrap();
        let total: f64 = succ.iter().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() <= 1e-15, "sum {total}");
        for (t, p) in succ {
            prop_assert!(p > 0.0 && p <= 1.0);
            prop_assert_eq!((t.x - s.x).abs() + (t.y - s.y).abs(), 1);
            prop_assert!(m.check_state(t).is_ok());
        }
    }

    #[test]
    fn excursions_interleave(kind in any_kind(), alpha in any_alpha(), seed in any::<u64>()) {
        let m = ModelSpec::new(kind, alpha).unwrap();
        let p = path(&m, 2000, seed, 0);
        let recs = track_excursions(&m, p.iter().copied()).unwrap();
        let mut last_rho = 0;
        for (k, r) in recs.iter().enumerate() {
            prop_assert_eq!(r.index, k as u64 + 1);
            prop_assert!(last_rho <= r.eta && r.eta < r.rho);
            prop_assert!(m.on_excursion_axis(p[r.eta as usize]));
            prop_assert!(!m.on_excursion_axis(p[r.rho as usize]));
            prop_assert_eq!(p[r.rho as usize].z_bar(), r.z_at_rho);
            prop_assert_eq!(p[r.eta as usize].z_bar(), r.z_at_eta);
            // An axis stay entered at the origin can leave along the other
            // axis and gain one without sliding.
            if has_monotone_axis(&m) && r.z_at_eta >= 1 {
                prop_assert_eq!(r.z_at_rho - r.z_at_eta, (r.rho - r.eta - 1) as i64);
            }
            last_rho = r.rho;
        }
    }

    #[test]
    fn gains_reconstruct_the_exit_value(kind in any_kind(), alpha in any_alpha(), seed in any::<u64>()) {
        let m = ModelSpec::new(kind, alpha).unwrap();
        let p = path(&m, 3000, seed, 1);
        let recs = track_excursions(&m, p.iter().copied()).unwrap();
        let z0 = p[0].z_bar();
        for i in 1..=recs.len() {
            let g = excursion_gain_sums(&recs, z0, i).unwrap();
            prop_assert_eq!(z0 + g.axis_gain + g.cone_change, recs[i - 1].z_at_rho);
        }
    }

    #[test]
    fn paths_are_reproducible(kind in any_kind(), alpha in any_alpha(), seed in any::<u64>(), stream in 0u64..1000) {
        let m = ModelSpec::new(kind, alpha).unwrap();
        prop_assert_eq!(path(&m, 500, seed, stream), path(&m, 500, seed, stream));
        for engine in [Engine::Jump, Engine::Phase] {
            let run = || {
                let mut seen = Vec::new();
                run_path(engine, &m, LatticeState::new(1, 1), 50_000, &mut RngStream::new(seed, stream), &mut |t, s| {
                    seen.push((t, s));
                    ControlFlow::Continue(())
                })
                .unwrap();
                seen
            };
            prop_assert_eq!(run(), run());
        }
    }

    #[test]
    fn jump_engine_observations_are_ordered_and_end_at_horizon(
        kind in any_kind(),
        alpha in any_alpha(),
        seed in any::<u64>(),
        n in 1u64..100_000,
    ) {
        let m = ModelSpec::new(kind, alpha).unwrap();
        let mut last: Option<(u64, LatticeState)> = None;
        let out = run_path(Engine::Jump, &m, LatticeState::new(1, 1), n, &mut RngStream::new(seed, 0), &mut |t: u64, s: LatticeState| {
            if let Some((pt, ps)) = last {
                assert!(t > pt);
                // Distance moved is bounded by time elapsed, with matching parity.
                let d = ((s.x - ps.x).abs() + (s.y - ps.y).abs()) as u64;
                assert!(d <= t - pt && (t - pt - d) % 2 == 0);
            }
            last = Some((t, s));
            ControlFlow::Continue(())
        })
        .unwrap();
        prop_assert_eq!(out.time, n);
        prop_assert_eq!(last.unwrap().0, n);
    }

    #[test]
    fn ecdf_is_a_distribution_function(xs in samples(), t in -2e3f64..2e3, p in 0.0f64..=1.0) {
        let d = EmpiricalDistribution::new(xs.clone()).unwrap();
        let f = d.ecdf_at(t);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!(d.ecdf_at(t + 1.0) >= f);
        prop_assert_eq!(d.ecdf_at(d.max()), 1.0);
        prop_assert_eq!(d.count_le(t), xs.iter().filter(|&&x| x <= t).count());
        let q = d.quantile(p);
        prop_assert!(d.ecdf_at(q) >= p - 1e-12);
        prop_assert!(xs.contains(&q));
    }

    #[test]
    fn ks_is_a_metric(a in samples(), b in samples(), c in samples()) {
        let (a, b, c) = (
            EmpiricalDistribution::new(a).unwrap(),
            EmpiricalDistribution::new(b).unwrap(),
            EmpiricalDistribution::new(c).unwrap(),
        );
        let ab = ks_distance(&a, &b);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(ab, ks_distance(&b, &a));
        prop_assert_eq!(ks_distance(&a, &a), 0.0);
        prop_assert!(ab <= ks_distance(&a, &c) + ks_distance(&c, &b) + 1e-12);
    }

    #[test]
    fn fit_recovers_exact_power_laws(
        slope in -3.0f64..3.0,
        scale in 0.01f64..100.0,
        xs in prop::collection::btree_set(1u32..10_000, 3..30),
    ) {
        let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x as f64, scale * (x as f64).powf(slope))).collect();
        let f = tail_exponent_fit(&pts).unwrap();
        prop_assert!((f.slope - slope).abs() < 1e-9);
        prop_assert!((f.prefactor() / scale - 1.0).abs() < 1e-8);
    }
}
