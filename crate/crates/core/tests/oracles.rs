//! Worked examples for each public operation. Expected values are computed
//! by hand or with an independent script, never by the code under test.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use axiswalk::analytics::rho::rho_survival;
use axiswalk::analytics::{
    arcsine_cdf, constants, mean_recurrence, rho_mean_exact, theorem_left_tail,
};
use axiswalk::excursion::{excursion_gain_sums, lln_statistic, summarize, track_excursions, Axis};
use axiswalk::harness::{trajectory_dump, ExperimentConfig, Overrides};
use axiswalk::stats::{dkw_band, ks_distance, tail_exponent_fit, variance_scaling, EmpiricalDistribution};
use axiswalk::{simulate_path, Error, LatticeState, ModelKind, ModelSpec, RngStream};

fn st(x: i64, y: i64) -> LatticeState {
    LatticeState::new(x, y)
}

fn spec(kind: ModelKind, alpha: f64) -> ModelSpec {
    ModelSpec::new(kind, alpha).unwrap()
}

fn kernel(kind: ModelKind, alpha: f64, s: LatticeState) -> BTreeMap<(i64, i64), f64> {
    spec(kind, alpha)
        .transition_distribution(s)
        .unwrap()
        .into_iter()
        .map(|(t, p)| ((t.x, t.y), p))
        .collect()
}

#[test]
fn quarter_plane_axis_at_three_with_alpha_one() {
    let k = kernel(ModelKind::QuarterPlane, 1.0, st(3, 0));
    assert_eq!(k.len(), 2);
    assert!((k[&(4, 0)] - 5.0 / 6.0).abs() < 1e-15);
    assert!((k[&(3, 1)] - 1.0 / 6.0).abs() < 1e-15);
}

#[test]
fn quarter_plane_origin_and_interior() {
    let k = kernel(ModelKind::QuarterPlane, 0.3, st(0, 0));
    assert_eq!(k, BTreeMap::from([((1, 0), 0.5), ((0, 1), 0.5)]));
    let k = kernel(ModelKind::QuarterPlane, 0.7, st(2, 3));
    assert_eq!(k, BTreeMap::from([((3, 3), 0.25), ((1, 3), 0.25), ((2, 4), 0.25), ((2, 2), 0.25)]));
}

#[test]
fn coupled_wall_pushes_right_twice_as_often() {
    let k = kernel(ModelKind::CoupledHalfPlane, 0.4, st(0, 5));
    assert_eq!(k, BTreeMap::from([((1, 5), 0.5), ((0, 4), 0.25), ((0, 6), 0.25)]));
}

#[test]
fn negative_state_is_a_domain_error() {
    let err = spec(ModelKind::QuarterPlane, 0.3).probabilities(st(-1, 2)).unwrap_err();
    assert!(matches!(err, Error::InvalidState { .. }));
}

#[test]
fn inverse_cdf_uses_fixed_order() {
    let m = spec(ModelKind::QuarterPlane, 1.0);
    assert_eq!(m.step_with(st(3, 0), 0.8).unwrap(), st(4, 0));
    assert_eq!(m.step_with(st(3, 0), 0.9).unwrap(), st(3, 1));
    for kind in ModelKind::ALL {
        assert_eq!(spec(kind, 0.3).step_with(st(2, 3), 0.1).unwrap(), st(3, 3), "{kind}");
    }
}

#[test]
fn leaving_frequency_matches_kernel() {
    let m = spec(ModelKind::QuarterPlane, 1.0);
    let mut rng = RngStream::new(11, 0);
    let draws = 1_000_000;
    let hits = (0..draws).filter(|_| m.step(st(3, 0), &mut rng).unwrap() == st(3, 1)).count();
    let p = 1.0 / 6.0;
    let se = (p * (1.0 - p) / draws as f64).sqrt();
    assert!((hits as f64 / draws as f64 - p).abs() < 3.0 * se);
}

#[test]
fn zero_steps_sees_only_the_start() {
    let m = spec(ModelKind::QuarterPlane, 0.3);
    let mut seen = Vec::new();
    let out = simulate_path(&m, st(1, 1), 0, &mut RngStream::new(1, 0), &mut |t, s| {
        seen.push((t, s));
        ControlFlow::Continue(())
    })
    .unwrap();
    assert_eq!(seen, vec![(0, st(1, 1))]);
    assert_eq!(out.terminal, st(1, 1));
}

#[test]
fn ballistic_runs_slide_along_an_axis() {
    let m = spec(ModelKind::QuarterPlane, 1.5);
    let n = 1_000_000u64;
    let runs = 100;
    let fast = (0..runs)
        .filter(|&r| {
            let out = axiswalk::run_path(
                axiswalk::Engine::Jump,
                &m,
                st(1, 1),
                n,
                &mut RngStream::new(3, r),
                &mut |_, _| ControlFlow::Continue(()),
            )
            .unwrap();
            out.terminal.z_bar() as f64 / n as f64 > 0.9
        })
        .count();
    assert!(fast >= 99, "{fast} of {runs}");
}

#[test]
fn single_touch_and_slide_traces() {
    let qp = spec(ModelKind::QuarterPlane, 0.3);
    let r = track_excursions(&qp, [st(1, 1), st(1, 0), st(1, 1)]).unwrap();
    assert_eq!(r.len(), 1);
    assert_eq!((r[0].eta, r[0].rho, r[0].z_at_eta, r[0].z_at_rho), (1, 2, 1, 1));
    assert_eq!(r[0].axis, Axis::Horizontal);

    let r = track_excursions(&qp, [st(1, 1), st(1, 0), st(2, 0), st(2, 1)]).unwrap();
    assert_eq!((r[0].eta, r[0].rho), (1, 3));
    assert_eq!(r[0].z_at_rho - r[0].z_at_eta, 1);
    assert_eq!(r[0].z_at_rho - r[0].z_at_eta, (r[0].rho - r[0].eta - 1) as i64);

    let err = track_excursions(&qp, [st(1, 0), st(2, 0)]).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn count_at_horizon_ignores_unfinished_excursions() {
    let qp = spec(ModelKind::QuarterPlane, 0.3);
    // ρ1 = 2, then the walk reaches the axis again at t = 4 and stays.
    let path = [st(1, 1), st(1, 0), st(1, 1), st(1, 2), st(1, 1), st(1, 0)];
    let s = summarize(&qp, path, 5).unwrap();
    assert_eq!(s.count_n, 1);
}

#[test]
fn lln_statistic_and_gain_sums_of_one_record() {
    let qp = spec(ModelKind::QuarterPlane, 0.2);
    let r = track_excursions(&qp, [st(1, 1), st(1, 0), st(1, 1)]).unwrap();
    let v = lln_statistic(&r[0], 0.2).unwrap();
    assert_eq!(v.value, 1.0);
    assert!(v.in_theorem_range);
    assert!(!lln_statistic(&r[0], 0.7).unwrap().in_theorem_range);
    let g = excursion_gain_sums(&r, 1, 1).unwrap();
    assert_eq!((g.axis_gain, g.cone_change), (0, 0));
    assert_eq!(1 + g.axis_gain + g.cone_change, r[0].z_at_rho);
}

#[test]
fn c1_reference_values() {
    assert!((constants(0.5).c1 - 1.0).abs() < 1e-15);
    assert!((constants(1e-9).c1 - 2.0).abs() < 1e-7);
    assert!((constants(0.25).c1 - 1.717_071_363_829_997_7).abs() < 1e-14);
    assert!(!constants(0.7).in_theorem_range);
}

#[test]
fn axis_survival_products() {
    for alpha in [0.1, 0.5, 2.0] {
        assert_eq!(rho_survival(1, alpha, 0), 0.5);
    }
    assert!((rho_survival(1, 0.5, 1) - 0.323_223_304_703_363_13).abs() < 1e-15);
}

#[test]
fn exact_axis_stay_mean_and_divergence() {
    // Direct summation in double precision, by an independent script.
    let v = rho_mean_exact(1000, 0.3).unwrap();
    assert!((v.value - 1014.957_094_426_952_7).abs() < 1e-8, "{}", v.value);
    assert!(v.remainder_bound < 1e-9);
    for alpha in [1.0, 1.5] {
        assert!(matches!(rho_mean_exact(7, alpha), Err(Error::Divergent(_))));
    }
}

#[test]
fn recurrence_near_zero_alpha_grows_linearly() {
    let u = mean_recurrence(1e-12, 0.0, 1.0, 1000);
    assert!((u[999] - 1999.0).abs() < 1e-6);
}

#[test]
fn recurrence_approaches_lln_constant() {
    let n = 1_000_000;
    let u = mean_recurrence(0.2, 0.0, 1.0, n);
    let ratio = u[n - 1] / (n as f64).powf(1.25);
    let c1 = 1.6f64.powf(1.25);
    assert!((ratio / c1 - 1.0).abs() < 0.01, "{ratio} vs {c1}");
}

#[test]
fn arcsine_reference_points() {
    assert_eq!(arcsine_cdf(0.0), 0.0);
    assert_eq!(arcsine_cdf(1.0), 1.0);
    assert!((arcsine_cdf(0.5) - 0.5).abs() < 1e-15);
    assert!((arcsine_cdf(0.1) - 0.204_832_764_699_133_45).abs() < 1e-10);
}

#[test]
fn theorem_left_tail_values() {
    let k = constants(0.25);
    let at = theorem_left_tail(0.25, 0.005);
    assert!((at.value - 0.505_339_414_396_355_4).abs() < 1e-9);
    assert!(!at.boundary && !at.out_of_range);
    let edge = k.c1 * k.c2.powf(-2.0 / 0.75);
    assert!((edge - 0.030_861_346_950_436_564).abs() < 1e-12);
    let b = theorem_left_tail(0.25, edge);
    assert!((b.value - 1.0).abs() < 1e-12 && b.boundary);
    assert!(theorem_left_tail(0.25, 1e-300).value < 1e-100);
}

#[test]
fn ecdf_examples() {
    let d = EmpiricalDistribution::new(vec![3.0, 1.0, 2.0]).unwrap();
    assert!((d.ecdf_at(2.0) - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(d.quantile(0.5), 2.0);
    assert!(matches!(EmpiricalDistribution::new(vec![]), Err(Error::Empty)));
    let mut rng = RngStream::new(4, 0);
    let u = EmpiricalDistribution::new((0..1_000_000).map(|_| rng.uniform()).collect()).unwrap();
    assert!((u.ecdf_at(0.3) - 0.3).abs() < 0.002);
}

#[test]
fn dkw_examples() {
    assert!((dkw_band(10_000, 0.05) - 0.013_581_015_157_406_196).abs() < 1e-12);
    assert!((dkw_band(10_000, 1.0 - 1e-12) - 0.005_887_050_112_577_373).abs() < 1e-9);
    assert!(dkw_band(u64::MAX, 0.05) < 1e-8);
}

#[test]
fn fit_examples() {
    let pts: Vec<(f64, f64)> = (1..=5).map(|x| (x as f64, (x * x) as f64)).collect();
    let f = tail_exponent_fit(&pts).unwrap();
    assert!((f.slope - 2.0).abs() < 1e-12 && f.stderr < 1e-6);

    let mut rng = RngStream::new(9, 0);
    let pts: Vec<(f64, f64)> = (0..20)
        .map(|j| {
            let x = 10f64.powf(2.0 * j as f64 / 19.0);
            (x, 3.0 * x.sqrt() * (1.0 + 0.01 * (2.0 * rng.uniform() - 1.0)))
        })
        .collect();
    assert!((tail_exponent_fit(&pts).unwrap().slope - 0.5).abs() < 0.02);

    assert!(tail_exponent_fit(&[(2.0, 1.0), (2.0, 3.0), (2.0, 5.0)]).is_err());
    assert!(tail_exponent_fit(&[(1.0, 1.0), (2.0, -3.0), (3.0, 5.0)]).is_err());
}

#[test]
fn ks_examples() {
    let a = EmpiricalDistribution::new(vec![0.5, 1.5, 2.5]).unwrap();
    assert_eq!(ks_distance(&a, &a), 0.0);
    let z = EmpiricalDistribution::new(vec![0.0; 3]).unwrap();
    let o = EmpiricalDistribution::new(vec![1.0; 3]).unwrap();
    assert_eq!(ks_distance(&z, &o), 1.0);

    // Two-sample critical value at the 5% level is 1.36·sqrt(2/n) ≈ 0.0192.
    let mut fails = 0;
    for k in 0..20 {
        let mut r = RngStream::new(100 + k, 0);
        let x = EmpiricalDistribution::new((0..10_000).map(|_| r.uniform()).collect()).unwrap();
        let y = EmpiricalDistribution::new((0..10_000).map(|_| r.uniform()).collect()).unwrap();
        if ks_distance(&x, &y) > 0.027 {
            fails += 1;
        }
    }
    assert!(fails <= 1, "{fails}");
}

#[test]
fn variance_scaling_examples() {
    let mut rng = RngStream::new(5, 0);
    let mut groups = BTreeMap::new();
    for i in [10u64, 100, 1000] {
        let sums: Vec<f64> = (0..400)
            .map(|_| (0..i).map(|_| (rng.uniform() - 0.5) * 12f64.sqrt()).sum())
            .collect();
        groups.insert(i, sums);
    }
    let v = variance_scaling(&groups).unwrap();
    assert!((v.fit.unwrap().slope - 1.0).abs() < 0.1);

    let flat: BTreeMap<u64, Vec<f64>> = [10u64, 100, 1000].into_iter().map(|i| (i, vec![4.0; 5])).collect();
    assert!(variance_scaling(&flat).unwrap().zero_variance);

    let tiny: BTreeMap<u64, Vec<f64>> = [10u64, 100, 1000].into_iter().map(|i| (i, vec![1.0])).collect();
    assert!(variance_scaling(&tiny).is_err());
}

#[test]
fn reflected_walk_spends_little_time_on_axes() {
    let m = spec(ModelKind::ReflectedSrwQuarter, 0.3);
    let n = 10_000;
    let small = (0..200)
        .filter(|&r| {
            let s = axiswalk::excursion::summarize_walk(&m, st(1, 1), n, &mut RngStream::new(8, r), axiswalk::Engine::Step)
                .unwrap();
            (s.axis_local_time as f64) / (n as f64) < 0.1
        })
        .count();
    assert!(small >= 190, "{small}");
}

fn dump_rows(n: u64, stride: u64, kind: ModelKind, alpha: f64) -> (u64, String) {
    let o = Overrides { model: Some(kind), alpha: Some(alpha), n: Some(n), seed: Some(2), ..Default::default() };
    let cfg = o.apply(&ExperimentConfig::default()).unwrap();
    let mut buf = Vec::new();
    let rows = trajectory_dump(&cfg, stride, &mut buf).unwrap();
    (rows, String::from_utf8(buf).unwrap())
}

#[test]
fn trajectory_row_counts() {
    let (rows, text) = dump_rows(3, 1, ModelKind::QuarterPlane, 0.3);
    assert_eq!(rows, 4);
    assert!(text.starts_with("t,x,y\n0,1,1\n"));
    assert_eq!(dump_rows(10, 50, ModelKind::QuarterPlane, 0.3).0, 2);
    // Multiples of 1000 from 0 to 10^6 inclusive.
    assert_eq!(dump_rows(1_000_000, 1000, ModelKind::FullPlane, 0.2).0, 1001);
}
