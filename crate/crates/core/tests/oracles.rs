use cantilever_ion_core::fock::fock_from_ansatz;
use cantilever_ion_core::moments::SqueezeMatrix;
use cantilever_ion_core::{
    fock_occupations, initial_ansatz, integrate, mean_occupations, propagate_rwa, AnsatzState,
    IntegratorConfig, ModelKind, RwaPropagator, SystemParams, C64,
};
use proptest::prelude::*;

fn preset(nu: f64, kappa: f64) -> SystemParams {
    SystemParams::new(19.7, nu, kappa, 0.0197, 0.0197).unwrap()
}

fn presets() -> [SystemParams; 4] {
    [preset(19.7, 1.8), preset(19.7, 5.0), preset(16.0, 4.0), preset(16.0, 5.0)]
}

fn grid(t_max: f64, dt: f64) -> Vec<f64> {
    let n = (t_max / dt).round() as usize;
    (0..=n).map(|i| t_max * i as f64 / n as f64).collect()
}

fn arb_c64(scale: f64) -> impl Strategy<Value = C64> {
    (-scale..scale, -scale..scale).prop_map(|(re, im)| C64::new(re, im))
}

/// States with squeeze-matrix singular values up to 0.8.
fn arb_state() -> impl Strategy<Value = AnsatzState> {
    (arb_c64(0.5), arb_c64(0.5), arb_c64(0.5), 0.0..1.0f64, 0.5..1.5f64, 0.0..6.3f64)
        .prop_filter("nonzero squeeze", |(a1, a2, a3, ..)| {
            SqueezeMatrix::new(*a1, *a2, *a3).largest_singular_value() > 1e-3
        })
        .prop_map(|(a1, a2, a3, u, r, phi)| {
            let s = SqueezeMatrix::new(a1, a2, a3).largest_singular_value();
            let k = 0.8 * u.sqrt() / s;
            AnsatzState::new(C64::from_polar(r, phi), a1 * k, a2 * k, a3 * k)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gaussian_moments_match_fock_expansion(s in arb_state()) {
        // singular values <= 0.8: mass beyond 120 quanta is below 1e-20
        let m = mean_occupations(&s).unwrap();
        let f = fock_occupations(&fock_from_ansatz(&s, 120)).unwrap();
        prop_assert!((m.norm - f.norm).abs() <= 1e-8, "norm {} vs {}", m.norm, f.norm);
        prop_assert!((m.n_a - f.n_a).abs() <= 1e-8, "n_a {} vs {}", m.n_a, f.n_a);
        prop_assert!((m.n_b - f.n_b).abs() <= 1e-8, "n_b {} vs {}", m.n_b, f.n_b);
    }
}

#[test]
fn two_mode_squeezed_vacuum() {
    let s = AnsatzState::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 0.0));
    let m = mean_occupations(&s).unwrap();
    assert!((m.n_a - 1.0 / 3.0).abs() < 1e-14);
    assert!((m.n_b - 1.0 / 3.0).abs() < 1e-14);
    let f = fock_occupations(&fock_from_ansatz(&s, 80)).unwrap();
    assert!((f.n_a - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn rwa_closed_form_matches_integration_on_presets() {
    let cfg = IntegratorConfig::default();
    let g = grid(3.0, 0.01);
    for p in presets() {
        let start = initial_ansatz(6.0).unwrap();
        let prop = RwaPropagator::new(&start, &p).unwrap();
        let traj = integrate(&start, &p, ModelKind::Rwa, &g, &cfg).unwrap();
        for pt in &traj.points {
            let err = prop.at(pt.t).max_abs_diff(&pt.state);
            assert!(err < 1e-8, "kappa {} nu {} t {}: {err:e}", p.kappa, p.nu, pt.t);
        }
    }
}

#[test]
fn rwa_sample_times() {
    let p = preset(19.7, 1.8);
    let g = [0.0, 0.1, 0.5, 1.0];
    let traj = integrate(&initial_ansatz(6.0).unwrap(), &p, ModelKind::Rwa, &g, &IntegratorConfig::default())
        .unwrap();
    for pt in &traj.points {
        let exact = propagate_rwa(6.0, &p, pt.t).unwrap();
        assert!(exact.max_abs_diff(&pt.state) < 1e-8);
    }
}

#[test]
fn mirrored_trajectory() {
    let cfg = IntegratorConfig::default();
    let g = grid(3.0, 0.01);
    let p = SystemParams::new(19.7, 16.0, 4.0, 0.0197, 0.03).unwrap();
    for model in [ModelKind::Full, ModelKind::Rwa] {
        let a = integrate(&initial_ansatz(6.0).unwrap(), &p, model, &g, &cfg).unwrap();
        let start = initial_ansatz(6.0).unwrap().mode_swapped();
        let b = integrate(&start, &p.mode_swapped(), model, &g, &cfg).unwrap();
        for (x, y) in a.points.iter().zip(&b.points) {
            assert!((x.state.alpha1 - y.state.alpha3).norm() < 1e-9);
            assert!((x.state.alpha2 - y.state.alpha2).norm() < 1e-9);
            assert!((x.moments.n_a - y.moments.n_b).abs() < 1e-8);
            assert!((x.moments.n_b - y.moments.n_a).abs() < 1e-8);
            assert!((x.moments.norm - y.moments.norm).abs() < 1e-10);
        }
    }
}

#[test]
fn free_undamped_moduli_constant() {
    let p = SystemParams::new(19.7, 16.0, 0.0, 0.0, 0.0).unwrap();
    let start = AnsatzState::new(
        C64::new(0.8, 0.1),
        C64::new(0.2, 0.1),
        C64::new(0.1, -0.2),
        C64::new(-0.15, 0.05),
    );
    let traj = integrate(&start, &p, ModelKind::Full, &grid(10.0, 0.1), &IntegratorConfig::default())
        .unwrap();
    let m0 = start.components().map(|c| c.norm());
    for pt in &traj.points {
        for (c, r) in pt.state.components().iter().zip(m0) {
            assert!((c.norm() - r).abs() < 1e-10, "t {}: {}", pt.t, (c.norm() - r).abs());
        }
    }
}

#[test]
fn halving_rel_tol_moves_occupations_less_than_rel_tol() {
    let g = grid(3.0, 0.01);
    for p in presets() {
        for rel_tol in [1e-6, 1e-9] {
            let cfg = IntegratorConfig::default().with_rel_tol(rel_tol);
            let a = integrate(&initial_ansatz(6.0).unwrap(), &p, ModelKind::Full, &g, &cfg).unwrap();
            let fine = cfg.with_rel_tol(rel_tol / 2.0);
            let b = integrate(&initial_ansatz(6.0).unwrap(), &p, ModelKind::Full, &g, &fine).unwrap();
            for (x, y) in a.points.iter().zip(&b.points) {
                let d = (x.moments.n_a - y.moments.n_a)
                    .abs()
                    .max((x.moments.n_b - y.moments.n_b).abs());
                assert!(d < rel_tol, "kappa {} rel_tol {rel_tol:e}: {d:e}", p.kappa);
            }
        }
    }
}
