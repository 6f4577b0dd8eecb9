//! Acceptance criteria 1 to 9. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;
use std::time::Instant;

use cantilever_ion::analysis::{first_maximum, first_minimum};
use cantilever_ion::config::ModelSelect;
use cantilever_ion::presets::{figure_params, FIGURES};
use cantilever_ion::validation::{random_params, random_state};
use cantilever_ion::{simulate, RunConfig};
use cantilever_ion_core::fock::{
    fock_from_ansatz, required_n_max, FockPropagator, DEFAULT_DT,
};
use cantilever_ion_core::{
    build_initial_fock, eigen_modes, fock_occupations, initial_ansatz, integrate,
    mean_occupations, propagate_rwa, rwa_matrix, series_norm_partial, series_occupation_partial,
    IntegratorConfig, ModelKind, SystemParams, C64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Res<T> = Result<T, Box<dyn std::error::Error>>;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Res<Verdict> {
    Ok(Verdict { pass, detail })
}

fn preset(f: u8) -> SystemParams {
    figure_params(f).unwrap()
}

fn undamped(p: SystemParams) -> SystemParams {
    SystemParams {
        gamma_a: 0.0,
        gamma_b: 0.0,
        ..p
    }
}

fn grid(t_max: f64, dt: f64) -> Vec<f64> {
    let n = (t_max / dt).round() as usize;
    (0..=n).map(|i| t_max * i as f64 / n as f64).collect()
}

fn figure_config(f: u8, model: ModelSelect) -> RunConfig {
    RunConfig {
        model,
        ..RunConfig::figure(f).unwrap()
    }
}

fn ansatz_exactness() -> Res<Verdict> {
    let started = Instant::now();
    // literal truncation first
    let literal = match build_initial_fock(6.0, 40) {
        Ok(_) => "n_max 40 accepted".to_string(),
        Err(e) => {
            let f = fock_occupations(&fock_from_ansatz(&initial_ansatz(6.0)?, 40))?;
            format!("n_max 40 rejected ({e}); its n_a(0) is already off by {:.3}", (f.n_a - 6.0).abs())
        }
    };
    let literal_ok = build_initial_fock(6.0, 40).is_ok();
    let mut worst: f64 = 0.0;
    let mut converged = true;
    let mut parts = Vec::new();
    for f in FIGURES {
        let cfg = RunConfig {
            fock_check: true,
            ..figure_config(f, ModelSelect::Full)
        };
        let out = simulate(&cfg)?;
        let c = out.fock[0];
        worst = worst.max(c.max_deviation);
        converged &= c.dt_change <= 1e-8;
        parts.push(format!("fig {f} {:.2e} (dt {:.1e})", c.max_deviation, c.dt));
    }
    let secs = started.elapsed().as_secs_f64();
    let sized_ok = worst <= 1e-4 && converged && secs < 600.0;
    verdict(
        literal_ok && sized_ok,
        format!(
            "{literal}; at n_max {} deviation {} (tol 1e-4), dt converged {converged}, {secs:.0} s",
            required_n_max(6.0)?,
            parts.join(", ")
        ),
    )
}

fn analytic_rwa() -> Res<Verdict> {
    let cfg = IntegratorConfig::default();
    let g = grid(3.0, 0.01);
    let mut traj_err: f64 = 0.0;
    for f in FIGURES {
        let p = preset(f);
        let traj = integrate(&initial_ansatz(6.0)?, &p, ModelKind::Rwa, &g, &cfg)?;
        for pt in &traj.points {
            traj_err = traj_err.max(propagate_rwa(6.0, &p, pt.t)?.max_abs_diff(&pt.state));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut params: Vec<SystemParams> = FIGURES.iter().map(|&f| preset(f)).collect();
    params.extend((0..50).map(|_| random_params(&mut rng)));
    let mut omega1_exact = true;
    let mut trace_err: f64 = 0.0;
    for p in &params {
        let modes = eigen_modes(p)?;
        omega1_exact &= modes[0].omega_big == C64::new(-(p.gamma_a + p.gamma_b), -(p.omega + p.nu));
        let k = rwa_matrix(p);
        let trace = k[0][0] + k[1][1] + k[2][2];
        let sum: C64 = modes.iter().map(|m| C64::new(0.0, 1.0) * m.omega_big).sum();
        trace_err = trace_err.max((sum - trace).norm() / trace.norm());
    }
    verdict(
        traj_err <= 1e-8 && omega1_exact && trace_err <= 1e-12,
        format!(
            "closed form vs integration {traj_err:.2e} (tol 1e-8), Omega1 exact {omega1_exact}, trace {trace_err:.2e} (tol 1e-12)"
        ),
    )
}

fn initial_conditions() -> Res<Verdict> {
    let m = mean_occupations(&initial_ansatz(6.0)?)?;
    let ansatz_ok = (m.norm - 1.0).abs() <= 1e-12 && (m.n_a - 6.0).abs() <= 1e-10;
    let fock_err = |n_max| -> Res<f64> {
        let f = fock_occupations(&build_initial_fock(6.0, n_max)?)?;
        Ok((f.norm - 1.0).abs().max((f.n_a - 6.0).abs()))
    };
    let literal = match fock_err(40) {
        Ok(e) => format!("n_max 40 error {e:.2e}"),
        Err(e) => format!("n_max 40: {e}"),
    };
    let literal_ok = matches!(fock_err(40), Ok(e) if e <= 1e-9);
    let deep = fock_err(400)?;
    verdict(
        ansatz_ok && literal_ok,
        format!(
            "ansatz norm {:.1e}, n_a {:.1e}; {literal}; n_max 400 error {deep:.1e} (tol 1e-9)",
            (m.norm - 1.0).abs(),
            (m.n_a - 6.0).abs()
        ),
    )
}

fn series_identities() -> Res<Verdict> {
    let mut worst: f64 = 0.0;
    for x in [0.1, 0.25, 0.462910] {
        let q = 1.0 - 4.0 * x * x;
        worst = worst
            .max((series_norm_partial(x, 4000)? - q.powf(-0.5)).abs())
            .max((series_occupation_partial(x, 4000)? - q.powf(-1.5)).abs());
    }
    verdict(worst <= 1e-9, format!("worst partial-sum error {worst:.2e} (tol 1e-9)"))
}

fn discrepancy(f: u8) -> Res<f64> {
    let s = simulate(&figure_config(f, ModelSelect::Both))?.summary();
    Ok(s.max_discrepancy.unwrap())
}

fn weak_coupling_regime() -> Res<Verdict> {
    let (d2, d3) = (discrepancy(2)?, discrepancy(3)?);
    verdict(
        5.0 * d2 <= d3,
        format!("discrepancy kappa 1.8 {d2:.6} (baseline), kappa 5 {d3:.6}, ratio {:.2} (need >= 5)", d3 / d2),
    )
}

fn resonant_transfer() -> Res<Verdict> {
    let check = |p: SystemParams| -> Res<(f64, f64, f64, bool)> {
        let cfg = RunConfig {
            params: p,
            ..figure_config(2, ModelSelect::Rwa)
        };
        let out = simulate(&cfg)?;
        let tr = out.rwa.as_ref().unwrap();
        let max = first_maximum(&tr.t, &tr.n_b).ok_or("no n_b maximum")?;
        let min = first_minimum(&tr.t, &tr.n_a).ok_or("no n_a minimum")?;
        let t_star = FRAC_PI_2 / p.kappa;
        let ok = max.value >= 5.5 && (max.t - t_star).abs() <= cfg.dt_out + 1e-12 && min.value <= 0.2;
        Ok((max.value, max.t, min.value, ok))
    };
    let (nb, t, na, ok) = check(preset(2))?;
    let (nb0, t0, na0, ok0) = check(undamped(preset(2)))?;
    verdict(
        ok,
        format!(
            "first n_b max {nb:.3} at {t:.2} us (need >= 5.5 near {:.4}), first n_a min {na:.2e}; undamped: {nb0:.6} at {t0:.2}, min {na0:.1e}, would pass {ok0}",
            FRAC_PI_2 / 1.8
        ),
    )
}

fn detuned_incomplete() -> Res<Verdict> {
    let mut ok = true;
    let mut parts = Vec::new();
    for f in [4, 5] {
        let out = simulate(&figure_config(f, ModelSelect::Both))?;
        for tr in [out.rwa.as_ref().unwrap(), out.full.as_ref().unwrap()] {
            let m = first_maximum(&tr.t, &tr.n_b).ok_or("no n_b maximum")?;
            ok &= m.value < 6.0;
            parts.push(format!("fig {f} {} {:.3}", tr.model.name(), m.value));
        }
    }
    verdict(ok, format!("first n_b maxima {} (need < 6)", parts.join(", ")))
}

fn moment_oracle() -> Res<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let s = random_state(&mut rng, 0.8);
        let m = mean_occupations(&s)?;
        let f = fock_occupations(&fock_from_ansatz(&s, 120))?;
        worst = worst
            .max((m.norm - f.norm).abs())
            .max((m.n_a - f.n_a).abs())
            .max((m.n_b - f.n_b).abs());
    }
    verdict(worst <= 1e-8, format!("200 states, worst deviation {worst:.2e} (tol 1e-8)"))
}

fn conservation() -> Res<Verdict> {
    let p = undamped(preset(3));
    let g = grid(3.0, 0.1);
    let start = build_initial_fock(6.0, required_n_max(6.0)?)?;
    let run = |model| -> Res<Vec<(f64, f64, f64)>> {
        let mut prop = FockPropagator::new(&start, &p, model)?;
        let mut out = Vec::new();
        for &t in &g {
            prop.advance_to(t, DEFAULT_DT);
            let (m, _) = prop.moments()?;
            out.push((m.norm, m.n_a + m.n_b, prop.state().parity_expectation()?));
        }
        Ok(out)
    };
    let drift = |v: &[(f64, f64, f64)], k: fn(&(f64, f64, f64)) -> f64| {
        v.iter().map(|x| (k(x) - k(&v[0])).abs()).fold(0.0, f64::max)
    };
    let full = run(ModelKind::Full)?;
    let rwa = run(ModelKind::Rwa)?;
    let norm = drift(&full, |x| x.0).max(drift(&rwa, |x| x.0));
    let parity = full.iter().map(|x| (x.2 - 1.0).abs()).fold(0.0, f64::max);
    let excitation = drift(&rwa, |x| x.1);
    let ansatz = integrate(&initial_ansatz(6.0)?, &p, ModelKind::Full, &g, &IntegratorConfig::default())?;
    let ansatz_norm = ansatz.points.iter().map(|x| (x.moments.norm - 1.0).abs()).fold(0.0, f64::max);
    let norm = norm.max(ansatz_norm);
    verdict(
        norm <= 1e-9 && excitation <= 1e-9 && parity <= 1e-10,
        format!(
            "n_a0 6, Gamma 0, kappa 5: norm {norm:.1e} (tol 1e-9), RWA excitation {excitation:.1e} (tol 1e-9), Full parity {parity:.1e} (tol 1e-10)"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Res<Verdict>); 9] = [
        ("ansatz exactness", ansatz_exactness),
        ("analytic RWA", analytic_rwa),
        ("initial conditions", initial_conditions),
        ("series identities", series_identities),
        ("weak-coupling regime", weak_coupling_regime),
        ("resonant transfer", resonant_transfer),
        ("detuned incomplete transfer", detuned_incomplete),
        ("moment oracle", moment_oracle),
        ("conservation", conservation),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = f().unwrap_or_else(|e| Verdict {
            pass: false,
            detail: format!("error: {e}"),
        });
        failed += usize::from(!v.pass);
        println!("{} criterion {} ({name}): {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
