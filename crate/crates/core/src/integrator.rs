//! Adaptive Dormand–Prince 5(4) integration of the ansatz equations with
//! PI step-size control and 4th-order dense output at requested times.

use alloc::vec::Vec;

use crate::ansatz::AnsatzState;
use crate::dynamics::{rhs, AnsatzDerivative};
use crate::error::{Error, Result};
use crate::moments::{mean_occupations, MomentRecord};
use crate::params::{ModelKind, SystemParams};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

/// Largest admissible singular value of the squeeze matrix.
pub const BREAKDOWN_THRESHOLD: f64 = 1.0 - 1e-9;

const MAX_STEPS: usize = 50_000_000;

/// Local errors are held this far below the requested tolerance. Occupations
/// amplify state errors by up to `(1 - 4|α|²)⁻²`, about 50 for six quanta,
/// and the tolerances are meant to bound the reported observables.
pub const TOLERANCE_SAFETY: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// [µs]
    pub max_step: f64,
    /// [µs]
    pub initial_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: 0.05,
            initial_step: 1e-4,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
            ("initial_step", self.initial_step),
        ];
        for (name, value) in checks {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and > 0",
                });
            }
        }
        Ok(())
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        IntegratorConfig { rel_tol, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub state: AnsatzState,
    pub moments: MomentRecord,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.t)
    }

    pub fn last(&self) -> Option<&TrajectoryPoint> {
        self.points.last()
    }
}

/// Checks that `grid` starts at exactly 0 and is strictly increasing.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    match grid.first() {
        Some(&t0) if t0 == 0.0 => {}
        _ => return Err(Error::InvalidGrid { index: 0 }),
    }
    for (i, w) in grid.windows(2).enumerate() {
        if !(w[1] > w[0]) || !w[1].is_finite() {
            return Err(Error::InvalidGrid { index: i + 1 });
        }
    }
    Ok(())
}

/// Integrates the ansatz under `model` and records the state and moments at
/// every grid time.
pub fn integrate(
    initial: &AnsatzState,
    params: &SystemParams,
    model: ModelKind,
    t_grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    integrate_with(rhs(model), initial, params, t_grid, cfg)
}

/// Same as [`integrate`] with a caller-supplied right-hand side.
pub fn integrate_with<F>(
    rhs: F,
    initial: &AnsatzState,
    params: &SystemParams,
    t_grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory>
where
    F: Fn(&AnsatzState, &SystemParams) -> AnsatzDerivative,
{
    params.validate()?;
    cfg.validate()?;
    validate_grid(t_grid)?;

    let check = |t: f64, y: &[f64; 8]| -> Result<()> {
        let s = AnsatzState::from_real(y);
        if !s.is_finite() {
            return Err(Error::AnsatzBreakdown {
                t,
                singular_value: f64::NAN,
            });
        }
        let sv = s.squeeze_matrix().largest_singular_value();
        if sv > BREAKDOWN_THRESHOLD {
            return Err(Error::AnsatzBreakdown {
                t,
                singular_value: sv,
            });
        }
        Ok(())
    };
    check(0.0, &initial.to_real())?;

    let samples = dopri5(
        |_t, y: &[f64; 8]| rhs(&AnsatzState::from_real(y), params).to_real(),
        initial.to_real(),
        t_grid,
        cfg,
        check,
    )?;

    let mut points = Vec::with_capacity(samples.len());
    for (&t, y) in t_grid.iter().zip(samples.iter()) {
        let state = AnsatzState::from_real(y);
        let moments = mean_occupations(&state).map_err(|_| Error::AnsatzBreakdown {
            t,
            singular_value: state.squeeze_matrix().largest_singular_value(),
        })?;
        points.push(TrajectoryPoint { t, state, moments });
    }
    Ok(Trajectory { points })
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// difference between the 5th and 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// dense output
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI controller
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

fn combine<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// Integrates `y' = f(t, y)` from `grid[0]` and returns `y` at every grid
/// time. `accept` is called after each accepted step and may abort.
pub(crate) fn dopri5<const N: usize, F, G>(
    mut f: F,
    y0: [f64; N],
    grid: &[f64],
    cfg: &IntegratorConfig,
    mut accept: G,
) -> Result<Vec<[f64; N]>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    G: FnMut(f64, &[f64; N]) -> Result<()>,
{
    let mut out = Vec::with_capacity(grid.len());
    out.push(y0);
    let t_end = match grid.last() {
        Some(&t) => t,
        None => return Ok(out),
    };

    let mut t = grid[0];
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = cfg.initial_step.min(cfg.max_step);
    let mut fac_old = 1e-4;
    let mut last_rejected = false;
    let mut next = 1;
    let mut steps = 0usize;

    while next < grid.len() {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        let remaining = t_end - t;
        let hits_end = h >= remaining;
        if hits_end {
            h = remaining;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, h });
        }

        let k2 = f(t + C2 * h, &combine(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &combine(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(
            t + C4 * h,
            &combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            t + C5 * h,
            &combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &combine(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = combine(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(t + h, &y_new);

        let mut err = 0.0f64;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                + E7 * k7[i]);
            let scale = TOLERANCE_SAFETY
                * (cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs()));
            err = err.max(e.abs() / scale);
        }
        if !err.is_finite() {
            h *= FAC_MIN;
            last_rejected = true;
            continue;
        }

        let fac11 = err.powf(EXPO1);
        let fac = (fac11 / fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let mut h_new = h / fac;

        if err <= 1.0 {
            fac_old = err.max(1e-4);
            let t_new = if hits_end { t_end } else { t + h };
            accept(t_new, &y_new)?;

            // dense output for grid points inside (t, t_new]
            while next < grid.len() && grid[next] <= t_new {
                let tg = grid[next];
                if tg == t_new {
                    out.push(y_new);
                } else {
                    let theta = (tg - t) / h;
                    let theta1 = 1.0 - theta;
                    let mut yi = [0.0; N];
                    for i in 0..N {
                        let ydiff = y_new[i] - y[i];
                        let bspl = h * k1[i] - ydiff;
                        let r4 = ydiff - h * k7[i] - bspl;
                        let r5 = h
                            * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                                + D7 * k7[i]);
                        yi[i] = y[i] + theta * (ydiff + theta1 * (bspl + theta * (r4 + theta1 * r5)));
                    }
                    out.push(yi);
                }
                next += 1;
            }

            t = t_new;
            y = y_new;
            k1 = k7;
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
        } else {
            h_new = h / (fac11 / SAFETY).min(1.0 / FAC_MIN);
            last_rejected = true;
        }
        h = h_new.min(cfg.max_step);
    }
    Ok(out)
}
