//! Brute-force reference in a truncated two-mode number basis.
//!
//! Amplitudes `c[n_a][n_b]`, `0 <= n_a, n_b <= n_max`, are stored row-major.
//! The Hamiltonian is applied matrix-free as a nearest-neighbour stencil on
//! the number grid. Time evolution uses fixed-step RK4 in the frame rotating
//! with the (diagonal, non-Hermitian) free part, so only the coupling enters
//! the stepper and the free evolution of every number state is exact.
//! Both Hamiltonians conserve the total parity `(-1)^(n_a+n_b)`; states of
//! definite parity only touch half of the grid.

use alloc::vec;
use alloc::vec::Vec;

use crate::ansatz::{initial_ansatz, AnsatzState};
use crate::error::{Error, Result};
use crate::integrator::validate_grid;
use crate::moments::MomentRecord;
use crate::params::{ModelKind, SystemParams};
use crate::C64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

/// Captured probability required of a freshly built initial state.
pub const CAPTURE_TOL: f64 = 1e-10;
/// Bound on truncation leakage and outer-shell mass, relative to the norm.
pub const LEAKAGE_TOL: f64 = 1e-6;
/// Largest allowed change of any occupation when the time step is halved.
pub const CONVERGENCE_TOL: f64 = 1e-8;
/// Default RK4 step [µs].
pub const DEFAULT_DT: f64 = 1e-4;

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    n_max: usize,
    amps: Vec<C64>,
    leakage: f64,
}

impl FockState {
    pub fn zeros(n_max: usize) -> Self {
        FockState {
            n_max,
            amps: vec![ZERO; (n_max + 1) * (n_max + 1)],
            leakage: 0.0,
        }
    }

    /// The number state `|n_a, n_b⟩`.
    pub fn basis(n_max: usize, n_a: usize, n_b: usize) -> Self {
        let mut s = FockState::zeros(n_max);
        s.set(n_a, n_b, C64::new(1.0, 0.0));
        s
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    #[inline]
    fn dim(&self) -> usize {
        self.n_max + 1
    }

    #[inline]
    pub fn get(&self, n_a: usize, n_b: usize) -> C64 {
        self.amps[n_a * self.dim() + n_b]
    }

    #[inline]
    pub fn set(&mut self, n_a: usize, n_b: usize, value: C64) {
        let d = self.dim();
        self.amps[n_a * d + n_b] = value;
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// Mass dropped at the truncation boundary, accumulated during evolution
    /// (or by a single [`apply_hamiltonian`]).
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Total `|c|²` in the two outermost shells of either mode.
    pub fn outer_shell_mass(&self) -> f64 {
        let edge = self.n_max.saturating_sub(1);
        let d = self.dim();
        self.amps
            .iter()
            .enumerate()
            .filter(|(k, _)| k / d >= edge || k % d >= edge)
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    /// `⟨(-1)^(n_a+n_b)⟩`, normalized.
    pub fn parity_expectation(&self) -> Result<f64> {
        let d = self.dim();
        let mut signed = 0.0;
        let mut total = 0.0;
        for (k, c) in self.amps.iter().enumerate() {
            let p = c.norm_sqr();
            total += p;
            if (k / d + k % d) % 2 == 0 {
                signed += p;
            } else {
                signed -= p;
            }
        }
        if total == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(signed / total)
    }
}

fn sqrt_table(n_max: usize) -> Vec<f64> {
    (0..=n_max + 1).map(|n| (n as f64).sqrt()).collect()
}

/// Number-basis expansion of the ansatz state, from the ladder identities
/// `a|ψ⟩ = (2α₁a† + α₂b†)|ψ⟩` and `b|ψ⟩ = (α₂a† + 2α₃b†)|ψ⟩`.
pub fn fock_from_ansatz(state: &AnsatzState, n_max: usize) -> FockState {
    let mut out = FockState::zeros(n_max);
    let sq = sqrt_table(n_max);
    let (a1x2, a2, a3x2) = (state.alpha1 * 2.0, state.alpha2, state.alpha3 * 2.0);
    out.set(0, 0, state.rho);
    // row 0 from the b identity: √(j+1) c[0][j+1] = 2α₃ √j c[0][j-1]
    for j in 0..n_max {
        let prev = if j > 0 { out.get(0, j - 1) * sq[j] } else { ZERO };
        out.set(0, j + 1, a3x2 * prev / sq[j + 1]);
    }
    // row i+1 from the a identity: √(i+1) c[i+1][j] = 2α₁ √i c[i-1][j] + α₂ √j c[i][j-1]
    for i in 0..n_max {
        for j in 0..=n_max {
            let mut acc = ZERO;
            if i > 0 {
                acc += a1x2 * out.get(i - 1, j) * sq[i];
            }
            if j > 0 {
                acc += a2 * out.get(i, j - 1) * sq[j];
            }
            out.set(i + 1, j, acc / sq[i + 1]);
        }
    }
    out
}

fn check_truncation(n_max: usize) -> Result<()> {
    if n_max < 2 || n_max % 2 != 0 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            value: n_max as f64,
            reason: "must be even and >= 2",
        });
    }
    Ok(())
}

/// Squeezed cantilever vacuum with mean occupation `n_a0`, only even
/// cantilever numbers populated: `c[2n][0] = ρ α₁ⁿ √((2n)!) / n!`.
pub fn build_initial_fock(n_a0: f64, n_max: usize) -> Result<FockState> {
    check_truncation(n_max)?;
    let s = initial_ansatz(n_a0)?;
    let mut out = FockState::zeros(n_max);
    let mut c = s.rho;
    let mut n = 0usize;
    while 2 * n <= n_max {
        out.set(2 * n, 0, c);
        let nf = n as f64;
        c *= s.alpha1 * ((2.0 * nf + 1.0) * (2.0 * nf + 2.0)).sqrt() / (nf + 1.0);
        n += 1;
    }
    let captured = out.norm_sqr();
    if captured < 1.0 - CAPTURE_TOL {
        return Err(Error::TruncationTooSmall { n_max, captured });
    }
    Ok(out)
}

/// Smallest even `n_max` for which [`build_initial_fock`] captures all but
/// `CAPTURE_TOL` of the initial state.
pub fn required_n_max(n_a0: f64) -> Result<usize> {
    let s = initial_ansatz(n_a0)?;
    let mut c2 = s.rho.norm_sqr();
    let ratio = s.alpha1.norm_sqr();
    let mut captured = 0.0;
    let mut n = 0usize;
    loop {
        captured += c2;
        if captured >= 1.0 - CAPTURE_TOL {
            return Ok((2 * n).max(2));
        }
        let nf = n as f64;
        c2 *= ratio * (2.0 * nf + 1.0) * (2.0 * nf + 2.0) / ((nf + 1.0) * (nf + 1.0));
        n += 1;
        if n > 1_000_000 {
            return Err(Error::Domain {
                value: n_a0,
                reason: "initial occupation too large for a Fock truncation",
            });
        }
    }
}

/// Coupling coefficients for the four ladder pairs `[a†b†, ab, a†b, ab†]`.
type Couplings = [C64; 4];

/// `dst(i,j) = Σ coupling · (ladder pair acting on src)(i,j) + diag(i,j) src(i,j)`
/// over the whole grid.
#[inline(always)]
fn stencil<D, E>(
    src: &[C64],
    n: usize,
    sq: &[f64],
    coup: &Couplings,
    diag: D,
    mut emit: E,
) where
    D: Fn(usize, usize) -> C64,
    E: FnMut(usize, C64),
{
    let d = n + 1;
    let counter_rotating = coup[0] != ZERO || coup[1] != ZERO;
    for i in 0..=n {
        let row = i * d;
        let c_cr_up = coup[0] * sq[i];
        let c_r_up = coup[2] * sq[i];
        let c_cr_down = coup[1] * sq[i + 1];
        let c_r_down = coup[3] * sq[i + 1];
        for j in 0..=n {
            let mut acc = diag(i, j) * src[row + j];
            if i > 0 {
                let up = row - d;
                if j < n {
                    acc += c_r_up * (src[up + j + 1] * sq[j + 1]);
                }
                if counter_rotating && j > 0 {
                    acc += c_cr_up * (src[up + j - 1] * sq[j]);
                }
            }
            if i < n {
                let down = row + d;
                if j > 0 {
                    acc += c_r_down * (src[down + j - 1] * sq[j]);
                }
                if counter_rotating && j < n {
                    acc += c_cr_down * (src[down + j + 1] * sq[j + 1]);
                }
            }
            emit(row + j, acc);
        }
    }
}

/// Components of the stencil output that fall outside the grid, passed to
/// `visit(n_a, n_b, value)`.
fn boundary_overflow<F>(src: &[C64], n: usize, sq: &[f64], coup: &Couplings, mut visit: F)
where
    F: FnMut(usize, usize, C64),
{
    let d = n + 1;
    let at = |i: usize, j: usize| src[i * d + j];
    // row n+1: a†b† from (n, j-1), a†b from (n, j+1)
    for j in 0..=n + 1 {
        let mut acc = ZERO;
        if j >= 1 && j - 1 <= n {
            acc += coup[0] * sq[n + 1] * sq[j] * at(n, j - 1);
        }
        if j < n {
            acc += coup[2] * sq[n + 1] * sq[j + 1] * at(n, j + 1);
        }
        visit(n + 1, j, acc);
    }
    // column n+1: a†b† from (i-1, n), ab† from (i+1, n)
    for i in 0..=n {
        let mut acc = ZERO;
        if i >= 1 {
            acc += coup[0] * sq[i] * sq[n + 1] * at(i - 1, n);
        }
        if i < n {
            acc += coup[3] * sq[i + 1] * sq[n + 1] * at(i + 1, n);
        }
        visit(i, n + 1, acc);
    }
}

fn schrodinger_couplings(params: &SystemParams, model: ModelKind) -> Couplings {
    let k = C64::new(-params.kappa, 0.0);
    match model {
        ModelKind::Full => [k, k, k, k],
        ModelKind::Rwa => [ZERO, ZERO, k, k],
    }
}

/// `H|ψ⟩` with `H = (ω-iΓ_a) a†a + (ν-iΓ_b) b†b - κ·coupling`. Amplitude
/// pushed past `n_max` is dropped and its mass recorded in `leakage()`.
pub fn apply_hamiltonian(state: &FockState, params: &SystemParams, model: ModelKind) -> FockState {
    let n = state.n_max;
    let sq = sqrt_table(n);
    let coup = schrodinger_couplings(params, model);
    let wa = params.damped_omega();
    let wb = params.damped_nu();
    let mut out = FockState::zeros(n);
    let dst = &mut out.amps;
    stencil(
        &state.amps,
        n,
        &sq,
        &coup,
        |i, j| wa * i as f64 + wb * j as f64,
        |k, v| dst[k] = v,
    );
    let mut dropped = 0.0;
    boundary_overflow(&state.amps, n, &sq, &coup, |_, _, v| dropped += v.norm_sqr());
    out.leakage = dropped;
    out
}

/// Normalized occupations of a number-basis state.
pub fn fock_occupations(state: &FockState) -> Result<MomentRecord> {
    let d = state.dim();
    let (mut norm, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (k, c) in state.amps.iter().enumerate() {
        let p = c.norm_sqr();
        norm += p;
        na += (k / d) as f64 * p;
        nb += (k % d) as f64 * p;
    }
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok(MomentRecord {
        norm,
        n_a: na / norm,
        n_b: nb / norm,
    })
}

/// Storage for the two parity sublattices of the number grid.
///
/// Sublattice `p` holds the cells with `(n_a + n_b) % 2 == p`. Row `n_a`
/// of that sublattice stores the columns `n_b ≡ n_a + p (mod 2)` contiguously,
/// surrounded by a one-cell zero border, so the diagonal neighbours
/// `(n_a ± 1, n_b ± 1)` of a row are contiguous runs of the adjacent rows.
#[derive(Debug, Clone, Copy)]
struct Checkerboard {
    n: usize,
    width: usize,
    sub_len: usize,
}

impl Checkerboard {
    fn new(n: usize) -> Self {
        let width = n / 2 + 3;
        Checkerboard {
            n,
            width,
            sub_len: (n + 3) * width,
        }
    }

    fn len(&self) -> usize {
        2 * self.sub_len
    }

    /// Number of stored columns in a row whose columns have parity `r`.
    #[inline]
    fn count(&self, r: usize) -> usize {
        if r > self.n {
            0
        } else {
            (self.n - r) / 2 + 1
        }
    }

    /// Index of the first stored column of row `i` in sublattice `p`.
    #[inline]
    fn row_start(&self, p: usize, i: usize) -> usize {
        p * self.sub_len + (i + 1) * self.width + 1
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        self.row_start((i + j) % 2, i) + j / 2
    }
}

/// Fixed-step RK4 propagator in the interaction picture of the free part
/// `H₀ = (ω-iΓ_a) n_a + (ν-iΓ_b) n_b`.
///
/// The rotating-frame amplitudes `c̃ = e^{iH₀t} c` obey `dc̃/dt = -i V(t) c̃`
/// where each ladder pair of the coupling picks up a scalar phase
/// `e^{±i(Ω_a ± Ω_b)t}` (complex, so it also carries the damping).
#[derive(Debug, Clone)]
pub struct FockPropagator {
    params: SystemParams,
    model: ModelKind,
    n_max: usize,
    board: Checkerboard,
    /// Which parity sublattices carry amplitude.
    active: [bool; 2],
    sq: Vec<f64>,
    /// `sq_plus[r][k] = √(2k+r+1)`, `sq_minus[r][k] = √(2k+r)`
    sq_plus: [Vec<f64>; 2],
    sq_minus: [Vec<f64>; 2],
    t: f64,
    tilde: Vec<C64>,
    acc: Vec<C64>,
    stage_a: Vec<C64>,
    stage_b: Vec<C64>,
    leakage: f64,
}

struct StageWeights {
    acc: f64,
    next: f64,
}

/// One RK4 stage over an active sublattice: evaluates `k = -iV c̃` on `src`,
/// then `acc = base + w·k` (first stage) or `acc += w·k`, and unless this is
/// the last stage `next = base + w_next·k`.
#[inline(always)]
#[allow(clippy::too_many_arguments)]
fn rk4_stage<const COUNTER_ROTATING: bool, const FIRST: bool, const LAST: bool>(
    prop_board: &Checkerboard,
    p: usize,
    sq: &[f64],
    sq_plus: &[Vec<f64>; 2],
    sq_minus: &[Vec<f64>; 2],
    coup: &Couplings,
    w: &StageWeights,
    src: &[C64],
    base: &[C64],
    acc: &mut [C64],
    next: &mut [C64],
) {
    let board = *prop_board;
    let width = board.width;
    for i in 0..=board.n {
        let r = (i + p) % 2;
        let cnt = board.count(r);
        if cnt == 0 {
            continue;
        }
        let row = board.row_start(p, i);
        let (plus_off, minus_off) = if r == 0 { (row, row - 1) } else { (row + 1, row) };
        let c_cr_up = coup[0] * sq[i];
        let c_r_up = coup[2] * sq[i];
        let c_cr_down = coup[1] * sq[i + 1];
        let c_r_down = coup[3] * sq[i + 1];

        let up_plus = &src[plus_off - width..][..cnt];
        let up_minus = &src[minus_off - width..][..cnt];
        let down_plus = &src[plus_off + width..][..cnt];
        let down_minus = &src[minus_off + width..][..cnt];
        let sqp = &sq_plus[r][..cnt];
        let sqm = &sq_minus[r][..cnt];
        let base = &base[row..][..cnt];
        let acc = &mut acc[row..][..cnt];
        let next = &mut next[row..][..cnt];

        for k in 0..cnt {
            let plus = if COUNTER_ROTATING {
                c_r_up * up_plus[k] + c_cr_down * down_plus[k]
            } else {
                c_r_up * up_plus[k]
            };
            let minus = if COUNTER_ROTATING {
                c_cr_up * up_minus[k] + c_r_down * down_minus[k]
            } else {
                c_r_down * down_minus[k]
            };
            let d = plus * sqp[k] + minus * sqm[k];
            if FIRST {
                acc[k] = base[k] + d * w.acc;
            } else {
                acc[k] += d * w.acc;
            }
            if !LAST {
                next[k] = base[k] + d * w.next;
            }
        }
    }
}

impl FockPropagator {
    pub fn new(state: &FockState, params: &SystemParams, model: ModelKind) -> Result<Self> {
        params.validate()?;
        let n = state.n_max;
        let board = Checkerboard::new(n);
        let mut tilde = vec![ZERO; board.len()];
        let mut active = [false; 2];
        for i in 0..=n {
            for j in 0..=n {
                let v = state.get(i, j);
                tilde[board.index(i, j)] = v;
                if v != ZERO {
                    active[(i + j) % 2] = true;
                }
            }
        }
        let sq = sqrt_table(n);
        let table = |r: usize, shift: usize| -> Vec<f64> {
            (0..board.count(0)).map(|k| ((2 * k + r + shift) as f64).sqrt()).collect()
        };
        Ok(FockPropagator {
            params: *params,
            model,
            n_max: n,
            board,
            active,
            sq,
            sq_plus: [table(0, 1), table(1, 1)],
            sq_minus: [table(0, 0), table(1, 0)],
            t: 0.0,
            acc: tilde.clone(),
            stage_a: tilde.clone(),
            stage_b: tilde.clone(),
            tilde,
            leakage: state.leakage,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    #[inline]
    fn amp(&self, i: usize, j: usize) -> C64 {
        self.tilde[self.board.index(i, j)]
    }

    /// `-i V(t)` as coefficients of `[a†b†, ab, a†b, ab†]`.
    fn couplings(&self, t: f64) -> Couplings {
        let ik = I * self.params.kappa;
        let sum = self.params.damped_omega() + self.params.damped_nu();
        let diff = self.params.damped_omega() - self.params.damped_nu();
        let rot_up = (I * diff * t).exp();
        let rot_down = (-I * diff * t).exp();
        match self.model {
            ModelKind::Full => [
                ik * (I * sum * t).exp(),
                ik * (-I * sum * t).exp(),
                ik * rot_up,
                ik * rot_down,
            ],
            ModelKind::Rwa => [ZERO, ZERO, ik * rot_up, ik * rot_down],
        }
    }

    /// Free-evolution factor `e^{-iΩt·n}` for `n = 0..=n_max`.
    fn free_factors(&self, omega: C64, t: f64) -> Vec<C64> {
        (0..=self.n_max)
            .map(|n| (-I * omega * (t * n as f64)).exp())
            .collect()
    }

    /// Mass that the first RK stage would push past the grid, in the lab frame.
    fn dropped_mass(&self, dt: f64) -> f64 {
        let n = self.n_max;
        let t = self.t;
        let coup = self.couplings(t);
        let (ga, gb) = (self.params.gamma_a, self.params.gamma_b);
        let sq = &self.sq;
        let decay = |i: usize, j: usize| (-2.0 * (ga * i as f64 + gb * j as f64) * t).exp();
        let mut dropped = 0.0;
        // row n+1: a†b† from (n, j-1), a†b from (n, j+1)
        for j in 0..=n + 1 {
            let mut v = ZERO;
            if j >= 1 {
                v += coup[0] * sq[j] * self.amp(n, j - 1);
            }
            if j < n {
                v += coup[2] * sq[j + 1] * self.amp(n, j + 1);
            }
            dropped += (v * (sq[n + 1] * dt)).norm_sqr() * decay(n + 1, j);
        }
        // column n+1: a†b† from (i-1, n), ab† from (i+1, n)
        for i in 0..=n {
            let mut v = ZERO;
            if i >= 1 {
                v += coup[0] * sq[i] * self.amp(i - 1, n);
            }
            if i < n {
                v += coup[3] * sq[i + 1] * self.amp(i + 1, n);
            }
            dropped += (v * (sq[n + 1] * dt)).norm_sqr() * decay(i, n + 1);
        }
        dropped
    }

    /// One RK4 step of length `dt`.
    pub fn step(&mut self, dt: f64) {
        self.leakage += self.dropped_mass(dt);
        match self.model {
            ModelKind::Full => self.rk4::<true>(dt),
            ModelKind::Rwa => self.rk4::<false>(dt),
        }
        core::mem::swap(&mut self.tilde, &mut self.acc);
        self.t += dt;
    }

    fn rk4<const CR: bool>(&mut self, dt: f64) {
        let t = self.t;
        let c1 = self.couplings(t);
        let c2 = self.couplings(t + 0.5 * dt);
        let c4 = self.couplings(t + dt);
        let w_first = StageWeights { acc: dt / 6.0, next: 0.5 * dt };
        let w_second = StageWeights { acc: dt / 3.0, next: 0.5 * dt };
        let w_third = StageWeights { acc: dt / 3.0, next: dt };
        let w_last = StageWeights { acc: dt / 6.0, next: 0.0 };
        let FockPropagator {
            board,
            active,
            sq,
            sq_plus,
            sq_minus,
            tilde,
            acc,
            stage_a,
            stage_b,
            ..
        } = self;
        for p in 0..2 {
            if !active[p] {
                continue;
            }
            let geo = (&*board, p, &sq[..], &*sq_plus, &*sq_minus);
            rk4_stage::<CR, true, false>(
                geo.0, geo.1, geo.2, geo.3, geo.4, &c1, &w_first, tilde, tilde, acc, stage_a,
            );
            rk4_stage::<CR, false, false>(
                geo.0, geo.1, geo.2, geo.3, geo.4, &c2, &w_second, stage_a, tilde, acc, stage_b,
            );
            rk4_stage::<CR, false, false>(
                geo.0, geo.1, geo.2, geo.3, geo.4, &c2, &w_third, stage_b, tilde, acc, stage_a,
            );
            // the last stage never writes `next`; stage_b is only a placeholder
            rk4_stage::<CR, false, true>(
                geo.0, geo.1, geo.2, geo.3, geo.4, &c4, &w_last, stage_a, tilde, acc, stage_b,
            );
        }
    }

    /// Advances to `t_target` with steps no longer than `dt`.
    pub fn advance_to(&mut self, t_target: f64, dt: f64) {
        let span = t_target - self.t;
        if span <= 0.0 {
            return;
        }
        let steps = ((span / dt) - 1e-9).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for _ in 0..steps {
            self.step(h);
        }
        self.t = t_target;
    }

    /// Lab-frame state at the current time.
    pub fn state(&self) -> FockState {
        let fa = self.free_factors(self.params.damped_omega(), self.t);
        let fb = self.free_factors(self.params.damped_nu(), self.t);
        let n = self.n_max;
        let mut out = FockState::zeros(n);
        for i in 0..=n {
            for j in 0..=n {
                out.set(i, j, self.amp(i, j) * fa[i] * fb[j]);
            }
        }
        out.leakage = self.leakage;
        out
    }

    /// Lab-frame moments and outer-shell mass without materializing the state.
    pub fn moments(&self) -> Result<(MomentRecord, f64)> {
        let n = self.n_max;
        let t = self.t;
        let wa: Vec<f64> = (0..=n)
            .map(|i| (-2.0 * self.params.gamma_a * t * i as f64).exp())
            .collect();
        let wb: Vec<f64> = (0..=n)
            .map(|j| (-2.0 * self.params.gamma_b * t * j as f64).exp())
            .collect();
        let edge = n.saturating_sub(1);
        let (mut norm, mut na, mut nb, mut outer) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..=n {
            for j in 0..=n {
                let p = self.amp(i, j).norm_sqr() * wa[i] * wb[j];
                norm += p;
                na += i as f64 * p;
                nb += j as f64 * p;
                if i >= edge || j >= edge {
                    outer += p;
                }
            }
        }
        if !(norm > 0.0) {
            return Err(Error::ZeroNorm);
        }
        Ok((
            MomentRecord {
                norm,
                n_a: na / norm,
                n_b: nb / norm,
            },
            outer,
        ))
    }

    fn check_leakage(&self, norm: f64, outer: f64) -> Result<()> {
        let worst = self.leakage.max(outer);
        if worst > LEAKAGE_TOL * norm {
            return Err(Error::LeakageExceeded {
                t: self.t,
                leakage: worst / norm,
            });
        }
        Ok(())
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            reason: "must be finite and > 0",
        });
    }
    Ok(())
}

/// Snapshots of the evolved state at every grid time.
pub fn evolve_fock(
    state: &FockState,
    params: &SystemParams,
    model: ModelKind,
    t_grid: &[f64],
    dt: f64,
) -> Result<Vec<(f64, FockState)>> {
    validate_grid(t_grid)?;
    check_dt(dt)?;
    let mut prop = FockPropagator::new(state, params, model)?;
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        prop.advance_to(t, dt);
        let (m, outer) = prop.moments()?;
        prop.check_leakage(m.norm, outer)?;
        out.push((t, prop.state()));
    }
    Ok(out)
}

/// Like [`evolve_fock`] but keeps only the moments at each grid time.
pub fn evolve_fock_moments(
    state: &FockState,
    params: &SystemParams,
    model: ModelKind,
    t_grid: &[f64],
    dt: f64,
) -> Result<Vec<(f64, MomentRecord)>> {
    validate_grid(t_grid)?;
    check_dt(dt)?;
    let mut prop = FockPropagator::new(state, params, model)?;
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        prop.advance_to(t, dt);
        let (m, outer) = prop.moments()?;
        prop.check_leakage(m.norm, outer)?;
        out.push((t, m));
    }
    Ok(out)
}

/// Most step halvings [`evolve_fock_converged`] attempts.
pub const MAX_HALVINGS: usize = 4;

/// Outcome of a step-size convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergedEvolution {
    /// Moments from the finest run.
    pub samples: Vec<(f64, MomentRecord)>,
    /// Step of the finest run.
    pub dt: f64,
    /// Largest change of `n_a` or `n_b` over the grid between the two finest runs.
    pub dt_change: f64,
}

/// Evolves at `dt`, `dt/2`, `dt/4`, … until halving the step moves no
/// occupation by more than [`CONVERGENCE_TOL`]; fails with
/// [`Error::NotConverged`] after [`MAX_HALVINGS`] halvings.
pub fn evolve_fock_converged(
    state: &FockState,
    params: &SystemParams,
    model: ModelKind,
    t_grid: &[f64],
    dt: f64,
) -> Result<ConvergedEvolution> {
    let mut dt = dt;
    let mut coarse = evolve_fock_moments(state, params, model, t_grid, dt)?;
    let mut dt_change = f64::INFINITY;
    for _ in 0..MAX_HALVINGS {
        dt *= 0.5;
        let fine = evolve_fock_moments(state, params, model, t_grid, dt)?;
        dt_change = coarse
            .iter()
            .zip(fine.iter())
            .map(|((_, a), (_, b))| (a.n_a - b.n_a).abs().max((a.n_b - b.n_b).abs()))
            .fold(0.0, f64::max);
        if dt_change <= CONVERGENCE_TOL {
            return Ok(ConvergedEvolution {
                samples: fine,
                dt,
                dt_change,
            });
        }
        coarse = fine;
    }
    Err(Error::NotConverged { change: dt_change })
}
