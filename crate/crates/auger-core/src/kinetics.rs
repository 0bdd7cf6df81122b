//! Time integration of the five-population rate equations.
//!
//! Level 3 and level 1 live for ~1e-7 s while the metastable dynamics run
//! over milliseconds to seconds, so the system is stiff by up to seven
//! decades. Integration therefore goes through an implicit (Rosenbrock)
//! stepper with the analytic 5x5 Jacobian supplied by this module; see
//! [`crate::rosenbrock`] for the scheme.
//!
//! Two variants of the dynamics are provided:
//!
//! * [`rhs`]/[`integrate`] — the closed system. Auger-emitted electrons
//!   accumulate in the reservoir `n_a` and the five-component sum is
//!   conserved exactly; the emitted flux slowly drains the four levels.
//! * [`rhs_replenished`]/[`integrate_replenished`] — continuous cathode
//!   operation. The contact resupplies the ground level at the emission
//!   rate, the four-level sum is conserved, and `n_a` counts cumulative
//!   emission. This is the setting in which the closed-form steady state
//!   of [`crate::steady`] is an actual fixed point.

use crate::model::{instantaneous_current, ModelError, PopulationState, SystemParams};
use crate::numeric::log_grid;
use crate::rosenbrock::{self, Mat5, Vec5};
use crate::table::{fmt_f64, TextTable};
use thiserror::Error;

/// Samples on the default output grid (logarithmic in time).
pub const DEFAULT_SAMPLES: usize = 512;

#[derive(Debug, Error)]
pub enum KineticsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid integration setup: {0}")]
    InvalidGrid(String),
    #[error("step limit {max_steps} exhausted at t = {t_reached}")]
    StepLimitExceeded { max_steps: usize, t_reached: f64 },
    #[error("non-finite state at t = {t}: {detail}")]
    NonFiniteState { t: f64, detail: String },
}

/// Adaptive-stepper tolerances and limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative tolerance per component.
    pub rel_tol: f64,
    /// Absolute tolerance, in population units.
    pub abs_tol: f64,
    /// Upper bound on the step size, seconds.
    pub max_step: f64,
    /// First trial step, seconds; also the start of the default output grid.
    pub initial_step: f64,
    /// Abort threshold on accepted steps.
    pub max_steps: usize,
}

impl SolverOptions {
    /// Defaults scaled to a parameter set: rel_tol 1e-10 and abs_tol
    /// 1e-12 N, an order of margin under the 1e-9 conservation target.
    pub fn for_params(params: &SystemParams) -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12 * params.n_total,
            max_step: f64::INFINITY,
            initial_step: 1e-2 * params.tau_1.min(params.tau_3),
            max_steps: 2_000_000,
        }
    }

    pub fn validate(&self) -> Result<(), KineticsError> {
        let bad = |what: &str| Err(KineticsError::InvalidGrid(what.to_string()));
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return bad("rel_tol must be positive");
        }
        if self.abs_tol.is_nan() || self.abs_tol <= 0.0 {
            return bad("abs_tol must be positive");
        }
        if self.max_step.is_nan() || self.max_step <= 0.0 {
            return bad("max_step must be positive");
        }
        if !self.initial_step.is_finite() || self.initial_step <= 0.0 {
            return bad("initial_step must be positive and finite");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive");
        }
        Ok(())
    }
}

/// Time derivatives of (n0, n1, n2, n3, n_a) for the closed system:
///
/// ```text
/// dn3/dt = w_p (n0 - n3) - n3/tau_3
/// dn2/dt = n3/tau_3 - gamma_A n2^2
/// dn1/dt = gamma_A n2^2 / 2 - n1/tau_1
/// dn0/dt = -w_p (n0 - n3) + n1/tau_1
/// dn_a/dt = gamma_A n2^2 / 2
/// ```
///
/// The five components sum to zero identically: each Auger collision moves
/// one electron to level 1 and one to the reservoir.
pub fn rhs(state: &PopulationState, params: &SystemParams) -> [f64; 5] {
    rhs_array(&state.to_array(), params, false)
}

/// Same as [`rhs`] with the emitted flux returned to the ground level, so the
/// four-level sum is conserved instead and `n_a` is a pure emission counter.
pub fn rhs_replenished(state: &PopulationState, params: &SystemParams) -> [f64; 5] {
    rhs_array(&state.to_array(), params, true)
}

fn rhs_array(y: &Vec5, params: &SystemParams, replenish: bool) -> Vec5 {
    let [n0, n1, n2, n3, _] = *y;
    let pump = params.w_p * (n0 - n3);
    let auger = params.gamma_a * n2 * n2;
    let relax1 = n1 / params.tau_1;
    let relax3 = n3 / params.tau_3;
    let mut d0 = -pump + relax1;
    if replenish {
        d0 += 0.5 * auger;
    }
    [
        d0,
        0.5 * auger - relax1,
        relax3 - auger,
        pump - relax3,
        0.5 * auger,
    ]
}

/// Analytic Jacobian of [`rhs`]. All entries are constant in the state except
/// the level-2 column, where the collision term contributes -2 gamma_A n2 on
/// the diagonal and +gamma_A n2 to the level-1 and reservoir rows.
pub fn jacobian(state: &PopulationState, params: &SystemParams) -> [[f64; 5]; 5] {
    jacobian_array(&state.to_array(), params, false)
}

/// Analytic Jacobian of [`rhs_replenished`].
pub fn jacobian_replenished(state: &PopulationState, params: &SystemParams) -> [[f64; 5]; 5] {
    jacobian_array(&state.to_array(), params, true)
}

fn jacobian_array(y: &Vec5, params: &SystemParams, replenish: bool) -> Mat5 {
    let n2 = y[2];
    let w = params.w_p;
    let g2 = params.gamma_a * n2;
    let r1 = 1.0 / params.tau_1;
    let r3 = 1.0 / params.tau_3;
    let mut j = [[0.0; 5]; 5];
    j[0][0] = -w;
    j[0][1] = r1;
    j[0][3] = w;
    if replenish {
        j[0][2] = g2;
    }
    j[1][1] = -r1;
    j[1][2] = g2;
    j[2][2] = -2.0 * g2;
    j[2][3] = r3;
    j[3][0] = w;
    j[3][3] = -w - r3;
    j[4][2] = g2;
    j
}

/// How long the system takes to settle: the slowest of the level lifetimes,
/// the pump period, and the Auger collision time at full population.
pub fn relaxation_timescale(params: &SystemParams) -> f64 {
    assert!(params.w_p > 0.0, "relaxation timescale undefined at zero pump");
    params
        .tau_1
        .max(params.tau_3)
        .max(1.0 / params.w_p)
        .max(1.0 / (params.gamma_a * params.n_total))
}

/// One output sample of a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct TrajectorySample {
    pub t: f64,
    pub state: PopulationState,
    /// Instantaneous photocurrent (beta/2) gamma_A n2^2.
    pub current: f64,
}

/// Time-ordered integration output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub initial: PopulationState,
    /// Whether the run used ground-level replenishment.
    pub replenished: bool,
    /// Accepted steps taken.
    pub steps: usize,
}

impl Trajectory {
    pub fn final_sample(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory holds the t=0 sample")
    }

    /// The quantity the dynamics conserve: the five-component sum for the
    /// closed system, the four-level sum under replenishment.
    pub fn conserved_total(&self, state: &PopulationState) -> f64 {
        if self.replenished {
            state.four_level_total()
        } else {
            state.total()
        }
    }

    /// Largest relative drift of the conserved total over all samples.
    pub fn max_conservation_error(&self) -> f64 {
        let reference = self.conserved_total(&self.initial);
        self.samples
            .iter()
            .map(|s| (self.conserved_total(&s.state) - reference).abs() / reference)
            .fold(0.0, f64::max)
    }

    /// Delimited table (t, n0, n1, n2, n3, n_a, j_ph), full precision.
    pub fn to_table(&self) -> String {
        let mut t = TextTable::new(vec!["t", "n0", "n1", "n2", "n3", "n_a", "j_ph"]);
        for s in &self.samples {
            t.push_row(vec![
                fmt_f64(s.t),
                fmt_f64(s.state.n0),
                fmt_f64(s.state.n1),
                fmt_f64(s.state.n2),
                fmt_f64(s.state.n3),
                fmt_f64(s.state.n_a),
                fmt_f64(s.current),
            ]);
        }
        t.render()
    }
}

/// Integrates the closed system from `initial` to `t_end`, sampling on the
/// default logarithmic grid (t = 0 plus [`DEFAULT_SAMPLES`] points from
/// `opts.initial_step` to `t_end`).
pub fn integrate(
    params: &SystemParams,
    initial: &PopulationState,
    t_end: f64,
    opts: &SolverOptions,
) -> Result<Trajectory, KineticsError> {
    let grid = default_grid(t_end, opts)?;
    integrate_impl(params, initial, &grid, opts, false)
}

/// [`integrate`] with ground-level replenishment.
pub fn integrate_replenished(
    params: &SystemParams,
    initial: &PopulationState,
    t_end: f64,
    opts: &SolverOptions,
) -> Result<Trajectory, KineticsError> {
    let grid = default_grid(t_end, opts)?;
    integrate_impl(params, initial, &grid, opts, true)
}

/// Integrates the closed system, sampling at the caller's grid times
/// (strictly increasing, all positive; the last entry is the horizon).
pub fn integrate_on_grid(
    params: &SystemParams,
    initial: &PopulationState,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<Trajectory, KineticsError> {
    integrate_impl(params, initial, grid, opts, false)
}

/// [`integrate_on_grid`] with ground-level replenishment.
pub fn integrate_replenished_on_grid(
    params: &SystemParams,
    initial: &PopulationState,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<Trajectory, KineticsError> {
    integrate_impl(params, initial, grid, opts, true)
}

fn default_grid(t_end: f64, opts: &SolverOptions) -> Result<Vec<f64>, KineticsError> {
    if !t_end.is_finite() || t_end <= 0.0 {
        return Err(KineticsError::InvalidGrid(format!(
            "t_end must be positive and finite, got {t_end}"
        )));
    }
    if opts.initial_step >= t_end {
        return Err(KineticsError::InvalidGrid(format!(
            "initial_step {} must fall below t_end {}",
            opts.initial_step, t_end
        )));
    }
    Ok(log_grid(opts.initial_step, t_end, DEFAULT_SAMPLES))
}

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 6.0;

fn error_norm(y: &Vec5, y_new: &Vec5, err: &Vec5, opts: &SolverOptions) -> f64 {
    let mut sum = 0.0;
    for i in 0..rosenbrock::DIM {
        let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
        let e = err[i] / scale;
        sum += e * e;
    }
    (sum / rosenbrock::DIM as f64).sqrt()
}

fn check_state(y: &Vec5, t: f64, abs_tol: f64) -> Result<(), KineticsError> {
    for (i, &v) in y.iter().enumerate() {
        if !v.is_finite() {
            return Err(KineticsError::NonFiniteState {
                t,
                detail: format!("component {i} is {v}"),
            });
        }
        if v < -abs_tol {
            return Err(KineticsError::NonFiniteState {
                t,
                detail: format!("component {i} fell to {v}, below -abs_tol = {:e}", -abs_tol),
            });
        }
    }
    Ok(())
}

/// Output-side positivity: values within abs_tol below zero are rounded up
/// to exactly zero. Internal states are never modified, so conservation is
/// untouched.
fn clamped_sample(y: &Vec5, abs_tol: f64) -> Vec5 {
    let mut out = *y;
    for v in &mut out {
        if *v < 0.0 && *v >= -abs_tol {
            *v = 0.0;
        }
    }
    out
}

fn integrate_impl(
    params: &SystemParams,
    initial: &PopulationState,
    grid: &[f64],
    opts: &SolverOptions,
    replenish: bool,
) -> Result<Trajectory, KineticsError> {
    params.validate()?;
    initial.validate()?;
    opts.validate()?;
    if grid.is_empty() {
        return Err(KineticsError::InvalidGrid("empty sample grid".into()));
    }
    if grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(KineticsError::InvalidGrid(
            "sample grid must be strictly increasing and positive".into(),
        ));
    }

    let f = |y: &Vec5| rhs_array(y, params, replenish);
    let mut y = initial.to_array();
    let mut t = 0.0;
    let mut h = opts.initial_step.min(opts.max_step).min(grid[0]);
    let mut steps = 0usize;
    let mut samples = Vec::with_capacity(grid.len() + 1);

    let push_sample = |samples: &mut Vec<TrajectorySample>, t: f64, y: &Vec5| {
        let state = PopulationState::from_array(clamped_sample(y, opts.abs_tol));
        let current = instantaneous_current(&state, params);
        samples.push(TrajectorySample { t, state, current });
    };
    push_sample(&mut samples, 0.0, &y);

    for &target in grid {
        while t < target {
            let remaining = target - t;
            // Too close to resolve in floating point: snap to the target.
            if remaining <= 4.0 * f64::EPSILON * target {
                break;
            }
            steps += 1;
            if steps > opts.max_steps {
                return Err(KineticsError::StepLimitExceeded {
                    max_steps: opts.max_steps,
                    t_reached: t,
                });
            }

            let f0 = f(&y);
            if f0.iter().any(|v| !v.is_finite()) {
                return Err(KineticsError::NonFiniteState {
                    t,
                    detail: "rate evaluation overflowed".into(),
                });
            }
            let jac = jacobian_array(&y, params, replenish);

            let mut h_attempt = h.min(opts.max_step).min(remaining);
            let hitting_target = h_attempt >= remaining;
            let mut rejected = false;
            loop {
                if h_attempt < f64::EPSILON * t.abs().max(opts.initial_step) {
                    return Err(KineticsError::NonFiniteState {
                        t,
                        detail: format!("step size underflow (h = {h_attempt:e})"),
                    });
                }
                let Some(result) = rosenbrock::try_step(&f, &y, &f0, &jac, h_attempt) else {
                    h_attempt *= 0.5;
                    rejected = true;
                    continue;
                };
                let err = error_norm(&y, &result.y, &result.err, opts);
                if !err.is_finite() {
                    h_attempt *= 0.25;
                    rejected = true;
                    continue;
                }
                if err > 1.0 {
                    let scale = (SAFETY * err.powf(-0.25)).clamp(MIN_SCALE, 1.0);
                    h_attempt *= scale;
                    rejected = true;
                    continue;
                }

                // accepted
                y = result.y;
                if hitting_target && h_attempt >= remaining {
                    t = target;
                } else {
                    t += h_attempt;
                }
                check_state(&y, t, opts.abs_tol)?;
                let mut scale = if err > 0.0 {
                    (SAFETY * err.powf(-0.25)).clamp(MIN_SCALE, MAX_SCALE)
                } else {
                    MAX_SCALE
                };
                if rejected {
                    scale = scale.min(1.0);
                }
                // A step clipped short to land on a grid point says nothing
                // about accuracy, so keep the controller's step then — unless
                // the error test rejected it, which is real information.
                h = if hitting_target && !rejected && h_attempt < h {
                    h
                } else {
                    h_attempt * scale
                };
                break;
            }
        }
        t = target;
        push_sample(&mut samples, t, &y);
    }

    Ok(Trajectory {
        samples,
        initial: *initial,
        replenished: replenish,
        steps,
    })
}
