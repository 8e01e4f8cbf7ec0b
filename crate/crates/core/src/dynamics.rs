//! Momentum-form time integration, Lagrangian flow transport and blowup
//! detection.
//!
//! The momentum is evolved spectrally and the velocity recovered through the
//! gated inertia inverse at every stage, which keeps the quotient constraint
//! exact for all three equations. The flow `(eta, eta_theta)` shares the RK4
//! stages of the momentum so the transporting velocity is stage-consistent by
//! construction. Fixed-step RK4 keeps trajectories bit-reproducible under a
//! fixed configuration.

use alloc::vec;
use alloc::vec::Vec;

use crate::analysis::compute_g;
use crate::error::DynamicsError;
use crate::field::{uniform_grid, FourierField, SobolevOrder};
use crate::operator::{InertiaOperator, OperatorKind};

/// Resolution, step control and blowup thresholds for one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub operator: OperatorKind,
    /// Spectral band limit N.
    pub band_limit: usize,
    /// Lagrangian grid points M (default 2N).
    pub flow_points: usize,
    pub dt: f64,
    pub t_final: f64,
    /// Declare wave breaking when `min eta_theta` falls to this floor.
    pub slope_floor: f64,
    /// Declare trouble when the top third of the momentum spectrum carries
    /// more than this energy fraction.
    pub tail_limit: f64,
    /// Steps between recorded samples.
    pub sample_every: usize,
    /// Keep integrating after a blowup trigger; post-blowup data is
    /// reproduced for comparison only.
    pub continue_past_blowup: bool,
}

impl SimulationConfig {
    pub fn new(operator: OperatorKind) -> Self {
        SimulationConfig {
            operator,
            band_limit: 256,
            flow_points: 512,
            dt: 1e-4,
            t_final: 0.5,
            slope_floor: 1e-3,
            tail_limit: 0.01,
            sample_every: 10,
            continue_past_blowup: false,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(DynamicsError::InvalidConfig { field: "dt", message: "must be positive" });
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(DynamicsError::InvalidConfig { field: "t_final", message: "must be positive" });
        }
        if self.band_limit < 4 {
            return Err(DynamicsError::InvalidConfig { field: "band_limit", message: "must be >= 4" });
        }
        if self.flow_points < 4 {
            return Err(DynamicsError::InvalidConfig { field: "flow_points", message: "must be >= 4" });
        }
        if !(self.slope_floor > 0.0 && self.slope_floor < 1.0) {
            return Err(DynamicsError::InvalidConfig { field: "slope_floor", message: "must lie in (0, 1)" });
        }
        if !(self.tail_limit > 0.0 && self.tail_limit < 1.0) {
            return Err(DynamicsError::InvalidConfig { field: "tail_limit", message: "must lie in (0, 1)" });
        }
        if self.sample_every == 0 {
            return Err(DynamicsError::InvalidConfig { field: "sample_every", message: "must be >= 1" });
        }
        Ok(())
    }
}

/// Momentum and derived velocity at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionState {
    pub time: f64,
    pub momentum: FourierField,
    pub velocity: FourierField,
}

impl SolutionState {
    /// Starts from a velocity field: the kernel modes are projected away and
    /// the momentum is `Lambda u`.
    pub fn from_velocity(op: &InertiaOperator, time: f64, u: &FourierField) -> Self {
        let velocity = match op.kind() {
            OperatorKind::Clm => op.project_representative(u).scale(-1.0),
            _ => op.project_representative(u),
        };
        let momentum = op.apply(&velocity);
        let velocity = match op.kind() {
            OperatorKind::Clm => velocity.scale(-1.0),
            _ => velocity,
        };
        SolutionState { time, momentum, velocity }
    }

    /// Starts from a momentum field; fails on kernel contamination.
    pub fn from_momentum(
        op: &InertiaOperator,
        time: f64,
        momentum: FourierField,
    ) -> Result<Self, DynamicsError> {
        let velocity = velocity_from_momentum(op, &momentum)?;
        Ok(SolutionState { time, momentum, velocity })
    }
}

/// Recovers the transporting velocity from the momentum. For Wunsch and EWP
/// this is the inertia inverse; the CLM velocity relation `v_x = H omega`
/// gives `v = -Lambda^{-1} omega` with the shared `|n|` symbol.
pub fn velocity_from_momentum(
    op: &InertiaOperator,
    momentum: &FourierField,
) -> Result<FourierField, DynamicsError> {
    let u = op.invert(momentum)?;
    Ok(match op.kind() {
        OperatorKind::Clm => u.scale(-1.0),
        _ => u,
    })
}

/// `d omega / dt = -(u omega' + 2 u' omega)`, dealiased and projected off
/// the kernel modes.
pub fn eulerian_rhs(op: &InertiaOperator, state: &SolutionState) -> FourierField {
    let u = &state.velocity;
    let w = &state.momentum;
    let rhs = u
        .multiply(&w.derivative(1))
        .add_scaled(&u.derivative(1).multiply(w), 2.0)
        .scale(-1.0);
    op.project_representative(&rhs)
}

/// `d omega / dt = (H omega) omega` for the periodic CLM analogue. The
/// product has mean zero analytically; the mode is zeroed to keep it exact.
pub fn clm_rhs(state: &SolutionState) -> FourierField {
    let w = &state.momentum;
    w.hilbert().multiply(w).zero_modes(&[0])
}

/// Momentum right-hand side for the configured equation, taking the raw
/// momentum field (the velocity is re-derived internally).
pub fn momentum_rhs(op: &InertiaOperator, momentum: &FourierField) -> Result<FourierField, DynamicsError> {
    match op.kind() {
        OperatorKind::Clm => Ok(momentum.hilbert().multiply(momentum).zero_modes(&[0])),
        _ => {
            let u = op.invert(momentum)?;
            let rhs = u
                .multiply(&momentum.derivative(1))
                .add_scaled(&u.derivative(1).multiply(momentum), 2.0)
                .scale(-1.0);
            Ok(op.project_representative(&rhs))
        }
    }
}

/// One classical four-stage Runge-Kutta step of the momentum under an
/// arbitrary right-hand side; the new velocity is derived through the
/// inertia inverse.
pub fn step_rk4<F>(
    mut rhs: F,
    op: &InertiaOperator,
    state: &SolutionState,
    dt: f64,
) -> Result<SolutionState, DynamicsError>
where
    F: FnMut(f64, &FourierField) -> Result<FourierField, DynamicsError>,
{
    assert!(dt > 0.0, "dt must be positive");
    let t = state.time;
    let w0 = &state.momentum;
    let k1 = rhs(t, w0)?;
    let k2 = rhs(t + 0.5 * dt, &w0.add_scaled(&k1, 0.5 * dt))?;
    let k3 = rhs(t + 0.5 * dt, &w0.add_scaled(&k2, 0.5 * dt))?;
    let k4 = rhs(t + dt, &w0.add_scaled(&k3, dt))?;
    let slope = k1.add_scaled(&k2, 2.0).add_scaled(&k3, 2.0).add_scaled(&k4, 1.0);
    let w1 = w0.add_scaled(&slope, dt / 6.0);
    if !w1.is_finite() {
        return Err(DynamicsError::NonFiniteState { time: t + dt });
    }
    let u1 = velocity_from_momentum(op, &w1)?;
    Ok(SolutionState { time: t + dt, momentum: w1, velocity: u1 })
}

/// Samples of the Lagrangian flow and its spatial derivative on a uniform
/// grid. `eta` is stored as a lift: strictly increasing with
/// `eta(theta + 2 pi) = eta(theta) + 2 pi` while the flow is a
/// diffeomorphism.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianState {
    pub grid: Vec<f64>,
    pub eta: Vec<f64>,
    pub eta_theta: Vec<f64>,
}

impl LagrangianState {
    pub fn identity(points: usize) -> Self {
        let grid = uniform_grid(points);
        LagrangianState { eta: grid.clone(), eta_theta: vec![1.0; points], grid }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn min_slope(&self) -> f64 {
        self.eta_theta.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn is_increasing_lift(&self) -> bool {
        let m = self.len();
        (0..m).all(|j| {
            let next = if j + 1 < m { self.eta[j + 1] } else { self.eta[0] + 2.0 * core::f64::consts::PI };
            next > self.eta[j]
        })
    }

    fn is_finite(&self) -> bool {
        self.eta.iter().chain(self.eta_theta.iter()).all(|v| v.is_finite())
    }
}

fn axpy(a: &[f64], b: &[f64], h: f64) -> Vec<f64> {
    a.iter().zip(b.iter()).map(|(x, y)| x + h * y).collect()
}

fn rk4_combine(y0: &[f64], k1: &[f64], k2: &[f64], k3: &[f64], k4: &[f64], dt: f64) -> Vec<f64> {
    y0.iter()
        .zip(k1.iter().zip(k2.iter()).zip(k3.iter().zip(k4.iter())))
        .map(|(y, ((a, b), (c, d)))| y + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d))
        .collect()
}

/// Flow rates at one stage: `d eta = u(eta)`, `d eta_theta = u'(eta) eta_theta`.
fn flow_rates(u: &FourierField, eta: &[f64], eta_theta: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut uv = vec![0.0; eta.len()];
    let mut du = vec![0.0; eta.len()];
    u.evaluate_with_derivative(eta, &mut uv, &mut du);
    let sigma: Vec<f64> = du.iter().zip(eta_theta.iter()).map(|(d, s)| d * s).collect();
    (uv, sigma)
}

/// RK4 step of `(eta, eta_theta)` under a velocity supplied per stage time;
/// used directly by tests with frozen velocity fields.
pub fn advance_flow_with<V>(
    mut velocity_at: V,
    lag: &LagrangianState,
    t: f64,
    dt: f64,
) -> Result<LagrangianState, DynamicsError>
where
    V: FnMut(f64) -> FourierField,
{
    let u1 = velocity_at(t);
    let (e1, s1) = flow_rates(&u1, &lag.eta, &lag.eta_theta);
    let u2 = velocity_at(t + 0.5 * dt);
    let (e2, s2) = flow_rates(&u2, &axpy(&lag.eta, &e1, 0.5 * dt), &axpy(&lag.eta_theta, &s1, 0.5 * dt));
    let (e3, s3) = flow_rates(&u2, &axpy(&lag.eta, &e2, 0.5 * dt), &axpy(&lag.eta_theta, &s2, 0.5 * dt));
    let u4 = velocity_at(t + dt);
    let (e4, s4) = flow_rates(&u4, &axpy(&lag.eta, &e3, dt), &axpy(&lag.eta_theta, &s3, dt));
    let out = LagrangianState {
        grid: lag.grid.clone(),
        eta: rk4_combine(&lag.eta, &e1, &e2, &e3, &e4, dt),
        eta_theta: rk4_combine(&lag.eta_theta, &s1, &s2, &s3, &s4, dt),
    };
    if !out.is_finite() {
        return Err(DynamicsError::NonFiniteState { time: t + dt });
    }
    Ok(out)
}

/// Joint RK4 step of momentum and flow with shared stages, so the flow is
/// transported by stage-consistent velocities of the same solve.
pub fn step_with_flow(
    op: &InertiaOperator,
    state: &SolutionState,
    lag: &LagrangianState,
    dt: f64,
) -> Result<(SolutionState, LagrangianState), DynamicsError> {
    assert!(dt > 0.0, "dt must be positive");
    let t = state.time;
    let w0 = &state.momentum;

    let k1 = momentum_rhs(op, w0)?;
    let (e1, s1) = flow_rates(&state.velocity, &lag.eta, &lag.eta_theta);

    let wa = w0.add_scaled(&k1, 0.5 * dt);
    let ua = velocity_from_momentum(op, &wa)?;
    let k2 = momentum_rhs(op, &wa)?;
    let (e2, s2) = flow_rates(&ua, &axpy(&lag.eta, &e1, 0.5 * dt), &axpy(&lag.eta_theta, &s1, 0.5 * dt));

    let wb = w0.add_scaled(&k2, 0.5 * dt);
    let ub = velocity_from_momentum(op, &wb)?;
    let k3 = momentum_rhs(op, &wb)?;
    let (e3, s3) = flow_rates(&ub, &axpy(&lag.eta, &e2, 0.5 * dt), &axpy(&lag.eta_theta, &s2, 0.5 * dt));

    let wc = w0.add_scaled(&k3, dt);
    let uc = velocity_from_momentum(op, &wc)?;
    let k4 = momentum_rhs(op, &wc)?;
    let (e4, s4) = flow_rates(&uc, &axpy(&lag.eta, &e3, dt), &axpy(&lag.eta_theta, &s3, dt));

    let slope = k1.add_scaled(&k2, 2.0).add_scaled(&k3, 2.0).add_scaled(&k4, 1.0);
    let w1 = w0.add_scaled(&slope, dt / 6.0);
    if !w1.is_finite() {
        return Err(DynamicsError::NonFiniteState { time: t + dt });
    }
    let u1 = velocity_from_momentum(op, &w1)?;
    let new_lag = LagrangianState {
        grid: lag.grid.clone(),
        eta: rk4_combine(&lag.eta, &e1, &e2, &e3, &e4, dt),
        eta_theta: rk4_combine(&lag.eta_theta, &s1, &s2, &s3, &s4, dt),
    };
    if !new_lag.is_finite() {
        return Err(DynamicsError::NonFiniteState { time: t + dt });
    }
    Ok((SolutionState { time: t + dt, momentum: w1, velocity: u1 }, new_lag))
}

/// RK4 update of the flow driven by the Eulerian solve; the interior stage
/// velocities come from the shared stages of [`step_with_flow`].
pub fn advance_flow(
    op: &InertiaOperator,
    state: &SolutionState,
    lag: &LagrangianState,
    dt: f64,
) -> Result<LagrangianState, DynamicsError> {
    step_with_flow(op, state, lag, dt).map(|(_, l)| l)
}

/// Max-norm defect of the Wunsch conservation law
/// `eta_theta^2 * omega(t, eta) - omega0` over the flow grid.
pub fn conservation_residual(
    state: &SolutionState,
    lag: &LagrangianState,
    omega0: &FourierField,
) -> f64 {
    let along = state.momentum.evaluate_at(&lag.eta);
    let initial = omega0.evaluate_at(&lag.grid);
    lag.eta_theta
        .iter()
        .zip(along.iter())
        .zip(initial.iter())
        .fold(0.0f64, |m, ((&s, &w), &w0)| m.max(libm::fabs(s * s * w - w0)))
}

/// Second-time-derivative of the flow slope in the Wunsch Lagrangian form:
/// `omega0^2 / eta_theta^3 - F(eta) * eta_theta`.
pub fn wunsch_lagrangian_accel(
    omega0_at_theta: f64,
    eta_theta: f64,
    f_at_eta: f64,
) -> Result<f64, DynamicsError> {
    if eta_theta <= 0.0 {
        return Err(DynamicsError::DegenerateSlope { value: eta_theta });
    }
    Ok(omega0_at_theta * omega0_at_theta / (eta_theta * eta_theta * eta_theta) - f_at_eta * eta_theta)
}

/// Rate of change of `u_theta` along the EWP flow: `(-F + G)(eta_j)`,
/// with the nonlocal part of `F` entering through the restricted Helmholtz
/// inverse of the derivation, which zeroes modes `|n| <= 1`. Whenever
/// `u Hu''` carries no such modes the rate is literally `-F + G`; in
/// general the projection is what the quotient dynamics actually obeys.
pub fn ewp_slope_rate(
    op: &InertiaOperator,
    state: &SolutionState,
    lag: &LagrangianState,
) -> Result<Vec<f64>, DynamicsError> {
    assert_eq!(op.kind(), OperatorKind::Ewp, "slope rate is the EWP forcing balance");
    let u = &state.velocity;
    let wide = (2 * u.band_limit()).max(1);
    let up = u.pad_to(wide);
    let upp = up.derivative(2);
    let local = up.multiply(&upp);
    let nonlocal = up.multiply(&upp.hilbert()).hilbert().zero_modes(&[-1, 0, 1]);
    let minus_f = local.add_scaled(&nonlocal, 1.0);
    let g = compute_g(u).map_err(DynamicsError::Spectral)?;
    let rate = minus_f.add_scaled(&g.pad_to(wide), 1.0);
    Ok(rate.evaluate_at(&lag.eta))
}

/// Per-sample diagnostics along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleDiagnostics {
    pub time: f64,
    /// Conserved seminorm energy of the velocity for the equation at hand
    /// (`H^{1/2}` for Wunsch and CLM, `H^{3/2}` for EWP).
    pub energy: f64,
    pub min_u_theta: f64,
    pub max_abs_u: f64,
    /// Momentum energy fraction in the top third of the band.
    pub tail_fraction: f64,
    pub min_eta_theta: f64,
    pub max_abs_u_theta: f64,
}

/// Full state captured at a requested snapshot time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub state: SolutionState,
    pub flow: LagrangianState,
}

/// What the detector concluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlowupVerdict {
    None,
    Detected { bracket: (f64, f64), trigger: BlowupTrigger },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowupTrigger {
    SlopeCollapse,
    SpectralTail,
}

/// Sampled diagnostics, optional snapshots and the blowup verdict of a run.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub operator: OperatorKind,
    pub samples: Vec<SampleDiagnostics>,
    pub snapshots: Vec<Snapshot>,
    pub verdict: BlowupVerdict,
}

fn diagnostics(op: &InertiaOperator, state: &SolutionState, lag: &LagrangianState) -> SampleDiagnostics {
    let energy_order = match op.kind() {
        OperatorKind::Ewp => SobolevOrder::ThreeHalves,
        _ => SobolevOrder::Half,
    };
    let u_theta = state.velocity.derivative(1);
    let (dmin, dmax) = u_theta.extrema();
    SampleDiagnostics {
        time: state.time,
        energy: state.velocity.seminorm_sq(energy_order),
        min_u_theta: dmin,
        max_abs_u: state.velocity.sup_norm(),
        tail_fraction: state.momentum.tail_energy_fraction(),
        min_eta_theta: lag.min_slope(),
        max_abs_u_theta: dmax.max(-dmin).max(0.0),
    }
}

fn sample_unhealthy(s: &SampleDiagnostics, config: &SimulationConfig) -> bool {
    s.min_eta_theta <= config.slope_floor || s.tail_fraction > config.tail_limit
}

/// Integrates one trajectory from the given initial velocity. Snapshots are
/// captured at the step times nearest to `snapshot_times`. The run stops at
/// the first unhealthy sample unless `continue_past_blowup` is set; the
/// verdict is attached to the returned record.
pub fn run_simulation(
    config: &SimulationConfig,
    u0: &FourierField,
    snapshot_times: &[f64],
) -> Result<TrajectoryRecord, DynamicsError> {
    config.validate()?;
    let op = InertiaOperator::new(config.operator);
    let u0 = if u0.band_limit() <= config.band_limit {
        u0.pad_to(config.band_limit)
    } else {
        u0.truncated(config.band_limit)
    };
    let mut state = SolutionState::from_velocity(&op, 0.0, &u0);
    let mut lag = LagrangianState::identity(config.flow_points);

    let n_steps = libm::round(config.t_final / config.dt) as usize;
    let snap_steps: Vec<usize> = snapshot_times
        .iter()
        .map(|&t| libm::round(t / config.dt) as usize)
        .collect();

    let mut samples = vec![diagnostics(&op, &state, &lag)];
    let mut snapshots = Vec::new();
    if snap_steps.contains(&0) {
        snapshots.push(Snapshot { state: state.clone(), flow: lag.clone() });
    }

    for step in 1..=n_steps {
        let (next_state, next_lag) = step_with_flow(&op, &state, &lag, config.dt)?;
        state = next_state;
        lag = next_lag;
        // pin sample times to the step grid exactly
        state.time = step as f64 * config.dt;

        if snap_steps.contains(&step) {
            snapshots.push(Snapshot { state: state.clone(), flow: lag.clone() });
        }
        if step % config.sample_every == 0 || step == n_steps {
            let sample = diagnostics(&op, &state, &lag);
            let unhealthy = sample_unhealthy(&sample, config);
            samples.push(sample);
            if unhealthy && !config.continue_past_blowup {
                break;
            }
        }
    }

    let mut record =
        TrajectoryRecord { operator: config.operator, samples, snapshots, verdict: BlowupVerdict::None };
    record.verdict = detect_blowup(&record, config)?;
    Ok(record)
}

/// Scans a record for the first unhealthy sample and returns the bracketing
/// interval between the last healthy and first unhealthy sample times. A
/// tail-energy trigger with no prior slope trend (a 10% drop of
/// `min eta_theta` from its initial value) is inconclusive: the run is
/// under-resolved rather than breaking.
pub fn detect_blowup(
    record: &TrajectoryRecord,
    config: &SimulationConfig,
) -> Result<BlowupVerdict, DynamicsError> {
    let samples = &record.samples;
    assert!(!samples.is_empty(), "record must contain at least one sample");
    let initial_slope = samples[0].min_eta_theta;
    if sample_unhealthy(&samples[0], config) {
        return Err(DynamicsError::InconclusiveResolution { time: samples[0].time });
    }
    let mut lowest_slope = initial_slope;
    for pair in samples.windows(2) {
        let (prev, cur) = (&pair[0], &pair[1]);
        lowest_slope = lowest_slope.min(prev.min_eta_theta);
        if sample_unhealthy(cur, config) {
            let slope_triggered = cur.min_eta_theta <= config.slope_floor;
            if !slope_triggered {
                let trend_established = lowest_slope.min(cur.min_eta_theta) <= 0.9 * initial_slope;
                if !trend_established {
                    return Err(DynamicsError::InconclusiveResolution { time: cur.time });
                }
            }
            let trigger = if slope_triggered {
                BlowupTrigger::SlopeCollapse
            } else {
                BlowupTrigger::SpectralTail
            };
            return Ok(BlowupVerdict::Detected { bracket: (prev.time, cur.time), trigger });
        }
    }
    Ok(BlowupVerdict::None)
}

/// Tightens a detected bracket by re-running with halved steps and
/// per-step sampling, once per level. Restarting from t = 0 keeps the
/// refinement a pure function of the configuration.
pub fn refine_blowup(
    config: &SimulationConfig,
    u0: &FourierField,
    bracket: (f64, f64),
    levels: u32,
) -> Result<BlowupVerdict, DynamicsError> {
    let mut cfg = config.clone();
    let mut verdict = BlowupVerdict::Detected { bracket, trigger: BlowupTrigger::SlopeCollapse };
    for _ in 0..levels {
        cfg.dt *= 0.5;
        cfg.sample_every = 1;
        cfg.t_final = match verdict {
            BlowupVerdict::Detected { bracket, .. } => bracket.1 + 2.0 * cfg.dt,
            BlowupVerdict::None => return Ok(BlowupVerdict::None),
        };
        let record = run_simulation(&cfg, u0, &[])?;
        verdict = record.verdict;
    }
    Ok(verdict)
}
