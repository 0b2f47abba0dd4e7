//! Shared ODE stepping machinery.
//!
//! All integrators in this crate drive real first-order systems
//! y' = f(t, y); complex states are flattened to interleaved (re, im) pairs
//! by their callers so one stepper serves every module. Two methods are
//! provided:
//!
//! - `Rk4Fixed`: classical fourth-order Runge–Kutta with a fixed step
//!   (`initial_step`), substepping so that every requested sample time is hit
//!   exactly;
//! - `Rk45Adaptive`: the Dormand–Prince 5(4) embedded pair with PI step-size
//!   control (safety factor 0.9) and fourth-order dense output, evaluated at
//!   the requested sample times.
//!
//! Integration may run forward or backward in time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time-stepping method selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Classical RK4 with fixed step size (`initial_step`).
    Rk4Fixed,
    /// Dormand–Prince 5(4) with adaptive step-size control.
    Rk45Adaptive,
}

/// Integrator configuration shared by all modules.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Absolute error tolerance per component (adaptive method).
    pub abs_tol: f64,
    /// Relative error tolerance per component (adaptive method).
    pub rel_tol: f64,
    /// Upper bound on the step magnitude.
    pub max_step: f64,
    /// First step to try; for `Rk4Fixed` this is the fixed step size.
    pub initial_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::Rk45Adaptive,
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_step: 0.1,
            initial_step: 1e-3,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::ContractViolation(
                "integrator tolerances must be positive".into(),
            ));
        }
        if !(self.max_step > 0.0 && self.initial_step > 0.0) {
            return Err(Error::ContractViolation(
                "integrator step bounds must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A time interval with a number of equally spaced sample points (>= 2).
///
/// `end < start` requests backward integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSpan {
    pub start: f64,
    pub end: f64,
    pub n_samples: usize,
}

impl TimeSpan {
    pub fn new(start: f64, end: f64, n_samples: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) {
            return Err(Error::ContractViolation("time span must be finite".into()));
        }
        if n_samples < 2 {
            return Err(Error::ContractViolation(
                "time span needs at least 2 samples".into(),
            ));
        }
        if end == start {
            return Err(Error::ContractViolation(
                "time span must have nonzero length".into(),
            ));
        }
        Ok(TimeSpan {
            start,
            end,
            n_samples,
        })
    }

    /// Equally spaced sample times from `start` to `end` inclusive.
    pub fn sample_times(&self) -> Vec<f64> {
        let n = self.n_samples;
        let dt = (self.end - self.start) / (n - 1) as f64;
        (0..n)
            .map(|k| {
                if k == n - 1 {
                    self.end
                } else {
                    self.start + k as f64 * dt
                }
            })
            .collect()
    }
}

/// Hard cap on accepted+rejected steps, to turn runaway configurations into
/// a reported failure instead of a hang.
const MAX_STEPS: usize = 50_000_000;

// Dormand–Prince 5(4) tableau (Hairer, Nørsett & Wanner, DOPRI5).
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// The 5th-order propagation weights coincide with the last row of A (FSAL),
// so y_new is the 7th stage point and needs no separate weight vector.
// Error weights: 5th-order minus embedded 4th-order solution.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Dense-output weights for the fifth interpolation coefficient.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

// PI controller parameters (Hairer's dopri5 defaults).
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;

/// Integrate y' = f(t, y) across `span`, returning the state at each sample
/// time (including both endpoints).
pub fn integrate_ode<F>(
    mut f: F,
    y0: &[f64],
    span: TimeSpan,
    config: &IntegratorConfig,
) -> Result<Vec<(f64, Vec<f64>)>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    config.validate()?;
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::ContractViolation(
            "initial state must be finite".into(),
        ));
    }
    match config.method {
        Method::Rk4Fixed => rk4_fixed(&mut f, y0, span, config),
        Method::Rk45Adaptive => dopri5(&mut f, y0, span, config),
    }
}

fn rk4_step<F>(f: &mut F, t: f64, y: &[f64], h: f64, work: &mut Rk4Work) -> Vec<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    let Rk4Work { k1, k2, k3, k4, tmp } = work;
    f(t, y, k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    f(t + 0.5 * h, tmp, k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    f(t + 0.5 * h, tmp, k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    f(t + h, tmp, k4);
    (0..n)
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

struct Rk4Work {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Work {
    fn new(n: usize) -> Self {
        Rk4Work {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }
}

fn rk4_fixed<F>(
    f: &mut F,
    y0: &[f64],
    span: TimeSpan,
    config: &IntegratorConfig,
) -> Result<Vec<(f64, Vec<f64>)>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let times = span.sample_times();
    let h_nominal = config.initial_step.min(config.max_step);
    let mut work = Rk4Work::new(y0.len());
    let mut y = y0.to_vec();
    let mut out = Vec::with_capacity(times.len());
    out.push((times[0], y.clone()));
    let mut steps_taken = 0usize;
    for w in times.windows(2) {
        let (t_a, t_b) = (w[0], w[1]);
        let interval = t_b - t_a;
        let n_sub = (interval.abs() / h_nominal).ceil().max(1.0) as usize;
        let h = interval / n_sub as f64;
        let mut t = t_a;
        for _ in 0..n_sub {
            y = rk4_step(f, t, &y, h, &mut work);
            t += h;
            steps_taken += 1;
            if steps_taken > MAX_STEPS {
                return Err(Error::IntegrationFailure {
                    last_good_time: t,
                    reason: format!("exceeded {MAX_STEPS} steps"),
                });
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::IntegrationFailure {
                    last_good_time: t - h,
                    reason: "non-finite state encountered".into(),
                });
            }
        }
        out.push((t_b, y.clone()));
    }
    Ok(out)
}

fn dopri5<F>(
    f: &mut F,
    y0: &[f64],
    span: TimeSpan,
    config: &IntegratorConfig,
) -> Result<Vec<(f64, Vec<f64>)>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let times = span.sample_times();
    let dir = (span.end - span.start).signum();

    let mut y = y0.to_vec();
    let mut t = span.start;
    let mut h = dir * config.initial_step.min(config.max_step).abs();

    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; n]).collect();
    let mut y_stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];

    // First derivative evaluation; reused through FSAL afterwards.
    f(t, &y, &mut k[0]);

    let mut out: Vec<(f64, Vec<f64>)> = Vec::with_capacity(times.len());
    out.push((times[0], y.clone()));
    let mut next_sample = 1usize;

    let mut err_old: f64 = 1e-4;
    let mut n_steps = 0usize;

    while (t - span.end) * dir < 0.0 {
        n_steps += 1;
        if n_steps > MAX_STEPS {
            return Err(Error::IntegrationFailure {
                last_good_time: t,
                reason: format!("exceeded {MAX_STEPS} steps"),
            });
        }
        // Do not step past the end point.
        if (t + h - span.end) * dir > 0.0 {
            h = span.end - t;
        }
        if h.abs() < f64::EPSILON * t.abs().max(1.0) * 4.0 {
            return Err(Error::IntegrationFailure {
                last_good_time: t,
                reason: format!("step size underflow (h = {h:e})"),
            });
        }

        // Stages 2..7 (stage 1 comes from FSAL).
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                y_stage[i] = y[i] + h * acc;
            }
            if s == 6 {
                // Seventh stage is evaluated at y_new = y + h Σ b_j k_j,
                // which equals the stage-7 row of A (FSAL).
                y_new.copy_from_slice(&y_stage);
            }
            f(t + C[s] * h, &y_stage, &mut k[s]);
        }

        // Error estimate with mixed absolute/relative scaling.
        let mut err_sq = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            e *= h;
            let sc = config.abs_tol + config.rel_tol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / sc) * (e / sc);
        }
        let err = (err_sq / n as f64).sqrt();

        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            return Err(Error::IntegrationFailure {
                last_good_time: t,
                reason: "non-finite state or error estimate".into(),
            });
        }

        if err <= 1.0 {
            // Accept. Emit any samples inside this step, interpolating where
            // they fall strictly in the interior.
            let t_new = t + h;
            let mut cont: Option<[Vec<f64>; 5]> = None;
            while next_sample < times.len() {
                let ts = times[next_sample];
                let inside = (ts - t) * dir > 0.0 && (ts - t_new) * dir <= 0.0;
                if !inside {
                    break;
                }
                if (ts - t_new).abs() <= 1e-14 * t_new.abs().max(1.0) {
                    out.push((ts, y_new.clone()));
                } else {
                    let c = cont.get_or_insert_with(|| dense_coefficients(&y, &y_new, &k, h));
                    out.push((ts, dense_eval(c, (ts - t) / h)));
                }
                next_sample += 1;
            }

            // PI step-size controller.
            let fac11 = err.powf(EXPO1);
            let mut fac = fac11 / err_old.powf(BETA);
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if h_new.abs() > config.max_step {
                h_new = dir * config.max_step;
            }
            err_old = err.max(1e-4);

            // FSAL: last stage derivative becomes the first of the next step.
            k.swap(0, 6);
            y.copy_from_slice(&y_new);
            t = t_new;
            h = h_new;
        } else {
            // Reject and retry with a smaller step.
            let fac11 = err.powf(EXPO1);
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
        }
    }

    // The loop exits once t reaches the end; any samples numerically equal to
    // the endpoint that were not emitted inside the loop are filled here.
    while next_sample < times.len() {
        out.push((times[next_sample], y.clone()));
        next_sample += 1;
    }
    Ok(out)
}

/// Interpolation coefficients for the accepted step [t, t+h] (Hairer's CONTD5
/// layout: value, difference, two Hermite-type terms, and the D-weighted
/// correction).
fn dense_coefficients(y: &[f64], y_new: &[f64], k: &[Vec<f64>], h: f64) -> [Vec<f64>; 5] {
    let n = y.len();
    let mut c0 = vec![0.0; n];
    let mut c1 = vec![0.0; n];
    let mut c2 = vec![0.0; n];
    let mut c3 = vec![0.0; n];
    let mut c4 = vec![0.0; n];
    for i in 0..n {
        let ydiff = y_new[i] - y[i];
        let bspl = h * k[0][i] - ydiff;
        c0[i] = y[i];
        c1[i] = ydiff;
        c2[i] = bspl;
        c3[i] = ydiff - h * k[6][i] - bspl;
        let mut dsum = 0.0;
        for (j, kj) in k.iter().enumerate() {
            dsum += D[j] * kj[i];
        }
        c4[i] = h * dsum;
    }
    [c0, c1, c2, c3, c4]
}

fn dense_eval(cont: &[Vec<f64>; 5], theta: f64) -> Vec<f64> {
    let th1 = 1.0 - theta;
    (0..cont[0].len())
        .map(|i| {
            cont[0][i]
                + theta
                    * (cont[1][i]
                        + th1 * (cont[2][i] + theta * (cont[3][i] + th1 * cont[4][i])))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_decay(_t: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = -y[0];
    }

    fn harmonic(_t: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[1];
        dy[1] = -y[0];
    }

    #[test]
    fn sample_times_hit_endpoints() {
        let span = TimeSpan::new(-2.0, 2.0, 5).unwrap();
        let ts = span.sample_times();
        assert_eq!(ts, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn adaptive_exponential_decay() {
        let config = IntegratorConfig::default();
        let span = TimeSpan::new(0.0, 5.0, 11).unwrap();
        let out = integrate_ode(exp_decay, &[1.0], span, &config).unwrap();
        assert_eq!(out.len(), 11);
        for (t, y) in &out {
            assert!((y[0] - (-t).exp()).abs() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn adaptive_harmonic_oscillator_dense_output() {
        let config = IntegratorConfig {
            max_step: 0.5,
            ..IntegratorConfig::default()
        };
        let span = TimeSpan::new(0.0, 10.0, 101).unwrap();
        let out = integrate_ode(harmonic, &[1.0, 0.0], span, &config).unwrap();
        for (t, y) in &out {
            assert!((y[0] - t.cos()).abs() < 1e-8, "cos at t = {t}");
            assert!((y[1] + t.sin()).abs() < 1e-8, "sin at t = {t}");
        }
    }

    #[test]
    fn backward_integration_recovers_initial_state() {
        let config = IntegratorConfig::default();
        let fwd = integrate_ode(
            harmonic,
            &[0.3, -0.4],
            TimeSpan::new(0.0, 3.0, 4).unwrap(),
            &config,
        )
        .unwrap();
        let y_end = fwd.last().unwrap().1.clone();
        let back = integrate_ode(
            harmonic,
            &y_end,
            TimeSpan::new(3.0, 0.0, 4).unwrap(),
            &config,
        )
        .unwrap();
        let y0 = &back.last().unwrap().1;
        assert!((y0[0] - 0.3).abs() < 1e-9);
        assert!((y0[1] + 0.4).abs() < 1e-9);
    }

    #[test]
    fn rk4_fixed_lands_on_samples_exactly() {
        let config = IntegratorConfig {
            method: Method::Rk4Fixed,
            initial_step: 0.013, // deliberately not commensurate
            ..IntegratorConfig::default()
        };
        let span = TimeSpan::new(0.0, 1.0, 5).unwrap();
        let out = integrate_ode(exp_decay, &[2.0], span, &config).unwrap();
        for ((t, y), expect_t) in out.iter().zip(span.sample_times()) {
            assert_eq!(*t, expect_t);
            assert!((y[0] - 2.0 * (-t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn rk4_fixed_fourth_order_convergence() {
        let span = TimeSpan::new(0.0, 2.0, 3).unwrap();
        let run = |h: f64| {
            let config = IntegratorConfig {
                method: Method::Rk4Fixed,
                initial_step: h,
                max_step: 1.0,
                ..IntegratorConfig::default()
            };
            let out = integrate_ode(harmonic, &[1.0, 0.0], span, &config).unwrap();
            out.iter()
                .map(|(t, y)| (y[0] - t.cos()).abs())
                .fold(0.0, f64::max)
        };
        let e1 = run(0.02);
        let e2 = run(0.01);
        let ratio = e1 / e2;
        assert!(
            (10.0..24.0).contains(&ratio),
            "expected ~16x error reduction, got {ratio}"
        );
    }

    #[test]
    fn dense_output_is_fourth_order_accurate() {
        // Force large steps so samples genuinely use the interpolant.
        let config = IntegratorConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_step: 0.4,
            ..IntegratorConfig::default()
        };
        let span = TimeSpan::new(0.0, 4.0, 401).unwrap();
        let out = integrate_ode(harmonic, &[1.0, 0.0], span, &config).unwrap();
        for (t, y) in &out {
            assert!((y[0] - t.cos()).abs() < 1e-9, "dense sample at t = {t}");
        }
    }

    #[test]
    fn underflowing_tolerance_requests_fail_gracefully() {
        // A right-hand side that blows up in finite time: y' = y^2, y(0)=1
        // diverges at t = 1.
        let blowup = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[0] * y[0];
        };
        let config = IntegratorConfig::default();
        let span = TimeSpan::new(0.0, 2.0, 3).unwrap();
        let res = integrate_ode(blowup, &[1.0], span, &config);
        match res {
            Err(Error::IntegrationFailure { last_good_time, .. }) => {
                assert!(last_good_time < 1.05, "failure reported near the blow-up");
            }
            other => panic!("expected integration failure, got {other:?}"),
        }
    }
}
