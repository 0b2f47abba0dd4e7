//! The Hamiltonian-independent scalar subsystem.
//!
//! The inner products of a coupled pair close on themselves:
//!
//! ```text
//! dN/dt = 0,   dτ/dt = 4bδ,   dγ/dt = i g γ τ,   dδ/dt = −2bτδ.
//! ```
//!
//! With ξ = 2bω₀(t − t₀) the physical (bounded, δ > 0) solution family is
//!
//! ```text
//! τ = 2ω₀ tanh ξ,   δ = ω₀² sech² ξ,
//! γ = ω₀ sech ξ · exp(i[θ + (a/2b) ln cosh² ξ]),
//! ```
//!
//! where ω₀² = τ²/4 + δ is conserved and θ is a free phase. Two rival
//! solution families exist and are classified here rather than constructed:
//! an imaginary integration constant gives a tangent profile that blows up in
//! finite time, and the cotangent branch has δ < 0 with τ singular at the
//! time origin.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{Coupling, ReducedState};
use crate::ode::{integrate_ode, IntegratorConfig, TimeSpan};

/// Parameters of the closed-form scalar solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedParams {
    /// Conserved frequency scale ω₀ > 0.
    pub omega0: f64,
    /// Free phase θ of γ at t = t₀.
    pub theta: f64,
    /// Coupling g = a + ib with b ≠ 0.
    pub g: Coupling,
    /// Origin of time; the profiles depend on t only through t − t₀.
    pub t0: f64,
}

impl ReducedParams {
    /// Construct with t₀ = 0.
    pub fn new(omega0: f64, theta: f64, g: Coupling) -> Result<Self> {
        ReducedParams::with_t0(omega0, theta, g, 0.0)
    }

    pub fn with_t0(omega0: f64, theta: f64, g: Coupling, t0: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::ContractViolation(format!(
                "omega0 must be positive and finite, got {omega0}"
            )));
        }
        if !theta.is_finite() || !t0.is_finite() {
            return Err(Error::ContractViolation(
                "theta and t0 must be finite".into(),
            ));
        }
        g.require_complex()?;
        Ok(ReducedParams {
            omega0,
            theta,
            g,
            t0,
        })
    }

    /// The profile argument ξ = 2bω₀(t − t₀).
    pub fn xi(&self, t: f64) -> f64 {
        2.0 * self.g.b * self.omega0 * (t - self.t0)
    }
}

/// ln cosh x, overflow-free for any finite x.
///
/// cosh overflows doubles near x ≈ 710; rewriting as
/// |x| + ln((1 + e^{−2|x|})/2) keeps every intermediate bounded.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// sech x, overflow-free for any finite x.
pub fn sech(x: f64) -> f64 {
    let a = x.abs();
    let e = (-a).exp();
    2.0 * e / (1.0 + e * e)
}

/// Time derivative of the scalar observables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedDerivative {
    /// dN/dt (identically zero).
    pub norm_sum: f64,
    /// dτ/dt = 4bδ.
    pub tau: f64,
    /// dγ/dt = i g γ τ.
    pub gamma: C64,
    /// dδ/dt = −2bτδ.
    pub delta: f64,
}

/// Evaluate the right-hand side of the scalar system at a state.
pub fn reduced_rhs(state: &ReducedState, g: Coupling) -> ReducedDerivative {
    ReducedDerivative {
        norm_sum: 0.0,
        tau: 4.0 * g.b * state.delta,
        gamma: C64::new(0.0, 1.0) * g.as_complex() * state.gamma * state.tau,
        delta: -2.0 * g.b * state.tau * state.delta,
    }
}

/// The closed-form (τ, δ) profile at time t.
pub fn tau_delta_analytic(p: &ReducedParams, t: f64) -> (f64, f64) {
    let xi = p.xi(t);
    let s = sech(xi);
    (2.0 * p.omega0 * xi.tanh(), p.omega0 * p.omega0 * s * s)
}

/// The continuous phase of γ at time t: θ + (a/2b) ln cosh² ξ.
///
/// This is the phase obtained by following γ continuously from t = t₀; it is
/// not wrapped into (−π, π].
pub fn gamma_phase(p: &ReducedParams, t: f64) -> f64 {
    let xi = p.xi(t);
    p.theta + p.g.a / p.g.b * ln_cosh(xi)
}

/// The closed-form overlap γ(t) = ω₀ sech ξ e^{iφ(t)}.
pub fn gamma_analytic(p: &ReducedParams, t: f64) -> C64 {
    let xi = p.xi(t);
    C64::from_polar(p.omega0 * sech(xi), gamma_phase(p, t))
}

/// Full closed-form scalar state at time t for a given conserved N.
pub fn reduced_state_analytic(p: &ReducedParams, norm_sum: f64, t: f64) -> ReducedState {
    let (tau, _) = tau_delta_analytic(p, t);
    ReducedState::from_parts(norm_sum, tau, gamma_analytic(p, t))
}

/// Recover ω₀ = +√(τ²/4 + δ) from a scalar state.
///
/// A radicand negative beyond rounding tolerance signals inconsistent inputs
/// and is rejected.
pub fn omega0_from_state(state: &ReducedState) -> Result<f64> {
    let radicand = state.omega0_sq();
    let scale = (state.tau * state.tau / 4.0).max(state.delta.abs()).max(1.0);
    if radicand < -1e-12 * scale {
        return Err(Error::ContractViolation(format!(
            "tau^2/4 + delta = {radicand:e} is negative: inconsistent reduced state"
        )));
    }
    Ok(radicand.max(0.0).sqrt())
}

// ---------------------------------------------------------------------------
// Branch classification
// ---------------------------------------------------------------------------

/// The three solution families of the second-order τ equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchKind {
    /// τ ∝ tanh, δ ∝ +sech²: bounded, δ > 0. The physical branch.
    TanhPhysical,
    /// τ ∝ coth, δ ∝ −cosech²: δ negative and τ singular at t = t₀.
    CothSingular,
    /// Imaginary integration constant: τ ∝ tan, finite-time blow-up.
    TanImaginaryLambda,
}

/// Which real-λ solution family to examine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchSelector {
    Tanh,
    Coth,
}

/// Verdict on a solution family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchReport {
    pub branch_kind: BranchKind,
    pub physical: bool,
    pub reason: String,
}

/// Classify the solution family selected by the sign of λ² and, for real λ,
/// the tanh/coth choice.
pub fn classify_branch(lambda_squared: f64, branch: BranchSelector) -> BranchReport {
    if lambda_squared < 0.0 {
        return BranchReport {
            branch_kind: BranchKind::TanImaginaryLambda,
            physical: false,
            reason: "imaginary lambda gives tau = -|lambda| tan(b|lambda|(t - c2)), \
                     which blows up at finite time: unphysical"
                .into(),
        };
    }
    match branch {
        BranchSelector::Coth => BranchReport {
            branch_kind: BranchKind::CothSingular,
            physical: false,
            reason: "coth branch gives negative delta = -omega0^2 cosech^2(2 b omega0 (t - t0)) \
                     and tau singular at t = t0"
                .into(),
        },
        BranchSelector::Tanh => BranchReport {
            branch_kind: BranchKind::TanhPhysical,
            physical: true,
            reason: "tanh branch keeps delta = omega0^2 sech^2 positive and tau bounded".into(),
        },
    }
}

// ---------------------------------------------------------------------------
// Numerical integration of the scalar system
// ---------------------------------------------------------------------------

/// A time-indexed record of integrated scalar states.
#[derive(Clone, Debug)]
pub struct ReducedTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<ReducedState>,
}

impl ReducedTrajectory {
    /// Max |ω₀²(t) − ω₀²(t_start)| along the trajectory.
    pub fn omega0_sq_drift(&self) -> f64 {
        let first = self.states[0].omega0_sq();
        self.states
            .iter()
            .map(|s| (s.omega0_sq() - first).abs())
            .fold(0.0, f64::max)
    }

    /// Max |N(t) − N(t_start)| along the trajectory.
    pub fn norm_sum_drift(&self) -> f64 {
        let first = self.states[0].norm_sum;
        self.states
            .iter()
            .map(|s| (s.norm_sum - first).abs())
            .fold(0.0, f64::max)
    }
}

/// Tolerance on |δ − |γ|²| accepted in an initial condition.
const INITIAL_CONSISTENCY_TOL: f64 = 1e-9;

/// Integrate the scalar system numerically.
///
/// The integration state is (N, τ, Re γ, Im γ); δ is derived as |γ|² at every
/// evaluation so the constraint δ = γ*γ holds by construction. The initial
/// state must satisfy it too.
pub fn integrate_reduced(
    initial: &ReducedState,
    g: Coupling,
    t_span: TimeSpan,
    config: &IntegratorConfig,
) -> Result<ReducedTrajectory> {
    g.require_complex()?;
    if (initial.delta - initial.gamma.norm_sqr()).abs() > INITIAL_CONSISTENCY_TOL {
        return Err(Error::ContractViolation(format!(
            "initial state inconsistent: delta = {} but |gamma|^2 = {}",
            initial.delta,
            initial.gamma.norm_sqr()
        )));
    }
    let gc = g.as_complex();
    let rhs = move |_t: f64, y: &[f64], dy: &mut [f64]| {
        let tau = y[1];
        let gamma = C64::new(y[2], y[3]);
        let delta = gamma.norm_sqr();
        let dgamma = C64::new(0.0, 1.0) * gc * gamma * tau;
        dy[0] = 0.0;
        dy[1] = 4.0 * g.b * delta;
        dy[2] = dgamma.re;
        dy[3] = dgamma.im;
    };
    let y0 = [
        initial.norm_sum,
        initial.tau,
        initial.gamma.re,
        initial.gamma.im,
    ];
    let samples = integrate_ode(rhs, &y0, t_span, config)?;
    let times: Vec<f64> = samples.iter().map(|(t, _)| *t).collect();
    let states: Vec<ReducedState> = samples
        .iter()
        .map(|(_, y)| ReducedState::from_parts(y[0], y[1], C64::new(y[2], y[3])))
        .collect();
    Ok(ReducedTrajectory { times, states })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(omega0: f64, theta: f64, a: f64, b: f64) -> ReducedParams {
        ReducedParams::new(omega0, theta, Coupling::new(a, b).unwrap()).unwrap()
    }

    #[test]
    fn rhs_vanishes_on_orthogonal_fixed_line() {
        let state = ReducedState::from_parts(2.0, 0.7, C64::new(0.0, 0.0));
        let d = reduced_rhs(&state, Coupling::new(1.0, 0.5).unwrap());
        assert_eq!(d.tau, 0.0);
        assert_eq!(d.delta, 0.0);
        assert_eq!(d.gamma, C64::new(0.0, 0.0));
    }

    #[test]
    fn rhs_direct_substitution() {
        // b = 0.5, tau = 0, delta = 1, gamma = 1, g = i/2
        let state = ReducedState::from_parts(2.0, 0.0, C64::new(1.0, 0.0));
        let d = reduced_rhs(&state, Coupling::new(0.0, 0.5).unwrap());
        assert_eq!(d.norm_sum, 0.0);
        assert_eq!(d.tau, 2.0);
        assert_eq!(d.gamma, C64::new(0.0, 0.0));
        assert_eq!(d.delta, 0.0);
    }

    #[test]
    fn rhs_preserves_delta_gamma_consistency() {
        // d(delta - gamma* gamma)/dt = 0 along the flow: check that
        // d(delta)/dt equals gamma* dgamma/dt + c.c. at a generic point.
        let gamma = C64::new(0.3, -0.8);
        let state = ReducedState::from_parts(3.0, 1.2, gamma);
        let g = Coupling::new(0.7, -0.4).unwrap();
        let d = reduced_rhs(&state, g);
        let from_gamma = (gamma.conj() * d.gamma + gamma * d.gamma.conj()).re;
        assert!((d.delta - from_gamma).abs() < 1e-14);
    }

    #[test]
    fn tau_delta_at_origin() {
        let p = params(1.3, 0.0, 1.0, 0.5);
        let (tau, delta) = tau_delta_analytic(&p, 0.0);
        assert_eq!(tau, 0.0);
        assert!((delta - 1.3 * 1.3).abs() < 1e-15);
    }

    #[test]
    fn tau_delta_asymptotics() {
        let p = params(1.0, 0.0, 0.0, 0.5);
        let (tau, delta) = tau_delta_analytic(&p, 1e4);
        assert!((tau - 2.0).abs() < 1e-12);
        assert!(delta.abs() < 1e-12);
    }

    #[test]
    fn omega0_identity_pointwise() {
        let p = params(1.0, 0.0, 1.0, 0.5);
        let (tau, delta) = tau_delta_analytic(&p, 1.0);
        assert!((tau * tau / 4.0 + delta - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gamma_at_origin_is_omega0_times_phase() {
        let p = params(1.0, 0.0, 1.0, 0.5);
        let g0 = gamma_analytic(&p, 0.0);
        assert!((g0 - C64::new(1.0, 0.0)).norm() < 1e-15);

        let p2 = params(1.0, std::f64::consts::FRAC_PI_2, 1.0, 0.5);
        let g2 = gamma_analytic(&p2, 0.0);
        assert!((g2 - C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn gamma_magnitude_matches_delta() {
        let p = params(1.0, 0.3, 1.0, 0.5);
        for &t in &[0.0, 0.3, 1.0, 2.5, -4.0] {
            let (_, delta) = tau_delta_analytic(&p, t);
            let g = gamma_analytic(&p, t);
            assert!((g.norm_sqr() - delta).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn gamma_phase_reduces_to_theta_when_a_is_zero() {
        let p = params(1.0, 0.4, 0.0, 0.5);
        for &t in &[-3.0, 0.0, 0.7, 5.0] {
            let g = gamma_analytic(&p, t);
            let arg = g.arg();
            assert!((arg - 0.4).abs() < 1e-12, "t = {t}, arg = {arg}");
        }
    }

    #[test]
    fn ln_cosh_is_stable_for_huge_arguments() {
        // cosh(500) overflows f64^(1/2) territory; the identity
        // ln cosh x = |x| - ln 2 + ln(1 + e^{-2|x|}) must survive.
        let x = 500.0;
        let expected = x - std::f64::consts::LN_2;
        assert!((ln_cosh(x) - expected).abs() < 1e-12);
        assert!((ln_cosh(-x) - expected).abs() < 1e-12);
        assert!(ln_cosh(1e6).is_finite());
        // Small-argument agreement with the naive formula.
        for &x in &[0.0, 0.1, 1.0, 10.0] {
            assert!((ln_cosh(x) - x.cosh().ln()).abs() < 1e-13);
        }
    }

    #[test]
    fn omega0_from_state_roots() {
        let s = ReducedState::from_parts(2.0, 0.0, C64::new(1.0, 0.0));
        assert!((omega0_from_state(&s).unwrap() - 1.0).abs() < 1e-15);
        let s = ReducedState {
            norm_sum: 2.0,
            tau: 2.0,
            gamma: C64::new(0.0, 0.0),
            delta: 0.0,
        };
        assert!((omega0_from_state(&s).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn omega0_from_state_rejects_negative_radicand() {
        let s = ReducedState {
            norm_sum: 2.0,
            tau: 0.2,
            gamma: C64::new(0.0, 0.0),
            delta: -1.0,
        };
        assert!(omega0_from_state(&s).is_err());
    }

    #[test]
    fn omega0_constant_along_closed_form() {
        let p = params(1.0, 0.2, 1.0, 0.5);
        for k in 0..100 {
            let t = -5.0 + 0.1 * k as f64;
            let state = reduced_state_analytic(&p, 3.0, t);
            let w = omega0_from_state(&state).unwrap();
            assert!((w - 1.0).abs() < 1e-10, "t = {t}: omega0 = {w}");
        }
    }

    #[test]
    fn branch_classification() {
        let tan = classify_branch(-1.0, BranchSelector::Tanh);
        assert_eq!(tan.branch_kind, BranchKind::TanImaginaryLambda);
        assert!(!tan.physical);

        let coth = classify_branch(4.0, BranchSelector::Coth);
        assert_eq!(coth.branch_kind, BranchKind::CothSingular);
        assert!(!coth.physical);

        let tanh = classify_branch(4.0, BranchSelector::Tanh);
        assert_eq!(tanh.branch_kind, BranchKind::TanhPhysical);
        assert!(tanh.physical);
    }

    #[test]
    fn integrate_constant_on_fixed_line() {
        let initial = ReducedState::from_parts(2.0, 0.4, C64::new(0.0, 0.0));
        let g = Coupling::new(1.0, 0.5).unwrap();
        let span = TimeSpan::new(0.0, 5.0, 6).unwrap();
        let traj = integrate_reduced(&initial, g, span, &IntegratorConfig::default()).unwrap();
        for s in &traj.states {
            assert!((s.tau - 0.4).abs() < 1e-12);
            assert!(s.delta.abs() < 1e-24);
        }
    }

    #[test]
    fn integrate_matches_closed_form() {
        let p = params(1.0, 0.3, 1.0, 0.5);
        let initial = reduced_state_analytic(&p, 2.5, 0.0);
        let g = p.g;
        let span = TimeSpan::new(0.0, 4.0, 41).unwrap();
        let traj = integrate_reduced(&initial, g, span, &IntegratorConfig::default()).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let expect = reduced_state_analytic(&p, 2.5, *t);
            assert!((s.tau - expect.tau).abs() < 1e-8, "tau at t = {t}");
            assert!((s.delta - expect.delta).abs() < 1e-8, "delta at t = {t}");
            assert!((s.gamma - expect.gamma).norm() < 1e-8, "gamma at t = {t}");
        }
    }

    #[test]
    fn integrate_round_trip() {
        let p = params(1.0, 0.0, 1.0, 0.5);
        let initial = reduced_state_analytic(&p, 2.0, 0.0);
        let g = p.g;
        let config = IntegratorConfig::default();
        let fwd = integrate_reduced(&initial, g, TimeSpan::new(0.0, 3.0, 2).unwrap(), &config)
            .unwrap();
        let end = *fwd.states.last().unwrap();
        let back = integrate_reduced(&end, g, TimeSpan::new(3.0, 0.0, 2).unwrap(), &config)
            .unwrap();
        let recovered = back.states.last().unwrap();
        assert!((recovered.tau - initial.tau).abs() < 1e-8);
        assert!((recovered.gamma - initial.gamma).norm() < 1e-8);
    }

    #[test]
    fn integrate_rejects_inconsistent_initial_state() {
        let bad = ReducedState {
            norm_sum: 2.0,
            tau: 0.0,
            gamma: C64::new(1.0, 0.0),
            delta: 0.5,
        };
        let g = Coupling::new(1.0, 0.5).unwrap();
        let span = TimeSpan::new(0.0, 1.0, 2).unwrap();
        assert!(integrate_reduced(&bad, g, span, &IntegratorConfig::default()).is_err());
    }
}
