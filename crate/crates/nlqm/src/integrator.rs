//! Direct numerical integration of the coupled nonlinear pair and of its
//! linearization around a known overlap γ(t).
//!
//! The right-hand side implemented by default is
//!
//! ```text
//! i ∂_t |ψ⟩ = H|ψ⟩ + g ⟨φ|ψ⟩ |φ⟩
//! i ∂_t |φ⟩ = H|φ⟩ + g* ⟨ψ|φ⟩ |ψ⟩
//! ```
//!
//! which reproduces the closed scalar system for (N, τ, γ, δ) and the
//! position-representation form of the equations. An alternative
//! [`RhsVariant::Printed`] replaces the second equation's coupling with
//! g* ⟨ψ|ψ⟩ |φ⟩; that variant does not conserve N (dN/dt = −2bS) and is kept
//! only so the two forms can be compared numerically.
//!
//! Integration runs over the real-flattened pair state via the shared
//! stepper; every trajectory carries a drift report for the conserved
//! quantities.

use nalgebra::DVector;

use crate::error::Result;
use crate::hilbert::{
    density_matrix, purity, reduced_observables, Coupling, HermitianOperator, ReducedState,
    StateVector, C64,
};
use crate::ode::{integrate_ode, IntegratorConfig, TimeSpan};

/// Which form of the φ equation to integrate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsVariant {
    /// i∂_t|φ⟩ = H|φ⟩ + g*⟨ψ|φ⟩|ψ⟩ — consistent with the scalar system and
    /// the x-representation; the default.
    #[default]
    Derived,
    /// i∂_t|φ⟩ = H|φ⟩ + g*⟨ψ|ψ⟩|φ⟩ — the literal printed form, for
    /// comparison only.
    Printed,
}

/// Maximum drifts of the conserved quantities along a trajectory.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct DriftReport {
    /// max |N(t) − N₀| / |N₀|.
    pub norm_sum_rel: f64,
    /// max |ω₀²(t) − ω₀²(t₀)|.
    pub omega0_sq_abs: f64,
    /// max |δ(t) − |γ(t)|²| (zero by construction; recorded as evidence).
    pub delta_consistency: f64,
    /// max |S(t) − S(t₀)|.
    pub schwarz_abs: f64,
    /// max |Tr ρ² − (1 − 2S/N²)| — matrix route against the scalar identity.
    pub purity_identity: f64,
}

/// Time-indexed record of an integrated pair trajectory.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub psi_states: Vec<StateVector>,
    pub phi_states: Vec<StateVector>,
    pub observables: Vec<ReducedState>,
    pub drift: DriftReport,
}

impl Trajectory {
    /// Assemble observables and the drift report from sampled states.
    pub(crate) fn from_states(
        times: Vec<f64>,
        psi_states: Vec<StateVector>,
        phi_states: Vec<StateVector>,
    ) -> Result<Self> {
        let observables: Vec<ReducedState> = psi_states
            .iter()
            .zip(&phi_states)
            .map(|(psi, phi)| reduced_observables(psi, phi))
            .collect::<Result<_>>()?;
        let first = &observables[0];
        let n0 = first.norm_sum;
        let w0 = first.omega0_sq();
        let s0 = first.schwarz();
        let mut drift = DriftReport {
            norm_sum_rel: 0.0,
            omega0_sq_abs: 0.0,
            delta_consistency: 0.0,
            schwarz_abs: 0.0,
            purity_identity: 0.0,
        };
        for (obs, (psi, phi)) in observables.iter().zip(psi_states.iter().zip(&phi_states)) {
            let denom = if n0 != 0.0 { n0.abs() } else { 1.0 };
            drift.norm_sum_rel = drift
                .norm_sum_rel
                .max((obs.norm_sum - n0).abs() / denom);
            drift.omega0_sq_abs = drift.omega0_sq_abs.max((obs.omega0_sq() - w0).abs());
            drift.delta_consistency = drift
                .delta_consistency
                .max((obs.delta - obs.gamma.norm_sqr()).abs());
            drift.schwarz_abs = drift.schwarz_abs.max((obs.schwarz() - s0).abs());
            if obs.norm_sum > 0.0 {
                let rho = density_matrix(psi, phi)?;
                drift.purity_identity = drift
                    .purity_identity
                    .max((purity(&rho) - obs.purity_identity()).abs());
            }
        }
        Ok(Trajectory {
            times,
            psi_states,
            phi_states,
            observables,
            drift,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Evaluate the nonlinear right-hand side (dψ/dt, dφ/dt) with the default
/// (derived) φ equation.
pub fn nonlinear_rhs(
    psi: &StateVector,
    phi: &StateVector,
    h: &HermitianOperator,
    g: Coupling,
) -> Result<(StateVector, StateVector)> {
    nonlinear_rhs_variant(psi, phi, h, g, RhsVariant::Derived)
}

/// Evaluate the nonlinear right-hand side with an explicit variant choice.
pub fn nonlinear_rhs_variant(
    psi: &StateVector,
    phi: &StateVector,
    h: &HermitianOperator,
    g: Coupling,
    variant: RhsVariant,
) -> Result<(StateVector, StateVector)> {
    h.check_dim(psi)?;
    h.check_dim(phi)?;
    let gamma = crate::hilbert::inner_product(phi, psi)?;
    let minus_i = C64::new(0.0, -1.0);
    let gc = g.as_complex();

    let h_psi = h.matrix() * psi.amplitudes();
    let h_phi = h.matrix() * phi.amplitudes();

    let dpsi = (h_psi + phi.amplitudes().map(|c| c * (gc * gamma))).map(|c| c * minus_i);
    let dphi = match variant {
        RhsVariant::Derived => {
            // <psi|phi> = gamma*
            (h_phi + psi.amplitudes().map(|c| c * (gc.conj() * gamma.conj()))).map(|c| c * minus_i)
        }
        RhsVariant::Printed => {
            let n_psi = psi.norm_sqr();
            (h_phi + phi.amplitudes().map(|c| c * (gc.conj() * n_psi))).map(|c| c * minus_i)
        }
    };
    Ok((
        StateVector::from_dvector(dpsi, psi.basis().clone()),
        StateVector::from_dvector(dphi, phi.basis().clone()),
    ))
}

fn flatten_pair(psi: &DVector<C64>, phi: &DVector<C64>, out: &mut [f64]) {
    let dim = psi.len();
    for k in 0..dim {
        out[2 * k] = psi[k].re;
        out[2 * k + 1] = psi[k].im;
        out[2 * (dim + k)] = phi[k].re;
        out[2 * (dim + k) + 1] = phi[k].im;
    }
}

fn unflatten_pair(y: &[f64], dim: usize) -> (DVector<C64>, DVector<C64>) {
    let psi = DVector::from_iterator(dim, (0..dim).map(|k| C64::new(y[2 * k], y[2 * k + 1])));
    let phi = DVector::from_iterator(
        dim,
        (0..dim).map(|k| C64::new(y[2 * (dim + k)], y[2 * (dim + k) + 1])),
    );
    (psi, phi)
}

/// Integrate the full nonlinear pair with the default (derived) equations.
pub fn integrate(
    psi0: &StateVector,
    phi0: &StateVector,
    h: &HermitianOperator,
    g: Coupling,
    t_span: TimeSpan,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    integrate_with_variant(psi0, phi0, h, g, t_span, config, RhsVariant::Derived)
}

/// Integrate the full nonlinear pair with an explicit right-hand-side
/// variant.
pub fn integrate_with_variant(
    psi0: &StateVector,
    phi0: &StateVector,
    h: &HermitianOperator,
    g: Coupling,
    t_span: TimeSpan,
    config: &IntegratorConfig,
    variant: RhsVariant,
) -> Result<Trajectory> {
    h.check_dim(psi0)?;
    h.check_dim(phi0)?;
    if psi0.basis() != phi0.basis() {
        return Err(crate::error::Error::BasisMismatch {
            left: psi0.basis().to_string(),
            right: phi0.basis().to_string(),
        });
    }
    let dim = h.dim();
    let gc = g.as_complex();
    let h_mat = h.matrix().clone();

    let rhs = move |_t: f64, y: &[f64], dy: &mut [f64]| {
        let (psi, phi) = unflatten_pair(y, dim);
        let gamma: C64 = phi
            .iter()
            .zip(psi.iter())
            .map(|(p, s)| p.conj() * s)
            .sum();
        let minus_i = C64::new(0.0, -1.0);
        let h_psi = &h_mat * &psi;
        let h_phi = &h_mat * &phi;
        let dpsi = (h_psi + phi.map(|c| c * (gc * gamma))).map(|c| c * minus_i);
        let dphi = match variant {
            RhsVariant::Derived => {
                (h_phi + psi.map(|c| c * (gc.conj() * gamma.conj()))).map(|c| c * minus_i)
            }
            RhsVariant::Printed => {
                let n_psi: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
                (h_phi + phi.map(|c| c * (gc.conj() * n_psi))).map(|c| c * minus_i)
            }
        };
        flatten_pair(&dpsi, &dphi, dy);
    };

    let mut y0 = vec![0.0; 4 * dim];
    flatten_pair(psi0.amplitudes(), phi0.amplitudes(), &mut y0);
    let samples = integrate_ode(rhs, &y0, t_span, config)?;
    samples_to_trajectory(samples, dim, psi0.basis().clone())
}

/// Integrate the linearized system i∂_tψ = Hψ + gγ(t)φ,
/// i∂_tφ = Hφ + g*γ*(t)ψ for an externally supplied overlap γ(t).
pub fn integrate_linearized<F>(
    psi0: &StateVector,
    phi0: &StateVector,
    h: &HermitianOperator,
    g: Coupling,
    gamma_fn: F,
    t_span: TimeSpan,
    config: &IntegratorConfig,
) -> Result<Trajectory>
where
    F: Fn(f64) -> C64,
{
    h.check_dim(psi0)?;
    h.check_dim(phi0)?;
    if psi0.basis() != phi0.basis() {
        return Err(crate::error::Error::BasisMismatch {
            left: psi0.basis().to_string(),
            right: phi0.basis().to_string(),
        });
    }
    let dim = h.dim();
    let gc = g.as_complex();
    let h_mat = h.matrix().clone();

    let rhs = move |t: f64, y: &[f64], dy: &mut [f64]| {
        let (psi, phi) = unflatten_pair(y, dim);
        let gamma = gamma_fn(t);
        let minus_i = C64::new(0.0, -1.0);
        let dpsi = (&h_mat * &psi + phi.map(|c| c * (gc * gamma))).map(|c| c * minus_i);
        let dphi =
            (&h_mat * &phi + psi.map(|c| c * (gc.conj() * gamma.conj()))).map(|c| c * minus_i);
        flatten_pair(&dpsi, &dphi, dy);
    };

    let mut y0 = vec![0.0; 4 * dim];
    flatten_pair(psi0.amplitudes(), phi0.amplitudes(), &mut y0);
    let samples = integrate_ode(rhs, &y0, t_span, config)?;
    samples_to_trajectory(samples, dim, psi0.basis().clone())
}

fn samples_to_trajectory(
    samples: Vec<(f64, Vec<f64>)>,
    dim: usize,
    basis: crate::hilbert::BasisTag,
) -> Result<Trajectory> {
    let times: Vec<f64> = samples.iter().map(|(t, _)| *t).collect();
    let mut psi_states = Vec::with_capacity(samples.len());
    let mut phi_states = Vec::with_capacity(samples.len());
    for (_, y) in &samples {
        let (psi, phi) = unflatten_pair(y, dim);
        psi_states.push(StateVector::from_dvector(psi, basis.clone()));
        phi_states.push(StateVector::from_dvector(phi, basis.clone()));
    }
    Trajectory::from_states(times, psi_states, phi_states)
}
