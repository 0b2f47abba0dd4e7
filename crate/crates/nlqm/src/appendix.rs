//! Special coupling cases: a single self-coupled vector, and a pair with
//! real coupling (b = 0).
//!
//! Single vector, i∂_t|ψ⟩ = H|ψ⟩ + g⟨ψ|ψ⟩|ψ⟩:
//! - real g: the norm N₀ is constant and the solution is the linear one with
//!   an extra global phase, ψ = Σ c_n e^{−i(E_n + gN₀)t}|n⟩;
//! - complex g = a + ib, b ≠ 0: the norm obeys d⟨ψ|ψ⟩/dt = 2b⟨ψ|ψ⟩², whose
//!   solution ⟨ψ|ψ⟩ = −1/(2b(t − t₀)) is positive only on the window
//!   2b(t − t₀) < 0. For b > 0 the system ceases to exist after t = t₀; for
//!   b < 0 it is born at t₀ with infinite norm and decays like 1/t.
//!
//! Two vectors with real g: τ and δ are constants, γ = γ₀ e^{igτ₀t} rotates
//! uniformly, and the pair is built from orthogonal coefficient vectors
//! A_n, B_n rescaled by
//!
//! ```text
//! k = √δ₀ / (ω₀ + τ₀/2) = (ω₀ − τ₀/2) / √δ₀,     ω₀² = τ₀²/4 + δ₀,
//! ```
//!
//! subject to Σ(k|B_n|² − |A_n|²/k) = 1.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::hilbert::{BasisTag, Coupling, HermitianOperator, StateVector, C64};
use crate::ode::{integrate_ode, IntegratorConfig, TimeSpan};

/// Tolerance on the constraints of [`RealGSpec`].
pub const REAL_G_CONSTRAINT_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Single state vector
// ---------------------------------------------------------------------------

/// A single self-coupled vector: eigenbasis coefficients c_n, coupling g,
/// time origin t₀ (relevant only to the complex-coupling norm law), and the
/// Hamiltonian.
#[derive(Clone, Debug)]
pub struct SingleVectorSpec {
    c_coeffs: DVector<C64>,
    g: Coupling,
    t0: f64,
    hamiltonian: HermitianOperator,
}

impl SingleVectorSpec {
    pub fn new(
        c_coeffs: Vec<C64>,
        g: Coupling,
        t0: f64,
        hamiltonian: HermitianOperator,
    ) -> Result<Self> {
        if c_coeffs.len() != hamiltonian.dim() {
            return Err(Error::DimensionMismatch {
                left: c_coeffs.len(),
                right: hamiltonian.dim(),
            });
        }
        let norm0: f64 = c_coeffs.iter().map(|c| c.norm_sqr()).sum();
        if norm0 <= 0.0 {
            return Err(Error::ContractViolation(
                "single-vector coefficients must have positive norm".into(),
            ));
        }
        if !t0.is_finite() {
            return Err(Error::ContractViolation("t0 must be finite".into()));
        }
        Ok(SingleVectorSpec {
            c_coeffs: DVector::from_vec(c_coeffs),
            g,
            t0,
            hamiltonian,
        })
    }

    /// The conserved norm N₀ = Σ|c_n|² of the real-coupling case.
    pub fn norm0(&self) -> f64 {
        self.c_coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn coupling(&self) -> Coupling {
        self.g
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }
}

/// Closed-form solution for real g: ψ(t) = Σ c_n e^{−i(E_n + gN₀)t}|n⟩.
///
/// Errors when the spec carries complex coupling; the complex case has no
/// norm-preserving solution and is handled by
/// [`single_vector_complex_g_norm`].
pub fn single_vector_real_g(spec: &SingleVectorSpec, t: f64) -> Result<StateVector> {
    spec.g.require_real().map_err(|_| {
        Error::WrongCase(
            "b != 0: the complex-coupling case has no constant-norm solution; \
             use single_vector_complex_g_norm for its norm law"
                .into(),
        )
    })?;
    let n0 = spec.norm0();
    let h = &spec.hamiltonian;
    let coeffs = DVector::from_iterator(
        h.dim(),
        spec.c_coeffs
            .iter()
            .zip(h.eigenvalues().iter())
            .map(|(c, &e)| c * C64::from_polar(1.0, -(e + spec.g.a * n0) * t)),
    );
    Ok(StateVector::from_dvector(
        h.from_eigenbasis(&coeffs),
        BasisTag::canonical(),
    ))
}

/// The norm law ⟨ψ|ψ⟩ = −1/(2b(t − t₀)) of the complex-coupling single
/// vector, defined only while 2b(t − t₀) < 0.
pub fn single_vector_complex_g_norm(b: f64, t0: f64, t: f64) -> Result<f64> {
    if b == 0.0 {
        return Err(Error::WrongCase(
            "b = 0 is the constant-norm case; the 1/t norm law needs b != 0".into(),
        ));
    }
    let window = 2.0 * b * (t - t0);
    if window >= 0.0 {
        return Err(Error::ExistenceWindow {
            b,
            t0,
            t,
            value: window,
        });
    }
    Ok(-1.0 / window)
}

/// Time-indexed record of an integrated single-vector trajectory.
#[derive(Clone, Debug)]
pub struct SingleTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
}

impl SingleTrajectory {
    pub fn norms(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.norm_sqr()).collect()
    }
}

/// Numerically integrate the self-coupled single-vector equation
/// i∂_t|ψ⟩ = H|ψ⟩ + g⟨ψ|ψ⟩|ψ⟩, as an independent cross-check on the closed
/// forms above.
pub fn integrate_single_vector(
    psi0: &StateVector,
    h: &HermitianOperator,
    g: Coupling,
    t_span: TimeSpan,
    config: &IntegratorConfig,
) -> Result<SingleTrajectory> {
    h.check_dim(psi0)?;
    let dim = h.dim();
    let gc = g.as_complex();
    let h_mat = h.matrix().clone();
    let rhs = move |_t: f64, y: &[f64], dy: &mut [f64]| {
        let psi = DVector::from_iterator(dim, (0..dim).map(|k| C64::new(y[2 * k], y[2 * k + 1])));
        let n: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        let minus_i = C64::new(0.0, -1.0);
        let dpsi = (&h_mat * &psi + psi.map(|c| c * (gc * n))).map(|c| c * minus_i);
        for k in 0..dim {
            dy[2 * k] = dpsi[k].re;
            dy[2 * k + 1] = dpsi[k].im;
        }
    };
    let mut y0 = vec![0.0; 2 * dim];
    for k in 0..dim {
        y0[2 * k] = psi0.component(k).re;
        y0[2 * k + 1] = psi0.component(k).im;
    }
    let samples = integrate_ode(rhs, &y0, t_span, config)?;
    let times: Vec<f64> = samples.iter().map(|(t, _)| *t).collect();
    let states = samples
        .iter()
        .map(|(_, y)| {
            StateVector::from_dvector(
                DVector::from_iterator(dim, (0..dim).map(|k| C64::new(y[2 * k], y[2 * k + 1]))),
                psi0.basis().clone(),
            )
        })
        .collect();
    Ok(SingleTrajectory { times, states })
}

// ---------------------------------------------------------------------------
// Real coupling, two vectors
// ---------------------------------------------------------------------------

/// The rescaling constant k in its two printed forms; both are returned so
/// their agreement can be asserted independently.
pub fn real_g_k_forms(tau0: f64, delta0: f64) -> Result<(f64, f64)> {
    if !delta0.is_finite() || delta0 <= 0.0 {
        return Err(Error::ContractViolation(format!(
            "delta0 must be positive, got {delta0}"
        )));
    }
    let omega0 = (tau0 * tau0 / 4.0 + delta0).sqrt();
    let sqrt_delta = delta0.sqrt();
    Ok((
        sqrt_delta / (omega0 + tau0 / 2.0),
        (omega0 - tau0 / 2.0) / sqrt_delta,
    ))
}

/// k = √δ₀/(ω₀ + τ₀/2); positive for δ₀ > 0.
pub fn real_g_k(tau0: f64, delta0: f64) -> Result<f64> {
    real_g_k_forms(tau0, delta0).map(|(k, _)| k)
}

/// Parameters of the real-coupling pair: coefficient vectors, the constant
/// scalars (τ₀, δ₀, γ₀), the real coupling, and the Hamiltonian.
///
/// Construction checks |γ₀|² = δ₀, the two-sided orthogonality
/// Σ B_n* A_n = Σ A_n* B_n = 0, and the normalization
/// Σ(k|B_n|² − |A_n|²/k) = 1.
#[derive(Clone, Debug)]
pub struct RealGSpec {
    a_coeffs: DVector<C64>,
    b_coeffs: DVector<C64>,
    tau0: f64,
    delta0: f64,
    gamma0: C64,
    g_real: f64,
    hamiltonian: HermitianOperator,
}

impl RealGSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a_coeffs: Vec<C64>,
        b_coeffs: Vec<C64>,
        tau0: f64,
        delta0: f64,
        gamma0: C64,
        g_real: f64,
        hamiltonian: HermitianOperator,
    ) -> Result<Self> {
        let dim = hamiltonian.dim();
        if a_coeffs.len() != dim || b_coeffs.len() != dim {
            return Err(Error::DimensionMismatch {
                left: a_coeffs.len().max(b_coeffs.len()),
                right: dim,
            });
        }
        if !(delta0 > 0.0 && delta0.is_finite()) {
            return Err(Error::ContractViolation(format!(
                "delta0 must be positive, got {delta0}"
            )));
        }
        let res_gamma = (gamma0.norm_sqr() - delta0).abs();
        if res_gamma > REAL_G_CONSTRAINT_TOL {
            return Err(Error::ConstraintViolation {
                constraint: "|gamma0|^2 = delta0".into(),
                residual: res_gamma,
                tolerance: REAL_G_CONSTRAINT_TOL,
            });
        }
        let a = DVector::from_vec(a_coeffs);
        let b = DVector::from_vec(b_coeffs);
        let overlap: C64 = b.iter().zip(a.iter()).map(|(bn, an)| bn.conj() * an).sum();
        if overlap.norm() > REAL_G_CONSTRAINT_TOL {
            return Err(Error::ConstraintViolation {
                constraint: "sum B_n* A_n = 0".into(),
                residual: overlap.norm(),
                tolerance: REAL_G_CONSTRAINT_TOL,
            });
        }
        let k = real_g_k(tau0, delta0)?;
        let alpha: f64 = a.iter().map(|c| c.norm_sqr()).sum();
        let beta: f64 = b.iter().map(|c| c.norm_sqr()).sum();
        let res_norm = (k * beta - alpha / k - 1.0).abs();
        if res_norm > REAL_G_CONSTRAINT_TOL {
            return Err(Error::ConstraintViolation {
                constraint: "sum(k |B_n|^2 - |A_n|^2 / k) = 1".into(),
                residual: res_norm,
                tolerance: REAL_G_CONSTRAINT_TOL,
            });
        }
        Ok(RealGSpec {
            a_coeffs: a,
            b_coeffs: b,
            tau0,
            delta0,
            gamma0,
            g_real,
            hamiltonian,
        })
    }

    /// Build a valid spec from orthonormal coefficient directions and a free
    /// A-channel weight α ≥ 0: A = √α â, B = √β b̂ with β fixed by the
    /// normalization constraint.
    #[allow(clippy::too_many_arguments)]
    pub fn from_directions(
        a_dir: Vec<C64>,
        b_dir: Vec<C64>,
        alpha: f64,
        tau0: f64,
        delta0: f64,
        gamma0: C64,
        g_real: f64,
        hamiltonian: HermitianOperator,
    ) -> Result<Self> {
        if alpha < 0.0 {
            return Err(Error::ContractViolation(
                "A-channel weight alpha must be >= 0".into(),
            ));
        }
        let k = real_g_k(tau0, delta0)?;
        let beta = (1.0 + alpha / k) / k;
        let na: f64 = a_dir.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let nb: f64 = b_dir.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            return Err(Error::DegenerateInput(
                "coefficient directions must be nonzero".into(),
            ));
        }
        let a: Vec<C64> = a_dir
            .iter()
            .map(|c| c * (alpha.sqrt() / na))
            .collect();
        let b: Vec<C64> = b_dir.iter().map(|c| c * (beta.sqrt() / nb)).collect();
        RealGSpec::new(a, b, tau0, delta0, gamma0, g_real, hamiltonian)
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    pub fn gamma0(&self) -> C64 {
        self.gamma0
    }

    pub fn g_real(&self) -> f64 {
        self.g_real
    }

    pub fn coupling(&self) -> Coupling {
        Coupling { a: self.g_real, b: 0.0 }
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn omega0(&self) -> f64 {
        (self.tau0 * self.tau0 / 4.0 + self.delta0).sqrt()
    }

    /// The rotating overlap γ(t) = γ₀ e^{igτ₀t}.
    pub fn gamma_at(&self, t: f64) -> C64 {
        self.gamma0 * C64::from_polar(1.0, self.g_real * self.tau0 * t)
    }

    /// The period 2π/(gω₀) of the interaction-picture coefficients.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.g_real.abs() * self.omega0())
    }
}

/// Evaluate the real-coupling pair at time t.
pub fn real_g_state_pair(spec: &RealGSpec, t: f64) -> Result<(StateVector, StateVector)> {
    let h = &spec.hamiltonian;
    let dim = h.dim();
    let k = real_g_k(spec.tau0, spec.delta0)?;
    let omega0 = spec.omega0();
    let g = spec.g_real;

    // Continuous square-root branch: half the phase of gamma0, advanced
    // linearly with g tau0 t / 2.
    let half_phase = 0.5 * (spec.gamma0.arg() + g * spec.tau0 * t);
    let sqrt_gamma = C64::from_polar(spec.delta0.sqrt().sqrt(), half_phase);

    let e_plus = C64::from_polar(1.0, g * omega0 * t);
    let e_minus = e_plus.conj();

    let mut psi_eig = DVector::from_element(dim, C64::new(0.0, 0.0));
    let mut phi_eig = DVector::from_element(dim, C64::new(0.0, 0.0));
    for n in 0..dim {
        let free = C64::from_polar(1.0, -h.eigenvalues()[n] * t);
        let psi_hat = spec.a_coeffs[n] * e_plus + spec.b_coeffs[n] * e_minus;
        let phi_hat = -spec.a_coeffs[n] / k * e_plus + spec.b_coeffs[n] * k * e_minus;
        psi_eig[n] = sqrt_gamma * psi_hat * free;
        phi_eig[n] = sqrt_gamma.conj() * phi_hat * free;
    }
    Ok((
        StateVector::from_dvector(h.from_eigenbasis(&psi_eig), BasisTag::canonical()),
        StateVector::from_dvector(h.from_eigenbasis(&phi_eig), BasisTag::canonical()),
    ))
}
