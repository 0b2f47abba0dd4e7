//! Closed-form construction of the coupled pair, its asymptotics, and the
//! S-matrix.
//!
//! Let |A⟩ and |B⟩ be two orthogonal normalized solutions of the linear
//! Schrödinger equation, built from eigenbasis coefficients A_n, B_n. The
//! general pair is
//!
//! ```text
//! |ψ⟩ = γ^{1/2} [  e^{+i g ω₀ t} sinh ϑ |A⟩ + e^{−i g ω₀ t} cosh ϑ |B⟩ ]
//! |φ⟩ = γ*^{1/2} [ −e^{+i g* ω₀ t} sinh ϑ |A⟩ + e^{−i g* ω₀ t} cosh ϑ |B⟩ ]
//! ```
//!
//! with γ(t) the closed-form overlap from [`crate::reduced`]. The total norm
//! is N = 2ω₀ cosh 2ϑ; the Schwarz parameter 4ω₀² sinh²ϑ cosh²ϑ is constant;
//! the density matrix is (2ω₀/N)(sinh²ϑ |A⟩⟨A| + cosh²ϑ |B⟩⟨B|) and evolves
//! linearly. As t → ∓∞ (for b > 0) the pair tends, in the interaction
//! picture, to √(2ω₀) e^{±iθ̂/2} times a single channel, with the A↔B
//! exchange between the two limits encoded by an off-diagonal unitary
//! S-matrix with phase θ̂ = θ − (a/b) ln 2.
//!
//! Branch choice for γ^{1/2}: the principal square root at t = t₀, continued
//! continuously in t by tracking the accumulated phase of γ. Equivalently,
//! the phase of γ^{1/2} is half the (unwrapped) phase of γ with θ reduced to
//! (−π, π] once, up front.

use nalgebra::{DVector, Matrix2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::hilbert::{BasisTag, Coupling, DensityMatrix, HermitianOperator, StateVector, C64};
use crate::reduced::{gamma_phase, ln_cosh, ReducedParams};

/// Tolerance on the normalization and orthogonality constraints of the
/// coefficient vectors.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// Wrap an angle into (−π, π].
fn principal_angle(theta: f64) -> f64 {
    let wrapped = theta.sin().atan2(theta.cos());
    if wrapped <= -std::f64::consts::PI {
        wrapped + 2.0 * std::f64::consts::PI
    } else {
        wrapped
    }
}

// ---------------------------------------------------------------------------
// AnalyticSolutionSpec
// ---------------------------------------------------------------------------

/// Parameters of a closed-form solution: coefficient vectors for the two
/// orthogonal linear solutions, the conserved frequency ω₀, the hyperbolic
/// mixing angle ϑ, a free phase θ, the coupling g (b ≠ 0), and the
/// Hamiltonian.
///
/// Construction validates Σ|A_n|² = Σ|B_n|² = 1 and Σ B_n* A_n = 0 within
/// [`CONSTRAINT_TOL`], so any instance in hand is a checked spec.
#[derive(Clone, Debug)]
pub struct AnalyticSolutionSpec {
    a_coeffs: DVector<C64>,
    b_coeffs: DVector<C64>,
    omega0: f64,
    vartheta: f64,
    theta: f64,
    g: Coupling,
    hamiltonian: HermitianOperator,
}

impl AnalyticSolutionSpec {
    pub fn new(
        a_coeffs: Vec<C64>,
        b_coeffs: Vec<C64>,
        omega0: f64,
        vartheta: f64,
        theta: f64,
        g: Coupling,
        hamiltonian: HermitianOperator,
    ) -> Result<Self> {
        let dim = hamiltonian.dim();
        if a_coeffs.len() != dim {
            return Err(Error::DimensionMismatch {
                left: a_coeffs.len(),
                right: dim,
            });
        }
        if b_coeffs.len() != dim {
            return Err(Error::DimensionMismatch {
                left: b_coeffs.len(),
                right: dim,
            });
        }
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::ContractViolation(format!(
                "omega0 must be positive and finite, got {omega0}"
            )));
        }
        if !(vartheta.is_finite() && theta.is_finite()) {
            return Err(Error::ContractViolation(
                "vartheta and theta must be finite".into(),
            ));
        }
        g.require_complex()?;

        let a = DVector::from_vec(a_coeffs);
        let b = DVector::from_vec(b_coeffs);
        let norm_a: f64 = a.iter().map(|c| c.norm_sqr()).sum();
        let norm_b: f64 = b.iter().map(|c| c.norm_sqr()).sum();
        let overlap: C64 = b.iter().zip(a.iter()).map(|(bn, an)| bn.conj() * an).sum();

        let res_a = (norm_a - 1.0).abs();
        if res_a > CONSTRAINT_TOL {
            return Err(Error::ConstraintViolation {
                constraint: "sum |A_n|^2 = 1".into(),
                residual: res_a,
                tolerance: CONSTRAINT_TOL,
            });
        }
        let res_b = (norm_b - 1.0).abs();
        if res_b > CONSTRAINT_TOL {
            return Err(Error::ConstraintViolation {
                constraint: "sum |B_n|^2 = 1".into(),
                residual: res_b,
                tolerance: CONSTRAINT_TOL,
            });
        }
        let res_o = overlap.norm();
        if res_o > CONSTRAINT_TOL {
            return Err(Error::ConstraintViolation {
                constraint: "sum B_n* A_n = 0".into(),
                residual: res_o,
                tolerance: CONSTRAINT_TOL,
            });
        }

        Ok(AnalyticSolutionSpec {
            a_coeffs: a,
            b_coeffs: b,
            omega0,
            vartheta,
            theta,
            g,
            hamiltonian,
        })
    }

    /// Deterministic spec with a seeded random orthonormal (A, B) coefficient
    /// pair (Gaussian vectors, Gram–Schmidt).
    pub fn from_seed(
        hamiltonian: HermitianOperator,
        omega0: f64,
        vartheta: f64,
        theta: f64,
        g: Coupling,
        seed: u64,
    ) -> Result<Self> {
        let (a, b) = random_orthonormal_pair(hamiltonian.dim(), seed)?;
        AnalyticSolutionSpec::new(a, b, omega0, vartheta, theta, g, hamiltonian)
    }

    pub fn a_coeffs(&self) -> &DVector<C64> {
        &self.a_coeffs
    }

    pub fn b_coeffs(&self) -> &DVector<C64> {
        &self.b_coeffs
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn vartheta(&self) -> f64 {
        self.vartheta
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn coupling(&self) -> Coupling {
        self.g
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// The conserved total norm N = 2ω₀ cosh 2ϑ.
    pub fn norm_sum(&self) -> f64 {
        2.0 * self.omega0 * (2.0 * self.vartheta).cosh()
    }

    /// The constant Schwarz parameter S = 4ω₀² sinh²ϑ cosh²ϑ.
    pub fn schwarz(&self) -> f64 {
        let s = self.vartheta.sinh();
        let c = self.vartheta.cosh();
        4.0 * self.omega0 * self.omega0 * s * s * c * c
    }

    /// The scalar-solution parameters (ω₀, θ, g) with t₀ = 0 matched by the
    /// constructed pair.
    pub fn reduced_params(&self) -> ReducedParams {
        ReducedParams::new(self.omega0, self.theta, self.g)
            .expect("spec construction already validated omega0 and g")
    }

    /// The asymptotic phase θ̂ = θ − (a/b) ln 2, with θ reduced to the
    /// principal range used by the square-root branch.
    pub fn theta_hat(&self) -> f64 {
        principal_angle(self.theta) - self.g.a / self.g.b * std::f64::consts::LN_2
    }

    /// The constant density-matrix eigenvalues (2ω₀/N)(sinh²ϑ, cosh²ϑ),
    /// associated with the eigenvectors |A⟩ and |B⟩ respectively.
    pub fn density_eigenvalues(&self) -> (f64, f64) {
        let n = self.norm_sum();
        let s = self.vartheta.sinh();
        let c = self.vartheta.cosh();
        (
            2.0 * self.omega0 / n * s * s,
            2.0 * self.omega0 / n * c * c,
        )
    }

    /// The four scalar coefficients multiplying |A(t)⟩ and |B(t)⟩ in ψ and φ.
    ///
    /// Magnitudes are assembled in log space so extreme |2bω₀t| neither
    /// overflows nor poisons the bounded combinations.
    pub fn pair_coefficients(&self, t: f64) -> PairCoefficients {
        let p = self.reduced_params();
        let xi = p.xi(t);
        let lc = ln_cosh(xi);
        let half_log_gamma_mag = 0.5 * (self.omega0.ln() - lc);
        // Principal phase at t0, continued continuously (gamma_phase is the
        // continuous phase with raw theta; shift once by the wrap).
        let wrap_shift = principal_angle(self.theta) - self.theta;
        let half_phase = 0.5 * (gamma_phase(&p, t) + wrap_shift);

        let a = self.g.a;
        let b = self.g.b;
        let w = self.omega0;
        let sinh_v = self.vartheta.sinh();
        let cosh_v = self.vartheta.cosh();

        // |e^{± i g ω₀ t}| = e^{∓ b ω₀ t}, arg = ± a ω₀ t (and g → g* flips
        // the magnitude factor).
        let psi_a = polar_signed(
            half_log_gamma_mag - b * w * t,
            half_phase + a * w * t,
            sinh_v,
        );
        let psi_b = polar_signed(
            half_log_gamma_mag + b * w * t,
            half_phase - a * w * t,
            cosh_v,
        );
        let phi_a = polar_signed(
            half_log_gamma_mag + b * w * t,
            -half_phase + a * w * t,
            -sinh_v,
        );
        let phi_b = polar_signed(
            half_log_gamma_mag - b * w * t,
            -half_phase - a * w * t,
            cosh_v,
        );
        PairCoefficients {
            psi_a,
            psi_b,
            phi_a,
            phi_b,
        }
    }

    /// Evaluate the closed-form pair at time t, in the Hamiltonian's basis.
    pub fn state_pair_at(&self, t: f64) -> (StateVector, StateVector) {
        let coeff = self.pair_coefficients(t);
        let h = &self.hamiltonian;
        let dim = self.dim();
        let mut psi_eig = DVector::from_element(dim, C64::new(0.0, 0.0));
        let mut phi_eig = DVector::from_element(dim, C64::new(0.0, 0.0));
        for n in 0..dim {
            let free = C64::from_polar(1.0, -h.eigenvalues()[n] * t);
            psi_eig[n] = (coeff.psi_a * self.a_coeffs[n] + coeff.psi_b * self.b_coeffs[n]) * free;
            phi_eig[n] = (coeff.phi_a * self.a_coeffs[n] + coeff.phi_b * self.b_coeffs[n]) * free;
        }
        let psi = StateVector::from_dvector(h.from_eigenbasis(&psi_eig), BasisTag::canonical());
        let phi = StateVector::from_dvector(h.from_eigenbasis(&phi_eig), BasisTag::canonical());
        (psi, phi)
    }

    /// The limiting interaction-picture channel records as t → ∓∞.
    ///
    /// Directions are in physical time. For b > 0, ψ's past limit lives on
    /// the A channel; a negative b reverses the profile argument ξ = 2bω₀t,
    /// so past and future swap roles.
    pub fn asymptotic_pair(&self, direction: Direction) -> AsymptoticPair {
        let toward_negative_xi = match direction {
            Direction::Past => self.g.b > 0.0,
            Direction::Future => self.g.b < 0.0,
        };
        let amp = (2.0 * self.omega0).sqrt();
        let th = self.theta_hat();
        let sinh_v = self.vartheta.sinh();
        let cosh_v = self.vartheta.cosh();
        if toward_negative_xi {
            AsymptoticPair {
                psi: ChannelAmplitude {
                    channel: Channel::A,
                    amplitude: amp * sinh_v,
                    phase: th / 2.0,
                },
                phi: ChannelAmplitude {
                    channel: Channel::B,
                    amplitude: amp * cosh_v,
                    phase: -th / 2.0,
                },
            }
        } else {
            AsymptoticPair {
                psi: ChannelAmplitude {
                    channel: Channel::B,
                    amplitude: amp * cosh_v,
                    phase: th / 2.0,
                },
                phi: ChannelAmplitude {
                    channel: Channel::A,
                    amplitude: -amp * sinh_v,
                    phase: -th / 2.0,
                },
            }
        }
    }

    /// The unitary S-matrix mapping the past pair to the future pair in the
    /// (ψ, φ) channel space.
    pub fn s_matrix(&self) -> SMatrix {
        let th = self.theta_hat();
        let e_plus = C64::from_polar(1.0, th);
        let e_minus = C64::from_polar(1.0, -th);
        let zero = C64::new(0.0, 0.0);
        // For b > 0: psi_+ = e^{i th} phi_-, phi_+ = -e^{-i th} psi_-.
        // Reversing the sign of b swaps the roles of the limits, which
        // inverts the map (S^{-1} = -S for this form).
        let entries = if self.g.b > 0.0 {
            Matrix2::new(zero, e_plus, -e_minus, zero)
        } else {
            Matrix2::new(zero, -e_plus, e_minus, zero)
        };
        SMatrix {
            entries,
            theta_hat: th,
        }
    }

    /// Coefficient vectors (in the eigenbasis, interaction picture) of the
    /// limiting pair in the given direction.
    pub fn asymptotic_vectors(&self, direction: Direction) -> (DVector<C64>, DVector<C64>) {
        let pair = self.asymptotic_pair(direction);
        (self.channel_vector(&pair.psi), self.channel_vector(&pair.phi))
    }

    fn channel_vector(&self, record: &ChannelAmplitude) -> DVector<C64> {
        let base = match record.channel {
            Channel::A => &self.a_coeffs,
            Channel::B => &self.b_coeffs,
        };
        let factor = record.value();
        base.map(|c| c * factor)
    }

    /// The density matrix ρ(t) = (2ω₀/N)(sinh²ϑ |A(t)⟩⟨A(t)| +
    /// cosh²ϑ |B(t)⟩⟨B(t)|), expressed in the Hamiltonian's basis.
    ///
    /// Its eigenvalues are time-independent and it satisfies the linear von
    /// Neumann equation i ∂_t ρ = [H, ρ].
    pub fn density_matrix_at(&self, t: f64) -> Result<DensityMatrix> {
        let h = &self.hamiltonian;
        let dim = self.dim();
        let (lam_a, lam_b) = self.density_eigenvalues();
        let phase = |n: usize| C64::from_polar(1.0, -h.eigenvalues()[n] * t);
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let a_term = self.a_coeffs[i] * self.a_coeffs[j].conj();
                let b_term = self.b_coeffs[i] * self.b_coeffs[j].conj();
                m[(i, j)] = (lam_a * a_term + lam_b * b_term) * phase(i) * phase(j).conj();
            }
        }
        let u = h.eigenvectors();
        DensityMatrix::new(u * m * u.adjoint())
    }

    /// Project a state onto the interaction-picture eigenbasis: coefficients
    /// c_n e^{+i E_n t} with the free phases removed.
    pub fn interaction_picture(&self, state: &StateVector, t: f64) -> Result<DVector<C64>> {
        self.hamiltonian.check_dim(state)?;
        let mut coeffs = self.hamiltonian.to_eigenbasis(state.amplitudes());
        for (c, &e) in coeffs.iter_mut().zip(self.hamiltonian.eigenvalues().iter()) {
            *c *= C64::from_polar(1.0, e * t);
        }
        Ok(coeffs)
    }
}

/// exp(log_mag + i·phase) · sign, assembled without overflow.
fn polar_signed(log_mag: f64, phase: f64, real_factor: f64) -> C64 {
    if real_factor == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let mag = (log_mag + real_factor.abs().ln()).exp();
    let sign = if real_factor < 0.0 { -1.0 } else { 1.0 };
    C64::from_polar(mag, phase) * sign
}

/// The scalar coefficients of |A(t)⟩ and |B(t)⟩ in the constructed pair.
#[derive(Clone, Copy, Debug)]
pub struct PairCoefficients {
    pub psi_a: C64,
    pub psi_b: C64,
    pub phi_a: C64,
    pub phi_b: C64,
}

/// Which asymptotic limit to take, in physical time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// t → −∞.
    Past,
    /// t → +∞.
    Future,
}

/// The two orthogonal linear-solution channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    A,
    B,
}

/// A single-channel record: (signed) amplitude and phase of the coefficient
/// multiplying |A⟩ or |B⟩ in an asymptotic limit.
#[derive(Clone, Copy, Debug)]
pub struct ChannelAmplitude {
    pub channel: Channel,
    pub amplitude: f64,
    pub phase: f64,
}

impl ChannelAmplitude {
    pub fn value(&self) -> C64 {
        C64::from_polar(self.amplitude.abs(), self.phase)
            * if self.amplitude < 0.0 {
                C64::new(-1.0, 0.0)
            } else {
                C64::new(1.0, 0.0)
            }
    }
}

/// The limiting pair in one time direction.
#[derive(Clone, Copy, Debug)]
pub struct AsymptoticPair {
    pub psi: ChannelAmplitude,
    pub phi: ChannelAmplitude,
}

/// The 2×2 unitary mapping the past (ψ, φ) pair to the future pair.
#[derive(Clone, Debug)]
pub struct SMatrix {
    entries: Matrix2<C64>,
    theta_hat: f64,
}

impl SMatrix {
    pub fn entries(&self) -> &Matrix2<C64> {
        &self.entries
    }

    pub fn theta_hat(&self) -> f64 {
        self.theta_hat
    }

    /// Max-norm departure from unitarity, ‖S†S − 1‖_max.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.entries.adjoint() * self.entries;
        let id = Matrix2::identity();
        (prod - id).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Apply the map to a (ψ, φ) pair of coefficient vectors.
    pub fn apply(&self, psi: &DVector<C64>, phi: &DVector<C64>) -> (DVector<C64>, DVector<C64>) {
        let s = &self.entries;
        let psi_out = psi.map(|c| c * s[(0, 0)]) + phi.map(|c| c * s[(0, 1)]);
        let phi_out = psi.map(|c| c * s[(1, 0)]) + phi.map(|c| c * s[(1, 1)]);
        (psi_out, phi_out)
    }
}

/// Deterministic random orthonormal coefficient pair (Gram–Schmidt on
/// seeded Gaussian vectors).
pub fn random_orthonormal_pair(dim: usize, seed: u64) -> Result<(Vec<C64>, Vec<C64>)> {
    if dim < 2 {
        return Err(Error::ContractViolation(
            "an orthonormal pair needs dimension >= 2".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut draw = |n: usize| -> DVector<C64> {
        DVector::from_iterator(
            n,
            (0..n).map(|_| C64::new(normal.sample(&mut rng), normal.sample(&mut rng))),
        )
    };
    let mut a = draw(dim);
    a /= C64::new(a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt(), 0.0);
    let mut b = draw(dim);
    let proj: C64 = a.iter().zip(b.iter()).map(|(an, bn)| an.conj() * bn).sum();
    b -= a.map(|c| c * proj);
    let nb = b.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if nb < 1e-8 {
        return Err(Error::DegenerateInput(
            "seeded vectors were (numerically) parallel; use another seed".into(),
        ));
    }
    b /= C64::new(nb, 0.0);
    Ok((
        a.iter().cloned().collect(),
        b.iter().cloned().collect(),
    ))
}

/// The exceptional solution: two orthogonal linear Schrödinger evolutions,
/// which solve the nonlinear system exactly with γ(t) = 0 for all t.
pub fn exceptional_solution(
    a: &StateVector,
    b: &StateVector,
    h: &HermitianOperator,
    t: f64,
) -> Result<(StateVector, StateVector)> {
    let overlap = crate::hilbert::inner_product(b, a)?;
    let scale = (a.norm() * b.norm()).max(f64::MIN_POSITIVE);
    if overlap.norm() > 1e-10 * scale {
        return Err(Error::ConstraintViolation {
            constraint: "<B|A> = 0".into(),
            residual: overlap.norm(),
            tolerance: 1e-10 * scale,
        });
    }
    let psi = crate::hilbert::evolve_linear(h, a, t)?;
    let phi = crate::hilbert::evolve_linear(h, b, t)?;
    Ok((psi, phi))
}
