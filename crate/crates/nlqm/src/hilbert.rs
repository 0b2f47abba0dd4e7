//! Finite-dimensional Hilbert-space arithmetic and pairwise observables.
//!
//! A system state is a pair of vectors (|ψ⟩, |φ⟩). Everything the scalar
//! dynamics needs is carried by the inner products
//!
//! ```text
//! N = ⟨ψ|ψ⟩ + ⟨φ|φ⟩,   τ = ⟨ψ|ψ⟩ − ⟨φ|φ⟩,   γ = ⟨φ|ψ⟩,   δ = γ*γ,
//! ```
//!
//! together with the Schwarz parameter S = ⟨ψ|ψ⟩⟨φ|φ⟩ − |⟨ψ|φ⟩|² and the
//! density matrix ρ = (|ψ⟩⟨ψ| + |φ⟩⟨φ|)/N, whose purity obeys
//! Tr ρ² = 1 − 2S/N².
//!
//! Hamiltonians are dense Hermitian matrices with the spectral decomposition
//! computed once at construction and cached; the linear propagator is
//! U e^{−i diag(E_n) t} U†.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Double-precision complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Relative tolerance for accepting an input matrix as Hermitian:
/// ‖M − M†‖_max ≤ `HERMITICITY_RTOL` · ‖M‖_max.
pub const HERMITICITY_RTOL: f64 = 1e-10;

/// Threshold below which the first "nonzero" eigenvector component is
/// searched past, when fixing the overall phase of an eigenvector.
const PHASE_PIVOT_TOL: f64 = 1e-8;

// ---------------------------------------------------------------------------
// BasisTag
// ---------------------------------------------------------------------------

/// Identifier of the basis a [`StateVector`]'s amplitudes refer to.
///
/// Operations on two states require equal tags; mixing bases is a contract
/// violation, not a silent change of representation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BasisTag(Arc<str>);

impl BasisTag {
    pub fn new(name: &str) -> Self {
        BasisTag(Arc::from(name))
    }

    /// The default tag for abstract finite-dimensional states.
    pub fn canonical() -> Self {
        BasisTag::new("canonical")
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

/// A finite-dimensional complex state vector tagged with its basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
    basis: BasisTag,
}

impl StateVector {
    /// Build a state from its amplitudes. Fails on dimension 0 or non-finite
    /// entries.
    pub fn new(amplitudes: Vec<C64>, basis: BasisTag) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ContractViolation(
                "state vector dimension must be >= 1".into(),
            ));
        }
        if !amplitudes.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::ContractViolation(
                "state vector amplitudes must be finite".into(),
            ));
        }
        Ok(StateVector {
            amplitudes: DVector::from_vec(amplitudes),
            basis,
        })
    }

    /// Build a state in the canonical basis.
    pub fn canonical(amplitudes: Vec<C64>) -> Result<Self> {
        StateVector::new(amplitudes, BasisTag::canonical())
    }

    /// The k-th canonical basis vector of the given dimension.
    pub fn basis_state(dim: usize, k: usize, basis: BasisTag) -> Result<Self> {
        if k >= dim {
            return Err(Error::ContractViolation(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[k] = C64::new(1.0, 0.0);
        StateVector::new(amps, basis)
    }

    pub(crate) fn from_dvector(amplitudes: DVector<C64>, basis: BasisTag) -> Self {
        StateVector { amplitudes, basis }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn basis(&self) -> &BasisTag {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn component(&self, k: usize) -> C64 {
        self.amplitudes[k]
    }

    /// ⟨v|v⟩ — real and non-negative by construction.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Return this state scaled by a complex factor.
    pub fn scaled(&self, factor: C64) -> Self {
        StateVector {
            amplitudes: self.amplitudes.map(|a| a * factor),
            basis: self.basis.clone(),
        }
    }

    /// Return this state normalized to unit norm; errors on zero norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::DegenerateInput("cannot normalize a zero vector".into()));
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    fn check_compatible(&self, other: &StateVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        if self.basis != other.basis {
            return Err(Error::BasisMismatch {
                left: self.basis.to_string(),
                right: other.basis.to_string(),
            });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Coupling
// ---------------------------------------------------------------------------

/// The complex coupling constant g = a + i b (units of energy).
///
/// The general two-vector solution requires b ≠ 0; the b = 0 case is handled
/// separately by the real-coupling constructions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling {
    /// Real part a.
    pub a: f64,
    /// Imaginary part b.
    pub b: f64,
}

impl Coupling {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::ContractViolation("coupling must be finite".into()));
        }
        Ok(Coupling { a, b })
    }

    pub fn from_complex(g: C64) -> Result<Self> {
        Coupling::new(g.re, g.im)
    }

    pub fn as_complex(&self) -> C64 {
        C64::new(self.a, self.b)
    }

    /// Error unless b ≠ 0 (required by the tanh-branch solution family).
    pub fn require_complex(&self) -> Result<()> {
        if self.b == 0.0 {
            return Err(Error::WrongCase(
                "b = 0: use the real-coupling constructions instead".into(),
            ));
        }
        Ok(())
    }

    /// Error unless b = 0 (required by the real-coupling constructions).
    pub fn require_real(&self) -> Result<()> {
        if self.b != 0.0 {
            return Err(Error::WrongCase(format!(
                "b = {} != 0: this operation applies to real coupling only",
                self.b
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// ReducedState
// ---------------------------------------------------------------------------

/// The scalar observables (N, τ, γ, δ) of a state pair.
///
/// δ = |γ|² holds exactly by construction wherever this type is produced by
/// the crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedState {
    /// N = ⟨ψ|ψ⟩ + ⟨φ|φ⟩.
    pub norm_sum: f64,
    /// τ = ⟨ψ|ψ⟩ − ⟨φ|φ⟩.
    pub tau: f64,
    /// γ = ⟨φ|ψ⟩.
    pub gamma: C64,
    /// δ = γ*γ.
    pub delta: f64,
}

impl ReducedState {
    /// Build from (N, τ, γ), deriving δ = |γ|².
    pub fn from_parts(norm_sum: f64, tau: f64, gamma: C64) -> Self {
        ReducedState {
            norm_sum,
            tau,
            gamma,
            delta: gamma.norm_sqr(),
        }
    }

    /// The conserved combination ω₀² = τ²/4 + δ.
    pub fn omega0_sq(&self) -> f64 {
        self.tau * self.tau / 4.0 + self.delta
    }

    /// Schwarz parameter S = ⟨ψ|ψ⟩⟨φ|φ⟩ − |⟨ψ|φ⟩|², expressed through
    /// (N, τ, δ) as (N² − τ²)/4 − δ.
    pub fn schwarz(&self) -> f64 {
        (self.norm_sum * self.norm_sum - self.tau * self.tau) / 4.0 - self.delta
    }

    /// The purity 1 − 2S/N² implied by the scalars alone.
    pub fn purity_identity(&self) -> f64 {
        1.0 - 2.0 * self.schwarz() / (self.norm_sum * self.norm_sum)
    }

    /// ⟨ψ|ψ⟩ = (N + τ)/2.
    pub fn psi_norm_sqr(&self) -> f64 {
        0.5 * (self.norm_sum + self.tau)
    }

    /// ⟨φ|φ⟩ = (N − τ)/2.
    pub fn phi_norm_sqr(&self) -> f64 {
        0.5 * (self.norm_sum - self.tau)
    }
}

// ---------------------------------------------------------------------------
// HermitianOperator
// ---------------------------------------------------------------------------

/// A dense Hermitian operator with its spectral decomposition cached.
///
/// Eigenvalues are stored ascending; each eigenvector's overall phase is fixed
/// by making its first component of appreciable magnitude real and positive,
/// so fixtures are reproducible run to run.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    matrix: DMatrix<C64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

impl HermitianOperator {
    /// Accept a matrix as Hermitian if ‖M − M†‖_max ≤ 10⁻¹⁰ ‖M‖_max, then
    /// decompose (M + M†)/2.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::ContractViolation(format!(
                "operator matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() == 0 {
            return Err(Error::ContractViolation(
                "operator dimension must be >= 1".into(),
            ));
        }
        if !matrix.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::ContractViolation(
                "operator entries must be finite".into(),
            ));
        }
        let adjoint = matrix.adjoint();
        let deviation = (&matrix - &adjoint)
            .iter()
            .map(|a| a.norm())
            .fold(0.0, f64::max);
        let scale = matrix.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let tolerance = HERMITICITY_RTOL * scale;
        if deviation > tolerance {
            return Err(Error::NotHermitian {
                deviation,
                tolerance,
            });
        }
        // Symmetrize to remove the (accepted) rounding-level asymmetry before
        // decomposing.
        let sym = (&matrix + &adjoint).map(|a| a * 0.5);
        let eig = sym.clone().symmetric_eigen();

        let dim = sym.nrows();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[i]
                .partial_cmp(&eig.eigenvalues[j])
                .expect("eigenvalues of a Hermitian matrix are finite reals")
        });
        let eigenvalues = DVector::from_iterator(dim, order.iter().map(|&i| eig.eigenvalues[i]));
        let mut eigenvectors = DMatrix::zeros(dim, dim);
        for (col, &src) in order.iter().enumerate() {
            let mut v: DVector<C64> = eig.eigenvectors.column(src).into_owned();
            // Phase convention: first component above the pivot threshold is
            // made real positive.
            if let Some(pivot) = v.iter().find(|c| c.norm() > PHASE_PIVOT_TOL) {
                let phase = pivot.conj() / pivot.norm();
                v.iter_mut().for_each(|c| *c *= phase);
            }
            eigenvectors.set_column(col, &v);
        }

        Ok(HermitianOperator {
            matrix: sym,
            eigenvalues,
            eigenvectors,
        })
    }

    /// Diagonal Hamiltonian with the given (real) energies.
    pub fn from_diagonal(energies: &[f64]) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::ContractViolation(
                "operator dimension must be >= 1".into(),
            ));
        }
        let dim = energies.len();
        let mut m = DMatrix::zeros(dim, dim);
        for (k, &e) in energies.iter().enumerate() {
            m[(k, k)] = C64::new(e, 0.0);
        }
        HermitianOperator::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Eigenvalues E_n, ascending.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Unitary matrix whose columns are the eigenvectors |n⟩, ordered to
    /// match [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    /// Apply H to a state: H|v⟩.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        self.check_dim(v)?;
        Ok(StateVector::from_dvector(
            &self.matrix * v.amplitudes(),
            v.basis().clone(),
        ))
    }

    /// Map eigenbasis coefficients to the operator's own basis: U c.
    pub fn from_eigenbasis(&self, coeffs: &DVector<C64>) -> DVector<C64> {
        &self.eigenvectors * coeffs
    }

    /// Map a vector in the operator's basis to eigenbasis coefficients: U† v.
    pub fn to_eigenbasis(&self, v: &DVector<C64>) -> DVector<C64> {
        self.eigenvectors.adjoint() * v
    }

    pub(crate) fn check_dim(&self, v: &StateVector) -> Result<()> {
        if self.dim() != v.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: v.dim(),
            });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// DensityMatrix
// ---------------------------------------------------------------------------

/// A dense density matrix: Hermitian, unit trace, positive semi-definite
/// within tolerance.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
}

/// Validation tolerance for density-matrix trace and eigenvalue positivity.
pub const DENSITY_TOL: f64 = 1e-10;

impl DensityMatrix {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::ContractViolation(
                "density matrix must be square with dimension >= 1".into(),
            ));
        }
        let adjoint = matrix.adjoint();
        let dev = (&matrix - &adjoint)
            .iter()
            .map(|a| a.norm())
            .fold(0.0, f64::max);
        if dev > DENSITY_TOL {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: DENSITY_TOL,
            });
        }
        let trace: C64 = matrix.diagonal().iter().sum();
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(Error::ContractViolation(format!(
                "density matrix trace must be 1, got {trace}"
            )));
        }
        let sym = (&matrix + &adjoint).map(|a| a * 0.5);
        let eigs = sym.clone().symmetric_eigen().eigenvalues;
        if eigs.iter().any(|&e| e < -DENSITY_TOL) {
            return Err(Error::ContractViolation(format!(
                "density matrix has negative eigenvalue {:.3e}",
                eigs.iter().cloned().fold(f64::INFINITY, f64::min)
            )));
        }
        Ok(DensityMatrix { matrix: sym })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|c| c.re).sum()
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> DVector<f64> {
        let mut e: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .collect();
        e.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        DVector::from_vec(e)
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// ⟨u|v⟩ = Σ_k u_k* v_k.
pub fn inner_product(u: &StateVector, v: &StateVector) -> Result<C64> {
    u.check_compatible(v)?;
    Ok(u.amplitudes()
        .iter()
        .zip(v.amplitudes().iter())
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// The scalar observables (N, τ, γ, δ) of a pair, with γ = ⟨φ|ψ⟩ and
/// δ = |γ|² exactly.
pub fn reduced_observables(psi: &StateVector, phi: &StateVector) -> Result<ReducedState> {
    psi.check_compatible(phi)?;
    let n_psi = psi.norm_sqr();
    let n_phi = phi.norm_sqr();
    let gamma = inner_product(phi, psi)?;
    Ok(ReducedState::from_parts(n_psi + n_phi, n_psi - n_phi, gamma))
}

/// ρ = (|ψ⟩⟨ψ| + |φ⟩⟨φ|)/N. Errors when N = 0.
pub fn density_matrix(psi: &StateVector, phi: &StateVector) -> Result<DensityMatrix> {
    psi.check_compatible(phi)?;
    let norm_sum = psi.norm_sqr() + phi.norm_sqr();
    if norm_sum <= 0.0 {
        return Err(Error::DegenerateInput(
            "density matrix undefined for a zero-norm pair (N = 0)".into(),
        ));
    }
    let dim = psi.dim();
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = (psi.component(i) * psi.component(j).conj()
                + phi.component(i) * phi.component(j).conj())
                / norm_sum;
        }
    }
    DensityMatrix::new(m)
}

/// Schwarz parameter S = ⟨ψ|ψ⟩⟨φ|φ⟩ − |⟨ψ|φ⟩|².
///
/// Non-negative by the Cauchy–Schwarz inequality; zero exactly when the pair
/// is proportional.
pub fn schwarz_parameter(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    psi.check_compatible(phi)?;
    let overlap = inner_product(psi, phi)?;
    Ok(psi.norm_sqr() * phi.norm_sqr() - overlap.norm_sqr())
}

/// Tr ρ², computed from the matrix itself (Σ_ij |ρ_ij|² for Hermitian ρ).
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().iter().map(|c| c.norm_sqr()).sum()
}

/// Evolve a state under the linear Schrödinger equation i∂_t|v⟩ = H|v⟩ for
/// time t, via the cached spectral decomposition.
pub fn evolve_linear(h: &HermitianOperator, v0: &StateVector, t: f64) -> Result<StateVector> {
    h.check_dim(v0)?;
    let mut coeffs = h.to_eigenbasis(v0.amplitudes());
    for (c, &e) in coeffs.iter_mut().zip(h.eigenvalues().iter()) {
        *c *= C64::from_polar(1.0, -e * t);
    }
    Ok(StateVector::from_dvector(
        h.from_eigenbasis(&coeffs),
        v0.basis().clone(),
    ))
}

/// Deterministic random Hermitian matrix: Gaussian entries symmetrized as
/// (M + M†)/2, seeded so that fixtures are reproducible.
pub fn random_hermitian(dim: usize, seed: u64) -> Result<HermitianOperator> {
    if dim == 0 {
        return Err(Error::ContractViolation(
            "operator dimension must be >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let re: f64 = normal.sample(&mut rng);
            let im: f64 = normal.sample(&mut rng);
            m[(i, j)] = C64::new(re, im);
        }
    }
    let sym = (&m + &m.adjoint()).map(|a| a * 0.5);
    HermitianOperator::new(sym)
}

/// Deterministic random unit vector with Gaussian components.
pub fn random_state(dim: usize, seed: u64, basis: BasisTag) -> Result<StateVector> {
    if dim == 0 {
        return Err(Error::ContractViolation(
            "state dimension must be >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let amps: Vec<C64> = (0..dim)
        .map(|_| C64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
        .collect();
    StateVector::new(amps, basis)?.normalized()
}
