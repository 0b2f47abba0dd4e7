//! Two-state-vector nonlinear Schrödinger dynamics.
//!
//! This crate simulates a system described by a *pair* of state vectors
//! (|ψ⟩, |φ⟩) coupled through a complex constant g = a + ib:
//!
//! ```text
//! i ∂_t |ψ⟩ = H|ψ⟩ + g ⟨φ|ψ⟩ |φ⟩
//! i ∂_t |φ⟩ = H|φ⟩ + g* ⟨ψ|φ⟩ |ψ⟩
//! ```
//!
//! For any Hamiltonian with a solved eigenvalue problem the system is exactly
//! solvable: the scalar observables (N, τ, γ, δ) close on themselves and
//! follow tanh/sech profiles set by a conserved frequency ω₀, and the full
//! pair is a time-dependent mixture of two orthogonal linear solutions |A⟩
//! and |B⟩ with hyperbolic mixing angle ϑ. The crate provides
//!
//! - [`hilbert`]: state vectors, Hermitian operators with cached spectral
//!   decompositions, pairwise observables, density matrix and purity;
//! - [`reduced`]: the Hamiltonian-independent scalar ODE system, its closed
//!   forms, and the branch analysis that rejects singular solution families;
//! - [`analytic`]: the closed-form state pair, its t → ±∞ limits, and the
//!   unitary S-matrix connecting them;
//! - [`integrator`]: direct numerical integration (fixed-step RK4 and
//!   adaptive Dormand–Prince 5(4)) of the full nonlinear system and of its
//!   linearization around a known γ(t);
//! - [`appendix`]: the single-vector self-coupled case and the real-coupling
//!   (b = 0) pair;
//! - [`spatial`]: a periodic-grid split-step solver for the free-Hamiltonian
//!   form of the equations in one dimension;
//! - [`cli`]: a config-driven front end (`nlqm run/verify/compare/sweep`)
//!   that exports trajectories, drift reports, and plots.
//!
//! The `examples/` directory contains one runnable program per capability;
//! start with `analytic_pair` and `nonlinear_integration`.

pub mod analytic;
pub mod appendix;
pub mod cli;
pub mod error;
pub mod hilbert;
pub mod integrator;
pub mod ode;
pub mod reduced;
pub mod spatial;

pub use error::{Error, Result};
pub use hilbert::{
    density_matrix, evolve_linear, inner_product, purity, random_hermitian, reduced_observables,
    schwarz_parameter, BasisTag, Coupling, DensityMatrix, HermitianOperator, ReducedState,
    StateVector, C64,
};
pub use ode::{IntegratorConfig, Method, TimeSpan};
