//! Time-reversal symmetry: when an anti-unitary (here complex conjugation,
//! for a real Hamiltonian matrix) commutes with H, running time backwards
//! while swapping psi <-> phi maps solutions to solutions.
//!
//! Concretely: if (psi, phi) solves the system, so does
//! (conj phi(T - t), conj psi(T - t)).
//!
//! ```bash
//! cargo run --example time_reversal
//! ```

use nalgebra::DMatrix;
use nlqm::analytic::AnalyticSolutionSpec;
use nlqm::hilbert::{Coupling, HermitianOperator, StateVector, C64};
use nlqm::integrator::integrate;
use nlqm::ode::{IntegratorConfig, TimeSpan};
use rand::{Rng, SeedableRng};

fn main() -> nlqm::Result<()> {
    // A real symmetric Hamiltonian, so conjugation commutes with it.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    let dim = 3;
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..=i {
            let v: f64 = rng.gen_range(-1.0..1.0);
            m[(i, j)] = C64::new(v, 0.0);
            m[(j, i)] = C64::new(v, 0.0);
        }
    }
    let h = HermitianOperator::new(m)?;

    let spec = AnalyticSolutionSpec::from_seed(
        h.clone(),
        1.0,
        0.25,
        0.4,
        Coupling::new(0.8, 0.5)?,
        3,
    )?;
    let (psi0, phi0) = spec.state_pair_at(0.0);
    let big_t = 1.5;
    let config = IntegratorConfig::default();

    let forward = integrate(
        &psi0,
        &phi0,
        &h,
        spec.coupling(),
        TimeSpan::new(0.0, big_t, 2)?,
        &config,
    )?;
    let conj = |s: &StateVector| {
        StateVector::new(
            s.amplitudes().iter().map(|c| c.conj()).collect(),
            s.basis().clone(),
        )
        .expect("finite amplitudes")
    };
    let psi_t = forward.psi_states.last().expect("nonempty");
    let phi_t = forward.phi_states.last().expect("nonempty");

    // Integrate the conjugated, swapped pair forward for the same duration;
    // it must land on the conjugated, swapped initial data.
    let reversed = integrate(
        &conj(phi_t),
        &conj(psi_t),
        &h,
        spec.coupling(),
        TimeSpan::new(0.0, big_t, 2)?,
        &config,
    )?;
    let max_diff = |a: &StateVector, b: &StateVector| {
        (a.amplitudes() - b.amplitudes())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    };
    let err = max_diff(reversed.psi_states.last().expect("nonempty"), &conj(&phi0))
        .max(max_diff(reversed.phi_states.last().expect("nonempty"), &conj(&psi0)));
    println!("round trip through the reversal map over T = {big_t}:");
    println!("  |reversed(T) - (conj phi0, conj psi0)| = {err:.3e}");
    println!();
    println!("The psi universe seen backwards is the phi universe.");
    Ok(())
}
