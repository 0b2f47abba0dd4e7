//! The pair's density matrix evolves linearly even though the states do not.
//!
//! rho = (|psi><psi| + |phi><phi|)/N has constant eigenvalues
//! (2 omega0/N)(sinh^2, cosh^2) vartheta, satisfies i d rho/dt = [H, rho],
//! and its purity obeys Tr rho^2 = 1 - 2S/N^2.
//!
//! ```bash
//! cargo run --example density_matrix_evolution
//! ```

use nlqm::analytic::AnalyticSolutionSpec;
use nlqm::hilbert::{density_matrix, purity, random_hermitian, reduced_observables, Coupling, C64};

fn main() -> nlqm::Result<()> {
    let spec = AnalyticSolutionSpec::from_seed(
        random_hermitian(4, 42)?,
        1.0,
        0.3,
        0.7,
        Coupling::new(1.0, 0.5)?,
        7,
    )?;
    let (lam_a, lam_b) = spec.density_eigenvalues();
    println!("expected eigenvalues: 0, 0, {lam_a:.10}, {lam_b:.10} (constant in t)");
    println!();
    println!("{:>5}  {:>32}  {:>12} {:>12}", "t", "eigenvalues of rho(t)", "Tr rho^2", "1-2S/N^2");

    for k in 0..=6 {
        let t = -3.0 + k as f64;
        let (psi, phi) = spec.state_pair_at(t);
        let rho = density_matrix(&psi, &phi)?;
        let eigs = rho.eigenvalues();
        let obs = reduced_observables(&psi, &phi)?;
        println!(
            "{t:>5.1}  [{:+.4} {:+.4} {:+.4} {:+.4}]  {:>12.10} {:>12.10}",
            eigs[0],
            eigs[1],
            eigs[2],
            eigs[3],
            purity(&rho),
            obs.purity_identity(),
        );
    }

    // Linear evolution: finite-difference d rho/dt against -i [H, rho].
    let t = 0.7;
    let dt = 1e-5;
    let rp = spec.density_matrix_at(t + dt)?;
    let rm = spec.density_matrix_at(t - dt)?;
    let fd = (rp.matrix() - rm.matrix()).map(|c| c / (2.0 * dt));
    let rho = spec.density_matrix_at(t)?;
    let h = spec.hamiltonian().matrix();
    let comm = (h * rho.matrix() - rho.matrix() * h).map(|c| c * C64::new(0.0, -1.0));
    let residual = (&fd - &comm).iter().map(|c| c.norm()).fold(0.0, f64::max);
    println!();
    println!("von Neumann residual |d rho/dt + i[H, rho]| at t = {t}: {residual:.3e}");

    // A pure state appears exactly at vartheta = 0.
    let pure = AnalyticSolutionSpec::from_seed(
        random_hermitian(4, 42)?,
        1.0,
        0.0,
        0.0,
        Coupling::new(1.0, 0.5)?,
        7,
    )?;
    let (psi, phi) = pure.state_pair_at(0.0);
    let rho = density_matrix(&psi, &phi)?;
    println!("vartheta = 0: purity = {:.12} (pure state, S = 0)", purity(&rho));
    Ok(())
}
