//! Asymptotic channel exchange and the S-matrix.
//!
//! As t -> -inf the pair lives on (A, B); as t -> +inf on (B, A), with
//! amplitudes sqrt(2 omega0) {sinh, cosh} vartheta and phases ± theta_hat/2,
//! theta_hat = theta - (a/b) ln 2. The map between the limits is the
//! unitary off-diagonal S-matrix.
//!
//! ```bash
//! cargo run --example s_matrix_asymptotics
//! ```

use nlqm::analytic::{AnalyticSolutionSpec, Direction};
use nlqm::hilbert::{random_hermitian, Coupling, C64};
use nlqm::integrator::integrate;
use nlqm::ode::{IntegratorConfig, TimeSpan};

fn main() -> nlqm::Result<()> {
    let spec = AnalyticSolutionSpec::from_seed(
        random_hermitian(4, 42)?,
        1.0,
        0.3,
        0.7,
        Coupling::new(1.0, 0.5)?,
        7,
    )?;

    for direction in [Direction::Past, Direction::Future] {
        let pair = spec.asymptotic_pair(direction);
        println!("{direction:?} limit (interaction picture):");
        println!(
            "  psi -> {:+.6} * e^(i {:+.6}) on channel {:?}",
            pair.psi.amplitude, pair.psi.phase, pair.psi.channel
        );
        println!(
            "  phi -> {:+.6} * e^(i {:+.6}) on channel {:?}",
            pair.phi.amplitude, pair.phi.phase, pair.phi.channel
        );
    }
    let s = spec.s_matrix();
    println!();
    println!("theta_hat = {:.9}", s.theta_hat());
    println!("S = [[{:.6}, {:.6}],", s.entries()[(0, 0)], s.entries()[(0, 1)]);
    println!("     [{:.6}, {:.6}]]", s.entries()[(1, 0)], s.entries()[(1, 1)]);
    println!("unitarity defect: {:.3e}", s.unitarity_defect());

    // Numeric check: integrate from the center outward (the scattering
    // channels grow in each direction, so this is the well-conditioned
    // route) and project the endpoints.
    let t_edge = 20.0;
    let config = IntegratorConfig::default();
    let (psi_c, phi_c) = spec.state_pair_at(0.0);
    let fwd = integrate(
        &psi_c,
        &phi_c,
        spec.hamiltonian(),
        spec.coupling(),
        TimeSpan::new(0.0, t_edge, 5)?,
        &config,
    )?;
    let (psi_past, phi_past) = spec.asymptotic_vectors(Direction::Past);
    let (psi_expect, phi_expect) = s.apply(&psi_past, &phi_past);
    let last = fwd.times.len() - 1;
    let psi_out = spec.interaction_picture(&fwd.psi_states[last], fwd.times[last])?;
    let phi_out = spec.interaction_picture(&fwd.phi_states[last], fwd.times[last])?;
    let err = |a: &nalgebra::DVector<C64>, b: &nalgebra::DVector<C64>| {
        (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
    };
    println!();
    println!(
        "numeric projections at 2*b*omega0*t = +20 vs S applied to the past pair: {:.3e}",
        err(&psi_out, &psi_expect).max(err(&phi_out, &phi_expect))
    );
    Ok(())
}
