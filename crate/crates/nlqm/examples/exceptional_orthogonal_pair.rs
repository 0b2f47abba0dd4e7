//! The exceptional solutions: two orthogonal linear evolutions solve the
//! nonlinear system exactly, because the coupling carries a factor
//! gamma = <phi|psi> = 0 that stays zero.
//!
//! ```bash
//! cargo run --example exceptional_orthogonal_pair
//! ```

use nlqm::analytic::exceptional_solution;
use nlqm::hilbert::{inner_product, random_hermitian, BasisTag, Coupling, StateVector};
use nlqm::integrator::integrate;
use nlqm::ode::{IntegratorConfig, TimeSpan};

fn main() -> nlqm::Result<()> {
    let h = random_hermitian(3, 17)?;

    // Any orthogonal pair works; orthogonalize two seeded vectors.
    let a = nlqm::hilbert::random_state(3, 30, BasisTag::canonical())?;
    let raw = nlqm::hilbert::random_state(3, 31, BasisTag::canonical())?;
    let proj = inner_product(&a, &raw)?;
    let b = StateVector::canonical(
        raw.amplitudes()
            .iter()
            .zip(a.amplitudes().iter())
            .map(|(r, av)| r - av * proj)
            .collect(),
    )?
    .normalized()?;

    println!("<B|A> = {:.3e}", inner_product(&b, &a)?.norm());

    // Drive the full nonlinear integrator from (A, B) with a strong
    // coupling; the overlap must remain zero and the states linear.
    let g = Coupling::new(1.0, 0.5)?;
    let span = TimeSpan::new(0.0, 4.0, 9)?;
    let traj = integrate(&a, &b, &h, g, span, &IntegratorConfig::default())?;

    println!();
    println!("{:>5}  {:>12}  {:>12}", "t", "|gamma(t)|", "vs linear");
    for (k, t) in traj.times.iter().enumerate() {
        let (psi_lin, phi_lin) = exceptional_solution(&a, &b, &h, *t)?;
        let dev = (traj.psi_states[k].amplitudes() - psi_lin.amplitudes())
            .iter()
            .chain((traj.phi_states[k].amplitudes() - phi_lin.amplitudes()).iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        println!(
            "{t:>5.1}  {:>12.3e}  {:>12.3e}",
            traj.observables[k].gamma.norm(),
            dev
        );
    }
    println!();
    println!("The nonlinear coupling never turns on: gamma = 0 is a fixed line.");
    Ok(())
}
