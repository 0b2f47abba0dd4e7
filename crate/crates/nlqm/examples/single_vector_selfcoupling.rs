//! A single self-coupled vector: i d/dt psi = H psi + g <psi|psi> psi.
//!
//! Real g: the norm is constant and the solution is the linear one times a
//! global phase e^{-i g N0 t}. Complex g = a + ib: the norm follows
//! -1/(2b(t - t0)) on the window 2b(t - t0) < 0 and the system either dies
//! at t0 (b > 0) or is born there with infinite norm (b < 0).
//!
//! ```bash
//! cargo run --example single_vector_selfcoupling
//! ```

use nlqm::appendix::{
    integrate_single_vector, single_vector_complex_g_norm, single_vector_real_g, SingleVectorSpec,
};
use nlqm::hilbert::{random_hermitian, random_state, BasisTag, Coupling, C64};
use nlqm::ode::{IntegratorConfig, TimeSpan};

fn main() -> nlqm::Result<()> {
    // --- real coupling: pure phase shift -----------------------------------
    let h = random_hermitian(3, 2)?;
    let coeffs = vec![C64::new(0.8, 0.0), C64::new(0.0, 0.6), C64::new(0.0, 0.0)];
    let spec = SingleVectorSpec::new(coeffs, Coupling::new(0.5, 0.0)?, 0.0, h.clone())?;
    println!("real g = 0.5, N0 = {:.3}:", spec.norm0());
    for &t in &[0.0, 1.0, 2.0] {
        let psi = single_vector_real_g(&spec, t)?;
        println!("  t = {t}: <psi|psi> = {:.12} (constant)", psi.norm_sqr());
    }

    // --- complex coupling: the 1/t norm law --------------------------------
    let g = Coupling::new(0.7, -0.5)?;
    println!();
    println!("complex g with a = {}, b = {}, t0 = 0: norm law -1/(2bt) = 1/t", g.a, g.b);
    let psi0 = random_state(3, 8, BasisTag::canonical())?; // unit norm at t = 1
    let traj = integrate_single_vector(
        &psi0,
        &h,
        g,
        TimeSpan::new(1.0, 3.0, 5)?,
        &IntegratorConfig::default(),
    )?;
    println!("{:>5}  {:>14} {:>14}", "t", "numeric norm", "law");
    for (t, n) in traj.times.iter().zip(traj.norms()) {
        println!(
            "{t:>5.2}  {n:>14.10} {:>14.10}",
            single_vector_complex_g_norm(g.b, 0.0, *t)?
        );
    }

    // --- the existence window ----------------------------------------------
    println!();
    match single_vector_complex_g_norm(0.5, 0.0, 1.0) {
        Err(err) => println!("b = +0.5 at t > t0: {err}"),
        Ok(_) => unreachable!("the window check rejects this point"),
    }
    Ok(())
}
