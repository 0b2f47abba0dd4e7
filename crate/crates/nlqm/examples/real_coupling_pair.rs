//! The real-coupling (b = 0) pair: tau and delta freeze, gamma rotates
//! uniformly, and the construction uses the rescaling constant
//! k = sqrt(delta0)/(omega0 + tau0/2) = (omega0 - tau0/2)/sqrt(delta0).
//!
//! ```bash
//! cargo run --example real_coupling_pair
//! ```

use nlqm::analytic::random_orthonormal_pair;
use nlqm::appendix::{real_g_k_forms, real_g_state_pair, RealGSpec};
use nlqm::hilbert::{random_hermitian, reduced_observables, C64};
use nlqm::integrator::integrate;
use nlqm::ode::{IntegratorConfig, TimeSpan};

fn main() -> nlqm::Result<()> {
    let (tau0, delta0, g) = (0.6, 1.0, 0.8);
    let (k1, k2) = real_g_k_forms(tau0, delta0)?;
    println!("tau0 = {tau0}, delta0 = {delta0}:");
    println!("  k (first form)  = {k1:.15}");
    println!("  k (second form) = {k2:.15}");
    println!("  agreement       = {:.3e}", (k1 - k2).abs());

    let h = random_hermitian(4, 12)?;
    let (a_dir, b_dir) = random_orthonormal_pair(4, 21)?;
    let spec = RealGSpec::from_directions(
        a_dir,
        b_dir,
        0.4, // free A-channel weight
        tau0,
        delta0,
        C64::from_polar(delta0.sqrt(), 0.3),
        g,
        h.clone(),
    )?;
    println!("  period 2 pi / (g omega0) = {:.6}", spec.period());

    // Closed form: constant scalars, rotating gamma.
    println!();
    println!("{:>6}  {:>10} {:>10}  {:>22}", "t", "tau", "delta", "gamma");
    for k in 0..=4 {
        let t = k as f64 * spec.period() / 4.0;
        let (psi, phi) = real_g_state_pair(&spec, t)?;
        let obs = reduced_observables(&psi, &phi)?;
        println!(
            "{t:>6.3}  {:>10.8} {:>10.8}  {:>10.6}{:+.6}i",
            obs.tau, obs.delta, obs.gamma.re, obs.gamma.im
        );
    }

    // Cross-check: the nonlinear integrator holds the pair on this orbit.
    let (psi0, phi0) = real_g_state_pair(&spec, 0.0)?;
    let traj = integrate(
        &psi0,
        &phi0,
        &h,
        spec.coupling(),
        TimeSpan::new(0.0, spec.period(), 33)?,
        &IntegratorConfig::default(),
    )?;
    let mut tau_drift = 0.0f64;
    let mut delta_drift = 0.0f64;
    for obs in &traj.observables {
        tau_drift = tau_drift.max((obs.tau - tau0).abs());
        delta_drift = delta_drift.max((obs.delta - delta0).abs());
    }
    println!();
    println!("nonlinear integration over one period:");
    println!("  tau drift:   {tau_drift:.3e}");
    println!("  delta drift: {delta_drift:.3e}");
    Ok(())
}
