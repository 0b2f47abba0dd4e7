//! Built-in verification suites: curated invariant checks per module,
//! runnable as `nlqm verify [--suite ...]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::runner::CheckOutcome;
use crate::analytic::{AnalyticSolutionSpec, Direction};
use crate::appendix::{
    integrate_single_vector, real_g_k_forms, real_g_state_pair, single_vector_complex_g_norm,
    RealGSpec,
};
use crate::error::Result;
use crate::hilbert::{
    density_matrix, purity, random_hermitian, random_state, reduced_observables,
    schwarz_parameter, BasisTag, Coupling, C64,
};
use crate::integrator::{integrate, integrate_linearized, nonlinear_rhs};
use crate::ode::{IntegratorConfig, Method, TimeSpan};
use crate::reduced::{
    classify_branch, gamma_analytic, integrate_reduced, reduced_state_analytic, sech,
    tau_delta_analytic, BranchKind, BranchSelector, ReducedParams,
};
use crate::spatial::{analytic_pair_on_grid, evolve_pair_splitstep_with_potential, Grid1D};

/// Which checks to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Reduced,
    Analytic,
    Integrator,
    Appendix,
    Spatial,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "all" => Ok(Suite::All),
            "reduced" => Ok(Suite::Reduced),
            "analytic" => Ok(Suite::Analytic),
            "integrator" => Ok(Suite::Integrator),
            "appendix" => Ok(Suite::Appendix),
            "spatial" => Ok(Suite::Spatial),
            other => Err(format!(
                "unknown suite `{other}`; expected all|reduced|analytic|integrator|appendix|spatial"
            )),
        }
    }
}

/// Run a suite and return its check outcomes.
pub fn verify_suite(suite: Suite) -> Result<Vec<CheckOutcome>> {
    let mut checks = Vec::new();
    if matches!(suite, Suite::All | Suite::Reduced) {
        reduced_checks(&mut checks)?;
    }
    if matches!(suite, Suite::All | Suite::Analytic) {
        analytic_checks(&mut checks)?;
    }
    if matches!(suite, Suite::All | Suite::Integrator) {
        integrator_checks(&mut checks)?;
    }
    if matches!(suite, Suite::All | Suite::Appendix) {
        appendix_checks(&mut checks)?;
    }
    if matches!(suite, Suite::All | Suite::Spatial) {
        spatial_checks(&mut checks)?;
    }
    Ok(checks)
}

fn standard_params() -> ReducedParams {
    ReducedParams::new(1.0, 0.7, Coupling { a: 1.0, b: 0.5 }).expect("valid fixture")
}

fn standard_spec() -> Result<AnalyticSolutionSpec> {
    AnalyticSolutionSpec::from_seed(
        random_hermitian(4, 42)?,
        1.0,
        0.3,
        0.7,
        Coupling { a: 1.0, b: 0.5 },
        7,
    )
}

fn reduced_checks(checks: &mut Vec<CheckOutcome>) -> Result<()> {
    let p = standard_params();

    let mut identity = 0.0f64;
    let mut gamma_delta = 0.0f64;
    for k in 0..=100 {
        let t = -5.0 + 0.1 * k as f64;
        let (tau, delta) = tau_delta_analytic(&p, t);
        identity = identity.max((tau * tau / 4.0 + delta - 1.0).abs());
        gamma_delta = gamma_delta.max((gamma_analytic(&p, t).norm_sqr() - delta).abs());
    }
    checks.push(CheckOutcome::new("reduced/omega0_identity", identity, 1e-12));
    checks.push(CheckOutcome::new(
        "reduced/gamma_delta_consistency",
        gamma_delta,
        1e-12,
    ));

    let initial = reduced_state_analytic(&p, 2.0, 0.0);
    let config = IntegratorConfig::default();
    let traj = integrate_reduced(&initial, p.g, TimeSpan::new(0.0, 4.0, 41)?, &config)?;
    let mut cf = 0.0f64;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let e = reduced_state_analytic(&p, 2.0, *t);
        cf = cf
            .max((s.tau - e.tau).abs())
            .max((s.delta - e.delta).abs())
            .max((s.gamma - e.gamma).norm());
    }
    checks.push(CheckOutcome::new("reduced/integrates_to_closed_form", cf, 1e-8));

    let fwd = integrate_reduced(&initial, p.g, TimeSpan::new(0.0, 3.0, 2)?, &config)?;
    let back = integrate_reduced(
        fwd.states.last().expect("nonempty"),
        p.g,
        TimeSpan::new(3.0, 0.0, 2)?,
        &config,
    )?;
    let r = back.states.last().expect("nonempty");
    let round_trip = (r.tau - initial.tau)
        .abs()
        .max((r.gamma - initial.gamma).norm());
    checks.push(CheckOutcome::new("reduced/time_round_trip", round_trip, 1e-8));

    let tan = classify_branch(-1.0, BranchSelector::Tanh);
    let coth = classify_branch(4.0, BranchSelector::Coth);
    let tanh = classify_branch(4.0, BranchSelector::Tanh);
    let misclassified = [
        tan.physical || tan.branch_kind != BranchKind::TanImaginaryLambda,
        coth.physical || coth.branch_kind != BranchKind::CothSingular,
        !tanh.physical || tanh.branch_kind != BranchKind::TanhPhysical,
    ]
    .iter()
    .filter(|&&bad| bad)
    .count();
    checks.push(CheckOutcome::new(
        "reduced/branch_classification",
        misclassified as f64,
        0.0,
    ));
    Ok(())
}

fn analytic_checks(checks: &mut Vec<CheckOutcome>) -> Result<()> {
    let spec = standard_spec()?;
    let p = spec.reduced_params();
    let g = spec.coupling();
    let h = spec.hamiltonian().clone();

    let mut n_drift = 0.0f64;
    let mut gamma_match = 0.0f64;
    let mut s_var = 0.0f64;
    let mut purity_id = 0.0f64;
    let mut rho_match = 0.0f64;
    for k in 0..=40 {
        let t = -10.0 + 0.5 * k as f64;
        let (psi, phi) = spec.state_pair_at(t);
        let obs = reduced_observables(&psi, &phi)?;
        n_drift = n_drift.max((obs.norm_sum - spec.norm_sum()).abs());
        gamma_match = gamma_match.max((obs.gamma - gamma_analytic(&p, t)).norm());
        s_var = s_var.max((schwarz_parameter(&psi, &phi)? - spec.schwarz()).abs());
        let rho = density_matrix(&psi, &phi)?;
        purity_id = purity_id.max((purity(&rho) - obs.purity_identity()).abs());
        let direct = spec.density_matrix_at(t)?;
        rho_match = rho_match.max(
            (rho.matrix() - direct.matrix())
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max),
        );
    }
    checks.push(CheckOutcome::new("analytic/norm_sum_constant", n_drift, 1e-10));
    checks.push(CheckOutcome::new("analytic/gamma_closed_form", gamma_match, 1e-10));
    checks.push(CheckOutcome::new("analytic/schwarz_constant", s_var, 1e-10));
    checks.push(CheckOutcome::new("analytic/purity_identity", purity_id, 1e-10));
    checks.push(CheckOutcome::new("analytic/density_matrix_form", rho_match, 1e-10));

    // Residual of the nonlinear equations on the constructed pair, by
    // central differences at 20 deterministic pseudo-random times.
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let dt = 1e-5;
    let mut residual = 0.0f64;
    for _ in 0..20 {
        let t: f64 = rng.gen_range(-3.0..3.0);
        let (psi_m, phi_m) = spec.state_pair_at(t - dt);
        let (psi, phi) = spec.state_pair_at(t);
        let (psi_p, phi_p) = spec.state_pair_at(t + dt);
        let (dpsi, dphi) = nonlinear_rhs(&psi, &phi, &h, g)?;
        let fd_psi = (psi_p.amplitudes() - psi_m.amplitudes()).map(|c| c / (2.0 * dt));
        let fd_phi = (phi_p.amplitudes() - phi_m.amplitudes()).map(|c| c / (2.0 * dt));
        residual = residual
            .max(
                (fd_psi - dpsi.amplitudes())
                    .iter()
                    .map(|c| c.norm())
                    .fold(0.0, f64::max),
            )
            .max(
                (fd_phi - dphi.amplitudes())
                    .iter()
                    .map(|c| c.norm())
                    .fold(0.0, f64::max),
            );
    }
    checks.push(CheckOutcome::new(
        "analytic/nonlinear_equation_residual",
        residual,
        1e-6,
    ));

    // S-matrix unitarity across random parameters, and the past→future map.
    let mut unit_defect = 0.0f64;
    for _ in 0..100 {
        let theta: f64 = rng.gen_range(-6.0..6.0);
        let a: f64 = rng.gen_range(-3.0..3.0);
        let mut b: f64 = rng.gen_range(-2.0..2.0);
        if b.abs() < 1e-3 {
            b = 0.7;
        }
        let s = AnalyticSolutionSpec::from_seed(
            h.clone(),
            1.0,
            0.3,
            theta,
            Coupling { a, b },
            7,
        )?
        .s_matrix();
        unit_defect = unit_defect.max(s.unitarity_defect());
    }
    checks.push(CheckOutcome::new("analytic/s_matrix_unitary", unit_defect, 1e-12));

    let (psi_m, phi_m) = spec.asymptotic_vectors(Direction::Past);
    let (psi_p, phi_p) = spec.asymptotic_vectors(Direction::Future);
    let (psi_s, phi_s) = spec.s_matrix().apply(&psi_m, &phi_m);
    let map_err = (psi_s - psi_p)
        .iter()
        .chain((phi_s - phi_p).iter())
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    checks.push(CheckOutcome::new("analytic/s_matrix_maps_past_to_future", map_err, 1e-12));
    Ok(())
}

fn integrator_checks(checks: &mut Vec<CheckOutcome>) -> Result<()> {
    let spec = standard_spec()?;
    let span = TimeSpan::new(-2.0, 2.0, 41)?;
    let config = IntegratorConfig::default();
    let (psi0, phi0) = spec.state_pair_at(span.start);
    let traj = integrate(&psi0, &phi0, spec.hamiltonian(), spec.coupling(), span, &config)?;

    let mut dev = 0.0f64;
    for (k, t) in traj.times.iter().enumerate() {
        let (pe, fe) = spec.state_pair_at(*t);
        dev = dev.max(
            (traj.psi_states[k].amplitudes() - pe.amplitudes())
                .iter()
                .chain((traj.phi_states[k].amplitudes() - fe.amplitudes()).iter())
                .map(|c| c.norm())
                .fold(0.0, f64::max),
        );
    }
    checks.push(CheckOutcome::new("integrator/matches_analytic", dev, 1e-6));
    checks.push(CheckOutcome::new(
        "integrator/norm_sum_rel_drift",
        traj.drift.norm_sum_rel,
        1e-8,
    ));
    checks.push(CheckOutcome::new(
        "integrator/omega0_sq_drift",
        traj.drift.omega0_sq_abs,
        1e-8,
    ));
    checks.push(CheckOutcome::new(
        "integrator/schwarz_drift",
        traj.drift.schwarz_abs,
        1e-8,
    ));
    checks.push(CheckOutcome::new(
        "integrator/purity_identity",
        traj.drift.purity_identity,
        1e-10,
    ));

    let p = spec.reduced_params();
    let lin = integrate_linearized(
        &psi0,
        &phi0,
        spec.hamiltonian(),
        spec.coupling(),
        |t| gamma_analytic(&p, t),
        span,
        &config,
    )?;
    let mut lin_dev = 0.0f64;
    for k in 0..traj.len() {
        lin_dev = lin_dev.max(
            (traj.psi_states[k].amplitudes() - lin.psi_states[k].amplitudes())
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max),
        );
    }
    checks.push(CheckOutcome::new(
        "integrator/linearized_consistency",
        lin_dev,
        1e-6,
    ));

    // Fourth-order convergence of the fixed-step method: error ratio under
    // step halving should sit in [12, 20], i.e. |ratio - 16| <= 4.
    let rk4_error = |h_step: f64| -> Result<f64> {
        let cfg = IntegratorConfig {
            method: Method::Rk4Fixed,
            initial_step: h_step,
            max_step: 1.0,
            ..IntegratorConfig::default()
        };
        let t = integrate(&psi0, &phi0, spec.hamiltonian(), spec.coupling(), span, &cfg)?;
        let mut worst = 0.0f64;
        for (k, tt) in t.times.iter().enumerate() {
            let (pe, _) = spec.state_pair_at(*tt);
            worst = worst.max(
                (t.psi_states[k].amplitudes() - pe.amplitudes())
                    .iter()
                    .map(|c| c.norm())
                    .fold(0.0, f64::max),
            );
        }
        Ok(worst)
    };
    let ratio = rk4_error(0.02)? / rk4_error(0.01)?;
    checks.push(CheckOutcome::new(
        "integrator/rk4_halving_ratio_near_16",
        (ratio - 16.0).abs(),
        4.0,
    ));
    Ok(())
}

fn appendix_checks(checks: &mut Vec<CheckOutcome>) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut k_dev = 0.0f64;
    for _ in 0..1000 {
        let tau0: f64 = rng.gen_range(-3.0..3.0);
        let delta0: f64 = rng.gen_range(1e-3..5.0);
        let (k1, k2) = real_g_k_forms(tau0, delta0)?;
        k_dev = k_dev.max((k1 - k2).abs());
    }
    checks.push(CheckOutcome::new("appendix/k_forms_agree", k_dev, 1e-12));

    let b = -0.5;
    let dt = 1e-5;
    let mut ode_res = 0.0f64;
    for &t in &[0.5, 1.0, 2.0, 2.9] {
        let f = |tt: f64| single_vector_complex_g_norm(b, 0.0, tt);
        let (fp, fm, f0) = (f(t + dt)?, f(t - dt)?, f(t)?);
        ode_res = ode_res.max(((fp - fm) / (2.0 * dt) - 2.0 * b * f0 * f0).abs());
    }
    checks.push(CheckOutcome::new("appendix/norm_law_ode", ode_res, 1e-6));

    let law_err = (single_vector_complex_g_norm(-0.5, 0.0, 1.0)? - 1.0)
        .abs()
        .max((single_vector_complex_g_norm(-0.5, 0.0, 2.0)? - 0.5).abs());
    checks.push(CheckOutcome::new("appendix/norm_law_values", law_err, 1e-14));

    let window_errors = match single_vector_complex_g_norm(0.5, 0.0, 1.0) {
        Err(crate::error::Error::ExistenceWindow { .. }) => 0.0,
        _ => 1.0,
    };
    checks.push(CheckOutcome::new(
        "appendix/existence_window_rejected",
        window_errors,
        0.0,
    ));

    // Numeric single-vector run against the 1/t law.
    let h = random_hermitian(3, 5)?;
    let psi0 = random_state(3, 8, BasisTag::canonical())?;
    let traj = integrate_single_vector(
        &psi0,
        &h,
        Coupling { a: 0.7, b: -0.5 },
        TimeSpan::new(1.0, 3.0, 21)?,
        &IntegratorConfig::default(),
    )?;
    let mut law_dev = 0.0f64;
    for (t, n) in traj.times.iter().zip(traj.norms()) {
        law_dev = law_dev.max((n - 1.0 / t).abs());
    }
    checks.push(CheckOutcome::new("appendix/norm_tracks_law", law_dev, 1e-6));

    // Real-coupling pair: constant scalars under nonlinear integration over
    // one interaction-picture period.
    let h = random_hermitian(4, 12)?;
    let (a_dir, b_dir) = crate::analytic::random_orthonormal_pair(4, 21)?;
    let spec = RealGSpec::from_directions(
        a_dir,
        b_dir,
        0.4,
        0.6,
        1.0,
        C64::from_polar(1.0, 0.3),
        0.8,
        h.clone(),
    )?;
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
        tau_drift = tau_drift.max((obs.tau - 0.6).abs());
        delta_drift = delta_drift.max((obs.delta - 1.0).abs());
    }
    checks.push(CheckOutcome::new("appendix/real_g_tau_drift", tau_drift, 1e-8));
    checks.push(CheckOutcome::new(
        "appendix/real_g_delta_drift",
        delta_drift,
        1e-8,
    ));
    Ok(())
}

fn spatial_checks(checks: &mut Vec<CheckOutcome>) -> Result<()> {
    let grid = Grid1D::new(0.0, 2.0 * std::f64::consts::PI, 256)?;
    let g = Coupling { a: 1.0, b: 0.5 };
    let (a_modes, b_modes) = super::runner::default_spatial_modes();
    let (psi0, phi0) = analytic_pair_on_grid(grid, 1.0, 0.3, 0.0, g, &a_modes, &b_modes, 0.0)?;
    let traj = evolve_pair_splitstep_with_potential(&psi0, &phi0, g, (0.0, 2.0), 1e-3, None)?;
    let mut gamma_dev = 0.0f64;
    for s in &traj.samples {
        let xi = 2.0 * g.b * s.time;
        gamma_dev = gamma_dev.max((s.observables.gamma.norm() - sech(xi)).abs());
    }
    checks.push(CheckOutcome::new(
        "spatial/norm_sum_rel_drift",
        traj.norm_sum_rel_drift(),
        1e-6,
    ));
    checks.push(CheckOutcome::new("spatial/gamma_abs_vs_sech", gamma_dev, 1e-4));
    checks.push(CheckOutcome::new(
        "spatial/omega0_sq_drift",
        traj.omega0_sq_drift(),
        1e-5,
    ));

    // Second-order convergence, exposed by a smooth periodic potential
    // (without one, the kinetic and coupling flows commute and the scheme is
    // fourth order — see the module tests).
    let v: Vec<f64> = grid.points().iter().map(|&x| x.cos()).collect();
    let run = |dt: f64| {
        evolve_pair_splitstep_with_potential(&psi0, &phi0, g, (0.0, 1.0), dt, Some(&v))
    };
    let reference = run(5e-4)?;
    let err = |t: &crate::spatial::SpatialTrajectory| -> f64 {
        t.psi_final
            .values()
            .iter()
            .zip(reference.psi_final.values())
            .chain(t.phi_final.values().iter().zip(reference.phi_final.values()))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    };
    let e1 = err(&run(4e-3)?);
    let e2 = err(&run(2e-3)?);
    let ratio = e1 / e2;
    checks.push(CheckOutcome::new(
        "spatial/strang_halving_ratio_near_4",
        (ratio - 4.0).abs(),
        0.5,
    ));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes() {
        for suite in [
            Suite::Reduced,
            Suite::Analytic,
            Suite::Appendix,
        ] {
            let checks = verify_suite(suite).unwrap();
            assert!(!checks.is_empty());
            for c in &checks {
                assert!(c.pass, "{}: {} > {}", c.name, c.value, c.tolerance);
            }
        }
    }

    #[test]
    fn suite_parsing() {
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert_eq!("spatial".parse::<Suite>().unwrap(), Suite::Spatial);
        assert!("bogus".parse::<Suite>().is_err());
    }
}
