//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured figure. Tolerances are fixed here, not configurable.
//!
//! Shared configuration: dim-4 seeded random Hamiltonian, g = 1 + 0.5i,
//! ω₀ = 1, ϑ = 0.3, θ = 0.7, seeded orthonormal (A, B) coefficients.

use std::time::Instant;

use nlqm::analytic::{AnalyticSolutionSpec, Direction};
use nlqm::appendix::{
    integrate_single_vector, real_g_k_forms, real_g_state_pair, single_vector_complex_g_norm,
    RealGSpec,
};
use nlqm::hilbert::{
    density_matrix, random_hermitian, random_state, reduced_observables, schwarz_parameter,
    BasisTag, Coupling, StateVector, C64,
};
use nlqm::integrator::{integrate, integrate_linearized, Trajectory};
use nlqm::ode::{IntegratorConfig, Method, TimeSpan};
use nlqm::reduced::{classify_branch, gamma_analytic, sech, BranchKind, BranchSelector};
use nlqm::spatial::{analytic_pair_on_grid, evolve_pair_splitstep, Grid1D};

const DIM: usize = 4;
const H_SEED: u64 = 42;
const AB_SEED: u64 = 7;
const OMEGA0: f64 = 1.0;
const VARTHETA: f64 = 0.3;
const THETA: f64 = 0.7;
const COUPLING_A: f64 = 1.0;
const COUPLING_B: f64 = 0.5;

fn spec() -> AnalyticSolutionSpec {
    AnalyticSolutionSpec::from_seed(
        random_hermitian(DIM, H_SEED).expect("fixture Hamiltonian"),
        OMEGA0,
        VARTHETA,
        THETA,
        Coupling::new(COUPLING_A, COUPLING_B).expect("fixture coupling"),
        AB_SEED,
    )
    .expect("fixture spec")
}

fn tight() -> IntegratorConfig {
    IntegratorConfig {
        abs_tol: 1e-10,
        rel_tol: 1e-10,
        ..IntegratorConfig::default()
    }
}

fn ac1_trajectory() -> Trajectory {
    let spec = spec();
    let span = TimeSpan::new(-2.0, 2.0, 81).expect("span");
    let (psi0, phi0) = spec.state_pair_at(span.start);
    integrate(
        &psi0,
        &phi0,
        spec.hamiltonian(),
        spec.coupling(),
        span,
        &tight(),
    )
    .expect("nonlinear integration")
}

fn l2_diff(a: &StateVector, b: &StateVector) -> f64 {
    (a.amplitudes() - b.amplitudes())
        .iter()
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[test]
fn ac01_analytic_numeric_equivalence() {
    let started = Instant::now();
    let spec = spec();
    let traj = ac1_trajectory();
    let mut worst = 0.0f64;
    for (k, t) in traj.times.iter().enumerate() {
        let (psi_cf, phi_cf) = spec.state_pair_at(*t);
        worst = worst
            .max(l2_diff(&traj.psi_states[k], &psi_cf))
            .max(l2_diff(&traj.phi_states[k], &phi_cf));
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(worst < 1e-6, "max vector deviation {worst:e} >= 1e-6");
    assert!(elapsed < 5.0, "runtime {elapsed:.2}s >= 5s");
    println!("AC-1 analytic/numeric equivalence: PASS (max deviation {worst:.3e}, {elapsed:.2}s)");
}

#[test]
fn ac02_conservation_suite() {
    let traj = ac1_trajectory();
    let d = &traj.drift;
    assert!(d.norm_sum_rel < 1e-8, "relative N drift {:e}", d.norm_sum_rel);
    assert!(d.omega0_sq_abs < 1e-8, "omega0^2 drift {:e}", d.omega0_sq_abs);
    assert!(
        d.delta_consistency < 1e-8,
        "delta vs |gamma|^2 {:e}",
        d.delta_consistency
    );
    assert!(d.schwarz_abs < 1e-8, "Schwarz drift {:e}", d.schwarz_abs);
    assert!(
        d.purity_identity < 1e-10,
        "purity identity residual {:e}",
        d.purity_identity
    );
    println!(
        "AC-2 conservation suite: PASS (N {:.1e}, omega0^2 {:.1e}, delta {:.1e}, S {:.1e}, purity {:.1e})",
        d.norm_sum_rel, d.omega0_sq_abs, d.delta_consistency, d.schwarz_abs, d.purity_identity
    );
}

#[test]
fn ac03_s_matrix_asymptotics() {
    let started = Instant::now();
    let spec = spec();
    // 2 b omega0 t = ±20  =>  t = ±20 for b = 0.5, omega0 = 1.
    let t_edge = 20.0 / (2.0 * COUPLING_B * OMEGA0);
    // The trajectory over [-t_edge, t_edge] is integrated as two legs from
    // t = 0, where every channel coefficient is O(1). A single forward sweep
    // is exponentially ill-conditioned: the future-surviving channels start
    // at e^{-20} and any tolerance-level error injected early is amplified
    // by e^{20}, flooring the achievable accuracy near 1e-6 even at
    // tol = 1e-14.
    let (psi_c, phi_c) = spec.state_pair_at(0.0);
    let back = integrate(
        &psi_c,
        &phi_c,
        spec.hamiltonian(),
        spec.coupling(),
        TimeSpan::new(0.0, -t_edge, 11).expect("span"),
        &tight(),
    )
    .expect("backward leg");
    let fwd = integrate(
        &psi_c,
        &phi_c,
        spec.hamiltonian(),
        spec.coupling(),
        TimeSpan::new(0.0, t_edge, 11).expect("span"),
        &tight(),
    )
    .expect("forward leg");

    // Interaction-picture projections of the numeric end states.
    let ip = |state: &StateVector, t: f64| spec.interaction_picture(state, t).expect("projection");
    let b_last = back.times.len() - 1;
    let psi_in = ip(&back.psi_states[b_last], back.times[b_last]);
    let phi_in = ip(&back.phi_states[b_last], back.times[b_last]);
    let last = fwd.times.len() - 1;
    let psi_out = ip(&fwd.psi_states[last], fwd.times[last]);
    let phi_out = ip(&fwd.phi_states[last], fwd.times[last]);

    let (psi_past, phi_past) = spec.asymptotic_vectors(Direction::Past);
    let max_err = |a: &nalgebra::DVector<C64>, b: &nalgebra::DVector<C64>| {
        (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
    };
    let in_err = max_err(&psi_in, &psi_past).max(max_err(&phi_in, &phi_past));
    assert!(in_err < 1e-6, "past-limit projection error {in_err:e}");

    // The S-matrix (phase theta_hat = theta - (a/b) ln 2) maps the past pair
    // to the future pair.
    let (psi_mapped, phi_mapped) = spec.s_matrix().apply(&psi_past, &phi_past);
    let out_err = max_err(&psi_out, &psi_mapped).max(max_err(&phi_out, &phi_mapped));
    assert!(out_err < 1e-6, "future-limit S-matrix error {out_err:e}");

    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "runtime {elapsed:.2}s >= 10s");
    println!(
        "AC-3 S-matrix asymptotics: PASS (past {in_err:.3e}, future {out_err:.3e}, theta_hat {:.6}, {elapsed:.2}s)",
        spec.s_matrix().theta_hat()
    );
}

#[test]
fn ac04_linearization_consistency() {
    let spec = spec();
    let p = spec.reduced_params();
    let span = TimeSpan::new(-2.0, 2.0, 81).expect("span");
    let (psi0, phi0) = spec.state_pair_at(span.start);
    let full = ac1_trajectory();
    let lin = integrate_linearized(
        &psi0,
        &phi0,
        spec.hamiltonian(),
        spec.coupling(),
        |t| gamma_analytic(&p, t),
        span,
        &tight(),
    )
    .expect("linearized integration");
    let mut worst = 0.0f64;
    for k in 0..full.times.len() {
        worst = worst
            .max(l2_diff(&full.psi_states[k], &lin.psi_states[k]))
            .max(l2_diff(&full.phi_states[k], &lin.phi_states[k]));
    }
    assert!(worst < 1e-6, "linearized vs full deviation {worst:e}");
    println!("AC-4 linearization consistency: PASS (max deviation {worst:.3e})");
}

#[test]
fn ac05_density_matrix_linearity() {
    let spec = spec();
    let h = spec.hamiltonian().matrix().clone();
    let dt = 1e-5;
    let (lam_a, lam_b) = spec.density_eigenvalues();

    let mut commutator_err = 0.0f64;
    let mut eigen_err = 0.0f64;
    for k in 0..20 {
        let t = -2.0 + 4.0 * (k as f64 + 0.5) / 20.0;
        let rho = spec.density_matrix_at(t).expect("rho");
        let rp = spec.density_matrix_at(t + dt).expect("rho+");
        let rm = spec.density_matrix_at(t - dt).expect("rho-");
        let fd = (rp.matrix() - rm.matrix()).map(|c| c / (2.0 * dt));
        let comm = (&h * rho.matrix() - rho.matrix() * &h).map(|c| c * C64::new(0.0, -1.0));
        commutator_err = commutator_err.max(
            (&fd - &comm).iter().map(|c| c.norm()).fold(0.0, f64::max),
        );

        let eigs = rho.eigenvalues();
        // dim 4, rank 2: two zeros then (lam_a, lam_b) ascending.
        eigen_err = eigen_err
            .max(eigs[0].abs())
            .max(eigs[1].abs())
            .max((eigs[2] - lam_a).abs())
            .max((eigs[3] - lam_b).abs());
    }
    assert!(commutator_err < 1e-6, "von Neumann residual {commutator_err:e}");
    assert!(eigen_err < 1e-8, "eigenvalue drift {eigen_err:e}");
    println!(
        "AC-5 density-matrix linearity: PASS (commutator {commutator_err:.3e}, eigenvalues {eigen_err:.3e})"
    );
}

#[test]
fn ac06_appendix_a_norm_law() {
    // The closed form satisfies d<psi|psi>/dt = 2b<psi|psi>^2.
    let b = -0.5;
    let dt = 1e-5;
    let mut ode_res = 0.0f64;
    for &t in &[0.3, 1.0, 1.7, 2.5, 3.0] {
        let f = |tt: f64| single_vector_complex_g_norm(b, 0.0, tt).expect("inside window");
        let fd = (f(t + dt) - f(t - dt)) / (2.0 * dt);
        ode_res = ode_res.max((fd - 2.0 * b * f(t) * f(t)).abs());
    }
    assert!(ode_res < 1e-6, "norm-law ODE residual {ode_res:e}");

    // Numeric single-vector run from t = 1 (unit norm) to t = 3 tracks
    // -1/(2bt) = 1/t.
    let h = random_hermitian(3, 5).expect("fixture");
    let psi0 = random_state(3, 8, BasisTag::canonical()).expect("fixture");
    let traj = integrate_single_vector(
        &psi0,
        &h,
        Coupling::new(0.7, b).expect("coupling"),
        TimeSpan::new(1.0, 3.0, 41).expect("span"),
        &tight(),
    )
    .expect("single-vector integration");
    let mut law_dev = 0.0f64;
    for (t, n) in traj.times.iter().zip(traj.norms()) {
        law_dev = law_dev.max((n - 1.0 / t).abs());
    }
    assert!(law_dev < 1e-6, "norm vs law deviation {law_dev:e}");

    // Outside the window the documented error is raised.
    match single_vector_complex_g_norm(0.5, 0.0, 1.0) {
        Err(nlqm::Error::ExistenceWindow { value, .. }) => {
            assert!(value >= 0.0);
        }
        other => panic!("expected existence-window error, got {other:?}"),
    }
    println!(
        "AC-6 appendix A norm law: PASS (ODE residual {ode_res:.3e}, tracking {law_dev:.3e}, window error raised)"
    );
}

#[test]
fn ac07_appendix_b_real_coupling() {
    let tau0 = 0.6;
    let delta0 = 1.0;
    let g_real = 0.8;
    let h = random_hermitian(DIM, 12).expect("fixture");
    let (a_dir, b_dir) = nlqm::analytic::random_orthonormal_pair(DIM, 21).expect("fixture");
    let spec = RealGSpec::from_directions(
        a_dir,
        b_dir,
        0.4,
        tau0,
        delta0,
        C64::from_polar(delta0.sqrt(), 0.3),
        g_real,
        h.clone(),
    )
    .expect("real-g spec");
    let (psi0, phi0) = real_g_state_pair(&spec, 0.0).expect("pair");
    let period = spec.period();
    let traj = integrate(
        &psi0,
        &phi0,
        &h,
        spec.coupling(),
        TimeSpan::new(0.0, period, 65).expect("span"),
        &tight(),
    )
    .expect("b = 0 integration");
    let mut tau_drift = 0.0f64;
    let mut delta_drift = 0.0f64;
    for obs in &traj.observables {
        tau_drift = tau_drift.max((obs.tau - tau0).abs());
        delta_drift = delta_drift.max((obs.delta - delta0).abs());
    }
    assert!(tau_drift < 1e-8, "tau drift {tau_drift:e} over one period");
    assert!(delta_drift < 1e-8, "delta drift {delta_drift:e} over one period");

    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let mut k_dev = 0.0f64;
    for _ in 0..1000 {
        let t0: f64 = rng.gen_range(-3.0..3.0);
        let d0: f64 = rng.gen_range(1e-3..5.0);
        let (k1, k2) = real_g_k_forms(t0, d0).expect("positive delta0");
        k_dev = k_dev.max((k1 - k2).abs());
    }
    assert!(k_dev < 1e-12, "k-form disagreement {k_dev:e}");
    println!(
        "AC-7 appendix B real coupling: PASS (tau {tau_drift:.3e}, delta {delta_drift:.3e}, k forms {k_dev:.3e})"
    );
}

#[test]
fn ac08_spatial_check() {
    let started = Instant::now();
    let grid = Grid1D::new(0.0, 2.0 * std::f64::consts::PI, 256).expect("grid");
    let g = Coupling::new(COUPLING_A, COUPLING_B).expect("coupling");
    let r = C64::new(1.0 / 2.0f64.sqrt(), 0.0);
    let a_modes = [(1i64, r), (2, r)];
    let b_modes = [(0i64, r), (3, r)];
    let (psi0, phi0) =
        analytic_pair_on_grid(grid, OMEGA0, VARTHETA, 0.0, g, &a_modes, &b_modes, 0.0)
            .expect("manifold init");

    let traj = evolve_pair_splitstep(&psi0, &phi0, g, (0.0, 2.0), 1e-3).expect("split-step");
    let mut gamma_dev = 0.0f64;
    for s in &traj.samples {
        let xi = 2.0 * g.b * OMEGA0 * s.time;
        gamma_dev = gamma_dev.max((s.observables.gamma.norm() - OMEGA0 * sech(xi)).abs());
    }
    assert!(gamma_dev < 1e-4, "|gamma| vs sech deviation {gamma_dev:e}");
    let n_drift = traj.norm_sum_rel_drift();
    assert!(n_drift < 1e-6, "N drift {n_drift:e}");

    // Convergence under dt halving, measured against a dt/8 reference.
    // A smooth periodic potential is switched on for this sub-check: without
    // one the kinetic and coupling flows commute exactly for this model and
    // the scheme converges at fourth order instead (see the spatial module
    // tests), overshooting the ~4x requirement.
    let v: Vec<f64> = grid.points().iter().map(|&x| x.cos()).collect();
    let run = |dt: f64| {
        nlqm::spatial::evolve_pair_splitstep_with_potential(
            &psi0,
            &phi0,
            g,
            (0.0, 1.0),
            dt,
            Some(&v),
        )
        .expect("potential run")
    };
    let dt = 4e-3;
    let reference = run(dt / 8.0);
    let err = |t: &nlqm::spatial::SpatialTrajectory| -> f64 {
        t.psi_final
            .values()
            .iter()
            .zip(reference.psi_final.values())
            .chain(t.phi_final.values().iter().zip(reference.phi_final.values()))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    };
    let e1 = err(&run(dt));
    let e2 = err(&run(dt / 2.0));
    let ratio = e1 / e2;
    assert!(
        (3.5..=4.5).contains(&ratio),
        "halving ratio {ratio} outside [3.5, 4.5] (e1 = {e1:e}, e2 = {e2:e})"
    );

    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "runtime {elapsed:.2}s >= 30s");
    println!(
        "AC-8 spatial check: PASS (|gamma| {gamma_dev:.3e}, N drift {n_drift:.3e}, halving ratio {ratio:.2}, {elapsed:.2}s)"
    );
}

#[test]
fn ac09_branch_rejection() {
    let tan = classify_branch(-1.0, BranchSelector::Tanh);
    assert_eq!(tan.branch_kind, BranchKind::TanImaginaryLambda);
    assert!(!tan.physical);
    assert!(
        tan.reason.contains("unphysical") && tan.reason.contains("finite time"),
        "tan reason: {}",
        tan.reason
    );

    let coth = classify_branch(4.0, BranchSelector::Coth);
    assert_eq!(coth.branch_kind, BranchKind::CothSingular);
    assert!(!coth.physical);
    assert!(
        coth.reason.contains("negative delta") && coth.reason.contains("singular"),
        "coth reason: {}",
        coth.reason
    );

    let tanh = classify_branch(4.0, BranchSelector::Tanh);
    assert_eq!(tanh.branch_kind, BranchKind::TanhPhysical);
    assert!(tanh.physical);
    println!("AC-9 branch rejection: PASS (tan and coth rejected with diagnoses, tanh accepted)");
}

#[test]
fn ac10_rk4_convergence_order() {
    let spec = spec();
    let span = TimeSpan::new(-2.0, 2.0, 21).expect("span");
    let (psi0, phi0) = spec.state_pair_at(span.start);
    let error_at = |h_step: f64| -> f64 {
        let config = IntegratorConfig {
            method: Method::Rk4Fixed,
            initial_step: h_step,
            max_step: 1.0,
            ..IntegratorConfig::default()
        };
        let traj = integrate(
            &psi0,
            &phi0,
            spec.hamiltonian(),
            spec.coupling(),
            span,
            &config,
        )
        .expect("rk4 run");
        let mut worst = 0.0f64;
        for (k, t) in traj.times.iter().enumerate() {
            let (psi_cf, phi_cf) = spec.state_pair_at(*t);
            worst = worst
                .max(l2_diff(&traj.psi_states[k], &psi_cf))
                .max(l2_diff(&traj.phi_states[k], &phi_cf));
        }
        worst
    };
    let e1 = error_at(0.02);
    let e2 = error_at(0.01);
    let ratio = e1 / e2;
    assert!(
        (12.0..=20.0).contains(&ratio),
        "step-halving error ratio {ratio} outside [12, 20] (e1 = {e1:e}, e2 = {e2:e})"
    );
    println!("AC-10 RK4 convergence order: PASS (halving ratio {ratio:.2})");
}

// The printed-variant toggle exists alongside the derived equations; its
// norm non-conservation is covered by the integrator module tests. Here we
// only pin that the derived default stays the crate-wide choice.
#[test]
fn default_rhs_variant_is_derived() {
    assert_eq!(
        nlqm::integrator::RhsVariant::default(),
        nlqm::integrator::RhsVariant::Derived
    );
    let _ = reduced_observables(
        &random_state(2, 1, BasisTag::canonical()).unwrap(),
        &random_state(2, 2, BasisTag::canonical()).unwrap(),
    )
    .unwrap();
    let _ = density_matrix(
        &random_state(2, 1, BasisTag::canonical()).unwrap(),
        &random_state(2, 2, BasisTag::canonical()).unwrap(),
    )
    .unwrap();
    let _ = schwarz_parameter(
        &random_state(2, 1, BasisTag::canonical()).unwrap(),
        &random_state(2, 2, BasisTag::canonical()).unwrap(),
    )
    .unwrap();
}
