//! Mode execution, output writing, comparison, and parameter sweeps.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{InitialKind, Mode, RunConfig};
use super::output::{self, Row};
use crate::analytic::{random_orthonormal_pair, AnalyticSolutionSpec};
use crate::appendix::{
    integrate_single_vector, real_g_k_forms, real_g_state_pair, single_vector_complex_g_norm,
    single_vector_real_g, RealGSpec, SingleVectorSpec,
};
use crate::error::{Error, Result};
use crate::hilbert::{
    density_matrix, evolve_linear, purity, random_state, BasisTag, StateVector, C64,
};
use crate::integrator::{integrate_linearized, integrate_with_variant, Trajectory};
use crate::reduced::{
    gamma_analytic, integrate_reduced, reduced_state_analytic, sech, tau_delta_analytic,
};
use crate::spatial::{
    analytic_pair_on_grid, evolve_pair_splitstep_with_potential, Grid1D, PlaneWaveMode,
};

/// One named check with its measured value, tolerance, and verdict
/// (pass ⇔ value ≤ tolerance).
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckOutcome {
    pub fn new(name: &str, value: f64, tolerance: f64) -> Self {
        CheckOutcome {
            name: name.to_string(),
            value,
            tolerance,
            pass: value.is_finite() && value <= tolerance,
        }
    }
}

/// Everything a mode run produces besides its checks.
pub enum ModeOutput {
    /// Time-indexed rows; state columns present when the mode evolves an
    /// abstract pair.
    Rows(Vec<Row>),
    /// Single-vector trajectory (appendix_a).
    Single {
        times: Vec<f64>,
        states: Vec<Vec<C64>>,
        law: Option<Vec<f64>>,
    },
    /// Spatial run: scalar rows per step plus the final fields.
    Spatial {
        rows: Vec<Row>,
        xs: Vec<f64>,
        psi: Vec<C64>,
        phi: Vec<C64>,
    },
    /// Check-only modes (verify).
    None,
}

impl ModeOutput {
    fn rows(&self) -> Option<&[Row]> {
        match self {
            ModeOutput::Rows(rows) => Some(rows),
            ModeOutput::Spatial { rows, .. } => Some(rows),
            _ => None,
        }
    }
}

/// Result of a run: the mode, its checks, and the overall verdict.
pub struct RunReport {
    pub mode: &'static str,
    pub checks: Vec<CheckOutcome>,
    pub output: ModeOutput,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Render the human-readable summary table.
    pub fn summary(&self) -> String {
        let mut s = format!("mode: {}\n", self.mode);
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(8)
            .max(8);
        for c in &self.checks {
            s.push_str(&format!(
                "  {:<width$}  {:>12.3e}  (tol {:>9.1e})  {}\n",
                c.name,
                c.value,
                c.tolerance,
                if c.pass { "pass" } else { "FAIL" },
            ));
        }
        s.push_str(if self.all_pass() {
            "result: all checks passed\n"
        } else {
            "result: CHECK FAILURE\n"
        });
        s
    }
}

#[derive(Serialize)]
struct DriftReportFile<'a> {
    mode: &'static str,
    all_pass: bool,
    checks: &'a [CheckOutcome],
}

// ---------------------------------------------------------------------------
// Row builders
// ---------------------------------------------------------------------------

fn rows_from_trajectory(traj: &Trajectory) -> Result<Vec<Row>> {
    let mut rows = Vec::with_capacity(traj.len());
    for k in 0..traj.len() {
        let psi = &traj.psi_states[k];
        let phi = &traj.phi_states[k];
        let obs = traj.observables[k];
        let p = if obs.norm_sum > 0.0 {
            purity(&density_matrix(psi, phi)?)
        } else {
            f64::NAN
        };
        rows.push(Row {
            t: traj.times[k],
            psi: Some(psi.amplitudes().iter().cloned().collect()),
            phi: Some(phi.amplitudes().iter().cloned().collect()),
            observables: obs,
            purity: p,
        });
    }
    Ok(rows)
}

fn pair_rows(
    times: &[f64],
    pairs: &[(StateVector, StateVector)],
) -> Result<Vec<Row>> {
    let mut rows = Vec::with_capacity(times.len());
    for (t, (psi, phi)) in times.iter().zip(pairs) {
        let obs = crate::hilbert::reduced_observables(psi, phi)?;
        let p = purity(&density_matrix(psi, phi)?);
        rows.push(Row {
            t: *t,
            psi: Some(psi.amplitudes().iter().cloned().collect()),
            phi: Some(phi.amplitudes().iter().cloned().collect()),
            observables: obs,
            purity: p,
        });
    }
    Ok(rows)
}

fn build_spec(config: &RunConfig) -> Result<AnalyticSolutionSpec> {
    let h = config.hamiltonian.build(&config.base_dir)?;
    let g = config.coupling.build()?;
    AnalyticSolutionSpec::from_seed(
        h,
        config.solution.omega0,
        config.solution.vartheta,
        config.solution.theta,
        g,
        config.solution.ab_seed,
    )
}

// ---------------------------------------------------------------------------
// Mode implementations
// ---------------------------------------------------------------------------

fn execute_analytic(config: &RunConfig) -> Result<(ModeOutput, Vec<CheckOutcome>)> {
    let spec = build_spec(config)?;
    let span = config.time.span()?;
    let times = span.sample_times();
    let pairs: Vec<_> = times.iter().map(|&t| spec.state_pair_at(t)).collect();
    let rows = pair_rows(&times, &pairs)?;

    let p = spec.reduced_params();
    let mut n_drift = 0.0f64;
    let mut cf_mismatch = 0.0f64;
    let mut s_var = 0.0f64;
    let mut purity_id = 0.0f64;
    for row in &rows {
        let obs = &row.observables;
        n_drift = n_drift.max((obs.norm_sum - spec.norm_sum()).abs());
        let (tau, delta) = tau_delta_analytic(&p, row.t);
        cf_mismatch = cf_mismatch
            .max((obs.tau - tau).abs())
            .max((obs.delta - delta).abs())
            .max((obs.gamma - gamma_analytic(&p, row.t)).norm());
        s_var = s_var.max((obs.schwarz() - spec.schwarz()).abs());
        purity_id = purity_id.max((row.purity - obs.purity_identity()).abs());
    }
    let checks = vec![
        CheckOutcome::new("norm_sum_drift", n_drift, 1e-10),
        CheckOutcome::new("closed_form_match", cf_mismatch, 1e-10),
        CheckOutcome::new("schwarz_variation", s_var, 1e-10),
        CheckOutcome::new("purity_identity", purity_id, 1e-10),
    ];
    Ok((ModeOutput::Rows(rows), checks))
}

fn initial_pair(
    config: &RunConfig,
    spec: &AnalyticSolutionSpec,
    t_start: f64,
) -> Result<(StateVector, StateVector)> {
    match config.initial.kind {
        InitialKind::Analytic => Ok(spec.state_pair_at(t_start)),
        InitialKind::Exceptional => {
            let h = spec.hamiltonian();
            let (a, b) = random_orthonormal_pair(h.dim(), config.solution.ab_seed)?;
            let to_state = |coeffs: Vec<C64>| {
                StateVector::from_dvector(
                    h.from_eigenbasis(&nalgebra::DVector::from_vec(coeffs)),
                    BasisTag::canonical(),
                )
            };
            Ok((to_state(a), to_state(b)))
        }
    }
}

fn execute_nonlinear(config: &RunConfig) -> Result<(ModeOutput, Vec<CheckOutcome>)> {
    let spec = build_spec(config)?;
    let span = config.time.span()?;
    let (psi0, phi0) = initial_pair(config, &spec, span.start)?;
    let traj = integrate_with_variant(
        &psi0,
        &phi0,
        spec.hamiltonian(),
        spec.coupling(),
        span,
        &config.integrator.build(),
        config.integrator.rhs_variant,
    )?;
    let rows = rows_from_trajectory(&traj)?;

    let mut checks = vec![
        CheckOutcome::new("norm_sum_rel_drift", traj.drift.norm_sum_rel, 1e-8),
        CheckOutcome::new("omega0_sq_drift", traj.drift.omega0_sq_abs, 1e-8),
        CheckOutcome::new("delta_consistency", traj.drift.delta_consistency, 1e-8),
        CheckOutcome::new("schwarz_drift", traj.drift.schwarz_abs, 1e-8),
        CheckOutcome::new("purity_identity", traj.drift.purity_identity, 1e-10),
    ];
    match config.initial.kind {
        InitialKind::Analytic => {
            let mut dev = 0.0f64;
            for (k, t) in traj.times.iter().enumerate() {
                let (psi_cf, phi_cf) = spec.state_pair_at(*t);
                dev = dev
                    .max(max_diff(&traj.psi_states[k], &psi_cf))
                    .max(max_diff(&traj.phi_states[k], &phi_cf));
            }
            checks.push(CheckOutcome::new("analytic_match", dev, 1e-6));
        }
        InitialKind::Exceptional => {
            let g_max = traj
                .observables
                .iter()
                .map(|o| o.gamma.norm())
                .fold(0.0, f64::max);
            checks.push(CheckOutcome::new("gamma_stays_zero", g_max, 1e-8));
        }
    }
    Ok((ModeOutput::Rows(rows), checks))
}

fn execute_linearized(config: &RunConfig) -> Result<(ModeOutput, Vec<CheckOutcome>)> {
    let spec = build_spec(config)?;
    let span = config.time.span()?;
    let (psi0, phi0) = initial_pair(config, &spec, span.start)?;
    let p = spec.reduced_params();
    let traj = integrate_linearized(
        &psi0,
        &phi0,
        spec.hamiltonian(),
        spec.coupling(),
        |t| gamma_analytic(&p, t),
        span,
        &config.integrator.build(),
    )?;
    let rows = rows_from_trajectory(&traj)?;
    let mut self_consistency = 0.0f64;
    for (t, obs) in traj.times.iter().zip(&traj.observables) {
        self_consistency = self_consistency.max((obs.gamma - gamma_analytic(&p, *t)).norm());
    }
    let checks = vec![
        CheckOutcome::new("norm_sum_rel_drift", traj.drift.norm_sum_rel, 1e-8),
        CheckOutcome::new("gamma_self_consistency", self_consistency, 1e-6),
        CheckOutcome::new("purity_identity", traj.drift.purity_identity, 1e-10),
    ];
    Ok((ModeOutput::Rows(rows), checks))
}

fn execute_reduced(config: &RunConfig) -> Result<(ModeOutput, Vec<CheckOutcome>)> {
    let g = config.coupling.build()?;
    let p = crate::reduced::ReducedParams::new(
        config.solution.omega0,
        config.solution.theta,
        g,
    )?;
    let span = config.time.span()?;
    let norm_sum = 2.0 * config.solution.omega0 * (2.0 * config.solution.vartheta).cosh();
    let initial = reduced_state_analytic(&p, norm_sum, span.start);
    let traj = integrate_reduced(&initial, g, span, &config.integrator.build())?;
    let rows: Vec<Row> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, s)| Row::scalar_only(*t, *s))
        .collect();
    let mut cf_mismatch = 0.0f64;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let expect = reduced_state_analytic(&p, norm_sum, *t);
        cf_mismatch = cf_mismatch
            .max((s.tau - expect.tau).abs())
            .max((s.delta - expect.delta).abs())
            .max((s.gamma - expect.gamma).norm());
    }
    let checks = vec![
        CheckOutcome::new("omega0_sq_drift", traj.omega0_sq_drift(), 1e-8),
        CheckOutcome::new("closed_form_match", cf_mismatch, 1e-8),
        CheckOutcome::new("norm_sum_drift", traj.norm_sum_drift(), 1e-12),
    ];
    Ok((ModeOutput::Rows(rows), checks))
}

/// Default plane-wave channels for spatial runs: |A⟩ on modes (1, 2) and
/// |B⟩ on modes (0, 3), equal weights.
pub fn default_spatial_modes() -> (Vec<PlaneWaveMode>, Vec<PlaneWaveMode>) {
    let r = C64::new(1.0 / 2.0f64.sqrt(), 0.0);
    (vec![(1, r), (2, r)], vec![(0, r), (3, r)])
}

fn execute_spatial(config: &RunConfig) -> Result<(ModeOutput, Vec<CheckOutcome>)> {
    let sc = &config.spatial;
    let grid = Grid1D::new(sc.x_min, sc.x_max, sc.n_points)?;
    let g = config.coupling.build()?;
    let (a_modes, b_modes) = default_spatial_modes();
    let t_start = config.time.t_start;
    let t_end = config.time.t_end;
    let (psi0, phi0) = analytic_pair_on_grid(
        grid,
        config.solution.omega0,
        config.solution.vartheta,
        config.solution.theta,
        g,
        &a_modes,
        &b_modes,
        t_start,
    )?;
    let potential: Option<Vec<f64>> = (sc.potential_cos_amp != 0.0).then(|| {
        let l = grid.length();
        grid.points()
            .iter()
            .map(|&x| sc.potential_cos_amp * (2.0 * std::f64::consts::PI * (x - sc.x_min) / l).cos())
            .collect()
    });
    let traj = evolve_pair_splitstep_with_potential(
        &psi0,
        &phi0,
        g,
        (t_start, t_end),
        sc.dt,
        potential.as_deref(),
    )?;
    let rows: Vec<Row> = traj
        .samples
        .iter()
        .map(|s| Row::scalar_only(s.time, s.observables))
        .collect();

    let mut checks = vec![CheckOutcome::new(
        "norm_sum_rel_drift",
        traj.norm_sum_rel_drift(),
        1e-6,
    )];
    if potential.is_none() {
        let w = config.solution.omega0;
        let mut gamma_dev = 0.0f64;
        for s in &traj.samples {
            let xi = 2.0 * g.b * w * s.time;
            gamma_dev = gamma_dev.max((s.observables.gamma.norm() - w * sech(xi)).abs());
        }
        checks.push(CheckOutcome::new("gamma_abs_vs_sech", gamma_dev, 1e-4));
        checks.push(CheckOutcome::new(
            "omega0_sq_drift",
            traj.omega0_sq_drift(),
            1e-5,
        ));
    }
    Ok((
        ModeOutput::Spatial {
            rows,
            xs: grid.points(),
            psi: traj.psi_final.values().to_vec(),
            phi: traj.phi_final.values().to_vec(),
        },
        checks,
    ))
}

fn execute_appendix_a(config: &RunConfig) -> Result<(ModeOutput, Vec<CheckOutcome>)> {
    let h = config.hamiltonian.build(&config.base_dir)?;
    let g = config.coupling.build()?;
    let span = config.time.span()?;
    let times = span.sample_times();
    let t0 = config.appendix.t0;

    if g.b == 0.0 {
        // Constant-norm case: closed form against linear evolution.
        let c0 = random_state(h.dim(), config.appendix.c_seed, BasisTag::canonical())?;
        let coeffs: Vec<C64> = h.to_eigenbasis(c0.amplitudes()).iter().cloned().collect();
        let spec = SingleVectorSpec::new(coeffs, g, t0, h.clone())?;
        let n0 = spec.norm0();
        let mut states = Vec::with_capacity(times.len());
        let mut norm_dev = 0.0f64;
        let mut phase_dev = 0.0f64;
        for &t in &times {
            let psi = single_vector_real_g(&spec, t)?;
            norm_dev = norm_dev.max((psi.norm_sqr() - n0).abs());
            let lin = evolve_linear(&h, &c0, t)?;
            let phase = C64::from_polar(1.0, -g.a * n0 * t);
            let dev = psi
                .amplitudes()
                .iter()
                .zip(lin.amplitudes().iter())
                .map(|(a, b)| (a - b * phase).norm())
                .fold(0.0, f64::max);
            phase_dev = phase_dev.max(dev);
            states.push(psi.amplitudes().iter().cloned().collect());
        }
        let checks = vec![
            CheckOutcome::new("norm_constant", norm_dev, 1e-12),
            CheckOutcome::new("global_phase_vs_linear", phase_dev, 1e-10),
        ];
        return Ok((
            ModeOutput::Single {
                times,
                states,
                law: None,
            },
            checks,
        ));
    }

    // Complex coupling: numeric integration against the norm law.
    // The initial norm is set from the law at t_start, so the whole span must
    // sit inside the existence window.
    let n_start = single_vector_complex_g_norm(g.b, t0, span.start)?;
    let _ = single_vector_complex_g_norm(g.b, t0, span.end)?;
    let unit = random_state(h.dim(), config.appendix.c_seed, BasisTag::canonical())?;
    let psi0 = unit.scaled(C64::new(n_start.sqrt(), 0.0));
    let traj = integrate_single_vector(&psi0, &h, g, span, &config.integrator.build())?;
    let law: Vec<f64> = traj
        .times
        .iter()
        .map(|&t| single_vector_complex_g_norm(g.b, t0, t))
        .collect::<Result<_>>()?;
    let mut law_dev = 0.0f64;
    for (n, l) in traj.norms().iter().zip(&law) {
        law_dev = law_dev.max((n - l).abs());
    }
    // The law satisfies its own ODE d<psi|psi>/dt = 2b<psi|psi>^2.
    let dt = 1e-5;
    let mut ode_res = 0.0f64;
    for &t in traj.times.iter().skip(1).take(traj.times.len().saturating_sub(2)) {
        let f = |tt: f64| single_vector_complex_g_norm(g.b, t0, tt);
        let (fp, fm, f0) = (f(t + dt)?, f(t - dt)?, f(t)?);
        ode_res = ode_res.max(((fp - fm) / (2.0 * dt) - 2.0 * g.b * f0 * f0).abs());
    }
    let states: Vec<Vec<C64>> = traj
        .states
        .iter()
        .map(|s| s.amplitudes().iter().cloned().collect())
        .collect();
    let checks = vec![
        CheckOutcome::new("norm_tracks_law", law_dev, 1e-6),
        CheckOutcome::new("law_satisfies_ode", ode_res, 1e-6),
    ];
    Ok((
        ModeOutput::Single {
            times: traj.times,
            states,
            law: Some(law),
        },
        checks,
    ))
}

fn execute_appendix_b(config: &RunConfig) -> Result<(ModeOutput, Vec<CheckOutcome>)> {
    if config.coupling.b != 0.0 {
        return Err(Error::ContractViolation(
            "appendix_b requires real coupling: set coupling.b = 0".into(),
        ));
    }
    let h = config.hamiltonian.build(&config.base_dir)?;
    let ap = &config.appendix;
    let (a_dir, b_dir) = random_orthonormal_pair(h.dim(), config.solution.ab_seed)?;
    let gamma0 = C64::from_polar(ap.delta0.sqrt(), ap.gamma0_phase);
    let spec = RealGSpec::from_directions(
        a_dir,
        b_dir,
        ap.alpha,
        ap.tau0,
        ap.delta0,
        gamma0,
        config.coupling.a,
        h.clone(),
    )?;
    let span = config.time.span()?;
    let (psi0, phi0) = real_g_state_pair(&spec, span.start)?;
    let traj = integrate_with_variant(
        &psi0,
        &phi0,
        &h,
        spec.coupling(),
        span,
        &config.integrator.build(),
        config.integrator.rhs_variant,
    )?;
    let rows = rows_from_trajectory(&traj)?;
    let mut tau_drift = 0.0f64;
    let mut delta_drift = 0.0f64;
    let mut gamma_dev = 0.0f64;
    for (t, obs) in traj.times.iter().zip(&traj.observables) {
        tau_drift = tau_drift.max((obs.tau - ap.tau0).abs());
        delta_drift = delta_drift.max((obs.delta - ap.delta0).abs());
        gamma_dev = gamma_dev.max((obs.gamma - spec.gamma_at(*t)).norm());
    }
    let (k1, k2) = real_g_k_forms(ap.tau0, ap.delta0)?;
    let checks = vec![
        CheckOutcome::new("tau_drift", tau_drift, 1e-8),
        CheckOutcome::new("delta_drift", delta_drift, 1e-8),
        CheckOutcome::new("gamma_rotation_match", gamma_dev, 1e-6),
        CheckOutcome::new("k_forms_agree", (k1 - k2).abs(), 1e-12),
    ];
    Ok((ModeOutput::Rows(rows), checks))
}

fn max_diff(a: &StateVector, b: &StateVector) -> f64 {
    (a.amplitudes() - b.amplitudes())
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

/// Execute a config without touching the filesystem.
pub fn execute(config: &RunConfig) -> Result<(ModeOutput, Vec<CheckOutcome>)> {
    match config.mode {
        Mode::Analytic => execute_analytic(config),
        Mode::Nonlinear => execute_nonlinear(config),
        Mode::Linearized => execute_linearized(config),
        Mode::Reduced => execute_reduced(config),
        Mode::Spatial => execute_spatial(config),
        Mode::AppendixA => execute_appendix_a(config),
        Mode::AppendixB => execute_appendix_b(config),
        Mode::Verify => {
            let checks = super::verify::verify_suite(super::verify::Suite::All)?;
            Ok((ModeOutput::None, checks))
        }
    }
}

/// Execute a config and write its artifacts (CSV, JSON report, SVG) to the
/// configured output directory.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    let (output, checks) = execute(config)?;
    let report = RunReport {
        mode: config.mode.as_str(),
        checks,
        output,
    };
    write_artifacts(config, &report)?;
    Ok(report)
}

fn write_artifacts(config: &RunConfig, report: &RunReport) -> Result<()> {
    let dir = config.base_dir.join(&config.output.directory);
    std::fs::create_dir_all(&dir)
        .map_err(|e| Error::ContractViolation(format!("cannot create {}: {e}", dir.display())))?;

    if config.output.wants("csv") {
        match &report.output {
            ModeOutput::Rows(rows) if !rows.is_empty() => {
                if rows[0].psi.is_some() {
                    output::write_text(&dir.join("trajectory.csv"), &output::trajectory_csv(rows)?)?;
                }
                output::write_text(&dir.join("observables.csv"), &output::observables_csv(rows))?;
            }
            ModeOutput::Spatial { rows, xs, psi, phi } => {
                output::write_text(&dir.join("observables.csv"), &output::observables_csv(rows))?;
                output::write_text(
                    &dir.join("fields.csv"),
                    &output::spatial_fields_csv(xs, psi, phi),
                )?;
            }
            ModeOutput::Single { times, states, law } => {
                output::write_text(
                    &dir.join("single_trajectory.csv"),
                    &output::single_vector_csv(times, states, law.as_deref())?,
                )?;
            }
            _ => {}
        }
    }
    if config.output.wants("json") {
        let file = DriftReportFile {
            mode: report.mode,
            all_pass: report.all_pass(),
            checks: &report.checks,
        };
        let text = serde_json::to_string_pretty(&file)
            .map_err(|e| Error::ContractViolation(format!("drift report: {e}")))?;
        output::write_text(&dir.join("drift_report.json"), &text)?;
    }
    if config.output.wants("svg") {
        if let Some(rows) = report.output.rows() {
            if !rows.is_empty() {
                output::write_plots(&dir, rows)?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

/// Column-wise comparison of two runs at aligned sample times.
pub struct CompareReport {
    pub deviations: Vec<(String, f64)>,
    pub requested: f64,
}

const COMPARE_COLUMNS: &[&str] = &[
    "N",
    "tau",
    "Re_gamma",
    "Im_gamma",
    "delta",
    "omega0_sq",
    "schwarz",
    "purity",
    "psi",
    "phi",
];

fn column_value(row: &Row, column: &str) -> Option<f64> {
    let o = &row.observables;
    match column {
        "N" => Some(o.norm_sum),
        "tau" => Some(o.tau),
        "Re_gamma" => Some(o.gamma.re),
        "Im_gamma" => Some(o.gamma.im),
        "delta" => Some(o.delta),
        "omega0_sq" => Some(o.omega0_sq()),
        "schwarz" => Some(o.schwarz()),
        "purity" => Some(row.purity),
        _ => None,
    }
}

/// Run both configs and report the max absolute deviation per column; the
/// `field` argument selects the headline value returned.
pub fn compare_runs(a: &RunConfig, b: &RunConfig, field: &str) -> Result<CompareReport> {
    if !COMPARE_COLUMNS.contains(&field) {
        return Err(Error::ContractViolation(format!(
            "unknown compare field `{field}`; expected one of {COMPARE_COLUMNS:?}"
        )));
    }
    let (out_a, _) = execute(a)?;
    let (out_b, _) = execute(b)?;
    let rows_a = out_a
        .rows()
        .ok_or_else(|| Error::ContractViolation("mode produces no comparable rows".into()))?;
    let rows_b = out_b
        .rows()
        .ok_or_else(|| Error::ContractViolation("mode produces no comparable rows".into()))?;
    if rows_a.len() != rows_b.len() {
        return Err(Error::ContractViolation(format!(
            "sample counts differ: {} vs {}",
            rows_a.len(),
            rows_b.len()
        )));
    }
    for (ra, rb) in rows_a.iter().zip(rows_b) {
        if (ra.t - rb.t).abs() > 1e-12 * ra.t.abs().max(1.0) {
            return Err(Error::ContractViolation(format!(
                "misaligned sample times: {} vs {}",
                ra.t, rb.t
            )));
        }
    }

    let mut deviations = Vec::new();
    for column in COMPARE_COLUMNS {
        let dev = match *column {
            "psi" | "phi" => {
                let pick = |r: &Row| {
                    if *column == "psi" {
                        r.psi.clone()
                    } else {
                        r.phi.clone()
                    }
                };
                let mut worst: Option<f64> = None;
                for (ra, rb) in rows_a.iter().zip(rows_b) {
                    if let (Some(va), Some(vb)) = (pick(ra), pick(rb)) {
                        if va.len() == vb.len() {
                            let d = va
                                .iter()
                                .zip(&vb)
                                .map(|(x, y)| (x - y).norm())
                                .fold(0.0, f64::max);
                            worst = Some(worst.unwrap_or(0.0).max(d));
                        }
                    }
                }
                worst
            }
            name => {
                let mut worst: Option<f64> = None;
                for (ra, rb) in rows_a.iter().zip(rows_b) {
                    if let (Some(x), Some(y)) = (column_value(ra, name), column_value(rb, name)) {
                        worst = Some(worst.unwrap_or(0.0).max((x - y).abs()));
                    }
                }
                worst
            }
        };
        if let Some(d) = dev {
            deviations.push((column.to_string(), d));
        }
    }
    let requested = deviations
        .iter()
        .find(|(name, _)| name == field)
        .map(|(_, d)| *d)
        .ok_or_else(|| {
            Error::ContractViolation(format!(
                "field `{field}` is not available for these modes"
            ))
        })?;
    Ok(CompareReport {
        deviations,
        requested,
    })
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

/// One dimension of a sweep grid: a dotted config path and its values.
#[derive(Clone, Debug)]
pub struct GridAxis {
    pub path: String,
    pub values: Vec<String>,
}

/// Parse a grid spec: comma-separated axes, each `path=start:stop:count`
/// (inclusive linear range) or `path=v1|v2|v3` (explicit list).
pub fn parse_grid(spec: &str) -> Result<Vec<GridAxis>> {
    let mut axes = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (path, rhs) = part.split_once('=').ok_or_else(|| {
            Error::ContractViolation(format!("grid axis `{part}` must look like path=values"))
        })?;
        let values: Vec<String> = if rhs.contains('|') {
            rhs.split('|').map(|v| v.trim().to_string()).collect()
        } else if rhs.contains(':') {
            let fields: Vec<&str> = rhs.split(':').collect();
            if fields.len() != 3 {
                return Err(Error::ContractViolation(format!(
                    "grid range `{rhs}` must be start:stop:count"
                )));
            }
            let start: f64 = fields[0].trim().parse().map_err(|_| {
                Error::ContractViolation(format!("bad grid range start `{}`", fields[0]))
            })?;
            let stop: f64 = fields[1].trim().parse().map_err(|_| {
                Error::ContractViolation(format!("bad grid range stop `{}`", fields[1]))
            })?;
            let count: usize = fields[2].trim().parse().map_err(|_| {
                Error::ContractViolation(format!("bad grid range count `{}`", fields[2]))
            })?;
            if count < 1 {
                return Err(Error::ContractViolation("grid count must be >= 1".into()));
            }
            (0..count)
                .map(|k| {
                    let v = if count == 1 {
                        start
                    } else {
                        start + (stop - start) * k as f64 / (count - 1) as f64
                    };
                    format!("{v}")
                })
                .collect()
        } else {
            vec![rhs.trim().to_string()]
        };
        if values.is_empty() {
            return Err(Error::ContractViolation(format!(
                "grid axis `{path}` has no values"
            )));
        }
        axes.push(GridAxis {
            path: path.trim().to_string(),
            values,
        });
    }
    if axes.is_empty() {
        return Err(Error::ContractViolation("empty grid spec".into()));
    }
    Ok(axes)
}

/// Summary of one sweep cell.
pub struct SweepCell {
    pub label: String,
    pub directory: PathBuf,
    pub outcome: Result<bool>,
}

/// Run the cartesian product of the grid axes across a worker pool
/// (`NLQM_THREADS` caps the pool size). Each cell writes into its own
/// subdirectory of the base output directory.
pub fn sweep(base: &RunConfig, grid_spec: &str) -> Result<Vec<SweepCell>> {
    let axes = parse_grid(grid_spec)?;
    let mut combos: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for axis in &axes {
        let mut next = Vec::with_capacity(combos.len() * axis.values.len());
        for combo in &combos {
            for value in &axis.values {
                let mut c = combo.clone();
                c.push((axis.path.clone(), value.clone()));
                next.push(c);
            }
        }
        combos = next;
    }

    let n_threads = std::env::var("NLQM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0);
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = n_threads {
            builder = builder.num_threads(n);
        }
        builder
            .build()
            .map_err(|e| Error::ContractViolation(format!("worker pool: {e}")))?
    };

    use rayon::prelude::*;
    let cells: Vec<SweepCell> = pool.install(|| {
        combos
            .par_iter()
            .enumerate()
            .map(|(index, combo)| {
                let label = combo
                    .iter()
                    .map(|(p, v)| format!("{p}={v}"))
                    .collect::<Vec<_>>()
                    .join(",");
                let slug: String = label
                    .chars()
                    .map(|c| if c.is_alphanumeric() { c } else { '_' })
                    .collect();
                let subdir = format!("sweep_{index:04}_{slug}");
                let outcome = (|| -> Result<bool> {
                    let mut config = base.clone();
                    for (path, value) in combo {
                        config = config.with_override(&format!("{path}={value}"))?;
                    }
                    let dir = Path::new(&base.output.directory).join(&subdir);
                    config.output.directory = dir.to_string_lossy().into_owned();
                    let report = run(&config)?;
                    Ok(report.all_pass())
                })();
                SweepCell {
                    label,
                    directory: base
                        .base_dir
                        .join(&base.output.directory)
                        .join(&subdir),
                    outcome,
                }
            })
            .collect()
    });
    Ok(cells)
}
