//! Position-space solver for the free-Hamiltonian form of the coupled pair
//! on a periodic grid.
//!
//! In one dimension with H = −(1/2)∂²_x (ħ = m = 1) the equations read
//!
//! ```text
//! i ∂_t ψ(x,t) = −(1/2)∂²_x ψ + g [∫ dx' φ*(x')ψ(x')] φ(x)
//! i ∂_t φ(x,t) = −(1/2)∂²_x φ + g* [∫ dx' ψ*(x')φ(x')] ψ(x)
//! ```
//!
//! The coupling is *nonlocal in x but global in amplitude*: a single complex
//! number γ(t) = ⟨φ|ψ⟩ multiplies the partner field. Strang splitting
//! alternates an exact spectral kinetic step with a two-channel coupling step
//! advanced by RK4 (γ re-evaluated at every stage), optionally sandwiching a
//! sampled external potential:
//!
//! ```text
//! K(dt/2) · V(dt/2) · C(dt) · V(dt/2) · K(dt/2)
//! ```
//!
//! which is second order in dt. The scheme conserves nothing by fiat — norm
//! and ω₀² drifts are measured, not enforced, and serve as discretization
//! diagnostics.

use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hilbert::{BasisTag, Coupling, ReducedState, C64};

/// A periodic plane-wave component: (mode index m, coefficient), with
/// wavenumber k = 2πm/L and free energy k²/2.
pub type PlaneWaveMode = (i64, C64);

// ---------------------------------------------------------------------------
// Grid and wavefunction
// ---------------------------------------------------------------------------

/// A uniform periodic grid on [x_min, x_max) with a power-of-two point count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !x_max.is_finite() || !x_min.is_finite() || x_max <= x_min {
            return Err(Error::ContractViolation(format!(
                "x_max must exceed x_min, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(Error::ContractViolation(format!(
                "n_points must be a power of two >= 8, got {n_points}"
            )));
        }
        Ok(Grid1D {
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    /// Grid points x_k = x_min + k dx (the right endpoint is excluded by
    /// periodicity).
    pub fn points(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n_points).map(|k| self.x_min + k as f64 * dx).collect()
    }

    /// Angular wavenumbers in FFT storage order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = 2.0 * std::f64::consts::PI / self.length();
        (0..n)
            .map(|j| {
                if j < n / 2 {
                    j as f64 * dk
                } else {
                    (j as f64 - n as f64) * dk
                }
            })
            .collect()
    }

    fn basis_tag(&self) -> BasisTag {
        BasisTag::new(&format!(
            "grid[{},{}]x{}",
            self.x_min, self.x_max, self.n_points
        ))
    }
}

/// A complex field sampled on a [`Grid1D`].
#[derive(Clone, Debug)]
pub struct WaveFunction1D {
    grid: Grid1D,
    values: Vec<C64>,
}

impl WaveFunction1D {
    pub fn new(grid: Grid1D, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: grid.n_points(),
            });
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::ContractViolation(
                "wavefunction samples must be finite".into(),
            ));
        }
        Ok(WaveFunction1D { grid, values })
    }

    /// Sample a closure over the grid points.
    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> C64) -> Result<Self> {
        let values = grid.points().iter().map(|&x| f(x)).collect();
        WaveFunction1D::new(grid, values)
    }

    /// A normalized Gaussian packet centered at x0 with width sigma and
    /// carrier wavenumber k0.
    pub fn gaussian(grid: Grid1D, x0: f64, sigma: f64, k0: f64) -> Result<Self> {
        if sigma <= 0.0 {
            return Err(Error::ContractViolation("sigma must be positive".into()));
        }
        let norm = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
        WaveFunction1D::from_fn(grid, |x| {
            let arg = -(x - x0) * (x - x0) / (4.0 * sigma * sigma);
            C64::from_polar(norm * arg.exp(), k0 * x)
        })
    }

    /// A normalized superposition of periodic plane waves
    /// Σ c_m e^{i k_m x} / √L with k_m = 2πm/L.
    ///
    /// On the grid's rectangle quadrature distinct modes are exactly
    /// orthonormal as long as |m| < n_points/2.
    pub fn plane_wave_superposition(grid: Grid1D, modes: &[PlaneWaveMode]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::ContractViolation("need at least one mode".into()));
        }
        let half = (grid.n_points() / 2) as i64;
        if modes.iter().any(|(m, _)| m.abs() >= half) {
            return Err(Error::ContractViolation(format!(
                "mode index out of range for {} grid points",
                grid.n_points()
            )));
        }
        let total: f64 = modes.iter().map(|(_, c)| c.norm_sqr()).sum();
        if total <= 0.0 {
            return Err(Error::DegenerateInput("all mode amplitudes zero".into()));
        }
        let scale = (total * grid.length()).sqrt();
        let dk = 2.0 * std::f64::consts::PI / grid.length();
        WaveFunction1D::from_fn(grid, |x| {
            modes
                .iter()
                .map(|(m, c)| c * C64::from_polar(1.0, *m as f64 * dk * x))
                .sum::<C64>()
                / scale
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// ∫|ψ|² dx by the rectangle rule (exact for band-limited fields).
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// Position expectation ⟨x⟩ weighted by |ψ|², normalized.
    pub fn mean_position(&self) -> f64 {
        let dx = self.grid.dx();
        let w: f64 = self.norm_sqr();
        self.grid
            .points()
            .iter()
            .zip(&self.values)
            .map(|(&x, v)| x * v.norm_sqr())
            .sum::<f64>()
            * dx
            / w
    }

    /// Position variance ⟨x²⟩ − ⟨x⟩².
    pub fn position_variance(&self) -> f64 {
        let dx = self.grid.dx();
        let w = self.norm_sqr();
        let mean = self.mean_position();
        self.grid
            .points()
            .iter()
            .zip(&self.values)
            .map(|(&x, v)| (x - mean) * (x - mean) * v.norm_sqr())
            .sum::<f64>()
            * dx
            / w
    }

    fn check_same_grid(&self, other: &WaveFunction1D) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::BasisMismatch {
                left: self.grid.basis_tag().to_string(),
                right: other.grid.basis_tag().to_string(),
            });
        }
        Ok(())
    }
}

/// ⟨φ|ψ⟩ = ∫ φ*(x) ψ(x) dx by rectangle quadrature (the trapezoid rule on a
/// periodic grid).
pub fn overlap(phi: &WaveFunction1D, psi: &WaveFunction1D) -> Result<C64> {
    phi.check_same_grid(psi)?;
    Ok(phi
        .values
        .iter()
        .zip(&psi.values)
        .map(|(p, s)| p.conj() * s)
        .sum::<C64>()
        * phi.grid.dx())
}

// ---------------------------------------------------------------------------
// Split-step evolution
// ---------------------------------------------------------------------------

/// Scalar observables recorded along a spatial run.
#[derive(Clone, Copy, Debug)]
pub struct SpatialSample {
    pub time: f64,
    pub observables: ReducedState,
}

/// Output of a split-step evolution: per-step scalar observables plus the
/// final fields.
#[derive(Clone, Debug)]
pub struct SpatialTrajectory {
    pub samples: Vec<SpatialSample>,
    pub psi_final: WaveFunction1D,
    pub phi_final: WaveFunction1D,
}

impl SpatialTrajectory {
    /// max |N(t) − N(0)| / N(0).
    pub fn norm_sum_rel_drift(&self) -> f64 {
        let n0 = self.samples[0].observables.norm_sum;
        self.samples
            .iter()
            .map(|s| (s.observables.norm_sum - n0).abs() / n0.abs())
            .fold(0.0, f64::max)
    }

    /// max |τ²/4 + δ − (τ₀²/4 + δ₀)|.
    pub fn omega0_sq_drift(&self) -> f64 {
        let w0 = self.samples[0].observables.omega0_sq();
        self.samples
            .iter()
            .map(|s| (s.observables.omega0_sq() - w0).abs())
            .fold(0.0, f64::max)
    }
}

struct SplitStepWorkspace {
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    kinetic_half: Vec<C64>,
    potential_half: Option<Vec<C64>>,
    dx: f64,
    n_inv: f64,
}

impl SplitStepWorkspace {
    fn new(grid: &Grid1D, dt: f64, potential: Option<&[f64]>) -> Result<Self> {
        let n = grid.n_points();
        if let Some(v) = potential {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    left: v.len(),
                    right: n,
                });
            }
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        // Half-step kinetic phases e^{-i k^2 dt / 4}.
        let kinetic_half = grid
            .wavenumbers()
            .iter()
            .map(|&k| C64::from_polar(1.0, -k * k * dt / 4.0))
            .collect();
        let potential_half = potential.map(|v| {
            v.iter()
                .map(|&vx| C64::from_polar(1.0, -vx * dt / 2.0))
                .collect()
        });
        Ok(SplitStepWorkspace {
            fft,
            ifft,
            kinetic_half,
            potential_half,
            dx: grid.dx(),
            n_inv: 1.0 / n as f64,
        })
    }

    fn kinetic_half_step(&self, field: &mut [C64]) {
        self.fft.process(field);
        for (f, k) in field.iter_mut().zip(&self.kinetic_half) {
            *f *= k;
        }
        self.ifft.process(field);
        for f in field.iter_mut() {
            *f *= self.n_inv;
        }
    }

    fn potential_half_step(&self, field: &mut [C64]) {
        if let Some(ph) = &self.potential_half {
            for (f, p) in field.iter_mut().zip(ph) {
                *f *= p;
            }
        }
    }

    fn quad_overlap(&self, phi: &[C64], psi: &[C64]) -> C64 {
        phi.iter()
            .zip(psi)
            .map(|(p, s)| p.conj() * s)
            .sum::<C64>()
            * self.dx
    }

    // RK4 advance of the pure coupling flow:
    //   dpsi/dt = -i g gamma phi,  dphi/dt = -i g* gamma* psi,
    // gamma re-evaluated at every stage.
    fn coupling_step(&self, g: C64, dt: f64, psi: &mut [C64], phi: &mut [C64]) {
        let n = psi.len();
        let rhs = |p: &[C64], q: &[C64]| -> (Vec<C64>, Vec<C64>) {
            let gamma = self.quad_overlap(q, p);
            let minus_i = C64::new(0.0, -1.0);
            let dp: Vec<C64> = q.iter().map(|x| minus_i * g * gamma * x).collect();
            let dq: Vec<C64> = p
                .iter()
                .map(|x| minus_i * g.conj() * gamma.conj() * x)
                .collect();
            (dp, dq)
        };
        let add = |a: &[C64], b: &[C64], s: f64| -> Vec<C64> {
            a.iter().zip(b).map(|(x, y)| x + y * s).collect()
        };
        let (k1p, k1q) = rhs(psi, phi);
        let (k2p, k2q) = rhs(&add(psi, &k1p, dt / 2.0), &add(phi, &k1q, dt / 2.0));
        let (k3p, k3q) = rhs(&add(psi, &k2p, dt / 2.0), &add(phi, &k2q, dt / 2.0));
        let (k4p, k4q) = rhs(&add(psi, &k3p, dt), &add(phi, &k3q, dt));
        for i in 0..n {
            psi[i] += (k1p[i] + k2p[i] * 2.0 + k3p[i] * 2.0 + k4p[i]) * (dt / 6.0);
            phi[i] += (k1q[i] + k2q[i] * 2.0 + k3q[i] * 2.0 + k4q[i]) * (dt / 6.0);
        }
    }
}

/// Evolve a pair of fields by Strang splitting with step dt over
/// `t_span = (t_start, t_end)`, recording scalar observables at every step.
pub fn evolve_pair_splitstep(
    psi0: &WaveFunction1D,
    phi0: &WaveFunction1D,
    g: Coupling,
    t_span: (f64, f64),
    dt: f64,
) -> Result<SpatialTrajectory> {
    evolve_pair_splitstep_with_potential(psi0, phi0, g, t_span, dt, None)
}

/// [`evolve_pair_splitstep`] with an optional sampled external potential
/// V(x_k), applied as phase half-steps around the coupling step.
pub fn evolve_pair_splitstep_with_potential(
    psi0: &WaveFunction1D,
    phi0: &WaveFunction1D,
    g: Coupling,
    t_span: (f64, f64),
    dt: f64,
    potential: Option<&[f64]>,
) -> Result<SpatialTrajectory> {
    psi0.check_same_grid(phi0)?;
    let (t_start, t_end) = t_span;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::ContractViolation("dt must be positive".into()));
    }
    if !t_end.is_finite() || !t_start.is_finite() || t_end <= t_start {
        return Err(Error::ContractViolation(
            "t_end must exceed t_start".into(),
        ));
    }
    let grid = *psi0.grid();
    let n_steps = ((t_end - t_start) / dt).round().max(1.0) as usize;
    let dt_eff = (t_end - t_start) / n_steps as f64;
    let ws = SplitStepWorkspace::new(&grid, dt_eff, potential)?;
    let gc = g.as_complex();

    let mut psi = psi0.values().to_vec();
    let mut phi = phi0.values().to_vec();

    let record = |t: f64, psi: &[C64], phi: &[C64]| -> SpatialSample {
        let n_psi: f64 = psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.dx();
        let n_phi: f64 = phi.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.dx();
        let gamma = phi
            .iter()
            .zip(psi)
            .map(|(p, s)| p.conj() * s)
            .sum::<C64>()
            * grid.dx();
        SpatialSample {
            time: t,
            observables: ReducedState::from_parts(n_psi + n_phi, n_psi - n_phi, gamma),
        }
    };

    let mut samples = Vec::with_capacity(n_steps + 1);
    samples.push(record(t_start, &psi, &phi));

    for step in 0..n_steps {
        ws.kinetic_half_step(&mut psi);
        ws.kinetic_half_step(&mut phi);
        ws.potential_half_step(&mut psi);
        ws.potential_half_step(&mut phi);
        ws.coupling_step(gc, dt_eff, &mut psi, &mut phi);
        ws.potential_half_step(&mut psi);
        ws.potential_half_step(&mut phi);
        ws.kinetic_half_step(&mut psi);
        ws.kinetic_half_step(&mut phi);

        let t = t_start + (step + 1) as f64 * dt_eff;
        if !psi.iter().chain(phi.iter()).all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::IntegrationFailure {
                last_good_time: t - dt_eff,
                reason: "non-finite field values in split-step evolution".into(),
            });
        }
        samples.push(record(t, &psi, &phi));
    }

    Ok(SpatialTrajectory {
        samples,
        psi_final: WaveFunction1D::new(grid, psi)?,
        phi_final: WaveFunction1D::new(grid, phi)?,
    })
}

/// Build the closed-form pair on a grid at time t, with |A⟩ and |B⟩ given as
/// plane-wave superpositions (mode index m ↦ k = 2πm/L, E = k²/2).
///
/// The coefficient lists must each be normalized (Σ|c|² = 1) and mutually
/// orthogonal in coefficient space; disjoint mode sets satisfy that
/// trivially.
#[allow(clippy::too_many_arguments)]
pub fn analytic_pair_on_grid(
    grid: Grid1D,
    omega0: f64,
    vartheta: f64,
    theta: f64,
    g: Coupling,
    a_modes: &[PlaneWaveMode],
    b_modes: &[PlaneWaveMode],
    t: f64,
) -> Result<(WaveFunction1D, WaveFunction1D)> {
    // Cross-orthogonality of the two superpositions in coefficient space.
    let mut dot = C64::new(0.0, 0.0);
    for (ma, ca) in a_modes {
        for (mb, cb) in b_modes {
            if ma == mb {
                dot += cb.conj() * ca;
            }
        }
    }
    if dot.norm() > 1e-10 {
        return Err(Error::ConstraintViolation {
            constraint: "plane-wave superpositions must be orthogonal".into(),
            residual: dot.norm(),
            tolerance: 1e-10,
        });
    }

    // Free evolution phases for each listed mode at this t.
    let dk = 2.0 * std::f64::consts::PI / grid.length();
    let evolved = |modes: &[PlaneWaveMode]| -> Vec<PlaneWaveMode> {
        modes
            .iter()
            .map(|(m, c)| {
                let k = *m as f64 * dk;
                (*m, c * C64::from_polar(1.0, -k * k / 2.0 * t))
            })
            .collect()
    };
    let a_t = WaveFunction1D::plane_wave_superposition(grid, &evolved(a_modes))?;
    let b_t = WaveFunction1D::plane_wave_superposition(grid, &evolved(b_modes))?;

    // Scalar channel coefficients shared with the abstract construction.
    let h_placeholder = crate::hilbert::HermitianOperator::from_diagonal(&[0.0, 1.0])?;
    let spec = crate::analytic::AnalyticSolutionSpec::new(
        vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        omega0,
        vartheta,
        theta,
        g,
        h_placeholder,
    )?;
    let coeff = spec.pair_coefficients(t);

    let n = grid.n_points();
    let mut psi = vec![C64::new(0.0, 0.0); n];
    let mut phi = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        psi[i] = coeff.psi_a * a_t.values()[i] + coeff.psi_b * b_t.values()[i];
        phi[i] = coeff.phi_a * a_t.values()[i] + coeff.phi_b * b_t.values()[i];
    }
    Ok((
        WaveFunction1D::new(grid, psi)?,
        WaveFunction1D::new(grid, phi)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduced::sech;

    fn z(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn grid() -> Grid1D {
        Grid1D::new(-20.0, 20.0, 256).unwrap()
    }

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(Grid1D::new(0.0, 1.0, 7).is_err());
        assert!(Grid1D::new(0.0, 1.0, 100).is_err());
        assert!(Grid1D::new(1.0, 0.0, 16).is_err());
    }

    #[test]
    fn gaussian_is_normalized() {
        let psi = WaveFunction1D::gaussian(grid(), 0.0, 1.0, 0.0).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-10);
        let o = overlap(&psi, &psi).unwrap();
        assert!((o - z(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn hermite_modes_are_orthogonal() {
        // Mode 0 and mode 1 (x times Gaussian) are orthogonal by parity.
        let g = grid();
        let psi0 = WaveFunction1D::gaussian(g, 0.0, 1.0, 0.0).unwrap();
        let psi1 = WaveFunction1D::from_fn(g, |x| {
            z(x, 0.0) * (-x * x / 4.0).exp()
        })
        .unwrap();
        let o = overlap(&psi0, &psi1).unwrap();
        assert!(o.norm() < 1e-10);
    }

    #[test]
    fn overlap_rejects_mismatched_grids() {
        let a = WaveFunction1D::gaussian(Grid1D::new(-20.0, 20.0, 256).unwrap(), 0.0, 1.0, 0.0)
            .unwrap();
        let b = WaveFunction1D::gaussian(Grid1D::new(-10.0, 10.0, 256).unwrap(), 0.0, 1.0, 0.0)
            .unwrap();
        assert!(matches!(
            overlap(&a, &b),
            Err(crate::error::Error::BasisMismatch { .. })
        ));
    }

    #[test]
    fn overlap_is_grid_converged_for_band_limited_fields() {
        let coarse = Grid1D::new(-20.0, 20.0, 256).unwrap();
        let fine = Grid1D::new(-20.0, 20.0, 512).unwrap();
        let f = |x: f64| C64::from_polar((-x * x / 8.0).exp(), 0.3 * x);
        let h = |x: f64| C64::from_polar((-(x - 1.0) * (x - 1.0) / 6.0).exp(), -0.2 * x);
        let o_coarse = overlap(
            &WaveFunction1D::from_fn(coarse, f).unwrap(),
            &WaveFunction1D::from_fn(coarse, h).unwrap(),
        )
        .unwrap();
        let o_fine = overlap(
            &WaveFunction1D::from_fn(fine, f).unwrap(),
            &WaveFunction1D::from_fn(fine, h).unwrap(),
        )
        .unwrap();
        assert!((o_coarse - o_fine).norm() < 1e-10);
    }

    #[test]
    fn plane_wave_superpositions_are_orthonormal_on_grid() {
        let g = Grid1D::new(0.0, 2.0 * std::f64::consts::PI, 256).unwrap();
        let r = 1.0 / 2.0f64.sqrt();
        let a = WaveFunction1D::plane_wave_superposition(g, &[(1, z(r, 0.0)), (2, z(r, 0.0))])
            .unwrap();
        let b = WaveFunction1D::plane_wave_superposition(g, &[(0, z(r, 0.0)), (3, z(r, 0.0))])
            .unwrap();
        assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((b.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(overlap(&a, &b).unwrap().norm() < 1e-12);
    }

    #[test]
    fn free_gaussian_dispersion_matches_width_law() {
        // g = 0: split-step is exact for the free particle; the packet
        // variance grows as sigma^2(t) = sigma0^2 + t^2/(4 sigma0^2).
        let g = grid();
        let sigma0 = 1.0;
        let psi0 = WaveFunction1D::gaussian(g, -2.0, sigma0, 1.0).unwrap();
        let phi0 = WaveFunction1D::gaussian(g, 2.0, sigma0, -1.0).unwrap();
        let traj = evolve_pair_splitstep(
            &psi0,
            &phi0,
            Coupling::new(0.0, 0.0).unwrap(),
            (0.0, 2.0),
            1e-3,
        )
        .unwrap();
        let t = 2.0;
        let expected = sigma0 * sigma0 + t * t / (4.0 * sigma0 * sigma0);
        let measured = traj.psi_final.position_variance();
        assert!(
            (measured - expected).abs() < 1e-8,
            "variance {measured} vs {expected}"
        );
    }

    #[test]
    fn orthogonal_packets_remain_decoupled() {
        // gamma(0) = 0 for disjoint plane-wave sets: the exceptional channel.
        let g = Grid1D::new(0.0, 2.0 * std::f64::consts::PI, 64).unwrap();
        let psi0 = WaveFunction1D::plane_wave_superposition(g, &[(1, z(1.0, 0.0))]).unwrap();
        let phi0 = WaveFunction1D::plane_wave_superposition(g, &[(2, z(1.0, 0.0))]).unwrap();
        let traj = evolve_pair_splitstep(
            &psi0,
            &phi0,
            Coupling::new(1.0, 0.5).unwrap(),
            (0.0, 2.0),
            1e-3,
        )
        .unwrap();
        for s in &traj.samples {
            assert!(s.observables.gamma.norm() < 1e-8, "t = {}", s.time);
        }
    }

    fn manifold_setup() -> (Grid1D, Vec<PlaneWaveMode>, Vec<PlaneWaveMode>) {
        let g = Grid1D::new(0.0, 2.0 * std::f64::consts::PI, 256).unwrap();
        let r = 1.0 / 2.0f64.sqrt();
        let a_modes = vec![(1i64, z(r, 0.0)), (2, z(r, 0.0))];
        let b_modes = vec![(0i64, z(r, 0.0)), (3, z(r, 0.0))];
        (g, a_modes, b_modes)
    }

    #[test]
    fn split_step_tracks_sech_overlap_law() {
        let (g, a_modes, b_modes) = manifold_setup();
        let coupling = Coupling::new(1.0, 0.5).unwrap();
        let (psi0, phi0) =
            analytic_pair_on_grid(g, 1.0, 0.3, 0.0, coupling, &a_modes, &b_modes, 0.0).unwrap();
        let traj = evolve_pair_splitstep(&psi0, &phi0, coupling, (0.0, 2.0), 1e-3).unwrap();
        let mut worst = 0.0f64;
        for s in &traj.samples {
            let xi = 2.0 * coupling.b * 1.0 * s.time;
            let expected = sech(xi); // omega0 = 1
            worst = worst.max((s.observables.gamma.norm() - expected).abs());
        }
        assert!(worst < 1e-4, "max |gamma| deviation {worst:e}");
        assert!(traj.norm_sum_rel_drift() < 1e-6, "N drift");
        assert!(traj.omega0_sq_drift() < 1e-5, "omega0^2 drift");
    }

    fn halving_ratio(
        psi0: &WaveFunction1D,
        phi0: &WaveFunction1D,
        coupling: Coupling,
        potential: Option<&[f64]>,
        dt: f64,
    ) -> f64 {
        let run = |step: f64| {
            evolve_pair_splitstep_with_potential(
                psi0,
                phi0,
                coupling,
                (0.0, 1.0),
                step,
                potential,
            )
            .unwrap()
        };
        let reference = run(dt / 8.0);
        let err = |traj: &SpatialTrajectory| {
            traj.psi_final
                .values()
                .iter()
                .zip(reference.psi_final.values())
                .chain(
                    traj.phi_final
                        .values()
                        .iter()
                        .zip(reference.phi_final.values()),
                )
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        };
        err(&run(dt)) / err(&run(dt / 2.0))
    }

    #[test]
    fn strang_splitting_is_second_order_with_potential() {
        // A smooth periodic potential makes [T, V] != 0, exposing the
        // generic second-order splitting error.
        let (g, a_modes, b_modes) = manifold_setup();
        let coupling = Coupling::new(1.0, 0.5).unwrap();
        let (psi0, phi0) =
            analytic_pair_on_grid(g, 1.0, 0.3, 0.0, coupling, &a_modes, &b_modes, 0.0).unwrap();
        let v: Vec<f64> = g.points().iter().map(|&x| x.cos()).collect();
        let ratio = halving_ratio(&psi0, &phi0, coupling, Some(&v), 4e-3);
        assert!(
            (3.5..=4.5).contains(&ratio),
            "Strang halving ratio {ratio}"
        );
    }

    #[test]
    fn free_hamiltonian_splitting_is_exact_up_to_the_coupling_substep() {
        // Without a potential the kinetic half-steps multiply both channels
        // of each mode by the same phase, which leaves gamma, tau and N
        // unchanged, so the kinetic and coupling flows commute exactly. The
        // remaining error is the RK4 coupling substep: fourth order, halving
        // ratio ~16 rather than the generic Strang ~4.
        let (g, a_modes, b_modes) = manifold_setup();
        let coupling = Coupling::new(1.0, 0.5).unwrap();
        let (psi0, phi0) =
            analytic_pair_on_grid(g, 1.0, 0.3, 0.0, coupling, &a_modes, &b_modes, 0.0).unwrap();
        let ratio = halving_ratio(&psi0, &phi0, coupling, None, 2e-2);
        assert!(
            (11.0..=22.0).contains(&ratio),
            "free-case halving ratio {ratio}"
        );
    }

    #[test]
    fn potential_half_steps_preserve_second_order_free_limit() {
        // With a harmonic trap and g = 0 the scheme reduces to standard
        // split-step; a ground-state-like Gaussian should stay normalized.
        let g = grid();
        let v: Vec<f64> = g.points().iter().map(|&x| 0.5 * x * x).collect();
        let psi0 = WaveFunction1D::gaussian(g, 0.0, 1.0, 0.0).unwrap();
        let phi0 = WaveFunction1D::gaussian(g, 0.0, 1.0, 0.0).unwrap();
        let traj = evolve_pair_splitstep_with_potential(
            &psi0,
            &phi0,
            Coupling::new(0.0, 0.0).unwrap(),
            (0.0, 1.0),
            1e-3,
            Some(&v),
        )
        .unwrap();
        assert!(traj.norm_sum_rel_drift() < 1e-10);
    }
}
