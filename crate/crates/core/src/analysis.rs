// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

//! Semi-analytic slab oracle and convergence-order estimation.
//!
//! The oracle expands the isotropic slab solution as a Neumann series
//!
//! ```text
//! phi = sum_p phi_p,   phi_0 = <b_mu> + <A_mu q>,   phi_{p+1} = <A_mu (sigma_s phi_p)>,
//! ```
//!
//! where `A_mu` inverts `mu d/dx + sigma_t` with zero inflow, `b_mu` is the
//! attenuated boundary data and `<.>` is the normalized average over the
//! truncated velocity space `[-1, -delta) U (delta, 1]`. Each term is
//! bounded by `lambda` times the previous one.

use alloc::vec;
use alloc::vec::Vec;

use crate::ensemble::{l2_error, run_ensemble_with, EnsembleConfig, GridProblem, SampleExecutor};
use crate::problem::{SlabGrid, SlabProblem};
use crate::quadrature::{
    gauss_slab, gauss_xy, legendre_positive_roots, partition_velocity, uniform_slab, uniform_xy, Geometry,
    Quadrature,
};
use crate::slab::{exp_moments, SolverOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NeumannConfig {
    /// Velocity truncation `delta`.
    pub delta: f64,
    /// Fine x panels for the attenuation integrals.
    pub panels: usize,
    /// Gauss-Legendre order per `mu` panel.
    pub mu_order: usize,
    /// Extra `mu` panel boundaries in `(delta, 1)` (by magnitude), e.g.
    /// kinks of the inflow data.
    pub mu_breaks: Vec<f64>,
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for NeumannConfig {
    fn default() -> Self {
        Self {
            delta: 1e-3,
            panels: 4096,
            mu_order: 64,
            mu_breaks: Vec::new(),
            tol: 1e-12,
            max_terms: 200,
        }
    }
}

impl NeumannConfig {
    fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::invalid("delta", "truncation must lie in [0, 1)"));
        }
        if self.panels == 0 || self.mu_order == 0 || self.max_terms == 0 {
            return Err(Error::invalid("panels", "panel counts, order and term cap must be positive"));
        }
        if self.mu_order % 2 != 0 {
            return Err(Error::invalid("mu_order", "Gauss order must be even"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol", "tolerance must be positive"));
        }
        Ok(())
    }
}

/// Oracle output on the fine grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NeumannSolution {
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
    /// Max norm of every series term.
    pub term_norms: Vec<f64>,
    /// Geometric bound on the neglected tail.
    pub tail_bound: f64,
    pub lambda: f64,
}

impl NeumannSolution {
    /// Linear interpolation of `phi`.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.x.len() - 1;
        let (a, b) = (self.x[0], self.x[n]);
        let f = ((x - a) / (b - a) * n as f64).clamp(0.0, n as f64);
        let k = (f as usize).min(n - 1);
        let t = f - k as f64;
        (1.0 - t) * self.phi[k] + t * self.phi[k + 1]
    }

    /// `phi` at the nodes of `grid`.
    pub fn on_grid(&self, grid: &SlabGrid) -> Vec<f64> {
        grid.nodes().into_iter().map(|x| self.eval(x)).collect()
    }
}

/// Per-direction transport coefficients on the fine grid:
/// `psi_{k+1} = e_k psi_k + a_k f_k + b_k f_{k+1}` in the direction of travel.
struct Direction {
    mu: f64,
    weight: f64,
    decay: Vec<f64>,
    near: Vec<f64>,
    far: Vec<f64>,
}

/// Gauss-Legendre nodes and weights on `[lo, hi]` (even `order`).
fn gauss_panel(order: usize, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>> {
    let roots = legendre_positive_roots(order)?;
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut out = Vec::with_capacity(order);
    for r in &roots {
        let w = r.weight() * half;
        out.push((mid + half * r.x, w));
        out.push((mid - half * r.x, w));
    }
    Ok(out)
}

/// Neumann-series scalar flux for an isotropic slab problem.
pub fn neumann_phi_slab<P: SlabProblem + ?Sized>(problem: &P, config: &NeumannConfig) -> Result<NeumannSolution> {
    config.validate()?;
    if !problem.kernel().is_isotropic() {
        return Err(Error::InvalidProblem("the Neumann oracle needs isotropic scattering".into()));
    }
    let (x_left, x_right) = problem.domain();
    let panels = config.panels;
    let fine = SlabGrid::new(x_left, x_right, panels)?;
    let lambda = crate::problem::slab_scattering_ratio(problem, &fine)?;
    if lambda >= 1.0 {
        return Err(Error::InvalidProblem(alloc::format!("scattering ratio {lambda} must be below one")));
    }
    let dx = fine.dx();
    let x = fine.nodes();
    let sigma_s: Vec<f64> = x.iter().map(|&x| problem.sigma_s(x)).collect();
    // Optical depth per panel by Simpson's rule.
    let depth: Vec<f64> = (0..panels)
        .map(|k| {
            let (a, b) = (x[k], x[k + 1]);
            dx / 6.0 * (problem.sigma_t(a) + 4.0 * problem.sigma_t(0.5 * (a + b)) + problem.sigma_t(b))
        })
        .collect();

    // Velocity quadrature over the positive half of S^delta.
    let mut edges = vec![config.delta];
    let mut breaks: Vec<f64> = config
        .mu_breaks
        .iter()
        .copied()
        .filter(|&b| b > config.delta && b < 1.0)
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    edges.extend(breaks);
    edges.push(1.0);
    let norm = 2.0 * (1.0 - config.delta);
    let mut directions = Vec::new();
    for pair in edges.windows(2) {
        for (mu, w) in gauss_panel(config.mu_order, pair[0], pair[1])? {
            for sign in [1.0, -1.0] {
                let mut decay = Vec::with_capacity(panels);
                let mut near = Vec::with_capacity(panels);
                let mut far = Vec::with_capacity(panels);
                for &tau in &depth {
                    let t = tau / mu;
                    let (one, two) = exp_moments(t);
                    let inv_sigma = dx / tau;
                    decay.push(libm::exp(-t));
                    // Upstream value weighted by `two`, downstream by the rest.
                    near.push(inv_sigma * two);
                    far.push(inv_sigma * (one - two));
                }
                directions.push(Direction {
                    mu: sign * mu,
                    weight: w / norm,
                    decay,
                    near,
                    far,
                });
            }
        }
    }

    let nodes = panels + 1;
    let mut psi = vec![0.0; nodes];
    let mut emission = vec![0.0; nodes];
    // <A_mu f> plus optionally the boundary term, averaged over directions.
    let mut sweep = |source: &dyn Fn(usize, f64) -> f64, with_inflow: bool, out: &mut [f64]| {
        out.iter_mut().for_each(|v| *v = 0.0);
        for d in &directions {
            for (k, e) in emission.iter_mut().enumerate() {
                *e = source(k, d.mu);
            }
            let start = if with_inflow { problem.inflow(d.mu) } else { 0.0 };
            if d.mu > 0.0 {
                psi[0] = start;
                for k in 0..panels {
                    psi[k + 1] = d.decay[k] * psi[k] + d.near[k] * emission[k] + d.far[k] * emission[k + 1];
                }
            } else {
                psi[panels] = start;
                for k in (0..panels).rev() {
                    psi[k] = d.decay[k] * psi[k + 1] + d.near[k] * emission[k + 1] + d.far[k] * emission[k];
                }
            }
            for (o, &p) in out.iter_mut().zip(psi.iter()) {
                *o += d.weight * p;
            }
        }
    };

    let mut term = vec![0.0; nodes];
    sweep(&|k, mu| problem.source(x[k], mu), true, &mut term);
    let mut phi = term.clone();
    let max_norm = |v: &[f64]| v.iter().fold(0.0f64, |m, &a| m.max(libm::fabs(a)));
    let mut term_norms = vec![max_norm(&term)];
    let mut next = vec![0.0; nodes];
    let tail = |norm: f64| lambda / (1.0 - lambda) * norm;
    while tail(*term_norms.last().unwrap()) >= config.tol {
        if term_norms.len() >= config.max_terms {
            return Err(Error::SeriesNonConvergence {
                terms: term_norms.len(),
                tail_bound: tail(*term_norms.last().unwrap()),
            });
        }
        let prev = &term;
        sweep(&|k, _| sigma_s[k] * prev[k], false, &mut next);
        core::mem::swap(&mut term, &mut next);
        for (p, &t) in phi.iter_mut().zip(&term) {
            *p += t;
        }
        term_norms.push(max_norm(&term));
    }
    let tail_bound = tail(*term_norms.last().unwrap());
    Ok(NeumannSolution {
        x,
        phi,
        term_norms,
        tail_bound,
        lambda,
    })
}

/// Log-log fit of `value` against `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    pub points: Vec<(f64, f64)>,
    /// Least-squares slope.
    pub slope: f64,
    /// Slope between the coarsest and the finest point.
    pub endpoint_slope: f64,
    /// RMS residual of the fit in log coordinates.
    pub residual: f64,
}

pub fn fit_order(points: &[(f64, f64)]) -> Result<OrderFit> {
    if points.len() < 2 {
        return Err(Error::invalid("points", "need at least two points"));
    }
    if points.iter().any(|&(h, v)| !(h > 0.0) || !(v > 0.0)) {
        return Err(Error::invalid("points", "h and values must be positive"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(h, v)| (libm::log(h), libm::log(v))).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("points", "need at least two distinct h"));
    }
    let slope = sxy / sxx;
    let residual = libm::sqrt(
        logs.iter()
            .map(|p| {
                let r = p.1 - (my + slope * (p.0 - mx));
                r * r
            })
            .sum::<f64>()
            / n,
    );
    let coarse = logs.iter().copied().max_by(|a, b| a.0.total_cmp(&b.0)).unwrap();
    let finest = logs.iter().copied().min_by(|a, b| a.0.total_cmp(&b.0)).unwrap();
    let endpoint_slope = if coarse.0 == finest.0 {
        slope
    } else {
        (coarse.1 - finest.1) / (coarse.0 - finest.0)
    };
    Ok(OrderFit {
        points: points.to_vec(),
        slope,
        endpoint_slope,
        residual,
    })
}

/// How the velocity variable is discretized at one resolution.
///
/// Resolutions are `M` (ordinates per half) for slab DOM, `N` for X-Y DOM
/// and ROM, and the cell count `n` for slab ROM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    DomUniform,
    DomGauss,
    Rom { samples: usize, seed: u64 },
}

impl Method {
    /// Deterministic quadrature for a DOM method.
    pub fn quadrature(&self, geometry: Geometry, resolution: usize) -> Result<Quadrature> {
        match (self, geometry) {
            (Method::DomUniform, Geometry::Slab) => uniform_slab(resolution).map(Quadrature::Slab),
            (Method::DomGauss, Geometry::Slab) => gauss_slab(resolution).map(Quadrature::Slab),
            (Method::DomUniform, Geometry::Xy) => uniform_xy(resolution).map(Quadrature::Xy),
            (Method::DomGauss, Geometry::Xy) => gauss_xy(resolution).map(Quadrature::Xy),
            (Method::Rom { .. }, _) => Err(Error::invalid("method", "random ordinates have no fixed quadrature")),
        }
    }

    /// Ordinate count at a resolution.
    pub fn ordinates(&self, geometry: Geometry, resolution: usize) -> usize {
        match (self, geometry) {
            (Method::DomGauss, Geometry::Xy) => 2 * resolution * (resolution + 1),
            (Method::Rom { .. }, Geometry::Slab) => resolution,
            (_, Geometry::Slab) => 2 * resolution,
            (_, Geometry::Xy) => 4 * resolution * resolution,
        }
    }

    /// Angular mesh size used for order fits: the ordinate spacing `1 / M`
    /// or cell width `2 / n` in slab geometry, and the solid angle per
    /// first-quadrant ordinate in X-Y geometry.
    pub fn mesh_size(&self, geometry: Geometry, resolution: usize) -> f64 {
        let r = resolution as f64;
        match geometry {
            Geometry::Slab => match self {
                Method::Rom { .. } => 2.0 / r,
                _ => 1.0 / r,
            },
            Geometry::Xy => core::f64::consts::PI / self.ordinates(geometry, resolution) as f64,
        }
    }
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub resolution: usize,
    pub h: f64,
    pub error: f64,
    pub bias: Option<f64>,
    pub mean_variance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<StudyRow>,
    pub error_fit: OrderFit,
    pub bias_fit: Option<OrderFit>,
}

/// A reference solution with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub method: Method,
    pub resolution: usize,
    pub phi: Vec<f64>,
}

impl Reference {
    /// Solves `problem` with a DOM quadrature.
    pub fn compute(problem: &GridProblem<'_>, method: Method, resolution: usize, options: &SolverOptions) -> Result<Self> {
        let q = method.quadrature(problem.geometry(), resolution)?;
        let (phi, _) = problem.solve(&q, options)?;
        Ok(Self {
            method,
            resolution,
            phi,
        })
    }

    pub fn ordinates(&self, geometry: Geometry) -> usize {
        self.method.ordinates(geometry, self.resolution)
    }
}

/// Runs `method` at every resolution and fits the error (and, for random
/// ordinates, the bias) against the mesh size.
pub fn convergence_study(
    problem: &GridProblem<'_>,
    method: Method,
    resolutions: &[usize],
    reference: &Reference,
    options: &SolverOptions,
    executor: &dyn SampleExecutor,
) -> Result<ConvergenceTable> {
    if resolutions.len() < 2 {
        return Err(Error::invalid("resolutions", "need at least two resolutions"));
    }
    if resolutions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("resolutions", "resolutions must be strictly increasing"));
    }
    let geometry = problem.geometry();
    let finest = method.ordinates(geometry, *resolutions.last().unwrap());
    if reference.ordinates(geometry) <= finest {
        return Err(Error::invalid("reference", "reference must be finer than every resolution"));
    }
    let mut rows = Vec::with_capacity(resolutions.len());
    for &r in resolutions {
        let h = method.mesh_size(geometry, r);
        let row = match method {
            Method::Rom { samples, seed } => {
                let partition = partition_velocity(geometry, r, 0.0)?;
                let mut config = EnsembleConfig::new(samples, seed);
                config.options = *options;
                let (_, m) = run_ensemble_with(problem, &partition, &config, &reference.phi, executor)?;
                StudyRow {
                    resolution: r,
                    h,
                    error: m.error,
                    bias: Some(m.bias),
                    mean_variance: Some(m.mean_variance),
                }
            }
            _ => {
                let (phi, _) = problem.solve(&method.quadrature(geometry, r)?, options)?;
                StudyRow {
                    resolution: r,
                    h,
                    error: l2_error(&phi, &reference.phi)?,
                    bias: None,
                    mean_variance: None,
                }
            }
        };
        rows.push(row);
    }
    let error_fit = fit_order(&rows.iter().map(|r| (r.h, r.error)).collect::<Vec<_>>())?;
    let bias_fit = match method {
        Method::Rom { .. } => Some(fit_order(
            &rows.iter().map(|r| (r.h, r.bias.unwrap_or(0.0))).collect::<Vec<_>>(),
        )?),
        _ => None,
    };
    Ok(ConvergenceTable {
        rows,
        error_fit,
        bias_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::Sequential;
    use crate::problem::{benchmark_slab_case, AngularProfile, AngularPiece, Profile1D, ScatteringKernel, SlabSpec};
    use core::f64::consts::PI;

    #[test]
    fn fit_order_examples() {
        assert!((fit_order(&[(1.0, 1.0), (0.5, 0.25)]).unwrap().slope - 2.0).abs() < 1e-12);
        assert!(fit_order(&[(1.0, 3.0), (0.5, 3.0)]).unwrap().slope.abs() < 1e-12);
        let table = [
            (PI / 100.0, 4.337e-3),
            (PI / 64.0, 5.560e-3),
            (PI / 36.0, 8.672e-3),
            (PI / 16.0, 1.629e-2),
        ];
        let fit = fit_order(&table).unwrap();
        assert!((fit.slope - 0.73).abs() < 0.01, "{}", fit.slope);
    }

    #[test]
    fn fit_order_is_exact_on_power_laws() {
        let pts: Vec<(f64, f64)> = [0.5, 0.25, 0.125, 0.0625].iter().map(|&h: &f64| (h, 7.0 * h.powf(1.37))).collect();
        let fit = fit_order(&pts).unwrap();
        assert!((fit.slope - 1.37).abs() < 1e-12);
        assert!((fit.endpoint_slope - 1.37).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn fit_order_rejects_bad_points() {
        assert!(fit_order(&[(1.0, 1.0)]).is_err());
        assert!(fit_order(&[(1.0, 1.0), (0.5, 0.0)]).is_err());
        assert!(fit_order(&[(1.0, 1.0), (1.0, 2.0)]).is_err());
    }

    fn pure_absorber() -> SlabSpec {
        SlabSpec {
            x_left: 0.0,
            x_right: 1.0,
            sigma_t: Profile1D::Constant(1.0),
            sigma_s: Profile1D::Constant(0.0),
            source: Profile1D::Constant(0.0),
            left: AngularProfile {
                pieces: vec![AngularPiece {
                    lo: 0.0,
                    hi: 1.0,
                    lo_closed: false,
                    hi_closed: true,
                    a: 1.0,
                    b: 0.0,
                }],
            },
            right: AngularProfile::vacuum(),
            kernel: ScatteringKernel::ISOTROPIC,
        }
    }

    /// `int_delta^1 e^{-x/mu} dmu` by adaptive Simpson.
    fn direct(x: f64, delta: f64) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let (flm, frm) = (f(lm), f(rm));
            let left = (b - a) / 12.0 * (fa + 4.0 * flm + fm);
            let right = (b - a) / 12.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() < 1e-14 {
                return left + right + (left + right - whole) / 15.0;
            }
            simpson(f, a, m, fa, flm, fm, left, depth - 1) + simpson(f, m, b, fm, frm, fb, right, depth - 1)
        }
        let f = |mu: f64| (-x / mu).exp();
        let (a, b) = (delta, 1.0);
        let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
        simpson(&f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), 40)
    }

    #[test]
    fn pure_absorber_matches_direct_quadrature() {
        let config = NeumannConfig::default();
        let sol = neumann_phi_slab(&pure_absorber(), &config).unwrap();
        assert_eq!(sol.term_norms.len(), 1);
        let norm = 2.0 * (1.0 - config.delta);
        // Fine-grid nodes, so no interpolation error enters.
        for x in [0.0, 0.125, 0.375, 0.5, 1.0] {
            let exact = direct(x, config.delta) / norm;
            assert!((sol.eval(x) - exact).abs() < 1e-8, "x = {x}: {} vs {exact}", sol.eval(x));
        }
    }

    #[test]
    fn series_terms_decrease_geometrically() {
        let sol = neumann_phi_slab(&benchmark_slab_case(1).unwrap(), &NeumannConfig::default()).unwrap();
        assert_eq!(sol.lambda, 0.5);
        for w in sol.term_norms[1..].windows(2) {
            assert!(w[1] <= w[0]);
            assert!(w[1] <= sol.lambda * w[0] * (1.0 + 1e-12));
        }
        let last = *sol.term_norms.last().unwrap();
        assert!(sol.tail_bound <= sol.lambda / (1.0 - sol.lambda) * last * (1.0 + 1e-15));
        assert!(sol.tail_bound < 1e-12);
    }

    #[test]
    fn series_cap_is_reported() {
        let config = NeumannConfig {
            max_terms: 3,
            panels: 256,
            mu_order: 8,
            ..NeumannConfig::default()
        };
        let err = neumann_phi_slab(&benchmark_slab_case(1).unwrap(), &config).unwrap_err();
        assert!(matches!(err, Error::SeriesNonConvergence { terms: 3, .. }));
    }

    #[test]
    fn anisotropic_problems_are_rejected() {
        let mut p = benchmark_slab_case(1).unwrap();
        p.kernel = ScatteringKernel::new(0.5).unwrap();
        assert!(neumann_phi_slab(&p, &NeumannConfig::default()).is_err());
    }

    #[test]
    fn oracle_is_panel_independent() {
        let p = benchmark_slab_case(1).unwrap();
        let grid = SlabGrid::new(0.0, 1.0, 50).unwrap();
        let coarse = neumann_phi_slab(&p, &NeumannConfig::default()).unwrap();
        let fine = neumann_phi_slab(&p, &NeumannConfig { panels: 8192, ..NeumannConfig::default() }).unwrap();
        let d = l2_error(&coarse.on_grid(&grid), &fine.on_grid(&grid)).unwrap();
        assert!(d < 1e-6, "{d}");
    }

    #[test]
    fn oracle_is_robust_to_truncation() {
        let p = benchmark_slab_case(1).unwrap();
        let grid = SlabGrid::new(0.0, 1.0, 50).unwrap();
        let a = neumann_phi_slab(&p, &NeumannConfig { delta: 1e-2, ..NeumannConfig::default() }).unwrap();
        let b = neumann_phi_slab(&p, &NeumannConfig::default()).unwrap();
        let d = l2_error(&a.on_grid(&grid), &b.on_grid(&grid)).unwrap();
        assert!(d < 1e-2, "{d}");
    }

    #[test]
    fn dom_slab_study_converges() {
        let p = benchmark_slab_case(1).unwrap();
        let gp = GridProblem::Slab {
            problem: &p,
            grid: SlabGrid::new(0.0, 1.0, 50).unwrap(),
        };
        let opts = SolverOptions::default();
        let reference = Reference::compute(&gp, Method::DomUniform, 1280, &opts).unwrap();
        let table = convergence_study(&gp, Method::DomUniform, &[10, 20, 40, 80], &reference, &opts, &Sequential).unwrap();
        assert!(table.rows.windows(2).all(|w| w[1].error < w[0].error));
        assert!(table.error_fit.slope > 1.5, "{}", table.error_fit.slope);
        assert!(table.bias_fit.is_none());
    }

    #[test]
    fn study_rejects_coarse_reference() {
        let p = benchmark_slab_case(1).unwrap();
        let gp = GridProblem::Slab {
            problem: &p,
            grid: SlabGrid::new(0.0, 1.0, 10).unwrap(),
        };
        let opts = SolverOptions::default();
        let reference = Reference::compute(&gp, Method::DomUniform, 20, &opts).unwrap();
        assert!(convergence_study(&gp, Method::DomUniform, &[10, 20], &reference, &opts, &Sequential).is_err());
        assert!(convergence_study(&gp, Method::DomUniform, &[10, 5], &reference, &opts, &Sequential).is_err());
    }

    #[test]
    fn mesh_sizes() {
        assert_eq!(Method::DomUniform.mesh_size(Geometry::Xy, 2), PI / 16.0);
        assert_eq!(Method::DomUniform.mesh_size(Geometry::Xy, 5), PI / 100.0);
        assert_eq!(Method::DomGauss.ordinates(Geometry::Xy, 20), 840);
        let rom = Method::Rom { samples: 1, seed: 0 };
        assert_eq!(rom.mesh_size(Geometry::Slab, 4), 0.5);
        assert_eq!(rom.ordinates(Geometry::Xy, 3), 36);
    }
}
