// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

//! Slab-geometry discrete ordinates: nodal sweeps and source iteration.
//!
//! Fluxes live on the `I + 1` grid nodes. With [`SlabScheme::Diamond`]
//! each cell obeys
//!
//! ```text
//! mu (psi[i+1] - psi[i]) / dx + sigma_t[i+1/2] (psi[i] + psi[i+1]) / 2 = e[i+1/2]
//! ```
//!
//! where the emission `e` is the scattering source averaged from the two
//! nodes plus the external source at the midpoint.
//!
//! The default, [`SlabScheme::Characteristic`], integrates the transport
//! equation exactly across each cell for an emission that is linear between
//! nodal values, using the cell optical depth. It is also second order,
//! but its transmission factor `exp(-tau / |mu|)` stays in `(0, 1)` for
//! every direction, whereas the diamond factor tends to `-1` in cells that
//! are optically thick for grazing directions. Those undamped oscillations
//! make the diamond scalar flux a rough function of `mu` and spoil the
//! angular convergence rates on coarse grids.

use alloc::vec;
use alloc::vec::Vec;

use crate::problem::{slab_scattering_ratio, DiscreteKernel, SlabGrid, SlabProblem};
use crate::quadrature::SlabQuadrature;
use crate::{Error, Result};

/// Fluxes below this count as negative in the diagnostics.
pub const NEGATIVE_FLUX_THRESHOLD: f64 = -1e-12;

/// Stopping rule for source iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative max-norm change of the scalar flux.
    pub tol: f64,
    pub max_iters: usize,
    /// Spatial scheme for slab sweeps (X-Y sweeps are always diamond).
    pub slab_scheme: SlabScheme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SlabScheme {
    Diamond,
    #[default]
    Characteristic,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 10_000,
            slab_scheme: SlabScheme::Characteristic,
        }
    }
}

impl SolverOptions {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol", "tolerance must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters", "need at least one iteration"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationReport {
    pub iterations: usize,
    /// Residual of the last iteration.
    pub residual: f64,
    pub converged: bool,
    /// Residual after every iteration.
    pub residuals: Vec<f64>,
    /// Angular flux entries below [`NEGATIVE_FLUX_THRESHOLD`] in the final sweep.
    pub negative_count: usize,
}

/// `psi_l(x_i)`, ordinate-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularFlux1D {
    nodes: usize,
    values: Vec<f64>,
}

impl AngularFlux1D {
    pub fn new(ordinates: usize, nodes: usize) -> Self {
        Self {
            nodes,
            values: vec![0.0; ordinates * nodes],
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn ordinate_count(&self) -> usize {
        self.values.len() / self.nodes
    }

    pub fn ordinate(&self, l: usize) -> &[f64] {
        &self.values[l * self.nodes..(l + 1) * self.nodes]
    }

    pub fn ordinate_mut(&mut self, l: usize) -> &mut [f64] {
        &mut self.values[l * self.nodes..(l + 1) * self.nodes]
    }

    pub fn get(&self, l: usize, i: usize) -> f64 {
        self.values[l * self.nodes + i]
    }
}

/// `phi(x_i) = sum_l w_l psi_l(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFlux1D {
    pub values: Vec<f64>,
}

/// Weighted sum over ordinates at every node.
pub fn scalar_flux(psi: &AngularFlux1D, weights: &[f64]) -> ScalarFlux1D {
    let mut values = vec![0.0; psi.node_count()];
    accumulate_moment(psi, weights, None, &mut values);
    ScalarFlux1D { values }
}

/// `out[i] = sum_l w_l f_l psi_l(i)` with `f_l = 1` or `f_l = mu_l`.
fn accumulate_moment(psi: &AngularFlux1D, weights: &[f64], factors: Option<&[f64]>, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for (l, &w) in weights.iter().enumerate() {
        let w = match factors {
            Some(f) => w * f[l],
            None => w,
        };
        for (o, &p) in out.iter_mut().zip(psi.ordinate(l)) {
            *o += w * p;
        }
    }
}

/// Marches one ordinate across the slab from its inflow boundary.
///
/// `emission` and `sigma_t` hold one value per cell (at the midpoints);
/// `out` receives the `I + 1` nodal values.
pub fn sweep_slab(mu: f64, emission: &[f64], sigma_t: &[f64], dx: f64, inflow: f64, out: &mut [f64]) -> Result<()> {
    let cells = emission.len();
    if mu == 0.0 {
        return Err(Error::invalid("mu", "sweeps need a nonzero direction cosine"));
    }
    debug_assert_eq!(sigma_t.len(), cells);
    debug_assert_eq!(out.len(), cells + 1);
    let a = libm::fabs(mu) / dx;
    if mu > 0.0 {
        out[0] = inflow;
        for i in 0..cells {
            let half = 0.5 * sigma_t[i];
            let denom = a + half;
            if !(denom > 0.0) {
                return Err(Error::Internal("nonpositive diamond denominator"));
            }
            out[i + 1] = ((a - half) * out[i] + emission[i]) / denom;
        }
    } else {
        out[cells] = inflow;
        for i in (0..cells).rev() {
            let half = 0.5 * sigma_t[i];
            let denom = a + half;
            if !(denom > 0.0) {
                return Err(Error::Internal("nonpositive diamond denominator"));
            }
            out[i] = ((a - half) * out[i + 1] + emission[i]) / denom;
        }
    }
    Ok(())
}

/// `(1 - e^-t, (1 - e^-t (1 + t)) / t)`, accurate for small `t`.
pub(crate) fn exp_moments(t: f64) -> (f64, f64) {
    let one = -libm::expm1(-t);
    let two = if t < 1e-3 {
        t * (0.5 - t * (1.0 / 3.0 - t * 0.125))
    } else {
        (one - t * libm::exp(-t)) / t
    };
    (one, two)
}

/// Cell coefficients of the linear-characteristic scheme for one direction:
/// `psi_down = decay psi_up + near e_up + far e_down`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicCells {
    pub decay: Vec<f64>,
    pub near: Vec<f64>,
    pub far: Vec<f64>,
}

impl CharacteristicCells {
    /// `depth[i]` is the optical thickness of cell `i`.
    pub fn new(mu: f64, depth: &[f64], dx: f64) -> Result<Self> {
        if mu == 0.0 {
            return Err(Error::invalid("mu", "sweeps need a nonzero direction cosine"));
        }
        let a = libm::fabs(mu);
        let mut cells = Self {
            decay: Vec::with_capacity(depth.len()),
            near: Vec::with_capacity(depth.len()),
            far: Vec::with_capacity(depth.len()),
        };
        for &tau in depth {
            if !(tau > 0.0) {
                return Err(Error::Internal("nonpositive optical depth"));
            }
            let t = tau / a;
            let (one, two) = exp_moments(t);
            // Emission enters as e / sigma with sigma = tau / dx.
            let scale = dx / tau;
            cells.decay.push(libm::exp(-t));
            cells.near.push(scale * two);
            cells.far.push(scale * (one - two));
        }
        Ok(cells)
    }
}

/// Linear-characteristic sweep; `emission` holds the `I + 1` nodal values.
pub fn sweep_slab_characteristic(mu: f64, cells: &CharacteristicCells, emission: &[f64], inflow: f64, out: &mut [f64]) {
    let n = cells.decay.len();
    debug_assert_eq!(emission.len(), n + 1);
    if mu > 0.0 {
        out[0] = inflow;
        for i in 0..n {
            out[i + 1] = cells.decay[i] * out[i] + cells.near[i] * emission[i] + cells.far[i] * emission[i + 1];
        }
    } else {
        out[n] = inflow;
        for i in (0..n).rev() {
            out[i] = cells.decay[i] * out[i + 1] + cells.near[i] * emission[i + 1] + cells.far[i] * emission[i];
        }
    }
}

/// Optical thickness of every cell by Simpson's rule.
pub fn optical_depths<P: SlabProblem + ?Sized>(problem: &P, grid: &SlabGrid) -> Vec<f64> {
    let dx = grid.dx();
    (0..grid.cells)
        .map(|i| {
            let (a, b) = (grid.node(i), grid.node(i + 1));
            dx / 6.0 * (problem.sigma_t(a) + 4.0 * problem.sigma_t(0.5 * (a + b)) + problem.sigma_t(b))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlabSolution {
    pub angular: AngularFlux1D,
    pub scalar: ScalarFlux1D,
    pub report: IterationReport,
}

/// How the scattering sum is evaluated.
#[derive(Clone, Copy)]
enum Scattering<'a> {
    /// Linear kernel through its angular moments: `phi + g mu J`.
    Moments { g: f64 },
    /// Explicit `P_{l, l'}` matrix.
    Matrix(&'a DiscreteKernel),
}

/// Source iteration with the linearly anisotropic kernel applied through
/// the scalar flux and current (exact for `1 + g mu mu'`).
pub fn source_iteration_slab<P: SlabProblem + ?Sized>(
    problem: &P,
    grid: &SlabGrid,
    quadrature: &SlabQuadrature,
    options: &SolverOptions,
) -> Result<SlabSolution> {
    let g = problem.kernel().g;
    iterate(problem, grid, quadrature, Scattering::Moments { g }, options)
}

/// Source iteration with an explicit scattering matrix.
pub fn source_iteration_slab_matrix<P: SlabProblem + ?Sized>(
    problem: &P,
    grid: &SlabGrid,
    quadrature: &SlabQuadrature,
    kernel: &DiscreteKernel,
    options: &SolverOptions,
) -> Result<SlabSolution> {
    if kernel.size() != quadrature.len() {
        return Err(Error::invalid("kernel", "matrix size does not match the ordinate count"));
    }
    iterate(problem, grid, quadrature, Scattering::Matrix(kernel), options)
}

fn iterate<P: SlabProblem + ?Sized>(
    problem: &P,
    grid: &SlabGrid,
    quadrature: &SlabQuadrature,
    scattering: Scattering<'_>,
    options: &SolverOptions,
) -> Result<SlabSolution> {
    options.validate()?;
    let lambda = slab_scattering_ratio(problem, grid)?;
    if lambda >= 1.0 {
        return Err(Error::InvalidProblem(alloc::format!("scattering ratio {lambda} must be below one")));
    }
    let cells = grid.cells;
    let nodes = grid.node_count();
    let dx = grid.dx();
    let mus = quadrature.nodes();
    let weights = quadrature.weights();
    let count = mus.len();

    let characteristic = options.slab_scheme == SlabScheme::Characteristic;
    // Coefficients and external source live at midpoints for the diamond
    // scheme and at nodes for the characteristic one.
    let points: Vec<f64> = if characteristic {
        grid.nodes()
    } else {
        (0..cells).map(|i| grid.midpoint(i)).collect()
    };
    let sigma_t: Vec<f64> = points.iter().map(|&x| problem.sigma_t(x)).collect();
    let sigma_s: Vec<f64> = points.iter().map(|&x| problem.sigma_s(x)).collect();
    let no_scattering = sigma_s.iter().all(|&s| s == 0.0);
    // External source and inflow per ordinate.
    let external: Vec<Vec<f64>> = mus
        .iter()
        .map(|&mu| points.iter().map(|&x| problem.source(x, mu)).collect())
        .collect();
    let inflow: Vec<f64> = mus.iter().map(|&mu| problem.inflow(mu)).collect();
    let transport: Vec<CharacteristicCells> = if characteristic {
        let depth = optical_depths(problem, grid);
        mus.iter()
            .map(|&mu| CharacteristicCells::new(mu, &depth, dx))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let mut psi = AngularFlux1D::new(count, nodes);
    let mut phi = vec![0.0; nodes];
    let mut current = vec![0.0; nodes];
    let mut phi_new = vec![0.0; nodes];
    let mut scatter = vec![0.0; nodes];
    let mut emission = vec![0.0; points.len()];
    // Scattering sum per ordinate and node, only for the matrix path.
    let mut matrix_source = match scattering {
        Scattering::Matrix(_) => vec![0.0; count * nodes],
        Scattering::Moments { .. } => Vec::new(),
    };
    let mut column = vec![0.0; count];

    let mut report = IterationReport::default();
    loop {
        if let Scattering::Matrix(kernel) = scattering {
            for i in 0..nodes {
                for (l, c) in column.iter_mut().enumerate() {
                    *c = psi.get(l, i);
                }
                for l in 0..count {
                    matrix_source[l * nodes + i] = kernel.apply_row(l, weights, &column);
                }
            }
        }
        for l in 0..count {
            let mu = mus[l];
            match scattering {
                Scattering::Moments { g } if g != 0.0 => {
                    for i in 0..nodes {
                        scatter[i] = phi[i] + g * mu * current[i];
                    }
                }
                Scattering::Moments { .. } => scatter.copy_from_slice(&phi),
                Scattering::Matrix(_) => scatter.copy_from_slice(&matrix_source[l * nodes..(l + 1) * nodes]),
            }
            if characteristic {
                for i in 0..nodes {
                    emission[i] = sigma_s[i] * scatter[i] + external[l][i];
                }
                sweep_slab_characteristic(mu, &transport[l], &emission, inflow[l], psi.ordinate_mut(l));
            } else {
                for i in 0..cells {
                    emission[i] = sigma_s[i] * 0.5 * (scatter[i] + scatter[i + 1]) + external[l][i];
                }
                sweep_slab(mu, &emission, &sigma_t, dx, inflow[l], psi.ordinate_mut(l))?;
            }
        }

        accumulate_moment(&psi, weights, None, &mut phi_new);
        let residual = relative_change(&phi, &phi_new);
        core::mem::swap(&mut phi, &mut phi_new);
        if let Scattering::Moments { g } = scattering {
            if g != 0.0 {
                accumulate_moment(&psi, weights, Some(mus), &mut current);
            }
        }
        report.iterations += 1;
        report.residual = residual;
        report.residuals.push(residual);

        if no_scattering || residual < options.tol {
            report.converged = true;
            break;
        }
        if report.iterations >= options.max_iters {
            return Err(Error::NonConvergence {
                iterations: report.iterations,
                residual,
            });
        }
    }
    report.negative_count = psi.values.iter().filter(|&&v| v < NEGATIVE_FLUX_THRESHOLD).count();
    Ok(SlabSolution {
        angular: psi,
        scalar: ScalarFlux1D { values: phi },
        report,
    })
}

/// `max |new - old| / max |new|`, zero when both vanish.
pub(crate) fn relative_change(old: &[f64], new: &[f64]) -> f64 {
    let mut diff: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (&a, &b) in old.iter().zip(new) {
        diff = diff.max(libm::fabs(b - a));
        scale = scale.max(libm::fabs(b));
    }
    if diff == 0.0 {
        0.0
    } else if scale == 0.0 {
        f64::INFINITY
    } else {
        diff / scale
    }
}
