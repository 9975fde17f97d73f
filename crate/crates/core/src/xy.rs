// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

//! X-Y geometry discrete ordinates with diamond-difference sweeps.
//!
//! Unknowns sit at cell centers. For an ordinate `(c, s)` each cell solves
//!
//! ```text
//! psi = (ax psi_in_x + ay psi_in_y + e) / (sigma_t + ax + ay),
//! ax = 2 |c| / dx,  ay = 2 |s| / dy,
//! ```
//!
//! and passes `2 psi - psi_in` to its downstream neighbours.

use alloc::vec;
use alloc::vec::Vec;

use crate::problem::{xy_scattering_ratio, DiscreteKernel, Edge, XyGrid, XyProblem};
use crate::quadrature::{Ordinate, XyQuadrature};
use crate::slab::{relative_change, IterationReport, SolverOptions, NEGATIVE_FLUX_THRESHOLD};
use crate::{Error, Result};

/// `psi_l` at cell centers, ordinate-major; each block is row-major with
/// `j` outer.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularFlux2D {
    cells: usize,
    values: Vec<f64>,
}

impl AngularFlux2D {
    pub fn new(ordinates: usize, cells: usize) -> Self {
        Self {
            cells,
            values: vec![0.0; ordinates * cells],
        }
    }

    pub fn ordinate_count(&self) -> usize {
        self.values.len() / self.cells
    }

    pub fn ordinate(&self, l: usize) -> &[f64] {
        &self.values[l * self.cells..(l + 1) * self.cells]
    }

    pub fn ordinate_mut(&mut self, l: usize) -> &mut [f64] {
        &mut self.values[l * self.cells..(l + 1) * self.cells]
    }
}

/// `phi` at cell centers, row-major with `j` (y) outer.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFlux2D {
    pub grid: XyGrid,
    pub values: Vec<f64>,
}

impl ScalarFlux2D {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Bilinear interpolation between cell centers, clamped to the outer
    /// ring of centers.
    pub fn bilinear(&self, x: f64, y: f64) -> f64 {
        let g = &self.grid;
        let fx = ((x - g.domain.x_left) / g.dx() - 0.5).clamp(0.0, (g.nx - 1) as f64);
        let fy = ((y - g.domain.y_bottom) / g.dy() - 0.5).clamp(0.0, (g.ny - 1) as f64);
        let i0 = (fx as usize).min(g.nx.saturating_sub(2));
        let j0 = (fy as usize).min(g.ny.saturating_sub(2));
        let i1 = (i0 + 1).min(g.nx - 1);
        let j1 = (j0 + 1).min(g.ny - 1);
        let tx = fx - i0 as f64;
        let ty = fy - j0 as f64;
        let bottom = (1.0 - tx) * self.get(i0, j0) + tx * self.get(i1, j0);
        let top = (1.0 - tx) * self.get(i0, j1) + tx * self.get(i1, j1);
        (1.0 - ty) * bottom + ty * top
    }

    /// `K` samples `(angle, phi)` on the circle of radius `r` about
    /// `(cx, cy)`, angles `2 pi k / K`.
    pub fn circle_profile(&self, cx: f64, cy: f64, r: f64, k: usize) -> Vec<(f64, f64)> {
        (0..k)
            .map(|step| {
                let angle = 2.0 * core::f64::consts::PI * step as f64 / k as f64;
                let value = self.bilinear(cx + r * libm::cos(angle), cy + r * libm::sin(angle));
                (angle, value)
            })
            .collect()
    }

    /// The field rotated by 90 degrees counter-clockwise (square grids only).
    pub fn rotated_quarter(&self) -> Option<ScalarFlux2D> {
        let g = self.grid;
        if g.nx != g.ny {
            return None;
        }
        let n = g.nx;
        let mut values = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                // (i, j) -> (n - 1 - j, i)
                values[g.index(n - 1 - j, i)] = self.get(i, j);
            }
        }
        Some(ScalarFlux2D { grid: g, values })
    }
}

/// `(max - min) / mean` of a profile; zero for an empty or vanishing one.
pub fn relative_variation(profile: &[(f64, f64)]) -> f64 {
    if profile.is_empty() {
        return 0.0;
    }
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for &(_, v) in profile {
        lo = lo.min(v);
        hi = hi.max(v);
        sum += v;
    }
    let mean = sum / profile.len() as f64;
    if mean == 0.0 {
        0.0
    } else {
        (hi - lo) / libm::fabs(mean)
    }
}

/// Cell visiting order for an ordinate: rows from the inflow side in `y`,
/// cells within a row from the inflow side in `x`.
pub fn sweep_order(c: f64, s: f64, grid: &XyGrid) -> impl Iterator<Item = (usize, usize)> {
    let (nx, ny) = (grid.nx, grid.ny);
    (0..ny).flat_map(move |jj| {
        let j = if s >= 0.0 { jj } else { ny - 1 - jj };
        (0..nx).map(move |ii| {
            let i = if c >= 0.0 { ii } else { nx - 1 - ii };
            (i, j)
        })
    })
}

/// Inflow values for one ordinate: one per row on the `x` inflow edge and
/// one per column on the `y` inflow edge, at edge midpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepInflow {
    pub x_edge: Vec<f64>,
    pub y_edge: Vec<f64>,
}

impl SweepInflow {
    pub fn from_problem<P: XyProblem + ?Sized>(problem: &P, grid: &XyGrid, ordinate: &Ordinate) -> Self {
        let d = grid.domain;
        let (x_side, x_pos) = if ordinate.c >= 0.0 {
            (Edge::Left, d.x_left)
        } else {
            (Edge::Right, d.x_right)
        };
        let (y_side, y_pos) = if ordinate.s >= 0.0 {
            (Edge::Bottom, d.y_bottom)
        } else {
            (Edge::Top, d.y_top)
        };
        Self {
            x_edge: (0..grid.ny)
                .map(|j| problem.inflow(x_side, x_pos, grid.y_center(j), ordinate))
                .collect(),
            y_edge: (0..grid.nx)
                .map(|i| problem.inflow(y_side, grid.x_center(i), y_pos, ordinate))
                .collect(),
        }
    }
}

/// One diamond-difference sweep of ordinate `(c, s)`.
///
/// `edge` is scratch space for the incoming `y` fluxes (resized to `nx`).
pub fn dd_sweep_xy(
    c: f64,
    s: f64,
    emission: &[f64],
    sigma_t: &[f64],
    grid: &XyGrid,
    inflow: &SweepInflow,
    out: &mut [f64],
    edge: &mut Vec<f64>,
) {
    let (nx, ny) = (grid.nx, grid.ny);
    let ax = 2.0 * libm::fabs(c) / grid.dx();
    let ay = 2.0 * libm::fabs(s) / grid.dy();
    edge.clear();
    edge.extend_from_slice(&inflow.y_edge);
    for jj in 0..ny {
        let j = if s >= 0.0 { jj } else { ny - 1 - jj };
        let mut x_in = inflow.x_edge[j];
        let row = j * nx;
        for ii in 0..nx {
            let i = if c >= 0.0 { ii } else { nx - 1 - ii };
            let k = row + i;
            let y_in = edge[i];
            let psi = (ax * x_in + ay * y_in + emission[k]) / (sigma_t[k] + ax + ay);
            out[k] = psi;
            x_in = 2.0 * psi - x_in;
            edge[i] = 2.0 * psi - y_in;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct XySolution {
    pub angular: AngularFlux2D,
    pub scalar: ScalarFlux2D,
    pub report: IterationReport,
}

#[derive(Clone, Copy)]
enum Scattering<'a> {
    Moments { g: f64 },
    Matrix(&'a DiscreteKernel),
}

/// Source iteration; the linear kernel `1 + g (c c' + s s')` is applied
/// through the scalar flux and the two in-plane currents.
pub fn source_iteration_xy<P: XyProblem + ?Sized>(
    problem: &P,
    grid: &XyGrid,
    quadrature: &XyQuadrature,
    options: &SolverOptions,
) -> Result<XySolution> {
    let g = problem.kernel().g;
    iterate(problem, grid, quadrature, Scattering::Moments { g }, options)
}

/// Source iteration with an explicit scattering matrix.
pub fn source_iteration_xy_matrix<P: XyProblem + ?Sized>(
    problem: &P,
    grid: &XyGrid,
    quadrature: &XyQuadrature,
    kernel: &DiscreteKernel,
    options: &SolverOptions,
) -> Result<XySolution> {
    if kernel.size() != quadrature.len() {
        return Err(Error::invalid("kernel", "matrix size does not match the ordinate count"));
    }
    iterate(problem, grid, quadrature, Scattering::Matrix(kernel), options)
}

/// Weighted sum over ordinates at every cell center.
pub fn scalar_flux_xy(psi: &AngularFlux2D, weights: &[f64], grid: &XyGrid) -> ScalarFlux2D {
    let mut values = vec![0.0; grid.cell_count()];
    for (l, &w) in weights.iter().enumerate() {
        for (v, &p) in values.iter_mut().zip(psi.ordinate(l)) {
            *v += w * p;
        }
    }
    ScalarFlux2D { grid: *grid, values }
}

fn iterate<P: XyProblem + ?Sized>(
    problem: &P,
    grid: &XyGrid,
    quadrature: &XyQuadrature,
    scattering: Scattering<'_>,
    options: &SolverOptions,
) -> Result<XySolution> {
    options.validate()?;
    let lambda = xy_scattering_ratio(problem, grid)?;
    if lambda >= 1.0 {
        return Err(Error::InvalidProblem(alloc::format!("scattering ratio {lambda} must be below one")));
    }
    let ncell = grid.cell_count();
    let ordinates = quadrature.ordinates();
    let weights = quadrature.weights();
    let count = ordinates.len();

    let mut sigma_t = vec![0.0; ncell];
    let mut sigma_s = vec![0.0; ncell];
    for j in 0..grid.ny {
        let y = grid.y_center(j);
        for i in 0..grid.nx {
            let x = grid.x_center(i);
            let k = grid.index(i, j);
            sigma_t[k] = problem.sigma_t(x, y);
            sigma_s[k] = problem.sigma_s(x, y);
        }
    }
    let no_scattering = sigma_s.iter().all(|&s| s == 0.0);
    let inflows: Vec<SweepInflow> = ordinates
        .iter()
        .map(|o| SweepInflow::from_problem(problem, grid, o))
        .collect();
    let external = |o: &Ordinate, out: &mut [f64]| {
        for j in 0..grid.ny {
            let y = grid.y_center(j);
            for i in 0..grid.nx {
                out[grid.index(i, j)] = problem.source(grid.x_center(i), y, o);
            }
        }
    };

    let anisotropic = matches!(scattering, Scattering::Moments { g } if g != 0.0);
    let mut psi = AngularFlux2D::new(count, ncell);
    let mut phi = vec![0.0; ncell];
    let mut phi_new = vec![0.0; ncell];
    let (mut jx, mut jy) = if anisotropic {
        (vec![0.0; ncell], vec![0.0; ncell])
    } else {
        (Vec::new(), Vec::new())
    };
    let (mut jx_new, mut jy_new) = (jx.clone(), jy.clone());
    let mut matrix_source = match scattering {
        Scattering::Matrix(_) => vec![0.0; count * ncell],
        Scattering::Moments { .. } => Vec::new(),
    };
    let mut column = vec![0.0; count];
    let mut emission = vec![0.0; ncell];
    let mut edge = Vec::with_capacity(grid.nx);

    let mut report = IterationReport::default();
    loop {
        if let Scattering::Matrix(kernel) = scattering {
            for k in 0..ncell {
                for (l, c) in column.iter_mut().enumerate() {
                    *c = psi.ordinate(l)[k];
                }
                for l in 0..count {
                    matrix_source[l * ncell + k] = kernel.apply_row(l, weights, &column);
                }
            }
        }
        phi_new.iter_mut().for_each(|v| *v = 0.0);
        jx_new.iter_mut().for_each(|v| *v = 0.0);
        jy_new.iter_mut().for_each(|v| *v = 0.0);

        for (l, o) in ordinates.iter().enumerate() {
            external(o, &mut emission);
            match scattering {
                Scattering::Moments { g } => {
                    if anisotropic {
                        for k in 0..ncell {
                            emission[k] += sigma_s[k] * (phi[k] + g * (o.c * jx[k] + o.s * jy[k]));
                        }
                    } else {
                        for k in 0..ncell {
                            emission[k] += sigma_s[k] * phi[k];
                        }
                    }
                }
                Scattering::Matrix(_) => {
                    let src = &matrix_source[l * ncell..(l + 1) * ncell];
                    for k in 0..ncell {
                        emission[k] += sigma_s[k] * src[k];
                    }
                }
            }
            let out = psi.ordinate_mut(l);
            dd_sweep_xy(o.c, o.s, &emission, &sigma_t, grid, &inflows[l], out, &mut edge);

            let w = weights[l];
            for (v, &p) in phi_new.iter_mut().zip(out.iter()) {
                *v += w * p;
            }
            if anisotropic {
                let (wc, ws) = (w * o.c, w * o.s);
                for k in 0..ncell {
                    jx_new[k] += wc * out[k];
                    jy_new[k] += ws * out[k];
                }
            }
        }

        let residual = relative_change(&phi, &phi_new);
        core::mem::swap(&mut phi, &mut phi_new);
        core::mem::swap(&mut jx, &mut jx_new);
        core::mem::swap(&mut jy, &mut jy_new);
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
    Ok(XySolution {
        angular: psi,
        scalar: ScalarFlux2D {
            grid: *grid,
            values: phi,
        },
        report,
    })
}
