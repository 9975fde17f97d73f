// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

//! Transport problem definitions: cross sections, sources, inflow data,
//! the linearly anisotropic scattering kernel and uniform spatial grids.
//!
//! Solvers see problems through the [`SlabProblem`] and [`XyProblem`]
//! traits. The concrete [`SlabSpec`] and [`XySpec`] cover every built-in
//! benchmark and everything the configuration files can describe; tests
//! implement the traits directly for manufactured solutions.

use alloc::format;
use alloc::vec::Vec;

use crate::quadrature::{Ordinate, Quadrature};
use crate::{Error, Result};

/// `P(u', u) = 1 + g cos(xi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringKernel {
    pub g: f64,
}

impl ScatteringKernel {
    pub const ISOTROPIC: Self = Self { g: 0.0 };

    pub fn new(g: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&g) {
            return Err(Error::invalid("g", "anisotropy must lie in [-1, 1]"));
        }
        Ok(Self { g })
    }

    pub fn is_isotropic(&self) -> bool {
        self.g == 0.0
    }

    pub fn eval(&self, cos_angle: f64) -> f64 {
        1.0 + self.g * cos_angle
    }

    /// Scattering cosine between two slab directions.
    pub fn slab_cosine(mu: f64, mu_prime: f64) -> f64 {
        mu * mu_prime
    }

    /// Scattering cosine between two X-Y ordinates.
    ///
    /// An X-Y ordinate `(c, s, zeta)` stands for itself and its mirror
    /// `(c, s, -zeta)`, which carries the same flux. Averaging the 3D
    /// product `c c' + s s' + zeta zeta'` over the mirror pair cancels the
    /// `zeta zeta'` term.
    pub fn xy_cosine(a: &Ordinate, b: &Ordinate) -> f64 {
        a.c * b.c + a.s * b.s
    }
}

impl Default for ScatteringKernel {
    fn default() -> Self {
        Self::ISOTROPIC
    }
}

/// `P_{l, l'}` over one ordinate set, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteKernel {
    size: usize,
    entries: Vec<f64>,
}

impl DiscreteKernel {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.size + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.size..(row + 1) * self.size]
    }

    /// `sum_l' w_l' P_{l, l'}` for every row.
    pub fn weighted_row_sums(&self, weights: &[f64]) -> Vec<f64> {
        (0..self.size)
            .map(|r| self.row(r).iter().zip(weights).map(|(p, w)| p * w).sum())
            .collect()
    }

    /// `sum_l' w_l' P_{l, l'} psi_l'` for one row.
    pub fn apply_row(&self, row: usize, weights: &[f64], psi: &[f64]) -> f64 {
        self.row(row)
            .iter()
            .zip(weights)
            .zip(psi)
            .map(|((p, w), f)| p * w * f)
            .sum()
    }
}

/// Builds the scattering matrix for an ordinate set.
pub fn discrete_kernel(quadrature: &Quadrature, kernel: ScatteringKernel) -> DiscreteKernel {
    let size = quadrature.len();
    let mut entries = Vec::with_capacity(size * size);
    match quadrature {
        Quadrature::Slab(q) => {
            for &a in q.nodes() {
                for &b in q.nodes() {
                    entries.push(kernel.eval(ScatteringKernel::slab_cosine(a, b)));
                }
            }
        }
        Quadrature::Xy(q) => {
            for a in q.ordinates() {
                for b in q.ordinates() {
                    entries.push(kernel.eval(ScatteringKernel::xy_cosine(a, b)));
                }
            }
        }
    }
    DiscreteKernel { size, entries }
}

/// A scalar function of one spatial variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile1D {
    Constant(f64),
    /// Coefficients in ascending powers of `x`.
    Polynomial(Vec<f64>),
}

impl Profile1D {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile1D::Constant(v) => *v,
            Profile1D::Polynomial(coeffs) => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
        }
    }
}

/// One linear branch `a + b mu` of inflow data, on an interval whose
/// endpoints may be open or closed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularPiece {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
    pub a: f64,
    pub b: f64,
}

impl AngularPiece {
    pub fn contains(&self, mu: f64) -> bool {
        let above = if self.lo_closed { mu >= self.lo } else { mu > self.lo };
        let below = if self.hi_closed { mu <= self.hi } else { mu < self.hi };
        above && below
    }
}

/// Piecewise-linear function of the direction cosine; zero outside every
/// piece. The first piece containing `mu` wins.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AngularProfile {
    pub pieces: Vec<AngularPiece>,
}

impl AngularProfile {
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn eval(&self, mu: f64) -> f64 {
        self.pieces
            .iter()
            .find(|p| p.contains(mu))
            .map_or(0.0, |p| p.a + p.b * mu)
    }
}

fn piece(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool, a: f64, b: f64) -> AngularPiece {
    AngularPiece {
        lo,
        hi,
        lo_closed,
        hi_closed,
        a,
        b,
    }
}

/// Uniform nodal grid on `[x_left, x_right]` with `cells` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabGrid {
    pub x_left: f64,
    pub x_right: f64,
    pub cells: usize,
}

impl SlabGrid {
    pub fn new(x_left: f64, x_right: f64, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::invalid("I", "need at least one cell"));
        }
        if !(x_right > x_left) {
            return Err(Error::invalid("domain", "x_right must exceed x_left"));
        }
        Ok(Self {
            x_left,
            x_right,
            cells,
        })
    }

    pub fn dx(&self) -> f64 {
        (self.x_right - self.x_left) / self.cells as f64
    }

    /// Node `i` for `i = 0..=cells`.
    pub fn node(&self, i: usize) -> f64 {
        if i == self.cells {
            self.x_right
        } else {
            self.x_left + i as f64 * self.dx()
        }
    }

    /// Midpoint of cell `i` (between nodes `i` and `i + 1`).
    pub fn midpoint(&self, i: usize) -> f64 {
        self.x_left + (i as f64 + 0.5) * self.dx()
    }

    pub fn node_count(&self) -> usize {
        self.cells + 1
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.cells).map(|i| self.node(i)).collect()
    }
}

/// Axis-aligned rectangle `[x_left, x_right] x [y_bottom, y_top]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_left: f64,
    pub x_right: f64,
    pub y_bottom: f64,
    pub y_top: f64,
}

impl Rect {
    pub const UNIT: Self = Self {
        x_left: 0.0,
        x_right: 1.0,
        y_bottom: 0.0,
        y_top: 1.0,
    };
}

/// Uniform `nx x ny` cell-centered grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XyGrid {
    pub domain: Rect,
    pub nx: usize,
    pub ny: usize,
}

impl XyGrid {
    pub fn new(domain: Rect, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::invalid("I, J", "need at least one cell per direction"));
        }
        if !(domain.x_right > domain.x_left && domain.y_top > domain.y_bottom) {
            return Err(Error::invalid("domain", "empty rectangle"));
        }
        Ok(Self { domain, nx, ny })
    }

    pub fn dx(&self) -> f64 {
        (self.domain.x_right - self.domain.x_left) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.domain.y_top - self.domain.y_bottom) / self.ny as f64
    }

    pub fn x_center(&self, i: usize) -> f64 {
        self.domain.x_left + (i as f64 + 0.5) * self.dx()
    }

    pub fn y_center(&self, j: usize) -> f64 {
        self.domain.y_bottom + (j as f64 + 0.5) * self.dy()
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Row-major index, `j` (y) outer.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }
}

/// Binary source layout on a block grid; row 0 is the `y_bottom` side.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceMask {
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl SourceMask {
    pub fn new(rows: usize, cols: usize, cells: Vec<bool>) -> Result<Self> {
        if rows == 0 || cols == 0 || cells.len() != rows * cols {
            return Err(Error::invalid("mask", format!("expected {rows} x {cols} entries, got {}", cells.len())));
        }
        Ok(Self { rows, cols, cells })
    }

    /// Centered plus sign of five blocks on a 5 x 5 block grid.
    pub fn default_lattice() -> Self {
        let mut cells = alloc::vec![false; 25];
        for (r, c) in [(2, 2), (1, 2), (3, 2), (2, 1), (2, 3)] {
            cells[r * 5 + c] = true;
        }
        Self {
            rows: 5,
            cols: 5,
            cells,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.cols + col]
    }

    fn lookup(&self, domain: &Rect, x: f64, y: f64) -> bool {
        let fx = (x - domain.x_left) / (domain.x_right - domain.x_left);
        let fy = (y - domain.y_bottom) / (domain.y_top - domain.y_bottom);
        if !(0.0..=1.0).contains(&fx) || !(0.0..=1.0).contains(&fy) {
            return false;
        }
        let col = ((fx * self.cols as f64) as usize).min(self.cols - 1);
        let row = ((fy * self.rows as f64) as usize).min(self.rows - 1);
        self.get(row, col)
    }
}

/// A scalar function on the plane.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile2D {
    Constant(f64),
    /// `inside` on the closed rectangle, `outside` elsewhere.
    Box { region: Rect, inside: f64, outside: f64 },
    /// `value` on the marked blocks of a mask laid over `domain`.
    Mask { mask: SourceMask, domain: Rect, value: f64 },
}

impl Profile2D {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Profile2D::Constant(v) => *v,
            Profile2D::Box {
                region,
                inside,
                outside,
            } => {
                let hit = x >= region.x_left && x <= region.x_right && y >= region.y_bottom && y <= region.y_top;
                if hit {
                    *inside
                } else {
                    *outside
                }
            }
            Profile2D::Mask { mask, domain, value } => {
                if mask.lookup(domain, x, y) {
                    *value
                } else {
                    0.0
                }
            }
        }
    }
}

/// Slab-geometry problem as seen by the solvers.
pub trait SlabProblem {
    fn domain(&self) -> (f64, f64);
    fn sigma_t(&self, x: f64) -> f64;
    fn sigma_s(&self, x: f64) -> f64;
    /// Source density; may depend on direction.
    fn source(&self, x: f64, mu: f64) -> f64;
    /// Inflow data: `psi_L(mu)` for `mu > 0`, `psi_R(mu)` for `mu < 0`.
    fn inflow(&self, mu: f64) -> f64;
    fn kernel(&self) -> ScatteringKernel {
        ScatteringKernel::ISOTROPIC
    }
}

/// Which side of the rectangle a boundary value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Left,
    Right,
    Bottom,
    Top,
}

/// X-Y geometry problem as seen by the solvers.
pub trait XyProblem {
    fn domain(&self) -> Rect;
    fn sigma_t(&self, x: f64, y: f64) -> f64;
    fn sigma_s(&self, x: f64, y: f64) -> f64;
    fn source(&self, x: f64, y: f64, ordinate: &Ordinate) -> f64;
    /// Inflow value at boundary point `(x, y)` on `edge` for an ordinate
    /// entering through that edge.
    fn inflow(&self, edge: Edge, x: f64, y: f64, ordinate: &Ordinate) -> f64;
    fn kernel(&self) -> ScatteringKernel {
        ScatteringKernel::ISOTROPIC
    }
}

/// Concrete slab problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabSpec {
    pub x_left: f64,
    pub x_right: f64,
    pub sigma_t: Profile1D,
    pub sigma_s: Profile1D,
    pub source: Profile1D,
    /// `psi_L(mu)`, used for `mu > 0`.
    pub left: AngularProfile,
    /// `psi_R(mu)`, used for `mu < 0`.
    pub right: AngularProfile,
    pub kernel: ScatteringKernel,
}

impl SlabProblem for SlabSpec {
    fn domain(&self) -> (f64, f64) {
        (self.x_left, self.x_right)
    }
    fn sigma_t(&self, x: f64) -> f64 {
        self.sigma_t.eval(x)
    }
    fn sigma_s(&self, x: f64) -> f64 {
        self.sigma_s.eval(x)
    }
    fn source(&self, x: f64, _mu: f64) -> f64 {
        self.source.eval(x)
    }
    fn inflow(&self, mu: f64) -> f64 {
        if mu > 0.0 {
            self.left.eval(mu)
        } else {
            self.right.eval(mu)
        }
    }
    fn kernel(&self) -> ScatteringKernel {
        self.kernel
    }
}

/// Inflow data for a rectangle: one isotropic value per edge.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EdgeInflow {
    pub left: f64,
    pub right: f64,
    pub bottom: f64,
    pub top: f64,
}

/// Concrete X-Y problem.
#[derive(Debug, Clone, PartialEq)]
pub struct XySpec {
    pub domain: Rect,
    pub sigma_t: Profile2D,
    pub sigma_s: Profile2D,
    pub source: Profile2D,
    pub inflow: EdgeInflow,
    pub kernel: ScatteringKernel,
}

impl XyProblem for XySpec {
    fn domain(&self) -> Rect {
        self.domain
    }
    fn sigma_t(&self, x: f64, y: f64) -> f64 {
        self.sigma_t.eval(x, y)
    }
    fn sigma_s(&self, x: f64, y: f64) -> f64 {
        self.sigma_s.eval(x, y)
    }
    fn source(&self, x: f64, y: f64, _ordinate: &Ordinate) -> f64 {
        self.source.eval(x, y)
    }
    fn inflow(&self, edge: Edge, _x: f64, _y: f64, _ordinate: &Ordinate) -> f64 {
        match edge {
            Edge::Left => self.inflow.left,
            Edge::Right => self.inflow.right,
            Edge::Bottom => self.inflow.bottom,
            Edge::Top => self.inflow.top,
        }
    }
    fn kernel(&self) -> ScatteringKernel {
        self.kernel
    }
}

/// Manufactured X-Y problem with the exact angular flux
/// `psi = exp(-(x + y))` for every direction (so `phi = psi`), obtained
/// from a direction-dependent source. Used to measure spatial order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialXy {
    pub sigma_t: f64,
    pub sigma_s: f64,
}

impl ExponentialXy {
    pub fn exact(&self, x: f64, y: f64) -> f64 {
        libm::exp(-(x + y))
    }
}

impl XyProblem for ExponentialXy {
    fn domain(&self) -> Rect {
        Rect::UNIT
    }
    fn sigma_t(&self, _x: f64, _y: f64) -> f64 {
        self.sigma_t
    }
    fn sigma_s(&self, _x: f64, _y: f64) -> f64 {
        self.sigma_s
    }
    fn source(&self, x: f64, y: f64, o: &Ordinate) -> f64 {
        (self.sigma_t - self.sigma_s - o.c - o.s) * self.exact(x, y)
    }
    fn inflow(&self, _edge: Edge, x: f64, y: f64, _o: &Ordinate) -> f64 {
        self.exact(x, y)
    }
}

/// Localized source in the unit square: `q = 2` on `[0.4, 0.6]^2`,
/// `sigma_T = 1`, `sigma_S = 0.5`, vacuum boundaries.
pub fn benchmark_center_source(kernel: ScatteringKernel) -> XySpec {
    XySpec {
        domain: Rect::UNIT,
        sigma_t: Profile2D::Constant(1.0),
        sigma_s: Profile2D::Constant(0.5),
        source: Profile2D::Box {
            region: Rect {
                x_left: 0.4,
                x_right: 0.6,
                y_bottom: 0.4,
                y_top: 0.6,
            },
            inside: 2.0,
            outside: 0.0,
        },
        inflow: EdgeInflow::default(),
        kernel,
    }
}

/// Lattice problem: unit source on the marked blocks of `mask`.
pub fn benchmark_lattice(mask: SourceMask, kernel: ScatteringKernel) -> XySpec {
    XySpec {
        domain: Rect::UNIT,
        sigma_t: Profile2D::Constant(1.0),
        sigma_s: Profile2D::Constant(0.5),
        source: Profile2D::Mask {
            mask,
            domain: Rect::UNIT,
            value: 1.0,
        },
        inflow: EdgeInflow::default(),
        kernel,
    }
}

/// Checks that a mask's blocks are unions of grid cells.
pub fn check_mask_fits(mask: &SourceMask, grid: &XyGrid) -> Result<()> {
    if grid.nx % mask.cols() != 0 || grid.ny % mask.rows() != 0 {
        return Err(Error::invalid(
            "mask",
            format!(
                "{} x {} mask does not divide the {} x {} grid",
                mask.rows(),
                mask.cols(),
                grid.ny,
                grid.nx
            ),
        ));
    }
    Ok(())
}

/// Slab benchmark with smooth (1), kinked (2) or discontinuous (3) inflow:
/// `x in [0, 1]`, `sigma_T = 10 x^2 + 1`, `sigma_S = 5 x^2 + 0.5`,
/// `q = 1 + x`, isotropic scattering.
pub fn benchmark_slab_case(case: u8) -> Result<SlabSpec> {
    let third = 1.0 / 3.0;
    let (left, right) = match case {
        1 => (
            AngularProfile {
                pieces: alloc::vec![piece(0.0, 1.0, false, true, 0.0, 3.0)],
            },
            AngularProfile {
                pieces: alloc::vec![piece(-1.0, 0.0, true, false, 0.0, -5.0)],
            },
        ),
        2 => (
            AngularProfile {
                pieces: alloc::vec![
                    piece(third, 1.0, false, true, 4.0 / 3.0, -1.0),
                    piece(0.0, third, false, true, 0.0, 3.0),
                ],
            },
            AngularProfile {
                pieces: alloc::vec![
                    piece(-1.0, -third, true, false, 2.0, 1.0),
                    piece(-third, 0.0, true, false, 0.0, -5.0),
                ],
            },
        ),
        3 => (
            AngularProfile {
                pieces: alloc::vec![
                    piece(third, 1.0, false, true, 3.0, -1.0),
                    piece(0.0, third, false, true, 0.0, 3.0),
                ],
            },
            AngularProfile {
                pieces: alloc::vec![
                    piece(-1.0, -third, true, false, 4.0, 1.0),
                    piece(-third, 0.0, true, false, 0.0, -5.0),
                ],
            },
        ),
        _ => return Err(Error::invalid("case", format!("unknown slab case {case}, expected 1, 2 or 3"))),
    };
    Ok(SlabSpec {
        x_left: 0.0,
        x_right: 1.0,
        sigma_t: Profile1D::Polynomial(alloc::vec![1.0, 0.0, 10.0]),
        sigma_s: Profile1D::Polynomial(alloc::vec![0.5, 0.0, 5.0]),
        source: Profile1D::Polynomial(alloc::vec![1.0, 1.0]),
        left,
        right,
        kernel: ScatteringKernel::ISOTROPIC,
    })
}

fn check_point(sigma_t: f64, sigma_s: f64, x: f64, y: Option<f64>) -> Result<f64> {
    if !(sigma_s >= 0.0 && sigma_t > sigma_s) {
        let at = match y {
            Some(y) => format!("({x}, {y})"),
            None => format!("{x}"),
        };
        return Err(Error::InvalidProblem(format!(
            "need sigma_t > sigma_s >= 0, got sigma_t = {sigma_t}, sigma_s = {sigma_s} at {at}"
        )));
    }
    Ok(sigma_s / sigma_t)
}

/// `lambda = max sigma_S / sigma_T` over the points the slab scheme uses
/// (nodes and midpoints). Fails if `sigma_T > sigma_S >= 0` is violated.
pub fn slab_scattering_ratio<P: SlabProblem + ?Sized>(problem: &P, grid: &SlabGrid) -> Result<f64> {
    let mut lambda: f64 = 0.0;
    let points = (0..=grid.cells)
        .map(|i| grid.node(i))
        .chain((0..grid.cells).map(|i| grid.midpoint(i)));
    for x in points {
        lambda = lambda.max(check_point(problem.sigma_t(x), problem.sigma_s(x), x, None)?);
    }
    Ok(lambda)
}

/// `lambda` over the cell centers of an X-Y grid.
pub fn xy_scattering_ratio<P: XyProblem + ?Sized>(problem: &P, grid: &XyGrid) -> Result<f64> {
    let mut lambda: f64 = 0.0;
    for j in 0..grid.ny {
        let y = grid.y_center(j);
        for i in 0..grid.nx {
            let x = grid.x_center(i);
            lambda = lambda.max(check_point(problem.sigma_t(x, y), problem.sigma_s(x, y), x, Some(y))?);
        }
    }
    Ok(lambda)
}
