// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

//! Ordinate sets for slab and X-Y geometry.
//!
//! All weights are normalized to sum to one, so the discrete scattering
//! term is a weighted *average* over the ordinates. This holds for the
//! deterministic sets (uniform midpoint, Gauss-Legendre, level-symmetric
//! Gaussian in 2D) and for random ordinate samples, whose weights are the
//! cell measures divided by the measure of the velocity space.
//!
//! Slab sets are stored in ascending order of the direction cosine: the
//! `M` negative nodes first, then their mirror images. X-Y sets are stored
//! quadrant by quadrant; quadrant `k` holds the images of the first
//! quadrant under `theta -> pi - theta`, `pi + theta` and `2 pi - theta`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::rng::SampleKey;
use crate::{Error, Result};

const ROOT_RESIDUAL: f64 = 1e-14;
const MAX_NEWTON_STEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    Uniform,
    Gauss,
    RomSample,
}

/// Direction cosines and weights for slab geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    half_count: usize,
    kind: QuadratureKind,
}

impl SlabQuadrature {
    /// Builds a symmetric set from the positive half, given in ascending
    /// order. Negative nodes are exact negations.
    fn from_positive_half(positive: &[(f64, f64)], kind: QuadratureKind) -> Self {
        let half = positive.len();
        let mut nodes = Vec::with_capacity(2 * half);
        let mut weights = Vec::with_capacity(2 * half);
        for &(mu, w) in positive.iter().rev() {
            nodes.push(-mu);
            weights.push(w);
        }
        for &(mu, w) in positive {
            nodes.push(mu);
            weights.push(w);
        }
        Self {
            nodes,
            weights,
            half_count: half,
            kind,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes per half interval (`M`).
    pub fn half_count(&self) -> usize {
        self.half_count
    }

    pub fn kind(&self) -> QuadratureKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_l w_l mu_l^k`.
    pub fn moment(&self, k: i32) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&mu, &w)| w * libm::pow(mu, k as f64))
            .sum()
    }
}

/// Midpoint rule on `2M` equal cells of `[-1, 1]`.
pub fn uniform_slab(m: usize) -> Result<SlabQuadrature> {
    if m == 0 {
        return Err(Error::invalid("M", "need at least one node per half interval"));
    }
    let w = 1.0 / (2 * m) as f64;
    let positive: Vec<_> = (1..=m)
        .map(|k| ((2 * k - 1) as f64 / (2 * m) as f64, w))
        .collect();
    Ok(SlabQuadrature::from_positive_half(&positive, QuadratureKind::Uniform))
}

/// Gauss-Legendre rule of degree `2M`, weights halved so they sum to one.
pub fn gauss_slab(m: usize) -> Result<SlabQuadrature> {
    if m == 0 {
        return Err(Error::invalid("M", "need at least one node per half interval"));
    }
    let mut positive: Vec<_> = legendre_positive_roots(2 * m)?
        .into_iter()
        .map(|r| (r.x, 0.5 * r.weight()))
        .collect();
    positive.reverse();
    Ok(SlabQuadrature::from_positive_half(&positive, QuadratureKind::Gauss))
}

/// A positive root of `P_n` with the derivative `P_n'` there.
#[derive(Debug, Clone, Copy)]
pub struct LegendreRoot {
    pub x: f64,
    pub derivative: f64,
}

impl LegendreRoot {
    /// Standard Gauss-Legendre weight on `[-1, 1]` (the weights sum to 2).
    pub fn weight(&self) -> f64 {
        2.0 / ((1.0 - self.x * self.x) * self.derivative * self.derivative)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    // Derivative from P_n and P_{n-1}; x is never +-1 at a root.
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Positive roots of `P_n` in descending order, found by Newton iteration
/// from the asymptotic guesses `cos(pi (k - 1/4) / (n + 1/2))`.
pub fn legendre_positive_roots(n: usize) -> Result<Vec<LegendreRoot>> {
    let count = n / 2;
    let mut roots = Vec::with_capacity(count);
    for k in 1..=count {
        let mut x = libm::cos(PI * (k as f64 - 0.25) / (n as f64 + 0.5));
        let mut converged = false;
        for _ in 0..MAX_NEWTON_STEPS {
            let (p, dp) = legendre(n, x);
            let step = p / dp;
            x -= step;
            if libm::fabs(p) < ROOT_RESIDUAL || libm::fabs(step) <= 4.0 * f64::EPSILON * libm::fabs(x)
            {
                converged = true;
                break;
            }
        }
        if !converged || !(x > 0.0 && x < 1.0) {
            return Err(Error::RootFinding { degree: n });
        }
        let (_, derivative) = legendre(n, x);
        roots.push(LegendreRoot { x, derivative });
    }
    Ok(roots)
}

/// One direction of an X-Y set: the polar coordinate `zeta`, the azimuth
/// `theta` and the in-plane components `(c, s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ordinate {
    pub zeta: f64,
    pub theta: f64,
    pub c: f64,
    pub s: f64,
}

impl Ordinate {
    pub fn new(zeta: f64, theta: f64) -> Self {
        let r = libm::sqrt(1.0 - zeta * zeta);
        Self {
            zeta,
            theta,
            c: r * libm::cos(theta),
            s: r * libm::sin(theta),
        }
    }

    /// Image in quadrant `q` (0..4). The in-plane components are mirrored
    /// by sign flips so images are exact.
    pub fn quadrant_image(&self, q: usize) -> Self {
        let (theta, c, s) = match q {
            0 => (self.theta, self.c, self.s),
            1 => (PI - self.theta, -self.c, self.s),
            2 => (PI + self.theta, -self.c, -self.s),
            3 => (2.0 * PI - self.theta, self.c, -self.s),
            _ => panic!("quadrant index {q} out of range"),
        };
        Self {
            zeta: self.zeta,
            theta,
            c,
            s,
        }
    }
}

/// Ordinates and weights for X-Y geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct XyQuadrature {
    ordinates: Vec<Ordinate>,
    weights: Vec<f64>,
    per_quadrant: usize,
    level: usize,
    kind: QuadratureKind,
}

impl XyQuadrature {
    fn from_first_quadrant(
        first: &[(Ordinate, f64)],
        level: usize,
        kind: QuadratureKind,
    ) -> Self {
        let mut ordinates = Vec::with_capacity(4 * first.len());
        let mut weights = Vec::with_capacity(4 * first.len());
        for q in 0..4 {
            for (o, w) in first {
                ordinates.push(o.quadrant_image(q));
                weights.push(*w);
            }
        }
        Self {
            ordinates,
            weights,
            per_quadrant: first.len(),
            level,
            kind,
        }
    }

    pub fn ordinates(&self) -> &[Ordinate] {
        &self.ordinates
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Ordinates per quadrant (`M`).
    pub fn per_quadrant(&self) -> usize {
        self.per_quadrant
    }

    /// The level parameter `N` the set was built from.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn kind(&self) -> QuadratureKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }
}

/// `N x N` nodes per quadrant at the centers of a uniform `(zeta, theta)`
/// grid, each with weight `1 / (4 N^2)`.
pub fn uniform_xy(n: usize) -> Result<XyQuadrature> {
    if n == 0 {
        return Err(Error::invalid("N", "level must be positive"));
    }
    let nf = n as f64;
    let w = 1.0 / (4.0 * nf * nf);
    let mut first = Vec::with_capacity(n * n);
    for i in 1..=n {
        let zeta = (2 * n - 2 * i + 1) as f64 / (2.0 * nf);
        for j in 1..=n {
            let theta = (2 * j - 1) as f64 * PI / (4.0 * nf);
            first.push((Ordinate::new(zeta, theta), w));
        }
    }
    Ok(XyQuadrature::from_first_quadrant(&first, n, QuadratureKind::Uniform))
}

/// Triangular Gaussian set: `zeta_i` runs over the positive roots of
/// `P_{2N}` (descending) and carries `i` equally spaced azimuths.
pub fn gauss_xy(n: usize) -> Result<XyQuadrature> {
    if n == 0 {
        return Err(Error::invalid("N", "level must be positive"));
    }
    let roots = legendre_positive_roots(2 * n)?;
    let mut first = Vec::with_capacity(n * (n + 1) / 2);
    for (idx, root) in roots.iter().enumerate() {
        let i = idx + 1;
        let zeta = root.x;
        let w = 1.0
            / (2.0 * i as f64 * (1.0 - zeta * zeta) * root.derivative * root.derivative);
        for j in 1..=i {
            let theta = (2 * j - 1) as f64 * PI / (4 * i) as f64;
            first.push((Ordinate::new(zeta, theta), w));
        }
    }
    Ok(XyQuadrature::from_first_quadrant(&first, n, QuadratureKind::Gauss))
}

/// Either kind of ordinate set.
#[derive(Debug, Clone, PartialEq)]
pub enum Quadrature {
    Slab(SlabQuadrature),
    Xy(XyQuadrature),
}

impl Quadrature {
    pub fn weights(&self) -> &[f64] {
        match self {
            Quadrature::Slab(q) => q.weights(),
            Quadrature::Xy(q) => q.weights(),
        }
    }

    pub fn len(&self) -> usize {
        self.weights().len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights().is_empty()
    }

    pub fn kind(&self) -> QuadratureKind {
        match self {
            Quadrature::Slab(q) => q.kind(),
            Quadrature::Xy(q) => q.kind(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Slab,
    Xy,
}

/// One cell of a velocity partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    /// `[lo, hi]` in the direction cosine.
    Interval { lo: f64, hi: f64 },
    /// Rectangle in the `(zeta, theta)` plane.
    Patch {
        zeta_lo: f64,
        zeta_hi: f64,
        theta_lo: f64,
        theta_hi: f64,
    },
}

impl Cell {
    /// Measure in the cell's own coordinates (`d mu` or `d zeta d theta`,
    /// the latter being solid angle on the sphere).
    pub fn measure(&self) -> f64 {
        match *self {
            Cell::Interval { lo, hi } => hi - lo,
            Cell::Patch {
                zeta_lo,
                zeta_hi,
                theta_lo,
                theta_hi,
            } => (zeta_hi - zeta_lo) * (theta_hi - theta_lo),
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            Cell::Interval { lo, hi } => hi - lo,
            Cell::Patch {
                zeta_lo,
                zeta_hi,
                theta_lo,
                theta_hi,
            } => libm::hypot(zeta_hi - zeta_lo, theta_hi - theta_lo),
        }
    }

    pub fn contains_mu(&self, mu: f64) -> bool {
        matches!(*self, Cell::Interval { lo, hi } if lo <= mu && mu <= hi)
    }

    pub fn contains_direction(&self, zeta: f64, theta: f64) -> bool {
        matches!(*self, Cell::Patch { zeta_lo, zeta_hi, theta_lo, theta_hi }
            if zeta_lo <= zeta && zeta <= zeta_hi && theta_lo <= theta && theta <= theta_hi)
    }
}

/// Cells from which random ordinates are drawn. Cell `l` generates
/// ordinate `l` of every sample; only the first `independent` cells are
/// sampled, the rest are symmetry images.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityPartition {
    cells: Vec<Cell>,
    measures: Vec<f64>,
    diameters: Vec<f64>,
    geometry: Geometry,
    independent: usize,
    total_measure: f64,
    truncation: f64,
    level: usize,
}

impl VelocityPartition {
    fn new(cells: Vec<Cell>, geometry: Geometry, independent: usize, truncation: f64, level: usize) -> Self {
        let measures: Vec<f64> = cells.iter().map(Cell::measure).collect();
        let diameters = cells.iter().map(Cell::diameter).collect();
        let total_measure = match geometry {
            Geometry::Slab => 2.0 * (1.0 - truncation),
            Geometry::Xy => 2.0 * PI,
        };
        Self {
            cells,
            measures,
            diameters,
            geometry,
            independent,
            total_measure,
            truncation,
            level,
        }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn diameters(&self) -> &[f64] {
        &self.diameters
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// Number of independently sampled cells (`m`).
    pub fn independent(&self) -> usize {
        self.independent
    }

    /// Total cell count (`n`).
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `|S|` (or `|S^delta|` for a truncated slab partition).
    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    /// Largest cell measure.
    pub fn max_measure(&self) -> f64 {
        self.measures.iter().copied().fold(0.0, f64::max)
    }

    /// The resolution the partition was built from: `n` for slab
    /// partitions, `N` for X-Y partitions.
    pub fn level(&self) -> usize {
        self.level
    }
}

/// Uniform partition of the velocity space.
///
/// Slab: `n` (even) equal cells over `[-1, -delta) U (delta, 1]`.
/// X-Y: `N x N` equal `(zeta, theta)` rectangles in the first quadrant,
/// mirrored into the other three (`n = 4 N^2`). Truncation applies only to
/// slab partitions.
pub fn partition_velocity(geometry: Geometry, resolution: usize, delta: f64) -> Result<VelocityPartition> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::invalid("delta", "truncation must lie in [0, 1)"));
    }
    match geometry {
        Geometry::Slab => {
            if resolution == 0 || resolution % 2 != 0 {
                return Err(Error::invalid("n", "slab partitions need a positive even cell count"));
            }
            let m = resolution / 2;
            let width = (1.0 - delta) / m as f64;
            let negative: Vec<Cell> = (0..m)
                .map(|l| {
                    let lo = -1.0 + l as f64 * width;
                    let hi = if l + 1 == m { -delta } else { -1.0 + (l + 1) as f64 * width };
                    Cell::Interval { lo, hi }
                })
                .collect();
            let mut cells = negative.clone();
            for cell in negative.iter().rev() {
                if let Cell::Interval { lo, hi } = *cell {
                    cells.push(Cell::Interval { lo: -hi, hi: -lo });
                }
            }
            Ok(VelocityPartition::new(cells, Geometry::Slab, m, delta, resolution))
        }
        Geometry::Xy => {
            if resolution == 0 {
                return Err(Error::invalid("N", "level must be positive"));
            }
            if delta != 0.0 {
                return Err(Error::invalid("delta", "truncation is only defined for slab partitions"));
            }
            let n = resolution;
            let nf = n as f64;
            let dtheta = FRAC_PI_2 / nf;
            let mut first = Vec::with_capacity(n * n);
            for i in 1..=n {
                let zeta_lo = (n - i) as f64 / nf;
                let zeta_hi = (n - i + 1) as f64 / nf;
                for j in 1..=n {
                    first.push(((zeta_lo, zeta_hi), ((j - 1) as f64 * dtheta, j as f64 * dtheta)));
                }
            }
            let mut cells = Vec::with_capacity(4 * first.len());
            for q in 0..4 {
                for &((zeta_lo, zeta_hi), (t0, t1)) in &first {
                    let (theta_lo, theta_hi) = match q {
                        0 => (t0, t1),
                        1 => (PI - t1, PI - t0),
                        2 => (PI + t0, PI + t1),
                        _ => (2.0 * PI - t1, 2.0 * PI - t0),
                    };
                    cells.push(Cell::Patch {
                        zeta_lo,
                        zeta_hi,
                        theta_lo,
                        theta_hi,
                    });
                }
            }
            Ok(VelocityPartition::new(cells, Geometry::Xy, n * n, 0.0, n))
        }
    }
}

/// One draw of random ordinates from a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct RomSample {
    pub quadrature: Quadrature,
    pub key: SampleKey,
    /// `alpha_l = n * w_l`; all of order one.
    pub rescaled_weights: Vec<f64>,
}

/// `lo + (hi - lo) u`, kept inside `[lo, hi]` against rounding.
fn draw(lo: f64, hi: f64, u: f64) -> f64 {
    (lo + (hi - lo) * u).clamp(lo, hi)
}

/// Draws one ordinate uniformly from every independent cell and completes
/// the set by symmetry. Pure in `(partition, key)`.
pub fn sample_rom(partition: &VelocityPartition, key: impl Into<SampleKey>) -> RomSample {
    let key = key.into();
    let mut stream = key.stream();
    let n = partition.len();
    let m = partition.independent();
    let weights: Vec<f64> = partition
        .measures()
        .iter()
        .map(|&measure| measure / partition.total_measure())
        .collect();

    let quadrature = match partition.geometry() {
        Geometry::Slab => {
            let mut positive = Vec::with_capacity(m);
            for (l, cell) in partition.cells()[..m].iter().enumerate() {
                let Cell::Interval { lo, hi } = *cell else {
                    unreachable!("slab partitions hold intervals")
                };
                let [u, _] = stream.cell_uniforms(l);
                let mut mu = draw(lo, hi, u);
                if mu == 0.0 {
                    // Only reachable through rounding at the hi = 0 edge.
                    mu = -f64::EPSILON * (hi - lo);
                }
                // Ordinate m + l mirrors ordinate m - 1 - l, so the mirrored
                // half is this list reversed and negated.
                positive.push((-mu, weights[l]));
            }
            positive.reverse();
            let mut q = SlabQuadrature::from_positive_half(&positive, QuadratureKind::RomSample);
            // Weights come straight from the cell measures.
            q.weights.copy_from_slice(&weights);
            Quadrature::Slab(q)
        }
        Geometry::Xy => {
            let mut first = Vec::with_capacity(m);
            for (l, cell) in partition.cells()[..m].iter().enumerate() {
                let Cell::Patch {
                    zeta_lo,
                    zeta_hi,
                    theta_lo,
                    theta_hi,
                } = *cell
                else {
                    unreachable!("x-y partitions hold patches")
                };
                let [u, v] = stream.cell_uniforms(l);
                let zeta = draw(zeta_lo, zeta_hi, u);
                let theta = draw(theta_lo, theta_hi, v);
                first.push((Ordinate::new(zeta, theta), weights[l]));
            }
            let mut q = XyQuadrature::from_first_quadrant(&first, partition.level(), QuadratureKind::RomSample);
            q.weights.copy_from_slice(&weights);
            Quadrature::Xy(q)
        }
    };
    let rescaled_weights = weights.iter().map(|w| n as f64 * w).collect();
    RomSample {
        quadrature,
        key,
        rescaled_weights,
    }
}
