// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

use randord_core::analysis::fit_order;
use randord_core::ensemble::l2_error;
use randord_core::problem::{ExponentialXy, Rect, XyGrid};
use randord_core::quadrature::gauss_xy;
use randord_core::slab::SolverOptions;
use randord_core::xy::source_iteration_xy;

#[test]
fn diamond_difference_is_second_order_in_space() {
    let problem = ExponentialXy {
        sigma_t: 1.0,
        sigma_s: 0.5,
    };
    let q = gauss_xy(2).unwrap();
    let mut points = Vec::new();
    for n in [25, 50, 100, 200] {
        let grid = XyGrid::new(Rect::UNIT, n, n).unwrap();
        let sol = source_iteration_xy(&problem, &grid, &q, &SolverOptions::default()).unwrap();
        let exact: Vec<f64> = (0..n)
            .flat_map(|j| (0..n).map(move |i| (i, j)))
            .map(|(i, j)| problem.exact(grid.x_center(i), grid.y_center(j)))
            .collect();
        points.push((1.0 / n as f64, l2_error(&sol.scalar.values, &exact).unwrap()));
    }
    let fit = fit_order(&points).unwrap();
    assert!((fit.slope - 2.0).abs() < 0.1, "{points:?} -> {}", fit.slope);
}
