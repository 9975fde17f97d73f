// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use randord_core::analysis::fit_order;
use randord_core::ensemble::{l2_error, run_ensemble, EnsembleConfig, GridProblem};
use randord_core::problem::{benchmark_slab_case, discrete_kernel, ScatteringKernel, SlabGrid};
use randord_core::quadrature::{
    gauss_slab, gauss_xy, partition_velocity, sample_rom, uniform_slab, uniform_xy, Cell, Geometry, Quadrature,
};
use randord_core::rng::SampleKey;
use randord_core::slab::sweep_slab;

fn weight_sum(w: &[f64]) -> f64 {
    w.iter().sum()
}

proptest! {
    #[test]
    fn slab_sets_are_normalized_and_symmetric(m in 1usize..200, gauss in any::<bool>()) {
        let q = if gauss { gauss_slab(m.min(80)).unwrap() } else { uniform_slab(m).unwrap() };
        prop_assert!((weight_sum(q.weights()) - 1.0).abs() < 1e-12);
        let n = q.len();
        for l in 0..n {
            prop_assert_eq!(q.nodes()[l], -q.nodes()[n - 1 - l]);
            prop_assert_eq!(q.weights()[l], q.weights()[n - 1 - l]);
        }
        for k in [1, 3, 5] {
            prop_assert!(q.moment(k).abs() < 1e-14);
        }
    }

    #[test]
    fn xy_sets_are_normalized(n in 1usize..14, gauss in any::<bool>()) {
        let q = if gauss { gauss_xy(n).unwrap() } else { uniform_xy(n).unwrap() };
        prop_assert!((weight_sum(q.weights()) - 1.0).abs() < 1e-12);
        let (mut c, mut s) = (0.0, 0.0);
        for (o, w) in q.ordinates().iter().zip(q.weights()) {
            c += w * o.c;
            s += w * o.s;
            prop_assert!(o.c * o.c + o.s * o.s <= 1.0 + 1e-15);
        }
        prop_assert!(c.abs() < 1e-15 && s.abs() < 1e-15);
    }

    #[test]
    fn slab_samples_stay_in_their_cells(half in 1usize..40, seed in any::<u64>(), index in any::<u64>()) {
        let part = partition_velocity(Geometry::Slab, 2 * half, 0.0).unwrap();
        let sample = sample_rom(&part, SampleKey::new(seed, index));
        let Quadrature::Slab(q) = &sample.quadrature else { unreachable!() };
        prop_assert!((weight_sum(q.weights()) - 1.0).abs() < 1e-12);
        for (l, (&mu, cell)) in q.nodes().iter().zip(part.cells()).enumerate() {
            prop_assert!(cell.contains_mu(mu), "ordinate {} = {} outside {:?}", l, mu, cell);
            prop_assert!(mu != 0.0);
            prop_assert_eq!(mu, -q.nodes()[q.len() - 1 - l]);
        }
        for &a in &sample.rescaled_weights {
            prop_assert!((a - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn xy_samples_stay_in_their_cells(level in 1usize..7, seed in any::<u64>(), index in any::<u64>()) {
        let part = partition_velocity(Geometry::Xy, level, 0.0).unwrap();
        let sample = sample_rom(&part, SampleKey::new(seed, index));
        let Quadrature::Xy(q) = &sample.quadrature else { unreachable!() };
        prop_assert_eq!(q.len(), 4 * level * level);
        prop_assert!((weight_sum(q.weights()) - 1.0).abs() < 1e-12);
        for (o, cell) in q.ordinates().iter().zip(part.cells()) {
            prop_assert!(cell.contains_direction(o.zeta, o.theta), "{:?} outside {:?}", o, cell);
        }
    }

    #[test]
    fn kernel_rows_average_to_one(level in 1usize..5, seed in any::<u64>(), g in -1.0f64..=1.0) {
        let part = partition_velocity(Geometry::Xy, level, 0.0).unwrap();
        let sample = sample_rom(&part, SampleKey::new(seed, 0));
        let kernel = discrete_kernel(&sample.quadrature, ScatteringKernel::new(g).unwrap());
        for row in kernel.weighted_row_sums(sample.quadrature.weights()) {
            prop_assert!((row - 1.0).abs() < 1e-12);
        }
        for i in 0..kernel.size() {
            for j in 0..kernel.size() {
                prop_assert!(kernel.get(i, j) >= -1e-15);
                prop_assert_eq!(kernel.get(i, j), kernel.get(j, i));
            }
        }
    }

    #[test]
    fn fit_order_recovers_power_laws(slope in -1.0f64..4.0, scale in 1e-6f64..1e3, h0 in 0.01f64..1.0) {
        let pts: Vec<(f64, f64)> = (0..5).map(|k| {
            let h = h0 / 2f64.powi(k);
            (h, scale * h.powf(slope))
        }).collect();
        let fit = fit_order(&pts).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-10);
        prop_assert!((fit.endpoint_slope - slope).abs() < 1e-10);
    }

    #[test]
    fn l2_error_of_a_shift(values in proptest::collection::vec(-10.0f64..10.0, 1..60), c in -5.0f64..5.0) {
        let shifted: Vec<f64> = values.iter().map(|v| v + c).collect();
        prop_assert!((l2_error(&shifted, &values).unwrap() - c.abs()).abs() < 1e-12);
        prop_assert_eq!(l2_error(&values, &values).unwrap(), 0.0);
    }

    #[test]
    fn diamond_sweeps_balance(
        mu in prop_oneof![-1.0f64..-1e-3, 1e-3f64..1.0],
        sigma in proptest::collection::vec(0.1f64..20.0, 1..40),
        inflow in 0.0f64..5.0,
    ) {
        let cells = sigma.len();
        let dx = 1.0 / cells as f64;
        let emission: Vec<f64> = (0..cells).map(|i| 1.0 + (i as f64 * 0.37).sin()).collect();
        let mut out = vec![0.0; cells + 1];
        sweep_slab(mu, &emission, &sigma, dx, inflow, &mut out).unwrap();
        for i in 0..cells {
            let lhs = mu * (out[i + 1] - out[i]) / dx + sigma[i] * 0.5 * (out[i] + out[i + 1]);
            prop_assert!((lhs - emission[i]).abs() <= 1e-10 * (1.0 + out[i].abs().max(out[i + 1].abs()) * (mu.abs() / dx + sigma[i])));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn ensemble_bias_never_exceeds_error(seed in any::<u64>(), samples in 1usize..12, case in 1u8..=3) {
        let p = benchmark_slab_case(case).unwrap();
        let gp = GridProblem::Slab { problem: &p, grid: SlabGrid::new(0.0, 1.0, 12).unwrap() };
        let reference = gp.solve(&Quadrature::Slab(uniform_slab(32).unwrap()), &Default::default()).unwrap().0;
        let part = partition_velocity(Geometry::Slab, 4, 0.0).unwrap();
        let (res, m) = run_ensemble(&gp, &part, &EnsembleConfig::new(samples, seed), &reference).unwrap();
        prop_assert!(m.bias <= m.error + 1e-12 * (1.0 + m.error));
        prop_assert!(res.m2.iter().all(|&v| v >= 0.0));
    }
}

/// The random quadrature is unbiased: its expected action on a smooth test
/// function equals the normalized integral. Checked at three standard errors.
#[test]
fn random_quadrature_is_unbiased() {
    let f = |mu: f64| (1.3 * mu).exp() + mu * mu;
    // (1/2) int_{-1}^{1} f
    let exact = (1.3f64.exp() - (-1.3f64).exp()) / (2.0 * 1.3) + 1.0 / 3.0;
    for n in [2, 6, 16] {
        let part = partition_velocity(Geometry::Slab, n, 0.0).unwrap();
        let draws: Vec<f64> = (0..4000)
            .map(|i| {
                let s = sample_rom(&part, SampleKey::new(99, i));
                let Quadrature::Slab(q) = &s.quadrature else { unreachable!() };
                q.nodes().iter().zip(q.weights()).map(|(&m, &w)| w * f(m)).sum()
            })
            .collect();
        let t = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / t;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (t - 1.0);
        let se = (var / t).sqrt();
        assert!((mean - exact).abs() <= 3.0 * se + 1e-15, "n = {n}: {mean} vs {exact} (se {se})");
    }

    // Same in X-Y geometry for a function of (zeta, theta).
    let g = |zeta: f64, theta: f64| zeta * zeta + theta.cos().powi(2);
    // (1 / 2 pi) int_{-1}^{1} int_0^{2 pi}, using the four quadrant images
    // of the upper hemisphere: mean of zeta^2 over [0,1] is 1/3, of cos^2 is 1/2.
    let exact = 1.0 / 3.0 + 0.5;
    for level in [1, 2] {
        let part = partition_velocity(Geometry::Xy, level, 0.0).unwrap();
        let draws: Vec<f64> = (0..4000)
            .map(|i| {
                let s = sample_rom(&part, SampleKey::new(5, i));
                let Quadrature::Xy(q) = &s.quadrature else { unreachable!() };
                q.ordinates().iter().zip(q.weights()).map(|(o, &w)| w * g(o.zeta, o.theta)).sum()
            })
            .collect();
        let t = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / t;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (t - 1.0);
        let se = (var / t).sqrt();
        assert!((mean - exact).abs() <= 3.0 * se + 1e-15, "N = {level}: {mean} vs {exact} (se {se})");
    }
}

#[test]
fn partition_cells_tile_the_velocity_space() {
    for n in [2, 4, 10] {
        let part = partition_velocity(Geometry::Slab, n, 0.0).unwrap();
        let total: f64 = part.measures().iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        for w in part.cells().windows(2) {
            let (Cell::Interval { hi, .. }, Cell::Interval { lo, .. }) = (w[0], w[1]) else { unreachable!() };
            assert!(hi <= lo);
        }
    }
    let part = partition_velocity(Geometry::Xy, 3, 0.0).unwrap();
    let total: f64 = part.measures().iter().sum();
    assert!((total - 2.0 * std::f64::consts::PI).abs() < 1e-12);
}
