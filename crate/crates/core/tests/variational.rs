mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::*;
use finsler_core::profiles::{inverse_distance, shell_bump};
use finsler_core::variational::{
    capacity_estimate, condenser_capacity, dirichlet_energy, minimize_rayleigh, poincare_constant_probe, rayleigh_quotient,
    sharpness_probe, CapacityOptions, StepRule,
};
use finsler_core::{build_domain, Direction, DomainDescriptor, DomainMask, Error, Grid, ScalarField, TestFunctionBattery};

fn punctured_unit_ball(h: f64) -> (Arc<Grid>, DomainMask) {
    let grid = Arc::new(Grid::cube(3, 1.125, h).unwrap());
    let mask = build_domain(&DomainDescriptor::punctured_ball_with_excision(1.0, 0.0), &grid, None).unwrap();
    (grid, mask)
}

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

/// `1/4 + ∫η_t² dt / ∫η² dt` with `t = log r`: the quotient of `r^{-1/2} η`
/// against `ρ = 1/r` in three dimensions.
fn log_variable_oracle(w: f64, outer: f64, h: f64) -> f64 {
    let (o0, o1) = (0.5 * outer, outer - 2.0 * h);
    let eta = |r: f64| smoothstep((r / w).log2()) * (1.0 - smoothstep((r - o0) / (o1 - o0)));
    let eta_t = |t: f64| {
        let e = 1e-6;
        (eta((t + e).exp()) - eta((t - e).exp())) / (2.0 * e)
    };
    let (a, b) = (w.ln(), o1.ln());
    let num = simpson(|t| eta_t(t).powi(2), a, b, 20_000);
    let den = simpson(|t| eta(t.exp()).powi(2), a, b, 20_000);
    0.25 + num / den
}

#[test]
fn rayleigh_quotient_is_scale_invariant() {
    let (grid, mask) = punctured_unit_ball(1.0 / 16.0);
    let (m, _) = euclid(3);
    let rho = inverse_distance(&m, &grid, Direction::Forward).unwrap();
    let u = shell_bump(&m, &grid, 0.2, 0.8).unwrap();
    let q = rayleigh_quotient(&m, &u, &rho, &mask).unwrap();
    for c in [0.01, 3.0, -7.5] {
        let qc = rayleigh_quotient(&m, &u.scaled(c), &rho, &mask).unwrap();
        assert!((qc - q).abs() <= 1e-12 * q);
    }
}

#[test]
fn far_bump_has_a_large_quotient() {
    let (grid, mask) = punctured_unit_ball(1.0 / 16.0);
    let (m, _) = euclid(3);
    let rho = inverse_distance(&m, &grid, Direction::Forward).unwrap();
    let battery = TestFunctionBattery::from_bumps(&mask, vec![(vec![0.55, 0.0, 0.0], 0.25)]).unwrap();
    let q = rayleigh_quotient(&m, &battery.member_field(0), &rho, &mask).unwrap();
    assert!(q > 2.0, "{q}");
}

#[test]
fn rayleigh_quotient_zero_denominator() {
    let (grid, mask) = punctured_unit_ball(1.0 / 8.0);
    let (m, _) = euclid(3);
    let rho = inverse_distance(&m, &grid, Direction::Forward).unwrap();
    let z = ScalarField::zeros(grid.clone());
    assert!(matches!(rayleigh_quotient(&m, &z, &rho, &mask), Err(Error::ZeroDenominator)));
}

#[test]
fn sharpness_probe_matches_the_log_variable_oracle() {
    let h = 1.0 / 32.0;
    let (grid, mask) = punctured_unit_ball(h);
    let (m, _) = euclid(3);
    let rho = inverse_distance(&m, &grid, Direction::Forward).unwrap();
    let widths = [0.2, 0.1, 0.05];
    let seq = sharpness_probe(&m, &rho, &mask, &widths).unwrap();
    assert_eq!(seq.len(), 3);
    assert!(seq.windows(2).all(|w| w[1] < w[0]), "{seq:?}");
    for (q, w) in seq.iter().zip(widths) {
        let oracle = log_variable_oracle(w, 1.0, h);
        assert!((q / oracle - 1.0).abs() < 0.03, "w={w}: {q} vs {oracle}");
        assert!(*q > 0.25);
    }
    let one = sharpness_probe(&m, &rho, &mask, &[0.1]).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0], seq[1]);
}

#[test]
fn sharpness_probe_errors() {
    let (grid, mask) = punctured_unit_ball(1.0 / 8.0);
    let (m, _) = euclid(3);
    let one = ScalarField::constant(grid.clone(), 1.0);
    assert!(matches!(sharpness_probe(&m, &one, &mask, &[0.1]), Err(Error::ZeroDenominator)));
    let rho = inverse_distance(&m, &grid, Direction::Forward).unwrap();
    assert!(matches!(sharpness_probe(&m, &rho, &mask, &[0.3]), Err(Error::DomainMismatch(_))));
    let annulus = build_domain(&DomainDescriptor::annulus(0.2, 1.0), &grid, None).unwrap();
    assert!(matches!(sharpness_probe(&m, &rho, &annulus, &[0.1]), Err(Error::DomainMismatch(_))));
}

#[test]
fn minimize_rayleigh_descends_and_respects_the_floor() {
    let (grid, mask) = punctured_unit_ball(1.0 / 12.0);
    let (m, _) = euclid(3);
    let rho = inverse_distance(&m, &grid, Direction::Forward).unwrap();
    let init = shell_bump(&m, &grid, 0.2, 0.8).unwrap();
    for rule in [StepRule::ConjugateGradient, StepRule::SteepestDescent] {
        let res = minimize_rayleigh(&m, &rho, &mask, &init, 150, rule).unwrap();
        assert!(res.trace.windows(2).all(|w| w[1] <= w[0]), "{rule:?}");
        assert_eq!(res.trace.last().copied(), Some(res.estimate));
        assert!(res.estimate >= 0.25 - 1e-9);
        assert!(res.estimate < res.trace[0]);
        let start = rayleigh_quotient(&m, &init, &rho, &mask).unwrap();
        assert!(res.estimate < start);
    }
}

#[test]
fn minimize_rayleigh_errors() {
    let (grid, mask) = punctured_unit_ball(1.0 / 8.0);
    let (m, _) = euclid(3);
    let rho = inverse_distance(&m, &grid, Direction::Forward).unwrap();
    let z = ScalarField::zeros(grid.clone());
    assert!(matches!(
        minimize_rayleigh(&m, &rho, &mask, &z, 10, StepRule::default()),
        Err(Error::ZeroDenominator)
    ));
    let other = Arc::new(Grid::cube(3, 1.125, 1.0 / 4.0).unwrap());
    let init = shell_bump(&m, &other, 0.2, 0.8).unwrap();
    assert!(matches!(
        minimize_rayleigh(&m, &rho, &mask, &init, 10, StepRule::default()),
        Err(Error::GridMismatch)
    ));
}

#[test]
fn capacity_is_monotone_in_k() {
    let (m, _) = euclid(3);
    let h = 1.0 / 8.0;
    let (small, _) = condenser_capacity(&m, &DomainDescriptor::ball(0.5), 2.0, h, 20_000, 1e-11).unwrap();
    let (large, _) = condenser_capacity(&m, &DomainDescriptor::ball(1.0), 2.0, h, 20_000, 1e-11).unwrap();
    assert!(small.value <= large.value + 1e-9);
}

#[test]
fn condenser_beats_the_analytic_potential() {
    let (m, _) = euclid(3);
    let (r_out, h) = (2.0, 1.0 / 8.0);
    let (est, field) = condenser_capacity(&m, &DomainDescriptor::ball(1.0), r_out, h, 20_000, 1e-11).unwrap();
    assert!(est.converged);
    let grid = field.grid().clone();
    let k = build_domain(&DomainDescriptor::ball(1.0), &grid, None).unwrap();
    let potential = ScalarField::from_values(
        grid.clone(),
        (0..grid.len())
            .map(|i| {
                let r = radius(&grid.center_vec(i));
                if k.contains(i) {
                    1.0
                } else if r < r_out {
                    ((r_out / r - 1.0) / (r_out - 1.0)).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect(),
    )
    .unwrap();
    let oracle = dirichlet_energy(&m, &potential).unwrap();
    assert!(est.value <= oracle + 1e-9, "{} vs {oracle}", est.value);
    assert!((dirichlet_energy(&m, &field).unwrap() - est.value).abs() <= 1e-9 * est.value);
    for &v in field.values() {
        assert!((0.0..=1.0).contains(&v));
    }
    // 4π R/(R − 1)
    assert!((est.value / (8.0 * PI) - 1.0).abs() < 0.1);
}

#[test]
fn capacity_refinement_is_stable_in_the_plane() {
    let (m, _) = euclid(2);
    let k = DomainDescriptor::ball(1.0);
    let coarse = capacity_estimate(&m, &k, &[4.0], &CapacityOptions::with_spacing(vec![1.0 / 8.0])).unwrap();
    let fine = capacity_estimate(&m, &k, &[4.0], &CapacityOptions::with_spacing(vec![1.0 / 16.0])).unwrap();
    let (a, b) = (coarse.estimate, fine.estimate);
    assert!((a / b - 1.0).abs() < 0.05, "{a} vs {b}");
    let exact = 2.0 * PI / 4f64.ln();
    assert!((b / exact - 1.0).abs() < 0.05);
}

#[test]
fn capacity_sequence_is_sorted_and_monotone() {
    let (m, _) = euclid(2);
    let res = capacity_estimate(
        &m,
        &DomainDescriptor::ball(1.0),
        &[8.0, 2.0, 4.0],
        &CapacityOptions::with_spacing(vec![1.0 / 4.0]),
    )
    .unwrap();
    let radii: Vec<f64> = res.per_radius.iter().map(|e| e.outer_radius).collect();
    assert_eq!(radii, vec![2.0, 4.0, 8.0]);
    assert!(res.monotone);
    assert_eq!(res.estimate, res.per_radius[2].value);
}

#[test]
fn degenerate_k_is_rejected() {
    let (m, _) = euclid(3);
    let opts = CapacityOptions::with_spacing(vec![0.25]);
    assert!(matches!(
        capacity_estimate(&m, &DomainDescriptor::ball(0.01), &[2.0], &opts),
        Err(Error::DegenerateK)
    ));
    assert!(matches!(
        capacity_estimate(&m, &DomainDescriptor::ball(3.0), &[2.0], &opts),
        Err(Error::DegenerateK)
    ));
    assert!(matches!(capacity_estimate(&m, &DomainDescriptor::ball(1.0), &[], &opts), Err(Error::DegenerateK)));
    assert!(matches!(
        capacity_estimate(&m, &DomainDescriptor::ball(1.0), &[2.0, 3.0, 4.0], &CapacityOptions::with_spacing(vec![0.25, 0.25])),
        Err(Error::InvalidGrid(_))
    ));
}

fn unit_cube(h: f64) -> (Arc<Grid>, DomainMask) {
    let k = (1.0 / h).round() as usize;
    let grid = Arc::new(Grid::new(vec![0.0; 3], vec![1.0; 3], vec![k; 3]).unwrap());
    let mask = build_domain(&DomainDescriptor::Box, &grid, None).unwrap();
    (grid, mask)
}

#[test]
fn poincare_probe_reaches_the_neumann_eigenvalue() {
    let (grid, mask) = unit_cube(1.0 / 24.0);
    let (m, _) = euclid(3);
    let cos = ScalarField::from_fn(grid.clone(), |x| (PI * x[0]).cos());
    let c = poincare_constant_probe(&m, &mask, &[cos]).unwrap();
    assert!(c >= 1.0 / PI - 1e-3, "{c}");
    assert!(c < 1.0 / PI * 1.05);
}

#[test]
fn poincare_probe_battery_behaviour() {
    let (grid, mask) = unit_cube(1.0 / 12.0);
    let (m, _) = randers(3, 0.5);
    let bumps = TestFunctionBattery::from_bumps(&mask, vec![(vec![0.5; 3], 0.3), (vec![0.4, 0.5, 0.6], 0.2)]).unwrap();
    let plus = |k: usize| {
        let v: Vec<f64> = bumps.member_field(k).values().iter().map(|v| v + 2.0).collect();
        ScalarField::from_values(grid.clone(), v).unwrap()
    };
    let first = poincare_constant_probe(&m, &mask, &[plus(0)]).unwrap();
    assert!(first.is_finite() && first > 0.0);
    let both = poincare_constant_probe(&m, &mask, &[plus(0), plus(1)]).unwrap();
    assert!(both >= first);
    let constant = ScalarField::constant(grid.clone(), 3.0);
    assert!(matches!(
        poincare_constant_probe(&m, &mask, &[plus(0), constant]),
        Err(Error::ConstantField { member: 1 })
    ));
    assert!(matches!(poincare_constant_probe(&m, &mask, &[]), Err(Error::UnsupportedPhi(_))));
}
