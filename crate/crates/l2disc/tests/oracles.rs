//! Independent-oracle checks that back the closed forms: breakpoint-aware
//! Gauss quadrature for every Haar-side integral, and reordered summation
//! for the tail series.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use l2disc::{bounds, census, discrepancy, haar, pointset, Point2, PointSet};

#[test]
fn xy_integral_matches_quadrature() {
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    for _ in 0..40 {
        let level = rng.gen_range(0..=4u32);
        let j1 = rng.gen_range(0..=level);
        let j2 = level - j1;
        let m1 = rng.gen_range(0..1u64 << j1);
        let m2 = rng.gen_range(0..1u64 << j2);
        let shape = haar::DyadicShape::new(j1 as i32, j2 as i32).unwrap();
        let closed = haar::xy_haar_integral(&shape).unwrap();
        let quad = common::quad_against_haar(
            &|x, y| x * y,
            &[],
            &[],
            j1 as i32,
            j2 as i32,
            m1,
            m2,
        );
        assert!(
            (closed - quad).abs() < 1e-10,
            "shape ({},{}), m ({},{}): {} vs {}",
            j1,
            j2,
            m1,
            m2,
            closed,
            quad
        );
    }
}

#[test]
fn corner_indicator_vanishes_outside_box() {
    // for z outside the box, the integral of the corner indicator against
    // the Haar function is 0
    let mut rng = ChaCha12Rng::seed_from_u64(12);
    let mut checked = 0;
    while checked < 60 {
        let level = rng.gen_range(0..=4u32);
        let j1 = rng.gen_range(0..=level);
        let j2 = level - j1;
        let m1 = rng.gen_range(0..1u64 << j1);
        let m2 = rng.gen_range(0..1u64 << j2);
        let bx = haar::DyadicBox::new(j1, j2, m1, m2).unwrap();
        let z = Point2::from_f64(rng.gen(), rng.gen()).unwrap();
        if bx.contains(&z) {
            continue;
        }
        let (zx, zy) = z.xy_f64();
        let indicator = move |x: f64, y: f64| {
            if x >= zx && y >= zy {
                1.0
            } else {
                0.0
            }
        };
        let quad =
            common::quad_against_haar(&indicator, &[zx], &[zy], j1 as i32, j2 as i32, m1, m2);
        assert!(
            quad.abs() < 1e-10,
            "z = ({}, {}), {}: integral {}",
            zx,
            zy,
            bx,
            quad
        );
        checked += 1;
    }
}

#[test]
fn point_term_matches_quadrature() {
    let mut rng = ChaCha12Rng::seed_from_u64(13);
    for _ in 0..60 {
        let level = rng.gen_range(0..=4u32);
        let j1 = rng.gen_range(0..=level);
        let j2 = level - j1;
        let m1 = rng.gen_range(0..1u64 << j1);
        let m2 = rng.gen_range(0..1u64 << j2);
        let bx = haar::DyadicBox::new(j1, j2, m1, m2).unwrap();
        let (ax, ay, bx_edge, by_edge) = bx.corners_f64();
        let z = Point2::from_f64(
            ax + rng.gen::<f64>() * (bx_edge - ax),
            ay + rng.gen::<f64>() * (by_edge - ay),
        )
        .unwrap();
        let closed = haar::point_term(&bx, &z).unwrap();
        let (zx, zy) = z.xy_f64();
        let indicator = move |x: f64, y: f64| {
            if x >= zx && y >= zy {
                1.0
            } else {
                0.0
            }
        };
        let quad =
            common::quad_against_haar(&indicator, &[zx], &[zy], j1 as i32, j2 as i32, m1, m2);
        assert!(
            (closed - quad).abs() < 1e-10,
            "z in {}: closed {} vs quadrature {}",
            bx,
            closed,
            quad
        );
    }
}

#[test]
fn general_shape_coefficients_match_quadrature() {
    // includes -1 components, where the Haar factor is the constant 1
    let mut rng = ChaCha12Rng::seed_from_u64(14);
    for _ in 0..60 {
        let n = rng.gen_range(1..=6usize);
        let set = pointset::random_uniform(n, rng.gen()).unwrap();
        let j1 = rng.gen_range(-1..=3i32);
        let j2 = rng.gen_range(-1..=3i32);
        let m1 = if j1 <= 0 { 0 } else { rng.gen_range(0..1u64 << j1) };
        let m2 = if j2 <= 0 { 0 } else { rng.gen_range(0..1u64 << j2) };
        let shape = haar::DyadicShape::new(j1, j2).unwrap();
        let closed = haar::haar_coefficient_general(&set, &shape, m1, m2).unwrap();
        let quad = common::quad_haar_coefficient(&set, j1, j2, m1, m2);
        assert!(
            (closed - quad).abs() < 1e-9,
            "shape ({},{}), m ({},{}): closed {} vs quadrature {}",
            j1,
            j2,
            m1,
            m2,
            closed,
            quad
        );
    }
}

#[test]
fn general_shape_center_point_case() {
    let set = PointSet::new(vec![Point2::from_ratio(1, 2, 1, 2).unwrap()]).unwrap();
    let shape = haar::DyadicShape::new(-1, 0).unwrap();
    let closed = haar::haar_coefficient_general(&set, &shape, 0, 0).unwrap();
    let quad = common::quad_haar_coefficient(&set, -1, 0, 0, 0);
    assert!((closed - quad).abs() < 1e-9, "{} vs {}", closed, quad);
}

#[test]
fn l2_closed_form_matches_quadrature() {
    // the quadrature is exact for D^2 split at the point coordinates
    let center = PointSet::new(vec![Point2::from_ratio(1, 2, 1, 2).unwrap()]).unwrap();
    assert!((common::quad_l2_squared(&center) - 23.0 / 288.0).abs() < 1e-12);
    for set in [
        pointset::hammersley(2).unwrap(),
        pointset::fibonacci_lattice(5, true).unwrap(),
        pointset::random_uniform(7, 3).unwrap(),
    ] {
        let closed = discrepancy::l2_squared(&set);
        let quad = common::quad_l2_squared(&set);
        assert!(
            (closed - quad).abs() < 1e-10 * closed.max(1.0),
            "closed {} vs quadrature {}",
            closed,
            quad
        );
    }
}

#[test]
fn tail_series_reordered_summation() {
    // summing the tail series backwards changes the rounding path but not
    // the value
    for m in [1u32, 4, 10, 20, 40] {
        for i in 0..=8 {
            let kappa = i as f64 / 8.0 * 0.999;
            let forward = bounds::empty_box_tail(m, kappa);
            let scale = (2.0 * m as f64 + 2.0 * kappa - 8.0).exp2();
            let n = (m as f64 + kappa).exp2();
            let mut backward = 0.0;
            for level in ((m + 1)..(m + 120)).rev() {
                let l = level as f64;
                backward += (l + 1.0) * scale * ((-2.0 * l).exp2() - n * (-3.0 * l).exp2());
            }
            assert!(
                (forward - backward).abs() <= 1e-13 * forward.abs().max(1e-300),
                "m = {} kappa = {}: {} vs {}",
                m,
                kappa,
                forward,
                backward
            );
        }
    }
}

#[test]
fn baseline_rhs_equals_tail_series_at_matching_arguments() {
    for n in [4usize, 12, 100, 777] {
        let set = pointset::random_uniform(n, 9).unwrap();
        let split = census::dyadic_split(n).unwrap();
        let a = census::baseline_rhs(&set).unwrap();
        let b = bounds::empty_box_tail(split.exponent, split.kappa);
        assert!(
            (a - b).abs() <= 1e-11 * a.abs().max(1e-300),
            "N = {}: {} vs {}",
            n,
            a,
            b
        );
    }
}

#[test]
fn level_density_assembly_at_kappa_zero() {
    // assembling the per-level densities at kappa = 0 reproduces the direct
    // expression in terms of the bundle floor
    let (base, next) = bounds::level_density_bounds(0.0).unwrap();
    let g0 = bounds::gamma(0.0).unwrap().value;
    let g_minus = bounds::gamma(-1.0).unwrap().value;
    assert!((base - (g0 - 0.5 * g_minus)).abs() < 1e-18);
    assert!((next - (2f64.powi(-11) + 0.5 * g_minus)).abs() < 1e-18);
    for m in [3u64, 7, 12] {
        let assembled = (m as f64 + 1.0) * base + (m as f64 + 2.0) * next;
        let direct = (m as f64 + 1.0) * (g0 - 0.5 * g_minus)
            + (m as f64 + 2.0) * (2f64.powi(-11) + 0.5 * g_minus);
        assert!((assembled - direct).abs() <= 1e-15 * direct.abs());
    }
}

#[test]
fn oracle_three_sigma_families() {
    // closed form within 3 standard errors of the Monte Carlo oracle
    let cases: Vec<PointSet> = vec![
        PointSet::new(vec![Point2::from_ratio(0, 1, 0, 1).unwrap()]).unwrap(),
        pointset::hammersley(3).unwrap(),
        PointSet::new(vec![
            Point2::from_ratio(1, 2, 1, 2).unwrap(),
            Point2::from_ratio(1, 2, 1, 2).unwrap(),
        ])
        .unwrap(),
    ];
    for set in cases {
        let est = discrepancy::l2_oracle(&set, 1_000_000, 99).unwrap();
        let truth = discrepancy::l2_squared(&set);
        assert!(
            (est.estimate - truth).abs() <= 3.0 * est.std_error,
            "N = {}: {} +/- {} vs {}",
            set.len(),
            est.estimate,
            est.std_error,
            truth
        );
    }
}
