//! The property battery behind the `verify` subcommand: every module
//! invariant exercised at CLI scale, one named pass/fail line per check.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::bounds;
use crate::census;
use crate::discrepancy;
use crate::error::Result;
use crate::haar;
use crate::pointset::{self, Point2, PointSet};

type Check = (&'static str, fn() -> std::result::Result<(), String>);

fn fail(msg: impl Into<String>) -> std::result::Result<(), String> {
    Err(msg.into())
}

fn small_catalog() -> Vec<PointSet> {
    let mut sets = Vec::new();
    for n in 1..=6u32 {
        sets.push(pointset::hammersley(n).unwrap());
    }
    for k in 3..=12u32 {
        sets.push(pointset::fibonacci_lattice(k, k % 2 == 0).unwrap());
    }
    for seed in 0..4u64 {
        sets.push(pointset::random_uniform(17 + 61 * seed as usize, seed).unwrap());
    }
    sets
}

fn generator_domain() -> std::result::Result<(), String> {
    for set in small_catalog() {
        for p in set.points() {
            if !p.x().in_unit_half_open() || !p.y().in_unit_half_open() {
                return fail(format!("coordinate outside [0,1): ({}, {})", p.x(), p.y()));
            }
        }
    }
    Ok(())
}

fn hammersley_distinct() -> std::result::Result<(), String> {
    for n in 0..=12u32 {
        let set = pointset::hammersley(n).unwrap();
        let mut keys: Vec<(u64, u64)> = set
            .points()
            .iter()
            .map(|p| (p.x().scaled_floor(n), p.y().scaled_floor(n)))
            .collect();
        keys.sort_unstable();
        let len = keys.len();
        keys.dedup();
        if keys.len() != len {
            return fail(format!("duplicate points at n = {}", n));
        }
    }
    Ok(())
}

fn save_load_identity() -> std::result::Result<(), String> {
    let set = pointset::fibonacci_lattice(9, true).unwrap();
    let mut buf = Vec::new();
    pointset::write_points(&set, &mut buf).map_err(|e| e.to_string())?;
    let back = pointset::parse_points(buf.as_slice()).map_err(|e| e.to_string())?;
    if back.len() != set.len() {
        return fail("length changed in round trip");
    }
    for (p, q) in set.points().iter().zip(back.points()) {
        if p.x().compare(q.x()) != std::cmp::Ordering::Equal
            || p.y().compare(q.y()) != std::cmp::Ordering::Equal
        {
            return fail("coordinate changed in round trip");
        }
    }
    Ok(())
}

fn oracle_equivalence() -> std::result::Result<(), String> {
    // 20 random sets with N <= 64: closed form within 4 standard errors
    for seed in 0..20u64 {
        let n = 2 + (seed as usize * 7) % 63;
        let set = pointset::random_uniform(n, seed).unwrap();
        let exact = discrepancy::l2_squared(&set);
        let est = discrepancy::l2_oracle(&set, 30_000, seed ^ 0xABCD).map_err(|e| e.to_string())?;
        if (est.estimate - exact).abs() > 4.0 * est.std_error {
            return fail(format!(
                "N = {}: oracle {} ± {} vs closed form {}",
                n, est.estimate, est.std_error, exact
            ));
        }
    }
    Ok(())
}

fn exact_mode_agreement() -> std::result::Result<(), String> {
    for n in 0..=4u32 {
        let set = pointset::hammersley(n).unwrap();
        let exact = {
            use num_traits::ToPrimitive;
            discrepancy::l2_squared_exact(&set).to_f64().unwrap()
        };
        let float = discrepancy::l2_squared(&set);
        if (exact - float).abs() > 1e-12 * exact.abs().max(1.0) {
            return fail(format!("n = {}: exact {} vs float {}", n, exact, float));
        }
    }
    Ok(())
}

fn permutation_symmetry() -> std::result::Result<(), String> {
    let set = pointset::hammersley(3).unwrap();
    let mut pts = set.points().to_vec();
    pts.reverse();
    pts.swap(1, 6);
    let permuted = PointSet::new(pts).unwrap();
    if discrepancy::l2_squared_exact(&set) != discrepancy::l2_squared_exact(&permuted) {
        return fail("exact value changed under permutation");
    }
    Ok(())
}

fn universal_ratio_floor() -> std::result::Result<(), String> {
    for set in small_catalog() {
        if set.len() < 2 {
            continue;
        }
        let ratio = discrepancy::normalized_ratio(&set).map_err(|e| e.to_string())?;
        if ratio < 0.0515599 {
            return fail(format!("N = {}: ratio {} below floor", set.len(), ratio));
        }
    }
    Ok(())
}

fn quarter_partition() -> std::result::Result<(), String> {
    let bx = haar::DyadicBox::new(1, 1, 0, 0).unwrap();
    let mut counts = [0u32; 4];
    for i in 0..64u64 {
        for k in 0..64u64 {
            let p = Point2::from_ratio(i, 64, k, 64).unwrap();
            match haar::quarter_of(&bx, &p) {
                haar::Quarter::LeftLower => counts[0] += 1,
                haar::Quarter::LeftUpper => counts[1] += 1,
                haar::Quarter::RightLower => counts[2] += 1,
                haar::Quarter::RightUpper => counts[3] += 1,
                haar::Quarter::Outside => {}
            }
        }
    }
    if counts != [256; 4] {
        return fail(format!("quarter counts {:?} != [256; 4]", counts));
    }
    Ok(())
}

fn coefficient_additivity() -> std::result::Result<(), String> {
    let mut rng = ChaCha12Rng::seed_from_u64(99);
    for _ in 0..50 {
        let j1 = rng.gen_range(0..4u32);
        let j2 = rng.gen_range(0..4u32);
        let m1 = rng.gen_range(0..1u64 << j1);
        let m2 = rng.gen_range(0..1u64 << j2);
        let bx = haar::DyadicBox::new(j1, j2, m1, m2).unwrap();
        let base = pointset::random_uniform(rng.gen_range(1..20), rng.gen()).unwrap();
        let (ax, ay, bx_edge, by_edge) = bx.corners_f64();
        let z = Point2::from_f64(
            ax + rng.gen::<f64>() * (bx_edge - ax),
            ay + rng.gen::<f64>() * (by_edge - ay),
        )
        .unwrap();
        let before = haar::haar_coefficient(&base, &bx).value;
        let mut pts = base.points().to_vec();
        pts.push(z.clone());
        let grown = PointSet::new(pts).unwrap();
        let after = haar::haar_coefficient(&grown, &bx).value;
        let unit = 2f64.powi(-2 * (bx.level() as i32) - 4);
        let expected = before + haar::point_term(&bx, &z).map_err(|e| e.to_string())? - unit;
        if (after - expected).abs() > 1e-13 {
            return fail(format!(
                "additivity off by {} at {}",
                (after - expected).abs(),
                bx
            ));
        }
    }
    Ok(())
}

fn parseval_monotone_below_l2() -> std::result::Result<(), String> {
    for set in [
        pointset::hammersley(2).unwrap(),
        pointset::random_uniform(7, 1).unwrap(),
    ] {
        let l2 = discrepancy::l2_squared(&set);
        let profile = haar::parseval_profile(&set, 12).map_err(|e| e.to_string())?;
        let mut prev = 0.0;
        for c in &profile {
            if c.cumulative < prev {
                return fail(format!("partial sum decreased at level {}", c.level));
            }
            if c.cumulative > l2 * (1.0 + 1e-12) {
                return fail(format!(
                    "partial sum {} exceeds l2 {} at level {}",
                    c.cumulative, l2, c.level
                ));
            }
            prev = c.cumulative;
        }
    }
    Ok(())
}

fn parseval_convergence() -> std::result::Result<(), String> {
    let set = pointset::hammersley(2).unwrap();
    let l2 = discrepancy::l2_squared(&set);
    let partial = haar::parseval_partial(&set, 16).map_err(|e| e.to_string())?;
    let rel = (l2 - partial) / l2;
    if !(0.0..=0.02).contains(&rel) {
        return fail(format!("level-16 relative gap {} outside [0, 2%]", rel));
    }
    Ok(())
}

fn census_identities() -> std::result::Result<(), String> {
    for seed in 0..10u64 {
        let set = pointset::random_uniform(8 + (seed as usize * 97) % 500, seed).unwrap();
        let mut prev = census::level_census(&set, 0).unwrap();
        prev.check_identities(set.len()).map_err(|e| e.to_string())?;
        for level in 1..=8u32 {
            let cur = census::level_census(&set, level).unwrap();
            cur.check_identities(set.len()).map_err(|e| e.to_string())?;
            census::check_adjacent_levels(&prev, &cur).map_err(|e| e.to_string())?;
            prev = cur;
        }
    }
    Ok(())
}

fn bipartite_edge_count() -> std::result::Result<(), String> {
    // direct enumeration of one-point parent/child containments equals the
    // type-weighted count
    for seed in 0..5u64 {
        let set = pointset::random_uniform(60 + seed as usize * 31, seed ^ 7).unwrap();
        for level in 0..=6u32 {
            let mut edges = 0u64;
            for shape in haar::nonneg_shapes_at_level(level) {
                let (j1, j2) = (shape.j1() as u32, shape.j2() as u32);
                let parents = census::occupancy_counts(&set, j1, j2);
                let x_children = census::occupancy_counts(&set, j1 + 1, j2);
                let y_children = census::occupancy_counts(&set, j1, j2 + 1);
                for (&(m1, m2), &count) in &parents {
                    if count != 1 {
                        continue;
                    }
                    for half in 0..2u64 {
                        if x_children.get(&(2 * m1 + half, m2)) == Some(&1) {
                            edges += 1;
                        }
                        if y_children.get(&(m1, 2 * m2 + half)) == Some(&1) {
                            edges += 1;
                        }
                    }
                }
            }
            let fine = census::level_census(&set, level + 1).unwrap();
            let t = fine.types().unwrap();
            if edges != t.b1 + 2 * t.b2 {
                return fail(format!(
                    "level {}: edges {} vs b1 + 2 b2 = {}",
                    level,
                    edges,
                    t.b1 + 2 * t.b2
                ));
            }
        }
    }
    Ok(())
}

fn master_chain() -> std::result::Result<(), String> {
    for set in small_catalog() {
        if set.len() < 2 {
            continue;
        }
        let l2 = discrepancy::l2_squared(&set);
        let master = census::master_rhs(&set).map_err(|e| e.to_string())?;
        let baseline = census::baseline_rhs(&set).map_err(|e| e.to_string())?;
        if l2 < master - 1e-12 * master.max(1.0) {
            return fail(format!("N = {}: l2 {} < master {}", set.len(), l2, master));
        }
        if master < baseline - 1e-12 {
            return fail(format!(
                "N = {}: master {} < baseline {}",
                set.len(),
                master,
                baseline
            ));
        }
    }
    Ok(())
}

fn bundle_floor_property() -> std::result::Result<(), String> {
    let mut rng = ChaCha12Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let n: usize = rng.gen_range(2..2000);
        let split = census::dyadic_split(n).unwrap();
        let at_next_level = rng.gen::<bool>();
        let level = split.exponent + at_next_level as u32;
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
        // fill the rest of the set outside the box
        let mut pts = vec![z];
        while pts.len() < n {
            let q = Point2::from_f64(rng.gen(), rng.gen()).unwrap();
            if !bx.contains(&q) {
                pts.push(q);
            }
        }
        let set = PointSet::new(pts).unwrap();
        let bundle = census::coefficient_bundle(&set, &bx).map_err(|e| e.to_string())?;
        let scaled = 2f64.powi(2 * split.exponent as i32) * bundle.sum_squares;
        let floor = if at_next_level {
            0.25 * bounds::gamma(split.kappa - 1.0).map_err(|e| e.to_string())?.value
        } else {
            bounds::gamma(split.kappa).map_err(|e| e.to_string())?.value
        };
        if scaled < floor * (1.0 - 1e-9) {
            return fail(format!(
                "bundle {} below floor {} (N = {}, level {})",
                scaled, floor, n, level
            ));
        }
    }
    Ok(())
}

fn quarter_minima_vs_grid() -> std::result::Result<(), String> {
    for &kappa in &[-1.0, 0.0, 0.5] {
        // lower quarter: zoomed 1-D grid
        let f = |z: f64| {
            let a = 2f64.powf(kappa - 4.0);
            let b = 2f64.powf(kappa - 6.0);
            (z - a) * (z - a) + 2.0 * (z - b) * (z - b)
        };
        let (mut lo, mut hi) = (0.0, 1.0 / 16.0);
        for _ in 0..8 {
            let mut best = (f64::INFINITY, lo);
            for i in 0..=400 {
                let z = lo + (hi - lo) * i as f64 / 400.0;
                if f(z) < best.0 {
                    best = (f(z), z);
                }
            }
            let w = (hi - lo) / 40.0;
            lo = (best.1 - w).max(0.0);
            hi = (best.1 + w).min(1.0 / 16.0);
        }
        let oracle = f((lo + hi) / 2.0);
        let (_, claimed) = bounds::lower_quarter_min(kappa);
        if ((oracle - claimed) / claimed).abs() > 1e-9 {
            return fail(format!(
                "lower-quarter minimum mismatch at kappa = {}: {} vs {}",
                kappa, oracle, claimed
            ));
        }
    }
    Ok(())
}

fn diagonal_certificates() -> std::result::Result<(), String> {
    for &kappa in &[-1.0, -0.5, 0.0, 0.5, 0.99] {
        let cert = bounds::diagonal_certificate(kappa, 400).map_err(|e| e.to_string())?;
        if cert.gap.abs() > 1e-5 {
            return fail(format!(
                "kappa = {}: grid/diagonal gap {}",
                kappa, cert.gap
            ));
        }
    }
    Ok(())
}

fn delta_endpoints() -> std::result::Result<(), String> {
    let d = bounds::delta_exact_endpoints().map_err(|e| e.to_string())?;
    let expected = num_rational::BigRational::new(317.into(), 172032.into());
    if d != expected {
        return fail(format!("endpoint density {} != 317/172032", d));
    }
    Ok(())
}

fn extremal_constants_check() -> std::result::Result<(), String> {
    let report = bounds::extremal_constants_with_grid(1024).map_err(|e| e.to_string())?;
    if (report.c_bar_lower - 0.0515599255).abs() > 1e-7 {
        return fail(format!("c-bar {}", report.c_bar_lower));
    }
    if (report.b_bar_lower - 0.0610737996).abs() > 1e-7 {
        return fail(format!("b-bar {}", report.b_bar_lower));
    }
    if (report.kappa0 - 0.5705243851).abs() > 1e-5 {
        return fail(format!("kappa0 {}", report.kappa0));
    }
    if report.baseline_c_bar >= report.c_bar_lower || report.baseline_b_bar >= report.b_bar_lower {
        return fail("improved constants do not exceed the baseline".to_string());
    }
    Ok(())
}

fn tail_series_dominates_bound() -> std::result::Result<(), String> {
    for m in 1..=20u32 {
        for i in 0..50 {
            let kappa = i as f64 / 50.0;
            let exact = bounds::empty_box_tail(m, kappa);
            let bound = bounds::empty_box_tail_bound(m, kappa);
            if exact < bound {
                return fail(format!("m = {}, kappa = {}: {} < {}", m, kappa, exact, bound));
            }
        }
    }
    Ok(())
}

fn occupancy_weight_random() -> std::result::Result<(), String> {
    let mut rng = ChaCha12Rng::seed_from_u64(5150);
    for &sigma in &[0.3f64, 1.0, 1.7] {
        let mut tested = 0u32;
        while tested < 10_000 {
            // random masses on 0..support blended with a two-point
            // distribution whose mean is chosen to land the blend on sigma
            let support = rng.gen_range(2..=8usize);
            let mut raw: Vec<f64> = (0..support).map(|_| rng.gen::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            for a in &mut raw {
                *a /= total;
            }
            let mu: f64 = raw.iter().enumerate().map(|(r, a)| r as f64 * a).sum();
            let t = rng.gen::<f64>() * 0.95;
            let m2 = (sigma - t * mu) / (1.0 - t);
            if !(0.0..=8.0).contains(&m2) {
                continue;
            }
            let lo = m2.floor().min(7.0);
            let w_hi = m2 - lo;
            let mut dist: Vec<(u64, f64)> = Vec::new();
            let push = |r: u64, a: f64, dist: &mut Vec<(u64, f64)>| {
                if a <= 0.0 {
                    return;
                }
                if let Some(e) = dist.iter_mut().find(|(rr, _)| *rr == r) {
                    e.1 += a;
                } else {
                    dist.push((r, a));
                }
            };
            for (r, a) in raw.iter().enumerate() {
                push(r as u64, t * a, &mut dist);
            }
            push(lo as u64, (1.0 - t) * (1.0 - w_hi), &mut dist);
            push(lo as u64 + 1, (1.0 - t) * w_hi, &mut dist);
            let beta = rng.gen::<f64>();
            let alpha = 2.0 * beta + rng.gen::<f64>();
            match bounds::occupancy_weight_check(&dist, alpha, beta, sigma) {
                Ok(true) => tested += 1,
                Ok(false) => return fail(format!("inequality failed for sigma = {}", sigma)),
                Err(_) => continue, // blend rounding pushed the mean off; redraw
            }
        }
    }
    Ok(())
}

fn density_bound_components() -> std::result::Result<(), String> {
    for i in 0..=10_000 {
        let kappa = i as f64 / 10_000.0 * 0.9999;
        let g0 = bounds::gamma(kappa).map_err(|e| e.to_string())?.value;
        let g1 = bounds::gamma(kappa - 1.0).map_err(|e| e.to_string())?.value;
        if g0 - 0.5 * g1 < 0.0 {
            return fail(format!("base weight negative at kappa = {}", kappa));
        }
        // domination requirements for the weighted-occupancy step
        if 2.0 * (g0 - 0.5 * g1) > 2f64.powf(2.0 * kappa - 8.0) {
            return fail(format!("base weight exceeds alpha at kappa = {}", kappa));
        }
        if g1 > 2f64.powf(2.0 * kappa - 11.0) {
            return fail(format!("next weight exceeds alpha at kappa = {}", kappa));
        }
    }
    Ok(())
}

const CHECKS: &[Check] = &[
    ("generator_domain", generator_domain),
    ("hammersley_distinct", hammersley_distinct),
    ("save_load_identity", save_load_identity),
    ("oracle_equivalence", oracle_equivalence),
    ("exact_mode_agreement", exact_mode_agreement),
    ("permutation_symmetry", permutation_symmetry),
    ("universal_ratio_floor", universal_ratio_floor),
    ("quarter_partition", quarter_partition),
    ("coefficient_additivity", coefficient_additivity),
    ("parseval_monotone_below_l2", parseval_monotone_below_l2),
    ("parseval_convergence", parseval_convergence),
    ("census_identities", census_identities),
    ("bipartite_edge_count", bipartite_edge_count),
    ("master_chain", master_chain),
    ("bundle_floor_property", bundle_floor_property),
    ("quarter_minima_vs_grid", quarter_minima_vs_grid),
    ("diagonal_certificates", diagonal_certificates),
    ("delta_endpoints", delta_endpoints),
    ("extremal_constants", extremal_constants_check),
    ("tail_series_dominates_bound", tail_series_dominates_bound),
    ("occupancy_weight_random", occupancy_weight_random),
    ("density_bound_components", density_bound_components),
];

/// Runs every named check, printing one line per check. Returns `Ok` only if
/// all pass.
pub fn run_battery<W: Write>(out: &mut W) -> Result<bool> {
    let mut all_ok = true;
    for (name, check) in CHECKS {
        match check() {
            Ok(()) => writeln!(out, "{}: PASS", name)?,
            Err(msg) => {
                all_ok = false;
                writeln!(out, "{}: FAIL ({})", name, msg)?;
            }
        }
    }
    writeln!(
        out,
        "battery: {} ({} checks)",
        if all_ok { "PASS" } else { "FAIL" },
        CHECKS.len()
    )?;
    Ok(all_ok)
}
