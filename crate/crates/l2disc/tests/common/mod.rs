//! Shared test oracles: breakpoint-aware Gauss quadrature (exact for the
//! piecewise-bilinear integrands that appear here), zooming grid searches,
//! and point-set catalogs. Everything in this module is independent of the
//! library's closed-form computation paths.

#![allow(dead_code)]

use l2disc::pointset::{self, PointSet};

/// Composite 2x2 Gauss-Legendre quadrature over the cell grid given by the
/// sorted edge lists `xs` and `ys`. Exact (up to rounding) whenever `f` is a
/// polynomial of degree <= 3 per variable on every cell.
pub fn quad_cells(f: &dyn Fn(f64, f64) -> f64, xs: &[f64], ys: &[f64]) -> f64 {
    const G: f64 = 0.577_350_269_189_625_7; // 1/sqrt(3)
    let mut total = 0.0;
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let hx = (x1 - x0) / 2.0;
        if hx <= 0.0 {
            continue;
        }
        let cx = (x0 + x1) / 2.0;
        for v in ys.windows(2) {
            let (y0, y1) = (v[0], v[1]);
            let hy = (y1 - y0) / 2.0;
            if hy <= 0.0 {
                continue;
            }
            let cy = (y0 + y1) / 2.0;
            let mut s = 0.0;
            for gx in [cx - G * hx, cx + G * hx] {
                for gy in [cy - G * hy, cy + G * hy] {
                    s += f(gx, gy);
                }
            }
            total += s * hx * hy;
        }
    }
    total
}

fn sorted_edges(lo: f64, hi: f64, mid: Option<f64>, breaks: &[f64]) -> Vec<f64> {
    let mut edges = vec![lo, hi];
    if let Some(m) = mid {
        edges.push(m);
    }
    for &b in breaks {
        if b > lo && b < hi {
            edges.push(b);
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup();
    edges
}

/// Quadrature of `f(x,y) * h(x,y)` over the support of the Haar function of
/// shape `(j1, j2)` at `(m1, m2)`; a `-1` component means the constant factor
/// 1 on `[0,1)`. `breaks` must contain every discontinuity line of `f`.
pub fn quad_against_haar(
    f: &dyn Fn(f64, f64) -> f64,
    x_breaks: &[f64],
    y_breaks: &[f64],
    j1: i32,
    j2: i32,
    m1: u64,
    m2: u64,
) -> f64 {
    let (ax, bx, midx) = if j1 >= 0 {
        let s = 2f64.powi(-j1);
        (m1 as f64 * s, (m1 + 1) as f64 * s, Some((m1 as f64 + 0.5) * s))
    } else {
        (0.0, 1.0, None)
    };
    let (ay, by, midy) = if j2 >= 0 {
        let s = 2f64.powi(-j2);
        (m2 as f64 * s, (m2 + 1) as f64 * s, Some((m2 as f64 + 0.5) * s))
    } else {
        (0.0, 1.0, None)
    };
    let xs = sorted_edges(ax, bx, midx, x_breaks);
    let ys = sorted_edges(ay, by, midy, y_breaks);
    let h = move |x: f64, y: f64| -> f64 {
        let sx = match midx {
            Some(m) => {
                if x < m {
                    1.0
                } else {
                    -1.0
                }
            }
            None => 1.0,
        };
        let sy = match midy {
            Some(m) => {
                if y < m {
                    1.0
                } else {
                    -1.0
                }
            }
            None => 1.0,
        };
        sx * sy
    };
    quad_cells(&move |x, y| f(x, y) * h(x, y), &xs, &ys)
}

/// The discrepancy function of `pts` as a closure, by direct counting.
pub fn discrepancy_fn(pts: Vec<(f64, f64)>) -> impl Fn(f64, f64) -> f64 {
    let n = pts.len() as f64;
    move |x, y| {
        let count = pts.iter().filter(|p| p.0 < x && p.1 < y).count();
        count as f64 - n * x * y
    }
}

/// Quadrature oracle for the Haar coefficient of the discrepancy function.
pub fn quad_haar_coefficient(set: &PointSet, j1: i32, j2: i32, m1: u64, m2: u64) -> f64 {
    let pts = set.coords_f64();
    let xb: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let yb: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let d = discrepancy_fn(pts);
    quad_against_haar(&d, &xb, &yb, j1, j2, m1, m2)
}

/// Quadrature oracle for the squared L2 norm: integrates `D^2` over the unit
/// square with cells split at every point coordinate (exact: `D^2` is
/// biquadratic per cell).
pub fn quad_l2_squared(set: &PointSet) -> f64 {
    let pts = set.coords_f64();
    let xs = sorted_edges(0.0, 1.0, None, &pts.iter().map(|p| p.0).collect::<Vec<_>>());
    let ys = sorted_edges(0.0, 1.0, None, &pts.iter().map(|p| p.1).collect::<Vec<_>>());
    let d = discrepancy_fn(pts);
    quad_cells(&move |x, y| d(x, y) * d(x, y), &xs, &ys)
}

/// Zooming dense grid minimization in 1-D: scans `initial + 1` points, then
/// repeatedly re-grids a shrinking window around the incumbent.
pub fn zoom_grid_min_1d(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    initial: usize,
    zooms: usize,
) -> (f64, f64) {
    let mut lo = lo;
    let mut hi = hi;
    let (full_lo, full_hi) = (lo, hi);
    let mut best = (f64::INFINITY, lo);
    let mut n = initial;
    for _ in 0..=zooms {
        for i in 0..=n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            let v = f(x);
            if v < best.0 {
                best = (v, x);
            }
        }
        let w = (hi - lo) / n as f64 * 8.0;
        lo = (best.1 - w).max(full_lo);
        hi = (best.1 + w).min(full_hi);
        n = 256;
    }
    (best.1, best.0)
}

/// Zooming dense grid minimization in 2-D.
pub fn zoom_grid_min_2d(
    f: &dyn Fn(f64, f64) -> f64,
    a: (f64, f64),
    b: (f64, f64),
    initial: usize,
    zooms: usize,
) -> (f64, f64, f64) {
    let full = (a, b);
    let (mut alo, mut ahi) = a;
    let (mut blo, mut bhi) = b;
    let mut best = (f64::INFINITY, alo, blo);
    let mut n = initial;
    for _ in 0..=zooms {
        for i in 0..=n {
            let x = alo + (ahi - alo) * i as f64 / n as f64;
            for k in 0..=n {
                let y = blo + (bhi - blo) * k as f64 / n as f64;
                let v = f(x, y);
                if v < best.0 {
                    best = (v, x, y);
                }
            }
        }
        let wa = (ahi - alo) / n as f64 * 8.0;
        let wb = (bhi - blo) / n as f64 * 8.0;
        alo = (best.1 - wa).max(full.0 .0);
        ahi = (best.1 + wa).min(full.1 .0);
        blo = (best.2 - wb).max(full.0 .1);
        bhi = (best.2 + wb).min(full.1 .1);
        n = 128;
    }
    (best.1, best.2, best.0)
}

/// Sets with 2 <= N <= 4096 from all three families, for chain checks.
pub fn chain_catalog() -> Vec<(String, PointSet)> {
    let mut sets = Vec::new();
    for n in 1..=12u32 {
        sets.push((format!("hammersley({})", n), pointset::hammersley(n).unwrap()));
    }
    for k in 3..=18u32 {
        sets.push((
            format!("fibonacci({})", k),
            pointset::fibonacci_lattice(k, false).unwrap(),
        ));
    }
    for k in 3..=16u32 {
        sets.push((
            format!("fibonacci({}, sym)", k),
            pointset::fibonacci_lattice(k, true).unwrap(),
        ));
    }
    for (n, seed) in [(2usize, 1u64), (5, 2), (16, 3), (100, 4), (1000, 5), (4096, 6)] {
        sets.push((
            format!("random({}, seed={})", n, seed),
            pointset::random_uniform(n, seed).unwrap(),
        ));
    }
    sets
}

/// Wider catalog with 2 <= N <= 10^4 for the universal-ratio property.
pub fn ratio_catalog() -> Vec<(String, PointSet)> {
    let mut sets = chain_catalog();
    sets.push((
        "hammersley(13)".into(),
        pointset::hammersley(13).unwrap(),
    ));
    for k in [19u32, 20] {
        sets.push((
            format!("fibonacci({})", k),
            pointset::fibonacci_lattice(k, false).unwrap(),
        ));
    }
    for k in [17u32, 18] {
        sets.push((
            format!("fibonacci({}, sym)", k),
            pointset::fibonacci_lattice(k, true).unwrap(),
        ));
    }
    sets.push((
        "random(10000, seed=7)".into(),
        pointset::random_uniform(10_000, 7).unwrap(),
    ));
    // duplicate-heavy multisets
    let dup = {
        let p = l2disc::Point2::from_ratio(1, 2, 1, 2).unwrap();
        PointSet::new(vec![p.clone(), p.clone(), p]).unwrap()
    };
    sets.push(("triple(1/2,1/2)".into(), dup));
    sets
}
