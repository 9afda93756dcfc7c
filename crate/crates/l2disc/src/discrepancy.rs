//! The discrepancy function and its L2 norm.
//!
//! `D(x) = #(P ∩ [0,x1)×[0,x2)) − N·x1·x2` measures how far the empirical
//! count of an anchored box deviates from its fair share. The squared L2 norm
//! over the unit square has an exact O(N²) pair-sum expansion, evaluated here
//! with compensated summation and, for rational inputs, in exact arithmetic.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::coord::Coord;
use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// Corner of an anchored box; coordinates may touch 1.
#[derive(Clone, Debug)]
pub struct Corner {
    x: Coord,
    y: Coord,
}

impl Corner {
    pub fn new(x: Coord, y: Coord) -> Result<Self> {
        if !x.in_unit_closed() || !y.in_unit_closed() {
            return Err(Error::domain(format!(
                "corner ({}, {}) outside [0,1]^2",
                x, y
            )));
        }
        Ok(Corner { x, y })
    }

    pub fn from_f64(x: f64, y: f64) -> Result<Self> {
        Corner::new(Coord::Approx(x), Coord::Approx(y))
    }

    pub fn x(&self) -> &Coord {
        &self.x
    }

    pub fn y(&self) -> &Coord {
        &self.y
    }
}

/// Value of the discrepancy function at a corner.
#[derive(Clone, Debug)]
pub struct DiscrepancyValue {
    pub value: f64,
    /// Exact value when the corner is rational (the count is always an
    /// integer, so exactness depends on the corner alone).
    pub exact: Option<BigRational>,
    pub at: Corner,
}

/// Evaluates `D(x) = Σ_i [p_i,1 < x1 and p_i,2 < x2] − N·x1·x2`.
///
/// Point-in-box comparisons are strict (half-open boxes); the corner may have
/// coordinates equal to 1.
pub fn discrepancy_at(set: &PointSet, corner: &Corner) -> DiscrepancyValue {
    let count = set
        .points()
        .iter()
        .filter(|p| {
            p.x().compare(corner.x()) == Ordering::Less
                && p.y().compare(corner.y()) == Ordering::Less
        })
        .count();
    let n = set.len() as f64;
    let value = count as f64 - n * corner.x().to_f64() * corner.y().to_f64();
    let exact = if corner.x().is_exact() && corner.y().is_exact() {
        let n_big = BigRational::from(BigInt::from(set.len()));
        Some(
            BigRational::from(BigInt::from(count))
                - n_big * corner.x().to_rational() * corner.y().to_rational(),
        )
    } else {
        None
    };
    DiscrepancyValue {
        value,
        exact,
        at: corner.clone(),
    }
}

/// Neumaier-compensated accumulator.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Exact squared L2 norm of the discrepancy function via the pair-sum
/// expansion
///
/// `Σ_{i,k} (1−max(x_i,x_k))(1−max(y_i,y_k)) − (N/2) Σ_i (1−x_i²)(1−y_i²) + N²/9`,
///
/// computed in `f64` with compensated summation.
pub fn l2_squared(set: &PointSet) -> f64 {
    let pts = set.coords_f64();
    let n = pts.len() as f64;
    let mut pair = CompensatedSum::default();
    for (i, &(xi, yi)) in pts.iter().enumerate() {
        // diagonal term once, off-diagonal pairs twice
        pair.add((1.0 - xi) * (1.0 - yi));
        for &(xk, yk) in &pts[i + 1..] {
            pair.add(2.0 * (1.0 - xi.max(xk)) * (1.0 - yi.max(yk)));
        }
    }
    let mut single = CompensatedSum::default();
    for &(x, y) in &pts {
        single.add((1.0 - x * x) * (1.0 - y * y));
    }
    pair.value() - n / 2.0 * single.value() + n * n / 9.0
}

/// The pair-sum expansion in exact rational arithmetic. Coordinates stored as
/// floats are promoted losslessly, so the result is exactly the value of the
/// integral for the represented set.
pub fn l2_squared_exact(set: &PointSet) -> BigRational {
    let pts: Vec<(BigRational, BigRational)> = set
        .points()
        .iter()
        .map(|p| (p.x().to_rational(), p.y().to_rational()))
        .collect();
    let one = BigRational::from(BigInt::from(1));
    let mut pair = BigRational::zero();
    for (xi, yi) in &pts {
        for (xk, yk) in &pts {
            let mx = if xi >= xk { xi } else { xk };
            let my = if yi >= yk { yi } else { yk };
            pair += (&one - mx) * (&one - my);
        }
    }
    let mut single = BigRational::zero();
    for (x, y) in &pts {
        single += (&one - x * x) * (&one - y * y);
    }
    let n = BigRational::from(BigInt::from(set.len()));
    pair - &n / BigRational::from(BigInt::from(2)) * single
        + &n * &n / BigRational::from(BigInt::from(9))
}

/// Monte Carlo estimate of the squared L2 norm.
#[derive(Clone, Copy, Debug)]
pub struct OracleEstimate {
    pub estimate: f64,
    /// Standard error of the mean; 0 when only one sample was drawn.
    pub std_error: f64,
    pub samples: u64,
}

/// Estimates `∫ D² dx` by averaging `D(x)²` over seeded uniform corners.
pub fn l2_oracle(set: &PointSet, samples: u64, seed: u64) -> Result<OracleEstimate> {
    if samples == 0 {
        return Err(Error::domain("l2_oracle requires samples >= 1"));
    }
    let pts = set.coords_f64();
    let n = pts.len() as f64;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut sum = CompensatedSum::default();
    let mut sum_sq = CompensatedSum::default();
    for _ in 0..samples {
        let cx: f64 = rng.gen();
        let cy: f64 = rng.gen();
        let count = pts.iter().filter(|&&(x, y)| x < cx && y < cy).count();
        let d = count as f64 - n * cx * cy;
        sum.add(d * d);
        sum_sq.add(d * d * d * d);
    }
    let m = samples as f64;
    let mean = sum.value() / m;
    let std_error = if samples > 1 {
        let var = (sum_sq.value() / m - mean * mean).max(0.0) * m / (m - 1.0);
        (var / m).sqrt()
    } else {
        0.0
    };
    Ok(OracleEstimate {
        estimate: mean,
        std_error,
        samples,
    })
}

/// `sqrt(l2_squared) / sqrt(ln N)`; requires `N >= 2`.
pub fn normalized_ratio(set: &PointSet) -> Result<f64> {
    if set.len() < 2 {
        return Err(Error::domain("normalized_ratio requires N >= 2"));
    }
    Ok(l2_squared(set).sqrt() / (set.len() as f64).ln().sqrt())
}
