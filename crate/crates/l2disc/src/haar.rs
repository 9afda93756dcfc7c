//! Dyadic boxes and Haar coefficients of the discrepancy function.
//!
//! A box of shape `(j1, j2)` at position `(m1, m2)` is the half-open
//! rectangle `[m1/2^j1, (m1+1)/2^j1) x [m2/2^j2, (m2+1)/2^j2)`. The Haar
//! function supported on it is `+1` on the left-lower and right-upper
//! quarters and `-1` on the other two. Coefficients of the discrepancy
//! function have closed forms driven by the points inside the box: each
//! inside point contributes a product of distances to two box edges, and the
//! smooth part contributes `-N * 2^(-2L-4)` where `L` is the level.
//!
//! Shapes may carry `-1` components, where the Haar factor degenerates to the
//! constant 1 on `[0,1)`; these shapes are required for the Parseval identity
//! to converge to the exact squared norm.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coord::Coord;
use crate::error::{Error, Result};
use crate::pointset::{Point2, PointSet};

/// Maximum level accepted by the level-sweeping operations (cost guard).
pub const MAX_LEVEL: u32 = 24;

/// Shape exponents of a dyadic box; components are `>= -1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DyadicShape {
    j1: i32,
    j2: i32,
}

impl DyadicShape {
    pub fn new(j1: i32, j2: i32) -> Result<Self> {
        if j1 < -1 || j2 < -1 {
            return Err(Error::domain(format!(
                "shape components must be >= -1, got ({}, {})",
                j1, j2
            )));
        }
        Ok(DyadicShape { j1, j2 })
    }

    pub fn j1(&self) -> i32 {
        self.j1
    }

    pub fn j2(&self) -> i32 {
        self.j2
    }

    /// `max(0, j1) + max(0, j2)`.
    pub fn level(&self) -> u32 {
        (self.j1.max(0) + self.j2.max(0)) as u32
    }

    pub fn is_nonneg(&self) -> bool {
        self.j1 >= 0 && self.j2 >= 0
    }

    /// Number of admissible positions (1 in a `-1` component).
    pub fn position_count(&self) -> u64 {
        let n1 = if self.j1 <= 0 { 1 } else { 1u64 << self.j1 };
        let n2 = if self.j2 <= 0 { 1 } else { 1u64 << self.j2 };
        n1 * n2
    }
}

/// All shapes with the given level, including `-1` components.
///
/// Level 0 has four shapes; level `l >= 1` has `l + 3`: the `l + 1`
/// nonnegative splits of `l` plus `(-1, l)` and `(l, -1)`.
pub fn shapes_at_level(level: u32) -> Vec<DyadicShape> {
    let l = level as i32;
    let mut shapes = Vec::new();
    if level == 0 {
        for (j1, j2) in [(-1, -1), (-1, 0), (0, -1), (0, 0)] {
            shapes.push(DyadicShape { j1, j2 });
        }
    } else {
        shapes.push(DyadicShape { j1: -1, j2: l });
        shapes.push(DyadicShape { j1: l, j2: -1 });
        for i in 0..=l {
            shapes.push(DyadicShape { j1: i, j2: l - i });
        }
    }
    shapes
}

/// The nonnegative shapes with `j1 + j2 = level` (the `level + 1` splits).
pub fn nonneg_shapes_at_level(level: u32) -> Vec<DyadicShape> {
    let l = level as i32;
    (0..=l)
        .map(|i| DyadicShape { j1: i, j2: l - i })
        .collect()
}

/// A dyadic box `I_{j,m}` with nonnegative shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicBox {
    j1: u32,
    j2: u32,
    m1: u64,
    m2: u64,
}

impl DyadicBox {
    pub fn new(j1: u32, j2: u32, m1: u64, m2: u64) -> Result<Self> {
        if j1 > 32 || j2 > 32 {
            return Err(Error::size_limit(format!(
                "box shape ({}, {}) too fine",
                j1, j2
            )));
        }
        if m1 >= 1u64 << j1 || m2 >= 1u64 << j2 {
            return Err(Error::domain(format!(
                "box position ({}, {}) out of range for shape ({}, {})",
                m1, m2, j1, j2
            )));
        }
        Ok(DyadicBox { j1, j2, m1, m2 })
    }

    pub fn j1(&self) -> u32 {
        self.j1
    }

    pub fn j2(&self) -> u32 {
        self.j2
    }

    pub fn m1(&self) -> u64 {
        self.m1
    }

    pub fn m2(&self) -> u64 {
        self.m2
    }

    pub fn shape(&self) -> DyadicShape {
        DyadicShape {
            j1: self.j1 as i32,
            j2: self.j2 as i32,
        }
    }

    pub fn level(&self) -> u32 {
        self.j1 + self.j2
    }

    /// Half-open membership.
    pub fn contains(&self, p: &Point2) -> bool {
        p.x().scaled_floor(self.j1) == self.m1 && p.y().scaled_floor(self.j2) == self.m2
    }

    /// Lower-left corner and upper-right corner as floats (exact: dyadic).
    pub fn corners_f64(&self) -> (f64, f64, f64, f64) {
        let sx = 2f64.powi(-(self.j1 as i32));
        let sy = 2f64.powi(-(self.j2 as i32));
        (
            self.m1 as f64 * sx,
            self.m2 as f64 * sy,
            (self.m1 + 1) as f64 * sx,
            (self.m2 + 1) as f64 * sy,
        )
    }

    /// The half-width child (shape `(j1+1, j2)`) containing `p`; `p` must lie
    /// in this box.
    pub fn x_split_child(&self, p: &Point2) -> DyadicBox {
        debug_assert!(self.contains(p));
        DyadicBox {
            j1: self.j1 + 1,
            j2: self.j2,
            m1: p.x().scaled_floor(self.j1 + 1),
            m2: self.m2,
        }
    }

    /// The half-height child (shape `(j1, j2+1)`) containing `p`.
    pub fn y_split_child(&self, p: &Point2) -> DyadicBox {
        debug_assert!(self.contains(p));
        DyadicBox {
            j1: self.j1,
            j2: self.j2 + 1,
            m1: self.m1,
            m2: p.y().scaled_floor(self.j2 + 1),
        }
    }
}

impl fmt::Display for DyadicBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "I[j=({},{}), m=({},{})]",
            self.j1, self.j2, self.m1, self.m2
        )
    }
}

/// Quarter of a dyadic box, by half-open membership.
///
/// The sign pair follows the Haar convention: the first sign is `+` on the
/// left x-half, the second is `+` on the lower y-half; the Haar function is
/// the product of the signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quarter {
    LeftLower,
    LeftUpper,
    RightLower,
    RightUpper,
    Outside,
}

impl fmt::Display for Quarter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Quarter::LeftLower => "++",
            Quarter::LeftUpper => "+-",
            Quarter::RightLower => "-+",
            Quarter::RightUpper => "--",
            Quarter::Outside => "outside",
        };
        f.write_str(s)
    }
}

/// Classifies `z` against the four half-open quarters of `bx`.
pub fn quarter_of(bx: &DyadicBox, z: &Point2) -> Quarter {
    if !bx.contains(z) {
        return Quarter::Outside;
    }
    let left = z.x().scaled_floor(bx.j1 + 1) == 2 * bx.m1;
    let lower = z.y().scaled_floor(bx.j2 + 1) == 2 * bx.m2;
    match (left, lower) {
        (true, true) => Quarter::LeftLower,
        (true, false) => Quarter::LeftUpper,
        (false, true) => Quarter::RightLower,
        (false, false) => Quarter::RightUpper,
    }
}

/// `∫ x1 x2 h_{j,m} dx = 2^(-2|j|-4)` for nonnegative shapes, independent of
/// the position.
pub fn xy_haar_integral(shape: &DyadicShape) -> Result<f64> {
    if !shape.is_nonneg() {
        return Err(Error::domain(
            "xy_haar_integral requires a nonnegative shape",
        ));
    }
    Ok(2f64.powi(-2 * (shape.level() as i32) - 4))
}

/// Integral of the indicator of the anchored-at-`z` upper corner box
/// `[z1,1) x [z2,1)` against the Haar function of `bx`: the product of the
/// distances from `z` to the far box edge in each coordinate's half.
///
/// Requires `z` inside the box; for `z` outside, the integral is 0.
pub fn point_term(bx: &DyadicBox, z: &Point2) -> Result<f64> {
    let quarter = quarter_of(bx, z);
    if quarter == Quarter::Outside {
        return Err(Error::domain(format!("point outside box {}", bx)));
    }
    let (ax, ay, bx_edge, by_edge) = bx.corners_f64();
    let (zx, zy) = z.xy_f64();
    let fx = match quarter {
        Quarter::LeftLower | Quarter::LeftUpper => zx - ax,
        _ => bx_edge - zx,
    };
    let fy = match quarter {
        Quarter::LeftLower | Quarter::RightLower => zy - ay,
        _ => by_edge - zy,
    };
    Ok(fx * fy)
}

/// Exact-rational version of [`point_term`].
pub fn point_term_exact(bx: &DyadicBox, z: &Point2) -> Result<BigRational> {
    let quarter = quarter_of(bx, z);
    if quarter == Quarter::Outside {
        return Err(Error::domain(format!("point outside box {}", bx)));
    }
    let den1 = BigInt::one() << bx.j1;
    let den2 = BigInt::one() << bx.j2;
    let ax = BigRational::new(BigInt::from(bx.m1), den1.clone());
    let bx_edge = BigRational::new(BigInt::from(bx.m1 + 1), den1);
    let ay = BigRational::new(BigInt::from(bx.m2), den2.clone());
    let by_edge = BigRational::new(BigInt::from(bx.m2 + 1), den2);
    let zx = z.x().to_rational();
    let zy = z.y().to_rational();
    let fx = match quarter {
        Quarter::LeftLower | Quarter::LeftUpper => zx - ax,
        _ => bx_edge - zx,
    };
    let fy = match quarter {
        Quarter::LeftLower | Quarter::RightLower => zy - ay,
        _ => by_edge - zy,
    };
    Ok(fx * fy)
}

/// Which closed form produced a coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivation {
    /// Box holds no point: `-N * 2^(-2L-4)`.
    EmptyBox,
    /// Box holds exactly one point: its point term minus the smooth part.
    SinglePoint,
    /// General sum over all inside points.
    PointSum,
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Derivation::EmptyBox => "empty",
            Derivation::SinglePoint => "single-point",
            Derivation::PointSum => "point-sum",
        };
        f.write_str(s)
    }
}

/// A Haar coefficient of the discrepancy function.
#[derive(Clone, Debug)]
pub struct HaarCoefficient {
    pub bx: DyadicBox,
    pub value: f64,
    pub derivation: Derivation,
}

/// Haar coefficient of the discrepancy function of `set` on `bx`:
/// sum of point terms over inside points minus `N * 2^(-2L-4)`.
pub fn haar_coefficient(set: &PointSet, bx: &DyadicBox) -> HaarCoefficient {
    let inside: Vec<&Point2> = set.points().iter().filter(|p| bx.contains(p)).collect();
    let smooth = set.len() as f64 * 2f64.powi(-2 * (bx.level() as i32) - 4);
    let mut value = 0.0;
    for p in &inside {
        value += point_term(bx, p).expect("filtered to inside points");
    }
    value -= smooth;
    let derivation = match inside.len() {
        0 => Derivation::EmptyBox,
        1 => Derivation::SinglePoint,
        _ => Derivation::PointSum,
    };
    HaarCoefficient {
        bx: bx.clone(),
        value,
        derivation,
    }
}

/// Exact-rational Haar coefficient.
pub fn haar_coefficient_exact(set: &PointSet, bx: &DyadicBox) -> BigRational {
    let mut value = BigRational::zero();
    for p in set.points() {
        if bx.contains(p) {
            value += point_term_exact(bx, p).expect("inside");
        }
    }
    let shift = 2 * bx.level() + 4;
    value -= BigRational::new(BigInt::from(set.len()), BigInt::one() << shift);
    value
}

fn linear_factor(j: i32) -> f64 {
    if j == -1 {
        0.5 // ∫ x dx over [0,1)
    } else {
        -(2f64.powi(-2 * j - 2)) // 1-D ∫ x h_{j,m} dx, independent of m
    }
}

fn point_factor(j: i32, m: u64, c: &Coord) -> f64 {
    if j == -1 {
        return 1.0 - c.to_f64();
    }
    let j = j as u32;
    if c.scaled_floor(j) != m {
        return 0.0;
    }
    let scale = 2f64.powi(-(j as i32));
    let v = c.to_f64();
    if c.scaled_floor(j + 1) == 2 * m {
        -(v - m as f64 * scale)
    } else {
        -((m + 1) as f64 * scale - v)
    }
}

/// Haar coefficient for a general shape, where a `-1` component replaces the
/// Haar factor with the constant 1 on `[0,1)`. The position must be 0 in any
/// `-1` component. Agrees with [`haar_coefficient`] on nonnegative shapes.
pub fn haar_coefficient_general(
    set: &PointSet,
    shape: &DyadicShape,
    m1: u64,
    m2: u64,
) -> Result<f64> {
    for (j, m) in [(shape.j1, m1), (shape.j2, m2)] {
        if j == -1 {
            if m != 0 {
                return Err(Error::domain(
                    "position must be 0 in a -1 shape component",
                ));
            }
        } else if m >= 1u64 << j {
            return Err(Error::domain(format!(
                "position {} out of range for shape component {}",
                m, j
            )));
        }
    }
    let mut sum = 0.0;
    for p in set.points() {
        sum += point_factor(shape.j1, m1, p.x()) * point_factor(shape.j2, m2, p.y());
    }
    let smooth = set.len() as f64 * linear_factor(shape.j1) * linear_factor(shape.j2);
    Ok(sum - smooth)
}

/// Contribution of a single shape to the Parseval sum:
/// `2^|j| * Σ_m mu_m^2`, grouping empty boxes in closed form.
fn shape_parseval_contribution(set: &PointSet, shape: &DyadicShape) -> f64 {
    let smooth = set.len() as f64 * linear_factor(shape.j1) * linear_factor(shape.j2);
    // ordered map: the sum over boxes must not depend on hash order
    let mut occupied: BTreeMap<(u64, u64), f64> = BTreeMap::new();
    for p in set.points() {
        let k1 = if shape.j1 == -1 {
            0
        } else {
            p.x().scaled_floor(shape.j1 as u32)
        };
        let k2 = if shape.j2 == -1 {
            0
        } else {
            p.y().scaled_floor(shape.j2 as u32)
        };
        let term = point_factor(shape.j1, k1, p.x()) * point_factor(shape.j2, k2, p.y());
        *occupied.entry((k1, k2)).or_insert(0.0) += term;
    }
    let mut sum = 0.0;
    for point_sum in occupied.values() {
        let mu = point_sum - smooth;
        sum += mu * mu;
    }
    let empty = shape.position_count() - occupied.len() as u64;
    sum += empty as f64 * smooth * smooth;
    2f64.powi(shape.level() as i32) * sum
}

/// Per-level contributions to the Parseval sum up to `max_level`.
#[derive(Clone, Copy, Debug)]
pub struct LevelContribution {
    pub level: u32,
    pub contribution: f64,
    pub cumulative: f64,
}

/// Parseval profile: contribution of every shape with level `<= max_level`
/// (including `-1` components), grouped by level, with running totals.
pub fn parseval_profile(set: &PointSet, max_level: u32) -> Result<Vec<LevelContribution>> {
    if max_level > MAX_LEVEL {
        return Err(Error::size_limit(format!(
            "parseval level {} > {}",
            max_level, MAX_LEVEL
        )));
    }
    let mut profile = Vec::with_capacity(max_level as usize + 1);
    let mut cumulative = 0.0;
    for level in 0..=max_level {
        let contribution: f64 = shapes_at_level(level)
            .iter()
            .map(|s| shape_parseval_contribution(set, s))
            .sum();
        cumulative += contribution;
        profile.push(LevelContribution {
            level,
            contribution,
            cumulative,
        });
    }
    Ok(profile)
}

/// Truncated Parseval sum `Σ_{|j| <= max_level} 2^|j| Σ_m mu_{j,m}^2`.
///
/// Nondecreasing in `max_level` and bounded above by the exact squared norm.
pub fn parseval_partial(set: &PointSet, max_level: u32) -> Result<f64> {
    Ok(parseval_profile(set, max_level)?
        .last()
        .map(|c| c.cumulative)
        .unwrap_or(0.0))
}

/// Writes one CSV row per box of every shape with level `<= max_level`.
/// Columns: `j1,j2,m1,m2,mu,derivation`. Row count grows like `4^level`.
pub fn write_coefficient_csv<W: Write>(
    set: &PointSet,
    max_level: u32,
    writer: &mut W,
) -> Result<()> {
    if max_level > MAX_LEVEL {
        return Err(Error::size_limit(format!(
            "coefficient dump level {} > {}",
            max_level, MAX_LEVEL
        )));
    }
    writeln!(writer, "j1,j2,m1,m2,mu,derivation")?;
    for level in 0..=max_level {
        for shape in shapes_at_level(level) {
            let smooth = set.len() as f64 * linear_factor(shape.j1) * linear_factor(shape.j2);
            let mut occupied: BTreeMap<(u64, u64), (f64, u64)> = BTreeMap::new();
            for p in set.points() {
                let k1 = if shape.j1 == -1 {
                    0
                } else {
                    p.x().scaled_floor(shape.j1 as u32)
                };
                let k2 = if shape.j2 == -1 {
                    0
                } else {
                    p.y().scaled_floor(shape.j2 as u32)
                };
                let term = point_factor(shape.j1, k1, p.x()) * point_factor(shape.j2, k2, p.y());
                let entry = occupied.entry((k1, k2)).or_insert((0.0, 0));
                entry.0 += term;
                entry.1 += 1;
            }
            let n1 = if shape.j1 <= 0 { 1 } else { 1u64 << shape.j1 };
            let n2 = if shape.j2 <= 0 { 1 } else { 1u64 << shape.j2 };
            for m1 in 0..n1 {
                for m2 in 0..n2 {
                    let (mu, count) = match occupied.get(&(m1, m2)) {
                        Some(&(s, c)) => (s - smooth, c),
                        None => (-smooth, 0),
                    };
                    let derivation = match count {
                        0 => Derivation::EmptyBox,
                        1 => Derivation::SinglePoint,
                        _ => Derivation::PointSum,
                    };
                    writeln!(
                        writer,
                        "{},{},{},{},{:.11e},{}",
                        shape.j1, shape.j2, m1, m2, mu, derivation
                    )?;
                }
            }
        }
    }
    Ok(())
}
