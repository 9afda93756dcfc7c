//! Occupancy censuses of dyadic boxes and the master lower-bound inequality.
//!
//! For a shape `j`, `a_r(j)` counts boxes of that shape holding exactly `r`
//! points; level censuses aggregate over the `l + 1` nonnegative shapes of a
//! level. One-point boxes of level `l >= 1` are typed by how many of their
//! existing one-level-coarser parents also hold exactly one point. Boundary
//! shapes `(l, 0)` and `(0, l)` have a single parent, so their type is in
//! `{0, 1}`; this is the convention under which the edge-counting identities
//! hold exactly.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::haar::{haar_coefficient, nonneg_shapes_at_level, DyadicBox};
use crate::pointset::PointSet;

/// Cost guard for shape censuses.
pub const MAX_SHAPE_LEVEL: u32 = 24;
/// Cost guard for level censuses.
pub const MAX_CENSUS_LEVEL: u32 = 20;

/// Decomposition `N = 2^(exponent + kappa)` with `kappa` in `[0, 1)`.
#[derive(Clone, Copy, Debug)]
pub struct DyadicSplit {
    pub exponent: u32,
    pub kappa: f64,
}

/// Splits `n >= 1` as `2^(M + kappa)`; exact powers of two yield `kappa = 0`.
pub fn dyadic_split(n: usize) -> Result<DyadicSplit> {
    if n == 0 {
        return Err(Error::domain("dyadic split requires n >= 1"));
    }
    let exponent = n.ilog2();
    let kappa = if n.is_power_of_two() {
        0.0
    } else {
        (n as f64).log2() - exponent as f64
    };
    Ok(DyadicSplit { exponent, kappa })
}

/// Occupancy map of a shape: box position -> indices of inside points.
/// Ordered, so float sums over boxes are iteration-order deterministic.
pub(crate) fn occupancy_map(set: &PointSet, j1: u32, j2: u32) -> BTreeMap<(u64, u64), Vec<u32>> {
    let mut map: BTreeMap<(u64, u64), Vec<u32>> = BTreeMap::new();
    for (i, p) in set.points().iter().enumerate() {
        let key = (p.x().scaled_floor(j1), p.y().scaled_floor(j2));
        map.entry(key).or_default().push(i as u32);
    }
    map
}

/// Occupancy counts of a shape: box position -> number of inside points
/// (occupied boxes only).
pub fn occupancy_counts(set: &PointSet, j1: u32, j2: u32) -> BTreeMap<(u64, u64), u64> {
    occupancy_map(set, j1, j2)
        .into_iter()
        .map(|(k, v)| (k, v.len() as u64))
        .collect()
}

/// Occupancy histogram of one shape: `r -> a_r(j)`, including `r = 0`.
#[derive(Clone, Debug)]
pub struct ShapeCensus {
    j1: u32,
    j2: u32,
    counts: BTreeMap<u64, u64>,
}

impl ShapeCensus {
    pub fn j1(&self) -> u32 {
        self.j1
    }

    pub fn j2(&self) -> u32 {
        self.j2
    }

    pub fn level(&self) -> u32 {
        self.j1 + self.j2
    }

    pub fn total_boxes(&self) -> u64 {
        1u64 << self.level()
    }

    /// `a_r(j)`.
    pub fn count(&self, r: u64) -> u64 {
        self.counts.get(&r).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    /// Exact integer identities: counts sum to the number of boxes, weighted
    /// counts sum to `N`, and empty boxes number at least `2^|j| - N`.
    pub fn check_identities(&self, n: usize) -> Result<()> {
        let boxes: u64 = self.counts.values().sum();
        if boxes != self.total_boxes() {
            return Err(Error::inconsistency(format!(
                "shape ({},{}): box count {} != {}",
                self.j1,
                self.j2,
                boxes,
                self.total_boxes()
            )));
        }
        let weighted: u64 = self.counts.iter().map(|(r, c)| r * c).sum();
        if weighted != n as u64 {
            return Err(Error::inconsistency(format!(
                "shape ({},{}): weighted count {} != N = {}",
                self.j1, self.j2, weighted, n
            )));
        }
        let floor = self.total_boxes().saturating_sub(n as u64);
        if self.count(0) < floor {
            return Err(Error::inconsistency(format!(
                "shape ({},{}): a_0 = {} below floor {}",
                self.j1,
                self.j2,
                self.count(0),
                floor
            )));
        }
        Ok(())
    }
}

/// Exact occupancy histogram for one shape.
pub fn shape_census(set: &PointSet, j1: u32, j2: u32) -> Result<ShapeCensus> {
    if j1 + j2 > MAX_SHAPE_LEVEL {
        return Err(Error::size_limit(format!(
            "shape census level {} > {}",
            j1 + j2,
            MAX_SHAPE_LEVEL
        )));
    }
    let map = occupancy_map(set, j1, j2);
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for ids in map.values() {
        *counts.entry(ids.len() as u64).or_insert(0) += 1;
    }
    let occupied = map.len() as u64;
    let empty = (1u64 << (j1 + j2)) - occupied;
    if empty > 0 {
        counts.insert(0, empty);
    }
    Ok(ShapeCensus { j1, j2, counts })
}

/// Type counts of one-point boxes at a level: `b_u` counts boxes whose
/// existing parents include exactly `u` one-point boxes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TypeCounts {
    pub b0: u64,
    pub b1: u64,
    pub b2: u64,
}

impl TypeCounts {
    pub fn total(&self) -> u64 {
        self.b0 + self.b1 + self.b2
    }
}

/// Aggregated census of all shapes at one level.
#[derive(Clone, Debug)]
pub struct LevelCensus {
    level: u32,
    counts: BTreeMap<u64, u64>,
    types: Option<TypeCounts>,
}

impl LevelCensus {
    pub fn level(&self) -> u32 {
        self.level
    }

    /// `a_r(l)`.
    pub fn count(&self, r: u64) -> u64 {
        self.counts.get(&r).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    /// Type counts; present for levels `>= 1`.
    pub fn types(&self) -> Option<&TypeCounts> {
        self.types.as_ref()
    }

    pub fn total_boxes(&self) -> u64 {
        (self.level as u64 + 1) << self.level
    }

    /// Per-level identities: counts sum to `(l+1) 2^l` boxes and weighted
    /// counts to `(l+1) N`; for `l >= 1` the types partition the one-point
    /// boxes.
    pub fn check_identities(&self, n: usize) -> Result<()> {
        let boxes: u64 = self.counts.values().sum();
        if boxes != self.total_boxes() {
            return Err(Error::inconsistency(format!(
                "level {}: box count {} != {}",
                self.level,
                boxes,
                self.total_boxes()
            )));
        }
        let weighted: u64 = self.counts.iter().map(|(r, c)| r * c).sum();
        let expected = (self.level as u64 + 1) * n as u64;
        if weighted != expected {
            return Err(Error::inconsistency(format!(
                "level {}: weighted count {} != (l+1)N = {}",
                self.level, weighted, expected
            )));
        }
        if let Some(t) = &self.types {
            if t.total() != self.count(1) {
                return Err(Error::inconsistency(format!(
                    "level {}: type counts {:?} do not partition a_1 = {}",
                    self.level,
                    t,
                    self.count(1)
                )));
            }
        }
        Ok(())
    }
}

/// Checks the identities linking consecutive levels:
/// `2 a_1(l) = b_1(l+1) + 2 b_2(l+1)` (edge count of the one-point
/// parent/child bipartite graph) and the difference identity
/// `2 b_0(l+1) + b_1(l+1) = 2 a_1(l+1) - 2 a_1(l)`.
pub fn check_adjacent_levels(coarse: &LevelCensus, fine: &LevelCensus) -> Result<()> {
    if fine.level() != coarse.level() + 1 {
        return Err(Error::domain("censuses must be at consecutive levels"));
    }
    let t = fine
        .types()
        .ok_or_else(|| Error::domain("fine census lacks type counts"))?;
    if 2 * coarse.count(1) != t.b1 + 2 * t.b2 {
        return Err(Error::inconsistency(format!(
            "levels {}->{}: 2 a_1 = {} but b_1 + 2 b_2 = {}",
            coarse.level(),
            fine.level(),
            2 * coarse.count(1),
            t.b1 + 2 * t.b2
        )));
    }
    let lhs = 2 * t.b0 + t.b1;
    let rhs = 2 * fine.count(1) as i64 - 2 * coarse.count(1) as i64;
    if lhs as i64 != rhs {
        return Err(Error::inconsistency(format!(
            "levels {}->{}: 2 b_0 + b_1 = {} but 2 a_1(l+1) - 2 a_1(l) = {}",
            coarse.level(),
            fine.level(),
            lhs,
            rhs
        )));
    }
    Ok(())
}

fn one_point_boxes(maps: &[BTreeMap<(u64, u64), Vec<u32>>]) -> Vec<(usize, (u64, u64))> {
    let mut out = Vec::new();
    for (shape_idx, map) in maps.iter().enumerate() {
        for (&key, ids) in map {
            if ids.len() == 1 {
                out.push((shape_idx, key));
            }
        }
    }
    out
}

/// Census of all `level + 1` shapes at `level`, with type counts for
/// `level >= 1`.
pub fn level_census(set: &PointSet, level: u32) -> Result<LevelCensus> {
    if level > MAX_CENSUS_LEVEL {
        return Err(Error::size_limit(format!(
            "level census {} > {}",
            level, MAX_CENSUS_LEVEL
        )));
    }
    let shapes = nonneg_shapes_at_level(level);
    let maps: Vec<_> = shapes
        .iter()
        .map(|s| occupancy_map(set, s.j1() as u32, s.j2() as u32))
        .collect();

    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut occupied_total = 0u64;
    for map in &maps {
        for ids in map.values() {
            *counts.entry(ids.len() as u64).or_insert(0) += 1;
        }
        occupied_total += map.len() as u64;
    }
    let total_boxes = (level as u64 + 1) << level;
    if total_boxes > occupied_total {
        counts.insert(0, total_boxes - occupied_total);
    }

    let types = if level >= 1 {
        let parent_shapes = nonneg_shapes_at_level(level - 1);
        let parent_maps: Vec<_> = parent_shapes
            .iter()
            .map(|s| occupancy_map(set, s.j1() as u32, s.j2() as u32))
            .collect();
        // parent shapes are indexed by j1: parent of (j1, j2) via the x-split
        // is (j1-1, j2) at index j1-1, via the y-split (j1, j2-1) at index j1
        let mut t = TypeCounts::default();
        for (shape_idx, (m1, m2)) in one_point_boxes(&maps) {
            let j1 = shapes[shape_idx].j1() as u32;
            let j2 = shapes[shape_idx].j2() as u32;
            let mut u = 0u64;
            if j1 >= 1 {
                let pm = parent_maps[(j1 - 1) as usize].get(&(m1 / 2, m2));
                if pm.map(|ids| ids.len()) == Some(1) {
                    u += 1;
                }
            }
            if j2 >= 1 {
                let pm = parent_maps[j1 as usize].get(&(m1, m2 / 2));
                if pm.map(|ids| ids.len()) == Some(1) {
                    u += 1;
                }
            }
            match u {
                0 => t.b0 += 1,
                1 => t.b1 += 1,
                _ => t.b2 += 1,
            }
        }
        Some(t)
    } else {
        None
    };

    Ok(LevelCensus {
        level,
        counts,
        types,
    })
}

/// Bundle sum of squares for a box known to hold exactly the one point `z`:
/// both children then hold exactly `z` too, so all three coefficients reduce
/// to a point term minus the smooth part.
fn one_point_bundle_sum_squares(n: usize, bx: &DyadicBox, z: &crate::Point2) -> f64 {
    let smooth_parent = n as f64 * 2f64.powi(-2 * (bx.level() as i32) - 4);
    let smooth_child = n as f64 * 2f64.powi(-2 * (bx.level() as i32 + 1) - 4);
    let mu_p = crate::haar::point_term(bx, z).expect("point inside parent") - smooth_parent;
    let child_x = bx.x_split_child(z);
    let child_y = bx.y_split_child(z);
    let mu_x = crate::haar::point_term(&child_x, z).expect("point inside child") - smooth_child;
    let mu_y = crate::haar::point_term(&child_y, z).expect("point inside child") - smooth_child;
    mu_p * mu_p + mu_x * mu_x + mu_y * mu_y
}

/// A one-point box with its two same-point children one level finer, and the
/// sum of the three squared Haar coefficients.
#[derive(Clone, Debug)]
pub struct CoefficientBundle {
    pub parent: DyadicBox,
    pub child_x: DyadicBox,
    pub child_y: DyadicBox,
    pub mu_parent: f64,
    pub mu_child_x: f64,
    pub mu_child_y: f64,
    pub sum_squares: f64,
}

/// Builds the bundle for a box holding exactly one point of `set`.
pub fn coefficient_bundle(set: &PointSet, parent: &DyadicBox) -> Result<CoefficientBundle> {
    let inside: Vec<_> = set.points().iter().filter(|p| parent.contains(p)).collect();
    if inside.len() != 1 {
        return Err(Error::domain(format!(
            "bundle parent {} holds {} points, need exactly 1",
            parent,
            inside.len()
        )));
    }
    let z = inside[0];
    let child_x = parent.x_split_child(z);
    let child_y = parent.y_split_child(z);
    let mu_parent = haar_coefficient(set, parent).value;
    let mu_child_x = haar_coefficient(set, &child_x).value;
    let mu_child_y = haar_coefficient(set, &child_y).value;
    Ok(CoefficientBundle {
        parent: parent.clone(),
        child_x,
        child_y,
        mu_parent,
        mu_child_x,
        mu_child_y,
        sum_squares: mu_parent * mu_parent + mu_child_x * mu_child_x + mu_child_y * mu_child_y,
    })
}

/// Components of the master lower bound.
#[derive(Clone, Copy, Debug)]
pub struct MasterParts {
    /// Empty-box sum over levels `0..=cut_level`, from exact censuses.
    pub empty_exact: f64,
    /// Closed-form lower bound on the empty-box sum beyond `cut_level`.
    pub empty_tail: f64,
    /// Bundle sum over one-point boxes at the base level `M`.
    pub base_bundles: f64,
    /// Type-weighted bundle sum at level `M + 1` (weight `2 - u`).
    pub weighted_bundles: f64,
    pub cut_level: u32,
    pub split: DyadicSplit,
}

impl MasterParts {
    pub fn total(&self) -> f64 {
        self.empty_exact + self.empty_tail + self.base_bundles + self.weighted_bundles
    }
}

/// `Σ_{l>=start} (l+1) x^l` for `|x| < 1`.
fn weighted_geometric_tail(x: f64, start: u32) -> f64 {
    let s = start as f64;
    x.powi(start as i32) * ((s + 1.0) - s * x) / ((1.0 - x) * (1.0 - x))
}

fn empty_level_count(set: &PointSet, level: u32) -> u64 {
    let mut occupied = 0u64;
    for shape in nonneg_shapes_at_level(level) {
        occupied += occupancy_map(set, shape.j1() as u32, shape.j2() as u32).len() as u64;
    }
    ((level as u64 + 1) << level) - occupied
}

/// Evaluates the right side of the master inequality:
///
/// - the empty-box part of the Parseval sum, exact by census up to a cut
///   level and bounded below beyond it by the closed-form geometric tail
///   with `a_0(l) >= (l+1)(2^l - N)`;
/// - `2^M` times the bundle sum over one-point boxes at level `M`;
/// - `(2-u) 2^M` times the bundle sum over type-`u` one-point boxes at level
///   `M + 1`.
///
/// Every part underestimates its exact counterpart, so the total is a true
/// lower bound for the squared L2 norm.
pub fn master_parts(set: &PointSet) -> Result<MasterParts> {
    let n = set.len();
    if n < 2 {
        return Err(Error::domain("master bound requires N >= 2"));
    }
    let split = dyadic_split(n)?;
    let m = split.exponent;
    if m + 2 > MAX_CENSUS_LEVEL {
        return Err(Error::size_limit(format!(
            "master bound needs censuses at level {} > {}",
            m + 2,
            MAX_CENSUS_LEVEL
        )));
    }
    let cut = (m + 8).min(MAX_SHAPE_LEVEL);
    let nf = n as f64;

    let mut empty_exact = 0.0;
    for level in 0..=cut {
        let a0 = empty_level_count(set, level) as f64;
        let mu_empty = nf * 2f64.powi(-2 * level as i32 - 4);
        empty_exact += 2f64.powi(level as i32) * a0 * mu_empty * mu_empty;
    }

    // tail: sum over l > cut of (l+1)(2^l - N) 2^l N^2 2^(-4l-8), all terms
    // nonnegative since cut >= M
    let tail_quarter = weighted_geometric_tail(0.25, cut + 1);
    let tail_eighth = weighted_geometric_tail(0.125, cut + 1);
    let empty_tail = (nf * nf / 256.0) * (tail_quarter - nf * tail_eighth);

    let mut base_bundles = 0.0;
    let parent_shapes = nonneg_shapes_at_level(m);
    let parent_maps: Vec<_> = parent_shapes
        .iter()
        .map(|s| occupancy_map(set, s.j1() as u32, s.j2() as u32))
        .collect();
    for (shape, map) in parent_shapes.iter().zip(&parent_maps) {
        let (j1, j2) = (shape.j1() as u32, shape.j2() as u32);
        for (&(m1, m2), ids) in map {
            if ids.len() == 1 {
                let bx = DyadicBox::new(j1, j2, m1, m2)?;
                let z = &set.points()[ids[0] as usize];
                base_bundles +=
                    2f64.powi(m as i32) * one_point_bundle_sum_squares(n, &bx, z);
            }
        }
    }

    let mut weighted_bundles = 0.0;
    for shape in nonneg_shapes_at_level(m + 1) {
        let (j1, j2) = (shape.j1() as u32, shape.j2() as u32);
        for (&(m1, m2), ids) in &occupancy_map(set, j1, j2) {
            if ids.len() != 1 {
                continue;
            }
            let mut u = 0u64;
            if j1 >= 1 && parent_maps[(j1 - 1) as usize].get(&(m1 / 2, m2)).map(|v| v.len()) == Some(1) {
                u += 1;
            }
            if j2 >= 1 && parent_maps[j1 as usize].get(&(m1, m2 / 2)).map(|v| v.len()) == Some(1) {
                u += 1;
            }
            let bx = DyadicBox::new(j1, j2, m1, m2)?;
            let z = &set.points()[ids[0] as usize];
            weighted_bundles += (2 - u) as f64
                * 2f64.powi(m as i32)
                * one_point_bundle_sum_squares(n, &bx, z);
        }
    }

    Ok(MasterParts {
        empty_exact,
        empty_tail,
        base_bundles,
        weighted_bundles,
        cut_level: cut,
        split,
    })
}

/// Total of [`master_parts`].
pub fn master_rhs(set: &PointSet) -> Result<f64> {
    Ok(master_parts(set)?.total())
}

/// The empty-box-only lower bound: the series
/// `Σ_{l>=M+1} (l+1) 2^l (2^l - N) N² 2^(-4l-8)`, summed term by term.
pub fn baseline_rhs(set: &PointSet) -> Result<f64> {
    let n = set.len();
    if n < 2 {
        return Err(Error::domain("baseline bound requires N >= 2"));
    }
    let split = dyadic_split(n)?;
    let nf = n as f64;
    let mut sum = 0.0;
    for level in (split.exponent + 1)..(split.exponent + 120) {
        let l = level as i32;
        let term =
            (level as f64 + 1.0) * 2f64.powi(l) * (2f64.powi(l) - nf) * nf * nf
                * 2f64.powi(-4 * l - 8);
        sum += term;
    }
    Ok(sum)
}
