//! Finite point sets in the half-open unit square, with generators for the
//! standard low-discrepancy families and a plain-text file format.
//!
//! Sets are multisets: duplicate points are allowed everywhere and counted
//! with multiplicity.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::coord::{parse_field, Coord};
use crate::error::{Error, Result};

/// A point in `[0,1)^2`.
#[derive(Clone, Debug)]
pub struct Point2 {
    x: Coord,
    y: Coord,
}

impl Point2 {
    pub fn new(x: Coord, y: Coord) -> Result<Self> {
        if !x.in_unit_half_open() || !y.in_unit_half_open() {
            return Err(Error::domain(format!(
                "point ({}, {}) outside [0,1)^2",
                x, y
            )));
        }
        Ok(Point2 { x, y })
    }

    pub fn from_f64(x: f64, y: f64) -> Result<Self> {
        Point2::new(Coord::Approx(x), Coord::Approx(y))
    }

    /// Exact rational point `(xn/xd, yn/yd)`.
    pub fn from_ratio(xn: u64, xd: u64, yn: u64, yd: u64) -> Result<Self> {
        Point2::new(Coord::ratio(xn, xd), Coord::ratio(yn, yd))
    }

    pub fn x(&self) -> &Coord {
        &self.x
    }

    pub fn y(&self) -> &Coord {
        &self.y
    }

    pub fn xy_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

/// An ordered multiset of points in `[0,1)^2`; never empty.
#[derive(Clone, Debug)]
pub struct PointSet {
    points: Vec<Point2>,
}

impl PointSet {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("point set must contain at least one point"));
        }
        Ok(PointSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires N >= 1
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    /// True when every coordinate carries the exact rational representation.
    pub fn all_exact(&self) -> bool {
        self.points
            .iter()
            .all(|p| p.x().is_exact() && p.y().is_exact())
    }

    pub fn coords_f64(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(Point2::xy_f64).collect()
    }
}

/// Base-2 radical inverse of `i` with `bits` digits, as `(numerator, 2^bits)`.
fn radical_inverse_base2(i: u64, bits: u32) -> u64 {
    let mut rev = 0u64;
    for b in 0..bits {
        if i >> b & 1 == 1 {
            rev |= 1 << (bits - 1 - b);
        }
    }
    rev
}

/// The `2^n`-point set pairing `i/2^n` with the base-2 radical inverse of `i`.
/// All coordinates are exact dyadic rationals.
pub fn hammersley(n: u32) -> Result<PointSet> {
    if n > 30 {
        return Err(Error::size_limit(format!("hammersley n = {} > 30", n)));
    }
    let count = 1u64 << n;
    let points = (0..count)
        .map(|i| Point2::from_ratio(i, count, radical_inverse_base2(i, n), count))
        .collect::<Result<Vec<_>>>()?;
    PointSet::new(points)
}

/// Fibonacci numbers with `F_1 = F_2 = 1`.
fn fibonacci_number(k: u32) -> u64 {
    let (mut a, mut b) = (1u64, 1u64);
    for _ in 2..k {
        let next = a + b;
        a = b;
        b = next;
    }
    b
}

/// The rank-1 lattice `{(i/F_k, {i F_{k-1} / F_k})}` with `F_k` points.
///
/// With `symmetrize` set, each point is also reflected as `(x, 1-y)`, the
/// reflected value 1 folded back to 0, doubling the set (with multiplicity).
pub fn fibonacci_lattice(k: u32, symmetrize: bool) -> Result<PointSet> {
    if !(2..=35).contains(&k) {
        return Err(Error::size_limit(format!(
            "fibonacci k = {} outside 2..=35",
            k
        )));
    }
    let f_k = fibonacci_number(k);
    let f_prev = fibonacci_number(k - 1);
    let mut points = Vec::with_capacity(2 * f_k as usize);
    for i in 0..f_k {
        points.push(Point2::from_ratio(i, f_k, i * f_prev % f_k, f_k)?);
    }
    if symmetrize {
        for i in 0..f_k {
            let y = i * f_prev % f_k;
            let reflected = if y == 0 { 0 } else { f_k - y }; // 1 - y, folding 1 to 0
            points.push(Point2::from_ratio(i, f_k, reflected, f_k)?);
        }
    }
    PointSet::new(points)
}

/// `n` points from a seeded deterministic generator; same seed, same set.
pub fn random_uniform(n: usize, seed: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::domain("random_uniform requires n >= 1"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| Point2::from_f64(rng.gen::<f64>(), rng.gen::<f64>()))
        .collect::<Result<Vec<_>>>()?;
    PointSet::new(points)
}

/// Parses the text format: one point per line, two whitespace-separated
/// fields, each either a decimal in `[0,1)` or an exact rational `p/q`.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_points<R: Read>(reader: R) -> Result<PointSet> {
    let reader = BufReader::new(reader);
    let mut points = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (fx, fy) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected two fields, got {:?}", trimmed),
                })
            }
        };
        let x = parse_field(fx, line_no)?;
        let y = parse_field(fy, line_no)?;
        points.push(Point2::new(x, y).map_err(|e| match e {
            Error::Domain(msg) => Error::domain(format!("line {}: {}", line_no, msg)),
            other => other,
        })?);
    }
    PointSet::new(points)
}

pub fn load(path: &Path) -> Result<PointSet> {
    parse_points(File::open(path)?)
}

/// Writes the text format; exact coordinates as `p/q`, floats as the shortest
/// decimal that round-trips. `save` then `load` is the identity on rational
/// sets.
pub fn write_points<W: Write>(set: &PointSet, mut writer: W) -> Result<()> {
    for p in set.points() {
        writeln!(writer, "{} {}", p.x(), p.y())?;
    }
    Ok(())
}

pub fn save(set: &PointSet, path: &Path) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    write_points(set, &mut writer)?;
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    fn assert_point_eq(p: &Point2, xn: u64, xd: u64, yn: u64, yd: u64) {
        assert_eq!(
            p.x().compare(&Coord::ratio(xn, xd)),
            Ordering::Equal,
            "x: {} vs {}/{}",
            p.x(),
            xn,
            xd
        );
        assert_eq!(
            p.y().compare(&Coord::ratio(yn, yd)),
            Ordering::Equal,
            "y: {} vs {}/{}",
            p.y(),
            yn,
            yd
        );
    }

    #[test]
    fn hammersley_zero_is_origin() {
        let set = hammersley(0).unwrap();
        assert_eq!(set.len(), 1);
        assert_point_eq(&set.points()[0], 0, 1, 0, 1);
    }

    #[test]
    fn hammersley_two_matches_radical_inverses() {
        let set = hammersley(2).unwrap();
        assert_eq!(set.len(), 4);
        let expected = [(0, 4, 0, 4), (1, 4, 2, 4), (2, 4, 1, 4), (3, 4, 3, 4)];
        for (p, (xn, xd, yn, yd)) in set.points().iter().zip(expected) {
            assert_point_eq(p, xn, xd, yn, yd);
        }
    }

    #[test]
    fn hammersley_three_coordinates_are_eighths() {
        // radical inverses of 0..8 by hand: 0, 4, 2, 6, 1, 5, 3, 7 (in units of 1/8)
        let set = hammersley(3).unwrap();
        assert_eq!(set.len(), 8);
        let inverses = [0, 4, 2, 6, 1, 5, 3, 7];
        for (i, p) in set.points().iter().enumerate() {
            assert_point_eq(p, i as u64, 8, inverses[i], 8);
        }
    }

    #[test]
    fn hammersley_size_guard() {
        assert!(matches!(hammersley(31), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn hammersley_points_distinct_up_to_12() {
        for n in 0..=12u32 {
            let set = hammersley(n).unwrap();
            let mut keys: Vec<(u64, u64)> = set
                .points()
                .iter()
                .map(|p| (p.x().scaled_floor(n), p.y().scaled_floor(n)))
                .collect();
            keys.sort_unstable();
            let before = keys.len();
            keys.dedup();
            assert_eq!(before, keys.len(), "duplicates at n={}", n);
        }
    }

    #[test]
    fn fibonacci_five_matches_enumeration() {
        let set = fibonacci_lattice(5, false).unwrap();
        assert_eq!(set.len(), 5);
        let expected = [(0, 0), (1, 3), (2, 1), (3, 4), (4, 2)];
        for (p, (xn, yn)) in set.points().iter().zip(expected) {
            assert_point_eq(p, xn, 5, yn, 5);
        }
    }

    #[test]
    fn fibonacci_two_is_single_point() {
        let set = fibonacci_lattice(2, false).unwrap();
        assert_eq!(set.len(), 1);
        assert_point_eq(&set.points()[0], 0, 1, 0, 1);
    }

    #[test]
    fn fibonacci_symmetrized_contains_reflection() {
        let set = fibonacci_lattice(5, true).unwrap();
        assert_eq!(set.len(), 10);
        // reflection of (1/5, 3/5) is (1/5, 2/5)
        let found = set.points().iter().any(|p| {
            p.x().compare(&Coord::ratio(1, 5)) == Ordering::Equal
                && p.y().compare(&Coord::ratio(2, 5)) == Ordering::Equal
        });
        assert!(found);
        // the origin reflects onto itself, so it appears twice
        let origin_count = set
            .points()
            .iter()
            .filter(|p| {
                p.x().compare(&Coord::zero()) == Ordering::Equal
                    && p.y().compare(&Coord::zero()) == Ordering::Equal
            })
            .count();
        assert_eq!(origin_count, 2);
    }

    #[test]
    fn fibonacci_denominators_divide_f_k() {
        for k in 2..=12u32 {
            let f_k = fibonacci_number(k);
            let set = fibonacci_lattice(k, false).unwrap();
            assert_eq!(set.len() as u64, f_k);
            for p in set.points() {
                for c in [p.x(), p.y()] {
                    match c {
                        Coord::Exact(r) => {
                            let den: u64 = r.denom().try_into().unwrap();
                            assert_eq!(f_k % den, 0, "denominator {} at k={}", den, k);
                        }
                        _ => panic!("fibonacci coordinates must be exact"),
                    }
                }
            }
        }
    }

    #[test]
    fn fibonacci_range_guard() {
        assert!(matches!(fibonacci_lattice(1, false), Err(Error::SizeLimit(_))));
        assert!(matches!(fibonacci_lattice(36, false), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn random_uniform_is_deterministic() {
        let a = random_uniform(5, 42).unwrap();
        let b = random_uniform(5, 42).unwrap();
        for (p, q) in a.points().iter().zip(b.points()) {
            assert_eq!(p.xy_f64(), q.xy_f64());
        }
    }

    #[test]
    fn random_uniform_stream_is_pinned() {
        // guards against silent generator/stream changes; regenerating a set
        // from the same seed must keep producing identical coordinates
        let set = random_uniform(2, 42).unwrap();
        assert_eq!(set.points()[0].xy_f64(), (0.5265574090027738, 0.5427252099031439));
        assert_eq!(set.points()[1].xy_f64(), (0.6364650991438949, 0.4059017582307767));
    }

    #[test]
    fn random_uniform_mean_sane() {
        let set = random_uniform(1000, 7).unwrap();
        let mean_x: f64 = set.points().iter().map(|p| p.xy_f64().0).sum::<f64>() / 1000.0;
        assert!((mean_x - 0.5).abs() < 0.05, "mean_x = {}", mean_x);
    }

    #[test]
    fn random_uniform_zero_rejected() {
        assert!(matches!(random_uniform(0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn generators_stay_in_unit_square() {
        let mut sets = vec![random_uniform(200, 3).unwrap()];
        for n in 0..=6 {
            sets.push(hammersley(n).unwrap());
        }
        for k in 2..=10 {
            sets.push(fibonacci_lattice(k, true).unwrap());
        }
        for set in sets {
            for p in set.points() {
                assert!(p.x().in_unit_half_open() && p.y().in_unit_half_open());
            }
        }
    }

    #[test]
    fn parse_rational_and_decimal_lines() {
        let set = parse_points("1/4 1/2\n0.25 0.5\n".as_bytes()).unwrap();
        assert_eq!(set.len(), 2);
        assert!(set.points()[0].x().is_exact());
        assert!(!set.points()[1].x().is_exact());
        assert_eq!(set.points()[1].xy_f64(), (0.25, 0.5));
    }

    #[test]
    fn parse_rejects_out_of_domain() {
        let err = parse_points("1 0.5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)), "got {:?}", err);
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = parse_points("0.1 0.2\nbogus 0.3\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {:?}", other),
        }
    }

    #[test]
    fn parse_skips_comments_and_blank_lines() {
        let set = parse_points("# header\n\n1/3 2/3\n  \n# trailing\n".as_bytes()).unwrap();
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn parse_rejects_wrong_field_count() {
        assert!(matches!(
            parse_points("0.1\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_points("0.1 0.2 0.3\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn save_load_round_trip_exact() {
        let set = fibonacci_lattice(7, true).unwrap();
        let mut buf = Vec::new();
        write_points(&set, &mut buf).unwrap();
        let back = parse_points(buf.as_slice()).unwrap();
        assert_eq!(back.len(), set.len());
        for (p, q) in set.points().iter().zip(back.points()) {
            assert_eq!(p.x().compare(q.x()), Ordering::Equal);
            assert_eq!(p.y().compare(q.y()), Ordering::Equal);
            assert!(q.x().is_exact());
        }
    }

    #[test]
    fn save_load_round_trip_float() {
        let set = random_uniform(50, 99).unwrap();
        let mut buf = Vec::new();
        write_points(&set, &mut buf).unwrap();
        let back = parse_points(buf.as_slice()).unwrap();
        for (p, q) in set.points().iter().zip(back.points()) {
            assert_eq!(p.xy_f64(), q.xy_f64(), "floats must round-trip bit-exactly");
        }
    }
}
