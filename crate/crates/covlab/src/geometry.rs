//! Exact coverage queries for unions of axis-aligned boxes and balls.
//!
//! Shapes are closed sets: two boxes that share a face cover the seam, and
//! abutting intervals close a gap. For boxes every query is exact, built on
//! one observation: if the grid induced by all shape boundaries is laid over
//! the target, then coverage is constant on the open interior of every grid
//! cell, so a single interior probe point decides the whole cell. Verdicts
//! on balls come from certified subdivision instead and may be
//! `UnknownAtResolution`, but are never wrong.
//!
//! Every floating-point tolerance in this module routes through [`EPS`]:
//! coordinates closer than `EPS` are merged, cell volumes below `EPS` are
//! ignored, and gaps must exceed `EPS` to be reported.

use crate::error::{CovlabError, Result};

/// Module-wide tolerance for coordinate dedup, membership slack, cell
/// volumes, and gap lengths.
pub const EPS: f64 = 1e-12;

/// Largest dimension the exact grid decomposition supports. The grid has
/// `(2n+1)^d` cells in the worst case, which stops being "exact and cheap"
/// beyond dimension four.
pub const MAX_DIM: usize = 4;

/// Default recursion depth for ball-union verdicts.
pub const DEFAULT_BALL_DEPTH: u32 = 12;

fn check_dim(d: usize, what: &'static str) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        return Err(CovlabError::invalid(
            what,
            format!("dimension must lie in 1..={MAX_DIM}, got {d}"),
        ));
    }
    Ok(())
}

/// A closed axis-aligned box `prod_i [corner_i, corner_i + sides_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedBox {
    corner: Vec<f64>,
    sides: Vec<f64>,
}

impl AlignedBox {
    pub fn new(corner: Vec<f64>, sides: Vec<f64>) -> Result<Self> {
        check_dim(corner.len(), "corner")?;
        if corner.len() != sides.len() {
            return Err(CovlabError::DimensionMismatch(format!(
                "corner has dimension {} but sides has {}",
                corner.len(),
                sides.len()
            )));
        }
        if corner.iter().any(|c| !c.is_finite()) {
            return Err(CovlabError::invalid("corner", "coordinates must be finite"));
        }
        if sides.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(CovlabError::invalid("sides", "side lengths must be positive and finite"));
        }
        Ok(AlignedBox { corner, sides })
    }

    /// Cube `[corner, corner + side]^d`.
    pub fn cube(corner: Vec<f64>, side: f64) -> Result<Self> {
        let d = corner.len();
        AlignedBox::new(corner, vec![side; d])
    }

    /// The unit cube `[0,1]^d`.
    pub fn unit(d: usize) -> Result<Self> {
        AlignedBox::new(vec![0.0; d], vec![1.0; d])
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    pub fn corner(&self) -> &[f64] {
        &self.corner
    }

    pub fn sides(&self) -> &[f64] {
        &self.sides
    }

    pub fn low(&self, axis: usize) -> f64 {
        self.corner[axis]
    }

    pub fn high(&self, axis: usize) -> f64 {
        self.corner[axis] + self.sides[axis]
    }

    pub fn volume(&self) -> f64 {
        self.sides.iter().product()
    }

    /// Closed membership with `EPS` slack on every face.
    pub fn contains(&self, point: &[f64]) -> bool {
        debug_assert_eq!(point.len(), self.dim());
        self.corner
            .iter()
            .zip(&self.sides)
            .zip(point)
            .all(|((&lo, &s), &p)| p >= lo - EPS && p <= lo + s + EPS)
    }

    /// Closed-overlap test (shared faces count as intersecting).
    pub fn intersects(&self, other: &AlignedBox) -> bool {
        debug_assert_eq!(other.dim(), self.dim());
        (0..self.dim()).all(|i| self.low(i) <= other.high(i) && other.low(i) <= self.high(i))
    }
}

/// A closed ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_dim(center.len(), "center")?;
        if center.iter().any(|c| !c.is_finite()) {
            return Err(CovlabError::invalid("center", "coordinates must be finite"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(CovlabError::invalid("radius", format!("must be positive and finite, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        debug_assert_eq!(point.len(), self.dim());
        let d2: f64 =
            self.center.iter().zip(point).map(|(&c, &p)| (p - c) * (p - c)).sum();
        let r = self.radius + EPS;
        d2 <= r * r
    }
}

/// Result of a coverage query. `NotCovered` always carries a concrete
/// uncovered point that re-tests as outside every shape.
#[derive(Debug, Clone, PartialEq)]
pub enum CoverageVerdict {
    Covered,
    NotCovered { witness: Vec<f64> },
    /// Only ball queries return this, and only once the subdivision depth
    /// is exhausted; box queries always decide.
    UnknownAtResolution,
}

impl CoverageVerdict {
    pub fn is_covered(&self) -> bool {
        matches!(self, CoverageVerdict::Covered)
    }
}

/// Grid coordinates along one axis: target bounds plus every shape boundary
/// strictly inside, sorted and deduplicated to `EPS`.
fn axis_cuts(target: &AlignedBox, bounds: impl Iterator<Item = (f64, f64)>, axis: usize) -> Vec<f64> {
    let lo = target.low(axis);
    let hi = target.high(axis);
    let mut cuts = vec![lo, hi];
    for (a, b) in bounds {
        for v in [a, b] {
            if v > lo + EPS && v < hi - EPS {
                cuts.push(v);
            }
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    cuts.dedup_by(|a, b| (*a - *b).abs() <= EPS);
    cuts
}

/// Walk every cell of the grid induced by the shapes over the target and
/// feed uncovered cells (midpoint, volume) to `on_vacant`. Returning `false`
/// from the callback stops the walk early.
fn scan_box_grid(
    shapes: &[AlignedBox],
    target: &AlignedBox,
    mut on_vacant: impl FnMut(&[f64], f64) -> bool,
) -> Result<()> {
    let d = target.dim();
    for s in shapes {
        if s.dim() != d {
            return Err(CovlabError::DimensionMismatch(format!(
                "shape of dimension {} against target of dimension {d}",
                s.dim()
            )));
        }
    }
    // Only shapes that reach the target matter for the grid or the probes.
    let relevant: Vec<&AlignedBox> = shapes.iter().filter(|s| s.intersects(target)).collect();

    let cuts: Vec<Vec<f64>> = (0..d)
        .map(|axis| axis_cuts(target, relevant.iter().map(|s| (s.low(axis), s.high(axis))), axis))
        .collect();
    let counts: Vec<usize> = cuts.iter().map(|c| c.len() - 1).collect();

    let mut idx = vec![0usize; d];
    let mut mid = vec![0.0f64; d];
    loop {
        let mut volume = 1.0;
        for axis in 0..d {
            let (a, b) = (cuts[axis][idx[axis]], cuts[axis][idx[axis] + 1]);
            mid[axis] = 0.5 * (a + b);
            volume *= b - a;
        }
        if volume > EPS && !relevant.iter().any(|s| s.contains(&mid)) && !on_vacant(&mid, volume) {
            return Ok(());
        }
        // Odometer increment over the cell indices.
        let mut axis = 0;
        loop {
            idx[axis] += 1;
            if idx[axis] < counts[axis] {
                break;
            }
            idx[axis] = 0;
            axis += 1;
            if axis == d {
                return Ok(());
            }
        }
    }
}

/// Does the union of closed boxes cover the closed target box? Exact; never
/// returns `UnknownAtResolution`.
pub fn union_covers_box(shapes: &[AlignedBox], target: &AlignedBox) -> Result<CoverageVerdict> {
    let mut witness: Option<Vec<f64>> = None;
    scan_box_grid(shapes, target, |mid, _| {
        witness = Some(mid.to_vec());
        false
    })?;
    Ok(match witness {
        Some(w) => CoverageVerdict::NotCovered { witness: w },
        None => CoverageVerdict::Covered,
    })
}

/// Lebesgue measure of `target \ union(shapes)`. Exact up to `EPS` per cell.
pub fn vacancy_measure_boxes(shapes: &[AlignedBox], target: &AlignedBox) -> Result<f64> {
    let mut vacant = 0.0;
    scan_box_grid(shapes, target, |_, volume| {
        vacant += volume;
        true
    })?;
    Ok(vacant)
}

/// Does the union of closed balls cover the closed target box?
///
/// Certified subdivision: a cell is covered if some ball contains its
/// farthest corner, and vacant-witnessed if its center clears every ball by
/// more than the cell's half-diagonal (then the center itself is uncovered).
/// Cells that are neither split into `2^d` children until `max_depth` is
/// exhausted, at which point the query gives up with `UnknownAtResolution`.
/// Verdicts are sound in both decisive directions.
pub fn union_covers_box_balls(
    shapes: &[Ball],
    target: &AlignedBox,
    max_depth: u32,
) -> Result<CoverageVerdict> {
    let d = target.dim();
    for s in shapes {
        if s.dim() != d {
            return Err(CovlabError::DimensionMismatch(format!(
                "ball of dimension {} against target of dimension {d}",
                s.dim()
            )));
        }
    }
    let lo: Vec<f64> = (0..d).map(|i| target.low(i)).collect();
    let hi: Vec<f64> = (0..d).map(|i| target.high(i)).collect();
    Ok(split_cell(shapes, &lo, &hi, max_depth))
}

fn split_cell(balls: &[Ball], lo: &[f64], hi: &[f64], depth: u32) -> CoverageVerdict {
    let d = lo.len();

    // Covered when some ball contains the cell's farthest corner.
    let covered = balls.iter().any(|b| {
        let far2: f64 = (0..d)
            .map(|i| {
                let c = b.center()[i];
                let e = (lo[i] - c).abs().max((hi[i] - c).abs());
                e * e
            })
            .sum();
        far2 <= b.radius() * b.radius()
    });
    if covered {
        return CoverageVerdict::Covered;
    }

    let center: Vec<f64> = (0..d).map(|i| 0.5 * (lo[i] + hi[i])).collect();
    let half_diag = (0..d).map(|i| (hi[i] - lo[i]) * (hi[i] - lo[i])).sum::<f64>().sqrt() / 2.0;

    // Vacant when the center clears every ball by more than the half
    // diagonal: then the whole cell, center included, is outside the union.
    let clear = balls.iter().all(|b| {
        let d2: f64 =
            (0..d).map(|i| (center[i] - b.center()[i]) * (center[i] - b.center()[i])).sum();
        d2.sqrt() > b.radius() + half_diag
    });
    if clear {
        return CoverageVerdict::NotCovered { witness: center };
    }

    if depth == 0 {
        return CoverageVerdict::UnknownAtResolution;
    }

    let mut any_unknown = false;
    let mut child_lo = vec![0.0; d];
    let mut child_hi = vec![0.0; d];
    for mask in 0..(1u32 << d) {
        for i in 0..d {
            let m = 0.5 * (lo[i] + hi[i]);
            if mask & (1 << i) == 0 {
                child_lo[i] = lo[i];
                child_hi[i] = m;
            } else {
                child_lo[i] = m;
                child_hi[i] = hi[i];
            }
        }
        match split_cell(balls, &child_lo, &child_hi, depth - 1) {
            CoverageVerdict::Covered => {}
            not_covered @ CoverageVerdict::NotCovered { .. } => return not_covered,
            CoverageVerdict::UnknownAtResolution => any_unknown = true,
        }
    }
    if any_unknown {
        CoverageVerdict::UnknownAtResolution
    } else {
        CoverageVerdict::Covered
    }
}

/// Open gaps left uncovered inside `target` by a union of closed intervals.
///
/// Intervals touching endpoint-to-endpoint (within `EPS`) close the seam;
/// only gaps longer than `EPS` are reported.
pub fn uncovered_interval_gaps(
    intervals: &[(f64, f64)],
    target: (f64, f64),
) -> Result<Vec<(f64, f64)>> {
    let (t_lo, t_hi) = target;
    if !(t_lo.is_finite() && t_hi.is_finite() && t_lo < t_hi) {
        return Err(CovlabError::invalid("target", format!("must be a nonempty finite interval, got ({t_lo}, {t_hi})")));
    }
    let mut clipped: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
    for &(a, b) in intervals {
        if !(a.is_finite() && b.is_finite() && a <= b) {
            return Err(CovlabError::invalid("intervals", format!("malformed interval ({a}, {b})")));
        }
        let lo = a.max(t_lo);
        let hi = b.min(t_hi);
        if hi > lo {
            clipped.push((lo, hi));
        }
    }
    clipped.sort_by(|x, y| x.partial_cmp(y).expect("finite interval endpoints"));

    let mut gaps = Vec::new();
    let mut frontier = t_lo;
    for &(lo, hi) in &clipped {
        if lo > frontier + EPS {
            gaps.push((frontier, lo));
        }
        frontier = frontier.max(hi);
    }
    if t_hi > frontier + EPS {
        gaps.push((frontier, t_hi));
    }
    Ok(gaps)
}
