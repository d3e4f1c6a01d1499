//! Bridge from the continuum orthant model to coupled discrete lattice
//! models.
//!
//! Space is partitioned into unit cells `i + (0,1]^d`. A cell is *green*
//! when at least one Poisson point lands in it; `m` is the largest radius
//! mark among its points. The *upper* model gives the green vertex reach
//! `ρᵘ = 2 + ⌊m⌋`, the *lower* model `ρˡ = max(0, ⌊m⌋ − 1)`, both built
//! from the same `m` — a pathwise coupling, never resampled. Coverage of
//! the continuum union is then sandwiched between the two lattice models:
//! the lower model's reach is contained in the union, and everything the
//! union touches is within the upper model's reach.

use serde::Serialize;

use crate::distributions::RadiusDistribution;
use crate::error::{CovlabError, Result};
use crate::geometry::{union_covers_box, AlignedBox, MAX_DIM};
use crate::rng::{RandomStream, StreamId};

/// One realization of the Poisson model on the orthant window `[0,n]^d`:
/// each point `p` with mark `ρ` is stored as the upward cube `p + [0,ρ]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthantSample {
    pub dim: usize,
    pub extent: usize,
    pub cubes: Vec<AlignedBox>,
    pub stream: StreamId,
}

/// Realize the orthant model: a Poisson number of points uniform in
/// `[0,n)^d`, each drawing `d` coordinates and then one radius mark.
pub fn sample_orthant_configuration(
    lambda: f64,
    dim: usize,
    extent: usize,
    rho: &RadiusDistribution,
    stream: &mut RandomStream,
) -> Result<OrthantSample> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(CovlabError::invalid("lambda", format!("must be positive and finite, got {lambda}")));
    }
    if dim == 0 || dim > MAX_DIM {
        return Err(CovlabError::invalid("dim", format!("dimension must lie in 1..=4, got {dim}")));
    }
    if extent == 0 {
        return Err(CovlabError::invalid("extent", "need at least one cell per axis"));
    }
    let id = stream.id();
    let n = extent as f64;
    let count = stream.poisson(lambda * n.powi(dim as i32));
    let mut cubes = Vec::with_capacity(count as usize);
    let mut point = vec![0.0f64; dim];
    for _ in 0..count {
        for coord in point.iter_mut() {
            *coord = stream.uniform_in(0.0, n);
        }
        let mark = loop {
            let r = rho.sample(stream);
            if r > 0.0 {
                break r;
            }
        };
        cubes.push(AlignedBox::cube(point.clone(), mark).expect("positive mark"));
    }
    Ok(OrthantSample { dim, extent, cubes, stream: id })
}

/// The discrete side of the bridge: green flags and coupled radii on the
/// cell grid `{0..n-1}^d`, stored row-major with the last axis fastest.
/// Radii are meaningful only on green cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeConfiguration {
    dim: usize,
    extent: usize,
    green: Vec<bool>,
    rho_upper: Vec<u64>,
    rho_lower: Vec<u64>,
}

impl LatticeConfiguration {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extent(&self) -> usize {
        self.extent
    }

    pub fn n_cells(&self) -> usize {
        self.green.len()
    }

    pub fn flat_index(&self, cell: &[usize]) -> usize {
        debug_assert_eq!(cell.len(), self.dim);
        cell.iter().fold(0, |acc, &c| {
            debug_assert!(c < self.extent);
            acc * self.extent + c
        })
    }

    pub fn cell_coords(&self, mut index: usize) -> Vec<usize> {
        let mut cell = vec![0usize; self.dim];
        for axis in (0..self.dim).rev() {
            cell[axis] = index % self.extent;
            index /= self.extent;
        }
        cell
    }

    pub fn is_green(&self, index: usize) -> bool {
        self.green[index]
    }

    pub fn green_count(&self) -> usize {
        self.green.iter().filter(|&&g| g).count()
    }

    /// Upper-model reach of a green cell; `None` on non-green cells.
    pub fn rho_upper(&self, index: usize) -> Option<u64> {
        self.green[index].then(|| self.rho_upper[index])
    }

    /// Lower-model reach of a green cell; `None` on non-green cells.
    pub fn rho_lower(&self, index: usize) -> Option<u64> {
        self.green[index].then(|| self.rho_lower[index])
    }
}

/// Map each point to its cell (`ceil(p) − 1` per axis, the index of the cell
/// `i + (0,1]^d` containing it) and couple the lattice radii to the cell
/// maxima: `ρᵘ = 2 + ⌊m⌋`, `ρˡ = max(0, ⌊m⌋ − 1)`.
pub fn discretize(sample: &OrthantSample) -> LatticeConfiguration {
    let d = sample.dim;
    let n = sample.extent;
    let n_cells = n.pow(d as u32);
    let mut green = vec![false; n_cells];
    let mut max_mark = vec![0.0f64; n_cells];

    for cube in &sample.cubes {
        let mut index = 0usize;
        for axis in 0..d {
            let p = cube.low(axis);
            let cell = (p.ceil() as i64 - 1).clamp(0, n as i64 - 1) as usize;
            index = index * n + cell;
        }
        let mark = cube.sides()[0];
        green[index] = true;
        if mark > max_mark[index] {
            max_mark[index] = mark;
        }
    }

    let mut rho_upper = vec![0u64; n_cells];
    let mut rho_lower = vec![0u64; n_cells];
    for i in 0..n_cells {
        if green[i] {
            let floor_m = max_mark[i].floor() as u64;
            rho_upper[i] = 2 + floor_m;
            rho_lower[i] = floor_m.saturating_sub(1);
            debug_assert!(rho_upper[i] >= rho_lower[i] + 2);
        }
    }
    LatticeConfiguration { dim: d, extent: n, green, rho_upper, rho_lower }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(CovlabError::invalid("lambda", format!("must be positive and finite, got {lambda}")));
    }
    Ok(())
}

/// `P(max{ρ₁..ρ_N} ≤ m | N ≥ 1) = (exp(λ·F(m)) − 1)/(exp(λ) − 1)` where
/// `N` is Poisson(λ) conditioned to be at least 1 and `F(m) = P(ρ ≤ m)`.
pub fn max_mark_cdf(rho: &RadiusDistribution, lambda: f64, m: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let f = 1.0 - rho.tail_probability(m);
    Ok(((lambda * f).exp() - 1.0) / (lambda.exp() - 1.0))
}

/// Strict version `P(max < x | N ≥ 1)`, which drives the floor pmfs.
fn max_mark_cdf_strict(rho: &RadiusDistribution, lambda: f64, x: f64) -> f64 {
    let f = 1.0 - rho.prob_geq(x);
    ((lambda * f).exp() - 1.0) / (lambda.exp() - 1.0)
}

/// `P(ρᵘ = k)` for the conditional cell maximum: `ρᵘ = 2 + ⌊max⌋`, so the
/// mass at `k ≥ 2` is `P(max < k−1) − P(max < k−2)` and 0 below 2.
pub fn rho_u_pmf(rho: &RadiusDistribution, lambda: f64, k: u64) -> Result<f64> {
    check_lambda(lambda)?;
    if k < 2 {
        return Ok(0.0);
    }
    let hi = max_mark_cdf_strict(rho, lambda, (k - 1) as f64);
    let lo = max_mark_cdf_strict(rho, lambda, (k - 2) as f64);
    Ok((hi - lo).max(0.0))
}

/// `P(ρˡ = k)` for `ρˡ = max(0, ⌊max⌋ − 1)`: the mass at 0 pools
/// `⌊max⌋ ∈ {0,1}`, and `k ≥ 1` takes `⌊max⌋ = k + 1`.
pub fn rho_l_pmf(rho: &RadiusDistribution, lambda: f64, k: u64) -> Result<f64> {
    check_lambda(lambda)?;
    if k == 0 {
        return Ok(max_mark_cdf_strict(rho, lambda, 2.0));
    }
    let hi = max_mark_cdf_strict(rho, lambda, (k + 2) as f64);
    let lo = max_mark_cdf_strict(rho, lambda, (k + 1) as f64);
    Ok((hi - lo).max(0.0))
}

/// One draw of `ρᵘ`: a Poisson(λ) count conditioned to be at least 1, that
/// many radius marks, then `2 + ⌊max⌋`.
pub fn simulate_rho_u(rho: &RadiusDistribution, lambda: f64, stream: &mut RandomStream) -> u64 {
    let count = loop {
        let n = stream.poisson(lambda);
        if n >= 1 {
            break n;
        }
    };
    let mut max = f64::NEG_INFINITY;
    for _ in 0..count {
        max = max.max(rho.sample(stream));
    }
    2 + max.floor() as u64
}

/// Outcome of the pathwise sandwich verification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    /// Cells the lower model is responsible for (shifted reach, see below).
    pub lower_cells_checked: usize,
    /// Distinct cells whose closed unit cube meets the continuum union.
    pub upper_cells_touched: usize,
    /// First cell in the lower reach whose unit cube is not fully covered.
    pub lower_violation: Option<Vec<usize>>,
    /// First touched cell the upper model fails to reach.
    pub upper_violation: Option<Vec<usize>>,
    pub holds: bool,
}

/// Visit every integer cell in the inclusive box `[lo, hi]`.
fn for_each_cell(lo: &[usize], hi: &[usize], mut visit: impl FnMut(&[usize])) {
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return;
    }
    let mut cell = lo.to_vec();
    loop {
        visit(&cell);
        let mut axis = cell.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if cell[axis] < hi[axis] {
                cell[axis] += 1;
                break;
            }
            cell[axis] = lo[axis];
        }
    }
}

/// Verify the coverage sandwich on one realization:
///
/// * **upper**: every cell whose closed unit cube meets the continuum union
///   is within some green vertex's upper reach `i + [0, ρᵘᵢ]^d`;
/// * **lower**: every cell in a green vertex's *shifted* lower reach —
///   `v` with `i+1 ≤ v ≤ i+ρˡᵢ` componentwise — has its closed unit cube
///   contained in the continuum union, certified by exact box geometry.
///
/// The anchor layer `v = i` is excluded from the lower claim: a point near
/// the high corner of its cell covers nothing below itself, so only cells
/// strictly above the green vertex are guaranteed. The unit shift is
/// exactly what "eventual coverage" absorbs when transferring between the
/// lattice and continuum models; cells with `ρˡ = 0` therefore impose no
/// continuum obligation.
pub fn sandwich_check(sample: &OrthantSample) -> Result<SandwichReport> {
    let config = discretize(sample);
    check_sandwich_against(sample, &config)
}

fn check_sandwich_against(
    sample: &OrthantSample,
    config: &LatticeConfiguration,
) -> Result<SandwichReport> {
    let d = sample.dim;
    let n = sample.extent;
    let n_cells = config.n_cells();

    // Stamp the lattice reach masks of both models.
    let mut upper_mask = vec![false; n_cells];
    let mut lower_mask = vec![false; n_cells];
    for index in 0..n_cells {
        if !config.is_green(index) {
            continue;
        }
        let anchor = config.cell_coords(index);
        let upper = config.rho_upper(index).expect("green cell");
        let hi: Vec<usize> = anchor
            .iter()
            .map(|&a| usize::try_from((a as u64).saturating_add(upper).min(n as u64 - 1)).unwrap())
            .collect();
        for_each_cell(&anchor, &hi, |cell| {
            upper_mask[config.flat_index(cell)] = true;
        });
        let lower = config.rho_lower(index).expect("green cell");
        if lower >= 1 {
            let lo: Vec<usize> = anchor.iter().map(|&a| a + 1).collect();
            if lo.iter().all(|&l| l < n) {
                let hi: Vec<usize> = anchor
                    .iter()
                    .map(|&a| {
                        usize::try_from((a as u64).saturating_add(lower).min(n as u64 - 1)).unwrap()
                    })
                    .collect();
                for_each_cell(&lo, &hi, |cell| {
                    lower_mask[config.flat_index(cell)] = true;
                });
            }
        }
    }

    // Upper direction: collect the cells each cube touches and require the
    // upper mask there.
    let mut touched_mask = vec![false; n_cells];
    for cube in &sample.cubes {
        let mut lo = vec![0usize; d];
        let mut hi = vec![0usize; d];
        let mut empty = false;
        for axis in 0..d {
            let p = cube.low(axis);
            let top = cube.high(axis);
            let l = (p.ceil() as i64 - 1).max(0);
            let h = (top.floor() as i64).min(n as i64 - 1);
            if l > h {
                empty = true;
                break;
            }
            lo[axis] = l as usize;
            hi[axis] = h as usize;
        }
        if empty {
            continue;
        }
        for_each_cell(&lo, &hi, |cell| {
            touched_mask[config.flat_index(cell)] = true;
        });
    }

    let mut upper_violation = None;
    let mut upper_cells_touched = 0usize;
    for index in 0..n_cells {
        if touched_mask[index] {
            upper_cells_touched += 1;
            if !upper_mask[index] && upper_violation.is_none() {
                upper_violation = Some(config.cell_coords(index));
            }
        }
    }

    // Lower direction: exact coverage certificate per claimed cell.
    let mut lower_violation = None;
    let mut lower_cells_checked = 0usize;
    for index in 0..n_cells {
        if !lower_mask[index] {
            continue;
        }
        lower_cells_checked += 1;
        if lower_violation.is_some() {
            continue;
        }
        let cell = config.cell_coords(index);
        let corner: Vec<f64> = cell.iter().map(|&c| c as f64).collect();
        let target = AlignedBox::cube(corner, 1.0)?;
        if !union_covers_box(&sample.cubes, &target)?.is_covered() {
            lower_violation = Some(cell);
        }
    }

    let holds = lower_violation.is_none() && upper_violation.is_none();
    Ok(SandwichReport {
        lower_cells_checked,
        upper_cells_touched,
        lower_violation,
        upper_violation,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::split_stream;

    fn hand_sample(dim: usize, extent: usize, points: &[(&[f64], f64)]) -> OrthantSample {
        let cubes = points
            .iter()
            .map(|(p, m)| AlignedBox::cube(p.to_vec(), *m).unwrap())
            .collect();
        OrthantSample { dim, extent, cubes, stream: split_stream(0, 0).id() }
    }

    #[test]
    fn discretize_worked_examples() {
        let empty = hand_sample(2, 4, &[]);
        let config = discretize(&empty);
        assert_eq!(config.green_count(), 0);

        let one = hand_sample(2, 4, &[(&[0.5, 0.5], 1.7)]);
        let config = discretize(&one);
        let idx = config.flat_index(&[0, 0]);
        assert!(config.is_green(idx));
        assert_eq!(config.rho_upper(idx), Some(3));
        assert_eq!(config.rho_lower(idx), Some(0));
        assert_eq!(config.green_count(), 1);

        let two = hand_sample(2, 4, &[(&[1.2, 2.7], 0.2), (&[1.9, 2.1], 2.9)]);
        let config = discretize(&two);
        let idx = config.flat_index(&[1, 2]);
        assert!(config.is_green(idx));
        assert_eq!(config.rho_upper(idx), Some(4));
        assert_eq!(config.rho_lower(idx), Some(1));
    }

    #[test]
    fn cells_are_half_open_at_the_top() {
        // i + (0,1]^d: a coordinate exactly 1.0 belongs to cell 0.
        let s = hand_sample(2, 4, &[(&[1.0, 1.0], 0.5)]);
        let config = discretize(&s);
        assert!(config.is_green(config.flat_index(&[0, 0])));

        let s = hand_sample(2, 4, &[(&[1.0 + 1e-9, 1.0], 0.5)]);
        let config = discretize(&s);
        assert!(config.is_green(config.flat_index(&[1, 0])));
    }

    #[test]
    fn rho_arrays_none_off_green() {
        let s = hand_sample(1, 4, &[(&[0.5], 1.0)]);
        let config = discretize(&s);
        assert_eq!(config.rho_upper(2), None);
        assert_eq!(config.rho_lower(2), None);
    }

    #[test]
    fn max_mark_cdf_keystones() {
        let uniform = RadiusDistribution::bounded_uniform(0.0, 1.0).unwrap();
        let v = max_mark_cdf(&uniform, std::f64::consts::LN_2, 0.5).unwrap();
        assert!((v - 0.41421356237309515).abs() < 1e-15);

        assert!((max_mark_cdf(&uniform, 3.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(max_mark_cdf(&uniform, 3.0, 0.0).unwrap(), 0.0);
        assert!(max_mark_cdf(&uniform, 0.0, 0.5).is_err());
    }

    #[test]
    fn rho_u_pmf_sums_to_one_on_bounded_laws() {
        let table =
            RadiusDistribution::discrete_table(vec![(1, 0.3), (3, 0.7)]).unwrap();
        let p3 = rho_u_pmf(&table, 1.0, 3).unwrap();
        let p5 = rho_u_pmf(&table, 1.0, 5).unwrap();
        assert!((p3 + p5 - 1.0).abs() < 1e-12);
        assert_eq!(rho_u_pmf(&table, 1.0, 2).unwrap(), 0.0);
        assert_eq!(rho_u_pmf(&table, 1.0, 4).unwrap(), 0.0);
        // P(ρᵘ = 3) = P(max = 1 | N ≥ 1) = (e^{0.3} − 1)/(e − 1).
        let expected = (0.3f64.exp() - 1.0) / (1.0f64.exp() - 1.0);
        assert!((p3 - expected).abs() < 1e-15);

        let uniform = RadiusDistribution::bounded_uniform(0.0, 2.5).unwrap();
        let total: f64 = (2..=4).map(|k| rho_u_pmf(&uniform, 0.7, k).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(rho_u_pmf(&uniform, 0.7, 5).unwrap(), 0.0);
    }

    #[test]
    fn rho_u_pmf_partial_sums_telescope_on_heavy_tails() {
        let heavy = RadiusDistribution::discrete_pareto(2.0).unwrap();
        let lambda = 1.0;
        let partial: f64 = (2..=60).map(|k| rho_u_pmf(&heavy, lambda, k).unwrap()).sum();
        // The partial sum is exactly P(max ≤ 58 | N ≥ 1).
        let cdf = max_mark_cdf(&heavy, lambda, 58.0).unwrap();
        assert!((partial - cdf).abs() < 1e-12);
        assert!(partial < 1.0);
        let longer: f64 = (2..=600).map(|k| rho_u_pmf(&heavy, lambda, k).unwrap()).sum();
        assert!(longer > partial);
    }

    #[test]
    fn rho_l_pmf_matches_shifted_upper_law() {
        let table =
            RadiusDistribution::discrete_table(vec![(1, 0.3), (3, 0.7)]).unwrap();
        let lambda = 0.9;
        let p0 = rho_l_pmf(&table, lambda, 0).unwrap();
        let expected0 = ((lambda * 0.3f64).exp() - 1.0) / (lambda.exp() - 1.0);
        assert!((p0 - expected0).abs() < 1e-15);
        let total: f64 = (0..=4).map(|k| rho_l_pmf(&table, lambda, k).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // Above the pooled atom the lower law is the upper law shifted by 3.
        for k in 1..=6u64 {
            let l = rho_l_pmf(&table, lambda, k).unwrap();
            let u = rho_u_pmf(&table, lambda, k + 3).unwrap();
            assert!((l - u).abs() < 1e-15);
        }
    }

    #[test]
    fn green_fraction_matches_poisson_void_probability() {
        let rho = RadiusDistribution::degenerate(1.0).unwrap();
        let mut stream = split_stream(31, 0);
        let sample = sample_orthant_configuration(1.0, 2, 100, &rho, &mut stream).unwrap();
        let config = discretize(&sample);
        let n_cells = config.n_cells() as f64;
        let p_hat = config.green_count() as f64 / n_cells;
        let p = 1.0 - (-1.0f64).exp();
        let se = (p * (1.0 - p) / n_cells).sqrt();
        assert!(
            (p_hat - p).abs() <= 4.0 * se,
            "green fraction {p_hat} vs {p} (se {se})"
        );
    }

    #[test]
    fn simulated_rho_u_passes_chi_square() {
        let table =
            RadiusDistribution::discrete_table(vec![(1, 0.3), (3, 0.7)]).unwrap();
        let lambda = 1.0;
        let draws = 100_000u64;
        let mut stream = split_stream(57, 0);
        let mut count3 = 0u64;
        for _ in 0..draws {
            match simulate_rho_u(&table, lambda, &mut stream) {
                3 => count3 += 1,
                5 => {}
                other => panic!("impossible draw {other}"),
            }
        }
        let e3 = rho_u_pmf(&table, lambda, 3).unwrap() * draws as f64;
        let e5 = rho_u_pmf(&table, lambda, 5).unwrap() * draws as f64;
        let o3 = count3 as f64;
        let o5 = (draws - count3) as f64;
        let chi2 = (o3 - e3).powi(2) / e3 + (o5 - e5).powi(2) / e5;
        // 1% critical value of chi-square with 1 degree of freedom.
        assert!(chi2 < 6.635, "chi2 {chi2}");
    }

    #[test]
    fn sandwich_trivial_cases() {
        let empty = hand_sample(2, 6, &[]);
        let report = sandwich_check(&empty).unwrap();
        assert!(report.holds);
        assert_eq!(report.lower_cells_checked, 0);
        assert_eq!(report.upper_cells_touched, 0);

        let single = hand_sample(2, 6, &[(&[0.4, 0.7], 3.6)]);
        let report = sandwich_check(&single).unwrap();
        assert!(report.holds, "report {report:?}");
        assert!(report.lower_cells_checked > 0);
        assert!(report.upper_cells_touched > 0);
    }

    #[test]
    fn sandwich_detects_corrupted_configurations() {
        let single = hand_sample(2, 6, &[(&[0.4, 0.7], 3.6)]);
        let mut config = discretize(&single);
        // Inflate the lower reach so it claims coverage the union lacks.
        let idx = config.flat_index(&[0, 0]);
        config.rho_lower[idx] = 5;
        let report = check_sandwich_against(&single, &config).unwrap();
        assert!(!report.holds);
        assert!(report.lower_violation.is_some());

        // Drop the only green vertex: touched cells lose their upper cover.
        let mut config = discretize(&single);
        config.green[idx] = false;
        let report = check_sandwich_against(&single, &config).unwrap();
        assert!(!report.holds);
        assert!(report.upper_violation.is_some());
    }

    #[test]
    fn sandwich_fuzz_mixed_laws() {
        let laws = [
            RadiusDistribution::bounded_uniform(0.0, 3.0).unwrap(),
            RadiusDistribution::discrete_table(vec![(1, 0.5), (2, 0.3), (4, 0.2)]).unwrap(),
            RadiusDistribution::discrete_pareto(1.5).unwrap(),
        ];
        let lambdas = [0.5, 1.0, 2.0];
        for rep in 0..200u64 {
            let rho = &laws[(rep % 3) as usize];
            let lambda = lambdas[((rep / 3) % 3) as usize];
            let mut stream = split_stream(91, rep);
            let sample = sample_orthant_configuration(lambda, 2, 8, rho, &mut stream).unwrap();
            let report = sandwich_check(&sample).unwrap();
            assert!(report.holds, "rep {rep}: {report:?}");
        }
    }

    #[test]
    fn sandwich_holds_in_one_and_three_dimensions() {
        let rho = RadiusDistribution::bounded_uniform(0.0, 2.0).unwrap();
        for rep in 0..40u64 {
            let mut stream = split_stream(17, rep);
            let sample = sample_orthant_configuration(1.0, 1, 12, &rho, &mut stream).unwrap();
            assert!(sandwich_check(&sample).unwrap().holds);

            let mut stream = split_stream(18, rep);
            let sample = sample_orthant_configuration(1.0, 3, 6, &rho, &mut stream).unwrap();
            assert!(sandwich_check(&sample).unwrap().holds);
        }
    }

    #[test]
    fn orthant_sampler_validates_and_replays() {
        let rho = RadiusDistribution::degenerate(1.0).unwrap();
        assert!(sample_orthant_configuration(0.0, 2, 5, &rho, &mut split_stream(1, 0)).is_err());
        assert!(sample_orthant_configuration(1.0, 5, 5, &rho, &mut split_stream(1, 0)).is_err());
        assert!(sample_orthant_configuration(1.0, 2, 0, &rho, &mut split_stream(1, 0)).is_err());

        let a = sample_orthant_configuration(1.0, 2, 5, &rho, &mut split_stream(4, 2)).unwrap();
        let b = sample_orthant_configuration(1.0, 2, 5, &rho, &mut split_stream(4, 2)).unwrap();
        assert_eq!(a, b);
    }
}
