//! The standalone discrete coverage model on `N^d`: each site `u ≥ 1` is
//! open independently with probability `p`, and an open site covers the
//! upward cube `u + [0, ρ_u]^d` (integer reach). Exact uncovered-point
//! probabilities follow from independence; eventual coverage is decided by
//! whether the series of uncovered probabilities along a row converges.

use serde::Serialize;

use crate::distributions::{RadiusDistribution, SupportKind};
use crate::error::{CovlabError, Result};
use crate::rng::{RandomStream, StreamId};
use crate::verdict::{gauss_ratio_test, DivergenceVerdict};

/// At most this many uncovered points are listed individually in a
/// simulation summary; the count is always exact.
pub const UNCOVERED_SAMPLE_CAP: usize = 100;

/// Parameters of the discrete site model.
#[derive(Debug, Clone)]
pub struct LatticeSpec {
    d: usize,
    p: f64,
    rho: RadiusDistribution,
}

impl LatticeSpec {
    /// Exact row formulas require `d = 2`; simulation supports `d` in 1..=3.
    pub fn new(d: usize, p: f64, rho: RadiusDistribution) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(CovlabError::invalid("d", format!("lattice dimension must lie in 1..=3, got {d}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(CovlabError::invalid("p", format!("open probability must lie strictly in (0,1), got {p}")));
        }
        if rho.support_kind() != SupportKind::PositiveInteger {
            return Err(CovlabError::invalid(
                "rho",
                "the lattice model needs a positive-integer radius law",
            ));
        }
        Ok(LatticeSpec { d, p, rho })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn rho(&self) -> &RadiusDistribution {
        &self.rho
    }

    pub fn canonical(&self) -> String {
        format!("lattice(d={},p={},rho={})", self.d, self.p, self.rho.canonical())
    }

    /// `ln(1 − p·P(ρ ≥ t))`, the log-space factor of one site at Chebyshev
    /// distance `t` below the target.
    fn log_factor(&self, t: u64) -> f64 {
        (-self.p * self.rho.prob_geq(t as f64)).ln_1p()
    }
}

fn require_dim(spec: &LatticeSpec, d: usize, op: &str) -> Result<()> {
    if spec.d != d {
        return Err(CovlabError::invalid(
            "d",
            format!("{op} needs a {d}-dimensional lattice spec, got d={}", spec.d),
        ));
    }
    Ok(())
}

/// Exact `P((i,j) uncovered)` by independence: the product over every site
/// `(k,l)` with `1 ≤ k ≤ i`, `1 ≤ l ≤ j` of `1 − p·P(ρ ≥ max(i−k, j−l))`,
/// accumulated in log space. `P(ρ ≥ 0) = 1`, so the site at the target
/// contributes `1 − p`.
pub fn uncovered_prob_oracle(spec: &LatticeSpec, i: u64, j: u64) -> Result<f64> {
    require_dim(spec, 2, "uncovered_prob_oracle")?;
    if i < 1 || j < 1 {
        return Err(CovlabError::invalid("point", "coordinates start at 1"));
    }
    let mut log_prob = 0.0;
    for k in 1..=i {
        for l in 1..=j {
            log_prob += spec.log_factor((i - k).max(j - l));
        }
    }
    Ok(log_prob.exp())
}

/// One-dimensional analogue of the oracle: `∏_{k=1}^{i} (1 − p·P(ρ ≥ i−k))`.
pub fn uncovered_prob_oracle_1d(spec: &LatticeSpec, i: u64) -> Result<f64> {
    require_dim(spec, 1, "uncovered_prob_oracle_1d")?;
    if i < 1 {
        return Err(CovlabError::invalid("point", "coordinates start at 1"));
    }
    let mut log_prob = 0.0;
    for t in 0..i {
        log_prob += spec.log_factor(t);
    }
    Ok(log_prob.exp())
}

fn check_row_point(i: u64, j: u64) -> Result<()> {
    if !(j >= 1 && i > j) {
        return Err(CovlabError::invalid(
            "point",
            format!("the row formula needs i > j >= 1, got ({i}, {j}); transpose or use the oracle"),
        ));
    }
    Ok(())
}

/// Log of the uncovered probability at `(i, j)` with `i > j ≥ 1`, grouping
/// the oracle's sites by Chebyshev distance `t` to the target:
///
/// * `t = 0`: the target site, one factor `1 − p`;
/// * `1 ≤ t ≤ j−1`: a full L-shaped shell of `2t + 1` sites;
/// * `j ≤ t ≤ i−1`: the shell is clipped by the row boundary to `j` sites.
///
/// This grouping is calibrated against `uncovered_prob_oracle`; it is the
/// regrouped-product evaluation with the shell counts the geometry actually
/// produces.
fn log_uncovered_prob_formula(spec: &LatticeSpec, i: u64, j: u64) -> f64 {
    let mut log_prob = (-spec.p).ln_1p();
    for t in 1..j {
        log_prob += (2 * t + 1) as f64 * spec.log_factor(t);
    }
    for t in j..i {
        log_prob += j as f64 * spec.log_factor(t);
    }
    log_prob
}

/// Closed-form `P((i,j) uncovered)` for `i > j ≥ 1` on the 2-d lattice;
/// agrees with the oracle to floating-point accuracy.
pub fn uncovered_prob_formula(spec: &LatticeSpec, i: u64, j: u64) -> Result<f64> {
    require_dim(spec, 2, "uncovered_prob_formula")?;
    check_row_point(i, j)?;
    Ok(log_uncovered_prob_formula(spec, i, j).exp())
}

/// Cumulative sums `Σ_{i=j+1}^{I} P((i,j) uncovered)` along row `j`, one
/// entry per `i`. Terms are extended incrementally —
/// `e_{i+1} = e_i·(1 − p·P(ρ ≥ i))^j` — so long rows stay cheap. Their
/// divergence is the signature of points in row `j` escaping coverage
/// forever; saturation is the signature of eventual coverage.
pub fn series_partial_sums(spec: &LatticeSpec, j: u64, i_max: u64) -> Result<Vec<f64>> {
    require_dim(spec, 2, "series_partial_sums")?;
    if j < 1 {
        return Err(CovlabError::invalid("j", "row index starts at 1"));
    }
    if i_max < j + 1 {
        return Err(CovlabError::invalid("i_max", format!("need i_max >= j+1 = {}", j + 1)));
    }
    let mut sums = Vec::with_capacity((i_max - j) as usize);
    let mut log_term = log_uncovered_prob_formula(spec, j + 1, j);
    let mut total = 0.0;
    for i in (j + 1)..=i_max {
        total += log_term.exp();
        sums.push(total);
        log_term += j as f64 * spec.log_factor(i);
    }
    Ok(sums)
}

/// Fit the Gauss exponent of the row terms `e_i = P((i,j) uncovered)` over
/// `i ∈ [i_lo, i_hi]` and classify the series: the ratio model
/// `e_{i+1}/e_i = 1 − c/i` diverges for `c ≤ 0.9`, converges for `c ≥ 1.1`,
/// and the band between is reported indeterminate.
pub fn divergence_diagnostic(
    spec: &LatticeSpec,
    j: u64,
    i_lo: u64,
    i_hi: u64,
) -> Result<DivergenceVerdict> {
    require_dim(spec, 2, "divergence_diagnostic")?;
    if j < 1 {
        return Err(CovlabError::invalid("j", "row index starts at 1"));
    }
    if !(i_lo > j && i_hi > i_lo) {
        return Err(CovlabError::invalid(
            "range",
            format!("need j < i_lo < i_hi, got j={j}, i_lo={i_lo}, i_hi={i_hi}"),
        ));
    }
    let mut log_term = log_uncovered_prob_formula(spec, j + 1, j);
    for i in (j + 1)..i_lo {
        log_term += j as f64 * spec.log_factor(i);
    }
    let mut terms = Vec::with_capacity((i_hi - i_lo + 1) as usize);
    for i in i_lo..=i_hi {
        terms.push(log_term.exp());
        log_term += j as f64 * spec.log_factor(i);
    }
    Ok(gauss_ratio_test(&terms, i_lo))
}

/// Exact joint probability that both `(i,j)` and `(k,j)` are uncovered,
/// `1 ≤ i ≤ k`: a site `(k',l')` with `k' ≤ i` misses both targets exactly
/// when its reach falls short of the nearer one, so its factor uses
/// `min` of the two Chebyshev distances (which is the distance to `(i,j)`);
/// sites with `i < k' ≤ k` only constrain `(k,j)`.
fn joint_uncovered_prob(spec: &LatticeSpec, j: u64, i: u64, k: u64) -> f64 {
    let mut log_prob = 0.0;
    for kp in 1..=k {
        for lp in 1..=j {
            let d_k = (k - kp).max(j - lp);
            let t = if kp <= i { (i - kp).max(j - lp).min(d_k) } else { d_k };
            log_prob += spec.log_factor(t);
        }
    }
    log_prob.exp()
}

/// Check the renewal factorization `P(A(k,j) ∩ A(i,j)) =
/// P(A(k−i,j))·P(A(i,j))` on the given pairs `(i,k)`, `k ≥ i ≥ 1`, with
/// `P(A(0,j)) := 1`; returns the worst absolute deviation. The factorization
/// is what makes uncovered points along a row a renewal process.
pub fn renewal_identity_check(spec: &LatticeSpec, j: u64, pairs: &[(u64, u64)]) -> Result<f64> {
    require_dim(spec, 2, "renewal_identity_check")?;
    if j < 1 {
        return Err(CovlabError::invalid("j", "row index starts at 1"));
    }
    let mut worst = 0.0f64;
    for &(i, k) in pairs {
        if !(i >= 1 && k >= i) {
            return Err(CovlabError::invalid("pairs", format!("need k >= i >= 1, got ({i}, {k})")));
        }
        let joint = joint_uncovered_prob(spec, j, i, k);
        let gap = if k == i { 1.0 } else { uncovered_prob_oracle(spec, k - i, j)? };
        let split = gap * uncovered_prob_oracle(spec, i, j)?;
        worst = worst.max((joint - split).abs());
    }
    Ok(worst)
}

/// Summary of one lattice realization on `{1..n}^d`, reported on the box
/// `[1, n−g]^d` inside the guard band `g = ⌈0.1·n⌉`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeSummary {
    pub extent: usize,
    pub guard: usize,
    /// Exact number of uncovered points in the reporting box.
    pub uncovered_count: u64,
    /// The first uncovered points in row-major order, capped at
    /// [`UNCOVERED_SAMPLE_CAP`].
    pub uncovered_sample: Vec<Vec<u32>>,
    /// Smallest `t` with `[t, n−g]^d` fully covered. `None` when no such
    /// `t` exists within half the reporting box — deeper thresholds are not
    /// distinguishable from divergence at this extent.
    pub t_hat: Option<u64>,
    pub stream: StreamId,
    pub truncation_note: Option<String>,
}

/// Realize the site field on `{1..n}^d` and measure coverage. Sites are
/// visited in row-major order, each drawing its open flag and (if open) its
/// radius, so the realization replays from the stream. Sites beyond `n` are
/// not simulated; they could only reach the reporting box with `ρ > g`, so a
/// truncation note is attached when `P(ρ > g) > 1e-6`.
pub fn simulate_lattice(
    spec: &LatticeSpec,
    extent: usize,
    stream: &mut RandomStream,
) -> Result<LatticeSummary> {
    if extent < 4 {
        return Err(CovlabError::invalid("extent", format!("need extent >= 4, got {extent}")));
    }
    let d = spec.d;
    let n = extent;
    let guard = (0.1 * n as f64).ceil() as usize;
    let report = n - guard;
    let id = stream.id();

    let n_cells = n.pow(d as u32);
    let mut covered = vec![false; n_cells];

    // Row-major odometer over sites (0-based internal coordinates).
    let mut site = vec![0usize; d];
    let mut reach_lo = vec![0usize; d];
    let mut reach_hi = vec![0usize; d];
    'sites: loop {
        if stream.bernoulli(spec.p) {
            let rho = spec.rho.sample(stream).round() as u64;
            for axis in 0..d {
                reach_lo[axis] = site[axis];
                reach_hi[axis] = ((site[axis] as u64).saturating_add(rho)).min(n as u64 - 1) as usize;
            }
            let mut cell = reach_lo.clone();
            loop {
                let mut index = 0usize;
                for axis in 0..d {
                    index = index * n + cell[axis];
                }
                covered[index] = true;
                let mut axis = d;
                loop {
                    if axis == 0 {
                        break;
                    }
                    axis -= 1;
                    if cell[axis] < reach_hi[axis] {
                        cell[axis] += 1;
                        break;
                    }
                    cell[axis] = reach_lo[axis];
                }
                if cell == reach_lo {
                    break;
                }
            }
        }
        let mut axis = d;
        loop {
            if axis == 0 {
                break 'sites;
            }
            axis -= 1;
            if site[axis] < n - 1 {
                site[axis] += 1;
                break;
            }
            site[axis] = 0;
        }
    }

    // Scan the reporting box for uncovered points.
    let mut uncovered_count = 0u64;
    let mut uncovered_sample = Vec::new();
    let mut deepest_min_coord = 0u64;
    let mut cell = vec![0usize; d];
    'report: loop {
        let mut index = 0usize;
        for axis in 0..d {
            index = index * n + cell[axis];
        }
        if !covered[index] {
            uncovered_count += 1;
            let point: Vec<u32> = cell.iter().map(|&c| (c + 1) as u32).collect();
            deepest_min_coord =
                deepest_min_coord.max(point.iter().map(|&c| c as u64).min().unwrap());
            if uncovered_sample.len() < UNCOVERED_SAMPLE_CAP {
                uncovered_sample.push(point);
            }
        }
        let mut axis = d;
        loop {
            if axis == 0 {
                break 'report;
            }
            axis -= 1;
            if cell[axis] < report - 1 {
                cell[axis] += 1;
                break;
            }
            cell[axis] = 0;
        }
    }

    let t_raw = if uncovered_count == 0 { 1 } else { deepest_min_coord + 1 };
    let t_hat = (t_raw as f64 <= report as f64 / 2.0).then_some(t_raw);

    let tail_beyond_guard = spec.rho.tail_probability(guard as f64);
    let truncation_note = (tail_beyond_guard > 1e-6).then(|| {
        format!(
            "P(rho > guard {guard}) = {tail_beyond_guard:.3e}: sites beyond the simulated box \
             could reach the reporting box, biasing coverage downward"
        )
    });

    Ok(LatticeSummary {
        extent: n,
        guard,
        uncovered_count,
        uncovered_sample,
        t_hat,
        stream: id,
        truncation_note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::split_stream;
    use crate::verdict::Divergence;

    fn degenerate_int(v: u64) -> RadiusDistribution {
        RadiusDistribution::discrete_table(vec![(v, 1.0)]).unwrap()
    }

    fn spec2(p: f64, rho: RadiusDistribution) -> LatticeSpec {
        LatticeSpec::new(2, p, rho).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(LatticeSpec::new(0, 0.5, degenerate_int(1)).is_err());
        assert!(LatticeSpec::new(4, 0.5, degenerate_int(1)).is_err());
        assert!(LatticeSpec::new(2, 0.0, degenerate_int(1)).is_err());
        assert!(LatticeSpec::new(2, 1.0, degenerate_int(1)).is_err());
        assert!(LatticeSpec::new(2, 0.5, RadiusDistribution::bounded_uniform(0.0, 1.0).unwrap())
            .is_err());
        assert!(LatticeSpec::new(2, 0.5, RadiusDistribution::discrete_pareto(2.0).unwrap()).is_ok());
    }

    #[test]
    fn oracle_keystone_values() {
        let s = spec2(0.37, RadiusDistribution::discrete_pareto(2.0).unwrap());
        assert!((uncovered_prob_oracle(&s, 1, 1).unwrap() - 0.63).abs() < 1e-15);

        let s = spec2(0.5, degenerate_int(1));
        assert!((uncovered_prob_oracle(&s, 2, 2).unwrap() - 0.0625).abs() < 1e-15);
        assert!((uncovered_prob_oracle(&s, 3, 3).unwrap() - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn formula_matches_oracle_on_keystone_grid() {
        let laws = [
            degenerate_int(1),
            degenerate_int(3),
            RadiusDistribution::discrete_pareto(2.0).unwrap(),
        ];
        for &p in &[0.3, 0.7] {
            for rho in &laws {
                let s = spec2(p, rho.clone());
                for j in 1..=11u64 {
                    for i in (j + 1)..=12 {
                        let f = uncovered_prob_formula(&s, i, j).unwrap();
                        let o = uncovered_prob_oracle(&s, i, j).unwrap();
                        assert!(
                            (f - o).abs() <= 1e-12,
                            "p={p} rho={} (i,j)=({i},{j}): formula {f} oracle {o}",
                            rho.canonical()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn formula_edge_behavior() {
        let s = spec2(1e-12, degenerate_int(2));
        assert!((uncovered_prob_formula(&s, 5, 2).unwrap() - 1.0).abs() < 1e-10);
        assert!(uncovered_prob_formula(&s, 2, 2).is_err());
        assert!(uncovered_prob_formula(&s, 1, 2).is_err());
        assert!(uncovered_prob_formula(&s, 2, 0).is_err());
    }

    #[test]
    fn oracle_monotone_in_p_and_tail() {
        let lo = spec2(0.3, degenerate_int(2));
        let hi = spec2(0.6, degenerate_int(2));
        assert!(uncovered_prob_oracle(&hi, 5, 3).unwrap() < uncovered_prob_oracle(&lo, 5, 3).unwrap());

        let short = spec2(0.5, degenerate_int(1));
        let long = spec2(0.5, degenerate_int(3));
        assert!(
            uncovered_prob_oracle(&long, 5, 3).unwrap() <= uncovered_prob_oracle(&short, 5, 3).unwrap()
        );
    }

    #[test]
    fn one_dimensional_oracle() {
        // Row of sites 1..=i; with rho ≡ 1 only the two nearest sites reach.
        let s = LatticeSpec::new(1, 0.5, degenerate_int(1)).unwrap();
        assert!((uncovered_prob_oracle_1d(&s, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!((uncovered_prob_oracle_1d(&s, 2).unwrap() - 0.25).abs() < 1e-15);
        assert!((uncovered_prob_oracle_1d(&s, 7).unwrap() - 0.25).abs() < 1e-15);
        assert!(uncovered_prob_oracle_1d(&spec2(0.5, degenerate_int(1)), 3).is_err());
    }

    #[test]
    fn partial_sums_match_direct_oracle_summation() {
        let s = spec2(0.5, degenerate_int(1));
        let sums = series_partial_sums(&s, 1, 12).unwrap();
        assert_eq!(sums.len(), 11);
        let mut direct = 0.0;
        for (idx, i) in (2..=12u64).enumerate() {
            direct += uncovered_prob_oracle(&s, i, 1).unwrap();
            assert!((sums[idx] - direct).abs() < 1e-12, "i={i}");
        }
        assert!(series_partial_sums(&s, 1, 1).is_err());
    }

    #[test]
    fn partial_sums_grow_linearly_for_short_reach() {
        // Finite-support reach: beyond the support the terms stop shrinking,
        // so the series diverges with constant late increments.
        let s = spec2(0.6, degenerate_int(2));
        let sums = series_partial_sums(&s, 2, 10_000).unwrap();
        let late = sums[9000] - sums[8999];
        let later = sums[9996] - sums[9995];
        assert!(late > 0.0);
        assert!((late - later).abs() < 1e-15);
        assert!(sums[9996] > sums[5000] + 1000.0 * late * 0.99);
    }

    #[test]
    fn partial_sums_saturate_for_heavy_reach() {
        // j = 20 multiplies the Gauss exponent far past 1: terms decay fast.
        let s = spec2(0.9, RadiusDistribution::discrete_pareto(2.0).unwrap());
        let sums = series_partial_sums(&s, 20, 2000).unwrap();
        let last = *sums.last().unwrap();
        let tail_increment = last - sums[sums.len() - 101];
        assert!(tail_increment < 1e-6 * last, "tail {tail_increment} vs {last}");
    }

    #[test]
    fn diagnostic_classifies_real_specs() {
        // Row 1 terms have ratio (1 − p·P(ρ ≥ i)); with P(ρ ≥ i) ≈ 2/i the
        // Gauss exponent is about 2p.
        let heavy = RadiusDistribution::discrete_pareto(2.0).unwrap();
        let v = divergence_diagnostic(&spec2(0.3, heavy.clone()), 1, 500, 1500).unwrap();
        assert_eq!(v.status, Divergence::Diverges);
        assert!(v.fitted_c.unwrap() < 0.9);

        let v = divergence_diagnostic(&spec2(0.9, heavy.clone()), 1, 500, 1500).unwrap();
        assert_eq!(v.status, Divergence::Converges);

        let v = divergence_diagnostic(&spec2(0.5, heavy.clone()), 1, 500, 1500).unwrap();
        assert_eq!(v.status, Divergence::Indeterminate);

        assert!(divergence_diagnostic(&spec2(0.5, heavy), 1, 1, 10).is_err());
    }

    #[test]
    fn renewal_identity_exact_cases() {
        let s = spec2(0.5, degenerate_int(1));
        let dev = renewal_identity_check(&s, 1, &[(2, 4), (2, 2), (3, 7), (1, 1)]).unwrap();
        assert!(dev <= 1e-12, "deviation {dev}");
    }

    #[test]
    fn renewal_identity_fuzz() {
        let laws = [
            degenerate_int(1),
            degenerate_int(2),
            RadiusDistribution::discrete_pareto(1.5).unwrap(),
            RadiusDistribution::discrete_table(vec![(1, 0.4), (3, 0.6)]).unwrap(),
        ];
        let mut stream = split_stream(23, 0);
        for trial in 0..100 {
            let p = 0.05 + 0.9 * stream.uniform();
            let rho = laws[trial % laws.len()].clone();
            let j = 1 + (stream.uniform() * 4.0) as u64;
            let i = 1 + (stream.uniform() * 8.0) as u64;
            let k = i + (stream.uniform() * 8.0) as u64;
            let s = spec2(p, rho);
            let dev = renewal_identity_check(&s, j, &[(i, k)]).unwrap();
            assert!(dev <= 1e-10, "trial {trial}: j={j} i={i} k={k} dev={dev}");
        }
    }

    #[test]
    fn simulation_high_density_covers_from_the_start() {
        let s = spec2(0.95, degenerate_int(2));
        let mut early = 0;
        for rep in 0..100u64 {
            let mut stream = split_stream(61, rep);
            let summary = simulate_lattice(&s, 20, &mut stream).unwrap();
            if summary.t_hat.is_some_and(|t| t <= 2) {
                early += 1;
            }
        }
        assert!(early >= 95, "early coverage in {early}/100 runs");
    }

    #[test]
    fn simulation_frequency_matches_oracle() {
        let s = spec2(0.5, degenerate_int(1));
        let target = [3u32, 2u32];
        let oracle = uncovered_prob_oracle(&s, 3, 2).unwrap();
        let reps = 100_000u64;
        let mut hits = 0u64;
        for rep in 0..reps {
            let mut stream = split_stream(29, rep);
            let summary = simulate_lattice(&s, 6, &mut stream).unwrap();
            debug_assert!(summary.uncovered_count as usize <= UNCOVERED_SAMPLE_CAP);
            if summary.uncovered_sample.iter().any(|p| p == &target) {
                hits += 1;
            }
        }
        let freq = hits as f64 / reps as f64;
        let se = (oracle * (1.0 - oracle) / reps as f64).sqrt();
        assert!(
            (freq - oracle).abs() <= 4.0 * se,
            "freq {freq} vs oracle {oracle} (se {se})"
        );
    }

    #[test]
    fn simulation_reports_are_replayable_and_bounded() {
        let s = spec2(0.4, RadiusDistribution::discrete_table(vec![(1, 0.7), (2, 0.3)]).unwrap());
        let a = simulate_lattice(&s, 30, &mut split_stream(7, 1)).unwrap();
        let b = simulate_lattice(&s, 30, &mut split_stream(7, 1)).unwrap();
        assert_eq!(a, b);
        assert!(a.uncovered_sample.len() <= UNCOVERED_SAMPLE_CAP);
        assert_eq!(a.guard, 3);
        assert!(simulate_lattice(&s, 3, &mut split_stream(7, 2)).is_err());
    }

    #[test]
    fn simulation_works_in_one_and_three_dimensions() {
        let s1 = LatticeSpec::new(1, 0.9, degenerate_int(2)).unwrap();
        let summary = simulate_lattice(&s1, 50, &mut split_stream(3, 0)).unwrap();
        assert!(summary.t_hat.is_some());

        let s3 = LatticeSpec::new(3, 0.9, degenerate_int(2)).unwrap();
        let summary = simulate_lattice(&s3, 10, &mut split_stream(3, 1)).unwrap();
        assert!(summary.uncovered_count < 9u64.pow(3));
    }

    #[test]
    fn truncation_note_fires_for_heavy_tails() {
        let heavy = spec2(0.5, RadiusDistribution::discrete_pareto(2.0).unwrap());
        let summary = simulate_lattice(&heavy, 10, &mut split_stream(5, 0)).unwrap();
        assert!(summary.truncation_note.is_some());

        let light = spec2(0.5, degenerate_int(1));
        let summary = simulate_lattice(&light, 20, &mut split_stream(5, 1)).unwrap();
        assert!(summary.truncation_note.is_none());
    }
}
