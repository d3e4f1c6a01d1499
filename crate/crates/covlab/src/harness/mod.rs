//! Experiment harness: parse a config file, dispatch to the right model
//! operation with seeded streams, and emit CSV or JSON atomically. Every
//! output row carries the config hash so results on disk trace back to the
//! exact run that wrote them.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::continuum::{
    coverage_profile, estimate_full_coverage_probability, estimate_vacancy_expectation,
    vacancy_expectation_exact, PoissonBooleanSpec, ScaledRadiusSpec, ShapeKind,
};
use crate::discretization::{sample_orthant_configuration, sandwich_check};
use crate::distributions::{ExtendedReal, RadiusDistribution};
use crate::error::{CovlabError, Result};
use crate::experiment::short_hash;
use crate::geometry::AlignedBox;
use crate::intervals::{
    cantor_empty_criterion, cantor_measure_criterion, estimate_cantor_vacancy, expected_vacancy,
    shepp_criterion, CantorSequence, LengthMeasure, PowerPiece,
};
use crate::lattice::{divergence_diagnostic, series_partial_sums, simulate_lattice, LatticeSpec};
use crate::markov::{
    recurrence_table, simulate_markov_coverage, stationary_open_fraction, threshold_classify,
    Initial, MarkovCoverageSpec,
};
use crate::rng::split_stream;
use crate::stats::wilson_interval;
use crate::verdict::{Divergence, DivergenceVerdict};

use config::{
    parse_distribution, parse_f64, parse_number_list, parse_pair_list, parse_u64, parse_usize,
    split_top_level, RawConfig,
};
use output::write_atomic;

/// Every experiment the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    VacancyExpectation,
    FullCoverage,
    CoverageProfile,
    Discretize,
    LatticeSeries,
    LatticeCoverage,
    MarkovTable,
    MarkovCoverage,
    MarkovThreshold,
    CantorVerdicts,
    CantorSim,
    LineCriterion,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 12] = [
        ExperimentKind::VacancyExpectation,
        ExperimentKind::FullCoverage,
        ExperimentKind::CoverageProfile,
        ExperimentKind::Discretize,
        ExperimentKind::LatticeSeries,
        ExperimentKind::LatticeCoverage,
        ExperimentKind::MarkovTable,
        ExperimentKind::MarkovCoverage,
        ExperimentKind::MarkovThreshold,
        ExperimentKind::CantorVerdicts,
        ExperimentKind::CantorSim,
        ExperimentKind::LineCriterion,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::VacancyExpectation => "vacancy-expectation",
            ExperimentKind::FullCoverage => "full-coverage",
            ExperimentKind::CoverageProfile => "coverage-profile",
            ExperimentKind::Discretize => "discretize",
            ExperimentKind::LatticeSeries => "lattice-series",
            ExperimentKind::LatticeCoverage => "lattice-coverage",
            ExperimentKind::MarkovTable => "markov-table",
            ExperimentKind::MarkovCoverage => "markov-coverage",
            ExperimentKind::MarkovThreshold => "markov-threshold",
            ExperimentKind::CantorVerdicts => "cantor-verdicts",
            ExperimentKind::CantorSim => "cantor-sim",
            ExperimentKind::LineCriterion => "line-criterion",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            ExperimentKind::VacancyExpectation => {
                "mean vacant volume of a Poisson Boolean model vs the exact formula"
            }
            ExperimentKind::FullCoverage => {
                "probability that the Boolean model covers its window, with Wilson interval"
            }
            ExperimentKind::CoverageProfile => {
                "per-annulus coverage fractions of the scaled-radius model"
            }
            ExperimentKind::Discretize => {
                "orthant samples pushed through the lattice discretization with sandwich checks"
            }
            ExperimentKind::LatticeSeries => {
                "partial sums of lattice uncovered probabilities plus a ratio-test verdict"
            }
            ExperimentKind::LatticeCoverage => {
                "simulated lattice coverage: uncovered counts and eventual-coverage thresholds"
            }
            ExperimentKind::MarkovTable => "exact chain uncovered-probability recurrence table",
            ExperimentKind::MarkovCoverage => {
                "simulated chain coverage: uncovered counts and last uncovered site"
            }
            ExperimentKind::MarkovThreshold => {
                "almost-sure coverage classification from the stationary open fraction"
            }
            ExperimentKind::CantorVerdicts => {
                "measure and emptiness series verdicts for a shrinking-arc sequence"
            }
            ExperimentKind::CantorSim => "unit-torus arc simulation vs the exact vacancy formula",
            ExperimentKind::LineCriterion => {
                "line-coverage integral criterion for a length measure"
            }
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        ExperimentKind::ALL
            .iter()
            .find(|k| k.name() == name)
            .copied()
            .ok_or_else(|| {
                let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
                CovlabError::invalid(
                    "kind",
                    format!("unknown experiment kind `{name}`; expected one of: {}", names.join(", ")),
                )
            })
    }

    /// Verdict-only experiments have no row-shaped output to put in a CSV.
    pub fn supports_csv(&self) -> bool {
        !matches!(
            self,
            ExperimentKind::MarkovThreshold
                | ExperimentKind::CantorVerdicts
                | ExperimentKind::LineCriterion
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(CovlabError::invalid("format", format!("expected `csv` or `json`, got `{other}`"))),
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

/// Kind-specific model parameters, validated at parse time.
#[derive(Debug, Clone)]
pub enum ModelConfig {
    Vacancy(PoissonBooleanSpec),
    FullCoverage(PoissonBooleanSpec),
    Profile { spec: ScaledRadiusSpec, annuli: Vec<(f64, f64)>, probes: usize },
    Discretize { lambda: f64, dim: usize, extent: usize, rho: RadiusDistribution },
    LatticeSeries { spec: LatticeSpec, j: u64, i_max: u64, diag_lo: u64, diag_hi: u64 },
    LatticeCoverage { spec: LatticeSpec, extent: usize },
    MarkovTable { spec: MarkovCoverageSpec, k_max: u64 },
    MarkovCoverage { spec: MarkovCoverageSpec, extent: usize },
    MarkovThreshold(MarkovCoverageSpec),
    CantorVerdicts(CantorSequence),
    CantorSim { seq: CantorSequence, levels: usize },
    LineCriterion(LengthMeasure),
}

impl ModelConfig {
    pub fn canonical(&self) -> String {
        match self {
            ModelConfig::Vacancy(spec) | ModelConfig::FullCoverage(spec) => spec.canonical(),
            ModelConfig::Profile { spec, annuli, probes } => {
                let a: Vec<String> =
                    annuli.iter().map(|(i, o)| format!("({i},{o})")).collect();
                format!("{}/annuli=[{}]/probes={probes}", spec.canonical(), a.join(","))
            }
            ModelConfig::Discretize { lambda, dim, extent, rho } => {
                format!("orthant(lambda={lambda},dim={dim},extent={extent},rho={})", rho.canonical())
            }
            ModelConfig::LatticeSeries { spec, j, i_max, diag_lo, diag_hi } => {
                format!("{}/j={j}/i_max={i_max}/diag={diag_lo}-{diag_hi}", spec.canonical())
            }
            ModelConfig::LatticeCoverage { spec, extent } => {
                format!("{}/extent={extent}", spec.canonical())
            }
            ModelConfig::MarkovTable { spec, k_max } => {
                format!("{}/k_max={k_max}", spec.canonical())
            }
            ModelConfig::MarkovCoverage { spec, extent } => {
                format!("{}/extent={extent}", spec.canonical())
            }
            ModelConfig::MarkovThreshold(spec) => spec.canonical(),
            ModelConfig::CantorVerdicts(seq) => seq.canonical(),
            ModelConfig::CantorSim { seq, levels } => format!("{}/levels={levels}", seq.canonical()),
            ModelConfig::LineCriterion(mu) => mu.canonical(),
        }
    }
}

/// A fully parsed experiment: what to run, how many replicates, from which
/// seed, and where the output goes.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub replicates: u64,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub model: ModelConfig,
}

pub const DEFAULT_REPLICATES: u64 = 100;

const MODEL: &str = "model";

fn take_parsed<T>(
    raw: &RawConfig,
    key: &str,
    parse: impl Fn(&str, &str) -> Result<T>,
) -> Result<Option<T>> {
    match raw.take(MODEL, key)? {
        Some(v) => Ok(Some(parse(key, &v)?)),
        None => Ok(None),
    }
}

fn require_parsed<T>(
    raw: &RawConfig,
    key: &str,
    parse: impl Fn(&str, &str) -> Result<T>,
) -> Result<T> {
    let v = raw.require(MODEL, key)?;
    parse(key, &v)
}

fn parse_shape(key: &str, value: &str) -> Result<ShapeKind> {
    match value {
        "cube" => Ok(ShapeKind::Cube),
        "ball" => Ok(ShapeKind::Ball),
        other => Err(CovlabError::Config {
            line: 0,
            message: format!("key `{key}`: expected `cube` or `ball`, got `{other}`"),
        }),
    }
}

fn parse_initial(key: &str, value: &str) -> Result<Initial> {
    match value {
        "stationary" => Ok(Initial::Stationary),
        "start-at-0" => Ok(Initial::StartAt0),
        "start-at-1" => Ok(Initial::StartAt1),
        other => Err(CovlabError::Config {
            line: 0,
            message: format!(
                "key `{key}`: expected `stationary`, `start-at-0`, or `start-at-1`, got `{other}`"
            ),
        }),
    }
}

fn parse_rho(key: &str, value: &str) -> Result<RadiusDistribution> {
    let _ = key;
    parse_distribution(value)
}

fn parse_boolean_spec(raw: &RawConfig) -> Result<PoissonBooleanSpec> {
    let intensity = require_parsed(raw, "intensity", parse_f64)?;
    let dim = require_parsed(raw, "dim", parse_usize)?;
    let shape = require_parsed(raw, "shape", parse_shape)?;
    let rho = require_parsed(raw, "rho", parse_rho)?;
    let corner = take_parsed(raw, "window-corner", parse_number_list)?;
    let sides = take_parsed(raw, "window-sides", parse_number_list)?;
    let window = match (corner, sides) {
        (None, None) => AlignedBox::unit(dim)?,
        (Some(c), Some(s)) => AlignedBox::new(c, s)?,
        _ => {
            return Err(CovlabError::Config {
                line: 0,
                message: "window-corner and window-sides must be given together".into(),
            })
        }
    };
    match take_parsed(raw, "margin-quantile", parse_f64)? {
        Some(q) => PoissonBooleanSpec::new(intensity, dim, shape, rho, window, q),
        None => {
            PoissonBooleanSpec::new(intensity, dim, shape, rho, window, crate::continuum::DEFAULT_MARGIN_QUANTILE)
        }
    }
}

fn parse_lattice_spec(raw: &RawConfig) -> Result<LatticeSpec> {
    let d = require_parsed(raw, "d", parse_usize)?;
    let p = require_parsed(raw, "p", parse_f64)?;
    let rho = require_parsed(raw, "rho", parse_rho)?;
    LatticeSpec::new(d, p, rho)
}

fn parse_markov_spec(raw: &RawConfig) -> Result<MarkovCoverageSpec> {
    let p00 = require_parsed(raw, "p00", parse_f64)?;
    let p01 = require_parsed(raw, "p01", parse_f64)?;
    let p10 = require_parsed(raw, "p10", parse_f64)?;
    let p11 = require_parsed(raw, "p11", parse_f64)?;
    let rho = require_parsed(raw, "rho", parse_rho)?;
    let initial = match raw.take(MODEL, "initial")? {
        Some(v) => parse_initial("initial", &v)?,
        None => Initial::Stationary,
    };
    MarkovCoverageSpec::new(p00, p01, p10, p11, rho, initial)
}

fn parse_cantor_sequence(raw: &RawConfig) -> Result<CantorSequence> {
    let lambda = require_parsed(raw, "lambda", parse_f64)?;
    let form = raw.require(MODEL, "form")?;
    match form.as_str() {
        "parametric" => {
            let c = require_parsed(raw, "c", parse_f64)?;
            let gamma = require_parsed(raw, "gamma", parse_f64)?;
            CantorSequence::parametric(c, gamma, lambda)
        }
        "explicit" => {
            let terms = require_parsed(raw, "terms", parse_number_list)?;
            CantorSequence::explicit(terms, lambda)
        }
        other => Err(CovlabError::Config {
            line: 0,
            message: format!("key `form`: expected `parametric` or `explicit`, got `{other}`"),
        }),
    }
}

fn parse_length_measure(raw: &RawConfig) -> Result<LengthMeasure> {
    let mut atoms = Vec::new();
    for value in raw.take_all(MODEL, "atom") {
        let parts = split_top_level(&value);
        if parts.len() != 2 {
            return Err(CovlabError::Config {
                line: 0,
                message: format!("key `atom`: expected `y, mass`, got `{value}`"),
            });
        }
        atoms.push((parse_f64("atom", &parts[0])?, parse_f64("atom", &parts[1])?));
    }
    let mut pieces = Vec::new();
    for value in raw.take_all(MODEL, "piece") {
        let parts = split_top_level(&value);
        if parts.len() != 4 {
            return Err(CovlabError::Config {
                line: 0,
                message: format!("key `piece`: expected `a, b, beta, gamma` (b may be `inf`), got `{value}`"),
            });
        }
        let a = parse_f64("piece", &parts[0])?;
        let b = if parts[1] == "inf" { None } else { Some(parse_f64("piece", &parts[1])?) };
        let beta = parse_f64("piece", &parts[2])?;
        let gamma = parse_f64("piece", &parts[3])?;
        pieces.push(PowerPiece::new(a, b, beta, gamma)?);
    }
    LengthMeasure::new(atoms, pieces)
}

impl ExperimentConfig {
    /// Parse a config file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_str(&text)
    }

    /// Parse config text.
    pub fn parse_str(text: &str) -> Result<Self> {
        let raw = RawConfig::parse(text)?;
        let kind_name = raw.require("experiment", "kind")?;
        let kind = ExperimentKind::from_name(&kind_name)?;
        let replicates = match raw.take("experiment", "replicates")? {
            Some(v) => parse_u64("replicates", &v)?,
            None => DEFAULT_REPLICATES,
        };
        let seed = match raw.take("experiment", "seed")? {
            Some(v) => parse_u64("seed", &v)?,
            None => 0,
        };
        let format = match raw.take("experiment", "format")? {
            Some(v) => OutputFormat::from_name(&v)?,
            None => OutputFormat::Json,
        };
        let out = raw.take("experiment", "out")?.map(PathBuf::from);

        let model = match kind {
            ExperimentKind::VacancyExpectation => ModelConfig::Vacancy(parse_boolean_spec(&raw)?),
            ExperimentKind::FullCoverage => ModelConfig::FullCoverage(parse_boolean_spec(&raw)?),
            ExperimentKind::CoverageProfile => {
                let intensity = require_parsed(&raw, "intensity", parse_f64)?;
                let dim = require_parsed(&raw, "dim", parse_usize)?;
                let rho = require_parsed(&raw, "rho", parse_rho)?;
                let scale_c = require_parsed(&raw, "scale-c", parse_f64)?;
                let r0 = require_parsed(&raw, "r0", parse_f64)?;
                let annuli = require_parsed(&raw, "annuli", parse_pair_list)?;
                let probes = require_parsed(&raw, "probes", parse_usize)?;
                let base = PoissonBooleanSpec::unit_window(intensity, dim, ShapeKind::Ball, rho)?;
                let spec = ScaledRadiusSpec::new(base, scale_c, r0)?;
                ModelConfig::Profile { spec, annuli, probes }
            }
            ExperimentKind::Discretize => {
                let lambda = require_parsed(&raw, "lambda", parse_f64)?;
                let dim = require_parsed(&raw, "dim", parse_usize)?;
                let extent = require_parsed(&raw, "extent", parse_usize)?;
                let rho = require_parsed(&raw, "rho", parse_rho)?;
                ModelConfig::Discretize { lambda, dim, extent, rho }
            }
            ExperimentKind::LatticeSeries => {
                let spec = parse_lattice_spec(&raw)?;
                let j = require_parsed(&raw, "j", parse_u64)?;
                let i_max = require_parsed(&raw, "i-max", parse_u64)?;
                let diag_lo = match take_parsed(&raw, "diag-lo", parse_u64)? {
                    Some(v) => v,
                    None => (i_max / 2).max(j + 1),
                };
                let diag_hi = match take_parsed(&raw, "diag-hi", parse_u64)? {
                    Some(v) => v,
                    None => i_max,
                };
                ModelConfig::LatticeSeries { spec, j, i_max, diag_lo, diag_hi }
            }
            ExperimentKind::LatticeCoverage => {
                let spec = parse_lattice_spec(&raw)?;
                let extent = require_parsed(&raw, "extent", parse_usize)?;
                ModelConfig::LatticeCoverage { spec, extent }
            }
            ExperimentKind::MarkovTable => {
                let spec = parse_markov_spec(&raw)?;
                let k_max = require_parsed(&raw, "k-max", parse_u64)?;
                ModelConfig::MarkovTable { spec, k_max }
            }
            ExperimentKind::MarkovCoverage => {
                let spec = parse_markov_spec(&raw)?;
                let extent = require_parsed(&raw, "extent", parse_usize)?;
                ModelConfig::MarkovCoverage { spec, extent }
            }
            ExperimentKind::MarkovThreshold => ModelConfig::MarkovThreshold(parse_markov_spec(&raw)?),
            ExperimentKind::CantorVerdicts => ModelConfig::CantorVerdicts(parse_cantor_sequence(&raw)?),
            ExperimentKind::CantorSim => {
                let seq = parse_cantor_sequence(&raw)?;
                let levels = require_parsed(&raw, "levels", parse_usize)?;
                ModelConfig::CantorSim { seq, levels }
            }
            ExperimentKind::LineCriterion => ModelConfig::LineCriterion(parse_length_measure(&raw)?),
        };
        raw.finish()?;

        if format == OutputFormat::Csv && !kind.supports_csv() {
            return Err(CovlabError::invalid(
                "format",
                format!("experiment `{}` emits a verdict only; use format = json", kind.name()),
            ));
        }

        Ok(ExperimentConfig { kind, replicates, seed, format, out, model })
    }

    /// Canonical one-line description; its hash ties outputs to this config.
    pub fn canonical(&self) -> String {
        format!(
            "kind={};model={};replicates={};seed={}",
            self.kind.name(),
            self.model.canonical(),
            self.replicates,
            self.seed
        )
    }

    pub fn config_hash(&self) -> String {
        short_hash(&self.canonical())
    }

    /// Output file name used when the config names none.
    pub fn default_out_name(&self) -> String {
        format!("covlab-{}-{}.{}", self.kind.name(), self.config_hash(), self.format.extension())
    }

    /// Run the experiment and return its rendered outputs.
    pub fn execute(&self) -> Result<ExperimentOutput> {
        let hash = self.config_hash();
        let mut summary = Map::new();
        summary.insert("kind".into(), json!(self.kind.name()));
        summary.insert("config_hash".into(), json!(hash));
        summary.insert("canonical".into(), json!(self.canonical()));
        summary.insert("seed".into(), json!(self.seed));
        let mut csv: Option<CsvTable> = None;

        match &self.model {
            ModelConfig::Vacancy(spec) => {
                let (result, rows) =
                    estimate_vacancy_expectation(spec, self.replicates, self.seed)?;
                let exact = vacancy_expectation_exact(spec).ok();
                summary.insert("replicates".into(), json!(self.replicates));
                summary.insert("estimate".into(), json!(result.estimate));
                summary.insert("std_error".into(), json!(result.std_error));
                summary.insert("exact".into(), json!(exact));
                csv = Some(CsvTable {
                    header: "config_hash,replicate,n_shapes,vacancy,covered".into(),
                    rows: rows
                        .iter()
                        .map(|r| {
                            format!(
                                "{hash},{},{},{},{}",
                                r.replicate,
                                r.n_shapes,
                                r.vacancy.map_or(String::new(), |v| v.to_string()),
                                r.covered
                            )
                        })
                        .collect(),
                });
            }
            ModelConfig::FullCoverage(spec) => {
                let (result, rows) =
                    estimate_full_coverage_probability(spec, self.replicates, self.seed)?;
                summary.insert("replicates".into(), json!(self.replicates));
                summary.insert("estimate".into(), json!(result.estimate));
                summary.insert("std_error".into(), json!(result.std_error));
                summary.insert("wilson".into(), json!(result.wilson));
                csv = Some(CsvTable {
                    header: "config_hash,replicate,n_shapes,covered,unknown".into(),
                    rows: rows
                        .iter()
                        .map(|r| {
                            format!("{hash},{},{},{},{}", r.replicate, r.n_shapes, r.covered, r.unknown)
                        })
                        .collect(),
                });
            }
            ModelConfig::Profile { spec, annuli, probes } => {
                let profile = coverage_profile(spec, annuli, *probes, self.replicates, self.seed)?;
                summary.insert("replicates".into(), json!(self.replicates));
                summary.insert("annuli".into(), serde_json::to_value(&profile.annuli).expect("serializable"));
                summary.insert("truncation_note".into(), json!(profile.truncation_note));
                csv = Some(CsvTable {
                    header: "config_hash,r_in,r_out,probes,covered,total,fraction".into(),
                    rows: profile
                        .annuli
                        .iter()
                        .map(|a| {
                            format!(
                                "{hash},{},{},{},{},{},{}",
                                a.r_in, a.r_out, a.probes, a.covered, a.total, a.fraction
                            )
                        })
                        .collect(),
                });
            }
            ModelConfig::Discretize { lambda, dim, extent, rho } => {
                let reports: Vec<(u64, usize, usize, bool)> = (0..self.replicates)
                    .into_par_iter()
                    .map(|rep| {
                        let mut stream = split_stream(self.seed, rep);
                        let sample =
                            sample_orthant_configuration(*lambda, *dim, *extent, rho, &mut stream)?;
                        let report = sandwich_check(&sample)?;
                        let config = crate::discretization::discretize(&sample);
                        Ok((rep, sample.cubes.len(), config.green_count(), report.holds))
                    })
                    .collect::<Result<_>>()?;
                let n_cells = extent.pow(*dim as u32);
                let all_hold = reports.iter().all(|r| r.3);
                let mean_green =
                    reports.iter().map(|r| r.2 as f64).sum::<f64>() / reports.len().max(1) as f64;
                summary.insert("replicates".into(), json!(self.replicates));
                summary.insert("n_cells".into(), json!(n_cells));
                summary.insert("sandwich_holds_all".into(), json!(all_hold));
                summary.insert("mean_green_cells".into(), json!(mean_green));
                csv = Some(CsvTable {
                    header: "config_hash,replicate,n_points,green_cells,sandwich_holds".into(),
                    rows: reports
                        .iter()
                        .map(|(rep, pts, green, holds)| format!("{hash},{rep},{pts},{green},{holds}"))
                        .collect(),
                });
            }
            ModelConfig::LatticeSeries { spec, j, i_max, diag_lo, diag_hi } => {
                let sums = series_partial_sums(spec, *j, *i_max)?;
                let verdict = divergence_diagnostic(spec, *j, *diag_lo, *diag_hi)?;
                summary.insert("j".into(), json!(j));
                summary.insert("i_max".into(), json!(i_max));
                summary.insert("verdict".into(), verdict_to_json(&verdict));
                summary.insert(
                    "final_partial_sum".into(),
                    json!(sums.last().copied().unwrap_or(0.0)),
                );
                csv = Some(CsvTable {
                    header: "config_hash,i,partial_sum".into(),
                    rows: sums
                        .iter()
                        .enumerate()
                        .map(|(idx, s)| format!("{hash},{},{s}", *j + 1 + idx as u64))
                        .collect(),
                });
            }
            ModelConfig::LatticeCoverage { spec, extent } => {
                let summaries: Vec<_> = (0..self.replicates)
                    .into_par_iter()
                    .map(|rep| {
                        let mut stream = split_stream(self.seed, rep);
                        simulate_lattice(spec, *extent, &mut stream).map(|s| (rep, s))
                    })
                    .collect::<Result<_>>()?;
                let found = summaries.iter().filter(|(_, s)| s.t_hat.is_some()).count() as u64;
                let mean_uncovered = summaries.iter().map(|(_, s)| s.uncovered_count as f64).sum::<f64>()
                    / summaries.len().max(1) as f64;
                summary.insert("replicates".into(), json!(self.replicates));
                summary.insert("extent".into(), json!(extent));
                summary.insert("threshold_found".into(), json!(found));
                summary.insert(
                    "threshold_found_wilson".into(),
                    json!(wilson_interval(found, self.replicates, 0.95)?),
                );
                summary.insert("mean_uncovered".into(), json!(mean_uncovered));
                csv = Some(CsvTable {
                    header: "config_hash,replicate,uncovered_count,t_hat".into(),
                    rows: summaries
                        .iter()
                        .map(|(rep, s)| {
                            format!(
                                "{hash},{rep},{},{}",
                                s.uncovered_count,
                                s.t_hat.map_or(String::new(), |t| t.to_string())
                            )
                        })
                        .collect(),
                });
            }
            ModelConfig::MarkovTable { spec, k_max } => {
                let table = recurrence_table(spec, *k_max)?;
                let last = table.rows.last().expect("k_max >= 1");
                summary.insert("k_max".into(), json!(k_max));
                summary.insert("stationary_open_fraction".into(), json!(stationary_open_fraction(spec)));
                summary.insert("final_p0".into(), json!(last.p0));
                summary.insert("final_p1".into(), json!(last.p1));
                summary.insert("final_p_init".into(), json!(last.p_init));
                csv = Some(CsvTable {
                    header: "config_hash,k,p0,p1,p_init".into(),
                    rows: table
                        .rows
                        .iter()
                        .map(|r| format!("{hash},{},{},{},{}", r.k, r.p0, r.p1, r.p_init))
                        .collect(),
                });
            }
            ModelConfig::MarkovCoverage { spec, extent } => {
                let summaries: Vec<_> = (0..self.replicates)
                    .into_par_iter()
                    .map(|rep| {
                        let mut stream = split_stream(self.seed, rep);
                        simulate_markov_coverage(spec, *extent, &mut stream).map(|s| (rep, s))
                    })
                    .collect::<Result<_>>()?;
                let fully = summaries.iter().filter(|(_, s)| s.uncovered_count == 0).count() as u64;
                let mean_uncovered = summaries.iter().map(|(_, s)| s.uncovered_count as f64).sum::<f64>()
                    / summaries.len().max(1) as f64;
                summary.insert("replicates".into(), json!(self.replicates));
                summary.insert("extent".into(), json!(extent));
                summary.insert("fully_covered".into(), json!(fully));
                summary.insert(
                    "fully_covered_wilson".into(),
                    json!(wilson_interval(fully, self.replicates, 0.95)?),
                );
                summary.insert("mean_uncovered".into(), json!(mean_uncovered));
                csv = Some(CsvTable {
                    header: "config_hash,replicate,uncovered_count,last_uncovered".into(),
                    rows: summaries
                        .iter()
                        .map(|(rep, s)| {
                            format!(
                                "{hash},{rep},{},{}",
                                s.uncovered_count,
                                s.last_uncovered.map_or(String::new(), |v| v.to_string())
                            )
                        })
                        .collect(),
                });
            }
            ModelConfig::MarkovThreshold(spec) => {
                let verdict = threshold_classify(spec);
                summary.insert("verdict".into(), serde_json::to_value(&verdict).expect("serializable"));
            }
            ModelConfig::CantorVerdicts(seq) => {
                summary.insert("measure_criterion".into(), verdict_to_json(&cantor_measure_criterion(seq)));
                summary.insert("empty_criterion".into(), verdict_to_json(&cantor_empty_criterion(seq)));
            }
            ModelConfig::CantorSim { seq, levels } => {
                let (result, rows) =
                    estimate_cantor_vacancy(seq, *levels, self.replicates, self.seed)?;
                summary.insert("replicates".into(), json!(self.replicates));
                summary.insert("levels".into(), json!(levels));
                summary.insert("estimate".into(), json!(result.estimate));
                summary.insert("std_error".into(), json!(result.std_error));
                summary.insert("exact".into(), json!(expected_vacancy(seq, *levels)?));
                csv = Some(CsvTable {
                    header: "config_hash,replicate,vacant_measure,gap_count,largest_gap".into(),
                    rows: rows
                        .iter()
                        .map(|r| {
                            format!(
                                "{hash},{},{},{},{}",
                                r.replicate, r.vacant_measure, r.gap_count, r.largest_gap
                            )
                        })
                        .collect(),
                });
            }
            ModelConfig::LineCriterion(mu) => {
                let verdict = shepp_criterion(mu);
                summary.insert("verdict".into(), verdict_to_json(&verdict));
                summary.insert(
                    "covered_iff_diverges".into(),
                    json!(match verdict.status {
                        Divergence::Diverges => "covers-line",
                        Divergence::Converges => "does-not-cover-line",
                        Divergence::Indeterminate => "indeterminate",
                    }),
                );
            }
        }

        Ok(ExperimentOutput { summary: Value::Object(summary), csv })
    }

    /// Run and write the selected format atomically; returns the path
    /// written.
    pub fn run_to_files(&self) -> Result<PathBuf> {
        let output = self.execute()?;
        let path = self
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(self.default_out_name()));
        let contents = match self.format {
            OutputFormat::Json => output.to_json_string(),
            OutputFormat::Csv => output
                .to_csv_string()
                .ok_or_else(|| CovlabError::invalid("format", "experiment emitted no rows"))?,
        };
        write_atomic(&path, &contents)?;
        Ok(path)
    }
}

/// Row-shaped output: a header line and one line per row, every row led by
/// the config hash.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: String,
    pub rows: Vec<String>,
}

/// Rendered experiment results.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub summary: Value,
    pub csv: Option<CsvTable>,
}

impl ExperimentOutput {
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn to_csv_string(&self) -> Option<String> {
        let table = self.csv.as_ref()?;
        let mut s = String::with_capacity(table.header.len() + 32 * table.rows.len());
        s.push_str(&table.header);
        s.push('\n');
        for row in &table.rows {
            s.push_str(row);
            s.push('\n');
        }
        Some(s)
    }
}

fn status_name(status: Divergence) -> &'static str {
    match status {
        Divergence::Diverges => "diverges",
        Divergence::Converges => "converges",
        Divergence::Indeterminate => "indeterminate",
    }
}

fn json_number_or_inf(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_infinite() && v > 0.0 {
        json!("inf")
    } else {
        Value::Null
    }
}

fn verdict_to_json(verdict: &DivergenceVerdict) -> Value {
    let _ = ExtendedReal::Infinity; // keep the serializer convention nearby
    json!({
        "status": status_name(verdict.status),
        "fitted_c": verdict.fitted_c,
        "evidence": verdict.evidence.iter().map(|&v| json_number_or_inf(v)).collect::<Vec<_>>(),
    })
}
