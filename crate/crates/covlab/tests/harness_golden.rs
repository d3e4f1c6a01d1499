//! Golden-file tests: the CSV column layouts and the exact rendered bytes of
//! representative runs are frozen here. A diff in any of these is a breaking
//! change to the output contract (column order, float formatting, JSON key
//! order, RNG streams) and must be deliberate.

use covlab::harness::{ExperimentConfig, ExperimentKind};

fn render(text: &str) -> (ExperimentConfig, covlab::harness::ExperimentOutput) {
    let cfg = ExperimentConfig::parse_str(text).expect("golden config parses");
    let out = cfg.execute().expect("golden config runs");
    (cfg, out)
}

#[test]
fn csv_headers_are_frozen_per_kind() {
    let cases: [(&str, &str, &str); 9] = [
        (
            "vacancy-expectation",
            "[experiment]\nkind = vacancy-expectation\nreplicates = 2\nseed = 1\nformat = csv\n\n[model]\nintensity = 1.0\ndim = 1\nshape = cube\nrho = degenerate(1)\n",
            "config_hash,replicate,n_shapes,vacancy,covered",
        ),
        (
            "full-coverage",
            "[experiment]\nkind = full-coverage\nreplicates = 2\nseed = 1\nformat = csv\n\n[model]\nintensity = 2.0\ndim = 1\nshape = cube\nrho = degenerate(0.5)\n",
            "config_hash,replicate,n_shapes,covered,unknown",
        ),
        (
            "coverage-profile",
            "[experiment]\nkind = coverage-profile\nreplicates = 2\nseed = 1\nformat = csv\n\n[model]\nintensity = 1.0\ndim = 2\nrho = bounded-uniform(0,1)\nscale-c = 4.0\nr0 = 2.718281828459045\nannuli = (3,5)\nprobes = 16\n",
            "config_hash,r_in,r_out,probes,covered,total,fraction",
        ),
        (
            "discretize",
            "[experiment]\nkind = discretize\nreplicates = 2\nseed = 1\nformat = csv\n\n[model]\nlambda = 1.0\ndim = 2\nextent = 5\nrho = bounded-uniform(0,2)\n",
            "config_hash,replicate,n_points,green_cells,sandwich_holds",
        ),
        (
            "lattice-series",
            "[experiment]\nkind = lattice-series\nseed = 1\nformat = csv\n\n[model]\nd = 2\np = 0.5\nrho = degenerate(1)\nj = 1\ni-max = 6\n",
            "config_hash,i,partial_sum",
        ),
        (
            "lattice-coverage",
            "[experiment]\nkind = lattice-coverage\nreplicates = 2\nseed = 1\nformat = csv\n\n[model]\nd = 2\np = 0.7\nrho = degenerate(2)\nextent = 8\n",
            "config_hash,replicate,uncovered_count,t_hat",
        ),
        (
            "markov-table",
            "[experiment]\nkind = markov-table\nseed = 1\nformat = csv\n\n[model]\np00 = 0.4\np01 = 0.6\np10 = 0.3\np11 = 0.7\nrho = degenerate(1)\nk-max = 3\n",
            "config_hash,k,p0,p1,p_init",
        ),
        (
            "markov-coverage",
            "[experiment]\nkind = markov-coverage\nreplicates = 2\nseed = 1\nformat = csv\n\n[model]\np00 = 0.4\np01 = 0.6\np10 = 0.3\np11 = 0.7\nrho = discrete-pareto(2.0)\nextent = 50\n",
            "config_hash,replicate,uncovered_count,last_uncovered",
        ),
        (
            "cantor-sim",
            "[experiment]\nkind = cantor-sim\nreplicates = 2\nseed = 1\nformat = csv\n\n[model]\nform = explicit\nterms = 0.5, 0.25\nlambda = 1.0\nlevels = 2\n",
            "config_hash,replicate,vacant_measure,gap_count,largest_gap",
        ),
    ];
    for (name, text, header) in cases {
        let (cfg, out) = render(text);
        assert_eq!(cfg.kind.name(), name);
        let table = out.csv.unwrap_or_else(|| panic!("{name}: no CSV"));
        assert_eq!(table.header, header, "{name}: header drifted");
    }
    let csv_kinds = ExperimentKind::ALL.iter().filter(|k| k.supports_csv()).count();
    assert_eq!(csv_kinds, cases.len(), "a CSV-capable kind is missing golden coverage");
}

#[test]
fn markov_table_bytes_are_frozen() {
    let (cfg, out) = render(
        "[experiment]\nkind = markov-table\nseed = 11\nformat = csv\n\n[model]\np00 = 0.4\np01 = 0.6\np10 = 0.3\np11 = 0.7\nrho = degenerate(1)\nk-max = 4\n",
    );
    assert_eq!(cfg.default_out_name(), "covlab-markov-table-8952e6fb39a2078c.csv");
    let expected = "\
config_hash,k,p0,p1,p_init
8952e6fb39a2078c,1,1,0,0.33333333333333326
8952e6fb39a2078c,2,0.4,0,0.1333333333333333
8952e6fb39a2078c,3,0.16000000000000003,0.12,0.13333333333333333
8952e6fb39a2078c,4,0.136,0.132,0.13333333333333333
";
    assert_eq!(out.to_csv_string().unwrap(), expected);
    let json = "\
{
  \"canonical\": \"kind=markov-table;model=markov(p00=0.4,p01=0.6,p10=0.3,p11=0.7,rho=degenerate(1),initial=stationary)/k_max=4;replicates=100;seed=11\",
  \"config_hash\": \"8952e6fb39a2078c\",
  \"final_p0\": 0.136,
  \"final_p1\": 0.132,
  \"final_p_init\": 0.13333333333333333,
  \"k_max\": 4,
  \"kind\": \"markov-table\",
  \"seed\": 11,
  \"stationary_open_fraction\": 0.6666666666666667
}
";
    assert_eq!(out.to_json_string(), json);
}

#[test]
fn lattice_series_bytes_are_frozen() {
    let (_, out) = render(
        "[experiment]\nkind = lattice-series\nseed = 11\nformat = csv\n\n[model]\nd = 2\np = 0.5\nrho = degenerate(1)\nj = 1\ni-max = 6\n",
    );
    let expected = "\
config_hash,i,partial_sum
9c4cd932d401f704,2,0.25
9c4cd932d401f704,3,0.5
9c4cd932d401f704,4,0.75
9c4cd932d401f704,5,1
9c4cd932d401f704,6,1.25
";
    assert_eq!(out.to_csv_string().unwrap(), expected);
}

#[test]
fn cantor_sim_bytes_are_frozen() {
    let (_, out) = render(
        "[experiment]\nkind = cantor-sim\nreplicates = 4\nseed = 5\nformat = csv\n\n[model]\nform = explicit\nterms = 0.5, 0.25\nlambda = 1.0\nlevels = 2\n",
    );
    let expected = "\
config_hash,replicate,vacant_measure,gap_count,largest_gap
c76e33441a286622,0,0.25,3,0.16949173472628432
c76e33441a286622,1,0.75,2,0.4857002641482602
c76e33441a286622,2,0,0,0
c76e33441a286622,3,0.37986089946943147,1,0.37986089946943147
";
    assert_eq!(out.to_csv_string().unwrap(), expected);
}

#[test]
fn vacancy_bytes_are_frozen() {
    let (_, out) = render(
        "[experiment]\nkind = vacancy-expectation\nreplicates = 4\nseed = 1\nformat = csv\n\n[model]\nintensity = 1.0\ndim = 1\nshape = cube\nrho = degenerate(1)\n",
    );
    let expected = "\
config_hash,replicate,n_shapes,vacancy,covered
fc61694cc931b277,0,1,0.1931203618697097,false
fc61694cc931b277,1,1,0.11750509926169306,false
fc61694cc931b277,2,3,0.6041853842543932,false
fc61694cc931b277,3,2,0.21623334540770656,false
";
    assert_eq!(out.to_csv_string().unwrap(), expected);
}

#[test]
fn markov_threshold_json_is_frozen() {
    let (_, out) = render(
        "[experiment]\nkind = markov-threshold\nseed = 3\n\n[model]\np00 = 0.9\np01 = 0.1\np10 = 0.15\np11 = 0.85\nrho = discrete-pareto(2.0)\n",
    );
    let expected = "\
{
  \"canonical\": \"kind=markov-threshold;model=markov(p00=0.9,p01=0.1,p10=0.15,p11=0.85,rho=discrete-pareto(c=2),initial=stationary);replicates=100;seed=3\",
  \"config_hash\": \"bb8f8d9c37912f96\",
  \"kind\": \"markov-threshold\",
  \"seed\": 3,
  \"verdict\": {
    \"class\": \"does-not-cover-almost-surely\",
    \"inv_liminf\": 0.5,
    \"inv_limsup\": 0.5,
    \"open_fraction\": 0.4,
    \"tail_liminf\": 2.0,
    \"tail_limsup\": 2.0
  }
}
";
    assert_eq!(out.to_json_string(), expected);
}

#[test]
fn line_criterion_json_is_frozen() {
    let (_, out) = render(
        "[experiment]\nkind = line-criterion\nseed = 2\n\n[model]\npiece = 0, 1, 1.5, 2\natom = 0.5, 0.3\n",
    );
    let expected = "\
{
  \"canonical\": \"kind=line-criterion;model=length-measure[atom(0.5,0.3),piece(0,1,beta=1.5,gamma=2)];replicates=100;seed=2\",
  \"config_hash\": \"b9afbc3b75e3953a\",
  \"covered_iff_diverges\": \"covers-line\",
  \"kind\": \"line-criterion\",
  \"seed\": 2,
  \"verdict\": {
    \"evidence\": [
      19.37326703694641,
      12.465630557964275
    ],
    \"fitted_c\": 1.499974202907774,
    \"status\": \"diverges\"
  }
}
";
    assert_eq!(out.to_json_string(), expected);
}
