//! Experiment configuration, per-cell runners and CSV result rows.
//!
//! A configuration names a graph source, the algorithms to run and a list
//! of seeds. Each `(algorithm, seed)` pair is one cell; cells run through
//! [`crate::exec`] and come back in input order, so output files do not
//! depend on the thread count.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::exec::{map_slice, Exec};
use crate::graphs::{
    gen_almost_3colorable_expander, gen_noisy_hypercube, gen_planted_is_expander_with, gen_random_regular,
    overlay_bipartite_expander, parse_edge_list, spectral_stats, Graph, PlantedInstance, PlantedParams,
};
use crate::hypercube::{noisy_hypercube_certificate, CertifiedSsve};
use crate::patterns::{sample_six_variable, sample_triple_coloring, verify_clustering_coloring, verify_clustering_is};
use crate::polyapprox::{sqrt_proxy, step_poly, verify_proxy_properties, verify_step};
use crate::pseudodist::{build_coloring_relaxation, build_is_relaxation, solve, PseudoDistribution, SolveParams};
use crate::rounding::{
    kms_round, round_3colorable, round_expander_is, round_ssve, two_approx_vc_is, ColoringParams, ExpanderIsParams,
    KmsParams, RoundingReport, SsveParams,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    ExpanderIs,
    ThreeColorable,
    Ssve,
    Kms,
    /// Greedy-matching complement, no relaxation.
    Matching,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::ExpanderIs => "expander_is",
            Algorithm::ThreeColorable => "three_colorable",
            Algorithm::Ssve => "ssve",
            Algorithm::Kms => "kms",
            Algorithm::Matching => "matching",
        }
    }
}

/// Where the graph of each cell comes from. Generators are seeded with the
/// cell seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSource {
    Planted {
        n: usize,
        eps: f64,
        d: usize,
        /// Defaults to the generator bound; `null` accepts any sample.
        #[serde(default, deserialize_with = "nullable", skip_serializing_if = "Option::is_none")]
        lambda2_bound: Option<Option<f64>>,
    },
    #[serde(rename = "almost_3colorable")]
    Almost3Colorable { n: usize, eps: f64, d: usize },
    RandomRegular { n: usize, d: usize },
    NoisyHypercube {
        dim: usize,
        gamma: f64,
        #[serde(default)]
        overlay_degree: Option<usize>,
    },
    Cycle { n: usize },
    /// An edge list or a planted-instance JSON record.
    File { path: PathBuf },
}

/// Distinguishes an explicit `null` from an absent key.
fn nullable<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<Option<f64>>, D::Error> {
    Option::<f64>::deserialize(d).map(Some)
}

/// Lemma checks run by the `verify` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VerifyTask {
    /// Clustering of near-maximum independent sets on the configured graph.
    ClusteringIs {
        eps: f64,
        #[serde(default = "default_c")]
        c: f64,
    },
    ClusteringColoring { eps: f64 },
    SixVariable { samples: u64 },
    TripleColoring { samples: u64 },
    StepPolynomial { delta: f64, nu: f64 },
    SqrtProxy { n: usize },
    SsveCertificate { n: usize, c: f64 },
}

fn default_c() -> f64 {
    40.0
}

impl VerifyTask {
    /// Parses a lemma name as given on the command line, with default
    /// parameters.
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name.replace('-', "_").as_str() {
            "clustering_is" => VerifyTask::ClusteringIs { eps: 0.0, c: default_c() },
            "clustering_coloring" => VerifyTask::ClusteringColoring { eps: 0.0 },
            "six_variable" => VerifyTask::SixVariable { samples: 1_000_000 },
            "triple_coloring" => VerifyTask::TripleColoring { samples: 1_000_000 },
            "step_polynomial" => VerifyTask::StepPolynomial { delta: 0.1, nu: 0.02 },
            "sqrt_proxy" => VerifyTask::SqrtProxy { n: 4 },
            "ssve_certificate" => VerifyTask::SsveCertificate { n: 64, c: 4.0 * 2f64.sqrt() / 3.0 },
            other => return Err(Error::param(format!("unknown lemma {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RoundingConfig {
    pub expander_is: ExpanderIsParams,
    pub three_colorable: ColoringParams,
    pub ssve: SsveSection,
    pub kms: KmsParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SsveSection {
    pub delta: f64,
    /// Certificate record; built for the 64-dimensional noisy hypercube
    /// with the pinned boundary constant when absent.
    pub certificate: Option<PathBuf>,
    pub params: SsveParams,
}

impl Default for SsveSection {
    fn default() -> Self {
        SsveSection { delta: 1.0 / 32.0, certificate: None, params: SsveParams::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithms: Vec<Algorithm>,
    pub graph: GraphSource,
    /// Relaxation slack `eps`; defaults to the generator's `eps` or 0.
    #[serde(default)]
    pub eps: Option<f64>,
    /// Overrides the `solve` block of every rounding section.
    #[serde(default)]
    pub solver: Option<SolveParams>,
    #[serde(default)]
    pub rounding: RoundingConfig,
    #[serde(default)]
    pub verify: Vec<VerifyTask>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// A configuration error with the JSON-pointer path of the offending value.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub pointer: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "config error at {at}: {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

impl ExperimentConfig {
    /// Parses and validates a configuration. Relative file paths are
    /// resolved against `base`.
    pub fn from_json(text: &str, base: Option<&Path>) -> std::result::Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut cfg: ExperimentConfig = serde_path_to_error::deserialize(de)
            .map_err(|e| ConfigError { pointer: pointer(e.path()), message: e.inner().to_string() })?;
        if let (Some(base), GraphSource::File { path }) = (base, &mut cfg.graph) {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        if let (Some(base), Some(path)) = (base, cfg.rounding.ssve.certificate.as_mut()) {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> std::result::Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError { pointer: String::new(), message: format!("{}: {e}", path.display()) })?;
        Self::from_json(&text, path.parent())
    }

    fn validate(&self) -> std::result::Result<(), ConfigError> {
        let err = |p: &str, m: String| Err(ConfigError { pointer: p.to_string(), message: m });
        if self.seeds.is_empty() {
            return err("/seeds", "at least one seed is required".into());
        }
        if let GraphSource::File { path } = &self.graph {
            if !path.exists() {
                return err("/graph/file/path", format!("{} does not exist", path.display()));
            }
        }
        if let Some(path) = &self.rounding.ssve.certificate {
            if !path.exists() {
                return err("/rounding/ssve/certificate", format!("{} does not exist", path.display()));
            }
        }
        if let Some(eps) = self.eps {
            if !(0.0..0.5).contains(&eps) {
                return err("/eps", format!("eps = {eps} outside [0, 1/2)"));
            }
        }
        Ok(())
    }

    /// `eps` used by the relaxations.
    pub fn relaxation_eps(&self) -> f64 {
        self.eps.unwrap_or(match &self.graph {
            GraphSource::Planted { eps, .. } | GraphSource::Almost3Colorable { eps, .. } => *eps,
            _ => 0.0,
        })
    }

    fn rounding_with_solver(&self) -> RoundingConfig {
        let mut r = self.rounding.clone();
        if let Some(s) = &self.solver {
            r.expander_is.solve = s.clone();
            r.three_colorable.solve = s.clone();
            r.ssve.params.solve = s.clone();
            r.kms.solve = s.clone();
        }
        r
    }

    /// The solver parameters of the first configured algorithm.
    pub fn solve_params(&self) -> SolveParams {
        let r = self.rounding_with_solver();
        match self.algorithms.first() {
            Some(Algorithm::ThreeColorable) => r.three_colorable.solve,
            Some(Algorithm::Kms) => r.kms.solve,
            Some(Algorithm::Ssve) => r.ssve.params.solve,
            _ => r.expander_is.solve,
        }
    }
}

/// A generated instance together with the statistics reported in rows.
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: Graph,
    pub lambda2: f64,
    pub planted: Option<Vec<usize>>,
    pub coloring: Option<Vec<u8>>,
}

impl Instance {
    /// JSON record of the instance (planted set empty when there is none).
    pub fn record(&self, eps: f64) -> PlantedInstance {
        PlantedInstance::from_graph(&self.graph, self.planted.clone().unwrap_or_default(), eps, self.lambda2)
    }
}

/// Builds the graph of one cell.
pub fn build_instance(src: &GraphSource, seed: u64) -> Result<Instance> {
    let with_lambda = |graph: Graph| -> Result<Instance> {
        let lambda2 = spectral_stats(&graph)?.lambda2;
        Ok(Instance { graph, lambda2, planted: None, coloring: None })
    };
    match src {
        GraphSource::Planted { n, eps, d, lambda2_bound } => {
            let mut p = PlantedParams::new(*n, *eps, *d, seed);
            if let Some(bound) = lambda2_bound {
                p.lambda2_bound = *bound;
            }
            let inst = gen_planted_is_expander_with(&p)?;
            Ok(Instance { graph: inst.graph()?, lambda2: inst.lambda2, planted: Some(inst.planted_set), coloring: None })
        }
        GraphSource::Almost3Colorable { n, eps, d } => {
            let ci = gen_almost_3colorable_expander(*n, *eps, *d, seed)?;
            Ok(Instance { graph: ci.graph, lambda2: ci.lambda2, planted: None, coloring: Some(ci.coloring) })
        }
        GraphSource::RandomRegular { n, d } => with_lambda(gen_random_regular(*n, *d, seed)?),
        GraphSource::NoisyHypercube { dim, gamma, overlay_degree } => {
            let g = gen_noisy_hypercube(*dim, *gamma)?;
            match overlay_degree {
                Some(d_h) => with_lambda(overlay_bipartite_expander(&g, *d_h, seed)?.0),
                None => with_lambda(g),
            }
        }
        GraphSource::Cycle { n } => with_lambda(Graph::cycle(*n)),
        GraphSource::File { path } => {
            let text = std::fs::read_to_string(path)?;
            if text.trim_start().starts_with('{') {
                let rec: PlantedInstance = serde_json::from_str(&text)?;
                let planted = (!rec.planted_set.is_empty()).then(|| rec.planted_set.clone());
                Ok(Instance { graph: rec.graph()?, lambda2: rec.lambda2, planted, coloring: None })
            } else {
                with_lambda(parse_edge_list(&text)?)
            }
        }
    }
}

fn default_certificate() -> Result<CertifiedSsve> {
    let c = 4.0 * 2f64.sqrt() / 3.0;
    noisy_hypercube_certificate(64, c)?
        .certificate
        .ok_or_else(|| Error::Verification("default certificate does not hold".into()))
}

fn load_certificate(section: &SsveSection) -> Result<CertifiedSsve> {
    match &section.certificate {
        Some(path) => CertifiedSsve::from_json(&std::fs::read_to_string(path)?),
        None => default_certificate(),
    }
}

/// Runs one algorithm on one instance.
pub fn run_algorithm(cfg: &ExperimentConfig, alg: Algorithm, inst: &Instance, seed: u64) -> Result<RoundingReport> {
    let eps = cfg.relaxation_eps();
    let r = cfg.rounding_with_solver();
    let g = &inst.graph;
    match alg {
        Algorithm::ExpanderIs => round_expander_is(g, eps, &ExpanderIsParams { seed, ..r.expander_is }),
        Algorithm::ThreeColorable => round_3colorable(g, eps, &ColoringParams { seed, ..r.three_colorable }),
        Algorithm::Ssve => {
            let cert = load_certificate(&r.ssve)?;
            round_ssve(g, r.ssve.delta, eps, Some(&cert), &SsveParams { seed, ..r.ssve.params })
        }
        Algorithm::Kms => kms_round(g, eps, seed, &r.kms),
        Algorithm::Matching => {
            let set = two_approx_vc_is(g);
            let rep = RoundingReport {
                algorithm: "matching".into(),
                n: g.n(),
                raw_set: set.clone(),
                raw_size: set.len(),
                repaired_size: set.len(),
                repaired_set: set,
                violated_edges_before_repair: 0,
                transcript: Default::default(),
                potentials: Default::default(),
                sdp_objective: None,
                tau: 0.0,
                flags: Vec::new(),
            };
            Ok(rep)
        }
    }
}

/// Solves the relaxation the first algorithm would round.
pub fn solve_instance(cfg: &ExperimentConfig, inst: &Instance) -> Result<PseudoDistribution> {
    let eps = cfg.relaxation_eps();
    let params = cfg.solve_params();
    let cs = match cfg.algorithms.first() {
        Some(Algorithm::ThreeColorable) => {
            let r = &cfg.rounding.three_colorable;
            build_coloring_relaxation(&inst.graph, eps, r.gamma, r.degree)?
        }
        Some(Algorithm::ExpanderIs) => build_is_relaxation(&inst.graph, eps, cfg.rounding.expander_is.degree)?,
        _ => build_is_relaxation(&inst.graph, eps, 2)?,
    };
    solve(&cs, &params)
}

/// One CSV result row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub algorithm: String,
    pub seed: u64,
    pub n: usize,
    pub d: Option<usize>,
    pub eps: f64,
    pub lambda2: Option<f64>,
    pub sdp_objective: Option<f64>,
    pub avg_mi_after: Option<f64>,
    pub raw_size: usize,
    pub repaired_size: usize,
    pub runtime_ms: f64,
    pub flags: Vec<String>,
    /// The repaired set, kept for re-verification; not written to CSV.
    #[serde(skip)]
    pub repaired_set: Vec<usize>,
}

impl Row {
    pub fn failed(&self) -> bool {
        self.flags.iter().any(|f| f.starts_with("error"))
    }

    /// Non-convergence or detected infeasibility of a solve.
    pub fn unconverged(&self) -> bool {
        self.flags.iter().any(|f| f == "not converged" || f == "infeasible" || f.ends_with("did not converge"))
    }
}

/// One `(seed, algorithm)` pair of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub seed: u64,
    pub algorithm: Algorithm,
}

/// Cells in output order: seeds outer, algorithms inner.
pub fn cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    cfg.seeds.iter().flat_map(|&seed| cfg.algorithms.iter().map(move |&algorithm| Cell { seed, algorithm })).collect()
}

/// Runs one cell; a failure becomes a row with an `error` flag and no
/// report.
pub fn run_cell(cfg: &ExperimentConfig, cell: Cell) -> (Row, Option<RoundingReport>) {
    let start = Instant::now();
    let mut row = Row {
        algorithm: cell.algorithm.name().to_string(),
        seed: cell.seed,
        n: 0,
        d: None,
        eps: cfg.relaxation_eps(),
        lambda2: None,
        sdp_objective: None,
        avg_mi_after: None,
        raw_size: 0,
        repaired_size: 0,
        runtime_ms: 0.0,
        flags: Vec::new(),
        repaired_set: Vec::new(),
    };
    let result = build_instance(&cfg.graph, cell.seed).and_then(|inst| {
        row.n = inst.graph.n();
        row.d = inst.graph.regular_degree();
        row.lambda2 = Some(inst.lambda2);
        run_algorithm(cfg, cell.algorithm, &inst, cell.seed)
    });
    let report = match result {
        Ok(rep) => {
            row.sdp_objective = rep.sdp_objective;
            row.avg_mi_after = rep.transcript.avg_mi;
            row.raw_size = rep.raw_size;
            row.repaired_size = rep.repaired_size;
            row.flags = rep.flags.clone();
            row.repaired_set = rep.repaired_set.clone();
            Some(rep)
        }
        Err(e) => {
            row.flags.push(format!("error: {e}"));
            None
        }
    };
    row.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    (row, report)
}

/// Runs every cell of the sweep.
pub fn run_sweep(cfg: &ExperimentConfig, exec: Exec) -> Vec<(Row, Option<RoundingReport>)> {
    map_slice(exec, &cells(cfg), |&c| run_cell(cfg, c))
}

/// Rows of every cell of the sweep.
pub fn run_cells(cfg: &ExperimentConfig, exec: Exec) -> Vec<Row> {
    run_sweep(cfg, exec).into_iter().map(|(r, _)| r).collect()
}

/// `x` with 12 significant digits, in the shortest of fixed or scientific
/// notation, trailing zeros removed.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let m = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{m}e{exp}")
    }
}

/// `x` as `p/q` when it is a fraction with a small denominator, otherwise
/// as [`fmt_sig`].
pub fn fmt_ratio(x: f64) -> String {
    for q in 1..=64u32 {
        let p = (x * q as f64).round();
        if (x * q as f64 - p).abs() < 1e-9 {
            return if q == 1 { format!("{p}") } else { format!("{p}/{q}") };
        }
    }
    fmt_sig(x)
}

pub const CSV_COLUMNS: [&str; 11] = [
    "algorithm",
    "n",
    "d",
    "eps",
    "lambda2",
    "sdp_objective",
    "avg_mi_after",
    "raw_size",
    "repaired_size",
    "runtime_ms",
    "flags",
];

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

/// Writes rows with the fixed column set; flags are joined with `;`.
pub fn write_csv<W: std::io::Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in rows {
        w.write_record([
            r.algorithm.clone(),
            r.n.to_string(),
            r.d.map(|d| d.to_string()).unwrap_or_default(),
            fmt_sig(r.eps),
            opt(r.lambda2),
            opt(r.sdp_objective),
            opt(r.avg_mi_after),
            r.raw_size.to_string(),
            r.repaired_size.to_string(),
            fmt_sig(r.runtime_ms),
            r.flags.join(";"),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Outcome of one lemma check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub lemma: String,
    pub counterexample: bool,
    pub summary: String,
    pub report: serde_json::Value,
}

/// Runs one lemma check; graph-based lemmas use the configured graph at
/// `seed`.
pub fn run_verify(cfg: &ExperimentConfig, task: &VerifyTask, seed: u64, exec: Exec) -> Result<VerifyOutcome> {
    let to_value = |v: &dyn erased::Ser| v.value();
    let (lemma, counterexample, summary, report) = match task {
        VerifyTask::ClusteringIs { eps, c } => {
            let g = build_instance(&cfg.graph, seed)?.graph;
            let r = verify_clustering_is(&g, *eps, *c)?;
            let worst = r.worst_intersection.map(fmt_ratio).unwrap_or_else(|| "none".into());
            let s = format!("worst pairwise intersection {worst}, {} violations over {} triples", r.violations, r.triples);
            ("clustering_is", r.counterexample(), s, to_value(&r)?)
        }
        VerifyTask::ClusteringColoring { eps } => {
            let g = build_instance(&cfg.graph, seed)?.graph;
            let r = verify_clustering_coloring(&g, *eps)?;
            let worst = r.worst_agreement.map(fmt_ratio).unwrap_or_else(|| "none".into());
            let s = format!("worst pairwise agreement {worst}, {} violations over {} triples", r.violations, r.triples);
            ("clustering_coloring", r.counterexample(), s, to_value(&r)?)
        }
        VerifyTask::SixVariable { samples } => {
            let r = sample_six_variable(*samples, seed, exec);
            let s = format!("{} counterexamples in {} feasible points", r.counterexamples, r.feasible);
            ("six_variable", r.counterexamples > 0, s, to_value(&r)?)
        }
        VerifyTask::TripleColoring { samples } => {
            let r = sample_triple_coloring(*samples, seed, exec);
            let s = format!("{} counterexamples in {} feasible points", r.counterexamples, r.feasible);
            ("triple_coloring", r.counterexamples > 0, s, to_value(&r)?)
        }
        VerifyTask::StepPolynomial { delta, nu } => {
            let q = step_poly(*delta, *nu)?;
            let r = verify_step(&q, *delta, *nu);
            let s = format!("degree {}, properties hold: {}", r.degree, r.ok);
            ("step_polynomial", !r.ok, s, to_value(&r)?)
        }
        VerifyTask::SqrtProxy { n } => {
            let b = sqrt_proxy(*n, 64 * n)?;
            let r = verify_proxy_properties(&b, *n)?;
            let s = format!("all properties hold: {}", r.all_hold());
            ("sqrt_proxy", !r.all_hold(), s, to_value(&r)?)
        }
        VerifyTask::SsveCertificate { n, c } => {
            let r = noisy_hypercube_certificate(*n, *c)?;
            let s = format!("ell = {}, ratio range [{}, {}], holds: {}", r.ell, fmt_sig(r.min_ratio), fmt_sig(r.max_ratio), r.holds);
            ("ssve_certificate", !r.holds, s, to_value(&r)?)
        }
    };
    Ok(VerifyOutcome { lemma: lemma.into(), counterexample, summary, report })
}

mod erased {
    use crate::Result;

    pub trait Ser {
        fn value(&self) -> Result<serde_json::Value>;
    }

    impl<T: serde::Serialize> Ser for T {
        fn value(&self) -> Result<serde_json::Value> {
            Ok(serde_json::to_value(self)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.1), "0.1");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(123456.0), "123456");
        assert_eq!(fmt_sig(-2.5e-9), "-2.5e-9");
        assert_eq!(fmt_sig(6.02214076e23), "6.02214076e23");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_ratio(0.5), "1/2");
        assert_eq!(fmt_ratio(0.375), "3/8");
        assert_eq!(fmt_ratio(2.0f64.sqrt()), "1.41421356237");
    }

    #[test]
    fn config_errors_carry_pointers() {
        let bad = r#"{"algorithms": ["kms"], "graph": {"cycle": {"n": 8}}, "seeds": [1],
                      "rounding": {"kms": {"samples": 5, "bogus": 1}}}"#;
        let e = ExperimentConfig::from_json(bad, None).unwrap_err();
        assert_eq!(e.pointer, "/rounding/kms/bogus");
        assert!(e.message.contains("bogus"), "{}", e.message);
        let bad = r#"{"algorithms": ["kms"], "graph": {"cycle": {"n": 8}}, "seeds": []}"#;
        assert_eq!(ExperimentConfig::from_json(bad, None).unwrap_err().pointer, "/seeds");
        let bad = r#"{"algorithms": ["kms"], "graph": {"cycle": {"n": "x"}}, "seeds": [0]}"#;
        assert_eq!(ExperimentConfig::from_json(bad, None).unwrap_err().pointer, "/graph/cycle/n");
    }
}
