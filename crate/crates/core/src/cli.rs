//! Command implementations behind the `onebit` binary.
//!
//! Each command returns a [`RunReport`]; the binary only parses arguments,
//! writes files and maps errors to exit codes. Results payloads contain no
//! timing or environment data, so identical parameters and seed reproduce
//! them byte for byte.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::highdim::{self, HermitianOperator, Strategy, Witness};
use crate::measures::{self, normalized_measure, Distribution};
use crate::qubit::{self, ComplementaryFrame, MeanValueVector};
use crate::seed::SeedStream;
use crate::transforms::{self, MapFamily, ScanPlan};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest dimension accepted by the `positivity` command.
pub const MAX_CLI_DIMENSION: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: u64,
    pub results: Value,
    pub version: String,
}

impl RunReport {
    fn new(command: &str, parameters: BTreeMap<String, Value>, seed: u64, results: Value) -> Self {
        Self { command: command.to_string(), parameters, seed, results, version: VERSION.to_string() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The results payload alone, as compact JSON.
    pub fn results_json(&self) -> String {
        serde_json::to_string(&self.results).expect("results serialize")
    }
}

macro_rules! params {
    ($($k:literal => $v:expr),* $(,)?) => {{
        let mut m = BTreeMap::new();
        $(m.insert($k.to_string(), json!($v));)*
        m
    }};
}

/// 17 significant digits, locale independent.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn cmd_entropy(dist: &[f64], alpha: f64) -> Result<RunReport> {
    let d = Distribution::new(dist.to_vec())?;
    let m = normalized_measure(alpha)?;
    let h = measures::entropy(&d, &m);
    Ok(RunReport::new(
        "entropy",
        params! { "dist" => dist, "alpha" => alpha },
        0,
        json!({ "entropy": h, "k": m.k(), "alpha": alpha }),
    ))
}

/// `steps` evenly spaced values from `min` to `max` inclusive.
pub fn alpha_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(min > 0.0) || !(max >= min) {
        return Err(Error::InvalidArgument(format!("empty alpha grid: min={min}, max={max}, steps={steps}")));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    Ok((0..steps)
        .map(|i| if i == steps - 1 { max } else { min + (max - min) * i as f64 / (steps - 1) as f64 })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanArgs {
    pub alphas: Vec<f64>,
    pub n_states: usize,
    pub n_maps: usize,
    pub seed: u64,
    pub family: MapFamily,
}

/// Returns the report and the CSV table
/// `alpha,max_deviation,argmax_state_id,argmax_map_id`.
pub fn cmd_invariance_scan(args: &ScanArgs) -> Result<(RunReport, String)> {
    if args.alphas.is_empty() {
        return Err(Error::InvalidArgument("alpha grid is empty".into()));
    }
    let plan = ScanPlan { family: args.family, ..ScanPlan::new(args.n_states, args.n_maps) };
    let reports = transforms::invariance_scan_with(&args.alphas, &plan, &SeedStream::new(args.seed))?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::InvalidArgument(e.to_string());
    w.write_record(["alpha", "max_deviation", "argmax_state_id", "argmax_map_id"]).map_err(csv_err)?;
    for r in &reports {
        w.write_record([format_f64(r.alpha), format_f64(r.max_deviation), r.worst_state.to_string(), r.worst_map.to_string()])
            .map_err(csv_err)?;
    }
    let csv = String::from_utf8(w.into_inner().expect("in-memory writer")).expect("ascii");

    let rows: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "alpha": r.alpha,
                "max_deviation": r.max_deviation,
                "argmax_state_id": r.worst_state,
                "argmax_map_id": r.worst_map,
                "n_states": r.n_states,
                "n_maps": r.n_maps,
            })
        })
        .collect();
    let report = RunReport::new(
        "invariance-scan",
        params! {
            "alphas" => &args.alphas,
            "n_states" => args.n_states,
            "n_maps" => args.n_maps,
            "family" => args.family,
        },
        args.seed,
        json!({ "family": args.family, "rows": rows }),
    );
    Ok((report, csv))
}

/// On-disk Hermitian matrix: `{"n": N, "re": [[..]], "im": [[..]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_operator(rho: &HermitianOperator) -> Self {
        let (re, im) = rho.parts();
        Self { n: rho.dim(), re, im }
    }
}

pub fn parse_matrix(text: &str) -> Result<HermitianOperator> {
    let file: MatrixFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("malformed matrix file: {e}")))?;
    if file.n == 0 || file.n > MAX_CLI_DIMENSION {
        return Err(Error::Dimension(format!("n must be in 1..={MAX_CLI_DIMENSION}, got {}", file.n)));
    }
    if file.re.len() != file.n || file.im.len() != file.n {
        return Err(Error::Dimension(format!("expected {0}x{0} re and im arrays", file.n)));
    }
    HermitianOperator::from_parts(&file.re, &file.im)
}

fn witness_json(w: &Option<Witness>) -> Value {
    w.as_ref().map_or(Value::Null, |w| serde_json::to_value(w).expect("witness serializes"))
}

/// Runs the information criterion and the eigenvalue oracle side by side.
/// The boolean is the criterion's verdict.
pub fn cmd_positivity(rho: &HermitianOperator, strategy: Strategy, n_bases: usize, seed: u64, tol: f64) -> Result<(RunReport, bool)> {
    let seeds = SeedStream::new(seed);
    let verdict = highdim::info_positivity_check(rho, strategy, n_bases, &seeds, tol)?;
    let oracle = highdim::eigen_positivity_oracle(rho, tol)?;
    let (min_eigenvalue, _) = highdim::min_eigenpair(rho)?;
    let results = json!({
        "dimension": rho.dim(),
        "positive": verdict.positive,
        "strategy": verdict.strategy,
        "witness": witness_json(&verdict.witness),
        "pairs_checked": verdict.pairs_checked,
        "pairs_untestable": verdict.pairs_untestable,
        "oracle": {
            "positive": oracle.positive,
            "min_eigenvalue": min_eigenvalue,
            "witness": witness_json(&oracle.witness),
        },
        "agrees_with_oracle": verdict.positive == oracle.positive,
    });
    let report = RunReport::new(
        "positivity",
        params! { "strategy" => strategy, "n_bases" => n_bases, "tol" => tol, "matrix" => MatrixFile::from_operator(rho) },
        seed,
        results,
    );
    Ok((report, verdict.positive))
}

pub fn cmd_counting(n_max: u64, ms: &[u64], r_max: u32) -> Result<RunReport> {
    if n_max < 3 || r_max < 1 || ms.is_empty() {
        return Err(Error::InvalidArgument("need n_max >= 3, r_max >= 1 and a non-empty m list".into()));
    }
    let rs: Vec<u32> = (1..=r_max).collect();
    let consistent = highdim::counting_consistency(n_max, ms, &rs)?;
    let mut table = Vec::new();
    for n in 2..=n_max {
        for &m in ms {
            let k = highdim::degrees_of_freedom(n, m)?;
            let powers: BTreeMap<String, Value> = rs
                .iter()
                .map(|&r| (r.to_string(), highdim::hierarchy_k(n, r).map_or(Value::Null, |h| json!(h))))
                .collect();
            table.push(json!({ "n": n, "m": m, "k": k, "n_pow_r_minus_1": powers }));
        }
    }
    Ok(RunReport::new(
        "counting",
        params! { "n_max" => n_max, "m_list" => ms, "r_max" => r_max },
        0,
        json!({
            "consistent": consistent.iter().map(|&(m, r)| json!({ "m": m, "r": r })).collect::<Vec<_>>(),
            "table": table,
        }),
    ))
}

pub fn cmd_search_preservers(alpha: f64, budget: usize, seed: u64, tol: f64) -> Result<RunReport> {
    let found = transforms::search_norm_preservers(alpha, budget, &SeedStream::new(seed), tol)?;
    let candidates: Vec<Value> = found
        .iter()
        .map(|c| {
            json!({
                "restart": c.restart,
                "residual": c.residual,
                "mean_residual": c.mean_residual,
                "permutation_distance": c.permutation_distance,
                "permutation_like": c.permutation_distance <= tol,
                // maps that only keep the unit ball inside the probability
                // range are reported, not classified
                "valid_on_all_probability_vectors": transforms::cube_range_violation(&c.map) <= tol,
                "matrix": c.map.rows(),
            })
        })
        .collect();
    let all_like = found.iter().all(|c| c.permutation_distance <= tol);
    Ok(RunReport::new(
        "search-preservers",
        params! { "alpha" => alpha, "budget" => budget, "tol" => tol },
        seed,
        json!({
            "restarts": budget.div_ceil(transforms::EVALS_PER_RESTART),
            "candidates": candidates,
            "all_candidates_permutation_like": all_like,
            "non_permutation_count": found.iter().filter(|c| c.permutation_distance > tol).count(),
        }),
    ))
}

/// `cos²(θ/2)` on `steps` points of `[0, 2π]`, next to the probability
/// obtained by measuring the pure `+z` state along an axis tilted by `θ`.
pub fn cmd_malus(steps: usize) -> Result<(RunReport, String)> {
    if steps < 2 {
        return Err(Error::InvalidArgument("need at least 2 grid points".into()));
    }
    let pure_z = MeanValueVector::new(0.0, 0.0, 1.0);
    let mut csv = String::from("theta,malus,rotated_axis,abs_diff\n");
    let mut max_diff = 0.0f64;
    for i in 0..steps {
        let theta = 2.0 * PI * i as f64 / (steps - 1) as f64;
        let (s, c) = theta.sin_cos();
        let frame = ComplementaryFrame::new(Vector3::new(c, 0.0, -s), Vector3::y(), Vector3::new(s, 0.0, c))?;
        let rotated = qubit::probabilities_from_mean(&pure_z, &frame)?.probability(2);
        let malus = qubit::malus_probability(theta);
        let diff = (malus - rotated).abs();
        max_diff = max_diff.max(diff);
        csv.push_str(&format!("{},{},{},{}\n", format_f64(theta), format_f64(malus), format_f64(rotated), format_f64(diff)));
    }
    let report = RunReport::new("malus", params! { "steps" => steps }, 0, json!({ "max_abs_diff": max_diff, "steps": steps }));
    Ok((report, csv))
}
