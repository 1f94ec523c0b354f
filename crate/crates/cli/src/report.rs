//! Experiment reports: per-run records, aggregates, and cross-method
//! comparison with the Kruskal-Wallis test.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use had_core::eval;
use had_core::{ClusteringResult, HpgmkParams, MetricsReport};

use crate::config::RunConfig;
use crate::error::{Error, Result};

/// One seeded clustering run with its evaluation, when labels were present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub params: HpgmkParams,
    pub result: ClusteringResult,
    pub metrics: Option<MetricsReport>,
}

/// Aggregate statistics over the repeated runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub accuracy_min: Option<f64>,
    pub accuracy_mean: Option<f64>,
    pub accuracy_max: Option<f64>,
    pub macro_fscore_mean: Option<f64>,
    pub sse_min: f64,
    pub sse_mean: f64,
    pub sse_max: f64,
}

/// The full experiment report written as `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub fixture_id: String,
    pub algorithm: String,
    pub window_count: usize,
    pub mean_label_purity: Option<f64>,
    pub config: RunConfig,
    pub runs: Vec<RunRecord>,
    pub aggregate: Aggregate,
}

impl ExperimentReport {
    pub fn accuracies(&self) -> Vec<f64> {
        self.runs
            .iter()
            .filter_map(|r| r.metrics.as_ref().map(|m| m.accuracy))
            .collect()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn aggregate(runs: &[RunRecord]) -> Aggregate {
    let accs: Vec<f64> = runs
        .iter()
        .filter_map(|r| r.metrics.as_ref().map(|m| m.accuracy))
        .collect();
    let fscores: Vec<f64> = runs
        .iter()
        .filter_map(|r| r.metrics.as_ref().map(|m| m.macro_fscore))
        .collect();
    let sses: Vec<f64> = runs.iter().map(|r| r.result.sse).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Aggregate {
        accuracy_min: (!accs.is_empty()).then(|| min(&accs)),
        accuracy_mean: (!accs.is_empty()).then(|| mean(&accs)),
        accuracy_max: (!accs.is_empty()).then(|| max(&accs)),
        macro_fscore_mean: (!fscores.is_empty()).then(|| mean(&fscores)),
        sse_min: min(&sses),
        sse_mean: mean(&sses),
        sse_max: max(&sses),
    }
}

/// One method's row in a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub algorithm: String,
    pub runs: usize,
    pub accuracy_min: f64,
    pub accuracy_mean: f64,
    pub accuracy_max: f64,
    pub sse_mean: f64,
}

/// Pairwise comparison of experiment reports on one fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub fixture_id: String,
    pub methods: Vec<MethodSummary>,
    /// (method a, method b, Kruskal-Wallis p on per-run accuracies).
    pub pairwise_p: Vec<(String, String, f64)>,
}

impl Comparison {
    /// Plain-text table for the terminal.
    pub fn to_table(&self) -> String {
        let mut out = format!("fixture: {}\n", self.fixture_id);
        out.push_str(&format!(
            "{:<10} {:>5} {:>9} {:>9} {:>9} {:>12}\n",
            "method", "runs", "acc_min", "acc_mean", "acc_max", "sse_mean"
        ));
        for m in &self.methods {
            out.push_str(&format!(
                "{:<10} {:>5} {:>9.4} {:>9.4} {:>9.4} {:>12.4}\n",
                m.algorithm, m.runs, m.accuracy_min, m.accuracy_mean, m.accuracy_max, m.sse_mean
            ));
        }
        out.push_str("\nKruskal-Wallis p-values (per-run accuracies):\n");
        for (a, b, p) in &self.pairwise_p {
            out.push_str(&format!("  {a} vs {b}: p = {p:.6}\n"));
        }
        out
    }
}

/// Compare two or more reports that share a fixture: summary rows plus a
/// Kruskal-Wallis p-value per report pair.
pub fn compare(reports: &[ExperimentReport]) -> Result<Comparison> {
    if reports.len() < 2 {
        return Err(Error::TooFewReports(reports.len()));
    }
    let fixture_id = reports[0].fixture_id.clone();
    for r in &reports[1..] {
        if r.fixture_id != fixture_id {
            return Err(Error::FixtureMismatch { a: fixture_id, b: r.fixture_id.clone() });
        }
    }
    let mut methods = Vec::new();
    let mut accuracy_lists = Vec::new();
    for r in reports {
        let accs = r.accuracies();
        if accs.is_empty() {
            return Err(Error::NoAccuracies(r.algorithm.clone()));
        }
        methods.push(MethodSummary {
            algorithm: r.algorithm.clone(),
            runs: accs.len(),
            accuracy_min: r.aggregate.accuracy_min.unwrap_or(f64::NAN),
            accuracy_mean: r.aggregate.accuracy_mean.unwrap_or(f64::NAN),
            accuracy_max: r.aggregate.accuracy_max.unwrap_or(f64::NAN),
            sse_mean: r.aggregate.sse_mean,
        });
        accuracy_lists.push(accs);
    }
    let mut pairwise_p = Vec::new();
    for i in 0..reports.len() {
        for j in i + 1..reports.len() {
            let (_, p) =
                eval::kruskal_wallis(&[accuracy_lists[i].clone(), accuracy_lists[j].clone()])?;
            pairwise_p.push((reports[i].algorithm.clone(), reports[j].algorithm.clone(), p));
        }
    }
    Ok(Comparison { fixture_id, methods, pairwise_p })
}

/// Per-run metrics as a map keyed for JSON round-tripping in tests.
pub fn metrics_map(report: &ExperimentReport) -> BTreeMap<u64, Option<f64>> {
    report
        .runs
        .iter()
        .map(|r| (r.seed, r.metrics.as_ref().map(|m| m.accuracy)))
        .collect()
}
