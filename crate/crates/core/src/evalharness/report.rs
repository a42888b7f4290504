use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::rubric::{round1, Group, Metric, ReportCell};

/// Machine-readable report row: one (group, metric) across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub group: Group,
    pub metric: Metric,
    pub mean: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std: Option<f64>,
    /// Number of runs averaged.
    pub n: usize,
    /// Rated scenarios per run.
    pub scenario_counts: Vec<usize>,
    #[serde(default)]
    pub incomplete: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub records: Vec<ReportRecord>,
    /// Groups with attempts but no ratings yet.
    #[serde(default)]
    pub unrated: Vec<Group>,
}

/// Sample mean and, for two or more values, the `n - 1` standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.len() >= 2).then(|| (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    (mean, std)
}

/// Combines per-run cells (`runs[i]` holds every cell of run `i`) into one row
/// per (reference task, method, metric), both rounded to one decimal.
pub fn build_report(runs: &[Vec<ReportCell>]) -> Report {
    let mut grouped: BTreeMap<(Group, Metric), Vec<&ReportCell>> = BTreeMap::new();
    for cell in runs.iter().flatten() {
        grouped
            .entry((Group::new(&cell.reference_task_id, &cell.method_label), cell.metric))
            .or_default()
            .push(cell);
    }
    let records = grouped
        .into_iter()
        .map(|((group, metric), cells)| {
            let values: Vec<f64> = cells.iter().map(|c| c.success_rate).collect();
            let (mean, std) = mean_std(&values);
            ReportRecord {
                group,
                metric,
                mean: round1(mean),
                std: std.map(round1),
                n: cells.len(),
                scenario_counts: cells.iter().map(|c| c.scenario_count).collect(),
                incomplete: cells.iter().any(|c| c.incomplete),
            }
        })
        .collect();
    Report { records, unrated: Vec::new() }
}

impl Report {
    /// Fixed-width table: reference task, then metric, then method.
    pub fn render_table(&self) -> String {
        let mut rows: Vec<&ReportRecord> = self.records.iter().collect();
        rows.sort_by(|a, b| {
            (&a.group.reference_task_id, a.metric, &a.group.method_label).cmp(&(&b.group.reference_task_id, b.metric, &b.group.method_label))
        });
        let method_w = rows.iter().map(|r| r.group.method_label.len()).max().unwrap_or(0).max(6);
        let ref_w = rows.iter().map(|r| r.group.reference_task_id.len()).max().unwrap_or(0).max(9);
        let mut out = String::new();
        writeln!(out, "{:<ref_w$}  {:<9}  {:<method_w$}  {:>12}  {:>4}", "reference", "metric", "method", "success", "runs").unwrap();
        for r in rows {
            let value = match r.std {
                Some(std) => format!("{:.1} ± {:.1}", r.mean, std),
                None => format!("{:.1}", r.mean),
            };
            let flag = if r.incomplete { "  (incomplete)" } else { "" };
            writeln!(
                out,
                "{:<ref_w$}  {:<9}  {:<method_w$}  {:>12}  {:>4}{flag}",
                r.group.reference_task_id,
                r.metric.label(),
                r.group.method_label,
                value,
                r.n
            )
            .unwrap();
        }
        for g in &self.unrated {
            writeln!(out, "{:<ref_w$}  {:<9}  {:<method_w$}  {:>12}", g.reference_task_id, "-", g.method_label, "unrated").unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(rate: f64) -> ReportCell {
        ReportCell {
            method_label: "m".into(),
            reference_task_id: "hoc4".into(),
            metric: Metric::QStu,
            success_rate: rate,
            std_dev: None,
            scenario_count: 18,
            successes: 0,
            incomplete: false,
        }
    }

    #[test]
    fn three_equal_runs() {
        let r = build_report(&[vec![cell(100.0)], vec![cell(100.0)], vec![cell(100.0)]]);
        assert_eq!((r.records[0].mean, r.records[0].std), (100.0, Some(0.0)));
    }

    #[test]
    fn spread_runs() {
        let r = build_report(&[vec![cell(50.0)], vec![cell(61.1)], vec![cell(72.2)]]);
        assert_eq!((r.records[0].mean, r.records[0].std), (61.1, Some(11.1)));
        assert!(r.render_table().contains("61.1 ± 11.1"));
    }

    #[test]
    fn single_run_has_no_std() {
        let r = build_report(&[vec![cell(88.9)]]);
        assert_eq!(r.records[0].std, None);
        let json = serde_json::to_value(&r.records[0]).unwrap();
        assert!(json.get("std").is_none());
        assert_eq!(json["n"], 1);
        assert!(r.render_table().contains("88.9"));
    }
}
