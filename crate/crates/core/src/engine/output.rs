//! Result files: the per-iteration CSV, surface snapshots, F1 curves and a
//! plain-text summary.
//!
//! Plots are always rendered from [`CurveTable`]s, the information stored in
//! the CSV, so plotting a CSV later reproduces the plots written by a run.
//! Surface snapshots refit the model on the labeled set recorded at that
//! iteration.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, XglError};
use crate::learner::svm_fit;
use crate::strategies::{StrategyKind, Theta};
use crate::synthdata::{initial_training_set, stratified_kfold, Dataset};

use super::svg::{render_curves, render_surface, CurveSeries, SurfacePlot};
use super::{
    aggregate, explanation_for, initial_set_seed, rasterize_surface, ExperimentConfig, ExperimentResult,
    IterationRecord,
};

pub const CSV_HEADER: &str =
    "strategy,theta,fold,iteration,f1,selected_index,chosen_cluster,switched,discovered_red_clusters";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CsvRow {
    strategy: StrategyKind,
    theta: String,
    fold: usize,
    iteration: usize,
    f1: f64,
    selected_index: Option<usize>,
    chosen_cluster: Option<usize>,
    switched: bool,
    discovered_red_clusters: usize,
}

/// One fold's records for one (strategy, theta) series.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub strategy: StrategyKind,
    /// Only recorded for XGL.
    pub theta: Option<Theta>,
    pub fold: usize,
    pub records: Vec<IterationRecord>,
}

impl CurveTable {
    pub fn series_name(&self) -> String {
        series_name(self.strategy, self.theta)
    }

    pub fn switch_iteration(&self) -> Option<usize> {
        self.records.iter().find(|r| r.switched).map(|r| r.iteration)
    }
}

fn series_name(strategy: StrategyKind, theta: Option<Theta>) -> String {
    match theta {
        Some(t) => format!("{strategy} (theta={t})"),
        None => strategy.to_string(),
    }
}

fn file_stem(strategy: StrategyKind, theta: Option<Theta>) -> String {
    match theta {
        Some(t) => format!("{strategy}_theta-{t}"),
        None => strategy.to_string(),
    }
}

pub fn curve_tables(results: &[ExperimentResult]) -> Vec<CurveTable> {
    results
        .iter()
        .flat_map(|res| {
            res.curves.iter().map(|c| CurveTable {
                strategy: c.strategy,
                theta: c.strategy.uses_theta().then_some(c.theta),
                fold: c.fold_id,
                records: c.records.clone(),
            })
        })
        .collect()
}

pub fn write_results_csv<W: Write>(tables: &[CurveTable], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for t in tables {
        for r in &t.records {
            wtr.serialize(CsvRow {
                strategy: t.strategy,
                theta: t.theta.map(|th| th.to_string()).unwrap_or_default(),
                fold: t.fold,
                iteration: r.iteration,
                f1: r.f1,
                selected_index: r.selected_index,
                chosen_cluster: r.chosen_cluster,
                switched: r.switched,
                discovered_red_clusters: r.discovered_red_clusters,
            })?;
        }
    }
    if tables.iter().all(|t| t.records.is_empty()) {
        wtr.write_record(CSV_HEADER.split(','))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a results CSV back into tables, grouped by (strategy, theta, fold)
/// in order of first appearance.
pub fn read_results_csv<R: Read>(reader: R) -> Result<Vec<CurveTable>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(XglError::Parse(format!("unexpected results header: {header}")));
    }
    let mut tables: Vec<CurveTable> = Vec::new();
    for row in rdr.deserialize() {
        let row: CsvRow = row?;
        let theta = if row.theta.is_empty() {
            None
        } else {
            Some(row.theta.parse::<Theta>()?)
        };
        let record = IterationRecord {
            iteration: row.iteration,
            f1: row.f1,
            selected_index: row.selected_index,
            chosen_cluster: row.chosen_cluster,
            switched: row.switched,
            discovered_red_clusters: row.discovered_red_clusters,
        };
        match tables
            .iter_mut()
            .find(|t| t.strategy == row.strategy && t.theta == theta && t.fold == row.fold)
        {
            Some(t) => t.records.push(record),
            None => tables.push(CurveTable {
                strategy: row.strategy,
                theta,
                fold: row.fold,
                records: vec![record],
            }),
        }
    }
    Ok(tables)
}

/// Series present in `tables`, in order of first appearance.
fn series_keys(tables: &[CurveTable]) -> Vec<(StrategyKind, Option<Theta>)> {
    let mut keys = Vec::new();
    for t in tables {
        if !keys.contains(&(t.strategy, t.theta)) {
            keys.push((t.strategy, t.theta));
        }
    }
    keys
}

fn series_tables(tables: &[CurveTable], key: (StrategyKind, Option<Theta>)) -> Vec<&CurveTable> {
    tables.iter().filter(|t| (t.strategy, t.theta) == key).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesStats {
    pub name: String,
    pub strategy: StrategyKind,
    pub theta: Option<Theta>,
    pub folds: usize,
    pub mean_f1: Vec<f64>,
    pub std_f1: Vec<f64>,
    pub mean_discovered: Vec<f64>,
    pub mean_switch_iteration: Option<f64>,
}

pub fn series_stats(tables: &[CurveTable]) -> Vec<SeriesStats> {
    series_keys(tables)
        .into_iter()
        .map(|key| {
            let group = series_tables(tables, key);
            let f1: Vec<Vec<f64>> = group.iter().map(|t| t.records.iter().map(|r| r.f1).collect()).collect();
            let disc: Vec<Vec<f64>> = group
                .iter()
                .map(|t| t.records.iter().map(|r| r.discovered_red_clusters as f64).collect())
                .collect();
            let (mean_f1, std_f1) = aggregate(f1.iter().map(Vec::as_slice));
            let (mean_discovered, _) = aggregate(disc.iter().map(Vec::as_slice));
            let mean_switch_iteration = (key.0 == StrategyKind::Xgl).then(|| {
                group
                    .iter()
                    .map(|t| t.switch_iteration().unwrap_or(t.records.len() - 1) as f64)
                    .sum::<f64>()
                    / group.len() as f64
            });
            SeriesStats {
                name: series_name(key.0, key.1),
                strategy: key.0,
                theta: key.1,
                folds: group.len(),
                mean_f1,
                std_f1,
                mean_discovered,
                mean_switch_iteration,
            }
        })
        .collect()
}

pub fn summary_report(tables: &[CurveTable]) -> String {
    let mut out = String::from("series summary (means across folds)\n");
    for s in series_stats(tables) {
        let at = |v: &[f64], t: usize| v.get(t.min(v.len().saturating_sub(1))).copied().unwrap_or(f64::NAN);
        let last = s.mean_f1.len().saturating_sub(1);
        let _ = writeln!(out, "\n[{}] folds={} iterations={}", s.name, s.folds, last);
        if s.strategy == StrategyKind::Passive {
            let _ = writeln!(out, "  f1={:.4}  red clusters in training split={:.2}", at(&s.mean_f1, 0), at(&s.mean_discovered, 0));
            continue;
        }
        for t in [0, 10, 50, 100, last] {
            if t <= last {
                let _ = writeln!(
                    out,
                    "  iter {t:>4}: f1={:.4} (sd {:.4})  red clusters discovered={:.2}",
                    at(&s.mean_f1, t),
                    at(&s.std_f1, t),
                    at(&s.mean_discovered, t)
                );
            }
        }
        if let Some(sw) = s.mean_switch_iteration {
            let _ = writeln!(
                out,
                "  switch to random sampling: mean iteration {:.1}, mean f1 there {:.4}",
                sw,
                at(&s.mean_f1, sw.round() as usize)
            );
        }
    }
    out
}

/// Renders the F1 curve plot, one surface snapshot per configured iteration
/// for every non-passive series (on the lowest fold present), and the
/// summary. Returns the written paths.
pub fn render_plots(
    config: &ExperimentConfig,
    dataset: &Dataset,
    tables: &[CurveTable],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let stats = series_stats(tables);
    let curves: Vec<CurveSeries> = stats
        .iter()
        .map(|s| CurveSeries {
            name: s.name.clone(),
            mean: s.mean_f1.clone(),
            marker: s.mean_switch_iteration.map(|t| t.round() as usize),
            constant: s.strategy == StrategyKind::Passive,
        })
        .collect();
    let path = dir.join("f1_curves.svg");
    std::fs::write(&path, render_curves("mean F1 on held-out folds", &curves))?;
    written.push(path);

    let folds = stratified_kfold(dataset, config.folds, config.seed)?;
    for key in series_keys(tables) {
        if key.0 == StrategyKind::Passive {
            continue;
        }
        let Some(table) = series_tables(tables, key).into_iter().min_by_key(|t| t.fold) else {
            continue;
        };
        let split = folds
            .get(table.fold)
            .ok_or_else(|| XglError::InvalidConfig(format!("fold {} not in configuration", table.fold)))?;
        let initial = initial_training_set(split, dataset, initial_set_seed(config.seed, split.fold_id))?;
        for &t in &config.snapshot_iterations {
            if t >= table.records.len() {
                continue;
            }
            let queried: Vec<usize> = table.records[1..=t].iter().filter_map(|r| r.selected_index).collect();
            let labeled: BTreeSet<usize> = initial.iter().chain(&queried).copied().collect();
            let pairs: Vec<_> = labeled.iter().map(|&i| (dataset.point(i), dataset.label(i))).collect();
            let model = svm_fit(&pairs, config.svm_params())?;
            let raster = rasterize_surface(&model, config.raster_resolution, t as u64)?;
            let explanation = if key.0 == StrategyKind::Xgl {
                Some(explanation_for(config, split, dataset, &labeled, &model, t as u64)?)
            } else {
                None
            };
            let labeled_list: Vec<usize> = labeled.iter().copied().collect();
            let svg = render_surface(&SurfacePlot {
                title: format!("{}: iteration {t}, fold {}", series_name(key.0, key.1), table.fold),
                dataset,
                pool: &split.train_indices,
                labeled: &labeled_list,
                queried: &queried,
                raster: &raster,
                explanation: explanation.as_ref(),
            });
            let path = dir.join(format!("{}_iter{t:03}.svg", file_stem(key.0, key.1)));
            std::fs::write(&path, svg)?;
            written.push(path);
        }
    }

    let path = dir.join("summary.txt");
    std::fs::write(&path, summary_report(tables))?;
    written.push(path);
    Ok(written)
}

/// Writes the results CSV to `csv_path` and the plots and summary to
/// `plot_dir`.
pub fn emit_outputs(
    results: &[ExperimentResult],
    dataset: &Dataset,
    csv_path: &Path,
    plot_dir: Option<&Path>,
) -> Result<Vec<PathBuf>> {
    let tables = curve_tables(results);
    if let Some(parent) = csv_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    write_results_csv(&tables, std::fs::File::create(csv_path)?)?;
    let mut written = vec![csv_path.to_path_buf()];
    if let (Some(dir), Some(first)) = (plot_dir, results.first()) {
        written.extend(render_plots(&first.config, dataset, &tables, dir)?);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(strategy: StrategyKind, theta: Option<Theta>, fold: usize, f1s: &[f64]) -> CurveTable {
        CurveTable {
            strategy,
            theta,
            fold,
            records: f1s
                .iter()
                .enumerate()
                .map(|(i, &f1)| IterationRecord {
                    iteration: i,
                    f1,
                    selected_index: (i > 0).then_some(i * 3),
                    chosen_cluster: (i == 1).then_some(4),
                    switched: i == 2,
                    discovered_red_clusters: i,
                })
                .collect(),
        }
    }

    #[test]
    fn csv_round_trip() {
        let tables = vec![
            table(StrategyKind::Xgl, Some(Theta::Value(0.1)), 0, &[0.1, 0.25, 1.0 / 3.0]),
            table(StrategyKind::Xgl, Some(Theta::Value(0.1)), 1, &[0.2, 0.4, 0.7]),
            table(StrategyKind::ActiveUncertainty, None, 0, &[0.1, 0.2, 0.3]),
        ];
        let mut buf = Vec::new();
        write_results_csv(&tables, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        assert_eq!(text.lines().count(), 1 + 9);
        assert!(text.contains("xgl,0.1,0,1,0.25,3,4,false,1"));
        assert!(text.contains("al,,0,0,0.1,,,false,0"));
        let back = read_results_csv(buf.as_slice()).unwrap();
        assert_eq!(back, tables);
        let stats = series_stats(&back);
        assert_eq!(stats.len(), 2);
        assert!((stats[0].mean_f1[1] - 0.325).abs() < 1e-12);
        assert_eq!(stats[0].mean_switch_iteration, Some(2.0));
    }

    #[test]
    fn rejects_foreign_csv() {
        assert!(read_results_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn summary_mentions_every_series() {
        let tables = vec![
            table(StrategyKind::Random, None, 0, &[0.1, 0.2]),
            table(StrategyKind::Passive, None, 0, &[0.9]),
        ];
        let report = summary_report(&tables);
        assert!(report.contains("[random]"));
        assert!(report.contains("[passive]"));
    }
}
