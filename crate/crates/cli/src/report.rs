//! Report rendering: CSV for machines, aligned Markdown for humans.
//!
//! Every renderer is a pure function of its inputs so repeated runs emit
//! byte-identical files.

use std::fmt::Write as _;

use synmix_core::annotations::ClassDistribution;
use synmix_core::metrics::EvaluationResult;
use synmix_core::scaling::{AggregatedPoint, Baseline, SavingsOutcome};
use synmix_core::{PowerLawFit, SavingsRow, StrategyComparison};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Markdown,
}

/// Ratio as a percent label: 0.05 -> "5%", 1.0 -> "100%".
fn percent(ratio: f64) -> String {
    let p = libm::round(ratio * 100.0 * 1e6) / 1e6;
    format!("{p}%")
}

/// Render an aligned, right-justified Markdown table.
fn markdown_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    out.push('|');
    for (h, w) in headers.iter().zip(&widths) {
        let _ = write!(out, " {h:>w$} |", w = w);
    }
    out.push('\n');
    out.push('|');
    for w in &widths {
        let _ = write!(out, "{}:|", "-".repeat(w + 1));
    }
    out.push('\n');
    for row in rows {
        out.push('|');
        for (cell, w) in row.iter().zip(&widths) {
            let _ = write!(out, " {cell:>w$} |", w = w);
        }
        out.push('\n');
    }
    out
}

// --- savings ---------------------------------------------------------------

pub fn savings_csv(rows: &[SavingsRow]) -> String {
    let mut out = String::from("ratio,total_images,real_images,status\n");
    for row in rows {
        match &row.outcome {
            SavingsOutcome::Reached {
                total_images,
                real_images,
                extrapolated,
                ..
            } => {
                let status = if *extrapolated { "extrapolated" } else { "ok" };
                let _ = writeln!(
                    out,
                    "{:?},{},{},{}",
                    row.ratio, total_images, real_images, status
                );
            }
            SavingsOutcome::NotReached => {
                let _ = writeln!(out, "{:?},,,not_reached", row.ratio);
            }
        }
    }
    out
}

pub fn savings_markdown(rows: &[SavingsRow]) -> String {
    let mut any_extrapolated = false;
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|row| match &row.outcome {
            SavingsOutcome::Reached {
                total_images,
                real_images,
                extrapolated,
                ..
            } => {
                let marker = if *extrapolated {
                    any_extrapolated = true;
                    "*"
                } else {
                    ""
                };
                vec![
                    percent(row.ratio),
                    format!("{total_images}{marker}"),
                    real_images.to_string(),
                ]
            }
            SavingsOutcome::NotReached => vec![
                percent(row.ratio),
                "not reached".to_string(),
                "-".to_string(),
            ],
        })
        .collect();
    let mut out = markdown_table(
        &["Ratio of real data", "Total images", "Real images"],
        &body,
    );
    if any_extrapolated {
        out.push_str("\n\\* extrapolated more than one decade beyond the fitted size range\n");
    }
    out
}

// --- power-law fits --------------------------------------------------------

pub fn fits_csv(fits: &[PowerLawFit]) -> String {
    let mut out = String::from("ratio,metric,beta,gamma,rss,n_points\n");
    for fit in fits {
        let _ = writeln!(
            out,
            "{:?},{},{:?},{:?},{:?},{}",
            fit.ratio, fit.metric, fit.beta, fit.gamma, fit.rss, fit.n_points
        );
    }
    out
}

/// Observed mean/std points plus sampled fitted lines, for external plotting.
pub fn plot_data_csv(aggregates: &[AggregatedPoint], fits: &[PowerLawFit]) -> String {
    let mut out = String::from("series,ratio,metric,n,error,std\n");
    for fit in fits {
        for agg in aggregates {
            if agg.metric != fit.metric || agg.ratio.total_cmp(&fit.ratio).is_ne() {
                continue;
            }
            let _ = writeln!(
                out,
                "observed,{:?},{},{},{:?},{:?}",
                agg.ratio,
                agg.metric,
                agg.n_total,
                1.0 - agg.mean,
                agg.std
            );
        }
        // 50 log-spaced samples of the fitted line across its range.
        let lo = libm::log10(fit.n_min as f64);
        let hi = libm::log10(fit.n_max as f64);
        for k in 0..50 {
            let log_n = lo + (hi - lo) * k as f64 / 49.0;
            let n = libm::exp10(log_n);
            let _ = writeln!(
                out,
                "fitted,{:?},{},{:?},{:?},",
                fit.ratio,
                fit.metric,
                n,
                fit.predicted_error(n)
            );
        }
    }
    out
}

// --- evaluation ------------------------------------------------------------

pub fn evaluation_csv(result: &EvaluationResult) -> String {
    let mut out = String::from("category,ap,n_ground_truth\n");
    let mut total_gt = 0usize;
    for cat in &result.per_category {
        total_gt += cat.n_ground_truth;
        let _ = writeln!(out, "{},{:?},{}", cat.category, cat.ap, cat.n_ground_truth);
    }
    let _ = writeln!(out, "mAP,{:?},{}", result.map, total_gt);
    out
}

pub fn evaluation_markdown(result: &EvaluationResult) -> String {
    let mut rows: Vec<Vec<String>> = result
        .per_category
        .iter()
        .map(|c| {
            vec![
                c.category.clone(),
                format!("{:.4}", c.ap),
                c.n_ground_truth.to_string(),
            ]
        })
        .collect();
    let total_gt: usize = result.per_category.iter().map(|c| c.n_ground_truth).sum();
    rows.push(vec![
        "**mAP**".to_string(),
        format!("**{:.4}**", result.map),
        total_gt.to_string(),
    ]);
    let title = format!(
        "AP at IoU >= {:.2} ({} interpolation)\n\n",
        result.iou_threshold,
        match result.interpolation {
            synmix_core::metrics::Interpolation::AllPoint => "all-point",
            synmix_core::metrics::Interpolation::ElevenPoint => "eleven-point",
        }
    );
    let mut out = title;
    out.push_str(&markdown_table(
        &["Category", "AP", "Ground truth"],
        &rows,
    ));
    if !result.unevaluated.is_empty() {
        out.push('\n');
        let names: Vec<String> = result
            .unevaluated
            .iter()
            .map(|u| format!("{} ({} predictions)", u.category, u.n_predictions))
            .collect();
        let _ = writeln!(
            out,
            "Excluded from mAP (no ground truth): {}",
            names.join(", ")
        );
    }
    out
}

pub fn pr_curves_csv(result: &EvaluationResult) -> String {
    let mut out = String::from("category,recall,precision\n");
    for cat in &result.per_category {
        for point in cat.curve.points() {
            let _ = writeln!(out, "{},{:?},{:?}", cat.category, point.recall, point.precision);
        }
    }
    out
}

// --- class distribution ----------------------------------------------------

pub fn class_stats_csv(dist: &ClassDistribution) -> String {
    let mut out = String::from("category,total,average\n");
    for cat in &dist.per_category {
        let _ = writeln!(out, "{},{},{:?}", cat.category, cat.total, cat.average);
    }
    out
}

pub fn class_stats_markdown(dist: &ClassDistribution) -> String {
    let rows: Vec<Vec<String>> = dist
        .per_category
        .iter()
        .map(|c| {
            vec![
                c.category.clone(),
                c.total.to_string(),
                format!("{:.4}", c.average),
            ]
        })
        .collect();
    let mut out = format!("Instances over {} images\n\n", dist.n_images);
    out.push_str(&markdown_table(
        &["Category", "Total instances", "Avg per image"],
        &rows,
    ));
    out
}

// --- strategy comparison ---------------------------------------------------

pub fn comparison_text(
    cmp: &StrategyComparison,
    label_a: &str,
    label_b: &str,
) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "strategy comparison (Welch two-sample t-test, alpha = {})",
        cmp.alpha
    );
    let _ = writeln!(
        out,
        "  {label_a}: mean {:.6}, std {:.6}, n {}",
        cmp.mean_a, cmp.std_a, cmp.n_a
    );
    let _ = writeln!(
        out,
        "  {label_b}: mean {:.6}, std {:.6}, n {}",
        cmp.mean_b, cmp.std_b, cmp.n_b
    );
    if cmp.df > 0.0 {
        let _ = writeln!(
            out,
            "  t = {:.6}, df = {:.4}, critical = {:.6}",
            cmp.t, cmp.df, cmp.critical
        );
    } else {
        let _ = writeln!(out, "  t = {}, zero variance in both groups", cmp.t);
    }
    let _ = writeln!(
        out,
        "  verdict: {}",
        if cmp.significant {
            "significant"
        } else {
            "not significant"
        }
    );
    out
}

/// Stderr summary for the savings run.
pub fn savings_summary(baseline: &Baseline, metric: &str) -> String {
    format!(
        "baseline: {metric} error {:.6} at {} images ({} repeats)",
        baseline.error, baseline.n_total, baseline.repeats
    )
}
