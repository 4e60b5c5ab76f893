//! Power-law scaling analysis of detection error vs. training-set size.
//!
//! The model is `error = 10^beta * N^gamma` with `error = 1 - metric`, i.e. a
//! straight line in log-log space whose intercept is `beta` and slope `gamma`.
//! Fitting is ordinary least squares on `log10(error)` vs `log10(N)`;
//! inverting the fitted line at a baseline error gives the number of training
//! examples a mixed dataset needs to match the real-only model, which is what
//! the savings table reports.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::mixing::round_half_up;
use crate::stats;

#[derive(Debug, Error, PartialEq)]
pub enum ScalingError {
    #[error("no run records to aggregate")]
    NoRecords,
    #[error(
        "non-positive error {error} at n_total={n_total} (metric == 1); \
         configure an error floor to fit anyway"
    )]
    NonPositiveError { n_total: u64, error: f64 },
    #[error("fit needs at least two distinct n_total values")]
    DegenerateFitInput,
    #[error("fitted slope {gamma} is not negative: the curve never reaches the target error")]
    NoCrossing { gamma: f64 },
    #[error("target error must be positive and finite, got {0}")]
    BadTarget(f64),
    #[error("no records at ratio {ratio} for metric '{metric}'")]
    NoBaselineRecords { ratio: f64, metric: String },
    #[error("each group needs at least two values, got {0}")]
    GroupTooSmall(usize),
    #[error("alpha must be in (0, 1), got {0}")]
    BadAlpha(f64),
    #[error("statistics error: {0}")]
    Stats(#[from] stats::StatsError),
}

/// One training run's outcome for one metric.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Real-data fraction of the training subset.
    pub ratio: f64,
    /// Total number of training examples.
    pub n_total: u64,
    /// Number of real examples among them.
    pub n_real: u64,
    /// 1-based repeat index.
    pub repeat: u32,
    /// Metric name, e.g. `map50`, `ap50:car`.
    pub metric: String,
    /// Metric value in (0, 1].
    pub value: f64,
}

/// Mean and spread of one (ratio, n_total, metric) group of repeats.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedPoint {
    pub ratio: f64,
    pub n_total: u64,
    pub metric: String,
    pub mean: f64,
    /// Sample standard deviation (n−1); 0 for a single repeat.
    pub std: f64,
    pub repeats: usize,
}

/// Group records by (metric, ratio, n_total) and compute mean and sample std.
///
/// Output order is deterministic: metric, then ratio, then n_total ascending.
pub fn aggregate_runs(records: &[RunRecord]) -> Result<Vec<AggregatedPoint>, ScalingError> {
    if records.is_empty() {
        return Err(ScalingError::NoRecords);
    }
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (&records[a], &records[b]);
        ra.metric
            .cmp(&rb.metric)
            .then(ra.ratio.total_cmp(&rb.ratio))
            .then(ra.n_total.cmp(&rb.n_total))
    });

    let mut out = Vec::new();
    let mut group: Vec<f64> = Vec::new();
    let mut key: Option<(&str, f64, u64)> = None;
    for &idx in &order {
        let rec = &records[idx];
        let rec_key = (rec.metric.as_str(), rec.ratio, rec.n_total);
        if key.map_or(true, |k| k == rec_key) {
            key = Some(rec_key);
            group.push(rec.value);
        } else {
            let (metric, ratio, n_total) = key.take().expect("group key set");
            out.push(AggregatedPoint {
                ratio,
                n_total,
                metric: metric.to_string(),
                mean: stats::mean(&group),
                std: stats::sample_std(&group),
                repeats: group.len(),
            });
            group.clear();
            group.push(rec.value);
            key = Some(rec_key);
        }
    }
    let (metric, ratio, n_total) = key.expect("at least one record");
    out.push(AggregatedPoint {
        ratio,
        n_total,
        metric: metric.to_string(),
        mean: stats::mean(&group),
        std: stats::sample_std(&group),
        repeats: group.len(),
    });
    Ok(out)
}

/// A fitted `error = 10^beta * N^gamma` power law.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    /// Intercept of the log-log line (log10 units).
    pub beta: f64,
    /// Slope of the log-log line.
    pub gamma: f64,
    pub n_points: usize,
    /// Residual sum of squares in log10 space.
    pub rss: f64,
    /// Ratio this fit belongs to.
    pub ratio: f64,
    pub metric: String,
    /// Size range the fit was computed over.
    pub n_min: u64,
    pub n_max: u64,
}

impl PowerLawFit {
    /// Predicted error at `n` examples.
    pub fn predicted_error(&self, n: f64) -> f64 {
        libm::exp10(self.beta + self.gamma * libm::log10(n))
    }
}

/// Ordinary least squares of `log10(error)` on `log10(n_total)`.
///
/// Every error must be strictly positive (a metric of exactly 1 breaks the
/// log; apply an error floor upstream) and at least two distinct sizes are
/// required.
pub fn fit_power_law(
    points: &[(u64, f64)],
    ratio: f64,
    metric: &str,
) -> Result<PowerLawFit, ScalingError> {
    for &(n_total, error) in points {
        if !(error > 0.0) || !error.is_finite() {
            return Err(ScalingError::NonPositiveError { n_total, error });
        }
    }
    let first = match points.first() {
        Some(&(n, _)) => n,
        None => return Err(ScalingError::DegenerateFitInput),
    };
    if points.iter().all(|&(n, _)| n == first) {
        return Err(ScalingError::DegenerateFitInput);
    }

    let xs: Vec<f64> = points.iter().map(|&(n, _)| libm::log10(n as f64)).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, e)| libm::log10(e)).collect();
    let x_mean = stats::mean(&xs);
    let y_mean = stats::mean(&ys);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    let gamma = sxy / sxx;
    let beta = y_mean - gamma * x_mean;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (beta + gamma * x);
            r * r
        })
        .sum();

    Ok(PowerLawFit {
        beta,
        gamma,
        n_points: points.len(),
        rss,
        ratio,
        metric: metric.to_string(),
        n_min: points.iter().map(|&(n, _)| n).min().expect("non-empty"),
        n_max: points.iter().map(|&(n, _)| n).max().expect("non-empty"),
    })
}

/// Fit inputs derived from aggregated points, with an error floor.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorPoints {
    /// `(n_total, 1 - mean_metric)` pairs, floor applied.
    pub points: Vec<(u64, f64)>,
    /// How many points hit the floor (metric was exactly 1 or above).
    pub floored: usize,
}

/// Turn aggregated metric means into `(n, error)` fit inputs for one
/// (ratio, metric) pair, clamping non-positive errors to `error_floor`.
pub fn error_points(
    aggregates: &[AggregatedPoint],
    ratio: f64,
    metric: &str,
    error_floor: f64,
) -> ErrorPoints {
    let mut points = Vec::new();
    let mut floored = 0usize;
    for agg in aggregates {
        if agg.metric != metric || agg.ratio.total_cmp(&ratio).is_ne() {
            continue;
        }
        let mut error = 1.0 - agg.mean;
        if error <= 0.0 {
            error = error_floor;
            floored += 1;
        }
        points.push((agg.n_total, error));
    }
    ErrorPoints { points, floored }
}

/// The real-only reference point: its error and dataset size.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    /// `1 - mean(metric)` over repeats at the maximal size.
    pub error: f64,
    pub n_total: u64,
    pub repeats: usize,
}

/// Baseline error from the records at `baseline_ratio` with the largest
/// `n_total`, averaged over repeats.
pub fn baseline_error(
    records: &[RunRecord],
    metric: &str,
    baseline_ratio: f64,
) -> Result<Baseline, ScalingError> {
    let candidates: Vec<&RunRecord> = records
        .iter()
        .filter(|r| r.metric == metric && r.ratio.total_cmp(&baseline_ratio).is_eq())
        .collect();
    let max_n = candidates
        .iter()
        .map(|r| r.n_total)
        .max()
        .ok_or_else(|| ScalingError::NoBaselineRecords {
            ratio: baseline_ratio,
            metric: metric.to_string(),
        })?;
    let values: Vec<f64> = candidates
        .iter()
        .filter(|r| r.n_total == max_n)
        .map(|r| r.value)
        .collect();
    Ok(Baseline {
        error: 1.0 - stats::mean(&values),
        n_total: max_n,
        repeats: values.len(),
    })
}

/// Result of inverting a fit at a target error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RequiredExamples {
    /// Continuous solution `N* = 10^((log10(target) - beta) / gamma)`.
    pub n_star: f64,
    /// Whether `N*` lies more than one decade outside the fitted size range.
    pub extrapolated: bool,
}

/// Number of training examples at which the fitted curve reaches
/// `target_error`.
///
/// Requires a negative slope; a flat or rising curve never crosses. The
/// result is flagged as extrapolated when it falls more than one decade
/// outside the fitted range.
pub fn required_examples(
    fit: &PowerLawFit,
    target_error: f64,
) -> Result<RequiredExamples, ScalingError> {
    if !(target_error > 0.0) || !target_error.is_finite() {
        return Err(ScalingError::BadTarget(target_error));
    }
    if fit.gamma >= 0.0 {
        return Err(ScalingError::NoCrossing { gamma: fit.gamma });
    }
    let log_n = (libm::log10(target_error) - fit.beta) / fit.gamma;
    let n_star = libm::exp10(log_n);
    let lo = libm::log10(fit.n_min as f64) - 1.0;
    let hi = libm::log10(fit.n_max as f64) + 1.0;
    Ok(RequiredExamples {
        n_star,
        extrapolated: log_n < lo || log_n > hi,
    })
}

/// Outcome of one savings row.
#[derive(Debug, Clone, PartialEq)]
pub enum SavingsOutcome {
    Reached {
        /// Continuous required total before rounding.
        n_star: f64,
        total_images: u64,
        real_images: u64,
        extrapolated: bool,
    },
    /// The fitted curve never reaches the baseline error.
    NotReached,
}

/// One row of the savings table.
#[derive(Debug, Clone, PartialEq)]
pub struct SavingsRow {
    pub ratio: f64,
    pub outcome: SavingsOutcome,
}

impl SavingsRow {
    pub fn real_images(&self) -> Option<u64> {
        match &self.outcome {
            SavingsOutcome::Reached { real_images, .. } => Some(*real_images),
            SavingsOutcome::NotReached => None,
        }
    }
}

/// Build the savings table: per ratio, the total and real image counts needed
/// to reach the baseline error.
///
/// `total = round_half_up(N*)`, `real = round_half_up(ratio * total)`. A fit
/// for the baseline ratio itself is ignored; that row reports the baseline's
/// own size. Ratios whose curve never crosses yield `NotReached` rows instead
/// of failing the whole table. Rows come out sorted by ratio.
pub fn savings_table(
    fits: &[PowerLawFit],
    baseline: &Baseline,
    baseline_ratio: f64,
) -> Vec<SavingsRow> {
    let mut rows: Vec<SavingsRow> = Vec::new();
    for fit in fits {
        if fit.ratio.total_cmp(&baseline_ratio).is_eq() {
            continue;
        }
        let outcome = match required_examples(fit, baseline.error) {
            Ok(req) => {
                let total_images = round_half_up(req.n_star);
                SavingsOutcome::Reached {
                    n_star: req.n_star,
                    total_images,
                    real_images: round_half_up(fit.ratio * total_images as f64),
                    extrapolated: req.extrapolated,
                }
            }
            Err(_) => SavingsOutcome::NotReached,
        };
        rows.push(SavingsRow {
            ratio: fit.ratio,
            outcome,
        });
    }
    rows.push(SavingsRow {
        ratio: baseline_ratio,
        outcome: SavingsOutcome::Reached {
            n_star: baseline.n_total as f64,
            total_images: baseline.n_total,
            real_images: baseline.n_total,
            extrapolated: false,
        },
    });
    rows.sort_by(|a, b| a.ratio.total_cmp(&b.ratio));
    rows
}

/// Welch's two-sample comparison of two training strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyComparison {
    pub mean_a: f64,
    pub std_a: f64,
    pub n_a: usize,
    pub mean_b: f64,
    pub std_b: f64,
    pub n_b: usize,
    /// Welch t statistic (infinite when both variances vanish but the means
    /// differ).
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom (0 in the degenerate case).
    pub df: f64,
    /// Two-sided critical value at `alpha`.
    pub critical: f64,
    pub alpha: f64,
    pub significant: bool,
}

/// Welch's two-sample t test (unequal variances) at significance `alpha`.
///
/// The verdict is significant iff `|t|` exceeds the two-sided critical value.
/// When both samples have zero variance the test degenerates: equal means are
/// not significant, different means are.
pub fn compare_strategies(
    a: &[f64],
    b: &[f64],
    alpha: f64,
) -> Result<StrategyComparison, ScalingError> {
    if a.len() < 2 {
        return Err(ScalingError::GroupTooSmall(a.len()));
    }
    if b.len() < 2 {
        return Err(ScalingError::GroupTooSmall(b.len()));
    }
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(ScalingError::BadAlpha(alpha));
    }
    let mean_a = stats::mean(a);
    let mean_b = stats::mean(b);
    let std_a = stats::sample_std(a);
    let std_b = stats::sample_std(b);

    let comparison = match stats::welch_t(mean_a, std_a * std_a, a.len(), mean_b, std_b * std_b, b.len())
    {
        Some((t, df)) => {
            let critical = stats::student_t_quantile(1.0 - alpha / 2.0, df)?;
            StrategyComparison {
                mean_a,
                std_a,
                n_a: a.len(),
                mean_b,
                std_b,
                n_b: b.len(),
                t,
                df,
                critical,
                alpha,
                significant: t.abs() > critical,
            }
        }
        None => {
            // Zero variance on both sides: any difference in means separates
            // the groups exactly.
            let identical = mean_a == mean_b;
            StrategyComparison {
                mean_a,
                std_a,
                n_a: a.len(),
                mean_b,
                std_b,
                n_b: b.len(),
                t: if identical {
                    0.0
                } else if mean_a > mean_b {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                },
                df: 0.0,
                critical: f64::NAN,
                alpha,
                significant: !identical,
            }
        }
    };
    Ok(comparison)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use alloc::vec;
    use proptest::prelude::*;

    fn rec(ratio: f64, n_total: u64, repeat: u32, value: f64) -> RunRecord {
        RunRecord {
            ratio,
            n_total,
            n_real: crate::mixing::split_counts(n_total, ratio).0,
            repeat,
            metric: "map50".to_string(),
            value,
        }
    }

    #[test]
    fn aggregate_constant_and_pair() {
        let records: Vec<RunRecord> = (1..=5).map(|k| rec(0.1, 100, k, 0.4)).collect();
        let aggs = aggregate_runs(&records).unwrap();
        assert_eq!(aggs.len(), 1);
        assert_eq!(aggs[0].mean, 0.4);
        assert_eq!(aggs[0].std, 0.0);
        assert_eq!(aggs[0].repeats, 5);

        let pair = aggregate_runs(&[rec(0.1, 100, 1, 0.3), rec(0.1, 100, 2, 0.5)]).unwrap();
        assert!((pair[0].mean - 0.4).abs() < 1e-15);
        assert!((pair[0].std - 0.14142135623730953).abs() < 1e-15);
    }

    #[test]
    fn aggregate_singleton_and_empty() {
        let single = aggregate_runs(&[rec(0.5, 10, 1, 0.77)]).unwrap();
        assert_eq!(single[0].mean, 0.77);
        assert_eq!(single[0].std, 0.0);
        assert_eq!(single[0].repeats, 1);

        assert_eq!(aggregate_runs(&[]), Err(ScalingError::NoRecords));
    }

    #[test]
    fn aggregate_groups_and_orders_deterministically() {
        let records = vec![
            rec(0.5, 200, 1, 0.5),
            rec(0.1, 100, 1, 0.3),
            rec(0.5, 100, 1, 0.4),
            rec(0.1, 100, 2, 0.5),
        ];
        let aggs = aggregate_runs(&records).unwrap();
        let keys: Vec<(f64, u64)> = aggs.iter().map(|a| (a.ratio, a.n_total)).collect();
        assert_eq!(keys, vec![(0.1, 100), (0.5, 100), (0.5, 200)]);
        assert_eq!(aggs[0].repeats, 2);
    }

    #[test]
    fn aggregate_mean_is_permutation_invariant() {
        let mut records = vec![
            rec(0.1, 100, 1, 0.31),
            rec(0.1, 100, 2, 0.29),
            rec(0.1, 100, 3, 0.37),
        ];
        let forward = aggregate_runs(&records).unwrap();
        records.reverse();
        let backward = aggregate_runs(&records).unwrap();
        assert_eq!(forward[0].mean, backward[0].mean);
    }

    fn exact_curve(beta: f64, gamma: f64, sizes: &[u64]) -> Vec<(u64, f64)> {
        sizes
            .iter()
            .map(|&n| (n, libm::exp10(beta + gamma * libm::log10(n as f64))))
            .collect()
    }

    #[test]
    fn fit_recovers_exact_log_linear_data() {
        let points = exact_curve(-0.2, -0.3, &[10, 100, 1000]);
        let fit = fit_power_law(&points, 0.1, "map50").unwrap();
        assert!((fit.beta - (-0.2)).abs() < 1e-9, "beta {}", fit.beta);
        assert!((fit.gamma - (-0.3)).abs() < 1e-9, "gamma {}", fit.gamma);
        assert!(fit.rss < 1e-18);
        assert_eq!((fit.n_min, fit.n_max), (10, 1000));
    }

    #[test]
    fn fit_two_point_line() {
        let fit = fit_power_law(&[(10, 0.1), (1000, 0.001)], 0.0, "map50").unwrap();
        assert!((fit.gamma - (-1.0)).abs() < 1e-12);
        assert!(fit.beta.abs() < 1e-12);
    }

    #[test]
    fn fit_matches_closed_form_ols_oracle_on_noisy_data() {
        // 10 log-spaced sizes, noise sigma=0.01 in log space, seed 7.
        let sizes = crate::mixing::plan_sizes(2727, 10, 1.0).unwrap();
        let mut rng = SplitMix64::new(7);
        let points: Vec<(u64, f64)> = sizes
            .iter()
            .map(|&n| {
                let eps = 0.01 * rng.next_normal();
                (n, libm::exp10(-0.1 - 0.25 * libm::log10(n as f64) + eps))
            })
            .collect();
        let fit = fit_power_law(&points, 0.2, "map50").unwrap();

        // Independent route: raw-sum OLS formulas.
        let n = points.len() as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for &(nt, e) in &points {
            let x = libm::log10(nt as f64);
            let y = libm::log10(e);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let intercept = (sy - slope * sx) / n;
        assert!((fit.gamma - slope).abs() < 1e-9);
        assert!((fit.beta - intercept).abs() < 1e-9);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(matches!(
            fit_power_law(&[(10, 0.0), (100, 0.5)], 0.1, "m"),
            Err(ScalingError::NonPositiveError { n_total: 10, .. })
        ));
        assert!(matches!(
            fit_power_law(&[(10, 0.5), (10, 0.4)], 0.1, "m"),
            Err(ScalingError::DegenerateFitInput)
        ));
        assert!(matches!(
            fit_power_law(&[], 0.1, "m"),
            Err(ScalingError::DegenerateFitInput)
        ));
    }

    #[test]
    fn error_points_apply_floor() {
        let aggs = vec![
            AggregatedPoint {
                ratio: 0.1,
                n_total: 100,
                metric: "map50".to_string(),
                mean: 0.75,
                std: 0.0,
                repeats: 5,
            },
            AggregatedPoint {
                ratio: 0.1,
                n_total: 200,
                metric: "map50".to_string(),
                mean: 1.0,
                std: 0.0,
                repeats: 5,
            },
        ];
        let pts = error_points(&aggs, 0.1, "map50", 1e-6);
        assert_eq!(pts.floored, 1);
        assert!((pts.points[0].1 - 0.25).abs() < 1e-15);
        assert_eq!(pts.points[1].1, 1e-6);
    }

    #[test]
    fn baseline_from_max_size_repeats() {
        let records = vec![
            rec(1.0, 100, 1, 0.5),
            rec(1.0, 2727, 1, 0.58),
            rec(1.0, 2727, 2, 0.62),
            rec(0.1, 2727, 1, 0.99),
        ];
        let baseline = baseline_error(&records, "map50", 1.0).unwrap();
        assert_eq!(baseline.n_total, 2727);
        assert_eq!(baseline.repeats, 2);
        assert!((baseline.error - 0.40).abs() < 1e-12);

        assert!(matches!(
            baseline_error(&records, "ap50:car", 1.0),
            Err(ScalingError::NoBaselineRecords { .. })
        ));
    }

    #[test]
    fn required_examples_direct_inversion() {
        let fit = PowerLawFit {
            beta: 0.0,
            gamma: -1.0,
            n_points: 2,
            rss: 0.0,
            ratio: 0.1,
            metric: "map50".to_string(),
            n_min: 10,
            n_max: 1000,
        };
        let req = required_examples(&fit, 0.01).unwrap();
        assert!((req.n_star - 100.0).abs() < 1e-9);
        assert!(!req.extrapolated);
    }

    #[test]
    fn required_examples_hand_value_and_extrapolation_flag() {
        let fit = PowerLawFit {
            beta: 0.2,
            gamma: -0.1,
            n_points: 10,
            rss: 0.0,
            ratio: 0.1,
            metric: "map50".to_string(),
            n_min: 272,
            n_max: 2727,
        };
        let req = required_examples(&fit, 0.5).unwrap();
        assert!((req.n_star - 102399.99999999993).abs() / 102400.0 < 1e-12);
        // 1.02e5 is more than a decade above 2727.
        assert!(req.extrapolated);
    }

    #[test]
    fn required_examples_rejects_flat_fit_and_bad_target() {
        let fit = PowerLawFit {
            beta: 0.0,
            gamma: 0.05,
            n_points: 3,
            rss: 0.0,
            ratio: 0.1,
            metric: "map50".to_string(),
            n_min: 10,
            n_max: 100,
        };
        assert!(matches!(
            required_examples(&fit, 0.1),
            Err(ScalingError::NoCrossing { .. })
        ));
        let ok = PowerLawFit { gamma: -0.5, ..fit };
        assert!(matches!(
            required_examples(&ok, 0.0),
            Err(ScalingError::BadTarget(_))
        ));
    }

    #[test]
    fn savings_table_rows() {
        let fits = vec![
            fit_power_law(&exact_curve(-0.05, -0.10, &[272, 758, 2727]), 0.05, "map50").unwrap(),
            fit_power_law(&exact_curve(-0.10, -0.15, &[272, 758, 2727]), 0.2, "map50").unwrap(),
            // Rising curve: never reaches the baseline.
            fit_power_law(&[(272, 0.5), (2727, 0.6)], 0.0, "map50").unwrap(),
        ];
        let baseline = Baseline {
            error: 0.35,
            n_total: 2727,
            repeats: 5,
        };
        let rows = savings_table(&fits, &baseline, 1.0);
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].ratio, 0.0);
        assert_eq!(rows[0].outcome, SavingsOutcome::NotReached);
        // Baseline row reports its own size.
        let last = rows.last().unwrap();
        assert_eq!(last.ratio, 1.0);
        assert!(matches!(
            last.outcome,
            SavingsOutcome::Reached { total_images: 2727, real_images: 2727, .. }
        ));
        // Internal consistency of every reached row.
        for row in &rows {
            if let SavingsOutcome::Reached {
                total_images,
                real_images,
                ..
            } = row.outcome
            {
                assert_eq!(real_images, round_half_up(row.ratio * total_images as f64));
                assert!(real_images <= total_images);
            }
        }
    }

    #[test]
    fn compare_identical_groups() {
        let g = [0.4, 0.41, 0.39, 0.4, 0.4];
        let cmp = compare_strategies(&g, &g, 0.05).unwrap();
        assert!(cmp.t.abs() < 1e-12);
        assert!(!cmp.significant);
    }

    #[test]
    fn compare_degenerate_variance() {
        let cmp = compare_strategies(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0], 0.05).unwrap();
        assert!(cmp.significant);
        assert!(cmp.t.is_infinite());
        let same = compare_strategies(&[0.5, 0.5], &[0.5, 0.5], 0.05).unwrap();
        assert!(!same.significant);
        assert_eq!(same.t, 0.0);
    }

    /// Five values with exact sample mean `m` and sample std `s`.
    fn synth_group(m: f64, s: f64) -> [f64; 5] {
        let d = s * libm::sqrt(2.0);
        [m - d, m, m, m, m + d]
    }

    #[test]
    fn compare_reported_strategy_row() {
        // Published mixed-vs-pretrain mAP50 row: |t| ~ 1.94 below the critical
        // value, so not significant.
        let a = synth_group(0.3706, 0.0082);
        let b = synth_group(0.3841, 0.0132);
        let cmp = compare_strategies(&a, &b, 0.05).unwrap();
        assert!((cmp.t - (-1.942577)).abs() < 1e-4);
        assert!((cmp.df - 6.687071).abs() < 1e-4);
        assert!((cmp.critical - 2.387242).abs() < 1e-5);
        assert!(!cmp.significant);
    }

    #[test]
    fn compare_too_small_groups() {
        assert!(matches!(
            compare_strategies(&[0.1], &[0.2, 0.3], 0.05),
            Err(ScalingError::GroupTooSmall(1))
        ));
    }

    proptest! {
        #[test]
        fn fit_exact_recovery_over_coefficient_space(
            beta in -2.0..2.0f64,
            gamma in -2.0..-0.01f64,
        ) {
            let sizes = crate::mixing::plan_sizes(2727, 10, 1.0).unwrap();
            let points = exact_curve(beta, gamma, &sizes);
            let fit = fit_power_law(&points, 0.1, "map50").unwrap();
            prop_assert!((fit.beta - beta).abs() < 1e-9);
            prop_assert!((fit.gamma - gamma).abs() < 1e-9);
        }

        #[test]
        fn required_examples_inverse_identity(
            beta in -2.0..2.0f64,
            gamma in -2.0..-0.05f64,
            log_n in 1.0..5.0f64,
        ) {
            let fit = PowerLawFit {
                beta,
                gamma,
                n_points: 10,
                rss: 0.0,
                ratio: 0.1,
                metric: "map50".to_string(),
                n_min: 10,
                n_max: 100_000,
            };
            let n = libm::exp10(log_n);
            let predicted = fit.predicted_error(n);
            prop_assume!(predicted > 0.0 && predicted.is_finite());
            let req = required_examples(&fit, predicted).unwrap();
            prop_assert!((req.n_star - n).abs() / n < 1e-9);
        }

        #[test]
        fn required_examples_decreasing_in_target(
            target_lo in 0.01..0.4f64,
            delta in 0.05..0.5f64,
        ) {
            let fit = PowerLawFit {
                beta: 0.0,
                gamma: -0.5,
                n_points: 10,
                rss: 0.0,
                ratio: 0.1,
                metric: "map50".to_string(),
                n_min: 10,
                n_max: 10_000,
            };
            let lo = required_examples(&fit, target_lo).unwrap().n_star;
            let hi = required_examples(&fit, target_lo + delta).unwrap().n_star;
            prop_assert!(lo > hi);
        }

        #[test]
        fn compare_verdict_is_symmetric(
            seed in proptest::num::u64::ANY,
        ) {
            let mut rng = SplitMix64::new(seed);
            let a: Vec<f64> = (0..5).map(|_| 0.3 + 0.1 * rng.next_f64()).collect();
            let b: Vec<f64> = (0..5).map(|_| 0.3 + 0.1 * rng.next_f64()).collect();
            let ab = compare_strategies(&a, &b, 0.05).unwrap();
            let ba = compare_strategies(&b, &a, 0.05).unwrap();
            prop_assert_eq!(ab.significant, ba.significant);
            prop_assert!((ab.t + ba.t).abs() < 1e-12);
        }
    }
}
