//! Rank statistics over a datasets × treatments score matrix.

use crate::error::{Error, Result};

/// Rows are subjects (datasets), columns are treatments. Higher is better.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn new(row_ids: Vec<String>, col_ids: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != row_ids.len() {
            return Err(Error::DimensionMismatch {
                expected: row_ids.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|r| r.len() != col_ids.len()) {
            return Err(Error::invalid("score matrix is not rectangular"));
        }
        if row_ids.len() < 2 || col_ids.len() < 2 {
            return Err(Error::invalid(format!(
                "score matrix needs at least 2 rows and 2 columns, got {}×{}",
                row_ids.len(),
                col_ids.len()
            )));
        }
        if values.iter().flatten().any(|v| v.is_nan()) {
            return Err(Error::invalid("score matrix contains NaN"));
        }
        Ok(Self {
            row_ids,
            col_ids,
            values,
        })
    }

    /// Matrix with generated identifiers, mostly for tests and examples.
    pub fn from_rows(values: Vec<Vec<f64>>) -> Result<Self> {
        let k = values.first().map_or(0, Vec::len);
        Self::new(
            (0..values.len()).map(|i| format!("r{i}")).collect(),
            (0..k).map(|j| format!("c{j}")).collect(),
            values,
        )
    }

    pub fn n_rows(&self) -> usize {
        self.values.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_ids.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }
}

/// Fractional ranks of one row, 1 = best. Tied values share the mean of the
/// ranks they span.
pub fn row_ranks(scores: &[f64], higher_better: bool) -> Vec<f64> {
    let k = scores.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        let c = scores[a].total_cmp(&scores[b]);
        if higher_better {
            c.reverse()
        } else {
            c
        }
    });
    let mut ranks = vec![0.0; k];
    let mut start = 0;
    while start < k {
        let mut end = start + 1;
        while end < k && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let mean = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mean;
        }
        start = end;
    }
    ranks
}

/// Sizes of the groups of tied values in a row.
fn tie_groups(scores: &[f64]) -> Vec<usize> {
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut groups = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        groups.push(j - i);
        i = j;
    }
    groups
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FriedmanResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub reject_at_0_05: bool,
}

/// Tie-corrected Friedman chi-square test.
pub fn friedman(m: &ScoreMatrix) -> FriedmanResult {
    let n = m.n_rows() as f64;
    let k = m.n_cols();
    let kf = k as f64;
    let mut rank_sums = vec![0.0; k];
    let mut tie_sum = 0.0;
    for row in m.rows() {
        for (s, r) in rank_sums.iter_mut().zip(row_ranks(row, true)) {
            *s += r;
        }
        tie_sum += tie_groups(row)
            .into_iter()
            .map(|t| {
                let t = t as f64;
                t * t * t - t
            })
            .sum::<f64>();
    }
    let correction = 1.0 - tie_sum / (n * kf * (kf * kf - 1.0));
    let df = k - 1;
    if correction <= 1e-12 {
        return FriedmanResult {
            statistic: 0.0,
            degrees_of_freedom: df,
            p_value: 1.0,
            reject_at_0_05: false,
        };
    }
    let sum_sq: f64 = rank_sums.iter().map(|r| r * r).sum();
    let raw = 12.0 / (n * kf * (kf + 1.0)) * sum_sq - 3.0 * n * (kf + 1.0);
    let statistic = (raw / correction).max(0.0);
    let p_value = chi2_sf(statistic, df);
    FriedmanResult {
        statistic,
        degrees_of_freedom: df,
        p_value,
        reject_at_0_05: p_value < 0.05,
    }
}

/// Natural log of the gamma function (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + G + 0.5;
    let series = COEF[1..]
        .iter()
        .enumerate()
        .fold(COEF[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + series.ln()
}

/// Regularized upper incomplete gamma `Q(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_continued_fraction(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..10_000 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    // modified Lentz
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Chi-square survival function `1 − F(x; df)`.
pub fn chi2_sf(x: f64, df: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_q(df as f64 / 2.0, x / 2.0).clamp(0.0, 1.0)
}

/// Two-tailed Nemenyi critical values `q_α` for k = 2..=10 (Studentized range
/// divided by √2).
const NEMENYI_Q_005: [f64; 9] = [1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164];
const NEMENYI_Q_010: [f64; 9] = [1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920];

/// Critical difference of average ranks for `k` treatments over `n_subjects`.
/// `alpha` must be 0.05 or 0.10.
pub fn nemenyi_cd(k: usize, n_subjects: usize, alpha: f64) -> Result<f64> {
    if !(2..=10).contains(&k) {
        return Err(Error::invalid(format!("Nemenyi table covers k = 2..10, got {k}")));
    }
    if n_subjects == 0 {
        return Err(Error::invalid("Nemenyi critical difference needs at least one subject"));
    }
    let table = if (alpha - 0.05).abs() < 1e-12 {
        &NEMENYI_Q_005
    } else if (alpha - 0.10).abs() < 1e-12 {
        &NEMENYI_Q_010
    } else {
        return Err(Error::invalid(format!("no Nemenyi table for alpha = {alpha}")));
    };
    let kf = k as f64;
    Ok(table[k - 2] * (kf * (kf + 1.0) / (6.0 * n_subjects as f64)).sqrt())
}

/// Wins of one row: the maximum shares a single win (1/t each for a t-way tie).
pub fn row_wins(row: &[f64]) -> Vec<f64> {
    let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let t = row.iter().filter(|&&v| v == best).count() as f64;
    row.iter().map(|&v| if v == best { 1.0 / t } else { 0.0 }).collect()
}

/// One win per row, split equally among the tied maxima.
pub fn fractional_wins(m: &ScoreMatrix) -> Vec<f64> {
    let mut wins = vec![0.0; m.n_cols()];
    for row in m.rows() {
        for (w, r) in wins.iter_mut().zip(row_wins(row)) {
            *w += r;
        }
    }
    wins
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeSummary {
    pub per_row: Vec<f64>,
    pub mean: f64,
}

/// Per-row `max − min` and its mean.
pub fn best_worst_range(m: &ScoreMatrix) -> RangeSummary {
    let per_row: Vec<f64> = m
        .rows()
        .iter()
        .map(|r| {
            let hi = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
            hi - lo
        })
        .collect();
    let mean = per_row.iter().sum::<f64>() / per_row.len() as f64;
    RangeSummary { per_row, mean }
}

/// Column means of the row ranks; lower is better.
pub fn average_ranks(m: &ScoreMatrix) -> Vec<f64> {
    let mut sums = vec![0.0; m.n_cols()];
    for row in m.rows() {
        for (s, r) in sums.iter_mut().zip(row_ranks(row, true)) {
            *s += r;
        }
    }
    let n = m.n_rows() as f64;
    sums.into_iter().map(|s| s / n).collect()
}
