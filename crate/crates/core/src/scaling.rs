//! Per-feature scaling fitted on a training fold and applied to any matrix.
//!
//! Every linear technique is written as `x' = (x − T) / S` with a
//! translational term `T` and a scaling factor `S` per column. The quantile
//! transformer is the non-linear exception: it maps values through an
//! estimated CDF and then through the standard-normal quantile function.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2, Axis};

use crate::error::{Error, Result};

/// Probability clipping applied before the normal quantile function.
pub const QT_CLIP: f64 = 1e-7;
/// Default cap on the number of reference quantiles.
pub const QT_DEFAULT_QUANTILES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalerKind {
    /// NS: identity.
    None,
    /// MC: subtract the mean.
    MeanCentering,
    /// SS: zero mean, unit population variance.
    Standard,
    /// PS: divide the centred value by the square root of the std.
    Pareto,
    /// VS: standard score multiplied by the coefficient-of-variation inverse.
    Vast,
    /// MM: map `[min, max]` onto `[lower, upper]`.
    MinMax { lower: f64, upper: f64 },
    /// MA: divide by the maximum absolute value.
    MaxAbs,
    /// RS: subtract the median, divide by the interquartile range.
    Robust,
    /// QT: quantile transform onto a standard normal.
    Quantile { n_quantiles: usize },
}

impl ScalerKind {
    /// The six techniques of the default experiment grid.
    pub const DEFAULT_GRID: [ScalerKind; 6] = [
        ScalerKind::None,
        ScalerKind::Standard,
        ScalerKind::MinMax { lower: 0.0, upper: 1.0 },
        ScalerKind::MaxAbs,
        ScalerKind::Robust,
        ScalerKind::Quantile {
            n_quantiles: QT_DEFAULT_QUANTILES,
        },
    ];

    /// Two-letter identifier used in result files.
    pub fn code(&self) -> &'static str {
        match self {
            ScalerKind::None => "NS",
            ScalerKind::MeanCentering => "MC",
            ScalerKind::Standard => "SS",
            ScalerKind::Pareto => "PS",
            ScalerKind::Vast => "VS",
            ScalerKind::MinMax { .. } => "MM",
            ScalerKind::MaxAbs => "MA",
            ScalerKind::Robust => "RS",
            ScalerKind::Quantile { .. } => "QT",
        }
    }

    pub fn is_affine(&self) -> bool {
        !matches!(self, ScalerKind::Quantile { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ScalerKind::MinMax { lower, upper } if !(lower < upper) => {
                Err(Error::invalid(format!("min-max range [{lower}, {upper}] is empty")))
            }
            ScalerKind::Quantile { n_quantiles } if n_quantiles < 2 => {
                Err(Error::invalid("quantile transformer needs at least 2 quantiles"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ScalerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for ScalerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_uppercase().as_str() {
            "NS" => ScalerKind::None,
            "MC" => ScalerKind::MeanCentering,
            "SS" => ScalerKind::Standard,
            "PS" => ScalerKind::Pareto,
            "VS" => ScalerKind::Vast,
            "MM" => ScalerKind::MinMax { lower: 0.0, upper: 1.0 },
            "MA" => ScalerKind::MaxAbs,
            "RS" => ScalerKind::Robust,
            "QT" => ScalerKind::Quantile {
                n_quantiles: QT_DEFAULT_QUANTILES,
            },
            other => return Err(Error::invalid(format!("unknown scaler `{other}`"))),
        })
    }
}

/// Statistics learned from the fitting matrix, one entry per feature.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalerParams {
    None,
    Moments { mean: Vec<f64>, std: Vec<f64> },
    Range { min: Vec<f64>, max: Vec<f64> },
    MaxAbs { max_abs: Vec<f64> },
    Quartiles { q1: Vec<f64>, q2: Vec<f64>, q3: Vec<f64> },
    /// Non-decreasing reference values per feature.
    Quantiles { references: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedScaler {
    pub kind: ScalerKind,
    pub n_features: usize,
    pub params: ScalerParams,
}

/// Linear-interpolation quantile of sorted data: position `(n − 1)·q`.
pub fn quantile(sorted_values: &[f64], q: f64) -> Result<f64> {
    if sorted_values.is_empty() {
        return Err(Error::invalid("quantile of an empty sample"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("quantile level {q} outside [0, 1]")));
    }
    Ok(quantile_unchecked(sorted_values, q))
}

fn quantile_unchecked(v: &[f64], q: f64) -> f64 {
    let pos = (v.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo + 1 >= v.len() || frac == 0.0 {
        v[lo.min(v.len() - 1)]
    } else {
        v[lo] + frac * (v[lo + 1] - v[lo])
    }
}

/// Standard-normal quantile function (Wichura's AS 241, PPND16).
///
/// Relative accuracy is about 1e-16 over the open unit interval.
pub fn inverse_normal_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("probability {p} outside (0, 1)")));
    }
    Ok(ppnd16(p))
}

#[allow(clippy::excessive_precision)]
fn ppnd16(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_608_0,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083_0e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061_0e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561_0e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34,
        4.630_337_846_156_545_295_90,
        5.769_497_221_460_691_405_50,
        3.647_848_324_763_204_605_04,
        1.270_458_252_452_368_382_58,
        2.417_807_251_774_506_117_70e-1,
        2.272_384_498_926_918_458_33e-2,
        7.745_450_142_783_414_076_40e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87,
        1.676_384_830_183_803_849_40,
        6.897_673_349_851_000_045_50e-1,
        1.481_039_764_274_800_745_90e-1,
        1.519_866_656_361_645_719_66e-2,
        5.475_938_084_995_344_946_00e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_20,
        5.463_784_911_164_114_369_90,
        1.784_826_539_917_291_335_80,
        2.965_605_718_285_048_912_30e-1,
        2.653_218_952_657_612_309_30e-2,
        1.242_660_947_388_078_438_60e-3,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_90e-1,
        1.369_298_809_227_358_053_10e-1,
        1.487_536_129_085_061_485_25e-2,
        7.868_691_311_456_132_591_00e-4,
        1.846_318_317_510_054_681_80e-5,
        1.421_511_758_316_445_888_70e-7,
        2.044_263_103_389_939_785_64e-15,
    ];
    fn poly(c: &[f64; 8], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
    }

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let z = if r <= 5.0 {
        r -= 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        r -= 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -z
    } else {
        z
    }
}

fn column_sorted(x: &ArrayView2<f64>, j: usize) -> Vec<f64> {
    let mut col: Vec<f64> = x.column(j).to_vec();
    col.sort_by(f64::total_cmp);
    col
}

/// Learns per-feature parameters from `train_features`.
pub fn fit(kind: ScalerKind, train_features: &Array2<f64>) -> Result<FittedScaler> {
    kind.validate()?;
    let (n, p) = train_features.dim();
    if n == 0 || p == 0 {
        return Err(Error::invalid("cannot fit a scaler on an empty matrix"));
    }
    let x = train_features.view();
    let params = match kind {
        ScalerKind::None => ScalerParams::None,
        ScalerKind::MeanCentering | ScalerKind::Standard | ScalerKind::Pareto | ScalerKind::Vast => {
            let mean: Vec<f64> = x.mean_axis(Axis(0)).expect("non-empty").to_vec();
            let std = (0..p)
                .map(|j| {
                    let m = mean[j];
                    let ss: f64 = x.column(j).iter().map(|v| (v - m) * (v - m)).sum();
                    (ss / n as f64).sqrt()
                })
                .collect();
            ScalerParams::Moments { mean, std }
        }
        ScalerKind::MinMax { .. } => {
            let min = (0..p)
                .map(|j| x.column(j).iter().copied().fold(f64::INFINITY, f64::min))
                .collect();
            let max = (0..p)
                .map(|j| x.column(j).iter().copied().fold(f64::NEG_INFINITY, f64::max))
                .collect();
            ScalerParams::Range { min, max }
        }
        ScalerKind::MaxAbs => ScalerParams::MaxAbs {
            max_abs: (0..p)
                .map(|j| x.column(j).iter().fold(0.0_f64, |m, v| m.max(v.abs())))
                .collect(),
        },
        ScalerKind::Robust => {
            let (mut q1, mut q2, mut q3) = (Vec::new(), Vec::new(), Vec::new());
            for j in 0..p {
                let col = column_sorted(&x, j);
                q1.push(quantile_unchecked(&col, 0.25));
                q2.push(quantile_unchecked(&col, 0.5));
                q3.push(quantile_unchecked(&col, 0.75));
            }
            ScalerParams::Quartiles { q1, q2, q3 }
        }
        ScalerKind::Quantile { n_quantiles } => {
            let m = n_quantiles.min(n).max(2);
            let references = (0..p)
                .map(|j| {
                    let col = column_sorted(&x, j);
                    let mut refs: Vec<f64> = (0..m)
                        .map(|i| quantile_unchecked(&col, i as f64 / (m - 1) as f64))
                        .collect();
                    // interpolation can wobble by an ulp; keep the sequence monotone
                    for i in 1..refs.len() {
                        if refs[i] < refs[i - 1] {
                            refs[i] = refs[i - 1];
                        }
                    }
                    refs
                })
                .collect();
            ScalerParams::Quantiles { references }
        }
    };
    Ok(FittedScaler {
        kind,
        n_features: p,
        params,
    })
}

fn safe_scale(s: f64) -> f64 {
    if s == 0.0 || !s.is_finite() {
        1.0
    } else {
        s
    }
}

impl FittedScaler {
    /// Translational terms and scaling factors of the affine kinds, with
    /// degenerate factors already replaced by 1. `None` for the quantile
    /// transformer.
    pub fn translation_scale(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let p = self.n_features;
        let pair = match (&self.kind, &self.params) {
            (ScalerKind::None, _) => (vec![0.0; p], vec![1.0; p]),
            (ScalerKind::MeanCentering, ScalerParams::Moments { mean, .. }) => (mean.clone(), vec![1.0; p]),
            (ScalerKind::Standard, ScalerParams::Moments { mean, std }) => {
                (mean.clone(), std.iter().map(|&s| safe_scale(s)).collect())
            }
            (ScalerKind::Pareto, ScalerParams::Moments { mean, std }) => {
                (mean.clone(), std.iter().map(|&s| safe_scale(s.sqrt())).collect())
            }
            (ScalerKind::Vast, ScalerParams::Moments { mean, std }) => (
                mean.clone(),
                std.iter()
                    .zip(mean)
                    .map(|(&s, &m)| safe_scale(s * s / m))
                    .collect(),
            ),
            (ScalerKind::MinMax { lower, upper }, ScalerParams::Range { min, max }) => {
                let width = upper - lower;
                let scale: Vec<f64> = min
                    .iter()
                    .zip(max)
                    .map(|(lo, hi)| safe_scale((hi - lo) / width))
                    .collect();
                let shift = min.iter().zip(&scale).map(|(lo, s)| lo - lower * s).collect();
                (shift, scale)
            }
            (ScalerKind::MaxAbs, ScalerParams::MaxAbs { max_abs }) => {
                (vec![0.0; p], max_abs.iter().map(|&m| safe_scale(m)).collect())
            }
            (ScalerKind::Robust, ScalerParams::Quartiles { q1, q2, q3 }) => (
                q2.clone(),
                q1.iter().zip(q3).map(|(a, b)| safe_scale(b - a)).collect(),
            ),
            _ => return None,
        };
        Some(pair)
    }

    /// Applies the fitted transform column-wise. Never reads statistics from
    /// `features`.
    pub fn transform(&self, features: &Array2<f64>) -> Result<Array2<f64>> {
        if features.ncols() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: features.ncols(),
            });
        }
        if let ScalerKind::None = self.kind {
            return Ok(features.clone());
        }
        let mut out = features.as_standard_layout().to_owned();
        if let ScalerParams::Quantiles { references } = &self.params {
            for mut row in out.rows_mut() {
                for (v, refs) in row.iter_mut().zip(references) {
                    *v = quantile_to_normal(*v, refs);
                }
            }
            return Ok(out);
        }
        let (shift, scale) = self.translation_scale().expect("affine kind");
        for mut row in out.rows_mut() {
            for ((v, t), s) in row.iter_mut().zip(&shift).zip(&scale) {
                *v = (*v - t) / s;
            }
        }
        Ok(out)
    }
}

/// Estimated CDF by interpolation over reference quantiles, then the normal
/// quantile function.
fn quantile_to_normal(v: f64, refs: &[f64]) -> f64 {
    let m = refs.len();
    let (lo_ref, hi_ref) = (refs[0], refs[m - 1]);
    let v = v.clamp(lo_ref, hi_ref);
    // first index with refs[i] >= v, last index with refs[i] <= v
    let first_ge = refs.partition_point(|&r| r < v);
    let last_le = refs.partition_point(|&r| r <= v) - 1;
    let pos = if first_ge < m && refs[first_ge] == v {
        (first_ge + last_le) as f64 / 2.0
    } else {
        let (a, b) = (refs[last_le], refs[first_ge]);
        last_le as f64 + (v - a) / (b - a)
    };
    let prob = (pos / (m - 1) as f64).clamp(QT_CLIP, 1.0 - QT_CLIP);
    ppnd16(prob)
}

/// Convenience for `fit(kind, x)?.transform(x)`.
pub fn fit_transform(kind: ScalerKind, x: &Array2<f64>) -> Result<(FittedScaler, Array2<f64>)> {
    let f = fit(kind, x)?;
    let t = f.transform(x)?;
    Ok((f, t))
}
