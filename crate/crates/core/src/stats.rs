//! Propagation-time-versus-distance statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{BoundStatus, SpeedBound};
use crate::sim::InfectionRecord;

/// Minimum number of records a slope fit accepts.
pub const MIN_FIT_RECORDS: usize = 10;
/// Standard errors of slack granted to the fitted slowness in
/// [`check_bound`].
pub const DOMINATION_SIGMAS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveBin {
    pub distance_center: f64,
    pub mean_time: f64,
    /// Sample standard deviation over `√count`; 0 for a single sample.
    pub std_error: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationCurve {
    pub bins: Vec<CurveBin>,
    pub bin_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    /// Fitted slowness, time per unit distance.
    pub slope: f64,
    pub intercept: f64,
    pub slope_std_error: f64,
    pub r_squared: f64,
    pub n: usize,
    pub fit_window: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub theoretical_slowness: f64,
    pub fitted_slowness: f64,
    pub stderr: f64,
    pub margin: f64,
    pub pass: bool,
}

impl DominationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{}: fitted slowness {:.6} ± {:.6} vs theoretical {:.6} (margin {:+.6})",
            if self.pass { "PASS" } else { "FAIL" },
            self.fitted_slowness,
            self.stderr,
            self.theoretical_slowness,
            self.margin
        )
    }
}

/// Groups records into distance bins `[k w, (k+1) w)` and reports the
/// mean reception time per bin.
pub fn build_curve(records: &[InfectionRecord], bin_width: f64) -> Result<PropagationCurve> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::stats(format!(
            "bin width must be > 0, got {bin_width}"
        )));
    }
    let mut groups: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for r in records {
        let k = (r.distance / bin_width).floor() as i64;
        groups.entry(k).or_default().push(r.infection_time);
    }
    let bins = groups
        .into_iter()
        .map(|(k, times)| {
            let count = times.len();
            let mean = times.iter().sum::<f64>() / count as f64;
            let std_error = if count > 1 {
                let var =
                    times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
                (var / count as f64).sqrt()
            } else {
                0.0
            };
            CurveBin {
                distance_center: (k as f64 + 0.5) * bin_width,
                mean_time: mean,
                std_error,
                count,
            }
        })
        .collect();
    Ok(PropagationCurve { bins, bin_width })
}

struct Ols {
    slope: f64,
    intercept: f64,
    slope_std_error: f64,
    r_squared: f64,
}

fn ols(points: &[(f64, f64)]) -> Result<Ols> {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if !(sxx > 0.0) {
        return Err(Error::stats(
            "all points share one distance; slope undefined",
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr: f64 = points
        .iter()
        .map(|&(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let slope_std_error = if points.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r_squared = if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 };
    Ok(Ols {
        slope,
        intercept,
        slope_std_error,
        r_squared,
    })
}

/// Least-squares line of reception time on distance over records at
/// distance `>= d_min`.
pub fn fit_slope(records: &[InfectionRecord], d_min: f64) -> Result<SlopeFit> {
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.distance >= d_min)
        .map(|r| (r.distance, r.infection_time))
        .collect();
    if points.len() < MIN_FIT_RECORDS {
        return Err(Error::stats(format!(
            "need at least {MIN_FIT_RECORDS} records with distance >= {d_min}, have {}",
            points.len()
        )));
    }
    let fit = ols(&points)?;
    let d_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(SlopeFit {
        slope: fit.slope,
        intercept: fit.intercept,
        slope_std_error: fit.slope_std_error,
        r_squared: fit.r_squared,
        n: points.len(),
        fit_window: (d_min, d_max),
    })
}

impl PropagationCurve {
    /// Unweighted least-squares line through the bin means whose centre
    /// is at or beyond `d_min`.
    pub fn linear_fit(&self, d_min: f64) -> Result<SlopeFit> {
        let points: Vec<(f64, f64)> = self
            .bins
            .iter()
            .filter(|b| b.distance_center >= d_min)
            .map(|b| (b.distance_center, b.mean_time))
            .collect();
        if points.len() < 3 {
            return Err(Error::stats(format!(
                "need at least 3 bins beyond {d_min}, have {}",
                points.len()
            )));
        }
        let fit = ols(&points)?;
        Ok(SlopeFit {
            slope: fit.slope,
            intercept: fit.intercept,
            slope_std_error: fit.slope_std_error,
            r_squared: fit.r_squared,
            n: points.len(),
            fit_window: (d_min, points.last().map_or(d_min, |p| p.0)),
        })
    }

    pub fn total_count(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }
}

/// Compares a fitted slowness against the theoretical lower bound
/// `1/speed`. Passes when `fitted + 2·stderr >= theoretical`.
pub fn check_bound(fit: &SlopeFit, bound: &SpeedBound) -> DominationReport {
    let theoretical = match bound.status {
        BoundStatus::Unbounded => 0.0,
        _ => bound.slowness,
    };
    DominationReport {
        theoretical_slowness: theoretical,
        fitted_slowness: fit.slope,
        stderr: fit.slope_std_error,
        margin: fit.slope - theoretical,
        pass: fit.slope + DOMINATION_SIGMAS * fit.slope_std_error >= theoretical,
    }
}
