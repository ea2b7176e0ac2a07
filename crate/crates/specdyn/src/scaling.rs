//! Finite-data surrogates for liminf/limsup scaling exponents.
//!
//! Every lower/upper exponent in this crate (dimension estimates, transport
//! exponents) is produced by the same convention: least-squares slopes over
//! sliding sub-windows of the log-log data, with the minimum standing in for
//! the liminf and the maximum for the limsup.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of points in each sliding regression sub-window.
pub const SUBWINDOW: usize = 6;

/// A log-log scaling fit over a window of the data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingFit {
    /// ln(scale) values (ln eps or ln t), ascending.
    pub abscissae: Vec<f64>,
    /// ln(value) at each abscissa.
    pub ordinates: Vec<f64>,
    /// Half-open index range `[start, end)` of the points used.
    pub window: (usize, usize),
    /// Minimum over sliding sub-window slopes (liminf surrogate).
    pub lower_slope: f64,
    /// Maximum over sliding sub-window slopes (limsup surrogate).
    pub upper_slope: f64,
    /// Single least-squares slope over the whole window.
    pub global_slope: f64,
    /// RMS residual of the single global fit over the window.
    pub residual: f64,
}

impl ScalingFit {
    /// Fit the windowed data. `lower_slope`/`upper_slope` are the extremes of
    /// local least-squares slopes over sliding sub-windows of [`SUBWINDOW`]
    /// points (or all points, if fewer are available).
    pub fn from_log_data(
        abscissae: Vec<f64>,
        ordinates: Vec<f64>,
        window: (usize, usize),
    ) -> Result<Self> {
        let (start, end) = window;
        assert_eq!(abscissae.len(), ordinates.len());
        assert!(start <= end && end <= abscissae.len());
        let n = end - start;
        if n < 4 {
            return Err(Error::DegenerateWindow {
                surviving: n,
                needed: 4,
            });
        }
        let xs = &abscissae[start..end];
        let ys = &ordinates[start..end];
        let sub = SUBWINDOW.min(n);
        let mut lower = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        for i in 0..=(n - sub) {
            let s = lsq_slope(&xs[i..i + sub], &ys[i..i + sub]);
            lower = lower.min(s);
            upper = upper.max(s);
        }
        let (global, intercept) = lsq_line(xs, ys);
        let residual = (xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let r = y - (global * x + intercept);
                r * r
            })
            .sum::<f64>()
            / n as f64)
            .sqrt();
        Ok(ScalingFit {
            abscissae,
            ordinates,
            window,
            lower_slope: lower,
            upper_slope: upper,
            global_slope: global,
            residual,
        })
    }

    /// Apply a monotone transform to all slope surrogates, swapping the
    /// bounds if the transform reverses order (e.g. division by `q - 1 < 0`).
    pub fn map_slopes(mut self, f: impl Fn(f64) -> f64) -> Self {
        let a = f(self.lower_slope);
        let b = f(self.upper_slope);
        self.lower_slope = a.min(b);
        self.upper_slope = a.max(b);
        self.global_slope = f(self.global_slope);
        self
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn lsq_slope(xs: &[f64], ys: &[f64]) -> f64 {
    lsq_line(xs, ys).0
}

/// Least-squares line `(slope, intercept)`.
pub fn lsq_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Geometric grid from `hi` down-sampled by `ratio < 1` until below `lo`,
/// returned ascending.
pub fn geometric_grid(lo: f64, hi: f64, ratio: f64) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && ratio > 0.0 && ratio < 1.0);
    let mut grid = Vec::new();
    let mut s = hi;
    while s >= lo {
        grid.push(s);
        s *= ratio;
    }
    grid.reverse();
    grid
}

/// Log-spaced grid with `per_decade` points per decade, ascending, inclusive
/// of both endpoints.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && per_decade > 0);
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    (0..=n)
        .map(|i| lo * 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

/// Indices `[start, end)` of grid entries inside `[lo, hi]`.
pub fn window_indices(grid: &[f64], lo: f64, hi: f64) -> (usize, usize) {
    let start = grid.partition_point(|&s| s < lo);
    let end = grid.partition_point(|&s| s <= hi);
    (start, end)
}
