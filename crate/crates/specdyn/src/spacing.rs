//! Weakly-spaced subsequences: the checkable spacing predicate, the
//! constructive selection of a witnessed subsequence from a dense point set,
//! and an independent verifier.
//!
//! A decreasing subsequence a_{j_1} > a_{j_2} > ... is weakly spaced for
//! exponent alpha when its gaps g_l = a_{j_l} - a_{j_{l+1}} vanish
//! monotonically while staying above C_alpha / l^{1+alpha}. The selection
//! targets b_l = a + 1/l^alpha and picks one input point per window
//! [b_l, b_l + min{K_l/2, alpha/(4 l^{1+alpha})}], which certifies
//! alpha/(2 l^{1+alpha}) <= g_l <= 2 alpha / l^{1+alpha}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaling;

/// Slack of the spacing inequality (x/(x-1))^alpha + (x/(x+1))^alpha > 2.
pub fn ws1_margin(x: f64, alpha: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("ws1_margin needs x > 1, got {x}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "ws1_margin needs alpha > 0, got {alpha}"
        )));
    }
    Ok((x / (x - 1.0)).powf(alpha) + (x / (x + 1.0)).powf(alpha) - 2.0)
}

/// Certified weakly-spaced subsequence of a source point set.
///
/// `levels[i]` is the target level l, `indices[i]` the source index of the
/// point chosen for that level (values decrease as l grows), and `gaps[i]`
/// the gap between levels `levels[i]` and `levels[i] + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingWitness {
    pub alpha: f64,
    /// certified lower-bound constant, alpha/2 for the constructive selection
    pub c_alpha: f64,
    /// level from which monotonicity and both gap bounds hold onward
    pub l0: usize,
    pub levels: Vec<usize>,
    pub indices: Vec<usize>,
    pub gaps: Vec<f64>,
}

impl SpacingWitness {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serialization cannot fail")
    }

    pub fn from_json(input: &str) -> Result<Self> {
        let w: SpacingWitness =
            serde_json::from_str(input).map_err(|e| Error::Parse(e.to_string()))?;
        if w.levels.len() != w.indices.len() || w.gaps.len() + 1 != w.levels.len().max(1) {
            return Err(Error::Parse("witness: inconsistent field lengths".into()));
        }
        if !(w.alpha > 0.0 && w.alpha.is_finite()) || !(w.c_alpha > 0.0 && w.c_alpha.is_finite()) {
            return Err(Error::Parse("witness: alpha and c_alpha must be positive".into()));
        }
        if w.gaps.iter().any(|g| !g.is_finite()) {
            return Err(Error::Parse("witness: non-finite gap".into()));
        }
        if w.levels.windows(2).any(|p| p[1] != p[0] + 1) {
            return Err(Error::Parse("witness: levels must be consecutive".into()));
        }
        Ok(w)
    }
}

fn target(a: f64, l: usize, alpha: f64) -> f64 {
    a + (l as f64).powf(-alpha)
}

/// Window width at level l: min{K_l/2, alpha/(4 l^{1+alpha})} where
/// K_l = b_{l-1} - 2 b_l + b_{l+1} is the positive second difference.
fn window_width(l: usize, alpha: f64) -> f64 {
    let b = |m: usize| (m as f64).powf(-alpha);
    let k_l = b(l - 1) - 2.0 * b(l) + b(l + 1);
    (0.5 * k_l).min(0.25 * alpha * (l as f64).powf(-(1.0 + alpha)))
}

/// Select a weakly-spaced subsequence of depth `depth` (number of levels)
/// from `points`. Levels start at the smallest l >= 2 whose target
/// b_l = min + 1/l^alpha lies inside the point range; an empty target window
/// at any requested level is an error (the input is not dense at that
/// scale). Ties inside a window go to the smallest value, then the smallest
/// source index.
pub fn select_weakly_spaced(points: &[f64], alpha: f64, depth: usize) -> Result<SpacingWitness> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if depth < 2 {
        return Err(Error::Domain("witness needs depth >= 2".into()));
    }
    if points.len() < 2 {
        return Err(Error::WindowEmpty {
            level: 2,
            width: 0.0,
        });
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::Domain("points must be finite".into()));
    }
    // sort indices by value, keeping source positions (stable: ties keep
    // the smaller source index first)
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| points[i].total_cmp(&points[j]));
    let sorted: Vec<f64> = order.iter().map(|&i| points[i]).collect();
    let a = sorted[0];
    let b = *sorted.last().unwrap();

    // first level with b_l strictly inside the range (K_l needs l >= 2)
    let mut l_start = 2usize;
    while target(a, l_start, alpha) >= b {
        l_start += 1;
        if l_start > 1_000_000 {
            return Err(Error::Domain(
                "point range too narrow for any target level".into(),
            ));
        }
    }

    let mut levels = Vec::with_capacity(depth);
    let mut indices = Vec::with_capacity(depth);
    let mut chosen = Vec::with_capacity(depth);
    for l in l_start..l_start + depth {
        let lo = target(a, l, alpha);
        let width = window_width(l, alpha);
        let i = sorted.partition_point(|&p| p < lo);
        if i >= sorted.len() || sorted[i] > lo + width {
            return Err(Error::WindowEmpty { level: l, width });
        }
        levels.push(l);
        indices.push(order[i]);
        chosen.push(sorted[i]);
    }
    let gaps: Vec<f64> = chosen.windows(2).map(|w| w[0] - w[1]).collect();
    let c_alpha = 0.5 * alpha;
    let l0 = certified_from(&levels, &gaps, alpha, c_alpha)
        .ok_or_else(|| Error::InvalidConstruction("no level certifies the gap bounds".into()))?;
    Ok(SpacingWitness {
        alpha,
        c_alpha,
        l0,
        levels,
        indices,
        gaps,
    })
}

/// Smallest witnessed level from which every later gap is positive,
/// nonincreasing, and inside [c_alpha/l^{1+a}, 2 alpha/l^{1+a}].
fn certified_from(levels: &[usize], gaps: &[f64], alpha: f64, c_alpha: f64) -> Option<usize> {
    let good = |i: usize| {
        let l = levels[i] as f64;
        let g = gaps[i];
        g > 0.0
            && g >= c_alpha * l.powf(-(1.0 + alpha))
            && g <= 2.0 * alpha * l.powf(-(1.0 + alpha))
            && (i + 1 >= gaps.len() || gaps[i + 1] <= g)
    };
    // scan backwards for the longest certified suffix
    let mut first_bad = None;
    for i in (0..gaps.len()).rev() {
        if !good(i) {
            first_bad = Some(i);
            break;
        }
    }
    match first_bad {
        None => Some(levels[0]),
        Some(i) if i + 1 < gaps.len() => Some(levels[i + 1]),
        Some(_) => None,
    }
}

/// Independently re-check every invariant of a witness against the source
/// points: valid indices, strictly decreasing selected values, positive
/// gaps, monotone vanishing gaps from L0, and both certified gap bounds
/// from L0 on.
pub fn verify_weakly_spaced(points: &[f64], witness: &SpacingWitness) -> bool {
    let w = witness;
    if w.levels.len() < 2
        || w.levels.len() != w.indices.len()
        || w.gaps.len() + 1 != w.levels.len()
        || !(w.alpha > 0.0)
        || !(w.c_alpha > 0.0)
    {
        return false;
    }
    if w.levels.windows(2).any(|p| p[1] != p[0] + 1) {
        return false;
    }
    if w.indices.iter().any(|&i| i >= points.len()) {
        return false;
    }
    let vals: Vec<f64> = w.indices.iter().map(|&i| points[i]).collect();
    // gaps as recorded, and positivity / strict decrease of the subsequence
    for (i, pair) in vals.windows(2).enumerate() {
        let g = pair[0] - pair[1];
        if !(g > 0.0) || (g - w.gaps[i]).abs() > 1e-12 * g.max(1.0) {
            return false;
        }
    }
    // finite surrogate of g_l -> 0
    if !(w.gaps[w.gaps.len() - 1] < w.gaps[0] / 10.0) {
        return false;
    }
    for (i, &g) in w.gaps.iter().enumerate() {
        let l = w.levels[i];
        if l < w.l0 {
            continue;
        }
        let lf = l as f64;
        if g < w.c_alpha * lf.powf(-(1.0 + w.alpha)) {
            return false;
        }
        if g > 2.0 * w.alpha * lf.powf(-(1.0 + w.alpha)) {
            return false;
        }
        if i + 1 < w.gaps.len() && w.gaps[i + 1] > g {
            return false;
        }
    }
    true
}

/// Nearest-neighbor gap summary of a sorted value list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapReport {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    /// least-squares exponent of sorted-descending gaps against rank;
    /// a candidate-alpha diagnostic (weakly spaced at alpha needs gap
    /// decay no faster than rank^{-(1+alpha)})
    pub rank_exponent: f64,
}

pub fn gap_statistics(sorted_values: &[f64]) -> Result<GapReport> {
    if sorted_values.len() < 3 {
        return Err(Error::Domain("gap statistics need at least 3 values".into()));
    }
    if sorted_values.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("values must be sorted ascending".into()));
    }
    let gaps: Vec<f64> = sorted_values.windows(2).map(|w| w[1] - w[0]).collect();
    let min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let max = gaps.iter().copied().fold(0.0, f64::max);
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let mut desc = gaps.clone();
    desc.sort_by(|a, b| b.total_cmp(a));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (rank, &g) in desc.iter().enumerate() {
        if g > 0.0 {
            xs.push(((rank + 1) as f64).ln());
            ys.push(g.ln());
        }
    }
    let rank_exponent = if xs.len() >= 2 {
        scaling::lsq_slope(&xs, &ys)
    } else {
        f64::NAN
    };
    Ok(GapReport {
        min,
        mean,
        max,
        rank_exponent,
    })
}
