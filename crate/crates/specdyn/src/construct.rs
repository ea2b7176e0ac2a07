//! Explicit vector families with prescribed dimension or transport
//! behavior, built as eigenbasis coefficient vectors.
//!
//! Working in coefficients (rather than site-basis columns) lets the
//! constructions run against synthetic dense spectra far beyond any
//! materializable eigenvector matrix; the spectral measure of a coefficient
//! vector is available directly through
//! [`crate::spectral::spectral_measure_from_coefficients`].

use serde::{Deserialize, Serialize};

use crate::dynamics::IndexMap;
use crate::error::{Error, Result};
use crate::spacing::SpacingWitness;

/// Predicted dimension lower bound of the high-dim family:
/// t_{n,q} = (1 - (1+1/n) q) / ((1-q)(1+1/n)).
pub fn t_nq(n: u32, q: f64) -> f64 {
    let r = 1.0 + 1.0 / n as f64;
    (1.0 - r * q) / ((1.0 - q) * r)
}

/// Declarative description of a constructed vector, persisted next to the
/// resulting coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstructionSpec {
    /// head coefficients + tail b_j = j^{-s/2}; needs s*q > 1
    LowDim {
        head: Vec<f64>,
        tail_exponent: f64,
        q_target: f64,
    },
    /// head on the first k eigenvectors + tail l^{-(1+1/n)/2} along a
    /// weakly-spaced witness with alpha = 1/n
    HighDim { n: u32, head: Vec<f64>, q_target: f64 },
    /// head inside |n| <= cutoff + tail |n|^{-(p+1)/2} outside
    DivergentMoment { p: f64, cutoff: usize },
}

fn normalize(v: &mut [f64]) -> Result<()> {
    let norm = v.iter().map(|&x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InvalidConstruction(
            "constructed vector has zero or non-finite norm".into(),
        ));
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    Ok(())
}

/// Low-dimension family: coefficients (a_1..a_k, b_{k+1}, b_{k+2}, ...)
/// with b_j = j^{-s/2}, truncated at the ambient size and normalized.
/// The 2q-summability s*q > 1 makes every partition sum of the resulting
/// spectral measure bounded by sum |a|^{2q} + sum |b|^{2q} uniformly in eps,
/// which pins the dimension estimate to zero.
pub fn build_low_dim_vector(
    ambient: usize,
    head: &[f64],
    tail_exponent: f64,
    q_target: f64,
) -> Result<Vec<f64>> {
    if !(q_target > 0.0 && q_target < 1.0) {
        return Err(Error::Domain(format!("q must lie in (0,1), got {q_target}")));
    }
    let product = tail_exponent * q_target;
    if product <= 1.0 {
        return Err(Error::SummabilityViolated { product });
    }
    if head.len() > ambient {
        return Err(Error::DimensionMismatch {
            expected: ambient,
            got: head.len(),
        });
    }
    let mut c = vec![0.0; ambient];
    c[..head.len()].copy_from_slice(head);
    for (i, x) in c.iter_mut().enumerate().skip(head.len()) {
        // 1-based tail index
        *x = ((i + 1) as f64).powf(-0.5 * tail_exponent);
    }
    normalize(&mut c)?;
    Ok(c)
}

/// The scale-free partition-sum bound sum_j |c_j|^{2q} of a coefficient
/// vector; every S(q, eps) of its spectral measure is at most this.
pub fn partition_sum_bound(coefficients: &[f64], q: f64) -> f64 {
    coefficients
        .iter()
        .filter(|c| **c != 0.0)
        .map(|&c| (c * c).powf(q))
        .sum()
}

/// High-dimension family: head on eigenvector indices 0..k, tail
/// coefficient l^{-(1+1/n)/2} on the witnessed eigenvector j_l for every
/// witnessed level l. Requires n > q/(1-q), witness alpha = 1/n, and head
/// indices disjoint from the witness indices.
pub fn build_high_dim_vector(
    ambient: usize,
    witness: &SpacingWitness,
    n: u32,
    head: &[f64],
    q_target: f64,
    min_depth: usize,
) -> Result<Vec<f64>> {
    if !(q_target > 0.0 && q_target < 1.0) {
        return Err(Error::Domain(format!("q must lie in (0,1), got {q_target}")));
    }
    if (n as f64) <= q_target / (1.0 - q_target) {
        return Err(Error::InvalidConstruction(format!(
            "n = {n} must exceed q/(1-q) = {}",
            q_target / (1.0 - q_target)
        )));
    }
    let alpha = 1.0 / n as f64;
    if (witness.alpha - alpha).abs() > 1e-12 * alpha {
        return Err(Error::InvalidConstruction(format!(
            "witness alpha {} does not match 1/n = {alpha}",
            witness.alpha
        )));
    }
    if witness.depth() < min_depth {
        return Err(Error::WitnessTooShallow {
            depth: witness.depth(),
            needed: min_depth,
        });
    }
    let k = head.len();
    if witness.indices.iter().any(|&j| j < k) {
        return Err(Error::InvalidConstruction(
            "head indices overlap the witness indices; raise the witness range".into(),
        ));
    }
    if witness.indices.iter().any(|&j| j >= ambient) {
        return Err(Error::DimensionMismatch {
            expected: ambient,
            got: *witness.indices.iter().max().unwrap() + 1,
        });
    }
    let exponent = -0.5 * (1.0 + alpha);
    let mut c = vec![0.0; ambient];
    c[..k].copy_from_slice(head);
    for (&level, &j) in witness.levels.iter().zip(&witness.indices) {
        c[j] = (level as f64).powf(exponent);
    }
    normalize(&mut c)?;
    Ok(c)
}

/// Construction-matched scale grid eps_m = |lambda_{j_m} - lambda_{j_{m+1}}|/2
/// over the witnessed levels, descending. At eps_m every witnessed atom with
/// level <= m is isolated from the other witnessed atoms.
pub fn construction_scale_grid(witness: &SpacingWitness, eigenvalues: &[f64]) -> Result<Vec<f64>> {
    if witness.indices.iter().any(|&j| j >= eigenvalues.len()) {
        return Err(Error::DimensionMismatch {
            expected: eigenvalues.len(),
            got: *witness.indices.iter().max().unwrap() + 1,
        });
    }
    let vals: Vec<f64> = witness.indices.iter().map(|&j| eigenvalues[j]).collect();
    let mut eps = Vec::with_capacity(vals.len().saturating_sub(1));
    for w in vals.windows(2) {
        let gap = w[0] - w[1];
        if !(gap > 0.0) {
            return Err(Error::InvalidConstruction(
                "witness values not strictly decreasing over these eigenvalues".into(),
            ));
        }
        eps.push(0.5 * gap);
    }
    Ok(eps)
}

/// Divergent-moment family: keep the head coefficients on |label| <= cutoff,
/// put |label|^{-(p+1)/2} on every site with |label| > cutoff, normalize.
pub fn build_divergent_moment_vector(
    map: &IndexMap,
    p: f64,
    cutoff: usize,
    head: &[f64],
) -> Result<Vec<f64>> {
    let n = map.len();
    if head.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: head.len(),
        });
    }
    if !(p > 0.0) {
        return Err(Error::Domain(format!("p must be positive, got {p}")));
    }
    let max_label = (0..n).map(|s| map.label(s).unsigned_abs()).max().unwrap_or(0);
    if 2 * cutoff as u64 >= max_label {
        return Err(Error::Domain(format!(
            "cutoff {cutoff} leaves no tail inside the label range +-{max_label}"
        )));
    }
    let mut v = vec![0.0; n];
    for site in 0..n {
        let a = map.label(site).unsigned_abs();
        v[site] = if a <= cutoff as u64 {
            head[site]
        } else {
            (a as f64).powf(-0.5 * (p + 1.0))
        };
    }
    normalize(&mut v)?;
    Ok(v)
}

/// Partial p-moment sum over |label| <= m: sum |n|^p |xi_n|^2. For the
/// divergent-moment family this grows like (2/norm^2) ln(m / cutoff).
pub fn partial_moment_sum(xi: &[f64], map: &IndexMap, p: f64, m: usize) -> f64 {
    assert_eq!(xi.len(), map.len());
    let mut sum = 0.0;
    for (site, &x) in xi.iter().enumerate() {
        let a = map.label(site).unsigned_abs();
        if a == 0 || a > m as u64 {
            continue;
        }
        sum += (a as f64).powf(p) * x * x;
    }
    sum
}
