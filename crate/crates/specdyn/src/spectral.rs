//! Spectral measures, spectral projections, and functional calculus for a
//! diagonalized finite Hamiltonian.

use serde::{Deserialize, Serialize};

use crate::eigen::EigenSystem;
use crate::error::{Error, Result};
use crate::measure::PointMeasure;

pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Spectral measure of `xi`: atoms (lambda_j, |<e_j, xi>|^2). Degenerate
/// eigenvalues merge into a single atom. `xi` must be a unit vector.
pub fn spectral_measure(eig: &EigenSystem, xi: &[f64]) -> Result<PointMeasure> {
    let norm = xi.iter().map(|&x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized {
            deviation: (norm - 1.0).abs(),
        });
    }
    let coeffs = eig.coefficients(xi);
    spectral_measure_from_coefficients(eig.eigenvalues(), &coeffs)
}

/// Spectral measure directly from eigenbasis coefficients; used both by
/// [`spectral_measure`] and by constructions that live natively in the
/// eigenbasis.
pub fn spectral_measure_from_coefficients(
    eigenvalues: &[f64],
    coeffs: &[f64],
) -> Result<PointMeasure> {
    assert_eq!(eigenvalues.len(), coeffs.len());
    PointMeasure::new(
        eigenvalues
            .iter()
            .zip(coeffs)
            .map(|(&l, &c)| (l, c * c))
            .collect(),
    )
}

/// Result of projecting onto a spectral interval.
#[derive(Debug, Clone)]
pub struct Projection {
    pub vector: Vec<f64>,
    /// Number of eigenvalues inside the interval; 0 means the projection is
    /// empty and `vector` is zero.
    pub eigencount: usize,
}

/// P^T([a,b]) xi = sum over lambda_j in [a,b] of <e_j, xi> e_j.
pub fn spectral_project(eig: &EigenSystem, interval: (f64, f64), xi: &[f64]) -> Result<Projection> {
    let (a, b) = interval;
    if !(a < b) {
        return Err(Error::Domain(format!("interval [{a}, {b}] must have a < b")));
    }
    let mut coeffs = eig.coefficients(xi);
    let mut count = 0usize;
    for (c, &l) in coeffs.iter_mut().zip(eig.eigenvalues()) {
        if l >= a && l <= b {
            count += 1;
        } else {
            *c = 0.0;
        }
    }
    Ok(Projection {
        vector: eig.synthesize(&coeffs),
        eigencount: count,
    })
}

/// Scalar function applied through the functional calculus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// Smooth compactly supported bump: 0 outside `support`, exactly 1 on
    /// `plateau`, C-infinity joins in between.
    Bump {
        support: (f64, f64),
        plateau: (f64, f64),
    },
    /// Sharp indicator of an interval.
    Indicator { interval: (f64, f64) },
}

impl FunctionSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FunctionSpec::Bump {
                support: (a, b),
                plateau: (a2, b2),
            } => {
                if !(a <= a2 && a2 < b2 && b2 <= b) {
                    return Err(Error::Domain(format!(
                        "bump needs support ({a},{b}) enclosing plateau ({a2},{b2})"
                    )));
                }
                Ok(())
            }
            FunctionSpec::Indicator { interval: (a, b) } => {
                if !(a < b) {
                    return Err(Error::Domain("indicator interval must have a < b".into()));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            FunctionSpec::Bump {
                support: (a, b),
                plateau: (a2, b2),
            } => {
                if x <= a || x >= b {
                    0.0
                } else if x >= a2 && x <= b2 {
                    1.0
                } else if x < a2 {
                    smoothstep((x - a) / (a2 - a))
                } else {
                    smoothstep((b - x) / (b - b2))
                }
            }
            FunctionSpec::Indicator { interval: (a, b) } => {
                if x >= a && x <= b {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// C-infinity step: 0 at u<=0, 1 at u>=1, built from exp(-1/u).
fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let s = (-1.0 / u).exp();
    let t = (-1.0 / (1.0 - u)).exp();
    s / (s + t)
}

/// f(T) xi = sum_j f(lambda_j) <e_j, xi> e_j.
pub fn apply_function(eig: &EigenSystem, f: &FunctionSpec, xi: &[f64]) -> Result<Vec<f64>> {
    f.validate()?;
    let mut coeffs = eig.coefficients(xi);
    for (c, &l) in coeffs.iter_mut().zip(eig.eigenvalues()) {
        *c *= f.eval(l);
    }
    Ok(eig.synthesize(&coeffs))
}
