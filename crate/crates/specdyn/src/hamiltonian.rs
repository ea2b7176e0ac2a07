//! Finite-volume lattice Hamiltonians: free Laplacian, Anderson disorder,
//! Stark ramp, and limit-periodic potentials, all truncated with Dirichlet
//! boundary conditions to symmetric tridiagonal matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// On-site disorder distribution (only uniform is supported).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    #[default]
    Uniform,
}

/// Model family with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelFamily {
    /// Zero potential, hopping 1.
    Free,
    /// I.i.d. uniform potential on [-coupling, coupling], seeded per site.
    Anderson {
        coupling: f64,
        #[serde(default)]
        distribution: Distribution,
        seed: u64,
    },
    /// Linear ramp field * n plus an optional bounded background potential,
    /// cycled over the lattice.
    Stark {
        field: f64,
        #[serde(default)]
        background: Vec<f64>,
    },
    /// Hopping `hopping`, potential sum_m c_m cos(2 pi n / 2^m).
    LimitPeriodic {
        hopping: f64,
        #[serde(default = "default_lp_coefficients")]
        coefficients: Vec<f64>,
    },
}

fn default_lp_coefficients() -> Vec<f64> {
    (1..=8).map(|m| 0.25f64.powi(m)).collect()
}

/// Declarative description of a finite-volume lattice Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub family: ModelFamily,
    pub size: usize,
    /// Site index (0-based) mapped to lattice label n = 0. Defaults to
    /// size/2, making labels near-symmetric about 0.
    #[serde(default)]
    pub index_origin: Option<usize>,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.size < 2 {
            return Err(Error::Domain(format!("size {} must be >= 2", self.size)));
        }
        match &self.family {
            ModelFamily::Anderson { coupling, .. } if !(*coupling > 0.0) => Err(Error::Domain(
                format!("Anderson coupling {coupling} must be positive"),
            )),
            ModelFamily::LimitPeriodic { hopping, .. } if !(*hopping > 0.0) => Err(Error::Domain(
                format!("limit-periodic hopping {hopping} must be positive"),
            )),
            ModelFamily::Stark { field, background } => {
                if !field.is_finite() {
                    return Err(Error::Domain("Stark field must be finite".into()));
                }
                if background.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Domain("Stark background must be bounded".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn origin(&self) -> usize {
        self.index_origin.unwrap_or(self.size / 2)
    }

    /// Lattice label of a site: n(site) = site - origin.
    pub fn label(&self, site: usize) -> i64 {
        site as i64 - self.origin() as i64
    }
}

/// Symmetric tridiagonal matrix: main diagonal and one off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    pub diagonal: Vec<f64>,
    pub offdiagonal: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn size(&self) -> usize {
        self.diagonal.len()
    }

    /// y = T x
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.size();
        assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diagonal[i] * x[i];
            if i > 0 {
                v += self.offdiagonal[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.offdiagonal[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }

    /// Gershgorin bound on the spectral range.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.size();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.offdiagonal[i - 1].abs();
            }
            if i + 1 < n {
                r += self.offdiagonal[i].abs();
            }
            lo = lo.min(self.diagonal[i] - r);
            hi = hi.max(self.diagonal[i] + r);
        }
        (lo, hi)
    }
}

/// splitmix64 mixing step.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based per-site noise in [0, 1), keyed by (seed, site label).
/// Stateless, so disorder sweeps parallelize without sequencing artifacts.
pub fn site_uniform(seed: u64, site: i64) -> f64 {
    let mixed = splitmix64(seed ^ splitmix64(site as u64));
    (mixed >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Build the finite-volume Hamiltonian for `spec`. Dirichlet boundary:
/// hopping across the edges is simply dropped.
pub fn build_hamiltonian(spec: &ModelSpec) -> Result<TridiagonalMatrix> {
    spec.validate()?;
    let n = spec.size;
    let mut diagonal = vec![0.0; n];
    let mut hop = 1.0;
    match &spec.family {
        ModelFamily::Free => {}
        ModelFamily::Anderson {
            coupling,
            distribution: Distribution::Uniform,
            seed,
        } => {
            for (site, d) in diagonal.iter_mut().enumerate() {
                *d = coupling * (2.0 * site_uniform(*seed, spec.label(site)) - 1.0);
            }
        }
        ModelFamily::Stark { field, background } => {
            for (site, d) in diagonal.iter_mut().enumerate() {
                let lbl = spec.label(site);
                let v = if background.is_empty() {
                    0.0
                } else {
                    background[lbl.rem_euclid(background.len() as i64) as usize]
                };
                *d = field * lbl as f64 + v;
            }
        }
        ModelFamily::LimitPeriodic {
            hopping,
            coefficients,
        } => {
            hop = *hopping;
            for (site, d) in diagonal.iter_mut().enumerate() {
                let lbl = spec.label(site) as f64;
                *d = coefficients
                    .iter()
                    .enumerate()
                    .map(|(m, c)| c * (std::f64::consts::TAU * lbl / 2f64.powi(m as i32 + 1)).cos())
                    .sum();
            }
        }
    }
    Ok(TridiagonalMatrix {
        diagonal,
        offdiagonal: vec![hop; n - 1],
    })
}
