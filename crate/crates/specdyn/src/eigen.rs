//! Full eigendecomposition of symmetric tridiagonal matrices.
//!
//! Eigenvalues by Sturm-sequence bisection (bracket queue, so work is shared
//! while brackets still hold several eigenvalues), eigenvectors by inverse
//! iteration with Gram-Schmidt reorthogonalization inside tight clusters.

use crate::error::{Error, Result};
use crate::hamiltonian::{splitmix64, TridiagonalMatrix};

/// Eigenvectors are reorthogonalized against all predecessors whose
/// eigenvalue lies within this fraction of the spectral scale. Pairs
/// farther apart are orthogonal to ~residual/gap <= 1e-12 automatically.
const ORTHO_REL_WINDOW: f64 = 1e-3;
/// Residual contract: ||T v - lambda v|| <= RESIDUAL_TOL * (1 + |lambda|).
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Sorted eigenvalues and row-major orthonormal eigenvectors
/// (`vector[site * n + j]` is component `site` of eigenvector `j`).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    n: usize,
    eigenvalues: Vec<f64>,
    vectors: Vec<f64>,
}

impl EigenSystem {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Row of the eigenvector matrix: components of all eigenvectors at `site`.
    pub fn site_row(&self, site: usize) -> &[f64] {
        &self.vectors[site * self.n..(site + 1) * self.n]
    }

    pub fn component(&self, site: usize, j: usize) -> f64 {
        self.vectors[site * self.n + j]
    }

    pub fn eigenvector(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|s| self.component(s, j)).collect()
    }

    /// Eigenbasis coefficients c_j = <e_j, xi>.
    pub fn coefficients(&self, xi: &[f64]) -> Vec<f64> {
        assert_eq!(xi.len(), self.n);
        let mut c = vec![0.0; self.n];
        for (site, &x) in xi.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (cj, &v) in c.iter_mut().zip(self.site_row(site)) {
                *cj += v * x;
            }
        }
        c
    }

    /// Site-basis vector from eigenbasis coefficients: x = sum_j c_j e_j.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.n);
        let mut x = vec![0.0; self.n];
        for (site, xs) in x.iter_mut().enumerate() {
            let row = self.site_row(site);
            *xs = row.iter().zip(coeffs).map(|(&v, &c)| v * c).sum();
        }
        x
    }

    /// Max-norm departure from orthonormality, ||V^T V - I||_max.
    /// O(n^3); intended for tests at moderate sizes.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            let vi = self.eigenvector(i);
            for j in i..n {
                let dot: f64 = (0..n).map(|s| vi[s] * self.component(s, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    pub fn residual(&self, t: &TridiagonalMatrix, j: usize) -> f64 {
        let v = self.eigenvector(j);
        let tv = t.apply(&v);
        let lambda = self.eigenvalues[j];
        tv.iter()
            .zip(&v)
            .map(|(&a, &b)| {
                let r = a - lambda * b;
                r * r
            })
            .sum::<f64>()
            .sqrt()
    }

    // ---- binary cache --------------------------------------------------

    /// Little-endian blob: magic, version, n, key hash, eigenvalues, vectors.
    pub fn encode_cache(&self, key_hash: &[u8; 32]) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 32 + 8 * self.eigenvalues.len() + 8 * self.vectors.len());
        out.extend_from_slice(b"SDEI");
        out.extend_from_slice(&1u32.to_le_bytes());
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        out.extend_from_slice(key_hash);
        for &v in &self.eigenvalues {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for &v in &self.vectors {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Decode a cache blob; returns the system and the stored key hash.
    /// Safe on arbitrary input.
    pub fn decode_cache(data: &[u8]) -> Result<(Self, [u8; 32])> {
        let bad = |m: &str| Error::Parse(format!("eigensystem cache: {m}"));
        if data.len() < 48 {
            return Err(bad("truncated header"));
        }
        if &data[0..4] != b"SDEI" {
            return Err(bad("bad magic"));
        }
        let version = u32::from_le_bytes(data[4..8].try_into().unwrap());
        if version != 1 {
            return Err(bad("unsupported version"));
        }
        let n64 = u64::from_le_bytes(data[8..16].try_into().unwrap());
        let n = usize::try_from(n64).map_err(|_| bad("size overflow"))?;
        if !(2..=1usize << 20).contains(&n) {
            return Err(bad("size out of range"));
        }
        let mut hash = [0u8; 32];
        hash.copy_from_slice(&data[16..48]);
        let need = n
            .checked_mul(n)
            .and_then(|nn| nn.checked_add(n))
            .and_then(|w| w.checked_mul(8))
            .and_then(|b| b.checked_add(48))
            .ok_or_else(|| bad("size overflow"))?;
        if data.len() != need {
            return Err(bad("length mismatch"));
        }
        let mut floats = data[48..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        let eigenvalues: Vec<f64> = floats.by_ref().take(n).collect();
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(bad("non-finite eigenvalue"));
        }
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(bad("eigenvalues not sorted"));
        }
        let vectors: Vec<f64> = floats.collect();
        if vectors.iter().any(|v| !v.is_finite()) {
            return Err(bad("non-finite vector entry"));
        }
        Ok((
            EigenSystem {
                n,
                eigenvalues,
                vectors,
            },
            hash,
        ))
    }
}

/// Number of eigenvalues of `t` strictly below `x` (Sturm / LDL^T count).
fn sturm_count(t: &TridiagonalMatrix, x: f64) -> usize {
    let n = t.size();
    let mut count = 0usize;
    let mut q = t.diagonal[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let e = t.offdiagonal[i - 1];
        let q_safe = if q.abs() < f64::MIN_POSITIVE * 1e16 {
            if q >= 0.0 {
                f64::MIN_POSITIVE * 1e16
            } else {
                -f64::MIN_POSITIVE * 1e16
            }
        } else {
            q
        };
        q = (t.diagonal[i] - x) - e * e / q_safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues, ascending, by bracket-queue bisection.
pub fn eigenvalues(t: &TridiagonalMatrix) -> Vec<f64> {
    let n = t.size();
    let (glo, ghi) = t.gershgorin();
    let scale = glo.abs().max(ghi.abs()).max(1.0);
    let tol = 4.0 * f64::EPSILON * scale;
    let mut out = vec![0.0; n];
    // bracket: (lo, hi, klo, khi) holds eigenvalues klo..khi
    let mut queue = vec![(glo - tol, ghi + tol, 0usize, n)];
    while let Some((lo, hi, klo, khi)) = queue.pop() {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            for v in &mut out[klo..khi] {
                *v = mid;
            }
            continue;
        }
        let kmid = sturm_count(t, mid).clamp(klo, khi);
        if kmid > klo {
            queue.push((lo, mid, klo, kmid));
        }
        if kmid < khi {
            queue.push((mid, hi, kmid, khi));
        }
    }
    out
}

/// Factor (T - lambda I) with partial pivoting and solve in place.
/// Returns the solution of (T - lambda I) x = b.
struct ShiftedSolver {
    n: usize,
    // upper-triangular bands after elimination
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    l: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedSolver {
    fn factor(t: &TridiagonalMatrix, lambda: f64) -> Self {
        let n = t.size();
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut l = vec![0.0; n];
        let mut swapped = vec![false; n];
        for i in 0..n {
            u0[i] = t.diagonal[i] - lambda;
            if i + 1 < n {
                u1[i] = t.offdiagonal[i];
            }
        }
        // row below carries (sub, diag, super) = (e_i, d_{i+1}-lambda, e_{i+1})
        for i in 0..n - 1 {
            let e = t.offdiagonal[i];
            if e.abs() > u0[i].abs() {
                swapped[i] = true;
                let (d_next, e_next) = (u0[i + 1], u1[i + 1]);
                // swap row i with row i+1
                let (r0, r1, r2) = (e, d_next, e_next);
                let (s0, s1) = (u0[i], u1[i]);
                u0[i] = r0;
                u1[i] = r1;
                u2[i] = r2;
                let m = s0 / r0;
                l[i] = m;
                u0[i + 1] = s1 - m * r1;
                u1[i + 1] = -m * r2;
            } else {
                let pivot = if u0[i] == 0.0 {
                    f64::EPSILON * (t.diagonal[i].abs() + 1.0)
                } else {
                    u0[i]
                };
                u0[i] = pivot;
                let m = e / pivot;
                l[i] = m;
                u0[i + 1] -= m * u1[i];
                // u2[i] stays 0, u1[i+1] unchanged
            }
        }
        if u0[n - 1] == 0.0 {
            u0[n - 1] = f64::EPSILON * (t.diagonal[n - 1].abs() + 1.0);
        }
        ShiftedSolver {
            n,
            u0,
            u1,
            u2,
            l,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        // forward elimination with the recorded pivoting
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.l[i] * b[i];
        }
        // back substitution
        b[n - 1] /= self.u0[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.u1[n - 2] * b[n - 1]) / self.u0[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.u1[i] * b[i + 1] - self.u2[i] * b[i + 2]) / self.u0[i];
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|&x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

/// Full eigendecomposition satisfying the residual and orthonormality
/// contracts; sizes up to ~8192 run at desk scale.
pub fn eigensolve(t: &TridiagonalMatrix) -> Result<EigenSystem> {
    let n = t.size();
    let lambdas = eigenvalues(t);
    let scale = lambdas
        .iter()
        .fold(0.0f64, |a, &v| a.max(v.abs()))
        .max(1.0);
    let window = ORTHO_REL_WINDOW * scale;
    let sep = 2.0 * f64::EPSILON * scale;

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut shift_prev = f64::NEG_INFINITY;
    for (j, &lambda) in lambdas.iter().enumerate() {
        // separate numerically coincident shifts so inverse iteration can
        // pick distinct directions
        let shift = if lambda - shift_prev < sep {
            shift_prev + sep
        } else {
            lambda
        };
        shift_prev = shift;

        let solver = ShiftedSolver::factor(t, shift);
        let ortho_start = lambdas[..j].partition_point(|&l| l < lambda - window);
        let mut best_res = f64::INFINITY;
        for attempt in 0..3u64 {
            let mut v: Vec<f64> = (0..n)
                .map(|s| site_start_value(j + (attempt as usize) * n, s))
                .collect();
            normalize(&mut v);
            for _ in 0..6 {
                solver.solve(&mut v);
                let growth = normalize(&mut v);
                // growth ~ 1/|lambda - shift_error|; once it exceeds
                // 1/(eps*scale) the iterate is converged; one more solve
                // polishes the direction
                if growth > 0.1 / (f64::EPSILON * scale * n as f64) {
                    solver.solve(&mut v);
                    normalize(&mut v);
                    break;
                }
            }
            // reorthogonalize against spectrally nearby predecessors
            // (two classical Gram-Schmidt passes)
            for _ in 0..2 {
                for prev in &columns[ortho_start..j] {
                    let dot: f64 = prev.iter().zip(&v).map(|(&a, &b)| a * b).sum();
                    if dot != 0.0 {
                        for (x, &p) in v.iter_mut().zip(prev) {
                            *x -= dot * p;
                        }
                    }
                }
                if normalize(&mut v) == 0.0 {
                    break;
                }
            }
            let tv = t.apply(&v);
            let res = tv
                .iter()
                .zip(&v)
                .map(|(&a, &b)| {
                    let r = a - lambda * b;
                    r * r
                })
                .sum::<f64>()
                .sqrt();
            if res <= RESIDUAL_TOL * (1.0 + lambda.abs()) {
                columns.push(v);
                best_res = res;
                break;
            }
            best_res = best_res.min(res);
        }
        if columns.len() != j + 1 {
            return Err(Error::ConvergenceFailure {
                index: j,
                residual: best_res,
            });
        }
    }

    // pack row-major
    let mut vectors = vec![0.0; n * n];
    for (j, col) in columns.iter().enumerate() {
        for (site, &x) in col.iter().enumerate() {
            vectors[site * n + j] = x;
        }
    }
    Ok(EigenSystem {
        n,
        eigenvalues: lambdas,
        vectors,
    })
}

fn site_start_value(j: usize, site: usize) -> f64 {
    let r = splitmix64((j as u64) << 32 | site as u64);
    2.0 * ((r >> 11) as f64 * (1.0 / (1u64 << 53) as f64)) - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_hamiltonian, ModelFamily, ModelSpec};

    fn free(n: usize) -> TridiagonalMatrix {
        build_hamiltonian(&ModelSpec {
            family: ModelFamily::Free,
            size: n,
            index_origin: None,
        })
        .unwrap()
    }

    #[test]
    fn free_two_site() {
        let eig = eigensolve(&free(2)).unwrap();
        assert!((eig.eigenvalues()[0] + 1.0).abs() < 1e-12);
        assert!((eig.eigenvalues()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn already_diagonal() {
        let t = TridiagonalMatrix {
            diagonal: vec![3.0, -1.0],
            offdiagonal: vec![0.0],
        };
        let eig = eigensolve(&t).unwrap();
        assert_eq!(eig.eigenvalues(), &[-1.0, 3.0]);
        // permuted identity eigenvectors
        assert!((eig.component(1, 0).abs() - 1.0).abs() < 1e-12);
        assert!((eig.component(0, 1).abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn free_eigenvalues_analytic() {
        let n = 512;
        let eig = eigensolve(&free(n)).unwrap();
        for (k, &l) in eig.eigenvalues().iter().enumerate() {
            // ascending order pairs with k = N, N-1, ..., 1
            let analytic = 2.0 * (std::f64::consts::PI * (n - k) as f64 / (n as f64 + 1.0)).cos();
            assert!(
                (l - analytic).abs() < 1e-9,
                "k={k}: {l} vs {analytic}"
            );
        }
    }

    #[test]
    fn contracts_on_anderson() {
        let t = build_hamiltonian(&ModelSpec {
            family: ModelFamily::Anderson {
                coupling: 1.5,
                distribution: Default::default(),
                seed: 11,
            },
            size: 300,
            index_origin: None,
        })
        .unwrap();
        let eig = eigensolve(&t).unwrap();
        assert!(eig.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        assert!(eig.orthonormality_defect() < 1e-10);
        for j in 0..300 {
            let res = eig.residual(&t, j);
            let bound = RESIDUAL_TOL * (1.0 + eig.eigenvalues()[j].abs());
            assert!(res <= bound, "j={j}: residual {res} > {bound}");
        }
        // Gershgorin containment for Anderson: [-2 - a, 2 + a]
        assert!(eig.eigenvalues().iter().all(|&l| l.abs() <= 3.5 + 1e-12));
    }

    #[test]
    fn contracts_on_free_with_edge_clusters() {
        let n = 1024;
        let t = free(n);
        let eig = eigensolve(&t).unwrap();
        assert!(eig.orthonormality_defect() < 1e-10);
        for j in [0, 1, 2, n / 2, n - 2, n - 1] {
            assert!(eig.residual(&t, j) <= RESIDUAL_TOL * (1.0 + eig.eigenvalues()[j].abs()));
        }
    }

    #[test]
    fn coefficients_and_synthesize_invert() {
        let t = free(64);
        let eig = eigensolve(&t).unwrap();
        let xi: Vec<f64> = (0..64).map(|i| ((i * 37 + 5) % 11) as f64 - 5.0).collect();
        let c = eig.coefficients(&xi);
        let back = eig.synthesize(&c);
        for (a, b) in xi.iter().zip(&back) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn cache_round_trip_and_rejects_garbage() {
        let eig = eigensolve(&free(16)).unwrap();
        let hash = [7u8; 32];
        let blob = eig.encode_cache(&hash);
        let (back, h) = EigenSystem::decode_cache(&blob).unwrap();
        assert_eq!(back, eig);
        assert_eq!(h, hash);
        assert!(EigenSystem::decode_cache(b"short").is_err());
        let mut bad = blob.clone();
        bad[0] = b'X';
        assert!(EigenSystem::decode_cache(&bad).is_err());
        let mut truncated = blob.clone();
        truncated.pop();
        assert!(EigenSystem::decode_cache(&truncated).is_err());
    }
}
