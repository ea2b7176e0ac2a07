//! Exact time evolution, time-averaged position moments, transport
//! exponents, and the dimension-transport bound checks.
//!
//! The time average (1/t) Int_0^t |<e^{-isT} xi, xi_n>|^2 ds has a closed
//! form in the eigenbasis through the kernel K_t(d) = (1 - e^{-itd})/(itd);
//! the exact path uses it directly (O(N^3) setup per p). For large systems
//! the average is instead estimated by stratified sampling of the integrand
//! over log-spaced strata of (0, t].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::EigenSystem;
use crate::error::{Error, Result};
use crate::hamiltonian::splitmix64;
use crate::measure::PointMeasure;
use crate::scaling::{self, ScalingFit};

/// Default system size cutoff for the exact O(N^3) kernel path.
pub const DEFAULT_KERNEL_CUTOFF: usize = 512;
/// Default number of sample strata for the sampled path.
pub const DEFAULT_SAMPLES: usize = 64;

/// Assignment of integer lattice labels to vector components.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexMap {
    labels: Vec<i64>,
}

impl IndexMap {
    pub fn new(labels: Vec<i64>) -> Self {
        IndexMap { labels }
    }

    /// Centered map: label(site) = site - origin.
    pub fn centered(n: usize, origin: usize) -> Self {
        IndexMap {
            labels: (0..n).map(|s| s as i64 - origin as i64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, site: usize) -> i64 {
        self.labels[site]
    }

    /// |n|^p weight of a site; |0|^p = 0 for every p > 0.
    pub fn weight(&self, site: usize, p: f64) -> f64 {
        let a = self.labels[site].unsigned_abs() as f64;
        if a == 0.0 {
            0.0
        } else {
            a.powf(p)
        }
    }
}

/// e^{-itT} xi expanded in the eigenbasis.
pub fn evolve(eig: &EigenSystem, xi: &[f64], t: f64) -> Vec<Complex64> {
    let n = eig.size();
    assert_eq!(xi.len(), n);
    let c = eig.coefficients(xi);
    let z: Vec<Complex64> = eig
        .eigenvalues()
        .iter()
        .zip(&c)
        .map(|(&l, &cj)| Complex64::from_polar(cj, -t * l))
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (site, o) in out.iter_mut().enumerate() {
        let row = eig.site_row(site);
        let mut re = 0.0;
        let mut im = 0.0;
        for (v, zj) in row.iter().zip(&z) {
            re += v * zj.re;
            im += v * zj.im;
        }
        *o = Complex64::new(re, im);
    }
    out
}

/// Real part of the averaging kernel K_t(d) = (1 - e^{-itd})/(itd).
fn kernel_re(t: f64, d: f64) -> f64 {
    let x = t * d;
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Closed-form (1/t) Int_0^t |<e^{-isT} xi, delta_site>|^2 ds for real xi.
pub fn time_avg_site_prob(eig: &EigenSystem, xi: &[f64], t: f64, site: usize) -> f64 {
    assert!(t > 0.0);
    let c = eig.coefficients(xi);
    let lambdas = eig.eigenvalues();
    let row = eig.site_row(site);
    let a: Vec<f64> = c.iter().zip(row).map(|(&cj, &vj)| cj * vj).collect();
    let mut total = 0.0;
    for j in 0..a.len() {
        if a[j] == 0.0 {
            continue;
        }
        total += a[j] * a[j];
        for k in j + 1..a.len() {
            if a[k] == 0.0 {
                continue;
            }
            total += 2.0 * a[j] * a[k] * kernel_re(t, lambdas[j] - lambdas[k]);
        }
    }
    total.max(0.0)
}

/// Which computational path produced a moment series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentPath {
    Exact,
    Sampled,
}

impl std::fmt::Display for MomentPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MomentPath::Exact => write!(f, "exact"),
            MomentPath::Sampled => write!(f, "sampled"),
        }
    }
}

/// Time grid x p grid of time-averaged moments.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentSeries {
    pub times: Vec<f64>,
    pub p_values: Vec<f64>,
    /// moments[ti][pi]
    pub moments: Vec<Vec<f64>>,
    /// stratified-sampling dispersion per entry (sampled path only)
    pub stderr: Option<Vec<Vec<f64>>>,
    pub path: MomentPath,
    pub basis_tag: String,
}

impl MomentSeries {
    pub fn moment(&self, ti: usize, pi: usize) -> f64 {
        self.moments[ti][pi]
    }

    /// CSV with columns t, p, moment, path, stderr.
    pub fn to_csv(&self, header_comment: &str) -> String {
        let mut s = String::new();
        if !header_comment.is_empty() {
            for line in header_comment.lines() {
                s.push_str(&format!("# {line}\n"));
            }
        }
        s.push_str("t,p,moment,path,stderr\n");
        for (ti, &t) in self.times.iter().enumerate() {
            for (pi, &p) in self.p_values.iter().enumerate() {
                let se = self
                    .stderr
                    .as_ref()
                    .map_or(0.0, |m| m[ti][pi]);
                s.push_str(&format!(
                    "{t:.17e},{p},{:.17e},{},{se:.8e}\n",
                    self.moments[ti][pi], self.path
                ));
            }
        }
        s
    }
}

/// Tuning knobs for [`moments`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentOptions {
    /// Exact kernel path is used when the system size is at most this.
    pub kernel_cutoff: usize,
    /// Strata count for the sampled path.
    pub samples: usize,
    /// Ratio between t and the smallest stratified sample time.
    pub span_ratio: f64,
    /// Seed for the deterministic stratum jitter.
    pub sample_seed: u64,
    /// Force one path regardless of size (used by the path-agreement tests).
    pub force_path: Option<MomentPath>,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions {
            kernel_cutoff: DEFAULT_KERNEL_CUTOFF,
            samples: DEFAULT_SAMPLES,
            span_ratio: 1e3,
            sample_seed: 0x5eed_cafe,
            force_path: None,
        }
    }
}

/// Time-averaged |X|^p moments of the evolving state on the given time grid.
pub fn moments(
    eig: &EigenSystem,
    xi: &[f64],
    p_values: &[f64],
    times: &[f64],
    map: &IndexMap,
    opts: &MomentOptions,
) -> Result<MomentSeries> {
    let n = eig.size();
    if xi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: xi.len(),
        });
    }
    if map.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: map.len(),
        });
    }
    let norm = xi.iter().map(|&x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized {
            deviation: (norm - 1.0).abs(),
        });
    }
    assert!(times.windows(2).all(|w| w[0] < w[1]), "times must ascend");
    assert!(times.iter().all(|&t| t > 0.0));
    assert!(p_values.iter().all(|&p| p > 0.0));

    let path = opts.force_path.unwrap_or(if n <= opts.kernel_cutoff {
        MomentPath::Exact
    } else {
        MomentPath::Sampled
    });
    match path {
        MomentPath::Exact => exact_moments(eig, xi, p_values, times, map),
        MomentPath::Sampled => Ok(sampled_moments(eig, xi, p_values, times, map, opts)),
    }
}

fn exact_moments(
    eig: &EigenSystem,
    xi: &[f64],
    p_values: &[f64],
    times: &[f64],
    map: &IndexMap,
) -> Result<MomentSeries> {
    let n = eig.size();
    let c = eig.coefficients(xi);
    let lambdas = eig.eigenvalues();
    // per p: B_jk = c_j c_k sum_n w_p(n) v_j(n) v_k(n), symmetric
    let mut b_mats: Vec<Vec<f64>> = Vec::with_capacity(p_values.len());
    for &p in p_values {
        let mut b = vec![0.0; n * n];
        for site in 0..n {
            let w = map.weight(site, p);
            if w == 0.0 {
                continue;
            }
            let row = eig.site_row(site);
            for j in 0..n {
                let wj = w * row[j];
                if wj == 0.0 {
                    continue;
                }
                let bj = &mut b[j * n..(j + 1) * n];
                for (bk, &vk) in bj.iter_mut().zip(row) {
                    *bk += wj * vk;
                }
            }
        }
        for j in 0..n {
            for k in 0..n {
                b[j * n + k] *= c[j] * c[k];
            }
        }
        b_mats.push(b);
    }
    let mut out = vec![vec![0.0; p_values.len()]; times.len()];
    for (ti, &t) in times.iter().enumerate() {
        // kernel matrix entries reused across p
        for (pi, b) in b_mats.iter().enumerate() {
            let mut m = 0.0;
            for j in 0..n {
                m += b[j * n + j];
                let bj = &b[j * n..(j + 1) * n];
                for (k, &bjk) in bj.iter().enumerate().skip(j + 1) {
                    if bjk != 0.0 {
                        m += 2.0 * bjk * kernel_re(t, lambdas[j] - lambdas[k]);
                    }
                }
            }
            out[ti][pi] = m.max(0.0);
        }
    }
    Ok(MomentSeries {
        times: times.to_vec(),
        p_values: p_values.to_vec(),
        moments: out,
        stderr: None,
        path: MomentPath::Exact,
        basis_tag: basis_tag(map),
    })
}

/// Stratified estimate of (1/t) Int_0^t f(s) ds: log-spaced strata over
/// [t/span, t] plus the head (0, t/span], one jittered sample per stratum,
/// each weighted by its stratum length.
fn strata(t: f64, opts: &MomentOptions, tcell: u64) -> Vec<(f64, f64)> {
    let s = opts.samples.max(2);
    let lo = t / opts.span_ratio;
    let ratio = (t / lo).powf(1.0 / (s - 1) as f64);
    let mut bounds = Vec::with_capacity(s + 1);
    bounds.push(0.0);
    let mut b = lo;
    for _ in 0..s {
        bounds.push(b.min(t));
        b *= ratio;
    }
    *bounds.last_mut().unwrap() = t;
    let mut out = Vec::with_capacity(s);
    for (i, w) in bounds.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let u = (splitmix64(opts.sample_seed ^ splitmix64(tcell ^ (i as u64) << 32)) >> 11) as f64
            / (1u64 << 53) as f64;
        // geometric jitter inside the stratum (linear for the head stratum)
        let x = if a > 0.0 {
            a * (b / a).powf(u)
        } else {
            b * (0.25 + 0.5 * u)
        };
        out.push((x, (b - a) / t));
    }
    out
}

fn sampled_moments(
    eig: &EigenSystem,
    xi: &[f64],
    p_values: &[f64],
    times: &[f64],
    map: &IndexMap,
    opts: &MomentOptions,
) -> MomentSeries {
    let n = eig.size();
    let c = eig.coefficients(xi);
    let lambdas = eig.eigenvalues();
    let np = p_values.len();
    // site weights per p
    let weights: Vec<Vec<f64>> = p_values
        .iter()
        .map(|&p| (0..n).map(|s| map.weight(s, p)).collect())
        .collect();

    let mut out = vec![vec![0.0; np]; times.len()];
    let mut errs = vec![vec![0.0; np]; times.len()];
    let s = opts.samples.max(2);
    let mut zre = vec![0.0; n * s];
    let mut zim = vec![0.0; n * s];
    let mut yre = vec![0.0; s];
    let mut yim = vec![0.0; s];
    let mut sample_moments = vec![0.0; s * np];

    for (ti, &t) in times.iter().enumerate() {
        let cells = strata(t, opts, ti as u64);
        for (j, &l) in lambdas.iter().enumerate() {
            let cj = c[j];
            for (k, &(x, _)) in cells.iter().enumerate() {
                let (sin, cos) = (l * x).sin_cos();
                zre[j * s + k] = cj * cos;
                zim[j * s + k] = -cj * sin;
            }
        }
        sample_moments.iter_mut().for_each(|m| *m = 0.0);
        for site in 0..n {
            let row = eig.site_row(site);
            yre.iter_mut().for_each(|v| *v = 0.0);
            yim.iter_mut().for_each(|v| *v = 0.0);
            for (j, &v) in row.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let zr = &zre[j * s..j * s + s];
                let zi = &zim[j * s..j * s + s];
                for k in 0..s {
                    yre[k] += v * zr[k];
                    yim[k] += v * zi[k];
                }
            }
            for (pi, w) in weights.iter().enumerate() {
                let wn = w[site];
                if wn == 0.0 {
                    continue;
                }
                let sm = &mut sample_moments[pi * s..(pi + 1) * s];
                for k in 0..s {
                    sm[k] += wn * (yre[k] * yre[k] + yim[k] * yim[k]);
                }
            }
        }
        for pi in 0..np {
            let sm = &sample_moments[pi * s..(pi + 1) * s];
            let mean: f64 = sm
                .iter()
                .zip(&cells)
                .map(|(&m, &(_, w))| w * m)
                .sum();
            let var: f64 = sm
                .iter()
                .zip(&cells)
                .map(|(&m, &(_, w))| {
                    let d = m - mean;
                    w * w * d * d
                })
                .sum();
            out[ti][pi] = mean;
            errs[ti][pi] = var.sqrt();
        }
    }
    MomentSeries {
        times: times.to_vec(),
        p_values: p_values.to_vec(),
        moments: out,
        stderr: Some(errs),
        path: MomentPath::Sampled,
        basis_tag: basis_tag(map),
    }
}

fn basis_tag(map: &IndexMap) -> String {
    let lo = map.labels.iter().min().copied().unwrap_or(0);
    let hi = map.labels.iter().max().copied().unwrap_or(0);
    format!("Z[{lo}..{hi}]")
}

/// Upper transport exponent estimate for one p.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransportEstimate {
    pub p: f64,
    pub alpha_plus: f64,
    pub fit: ScalingFit,
}

/// Max of sliding-window slopes of ln M vs ln t over the window (limsup
/// surrogate).
pub fn transport_exponent(
    series: &MomentSeries,
    p: f64,
    window: (f64, f64),
) -> Result<TransportEstimate> {
    let pi = series
        .p_values
        .iter()
        .position(|&q| q == p)
        .ok_or_else(|| Error::Domain(format!("p={p} not in the series p grid")))?;
    let xs: Vec<f64> = series.times.iter().map(|&t| t.ln()).collect();
    let ys: Vec<f64> = series
        .moments
        .iter()
        .map(|row| row[pi].max(f64::MIN_POSITIVE).ln())
        .collect();
    let win = scaling::window_indices(&series.times, window.0, window.1);
    if win.1 - win.0 < 8 {
        return Err(Error::DegenerateWindow {
            surviving: win.1 - win.0,
            needed: 8,
        });
    }
    let fit = ScalingFit::from_log_data(xs, ys, win)?;
    Ok(TransportEstimate {
        p,
        alpha_plus: fit.upper_slope,
        fit,
    })
}

/// One row of the dimension-transport bound check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundRow {
    pub p: f64,
    pub alpha_plus: f64,
    /// upper generalized fractal dimension estimate at q = 1/(1+p)
    pub gfd_dim: f64,
    /// D^+(1/(1+p)) * p
    pub gfd_bound: f64,
    /// packing estimate * p
    pub packing_bound: f64,
    pub gfd_pass: bool,
    pub packing_pass: bool,
    /// alpha_plus - gfd_bound (positive slack means the refined bound is
    /// not tight; large positive slack is the del Rio phenomenon)
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
    pub packing_estimate: f64,
    pub tolerance: f64,
}

impl BoundReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.gfd_pass && r.packing_pass)
    }
}

/// Check the packing and generalized-dimension transport lower bounds
/// against measured transport exponents. The dimension estimates use the
/// ball-scaling route on the given scale window.
pub fn verify_bounds(
    transport: &[TransportEstimate],
    mu: &PointMeasure,
    scale_window: (f64, f64),
    tolerance: f64,
) -> Result<BoundReport> {
    let packing = mu.packing_dimension_estimate().max(0.0);
    let grid = scaling::geometric_grid(scale_window.0, scale_window.1, 0.5f64.powf(0.25));
    let mut rows = Vec::with_capacity(transport.len());
    for est in transport {
        let q = 1.0 / (1.0 + est.p);
        let fit = crate::measure::estimate_dimensions(
            |eps| mu.partition_sum(q, eps),
            q,
            &grid,
            scale_window,
            crate::measure::DimensionRoute::BallScaling,
        )?;
        let gfd_dim = fit.upper_slope;
        let gfd_bound = gfd_dim * est.p;
        let packing_bound = packing * est.p;
        rows.push(BoundRow {
            p: est.p,
            alpha_plus: est.alpha_plus,
            gfd_dim,
            gfd_bound,
            packing_bound,
            gfd_pass: est.alpha_plus >= gfd_bound - tolerance,
            packing_pass: est.alpha_plus >= packing_bound - tolerance,
            slack: est.alpha_plus - gfd_bound,
        });
    }
    Ok(BoundReport {
        rows,
        packing_estimate: packing,
        tolerance,
    })
}

/// Quasiballistic iff alpha_plus tracks p across the whole grid.
pub fn classify_quasiballistic(estimates: &[TransportEstimate], tol: f64) -> bool {
    !estimates.is_empty()
        && estimates
            .iter()
            .all(|e| (e.alpha_plus - e.p).abs() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::eigensolve;
    use crate::hamiltonian::{build_hamiltonian, ModelFamily, ModelSpec};

    fn free_eig(n: usize) -> EigenSystem {
        eigensolve(
            &build_hamiltonian(&ModelSpec {
                family: ModelFamily::Free,
                size: n,
                index_origin: None,
            })
            .unwrap(),
        )
        .unwrap()
    }

    fn delta(n: usize, site: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[site] = 1.0;
        v
    }

    #[test]
    fn evolve_identity_at_zero() {
        let eig = free_eig(32);
        let xi: Vec<f64> = {
            let mut v: Vec<f64> = (0..32).map(|i| ((i as f64) * 0.17).sin()).collect();
            let norm = v.iter().map(|&x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            v
        };
        let psi = evolve(&eig, &xi, 0.0);
        for (a, b) in psi.iter().zip(&xi) {
            assert!((a.re - b).abs() < 1e-10 && a.im.abs() < 1e-10);
        }
    }

    #[test]
    fn evolve_preserves_norm_and_eigenstates() {
        let eig = free_eig(48);
        let xi = {
            let mut v: Vec<f64> = (0..48).map(|i| ((i * 13 % 7) as f64) - 3.0).collect();
            let norm = v.iter().map(|&x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            v
        };
        for &t in &[0.3, 2.7, 91.0] {
            let psi = evolve(&eig, &xi, t);
            let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        // eigenstate: site probabilities constant in t
        let e3 = eig.eigenvector(3);
        let p0: Vec<f64> = evolve(&eig, &e3, 0.0).iter().map(|z| z.norm_sqr()).collect();
        let p1: Vec<f64> = evolve(&eig, &e3, 17.3).iter().map(|z| z.norm_sqr()).collect();
        for (a, b) in p0.iter().zip(&p1) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn site_prob_eigenstate_constant() {
        let eig = free_eig(16);
        let e2 = eig.eigenvector(2);
        for &t in &[0.5, 5.0, 500.0] {
            let p = time_avg_site_prob(&eig, &e2, t, 7);
            assert!((p - e2[7] * e2[7]).abs() < 1e-12);
        }
    }

    #[test]
    fn site_prob_matches_simpson_quadrature() {
        let n = 32;
        let eig = free_eig(n);
        let xi = delta(n, n / 2);
        let t = 7.5;
        for site in [n / 2, n / 2 + 3] {
            let exact = time_avg_site_prob(&eig, &xi, t, site);
            // composite Simpson on (1/t) Int |<evolve, delta_site>|^2
            let panels = 4000;
            let h = t / panels as f64;
            let f = |s: f64| evolve(&eig, &xi, s)[site].norm_sqr();
            let mut acc = f(0.0) + f(t);
            for i in 1..panels {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * f(i as f64 * h);
            }
            let quad = acc * h / 3.0 / t;
            assert!(
                (exact - quad).abs() < 1e-8 * quad.max(1e-3),
                "site {site}: {exact} vs {quad}"
            );
        }
    }

    #[test]
    fn site_prob_cesaro_limit() {
        let n = 24;
        let eig = free_eig(n);
        let xi = delta(n, 5);
        let c = eig.coefficients(&xi);
        let site = 11;
        let limit: f64 = (0..n)
            .map(|j| c[j] * c[j] * eig.component(site, j) * eig.component(site, j))
            .sum();
        let min_gap = eig
            .eigenvalues()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        let t = 1e4;
        let p = time_avg_site_prob(&eig, &xi, t, site);
        assert!((p - limit).abs() < 4.0 / (t * min_gap));
    }

    #[test]
    fn moment_zero_for_state_at_origin() {
        let n = 16;
        let eig = free_eig(n);
        let map = IndexMap::centered(n, 8);
        let xi = delta(n, 8);
        let series = moments(
            &eig,
            &xi,
            &[1.0, 2.0],
            &[1e-6, 1e-5],
            &map,
            &MomentOptions::default(),
        )
        .unwrap();
        // t -> 0+: all mass still at n = 0, weight 0
        assert!(series.moment(0, 0) < 1e-9);
        assert!(series.moment(0, 1) < 1e-9);
    }

    #[test]
    fn diagonal_hamiltonian_moments_constant() {
        let t = crate::hamiltonian::TridiagonalMatrix {
            diagonal: (0..12).map(|i| i as f64 * 0.618).collect(),
            offdiagonal: vec![0.0; 11],
        };
        let eig = eigensolve(&t).unwrap();
        let map = IndexMap::centered(12, 6);
        let mut xi = vec![0.0; 12];
        // spread over a few sites
        xi[4] = 0.6;
        xi[6] = 0.64;
        xi[8] = 0.48;
        let norm = xi.iter().map(|&x| x * x).sum::<f64>().sqrt();
        xi.iter_mut().for_each(|x| *x /= norm);
        let expect: f64 = (0..12)
            .map(|s| map.weight(s, 2.0) * xi[s] * xi[s])
            .sum();
        let series = moments(
            &eig,
            &xi,
            &[2.0],
            &[1.0, 10.0, 100.0],
            &map,
            &MomentOptions::default(),
        )
        .unwrap();
        for ti in 0..3 {
            assert!(
                (series.moment(ti, 0) - expect).abs() < 1e-10 * expect,
                "t index {ti}"
            );
        }
    }

    #[test]
    fn moments_match_per_site_sum() {
        let n = 40;
        let eig = free_eig(n);
        let map = IndexMap::centered(n, 20);
        let xi = delta(n, 20);
        let times = [2.0, 8.0];
        let series = moments(
            &eig,
            &xi,
            &[2.0],
            &times,
            &map,
            &MomentOptions::default(),
        )
        .unwrap();
        for (ti, &t) in times.iter().enumerate() {
            let direct: f64 = (0..n)
                .map(|s| map.weight(s, 2.0) * time_avg_site_prob(&eig, &xi, t, s))
                .sum();
            assert!(
                (series.moment(ti, 0) - direct).abs() < 1e-10 * direct,
                "t={t}"
            );
        }
    }

    #[test]
    fn exact_and_sampled_paths_agree() {
        let n = 256;
        let eig = free_eig(n);
        let map = IndexMap::centered(n, n / 2);
        let xi = delta(n, n / 2);
        let times: Vec<f64> = scaling::log_grid(2.0, 20.0, 8);
        let p_values = [1.0, 2.0];
        let exact = moments(&eig, &xi, &p_values, &times, &map, &MomentOptions::default()).unwrap();
        let mut opts = MomentOptions {
            samples: 4096,
            force_path: Some(MomentPath::Sampled),
            ..Default::default()
        };
        opts.span_ratio = 1e3;
        let sampled = moments(&eig, &xi, &p_values, &times, &map, &opts).unwrap();
        assert_eq!(exact.path, MomentPath::Exact);
        assert_eq!(sampled.path, MomentPath::Sampled);
        for ti in 0..times.len() {
            for pi in 0..p_values.len() {
                let a = exact.moment(ti, pi);
                let b = sampled.moment(ti, pi);
                assert!(
                    (a - b).abs() <= 1e-3 * a,
                    "t={} p={}: exact {a} vs sampled {b}",
                    times[ti],
                    p_values[pi]
                );
            }
        }
    }

    #[test]
    fn moments_nondecreasing_in_p() {
        let n = 64;
        let eig = free_eig(n);
        let map = IndexMap::centered(n, n / 2);
        let xi = delta(n, n / 2);
        let ps = [0.5, 1.0, 2.0, 3.0];
        let series = moments(
            &eig,
            &xi,
            &ps,
            &[5.0, 50.0],
            &map,
            &MomentOptions::default(),
        )
        .unwrap();
        for row in &series.moments {
            for w in row.windows(2) {
                assert!(w[1] >= w[0] * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn relabeling_invariance() {
        let n = 64;
        let eig = free_eig(n);
        let origin = n / 2;
        let map = IndexMap::centered(n, origin);
        // bijection of Z fixing |n|: flip the sign of every label
        let flipped = IndexMap::new((0..n).map(|s| -(s as i64 - origin as i64)).collect());
        let xi = delta(n, origin);
        let times = [3.0, 30.0];
        let a = moments(&eig, &xi, &[2.0], &times, &map, &MomentOptions::default()).unwrap();
        let b = moments(&eig, &xi, &[2.0], &times, &flipped, &MomentOptions::default()).unwrap();
        for ti in 0..times.len() {
            assert!((a.moment(ti, 0) - b.moment(ti, 0)).abs() <= 1e-12 * a.moment(ti, 0));
        }
    }

    #[test]
    fn transport_exponent_on_synthetic_power_law() {
        let times: Vec<f64> = scaling::log_grid(1.0, 1e4, 16);
        let beta = 1.37;
        let series = MomentSeries {
            moments: times.iter().map(|&t| vec![3.0 * t.powf(beta)]).collect(),
            times: times.clone(),
            p_values: vec![2.0],
            stderr: None,
            path: MomentPath::Exact,
            basis_tag: "test".into(),
        };
        let est = transport_exponent(&series, 2.0, (1.0, 1e4)).unwrap();
        assert!((est.alpha_plus - beta).abs() < 1e-9);
        // constant moments
        let flat = MomentSeries {
            moments: times.iter().map(|_| vec![0.25]).collect(),
            times: times.clone(),
            p_values: vec![2.0],
            stderr: None,
            path: MomentPath::Exact,
            basis_tag: "test".into(),
        };
        let est = transport_exponent(&flat, 2.0, (1.0, 1e4)).unwrap();
        assert!(est.alpha_plus.abs() < 1e-9);
    }

    #[test]
    fn quasiballistic_classifier() {
        let mk = |alpha: f64, p: f64| TransportEstimate {
            p,
            alpha_plus: alpha,
            fit: ScalingFit {
                abscissae: vec![],
                ordinates: vec![],
                window: (0, 0),
                lower_slope: alpha,
                upper_slope: alpha,
                global_slope: alpha,
                residual: 0.0,
            },
        };
        assert!(classify_quasiballistic(
            &[mk(0.95, 1.0), mk(2.05, 2.0)],
            0.15
        ));
        assert!(!classify_quasiballistic(
            &[mk(0.95, 1.0), mk(0.4, 2.0)],
            0.15
        ));
        assert!(!classify_quasiballistic(&[], 0.15));
    }

    #[test]
    fn bounds_trivial_for_eigenvector() {
        let eig = free_eig(32);
        let e0 = eig.eigenvector(4);
        let map = IndexMap::centered(32, 16);
        let times: Vec<f64> = scaling::log_grid(1.0, 1e3, 16);
        let series = moments(&eig, &e0, &[1.0, 2.0], &times, &map, &MomentOptions::default())
            .unwrap();
        let t1 = transport_exponent(&series, 1.0, (1.0, 1e3)).unwrap();
        let t2 = transport_exponent(&series, 2.0, (1.0, 1e3)).unwrap();
        assert!(t1.alpha_plus.abs() < 0.05 && t2.alpha_plus.abs() < 0.05);
        let mu = crate::spectral::spectral_measure(&eig, &e0).unwrap();
        let report = verify_bounds(&[t1, t2], &mu, (1e-3, 0.5), 0.15).unwrap();
        assert!(report.all_pass());
        assert!(report.packing_estimate.abs() < 0.05);
    }
}
