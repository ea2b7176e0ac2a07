//! Finite point measures on the line and estimators for their generalized
//! fractal dimensions.
//!
//! Three independent routes to the same exponents are provided:
//! ball-scaling partition sums, the exact mean-q integral, and the
//! exponentially smoothed correlation integral (large-t route). All three
//! feed [`estimate_dimensions`] which applies the shared sliding-window
//! liminf/limsup surrogate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaling::{self, ScalingFit};

/// Relative position tolerance below which atoms are merged.
pub const MERGE_REL_TOL: f64 = 1e-12;
/// Atoms lighter than this fraction of the total mass are dropped.
pub const MASS_FLOOR_REL: f64 = 1e-16;

/// A finite positive point measure: atoms at strictly increasing positions.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMeasure {
    atoms: Vec<(f64, f64)>,
    /// prefix[i] = sum of masses of atoms[..i]
    prefix: Vec<f64>,
    total_mass: f64,
}

#[derive(Serialize, Deserialize)]
struct PointMeasureWire {
    atoms: Vec<(f64, f64)>,
}

impl PointMeasure {
    /// Build a measure from raw atoms: sorts by position, merges positions
    /// closer than `MERGE_REL_TOL` times the support diameter, drops atoms
    /// below the relative mass floor.
    pub fn new(mut raw: Vec<(f64, f64)>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Domain("measure needs at least one atom".into()));
        }
        for &(p, m) in &raw {
            if !p.is_finite() {
                return Err(Error::Domain(format!("non-finite atom position {p}")));
            }
            if !m.is_finite() || m < 0.0 {
                return Err(Error::Domain(format!("invalid atom mass {m}")));
            }
        }
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let diam = raw.last().unwrap().0 - raw[0].0;
        let merge_tol = MERGE_REL_TOL * diam;
        let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (p, m) in raw {
            match atoms.last_mut() {
                Some(last) if p - last.0 <= merge_tol => {
                    // merge into the existing atom, mass-weighted position
                    let w = last.1 + m;
                    if w > 0.0 {
                        last.0 = (last.0 * last.1 + p * m) / w;
                    }
                    last.1 = w;
                }
                _ => atoms.push((p, m)),
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Domain(format!("total mass {total} must be positive and finite")));
        }
        let floor = MASS_FLOOR_REL * total;
        atoms.retain(|a| a.1 > floor);
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let mut prefix = Vec::with_capacity(atoms.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for a in &atoms {
            acc += a.1;
            prefix.push(acc);
        }
        Ok(PointMeasure {
            atoms,
            prefix,
            total_mass: total,
        })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Support radius r = max |position|.
    pub fn support_radius(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.0.abs())
            .fold(0.0, f64::max)
    }

    pub fn support_diameter(&self) -> f64 {
        self.atoms.last().unwrap().0 - self.atoms[0].0
    }

    /// Smallest nearest-neighbor gap, or `None` for a single atom.
    pub fn min_gap(&self) -> Option<f64> {
        self.atoms
            .windows(2)
            .map(|w| w[1].0 - w[0].0)
            .min_by(f64::total_cmp)
    }

    /// Mass of the open ball B(x, eps).
    pub fn ball_mass(&self, x: f64, eps: f64) -> f64 {
        assert!(eps > 0.0);
        let lo = self.atoms.partition_point(|a| a.0 <= x - eps);
        let hi = self.atoms.partition_point(|a| a.0 < x + eps);
        self.prefix[hi] - self.prefix[lo]
    }

    /// Partition sum S(q, eps) = sum_j mu(B(lambda_j, eps))^(q-1) * m_j.
    pub fn partition_sum(&self, q: f64, eps: f64) -> f64 {
        assert!(q > 0.0 && q < 1.0, "q must lie in (0,1)");
        assert!(eps > 0.0);
        self.atoms
            .iter()
            .map(|&(p, m)| self.ball_mass(p, eps).powf(q - 1.0) * m)
            .sum()
    }

    /// Exact mean-q integral eps^{-1} * Int mu(B(x,eps))^q dx.
    ///
    /// x -> mu(B(x,eps)) is piecewise constant with breakpoints at the
    /// atom positions shifted by +-eps; the integral is a finite sum of
    /// (segment length) * (segment value)^q terms.
    pub fn mean_q_integral(&self, q: f64, eps: f64) -> f64 {
        assert!(q > 0.0 && q < 1.0, "q must lie in (0,1)");
        assert!(eps > 0.0);
        let mut breaks: Vec<f64> = Vec::with_capacity(2 * self.atoms.len());
        for &(p, _) in &self.atoms {
            breaks.push(p - eps);
            breaks.push(p + eps);
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut integral = 0.0;
        for w in breaks.windows(2) {
            let len = w[1] - w[0];
            if len <= 0.0 {
                continue;
            }
            let mid = 0.5 * (w[0] + w[1]);
            let v = self.ball_mass(mid, eps);
            if v > 0.0 {
                integral += len * v.powf(q);
            }
        }
        integral / eps
    }

    /// Smoothed inner integral sum_j m_j e^{-t |x - lambda_j|}.
    ///
    /// Atoms whose exponent is more than ~46 e-foldings below the nearest
    /// atom's contribute nothing at f64 precision and are skipped.
    fn smoothed_mass(&self, x: f64, t: f64) -> f64 {
        const LOG_CUT: f64 = 46.0;
        let n = self.atoms.len();
        let i = self.atoms.partition_point(|a| a.0 < x);
        // nearest-atom distance
        let mut d0 = f64::INFINITY;
        if i < n {
            d0 = d0.min((self.atoms[i].0 - x).abs());
        }
        if i > 0 {
            d0 = d0.min((x - self.atoms[i - 1].0).abs());
        }
        let reach = d0 + LOG_CUT / t;
        let mut sum = 0.0;
        let mut j = i;
        while j < n {
            let d = self.atoms[j].0 - x;
            if d > reach {
                break;
            }
            sum += self.atoms[j].1 * (-t * d).exp();
            j += 1;
        }
        let mut j = i;
        while j > 0 {
            j -= 1;
            let d = x - self.atoms[j].0;
            if d > reach {
                break;
            }
            sum += self.atoms[j].1 * (-t * d).exp();
        }
        sum
    }

    /// Correlation integral C(q, t) = t * Int_{-r-1}^{r+1} (smoothed mass)^q dx.
    ///
    /// The outer integrand has derivative kinks at each atom position, so the
    /// integration range is split into panels at the atoms and each panel is
    /// integrated by adaptive Simpson refinement.
    pub fn correlation_integral(&self, q: f64, t: f64, quad: &QuadratureSpec) -> Result<f64> {
        assert!(q > 0.0 && q < 1.0, "q must lie in (0,1)");
        assert!(t > 0.0);
        let r = self.support_radius();
        let mut cuts = vec![-r - 1.0];
        for &(p, _) in &self.atoms {
            if p > -r - 1.0 && p < r + 1.0 {
                cuts.push(p);
            }
        }
        cuts.push(r + 1.0);
        let f = |x: f64| self.smoothed_mass(x, t).powf(q);

        // coarse pass to distribute the absolute tolerance across panels
        let mut coarse = 0.0;
        for w in cuts.windows(2) {
            coarse += simpson(&f, w[0], w[1]);
        }
        let abs_tol = (quad.tolerance * coarse.abs()).max(f64::MIN_POSITIVE) / cuts.len() as f64;

        let mut total = 0.0;
        for w in cuts.windows(2) {
            total += adaptive_simpson(&f, w[0], w[1], abs_tol, quad.max_refinements).map_err(
                |achieved| Error::Numerical {
                    context: "correlation integral panel refinement",
                    achieved,
                    wanted: quad.tolerance,
                },
            )?;
        }
        Ok(t * total)
    }

    /// Pointwise upper scaling exponent surrogate at `x`: least-squares slope
    /// of ln mu(B(x,eps)) against ln eps over the scale grid. Returns
    /// `f64::INFINITY` if some ball on the grid is empty.
    pub fn pointwise_upper_exponent(&self, x: f64, grid: &[f64]) -> f64 {
        let mut xs = Vec::with_capacity(grid.len());
        let mut ys = Vec::with_capacity(grid.len());
        for &eps in grid {
            let m = self.ball_mass(x, eps);
            if m <= 0.0 {
                return f64::INFINITY;
            }
            xs.push(eps.ln());
            ys.push(m.ln());
        }
        scaling::lsq_slope(&xs, &ys)
    }

    /// Packing-dimension surrogate: max pointwise exponent over atoms of
    /// positive mass, probed on a grid below the minimum gap where every
    /// finite point measure has frozen ball masses.
    pub fn packing_dimension_estimate(&self) -> f64 {
        let top = self.min_gap().map_or(0.1, |g| 0.9 * g);
        let grid = scaling::geometric_grid(0.01 * top, top, 0.5f64.powf(0.25));
        self.atoms
            .iter()
            .filter(|a| a.1 > 0.0)
            .map(|&(p, _)| self.pointwise_upper_exponent(p, &grid))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Default scaling window [2 * min gap, 0.25 * diameter].
    pub fn default_scale_window(&self) -> (f64, f64) {
        let diam = self.support_diameter();
        let lo = self.min_gap().map_or(1e-3 * diam.max(1.0), |g| 2.0 * g);
        (lo, 0.25 * diam)
    }

    // ---- serialization -------------------------------------------------

    /// Two-column text: `position mass` per line, '#' comments allowed.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# position mass\n");
        for &(p, m) in &self.atoms {
            s.push_str(&format!("{p:.17e} {m:.17e}\n"));
        }
        s
    }

    pub fn parse_text(input: &str) -> Result<Self> {
        let mut raw = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (p, m) = match (it.next(), it.next(), it.next()) {
                (Some(p), Some(m), None) => (p, m),
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: expected two columns",
                        lineno + 1
                    )))
                }
            };
            let p: f64 = p
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let m: f64 = m
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            raw.push((p, m));
        }
        Self::new(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PointMeasureWire {
            atoms: self.atoms.clone(),
        })
        .expect("point measure serialization cannot fail")
    }

    pub fn from_json(input: &str) -> Result<Self> {
        let wire: PointMeasureWire =
            serde_json::from_str(input).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(wire.atoms)
    }
}

/// Adaptive quadrature control for the correlation integral.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub tolerance: f64,
    pub max_refinements: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            tolerance: 1e-9,
            max_refinements: 40,
        }
    }
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
}

/// Adaptive Simpson with an absolute tolerance; returns Err(achieved) if the
/// depth limit is hit before the local error estimate falls under tolerance.
pub fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> std::result::Result<f64, f64> {
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> std::result::Result<f64, f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let err = (left + right - whole) / 15.0;
        if err.abs() <= tol || b - a < f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            return Ok(left + right + err);
        }
        if depth == 0 {
            return Err(err.abs());
        }
        let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
        let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
        Ok(l + r)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, depth)
}

/// Which scaling route the data points came from; fixes how raw log-log
/// slopes translate into dimension estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionRoute {
    /// ln S(q,eps) against ln eps (partition sums or mean-q integrals):
    /// D = slope / (q - 1), probed as eps decreases.
    BallScaling,
    /// ln C(q,t) against ln t: D = -slope / (q - 1), probed as t grows.
    Dynamical,
}

/// Evaluate `values_fn` on a geometric scale grid and turn the log-log data
/// into lower/upper dimension estimates for the given route.
///
/// `window` restricts the scales used for the fit (in scale units, not logs).
pub fn estimate_dimensions(
    values_fn: impl Fn(f64) -> f64,
    q: f64,
    grid: &[f64],
    window: (f64, f64),
    route: DimensionRoute,
) -> Result<ScalingFit> {
    assert!(q > 0.0 && q < 1.0, "q must lie in (0,1)");
    let xs: Vec<f64> = grid.iter().map(|&s| s.ln()).collect();
    let ys: Vec<f64> = grid.iter().map(|&s| values_fn(s).ln()).collect();
    let win = scaling::window_indices(grid, window.0, window.1);
    let fit = ScalingFit::from_log_data(xs, ys, win)?;
    Ok(match route {
        DimensionRoute::BallScaling => fit.map_slopes(|s| s / (q - 1.0)),
        DimensionRoute::Dynamical => fit.map_slopes(|s| -s / (q - 1.0)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uniform_measure(n: usize) -> PointMeasure {
        let m = 1.0 / n as f64;
        PointMeasure::new((0..n).map(|i| (i as f64 / (n - 1) as f64, m)).collect()).unwrap()
    }

    #[test]
    fn ball_mass_examples() {
        let single = PointMeasure::new(vec![(0.0, 1.0)]).unwrap();
        assert_eq!(single.ball_mass(0.0, 0.5), 1.0);
        assert_eq!(single.ball_mass(5.0, 1.0), 0.0);
        let four = PointMeasure::new(vec![
            (0.0, 0.25),
            (0.1, 0.25),
            (0.2, 0.25),
            (0.3, 0.25),
        ])
        .unwrap();
        // open interval (-0.05, 0.25) catches atoms at 0, 0.1, 0.2
        assert!((four.ball_mass(0.1, 0.15) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn ball_is_open() {
        let two = PointMeasure::new(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        // atom exactly on the boundary is excluded
        assert_eq!(two.ball_mass(0.5, 0.5), 0.0);
    }

    #[test]
    fn partition_sum_examples() {
        // equal masses, isolated balls: S = N^{1-q}
        let mu = PointMeasure::new(
            (0..4).map(|i| (0.25 * i as f64, 0.25)).collect(),
        )
        .unwrap();
        assert!((mu.partition_sum(0.5, 0.1) - 2.0).abs() < 1e-12);
        // saturated balls: S = total^q * ... = 1 for probability measure
        assert!((mu.partition_sum(0.5, 10.0) - 1.0).abs() < 1e-12);
        let single = PointMeasure::new(vec![(0.0, 1.0)]).unwrap();
        assert!((single.partition_sum(0.3, 0.7) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partition_sum_matches_brute_force() {
        // brute-force double loop oracle
        let atoms: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let x = (i as f64 * 0.618034) % 1.0;
                (x, 0.3 + (i as f64 * 0.37).sin().abs())
            })
            .collect();
        let mu = PointMeasure::new(atoms).unwrap();
        for &(q, eps) in &[(0.3, 0.01), (0.5, 0.05), (0.7, 0.2)] {
            let mut brute = 0.0;
            for &(p, m) in mu.atoms() {
                let mut ball = 0.0;
                for &(p2, m2) in mu.atoms() {
                    if (p2 - p).abs() < eps {
                        ball += m2;
                    }
                }
                brute += ball.powf(q - 1.0) * m;
            }
            let fast = mu.partition_sum(q, eps);
            assert!(
                (fast - brute).abs() <= 1e-12 * brute.abs(),
                "q={q} eps={eps}: {fast} vs {brute}"
            );
        }
    }

    #[test]
    fn mean_q_examples() {
        let single = PointMeasure::new(vec![(0.0, 1.0)]).unwrap();
        assert!((single.mean_q_integral(0.5, 0.5) - 2.0).abs() < 1e-12);
        let two = PointMeasure::new(vec![(0.0, 0.5), (10.0, 0.5)]).unwrap();
        let expect = 2.0 * 2.0 * 0.5f64.sqrt();
        assert!((two.mean_q_integral(0.5, 0.5) - expect).abs() < 1e-12);
        // eps beyond support diameter: single plateau handled by the same sweep
        let v = two.mean_q_integral(0.5, 100.0);
        assert!(v > 0.0 && v.is_finite());
    }

    #[test]
    fn mean_q_matches_adaptive_quadrature() {
        let atoms: Vec<(f64, f64)> = (0..60)
            .map(|i| ((i as f64 * 0.7548776662) % 1.0, 1.0 + (i as f64).cos().abs()))
            .collect();
        let mu = PointMeasure::new(atoms).unwrap();
        for &(q, eps) in &[(0.4, 0.03), (0.6, 0.11)] {
            let exact = mu.mean_q_integral(q, eps);
            let lo = mu.atoms()[0].0 - 2.0 * eps;
            let hi = mu.atoms().last().unwrap().0 + 2.0 * eps;
            let f = |x: f64| {
                let v = mu.ball_mass(x, eps);
                if v > 0.0 {
                    v.powf(q)
                } else {
                    0.0
                }
            };
            let quad = adaptive_simpson(&f, lo, hi, 1e-11 * exact * eps, 55).unwrap() / eps;
            assert!(
                (exact - quad).abs() <= 1e-8 * exact,
                "q={q} eps={eps}: {exact} vs {quad}"
            );
        }
    }

    #[test]
    fn correlation_integral_single_atom() {
        let mu = PointMeasure::new(vec![(0.0, 1.0)]).unwrap();
        let quad = QuadratureSpec::default();
        // analytic: t Int e^{-qt|x|} dx over [-1,1] = (2/q)(1 - e^{-qt})
        let q = 0.5;
        let t = 100.0;
        let c = mu.correlation_integral(q, t, &quad).unwrap();
        let analytic = 2.0 / q * (1.0 - (-q * t).exp());
        assert!((c - analytic).abs() < 1e-7 * analytic, "{c} vs {analytic}");
        // scaled mass w: C ~ 2 w^q / q at large t
        let muw = PointMeasure::new(vec![(0.0, 0.3)]).unwrap();
        let cw = muw.correlation_integral(q, t, &quad).unwrap();
        let analytic_w = 2.0 * 0.3f64.powf(q) / q;
        assert!((cw - analytic_w).abs() < 1e-6 * analytic_w);
    }

    #[test]
    fn correlation_slope_vanishes_for_dirac() {
        let mu = PointMeasure::new(vec![(0.0, 1.0)]).unwrap();
        let quad = QuadratureSpec::default();
        let q = 0.5;
        // d ln C / d ln t -> 0 as t grows (C saturates at 2/q)
        let c1 = mu.correlation_integral(q, 1e3, &quad).unwrap();
        let c2 = mu.correlation_integral(q, 1e5, &quad).unwrap();
        let slope = (c2.ln() - c1.ln()) / (1e5f64.ln() - 1e3f64.ln());
        assert!(slope.abs() < 1e-3, "slope {slope}");
        assert!((c2 - 2.0 / q).abs() < 1e-6);
    }

    #[test]
    fn dimension_of_uniform_measure_near_one() {
        let n = 4096;
        let mu = uniform_measure(n);
        let grid = scaling::geometric_grid(4.0 / n as f64, 0.1, 0.5f64.powf(0.25));
        let q = 0.5;
        let fit = estimate_dimensions(
            |eps| mu.partition_sum(q, eps),
            q,
            &grid,
            (4.0 / n as f64, 0.1),
            DimensionRoute::BallScaling,
        )
        .unwrap();
        assert!(fit.lower_slope >= 0.9 && fit.upper_slope <= 1.0 + 0.05,
            "slopes [{}, {}]", fit.lower_slope, fit.upper_slope);
    }

    #[test]
    fn dimension_of_single_atom_near_zero() {
        let mu = PointMeasure::new(vec![(0.0, 1.0)]).unwrap();
        let grid = scaling::geometric_grid(1e-3, 0.5, 0.5f64.powf(0.25));
        let fit = estimate_dimensions(
            |eps| mu.partition_sum(0.5, eps),
            0.5,
            &grid,
            (1e-3, 0.5),
            DimensionRoute::BallScaling,
        )
        .unwrap();
        assert!(fit.lower_slope.abs() < 0.05 && fit.upper_slope.abs() < 0.05);
    }

    #[test]
    fn two_scale_measure_separates_slopes() {
        // half the mass uniform on a fine grid, half on one atom
        let n = 2048;
        let mut atoms: Vec<(f64, f64)> = (0..n)
            .map(|i| (i as f64 / (n - 1) as f64, 0.5 / n as f64))
            .collect();
        atoms.push((2.0, 0.5));
        let mu = PointMeasure::new(atoms).unwrap();
        let grid = scaling::geometric_grid(4.0 / n as f64, 0.4, 0.5f64.powf(0.25));
        let q = 0.5;
        let fit = estimate_dimensions(
            |eps| mu.partition_sum(q, eps),
            q,
            &grid,
            (4.0 / n as f64, 0.4),
            DimensionRoute::BallScaling,
        )
        .unwrap();
        assert!(
            fit.lower_slope + 0.1 < fit.upper_slope,
            "no separation: [{}, {}]",
            fit.lower_slope,
            fit.upper_slope
        );
    }

    #[test]
    fn packing_estimate_is_zero() {
        let mu = uniform_measure(64);
        assert!(mu.packing_dimension_estimate().abs() < 0.05);
        let single = PointMeasure::new(vec![(0.0, 1.0)]).unwrap();
        assert_eq!(single.packing_dimension_estimate(), 0.0);
    }

    #[test]
    fn atoms_merge_and_floor() {
        let mu = PointMeasure::new(vec![(0.0, 0.5), (1e-15, 0.5), (1.0, 1e-20)]).unwrap();
        assert_eq!(mu.atoms().len(), 1);
        assert!((mu.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn text_and_json_round_trip() {
        let mu = PointMeasure::new(vec![(0.25, 0.5), (-1.5, 1.25), (3.0, 0.0625)]).unwrap();
        let back = PointMeasure::parse_text(&mu.to_text()).unwrap();
        assert_eq!(mu, back);
        let back = PointMeasure::from_json(&mu.to_json()).unwrap();
        assert_eq!(mu, back);
        assert!(PointMeasure::parse_text("0.0 1.0 junk").is_err());
        assert!(PointMeasure::parse_text("# only comments\n").is_err());
        assert!(PointMeasure::from_json("{\"atoms\":[[0.0,-1.0]]}").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn partition_sum_monotone_in_eps(
            positions in proptest::collection::vec(-10.0f64..10.0, 2..40),
            q in 0.05f64..0.95,
            eps in 1e-3f64..1.0,
        ) {
            let atoms: Vec<(f64, f64)> = positions.iter().map(|&p| (p, 1.0)).collect();
            if let Ok(mu) = PointMeasure::new(atoms) {
                let s1 = mu.partition_sum(q, eps);
                let s2 = mu.partition_sum(q, 2.0 * eps);
                prop_assert!(s2 <= s1 * (1.0 + 1e-12));
            }
        }

        #[test]
        fn dimension_slopes_nonnegative_and_ordered(
            positions in proptest::collection::vec(0.0f64..1.0, 16..200),
            q in 0.2f64..0.8,
        ) {
            let atoms: Vec<(f64, f64)> = positions.iter().map(|&p| (p, 1.0)).collect();
            if let Ok(mu) = PointMeasure::new(atoms) {
                if mu.atoms().len() < 8 { return Ok(()); }
                let (lo, hi) = mu.default_scale_window();
                if !(hi > lo * 4.0) { return Ok(()); }
                let grid = scaling::geometric_grid(lo, hi, 0.5f64.powf(0.25));
                if grid.len() < 8 { return Ok(()); }
                let fit = estimate_dimensions(
                    |eps| mu.partition_sum(q, eps),
                    q, &grid, (lo, hi), DimensionRoute::BallScaling);
                if let Ok(fit) = fit {
                    // S is monotone in eps, so every chord (hence every
                    // least-squares sub-window slope) gives D >= 0
                    prop_assert!(fit.lower_slope <= fit.upper_slope + 1e-12);
                    prop_assert!(fit.lower_slope >= -1e-9);
                    // full-window slope bounded by the a-priori range of
                    // ln S over the window span
                    let total = mu.total_mass();
                    let range = (mu.atoms().iter().map(|a| a.1.powf(q)).sum::<f64>()
                        / total.powf(q)).ln();
                    let bound = range / ((1.0 - q) * (hi.ln() - lo.ln()));
                    let full = scaling::lsq_slope(
                        &grid.iter().map(|s| s.ln()).collect::<Vec<_>>(),
                        &grid.iter().map(|&s| mu.partition_sum(q, s).ln()).collect::<Vec<_>>(),
                    ) / (q - 1.0);
                    prop_assert!(full <= bound + 1e-9, "full {full} > bound {bound}");
                }
            }
        }
    }
}
