//! Experiment orchestration: stage pipeline, persistence, and report
//! emission. One full pipeline runs per seed; all outputs are deterministic
//! given config + seeds (fixed summation orders, fixed RNG, no timestamps
//! in data files).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, InitialState};
use crate::construct;
use crate::dynamics::{self, IndexMap, MomentOptions, MomentSeries, TransportEstimate};
use crate::eigen::{eigensolve, EigenSystem};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_hamiltonian, ModelFamily, ModelSpec};
use crate::measure::{estimate_dimensions, DimensionRoute, PointMeasure, QuadratureSpec};
use crate::scaling;
use crate::spacing::{select_weakly_spaced, verify_weakly_spaced};
use crate::spectral::spectral_measure_from_coefficients;

/// Which pipeline stages to execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageSet {
    pub model: bool,
    pub dims: bool,
    pub transport: bool,
    pub spacing: bool,
    pub construct: bool,
}

impl StageSet {
    pub fn all() -> Self {
        StageSet {
            model: true,
            dims: true,
            transport: true,
            spacing: true,
            construct: true,
        }
    }

    pub fn only_model() -> Self {
        StageSet {
            model: true,
            dims: false,
            transport: false,
            spacing: false,
            construct: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Record of one run: data files are bit-deterministic in config + seeds;
/// the timing block and timestamp describe the producing run only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub version: String,
    pub created_unix: u64,
    pub output_dir: PathBuf,
    /// relative to output_dir
    pub files: Vec<PathBuf>,
    pub stages: Vec<StageTiming>,
    /// per-seed quasiballistic classification, if transport ran
    pub quasiballistic: Vec<(u64, bool)>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("manifest: {e}")))
    }

    /// Manifest invariant: every listed file exists and carries the
    /// manifest's config hash.
    pub fn verify_files(&self) -> Result<()> {
        for rel in &self.files {
            let path = self.output_dir.join(rel);
            let bytes = fs::read(&path).map_err(|_| {
                Error::MissingStage(format!("missing output file {}", path.display()))
            })?;
            // binary caches carry a seed-keyed hash checked at decode time;
            // text artifacts must embed the config hash verbatim
            let hash = self.config_hash.as_bytes();
            let tagged = path.extension().is_some_and(|e| e == "bin")
                || bytes.windows(hash.len()).any(|w| w == hash);
            if !tagged {
                return Err(Error::MissingStage(format!(
                    "{} does not carry config hash {}",
                    path.display(),
                    self.config_hash
                )));
            }
        }
        Ok(())
    }
}

fn hex_to_key(hash: &str) -> [u8; 32] {
    let mut key = [0u8; 32];
    for (i, chunk) in hash.as_bytes().chunks(2).take(32).enumerate() {
        let s = std::str::from_utf8(chunk).unwrap_or("00");
        key[i] = u8::from_str_radix(s, 16).unwrap_or(0);
    }
    key
}

fn sha_with_seed(key: &[u8; 32], seed: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(key);
    h.update(seed.to_le_bytes());
    h.finalize().into()
}

fn model_for_seed(spec: &ModelSpec, seed: u64) -> ModelSpec {
    let mut m = spec.clone();
    if let ModelFamily::Anderson { seed: s, .. } = &mut m.family {
        *s = seed;
    }
    m
}

fn write_file(dir: &Path, rel: &str, bytes: &[u8], files: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(rel);
    fs::write(&path, bytes)?;
    files.push(PathBuf::from(rel));
    Ok(())
}

fn header(hash: &str, stage: &str, columns: &str) -> String {
    format!("# config {hash}\n# stage {stage}\n# columns {columns}\n")
}

struct SeedRun {
    seed: u64,
    eig: EigenSystem,
    xi: Vec<f64>,
    coeffs: Vec<f64>,
    mu: PointMeasure,
    construction: Option<construct::ConstructionSpec>,
}

/// Build eigensystem + initial state + spectral measure for one seed,
/// reusing an on-disk eigensystem cache when present.
fn prepare_seed(cfg: &ExperimentConfig, seed: u64, dir: &Path, files: &mut Vec<PathBuf>) -> Result<SeedRun> {
    let model = model_for_seed(&cfg.model, seed);
    let key = sha_with_seed(&hex_to_key(&cfg.hash()), seed);
    let cache_rel = format!("eigen_s{seed}.bin");
    let cache_path = dir.join(&cache_rel);
    let eig = match fs::read(&cache_path)
        .ok()
        .and_then(|b| EigenSystem::decode_cache(&b).ok())
        .filter(|(_, h)| *h == key)
    {
        Some((eig, _)) => {
            if !files.iter().any(|f| f == Path::new(&cache_rel)) {
                files.push(PathBuf::from(&cache_rel));
            }
            eig
        }
        None => {
            let t = build_hamiltonian(&model)?;
            let eig = eigensolve(&t)?;
            write_file(dir, &cache_rel, &eig.encode_cache(&key), files)?;
            eig
        }
    };

    let n = model.size;
    let origin = model.origin();
    let map = IndexMap::centered(n, origin);
    let q_min = cfg.q_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let mut construction = None;
    let (xi, coeffs) = match &cfg.initial_state {
        InitialState::Delta { site } => {
            let s = site.unwrap_or(origin);
            let mut v = vec![0.0; n];
            v[s] = 1.0;
            let c = eig.coefficients(&v);
            (v, c)
        }
        InitialState::Eigenvector { index } => {
            let v = eig.eigenvector(*index);
            let c = eig.coefficients(&v);
            (v, c)
        }
        InitialState::File { path } => {
            let text = fs::read_to_string(path)?;
            let mut v = Vec::with_capacity(n);
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                v.push(line.parse::<f64>().map_err(|e| {
                    Error::Parse(format!("{}: line {}: {e}", path.display(), i + 1))
                })?);
            }
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
            let norm = v.iter().map(|&x| x * x).sum::<f64>().sqrt();
            if !(norm > 0.0) {
                return Err(Error::Domain("state file has zero norm".into()));
            }
            v.iter_mut().for_each(|x| *x /= norm);
            let c = eig.coefficients(&v);
            (v, c)
        }
        InitialState::LowDim {
            head,
            tail_exponent,
        } => {
            let c = construct::build_low_dim_vector(n, head, *tail_exponent, q_min)?;
            construction = Some(construct::ConstructionSpec::LowDim {
                head: head.clone(),
                tail_exponent: *tail_exponent,
                q_target: q_min,
            });
            (eig.synthesize(&c), c)
        }
        InitialState::HighDim { n: n_param, depth } => {
            let witness =
                select_weakly_spaced(eig.eigenvalues(), 1.0 / *n_param as f64, *depth)?;
            let c = construct::build_high_dim_vector(n, &witness, *n_param, &[], q_min, *depth)?;
            construction = Some(construct::ConstructionSpec::HighDim {
                n: *n_param,
                head: vec![],
                q_target: q_min,
            });
            (eig.synthesize(&c), c)
        }
        InitialState::Divergent { cutoff } => {
            let p_max = cfg.p_grid.iter().copied().fold(1.0, f64::max);
            let mut head = vec![0.0; n];
            head[origin] = 1.0;
            let v = construct::build_divergent_moment_vector(&map, p_max, *cutoff, &head)?;
            construction = Some(construct::ConstructionSpec::DivergentMoment {
                p: p_max,
                cutoff: *cutoff,
            });
            let c = eig.coefficients(&v);
            (v, c)
        }
    };
    let mu = spectral_measure_from_coefficients(eig.eigenvalues(), &coeffs)?;
    Ok(SeedRun {
        seed,
        eig,
        xi,
        coeffs,
        mu,
        construction,
    })
}

/// One row of the dimension table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DimRow {
    pub q: f64,
    pub route: String,
    pub lower: f64,
    pub upper: f64,
    pub global: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DimStage {
    pub config_hash: String,
    pub seed: u64,
    pub window: (f64, f64),
    pub rows: Vec<DimRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransportStage {
    pub config_hash: String,
    pub seed: u64,
    pub window: (f64, f64),
    pub estimates: Vec<TransportEstimate>,
    pub bounds: dynamics::BoundReport,
    pub quasiballistic: bool,
    pub series: MomentSeries,
}

fn dims_stage(cfg: &ExperimentConfig, run: &SeedRun, hash: &str) -> Result<DimStage> {
    let window = match &cfg.scale_window {
        Some(w) => (w.lo, w.hi),
        None => run.mu.default_scale_window(),
    };
    let grid = scaling::geometric_grid(window.0, window.1, 0.5f64.powf(0.25));
    let mut rows = Vec::new();
    for &q in &cfg.q_grid {
        let ball = estimate_dimensions(
            |eps| run.mu.partition_sum(q, eps),
            q,
            &grid,
            window,
            DimensionRoute::BallScaling,
        )?;
        rows.push(DimRow {
            q,
            route: "ball".into(),
            lower: ball.lower_slope,
            upper: ball.upper_slope,
            global: ball.global_slope,
        });
        let meanq = estimate_dimensions(
            |eps| run.mu.mean_q_integral(q, eps),
            q,
            &grid,
            window,
            DimensionRoute::BallScaling,
        )?;
        rows.push(DimRow {
            q,
            route: "mean_q".into(),
            lower: meanq.lower_slope,
            upper: meanq.upper_slope,
            global: meanq.global_slope,
        });
        if cfg.correlation_route {
            let quad = QuadratureSpec::default();
            let tgrid: Vec<f64> = grid.iter().rev().map(|&e| 1.0 / e).collect();
            let twindow = (1.0 / window.1, 1.0 / window.0);
            let corr = estimate_dimensions(
                |t| {
                    run.mu
                        .correlation_integral(q, t, &quad)
                        .unwrap_or(f64::NAN)
                },
                q,
                &tgrid,
                twindow,
                DimensionRoute::Dynamical,
            )?;
            rows.push(DimRow {
                q,
                route: "correlation".into(),
                lower: corr.lower_slope,
                upper: corr.upper_slope,
                global: corr.global_slope,
            });
        }
    }
    Ok(DimStage {
        config_hash: hash.to_string(),
        seed: run.seed,
        window,
        rows,
    })
}

fn transport_stage(cfg: &ExperimentConfig, run: &SeedRun, hash: &str) -> Result<TransportStage> {
    let t = &cfg.time_grid;
    let times = scaling::log_grid(t.lo, t.hi, t.per_decade);
    let map = IndexMap::centered(cfg.model.size, cfg.model.origin());
    let series = dynamics::moments(
        &run.eig,
        &run.xi,
        &cfg.p_grid,
        &times,
        &map,
        &MomentOptions::default(),
    )?;
    let mut estimates = Vec::new();
    for &p in &cfg.p_grid {
        estimates.push(dynamics::transport_exponent(&series, p, (t.lo, t.hi))?);
    }
    // dimension window matched to the probed times (eps ~ 1/t)
    let support = run.mu.default_scale_window();
    let lo = (1.0 / t.hi).max(support.0 * 1e-3);
    let hi = (1.0 / t.lo).min(support.1);
    let window = if hi > lo * 8.0 { (lo, hi) } else { support };
    let bounds = dynamics::verify_bounds(&estimates, &run.mu, window, 0.15)?;
    let quasiballistic = dynamics::classify_quasiballistic(&estimates, 0.15);
    Ok(TransportStage {
        config_hash: hash.to_string(),
        seed: run.seed,
        window,
        estimates,
        bounds,
        quasiballistic,
        series,
    })
}

fn dims_csv(stage: &DimStage) -> String {
    let mut s = header(
        &stage.config_hash,
        "dims",
        "q,route,D_lower,D_upper,D_global (dimensionless)",
    );
    s.push_str("q,route,D_lower,D_upper,D_global\n");
    for r in &stage.rows {
        let _ = writeln!(
            s,
            "{},{},{:.12e},{:.12e},{:.12e}",
            r.q, r.route, r.lower, r.upper, r.global
        );
    }
    s
}

/// Execute the selected stages for every seed. Data files are deterministic;
/// the manifest's timing block is not part of the determinism contract.
pub fn run_experiment(cfg: &ExperimentConfig, stages: StageSet) -> Result<RunManifest> {
    cfg.validate()?;
    let hash = cfg.hash();
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    let mut timings = Vec::new();
    let mut quasi = Vec::new();

    // persist the canonical config itself
    let cfg_text = format!("# config {hash}\n{}", cfg.to_toml());
    write_file(&dir, "config.toml", cfg_text.as_bytes(), &mut files)?;

    for &seed in &cfg.seeds {
        let t0 = Instant::now();
        let run = prepare_seed(cfg, seed, &dir, &mut files)?;
        timings.push(StageTiming {
            stage: format!("model_s{seed}"),
            seconds: t0.elapsed().as_secs_f64(),
        });

        let mtext = format!(
            "{}{}",
            header(&hash, "measure", "position mass"),
            run.mu.to_text()
        );
        write_file(&dir, &format!("measure_s{seed}.txt"), mtext.as_bytes(), &mut files)?;

        if let Some(spec) = &run.construction {
            if stages.construct {
                let blob = serde_json::json!({
                    "config_hash": hash,
                    "seed": seed,
                    "spec": spec,
                    "coefficients": run.coeffs,
                });
                write_file(
                    &dir,
                    &format!("construct_s{seed}.json"),
                    serde_json::to_string_pretty(&blob).unwrap().as_bytes(),
                    &mut files,
                )?;
            }
        }

        if stages.dims {
            let t0 = Instant::now();
            let stage = dims_stage(cfg, &run, &hash)?;
            write_file(&dir, &format!("dims_s{seed}.csv"), dims_csv(&stage).as_bytes(), &mut files)?;
            write_file(
                &dir,
                &format!("dims_s{seed}.json"),
                serde_json::to_string_pretty(&stage).unwrap().as_bytes(),
                &mut files,
            )?;
            timings.push(StageTiming {
                stage: format!("dims_s{seed}"),
                seconds: t0.elapsed().as_secs_f64(),
            });
        }

        if stages.transport {
            let t0 = Instant::now();
            let stage = transport_stage(cfg, &run, &hash)?;
            let csv = stage.series.to_csv(&format!(
                "config {hash}\nstage moments\nmoment of |X|^p, time-averaged (lattice units)"
            ));
            write_file(&dir, &format!("moments_s{seed}.csv"), csv.as_bytes(), &mut files)?;
            write_file(
                &dir,
                &format!("transport_s{seed}.json"),
                serde_json::to_string_pretty(&stage).unwrap().as_bytes(),
                &mut files,
            )?;
            quasi.push((seed, stage.quasiballistic));
            timings.push(StageTiming {
                stage: format!("transport_s{seed}"),
                seconds: t0.elapsed().as_secs_f64(),
            });
        }

        if stages.spacing {
            if let Some(sp) = &cfg.spacing {
                let t0 = Instant::now();
                let witness = select_weakly_spaced(run.eig.eigenvalues(), sp.alpha, sp.depth)?;
                if !verify_weakly_spaced(run.eig.eigenvalues(), &witness) {
                    return Err(Error::InvalidConstruction(
                        "constructed witness failed independent verification".into(),
                    ));
                }
                let blob = serde_json::json!({
                    "config_hash": hash,
                    "seed": seed,
                    "witness": witness,
                });
                write_file(
                    &dir,
                    &format!("spacing_s{seed}.json"),
                    serde_json::to_string_pretty(&blob).unwrap().as_bytes(),
                    &mut files,
                )?;
                timings.push(StageTiming {
                    stage: format!("spacing_s{seed}"),
                    seconds: t0.elapsed().as_secs_f64(),
                });
            }
        }
    }

    let manifest = RunManifest {
        config_hash: hash,
        version: env!("CARGO_PKG_VERSION").to_string(),
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        output_dir: dir.clone(),
        files,
        stages: timings,
        quasiballistic: quasi,
    };
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).unwrap(),
    )?;
    Ok(manifest)
}

/// Render summary tables and two-column plot-data files from a completed
/// run. Reads the per-stage JSON files listed in the manifest.
pub fn report(manifest: &RunManifest) -> Result<String> {
    let dir = &manifest.output_dir;
    let mut summary = String::new();
    let _ = writeln!(summary, "run {}", manifest.config_hash);
    let _ = writeln!(summary, "version {}", manifest.version);

    let mut saw_dims = false;
    let mut saw_transport = false;
    for rel in &manifest.files {
        let name = rel.to_string_lossy();
        if let Some(seed) = name
            .strip_prefix("dims_s")
            .and_then(|r| r.strip_suffix(".json"))
        {
            saw_dims = true;
            let stage: DimStage = serde_json::from_str(&fs::read_to_string(dir.join(rel.as_path()))?)
                .map_err(|e| Error::Parse(format!("{name}: {e}")))?;
            let _ = writeln!(
                summary,
                "\ndimension estimates, seed {seed}, window [{:.3e}, {:.3e}]",
                stage.window.0, stage.window.1
            );
            let _ = writeln!(summary, "{:>8} {:>12} {:>10} {:>10} {:>10}", "q", "route", "D_lower", "D_upper", "D_global");
            for r in &stage.rows {
                let _ = writeln!(
                    summary,
                    "{:>8.4} {:>12} {:>10.4} {:>10.4} {:>10.4}",
                    r.q, r.route, r.lower, r.upper, r.global
                );
            }
        }
        if let Some(seed) = name
            .strip_prefix("transport_s")
            .and_then(|r| r.strip_suffix(".json"))
        {
            saw_transport = true;
            let stage: TransportStage =
                serde_json::from_str(&fs::read_to_string(dir.join(rel.as_path()))?)
                    .map_err(|e| Error::Parse(format!("{name}: {e}")))?;
            let _ = writeln!(
                summary,
                "\ntransport, seed {seed}: quasiballistic = {}",
                stage.quasiballistic
            );
            let _ = writeln!(
                summary,
                "{:>6} {:>10} {:>10} {:>10} {:>8} {:>8}",
                "p", "alpha+", "D+(q)p", "pack*p", "gfd", "packing"
            );
            for r in &stage.bounds.rows {
                let _ = writeln!(
                    summary,
                    "{:>6.2} {:>10.4} {:>10.4} {:>10.4} {:>8} {:>8}",
                    r.p,
                    r.alpha_plus,
                    r.gfd_bound,
                    r.packing_bound,
                    if r.gfd_pass { "pass" } else { "FAIL" },
                    if r.packing_pass { "pass" } else { "FAIL" }
                );
            }
            // plot data: ln t vs ln M per p
            for (pi, &p) in stage.series.p_values.iter().enumerate() {
                let mut data = header(
                    &manifest.config_hash,
                    "plot-moments",
                    "ln_t ln_moment (dimensionless)",
                );
                for (ti, &t) in stage.series.times.iter().enumerate() {
                    let m = stage.series.moments[ti][pi].max(f64::MIN_POSITIVE);
                    let _ = writeln!(data, "{:.12e} {:.12e}", t.ln(), m.ln());
                }
                fs::write(dir.join(format!("plot_moments_s{seed}_p{p}.dat")), data)?;
            }
        }
        if let Some(seed) = name
            .strip_prefix("spacing_s")
            .and_then(|r| r.strip_suffix(".json"))
        {
            let blob: serde_json::Value =
                serde_json::from_str(&fs::read_to_string(dir.join(rel.as_path()))?)
                    .map_err(|e| Error::Parse(format!("{name}: {e}")))?;
            if let Some(w) = blob.get("witness") {
                let depth = w
                    .get("levels")
                    .and_then(|l| l.as_array())
                    .map_or(0, |l| l.len());
                let _ = writeln!(
                    summary,
                    "\nspacing witness, seed {seed}: depth {depth}, alpha {}, L0 {}",
                    w.get("alpha").unwrap_or(&serde_json::Value::Null),
                    w.get("l0").unwrap_or(&serde_json::Value::Null)
                );
            }
        }
    }
    if !saw_dims && !saw_transport {
        return Err(Error::MissingStage(
            "no dims or transport stage outputs in the manifest".into(),
        ));
    }
    fs::write(dir.join("summary.txt"), &summary)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TimeGridSpec;

    fn smoke_config(dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            model: ModelSpec {
                family: ModelFamily::Free,
                size: 128,
                index_origin: None,
            },
            initial_state: InitialState::Delta { site: None },
            q_grid: vec![1.0 / 3.0, 0.5],
            p_grid: vec![1.0, 2.0],
            time_grid: TimeGridSpec {
                lo: 1.0,
                hi: 16.0,
                per_decade: 10,
            },
            scale_window: None,
            seeds: vec![1],
            output_dir: dir.to_path_buf(),
            correlation_route: false,
            spacing: None,
        }
    }

    #[test]
    fn smoke_run_is_deterministic_and_verifiable() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = smoke_config(&tmp.path().join("a"));
        let manifest = run_experiment(&cfg, StageSet::all()).unwrap();
        manifest.verify_files().unwrap();
        assert!(manifest.files.iter().any(|f| f.to_string_lossy().starts_with("moments")));

        // identical config rerun in a fresh directory: identical data bytes
        let mut cfg2 = smoke_config(&tmp.path().join("a"));
        cfg2.output_dir = cfg.output_dir.clone();
        // hash must match for byte-identical headers
        assert_eq!(cfg.hash(), cfg2.hash());
        let mut first = std::collections::BTreeMap::new();
        for rel in &manifest.files {
            first.insert(rel.clone(), fs::read(cfg.output_dir.join(rel)).unwrap());
        }
        let manifest2 = run_experiment(&cfg2, StageSet::all()).unwrap();
        for rel in &manifest2.files {
            let bytes = fs::read(cfg.output_dir.join(rel)).unwrap();
            assert_eq!(first.get(rel).unwrap(), &bytes, "{}", rel.display());
        }

        let summary = report(&manifest).unwrap();
        assert!(summary.contains("transport"));
        assert!(summary.contains("dimension estimates"));
        assert!(cfg.output_dir.join("summary.txt").exists());
    }

    #[test]
    fn report_requires_stage_outputs() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = smoke_config(&tmp.path().join("b"));
        let manifest = run_experiment(&cfg, StageSet::only_model()).unwrap();
        assert!(matches!(report(&manifest), Err(Error::MissingStage(_))));
    }

    #[test]
    fn eigen_cache_is_reused() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = smoke_config(&tmp.path().join("c"));
        run_experiment(&cfg, StageSet::only_model()).unwrap();
        let cache = cfg
            .output_dir
            .read_dir()
            .unwrap()
            .filter_map(|e| e.ok())
            .find(|e| e.file_name().to_string_lossy().ends_with(".bin"))
            .unwrap();
        let before = cache.metadata().unwrap().modified().unwrap();
        run_experiment(&cfg, StageSet::only_model()).unwrap();
        let after = fs::metadata(cache.path()).unwrap().modified().unwrap();
        assert_eq!(before, after, "cache was rebuilt");
    }
}
