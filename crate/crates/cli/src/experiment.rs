//! Simulation protocols: generate, fit, evaluate and aggregate.
//!
//! Every replicate derives its own seed from the base seed and its cell
//! coordinates, so results do not depend on the worker count or on the order
//! in which workers pick up replicates.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use hcls::eval::{paired_comparison, ComparisonRecord, ComparisonSummary, PairMatrix, COMPARISON_COLUMNS};
use hcls::generative::{
    calibrate_alpha_for_density, expected_density, generate_graph, sample_positions, CALIBRATION_REPLICATES,
};
use hcls::graph::{metric_panel, MetricPanel, PANEL_COLUMNS};
use hcls::vi::VariationalConfig;
use hcls::{Error, Geometry, Graph, LatentConfiguration, ModelParams, Result};

use crate::pipeline::{fit_graph, Engine, FitModel, FitOptions};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one unit of work, mixed from the base seed and its coordinates.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix64(base), |h, &t| splitmix64(h ^ t))
}

/// Runs `f` over `items` on `jobs` threads; output order follows `items`.
pub fn run_pool<T, U, F>(items: &[T], jobs: usize, f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync,
{
    let jobs = jobs.clamp(1, items.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<U>>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= items.len() {
                    break;
                }
                let out = f(&items[k]);
                *slots[k].lock().expect("slot lock") = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot lock").expect("every slot filled"))
        .collect()
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Positions and graph for one replicate.
pub fn simulate(geometry: Geometry, n: usize, params: ModelParams, seed: u64) -> Result<(LatentConfiguration, Graph)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = sample_positions(geometry, n, params, &mut rng)?;
    let g = generate_graph(&config, &mut rng);
    Ok((config, g))
}

/// True when AUC is defined: at least one edge and one non-edge.
fn scorable(g: &Graph) -> bool {
    g.m() > 0 && g.m() < g.pair_count()
}

// ---------------------------------------------------------------------------
// Model comparison across network sizes

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Table2Config {
    pub n: Vec<usize>,
    pub radius: Vec<f64>,
    pub replicates: usize,
    pub temperature: f64,
    pub engine: Engine,
    pub seed: u64,
    pub jobs: usize,
    pub threshold: f64,
    pub fit: FitOptions,
}

impl Default for Table2Config {
    fn default() -> Self {
        Table2Config {
            n: vec![30, 50],
            radius: vec![3.0, 5.0],
            replicates: 3,
            temperature: 0.01,
            engine: Engine::Vi,
            seed: 0,
            jobs: default_jobs(),
            threshold: 0.5,
            fit: FitOptions::default(),
        }
    }
}

impl Table2Config {
    pub fn full() -> Self {
        Table2Config {
            n: vec![30, 50, 100, 150, 200],
            radius: vec![3.0, 5.0, 7.0, 10.0],
            replicates: 30,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Output {
    pub records: Vec<ComparisonRecord>,
    pub summary: Vec<ComparisonSummary>,
    /// `(N, R, replicate)` of graphs with no edges (or no non-edges).
    pub skipped: Vec<(usize, f64, usize)>,
}

pub fn run_table2(cfg: &Table2Config) -> Result<Table2Output> {
    let units: Vec<(usize, f64, usize)> = cfg
        .n
        .iter()
        .flat_map(|&n| {
            cfg.radius
                .iter()
                .flat_map(move |&r| (0..cfg.replicates).map(move |k| (n, r, k)))
        })
        .collect();
    let results = run_pool(&units, cfg.jobs, |&(n, r, k)| {
        let seed = derive_seed(cfg.seed, &[n as u64, r.to_bits(), k as u64]);
        let params = ModelParams::new(r, r, cfg.temperature)?;
        let (_, g) = simulate(Geometry::Hyperbolic, n, params, seed)?;
        if !scorable(&g) {
            return Ok(None);
        }
        let mut out = Vec::new();
        for model in FitModel::ALL {
            let fit = fit_graph(&g, model, cfg.engine, &cfg.fit, derive_seed(seed, &[1]))?;
            let m = fit.metrics(&g, None, cfg.threshold)?;
            out.push(ComparisonRecord {
                n,
                radius: r,
                replicate: k,
                model: model.to_string(),
                auc: m.auc,
                accuracy: m.accuracy,
            });
        }
        Ok(Some(out))
    })?;
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (unit, res) in units.iter().zip(results) {
        match res {
            Some(r) => records.extend(r),
            None => skipped.push(*unit),
        }
    }
    Ok(Table2Output {
        summary: paired_comparison(&records),
        records,
        skipped,
    })
}

impl Table2Output {
    pub fn write_summary<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{COMPARISON_COLUMNS}")?;
        for s in &self.summary {
            writeln!(out, "{}", s.csv_row())?;
        }
        Ok(())
    }

    pub fn write_records<W: Write>(&self, mut out: W) -> Result<()> {
        write_records(&mut out, &self.records)
    }

    /// Mean AUC per model in cell `(n, r)`.
    pub fn mean_auc(&self, n: usize, r: f64) -> BTreeMap<String, f64> {
        self.summary
            .iter()
            .filter(|s| s.n == n && s.radius == r)
            .map(|s| (s.model.clone(), s.auc.mean))
            .collect()
    }
}

fn write_records<W: Write>(out: &mut W, records: &[ComparisonRecord]) -> Result<()> {
    writeln!(out, "N,R,replicate,model,auc,accuracy")?;
    for r in records {
        writeln!(out, "{},{},{},{},{},{}", r.n, r.radius, r.replicate, r.model, r.auc, r.accuracy)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Tree-likeness ensembles

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Fig5Config {
    pub n: usize,
    pub radius: f64,
    pub temperatures: Vec<f64>,
    pub geometries: Vec<Geometry>,
    pub replicates: usize,
    pub seed: u64,
    pub jobs: usize,
}

impl Default for Fig5Config {
    fn default() -> Self {
        Fig5Config {
            n: 100,
            radius: 5.0,
            temperatures: vec![0.01, 0.1, 0.5],
            geometries: vec![Geometry::Hyperbolic, Geometry::Euclidean],
            replicates: 50,
            seed: 0,
            jobs: default_jobs(),
        }
    }
}

impl Fig5Config {
    pub fn full() -> Self {
        Fig5Config {
            replicates: 1000,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig5Row {
    pub geometry: Geometry,
    pub temperature: f64,
    pub alpha: f64,
    pub replicate: usize,
    pub panel: MetricPanel,
}

/// Means of the panel over one `(geometry, T)` ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig5Summary {
    pub geometry: Geometry,
    pub temperature: f64,
    pub alpha: f64,
    pub replicates: usize,
    pub density: f64,
    pub circuit_rank: f64,
    pub clustering: f64,
    pub mean_betweenness: f64,
    pub mean_closeness: f64,
    pub mean_eigenvector: f64,
    pub mean_path_length: f64,
    pub modularity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig5Output {
    /// Expected density of the hyperbolic ensemble at `α = R` and the lowest
    /// temperature; every other ensemble is calibrated to it.
    pub target_density: f64,
    pub rows: Vec<Fig5Row>,
    pub summary: Vec<Fig5Summary>,
}

pub fn run_fig5(cfg: &Fig5Config) -> Result<Fig5Output> {
    if cfg.temperatures.is_empty() || cfg.geometries.is_empty() {
        return Err(Error::Config("fig5 needs at least one temperature and one geometry".into()));
    }
    if cfg.geometries.contains(&Geometry::Spherical) {
        return Err(Error::Config("fig5 supports hyperbolic and euclidean geometries".into()));
    }
    let t_ref = cfg.temperatures.iter().copied().fold(f64::INFINITY, f64::min);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[u64::MAX]));
    let reference = ModelParams::new(cfg.radius, cfg.radius, t_ref)?;
    let mut target = 0.0;
    for _ in 0..CALIBRATION_REPLICATES {
        target += expected_density(&sample_positions(Geometry::Hyperbolic, cfg.n, reference, &mut rng)?);
    }
    let target = target / CALIBRATION_REPLICATES as f64;

    let mut cells = Vec::new();
    for &geometry in &cfg.geometries {
        for &t in &cfg.temperatures {
            let alpha = if geometry == Geometry::Hyperbolic && t == t_ref {
                cfg.radius
            } else {
                calibrate_alpha_for_density(geometry, cfg.n, cfg.radius, t, target, &mut rng)?
            };
            cells.push((geometry, t, alpha));
        }
    }
    let units: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.replicates).map(move |k| (c, k)))
        .collect();
    let rows = run_pool(&units, cfg.jobs, |&(c, k)| {
        let (geometry, t, alpha) = cells[c];
        let seed = derive_seed(cfg.seed, &[geometry as u64, t.to_bits(), k as u64]);
        let (_, g) = simulate(geometry, cfg.n, ModelParams::new(cfg.radius, alpha, t)?, seed)?;
        Ok(Fig5Row {
            geometry,
            temperature: t,
            alpha,
            replicate: k,
            panel: metric_panel(&g),
        })
    })?;
    let summary = cells
        .iter()
        .map(|&(geometry, t, alpha)| {
            let sel: Vec<&MetricPanel> = rows
                .iter()
                .filter(|r| r.geometry == geometry && r.temperature == t)
                .map(|r| &r.panel)
                .collect();
            let k = sel.len().max(1) as f64;
            let mean = |f: &dyn Fn(&MetricPanel) -> f64| sel.iter().map(|p| f(p)).sum::<f64>() / k;
            Fig5Summary {
                geometry,
                temperature: t,
                alpha,
                replicates: sel.len(),
                density: mean(&|p| p.edge_density),
                circuit_rank: mean(&|p| p.circuit_rank as f64),
                clustering: mean(&|p| p.clustering),
                mean_betweenness: mean(&|p| p.mean_betweenness),
                mean_closeness: mean(&|p| p.mean_closeness),
                mean_eigenvector: mean(&|p| p.mean_eigenvector),
                mean_path_length: mean(&|p| p.mean_path_length),
                modularity: mean(&|p| p.modularity),
            }
        })
        .collect();
    Ok(Fig5Output {
        target_density: target,
        rows,
        summary,
    })
}

fn geometry_name(g: Geometry) -> &'static str {
    match g {
        Geometry::Hyperbolic => "hyperbolic",
        Geometry::Euclidean => "euclidean",
        Geometry::Spherical => "spherical",
    }
}

impl Fig5Output {
    pub fn summary_for(&self, geometry: Geometry, temperature: f64) -> Option<&Fig5Summary> {
        self.summary
            .iter()
            .find(|s| s.geometry == geometry && s.temperature == temperature)
    }

    pub fn write_rows<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "geometry,T,alpha,replicate,{}", PANEL_COLUMNS.join(","))?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                geometry_name(r.geometry),
                r.temperature,
                r.alpha,
                r.replicate,
                r.panel.csv_row()
            )?;
        }
        Ok(())
    }

    pub fn write_summary<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "geometry,T,alpha,replicates,density,circuit_rank,clustering,mean_betweenness,mean_closeness,mean_eigenvector,mean_path_length,modularity"
        )?;
        for s in &self.summary {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                geometry_name(s.geometry),
                s.temperature,
                s.alpha,
                s.replicates,
                s.density,
                s.circuit_rank,
                s.clustering,
                s.mean_betweenness,
                s.mean_closeness,
                s.mean_eigenvector,
                s.mean_path_length,
                s.modularity
            )?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Hyperbolic versus Euclidean variational fits at scale

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Fig8Config {
    pub n: Vec<usize>,
    pub radius: Vec<f64>,
    pub replicates: usize,
    pub temperature: f64,
    pub seed: u64,
    pub jobs: usize,
    pub threshold: f64,
    pub vi: VariationalConfig,
}

impl Default for Fig8Config {
    fn default() -> Self {
        Fig8Config {
            n: vec![500, 1000],
            radius: vec![5.0, 7.0],
            replicates: 3,
            temperature: 0.01,
            seed: 0,
            jobs: default_jobs(),
            threshold: 0.5,
            vi: VariationalConfig::default(),
        }
    }
}

impl Fig8Config {
    pub fn full() -> Self {
        Fig8Config {
            n: vec![50, 100, 150, 200, 500, 1000, 5000],
            radius: vec![3.0, 5.0, 7.0, 10.0],
            replicates: 10,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig8Row {
    pub n: usize,
    pub radius: f64,
    pub replicate: usize,
    pub hcls_auc: f64,
    pub ecls_auc: f64,
    pub hcls_accuracy: f64,
    pub ecls_accuracy: f64,
}

pub fn run_fig8(cfg: &Fig8Config) -> Result<Vec<Fig8Row>> {
    let units: Vec<(usize, f64, usize)> = cfg
        .n
        .iter()
        .flat_map(|&n| {
            cfg.radius
                .iter()
                .flat_map(move |&r| (0..cfg.replicates).map(move |k| (n, r, k)))
        })
        .collect();
    let options = FitOptions {
        vi: cfg.vi.clone(),
        ..FitOptions::default()
    };
    let rows = run_pool(&units, cfg.jobs, |&(n, r, k)| {
        let seed = derive_seed(cfg.seed, &[n as u64, r.to_bits(), k as u64]);
        let (_, g) = simulate(Geometry::Hyperbolic, n, ModelParams::new(r, r, cfg.temperature)?, seed)?;
        if !scorable(&g) {
            return Ok(None);
        }
        let fit_seed = derive_seed(seed, &[1]);
        let h = fit_graph(&g, FitModel::Hcls, Engine::Vi, &options, fit_seed)?.metrics(&g, None, cfg.threshold)?;
        let e = fit_graph(&g, FitModel::Ecls, Engine::Vi, &options, fit_seed)?.metrics(&g, None, cfg.threshold)?;
        Ok(Some(Fig8Row {
            n,
            radius: r,
            replicate: k,
            hcls_auc: h.auc,
            ecls_auc: e.auc,
            hcls_accuracy: h.accuracy,
            ecls_accuracy: e.accuracy,
        }))
    })?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_fig8<W: Write>(rows: &[Fig8Row], mut out: W) -> Result<()> {
    writeln!(out, "N,R,replicate,hcls_auc,ecls_auc,hcls_accuracy,ecls_accuracy")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n, r.radius, r.replicate, r.hcls_auc, r.ecls_auc, r.hcls_accuracy, r.ecls_accuracy
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Misspecification study

/// Data-generating settings of the misspecification study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Setting {
    #[serde(rename = "euclidean-T0.5")]
    EuclideanHot,
    #[serde(rename = "hyperbolic-T0.01")]
    HyperbolicCold,
    #[serde(rename = "hyperbolic-T0.5")]
    HyperbolicHot,
}

impl Setting {
    pub const ALL: [Setting; 3] = [Setting::EuclideanHot, Setting::HyperbolicCold, Setting::HyperbolicHot];

    pub fn label(self) -> &'static str {
        match self {
            Setting::EuclideanHot => "euclidean-T0.5",
            Setting::HyperbolicCold => "hyperbolic-T0.01",
            Setting::HyperbolicHot => "hyperbolic-T0.5",
        }
    }

    fn geometry(self) -> Geometry {
        match self {
            Setting::EuclideanHot => Geometry::Euclidean,
            _ => Geometry::Hyperbolic,
        }
    }

    fn temperature(self) -> f64 {
        match self {
            Setting::HyperbolicCold => 0.01,
            _ => 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MisspecConfig {
    pub n: Vec<usize>,
    pub radius: f64,
    pub replicates: usize,
    pub engine: Engine,
    pub seed: u64,
    pub jobs: usize,
    pub threshold: f64,
    pub fit: FitOptions,
}

impl Default for MisspecConfig {
    fn default() -> Self {
        MisspecConfig {
            n: vec![50, 100],
            radius: 5.0,
            replicates: 3,
            engine: Engine::Vi,
            seed: 0,
            jobs: default_jobs(),
            threshold: 0.5,
            fit: FitOptions::default(),
        }
    }
}

impl MisspecConfig {
    pub fn full() -> Self {
        MisspecConfig {
            replicates: 10,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisspecRecord {
    pub setting: Setting,
    pub n: usize,
    pub replicate: usize,
    pub model: FitModel,
    pub auc: f64,
    pub accuracy: f64,
}

/// Head-to-head tally of two models on one metric in one `(setting, N)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseRow {
    pub setting: Setting,
    pub n: usize,
    pub model_a: FitModel,
    pub model_b: FitModel,
    pub metric: String,
    pub a_better: usize,
    pub b_better: usize,
    pub ties: usize,
    pub mean_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisspecOutput {
    /// Euclidean α matched to the hot hyperbolic density, per N.
    pub euclidean_alpha: Vec<(usize, f64)>,
    pub records: Vec<MisspecRecord>,
    pub pairwise: Vec<PairwiseRow>,
}

pub fn run_misspec(cfg: &MisspecConfig) -> Result<MisspecOutput> {
    let mut euclidean_alpha = Vec::new();
    for &n in &cfg.n {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[u64::MAX, n as u64]));
        let hot = ModelParams::new(cfg.radius, cfg.radius, 0.5)?;
        let mut target = 0.0;
        for _ in 0..CALIBRATION_REPLICATES {
            target += expected_density(&sample_positions(Geometry::Hyperbolic, n, hot, &mut rng)?);
        }
        target /= CALIBRATION_REPLICATES as f64;
        let alpha = calibrate_alpha_for_density(Geometry::Euclidean, n, cfg.radius, 0.5, target, &mut rng)?;
        euclidean_alpha.push((n, alpha));
    }
    let units: Vec<(Setting, usize, f64, usize)> = Setting::ALL
        .iter()
        .flat_map(|&s| {
            euclidean_alpha.iter().flat_map(move |&(n, ea)| {
                (0..cfg.replicates).map(move |k| (s, n, ea, k))
            })
        })
        .collect();
    let results = run_pool(&units, cfg.jobs, |&(setting, n, euclid_alpha, k)| {
        let seed = derive_seed(cfg.seed, &[setting as u64, n as u64, k as u64]);
        let alpha = if setting == Setting::EuclideanHot { euclid_alpha } else { cfg.radius };
        let params = ModelParams::new(cfg.radius, alpha, setting.temperature())?;
        let (_, g) = simulate(setting.geometry(), n, params, seed)?;
        if !scorable(&g) {
            return Ok(Vec::new());
        }
        FitModel::ALL
            .iter()
            .map(|&model| {
                let m = fit_graph(&g, model, cfg.engine, &cfg.fit, derive_seed(seed, &[1]))?.metrics(&g, None, cfg.threshold)?;
                Ok(MisspecRecord {
                    setting,
                    n,
                    replicate: k,
                    model,
                    auc: m.auc,
                    accuracy: m.accuracy,
                })
            })
            .collect()
    })?;
    let records: Vec<MisspecRecord> = results.into_iter().flatten().collect();
    Ok(MisspecOutput {
        pairwise: pairwise_table(&records),
        euclidean_alpha,
        records,
    })
}

/// Records of one (setting, N) cell keyed by (replicate, model).
type CellRecords<'a> = BTreeMap<(usize, FitModel), &'a MisspecRecord>;

pub fn pairwise_table(records: &[MisspecRecord]) -> Vec<PairwiseRow> {
    let mut by_cell: BTreeMap<(Setting, usize), CellRecords> = BTreeMap::new();
    for r in records {
        by_cell.entry((r.setting, r.n)).or_default().insert((r.replicate, r.model), r);
    }
    let mut rows = Vec::new();
    for ((setting, n), cell) in &by_cell {
        for (ia, &a) in FitModel::ALL.iter().enumerate() {
            for &b in &FitModel::ALL[ia + 1..] {
                for metric in ["auc", "accuracy"] {
                    let value = |r: &MisspecRecord| if metric == "auc" { r.auc } else { r.accuracy };
                    let (mut wa, mut wb, mut ties, mut diff, mut count) = (0, 0, 0, 0.0, 0);
                    for (&(k, model), ra) in cell {
                        if model != a {
                            continue;
                        }
                        let Some(rb) = cell.get(&(k, b)) else { continue };
                        let (va, vb) = (value(ra), value(rb));
                        match va.partial_cmp(&vb) {
                            Some(std::cmp::Ordering::Greater) => wa += 1,
                            Some(std::cmp::Ordering::Less) => wb += 1,
                            _ => ties += 1,
                        }
                        diff += va - vb;
                        count += 1;
                    }
                    rows.push(PairwiseRow {
                        setting: *setting,
                        n: *n,
                        model_a: a,
                        model_b: b,
                        metric: metric.into(),
                        a_better: wa,
                        b_better: wb,
                        ties,
                        mean_difference: if count > 0 { diff / count as f64 } else { f64::NAN },
                    });
                }
            }
        }
    }
    rows
}

impl MisspecOutput {
    pub fn write_records<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "setting,N,replicate,model,auc,accuracy")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.setting.label(),
                r.n,
                r.replicate,
                r.model,
                r.auc,
                r.accuracy
            )?;
        }
        Ok(())
    }

    pub fn write_pairwise<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "setting,N,model_a,model_b,metric,a_better,b_better,ties,mean_difference")?;
        for r in &self.pairwise {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.setting.label(),
                r.n,
                r.model_a,
                r.model_b,
                r.metric,
                r.a_better,
                r.b_better,
                r.ties,
                r.mean_difference
            )?;
        }
        Ok(())
    }
}

/// Strict upper triangle of the true distances of `config`.
pub fn truth_distances(config: &LatentConfiguration) -> Result<PairMatrix> {
    PairMatrix::new(config.n(), config.pairwise_distances())
}
