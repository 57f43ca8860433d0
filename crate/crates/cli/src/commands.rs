use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use hcls::eval::PairMatrix;
use hcls::generative::{calibrate_alpha_for_density, expected_density, sample_positions, CALIBRATION_REPLICATES};
use hcls::graph::write_edge_list;
use hcls::graph::{metric_panel, PANEL_COLUMNS};
use hcls::hmc::HmcInit;
use hcls::vi::{Checkpoint, LatentModel};
use hcls::{Error, Geometry, LatentConfiguration, ModelParams};

use crate::dataset::{load_edge_list, LoadedGraph};
use crate::experiment::{
    derive_seed, run_fig5, run_fig8, run_misspec, run_table2, simulate, truth_distances, write_fig8, Fig5Config,
    Fig8Config, MisspecConfig, Table2Config,
};
use crate::export::{canonicalize_euclidean, canonicalize_hyperbolic, poincare, procrustes_align, svg_scatter, RotationWeights};
use crate::pipeline::{fit_graph, Engine, FitModel, FitOptions};

/// Environment variable that overrides the default output directory.
pub const OUTPUT_DIR_ENV: &str = "HCLS_OUTPUT_DIR";

pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const DATA: u8 = 2;
    pub const NUMERICAL: u8 = 3;
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) => exit::USAGE,
            Error::Numerical { .. } | Error::GradientSingular | Error::Calibration(_) => exit::NUMERICAL,
            Error::Domain(_)
            | Error::Undefined(_)
            | Error::Parse { .. }
            | Error::Format(_)
            | Error::Io(_)
            | Error::Json(_) => exit::DATA,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e).into()
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError {
        code: exit::USAGE,
        message: msg.into(),
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "hcls", version, about = "Hyperbolic continuous latent space network models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate graphs over a grid of sizes and radii.
    Generate(GenerateArgs),
    /// Tree-likeness metric panel, one CSV row per edge list.
    Metrics(MetricsArgs),
    /// Fit one model to an edge list and score the reconstruction.
    Fit(FitArgs),
    /// Run a simulation protocol end to end.
    Experiment(ExperimentArgs),
    /// Write a fitted embedding in canonical orientation.
    ExportEmbedding(ExportArgs),
    /// Summarize an edge list or a checkpoint.
    Info(InfoArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// JSON grid description.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InitArg {
    Prior,
    Variational,
    Spectral,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    pub input: PathBuf,
    #[arg(long, default_value = "vi")]
    pub engine: String,
    #[arg(long, default_value = "hcls")]
    pub model: String,
    /// JSON engine settings (`{"vi": {...}, "hmc": {...}}`).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub warmup: Option<usize>,
    #[arg(long)]
    pub draws: Option<usize>,
    #[arg(long)]
    pub leapfrog: Option<usize>,
    #[arg(long, value_enum)]
    pub hmc_init: Option<InitArg>,
    /// Ground-truth sidecar written by `generate`; adds distance correlations.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Run HMC on graphs above the size guard.
    #[arg(long)]
    pub force: bool,
    /// Also write the raw HMC position draws.
    #[arg(long)]
    pub positions: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Protocol {
    Table2,
    Fig5,
    Fig8,
    Misspec,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub protocol: Protocol,
    /// JSON protocol settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Replicate counts and grids of the full study.
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub radius: Option<Vec<f64>>,
    #[arg(long)]
    pub engine: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "degree")]
    pub rotation_weights: String,
    /// Earlier Euclidean export to align to.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    pub input: PathBuf,
}

/// Parses `args` and runs the command, mapping failures to exit codes.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::ExportEmbedding(a) => cmd_export(a),
        Command::Info(a) => cmd_info(a),
    }
}

fn output_dir(arg: Option<PathBuf>) -> CliResult<PathBuf> {
    let dir = arg
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError {
        code: exit::DATA,
        message: format!("{}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> hcls::Result<()>) -> CliResult {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "graph".into(), |s| s.to_string_lossy().into_owned())
}

fn load(path: &Path) -> CliResult<LoadedGraph> {
    let g = load_edge_list(path)?;
    if g.self_loops > 0 {
        eprintln!("warning: {}: dropped {} self-loop(s)", path.display(), g.self_loops);
    }
    if g.duplicates > 0 {
        eprintln!("warning: {}: merged {} duplicate edge(s)", path.display(), g.duplicates);
    }
    Ok(g)
}

// ---------------------------------------------------------------------------

/// Grid for `generate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "snake_case")]
pub struct GenerateConfig {
    #[serde(alias = "N")]
    pub n: Vec<usize>,
    #[serde(alias = "R")]
    pub radius: Vec<f64>,
    #[serde(alias = "reps")]
    pub replicates: usize,
    #[serde(alias = "T")]
    pub temperature: f64,
    pub geometry: Geometry,
    /// Defaults to `R`.
    pub alpha: Option<f64>,
    /// Calibrate α so the expected density matches the hyperbolic model at
    /// `α = R` and the same `T` (ignored for hyperbolic graphs).
    pub match_hyperbolic_density: bool,
    pub seed: u64,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        GenerateConfig {
            n: vec![100],
            radius: vec![5.0],
            replicates: 1,
            temperature: 0.01,
            geometry: Geometry::Hyperbolic,
            alpha: None,
            match_hyperbolic_density: false,
            seed: 0,
        }
    }
}

/// Ground-truth sidecar of a generated graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub seed: u64,
    pub replicate: usize,
    pub config: LatentConfiguration,
}

fn geometry_tag(g: Geometry) -> &'static str {
    match g {
        Geometry::Hyperbolic => "hyperbolic",
        Geometry::Euclidean => "euclidean",
        Geometry::Spherical => "spherical",
    }
}

/// Writes every graph of the grid; returns the edge-list paths.
pub fn generate_grid(cfg: &GenerateConfig, out: &Path) -> CliResult<Vec<PathBuf>> {
    if cfg.n.is_empty() || cfg.radius.is_empty() || cfg.replicates == 0 {
        return Err(usage("generate config needs non-empty n, radius and replicates > 0"));
    }
    let mut paths = Vec::new();
    for &n in &cfg.n {
        for &r in &cfg.radius {
            let alpha = match (cfg.alpha, cfg.match_hyperbolic_density && cfg.geometry != Geometry::Hyperbolic) {
                (Some(a), _) => a,
                (None, false) => r,
                (None, true) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[u64::MAX, n as u64, r.to_bits()]));
                    let reference = ModelParams::new(r, r, cfg.temperature)?;
                    let mut target = 0.0;
                    for _ in 0..CALIBRATION_REPLICATES {
                        target += expected_density(&sample_positions(Geometry::Hyperbolic, n, reference, &mut rng)?);
                    }
                    target /= CALIBRATION_REPLICATES as f64;
                    calibrate_alpha_for_density(cfg.geometry, n, r, cfg.temperature, target, &mut rng)?
                }
            };
            let params = ModelParams::new(r, alpha, cfg.temperature)?;
            for k in 0..cfg.replicates {
                let seed = derive_seed(cfg.seed, &[cfg.geometry as u64, n as u64, r.to_bits(), k as u64]);
                let (config, g) = simulate(cfg.geometry, n, params, seed)?;
                let stem = format!("{}_N{n}_R{r}_rep{k}", geometry_tag(cfg.geometry));
                let edges = out.join(format!("{stem}.edges"));
                write_file(&edges, |w| write_edge_list(&g, w))?;
                let truth = Truth {
                    seed,
                    replicate: k,
                    config,
                };
                fs::write(out.join(format!("{stem}.truth.json")), serde_json::to_vec_pretty(&truth)?)?;
                paths.push(edges);
            }
        }
    }
    Ok(paths)
}

fn cmd_generate(a: GenerateArgs) -> CliResult {
    let mut cfg: GenerateConfig = read_json(&a.config)?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let out = output_dir(a.out)?;
    let paths = generate_grid(&cfg, &out)?;
    println!("wrote {} graphs to {}", paths.len(), out.display());
    Ok(())
}

// ---------------------------------------------------------------------------

fn cmd_metrics(a: MetricsArgs) -> CliResult {
    let mut text = format!("graph,{}\n", PANEL_COLUMNS.join(","));
    for path in &a.inputs {
        let g = load(path)?;
        let panel = metric_panel(&g.graph);
        text.push_str(&format!("{},{}\n", file_stem(path), panel.csv_row()));
    }
    match a.out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------

/// Evaluation written by `fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub input: String,
    pub engine: Engine,
    pub model: FitModel,
    pub n: usize,
    pub m: usize,
    pub params: hcls::vi::GlobalParams,
    pub auc: f64,
    pub accuracy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pearson: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spearman: Option<f64>,
}

fn cmd_fit(a: FitArgs) -> CliResult {
    let engine: Engine = a.engine.parse()?;
    let model: FitModel = a.model.parse()?;
    let mut options: FitOptions = match &a.config {
        Some(p) => read_json(p)?,
        None => FitOptions::default(),
    };
    if let Some(v) = a.epochs {
        options.vi.epochs = v;
    }
    if let Some(v) = a.hidden {
        options.vi.hidden_dim = v;
    }
    if let Some(v) = a.learning_rate {
        options.vi.learning_rate = v;
    }
    if let Some(v) = a.warmup {
        options.hmc.warmup = v;
    }
    if let Some(v) = a.draws {
        options.hmc.draws = v;
    }
    if let Some(v) = a.leapfrog {
        options.hmc.n_leapfrog = v;
    }
    if let Some(v) = a.hmc_init {
        options.hmc.init = match v {
            InitArg::Prior => HmcInit::Prior,
            InitArg::Variational => HmcInit::Variational,
            InitArg::Spectral => HmcInit::Spectral,
        };
    }
    options.force |= a.force;

    let loaded = load(&a.input)?;
    let g = &loaded.graph;
    if engine == Engine::Hmc && g.n() > crate::pipeline::HMC_NODE_LIMIT {
        eprintln!(
            "warning: HMC evaluates all N(N-1)/2 pairs per gradient; N = {} will be slow",
            g.n()
        );
    }
    let truth: Option<PairMatrix> = match &a.truth {
        Some(p) => {
            let t: Truth = read_json(p)?;
            if t.config.n() != g.n() {
                return Err(CliError {
                    code: exit::DATA,
                    message: format!("truth has {} nodes, graph has {}", t.config.n(), g.n()),
                });
            }
            Some(truth_distances(&t.config)?)
        }
        None => None,
    };
    let fit = fit_graph(g, model, engine, &options, a.seed)?;
    let metrics = fit.metrics(g, truth.as_ref(), a.threshold)?;

    let out = output_dir(a.out)?;
    let stem = format!("{}.{}.{}", file_stem(&a.input), model, engine);
    fit.checkpoint.save(out.join(format!("{stem}.ckpt")))?;
    write_file(&out.join(format!("{stem}.scores.csv")), |w| {
        writeln!(w, "i,j,probability,distance")?;
        let n = g.n();
        for i in 0..n {
            for j in (i + 1)..n {
                writeln!(w, "{i},{j},{},{}", fit.probabilities.get(i, j), fit.distances.get(i, j))?;
            }
        }
        Ok(())
    })?;
    if !loaded.is_identity() {
        write_file(&out.join(format!("{}.mapping.csv", file_stem(&a.input))), |w| loaded.write_mapping(w))?;
    }
    if let Some(draws) = &fit.draws {
        write_file(&out.join(format!("{stem}.draws.csv")), |w| draws.write_csv(w))?;
        fs::write(
            out.join(format!("{stem}.diagnostics.json")),
            serde_json::to_vec_pretty(&draws.diagnostics())?,
        )?;
        if a.positions {
            write_file(&out.join(format!("{stem}.positions.bin")), |w| draws.write_positions_blob(w))?;
        }
        if let Some(f) = &draws.failure {
            eprintln!("warning: {f}");
        }
    }
    let report = FitReport {
        input: a.input.display().to_string(),
        engine,
        model,
        n: g.n(),
        m: g.m(),
        params: fit.params,
        auc: metrics.auc,
        accuracy: metrics.accuracy,
        pearson: metrics.pearson,
        spearman: metrics.spearman,
    };
    let json = serde_json::to_string_pretty(&report)?;
    fs::write(out.join(format!("{stem}.eval.json")), &json)?;
    println!("{json}");
    Ok(())
}

// ---------------------------------------------------------------------------

fn cmd_experiment(a: ExperimentArgs) -> CliResult {
    let out = output_dir(a.out.clone())?;
    let engine = a.engine.as_deref().map(str::parse::<Engine>).transpose()?;
    match a.protocol {
        Protocol::Table2 => {
            let mut cfg = base_config(&a, Table2Config::full, Table2Config::default)?;
            override_grid(&a, &mut cfg.n, &mut cfg.radius, &mut cfg.replicates);
            cfg.seed = a.seed.unwrap_or(cfg.seed);
            cfg.jobs = a.jobs.unwrap_or(cfg.jobs);
            cfg.engine = engine.unwrap_or(cfg.engine);
            if let Some(e) = a.epochs {
                cfg.fit.vi.epochs = e;
            }
            let res = run_table2(&cfg)?;
            write_file(&out.join("table2.csv"), |w| res.write_summary(w))?;
            write_file(&out.join("table2_runs.csv"), |w| res.write_records(w))?;
            if !res.skipped.is_empty() {
                eprintln!("warning: skipped {} graphs without both edges and non-edges", res.skipped.len());
            }
            res.write_summary(std::io::stdout().lock())?;
        }
        Protocol::Fig5 => {
            let mut cfg = base_config(&a, Fig5Config::full, Fig5Config::default)?;
            if let Some(n) = a.n.as_ref().and_then(|v| v.first()) {
                cfg.n = *n;
            }
            if let Some(r) = a.radius.as_ref().and_then(|v| v.first()) {
                cfg.radius = *r;
            }
            cfg.replicates = a.reps.unwrap_or(cfg.replicates);
            cfg.seed = a.seed.unwrap_or(cfg.seed);
            cfg.jobs = a.jobs.unwrap_or(cfg.jobs);
            let res = run_fig5(&cfg)?;
            write_file(&out.join("fig5.csv"), |w| res.write_rows(w))?;
            write_file(&out.join("fig5_summary.csv"), |w| res.write_summary(w))?;
            res.write_summary(std::io::stdout().lock())?;
        }
        Protocol::Fig8 => {
            let mut cfg = base_config(&a, Fig8Config::full, Fig8Config::default)?;
            override_grid(&a, &mut cfg.n, &mut cfg.radius, &mut cfg.replicates);
            cfg.seed = a.seed.unwrap_or(cfg.seed);
            cfg.jobs = a.jobs.unwrap_or(cfg.jobs);
            if let Some(e) = a.epochs {
                cfg.vi.epochs = e;
            }
            if engine == Some(Engine::Hmc) {
                return Err(usage("fig8 compares variational fits; the hmc engine is not available here"));
            }
            let rows = run_fig8(&cfg)?;
            write_file(&out.join("fig8.csv"), |w| write_fig8(&rows, w))?;
            write_fig8(&rows, std::io::stdout().lock())?;
        }
        Protocol::Misspec => {
            let mut cfg = base_config(&a, MisspecConfig::full, MisspecConfig::default)?;
            if let Some(n) = &a.n {
                cfg.n = n.clone();
            }
            if let Some(r) = a.radius.as_ref().and_then(|v| v.first()) {
                cfg.radius = *r;
            }
            cfg.replicates = a.reps.unwrap_or(cfg.replicates);
            cfg.seed = a.seed.unwrap_or(cfg.seed);
            cfg.jobs = a.jobs.unwrap_or(cfg.jobs);
            cfg.engine = engine.unwrap_or(cfg.engine);
            if let Some(e) = a.epochs {
                cfg.fit.vi.epochs = e;
            }
            let res = run_misspec(&cfg)?;
            write_file(&out.join("misspec_runs.csv"), |w| res.write_records(w))?;
            write_file(&out.join("misspec_pairwise.csv"), |w| res.write_pairwise(w))?;
            res.write_pairwise(std::io::stdout().lock())?;
        }
    }
    Ok(())
}

fn base_config<T: for<'de> Deserialize<'de>>(
    a: &ExperimentArgs,
    full: fn() -> T,
    scaled: fn() -> T,
) -> CliResult<T> {
    match &a.config {
        Some(p) => read_json(p),
        None if a.full => Ok(full()),
        None => Ok(scaled()),
    }
}

fn override_grid(a: &ExperimentArgs, n: &mut Vec<usize>, radius: &mut Vec<f64>, reps: &mut usize) {
    if let Some(v) = &a.n {
        *n = v.clone();
    }
    if let Some(v) = &a.radius {
        *radius = v.clone();
    }
    if let Some(v) = a.reps {
        *reps = v;
    }
}

// ---------------------------------------------------------------------------

/// Canonical coordinates of a checkpoint's embedding.
pub fn canonical_embedding(
    ckpt: &Checkpoint,
    weights: RotationWeights,
    reference: Option<&[[f64; 2]]>,
) -> hcls::Result<Vec<[f64; 2]>> {
    let w = weights.weights(&ckpt.header.degrees);
    match ckpt.header.model {
        LatentModel::Hyperbolic => Ok(canonicalize_hyperbolic(&ckpt.embedding, &w)),
        LatentModel::Euclidean => match reference {
            Some(r) => procrustes_align(&ckpt.embedding, r),
            None => Ok(canonicalize_euclidean(&ckpt.embedding, &w)),
        },
    }
}

fn read_reference(path: &Path) -> CliResult<Vec<[f64; 2]>> {
    let file = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (k, line) in file.lines().enumerate().skip(1) {
        let line = line?;
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |s: Option<&&str>| -> CliResult<f64> {
            s.and_then(|v| v.trim().parse().ok()).ok_or_else(|| CliError {
                code: exit::DATA,
                message: format!("{}: bad row at line {}", path.display(), k + 1),
            })
        };
        out.push([parse(fields.get(1))?, parse(fields.get(2))?]);
    }
    Ok(out)
}

fn cmd_export(a: ExportArgs) -> CliResult {
    let ckpt = Checkpoint::load(&a.checkpoint)?;
    let weights: RotationWeights = a.rotation_weights.parse()?;
    let reference = a.reference.as_deref().map(read_reference).transpose()?;
    if reference.is_some() && ckpt.header.model == LatentModel::Hyperbolic {
        return Err(usage("--reference applies to Euclidean embeddings only"));
    }
    let coords = canonical_embedding(&ckpt, weights, reference.as_deref())?;
    let hyperbolic = ckpt.header.model == LatentModel::Hyperbolic;
    let planar: Vec<[f64; 2]> = if hyperbolic {
        coords.iter().map(|&p| poincare(p)).collect()
    } else {
        coords.clone()
    };
    write_file(&a.out, |w| {
        if hyperbolic {
            writeln!(w, "node,r,theta,poincare_x,poincare_y")?;
            for (i, (p, q)) in coords.iter().zip(&planar).enumerate() {
                writeln!(w, "{i},{},{},{},{}", p[0], p[1], q[0], q[1])?;
            }
        } else {
            writeln!(w, "node,x,y")?;
            for (i, p) in coords.iter().enumerate() {
                writeln!(w, "{i},{},{}", p[0], p[1])?;
            }
        }
        Ok(())
    })?;
    if let Some(svg) = a.svg {
        fs::write(svg, svg_scatter(&planar, &ckpt.header.degrees, hyperbolic))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------

fn cmd_info(a: InfoArgs) -> CliResult {
    if let Ok(ckpt) = Checkpoint::load(&a.input) {
        let h = &ckpt.header;
        let summary = serde_json::json!({
            "kind": "checkpoint",
            "engine": h.engine,
            "model": h.model,
            "n": h.n,
            "hidden": h.hidden,
            "seed": h.seed,
            "params": h.params,
            "fixed_temperature": h.fixed_temperature,
            "epochs_run": h.elbo_trace.len(),
            "final_elbo": h.elbo_trace.last(),
            "sections": h.sections,
        });
        println!("{}", serde_json::to_string_pretty(&summary)?);
        return Ok(());
    }
    let loaded = load(&a.input)?;
    let g = &loaded.graph;
    let components = hcls::graph::connected_components(g);
    let largest = components.iter().map(Vec::len).max().unwrap_or(0);
    let degrees = g.degrees();
    let summary = serde_json::json!({
        "kind": "edge_list",
        "n": g.n(),
        "m": g.m(),
        "density": g.density(),
        "components": components.len(),
        "largest_component": largest,
        "max_degree": degrees.iter().max(),
        "mean_degree": if g.n() > 0 { 2.0 * g.m() as f64 / g.n() as f64 } else { 0.0 },
        "self_loops_dropped": loaded.self_loops,
        "duplicates_merged": loaded.duplicates,
        "relabelled": !loaded.is_identity(),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(Error::Config("x".into())).code, exit::USAGE);
        assert_eq!(CliError::from(Error::Format("x".into())).code, exit::DATA);
        assert_eq!(CliError::from(Error::Parse { line: 1, message: "x".into() }).code, exit::DATA);
        assert_eq!(CliError::from(Error::Calibration("x".into())).code, exit::NUMERICAL);
    }

    #[test]
    fn generate_config_accepts_short_keys() {
        let cfg: GenerateConfig =
            serde_json::from_str(r#"{"N": [30], "R": [3], "reps": 2, "T": 0.01, "geometry": "hyperbolic"}"#).unwrap();
        assert_eq!(cfg.n, [30]);
        assert_eq!(cfg.radius, [3.0]);
        assert_eq!(cfg.replicates, 2);
    }
}
