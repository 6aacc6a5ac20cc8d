//! Command-line pipeline for range-fused seed-growing stereo.
//!
//! The pipeline is decomposed into file-connected stages — seeds CSV, prior
//! PFM, disparity PFM, evaluation JSON lines — so every stage is reproducible
//! and cacheable in isolation. Exit codes: 0 success, 1 runtime failure,
//! 2 usage error.

mod config;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand};

use config::Config;
use fusegrow::imaging::PriorMap;
use fusegrow::postproc::ColorPolarity;
use fusegrow::similarity::{SimilarityParams, Statistic};
use fusegrow::{GrayImage, RefineParams, SeedCorrespondence, StereoGeometry};

#[derive(Parser)]
#[command(
    name = "fusegrow",
    version,
    about = "Dense disparity maps from rectified stereo fused with sparse range seeds"
)]
struct Cli {
    /// Config file supplying defaults for any flag (key = value lines).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a ground-truth disparity map on a regular grid into seeds.
    SimulateTof(SimulateTofArgs),
    /// Project a range-camera depth frame into both images as seeds.
    ProjectTof(ProjectTofArgs),
    /// Grow a dense disparity map from seeds.
    Grow(GrowArgs),
    /// Score an estimated disparity map against ground truth.
    Evaluate(EvaluateArgs),
    /// Time the grow stage and report search-effort counters.
    Bench(GrowArgs),
}

#[derive(Args)]
struct SimulateTofArgs {
    /// Ground-truth disparity map (PFM, or PGM/PNG with 0 = unknown).
    #[arg(long, value_name = "FILE")]
    gt: PathBuf,
    /// Grid step in pixels.
    #[arg(long, value_name = "INT")]
    step: Option<usize>,
    /// Scale applied to ground-truth values on load.
    #[arg(long, value_name = "FLOAT")]
    scale: Option<f32>,
    /// Output seeds CSV.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct ProjectTofArgs {
    /// Range-camera depth frame in meters (PFM).
    #[arg(long, value_name = "FILE")]
    tof: PathBuf,
    /// Plain-text calibration file (P_left, P_right, fx fy cx cy, T).
    #[arg(long, value_name = "FILE")]
    calib: PathBuf,
    #[arg(long, value_name = "FILE")]
    left: PathBuf,
    #[arg(long, value_name = "FILE")]
    right: PathBuf,
    /// Skip the dark-region and occupancy refinement passes.
    #[arg(long)]
    no_refine: bool,
    /// Dark-region filter threshold on [0,1] luminance.
    #[arg(long, value_name = "FLOAT")]
    dark_threshold: Option<f64>,
    /// Occupancy filter disparity gap in pixels.
    #[arg(long, value_name = "INT")]
    depth_gap: Option<i64>,
    /// Output seeds CSV.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct GrowArgs {
    #[arg(long, value_name = "FILE")]
    left: PathBuf,
    #[arg(long, value_name = "FILE")]
    right: PathBuf,
    /// Seeds CSV with header u,u_prime,v.
    #[arg(long, value_name = "FILE")]
    seeds: PathBuf,
    /// Similarity statistic: mncc, expssd, or epc.
    #[arg(long, value_name = "STAT")]
    stat: Option<Statistic>,
    /// Acceptance threshold on the similarity score.
    #[arg(long, value_name = "FLOAT")]
    tau: Option<f64>,
    /// Image-likelihood scale (sigma_s squared).
    #[arg(long, value_name = "FLOAT")]
    sigma_s_sq: Option<f64>,
    /// Prior-likelihood scale (sigma_p squared).
    #[arg(long, value_name = "FLOAT")]
    sigma_p_sq: Option<f64>,
    /// Matching window side length (odd).
    #[arg(long, value_name = "INT")]
    window: Option<usize>,
    /// Fill small gaps with the windowed median after growth.
    #[arg(long)]
    fill_gaps: bool,
    /// Diagnostic: also stamp the initial seeds into the output map where
    /// growth left their pixels unmatched. Off by default; growth itself
    /// never records the seeds.
    #[arg(long)]
    emit_seeds: bool,
    /// Output disparity PFM.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Optional color rendering (PNG, or PPM by extension).
    #[arg(long, value_name = "FILE")]
    color_out: Option<PathBuf>,
    /// Color ramp polarity: warm-far or warm-near.
    #[arg(long, value_name = "POLARITY")]
    color_polarity: Option<ColorPolarity>,
    /// Dump the internally built prior map (epc only).
    #[arg(long, value_name = "FILE")]
    prior_out: Option<PathBuf>,
    /// Dump the seed triangulation as OBJ-style text (epc only).
    #[arg(long, value_name = "FILE")]
    tri_out: Option<PathBuf>,
    /// Export the result as an ASCII PLY mesh.
    #[arg(long, value_name = "FILE")]
    ply_out: Option<PathBuf>,
    /// Focal length in pixels (required for --ply-out).
    #[arg(long, value_name = "FLOAT")]
    focal: Option<f64>,
    /// Baseline in scene units (required for --ply-out).
    #[arg(long, value_name = "FLOAT")]
    baseline: Option<f64>,
    /// Disparity-space depth; bench reports the visited fraction against it.
    #[arg(long, value_name = "INT")]
    max_disparity: Option<usize>,
}

#[derive(Args)]
#[command(group = ArgGroup::new("occlusion").required(true).args(["gt_right", "mask"]))]
struct EvaluateArgs {
    /// Estimated disparity map (PFM).
    #[arg(long, value_name = "FILE")]
    est: PathBuf,
    /// Left ground-truth disparity map.
    #[arg(long, value_name = "FILE")]
    gt_left: PathBuf,
    /// Right ground-truth map; the non-occluded mask is cross-checked from
    /// both ground truths.
    #[arg(long, value_name = "FILE")]
    gt_right: Option<PathBuf>,
    /// Precomputed mask PNG (nonzero = evaluate) instead of --gt-right.
    #[arg(long, value_name = "FILE")]
    mask: Option<PathBuf>,
    /// Scale applied to ground-truth values on load.
    #[arg(long, value_name = "FLOAT")]
    gt_scale: Option<f32>,
    #[arg(long, value_name = "NAME")]
    scene: String,
    #[arg(long, value_name = "NAME")]
    variant: String,
    /// Append the JSON-lines report here (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(path) => match Config::load(path) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("error: {e:#}");
                std::process::exit(2);
            }
        },
        None => Config::default(),
    };
    let code = match run(cli.command, &cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<UsageError>() {
                Some(_) => 2,
                None => 1,
            }
        }
    };
    std::process::exit(code);
}

/// Marker for post-parse validation failures that are the caller's fault.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

/// Reads FUSEGROW_THREADS: the cap on internal parallelism, 0 meaning auto.
/// All compute paths are currently sequential, so any cap is honored.
fn thread_cap() -> usize {
    match std::env::var("FUSEGROW_THREADS") {
        Ok(raw) => match raw.parse::<usize>() {
            Ok(n) => n,
            Err(_) => {
                eprintln!("warning: ignoring invalid FUSEGROW_THREADS={raw:?}");
                0
            }
        },
        Err(_) => 0,
    }
}

fn run(command: Command, cfg: &Config) -> Result<()> {
    match command {
        Command::SimulateTof(args) => cmd_simulate_tof(args, cfg),
        Command::ProjectTof(args) => cmd_project_tof(args, cfg),
        Command::Grow(args) => cmd_grow(args, cfg, false),
        Command::Bench(args) => cmd_grow(args, cfg, true),
        Command::Evaluate(args) => cmd_evaluate(args, cfg),
    }
}

fn cmd_simulate_tof(args: SimulateTofArgs, cfg: &Config) -> Result<()> {
    let step = cfg.resolve(args.step, "step", 10)?;
    let scale = cfg.resolve(args.scale, "scale", 1.0f32)?;
    if step < 1 {
        return Err(usage("--step must be at least 1"));
    }
    let gt = fusegrow::load_disparity(&args.gt, scale)?;
    let seeds = fusegrow::simulate_tof_seeds(&gt, step);
    fusegrow::seeding::write_seeds_csv(&seeds, &args.out)?;
    eprintln!("wrote {} seeds to {}", seeds.len(), args.out.display());
    Ok(())
}

fn cmd_project_tof(args: ProjectTofArgs, cfg: &Config) -> Result<()> {
    let no_refine = cfg.resolve_switch(args.no_refine, "no-refine")?;
    let refine_params = RefineParams {
        dark_threshold: cfg.resolve(args.dark_threshold, "dark-threshold", 0.04)?,
        depth_gap: cfg.resolve(args.depth_gap, "depth-gap", 2)?,
        ..RefineParams::default()
    };
    let calib = fusegrow::CalibrationRig::from_file(&args.calib)?;
    let (left, right) = load_pair(&args.left, &args.right)?;
    let depth = fusegrow::load_disparity(&args.tof, 1.0)?;
    let tof = fusegrow::TofFrame {
        depth,
        intensity: None,
    };
    let mut seeds = fusegrow::project_tof_seeds(&tof, &calib, &left, &right);
    let projected = seeds.len();
    if no_refine {
        eprintln!("projected {projected} seeds (refinement skipped)");
    } else {
        seeds = fusegrow::refine_seeds(&seeds, &left, &right, &refine_params);
        eprintln!(
            "projected {projected} seeds, refined to {} ({} removed)",
            seeds.len(),
            projected - seeds.len()
        );
    }
    fusegrow::seeding::write_seeds_csv(&seeds, &args.out)?;
    Ok(())
}

fn load_pair(left: &Path, right: &Path) -> Result<(GrayImage, GrayImage)> {
    let left = fusegrow::load_gray(left)?;
    let right = fusegrow::load_gray(right)?;
    if left.width() != right.width() || left.height() != right.height() {
        bail!(
            "left and right images differ in size: {}x{} vs {}x{}",
            left.width(),
            left.height(),
            right.width(),
            right.height()
        );
    }
    Ok((left, right))
}

struct GrowSetup {
    left: GrayImage,
    right: GrayImage,
    seeds: Vec<SeedCorrespondence>,
    prior: PriorMap,
    params: SimilarityParams,
    tau: f64,
}

fn prepare_grow(args: &GrowArgs, cfg: &Config) -> Result<GrowSetup> {
    let stat = cfg.resolve(args.stat, "stat", Statistic::Epc)?;
    let tau = cfg.resolve(args.tau, "tau", 0.5)?;
    let sigma_s_sq = cfg.resolve(args.sigma_s_sq, "sigma-s-sq", 0.1)?;
    let sigma_p_sq = cfg.resolve(
        args.sigma_p_sq,
        "sigma-p-sq",
        fusegrow::similarity::DEFAULT_SIGMA_P_SQ,
    )?;
    let window = cfg.resolve(args.window, "window", 5)?;

    if stat == Statistic::Mncc && (args.sigma_s_sq.is_some() || args.sigma_p_sq.is_some()) {
        eprintln!("warning: --sigma-s-sq/--sigma-p-sq are ignored with --stat mncc");
    }
    if stat == Statistic::Expssd && args.sigma_p_sq.is_some() {
        eprintln!("warning: --sigma-p-sq is ignored with --stat expssd");
    }

    let params = SimilarityParams {
        window,
        epsilon: f64::EPSILON,
        sigma_s_sq,
        sigma_p_sq,
        statistic: stat,
    };
    params.validate()?;
    let tau_ok = match stat {
        Statistic::Mncc => -1.0 < tau && tau < 1.0,
        Statistic::Expssd | Statistic::Epc => 0.0 < tau && tau < 1.0,
    };
    if !tau_ok {
        return Err(usage(format!("--tau {tau} out of range for {}", stat.name())));
    }

    let (left, right) = load_pair(&args.left, &args.right)?;
    let seeds = fusegrow::seeding::read_seeds_csv(&args.seeds)?;

    // The fused statistic needs the interpolated prior; building it here
    // makes a single grow invocation reproduce the whole pipeline.
    let prior = if stat == Statistic::Epc {
        match fusegrow::triangulate_seeds(&seeds) {
            Ok(tri) => {
                if let Some(path) = &args.tri_out {
                    tri.write_obj(path)?;
                }
                fusegrow::interpolate_prior(&tri, left.width(), left.height())
            }
            Err(e) => {
                eprintln!("warning: {e}; growing with an empty prior");
                PriorMap::new_invalid(left.width(), left.height())
            }
        }
    } else {
        PriorMap::new_invalid(left.width(), left.height())
    };
    if let Some(path) = &args.prior_out {
        fusegrow::imaging::save_disparity_pfm(&prior, path)?;
    }

    Ok(GrowSetup {
        left,
        right,
        seeds,
        prior,
        params,
        tau,
    })
}

fn cmd_grow(args: GrowArgs, cfg: &Config, bench: bool) -> Result<()> {
    let fill = cfg.resolve_switch(args.fill_gaps, "fill-gaps")?;
    let emit_seeds = cfg.resolve_switch(args.emit_seeds, "emit-seeds")?;
    let polarity = cfg.resolve(args.color_polarity, "color-polarity", ColorPolarity::WarmFar)?;
    if args.out.is_none() && !bench {
        return Err(usage("--out is required for grow"));
    }
    let setup = prepare_grow(&args, cfg)?;

    let started = Instant::now();
    let state = fusegrow::grow(
        &setup.left,
        &setup.right,
        &setup.seeds,
        &setup.prior,
        &setup.params,
        setup.tau,
    );
    let grow_seconds = started.elapsed().as_secs_f64();

    let mut map = state.disparity.clone();
    if emit_seeds {
        for s in &setup.seeds {
            let (u, v) = (s.u as usize, s.v as usize);
            if u < map.width() && v < map.height() && !map.is_valid(u, v) {
                map.set(u, v, s.disparity() as f32);
            }
        }
    }
    if fill {
        map = fusegrow::fill_gaps(&map, setup.params.window, 13);
    }

    if bench {
        let stats = fusegrow::grown_statistics(&state);
        let (w, h) = (setup.left.width(), setup.left.height());
        println!("image:            {w}x{h}");
        println!(
            "seeds:            {} read, {} enqueued",
            setup.seeds.len(),
            state.seeds_enqueued
        );
        println!(
            "matched:          {} ({:.2}% density)",
            stats.matched_pixels,
            100.0 * stats.density
        );
        println!("queue pops:       {}", stats.queue_pops);
        println!("candidate evals:  {}", stats.eval_count);
        println!("seed evals:       {}", stats.initial_scoring_evals);
        println!("evals per match:  {:.2}", stats.evals_per_match);
        println!("grow time:        {grow_seconds:.3} s");
        println!(
            "thread cap:       {} (0 = auto; compute is sequential)",
            thread_cap()
        );
        let max_disparity = cfg.resolve(args.max_disparity, "max-disparity", 0)?;
        if max_disparity > 0 {
            let space = (w * h * max_disparity) as f64;
            println!(
                "visited fraction: {:.4} of the {w}x{h}x{max_disparity} disparity space",
                stats.eval_count as f64 / space
            );
        }
    }

    if let Some(path) = &args.out {
        fusegrow::imaging::save_disparity_pfm(&map, path)?;
    }
    if let Some(path) = &args.color_out {
        fusegrow::colorize(&map, None, polarity).save(path)?;
    }
    if let Some(path) = &args.ply_out {
        let focal = cfg.resolve(args.focal, "focal", f64::NAN)?;
        let baseline = cfg.resolve(args.baseline, "baseline", f64::NAN)?;
        if !(focal.is_finite() && focal > 0.0 && baseline.is_finite() && baseline > 0.0) {
            return Err(usage("--ply-out needs positive --focal and --baseline"));
        }
        let geom = StereoGeometry::simple(focal, baseline, map.width(), map.height());
        fusegrow::export_ply(&map, &geom, path)?;
    }
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs, cfg: &Config) -> Result<()> {
    let gt_scale = cfg.resolve(args.gt_scale, "gt-scale", 1.0f32)?;
    let est = fusegrow::load_disparity(&args.est, 1.0)?;
    let gt_left = fusegrow::load_disparity(&args.gt_left, gt_scale)?;

    let mask: Vec<bool> = match (&args.gt_right, &args.mask) {
        (Some(path), _) => {
            let gt_right = fusegrow::load_disparity(path, gt_scale)?;
            fusegrow::nonoccluded_mask(&gt_left, &gt_right)?
        }
        (None, Some(path)) => {
            let (w, h, mask) = fusegrow::imaging::load_png_mask(path)?;
            if (w, h) != (gt_left.width(), gt_left.height()) {
                bail!(
                    "mask size {w}x{h} does not match ground truth {}x{}",
                    gt_left.width(),
                    gt_left.height()
                );
            }
            mask
        }
        (None, None) => unreachable!("clap group enforces one source"),
    };

    let report = fusegrow::evaluate(&est, &gt_left, &mask, &args.scene, &args.variant)?;
    println!("{}", report.table_row());
    match &args.out {
        Some(path) => {
            use std::io::Write;
            let mut file = std::fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .with_context(|| format!("failed to open {}", path.display()))?;
            writeln!(file, "{}", report.to_json_line())?;
        }
        None => println!("{}", report.to_json_line()),
    }
    Ok(())
}
