//! Binary entry point: argument parsing, worker-pool setup, dispatch.

mod cli;
mod config;
mod error;
mod manifest;
mod report;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use kneadsweep::container::{read_container, write_atomic, write_sweep, write_theory, Container};
use kneadsweep::models::ModelSpec;
use kneadsweep::render::{render_grid, render_theory, write_image, RenderOptions};
use kneadsweep::sweep::{bisect_segment, fnv1a64, refine_boundary, run_sweep};
use kneadsweep::theory::{
    diagram_sweep, map_1d, scalability_check, DiagramConfig, ReturnMapParams, ScalabilityOutcome,
};

use cli::{
    BarsArgs, Cli, Command, Map1dArgs, ModelsInfoArgs, RatiosArgs, RefineArgs, SweepArgs,
    TheoryCommand,
};
use error::AppError;
use manifest::RunManifest;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // --help/--version land here; anything else is a usage error.
            use clap::error::ErrorKind;
            let usage = !matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if usage {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    let workers = init_workers(cli.workers)?;
    match &cli.command {
        Command::ModelsInfo(a) => cmd_models_info(a),
        Command::Sweep(a) => cmd_sweep(a, workers),
        Command::Theory(TheoryCommand::Bars(a)) => cmd_bars(a, workers),
        Command::Theory(TheoryCommand::Ratios(a)) => cmd_ratios(a),
        Command::Theory(TheoryCommand::Map1d(a)) => cmd_map1d(a),
        Command::Refine(a) => cmd_refine(a),
    }
}

/// Worker precedence: --workers, then CHAOS_WORKERS, then all cores.
fn init_workers(flag: Option<usize>) -> Result<usize, AppError> {
    let requested = match flag {
        Some(n) => Some(n),
        None => match std::env::var("CHAOS_WORKERS") {
            Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| {
                AppError::Usage(format!(
                    "CHAOS_WORKERS must be a positive integer, got {s:?}"
                ))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = requested {
        if n == 0 {
            return Err(AppError::Usage("worker count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| AppError::Usage(e.to_string()))?;
    }
    Ok(rayon::current_num_threads())
}

/// CSV/text payloads go to stdout unless an output path was given.
fn emit(path: Option<&Path>, text: &str) -> Result<(), AppError> {
    match path {
        Some(p) => {
            write_atomic(p, text.as_bytes())?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_models_info(a: &ModelsInfoArgs) -> Result<(), AppError> {
    let kind = config::parse_model(&a.model)?;
    let m = ModelSpec::positive(kind, a.a, a.b)?;
    let reports = m
        .equilibria()
        .into_iter()
        .map(|p| m.classify_equilibrium(p))
        .collect::<Result<Vec<_>, _>>()?;
    if a.json {
        println!("{}", report::equilibria_json(&a.model, &m, &reports));
    } else {
        print!("{}", report::equilibria_text(&a.model, &m, &reports));
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs, workers: usize) -> Result<(), AppError> {
    let resolved = config::resolve_sweep(args)?;
    let t0 = Instant::now();
    let grid = run_sweep(&resolved.config)?;
    let wall = t0.elapsed().as_secs_f64();
    let manifest = RunManifest {
        config_hash: resolved.config.content_hash(),
        wall_time: wall,
        worker_count: workers,
    };
    write_sweep(&resolved.out, &grid)?;
    manifest.write_beside(&resolved.out)?;
    if let Some(img) = &resolved.img {
        let opts = RenderOptions {
            seed: resolved.seed,
            ..Default::default()
        };
        write_image(img, &render_grid(&grid, &opts))?;
        manifest.write_beside(img)?;
    }
    println!(
        "wrote {} ({}x{} cells, {:.1}s, {} workers)",
        resolved.out.display(),
        resolved.config.resolution.0,
        resolved.config.resolution.1,
        wall,
        workers
    );
    Ok(())
}

/// Canonical string in the style of the sweep config hash.
fn diagram_hash(cfg: &DiagramConfig) -> u64 {
    let p = &cfg.params;
    let s = format!(
        "code={:?};b0={:?};r={:?};omega0={:?};nu0={:?};phi2={:?};a0={:?};phi1={:?};a1={:?};\
         mu={:?},{:?};nu0_range={:?},{:?};res={}x{};rule={:?}",
        cfg.code,
        p.b0,
        p.r,
        p.omega0,
        p.nu0,
        p.phi2,
        p.a0,
        p.phi1,
        p.a1,
        cfg.mu_abs_range.0,
        cfg.mu_abs_range.1,
        cfg.nu0_range.0,
        cfg.nu0_range.1,
        cfg.resolution.0,
        cfg.resolution.1,
        cfg.rule,
    );
    fnv1a64(s.as_bytes())
}

fn cmd_bars(a: &BarsArgs, workers: usize) -> Result<(), AppError> {
    if a.out.is_none() && a.img.is_none() {
        return Err(AppError::Usage("bars needs --out and/or --img".into()));
    }
    let cfg = DiagramConfig {
        params: ReturnMapParams {
            b0: a.map.b0,
            r: a.map.r,
            omega0: a.map.omega0,
            phi2: a.map.phi2,
            ..Default::default()
        },
        code: config::parse_code(&a.code)?,
        mu_abs_range: config::parse_range(&a.mu_range, "mu-range")?,
        nu0_range: config::parse_range(&a.nu0_range, "nu0-range")?,
        resolution: config::parse_res(&a.res, "res")?,
        rule: config::parse_rule(&a.rule)?,
    };
    cfg.validate()?;
    let t0 = Instant::now();
    let grid = diagram_sweep(&cfg)?;
    let wall = t0.elapsed().as_secs_f64();
    let manifest = RunManifest {
        config_hash: diagram_hash(&cfg),
        wall_time: wall,
        worker_count: workers,
    };
    if let Some(out) = &a.out {
        write_theory(out, &grid)?;
        manifest.write_beside(out)?;
    }
    if let Some(img) = &a.img {
        let opts = RenderOptions {
            seed: a.seed,
            ..Default::default()
        };
        write_image(img, &render_theory(&grid, &opts))?;
        manifest.write_beside(img)?;
    }
    println!(
        "bars code={} {}x{} cells in {wall:.1}s ({workers} workers)",
        a.code, cfg.resolution.0, cfg.resolution.1
    );
    Ok(())
}

fn cmd_ratios(a: &RatiosArgs) -> Result<(), AppError> {
    let p = ReturnMapParams {
        b0: a.map.b0,
        r: a.map.r,
        omega0: a.map.omega0,
        phi2: a.map.phi2,
        nu0: a.nu0,
        ..Default::default()
    };
    let code = config::parse_code(&a.code)?;
    let rule = config::parse_rule(&a.rule)?;
    let range = config::parse_range(&a.lnmu_range, "lnmu-range")?;
    match scalability_check(&p, &code, rule, range)? {
        ScalabilityOutcome::Ok {
            width_ratios,
            spacing_ratios,
            expected,
            ..
        } => emit(
            a.out.as_deref(),
            &report::ratios_csv(&width_ratios, &spacing_ratios, expected),
        ),
        ScalabilityOutcome::InsufficientData { intervals_found } => {
            Err(AppError::Numerical(format!(
                "only {intervals_found} negative intervals in the scan range; widen --lnmu-range"
            )))
        }
    }
}

fn cmd_map1d(a: &Map1dArgs) -> Result<(), AppError> {
    let p = ReturnMapParams {
        b0: a.map.b0,
        r: a.map.r,
        omega0: a.map.omega0,
        phi2: a.map.phi2,
        nu0: a.nu0,
        ..Default::default()
    };
    p.validate()?;
    let (lo, hi) = config::parse_range(&a.z_range, "z-range")?;
    if !(lo > 0.0 && lo < hi) {
        return Err(AppError::Usage(format!(
            "z-range needs 0 < lo < hi, got {lo}:{hi}"
        )));
    }
    if a.samples < 2 {
        return Err(AppError::Usage("samples must be at least 2".into()));
    }
    let mut rows = Vec::with_capacity(a.samples as usize);
    for k in 0..a.samples {
        let t = k as f64 / (a.samples - 1) as f64;
        let z = (lo.ln() + t * (hi.ln() - lo.ln())).exp();
        rows.push((z, map_1d(&p, a.mu, z, -1.0)?));
    }
    emit(a.out.as_deref(), &report::map1d_csv(&rows))
}

fn cmd_refine(a: &RefineArgs) -> Result<(), AppError> {
    let grid = match read_container(&a.data)? {
        Container::Sweep(g) => g,
        Container::Theory(_) => {
            return Err(AppError::Usage(
                "refine needs a sweep container; this file holds a return-map diagram".into(),
            ))
        }
    };
    let mut cfg = grid.config;
    // Bound each probe to the encoded window; stored configs may carry a
    // larger integration cap.
    cfg.integration.max_symbols = cfg.encoding.j;
    let point = match (&a.cell_a, &a.cell_b, &a.point_a, &a.point_b) {
        (Some(ca), Some(cb), None, None) => refine_boundary(
            &cfg,
            config::parse_cell(ca, "cell-a")?,
            config::parse_cell(cb, "cell-b")?,
            a.tol,
        )?,
        (None, None, Some(pa), Some(pb)) => bisect_segment(
            &cfg,
            config::parse_point(pa, "point-a")?,
            config::parse_point(pb, "point-b")?,
            a.tol,
        )?,
        _ => {
            return Err(AppError::Usage(
                "give either --cell-a/--cell-b or --point-a/--point-b".into(),
            ))
        }
    };
    if a.json {
        println!(
            "{}",
            serde_json::json!({ "u": point.0, "v": point.1, "tol": a.tol })
        );
    } else {
        println!("{} {}", point.0, point.1);
    }
    Ok(())
}
