//! Resolution of the sweep configuration from a flat key=value file plus
//! flag overrides, and the small value parsers shared by all subcommands.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use kneadsweep::integrate::{Branch, IntegrationConfig};
use kneadsweep::models::{ModelKind, ParamTransform};
use kneadsweep::sweep::SweepConfig;
use kneadsweep::symbolic::{EncodeMode, KneadingConfig};
use kneadsweep::theory::ZeroSignRule;

use crate::cli::SweepArgs;
use crate::error::AppError;

pub fn parse_model(s: &str) -> Result<ModelKind, AppError> {
    match s {
        "chua" => Ok(ModelKind::ChuaCubic),
        "acst" => Ok(ModelKind::AcstCubic),
        other => Err(AppError::Usage(format!(
            "unknown model {other:?} (expected chua or acst)"
        ))),
    }
}

pub fn parse_transform(s: &str) -> Result<ParamTransform, AppError> {
    match s {
        "identity" => Ok(ParamTransform::Identity),
        "polar" => Ok(ParamTransform::ChuaPolar),
        "affine" => Ok(ParamTransform::AcstAffine),
        other => Err(AppError::Usage(format!(
            "unknown transform {other:?} (expected identity, polar, or affine)"
        ))),
    }
}

pub fn parse_mode(s: &str) -> Result<EncodeMode, AppError> {
    match s {
        "full" => Ok(EncodeMode::Full),
        "one-sided" => Ok(EncodeMode::OneSided),
        "dcp" => Ok(EncodeMode::Dcp),
        other => Err(AppError::Usage(format!(
            "unknown mode {other:?} (expected full, one-sided, or dcp)"
        ))),
    }
}

pub fn parse_branch(s: &str) -> Result<Branch, AppError> {
    match s {
        "gamma1" => Ok(Branch::Gamma1),
        "gamma2" => Ok(Branch::Gamma2),
        other => Err(AppError::Usage(format!(
            "unknown branch {other:?} (expected gamma1 or gamma2)"
        ))),
    }
}

pub fn parse_rule(s: &str) -> Result<ZeroSignRule, AppError> {
    match s {
        "alternating-minus" => Ok(ZeroSignRule::AlternatingFromMinus),
        "alternating-plus" => Ok(ZeroSignRule::AlternatingFromPlus),
        "fixed-minus" => Ok(ZeroSignRule::FixedMinus),
        "fixed-plus" => Ok(ZeroSignRule::FixedPlus),
        other => Err(AppError::Usage(format!(
            "unknown rule {other:?} (expected alternating-minus, alternating-plus, \
             fixed-minus, or fixed-plus)"
        ))),
    }
}

/// "11"-style binary word into symbols.
pub fn parse_code(s: &str) -> Result<Vec<u8>, AppError> {
    let code: Vec<u8> = s
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(AppError::Usage(format!(
                "code must be a binary word like 11 or 101, got {s:?}"
            ))),
        })
        .collect::<Result<_, _>>()?;
    if code.first() != Some(&1) {
        return Err(AppError::Usage(format!(
            "code must be nonempty and start with 1, got {s:?}"
        )));
    }
    Ok(code)
}

pub fn parse_f64(s: &str, key: &str) -> Result<f64, AppError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| AppError::Usage(format!("{key} expects a number, got {s:?}")))
}

/// "lo:hi" pair of floats.
pub fn parse_range(s: &str, key: &str) -> Result<(f64, f64), AppError> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| AppError::Usage(format!("{key} expects lo:hi, got {s:?}")))?;
    Ok((parse_f64(lo, key)?, parse_f64(hi, key)?))
}

/// "n:m" pair of positive integers.
pub fn parse_res(s: &str, key: &str) -> Result<(u32, u32), AppError> {
    let err = || AppError::Usage(format!("{key} expects two positive integers n:m, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(err)?;
    let n = a.trim().parse::<u32>().map_err(|_| err())?;
    let m = b.trim().parse::<u32>().map_err(|_| err())?;
    Ok((n, m))
}

/// "i:j" symbol window, 1-based inclusive.
pub fn parse_window(s: &str) -> Result<(usize, usize), AppError> {
    let err = || AppError::Usage(format!("window expects i:j with 1 <= i <= j, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(err)?;
    let i = a.trim().parse::<usize>().map_err(|_| err())?;
    let j = b.trim().parse::<usize>().map_err(|_| err())?;
    Ok((i, j))
}

/// "x,y" pair of floats.
pub fn parse_point(s: &str, key: &str) -> Result<(f64, f64), AppError> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| AppError::Usage(format!("{key} expects u,v, got {s:?}")))?;
    Ok((parse_f64(a, key)?, parse_f64(b, key)?))
}

/// "p,q" pair of integers.
pub fn parse_cell(s: &str, key: &str) -> Result<(u32, u32), AppError> {
    let err = || AppError::Usage(format!("{key} expects integers p,q, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(err)?;
    let p = a.trim().parse::<u32>().map_err(|_| err())?;
    let q = b.trim().parse::<u32>().map_err(|_| err())?;
    Ok((p, q))
}

const SWEEP_KEYS: [&str; 13] = [
    "model",
    "transform",
    "u-range",
    "v-range",
    "res",
    "window",
    "mode",
    "branch",
    "dt",
    "max-time",
    "out",
    "img",
    "seed",
];

/// Flat key=value file: one entry per line, '#' starts a comment, blank
/// lines ignored. Keys mirror the sweep flags.
pub fn parse_kv_file(path: &Path) -> Result<BTreeMap<String, String>, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            AppError::Usage(format!(
                "{}:{}: expected key=value, got {raw:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        let key = key.trim();
        if !SWEEP_KEYS.contains(&key) {
            return Err(AppError::Usage(format!(
                "{}:{}: unknown config key {key:?}",
                path.display(),
                lineno + 1
            )));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

pub struct ResolvedSweep {
    pub config: SweepConfig,
    pub out: PathBuf,
    pub img: Option<PathBuf>,
    pub seed: u64,
}

/// Merges file entries and flag overrides (flags win), applies defaults,
/// and validates. All conflicts surface here, before any compute.
pub fn resolve_sweep(args: &SweepArgs) -> Result<ResolvedSweep, AppError> {
    let file = match &args.config {
        Some(path) => parse_kv_file(path)?,
        None => BTreeMap::new(),
    };
    let pick = |flag: &Option<String>, key: &str| -> Option<String> {
        flag.clone().or_else(|| file.get(key).cloned())
    };
    let require = |value: Option<String>, key: &str| -> Result<String, AppError> {
        value.ok_or_else(|| AppError::Usage(format!("missing required setting {key}")))
    };

    let model = parse_model(&require(pick(&args.model, "model"), "model")?)?;
    let transform = match pick(&args.transform, "transform") {
        Some(s) => parse_transform(&s)?,
        None => ParamTransform::Identity,
    };
    let u_range = parse_range(&require(pick(&args.u_range, "u-range"), "u-range")?, "u-range")?;
    let v_range = parse_range(&require(pick(&args.v_range, "v-range"), "v-range")?, "v-range")?;
    let resolution = match pick(&args.res, "res") {
        Some(s) => parse_res(&s, "res")?,
        None => (500, 500),
    };
    let mode = match pick(&args.mode, "mode") {
        Some(s) => parse_mode(&s)?,
        None => EncodeMode::Full,
    };
    let (i, j) = match pick(&args.window, "window") {
        Some(s) => parse_window(&s)?,
        None if mode == EncodeMode::Dcp => (601, 1000),
        None => (1, 10),
    };
    let branch = match pick(&args.branch, "branch") {
        Some(s) => parse_branch(&s)?,
        None => Branch::Gamma1,
    };
    let dt = match args.dt {
        Some(v) => v,
        None => match file.get("dt") {
            Some(s) => parse_f64(s, "dt")?,
            None => 0.002,
        },
    };
    let max_time = match args.max_time {
        Some(v) => v,
        None => match file.get("max-time") {
            Some(s) => parse_f64(s, "max-time")?,
            None if mode == EncodeMode::Dcp => 2e4,
            None => 2000.0,
        },
    };
    let seed = match args.seed {
        Some(v) => v,
        None => match file.get("seed") {
            Some(s) => s
                .parse::<u64>()
                .map_err(|_| AppError::Usage(format!("seed expects an integer, got {s:?}")))?,
            None => 42,
        },
    };
    let out = PathBuf::from(require(
        args.out
            .as_ref()
            .map(|p| p.to_string_lossy().into_owned())
            .or_else(|| file.get("out").cloned()),
        "out",
    )?);
    let img = args
        .img
        .as_ref()
        .map(|p| p.to_string_lossy().into_owned())
        .or_else(|| file.get("img").cloned())
        .map(PathBuf::from);
    // Surface format conflicts before the sweep runs, not after.
    if let Some(img) = &img {
        let ext = img.extension().and_then(|e| e.to_str()).unwrap_or("");
        if !matches!(ext, "ppm" | "png") {
            return Err(AppError::Usage(format!(
                "img must end in .ppm or .png, got {:?}",
                img.display()
            )));
        }
    }

    let encoding = KneadingConfig::new(i, j, 0.5, mode)?;
    let integration = IntegrationConfig {
        dt,
        max_time,
        // Without this cap each cell would integrate to the library's
        // generous symbol default even when the window needs only j.
        max_symbols: j,
        ..Default::default()
    };
    let config = SweepConfig {
        model,
        transform,
        u_range,
        v_range,
        resolution,
        encoding,
        integration,
        branch,
    };
    config.validate()?;
    Ok(ResolvedSweep {
        config,
        out,
        img,
        seed,
    })
}
