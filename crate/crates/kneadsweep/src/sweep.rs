//! Embarrassingly parallel biparametric grid sweeps: every cell transforms
//! its (u, v) coordinates to model parameters, integrates the separatrix,
//! and stores a kneading value or long-term class. Cells are independent
//! and collected in index order, so results are bit-identical for any
//! worker count or execution order.

use crate::integrate::{integrate_symbols, separatrix_ic, Branch, IntegrationConfig, RunStatus};
use crate::models::{ModelKind, ModelSpec, ParamTransform};
use crate::symbolic::{
    classify_long_term, kneading_invariant, one_sided_invariant, EncodeMode, KneadingConfig,
    LongTermClass,
};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SweepError {
    #[error("invalid sweep config: {0}")]
    BadConfig(String),
    #[error("cells are not adjacent")]
    NotAdjacent,
    #[error("no boundary: endpoint values coincide")]
    NoBoundary,
    #[error("endpoint cell is not Ok (escaped or timed out)")]
    CellNotOk,
}

/// Value stored for cells whose sequence never reached the window.
pub const ESCAPE_SENTINEL: f64 = -1.0;

/// Dcp per-cell code: high bit set means chaotic with the LZ complexity in
/// the low bits; clear means periodic with the period in the low bits.
pub const DCP_CHAOTIC_BIT: u32 = 0x8000_0000;
/// Dcp per-cell code for escaped cells.
pub const DCP_ESCAPED: u32 = u32::MAX;

/// Everything needed to reproduce a sweep bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub model: ModelKind,
    pub transform: ParamTransform,
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
    /// Cells per axis (nu columns, nv rows), at least 2 each.
    pub resolution: (u32, u32),
    pub encoding: KneadingConfig,
    pub integration: IntegrationConfig,
    pub branch: Branch,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        if !(self.u_range.0 < self.u_range.1) || !(self.v_range.0 < self.v_range.1) {
            return Err(SweepError::BadConfig(
                "ranges must satisfy lo < hi".into(),
            ));
        }
        if self.resolution.0 < 2 || self.resolution.1 < 2 {
            return Err(SweepError::BadConfig(
                "resolution must be at least 2 per axis".into(),
            ));
        }
        self.integration
            .validate()
            .map_err(SweepError::BadConfig)?;
        if self.encoding.i == 0 || self.encoding.j < self.encoding.i {
            return Err(SweepError::BadConfig("bad symbol window".into()));
        }
        Ok(())
    }

    /// u-coordinate of column p.
    pub fn cell_u(&self, p: u32) -> f64 {
        self.u_range.0
            + p as f64 * (self.u_range.1 - self.u_range.0) / (self.resolution.0 - 1) as f64
    }

    /// v-coordinate of row q.
    pub fn cell_v(&self, q: u32) -> f64 {
        self.v_range.0
            + q as f64 * (self.v_range.1 - self.v_range.0) / (self.resolution.1 - 1) as f64
    }

    /// Canonical text rendering; two configs produce identical sweeps iff
    /// these strings match. Floats use shortest-roundtrip formatting.
    pub fn canonical_string(&self) -> String {
        format!(
            "model={:?};transform={:?};u={:?},{:?};v={:?},{:?};res={}x{};branch={:?};\
             mode={:?};window={},{};q={:?};dt={:?};max_time={:?};max_symbols={};\
             esc_bound={:?};delta={:?};threshold={:?};refine={}",
            self.model,
            self.transform,
            self.u_range.0,
            self.u_range.1,
            self.v_range.0,
            self.v_range.1,
            self.resolution.0,
            self.resolution.1,
            self.branch,
            self.encoding.mode,
            self.encoding.i,
            self.encoding.j,
            self.encoding.q,
            self.integration.dt,
            self.integration.max_time,
            self.integration.max_symbols,
            self.integration.esc_bound,
            self.integration.delta,
            self.integration.symbol_threshold,
            self.integration.refine_extrema,
        )
    }

    /// Stable 64-bit content hash (FNV-1a over the canonical string).
    pub fn content_hash(&self) -> u64 {
        fnv1a64(self.canonical_string().as_bytes())
    }
}

/// FNV-1a, 64-bit; fixed constants, stable across platforms.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Per-cell status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum CellClass {
    /// Full window obtained.
    Ok = 0,
    /// Run completed but the window is partly missing.
    Truncated = 1,
    /// Trajectory escaped (or parameters were unusable for this cell).
    Escaped = 2,
    /// Time wall hit before the window filled.
    TimedOut = 3,
}

impl CellClass {
    pub fn from_code(code: u8) -> Option<CellClass> {
        Some(match code {
            0 => CellClass::Ok,
            1 => CellClass::Truncated,
            2 => CellClass::Escaped,
            3 => CellClass::TimedOut,
            _ => return None,
        })
    }
}

/// Result grid; `values`/`classes` are row-major with the u-axis fastest,
/// row q at v = cell_v(q) (row 0 is the bottom of the parameter window).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub config: SweepConfig,
    pub values: Vec<f64>,
    pub classes: Vec<CellClass>,
    /// Dcp mode only: period-or-complexity codes (see [`DCP_CHAOTIC_BIT`]).
    pub dcp: Option<Vec<u32>>,
}

impl SweepGrid {
    pub fn idx(&self, p: u32, q: u32) -> usize {
        (q * self.config.resolution.0 + p) as usize
    }
}

/// One evaluated cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellOutcome {
    pub value: f64,
    pub class: CellClass,
    /// Meaningful in Dcp mode only.
    pub dcp_code: u32,
}

fn escape_outcome() -> CellOutcome {
    CellOutcome {
        value: ESCAPE_SENTINEL,
        class: CellClass::Escaped,
        dcp_code: DCP_ESCAPED,
    }
}

fn status_class(status: RunStatus, short_window: bool) -> CellClass {
    match status {
        RunStatus::Completed => {
            if short_window {
                CellClass::Truncated
            } else {
                CellClass::Ok
            }
        }
        RunStatus::Escaped { .. } => CellClass::Escaped,
        RunStatus::TimedOut { .. } => CellClass::TimedOut,
    }
}

/// Runs the full per-cell pipeline at chart coordinates (u, v).
///
/// Unusable parameters (non-positive after the transform) and a missing 1D
/// unstable direction are recorded as escaped cells rather than errors, so
/// sweeps never abort on individual cells. The symbol budget is raised to
/// the window end if the integration config asks for fewer symbols.
pub fn evaluate_at(cfg: &SweepConfig, u: f64, v: f64) -> CellOutcome {
    let (a, b) = cfg.transform.apply(u, v);
    let m = match ModelSpec::positive(cfg.model, a, b) {
        Ok(m) => m,
        Err(_) => return escape_outcome(),
    };
    let ic = match separatrix_ic(&m, cfg.branch, cfg.integration.delta) {
        Ok(ic) => ic,
        Err(_) => return escape_outcome(),
    };
    let mut icfg = cfg.integration;
    icfg.max_symbols = icfg.max_symbols.max(cfg.encoding.j);
    let stream = integrate_symbols(&m, ic, &icfg);

    match cfg.encoding.mode {
        EncodeMode::Full => {
            let (value, short) = match kneading_invariant(&stream.symbols, &cfg.encoding) {
                Ok(kv) => (kv.value, kv.truncated),
                Err(_) => (ESCAPE_SENTINEL, true),
            };
            CellOutcome {
                value,
                class: status_class(stream.status, short),
                dcp_code: 0,
            }
        }
        EncodeMode::OneSided => {
            let r = cfg.encoding.j;
            let (value, short) = match one_sided_invariant(&stream.symbols, r) {
                Ok(v) => (v, stream.symbols.len() < r),
                Err(_) => (ESCAPE_SENTINEL, true),
            };
            CellOutcome {
                value,
                class: status_class(stream.status, short),
                dcp_code: 0,
            }
        }
        EncodeMode::Dcp => {
            let out = classify_long_term(&stream, &cfg.encoding);
            match out.class {
                LongTermClass::Escaped => escape_outcome(),
                LongTermClass::Periodic { period } => CellOutcome {
                    value: 0.0,
                    class: status_class(stream.status, out.short_window),
                    dcp_code: (period as u32) & !DCP_CHAOTIC_BIT,
                },
                LongTermClass::Chaotic {
                    lz_complexity,
                    normalized,
                } => CellOutcome {
                    value: normalized,
                    class: status_class(stream.status, out.short_window),
                    dcp_code: DCP_CHAOTIC_BIT | (lz_complexity as u32).min(!DCP_CHAOTIC_BIT),
                },
            }
        }
    }
}

/// Sweeps the whole grid. Cell (p, q) sits at
/// u = u_lo + p (u_hi - u_lo)/(nu - 1), v likewise; cells are evaluated in
/// parallel and assembled in index order, so the output is independent of
/// the worker count.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepGrid, SweepError> {
    cfg.validate()?;
    let (nu, nv) = cfg.resolution;
    let n = nu as usize * nv as usize;
    let outcomes: Vec<CellOutcome> = (0..n)
        .into_par_iter()
        .map(|idx| {
            let p = (idx % nu as usize) as u32;
            let q = (idx / nu as usize) as u32;
            evaluate_at(cfg, cfg.cell_u(p), cfg.cell_v(q))
        })
        .collect();

    let values = outcomes.iter().map(|o| o.value).collect();
    let classes = outcomes.iter().map(|o| o.class).collect();
    let dcp = if cfg.encoding.mode == EncodeMode::Dcp {
        Some(outcomes.iter().map(|o| o.dcp_code).collect())
    } else {
        None
    };
    Ok(SweepGrid {
        config: *cfg,
        values,
        classes,
        dcp,
    })
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Bisects the segment between two chart points whose cell values differ,
/// shrinking until the parameter interval is below `tol`; returns the
/// midpoint. The kept bracket always has the left endpoint's value on one
/// side, so a boundary stays inside it even if probe values differ from
/// both endpoints.
pub fn bisect_segment(
    cfg: &SweepConfig,
    a: (f64, f64),
    b: (f64, f64),
    tol: f64,
) -> Result<(f64, f64), SweepError> {
    if !(tol > 0.0) {
        return Err(SweepError::BadConfig("tol must be positive".into()));
    }
    let oa = evaluate_at(cfg, a.0, a.1);
    let ob = evaluate_at(cfg, b.0, b.1);
    if oa.class != CellClass::Ok || ob.class != CellClass::Ok {
        return Err(SweepError::CellNotOk);
    }
    if oa.value == ob.value {
        return Err(SweepError::NoBoundary);
    }
    let ka = oa.value;
    let (mut pa, mut pb) = (a, b);
    for _ in 0..256 {
        if dist(pa, pb) < tol {
            break;
        }
        let mid = ((pa.0 + pb.0) / 2.0, (pa.1 + pb.1) / 2.0);
        let om = evaluate_at(cfg, mid.0, mid.1);
        if om.class == CellClass::Ok && om.value == ka {
            pa = mid;
        } else {
            pb = mid;
        }
    }
    Ok(((pa.0 + pb.0) / 2.0, (pa.1 + pb.1) / 2.0))
}

/// Localizes the bifurcation boundary between two adjacent grid cells of
/// differing kneading value to parameter precision `tol`.
pub fn refine_boundary(
    cfg: &SweepConfig,
    cell_a: (u32, u32),
    cell_b: (u32, u32),
    tol: f64,
) -> Result<(f64, f64), SweepError> {
    cfg.validate()?;
    let adjacent = (cell_a.0.abs_diff(cell_b.0) + cell_a.1.abs_diff(cell_b.1)) == 1;
    if !adjacent {
        return Err(SweepError::NotAdjacent);
    }
    let a = (cfg.cell_u(cell_a.0), cfg.cell_v(cell_a.1));
    let b = (cfg.cell_u(cell_b.0), cfg.cell_v(cell_b.1));
    bisect_segment(cfg, a, b, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> SweepConfig {
        SweepConfig {
            model: ModelKind::ChuaCubic,
            transform: ParamTransform::Identity,
            u_range: (9.0, 9.5),
            v_range: (13.0, 13.5),
            resolution: (2, 2),
            encoding: KneadingConfig::new(1, 3, 0.5, EncodeMode::Full).unwrap(),
            integration: IntegrationConfig {
                max_time: 500.0,
                ..Default::default()
            },
            branch: Branch::Gamma1,
        }
    }

    #[test]
    fn rerun_is_bit_identical() {
        let cfg = small_cfg();
        let g1 = run_sweep(&cfg).unwrap();
        let g2 = run_sweep(&cfg).unwrap();
        assert_eq!(g1.values, g2.values);
        assert_eq!(g1.classes, g2.classes);
    }

    #[test]
    fn cell_coordinates_hit_range_ends() {
        let cfg = small_cfg();
        assert_eq!(cfg.cell_u(0), 9.0);
        assert_eq!(cfg.cell_u(1), 9.5);
        assert_eq!(cfg.cell_v(1), 13.5);
    }

    #[test]
    fn bad_configs_rejected() {
        let mut cfg = small_cfg();
        cfg.u_range = (2.0, 1.0);
        assert!(matches!(run_sweep(&cfg), Err(SweepError::BadConfig(_))));
        let mut cfg = small_cfg();
        cfg.resolution = (1, 5);
        assert!(run_sweep(&cfg).is_err());
    }

    #[test]
    fn content_hash_tracks_config() {
        let cfg = small_cfg();
        let mut cfg2 = cfg;
        assert_eq!(cfg.content_hash(), cfg2.content_hash());
        cfg2.resolution = (3, 2);
        assert_ne!(cfg.content_hash(), cfg2.content_hash());
    }

    #[test]
    fn non_adjacent_cells_rejected() {
        let cfg = small_cfg();
        assert_eq!(
            refine_boundary(&cfg, (0, 0), (1, 1), 1e-6),
            Err(SweepError::NotAdjacent)
        );
    }
}
