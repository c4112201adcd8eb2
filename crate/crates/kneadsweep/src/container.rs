//! CSWP, a small fixed-layout binary container for sweep results, so runs
//! can be rendered or diffed without recomputation. Everything is
//! little-endian. One 74-byte header is shared by flow sweeps and map
//! feasibility diagrams; the model byte picks the payload:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "CSWP"
//!      4     2  version (= 1)
//!      6     1  model: 0 Chua cubic, 1 ACST cubic, 2 return-map diagram
//!      7     1  transform: 0 identity, 1 Chua polar, 2 ACST affine
//!      8     1  encoding mode: 0 full, 1 one-sided, 2 long-term class
//!      9     1  branch (flow: 0/1 separatrix side; diagram: sign rule)
//!     10     4  nu (columns, u32)
//!     14     4  nv (rows, u32)
//!     18    32  u_lo, u_hi, v_lo, v_hi (f64)
//!     50     4  window start i (u32; 0 for diagrams)
//!     54     4  window end j (u32; 0 for diagrams)
//!     58     8  weight q (f64; 0 for diagrams)
//!     66     8  dt (f64; 0 for diagrams)
//! ```
//!
//! Flow payload: nu*nv values (f64), nu*nv class bytes, and for long-term
//! runs nu*nv u32 codes. Diagram payload: u16 code length, the code as
//! raw 0/1 bytes, the eight map coefficients (f64, field order of
//! [`ReturnMapParams`]), then nu*nv values and nu*nv cell bytes.
//!
//! The header does not store the full integration config; rereading a flow
//! grid fills non-dt integration fields with defaults. The run manifest
//! written next to sweep outputs records the exact config hash.

use crate::integrate::{Branch, IntegrationConfig};
use crate::models::{ModelKind, ParamTransform};
use crate::sweep::{CellClass, SweepConfig, SweepGrid};
use crate::symbolic::{EncodeMode, KneadingConfig};
use crate::theory::{DiagramConfig, FeasCell, ReturnMapParams, TheoryGrid, ZeroSignRule};
use std::fs;
use std::io;
use std::path::Path;
use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"CSWP";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 74;

const MODEL_DIAGRAM: u8 = 2;

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not a CSWP file")]
    BadMagic,
    #[error("unsupported container version {0}")]
    BadVersion(u16),
    #[error("corrupt container: {0}")]
    Corrupt(&'static str),
}

/// Writes via a sibling temp file and rename, so readers never observe a
/// half-written file and an interrupted write leaves the old one intact.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp_name = name.to_os_string();
    tmp_name.push(".partial");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

fn put_u16(buf: &mut Vec<u8>, v: u16) {
    buf.extend_from_slice(&v.to_le_bytes());
}
fn put_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}
fn put_f64(buf: &mut Vec<u8>, v: f64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

struct Reader<'a> {
    b: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ContainerError> {
        if self.pos + n > self.b.len() {
            return Err(ContainerError::Corrupt("truncated"));
        }
        let s = &self.b[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, ContainerError> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16, ContainerError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32, ContainerError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, ContainerError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn done(&self) -> Result<(), ContainerError> {
        if self.pos != self.b.len() {
            return Err(ContainerError::Corrupt("trailing bytes"));
        }
        Ok(())
    }
}

fn header(
    model: u8,
    transform: u8,
    mode: u8,
    branch: u8,
    res: (u32, u32),
    u: (f64, f64),
    v: (f64, f64),
    window: (u32, u32),
    q: f64,
    dt: f64,
) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN);
    buf.extend_from_slice(&MAGIC);
    put_u16(&mut buf, VERSION);
    buf.push(model);
    buf.push(transform);
    buf.push(mode);
    buf.push(branch);
    put_u32(&mut buf, res.0);
    put_u32(&mut buf, res.1);
    put_f64(&mut buf, u.0);
    put_f64(&mut buf, u.1);
    put_f64(&mut buf, v.0);
    put_f64(&mut buf, v.1);
    put_u32(&mut buf, window.0);
    put_u32(&mut buf, window.1);
    put_f64(&mut buf, q);
    put_f64(&mut buf, dt);
    debug_assert_eq!(buf.len(), HEADER_LEN);
    buf
}

fn model_byte(kind: ModelKind) -> u8 {
    match kind {
        ModelKind::ChuaCubic => 0,
        ModelKind::AcstCubic => 1,
    }
}

fn transform_byte(t: ParamTransform) -> u8 {
    match t {
        ParamTransform::Identity => 0,
        ParamTransform::ChuaPolar => 1,
        ParamTransform::AcstAffine => 2,
    }
}

fn mode_byte(m: EncodeMode) -> u8 {
    match m {
        EncodeMode::Full => 0,
        EncodeMode::OneSided => 1,
        EncodeMode::Dcp => 2,
    }
}

fn branch_byte(b: Branch) -> u8 {
    match b {
        Branch::Gamma1 => 0,
        Branch::Gamma2 => 1,
    }
}

/// Serializes a flow sweep grid.
pub fn sweep_bytes(grid: &SweepGrid) -> Result<Vec<u8>, ContainerError> {
    let cfg = &grid.config;
    let n = cfg.resolution.0 as usize * cfg.resolution.1 as usize;
    if grid.values.len() != n || grid.classes.len() != n {
        return Err(ContainerError::Corrupt("grid length mismatch"));
    }
    let is_dcp = cfg.encoding.mode == EncodeMode::Dcp;
    match &grid.dcp {
        Some(d) if is_dcp && d.len() == n => {}
        None if !is_dcp => {}
        _ => return Err(ContainerError::Corrupt("dcp payload mismatch")),
    }
    let mut buf = header(
        model_byte(cfg.model),
        transform_byte(cfg.transform),
        mode_byte(cfg.encoding.mode),
        branch_byte(cfg.branch),
        cfg.resolution,
        cfg.u_range,
        cfg.v_range,
        (cfg.encoding.i as u32, cfg.encoding.j as u32),
        cfg.encoding.q,
        cfg.integration.dt,
    );
    buf.reserve(n * 9 + if is_dcp { n * 4 } else { 0 });
    for v in &grid.values {
        put_f64(&mut buf, *v);
    }
    for c in &grid.classes {
        buf.push(*c as u8);
    }
    if let Some(codes) = &grid.dcp {
        for c in codes {
            put_u32(&mut buf, *c);
        }
    }
    Ok(buf)
}

/// Serializes a feasibility diagram.
pub fn theory_bytes(grid: &TheoryGrid) -> Result<Vec<u8>, ContainerError> {
    let cfg = &grid.config;
    let n = cfg.resolution.0 as usize * cfg.resolution.1 as usize;
    if grid.values.len() != n || grid.cells.len() != n {
        return Err(ContainerError::Corrupt("grid length mismatch"));
    }
    if cfg.code.len() > u16::MAX as usize {
        return Err(ContainerError::Corrupt("code too long"));
    }
    let mut buf = header(
        MODEL_DIAGRAM,
        0,
        0,
        cfg.rule.as_u8(),
        cfg.resolution,
        cfg.mu_abs_range,
        cfg.nu0_range,
        (0, 0),
        0.0,
        0.0,
    );
    put_u16(&mut buf, cfg.code.len() as u16);
    buf.extend_from_slice(&cfg.code);
    let p = &cfg.params;
    for v in [p.b0, p.r, p.omega0, p.nu0, p.phi2, p.a0, p.phi1, p.a1] {
        put_f64(&mut buf, v);
    }
    for v in &grid.values {
        put_f64(&mut buf, *v);
    }
    for c in &grid.cells {
        buf.push(*c as u8);
    }
    Ok(buf)
}

pub fn write_sweep(path: &Path, grid: &SweepGrid) -> Result<(), ContainerError> {
    Ok(write_atomic(path, &sweep_bytes(grid)?)?)
}

pub fn write_theory(path: &Path, grid: &TheoryGrid) -> Result<(), ContainerError> {
    Ok(write_atomic(path, &theory_bytes(grid)?)?)
}

/// Either kind of stored grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Container {
    Sweep(SweepGrid),
    Theory(TheoryGrid),
}

pub fn read_container(path: &Path) -> Result<Container, ContainerError> {
    parse_container(&fs::read(path)?)
}

pub fn parse_container(bytes: &[u8]) -> Result<Container, ContainerError> {
    let mut r = Reader { b: bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(ContainerError::BadMagic);
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(ContainerError::BadVersion(version));
    }
    let model = r.u8()?;
    let transform = r.u8()?;
    let mode = r.u8()?;
    let branch = r.u8()?;
    let nu = r.u32()?;
    let nv = r.u32()?;
    let u_lo = r.f64()?;
    let u_hi = r.f64()?;
    let v_lo = r.f64()?;
    let v_hi = r.f64()?;
    let wi = r.u32()?;
    let wj = r.u32()?;
    let q = r.f64()?;
    let dt = r.f64()?;
    let n = nu as usize * nv as usize;

    if model == MODEL_DIAGRAM {
        let code_len = r.u16()? as usize;
        let code = r.take(code_len)?.to_vec();
        if code.iter().any(|&c| c > 1) {
            return Err(ContainerError::Corrupt("code symbols must be 0 or 1"));
        }
        let mut p = [0.0; 8];
        for slot in &mut p {
            *slot = r.f64()?;
        }
        let params = ReturnMapParams {
            b0: p[0],
            r: p[1],
            omega0: p[2],
            nu0: p[3],
            phi2: p[4],
            a0: p[5],
            phi1: p[6],
            a1: p[7],
        };
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(r.f64()?);
        }
        let mut cells = Vec::with_capacity(n);
        for _ in 0..n {
            cells.push(
                FeasCell::from_code(r.u8()?)
                    .ok_or(ContainerError::Corrupt("bad diagram cell byte"))?,
            );
        }
        r.done()?;
        let rule =
            ZeroSignRule::from_u8(branch).ok_or(ContainerError::Corrupt("bad sign rule byte"))?;
        return Ok(Container::Theory(TheoryGrid {
            config: DiagramConfig {
                params,
                code,
                mu_abs_range: (u_lo, u_hi),
                nu0_range: (v_lo, v_hi),
                resolution: (nu, nv),
                rule,
            },
            values,
            cells,
        }));
    }

    let kind = match model {
        0 => ModelKind::ChuaCubic,
        1 => ModelKind::AcstCubic,
        _ => return Err(ContainerError::Corrupt("bad model byte")),
    };
    let transform = match transform {
        0 => ParamTransform::Identity,
        1 => ParamTransform::ChuaPolar,
        2 => ParamTransform::AcstAffine,
        _ => return Err(ContainerError::Corrupt("bad transform byte")),
    };
    let mode = match mode {
        0 => EncodeMode::Full,
        1 => EncodeMode::OneSided,
        2 => EncodeMode::Dcp,
        _ => return Err(ContainerError::Corrupt("bad mode byte")),
    };
    let branch = match branch {
        0 => Branch::Gamma1,
        1 => Branch::Gamma2,
        _ => return Err(ContainerError::Corrupt("bad branch byte")),
    };
    let encoding = KneadingConfig::new(wi as usize, wj as usize, q, mode)
        .map_err(|_| ContainerError::Corrupt("bad encoding header"))?;
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        values.push(r.f64()?);
    }
    let mut classes = Vec::with_capacity(n);
    for _ in 0..n {
        classes.push(
            CellClass::from_code(r.u8()?).ok_or(ContainerError::Corrupt("bad class byte"))?,
        );
    }
    let dcp = if mode == EncodeMode::Dcp {
        let mut codes = Vec::with_capacity(n);
        for _ in 0..n {
            codes.push(r.u32()?);
        }
        Some(codes)
    } else {
        None
    };
    r.done()?;
    Ok(Container::Sweep(SweepGrid {
        config: SweepConfig {
            model: kind,
            transform,
            u_range: (u_lo, u_hi),
            v_range: (v_lo, v_hi),
            resolution: (nu, nv),
            encoding,
            integration: IntegrationConfig {
                dt,
                ..Default::default()
            },
            branch,
        },
        values,
        classes,
        dcp,
    }))
}
