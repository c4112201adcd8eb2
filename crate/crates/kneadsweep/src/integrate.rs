//! Fixed-step RK4 integration of separatrix trajectories and online
//! extraction of binary symbols from the x-coordinate's extrema.

use crate::cubic::{solve_cubic, CubicRoots};
use crate::models::{char_poly, ModelSpec};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum IntegrateError {
    #[error("no 1D unstable direction at the origin")]
    NoUnstableDirection,
}

/// Tunables for one symbol-producing integration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    /// Fixed RK4 time step.
    pub dt: f64,
    /// Wall of integration time; hitting it yields a TimedOut status.
    pub max_time: f64,
    /// Stop after this many symbols (Completed status).
    pub max_symbols: usize,
    /// Max-norm escape radius.
    pub esc_bound: f64,
    /// Offset of the initial condition along the unstable eigenvector.
    pub delta: f64,
    /// Extrema must clear ±this value to emit a symbol.
    pub symbol_threshold: f64,
    /// Refine each extremum by a parabola through the sample triple before
    /// the threshold test; reduces sensitivity to dt near boundaries.
    pub refine_extrema: bool,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            dt: 0.002,
            max_time: 1e5,
            max_symbols: 1000,
            esc_bound: 100.0,
            delta: 1e-6,
            symbol_threshold: 1.0,
            refine_extrema: true,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(format!("dt must be positive and finite, got {}", self.dt));
        }
        if !(self.delta > 0.0) {
            return Err(format!("delta must be positive, got {}", self.delta));
        }
        if !(self.esc_bound > 0.0) {
            return Err(format!("esc_bound must be positive, got {}", self.esc_bound));
        }
        if self.max_symbols == 0 {
            return Err("max_symbols must be at least 1".into());
        }
        if !(self.max_time > 0.0) {
            return Err(format!("max_time must be positive, got {}", self.max_time));
        }
        Ok(())
    }
}

/// How a symbol run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// max_symbols symbols were emitted.
    Completed,
    /// Trajectory left the escape ball (or went non-finite); the index is
    /// the symbol count at that moment.
    Escaped { at_symbol: usize },
    /// max_time elapsed first.
    TimedOut { symbols_emitted: usize },
}

/// Ordered binary symbols from one trajectory plus its termination status.
/// Symbols emitted before an escape/timeout are valid and retained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolStream {
    pub symbols: Vec<u8>,
    pub status: RunStatus,
}

/// The two branches of the origin's 1D unstable manifold; Gamma1 leaves in
/// the x > 0 direction and Gamma2 is its ℤ₂ mirror.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Gamma1,
    Gamma2,
}

#[inline]
fn add_scaled(s: [f64; 3], k: [f64; 3], h: f64) -> [f64; 3] {
    [s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2]]
}

/// One classical 4-stage RK4 step for an arbitrary 3D field; the library
/// models go through [`rk4_step`]. A non-finite result propagates to the
/// caller, which is how divergence is signalled.
#[inline]
pub fn rk4_step_with<F: Fn([f64; 3]) -> [f64; 3]>(f: F, s: [f64; 3], dt: f64) -> [f64; 3] {
    let k1 = f(s);
    let k2 = f(add_scaled(s, k1, dt / 2.0));
    let k3 = f(add_scaled(s, k2, dt / 2.0));
    let k4 = f(add_scaled(s, k3, dt));
    [
        s[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        s[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        s[2] + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    ]
}

/// One RK4 step of a model trajectory.
#[inline]
pub fn rk4_step(m: &ModelSpec, s: [f64; 3], dt: f64) -> [f64; 3] {
    rk4_step_with(|p| m.field_raw(p), s, dt)
}

/// Initial condition `±delta * v̂` on the chosen separatrix branch, where
/// `v̂` is the unit eigenvector of the origin's positive real eigenvalue,
/// sign-normalized so its x-component is positive (Gamma1 = "right").
///
/// Errors unless the origin spectrum has exactly one eigenvalue with
/// positive real part and that eigenvalue is real.
pub fn separatrix_ic(
    m: &ModelSpec,
    branch: Branch,
    delta: f64,
) -> Result<[f64; 3], IntegrateError> {
    let j = m
        .jacobian([0.0; 3])
        .map_err(|_| IntegrateError::NoUnstableDirection)?;
    let (c2, c1, c0) = char_poly(&j);
    let lambda = match solve_cubic(c2, c1, c0) {
        CubicRoots::OneRealPair { real, re, .. } => {
            if real > 0.0 && re < 0.0 {
                real
            } else {
                return Err(IntegrateError::NoUnstableDirection);
            }
        }
        CubicRoots::ThreeReal(rs) => {
            let mut pos = rs.iter().copied().filter(|r| *r > 0.0);
            match (pos.next(), pos.next()) {
                (Some(l), None) => l,
                _ => return Err(IntegrateError::NoUnstableDirection),
            }
        }
    };

    // Null vector of (J - lambda I): the cross product of any two
    // independent rows is orthogonal to both; take the largest.
    let r = [
        [j[0][0] - lambda, j[0][1], j[0][2]],
        [j[1][0], j[1][1] - lambda, j[1][2]],
        [j[2][0], j[2][1], j[2][2] - lambda],
    ];
    let cross = |u: [f64; 3], w: [f64; 3]| {
        [
            u[1] * w[2] - u[2] * w[1],
            u[2] * w[0] - u[0] * w[2],
            u[0] * w[1] - u[1] * w[0],
        ]
    };
    let cands = [cross(r[0], r[1]), cross(r[0], r[2]), cross(r[1], r[2])];
    let norm = |v: &[f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let v = cands
        .iter()
        .max_by(|a, b| norm(a).total_cmp(&norm(b)))
        .copied()
        .expect("three candidates");
    let n = norm(&v);
    if !(n > 0.0) || !n.is_finite() {
        return Err(IntegrateError::NoUnstableDirection);
    }
    let mut v = [v[0] / n, v[1] / n, v[2] / n];
    // Orient toward positive x; fall back to y then z if x vanishes.
    let lead = if v[0].abs() > 1e-14 {
        v[0]
    } else if v[1].abs() > 1e-14 {
        v[1]
    } else {
        v[2]
    };
    if lead < 0.0 {
        v = [-v[0], -v[1], -v[2]];
    }
    let sign = match branch {
        Branch::Gamma1 => delta,
        Branch::Gamma2 => -delta,
    };
    Ok([sign * v[0], sign * v[1], sign * v[2]])
}

/// Quadratic refinement of an extremum from the sample triple around it.
/// The parabola through three equally spaced samples has its vertex at
/// xp - (x2-x0)^2 / (8 (x2 - 2 x1 + x0)); the denominator cannot vanish
/// when the triple brackets a strict extremum.
#[inline]
fn refine_extremum(x0: f64, x1: f64, x2: f64) -> f64 {
    let num = x2 - x0;
    x1 - num * num / (8.0 * (x2 - 2.0 * x1 + x0))
}

/// Integrates from `ic`, emitting 1 for each local maximum of x above
/// `+symbol_threshold` and 0 for each local minimum below the negative
/// threshold; extrema inside the dead band emit nothing. Extrema are
/// detected by the sign change of discrete differences over consecutive
/// sample triples. Escape (or a non-finite state) and the time wall are
/// checked before the extremum test each step.
pub fn integrate_symbols(m: &ModelSpec, ic: [f64; 3], cfg: &IntegrationConfig) -> SymbolStream {
    if let Err(msg) = cfg.validate() {
        panic!("invalid IntegrationConfig: {msg}");
    }
    let mut symbols = Vec::with_capacity(cfg.max_symbols.min(4096));
    let max_steps = (cfg.max_time / cfg.dt) as u64;
    let mut s = ic;
    let mut xpp = ic[0];
    let mut xp = ic[0];
    let mut samples: u64 = 1;

    for _ in 0..max_steps {
        s = rk4_step(m, s, cfg.dt);
        let x = s[0];
        if !(s[0].is_finite() && s[1].is_finite() && s[2].is_finite())
            || s[0].abs().max(s[1].abs()).max(s[2].abs()) > cfg.esc_bound
        {
            return SymbolStream {
                symbols: symbols.clone(),
                status: RunStatus::Escaped {
                    at_symbol: symbols.len(),
                },
            };
        }
        if samples >= 2 {
            let d1 = xp - xpp;
            let d2 = x - xp;
            if d1 > 0.0 && d2 < 0.0 {
                let v = if cfg.refine_extrema {
                    refine_extremum(xpp, xp, x)
                } else {
                    xp
                };
                if v > cfg.symbol_threshold {
                    symbols.push(1);
                }
            } else if d1 < 0.0 && d2 > 0.0 {
                let v = if cfg.refine_extrema {
                    refine_extremum(xpp, xp, x)
                } else {
                    xp
                };
                if v < -cfg.symbol_threshold {
                    symbols.push(0);
                }
            }
            if symbols.len() >= cfg.max_symbols {
                return SymbolStream {
                    symbols,
                    status: RunStatus::Completed,
                };
            }
        }
        xpp = xp;
        xp = x;
        samples += 1;
    }
    let n = symbols.len();
    SymbolStream {
        symbols,
        status: RunStatus::TimedOut { symbols_emitted: n },
    }
}
