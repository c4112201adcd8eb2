//! Model return map near a symmetric pair of saddle-focus homoclinic
//! loops, and the combinatorics built on it: feasibility of symbol codes,
//! primary homoclinic roots, bar diagrams in the (mu, nu0) plane, and the
//! geometric self-similarity of root spacings.
//!
//! The map acts on a cross-section coordinate z (signed distance from the
//! stable manifold). One iterate is one global excursion; the sign of z
//! selects which loop the excursion follows, so a binary code prescribes a
//! sign itinerary whose realizability the map decides.

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("z = 0 lies on the stable manifold; the return map is undefined there")]
    AtSingularity,
    #[error("non-finite input")]
    NonFinite,
    #[error("invalid code: {0}")]
    BadCode(&'static str),
    #[error("invalid parameters: {0}")]
    BadParams(&'static str),
}

/// Coefficients of the return map. `r` is the validity radius of the local
/// linearization; `b0`/`phi2` shape the z-component, `a0`/`phi1`/`a1` the
/// angular component of the two-dimensional variant; `omega0` is the
/// winding rate and `nu0` the saddle index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnMapParams {
    pub b0: f64,
    pub r: f64,
    pub omega0: f64,
    pub nu0: f64,
    pub phi2: f64,
    pub a0: f64,
    pub phi1: f64,
    pub a1: f64,
}

impl Default for ReturnMapParams {
    fn default() -> Self {
        ReturnMapParams {
            b0: 0.8,
            r: 1.0,
            omega0: 3.0,
            nu0: 0.5,
            phi2: 0.0,
            a0: 1.0,
            phi1: 0.0,
            a1: 0.0,
        }
    }
}

impl ReturnMapParams {
    pub fn validate(&self) -> Result<(), TheoryError> {
        let all = [
            self.b0, self.r, self.omega0, self.nu0, self.phi2, self.a0, self.phi1, self.a1,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(TheoryError::NonFinite);
        }
        if self.r <= 0.0 || self.b0 <= 0.0 || self.omega0 <= 0.0 || self.nu0 <= 0.0 {
            return Err(TheoryError::BadParams("b0, r, omega0, nu0 must be positive"));
        }
        Ok(())
    }

    /// Amplitude of the z-component, B0 * R^(1 - nu0).
    fn amp(&self) -> f64 {
        self.b0 * self.r.powf(1.0 - self.nu0)
    }
}

/// Flight through the saddle-focus neighbourhood: a point at angle `phi0`
/// and height `z0` on the incoming section lands on the outgoing section at
/// radius R (|z0|/R)^nu0 and angle phi0 + Omega0 ln(R/|z0|).
///
/// Valid for |z0| <= R; z0 = 0 never exits (infinite winding).
pub fn local_map_t0(p: &ReturnMapParams, phi0: f64, z0: f64) -> Result<(f64, f64), TheoryError> {
    p.validate()?;
    if !phi0.is_finite() || !z0.is_finite() {
        return Err(TheoryError::NonFinite);
    }
    if z0 == 0.0 {
        return Err(TheoryError::AtSingularity);
    }
    debug_assert!(z0.abs() <= p.r, "local map used outside its validity radius");
    let r1 = p.r * (z0.abs() / p.r).powf(p.nu0);
    let th = phi0 + p.omega0 * (p.r / z0.abs()).ln();
    Ok((r1, th))
}

/// One-dimensional return map. For z > 0:
///
/// ```text
/// f(z) = mu - B0 R^(1-nu0) z^nu0 sin(Omega0 ln z + phi2)
/// ```
///
/// For z < 0 the symmetric-counterpart excursion gives
/// -mu + s_neg * B0 R^(1-nu0) |z|^nu0 sin(Omega0 ln|z| + phi2); the sign
/// `s_neg` (+1 or -1) distinguishes the two ways the mirrored excursion can
/// reinject, and is scheduled per symbol by [`ZeroSignRule`]. s_neg = -1 is
/// the image of the z > 0 branch under (phi, z) -> (phi + pi, -z).
pub fn map_1d(p: &ReturnMapParams, mu: f64, z: f64, s_neg: f64) -> Result<f64, TheoryError> {
    if !z.is_finite() || !mu.is_finite() {
        return Err(TheoryError::NonFinite);
    }
    if z == 0.0 {
        return Err(TheoryError::AtSingularity);
    }
    let amp = p.amp();
    let w = z.abs();
    let osc = amp * w.powf(p.nu0) * (p.omega0 * w.ln() + p.phi2).sin();
    Ok(if z > 0.0 { mu - osc } else { -mu + s_neg * osc })
}

/// Exact derivative of [`map_1d`] in z. For z > 0:
///
/// ```text
/// f'(z) = -(N2 / z^(1-nu0)) sin(Omega0 ln z + phi2 + theta0)
/// N2 = B0 R^(1-nu0) sqrt(nu0^2 + Omega0^2),  theta0 = acos(nu0 / sqrt(nu0^2 + Omega0^2))
/// ```
pub fn map_1d_derivative(
    p: &ReturnMapParams,
    z: f64,
    s_neg: f64,
) -> Result<f64, TheoryError> {
    if !z.is_finite() {
        return Err(TheoryError::NonFinite);
    }
    if z == 0.0 {
        return Err(TheoryError::AtSingularity);
    }
    let norm = (p.nu0 * p.nu0 + p.omega0 * p.omega0).sqrt();
    let n2 = p.amp() * norm;
    let theta0 = (p.nu0 / norm).acos();
    let w = z.abs();
    let d = -n2 * w.powf(p.nu0 - 1.0) * (p.omega0 * w.ln() + p.phi2 + theta0).sin();
    Ok(if z > 0.0 { d } else { -s_neg * d })
}

/// Sharp amplitude bound for [`map_1d_derivative`]: N2 / |z|^(1-nu0).
pub fn derivative_envelope(p: &ReturnMapParams, z: f64) -> f64 {
    let norm = (p.nu0 * p.nu0 + p.omega0 * p.omega0).sqrt();
    p.amp() * norm * z.abs().powf(p.nu0 - 1.0)
}

/// Two-dimensional return map on (phi, z). For z > 0:
///
/// ```text
/// phi' = a1 mu + A0 R^(1-nu0) z^nu0 cos(Omega0 ln z + phi1 - phi)
/// z'   =    mu - B0 R^(1-nu0) z^nu0 sin(Omega0 ln z + phi2 - phi)
/// ```
///
/// For z < 0 the map is the conjugate sigma . T . sigma with
/// sigma(phi, z) = (phi + pi, -z), so the symmetry is exact by
/// construction.
pub fn map_2d(
    p: &ReturnMapParams,
    mu: f64,
    phi: f64,
    z: f64,
) -> Result<(f64, f64), TheoryError> {
    if !phi.is_finite() || !z.is_finite() || !mu.is_finite() {
        return Err(TheoryError::NonFinite);
    }
    if z == 0.0 {
        return Err(TheoryError::AtSingularity);
    }
    if z > 0.0 {
        let zp = z.powf(p.nu0);
        let lnz = z.ln();
        let phi1 = p.a1 * mu
            + p.a0 * p.r.powf(1.0 - p.nu0) * zp * (p.omega0 * lnz + p.phi1 - phi).cos();
        let z1 = mu - p.amp() * zp * (p.omega0 * lnz + p.phi2 - phi).sin();
        Ok((phi1, z1))
    } else {
        let (ph, zz) = map_2d(p, mu, phi + std::f64::consts::PI, -z)?;
        Ok((ph + std::f64::consts::PI, -zz))
    }
}

/// How the reinjection sign `s_neg` is assigned across a maximal run of
/// consecutive 0 symbols. Alternating-from-minus reproduces the mirrored
/// geometry of back-and-forth excursions; the fixed rules are degenerate
/// variants kept for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroSignRule {
    #[default]
    AlternatingFromMinus,
    AlternatingFromPlus,
    FixedMinus,
    FixedPlus,
}

impl ZeroSignRule {
    /// Sign for the t-th symbol (0-based) inside a maximal zero run.
    fn sign(self, t: usize) -> f64 {
        match self {
            ZeroSignRule::AlternatingFromMinus => {
                if t % 2 == 0 {
                    -1.0
                } else {
                    1.0
                }
            }
            ZeroSignRule::AlternatingFromPlus => {
                if t % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            ZeroSignRule::FixedMinus => -1.0,
            ZeroSignRule::FixedPlus => 1.0,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            ZeroSignRule::AlternatingFromMinus => 0,
            ZeroSignRule::AlternatingFromPlus => 1,
            ZeroSignRule::FixedMinus => 2,
            ZeroSignRule::FixedPlus => 3,
        }
    }

    pub fn from_u8(code: u8) -> Option<Self> {
        Some(match code {
            0 => ZeroSignRule::AlternatingFromMinus,
            1 => ZeroSignRule::AlternatingFromPlus,
            2 => ZeroSignRule::FixedMinus,
            3 => ZeroSignRule::FixedPlus,
            _ => return None,
        })
    }
}

/// Per-index reinjection signs for a code: entry k applies when symbol k
/// is 0; entries under 1 symbols are unused (set to +1).
fn zero_signs(code: &[u8], rule: ZeroSignRule) -> Vec<f64> {
    let mut out = vec![1.0; code.len()];
    let mut k = 0;
    while k < code.len() {
        if code[k] == 0 {
            let start = k;
            while k < code.len() && code[k] == 0 {
                out[k] = rule.sign(k - start);
                k += 1;
            }
        } else {
            k += 1;
        }
    }
    out
}

/// Outcome of driving the map along a prescribed code. `zs` holds the
/// iterates z_1, z_2, ... produced before the stop (z_0 = mu is implicit).
#[derive(Debug, Clone, PartialEq)]
pub enum CodeIteration {
    /// Every prescribed sign was realized; the last entry of `zs` (or mu
    /// itself for a length-1 code) is the free diagnostic value.
    Feasible { zs: Vec<f64> },
    /// The iterate before step `at_step` had the wrong sign for the
    /// step's symbol.
    Infeasible { at_step: usize, zs: Vec<f64> },
    /// An iterate hit z = 0 exactly; the orbit lands on the stable
    /// manifold and the code ends there.
    Degenerate { at_step: usize, zs: Vec<f64> },
}

impl CodeIteration {
    /// Diagnostic value for feasible runs: the last free iterate.
    pub fn final_z(&self, mu: f64) -> Option<f64> {
        match self {
            CodeIteration::Feasible { zs } => Some(zs.last().copied().unwrap_or(mu)),
            _ => None,
        }
    }
}

fn check_code(code: &[u8]) -> Result<(), TheoryError> {
    if code.is_empty() {
        return Err(TheoryError::BadCode("code is empty"));
    }
    if code[0] != 1 {
        return Err(TheoryError::BadCode("codes are normalized to start with 1"));
    }
    if code.iter().any(|&c| c > 1) {
        return Err(TheoryError::BadCode("symbols must be 0 or 1"));
    }
    Ok(())
}

/// Follows the code kappa_0 kappa_1 ... kappa_{l-1}: z_0 = mu, and for each
/// k >= 1 the symbol kappa_k demands sign(z_{k-1}) = + for 1, - for 0
/// before the map is applied. The final iterate z_{l-1} is unconstrained;
/// its sign decides whether the extended code (this code plus one more
/// symbol) is realizable, which is what the bar diagrams plot.
pub fn iterate_code(
    p: &ReturnMapParams,
    mu: f64,
    code: &[u8],
    rule: ZeroSignRule,
) -> Result<CodeIteration, TheoryError> {
    p.validate()?;
    check_code(code)?;
    if !mu.is_finite() {
        return Err(TheoryError::NonFinite);
    }
    let signs = zero_signs(code, rule);
    let mut zs = Vec::with_capacity(code.len().saturating_sub(1));
    let mut z = mu;
    for k in 1..code.len() {
        if z == 0.0 {
            return Ok(CodeIteration::Degenerate { at_step: k, zs });
        }
        let want_pos = code[k] == 1;
        if (z > 0.0) != want_pos {
            return Ok(CodeIteration::Infeasible { at_step: k, zs });
        }
        z = map_1d(p, mu, z, signs[k])?;
        zs.push(z);
    }
    Ok(CodeIteration::Feasible { zs })
}

/// The two families of leading-order primary homoclinic roots: parameter
/// values where the oscillatory factor sin(Omega0 ln mu + phi2) of the
/// separatrix image vanishes. Family `EvenPi` takes the phase to -2 n pi,
/// `OddPi` to (1 - 2n) pi.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootFamily {
    EvenPi,
    OddPi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimaryRoot {
    pub mu: f64,
    pub n: i32,
    pub family: RootFamily,
    /// False when mu >= R, where the local linearization no longer holds.
    pub inside_validity: bool,
}

/// Roots mu_n = exp((-2 n pi - phi2)/Omega0) and
/// exp(((1 - 2n) pi - phi2)/Omega0) for n in `n_lo..=n_hi`. Successive
/// same-family roots contract by exp(-2 pi / Omega0).
pub fn primary_roots(
    p: &ReturnMapParams,
    n_lo: i32,
    n_hi: i32,
) -> Result<Vec<PrimaryRoot>, TheoryError> {
    p.validate()?;
    if n_lo > n_hi {
        return Err(TheoryError::BadParams("empty n range"));
    }
    let mut out = Vec::with_capacity(2 * (n_hi - n_lo + 1) as usize);
    for n in n_lo..=n_hi {
        let even = ((-2.0 * n as f64 * std::f64::consts::PI - p.phi2) / p.omega0).exp();
        let odd = (((1.0 - 2.0 * n as f64) * std::f64::consts::PI - p.phi2) / p.omega0).exp();
        out.push(PrimaryRoot {
            mu: even,
            n,
            family: RootFamily::EvenPi,
            inside_validity: even < p.r,
        });
        out.push(PrimaryRoot {
            mu: odd,
            n,
            family: RootFamily::OddPi,
            inside_validity: odd < p.r,
        });
    }
    Ok(out)
}

/// Predicted top of a feasibility bar at parameter magnitude `mu_abs`:
/// the boundary z_1 = 0 solves nu0 = 1 - ln(B0 sin theta)/(ln mu - ln R),
/// and the bar's tip sits where sin theta = 1.
pub fn bar_top_nu(p: &ReturnMapParams, mu_abs: f64) -> f64 {
    1.0 - p.b0.ln() / (mu_abs.ln() - p.r.ln())
}

/// Grid sweep over (|mu|, nu0) of one code's feasibility.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramConfig {
    pub params: ReturnMapParams,
    pub code: Vec<u8>,
    /// Column magnitudes, sampled log-uniformly; the sign of mu is fixed
    /// by the code's second symbol (or + for length-1 codes).
    pub mu_abs_range: (f64, f64),
    pub nu0_range: (f64, f64),
    /// (columns, rows).
    pub resolution: (u32, u32),
    pub rule: ZeroSignRule,
}

impl DiagramConfig {
    pub fn validate(&self) -> Result<(), TheoryError> {
        self.params.validate()?;
        check_code(&self.code)?;
        if !(self.mu_abs_range.0 > 0.0 && self.mu_abs_range.0 < self.mu_abs_range.1) {
            return Err(TheoryError::BadParams("need 0 < mu_lo < mu_hi"));
        }
        if !(self.nu0_range.0 > 0.0 && self.nu0_range.0 < self.nu0_range.1) {
            return Err(TheoryError::BadParams("need 0 < nu0_lo < nu0_hi"));
        }
        if self.resolution.0 < 2 || self.resolution.1 < 2 {
            return Err(TheoryError::BadParams("resolution must be at least 2 per axis"));
        }
        Ok(())
    }

    /// Signed mu for column c.
    pub fn mu_at(&self, c: u32) -> f64 {
        let (lo, hi) = self.mu_abs_range;
        let t = c as f64 / (self.resolution.0 - 1) as f64;
        let mag = (lo.ln() + t * (hi.ln() - lo.ln())).exp();
        if self.code.len() > 1 && self.code[1] == 0 {
            -mag
        } else {
            mag
        }
    }

    /// nu0 for row r.
    pub fn nu0_at(&self, r: u32) -> f64 {
        let (lo, hi) = self.nu0_range;
        lo + r as f64 * (hi - lo) / (self.resolution.1 - 1) as f64
    }
}

/// Cell states of a feasibility diagram. Feasible cells carry the sign of
/// the final free iterate, which is exactly the feasibility of the code
/// extended by one more symbol (0 for negative, 1 for positive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum FeasCell {
    FeasibleNeg = 0,
    FeasiblePos = 1,
    Infeasible = 2,
}

impl FeasCell {
    pub fn from_code(code: u8) -> Option<FeasCell> {
        Some(match code {
            0 => FeasCell::FeasibleNeg,
            1 => FeasCell::FeasiblePos,
            2 => FeasCell::Infeasible,
            _ => return None,
        })
    }
}

/// Feasibility diagram; row-major like the flow sweeps (column index
/// fastest, row 0 at nu0 = nu0_lo). `values` holds the final free iterate
/// for feasible cells and 0.0 elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryGrid {
    pub config: DiagramConfig,
    pub values: Vec<f64>,
    pub cells: Vec<FeasCell>,
}

impl TheoryGrid {
    pub fn idx(&self, c: u32, r: u32) -> usize {
        (r * self.config.resolution.0 + c) as usize
    }
}

/// Evaluates the code over the whole (|mu|, nu0) grid in parallel. Cells
/// are independent and collected in index order, so output is identical
/// for any worker count. Degenerate hits (exact z = 0, measure zero on a
/// generic grid) are recorded as infeasible.
pub fn diagram_sweep(cfg: &DiagramConfig) -> Result<TheoryGrid, TheoryError> {
    cfg.validate()?;
    let (nc, nr) = cfg.resolution;
    let n = nc as usize * nr as usize;
    let out: Vec<(f64, FeasCell)> = (0..n)
        .into_par_iter()
        .map(|idx| {
            let c = (idx % nc as usize) as u32;
            let r = (idx / nc as usize) as u32;
            let mut p = cfg.params;
            p.nu0 = cfg.nu0_at(r);
            let mu = cfg.mu_at(c);
            match iterate_code(&p, mu, &cfg.code, cfg.rule) {
                Ok(CodeIteration::Feasible { zs }) => {
                    let fz = zs.last().copied().unwrap_or(mu);
                    let cell = if fz < 0.0 {
                        FeasCell::FeasibleNeg
                    } else {
                        FeasCell::FeasiblePos
                    };
                    (fz, cell)
                }
                _ => (0.0, FeasCell::Infeasible),
            }
        })
        .collect();
    Ok(TheoryGrid {
        config: cfg.clone(),
        values: out.iter().map(|x| x.0).collect(),
        cells: out.iter().map(|x| x.1).collect(),
    })
}

/// Result of [`scalability_check`]: consecutive-interval width ratios and
/// center spacing ratios, to be compared against `expected`,
/// exp(-2 pi / Omega0).
#[derive(Debug, Clone, PartialEq)]
pub enum ScalabilityOutcome {
    Ok {
        /// Negative-iterate intervals (mu_lo, mu_hi), largest mu first.
        intervals: Vec<(f64, f64)>,
        width_ratios: Vec<f64>,
        spacing_ratios: Vec<f64>,
        expected: f64,
    },
    InsufficientData {
        intervals_found: usize,
    },
}

/// Measures the geometric self-similarity of the final-iterate sign
/// structure along mu. Scans ln mu over `lnmu_range` (64 samples per
/// pi/Omega0), locates sign changes of the final free iterate by bisection
/// to ln-mu width 1e-12, groups them into intervals where the iterate is
/// negative, and reports consecutive ratios of interval widths and center
/// spacings in mu. Both converge to exp(-2 pi / Omega0) as mu -> 0.
pub fn scalability_check(
    p: &ReturnMapParams,
    code: &[u8],
    rule: ZeroSignRule,
    lnmu_range: (f64, f64),
) -> Result<ScalabilityOutcome, TheoryError> {
    p.validate()?;
    check_code(code)?;
    if !(lnmu_range.0 < lnmu_range.1) {
        return Err(TheoryError::BadParams("need lnmu_lo < lnmu_hi"));
    }
    let sign = if code.len() > 1 && code[1] == 0 { -1.0 } else { 1.0 };
    let eval = |lnmu: f64| -> Option<f64> {
        let mu = sign * lnmu.exp();
        match iterate_code(p, mu, code, rule) {
            Ok(it) => it.final_z(mu),
            Err(_) => None,
        }
    };

    let step = std::f64::consts::PI / p.omega0 / 64.0;
    let n_steps = ((lnmu_range.1 - lnmu_range.0) / step).ceil() as usize + 1;
    let xs: Vec<f64> = (0..=n_steps)
        .map(|k| lnmu_range.0 + k as f64 * (lnmu_range.1 - lnmu_range.0) / n_steps as f64)
        .collect();
    let fs: Vec<Option<f64>> = xs.iter().map(|&x| eval(x)).collect();

    // Bisect each bracketing pair of same-availability samples.
    let mut roots = Vec::new();
    for k in 0..n_steps {
        let (fa, fb) = match (fs[k], fs[k + 1]) {
            (Some(a), Some(b)) => (a, b),
            _ => continue,
        };
        if fa == 0.0 {
            roots.push(xs[k]);
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        let (mut lo, mut hi) = (xs[k], xs[k + 1]);
        let mut flo = fa;
        for _ in 0..100 {
            if hi - lo <= 1e-12 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            match eval(mid) {
                Some(fm) if fm * flo > 0.0 => {
                    lo = mid;
                    flo = fm;
                }
                Some(_) => hi = mid,
                None => break,
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // Keep the gaps between consecutive roots where the iterate is negative.
    let mut intervals = Vec::new();
    for w in roots.windows(2) {
        if let Some(fm) = eval(0.5 * (w[0] + w[1])) {
            if fm < 0.0 {
                intervals.push((w[0].exp(), w[1].exp()));
            }
        }
    }
    if intervals.len() < 3 {
        return Ok(ScalabilityOutcome::InsufficientData {
            intervals_found: intervals.len(),
        });
    }
    // Largest mu first, so each ratio compares an interval to the next
    // one inward.
    intervals.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let widths: Vec<f64> = intervals.iter().map(|&(a, b)| b - a).collect();
    let centers: Vec<f64> = intervals.iter().map(|&(a, b)| 0.5 * (a + b)).collect();
    let width_ratios = widths.windows(2).map(|w| w[1] / w[0]).collect();
    let spacings: Vec<f64> = centers.windows(2).map(|c| c[0] - c[1]).collect();
    let spacing_ratios = spacings.windows(2).map(|d| d[1] / d[0]).collect();
    Ok(ScalabilityOutcome::Ok {
        intervals,
        width_ratios,
        spacing_ratios,
        expected: (-2.0 * std::f64::consts::PI / p.omega0).exp(),
    })
}
