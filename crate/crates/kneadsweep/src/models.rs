//! The two concrete ℤ₂-symmetric model systems, their equilibria and
//! spectra, analytic bifurcation-curve formulas, and parameter charts.
//!
//! Both vector fields are odd polynomials, `F(-s) = -F(s)` exactly in IEEE
//! arithmetic, which downstream code exploits: the two separatrix branches
//! of the origin produce bitwise-complementary symbol sequences.

use crate::cubic::{solve_cubic, CubicRoots};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("non-finite state")]
    NonFiniteState,
    #[error("non-finite parameters")]
    NonFiniteParams,
    #[error("parameters must be positive for sweep use (a={a}, b={b})")]
    NonPositiveParams { a: f64, b: f64 },
    #[error("not an equilibrium (vector-field residual {residual:e})")]
    NotAnEquilibrium { residual: f64 },
    #[error("curve undefined here: {reason}")]
    CurveUndefined { reason: &'static str },
}

/// Which concrete ODE system a [`ModelSpec`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Smooth Chua circuit with a cubic nonlinearity:
    /// x' = a(y + x/6 - x^3/6), y' = x - y + z, z' = -b y.
    ChuaCubic,
    /// Cubic normal-form system:
    /// x' = y, y' = z, z' = -b z - y + a x (1 - x^2).
    AcstCubic,
}

/// A model plus its two scalar parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub a: f64,
    pub b: f64,
}

impl ModelSpec {
    /// Any finite parameter values are accepted.
    pub fn new(kind: ModelKind, a: f64, b: f64) -> Result<Self, ModelError> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(ModelError::NonFiniteParams);
        }
        Ok(ModelSpec { kind, a, b })
    }

    /// Stricter constructor for sweep cells: both parameters must be
    /// positive, the regime every studied window lives in.
    pub fn positive(kind: ModelKind, a: f64, b: f64) -> Result<Self, ModelError> {
        let spec = Self::new(kind, a, b)?;
        if a <= 0.0 || b <= 0.0 {
            return Err(ModelError::NonPositiveParams { a, b });
        }
        Ok(spec)
    }

    /// Right-hand side without the finiteness check; the integrator monitors
    /// divergence itself, so the hot loop skips it.
    #[inline]
    pub(crate) fn field_raw(&self, s: [f64; 3]) -> [f64; 3] {
        let [x, y, z] = s;
        match self.kind {
            ModelKind::ChuaCubic => [
                self.a * (y + x / 6.0 - x * x * x / 6.0),
                x - y + z,
                -self.b * y,
            ],
            ModelKind::AcstCubic => [y, z, -self.b * z - y + self.a * x * (1.0 - x * x)],
        }
    }

    /// Evaluates the vector field at `s`.
    pub fn vector_field(&self, s: [f64; 3]) -> Result<[f64; 3], ModelError> {
        if s.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteState);
        }
        Ok(self.field_raw(s))
    }

    /// Analytic Jacobian at `s`.
    pub fn jacobian(&self, s: [f64; 3]) -> Result<[[f64; 3]; 3], ModelError> {
        if s.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteState);
        }
        let x = s[0];
        Ok(match self.kind {
            ModelKind::ChuaCubic => [
                [self.a * (1.0 / 6.0 - x * x / 2.0), self.a, 0.0],
                [1.0, -1.0, 1.0],
                [0.0, -self.b, 0.0],
            ],
            ModelKind::AcstCubic => [
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [self.a * (1.0 - 3.0 * x * x), -1.0, -self.b],
            ],
        })
    }

    /// All equilibria. Both systems have the origin plus a symmetric pair;
    /// the returned points zero the vector field exactly.
    ///
    /// The pair coordinates are the ones that solve the printed equations;
    /// published descriptions of the second system place them on the z-axis,
    /// which does not satisfy its own ODE.
    pub fn equilibria(&self) -> Vec<[f64; 3]> {
        match self.kind {
            ModelKind::ChuaCubic => vec![
                [0.0, 0.0, 0.0],
                [-1.0, 0.0, 1.0],
                [1.0, 0.0, -1.0],
            ],
            ModelKind::AcstCubic => {
                vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]
            }
        }
    }

    /// Classifies the equilibrium at `p`; see [`classify_equilibrium`].
    pub fn classify_equilibrium(&self, p: [f64; 3]) -> Result<EquilibriumReport, ModelError> {
        classify_equilibrium(self, p)
    }
}

/// Topological type of an equilibrium by eigenvalue sign pattern.
///
/// Real or imaginary parts within 1e-9 of zero are treated as boundary
/// cases and classified [`TopoClass::Other`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopoClass {
    /// All eigenvalues in the open left half-plane.
    StableFocusNode,
    /// One positive real eigenvalue, stable complex pair (2D stable, 1D unstable).
    SaddleFocus21,
    /// One negative real eigenvalue, unstable complex pair (1D stable, 2D unstable).
    SaddleFocus12,
    /// All real: one positive, two negative.
    Saddle21,
    /// Anything else, including near-degenerate spectra.
    Other,
}

/// An equilibrium with its spectrum and the derived saddle quantities.
///
/// For a spectrum with one real eigenvalue λ and a complex pair -ρ ± iω the
/// fields are the classical ones: saddle index ν = ρ/λ, saddle value
/// σ₁ = λ - ρ, and σ₂ = λ - 2ρ (the Jacobian trace). For an all-real
/// spectrum the decomposition is generalized: the designated eigenvalue λ*
/// is the real root nearest -trace, the other two play the pair's role with
/// ρ = (λ* - trace)/2, and σ₁ = (λ* + trace)/2. This keeps σ₁ continuous
/// across focus/node transitions and exactly zero along the analytic
/// neutral-saddle continuation of the σ₁ = 0 curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumReport {
    pub location: [f64; 3],
    /// Real eigenvalue first; for an all-real spectrum, sorted descending.
    pub eigenvalues: [Complex64; 3],
    /// Designated real eigenvalue λ (the expansion rate for a (2,1) type).
    pub lambda: Option<f64>,
    /// Contraction rate ρ of the (possibly generalized) pair.
    pub rho: Option<f64>,
    /// Spiral frequency; absent for all-real spectra.
    pub omega: Option<f64>,
    /// Saddle index ν = ρ/λ.
    pub nu: Option<f64>,
    /// Saddle value σ₁ = λ - ρ.
    pub sigma1: Option<f64>,
    /// σ₂ = λ - 2ρ; equals the Jacobian trace for these models.
    pub sigma2: Option<f64>,
    pub topo_class: TopoClass,
}

/// Coefficients of det(sI - J) = s^3 + c2 s^2 + c1 s + c0.
pub(crate) fn char_poly(j: &[[f64; 3]; 3]) -> (f64, f64, f64) {
    let tr = j[0][0] + j[1][1] + j[2][2];
    let minors = j[0][0] * j[1][1] - j[0][1] * j[1][0]
        + j[0][0] * j[2][2]
        - j[0][2] * j[2][0]
        + j[1][1] * j[2][2]
        - j[1][2] * j[2][1];
    let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1])
        - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
        + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    (-tr, minors, -det)
}

const ZERO_EPS: f64 = 1e-9;

/// Computes the spectrum of the Jacobian at `p` (closed-form cubic solve)
/// and fills the saddle quantities and topological class.
///
/// `p` must be an equilibrium to residual 1e-8 in max norm.
pub fn classify_equilibrium(m: &ModelSpec, p: [f64; 3]) -> Result<EquilibriumReport, ModelError> {
    let f = m.vector_field(p)?;
    let residual = f.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if residual >= 1e-8 {
        return Err(ModelError::NotAnEquilibrium { residual });
    }
    let j = m.jacobian(p)?;
    let (c2, c1, c0) = char_poly(&j);
    let roots = solve_cubic(c2, c1, c0);
    let trace = -c2;

    let (eigenvalues, lambda, rho, omega, topo_class) = match roots {
        CubicRoots::OneRealPair { real, re, im } => {
            let eig = [
                Complex64::new(real, 0.0),
                Complex64::new(re, im),
                Complex64::new(re, -im),
            ];
            let class = if real.abs() < ZERO_EPS || re.abs() < ZERO_EPS {
                TopoClass::Other
            } else if real > 0.0 && re < 0.0 {
                TopoClass::SaddleFocus21
            } else if real < 0.0 && re > 0.0 {
                TopoClass::SaddleFocus12
            } else if real < 0.0 && re < 0.0 {
                TopoClass::StableFocusNode
            } else {
                TopoClass::Other
            };
            (eig, real, -re, Some(im), class)
        }
        CubicRoots::ThreeReal(mut rs) => {
            rs.sort_by(|x, y| y.total_cmp(x));
            let eig = [
                Complex64::new(rs[0], 0.0),
                Complex64::new(rs[1], 0.0),
                Complex64::new(rs[2], 0.0),
            ];
            // Generalized designation: the root nearest -trace, so that the
            // remaining two act as the pair.
            let star = rs
                .into_iter()
                .min_by(|x, y| (x + trace).abs().total_cmp(&(y + trace).abs()))
                .expect("three roots");
            let class = if rs.iter().any(|r| r.abs() < ZERO_EPS) {
                TopoClass::Other
            } else if rs.iter().all(|r| *r < 0.0) {
                TopoClass::StableFocusNode
            } else if rs.iter().filter(|r| **r > 0.0).count() == 1 {
                TopoClass::Saddle21
            } else {
                TopoClass::Other
            };
            (eig, star, (star - trace) / 2.0, None, class)
        }
    };

    Ok(EquilibriumReport {
        location: p,
        eigenvalues,
        lambda: Some(lambda),
        rho: Some(rho),
        omega,
        nu: (lambda != 0.0).then(|| rho / lambda),
        sigma1: Some(lambda - rho),
        sigma2: Some(lambda - 2.0 * rho),
        topo_class,
    })
}

/// Analytic bifurcation curves of the Chua-type system's origin, as graphs
/// b(a) or vertical-line descriptors in the (a, b) plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveKind {
    /// Neutral saddle-focus / neutral saddle: σ₁ = 0 (ν = 1).
    Nsf,
    /// Neutrally-divergent saddle-focus: σ₂ = 0 (ν = 1/2).
    Ndsf,
    /// Locus of constant saddle index ν = ξ.
    NuEqualsXi(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvePoint {
    /// The curve passes through (a, b) at this b.
    B(f64),
    /// The curve is the vertical line a = const, not a graph over a.
    VerticalLine { a: f64 },
}

/// Evaluates an analytic curve at abscissa `a`. Only the Chua-type system
/// has closed-form curves.
pub fn analytic_curve(
    kind: ModelKind,
    which: CurveKind,
    a: f64,
) -> Result<CurvePoint, ModelError> {
    if kind != ModelKind::ChuaCubic {
        return Err(ModelError::CurveUndefined {
            reason: "closed-form curves exist only for the Chua-type system",
        });
    }
    if !a.is_finite() {
        return Err(ModelError::NonFiniteParams);
    }
    match which {
        CurveKind::Nsf => {
            if a == 3.0 {
                return Err(ModelError::CurveUndefined { reason: "pole at a = 3" });
            }
            let b = (a * a - 33.0 * a + 36.0) * (a - 6.0) / (36.0 * (3.0 - a));
            Ok(CurvePoint::B(b))
        }
        CurveKind::Ndsf => Ok(CurvePoint::VerticalLine { a: 6.0 }),
        CurveKind::NuEqualsXi(xi) => {
            if !(0.0 < xi && xi < 1.0) || xi == 0.5 {
                return Err(ModelError::CurveUndefined {
                    reason: "saddle-index level must lie in (0,1) and differ from 1/2",
                });
            }
            if a * xi == 3.0 {
                return Err(ModelError::CurveUndefined {
                    reason: "asymptote at a = 3/xi",
                });
            }
            let d = a - 6.0;
            let b = (7.0 * a * d / 12.0 - xi * d * d * d / (36.0 * (1.0 - 2.0 * xi).powi(2)))
                / (a * xi - 3.0);
            Ok(CurvePoint::B(b))
        }
    }
}

/// Parameter charts mapping sweep coordinates (u, v) to model parameters (a, b).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamTransform {
    /// (u, v) = (a, b) directly.
    Identity,
    /// Polar chart centered at the sector tip (1.8623, 1.8743):
    /// a = 1.8623 + L cos α, b = 1.8743 + L sin α with (u, v) = (α, L).
    ChuaPolar,
    /// Affine chart a = 0.24 + 1.76 c + 0.55 d, b = 1.24 c + 0.81 d
    /// with (u, v) = (c, d).
    AcstAffine,
}

/// Tip of the polar parameter chart.
pub const CHUA_POLAR_TIP: (f64, f64) = (1.8623, 1.8743);

impl ParamTransform {
    /// Maps chart coordinates to model parameters.
    pub fn apply(&self, u: f64, v: f64) -> (f64, f64) {
        match self {
            ParamTransform::Identity => (u, v),
            ParamTransform::ChuaPolar => (
                CHUA_POLAR_TIP.0 + v * u.cos(),
                CHUA_POLAR_TIP.1 + v * u.sin(),
            ),
            ParamTransform::AcstAffine => (0.24 + 1.76 * u + 0.55 * v, 1.24 * u + 0.81 * v),
        }
    }

    /// Inverse chart. For the polar chart the angle is reported in (-π, π]
    /// and is arbitrary at the tip (L = 0).
    pub fn invert(&self, a: f64, b: f64) -> (f64, f64) {
        match self {
            ParamTransform::Identity => (a, b),
            ParamTransform::ChuaPolar => {
                let (dx, dy) = (a - CHUA_POLAR_TIP.0, b - CHUA_POLAR_TIP.1);
                (dy.atan2(dx), dx.hypot(dy))
            }
            ParamTransform::AcstAffine => {
                // Invert the 2x2 linear part; det = 1.76*0.81 - 0.55*1.24.
                let det = 1.76 * 0.81 - 0.55 * 1.24;
                let da = a - 0.24;
                ((0.81 * da - 0.55 * b) / det, (-1.24 * da + 1.76 * b) / det)
            }
        }
    }
}
