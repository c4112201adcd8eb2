//! Closed-form solver for real cubic polynomials.
//!
//! Characteristic polynomials of the 3x3 Jacobians are solved directly
//! instead of through a general eigensolver: the fixed-size closed form is
//! deterministic and cheap enough for sweep inner loops. Roots are polished
//! with Newton steps so residuals land near machine precision.

use num_complex::Complex64;

/// Roots of `s^3 + c2*s^2 + c1*s + c0`, classified by spectrum shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CubicRoots {
    /// Three real roots, unordered.
    ThreeReal([f64; 3]),
    /// One real root plus a complex-conjugate pair `re ± i*im`, `im > 0`.
    OneRealPair { real: f64, re: f64, im: f64 },
}

impl CubicRoots {
    /// All three roots as complex numbers.
    pub fn as_complex(&self) -> [Complex64; 3] {
        match *self {
            CubicRoots::ThreeReal([a, b, c]) => [
                Complex64::new(a, 0.0),
                Complex64::new(b, 0.0),
                Complex64::new(c, 0.0),
            ],
            CubicRoots::OneRealPair { real, re, im } => [
                Complex64::new(real, 0.0),
                Complex64::new(re, im),
                Complex64::new(re, -im),
            ],
        }
    }

    /// Real roots only.
    pub fn real_roots(&self) -> Vec<f64> {
        match *self {
            CubicRoots::ThreeReal(r) => r.to_vec(),
            CubicRoots::OneRealPair { real, .. } => vec![real],
        }
    }
}

fn eval(c2: f64, c1: f64, c0: f64, s: f64) -> f64 {
    ((s + c2) * s + c1) * s + c0
}

fn eval_deriv(c2: f64, c1: f64, s: f64) -> f64 {
    (3.0 * s + 2.0 * c2) * s + c1
}

/// A few Newton iterations from a good closed-form start; the cubic is
/// well-conditioned away from multiple roots and Newton stalls harmlessly
/// at them, so no safeguarding is needed.
fn polish_real(c2: f64, c1: f64, c0: f64, mut s: f64) -> f64 {
    for _ in 0..4 {
        let f = eval(c2, c1, c0, s);
        let d = eval_deriv(c2, c1, s);
        if d == 0.0 {
            break;
        }
        let step = f / d;
        if !step.is_finite() {
            break;
        }
        s -= step;
        if step.abs() <= 1e-16 * s.abs().max(1.0) {
            break;
        }
    }
    s
}

fn polish_complex(c2: f64, c1: f64, c0: f64, mut z: Complex64) -> Complex64 {
    for _ in 0..4 {
        let f = ((z + c2) * z + c1) * z + c0;
        let d = (z * 3.0 + 2.0 * c2) * z + c1;
        if d.norm_sqr() == 0.0 {
            break;
        }
        let step = f / d;
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Solves `s^3 + c2*s^2 + c1*s + c0 = 0` over the reals.
///
/// Coefficients must be finite. Residuals `|p(root)|` are at machine-epsilon
/// scale relative to the coefficient magnitudes.
pub fn solve_cubic(c2: f64, c1: f64, c0: f64) -> CubicRoots {
    // Depress: s = t - c2/3 turns the cubic into t^3 + p*t + q.
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = c0 - c1 * shift + 2.0 * shift * shift * shift;

    let disc = -4.0 * p * p * p - 27.0 * q * q;
    if disc > 0.0 {
        // Three distinct real roots: trigonometric form (p < 0 guaranteed).
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let mut roots = [0.0f64; 3];
        for (k, r) in roots.iter_mut().enumerate() {
            let t = m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
            *r = polish_real(c2, c1, c0, t - shift);
        }
        CubicRoots::ThreeReal(roots)
    } else {
        // One real root: Cardano, with the sign trick to avoid cancellation.
        let real = if p == 0.0 && q == 0.0 {
            -shift
        } else {
            let half_q = q / 2.0;
            let rad = (half_q * half_q + p * p * p / 27.0).max(0.0).sqrt();
            let u = if half_q >= 0.0 { -half_q - rad } else { -half_q + rad };
            let u = u.cbrt();
            let t = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
            polish_real(c2, c1, c0, t - shift)
        };

        // Deflate to the quadratic s^2 + beta*s + gamma for the pair.
        let beta = c2 + real;
        let gamma = c1 + real * beta;
        let quad_disc = beta * beta - 4.0 * gamma;
        if quad_disc >= 0.0 {
            // Discriminant said "one real" but deflation disagrees: the root
            // is (numerically) multiple. Report all-real.
            let rd = quad_disc.sqrt();
            let r1 = polish_real(c2, c1, c0, (-beta + rd) / 2.0);
            let r2 = polish_real(c2, c1, c0, (-beta - rd) / 2.0);
            CubicRoots::ThreeReal([real, r1, r2])
        } else {
            let z = polish_complex(
                c2,
                c1,
                c0,
                Complex64::new(-beta / 2.0, (-quad_disc).sqrt() / 2.0),
            );
            CubicRoots::OneRealPair {
                real,
                re: z.re,
                im: z.im.abs(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(c2: f64, c1: f64, c0: f64, z: Complex64) -> f64 {
        (((z + c2) * z + c1) * z + c0).norm()
    }

    #[test]
    fn known_real_roots() {
        // (s-1)(s-2)(s-3) = s^3 - 6s^2 + 11s - 6
        let r = solve_cubic(-6.0, 11.0, -6.0);
        let mut roots = r.real_roots();
        roots.sort_by(f64::total_cmp);
        assert_eq!(roots.len(), 3);
        for (got, want) in roots.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn known_complex_pair() {
        // (s-2)(s^2+2s+5): pair -1 ± 2i
        let r = solve_cubic(0.0, 1.0, -10.0);
        match r {
            CubicRoots::OneRealPair { real, re, im } => {
                assert!((real - 2.0).abs() < 1e-12);
                assert!((re + 1.0).abs() < 1e-12);
                assert!((im - 2.0).abs() < 1e-12);
            }
            other => panic!("expected pair, got {other:?}"),
        }
    }

    #[test]
    fn triple_root() {
        // (s+1)^3 = s^3 + 3s^2 + 3s + 1
        let r = solve_cubic(3.0, 3.0, 1.0);
        for root in r.as_complex() {
            assert!((root + 1.0).norm() < 1e-4, "multiple-root accuracy");
            assert!(residual(3.0, 3.0, 1.0, root) < 1e-12);
        }
    }

    #[test]
    fn residuals_over_random_coefficients() {
        // Deterministic LCG so the sweep is reproducible.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 40.0
        };
        for _ in 0..2000 {
            let (c2, c1, c0) = (next(), next(), next());
            let scale = 1.0 + c2.abs() + c1.abs() + c0.abs();
            for z in solve_cubic(c2, c1, c0).as_complex() {
                assert!(
                    residual(c2, c1, c0, z) < 1e-10 * scale,
                    "residual too large at ({c2},{c1},{c0})"
                );
            }
        }
    }
}
