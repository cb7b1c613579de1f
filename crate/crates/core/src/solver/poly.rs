//! Polynomial root finding: Aberth–Ehrlich simultaneous iteration followed
//! by a Newton polish of each root.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("leading coefficient must be nonzero")]
    DegenerateLeading,
    #[error("polynomial must have degree >= 1")]
    DegenerateDegree,
    #[error("root iteration failed to converge")]
    NoConvergence,
}

fn eval(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    // Horner evaluation of p and p'
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of `Σ coeffs[i] x^(d−i)` (leading coefficient first).
///
/// Roots are refined until the Newton correction is below `1e-14` relative
/// to the root magnitude, then sorted by (re, im).
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>, PolyError> {
    if coeffs.len() < 2 {
        return Err(PolyError::DegenerateDegree);
    }
    if coeffs[0] == 0.0 {
        return Err(PolyError::DegenerateLeading);
    }
    let degree = coeffs.len() - 1;

    // Initial guesses on a circle near the geometric mean of the root
    // magnitudes, capped by the Cauchy bound, rotated off the real axis.
    let cauchy = 1.0
        + coeffs[1..]
            .iter()
            .map(|c| (c / coeffs[0]).abs())
            .fold(0.0f64, f64::max);
    let tail = coeffs.iter().rev().find(|c| **c != 0.0).unwrap();
    let geo = (tail / coeffs[0]).abs().powf(1.0 / degree as f64);
    let radius = geo.clamp(0.5, cauchy);
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / degree as f64 + 0.4;
            radius * Complex64::new(angle.cos(), angle.sin())
        })
        .collect();

    let mut converged = false;
    let mut best_shift = f64::MAX;
    for _ in 0..400 {
        let mut max_shift = 0.0f64;
        for k in 0..degree {
            let (p, dp) = eval(coeffs, roots[k]);
            let newton = if dp.norm() > 0.0 { p / dp } else { p };
            let mut repulsion = Complex64::new(0.0, 0.0);
            for j in 0..degree {
                if j != k {
                    repulsion += 1.0 / (roots[k] - roots[j]);
                }
            }
            let denom = 1.0 - newton * repulsion;
            let shift = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            roots[k] -= shift;
            max_shift = max_shift.max(shift.norm() / roots[k].norm().max(1.0));
        }
        best_shift = best_shift.min(max_shift);
        if max_shift < 1e-13 {
            converged = true;
            break;
        }
    }
    // conditioning can keep the simultaneous iteration oscillating at the
    // noise floor; the per-root polish below still tightens each root
    if !converged && best_shift > 1e-6 {
        return Err(PolyError::NoConvergence);
    }

    // Newton polish per root, then snap conjugate artifacts onto the axis.
    for r in roots.iter_mut() {
        for _ in 0..8 {
            let (p, dp) = eval(coeffs, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            *r -= step;
            if step.norm() <= 1e-15 * r.norm().max(1.0) {
                break;
            }
        }
        if r.im.abs() < 1e-12 * r.norm().max(1.0) {
            let real_only = Complex64::new(r.re, 0.0);
            let (p_real, _) = eval(coeffs, real_only);
            let (p_cur, _) = eval(coeffs, *r);
            if p_real.norm() <= p_cur.norm() * 4.0 {
                *r = real_only;
            }
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The fixed degree-5 polynomial whose roots generate every physical
    /// singular solution of the N=12, ℓ=5 sector.
    pub const N12_ELL5_QUINTIC: [f64; 6] = [5120.0, 11520.0, -4992.0, -9312.0, 2020.0, -55.0];

    #[test]
    fn simple_quadratic() {
        let r = polynomial_roots(&[1.0, 0.0, -1.0]).unwrap();
        assert!((r[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn quintic_root_signs_and_value() {
        let r = polynomial_roots(&N12_ELL5_QUINTIC).unwrap();
        assert_eq!(r.len(), 5);
        assert!(r.iter().all(|z| z.im == 0.0));
        let neg = r.iter().filter(|z| z.re < 0.0).count();
        let pos = r.iter().filter(|z| z.re > 0.0).count();
        assert_eq!((neg, pos), (2, 3));
        let smallest_pos = r.iter().filter(|z| z.re > 0.0).map(|z| z.re).fold(f64::MAX, f64::min);
        assert!((smallest_pos.sqrt() - 0.178978221719006).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(polynomial_roots(&[3.0]), Err(PolyError::DegenerateDegree));
        assert_eq!(
            polynomial_roots(&[0.0, 1.0, 2.0]),
            Err(PolyError::DegenerateLeading)
        );
    }

    #[test]
    fn wilkinson_like_stability() {
        // (x-1)(x-2)...(x-6) expanded; f64 evaluation noise bounds the
        // attainable accuracy near the clustered large roots
        let coeffs = [1.0, -21.0, 175.0, -735.0, 1624.0, -1764.0, 720.0];
        let r = polynomial_roots(&coeffs).unwrap();
        for (k, root) in r.iter().enumerate() {
            assert!((root - Complex64::new(k as f64 + 1.0, 0.0)).norm() < 1e-7);
        }
    }
}
