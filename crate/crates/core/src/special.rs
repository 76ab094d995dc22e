//! Branch-consistent complex special functions.
//!
//! The principal Lambert W function, a square root with a prescribed
//! real-axis slit, and the principal complex cube root.

use std::f64::consts::{E, PI};

use num_complex::Complex64;

use crate::error::{finite, Error, Result};

/// The scalar used throughout the crate.
pub type ComplexValue = Complex64;

/// Distance from a cut below which a point is treated as lying on it.
pub const CUT_TOL: f64 = 1e-12;

const INV_E: f64 = 1.0 / E;
const MAX_HALLEY: usize = 50;

/// A real-axis branch cut `[cut_left, cut_right]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSpec {
    cut_left: f64,
    cut_right: f64,
}

impl BranchSpec {
    pub fn new(cut_left: f64, cut_right: f64) -> Result<Self> {
        if !(cut_left.is_finite() && cut_right.is_finite()) || cut_left > cut_right {
            return Err(Error::BadConfig(format!(
                "branch cut [{cut_left}, {cut_right}] is not an ordered finite segment"
            )));
        }
        Ok(Self { cut_left, cut_right })
    }

    /// The symmetric cut `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64) -> Result<Self> {
        Self::new(-half_width, half_width)
    }

    pub fn cut_left(&self) -> f64 {
        self.cut_left
    }

    pub fn cut_right(&self) -> f64 {
        self.cut_right
    }

    /// True when `z` is strictly inside the open cut (within [`CUT_TOL`]).
    pub fn contains(&self, z: Complex64) -> bool {
        z.im.abs() <= CUT_TOL
            && z.re > self.cut_left + CUT_TOL
            && z.re < self.cut_right - CUT_TOL
    }
}

/// Truncated Taylor series of `W_0` about the origin (order 8).
fn taylor_guess(z: Complex64) -> Complex64 {
    // (-n)^(n-1) / n!
    const COEFFS: [f64; 8] = [
        1.0,
        -1.0,
        1.5,
        -8.0 / 3.0,
        125.0 / 24.0,
        -54.0 / 5.0,
        16807.0 / 720.0,
        -16384.0 / 315.0,
    ];
    let mut acc = Complex64::new(0.0, 0.0);
    for c in COEFFS.iter().rev() {
        acc = (acc + *c) * z;
    }
    acc
}

/// Expansion about the branch point in `p = sqrt(2(e z + 1))`.
fn branch_point_guess(z: Complex64) -> Complex64 {
    let p = (2.0 * (E * z + 1.0)).sqrt();
    -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))))
}

fn asymptotic_guess(z: Complex64) -> Complex64 {
    let l1 = z.ln();
    let l2 = l1.ln();
    l1 - l2 + l2 / l1
}

fn initial_guess(z: Complex64) -> Complex64 {
    if z.norm() < 0.3 {
        taylor_guess(z)
    } else if (z + INV_E).norm() < 0.3 {
        branch_point_guess(z)
    } else if z.re > -1.0 && z.re < 1.5 && z.im.abs() < 1.0 && -2.5 * z.im.abs() - 0.2 < z.re {
        // Pade approximant around the origin.
        z * (3.0 + 6.0 * z + z * z) / (3.0 + 9.0 * z + 5.0 * z * z)
    } else {
        asymptotic_guess(z)
    }
}

/// Principal branch `W_0` of the Lambert W function.
///
/// Returns `w` with `w e^w = z`, real for real `z >= -1/e`, and `w -> 0` as
/// `z -> 0`. Points on the open cut `(-inf, -1/e)` are rejected because the
/// side of approach is ambiguous.
pub fn lambert_w0(z: ComplexValue) -> Result<ComplexValue> {
    const OP: &str = "lambert_w0";
    finite(OP, z)?;
    if z.im.abs() <= CUT_TOL && z.re < -INV_E - CUT_TOL {
        return Err(Error::Cut { op: OP });
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(z);
    }
    let real_input = z.im == 0.0 && z.re >= -INV_E - CUT_TOL;
    if (z + INV_E).norm() <= f64::EPSILON * INV_E {
        return Ok(Complex64::new(-1.0, 0.0));
    }

    let scale = z.norm();
    let mut w = initial_guess(z);
    if real_input {
        w.im = 0.0;
    }
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_HALLEY {
        let ew = w.exp();
        let f = w * ew - z;
        residual = f.norm() / scale;
        if residual <= 1e-14 {
            break;
        }
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom.norm() == 0.0 {
            break;
        }
        let step = f / denom;
        w -= step;
        if real_input {
            w.im = 0.0;
        }
        if step.norm() <= 1e-16 * w.norm().max(1e-300) {
            let f = w * w.exp() - z;
            residual = f.norm() / scale;
            break;
        }
    }
    if !(residual <= 1e-12) || w.im.abs() > PI {
        return Err(Error::NonConvergence { op: OP, residual });
    }
    finite(OP, w)
}

/// Square root of `(z - cut_left)(z - cut_right)` with its cut on the segment.
///
/// Computed as the product of the principal roots of the two factors, so the
/// result behaves like `z` at infinity and is analytic off the segment.
pub fn sqrt_slit(z: ComplexValue, spec: BranchSpec) -> Result<ComplexValue> {
    const OP: &str = "sqrt_slit";
    finite(OP, z)?;
    if spec.contains(z) {
        return Err(Error::Cut { op: OP });
    }
    // Normalise a signed zero so both factors see the same side of the axis.
    let z = if z.im == 0.0 { Complex64::new(z.re, 0.0) } else { z };
    let s = (z - spec.cut_left).sqrt() * (z - spec.cut_right).sqrt();
    finite(OP, s)
}

/// Principal cube root, with argument in `(-pi/3, pi/3]`.
pub fn cbrt_principal(z: ComplexValue) -> ComplexValue {
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let mut theta = z.arg();
    if z.im == 0.0 && z.re < 0.0 {
        theta = PI;
    }
    Complex64::from_polar(r.cbrt(), theta / 3.0)
}

/// `exp(z) - 1` without cancellation for small `|z|`.
pub(crate) fn expm1(z: Complex64) -> Complex64 {
    let half = (0.5 * z.im).sin();
    let em1 = z.re.exp_m1();
    Complex64::new(em1 * z.im.cos() - 2.0 * half * half, z.re.exp() * z.im.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel_residual(z: Complex64) -> f64 {
        let w = lambert_w0(z).unwrap();
        (w * w.exp() - z).norm() / z.norm()
    }

    #[test]
    fn lambert_known_values() {
        assert_eq!(lambert_w0(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!((lambert_w0(c(E, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        assert!((lambert_w0(c(-INV_E, 0.0)).unwrap() + 1.0).norm() < 1e-7);
    }

    #[test]
    fn lambert_matches_fixed_point_oracle() {
        // w = z exp(-w) contracts for small z.
        let z = 0.1;
        let mut w = 0.0f64;
        for _ in 0..200 {
            w = z * (-w).exp();
        }
        let got = lambert_w0(c(z, 0.0)).unwrap();
        assert_eq!(got.im, 0.0);
        assert!((got.re - w).abs() < 1e-15);
        assert!((got.re - 0.091_276_527_160_862_26).abs() < 1e-15);
    }

    #[test]
    fn lambert_cut_is_rejected() {
        assert!(matches!(lambert_w0(c(-1.0, 0.0)), Err(Error::Cut { .. })));
        assert!(matches!(lambert_w0(c(-5.0, 1e-13)), Err(Error::Cut { .. })));
        // Just off the cut on either side: conjugate values.
        let up = lambert_w0(c(-1.0, 1e-9)).unwrap();
        let down = lambert_w0(c(-1.0, -1e-9)).unwrap();
        assert!((up - down.conj()).norm() < 1e-12);
        assert!(up.im > 0.0);
    }

    #[test]
    fn lambert_residual_in_each_initialisation_region() {
        for z in [
            c(0.2, 0.1),
            c(-0.3, 0.01),
            c(-0.36, 0.0),
            c(0.5, 0.5),
            c(-0.9, 0.3),
            c(30.0, -40.0),
            c(-1e3, 1.0),
            c(1e-9, 0.0),
        ] {
            assert!(rel_residual(z) <= 1e-12, "z = {z}");
        }
    }

    #[test]
    fn lambert_real_branch_is_monotone() {
        let mut prev = -1.0 - 1e-12;
        for k in 0..1000 {
            let x = -INV_E + (k as f64) * 0.01;
            let w = lambert_w0(c(x, 0.0)).unwrap();
            assert_eq!(w.im, 0.0);
            assert!(w.re > prev, "x = {x}");
            prev = w.re;
        }
    }

    #[test]
    fn sqrt_slit_examples() {
        let spec = BranchSpec::symmetric(4.0).unwrap();
        assert!((sqrt_slit(c(5.0, 0.0), spec).unwrap() - 3.0).norm() < 1e-15);
        assert!((sqrt_slit(c(-5.0, 0.0), spec).unwrap() + 3.0).norm() < 1e-15);
        assert!((sqrt_slit(c(-5.0, -0.0), spec).unwrap() + 3.0).norm() < 1e-15);
        let top = sqrt_slit(c(0.0, 1e-9), spec).unwrap();
        assert!((top - c(0.0, 4.0)).norm() < 1e-9);
        assert!(matches!(sqrt_slit(c(0.0, 1e-14), spec), Err(Error::Cut { .. })));
        assert!(matches!(sqrt_slit(c(1.0, 0.0), spec), Err(Error::Cut { .. })));
        // Endpoints are allowed.
        assert_eq!(sqrt_slit(c(4.0, 0.0), spec).unwrap().norm(), 0.0);
    }

    #[test]
    fn sqrt_slit_asymptotics() {
        let l = 2.0;
        let spec = BranchSpec::symmetric(l).unwrap();
        for k in 0..64 {
            let theta = PI * (k as f64 + 0.5) / 64.0;
            let z = Complex64::from_polar(10.0 * l, theta);
            let s = sqrt_slit(z, spec).unwrap();
            assert!((s * s - (z * z - l * l)).norm() <= 1e-12 * (z * z).norm());
            assert!((s - z).norm() / z.norm() < 0.05);
            assert!(s.im > 0.0);
        }
    }

    #[test]
    fn cube_root_branch() {
        assert!((cbrt_principal(c(8.0, 0.0)) - 2.0).norm() < 1e-15);
        let m8 = cbrt_principal(c(-8.0, 0.0));
        assert!((m8 - c(1.0, 3f64.sqrt())).norm() < 1e-15);
        let m8neg0 = cbrt_principal(c(-8.0, -0.0));
        assert!((m8neg0 - m8).norm() < 1e-15);
        let r = cbrt_principal(c(1.0, 1.0));
        assert!((r.norm() - 2f64.powf(1.0 / 6.0)).abs() < 1e-15);
        assert!((r.arg() - PI / 12.0).abs() < 1e-15);
    }

    #[test]
    fn expm1_small_arguments() {
        let z = c(1e-10, -2e-10);
        let e = expm1(z);
        assert!((e - z - z * z / 2.0).norm() < 1e-25);
        let big = c(0.7, 2.0);
        assert!((expm1(big) - (big.exp() - 1.0)).norm() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn lambert_inverts(re in -50.0f64..50.0, im in -50.0f64..50.0) {
                let z = c(re, im);
                prop_assume!(!(im.abs() <= 1e-10 && re < -INV_E));
                prop_assume!(z.norm() > 1e-8);
                let w = lambert_w0(z).unwrap();
                prop_assert!((w * w.exp() - z).norm() / z.norm() <= 1e-12);
                prop_assert!(w.im.abs() < PI);
            }

            #[test]
            fn cube_root_inverts(re in -1e3f64..1e3, im in -1e3f64..1e3) {
                let z = c(re, im);
                let r = cbrt_principal(z);
                prop_assert!((r * r * r - z).norm() <= 1e-12 * z.norm().max(1e-300));
                prop_assert!(r.arg() > -PI / 3.0 - 1e-15 && r.arg() <= PI / 3.0 + 1e-15);
            }
        }
    }
}
