//! Closed forms for a single source `μ_0 = δ_0`.
//!
//! `M_t(z) = 4 / (z + √(z² - 16t))`, `g_t(z) = 2i√t (W^{-1/2} - W^{1/2})` with
//! `W = W_0(-4t/z²)`, the semicircle law of radius `4√t`, and the universal
//! hull `K_t = √t 𝒦`.

use std::f64::consts::{E, PI};

use num_complex::Complex64;

use crate::error::{finite, Error, Result};
use crate::special::{lambert_w0, sqrt_slit, BranchSpec, ComplexValue, CUT_TOL};

/// An ordered sample of a hull boundary curve together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct HullBoundary {
    pub params: Vec<f64>,
    pub points: Vec<ComplexValue>,
    pub time: f64,
}

impl HullBoundary {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest imaginary part and the sample attaining it.
    pub fn apex(&self) -> Option<ComplexValue> {
        self.points
            .iter()
            .copied()
            .max_by(|a, b| a.im.total_cmp(&b.im))
    }

    /// Smallest and largest real part.
    pub fn footprint(&self) -> (f64, f64) {
        self.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.re), hi.max(p.re))
        })
    }

    /// The curve multiplied by `c`.
    pub fn scaled(&self, c: f64) -> HullBoundary {
        HullBoundary {
            params: self.params.clone(),
            points: self.points.iter().map(|p| p * c).collect(),
            time: self.time,
        }
    }

    /// Whether `z` lies in the region enclosed by the curve and the real axis.
    ///
    /// The polygon is closed along the real axis between the curve's
    /// endpoints; points are tested by ray casting.
    pub fn encloses(&self, z: ComplexValue) -> bool {
        let n = self.points.len();
        if n < 2 || z.im < 0.0 {
            return false;
        }
        let mut inside = false;
        for i in 0..n {
            let a = self.points[i];
            let b = self.points[(i + 1) % n];
            if (a.im > z.im) != (b.im > z.im) {
                let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
                if z.re < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

/// `M_t(z) = 4 / (z + √(z² - 16t))`, with the root slit along `[-4√t, 4√t]`.
pub fn m_single(t: f64, z: ComplexValue) -> Result<ComplexValue> {
    const OP: &str = "m_single";
    check_time(OP, t)?;
    finite(OP, z)?;
    if t == 0.0 {
        if z.norm() <= 1e-14 {
            return Err(Error::Pole { op: OP });
        }
        return finite(OP, 2.0 / z);
    }
    let r = 4.0 * t.sqrt();
    let s = sqrt_slit(z, BranchSpec::symmetric(r)?)?;
    finite(OP, 4.0 / (z + s))
}

/// `h_t(z) = 2i√t / √W_0(-4t/z²)`, the preimage variable of the Loewner map.
pub fn h_single(t: f64, z: ComplexValue) -> Result<ComplexValue> {
    const OP: &str = "h_single";
    check_time(OP, t)?;
    finite(OP, z)?;
    if z.im < -CUT_TOL {
        return Err(Error::BadConfig(format!("{OP}: z = {z} is below the real axis")));
    }
    if t == 0.0 {
        return Ok(z);
    }
    let edge = 2.0 * (t * E).sqrt();
    if z.im.abs() <= CUT_TOL && z.re.abs() <= edge {
        return Err(Error::HullInterior { op: OP });
    }
    let w = lambert_w0(-4.0 * t / (z * z)).map_err(|e| match e {
        Error::Cut { .. } => Error::HullInterior { op: OP },
        other => other,
    })?;
    let mut h = 2.0 * Complex64::i() * t.sqrt() / w.sqrt();
    // Fix the sign by continuity with h_0(z) = z: h stays in the upper half
    // plane, and on the real axis keeps the side of z.
    let flip = if h.im.abs() > 1e-12 * h.norm() {
        h.im < 0.0
    } else {
        h.re * z.re < 0.0
    };
    if flip {
        h = -h;
    }
    if z.im.abs() <= CUT_TOL {
        h.im = 0.0;
    }
    finite(OP, h)
}

/// `g_t(z) = 2i√t { 1/√W - √W }` with `W = W_0(-4t/z²)`.
pub fn g_single(t: f64, z: ComplexValue) -> Result<ComplexValue> {
    const OP: &str = "g_single";
    if t == 0.0 {
        check_time(OP, t)?;
        return finite(OP, z);
    }
    let h = h_single(t, z).map_err(|e| match e {
        Error::HullInterior { .. } => Error::HullInterior { op: OP },
        other => other,
    })?;
    let g = finite(OP, h + 4.0 * t / h)?;
    if g.im < -1e-12 * (1.0 + g.norm()) {
        return Err(Error::HullInterior { op: OP });
    }
    Ok(g)
}

/// Semicircle density `√(16t - u²) / (8πt)` on `|u| < 4√t`.
pub fn semicircle_density(t: f64, u: f64) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    let r2 = 16.0 * t;
    if u * u >= r2 {
        0.0
    } else {
        (r2 - u * u).sqrt() / (8.0 * PI * t)
    }
}

/// Distribution function of the semicircle law of radius `4√t`.
pub fn semicircle_cdf(t: f64, u: f64) -> f64 {
    if !(t > 0.0) {
        return if u >= 0.0 { 1.0 } else { 0.0 };
    }
    let x = (u / (4.0 * t.sqrt())).clamp(-1.0, 1.0);
    0.5 + (x * (1.0 - x * x).sqrt() + x.asin()) / PI
}

/// The point `2i√t exp(-iφ - e^{2iφ}/2)` of `∂K_t`, `φ ∈ [-π/2, π/2]`.
pub fn hull_point_single(t: f64, phi: f64) -> ComplexValue {
    let e2 = Complex64::from_polar(1.0, 2.0 * phi);
    let p = 2.0 * Complex64::i() * t.sqrt() * (Complex64::new(0.0, -phi) - 0.5 * e2).exp();
    Complex64::new(p.re, p.im.max(0.0))
}

/// The support point `4√t sin φ` that `g_t` assigns to [`hull_point_single`].
pub fn support_point_single(t: f64, phi: f64) -> f64 {
    4.0 * t.sqrt() * phi.sin()
}

/// Uniform-φ sample of `∂K_t` from `-π/2` to `π/2`.
///
/// At `t = 0` the hull is the single point `0`.
pub fn hull_boundary_single(t: f64, n_samples: usize) -> Result<HullBoundary> {
    check_time("hull_boundary_single", t)?;
    if n_samples < 3 {
        return Err(Error::BadConfig(format!("hull_boundary_single: n_samples = {n_samples} must be at least 3")));
    }
    if t == 0.0 {
        return Ok(HullBoundary {
            params: vec![0.0],
            points: vec![Complex64::new(0.0, 0.0)],
            time: 0.0,
        });
    }
    let params: Vec<f64> = (0..n_samples)
        .map(|k| -0.5 * PI + PI * k as f64 / (n_samples - 1) as f64)
        .collect();
    let mut points: Vec<ComplexValue> = params.iter().map(|&phi| hull_point_single(t, phi)).collect();
    // The endpoints sit on the real axis.
    let edge = 2.0 * (t * E).sqrt();
    points[0] = Complex64::new(-edge, 0.0);
    points[n_samples - 1] = Complex64::new(edge, 0.0);
    Ok(HullBoundary {
        params,
        points,
        time: t,
    })
}

/// Height `(√2/3)(te)^{-1/4}(2√(te) - |x|)^{3/2}` of `∂K_t` near a foot.
///
/// Valid within `0.1√t` inside either edge `±2√(te)`.
pub fn edge_profile_single(t: f64, x: f64) -> Result<f64> {
    const OP: &str = "edge_profile_single";
    if !(t > 0.0 && t.is_finite() && x.is_finite()) {
        return Err(Error::BadConfig(format!("{OP}: t must be positive and x finite")));
    }
    let te = t * E;
    let d = 2.0 * te.sqrt() - x.abs();
    if d < 0.0 || d > 0.1 * t.sqrt() {
        return Err(Error::OutOfRange { op: OP });
    }
    Ok(2f64.sqrt() / 3.0 * te.powf(-0.25) * d.powf(1.5))
}

fn check_time(op: &'static str, t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::BadConfig(format!("{op}: time t = {t} must be finite and non-negative")))
    }
}
