//! Adaptive Dormand–Prince 5(4) integrator for a single complex unknown.
//!
//! The right-hand side may return [`Error::Caustic`] to ask for a smaller
//! step; any other error aborts the integration.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Fifth-order weights are the last row of A; these are the error weights
// (fifth minus fourth order).
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate `dy/dt = f(t, y)` from `t0` to `t1` (either direction).
pub fn integrate<F>(op: &'static str, mut f: F, t0: f64, t1: f64, y0: Complex64, tol: Tolerances) -> Result<Complex64>
where
    F: FnMut(f64, Complex64) -> Result<Complex64>,
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let min_step = 1e-14 * span.abs().max(1e-300);
    let mut t = t0;
    let mut y = y0;
    let mut h = span.abs() / 64.0;
    let mut k = [Complex64::new(0.0, 0.0); 7];
    let mut k1_valid = false;

    let mut iterations = 0usize;
    while (t1 - t) * dir > 0.0 {
        iterations += 1;
        if iterations > 200_000 {
            return Err(Error::NonConvergence { op, residual: h });
        }
        if h < min_step {
            return Err(Error::NonConvergence { op, residual: h });
        }
        let remaining = (t1 - t).abs();
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        let hs = dir * step;

        if !k1_valid {
            match f(t, y) {
                Ok(v) => k[0] = v,
                Err(Error::Caustic { .. }) => return Err(Error::SingularityHit { op }),
                Err(e) => return Err(e),
            }
            k1_valid = true;
        }

        let mut rejected = false;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys += hs * A[s][j] * kj;
            }
            match f(t + C[s] * hs, ys) {
                Ok(v) if v.re.is_finite() && v.im.is_finite() => k[s] = v,
                Ok(_) | Err(Error::Caustic { .. }) => {
                    rejected = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if rejected {
            h = 0.25 * step;
            continue;
        }

        let mut y_new = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            y_new += hs * A[6][j] * kj;
        }
        let mut err = Complex64::new(0.0, 0.0);
        for (j, kj) in k.iter().enumerate() {
            err += hs * E[j] * kj;
        }
        let scale = tol.atol + tol.rtol * y.norm().max(y_new.norm());
        let ratio = err.norm() / scale;
        if ratio <= 1.0 {
            t = if last { t1 } else { t + hs };
            y = y_new;
            // FSAL: the seventh stage is the first stage of the next step.
            k[0] = k[6];
            let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            h = step * factor;
        } else {
            h = step * (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    Ok(y)
}
