//! Browser bindings: hull boundaries and densities as flat `Float64Array`s.
//!
//! Curves come back as interleaved `[re0, im0, re1, im1, ...]`; separate
//! curves are split by a `NaN, NaN` pair.

use wasm_bindgen::prelude::*;

use slehydro::burgers::{self, AtomicMeasure};
use slehydro::single_source::hull_boundary_single;
use slehydro::two_source::{hull_boundary_two, TwoSourceConfig};
use slehydro::HullBoundary;

fn flatten(curves: &[&HullBoundary]) -> Vec<f64> {
    let mut out = Vec::new();
    for (k, c) in curves.iter().enumerate() {
        if k > 0 {
            out.extend([f64::NAN, f64::NAN]);
        }
        for p in &c.points {
            out.extend([p.re, p.im]);
        }
    }
    out
}

fn js_err(e: slehydro::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Boundary of the single-source hull at time `t`.
#[wasm_bindgen]
pub fn hull_single(t: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    let c = hull_boundary_single(t, samples).map_err(js_err)?;
    Ok(flatten(&[&c]))
}

/// Boundary of the hull grown from sources at `±a`.
#[wasm_bindgen]
pub fn hull_two(a: f64, t: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    let cfg = TwoSourceConfig::new(a, t).map_err(js_err)?;
    let hull = hull_boundary_two(cfg, samples).map_err(js_err)?;
    Ok(flatten(&hull.curves()))
}

/// Density at time `t` as interleaved `[u0, rho0, u1, rho1, ...]`.
/// `a = 0` means a single source at the origin.
#[wasm_bindgen]
pub fn density_profile(a: f64, t: f64, points: usize) -> Result<Vec<f64>, JsError> {
    let mu = if a == 0.0 {
        AtomicMeasure::dirac(0.0)
    } else {
        AtomicMeasure::symmetric_pair(a).map_err(js_err)?
    };
    let grid = burgers::support_grid(&mu, t, points);
    let prof = burgers::density(&mu, t, &grid).map_err(js_err)?;
    Ok(prof.grid.iter().zip(&prof.density).flat_map(|(u, r)| [*u, *r]).collect())
}
