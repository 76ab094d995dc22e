//! Two symmetric sources `μ_0 = (δ_a + δ_{-a}) / 2`.
//!
//! With `a = 1` the inverse of `h_t` is
//! `V_t(z) = √(1 + (z² - 1) exp(4t z² / (z² - 1)²))`, the Loewner map is
//! `g_t(z) = h + 4t h / (h² - 1)` with `h = V_t^{-1}(z)`, and the support of
//! `μ_t` is `±[b_-, b_+]`, merging at `t_c = 1/4`. General `a` follows from
//! diffusive scaling `t -> t/a²`, `z -> z/a`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{finite, Error, Result};
use crate::poly::real_cubic_roots;
use crate::single_source::HullBoundary;
use crate::special::{cbrt_principal, expm1, ComplexValue, CUT_TOL};

/// Half-separation `a` and time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSourceConfig {
    a: f64,
    t: f64,
}

impl TwoSourceConfig {
    pub fn new(a: f64, t: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::BadConfig(format!("half-separation a = {a} must be positive")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::BadConfig(format!("time t = {t} must be non-negative")));
        }
        Ok(Self { a, t })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Merge time `a² / 4`.
    pub fn critical_time(&self) -> f64 {
        0.25 * self.a * self.a
    }

    /// Time in the unit-`a` system.
    pub fn reduced_time(&self) -> f64 {
        self.t / (self.a * self.a)
    }

    pub fn phase(&self) -> Phase {
        if self.t < self.critical_time() {
            Phase::PreCritical
        } else {
            Phase::PostCritical
        }
    }

    pub fn support(&self) -> SupportSpec {
        let (bm, bp) = b_pm(self.reduced_time());
        let (bm, bp) = (self.a * bm, self.a * bp);
        let phase = self.phase();
        let intervals = match phase {
            Phase::PreCritical => vec![(-bp, -bm), (bm, bp)],
            Phase::PostCritical => vec![(-bp, bp)],
        };
        SupportSpec { phase, intervals }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    PreCritical,
    PostCritical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportSpec {
    pub phase: Phase,
    pub intervals: Vec<(f64, f64)>,
}

/// Support edges `(b_-, b_+)` for `a = 1`; `b_- = 0` once `t > 1/4`.
///
/// `b_-` uses the rationalized form `(1 - 4t)^{3/2} / b_+`, which is stable as
/// `t -> 1/4`.
pub fn b_pm(t: f64) -> (f64, f64) {
    let t = t.max(0.0);
    let root = (t * (t + 2.0)).sqrt();
    let bp = (1.0 + 10.0 * t - 2.0 * t * t + 2.0 * (2.0 + t) * root).sqrt();
    let bm = if t <= 0.25 { (1.0 - 4.0 * t).max(0.0).powf(1.5) / bp } else { 0.0 };
    (bm, bp)
}

/// Critical osculation abscissa `x_c = √(1 + 2e^{3/4})` for `a = 1`.
pub fn critical_abscissa() -> f64 {
    (1.0 + 2.0 * 0.75f64.exp()).sqrt()
}

fn v_radicand(t: f64, z: Complex64) -> Complex64 {
    let q = z * z - 1.0;
    z * z + q * expm1(4.0 * t * z * z / (q * q))
}

/// `V_t(z)` for `a = 1`, the square root continued from `V_0(z) = z`.
///
/// The radicand is followed along a time ladder from `0` to `t`, halving the
/// rung whenever its argument turns by more than half a radian, and the sign
/// of the root is kept continuous along the way.
pub fn v_map(t: f64, z: ComplexValue) -> Result<ComplexValue> {
    const OP: &str = "v_map";
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::BadConfig(format!("{OP}: time t = {t} must be non-negative")));
    }
    finite(OP, z)?;
    if (z - 1.0).norm() <= 1e-14 || (z + 1.0).norm() <= 1e-14 {
        return Err(Error::Pole { op: OP });
    }
    if t == 0.0 {
        return Ok(z);
    }
    let mut v = z;
    let mut r_prev = z * z;
    let mut tau = 0.0;
    let mut step = t / 16.0;
    let mut halvings = 0;
    while tau < t {
        let next = (tau + step).min(t);
        let r = v_radicand(next, z);
        finite(OP, r)?;
        let turn = if r_prev.norm() > 0.0 && r.norm() > 0.0 { (r / r_prev).arg().abs() } else { 0.0 };
        if turn > 0.5 && halvings < 60 {
            step *= 0.5;
            halvings += 1;
            continue;
        }
        let s = r.sqrt();
        v = if (s - v).norm() <= (s + v).norm() { s } else { -s };
        r_prev = r;
        tau = next;
        if turn < 0.1 {
            step *= 2.0;
        }
    }
    finite(OP, v)
}

/// Newton iteration on `1 + (z² - 1) e^{4τz²/(z²-1)²} - w² = 0`.
fn v_newton(tau: f64, w2: Complex64, mut z: Complex64) -> Option<Complex64> {
    let scale = 1.0 + w2.norm();
    for _ in 0..80 {
        let q = z * z - 1.0;
        if q.norm() < 1e-12 {
            return None;
        }
        let e = (4.0 * tau * z * z / (q * q)).exp();
        let g = 1.0 + q * e - w2;
        let dg = e * (2.0 * z - 8.0 * tau * z * (z * z + 1.0) / (q * q));
        if g.norm() <= 1e-15 * scale {
            return Some(z);
        }
        let step = g / dg;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        z -= step;
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    let q = z * z - 1.0;
    let g = 1.0 + q * (4.0 * tau * z * z / (q * q)).exp() - w2;
    (g.norm() <= 1e-12 * scale).then_some(z)
}

fn v_continuation(t: f64, w: Complex64, rungs: usize) -> Option<Complex64> {
    let w2 = w * w;
    let mut z = w;
    for k in 1..=rungs {
        let s = k as f64 / rungs as f64;
        z = v_newton(t * s * s, w2, z)?;
    }
    Some(z)
}

/// `V_t^{-1}(w)` for `a = 1`: Newton continued in time from `z = w` at `t = 0`.
pub fn v_inverse(t: f64, w: ComplexValue) -> Result<ComplexValue> {
    const OP: &str = "v_inverse";
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::BadConfig(format!("{OP}: time t = {t} must be non-negative")));
    }
    finite(OP, w)?;
    if t == 0.0 {
        return Ok(w);
    }
    let mut rungs = 32;
    let mut last = None;
    for _ in 0..=3 {
        if let Some(z) = v_continuation(t, w, rungs) {
            if w.im >= 0.0 && z.im < -1e-9 * (1.0 + z.norm()) {
                last = Some(Error::BranchAmbiguity { op: OP });
            } else {
                let z = if z.im.abs() <= CUT_TOL * (1.0 + z.norm()) && w.im == 0.0 { Complex64::new(z.re, 0.0) } else { z };
                let back = v_map(t, z)?;
                let residual = (back - w).norm();
                if residual <= 1e-10 * (1.0 + w.norm()) {
                    return finite(OP, z);
                }
                last = Some(if (back + w).norm() <= 1e-10 * (1.0 + w.norm()) {
                    Error::BranchAmbiguity { op: OP }
                } else {
                    Error::ResidualTooLarge { op: OP, residual }
                });
            }
        }
        rungs *= 2;
    }
    // Near the origin at the merge time the ladder degenerates (the root runs
    // off like w / √(1 - 4t)); seed Newton from the local expansions instead.
    let w2 = w * w;
    let mut seeds = vec![(w2 / -1.5).powf(0.25)];
    if t < 0.25 {
        seeds.push(w / (1.0 - 4.0 * t).sqrt());
    }
    for seed in seeds {
        for k in 0..4 {
            let start = seed * Complex64::i().powi(k);
            let Some(z) = v_newton(t, w2, start) else { continue };
            if w.im >= 0.0 && z.im < -1e-9 * (1.0 + z.norm()) {
                continue;
            }
            if let Ok(back) = v_map(t, z) {
                if (back - w).norm() <= 1e-10 * (1.0 + w.norm()) {
                    return finite(OP, z);
                }
            }
        }
    }
    Err(last.unwrap_or(Error::NonConvergence { op: OP, residual: f64::INFINITY }))
}

/// The Loewner map `g_t(z) = a { h + 4τ h / (h² - 1) }`, `h = V_τ^{-1}(z/a)`, `τ = t/a²`.
pub fn g_two(cfg: TwoSourceConfig, z: ComplexValue) -> Result<ComplexValue> {
    const OP: &str = "g_two";
    finite(OP, z)?;
    if z.im < -CUT_TOL {
        return Err(Error::BadConfig(format!("{OP}: z = {z} is below the real axis")));
    }
    if cfg.t == 0.0 {
        return Ok(z);
    }
    let tau = cfg.reduced_time();
    let h = h_two(cfg, z)? / cfg.a;
    let q = h * h - 1.0;
    if q.norm() < 1e-14 {
        return Err(Error::HullInterior { op: OP });
    }
    let g = finite(OP, cfg.a * (h + 4.0 * tau * h / q))?;
    // Inside the hull the formula continues to values below the axis.
    if g.im < -1e-12 * (1.0 + g.norm()) {
        return Err(Error::HullInterior { op: OP });
    }
    Ok(g)
}

/// `h_t(z) = a V_{t/a²}^{-1}(z/a)`.
pub fn h_two(cfg: TwoSourceConfig, z: ComplexValue) -> Result<ComplexValue> {
    const OP: &str = "h_two";
    if cfg.t == 0.0 {
        return Ok(z);
    }
    let h = v_inverse(cfg.reduced_time(), z / cfg.a).map_err(|e| match e {
        Error::BranchAmbiguity { .. } | Error::ResidualTooLarge { .. } => Error::HullInterior { op: OP },
        other => other,
    })?;
    if h.im < -1e-9 {
        return Err(Error::HullInterior { op: OP });
    }
    Ok(cfg.a * h)
}

/// Residuals of the boundary system at `(v, w)`:
/// `v³ - σv² - (3w² - (4t - 1))v + σ(w² + 1)` and `w² - (3v² - 2σv + 4t - 1)`.
pub fn boundary_residuals(sigma: f64, t: f64, v: f64, w: f64) -> (f64, f64) {
    let w2 = w * w;
    let first = v * v * v - sigma * v * v - (3.0 * w2 - (4.0 * t - 1.0)) * v + sigma * (w2 + 1.0);
    let second = w2 - (3.0 * v * v - 2.0 * sigma * v + 4.0 * t - 1.0);
    (first, second)
}

/// Solution `(v, w)`, `w ≥ 0`, of the boundary system for support point `σ`
/// (unit `a`).
///
/// Eliminating `w² = 3v² - 2σv + 4t - 1` leaves the cubic
/// `8v³ - 8σv² + (2σ² + 8t - 2)v - 4tσ = 0`; the root giving a nonnegative `w²`
/// is selected.
pub fn boundary_cubic(sigma: f64, t: f64) -> Result<(f64, f64)> {
    const OP: &str = "boundary_cubic";
    if !(t > 0.0 && t.is_finite() && sigma.is_finite()) {
        return Err(Error::BadConfig(format!("{OP}: need t > 0 and finite sigma")));
    }
    let roots = real_cubic_roots(8.0, -8.0 * sigma, 2.0 * sigma * sigma + 8.0 * t - 2.0, -4.0 * t * sigma, 1e-7)?;
    let scale = 1.0 + sigma * sigma + t;
    let (v, w2) = roots
        .into_iter()
        .map(|v| (v, 3.0 * v * v - 2.0 * sigma * v + 4.0 * t - 1.0))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::NoPhysicalRoot { op: OP })?;
    if w2 < -1e-9 * scale {
        return Err(Error::NoPhysicalRoot { op: OP });
    }
    let w = w2.max(0.0).sqrt();
    let (r1, _) = boundary_residuals(sigma, t, v, w);
    if r1.abs() > 1e-9 * scale {
        return Err(Error::ResidualTooLarge { op: OP, residual: r1.abs() });
    }
    Ok((v, w))
}

/// Cardano candidates for `v`: `v = -((S - σ)² - 3(4t - 1)) / (6S)` with
/// `S³ = σ³ - 9σ(2t + 1) - 3√3 √Δ`,
/// `Δ = -σ⁴ - 2σ²(2t² - 10t - 1) + (4t - 1)³`, over the three cube roots.
///
/// Kept as an independent check on [`boundary_cubic`].
pub fn boundary_closed_form(sigma: f64, t: f64) -> Vec<ComplexValue> {
    let delta = -sigma.powi(4) - 2.0 * sigma * sigma * (2.0 * t * t - 10.0 * t - 1.0) + (4.0 * t - 1.0).powi(3);
    let base = sigma.powi(3) - 9.0 * sigma * (2.0 * t + 1.0);
    let root = 3.0 * 3f64.sqrt() * Complex64::new(delta, 0.0).sqrt();
    // Pick the sign that avoids cancellation.
    let s3 = if (base - root).norm() >= (base + root).norm() { base - root } else { base + root };
    let s0 = cbrt_principal(s3);
    (0..3)
        .filter_map(|k| {
            let s = s0 * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0);
            (s.norm() > 0.0).then(|| -((s - sigma).powi(2) - 3.0 * (4.0 * t - 1.0)) / (6.0 * s))
        })
        .collect()
}

/// The boundary point of `K_t` above support point `sigma` (`σ ≥ 0`, in units of `a`).
pub fn boundary_point(cfg: TwoSourceConfig, sigma: f64) -> Result<ComplexValue> {
    let tau = cfg.reduced_time();
    let (v, w) = boundary_cubic(sigma, tau)?;
    let p = cfg.a * v_map(tau, Complex64::new(v, w))?;
    Ok(Complex64::new(p.re, p.im.max(0.0)))
}

/// Boundary of `K_t`: two mirror-image curves before the merge, one after.
#[derive(Debug, Clone, PartialEq)]
pub enum TwoSourceHull {
    Separated { left: HullBoundary, right: HullBoundary },
    Merged(HullBoundary),
}

impl TwoSourceHull {
    pub fn curves(&self) -> Vec<&HullBoundary> {
        match self {
            TwoSourceHull::Separated { left, right } => vec![left, right],
            TwoSourceHull::Merged(c) => vec![c],
        }
    }
}

fn cosine_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 0.5 * (1.0 - (PI * k as f64 / (n - 1) as f64).cos()))
        .collect()
}

/// Offset above the curve at which the boundary-to-support check is made.
const CHECK_OFFSET: f64 = 1e-7;
const CHECK_TOL: f64 = 1e-4;

fn check_boundary(cfg: TwoSourceConfig, p: Complex64, sigma: f64) -> Result<()> {
    const OP: &str = "hull_boundary_two";
    let g = g_two(cfg, p + Complex64::new(0.0, CHECK_OFFSET))?;
    let residual = (g - sigma).norm();
    if residual > CHECK_TOL * (1.0 + sigma.abs()) {
        return Err(Error::ResidualTooLarge { op: OP, residual });
    }
    Ok(())
}

/// Sample `∂K_t` on a cosine-clustered `ξ` grid.
///
/// Before `t_c` the right curve runs over `σ = a((1 - ξ)b_- + ξ b_+)` and the
/// left curve is its mirror image `-conj`. From `t_c` on a single curve is
/// returned, parametrized by `ξ ∈ [-1, 1]` with `σ = ξ a b_+`. Every point is
/// checked to map back to its support point.
pub fn hull_boundary_two(cfg: TwoSourceConfig, n_samples: usize) -> Result<TwoSourceHull> {
    const OP: &str = "hull_boundary_two";
    if n_samples < 8 {
        return Err(Error::BadConfig(format!("{OP}: n_samples = {n_samples} must be at least 8")));
    }
    if !(cfg.t > 0.0) {
        return Err(Error::BadConfig(format!("{OP}: t must be positive")));
    }
    let tau = cfg.reduced_time();
    let (bm, bp) = b_pm(tau);
    let sample = |params: &[f64], sigma_of: &(dyn Fn(f64) -> f64 + Sync)| -> Result<Vec<Complex64>> {
        params
            .par_iter()
            .map(|&xi| {
                let s = sigma_of(xi);
                let p = boundary_point(cfg, s)?;
                check_boundary(cfg, p, cfg.a * s)?;
                Ok(p)
            })
            .collect()
    };
    match cfg.phase() {
        Phase::PreCritical => {
            let params = cosine_grid(n_samples);
            let mut points = sample(&params, &|xi| (1.0 - xi) * bm + xi * bp)?;
            let n = points.len();
            points[0].im = 0.0;
            points[n - 1].im = 0.0;
            let left = HullBoundary {
                params: params.clone(),
                points: points.iter().rev().map(|p| -p.conj()).collect(),
                time: cfg.t,
            };
            let right = HullBoundary {
                params,
                points,
                time: cfg.t,
            };
            Ok(TwoSourceHull::Separated { left, right })
        }
        Phase::PostCritical => {
            let half = n_samples / 2 + 1;
            let xi = cosine_grid(half);
            let mut right = sample(&xi, &|x| x * bp)?;
            let last = right.len() - 1;
            right[last].im = 0.0;
            right[0].re = 0.0;
            let mut params: Vec<f64> = xi.iter().skip(1).rev().map(|x| -x).collect();
            let mut points: Vec<Complex64> = right.iter().skip(1).rev().map(|p| -p.conj()).collect();
            params.extend_from_slice(&xi);
            points.extend_from_slice(&right);
            Ok(TwoSourceHull::Merged(HullBoundary {
                params,
                points,
                time: cfg.t,
            }))
        }
    }
}

/// First-order factor `1 + (1/8){1 - exp(2iφ + e^{2iφ})}(a²/t)` relating
/// `∂K_t / √t` to `𝒦` for large `t`.
pub fn expansion_correction(t: f64, a: f64, phi: f64) -> Result<ComplexValue> {
    const OP: &str = "expansion_correction";
    if !(t > 0.0 && a >= 0.0 && phi.is_finite()) {
        return Err(Error::BadConfig(format!("{OP}: need t > 0 and a >= 0")));
    }
    let eps = a * a / t;
    if eps > 0.2 {
        return Err(Error::OutOfRange { op: OP });
    }
    let e2 = Complex64::from_polar(1.0, 2.0 * phi);
    Ok(1.0 + 0.125 * (1.0 - (Complex64::new(0.0, 2.0 * phi) + e2).exp()) * eps)
}

/// Height `(14√6/27) √(x_c/(x_c² - 1)) (x_c - |x|)^{3/2}` of `∂K_{t_c}`
/// near the outer osculation points (`a = 1`), valid within `0.1` of `x_c`.
pub fn critical_edge_profile(x: f64) -> Result<f64> {
    const OP: &str = "critical_edge_profile";
    let xc = critical_abscissa();
    let d = xc - x.abs();
    if !(d >= 0.0 && d <= 0.1) {
        return Err(Error::OutOfRange { op: OP });
    }
    Ok(14.0 * 6f64.sqrt() / 27.0 * (xc / (xc * xc - 1.0)).sqrt() * d.powf(1.5))
}

/// Slope `1/√3` of the two boundary branches leaving the origin at `t_c`.
pub fn critical_origin_slope() -> f64 {
    1.0 / 3f64.sqrt()
}
