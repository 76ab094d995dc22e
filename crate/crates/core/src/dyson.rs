//! Finite-N side: the time-changed Dyson model driving N simultaneous slits.
//!
//! `dV_j = √(κ/N) dB_j + (1/N) Σ_{k≠j} 4/(V_j - V_k) dt`, and the multiple
//! Loewner chain `∂_t g = (1/N) Σ_j 2/(g - V_j)`.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::burgers::AtomicMeasure;
use crate::error::{Error, Result};
use crate::single_source::semicircle_cdf;
use crate::special::ComplexValue;

/// Default spreading of coincident starting points.
pub const DEFAULT_COLLAPSE_OFFSET: f64 = 1e-8;
/// Default distance at which a Loewner trajectory counts as swallowed.
pub const DEFAULT_SWALLOW_EPS: f64 = 1e-4;
/// Rejected sub-steps are halved at most this many times.
pub const MAX_HALVINGS: u32 = 20;
/// Drift-limited sub-steps allowed within one step.
pub const MAX_SUBSTEPS: usize = 100_000;
/// Loewner RK4 sub-steps per SDE step.
pub const LOEWNER_SUBSTEPS: usize = 4;

/// Particle configuration of the Dyson model at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct DysonState {
    positions: Vec<f64>,
    time: f64,
    kappa: f64,
    seed: u64,
    step_count: u64,
    nominal: AtomicMeasure,
}

impl DysonState {
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    /// The idealized initial measure the particles were spread from.
    pub fn nominal(&self) -> &AtomicMeasure {
        &self.nominal
    }

    pub fn is_ordered(&self) -> bool {
        is_strictly_increasing(&self.positions)
    }
}

fn is_strictly_increasing(x: &[f64]) -> bool {
    x.windows(2).all(|p| p[0] < p[1])
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa <= 4.0 {
        Ok(())
    } else {
        Err(Error::BadConfig(format!("kappa = {kappa} must lie in (0, 4]")))
    }
}

/// Build a starting configuration from nondecreasing targets.
///
/// Within a run of equal targets the k-th repeat (counting from zero) is
/// shifted by `k · collapse_offset`.
pub fn initial_state(x: &[f64], kappa: f64, seed: u64, collapse_offset: f64) -> Result<DysonState> {
    check_kappa(kappa)?;
    if x.is_empty() {
        return Err(Error::BadConfig("at least one particle is required".into()));
    }
    if x.iter().any(|v| !v.is_finite()) || x.windows(2).any(|p| p[1] < p[0]) {
        return Err(Error::BadConfig("initial targets must be finite and nondecreasing".into()));
    }
    if !(collapse_offset > 0.0 && collapse_offset.is_finite()) {
        return Err(Error::BadConfig(format!("collapse offset {collapse_offset} must be positive")));
    }
    let n = x.len();
    let mut positions = Vec::with_capacity(n);
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    let mut repeat = 0usize;
    for (i, &v) in x.iter().enumerate() {
        if i > 0 && v == x[i - 1] {
            repeat += 1;
            atoms.last_mut().unwrap().1 += 1.0 / n as f64;
        } else {
            repeat = 0;
            atoms.push((v, 1.0 / n as f64));
        }
        positions.push(v + repeat as f64 * collapse_offset);
    }
    if !is_strictly_increasing(&positions) {
        return Err(Error::BadConfig("collapse offset too large: spread clusters overlap".into()));
    }
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    for a in atoms.iter_mut() {
        a.1 /= total;
    }
    Ok(DysonState {
        positions,
        time: 0.0,
        kappa,
        seed,
        step_count: 0,
        nominal: AtomicMeasure::new(atoms)?,
    })
}

/// Standard normal draw keyed by `(seed, particle, step)`.
///
/// ChaCha8 with the particle as stream id and the step fixing the word
/// position, followed by Box–Muller; independent of call order.
pub fn standard_normal(seed: u64, particle: usize, step: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(particle as u64);
    rng.set_word_pos(step as u128 * 4);
    let u1 = 1.0 - (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let u2 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Interaction drift `(1/N) Σ_{k≠j} 4/(x_j - x_k)`.
///
/// Terms are added nearest-first in mirrored pairs so that reflecting the
/// configuration negates the drift exactly.
pub fn drift(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let inv_n = 1.0 / n as f64;
    (0..n)
        .map(|j| {
            let mut s = 0.0;
            for d in 1..n {
                if j < d && j + d >= n {
                    break;
                }
                let below = if j >= d { 4.0 / (x[j] - x[j - d]) } else { 0.0 };
                let above = if j + d < n { 4.0 / (x[j] - x[j + d]) } else { 0.0 };
                s += below + above;
            }
            s * inv_n
        })
        .collect()
}

/// One Euler–Maruyama step of size `dt` with Brownian increments from the
/// state's seed.
pub fn step_dyson(state: &DysonState, dt: f64) -> Result<DysonState> {
    let (seed, step) = (state.seed, state.step_count);
    let sdt = dt.max(0.0).sqrt();
    step_dyson_with(state, dt, |j| sdt * standard_normal(seed, j, step))
}

/// One step of size `dt` with caller-supplied increments `ΔB_j` over the step.
///
/// The step is split into drift-limited sub-steps, each taking its share of
/// `ΔB` in proportion to its length; a sub-step that would break the ordering
/// is retried at half size, up to [`MAX_HALVINGS`] times.
pub fn step_dyson_with<F>(state: &DysonState, dt: f64, noise: F) -> Result<DysonState>
where
    F: Fn(usize) -> f64,
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::BadConfig(format!("step_dyson: dt = {dt} must be positive")));
    }
    let n = state.n();
    let db: Vec<f64> = (0..n).map(&noise).collect();
    let sigma = (state.kappa / n as f64).sqrt();
    let mut x = state.positions.clone();
    let mut done = 0.0;
    let mut trial = x.clone();
    let mut substeps = 0usize;
    while done < dt {
        substeps += 1;
        if substeps > MAX_SUBSTEPS {
            return Err(Error::StepFailure { halvings: MAX_HALVINGS });
        }
        let b = drift(&x);
        let max_drift = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let min_gap = x.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min);
        let remaining = dt - done;
        let mut h = if max_drift > 0.0 { remaining.min(0.1 * min_gap / max_drift) } else { remaining };
        let mut halvings = 0;
        loop {
            let share = h / dt;
            for j in 0..n {
                trial[j] = x[j] + b[j] * h + sigma * db[j] * share;
            }
            if is_strictly_increasing(&trial) && trial.iter().all(|v| v.is_finite()) {
                break;
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(Error::StepFailure { halvings: MAX_HALVINGS });
            }
            h *= 0.5;
        }
        std::mem::swap(&mut x, &mut trial);
        done = if h >= remaining { dt } else { done + h };
    }
    Ok(DysonState {
        positions: x,
        time: state.time + dt,
        kappa: state.kappa,
        seed: state.seed,
        step_count: state.step_count + 1,
        nominal: state.nominal.clone(),
    })
}

/// A recorded particle path on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DysonPath {
    pub dt: f64,
    pub times: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
}

impl DysonPath {
    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// The path truncated to times `≤ t`.
    pub fn until(&self, t: f64) -> DysonPath {
        let k = self.times.iter().take_while(|&&s| s <= t + 1e-12).count().max(1);
        DysonPath {
            dt: self.dt,
            times: self.times[..k].to_vec(),
            positions: self.positions[..k].to_vec(),
        }
    }
}

/// Run `steps` steps of size `dt`, keeping every state.
pub fn simulate(initial: &DysonState, dt: f64, steps: usize) -> Result<(DysonPath, DysonState)> {
    let mut times = Vec::with_capacity(steps + 1);
    let mut positions = Vec::with_capacity(steps + 1);
    let mut state = initial.clone();
    times.push(state.time);
    positions.push(state.positions.clone());
    for _ in 0..steps {
        state = step_dyson(&state, dt)?;
        times.push(state.time);
        positions.push(state.positions.clone());
    }
    Ok((DysonPath { dt, times, positions }, state))
}

/// Run `steps` steps of size `dt`, keeping only the final state.
pub fn simulate_final(initial: &DysonState, dt: f64, steps: usize) -> Result<DysonState> {
    let mut state = initial.clone();
    for _ in 0..steps {
        state = step_dyson(&state, dt)?;
    }
    Ok(state)
}

/// One Loewner characteristic `t -> g_t^N(z0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoewnerSample {
    pub initial_point: ComplexValue,
    pub trajectory: Vec<(f64, ComplexValue)>,
    pub swallowed_at: Option<f64>,
}

#[inline]
fn loewner_field(g: Complex64, v: &[f64]) -> Complex64 {
    let (mut re, mut im) = (0.0, 0.0);
    for &x in v {
        let dr = g.re - x;
        let d2 = dr * dr + g.im * g.im;
        re += dr / d2;
        im -= g.im / d2;
    }
    let s = 2.0 / v.len() as f64;
    Complex64::new(re * s, im * s)
}

struct Characteristic<'a> {
    path: &'a DysonPath,
    eps: f64,
    check_height: bool,
}

enum Stop {
    Swallowed(f64),
    Survived,
}

impl Characteristic<'_> {
    fn swallowed(&self, g: Complex64, v: &[f64]) -> bool {
        if !(g.re.is_finite() && g.im.is_finite()) {
            return true;
        }
        if self.check_height && g.im < self.eps {
            return true;
        }
        v.iter().any(|&x| (g - x).norm_sqr() < self.eps * self.eps)
    }

    /// RK4 with piecewise-constant driving; `record` sees each step end.
    fn run(&self, z0: Complex64, mut record: impl FnMut(f64, Complex64)) -> Stop {
        let p = self.path;
        if self.swallowed(z0, &p.positions[0]) {
            return Stop::Swallowed(p.times[0]);
        }
        // Integrate the displacement g - z0, which keeps far-field moves
        // above the rounding level of g.
        let mut disp = Complex64::new(0.0, 0.0);
        let mut g = z0;
        for k in 0..p.times.len().saturating_sub(1) {
            let v = &p.positions[k];
            let h = (p.times[k + 1] - p.times[k]) / LOEWNER_SUBSTEPS as f64;
            for s in 0..LOEWNER_SUBSTEPS {
                let k1 = loewner_field(g, v);
                let k2 = loewner_field(g + 0.5 * h * k1, v);
                let k3 = loewner_field(g + 0.5 * h * k2, v);
                let k4 = loewner_field(g + h * k3, v);
                disp += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                if z0.im == 0.0 {
                    disp.im = 0.0;
                }
                g = z0 + disp;
                if self.swallowed(g, v) {
                    return Stop::Swallowed(p.times[k] + (s + 1) as f64 * h);
                }
            }
            record(p.times[k + 1], g);
        }
        Stop::Survived
    }
}

/// Follow `z0` under the finite-N Loewner chain driven by `path`.
///
/// RK4 with [`LOEWNER_SUBSTEPS`] sub-steps per path step and the driving
/// points frozen within a step. A point counts as swallowed once it comes
/// within `swallow_eps` of a driving point or, for `Im z0 > swallow_eps`, once
/// its image sinks below height `swallow_eps`.
pub fn evolve_loewner(path: &DysonPath, z0: ComplexValue, swallow_eps: f64) -> Result<LoewnerSample> {
    validate_loewner(path, z0, swallow_eps)?;
    let ch = Characteristic {
        path,
        eps: swallow_eps,
        check_height: z0.im > swallow_eps,
    };
    let mut trajectory = vec![(path.times[0], z0)];
    let stop = ch.run(z0, |t, g| trajectory.push((t, g)));
    let swallowed_at = match stop {
        Stop::Swallowed(t) => Some(t),
        Stop::Survived => None,
    };
    Ok(LoewnerSample {
        initial_point: z0,
        trajectory,
        swallowed_at,
    })
}

fn validate_loewner(path: &DysonPath, z0: Complex64, eps: f64) -> Result<()> {
    if path.times.is_empty() || path.times.len() != path.positions.len() {
        return Err(Error::BadConfig("path must contain matching times and positions".into()));
    }
    if !(z0.im >= 0.0 && z0.re.is_finite() && z0.im.is_finite()) {
        return Err(Error::BadConfig(format!("z0 = {z0} must lie in the closed upper half plane")));
    }
    if !(eps > 0.0) {
        return Err(Error::BadConfig(format!("swallow_eps = {eps} must be positive")));
    }
    Ok(())
}

/// Axis-aligned rectangle in the closed upper half plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    /// `[-1.5·2√(Te), 1.5·2√(Te)] × [0, 1.5·2√(T/e)]`, bracketing the
    /// single-source hull at time `T`.
    pub fn around_single_hull(t: f64) -> Window {
        let e = std::f64::consts::E;
        let half = 1.5 * 2.0 * (t * e).sqrt();
        Window {
            x_min: -half,
            x_max: half,
            y_min: 0.0,
            y_max: 1.5 * 2.0 * (t / e).sqrt(),
        }
    }
}

/// Swallowed-by-time-T indicator on cell centres, row-major from the bottom row.
#[derive(Debug, Clone, PartialEq)]
pub struct HullRaster {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    pub cells: Vec<bool>,
}

impl HullRaster {
    pub fn cell_center(&self, ix: usize, iy: usize) -> ComplexValue {
        let w = &self.window;
        let dx = (w.x_max - w.x_min) / self.nx as f64;
        let dy = (w.y_max - w.y_min) / self.ny as f64;
        Complex64::new(w.x_min + (ix as f64 + 0.5) * dx, w.y_min + (iy as f64 + 0.5) * dy)
    }

    pub fn get(&self, ix: usize, iy: usize) -> bool {
        self.cells[iy * self.nx + ix]
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
}

/// Rasterized hull estimate: a cell is set when its centre is swallowed by
/// the end of the path.
pub fn hull_raster(path: &DysonPath, window: Window, nx: usize, ny: usize, swallow_eps: f64) -> Result<HullRaster> {
    if nx == 0 || ny == 0 {
        return Err(Error::BadConfig("raster needs at least one cell per axis".into()));
    }
    if !(window.y_min >= 0.0 && window.x_min < window.x_max && window.y_min < window.y_max) {
        return Err(Error::BadConfig("window must be a nondegenerate rectangle in the upper half plane".into()));
    }
    let mut raster = HullRaster {
        window,
        nx,
        ny,
        cells: vec![false; nx * ny],
    };
    validate_loewner(path, raster.cell_center(0, 0), swallow_eps)?;
    let cells: Vec<bool> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let z0 = raster.cell_center(idx % nx, idx / nx);
            let ch = Characteristic {
                path,
                eps: swallow_eps,
                check_height: z0.im > swallow_eps,
            };
            matches!(ch.run(z0, |_, _| {}), Stop::Swallowed(_))
        })
        .collect();
    raster.cells = cells;
    Ok(raster)
}

/// Empirical measure `(1/N) Σ δ_{V_j}` at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    samples: Vec<f64>,
    pub time: f64,
}

impl EmpiricalMeasure {
    pub fn new(mut samples: Vec<f64>, time: f64) -> Self {
        samples.sort_by(|a, b| a.total_cmp(b));
        Self { samples, time }
    }

    pub fn from_state(state: &DysonState) -> Self {
        Self::new(state.positions.clone(), state.time)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Right-continuous distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.samples.partition_point(|&s| s <= x);
        k as f64 / self.samples.len() as f64
    }

    /// Kolmogorov–Smirnov distance to a continuous distribution function.
    pub fn ks_distance(&self, reference: impl Fn(f64) -> f64) -> f64 {
        let n = self.samples.len() as f64;
        self.samples
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = reference(x);
                (f - i as f64 / n).max((i + 1) as f64 / n - f)
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalStats {
    pub mean: f64,
    pub second_moment: f64,
    /// Distance to the semicircle law of radius `4√t`; absent at `t = 0`.
    pub ks_to_semicircle: Option<f64>,
}

pub fn empirical_stats(state: &DysonState) -> EmpiricalStats {
    let n = state.n() as f64;
    let mean = state.positions.iter().sum::<f64>() / n;
    let second_moment = state.positions.iter().map(|v| v * v).sum::<f64>() / n;
    let t = state.time;
    let ks_to_semicircle = (t > 0.0).then(|| EmpiricalMeasure::from_state(state).ks_distance(|u| semicircle_cdf(t, u)));
    EmpiricalStats {
        mean,
        second_moment,
        ks_to_semicircle,
    }
}

/// `E[(1/N) Σ V_j²]` at time `t` for a start at the origin.
pub fn expected_second_moment(n: usize, kappa: f64, t: f64) -> f64 {
    let n = n as f64;
    (4.0 * (n - 1.0) / n + kappa / n) * t
}
