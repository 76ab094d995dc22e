//! Hydrodynamic limit for a finitely atomic initial measure.
//!
//! The Green's function `M_t(z) = ∫ 2 μ_t(du) / (z - u)` solves the inviscid
//! complex Burgers equation `∂_t M = -2 M ∂_z M`, equivalently the functional
//! equation `M_t(z) = M_0(z - 2t M_t(z))`. The Loewner map is recovered from
//! the auxiliary flow `h_t` through `g_t(z) = h_t(z) + 2t M_0(h_t(z))`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{finite, Error, Result};
use crate::ode::{self, Tolerances};
use crate::poly::Poly;
use crate::single_source::HullBoundary;
use crate::special::{ComplexValue, CUT_TOL};

/// Rungs of the time ladder used to continue the Newton root.
pub const CONTINUATION_RUNGS: usize = 32;
/// Imaginary offset used for Stieltjes inversion.
pub const INVERSION_EPS: f64 = 1e-6;
/// Tolerance of the check `M_0(h_t(z)) = M_t(g_t(z))`.
pub const CONSERVATION_TOL: f64 = 1e-8;
/// Density level separating the support from its complement.
pub const SUPPORT_THRESHOLD: f64 = 1e-4;

/// A probability measure made of finitely many atoms on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<(f64, f64)>,
}

impl AtomicMeasure {
    /// Atoms as `(location, weight)`; locations strictly increasing, weights
    /// positive and summing to one.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::BadConfig("measure has no atoms".into()));
        }
        if atoms.iter().any(|&(u, w)| !u.is_finite() || !(w > 0.0) || !w.is_finite()) {
            return Err(Error::BadConfig("atom weights must be positive and finite".into()));
        }
        if atoms.windows(2).any(|p| !(p[0].0 < p[1].0)) {
            return Err(Error::BadConfig("atom locations must be strictly increasing".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::BadConfig(format!("atom weights sum to {total}, not 1")));
        }
        Ok(Self { atoms })
    }

    /// The point mass `δ_x`.
    pub fn dirac(x: f64) -> Self {
        Self { atoms: vec![(x, 1.0)] }
    }

    /// `(δ_a + δ_{-a}) / 2`.
    pub fn symmetric_pair(a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::BadConfig(format!("source half-separation a = {a} must be positive")));
        }
        Self::new(vec![(-a, 0.5), (a, 0.5)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Pushforward under `u -> u / c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            atoms: self.atoms.iter().map(|&(u, w)| (u / c, w)).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.atoms.len();
        (0..n).all(|i| {
            let (u, w) = self.atoms[i];
            let (v, x) = self.atoms[n - 1 - i];
            (u + v).abs() <= 1e-12 * (1.0 + u.abs()) && (w - x).abs() <= 1e-12
        })
    }

    pub fn min_location(&self) -> f64 {
        self.atoms[0].0
    }

    pub fn max_location(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].0
    }

    fn nearest_atom_distance(&self, z: Complex64) -> f64 {
        self.atoms
            .iter()
            .map(|&(u, _)| (z - u).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// `M_0(z)` and `M_0'(z)`.
    pub(crate) fn m0_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut m = Complex64::new(0.0, 0.0);
        let mut dm = Complex64::new(0.0, 0.0);
        for &(u, w) in &self.atoms {
            let r = 1.0 / (z - u);
            m += 2.0 * w * r;
            dm -= 2.0 * w * r * r;
        }
        (m, dm)
    }

    /// Numerator polynomial of `(z - ζ) - 2t M_0(ζ)` times `∏(ζ - u_j)`.
    fn subordination_polynomial(&self, t: f64, z: Complex64) -> Poly {
        let one = Complex64::new(1.0, 0.0);
        let linear: Vec<Poly> = self
            .atoms
            .iter()
            .map(|&(u, _)| Poly::linear(Complex64::new(u, 0.0)))
            .collect();
        let full = linear.iter().fold(Poly::constant(one), |acc, f| acc.mul(f));
        let mut p = Poly(vec![z, -one]).mul(&full);
        for (j, &(_, w)) in self.atoms.iter().enumerate() {
            let others = linear
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .fold(Poly::constant(one), |acc, (_, f)| acc.mul(f));
            p = p.add(&others.scale(Complex64::new(-4.0 * t * w, 0.0)));
        }
        p
    }
}

/// The Green's function of the evolved measure at a fixed time.
#[derive(Debug, Clone)]
pub struct GreenFunctionField {
    pub time: f64,
    pub initial_measure: AtomicMeasure,
}

impl GreenFunctionField {
    pub fn new(initial_measure: AtomicMeasure, time: f64) -> Self {
        Self { time, initial_measure }
    }

    pub fn evaluate(&self, z: ComplexValue) -> Result<ComplexValue> {
        solve_mt(&self.initial_measure, self.time, z)
    }
}

/// `M_0(z) = Σ 2 w_j / (z - u_j)`.
pub fn stieltjes_m0(mu0: &AtomicMeasure, z: ComplexValue) -> Result<ComplexValue> {
    const OP: &str = "stieltjes_m0";
    finite(OP, z)?;
    if mu0.nearest_atom_distance(z) <= 1e-14 {
        return Err(Error::Pole { op: OP });
    }
    finite(OP, mu0.m0_with_derivative(z).0)
}

fn check_time(op: &'static str, t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::BadConfig(format!("{op}: time t = {t} must be finite and non-negative")))
    }
}

fn functional_residual(mu0: &AtomicMeasure, t: f64, z: Complex64, m: Complex64) -> f64 {
    let zeta = z - 2.0 * t * m;
    (m - mu0.m0_with_derivative(zeta).0).norm()
}

/// Newton iteration on `F(M) = M - M_0(z - 2τM)` from a warm start.
fn newton_rung(mu0: &AtomicMeasure, tau: f64, z: Complex64, mut m: Complex64) -> Result<Complex64> {
    const OP: &str = "solve_mt";
    let mut residual = f64::INFINITY;
    for _ in 0..60 {
        let zeta = z - 2.0 * tau * m;
        if mu0.nearest_atom_distance(zeta) <= 1e-14 {
            return Err(Error::Pole { op: OP });
        }
        let (m0, dm0) = mu0.m0_with_derivative(zeta);
        let f = m - m0;
        residual = f.norm();
        let scale = 1.0 + m.norm();
        if residual <= 1e-14 * scale {
            return Ok(m);
        }
        let df = 1.0 + 2.0 * tau * dm0;
        let step = f / df;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        m -= step;
        if step.norm() <= 1e-14 * scale {
            residual = functional_residual(mu0, tau, z, m);
            if residual <= 1e-11 * scale {
                return Ok(m);
            }
        }
    }
    if residual <= 1e-11 * (1.0 + m.norm()) {
        return Ok(m);
    }
    Err(Error::NonConvergence { op: OP, residual })
}

fn newton_continuation(mu0: &AtomicMeasure, t: f64, z: Complex64, rungs: usize) -> Result<Complex64> {
    let mut m = mu0.m0_with_derivative(z).0;
    for k in 1..=rungs {
        let s = k as f64 / rungs as f64;
        let tau = t * s * s;
        m = newton_rung(mu0, tau, z, m)?;
        if !(m.im < 0.0) {
            return Err(Error::BranchAmbiguity { op: "solve_mt" });
        }
    }
    Ok(m)
}

/// Physical solution from the roots of the subordination polynomial.
///
/// With `ζ = z - 2tM`, the functional equation is polynomial in `ζ`. For `z`
/// in the upper half plane exactly one root has `Im ζ > 0`; on the real axis
/// the boundary value is the root in the closed upper half plane where
/// `1 + 2t M_0'(ζ) > 0` for real roots.
pub(crate) fn subordination_root(mu0: &AtomicMeasure, t: f64, z: Complex64) -> Result<Complex64> {
    const OP: &str = "solve_mt";
    let roots = mu0.subordination_polynomial(t, z).roots()?;
    // Polish each root on the functional equation itself.
    let polish = |mut zeta: Complex64| {
        for _ in 0..8 {
            let (m0, dm0) = mu0.m0_with_derivative(zeta);
            let f = zeta + 2.0 * t * m0 - z;
            let df = 1.0 + 2.0 * t * dm0;
            let step = f / df;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            zeta -= step;
            if step.norm() <= 1e-16 * (1.0 + zeta.norm()) {
                break;
            }
        }
        zeta
    };
    let roots: Vec<Complex64> = roots.into_iter().map(polish).collect();
    let scale = 1.0 + z.norm();
    let best = roots
        .iter()
        .copied()
        .filter(|r| r.re.is_finite() && r.im.is_finite())
        .max_by(|a, b| a.im.total_cmp(&b.im))
        .ok_or(Error::NoPhysicalRoot { op: OP })?;
    if z.im > CUT_TOL {
        if !(best.im > 0.0) {
            return Err(Error::BranchAmbiguity { op: OP });
        }
        return Ok(best);
    }
    // Boundary value on the real axis.
    if best.im > 1e-7 * scale {
        return Ok(best);
    }
    let real_candidate = roots
        .iter()
        .filter(|r| r.im.abs() <= 1e-7 * scale)
        .map(|r| {
            let x = Complex64::new(r.re, 0.0);
            let slope = 1.0 + 2.0 * t * mu0.m0_with_derivative(x).1.re;
            (x, slope)
        })
        .filter(|c| c.1.is_finite())
        .max_by(|a, b| a.1.total_cmp(&b.1));
    match real_candidate {
        Some((x, slope)) if slope >= -1e-6 => Ok(x),
        _ => Ok(best),
    }
}

fn solve_mt_upper(mu0: &AtomicMeasure, t: f64, z: Complex64) -> Result<Complex64> {
    const OP: &str = "solve_mt";
    if z.im > CUT_TOL {
        let mut rungs = CONTINUATION_RUNGS;
        for _ in 0..=3 {
            match newton_continuation(mu0, t, z, rungs) {
                Ok(m) => return Ok(m),
                Err(Error::Pole { .. }) | Err(Error::NonConvergence { .. }) | Err(Error::BranchAmbiguity { .. }) => {
                    rungs *= 2
                }
                Err(e) => return Err(e),
            }
        }
    }
    // Near the real axis, or when continuation crossed onto another sheet.
    let zeta = subordination_root(mu0, t, z)?;
    let mut m = (z - zeta) / (2.0 * t);
    if z.im > CUT_TOL {
        m = newton_rung(mu0, t, z, m).unwrap_or(m);
        if !(m.im < 0.0) {
            return Err(Error::BranchAmbiguity { op: OP });
        }
    } else if zeta.im.abs() <= 1e-7 * (1.0 + z.norm()) {
        m.im = 0.0;
    }
    let residual = functional_residual(mu0, t, z, m);
    if residual > 1e-10 * (1.0 + m.norm()) {
        return Err(Error::NonConvergence { op: OP, residual });
    }
    Ok(m)
}

/// Solve `M = M_0(z - 2tM)` on the physical branch (`Im M < 0` for `z ∈ ℍ`).
///
/// Newton iteration is continued along the ladder `t_k = t (k/K)^2`, `K = 32`,
/// refined up to three times; if that fails, or when `z` is within
/// [`CUT_TOL`] of the real axis, the root is taken from the subordination
/// polynomial instead. Points in the lower half plane use `M(z̄) = conj M(z)`.
pub fn solve_mt(mu0: &AtomicMeasure, t: f64, z: ComplexValue) -> Result<ComplexValue> {
    const OP: &str = "solve_mt";
    check_time(OP, t)?;
    finite(OP, z)?;
    if t == 0.0 {
        return stieltjes_m0(mu0, z);
    }
    let m = if z.im < -CUT_TOL {
        solve_mt_upper(mu0, t, z.conj())?.conj()
    } else {
        solve_mt_upper(mu0, t, z)?
    };
    finite(OP, m)
}

/// Integrate `∂_t h = -M_0(h) / (1 + 2t M_0'(h))` from `h_0(z) = z`.
pub fn solve_ht(mu0: &AtomicMeasure, t: f64, z: ComplexValue) -> Result<ComplexValue> {
    const OP: &str = "solve_ht";
    check_time(OP, t)?;
    finite(OP, z)?;
    if z.im < 0.0 {
        return Err(Error::BadConfig(format!("{OP}: z = {z} is below the real axis")));
    }
    if t == 0.0 {
        return Ok(z);
    }
    let rhs = |tau: f64, h: Complex64| -> Result<Complex64> {
        if mu0.nearest_atom_distance(h) < 1e-8 {
            return Err(Error::SingularityHit { op: OP });
        }
        let (m0, dm0) = mu0.m0_with_derivative(h);
        let den = 1.0 + 2.0 * tau * dm0;
        if den.norm() < 1e-10 {
            return Err(Error::Caustic { op: OP });
        }
        Ok(-m0 / den)
    };
    let h = finite(OP, ode::integrate(OP, rhs, 0.0, t, z, Tolerances::default())?)?;
    // Compatibility M_0(h_t(z)) = M_t(g_t(z)); it fails when the flow has
    // followed a non-physical branch, i.e. z lies in the hull.
    let m0 = mu0.m0_with_derivative(h).0;
    let g = h + 2.0 * t * m0;
    let consistent = solve_mt(mu0, t, g)
        .map(|m| (m - m0).norm() <= CONSERVATION_TOL * m0.norm().max(1.0))
        .unwrap_or(false);
    if !consistent {
        return Err(Error::HullInterior { op: OP });
    }
    Ok(h)
}

/// `g_t(z) = h_t(z) + 2t M_0(h_t(z))`.
pub fn map_g(mu0: &AtomicMeasure, t: f64, z: ComplexValue) -> Result<ComplexValue> {
    const OP: &str = "map_g";
    if t == 0.0 {
        check_time(OP, t)?;
        return finite(OP, z);
    }
    let h = solve_ht(mu0, t, z)?;
    let m0 = stieltjes_m0(mu0, h)?;
    finite(OP, h + 2.0 * t * m0)
}

/// `|M_0(h_t(z)) - M_t(g_t(z))|`, the compatibility of the two routes.
pub fn conservation_residual(mu0: &AtomicMeasure, t: f64, z: ComplexValue) -> Result<f64> {
    let h = solve_ht(mu0, t, z)?;
    let m0 = stieltjes_m0(mu0, h)?;
    let g = h + 2.0 * t * m0;
    Ok((m0 - solve_mt(mu0, t, g)?).norm())
}

/// `g_t^{-1}(w)` by the reverse flow `dz/ds = -M_{t-s}(z)`, `z(0) = w`.
pub fn inverse_map_g(mu0: &AtomicMeasure, t: f64, w: ComplexValue) -> Result<ComplexValue> {
    const OP: &str = "inverse_map_g";
    check_time(OP, t)?;
    finite(OP, w)?;
    if w.im < -CUT_TOL {
        return Err(Error::BadConfig(format!("{OP}: w = {w} is below the real axis")));
    }
    if t == 0.0 {
        return Ok(w);
    }
    let w = if w.im < 0.0 { Complex64::new(w.re, 0.0) } else { w };
    let rhs = |s: f64, z: Complex64| -> Result<Complex64> {
        let tau = (t - s).max(0.0);
        let z = if z.im < 0.0 && z.im > -CUT_TOL { Complex64::new(z.re, 0.0) } else { z };
        Ok(-solve_mt(mu0, tau, z)?)
    };
    let z = ode::integrate(OP, rhs, 0.0, t, w, Tolerances::default())?;
    let z = finite(OP, z)?;
    if z.im > 1e-9 {
        if let Ok(back) = map_g(mu0, t, z) {
            let residual = (back - w).norm();
            if residual > 1e-6 {
                return Err(Error::ResidualTooLarge { op: OP, residual });
            }
        }
    }
    Ok(z)
}

/// Sampled density with the detected support.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub support: Vec<(f64, f64)>,
    pub time: f64,
}

impl DensityProfile {
    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(u, r)| 0.5 * (u[1] - u[0]) * (r[0] + r[1]))
            .sum()
    }
}

/// `ρ_t(u)` at a single point.
pub fn density_at(mu0: &AtomicMeasure, t: f64, u: f64) -> Result<f64> {
    let m = solve_mt(mu0, t, Complex64::new(u, INVERSION_EPS))?;
    Ok((-m.im / (2.0 * std::f64::consts::PI)).max(0.0))
}

/// `ρ_t(u) = -Im M_t(u + iε) / 2π` on a grid, with the support detected where
/// the density exceeds [`SUPPORT_THRESHOLD`] and its edges refined by bisection.
pub fn density(mu0: &AtomicMeasure, t: f64, grid: &[f64]) -> Result<DensityProfile> {
    const OP: &str = "density";
    check_time(OP, t)?;
    if !(t > 0.0) {
        return Err(Error::BadConfig(format!("{OP}: t must be positive")));
    }
    if grid.len() < 2 || grid.windows(2).any(|p| !(p[0] < p[1])) {
        return Err(Error::BadConfig(format!("{OP}: grid must be strictly increasing with at least two points")));
    }
    let density: Vec<f64> = grid
        .par_iter()
        .map(|&u| density_at(mu0, t, u))
        .collect::<Result<_>>()?;

    let above = |r: f64| r > SUPPORT_THRESHOLD;
    let edge = |lo: f64, hi: f64, inside_hi: bool| -> Result<f64> {
        // Bisection on the threshold crossing between two grid nodes.
        let (mut a, mut b) = (lo, hi);
        for _ in 0..40 {
            let mid = 0.5 * (a + b);
            let inside = above(density_at(mu0, t, mid)?);
            if inside == inside_hi {
                b = mid;
            } else {
                a = mid;
            }
        }
        Ok(0.5 * (a + b))
    };
    let mut support = Vec::new();
    let mut start: Option<f64> = None;
    for i in 0..grid.len() {
        let inside = above(density[i]);
        match (inside, start) {
            (true, None) => {
                start = Some(if i == 0 { grid[0] } else { edge(grid[i - 1], grid[i], true)? });
            }
            (false, Some(s)) => {
                support.push((s, edge(grid[i - 1], grid[i], false)?));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        support.push((s, grid[grid.len() - 1]));
    }
    Ok(DensityProfile {
        grid: grid.to_vec(),
        density,
        support,
        time: t,
    })
}

/// `M_t(z, c) = c M_{c^2 t}(c z)`.
pub fn rescaled_green(mu0: &AtomicMeasure, t: f64, z: ComplexValue, c: f64) -> Result<ComplexValue> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::BadConfig(format!("rescaled_green: scale c = {c} must be positive")));
    }
    Ok(c * solve_mt(mu0, c * c * t, c * z)?)
}

/// A grid covering the support of `μ_t`, which lies within
/// `[min u - 4√t, max u + 4√t]`.
pub fn support_grid(mu0: &AtomicMeasure, t: f64, points: usize) -> Vec<f64> {
    let pad = 4.0 * t.sqrt() + 0.05;
    let lo = mu0.min_location() - pad;
    let hi = mu0.max_location() + pad;
    let n = points.max(2);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Hull boundary `g_t^{-1}(supp μ_t)`, one curve per support interval.
///
/// Support points are placed at Chebyshev nodes of each interval and mapped
/// back by [`inverse_map_g`].
pub fn hull_boundary_general(mu0: &AtomicMeasure, t: f64, samples_per_interval: usize) -> Result<Vec<HullBoundary>> {
    check_time("hull_boundary_general", t)?;
    if t == 0.0 {
        return Ok(mu0
            .atoms()
            .iter()
            .map(|&(u, _)| HullBoundary {
                params: vec![0.0],
                points: vec![Complex64::new(u, 0.0)],
                time: 0.0,
            })
            .collect());
    }
    let profile = density(mu0, t, &support_grid(mu0, t, 2001))?;
    let n = samples_per_interval.max(3);
    profile
        .support
        .iter()
        .map(|&(lo, hi)| {
            let params: Vec<f64> = (0..n)
                .map(|k| 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / (n - 1) as f64).cos()))
                .collect();
            let points = params
                .par_iter()
                .map(|&xi| inverse_map_g(mu0, t, Complex64::new(lo + (hi - lo) * xi, 0.0)))
                .collect::<Result<Vec<_>>>()?;
            Ok(HullBoundary {
                params,
                points,
                time: t,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn closed_single(t: f64, z: Complex64) -> Complex64 {
        // Independent evaluation of 4 / (z + sqrt(z^2 - 16t)) with the
        // branch fixed so that the root behaves like z.
        let r = 4.0 * t.sqrt();
        4.0 / (z + (z - r).sqrt() * (z + r).sqrt())
    }

    #[test]
    fn measure_validation() {
        assert!(AtomicMeasure::new(vec![]).is_err());
        assert!(AtomicMeasure::new(vec![(0.0, 0.5), (0.0, 0.5)]).is_err());
        assert!(AtomicMeasure::new(vec![(0.0, 0.7), (1.0, 0.2)]).is_err());
        assert!(AtomicMeasure::new(vec![(1.0, 0.5), (0.0, 0.5)]).is_err());
        assert!(AtomicMeasure::new(vec![(0.0, -0.5), (1.0, 1.5)]).is_err());
        assert!(AtomicMeasure::symmetric_pair(1.0).unwrap().is_symmetric());
    }

    #[test]
    fn m0_examples() {
        let d = AtomicMeasure::dirac(0.0);
        assert!((stieltjes_m0(&d, c(0.0, 1.0)).unwrap() - c(0.0, -2.0)).norm() < 1e-15);
        assert!((stieltjes_m0(&d, c(2.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        let pair = AtomicMeasure::symmetric_pair(1.0).unwrap();
        let z = c(0.3, 0.7);
        assert!((stieltjes_m0(&pair, z).unwrap() - 2.0 * z / (z * z - 1.0)).norm() < 1e-15);
        assert!(matches!(stieltjes_m0(&pair, c(1.0, 0.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn solve_mt_single_source_closed_form() {
        let d = AtomicMeasure::dirac(0.0);
        let z = c(0.0, 5.0);
        let m = solve_mt(&d, 1.0, z).unwrap();
        assert!((m - closed_single(1.0, z)).norm() < 1e-12);
        assert!((m - c(0.0, (5.0 - 41f64.sqrt()) / 4.0)).norm() < 1e-12);
    }

    #[test]
    fn solve_mt_at_time_zero() {
        let pair = AtomicMeasure::symmetric_pair(1.0).unwrap();
        let z = c(0.4, 0.2);
        assert_eq!(solve_mt(&pair, 0.0, z).unwrap(), stieltjes_m0(&pair, z).unwrap());
    }

    #[test]
    fn polynomial_route_agrees_with_continuation() {
        let mu = AtomicMeasure::new(vec![(-1.0, 0.2), (0.3, 0.5), (2.0, 0.3)]).unwrap();
        for &(t, re, im) in &[(0.1, 0.0, 0.5), (0.7, 1.0, 0.05), (2.0, -3.0, 2.0), (0.05, 0.31, 0.01)] {
            let z = c(re, im);
            let zeta = subordination_root(&mu, t, z).unwrap();
            let poly_m = (z - zeta) / (2.0 * t);
            let newton_m = newton_continuation(&mu, t, z, 256).unwrap();
            assert!((poly_m - newton_m).norm() < 1e-10, "t={t} z={z}");
        }
    }

    #[test]
    fn near_real_axis_inside_support() {
        // M_t(u + i0) for the semicircle: (u - i sqrt(16t - u^2)) / (4t).
        let d = AtomicMeasure::dirac(0.0);
        for &u in &[0.0, 1.5, -3.9, 3.99] {
            let m = solve_mt(&d, 1.0, c(u, 1e-6)).unwrap();
            let exact = c(u, -(16.0 - u * u).sqrt()) / 4.0;
            assert!((m - exact).norm() < 1e-3, "u={u}");
            let boundary = solve_mt(&d, 1.0, c(u, 0.0)).unwrap();
            assert!((boundary - exact).norm() < 1e-9, "u={u}");
        }
        // Outside the support the boundary value is real.
        let m = solve_mt(&d, 1.0, c(5.0, 0.0)).unwrap();
        assert!((m - 0.5).norm() < 1e-12);
        let m = solve_mt(&d, 1.0, c(-5.0, 0.0)).unwrap();
        assert!((m + 0.5).norm() < 1e-12);
    }

    #[test]
    fn lower_half_plane_by_conjugation() {
        let pair = AtomicMeasure::symmetric_pair(1.0).unwrap();
        let z = c(0.5, 0.8);
        let up = solve_mt(&pair, 0.3, z).unwrap();
        let down = solve_mt(&pair, 0.3, z.conj()).unwrap();
        assert!((up - down.conj()).norm() < 1e-14);
    }

    #[test]
    fn h_flow_single_source() {
        let d = AtomicMeasure::dirac(0.0);
        let z = c(0.7, 2.0);
        let t = 0.8;
        let h = solve_ht(&d, t, z).unwrap();
        let w = crate::special::lambert_w0(-4.0 * t / (z * z)).unwrap();
        let expected = 2.0 * c(0.0, 1.0) * t.sqrt() / w.sqrt();
        assert!((h - expected).norm() < 1e-8);
        assert_eq!(solve_ht(&d, 0.0, z).unwrap(), z);
        assert!(conservation_residual(&d, t, z).unwrap() < 1e-8);
    }

    #[test]
    fn map_g_large_z_expansion() {
        let d = AtomicMeasure::dirac(0.0);
        let t = 1.0;
        let z = c(60.0, 80.0);
        let g = map_g(&d, t, z).unwrap();
        // dg/dt = M_t(g) ~ 2/g, so g = z + 2t/z + O(|z|^-3).
        assert!((g - z - 2.0 * t / z).norm() < 50.0 / z.norm().powi(3));
    }

    #[test]
    fn map_g_hits_atom_inside_hull() {
        let d = AtomicMeasure::dirac(0.0);
        let res = map_g(&d, 1.0, c(0.0, 0.5));
        assert!(res.is_err());
    }

    #[test]
    fn inverse_flow_figure_values() {
        let d = AtomicMeasure::dirac(0.0);
        let edge = inverse_map_g(&d, 1.0, c(4.0, 0.0)).unwrap();
        assert!((edge - c(2.0 * E.sqrt(), 0.0)).norm() < 1e-6, "{edge}");
        let top = inverse_map_g(&d, 1.0, c(0.0, 0.0)).unwrap();
        assert!((top - c(0.0, 2.0 / E.sqrt())).norm() < 1e-6, "{top}");
        assert_eq!(inverse_map_g(&d, 0.0, c(1.0, 2.0)).unwrap(), c(1.0, 2.0));
    }

    #[test]
    fn density_semicircle_values() {
        let d = AtomicMeasure::dirac(0.0);
        let grid: Vec<f64> = (0..=800).map(|i| -5.0 + 10.0 * i as f64 / 800.0).collect();
        let p = density(&d, 1.0, &grid).unwrap();
        let at0 = p.density[400];
        assert!((at0 - 1.0 / (2.0 * PI)).abs() < 1e-6);
        assert!(*p.density.last().unwrap() < 1e-6);
        assert!((p.integral() - 1.0).abs() < 1e-3);
        assert_eq!(p.support.len(), 1);
        assert!((p.support[0].0 + 4.0).abs() < 1e-3);
        assert!((p.support[0].1 - 4.0).abs() < 1e-3);
    }

    #[test]
    fn density_two_source_support() {
        let pair = AtomicMeasure::symmetric_pair(1.0).unwrap();
        let grid: Vec<f64> = (0..=1000).map(|i| -2.5 + 5.0 * i as f64 / 1000.0).collect();
        let p = density(&pair, 0.1, &grid).unwrap();
        let (bm, bp) = crate::two_source::b_pm(0.1);
        assert_eq!(p.support.len(), 2);
        assert!((p.support[0].0 + bp).abs() < 1e-3);
        assert!((p.support[0].1 + bm).abs() < 1e-3);
        assert!((p.support[1].0 - bm).abs() < 1e-3);
        assert!((p.support[1].1 - bp).abs() < 1e-3);
        assert!((p.integral() - 1.0).abs() < 1e-3);
        for i in 0..p.density.len() {
            let j = p.density.len() - 1 - i;
            assert!((p.density[i] - p.density[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn rescaled_green_examples() {
        let d = AtomicMeasure::dirac(0.0);
        let z = c(0.3, 1.1);
        let base = solve_mt(&d, 0.7, z).unwrap();
        for &s in &[0.5, 1.0, 3.0] {
            assert!((rescaled_green(&d, 0.7, z, s).unwrap() - base).norm() < 1e-9);
        }
        let pair = AtomicMeasure::symmetric_pair(1.0).unwrap();
        let z = c(0.0, 2.0);
        let r = rescaled_green(&pair, 1.0, z, 10.0).unwrap();
        let lim = closed_single(1.0, z);
        assert!((r - lim).norm() / lim.norm() < 0.03);
        // Same functional equation for the pushed-forward measure.
        let s = 10.0;
        let pushed = pair.scaled(s);
        let resid = (r - stieltjes_m0(&pushed, z - 2.0 * r).unwrap()).norm();
        assert!(resid <= 1e-9);
    }

    #[test]
    fn general_hull_matches_single_source() {
        let d = AtomicMeasure::dirac(0.0);
        let curves = hull_boundary_general(&d, 1.0, 9).unwrap();
        assert_eq!(curves.len(), 1);
        let mid = curves[0].points[4];
        assert!((mid - c(0.0, 2.0 / E.sqrt())).norm() < 1e-5, "{mid}");
    }
}
