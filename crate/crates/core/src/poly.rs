//! Small dense polynomials with complex coefficients and a simultaneous
//! (Aberth–Ehrlich) root finder.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients in ascending order: `c[0] + c[1] x + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn constant(c: Complex64) -> Self {
        Poly(vec![c])
    }

    /// The monic linear factor `x - root`.
    pub fn linear(root: Complex64) -> Self {
        Poly(vec![-root, Complex64::new(1.0, 0.0)])
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let zero = Complex64::new(0.0, 0.0);
        Poly(
            (0..n)
                .map(|i| *self.0.get(i).unwrap_or(&zero) + *other.0.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    /// Value and derivative by Horner's scheme.
    pub fn eval_with_derivative(&self, x: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in self.0.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.eval_with_derivative(x).0
    }

    /// Drop (numerically) zero leading coefficients.
    fn trimmed(&self) -> Poly {
        let mut c = self.0.clone();
        while c.len() > 1 && c.last().map(|v| v.norm() == 0.0).unwrap_or(false) {
            c.pop();
        }
        Poly(c)
    }

    /// All complex roots, counted with multiplicity.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        aberth_roots(&self.trimmed())
    }
}

fn aberth_roots(p: &Poly) -> Result<Vec<Complex64>> {
    const OP: &str = "poly_roots";
    let n = p.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = p.0[n];
    if n == 1 {
        return Ok(vec![-p.0[0] / lead]);
    }
    // Cauchy bound for the initial circle.
    let radius = 1.0
        + p.0[..n]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0f64, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(0.5 * radius, theta)
        })
        .collect();

    let mut converged = vec![false; n];
    for _ in 0..500 {
        let mut all = true;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let (pv, dpv) = p.eval_with_derivative(z[i]);
            if pv.norm() == 0.0 {
                converged[i] = true;
                continue;
            }
            let ratio = pv / dpv;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            z[i] -= step;
            if step.norm() <= 1e-15 * z[i].norm().max(1e-300) {
                converged[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            return Ok(z);
        }
    }
    let residual = z.iter().map(|&x| p.eval(x).norm()).fold(0.0f64, f64::max);
    // Clusters of multiple roots converge slowly; accept a small residual.
    let scale: f64 = p.0.iter().map(|c| c.norm()).sum();
    if residual <= 1e-10 * scale {
        Ok(z)
    } else {
        Err(Error::NonConvergence { op: OP, residual })
    }
}

/// Real roots of a real cubic `a x^3 + b x^2 + c x + d`, sorted ascending.
///
/// One real root is bracketed and bisected, the remaining quadratic factor is
/// solved directly, and every root is Newton-polished. A quadratic factor with
/// discriminant above `-(imag_tol (1 + |r|))^2` is treated as having a double
/// real root, which keeps near-degenerate cases.
pub fn real_cubic_roots(a: f64, b: f64, c: f64, d: f64, imag_tol: f64) -> Result<Vec<f64>> {
    if a == 0.0 || ![a, b, c, d].iter().all(|v| v.is_finite()) {
        return Err(Error::BadConfig("real_cubic_roots: leading coefficient must be finite and nonzero".into()));
    }
    let (b, c, d) = (b / a, c / a, d / a);
    let p = |x: f64| ((x + b) * x + c) * x + d;
    let dp = |x: f64| (3.0 * x + 2.0 * b) * x + c;
    let bound = 1.0 + b.abs().max(c.abs()).max(d.abs());
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    let polish = |mut x: f64| {
        for _ in 0..4 {
            let f = p(x);
            let df = dp(x);
            if df == 0.0 || f == 0.0 {
                break;
            }
            let nx = x - f / df;
            if !nx.is_finite() || (nx - x).abs() > 1e-6 * (1.0 + x.abs()) || p(nx).abs() > f.abs() {
                break;
            }
            x = nx;
        }
        x
    };
    // x^3 + b x^2 + c x + d = (x - r)(x^2 + q1 x + q0)
    let q1 = b + r;
    let q0 = c + q1 * r;
    let disc = q1 * q1 - 4.0 * q0;
    let tol = imag_tol * (1.0 + r.abs());
    let mut out = vec![polish(r)];
    if disc >= -4.0 * tol * tol {
        let s = disc.max(0.0).sqrt();
        let big = -0.5 * (q1 + q1.signum() * s);
        if big != 0.0 {
            out.push(polish(big));
            out.push(polish(q0 / big));
        } else {
            out.push(polish(0.0));
            out.push(polish(0.0));
        }
    }
    out.sort_by(|x, y| x.total_cmp(y));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roots_of_product_of_factors() {
        let roots = [c(1.0, 2.0), c(-3.0, 0.5), c(0.25, -1.0), c(2.0, 0.0)];
        let p = roots
            .iter()
            .fold(Poly::constant(c(2.0, 1.0)), |acc, r| acc.mul(&Poly::linear(*r)));
        let mut found = p.roots().unwrap();
        for r in roots {
            let (idx, dist) = found
                .iter()
                .enumerate()
                .map(|(i, f)| (i, (f - r).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(dist < 1e-12, "root {r} missed by {dist}");
            found.remove(idx);
        }
    }

    #[test]
    fn real_cubic_with_double_root() {
        // (x - 1)^2 (x + 2)
        let roots = real_cubic_roots(1.0, 0.0, -3.0, 2.0, 1e-6).unwrap();
        assert_eq!(roots.len(), 3);
        assert!((roots[0] + 2.0).abs() < 1e-12);
        assert!((roots[1] - 1.0).abs() < 1e-6);
        assert!((roots[2] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn real_cubic_single_real_root() {
        // x^3 + x + 1 has one real root near -0.6823278
        let roots = real_cubic_roots(1.0, 0.0, 1.0, 1.0, 1e-9).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] + 0.682_327_803_828_019_3).abs() < 1e-14);
    }
}
