//! Double-exponential quadrature and the singular arch integrals
//! `∫₀^{u_max} G(u)^{-1/p} du` built on it.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::nonlinearity::Gap;

/// Largest abscissa in the transformed variable; weights beyond it are below 1e-37.
const T_MAX: f64 = 4.0;
/// Level cap: 2⁻¹⁷ spacing on `[-4, 4]` is 2²⁰ nodes.
const MAX_LEVEL: usize = 17;
const MIN_LEVEL: usize = 3;

/// Node data for `t >= 0` at one level: `(fraction, weight factor)` where the
/// node sits at `width * fraction` from the left end (and its mirror at
/// `width * (1 - fraction)`), with weight `width * factor`.
type Level = Vec<(f64, f64)>;

fn levels() -> &'static [Level] {
    static TABLE: OnceLock<Vec<Level>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=MAX_LEVEL)
            .map(|k| {
                let h = 0.5f64.powi(k as i32);
                let n = (T_MAX / h).ceil() as usize;
                (0..=n)
                    .filter(|j| k == 0 || j % 2 == 1)
                    .map(|j| {
                        let t = j as f64 * h;
                        let e = (-PI * t.sinh()).exp();
                        let frac = e / (1.0 + e);
                        let factor = PI * t.cosh() * e / ((1.0 + e) * (1.0 + e));
                        (frac, factor)
                    })
                    .filter(|&(frac, factor)| frac > 0.0 && factor > 0.0)
                    .collect()
            })
            .collect()
    })
}

/// Tanh-sinh rule on `[0, width]` with level doubling.
///
/// The integrand receives the abscissa `w` measured from the left end.
/// Stops when two successive levels agree to `tol` relative (at least
/// [`MIN_LEVEL`] levels), or fails after 2²⁰ nodes.
pub fn tanh_sinh<F>(mut f: F, width: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if width == 0.0 {
        return Ok(0.0);
    }
    let table = levels();
    let mut sum = 0.0;
    let mut prev = f64::NAN;
    let mut h = 1.0;
    for (k, level) in table.iter().enumerate() {
        if k > 0 {
            h *= 0.5;
        }
        let mut add = 0.0;
        for &(frac, factor) in level {
            if frac == 0.5 {
                add += factor * f(0.5 * width);
            } else {
                let left = width * frac;
                add += factor * (f(left) + f(width - left));
            }
        }
        if !add.is_finite() {
            return Err(Error::QuadratureFailure { estimate: sum * width * h, change: f64::NAN });
        }
        sum += add;
        let estimate = sum * width * h;
        if k >= MIN_LEVEL {
            let change = (estimate - prev).abs();
            if change <= tol * estimate.abs() {
                return Ok(estimate);
            }
            if k == MAX_LEVEL {
                return Err(Error::QuadratureFailure { estimate, change });
            }
        }
        prev = estimate;
    }
    unreachable!("level loop always returns")
}

/// The integrand of `∫₀^{u_max} G(u)^{-1/p} du` after removing the endpoint
/// singularity.
///
/// The substitution `u = w^β` uses `β = p/(p-1)` for a simple zero of `G`
/// and `β = p/(p-2)` for a double zero (only integrable for `p > 2`). When
/// `h(a)` is small the crossover between the two regimes is a thin layer
/// near `u = 0`; [`ArchIntegrand::breakpoints`] then splits the `w` interval
/// geometrically from the layer outwards.
#[derive(Debug, Clone)]
pub struct ArchIntegrand<'a> {
    gap: Gap<'a>,
    beta: f64,
    inv_p: f64,
    u_max: f64,
    layer: Option<f64>,
}

impl<'a> ArchIntegrand<'a> {
    pub fn new(gap: Gap<'a>, p: f64, u_max: f64) -> Result<Self> {
        let double = gap.is_double_zero();
        if double && p <= 2.0 {
            return Err(Error::Divergent(format!("double zero at a = {} with p = {p} <= 2", gap.anchor())));
        }
        let layer = if double {
            None
        } else {
            let h0 = gap.h_at_anchor();
            let h1 = gap.h_slope_at_anchor().abs();
            let d_star = if h1 > 0.0 { 2.0 * h0 / h1 } else { f64::INFINITY };
            (d_star < 0.05 * u_max).then_some(d_star)
        };
        let beta = if double || (p > 2.0 && layer.is_some()) { p / (p - 2.0) } else { p / (p - 1.0) };
        Ok(ArchIntegrand { gap, beta, inv_p: 1.0 / p, u_max, layer })
    }

    pub fn gap(&self) -> &Gap<'a> {
        &self.gap
    }

    /// `u` as a function of the integration variable `w`.
    pub fn u_of_w(&self, w: f64) -> f64 {
        w.powf(self.beta)
    }

    pub fn w_of_u(&self, u: f64) -> f64 {
        u.powf(1.0 / self.beta)
    }

    pub fn w_max(&self) -> f64 {
        self.w_of_u(self.u_max)
    }

    /// `β w^{β-1} G(w^β)^{-1/p}`, bounded on `[0, w_max]`.
    pub fn eval(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let lw = w.ln();
        let lu = (self.beta * lw).min(self.u_max.ln());
        let lg = self.gap.ln_value_log(lu);
        self.beta * ((self.beta - 1.0) * lw - self.inv_p * lg).exp()
    }

    /// Subinterval edges in `w`, from `0` to `w_max`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let w_max = self.w_max();
        let mut edges = vec![0.0];
        if let Some(d_star) = self.layer {
            let mut w = self.w_of_u(d_star);
            while w < w_max {
                edges.push(w);
                w *= 16.0;
            }
        }
        // for large β the integrand varies in a layer of width ~1/β below
        // w_max; split it where u halves in powers of four
        if self.beta > 4.0 {
            let shrink = 4f64.powf(-1.0 / self.beta);
            let floor = edges.last().copied().unwrap_or(0.0);
            let mut w = w_max * shrink;
            for _ in 0..8 {
                if w <= floor {
                    break;
                }
                edges.push(w);
                w *= shrink;
            }
            edges.sort_by(f64::total_cmp);
        }
        edges.push(w_max);
        edges
    }

    /// `∫_{lo}^{hi}` of [`ArchIntegrand::eval`].
    pub fn integrate(&self, lo: f64, hi: f64, tol: f64) -> Result<f64> {
        tanh_sinh(|x| self.eval(lo + x), hi - lo, tol)
    }

    /// `∫₀^{u_max} G^{-1/p}`.
    pub fn total(&self, tol: f64) -> Result<f64> {
        let edges = self.breakpoints();
        let mut total = 0.0;
        for pair in edges.windows(2) {
            total += self.integrate(pair[0], pair[1], tol)?;
        }
        Ok(total)
    }
}

/// `∫₀^{u_max} G(u)^{-1/p} du` for a gap anchored at a zero of `G`.
pub fn arch_integral(gap: &Gap<'_>, p: f64, u_max: f64, tol: f64) -> Result<f64> {
    if u_max <= 0.0 {
        return Ok(0.0);
    }
    ArchIntegrand::new(gap.clone(), p, u_max)?.total(tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_polynomial() {
        let v = tanh_sinh(|x| x * x, 2.0, 1e-12).unwrap();
        assert!((v - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singularities() {
        // ∫₀¹ x^{-1/2} dx = 2, ∫₀¹ ln x dx = -1
        let v = tanh_sinh(|x| x.powf(-0.5), 1.0, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-12, "{v}");
        let v = tanh_sinh(|x| x.ln(), 1.0, 1e-12).unwrap();
        assert!((v + 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn quarter_circle() {
        let v = tanh_sinh(|x| (1.0 - x * x).max(0.0).sqrt(), 1.0, 1e-12).unwrap();
        assert!((v - PI / 4.0).abs() < 1e-13);
    }
}
