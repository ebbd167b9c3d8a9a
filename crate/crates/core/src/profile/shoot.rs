//! Initial value integration from `x = 0`, used as an independent check of
//! reconstructed profiles.

use crate::error::{Error, Result};
use crate::nonlinearity::Side;
use crate::timemap::Problem;

use super::Profile;

/// Integrates `φ' = sign(w)|w|^{1/(p-1)}`, `w' = -λ(|φ|^{q-2}φ - f(φ))`
/// with classical RK4 on `steps` uniform steps of `[0, 1]`, starting from
/// `φ(0) = 0`, `φ'(0) = ±r`.
pub fn shoot(problem: &Problem, r: f64, sign: Side, steps: usize) -> Result<Profile> {
    if steps == 0 || !(r > 0.0) {
        return Err(Error::InvalidParameter("shooting needs r > 0 and at least one step".into()));
    }
    let p = problem.p;
    let inv = 1.0 / (p - 1.0);
    let lambda = problem.lambda;
    let nl = &problem.nl;
    let limit = 10.0 * nl.z_plus().abs().max(nl.z_minus().abs());
    let rhs = |phi: f64, w: f64| -> (f64, f64) { (w.signum() * w.abs().powf(inv), -lambda * nl.reaction(phi)) };

    let h = 1.0 / steps as f64;
    let mut x = Vec::with_capacity(steps + 1);
    let mut phi = Vec::with_capacity(steps + 1);
    let mut dphi = Vec::with_capacity(steps + 1);
    let (mut u, mut w) = (0.0, sign.sign() * r.powf(p - 1.0));
    for i in 0..=steps {
        let xi = i as f64 * h;
        x.push(xi);
        phi.push(u);
        dphi.push(w.signum() * w.abs().powf(inv));
        if i == steps {
            break;
        }
        let (k1u, k1w) = rhs(u, w);
        let (k2u, k2w) = rhs(u + 0.5 * h * k1u, w + 0.5 * h * k1w);
        let (k3u, k3w) = rhs(u + 0.5 * h * k2u, w + 0.5 * h * k2w);
        let (k4u, k4w) = rhs(u + h * k3u, w + h * k3w);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        if !u.is_finite() || u.abs() > limit {
            return Err(Error::Blowup { x: xi + h, value: u });
        }
    }
    let mut nodes = Vec::new();
    for i in 1..steps.saturating_sub(1) {
        let (a, b) = (phi[i], phi[i + 1]);
        if a != 0.0 && a.signum() != b.signum() {
            nodes.push(x[i] + h * a / (a - b));
        }
    }
    Ok(Profile {
        x,
        phi,
        dphi,
        flat_intervals: Vec::new(),
        nodes,
        class: None,
        r,
        problem: problem.clone(),
        layout: None,
    })
}
