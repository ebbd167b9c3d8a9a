//! Critical points of a profile and the smoothness they allow.

use serde::{Deserialize, Serialize};

use crate::timemap::Problem;

use super::{PieceKind, Profile};

/// `|h| < Z_TOL` puts a critical value in the zero set of `h`.
pub const Z_TOL: f64 = 1e-10;
/// Offsets used for the derivative-limit ratios.
pub const DELTAS: [f64; 3] = [1e-2, 1e-3, 1e-4];
const MAX_ORDER: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothnessClass {
    /// `C²` on all of `[0, 1]`.
    C2,
    /// `C^{1,1/(p-1)}`, and `C²` away from critical points where `h` does not vanish.
    C1AlphaC2OffNonzeroCritical,
    /// `C^{1,1/(p-1)}`, and `C²` away from all critical points.
    C1AlphaC2OffCritical,
}

/// Where a critical point sits in the layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    ArchTop,
    PlateauStart,
    PlateauEnd,
}

/// Derivative-limit measurements at one critical point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCheck {
    /// `|ψ_x(χ ∓ δ)| / δ^{1/(p-1)}` for each of [`DELTAS`].
    pub ratios: [f64; 3],
    pub extrapolated: f64,
    /// `((1/(p-1))|h(ψ(χ))|)^{1/(p-1)}`.
    pub predicted_limit: f64,
    /// `|h(ψ(χ))|^{1/(p-1)}`, the limit implied by the first integral
    /// `|ψ_x|^p = p/(p-1)·(H(ψ(χ)) - H(ψ))`.
    pub energy_limit: f64,
    pub rel_err_predicted: f64,
    pub rel_err_energy: f64,
    /// `|ψ_x|/δ` at the smallest offset; tends to zero at `C²` points of the zero set.
    pub linear_ratio: f64,
    /// `ψ_xx = -h(ψ)|ψ_x|^{2-p}/(p-1)` at the smallest offset.
    pub psi_xx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub chi: f64,
    pub kind: CriticalKind,
    pub value: f64,
    /// `λ(|s|^{q-2}s - f(s))` at `s = ψ(χ)`.
    pub h: f64,
    pub in_zero_set: bool,
    /// Order of the zero of `h`, when in the zero set.
    pub order: Option<u32>,
    /// Whether the profile is `C²` at this point.
    pub c2: bool,
    /// `p = 2(n+1)` exactly: the borderline between the two cases.
    pub boundary_case: bool,
    pub limit: LimitCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub p: f64,
    pub critical: Vec<CriticalPoint>,
    pub flat_intervals: Vec<[f64; 2]>,
    /// Sign changes of the sampled `φ_x`, as a cross-check on the arch tops.
    pub grid_sign_changes: usize,
    pub smoothness_class: SmoothnessClass,
}

impl RegularityReport {
    pub fn arch_tops(&self) -> impl Iterator<Item = &CriticalPoint> {
        self.critical.iter().filter(|c| c.kind == CriticalKind::ArchTop)
    }
}

fn h_scaled(problem: &Problem, s: f64) -> f64 {
    problem.lambda * problem.nl.reaction(s)
}

/// Order of vanishing of `h` at `s`, from the decay of `h` toward `s` from
/// the side of zero.
fn zero_order(problem: &Problem, s: f64) -> u32 {
    let dir = -s.signum();
    let mut eps = 1e-2 * s.abs().max(1e-3);
    // below this, h is dominated by cancellation between its two terms
    let noise = 1e-9 * problem.lambda * (s.abs().powf(problem.nl.q() - 1.0) + problem.nl.f(s).abs());
    let mut last = None;
    for _ in 0..6 {
        let a = h_scaled(problem, s + dir * eps).abs();
        let b = h_scaled(problem, s + dir * eps * 0.5).abs();
        if b > noise {
            last = Some((a / b).log2());
        }
        eps *= 0.25;
    }
    let n = last.map_or(MAX_ORDER as f64, |v| v.round());
    (n.max(1.0) as u32).min(MAX_ORDER)
}

/// Aitken extrapolation of three values, falling back to the last one when
/// the sequence is not geometrically convergent.
fn aitken(v: [f64; 3]) -> f64 {
    let d1 = v[1] - v[0];
    let d2 = v[2] - v[1];
    let den = d2 - d1;
    if den == 0.0 || d1 == 0.0 || (d2 / d1).abs() >= 1.0 {
        return v[2];
    }
    let x = v[2] - d2 * d2 / den;
    if x.is_finite() && (x - v[2]).abs() <= (d2.abs()).max(1e-300) * 10.0 {
        x
    } else {
        v[2]
    }
}

fn measure(problem: &Problem, profile: &Profile, chi: f64, dir: f64, h: f64) -> LimitCheck {
    let p = problem.p;
    let e = 1.0 / (p - 1.0);
    let mut ratios = [0.0; 3];
    for (slot, &d) in ratios.iter_mut().zip(&DELTAS) {
        *slot = profile.dphi_at(chi + dir * d).abs() / d.powf(e);
    }
    let extrapolated = aitken(ratios);
    let predicted_limit = (h.abs() / (p - 1.0)).powf(e);
    let energy_limit = h.abs().powf(e);
    let rel = |lim: f64| if lim > 0.0 { (extrapolated - lim).abs() / lim } else { extrapolated };
    let d = DELTAS[2];
    let (v, dv) = profile.eval(chi + dir * d);
    let psi_xx = if dv == 0.0 {
        if p > 2.0 { f64::NAN } else { 0.0 }
    } else {
        -h_scaled(problem, v) * dv.abs().powf(2.0 - p) / (p - 1.0)
    };
    LimitCheck {
        ratios,
        extrapolated,
        predicted_limit,
        energy_limit,
        rel_err_predicted: rel(predicted_limit),
        rel_err_energy: rel(energy_limit),
        linear_ratio: dv.abs() / d,
        psi_xx,
    }
}

/// Locates the critical set of a profile, tests each point against the zero
/// set of `h`, and classifies the smoothness by comparing `p` with `2` and
/// `2(n+1)`.
pub fn classify_regularity(problem: &Problem, profile: &Profile) -> RegularityReport {
    let p = problem.p;
    let mut spots: Vec<(f64, CriticalKind, f64)> = Vec::new();
    if let Some(layout) = &profile.layout {
        for (k, pc) in layout.pieces.iter().enumerate() {
            let next = layout.pieces.get(k + 1).map(|n| n.kind);
            match (pc.kind, next) {
                (PieceKind::Rise, Some(PieceKind::Fall)) => spots.push((pc.x1, CriticalKind::ArchTop, -1.0)),
                (PieceKind::Flat, _) => {
                    spots.push((pc.x0, CriticalKind::PlateauStart, -1.0));
                    spots.push((pc.x1, CriticalKind::PlateauEnd, 1.0));
                }
                _ => {}
            }
        }
    } else {
        for i in 0..profile.x.len() - 1 {
            let (a, b) = (profile.dphi[i], profile.dphi[i + 1]);
            if a != 0.0 && b != 0.0 && a.signum() != b.signum() {
                let chi = profile.x[i] + (profile.x[i + 1] - profile.x[i]) * a / (a - b);
                spots.push((chi, CriticalKind::ArchTop, -1.0));
            }
        }
    }
    let grid_sign_changes = profile
        .dphi
        .windows(2)
        .filter(|w| w[0] != 0.0 && w[1] != 0.0 && w[0].signum() != w[1].signum())
        .count();

    let mut critical = Vec::with_capacity(spots.len());
    for (chi, kind, dir) in spots {
        let value = profile.phi_at(chi);
        let h = h_scaled(problem, value);
        let in_zero_set = h.abs() < Z_TOL;
        let order = in_zero_set.then(|| zero_order(problem, value));
        let (c2, boundary_case) = match order {
            _ if p <= 2.0 => (true, false),
            Some(n) => {
                let edge = 2.0 * (n as f64 + 1.0);
                (p < edge, p == edge)
            }
            None => (false, false),
        };
        let limit = measure(problem, profile, chi, dir, h);
        critical.push(CriticalPoint { chi, kind, value, h, in_zero_set, order, c2, boundary_case, limit });
    }
    let smoothness_class = if p <= 2.0 {
        SmoothnessClass::C2
    } else if critical.iter().any(|c| c.in_zero_set) && critical.iter().filter(|c| c.in_zero_set).all(|c| c.c2) {
        SmoothnessClass::C1AlphaC2OffNonzeroCritical
    } else {
        SmoothnessClass::C1AlphaC2OffCritical
    };
    RegularityReport {
        p,
        critical,
        flat_intervals: profile.flat_intervals.clone(),
        grid_sign_changes,
        smoothness_class,
    }
}
