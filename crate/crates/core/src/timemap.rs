//! Maximal slopes, arch levels `z(r)`, `S(r)`, the singular integrals
//! `I`, `J`, the time maps `θ`, `α`, and the flat-core half-widths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::{Branch, Nonlinearity, Side};
use crate::quadrature::arch_integral;
use crate::roots::{brent, Tolerance};

/// Relative tolerance used when no [`Numerics`] is at hand.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Numerical knobs shared by the solver, profile and CLI layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub quad_tol: f64,
    pub scan_points: usize,
    /// Profile grid size `M`.
    pub grid: usize,
    pub ode_steps: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics { quad_tol: DEFAULT_QUAD_TOL, scan_points: 1024, grid: 2048, ode_steps: 100_000 }
    }
}

impl Numerics {
    pub fn check(&self) -> Result<()> {
        if !(self.quad_tol > 0.0 && self.quad_tol < 1e-2) {
            return Err(Error::InvalidParameter(format!("quad_tol must lie in (0, 1e-2), got {}", self.quad_tol)));
        }
        if self.scan_points < 16 {
            return Err(Error::InvalidParameter("scan_points must be at least 16".into()));
        }
        if self.grid < 8 {
            return Err(Error::InvalidParameter("grid must be at least 8".into()));
        }
        if self.ode_steps < 10 {
            return Err(Error::InvalidParameter("ode_steps must be at least 10".into()));
        }
        Ok(())
    }
}

/// Half-width of the logit range swept by slope scans: `ρ ∈ [1e-12, 1 - 1e-12]`
/// roughly.
pub const SCAN_SPAN: f64 = 27.631_021_115_928_547;

/// `n` logit abscissae, uniform on `[-SCAN_SPAN, SCAN_SPAN]`; map them to
/// relative slopes with [`logistic`].
pub fn slope_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| -SCAN_SPAN + 2.0 * SCAN_SPAN * k as f64 / (n - 1) as f64).collect()
}

pub fn logistic(s: f64) -> f64 {
    1.0 / (1.0 + (-s).exp())
}

/// A fixed `(p, f, λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub p: f64,
    pub nl: Nonlinearity,
    pub lambda: f64,
    pub numerics: Numerics,
}

impl Problem {
    pub fn new(p: f64, nl: Nonlinearity, lambda: f64) -> Result<Self> {
        Self::with_numerics(p, nl, lambda, Numerics::default())
    }

    pub fn with_numerics(p: f64, nl: Nonlinearity, lambda: f64, numerics: Numerics) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("p must be > 1, got {p}")));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be > 0, got {lambda}")));
        }
        numerics.check()?;
        Ok(Problem { p, nl, lambda, numerics })
    }

    /// The same problem at another `λ`.
    pub fn at_lambda(&self, lambda: f64) -> Result<Self> {
        Self::with_numerics(self.p, self.nl.clone(), lambda, self.numerics)
    }

    /// `((p-1)/(λp))^{1/p}`, the factor turning `I`, `J` into arch widths.
    pub fn kappa(&self) -> f64 {
        ((self.p - 1.0) / (self.lambda * self.p)).powf(1.0 / self.p)
    }

    pub fn tol(&self) -> f64 {
        self.numerics.quad_tol
    }

    pub fn area(&self, side: Side) -> f64 {
        let (ap, am) = self.nl.areas();
        match side {
            Side::Positive => ap,
            Side::Negative => am,
        }
    }

    /// Maximal slope of an arch on `side`: `r^p = λp/(p-1)·A`.
    pub fn slope_bound(&self, side: Side) -> f64 {
        (self.lambda * self.p / (self.p - 1.0) * self.area(side)).powf(1.0 / self.p)
    }

    /// The side whose area is smaller, i.e. whose bound is `r*`. Ties go to
    /// the positive side.
    pub fn star_side(&self) -> Side {
        let (ap, am) = self.nl.areas();
        if ap <= am {
            Side::Positive
        } else {
            Side::Negative
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeBounds {
    pub r_pos: f64,
    pub r_neg: f64,
    pub r_star: f64,
}

pub fn slope_bounds(problem: &Problem) -> SlopeBounds {
    let r_pos = problem.slope_bound(Side::Positive);
    let r_neg = problem.slope_bound(Side::Negative);
    SlopeBounds { r_pos, r_neg, r_star: r_pos.min(r_neg) }
}

/// A slope written as `r = ρ · r_bound(reference)`.
///
/// Keeping `ρ` and `1 - ρ` instead of `r` lets levels near the bound be
/// formed without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelSlope {
    pub rho: f64,
    /// `1 - ρ`, exact even when `ρ` rounds to one.
    pub complement: f64,
    pub reference: Side,
}

impl RelSlope {
    pub fn new(rho: f64, reference: Side) -> Self {
        RelSlope { rho, complement: 1.0 - rho, reference }
    }

    /// `ρ = 1/(1 + e^{-s})`.
    pub fn from_logit(s: f64, reference: Side) -> Self {
        RelSlope { rho: logistic(s), complement: logistic(-s), reference }
    }

    /// From `ρ` and `1 - ρ` stored separately, each exact on its own half.
    pub fn from_parts(rho: f64, complement: f64, reference: Side) -> Self {
        if rho < 0.5 {
            RelSlope { rho, complement: 1.0 - rho, reference }
        } else {
            RelSlope::with_complement(complement, reference)
        }
    }

    pub fn with_complement(complement: f64, reference: Side) -> Self {
        RelSlope { rho: 1.0 - complement, complement, reference }
    }

    pub fn ln_rho(&self) -> f64 {
        if self.complement < 0.5 {
            (-self.complement).ln_1p()
        } else {
            self.rho.ln()
        }
    }

    pub fn r(&self, problem: &Problem) -> f64 {
        self.rho * problem.slope_bound(self.reference)
    }
}

/// The energy level `c = r^p (p-1)/(λp)` of an arch on one side, with its
/// deficit `A - c` against that side's area.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Level {
    c: f64,
    deficit: f64,
}

fn level(problem: &Problem, side: Side, slope: RelSlope) -> Result<Level> {
    let p = problem.p;
    let a_side = problem.area(side);
    let a_ref = problem.area(slope.reference);
    let rho = slope.rho;
    if !(rho > 0.0) {
        return Err(out_of_range(problem, side, slope));
    }
    let ln_rho = slope.ln_rho();
    let c = a_ref * (p * ln_rho).exp();
    let deficit = if slope.reference == side {
        -a_side * (p * ln_rho).exp_m1()
    } else {
        a_side - c
    };
    if deficit < 0.0 || deficit.is_nan() {
        return Err(out_of_range(problem, side, slope));
    }
    Ok(Level { c, deficit })
}

fn out_of_range(problem: &Problem, side: Side, slope: RelSlope) -> Error {
    Error::OutOfRange { value: slope.r(problem), lower: 0.0, upper: problem.slope_bound(side) }
}

/// An arch top `a` with its depth `zero - a` below the branch zero. The
/// depth stays exact when `a` itself rounds to the zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchTop {
    pub top: f64,
    pub depth: f64,
}

impl ArchTop {
    pub fn at(branch: &Branch, top: f64) -> Self {
        ArchTop { top, depth: branch.zero() - top }
    }
}

/// Top `t ∈ (0, z]` of the arch with the given level: `A(t) = c`.
fn arch_top(branch: &Branch, lv: Level) -> Result<ArchTop> {
    let z = branch.zero();
    let area_z = lv.c + lv.deficit;
    if lv.deficit == 0.0 {
        return Ok(ArchTop { top: z, depth: 0.0 });
    }
    if lv.c <= 0.5 * area_z {
        let tol = Tolerance { rel: 1e-15, abs: 0.0, max_iter: 300 };
        let f = |t: f64| branch.area(t) - lv.c;
        let top = brent(f, 0.0, z, -lv.c, f(z), tol)?;
        Ok(ArchTop::at(branch, top))
    } else {
        // depth d = z - t from G_z(d) = A(z) - A(t), solved in ln d so that
        // depths far below the spacing of doubles near z are resolved
        let gap = branch.gap(z);
        let ln_deficit = lv.deficit.ln();
        let f = |t: f64| gap.ln_value(t.exp()) - ln_deficit;
        let hi = z.ln();
        let lo = hi - DEPTH_SPAN;
        let tol = Tolerance { rel: 0.0, abs: 1e-15, max_iter: 300 };
        let t = brent(f, lo, hi, f(lo), f(hi), tol)?;
        let depth = t.exp();
        Ok(ArchTop { top: z - depth, depth })
    }
}

/// Range of `ln(z/d)` searched for the depth of an arch top.
const DEPTH_SPAN: f64 = 700.0;

/// `∫₀^a G_a^{-1/p}` on one branch.
fn branch_integral(branch: &Branch, p: f64, top: ArchTop, tol: f64) -> Result<f64> {
    let z = branch.zero();
    let a = top.top;
    if !(a > 0.0 && a <= z) {
        return Err(Error::OutOfRange { value: a, lower: 0.0, upper: z });
    }
    arch_integral(&branch.gap_with_depth(a, top.depth), p, a, tol)
}

/// Arch top on `side` (positive coordinate, so `|S|` on the negative side).
pub fn arch_top_rel(problem: &Problem, side: Side, slope: RelSlope) -> Result<f64> {
    Ok(arch_top_exact(problem, side, slope)?.top)
}

/// [`arch_top_rel`] with the exact depth below the zero.
pub fn arch_top_exact(problem: &Problem, side: Side, slope: RelSlope) -> Result<ArchTop> {
    let lv = level(problem, side, slope)?;
    arch_top(problem.nl.branch(side), lv)
}

/// Half-width of an arch on `side`: `θ` on the positive side, `α` on the
/// negative one. At `ρ = 1` against the own bound this is `x(λ)` or `y(λ)`.
pub fn half_width(problem: &Problem, side: Side, slope: RelSlope) -> Result<f64> {
    let top = arch_top_exact(problem, side, slope)?;
    let i = branch_integral(problem.nl.branch(side), problem.p, top, problem.tol())?;
    Ok(problem.kappa() * i)
}

/// `z(r)`, the maximum of the positive arch launched with slope `r`.
pub fn z_of_r(problem: &Problem, r: f64) -> Result<f64> {
    own_side_top(problem, Side::Positive, r)
}

/// `S(r)`, the minimum of the negative arch launched with slope `r`.
pub fn s_of_r(problem: &Problem, r: f64) -> Result<f64> {
    own_side_top(problem, Side::Negative, r).map(|t| -t)
}

fn own_side_top(problem: &Problem, side: Side, r: f64) -> Result<f64> {
    let bound = problem.slope_bound(side);
    if !(r > 0.0 && r < bound) {
        return Err(Error::OutOfRange { value: r, lower: 0.0, upper: bound });
    }
    arch_top_rel(problem, side, RelSlope::new(r / bound, side))
}

/// `I(a) = ∫₀^a (F(t) - F(a) + (a^q - t^q)/q)^{-1/p} dt` for `0 < a <= z⁺`.
#[allow(non_snake_case)]
pub fn integral_I(nl: &Nonlinearity, p: f64, a: f64) -> Result<f64> {
    integral_i_tol(nl, p, a, DEFAULT_QUAD_TOL)
}

/// `J(a)`, the negative-side counterpart of [`integral_I`], for `z⁻ <= a < 0`.
#[allow(non_snake_case)]
pub fn integral_J(nl: &Nonlinearity, p: f64, a: f64) -> Result<f64> {
    integral_j_tol(nl, p, a, DEFAULT_QUAD_TOL)
}

pub fn integral_i_tol(nl: &Nonlinearity, p: f64, a: f64, tol: f64) -> Result<f64> {
    side_integral(nl, Side::Positive, p, a, tol)
}

pub fn integral_j_tol(nl: &Nonlinearity, p: f64, a: f64, tol: f64) -> Result<f64> {
    if !(a < 0.0 && a >= nl.z_minus()) {
        return Err(Error::OutOfRange { value: a, lower: nl.z_minus(), upper: 0.0 });
    }
    side_integral(nl, Side::Negative, p, -a, tol)
}

/// The branch integral on either side, in the positive coordinate.
pub fn side_integral(nl: &Nonlinearity, side: Side, p: f64, a: f64, tol: f64) -> Result<f64> {
    let branch = nl.branch(side);
    branch_integral(branch, p, ArchTop::at(branch, a), tol)
}

/// [`side_integral`] at a top with a known depth.
pub fn side_integral_at(nl: &Nonlinearity, side: Side, p: f64, top: ArchTop, tol: f64) -> Result<f64> {
    branch_integral(nl.branch(side), p, top, tol)
}

/// `θ(r) = κ I(z(r))` for `0 < r < r_pos`.
pub fn theta(problem: &Problem, r: f64) -> Result<f64> {
    own_side_width(problem, Side::Positive, r)
}

/// `α(r) = κ J(S(r))` for `0 < r < r_neg`.
pub fn alpha(problem: &Problem, r: f64) -> Result<f64> {
    own_side_width(problem, Side::Negative, r)
}

fn own_side_width(problem: &Problem, side: Side, r: f64) -> Result<f64> {
    let bound = problem.slope_bound(side);
    if !(r > 0.0 && r < bound) {
        return Err(Error::OutOfRange { value: r, lower: 0.0, upper: bound });
    }
    half_width(problem, side, RelSlope::new(r / bound, side))
}

/// `(x(λ), y(λ)) = (κ I(z⁺), κ J(z⁻))`, finite only for `p > 2`.
pub fn flat_core_half_widths(problem: &Problem) -> Result<(f64, f64)> {
    if problem.p <= 2.0 {
        return Err(Error::Divergent(format!("flat cores need p > 2, got p = {}", problem.p)));
    }
    let x = half_width(problem, Side::Positive, RelSlope::new(1.0, Side::Positive))?;
    let y = half_width(problem, Side::Negative, RelSlope::new(1.0, Side::Negative))?;
    Ok((x, y))
}

/// Arch extrema reached at the common bound `r*`; independent of `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointLevels {
    pub z_hat: f64,
    pub s_hat: f64,
}

pub fn endpoint_levels(nl: &Nonlinearity, _p: f64) -> EndpointLevels {
    let (ap, am) = nl.areas();
    if ap <= am {
        let lv = Level { c: ap, deficit: am - ap };
        let s = arch_top(nl.branch(Side::Negative), lv).expect("level below the negative area").top;
        EndpointLevels { z_hat: nl.z_plus(), s_hat: -s }
    } else {
        let lv = Level { c: am, deficit: ap - am };
        let z = arch_top(nl.branch(Side::Positive), lv).expect("level below the positive area").top;
        EndpointLevels { z_hat: z, s_hat: nl.z_minus() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::Family;

    fn cubic(b_plus: f64, b_minus: f64) -> Nonlinearity {
        Nonlinearity::new(Family::PowerAsym { b_plus, b_minus, r_exp: 4.0 }, 2.0).unwrap()
    }

    #[test]
    fn bounds_for_cubic() {
        let pr = Problem::new(2.0, cubic(1.0, 1.0), 1.0).unwrap();
        let b = slope_bounds(&pr);
        assert!((b.r_pos - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(b.r_pos, b.r_neg);
        assert_eq!(b.r_star, b.r_pos);
        let b2 = slope_bounds(&pr.at_lambda(2.0).unwrap());
        assert!((b2.r_pos / b.r_pos - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn level_closed_form() {
        // 0.25 = z² - z⁴/2 at r = 0.5, p = q = 2
        let pr = Problem::new(2.0, cubic(1.0, 1.0), 1.0).unwrap();
        let expect = (1.0 - 0.5f64.sqrt()).sqrt();
        assert!((z_of_r(&pr, 0.5).unwrap() - expect).abs() < 1e-14);
        assert!((s_of_r(&pr, 0.5).unwrap() + expect).abs() < 1e-14);
        assert!(matches!(z_of_r(&pr, 0.8), Err(Error::OutOfRange { .. })));
        assert!(matches!(z_of_r(&pr, 0.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn level_limits() {
        let pr = Problem::new(2.0, cubic(1.0, 1.0), 1.0).unwrap();
        let rb = pr.slope_bound(Side::Positive);
        assert!(z_of_r(&pr, 1e-9 * rb).unwrap() < 1e-8);
        let near = z_of_r(&pr, rb * (1.0 - 1e-14)).unwrap();
        assert!(near < 1.0 && near > 1.0 - 1e-5, "{near}");
    }

    #[test]
    fn endpoint_levels_asymmetric() {
        let nl = cubic(2.0, 1.0);
        let el = endpoint_levels(&nl, 3.0);
        assert_eq!(el.z_hat, nl.z_plus());
        let expect = -(1.0 - 0.5f64.sqrt()).sqrt();
        assert!((el.s_hat - expect).abs() < 1e-14, "{}", el.s_hat);
        let odd = cubic(1.0, 1.0);
        let el = endpoint_levels(&odd, 3.0);
        assert_eq!((el.z_hat, el.s_hat), (1.0, -1.0));
    }

    #[test]
    fn divergent_double_zero() {
        let nl = cubic(1.0, 1.0);
        assert!(matches!(integral_I(&nl, 2.0, 1.0), Err(Error::Divergent(_))));
        assert!(integral_I(&nl, 3.0, 1.0).unwrap().is_finite());
        let pr = Problem::new(2.0, nl, 1.0).unwrap();
        assert!(matches!(flat_core_half_widths(&pr), Err(Error::Divergent(_))));
    }

    #[test]
    fn cubic_small_amplitude_limit() {
        // q = p = 2: I(a) → √2 · π/2 as a → 0
        let nl = cubic(1.0, 1.0);
        let i = integral_I(&nl, 2.0, 1e-5).unwrap();
        let lim = 2f64.sqrt() * std::f64::consts::FRAC_PI_2;
        assert!((i - lim).abs() < 1e-8, "{i} {lim}");
    }

    #[test]
    fn cubic_complete_elliptic() {
        // p = q = 2, f = s³: I(a) = √2 / √(1 - a²/2) · K(m), m = a²/(2 - a²)
        let nl = cubic(1.0, 1.0);
        let a: f64 = 0.9;
        let m = a * a / (2.0 - a * a);
        // arithmetic-geometric mean: K(m) = π / (2 agm(1, √(1-m)))
        let (mut x, mut y) = (1.0f64, (1.0 - m).sqrt());
        for _ in 0..30 {
            let (nx, ny) = (0.5 * (x + y), (x * y).sqrt());
            x = nx;
            y = ny;
        }
        let k = std::f64::consts::PI / (2.0 * x);
        let expect = 2f64.sqrt() * k / (1.0 - a * a / 2.0).sqrt();
        let got = integral_I(&nl, 2.0, a).unwrap();
        assert!((got / expect - 1.0).abs() < 1e-12, "{got} {expect}");
    }

    #[test]
    fn tops_below_double_spacing() {
        // for p near 2 the half-width keeps growing after the top rounds to z
        let pr = Problem::new(2.03, cubic(1.0, 1.0), 1.0).unwrap();
        let w: Vec<f64> = [40.0, 200.0, 600.0]
            .iter()
            .map(|&s| half_width(&pr, Side::Positive, RelSlope::from_logit(s, Side::Positive)).unwrap())
            .collect();
        let end = flat_core_half_widths(&pr).unwrap().0;
        assert!(w[0] < w[1] && w[1] < w[2] && w[2] < end, "{w:?} {end}");
        let top = arch_top_exact(&pr, Side::Positive, RelSlope::from_logit(200.0, Side::Positive)).unwrap();
        assert_eq!(top.top, pr.nl.z_plus());
        assert!(top.depth > 0.0);
    }

    #[test]
    fn near_double_zero_layer() {
        // I(z⁺ - ε) approaches the finite endpoint value like ε^{1/3} for p = 3
        let nl = cubic(1.0, 1.0);
        let end = integral_I(&nl, 3.0, 1.0).unwrap();
        let d12 = end - integral_I(&nl, 3.0, 1.0 - 1e-12).unwrap();
        let d15 = end - integral_I(&nl, 3.0, 1.0 - 1e-15).unwrap();
        assert!(d12 > 0.0 && d12 < 1e-3 * end, "{d12}");
        assert!((d12 / d15 / 10.0 - 1.0).abs() < 0.05, "{}", d12 / d15);
        // and grows like ln(1/ε) with unit slope for p = 2, f = s³
        let at = |e: f64| integral_I(&nl, 2.0, 1.0 - e).unwrap();
        let (i6, i8, i10) = (at(1e-6), at(1e-8), at(1e-10));
        let step = 100f64.ln();
        assert!(((i8 - i6) / step - 1.0).abs() < 1e-4, "{}", (i8 - i6) / step);
        assert!(((i10 - i8) / step - 1.0).abs() < 1e-4, "{}", (i10 - i8) / step);
    }
}
