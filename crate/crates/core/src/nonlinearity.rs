//! The nonlinearity `f`, its antiderivative, its zeros `z⁺`, `z⁻`, and the
//! hypothesis checks the time-map construction relies on.
//!
//! Every quantity on the negative half-line is computed on a mirrored
//! [`Branch`]: with `τ = -s` the negative side of `|s|^{q-2}s - f(s)` becomes
//! the positive side of `τ^{q-1} - f̃(τ)` where `f̃(τ) = -f(-τ)`. All integrals
//! and level equations are then written once, for a positive half-line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{brent, Tolerance};

/// Number of Taylor coefficients kept when expanding `h` about a point.
const TAYLOR_TERMS: usize = 40;
/// Offsets `u` with `u <= TAYLOR_REACH * a` use the series for the gap.
const TAYLOR_REACH: f64 = 0.2;

/// Built-in families of `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `f(s) = b⁺ s^{r-1}` for `s >= 0` and `f(s) = -b⁻ |s|^{r-1}` for `s < 0`.
    PowerAsym { b_plus: f64, b_minus: f64, r_exp: f64 },
    /// `f(s) = Σ c_k s^k`, `coeffs[0]` multiplying `s¹`.
    Polynomial { coeffs: Vec<f64> },
}

/// JSON fragment describing a nonlinearity.
///
/// `q` may be omitted here when the surrounding problem file carries it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

/// Which half-line a quantity lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Positive => Side::Negative,
            Side::Negative => Side::Positive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Positive => "positive",
            Side::Negative => "negative",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum BranchLaw {
    Power { b: f64, m: f64 },
    Poly { coeffs: Vec<f64> },
}

/// `f` restricted to one half-line, written in the positive coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    law: BranchLaw,
    q: f64,
    zero: f64,
}

/// Taylor coefficients `s^e` about `a`: `binom(e, k) a^{e-k}`.
fn power_taylor(e: f64, a: f64, scale: f64, out: &mut [f64]) {
    let mut c = scale * a.powf(e);
    for (k, slot) in out.iter_mut().enumerate() {
        *slot += c;
        c *= (e - k as f64) / (k + 1) as f64;
    }
}

impl Branch {
    fn new(law: BranchLaw, q: f64) -> Self {
        Branch { law, q, zero: f64::NAN }
    }

    /// The branch of `f ≡ 0`, which has no zero.
    pub(crate) fn pure_power(q: f64) -> Self {
        Branch::new(BranchLaw::Poly { coeffs: Vec::new() }, q)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// First zero of `h` on this half-line (`z⁺` or `|z⁻|`).
    pub fn zero(&self) -> f64 {
        self.zero
    }

    pub fn f(&self, s: f64) -> f64 {
        match &self.law {
            BranchLaw::Power { b, m } => b * s.powf(*m),
            BranchLaw::Poly { coeffs } => {
                coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c) * s
            }
        }
    }

    /// `F(s) = ∫₀^s f`.
    pub fn antiderivative(&self, s: f64) -> f64 {
        match &self.law {
            BranchLaw::Power { b, m } => b * s.powf(m + 1.0) / (m + 1.0),
            BranchLaw::Poly { coeffs } => {
                let mut acc = 0.0;
                for (k, c) in coeffs.iter().enumerate().rev() {
                    acc = acc * s + c / (k + 2) as f64;
                }
                acc * s * s
            }
        }
    }

    /// `h(s) = s^{q-1} - f(s)`.
    pub fn h(&self, s: f64) -> f64 {
        s.powf(self.q - 1.0) - self.f(s)
    }

    /// `g(s) = f(s) / s^{q-1}`.
    pub fn g(&self, s: f64) -> f64 {
        match &self.law {
            BranchLaw::Power { b, m } => b * s.powf(m - (self.q - 1.0)),
            BranchLaw::Poly { .. } => self.f(s) / s.powf(self.q - 1.0),
        }
    }

    /// `A(s) = s^q/q - F(s)`, the area between `h` and the axis on `(0, s)`.
    pub fn area(&self, s: f64) -> f64 {
        s.powf(self.q) / self.q - self.antiderivative(s)
    }

    /// `h^{(k)}(a) a^k / k!` for `k < out.len()`, computed from the analytic
    /// laws. The `a^k` scaling keeps the coefficients finite for tiny `a`.
    fn taylor_raw(&self, a: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|c| *c = 0.0);
        power_taylor(self.q - 1.0, a, 1.0, out);
        match &self.law {
            BranchLaw::Power { b, m } => power_taylor(*m, a, -b, out),
            BranchLaw::Poly { coeffs } => {
                for (i, c) in coeffs.iter().enumerate() {
                    let n = i + 1;
                    let mut binom = 1.0;
                    let an = a.powi(n as i32);
                    for (k, slot) in out.iter_mut().enumerate().take(n + 1) {
                        *slot -= c * binom * an;
                        binom = binom * (n - k) as f64 / (k + 1) as f64;
                    }
                }
            }
        }
    }

    /// Scaled Taylor coefficients `h^{(k)}(a) a^k / k!` of `h` about `a`. Near the zero the constant term is
    /// re-expanded about the zero itself, where `h` vanishes exactly, so that
    /// `h(a)` keeps full relative accuracy as `a → zero`.
    pub fn taylor_h(&self, a: f64) -> [f64; TAYLOR_TERMS] {
        self.taylor_h_depth(a, self.zero - a)
    }

    /// As [`Branch::taylor_h`] with the depth `d = zero - a` given exactly,
    /// which matters once `d` drops below the spacing of doubles near the zero.
    fn taylor_h_depth(&self, a: f64, d: f64) -> [f64; TAYLOR_TERMS] {
        let mut out = [0.0; TAYLOR_TERMS];
        self.taylor_raw(a, &mut out);
        let z = self.zero;
        if z.is_finite() {
            if d == 0.0 {
                out[0] = 0.0;
            } else if d > 0.0 && d <= TAYLOR_REACH * z {
                let mut at_zero = [0.0; TAYLOR_TERMS];
                self.taylor_raw(z, &mut at_zero);
                let mut pw = 1.0;
                let mut sum = 0.0;
                for c in at_zero.iter().skip(1) {
                    pw *= -d / z;
                    sum += c * pw;
                }
                out[0] = sum;
            }
        }
        out
    }

    /// The gap `G_a(a - u) = ∫_{a-u}^{a} h` as a reusable evaluator.
    pub fn gap(&self, a: f64) -> Gap<'_> {
        Gap::new(self, a, self.zero - a)
    }

    /// The gap anchored at `a` whose depth `zero - a` is known exactly as `d`.
    pub fn gap_with_depth(&self, a: f64, d: f64) -> Gap<'_> {
        Gap::new(self, a, d)
    }
}

/// Below `ln u = LN_TINY` only the leading series term of `G` is used.
const LN_TINY: f64 = -650.0;

/// `u ↦ G_a(a-u) = (a^q - t^q)/q - (F(a) - F(t))`, `t = a - u`, evaluated
/// without cancellation for small `u`.
#[derive(Debug, Clone)]
pub struct Gap<'a> {
    branch: &'a Branch,
    a: f64,
    /// `(-1)^k c_k a^k / (k+1)`, the series of `G/u` in powers of `u/a`.
    series: [f64; TAYLOR_TERMS],
    double_zero: bool,
    a_term: f64,
}

impl<'a> Gap<'a> {
    fn new(branch: &'a Branch, a: f64, depth: f64) -> Self {
        let c = branch.taylor_h_depth(a, depth);
        let mut series = [0.0; TAYLOR_TERMS];
        let mut sign = 1.0;
        for k in 0..TAYLOR_TERMS {
            series[k] = sign * c[k] / (k + 1) as f64;
            sign = -sign;
        }
        let double_zero = c[0] == 0.0;
        let a_term = a.powf(branch.q) / branch.q - branch.antiderivative(a);
        Gap { branch, a, series, double_zero, a_term }
    }

    pub fn anchor(&self) -> f64 {
        self.a
    }

    /// `true` when `h(a) = 0`, i.e. the anchor is the branch zero.
    pub fn is_double_zero(&self) -> bool {
        self.double_zero
    }

    /// Value of `h(a)` used by the series.
    pub fn h_at_anchor(&self) -> f64 {
        self.series[0]
    }

    /// `h'(a)`.
    pub fn h_slope_at_anchor(&self) -> f64 {
        -2.0 * self.series[1] / self.a
    }

    fn series_eval(&self, v: f64, skip: usize) -> f64 {
        self.series[skip..].iter().rev().fold(0.0, |acc, c| acc * v + c)
    }

    pub fn value(&self, u: f64) -> f64 {
        if u <= TAYLOR_REACH * self.a {
            u * self.series_eval(u / self.a, 0)
        } else {
            let t = self.a - u;
            self.a_term - (t.max(0.0).powf(self.branch.q) / self.branch.q - self.branch.antiderivative(t.max(0.0)))
        }
    }

    /// `ln G` at `u = e^{ln_u}`, continuing the leading term of the series
    /// once `u` underflows.
    pub fn ln_value_log(&self, ln_u: f64) -> f64 {
        if ln_u > LN_TINY {
            return self.ln_value(ln_u.exp());
        }
        if self.double_zero {
            2.0 * ln_u - self.a.ln() + self.series[1].ln()
        } else {
            ln_u + self.series[0].ln()
        }
    }

    /// `ln G`, accurate down to `u` of the order of the smallest normal number.
    pub fn ln_value(&self, u: f64) -> f64 {
        if u <= TAYLOR_REACH * self.a {
            let v = u / self.a;
            if self.double_zero {
                u.ln() + (u.ln() - self.a.ln()) + self.series_eval(v, 1).ln()
            } else {
                u.ln() + self.series_eval(v, 0).ln()
            }
        } else {
            self.value(u).ln()
        }
    }
}

/// A validated (or, through [`Nonlinearity::new_unchecked`], merely
/// constructed) nonlinearity.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity {
    family: Family,
    q: f64,
    pos: Branch,
    neg: Branch,
}

impl Nonlinearity {
    /// Builds the nonlinearity, locates `z^±` and validates the hypotheses.
    pub fn new(family: Family, q: f64) -> Result<Self> {
        let nl = Self::new_unchecked(family, q)?;
        let report = nl.validate();
        if !report.pass {
            return Err(Error::HypothesisViolated(report.summary()));
        }
        Ok(nl)
    }

    pub fn from_spec(spec: &NonlinearitySpec, q: f64) -> Result<Self> {
        Self::new(spec.family.clone(), q)
    }

    /// Builds the nonlinearity and locates `z^±` without running the
    /// hypothesis checks.
    pub fn new_unchecked(family: Family, q: f64) -> Result<Self> {
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::InvalidParameter(format!("q must be > 1, got {q}")));
        }
        let (pos, neg) = match &family {
            Family::PowerAsym { b_plus, b_minus, r_exp } => {
                if !(*b_plus > 0.0 && *b_minus > 0.0) {
                    return Err(Error::InvalidParameter("b_plus and b_minus must be > 0".into()));
                }
                if !(*r_exp > 1.0) || !r_exp.is_finite() {
                    return Err(Error::InvalidParameter(format!("r_exp must be > 1, got {r_exp}")));
                }
                let m = r_exp - 1.0;
                (
                    Branch::new(BranchLaw::Power { b: *b_plus, m }, q),
                    Branch::new(BranchLaw::Power { b: *b_minus, m }, q),
                )
            }
            Family::Polynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidParameter("polynomial needs finite coefficients".into()));
                }
                let mirrored = coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| if (i + 1) % 2 == 1 { *c } else { -c })
                    .collect();
                (
                    Branch::new(BranchLaw::Poly { coeffs: coeffs.clone() }, q),
                    Branch::new(BranchLaw::Poly { coeffs: mirrored }, q),
                )
            }
        };
        let mut nl = Nonlinearity { family, q, pos, neg };
        nl.pos.zero = first_zero(&nl.pos).ok_or(Error::NoZeroFound { side: "positive" })?;
        nl.neg.zero = first_zero(&nl.neg).ok_or(Error::NoZeroFound { side: "negative" })?;
        Ok(nl)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn z_plus(&self) -> f64 {
        self.pos.zero
    }

    pub fn z_minus(&self) -> f64 {
        -self.neg.zero
    }

    pub fn branch(&self, side: Side) -> &Branch {
        match side {
            Side::Positive => &self.pos,
            Side::Negative => &self.neg,
        }
    }

    pub fn f(&self, s: f64) -> f64 {
        if s >= 0.0 {
            self.pos.f(s)
        } else {
            -self.neg.f(-s)
        }
    }

    /// `F(s) = ∫₀^s f`.
    #[allow(non_snake_case)]
    pub fn F(&self, s: f64) -> f64 {
        if s >= 0.0 {
            self.pos.antiderivative(s)
        } else {
            self.neg.antiderivative(-s)
        }
    }

    pub fn g(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Err(Error::DomainError);
        }
        Ok(self.f(s) / (s.abs().powf(self.q - 2.0) * s))
    }

    /// `|s|^{q-2}s - f(s)`.
    pub fn reaction(&self, s: f64) -> f64 {
        s.signum() * s.abs().powf(self.q - 1.0) - self.f(s)
    }

    /// `(A(z⁺), A(z⁻))` with `A(z) = |z|^q/q - F(z)`.
    pub fn areas(&self) -> (f64, f64) {
        (self.pos.area(self.pos.zero), self.neg.area(self.neg.zero))
    }

    pub fn is_odd(&self) -> bool {
        self.pos == self.neg
    }

    /// Runs the grid-based hypothesis checks.
    pub fn validate(&self) -> HypothesisReport {
        let mut checks = Vec::new();
        let mut limits = [f64::NAN; 2];
        for (i, side) in [Side::Positive, Side::Negative].into_iter().enumerate() {
            let br = self.branch(side);
            let z = br.zero;
            let tag = if side == Side::Positive { "plus" } else { "minus" };
            let res = br.h(z).abs();
            let scale = z.powf(self.q - 1.0).max(1.0);
            checks.push(Check::new(
                format!("zero_{tag}"),
                res <= 1e-12 * scale,
                format!("|h(z)| = {res:e} at z = {}", side.sign() * z),
                None,
            ));
            let grid = two_sided_geometric(z, 256, 1e-6);
            let mut violation = None;
            let mut prev = br.g(grid[0]);
            for &s in &grid[1..] {
                let cur = br.g(s);
                if !(cur > prev) {
                    violation = Some(side.sign() * s);
                    break;
                }
                prev = cur;
            }
            let dir = if side == Side::Positive { "increasing on (0, z+)" } else { "decreasing on (z-, 0)" };
            checks.push(Check::new(
                format!("g_monotone_{tag}"),
                violation.is_none(),
                match violation {
                    None => format!("g strictly {dir}"),
                    Some(s) => format!("g not strictly {dir}; first violation at s = {s}"),
                },
                violation,
            ));
            let l = endpoint_limit(br);
            limits[i] = l;
            checks.push(Check::new(
                format!("limit_{tag}_negative"),
                l < 0.0,
                format!("estimated L = {l}"),
                if l < 0.0 { None } else { Some(side.sign() * z) },
            ));
        }
        let small = 1e-6 * self.z_plus().min(-self.z_minus());
        for (side, tag) in [(Side::Positive, "plus"), (Side::Negative, "minus")] {
            let br = self.branch(side);
            let g0 = br.g(small).abs();
            let g1 = br.g(10.0 * small).abs();
            let decays = g0 < 1e-12 || (g1 > 0.0 && (g1 / g0).log10() > 0.01 && g0 < 1.0);
            checks.push(Check::new(
                format!("g_vanishes_at_zero_{tag}"),
                decays,
                format!("|g({:e})| = {g0:e}, |g({:e})| = {g1:e}", side.sign() * small, side.sign() * 10.0 * small),
                if decays { None } else { Some(side.sign() * small) },
            ));
        }
        let pass = checks.iter().all(|c| c.pass);
        HypothesisReport { pass, checks, l_plus: limits[0], l_minus: limits[1] }
    }
}

/// Geometric spacing toward both ends of `(0, z)`.
fn two_sided_geometric(z: f64, n: usize, eps: f64) -> Vec<f64> {
    let span = (1.0 / eps).ln();
    (0..n)
        .map(|i| {
            let s = -span + 2.0 * span * i as f64 / (n - 1) as f64;
            z / (1.0 + (-s).exp())
        })
        .collect()
}

/// Richardson-extrapolated limit of `h(s) / (s^{q-1} - z^{q-1})` as `s → z⁻`.
fn endpoint_limit(br: &Branch) -> f64 {
    let z = br.zero;
    let q = br.q;
    let quotient = |delta: f64| {
        let s = z * (1.0 - delta);
        br.h(s) / (s.powf(q - 1.0) - z.powf(q - 1.0))
    };
    let (d0, d1, d2) = (1e-3, 1e-4, 1e-5);
    let (q0, q1, q2) = (quotient(d0), quotient(d1), quotient(d2));
    let r01 = (10.0 * q1 - q0) / 9.0;
    let r12 = (10.0 * q2 - q1) / 9.0;
    (100.0 * r12 - r01) / 99.0
}

/// First sign change of `h` on the branch: geometric bracket expansion from
/// 1e-3, Brent, then one Newton polish.
fn first_zero(br: &Branch) -> Option<f64> {
    let mut lo = 1e-3;
    let mut h_lo = br.h(lo);
    if h_lo == 0.0 {
        return Some(lo);
    }
    let mut hi = lo;
    let mut h_hi = h_lo;
    let limit = lo * 2f64.powi(40);
    while h_hi.signum() == h_lo.signum() {
        lo = hi;
        h_lo = h_hi;
        hi *= 2.0;
        if hi > limit || !h_hi.is_finite() {
            return None;
        }
        h_hi = br.h(hi);
    }
    let tol = Tolerance { rel: 1e-15, abs: 0.0, max_iter: 300 };
    let mut z = brent(|s| br.h(s), lo, hi, h_lo, h_hi, tol).ok()?;
    let mut c = [0.0; 2];
    br.taylor_raw(z, &mut c);
    if c[1] != 0.0 {
        let step = z * c[0] / c[1];
        if step.abs() < 1e-8 * z {
            z -= step;
        }
    }
    Some(z)
}

/// One hypothesis check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<f64>,
}

impl Check {
    fn new(name: String, pass: bool, detail: String, location: Option<f64>) -> Self {
        Check { name, pass, detail, location }
    }
}

/// Outcome of [`Nonlinearity::validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub pass: bool,
    pub checks: Vec<Check>,
    pub l_plus: f64,
    pub l_minus: f64,
}

impl HypothesisReport {
    pub fn summary(&self) -> String {
        let failed: Vec<_> = self.checks.iter().filter(|c| !c.pass).map(|c| c.detail.as_str()).collect();
        if failed.is_empty() {
            "all checks pass".into()
        } else {
            failed.join("; ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> Nonlinearity {
        Nonlinearity::new(Family::PowerAsym { b_plus: 1.0, b_minus: 1.0, r_exp: 4.0 }, 2.0).unwrap()
    }

    #[test]
    fn symmetric_cubic_zeros() {
        let nl = cubic();
        assert!((nl.z_plus() - 1.0).abs() < 1e-15);
        assert!((nl.z_minus() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn asymmetric_cubic_zeros() {
        let nl = Nonlinearity::new(Family::PowerAsym { b_plus: 2.0, b_minus: 1.0, r_exp: 4.0 }, 2.0).unwrap();
        assert!((nl.z_plus() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((nl.z_minus() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn subcritical_power_rejected() {
        let err = Nonlinearity::new(Family::PowerAsym { b_plus: 1.0, b_minus: 1.0, r_exp: 2.0 }, 3.0).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated(_)), "{err:?}");
    }

    #[test]
    fn eval_f_antiderivative_g() {
        let nl = cubic();
        assert_eq!(nl.F(0.5), 0.015625);
        assert!((nl.g(0.5).unwrap() - 0.25).abs() < 1e-16);
        assert_eq!(nl.F(0.0), 0.0);
        assert_eq!(nl.g(0.0), Err(Error::DomainError));
        assert_eq!(nl.f(-0.5), -0.125);
    }

    #[test]
    fn areas_match_closed_forms() {
        let (ap, am) = cubic().areas();
        assert!((ap - 0.25).abs() < 1e-15 && (am - 0.25).abs() < 1e-15);
        let nl = Nonlinearity::new(Family::PowerAsym { b_plus: 2.0, b_minus: 1.0, r_exp: 4.0 }, 2.0).unwrap();
        let (ap, am) = nl.areas();
        assert!((ap - 0.125).abs() < 1e-15);
        assert!((am - 0.25).abs() < 1e-15);
        assert!(ap < am);
    }

    #[test]
    fn validate_reports_limits() {
        let rep = cubic().validate();
        assert!(rep.pass, "{}", rep.summary());
        // (q - r)/(q - 1) = -2 for the cubic with q = 2
        assert!((rep.l_plus + 2.0).abs() < 1e-6, "{}", rep.l_plus);
        assert_eq!(rep.l_plus, rep.l_minus);

        let quad = Nonlinearity::new(Family::PowerAsym { b_plus: 1.0, b_minus: 1.0, r_exp: 3.0 }, 2.0).unwrap();
        let rep = quad.validate();
        assert!(rep.pass);
        assert!((rep.l_plus + 1.0).abs() < 1e-6);
    }

    #[test]
    fn non_monotone_polynomial_fails_with_location() {
        // g(s) = 3s² - 4.5s⁴ + 2s⁶ rises, falls on (1/√2, 1), then rises to 1
        let nl = Nonlinearity::new_unchecked(Family::Polynomial { coeffs: vec![0.0, 0.0, 3.0, 0.0, -4.5, 0.0, 2.0] }, 2.0)
            .unwrap();
        let rep = nl.validate();
        assert!(!rep.pass);
        let bad = rep.checks.iter().find(|c| c.name == "g_monotone_plus").unwrap();
        let loc = bad.location.unwrap();
        assert!(loc > 0.5f64.sqrt() - 0.02 && loc < 1.0, "{loc}");
    }

    #[test]
    fn linear_term_breaks_vanishing_g() {
        let nl = Nonlinearity::new_unchecked(Family::Polynomial { coeffs: vec![0.5, 0.0, 0.5] }, 2.0).unwrap();
        let rep = nl.validate();
        assert!(!rep.checks.iter().find(|c| c.name == "g_vanishes_at_zero_plus").unwrap().pass);
    }

    #[test]
    fn missing_zero() {
        // f = s² has no negative balance point: |s|^{q-2}s - f(s) < 0 for all s < 0
        let err = Nonlinearity::new_unchecked(Family::Polynomial { coeffs: vec![0.0, 1.0] }, 2.0).unwrap_err();
        assert_eq!(err, Error::NoZeroFound { side: "negative" });
    }

    #[test]
    fn polynomial_matches_power() {
        let poly = Nonlinearity::new(Family::Polynomial { coeffs: vec![0.0, 0.0, 1.0] }, 2.0).unwrap();
        let pow = cubic();
        for s in [-0.9, -0.3, 0.2, 0.7] {
            assert!((poly.f(s) - pow.f(s)).abs() < 1e-15);
            assert!((poly.F(s) - pow.F(s)).abs() < 1e-15);
        }
        assert!((poly.z_minus() - pow.z_minus()).abs() < 1e-15);
    }

    #[test]
    fn gap_series_and_direct_agree() {
        let nl = Nonlinearity::new(Family::PowerAsym { b_plus: 2.0, b_minus: 1.0, r_exp: 4.5 }, 2.5).unwrap();
        for side in [Side::Positive, Side::Negative] {
            let br = nl.branch(side);
            for a in [0.3 * br.zero(), 0.97 * br.zero(), br.zero()] {
                let gap = br.gap(a);
                let u = TAYLOR_REACH * a;
                let series = gap.value(u);
                let t = a - u;
                let direct = br.area(a) - br.area(t);
                assert!((series / direct - 1.0).abs() < 1e-12, "{side:?} a={a} {series} {direct}");
            }
        }
    }

    #[test]
    fn gap_near_double_zero_keeps_relative_accuracy() {
        let nl = cubic();
        let br = nl.branch(Side::Positive);
        let gap = br.gap(1.0);
        assert!(gap.is_double_zero());
        // G_1(1-u) = u² - u³ + u⁴/4 for f = s³, q = 2
        for u in [1e-3, 1e-7, 1e-12] {
            let exact = u * u * (1.0 - u + u * u / 4.0);
            assert!((gap.value(u) / exact - 1.0).abs() < 1e-14, "u={u}");
            assert!((gap.ln_value(u) - exact.ln()).abs() < 1e-12);
        }
        // u² underflows here but the logarithm does not
        assert!((gap.ln_value(1e-200) - 2.0 * 1e-200f64.ln()).abs() < 1e-12);
        // h(1 - d) = (1-d) - (1-d)³ keeps relative accuracy for tiny d
        let a = 1.0 - 1e-11;
        let exact = a * (1.0 - a) * (1.0 + a);
        assert!((br.gap(a).h_at_anchor() / exact - 1.0).abs() < 1e-13);
    }
}
