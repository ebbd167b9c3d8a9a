//! Per-class solution enumeration at fixed `λ` from the arch matching
//! conditions.
//!
//! A solution in class `S_j^±` is a chain of `j` arches alternating in sign,
//! starting with sign `±`. With `n₊` positive and `n₋` negative arches all
//! launched with the same slope `r`, the chain closes at `x = 1` when
//! `2(n₊θ(r) + n₋α(r)) = 1`. For `p > 2` and a chain that is too short even
//! at the maximal slope, the remaining length is spent on flat plateaus.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bifurcation::{continuum_dimension, AreaRelation};
use crate::error::{Error, Result};
use crate::nonlinearity::Side;
use crate::roots::{brent, golden_min, Tolerance};
use crate::timemap::{half_width, logistic, slope_grid, Problem, RelSlope};

/// Extremal residuals at or below this are reported as one tangent root.
pub const TANGENT_TOL: f64 = 1e-11;
/// Roots closer than this (relative to the slope bound) are merged.
const MERGE_TOL: f64 = 1e-9;
/// At most this many discrete extrema are refined per class.
const MAX_REFINED: usize = 16;

/// `S_j^±`: `j - 1` interior zeros, initial slope of sign `sign`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SolutionClass {
    pub j: usize,
    pub sign: Side,
}

impl SolutionClass {
    pub fn new(j: usize, sign: Side) -> Self {
        assert!(j >= 1, "class index starts at 1");
        SolutionClass { j, sign }
    }

    /// `(n₊, n₋)`, the number of positive and negative arches.
    pub fn arch_counts(&self) -> (usize, usize) {
        let j = self.j;
        let (own, other) = (j.div_ceil(2), j / 2);
        match self.sign {
            Side::Positive => (own, other),
            Side::Negative => (other, own),
        }
    }

    /// The side whose slope bound limits the class: its own side for
    /// `j = 1`, otherwise the side with the smaller area.
    pub fn reference(&self, problem: &Problem) -> Side {
        if self.j == 1 {
            self.sign
        } else {
            problem.star_side()
        }
    }
}

impl fmt::Display for SolutionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign == Side::Positive { '+' } else { '-' };
        write!(f, "S{}{}", self.j, s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Regular,
    FlatCore,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Regular => "regular",
            Kind::FlatCore => "flat_core",
        }
    }
}

/// Which arches carry the plateaus of a flat-core family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoreSide {
    Positive,
    Negative,
    Alternating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDescriptor {
    pub id: String,
    pub class: SolutionClass,
    pub kind: Kind,
    /// `|φ_x(0)|`.
    pub r: f64,
    /// `r` relative to the class's slope bound.
    pub rho: f64,
    /// `1 - ρ` at full precision.
    pub rho_complement: f64,
    /// Matching residual at `r` (zero budget for a flat core).
    pub residual: f64,
    /// Root where the residual touches zero without crossing.
    pub tangent: bool,
    pub core_budget: f64,
    pub core_count: usize,
    pub core_side: Option<CoreSide>,
    pub continuum_dim: usize,
}

impl SolutionDescriptor {
    pub fn slope(&self, problem: &Problem) -> RelSlope {
        RelSlope::from_parts(self.rho, self.rho_complement, self.class.reference(problem))
    }
}

/// Readable, content-addressed id: class, kind and a digest of
/// `(j, sign, kind, r to 12 significant digits)`.
pub fn descriptor_id(class: SolutionClass, kind: Kind, r: f64) -> String {
    let canonical = format!("{}|{}|{}|{:.11e}", class.j, class.sign.as_str(), kind.as_str(), r);
    let digest = Sha256::digest(canonical.as_bytes());
    let hex: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
    let sign = if class.sign == Side::Positive { 'p' } else { 'm' };
    format!("s{}{}-{}-{}", class.j, sign, kind.as_str().replace('_', "-"), hex)
}

/// Time maps `(θ, α)` at the relative slope `slope`.
fn maps(problem: &Problem, slope: RelSlope, need: (bool, bool)) -> Result<(f64, f64)> {
    let th = if need.0 { half_width(problem, Side::Positive, slope)? } else { 0.0 };
    let al = if need.1 { half_width(problem, Side::Negative, slope)? } else { 0.0 };
    Ok((th, al))
}

fn combine(counts: (usize, usize), th: f64, al: f64) -> f64 {
    let mut w = 0.0;
    if counts.0 > 0 {
        w += counts.0 as f64 * th;
    }
    if counts.1 > 0 {
        w += counts.1 as f64 * al;
    }
    2.0 * w - 1.0
}

/// `2(n₊θ(r) + n₋α(r)) - 1` for the class at slope `r`.
pub fn matching_residual(problem: &Problem, class: SolutionClass, r: f64) -> Result<f64> {
    let reference = class.reference(problem);
    let bound = problem.slope_bound(reference);
    if !(r > 0.0 && r < bound) {
        return Err(Error::OutOfRange { value: r, lower: 0.0, upper: bound });
    }
    residual_rel(problem, class, RelSlope::new(r / bound, reference))
}

/// Matching residual at a descriptor's stored slope. Unlike
/// [`matching_residual`] this keeps the full precision of `1 - ρ` for roots
/// packed against the slope bound.
pub fn descriptor_residual(problem: &Problem, d: &SolutionDescriptor) -> Result<f64> {
    residual_rel(problem, d.class, d.slope(problem))
}

fn residual_rel(problem: &Problem, class: SolutionClass, slope: RelSlope) -> Result<f64> {
    let counts = class.arch_counts();
    let (th, al) = maps(problem, slope, (counts.0 > 0, counts.1 > 0))?;
    Ok(combine(counts, th, al))
}

/// `θ`, `α` sampled on the logit slope grid against one reference bound.
#[derive(Debug, Clone)]
struct MapScan {
    reference: Side,
    s: Vec<f64>,
    theta: Option<Vec<f64>>,
    alpha: Option<Vec<f64>>,
    /// `(θ, α)` at `ρ = 1`, only for `p > 2`.
    end: Option<(f64, f64)>,
}

impl MapScan {
    fn new(problem: &Problem, reference: Side, need: (bool, bool)) -> Result<Self> {
        let s = slope_grid(problem.numerics.scan_points);
        let mut theta = need.0.then(Vec::new);
        let mut alpha = need.1.then(Vec::new);
        for &sk in &s {
            let (th, al) = maps(problem, RelSlope::from_logit(sk, reference), need)?;
            if let Some(v) = theta.as_mut() {
                v.push(th);
            }
            if let Some(v) = alpha.as_mut() {
                v.push(al);
            }
        }
        let end = if problem.p > 2.0 { Some(maps(problem, RelSlope::new(1.0, reference), need)?) } else { None };
        Ok(MapScan { reference, s, theta, alpha, end })
    }

    fn covers(&self, need: (bool, bool)) -> bool {
        (!need.0 || self.theta.is_some()) && (!need.1 || self.alpha.is_some())
    }

    fn residuals(&self, counts: (usize, usize)) -> Vec<f64> {
        (0..self.s.len())
            .map(|k| {
                let th = self.theta.as_ref().map_or(0.0, |v| v[k]);
                let al = self.alpha.as_ref().map_or(0.0, |v| v[k]);
                combine(counts, th, al)
            })
            .collect()
    }
}

/// Enumerates solutions class by class, sharing time-map scans between
/// classes with the same slope bound.
pub struct Solver<'a> {
    problem: &'a Problem,
    scans: Vec<MapScan>,
}

impl<'a> Solver<'a> {
    pub fn new(problem: &'a Problem) -> Self {
        Solver { problem, scans: Vec::new() }
    }

    fn scan(&mut self, reference: Side, need: (bool, bool)) -> Result<&MapScan> {
        if let Some(k) = self.scans.iter().position(|m| m.reference == reference && m.covers(need)) {
            return Ok(&self.scans[k]);
        }
        // widen to both maps when the bound is shared by several classes
        let need = if reference == self.problem.star_side() { (true, true) } else { need };
        self.scans.retain(|m| m.reference != reference);
        self.scans.push(MapScan::new(self.problem, reference, need)?);
        Ok(self.scans.last().expect("just pushed"))
    }

    pub fn solve_class(&mut self, class: SolutionClass) -> Result<Vec<SolutionDescriptor>> {
        let problem = self.problem;
        let counts = class.arch_counts();
        let reference = class.reference(problem);
        let bound = problem.slope_bound(reference);
        let scan = self.scan(reference, (counts.0 > 0, counts.1 > 0))?.clone();
        let values = scan.residuals(counts);
        let eval = |s: f64| residual_rel(problem, class, RelSlope::from_logit(s, reference));

        // samples (s, value, tangent); the endpoint ρ = 1 is s = +∞
        let mut pts: Vec<(f64, f64, bool)> = scan.s.iter().zip(&values).map(|(&s, &v)| (s, v, false)).collect();
        let n = pts.len();
        let mut extrema: Vec<(usize, f64)> = Vec::new();
        for k in 1..n - 1 {
            let (a, b, c) = (values[k - 1], values[k], values[k + 1]);
            let is_min = b < a && b <= c;
            let is_max = b > a && b >= c;
            if !(is_min || is_max) {
                continue;
            }
            let step = (a - b).abs().max((c - b).abs());
            let near_zero = b.abs() <= 4.0 * step || b.abs() <= 1e-6;
            // a minimum above zero or a maximum below it can hide a root pair
            let hides = (is_min && b > 0.0) || (is_max && b < 0.0) || b.abs() <= TANGENT_TOL;
            if near_zero && hides {
                extrema.push((k, b.abs()));
            }
        }
        extrema.sort_by(|x, y| x.1.total_cmp(&y.1));
        extrema.truncate(MAX_REFINED);
        for &(k, _) in &extrema {
            let is_min = values[k] < values[k - 1];
            let sign = if is_min { 1.0 } else { -1.0 };
            let f = |s: f64| eval(s).map(|v| sign * v).unwrap_or(f64::INFINITY);
            let (sm, vm) = golden_min(f, scan.s[k - 1], scan.s[k + 1], 1e-10);
            let vm = sign * vm;
            if vm.abs() <= TANGENT_TOL {
                pts.push((sm, 0.0, true));
            } else if vm.signum() != values[k].signum() || (vm.abs() < values[k].abs()) {
                pts.push((sm, vm, false));
            }
        }
        if let Some((th, al)) = scan.end {
            let v = combine(counts, th, al);
            pts.push((f64::INFINITY, if v.abs() <= TANGENT_TOL { 0.0 } else { v }, false));
        }
        pts.sort_by(|x, y| x.0.total_cmp(&y.0));

        // roots: exact zeros, then strict sign changes between nonzero samples
        let mut roots: Vec<(f64, bool)> = Vec::new();
        for w in 0..pts.len() {
            let (s, v, tangent) = pts[w];
            if v == 0.0 {
                roots.push((s, tangent));
                continue;
            }
            if w + 1 < pts.len() {
                let (s2, v2, _) = pts[w + 1];
                if v2 != 0.0 && v.signum() != v2.signum() {
                    let hi = if s2.is_infinite() { SPAN_BEYOND } else { s2 };
                    let f = |x: f64| eval(x).unwrap_or(f64::NAN);
                    let mut f_hi = f(hi);
                    // a root past the last representable slope sits at the endpoint value
                    let beyond = s2.is_infinite() && f_hi.signum() == v.signum();
                    if beyond {
                        f_hi = v2;
                    }
                    let g = |x: f64| if beyond && x >= SPAN_BEYOND { v2 } else { f(x) };
                    let tol = Tolerance { rel: 1e-15, abs: 1e-14, max_iter: 200 };
                    let x = brent(g, s, hi, v, f_hi, tol)?;
                    roots.push((x, false));
                }
            }
        }
        roots.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, bool)> = Vec::new();
        for (s, tangent) in roots {
            match merged.last_mut() {
                Some(last) if (logistic(s) - logistic(last.0)).abs() <= MERGE_TOL => {
                    last.1 = true;
                    if tangent {
                        last.0 = s;
                    }
                }
                _ => merged.push((s, tangent)),
            }
        }

        let mut out = Vec::new();
        for (s, tangent) in merged {
            let slope = RelSlope::from_logit(s, reference);
            let rho = slope.rho;
            let residual = residual_rel(problem, class, slope)?;
            let r = rho * bound;
            out.push(SolutionDescriptor {
                id: descriptor_id(class, Kind::Regular, r),
                class,
                kind: Kind::Regular,
                r,
                rho,
                rho_complement: slope.complement,
                residual,
                tangent,
                core_budget: 0.0,
                core_count: 0,
                core_side: None,
                continuum_dim: 0,
            });
        }
        if let Some((th, al)) = scan.end {
            let v = combine(counts, th, al);
            if v < 0.0 && v.abs() > TANGENT_TOL {
                out.push(flat_core_descriptor(problem, class, bound, -v));
            }
        }
        Ok(out)
    }

    /// All classes `j <= j_max` of both signs, ordered by `(j, sign, r)`.
    pub fn enumerate(&mut self, j_max: usize) -> Result<Enumeration> {
        let mut descriptors = Vec::new();
        for j in 1..=j_max {
            for sign in [Side::Positive, Side::Negative] {
                descriptors.extend(self.solve_class(SolutionClass::new(j, sign))?);
            }
        }
        Ok(Enumeration { lambda: self.problem.lambda, trivial: true, descriptors })
    }
}

/// Upper logit bound used when bracketing against the endpoint `ρ = 1`.
const SPAN_BEYOND: f64 = 600.0;

fn flat_core_descriptor(problem: &Problem, class: SolutionClass, bound: f64, budget: f64) -> SolutionDescriptor {
    let (np, nm) = class.arch_counts();
    let (side, count) = if class.j == 1 {
        let side = if class.sign == Side::Positive { CoreSide::Positive } else { CoreSide::Negative };
        (side, 1)
    } else {
        match AreaRelation::of(&problem.nl) {
            AreaRelation::PlusSmaller => (CoreSide::Positive, np),
            AreaRelation::MinusSmaller => (CoreSide::Negative, nm),
            AreaRelation::Equal => (CoreSide::Alternating, np + nm),
        }
    };
    let dim = continuum_dimension(class.j, class.sign, AreaRelation::of(&problem.nl));
    debug_assert_eq!(dim + 1, count);
    SolutionDescriptor {
        id: descriptor_id(class, Kind::FlatCore, bound),
        class,
        kind: Kind::FlatCore,
        r: bound,
        rho: 1.0,
        rho_complement: 0.0,
        residual: 0.0,
        tangent: false,
        core_budget: budget,
        core_count: count,
        core_side: Some(side),
        continuum_dim: dim,
    }
}

/// Output of [`enumerate`]: the trivial solution is always present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    pub lambda: f64,
    pub trivial: bool,
    pub descriptors: Vec<SolutionDescriptor>,
}

pub fn solve_class(problem: &Problem, class: SolutionClass) -> Result<Vec<SolutionDescriptor>> {
    Solver::new(problem).solve_class(class)
}

pub fn enumerate(problem: &Problem, j_max: usize) -> Result<Enumeration> {
    if j_max == 0 {
        return Err(Error::InvalidParameter("j_max must be at least 1".into()));
    }
    Solver::new(problem).enumerate(j_max)
}

/// Finds the descriptor with the given id among classes `j <= j_max`.
pub fn find_descriptor(problem: &Problem, id: &str, j_max: usize) -> Result<Option<SolutionDescriptor>> {
    let class = parse_class(id);
    let mut solver = Solver::new(problem);
    let found = match class {
        Some(c) => solver.solve_class(c)?,
        None => solver.enumerate(j_max)?.descriptors,
    };
    Ok(found.into_iter().find(|d| d.id == id))
}

/// Reads the class prefix `s<j><p|m>-` of a descriptor id.
pub fn parse_class(id: &str) -> Option<SolutionClass> {
    let head = id.split('-').next()?.strip_prefix('s')?;
    let (digits, sign) = head.split_at(head.len().checked_sub(1)?);
    let sign = match sign {
        "p" => Side::Positive,
        "m" => Side::Negative,
        _ => return None,
    };
    let j: usize = digits.parse().ok()?;
    (j >= 1).then(|| SolutionClass::new(j, sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::{Family, Nonlinearity};
    use std::f64::consts::PI;

    fn cubic() -> Nonlinearity {
        Nonlinearity::new(Family::PowerAsym { b_plus: 1.0, b_minus: 1.0, r_exp: 4.0 }, 2.0).unwrap()
    }

    #[test]
    fn arch_counts() {
        assert_eq!(SolutionClass::new(1, Side::Positive).arch_counts(), (1, 0));
        assert_eq!(SolutionClass::new(1, Side::Negative).arch_counts(), (0, 1));
        assert_eq!(SolutionClass::new(4, Side::Negative).arch_counts(), (2, 2));
        assert_eq!(SolutionClass::new(5, Side::Positive).arch_counts(), (3, 2));
        assert_eq!(SolutionClass::new(5, Side::Negative).arch_counts(), (2, 3));
    }

    #[test]
    fn id_round_trip() {
        let c = SolutionClass::new(12, Side::Negative);
        let id = descriptor_id(c, Kind::FlatCore, 0.25);
        assert!(id.starts_with("s12m-flat-core-"), "{id}");
        assert_eq!(parse_class(&id), Some(c));
        assert_eq!(descriptor_id(c, Kind::FlatCore, 0.25), id);
        assert_ne!(descriptor_id(c, Kind::Regular, 0.25), id);
        assert_eq!(parse_class("bogus"), None);
    }

    #[test]
    fn chafee_infante_first_band() {
        let pr = Problem::new(2.0, cubic(), 2.0 * PI * PI).unwrap();
        let s1 = solve_class(&pr, SolutionClass::new(1, Side::Positive)).unwrap();
        assert_eq!(s1.len(), 1);
        assert!(s1[0].residual.abs() < 1e-11);
        assert!(!s1[0].tangent);
        assert!(solve_class(&pr, SolutionClass::new(2, Side::Positive)).unwrap().is_empty());
        let all = enumerate(&pr, 4).unwrap();
        assert_eq!(all.descriptors.len(), 2);
    }

    #[test]
    fn even_class_residual_single_sign_change() {
        let pr = Problem::new(2.0, cubic(), 4.0 * PI * PI + 1.0).unwrap();
        let s2 = solve_class(&pr, SolutionClass::new(2, Side::Positive)).unwrap();
        assert_eq!(s2.len(), 1);
        let th = crate::timemap::theta(&pr, s2[0].r).unwrap();
        let al = crate::timemap::alpha(&pr, s2[0].r).unwrap();
        assert!((2.0 * (th + al) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn out_of_range_residual() {
        let pr = Problem::new(2.0, cubic(), 10.0).unwrap();
        let bound = pr.slope_bound(Side::Positive);
        assert!(matches!(
            matching_residual(&pr, SolutionClass::new(1, Side::Positive), bound),
            Err(Error::OutOfRange { .. })
        ));
    }
}
