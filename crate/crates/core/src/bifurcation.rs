//! Bifurcation sequences, the minimizers they are built from, and the
//! per-class structure of the solution set at fixed `λ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::{Branch, Nonlinearity, Side};
use crate::quadrature::arch_integral;
use crate::roots::golden_min;
use crate::timemap::{
    arch_top_exact, endpoint_levels, logistic, side_integral, side_integral_at, slope_grid, EndpointLevels, Problem, RelSlope, DEFAULT_QUAD_TOL,
};

/// Points in the minimizer scans.
const MIN_SCAN: usize = 512;
/// Relative band inside which `λ` counts as equal to a threshold.
const THRESHOLD_BAND: f64 = 1e-12;

/// `λ₁ = (p-1)[2∫₀¹(1-t^p)^{-1/p}dt]^p`, the first eigenvalue of the
/// p-Laplacian on the unit interval.
pub fn eigenvalue_base(p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be > 1, got {p}")));
    }
    // with f ≡ 0 and q = p the gap at a = 1 is (1 - (1-u)^p)/p
    let branch = Branch::pure_power(p);
    let i = arch_integral(&branch.gap(1.0), p, 1.0, 1e-13)?;
    let integral = i * p.powf(-1.0 / p);
    Ok((p - 1.0) * (2.0 * integral).powf(p))
}

/// `λ` at which `κ(λ)·width = 1`.
pub fn lambda_for_width(p: f64, width: f64) -> f64 {
    (p - 1.0) / p * width.powf(p)
}

/// Minimizers of the time-map objectives, for `q > p`.
///
/// Levels are `λ`-independent; slopes `r_e`, `r_o±` are reported at `λ = 1`
/// and scale as `λ^{1/p}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimizers {
    pub a_star: f64,
    pub i_star: f64,
    pub b_star: f64,
    pub j_star: f64,
    pub r_e: f64,
    /// `min (I(z) + J(S))` over common levels.
    pub i_e: f64,
    pub r_o_plus: f64,
    pub i_o_plus: f64,
    pub j_o_plus: f64,
    pub r_o_minus: f64,
    pub i_o_minus: f64,
    pub j_o_minus: f64,
}

/// `(I(z), J(S))` sampled on a common-level grid, with the scan abscissae.
struct PairScan {
    problem: Problem,
    s: Vec<f64>,
    i: Vec<f64>,
    j: Vec<f64>,
    /// Values at `ρ = 1` when finite (`p > 2`).
    end: Option<(f64, f64)>,
}

fn pair_at(problem: &Problem, rho: f64) -> Result<(f64, f64)> {
    let reference = problem.star_side();
    let slope = RelSlope::new(rho, reference);
    let nl = &problem.nl;
    let tol = problem.tol();
    let zt = arch_top_exact(problem, Side::Positive, slope)?;
    let st = arch_top_exact(problem, Side::Negative, slope)?;
    Ok((
        side_integral_at(nl, Side::Positive, problem.p, zt, tol)?,
        side_integral_at(nl, Side::Negative, problem.p, st, tol)?,
    ))
}

impl PairScan {
    fn new(nl: &Nonlinearity, p: f64) -> Result<Self> {
        let problem = Problem::new(p, nl.clone(), 1.0)?;
        let s = slope_grid(MIN_SCAN);
        let mut i = Vec::with_capacity(s.len());
        let mut j = Vec::with_capacity(s.len());
        for &sk in &s {
            let (a, b) = pair_at(&problem, logistic(sk))?;
            i.push(a);
            j.push(b);
        }
        let end = if p > 2.0 { Some(pair_at(&problem, 1.0)?) } else { None };
        Ok(PairScan { problem, s, i, j, end })
    }

    /// Minimizes `obj(I, J)` over the common levels; returns `(ρ, I, J, value)`.
    fn minimize(&self, obj: impl Fn(f64, f64) -> f64) -> Result<(f64, f64, f64, f64)> {
        let vals: Vec<f64> = self.i.iter().zip(&self.j).map(|(&a, &b)| obj(a, b)).collect();
        let (k, &v) = vals
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .expect("non-empty scan");
        if let Some((ei, ej)) = self.end {
            let ev = obj(ei, ej);
            if ev <= v {
                return Ok((1.0, ei, ej, ev));
            }
        }
        if k == 0 {
            return Ok((logistic(self.s[0]), self.i[0], self.j[0], v));
        }
        let lo = self.s[k - 1];
        let hi = if k + 1 < self.s.len() { self.s[k + 1] } else { 2.0 * self.s[k] - self.s[k - 1] };
        let f = |s: f64| match pair_at(&self.problem, logistic(s)) {
            Ok((a, b)) => obj(a, b),
            Err(_) => f64::INFINITY,
        };
        let (s_best, v_best) = golden_min(f, lo, hi, 1e-9);
        if v_best < v {
            let (a, b) = pair_at(&self.problem, logistic(s_best))?;
            Ok((logistic(s_best), a, b, v_best))
        } else {
            Ok((logistic(self.s[k]), self.i[k], self.j[k], v))
        }
    }
}

/// Minimum of the branch integral over `(0, z]` on one side: `(a, I(a))`.
fn branch_min(nl: &Nonlinearity, p: f64, side: Side) -> Result<(f64, f64)> {
    let problem = Problem::new(p, nl.clone(), 1.0)?;
    let tol = problem.tol();
    let eval = |rho: f64| -> Result<(f64, f64)> {
        let a = arch_top_exact(&problem, side, RelSlope::new(rho, side))?;
        Ok((a.top, side_integral_at(nl, side, p, a, tol)?))
    };
    let s = slope_grid(MIN_SCAN);
    let mut best = (0usize, f64::INFINITY);
    for (k, &sk) in s.iter().enumerate() {
        let v = eval(logistic(sk))?.1;
        if v < best.1 {
            best = (k, v);
        }
    }
    if p > 2.0 {
        let end = eval(1.0)?;
        if end.1 <= best.1 {
            return Ok(end);
        }
    }
    let k = best.0;
    if k == 0 {
        return eval(logistic(s[0]));
    }
    let hi = if k + 1 < s.len() { s[k + 1] } else { 2.0 * s[k] - s[k - 1] };
    let f = |x: f64| eval(logistic(x)).map(|v| v.1).unwrap_or(f64::INFINITY);
    let (x, v) = golden_min(f, s[k - 1], hi, 1e-9);
    if v < best.1 {
        eval(logistic(x))
    } else {
        eval(logistic(s[k]))
    }
}

/// Locates `a_*`, `b_*`, `I_e` and the odd-class minimizers. Only defined
/// for `q > p`.
pub fn find_minimizers(nl: &Nonlinearity, p: f64) -> Result<Minimizers> {
    Ok(minimizers_with_scan(nl, p)?.0)
}

fn minimizers_with_scan(nl: &Nonlinearity, p: f64) -> Result<(Minimizers, PairScan)> {
    if !(nl.q() > p) {
        return Err(Error::NotApplicable);
    }
    let (a_star, i_star) = branch_min(nl, p, Side::Positive)?;
    let (b_abs, j_star) = branch_min(nl, p, Side::Negative)?;
    let scan = PairScan::new(nl, p)?;
    let r_star_1 = scan.problem.slope_bound(scan.problem.star_side());
    let (rho_e, _, _, i_e) = scan.minimize(|a, b| a + b)?;
    // reported at λ = 1, where θ = κ₁ I and α = κ₁ J
    let k1 = scan.problem.kappa();
    let (rho_op, i_op, j_op, _) = scan.minimize(|a, b| (2.0 * k1 * (a + b)) / (1.0 + 2.0 * k1 * b))?;
    let (rho_om, i_om, j_om, _) = scan.minimize(|a, b| (2.0 * k1 * (a + b)) / (1.0 + 2.0 * k1 * a))?;
    let m = Minimizers {
        a_star,
        i_star,
        b_star: -b_abs,
        j_star,
        r_e: rho_e * r_star_1,
        i_e,
        r_o_plus: rho_op * r_star_1,
        i_o_plus: i_op,
        j_o_plus: j_op,
        r_o_minus: rho_om * r_star_1,
        i_o_minus: i_om,
        j_o_minus: j_om,
    };
    Ok((m, scan))
}

/// Thresholds up to index `N`. Entry `n - 1` of each vector belongs to
/// class `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationTable {
    pub p: f64,
    pub q: f64,
    pub endpoint_levels: EndpointLevels,
    /// Flat-core onset; `+∞` for `p <= 2`.
    pub lambda_tilde_plus: Vec<f64>,
    pub lambda_tilde_minus: Vec<f64>,
    /// Tangent (pair-birth) thresholds, `q > p` only.
    pub lambda_star_plus: Option<Vec<f64>>,
    pub lambda_star_minus: Option<Vec<f64>>,
    /// `n^p λ₁`, `q = p` only.
    pub lambda_classical: Option<Vec<f64>>,
    pub minimizers: Option<Minimizers>,
}

impl BifurcationTable {
    pub fn len(&self) -> usize {
        self.lambda_tilde_plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda_tilde_plus.is_empty()
    }

    /// Flat-core onset of class `(n, side)`.
    pub fn tilde(&self, n: usize, side: Side) -> f64 {
        match side {
            Side::Positive => self.lambda_tilde_plus[n - 1],
            Side::Negative => self.lambda_tilde_minus[n - 1],
        }
    }

    /// Threshold above which class `(n, side)` has a regular solution;
    /// zero for `q < p`.
    pub fn existence(&self, n: usize, side: Side) -> f64 {
        if let Some(c) = &self.lambda_classical {
            return c[n - 1];
        }
        match (side, &self.lambda_star_plus, &self.lambda_star_minus) {
            (Side::Positive, Some(v), _) => v[n - 1],
            (Side::Negative, _, Some(v)) => v[n - 1],
            _ => 0.0,
        }
    }
}

/// The thresholds `λ̃^±_n` and, depending on `q` vs `p`, `λ^±_{*,n}` or the
/// classical `n^p λ₁`.
pub fn bifurcation_table(nl: &Nonlinearity, p: f64, n_max: usize) -> Result<BifurcationTable> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be > 1, got {p}")));
    }
    let q = nl.q();
    let levels = endpoint_levels(nl, p);
    let (tilde_plus, tilde_minus) = if p > 2.0 {
        let tol = DEFAULT_QUAD_TOL;
        let i_full = side_integral(nl, Side::Positive, p, nl.z_plus(), tol)?;
        let j_full = side_integral(nl, Side::Negative, p, -nl.z_minus(), tol)?;
        let i_hat = side_integral(nl, Side::Positive, p, levels.z_hat, tol)?;
        let j_hat = side_integral(nl, Side::Negative, p, -levels.s_hat, tol)?;
        sequence(p, n_max, (i_full, j_full), |wi, wj| wi * i_hat + wj * j_hat)
    } else {
        (vec![f64::INFINITY; n_max], vec![f64::INFINITY; n_max])
    };
    let mut table = BifurcationTable {
        p,
        q,
        endpoint_levels: levels,
        lambda_tilde_plus: tilde_plus,
        lambda_tilde_minus: tilde_minus,
        lambda_star_plus: None,
        lambda_star_minus: None,
        lambda_classical: None,
        minimizers: None,
    };
    if q == p {
        let l1 = eigenvalue_base(p)?;
        table.lambda_classical = Some((1..=n_max).map(|n| (n as f64).powf(p) * l1).collect());
    } else if q > p {
        let (m, scan) = minimizers_with_scan(nl, p)?;
        let mut err = None;
        let (sp, sm) = sequence(p, n_max, (m.i_star, m.j_star), |wi, wj| {
            if wi == wj {
                m.i_e * wi
            } else {
                match scan.minimize(|a, b| wi * a + wj * b) {
                    Ok(v) => v.3,
                    Err(e) => {
                        err = Some(e);
                        f64::NAN
                    }
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        table.lambda_star_plus = Some(sp);
        table.lambda_star_minus = Some(sm);
        table.minimizers = Some(m);
    }
    Ok(table)
}

/// Builds `(plus, minus)` threshold sequences. Class 1 uses the single-arch
/// widths `first`; class `n >= 2` uses `width(wI, wJ)` with the arch counts
/// of the class: `(k, k)` for `n = 2k`, `(k, k-1)` / `(k-1, k)` for
/// `n = 2k-1` on the positive / negative side.
fn sequence(
    p: f64,
    n_max: usize,
    first: (f64, f64),
    mut width: impl FnMut(f64, f64) -> f64,
) -> (Vec<f64>, Vec<f64>) {
    let mut plus = Vec::with_capacity(n_max);
    let mut minus = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        if n == 1 {
            plus.push(lambda_for_width(p, 2.0 * first.0));
            minus.push(lambda_for_width(p, 2.0 * first.1));
        } else if n % 2 == 0 {
            let k = (n / 2) as f64;
            let l = lambda_for_width(p, width(2.0 * k, 2.0 * k));
            plus.push(l);
            minus.push(l);
        } else {
            let k = n.div_ceil(2) as f64;
            plus.push(lambda_for_width(p, width(2.0 * k, 2.0 * (k - 1.0))));
            minus.push(lambda_for_width(p, width(2.0 * (k - 1.0), 2.0 * k)));
        }
    }
    (plus, minus)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    QLessP,
    QEqualP,
    QGreaterP,
}

/// Comparison of `A(z⁺)` with `A(z⁻)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaRelation {
    PlusSmaller,
    Equal,
    MinusSmaller,
}

impl AreaRelation {
    pub fn of(nl: &Nonlinearity) -> Self {
        let (ap, am) = nl.areas();
        if ap < am {
            AreaRelation::PlusSmaller
        } else if ap > am {
            AreaRelation::MinusSmaller
        } else {
            AreaRelation::Equal
        }
    }
}

/// Number of free parameters of the flat-core family in class `(n, side)`.
pub fn continuum_dimension(n: usize, side: Side, relation: AreaRelation) -> usize {
    assert!(n >= 1, "class index starts at 1");
    if n == 1 {
        return 0;
    }
    let k = n.div_ceil(2);
    if n.is_multiple_of(2) {
        return match relation {
            AreaRelation::Equal => 2 * k - 1,
            _ => k - 1,
        };
    }
    let own_smaller = matches!(
        (side, relation),
        (Side::Positive, AreaRelation::PlusSmaller) | (Side::Negative, AreaRelation::MinusSmaller)
    );
    match relation {
        AreaRelation::Equal => 2 * k - 2,
        _ if own_smaller => k - 1,
        _ => k - 2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cardinality {
    Empty,
    Single,
    Pair,
    Continuum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassStructure {
    pub j: usize,
    pub sign: Side,
    pub tag: Cardinality,
    /// Isolated solutions without a plateau.
    pub regular: usize,
    pub flat_core: bool,
    /// Dimension of the flat-core family when present.
    pub continuum_dim: Option<usize>,
    /// `λ` at which `λ` equals the class's pair-birth or classical threshold.
    pub tangent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub lambda: f64,
    pub regime: Regime,
    pub area_relation: AreaRelation,
    /// Counts for `q > p` are lower bounds from non-monotone time maps.
    pub advisory: bool,
    pub classes: Vec<ClassStructure>,
}

impl StructureReport {
    pub fn class(&self, j: usize, sign: Side) -> Option<&ClassStructure> {
        self.classes.iter().find(|c| c.j == j && c.sign == sign)
    }
}

fn equal_threshold(lambda: f64, threshold: f64) -> bool {
    (lambda - threshold).abs() <= THRESHOLD_BAND * threshold
}

/// Classifies every class `j <= n_max` at the problem's `λ` by comparing it
/// with the thresholds of [`bifurcation_table`].
pub fn structure(problem: &Problem, n_max: usize) -> Result<StructureReport> {
    let table = bifurcation_table(&problem.nl, problem.p, n_max)?;
    Ok(structure_from_table(problem, &table))
}

pub fn structure_from_table(problem: &Problem, table: &BifurcationTable) -> StructureReport {
    let lambda = problem.lambda;
    let q = problem.nl.q();
    let p = problem.p;
    let regime = if q < p {
        Regime::QLessP
    } else if q == p {
        Regime::QEqualP
    } else {
        Regime::QGreaterP
    };
    let relation = AreaRelation::of(&problem.nl);
    let mut classes = Vec::new();
    for j in 1..=table.len() {
        for sign in [Side::Positive, Side::Negative] {
            let tilde = table.tilde(j, sign);
            let lower = table.existence(j, sign);
            let flat = lambda > tilde && !equal_threshold(lambda, tilde);
            let mut tangent = false;
            let regular = match regime {
                Regime::QLessP => usize::from(!flat),
                Regime::QEqualP => usize::from(lambda > lower && !equal_threshold(lambda, lower) && !flat),
                Regime::QGreaterP => {
                    if equal_threshold(lambda, lower) {
                        tangent = true;
                        1
                    } else if lambda < lower {
                        0
                    } else if flat {
                        // the decreasing branch of the time map survives
                        usize::from(lower < tilde && !equal_threshold(lower, tilde))
                    } else {
                        2
                    }
                }
            };
            let dim = flat.then(|| continuum_dimension(j, sign, relation));
            let tag = match dim {
                Some(d) if d > 0 => Cardinality::Continuum,
                _ => match regular + usize::from(flat) {
                    0 => Cardinality::Empty,
                    1 => Cardinality::Single,
                    _ => Cardinality::Pair,
                },
            };
            classes.push(ClassStructure { j, sign, tag, regular, flat_core: flat, continuum_dim: dim, tangent });
        }
    }
    StructureReport { lambda, regime, area_relation: relation, advisory: regime == Regime::QGreaterP, classes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::Family;
    use std::f64::consts::PI;

    fn power(b_plus: f64, b_minus: f64, r_exp: f64, q: f64) -> Nonlinearity {
        Nonlinearity::new(Family::PowerAsym { b_plus, b_minus, r_exp }, q).unwrap()
    }

    #[test]
    fn base_eigenvalues() {
        assert!((eigenvalue_base(2.0).unwrap() - PI * PI).abs() < 1e-12);
        let c = (PI / 3.0) / (PI / 3.0).sin();
        let expect = 2.0 * (2.0 * c).powi(3);
        assert!((eigenvalue_base(3.0).unwrap() / expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_one_dimensions() {
        use AreaRelation::*;
        for k in 1..=6usize {
            assert_eq!(continuum_dimension(2 * k, Side::Positive, Equal), 2 * k - 1);
            assert_eq!(continuum_dimension(2 * k, Side::Negative, PlusSmaller), k - 1);
            if k >= 2 {
                let n = 2 * k - 1;
                assert_eq!(continuum_dimension(n, Side::Positive, Equal), 2 * k - 2);
                assert_eq!(continuum_dimension(n, Side::Positive, PlusSmaller), k - 1);
                assert_eq!(continuum_dimension(n, Side::Positive, MinusSmaller), k - 2);
                assert_eq!(continuum_dimension(n, Side::Negative, PlusSmaller), k - 2);
                assert_eq!(continuum_dimension(n, Side::Negative, MinusSmaller), k - 1);
            }
        }
        assert_eq!(continuum_dimension(1, Side::Negative, Equal), 0);
    }

    #[test]
    fn tilde_infinite_for_p_at_most_two() {
        let t = bifurcation_table(&power(1.0, 1.0, 4.0, 2.0), 2.0, 3).unwrap();
        assert!(t.lambda_tilde_plus.iter().all(|v| v.is_infinite()));
        assert!(t.lambda_classical.is_some());
        assert!(t.lambda_star_plus.is_none());
    }

    #[test]
    fn odd_sequences_coincide_and_increase() {
        let t = bifurcation_table(&power(1.0, 1.0, 6.0, 3.0), 3.0, 8).unwrap();
        for n in 0..8 {
            assert_eq!(t.lambda_tilde_plus[n], t.lambda_tilde_minus[n]);
            if n > 0 {
                assert!(t.lambda_tilde_plus[n] > t.lambda_tilde_plus[n - 1]);
            }
            let c = t.lambda_classical.as_ref().unwrap()[n];
            assert!(c < t.lambda_tilde_plus[n], "classical {c} above tilde at n = {}", n + 1);
        }
    }

    #[test]
    fn chafee_infante_structure() {
        let nl = power(1.0, 1.0, 4.0, 2.0);
        let pr = Problem::new(2.0, nl, 2.0 * PI * PI).unwrap();
        let rep = structure(&pr, 4).unwrap();
        assert_eq!(rep.regime, Regime::QEqualP);
        for c in &rep.classes {
            let want = if c.j == 1 { Cardinality::Single } else { Cardinality::Empty };
            assert_eq!(c.tag, want, "{c:?}");
        }
    }

    #[test]
    fn sublinear_every_class_nonempty() {
        let nl = power(1.0, 1.0, 4.0, 2.0);
        let pr = Problem::new(3.0, nl, 0.5).unwrap();
        let rep = structure(&pr, 5).unwrap();
        assert!(rep.classes.iter().all(|c| c.tag != Cardinality::Empty));
    }

    #[test]
    fn superlinear_minimizers_and_trivial_structure() {
        let nl = power(1.0, 1.0, 5.0, 3.0);
        let m = find_minimizers(&nl, 2.0).unwrap();
        assert!((m.a_star + m.b_star).abs() < 1e-12);
        assert!((m.i_star - m.j_star).abs() < 1e-12 * m.i_star);
        assert!(m.a_star > 0.0 && m.a_star < 1.0);
        // I_e is a minimum of I + J, so it cannot exceed the sum at the single-arch minimizers
        assert!(m.i_e <= m.i_star + m.j_star + 1e-12);
        let t = bifurcation_table(&nl, 2.0, 6).unwrap();
        let sp = t.lambda_star_plus.as_ref().unwrap();
        for n in 2..6 {
            assert!(sp[n] > sp[n - 2], "star sequence not increasing at {n}");
        }
        let pr = Problem::new(2.0, nl.clone(), 0.5 * sp[0]).unwrap();
        let rep = structure_from_table(&pr, &t);
        assert!(rep.classes.iter().all(|c| c.tag == Cardinality::Empty));
        let pr = Problem::new(2.0, nl, sp[0]).unwrap();
        let rep = structure_from_table(&pr, &t);
        let c = rep.class(1, Side::Positive).unwrap();
        assert_eq!((c.tag, c.tangent), (Cardinality::Single, true));
        assert!(find_minimizers(&power(1.0, 1.0, 4.0, 2.0), 2.0).is_err());
    }
}
