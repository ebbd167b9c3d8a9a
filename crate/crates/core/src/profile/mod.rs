//! Pointwise solution profiles assembled from arches and plateaus, with an
//! energy check, a shooting oracle and a regularity classifier.

pub mod regularity;
pub mod shoot;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::Side;
use crate::quadrature::ArchIntegrand;
use crate::solver::{CoreSide, Kind, SolutionClass, SolutionDescriptor};
use crate::timemap::{arch_top_exact, ArchTop, Problem};

pub use regularity::{classify_regularity, RegularityReport, SmoothnessClass};
pub use shoot::shoot;

/// Tolerance for the partial arch integrals behind the inversion.
const INVERSION_TOL: f64 = 1e-12;
/// Chebyshev nodes per arch in the inversion table.
const TABLE_NODES: usize = 32;
const BUDGET_TOL: f64 = 1e-10;
const LENGTH_TOL: f64 = 1e-9;

/// One half-arch rising away from zero, falling back to it, or a plateau.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    Rise,
    Flat,
    Fall,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub kind: PieceKind,
    pub side: Side,
    pub x0: f64,
    pub x1: f64,
    /// Index into the arch list.
    pub arch: usize,
}

/// Inversion data for one arch: `Φ(ω) = ∫₀^ω` of the desingularized
/// integrand, tabulated so that `x ↦ φ` is a short Newton solve.
#[derive(Debug, Clone)]
struct Arch {
    side: Side,
    top: f64,
    depth: f64,
    p: f64,
    /// `Φ` at the table nodes `ω`.
    table: Vec<(f64, f64)>,
    half_width: f64,
}

impl Arch {
    fn new(problem: &Problem, side: Side, top: ArchTop) -> Result<Self> {
        let ArchTop { top, depth } = top;
        let branch = problem.nl.branch(side);
        let integrand = ArchIntegrand::new(branch.gap_with_depth(top, depth), problem.p, top)?;
        let w_max = integrand.w_max();
        let mut nodes = integrand.breakpoints();
        for k in 1..TABLE_NODES {
            let t = std::f64::consts::PI * k as f64 / TABLE_NODES as f64;
            nodes.push(0.5 * w_max * (1.0 - t.cos()));
        }
        nodes.sort_by(f64::total_cmp);
        nodes.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * w_max);
        let mut table = Vec::with_capacity(nodes.len());
        let mut acc = 0.0;
        table.push((0.0, 0.0));
        for pair in nodes.windows(2) {
            acc += integrand.integrate(pair[0], pair[1], INVERSION_TOL)?;
            table.push((pair[1], acc));
        }
        let half_width = problem.kappa() * acc;
        Ok(Arch { side, top, depth, p: problem.p, table, half_width })
    }

    /// `(|φ|, |φ_x|)` at distance `delta` from the top.
    fn at(&self, problem: &Problem, delta: f64) -> (f64, f64) {
        let kappa = problem.kappa();
        let delta = delta.clamp(0.0, self.half_width);
        if delta == 0.0 {
            return (self.top, 0.0);
        }
        let branch = problem.nl.branch(self.side);
        let integrand = ArchIntegrand::new(branch.gap_with_depth(self.top, self.depth), self.p, self.top)
            .expect("arch integrand was valid at construction");
        let target = delta / kappa;
        let total = self.table.last().expect("non-empty table").1;
        let u = if target >= total {
            self.top
        } else {
            let k = self.table.partition_point(|e| e.1 <= target).max(1) - 1;
            let (w0, f0) = self.table[k];
            let (w1, f1) = self.table[k + 1];
            let (mut lo, mut hi) = (w0, w1);
            let mut w = w0 + (w1 - w0) * (target - f0) / (f1 - f0);
            for _ in 0..60 {
                let phi = f0 + integrand.integrate(w0, w, INVERSION_TOL).unwrap_or(f64::NAN);
                let err = phi - target;
                if err > 0.0 {
                    hi = w;
                } else {
                    lo = w;
                }
                if err.abs() <= 1e-16 * total {
                    break;
                }
                let d = integrand.eval(w);
                let mut next = w - err / d;
                if !(next >= lo && next <= hi) || !next.is_finite() {
                    next = 0.5 * (lo + hi);
                }
                let done = (next - w).abs() <= 1e-16 * w1;
                w = next;
                if done {
                    break;
                }
            }
            integrand.u_of_w(w).min(self.top)
        };
        let g = integrand.gap().value(u).max(0.0);
        (self.top - u, g.powf(1.0 / self.p) / kappa)
    }
}

/// Piecewise description of a solution on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Layout {
    arches: Vec<Arch>,
    pub pieces: Vec<Piece>,
    pub length: f64,
}

impl Layout {
    fn locate(&self, x: f64) -> Option<&Piece> {
        if self.pieces.is_empty() {
            return None;
        }
        let k = self.pieces.partition_point(|pc| pc.x1 < x);
        Some(&self.pieces[k.min(self.pieces.len() - 1)])
    }

    fn eval(&self, problem: &Problem, x: f64) -> (f64, f64) {
        let Some(pc) = self.locate(x) else { return (0.0, 0.0) };
        let arch = &self.arches[pc.arch];
        let s = pc.side.sign();
        match pc.kind {
            PieceKind::Flat => (s * arch.top, 0.0),
            PieceKind::Rise => {
                let (v, d) = arch.at(problem, pc.x1 - x);
                (s * v, s * d)
            }
            PieceKind::Fall => {
                let (v, d) = arch.at(problem, x - pc.x0);
                (s * v, -s * d)
            }
        }
    }
}

/// A sampled solution with its layout.
#[derive(Debug, Clone)]
pub struct Profile {
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub flat_intervals: Vec<[f64; 2]>,
    pub nodes: Vec<f64>,
    pub class: Option<SolutionClass>,
    /// `|φ_x(0)|`.
    pub r: f64,
    pub problem: Problem,
    pub layout: Option<Layout>,
}

/// The JSON sidecar written next to a profile CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSidecar {
    pub class: Option<SolutionClass>,
    pub r: f64,
    pub flat_intervals: Vec<[f64; 2]>,
    pub nodes: Vec<f64>,
    pub points: usize,
}

impl Profile {
    /// `(φ(x), φ_x(x))`, exact from the layout or, for sampled profiles,
    /// by cubic Hermite interpolation.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        match &self.layout {
            Some(l) => l.eval(&self.problem, x),
            None => self.hermite(x),
        }
    }

    pub fn phi_at(&self, x: f64) -> f64 {
        self.eval(x).0
    }

    pub fn dphi_at(&self, x: f64) -> f64 {
        self.eval(x).1
    }

    fn hermite(&self, x: f64) -> (f64, f64) {
        let n = self.x.len();
        let k = self.x.partition_point(|&t| t <= x).clamp(1, n - 1) - 1;
        let (x0, x1) = (self.x[k], self.x[k + 1]);
        let h = x1 - x0;
        let t = ((x - x0) / h).clamp(0.0, 1.0);
        let (p0, p1, m0, m1) = (self.phi[k], self.phi[k + 1], self.dphi[k] * h, self.dphi[k + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * m1;
        let d = ((6.0 * t2 - 6.0 * t) * p0 + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (-6.0 * t2 + 6.0 * t) * p1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        (v, d)
    }

    pub fn sidecar(&self) -> ProfileSidecar {
        ProfileSidecar {
            class: self.class,
            r: self.r,
            flat_intervals: self.flat_intervals.clone(),
            nodes: self.nodes.clone(),
            points: self.x.len(),
        }
    }

    /// Total plateau length.
    pub fn flat_length(&self) -> f64 {
        self.flat_intervals.iter().map(|iv| iv[1] - iv[0]).sum()
    }

    /// Start of the first plateau, or `1`.
    pub fn first_plateau(&self) -> f64 {
        self.flat_intervals.first().map_or(1.0, |iv| iv[0])
    }
}

fn uniform_grid(m: usize) -> Vec<f64> {
    (0..m).map(|i| i as f64 / (m - 1) as f64).collect()
}

/// The zero solution sampled on `m` points.
pub fn trivial_profile(problem: &Problem, m: usize) -> Profile {
    let x = uniform_grid(m.max(2));
    let n = x.len();
    Profile {
        x,
        phi: vec![0.0; n],
        dphi: vec![0.0; n],
        flat_intervals: Vec::new(),
        nodes: Vec::new(),
        class: None,
        r: 0.0,
        problem: problem.clone(),
        layout: None,
    }
}

/// Plateau length for each arch of the class, in order.
fn core_plan(descriptor: &SolutionDescriptor, core_lengths: Option<&[f64]>) -> Result<Vec<f64>> {
    let class = descriptor.class;
    let (np, nm) = class.arch_counts();
    let n = np + nm;
    if descriptor.kind == Kind::Regular {
        if let Some(c) = core_lengths {
            if !c.is_empty() {
                return Err(Error::CoreCount { expected: 0, got: c.len() });
            }
        }
        return Ok(vec![0.0; n]);
    }
    let count = descriptor.core_count;
    let lengths: Vec<f64> = match core_lengths {
        None => vec![descriptor.core_budget / count as f64; count],
        Some(c) => {
            if c.len() != count {
                return Err(Error::CoreCount { expected: count, got: c.len() });
            }
            if c.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(Error::InvalidParameter("core lengths must be finite and non-negative".into()));
            }
            let sum: f64 = c.iter().sum();
            if (sum - descriptor.core_budget).abs() > BUDGET_TOL {
                return Err(Error::BudgetMismatch { sum, budget: descriptor.core_budget });
            }
            c.to_vec()
        }
    };
    let mut plan = vec![0.0; n];
    let mut next = lengths.into_iter();
    for (k, slot) in plan.iter_mut().enumerate() {
        let side = arch_side(class, k);
        let cored = match descriptor.core_side {
            _ if class.j == 1 => true,
            Some(CoreSide::Positive) => side == Side::Positive,
            Some(CoreSide::Negative) => side == Side::Negative,
            Some(CoreSide::Alternating) => true,
            None => false,
        };
        if cored {
            *slot = next.next().ok_or(Error::CoreCount { expected: count, got: k })?;
        }
    }
    Ok(plan)
}

fn arch_side(class: SolutionClass, k: usize) -> Side {
    if k.is_multiple_of(2) {
        class.sign
    } else {
        class.sign.flip()
    }
}

/// Assembles the profile of a descriptor on `m` uniform points. Flat-core
/// descriptors take one plateau length per cored arch (default: equal
/// split of the budget).
pub fn reconstruct(
    problem: &Problem,
    descriptor: &SolutionDescriptor,
    m: usize,
    core_lengths: Option<&[f64]>,
) -> Result<Profile> {
    if m < 2 {
        return Err(Error::InvalidParameter("profile needs at least 2 points".into()));
    }
    let plan = core_plan(descriptor, core_lengths)?;
    let class = descriptor.class;
    let slope = descriptor.slope(problem);
    let mut arches: Vec<Arch> = Vec::new();
    let mut pieces = Vec::new();
    let mut nodes = Vec::new();
    let mut flat_intervals = Vec::new();
    let mut cursor = 0.0;
    for (k, &core) in plan.iter().enumerate() {
        let side = arch_side(class, k);
        // arches on the same side share their shape
        let idx = match arches.iter().position(|a| a.side == side) {
            Some(i) => i,
            None => {
                let top = arch_top_exact(problem, side, slope)?;
                arches.push(Arch::new(problem, side, top)?);
                arches.len() - 1
            }
        };
        let w = arches[idx].half_width;
        if k > 0 {
            nodes.push(cursor);
        }
        pieces.push(Piece { kind: PieceKind::Rise, side, x0: cursor, x1: cursor + w, arch: idx });
        cursor += w;
        if core > 0.0 {
            pieces.push(Piece { kind: PieceKind::Flat, side, x0: cursor, x1: cursor + core, arch: idx });
            flat_intervals.push([cursor, cursor + core]);
            cursor += core;
        }
        pieces.push(Piece { kind: PieceKind::Fall, side, x0: cursor, x1: cursor + w, arch: idx });
        cursor += w;
    }
    if (cursor - 1.0).abs() > LENGTH_TOL {
        return Err(Error::ShapeError { length: cursor });
    }
    let layout = Layout { arches, pieces, length: cursor };
    let x = uniform_grid(m);
    let mut phi = Vec::with_capacity(m);
    let mut dphi = Vec::with_capacity(m);
    for &xi in &x {
        let (v, d) = layout.eval(problem, xi);
        phi.push(v);
        dphi.push(d);
    }
    Ok(Profile {
        x,
        phi,
        dphi,
        flat_intervals,
        nodes,
        class: Some(class),
        r: descriptor.r,
        problem: problem.clone(),
        layout: Some(layout),
    })
}

/// `E = |φ_x|^p + λp/(p-1)·(|φ|^q/q - F(φ))` at one sample.
pub fn energy(problem: &Problem, phi: f64, dphi: f64) -> f64 {
    let q = problem.nl.q();
    let area = phi.abs().powf(q) / q - problem.nl.F(phi);
    dphi.abs().powf(problem.p) + problem.lambda * problem.p / (problem.p - 1.0) * area
}

/// Largest spread of the energy over any monotone piece, relative to `r^p`.
///
/// Pieces come from the layout when present; otherwise the samples are split
/// where `φ_x` changes sign.
pub fn energy_residual(problem: &Problem, profile: &Profile) -> f64 {
    let n = profile.x.len();
    let e: Vec<f64> = (0..n).map(|i| energy(problem, profile.phi[i], profile.dphi[i])).collect();
    let piece_of: Vec<usize> = match &profile.layout {
        Some(l) => profile
            .x
            .iter()
            .map(|&x| l.pieces.partition_point(|pc| pc.x1 < x).min(l.pieces.len() - 1))
            .collect(),
        None => {
            let mut id = 0;
            let mut prev = 0.0f64;
            profile
                .dphi
                .iter()
                .map(|&d| {
                    let s = if d > 0.0 { 1.0 } else if d < 0.0 { -1.0 } else { 0.0 };
                    if s != prev {
                        id += 1;
                        prev = s;
                    }
                    id
                })
                .collect()
        }
    };
    let mut worst: f64 = 0.0;
    let mut start = 0;
    while start < n {
        let mut end = start;
        let (mut lo, mut hi) = (e[start], e[start]);
        while end < n && piece_of[end] == piece_of[start] {
            lo = lo.min(e[end]);
            hi = hi.max(e[end]);
            end += 1;
        }
        worst = worst.max(hi - lo);
        start = end;
    }
    let scale = profile.r.powf(problem.p);
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

/// Outcome of checking a reconstructed profile against the energy relation,
/// the boundary data and a shooting trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub id: String,
    pub energy_residual: f64,
    pub energy_tol: f64,
    pub oracle_sup_diff: f64,
    pub oracle_tol: f64,
    /// The oracle comparison covers `[0, compared_until]`.
    pub compared_until: f64,
    pub boundary_phi: f64,
    pub boundary_slope_error: f64,
    pub node_count: usize,
    pub expected_nodes: usize,
    pub pass: bool,
}

pub const ENERGY_TOL: f64 = 1e-8;
pub const ORACLE_TOL: f64 = 1e-6;

/// Reconstructs `descriptor`, shoots from `x = 0` with the same slope, and
/// compares. Shooting is not trusted past the first plateau, where the
/// initial value problem loses uniqueness.
pub fn verify(problem: &Problem, descriptor: &SolutionDescriptor) -> Result<VerifyReport> {
    let m = problem.numerics.grid;
    let profile = reconstruct(problem, descriptor, m, None)?;
    let energy = energy_residual(problem, &profile);
    let traj = shoot(problem, descriptor.r, descriptor.class.sign, problem.numerics.ode_steps);
    let until = profile.first_plateau();
    let sup = match &traj {
        Ok(t) => profile
            .x
            .iter()
            .zip(&profile.phi)
            .filter(|(&x, _)| x <= until)
            .map(|(&x, &v)| (t.phi_at(x) - v).abs())
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    let boundary_phi = profile.phi[0].abs().max(profile.phi[m - 1].abs());
    let boundary_slope_error = (profile.dphi[0].abs() - descriptor.r).abs() / descriptor.r;
    let expected_nodes = descriptor.class.j - 1;
    let pass = energy < ENERGY_TOL
        && sup < ORACLE_TOL
        && boundary_phi < 1e-10
        && boundary_slope_error < 1e-9
        && profile.nodes.len() == expected_nodes;
    Ok(VerifyReport {
        id: descriptor.id.clone(),
        energy_residual: energy,
        energy_tol: ENERGY_TOL,
        oracle_sup_diff: sup,
        oracle_tol: ORACLE_TOL,
        compared_until: until,
        boundary_phi,
        boundary_slope_error,
        node_count: profile.nodes.len(),
        expected_nodes,
        pass,
    })
}
