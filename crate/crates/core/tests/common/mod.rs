//! Brute-force reference computations that share no code with the library's
//! quadrature or root finders.
#![allow(dead_code)]

/// Compensated sum.
#[derive(Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn add(&mut self, v: f64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// `m^n - (m-u)^n` for `0 <= u <= m`, without cancellation.
pub fn pow_gap(m: f64, u: f64, n: f64) -> f64 {
    -m.powf(n) * (n * (-u / m).ln_1p()).exp_m1()
}

/// Description of `f` on one half-line, in the positive coordinate
/// `τ = |s|`: `f̃(τ) = Σ c_i τ^{e_i}`.
#[derive(Clone, Debug)]
pub struct HalfLine {
    pub q: f64,
    pub terms: Vec<(f64, f64)>,
}

impl HalfLine {
    /// `f(s) = b s^{r-1}` on `s > 0`.
    pub fn power(q: f64, b: f64, r_exp: f64) -> Self {
        HalfLine { q, terms: vec![(b, r_exp - 1.0)] }
    }

    /// Positive or mirrored negative half of `f(s) = Σ c_k s^{k+1}`.
    pub fn polynomial(q: f64, coeffs: &[f64], negative: bool) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let e = (i + 1) as f64;
                let sign = if negative && (i + 1) % 2 == 0 { -1.0 } else { 1.0 };
                (sign * c, e)
            })
            .collect();
        HalfLine { q, terms }
    }

    /// `∫_{m-u}^{m} (τ^{q-1} - f̃(τ)) dτ`.
    pub fn gap(&self, m: f64, u: f64) -> f64 {
        let mut g = pow_gap(m, u, self.q) / self.q;
        for &(c, e) in &self.terms {
            g -= c * pow_gap(m, u, e + 1.0) / (e + 1.0);
        }
        g
    }

    pub fn h(&self, t: f64) -> f64 {
        t.powf(self.q - 1.0) - self.terms.iter().map(|&(c, e)| c * t.powf(e)).sum::<f64>()
    }

    /// First positive zero of `h`, by bisection after a doubling search.
    pub fn zero(&self) -> f64 {
        let mut lo = 1e-6;
        assert!(self.h(lo) > 0.0);
        let mut hi = lo;
        while self.h(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// `∫₀^m G_m(u)^{-1/p} du` by the trapezoid rule on `panels` panels after
/// `u = m w^k`, `k = 2p/(p-1)` (which makes the integrand vanish linearly at
/// `w = 0` for a simple zero) and `k = 2p/(p-2)` for a double zero.
pub fn brute_arch(side: &HalfLine, p: f64, m: f64, panels: usize, double_zero: bool) -> f64 {
    brute_arch_with(|u| side.gap(m, u), p, m, panels, double_zero)
}

pub fn brute_arch_with(gap: impl Fn(f64) -> f64, p: f64, m: f64, panels: usize, double_zero: bool) -> f64 {
    let k = if double_zero { 2.0 * p / (p - 2.0) } else { 2.0 * p / (p - 1.0) };
    let f = |w: f64| -> f64 {
        if w == 0.0 {
            return 0.0;
        }
        let u = m * w.powf(k);
        k * m * w.powf(k - 1.0) * gap(u).powf(-1.0 / p)
    };
    let h = 1.0 / panels as f64;
    let mut acc = Kahan::default();
    acc.add(0.5 * f(0.0));
    for i in 1..panels {
        acc.add(f(i as f64 * h));
    }
    acc.add(0.5 * f(1.0));
    acc.value() * h
}

fn binomial(n: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(p-1)/p · [2 ∫₀¹ ((t^{q+r}-1)/(q+r) + (1-t^q)/q)^{-1/p} dt]^p`, the
/// flat-core onset for `f = s^{q+r-1}` with integer `q` and `q+r`.
///
/// With `t = 1 - u` the bracket is a polynomial in `u` whose linear terms
/// cancel exactly, so it is expanded before evaluation.
pub fn takeuchi_yamada(p: f64, q: u32, qr: u32, panels: usize) -> f64 {
    let coeffs: Vec<f64> = (1..=qr.max(q))
        .map(|j| {
            let a = if j <= q { binomial(q, j) / q as f64 } else { 0.0 };
            let b = if j <= qr { binomial(qr, j) / qr as f64 } else { 0.0 };
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            sign * (a - b)
        })
        .collect();
    let gap = |u: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c) * u;
    let i = brute_arch_with(gap, p, 1.0, panels, true);
    (p - 1.0) / p * (2.0 * i).powf(p)
}

/// Bisection for the sign change of a monotone `f` on `[lo, hi]`.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let flo = f(lo);
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
