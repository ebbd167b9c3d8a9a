//! Checks of the brute-force references in `common` against closed forms,
//! so that the acceptance suite does not rest on an untested oracle.

mod common;

use common::{bisect, brute_arch, pow_gap, takeuchi_yamada, HalfLine};
use std::f64::consts::PI;

fn agm(mut a: f64, mut b: f64) -> f64 {
    while (a - b).abs() > 1e-16 * a {
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    a
}

/// Complete elliptic integral of the first kind, modulus `k`.
fn ellip_k(k: f64) -> f64 {
    PI / (2.0 * agm(1.0, (1.0 - k * k).sqrt()))
}

#[test]
fn cubic_arch_matches_elliptic_integral() {
    // f = s³, q = p = 2: A(a) - A(t) = (a² - t²)(2 - a² - t²)/4
    let side = HalfLine::power(2.0, 1.0, 4.0);
    for a in [0.1f64, 0.5, 0.9, 0.99] {
        let k = a / (2.0 - a * a).sqrt();
        let exact = 2.0 / (2.0 - a * a).sqrt() * ellip_k(k);
        let brute = brute_arch(&side, 2.0, a, 400_000, false);
        assert!((brute / exact - 1.0).abs() < 1e-9, "a = {a}: {brute} vs {exact}");
    }
}

#[test]
fn linear_arch_is_a_quarter_period() {
    // f ≡ 0 with q = p = 2: ∫₀^a (a² - t²)^{-1/2} √2 dt = π/√2
    let side = HalfLine { q: 2.0, terms: vec![] };
    let brute = brute_arch(&side, 2.0, 0.7, 400_000, false);
    assert!((brute - PI / 2f64.sqrt()).abs() < 1e-10, "{brute}");
}

#[test]
fn takeuchi_yamada_oracle_closed_form() {
    // q = 2, q + r = 4: the bracket is (1 - t²)²/4 and for p = 4 the onset
    // is (3/4)(4^{1/4} B(1/2, 1/2))⁴ = 3π⁴
    let ty = takeuchi_yamada(4.0, 2, 4, 200_000);
    assert!((ty / (3.0 * PI.powi(4)) - 1.0).abs() < 1e-9, "{ty}");
}

#[test]
fn pow_gap_and_bisect() {
    assert!((pow_gap(2.0, 0.5, 3.0) - (8.0 - 1.5f64.powi(3))).abs() < 1e-14);
    assert!((pow_gap(1.0, 1e-12, 2.5) / 2.5e-12 - 1.0).abs() < 1e-10);
    let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 80);
    assert!((r - 2f64.sqrt()).abs() < 1e-15);
}
