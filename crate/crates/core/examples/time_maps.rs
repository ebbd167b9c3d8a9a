//! Samples the half-width maps θ(r) and α(r) and the branch integrals I, J.
use plap::timemap::{alpha, integral_I, integral_J, slope_bounds, theta, Problem};
use plap::{Family, Nonlinearity};

fn main() -> plap::Result<()> {
    let nl = Nonlinearity::new(Family::PowerAsym { b_plus: 1.0, b_minus: 2.0, r_exp: 4.0 }, 2.0)?;
    let problem = Problem::new(3.0, nl.clone(), 50.0)?;
    let bounds = slope_bounds(&problem);
    println!("slope bounds: r+ = {:.6}, r- = {:.6}", bounds.r_pos, bounds.r_neg);
    println!("{:>8} {:>14} {:>14}", "r/r_b", "theta", "alpha");
    for frac in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.9999] {
        let t = theta(&problem, frac * bounds.r_pos)?;
        let a = alpha(&problem, frac * bounds.r_neg)?;
        println!("{frac:>8} {t:>14.10} {a:>14.10}");
    }
    let (zp, zm) = (nl.z_plus(), nl.z_minus());
    println!("I(z+) = {:.12}, J(z-) = {:.12}", integral_I(&nl, 3.0, zp)?, integral_J(&nl, 3.0, zm)?);
    Ok(())
}
