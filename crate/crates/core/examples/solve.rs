//! Enumerates every solution class up to j = 4 at a fixed λ.
use plap::solver::enumerate;
use plap::timemap::Problem;
use plap::{Family, Nonlinearity};

fn main() -> plap::Result<()> {
    let nl = Nonlinearity::new(Family::PowerAsym { b_plus: 1.0, b_minus: 1.0, r_exp: 4.0 }, 2.0)?;
    let problem = Problem::new(2.0, nl, 200.0)?;
    let found = enumerate(&problem, 4)?;
    println!("lambda = {}: {} nontrivial solutions besides phi = 0", found.lambda, found.descriptors.len());
    for d in &found.descriptors {
        println!("{:<28} r = {:<22} residual = {:.1e}", d.id, d.r, d.residual);
    }
    Ok(())
}
