//! Bifurcation thresholds in the three regimes q < p, q = p and q > p.
use plap::bifurcation::bifurcation_table;
use plap::cli::diagram_csv;
use plap::{Family, Nonlinearity};

fn main() -> plap::Result<()> {
    let cubic = |q: f64| Nonlinearity::new(Family::PowerAsym { b_plus: 1.0, b_minus: 1.0, r_exp: q + 2.0 }, q);
    for (q, p) in [(2.0, 3.0), (2.0, 2.0), (3.0, 2.5)] {
        println!("q = {q}, p = {p}");
        print!("{}", diagram_csv(&bifurcation_table(&cubic(q)?, p, 4)?));
        println!();
    }
    Ok(())
}
