//! Checks the structural hypotheses on a few nonlinearities.
use plap::{Family, Nonlinearity};

fn main() -> plap::Result<()> {
    let cases = [
        ("cubic, q = 2", Family::PowerAsym { b_plus: 1.0, b_minus: 1.0, r_exp: 4.0 }, 2.0),
        ("asymmetric cubic", Family::PowerAsym { b_plus: 1.0, b_minus: 0.5, r_exp: 4.0 }, 2.0),
        ("sublinear f", Family::PowerAsym { b_plus: 1.0, b_minus: 1.0, r_exp: 1.5 }, 2.0),
        ("s^3 + s^5", Family::Polynomial { coeffs: vec![0.0, 0.0, 1.0, 0.0, 1.0] }, 2.0),
    ];
    for (name, family, q) in cases {
        let nl = Nonlinearity::new_unchecked(family, q)?;
        let report = nl.validate();
        println!("{name:>18}: pass = {:<5} z+ = {:.6}  z- = {:.6}  ({})", report.pass, nl.z_plus(), nl.z_minus(), report.summary());
    }
    Ok(())
}
