//! Solution-set structure when the two sides enclose different areas.
use plap::bifurcation::{structure, AreaRelation};
use plap::timemap::Problem;
use plap::{Family, Nonlinearity};

fn main() -> plap::Result<()> {
    let nl = Nonlinearity::new(Family::PowerAsym { b_plus: 2.0, b_minus: 1.0, r_exp: 4.0 }, 2.0)?;
    let (ap, am) = nl.areas();
    println!("A+ = {ap:.4}, A- = {am:.4}: {:?}", AreaRelation::of(&nl));
    let problem = Problem::new(3.0, nl, 3000.0)?;
    let rep = structure(&problem, 6)?;
    for c in &rep.classes {
        println!(
            "j = {} {:<8} {:<9} regular {}  flat core {:<5} family dim {:?}",
            c.j,
            c.sign.as_str(),
            format!("{:?}", c.tag),
            c.regular,
            c.flat_core,
            c.continuum_dim
        );
    }
    Ok(())
}
