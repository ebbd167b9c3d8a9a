//! Critical points and smoothness of solutions for several p.
use plap::profile::{classify_regularity, reconstruct};
use plap::solver::{solve_class, SolutionClass};
use plap::timemap::Problem;
use plap::{Family, Nonlinearity, Side};

fn main() -> plap::Result<()> {
    let nl = Nonlinearity::new(Family::PowerAsym { b_plus: 1.0, b_minus: 1.0, r_exp: 4.0 }, 2.0)?;
    for (p, lambda) in [(2.0, 40.0), (3.0, 100.0), (3.0, 2000.0), (5.0, 20000.0)] {
        let problem = Problem::new(p, nl.clone(), lambda)?;
        let Some(d) = solve_class(&problem, SolutionClass::new(2, Side::Positive))?.pop() else {
            continue;
        };
        let prof = reconstruct(&problem, &d, 1025, None)?;
        let rep = classify_regularity(&problem, &prof);
        println!("p = {p}, lambda = {lambda}: {:?}", rep.smoothness_class);
        for c in &rep.critical {
            println!(
                "  {:?} at x = {:.6}: phi = {:.6}, C2 = {}, |phi_x|/d^(1/(p-1)) -> {:.6} (limit {:.6})",
                c.kind, c.chi, c.value, c.c2, c.limit.extrapolated, c.limit.energy_limit
            );
        }
    }
    Ok(())
}
