//! A flat-core solution for p > 2: the plateau budget may be split freely
//! between the admissible cores.
use plap::bifurcation::bifurcation_table;
use plap::profile::reconstruct;
use plap::solver::{solve_class, Kind, SolutionClass};
use plap::timemap::Problem;
use plap::{Family, Nonlinearity, Side};

fn main() -> plap::Result<()> {
    let nl = Nonlinearity::new(Family::PowerAsym { b_plus: 1.0, b_minus: 1.0, r_exp: 4.0 }, 2.0)?;
    let p = 3.0;
    let onset = bifurcation_table(&nl, p, 3)?.tilde(3, Side::Positive);
    let problem = Problem::new(p, nl, 1.5 * onset)?;
    let class = SolutionClass::new(3, Side::Positive);
    let d = solve_class(&problem, class)?
        .into_iter()
        .find(|d| d.kind == Kind::FlatCore)
        .expect("above the onset the class has a flat core");
    println!("onset {onset:.6}, lambda {:.6}: {} cores sharing {:.6}", problem.lambda, d.core_count, d.core_budget);
    let n = d.core_count;
    let even = vec![d.core_budget / n as f64; n];
    let mut lopsided = vec![0.0; n];
    lopsided[0] = d.core_budget;
    for cores in [even, lopsided] {
        let prof = reconstruct(&problem, &d, 401, Some(&cores))?;
        let max = prof.phi.iter().cloned().fold(f64::MIN, f64::max);
        println!("cores {cores:.4?}: plateaus {:.4?}, max phi {max:.12}", prof.flat_intervals);
    }
    Ok(())
}
