//! Checks reconstructed solutions against the energy identity and an
//! independent shooting trajectory.
use plap::profile::{shoot, verify};
use plap::solver::enumerate;
use plap::timemap::Problem;
use plap::{Family, Nonlinearity, Side};

fn main() -> plap::Result<()> {
    let nl = Nonlinearity::new(Family::PowerAsym { b_plus: 1.0, b_minus: 0.5, r_exp: 4.0 }, 2.0)?;
    let problem = Problem::new(2.5, nl, 150.0)?;
    for d in enumerate(&problem, 3)?.descriptors {
        let rep = verify(&problem, &d)?;
        println!(
            "{:<28} energy {:.1e}  shooting {:.1e}  phi(1) {:.1e}  pass {}",
            rep.id, rep.energy_residual, rep.oracle_sup_diff, rep.boundary_phi, rep.pass
        );
    }
    let traj = shoot(&problem, 1.0, Side::Positive, 20_000)?;
    println!("shot with r = 1: {} interior nodes, phi(1) = {:.6}", traj.nodes.len(), traj.phi.last().unwrap());
    Ok(())
}
