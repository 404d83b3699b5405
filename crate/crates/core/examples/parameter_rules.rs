// Step-size rules: checking a baseline choice, deriving the accelerated
// start, and reading the linear-rate parameters off the constants.

use pdsplit::solvers::{
    accel_feasibility, accel_init, default_tau0, linear_rate_init, validate_vu_params,
    StrongMonotonicityCert,
};
use pdsplit::Error;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // one block with |L|^2 = 8, as for the image gradient
    let norms = [8.0];
    let r = validate_vu_params(0.1, &[0.1], 1.0, &[f64::INFINITY], &norms)?;
    println!(
        "baseline tau = sigma = 0.1: feasible = {}, margin {:.4}",
        r.feasible, r.margin
    );
    let r = validate_vu_params(0.5, &[0.5], 1.0, &[f64::INFINITY], &norms)?;
    println!(
        "baseline tau = sigma = 0.5: feasible = {}, margin {:.4}",
        r.feasible, r.margin
    );

    let cert = StrongMonotonicityCert::new(1.0)?;
    let (eta, lambda) = (1.0, 2.0);
    for check in accel_feasibility(1.0, &[0.15], lambda, &cert, eta, &norms)? {
        println!(
            "  {:<5} {} (margin {:.4})",
            if check.satisfied { "ok" } else { "FAIL" },
            check.name,
            check.margin
        );
    }
    let tau0 = default_tau0(&[0.15], &norms, &cert, eta, lambda)?;
    let schedule = accel_init(tau0, &[0.15], lambda, &cert, eta, &norms)?;
    println!(
        "largest admissible tau0 for sigma0 = 0.15: {tau0:.4}, theta0 = {:.4}",
        schedule.theta
    );

    match accel_init(2.0, &[0.15], lambda, &cert, eta, &norms) {
        Err(Error::Infeasible(v)) => println!("tau0 = 2 rejected by: {}", v[0].constraint),
        other => println!("unexpected: {other:?}"),
    }

    let cert = cert.with_delta(vec![1.0])?;
    let p = linear_rate_init(&cert, 0.0, &[0.0], &[1.0], None)?;
    println!(
        "linear rate: mu = {:.4}, tau = {:.4}, sigma = {:.4}, theta = {:.4}, omega = {:.4}",
        p.mu, p.tau, p.sigma[0], p.theta, p.omega
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
