// The three iterations on a scalar problem with a known solution, with the
// convergence inequality of each accelerated/linear run checked at every step.

use pdsplit::solvers::{
    accel_init, default_tau0, linear_rate_init, run, vu_init, Method, RunHooks, StopRule,
};
use pdsplit::toy::{Toy, ToyKind};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let toy = Toy::scalar(ToyKind::Forward).with_z(1.0);
    let problem = toy.problem();
    let cert = toy.cert()?;
    let solution = toy.solution();
    let norms = toy.norms_sq();
    let stop = StopRule {
        max_iters: 2000,
        reference: Some(solution.x.clone()),
        ..StopRule::default()
    };

    let lambda = 2.0;
    let tau0 = default_tau0(&[0.5], &norms, &cert, toy.eta(), lambda)?;
    let accel = accel_init(tau0, &[0.5], lambda, &cert, toy.eta(), &norms)?;
    let (beta, nu) = problem.vu_constants();
    let methods = [
        Method::Vu(vu_init(0.5, &[0.5], beta, &nu, &norms)?),
        Method::Accel(accel),
        Method::Linear(linear_rate_init(&cert, toy.eta(), &[0.0], &norms, None)?),
    ];

    for method in methods {
        let name = method.name();
        let certify = !matches!(method, Method::Vu(_));
        let hooks = RunHooks {
            certificate: certify.then(|| (solution.clone(), cert.clone())),
            ..RunHooks::default()
        };
        let out = run(&problem, method, toy.start(), &stop, hooks)?;
        let records = &out.diagnostics.records;
        let at = |n: usize| records[n - 1].dist_to_ref.unwrap_or(f64::NAN);
        let violations = records
            .iter()
            .filter(|r| r.cert.is_some_and(|c| !c.holds(1e-9)))
            .count();
        println!(
            "{name:>6}: |x_n - x*| = {:.2e} (n=10), {:.2e} (n=100), {:.2e} (n=2000); certificate violations {violations}",
            at(10),
            at(100),
            at(2000)
        );
        if let Method::Accel(s) = &out.method {
            println!(
                "        n*tau_n = {:.4} (lambda/gamma = {})",
                records[records.len() - 1].n_tau_n,
                s.lambda / s.gamma
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
