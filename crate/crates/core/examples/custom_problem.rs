// Assembling a problem by hand: 1-D total variation denoising of a step
// signal, `min ½‖x − b‖² + λ‖Dx‖₁` over `x ∈ [0, 1]ⁿ`, with `D` the forward
// difference matrix.

use pdsplit::operators::DenseMatrix;
use pdsplit::proxlib::{BoxProjection, QuadBoxProx};
use pdsplit::random::{rng, standard_normals};
use pdsplit::solvers::{
    accel_init, default_tau0, run, vu_init, DualBlock, IterateState, Method, PrimalDualProblem,
    RunHooks, StopRule, StrongMonotonicityCert,
};

fn difference_matrix(n: usize) -> Result<DenseMatrix, pdsplit::Error> {
    let mut d = vec![0.0; (n - 1) * n];
    for i in 0..n - 1 {
        d[i * n + i] = -1.0;
        d[i * n + i + 1] = 1.0;
    }
    DenseMatrix::from_row_major(n - 1, n, d)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 100;
    let noise = standard_normals(&mut rng(3), n);
    let b: Vec<f64> = (0..n)
        .map(|i| if i < n / 2 { 0.2 } else { 0.8 } + 0.1 * noise[i])
        .collect();
    let lambda = 0.5;

    // prox of ½‖· − b‖² plus the box, and the dual ball of λ‖·‖₁
    let problem = PrimalDualProblem::new(n, QuadBoxProx { b: b.clone() }).with_block(
        DualBlock::new(BoxProjection::symmetric(lambda), difference_matrix(n)?),
    );
    let cert = StrongMonotonicityCert::new(1.0)?;
    let norms_sq = problem.norms_sq(0)?;
    println!("|D|^2 ~ {:.4}", norms_sq[0]);

    let accel = || -> Result<Method, pdsplit::Error> {
        let tau0 = default_tau0(&[0.2], &norms_sq, &cert, 0.0, 1.0)?;
        Ok(Method::Accel(accel_init(
            tau0,
            &[0.2],
            1.0,
            &cert,
            0.0,
            &norms_sq,
        )?))
    };
    let (beta, nu) = problem.vu_constants();
    let vu = || vu_init(0.45, &[0.45], beta, &nu, &norms_sq).map(Method::Vu);
    let reference = run(
        &problem,
        vu()?,
        IterateState::zeros(&problem),
        &StopRule::iterations(50_000),
        RunHooks::default(),
    )?
    .state
    .x;

    let methods = [accel()?, vu()?];
    for method in methods {
        let name = method.name();
        let stop = StopRule {
            max_iters: 20_000,
            reference: Some(reference.clone()),
            tol: Some(1e-6),
            ..StopRule::default()
        };
        let out = run(
            &problem,
            method,
            IterateState::zeros(&problem),
            &stop,
            RunHooks::default(),
        )?;
        match out.reached_tol_at {
            Some(k) => println!("{name:>5}: within 1e-6 of the reference after {k} iterations"),
            None => {
                let d = out
                    .diagnostics
                    .last()
                    .and_then(|r| r.dist_to_ref)
                    .unwrap_or(f64::NAN);
                println!("{name:>5}: distance {d:.1e} after 20000 iterations");
            }
        }
    }
    let jumps = reference
        .windows(2)
        .filter(|w| (w[1] - w[0]).abs() > 1e-3)
        .count();
    println!("reconstruction has {jumps} jumps larger than 1e-3");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
