use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::config::{DenoiseExperiment, SvmExperiment, ToyExperiment, ValidateExperiment};
use crate::error::{Error, Result, Violation};
use crate::imaging::{self, add_gaussian_noise, read_pgm, synthetic_phantom, write_pgm};
use crate::solvers::{
    accel_feasibility, accel_init, default_tau0, linear_rate_feasibility, linear_rate_init, run,
    validate_vu_params, vu_init, Algorithm, ConstraintCheck, DistanceMetric, Method, RunHooks,
    StopRule, StrongMonotonicityCert, VU_CONDITION,
};
use crate::svm::{
    load_dataset, misclassification_rate, synthetic_blobs, train_detailed, write_model_csv,
    Dataset, DatasetFormat, LabelMapping, SvmConfig,
};
use crate::toy::Toy;

fn say(out: &mut dyn Write, line: impl std::fmt::Display) {
    let _ = writeln!(out, "{line}");
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Denoises a noisy copy of the input (or of the synthetic phantom) and writes
/// `noisy.pgm`, `denoised.pgm`, `rmse.csv` and `diagnostics.csv`.
pub fn cmd_denoise(e: &DenoiseExperiment, out: &mut dyn Write) -> Result<()> {
    let clean = match &e.input {
        Some(p) => read_pgm(p)?,
        None => synthetic_phantom(e.size, e.size),
    };
    let noisy = add_gaussian_noise(&clean, e.noise, e.common.seed);
    let cfg = e.denoise_config();
    let steps = e.steps();
    // validate before spending time on the reference
    let (problem, cert) = imaging::build_denoise_problem(&noisy, &cfg)?;
    steps.method(e.common.algorithm, &problem, &cert)?;

    let (reference, label) = if e.reference_iters > 0 {
        (
            imaging::reference_solution(&noisy, &cfg, e.reference_iters)?,
            "reference solution",
        )
    } else {
        (clean.clone(), "clean image")
    };
    let (x, outcome) = imaging::denoise(
        &noisy,
        &cfg,
        &steps,
        e.common.algorithm,
        e.common.iterations,
        Some((&reference, e.common.tol)),
    )?;

    create_dir(&e.common.out)?;
    write_pgm(e.common.out.join("noisy.pgm"), &noisy)?;
    write_pgm(e.common.out.join("denoised.pgm"), &x)?;
    write_text(&e.common.out.join("rmse.csv"), &imaging::rmse_csv(&outcome))?;
    outcome
        .diagnostics
        .write_csv(e.common.out.join("diagnostics.csv"))?;

    say(
        out,
        format_args!(
            "denoise: {} on {}x{}, {} TV, noise {}, lambda1 {}, lambda2 {}, seed {}",
            e.common.algorithm,
            noisy.rows(),
            noisy.cols(),
            cfg.variant,
            e.noise,
            cfg.lambda1,
            cfg.lambda2,
            e.common.seed
        ),
    );
    match (e.common.tol, outcome.reached_tol_at) {
        (Some(t), Some(n)) => say(
            out,
            format_args!("iterations to rmse <= {t:e} against the {label}: {n}"),
        ),
        (Some(t), None) => say(
            out,
            format_args!(
                "rmse <= {t:e} against the {label} not reached in {} iterations",
                e.common.iterations
            ),
        ),
        _ => {}
    }
    say(
        out,
        format_args!(
            "final rmse to the {label}: {:.6e}",
            imaging::rmse(&x, &reference)?
        ),
    );
    say(
        out,
        format_args!(
            "final rmse to the clean image: {:.6e}",
            imaging::rmse(&x, &clean)?
        ),
    );
    Ok(())
}

fn load_svm_data(e: &SvmExperiment) -> Result<(Dataset, Option<Dataset>)> {
    let Some(train) = &e.train else {
        let all = synthetic_blobs(e.n_train + e.n_test, e.dim, e.separation, e.common.seed)?;
        let tr = all.select(&(0..e.n_train).collect::<Vec<_>>());
        let te = (e.n_test > 0)
            .then(|| all.select(&(e.n_train..e.n_train + e.n_test).collect::<Vec<_>>()));
        return Ok((tr, te));
    };
    let mapping = LabelMapping {
        negative: e.label_negative,
        positive: e.label_positive,
        skip_unmapped: e.skip_unmapped,
    };
    let format = |labels: &Option<std::path::PathBuf>| -> Result<DatasetFormat> {
        if e.format == "csv" {
            return Ok(DatasetFormat::Csv);
        }
        let labels = labels
            .clone()
            .ok_or_else(|| Error::Config("idx format needs a label file".into()))?;
        Ok(DatasetFormat::IdxPair {
            labels,
            mapping: mapping.clone(),
        })
    };
    let mut tr = load_dataset(train, &format(&e.train_labels)?)?;
    if e.subsample > 0 {
        tr = tr.subsample(e.subsample, e.common.seed)?;
    }
    let te = match &e.test {
        Some(p) => Some(load_dataset(p, &format(&e.test_labels)?)?),
        None => None,
    };
    if let Some(te) = &te {
        crate::error::check_dim(tr.dim(), te.dim())?;
    }
    Ok((tr, te))
}

/// Trains one model per kernel width and reports training and test
/// misclassification percentages as a two-row table.
pub fn cmd_svm(e: &SvmExperiment, out: &mut dyn Write) -> Result<()> {
    let (train, test) = load_svm_data(e)?;
    create_dir(&e.common.out)?;

    let mut metrics = String::from("sigma,train_error,test_error,lambda_min\n");
    let mut header = String::from("sigma         ");
    let mut train_row = String::from("training error");
    let mut test_row = String::from("test error    ");
    let mut first_failure = None;
    for (i, &sigma) in e.sigmas.iter().enumerate() {
        let cfg = SvmConfig {
            c: e.c,
            kernel_sigma: sigma,
            iterations: e.common.iterations,
        };
        let _ = write!(header, " {sigma:>8}");
        match train_detailed(&train, &cfg, true) {
            Ok(rep) => {
                let tr = misclassification_rate(&rep.model, &train)?;
                let te = test
                    .as_ref()
                    .map(|t| misclassification_rate(&rep.model, t))
                    .transpose()?;
                let _ = write!(train_row, " {tr:>8.2}");
                let _ = match te {
                    Some(te) => write!(test_row, " {te:>8.2}"),
                    None => write!(test_row, " {:>8}", "-"),
                };
                let _ = writeln!(
                    metrics,
                    "{sigma:.16e},{tr:.16e},{},{:.16e}",
                    te.map(|v| format!("{v:.16e}")).unwrap_or_default(),
                    rep.lambda_min
                );
                write_model_csv(e.common.out.join(format!("model_{i}.csv")), &rep.model)?;
                rep.outcome
                    .diagnostics
                    .write_csv(e.common.out.join(format!("diagnostics_{i}.csv")))?;
            }
            Err(err @ Error::NotStronglyConvex { .. }) => {
                let _ = write!(train_row, " {:>8}", "-");
                let _ = write!(test_row, " {:>8}", "-");
                let _ = writeln!(metrics, "{sigma:.16e},,,");
                say(out, format_args!("sigma {sigma}: {err}"));
                first_failure.get_or_insert(err);
            }
            Err(err) => return Err(err),
        }
    }
    write_text(&e.common.out.join("metrics.csv"), &metrics)?;
    say(
        out,
        format_args!(
            "svm: {} training samples, {} test samples, C {}, {} iterations (misclassification in %)",
            train.len(),
            test.as_ref().map_or(0, Dataset::len),
            e.c,
            e.common.iterations
        ),
    );
    say(out, header);
    say(out, train_row);
    say(out, test_row);
    first_failure.map_or(Ok(()), Err)
}

/// Runs the chosen method on a toy with known solution; the diagnostics carry
/// the distance to it and the method's convergence inequality.
pub fn cmd_toy(e: &ToyExperiment, out: &mut dyn Write) -> Result<()> {
    let toy = Toy {
        kind: e.kind,
        dim: e.dim,
        z: e.z,
        nu: e.nu,
    };
    let problem = toy.problem();
    let cert = toy.cert()?;
    let norms_sq = toy.norms_sq();
    let eta = toy.eta();
    let method = match e.common.algorithm {
        Algorithm::Accel => {
            if e.nu > 0.0 {
                return Err(Error::Config(
                    "the accelerated method needs D_i^-1 = 0 (set nu = 0)".into(),
                ));
            }
            let tau0 = match e.tau0 {
                Some(t) => t,
                None => default_tau0(&[e.sigma0], &norms_sq, &cert, eta, e.lambda)?,
            };
            Method::Accel(accel_init(
                tau0,
                &[e.sigma0],
                e.lambda,
                &cert,
                eta,
                &norms_sq,
            )?)
        }
        Algorithm::Vu => {
            let (beta, nu) = problem.vu_constants();
            Method::Vu(vu_init(e.vu_tau, &[e.vu_sigma], beta, &nu, &norms_sq)?)
        }
        Algorithm::Linear => Method::Linear(linear_rate_init(
            &cert,
            eta,
            &problem.nu(),
            &norms_sq,
            e.theta,
        )?),
    };
    let solution = toy.solution();
    let stop = StopRule {
        max_iters: e.common.iterations,
        reference: Some(solution.x.clone()),
        tol: e.common.tol,
        metric: DistanceMetric::Euclidean,
    };
    let hooks = RunHooks {
        certificate: (e.common.algorithm != Algorithm::Vu).then(|| (solution, cert.clone())),
        seed: Some(e.common.seed),
        ..RunHooks::default()
    };
    let outcome = run(&problem, method, toy.start(), &stop, hooks)?;

    create_dir(&e.common.out)?;
    outcome
        .diagnostics
        .write_csv(e.common.out.join("diagnostics.csv"))?;

    say(
        out,
        format_args!(
            "toy: {:?}, {} for {} iterations",
            e.kind,
            e.common.algorithm,
            outcome.diagnostics.len()
        ),
    );
    if let Some(last) = outcome.diagnostics.last() {
        say(
            out,
            format_args!(
                "final distance to the solution: {:.6e}",
                last.dist_to_ref.unwrap_or(f64::NAN)
            ),
        );
        if let Method::Accel(s) = &outcome.method {
            say(
                out,
                format_args!(
                    "n*tau_n = {:.6}, lambda/gamma = {:.6}",
                    last.n_tau_n,
                    s.lambda / s.gamma
                ),
            );
        }
    }
    if e.common.algorithm != Algorithm::Vu {
        let violated = outcome
            .diagnostics
            .records
            .iter()
            .filter(|r| r.cert.is_some_and(|c| !c.holds(1e-9)))
            .count();
        say(out, format_args!("certificate violations: {violated}"));
    }
    Ok(())
}

fn report(out: &mut dyn Write, checks: &[ConstraintCheck]) -> Result<()> {
    for c in checks {
        let tag = if c.satisfied { "ok  " } else { "FAIL" };
        say(
            out,
            format_args!("  {tag} {}  (margin {:.6e})", c.name, c.margin),
        );
    }
    let bad: Vec<Violation> = checks
        .iter()
        .filter(|c| !c.satisfied)
        .map(|c| Violation {
            constraint: c.name,
            margin: c.margin,
        })
        .collect();
    if bad.is_empty() {
        say(out, "feasible");
        Ok(())
    } else {
        say(out, "infeasible");
        Err(Error::Infeasible(bad))
    }
}

/// Prints every step-size constraint of the chosen method with its margin.
pub fn cmd_validate(e: &ValidateExperiment, out: &mut dyn Write) -> Result<()> {
    say(out, format_args!("{} parameters:", e.common.algorithm));
    match e.common.algorithm {
        Algorithm::Accel => {
            let cert = StrongMonotonicityCert::new(e.gamma)?;
            let checks = accel_feasibility(e.tau0, &e.sigma0, e.lambda, &cert, e.eta, &e.norms_sq)?;
            report(out, &checks)
        }
        Algorithm::Vu => {
            let nu =
                e.nu.clone()
                    .unwrap_or_else(|| vec![f64::INFINITY; e.norms_sq.len()]);
            let r = validate_vu_params(e.tau, &e.sigma, e.beta, &nu, &e.norms_sq)?;
            let check = ConstraintCheck {
                name: VU_CONDITION,
                margin: r.margin,
                satisfied: r.feasible,
            };
            report(out, &[check])
        }
        Algorithm::Linear => {
            let cert = StrongMonotonicityCert::new(e.gamma)?.with_delta(e.delta.clone())?;
            let nu = e.nu.clone().unwrap_or_else(|| vec![0.0; e.norms_sq.len()]);
            let (p, checks) = linear_rate_feasibility(&cert, e.eta, &nu, &e.norms_sq, e.theta)?;
            say(
                out,
                format_args!(
                    "  mu {:.6e}, tau {:.6e}, theta {:.6e}, omega {:.6e}",
                    p.mu, p.tau, p.theta, p.omega
                ),
            );
            report(out, &checks)
        }
    }
}
