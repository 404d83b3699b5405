//! Experiment runner: `pdsplit <denoise|svm|toy|validate> [flags]`.
//!
//! Settings come from `--config FILE` (TOML, one table per command) and are
//! overridden by flags. Exit codes: 0 success, 2 configuration error,
//! 3 I/O error, 4 infeasible parameters.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pdsplit::harness::{execute, Command};

#[derive(Parser)]
#[command(name = "pdsplit", version, about = "Primal-dual splitting experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// TOML settings file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// vu, accel or linear.
    #[arg(long, global = true)]
    algorithm: Option<String>,
    #[arg(long, global = true)]
    iterations: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Any setting as KEY=VALUE (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

/// Declares a flag struct whose fields map one-to-one onto setting keys.
macro_rules! flags {
    ($name:ident { $($field:ident),* $(,)? }) => {
        #[derive(Args)]
        struct $name {
            $(#[arg(long)] $field: Option<String>,)*
        }

        impl $name {
            fn pairs(&self) -> Vec<(String, String)> {
                let mut v = Vec::new();
                $(if let Some(x) = &self.$field { v.push((stringify!($field).to_string(), x.clone())); })*
                v
            }
        }
    };
}

flags!(DenoiseFlags {
    input,
    size,
    noise,
    lambda1,
    lambda2,
    variant,
    levels,
    tau0,
    sigma0,
    lambda,
    vu_tau,
    vu_sigma,
    reference_iters,
});
flags!(SvmFlags {
    train,
    test,
    format,
    train_labels,
    test_labels,
    label_negative,
    label_positive,
    skip_unmapped,
    subsample,
    n_train,
    n_test,
    dim,
    separation,
    c,
    sigmas,
});
flags!(ToyFlags {
    kind,
    dim,
    z,
    nu,
    lambda,
    tau0,
    sigma0,
    vu_tau,
    vu_sigma,
    theta
});
flags!(ValidateFlags {
    gamma,
    eta,
    lambda,
    tau0,
    sigma0,
    norms_sq,
    tau,
    sigma,
    beta,
    nu,
    delta,
    theta
});

#[derive(Subcommand)]
enum Cmd {
    /// Denoise an image (or a synthetic phantom) with TV and wavelet penalties.
    Denoise(DenoiseFlags),
    /// Train kernel SVMs over a sweep of kernel widths.
    Svm(SvmFlags),
    /// Run a solver on a toy problem with known solution.
    Toy(ToyFlags),
    /// Check step-size parameters against the convergence conditions.
    Validate(ValidateFlags),
}

#[derive(Parser)]
struct Wrapper {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    cli: Cli,
}

fn main() {
    let Wrapper { common, cli } = Wrapper::parse();
    let (command, mut overrides) = match &cli.command {
        Cmd::Denoise(f) => (Command::Denoise, f.pairs()),
        Cmd::Svm(f) => (Command::Svm, f.pairs()),
        Cmd::Toy(f) => (Command::Toy, f.pairs()),
        Cmd::Validate(f) => (Command::Validate, f.pairs()),
    };
    for (k, v) in [
        ("algorithm", &common.algorithm),
        ("iterations", &common.iterations),
        ("seed", &common.seed),
        ("tol", &common.tol),
        ("out", &common.out),
    ] {
        if let Some(v) = v {
            overrides.push((k.to_string(), v.clone()));
        }
    }
    for kv in &common.set {
        match kv.split_once('=') {
            Some((k, v)) => overrides.push((k.trim().to_string(), v.trim().to_string())),
            None => {
                eprintln!("error: --set expects KEY=VALUE, got '{kv}'");
                std::process::exit(pdsplit::harness::EXIT_CONFIG);
            }
        }
    }
    let code = execute(
        command,
        common.config.as_deref(),
        &overrides,
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    std::process::exit(code);
}
