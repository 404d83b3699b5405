// TV + Haar denoising of a synthetic phantom, comparing the accelerated and
// baseline iterations against a long accelerated reference run.

use std::path::{Path, PathBuf};

use pdsplit::imaging::{
    add_gaussian_noise, denoise, reference_solution, rmse, synthetic_phantom, write_pgm,
    DenoiseConfig, DenoiseSteps, TvVariant,
};
use pdsplit::solvers::Algorithm;

pub fn run_example_in(out_dir: &Path) -> Result<(), Box<dyn std::error::Error>> {
    std::fs::create_dir_all(out_dir)?;
    let clean = synthetic_phantom(64, 64);
    let noisy = add_gaussian_noise(&clean, 0.06, 11);
    let cfg = DenoiseConfig::for_noise_level(0.06, TvVariant::Isotropic);
    let steps = DenoiseSteps::default();

    let reference = reference_solution(&noisy, &cfg, 3000)?;
    println!(
        "noisy rmse {:.4}, reference rmse {:.4}",
        rmse(&noisy, &clean)?,
        rmse(&reference, &clean)?
    );

    for algorithm in [Algorithm::Accel, Algorithm::Vu] {
        let (img, outcome) = denoise(
            &noisy,
            &cfg,
            &steps,
            algorithm,
            2000,
            Some((&reference, Some(1e-4))),
        )?;
        match outcome.reached_tol_at {
            Some(n) => println!(
                "{:>5}: rmse to reference <= 1e-4 after {n} iterations",
                algorithm.name()
            ),
            None => println!(
                "{:>5}: tolerance not reached in 2000 iterations",
                algorithm.name()
            ),
        }
        write_pgm(
            out_dir.join(format!("denoised_{}.pgm", algorithm.name())),
            &img,
        )?;
    }
    write_pgm(out_dir.join("clean.pgm"), &clean)?;
    write_pgm(out_dir.join("noisy.pgm"), &noisy.clipped())?;
    println!("images written to {}", out_dir.display());
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    run_example_in(&std::env::temp_dir().join("pdsplit-denoise-example"))
}

#[allow(dead_code)]
fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out/denoise-example"));
    if let Err(e) = run_example_in(&dir) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
