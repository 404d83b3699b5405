// Power-iteration norm estimates for the image operators and adjoint checks.

use pdsplit::imaging::{Gradient, Haar};
use pdsplit::operators::{check_adjoint, estimate_norm};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for n in [8, 32, 128] {
        let g = Gradient::new(n, n);
        let est = estimate_norm(&g, 5000, 1e-12, 1)?;
        println!(
            "gradient {n}x{n}: |L|^2 ~ {:.6} (bound 8), adjoint error {:.1e}",
            est * est,
            check_adjoint(&g, 5, 2)
        );
    }
    let w = Haar::new(64, 64, 4)?;
    println!(
        "haar 64x64, 4 levels: |W| ~ {:.12}, adjoint error {:.1e}",
        estimate_norm(&w, 100, 1e-14, 1)?,
        check_adjoint(&w, 5, 2)
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
