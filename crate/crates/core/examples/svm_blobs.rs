// Gaussian-kernel SVM on two synthetic clusters for a few kernel widths.

use pdsplit::svm::{misclassification_rate, synthetic_blobs, train_detailed, SvmConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let all = synthetic_blobs(300, 10, 4.0, 7)?;
    let train_set = all.select(&(0..150).collect::<Vec<_>>());
    let test_set = all.select(&(150..300).collect::<Vec<_>>());

    println!(
        "{:>6} {:>10} {:>10} {:>12}",
        "sigma", "train %", "test %", "lambda_min"
    );
    for sigma in [0.1, 0.2, 0.5, 1.0] {
        let cfg = SvmConfig {
            c: 1.0,
            kernel_sigma: sigma,
            iterations: 1500,
        };
        match train_detailed(&train_set, &cfg, false) {
            Ok(rep) => println!(
                "{sigma:>6} {:>10.2} {:>10.2} {:>12.3e}",
                misclassification_rate(&rep.model, &train_set)?,
                misclassification_rate(&rep.model, &test_set)?,
                rep.lambda_min
            ),
            // a wide kernel makes the Gram matrix numerically singular
            Err(e) => println!("{sigma:>6} skipped: {e}"),
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
