// Proximity operators from the library, their conjugates via Moreau's
// decomposition, and the resolvent of the inverse operator.

use pdsplit::operators::{conjugate_prox, resolvent_of_inverse, ProxMap};
use pdsplit::proxlib::{
    BoxProjection, BoxSupport, GroupSoftThreshold, HingeConjugate, HingeLoss, PixelwiseBall,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let x = [1.5, -0.2, 0.7, -2.0];
    let gamma = 0.8;
    let labels = vec![1.0, -1.0, 1.0, -1.0];
    let hinge = HingeLoss::new(labels.clone(), 1.0)?;
    let hinge_conj = HingeConjugate::new(labels, 1.0)?;
    // each function next to its conjugate
    let pairs: [(&dyn ProxMap, &dyn ProxMap); 3] = [
        (
            &BoxSupport { lo: -0.5, hi: 0.5 },
            &BoxProjection::symmetric(0.5),
        ),
        (
            &GroupSoftThreshold { weight: 0.6 },
            &PixelwiseBall { radius: 0.6 },
        ),
        (&hinge, &hinge_conj),
    ];
    for (f, fstar) in pairs {
        let via_moreau = conjugate_prox(f, &x, gamma)?;
        let direct = fstar.evaluate(&x, gamma);
        let gap = via_moreau
            .iter()
            .zip(&direct)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!("{:<40} prox = {:?}", f.descriptor(), f.evaluate(&x, gamma));
        println!("{:<40} conjugate prox gap {gap:.1e}", "");

        let scaled: Vec<f64> = x.iter().map(|v| v / gamma).collect();
        let inv = resolvent_of_inverse(f, &scaled, gamma)?;
        let recon: Vec<f64> = f
            .evaluate(&x, gamma)
            .iter()
            .zip(&inv)
            .map(|(a, b)| a + gamma * b)
            .collect();
        let err = recon
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!("{:<40} resolvent identity error {err:.1e}", "");
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
