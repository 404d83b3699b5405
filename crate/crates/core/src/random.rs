//! Seeded standard-normal draws (ChaCha8 with the Box–Muller transform), so
//! every experiment is reproducible from a single `u64`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A pair of independent standard normals.
pub fn box_muller(rng: &mut impl Rng) -> (f64, f64) {
    // 1 - U is in (0, 1], so the logarithm is finite
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = std::f64::consts::TAU * u2;
    (r * t.cos(), r * t.sin())
}

pub fn standard_normals(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k + 1);
    while out.len() < k {
        let (a, b) = box_muller(rng);
        out.push(a);
        out.push(b);
    }
    out.truncate(k);
    out
}
