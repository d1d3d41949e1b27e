use std::time::Instant;

use knotkit::gen::random_knot;
use knotkit::pipeline::{run_pipeline, PipelineOutcome};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn probe() {
    let t0 = Instant::now();
    let mut reduced = 0usize;
    let mut degen = 0usize;
    for seed in 0..2000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_knot(&mut rng, 16);
        match run_pipeline(&d, true).unwrap() {
            PipelineOutcome::Reduced(_) => reduced += 1,
            PipelineOutcome::NonHyperbolic(_) => degen += 1,
        }
    }
    let dt = t0.elapsed();
    println!("2000 pipelines: {dt:?} ({reduced} reduced, {degen} degenerate)");
    println!("projected 10^4: {:?}", dt * 5);
}
