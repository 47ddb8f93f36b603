#![allow(dead_code)]

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wolfflab::rearrangement::{GridFunction, StepProfile};

/// Non-increasing step profile with up to `max_pieces` steps.
pub fn profile(max_pieces: usize) -> impl Strategy<Value = StepProfile> {
    prop::collection::vec((0.05f64..1.5, 0.01f64..5.0), 1..=max_pieces).prop_map(|pieces| {
        let mut values: Vec<f64> = pieces.iter().map(|p| p.1).collect();
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut acc = 0.0;
        let ends = pieces
            .iter()
            .map(|p| {
                acc += p.0;
                acc
            })
            .collect();
        StepProfile::new(ends, values).unwrap()
    })
}

pub fn grid(seed: u64, n: usize, cells: usize) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridFunction::random(&mut rng, vec![cells; n], 0.25, 0.6, 3.0)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}
