#![allow(dead_code)]

use qdd::circuit::{gen_random, Circuit, Rng};

/// 200 seeded random circuits: qubit counts cycle through 1..=5, gate counts
/// drawn uniformly from 0..=25.
pub fn corpus() -> Vec<Circuit> {
    (0..200u64)
        .map(|i| {
            let seed = 0x5eed_0000 + i;
            let gates = Rng::new(seed ^ 0xffff).below(26);
            gen_random(1 + (i % 5) as usize, gates, seed).unwrap()
        })
        .collect()
}
