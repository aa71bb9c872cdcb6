//! Reproducible random inputs for property sweeps.
//!
//! Every work item draws from its own ChaCha stream selected by its index, so
//! results do not depend on how items are spread over workers.

use crate::poly::{Monomial, Poly};
use crate::scalar::{rat, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generator for work item `index` under `seed`.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Small nonzero rational `p/q` with `|p| ≤ 6`, `1 ≤ q ≤ 4`.
pub fn random_coefficient<R: Rng>(rng: &mut R) -> Rational {
    let mut num = 0;
    while num == 0 {
        num = rng.gen_range(-6..=6);
    }
    rat(num, rng.gen_range(1..=4))
}

/// Random polynomial with at most `terms` terms of total degree `≤ max_degree`
/// in `nvars` variables.
pub fn random_poly<R: Rng>(rng: &mut R, nvars: usize, max_degree: u32, terms: usize) -> Poly {
    let mut p = Poly::zero();
    for _ in 0..terms {
        let deg = rng.gen_range(0..=max_degree);
        let mut exps = vec![0u32; nvars];
        for _ in 0..deg {
            exps[rng.gen_range(0..nvars)] += 1;
        }
        p.add_term(Monomial::from_exponents(&exps), random_coefficient(rng));
    }
    p
}

/// Decay rates cycled by the Gaussian-ring sweeps.
pub fn default_rates() -> [Rational; 3] {
    [rat(1, 2), rat(1, 1), rat(2, 1)]
}
