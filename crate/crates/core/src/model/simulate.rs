use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::TvarModel;
use crate::error::{Error, Result};

/// Realized sample paths `x_1..x_N`, one row per path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePaths {
    pub n: usize,
    pub num_paths: usize,
    pub seed: u64,
    /// Row-major `num_paths x n`.
    pub data: Vec<f64>,
}

impl SamplePaths {
    pub fn path(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn paths(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n)
    }
}

/// Generator for path `index`: ChaCha8 seeded with `seed`, on stream `index`.
///
/// Each path owns an independent stream, so any partition of the path index
/// range reproduces the same numbers.
pub(crate) fn path_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Draws one path of length `n` with i.i.d. `N(0, sigma^2)` innovations.
pub(crate) fn draw_path(model: &TvarModel, n: usize, seed: u64, index: usize) -> Vec<f64> {
    let mut rng = path_rng(seed, index);
    let sd = model.noise_variance().sqrt();
    let z: Vec<f64> = (0..n)
        .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    model.filter(&z)
}

/// Simulates `num_paths` independent paths of length `n`; a pure function of its arguments.
pub fn simulate(model: &TvarModel, n: usize, num_paths: usize, seed: u64) -> Result<SamplePaths> {
    if n == 0 || num_paths == 0 {
        return Err(Error::Domain(format!(
            "simulation needs n >= 1 and num_paths >= 1, got n = {n}, num_paths = {num_paths}"
        )));
    }
    let mut data = Vec::with_capacity(n * num_paths);
    for i in 0..num_paths {
        data.extend(draw_path(model, n, seed, i));
    }
    Ok(SamplePaths {
        n,
        num_paths,
        seed,
        data,
    })
}
