//! curvlab: a numerical laboratory for curvature-operator cones.
//!
//! The crate implements the algebra of algebraic curvature tensors
//! (contractions, the Kulkarni–Nomizu product, the quadratic reaction
//! term `Q`, and a one-parameter family of linear transforms), a family
//! of four-frame curvature cones with numerically certified membership
//! margins, an adaptive integrator for the reaction ODE `dR/dt = Q(R)`,
//! estimators for the cone constants entering pinching-set propagation,
//! a dimension-3 pinching suite, and closed-form ancient model flows.
//!
//! Everything is deterministic given a seed: samplers, frame restarts,
//! and parallel batches are merged in index order, so campaign reports
//! reproduce byte-for-byte.

pub mod campaign;
pub mod cones;
pub mod constants;
pub mod dim3;
pub mod error;
pub mod frame;
pub mod harnack;
pub mod ode;
pub mod report;
pub mod tensor;

pub use error::{CurvError, Result};
pub use tensor::{CurvTensor, Sym2};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic RNG for (seed, stream, index) triples. Independent
/// work items get independent streams so that parallel scheduling
/// cannot change any result.
pub fn rng_for(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    key[24..32].copy_from_slice(&0x6375_7276_6c61_6221u64.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Runs `f` over `0..count` on the worker pool and returns results in
/// index order. `CURVLAB_THREADS` bounds the pool size.
pub fn run_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    pool().install(|| {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(|i| f(i)).collect()
    })
}

fn pool() -> &'static rayon::ThreadPool {
    use std::sync::OnceLock;
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Ok(v) = std::env::var("CURVLAB_THREADS") {
            if let Ok(k) = v.trim().parse::<usize>() {
                if k >= 1 {
                    builder = builder.num_threads(k);
                }
            }
        }
        builder.build().expect("worker pool construction failed")
    })
}
