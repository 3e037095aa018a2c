#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use theta_gabor::lattice::ParamsFile;
use theta_gabor::{GaborParams, Signal, C64};

pub fn params_2d(n: usize) -> GaborParams {
    GaborParams::from_file(&ParamsFile {
        d: 2,
        n,
        omega_re: vec![vec![0.2, 0.1], vec![0.1, -0.1]],
        omega_im: vec![vec![1.1, 0.3], vec![0.3, 0.9]],
    })
    .unwrap()
}

/// `d = 1` with `Re Ω ∈ [-0.5, 0.5]`, `Im Ω ∈ [0.6, 2]`, or the fixed `d = 2` matrix.
pub fn any_params(n: impl Strategy<Value = usize>) -> impl Strategy<Value = GaborParams> {
    (n, 1usize..=2, -0.5f64..0.5, 0.6f64..2.0).prop_map(|(n, d, re, im)| {
        if d == 1 {
            GaborParams::one_dim(n, re, im).unwrap()
        } else {
            params_2d(n)
        }
    })
}

pub fn random_signal(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Signal {
    let len = n.pow(d as u32);
    let c = (0..len).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    Signal::new(n, d, c).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_err(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}
