//! Seeded random sampling helpers.
//!
//! Every random draw in the crate goes through a [`ChaCha8Rng`] derived from a
//! root seed and a counter, so restarts and samples are reproducible and
//! independent of scheduling.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::C64;

/// Stream selector for independent consumers sharing one root seed.
#[derive(Clone, Copy, Debug)]
pub enum Stream {
    Seesaw = 1,
    Samples = 2,
    Rank2 = 3,
    Tau = 4,
}

/// Generator for item `index` of `stream` under `seed`.
pub fn derived_rng(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 48) ^ index);
    rng
}

pub fn gaussian_c64<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

pub fn gaussian_matrix<R: rand::Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian_c64(rng))
}

/// Unit vector drawn from the unitarily invariant distribution.
pub fn random_unit_vector<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<C64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| gaussian_c64(rng));
        let n = v.norm();
        if n > 1e-300 {
            return v / C64::from(n);
        }
    }
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn random_unitary<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<C64> {
    let g = gaussian_matrix(rng, dim, dim);
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / C64::from(d.norm()) } else { C64::from(1.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}
