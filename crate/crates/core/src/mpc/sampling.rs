use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linsys::DisturbanceModel;
use crate::Matrix;

/// Produces the disturbance realized at each closed-loop step.
pub trait DisturbanceSource: core::fmt::Debug {
    fn sample(&mut self, t: usize) -> Vec<f64>;
}

#[derive(Clone, Debug)]
pub struct ZeroDisturbance {
    n: usize,
}

impl ZeroDisturbance {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl DisturbanceSource for ZeroDisturbance {
    fn sample(&mut self, _t: usize) -> Vec<f64> {
        vec![0.0; self.n]
    }
}

/// Independent uniform draws from `||w||_inf <= bound`.
#[derive(Clone, Debug)]
pub struct UniformBox {
    n: usize,
    bound: f64,
    rng: ChaCha8Rng,
}

impl UniformBox {
    pub fn new(n: usize, bound: f64, seed: u64) -> Self {
        Self { n, bound, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl DisturbanceSource for UniformBox {
    fn sample(&mut self, _t: usize) -> Vec<f64> {
        let b = self.bound;
        (0..self.n).map(|_| if b > 0.0 { self.rng.random_range(-b..=b) } else { 0.0 }).collect()
    }
}

/// Convex combinations of the vertices with weights uniform on the simplex.
#[derive(Clone, Debug)]
pub struct ConvexCombination {
    vertices: Matrix,
    rng: ChaCha8Rng,
}

impl ConvexCombination {
    pub fn new(vertices: Matrix, seed: u64) -> Self {
        Self { vertices, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl DisturbanceSource for ConvexCombination {
    fn sample(&mut self, _t: usize) -> Vec<f64> {
        // normalized unit exponentials are Dirichlet(1, ..., 1)
        let k = self.vertices.cols();
        let mut weights: Vec<f64> = (0..k).map(|_| -libm::log(1.0 - self.rng.random::<f64>())).collect();
        let total: f64 = weights.iter().sum();
        if total > 0.0 {
            weights.iter_mut().for_each(|v| *v /= total);
        } else {
            weights = vec![1.0 / k as f64; k];
        }
        self.vertices.mul_vec(&weights)
    }
}

/// Replays a fixed sequence, then repeats its last entry.
#[derive(Clone, Debug)]
pub struct Replay {
    samples: Vec<Vec<f64>>,
}

impl Replay {
    /// Panics on an empty sequence.
    pub fn new(samples: Vec<Vec<f64>>) -> Self {
        assert!(!samples.is_empty(), "replay needs at least one sample");
        Self { samples }
    }
}

impl DisturbanceSource for Replay {
    fn sample(&mut self, t: usize) -> Vec<f64> {
        self.samples[t.min(self.samples.len() - 1)].clone()
    }
}

/// Seeded sampler matching the shape of `dist`: zero, box or vertex hull.
pub fn sampler_for(dist: &DisturbanceModel, seed: u64) -> Box<dyn DisturbanceSource> {
    if dist.is_zero() {
        Box::new(ZeroDisturbance::new(dist.n()))
    } else if let Some(b) = dist.box_bound() {
        Box::new(UniformBox::new(dist.n(), b, seed))
    } else {
        Box::new(ConvexCombination::new(dist.vertices().clone(), seed))
    }
}
