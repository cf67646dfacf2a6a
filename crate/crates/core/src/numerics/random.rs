use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Seeded normal-variate stream; `(seed, stream_id)` fixes the sequence.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn normals(&mut self, count: usize, variance: f64) -> Vec<f64> {
        let sd = variance.max(0.0).sqrt();
        (0..count).map(|_| sd * self.standard_normal()).collect()
    }
}

/// I.i.d. complex Gaussians with `variance` per real and imaginary component.
pub fn gaussian_increments(stream: &mut RandomStream, count: usize, variance: f64) -> Vec<Complex64> {
    assert!(variance >= 0.0, "variance must be non-negative");
    let sd = variance.sqrt();
    (0..count)
        .map(|_| {
            let re = stream.standard_normal();
            let im = stream.standard_normal();
            Complex64::new(sd * re, sd * im)
        })
        .collect()
}
