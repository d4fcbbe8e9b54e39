//! Seeded randomness: uniform ring elements and per-coordinate discrete Gaussian errors.
//!
//! All randomness flows from a ChaCha20 stream keyed by an explicit 32-byte seed, so a
//! seed together with the sequence of calls fixes every output. Sampling is not
//! constant-time.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::error::domain_err;
use crate::ring::{Ring, RingElem};
use crate::Result;

/// Widths up to this value use a cumulative table, wider ones use rejection.
pub const CDT_MAX_SIGMA: f64 = 20.0;
pub const DEFAULT_TAIL_CUT: f64 = 6.0;

/// Deterministic random stream.
#[derive(Clone, Debug)]
pub struct Sampler {
    seed: [u8; 32],
    rng: ChaCha20Rng,
}

impl Sampler {
    pub fn from_seed(seed: [u8; 32]) -> Self {
        Self {
            seed,
            rng: ChaCha20Rng::from_seed(seed),
        }
    }

    /// Expands a 64-bit seed (the CLI `--seed` value) to a full stream key.
    pub fn from_u64(seed: u64) -> Self {
        Self::from_seed(Sha256::digest(seed.to_le_bytes()).into())
    }

    /// Seeds from the operating system.
    pub fn from_os() -> Self {
        Self::from_seed(rand::rng().random())
    }

    pub fn seed(&self) -> [u8; 32] {
        self.seed
    }

    /// Number of 32-bit words consumed so far.
    pub fn position(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Independent stream keyed by `SHA-256(seed || index)`.
    pub fn child(&self, index: u64) -> Sampler {
        let mut h = Sha256::new();
        h.update(self.seed);
        h.update(index.to_le_bytes());
        Self::from_seed(h.finalize().into())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_bool(&mut self) -> bool {
        self.rng.next_u32() & 1 == 1
    }

    /// Uniform in `[0, bound)`, rejecting draws from the incomplete top block.
    pub fn uniform_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let x = self.rng.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }

    pub fn fill_bytes(&mut self, buf: &mut [u8]) {
        self.rng.fill_bytes(buf)
    }
}

#[derive(Clone, Debug)]
enum Method {
    /// Cumulative probabilities of `|x| = 0, 1, ..., bound`.
    Table(Vec<f64>),
    Rejection,
}

/// Discrete Gaussian over `Z` restricted to `[-bound, bound]`, `bound = ceil(tail_cut·sigma)`.
#[derive(Clone, Debug)]
pub struct DiscreteGaussian {
    sigma: f64,
    bound: i64,
    method: Method,
}

impl DiscreteGaussian {
    pub fn new(sigma: f64) -> Result<Self> {
        Self::with_tail_cut(sigma, DEFAULT_TAIL_CUT)
    }

    pub fn with_tail_cut(sigma: f64, tail_cut: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(domain_err!("gaussian width must be positive, got {sigma}"));
        }
        if !(tail_cut >= DEFAULT_TAIL_CUT && tail_cut.is_finite()) {
            return Err(domain_err!("tail cut must be at least 6, got {tail_cut}"));
        }
        let bound = (tail_cut * sigma).ceil() as i64;
        let method = if sigma <= CDT_MAX_SIGMA {
            let rho = |x: i64| (-((x * x) as f64) / (2.0 * sigma * sigma)).exp();
            // |x| = 0 has one preimage, every other magnitude two.
            let weights: Vec<f64> = (0..=bound)
                .map(|x| if x == 0 { 1.0 } else { 2.0 * rho(x) })
                .collect();
            let total: f64 = weights.iter().sum();
            let mut acc = 0.0;
            let mut cdt: Vec<f64> = weights
                .iter()
                .map(|w| {
                    acc += w / total;
                    acc
                })
                .collect();
            *cdt.last_mut().expect("bound >= 1") = 1.0;
            Method::Table(cdt)
        } else {
            Method::Rejection
        };
        Ok(Self {
            sigma,
            bound,
            method,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn sample(&self, rng: &mut Sampler) -> i64 {
        match &self.method {
            Method::Table(cdt) => {
                let u = rng.next_f64();
                let mag = cdt.partition_point(|&c| c <= u) as i64;
                if mag != 0 && rng.next_bool() {
                    -mag
                } else {
                    mag
                }
            }
            Method::Rejection => {
                let width = 2 * self.bound as u64 + 1;
                let two_var = 2.0 * self.sigma * self.sigma;
                loop {
                    let x = rng.uniform_below(width) as i64 - self.bound;
                    if rng.next_f64() < (-((x * x) as f64) / two_var).exp() {
                        return x;
                    }
                }
            }
        }
    }
}

/// One draw from the width-`sigma` discrete Gaussian truncated at `tail_cut·sigma`.
pub fn sample_gaussian_int(sigma: f64, tail_cut: f64, rng: &mut Sampler) -> Result<i64> {
    Ok(DiscreteGaussian::with_tail_cut(sigma, tail_cut)?.sample(rng))
}

/// Independent Gaussian coefficients in every coordinate, reduced mod `q`.
pub fn sample_gaussian_elem(ring: &Ring, sigma: f64, rng: &mut Sampler) -> Result<RingElem> {
    let dist = DiscreteGaussian::new(sigma)?;
    Ok(gaussian_elem(ring, &dist, rng))
}

pub fn gaussian_elem(ring: &Ring, dist: &DiscreteGaussian, rng: &mut Sampler) -> RingElem {
    let coords: Vec<Vec<i64>> = ring
        .degrees()
        .into_iter()
        .map(|d| (0..d).map(|_| dist.sample(rng)).collect())
        .collect();
    ring.from_signed(&coords).expect("shape follows the ring")
}

/// Coefficients uniform in `[0, q)`.
pub fn sample_uniform_elem(ring: &Ring, rng: &mut Sampler) -> RingElem {
    let q = ring.modulus();
    let coords = ring
        .degrees()
        .into_iter()
        .map(|d| (0..d).map(|_| rng.uniform_below(q)).collect())
        .collect();
    ring.from_coeffs(coords).expect("shape follows the ring")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::DefiningPoly;

    #[test]
    fn degenerate_width_is_always_zero() {
        let dist = DiscreteGaussian::new(1e-9).unwrap();
        let mut rng = Sampler::from_u64(1);
        assert!((0..1000).all(|_| dist.sample(&mut rng) == 0));
        let ring = Ring::from_parts(vec![DefiningPoly::negacyclic(8); 3], 7681).unwrap();
        assert!(sample_gaussian_elem(&ring, 1e-9, &mut rng).unwrap().is_zero());
    }

    #[test]
    fn rejects_bad_arguments() {
        let mut rng = Sampler::from_u64(1);
        assert!(sample_gaussian_int(0.0, 6.0, &mut rng).is_err());
        assert!(sample_gaussian_int(-1.0, 6.0, &mut rng).is_err());
        assert!(sample_gaussian_int(3.2, 5.0, &mut rng).is_err());
    }

    #[test]
    fn samples_respect_the_tail_cut() {
        for sigma in [0.5, 3.2, 25.0] {
            let dist = DiscreteGaussian::new(sigma).unwrap();
            let mut rng = Sampler::from_u64(9);
            let bound = (6.0 * sigma).ceil() as i64;
            assert_eq!(dist.bound(), bound);
            assert!((0..20_000).all(|_| dist.sample(&mut rng).abs() <= bound));
        }
    }

    #[test]
    fn wide_rejection_path_has_the_right_variance() {
        let dist = DiscreteGaussian::new(40.0).unwrap();
        let mut rng = Sampler::from_u64(3);
        let n = 200_000;
        let var = (0..n).map(|_| (dist.sample(&mut rng) as f64).powi(2)).sum::<f64>() / n as f64;
        assert!((var / 1600.0 - 1.0).abs() < 0.02, "var = {var}");
    }

    #[test]
    fn uniform_below_stays_in_range() {
        let mut rng = Sampler::from_u64(5);
        assert!((0..10_000).all(|_| rng.uniform_below(17) < 17));
        assert_eq!(rng.uniform_below(1), 0);
    }

    #[test]
    fn determinism_and_children() {
        let ring = Ring::from_parts(vec![DefiningPoly::negacyclic(16); 2], 7681).unwrap();
        let mut a = Sampler::from_u64(0xDEAD);
        let mut b = Sampler::from_u64(0xDEAD);
        assert_eq!(
            sample_uniform_elem(&ring, &mut a),
            sample_uniform_elem(&ring, &mut b)
        );
        assert_eq!(
            sample_gaussian_elem(&ring, 3.2, &mut a).unwrap(),
            sample_gaussian_elem(&ring, 3.2, &mut b).unwrap()
        );
        assert_eq!(a.position(), b.position());
        assert!(a.position() > 0);
        let root = Sampler::from_u64(1);
        assert_eq!(root.child(4).seed(), root.child(4).seed());
        assert_ne!(root.child(4).seed(), root.child(5).seed());
        assert_ne!(root.child(0).seed(), root.seed());
    }
}
