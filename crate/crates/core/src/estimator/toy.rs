//! Exhaustive attacks at toy sizes.
//!
//! Search decomposes over coordinates: coordinate `i` of every sample depends only on
//! coordinate `i` of the secret, so each coordinate is recovered independently from
//! `q^{d_i}` candidates.

use rayon::prelude::*;

use crate::ring::{CoordPoly, Ring, RingElem, VarietyParams};
use crate::sampling::{sample_uniform_elem, DiscreteGaussian, Sampler};
use crate::scheme::{uniform_sample, vlwe_sample};
use crate::{arith, Error, Result};

pub const TOY_MAX_Q: u64 = 64;
pub const TOY_MAX_DEGREE: usize = 4;
pub const TOY_MAX_COORDS: usize = 2;
/// Largest per-coordinate candidate count enumerated.
pub const TOY_MAX_CANDIDATES: u64 = 1 << 24;

fn check_toy(ring: &Ring) -> Result<()> {
    let q = ring.modulus();
    let d = ring.degrees().into_iter().max().unwrap_or(0);
    if q > TOY_MAX_Q || d > TOY_MAX_DEGREE || ring.n() > TOY_MAX_COORDS {
        return Err(Error::Capability(format!(
            "toy attacks need q <= {TOY_MAX_Q}, d <= {TOY_MAX_DEGREE}, n <= {TOY_MAX_COORDS}; \
             got q = {q}, d = {d}, n = {}",
            ring.n()
        )));
    }
    for i in 0..ring.n() {
        let count = q.checked_pow(ring.degree(i) as u32);
        if count.is_none_or(|c| c > TOY_MAX_CANDIDATES) {
            return Err(Error::Capability("candidate space too large".into()));
        }
    }
    Ok(())
}

/// Best-scoring secret and its total squared residual `Σ ‖b − a·s‖²`.
#[derive(Clone, Debug, PartialEq)]
pub struct SecretCandidate {
    pub secret: RingElem,
    pub score: u64,
}

/// Coefficients of candidate `index`; coefficient 0 is the most significant digit so
/// that numeric order is lexicographic order.
fn candidate(index: u64, q: u64, d: usize) -> Vec<u64> {
    let mut coeffs = vec![0; d];
    let mut rest = index;
    for c in coeffs.iter_mut().rev() {
        *c = rest % q;
        rest /= q;
    }
    coeffs
}

/// Exhaustive search for the secret minimising the squared centered residual; ties go
/// to the lexicographically smallest coefficient vector.
pub fn toy_key_recovery(ring: &Ring, samples: &[(RingElem, RingElem)]) -> Result<SecretCandidate> {
    check_toy(ring)?;
    if samples.is_empty() {
        return Err(Error::Domain("key recovery needs at least one sample".into()));
    }
    for (a, b) in samples {
        ring.check(a)?;
        ring.check(b)?;
    }
    let q = ring.modulus();
    let mut coords = Vec::with_capacity(ring.n());
    let mut total = 0u64;
    for i in 0..ring.n() {
        let d = ring.degree(i);
        let (score, index) = (0..q.pow(d as u32))
            .into_par_iter()
            .map(|index| {
                let s = CoordPoly::new(candidate(index, q, d));
                let score: u64 = samples
                    .iter()
                    .map(|(a, b)| {
                        let prod = ring.coord_mul(i, a.coord(i), &s);
                        b.coord(i)
                            .coeffs()
                            .iter()
                            .zip(prod.coeffs())
                            .map(|(&bj, &pj)| {
                                let r = arith::centered(arith::sub_mod(bj, pj, q), q);
                                (r * r) as u64
                            })
                            .sum::<u64>()
                    })
                    .sum();
                (score, index)
            })
            .min()
            .expect("candidate space is non-empty");
        total += score;
        coords.push(candidate(index, q, d));
    }
    Ok(SecretCandidate {
        secret: ring.from_coeffs(coords)?,
        score: total,
    })
}

/// Which distribution plays the "real" side of the distinguishing game.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistinguisherConfig {
    /// Real samples are `(a, a·s + e)`; the other side is uniform.
    VarietyVsUniform,
    /// Both sides uniform; the advantage must vanish.
    UniformVsUniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistinguisherOutcome {
    pub trials: usize,
    pub samples_per_trial: usize,
    pub threshold: f64,
    pub true_positive_rate: f64,
    pub false_positive_rate: f64,
    /// `|TPR − FPR|`.
    pub advantage: f64,
}

pub const DISTINGUISHER_SAMPLES: usize = 4;

/// Decision rule: "real" when the best residual is at most
/// `2·k·n·d·min(σ², q²/12)`, twice its expectation under the true secret.
pub fn distinguisher_threshold(ring: &Ring, sigma: f64, samples: usize) -> f64 {
    let q = ring.modulus() as f64;
    let dims: usize = ring.degrees().iter().sum();
    2.0 * samples as f64 * dims as f64 * (sigma * sigma).min(q * q / 12.0)
}

/// Advantage of the residual-threshold distinguisher against `(a, a·s + e)` versus
/// uniform, over `trials` games with a fair coin choosing the source.
pub fn toy_distinguisher(params: &VarietyParams, trials: usize, rng: &mut Sampler) -> Result<f64> {
    Ok(toy_distinguisher_with(params, trials, DistinguisherConfig::VarietyVsUniform, rng)?.advantage)
}

pub fn toy_distinguisher_with(
    params: &VarietyParams,
    trials: usize,
    config: DistinguisherConfig,
    rng: &mut Sampler,
) -> Result<DistinguisherOutcome> {
    let ring = Ring::new(params)?;
    check_toy(&ring)?;
    if trials == 0 {
        return Err(Error::Domain("distinguisher needs at least one trial".into()));
    }
    let dist = DiscreteGaussian::new(params.sigma)?;
    let k = DISTINGUISHER_SAMPLES;
    let threshold = distinguisher_threshold(&ring, params.sigma, k);
    let index = rng.next_u64();
    let base = rng.child(index);
    let outcomes: Vec<(bool, bool)> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<(bool, bool)> {
            let mut r = base.child(trial);
            let real = r.next_bool();
            let samples: Vec<_> = if real && config == DistinguisherConfig::VarietyVsUniform {
                let s = sample_uniform_elem(&ring, &mut r);
                (0..k)
                    .map(|_| vlwe_sample(&ring, &s, &dist, &mut r))
                    .collect::<Result<_>>()?
            } else {
                (0..k).map(|_| uniform_sample(&ring, &mut r)).collect()
            };
            let best = toy_key_recovery(&ring, &samples)?;
            Ok((real, best.score as f64 <= threshold))
        })
        .collect::<Result<_>>()?;
    let positives = outcomes.iter().filter(|(real, _)| *real).count();
    let negatives = outcomes.len() - positives;
    let rate = |hits: usize, total: usize| if total == 0 { 0.0 } else { hits as f64 / total as f64 };
    let tpr = rate(outcomes.iter().filter(|(r, g)| *r && *g).count(), positives);
    let fpr = rate(outcomes.iter().filter(|(r, g)| !*r && *g).count(), negatives);
    Ok(DistinguisherOutcome {
        trials,
        samples_per_trial: k,
        threshold,
        true_positive_rate: tpr,
        false_positive_rate: fpr,
        advantage: (tpr - fpr).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_ring(n: usize, d: usize, q: u64) -> Ring {
        Ring::new(&VarietyParams::negacyclic(n, d, q, 2, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn candidate_order_is_lexicographic() {
        assert_eq!(candidate(0, 5, 3), vec![0, 0, 0]);
        assert_eq!(candidate(1, 5, 3), vec![0, 0, 1]);
        assert_eq!(candidate(5, 5, 3), vec![0, 1, 0]);
        assert_eq!(candidate(124, 5, 3), vec![4, 4, 4]);
    }

    #[test]
    fn noiseless_recovery_is_exact() {
        let ring = toy_ring(2, 2, 17);
        let mut rng = Sampler::from_u64(3);
        let s = sample_uniform_elem(&ring, &mut rng);
        let tiny = DiscreteGaussian::new(1e-9).unwrap();
        let samples: Vec<_> = (0..3)
            .map(|_| vlwe_sample(&ring, &s, &tiny, &mut rng).unwrap())
            .collect();
        let best = toy_key_recovery(&ring, &samples).unwrap();
        assert_eq!(best.secret, s);
        assert_eq!(best.score, 0);
    }

    #[test]
    fn ties_go_to_smallest() {
        let ring = toy_ring(1, 2, 17);
        // a = 0 makes every candidate score identically
        let samples = vec![(ring.zero(), ring.from_coeffs(vec![vec![3, 4]]).unwrap())];
        let best = toy_key_recovery(&ring, &samples).unwrap();
        assert!(best.secret.is_zero());
        assert_eq!(best.score, 9 + 16);
    }

    #[test]
    fn rejects_large_or_empty() {
        let big = toy_ring(1, 4, 97);
        assert!(matches!(toy_key_recovery(&big, &[(big.zero(), big.zero())]), Err(Error::Capability(_))));
        let ring = toy_ring(1, 2, 17);
        assert!(matches!(toy_key_recovery(&ring, &[]), Err(Error::Domain(_))));
        let p = VarietyParams::negacyclic(1, 2, 17, 2, 1.0).unwrap();
        assert!(toy_distinguisher(&p, 0, &mut Sampler::from_u64(0)).is_err());
    }

    #[test]
    fn threshold_formula() {
        let ring = toy_ring(2, 2, 17);
        assert_eq!(distinguisher_threshold(&ring, 1.0, 4), 32.0);
        assert_eq!(distinguisher_threshold(&ring, 100.0, 1), 4.0 * 289.0 / 12.0 * 2.0);
    }
}
