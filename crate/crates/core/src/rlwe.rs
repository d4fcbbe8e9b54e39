//! Single-ring baseline: `Z_q[x]/(x^N + 1)` with two-element ciphertexts.
//!
//! Minimal by design (no modulus chain, no batching); it exists so the vector scheme
//! can be compared against an ordinary ring scheme using the same arithmetic and
//! sampler.

use crate::bfv::{self, BfvCiphertext, BfvParams, BfvPublicKey, BfvRelinKey, DEFAULT_BASE_LOG};
use crate::noise;
use crate::ring::{DefiningPoly, Ring, RingElem};
use crate::sampling::{DiscreteGaussian, Sampler};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct RlweParams {
    /// Ring degree `N`, a power of two.
    pub degree: usize,
    /// Prime with `q ≡ 1 (mod 2N)`.
    pub q: u64,
    pub t: u64,
    pub sigma: f64,
}

impl RlweParams {
    pub fn new(degree: usize, q: u64, t: u64, sigma: f64) -> Result<Self> {
        let p = Self { degree, q, t, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.degree.is_power_of_two() {
            return Err(Error::InvalidParams(format!("N = {} is not a power of two", self.degree)));
        }
        if !crate::arith::is_prime(self.q) || (self.q - 1) % (2 * self.degree as u64) != 0 {
            return Err(Error::InvalidParams(format!(
                "q = {} must be a prime = 1 mod {}",
                self.q,
                2 * self.degree
            )));
        }
        if self.t < 2 || self.q / self.t < 2 {
            return Err(Error::InvalidParams(format!("t = {} leaves no room in q", self.t)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParams("sigma must be positive".into()));
        }
        Ok(())
    }

    pub fn delta(&self) -> u64 {
        self.q / self.t
    }
}

/// Rings and distributions derived from [`RlweParams`].
#[derive(Debug)]
pub struct Rlwe {
    params: RlweParams,
    ring: Ring,
    plain: Ring,
    dist: DiscreteGaussian,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RlweKeys {
    pub secret: RingElem,
    pub public: BfvPublicKey,
    pub relin: BfvRelinKey,
}

impl Rlwe {
    pub fn new(params: RlweParams) -> Result<Self> {
        params.validate()?;
        let f = vec![DefiningPoly::negacyclic(params.degree)];
        Ok(Self {
            ring: Ring::from_parts(f.clone(), params.q)?,
            plain: Ring::from_parts(f, params.t)?,
            dist: DiscreteGaussian::new(params.sigma)?,
            params,
        })
    }

    pub fn params(&self) -> &RlweParams {
        &self.params
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn plaintext_ring(&self) -> &Ring {
        &self.plain
    }

    /// Plaintext with the given low-order coefficients, reduced mod `t`.
    pub fn encode(&self, coeffs: &[u64]) -> Result<RingElem> {
        if coeffs.len() > self.params.degree {
            return Err(Error::Shape(format!(
                "{} coefficients exceed degree {}",
                coeffs.len(),
                self.params.degree
            )));
        }
        let mut c: Vec<u64> = coeffs.iter().map(|&x| x % self.params.t).collect();
        c.resize(self.params.degree, 0);
        self.plain.from_coeffs(vec![c])
    }

    fn bfv(&self) -> BfvParams {
        BfvParams {
            t: self.params.t,
            sigma: self.params.sigma,
        }
    }
}

pub fn rlwe_keygen(ctx: &Rlwe, rng: &mut Sampler) -> Result<RlweKeys> {
    let secret = bfv::keygen_secret(&ctx.ring, &ctx.dist, rng);
    let public = bfv::keygen_public(&ctx.ring, &secret, &ctx.dist, rng)?;
    let relin = bfv::keygen_relin(&ctx.ring, &secret, DEFAULT_BASE_LOG, &ctx.dist, rng)?;
    Ok(RlweKeys { secret, public, relin })
}

pub fn rlwe_encrypt(
    ctx: &Rlwe,
    pk: &BfvPublicKey,
    msg: &RingElem,
    rng: &mut Sampler,
) -> Result<BfvCiphertext> {
    ctx.plain.check(msg)?;
    bfv::encrypt_pk(&ctx.ring, ctx.bfv(), pk, msg, &ctx.dist, rng)
}

/// Fails with [`Error::NoiseOverflow`] when the tracked noise fails the safety predicate.
pub fn rlwe_decrypt(ctx: &Rlwe, s: &RingElem, ct: &BfvCiphertext) -> Result<RingElem> {
    let delta = ctx.params.delta();
    if !noise::decryption_safe(ct.noise_var, delta) {
        return Err(Error::NoiseOverflow(format!(
            "tracked noise std {:.3e} exceeds Δ/12 = {:.3e}",
            ct.noise_var.sqrt(),
            delta as f64 / 12.0
        )));
    }
    bfv::decrypt(&ctx.ring, &ctx.plain, s, ct)
}

pub fn rlwe_add(ctx: &Rlwe, a: &BfvCiphertext, b: &BfvCiphertext) -> Result<BfvCiphertext> {
    bfv::add(&ctx.ring, a, b)
}

pub fn rlwe_mul(
    ctx: &Rlwe,
    rlk: &BfvRelinKey,
    a: &BfvCiphertext,
    b: &BfvCiphertext,
) -> Result<BfvCiphertext> {
    bfv::multiply(&ctx.ring, ctx.bfv(), rlk, a, b)
}

/// Centered phase error of `ct` against its known plaintext.
pub fn rlwe_noise(ctx: &Rlwe, s: &RingElem, ct: &BfvCiphertext, msg: &RingElem) -> Result<Vec<i64>> {
    let mut terms = bfv::phase_error(&ctx.ring, ctx.bfv(), s, ct, msg)?;
    Ok(terms.swap_remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(RlweParams::new(16, 7681, 17, 3.2).is_ok());
        assert!(RlweParams::new(12, 7681, 17, 3.2).is_err());
        assert!(RlweParams::new(16, 7687, 17, 3.2).is_err());
        assert!(RlweParams::new(1024, 7681, 17, 3.2).is_err());
        assert!(RlweParams::new(16, 7681, 7681, 3.2).is_err());
        assert!(RlweParams::new(16, 7681, 17, 0.0).is_err());
    }

    #[test]
    fn small_round_trip_and_ops() {
        let ctx = Rlwe::new(RlweParams::new(32, 1_073_707_009, 17, 3.2).unwrap()).unwrap();
        let mut rng = Sampler::from_u64(1);
        let keys = rlwe_keygen(&ctx, &mut rng).unwrap();
        let u = ctx.encode(&[2, 16]).unwrap();
        let v = ctx.encode(&[3]).unwrap();
        let cu = rlwe_encrypt(&ctx, &keys.public, &u, &mut rng).unwrap();
        let cv = rlwe_encrypt(&ctx, &keys.public, &v, &mut rng).unwrap();
        assert_eq!(rlwe_decrypt(&ctx, &keys.secret, &cu).unwrap(), u);
        let sum = rlwe_add(&ctx, &cu, &cv).unwrap();
        assert_eq!(rlwe_decrypt(&ctx, &keys.secret, &sum).unwrap(), ctx.encode(&[5, 16]).unwrap());
        let prod = rlwe_mul(&ctx, &keys.relin, &cu, &cv).unwrap();
        // (2 + 16x)·3 = 6 + 48x = 6 + 14x mod 17
        assert_eq!(rlwe_decrypt(&ctx, &keys.secret, &prod).unwrap(), ctx.encode(&[6, 14]).unwrap());
    }

    #[test]
    fn overflow_is_flagged() {
        let ctx = Rlwe::new(RlweParams::new(16, 7681, 17, 3.2).unwrap()).unwrap();
        let mut rng = Sampler::from_u64(2);
        let keys = rlwe_keygen(&ctx, &mut rng).unwrap();
        let mut ct = rlwe_encrypt(&ctx, &keys.public, &ctx.encode(&[1]).unwrap(), &mut rng).unwrap();
        ct.noise_var = 1e12;
        assert!(matches!(rlwe_decrypt(&ctx, &keys.secret, &ct), Err(Error::NoiseOverflow(_))));
    }
}
