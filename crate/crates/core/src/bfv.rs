//! Two-element scale-and-round ciphertexts over any negacyclic [`Ring`].
//!
//! This is the textbook construction (encryption of `Δ·m` under `c0 + c1·s`, tensoring
//! with rescaling by `t/q`, base-`2^w` key switching). Because every operation on `R_q`
//! is coordinate-wise, running it over a multi-coordinate ring is the same as running
//! one independent instance per coordinate. It backs both the reference multiplication
//! path of the vector scheme and the single-ring RLWE baseline.

use crate::arith;
use crate::noise;
use crate::ring::{Ring, RingElem, WideNegacyclic};
use crate::sampling::{gaussian_elem, sample_uniform_elem, DiscreteGaussian, Sampler};
use crate::{Error, Result};

/// Default gadget base `2^8` for key switching.
pub const DEFAULT_BASE_LOG: u32 = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct BfvCiphertext {
    pub c0: RingElem,
    pub c1: RingElem,
    /// Multiplicative depth consumed.
    pub depth: u32,
    /// Model variance of the phase error, worst coordinate.
    pub noise_var: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BfvPublicKey {
    pub p0: RingElem,
    pub p1: RingElem,
}

/// Key-switching key from `s^2` to `s`: `(-a_i s + e_i + 2^{w i} s^2, a_i)` for each digit.
#[derive(Clone, Debug, PartialEq)]
pub struct BfvRelinKey {
    pub base_log: u32,
    pub parts: Vec<(RingElem, RingElem)>,
}

/// Plaintext arithmetic shared by the routines below.
#[derive(Clone, Copy, Debug)]
pub struct BfvParams {
    pub t: u64,
    pub sigma: f64,
}

impl BfvParams {
    pub fn delta(&self, q: u64) -> u64 {
        q / self.t
    }
}

/// `Δ·m mod q` for a message with coefficients in `[0, t)`.
pub fn scale_message(ring: &Ring, msg: &RingElem, delta: u64) -> Result<RingElem> {
    let coords = msg
        .coords()
        .iter()
        .map(|c| c.coeffs().iter().map(|&x| arith::mul_mod(x, delta, ring.modulus())).collect())
        .collect();
    ring.from_coeffs(coords)
}

pub fn keygen_secret(ring: &Ring, dist: &DiscreteGaussian, rng: &mut Sampler) -> RingElem {
    gaussian_elem(ring, dist, rng)
}

pub fn keygen_public(
    ring: &Ring,
    s: &RingElem,
    dist: &DiscreteGaussian,
    rng: &mut Sampler,
) -> Result<BfvPublicKey> {
    let a = sample_uniform_elem(ring, rng);
    let e = gaussian_elem(ring, dist, rng);
    let p0 = ring.add(&ring.neg(&ring.mul(&a, s)?)?, &e)?;
    Ok(BfvPublicKey { p0, p1: a })
}

pub fn keygen_relin(
    ring: &Ring,
    s: &RingElem,
    base_log: u32,
    dist: &DiscreteGaussian,
    rng: &mut Sampler,
) -> Result<BfvRelinKey> {
    let q = ring.modulus();
    let digits = digit_count(q, base_log);
    let s2 = ring.mul(s, s)?;
    let mut parts = Vec::with_capacity(digits);
    let mut power = 1u64;
    for _ in 0..digits {
        let a = sample_uniform_elem(ring, rng);
        let e = gaussian_elem(ring, dist, rng);
        let k0 = ring.add(
            &ring.add(&ring.neg(&ring.mul(&a, s)?)?, &e)?,
            &ring.scalar_mul(&s2, power)?,
        )?;
        parts.push((k0, a));
        power = arith::mul_mod(power, 1u64 << base_log, q);
    }
    Ok(BfvRelinKey { base_log, parts })
}

fn digit_count(q: u64, base_log: u32) -> usize {
    let bits = 64 - (q - 1).leading_zeros();
    bits.div_ceil(base_log) as usize
}

/// Symmetric encryption `(-a·s + e + Δ·m, a)`.
pub fn encrypt_sk(
    ring: &Ring,
    params: BfvParams,
    s: &RingElem,
    msg: &RingElem,
    dist: &DiscreteGaussian,
    rng: &mut Sampler,
) -> Result<BfvCiphertext> {
    let a = sample_uniform_elem(ring, rng);
    let e = gaussian_elem(ring, dist, rng);
    let dm = scale_message(ring, msg, params.delta(ring.modulus()))?;
    let c0 = ring.add(&ring.add(&ring.neg(&ring.mul(&a, s)?)?, &e)?, &dm)?;
    Ok(BfvCiphertext {
        c0,
        c1: a,
        depth: 0,
        noise_var: params.sigma * params.sigma,
    })
}

/// Public-key encryption `(p0·u + e1 + Δ·m, p1·u + e2)`.
pub fn encrypt_pk(
    ring: &Ring,
    params: BfvParams,
    pk: &BfvPublicKey,
    msg: &RingElem,
    dist: &DiscreteGaussian,
    rng: &mut Sampler,
) -> Result<BfvCiphertext> {
    let u = gaussian_elem(ring, dist, rng);
    let e1 = gaussian_elem(ring, dist, rng);
    let e2 = gaussian_elem(ring, dist, rng);
    let dm = scale_message(ring, msg, params.delta(ring.modulus()))?;
    let c0 = ring.add(&ring.add(&ring.mul(&pk.p0, &u)?, &e1)?, &dm)?;
    let c1 = ring.add(&ring.mul(&pk.p1, &u)?, &e2)?;
    let d = ring.degree(0);
    Ok(BfvCiphertext {
        c0,
        c1,
        depth: 0,
        noise_var: noise::bfv_public_fresh_variance(d, params.sigma),
    })
}

/// `c0 + c1·s`.
pub fn phase(ring: &Ring, s: &RingElem, ct: &BfvCiphertext) -> Result<RingElem> {
    ring.add(&ct.c0, &ring.mul(&ct.c1, s)?)
}

/// Rounds `t·phase/q` coefficient-wise into `plain` (the ring mod `t`).
pub fn decrypt(
    ring: &Ring,
    plain: &Ring,
    s: &RingElem,
    ct: &BfvCiphertext,
) -> Result<RingElem> {
    let w = phase(ring, s, ct)?;
    round_to_plaintext(plain, &w)
}

/// `round(w·t/q) mod t` on centered representatives of `w`.
pub fn round_to_plaintext(plain: &Ring, w: &RingElem) -> Result<RingElem> {
    let q = w.modulus() as i128;
    let t = plain.modulus();
    let coords: Vec<Vec<u64>> = w
        .centered()
        .into_iter()
        .map(|c| {
            c.into_iter()
                .map(|x| arith::reduce_i128(arith::div_round(x as i128 * t as i128, q), t))
                .collect()
        })
        .collect();
    plain.from_coeffs(coords)
}

/// Phase error `c0 + c1·s − Δ·m` on centered representatives.
pub fn phase_error(
    ring: &Ring,
    params: BfvParams,
    s: &RingElem,
    ct: &BfvCiphertext,
    msg: &RingElem,
) -> Result<Vec<Vec<i64>>> {
    let dm = scale_message(ring, msg, params.delta(ring.modulus()))?;
    Ok(ring.sub(&phase(ring, s, ct)?, &dm)?.centered())
}

pub fn add(ring: &Ring, a: &BfvCiphertext, b: &BfvCiphertext) -> Result<BfvCiphertext> {
    Ok(BfvCiphertext {
        c0: ring.add(&a.c0, &b.c0)?,
        c1: ring.add(&a.c1, &b.c1)?,
        depth: a.depth.max(b.depth),
        noise_var: a.noise_var + b.noise_var,
    })
}

fn check_capacity(ring: &Ring, t: u64) -> Result<()> {
    let q_bits = 64 - ring.modulus().leading_zeros();
    let d_bits = ring.degree(0).trailing_zeros();
    let t_bits = 64 - t.leading_zeros();
    if 2 * q_bits + d_bits > WideNegacyclic::CAPACITY_BITS || 2 * q_bits + d_bits + t_bits > 126 {
        return Err(Error::Capability(format!(
            "exact tensoring needs 2·log2(q) + log2(d) <= {} bits",
            WideNegacyclic::CAPACITY_BITS
        )));
    }
    Ok(())
}

/// Tensor, rescale by `t/q` and key-switch back to two components.
pub fn multiply(
    ring: &Ring,
    params: BfvParams,
    rlk: &BfvRelinKey,
    a: &BfvCiphertext,
    b: &BfvCiphertext,
) -> Result<BfvCiphertext> {
    check_capacity(ring, params.t)?;
    let wide = ring.wide_multiplier()?;
    for x in [&a.c0, &a.c1, &b.c0, &b.c1] {
        ring.check(x)?;
    }
    let q = ring.modulus();
    let t = params.t as i128;
    let rescale = |v: Vec<i128>| -> Vec<u64> {
        v.into_iter()
            .map(|x| arith::reduce_i128(arith::div_round(x * t, q as i128), q))
            .collect()
    };
    let (a0, a1, b0, b1) = (a.c0.centered(), a.c1.centered(), b.c0.centered(), b.c1.centered());
    let mut d0 = Vec::with_capacity(ring.n());
    let mut d1 = Vec::with_capacity(ring.n());
    let mut d2 = Vec::with_capacity(ring.n());
    for i in 0..ring.n() {
        d0.push(rescale(wide.multiply(&a0[i], &b0[i])));
        let cross: Vec<i128> = wide
            .multiply(&a0[i], &b1[i])
            .into_iter()
            .zip(wide.multiply(&a1[i], &b0[i]))
            .map(|(x, y)| x + y)
            .collect();
        d1.push(rescale(cross));
        d2.push(rescale(wide.multiply(&a1[i], &b1[i])));
    }
    let (d0, d1, d2) = (ring.from_coeffs(d0)?, ring.from_coeffs(d1)?, ring.from_coeffs(d2)?);
    let (c0, c1) = key_switch(ring, rlk, d0, d1, &d2)?;
    let d = ring.degree(0);
    Ok(BfvCiphertext {
        c0,
        c1,
        depth: a.depth.max(b.depth) + 1,
        noise_var: noise::bfv_mul_variance(
            a.noise_var,
            b.noise_var,
            d,
            params.t,
            params.sigma,
            q,
            rlk.base_log,
        ),
    })
}

/// Folds `d2·s^2` into `(c0, c1)` using the digit decomposition of `d2`.
fn key_switch(
    ring: &Ring,
    rlk: &BfvRelinKey,
    mut c0: RingElem,
    mut c1: RingElem,
    d2: &RingElem,
) -> Result<(RingElem, RingElem)> {
    let mask = (1u64 << rlk.base_log) - 1;
    for (i, (k0, k1)) in rlk.parts.iter().enumerate() {
        let shift = rlk.base_log * i as u32;
        let digit: Vec<Vec<u64>> = d2
            .coords()
            .iter()
            .map(|c| c.coeffs().iter().map(|&x| (x >> shift) & mask).collect())
            .collect();
        let digit = ring.from_coeffs(digit)?;
        c0 = ring.add(&c0, &ring.mul(&digit, k0)?)?;
        c1 = ring.add(&c1, &ring.mul(&digit, k1)?)?;
    }
    Ok((c0, c1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::DefiningPoly;

    #[test]
    fn digit_counts() {
        assert_eq!(digit_count(17, 8), 1);
        assert_eq!(digit_count(257, 8), 2);
        assert_eq!(digit_count(17_592_186_028_033, 8), 6);
    }

    #[test]
    fn small_ring_multiply() {
        let q = 1_073_707_009;
        let ring = Ring::from_parts(vec![DefiningPoly::negacyclic(16); 2], q).unwrap();
        let plain = Ring::from_parts(vec![DefiningPoly::negacyclic(16); 2], 17).unwrap();
        let params = BfvParams { t: 17, sigma: 3.2 };
        let dist = DiscreteGaussian::new(3.2).unwrap();
        let mut rng = Sampler::from_u64(11);
        let s = keygen_secret(&ring, &dist, &mut rng);
        let rlk = keygen_relin(&ring, &s, DEFAULT_BASE_LOG, &dist, &mut rng).unwrap();
        let u = plain.constant(&[3, 5]).unwrap();
        let v = plain.constant(&[4, 2]).unwrap();
        let cu = encrypt_sk(&ring, params, &s, &u, &dist, &mut rng).unwrap();
        let cv = encrypt_sk(&ring, params, &s, &v, &dist, &mut rng).unwrap();
        let prod = multiply(&ring, params, &rlk, &cu, &cv).unwrap();
        assert_eq!(prod.depth, 1);
        let out = decrypt(&ring, &plain, &s, &prod).unwrap();
        assert_eq!(out, plain.constant(&[12, 10]).unwrap());
    }
}
