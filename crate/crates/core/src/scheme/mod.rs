//! Vector homomorphic encryption over `R_q`.
//!
//! Keys and ciphertexts follow the LWE shape with ring entries: the secret is a vector
//! `s` of `n_lwe` ring elements, the public key is `(A, b = A·s + e)` with `A` an
//! `m × n_lwe` matrix, and a ciphertext is `(c1, c2) = (Aᵀ·r, bᵀ·r + Δ·v)`. Decryption
//! computes `c2 − c1ᵀ·s = Δ·v + eᵀ·r` and rounds. Messages are scaled by
//! `Δ = floor(q/t)`.
//!
//! [`Context::eval_mul_literal`] and [`Context::relinearize`] implement the
//! coordinate-wise product of ciphertext components and the `R1`/`R2` key update
//! exactly as formulated; they do not in general decrypt to the product of the
//! plaintexts. The [`reference`] module provides a tensoring-based multiplication
//! that does and serves as the correctness oracle.

mod params;
pub mod reference;

use std::sync::Arc;

use crate::error::{domain_err, shape_err};
use crate::noise::{self, NoiseEstimate, NoiseModel};
use crate::ring::{scale_round, Ring, RingElem};
use crate::sampling::{gaussian_elem, sample_uniform_elem, DiscreteGaussian, Sampler};
use crate::Result;

pub use params::SchemeParams;

#[derive(Clone, Debug, PartialEq)]
pub struct SecretKey {
    pub s: Vec<RingElem>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PublicKey {
    /// `m` rows of `n_lwe` entries.
    pub a: Vec<Vec<RingElem>>,
    pub b: Vec<RingElem>,
}

/// `R1[k][j] = A_rel[k][j]·s[j] + e_rel[k][j]`, `R2[k][j] = B_rel[k][j]·s[j] + e'_rel[k][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelinKey {
    pub r1: Vec<Vec<RingElem>>,
    pub r2: Vec<Vec<RingElem>>,
    pub a_rel: Vec<Vec<RingElem>>,
    pub b_rel: Vec<Vec<RingElem>>,
}

/// A message with every coefficient in `[0, t)`, stored as an element of the ring mod `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plaintext {
    pub msg: RingElem,
}

impl Plaintext {
    /// Constant coordinate polynomials `(k_1, ..., k_n)`.
    pub fn from_vector(ctx: &Context, values: &[u64]) -> Result<Self> {
        let t = ctx.params.ring.t;
        if let Some(v) = values.iter().find(|&&v| v >= t) {
            return Err(domain_err!("plaintext value {v} is not below t = {t}"));
        }
        Ok(Self {
            msg: ctx.plaintext_ring.constant(values)?,
        })
    }

    pub fn from_coeffs(ctx: &Context, coords: Vec<Vec<u64>>) -> Result<Self> {
        let t = ctx.params.ring.t;
        if let Some(v) = coords.iter().flatten().find(|&&v| v >= t) {
            return Err(domain_err!("plaintext coefficient {v} is not below t = {t}"));
        }
        Ok(Self {
            msg: ctx.plaintext_ring.from_coeffs(coords)?,
        })
    }

    /// Constant term of every coordinate.
    pub fn to_vector(&self) -> Vec<u64> {
        self.msg.coords().iter().map(|c| c.coeffs()[0]).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ciphertext {
    pub c1: Vec<RingElem>,
    pub c2: RingElem,
    pub noise: NoiseEstimate,
    /// Index into the modulus chain.
    pub level: usize,
    /// Set by [`Context::eval_mul_literal`], cleared by [`Context::relinearize`].
    pub needs_relin: bool,
}

/// Parameters plus one precomputed ring per modulus level.
#[derive(Debug)]
pub struct Context {
    params: SchemeParams,
    rings: Vec<Arc<Ring>>,
    plaintext_ring: Arc<Ring>,
    error: DiscreteGaussian,
    model: NoiseModel,
}

impl Context {
    pub fn new(params: SchemeParams) -> Result<Self> {
        Self::with_model(params, NoiseModel::default())
    }

    pub fn with_model(params: SchemeParams, model: NoiseModel) -> Result<Self> {
        params.validate()?;
        let rings = params
            .modulus_chain
            .iter()
            .map(|&q| Ring::new(&params.ring.with_modulus(q)?).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        let plaintext_ring = Arc::new(Ring::from_parts(params.ring.f.clone(), params.ring.t)?);
        let error = DiscreteGaussian::new(params.ring.sigma)?;
        Ok(Self {
            params,
            rings,
            plaintext_ring,
            error,
            model,
        })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn model(&self) -> &NoiseModel {
        &self.model
    }

    pub fn ring(&self, level: usize) -> Result<&Arc<Ring>> {
        self.rings
            .get(level)
            .ok_or_else(|| domain_err!("no modulus level {level}"))
    }

    /// Level-0 ring.
    pub fn base_ring(&self) -> &Arc<Ring> {
        &self.rings[0]
    }

    pub fn plaintext_ring(&self) -> &Arc<Ring> {
        &self.plaintext_ring
    }

    pub fn error_dist(&self) -> &DiscreteGaussian {
        &self.error
    }

    pub fn delta(&self, level: usize) -> Result<u64> {
        Ok(self.ring(level)?.modulus() / self.params.ring.t)
    }

    pub fn keygen(&self, rng: &mut Sampler) -> Result<(PublicKey, SecretKey)> {
        let ring = self.base_ring();
        let SchemeParams { n_lwe, m, .. } = self.params;
        let s: Vec<RingElem> = (0..n_lwe)
            .map(|_| gaussian_elem(ring, &self.error, rng))
            .collect();
        let a: Vec<Vec<RingElem>> = (0..m)
            .map(|_| (0..n_lwe).map(|_| sample_uniform_elem(ring, rng)).collect())
            .collect();
        let b = a
            .iter()
            .map(|row| {
                let e = gaussian_elem(ring, &self.error, rng);
                ring.add(&ring.inner_product(row, &s)?, &e)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((PublicKey { a, b }, SecretKey { s }))
    }

    pub fn relin_keygen(&self, sk: &SecretKey, rng: &mut Sampler) -> Result<RelinKey> {
        let ring = self.base_ring();
        let n_lwe = self.params.n_lwe;
        self.check_secret(sk)?;
        let mut matrix = || -> Vec<Vec<RingElem>> {
            (0..n_lwe)
                .map(|_| (0..n_lwe).map(|_| sample_uniform_elem(ring, rng)).collect())
                .collect()
        };
        let a_rel = matrix();
        let b_rel = matrix();
        let mut mask = |gen: &Vec<Vec<RingElem>>| -> Result<Vec<Vec<RingElem>>> {
            gen.iter()
                .map(|row| {
                    row.iter()
                        .zip(&sk.s)
                        .map(|(g, s)| {
                            let e = gaussian_elem(ring, &self.error, rng);
                            ring.add(&ring.mul(g, s)?, &e)
                        })
                        .collect()
                })
                .collect()
        };
        let r1 = mask(&a_rel)?;
        let r2 = mask(&b_rel)?;
        Ok(RelinKey {
            r1,
            r2,
            a_rel,
            b_rel,
        })
    }

    fn check_secret(&self, sk: &SecretKey) -> Result<()> {
        if sk.s.len() != self.params.n_lwe {
            return Err(shape_err!(
                "secret has {} entries, expected n_lwe = {}",
                sk.s.len(),
                self.params.n_lwe
            ));
        }
        sk.s.iter().try_for_each(|s| self.base_ring().check(s))
    }

    fn check_public(&self, pk: &PublicKey) -> Result<()> {
        let SchemeParams { n_lwe, m, .. } = self.params;
        if pk.a.len() != m || pk.b.len() != m || pk.a.iter().any(|row| row.len() != n_lwe) {
            return Err(shape_err!("public key is not {m} x {n_lwe}"));
        }
        Ok(())
    }

    fn check_plaintext(&self, pt: &Plaintext) -> Result<()> {
        let t = self.params.ring.t;
        if pt.msg.modulus() != t {
            return Err(domain_err!(
                "plaintext is reduced mod {}, expected t = {t}",
                pt.msg.modulus()
            ));
        }
        self.plaintext_ring.check(&pt.msg)
    }

    /// `Δ·msg` in the ring at `level`.
    pub fn scaled_message(&self, pt: &Plaintext, level: usize) -> Result<RingElem> {
        self.check_plaintext(pt)?;
        let ring = self.ring(level)?;
        crate::bfv::scale_message(ring, &pt.msg, self.delta(level)?)
    }

    /// Samples `r ~ χ^m` and encrypts.
    pub fn encrypt(&self, pk: &PublicKey, pt: &Plaintext, rng: &mut Sampler) -> Result<Ciphertext> {
        let ring = self.base_ring();
        let r: Vec<RingElem> = (0..self.params.m)
            .map(|_| gaussian_elem(ring, &self.error, rng))
            .collect();
        self.encrypt_with_randomness(pk, pt, &r)
    }

    /// `(Aᵀ·r, bᵀ·r + Δ·msg)` for caller-supplied `r`.
    pub fn encrypt_with_randomness(
        &self,
        pk: &PublicKey,
        pt: &Plaintext,
        r: &[RingElem],
    ) -> Result<Ciphertext> {
        self.check_public(pk)?;
        let ring = self.base_ring();
        if r.len() != self.params.m {
            return Err(shape_err!(
                "encryption randomness has {} entries, expected m = {}",
                r.len(),
                self.params.m
            ));
        }
        let c1 = (0..self.params.n_lwe)
            .map(|j| {
                let column: Vec<RingElem> = pk.a.iter().map(|row| row[j].clone()).collect();
                ring.inner_product(&column, r)
            })
            .collect::<Result<Vec<_>>>()?;
        let c2 = ring.add(&ring.inner_product(&pk.b, r)?, &self.scaled_message(pt, 0)?)?;
        Ok(Ciphertext {
            c1,
            c2,
            noise: noise::noise_fresh(&self.params),
            level: 0,
            needs_relin: false,
        })
    }

    /// Secret key entries re-reduced under the modulus of `level`.
    fn secret_at(&self, sk: &SecretKey, level: usize) -> Result<Vec<RingElem>> {
        self.check_secret(sk)?;
        if level == 0 {
            return Ok(sk.s.clone());
        }
        let ring = self.ring(level)?;
        sk.s.iter().map(|s| ring.lift_centered(s)).collect()
    }

    fn check_ciphertext(&self, ct: &Ciphertext) -> Result<&Arc<Ring>> {
        let ring = self.ring(ct.level)?;
        if ct.c1.len() != self.params.n_lwe {
            return Err(shape_err!(
                "ciphertext has {} c1 entries, expected n_lwe = {}",
                ct.c1.len(),
                self.params.n_lwe
            ));
        }
        ct.c1.iter().try_for_each(|c| ring.check(c))?;
        ring.check(&ct.c2)?;
        if ct.noise.var.len() != self.params.ring.n {
            return Err(shape_err!("noise estimate does not match the coordinate count"));
        }
        Ok(ring)
    }

    /// `c2 − c1ᵀ·s` before rounding.
    pub fn decrypt_raw(&self, sk: &SecretKey, ct: &Ciphertext) -> Result<RingElem> {
        let ring = self.check_ciphertext(ct)?;
        let s = self.secret_at(sk, ct.level)?;
        ring.sub(&ct.c2, &ring.inner_product(&ct.c1, &s)?)
    }

    pub fn decrypt(&self, sk: &SecretKey, ct: &Ciphertext) -> Result<Plaintext> {
        let w = self.decrypt_raw(sk, ct)?;
        Ok(Plaintext {
            msg: crate::bfv::round_to_plaintext(&self.plaintext_ring, &w)?,
        })
    }

    fn same_level(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Arc<Ring>> {
        if a.level != b.level {
            return Err(shape_err!("ciphertext levels differ: {} vs {}", a.level, b.level));
        }
        let ring = self.check_ciphertext(a)?.clone();
        self.check_ciphertext(b)?;
        Ok(ring)
    }

    /// `(c1 + c1', c2 + c2')`.
    pub fn eval_add(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
        let ring = self.same_level(a, b)?;
        if a.needs_relin != b.needs_relin {
            return Err(domain_err!("cannot add a relinearized and a pre-relinearization ciphertext"));
        }
        let c1 = a
            .c1
            .iter()
            .zip(&b.c1)
            .map(|(x, y)| ring.add(x, y))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ciphertext {
            c1,
            c2: ring.add(&a.c2, &b.c2)?,
            noise: noise::noise_add(&a.noise, &b.noise)?,
            level: a.level,
            needs_relin: a.needs_relin,
        })
    }

    /// `(c1 ⊛ c1', c2 ⊛ c2')`, entry `k` of `c1` multiplied with entry `k` of `c1'`.
    pub fn eval_mul_literal(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
        let ring = self.same_level(a, b)?;
        let c1 = a
            .c1
            .iter()
            .zip(&b.c1)
            .map(|(x, y)| ring.mul(x, y))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ciphertext {
            c1,
            c2: ring.mul(&a.c2, &b.c2)?,
            noise: noise::noise_mul(&a.noise, &b.noise)?,
            level: a.level,
            needs_relin: true,
        })
    }

    /// `c1_rel = c1 + R1·c2`, `c2_rel = c2 + Σ_k (R2·c2)_k`, with `c2` broadcast across
    /// the matrix columns.
    pub fn relinearize(&self, rlk: &RelinKey, ct: &Ciphertext) -> Result<Ciphertext> {
        if !ct.needs_relin {
            return Err(domain_err!("ciphertext is not awaiting relinearization"));
        }
        if ct.level != 0 {
            return Err(domain_err!("relinearization keys live at level 0, ciphertext is at level {}", ct.level));
        }
        let ring = self.check_ciphertext(ct)?;
        let n_lwe = self.params.n_lwe;
        let square = |m: &Vec<Vec<RingElem>>| m.len() == n_lwe && m.iter().all(|r| r.len() == n_lwe);
        if !square(&rlk.r1) || !square(&rlk.r2) {
            return Err(shape_err!("relinearization key is not {n_lwe} x {n_lwe}"));
        }
        // (R·c2)_k = Σ_j R[k][j]·c2
        let apply = |r: &Vec<Vec<RingElem>>| -> Result<Vec<RingElem>> {
            r.iter()
                .map(|row| {
                    let mut acc = ring.zero();
                    for entry in row {
                        acc = ring.add(&acc, entry)?;
                    }
                    ring.mul(&acc, &ct.c2)
                })
                .collect()
        };
        let r1c2 = apply(&rlk.r1)?;
        let r2c2 = apply(&rlk.r2)?;
        let c1 = ct
            .c1
            .iter()
            .zip(&r1c2)
            .map(|(c, x)| ring.add(c, x))
            .collect::<Result<Vec<_>>>()?;
        let mut c2 = ct.c2.clone();
        for x in &r2c2 {
            c2 = ring.add(&c2, x)?;
        }
        Ok(Ciphertext {
            c1,
            c2,
            noise: noise::noise_relin(
                &ct.noise,
                &self.params.ring,
                self.params.ring.sigma,
                self.model.c_rel,
            ),
            level: ct.level,
            needs_relin: false,
        })
    }

    /// Rescales every component to the modulus at `level`.
    pub fn mod_switch(&self, ct: &Ciphertext, level: usize) -> Result<Ciphertext> {
        self.check_ciphertext(ct)?;
        if level == ct.level {
            return Ok(ct.clone());
        }
        if level < ct.level {
            return Err(domain_err!(
                "cannot switch from level {} up to level {level}",
                ct.level
            ));
        }
        let target = self.ring(level)?;
        let q_from = self.ring(ct.level)?.modulus();
        let q_to = target.modulus();
        let c1 = ct
            .c1
            .iter()
            .map(|c| scale_round(c, q_to))
            .collect::<Result<Vec<_>>>()?;
        let c2 = scale_round(&ct.c2, q_to)?;
        Ok(Ciphertext {
            c1,
            c2,
            noise: noise::noise_mod_switch(&ct.noise, q_from, q_to, &self.params),
            level,
            needs_relin: ct.needs_relin,
        })
    }
}

/// Search-side sample `(a, a·s + e)` with `a` uniform and `e` Gaussian.
pub fn vlwe_sample(
    ring: &Ring,
    s: &RingElem,
    error: &DiscreteGaussian,
    rng: &mut Sampler,
) -> Result<(RingElem, RingElem)> {
    let a = sample_uniform_elem(ring, rng);
    let e = gaussian_elem(ring, error, rng);
    let b = ring.add(&ring.mul(&a, s)?, &e)?;
    Ok((a, b))
}

/// Decision-side uniform sample: `b` independent of any secret.
pub fn uniform_sample(ring: &Ring, rng: &mut Sampler) -> (RingElem, RingElem) {
    let a = sample_uniform_elem(ring, rng);
    let b = sample_uniform_elem(ring, rng);
    (a, b)
}

/// Per-coordinate agreement of the literal product with `u·v mod t`.
#[derive(Clone, Debug, PartialEq)]
pub struct AgreementReport {
    pub trials: usize,
    /// Fraction of trials in which coordinate `i` decrypted to the true product.
    pub per_coord: Vec<f64>,
    /// Fraction of trials in which every coordinate agreed.
    pub all_coords: f64,
}

/// Encrypts random `u`, `v`, applies [`Context::eval_mul_literal`] and
/// [`Context::relinearize`], and compares the decryption against `u·v mod t`.
pub fn literal_agreement(ctx: &Context, trials: usize, rng: &mut Sampler) -> Result<AgreementReport> {
    let n = ctx.params.ring.n;
    let t = ctx.params.ring.t;
    let (pk, sk) = ctx.keygen(rng)?;
    let rlk = ctx.relin_keygen(&sk, rng)?;
    let mut hits = vec![0usize; n];
    let mut all = 0usize;
    for _ in 0..trials {
        let u: Vec<u64> = (0..n).map(|_| rng.uniform_below(t)).collect();
        let v: Vec<u64> = (0..n).map(|_| rng.uniform_below(t)).collect();
        let cu = ctx.encrypt(&pk, &Plaintext::from_vector(ctx, &u)?, rng)?;
        let cv = ctx.encrypt(&pk, &Plaintext::from_vector(ctx, &v)?, rng)?;
        let prod = ctx.relinearize(&rlk, &ctx.eval_mul_literal(&cu, &cv)?)?;
        let got = ctx.decrypt(&sk, &prod)?;
        let want = ctx.plaintext_ring.mul(
            &Plaintext::from_vector(ctx, &u)?.msg,
            &Plaintext::from_vector(ctx, &v)?.msg,
        )?;
        let mut every = true;
        for (i, hit) in hits.iter_mut().enumerate() {
            if got.msg.coord(i) == want.coord(i) {
                *hit += 1;
            } else {
                every = false;
            }
        }
        all += usize::from(every);
    }
    let rate = |k: usize| if trials == 0 { 0.0 } else { k as f64 / trials as f64 };
    Ok(AgreementReport {
        trials,
        per_coord: hits.into_iter().map(rate).collect(),
        all_coords: rate(all),
    })
}

/// Largest per-coordinate centered magnitude of `b − A·s` over the public key.
pub fn public_key_error_norm(ctx: &Context, pk: &PublicKey, sk: &SecretKey) -> Result<u64> {
    let ring = ctx.base_ring();
    let mut worst = 0;
    for (row, b) in pk.a.iter().zip(&pk.b) {
        let e = ring.sub(b, &ring.inner_product(row, &sk.s)?)?;
        worst = worst.max(e.coord_inf_norms().into_iter().max().unwrap_or(0));
    }
    Ok(worst)
}

/// Centered noise `c2 − c1ᵀ·s − Δ·msg`, one vector per coordinate.
pub fn noise_terms(
    ctx: &Context,
    sk: &SecretKey,
    ct: &Ciphertext,
    pt: &Plaintext,
) -> Result<Vec<Vec<i64>>> {
    let ring = ctx.ring(ct.level)?;
    let w = ctx.decrypt_raw(sk, ct)?;
    Ok(ring.sub(&w, &ctx.scaled_message(pt, ct.level)?)?.centered())
}

#[cfg(test)]
mod tests;
