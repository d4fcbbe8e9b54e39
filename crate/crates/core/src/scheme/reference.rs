//! Reference multiplicative path.
//!
//! Each coordinate carries an ordinary two-element scale-and-round ciphertext under
//! the first secret entry `s[0]`; multiplication tensors, rescales by `t/q` and
//! key-switches. It is the oracle against which multiplicative homomorphism is
//! checked, and it refuses to multiply once the noise model predicts that decryption
//! would fail.

use crate::bfv::{self, BfvCiphertext, BfvParams, BfvRelinKey, DEFAULT_BASE_LOG};
use crate::noise;
use crate::sampling::Sampler;
use crate::{Error, Result};

use super::{Context, Plaintext, SecretKey};

pub type RefCiphertext = BfvCiphertext;
pub type RefRelinKey = BfvRelinKey;

fn bfv_params(ctx: &Context) -> BfvParams {
    BfvParams {
        t: ctx.params().ring.t,
        sigma: ctx.params().ring.sigma,
    }
}

fn reference_secret<'a>(ctx: &Context, sk: &'a SecretKey) -> Result<&'a crate::ring::RingElem> {
    let s = sk
        .s
        .first()
        .ok_or_else(|| Error::Shape("secret key is empty".into()))?;
    ctx.base_ring().check(s)?;
    Ok(s)
}

fn require_fast(ctx: &Context) -> Result<()> {
    if !ctx.params().ring.ntt_friendly() {
        return Err(Error::Capability(
            "the reference path needs x^d + 1 coordinates with an NTT-friendly prime".into(),
        ));
    }
    Ok(())
}

pub fn ref_relin_keygen(ctx: &Context, sk: &SecretKey, rng: &mut Sampler) -> Result<RefRelinKey> {
    require_fast(ctx)?;
    let s = reference_secret(ctx, sk)?;
    bfv::keygen_relin(ctx.base_ring(), s, DEFAULT_BASE_LOG, ctx.error_dist(), rng)
}

pub fn ref_encrypt(
    ctx: &Context,
    sk: &SecretKey,
    pt: &Plaintext,
    rng: &mut Sampler,
) -> Result<RefCiphertext> {
    require_fast(ctx)?;
    let s = reference_secret(ctx, sk)?;
    ctx.scaled_message(pt, 0)?;
    bfv::encrypt_sk(ctx.base_ring(), bfv_params(ctx), s, &pt.msg, ctx.error_dist(), rng)
}

/// Depth-consuming product; fails with [`Error::NoiseOverflow`] when the predicted noise
/// of the result no longer fits the decryption budget.
pub fn ref_eval_mul(
    ctx: &Context,
    rlk: &RefRelinKey,
    a: &RefCiphertext,
    b: &RefCiphertext,
) -> Result<RefCiphertext> {
    require_fast(ctx)?;
    let ring = ctx.base_ring();
    let params = bfv_params(ctx);
    let predicted = noise::bfv_mul_variance(
        a.noise_var,
        b.noise_var,
        ring.degree(0),
        params.t,
        params.sigma,
        ring.modulus(),
        rlk.base_log,
    );
    let delta = params.delta(ring.modulus());
    if !noise::decryption_safe(predicted, delta) {
        return Err(Error::NoiseOverflow(format!(
            "depth {} product: predicted noise std {:.3e} exceeds the budget Δ/12 = {:.3e}",
            a.depth.max(b.depth) + 1,
            predicted.sqrt(),
            delta as f64 / 12.0
        )));
    }
    bfv::multiply(ring, params, rlk, a, b)
}

pub fn ref_eval_add(ctx: &Context, a: &RefCiphertext, b: &RefCiphertext) -> Result<RefCiphertext> {
    bfv::add(ctx.base_ring(), a, b)
}

pub fn ref_decrypt(ctx: &Context, sk: &SecretKey, ct: &RefCiphertext) -> Result<Plaintext> {
    let s = reference_secret(ctx, sk)?;
    Ok(Plaintext {
        msg: bfv::decrypt(ctx.base_ring(), ctx.plaintext_ring(), s, ct)?,
    })
}

/// Centered phase error of a reference ciphertext against its known plaintext.
pub fn ref_noise_terms(
    ctx: &Context,
    sk: &SecretKey,
    ct: &RefCiphertext,
    pt: &Plaintext,
) -> Result<Vec<Vec<i64>>> {
    let s = reference_secret(ctx, sk)?;
    bfv::phase_error(ctx.base_ring(), bfv_params(ctx), s, ct, &pt.msg)
}
