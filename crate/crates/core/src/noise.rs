//! Analytic noise tracking and its empirical counterpart.
//!
//! Noise is tracked as a per-coordinate coefficient variance. Coordinates never mix,
//! so the covariance across coordinates is diagonal and a vector of variances is the
//! whole story. Big-O shapes carry explicit constants, see [`NoiseModel`].

use rayon::prelude::*;

use crate::error::shape_err;
use crate::ring::VarietyParams;
use crate::sampling::Sampler;
use crate::scheme::{self, Context, Plaintext, SchemeParams, SecretKey};
use crate::{Error, Result};

/// Per-coordinate variance of the decryption noise.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseEstimate {
    pub var: Vec<f64>,
    /// Homomorphic operations applied since encryption.
    pub depth: u32,
}

impl NoiseEstimate {
    pub fn zero(n: usize) -> Self {
        Self {
            var: vec![0.0; n],
            depth: 0,
        }
    }

    pub fn max_var(&self) -> f64 {
        self.var.iter().copied().fold(0.0, f64::max)
    }
}

/// Constants attached to the asymptotic formulas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    /// Relinearization multiplier, one unit per `R` matrix added.
    pub c_rel: f64,
    /// Constant in the iterated-growth bound.
    pub c_iter: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            c_rel: 2.0,
            c_iter: 1.0,
        }
    }
}

/// Variance of `eᵀ·r`: `m` products of Gaussian ring elements, each coefficient a
/// `d`-term negacyclic convolution, giving `m·d·σ⁴` per coordinate.
pub fn noise_fresh(params: &SchemeParams) -> NoiseEstimate {
    let s4 = params.ring.sigma.powi(4);
    NoiseEstimate {
        var: (0..params.ring.n)
            .map(|i| params.m as f64 * params.ring.degree(i) as f64 * s4)
            .collect(),
        depth: 0,
    }
}

fn same_shape(a: &NoiseEstimate, b: &NoiseEstimate) -> Result<()> {
    if a.var.len() != b.var.len() {
        return Err(shape_err!(
            "noise estimates cover {} and {} coordinates",
            a.var.len(),
            b.var.len()
        ));
    }
    Ok(())
}

/// `σ_add² = σ² + σ'²`.
pub fn noise_add(a: &NoiseEstimate, b: &NoiseEstimate) -> Result<NoiseEstimate> {
    same_shape(a, b)?;
    Ok(NoiseEstimate {
        var: a.var.iter().zip(&b.var).map(|(x, y)| x + y).collect(),
        depth: a.depth.max(b.depth),
    })
}

/// `σ_mult² = (σ² + σ'²)·(σ² + σ'²)`, taken literally.
pub fn noise_mul(a: &NoiseEstimate, b: &NoiseEstimate) -> Result<NoiseEstimate> {
    same_shape(a, b)?;
    Ok(NoiseEstimate {
        var: a.var.iter().zip(&b.var).map(|(x, y)| (x + y) * (x + y)).collect(),
        depth: a.depth.max(b.depth) + 1,
    })
}

/// `var·(1 + c_rel) + d_i·relin_sigma²`.
pub fn noise_relin(
    est: &NoiseEstimate,
    ring: &VarietyParams,
    relin_sigma: f64,
    c_rel: f64,
) -> NoiseEstimate {
    NoiseEstimate {
        var: est
            .var
            .iter()
            .enumerate()
            .map(|(i, v)| v * (1.0 + c_rel) + ring.degree(i) as f64 * relin_sigma * relin_sigma)
            .collect(),
        depth: est.depth,
    }
}

/// Rescaling by `q_to/q_from` plus uniform rounding error on `c2` and on every `c1`
/// entry (the latter multiplied by the Gaussian secret).
pub fn noise_mod_switch(
    est: &NoiseEstimate,
    q_from: u64,
    q_to: u64,
    params: &SchemeParams,
) -> NoiseEstimate {
    let ratio = q_to as f64 / q_from as f64;
    let s2 = params.ring.sigma * params.ring.sigma;
    NoiseEstimate {
        var: est
            .var
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let rounding =
                    (1.0 + params.n_lwe as f64 * params.ring.degree(i) as f64 * s2) / 12.0;
                v * ratio * ratio + rounding
            })
            .collect(),
        depth: est.depth,
    }
}

/// `C·n^{t/2}·d^t·σ`, the standard deviation after `t_ops` sequential operations.
pub fn noise_iterated(t_ops: i64, n: usize, d: usize, sigma: f64, c: f64) -> Result<f64> {
    if t_ops < 0 {
        return Err(Error::Domain(format!("operation count {t_ops} is negative")));
    }
    let t = t_ops as f64;
    Ok(c * (n as f64).powf(t / 2.0) * (d as f64).powf(t) * sigma)
}

/// Largest `|f_i'(x)|` over sampled centered points `x` and all coordinates.
///
/// With no mixed terms the Jacobian of `(f_1, ..., f_n)` is diagonal, so its largest
/// singular value is the largest `|f_i'(x_i)|`. When `sample_count >= q` every residue
/// is evaluated.
pub fn jacobian_bound(params: &VarietyParams, sample_count: usize, rng: &mut Sampler) -> f64 {
    let q = params.q;
    let half = (q / 2) as i64;
    let points: Vec<i64> = if sample_count as u64 >= q {
        (half - q as i64 + 1..=half).collect()
    } else {
        (0..sample_count)
            .map(|_| crate::arith::centered(rng.uniform_below(q), q))
            .collect()
    };
    params
        .f
        .iter()
        .flat_map(|f| points.iter().map(move |&x| f.derivative_abs_at(x, q)))
        .fold(0.0, f64::max)
}

/// `6·σ < Δ/2`: a six-sigma excursion still rounds to the right plaintext.
pub fn decryption_safe(variance: f64, delta: u64) -> bool {
    6.0 * variance.max(0.0).sqrt() < delta as f64 / 2.0
}

/// Per-coordinate infinity norm of `c2 − c1ᵀ·s − Δ·msg`.
pub fn measure_noise(
    ctx: &Context,
    sk: &SecretKey,
    ct: &scheme::Ciphertext,
    pt: &Plaintext,
) -> Result<Vec<f64>> {
    Ok(scheme::noise_terms(ctx, sk, ct, pt)?
        .into_iter()
        .map(|c| c.into_iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as f64)
        .collect())
}

/// Fresh public-key encryption in the two-element scheme: `e·u + e1 + e2·s`.
pub fn bfv_public_fresh_variance(d: usize, sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    2.0 * d as f64 * s2 * s2 + s2
}

/// Heuristic variance after tensoring, rescaling and base-`2^w` key switching.
///
/// Terms: `t·(e_a·k_b + e_b·k_a)` with `k` the overflow polynomial of a phase,
/// `m_a·e_b + m_b·e_a`, rounding error times `1 + s + s²`, and the key-switching
/// digits times fresh key errors.
pub fn bfv_mul_variance(
    var_a: f64,
    var_b: f64,
    d: usize,
    t: u64,
    sigma: f64,
    q: u64,
    base_log: u32,
) -> f64 {
    let d = d as f64;
    let t = t as f64;
    let s2 = sigma * sigma;
    let overflow = (1.0 + d * s2) / 12.0;
    let tensor = t * t * d * (var_a + var_b) * overflow;
    let message = d * t * t / 3.0 * (var_a + var_b);
    let rounding = (1.0 + d * s2 + d * d * s2 * s2) / 12.0;
    let digits = (64 - (q - 1).leading_zeros()).div_ceil(base_log) as f64;
    let base = (1u64 << base_log) as f64;
    let switching = digits * d * base * base / 3.0 * s2;
    tensor + message + rounding + switching
}

/// Homomorphic circuit exercised by [`simulate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimOp {
    /// Sum of `k + 1` fresh ciphertexts.
    Add(usize),
    /// `k` literal multiplications, each followed by relinearization.
    Mul(usize),
}

impl std::str::FromStr for SimOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, count) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected add:k or mul:k, got {s:?}")))?;
        let k: usize = count
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad operation count in {s:?}")))?;
        match kind.trim() {
            "add" => Ok(SimOp::Add(k)),
            "mul" => Ok(SimOp::Mul(k)),
            other => Err(Error::Parse(format!("unknown operation {other:?}"))),
        }
    }
}

impl std::fmt::Display for SimOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SimOp::Add(k) => write!(f, "add:{k}"),
            SimOp::Mul(k) => write!(f, "mul:{k}"),
        }
    }
}

/// Monte-Carlo outcome for one circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseReport {
    pub op: SimOp,
    pub trials: usize,
    /// Model variance per coordinate.
    pub predicted: Vec<f64>,
    /// Empirical variance per coordinate, pooled over coefficients and trials.
    pub measured: Vec<f64>,
    /// Largest absolute pairwise correlation between coordinates.
    pub max_cross_correlation: f64,
    /// Fraction of trials whose noise infinity norm stayed below `Δ/2`.
    pub within_budget: f64,
}

impl NoiseReport {
    pub fn ratio(&self, coord: usize) -> f64 {
        self.measured[coord] / self.predicted[coord]
    }

    pub fn mean_predicted(&self) -> f64 {
        self.predicted.iter().sum::<f64>() / self.predicted.len() as f64
    }

    pub fn mean_measured(&self) -> f64 {
        self.measured.iter().sum::<f64>() / self.measured.len() as f64
    }

    /// Tab-separated rows: operation, coordinate, predicted, measured, ratio.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.predicted.len() {
            out.push_str(&format!(
                "{}\t{}\t{:.6e}\t{:.6e}\t{:.4}\n",
                self.op,
                i,
                self.predicted[i],
                self.measured[i],
                self.ratio(i)
            ));
        }
        out
    }
}

/// Noise terms of one trial plus the model estimate.
struct Trial {
    terms: Vec<Vec<i64>>,
    predicted: Vec<f64>,
    within_budget: bool,
}

fn run_trial(ctx: &Context, op: SimOp, rng: &mut Sampler) -> Result<Trial> {
    let params = ctx.params();
    let n = params.ring.n;
    let t = params.ring.t;
    let (pk, sk) = ctx.keygen(rng)?;
    let random_pt = |rng: &mut Sampler| -> Result<Plaintext> {
        let v: Vec<u64> = (0..n).map(|_| rng.uniform_below(t)).collect();
        Plaintext::from_vector(ctx, &v)
    };
    let (ct, expected) = match op {
        SimOp::Add(k) => {
            let mut pt = random_pt(rng)?;
            let mut ct = ctx.encrypt(&pk, &pt, rng)?;
            for _ in 0..k {
                let p = random_pt(rng)?;
                ct = ctx.eval_add(&ct, &ctx.encrypt(&pk, &p, rng)?)?;
                pt.msg = ctx.plaintext_ring().add(&pt.msg, &p.msg)?;
            }
            (ct, ctx.scaled_message(&pt, 0)?)
        }
        SimOp::Mul(k) => {
            let rlk = ctx.relin_keygen(&sk, rng)?;
            let ring = ctx.base_ring();
            let pt = random_pt(rng)?;
            let mut ct = ctx.encrypt(&pk, &pt, rng)?;
            // The literal product carries Δ^{k+1}·Π v in c2 when the randomness vanishes.
            let mut expected = ctx.scaled_message(&pt, 0)?;
            for _ in 0..k {
                let p = random_pt(rng)?;
                let prod = ctx.eval_mul_literal(&ct, &ctx.encrypt(&pk, &p, rng)?)?;
                ct = ctx.relinearize(&rlk, &prod)?;
                expected = ring.mul(&expected, &ctx.scaled_message(&p, 0)?)?;
            }
            (ct, expected)
        }
    };
    let ring = ctx.base_ring();
    let terms = ring.sub(&ctx.decrypt_raw(&sk, &ct)?, &expected)?.centered();
    let half_delta = ctx.delta(0)? as f64 / 2.0;
    let within_budget = terms
        .iter()
        .flatten()
        .all(|&x| (x.unsigned_abs() as f64) < half_delta);
    Ok(Trial {
        terms,
        predicted: ct.noise.var,
        within_budget,
    })
}

/// Runs `trials` independent trials (fresh keys and randomness each, derived from
/// `rng` by index) and compares measured noise variance with the model.
pub fn simulate(ctx: &Context, op: SimOp, trials: usize, rng: &Sampler) -> Result<NoiseReport> {
    if trials < 2 {
        return Err(Error::Domain("need at least two trials".into()));
    }
    let results: Vec<Trial> = (0..trials as u64)
        .into_par_iter()
        .map(|i| run_trial(ctx, op, &mut rng.child(i)))
        .collect::<Result<_>>()?;
    let n = ctx.params().ring.n;
    let predicted = results[0].predicted.clone();
    let measured = (0..n)
        .map(|i| {
            let (sum_sq, count) = results
                .iter()
                .flat_map(|r| &r.terms[i])
                .fold((0.0, 0usize), |(s, c), &x| (s + (x as f64).powi(2), c + 1));
            sum_sq / count as f64
        })
        .collect();
    let per_coord: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            results
                .iter()
                .flat_map(|r| r.terms[i].iter().map(|&x| x as f64))
                .collect()
        })
        .collect();
    let within = results.iter().filter(|r| r.within_budget).count();
    Ok(NoiseReport {
        op,
        trials,
        predicted,
        measured,
        max_cross_correlation: max_abs_correlation(&per_coord),
        within_budget: within as f64 / trials as f64,
    })
}

/// Pearson correlation of two equally long samples.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Largest `|ρ|` over all pairs of series.
pub fn max_abs_correlation(series: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..series.len() {
        for j in i + 1..series.len() {
            worst = worst.max(correlation(&series[i], &series[j]).abs());
        }
    }
    worst
}
