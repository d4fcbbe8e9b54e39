//! Timing and error-growth comparison between the vector ring and a single ring.
//!
//! All three timed paths share one prime modulus and the same NTT kernels, so time
//! differences reflect only ring structure:
//!
//! - `vlwe`: one coordinate-wise product in `⊕_{i<n} Z_q[x]/(x^d + 1)`;
//! - `rlwe-split`: `n` independent products in `Z_q[x]/(x^d + 1)`;
//! - `rlwe-full`: one product in `Z_q[x]/(x^{n·d} + 1)`.

use std::hint::black_box;
use std::time::{Duration, Instant};

use crate::arith;
use crate::bfv::{self, BfvParams, DEFAULT_BASE_LOG};
use crate::ring::{DefiningPoly, Ring, RingElem};
use crate::sampling::{sample_uniform_elem, DiscreteGaussian, Sampler};
use crate::{Error, Result};

pub const MIN_REPS: usize = 5;
/// Wall time targeted by one calibrated repetition.
const REP_TARGET: Duration = Duration::from_millis(2);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Series {
    Vlwe,
    RlweSplit,
    RlweFull,
}

impl Series {
    pub fn name(self) -> &'static str {
        match self {
            Series::Vlwe => "vlwe",
            Series::RlweSplit => "rlwe-split",
            Series::RlweFull => "rlwe-full",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub series: Series,
    pub n: usize,
    pub d: usize,
    pub median_ns: f64,
}

impl BenchRow {
    pub fn config(&self) -> String {
        match self.series {
            Series::RlweFull => format!("{} N={}", self.series.name(), self.n * self.d),
            s => format!("{} n={} d={}", s.name(), self.n, self.d),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub d: usize,
    pub reps: usize,
    pub modulus: u64,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn series(&self, s: Series) -> impl Iterator<Item = &BenchRow> {
        self.rows.iter().filter(move |r| r.series == s)
    }

    /// Least-squares slope of `log time` against `log n`; `None` with fewer than two
    /// distinct `n`.
    pub fn exponent(&self, s: Series) -> Option<f64> {
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .series(s)
            .map(|r| ((r.n as f64).ln(), r.median_ns.ln()))
            .unzip();
        fit_slope(&x, &y)
    }

    pub fn median(&self, s: Series, n: usize) -> Option<f64> {
        self.series(s).find(|r| r.n == n).map(|r| r.median_ns)
    }

    /// Columns: config, median ns, exponent of the row's series.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("config\tmedian_ns\texponent\n");
        for row in &self.rows {
            let exp = self
                .exponent(row.series)
                .map_or_else(|| "-".to_string(), |e| format!("{e:.4}"));
            out.push_str(&format!("{}\t{:.1}\t{}\n", row.config(), row.median_ns, exp));
        }
        out
    }
}

pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if x.len() < 2 || sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / sxx)
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        (values[k / 2 - 1] + values[k / 2]) / 2.0
    }
}

/// Median per-call time of `op` over `reps` calibrated repetitions.
fn time_op(reps: usize, mut op: impl FnMut()) -> f64 {
    op();
    let start = Instant::now();
    op();
    let single = start.elapsed().max(Duration::from_nanos(1));
    let iters = (REP_TARGET.as_nanos() / single.as_nanos()).clamp(1, 1 << 20) as u32;
    let mut samples: Vec<f64> = (0..reps)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..iters {
                op();
            }
            start.elapsed().as_nanos() as f64 / iters as f64
        })
        .collect();
    median(&mut samples)
}

/// Smallest prime above `2^30` supporting degree-`max_n·d` negacyclic NTTs.
pub fn shared_modulus(max_n: usize, d: usize) -> Result<u64> {
    let step = 2 * (max_n * d) as u64;
    arith::next_prime_congruent_one(1 << 30, step)
        .ok_or_else(|| Error::Capability(format!("no NTT prime for degree {}", max_n * d)))
}

fn check_inputs(n_list: &[usize], d: usize) -> Result<()> {
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(Error::Domain("n list must be non-empty and positive".into()));
    }
    if !d.is_power_of_two() {
        return Err(Error::Domain(format!("d = {d} must be a power of two")));
    }
    if n_list.iter().any(|n| !n.is_power_of_two()) {
        return Err(Error::Domain("every n must be a power of two so N = n·d is".into()));
    }
    Ok(())
}

/// Runs on the calling thread only; each series is measured at every `n`.
pub fn bench_compare(n_list: &[usize], d: usize, reps: usize) -> Result<BenchReport> {
    if reps < MIN_REPS {
        return Err(Error::Domain(format!(
            "insufficient samples: need at least {MIN_REPS} reps, got {reps}"
        )));
    }
    check_inputs(n_list, d)?;
    let q = shared_modulus(*n_list.iter().max().unwrap(), d)?;
    let mut rng = Sampler::from_u64(0);
    let single = Ring::from_parts(vec![DefiningPoly::negacyclic(d)], q)?;
    let mut rows = Vec::new();
    for &n in n_list {
        let vector = Ring::from_parts(vec![DefiningPoly::negacyclic(d); n], q)?;
        let full = Ring::from_parts(vec![DefiningPoly::negacyclic(n * d)], q)?;
        debug_assert!(vector.uses_ntt() && single.uses_ntt() && full.uses_ntt());

        let (a, b) = pair(&vector, &mut rng);
        let vlwe = time_op(reps, || {
            black_box(vector.mul(black_box(&a), black_box(&b)).unwrap());
        });

        let pairs: Vec<_> = (0..n).map(|_| pair(&single, &mut rng)).collect();
        let split = time_op(reps, || {
            for (x, y) in &pairs {
                black_box(single.mul(black_box(x), black_box(y)).unwrap());
            }
        });

        let (a, b) = pair(&full, &mut rng);
        let whole = time_op(reps, || {
            black_box(full.mul(black_box(&a), black_box(&b)).unwrap());
        });

        for (series, median_ns) in [(Series::Vlwe, vlwe), (Series::RlweSplit, split), (Series::RlweFull, whole)] {
            rows.push(BenchRow { series, n, d, median_ns });
        }
    }
    rows.sort_by_key(|r| (r.series as u8, r.n));
    Ok(BenchReport { d, reps, modulus: q, rows })
}

fn pair(ring: &Ring, rng: &mut Sampler) -> (RingElem, RingElem) {
    (sample_uniform_elem(ring, rng), sample_uniform_elem(ring, rng))
}

/// Measured depth-1 product noise at one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRow {
    pub n: usize,
    pub d: usize,
    /// Measured phase-error variance of each vector coordinate.
    pub vlwe_coord_var: Vec<f64>,
    /// Measured phase-error variance of the single ring of degree `n·d`.
    pub rlwe_var: f64,
}

impl GrowthRow {
    pub fn vlwe_mean_var(&self) -> f64 {
        self.vlwe_coord_var.iter().sum::<f64>() / self.vlwe_coord_var.len() as f64
    }
}

/// Error growth of one product in the vector ring versus the single ring of equal total
/// dimension; report-only.
pub fn error_growth(
    n_list: &[usize],
    d: usize,
    t: u64,
    sigma: f64,
    trials: usize,
    rng: &mut Sampler,
) -> Result<Vec<GrowthRow>> {
    check_inputs(n_list, d)?;
    if trials == 0 {
        return Err(Error::Domain("error growth needs at least one trial".into()));
    }
    let q = shared_modulus(*n_list.iter().max().unwrap(), d)?;
    let params = BfvParams { t, sigma };
    let dist = DiscreteGaussian::new(sigma)?;
    let mut rows = Vec::new();
    for &n in n_list {
        let vector = Ring::from_parts(vec![DefiningPoly::negacyclic(d); n], q)?;
        let full = Ring::from_parts(vec![DefiningPoly::negacyclic(n * d)], q)?;
        let vec_plain = Ring::from_parts(vec![DefiningPoly::negacyclic(d); n], t)?;
        let full_plain = Ring::from_parts(vec![DefiningPoly::negacyclic(n * d)], t)?;
        let mut vlwe_sums = vec![(0.0, 0usize); n];
        let mut rlwe_sum = (0.0, 0usize);
        for _ in 0..trials {
            for (ring, plain, is_vector) in [(&vector, &vec_plain, true), (&full, &full_plain, false)] {
                let s = bfv::keygen_secret(ring, &dist, rng);
                let rlk = bfv::keygen_relin(ring, &s, DEFAULT_BASE_LOG, &dist, rng)?;
                let u = sample_uniform_elem(plain, rng);
                let v = sample_uniform_elem(plain, rng);
                let cu = bfv::encrypt_sk(ring, params, &s, &u, &dist, rng)?;
                let cv = bfv::encrypt_sk(ring, params, &s, &v, &dist, rng)?;
                let prod = bfv::multiply(ring, params, &rlk, &cu, &cv)?;
                let uv = plain.mul(&u, &v)?;
                let errors = bfv::phase_error(ring, params, &s, &prod, &uv)?;
                for (i, coord) in errors.iter().enumerate() {
                    let sq: f64 = coord.iter().map(|&e| (e as f64).powi(2)).sum();
                    let slot = if is_vector { &mut vlwe_sums[i] } else { &mut rlwe_sum };
                    slot.0 += sq;
                    slot.1 += coord.len();
                }
            }
        }
        rows.push(GrowthRow {
            n,
            d,
            vlwe_coord_var: vlwe_sums.iter().map(|(s, k)| s / *k as f64).collect(),
            rlwe_var: rlwe_sum.0 / rlwe_sum.1 as f64,
        });
    }
    Ok(rows)
}

/// Columns: n, d, mean per-coordinate variance, max/min coordinate ratio, single-ring
/// variance at `N = n·d`.
pub fn growth_tsv(rows: &[GrowthRow]) -> String {
    let mut out = String::from("n\td\tvlwe_coord_var\tvlwe_coord_spread\trlwe_var\n");
    for r in rows {
        let max = r.vlwe_coord_var.iter().cloned().fold(f64::MIN, f64::max);
        let min = r.vlwe_coord_var.iter().cloned().fold(f64::MAX, f64::min);
        out.push_str(&format!(
            "{}\t{}\t{:.4e}\t{:.3}\t{:.4e}\n",
            r.n,
            r.d,
            r.vlwe_mean_var(),
            max / min,
            r.rlwe_var
        ));
    }
    out
}
