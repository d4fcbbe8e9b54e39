//! Negacyclic number-theoretic transform over `Z_q[x]/(x^d + 1)`.
//!
//! Forward transform is Cooley-Tukey with the twisting by a primitive `2d`-th root
//! folded into the twiddles, inverse is Gentleman-Sande. Inputs are in natural order,
//! the evaluation domain is bit-reversed, which is irrelevant for pointwise products.

use crate::arith::{self, ShoupConst};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct NttPlan {
    degree: usize,
    q: u64,
    /// `psi^bitrev(k)` for `k in 0..degree`.
    fwd: Vec<ShoupConst>,
    /// `psi^-bitrev(k)` for `k in 0..degree`.
    inv: Vec<ShoupConst>,
    degree_inv: ShoupConst,
}

fn bit_reverse(mut x: usize, bits: u32) -> usize {
    let mut r = 0;
    for _ in 0..bits {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    r
}

/// Finds a primitive `2d`-th root of unity mod a prime `q`.
fn primitive_root_2d(degree: usize, q: u64) -> Option<u64> {
    let order = 2 * degree as u64;
    if (q - 1) % order != 0 {
        return None;
    }
    let cofactor = (q - 1) / order;
    (2..q.min(1 << 20)).find_map(|g| {
        let psi = arith::pow_mod(g, cofactor, q);
        // psi has order exactly 2d iff psi^d == -1, since 2d is a power of two.
        (arith::pow_mod(psi, degree as u64, q) == q - 1).then_some(psi)
    })
}

impl NttPlan {
    pub fn new(degree: usize, q: u64) -> Result<Self> {
        if degree == 0 || !degree.is_power_of_two() {
            return Err(Error::Capability(format!(
                "negacyclic transform needs a power-of-two degree, got {degree}"
            )));
        }
        if q >= 1 << arith::MAX_MODULUS_BITS || !arith::is_prime(q) {
            return Err(Error::Capability(format!(
                "negacyclic transform needs a prime modulus below 2^62, got {q}"
            )));
        }
        let psi = primitive_root_2d(degree, q).ok_or_else(|| {
            Error::Capability(format!(
                "modulus {q} has no primitive {}-th root of unity",
                2 * degree
            ))
        })?;
        let psi_inv = arith::inv_mod(psi, q).expect("q is prime");
        let bits = degree.trailing_zeros();
        let mut fwd = Vec::with_capacity(degree);
        let mut inv = Vec::with_capacity(degree);
        for k in 0..degree {
            let e = bit_reverse(k, bits) as u64;
            fwd.push(ShoupConst::new(arith::pow_mod(psi, e, q), q));
            inv.push(ShoupConst::new(arith::pow_mod(psi_inv, e, q), q));
        }
        let degree_inv = ShoupConst::new(arith::inv_mod(degree as u64, q).expect("q is prime"), q);
        Ok(Self {
            degree,
            q,
            fwd,
            inv,
            degree_inv,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn forward(&self, a: &mut [u64]) {
        debug_assert_eq!(a.len(), self.degree);
        let q = self.q;
        let n = self.degree;
        let mut t = n;
        let mut m = 1;
        while m < n {
            t /= 2;
            for i in 0..m {
                let j1 = 2 * i * t;
                let s = self.fwd[m + i];
                for j in j1..j1 + t {
                    let u = a[j];
                    let v = s.mul(a[j + t], q);
                    a[j] = arith::add_mod(u, v, q);
                    a[j + t] = arith::sub_mod(u, v, q);
                }
            }
            m *= 2;
        }
    }

    pub fn inverse(&self, a: &mut [u64]) {
        debug_assert_eq!(a.len(), self.degree);
        let q = self.q;
        let mut t = 1;
        let mut m = self.degree;
        while m > 1 {
            let h = m / 2;
            let mut j1 = 0;
            for i in 0..h {
                let s = self.inv[h + i];
                for j in j1..j1 + t {
                    let u = a[j];
                    let v = a[j + t];
                    a[j] = arith::add_mod(u, v, q);
                    a[j + t] = s.mul(arith::sub_mod(u, v, q), q);
                }
                j1 += 2 * t;
            }
            t *= 2;
            m = h;
        }
        for x in a.iter_mut() {
            *x = self.degree_inv.mul(*x, q);
        }
    }

    /// Negacyclic product of two reduced coefficient vectors.
    pub fn multiply(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut fa = a.to_vec();
        let mut fb = b.to_vec();
        self.forward(&mut fa);
        self.forward(&mut fb);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = arith::mul_mod(*x, *y, self.q);
        }
        self.inverse(&mut fa);
        fa
    }
}

/// Two 62-bit primes congruent to 1 mod 2^17; their product bounds exact integer products.
const WIDE_PRIMES: [u64; 2] = [4_611_686_018_425_815_041, 4_611_686_018_423_062_529];

/// Exact integer negacyclic products via two-prime CRT.
///
/// Products of centered coefficients are recovered exactly as long as every output
/// coefficient lies strictly inside `(-P/2, P/2)` with `P` the product of the two primes.
#[derive(Clone, Debug)]
pub struct WideNegacyclic {
    plans: [NttPlan; 2],
    /// `p0^-1 mod p1`.
    p0_inv: u64,
}

impl WideNegacyclic {
    /// Bits available for the magnitude of an output coefficient.
    pub const CAPACITY_BITS: u32 = 122;

    pub fn new(degree: usize) -> Result<Self> {
        let plans = [
            NttPlan::new(degree, WIDE_PRIMES[0])?,
            NttPlan::new(degree, WIDE_PRIMES[1])?,
        ];
        let p0_inv = arith::inv_mod(WIDE_PRIMES[0], WIDE_PRIMES[1]).expect("distinct primes");
        Ok(Self { plans, p0_inv })
    }

    pub fn multiply(&self, a: &[i64], b: &[i64]) -> Vec<i128> {
        let [p0, p1] = WIDE_PRIMES;
        let residues: Vec<Vec<u64>> = self
            .plans
            .iter()
            .map(|plan| {
                let p = plan.modulus();
                let ra: Vec<u64> = a.iter().map(|&x| arith::reduce_i64(x, p)).collect();
                let rb: Vec<u64> = b.iter().map(|&x| arith::reduce_i64(x, p)).collect();
                plan.multiply(&ra, &rb)
            })
            .collect();
        let modulus = p0 as u128 * p1 as u128;
        residues[0]
            .iter()
            .zip(&residues[1])
            .map(|(&r0, &r1)| {
                let k = arith::mul_mod(arith::sub_mod(r1 % p1, r0 % p1, p1), self.p0_inv, p1);
                let x = r0 as u128 + p0 as u128 * k as u128;
                if x > modulus / 2 {
                    -((modulus - x) as i128)
                } else {
                    x as i128
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schoolbook(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let d = a.len();
        let mut out = vec![0u64; d];
        for i in 0..d {
            for j in 0..d {
                let p = arith::mul_mod(a[i], b[j], q);
                let k = i + j;
                if k < d {
                    out[k] = arith::add_mod(out[k], p, q);
                } else {
                    out[k - d] = arith::sub_mod(out[k - d], p, q);
                }
            }
        }
        out
    }

    #[test]
    fn wide_primes_are_ntt_friendly() {
        for p in WIDE_PRIMES {
            assert!(arith::is_prime(p));
            assert_eq!(p % (1 << 17), 1);
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let plan = NttPlan::new(64, 7681).unwrap();
        let a: Vec<u64> = (0..64).map(|i| (i * 97 + 3) % 7681).collect();
        let mut b = a.clone();
        plan.forward(&mut b);
        assert_ne!(a, b);
        plan.inverse(&mut b);
        assert_eq!(a, b);
    }

    #[test]
    fn x_times_x_to_the_d_minus_one_is_minus_one() {
        let q = 7681;
        let plan = NttPlan::new(16, q).unwrap();
        let mut x = vec![0; 16];
        x[1] = 1;
        let mut top = vec![0; 16];
        top[15] = 1;
        let mut expect = vec![0; 16];
        expect[0] = q - 1;
        assert_eq!(plan.multiply(&x, &top), expect);
    }

    #[test]
    fn matches_schoolbook_on_small_cases() {
        for (d, q) in [(2usize, 17u64), (8, 17), (16, 7681), (32, 12289)] {
            let plan = NttPlan::new(d, q).unwrap();
            let a: Vec<u64> = (0..d as u64).map(|i| (i * i + 5) % q).collect();
            let b: Vec<u64> = (0..d as u64).map(|i| (3 * i + 11) % q).collect();
            assert_eq!(plan.multiply(&a, &b), schoolbook(&a, &b, q), "d={d} q={q}");
        }
    }

    #[test]
    fn rejects_unfriendly_moduli() {
        assert!(matches!(NttPlan::new(16, 7681 * 3), Err(Error::Capability(_))));
        // 7681 - 1 = 2^9 * 15, so degree 512 needs a 1024-th root that does not exist.
        assert!(matches!(NttPlan::new(512, 7681), Err(Error::Capability(_))));
        assert!(matches!(NttPlan::new(12, 7681), Err(Error::Capability(_))));
    }

    #[test]
    fn wide_product_is_exact() {
        let d = 8;
        let wide = WideNegacyclic::new(d).unwrap();
        let big = 1i64 << 43;
        let a: Vec<i64> = (0..d as i64).map(|i| big - 7 * i).collect();
        let b: Vec<i64> = (0..d as i64).map(|i| -big + 13 * i * i).collect();
        let mut expect = vec![0i128; d];
        for i in 0..d {
            for j in 0..d {
                let p = a[i] as i128 * b[j] as i128;
                if i + j < d {
                    expect[i + j] += p;
                } else {
                    expect[i + j - d] -= p;
                }
            }
        }
        assert_eq!(wide.multiply(&a, &b), expect);
    }
}
