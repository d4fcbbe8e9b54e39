//! Single-limb modular arithmetic over moduli below 2^62.

/// Largest supported modulus bit length.
pub const MAX_MODULUS_BITS: u32 = 62;

/// Maps `x < 2q` into `[0, q)` without a data-dependent branch.
#[inline]
fn reduce_once(x: u64, q: u64) -> u64 {
    let y = x.wrapping_sub(q);
    y.wrapping_add(q & ((y as i64 >> 63) as u64))
}

#[inline]
pub fn add_mod(a: u64, b: u64, q: u64) -> u64 {
    reduce_once(a + b, q)
}

#[inline]
pub fn sub_mod(a: u64, b: u64, q: u64) -> u64 {
    reduce_once(a + q - b, q)
}

#[inline]
pub fn neg_mod(a: u64, q: u64) -> u64 {
    if a == 0 {
        0
    } else {
        q - a
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Modular inverse via the extended Euclidean algorithm, `None` when `gcd(a, q) != 1`.
pub fn inv_mod(a: u64, q: u64) -> Option<u64> {
    let (mut r0, mut r1) = (q as i128, (a % q) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let quot = r0 / r1;
        (r0, r1) = (r1, r0 - quot * r1);
        (t0, t1) = (t1, t0 - quot * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(q as i128) as u64)
}

/// Reduces a signed integer into `[0, q)`.
#[inline]
pub fn reduce_i64(x: i64, q: u64) -> u64 {
    x.rem_euclid(q as i64) as u64
}

#[inline]
pub fn reduce_i128(x: i128, q: u64) -> u64 {
    x.rem_euclid(q as i128) as u64
}

/// Centered representative in `(-q/2, q/2]`.
#[inline]
pub fn centered(x: u64, q: u64) -> i64 {
    if x > q / 2 {
        x as i64 - q as i64
    } else {
        x as i64
    }
}

/// `round(num / den)` for `den > 0`, halves rounded towards +infinity.
#[inline]
pub fn div_round(num: i128, den: i128) -> i128 {
    (2 * num + den).div_euclid(2 * den)
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Whether `q` is a prime power `p^k` with `k >= 1`.
pub fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if is_prime(q) {
        return true;
    }
    // The smallest prime factor of a prime power must divide it exactly k times.
    let mut p = 2u64;
    while p.saturating_mul(p) <= q {
        if q % p == 0 {
            let mut r = q;
            while r % p == 0 {
                r /= p;
            }
            return r == 1;
        }
        p += if p == 2 { 1 } else { 2 };
        if p > (1 << 21) {
            // q has no factor below 2^21, so any prime power form needs k <= 2.
            let s = (q as f64).sqrt().round() as u64;
            return (s.saturating_sub(1)..=s + 1).any(|c| c * c == q && is_prime(c));
        }
    }
    false
}

/// Smallest prime `q > lower` with `q ≡ 1 (mod modulus_step)`.
pub fn next_prime_congruent_one(lower: u64, modulus_step: u64) -> Option<u64> {
    let mut k = lower / modulus_step + 1;
    loop {
        let cand = k.checked_mul(modulus_step)?.checked_add(1)?;
        if cand >= 1 << MAX_MODULUS_BITS {
            return None;
        }
        if cand > lower && is_prime(cand) {
            return Some(cand);
        }
        k += 1;
    }
}

/// Largest prime `q < upper` with `q ≡ 1 (mod modulus_step)`.
pub fn prev_prime_congruent_one(upper: u64, modulus_step: u64) -> Option<u64> {
    let mut k = (upper - 1) / modulus_step;
    while k > 0 {
        let cand = k * modulus_step + 1;
        if cand < upper && is_prime(cand) {
            return Some(cand);
        }
        k -= 1;
    }
    None
}

/// Precomputed operand for Shoup multiplication by a fixed constant.
#[derive(Clone, Copy, Debug)]
pub struct ShoupConst {
    pub value: u64,
    quotient: u64,
}

impl ShoupConst {
    pub fn new(value: u64, q: u64) -> Self {
        let quotient = (((value as u128) << 64) / q as u128) as u64;
        Self { value, quotient }
    }

    /// `x * value mod q` for `x < q`.
    #[inline]
    pub fn mul(&self, x: u64, q: u64) -> u64 {
        let hi = ((x as u128 * self.quotient as u128) >> 64) as u64;
        let r = x
            .wrapping_mul(self.value)
            .wrapping_sub(hi.wrapping_mul(q));
        reduce_once(r, q)
    }
}
