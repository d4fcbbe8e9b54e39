use sha2::{Digest, Sha256};

use crate::arith;
use crate::{Error, Result};

/// Monic univariate defining polynomial `f_i(x_i)`, coefficients low to high.
///
/// Coefficients are kept as signed integers so the same polynomial can be reduced
/// under every modulus of a modulus chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefiningPoly {
    coeffs: Vec<i64>,
}

impl DefiningPoly {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        match coeffs.last() {
            Some(1) if coeffs.len() >= 2 => Ok(Self { coeffs }),
            Some(_) if coeffs.len() >= 2 => Err(Error::InvalidParams(
                "defining polynomial must be monic".into(),
            )),
            _ => Err(Error::InvalidParams(
                "defining polynomial must have degree at least 1".into(),
            )),
        }
    }

    /// `x^d + 1`.
    pub fn negacyclic(degree: usize) -> Self {
        let mut coeffs = vec![0; degree + 1];
        coeffs[0] = 1;
        coeffs[degree] = 1;
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Returns `d` if this polynomial is `x^d + 1`.
    pub fn negacyclic_degree(&self) -> Option<usize> {
        let d = self.degree();
        let inner_zero = self.coeffs[1..d].iter().all(|&c| c == 0);
        (self.coeffs[0] == 1 && inner_zero).then_some(d)
    }

    pub fn reduced(&self, q: u64) -> Vec<u64> {
        self.coeffs.iter().map(|&c| arith::reduce_i64(c, q)).collect()
    }

    /// `|f'(x)|` evaluated over the integers with the centered coefficients of `f mod q`.
    pub fn derivative_abs_at(&self, x: i64, q: u64) -> f64 {
        let coeffs = self.reduced(q);
        let x = x as f64;
        let mut acc = 0.0;
        for (k, &c) in coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * x + k as f64 * arith::centered(c, q) as f64;
        }
        acc.abs()
    }
}

/// Description of `R_q = ⊕_i Z_q[x_i]/<f_i(x_i)>` plus the plaintext modulus and error width.
#[derive(Clone, Debug, PartialEq)]
pub struct VarietyParams {
    pub n: usize,
    pub f: Vec<DefiningPoly>,
    pub q: u64,
    pub t: u64,
    pub sigma: f64,
}

impl VarietyParams {
    /// `n` coordinates, each over `x^d + 1`.
    pub fn negacyclic(n: usize, d: usize, q: u64, t: u64, sigma: f64) -> Result<Self> {
        let params = Self {
            n,
            f: vec![DefiningPoly::negacyclic(d); n],
            q,
            t,
            sigma,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn new(f: Vec<DefiningPoly>, q: u64, t: u64, sigma: f64) -> Result<Self> {
        let params = Self {
            n: f.len(),
            f,
            q,
            t,
            sigma,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n == 0 {
            return bad("coordinate count n must be positive".into());
        }
        if self.f.len() != self.n {
            return bad(format!(
                "expected {} defining polynomials, got {}",
                self.n,
                self.f.len()
            ));
        }
        if self.q < 3 || self.q >= 1 << arith::MAX_MODULUS_BITS {
            return bad(format!("modulus q = {} must lie in [3, 2^62)", self.q));
        }
        if !arith::is_prime_power(self.q) {
            return bad(format!("modulus q = {} must be a prime power", self.q));
        }
        if self.t < 2 || self.t >= self.q {
            return bad(format!("plaintext modulus t = {} must satisfy 1 < t < q", self.t));
        }
        if self.q / self.t < 2 {
            return bad(format!("scale floor(q/t) = {} must be at least 2", self.q / self.t));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma = {} must be positive", self.sigma));
        }
        Ok(())
    }

    /// `floor(q / t)`.
    pub fn delta(&self) -> u64 {
        self.q / self.t
    }

    pub fn degree(&self, coord: usize) -> usize {
        self.f[coord].degree()
    }

    pub fn max_degree(&self) -> usize {
        self.f.iter().map(DefiningPoly::degree).max().unwrap_or(0)
    }

    /// Common degree when all coordinates share one, which is the default layout.
    pub fn uniform_degree(&self) -> Option<usize> {
        let d = self.f[0].degree();
        self.f.iter().all(|f| f.degree() == d).then_some(d)
    }

    /// Same ring under a different ciphertext modulus.
    pub fn with_modulus(&self, q: u64) -> Result<Self> {
        let params = Self {
            q,
            ..self.clone()
        };
        params.validate()?;
        Ok(params)
    }

    /// Whether every coordinate admits the negacyclic transform.
    pub fn ntt_friendly(&self) -> bool {
        arith::is_prime(self.q)
            && self.f.iter().all(|f| match f.negacyclic_degree() {
                Some(d) => d.is_power_of_two() && (self.q - 1) % (2 * d as u64) == 0,
                None => false,
            })
    }

    /// `n`, `q`, `t`, then every `f_i` coefficient reduced mod `q`, all as LE u64.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        out.extend_from_slice(&self.q.to_le_bytes());
        out.extend_from_slice(&self.t.to_le_bytes());
        for f in &self.f {
            for c in f.reduced(self.q) {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
        out
    }

    /// SHA-256 of [`Self::canonical_bytes`].
    pub fn digest(&self) -> [u8; 32] {
        Sha256::digest(self.canonical_bytes()).into()
    }
}
