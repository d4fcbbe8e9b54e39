use crate::ring::VarietyParams;
use crate::{Error, Result};

/// Ring description plus the LWE shape of the vector scheme.
///
/// `n_lwe` is the length of the secret vector and `m` the number of public samples;
/// both are independent of the ring coordinate count `ring.n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeParams {
    pub ring: VarietyParams,
    pub n_lwe: usize,
    pub m: usize,
    /// Strictly descending moduli, `modulus_chain[0] == ring.q`.
    pub modulus_chain: Vec<u64>,
}

impl SchemeParams {
    /// `n_lwe = 1`, `m = 2`, single-level chain.
    pub fn new(ring: VarietyParams) -> Result<Self> {
        let q = ring.q;
        let p = Self {
            ring,
            n_lwe: 1,
            m: 2,
            modulus_chain: vec![q],
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_chain(mut self, chain: Vec<u64>) -> Result<Self> {
        self.modulus_chain = chain;
        self.validate()?;
        Ok(self)
    }

    pub fn with_shape(mut self, n_lwe: usize, m: usize) -> Result<Self> {
        self.n_lwe = n_lwe;
        self.m = m;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.ring.validate()?;
        if self.n_lwe == 0 {
            return Err(Error::InvalidParams("n_lwe must be positive".into()));
        }
        if self.m < self.n_lwe {
            return Err(Error::InvalidParams(format!(
                "need m >= n_lwe, got m = {} and n_lwe = {}",
                self.m, self.n_lwe
            )));
        }
        match self.modulus_chain.first() {
            Some(&q0) if q0 == self.ring.q => {}
            _ => {
                return Err(Error::InvalidParams(
                    "modulus chain must start with q".into(),
                ))
            }
        }
        if self.modulus_chain.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParams(
                "modulus chain must be strictly descending".into(),
            ));
        }
        for &q in &self.modulus_chain[1..] {
            self.ring.with_modulus(q)?;
        }
        Ok(())
    }

    pub fn levels(&self) -> usize {
        self.modulus_chain.len()
    }

    pub fn ring_at(&self, level: usize) -> Result<VarietyParams> {
        let q = *self
            .modulus_chain
            .get(level)
            .ok_or_else(|| Error::Domain(format!("no modulus level {level}")))?;
        self.ring.with_modulus(q)
    }
}
