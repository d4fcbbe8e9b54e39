//! Arithmetic in `R_q = ⊕_{i=1}^{n} Z_q[x_i]/<f_i(x_i)>`.
//!
//! Elements are tuples of coordinate polynomials and every operation acts on each
//! coordinate independently; there are no cross-coordinate terms. Coordinates whose
//! defining polynomial is `x^d + 1` with an NTT-friendly prime modulus multiply through
//! the negacyclic transform, everything else falls back to schoolbook multiplication
//! followed by long division.

pub mod ntt;
mod params;

use std::sync::{Arc, OnceLock};

use crate::arith;
use crate::error::shape_err;
use crate::{Error, Result};

pub use ntt::{NttPlan, WideNegacyclic};
pub use params::{DefiningPoly, VarietyParams};

/// Residue of one coordinate, `d_i` coefficients in `[0, q)`, low degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoordPoly {
    coeffs: Vec<u64>,
}

impl CoordPoly {
    pub fn new(coeffs: Vec<u64>) -> Self {
        Self { coeffs }
    }

    pub fn zero(degree: usize) -> Self {
        Self {
            coeffs: vec![0; degree],
        }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn centered(&self, q: u64) -> Vec<i64> {
        self.coeffs.iter().map(|&c| arith::centered(c, q)).collect()
    }
}

/// One element of `R_q`: `n` coordinate polynomials under a common modulus `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElem {
    q: u64,
    coords: Vec<CoordPoly>,
}

impl RingElem {
    /// Caller guarantees every coefficient is below `q`.
    pub(crate) fn from_raw(q: u64, coords: Vec<CoordPoly>) -> Self {
        Self { q, coords }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[CoordPoly] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &CoordPoly {
        &self.coords[i]
    }

    pub fn into_coords(self) -> Vec<CoordPoly> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(CoordPoly::is_zero)
    }

    /// Centered representatives, one vector per coordinate.
    pub fn centered(&self) -> Vec<Vec<i64>> {
        self.coords.iter().map(|c| c.centered(self.q)).collect()
    }

    /// Largest centered coefficient magnitude in each coordinate.
    pub fn coord_inf_norms(&self) -> Vec<u64> {
        self.coords
            .iter()
            .map(|c| {
                c.coeffs
                    .iter()
                    .map(|&x| arith::centered(x, self.q).unsigned_abs())
                    .max()
                    .unwrap_or(0)
            })
            .collect()
    }
}

#[derive(Debug)]
enum Kernel {
    Ntt(Arc<NttPlan>),
    Schoolbook(DefiningPoly),
}

/// Ring context: defining polynomials, modulus and precomputed transform tables.
///
/// Immutable after construction and cheap to share behind an [`Arc`].
#[derive(Debug)]
pub struct Ring {
    f: Vec<DefiningPoly>,
    q: u64,
    kernels: Vec<Kernel>,
    wide: OnceLock<Option<Arc<WideNegacyclic>>>,
}

impl Ring {
    pub fn new(params: &VarietyParams) -> Result<Self> {
        params.validate()?;
        Self::from_parts(params.f.clone(), params.q)
    }

    /// Builds a ring from defining polynomials and a modulus without the scheme-level
    /// checks on `t` and `sigma`; used for plaintext rings and baselines.
    pub fn from_parts(f: Vec<DefiningPoly>, q: u64) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::InvalidParams("ring needs at least one coordinate".into()));
        }
        if q < 2 || q >= 1 << arith::MAX_MODULUS_BITS {
            return Err(Error::InvalidParams(format!("modulus {q} out of range")));
        }
        let mut plans: Vec<Arc<NttPlan>> = Vec::new();
        let mut kernels = Vec::with_capacity(f.len());
        for poly in &f {
            let kernel = match poly.negacyclic_degree() {
                Some(d) => match plans.iter().find(|p| p.degree() == d) {
                    Some(plan) => Kernel::Ntt(plan.clone()),
                    None => match NttPlan::new(d, q) {
                        Ok(plan) => {
                            let plan = Arc::new(plan);
                            plans.push(plan.clone());
                            Kernel::Ntt(plan)
                        }
                        Err(_) => Kernel::Schoolbook(poly.clone()),
                    },
                },
                None => Kernel::Schoolbook(poly.clone()),
            };
            kernels.push(kernel);
        }
        Ok(Self {
            f,
            q,
            kernels,
            wide: OnceLock::new(),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.f.len()
    }

    pub fn degree(&self, coord: usize) -> usize {
        self.f[coord].degree()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.f.iter().map(DefiningPoly::degree).collect()
    }

    pub fn defining_polys(&self) -> &[DefiningPoly] {
        &self.f
    }

    /// True when every coordinate multiplies through the transform.
    pub fn uses_ntt(&self) -> bool {
        self.kernels.iter().all(|k| matches!(k, Kernel::Ntt(_)))
    }

    pub fn zero(&self) -> RingElem {
        RingElem {
            q: self.q,
            coords: self.f.iter().map(|f| CoordPoly::zero(f.degree())).collect(),
        }
    }

    /// The multiplicative identity, constant 1 in every coordinate.
    pub fn one(&self) -> RingElem {
        self.constant(&vec![1; self.n()])
            .expect("one value per coordinate")
    }

    /// Element whose coordinate `i` is the constant polynomial `values[i] mod q`.
    pub fn constant(&self, values: &[u64]) -> Result<RingElem> {
        if values.len() != self.n() {
            return Err(shape_err!(
                "expected {} coordinate values, got {}",
                self.n(),
                values.len()
            ));
        }
        let mut e = self.zero();
        for (c, &v) in e.coords.iter_mut().zip(values) {
            c.coeffs[0] = v % self.q;
        }
        Ok(e)
    }

    /// Validates shape and reduction of raw coefficients.
    pub fn from_coeffs(&self, coords: Vec<Vec<u64>>) -> Result<RingElem> {
        let e = RingElem {
            q: self.q,
            coords: coords.into_iter().map(CoordPoly::new).collect(),
        };
        self.check(&e)?;
        if let Some(bad) = e.coords.iter().flat_map(|c| &c.coeffs).find(|&&c| c >= self.q) {
            return Err(shape_err!("coefficient {bad} not reduced mod {}", self.q));
        }
        Ok(e)
    }

    /// Reduces signed coefficients into the ring.
    pub fn from_signed(&self, coords: &[Vec<i64>]) -> Result<RingElem> {
        let coords = coords
            .iter()
            .map(|c| c.iter().map(|&x| arith::reduce_i64(x, self.q)).collect())
            .collect();
        self.from_coeffs(coords)
    }

    /// Re-reduces the centered representatives of `e` (from any modulus) into this ring.
    pub fn lift_centered(&self, e: &RingElem) -> Result<RingElem> {
        self.from_signed(&e.centered())
    }

    /// Checks that `e` has this ring's modulus, coordinate count and degrees.
    pub fn check(&self, e: &RingElem) -> Result<()> {
        if e.q != self.q {
            return Err(shape_err!("element modulus {} != ring modulus {}", e.q, self.q));
        }
        if e.coords.len() != self.n() {
            return Err(shape_err!(
                "element has {} coordinates, ring has {}",
                e.coords.len(),
                self.n()
            ));
        }
        for (i, (c, f)) in e.coords.iter().zip(&self.f).enumerate() {
            if c.len() != f.degree() {
                return Err(shape_err!(
                    "coordinate {i} has {} coefficients, expected {}",
                    c.len(),
                    f.degree()
                ));
            }
        }
        Ok(())
    }

    fn zip_with(
        &self,
        a: &RingElem,
        b: &RingElem,
        op: impl Fn(u64, u64, u64) -> u64,
    ) -> Result<RingElem> {
        self.check(a)?;
        self.check(b)?;
        let q = self.q;
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(x, y)| {
                CoordPoly::new(
                    x.coeffs
                        .iter()
                        .zip(&y.coeffs)
                        .map(|(&u, &v)| op(u, v, q))
                        .collect(),
                )
            })
            .collect();
        Ok(RingElem { q, coords })
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> Result<RingElem> {
        self.zip_with(a, b, arith::add_mod)
    }

    pub fn sub(&self, a: &RingElem, b: &RingElem) -> Result<RingElem> {
        self.zip_with(a, b, arith::sub_mod)
    }

    pub fn neg(&self, a: &RingElem) -> Result<RingElem> {
        self.check(a)?;
        let q = self.q;
        Ok(RingElem {
            q,
            coords: a
                .coords
                .iter()
                .map(|c| CoordPoly::new(c.coeffs.iter().map(|&x| arith::neg_mod(x, q)).collect()))
                .collect(),
        })
    }

    pub fn scalar_mul(&self, a: &RingElem, k: u64) -> Result<RingElem> {
        self.check(a)?;
        let q = self.q;
        let k = k % q;
        Ok(RingElem {
            q,
            coords: a
                .coords
                .iter()
                .map(|c| CoordPoly::new(c.coeffs.iter().map(|&x| arith::mul_mod(x, k, q)).collect()))
                .collect(),
        })
    }

    /// Coordinate-wise product.
    pub fn mul(&self, a: &RingElem, b: &RingElem) -> Result<RingElem> {
        self.check(a)?;
        self.check(b)?;
        let coords = (0..self.n())
            .map(|i| self.coord_mul(i, &a.coords[i], &b.coords[i]))
            .collect();
        Ok(RingElem { q: self.q, coords })
    }

    /// Product in the single coordinate ring `i`.
    pub fn coord_mul(&self, i: usize, a: &CoordPoly, b: &CoordPoly) -> CoordPoly {
        match &self.kernels[i] {
            Kernel::Ntt(plan) => CoordPoly::new(plan.multiply(&a.coeffs, &b.coeffs)),
            Kernel::Schoolbook(f) => schoolbook(&a.coeffs, &b.coeffs, f, self.q),
        }
    }

    /// `Σ_k a[k]·b[k]`.
    pub fn inner_product(&self, a: &[RingElem], b: &[RingElem]) -> Result<RingElem> {
        if a.len() != b.len() {
            return Err(shape_err!("inner product of lengths {} and {}", a.len(), b.len()));
        }
        let mut acc = self.zero();
        for (x, y) in a.iter().zip(b) {
            acc = self.add(&acc, &self.mul(x, y)?)?;
        }
        Ok(acc)
    }

    /// Splits `e` into its coordinate-ring components.
    pub fn decompose(&self, e: &RingElem) -> Result<Vec<CoordPoly>> {
        self.check(e)?;
        Ok(e.coords.clone())
    }

    pub fn recompose(&self, parts: Vec<CoordPoly>) -> Result<RingElem> {
        if parts.len() != self.n() {
            return Err(shape_err!(
                "recompose expects {} parts, got {}",
                self.n(),
                parts.len()
            ));
        }
        self.from_coeffs(parts.into_iter().map(|c| c.coeffs).collect())
    }

    /// Exact integer negacyclic multiplier shared by every coordinate, available when all
    /// coordinates are `x^d + 1` with one power-of-two `d`.
    pub fn wide_multiplier(&self) -> Result<Arc<WideNegacyclic>> {
        self.wide
            .get_or_init(|| {
                let d = self.f[0].negacyclic_degree()?;
                if !self.f.iter().all(|f| f.negacyclic_degree() == Some(d)) {
                    return None;
                }
                WideNegacyclic::new(d).ok().map(Arc::new)
            })
            .clone()
            .ok_or_else(|| {
                Error::Capability(
                    "exact integer products need x^d + 1 in every coordinate with d a power of two up to 2^16"
                        .into(),
                )
            })
    }
}

fn schoolbook(a: &[u64], b: &[u64], f: &DefiningPoly, q: u64) -> CoordPoly {
    let d = f.degree();
    if a.iter().all(|&x| x == 0) || b.iter().all(|&x| x == 0) {
        return CoordPoly::zero(d);
    }
    let mut prod = vec![0u64; 2 * d - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = arith::add_mod(prod[i + j], arith::mul_mod(x, y, q), q);
        }
    }
    let fr = f.reduced(q);
    // x^d ≡ -(f_0 + f_1 x + ... + f_{d-1} x^{d-1})
    for k in (d..2 * d - 1).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for (j, &fj) in fr[..d].iter().enumerate() {
            let idx = k - d + j;
            prod[idx] = arith::sub_mod(prod[idx], arith::mul_mod(c, fj, q), q);
        }
    }
    prod.truncate(d);
    CoordPoly::new(prod)
}

fn check_coord(p: &CoordPoly, d: usize, q: u64) -> Result<()> {
    if p.len() != d {
        return Err(shape_err!("coordinate has {} coefficients, expected {d}", p.len()));
    }
    if p.coeffs.iter().any(|&c| c >= q) {
        return Err(shape_err!("coordinate not reduced mod {q}"));
    }
    Ok(())
}

/// Reference coordinate product: full convolution, then long division by `f` mod `q`.
pub fn coord_mul_schoolbook(
    a: &CoordPoly,
    b: &CoordPoly,
    f: &DefiningPoly,
    q: u64,
) -> Result<CoordPoly> {
    check_coord(a, f.degree(), q)?;
    check_coord(b, f.degree(), q)?;
    Ok(schoolbook(&a.coeffs, &b.coeffs, f, q))
}

/// Coordinate product modulo `x^d + 1` through the negacyclic transform, `d = a.len()`.
pub fn coord_mul_ntt(a: &CoordPoly, b: &CoordPoly, q: u64) -> Result<CoordPoly> {
    let plan = NttPlan::new(a.len(), q)?;
    coord_mul_with_plan(a, b, &plan)
}

pub fn coord_mul_with_plan(a: &CoordPoly, b: &CoordPoly, plan: &NttPlan) -> Result<CoordPoly> {
    check_coord(a, plan.degree(), plan.modulus())?;
    check_coord(b, plan.degree(), plan.modulus())?;
    Ok(CoordPoly::new(plan.multiply(&a.coeffs, &b.coeffs)))
}

/// Maps every coefficient `c` to `round(c · q_to / q_from) mod q_to` using the centered
/// representative of `c`.
pub fn scale_round(e: &RingElem, q_to: u64) -> Result<RingElem> {
    let q_from = e.q;
    if q_to >= q_from {
        return Err(Error::Domain(format!(
            "target modulus {q_to} must be smaller than {q_from}"
        )));
    }
    if q_to < 2 {
        return Err(Error::Domain(format!("target modulus {q_to} too small")));
    }
    let coords = e
        .coords
        .iter()
        .map(|c| {
            CoordPoly::new(
                c.coeffs
                    .iter()
                    .map(|&x| {
                        let v = arith::centered(x, q_from) as i128 * q_to as i128;
                        arith::reduce_i128(arith::div_round(v, q_from as i128), q_to)
                    })
                    .collect(),
            )
        })
        .collect();
    Ok(RingElem { q: q_to, coords })
}
