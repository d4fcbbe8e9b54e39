//! Binary container format.
//!
//! A bare ring element is
//!
//! ```text
//! "VLW1" | 0x01 | params digest (32) | n (u64) | { d_i (u64) | d_i × coeff (u64) }*
//! ```
//!
//! Typed containers insert a tag byte after the version and carry a type-specific body
//! in which ring elements are written without their own header. All integers are
//! little-endian; floats are stored as their IEEE-754 bit patterns.

use crate::bfv::{BfvCiphertext, BfvRelinKey};
use crate::noise::NoiseEstimate;
use crate::ring::{CoordPoly, DefiningPoly, RingElem, VarietyParams};
use crate::scheme::{Ciphertext, PublicKey, RelinKey, SchemeParams, SecretKey};
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"VLW1";
pub const VERSION: u8 = 0x01;
/// Upper bound on any length field, guarding allocations on hostile input.
const MAX_LEN: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Tag {
    SecretKey = 0x01,
    PublicKey = 0x02,
    RelinKey = 0x03,
    Ciphertext = 0x04,
    Params = 0x05,
    RefCiphertext = 0x06,
    RefRelinKey = 0x07,
}

impl Tag {
    pub fn from_byte(b: u8) -> Result<Self> {
        Ok(match b {
            0x01 => Tag::SecretKey,
            0x02 => Tag::PublicKey,
            0x03 => Tag::RelinKey,
            0x04 => Tag::Ciphertext,
            0x05 => Tag::Params,
            0x06 => Tag::RefCiphertext,
            0x07 => Tag::RefRelinKey,
            other => return Err(parse(format!("unknown type tag 0x{other:02x}"))),
        })
    }
}

fn parse(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn header(tag: Option<Tag>, digest: &[u8; 32]) -> Self {
        let mut w = Self::default();
        w.buf.extend_from_slice(MAGIC);
        w.buf.push(VERSION);
        if let Some(tag) = tag {
            w.buf.push(tag as u8);
        }
        w.buf.extend_from_slice(digest);
        w
    }

    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }

    fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }

    fn elem(&mut self, e: &RingElem) {
        self.usize(e.n());
        for c in e.coords() {
            self.usize(c.len());
            for &x in c.coeffs() {
                self.u64(x);
            }
        }
    }

    fn elems(&mut self, v: &[RingElem]) {
        self.usize(v.len());
        v.iter().for_each(|e| self.elem(e));
    }

    fn matrix(&mut self, m: &[Vec<RingElem>]) {
        self.usize(m.len());
        m.iter().for_each(|row| self.elems(row));
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    /// Checks magic, version and (for typed containers) the tag; returns the reader and
    /// the stored digest.
    fn open(buf: &'a [u8], tag: Option<Tag>) -> Result<(Self, [u8; 32])> {
        let mut r = Self { buf, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(parse("bad magic bytes"));
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(parse(format!("unsupported version 0x{version:02x}")));
        }
        if let Some(want) = tag {
            let got = Tag::from_byte(r.u8()?)?;
            if got != want {
                return Err(parse(format!("expected {want:?} container, found {got:?}")));
            }
        }
        let digest: [u8; 32] = r.take(32)?.try_into().unwrap();
        Ok((r, digest))
    }

    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(k).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| parse("unexpected end of input"))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len(&mut self) -> Result<usize> {
        let v = self.u64()?;
        if v > MAX_LEN {
            return Err(parse(format!("length {v} too large")));
        }
        Ok(v as usize)
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    fn bool(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            b => Err(parse(format!("bad boolean byte {b}"))),
        }
    }

    /// Element of the ring with the given degrees and modulus.
    fn elem(&mut self, degrees: &[usize], q: u64) -> Result<RingElem> {
        let n = self.len()?;
        if n != degrees.len() {
            return Err(parse(format!("element has {n} coordinates, expected {}", degrees.len())));
        }
        let mut coords = Vec::with_capacity(n);
        for &d in degrees {
            let len = self.len()?;
            if len != d {
                return Err(parse(format!("coordinate of degree {len}, expected {d}")));
            }
            let coeffs = (0..d)
                .map(|_| {
                    let x = self.u64()?;
                    if x >= q {
                        return Err(parse(format!("coefficient {x} not below modulus {q}")));
                    }
                    Ok(x)
                })
                .collect::<Result<Vec<_>>>()?;
            coords.push(CoordPoly::new(coeffs));
        }
        Ok(RingElem::from_raw(q, coords))
    }

    fn elems(&mut self, degrees: &[usize], q: u64) -> Result<Vec<RingElem>> {
        let k = self.len()?;
        (0..k).map(|_| self.elem(degrees, q)).collect()
    }

    fn matrix(&mut self, degrees: &[usize], q: u64) -> Result<Vec<Vec<RingElem>>> {
        let rows = self.len()?;
        (0..rows).map(|_| self.elems(degrees, q)).collect()
    }

    fn finish(self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(parse(format!("{} trailing bytes", self.buf.len() - self.pos)));
        }
        Ok(())
    }
}

fn degrees(params: &VarietyParams) -> Vec<usize> {
    params.f.iter().map(DefiningPoly::degree).collect()
}

fn check_digest(stored: &[u8; 32], params: &VarietyParams) -> Result<()> {
    if *stored != params.digest() {
        return Err(parse("parameter digest does not match"));
    }
    Ok(())
}

fn check_modulus(e: &RingElem, q: u64) -> Result<()> {
    if e.modulus() != q {
        return Err(Error::Shape(format!("element modulus {} differs from {q}", e.modulus())));
    }
    Ok(())
}

/// Bare element; `params.q` must be the element's modulus.
pub fn encode_elem(params: &VarietyParams, e: &RingElem) -> Result<Vec<u8>> {
    check_modulus(e, params.q)?;
    if e.coords().iter().map(CoordPoly::len).ne(degrees(params)) {
        return Err(Error::Shape("element does not match ring degrees".into()));
    }
    let mut w = Writer::header(None, &params.digest());
    w.elem(e);
    Ok(w.buf)
}

pub fn decode_elem(params: &VarietyParams, bytes: &[u8]) -> Result<RingElem> {
    let (mut r, digest) = Reader::open(bytes, None)?;
    check_digest(&digest, params)?;
    let e = r.elem(&degrees(params), params.q)?;
    r.finish()?;
    Ok(e)
}

/// Tag of a typed container, after checking magic and version.
pub fn peek_tag(bytes: &[u8]) -> Result<Tag> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(parse("bad magic bytes"));
    }
    if r.u8()? != VERSION {
        return Err(parse("unsupported version"));
    }
    Tag::from_byte(r.u8()?)
}

/// Key and ciphertext types stored in typed containers bound to a parameter set.
pub trait Container: Sized {
    const TAG: Tag;

    fn encode(&self, params: &SchemeParams) -> Result<Vec<u8>>;
    fn decode(params: &SchemeParams, bytes: &[u8]) -> Result<Self>;
}

fn open<'a>(params: &SchemeParams, bytes: &'a [u8], tag: Tag) -> Result<Reader<'a>> {
    let (r, digest) = Reader::open(bytes, Some(tag))?;
    check_digest(&digest, &params.ring)?;
    Ok(r)
}

impl Container for SecretKey {
    const TAG: Tag = Tag::SecretKey;

    fn encode(&self, params: &SchemeParams) -> Result<Vec<u8>> {
        let mut w = Writer::header(Some(Self::TAG), &params.ring.digest());
        w.elems(&self.s);
        Ok(w.buf)
    }

    fn decode(params: &SchemeParams, bytes: &[u8]) -> Result<Self> {
        let mut r = open(params, bytes, Self::TAG)?;
        let s = r.elems(&degrees(&params.ring), params.ring.q)?;
        r.finish()?;
        Ok(Self { s })
    }
}

impl Container for PublicKey {
    const TAG: Tag = Tag::PublicKey;

    fn encode(&self, params: &SchemeParams) -> Result<Vec<u8>> {
        let mut w = Writer::header(Some(Self::TAG), &params.ring.digest());
        w.matrix(&self.a);
        w.elems(&self.b);
        Ok(w.buf)
    }

    fn decode(params: &SchemeParams, bytes: &[u8]) -> Result<Self> {
        let mut r = open(params, bytes, Self::TAG)?;
        let degs = degrees(&params.ring);
        let a = r.matrix(&degs, params.ring.q)?;
        let b = r.elems(&degs, params.ring.q)?;
        r.finish()?;
        Ok(Self { a, b })
    }
}

impl Container for RelinKey {
    const TAG: Tag = Tag::RelinKey;

    fn encode(&self, params: &SchemeParams) -> Result<Vec<u8>> {
        let mut w = Writer::header(Some(Self::TAG), &params.ring.digest());
        for m in [&self.r1, &self.r2, &self.a_rel, &self.b_rel] {
            w.matrix(m);
        }
        Ok(w.buf)
    }

    fn decode(params: &SchemeParams, bytes: &[u8]) -> Result<Self> {
        let mut r = open(params, bytes, Self::TAG)?;
        let degs = degrees(&params.ring);
        let q = params.ring.q;
        let key = Self {
            r1: r.matrix(&degs, q)?,
            r2: r.matrix(&degs, q)?,
            a_rel: r.matrix(&degs, q)?,
            b_rel: r.matrix(&degs, q)?,
        };
        r.finish()?;
        Ok(key)
    }
}

fn level_modulus(params: &SchemeParams, level: usize) -> Result<u64> {
    params
        .modulus_chain
        .get(level)
        .copied()
        .ok_or_else(|| parse(format!("level {level} is outside the modulus chain")))
}

impl Container for Ciphertext {
    const TAG: Tag = Tag::Ciphertext;

    fn encode(&self, params: &SchemeParams) -> Result<Vec<u8>> {
        let q = level_modulus(params, self.level)?;
        self.c1.iter().chain([&self.c2]).try_for_each(|e| check_modulus(e, q))?;
        let mut w = Writer::header(Some(Self::TAG), &params.ring.digest());
        w.usize(self.level);
        w.u8(u8::from(self.needs_relin));
        w.u64(u64::from(self.noise.depth));
        w.usize(self.noise.var.len());
        self.noise.var.iter().for_each(|&v| w.f64(v));
        w.elems(&self.c1);
        w.elem(&self.c2);
        Ok(w.buf)
    }

    fn decode(params: &SchemeParams, bytes: &[u8]) -> Result<Self> {
        let mut r = open(params, bytes, Self::TAG)?;
        let level = r.len()?;
        let q = level_modulus(params, level)?;
        let needs_relin = r.bool()?;
        let depth = u32::try_from(r.u64()?).map_err(|_| parse("depth out of range"))?;
        let k = r.len()?;
        let var = (0..k).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        let degs = degrees(&params.ring);
        let c1 = r.elems(&degs, q)?;
        let c2 = r.elem(&degs, q)?;
        r.finish()?;
        Ok(Self {
            c1,
            c2,
            noise: NoiseEstimate { var, depth },
            level,
            needs_relin,
        })
    }
}

impl Container for BfvCiphertext {
    const TAG: Tag = Tag::RefCiphertext;

    fn encode(&self, params: &SchemeParams) -> Result<Vec<u8>> {
        let mut w = Writer::header(Some(Self::TAG), &params.ring.digest());
        w.u64(u64::from(self.depth));
        w.f64(self.noise_var);
        w.elem(&self.c0);
        w.elem(&self.c1);
        Ok(w.buf)
    }

    fn decode(params: &SchemeParams, bytes: &[u8]) -> Result<Self> {
        let mut r = open(params, bytes, Self::TAG)?;
        let depth = u32::try_from(r.u64()?).map_err(|_| parse("depth out of range"))?;
        let noise_var = r.f64()?;
        let degs = degrees(&params.ring);
        let c0 = r.elem(&degs, params.ring.q)?;
        let c1 = r.elem(&degs, params.ring.q)?;
        r.finish()?;
        Ok(Self { c0, c1, depth, noise_var })
    }
}

impl Container for BfvRelinKey {
    const TAG: Tag = Tag::RefRelinKey;

    fn encode(&self, params: &SchemeParams) -> Result<Vec<u8>> {
        let mut w = Writer::header(Some(Self::TAG), &params.ring.digest());
        w.u64(u64::from(self.base_log));
        w.usize(self.parts.len());
        for (k0, k1) in &self.parts {
            w.elem(k0);
            w.elem(k1);
        }
        Ok(w.buf)
    }

    fn decode(params: &SchemeParams, bytes: &[u8]) -> Result<Self> {
        let mut r = open(params, bytes, Self::TAG)?;
        let base_log = r.u64()?;
        if !(1..=32).contains(&base_log) {
            return Err(parse(format!("bad gadget base 2^{base_log}")));
        }
        let k = r.len()?;
        let degs = degrees(&params.ring);
        let q = params.ring.q;
        let parts = (0..k)
            .map(|_| Ok((r.elem(&degs, q)?, r.elem(&degs, q)?)))
            .collect::<Result<Vec<_>>>()?;
        r.finish()?;
        Ok(Self {
            base_log: base_log as u32,
            parts,
        })
    }
}

/// Self-describing parameter container; the stored digest must match the decoded ring.
pub fn encode_params(params: &SchemeParams) -> Vec<u8> {
    let ring = &params.ring;
    let mut w = Writer::header(Some(Tag::Params), &ring.digest());
    w.usize(ring.n);
    for f in &ring.f {
        w.usize(f.coeffs().len());
        f.coeffs().iter().for_each(|&c| w.u64(c as u64));
    }
    w.u64(ring.q);
    w.u64(ring.t);
    w.f64(ring.sigma);
    w.usize(params.n_lwe);
    w.usize(params.m);
    w.usize(params.modulus_chain.len());
    params.modulus_chain.iter().for_each(|&q| w.u64(q));
    w.buf
}

pub fn decode_params(bytes: &[u8]) -> Result<SchemeParams> {
    let (mut r, digest) = Reader::open(bytes, Some(Tag::Params))?;
    let n = r.len()?;
    let f = (0..n)
        .map(|_| {
            let k = r.len()?;
            let coeffs = (0..k).map(|_| Ok(r.u64()? as i64)).collect::<Result<Vec<_>>>()?;
            DefiningPoly::new(coeffs)
        })
        .collect::<Result<Vec<_>>>()?;
    let q = r.u64()?;
    let t = r.u64()?;
    let sigma = r.f64()?;
    let n_lwe = r.len()?;
    let m = r.len()?;
    let levels = r.len()?;
    let chain = (0..levels).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
    r.finish()?;
    let ring = VarietyParams::new(f, q, t, sigma)?;
    check_digest(&digest, &ring)?;
    SchemeParams::new(ring)?.with_shape(n_lwe, m)?.with_chain(chain)
}
