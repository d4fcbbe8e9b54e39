//! Human-editable parameter files.
//!
//! One `key = value` per line, `#` starts a comment:
//!
//! ```text
//! n = 4
//! d = 16
//! q = 1073707009
//! t = 257
//! sigma = 3.2
//! n_lwe = 1
//! m = 2
//! modulus_chain = 1073707009,1038337
//! ```
//!
//! Coordinates default to `x^d + 1`. An optional `f` line overrides them with explicit
//! monic polynomials, coefficients low to high, one group per coordinate separated by
//! `;` (for example `f = 1,0,1; 2,1,1`); `d` may then be omitted. `n_lwe`, `m` and
//! `modulus_chain` default to `1`, `2` and `q`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::ring::{DefiningPoly, VarietyParams};
use crate::scheme::SchemeParams;
use crate::{Error, Result};

const KEYS: [&str; 9] = ["n", "d", "q", "t", "sigma", "n_lwe", "m", "modulus_chain", "f"];

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| parse_err(format!("{key}: cannot parse {value:?}")))
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|v| number(key, v)).collect()
}

pub fn parse_params(text: &str) -> Result<SchemeParams> {
    let mut fields = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(parse_err(format!("line {}: unknown key {key:?}", lineno + 1)));
        }
        if fields.insert(key, value.trim()).is_some() {
            return Err(parse_err(format!("line {}: duplicate key {key:?}", lineno + 1)));
        }
    }
    let get = |key: &str| fields.get(key).copied();
    let require = |key: &str| get(key).ok_or_else(|| parse_err(format!("missing key {key:?}")));

    let n: usize = number("n", require("n")?)?;
    let q: u64 = number("q", require("q")?)?;
    let t: u64 = number("t", require("t")?)?;
    let sigma: f64 = number("sigma", require("sigma")?)?;
    let d: Option<usize> = get("d").map(|v| number("d", v)).transpose()?;

    let ring = match get("f") {
        Some(spec) => {
            let f = spec
                .split(';')
                .map(|group| DefiningPoly::new(list("f", group)?))
                .collect::<Result<Vec<_>>>()?;
            if f.len() != n {
                return Err(Error::InvalidParams(format!("{} polynomials for n = {n}", f.len())));
            }
            if let Some(d) = d {
                if f.iter().any(|p| p.degree() != d) {
                    return Err(Error::InvalidParams(format!("f does not match d = {d}")));
                }
            }
            VarietyParams::new(f, q, t, sigma)?
        }
        None => {
            let d = d.ok_or_else(|| parse_err("missing key \"d\""))?;
            VarietyParams::negacyclic(n, d, q, t, sigma)?
        }
    };
    let n_lwe = get("n_lwe").map(|v| number("n_lwe", v)).transpose()?.unwrap_or(1);
    let m = get("m").map(|v| number("m", v)).transpose()?.unwrap_or(2);
    let chain = get("modulus_chain")
        .map(|v| list("modulus_chain", v))
        .transpose()?
        .unwrap_or_else(|| vec![q]);
    SchemeParams::new(ring)?.with_shape(n_lwe, m)?.with_chain(chain)
}

pub fn format_params(params: &SchemeParams) -> String {
    let ring = &params.ring;
    let mut out = format!("n = {}\n", ring.n);
    if let Some(d) = ring.uniform_degree() {
        out.push_str(&format!("d = {d}\n"));
    }
    out.push_str(&format!("q = {}\nt = {}\nsigma = {}\n", ring.q, ring.t, ring.sigma));
    out.push_str(&format!("n_lwe = {}\nm = {}\n", params.n_lwe, params.m));
    let chain: Vec<String> = params.modulus_chain.iter().map(u64::to_string).collect();
    out.push_str(&format!("modulus_chain = {}\n", chain.join(",")));
    if ring.f.iter().any(|f| f.negacyclic_degree().is_none()) {
        let groups: Vec<String> = ring
            .f
            .iter()
            .map(|f| f.coeffs().iter().map(i64::to_string).collect::<Vec<_>>().join(","))
            .collect();
        out.push_str(&format!("f = {}\n", groups.join("; ")));
    }
    out
}

pub fn read_params(path: &Path) -> Result<SchemeParams> {
    parse_params(&std::fs::read_to_string(path)?)
}

pub fn write_params(path: &Path, params: &SchemeParams) -> Result<()> {
    Ok(std::fs::write(path, format_params(params))?)
}
