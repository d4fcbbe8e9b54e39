//! Attack-cost formulas and parameter recommendation.
//!
//! Every formula is an asymptotic shape with an explicit constant `C` (default 1). The
//! reported `log2_cost` is therefore a shape estimate in bits of work, not a concrete
//! security level.

pub mod toy;

use std::collections::BTreeMap;
use std::fmt;

use crate::arith;
use crate::bfv::DEFAULT_BASE_LOG;
use crate::noise;
use crate::ring::VarietyParams;
use crate::scheme::SchemeParams;
use crate::{Error, Result};

pub use toy::{toy_distinguisher, toy_key_recovery, DistinguisherConfig, SecretCandidate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Attack {
    Bkz,
    Dual,
    GrobnerStep,
    GrobnerVariety,
    QuantumSieve,
    HybridQuantum,
    Qbdd,
    VarietyLwe,
}

impl Attack {
    pub const ALL: [Attack; 8] = [
        Attack::Bkz,
        Attack::Dual,
        Attack::GrobnerStep,
        Attack::GrobnerVariety,
        Attack::QuantumSieve,
        Attack::HybridQuantum,
        Attack::Qbdd,
        Attack::VarietyLwe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Attack::Bkz => "bkz",
            Attack::Dual => "dual",
            Attack::GrobnerStep => "grobner-step",
            Attack::GrobnerVariety => "grobner-variety",
            Attack::QuantumSieve => "qsieve",
            Attack::HybridQuantum => "hybridq",
            Attack::Qbdd => "qbdd",
            Attack::VarietyLwe => "variety",
        }
    }

    /// Resolves a CLI selector; `grobner` covers both Gröbner formulas, `all` every attack.
    pub fn select(name: &str) -> Result<Vec<Attack>> {
        match name {
            "all" => Ok(Self::ALL.to_vec()),
            "grobner" => Ok(vec![Attack::GrobnerStep, Attack::GrobnerVariety]),
            other => Self::ALL
                .into_iter()
                .find(|a| a.name() == other)
                .map(|a| vec![a])
                .ok_or_else(|| Error::Parse(format!("unknown attack {other:?}"))),
        }
    }
}

impl fmt::Display for Attack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Constants plugged into the asymptotic formulas.
#[derive(Clone, Debug, PartialEq)]
pub struct CostConstants {
    /// Multiplier on every `O(·)` / `Ω(·)` exponent.
    pub c: f64,
    /// Matrix-multiplication exponent.
    pub omega: f64,
    /// Root exponent in `2^{O(n^{1/c})}·2^{O(d^{1/c})}`.
    pub root: f64,
    /// Exponent cap for the doubly-exponential Gröbner bound, in bits.
    pub cap_bits: f64,
}

impl Default for CostConstants {
    fn default() -> Self {
        Self {
            c: 1.0,
            omega: 2.81,
            root: 2.0,
            cap_bits: 1e6,
        }
    }
}

impl CostConstants {
    /// Applies `key=val,...` overrides; keys are `C`, `omega`, `c` and `cap`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {item:?}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number in {item:?}")))?;
            match key.trim() {
                "C" => self.c = value,
                "omega" => self.omega = value,
                "c" => self.root = value,
                "cap" => self.cap_bits = value,
                other => return Err(Error::Parse(format!("unknown constant {other:?}"))),
            }
        }
        if self.c <= 0.0 || self.omega <= 0.0 || self.root <= 0.0 || self.cap_bits <= 0.0 {
            return Err(Error::Domain("constants must be positive".into()));
        }
        Ok(self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostReport {
    pub attack: Attack,
    /// Bits of work, `log2` of the estimated operation count.
    pub log2_cost: f64,
    pub formula: String,
    pub constants: BTreeMap<String, f64>,
    /// Set when the exponent hit [`CostConstants::cap_bits`].
    pub capped: bool,
}

fn report(attack: Attack, log2_cost: f64, formula: &str, constants: &[(&str, f64)]) -> CostReport {
    CostReport {
        attack,
        log2_cost: log2_cost.max(0.0),
        formula: formula.to_string(),
        constants: constants.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        capped: false,
    }
}

fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg.into()))
    }
}

/// `T_BKZ(n) = 2^{C·n/log2 n}`.
pub fn cost_bkz(n: usize, k: &CostConstants) -> Result<CostReport> {
    require(n >= 2, format!("BKZ cost needs n >= 2, got {n}"))?;
    let n = n as f64;
    Ok(report(Attack::Bkz, k.c * n / n.log2(), "2^(C*n/log2 n)", &[("C", k.c)]))
}

/// `T_dual(n, d) = 2^{C·d}`.
pub fn cost_dual(_n: usize, d: usize, k: &CostConstants) -> Result<CostReport> {
    require(d >= 1, "dual cost needs d >= 1")?;
    Ok(report(Attack::Dual, k.c * d as f64, "2^(C*d)", &[("C", k.c)]))
}

/// One Gröbner linear-algebra step, `(n·d)^ω`.
pub fn cost_grobner_step(n: usize, d: usize, k: &CostConstants) -> Result<CostReport> {
    require(n >= 1 && d >= 1, "Gröbner step cost needs n, d >= 1")?;
    Ok(report(
        Attack::GrobnerStep,
        k.omega * ((n * d) as f64).log2(),
        "(n*d)^omega",
        &[("omega", k.omega)],
    ))
}

/// `T_Gröbner(n, d) = 2^{C·d^{2^n}}`, exponent capped at `cap_bits`.
pub fn cost_grobner_variety(n: usize, d: usize, k: &CostConstants) -> Result<CostReport> {
    require(n >= 1 && d >= 1, "Gröbner variety cost needs n, d >= 1")?;
    // log2(C·d^{2^n}) computed without forming d^{2^n}
    let log2_exponent = k.c.log2() + 2f64.powi(n.min(1000) as i32) * (d as f64).log2();
    let mut r = report(
        Attack::GrobnerVariety,
        0.0,
        "2^(C*d^(2^n))",
        &[("C", k.c), ("cap", k.cap_bits)],
    );
    if log2_exponent >= k.cap_bits.log2() {
        r.log2_cost = k.cap_bits;
        r.capped = true;
    } else {
        r.log2_cost = 2f64.powf(log2_exponent);
    }
    Ok(r)
}

/// `T_SVP-Q(n) = 2^{C·n/2}`.
pub fn cost_quantum_sieve(n: usize, k: &CostConstants) -> Result<CostReport> {
    require(n >= 1, "quantum sieve cost needs n >= 1")?;
    Ok(report(Attack::QuantumSieve, k.c * n as f64 / 2.0, "2^(C*n/2)", &[("C", k.c)]))
}

/// `T_hybrid-Q(n, d) = n·d·2^{C·d/2}`.
pub fn cost_hybrid_quantum(n: usize, d: usize, k: &CostConstants) -> Result<CostReport> {
    require(n >= 1 && d >= 1, "hybrid quantum cost needs n, d >= 1")?;
    Ok(report(
        Attack::HybridQuantum,
        ((n * d) as f64).log2() + k.c * d as f64 / 2.0,
        "n*d*2^(C*d/2)",
        &[("C", k.c)],
    ))
}

/// `T_qBDD(n, d) = 2^{C·n^{1/c}}·2^{C·d^{1/c}}`.
pub fn cost_qbdd(n: usize, d: usize, c: f64, k: &CostConstants) -> Result<CostReport> {
    require(n >= 1 && d >= 1, "qBDD cost needs n, d >= 1")?;
    require(c > 0.0, "qBDD root exponent must be positive")?;
    Ok(report(
        Attack::Qbdd,
        k.c * ((n as f64).powf(1.0 / c) + (d as f64).powf(1.0 / c)),
        "2^(C*n^(1/c)) * 2^(C*d^(1/c))",
        &[("C", k.c), ("c", c)],
    ))
}

/// `T_Variety-LWE(n, d) = n·T_Ideal-SVP(d) = n·2^{C·d}`.
pub fn cost_variety_lwe(n: usize, d: usize, k: &CostConstants) -> Result<CostReport> {
    require(n >= 1 && d >= 1, "Variety-LWE cost needs n, d >= 1")?;
    Ok(report(
        Attack::VarietyLwe,
        (n as f64).log2() + k.c * d as f64,
        "n * 2^(C*d)",
        &[("C", k.c)],
    ))
}

pub fn cost(attack: Attack, n: usize, d: usize, k: &CostConstants) -> Result<CostReport> {
    match attack {
        Attack::Bkz => cost_bkz(n, k),
        Attack::Dual => cost_dual(n, d, k),
        Attack::GrobnerStep => cost_grobner_step(n, d, k),
        Attack::GrobnerVariety => cost_grobner_variety(n, d, k),
        Attack::QuantumSieve => cost_quantum_sieve(n, k),
        Attack::HybridQuantum => cost_hybrid_quantum(n, d, k),
        Attack::Qbdd => cost_qbdd(n, d, k.root, k),
        Attack::VarietyLwe => cost_variety_lwe(n, d, k),
    }
}

/// Tab-separated table: attack, log2 cost, formula, constants.
pub fn render_table(reports: &[CostReport]) -> String {
    let mut out = String::from("attack\tlog2_cost\tformula\tconstants\n");
    for r in reports {
        let constants: Vec<String> = r.constants.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!(
            "{}\t{:.4}{}\t{}\t{}\n",
            r.attack,
            r.log2_cost,
            if r.capped { " (capped)" } else { "" },
            r.formula,
            constants.join(",")
        ));
    }
    out
}

/// Defaults used by [`recommend_params`] for everything but `d` and `q`.
pub const RECOMMEND_COORDS: usize = 4;
pub const RECOMMEND_T: u64 = 257;
pub const RECOMMEND_SIGMA: f64 = 3.2;

#[derive(Clone, Debug, PartialEq)]
pub struct Recommendation {
    pub params: SchemeParams,
    /// Human-readable derivation of each choice.
    pub notes: Vec<String>,
}

/// `d = 256` (classical) or `d = 512` (quantum) at 128 bits, scaled linearly with the
/// security level and rounded up to a power of two; `q` is the smallest prime
/// `≡ 1 mod 2d` for which a depth-1 reference product passes the decryption-safety
/// predicate.
pub fn recommend_params(security_bits: u32, quantum: bool) -> Result<Recommendation> {
    recommend_params_for(security_bits, quantum, RECOMMEND_COORDS)
}

pub fn recommend_params_for(security_bits: u32, quantum: bool, n: usize) -> Result<Recommendation> {
    if ![128, 192, 256].contains(&security_bits) {
        return Err(Error::Domain(format!(
            "unsupported security level {security_bits}; choose 128, 192 or 256"
        )));
    }
    let base = if quantum { 512 } else { 256 };
    let d = (base * security_bits as usize / 128).next_power_of_two();
    let (t, sigma) = (RECOMMEND_T, RECOMMEND_SIGMA);
    let two_d = 2 * d as u64;
    let fresh = sigma * sigma;
    let passes = |q: u64| {
        let var = noise::bfv_mul_variance(fresh, fresh, d, t, sigma, q, DEFAULT_BASE_LOG);
        noise::decryption_safe(var, q / t)
    };
    // Within one bit size the key-switching digit count is fixed, so the predicate is
    // monotone in q there: find the first bit size whose top value passes, binary
    // search the threshold inside it, then walk to the next prime.
    let mut found = None;
    for bits in 8..=arith::MAX_MODULUS_BITS {
        let (lo, hi) = (1u64 << (bits - 1), (1u64 << bits) - 1);
        if !passes(hi) {
            continue;
        }
        let (mut lo, mut hi) = (lo, hi);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if passes(mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let q = arith::next_prime_congruent_one(lo - 1, two_d)
            .ok_or_else(|| Error::Capability("prime search ran past 2^62".into()))?;
        found = Some(q);
        break;
    }
    let q = found.ok_or_else(|| {
        Error::Capability(format!("no modulus below 2^62 supports d = {d} at t = {t}"))
    })?;
    let ring = VarietyParams::negacyclic(n, d, q, t, sigma)?;
    let params = SchemeParams::new(ring)?;
    let k = CostConstants::default();
    let notes = vec![
        format!(
            "d = {d}: {} baseline {base} at 128 bits, scaled by {security_bits}/128 and rounded to a power of two",
            if quantum { "quantum" } else { "classical" }
        ),
        format!("q = {q}: smallest prime = 1 mod {two_d} with 6*sqrt(depth-1 product variance) < floor(q/t)/2"),
        format!("t = {t}, sigma = {sigma}, n = {n}"),
        format!(
            "model (paper big-O, C=1): log2 T_Variety-LWE = {:.1}, log2 T_dual = {:.1}",
            cost_variety_lwe(n, d, &k)?.log2_cost,
            cost_dual(n, d, &k)?.log2_cost
        ),
    ];
    Ok(Recommendation { params, notes })
}
