//! Variety-LWE: arithmetic over direct sums of univariate quotient rings
//! `R_q = ⊕_{i=1}^{n} Z_q[x_i]/<f_i(x_i)>`, a vector homomorphic encryption scheme built
//! on it, an analytic noise model, an attack-cost estimator and a single-ring RLWE
//! baseline for comparison.

pub mod arith;
pub mod bench;
pub mod bfv;
pub mod codec;
mod error;
pub mod estimator;
pub mod noise;
pub mod params_file;
pub mod ring;
pub mod rlwe;
pub mod sampling;
pub mod scheme;

pub use error::{Error, Result};
pub use noise::{NoiseEstimate, NoiseModel};
pub use ring::{CoordPoly, DefiningPoly, Ring, RingElem, VarietyParams};
pub use sampling::Sampler;
pub use scheme::{Ciphertext, Context, Plaintext, PublicKey, RelinKey, SchemeParams, SecretKey};
