//! Lattice KEMs based on learning with rounding (Florete, Espada and Sable) with a
//! decapsulation masked at any order.
//!
//! The unmasked reference lives in [`pke`] and [`kem`]; [`masked`] runs decapsulation on
//! shared secrets using the gadgets in [`gadgets`], the masked Keccak in [`keccak`] and the
//! masked samplers in [`sampler`]. Fresh randomness and its per-component accounting come
//! from [`rng::RandomnessSource`].

pub mod bench;
pub mod cli;
pub mod error;
pub mod gadgets;
pub mod kat;
pub mod keccak;
pub mod kem;
pub mod masked;
pub mod mul;
pub mod pack;
pub mod params;
pub mod pke;
pub mod poly;
pub mod rng;
pub mod sampler;
pub mod shares;

pub use error::{Error, Result};
pub use kem::{kem_decaps, kem_encaps, kem_keygen, KemKeyPair, SecretKey, SessionKey};
pub use masked::{masked_kem_decaps, MaskedSecretKey};
pub use params::{Scheme, SchemeParams, ESPADA, FLORETE, SABLE};
pub use pke::{Ciphertext, PublicKey};
pub use rng::{Label, RandomnessSource};
pub use shares::{ArithShares, BooleanShares, MaskedBytes};
