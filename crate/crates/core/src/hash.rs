//! Domain-separated hashing and canonical byte encodings.
//!
//! Every hash in the crate is `SHA-256(len(tag) ‖ tag ‖ len(f₁) ‖ f₁ ‖ …)`
//! with 8-byte little-endian length prefixes, so no two distinct field
//! sequences can collide by concatenation.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest as _, Sha256};

/// Output length of `H` in bits.
pub const LAMBDA: u32 = 256;

/// Output length of `H` in bytes.
pub const DIGEST_LEN: usize = 32;

/// A λ-bit hash output.
///
/// When a digest is read as an integer (challenge derivation, block weight)
/// the bytes are interpreted little-endian.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Digest(pub [u8; DIGEST_LEN]);

impl Digest {
    pub const ZERO: Digest = Digest([0u8; DIGEST_LEN]);

    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, hex::FromHexError> {
        let mut out = [0u8; DIGEST_LEN];
        hex::decode_to_slice(s, &mut out)?;
        Ok(Digest(out))
    }

    /// The digest as a 256-bit little-endian integer, reduced mod `m`.
    pub fn mod_u64(&self, m: u64) -> u64 {
        assert!(m > 0, "modulus must be positive");
        let m = m as u128;
        self.0
            .iter()
            .rev()
            .fold(0u128, |acc, &b| ((acc << 8) | b as u128) % m) as u64
    }

    /// Number of significant bits of the digest read as an integer.
    pub fn bit_length(&self) -> u32 {
        match self.0.iter().rposition(|&b| b != 0) {
            Some(top) => top as u32 * 8 + (8 - self.0[top].leading_zeros()),
            None => 0,
        }
    }

    /// Natural log of the digest read as an integer, from its top 64 bits
    /// plus the bit-length offset. Zero maps to `-inf`.
    pub fn ln_value(&self) -> f64 {
        let bits = self.bit_length();
        if bits == 0 {
            return f64::NEG_INFINITY;
        }
        let limbs: [u64; 4] = std::array::from_fn(|i| {
            u64::from_le_bytes(self.0[i * 8..i * 8 + 8].try_into().expect("8-byte limb"))
        });
        if bits <= 64 {
            return (limbs[0] as f64).ln();
        }
        // top 64 bits: shift the integer right by (bits - 64)
        let shift = bits - 64;
        let limb = (shift / 64) as usize;
        let off = shift % 64;
        let lo = limbs[limb] >> off;
        let hi = if off == 0 || limb + 1 >= 4 {
            0
        } else {
            limbs[limb + 1] << (64 - off)
        };
        let top = lo | hi;
        (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", &self.to_hex()[..16])
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Digest {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Digest::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Builder for `H_tag(f₁, f₂, …)`.
#[derive(Clone)]
pub struct FieldHasher(Sha256);

impl FieldHasher {
    pub fn new(tag: &str) -> Self {
        let mut h = Sha256::new();
        h.update((tag.len() as u64).to_le_bytes());
        h.update(tag.as_bytes());
        FieldHasher(h)
    }

    pub fn bytes(mut self, field: &[u8]) -> Self {
        self.0.update((field.len() as u64).to_le_bytes());
        self.0.update(field);
        self
    }

    pub fn u64(self, v: u64) -> Self {
        self.bytes(&v.to_le_bytes())
    }

    pub fn digest(self, d: &Digest) -> Self {
        self.bytes(&d.0)
    }

    pub fn finish(self) -> Digest {
        Digest(self.0.finalize().into())
    }
}

/// One-shot `H_tag(fields…)`.
pub fn hash_fields(tag: &str, fields: &[&[u8]]) -> Digest {
    fields
        .iter()
        .fold(FieldHasher::new(tag), |h, f| h.bytes(f))
        .finish()
}

/// Length-prefixed canonical serialization used for hashing and signing.
pub trait Canonical {
    fn write_canonical(&self, out: &mut Vec<u8>);

    fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_canonical(&mut out);
        out
    }
}

pub(crate) fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

pub(crate) fn put_bytes(out: &mut Vec<u8>, b: &[u8]) {
    put_u64(out, b.len() as u64);
    out.extend_from_slice(b);
}

pub(crate) fn put_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_bits().to_le_bytes());
}

impl Canonical for Digest {
    fn write_canonical(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.0);
    }
}

impl<T: Canonical> Canonical for [T] {
    fn write_canonical(&self, out: &mut Vec<u8>) {
        put_u64(out, self.len() as u64);
        for item in self {
            item.write_canonical(out);
        }
    }
}

impl<T: Canonical> Canonical for Vec<T> {
    fn write_canonical(&self, out: &mut Vec<u8>) {
        self.as_slice().write_canonical(out);
    }
}
