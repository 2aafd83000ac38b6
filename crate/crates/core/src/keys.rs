//! Deterministic stand-in for a public-key infrastructure.
//!
//! A public key is `H("pk", secret)` and a signature is
//! `H("sig", secret, message)`. Verification goes through a [`Certifier`]
//! that knows the registered secrets, the way a certification functionality
//! would answer "did `pk` sign `m`?".

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::hash::{Canonical, Digest, FieldHasher};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PublicKey(pub Digest);

impl std::fmt::Display for PublicKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Canonical for PublicKey {
    fn write_canonical(&self, out: &mut Vec<u8>) {
        self.0.write_canonical(out);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature(pub Digest);

#[derive(Clone, Debug)]
pub struct KeyPair {
    secret: Digest,
    public: PublicKey,
}

impl KeyPair {
    pub fn from_secret(secret: Digest) -> Self {
        let public = PublicKey(FieldHasher::new("pk").digest(&secret).finish());
        KeyPair { secret, public }
    }

    /// Key pair derived from a seed and an index.
    pub fn derive(seed: u64, index: u64) -> Self {
        Self::from_secret(FieldHasher::new("keygen").u64(seed).u64(index).finish())
    }

    pub fn public(&self) -> PublicKey {
        self.public
    }

    pub fn sign(&self, message: &[u8]) -> Signature {
        Signature(signature_digest(&self.secret, message))
    }
}

fn signature_digest(secret: &Digest, message: &[u8]) -> Digest {
    FieldHasher::new("sig").digest(secret).bytes(message).finish()
}

/// Registry of key pairs able to check signatures.
#[derive(Clone, Debug, Default)]
pub struct Certifier {
    secrets: BTreeMap<PublicKey, Digest>,
}

impl Certifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn enroll(&mut self, keys: &KeyPair) {
        self.secrets.insert(keys.public, keys.secret);
    }

    pub fn verify(&self, pk: &PublicKey, message: &[u8], sig: &Signature) -> bool {
        self.secrets
            .get(pk)
            .is_some_and(|s| signature_digest(s, message) == sig.0)
    }
}
