use serde::{Deserialize, Serialize};

use crate::hash::{put_bytes, put_u64, Canonical, Digest, FieldHasher};
use crate::keys::{Certifier, KeyPair, PublicKey, Signature};
use crate::poc::{self, PocError, SecretState, SpaceCommitment};

/// Graph nonce for slot `i` of `pk`: `H("slot", pk, i)`. Binds every space
/// commitment to its owner so it cannot be transplanted to another key.
pub fn slot_nonce(pk: &PublicKey, slot: usize) -> Vec<u8> {
    FieldHasher::new("slot")
        .digest(&pk.0)
        .u64(slot as u64)
        .finish()
        .0
        .to_vec()
}

/// Placeholder digest for a slot of size zero; unique per `(pk, slot)`.
pub fn empty_slot_gamma(pk: &PublicKey, slot: usize) -> Digest {
    FieldHasher::new("empty-slot").digest(&pk.0).u64(slot as u64).finish()
}

/// `com = (pk, (S₀…S_M), (γ₀…γ_M))` signed by `pk`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCommitment {
    pub pk: PublicKey,
    pub sizes: Vec<u64>,
    pub degree: u32,
    pub gammas: Vec<Digest>,
    pub signature: Signature,
}

impl ResourceCommitment {
    /// Runs `init` for every nonzero slot and signs the result. Returns the
    /// commitment and the per-slot secret states (`None` for empty slots).
    pub fn create(
        keys: &KeyPair,
        sizes: &[u64],
        degree: u32,
    ) -> Result<(ResourceCommitment, Vec<Option<SecretState>>), PocError> {
        let pk = keys.public();
        let mut gammas = Vec::with_capacity(sizes.len());
        let mut secrets = Vec::with_capacity(sizes.len());
        for (slot, &size) in sizes.iter().enumerate() {
            if size == 0 {
                gammas.push(empty_slot_gamma(&pk, slot));
                secrets.push(None);
            } else {
                let (com, state) = poc::init(size, &slot_nonce(&pk, slot), degree)?;
                gammas.push(com.gamma);
                secrets.push(Some(state));
            }
        }
        let mut com = ResourceCommitment {
            pk,
            sizes: sizes.to_vec(),
            degree,
            gammas,
            signature: Signature(Digest::ZERO),
        };
        com.signature = keys.sign(&com.body_bytes());
        Ok((com, secrets))
    }

    /// Number of chains `M` (slots minus the shared one).
    pub fn chains(&self) -> usize {
        self.sizes.len().saturating_sub(1)
    }

    pub fn size(&self, slot: usize) -> u64 {
        self.sizes.get(slot).copied().unwrap_or(0)
    }

    /// Space commitment of a nonzero slot, with its pk-bound nonce.
    pub fn slot(&self, slot: usize) -> Option<SpaceCommitment> {
        let size = *self.sizes.get(slot)?;
        let gamma = *self.gammas.get(slot)?;
        (size > 0).then(|| SpaceCommitment {
            gamma,
            size,
            degree: self.degree,
            nonce: slot_nonce(&self.pk, slot),
        })
    }

    pub fn body_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        put_bytes(&mut out, b"commitment");
        self.pk.write_canonical(&mut out);
        put_u64(&mut out, self.sizes.len() as u64);
        for &s in &self.sizes {
            put_u64(&mut out, s);
        }
        put_u64(&mut out, self.degree as u64);
        self.gammas.write_canonical(&mut out);
        out
    }

    /// Structure and signature check.
    pub fn is_well_formed(&self, certifier: &Certifier) -> bool {
        self.sizes.len() == self.gammas.len()
            && !self.sizes.is_empty()
            && certifier.verify(&self.pk, &self.body_bytes(), &self.signature)
    }
}

impl Canonical for ResourceCommitment {
    fn write_canonical(&self, out: &mut Vec<u8>) {
        put_bytes(out, &self.body_bytes());
        self.signature.0.write_canonical(out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slots_are_pk_bound_and_distinct() {
        let a = KeyPair::derive(5, 0);
        let b = KeyPair::derive(5, 1);
        let (ca, sa) = ResourceCommitment::create(&a, &[8, 4, 0], 2).unwrap();
        let (cb, _) = ResourceCommitment::create(&b, &[8, 4, 0], 2).unwrap();
        assert_eq!(ca.chains(), 2);
        assert!(sa[2].is_none());
        assert!(ca.slot(2).is_none());
        assert_eq!(ca.slot(0).unwrap().gamma, sa[0].as_ref().unwrap().root());
        for g in &ca.gammas {
            assert!(!cb.gammas.contains(g));
        }
        let mut sorted = ca.gammas.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 3);
    }

    #[test]
    fn signature_covers_body() {
        let k = KeyPair::derive(6, 0);
        let mut cert = Certifier::new();
        cert.enroll(&k);
        let (mut com, _) = ResourceCommitment::create(&k, &[4, 4], 2).unwrap();
        assert!(com.is_well_formed(&cert));
        com.sizes[1] = 8;
        assert!(!com.is_well_formed(&cert));
    }
}
