use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hash::Digest;
use crate::keys::{Certifier, PublicKey};

use super::ResourceCommitment;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegistryError {
    #[error("commitment signature or structure invalid")]
    BadSignature,
    #[error("a commitment digest is already registered")]
    GammaReuse,
    #[error("public key already bound to a different commitment")]
    PkConflict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Registration {
    Inserted,
    AlreadyPresent,
}

/// `Γ`: every registered commitment digest. `J`: public key to commitment.
///
/// No digest appears twice in `Γ` and every digest of every commitment in
/// `J` is in `Γ`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RegistryState {
    gammas: BTreeMap<Digest, PublicKey>,
    commitments: BTreeMap<PublicKey, ResourceCommitment>,
}

impl RegistryState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.commitments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commitments.is_empty()
    }

    pub fn commitment(&self, pk: &PublicKey) -> Option<&ResourceCommitment> {
        self.commitments.get(pk)
    }

    pub fn gammas(&self) -> impl Iterator<Item = &Digest> {
        self.gammas.keys()
    }

    pub fn commitments(&self) -> impl Iterator<Item = &ResourceCommitment> {
        self.commitments.values()
    }

    pub fn owner_of(&self, gamma: &Digest) -> Option<&PublicKey> {
        self.gammas.get(gamma)
    }

    /// Whether `com` could be added: `Ok(true)` if it is already registered
    /// verbatim, `Ok(false)` if it is new and conflict-free.
    pub fn check(&self, com: &ResourceCommitment) -> Result<bool, RegistryError> {
        if let Some(existing) = self.commitments.get(&com.pk) {
            return if existing == com {
                Ok(true)
            } else {
                Err(RegistryError::PkConflict)
            };
        }
        let distinct: BTreeSet<&Digest> = com.gammas.iter().collect();
        if distinct.len() != com.gammas.len() || com.gammas.iter().any(|g| self.gammas.contains_key(g)) {
            return Err(RegistryError::GammaReuse);
        }
        Ok(false)
    }

    /// `J ⊎ {(pk, com)}` and `Γ ⊎ γ`. Idempotent on exact re-submission.
    pub fn register_commitment(&mut self, com: &ResourceCommitment, certifier: &Certifier) -> Result<Registration, RegistryError> {
        if !com.is_well_formed(certifier) {
            return Err(RegistryError::BadSignature);
        }
        self.insert_checked(com)
    }

    pub(crate) fn insert_checked(&mut self, com: &ResourceCommitment) -> Result<Registration, RegistryError> {
        if self.check(com)? {
            return Ok(Registration::AlreadyPresent);
        }
        for g in &com.gammas {
            self.gammas.insert(*g, com.pk);
        }
        self.commitments.insert(com.pk, com.clone());
        Ok(Registration::Inserted)
    }

    /// Re-derives the registry invariants from scratch.
    pub fn is_consistent(&self) -> bool {
        let mut seen = BTreeSet::new();
        for (pk, com) in &self.commitments {
            if com.pk != *pk {
                return false;
            }
            for g in &com.gammas {
                if !seen.insert(*g) || self.gammas.get(g) != Some(pk) {
                    return false;
                }
            }
        }
        seen.len() == self.gammas.len()
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let list: Vec<&ResourceCommitment> = self.commitments.values().collect();
        serde_json::to_string_pretty(&list)
    }

    /// Rebuilds a registry from exported JSON, re-checking signatures and
    /// the no-reuse invariants.
    pub fn from_json(json: &str, certifier: &Certifier) -> Result<Self, RegistryImportError> {
        let list: Vec<ResourceCommitment> = serde_json::from_str(json)?;
        let mut reg = RegistryState::new();
        for com in &list {
            reg.register_commitment(com, certifier)?;
        }
        Ok(reg)
    }
}

#[derive(Debug, Error)]
pub enum RegistryImportError {
    #[error("parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("rejected: {0}")]
    Rejected(#[from] RegistryError),
}
