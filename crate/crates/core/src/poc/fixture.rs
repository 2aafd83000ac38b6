//! Binary fixture for a labeled graph.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! u64 S | u32 d | u32 λ | u32 nonce_len | nonce bytes | S × 32-byte labels | 32-byte γ
//! ```
//!
//! Labels and `γ` are stored as raw digest bytes (their little-endian
//! integer encoding).

use std::io::{self, Read, Write};

use thiserror::Error;

use super::{check_params, PebblingGraph, SecretState, SpaceCommitment};
use crate::hash::{Digest, DIGEST_LEN, LAMBDA};

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("fixture header invalid: {0}")]
    Header(String),
    #[error("fixture truncated")]
    Truncated,
    #[error("trailing bytes after fixture")]
    Trailing,
    #[error("label {0} does not follow the labeling recurrence")]
    BadLabel(u64),
    #[error("stored commitment does not match the labels")]
    RootMismatch,
}

pub fn write_fixture<W: Write>(mut w: W, state: &SecretState) -> io::Result<()> {
    let g = state.graph();
    w.write_all(&g.size.to_le_bytes())?;
    w.write_all(&g.degree.to_le_bytes())?;
    w.write_all(&LAMBDA.to_le_bytes())?;
    w.write_all(&(g.nonce.len() as u32).to_le_bytes())?;
    w.write_all(&g.nonce)?;
    for l in state.labels() {
        w.write_all(&l.0)?;
    }
    w.write_all(&state.root().0)?;
    Ok(())
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<(), FixtureError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => FixtureError::Truncated,
        _ => FixtureError::Io(e),
    })
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, FixtureError> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b)?;
    Ok(u32::from_le_bytes(b))
}

/// Parses a fixture and checks it: every label must follow the recurrence
/// and the stored `γ` must equal the Merkle root of the labels.
pub fn read_fixture<R: Read>(mut r: R) -> Result<(SpaceCommitment, SecretState), FixtureError> {
    let mut b8 = [0u8; 8];
    read_exact(&mut r, &mut b8)?;
    let size = u64::from_le_bytes(b8);
    let degree = read_u32(&mut r)?;
    let lambda = read_u32(&mut r)?;
    if lambda != LAMBDA {
        return Err(FixtureError::Header(format!("unsupported λ = {lambda}")));
    }
    check_params(size, degree).map_err(|e| FixtureError::Header(e.to_string()))?;
    let nonce_len = read_u32(&mut r)? as usize;
    if nonce_len > 1 << 16 {
        return Err(FixtureError::Header(format!("nonce length {nonce_len} too large")));
    }
    let mut nonce = vec![0u8; nonce_len];
    read_exact(&mut r, &mut nonce)?;

    let mut labels = Vec::with_capacity(size as usize);
    for _ in 0..size {
        let mut d = [0u8; DIGEST_LEN];
        read_exact(&mut r, &mut d)?;
        labels.push(Digest(d));
    }
    let mut gamma = [0u8; DIGEST_LEN];
    read_exact(&mut r, &mut gamma)?;
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(FixtureError::Trailing);
    }

    let state = SecretState::from_labels(PebblingGraph::new(size, degree, nonce), labels);
    if let Some(i) = state.first_bad_label() {
        return Err(FixtureError::BadLabel(i));
    }
    if state.root() != Digest(gamma) {
        return Err(FixtureError::RootMismatch);
    }
    Ok((state.commitment(), state))
}
