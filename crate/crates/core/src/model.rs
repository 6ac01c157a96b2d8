//! A concrete sequence-space system for signature `(m, n)` with `n >= m`.
//!
//! `Y = {1..p}^N` with `p = n - m + 1` and `X = {1..m} × Y`. The `m` maps
//! `h_i` attach branch `i`; of the `n` maps `v_j`, the first `m - 1` attach
//! branch `j` and `v_{m-1+k}` attaches branch `m` after pushing symbol `k`.
//! Letters act as `a_i -> v_i` and `b_j -> h_j`, so both partitions of `X`
//! have the sizes required by the signature.
//!
//! Tapes are finite known prefixes. Operations that would need a symbol past
//! the end fail with [`ModelError::TapeExhausted`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Configuration;
use crate::freegroup::{Family, Letter, Signature, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("the model needs n >= m, got m={m} n={n}")]
    Orientation { m: usize, n: usize },
    #[error("the fixed point needs n >= m >= 2, got m={m} n={n}")]
    FixedPointSignature { m: usize, n: usize },
    #[error("map index {index} out of range 1..={max}")]
    Index { index: usize, max: usize },
    #[error("tape symbol {symbol} out of range 1..={p}")]
    Symbol { symbol: usize, p: usize },
    #[error("branch {branch:?} invalid for kind {kind:?}")]
    Branch { kind: Kind, branch: Option<usize> },
    #[error("tape exhausted: a longer tape is needed")]
    TapeExhausted,
    #[error("letter {0} does not belong to the (m, n) alphabet")]
    Letter(Letter),
    #[error("{0} is not a point of kind {1:?}")]
    WrongKind(String, Kind),
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    Y,
    X,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModelPoint {
    sig: Signature,
    kind: Kind,
    branch: Option<usize>,
    tape: Vec<usize>,
}

fn symbols(sig: &Signature) -> Result<usize, ModelError> {
    if sig.n < sig.m {
        return Err(ModelError::Orientation { m: sig.m, n: sig.n });
    }
    Ok(sig.n - sig.m + 1)
}

impl ModelPoint {
    pub fn new(sig: Signature, kind: Kind, branch: Option<usize>, tape: Vec<usize>) -> Result<Self, ModelError> {
        let p = symbols(&sig)?;
        match (kind, branch) {
            (Kind::Y, None) => {}
            (Kind::X, Some(b)) if (1..=sig.m).contains(&b) => {}
            _ => return Err(ModelError::Branch { kind, branch }),
        }
        if let Some(&symbol) = tape.iter().find(|&&s| s == 0 || s > p) {
            return Err(ModelError::Symbol { symbol, p });
        }
        Ok(ModelPoint { sig, kind, branch, tape })
    }

    pub fn y(sig: Signature, tape: Vec<usize>) -> Result<Self, ModelError> {
        Self::new(sig, Kind::Y, None, tape)
    }

    pub fn x(sig: Signature, branch: usize, tape: Vec<usize>) -> Result<Self, ModelError> {
        Self::new(sig, Kind::X, Some(branch), tape)
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn branch(&self) -> Option<usize> {
        self.branch
    }

    pub fn tape(&self) -> &[usize] {
        &self.tape
    }

    /// Number of symbols available, `p = n - m + 1`.
    pub fn p(&self) -> usize {
        self.sig.n - self.sig.m + 1
    }

    /// Same kind and branch, and tapes agree on their common prefix.
    pub fn agrees_with(&self, other: &ModelPoint) -> bool {
        self.kind == other.kind
            && self.branch == other.branch
            && self.tape.iter().zip(&other.tape).all(|(a, b)| a == b)
    }

    fn with(&self, kind: Kind, branch: Option<usize>, tape: Vec<usize>) -> ModelPoint {
        ModelPoint { sig: self.sig, kind, branch, tape }
    }
}

fn check_index(index: usize, max: usize) -> Result<(), ModelError> {
    if index == 0 || index > max {
        return Err(ModelError::Index { index, max });
    }
    Ok(())
}

/// `h_i(y) = (i, y)`; `None` on an `X` point.
pub fn h_map(i: usize, pt: &ModelPoint) -> Result<Option<ModelPoint>, ModelError> {
    check_index(i, pt.sig.m)?;
    Ok((pt.kind == Kind::Y).then(|| pt.with(Kind::X, Some(i), pt.tape.clone())))
}

/// Strips branch `i`; `None` on other branches and on `Y` points.
pub fn h_inv(i: usize, pt: &ModelPoint) -> Result<Option<ModelPoint>, ModelError> {
    check_index(i, pt.sig.m)?;
    Ok((pt.branch == Some(i)).then(|| pt.with(Kind::Y, None, pt.tape.clone())))
}

/// `v_j(y) = (j, y)` for `j < m`, `v_{m-1+k}(y) = (m, k·y)`.
pub fn v_map(j: usize, pt: &ModelPoint) -> Result<Option<ModelPoint>, ModelError> {
    check_index(j, pt.sig.n)?;
    if pt.kind != Kind::Y {
        return Ok(None);
    }
    let m = pt.sig.m;
    Ok(Some(if j < m {
        pt.with(Kind::X, Some(j), pt.tape.clone())
    } else {
        let mut tape = Vec::with_capacity(pt.tape.len() + 1);
        tape.push(j + 1 - m);
        tape.extend_from_slice(&pt.tape);
        pt.with(Kind::X, Some(m), tape)
    }))
}

/// Inverse of [`v_map`], consuming the head symbol on branch `m`.
pub fn v_inv(j: usize, pt: &ModelPoint) -> Result<Option<ModelPoint>, ModelError> {
    check_index(j, pt.sig.n)?;
    let m = pt.sig.m;
    if j < m {
        return Ok((pt.branch == Some(j)).then(|| pt.with(Kind::Y, None, pt.tape.clone())));
    }
    if pt.branch != Some(m) {
        return Ok(None);
    }
    let (&head, rest) = pt.tape.split_first().ok_or(ModelError::TapeExhausted)?;
    Ok((head == j + 1 - m).then(|| pt.with(Kind::Y, None, rest.to_vec())))
}

/// The map attached to a single letter: `a_i -> v_i`, `b_j -> h_j`.
pub fn theta_letter(l: Letter, pt: &ModelPoint) -> Result<Option<ModelPoint>, ModelError> {
    if !pt.sig.contains(l) {
        return Err(ModelError::Letter(l));
    }
    match (l.family, l.inverse) {
        (Family::A, false) => v_map(l.idx(), pt),
        (Family::A, true) => v_inv(l.idx(), pt),
        (Family::B, false) => h_map(l.idx(), pt),
        (Family::B, true) => h_inv(l.idx(), pt),
        (Family::C, _) => Err(ModelError::Letter(l)),
    }
}

/// Applies the letters of `g` right to left. `None` when undefined.
pub fn theta_point(g: &Word, pt: &ModelPoint) -> Result<Option<ModelPoint>, ModelError> {
    let mut current = pt.clone();
    for &l in g.letters().iter().rev() {
        match theta_letter(l, &current)? {
            Some(next) => current = next,
            None => return Ok(None),
        }
    }
    Ok(Some(current))
}

/// The configuration `{g : |g| <= depth, theta_point(g^-1, pt) defined}`.
pub fn gamma(pt: &ModelPoint, depth: usize) -> Result<Configuration, ModelError> {
    let sig = pt.sig;
    let letters = sig.letters();
    let mut members = BTreeSet::from([Word::identity()]);
    // Each member g carries theta(g^-1)(pt).
    let mut stack = vec![(Word::identity(), pt.clone())];
    while let Some((g, q)) = stack.pop() {
        if g.len() == depth {
            continue;
        }
        for &l in &letters {
            if g.last() == Some(l.inverse()) {
                continue;
            }
            if let Some(next) = theta_letter(l.inverse(), &q)? {
                let child = g.mul_letter(l);
                members.insert(child.clone());
                stack.push((child, next));
            }
        }
    }
    Ok(Configuration::from_parts(sig, depth, members))
}

/// The all-ones point of `Y`, fixed by `b_1^-1 a_1` and `b_2^-1 a_2`.
pub fn fixed_point(sig: Signature, capacity: usize) -> Result<ModelPoint, ModelError> {
    if sig.m < 2 || sig.n < sig.m {
        return Err(ModelError::FixedPointSignature { m: sig.m, n: sig.n });
    }
    ModelPoint::y(sig, vec![1; capacity])
}

/// Wire format of a model point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelPointJson {
    pub n: usize,
    pub m: usize,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<usize>,
    pub tape: Vec<usize>,
}

impl Serialize for ModelPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ModelPointJson {
            n: self.sig.n,
            m: self.sig.m,
            kind: self.kind,
            branch: self.branch,
            tape: self.tape.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModelPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ModelPointJson::deserialize(d)?;
        let sig = Signature::new(j.m, j.n).map_err(serde::de::Error::custom)?;
        ModelPoint::new(sig, j.kind, j.branch, j.tape).map_err(serde::de::Error::custom)
    }
}
