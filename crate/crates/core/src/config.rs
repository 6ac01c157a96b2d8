//! Finite-depth configurations: subsets of the radius-`L` Cayley ball that
//! contain the identity, are prefix-closed, and follow one of the two local
//! neighbour patterns at every interior point.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freegroup::{ball, Family, Letter, Signature, Word, WordError};

/// Enumeration refuses balls larger than this many words.
pub const MAX_ENUMERATION_BALL: usize = 100_000;
/// Enumeration stops with an error once this many configurations are found.
pub const MAX_ENUMERATED_CONFIGURATIONS: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("member {word} has length {len} exceeding depth {depth}")]
    TooLong { word: Word, len: usize, depth: usize },
    #[error("word {0} is not a member")]
    NotMember(Word),
    #[error("word {word} needs depth {needed}, configuration has depth {depth}")]
    InsufficientDepth { word: Word, needed: usize, depth: usize },
    #[error("{g} does not act on this configuration ({inv} is not a member)")]
    NotInDomain { g: Word, inv: Word },
    #[error("pattern violation at {0}")]
    PatternViolation(Word),
    #[error("comparison depth {requested} exceeds available depth {available}")]
    DepthTooLarge { requested: usize, available: usize },
    #[error("signature mismatch")]
    SignatureMismatch,
    #[error("enumeration cutoff exceeded: {0}")]
    Cutoff(String),
}

/// Local neighbour pattern at a member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pattern {
    /// Exactly one `g a_i` and one `g b_j` are members, no inverse neighbours.
    C1 { a: usize, b: usize },
    /// No positive neighbours, every inverse neighbour.
    C2,
    /// Some neighbour lies outside the ball.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reason {
    MissingIdentity,
    NotPrefixClosed,
    PatternViolation(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<(Word, Reason)>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    sig: Signature,
    depth: usize,
    members: BTreeSet<Word>,
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Configuration")
            .field("m", &self.sig.m)
            .field("n", &self.sig.n)
            .field("depth", &self.depth)
            .field("members", &self.members)
            .finish()
    }
}

impl Configuration {
    /// Checks letters and lengths only; the local rules are left to
    /// [`Configuration::validate`].
    pub fn new<I>(sig: Signature, depth: usize, members: I) -> Result<Self, ConfigError>
    where
        I: IntoIterator<Item = Word>,
    {
        let members: BTreeSet<Word> = members.into_iter().collect();
        for w in &members {
            sig.check_word(w)?;
            if w.len() > depth {
                return Err(ConfigError::TooLong { word: w.clone(), len: w.len(), depth });
            }
        }
        Ok(Configuration { sig, depth, members })
    }

    pub(crate) fn from_parts(sig: Signature, depth: usize, members: BTreeSet<Word>) -> Self {
        debug_assert!(members.iter().all(|w| w.len() <= depth));
        Configuration { sig, depth, members }
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn members(&self) -> &BTreeSet<Word> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.members.contains(w)
    }

    /// Restriction to a smaller ball.
    pub fn truncate(&self, depth: usize) -> Result<Configuration, ConfigError> {
        if depth > self.depth {
            return Err(ConfigError::DepthTooLarge { requested: depth, available: self.depth });
        }
        let members = self.members.iter().filter(|w| w.len() <= depth).cloned().collect();
        Ok(Configuration { sig: self.sig, depth, members })
    }

    /// Pattern at a member `g`.
    pub fn classify_pattern(&self, g: &Word) -> Result<Pattern, ConfigError> {
        if !self.members.contains(g) {
            return Err(ConfigError::NotMember(g.clone()));
        }
        if g.len() >= self.depth {
            return Ok(Pattern::Undetermined);
        }
        local_pattern(&self.sig, g, |w| self.members.contains(w))
            .map_err(|_| ConfigError::PatternViolation(g.clone()))
    }

    /// Every violation of the defining rules, in ball order of the offending word.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if !self.members.contains(&Word::identity()) {
            violations.push((Word::identity(), Reason::MissingIdentity));
        }
        for g in &self.members {
            if let Some(parent) = g.parent() {
                if !self.members.contains(&parent) {
                    violations.push((g.clone(), Reason::NotPrefixClosed));
                }
            }
            if g.len() < self.depth {
                if let Err(detail) = local_pattern(&self.sig, g, |w| self.members.contains(w)) {
                    violations.push((g.clone(), Reason::PatternViolation(detail)));
                }
            }
        }
        ValidationReport { violations }
    }

    /// Whether `g` acts on this configuration, i.e. `g^-1` is a member.
    pub fn in_domain(&self, g: &Word) -> Result<bool, ConfigError> {
        if g.len() > self.depth {
            return Err(ConfigError::InsufficientDepth {
                word: g.clone(),
                needed: g.len(),
                depth: self.depth,
            });
        }
        self.sig.check_word(g)?;
        Ok(self.members.contains(&g.inverse()))
    }

    /// The translate `g * xi`, known on the ball of radius `depth - |g|`.
    pub fn translate(&self, g: &Word) -> Result<Configuration, ConfigError> {
        if !self.in_domain(g)? {
            return Err(ConfigError::NotInDomain { g: g.clone(), inv: g.inverse() });
        }
        let depth = self.depth - g.len();
        let members = self
            .members
            .iter()
            .map(|h| g.mul(h))
            .filter(|w| w.len() <= depth)
            .collect();
        Ok(Configuration { sig: self.sig, depth, members })
    }

    /// Agreement of membership on the ball of radius `depth`.
    pub fn equal_at_depth(&self, other: &Configuration, depth: usize) -> Result<bool, ConfigError> {
        if self.sig != other.sig {
            return Err(ConfigError::SignatureMismatch);
        }
        let available = self.depth.min(other.depth);
        if depth > available {
            return Err(ConfigError::DepthTooLarge { requested: depth, available });
        }
        let mut lhs = self.members.iter().take_while(|w| w.len() <= depth);
        let mut rhs = other.members.iter().take_while(|w| w.len() <= depth);
        loop {
            match (lhs.next(), rhs.next()) {
                (None, None) => return Ok(true),
                (Some(x), Some(y)) if x == y => continue,
                _ => return Ok(false),
            }
        }
    }

    /// Graphviz rendering of the whole ball: members filled, non-members
    /// hollow, the identity double-circled.
    pub fn to_dot(&self) -> String {
        let words = ball(&self.sig, self.depth);
        let mut out = String::from("digraph configuration {\n  node [shape=circle, label=\"\"];\n");
        for (k, w) in words.iter().enumerate() {
            let shape = if w.is_identity() { "doublecircle" } else { "circle" };
            let style = if self.members.contains(w) { "style=filled, fillcolor=black" } else { "style=solid" };
            let _ = writeln!(out, "  n{k} [shape={shape}, {style}, tooltip=\"{w}\"];");
        }
        let index: std::collections::HashMap<&Word, usize> =
            words.iter().enumerate().map(|(k, w)| (w, k)).collect();
        for (k, w) in words.iter().enumerate() {
            if let Some(p) = w.parent() {
                let last = w.last().expect("non-identity");
                let _ = writeln!(out, "  n{} -> n{k} [label=\"{last}\"];", index[&p]);
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Pattern at `g` given a membership oracle for its neighbours.
/// Returns a textual description of the violation when neither pattern fits.
pub(crate) fn local_pattern<F>(sig: &Signature, g: &Word, member: F) -> Result<Pattern, String>
where
    F: Fn(&Word) -> bool,
{
    let mut pos_a = Vec::new();
    let mut pos_b = Vec::new();
    let mut neg_in = 0usize;
    for l in sig.letters() {
        if member(&g.mul_letter(l)) {
            if l.inverse {
                neg_in += 1;
            } else if l.family == Family::A {
                pos_a.push(l.idx());
            } else {
                pos_b.push(l.idx());
            }
        }
    }
    let rank = sig.rank();
    if pos_a.is_empty() && pos_b.is_empty() && neg_in == rank {
        return Ok(Pattern::C2);
    }
    if pos_a.len() == 1 && pos_b.len() == 1 && neg_in == 0 {
        return Ok(Pattern::C1 { a: pos_a[0], b: pos_b[0] });
    }
    Err(format!(
        "{} a-children, {} b-children, {} of {} inverse neighbours",
        pos_a.len(),
        pos_b.len(),
        neg_in,
        rank
    ))
}

/// Wire format of a configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigurationJson {
    pub n: usize,
    pub m: usize,
    pub depth: usize,
    pub members: Vec<String>,
}

impl From<&Configuration> for ConfigurationJson {
    fn from(c: &Configuration) -> Self {
        ConfigurationJson {
            n: c.sig.n,
            m: c.sig.m,
            depth: c.depth,
            members: c.members.iter().map(|w| w.to_string()).collect(),
        }
    }
}

impl TryFrom<ConfigurationJson> for Configuration {
    type Error = ConfigError;

    fn try_from(j: ConfigurationJson) -> Result<Self, Self::Error> {
        let sig = Signature::new(j.m, j.n)?;
        let members = j
            .members
            .iter()
            .map(|s| Word::parse(s, &sig))
            .collect::<Result<Vec<_>, _>>()?;
        Configuration::new(sig, j.depth, members)
    }
}

impl Serialize for Configuration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ConfigurationJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ConfigurationJson::deserialize(d)?;
        Configuration::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// Every valid depth-`depth` configuration, in lexicographic order of their
/// membership vectors over the ball (members before non-members).
///
/// Backtracks over the membership bit of each ball word. Words whose parent
/// is excluded are forced out by prefix-closure and never branched on; the
/// bits of a node's children are chosen one at a time with the pattern at
/// that node checked incrementally.
pub fn enumerate_omega(sig: &Signature, depth: usize) -> Result<Vec<Configuration>, ConfigError> {
    let size = crate::freegroup::ball_size(sig, depth);
    if size > MAX_ENUMERATION_BALL as u128 {
        return Err(ConfigError::Cutoff(format!(
            "ball of radius {depth} has {size} words (limit {MAX_ENUMERATION_BALL})"
        )));
    }
    let mut search = OmegaSearch {
        sig: *sig,
        depth,
        letters: sig.letters(),
        members: BTreeSet::from([Word::identity()]),
        out: Vec::new(),
    };
    let pending = vec![Word::identity()];
    search.expand(&pending, 0)?;
    Ok(search.out)
}

struct OmegaSearch {
    sig: Signature,
    depth: usize,
    letters: Vec<Letter>,
    members: BTreeSet<Word>,
    out: Vec<Configuration>,
}

/// Partial tally of the neighbourhood of one node while its children are
/// being decided.
#[derive(Clone, Copy, Default)]
struct Tally {
    pos_a: usize,
    pos_b: usize,
    neg_in: usize,
    neg_out: usize,
    undecided_a: usize,
    undecided_b: usize,
}

impl Tally {
    fn add(&mut self, l: Letter, member: bool) {
        match (l.inverse, member) {
            (true, true) => self.neg_in += 1,
            (true, false) => self.neg_out += 1,
            (false, true) if l.family == Family::A => self.pos_a += 1,
            (false, true) => self.pos_b += 1,
            (false, false) => {}
        }
    }

    fn feasible(&self) -> bool {
        let c2 = self.pos_a == 0 && self.pos_b == 0 && self.neg_out == 0;
        let c1 = self.neg_in == 0
            && self.pos_a <= 1
            && self.pos_b <= 1
            && (self.pos_a == 1 || self.undecided_a > 0)
            && (self.pos_b == 1 || self.undecided_b > 0);
        c1 || c2
    }
}

impl OmegaSearch {
    /// `pending` holds members whose children are not yet decided, in ball
    /// order; `cursor` indexes the next one.
    fn expand(&mut self, pending: &[Word], cursor: usize) -> Result<(), ConfigError> {
        let Some(g) = pending.get(cursor) else {
            if self.out.len() >= MAX_ENUMERATED_CONFIGURATIONS {
                return Err(ConfigError::Cutoff(format!(
                    "more than {MAX_ENUMERATED_CONFIGURATIONS} configurations"
                )));
            }
            self.out
                .push(Configuration::from_parts(self.sig, self.depth, self.members.clone()));
            return Ok(());
        };
        if g.len() >= self.depth {
            // Boundary node: its neighbours are outside the ball.
            return self.expand(pending, cursor + 1);
        }
        let mut tally = Tally::default();
        let mut children = Vec::new();
        for &l in &self.letters {
            if g.last() == Some(l.inverse()) {
                tally.add(l, true);
            } else {
                children.push(l);
                if !l.inverse {
                    match l.family {
                        Family::A => tally.undecided_a += 1,
                        _ => tally.undecided_b += 1,
                    }
                }
            }
        }
        let g = g.clone();
        self.choose_children(&g, &children, 0, tally, pending, cursor)
    }

    fn choose_children(
        &mut self,
        g: &Word,
        children: &[Letter],
        k: usize,
        tally: Tally,
        pending: &[Word],
        cursor: usize,
    ) -> Result<(), ConfigError> {
        if k == children.len() {
            let mut next: Vec<Word> = pending.to_vec();
            for &l in children {
                let child = g.mul_letter(l);
                if self.members.contains(&child) {
                    next.push(child);
                }
            }
            return self.expand(&next, cursor + 1);
        }
        let l = children[k];
        for member in [true, false] {
            let mut t = tally;
            if !l.inverse {
                match l.family {
                    Family::A => t.undecided_a -= 1,
                    _ => t.undecided_b -= 1,
                }
            }
            t.add(l, member);
            if !t.feasible() {
                continue;
            }
            let child = g.mul_letter(l);
            if member {
                self.members.insert(child.clone());
            }
            let res = self.choose_children(g, children, k + 1, t, pending, cursor);
            if member {
                self.members.remove(&child);
            }
            res?;
        }
        Ok(())
    }
}
