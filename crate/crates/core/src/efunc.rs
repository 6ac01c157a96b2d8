//! Coordinates for the configurations with pattern C2 at the identity.
//!
//! A partial E-function of depth `r` is a family of tables `f_1..f_r`; table
//! `f_i` is defined exactly on the words `x_1..x_i` over the positive
//! alphabet `E = {a_i} ⊔ {b_j}` that avoid `x_{j+1} = f_j(x_1..x_j)`, and
//! every value has the family opposite to the last letter of its argument.
//! Such a family of depth `r` is the same thing as a depth-`2r` configuration
//! with pattern C2 at the identity ([`psi`] / [`phi`]).

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, Configuration, Pattern};
use crate::freegroup::{Family, Letter, Signature, Word, WordError};

/// Enumeration of partial E-functions stops beyond this many results.
pub const MAX_ENUMERATED_PEF: usize = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EFuncError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("color is undefined for the empty word")]
    EmptyWord,
    #[error("{0} is not a positive word")]
    NotPositive(Word),
    #[error("level {level} requested but only {available} tables are present")]
    LevelOutOfRange { level: usize, available: usize },
    #[error("table {level} is not defined exactly on its domain: {detail}")]
    Domain { level: usize, detail: String },
    #[error("value {value} at {alpha} has the wrong color")]
    Color { alpha: Word, value: Letter },
    #[error("enumeration cutoff exceeded: {0}")]
    Cutoff(String),
    #[error("pattern at the identity is {0:?}, expected C2")]
    NotC2Rooted(Pattern),
    #[error("configuration has no unique witness continuing {0}")]
    MissingWitness(Word),
    #[error("configuration depth {depth} is below the required {needed}")]
    InsufficientDepth { depth: usize, needed: usize },
    #[error("total function is missing a value at {0}")]
    Incomplete(Word),
}

/// Color of a nonempty positive word: 1 when it ends in an `a`-letter,
/// 0 when it ends in a `b`-letter. Values at `alpha` lie in `Z_{c(alpha)}`
/// (`Z_0` the `a`-letters, `Z_1` the `b`-letters).
pub fn color(alpha: &Word) -> Result<u8, EFuncError> {
    match alpha.last() {
        None => Err(EFuncError::EmptyWord),
        Some(l) if l.inverse => Err(EFuncError::NotPositive(alpha.clone())),
        Some(l) => Ok(if l.family == Family::A { 1 } else { 0 }),
    }
}

/// The letters a value at `alpha` may take.
pub(crate) fn allowed_values(sig: &Signature, last: Letter) -> Vec<Letter> {
    let fam = last.family.other();
    (1..=sig.family_size(fam)).map(|i| Letter::new(fam, i, false)).collect()
}

fn color_ok(last: Letter, value: Letter) -> bool {
    value.is_positive() && value.family == last.family.other()
}

fn push(alpha: &Word, l: Letter) -> Word {
    let mut v = alpha.letters().to_vec();
    v.push(l);
    Word::from_reduced(v).expect("positive words are reduced")
}

pub type Table = BTreeMap<Word, Letter>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialEFunction {
    sig: Signature,
    tables: Vec<Table>,
}

impl PartialEFunction {
    /// The depth-0 function; its basic open set is all of `Y^u`.
    pub fn empty(sig: Signature) -> Self {
        PartialEFunction { sig, tables: Vec::new() }
    }

    /// Checks domain exactness and colors of every table.
    pub fn new(sig: Signature, tables: Vec<Table>) -> Result<Self, EFuncError> {
        let mut f = PartialEFunction { sig, tables: Vec::with_capacity(tables.len()) };
        for (k, table) in tables.into_iter().enumerate() {
            let level = k + 1;
            let domain = f.omega(level)?;
            let keys: BTreeSet<&Word> = table.keys().collect();
            if keys.len() != domain.len() || !domain.iter().all(|w| keys.contains(w)) {
                let missing = domain.iter().find(|w| !keys.contains(w));
                let extra = keys.iter().find(|w| !domain.contains(w));
                return Err(EFuncError::Domain {
                    level,
                    detail: match (missing, extra) {
                        (Some(w), _) => format!("missing {w}"),
                        (_, Some(w)) => format!("unexpected {w}"),
                        _ => "size mismatch".into(),
                    },
                });
            }
            for (alpha, &value) in &table {
                sig.check_word(alpha)?;
                sig.check(value)?;
                if !color_ok(alpha.last().expect("nonempty"), value) {
                    return Err(EFuncError::Color { alpha: alpha.clone(), value });
                }
            }
            f.tables.push(table);
        }
        Ok(f)
    }

    pub(crate) fn from_tables_unchecked(sig: Signature, tables: Vec<Table>) -> Self {
        PartialEFunction { sig, tables }
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    /// Number of tables.
    pub fn depth(&self) -> usize {
        self.tables.len()
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    /// `f_level(alpha)` when `alpha` lies in the domain of that table.
    pub fn get(&self, alpha: &Word) -> Option<Letter> {
        self.tables.get(alpha.len().checked_sub(1)?)?.get(alpha).copied()
    }

    /// The domain `Ω_level` of table `level`, for `1 <= level <= depth + 1`.
    pub fn omega(&self, level: usize) -> Result<Vec<Word>, EFuncError> {
        let r = self.tables.len();
        if level == 0 || level > r + 1 {
            return Err(EFuncError::LevelOutOfRange { level, available: r });
        }
        if level == 1 {
            return Ok(self.sig.positive_letters().into_iter().map(Word::letter).collect());
        }
        if level <= r {
            return Ok(self.tables[level - 1].keys().cloned().collect());
        }
        let letters = self.sig.positive_letters();
        Ok(self.tables[level - 2]
            .iter()
            .flat_map(|(alpha, &v)| {
                letters.iter().filter(move |&&x| x != v).map(move |&x| push(alpha, x))
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect())
    }

    /// Restriction to the first `r` tables.
    pub fn truncate(&self, r: usize) -> PartialEFunction {
        PartialEFunction { sig: self.sig, tables: self.tables[..r.min(self.tables.len())].to_vec() }
    }

    /// Whether `self` extends `other` (same signature, agreeing tables).
    pub fn extends(&self, other: &PartialEFunction) -> bool {
        self.sig == other.sig
            && other.depth() <= self.depth()
            && self.tables[..other.depth()] == other.tables[..]
    }

    /// The words `x_1^-1 f_1 x_2^-1 f_2 ... x_r^-1 f_r` over `alpha ∈ Ω_r`.
    pub fn basic_open_words(&self) -> Vec<Word> {
        match self.tables.last() {
            None => Vec::new(),
            Some(last) => last.keys().map(|alpha| self.path_word(alpha, true)).collect(),
        }
    }

    /// `x_1^-1 f_1(x_1) ... x_k^-1`, followed by `f_k(x_1..x_k)` when `closed`.
    fn path_word(&self, alpha: &Word, closed: bool) -> Word {
        let mut letters = Vec::with_capacity(2 * alpha.len());
        for k in 1..=alpha.len() {
            letters.push(alpha.letters()[k - 1].inverse());
            if k < alpha.len() || closed {
                letters.push(self.get(&alpha.prefix(k)).expect("alpha in domain"));
            }
        }
        Word::from_reduced(letters).expect("alternating words are reduced")
    }
}

/// A total color-constrained function on the nonempty positive words of
/// length at most `depth`, stored densely by word index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedEFunction {
    sig: Signature,
    depth: usize,
    values: Vec<Letter>,
}

/// Dense indexing of positive words: letters coded `a_i -> i-1`,
/// `b_j -> n+j-1`, words of length `k` occupy a contiguous block.
#[derive(Debug, Clone)]
struct PositiveIndex {
    alphabet: Vec<Letter>,
    n: usize,
    offsets: Vec<usize>,
}

impl PositiveIndex {
    fn new(sig: &Signature, depth: usize) -> Self {
        let alphabet = sig.positive_letters();
        let base = alphabet.len();
        // offsets[k] = number of words of length 1..k-1.
        let mut offsets = vec![0usize; depth + 2];
        let mut size = 1usize;
        for k in 1..=depth + 1 {
            if k > 1 {
                offsets[k] = offsets[k - 1] + size;
            }
            size *= base;
        }
        PositiveIndex { alphabet, n: sig.n, offsets }
    }

    fn code(&self, l: Letter) -> usize {
        match l.family {
            Family::A => l.idx() - 1,
            _ => self.n + l.idx() - 1,
        }
    }

    fn index(&self, letters: &[Letter]) -> usize {
        let base = self.alphabet.len();
        let mut idx = 0usize;
        for &l in letters {
            idx = idx * base + self.code(l);
        }
        self.offsets[letters.len()] + idx
    }

    fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// All words of length `len`, lexicographic.
    fn words(&self, len: usize) -> Vec<Vec<Letter>> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    self.alphabet.iter().map(move |&l| {
                        let mut v = w.clone();
                        v.push(l);
                        v
                    })
                })
                .collect();
        }
        out
    }
}

impl ExtendedEFunction {
    /// Builds a total function from an explicit assignment. Every nonempty
    /// positive word of length `<= depth` must be present and color-valid.
    pub fn from_map(sig: Signature, depth: usize, map: &BTreeMap<Word, Letter>) -> Result<Self, EFuncError> {
        let index = PositiveIndex::new(&sig, depth);
        let mut values = vec![Letter::a(1); index.total()];
        for len in 1..=depth {
            for letters in index.words(len) {
                let w = Word::from_reduced(letters.clone()).expect("positive");
                let &v = map.get(&w).ok_or_else(|| EFuncError::Incomplete(w.clone()))?;
                if !color_ok(*letters.last().unwrap(), v) || !sig.contains(v) {
                    return Err(EFuncError::Color { alpha: w, value: v });
                }
                values[index.index(&letters)] = v;
            }
        }
        Ok(ExtendedEFunction { sig, depth, values })
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    fn index(&self) -> PositiveIndex {
        PositiveIndex::new(&self.sig, self.depth)
    }

    pub fn get(&self, alpha: &Word) -> Option<Letter> {
        if alpha.is_empty() || alpha.len() > self.depth || !alpha.letters().iter().all(|l| l.is_positive()) {
            return None;
        }
        Some(self.values[self.index().index(alpha.letters())])
    }

    /// The whole function as an ordered map.
    pub fn to_map(&self) -> BTreeMap<Word, Letter> {
        let index = self.index();
        (1..=self.depth)
            .flat_map(|len| index.words(len))
            .map(|letters| {
                let v = self.values[index.index(&letters)];
                (Word::from_reduced(letters).unwrap(), v)
            })
            .collect()
    }

    /// Whether the function agrees with every table of `f`.
    pub fn extends(&self, f: &PartialEFunction) -> bool {
        f.depth() <= self.depth
            && f.tables().iter().flatten().all(|(alpha, &v)| self.get(alpha) == Some(v))
    }
}

/// Extends a partial E-function to the unique function on all positive words
/// of length `<= depth` that satisfies both reflection and excision laws.
///
/// For `alpha = x_1..x_k` let `i` be the first position with
/// `x_{i+1} = f(x_1..x_i)`. With no such `i`, `alpha` is in the table domain.
/// For `i < k-1` the pattern `x_i f(x_1..x_i)` is excised,
/// `f(alpha) = f(x_1..x_{i-1} x_{i+2}..x_k)`; for `i = k-1`,
/// `f(alpha) = x_{k-1}`.
pub fn extend_forced(f: &PartialEFunction) -> ExtendedEFunction {
    let sig = f.sig;
    let depth = f.depth();
    let index = PositiveIndex::new(&sig, depth);
    let mut values = vec![Letter::a(1); index.total()];
    for len in 1..=depth {
        for letters in index.words(len) {
            let split = (1..len).find(|&i| letters[i] == values[index.index(&letters[..i])]);
            let v = match split {
                None => {
                    let w = Word::from_reduced(letters.clone()).unwrap();
                    f.get(&w).expect("word avoiding every forced letter lies in the table domain")
                }
                Some(i) if i == len - 1 => letters[len - 2],
                Some(i) => {
                    let mut shorter = letters[..i - 1].to_vec();
                    shorter.extend_from_slice(&letters[i + 1..]);
                    values[index.index(&shorter)]
                }
            };
            values[index.index(&letters)] = v;
        }
    }
    ExtendedEFunction { sig, depth, values }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Law {
    /// `f(α e f(αe)) = e`
    Reflection,
    /// `f(α e f(αe) β) = f(αβ)`
    Excision,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawViolation {
    pub law: Law,
    pub alpha: Word,
    pub e: Letter,
    pub beta: Option<Word>,
    pub expected: Letter,
    pub found: Letter,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConditionReport {
    pub violations: Vec<LawViolation>,
    pub instances_checked: usize,
    /// Instances whose words are longer than this were not checked.
    pub checked_up_to_length: usize,
}

impl ConditionReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every instance of both laws whose words fit in the function's depth,
/// including the empty `α`.
pub fn check_conditions(func: &ExtendedEFunction) -> ConditionReport {
    let s = func.depth;
    let index = func.index();
    let at = |letters: &[Letter]| func.values[index.index(letters)];
    let mut report = ConditionReport { checked_up_to_length: s, ..Default::default() };
    if s < 2 {
        return report;
    }
    for alpha_len in 0..=s - 2 {
        for alpha in index.words(alpha_len) {
            for &e in &index.alphabet {
                let mut ae = alpha.clone();
                ae.push(e);
                let u = at(&ae);
                let mut aeu = ae.clone();
                aeu.push(u);
                report.instances_checked += 1;
                let found = at(&aeu);
                if found != e {
                    report.violations.push(LawViolation {
                        law: Law::Reflection,
                        alpha: Word::from_reduced(alpha.clone()).unwrap(),
                        e,
                        beta: None,
                        expected: e,
                        found,
                    });
                }
                for beta_len in 1..=s - 2 - alpha_len {
                    for beta in index.words(beta_len) {
                        let mut lhs = aeu.clone();
                        lhs.extend_from_slice(&beta);
                        let mut rhs = alpha.clone();
                        rhs.extend_from_slice(&beta);
                        report.instances_checked += 1;
                        let (found, expected) = (at(&lhs), at(&rhs));
                        if found != expected {
                            report.violations.push(LawViolation {
                                law: Law::Excision,
                                alpha: Word::from_reduced(alpha.clone()).unwrap(),
                                e,
                                beta: Some(Word::from_reduced(beta).unwrap()),
                                expected,
                                found,
                            });
                        }
                    }
                }
            }
        }
    }
    report
}

/// How new table entries are chosen by [`deepen`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeepenPolicy {
    /// Lowest-index allowed letter.
    LexMin,
    /// Uniform choice from a ChaCha8 stream seeded with the given value.
    Seeded(u64),
}

/// Appends tables up to depth `s`. No-op when `s <= depth`.
pub fn deepen(f: &PartialEFunction, s: usize, policy: DeepenPolicy) -> PartialEFunction {
    deepen_with(f, s, policy, &BTreeMap::new())
}

/// [`deepen`] with some new entries prescribed. Overrides whose word is not
/// in the relevant domain, or whose value has the wrong color, are ignored.
pub fn deepen_with(
    f: &PartialEFunction,
    s: usize,
    policy: DeepenPolicy,
    overrides: &BTreeMap<Word, Letter>,
) -> PartialEFunction {
    let mut out = f.clone();
    let mut rng = match policy {
        DeepenPolicy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        DeepenPolicy::LexMin => None,
    };
    while out.depth() < s {
        let level = out.depth() + 1;
        let domain = out.omega(level).expect("next level is always computable");
        let mut table = Table::new();
        for alpha in domain {
            let last = alpha.last().expect("nonempty");
            let choices = allowed_values(&f.sig, last);
            let value = match overrides.get(&alpha) {
                Some(&v) if color_ok(last, v) && f.sig.contains(v) => v,
                _ => match rng.as_mut() {
                    Some(rng) => choices[rng.random_range(0..choices.len())],
                    None => choices[0],
                },
            };
            table.insert(alpha, value);
        }
        out.tables.push(table);
    }
    out
}

/// Every partial E-function of depth `r`, in lexicographic order of their
/// value sequences (slots ordered by level, then word).
pub fn enumerate_pef(sig: &Signature, r: usize) -> Result<Vec<PartialEFunction>, EFuncError> {
    let mut current = vec![PartialEFunction::empty(*sig)];
    for level in 1..=r {
        let mut next = Vec::new();
        for f in &current {
            let domain = f.omega(level)?;
            let choices: Vec<Vec<Letter>> = domain
                .iter()
                .map(|alpha| allowed_values(sig, alpha.last().unwrap()))
                .collect();
            let count: u128 = choices.iter().map(|c| c.len() as u128).product();
            if next.len() as u128 + count > MAX_ENUMERATED_PEF as u128 {
                return Err(EFuncError::Cutoff(format!(
                    "more than {MAX_ENUMERATED_PEF} partial E-functions at depth {r}"
                )));
            }
            let mut digits = vec![0usize; domain.len()];
            loop {
                let table: Table = domain
                    .iter()
                    .zip(&digits)
                    .zip(&choices)
                    .map(|((alpha, &d), c)| (alpha.clone(), c[d]))
                    .collect();
                let mut g = f.clone();
                g.tables.push(table);
                next.push(g);
                // Odometer with the first slot most significant.
                let Some(k) = (0..digits.len()).rev().find(|&k| digits[k] + 1 < choices[k].len())
                else {
                    break;
                };
                digits[k] += 1;
                digits[k + 1..].iter_mut().for_each(|d| *d = 0);
            }
        }
        current = next;
    }
    Ok(current)
}

/// The depth-`2r` configuration with pattern C2 at the identity:
/// the identity together with `x_1^-1 f_1 ... x_k^-1` and
/// `x_1^-1 f_1 ... x_k^-1 f_k` for every `x_1..x_k ∈ Ω_k`, `k <= r`.
pub fn psi(f: &PartialEFunction) -> Configuration {
    let mut members = BTreeSet::from([Word::identity()]);
    for table in &f.tables {
        for (alpha, &v) in table {
            let open = f.path_word(alpha, false);
            members.insert(open.mul_letter(v));
            members.insert(open);
        }
    }
    Configuration::from_parts(f.sig, 2 * f.depth(), members)
}

/// Reads the partial E-function of depth `⌊L/2⌋` off a configuration with
/// pattern C2 at the identity.
pub fn phi(cfg: &Configuration) -> Result<PartialEFunction, EFuncError> {
    let sig = cfg.signature();
    let root = cfg.classify_pattern(&Word::identity())?;
    if cfg.depth() > 0 && root != Pattern::C2 {
        return Err(EFuncError::NotC2Rooted(root));
    }
    let r = cfg.depth() / 2;
    let letters = sig.positive_letters();
    let mut f = PartialEFunction::empty(sig);
    // Closed path words of the previous level, keyed by their E-word.
    let mut frontier: Vec<(Word, Word)> = vec![(Word::identity(), Word::identity())];
    for _ in 1..=r {
        let mut table = Table::new();
        let mut next = Vec::new();
        for (alpha, path) in &frontier {
            let excluded = path.last().filter(|l| l.is_positive());
            for &x in &letters {
                if Some(x) == excluded {
                    continue;
                }
                let open = path.mul_letter(x.inverse());
                if !cfg.contains(&open) {
                    return Err(EFuncError::MissingWitness(path.clone()));
                }
                let witnesses: Vec<Letter> = allowed_values(&sig, x)
                    .into_iter()
                    .filter(|&y| cfg.contains(&open.mul_letter(y)))
                    .collect();
                let [value] = witnesses[..] else {
                    return Err(EFuncError::MissingWitness(open));
                };
                let beta = push(alpha, x);
                table.insert(beta.clone(), value);
                next.push((beta, open.mul_letter(value)));
            }
        }
        f.tables.push(table);
        frontier = next;
    }
    Ok(f)
}

/// Whether `xi` lies in the basic open set of `f`: every word
/// `x_1^-1 f_1 ... x_r^-1 f_r` is a member.
pub fn in_basic_open(f: &PartialEFunction, xi: &Configuration) -> Result<bool, EFuncError> {
    let needed = 2 * f.depth();
    if xi.depth() < needed {
        return Err(EFuncError::InsufficientDepth { depth: xi.depth(), needed });
    }
    Ok(f.basic_open_words().iter().all(|w| xi.contains(w)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableEntry {
    pub alpha: String,
    pub value: String,
}

/// Wire format of a partial E-function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EFunctionJson {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub tables: Vec<TableEntry>,
}

impl From<&PartialEFunction> for EFunctionJson {
    fn from(f: &PartialEFunction) -> Self {
        EFunctionJson {
            n: f.sig.n,
            m: f.sig.m,
            r: f.depth(),
            tables: f
                .tables
                .iter()
                .flatten()
                .map(|(alpha, v)| TableEntry { alpha: alpha.to_string(), value: v.to_string() })
                .collect(),
        }
    }
}

impl TryFrom<EFunctionJson> for PartialEFunction {
    type Error = EFuncError;

    fn try_from(j: EFunctionJson) -> Result<Self, Self::Error> {
        let sig = Signature::new(j.m, j.n)?;
        let mut tables = vec![Table::new(); j.r];
        for entry in &j.tables {
            let alpha = Word::parse(&entry.alpha, &sig)?;
            if alpha.is_empty() || !alpha.letters().iter().all(|l| l.is_positive()) {
                return Err(EFuncError::NotPositive(alpha));
            }
            let value: Letter = entry.value.parse()?;
            if alpha.len() > j.r {
                return Err(EFuncError::LevelOutOfRange { level: alpha.len(), available: j.r });
            }
            tables[alpha.len() - 1].insert(alpha, value);
        }
        PartialEFunction::new(sig, tables)
    }
}

impl Serialize for PartialEFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        EFunctionJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartialEFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        PartialEFunction::try_from(EFunctionJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
