//! Freeness certificates, isotropy witnesses and depth-limited orbits.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{act, alternating_form, ActError, AlternatingForm};
use crate::config::{enumerate_omega, ConfigError, Configuration, Pattern};
use crate::efunc::{deepen_with, enumerate_pef, DeepenPolicy, EFuncError, PartialEFunction};
use crate::freegroup::{ball, f2_image, Family, Letter, Signature, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("freeness needs m, n >= 2, got m={m} n={n}")]
    SmallSignature { m: usize, n: usize },
    #[error("the identity has no freeness row")]
    Identity,
    #[error("configuration does not have pattern C2 at the identity")]
    NotC2Rooted,
    #[error("chain element {0} has no unique a-letter continuation")]
    ChainBroken(Word),
    #[error("chain of length {requested} needs depth {needed}, configuration has {available}")]
    DepthExhausted { requested: usize, needed: usize, available: usize },
    #[error("no repeat along the b{j} chain within depth {depth}")]
    NoRepeatWithinDepth { j: usize, depth: usize },
    #[error("witness failed to verify for {g}: {detail}")]
    Verification { g: Word, detail: String },
    #[error(transparent)]
    Act(#[from] ActError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    EFunc(#[from] EFuncError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// How a word is brought to the form handled by the direct action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum WordClass {
    /// `z_r^-1 x_r ... z_1^-1 x_1`.
    Direct,
    /// `x_r z_{r-1}^-1 ... x_1 z_0^-1`, handled through `z_0^-1 g z_0` on the
    /// cylinder `z_0 · U_f`.
    Conjugated { z0: Letter, conjugate: Word },
    /// Odd length: patterns at the identity flip, so nothing is fixed.
    OddLength,
    /// Even length but not sign-alternating in either orientation.
    NotAlternating,
}

pub fn classify_word(g: &Word) -> WordClass {
    if g.len() % 2 == 1 {
        return WordClass::OddLength;
    }
    if alternating_form(g).is_some() {
        return WordClass::Direct;
    }
    let sign_alternates = g.letters().iter().enumerate().all(|(i, l)| l.is_positive() == (i % 2 == 0));
    if !sign_alternates {
        return WordClass::NotAlternating;
    }
    let z0 = g.last().expect("nonempty").positive();
    let conjugate = Word::letter(z0.inverse()).mul(g).mul_letter(z0);
    WordClass::Conjugated { z0, conjugate }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EmptyBasis {
    /// No configuration contains `g^-1`: the word is not sign-alternating.
    NotAlternating,
    /// Some `z_i` has the family of `x_i`.
    Incompatible,
    /// `f_i(x_1..x_i) != z_i` already within the known tables.
    DomainCondition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessKind {
    /// The slot `z_r..z_1 y_1..y_{t+1}` is set to a value the image cannot take.
    Recipe,
    /// `f_k(z_r..z_{r-k+1}) != x_{r-k+1}` already, so every extension in the
    /// domain is moved.
    RangeMismatch,
}

/// First entry, in (level, word) order, where the image differs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divergence {
    pub word: Word,
    pub original: Letter,
    pub image: Letter,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowOutcome {
    Witness {
        kind: WitnessKind,
        extension: PartialEFunction,
        slot: Option<Word>,
        divergence: Divergence,
    },
    EmptyDomain(EmptyBasis),
    /// Odd length: `g` moves every point of its domain.
    NoFixedPoint,
}

fn check_signature(sig: &Signature) -> Result<(), AnalysisError> {
    if sig.m < 2 || sig.n < 2 {
        return Err(AnalysisError::SmallSignature { m: sig.m, n: sig.n });
    }
    Ok(())
}

fn positive_word(letters: &[Letter]) -> Word {
    Word::from_reduced(letters.to_vec()).expect("positive words are reduced")
}

fn first_divergence(f: &PartialEFunction, h: &PartialEFunction) -> Option<Divergence> {
    h.tables().iter().zip(f.tables()).find_map(|(ht, ft)| {
        ht.iter().find_map(|(w, &image)| match ft.get(w) {
            Some(&original) if original == image => None,
            Some(&original) => Some(Divergence { word: w.clone(), original, image }),
            // A word in the image domain but not in f's differs at an
            // earlier level, which was reported first.
            None => None,
        })
    })
}

/// A partial E-function extending `f` that `g` acts on and moves, or the
/// reason none is needed. `g` must be nonidentity.
pub fn freeness_witness(g: &Word, f: &PartialEFunction) -> Result<RowOutcome, AnalysisError> {
    let sig = f.signature();
    check_signature(&sig)?;
    sig.check_word(g)?;
    if g.is_identity() {
        return Err(AnalysisError::Identity);
    }
    let acting = match classify_word(g) {
        WordClass::OddLength => return Ok(RowOutcome::NoFixedPoint),
        WordClass::NotAlternating => return Ok(RowOutcome::EmptyDomain(EmptyBasis::NotAlternating)),
        WordClass::Direct => g.clone(),
        WordClass::Conjugated { conjugate, .. } => conjugate,
    };
    let form = alternating_form(&acting).expect("classified as alternating");
    witness_for_form(&acting, &form, f)
}

fn witness_for_form(
    acting: &Word,
    form: &AlternatingForm,
    f: &PartialEFunction,
) -> Result<RowOutcome, AnalysisError> {
    if !form.is_compatible() {
        return Ok(RowOutcome::EmptyDomain(EmptyBasis::Incompatible));
    }
    let r = form.r();
    let xs: Vec<Letter> = (1..=r).map(|i| form.x(i)).collect();
    let zs_outer: Vec<Letter> = (1..=r).rev().map(|i| form.z(i)).collect();
    let mut overrides = BTreeMap::new();
    for i in 1..=r {
        let prefix = positive_word(&xs[..i]);
        match f.get(&prefix) {
            Some(v) if v != form.z(i) => return Ok(RowOutcome::EmptyDomain(EmptyBasis::DomainCondition)),
            _ => {}
        }
        overrides.insert(prefix, form.z(i));
    }
    let s0 = f.depth().max(r + 1);
    let base = deepen_with(f, s0, DeepenPolicy::LexMin, &overrides);

    // Range condition along z_r, z_{r-1}, ...
    let mismatch = (1..=r).any(|k| base.get(&positive_word(&zs_outer[..k])) != Some(form.x(r - k + 1)));
    let (kind, slot) = if mismatch {
        (WitnessKind::RangeMismatch, None)
    } else {
        let t = s0 - r;
        let letters = f.signature().positive_letters();
        let mut path = zs_outer.clone();
        let mut ys: Vec<Letter> = Vec::with_capacity(t + 1);
        for j in 1..=t + 1 {
            let along = base.get(&positive_word(&path)).expect("path stays in the domain");
            let own = (j > 1).then(|| base.get(&positive_word(&ys)).expect("ys stay in the domain"));
            let y = *letters
                .iter()
                .find(|&&y| y != along && Some(y) != own)
                .expect("at least four letters");
            ys.push(y);
            path.push(y);
        }
        let y_last = *ys.last().unwrap();
        let avoid = base.get(&positive_word(&ys)).expect("ys stay in the domain");
        let fam = y_last.family.other();
        let u = (1..=f.signature().family_size(fam))
            .map(|i| Letter::new(fam, i, false))
            .find(|&u| u != avoid)
            .expect("two letters per family");
        let slot = positive_word(&path);
        overrides.insert(slot.clone(), u);
        (WitnessKind::Recipe, Some(slot))
    };
    let extension = deepen_with(&base, s0 + 1 + r, DeepenPolicy::LexMin, &overrides);
    let fail = |detail: &str| AnalysisError::Verification { g: acting.clone(), detail: detail.into() };
    let image = act(acting, &extension)?.ok_or_else(|| fail("extension is outside the domain"))?;
    let divergence = first_divergence(&extension, &image).ok_or_else(|| fail("image equals extension"))?;
    if let Some(slot) = &slot {
        if image.get(slot) == extension.get(slot) {
            return Err(fail("recipe slot is not moved"));
        }
    }
    Ok(RowOutcome::Witness { kind, extension, slot, divergence })
}

/// One `(g, f)` pair of a certificate; `function` indexes the enumeration of
/// depth-`s` partial E-functions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Row {
    pub g: Word,
    pub function: usize,
    pub outcome: RowOutcome,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordSummary {
    pub g: Word,
    pub class: Option<WordClass>,
    pub recipe_witnesses: usize,
    pub range_mismatch_witnesses: usize,
    pub empty_domain: BTreeMap<EmptyBasis, usize>,
    pub no_fixed_point: usize,
    pub failures: usize,
}

impl WordSummary {
    fn rows(&self) -> usize {
        self.recipe_witnesses
            + self.range_mismatch_witnesses
            + self.empty_domain.values().sum::<usize>()
            + self.no_fixed_point
            + self.failures
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowFailure {
    pub g: Word,
    pub function: usize,
    pub error: String,
}

/// Exhaustive check that word-level classifications agree with the
/// enumerated configurations of depth `depth`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainCheck {
    pub depth: usize,
    pub configurations: usize,
    /// Words classified with an empty domain (for conjugated words, the
    /// conjugate's domain) that some configuration nevertheless meets.
    pub nonempty_domains: Vec<Word>,
    /// Odd words that fix some configuration at residual depth >= 1.
    pub parity_fixed: Vec<Word>,
}

impl DomainCheck {
    pub fn is_clean(&self) -> bool {
        self.nonempty_domains.is_empty() && self.parity_fixed.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessCertificate {
    pub n: usize,
    pub m: usize,
    pub max_word: usize,
    pub open_depth: usize,
    pub functions: usize,
    pub rows: usize,
    pub certified: usize,
    pub words: Vec<WordSummary>,
    pub failures: Vec<RowFailure>,
    /// `None` when the configuration enumeration exceeds its cutoff.
    pub domain_check: Option<DomainCheck>,
}

impl FreenessCertificate {
    pub fn is_certified(&self) -> bool {
        self.failures.is_empty()
            && self.certified == self.rows
            && self.domain_check.as_ref().is_none_or(DomainCheck::is_clean)
    }
}

/// [`certify_freeness_with`] without a row visitor.
pub fn certify_freeness(sig: &Signature, max_word: usize, open_depth: usize) -> Result<FreenessCertificate, AnalysisError> {
    certify_freeness_with(sig, max_word, open_depth, |_| {})
}

/// One row per nonidentity `g` with `|g| <= max_word` and per partial
/// E-function of depth `open_depth`. Rows are passed to `visit` as they are
/// produced, possibly from several threads; the returned summary is
/// deterministic.
pub fn certify_freeness_with<V>(
    sig: &Signature,
    max_word: usize,
    open_depth: usize,
    visit: V,
) -> Result<FreenessCertificate, AnalysisError>
where
    V: Fn(&Row) + Sync,
{
    check_signature(sig)?;
    let words: Vec<Word> = ball(sig, max_word).into_iter().filter(|g| !g.is_identity()).collect();
    let functions = if words.is_empty() { Vec::new() } else { enumerate_pef(sig, open_depth)? };
    let word_summaries: Vec<(WordSummary, Vec<RowFailure>)> = words
        .iter()
        .map(|g| {
            let class = classify_word(g);
            let per_function = !matches!(class, WordClass::OddLength | WordClass::NotAlternating);
            let mut summary = WordSummary { g: g.clone(), class: Some(class), ..Default::default() };
            let outcomes: Vec<(usize, Result<RowOutcome, AnalysisError>)> = if per_function {
                functions.par_iter().enumerate().map(|(i, f)| (i, freeness_witness(g, f))).collect()
            } else {
                // The outcome does not depend on f.
                let outcome = freeness_witness(g, &PartialEFunction::empty(*sig));
                (0..functions.len()).map(|i| (i, outcome.clone())).collect()
            };
            let mut failures = Vec::new();
            for (i, outcome) in outcomes {
                match outcome {
                    Ok(outcome) => {
                        match &outcome {
                            RowOutcome::Witness { kind: WitnessKind::Recipe, .. } => summary.recipe_witnesses += 1,
                            RowOutcome::Witness { kind: WitnessKind::RangeMismatch, .. } => {
                                summary.range_mismatch_witnesses += 1
                            }
                            RowOutcome::EmptyDomain(b) => *summary.empty_domain.entry(*b).or_default() += 1,
                            RowOutcome::NoFixedPoint => summary.no_fixed_point += 1,
                        }
                        visit(&Row { g: g.clone(), function: i, outcome });
                    }
                    Err(e) => {
                        summary.failures += 1;
                        failures.push(RowFailure { g: g.clone(), function: i, error: e.to_string() });
                    }
                }
            }
            (summary, failures)
        })
        .collect();
    let rows = word_summaries.iter().map(|(s, _)| s.rows()).sum();
    let failures: Vec<RowFailure> = word_summaries.iter().flat_map(|(_, f)| f.clone()).collect();
    let words: Vec<WordSummary> = word_summaries.into_iter().map(|(s, _)| s).collect();
    let domain_check = if max_word == 0 { None } else { domain_check(sig, &words, max_word)? };
    Ok(FreenessCertificate {
        n: sig.n,
        m: sig.m,
        max_word,
        open_depth,
        functions: functions.len(),
        rows,
        certified: rows - failures.len(),
        words,
        failures,
        domain_check,
    })
}

fn domain_check(sig: &Signature, words: &[WordSummary], depth: usize) -> Result<Option<DomainCheck>, AnalysisError> {
    let configs = match enumerate_omega(sig, depth) {
        Ok(c) => c,
        Err(ConfigError::Cutoff(_)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut nonempty_domains = Vec::new();
    let mut parity_fixed = Vec::new();
    for summary in words {
        let g = &summary.g;
        let claims_empty = summary.empty_domain.contains_key(&EmptyBasis::NotAlternating)
            || summary.empty_domain.contains_key(&EmptyBasis::Incompatible);
        // Conjugated rows speak about z0^-1 g z0 on z0^-1-translates.
        let acting = match &summary.class {
            Some(WordClass::Conjugated { conjugate, .. }) => conjugate,
            _ => g,
        };
        if claims_empty && configs.iter().any(|c| acting.len() <= c.depth() && c.contains(&acting.inverse())) {
            nonempty_domains.push(g.clone());
        }
        if summary.no_fixed_point > 0 && g.len() < depth {
            for c in &configs {
                if c.contains(&g.inverse()) {
                    let moved = c.translate(g)?;
                    let id = Word::identity();
                    if same_root_kind(&moved.classify_pattern(&id)?, &c.classify_pattern(&id)?) {
                        parity_fixed.push(g.clone());
                        break;
                    }
                }
            }
        }
    }
    Ok(Some(DomainCheck { depth, configurations: configs.len(), nonempty_domains, parity_fixed }))
}

fn same_root_kind(a: &Pattern, b: &Pattern) -> bool {
    matches!((a, b), (Pattern::C1 { .. }, Pattern::C1 { .. }) | (Pattern::C2, Pattern::C2))
}

/// `g_k = b_j^-1 a_{i_1} ... b_j^-1 a_{i_k}` for `k = 1..=count`, each `a_{i_k}`
/// the unique `a`-letter continuing the path inside `xi`.
pub fn isotropy_chain(xi: &Configuration, j: usize, count: usize) -> Result<Vec<Word>, AnalysisError> {
    let id = Word::identity();
    if xi.depth() == 0 || xi.classify_pattern(&id)? != Pattern::C2 {
        return Err(AnalysisError::NotC2Rooted);
    }
    let bj = Letter::b(j);
    xi.signature().check(bj)?;
    if 2 * count > xi.depth() {
        return Err(AnalysisError::DepthExhausted { requested: count, needed: 2 * count, available: xi.depth() });
    }
    let a_letters: Vec<Letter> = (1..=xi.signature().n).map(Letter::a).collect();
    let mut chain = Vec::with_capacity(count);
    let mut current = id;
    for _ in 0..count {
        let open = current.mul_letter(bj.inverse());
        if !xi.contains(&open) {
            return Err(AnalysisError::ChainBroken(current));
        }
        let next: Vec<Word> = a_letters
            .iter()
            .map(|&a| open.mul_letter(a))
            .filter(|w| w.len() == open.len() + 1 && xi.contains(w))
            .collect();
        let [next] = &next[..] else {
            return Err(AnalysisError::ChainBroken(open));
        };
        current = next.clone();
        chain.push(current.clone());
    }
    Ok(chain)
}

/// `x · xi` agrees with `xi` on the ball of radius `depth - |x|`.
pub fn depth_isotropy_check(x: &Word, xi: &Configuration, depth: usize) -> Result<bool, AnalysisError> {
    if depth > xi.depth() {
        return Err(ConfigError::DepthTooLarge { requested: depth, available: xi.depth() }.into());
    }
    if x.len() > depth {
        return Err(ConfigError::InsufficientDepth { word: x.clone(), needed: x.len(), depth }.into());
    }
    let moved = xi.translate(x)?;
    Ok(moved.equal_at_depth(xi, depth - x.len())?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRepeat {
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub element: Word,
    pub f2_image: Word,
    pub power: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotropyWitness {
    pub depth: usize,
    pub x: ChainRepeat,
    pub y: ChainRepeat,
}

fn chain_repeat(xi: &Configuration, j: usize) -> Result<ChainRepeat, AnalysisError> {
    let depth = xi.depth();
    let chain = isotropy_chain(xi, j, depth / 2)?;
    let translates: Vec<Configuration> =
        chain.iter().map(|g| xi.translate(&g.inverse())).collect::<Result<_, _>>()?;
    for l in 1..chain.len() {
        for k in 0..l {
            let residual = translates[l].depth();
            if !translates[k].equal_at_depth(&translates[l], residual)? {
                continue;
            }
            let element = chain[k].mul(&chain[l].inverse());
            if element.len() >= depth || !depth_isotropy_check(&element, xi, depth)? {
                continue;
            }
            let image = f2_image(&element, &xi.signature())?;
            let Some((letter, power)) = image.as_generator_power() else {
                continue;
            };
            if letter != Letter::c(j) || power == 0 {
                continue;
            }
            return Ok(ChainRepeat { j, k: k + 1, l: l + 1, element, f2_image: image, power });
        }
    }
    Err(AnalysisError::NoRepeatWithinDepth { j, depth })
}

/// Elements `x`, `y` of the depth-certified isotropy of `xi` mapping to
/// nontrivial powers of `c1` and `c2`.
pub fn free_subgroup_witness(xi: &Configuration) -> Result<IsotropyWitness, AnalysisError> {
    check_signature(&xi.signature())?;
    Ok(IsotropyWitness { depth: xi.depth(), x: chain_repeat(xi, 1)?, y: chain_repeat(xi, 2)? })
}

/// A class of orbit points: the words reaching one configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitEntry {
    pub words: Vec<Word>,
    pub configuration: Configuration,
}

/// `(g, g · xi)` for every `g` with `|g| <= max_len` acting on `xi`, with
/// equal configurations of equal residual depth merged.
pub fn orbit(xi: &Configuration, max_len: usize) -> Result<Vec<OrbitEntry>, AnalysisError> {
    if max_len > xi.depth() {
        return Err(ConfigError::DepthTooLarge { requested: max_len, available: xi.depth() }.into());
    }
    let mut entries: Vec<OrbitEntry> = Vec::new();
    let mut index: BTreeMap<(usize, Vec<Word>), usize> = BTreeMap::new();
    for member in xi.members().iter().take_while(|w| w.len() <= max_len) {
        let g = member.inverse();
        let moved = xi.translate(&g)?;
        let key = (moved.depth(), moved.members().iter().cloned().collect());
        match index.get(&key) {
            Some(&i) => entries[i].words.push(g),
            None => {
                index.insert(key, entries.len());
                entries.push(OrbitEntry { words: vec![g], configuration: moved });
            }
        }
    }
    for e in &mut entries {
        e.words.sort();
    }
    Ok(entries)
}

/// Letters of `family` in increasing index.
pub fn family_letters(sig: &Signature, family: Family) -> Vec<Letter> {
    (1..=sig.family_size(family)).map(|i| Letter::new(family, i, false)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efunc::{deepen, psi};
    use crate::model::{fixed_point, gamma};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn sig22() -> Signature {
        Signature::new(2, 2).unwrap()
    }

    fn lexmin_with_b1() -> PartialEFunction {
        let f = deepen(&PartialEFunction::empty(sig22()), 2, DeepenPolicy::LexMin);
        assert_eq!(f.get(&w("a1")), Some(Letter::b(1)));
        f
    }

    #[test]
    fn classification() {
        assert_eq!(classify_word(&w("b1^-1 a1")), WordClass::Direct);
        assert_eq!(classify_word(&w("a1")), WordClass::OddLength);
        assert_eq!(classify_word(&w("a1 a2")), WordClass::NotAlternating);
        assert_eq!(
            classify_word(&w("a1 b1^-1")),
            WordClass::Conjugated { z0: Letter::b(1), conjugate: w("b1^-1 a1") }
        );
        assert_eq!(
            classify_word(&w("b1 a2^-1 b2 a1^-1")),
            WordClass::Conjugated { z0: Letter::a(1), conjugate: w("a1^-1 b1 a2^-1 b2") }
        );
    }

    #[test]
    fn recipe_witness() {
        let f = lexmin_with_b1();
        let outcome = freeness_witness(&w("b1^-1 a1"), &f).unwrap();
        let RowOutcome::Witness { kind, extension, slot, divergence } = outcome else {
            panic!("expected witness");
        };
        assert_eq!(kind, WitnessKind::Recipe);
        assert!(extension.extends(&f));
        assert_eq!(extension.depth(), 4);
        let slot = slot.unwrap();
        assert_eq!(slot.len(), 3);
        assert_eq!(slot.first(), Some(Letter::b(1)));
        let image = act(&w("b1^-1 a1"), &extension).unwrap().unwrap();
        assert_ne!(image.get(&slot), extension.get(&slot));
        assert_ne!(image.get(&divergence.word), extension.get(&divergence.word));
    }

    #[test]
    fn empty_domains() {
        let f = lexmin_with_b1();
        assert_eq!(
            freeness_witness(&w("a1^-1 a2"), &f).unwrap(),
            RowOutcome::EmptyDomain(EmptyBasis::Incompatible)
        );
        assert_eq!(
            freeness_witness(&w("b2^-1 a1"), &f).unwrap(),
            RowOutcome::EmptyDomain(EmptyBasis::DomainCondition)
        );
        assert_eq!(freeness_witness(&w("a1 a1"), &f).unwrap(), RowOutcome::EmptyDomain(EmptyBasis::NotAlternating));
        assert_eq!(freeness_witness(&w("a1"), &f).unwrap(), RowOutcome::NoFixedPoint);
        assert_eq!(freeness_witness(&Word::identity(), &f), Err(AnalysisError::Identity));
        let small = PartialEFunction::empty(Signature::new(1, 2).unwrap());
        assert!(matches!(freeness_witness(&w("b1^-1 a1"), &small), Err(AnalysisError::SmallSignature { .. })));
    }

    #[test]
    fn small_certificate() {
        let cert = certify_freeness(&sig22(), 2, 1).unwrap();
        assert_eq!(cert.functions, 16);
        assert_eq!(cert.rows, 16 * 64);
        assert!(cert.is_certified(), "{:?} {:?}", cert.failures, cert.domain_check);
        assert!(cert.domain_check.as_ref().unwrap().is_clean());
        let empty = certify_freeness(&sig22(), 0, 1).unwrap();
        assert_eq!(empty.rows, 0);
        assert!(empty.is_certified());
    }

    #[test]
    fn fixed_point_isotropy() {
        let xi = gamma(&fixed_point(sig22(), 8).unwrap(), 8).unwrap();
        assert!(depth_isotropy_check(&Word::identity(), &xi, 8).unwrap());
        assert!(depth_isotropy_check(&w("b1^-1 a1"), &xi, 8).unwrap());
        assert!(!depth_isotropy_check(&w("a1"), &xi, 8).unwrap());
        let chain = isotropy_chain(&xi, 1, 3).unwrap();
        assert_eq!(chain, vec![w("b1^-1 a1"), w("b1^-1 a1 b1^-1 a1"), w("b1^-1 a1 b1^-1 a1 b1^-1 a1")]);
        let chain2 = isotropy_chain(&xi, 2, 2).unwrap();
        assert_eq!(chain2, vec![w("b2^-1 a2"), w("b2^-1 a2 b2^-1 a2")]);
        assert!(matches!(isotropy_chain(&xi, 1, 5), Err(AnalysisError::DepthExhausted { .. })));
        let witness = free_subgroup_witness(&xi).unwrap();
        assert_eq!(witness.x.f2_image.as_generator_power().unwrap().0, Letter::c(1));
        assert_eq!(witness.y.f2_image.as_generator_power().unwrap().0, Letter::c(2));
    }

    #[test]
    fn isotropy_on_psi() {
        let f = deepen(&PartialEFunction::empty(sig22()), 3, DeepenPolicy::Seeded(5));
        let xi = psi(&f);
        let chain = isotropy_chain(&xi, 1, 3).unwrap();
        assert_eq!(chain.len(), 3);
        assert!(matches!(isotropy_chain(&gamma(&crate::model::ModelPoint::x(sig22(), 1, vec![1; 4]).unwrap(), 4).unwrap(), 1, 1), Err(AnalysisError::NotC2Rooted)));
    }

    #[test]
    fn orbit_examples() {
        let xi = gamma(&fixed_point(sig22(), 6).unwrap(), 6).unwrap();
        let zero = orbit(&xi, 0).unwrap();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[0].words, vec![Word::identity()]);
        let two = orbit(&xi, 2).unwrap();
        assert!(two.iter().any(|e| e.words.contains(&w("a1")) && e.words.contains(&w("b1"))));
        let total: usize = two.iter().map(|e| e.words.len()).sum();
        assert!(total <= 1 + 8 + 8 * 7);
    }
}
