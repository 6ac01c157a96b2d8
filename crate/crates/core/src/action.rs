//! The action of alternating words `z_r^-1 x_r ... z_1^-1 x_1` directly on
//! partial E-functions, plus the configuration-translation oracle it must
//! agree with.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, Configuration};
use crate::efunc::{psi, EFuncError, PartialEFunction, Table};
use crate::freegroup::{Letter, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActError {
    #[error("{0} is not of the form z_r^-1 x_r ... z_1^-1 x_1")]
    NotAlternating(Word),
    #[error("word needs depth {needed} but the E-function has depth {available}")]
    DepthShortfall { needed: usize, available: usize },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    EFunc(#[from] EFuncError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// `pairs[i-1] = (z_i, x_i)`; index 1 is the rightmost pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternatingForm {
    pub pairs: Vec<(Letter, Letter)>,
}

impl AlternatingForm {
    pub fn r(&self) -> usize {
        self.pairs.len()
    }

    pub fn z(&self, i: usize) -> Letter {
        self.pairs[i - 1].0
    }

    pub fn x(&self, i: usize) -> Letter {
        self.pairs[i - 1].1
    }

    /// `z_i` has the family opposite to `x_i`.
    pub fn pair_compatible(&self, i: usize) -> bool {
        let (z, x) = self.pairs[i - 1];
        z.family != x.family
    }

    pub fn is_compatible(&self) -> bool {
        (1..=self.r()).all(|i| self.pair_compatible(i))
    }

    pub fn word(&self) -> Word {
        Word::reduce(self.pairs.iter().rev().flat_map(|&(z, x)| [z.inverse(), x]))
    }
}

/// Parses `g` as `z_r^-1 x_r ... z_1^-1 x_1` with positive `z_i`, `x_i`.
pub fn alternating_form(g: &Word) -> Option<AlternatingForm> {
    let letters = g.letters();
    if !letters.len().is_multiple_of(2) {
        return None;
    }
    let mut pairs = Vec::with_capacity(letters.len() / 2);
    for chunk in letters.chunks(2).rev() {
        let (z, x) = (chunk[0], chunk[1]);
        if z.is_positive() || !x.is_positive() {
            return None;
        }
        pairs.push((z.positive(), x));
    }
    Some(AlternatingForm { pairs })
}

/// Whether `f_i(x_1..x_i) = z_i` for every `i <= r`.
pub fn in_action_domain(form: &AlternatingForm, f: &PartialEFunction) -> bool {
    let mut prefix = Vec::with_capacity(form.r());
    (1..=form.r()).all(|i| {
        prefix.push(form.x(i));
        let w = Word::from_reduced(prefix.clone()).expect("positive words are reduced");
        f.get(&w) == Some(form.z(i))
    })
}

/// Image of `f` under `g`, of depth `depth(f) - r_g`. `Ok(None)` when `f` is
/// outside the domain of `g`, in particular whenever some pair of `g` is
/// incompatible.
///
/// For a word `w` of length `k` let `p` count its leading letters matching
/// `z_r, z_{r-1}, ...`. If `p = k` the value is `x_{r-k+1}`; otherwise it is
/// `f(x_1..x_{r-p} w_{p+1}..w_k)`.
pub fn act(g: &Word, f: &PartialEFunction) -> Result<Option<PartialEFunction>, ActError> {
    f.signature().check_word(g)?;
    let form = alternating_form(g).ok_or_else(|| ActError::NotAlternating(g.clone()))?;
    let r = form.r();
    if r > f.depth() {
        return Err(ActError::DepthShortfall { needed: r, available: f.depth() });
    }
    if !form.is_compatible() || !in_action_domain(&form, f) {
        return Ok(None);
    }
    let mut h = PartialEFunction::empty(f.signature());
    for k in 1..=f.depth() - r {
        let mut table = Table::new();
        for w in h.omega(k)? {
            let letters = w.letters();
            let p = (0..k.min(r)).take_while(|&j| letters[j] == form.z(r - j)).count();
            let value = if p == k {
                form.x(r - k + 1)
            } else {
                let source: Vec<Letter> =
                    (1..=r - p).map(|i| form.x(i)).chain(letters[p..].iter().copied()).collect();
                let source = Word::from_reduced(source).expect("positive words are reduced");
                f.get(&source).expect("source word lies in the table domain")
            };
            table.insert(w, value);
        }
        h = push_table(h, table);
    }
    Ok(Some(h))
}

fn push_table(h: PartialEFunction, table: Table) -> PartialEFunction {
    let mut tables = h.tables().to_vec();
    tables.push(table);
    PartialEFunction::from_tables_unchecked(h.signature(), tables)
}

/// `g · psi(f)` computed by translating configurations.
pub fn act_oracle(g: &Word, f: &PartialEFunction) -> Result<Configuration, ActError> {
    Ok(psi(f).translate(g)?)
}
