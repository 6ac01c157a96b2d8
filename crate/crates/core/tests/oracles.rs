//! Brute-force enumerators checked against the library's counts.

use std::collections::BTreeSet;

use mnshift_core::config::{enumerate_omega, Configuration, Pattern};
use mnshift_core::efunc::{enumerate_pef, PartialEFunction};
use mnshift_core::freegroup::{ball, ball_size, Letter, Signature, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sig(m: usize, n: usize) -> Signature {
    Signature::new(m, n).unwrap()
}

/// Every letter sequence of length <= radius, reduced, deduplicated.
fn brute_ball(sig: &Signature, radius: usize) -> BTreeSet<Word> {
    let letters = sig.letters();
    let mut seqs: Vec<Vec<Letter>> = vec![vec![]];
    let mut out = BTreeSet::from([Word::identity()]);
    for _ in 0..radius {
        seqs = seqs
            .iter()
            .flat_map(|s| letters.iter().map(move |&l| [s.clone(), vec![l]].concat()))
            .collect();
        out.extend(seqs.iter().map(|s| Word::reduce(s.iter().copied())));
    }
    out
}

#[test]
fn ball_matches_brute_force() {
    for (m, n, r) in [(2, 2, 3), (1, 1, 4), (1, 2, 3), (2, 3, 2)] {
        let s = sig(m, n);
        let brute = brute_ball(&s, r);
        let fast = ball(&s, r);
        assert_eq!(fast.len(), brute.len());
        assert_eq!(fast.iter().cloned().collect::<BTreeSet<_>>(), brute);
        assert_eq!(ball_size(&s, r), brute.len() as u128);
    }
    assert_eq!(brute_ball(&sig(2, 2), 3).len(), 457);
}

fn positive_words(sig: &Signature, len: usize) -> Vec<Vec<Letter>> {
    let letters = sig.positive_letters();
    (0..len).fold(vec![vec![]], |acc, _| {
        acc.iter().flat_map(|w| letters.iter().map(move |&l| [w.clone(), vec![l]].concat())).collect()
    })
}

/// Words `x_1..x_k` with `x_{i+1} != f(x_1..x_i)` for every `i`, by filtering
/// all positive words.
fn brute_omega(f: &PartialEFunction, k: usize) -> usize {
    positive_words(&f.signature(), k)
        .into_iter()
        .filter(|w| {
            (1..w.len()).all(|i| f.get(&Word::from_reduced(w[..i].to_vec()).unwrap()) != Some(w[i]))
        })
        .count()
}

#[test]
fn omega_sizes_match_brute_force() {
    for (m, n, expected) in [(2, 2, 12), (2, 3, 20)] {
        let s = sig(m, n);
        for f in enumerate_pef(&s, 1).unwrap().iter().take(8) {
            assert_eq!(brute_omega(f, 2), expected);
            assert_eq!(f.omega(2).unwrap().len(), expected);
        }
    }
}

/// Product over domain words of the number of admissible values. A word
/// ending in an `a`-letter takes one of `m` values and continues with
/// `n` `a`-letters and `m - 1` `b`-letters; symmetrically for `b`.
fn pef_count(sig: &Signature, r: usize) -> u128 {
    let (n, m) = (sig.n as u128, sig.m as u128);
    let (mut ends_a, mut ends_b) = (n, m);
    let mut total = 1u128;
    for _ in 0..r {
        total *= m.pow(ends_a as u32) * n.pow(ends_b as u32);
        (ends_a, ends_b) = (ends_a * n + ends_b * (n - 1), ends_a * (m - 1) + ends_b * m);
    }
    total
}

#[test]
fn pef_counts_match_product_formula() {
    assert_eq!(pef_count(&sig(2, 2), 1), 16);
    assert_eq!(pef_count(&sig(2, 2), 2), 65536);
    assert_eq!(pef_count(&sig(1, 1), 1), 1);
    for (m, n, r) in [(2, 2, 1), (2, 2, 2), (1, 1, 1), (1, 1, 3), (1, 2, 2), (2, 3, 1)] {
        let s = sig(m, n);
        assert_eq!(enumerate_pef(&s, r).unwrap().len() as u128, pef_count(&s, r), "({m},{n}) r={r}");
    }
}

/// Independent membership test: identity, prefix closure and the two local
/// patterns, written directly from the definitions.
fn is_configuration(sig: &Signature, depth: usize, members: &BTreeSet<Word>) -> bool {
    if !members.contains(&Word::identity()) {
        return false;
    }
    for g in members {
        if let Some(parent) = g.parent() {
            if !members.contains(&parent) {
                return false;
            }
        }
        if g.len() + 1 > depth {
            continue;
        }
        let has = |l: Letter| members.contains(&g.mul_letter(l));
        let a_pos = (1..=sig.n).filter(|&i| has(Letter::a(i))).count();
        let b_pos = (1..=sig.m).filter(|&j| has(Letter::b(j))).count();
        let inv = sig.positive_letters().into_iter().filter(|&l| has(l.inverse())).count();
        let c1 = a_pos == 1 && b_pos == 1 && inv == 0;
        let c2 = a_pos == 0 && b_pos == 0 && inv == sig.n + sig.m;
        if !(c1 || c2) {
            return false;
        }
    }
    true
}

fn exhaustive_subsets(s: Signature, depth: usize) {
    let words = ball(&s, depth);
    let rest: Vec<&Word> = words.iter().filter(|w| !w.is_identity()).collect();
    let mut found = BTreeSet::new();
    for mask in 0u64..(1 << rest.len()) {
        let mut members = BTreeSet::from([Word::identity()]);
        members.extend(rest.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, w)| (*w).clone()));
        let cfg = Configuration::new(s, depth, members.iter().cloned()).unwrap();
        let brute = is_configuration(&s, depth, &members);
        assert_eq!(cfg.validate().is_clean(), brute, "{members:?}");
        if brute {
            found.insert(members);
        }
    }
    let enumerated: BTreeSet<BTreeSet<Word>> =
        enumerate_omega(&s, depth).unwrap().into_iter().map(|c| c.members().clone()).collect();
    assert_eq!(enumerated, found);
}

#[test]
fn configurations_exhaustive_small() {
    exhaustive_subsets(sig(2, 2), 1);
    exhaustive_subsets(sig(1, 1), 2);
    assert_eq!(enumerate_omega(&sig(2, 2), 1).unwrap().len(), 5);
}

#[test]
fn configurations_sampled_depth_two() {
    let s = sig(2, 2);
    let words = ball(&s, 2);
    let enumerated: BTreeSet<BTreeSet<Word>> =
        enumerate_omega(&s, 2).unwrap().into_iter().map(|c| c.members().clone()).collect();
    assert_eq!(enumerated.len(), 20);
    for members in &enumerated {
        assert!(is_configuration(&s, 2, members));
    }
    // Enumerated configurations with one or two memberships flipped, plus
    // random prefix-closed subsets.
    let base: Vec<&BTreeSet<Word>> = enumerated.iter().collect();
    let rest: Vec<&Word> = words.iter().filter(|w| !w.is_identity()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut hits = 0;
    for round in 0..20000 {
        let mut members = BTreeSet::from([Word::identity()]);
        if round % 2 == 0 {
            members = base[rng.random_range(0..base.len())].clone();
            for _ in 0..rng.random_range(0..=2) {
                let w = rest[rng.random_range(0..rest.len())];
                if !members.remove(w) {
                    members.insert(w.clone());
                }
            }
        } else {
            for w in &rest {
                if members.contains(&w.parent().unwrap()) && rng.random_bool(0.4) {
                    members.insert((*w).clone());
                }
            }
        }
        let brute = is_configuration(&s, 2, &members);
        let cfg = Configuration::new(s, 2, members.iter().cloned()).unwrap();
        assert_eq!(cfg.validate().is_clean(), brute);
        assert_eq!(enumerated.contains(&members), brute);
        hits += brute as usize;
    }
    assert!(hits > 0);
}

#[test]
fn omega_split_by_root_pattern() {
    let s = sig(2, 2);
    let all = enumerate_omega(&s, 2).unwrap();
    let c2 = all.iter().filter(|c| c.classify_pattern(&Word::identity()).unwrap() == Pattern::C2).count();
    assert_eq!((c2, all.len() - c2), (16, 4));
}
