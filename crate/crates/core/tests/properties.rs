use mnshift_core::config::Configuration;
use mnshift_core::efunc::{
    check_conditions, deepen, extend_forced, phi, psi, DeepenPolicy, PartialEFunction,
};
use mnshift_core::freegroup::{f2_image, Letter, Signature, Word};
use mnshift_core::matrep::{
    check_r, is_partial_isometry, tame_check, theta_family, trace_obstruction, ComplexMatrix,
    PartialIsometrySet, TameResult,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn sig22() -> Signature {
    Signature::new(2, 2).unwrap()
}

fn letter() -> impl Strategy<Value = Letter> {
    let letters = sig22().letters();
    (0..letters.len()).prop_map(move |i| letters[i])
}

fn raw_sequence() -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(letter(), 0..12)
}

fn word() -> impl Strategy<Value = Word> {
    raw_sequence().prop_map(Word::reduce)
}

proptest! {
    #[test]
    fn associativity(g in word(), h in word(), k in word()) {
        prop_assert_eq!(g.mul(&h).mul(&k), g.mul(&h.mul(&k)));
    }

    #[test]
    fn inverses(g in word()) {
        prop_assert!(g.mul(&g.inverse()).is_identity());
        prop_assert!(g.inverse().mul(&g).is_identity());
        prop_assert_eq!(g.inverse().inverse(), g.clone());
        prop_assert_eq!(g.mul(&Word::identity()), g);
    }

    #[test]
    fn reduction_is_confluent(seq in raw_sequence(), at in 0usize..13, l in letter()) {
        // Inserting a cancelling pair anywhere does not change the result.
        let pos = at.min(seq.len());
        let mut longer = seq.clone();
        longer.splice(pos..pos, [l, l.inverse()]);
        prop_assert_eq!(Word::reduce(longer), Word::reduce(seq.clone()));
        let once = Word::reduce(seq);
        prop_assert_eq!(Word::reduce(once.letters().iter().copied()), once);
    }

    #[test]
    fn display_parse_round_trip(g in word()) {
        let text = g.to_string();
        prop_assert_eq!(text.parse::<Word>().unwrap(), g);
    }

    #[test]
    fn f2_is_a_homomorphism(g in word(), h in word()) {
        let s = sig22();
        let lhs = f2_image(&g.mul(&h), &s).unwrap();
        let rhs = f2_image(&g, &s).unwrap().mul(&f2_image(&h, &s).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn coordinates_round_trip(seed in any::<u64>(), r in 0usize..4, n in 2usize..4, m in 1usize..3) {
        let s = Signature::new(m, n).unwrap();
        let f = deepen(&PartialEFunction::empty(s), r, DeepenPolicy::Seeded(seed));
        let cfg = psi(&f);
        prop_assert!(cfg.validate().is_clean());
        prop_assert_eq!(phi(&cfg).unwrap(), f.clone());
        let json = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<PartialEFunction>(&json).unwrap(), f);
        let cjson = serde_json::to_string(&cfg).unwrap();
        let back: Configuration = serde_json::from_str(&cjson).unwrap();
        prop_assert!(back.equal_at_depth(&cfg, cfg.depth()).unwrap());
    }

    #[test]
    fn forced_extension_satisfies_laws(seed in any::<u64>(), r in 1usize..4) {
        let f = deepen(&PartialEFunction::empty(Signature::new(2, 3).unwrap()), r, DeepenPolicy::Seeded(seed));
        let ext = extend_forced(&f);
        prop_assert!(ext.extends(&f));
        prop_assert!(check_conditions(&ext).is_clean());
    }

    #[test]
    fn exact_sets_have_balanced_traces(theta in -10.0f64..10.0) {
        let set = theta_family(theta, 1e-12);
        prop_assert!(check_r(&set).max() <= 1e-12);
        let report = trace_obstruction(&set);
        prop_assert!((report.t_v - 2.0 * report.t_w).abs() < 1e-12);
        prop_assert!(report.dimension_residual < 1e-12);
    }

    #[test]
    fn partial_permutations_are_tame(
        maps in prop::collection::vec(prop::collection::vec(0usize..4, 3), 4)
    ) {
        // Each map sends column j to row maps[j] (3 = nowhere), made injective.
        let mats: Vec<ComplexMatrix> = maps.iter().map(|m| partial_permutation(m)).collect();
        let set = PartialIsometrySet::new(2, 2, 1e-12, mats[..2].to_vec(), mats[2..].to_vec()).unwrap();
        let tame = matches!(tame_check(&set, 4, 1e-12), TameResult::Tame { .. });
        prop_assert!(tame);
    }
}

fn partial_permutation(targets: &[usize]) -> ComplexMatrix {
    let d = targets.len();
    let mut m = ComplexMatrix::zeros(d, d);
    let mut used = vec![false; d];
    for (col, &row) in targets.iter().enumerate() {
        if row < d && !used[row] {
            used[row] = true;
            m[(row, col)] = Complex64::new(1.0, 0.0);
        }
    }
    m
}

/// All partial permutation matrices of size `d`.
fn all_partial_permutations(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::new();
    let choices = d + 1;
    for code in 0..choices.pow(d as u32) {
        let targets: Vec<usize> = (0..d).map(|i| code / choices.pow(i as u32) % choices).collect();
        let mut seen = vec![false; d];
        if targets.iter().all(|&t| t == d || !std::mem::replace(&mut seen[t], true)) {
            out.push(partial_permutation(&targets));
        }
    }
    out
}

#[test]
fn partial_permutations_exhaustive() {
    for d in 1..=3 {
        let all = all_partial_permutations(d);
        let expected = [2, 7, 34][d - 1];
        assert_eq!(all.len(), expected);
        for p in &all {
            assert_eq!(is_partial_isometry(p, 0.0), (true, 0.0));
        }
        for s in &all {
            for t in &all {
                let set = PartialIsometrySet::new(1, 1, 0.0, vec![s.clone()], vec![t.clone()]).unwrap();
                assert!(matches!(tame_check(&set, 4, 1e-12), TameResult::Tame { max_len: 4, .. }));
            }
        }
    }
}
