use aucert_core::antiunify::antiunify;
use aucert_core::check::check_proof;
use aucert_core::corpus::{self, Vocabulary};
use aucert_core::encode::encode_problem;
use aucert_core::generate::{gen_full, proof_lines};
use aucert_core::term::{apply_subst, Term};
use proptest::prelude::*;

fn pair(seed: u64, size: usize, wide: bool) -> (Term, Term) {
    let voc = if wide {
        Vocabulary::new(&[("a", 0), ("b", 0), ("f", 1), ("g", 2), ("h", 3)], &["x", "y", "z0", "z1"])
    } else {
        Vocabulary::small()
    };
    corpus::random_pair(&mut corpus::rng(seed), &voc, size)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lgg_generalizes_both_sides(seed in any::<u64>(), size in 1usize..40, wide in any::<bool>()) {
        let (t1, t2) = pair(seed, size, wide);
        let r = antiunify(&t1, &t2);
        prop_assert_eq!(apply_subst(&r.lgg, &r.sigma1), t1.clone());
        prop_assert_eq!(apply_subst(&r.lgg, &r.sigma2), t2.clone());
        prop_assert!(r.solved.validate().is_ok());
        prop_assert!(r.solved.is_solved());
        let binders: std::collections::BTreeSet<_> = r.solved.binders().into_iter().collect();
        prop_assert_eq!(r.lgg.vars(), binders.clone());
        prop_assert!(r.sigma1.domain().is_subset(&binders));
        let mut inputs = t1.vars();
        inputs.extend(t2.vars());
        prop_assert!(binders.is_disjoint(&inputs));
    }

    #[test]
    fn trace_replays(seed in any::<u64>(), size in 1usize..40, wide in any::<bool>()) {
        let (t1, t2) = pair(seed, size, wide);
        let r = antiunify(&t1, &t2);
        let mut state = r.initial.clone();
        for s in &r.steps {
            prop_assert_eq!(&s.before, &state);
            prop_assert_eq!(s.before.first_decomposable(), Some(s.position));
            state = s.replay().unwrap();
            prop_assert_eq!(&state, &s.after);
            prop_assert!(state.validate().is_ok());
        }
        prop_assert_eq!(state, r.solved);
    }

    #[test]
    fn encoding_keeps_free_variables(seed in any::<u64>(), size in 1usize..30, wide in any::<bool>()) {
        let (t1, t2) = pair(seed, size, wide);
        let r = antiunify(&t1, &t2);
        let mut vars = t1.vars();
        vars.extend(t2.vars());
        prop_assert_eq!(encode_problem(&r.solved).free_vars(), vars);
    }

    #[test]
    fn generated_proofs_check(seed in any::<u64>(), size in 1usize..25, wide in any::<bool>()) {
        let (t1, t2) = pair(seed, size, wide);
        let r = antiunify(&t1, &t2);
        let po = gen_full(&r).unwrap();
        prop_assert_eq!(po.lines.len(), proof_lines(r.steps.len()));
        let v = check_proof(&po);
        prop_assert!(v.overall, "{:?}", v.rejections().next());
    }
}
