use std::time::Instant;

use aucert_core::antiunify::antiunify;
use aucert_core::corpus::{random_pair, rng, Vocabulary};
use aucert_core::encode::encode_problem;
use aucert_core::pattern::{self, parse_pattern};
use aucert_core::semantics::{check_equiv, GroundUniverse};
use aucert_core::term::{Symbol, Term};

fn small_universe(depth: usize) -> GroundUniverse {
    let syms = [Symbol::new("zero", 0), Symbol::new("nil", 0), Symbol::new("succ", 1), Symbol::new("cons", 2)];
    GroundUniverse::new(&syms, depth).unwrap()
}

fn t(s: &str) -> Term {
    let p = parse_pattern(s, &["zero", "nil", "succ", "cons"]).unwrap();
    p.to_term().unwrap()
}

#[test]
fn sample_problem_is_sound_at_depth_three() {
    let u = small_universe(3);
    let r = antiunify(&t("cons(succ(x1),cons(zero,l1))"), &t("cons(x2,cons(succ(x2),l2))"));
    let goal = pattern::or(pattern::embed_term(&r.t1), pattern::embed_term(&r.t2));
    let start = Instant::now();
    let v = check_equiv(&goal, &encode_problem(&r.solved), &u).unwrap();
    eprintln!("sample at depth 3: {:?} in {:?}", v, start.elapsed());
    assert!(v.holds());
}

#[test]
fn consecutive_encodings_agree() {
    let u = small_universe(3);
    let voc = Vocabulary::small();
    let mut r = rng(5);
    for i in 0..60 {
        let (a, b) = random_pair(&mut r, &voc, 1 + i % 9);
        let res = antiunify(&a, &b);
        let mut prev = pattern::or(pattern::embed_term(&a), pattern::embed_term(&b));
        let mut states = vec![&res.initial];
        states.extend(res.steps.iter().map(|s| &s.after));
        for s in states {
            let next = encode_problem(s);
            assert!(check_equiv(&prev, &next, &u).unwrap().holds(), "{a} / {b}");
            prev = next;
        }
    }
}
