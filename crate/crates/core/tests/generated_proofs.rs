use aucert_core::antiunify::antiunify;
use aucert_core::check::check_proof;
use aucert_core::corpus::{self, Vocabulary};
use aucert_core::generate::{gen_full, proof_lines};
use aucert_core::proof::ProofObject;
use aucert_core::term::apply_subst;

#[test]
fn random_corpus_checks() {
    let voc = Vocabulary::small();
    let mut rng = corpus::rng(11);
    for size in 1..80 {
        let (t1, t2) = corpus::random_pair(&mut rng, &voc, size);
        let r = antiunify(&t1, &t2);
        assert_eq!(apply_subst(&r.lgg, &r.sigma1), t1);
        assert_eq!(apply_subst(&r.lgg, &r.sigma2), t2);
        let po = gen_full(&r).unwrap();
        assert_eq!(po.lines.len(), proof_lines(r.steps.len()));
        let v = check_proof(&po);
        if let Some(rej) = v.rejections().next() {
            panic!("{t1} vs {t2}: {rej}\n{po}");
        }
        assert!(v.overall);
    }
}

#[test]
fn text_and_json_round_trip_preserve_verdict() {
    let (t1, t2) = corpus::java_like();
    let po = gen_full(&antiunify(&t1, &t2)).unwrap();
    let text = ProofObject::from_text(&po.to_text()).unwrap();
    assert_eq!(text, po);
    let json = ProofObject::from_json(&po.to_json().to_string()).unwrap();
    assert_eq!(json, po);
    assert!(check_proof(&text).overall);
}
