use omega_core::corpus::{self, random_sentence};
use omega_core::encoder::{build_omega_full, derive_params};
use omega_core::eval::qbf::Qbf;
use omega_core::eval::qcir::{export_qcir, qcir_var_names, solve_qcir};
use omega_core::eval::{eval_sentence, Budget, Strategy};
use omega_core::fo::{parse_formula, serialize};
use omega_core::tm::parse_input;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn exported_instances_agree_with_naive() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for i in 0..200 {
        let f = random_sentence(&mut rng, 5, 10, 6);
        let truth = eval_sentence(&f, Strategy::Naive, Budget::unlimited()).unwrap();

        let q = Qbf::from_formula(&f).unwrap();
        let text = q.to_qdimacs();
        let back = Qbf::parse_qdimacs(&text).unwrap();
        assert_eq!(back, q, "#{i}");
        assert_eq!(back.decide(Budget::unlimited()).unwrap(), truth, "#{i} qdimacs");

        let qcir = export_qcir(&f).unwrap();
        let names = qcir_var_names(&qcir).unwrap();
        assert_eq!(solve_qcir(&qcir, &names).unwrap(), truth, "#{i} qcir");
    }
}

#[test]
fn walker_prefix_alternates() {
    let p = corpus::machine("walker").unwrap();
    let params = derive_params(&p, &parse_input("01").unwrap(), Some(1)).unwrap();
    let q = Qbf::from_formula(&build_omega_full(&params).unwrap()).unwrap();
    let kinds: Vec<bool> = q.prefix.iter().filter(|(_, b)| !b.is_empty()).map(|(u, _)| *u).collect();
    assert!(kinds.len() >= 3);
    assert_eq!(&kinds[..3], &[true, false, true]);
    assert!(!kinds.last().unwrap(), "Tseitin gates sit in an innermost existential block");
}

#[test]
fn encodings_are_deterministic() {
    let p = corpus::machine("alternator").unwrap();
    let params = derive_params(&p, &parse_input("01").unwrap(), Some(1)).unwrap();
    let a = build_omega_full(&params).unwrap();
    let b = build_omega_full(&params).unwrap();
    assert_eq!(serialize(&a), serialize(&b));
    assert_eq!(export_qcir(&a).unwrap(), export_qcir(&b).unwrap());
    assert_eq!(Qbf::from_formula(&a).unwrap().to_qdimacs(), Qbf::from_formula(&b).unwrap().to_qdimacs());
    let (parsed, sig) = parse_formula(&serialize(&a)).unwrap();
    assert_eq!(parsed, a);
    assert!(sig.boolean && !sig.equiv);
}

#[test]
fn malformed_qcir_is_rejected() {
    assert!(solve_qcir("#QCIR-G14\noutput(t1)\nt1 = and(x, \n", &[]).is_err());
    assert!(qcir_var_names("not a qcir file").is_err());
}
