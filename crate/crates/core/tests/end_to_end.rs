use omega_core::corpus;
use omega_core::encoder::{build_omega_full, derive_params, interleaved_order, EncodingParams};
use omega_core::eval::qcir::{export_qcir, qcir_var_names, solve_qcir};
use omega_core::tm::{parse_input, simulate, Outcome};

fn omega_truth(p: &EncodingParams) -> bool {
    let text = export_qcir(&build_omega_full(p).unwrap()).unwrap();
    let order = interleaved_order(p, &qcir_var_names(&text).unwrap());
    solve_qcir(&text, &order).unwrap()
}

#[test]
fn corpus_agrees_with_simulator_at_m1() {
    for (name, p) in corpus::machines() {
        for word in ["0", "1", "01", "10"] {
            let params = derive_params(&p, &parse_input(word).unwrap(), Some(1)).unwrap();
            let run = simulate(&params.program, &params.input, 2, false).unwrap();
            assert_eq!(omega_truth(&params), run.outcome.accepted_within(2), "{name} {word}");
        }
    }
}

#[test]
fn walker_trace() {
    let p = corpus::machine("walker").unwrap();
    let run = simulate(&p, &parse_input("01").unwrap(), 4, true).unwrap();
    let trace = run.trace.unwrap();
    let heads: Vec<usize> = trace.iter().map(|c| c.head).collect();
    assert_eq!(heads, [0, 1, 2, 3, 3]);
    assert_eq!(run.outcome, Outcome::Accepted(4));
    assert!(!run.outcome.accepted_within(2));
}

#[test]
fn zone_must_hold_input() {
    let p = corpus::machine("walker").unwrap();
    assert!(derive_params(&p, &parse_input("0101").unwrap(), Some(1)).is_err());
    assert!(derive_params(&p, &parse_input("0101").unwrap(), Some(2)).is_ok());
}
