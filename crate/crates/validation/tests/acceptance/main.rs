//! Acceptance checks A1-A9. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use omega_core::corpus::{self, random_sentence};
use omega_core::encoder::{
    build_omega_full, build_omega_step, build_phi0, build_phi_s, derive_params, interleaved_order, length_audit,
    EncodingParams, RecordKind,
};
use omega_core::eval::qcir::{export_qcir, qcir_var_names, solve_qcir};
use omega_core::eval::{
    eval_relational, eval_sentence, eval_term_bits, eval_with, Assignment, Budget, EqStructure, EvalError, NFormula,
    Strategy,
};
use omega_core::fo::{
    const_tuple, length_natural, lex_less, shifted_tuple, tuple_value, var_tuple, Formula, Shift, Term, VarId,
    VarKind,
};
use omega_core::tm::{monoclonal, parse_input, reduce_clone, simulate, Configuration, Symbol};
use omega_core::translate::{translate_20, translate_21, translate_22};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned limits.
const A1_EXHAUSTIVE_MAX_WIDTH: usize = 6;
const A1_SAMPLED_WIDTHS: [usize; 2] = [7, 8];
const A1_SAMPLES: usize = 2000;
const A2_MACHINES: [&str; 5] = ["walker", "immediate-reject", "bit-flipper", "left-bouncer", "alternator"];
const A2_MIN_CORRUPTIONS: usize = 10;
const A3_RANDOM_ASSIGNMENTS: usize = 1000;
const A4_INPUTS: [&str; 4] = ["0", "1", "01", "10"];
const A4_INTERNAL_BUDGET: Duration = Duration::from_millis(500);
const A5_LENGTHS: [usize; 5] = [4, 8, 16, 32, 64];
const A5_MAX_SLOPE: f64 = 2.5;
const A5_MAX_BUILD_MS: f64 = 10_000.0;
const A6_PROGRAMS: usize = 100;
const A6_TRACE_STEPS: u64 = 32;
const A6_INPUTS: usize = 5;
const A7_SENTENCES: usize = 200;
const A7_MAX_QUANTIFIERS: usize = 4;
const A7_MAX_BOUND: usize = 6;
const A7_MAX_DEPTH: u32 = 5;
const A8_LENGTHS: [usize; 4] = [4, 8, 16, 32];
const A8_MAX_SPREAD: f64 = 2.0;
const A9_SENTENCES: usize = 500;
const A9_MAX_BOUND: usize = 14;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn a1() -> Verdict {
    let mut checked = 0usize;
    let mut bad = Vec::new();
    let mut check = |w: usize, v: u128, u: u128| {
        let m = 1u128 << w;
        let inc = tuple_value(&eval_term_bits(&shifted_tuple(&const_tuple(v, w), Shift::Inc)));
        let dec = tuple_value(&eval_term_bits(&shifted_tuple(&const_tuple(v, w), Shift::Dec)));
        let less = lex_less(&const_tuple(v, w), &const_tuple(u, w)).unwrap();
        let less = eval_sentence(&less, Strategy::Naive, Budget::unlimited()).unwrap();
        checked += 1;
        if inc != (v + 1) % m || dec != (v + m - 1) % m || less != (v < u) {
            bad.push(format!("w={w} v={v} u={u}"));
        }
    };
    for w in 1..=A1_EXHAUSTIVE_MAX_WIDTH {
        for v in 0..1u128 << w {
            for u in 0..1u128 << w {
                check(w, v, u);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for w in A1_SAMPLED_WIDTHS {
        for _ in 0..A1_SAMPLES {
            check(w, rng.gen_range(0..1 << w), rng.gen_range(0..1 << w));
        }
    }
    // The symbolic form under every assignment of a width-4 variable tuple.
    let vars = var_tuple(VarKind::U, 0, 0, 4);
    let inc = shifted_tuple(&vars, Shift::Inc);
    for v in 0..16u128 {
        let a: Assignment = (0..4)
            .map(|i| (VarId::new(VarKind::U, 0, i as u32), (v >> (3 - i)) & 1 == 1))
            .collect();
        let got: Vec<bool> = inc.iter().map(|t| omega_core::eval::eval_term(t, &a).unwrap()).collect();
        if tuple_value(&got) != (v + 1) % 16 {
            bad.push(format!("symbolic v={v}"));
        }
    }
    verdict(bad.is_empty(), format!("{checked} constant cases, {} mismatches {:?}", bad.len(), bad.first()))
}

fn params(machine: &str, input: &str, m: u32) -> EncodingParams {
    let p = corpus::machine(machine).unwrap();
    derive_params(&p, &parse_input(input).unwrap(), Some(m)).unwrap()
}

/// Single-field variants of a configuration that stay inside the zone.
fn corruptions(p: &EncodingParams, c: &Configuration) -> Vec<Configuration> {
    let t = p.steps() as usize;
    let mut out = Vec::new();
    for q in 0..=p.program.max_state() {
        if q != c.state {
            out.push(Configuration { state: q, ..c.clone() });
        }
    }
    for h in 0..=t {
        if h != c.head {
            out.push(Configuration { head: h, ..c.clone() });
        }
    }
    for cell in 0..=t {
        for &s in p.program.alphabet() {
            if s != c.cell(cell) {
                let mut tape = c.tape.clone();
                if tape.len() <= cell {
                    tape.resize(cell + 1, Symbol(0));
                }
                tape[cell] = s;
                out.push(Configuration { tape, ..c.clone() });
            }
        }
    }
    out
}

fn a2() -> Verdict {
    let (mut true_ok, mut true_total, mut false_ok, mut false_total) = (0, 0, 0, 0);
    let mut errors = 0;
    let mut short_corruptions = false;
    for name in A2_MACHINES {
        for input in A4_INPUTS {
            let p = params(name, input, 1);
            let run = simulate(&p.program, &p.input, p.steps() as u64, true).unwrap();
            let trace = run.trace.unwrap();
            for w in trace.windows(2) {
                let eval = |to: &Configuration| {
                    let f = build_omega_step(&p, 0, &w[0], to).unwrap();
                    eval_sentence(&f, Strategy::ShortCircuit, Budget::unlimited())
                };
                true_total += 1;
                match eval(&w[1]) {
                    Ok(true) => true_ok += 1,
                    Ok(false) => {}
                    Err(_) => errors += 1,
                }
                let bad = corruptions(&p, &w[1]);
                short_corruptions |= bad.len() < A2_MIN_CORRUPTIONS;
                for c in bad {
                    false_total += 1;
                    match eval(&c) {
                        Ok(false) => false_ok += 1,
                        Ok(true) => {}
                        Err(_) => errors += 1,
                    }
                }
            }
        }
    }
    let pass = true_ok == true_total && false_ok == false_total && errors == 0 && !short_corruptions;
    verdict(
        pass,
        format!(
            "true successor: {true_ok}/{true_total} TRUE; corruptions: {false_ok}/{false_total} FALSE; errors {errors}"
        ),
    )
}

fn record_assignment(p: &EncodingParams, kind: RecordKind, bits: &[bool]) -> Assignment {
    p.record(kind).vars().into_iter().zip(bits.iter().copied()).collect()
}

fn encode_probe(p: &EncodingParams, c: &Configuration, cell: usize) -> Vec<bool> {
    let bits = |ts: Vec<Term>| eval_term_bits(&ts);
    let code = |s: Symbol| bits(p.code(s));
    [
        bits(p.address(cell as u128)),
        bits(p.state_code(c.state)),
        bits(p.address(c.head as u128)),
        code(c.scanned()),
        code(c.cell(cell)),
    ]
    .concat()
}

fn a3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut agree, mut total) = (0usize, 0usize);
    let mut errors = Vec::new();
    let per_machine = A3_RANDOM_ASSIGNMENTS.div_ceil(A2_MACHINES.len());
    for name in A2_MACHINES {
        let p = params(name, "01", 1);
        let src = p.record(RecordKind::Color(0));
        let dst = p.record(RecordKind::Color(2));
        let mid = p.record(RecordKind::Flat(VarKind::V, 9));
        let phi1 = build_phi_s(&p, 1, &src, &dst).unwrap();
        let two = Formula::exists(
            mid.vars(),
            Formula::and(build_phi0(&p, &src, &mid).unwrap(), build_phi0(&p, &mid, &dst).unwrap()),
        );
        let width = p.record_width();
        let mut compare = |a: Assignment| {
            total += 1;
            let l = eval_with(&phi1, &a, Strategy::Guarded, Budget::unlimited());
            let r = eval_with(&two, &a, Strategy::Guarded, Budget::unlimited());
            match (l, r) {
                (Ok(x), Ok(y)) if x == y => agree += 1,
                other => errors.push(format!("{name}: {other:?}")),
            }
        };
        for _ in 0..per_machine {
            let bits: Vec<bool> = (0..2 * width).map(|_| rng.gen_bool(0.5)).collect();
            let mut a = record_assignment(&p, RecordKind::Color(0), &bits[..width]);
            a.extend(record_assignment(&p, RecordKind::Color(2), &bits[width..]));
            compare(a);
        }
        let trace = simulate(&p.program, &p.input, p.steps() as u64, true).unwrap().trace.unwrap();
        let t = p.steps() as usize;
        for mu in 0..=t {
            for nu in 0..=t {
                let mut a = record_assignment(&p, RecordKind::Color(0), &encode_probe(&p, &trace[0], mu));
                a.extend(record_assignment(&p, RecordKind::Color(2), &encode_probe(&p, &trace[2], nu)));
                compare(a);
            }
        }
    }
    verdict(agree == total, format!("{agree}/{total} assignments agree; first error {:?}", errors.first()))
}

fn decide_omega(p: &EncodingParams) -> (Result<bool, EvalError>, &'static str) {
    let f = build_omega_full(p).unwrap();
    match eval_sentence(&f, Strategy::Guarded, Budget::time(A4_INTERNAL_BUDGET)) {
        Err(EvalError::BudgetExceeded { .. }) => {}
        other => return (other, "guarded"),
    }
    let text = export_qcir(&f).unwrap();
    let order = interleaved_order(p, &qcir_var_names(&text).unwrap());
    (solve_qcir(&text, &order), "qcir")
}

fn a4() -> Verdict {
    let mut lines = Vec::new();
    let (mut agree, mut total) = (0, 0);
    let mut via: HashMap<&str, usize> = HashMap::new();
    for m in [1, 2] {
        for (name, _) in corpus::MACHINES {
            for input in A4_INPUTS {
                let p = params(name, input, m);
                let sim = simulate(&p.program, &p.input, p.steps() as u64, false).unwrap();
                let expected = sim.outcome.accepted_within(p.steps() as u64);
                let (got, how) = decide_omega(&p);
                *via.entry(how).or_default() += 1;
                total += 1;
                if got.as_ref() == Ok(&expected) {
                    agree += 1;
                } else {
                    lines.push(format!("m={m} {name} {input}: omega={got:?} simulator={expected}"));
                }
            }
        }
    }
    let mut via: Vec<_> = via.into_iter().collect();
    via.sort();
    verdict(
        agree == total,
        format!("{agree}/{total} agree (decided by {via:?}); disagreements: {}", lines.join("; ")),
    )
}

fn a5() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    for name in ["walker", "alternator"] {
        let p = corpus::machine(name).unwrap();
        let inputs: Vec<Vec<Symbol>> = A5_LENGTHS.iter().map(|&n| parse_input(&"01".repeat(n / 2)).unwrap()).collect();
        let report = length_audit(&p, &inputs).unwrap();
        let slowest = report.rows.iter().map(|r| r.build_ms).fold(0.0, f64::max);
        pass &= report.lengths_exceed_input && report.slope <= A5_MAX_SLOPE && slowest < A5_MAX_BUILD_MS;
        parts.push(format!(
            "{name}: slope {:.3}, len>=|X| {}, lengths {:?}, max build {:.0} ms",
            report.slope,
            report.lengths_exceed_input,
            report.rows.iter().map(|r| r.omega_len).collect::<Vec<_>>(),
            slowest
        ));
    }
    verdict(pass, parts.join("; "))
}

fn a6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    for i in 0..A6_PROGRAMS {
        let states = rng.gen_range(1..=4);
        let p = corpus::random_program(&mut rng, states, 0.6);
        let r = reduce_clone(&p);
        if reduce_clone(&r) != r {
            failures.push(format!("#{i} not idempotent"));
        }
        let q = corpus::add_dead_code(&mut rng, &p);
        let s = corpus::add_dead_code(&mut rng, &q);
        let other = corpus::random_program(&mut rng, 3, 0.6);
        if !monoclonal(&p, &p) || monoclonal(&p, &q) != monoclonal(&q, &p) {
            failures.push(format!("#{i} reflexivity/symmetry"));
        }
        if monoclonal(&p, &q) && monoclonal(&q, &s) && !monoclonal(&p, &s) {
            failures.push(format!("#{i} transitivity"));
        }
        if monoclonal(&p, &other) != monoclonal(&other, &p) {
            failures.push(format!("#{i} symmetry on unrelated pair"));
        }
        if !monoclonal(&p, &q) {
            failures.push(format!("#{i} dead code changed the clone"));
            continue;
        }
        for _ in 0..A6_INPUTS {
            let len = rng.gen_range(1..=6);
            let x = corpus::random_input(&mut rng, len);
            if simulate(&p, &x, A6_TRACE_STEPS, true) != simulate(&q, &x, A6_TRACE_STEPS, true) {
                failures.push(format!("#{i} traces differ"));
            }
        }
    }
    verdict(failures.is_empty(), format!("{A6_PROGRAMS} programs; failures {failures:?}"))
}

fn a7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let y = |i| VarId::new(VarKind::Y, 900, i);
    let n = Formula::not(Formula::Equiv(Term::Var(y(0)), Term::Var(y(1))));
    let s20 = EqStructure::discrete(2).with_consts(0, 1);
    let s21 = [
        EqStructure::discrete(2),
        EqStructure::from_classes(3, &[vec![0, 1], vec![2]]).unwrap(),
        EqStructure::discrete(3),
    ];
    let nf = NFormula::new(n.clone()).unwrap();
    let s22: Vec<EqStructure> = (2..=4).map(|k| EqStructure::discrete(k).with_n(nf.clone())).collect();
    let mut bad = Vec::new();
    for i in 0..A7_SENTENCES {
        let f = random_sentence(&mut rng, A7_MAX_QUANTIFIERS, A7_MAX_BOUND, A7_MAX_DEPTH);
        let truth = eval_sentence(&f, Strategy::Naive, Budget::unlimited()).unwrap();
        let (g20, _) = translate_20(&f).unwrap();
        let (g21, _) = translate_21(&f).unwrap();
        let (g22, _) = translate_22(&f, &n).unwrap();
        if eval_relational(&g20, &s20).unwrap() != truth {
            bad.push(format!("#{i} 2.0"));
        }
        for s in &s21 {
            if eval_relational(&g21, s).unwrap() != truth {
                bad.push(format!("#{i} 2.1 on {} elements", s.size));
            }
        }
        for s in &s22 {
            if eval_relational(&g22, s).unwrap() != truth {
                bad.push(format!("#{i} 2.2 on {} elements", s.size));
            }
        }
    }
    verdict(bad.is_empty(), format!("{A7_SENTENCES} sentences; mismatches {bad:?}"))
}

fn a8() -> Verdict {
    let p = corpus::machine("walker").unwrap();
    let mut ratios = Vec::new();
    for n in A8_LENGTHS {
        let params = derive_params(&p, &parse_input(&"01".repeat(n / 2)).unwrap(), None).unwrap();
        let omega = build_omega_full(&params).unwrap();
        let (t, _) = translate_20(&omega).unwrap();
        ratios.push(length_natural(&t) as f64 / length_natural(&omega) as f64);
    }
    let max = ratios.iter().copied().fold(f64::MIN, f64::max);
    let min = ratios.iter().copied().fold(f64::MAX, f64::min);
    verdict(max / min <= A8_MAX_SPREAD, format!("ratios {ratios:.3?}, spread {:.3}", max / min))
}

fn a9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut bad = Vec::new();
    let mut trues = 0;
    for i in 0..A9_SENTENCES {
        let bound = rng.gen_range(1..=A9_MAX_BOUND);
        let f = random_sentence(&mut rng, 6, bound, 6);
        let truth = eval_sentence(&f, Strategy::Naive, Budget::unlimited()).unwrap();
        trues += truth as usize;
        for s in [Strategy::ShortCircuit, Strategy::Guarded, Strategy::QbfSearch] {
            let got = eval_sentence(&f, s, Budget::unlimited());
            if got != Ok(truth) {
                bad.push(format!("#{i} {s}: {got:?} vs {truth}"));
            }
        }
    }
    verdict(bad.is_empty(), format!("{A9_SENTENCES} sentences ({trues} true); disagreements {bad:?}"))
}

fn main() -> ExitCode {
    type Check = fn() -> Verdict;
    let criteria: [(&str, Check); 9] =
        [("A1", a1), ("A2", a2), ("A3", a3), ("A4", a4), ("A5", a5), ("A6", a6), ("A7", a7), ("A8", a8), ("A9", a9)];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with('A')).collect();
    let mut failed = 0;
    for (id, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let start = Instant::now();
        let v = run();
        let status = if v.pass { "PASS" } else { "FAIL" };
        failed += !v.pass as usize;
        println!("{id} {status} ({:.1} s) {}", start.elapsed().as_secs_f64(), v.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
