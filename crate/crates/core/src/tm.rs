//! Deterministic single-tape Turing machines.
//!
//! Symbols are stored by a global id: `_` (blank) is 0, `>` (the left-end
//! marker) is 1, the numerals `0` and `1` are 2 and 3, and the letters
//! `a..=z` follow. A program's alphabet lists the symbols it uses, always
//! starting with those four.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u8);

pub const BLANK: Symbol = Symbol(0);
pub const START: Symbol = Symbol(1);
pub const ZERO: Symbol = Symbol(2);
pub const ONE: Symbol = Symbol(3);

pub const ACCEPT: u32 = 1;
pub const REJECT: u32 = 2;

impl Symbol {
    pub fn from_char(c: char) -> Option<Symbol> {
        match c {
            '_' => Some(BLANK),
            '>' => Some(START),
            '0' => Some(ZERO),
            '1' => Some(ONE),
            'a'..='z' => Some(Symbol(4 + (c as u8 - b'a'))),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self.0 {
            0 => '_',
            1 => '>',
            2 => '0',
            3 => '1',
            n => (b'a' + (n - 4)) as char,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Write(Symbol),
    Left,
    Right,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Write(s) => write!(f, "{s}"),
            Action::Left => write!(f, "L"),
            Action::Right => write!(f, "R"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Instruction {
    pub from: u32,
    pub read: Symbol,
    pub to: u32,
    pub action: Action,
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{} {} -> q{} {}", self.from, self.read, self.to, self.action)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TmError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: nondeterministic on (q{state}, {symbol})")]
    Nondeterministic { line: usize, state: u32, symbol: char },
    #[error("line {line}: {msg}")]
    StartMarker { line: usize, msg: String },
    #[error("program has no instructions")]
    Empty,
    #[error("input symbol {0:?} is not usable on the tape")]
    InputSymbol(char),
    #[error("input word is empty")]
    EmptyInput,
    #[error("no instruction for (q{state}, {symbol}) at step {step}")]
    Stuck { state: u32, symbol: char, step: u64 },
    #[error("head moved left of cell 0 at step {0}")]
    HeadUnderflow(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    instructions: Vec<Instruction>,
    alphabet: Vec<Symbol>,
}

impl Program {
    /// Builds a program after checking determinism and the start-marker rule.
    pub fn new(instructions: Vec<Instruction>) -> Result<Program, TmError> {
        let mut seen = HashSet::new();
        for (i, ins) in instructions.iter().enumerate() {
            check_marker(ins).map_err(|msg| TmError::StartMarker { line: i + 1, msg })?;
            if !seen.insert((ins.from, ins.read)) {
                return Err(TmError::Nondeterministic {
                    line: i + 1,
                    state: ins.from,
                    symbol: ins.read.to_char(),
                });
            }
        }
        if instructions.is_empty() {
            return Err(TmError::Empty);
        }
        let alphabet = infer_alphabet(&instructions, &[]);
        Ok(Program { instructions, alphabet })
    }

    fn with_alphabet(instructions: Vec<Instruction>, alphabet: Vec<Symbol>) -> Program {
        Program { instructions, alphabet }
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    /// Position of `s` in the alphabet, which doubles as its code.
    pub fn symbol_index(&self, s: Symbol) -> Option<usize> {
        self.alphabet.iter().position(|&a| a == s)
    }

    pub fn max_state(&self) -> u32 {
        self.instructions.iter().map(|i| i.from.max(i.to)).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn lookup(&self, state: u32, read: Symbol) -> Option<&Instruction> {
        self.instructions.iter().find(|i| i.from == state && i.read == read)
    }

    pub fn instruction_set(&self) -> BTreeSet<Instruction> {
        self.instructions.iter().copied().collect()
    }

    /// Length of the program written as `q0>→q0R,q0_→q1_` with decimal state numbers.
    pub fn natural_length(&self) -> usize {
        let digits = |n: u32| n.to_string().len();
        let body: usize = self
            .instructions
            .iter()
            .map(|i| 1 + digits(i.from) + 1 + 1 + 1 + digits(i.to) + 1)
            .sum();
        body + self.instructions.len().saturating_sub(1)
    }

    /// Extends the alphabet with symbols that occur only in an input word.
    pub fn widen_alphabet(&self, extra: &[Symbol]) -> Program {
        let alphabet = infer_alphabet(&self.instructions, extra);
        Program::with_alphabet(self.instructions.clone(), alphabet)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ins in &self.instructions {
            writeln!(f, "{ins}")?;
        }
        Ok(())
    }
}

fn check_marker(ins: &Instruction) -> Result<(), String> {
    match (ins.read == START, ins.action) {
        (false, Action::Write(START)) => Err(format!("{ins}: writes > over a non-> cell")),
        (true, Action::Write(s)) if s != START => Err(format!("{ins}: erases the > marker")),
        _ => Ok(()),
    }
}

fn infer_alphabet(instructions: &[Instruction], extra: &[Symbol]) -> Vec<Symbol> {
    let mut alphabet = vec![BLANK, START, ZERO, ONE];
    let mentioned = instructions.iter().flat_map(|i| {
        let written = match i.action {
            Action::Write(s) => Some(s),
            _ => None,
        };
        std::iter::once(i.read).chain(written)
    });
    for s in mentioned.chain(extra.iter().copied()) {
        if !alphabet.contains(&s) {
            alphabet.push(s);
        }
    }
    alphabet
}

pub fn parse_program(text: &str) -> Result<Program, TmError> {
    let mut instructions = Vec::new();
    let mut lines = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        instructions.push(parse_line(line, ln + 1)?);
        lines.push(ln + 1);
    }
    // Report errors against source lines rather than instruction positions.
    Program::new(instructions).map_err(|e| match e {
        TmError::Nondeterministic { line, state, symbol } => {
            TmError::Nondeterministic { line: lines[line - 1], state, symbol }
        }
        TmError::StartMarker { line, msg } => TmError::StartMarker { line: lines[line - 1], msg },
        other => other,
    })
}

fn parse_line(line: &str, ln: usize) -> Result<Instruction, TmError> {
    let mut tokens = Vec::new();
    let mut col = 0;
    for part in line.split_inclusive(char::is_whitespace) {
        let tok = part.trim_end();
        if !tok.is_empty() {
            tokens.push((tok, col + 1));
        }
        col += part.chars().count();
    }
    let err = |col: usize, msg: &str| TmError::Syntax { line: ln, col, msg: msg.to_string() };
    let end = line.chars().count() + 1;
    if tokens.len() != 5 {
        let col = tokens.get(5).map_or(end, |t| t.1);
        return Err(err(col, "expected `q<i> <sym> -> q<j> <act>`"));
    }
    let state = |(tok, col): (&str, usize)| -> Result<u32, TmError> {
        tok.strip_prefix('q')
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| err(col, "expected a state like q3"))
    };
    let symbol = |(tok, col): (&str, usize)| -> Result<Symbol, TmError> {
        let mut chars = tok.chars();
        match (chars.next().and_then(Symbol::from_char), chars.next()) {
            (Some(s), None) => Ok(s),
            _ => Err(err(col, "expected a symbol from _ > 0 1 a-z")),
        }
    };
    let from = state(tokens[0])?;
    let read = symbol(tokens[1])?;
    if tokens[2].0 != "->" {
        return Err(err(tokens[2].1, "expected `->`"));
    }
    let to = state(tokens[3])?;
    let action = match tokens[4].0 {
        "L" => Action::Left,
        "R" => Action::Right,
        _ => Action::Write(symbol(tokens[4])?),
    };
    Ok(Instruction { from, read, to, action })
}

pub fn parse_input(word: &str) -> Result<Vec<Symbol>, TmError> {
    if word.is_empty() {
        return Err(TmError::EmptyInput);
    }
    word.chars()
        .map(|c| match Symbol::from_char(c) {
            Some(START) | None => Err(TmError::InputSymbol(c)),
            Some(s) => Ok(s),
        })
        .collect()
}

/// Blocks left moves off the marker and completes every hanging state
/// with self-loops.
pub fn normalize(p: &Program) -> Program {
    let mut out: Vec<Instruction> = p
        .instructions
        .iter()
        .map(|&ins| match ins {
            Instruction { read: START, action: Action::Left, .. } => Instruction {
                from: ins.from,
                read: START,
                to: ins.from,
                action: Action::Write(START),
            },
            other => other,
        })
        .collect();
    let present: HashSet<(u32, Symbol)> = out.iter().map(|i| (i.from, i.read)).collect();
    let mut hanging: Vec<u32> = p
        .instructions
        .iter()
        .chain(out.iter())
        .map(|i| i.to)
        .filter(|&j| j > REJECT)
        .collect();
    hanging.sort_unstable();
    hanging.dedup();
    for j in hanging {
        for &a in &p.alphabet {
            if !present.contains(&(j, a)) {
                out.push(Instruction { from: j, read: a, to: j, action: Action::Write(a) });
            }
        }
    }
    Program::with_alphabet(out, p.alphabet.clone())
}

/// Lets the halting states run on by adding `q_k a -> q_k a` for k in {1, 2}.
pub fn add_idle_run(p: &Program) -> Program {
    let mut out = p.instructions.clone();
    let present: HashSet<(u32, Symbol)> = out.iter().map(|i| (i.from, i.read)).collect();
    for k in [ACCEPT, REJECT] {
        for &a in &p.alphabet {
            if !present.contains(&(k, a)) {
                out.push(Instruction { from: k, read: a, to: k, action: Action::Write(a) });
            }
        }
    }
    Program::with_alphabet(out, p.alphabet.clone())
}

/// Normalizes and idle-completes in one go, which is what the encoder expects.
pub fn prepare(p: &Program) -> Program {
    add_idle_run(&normalize(p))
}

/// Irreducible clone: drops instructions whose source state nothing targets,
/// until nothing changes. States 0, 1 and 2 are never dropped.
pub fn reduce_clone(p: &Program) -> Program {
    let mut current = p.instructions.clone();
    loop {
        let targeted: HashSet<u32> = current.iter().map(|i| i.to).collect();
        let before = current.len();
        current.retain(|i| i.from <= REJECT || targeted.contains(&i.from));
        if current.len() == before {
            break;
        }
    }
    Program::with_alphabet(current, p.alphabet.clone())
}

pub fn monoclonal(p: &Program, q: &Program) -> bool {
    reduce_clone(p).instruction_set() == reduce_clone(q).instruction_set()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub tape: Vec<Symbol>,
    pub head: usize,
    pub state: u32,
    pub step: u64,
}

impl Configuration {
    pub fn initial(input: &[Symbol]) -> Configuration {
        let mut tape = Vec::with_capacity(input.len() + 2);
        tape.push(START);
        tape.extend_from_slice(input);
        Configuration { tape, head: 0, state: 0, step: 0 }
    }

    /// Cell content, with cells past the explicit tape reading blank.
    pub fn cell(&self, i: usize) -> Symbol {
        self.tape.get(i).copied().unwrap_or(BLANK)
    }

    pub fn scanned(&self) -> Symbol {
        self.cell(self.head)
    }

    pub fn tape_string(&self) -> String {
        self.tape.iter().map(|s| s.to_char()).collect()
    }

    /// Cells where the two tapes differ, treating missing cells as blank.
    pub fn differing_cells(&self, other: &Configuration) -> Vec<usize> {
        let n = self.tape.len().max(other.tape.len());
        (0..n).filter(|&i| self.cell(i) != other.cell(i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "step")]
pub enum Outcome {
    Accepted(u64),
    Rejected(u64),
    Running,
}

impl Outcome {
    pub fn accepted_within(&self, steps: u64) -> bool {
        matches!(*self, Outcome::Accepted(s) if s <= steps)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub outcome: Outcome,
    pub trace: Option<Vec<Configuration>>,
}

pub fn step(p: &Program, cfg: &Configuration) -> Result<Configuration, TmError> {
    let read = cfg.scanned();
    let ins = p.lookup(cfg.state, read).ok_or(TmError::Stuck {
        state: cfg.state,
        symbol: read.to_char(),
        step: cfg.step,
    })?;
    let mut next = cfg.clone();
    next.state = ins.to;
    next.step += 1;
    match ins.action {
        Action::Write(s) => {
            if next.head >= next.tape.len() {
                next.tape.resize(next.head + 1, BLANK);
            }
            next.tape[next.head] = s;
        }
        Action::Right => {
            next.head += 1;
            if next.head >= next.tape.len() {
                next.tape.push(BLANK);
            }
        }
        Action::Left => {
            next.head = next.head.checked_sub(1).ok_or(TmError::HeadUnderflow(next.step))?;
        }
    }
    Ok(next)
}

/// Runs from the initial configuration for up to `max_steps` steps.
///
/// Without a trace the run stops at the first halt; with one it keeps going
/// so that the trace always holds `max_steps + 1` configurations.
pub fn simulate(
    p: &Program,
    input: &[Symbol],
    max_steps: u64,
    trace: bool,
) -> Result<Run, TmError> {
    if input.is_empty() {
        return Err(TmError::EmptyInput);
    }
    let mut cfg = Configuration::initial(input);
    let mut outcome = Outcome::Running;
    let mut configs = trace.then(|| vec![cfg.clone()]);
    while cfg.step < max_steps {
        cfg = step(p, &cfg)?;
        if outcome == Outcome::Running {
            outcome = match cfg.state {
                ACCEPT => Outcome::Accepted(cfg.step),
                REJECT => Outcome::Rejected(cfg.step),
                _ => Outcome::Running,
            };
        }
        match configs.as_mut() {
            Some(list) => list.push(cfg.clone()),
            None if outcome != Outcome::Running => break,
            None => {}
        }
    }
    Ok(Run { outcome, trace: configs })
}

#[derive(Serialize)]
struct TraceEntry {
    step: u64,
    state: u32,
    head: usize,
    tape: String,
}

pub fn trace_json(trace: &[Configuration]) -> String {
    let entries: Vec<TraceEntry> = trace
        .iter()
        .map(|c| TraceEntry { step: c.step, state: c.state, head: c.head, tape: c.tape_string() })
        .collect();
    serde_json::to_string_pretty(&entries).expect("trace entries serialize")
}

/// Instructions keyed by (state, read), for callers that look up often.
pub fn transition_map(p: &Program) -> HashMap<(u32, Symbol), Instruction> {
    p.instructions.iter().map(|i| ((i.from, i.read), *i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prog(text: &str) -> Program {
        parse_program(text).unwrap()
    }

    #[test]
    fn parses_two_instructions() {
        let p = prog("q0 > -> q0 R\nq0 _ -> q1 _");
        assert_eq!(p.len(), 2);
        assert_eq!(p.max_state(), 1);
        assert_eq!(p.alphabet(), &[BLANK, START, ZERO, ONE]);
    }

    #[test]
    fn rejects_duplicate_key() {
        let e = parse_program("q0 > -> q0 R\nq0 > -> q1 >").unwrap_err();
        assert_eq!(e, TmError::Nondeterministic { line: 2, state: 0, symbol: '>' });
    }

    #[test]
    fn rejects_marker_write() {
        assert!(matches!(parse_program("q0 0 -> q1 >"), Err(TmError::StartMarker { line: 1, .. })));
        assert!(matches!(parse_program("q0 > -> q1 0"), Err(TmError::StartMarker { .. })));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_program("# c\nq0 > => q0 R") {
            Err(TmError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 6)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_program("q0 ? -> q0 R"), Err(TmError::Syntax { col: 4, .. })));
    }

    #[test]
    fn letters_extend_alphabet_in_order() {
        let p = prog("q0 > -> q0 R\nq0 c -> q0 a");
        let chars: String = p.alphabet().iter().map(|s| s.to_char()).collect();
        assert_eq!(chars, "_>01ca");
    }

    #[test]
    fn normalize_blocks_and_completes() {
        let p = prog("q0 > -> q3 L");
        let n = normalize(&p);
        assert_eq!(n.instructions()[0], Instruction { from: 0, read: START, to: 0, action: Action::Write(START) });
        assert_eq!(n.len(), 1 + 4);
        assert_eq!(normalize(&n), n);
        let p = prog("q0 > -> q3 R");
        let n = normalize(&p);
        assert_eq!(n.len(), 1 + 4);
        assert!(n.instructions()[1..].iter().all(|i| i.from == 3 && i.to == 3));
    }

    #[test]
    fn normalize_keeps_normal_programs() {
        let p = prog("q0 > -> q0 R\nq0 _ -> q1 _");
        assert_eq!(normalize(&p), p);
    }

    #[test]
    fn idle_run_adds_two_per_symbol() {
        let p = prog("q0 > -> q0 R\nq0 _ -> q3 _\nq3 0 -> q0 0");
        let q = add_idle_run(&p);
        assert_eq!(q.len(), p.len() + 8);
        assert_eq!(add_idle_run(&q), q);
    }

    #[test]
    fn reduce_clone_cascades() {
        let p = prog("q0 > -> q5 >\nq5 > -> q6 >\nq6 > -> q6 R\nq9 _ -> q8 _\nq8 _ -> q2 _");
        let r = reduce_clone(&p);
        assert_eq!(r.len(), 3);
        let p = prog("q0 > -> q1 >\nq4 _ -> q5 _\nq5 _ -> q4 _");
        assert_eq!(reduce_clone(&p), p);
    }

    #[test]
    fn walker_accepts_at_four() {
        let p = prepare(&prog("q0 > -> q0 R\nq0 0 -> q0 R\nq0 1 -> q0 R\nq0 _ -> q1 _"));
        let x = parse_input("01").unwrap();
        assert_eq!(simulate(&p, &x, 8, false).unwrap().outcome, Outcome::Accepted(4));
        assert_eq!(simulate(&p, &x, 3, false).unwrap().outcome, Outcome::Running);
        let run = simulate(&p, &x, 8, true).unwrap();
        let trace = run.trace.unwrap();
        assert_eq!(trace.len(), 9);
        assert_eq!(trace[4].state, ACCEPT);
        assert_eq!(trace[8], Configuration { step: 8, ..trace[4].clone() });
    }

    #[test]
    fn stuck_is_reported() {
        let p = prog("q0 > -> q0 R");
        let x = parse_input("0").unwrap();
        assert!(matches!(simulate(&p, &x, 4, false), Err(TmError::Stuck { state: 0, symbol: '0', step: 1 })));
    }

    #[test]
    fn natural_length_counts_digits() {
        let p = prog("q0 > -> q0 R\nq10 _ -> q1 _");
        assert_eq!(p.natural_length(), 7 + 1 + 8);
    }

    #[test]
    fn trace_json_shape() {
        let p = prepare(&prog("q0 > -> q2 >"));
        let run = simulate(&p, &parse_input("0").unwrap(), 1, true).unwrap();
        let v: serde_json::Value = serde_json::from_str(&trace_json(&run.trace.unwrap())).unwrap();
        assert_eq!(v[1]["state"], 2);
        assert_eq!(v[0]["tape"], ">0");
    }
}
