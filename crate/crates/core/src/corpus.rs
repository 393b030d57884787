//! Bundled machines and seeded generators for programs, sentences and
//! finite structures.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::eval::EqStructure;
use crate::fo::{Formula, Term, VarId, VarKind};
use crate::tm::{parse_program, Action, Instruction, Program, Symbol, BLANK, ONE, START, ZERO};

pub const MACHINES: [(&str, &str); 6] = [
    ("walker", include_str!("../machines/walker.tm")),
    ("immediate-reject", include_str!("../machines/immediate-reject.tm")),
    ("bit-flipper", include_str!("../machines/bit-flipper.tm")),
    ("left-bouncer", include_str!("../machines/left-bouncer.tm")),
    ("alternator", include_str!("../machines/alternator.tm")),
    ("one-step-acceptor", include_str!("../machines/one-step-acceptor.tm")),
];

pub fn machine(name: &str) -> Option<Program> {
    MACHINES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| parse_program(src).expect("bundled machine parses"))
}

pub fn machines() -> Vec<(&'static str, Program)> {
    MACHINES.iter().map(|(n, src)| (*n, parse_program(src).expect("bundled machine parses"))).collect()
}

const TAPE: [Symbol; 3] = [BLANK, ZERO, ONE];

fn working_states(states: u32) -> Vec<u32> {
    std::iter::once(0).chain(3..3 + states.saturating_sub(1)).collect()
}

/// A random deterministic program over `{_, >, 0, 1}` with `states` working
/// states (q0 and q3 upwards). Each (state, symbol) pair gets an
/// instruction with probability `density`.
pub fn random_program(rng: &mut impl Rng, states: u32, density: f64) -> Program {
    let work = working_states(states.max(1));
    let mut targets = work.clone();
    targets.extend([1, 2]);
    let mut ins = Vec::new();
    for &q in &work {
        for read in [START, BLANK, ZERO, ONE] {
            if !(q == 0 && read == START) && !rng.gen_bool(density) {
                continue;
            }
            let to = *targets.choose(rng).unwrap();
            let action = if read == START {
                if rng.gen_bool(0.8) {
                    Action::Right
                } else {
                    Action::Write(START)
                }
            } else {
                match rng.gen_range(0..4) {
                    0 => Action::Left,
                    1 => Action::Right,
                    _ => Action::Write(*TAPE.choose(rng).unwrap()),
                }
            };
            ins.push(Instruction { from: q, read, to, action });
        }
    }
    Program::new(ins).expect("generated program is well formed")
}

/// Adds instructions from a fresh state that no instruction targets, so
/// the result has the same irreducible clone as `p`.
pub fn add_dead_code(rng: &mut impl Rng, p: &Program) -> Program {
    let fresh = p.max_state().max(2) + 1 + rng.gen_range(0..3);
    let mut ins = p.instructions().to_vec();
    for read in [BLANK, ZERO, ONE] {
        if rng.gen_bool(0.6) {
            let to = rng.gen_range(0..fresh);
            let action = [Action::Left, Action::Right, Action::Write(ZERO)][rng.gen_range(0..3)];
            ins.push(Instruction { from: fresh, read, to, action });
        }
    }
    if ins.len() == p.len() {
        ins.push(Instruction { from: fresh, read: ONE, to: 0, action: Action::Right });
    }
    Program::new(ins).expect("dead code keeps the program well formed")
}

pub fn random_input(rng: &mut impl Rng, len: usize) -> Vec<Symbol> {
    (0..len.max(1)).map(|_| if rng.gen_bool(0.5) { ONE } else { ZERO }).collect()
}

pub fn random_term(rng: &mut impl Rng, scope: &[VarId], depth: u32) -> Term {
    let leaf = depth == 0 || rng.gen_bool(0.4);
    if leaf {
        if !scope.is_empty() && rng.gen_bool(0.8) {
            return Term::Var(*scope.choose(rng).unwrap());
        }
        return Term::bit(rng.gen_bool(0.5));
    }
    match rng.gen_range(0..3) {
        0 => Term::compl(random_term(rng, scope, depth - 1)),
        1 => Term::meet(random_term(rng, scope, depth - 1), random_term(rng, scope, depth - 1)),
        _ => Term::join(random_term(rng, scope, depth - 1), random_term(rng, scope, depth - 1)),
    }
}

struct SentenceGen {
    quantifiers: usize,
    bound: usize,
    next: u32,
}

impl SentenceGen {
    fn formula(&mut self, rng: &mut impl Rng, scope: &mut Vec<VarId>, depth: u32) -> Formula {
        let can_quantify = self.quantifiers > 0 && self.bound > 0;
        if depth == 0 || (rng.gen_bool(0.2) && !scope.is_empty()) {
            return Formula::eq(random_term(rng, scope, 2), random_term(rng, scope, 2));
        }
        let pick = if scope.is_empty() && can_quantify { 4 } else { rng.gen_range(0..6) };
        match pick {
            0 => Formula::not(self.formula(rng, scope, depth - 1)),
            1 => Formula::and(self.formula(rng, scope, depth - 1), self.formula(rng, scope, depth - 1)),
            2 => Formula::or(self.formula(rng, scope, depth - 1), self.formula(rng, scope, depth - 1)),
            3 => Formula::implies(self.formula(rng, scope, depth - 1), self.formula(rng, scope, depth - 1)),
            _ if can_quantify => {
                let k = rng.gen_range(1..=self.bound.min(3));
                self.quantifiers -= 1;
                self.bound -= k;
                let mut vars = Vec::with_capacity(k);
                for _ in 0..k {
                    // Occasionally rebind a variable already in scope.
                    let v = if !scope.is_empty() && rng.gen_bool(0.1) {
                        *scope.choose(rng).unwrap()
                    } else {
                        self.next += 1;
                        VarId::new(VarKind::X, 0, self.next - 1)
                    };
                    if !vars.contains(&v) {
                        vars.push(v);
                    }
                }
                let n = scope.len();
                scope.extend(vars.iter().copied());
                let body = self.formula(rng, scope, depth - 1);
                scope.truncate(n);
                if rng.gen_bool(0.5) {
                    Formula::forall(vars, body)
                } else {
                    Formula::exists(vars, body)
                }
            }
            _ => Formula::eq(random_term(rng, scope, 2), random_term(rng, scope, 2)),
        }
    }
}

/// A closed Boolean-algebra sentence with at most `max_quantifiers`
/// quantifier blocks, at most `max_bound` bound variables in total and
/// connective depth at most `max_depth`.
pub fn random_sentence(rng: &mut impl Rng, max_quantifiers: usize, max_bound: usize, max_depth: u32) -> Formula {
    let mut g = SentenceGen { quantifiers: max_quantifiers, bound: max_bound, next: 0 };
    g.formula(rng, &mut Vec::new(), max_depth)
}

/// A structure with `size` elements split into `classes` non-empty classes.
/// With `consts`, c0 and c1 land in different classes when possible.
pub fn random_structure(rng: &mut impl Rng, size: usize, classes: usize, consts: bool) -> EqStructure {
    let classes = classes.clamp(1, size.max(1));
    let mut class_of: Vec<usize> = (0..size).map(|e| if e < classes { e } else { rng.gen_range(0..classes) }).collect();
    class_of.shuffle(rng);
    let mut s = EqStructure { size, class_of, consts: None, n_formula: None };
    if consts && size > 0 {
        let c0 = rng.gen_range(0..size);
        let others: Vec<usize> = (0..size).filter(|&e| s.class_of[e] != s.class_of[c0]).collect();
        let c1 = others.choose(rng).copied().unwrap_or(c0);
        s.consts = Some([c0, c1]);
    }
    s
}
