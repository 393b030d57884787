//! Truth of sentences over the two-element Boolean algebra, plus finite
//! relational structures.

mod circuit;
mod naive;
pub mod qbf;
pub mod qcir;
mod relational;
mod search;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::fo::{Formula, Term, VarId};

pub use relational::{eval_relational, EqStructure, NFormula};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Naive,
    ShortCircuit,
    Guarded,
    QbfSearch,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Naive, Strategy::ShortCircuit, Strategy::Guarded, Strategy::QbfSearch];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Strategy::Naive => "naive",
            Strategy::ShortCircuit => "shortcircuit",
            Strategy::Guarded => "guarded",
            Strategy::QbfSearch => "qbf",
        };
        f.write_str(s)
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Strategy, String> {
        match s {
            "naive" => Ok(Strategy::Naive),
            "shortcircuit" | "short-circuit" => Ok(Strategy::ShortCircuit),
            "guarded" => Ok(Strategy::Guarded),
            "qbf" | "qbfsearch" => Ok(Strategy::QbfSearch),
            _ => Err(format!("unknown strategy `{s}` (naive, shortcircuit, guarded, qbf)")),
        }
    }
}

/// Limits on an evaluation. `None` means unlimited.
#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    pub time: Option<Duration>,
    pub nodes: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget::default()
    }

    pub fn time(d: Duration) -> Budget {
        Budget { time: Some(d), nodes: None }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("budget exceeded after {nodes} nodes and {elapsed_ms} ms")]
    BudgetExceeded { nodes: u64, elapsed_ms: u128 },
    #[error("variable {0} is not assigned")]
    Unassigned(VarId),
    #[error("{0} is not part of this signature")]
    Signature(&'static str),
    #[error("structure has an empty domain")]
    EmptyDomain,
    #[error("structure does not interpret {0}")]
    MissingInterpretation(&'static str),
    #[error("malformed solver input at line {line}: {msg}")]
    Format { line: usize, msg: String },
}

/// Shared node counter and deadline.
pub(crate) struct Meter {
    start: Instant,
    deadline: Option<Instant>,
    max_nodes: Option<u64>,
    pub(crate) nodes: u64,
}

impl Meter {
    pub(crate) fn new(b: Budget) -> Meter {
        let start = Instant::now();
        Meter { start, deadline: b.time.map(|d| start + d), max_nodes: b.nodes, nodes: 0 }
    }

    #[inline]
    pub(crate) fn tick(&mut self) -> Result<(), EvalError> {
        self.nodes += 1;
        let over_nodes = self.max_nodes.is_some_and(|m| self.nodes > m);
        let over_time = self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() > d);
        if over_nodes || over_time {
            return Err(EvalError::BudgetExceeded {
                nodes: self.nodes,
                elapsed_ms: self.start.elapsed().as_millis(),
            });
        }
        Ok(())
    }
}

pub type Assignment = HashMap<VarId, bool>;

pub fn eval_term(t: &Term, a: &Assignment) -> Result<bool, EvalError> {
    Ok(match t {
        Term::Zero => false,
        Term::One => true,
        Term::Var(v) => *a.get(v).ok_or(EvalError::Unassigned(*v))?,
        Term::Compl(x) => !eval_term(x, a)?,
        Term::Meet(x, y) => eval_term(x, a)? & eval_term(y, a)?,
        Term::Join(x, y) => eval_term(x, a)? | eval_term(y, a)?,
        Term::Const(_) => return Err(EvalError::Signature("c0/c1")),
    })
}

/// Evaluates a tuple of closed terms.
pub fn eval_term_bits(ts: &[Term]) -> Vec<bool> {
    let empty = Assignment::new();
    ts.iter().map(|t| eval_term(t, &empty).expect("closed term")).collect()
}

/// Truth of a closed sentence.
pub fn eval_sentence(f: &Formula, s: Strategy, b: Budget) -> Result<bool, EvalError> {
    eval_with(f, &Assignment::new(), s, b)
}

/// Truth of a formula under an assignment covering its free variables.
pub fn eval_with(f: &Formula, a: &Assignment, s: Strategy, b: Budget) -> Result<bool, EvalError> {
    if let Some(v) = f.free_vars().into_iter().find(|v| !a.contains_key(v)) {
        return Err(EvalError::Unassigned(v));
    }
    let mut meter = Meter::new(b);
    match s {
        Strategy::Naive => naive::eval(f, a, &mut meter),
        Strategy::ShortCircuit => search::eval(f, a, false, &mut meter),
        Strategy::Guarded => search::eval(f, a, true, &mut meter),
        Strategy::QbfSearch => {
            let closed = close_over(f, a);
            let q = qbf::Qbf::from_formula(&closed)?;
            q.solve(&mut meter)
        }
    }
}

/// Replaces assigned free variables by constants.
fn close_over(f: &Formula, a: &Assignment) -> Formula {
    if a.is_empty() {
        return f.clone();
    }
    let map = a.iter().map(|(v, b)| (*v, Term::bit(*b))).collect();
    crate::fo::substitute(f, &map).expect("constants cannot be captured")
}
