//! Brute-force truth over finite structures with an equivalence relation.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::fo::{Formula, RelConst, Term, VarId};

/// A formula `N(x, y)` with its two argument variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NFormula {
    pub formula: Formula,
    pub args: [VarId; 2],
}

impl NFormula {
    /// Takes the arguments from the free variables in sorted order.
    pub fn new(formula: Formula) -> Result<NFormula, usize> {
        let free: Vec<VarId> = formula.free_vars().into_iter().collect();
        match free.as_slice() {
            [a, b] => Ok(NFormula { args: [*a, *b], formula }),
            _ => Err(free.len()),
        }
    }
}

/// Domain `0..size`; `class_of[e]` names the ∼-class of element `e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ModelSpec", into = "ModelSpec")]
pub struct EqStructure {
    pub size: usize,
    pub class_of: Vec<usize>,
    pub consts: Option<[usize; 2]>,
    pub n_formula: Option<NFormula>,
}

/// JSON shape: `{"size": 3, "classes": [[0, 2], [1]], "consts": [0, 1]}`.
#[derive(Serialize, Deserialize)]
struct ModelSpec {
    size: usize,
    classes: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    consts: Option<[usize; 2]>,
}

impl TryFrom<ModelSpec> for EqStructure {
    type Error = String;

    fn try_from(m: ModelSpec) -> Result<EqStructure, String> {
        let mut s = EqStructure::from_classes(m.size, &m.classes)?;
        if let Some(c) = m.consts {
            if c.iter().any(|&e| e >= m.size) {
                return Err("constant outside the domain".into());
            }
            s.consts = Some(c);
        }
        Ok(s)
    }
}

impl From<EqStructure> for ModelSpec {
    fn from(s: EqStructure) -> ModelSpec {
        ModelSpec { size: s.size, classes: s.classes(), consts: s.consts }
    }
}

impl EqStructure {
    pub fn from_classes(size: usize, classes: &[Vec<usize>]) -> Result<EqStructure, String> {
        let mut class_of = vec![usize::MAX; size];
        for (i, c) in classes.iter().enumerate() {
            for &e in c {
                if e >= size {
                    return Err(format!("element {e} outside the domain"));
                }
                if class_of[e] != usize::MAX {
                    return Err(format!("element {e} in two classes"));
                }
                class_of[e] = i;
            }
        }
        if let Some(e) = class_of.iter().position(|&c| c == usize::MAX) {
            return Err(format!("element {e} in no class"));
        }
        Ok(EqStructure { size, class_of, consts: None, n_formula: None })
    }

    /// Every element in its own class: ∼ is equality.
    pub fn discrete(size: usize) -> EqStructure {
        EqStructure { size, class_of: (0..size).collect(), consts: None, n_formula: None }
    }

    pub fn with_consts(mut self, c0: usize, c1: usize) -> EqStructure {
        self.consts = Some([c0, c1]);
        self
    }

    pub fn with_n(mut self, n: NFormula) -> EqStructure {
        self.n_formula = Some(n);
        self
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let k = self.class_of.iter().map(|c| c + 1).max().unwrap_or(0);
        let mut out = vec![Vec::new(); k];
        for (e, &c) in self.class_of.iter().enumerate() {
            out[c].push(e);
        }
        out.retain(|c| !c.is_empty());
        out
    }

    pub fn num_classes(&self) -> usize {
        self.classes().len()
    }

    /// Relabels elements: element `e` becomes `perm[e]`.
    pub fn permuted(&self, perm: &[usize]) -> EqStructure {
        let mut class_of = vec![0; self.size];
        for e in 0..self.size {
            class_of[perm[e]] = self.class_of[e];
        }
        EqStructure {
            size: self.size,
            class_of,
            consts: self.consts.map(|[a, b]| [perm[a], perm[b]]),
            n_formula: self.n_formula.clone(),
        }
    }
}

type Env = HashMap<VarId, usize>;

fn term(t: &Term, m: &EqStructure, env: &Env) -> Result<usize, EvalError> {
    match t {
        Term::Var(v) => env.get(v).copied().ok_or(EvalError::Unassigned(*v)),
        Term::Const(c) => {
            let cs = m.consts.ok_or(EvalError::MissingInterpretation("c0/c1"))?;
            Ok(cs[matches!(c, RelConst::C1) as usize])
        }
        _ => Err(EvalError::Signature("Boolean term")),
    }
}

fn go(f: &Formula, m: &EqStructure, env: &mut Env) -> Result<bool, EvalError> {
    Ok(match f {
        Formula::Eq(..) => return Err(EvalError::Signature("≈")),
        Formula::Equiv(a, b) => m.class_of[term(a, m, env)?] == m.class_of[term(b, m, env)?],
        Formula::Pred(a, b) => {
            let n = m.n_formula.as_ref().ok_or(EvalError::MissingInterpretation("N"))?;
            let mut inner = Env::new();
            inner.insert(n.args[0], term(a, m, env)?);
            inner.insert(n.args[1], term(b, m, env)?);
            go(&n.formula, m, &mut inner)?
        }
        Formula::Not(g) => !go(g, m, env)?,
        Formula::And(a, b) => go(a, m, env)? && go(b, m, env)?,
        Formula::Or(a, b) => go(a, m, env)? || go(b, m, env)?,
        Formula::Implies(a, b) => !go(a, m, env)? || go(b, m, env)?,
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let forall = matches!(f, Formula::Forall(..));
            let saved: Vec<Option<usize>> = vs.iter().map(|v| env.get(v).copied()).collect();
            let mut idx = vec![0usize; vs.len()];
            let mut result = forall;
            'outer: loop {
                for (v, &e) in vs.iter().zip(&idx) {
                    env.insert(*v, e);
                }
                if go(g, m, env)? != forall {
                    result = !forall;
                    break;
                }
                for i in (0..idx.len()).rev() {
                    idx[i] += 1;
                    if idx[i] < m.size {
                        continue 'outer;
                    }
                    idx[i] = 0;
                }
                break;
            }
            for (v, old) in vs.iter().zip(saved) {
                match old {
                    Some(e) => env.insert(*v, e),
                    None => env.remove(v),
                };
            }
            result
        }
    })
}

/// Truth of a closed relational sentence in a finite structure.
pub fn eval_relational(f: &Formula, m: &EqStructure) -> Result<bool, EvalError> {
    if m.size == 0 {
        return Err(EvalError::EmptyDomain);
    }
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(EvalError::Unassigned(v));
    }
    go(f, m, &mut Env::new())
}
