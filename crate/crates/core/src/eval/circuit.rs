//! Formulas lowered to an arena with dense variable indices.

use std::collections::{BTreeSet, HashMap};

use super::EvalError;
use crate::fo::{Formula, Term, VarId};

pub(crate) type TId = u32;
pub(crate) type FId = u32;

#[derive(Clone, Debug)]
pub(crate) enum TNode {
    Const(bool),
    Var(u32),
    Not(TId),
    And(TId, TId),
    Or(TId, TId),
}

#[derive(Clone, Debug)]
pub(crate) enum FNode {
    Iff(TId, TId),
    Not(FId),
    And(FId, FId),
    Or(FId, FId),
    Imp(FId, FId),
    Quant { forall: bool, vars: Vec<u32>, body: FId },
}

/// Variable pins `var := term`; every disjunct of a guard is one of these.
pub(crate) type Pins = Vec<(u32, TId)>;

#[derive(Clone, Debug)]
pub(crate) enum GuardPart {
    /// One of the listed pin sets holds.
    Cases(Vec<Pins>),
    /// When the closed premise holds, one of the pin sets holds.
    Cond(FId, Vec<Pins>),
}

#[derive(Debug, Default)]
pub(crate) struct Circuit {
    pub terms: Vec<TNode>,
    pub nodes: Vec<FNode>,
    pub root: FId,
    pub var_ids: Vec<VarId>,
    /// Free variables of each quantifier node, empty for other nodes.
    pub free: Vec<Vec<u32>>,
    pub guards: Vec<Vec<GuardPart>>,
}

struct Builder {
    c: Circuit,
    index: HashMap<VarId, u32>,
    /// With renaming, each binding gets its own index.
    rename: bool,
    scope: Vec<(VarId, u32)>,
}

impl Builder {
    fn var(&mut self, v: VarId) -> u32 {
        if let Some(&(_, i)) = self.scope.iter().rev().find(|(w, _)| *w == v) {
            return i;
        }
        if let Some(&i) = self.index.get(&v) {
            return i;
        }
        let i = self.fresh(v);
        self.index.insert(v, i);
        i
    }

    fn fresh(&mut self, v: VarId) -> u32 {
        self.c.var_ids.push(v);
        (self.c.var_ids.len() - 1) as u32
    }

    fn term(&mut self, t: &Term) -> Result<TId, EvalError> {
        let node = match t {
            Term::Zero => TNode::Const(false),
            Term::One => TNode::Const(true),
            Term::Var(v) => TNode::Var(self.var(*v)),
            Term::Compl(a) => TNode::Not(self.term(a)?),
            Term::Meet(a, b) => TNode::And(self.term(a)?, self.term(b)?),
            Term::Join(a, b) => TNode::Or(self.term(a)?, self.term(b)?),
            Term::Const(_) => return Err(EvalError::Signature("c0/c1")),
        };
        self.c.terms.push(node);
        Ok((self.c.terms.len() - 1) as TId)
    }

    fn push(&mut self, n: FNode) -> FId {
        self.c.nodes.push(n);
        self.c.free.push(Vec::new());
        self.c.guards.push(Vec::new());
        (self.c.nodes.len() - 1) as FId
    }

    fn formula(&mut self, f: &Formula) -> Result<FId, EvalError> {
        let node = match f {
            Formula::Eq(a, b) => FNode::Iff(self.term(a)?, self.term(b)?),
            Formula::Equiv(..) => return Err(EvalError::Signature("~")),
            Formula::Pred(..) => return Err(EvalError::Signature("N")),
            Formula::Not(g) => FNode::Not(self.formula(g)?),
            Formula::And(a, b) => FNode::And(self.formula(a)?, self.formula(b)?),
            Formula::Or(a, b) => FNode::Or(self.formula(a)?, self.formula(b)?),
            Formula::Implies(a, b) => FNode::Imp(self.formula(a)?, self.formula(b)?),
            Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                let n = self.scope.len();
                let mut vars = Vec::with_capacity(vs.len());
                for v in vs {
                    let i = if self.rename { self.fresh(*v) } else { self.var(*v) };
                    self.scope.push((*v, i));
                    vars.push(i);
                }
                let body = self.formula(g)?;
                self.scope.truncate(n);
                FNode::Quant { forall: matches!(f, Formula::Forall(..)), vars, body }
            }
        };
        Ok(self.push(node))
    }
}

impl Circuit {
    pub(crate) fn compile(f: &Formula, rename: bool) -> Result<Circuit, EvalError> {
        let mut b = Builder { c: Circuit::default(), index: HashMap::new(), rename, scope: Vec::new() };
        // Free variables get indices before anything is bound.
        for v in f.free_vars() {
            b.var(v);
        }
        b.c.root = b.formula(f)?;
        let mut c = b.c;
        c.compute_free();
        c.compute_guards();
        Ok(c)
    }

    pub(crate) fn num_vars(&self) -> usize {
        self.var_ids.len()
    }

    pub(crate) fn term_vars(&self, t: TId, out: &mut BTreeSet<u32>) {
        match self.terms[t as usize] {
            TNode::Const(_) => {}
            TNode::Var(v) => {
                out.insert(v);
            }
            TNode::Not(a) => self.term_vars(a, out),
            TNode::And(a, b) | TNode::Or(a, b) => {
                self.term_vars(a, out);
                self.term_vars(b, out);
            }
        }
    }

    fn compute_free(&mut self) {
        // Children always precede parents in the arena.
        let mut sets: Vec<BTreeSet<u32>> = Vec::with_capacity(self.nodes.len());
        for i in 0..self.nodes.len() {
            let s = match &self.nodes[i] {
                FNode::Iff(a, b) => {
                    let mut s = BTreeSet::new();
                    self.term_vars(*a, &mut s);
                    self.term_vars(*b, &mut s);
                    s
                }
                FNode::Not(a) => sets[*a as usize].clone(),
                FNode::And(a, b) | FNode::Or(a, b) | FNode::Imp(a, b) => {
                    sets[*a as usize].union(&sets[*b as usize]).copied().collect()
                }
                FNode::Quant { vars, body, .. } => {
                    let mut s = sets[*body as usize].clone();
                    for v in vars {
                        s.remove(v);
                    }
                    s
                }
            };
            if matches!(self.nodes[i], FNode::Quant { .. }) {
                self.free[i] = s.iter().copied().collect();
            }
            sets.push(s);
        }
    }

    fn compute_guards(&mut self) {
        for i in 0..self.nodes.len() {
            if let FNode::Quant { forall, vars, body } = &self.nodes[i] {
                let g = self.extract_guard(*forall, vars, *body);
                self.guards[i] = g;
            }
        }
    }

    fn flatten(&self, f: FId, and: bool, out: &mut Vec<FId>) {
        match self.nodes[f as usize] {
            FNode::And(a, b) if and => {
                self.flatten(a, and, out);
                self.flatten(b, and, out);
            }
            FNode::Or(a, b) if !and => {
                self.flatten(a, and, out);
                self.flatten(b, and, out);
            }
            _ => out.push(f),
        }
    }

    fn formula_vars(&self, f: FId) -> BTreeSet<u32> {
        let mut s = BTreeSet::new();
        self.collect_formula_vars(f, &mut s);
        s
    }

    fn collect_formula_vars(&self, f: FId, out: &mut BTreeSet<u32>) {
        match &self.nodes[f as usize] {
            FNode::Iff(a, b) => {
                self.term_vars(*a, out);
                self.term_vars(*b, out);
            }
            FNode::Not(a) => self.collect_formula_vars(*a, out),
            FNode::And(a, b) | FNode::Or(a, b) | FNode::Imp(a, b) => {
                self.collect_formula_vars(*a, out);
                self.collect_formula_vars(*b, out);
            }
            FNode::Quant { .. } => out.extend(self.free[f as usize].iter().copied()),
        }
    }

    /// Pin sets for a disjunction of conjunctions of `var ≈ term` atoms.
    fn disjunct_pins(&self, f: FId, block: &[u32], blocked: &BTreeSet<u32>) -> Option<Vec<Pins>> {
        let mut disjuncts = Vec::new();
        self.flatten(f, false, &mut disjuncts);
        let mut out = Vec::with_capacity(disjuncts.len());
        for d in disjuncts {
            let mut atoms = Vec::new();
            self.flatten(d, true, &mut atoms);
            let mut pins: Pins = Vec::new();
            for a in atoms {
                let FNode::Iff(l, r) = self.nodes[a as usize] else { continue };
                for (x, t) in [(l, r), (r, l)] {
                    let TNode::Var(v) = self.terms[x as usize] else { continue };
                    if !block.contains(&v) || pins.iter().any(|p| p.0 == v) {
                        continue;
                    }
                    let mut tv = BTreeSet::new();
                    self.term_vars(t, &mut tv);
                    if tv.is_disjoint(blocked) {
                        pins.push((v, t));
                        break;
                    }
                }
            }
            if pins.is_empty() {
                return None;
            }
            out.push(pins);
        }
        Some(out)
    }

    /// Guard conditions usable to narrow the enumeration of `vars`.
    ///
    /// For `∀` the premise of an implication is used, for `∃` the conjuncts
    /// of a conjunction; inner quantifier prefixes are looked through.
    fn extract_guard(&self, forall: bool, vars: &[u32], body: FId) -> Vec<GuardPart> {
        let mut blocked: BTreeSet<u32> = vars.iter().copied().collect();
        let mut f = body;
        while let FNode::Quant { vars: inner, body: b, .. } = &self.nodes[f as usize] {
            blocked.extend(inner.iter().copied());
            f = *b;
        }
        let premise = match (&self.nodes[f as usize], forall) {
            (FNode::Imp(p, _), true) => *p,
            (FNode::And(..), false) => f,
            _ => return Vec::new(),
        };
        let mut conjuncts = Vec::new();
        self.flatten(premise, true, &mut conjuncts);
        let mut parts = Vec::new();
        for c in conjuncts {
            if let FNode::Imp(p, e) = self.nodes[c as usize] {
                if self.formula_vars(p).is_disjoint(&blocked) {
                    if let Some(pins) = self.disjunct_pins(e, vars, &blocked) {
                        parts.push(GuardPart::Cond(p, pins));
                    }
                }
                continue;
            }
            if let Some(pins) = self.disjunct_pins(c, vars, &blocked) {
                parts.push(GuardPart::Cases(pins));
            }
        }
        parts
    }
}
