//! Rewriting Boolean-algebra sentences into sentences over an equivalence
//! relation, optionally without constants, optionally through a formula
//! `N(x, y)` for disequality.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::eval::NFormula;
use crate::fo::{substitute, FoError, Formula, RelConst, Term, VarId, VarKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("input is not closed: {0} is free")]
    NotClosed(VarId),
    #[error("input must use the Boolean-algebra signature only")]
    Signature,
    #[error("compound term survives translation: {0}")]
    Residual(String),
    #[error("N must have exactly two free variables, found {0}")]
    NArity(usize),
    #[error(transparent)]
    Fo(#[from] FoError),
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TranslateReport {
    /// Rewriting passes after relativization.
    pub passes: usize,
    /// Boolean-signature symbol count before the first pass and after each.
    pub symbols: Vec<usize>,
    /// Formula size before the first pass and after each.
    pub sizes: Vec<usize>,
    pub warnings: Vec<String>,
}

const C0: Term = Term::Const(RelConst::C0);
const C1: Term = Term::Const(RelConst::C1);

fn check_input(f: &Formula) -> Result<(), TranslateError> {
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(TranslateError::NotClosed(v));
    }
    let sig = f.signature();
    if sig.equiv || sig.consts || sig.pred {
        return Err(TranslateError::Signature);
    }
    Ok(())
}

fn in_domain(v: VarId) -> Formula {
    Formula::or(Formula::Equiv(Term::Var(v), C0), Formula::Equiv(Term::Var(v), C1))
}

/// Relativizes quantifiers to `{c0, c1}` and turns `≈` into `∼`.
fn relativize(f: &Formula) -> Formula {
    match f {
        Formula::Eq(a, b) => Formula::Equiv(a.clone(), b.clone()),
        Formula::Equiv(..) | Formula::Pred(..) => f.clone(),
        Formula::Not(g) => Formula::not(relativize(g)),
        Formula::And(a, b) => Formula::and(relativize(a), relativize(b)),
        Formula::Or(a, b) => Formula::or(relativize(a), relativize(b)),
        Formula::Implies(a, b) => Formula::implies(relativize(a), relativize(b)),
        Formula::Forall(vs, g) => {
            let guard = Formula::conj(vs.iter().map(|v| in_domain(*v))).expect("non-empty block");
            Formula::forall(vs.clone(), Formula::implies(guard, relativize(g)))
        }
        Formula::Exists(vs, g) => {
            let guard = Formula::conj(vs.iter().map(|v| in_domain(*v))).expect("non-empty block");
            Formula::exists(vs.clone(), Formula::and(guard, relativize(g)))
        }
    }
}

fn is_const(t: &Term) -> bool {
    t.is_constant()
}

fn eqv(a: &Term, b: Term) -> Formula {
    Formula::Equiv(a.clone(), b)
}

/// `t1 ∪ t2 ∼ u` (join) or `t1 ∩ t2 ∼ u` (meet) for non-constant `u`.
fn split_rule(join: bool, t1: &Term, t2: &Term, u: &Term) -> Formula {
    let (first, second) = if join { (C1, C0) } else { (C0, C1) };
    let any = Formula::or(eqv(t1, first.clone()), eqv(t2, first.clone()));
    let all = Formula::and(eqv(t1, second.clone()), eqv(t2, second.clone()));
    Formula::and(Formula::implies(any, eqv(u, first)), Formula::implies(all, eqv(u, second)))
}

/// `t1 ∪ t2 ∼ c` (join) or `t1 ∩ t2 ∼ c` (meet) for a constant `c`.
fn expand_rule(join: bool, t1: &Term, t2: &Term, c: RelConst) -> Formula {
    let ct = Term::Const(c);
    let (a, b) = (eqv(t1, ct.clone()), eqv(t2, ct));
    if join == (c == RelConst::C1) {
        Formula::or(a, b)
    } else {
        Formula::and(a, b)
    }
}

fn to_rel(t: &Term) -> Option<Term> {
    match t {
        Term::Zero => Some(C0),
        Term::One => Some(C1),
        _ => None,
    }
}

/// One rewrite of a single atom, or `None` when it is already final.
fn rewrite_atom(t: &Term, s: &Term) -> Option<Formula> {
    if let Term::Compl(x) = t {
        return Some(Formula::not(Formula::Equiv((**x).clone(), s.clone())));
    }
    if let Term::Compl(y) = s {
        return Some(Formula::not(Formula::Equiv(t.clone(), (**y).clone())));
    }
    for (a, u) in [(t, s), (s, t)] {
        if let (Term::Join(x, y) | Term::Meet(x, y), false) = (a, is_const(u)) {
            return Some(split_rule(matches!(a, Term::Join(..)), x, y, u));
        }
    }
    if let Some(c) = to_rel(t) {
        return Some(Formula::Equiv(c, s.clone()));
    }
    if let Some(c) = to_rel(s) {
        return Some(Formula::Equiv(t.clone(), c));
    }
    for (a, c) in [(t, s), (s, t)] {
        if let (Term::Join(x, y) | Term::Meet(x, y), Term::Const(k)) = (a, c) {
            return Some(expand_rule(matches!(a, Term::Join(..)), x, y, *k));
        }
    }
    None
}

fn pass(f: &Formula, changed: &mut bool) -> Formula {
    match f {
        Formula::Equiv(t, s) => match rewrite_atom(t, s) {
            Some(g) => {
                *changed = true;
                g
            }
            None => f.clone(),
        },
        Formula::Eq(..) | Formula::Pred(..) => f.clone(),
        Formula::Not(g) => Formula::not(pass(g, changed)),
        Formula::And(a, b) => Formula::and(pass(a, changed), pass(b, changed)),
        Formula::Or(a, b) => Formula::or(pass(a, changed), pass(b, changed)),
        Formula::Implies(a, b) => Formula::implies(pass(a, changed), pass(b, changed)),
        Formula::Forall(vs, g) => Formula::forall(vs.clone(), pass(g, changed)),
        Formula::Exists(vs, g) => Formula::exists(vs.clone(), pass(g, changed)),
    }
}

fn residual(f: &Formula) -> Option<String> {
    let mut out = None;
    f.visit(&mut |g| {
        if let Formula::Equiv(a, b) = g {
            if out.is_none() && (a.boolean_symbols() > 0 || b.boolean_symbols() > 0) {
                out = Some(crate::fo::render_natural(g));
            }
        }
    });
    out
}

/// Sentence over `{∼, c0, c1}` true in every two-class structure with
/// `c0 ≁ c1` exactly when the input holds in the two-element algebra.
pub fn translate_20(f: &Formula) -> Result<(Formula, TranslateReport), TranslateError> {
    check_input(f)?;
    let mut g = relativize(f);
    let mut report = TranslateReport { symbols: vec![g.boolean_symbols()], sizes: vec![g.size()], ..Default::default() };
    loop {
        let mut changed = false;
        let next = pass(&g, &mut changed);
        if !changed {
            break;
        }
        report.passes += 1;
        let (before, after) = (g.size(), next.size());
        if after > 5 * before {
            report.warnings.push(format!("pass {} grew the formula from {before} to {after} nodes", report.passes));
        }
        report.symbols.push(next.boolean_symbols());
        report.sizes.push(after);
        g = next;
    }
    if let Some(atom) = residual(&g) {
        return Err(TranslateError::Residual(atom));
    }
    Ok((g, report))
}

fn fresh_group(vars: impl IntoIterator<Item = VarId>, kind: VarKind) -> u128 {
    vars.into_iter().filter(|v| v.kind == kind).map(|v| v.group + 1).max().unwrap_or(0)
}

fn replace_consts_term(t: &Term, a: &Term, b: &Term) -> Term {
    match t {
        Term::Const(RelConst::C0) => a.clone(),
        Term::Const(RelConst::C1) => b.clone(),
        Term::Compl(x) => Term::compl(replace_consts_term(x, a, b)),
        Term::Meet(x, y) => Term::meet(replace_consts_term(x, a, b), replace_consts_term(y, a, b)),
        Term::Join(x, y) => Term::join(replace_consts_term(x, a, b), replace_consts_term(y, a, b)),
        _ => t.clone(),
    }
}

fn map_atoms(f: &Formula, atom: &mut impl FnMut(&Formula) -> Formula) -> Formula {
    match f {
        Formula::Eq(..) | Formula::Equiv(..) | Formula::Pred(..) => atom(f),
        Formula::Not(g) => Formula::not(map_atoms(g, atom)),
        Formula::And(x, y) => Formula::and(map_atoms(x, atom), map_atoms(y, atom)),
        Formula::Or(x, y) => Formula::or(map_atoms(x, atom), map_atoms(y, atom)),
        Formula::Implies(x, y) => Formula::implies(map_atoms(x, atom), map_atoms(y, atom)),
        Formula::Forall(vs, g) => Formula::forall(vs.clone(), map_atoms(g, atom)),
        Formula::Exists(vs, g) => Formula::exists(vs.clone(), map_atoms(g, atom)),
    }
}

/// The translated body with `c0, c1` replaced by fresh `a, b`.
fn constant_free(f: &Formula) -> Result<(VarId, VarId, Formula, TranslateReport), TranslateError> {
    let (g, report) = translate_20(f)?;
    let group = fresh_group(g.all_vars(), VarKind::A);
    let a = VarId::new(VarKind::A, group, 0);
    let b = VarId::new(VarKind::A, group, 1);
    let (ta, tb) = (Term::Var(a), Term::Var(b));
    let body = map_atoms(&g, &mut |atom| match atom {
        Formula::Equiv(x, y) => Formula::Equiv(replace_consts_term(x, &ta, &tb), replace_consts_term(y, &ta, &tb)),
        _ => atom.clone(),
    });
    Ok((a, b, body, report))
}

/// Sentence over `{∼}` alone: `∃a,b[¬a∼b ∧ φ(a, b)]`.
pub fn translate_21(f: &Formula) -> Result<(Formula, TranslateReport), TranslateError> {
    let (a, b, body, report) = constant_free(f)?;
    let distinct = Formula::not(Formula::Equiv(Term::Var(a), Term::Var(b)));
    Ok((Formula::exists(vec![a, b], Formula::and(distinct, body)), report))
}

/// Renames every bound variable of `f` to a fresh `y` variable.
fn rename_bound(f: &Formula, group: u128, next: &mut u32, scope: &mut Vec<(VarId, VarId)>) -> Formula {
    let rename_term = |t: &Term, scope: &Vec<(VarId, VarId)>| {
        let map: HashMap<VarId, Term> = t
            .vars()
            .into_iter()
            .filter_map(|v| scope.iter().rev().find(|(o, _)| *o == v).map(|(_, n)| (v, Term::Var(*n))))
            .collect();
        subst_term(t, &map)
    };
    match f {
        Formula::Eq(x, y) => Formula::Eq(rename_term(x, scope), rename_term(y, scope)),
        Formula::Equiv(x, y) => Formula::Equiv(rename_term(x, scope), rename_term(y, scope)),
        Formula::Pred(x, y) => Formula::Pred(rename_term(x, scope), rename_term(y, scope)),
        Formula::Not(g) => Formula::not(rename_bound(g, group, next, scope)),
        Formula::And(x, y) => Formula::and(rename_bound(x, group, next, scope), rename_bound(y, group, next, scope)),
        Formula::Or(x, y) => Formula::or(rename_bound(x, group, next, scope), rename_bound(y, group, next, scope)),
        Formula::Implies(x, y) => {
            Formula::implies(rename_bound(x, group, next, scope), rename_bound(y, group, next, scope))
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let n = scope.len();
            let mut fresh = Vec::with_capacity(vs.len());
            for v in vs {
                let w = VarId::new(VarKind::Y, group, *next);
                *next += 1;
                scope.push((*v, w));
                fresh.push(w);
            }
            let body = rename_bound(g, group, next, scope);
            scope.truncate(n);
            if matches!(f, Formula::Forall(..)) {
                Formula::forall(fresh, body)
            } else {
                Formula::exists(fresh, body)
            }
        }
    }
}

fn subst_term(t: &Term, map: &HashMap<VarId, Term>) -> Term {
    match t {
        Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Compl(x) => Term::compl(subst_term(x, map)),
        Term::Meet(x, y) => Term::meet(subst_term(x, map), subst_term(y, map)),
        Term::Join(x, y) => Term::join(subst_term(x, map), subst_term(y, map)),
        _ => t.clone(),
    }
}

/// Sentence using `N` in place of `∼`: `∃a,b[N(a,b) ∧ φ(a, b)]` with each
/// `t∼s` replaced by `¬N(t, s)`. `N` is written out at every use; its
/// arguments are its free variables in sorted order.
pub fn translate_22(f: &Formula, n: &Formula) -> Result<(Formula, TranslateReport), TranslateError> {
    let nf = NFormula::new(n.clone()).map_err(TranslateError::NArity)?;
    let (a, b, body, report) = constant_free(f)?;
    let group = fresh_group(body.all_vars().into_iter().chain(n.all_vars()), VarKind::Y);
    let mut next = 0;
    let mut inline = |x: &Term, y: &Term| -> Result<Formula, TranslateError> {
        let renamed = rename_bound(&nf.formula, group, &mut next, &mut Vec::new());
        let map = HashMap::from([(nf.args[0], x.clone()), (nf.args[1], y.clone())]);
        Ok(substitute(&renamed, &map)?)
    };
    let mut err = None;
    let body = map_atoms(&body, &mut |atom| match atom {
        Formula::Equiv(x, y) => match inline(x, y) {
            Ok(g) => Formula::not(g),
            Err(e) => {
                err.get_or_insert(e);
                atom.clone()
            }
        },
        _ => atom.clone(),
    });
    if let Some(e) = err {
        return Err(e);
    }
    let head = inline(&Term::Var(a), &Term::Var(b))?;
    Ok((Formula::exists(vec![a, b], Formula::and(head, body)), report))
}
