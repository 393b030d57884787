use std::collections::HashMap;

use super::{FoError, Formula, Term, VarId};

/// Simultaneous capture-avoiding substitution of `from[i]` by `to[i]`.
pub fn substitute_tuple(f: &Formula, from: &[VarId], to: &[Term]) -> Result<Formula, FoError> {
    if from.len() != to.len() {
        return Err(FoError::LengthMismatch(from.len(), to.len()));
    }
    let map: HashMap<VarId, Term> = from.iter().copied().zip(to.iter().cloned()).collect();
    substitute(f, &map)
}

pub fn substitute(f: &Formula, map: &HashMap<VarId, Term>) -> Result<Formula, FoError> {
    if map.is_empty() {
        return Ok(f.clone());
    }
    Ok(match f {
        Formula::Eq(a, b) => Formula::Eq(subst_term(a, map), subst_term(b, map)),
        Formula::Equiv(a, b) => Formula::Equiv(subst_term(a, map), subst_term(b, map)),
        Formula::Pred(a, b) => Formula::Pred(subst_term(a, map), subst_term(b, map)),
        Formula::Not(g) => Formula::not(substitute(g, map)?),
        Formula::And(a, b) => Formula::and(substitute(a, map)?, substitute(b, map)?),
        Formula::Or(a, b) => Formula::or(substitute(a, map)?, substitute(b, map)?),
        Formula::Implies(a, b) => Formula::implies(substitute(a, map)?, substitute(b, map)?),
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let inner: HashMap<VarId, Term> =
                map.iter().filter(|(k, _)| !vs.contains(k)).map(|(k, t)| (*k, t.clone())).collect();
            let free = g.free_vars();
            for (k, t) in &inner {
                if !free.contains(k) {
                    continue;
                }
                if let Some(c) = t.vars().into_iter().find(|tv| vs.contains(tv)) {
                    return Err(FoError::Capture(c));
                }
            }
            let body = substitute(g, &inner)?;
            match f {
                Formula::Forall(..) => Formula::Forall(vs.clone(), Box::new(body)),
                _ => Formula::Exists(vs.clone(), Box::new(body)),
            }
        }
    })
}

fn subst_term(t: &Term, map: &HashMap<VarId, Term>) -> Term {
    match t {
        Term::Var(v) => map.get(v).cloned().unwrap_or(Term::Var(*v)),
        Term::Compl(a) => Term::compl(subst_term(a, map)),
        Term::Meet(a, b) => Term::meet(subst_term(a, map), subst_term(b, map)),
        Term::Join(a, b) => Term::join(subst_term(a, map), subst_term(b, map)),
        other => other.clone(),
    }
}
