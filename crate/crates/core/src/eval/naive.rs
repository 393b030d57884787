//! Reference evaluator: full enumeration of every quantifier, no pruning.

use super::{eval_term, Assignment, EvalError, Meter};
use crate::fo::Formula;

pub(crate) fn eval(f: &Formula, a: &Assignment, meter: &mut Meter) -> Result<bool, EvalError> {
    let mut env = a.clone();
    go(f, &mut env, meter)
}

fn go(f: &Formula, env: &mut Assignment, meter: &mut Meter) -> Result<bool, EvalError> {
    meter.tick()?;
    Ok(match f {
        Formula::Eq(a, b) => eval_term(a, env)? == eval_term(b, env)?,
        Formula::Equiv(..) => return Err(EvalError::Signature("~")),
        Formula::Pred(..) => return Err(EvalError::Signature("N")),
        Formula::Not(g) => !go(g, env, meter)?,
        Formula::And(a, b) => {
            let x = go(a, env, meter)?;
            let y = go(b, env, meter)?;
            x && y
        }
        Formula::Or(a, b) => {
            let x = go(a, env, meter)?;
            let y = go(b, env, meter)?;
            x || y
        }
        Formula::Implies(a, b) => {
            let x = go(a, env, meter)?;
            let y = go(b, env, meter)?;
            !x || y
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let forall = matches!(f, Formula::Forall(..));
            let saved: Vec<Option<bool>> = vs.iter().map(|v| env.get(v).copied()).collect();
            let mut all = true;
            let mut any = false;
            assert!(vs.len() < 128, "quantifier block too wide to enumerate");
            for bits in 0u128..1 << vs.len() {
                for (i, v) in vs.iter().enumerate() {
                    env.insert(*v, (bits >> i) & 1 == 1);
                }
                let r = go(g, env, meter)?;
                all &= r;
                any |= r;
            }
            for (v, old) in vs.iter().zip(saved) {
                match old {
                    Some(b) => env.insert(*v, b),
                    None => env.remove(v),
                };
            }
            if forall {
                all
            } else {
                any
            }
        }
    })
}
