//! Depth-first evaluation with three-valued pruning.
//!
//! Before branching on a bound variable the body is evaluated with the
//! remaining variables unknown; a definite answer closes the subtree.
//! Inside such checks, quantifiers are enumerated only while the product
//! of their block sizes stays under `PRECHECK_WORK`, and are otherwise
//! treated as unknown. The guarded variant also pins block variables
//! from equations in the premise (see `circuit::GuardPart`).

use super::circuit::{Circuit, FId, FNode, GuardPart, TId, TNode};
use super::{Assignment, EvalError, Meter};
use crate::fo::Formula;

const F: u8 = 0;
const T: u8 = 1;
const U: u8 = 2;

const PRECHECK_WORK: u64 = 64;
const MAX_CASES: usize = 256;

pub(crate) fn eval(f: &Formula, a: &Assignment, guarded: bool, meter: &mut Meter) -> Result<bool, EvalError> {
    let c = Circuit::compile(f, false)?;
    let mut env = vec![U; c.num_vars()];
    for (i, v) in c.var_ids.iter().enumerate() {
        if let Some(&b) = a.get(v) {
            env[i] = b as u8;
        }
    }
    let mut s = Search { c: &c, env, guarded, meter };
    match s.eval(c.root, PRECHECK_WORK)? {
        T => Ok(true),
        F => Ok(false),
        _ => unreachable!("closed formula evaluated to unknown"),
    }
}

struct Search<'a> {
    c: &'a Circuit,
    env: Vec<u8>,
    guarded: bool,
    meter: &'a mut Meter,
}

fn not3(x: u8) -> u8 {
    if x == U {
        U
    } else {
        1 - x
    }
}

fn and3(x: u8, y: u8) -> u8 {
    if x == F || y == F {
        F
    } else if x == T && y == T {
        T
    } else {
        U
    }
}

fn or3(x: u8, y: u8) -> u8 {
    not3(and3(not3(x), not3(y)))
}

type Case = Vec<(u32, u8)>;

impl Search<'_> {
    fn term(&self, t: TId) -> u8 {
        match self.c.terms[t as usize] {
            TNode::Const(b) => b as u8,
            TNode::Var(v) => self.env[v as usize],
            TNode::Not(a) => not3(self.term(a)),
            TNode::And(a, b) => {
                let x = self.term(a);
                if x == F {
                    return F;
                }
                and3(x, self.term(b))
            }
            TNode::Or(a, b) => {
                let x = self.term(a);
                if x == T {
                    return T;
                }
                or3(x, self.term(b))
            }
        }
    }

    fn eval(&mut self, f: FId, work: u64) -> Result<u8, EvalError> {
        let c = self.c;
        Ok(match &c.nodes[f as usize] {
            FNode::Iff(a, b) => {
                let (x, y) = (self.term(*a), self.term(*b));
                if x == U || y == U {
                    U
                } else {
                    (x == y) as u8
                }
            }
            FNode::Not(a) => not3(self.eval(*a, work)?),
            FNode::And(a, b) => {
                let x = self.eval(*a, work)?;
                if x == F {
                    return Ok(F);
                }
                and3(x, self.eval(*b, work)?)
            }
            FNode::Or(a, b) => {
                let x = self.eval(*a, work)?;
                if x == T {
                    return Ok(T);
                }
                or3(x, self.eval(*b, work)?)
            }
            FNode::Imp(a, b) => {
                let x = self.eval(*a, work)?;
                if x == F {
                    return Ok(T);
                }
                or3(not3(x), self.eval(*b, work)?)
            }
            FNode::Quant { forall, vars, body } => self.quant(f, *forall, vars, *body, work)?,
        })
    }

    fn quant(&mut self, f: FId, forall: bool, vars: &[u32], body: FId, work: u64) -> Result<u8, EvalError> {
        self.meter.tick()?;
        let complete = self.c.free[f as usize].iter().all(|&v| self.env[v as usize] != U);
        let saved: Vec<u8> = vars.iter().map(|&v| self.env[v as usize]).collect();
        for &v in vars {
            self.env[v as usize] = U;
        }
        let cases = if self.guarded { self.cases(f, complete)? } else { vec![Vec::new()] };
        let r = if complete {
            self.exact(forall, vars, body, &cases)
        } else {
            self.approx(forall, vars, body, &cases, work)
        };
        for (&v, s) in vars.iter().zip(saved) {
            self.env[v as usize] = s;
        }
        r
    }

    /// Pin combinations allowed by the guard, after evaluating pin terms.
    fn cases(&mut self, f: FId, complete: bool) -> Result<Vec<Case>, EvalError> {
        let c = self.c;
        let mut out: Vec<Case> = vec![Vec::new()];
        for part in &c.guards[f as usize] {
            let options = match part {
                GuardPart::Cases(opts) => opts,
                GuardPart::Cond(p, opts) => {
                    if self.eval(*p, PRECHECK_WORK)? != T {
                        continue;
                    }
                    opts
                }
            };
            if out.len() * options.len() > MAX_CASES {
                continue;
            }
            let mut next = Vec::with_capacity(out.len() * options.len());
            for base in &out {
                'opt: for pins in options {
                    let mut case = base.clone();
                    for &(v, t) in pins {
                        let val = self.term(t);
                        if complete && val == U {
                            continue;
                        }
                        match case.iter_mut().find(|(w, _)| *w == v) {
                            Some((_, old)) if *old != U && val != U && *old != val => continue 'opt,
                            Some((_, old)) => {
                                if *old == U {
                                    *old = val;
                                }
                            }
                            None => case.push((v, val)),
                        }
                    }
                    next.push(case);
                }
            }
            out = next;
        }
        for case in out.iter_mut() {
            case.sort_unstable();
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    fn unpinned(vars: &[u32], case: &Case) -> Vec<u32> {
        let mut free: Vec<u32> = vars.iter().copied().filter(|v| !case.iter().any(|p| p.0 == *v)).collect();
        free.dedup();
        free
    }

    fn exact(&mut self, forall: bool, vars: &[u32], body: FId, cases: &[Case]) -> Result<u8, EvalError> {
        let ident = forall as u8;
        for case in cases {
            for &(v, val) in case {
                self.env[v as usize] = val;
            }
            let free = Self::unpinned(vars, case);
            let r = self.branch(ident, body, &free, 0)?;
            for &(v, _) in case {
                self.env[v as usize] = U;
            }
            if r != ident {
                return Ok(r);
            }
        }
        Ok(ident)
    }

    fn branch(&mut self, ident: u8, body: FId, free: &[u32], i: usize) -> Result<u8, EvalError> {
        self.meter.tick()?;
        let v = self.eval(body, PRECHECK_WORK)?;
        if v != U {
            return Ok(v);
        }
        let x = free[i] as usize;
        self.env[x] = F;
        let r0 = self.branch(ident, body, free, i + 1)?;
        if r0 != ident {
            self.env[x] = U;
            return Ok(r0);
        }
        self.env[x] = T;
        let r1 = self.branch(ident, body, free, i + 1)?;
        self.env[x] = U;
        Ok(r1)
    }

    fn approx(&mut self, forall: bool, vars: &[u32], body: FId, cases: &[Case], work: u64) -> Result<u8, EvalError> {
        let ident = forall as u8;
        let absorbing = 1 - ident;
        let fold = |acc: u8, r: u8| if forall { and3(acc, r) } else { or3(acc, r) };
        let mut acc = ident;
        let per_case = work / cases.len().max(1) as u64;
        for case in cases {
            for &(v, val) in case {
                self.env[v as usize] = val;
            }
            let free = Self::unpinned(vars, case);
            let k = free.len();
            if k < 63 && (1u64 << k) <= per_case {
                let sub = (per_case >> k).max(1);
                for bits in 0u64..1 << k {
                    for (j, &v) in free.iter().enumerate() {
                        self.env[v as usize] = ((bits >> j) & 1) as u8;
                    }
                    acc = fold(acc, self.eval(body, sub)?);
                    if acc == absorbing {
                        return Ok(acc);
                    }
                }
                for &v in &free {
                    self.env[v as usize] = U;
                }
            } else {
                acc = fold(acc, self.eval(body, per_case.max(1))?);
                if acc == absorbing {
                    return Ok(acc);
                }
            }
            for &(v, _) in case {
                self.env[v as usize] = U;
            }
        }
        Ok(acc)
    }
}
