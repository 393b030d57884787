//! Non-prenex QCIR export and a BDD-based decision procedure for it.

use std::collections::HashMap;
use std::fmt::Write as _;

use biodivine_lib_bdd::{Bdd, BddVariable, BddVariableSet};

use super::circuit::{Circuit, FNode, TNode};
use super::EvalError;
use crate::fo::Formula;

#[derive(Clone, Debug)]
struct Lit {
    name: String,
    neg: bool,
}

impl Lit {
    fn pos(name: String) -> Lit {
        Lit { name, neg: false }
    }

    fn not(&self) -> Lit {
        Lit { name: self.name.clone(), neg: !self.neg }
    }
}

impl std::fmt::Display for Lit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.neg {
            write!(f, "-{}", self.name)
        } else {
            f.write_str(&self.name)
        }
    }
}

struct Writer {
    body: String,
    next: usize,
}

impl Writer {
    fn gate(&mut self, op: &str, args: &str) -> Lit {
        let name = format!("t{}", self.next);
        self.next += 1;
        writeln!(self.body, "{name} = {op}({args})").unwrap();
        Lit::pos(name)
    }

    fn binary(&mut self, op: &str, a: &Lit, b: &Lit) -> Lit {
        self.gate(op, &format!("{a}, {b}"))
    }
}

/// Exports a closed sentence as QCIR-G14 with quantifier gates. Bound
/// variables are named `{kind}{group}_{bit}`, with a `_{n}` suffix on the
/// n-th rebinding of the same variable.
pub fn export_qcir(f: &Formula) -> Result<String, EvalError> {
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(EvalError::Unassigned(v));
    }
    let c = Circuit::compile(f, true)?;
    let mut seen: HashMap<_, usize> = HashMap::new();
    let names: Vec<String> = c
        .var_ids
        .iter()
        .map(|v| {
            let n = seen.entry(*v).or_insert(0);
            let base = format!("{}{}_{}", v.kind.letter(), v.group, v.bit);
            *n += 1;
            if *n == 1 {
                base
            } else {
                format!("{base}_{}", *n - 1)
            }
        })
        .collect();
    let mut w = Writer { body: String::new(), next: 0 };
    let mut top: Option<Lit> = None;
    let mut tl: Vec<Lit> = Vec::with_capacity(c.terms.len());
    for t in &c.terms {
        let l = match *t {
            TNode::Const(b) => {
                let t = top.get_or_insert_with(|| w.gate("and", "")).clone();
                if b {
                    t
                } else {
                    t.not()
                }
            }
            TNode::Var(v) => Lit::pos(names[v as usize].clone()),
            TNode::Not(a) => tl[a as usize].not(),
            TNode::And(a, b) => w.binary("and", &tl[a as usize], &tl[b as usize]),
            TNode::Or(a, b) => w.binary("or", &tl[a as usize], &tl[b as usize]),
        };
        tl.push(l);
    }
    let mut fl: Vec<Lit> = Vec::with_capacity(c.nodes.len());
    for n in &c.nodes {
        let l = match n {
            FNode::Iff(a, b) => {
                let (a, b) = (&tl[*a as usize], &tl[*b as usize]);
                let both = w.binary("and", a, b);
                let neither = w.binary("and", &a.not(), &b.not());
                w.binary("or", &both, &neither)
            }
            FNode::Not(a) => fl[*a as usize].not(),
            FNode::And(a, b) => w.binary("and", &fl[*a as usize], &fl[*b as usize]),
            FNode::Or(a, b) => w.binary("or", &fl[*a as usize], &fl[*b as usize]),
            FNode::Imp(a, b) => w.binary("or", &fl[*a as usize].not(), &fl[*b as usize]),
            FNode::Quant { forall, vars, body } => {
                let vs: Vec<&str> = vars.iter().map(|v| names[*v as usize].as_str()).collect();
                let op = if *forall { "forall" } else { "exists" };
                w.gate(op, &format!("{}; {}", vs.join(", "), fl[*body as usize]))
            }
        };
        fl.push(l);
    }
    Ok(format!("#QCIR-G14\noutput({})\n{}", fl[c.root as usize], w.body))
}

enum Stmt<'a> {
    Output(&'a str),
    Block(bool, Vec<&'a str>),
    Gate { name: &'a str, op: &'a str, vars: Vec<&'a str>, args: Vec<&'a str> },
}

fn parse(text: &str) -> Result<Vec<(usize, Stmt<'_>)>, EvalError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| EvalError::Format { line: ln, msg: msg.to_string() };
        let (name, rhs) = match line.split_once('=') {
            Some((n, r)) => (Some(n.trim()), r.trim()),
            None => (None, line),
        };
        let open = rhs.find('(').ok_or_else(|| err("expected `(`"))?;
        if !rhs.ends_with(')') {
            return Err(err("expected `)`"));
        }
        let op = rhs[..open].trim();
        let inner = &rhs[open + 1..rhs.len() - 1];
        let list: Vec<&str> = inner.split(',').map(str::trim).filter(|x| !x.is_empty()).collect();
        let stmt = match (name, op) {
            (None, "output") => match list.as_slice() {
                [l] => Stmt::Output(l),
                _ => return Err(err("output takes one literal")),
            },
            (None, "forall" | "exists") => Stmt::Block(op == "forall", list),
            (Some(n), "and" | "or") => Stmt::Gate { name: n, op, vars: Vec::new(), args: list },
            (Some(n), "forall" | "exists") => {
                let (vs, body) = inner.split_once(';').ok_or_else(|| err("quantifier gate needs `;`"))?;
                Stmt::Gate {
                    name: n,
                    op,
                    vars: vs.split(',').map(str::trim).filter(|x| !x.is_empty()).collect(),
                    args: vec![body.trim()],
                }
            }
            _ => return Err(err("unknown statement")),
        };
        out.push((ln, stmt));
    }
    Ok(out)
}

/// Names of quantified variables, in order of first appearance.
pub fn qcir_var_names(text: &str) -> Result<Vec<String>, EvalError> {
    let mut names: Vec<String> = Vec::new();
    for (_, s) in parse(text)? {
        let vs = match &s {
            Stmt::Block(_, vs) => vs,
            Stmt::Gate { vars, .. } => vars,
            Stmt::Output(_) => continue,
        };
        for v in vs {
            if !names.iter().any(|n| n == v) {
                names.push(v.to_string());
            }
        }
    }
    Ok(names)
}

/// Decides a closed QCIR instance by building BDDs gate by gate, quantifying
/// at each quantifier gate. BDD variables listed in `order` come first, in
/// that order; the rest follow in order of appearance.
pub fn solve_qcir(text: &str, order: &[String]) -> Result<bool, EvalError> {
    let stmts = parse(text)?;
    let appear = qcir_var_names(text)?;
    let mut all: Vec<&str> = order.iter().map(String::as_str).filter(|o| appear.iter().any(|a| a == o)).collect();
    for a in &appear {
        if !all.contains(&a.as_str()) {
            all.push(a);
        }
    }
    let set = BddVariableSet::new(&all);
    // Remaining uses per gate, so finished BDDs can be dropped.
    let mut uses: HashMap<&str, usize> = HashMap::new();
    let mut output = None;
    for (_, s) in &stmts {
        match s {
            Stmt::Gate { args, .. } => {
                for a in args {
                    *uses.entry(a.trim_start_matches('-')).or_default() += 1;
                }
            }
            Stmt::Output(l) => {
                *uses.entry(l.trim_start_matches('-')).or_default() += 1;
                output = Some(*l);
            }
            Stmt::Block(..) => {}
        }
    }
    let output = output.ok_or(EvalError::Format { line: 0, msg: "missing output".into() })?;
    let mut gates: HashMap<&str, Bdd> = HashMap::new();
    let lookup = |gates: &mut HashMap<&str, Bdd>, uses: &mut HashMap<&str, usize>, lit: &str, ln: usize| {
        let (neg, name) = match lit.strip_prefix('-') {
            Some(n) => (true, n),
            None => (false, lit),
        };
        let b = if let Some(v) = set.var_by_name(name) {
            set.mk_var(v)
        } else {
            let left = uses.get_mut(name).map(|u| {
                *u -= 1;
                *u
            });
            let b = if left == Some(0) { gates.remove(name) } else { gates.get(name).cloned() };
            b.ok_or(EvalError::Format { line: ln, msg: format!("undefined literal `{name}`") })?
        };
        Ok::<Bdd, EvalError>(if neg { b.not() } else { b })
    };
    let vars_of = |vs: &[&str], ln: usize| -> Result<Vec<BddVariable>, EvalError> {
        vs.iter()
            .map(|v| set.var_by_name(v).ok_or(EvalError::Format { line: ln, msg: format!("unknown variable `{v}`") }))
            .collect()
    };
    let mut blocks = Vec::new();
    for (ln, s) in &stmts {
        match s {
            Stmt::Output(_) => {}
            Stmt::Block(u, vs) => blocks.push((*u, vars_of(vs, *ln)?)),
            Stmt::Gate { name, op, vars, args } => {
                let b = match *op {
                    "and" | "or" => {
                        let mut acc = if *op == "and" { set.mk_true() } else { set.mk_false() };
                        for a in args {
                            let x = lookup(&mut gates, &mut uses, a, *ln)?;
                            acc = if *op == "and" { acc.and(&x) } else { acc.or(&x) };
                        }
                        acc
                    }
                    _ => {
                        let body = lookup(&mut gates, &mut uses, args[0], *ln)?;
                        let vs = vars_of(vars, *ln)?;
                        if *op == "forall" {
                            body.for_all(&vs)
                        } else {
                            body.exists(&vs)
                        }
                    }
                };
                gates.insert(name, b);
            }
        }
    }
    let mut result = lookup(&mut gates, &mut uses, output, 0)?;
    for (u, vs) in blocks.into_iter().rev() {
        result = if u { result.for_all(&vs) } else { result.exists(&vs) };
    }
    if result.is_true() {
        Ok(true)
    } else if result.is_false() {
        Ok(false)
    } else {
        Err(EvalError::Format { line: 0, msg: "instance has free variables".into() })
    }
}
