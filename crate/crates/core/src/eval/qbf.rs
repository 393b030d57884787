//! Prenex CNF form (QDIMACS) and a small QDPLL solver.

use std::fmt::Write as _;

use super::circuit::{Circuit, FNode, TNode};
use super::{Budget, EvalError, Meter};
use crate::fo::Formula;

/// A prenex QBF in clausal form. Variables are numbered from 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qbf {
    pub num_vars: u32,
    /// Quantifier blocks, outermost first; `true` marks a universal block.
    pub prefix: Vec<(bool, Vec<u32>)>,
    pub clauses: Vec<Vec<i32>>,
}

struct Tseitin {
    next: u32,
    clauses: Vec<Vec<i32>>,
}

impl Tseitin {
    fn gate(&mut self) -> i32 {
        self.next += 1;
        self.next as i32
    }

    fn and(&mut self, a: i32, b: i32) -> i32 {
        let g = self.gate();
        self.clauses.extend([vec![-g, a], vec![-g, b], vec![g, -a, -b]]);
        g
    }

    fn or(&mut self, a: i32, b: i32) -> i32 {
        let g = self.gate();
        self.clauses.extend([vec![g, -a], vec![g, -b], vec![-g, a, b]]);
        g
    }

    fn iff(&mut self, a: i32, b: i32) -> i32 {
        let g = self.gate();
        self.clauses.extend([vec![-g, -a, b], vec![-g, a, -b], vec![g, a, b], vec![g, -a, -b]]);
        g
    }
}

fn collect_prefix(c: &Circuit, f: u32, pos: bool, out: &mut Vec<(bool, Vec<u32>)>) {
    match &c.nodes[f as usize] {
        FNode::Iff(..) => {}
        FNode::Not(a) => collect_prefix(c, *a, !pos, out),
        FNode::And(a, b) | FNode::Or(a, b) => {
            collect_prefix(c, *a, pos, out);
            collect_prefix(c, *b, pos, out);
        }
        FNode::Imp(a, b) => {
            collect_prefix(c, *a, !pos, out);
            collect_prefix(c, *b, pos, out);
        }
        FNode::Quant { forall, vars, body } => {
            let univ = *forall == pos;
            let vs: Vec<u32> = vars.iter().map(|v| v + 1).collect();
            match out.last_mut() {
                Some((u, block)) if *u == univ => block.extend(vs),
                _ => out.push((univ, vs)),
            }
            collect_prefix(c, *body, pos, out);
        }
    }
}

impl Qbf {
    /// Prenexes a closed sentence (bound variables renamed apart) and
    /// clausifies its matrix.
    pub fn from_formula(f: &Formula) -> Result<Qbf, EvalError> {
        let c = Circuit::compile(f, true)?;
        if let Some(v) = f.free_vars().into_iter().next() {
            return Err(EvalError::Unassigned(v));
        }
        let nv = c.num_vars() as u32;
        let mut prefix = Vec::new();
        collect_prefix(&c, c.root, true, &mut prefix);
        let mut ts = Tseitin { next: nv, clauses: Vec::new() };
        let top = ts.gate();
        ts.clauses.push(vec![top]);
        let mut tl: Vec<i32> = Vec::with_capacity(c.terms.len());
        for t in &c.terms {
            let l = match *t {
                TNode::Const(b) => {
                    if b {
                        top
                    } else {
                        -top
                    }
                }
                TNode::Var(v) => v as i32 + 1,
                TNode::Not(a) => -tl[a as usize],
                TNode::And(a, b) => ts.and(tl[a as usize], tl[b as usize]),
                TNode::Or(a, b) => ts.or(tl[a as usize], tl[b as usize]),
            };
            tl.push(l);
        }
        let mut fl: Vec<i32> = Vec::with_capacity(c.nodes.len());
        for n in &c.nodes {
            let l = match n {
                FNode::Iff(a, b) => ts.iff(tl[*a as usize], tl[*b as usize]),
                FNode::Not(a) => -fl[*a as usize],
                FNode::And(a, b) => ts.and(fl[*a as usize], fl[*b as usize]),
                FNode::Or(a, b) => ts.or(fl[*a as usize], fl[*b as usize]),
                FNode::Imp(a, b) => ts.or(-fl[*a as usize], fl[*b as usize]),
                FNode::Quant { body, .. } => fl[*body as usize],
            };
            fl.push(l);
        }
        ts.clauses.push(vec![fl[c.root as usize]]);
        let gates: Vec<u32> = (nv + 1..=ts.next).collect();
        match prefix.last_mut() {
            Some((false, block)) => block.extend(gates),
            _ => prefix.push((false, gates)),
        }
        Ok(Qbf { num_vars: ts.next, prefix, clauses: ts.clauses })
    }

    pub fn to_qdimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for (univ, block) in &self.prefix {
            if block.is_empty() {
                continue;
            }
            out.push(if *univ { 'a' } else { 'e' });
            for v in block {
                write!(out, " {v}").unwrap();
            }
            out.push_str(" 0\n");
        }
        for cl in &self.clauses {
            for l in cl {
                write!(out, "{l} ").unwrap();
            }
            out.push_str("0\n");
        }
        out
    }

    /// Reads QDIMACS. Variables missing from the prefix are existential at
    /// the outermost level.
    pub fn parse_qdimacs(text: &str) -> Result<Qbf, EvalError> {
        let err = |line: usize, msg: &str| EvalError::Format { line, msg: msg.to_string() };
        let mut header: Option<(u32, usize)> = None;
        let mut prefix: Vec<(bool, Vec<u32>)> = Vec::new();
        let mut clauses = Vec::new();
        let mut cur: Vec<i32> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let ln = i + 1;
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("p ") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" {
                    return Err(err(ln, "expected `p cnf <vars> <clauses>`"));
                }
                let nv = parts[1].parse().map_err(|_| err(ln, "bad variable count"))?;
                let nc = parts[2].parse().map_err(|_| err(ln, "bad clause count"))?;
                header = Some((nv, nc));
                continue;
            }
            let Some((nv, _)) = header else { return Err(err(ln, "missing header")) };
            let (univ, body) = match line.as_bytes()[0] {
                b'a' => (Some(true), &line[1..]),
                b'e' => (Some(false), &line[1..]),
                _ => (None, line),
            };
            let nums: Vec<i64> = body
                .split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|_| err(ln, "bad literal")))
                .collect::<Result<_, _>>()?;
            if let Some(u) = univ {
                if !clauses.is_empty() {
                    return Err(err(ln, "quantifier line after clauses"));
                }
                if nums.last() != Some(&0) {
                    return Err(err(ln, "quantifier line must end in 0"));
                }
                let mut block = Vec::new();
                for &n in &nums[..nums.len() - 1] {
                    if n <= 0 || n > nv as i64 {
                        return Err(err(ln, "quantified variable out of range"));
                    }
                    block.push(n as u32);
                }
                prefix.push((u, block));
                continue;
            }
            for n in nums {
                if n == 0 {
                    clauses.push(std::mem::take(&mut cur));
                } else if n.unsigned_abs() > nv as u64 {
                    return Err(err(ln, "literal out of range"));
                } else {
                    cur.push(n as i32);
                }
            }
        }
        let Some((nv, nc)) = header else { return Err(err(0, "missing header")) };
        if !cur.is_empty() {
            clauses.push(cur);
        }
        if clauses.len() != nc {
            return Err(err(0, "clause count does not match header"));
        }
        let mut seen = vec![false; nv as usize + 1];
        for (_, b) in &prefix {
            for &v in b {
                if std::mem::replace(&mut seen[v as usize], true) {
                    return Err(err(0, "variable quantified twice"));
                }
            }
        }
        let outer: Vec<u32> = (1..=nv).filter(|&v| !seen[v as usize]).collect();
        if !outer.is_empty() {
            prefix.insert(0, (false, outer));
        }
        Ok(Qbf { num_vars: nv, prefix, clauses })
    }

    /// Decides the QBF under a budget.
    pub fn decide(&self, b: Budget) -> Result<bool, EvalError> {
        self.solve(&mut Meter::new(b))
    }

    pub(crate) fn solve(&self, meter: &mut Meter) -> Result<bool, EvalError> {
        let n = self.num_vars as usize + 1;
        let mut level = vec![0u32; n];
        let mut univ = vec![false; n];
        let mut order = Vec::new();
        for (i, (u, b)) in self.prefix.iter().enumerate() {
            for &v in b {
                level[v as usize] = i as u32;
                univ[v as usize] = *u;
                order.push(v);
            }
        }
        // Universal reduction is only sound on non-tautological clauses.
        let clauses = self
            .clauses
            .iter()
            .filter_map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c.dedup();
                (!c.iter().any(|l| c.binary_search(&-l).is_ok())).then_some(c)
            })
            .collect();
        let mut s = Solver { clauses, level, univ, order, value: vec![0; n], trail: Vec::new(), meter };
        s.search()
    }
}

struct Solver<'a> {
    clauses: Vec<Vec<i32>>,
    level: Vec<u32>,
    univ: Vec<bool>,
    order: Vec<u32>,
    value: Vec<i8>,
    trail: Vec<u32>,
    meter: &'a mut Meter,
}

enum Prop {
    Conflict,
    Solved,
    Open,
}

impl Solver<'_> {
    fn lit_value(&self, l: i32) -> i8 {
        let v = self.value[l.unsigned_abs() as usize];
        if l > 0 {
            v
        } else {
            -v
        }
    }

    fn assign(&mut self, l: i32) {
        self.value[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
        self.trail.push(l.unsigned_abs());
    }

    fn undo(&mut self, mark: usize) {
        for v in self.trail.drain(mark..) {
            self.value[v as usize] = 0;
        }
    }

    /// Unit propagation with universal reduction, to a fixpoint.
    fn propagate(&mut self) -> Prop {
        loop {
            let mut changed = false;
            let mut all_sat = true;
            for cl in &self.clauses {
                if cl.iter().any(|&l| self.lit_value(l) == 1) {
                    continue;
                }
                all_sat = false;
                let max_e = cl
                    .iter()
                    .filter(|&&l| self.lit_value(l) == 0 && !self.univ[l.unsigned_abs() as usize])
                    .map(|&l| self.level[l.unsigned_abs() as usize])
                    .max();
                let mut unit = None;
                let mut live = 0;
                for &l in cl {
                    if self.lit_value(l) != 0 {
                        continue;
                    }
                    let v = l.unsigned_abs() as usize;
                    if self.univ[v] && max_e.is_none_or(|m| m < self.level[v]) {
                        continue;
                    }
                    live += 1;
                    unit = Some(l);
                }
                match live {
                    0 => return Prop::Conflict,
                    1 => {
                        let l = unit.unwrap();
                        if self.univ[l.unsigned_abs() as usize] {
                            continue;
                        }
                        self.value[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
                        self.trail.push(l.unsigned_abs());
                        changed = true;
                    }
                    _ => {}
                }
            }
            if all_sat {
                return Prop::Solved;
            }
            if !changed {
                return Prop::Open;
            }
        }
    }

    fn search(&mut self) -> Result<bool, EvalError> {
        self.meter.tick()?;
        let mark = self.trail.len();
        match self.propagate() {
            Prop::Conflict => {
                self.undo(mark);
                return Ok(false);
            }
            Prop::Solved => {
                self.undo(mark);
                return Ok(true);
            }
            Prop::Open => {}
        }
        let Some(&v) = self.order.iter().find(|&&v| self.value[v as usize] == 0) else {
            // Every clause is decided once all variables are.
            self.undo(mark);
            return Ok(false);
        };
        let univ = self.univ[v as usize];
        let inner = self.trail.len();
        self.assign(-(v as i32));
        let r0 = self.search()?;
        self.undo(inner);
        if r0 != univ {
            self.undo(mark);
            return Ok(r0);
        }
        self.assign(v as i32);
        let r1 = self.search()?;
        self.undo(mark);
        Ok(r1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fo::{Term, VarId, VarKind};

    fn x(i: u32) -> Term {
        Term::Var(VarId::new(VarKind::X, 0, i))
    }

    #[test]
    fn tautology_prefix_and_truth() {
        let v = VarId::new(VarKind::X, 0, 0);
        let f = Formula::forall(vec![v], Formula::or(Formula::eq(x(0), Term::Zero), Formula::eq(x(0), Term::One)));
        let q = Qbf::from_formula(&f).unwrap();
        assert_eq!(q.prefix[0], (true, vec![1]));
        assert!(q.decide(Budget::unlimited()).unwrap());
        let back = Qbf::parse_qdimacs(&q.to_qdimacs()).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn negation_flips_quantifiers() {
        let a = VarId::new(VarKind::X, 0, 0);
        let b = VarId::new(VarKind::X, 0, 1);
        // ¬∃a ∀b (a ≈ b) is true.
        let f = Formula::not(Formula::exists(vec![a], Formula::forall(vec![b], Formula::eq(x(0), x(1)))));
        let q = Qbf::from_formula(&f).unwrap();
        assert!(q.prefix[0].0);
        assert!(!q.prefix[1].0);
        assert!(q.decide(Budget::unlimited()).unwrap());
    }

    #[test]
    fn reflexive_atom_under_universal() {
        let v = VarId::new(VarKind::X, 0, 0);
        let f = Formula::forall(vec![v], Formula::eq(x(0), x(0)));
        assert!(Qbf::from_formula(&f).unwrap().decide(Budget::unlimited()).unwrap());
        let q = Qbf::parse_qdimacs("p cnf 2 2\na 1 0\ne 2 0\n2 0\n-2 1 -1 0\n").unwrap();
        assert!(q.decide(Budget::unlimited()).unwrap());
    }

    #[test]
    fn qdimacs_errors() {
        assert!(Qbf::parse_qdimacs("1 0\n").is_err());
        assert!(Qbf::parse_qdimacs("p cnf 1 2\n1 0\n").is_err());
        let q = Qbf::parse_qdimacs("p cnf 2 2\na 1 0\n1 2 0\n-1 -2 0\n").unwrap();
        assert_eq!(q.prefix, vec![(false, vec![2]), (true, vec![1])]);
        assert!(!q.decide(Budget::unlimited()).unwrap());
        let q = Qbf::parse_qdimacs("p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n").unwrap();
        assert!(q.decide(Budget::unlimited()).unwrap());
    }
}
