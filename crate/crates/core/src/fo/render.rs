//! Display rendering and symbol counting.
//!
//! `∧` binds tighter than `∨` and `→`; those two share a level and are
//! parenthesized when mixed. Each digit of an index counts as one symbol,
//! and so does the comma between group and bit.

use super::{Formula, RelConst, Term, VarId};

struct Out {
    text: Option<String>,
    len: usize,
    len_noidx: usize,
}

impl Out {
    fn sym(&mut self, s: &str) {
        let n = s.chars().count();
        self.len += n;
        self.len_noidx += n;
        if let Some(t) = self.text.as_mut() {
            t.push_str(s);
        }
    }

    fn index(&mut self, s: &str) {
        self.len += s.chars().count();
        if let Some(t) = self.text.as_mut() {
            t.push_str(s);
        }
    }

    fn var(&mut self, v: &VarId) {
        let mut buf = [0u8; 4];
        self.sym(v.kind.letter().encode_utf8(&mut buf));
        self.index(&format!("{},{}", v.group, v.bit));
    }
}

fn term(t: &Term, o: &mut Out) {
    match t {
        Term::Zero => o.sym("0"),
        Term::One => o.sym("1"),
        Term::Const(RelConst::C0) => o.sym("c0"),
        Term::Const(RelConst::C1) => o.sym("c1"),
        Term::Var(v) => o.var(v),
        Term::Compl(a) => {
            o.sym("C(");
            term(a, o);
            o.sym(")");
        }
        Term::Join(a, b) => {
            term(a, o);
            o.sym("∪");
            paren_term(b, matches!(**b, Term::Join(..)), o);
        }
        Term::Meet(a, b) => {
            paren_term(a, matches!(**a, Term::Join(..)), o);
            o.sym("∩");
            paren_term(b, matches!(**b, Term::Join(..) | Term::Meet(..)), o);
        }
    }
}

fn paren_term(t: &Term, wrap: bool, o: &mut Out) {
    if wrap {
        o.sym("(");
        term(t, o);
        o.sym(")");
    } else {
        term(t, o);
    }
}

// 1: ∨ and →, 2: ∧, 3: everything that never needs parentheses.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) | Formula::Implies(..) => 1,
        Formula::And(..) => 2,
        _ => 3,
    }
}

fn same_op(a: &Formula, b: &Formula) -> bool {
    std::mem::discriminant(a) == std::mem::discriminant(b)
}

fn formula(f: &Formula, o: &mut Out) {
    match f {
        Formula::Eq(a, b) => {
            term(a, o);
            o.sym("≈");
            term(b, o);
        }
        Formula::Equiv(a, b) => {
            term(a, o);
            o.sym("∼");
            term(b, o);
        }
        Formula::Pred(a, b) => {
            o.sym("N(");
            term(a, o);
            o.sym(",");
            term(b, o);
            o.sym(")");
        }
        Formula::Not(g) => {
            o.sym("¬");
            paren(g, level(g) < 3, o);
        }
        Formula::And(a, b) => {
            paren(a, level(a) < 2, o);
            o.sym("∧");
            paren(b, level(b) < 3, o);
        }
        Formula::Or(a, b) | Formula::Implies(a, b) => {
            paren(a, level(a) == 1 && !(same_op(a, f) && matches!(f, Formula::Or(..))), o);
            o.sym(if matches!(f, Formula::Or(..)) { "∨" } else { "→" });
            paren(b, level(b) == 1, o);
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let q = if matches!(f, Formula::Forall(..)) { "∀" } else { "∃" };
            for v in vs {
                o.sym(q);
                o.var(v);
            }
            paren(g, level(g) < 3, o);
        }
    }
}

fn paren(f: &Formula, wrap: bool, o: &mut Out) {
    if wrap {
        o.sym("(");
        formula(f, o);
        o.sym(")");
    } else {
        formula(f, o);
    }
}

pub fn render_natural(f: &Formula) -> String {
    let mut o = Out { text: Some(String::new()), len: 0, len_noidx: 0 };
    formula(f, &mut o);
    o.text.unwrap()
}

/// Number of rendered symbols, index digits and commas included.
pub fn length_natural(f: &Formula) -> usize {
    let mut o = Out { text: None, len: 0, len_noidx: 0 };
    formula(f, &mut o);
    o.len
}

/// Number of rendered symbols with variable indices not counted.
pub fn length_noidx(f: &Formula) -> usize {
    let mut o = Out { text: None, len: 0, len_noidx: 0 };
    formula(f, &mut o);
    o.len_noidx
}
