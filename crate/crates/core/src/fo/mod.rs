//! First-order terms and formulas over the two-element Boolean algebra and
//! over relational signatures with an equivalence symbol.

mod interchange;
mod render;
mod subst;
mod tuple;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use interchange::{parse_formula, serialize};
pub use render::{length_natural, length_noidx, render_natural};
pub use subst::{substitute, substitute_tuple};
pub use tuple::{const_tuple, eq_tuple, lex_less, shifted_tuple, tuple_value, var_tuple, Shift};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    X,
    Q,
    Z,
    D,
    F,
    U,
    W,
    G,
    H,
    V,
    A,
    B,
    Y,
}

impl VarKind {
    pub const ALL: [VarKind; 13] = [
        VarKind::X,
        VarKind::Q,
        VarKind::Z,
        VarKind::D,
        VarKind::F,
        VarKind::U,
        VarKind::W,
        VarKind::G,
        VarKind::H,
        VarKind::V,
        VarKind::A,
        VarKind::B,
        VarKind::Y,
    ];

    pub fn letter(self) -> char {
        b"xqzdfuwghvaby"[self as usize] as char
    }

    pub fn from_letter(c: char) -> Option<VarKind> {
        VarKind::ALL.into_iter().find(|k| k.letter() == c)
    }
}

/// A variable named by kind, group (a color or block index) and bit position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId {
    pub kind: VarKind,
    pub group: u128,
    pub bit: u32,
}

impl VarId {
    pub fn new(kind: VarKind, group: u128, bit: u32) -> VarId {
        VarId { kind, group, bit }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{},{}", self.kind.letter(), self.group, self.bit)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelConst {
    C0,
    C1,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    One,
    Var(VarId),
    Compl(Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
    Const(RelConst),
}

impl Term {
    pub fn var(v: VarId) -> Term {
        Term::Var(v)
    }

    pub fn compl(t: Term) -> Term {
        Term::Compl(Box::new(t))
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: Term, b: Term) -> Term {
        Term::Join(Box::new(a), Box::new(b))
    }

    pub fn bit(b: bool) -> Term {
        if b {
            Term::One
        } else {
            Term::Zero
        }
    }

    /// `x ⊕ y` written out as `(x ∩ C(y)) ∪ (C(x) ∩ y)`.
    pub fn xor(x: Term, y: Term) -> Term {
        Term::join(
            Term::meet(x.clone(), Term::compl(y.clone())),
            Term::meet(Term::compl(x), y),
        )
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Term::Zero | Term::One | Term::Const(_))
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::Compl(t) => t.collect_vars(out),
            Term::Meet(a, b) | Term::Join(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Zero | Term::One | Term::Const(_) => {}
        }
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Counts `∩`, `∪`, `C`, `0` and `1` occurrences.
    pub fn boolean_symbols(&self) -> usize {
        match self {
            Term::Zero | Term::One => 1,
            Term::Var(_) | Term::Const(_) => 0,
            Term::Compl(t) => 1 + t.boolean_symbols(),
            Term::Meet(a, b) | Term::Join(a, b) => 1 + a.boolean_symbols() + b.boolean_symbols(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Compl(t) => 1 + t.size(),
            Term::Meet(a, b) | Term::Join(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quant {
    Forall,
    Exists,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `t ≈ s` in the Boolean algebra.
    Eq(Term, Term),
    /// `t ∼ s` in a relational structure.
    Equiv(Term, Term),
    /// `N(t, s)` for the binary predicate of a relational structure.
    Pred(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Vec<VarId>, Box<Formula>),
    Exists(Vec<VarId>, Box<Formula>),
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(vars: Vec<VarId>, body: Formula) -> Formula {
        assert!(!vars.is_empty(), "empty quantifier list");
        Formula::Forall(vars, Box::new(body))
    }

    pub fn exists(vars: Vec<VarId>, body: Formula) -> Formula {
        assert!(!vars.is_empty(), "empty quantifier list");
        Formula::Exists(vars, Box::new(body))
    }

    pub fn quant(q: Quant, vars: Vec<VarId>, body: Formula) -> Formula {
        match q {
            Quant::Forall => Formula::forall(vars, body),
            Quant::Exists => Formula::exists(vars, body),
        }
    }

    /// Left-associated conjunction; `None` for an empty iterator.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::or)
    }

    pub fn free_vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<VarId>, out: &mut BTreeSet<VarId>) {
        let mut atom = |a: &Term, b: &Term, bound: &Vec<VarId>| {
            for v in a.vars().into_iter().chain(b.vars()) {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        };
        match self {
            Formula::Eq(a, b) | Formula::Equiv(a, b) | Formula::Pred(a, b) => atom(a, b, bound),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(vs, f) | Formula::Exists(vs, f) => {
                let n = bound.len();
                bound.extend_from_slice(vs);
                f.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Eq(a, b) | Formula::Equiv(a, b) | Formula::Pred(a, b) => {
                a.collect_vars(&mut out);
                b.collect_vars(&mut out);
            }
            Formula::Forall(vs, _) | Formula::Exists(vs, _) => out.extend(vs.iter().copied()),
            _ => {}
        });
        out
    }

    /// Pre-order walk over subformulas.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => g.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    pub fn bound_var_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |f| {
            if let Formula::Forall(vs, _) | Formula::Exists(vs, _) = f {
                n += vs.len();
            }
        });
        n
    }

    /// True when some quantifier rebinds a variable already bound above it.
    pub fn has_shadowing(&self) -> bool {
        fn go(f: &Formula, bound: &mut Vec<VarId>) -> bool {
            match f {
                Formula::Not(g) => go(g, bound),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    go(a, bound) || go(b, bound)
                }
                Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                    if vs.iter().any(|v| bound.contains(v)) {
                        return true;
                    }
                    let n = bound.len();
                    bound.extend_from_slice(vs);
                    let r = go(g, bound);
                    bound.truncate(n);
                    r
                }
                _ => false,
            }
        }
        go(self, &mut Vec::new())
    }

    pub fn boolean_symbols(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |f| match f {
            Formula::Eq(a, b) => n += 1 + a.boolean_symbols() + b.boolean_symbols(),
            Formula::Equiv(a, b) | Formula::Pred(a, b) => n += a.boolean_symbols() + b.boolean_symbols(),
            _ => {}
        });
        n
    }

    /// Node count over formulas and terms.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |f| match f {
            Formula::Eq(a, b) | Formula::Equiv(a, b) | Formula::Pred(a, b) => n += 1 + a.size() + b.size(),
            Formula::Forall(vs, _) | Formula::Exists(vs, _) => n += vs.len(),
            _ => n += 1,
        });
        n
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        let term = |t: &Term, sig: &mut Signature| {
            fn go(t: &Term, sig: &mut Signature) {
                match t {
                    Term::Zero | Term::One => sig.boolean = true,
                    Term::Const(_) => sig.consts = true,
                    Term::Var(_) => {}
                    Term::Compl(a) => {
                        sig.boolean = true;
                        go(a, sig)
                    }
                    Term::Meet(a, b) | Term::Join(a, b) => {
                        sig.boolean = true;
                        go(a, sig);
                        go(b, sig)
                    }
                }
            }
            go(t, sig)
        };
        self.visit(&mut |f| match f {
            Formula::Eq(a, b) => {
                sig.boolean = true;
                term(a, &mut sig);
                term(b, &mut sig);
            }
            Formula::Equiv(a, b) => {
                sig.equiv = true;
                term(a, &mut sig);
                term(b, &mut sig);
            }
            Formula::Pred(a, b) => {
                sig.pred = true;
                term(a, &mut sig);
                term(b, &mut sig);
            }
            _ => {}
        });
        sig
    }
}

/// Which non-logical symbols a formula may use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    /// `∩ ∪ C 0 1 ≈`
    pub boolean: bool,
    /// `∼`
    pub equiv: bool,
    /// `c0 c1`
    pub consts: bool,
    /// `N`
    pub pred: bool,
}

impl Signature {
    pub const BOOLEAN: Signature = Signature { boolean: true, equiv: false, consts: false, pred: false };

    pub fn relational(consts: bool, pred: bool) -> Signature {
        Signature { boolean: false, equiv: true, consts, pred }
    }

    pub fn covers(&self, other: &Signature) -> bool {
        (self.boolean || !other.boolean)
            && (self.equiv || !other.equiv)
            && (self.consts || !other.consts)
            && (self.pred || !other.pred)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FoError {
    #[error("tuple lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("substitution would capture {0}")]
    Capture(VarId),
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}
