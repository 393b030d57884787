//! Prefix text format.
//!
//! ```text
//! (signature boolean)
//! (forall (x0,0) (or (= x0,0 0) (= x0,0 1)))
//! ```
//!
//! The header lists the symbol groups in use: `boolean` for
//! `= C meet join 0 1`, and `relational` followed by any of `equiv`,
//! `consts`, `pred` for `~`, `c0 c1` and `N`.

use std::fmt::Write;

use super::{FoError, Formula, RelConst, Signature, Term, VarId, VarKind};

pub fn serialize(f: &Formula) -> String {
    let sig = f.signature();
    let mut out = String::from("(signature");
    if sig.boolean {
        out.push_str(" boolean");
    }
    if sig.equiv || sig.consts || sig.pred {
        out.push_str(" relational");
        for (on, name) in [(sig.equiv, "equiv"), (sig.consts, "consts"), (sig.pred, "pred")] {
            if on {
                out.push(' ');
                out.push_str(name);
            }
        }
    }
    out.push_str(")\n");
    formula(f, &mut out);
    out.push('\n');
    out
}

fn term(t: &Term, out: &mut String) {
    match t {
        Term::Zero => out.push('0'),
        Term::One => out.push('1'),
        Term::Const(RelConst::C0) => out.push_str("c0"),
        Term::Const(RelConst::C1) => out.push_str("c1"),
        Term::Var(v) => write!(out, "{v}").unwrap(),
        Term::Compl(a) => {
            out.push_str("(C ");
            term(a, out);
            out.push(')');
        }
        Term::Meet(a, b) | Term::Join(a, b) => {
            out.push_str(if matches!(t, Term::Meet(..)) { "(meet " } else { "(join " });
            term(a, out);
            out.push(' ');
            term(b, out);
            out.push(')');
        }
    }
}

fn formula(f: &Formula, out: &mut String) {
    let pair = |op: &str, a: &Term, b: &Term, out: &mut String| {
        write!(out, "({op} ").unwrap();
        term(a, out);
        out.push(' ');
        term(b, out);
        out.push(')');
    };
    match f {
        Formula::Eq(a, b) => pair("=", a, b, out),
        Formula::Equiv(a, b) => pair("~", a, b, out),
        Formula::Pred(a, b) => pair("N", a, b, out),
        Formula::Not(g) => {
            out.push_str("(not ");
            formula(g, out);
            out.push(')');
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            let op = match f {
                Formula::And(..) => "and",
                Formula::Or(..) => "or",
                _ => "implies",
            };
            write!(out, "({op} ").unwrap();
            formula(a, out);
            out.push(' ');
            formula(b, out);
            out.push(')');
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let q = if matches!(f, Formula::Forall(..)) { "forall" } else { "exists" };
            write!(out, "({q} (").unwrap();
            for (i, v) in vs.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "{v}").unwrap();
            }
            out.push_str(") ");
            formula(g, out);
            out.push(')');
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
    sig: Signature,
}

type Spanned = (Tok, usize, usize);

fn tokenize(text: &str) -> (Vec<Spanned>, (usize, usize)) {
    let mut toks = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut cur: Option<(String, usize, usize)> = None;
    let flush = |cur: &mut Option<(String, usize, usize)>, toks: &mut Vec<(Tok, usize, usize)>| {
        if let Some((s, l, c)) = cur.take() {
            toks.push((Tok::Atom(s), l, c));
        }
    };
    let mut comment = false;
    for ch in text.chars() {
        if comment {
            if ch == '\n' {
                comment = false;
            }
        } else if ch == ';' {
            flush(&mut cur, &mut toks);
            comment = true;
        } else if ch == '(' || ch == ')' {
            flush(&mut cur, &mut toks);
            toks.push((if ch == '(' { Tok::Open } else { Tok::Close }, line, col));
        } else if ch.is_whitespace() {
            flush(&mut cur, &mut toks);
        } else {
            match cur.as_mut() {
                Some((s, _, _)) => s.push(ch),
                None => cur = Some((ch.to_string(), line, col)),
            }
        }
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    flush(&mut cur, &mut toks);
    (toks, (line, col))
}

impl Parser {
    fn err<T>(&self, at: usize, msg: impl Into<String>) -> Result<T, FoError> {
        let (line, col) = self.toks.get(at).map_or(self.end, |t| (t.1, t.2));
        Err(FoError::Parse { line, col, msg: msg.into() })
    }

    fn next(&mut self) -> Result<Tok, FoError> {
        match self.toks.get(self.pos) {
            Some((t, _, _)) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => self.err(self.pos, "unexpected end of input"),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), FoError> {
        let at = self.pos;
        let t = self.next()?;
        if t != want {
            return self.err(at, format!("expected {want:?}, found {t:?}"));
        }
        Ok(())
    }

    fn atom(&mut self) -> Result<(String, usize), FoError> {
        let at = self.pos;
        match self.next()? {
            Tok::Atom(s) => Ok((s, at)),
            t => self.err(at, format!("expected a symbol, found {t:?}")),
        }
    }

    fn header(&mut self) -> Result<(), FoError> {
        self.expect(Tok::Open)?;
        let (kw, at) = self.atom()?;
        if kw != "signature" {
            return self.err(at, "expected a (signature ...) header");
        }
        let mut relational = false;
        loop {
            let at = self.pos;
            match self.next()? {
                Tok::Close => break,
                Tok::Atom(s) => match s.as_str() {
                    "boolean" => self.sig.boolean = true,
                    "relational" => relational = true,
                    "equiv" | "consts" | "pred" if !relational => {
                        return self.err(at, format!("`{s}` must follow `relational`"))
                    }
                    "equiv" => self.sig.equiv = true,
                    "consts" => self.sig.consts = true,
                    "pred" => self.sig.pred = true,
                    _ => return self.err(at, format!("unknown signature item `{s}`")),
                },
                Tok::Open => return self.err(at, "unexpected `(` in header"),
            }
        }
        Ok(())
    }

    fn require(&self, ok: bool, at: usize, what: &str) -> Result<(), FoError> {
        if ok {
            Ok(())
        } else {
            self.err(at, format!("`{what}` is not declared by the signature"))
        }
    }

    fn term(&mut self) -> Result<Term, FoError> {
        let at = self.pos;
        match self.next()? {
            Tok::Close => self.err(at, "unexpected `)`"),
            Tok::Atom(s) => match s.as_str() {
                "0" | "1" => {
                    self.require(self.sig.boolean, at, &s)?;
                    Ok(Term::bit(s == "1"))
                }
                "c0" | "c1" => {
                    self.require(self.sig.consts, at, &s)?;
                    Ok(Term::Const(if s == "c0" { RelConst::C0 } else { RelConst::C1 }))
                }
                _ => Ok(Term::Var(self.var(&s, at)?)),
            },
            Tok::Open => {
                let (op, at) = self.atom()?;
                let t = match op.as_str() {
                    "C" => {
                        self.require(self.sig.boolean, at, "C")?;
                        Term::compl(self.term()?)
                    }
                    "meet" | "join" => {
                        self.require(self.sig.boolean, at, &op)?;
                        let a = self.term()?;
                        let b = self.term()?;
                        if op == "meet" {
                            Term::meet(a, b)
                        } else {
                            Term::join(a, b)
                        }
                    }
                    _ => return self.err(at, format!("unknown term operator `{op}`")),
                };
                self.expect(Tok::Close)?;
                Ok(t)
            }
        }
    }

    fn var(&self, s: &str, at: usize) -> Result<VarId, FoError> {
        let bad = || self.err(at, format!("`{s}` is not a variable or declared constant"));
        let mut chars = s.chars();
        let Some(kind) = chars.next().and_then(VarKind::from_letter) else { return bad() };
        let rest = chars.as_str();
        let Some((g, b)) = rest.split_once(',') else { return bad() };
        let digits = |d: &str| !d.is_empty() && d.bytes().all(|c| c.is_ascii_digit());
        if !digits(g) || !digits(b) {
            return bad();
        }
        match (g.parse(), b.parse()) {
            (Ok(group), Ok(bit)) => Ok(VarId { kind, group, bit }),
            _ => bad(),
        }
    }

    fn formula(&mut self) -> Result<Formula, FoError> {
        self.expect(Tok::Open)?;
        let (op, at) = self.atom()?;
        let f = match op.as_str() {
            "=" | "~" | "N" => {
                let ok = match op.as_str() {
                    "=" => self.sig.boolean,
                    "~" => self.sig.equiv,
                    _ => self.sig.pred,
                };
                self.require(ok, at, &op)?;
                let a = self.term()?;
                let b = self.term()?;
                match op.as_str() {
                    "=" => Formula::Eq(a, b),
                    "~" => Formula::Equiv(a, b),
                    _ => Formula::Pred(a, b),
                }
            }
            "not" => Formula::not(self.formula()?),
            "and" | "or" | "implies" => {
                let a = self.formula()?;
                let b = self.formula()?;
                match op.as_str() {
                    "and" => Formula::and(a, b),
                    "or" => Formula::or(a, b),
                    _ => Formula::implies(a, b),
                }
            }
            "forall" | "exists" => {
                self.expect(Tok::Open)?;
                let mut vars = Vec::new();
                loop {
                    let at = self.pos;
                    match self.next()? {
                        Tok::Close => break,
                        Tok::Atom(s) => vars.push(self.var(&s, at)?),
                        Tok::Open => return self.err(at, "expected a variable"),
                    }
                }
                if vars.is_empty() {
                    return self.err(at, "empty quantifier list");
                }
                let body = self.formula()?;
                if op == "forall" {
                    Formula::forall(vars, body)
                } else {
                    Formula::exists(vars, body)
                }
            }
            _ => return self.err(at, format!("unknown connective `{op}`")),
        };
        self.expect(Tok::Close)?;
        Ok(f)
    }
}

/// Parses the interchange text, returning the formula and its declared signature.
pub fn parse_formula(text: &str) -> Result<(Formula, Signature), FoError> {
    let (toks, end) = tokenize(text);
    let mut p = Parser { toks, pos: 0, end, sig: Signature::default() };
    p.header()?;
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return p.err(p.pos, "trailing input after formula");
    }
    Ok((f, p.sig))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_simple() {
        let x = VarId::new(VarKind::X, 0, 0);
        let f = Formula::forall(
            vec![x],
            Formula::or(Formula::eq(Term::Var(x), Term::Zero), Formula::eq(Term::Var(x), Term::One)),
        );
        let s = serialize(&f);
        assert_eq!(s, "(signature boolean)\n(forall (x0,0) (or (= x0,0 0) (= x0,0 1)))\n");
        let (g, sig) = parse_formula(&s).unwrap();
        assert_eq!(g, f);
        assert_eq!(sig, Signature::BOOLEAN);
    }

    #[test]
    fn undeclared_symbol() {
        let e = parse_formula("(signature boolean)\n(~ x0,0 x0,1)").unwrap_err();
        assert_eq!(e, FoError::Parse { line: 2, col: 2, msg: "`~` is not declared by the signature".into() });
        assert!(parse_formula("(signature relational equiv)\n(~ x0,0 c0)").is_err());
        assert!(parse_formula("(signature relational equiv consts)\n(~ x0,0 c0)").is_ok());
    }

    #[test]
    fn errors_at_end() {
        let e = parse_formula("(signature boolean)\n(= x0,0").unwrap_err();
        assert!(matches!(e, FoError::Parse { line: 2, .. }));
        assert!(parse_formula("(signature boolean) (= 0 0) x").is_err());
        assert!(parse_formula("(signature boolean) (= p0,0 0)").is_err());
    }
}
