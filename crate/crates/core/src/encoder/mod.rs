//! Builds the sentences that describe a machine run over a zone of `2^m`
//! cells and steps.
//!
//! A record `ŷ = ⟨x̂, q̂, ẑ, d̂, f̂⟩` holds an address and its content
//! (`x̂`, `f̂`), the state (`q̂`), the head address (`ẑ`) and the scanned
//! symbol code (`d̂`). Addresses have `m+1` bits and codes `r+1` bits.

mod audit;

use rayon::prelude::*;
use thiserror::Error;

use crate::fo::{
    const_tuple, eq_tuple, lex_less, shifted_tuple, var_tuple, FoError, Formula, Shift, Term, VarId,
    VarKind,
};
use crate::tm::{self, Action, Configuration, Program, Symbol, TmError};

pub use audit::{fit_slope, length_audit, AuditReport, AuditRow};

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("zone exponent {m} gives {cells} cells after the marker, too few for an input of length {n}")]
    ZoneTooSmall { n: usize, m: u32, cells: u128 },
    #[error("zone exponent {0} is too large (at most 127)")]
    ZoneTooLarge(u32),
    #[error("depth {depth} exceeds zone exponent {m}")]
    DepthTooLarge { depth: u32, m: u32 },
    #[error("no instruction with index {0}")]
    UnknownInstruction(usize),
    #[error("configuration does not fit the zone: {0}")]
    ZoneOverflow(String),
    #[error(transparent)]
    Machine(#[from] TmError),
    #[error(transparent)]
    Tuple(#[from] FoError),
}

#[derive(Clone, Debug)]
pub struct EncodingParams {
    pub n: usize,
    pub m: u32,
    pub r: u32,
    /// Normalized and idle-completed program whose alphabet covers the input.
    pub program: Program,
    pub input: Vec<Symbol>,
}

/// Prepares the program and picks `m` (default `|x|`) and the minimal code width `r`.
pub fn derive_params(p: &Program, x: &[Symbol], m_override: Option<u32>) -> Result<EncodingParams, EncodeError> {
    if x.is_empty() {
        return Err(TmError::EmptyInput.into());
    }
    let program = tm::prepare(&p.widen_alphabet(x));
    let n = x.len();
    let m = m_override.unwrap_or(n as u32);
    if m > 127 {
        return Err(EncodeError::ZoneTooLarge(m));
    }
    let cells = 1u128 << m;
    if n as u128 > cells {
        return Err(EncodeError::ZoneTooSmall { n, m, cells });
    }
    let need = program.alphabet().len() as u64 + program.max_state() as u64;
    let mut r = 0;
    while (1u64 << (r + 1)) < need {
        r += 1;
    }
    Ok(EncodingParams { n, m, r, program, input: x.to_vec() })
}

impl EncodingParams {
    /// Number of steps `T = 2^m`.
    pub fn steps(&self) -> u128 {
        1u128 << self.m
    }

    pub fn addr_width(&self) -> usize {
        self.m as usize + 1
    }

    pub fn code_width(&self) -> usize {
        self.r as usize + 1
    }

    pub fn record_width(&self) -> usize {
        2 * self.addr_width() + 3 * self.code_width()
    }

    pub fn code(&self, s: Symbol) -> Vec<Term> {
        let i = self.program.symbol_index(s).expect("symbol in alphabet");
        const_tuple(i as u128, self.code_width())
    }

    pub fn state_code(&self, i: u32) -> Vec<Term> {
        const_tuple(i as u128, self.code_width())
    }

    pub fn address(&self, a: u128) -> Vec<Term> {
        const_tuple(a, self.addr_width())
    }

    pub fn record(&self, kind: RecordKind) -> Record {
        Record::new(self, kind)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordKind {
    /// `x̂_t, q̂_t, ẑ_t, d̂_t, f̂_t` for color `t`.
    Color(u128),
    /// One flat tuple `kind group,0 … kind group,W-1` in layout order.
    Flat(VarKind, u128),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub x: Vec<Term>,
    pub q: Vec<Term>,
    pub z: Vec<Term>,
    pub d: Vec<Term>,
    pub f: Vec<Term>,
}

impl Record {
    fn new(p: &EncodingParams, kind: RecordKind) -> Record {
        let (a, c) = (p.addr_width(), p.code_width());
        match kind {
            RecordKind::Color(t) => Record {
                x: var_tuple(VarKind::X, t, 0, a),
                q: var_tuple(VarKind::Q, t, 0, c),
                z: var_tuple(VarKind::Z, t, 0, a),
                d: var_tuple(VarKind::D, t, 0, c),
                f: var_tuple(VarKind::F, t, 0, c),
            },
            RecordKind::Flat(k, g) => {
                let all = var_tuple(k, g, 0, 2 * a + 3 * c);
                Record {
                    x: all[..a].to_vec(),
                    q: all[a..a + c].to_vec(),
                    z: all[a + c..2 * a + c].to_vec(),
                    d: all[2 * a + c..2 * a + 2 * c].to_vec(),
                    f: all[2 * a + 2 * c..].to_vec(),
                }
            }
        }
    }

    pub fn terms(&self) -> Vec<Term> {
        [&self.x, &self.q, &self.z, &self.d, &self.f].into_iter().flatten().cloned().collect()
    }

    pub fn vars(&self) -> Vec<VarId> {
        self.terms()
            .into_iter()
            .map(|t| match t {
                Term::Var(v) => v,
                other => panic!("record holds a non-variable term {other:?}"),
            })
            .collect()
    }
}

fn aux(kind: VarKind, k: usize, width: usize) -> Vec<Term> {
    var_tuple(kind, k as u128, 0, width)
}

fn vars_of(tuple: &[Term]) -> Vec<VarId> {
    tuple
        .iter()
        .map(|t| match t {
            Term::Var(v) => *v,
            other => panic!("expected a variable, got {other:?}"),
        })
        .collect()
}

/// Clause `ψ(μ → ε)`: `x̂ ≈ μ → f̂ ≈ ε`.
pub fn build_clause(rec: &Record, mu: &[Term], eps: &[Term]) -> Result<Formula, EncodeError> {
    Ok(Formula::implies(eq_tuple(&rec.x, mu)?, eq_tuple(&rec.f, eps)?))
}

/// Timer `π(α, i, ξ)`: `d̂ ≈ α ∧ q̂ ≈ i ∧ ẑ ≈ ξ`.
pub fn build_timer(rec: &Record, alpha: &[Term], state: &[Term], xi: &[Term]) -> Result<Formula, EncodeError> {
    Ok(Formula::and(
        Formula::and(eq_tuple(&rec.d, alpha)?, eq_tuple(&rec.q, state)?),
        eq_tuple(&rec.z, xi)?,
    ))
}

/// Formula for instruction `k` (1-based) taking record `src` to record `dst`.
pub fn build_phi_k(p: &EncodingParams, k: usize, src: &Record, dst: &Record) -> Result<Formula, EncodeError> {
    let ins = *p
        .program
        .instructions()
        .get(k.wrapping_sub(1))
        .ok_or(EncodeError::UnknownInstruction(k))?;
    let (a, c) = (p.addr_width(), p.code_width());
    let u = aux(VarKind::U, k, a);
    let w = aux(VarKind::W, k, a);
    let g = aux(VarKind::G, k, c);
    let h = aux(VarKind::H, k, c);
    let moved = match ins.action {
        Action::Right => shifted_tuple(&u, Shift::Inc),
        Action::Left => shifted_tuple(&u, Shift::Dec),
        Action::Write(_) => u.clone(),
    };

    let copy = Formula::forall(
        vars_of(&w),
        Formula::implies(
            Formula::not(eq_tuple(&w, &moved)?),
            Formula::exists(
                vars_of(&g),
                Formula::and(build_clause(src, &w, &g)?, build_clause(dst, &w, &g)?),
            ),
        ),
    );
    let retrieve = match ins.action {
        Action::Write(beta) => eq_tuple(&h, &p.code(beta))?,
        Action::Left | Action::Right => build_clause(src, &moved, &h)?,
    };
    let write = build_clause(dst, &moved, &h)?;
    let next = build_timer(dst, &h, &p.state_code(ins.to), &moved)?;
    let step = Formula::forall(vars_of(&h), Formula::implies(retrieve, Formula::and(write, next)));
    let pre = build_timer(src, &p.code(ins.read), &p.state_code(ins.from), &u)?;
    Ok(Formula::forall(vars_of(&u), Formula::implies(pre, Formula::and(copy, step))))
}

/// One step: the conjunction of every instruction formula, in program order.
pub fn build_phi0(p: &EncodingParams, src: &Record, dst: &Record) -> Result<Formula, EncodeError> {
    let parts: Result<Vec<Formula>, EncodeError> =
        (1..=p.program.len()).into_par_iter().map(|k| build_phi_k(p, k, src, dst)).collect();
    Ok(Formula::conj(parts?).expect("program is non-empty"))
}

fn eq_records(a: &Record, b: &Record) -> Result<Formula, EncodeError> {
    Ok(eq_tuple(&a.terms(), &b.terms())?)
}

/// `2^s` steps from `src` to `dst`, nesting one `∃v̂ ∀â ∀b̂` block per level.
pub fn build_phi_s(p: &EncodingParams, s: u32, src: &Record, dst: &Record) -> Result<Formula, EncodeError> {
    if s == 0 {
        return build_phi0(p, src, dst);
    }
    let g = s as u128;
    let v = p.record(RecordKind::Flat(VarKind::V, g));
    let a = p.record(RecordKind::Flat(VarKind::A, g));
    let b = p.record(RecordKind::Flat(VarKind::B, g));
    let guard = Formula::or(
        Formula::and(eq_records(src, &a)?, eq_records(&v, &b)?),
        Formula::and(eq_records(&v, &a)?, eq_records(&b, dst)?),
    );
    let inner = build_phi_s(p, s - 1, &a, &b)?;
    let mut ab = a.vars();
    ab.extend(b.vars());
    Ok(Formula::exists(v.vars(), Formula::forall(ab, Formula::implies(guard, inner))))
}

const MAX_LISTED_CELLS: u128 = 1 << 16;

/// Configuration formula: timer plus one clause for every cell `0..=T`.
pub fn build_psi_config(p: &EncodingParams, cfg: &Configuration, rec: &Record) -> Result<Formula, EncodeError> {
    let t = p.steps();
    if t >= MAX_LISTED_CELLS {
        return Err(EncodeError::ZoneOverflow(format!("{t} cells are too many to list")));
    }
    if cfg.head as u128 > t {
        return Err(EncodeError::ZoneOverflow(format!("head at {} beyond cell {t}", cfg.head)));
    }
    if let Some(i) = (t as usize + 1..cfg.tape.len()).find(|&i| cfg.cell(i) != tm::BLANK) {
        return Err(EncodeError::ZoneOverflow(format!("cell {i} is written beyond cell {t}")));
    }
    let mut f = build_timer(rec, &p.code(cfg.scanned()), &p.state_code(cfg.state), &p.address(cfg.head as u128))?;
    for mu in 0..=t {
        f = Formula::and(f, build_clause(rec, &p.address(mu), &p.code(cfg.cell(mu as usize)))?);
    }
    Ok(f)
}

/// Initial configuration, with cells past the input described by one universal clause.
pub fn build_chi0(p: &EncodingParams) -> Result<Formula, EncodeError> {
    let rec = p.record(RecordKind::Color(0));
    let zero = p.address(0);
    let mut f = build_timer(&rec, &p.code(tm::START), &p.state_code(0), &zero)?;
    let cells = std::iter::once(tm::START).chain(p.input.iter().copied());
    for (i, s) in cells.enumerate() {
        f = Formula::and(f, build_clause(&rec, &p.address(i as u128), &p.code(s))?);
    }
    let u = aux(VarKind::U, 0, p.addr_width());
    let tail = Formula::forall(
        vars_of(&u),
        Formula::implies(
            lex_less(&p.address(p.n as u128), &u)?,
            build_clause(&rec, &u, &p.code(tm::BLANK))?,
        ),
    );
    Ok(Formula::and(f, tail))
}

/// The state at step `T` is the accepting one.
pub fn build_chi_omega(p: &EncodingParams) -> Result<Formula, EncodeError> {
    let rec = p.record(RecordKind::Color(p.steps()));
    Ok(eq_tuple(&rec.q, &p.state_code(tm::ACCEPT))?)
}

/// Sentence claiming that `to` follows from `from` after `2^s` steps.
pub fn build_omega_step(
    p: &EncodingParams,
    s: u32,
    from: &Configuration,
    to: &Configuration,
) -> Result<Formula, EncodeError> {
    if s > p.m {
        return Err(EncodeError::DepthTooLarge { depth: s, m: p.m });
    }
    let t = from.step as u128;
    let src = p.record(RecordKind::Color(t));
    let dst = p.record(RecordKind::Color(t + (1u128 << s)));
    let premise = Formula::and(build_psi_config(p, from, &src)?, build_phi_s(p, s, &src, &dst)?);
    let body = Formula::implies(premise, build_psi_config(p, to, &dst)?);
    let mut vars = src.vars();
    vars.extend(dst.vars());
    Ok(Formula::forall(vars, body))
}

/// The closed sentence that is true iff the machine accepts within `T` steps.
pub fn build_omega_full(p: &EncodingParams) -> Result<Formula, EncodeError> {
    let y0 = p.record(RecordKind::Color(0));
    let yt = p.record(RecordKind::Color(p.steps()));
    let m = p.m as u128;
    let block = |kind, s: u128| {
        if s == m + 1 {
            if kind == VarKind::A {
                y0.clone()
            } else {
                yt.clone()
            }
        } else {
            p.record(RecordKind::Flat(kind, s))
        }
    };
    let (a1, b1) = if m == 0 { (y0.clone(), yt.clone()) } else { (block(VarKind::A, 1), block(VarKind::B, 1)) };
    let phi0 = build_phi0(p, &a1, &b1)?;
    let mut body = if m == 0 {
        phi0
    } else {
        let thetas: Result<Vec<Formula>, EncodeError> = (1..=m)
            .map(|s| {
                let (a, b, v) = (block(VarKind::A, s), block(VarKind::B, s), block(VarKind::V, s));
                let (a_up, b_up) = (block(VarKind::A, s + 1), block(VarKind::B, s + 1));
                Ok(Formula::or(
                    Formula::and(eq_records(&a_up, &a)?, eq_records(&v, &b)?),
                    Formula::and(eq_records(&v, &a)?, eq_records(&b, &b_up)?),
                ))
            })
            .collect();
        Formula::implies(Formula::conj(thetas?).expect("m >= 1"), phi0)
    };
    for s in 1..=m {
        let mut ab = block(VarKind::A, s).vars();
        ab.extend(block(VarKind::B, s).vars());
        body = Formula::exists(block(VarKind::V, s).vars(), Formula::forall(ab, body));
    }
    let mut outer = y0.vars();
    outer.extend(yt.vars());
    Ok(Formula::forall(
        outer,
        Formula::implies(Formula::and(build_chi0(p)?, body), build_chi_omega(p)?),
    ))
}

/// Sort key that interleaves every record field bit by bit across colors
/// and auxiliary tuples, for BDD variable ordering. Takes QCIR-style names
/// `{kind}{group}_{bit}` with an optional rebinding suffix.
pub fn interleaved_key(p: &EncodingParams, name: &str) -> Option<(u8, usize, u8, u128, u32, u32)> {
    let kind = VarKind::from_letter(name.chars().next()?)?;
    let mut parts = name[1..].split('_');
    let group: u128 = parts.next()?.parse().ok()?;
    let bit: usize = parts.next()?.parse().ok()?;
    let copy: u32 = parts.next().map_or(Some(0), |c| c.parse().ok())?;
    let (a, c) = (p.addr_width(), p.code_width());
    // (field class, bit within field, field rank)
    let (class, pos, rank) = match kind {
        VarKind::X => (0, bit, 0),
        VarKind::Z => (0, bit, 1),
        VarKind::U => (0, bit, 2),
        VarKind::W => (0, bit, 3),
        VarKind::Q => (1, bit, 0),
        VarKind::D => (1, bit, 1),
        VarKind::F => (1, bit, 2),
        VarKind::G => (1, bit, 3),
        VarKind::H => (1, bit, 4),
        VarKind::A | VarKind::B | VarKind::V => {
            if bit < a {
                (0, bit, 0)
            } else if bit < a + c {
                (1, bit - a, 0)
            } else if bit < 2 * a + c {
                (0, bit - a - c, 1)
            } else if bit < 2 * a + 2 * c {
                (1, bit - 2 * a - c, 1)
            } else {
                (1, bit - 2 * a - 2 * c, 2)
            }
        }
        VarKind::Y => (2, bit, 0),
    };
    Some((class, pos, rank, group, kind as u32, copy))
}

/// Variable names sorted by [`interleaved_key`]; unparsable names go last.
pub fn interleaved_order(p: &EncodingParams, names: &[String]) -> Vec<String> {
    let mut keyed: Vec<(Option<_>, usize, &String)> =
        names.iter().enumerate().map(|(i, n)| (interleaved_key(p, n), i, n)).collect();
    keyed.sort_by(|x, y| match (&x.0, &y.0) {
        (Some(a), Some(b)) => a.cmp(b).then(x.1.cmp(&y.1)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => x.1.cmp(&y.1),
    });
    keyed.into_iter().map(|(_, _, n)| n.clone()).collect()
}

#[derive(Clone, Debug)]
pub enum Depth<'a> {
    Step { s: u32, from: &'a Configuration, to: &'a Configuration },
    Full,
}

pub fn build_omega(p: &EncodingParams, depth: Depth<'_>) -> Result<Formula, EncodeError> {
    match depth {
        Depth::Step { s, from, to } => build_omega_step(p, s, from, to),
        Depth::Full => build_omega_full(p),
    }
}
