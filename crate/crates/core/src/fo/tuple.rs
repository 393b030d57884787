use super::{FoError, Formula, Term, VarId, VarKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    Inc,
    Dec,
}

/// Binary constant tuple for `value`, most significant bit first.
pub fn const_tuple(value: u128, width: usize) -> Vec<Term> {
    (0..width)
        .map(|i| {
            let shift = width - 1 - i;
            Term::bit(shift < 128 && (value >> shift) & 1 == 1)
        })
        .collect()
}

/// Variables `kind group,offset .. kind group,offset+width-1`.
pub fn var_tuple(kind: VarKind, group: u128, offset: u32, width: usize) -> Vec<Term> {
    (0..width as u32).map(|i| Term::Var(VarId::new(kind, group, offset + i))).collect()
}

/// Reads a bit tuple (most significant first) as a number.
pub fn tuple_value(bits: &[bool]) -> u128 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as u128)
}

fn check(lhs: &[Term], rhs: &[Term]) -> Result<(), FoError> {
    if lhs.len() != rhs.len() || lhs.is_empty() {
        return Err(FoError::LengthMismatch(lhs.len(), rhs.len()));
    }
    Ok(())
}

/// `lhs_0 ≈ rhs_0 ∧ … ∧ lhs_n ≈ rhs_n`.
pub fn eq_tuple(lhs: &[Term], rhs: &[Term]) -> Result<Formula, FoError> {
    check(lhs, rhs)?;
    let atoms = lhs.iter().zip(rhs).map(|(a, b)| Formula::eq(a.clone(), b.clone()));
    Ok(Formula::conj(atoms).expect("non-empty"))
}

fn bit_less(a: &Term, b: &Term) -> Formula {
    Formula::and(Formula::eq(a.clone(), Term::Zero), Formula::eq(b.clone(), Term::One))
}

/// Lexicographic `lhs < rhs` over bit tuples.
pub fn lex_less(lhs: &[Term], rhs: &[Term]) -> Result<Formula, FoError> {
    check(lhs, rhs)?;
    let n = lhs.len();
    let mut acc = bit_less(&lhs[n - 1], &rhs[n - 1]);
    for i in (0..n - 1).rev() {
        acc = Formula::or(
            bit_less(&lhs[i], &rhs[i]),
            Formula::and(Formula::eq(lhs[i].clone(), rhs[i].clone()), acc),
        );
    }
    Ok(acc)
}

/// Terms for `u + 1` or `u - 1` modulo `2^len`.
///
/// Component `j` flips when every lower bit is 1 (increment) or 0
/// (decrement); the lowest bit always flips.
pub fn shifted_tuple(u: &[Term], dir: Shift) -> Vec<Term> {
    let n = u.len();
    let factor = |t: &Term| match dir {
        Shift::Inc => t.clone(),
        Shift::Dec => Term::compl(t.clone()),
    };
    (0..n)
        .map(|j| {
            if j + 1 == n {
                Term::xor(u[j].clone(), Term::One)
            } else {
                let carry = u[j + 1..].iter().map(factor).reduce(Term::meet).expect("non-empty");
                Term::xor(u[j].clone(), carry)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::eval_term_bits;

    fn bits(v: u128, w: usize) -> Vec<Term> {
        const_tuple(v, w)
    }

    #[test]
    fn eq_tuple_shapes() {
        let x = VarId::new(VarKind::X, 0, 0);
        assert_eq!(eq_tuple(&[Term::Var(x)], &[Term::One]).unwrap(), Formula::eq(Term::Var(x), Term::One));
        assert_eq!(eq_tuple(&[Term::One], &[]), Err(FoError::LengthMismatch(1, 0)));
    }

    #[test]
    fn shift_small_cases() {
        let inc = shifted_tuple(&bits(3, 3), Shift::Inc);
        assert_eq!(eval_term_bits(&inc), vec![true, false, false]);
        let dec = shifted_tuple(&bits(4, 3), Shift::Dec);
        assert_eq!(eval_term_bits(&dec), vec![false, true, true]);
        let wrap = shifted_tuple(&bits(0, 3), Shift::Dec);
        assert_eq!(eval_term_bits(&wrap), vec![true, true, true]);
    }

    #[test]
    fn const_tuple_is_msb_first() {
        assert_eq!(const_tuple(2, 2), vec![Term::One, Term::Zero]);
        assert_eq!(tuple_value(&[true, false, true]), 5);
    }
}
