//! Generator functions `Υ: B^n × B^m → B^n` and their combinators.
//!
//! The truth table is the canonical form. Table index of `(μ, ν)` is the
//! integer whose binary digits are `μ1 … μn ν1 … νm`, so state bits occupy
//! the high-order positions. Expression sources are kept for display only and
//! never participate in equality.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::bits::BitVector;
use crate::error::{Error, ParseError};

/// Largest `n + m` for which a table is built.
pub const ARITY_CAP: usize = 20;

/// Boolean expression over state variables `x1..xn` and inputs `u1..um`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(bool),
    State(usize),
    Input(usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Xor(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, state: &BitVector, input: &BitVector) -> bool {
        match self {
            Expr::Const(b) => *b,
            Expr::State(i) => state.get(*i),
            Expr::Input(i) => input.get(*i),
            Expr::Not(e) => !e.eval(state, input),
            Expr::And(a, b) => a.eval(state, input) && b.eval(state, input),
            Expr::Or(a, b) => a.eval(state, input) || b.eval(state, input),
            Expr::Xor(a, b) => a.eval(state, input) ^ b.eval(state, input),
        }
    }

    /// Replaces every variable by the expression `var` returns for it.
    pub fn substitute(&self, var: &impl Fn(&Expr) -> Expr) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::State(_) | Expr::Input(_) => var(self),
            Expr::Not(e) => Expr::Not(Box::new(e.substitute(var))),
            Expr::And(a, b) => Expr::And(Box::new(a.substitute(var)), Box::new(b.substitute(var))),
            Expr::Or(a, b) => Expr::Or(Box::new(a.substitute(var)), Box::new(b.substitute(var))),
            Expr::Xor(a, b) => Expr::Xor(Box::new(a.substitute(var)), Box::new(b.substitute(var))),
        }
    }

    fn not(e: Expr) -> Expr {
        match e {
            Expr::Not(inner) => *inner,
            Expr::Const(b) => Expr::Const(!b),
            e => Expr::Not(Box::new(e)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Or(..) => 1,
            Expr::Xor(..) => 2,
            Expr::And(..) => 3,
            _ => 4,
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Binary operators are left-associative, so a right operand of equal
        // precedence needs parentheses to survive a re-parse unchanged.
        let binary = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr, p: u8| {
            a.write_operand(f, p)?;
            write!(f, " {op} ")?;
            b.write_operand(f, p + 1)
        };
        match self {
            Expr::Const(b) => write!(f, "{}", *b as u8),
            Expr::State(i) => write!(f, "x{i}"),
            Expr::Input(i) => write!(f, "u{i}"),
            Expr::Not(e) => {
                f.write_str("!")?;
                e.write_operand(f, 4)
            }
            Expr::And(a, b) => binary(f, a, "&", b, 3),
            Expr::Xor(a, b) => binary(f, a, "^", b, 2),
            Expr::Or(a, b) => binary(f, a, "|", b, 1),
        }
    }
}

#[derive(Clone)]
pub struct GeneratorFunction {
    state_width: usize,
    input_width: usize,
    table: Vec<BitVector>,
    source: Option<Vec<Expr>>,
}

impl PartialEq for GeneratorFunction {
    fn eq(&self, other: &Self) -> bool {
        self.state_width == other.state_width
            && self.input_width == other.input_width
            && self.table == other.table
    }
}

impl Eq for GeneratorFunction {}

fn check_arity(n: usize, m: usize) -> Result<(), Error> {
    if n == 0 {
        return Err(Error::WidthOutOfRange(n));
    }
    if m == 0 {
        return Err(Error::WidthOutOfRange(m));
    }
    if n + m > ARITY_CAP {
        return Err(Error::ArityCapExceeded {
            arity: n + m,
            cap: ARITY_CAP,
        });
    }
    Ok(())
}

impl GeneratorFunction {
    /// Tabulates `f` over all `2^(n+m)` assignments.
    pub fn from_fn(
        state_width: usize,
        input_width: usize,
        mut f: impl FnMut(&BitVector, &BitVector) -> BitVector,
    ) -> Result<Self, Error> {
        check_arity(state_width, input_width)?;
        let mut table = Vec::with_capacity(1 << (state_width + input_width));
        for state in BitVector::all(state_width)? {
            for input in BitVector::all(input_width)? {
                let next = f(&state, &input);
                if next.width() != state_width {
                    return Err(Error::WidthMismatch {
                        expected: state_width,
                        found: next.width(),
                    });
                }
                table.push(next);
            }
        }
        Ok(GeneratorFunction {
            state_width,
            input_width,
            table,
            source: None,
        })
    }

    pub fn from_table(state_width: usize, input_width: usize, table: Vec<BitVector>) -> Result<Self, Error> {
        check_arity(state_width, input_width)?;
        let size = 1usize << (state_width + input_width);
        if table.len() != size {
            return Err(Error::WidthMismatch {
                expected: size,
                found: table.len(),
            });
        }
        if let Some(bad) = table.iter().find(|v| v.width() != state_width) {
            return Err(Error::WidthMismatch {
                expected: state_width,
                found: bad.width(),
            });
        }
        Ok(GeneratorFunction {
            state_width,
            input_width,
            table,
            source: None,
        })
    }

    /// Compiles one expression per state coordinate.
    pub fn from_exprs(state_width: usize, input_width: usize, exprs: Vec<Expr>) -> Result<Self, Error> {
        if exprs.len() != state_width {
            return Err(Error::WidthMismatch {
                expected: state_width,
                found: exprs.len(),
            });
        }
        let mut g = Self::from_fn(state_width, input_width, |s, u| {
            let bits: Vec<bool> = exprs.iter().map(|e| e.eval(s, u)).collect();
            BitVector::from_bools(&bits).expect("state width is valid")
        })?;
        g.source = Some(exprs);
        Ok(g)
    }

    /// `Υ(μ, ν) = μ`.
    pub fn identity(state_width: usize, input_width: usize) -> Result<Self, Error> {
        Self::from_exprs(state_width, input_width, (1..=state_width).map(Expr::State).collect())
    }

    pub fn state_width(&self) -> usize {
        self.state_width
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn table(&self) -> &[BitVector] {
        &self.table
    }

    pub fn source(&self) -> Option<&[Expr]> {
        self.source.as_deref()
    }

    fn index(&self, state: &BitVector, input: &BitVector) -> usize {
        ((state.value() << self.input_width) | input.value()) as usize
    }

    pub fn eval(&self, state: &BitVector, input: &BitVector) -> Result<BitVector, Error> {
        if state.width() != self.state_width {
            return Err(Error::WidthMismatch {
                expected: self.state_width,
                found: state.width(),
            });
        }
        if input.width() != self.input_width {
            return Err(Error::WidthMismatch {
                expected: self.input_width,
                found: input.width(),
            });
        }
        Ok(self.table[self.index(state, input)])
    }

    /// Table lookup for operands already known to have the right widths.
    pub(crate) fn apply(&self, state: &BitVector, input: &BitVector) -> BitVector {
        debug_assert_eq!(state.width(), self.state_width);
        debug_assert_eq!(input.width(), self.input_width);
        self.table[self.index(state, input)]
    }

    /// Whether `state` is a fixed point under `input`.
    pub fn is_fixed_point(&self, state: &BitVector, input: &BitVector) -> Result<bool, Error> {
        Ok(self.eval(state, input)? == *state)
    }

    /// One expression per coordinate: the source when present, otherwise a
    /// sum of minterms read off the table.
    pub fn expressions(&self) -> Vec<Expr> {
        if let Some(src) = &self.source {
            return src.clone();
        }
        let (n, m) = (self.state_width, self.input_width);
        (1..=n)
            .map(|i| {
                let mut terms = Vec::new();
                for (index, next) in self.table.iter().enumerate() {
                    if !next.get(i) {
                        continue;
                    }
                    let literal = |positive: bool, var: Expr| {
                        if positive {
                            var
                        } else {
                            Expr::Not(Box::new(var))
                        }
                    };
                    let mut term: Option<Expr> = None;
                    for k in 1..=n + m {
                        let bit = (index >> (n + m - k)) & 1 == 1;
                        let var = if k <= n { Expr::State(k) } else { Expr::Input(k - n) };
                        let lit = literal(bit, var);
                        term = Some(match term {
                            None => lit,
                            Some(t) => Expr::And(Box::new(t), Box::new(lit)),
                        });
                    }
                    terms.push(term.expect("n + m >= 2"));
                }
                if terms.len() == self.table.len() {
                    return Expr::Const(true);
                }
                terms
                    .into_iter()
                    .reduce(|a, b| Expr::Or(Box::new(a), Box::new(b)))
                    .unwrap_or(Expr::Const(false))
            })
            .collect()
    }

    /// `Υ*(μ, ν) = ¬Υ(¬μ, ¬ν)`.
    pub fn dual(&self) -> GeneratorFunction {
        let mut g = Self::from_fn(self.state_width, self.input_width, |s, u| {
            self.apply(&s.complement(), &u.complement()).complement()
        })
        .expect("same arity as an existing function");
        g.source = self.source.as_ref().map(|src| {
            src.iter()
                .map(|e| Expr::not(e.substitute(&|v| Expr::Not(Box::new(v.clone())))))
                .collect()
        });
        g
    }

    /// `(Υ × Υ′)((μ, μ′), (ν, ν′)) = (Υ(μ, ν), Υ′(μ′, ν′))`.
    pub fn product(&self, other: &GeneratorFunction) -> Result<GeneratorFunction, Error> {
        let (n, m) = (self.state_width, self.input_width);
        let (n2, m2) = (other.state_width, other.input_width);
        let mut g = Self::from_fn(n + n2, m + m2, |s, u| {
            let left = self.apply(&s.slice(1, n).unwrap(), &u.slice(1, m).unwrap());
            let right = other.apply(&s.slice(n + 1, n + n2).unwrap(), &u.slice(m + 1, m + m2).unwrap());
            left.concat(&right).unwrap()
        })?;
        if let (Some(a), Some(b)) = (&self.source, &other.source) {
            let shift = |v: &Expr| match v {
                Expr::State(i) => Expr::State(i + n),
                Expr::Input(j) => Expr::Input(j + m),
                _ => unreachable!(),
            };
            g.source = Some(a.iter().cloned().chain(b.iter().map(|e| e.substitute(&shift))).collect());
        }
        Ok(g)
    }

    /// `(Υ || Υ′)((μ, μ′), ν) = (Υ(μ, ν), Υ′(μ′, ν))`.
    pub fn parallel(&self, other: &GeneratorFunction) -> Result<GeneratorFunction, Error> {
        if self.input_width != other.input_width {
            return Err(Error::InputWidthMismatch {
                left: self.input_width,
                right: other.input_width,
            });
        }
        let (n, n2) = (self.state_width, other.state_width);
        let mut g = Self::from_fn(n + n2, self.input_width, |s, u| {
            let left = self.apply(&s.slice(1, n).unwrap(), u);
            let right = other.apply(&s.slice(n + 1, n + n2).unwrap(), u);
            left.concat(&right).unwrap()
        })?;
        if let (Some(a), Some(b)) = (&self.source, &other.source) {
            let shift = |v: &Expr| match v {
                Expr::State(i) => Expr::State(i + n),
                other => other.clone(),
            };
            g.source = Some(a.iter().cloned().chain(b.iter().map(|e| e.substitute(&shift))).collect());
        }
        Ok(g)
    }

    /// `(ϑ ∗ Υ)((μ, λ), ν) = (Υ(μ, ν), ϑ(λ, Υ(μ, ν)))` with `self = ϑ`
    /// and `first = Υ`. The second stage reads the freshly computed
    /// `Υ(μ, ν)`, not `μ`.
    pub fn serial_star(&self, first: &GeneratorFunction) -> Result<GeneratorFunction, Error> {
        if self.input_width != first.state_width {
            return Err(Error::WidthMismatch {
                expected: first.state_width,
                found: self.input_width,
            });
        }
        let (n, p) = (first.state_width, self.state_width);
        let mut g = Self::from_fn(n + p, first.input_width, |s, u| {
            let x = first.apply(&s.slice(1, n).unwrap(), u);
            let y = self.apply(&s.slice(n + 1, n + p).unwrap(), &x);
            x.concat(&y).unwrap()
        })?;
        if let (Some(h), Some(f)) = (&self.source, &first.source) {
            let feed = |v: &Expr| match v {
                Expr::State(i) => Expr::State(i + n),
                Expr::Input(j) => f[j - 1].clone(),
                _ => unreachable!(),
            };
            g.source = Some(f.iter().cloned().chain(h.iter().map(|e| e.substitute(&feed))).collect());
        }
        Ok(g)
    }
}

impl fmt::Display for GeneratorFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} m={}", self.state_width, self.input_width)?;
        for (i, e) in self.expressions().iter().enumerate() {
            write!(f, " ; x{}' = {e}", i + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for GeneratorFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GeneratorFunction(n={} m={} [", self.state_width, self.input_width)?;
        for (k, v) in self.table.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("])")
    }
}

impl FromStr for GeneratorFunction {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        crate::syntax::parse_genfn(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn g(text: &str) -> GeneratorFunction {
        text.parse().unwrap()
    }

    #[test]
    fn eval_examples() {
        let id = GeneratorFunction::identity(1, 1).unwrap();
        assert_eq!(id.eval(&bv("0"), &bv("1")).unwrap(), bv("0"));
        let copy = g("n=1 m=1 ; x1' = u1");
        assert_eq!(copy.eval(&bv("0"), &bv("1")).unwrap(), bv("1"));
        let not = g("n=1 m=1 ; x1' = !x1");
        assert_eq!(not.eval(&bv("1"), &bv("0")).unwrap(), bv("0"));
        assert!(matches!(
            not.eval(&bv("11"), &bv("0")),
            Err(Error::WidthMismatch { .. })
        ));
    }

    #[test]
    fn dual_examples() {
        let and = g("n=1 m=1 ; x1' = x1 & u1");
        let or = g("n=1 m=1 ; x1' = x1 | u1");
        assert_eq!(and.dual(), or);
        assert_eq!(g("n=1 m=1 ; x1' = 0").dual(), g("n=1 m=1 ; x1' = 1"));
        let f = g("n=2 m=1 ; x1' = !x2 & u1 ; x2' = x1 ^ u1");
        assert_eq!(f.dual().dual(), f);
        // derived source compiles to the same table
        let reparsed: GeneratorFunction = alloc::format!("{}", f.dual()).parse().unwrap();
        assert_eq!(reparsed, f.dual());
    }

    #[test]
    fn product_examples() {
        let id = GeneratorFunction::identity(1, 1).unwrap();
        assert_eq!(id.product(&id).unwrap(), GeneratorFunction::identity(2, 2).unwrap());
        let not = g("n=1 m=1 ; x1' = !x1");
        let copy = g("n=1 m=1 ; x1' = u1");
        let p = not.product(&copy).unwrap();
        assert_eq!(p.table().len(), 16);
        for junk in ["00", "10"] {
            let u = bv(junk).with(2, true);
            assert_eq!(p.eval(&bv("10"), &u).unwrap(), bv("01"));
        }
    }

    #[test]
    fn parallel_examples() {
        let copy = g("n=1 m=1 ; x1' = u1");
        let neg = g("n=1 m=1 ; x1' = !u1");
        let p = copy.parallel(&neg).unwrap();
        for s in ["00", "01", "10", "11"] {
            assert_eq!(p.eval(&bv(s), &bv("1")).unwrap(), bv("10"));
        }
        let wide = g("n=1 m=2 ; x1' = u2");
        assert_eq!(
            copy.parallel(&wide),
            Err(Error::InputWidthMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn serial_star_examples() {
        // first stage holds its state, second copies what it reads
        let hold = GeneratorFunction::identity(1, 1).unwrap();
        let copy = g("n=1 m=1 ; x1' = u1");
        let s = copy.serial_star(&hold).unwrap();
        for state in ["00", "01", "10", "11"] {
            for input in ["0", "1"] {
                let st = bv(state);
                let mu = st.get(1);
                let expect = BitVector::from_bools(&[mu, mu]).unwrap();
                assert_eq!(s.eval(&st, &bv(input)).unwrap(), expect);
            }
        }
        // both stages hold
        let both = hold.serial_star(&hold).unwrap();
        assert_eq!(both, GeneratorFunction::identity(2, 1).unwrap());
        assert_eq!(s.table().len(), 8);
        assert_eq!(s.state_width(), 2);
        let wide = g("n=1 m=2 ; x1' = u2");
        assert!(matches!(wide.serial_star(&hold), Err(Error::WidthMismatch { .. })));
    }

    #[test]
    fn minterm_fallback_round_trips() {
        let f = GeneratorFunction::from_fn(2, 1, |s, u| {
            BitVector::from_value(2, s.value().wrapping_mul(3) ^ u.value()).unwrap()
        })
        .unwrap();
        assert!(f.source().is_none());
        let text = alloc::format!("{f}");
        assert_eq!(text.parse::<GeneratorFunction>().unwrap(), f);
        let zero = GeneratorFunction::from_fn(1, 1, |_, _| bv("0")).unwrap();
        assert_eq!(alloc::format!("{zero}"), "n=1 m=1 ; x1' = 0");
    }

    #[test]
    fn display_parenthesizes_right_operands() {
        let f = g("n=1 m=3 ; x1' = u1 & (u2 & u3) | !(u1 ^ x1)");
        let text = alloc::format!("{f}");
        assert_eq!(text, "n=1 m=3 ; x1' = u1 & (u2 & u3) | !(u1 ^ x1)");
        assert_eq!(text.parse::<GeneratorFunction>().unwrap().source(), f.source());
    }
}
