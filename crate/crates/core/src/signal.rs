//! Eventually constant `n`-signals.
//!
//! A signal is right-continuous and piecewise constant: it holds its initial
//! value on `(-inf, t0)` and the value of switch `k` on `[t_k, t_{k+1})`.
//! Only the finitely many value changes are stored, so two signals are equal
//! as functions exactly when they are structurally equal.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::bits::BitVector;
use crate::error::{Error, ParseError};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signal {
    initial: BitVector,
    switches: Vec<(Rational, BitVector)>,
}

impl Signal {
    pub fn constant(value: BitVector) -> Self {
        Signal {
            initial: value,
            switches: Vec::new(),
        }
    }

    /// Builds the canonical signal with the given initial value and switch
    /// list, dropping switches that repeat the running value.
    pub fn canonicalize<I>(initial: BitVector, raw: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (Rational, BitVector)>,
    {
        let mut switches: Vec<(Rational, BitVector)> = Vec::new();
        let mut current = initial;
        let mut last_time: Option<Rational> = None;
        for (index, (time, value)) in raw.into_iter().enumerate() {
            if value.width() != initial.width() {
                return Err(Error::WidthMismatch {
                    expected: initial.width(),
                    found: value.width(),
                });
            }
            if last_time.is_some_and(|last| time <= last) {
                return Err(Error::NonIncreasingTimes { index });
            }
            last_time = Some(time);
            if value != current {
                switches.push((time, value));
                current = value;
            }
        }
        Ok(Signal { initial, switches })
    }

    pub fn width(&self) -> usize {
        self.initial.width()
    }

    /// `x(-inf + 0)`.
    pub fn initial_value(&self) -> BitVector {
        self.initial
    }

    pub fn final_value(&self) -> BitVector {
        self.switches.last().map_or(self.initial, |&(_, v)| v)
    }

    pub fn switches(&self) -> &[(Rational, BitVector)] {
        &self.switches
    }

    pub fn switch_times(&self) -> impl Iterator<Item = Rational> + '_ {
        self.switches.iter().map(|&(t, _)| t)
    }

    pub fn last_switch_time(&self) -> Option<Rational> {
        self.switches.last().map(|&(t, _)| t)
    }

    pub fn is_constant(&self) -> bool {
        self.switches.is_empty()
    }

    /// `x(t)`.
    pub fn value_at(&self, t: Rational) -> BitVector {
        match self.switches.partition_point(|&(s, _)| s <= t) {
            0 => self.initial,
            k => self.switches[k - 1].1,
        }
    }

    /// `x(t - 0)`: the value on a left neighbourhood of `t`.
    pub fn left_limit(&self, t: Rational) -> BitVector {
        match self.switches.partition_point(|&(s, _)| s < t) {
            0 => self.initial,
            k => self.switches[k - 1].1,
        }
    }

    /// The signal `(x, u)` of width `n + m`.
    pub fn pair(&self, other: &Signal) -> Result<Signal, Error> {
        let initial = self.initial.concat(&other.initial)?;
        let mut times: Vec<Rational> = self.switch_times().chain(other.switch_times()).collect();
        times.sort_unstable();
        times.dedup();
        let mut raw = Vec::with_capacity(times.len());
        for t in times {
            raw.push((t, self.value_at(t).concat(&other.value_at(t))?));
        }
        Signal::canonicalize(initial, raw)
    }

    /// Coordinates `lo..=hi` (1-based).
    pub fn project(&self, lo: usize, hi: usize) -> Result<Signal, Error> {
        let initial = self.initial.slice(lo, hi)?;
        let raw = self
            .switches
            .iter()
            .map(|&(t, v)| v.slice(lo, hi).map(|s| (t, s)))
            .collect::<Result<Vec<_>, _>>()?;
        Signal::canonicalize(initial, raw)
    }

    /// Coordinatewise complement `x̄`.
    pub fn complement(&self) -> Signal {
        Signal {
            initial: self.initial.complement(),
            switches: self
                .switches
                .iter()
                .map(|&(t, v)| (t, v.complement()))
                .collect(),
        }
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "init {}", self.initial)?;
        for (t, v) in &self.switches {
            write!(f, " ; {t}:{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signal({self})")
    }
}

impl FromStr for Signal {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        crate::syntax::parse_signal(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn sig(init: &str, sw: &[(i64, &str)]) -> Signal {
        Signal::canonicalize(
            bv(init),
            sw.iter().map(|&(t, v)| (Rational::integer(t), bv(v))),
        )
        .unwrap()
    }

    #[test]
    fn value_at_is_right_continuous() {
        let x = sig("0", &[(1, "1")]);
        assert_eq!(x.value_at(r(1, 2)), bv("0"));
        assert_eq!(x.value_at(r(1, 1)), bv("1"));
        assert_eq!(x.value_at(r(100, 1)), bv("1"));
    }

    #[test]
    fn left_limit_is_left_continuous() {
        let x = sig("0", &[(1, "1")]);
        assert_eq!(x.left_limit(r(1, 1)), bv("0"));
        assert_eq!(x.left_limit(r(3, 2)), bv("1"));
        let c = Signal::constant(bv("01"));
        for t in [-5, 0, 7] {
            assert_eq!(c.left_limit(Rational::integer(t)), bv("01"));
        }
    }

    #[test]
    fn initial_and_final_values() {
        assert_eq!(sig("0", &[(1, "1")]).initial_value(), bv("0"));
        assert_eq!(sig("0", &[(1, "1")]).final_value(), bv("1"));
        assert_eq!(sig("0", &[(1, "1"), (2, "0")]).final_value(), bv("0"));
        assert_eq!(Signal::constant(bv("10")).initial_value(), bv("10"));
        assert_eq!(Signal::constant(bv("10")).final_value(), bv("10"));
        let p = sig("0", &[(1, "1")]).pair(&sig("1", &[])).unwrap();
        assert_eq!(p.initial_value(), bv("01"));
    }

    #[test]
    fn canonicalize_drops_repeats() {
        let a = sig("0", &[(1, "0"), (2, "1")]);
        assert_eq!(a.switches(), &[(Rational::integer(2), bv("1"))]);
        let b = sig("0", &[(1, "1"), (2, "1")]);
        assert_eq!(b.switches(), &[(Rational::integer(1), bv("1"))]);
        let err = Signal::canonicalize(
            bv("0"),
            [(Rational::integer(2), bv("1")), (Rational::integer(1), bv("0"))],
        );
        assert_eq!(err, Err(Error::NonIncreasingTimes { index: 1 }));
        let err = Signal::canonicalize(bv("0"), [(Rational::ONE, bv("11"))]);
        assert!(matches!(err, Err(Error::WidthMismatch { .. })));
    }

    #[test]
    fn pair_merges_time_grids() {
        let x = sig("0", &[(1, "1")]);
        let u = sig("0", &[(2, "1")]);
        let p = x.pair(&u).unwrap();
        assert_eq!(p, sig("00", &[(1, "10"), (2, "11")]));
        assert_eq!(p.project(1, 1).unwrap(), x);
        assert_eq!(p.project(2, 2).unwrap(), u);
        assert!(p.project(2, 3).is_err());
        let c = Signal::constant(bv("0")).pair(&Signal::constant(bv("1"))).unwrap();
        assert_eq!(c, Signal::constant(bv("01")));
        assert_eq!(c.project(1, 1).unwrap(), Signal::constant(bv("0")));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(
            Signal::constant(bv("0")).complement(),
            Signal::constant(bv("1"))
        );
        let x = sig("0", &[(1, "1")]);
        assert_eq!(x.complement(), sig("1", &[(1, "0")]));
        assert_eq!(x.complement().complement(), x);
    }

    #[test]
    fn display_and_parse_round_trip() {
        let x = Signal::canonicalize(
            bv("01"),
            [(r(1, 2), bv("11")), (r(3, 1), bv("10"))],
        )
        .unwrap();
        let text = alloc::format!("{x}");
        assert_eq!(text, "init 01 ; 1/2:11 ; 3:10");
        assert_eq!(text.parse::<Signal>().unwrap(), x);
    }
}
