use core::fmt;
use core::str::FromStr;

use crate::error::{Error, ParseError};

/// Widest vector representable; also bounds signal and schedule widths.
pub const MAX_WIDTH: usize = 64;

/// A point of `B^k`.
///
/// Coordinates are numbered from 1. Coordinate 1 is the most significant bit
/// of [`BitVector::value`], so the textual form `b1 b2 ... bk` reads as a
/// binary number and concatenation is a shift.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    width: u8,
    bits: u64,
}

fn mask(width: usize) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl BitVector {
    pub fn zeros(width: usize) -> Result<Self, Error> {
        Self::from_value(width, 0)
    }

    pub fn ones(width: usize) -> Result<Self, Error> {
        Self::from_value(width, u64::MAX)
    }

    /// Keeps the low `width` bits of `value`.
    pub fn from_value(width: usize, value: u64) -> Result<Self, Error> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(width));
        }
        Ok(BitVector {
            width: width as u8,
            bits: value & mask(width),
        })
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self, Error> {
        let value = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Self::from_value(bits.len(), value)
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn value(&self) -> u64 {
        self.bits
    }

    fn shift(&self, coordinate: usize) -> usize {
        assert!(
            (1..=self.width()).contains(&coordinate),
            "coordinate {coordinate} outside 1..={}",
            self.width
        );
        self.width() - coordinate
    }

    /// Value of coordinate `i` (1-based). Panics when out of range.
    pub fn get(&self, i: usize) -> bool {
        (self.bits >> self.shift(i)) & 1 == 1
    }

    pub fn with(mut self, i: usize, value: bool) -> Self {
        let s = self.shift(i);
        self.bits = (self.bits & !(1 << s)) | ((value as u64) << s);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (1..=self.width()).map(move |i| self.get(i))
    }

    /// Coordinatewise complement.
    pub fn complement(&self) -> Self {
        BitVector {
            width: self.width,
            bits: !self.bits & mask(self.width()),
        }
    }

    /// `(self, other)` as a point of `B^(n+m)`.
    pub fn concat(&self, other: &BitVector) -> Result<Self, Error> {
        let width = self.width() + other.width();
        if width > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(width));
        }
        Ok(BitVector {
            width: width as u8,
            bits: (self.bits << other.width) | other.bits,
        })
    }

    /// Coordinates `lo..=hi` (1-based).
    pub fn slice(&self, lo: usize, hi: usize) -> Result<Self, Error> {
        if lo == 0 || lo > hi || hi > self.width() {
            return Err(Error::BadRange {
                lo,
                hi,
                width: self.width(),
            });
        }
        Self::from_value(hi - lo + 1, self.bits >> (self.width() - hi))
    }

    pub fn and(&self, other: &BitVector) -> Self {
        debug_assert_eq!(self.width, other.width);
        BitVector {
            width: self.width,
            bits: self.bits & other.bits,
        }
    }

    pub fn or(&self, other: &BitVector) -> Self {
        debug_assert_eq!(self.width, other.width);
        BitVector {
            width: self.width,
            bits: self.bits | other.bits,
        }
    }

    pub fn xor(&self, other: &BitVector) -> Self {
        debug_assert_eq!(self.width, other.width);
        BitVector {
            width: self.width,
            bits: self.bits ^ other.bits,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Coordinates (1-based) set to 1, in increasing order.
    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.width()).filter(move |&i| self.get(i))
    }

    /// All `2^width` vectors in increasing numeric order.
    pub fn all(width: usize) -> Result<impl Iterator<Item = BitVector>, Error> {
        if width == 0 || width > 32 {
            return Err(Error::WidthOutOfRange(width));
        }
        Ok((0..1u64 << width).map(move |v| BitVector {
            width: width as u8,
            bits: v,
        }))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for BitVector {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        if text.is_empty() || text.len() > MAX_WIDTH {
            return Err(ParseError::BadBits(text.into()));
        }
        let mut value = 0u64;
        for c in text.bytes() {
            value = (value << 1)
                | match c {
                    b'0' => 0,
                    b'1' => 1,
                    _ => return Err(ParseError::BadBits(text.into())),
                };
        }
        Ok(BitVector {
            width: text.len() as u8,
            bits: value,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn coordinate_one_is_most_significant() {
        let v = bv("100");
        assert!(v.get(1));
        assert!(!v.get(3));
        assert_eq!(v.value(), 4);
        assert_eq!(v.with(3, true), bv("101"));
    }

    #[test]
    fn concat_and_slice_are_inverse() {
        let a = bv("10");
        let b = bv("011");
        let ab = a.concat(&b).unwrap();
        assert_eq!(ab, bv("10011"));
        assert_eq!(ab.slice(1, 2).unwrap(), a);
        assert_eq!(ab.slice(3, 5).unwrap(), b);
        assert!(ab.slice(0, 2).is_err());
        assert!(ab.slice(4, 3).is_err());
        assert!(ab.slice(2, 6).is_err());
    }

    #[test]
    fn complement_is_coordinatewise() {
        assert_eq!(bv("0110").complement(), bv("1001"));
        assert_eq!(bv("1").complement().complement(), bv("1"));
    }

    #[test]
    fn rejects_bad_text_and_widths() {
        assert!("".parse::<BitVector>().is_err());
        assert!("012".parse::<BitVector>().is_err());
        assert!(BitVector::zeros(0).is_err());
        assert!(BitVector::zeros(65).is_err());
        assert!(BitVector::ones(64).unwrap().concat(&bv("1")).is_err());
    }
}
