//! Progressive update schedules.
//!
//! A schedule fires subsets of the coordinates `1..=n` at isolated times: a
//! finite prefix of events followed by a pattern repeated every `period`
//! starting at `anchor`. It is progressive when every coordinate occurs in
//! the repeated pattern, i.e. fires infinitely often.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::bits::{BitVector, MAX_WIDTH};
use crate::error::{Error, ParseError};
use crate::rational::Rational;

/// One fire instant: the time and the set of coordinates updated there.
pub type Event = (Rational, BitVector);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Schedule {
    width: usize,
    prefix: Vec<Event>,
    anchor: Rational,
    period: Rational,
    pattern: Vec<Event>,
}

impl Schedule {
    /// `pattern` offsets are relative to `anchor + j * period`.
    pub fn new(
        width: usize,
        prefix: Vec<Event>,
        anchor: Rational,
        period: Rational,
        pattern: Vec<Event>,
    ) -> Result<Self, Error> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(width));
        }
        for (_, fires) in prefix.iter().chain(&pattern) {
            if fires.width() != width {
                return Err(Error::WidthMismatch {
                    expected: width,
                    found: fires.width(),
                });
            }
            if fires.is_zero() {
                return Err(Error::InvalidSchedule("empty fire set"));
            }
        }
        if prefix.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidSchedule("prefix times not strictly increasing"));
        }
        if prefix.last().is_some_and(|&(t, _)| t >= anchor) {
            return Err(Error::InvalidSchedule("tail anchor must follow the prefix"));
        }
        if !period.is_positive() {
            return Err(Error::InvalidSchedule("tail period must be positive"));
        }
        if pattern.is_empty() {
            return Err(Error::InvalidSchedule("tail pattern is empty"));
        }
        if pattern.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidSchedule("tail offsets not strictly increasing"));
        }
        if pattern
            .iter()
            .any(|&(o, _)| o < Rational::ZERO || o >= period)
        {
            return Err(Error::InvalidSchedule("tail offset outside [0, period)"));
        }
        Ok(Schedule {
            width,
            prefix,
            anchor,
            period,
            pattern,
        })
    }

    /// Fires every coordinate at `anchor`, `anchor + 1`, ...
    pub fn all_fire(width: usize, anchor: Rational) -> Result<Self, Error> {
        Self::new(
            width,
            Vec::new(),
            anchor,
            Rational::ONE,
            alloc::vec![(Rational::ZERO, BitVector::ones(width)?)],
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn prefix(&self) -> &[Event] {
        &self.prefix
    }

    pub fn anchor(&self) -> Rational {
        self.anchor
    }

    pub fn period(&self) -> Rational {
        self.period
    }

    pub fn pattern(&self) -> &[Event] {
        &self.pattern
    }

    pub fn is_progressive(&self) -> bool {
        self.pattern
            .iter()
            .fold(BitVector::zeros(self.width).expect("validated width"), |acc, (_, f)| {
                acc.or(f)
            })
            == BitVector::ones(self.width).expect("validated width")
    }

    /// Start of tail period `j`.
    pub fn boundary(&self, j: u64) -> Rational {
        self.anchor + self.period.scale(j as i64)
    }

    /// Least `j` with `boundary(j) > t`.
    pub fn first_boundary_after(&self, t: Rational) -> u64 {
        if t < self.anchor {
            return 0;
        }
        let periods = (t - self.anchor)
            .checked_div(self.period)
            .expect("positive period");
        periods.floor() as u64 + 1
    }

    /// All events in increasing time order; infinite.
    pub fn events(&self) -> Events<'_> {
        Events {
            schedule: self,
            prefix_index: 0,
            cycle: 0,
            pattern_index: 0,
        }
    }

    /// Events with time `<= horizon`.
    pub fn events_up_to(&self, horizon: Rational) -> Vec<Event> {
        self.events().take_while(|&(t, _)| t <= horizon).collect()
    }

    /// The schedule `(ρ, ρ′)` of width `n + n′`: fire times are merged, fire
    /// sets at common times are joined, and the coordinates of `other` are
    /// shifted past those of `self`. The tail period is the rational lcm of
    /// the operand periods, anchored at the later operand anchor.
    pub fn pair(&self, other: &Schedule) -> Result<Schedule, Error> {
        if !self.is_progressive() || !other.is_progressive() {
            return Err(Error::NotProgressive);
        }
        let width = self.width + other.width;
        if width > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(width));
        }
        let period = self
            .period
            .lcm(other.period)
            .expect("periods are positive");
        let anchor = self.anchor.max(other.anchor);
        let end = anchor + period;

        let left_pad = BitVector::zeros(other.width)?;
        let right_pad = BitVector::zeros(self.width)?;
        let mut left = self.events().take_while(|&(t, _)| t < end).peekable();
        let mut right = other.events().take_while(|&(t, _)| t < end).peekable();
        let mut merged: Vec<Event> = Vec::new();
        loop {
            let next = match (left.peek(), right.peek()) {
                (None, None) => break,
                (Some(&(tl, fl)), Some(&(tr, fr))) if tl == tr => {
                    left.next();
                    right.next();
                    (tl, fl.concat(&fr)?)
                }
                (Some(&(tl, fl)), Some(&(tr, _))) if tl < tr => {
                    left.next();
                    (tl, fl.concat(&left_pad)?)
                }
                (Some(&(tl, fl)), None) => {
                    left.next();
                    (tl, fl.concat(&left_pad)?)
                }
                (_, Some(&(tr, fr))) => {
                    right.next();
                    (tr, right_pad.concat(&fr)?)
                }
            };
            merged.push(next);
        }
        let split = merged.partition_point(|&(t, _)| t < anchor);
        let pattern = merged
            .split_off(split)
            .into_iter()
            .map(|(t, f)| (t - anchor, f))
            .collect();
        Schedule::new(width, merged, anchor, period, pattern)
    }
}

/// Iterator over the events of a [`Schedule`].
pub struct Events<'a> {
    schedule: &'a Schedule,
    prefix_index: usize,
    cycle: u64,
    pattern_index: usize,
}

impl Iterator for Events<'_> {
    type Item = Event;

    fn next(&mut self) -> Option<Event> {
        let s = self.schedule;
        if let Some(&event) = s.prefix.get(self.prefix_index) {
            self.prefix_index += 1;
            return Some(event);
        }
        let (offset, fires) = s.pattern[self.pattern_index];
        let event = (s.boundary(self.cycle) + offset, fires);
        self.pattern_index += 1;
        if self.pattern_index == s.pattern.len() {
            self.pattern_index = 0;
            self.cycle += 1;
        }
        Some(event)
    }
}

struct FireSet<'a>(&'a BitVector);

impl fmt::Display for FireSet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.0.ones_positions().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

fn write_events(f: &mut fmt::Formatter<'_>, events: &[Event]) -> fmt::Result {
    f.write_str("[")?;
    for (k, (t, fires)) in events.iter().enumerate() {
        if k > 0 {
            f.write_str("; ")?;
        }
        write!(f, "{t}:{}", FireSet(fires))?;
    }
    f.write_str("]")
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sched n={} prefix", self.width)?;
        write_events(f, &self.prefix)?;
        write!(f, " tail anchor={} period={} ", self.anchor, self.period)?;
        write_events(f, &self.pattern)
    }
}

impl fmt::Debug for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Schedule({self})")
    }
}

impl FromStr for Schedule {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        crate::syntax::parse_schedule(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn int(v: i64) -> Rational {
        Rational::integer(v)
    }

    #[test]
    fn progressiveness_requires_every_coordinate_in_tail() {
        let all = Schedule::new(2, vec![], int(0), int(1), vec![(int(0), bv("11"))]).unwrap();
        assert!(all.is_progressive());
        let partial =
            Schedule::new(2, vec![(int(0), bv("01"))], int(1), int(1), vec![(int(0), bv("10"))])
                .unwrap();
        assert!(!partial.is_progressive());
        let two = Schedule::new(
            1,
            vec![],
            int(0),
            int(1),
            vec![(int(0), bv("1")), (Rational::new(1, 2), bv("1"))],
        )
        .unwrap();
        assert!(two.is_progressive());
    }

    #[test]
    fn unrolls_prefix_then_tail() {
        let s = Schedule::new(1, vec![(int(1), bv("1"))], int(2), int(1), vec![(int(0), bv("1"))])
            .unwrap();
        assert_eq!(
            s.events_up_to(int(3)),
            vec![(int(1), bv("1")), (int(2), bv("1")), (int(3), bv("1"))]
        );
        assert!(s.events_up_to(Rational::new(1, 2)).is_empty());
    }

    #[test]
    fn two_offsets_over_two_periods_give_four_events() {
        let s = Schedule::new(
            1,
            vec![],
            int(0),
            int(1),
            vec![(int(0), bv("1")), (Rational::new(1, 2), bv("1"))],
        )
        .unwrap();
        // [0, 2) holds periods 0 and 1
        assert_eq!(s.events_up_to(Rational::new(3, 2)).len(), 4);
    }

    #[test]
    fn rejects_malformed_schedules() {
        let empty = BitVector::zeros(1).unwrap();
        assert!(Schedule::new(1, vec![], int(0), int(1), vec![(int(0), empty)]).is_err());
        assert!(Schedule::new(1, vec![], int(0), int(0), vec![(int(0), bv("1"))]).is_err());
        assert!(Schedule::new(1, vec![], int(0), int(1), vec![(int(1), bv("1"))]).is_err());
        assert!(Schedule::new(1, vec![], int(0), int(1), vec![]).is_err());
        assert!(
            Schedule::new(1, vec![(int(2), bv("1"))], int(2), int(1), vec![(int(0), bv("1"))])
                .is_err()
        );
        assert!(Schedule::new(
            1,
            vec![(int(1), bv("1")), (int(1), bv("1"))],
            int(3),
            int(1),
            vec![(int(0), bv("1"))]
        )
        .is_err());
    }

    #[test]
    fn pairing_merges_and_shifts() {
        let r = Schedule::new(1, vec![], int(0), int(1), vec![(int(0), bv("1"))]).unwrap();
        let s = Schedule::new(1, vec![], int(0), int(1), vec![(Rational::new(1, 2), bv("1"))])
            .unwrap();
        let p = r.pair(&s).unwrap();
        assert_eq!(p.period(), int(1));
        assert_eq!(
            p.pattern(),
            &[(int(0), bv("10")), (Rational::new(1, 2), bv("01"))]
        );
        let same = r.pair(&r).unwrap();
        assert_eq!(same.pattern(), &[(int(0), bv("11"))]);
    }

    #[test]
    fn pairing_requires_progressive_operands() {
        let r = Schedule::new(2, vec![], int(0), int(1), vec![(int(0), bv("10"))]).unwrap();
        let s = Schedule::all_fire(1, int(0)).unwrap();
        assert_eq!(r.pair(&s), Err(Error::NotProgressive));
    }

    #[test]
    fn first_boundary_after() {
        let s = Schedule::all_fire(1, int(2)).unwrap();
        assert_eq!(s.first_boundary_after(int(0)), 0);
        assert_eq!(s.first_boundary_after(int(2)), 1);
        assert_eq!(s.first_boundary_after(Rational::new(7, 2)), 2);
    }

    #[test]
    fn display_round_trips() {
        let s = Schedule::new(
            2,
            vec![(int(1), bv("11")), (int(2), bv("10"))],
            int(3),
            int(1),
            vec![(int(0), bv("10")), (Rational::new(1, 2), bv("01"))],
        )
        .unwrap();
        let text = alloc::format!("{s}");
        assert_eq!(
            text,
            "sched n=2 prefix[1:{1,2}; 2:{1}] tail anchor=3 period=1 [0:{1}; 1/2:{2}]"
        );
        assert_eq!(text.parse::<Schedule>().unwrap(), s);
    }
}
