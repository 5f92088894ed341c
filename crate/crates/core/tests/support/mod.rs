//! Random instance generators and reference oracles shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use ars_core::{BitVector, GeneratorFunction, Rational, Schedule, Signal};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn bits(width: usize, value: u64) -> BitVector {
    BitVector::from_value(width, value).unwrap()
}

pub fn random_bits<R: Rng>(rng: &mut R, width: usize) -> BitVector {
    bits(width, rng.gen_range(0..1u64 << width))
}

pub fn random_nonzero<R: Rng>(rng: &mut R, width: usize) -> BitVector {
    bits(width, rng.gen_range(1..1u64 << width))
}

/// Distinct sorted times `p/q` with `q ∈ {1, 2, 3, 4}` in `[lo, lo + 8)`.
pub fn random_times<R: Rng>(rng: &mut R, count: usize, lo: Rational) -> Vec<Rational> {
    let mut set = BTreeSet::new();
    while set.len() < count {
        let q = *[1i64, 2, 3, 4].choose(rng).unwrap();
        let p = rng.gen_range(0..8 * q);
        set.insert(lo + Rational::new(p, q));
    }
    set.into_iter().collect()
}

/// A signal with up to `max_switches` value changes.
pub fn random_signal<R: Rng>(rng: &mut R, width: usize, max_switches: usize) -> Signal {
    let initial = random_bits(rng, width);
    let k = rng.gen_range(0..=max_switches);
    let times = random_times(rng, k, Rational::ZERO);
    let raw: Vec<_> = times.into_iter().map(|t| (t, random_bits(rng, width))).collect();
    Signal::canonicalize(initial, raw).unwrap()
}

pub fn random_genfn<R: Rng>(rng: &mut R, n: usize, m: usize) -> GeneratorFunction {
    let table = (0..1u64 << (n + m)).map(|_| random_bits(rng, n)).collect();
    GeneratorFunction::from_table(n, m, table).unwrap()
}

/// A progressive schedule with up to `max_prefix` prefix events.
pub fn random_schedule<R: Rng>(rng: &mut R, n: usize, max_prefix: usize) -> Schedule {
    let k = rng.gen_range(0..=max_prefix);
    let times = random_times(rng, k, Rational::ZERO);
    let prefix: Vec<_> = times.iter().map(|&t| (t, random_nonzero(rng, n))).collect();
    let last = times.last().copied().unwrap_or(Rational::ZERO);
    let anchor = last + Rational::new(rng.gen_range(1..=4), 2);
    let period = *[Rational::ONE, Rational::new(1, 2), Rational::new(3, 2), Rational::integer(2)]
        .choose(rng)
        .unwrap();
    // a few offsets in [0, period), then make sure every coordinate fires
    let slots = rng.gen_range(1..=3usize);
    let mut offsets = BTreeSet::new();
    for _ in 0..slots {
        let q = period.denominator() * 4;
        let p = rng.gen_range(0..period.numerator() * 4);
        offsets.insert(Rational::new(p, q));
    }
    let offsets: Vec<_> = offsets.into_iter().collect();
    let mut fires: Vec<BitVector> = offsets.iter().map(|_| random_nonzero(rng, n)).collect();
    for i in 1..=n {
        if !fires.iter().any(|f| f.get(i)) {
            let slot = rng.gen_range(0..fires.len());
            fires[slot] = fires[slot].with(i, true);
        }
    }
    let pattern = offsets.into_iter().zip(fires).collect();
    Schedule::new(n, prefix, anchor, period, pattern).unwrap()
}

/// Outcome of the reference interpreter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reference {
    Settles(Signal),
    /// States visited once the run has become periodic.
    Oscillates(BTreeSet<BitVector>),
}

fn value_before(u: &Signal, t: Rational) -> BitVector {
    let mut v = u.initial_value();
    for &(s, w) in u.switches() {
        if s < t {
            v = w;
        }
    }
    v
}

/// Applies the evolution equation event by event over an explicit event
/// list long enough to pass any transient: after the input settles the
/// state at tail boundaries is a function of the previous one, so
/// `2^n + 1` periods contain a repeat.
pub fn reference_solve(f: &GeneratorFunction, mu: BitVector, u: &Signal, r: &Schedule) -> Reference {
    let n = f.state_width();
    let settle = u.last_switch_time().unwrap_or(Rational::ZERO);
    let mut start = r.anchor();
    while start <= settle {
        start = start + r.period();
    }
    let periods = (1i64 << (n + 1)) + 2;
    let end = start + r.period().scale(periods);
    let tail_window = start + r.period().scale(periods - (1 << n) - 1);

    let mut events: Vec<(Rational, BitVector)> = r.prefix().to_vec();
    let mut base = r.anchor();
    while base < end {
        for &(offset, fires) in r.pattern() {
            events.push((base + offset, fires));
        }
        base = base + r.period();
    }

    let mut x = mu;
    let mut raw = Vec::new();
    let mut last_change = None;
    let mut late_states = BTreeSet::new();
    for (t, fires) in events {
        if t >= tail_window {
            late_states.insert(x);
        }
        let input = value_before(u, t);
        let mut next = x;
        for i in 1..=n {
            if fires.get(i) {
                let target = f.eval(&x, &input).unwrap();
                next = next.with(i, target.get(i));
            }
        }
        if next != x {
            raw.push((t, next));
            last_change = Some(t);
            x = next;
        }
    }
    if last_change.is_some_and(|t| t >= end - r.period()) {
        return Reference::Oscillates(late_states);
    }
    let mut expected = Vec::new();
    let mut prev = mu;
    for (t, v) in raw {
        if v != prev {
            expected.push((t, v));
            prev = v;
        }
    }
    Reference::Settles(Signal::canonicalize(mu, expected).unwrap())
}

/// Runs the reference interpreter and reports whether `x` comes out.
fn reproduces(f: &GeneratorFunction, x: &Signal, u: &Signal, r: &Schedule) -> bool {
    reference_solve(f, x.initial_value(), u, r) == Reference::Settles(x.clone())
}

/// Decides `x ∈ Σ_Υ^−(u)` by trying every schedule that fires a nonempty
/// set at each switch time of `x` followed by an all-fire tail.
pub fn brute_force_member(f: &GeneratorFunction, x: &Signal, u: &Signal) -> bool {
    let n = f.state_width();
    let times: Vec<Rational> = x.switch_times().collect();
    let last = times
        .last()
        .copied()
        .into_iter()
        .chain(u.last_switch_time())
        .max();
    let anchor = last.map_or(Rational::ZERO, |t| t + Rational::ONE);
    let choices = (1u64 << n) - 1;
    let total = choices.pow(times.len() as u32);
    (0..total).any(|mut code| {
        let prefix = times
            .iter()
            .map(|&t| {
                let fires = bits(n, code % choices + 1);
                code /= choices;
                (t, fires)
            })
            .collect();
        let r = Schedule::new(n, prefix, anchor, Rational::ONE, vec![(Rational::ZERO, BitVector::ones(n).unwrap())])
            .unwrap();
        reproduces(f, x, u, &r)
    })
}
