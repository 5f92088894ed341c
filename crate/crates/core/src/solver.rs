//! The asynchronous evolution equation and membership in `Σ_Υ^−(u)`.
//!
//! At every fire time `t` of the schedule, each fired coordinate `i` takes
//! the value `Υ_i(x(t−0), u(t−0))` and every other coordinate keeps
//! `x_i(t−0)`. Both arguments are left limits: an input switch at the same
//! instant as an update is not seen by that update.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::bits::BitVector;
use crate::error::Error;
use crate::genfn::GeneratorFunction;
use crate::rational::Rational;
use crate::schedule::Schedule;
use crate::signal::Signal;

/// Default event budget for [`solve`].
pub const DEFAULT_MAX_EVENTS: usize = 10_000;

/// A run whose state keeps cycling after the input has settled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OscillationReport {
    /// Start of the first tail period belonging to the cycle.
    pub entry_time: Rational,
    /// States visited over one full cycle, starting at `entry_time`.
    pub cycle: Vec<BitVector>,
}

impl fmt::Display for OscillationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cycle from t={} through", self.entry_time)?;
        for s in &self.cycle {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

fn check_widths(f: &GeneratorFunction, state_width: usize, input_width: usize) -> Result<(), Error> {
    if state_width != f.state_width() {
        return Err(Error::WidthMismatch {
            expected: f.state_width(),
            found: state_width,
        });
    }
    if input_width != f.input_width() {
        return Err(Error::WidthMismatch {
            expected: f.input_width(),
            found: input_width,
        });
    }
    Ok(())
}

/// One update: fired coordinates take `Υ(state, input)`, the rest hold.
fn step(f: &GeneratorFunction, state: &BitVector, input: &BitVector, fires: &BitVector) -> BitVector {
    let target = f.apply(state, input);
    state.and(&fires.complement()).or(&target.and(fires))
}

/// Computes `Υ^{−ρ}(·, μ, u)`.
///
/// The run is declared constant once a whole tail period that starts after
/// the last input switch passes without a state change. If instead a state
/// seen at an earlier such period boundary recurs, the run oscillates forever
/// and the cycle is reported.
pub fn solve(
    f: &GeneratorFunction,
    mu: BitVector,
    u: &Signal,
    schedule: &Schedule,
    max_events: usize,
) -> Result<Signal, Error> {
    check_widths(f, mu.width(), u.width())?;
    if schedule.width() != f.state_width() {
        return Err(Error::WidthMismatch {
            expected: f.state_width(),
            found: schedule.width(),
        });
    }
    if !schedule.is_progressive() {
        return Err(Error::NotProgressive);
    }

    let first_window = u
        .last_switch_time()
        .map_or(0, |t| schedule.first_boundary_after(t));
    let mut events = schedule.events().peekable();
    let mut state = mu;
    let mut switches: Vec<(Rational, BitVector)> = Vec::new();
    let mut processed = 0usize;

    let mut advance = |until: Rational,
                       state: &mut BitVector,
                       switches: &mut Vec<(Rational, BitVector)>,
                       visited: &mut Vec<BitVector>|
     -> Result<(), Error> {
        while let Some(&(t, fires)) = events.peek() {
            if t >= until {
                break;
            }
            events.next();
            processed += 1;
            if processed > max_events {
                return Err(Error::EventBudgetExceeded { max_events });
            }
            let next = step(f, state, &u.left_limit(t), &fires);
            if next != *state {
                *state = next;
                switches.push((t, next));
                visited.push(next);
            }
        }
        Ok(())
    };

    let mut scratch = Vec::new();
    advance(schedule.boundary(first_window), &mut state, &mut switches, &mut scratch)?;

    let mut seen: BTreeMap<BitVector, usize> = BTreeMap::new();
    let mut windows: Vec<Vec<BitVector>> = Vec::new();
    for k in 0u64.. {
        let j = first_window + k;
        if let Some(&first) = seen.get(&state) {
            // each window starts where the previous one ended; the last
            // state is the cycle entry again
            let mut cycle: Vec<BitVector> = windows[first].clone();
            for w in &windows[first + 1..] {
                cycle.extend_from_slice(&w[1..]);
            }
            cycle.pop();
            return Err(Error::NonStabilizing(OscillationReport {
                entry_time: schedule.boundary(first_window + first as u64),
                cycle,
            }));
        }
        seen.insert(state, windows.len());
        let mut visited = alloc::vec![state];
        advance(schedule.boundary(j + 1), &mut state, &mut switches, &mut visited)?;
        if visited.len() == 1 {
            let x = Signal::canonicalize(mu, switches)?;
            debug_assert!(f.apply(&x.final_value(), &u.final_value()) == x.final_value());
            return Ok(x);
        }
        windows.push(visited);
    }
    unreachable!("the window loop only exits by returning")
}

/// Why a trajectory is not in `Σ_Υ^−(u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conflict {
    /// Coordinate `coordinate` switches to `expected` at `time`, but
    /// `Υ_i(x(t−0), u(t−0))` is `actual`.
    Transition {
        time: Rational,
        coordinate: usize,
        expected: bool,
        actual: bool,
    },
    /// `Υ(state, input) ≠ state` for the final values.
    NotFixedPoint { state: BitVector, input: BitVector },
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conflict::Transition {
                time,
                coordinate,
                expected,
                actual,
            } => write!(
                f,
                "at t={time} coordinate {coordinate} switches to {} but the generator gives {}",
                *expected as u8, *actual as u8
            ),
            Conflict::NotFixedPoint { state, input } => {
                write!(f, "final value {state} is not a fixed point under input {input}")
            }
        }
    }
}

/// Outcome of [`membership`]: a witness schedule or the first conflict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipResult {
    witness: Option<Schedule>,
    conflict: Option<Conflict>,
}

impl MembershipResult {
    pub fn is_member(&self) -> bool {
        self.witness.is_some()
    }

    pub fn witness(&self) -> Option<&Schedule> {
        self.witness.as_ref()
    }

    pub fn conflict(&self) -> Option<&Conflict> {
        self.conflict.as_ref()
    }

    fn rejected(conflict: Conflict) -> Self {
        MembershipResult {
            witness: None,
            conflict: Some(conflict),
        }
    }
}

/// Decides whether `x = Υ^{−ρ}(·, x(−∞+0), u)` for some progressive `ρ`.
///
/// `x` is reachable exactly when every coordinate that changes at a switch
/// time takes the value `Υ` prescribes from the left limits there, and the
/// final value is a fixed point under the final input. The witness fires
/// just the changed coordinates at each switch of `x`, then every coordinate
/// once per unit of time after both `x` and `u` have settled.
pub fn membership(f: &GeneratorFunction, x: &Signal, u: &Signal) -> Result<MembershipResult, Error> {
    check_widths(f, x.width(), u.width())?;
    let mut prefix = Vec::with_capacity(x.switches().len());
    for &(t, value) in x.switches() {
        let before = x.left_limit(t);
        let target = f.apply(&before, &u.left_limit(t));
        let changed = before.xor(&value);
        for i in changed.ones_positions() {
            if target.get(i) != value.get(i) {
                return Ok(MembershipResult::rejected(Conflict::Transition {
                    time: t,
                    coordinate: i,
                    expected: value.get(i),
                    actual: target.get(i),
                }));
            }
        }
        prefix.push((t, changed));
    }
    let (state, input) = (x.final_value(), u.final_value());
    if f.apply(&state, &input) != state {
        return Ok(MembershipResult::rejected(Conflict::NotFixedPoint { state, input }));
    }
    let anchor = [x.last_switch_time(), u.last_switch_time()]
        .into_iter()
        .flatten()
        .max()
        .map_or(Rational::ZERO, |t| t + Rational::ONE);
    let ones = BitVector::ones(x.width())?;
    let witness = Schedule::new(
        x.width(),
        prefix,
        anchor,
        Rational::ONE,
        alloc::vec![(Rational::ZERO, ones)],
    )?;
    Ok(MembershipResult {
        witness: Some(witness),
        conflict: None,
    })
}
