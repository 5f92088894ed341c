//! Regularity: whether a generator function generates a system, synthesis of
//! generator functions, and verification of the combinator theorems on
//! explicit instances.
//!
//! Every theorem is checked by replay. A failed check carries [`Evidence`]
//! that can be re-run with [`Evidence::reproduces`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::bits::BitVector;
use crate::error::Error;
use crate::genfn::{GeneratorFunction, ARITY_CAP};
use crate::schedule::Schedule;
use crate::signal::Signal;
use crate::solver::{self, Conflict};
use crate::systems::{
    self, derived_computation, derived_initial, Combination, ComputationFunction, Computations, ExplicitSystem,
    InitialStateFunction, StateSet,
};

/// Why a state of a system is not generated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refutation {
    Conflict(Conflict),
    /// The membership witness did not reproduce the state.
    Replay {
        schedule: Schedule,
        outcome: Result<Signal, Error>,
    },
}

impl fmt::Display for Refutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Refutation::Conflict(c) => write!(f, "{c}"),
            Refutation::Replay { schedule, outcome } => {
                write!(f, "witness {schedule} replays to ")?;
                match outcome {
                    Ok(x) => write!(f, "{x}"),
                    Err(e) => write!(f, "error: {e}"),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub input: Signal,
    pub state: Signal,
    pub refutation: Refutation,
}

/// Result of [`check_generated`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationReport {
    computation: Option<ComputationFunction>,
    counterexample: Option<Counterexample>,
}

impl GenerationReport {
    pub fn generated(&self) -> bool {
        self.computation.is_some()
    }

    /// The computation function built from membership witnesses.
    pub fn computation(&self) -> Option<&ComputationFunction> {
        self.computation.as_ref()
    }

    pub fn into_computation(self) -> Option<ComputationFunction> {
        self.computation
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        self.counterexample.as_ref()
    }
}

/// Errors unless `f` and `generator` have the same state and input widths.
pub fn check_widths(f: &ExplicitSystem, generator: &GeneratorFunction) -> Result<(), Error> {
    if f.state_width() != generator.state_width() {
        return Err(Error::WidthMismatch {
            expected: generator.state_width(),
            found: f.state_width(),
        });
    }
    if f.input_width() != generator.input_width() {
        return Err(Error::WidthMismatch {
            expected: generator.input_width(),
            found: f.input_width(),
        });
    }
    Ok(())
}

/// Membership of one `(u, x)` pair, with the witness replayed.
pub fn witness_for(
    generator: &GeneratorFunction,
    u: &Signal,
    x: &Signal,
    max_events: usize,
) -> Result<Result<Schedule, Refutation>, Error> {
    let result = solver::membership(generator, x, u)?;
    Ok(match (result.witness(), result.conflict()) {
        (Some(witness), _) => {
            let outcome = solver::solve(generator, x.initial_value(), u, witness, max_events);
            if outcome.as_ref() == Ok(x) {
                Ok(witness.clone())
            } else {
                Err(Refutation::Replay {
                    schedule: witness.clone(),
                    outcome,
                })
            }
        }
        (None, Some(conflict)) => Err(Refutation::Conflict(conflict.clone())),
        (None, None) => unreachable!("membership yields a witness or a conflict"),
    })
}

impl GenerationReport {
    /// Assembles a report from per-pair outcomes listed in the order of
    /// [`ExplicitSystem::pairs`]; the first refutation wins.
    pub fn from_outcomes(
        f: &ExplicitSystem,
        outcomes: impl IntoIterator<Item = Result<Result<Schedule, Refutation>, Error>>,
    ) -> Result<GenerationReport, Error> {
        let mut pi = ComputationFunction::new(f.state_width(), f.input_width());
        for ((u, x), outcome) in f.pairs().zip(outcomes) {
            match outcome? {
                Ok(witness) => pi.insert(x.initial_value(), u.clone(), witness)?,
                Err(refutation) => {
                    return Ok(GenerationReport {
                        computation: None,
                        counterexample: Some(Counterexample {
                            input: u.clone(),
                            state: x.clone(),
                            refutation,
                        }),
                    })
                }
            }
        }
        Ok(GenerationReport {
            computation: Some(pi),
            counterexample: None,
        })
    }
}

/// Decides `∀u ∈ U, f(u) ⊂ Σ_Υ^−(u)`. On success the witnesses, grouped by
/// `(x(−∞+0), u)`, form a computation function of `f`; each witness has been
/// replayed through the solver.
pub fn check_generated(
    f: &ExplicitSystem,
    generator: &GeneratorFunction,
    max_events: usize,
) -> Result<GenerationReport, Error> {
    check_widths(f, generator)?;
    GenerationReport::from_outcomes(f, f.pairs().map(|(u, x)| witness_for(generator, u, x, max_events)))
}

/// Builds a generator function for `f` from the constraints every generator
/// must meet: each coordinate changing at a switch time of a state takes
/// `Υ_i(x(t−0), u(t−0))`, and final states are fixed points under final
/// inputs. Unconstrained cells keep the state (`Υ_i(μ, ν) = μ_i`). Returns
/// `None` when two constraints disagree on a cell.
pub fn synthesize_generator(f: &ExplicitSystem) -> Result<Option<GeneratorFunction>, Error> {
    let (n, m) = (f.state_width(), f.input_width());
    if n + m > ARITY_CAP {
        return Err(Error::ArityCapExceeded {
            arity: n + m,
            cap: ARITY_CAP,
        });
    }
    // per cell: (mask of constrained coordinates, required values)
    let mut cells: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    let mut require = |state: &BitVector, input: &BitVector, mask: u64, values: u64| -> bool {
        let index = (state.value() << m) | input.value();
        let cell = cells.entry(index).or_insert((0, 0));
        let overlap = cell.0 & mask;
        if (cell.1 ^ values) & overlap != 0 {
            return false;
        }
        cell.0 |= mask;
        cell.1 |= values & mask;
        true
    };
    for (u, x) in f.pairs() {
        for &(t, value) in x.switches() {
            let before = x.left_limit(t);
            let changed = before.xor(&value);
            if !require(&before, &u.left_limit(t), changed.value(), value.value()) {
                return Ok(None);
            }
        }
        let last = x.final_value();
        if !require(&last, &u.final_value(), BitVector::ones(n)?.value(), last.value()) {
            return Ok(None);
        }
    }
    let table = (0..1u64 << (n + m))
        .map(|index| {
            let hold = index >> m;
            let (mask, values) = cells.get(&index).copied().unwrap_or((0, 0));
            BitVector::from_value(n, (hold & !mask) | (values & mask))
        })
        .collect::<Result<Vec<_>, _>>()?;
    GeneratorFunction::from_table(n, m, table).map(Some)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoremId {
    Subsystem,
    Dual,
    Product,
    Parallel,
    Serial,
    Intersection,
    Union,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::Subsystem,
        TheoremId::Dual,
        TheoremId::Product,
        TheoremId::Parallel,
        TheoremId::Serial,
        TheoremId::Intersection,
        TheoremId::Union,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TheoremId::Subsystem => "subsystem",
            TheoremId::Dual => "dual",
            TheoremId::Product => "product",
            TheoremId::Parallel => "parallel",
            TheoremId::Serial => "serial",
            TheoremId::Intersection => "intersection",
            TheoremId::Union => "union",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for TheoremId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown theorem `{s}`"))
    }
}

/// Concrete data behind a failed check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// A state of the system is not generated by `generator`.
    NotGenerated {
        generator: GeneratorFunction,
        counterexample: Counterexample,
    },
    /// The closed-form initial-state function disagrees with the one read
    /// off the system at `input` (`None` on one side when the input is
    /// missing there).
    InitialMismatch {
        input: Signal,
        formula: Option<BTreeSet<BitVector>>,
        actual: Option<BTreeSet<BitVector>>,
    },
    /// Two sets of `(μ, u)` pairs that should coincide.
    DomainMismatch {
        only_left: Vec<(BitVector, Signal)>,
        only_right: Vec<(BitVector, Signal)>,
    },
    /// Replaying `schedule` leaves the expected state set.
    Replay {
        generator: GeneratorFunction,
        mu: BitVector,
        input: Signal,
        schedule: Schedule,
        outcome: Result<Signal, Error>,
        expected: StateSet,
    },
    /// No schedule in `schedules` reproduces `state`.
    Uncovered {
        generator: GeneratorFunction,
        input: Signal,
        state: Signal,
        schedules: Vec<Schedule>,
    },
    /// No schedule in `candidates` gives the trajectory of `schedule`.
    Unmatched {
        generator: GeneratorFunction,
        mu: BitVector,
        input: Signal,
        schedule: Schedule,
        candidates: Vec<Schedule>,
    },
    /// `state ∈ f(u)` but not in the other system's value at `input`.
    Missing {
        input: Signal,
        state: Signal,
        present: Option<StateSet>,
    },
    /// The combined run differs from the paired runs of the components.
    Decomposition {
        combined: GeneratorFunction,
        mu: BitVector,
        input: Signal,
        schedule: Schedule,
        combined_outcome: Result<Signal, Error>,
        paired_outcome: Result<Signal, Error>,
        components: Vec<(GeneratorFunction, BitVector, Signal, Schedule)>,
    },
}

fn pair_runs(components: &[(GeneratorFunction, BitVector, Signal, Schedule)], max_events: usize) -> Result<Signal, Error> {
    let mut runs = components
        .iter()
        .map(|(g, mu, u, r)| solver::solve(g, *mu, u, r, max_events));
    let first = runs.next().expect("at least one component")?;
    runs.try_fold(first, |acc, next| acc.pair(&next?))
}

impl Evidence {
    /// Re-runs the evidence; `true` when the failure shows up again.
    pub fn reproduces(&self, max_events: usize) -> bool {
        match self {
            Evidence::NotGenerated {
                generator,
                counterexample,
            } => {
                let Counterexample { input, state, .. } = counterexample;
                match solver::membership(generator, state, input) {
                    Ok(result) => match result.witness() {
                        None => true,
                        Some(w) => solver::solve(generator, state.initial_value(), input, w, max_events).as_ref() != Ok(state),
                    },
                    Err(_) => true,
                }
            }
            Evidence::InitialMismatch { formula, actual, .. } => formula != actual,
            Evidence::DomainMismatch { only_left, only_right } => !only_left.is_empty() || !only_right.is_empty(),
            Evidence::Replay {
                generator,
                mu,
                input,
                schedule,
                outcome,
                expected,
            } => {
                let again = solver::solve(generator, *mu, input, schedule, max_events);
                again == *outcome && again.map_or(true, |x| !expected.contains(&x))
            }
            Evidence::Uncovered {
                generator,
                input,
                state,
                schedules,
            } => schedules.iter().all(|r| {
                solver::solve(generator, state.initial_value(), input, r, max_events).as_ref() != Ok(state)
            }),
            Evidence::Unmatched {
                generator,
                mu,
                input,
                schedule,
                candidates,
            } => match solver::solve(generator, *mu, input, schedule, max_events) {
                Ok(x) => candidates
                    .iter()
                    .all(|r| solver::solve(generator, *mu, input, r, max_events).as_ref() != Ok(&x)),
                Err(_) => true,
            },
            Evidence::Missing { state, present, .. } => present.as_ref().is_none_or(|p| !p.contains(state)),
            Evidence::Decomposition {
                combined,
                mu,
                input,
                schedule,
                combined_outcome,
                paired_outcome,
                components,
            } => {
                let lhs = solver::solve(combined, *mu, input, schedule, max_events);
                let rhs = pair_runs(components, max_events);
                lhs == *combined_outcome && rhs == *paired_outcome && lhs != rhs
            }
        }
    }
}

fn write_result(f: &mut fmt::Formatter<'_>, r: &Result<Signal, Error>) -> fmt::Result {
    match r {
        Ok(x) => write!(f, "[{x}]"),
        Err(e) => write!(f, "error ({e})"),
    }
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evidence::NotGenerated { counterexample, .. } => write!(
                f,
                "input [{}] state [{}]: {}",
                counterexample.input, counterexample.state, counterexample.refutation
            ),
            Evidence::InitialMismatch { input, formula, actual } => {
                write!(f, "input [{input}]: formula gives ")?;
                match formula {
                    Some(s) => write!(f, "{s:?}")?,
                    None => f.write_str("nothing")?,
                }
                f.write_str(", system gives ")?;
                match actual {
                    Some(s) => write!(f, "{s:?}"),
                    None => f.write_str("nothing"),
                }
            }
            Evidence::DomainMismatch { only_left, only_right } => {
                write!(f, "{} pair(s) only on the left", only_left.len())?;
                if let Some((mu, u)) = only_left.first() {
                    write!(f, " e.g. ({mu}, [{u}])")?;
                }
                write!(f, ", {} only on the right", only_right.len())?;
                if let Some((mu, u)) = only_right.first() {
                    write!(f, " e.g. ({mu}, [{u}])")?;
                }
                Ok(())
            }
            Evidence::Replay {
                mu,
                input,
                schedule,
                outcome,
                ..
            } => {
                write!(f, "mu={mu} input [{input}] schedule [{schedule}] replays to ")?;
                write_result(f, outcome)?;
                f.write_str(", outside the system's value")
            }
            Evidence::Uncovered {
                input,
                state,
                schedules,
                ..
            } => write!(
                f,
                "state [{state}] under input [{input}] is produced by none of {} schedule(s)",
                schedules.len()
            ),
            Evidence::Unmatched {
                mu,
                input,
                schedule,
                candidates,
                ..
            } => write!(
                f,
                "mu={mu} input [{input}] schedule [{schedule}] has no equal-trajectory partner among {} schedule(s)",
                candidates.len()
            ),
            Evidence::Missing { input, state, .. } => {
                write!(f, "state [{state}] under input [{input}] is absent from the other system")
            }
            Evidence::Decomposition {
                mu,
                input,
                schedule,
                combined_outcome,
                paired_outcome,
                ..
            } => {
                write!(f, "mu={mu} input [{input}] schedule [{schedule}]: combined ")?;
                write_result(f, combined_outcome)?;
                f.write_str(" vs paired ")?;
                write_result(f, paired_outcome)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub claim: String,
    pub passed: bool,
    pub detail: String,
    pub evidence: Option<Evidence>,
}

impl Check {
    fn pass(claim: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            claim: claim.into(),
            passed: true,
            detail: detail.into(),
            evidence: None,
        }
    }

    fn fail(claim: impl Into<String>, detail: impl Into<String>, evidence: Evidence) -> Self {
        Check {
            claim: claim.into(),
            passed: false,
            detail: detail.into(),
            evidence: Some(evidence),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub checks: Vec<Check>,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Every failed check carries evidence that fails again on replay.
    pub fn is_coherent(&self, max_events: usize) -> bool {
        self.checks.iter().all(|c| {
            c.passed || c.evidence.as_ref().is_some_and(|e| e.reproduces(max_events))
        })
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn generation_check(claim: &str, system: &ExplicitSystem, generator: &GeneratorFunction, max_events: usize) -> Result<Check, Error> {
    let report = check_generated(system, generator, max_events)?;
    Ok(match report.counterexample {
        None => Check::pass(claim, format!("{} state(s) checked", system.pairs().count())),
        Some(counterexample) => Check::fail(
            claim,
            "a state has no generating schedule",
            Evidence::NotGenerated {
                generator: generator.clone(),
                counterexample,
            },
        ),
    })
}

fn initial_check(claim: &str, system: &ExplicitSystem, formula: &InitialStateFunction) -> Check {
    let actual = system.initial_state_function();
    let inputs: BTreeSet<&Signal> = actual.0.keys().chain(formula.0.keys()).collect();
    for u in inputs {
        let (a, b) = (formula.get(u), actual.get(u));
        if a != b {
            return Check::fail(
                claim,
                "initial values differ",
                Evidence::InitialMismatch {
                    input: u.clone(),
                    formula: a.cloned(),
                    actual: b.cloned(),
                },
            );
        }
    }
    Check::pass(claim, format!("{} input(s) agree", actual.0.len()))
}

fn domain_check(claim: &str, left: &BTreeSet<(BitVector, Signal)>, right: &BTreeSet<(BitVector, Signal)>) -> Check {
    if left == right {
        return Check::pass(claim, format!("{} pair(s)", left.len()));
    }
    Check::fail(
        claim,
        "the sets differ",
        Evidence::DomainMismatch {
            only_left: left.difference(right).cloned().collect(),
            only_right: right.difference(left).cloned().collect(),
        },
    )
}

/// Checks that `pi` is a computation function of `system` under `generator`:
/// its domain is `W`, every schedule replays into the system and every state
/// is reproduced by some schedule.
fn computation_checks(
    what: &str,
    system: &ExplicitSystem,
    generator: &GeneratorFunction,
    pi: &ComputationFunction,
    max_events: usize,
) -> Vec<Check> {
    let mut checks = Vec::new();
    checks.push(domain_check(
        &format!("{what}: domain equals W"),
        &pi.domain(),
        &system.computation_domain(),
    ));

    let claim = format!("{what}: every schedule replays into the system");
    let mut replays = 0usize;
    let mut failures = 0usize;
    let mut first_failure = None;
    for ((mu, u), rhos) in pi.iter() {
        let expected = system.states(u).cloned().unwrap_or_default();
        for rho in rhos {
            replays += 1;
            let outcome = solver::solve(generator, *mu, u, rho, max_events);
            if outcome.as_ref().map_or(true, |x| !expected.contains(x)) {
                failures += 1;
                first_failure.get_or_insert_with(|| Evidence::Replay {
                    generator: generator.clone(),
                    mu: *mu,
                    input: u.clone(),
                    schedule: rho.clone(),
                    outcome,
                    expected: expected.clone(),
                });
            }
        }
    }
    checks.push(match first_failure {
        None => Check::pass(&claim, format!("{replays} replay(s)")),
        Some(e) => Check::fail(&claim, format!("{failures} of {replays} replay(s) leave the system"), e),
    });

    let claim = format!("{what}: every state is produced by a schedule");
    let mut uncovered = None;
    for (u, x) in system.pairs() {
        let schedules: Vec<Schedule> = pi
            .get(&x.initial_value(), u)
            .map(|s| s.iter().cloned().collect())
            .unwrap_or_default();
        let hit = schedules
            .iter()
            .any(|r| solver::solve(generator, x.initial_value(), u, r, max_events).as_ref() == Ok(x));
        if !hit {
            uncovered = Some(Evidence::Uncovered {
                generator: generator.clone(),
                input: u.clone(),
                state: x.clone(),
                schedules,
            });
            break;
        }
    }
    checks.push(match uncovered {
        None => Check::pass(&claim, format!("{} state(s)", system.pairs().count())),
        Some(e) => Check::fail(&claim, "a state is not reproduced", e),
    });
    checks
}

/// The full set of checks for "`system ⊂ Σ_generator^−` with initial-state
/// function `formula_i` and computation function `formula_pi`".
fn regularity_checks(
    name: &str,
    system: &ExplicitSystem,
    generator: &GeneratorFunction,
    formula_i: &InitialStateFunction,
    formula_pi: &ComputationFunction,
    max_events: usize,
) -> Result<Vec<Check>, Error> {
    let mut checks = alloc::vec![
        generation_check(&format!("{name} is generated by the combined function"), system, generator, max_events)?,
        initial_check(&format!("{name}: initial-state function matches the closed form"), system, formula_i),
    ];
    checks.extend(computation_checks(
        &format!("{name}: closed-form computation function"),
        system,
        generator,
        formula_pi,
        max_events,
    ));
    Ok(checks)
}

fn operand_checks(
    name: &str,
    system: &ExplicitSystem,
    generator: &GeneratorFunction,
    pi: &ComputationFunction,
    max_events: usize,
) -> Result<Vec<Check>, Error> {
    let mut checks = alloc::vec![generation_check(
        &format!("premise: {name} is generated"),
        system,
        generator,
        max_events
    )?];
    checks.extend(computation_checks(
        &format!("premise: computation function of {name}"),
        system,
        generator,
        pi,
        max_events,
    ));
    Ok(checks)
}

/// `f ⊂ g` iff `U ⊂ V`, `i_f ⊂ i_g` pointwise, and every schedule of `π_f`
/// has an equal-trajectory partner in `π_g`.
pub fn verify_subsystem_theorem(
    f: &ExplicitSystem,
    g: &ExplicitSystem,
    generator: &GeneratorFunction,
    pi_f: &ComputationFunction,
    pi_g: &ComputationFunction,
    max_events: usize,
) -> Result<TheoremReport, Error> {
    let mut checks = operand_checks("f", f, generator, pi_f, max_events)?;
    checks.extend(operand_checks("g", g, generator, pi_g, max_events)?);

    let a = systems::is_subsystem(f, g)?;
    let a_evidence = f
        .pairs()
        .find(|(u, x)| !g.states(u).is_some_and(|ys| ys.contains(*x)))
        .map(|(u, x)| Evidence::Missing {
            input: u.clone(),
            state: x.clone(),
            present: g.states(u).cloned(),
        });

    // statement b), with the first reason it fails
    let (i_f, i_g) = (f.initial_state_function(), g.initial_state_function());
    let mut b_evidence: Option<Evidence> = None;
    'outer: for (u, mus) in i_f.iter() {
        let Some(nus) = i_g.get(u) else {
            b_evidence = Some(Evidence::InitialMismatch {
                input: u.clone(),
                formula: Some(mus.clone()),
                actual: None,
            });
            break;
        };
        if !mus.is_subset(nus) {
            b_evidence = Some(Evidence::InitialMismatch {
                input: u.clone(),
                formula: Some(mus.clone()),
                actual: Some(nus.clone()),
            });
            break;
        }
        for mu in mus {
            let candidates: Vec<Schedule> = pi_g.get(mu, u).map(|s| s.iter().cloned().collect()).unwrap_or_default();
            let reachable = candidates
                .iter()
                .map(|r| solver::solve(generator, *mu, u, r, max_events))
                .collect::<Result<BTreeSet<_>, _>>()?;
            for rho in pi_f.get(mu, u).into_iter().flatten() {
                let x = solver::solve(generator, *mu, u, rho, max_events)?;
                if !reachable.contains(&x) {
                    b_evidence = Some(Evidence::Unmatched {
                        generator: generator.clone(),
                        mu: *mu,
                        input: u.clone(),
                        schedule: rho.clone(),
                        candidates,
                    });
                    break 'outer;
                }
            }
        }
    }
    let b = b_evidence.is_none();
    let summary = format!("a) f ⊂ g is {a}; b) is {b}");

    checks.push(match (a, b) {
        (true, false) => Check::fail("a) implies b)", summary.clone(), b_evidence.expect("b fails")),
        _ => Check::pass("a) implies b)", summary.clone()),
    });
    checks.push(match (a, b) {
        (false, true) => Check::fail("b) implies a)", summary, a_evidence.expect("a fails")),
        _ => Check::pass("b) implies a)", summary),
    });
    Ok(TheoremReport {
        theorem: TheoremId::Subsystem,
        checks,
    })
}

/// `f* ⊂ Σ_{Υ*}^−` with initial-state function `i_{f*}` and computation
/// function `π_{f*}(μ, u) = π_f(μ̄, ū)`.
pub fn verify_dual_theorem(
    f: &ExplicitSystem,
    generator: &GeneratorFunction,
    pi_f: &ComputationFunction,
    max_events: usize,
) -> Result<TheoremReport, Error> {
    let mut checks = operand_checks("f", f, generator, pi_f, max_events)?;
    let dual = systems::dual_system(f);
    let formula_i = derived_initial(&Combination::Dual(f))?;
    let formula_pi = derived_computation(&Computations::Dual { pi_f })?;
    checks.extend(regularity_checks("f*", &dual, &generator.dual(), &formula_i, &formula_pi, max_events)?);
    Ok(TheoremReport {
        theorem: TheoremId::Dual,
        checks,
    })
}

fn decomposition_check(
    claim: &str,
    combined: &GeneratorFunction,
    cases: impl Iterator<Item = [(GeneratorFunction, BitVector, Signal, Schedule); 2]>,
    input_of: impl Fn(&Signal, &Signal) -> Result<Signal, Error>,
    max_events: usize,
) -> Result<Check, Error> {
    let mut count = 0usize;
    for components in cases {
        count += 1;
        let [(_, mu, u, r), (_, nu, v, s)] = &components;
        let mu_pair = mu.concat(nu)?;
        let input = input_of(u, v)?;
        let schedule = r.pair(s)?;
        let combined_outcome = solver::solve(combined, mu_pair, &input, &schedule, max_events);
        let paired_outcome = pair_runs(&components, max_events);
        if combined_outcome != paired_outcome {
            return Ok(Check::fail(
                claim,
                format!("mismatch at case {count}"),
                Evidence::Decomposition {
                    combined: combined.clone(),
                    mu: mu_pair,
                    input,
                    schedule,
                    combined_outcome,
                    paired_outcome,
                    components: components.into(),
                },
            ));
        }
    }
    Ok(Check::pass(claim, format!("{count} case(s)")))
}

/// `f × f′ ⊂ Σ_{Υ×Υ′}^−` with the paired initial-state and computation
/// functions.
pub fn verify_product_theorem(
    f: &ExplicitSystem,
    g: &ExplicitSystem,
    generator_f: &GeneratorFunction,
    generator_g: &GeneratorFunction,
    pi_f: &ComputationFunction,
    pi_g: &ComputationFunction,
    max_events: usize,
) -> Result<TheoremReport, Error> {
    let mut checks = operand_checks("f", f, generator_f, pi_f, max_events)?;
    checks.extend(operand_checks("f′", g, generator_g, pi_g, max_events)?);
    let combined = generator_f.product(generator_g)?;
    let product = systems::cartesian_product(f, g)?;
    let formula_i = derived_initial(&Combination::Product(f, g))?;
    let formula_pi = derived_computation(&Computations::Product { pi_f, pi_g })?;
    checks.extend(regularity_checks("f × f′", &product, &combined, &formula_i, &formula_pi, max_events)?);

    let mut cases = Vec::new();
    for ((mu, u), rhos) in pi_f.iter() {
        for ((nu, v), sigmas) in pi_g.iter() {
            for r in rhos {
                for s in sigmas {
                    cases.push([
                        (generator_f.clone(), *mu, u.clone(), r.clone()),
                        (generator_g.clone(), *nu, v.clone(), s.clone()),
                    ]);
                }
            }
        }
    }
    checks.push(decomposition_check(
        "solving the product equals pairing the solutions",
        &combined,
        cases.into_iter(),
        |u, v| u.pair(v),
        max_events,
    )?);
    Ok(TheoremReport {
        theorem: TheoremId::Product,
        checks,
    })
}

/// `f || f₁′ ⊂ Σ_{Υ||Υ₁′}^−` under a shared input; an empty common domain is
/// a definedness error.
pub fn verify_parallel_theorem(
    f: &ExplicitSystem,
    g: &ExplicitSystem,
    generator_f: &GeneratorFunction,
    generator_g: &GeneratorFunction,
    pi_f: &ComputationFunction,
    pi_g: &ComputationFunction,
    max_events: usize,
) -> Result<TheoremReport, Error> {
    let parallel = systems::parallel_connection(f, g)?;
    let mut checks = operand_checks("f", f, generator_f, pi_f, max_events)?;
    checks.extend(operand_checks("f₁′", g, generator_g, pi_g, max_events)?);
    let combined = generator_f.parallel(generator_g)?;
    let formula_i = derived_initial(&Combination::Parallel(f, g))?;
    let formula_pi = derived_computation(&Computations::Parallel { pi_f, pi_g })?;
    checks.extend(regularity_checks("f || f₁′", &parallel, &combined, &formula_i, &formula_pi, max_events)?);

    let mut cases = Vec::new();
    for ((mu, u), rhos) in pi_f.iter() {
        for ((nu, v), sigmas) in pi_g.iter() {
            if u != v {
                continue;
            }
            for r in rhos {
                for s in sigmas {
                    cases.push([
                        (generator_f.clone(), *mu, u.clone(), r.clone()),
                        (generator_g.clone(), *nu, v.clone(), s.clone()),
                    ]);
                }
            }
        }
    }
    checks.push(decomposition_check(
        "solving the parallel connection equals pairing the solutions",
        &combined,
        cases.into_iter(),
        |u, _| Ok(u.clone()),
        max_events,
    )?);
    Ok(TheoremReport {
        theorem: TheoremId::Parallel,
        checks,
    })
}

/// `h ∗ f ⊂ Σ_{ϑ∗Υ}^−` with initial-state function `i_{h∗f}` and computation
/// function `π_{h∗f}`. Failures are findings about the instance and carry
/// the concrete `(u, μ, λ, ρ, ϖ)` in their evidence.
pub fn verify_serial_theorem(
    f: &ExplicitSystem,
    h: &ExplicitSystem,
    generator_f: &GeneratorFunction,
    generator_h: &GeneratorFunction,
    pi_f: &ComputationFunction,
    pi_h: &ComputationFunction,
    max_events: usize,
) -> Result<TheoremReport, Error> {
    let star = systems::serial_star_system(h, f)?;
    let mut checks = operand_checks("f", f, generator_f, pi_f, max_events)?;
    checks.extend(operand_checks("h", h, generator_h, pi_h, max_events)?);
    let combined = generator_h.serial_star(generator_f)?;
    let formula_i = derived_initial(&Combination::SerialStar { h, f })?;
    let formula_pi = derived_computation(&Computations::SerialStar { f, h, pi_f, pi_h })?;
    checks.extend(regularity_checks("h ∗ f", &star, &combined, &formula_i, &formula_pi, max_events)?);
    Ok(TheoremReport {
        theorem: TheoremId::Serial,
        checks,
    })
}

fn symmetry_checks(
    generator: &GeneratorFunction,
    fg: &ComputationFunction,
    gf: &ComputationFunction,
    max_events: usize,
) -> Result<Vec<Check>, Error> {
    let mut checks = alloc::vec![domain_check("symmetry: W of f ∩ g equals W of g ∩ f", &fg.domain(), &gf.domain())];
    for (claim, left, right) in [
        ("symmetry: every schedule of f ∩ g has a partner in g ∩ f", fg, gf),
        ("symmetry: every schedule of g ∩ f has a partner in f ∩ g", gf, fg),
    ] {
        let mut evidence = None;
        let mut count = 0usize;
        'outer: for ((mu, u), rhos) in left.iter() {
            let candidates: Vec<Schedule> = right.get(mu, u).map(|s| s.iter().cloned().collect()).unwrap_or_default();
            let reachable = candidates
                .iter()
                .map(|r| solver::solve(generator, *mu, u, r, max_events))
                .collect::<Result<BTreeSet<_>, _>>()?;
            for rho in rhos {
                count += 1;
                if !reachable.contains(&solver::solve(generator, *mu, u, rho, max_events)?) {
                    evidence = Some(Evidence::Unmatched {
                        generator: generator.clone(),
                        mu: *mu,
                        input: u.clone(),
                        schedule: rho.clone(),
                        candidates,
                    });
                    break 'outer;
                }
            }
        }
        checks.push(match evidence {
            None => Check::pass(claim, format!("{count} schedule(s)")),
            Some(e) => Check::fail(claim, "a schedule has no partner", e),
        });
    }
    Ok(checks)
}

/// `f ∩ g ⊂ Σ_Υ^−` with initial-state function `i_f ∩ i_g` and the filtered
/// computation function; also checks the symmetry between `f ∩ g` and
/// `g ∩ f`.
pub fn verify_intersection_theorem(
    f: &ExplicitSystem,
    g: &ExplicitSystem,
    generator: &GeneratorFunction,
    pi_f: &ComputationFunction,
    pi_g: &ComputationFunction,
    max_events: usize,
) -> Result<TheoremReport, Error> {
    let common = systems::intersection(f, g)?;
    let mut checks = operand_checks("f", f, generator, pi_f, max_events)?;
    checks.extend(operand_checks("g", g, generator, pi_g, max_events)?);
    let formula_i = derived_initial(&Combination::Intersection(f, g))?;
    let filtered = |f, g, pi_f, pi_g| {
        derived_computation(&Computations::Intersection {
            f,
            g,
            pi_f,
            pi_g,
            generator,
            max_events,
        })
    };
    let fg = filtered(f, g, pi_f, pi_g)?;
    let gf = filtered(g, f, pi_g, pi_f)?;
    let mut body = regularity_checks("f ∩ g", &common, generator, &formula_i, &fg, max_events)?;
    let realized = common.initial_state_function();
    if let Some(c) = body.get_mut(1) {
        let extra: usize = formula_i
            .iter()
            .map(|(u, mus)| mus.len() - realized.get(u).map_or(0, |r| mus.intersection(r).count()))
            .sum();
        c.detail = format!("{}; {extra} formula value(s) not realized by any common state", c.detail);
    }
    checks.extend(body);
    checks.extend(symmetry_checks(generator, &fg, &gf, max_events)?);
    Ok(TheoremReport {
        theorem: TheoremId::Intersection,
        checks,
    })
}

/// `f ∪ g ⊂ Σ_Υ^−` with the three-case initial-state and computation
/// functions; also checks `W_{f∪g} = W_f ∪ W_g`.
pub fn verify_union_theorem(
    f: &ExplicitSystem,
    g: &ExplicitSystem,
    generator: &GeneratorFunction,
    pi_f: &ComputationFunction,
    pi_g: &ComputationFunction,
    max_events: usize,
) -> Result<TheoremReport, Error> {
    let joined = systems::union(f, g)?;
    let mut checks = operand_checks("f", f, generator, pi_f, max_events)?;
    checks.extend(operand_checks("g", g, generator, pi_g, max_events)?);
    let mut w = f.computation_domain();
    w.extend(g.computation_domain());
    checks.push(domain_check("lemma: W of f ∪ g equals W_f ∪ W_g", &joined.computation_domain(), &w));
    let formula_i = derived_initial(&Combination::Union(f, g))?;
    let formula_pi = derived_computation(&Computations::Union { pi_f, pi_g })?;
    checks.extend(regularity_checks("f ∪ g", &joined, generator, &formula_i, &formula_pi, max_events)?);
    Ok(TheoremReport {
        theorem: TheoremId::Union,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::DEFAULT_MAX_EVENTS;
    use crate::Rational;

    fn sig(text: &str) -> Signal {
        text.parse().unwrap()
    }

    fn genfn(text: &str) -> GeneratorFunction {
        text.parse().unwrap()
    }

    fn system(pairs: &[(&str, &[&str])]) -> ExplicitSystem {
        ExplicitSystem::from_pairs(
            pairs
                .iter()
                .flat_map(|(u, xs)| xs.iter().map(move |x| (sig(u), sig(x)))),
        )
        .unwrap()
    }

    fn pi(f: &ExplicitSystem, g: &GeneratorFunction) -> ComputationFunction {
        check_generated(f, g, DEFAULT_MAX_EVENTS)
            .unwrap()
            .into_computation()
            .expect("generated")
    }

    #[test]
    fn generated_by_construction() {
        let copy = genfn("n=1 m=1 ; x1' = u1");
        let u = sig("init 0 ; 1:1");
        let r = Schedule::all_fire(1, Rational::new(3, 2)).unwrap();
        let x = solver::solve(&copy, "0".parse().unwrap(), &u, &r, 100).unwrap();
        let f = ExplicitSystem::from_pairs([(u.clone(), x)]).unwrap();
        let report = check_generated(&f, &copy, 100).unwrap();
        assert!(report.generated());
        assert_eq!(report.computation().unwrap().len(), 1);
    }

    #[test]
    fn inconsistent_switch_is_a_counterexample() {
        let copy = genfn("n=1 m=1 ; x1' = u1");
        let f = system(&[("init 0", &["init 0 ; 1:1 ; 2:0"])]);
        let report = check_generated(&f, &copy, 100).unwrap();
        let ce = report.counterexample().unwrap();
        assert!(matches!(
            ce.refutation,
            Refutation::Conflict(Conflict::Transition { coordinate: 1, .. })
        ));
        let g = system(&[("init 1", &["init 0"])]);
        let ce = check_generated(&g, &copy, 100).unwrap();
        assert!(matches!(
            ce.counterexample().unwrap().refutation,
            Refutation::Conflict(Conflict::NotFixedPoint { .. })
        ));
    }

    #[test]
    fn synthesis_fills_with_identity() {
        let f = system(&[("init 0", &["init 0"])]);
        let g = synthesize_generator(&f).unwrap().unwrap();
        assert_eq!(g, GeneratorFunction::identity(1, 1).unwrap());
        assert!(check_generated(&f, &g, 100).unwrap().generated());
    }

    #[test]
    fn synthesis_detects_contradictions() {
        // one state demands Υ(0,0)=1 at a switch, another that 0 is fixed under 0
        let f = system(&[("init 0", &["init 0 ; 1:1", "init 0"])]);
        assert_eq!(synthesize_generator(&f).unwrap(), None);
    }

    #[test]
    fn subsystem_theorem_is_coherent() {
        let copy = genfn("n=1 m=1 ; x1' = u1");
        let g = system(&[("init 0 ; 1:1", &["init 0 ; 2:1", "init 0 ; 3:1"]), ("init 1", &["init 1"])]);
        let pg = pi(&g, &copy);
        let report = verify_subsystem_theorem(&g, &g, &copy, &pg, &pg, 100).unwrap();
        assert!(report.holds(), "{report:?}");
        let f = system(&[("init 0 ; 1:1", &["init 0 ; 5:1"])]);
        let pf = pi(&f, &copy);
        let report = verify_subsystem_theorem(&f, &g, &copy, &pf, &pg, 100).unwrap();
        assert!(report.holds());
        assert!(report.checks.iter().any(|c| c.detail.contains("a) f ⊂ g is false; b) is false")));
    }

    #[test]
    fn dual_theorem_on_and_gate() {
        let and = genfn("n=1 m=2 ; x1' = u1 & u2");
        let u = sig("init 00 ; 1:11 ; 4:01");
        let x = sig("init 0 ; 2:1 ; 5:0");
        let f = ExplicitSystem::from_pairs([(u, x)]).unwrap();
        let report = verify_dual_theorem(&f, &and, &pi(&f, &and), 100).unwrap();
        assert!(report.holds(), "{report:?}");
    }

    #[test]
    fn serial_theorem_finding_is_replayable() {
        // y follows x, x follows u; y switching while x is still excited
        // is not reachable under the combined function
        let follow = genfn("n=1 m=1 ; x1' = u1");
        let u = sig("init 1 ; 5:0");
        let f = system(&[("init 1 ; 5:0", &["init 0 ; 1:1 ; 6:0"])]);
        let h = system(&[
            ("init 0 ; 1:1 ; 6:0", &["init 0 ; 3/2:1 ; 7:0", "init 0 ; 11/2:1 ; 7:0"]),
        ]);
        let _ = u;
        let report = verify_serial_theorem(&f, &h, &follow, &follow, &pi(&f, &follow), &pi(&h, &follow), 1000).unwrap();
        assert!(!report.holds());
        assert!(report.is_coherent(1000));
        for c in report.failures() {
            assert!(c.claim.contains("h ∗ f"), "{}", c.claim);
        }
    }

    #[test]
    fn union_and_intersection_hold_on_overlap() {
        let copy = genfn("n=1 m=1 ; x1' = u1");
        let f = system(&[("init 0 ; 1:1", &["init 0 ; 2:1", "init 0 ; 3:1"])]);
        let g = system(&[("init 0 ; 1:1", &["init 0 ; 3:1"]), ("init 1", &["init 1"])]);
        let (pf, pg) = (pi(&f, &copy), pi(&g, &copy));
        let union = verify_union_theorem(&f, &g, &copy, &pf, &pg, 100).unwrap();
        assert!(union.holds(), "{union:?}");
        let inter = verify_intersection_theorem(&f, &g, &copy, &pf, &pg, 100).unwrap();
        assert!(inter.holds(), "{inter:?}");
    }

    #[test]
    fn parallel_needs_common_input() {
        let copy = genfn("n=1 m=1 ; x1' = u1");
        let f = system(&[("init 0", &["init 0"])]);
        let g = system(&[("init 1", &["init 1"])]);
        let err = verify_parallel_theorem(&f, &g, &copy, &copy, &pi(&f, &copy), &pi(&g, &copy), 100);
        assert_eq!(err, Err(Error::EmptyCommonInput));
    }
}
