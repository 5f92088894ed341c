//! Explicit finite asynchronous systems and their combinators.
//!
//! A system maps each admissible input signal to a nonempty set of possible
//! state signals. Domains and value sets are ordered sets of canonical
//! signals, so membership and equality are structural.
//!
//! The initial-state and computation functions of a combined system can be
//! obtained two ways: recomputed from the combined system itself, or
//! assembled from the operands' functions by [`derived_initial`] and
//! [`derived_computation`]. The two are kept apart so they can be compared.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::bits::BitVector;
use crate::error::Error;
use crate::genfn::GeneratorFunction;
use crate::schedule::Schedule;
use crate::signal::Signal;
use crate::solver;

pub type StateSet = BTreeSet<Signal>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitSystem {
    input_width: usize,
    state_width: usize,
    entries: BTreeMap<Signal, StateSet>,
}

fn same_width(expected: usize, found: usize) -> Result<(), Error> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::WidthMismatch { expected, found })
    }
}

impl ExplicitSystem {
    pub fn new(input_width: usize, state_width: usize, entries: BTreeMap<Signal, StateSet>) -> Result<Self, Error> {
        if entries.is_empty() {
            return Err(Error::EmptySystem);
        }
        for (u, states) in &entries {
            same_width(input_width, u.width())?;
            if states.is_empty() {
                return Err(Error::EmptyStateSet);
            }
            for x in states {
                same_width(state_width, x.width())?;
            }
        }
        Ok(ExplicitSystem {
            input_width,
            state_width,
            entries,
        })
    }

    /// Collects `(input, state)` pairs; widths are taken from the first pair.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Signal, Signal)>) -> Result<Self, Error> {
        let mut entries: BTreeMap<Signal, StateSet> = BTreeMap::new();
        for (u, x) in pairs {
            entries.entry(u).or_default().insert(x);
        }
        let (m, n) = match entries.iter().next() {
            Some((u, xs)) => (u.width(), xs.iter().next().map_or(0, Signal::width)),
            None => return Err(Error::EmptySystem),
        };
        Self::new(m, n, entries)
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn state_width(&self) -> usize {
        self.state_width
    }

    pub fn entries(&self) -> &BTreeMap<Signal, StateSet> {
        &self.entries
    }

    pub fn domain(&self) -> impl Iterator<Item = &Signal> {
        self.entries.keys()
    }

    pub fn contains_input(&self, u: &Signal) -> bool {
        self.entries.contains_key(u)
    }

    pub fn states(&self, u: &Signal) -> Option<&StateSet> {
        self.entries.get(u)
    }

    /// `(u, x)` for every input `u` and state `x ∈ f(u)`.
    pub fn pairs(&self) -> impl Iterator<Item = (&Signal, &Signal)> {
        self.entries.iter().flat_map(|(u, xs)| xs.iter().map(move |x| (u, x)))
    }

    /// `⋃_u f(u)`.
    pub fn all_states(&self) -> StateSet {
        self.entries.values().flatten().cloned().collect()
    }

    /// `i_f(u) = {x(−∞+0) | x ∈ f(u)}`.
    pub fn initial_state_function(&self) -> InitialStateFunction {
        InitialStateFunction(
            self.entries
                .iter()
                .map(|(u, xs)| (u.clone(), xs.iter().map(Signal::initial_value).collect()))
                .collect(),
        )
    }

    /// `W_f = {(x(−∞+0), u) | u ∈ U, x ∈ f(u)}`.
    pub fn computation_domain(&self) -> BTreeSet<(BitVector, Signal)> {
        self.pairs().map(|(u, x)| (x.initial_value(), u.clone())).collect()
    }
}

/// `i_f`: input to the nonempty set of initial values of its states.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct InitialStateFunction(pub BTreeMap<Signal, BTreeSet<BitVector>>);

impl InitialStateFunction {
    pub fn get(&self, u: &Signal) -> Option<&BTreeSet<BitVector>> {
        self.0.get(u)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Signal, &BTreeSet<BitVector>)> {
        self.0.iter()
    }
}

/// `π_f`: `(μ, u) ∈ W_f` to a nonempty set of progressive schedules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComputationFunction {
    state_width: usize,
    input_width: usize,
    map: BTreeMap<(BitVector, Signal), BTreeSet<Schedule>>,
}

impl ComputationFunction {
    pub fn new(state_width: usize, input_width: usize) -> Self {
        ComputationFunction {
            state_width,
            input_width,
            map: BTreeMap::new(),
        }
    }

    pub fn state_width(&self) -> usize {
        self.state_width
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn insert(&mut self, mu: BitVector, u: Signal, schedule: Schedule) -> Result<(), Error> {
        same_width(self.state_width, mu.width())?;
        same_width(self.input_width, u.width())?;
        same_width(self.state_width, schedule.width())?;
        if !schedule.is_progressive() {
            return Err(Error::NotProgressive);
        }
        self.map.entry((mu, u)).or_default().insert(schedule);
        Ok(())
    }

    pub fn get(&self, mu: &BitVector, u: &Signal) -> Option<&BTreeSet<Schedule>> {
        self.map.get(&(*mu, u.clone()))
    }

    pub fn domain(&self) -> BTreeSet<(BitVector, Signal)> {
        self.map.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(BitVector, Signal), &BTreeSet<Schedule>)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn lookup(&self, mu: &BitVector, u: &Signal) -> Result<&BTreeSet<Schedule>, Error> {
        self.get(mu, u).ok_or_else(|| Error::MissingComputation {
            mu: mu.to_string(),
            input: u.to_string(),
        })
    }
}

/// `f ⊂ g`: `U ⊂ V` and `f(u) ⊂ g(u)` on `U`.
pub fn is_subsystem(f: &ExplicitSystem, g: &ExplicitSystem) -> Result<bool, Error> {
    same_width(g.input_width, f.input_width)?;
    same_width(g.state_width, f.state_width)?;
    Ok(f.entries
        .iter()
        .all(|(u, xs)| g.states(u).is_some_and(|ys| xs.is_subset(ys))))
}

/// `f*(ū) = {x̄ | x ∈ f(u)}` on `U* = {ū | u ∈ U}`.
pub fn dual_system(f: &ExplicitSystem) -> ExplicitSystem {
    ExplicitSystem {
        input_width: f.input_width,
        state_width: f.state_width,
        entries: f
            .entries
            .iter()
            .map(|(u, xs)| (u.complement(), xs.iter().map(Signal::complement).collect()))
            .collect(),
    }
}

fn pair_sets(left: &StateSet, right: &StateSet) -> Result<StateSet, Error> {
    let mut out = StateSet::new();
    for x in left {
        for y in right {
            out.insert(x.pair(y)?);
        }
    }
    Ok(out)
}

/// `(f × f′)(u, u′) = f(u) × f′(u′)` on `U × U′`.
pub fn cartesian_product(f: &ExplicitSystem, g: &ExplicitSystem) -> Result<ExplicitSystem, Error> {
    let mut entries = BTreeMap::new();
    for (u, xs) in &f.entries {
        for (v, ys) in &g.entries {
            entries.insert(u.pair(v)?, pair_sets(xs, ys)?);
        }
    }
    ExplicitSystem::new(f.input_width + g.input_width, f.state_width + g.state_width, entries)
}

/// `(f || f₁′)(u) = f(u) × f₁′(u)` on `U ∩ U₁′`.
pub fn parallel_connection(f: &ExplicitSystem, g: &ExplicitSystem) -> Result<ExplicitSystem, Error> {
    if f.input_width != g.input_width {
        return Err(Error::InputWidthMismatch {
            left: f.input_width,
            right: g.input_width,
        });
    }
    let mut entries = BTreeMap::new();
    for (u, xs) in &f.entries {
        if let Some(ys) = g.states(u) {
            entries.insert(u.clone(), pair_sets(xs, ys)?);
        }
    }
    if entries.is_empty() {
        return Err(Error::EmptyCommonInput);
    }
    ExplicitSystem::new(f.input_width, f.state_width + g.state_width, entries)
}

fn check_composable(h: &ExplicitSystem, f: &ExplicitSystem) -> Result<(), Error> {
    same_width(h.input_width, f.state_width)?;
    let missing: Vec<Signal> = f
        .all_states()
        .into_iter()
        .filter(|x| !h.contains_input(x))
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::Composability { missing })
    }
}

/// `(h ∘ f)(u) = ⋃_{x ∈ f(u)} h(x)`.
pub fn serial_compose(h: &ExplicitSystem, f: &ExplicitSystem) -> Result<ExplicitSystem, Error> {
    check_composable(h, f)?;
    let entries = f
        .entries
        .iter()
        .map(|(u, xs)| {
            let ys = xs.iter().flat_map(|x| h.entries[x].iter().cloned()).collect();
            (u.clone(), ys)
        })
        .collect();
    ExplicitSystem::new(f.input_width, h.state_width, entries)
}

/// `(h ∗ f)(u) = {(x, y) | x ∈ f(u), y ∈ h(x)}`: serial connection keeping
/// the intermediate signal.
pub fn serial_star_system(h: &ExplicitSystem, f: &ExplicitSystem) -> Result<ExplicitSystem, Error> {
    check_composable(h, f)?;
    let mut entries = BTreeMap::new();
    for (u, xs) in &f.entries {
        let mut zs = StateSet::new();
        for x in xs {
            for y in &h.entries[x] {
                zs.insert(x.pair(y)?);
            }
        }
        entries.insert(u.clone(), zs);
    }
    ExplicitSystem::new(f.input_width, f.state_width + h.state_width, entries)
}

/// `(f ∩ g)(u) = f(u) ∩ g(u)` on `W = {u ∈ U ∩ V | f(u) ∩ g(u) ≠ ∅}`.
pub fn intersection(f: &ExplicitSystem, g: &ExplicitSystem) -> Result<ExplicitSystem, Error> {
    same_width(f.input_width, g.input_width)?;
    same_width(f.state_width, g.state_width)?;
    let mut entries = BTreeMap::new();
    for (u, xs) in &f.entries {
        if let Some(ys) = g.states(u) {
            let common: StateSet = xs.intersection(ys).cloned().collect();
            if !common.is_empty() {
                entries.insert(u.clone(), common);
            }
        }
    }
    if entries.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    ExplicitSystem::new(f.input_width, f.state_width, entries)
}

/// `f(u)` on `U ∖ V`, `g(u)` on `V ∖ U`, `f(u) ∪ g(u)` on `U ∩ V`.
pub fn union(f: &ExplicitSystem, g: &ExplicitSystem) -> Result<ExplicitSystem, Error> {
    same_width(f.input_width, g.input_width)?;
    same_width(f.state_width, g.state_width)?;
    let mut entries = f.entries.clone();
    for (u, ys) in &g.entries {
        entries.entry(u.clone()).or_default().extend(ys.iter().cloned());
    }
    ExplicitSystem::new(f.input_width, f.state_width, entries)
}

/// Operands of a combinator.
#[derive(Clone, Copy, Debug)]
pub enum Combination<'a> {
    Dual(&'a ExplicitSystem),
    Product(&'a ExplicitSystem, &'a ExplicitSystem),
    Parallel(&'a ExplicitSystem, &'a ExplicitSystem),
    /// `h ∗ f`.
    SerialStar {
        h: &'a ExplicitSystem,
        f: &'a ExplicitSystem,
    },
    Intersection(&'a ExplicitSystem, &'a ExplicitSystem),
    Union(&'a ExplicitSystem, &'a ExplicitSystem),
}

impl Combination<'_> {
    /// The combined system itself.
    pub fn system(&self) -> Result<ExplicitSystem, Error> {
        match *self {
            Combination::Dual(f) => Ok(dual_system(f)),
            Combination::Product(f, g) => cartesian_product(f, g),
            Combination::Parallel(f, g) => parallel_connection(f, g),
            Combination::SerialStar { h, f } => serial_star_system(h, f),
            Combination::Intersection(f, g) => intersection(f, g),
            Combination::Union(f, g) => union(f, g),
        }
    }
}

fn product_of(left: &BTreeSet<BitVector>, right: &BTreeSet<BitVector>) -> Result<BTreeSet<BitVector>, Error> {
    let mut out = BTreeSet::new();
    for a in left {
        for b in right {
            out.insert(a.concat(b)?);
        }
    }
    Ok(out)
}

/// The initial-state function of a combined system, assembled from the
/// operands' initial-state functions by the closed-form rule for each
/// combinator rather than read off the combined system.
pub fn derived_initial(combination: &Combination<'_>) -> Result<InitialStateFunction, Error> {
    let mut out = BTreeMap::new();
    match *combination {
        Combination::Dual(f) => {
            for (u, mus) in f.initial_state_function().iter() {
                out.insert(u.complement(), mus.iter().map(BitVector::complement).collect());
            }
        }
        Combination::Product(f, g) => {
            let (i_f, i_g) = (f.initial_state_function(), g.initial_state_function());
            for (u, a) in i_f.iter() {
                for (v, b) in i_g.iter() {
                    out.insert(u.pair(v)?, product_of(a, b)?);
                }
            }
        }
        Combination::Parallel(f, g) => {
            if f.input_width != g.input_width {
                return Err(Error::InputWidthMismatch {
                    left: f.input_width,
                    right: g.input_width,
                });
            }
            let (i_f, i_g) = (f.initial_state_function(), g.initial_state_function());
            for (u, a) in i_f.iter() {
                if let Some(b) = i_g.get(u) {
                    out.insert(u.clone(), product_of(a, b)?);
                }
            }
            if out.is_empty() {
                return Err(Error::EmptyCommonInput);
            }
        }
        Combination::SerialStar { h, f } => {
            check_composable(h, f)?;
            let (i_f, i_h) = (f.initial_state_function(), h.initial_state_function());
            for (u, xs) in &f.entries {
                let mut pairs = BTreeSet::new();
                for mu in &i_f.0[u] {
                    for x in xs.iter().filter(|x| x.initial_value() == *mu) {
                        for lambda in &i_h.0[x] {
                            pairs.insert(mu.concat(lambda)?);
                        }
                    }
                }
                out.insert(u.clone(), pairs);
            }
        }
        Combination::Intersection(f, g) => {
            // the domain W is that of the intersection itself
            let w = intersection(f, g)?;
            let (i_f, i_g) = (f.initial_state_function(), g.initial_state_function());
            for u in w.domain() {
                out.insert(u.clone(), i_f.0[u].intersection(&i_g.0[u]).copied().collect());
            }
        }
        Combination::Union(f, g) => {
            same_width(f.input_width, g.input_width)?;
            same_width(f.state_width, g.state_width)?;
            let (i_f, i_g) = (f.initial_state_function(), g.initial_state_function());
            for (u, a) in i_f.iter() {
                let value = match i_g.get(u) {
                    Some(b) => a.union(b).copied().collect(),
                    None => a.clone(),
                };
                out.insert(u.clone(), value);
            }
            for (v, b) in i_g.iter() {
                if i_f.get(v).is_none() {
                    out.insert(v.clone(), b.clone());
                }
            }
        }
    }
    Ok(InitialStateFunction(out))
}

/// Operands of [`derived_computation`]: the systems a rule needs plus the
/// operands' computation functions.
#[derive(Clone, Copy, Debug)]
pub enum Computations<'a> {
    Dual {
        pi_f: &'a ComputationFunction,
    },
    Product {
        pi_f: &'a ComputationFunction,
        pi_g: &'a ComputationFunction,
    },
    Parallel {
        pi_f: &'a ComputationFunction,
        pi_g: &'a ComputationFunction,
    },
    SerialStar {
        f: &'a ExplicitSystem,
        h: &'a ExplicitSystem,
        pi_f: &'a ComputationFunction,
        pi_h: &'a ComputationFunction,
    },
    /// Both systems must be generated by `generator`; schedules are compared
    /// through the trajectories they produce.
    Intersection {
        f: &'a ExplicitSystem,
        g: &'a ExplicitSystem,
        pi_f: &'a ComputationFunction,
        pi_g: &'a ComputationFunction,
        generator: &'a GeneratorFunction,
        max_events: usize,
    },
    Union {
        pi_f: &'a ComputationFunction,
        pi_g: &'a ComputationFunction,
    },
}

/// The computation function of a combined system, assembled from the
/// operands' computation functions by the closed-form rule for each
/// combinator. Schedule pairs are formed with [`Schedule::pair`].
pub fn derived_computation(operands: &Computations<'_>) -> Result<ComputationFunction, Error> {
    match *operands {
        Computations::Dual { pi_f } => {
            let mut out = ComputationFunction::new(pi_f.state_width, pi_f.input_width);
            for ((mu, u), rhos) in pi_f.iter() {
                out.map.insert((mu.complement(), u.complement()), rhos.clone());
            }
            Ok(out)
        }
        Computations::Product { pi_f, pi_g } => {
            let mut out = ComputationFunction::new(
                pi_f.state_width + pi_g.state_width,
                pi_f.input_width + pi_g.input_width,
            );
            for ((mu, u), rhos) in pi_f.iter() {
                for ((nu, v), sigmas) in pi_g.iter() {
                    out.map.insert((mu.concat(nu)?, u.pair(v)?), pair_schedules(rhos, sigmas)?);
                }
            }
            Ok(out)
        }
        Computations::Parallel { pi_f, pi_g } => {
            if pi_f.input_width != pi_g.input_width {
                return Err(Error::InputWidthMismatch {
                    left: pi_f.input_width,
                    right: pi_g.input_width,
                });
            }
            let mut out = ComputationFunction::new(pi_f.state_width + pi_g.state_width, pi_f.input_width);
            for ((mu, u), rhos) in pi_f.iter() {
                for ((nu, v), sigmas) in pi_g.iter() {
                    if u == v {
                        out.map.insert((mu.concat(nu)?, u.clone()), pair_schedules(rhos, sigmas)?);
                    }
                }
            }
            if out.is_empty() {
                return Err(Error::EmptyCommonInput);
            }
            Ok(out)
        }
        Computations::SerialStar { f, h, pi_f, pi_h } => {
            check_composable(h, f)?;
            let mut out = ComputationFunction::new(f.state_width + h.state_width, f.input_width);
            for (u, xs) in &f.entries {
                for x in xs {
                    let mu = x.initial_value();
                    for y in &h.entries[x] {
                        let lambda = y.initial_value();
                        let key = (mu.concat(&lambda)?, u.clone());
                        if out.map.contains_key(&key) {
                            continue;
                        }
                        // ϖ ranges over π_h(λ, x′) for every x′ ∈ f(u) with
                        // the same initial value as x
                        let mut second = BTreeSet::new();
                        for other in xs.iter().filter(|o| o.initial_value() == mu) {
                            if let Some(ws) = pi_h.get(&lambda, other) {
                                second.extend(ws.iter().cloned());
                            }
                        }
                        out.map.insert(key, pair_schedules(pi_f.lookup(&mu, u)?, &second)?);
                    }
                }
            }
            Ok(out)
        }
        Computations::Intersection {
            f,
            g,
            pi_f,
            pi_g,
            generator,
            max_events,
        } => {
            let common = intersection(f, g)?;
            let mut out = ComputationFunction::new(f.state_width, f.input_width);
            for (u, mu) in common
                .pairs()
                .map(|(u, x)| (u, x.initial_value()))
                .collect::<BTreeSet<_>>()
            {
                let candidates = pi_g.lookup(&mu, u)?;
                let mut reachable = BTreeSet::new();
                for rho in candidates {
                    reachable.insert(solver::solve(generator, mu, u, rho, max_events)?);
                }
                let mut kept = BTreeSet::new();
                for rho in pi_f.lookup(&mu, u)? {
                    if reachable.contains(&solver::solve(generator, mu, u, rho, max_events)?) {
                        kept.insert(rho.clone());
                    }
                }
                if !kept.is_empty() {
                    out.map.insert((mu, u.clone()), kept);
                }
            }
            Ok(out)
        }
        Computations::Union { pi_f, pi_g } => {
            same_width(pi_f.state_width, pi_g.state_width)?;
            same_width(pi_f.input_width, pi_g.input_width)?;
            let mut out = pi_f.clone();
            for (key, sigmas) in pi_g.iter() {
                out.map.entry(key.clone()).or_default().extend(sigmas.iter().cloned());
            }
            Ok(out)
        }
    }
}

fn pair_schedules(left: &BTreeSet<Schedule>, right: &BTreeSet<Schedule>) -> Result<BTreeSet<Schedule>, Error> {
    let mut out = BTreeSet::new();
    for r in left {
        for s in right {
            out.insert(r.pair(s)?);
        }
    }
    Ok(out)
}
