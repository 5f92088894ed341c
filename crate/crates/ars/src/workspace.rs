//! The workspace file: named generator functions, signals, schedules,
//! explicit systems and computation functions.
//!
//! ```text
//! # comments run to the end of the line
//! genfn follow { n=1 m=1 ; x1' = u1 }
//! signal u = init 0 ; 1:1
//! schedule r = sched n=1 prefix[] tail anchor=2 period=1 [0:{1}]
//! system f {
//!     u -> { (init 0 ; 2:1) }
//!     (init 1) -> { (init 1), (init 0 ; 1/2:1) }
//! }
//! pi p n=1 m=1 {
//!     (0, u) -> { r }
//! }
//! ```
//!
//! Inside `system` and `pi` blocks a signal or schedule is either a name or a
//! parenthesized literal. Names may be used before their definition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use ars_core::syntax::{Parser, Tok};
use ars_core::systems::{ComputationFunction, ExplicitSystem, StateSet};
use ars_core::{BitVector, GeneratorFunction, Location, ParseError, Schedule, Signal};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorkspaceError {
    #[error("{0}")]
    Syntax(#[from] ParseError),
    #[error("{at}: {kind} `{name}` is defined twice")]
    DuplicateName {
        at: Location,
        kind: &'static str,
        name: String,
    },
    #[error("{at}: no {kind} named `{name}`")]
    UnresolvedReference {
        at: Location,
        kind: &'static str,
        name: String,
    },
    #[error("{at}: {source}")]
    Invalid {
        at: Location,
        source: ars_core::Error,
    },
}

impl WorkspaceError {
    pub fn location(&self) -> Option<Location> {
        match self {
            WorkspaceError::Syntax(e) => e.location(),
            WorkspaceError::DuplicateName { at, .. }
            | WorkspaceError::UnresolvedReference { at, .. }
            | WorkspaceError::Invalid { at, .. } => Some(*at),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Workspace {
    pub genfns: BTreeMap<String, GeneratorFunction>,
    pub signals: BTreeMap<String, Signal>,
    pub schedules: BTreeMap<String, Schedule>,
    pub systems: BTreeMap<String, ExplicitSystem>,
    pub computations: BTreeMap<String, ComputationFunction>,
}

enum Ref<T> {
    Name(String, Location),
    Literal(T),
}

struct RawSystem {
    at: Location,
    entries: Vec<(Ref<Signal>, Vec<Ref<Signal>>)>,
}

struct RawPi {
    at: Location,
    n: usize,
    m: usize,
    entries: Vec<(BitVector, Ref<Signal>, Vec<Ref<Schedule>>)>,
}

fn signal_ref(p: &mut Parser) -> Result<Ref<Signal>, ParseError> {
    if p.eat(&Tok::LParen) {
        let x = p.signal()?;
        p.expect(&Tok::RParen)?;
        Ok(Ref::Literal(x))
    } else {
        let (name, at) = p.ident()?;
        Ok(Ref::Name(name, at))
    }
}

fn schedule_ref(p: &mut Parser) -> Result<Ref<Schedule>, ParseError> {
    if p.eat(&Tok::LParen) {
        let r = p.schedule()?;
        p.expect(&Tok::RParen)?;
        Ok(Ref::Literal(r))
    } else {
        let (name, at) = p.ident()?;
        Ok(Ref::Name(name, at))
    }
}

/// `{ item (, item)* }`, allowing an empty set.
fn braced_list<T>(
    p: &mut Parser,
    mut item: impl FnMut(&mut Parser) -> Result<T, ParseError>,
) -> Result<Vec<T>, ParseError> {
    p.expect(&Tok::LBrace)?;
    let mut items = Vec::new();
    if p.eat(&Tok::RBrace) {
        return Ok(items);
    }
    loop {
        items.push(item(p)?);
        if p.eat(&Tok::RBrace) {
            return Ok(items);
        }
        p.expect(&Tok::Comma)?;
    }
}

fn insert_unique<T>(
    map: &mut BTreeMap<String, T>,
    kind: &'static str,
    name: String,
    at: Location,
    value: T,
) -> Result<(), WorkspaceError> {
    if map.contains_key(&name) {
        return Err(WorkspaceError::DuplicateName { at, kind, name });
    }
    map.insert(name, value);
    Ok(())
}

fn resolve<T: Clone>(map: &BTreeMap<String, T>, kind: &'static str, r: Ref<T>) -> Result<T, WorkspaceError> {
    match r {
        Ref::Literal(v) => Ok(v),
        Ref::Name(name, at) => map
            .get(&name)
            .cloned()
            .ok_or(WorkspaceError::UnresolvedReference { at, kind, name }),
    }
}

fn width_error(at: Location, expected: usize, found: usize) -> WorkspaceError {
    WorkspaceError::Invalid {
        at,
        source: ars_core::Error::WidthMismatch { expected, found },
    }
}

impl Workspace {
    pub fn parse(text: &str) -> Result<Workspace, WorkspaceError> {
        let mut p = Parser::new(text)?;
        let mut ws = Workspace::default();
        let mut systems: BTreeMap<String, RawSystem> = BTreeMap::new();
        let mut pis: BTreeMap<String, RawPi> = BTreeMap::new();
        // one namespace per kind; systems and pis are checked on insertion
        // into the raw maps
        while !p.at_eof() {
            let (keyword, _) = p.ident()?;
            let (name, at) = p.ident()?;
            match keyword.as_str() {
                "genfn" => {
                    p.expect(&Tok::LBrace)?;
                    let f = p.genfn()?;
                    p.expect(&Tok::RBrace)?;
                    insert_unique(&mut ws.genfns, "genfn", name, at, f)?;
                }
                "signal" => {
                    p.expect(&Tok::Eq)?;
                    let x = p.signal()?;
                    p.eat(&Tok::Semi);
                    insert_unique(&mut ws.signals, "signal", name, at, x)?;
                }
                "schedule" => {
                    p.expect(&Tok::Eq)?;
                    let r = p.schedule()?;
                    p.eat(&Tok::Semi);
                    insert_unique(&mut ws.schedules, "schedule", name, at, r)?;
                }
                "system" => {
                    p.expect(&Tok::LBrace)?;
                    let mut entries = Vec::new();
                    while !p.eat(&Tok::RBrace) {
                        let u = signal_ref(&mut p)?;
                        p.expect(&Tok::Arrow)?;
                        let xs = braced_list(&mut p, signal_ref)?;
                        p.eat(&Tok::Semi);
                        entries.push((u, xs));
                    }
                    insert_unique(&mut systems, "system", name, at, RawSystem { at, entries })?;
                }
                "pi" => {
                    let n = p.assignment("n")?;
                    let m = p.assignment("m")?;
                    p.expect(&Tok::LBrace)?;
                    let mut entries = Vec::new();
                    while !p.eat(&Tok::RBrace) {
                        p.expect(&Tok::LParen)?;
                        let mu = p.bits()?;
                        p.expect(&Tok::Comma)?;
                        let u = signal_ref(&mut p)?;
                        p.expect(&Tok::RParen)?;
                        p.expect(&Tok::Arrow)?;
                        let rs = braced_list(&mut p, schedule_ref)?;
                        p.eat(&Tok::Semi);
                        entries.push((mu, u, rs));
                    }
                    insert_unique(&mut pis, "pi", name, at, RawPi { at, n, m, entries })?;
                }
                other => {
                    return Err(ParseError::Syntax {
                        at,
                        message: format!("unknown definition kind `{other}`"),
                    }
                    .into())
                }
            }
        }

        for (name, raw) in systems {
            let mut pairs = Vec::new();
            for (u, xs) in raw.entries {
                let u = resolve(&ws.signals, "signal", u)?;
                if xs.is_empty() {
                    return Err(WorkspaceError::Invalid {
                        at: raw.at,
                        source: ars_core::Error::EmptyStateSet,
                    });
                }
                for x in xs {
                    pairs.push((u.clone(), resolve(&ws.signals, "signal", x)?));
                }
            }
            let f = ExplicitSystem::from_pairs(pairs).map_err(|source| WorkspaceError::Invalid { at: raw.at, source })?;
            ws.systems.insert(name, f);
        }

        for (name, raw) in pis {
            let mut pi = ComputationFunction::new(raw.n, raw.m);
            for (mu, u, rs) in raw.entries {
                let u = resolve(&ws.signals, "signal", u)?;
                if mu.width() != raw.n {
                    return Err(width_error(raw.at, raw.n, mu.width()));
                }
                if u.width() != raw.m {
                    return Err(width_error(raw.at, raw.m, u.width()));
                }
                for r in rs {
                    let r = resolve(&ws.schedules, "schedule", r)?;
                    if r.width() != raw.n {
                        return Err(width_error(raw.at, raw.n, r.width()));
                    }
                    pi.insert(mu, u.clone(), r)
                        .map_err(|source| WorkspaceError::Invalid { at: raw.at, source })?;
                }
            }
            ws.computations.insert(name, pi);
        }
        Ok(ws)
    }

    pub fn genfn(&self, name: &str) -> Option<&GeneratorFunction> {
        self.genfns.get(name)
    }

    pub fn system(&self, name: &str) -> Option<&ExplicitSystem> {
        self.systems.get(name)
    }

    pub fn computation(&self, name: &str) -> Option<&ComputationFunction> {
        self.computations.get(name)
    }

    /// A named signal, or else `text` read as a signal literal.
    pub fn signal_or_literal(&self, text: &str) -> Result<Signal, ParseError> {
        match self.signals.get(text) {
            Some(x) => Ok(x.clone()),
            None => text.parse(),
        }
    }

    /// A named schedule, or else `text` read as a schedule literal.
    pub fn schedule_or_literal(&self, text: &str) -> Result<Schedule, ParseError> {
        match self.schedules.get(text) {
            Some(r) => Ok(r.clone()),
            None => text.parse(),
        }
    }

    pub fn len(&self) -> usize {
        self.genfns.len() + self.signals.len() + self.schedules.len() + self.systems.len() + self.computations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn write_system(out: &mut String, name: &str, f: &ExplicitSystem) {
    let _ = writeln!(out, "system {name} {{");
    for (u, xs) in f.entries() {
        let _ = writeln!(out, "    ({u}) -> {{ {} }}", join_states(xs));
    }
    out.push_str("}\n");
}

fn join_states(xs: &StateSet) -> String {
    xs.iter().map(|x| format!("({x})")).collect::<Vec<_>>().join(", ")
}

pub fn write_computation(out: &mut String, name: &str, pi: &ComputationFunction) {
    let _ = writeln!(out, "pi {name} n={} m={} {{", pi.state_width(), pi.input_width());
    for ((mu, u), rs) in pi.iter() {
        let rs: Vec<String> = rs.iter().map(|r| format!("({r})")).collect();
        let _ = writeln!(out, "    ({mu}, ({u})) -> {{ {} }}", rs.join(", "));
    }
    out.push_str("}\n");
}

/// Initial-state function as comment lines, one per input.
pub fn write_initial_comment(out: &mut String, name: &str, i: &BTreeMap<Signal, BTreeSet<BitVector>>) {
    let _ = writeln!(out, "# initial states of {name}");
    for (u, mus) in i {
        let mus: Vec<String> = mus.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "#   ({u}) -> {{ {} }}", mus.join(", "));
    }
}

/// Prints in workspace syntax; system and pi blocks use inline literals.
impl fmt::Display for Workspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (name, g) in &self.genfns {
            let _ = writeln!(out, "genfn {name} {{ {g} }}");
        }
        for (name, x) in &self.signals {
            let _ = writeln!(out, "signal {name} = {x}");
        }
        for (name, r) in &self.schedules {
            let _ = writeln!(out, "schedule {name} = {r}");
        }
        for (name, s) in &self.systems {
            write_system(&mut out, name, s);
        }
        for (name, pi) in &self.computations {
            write_computation(&mut out, name, pi);
        }
        f.write_str(&out)
    }
}
