//! Trace files for solved trajectories.
//!
//! CSV has a header `time,x1,...,xn`, a first row at time `-inf` holding the
//! initial value, then one row per value change. Times are exact (`3/2`).
//!
//! VCD needs integer timestamps. A trace is written with tick
//! `k = (t - origin) * ticks_per_unit`, where `ticks_per_unit` is the least
//! common denominator of all switch times and `origin` lies strictly before
//! the first switch, so the initial value is the dump at tick 0. Both numbers
//! are recorded in a header comment and reading inverts the mapping exactly.

use std::io::{self, BufRead, Write};

use ars_core::{BitVector, Rational, Signal};
use num_integer::Integer;
use thiserror::Error;
use vcd::{Command, IdCode, ScopeItem, SimulationCommand, Value};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("malformed trace: {0}")]
    Format(String),
    #[error(transparent)]
    Signal(#[from] ars_core::Error),
}

fn format_error(message: impl Into<String>) -> TraceError {
    TraceError::Format(message.into())
}

pub fn write_csv<W: Write>(x: &Signal, out: W) -> Result<(), TraceError> {
    let mut w = csv::Writer::from_writer(out);
    let n = x.width();
    let mut header = vec!["time".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    let row = |time: String, v: &BitVector| {
        let mut r = vec![time];
        r.extend(v.iter().map(|b| if b { "1" } else { "0" }.to_string()));
        r
    };
    w.write_record(row("-inf".into(), &x.initial_value()))?;
    for (t, v) in x.switches() {
        w.write_record(row(t.to_string(), v))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Signal, TraceError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.get(0) != Some("time") || header.len() < 2 {
        return Err(format_error("header must be `time,x1,...,xn`"));
    }
    for (i, name) in header.iter().skip(1).enumerate() {
        if name != format!("x{}", i + 1) {
            return Err(format_error(format!("unexpected column `{name}`")));
        }
    }
    let n = header.len() - 1;
    let mut initial = None;
    let mut raw = Vec::new();
    for record in r.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let bits = record
            .iter()
            .skip(1)
            .map(|c| match c {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(format_error(format!("line {line}: bad value `{other}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if bits.len() != n {
            return Err(format_error(format!("line {line}: expected {n} values")));
        }
        let value = BitVector::from_bools(&bits)?;
        let time = &record[0];
        match initial {
            None if time == "-inf" => initial = Some(value),
            None => return Err(format_error("first row must be at time -inf")),
            Some(_) => {
                let t: Rational = time
                    .parse()
                    .map_err(|_| format_error(format!("line {line}: bad time `{time}`")))?;
                raw.push((t, value));
            }
        }
    }
    let initial = initial.ok_or_else(|| format_error("no initial row"))?;
    Ok(Signal::canonicalize(initial, raw)?)
}

/// How rational times map to VCD ticks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VcdScale {
    pub origin: Rational,
    pub ticks_per_unit: i64,
}

impl VcdScale {
    pub fn for_signal(x: &Signal) -> VcdScale {
        let ticks_per_unit = x.switch_times().fold(1i64, |l, t| l.lcm(&t.denominator()));
        let origin = match x.switch_times().next() {
            Some(t) if t <= Rational::ZERO => Rational::integer(t.floor() - 1),
            _ => Rational::ZERO,
        };
        VcdScale { origin, ticks_per_unit }
    }

    pub fn tick(&self, t: Rational) -> Result<u64, TraceError> {
        let k = (t - self.origin).scale(self.ticks_per_unit);
        if !k.is_integer() || k < 0 {
            return Err(format_error(format!("time {t} is not on the tick grid")));
        }
        u64::try_from(k.numerator()).map_err(|_| format_error("tick out of range"))
    }

    pub fn time(&self, tick: u64) -> Result<Rational, TraceError> {
        let k = i64::try_from(tick).map_err(|_| format_error("tick out of range"))?;
        Ok(self.origin + Rational::new(k, self.ticks_per_unit))
    }

    fn comment(&self) -> String {
        format!("ars origin={} ticks-per-unit={}", self.origin, self.ticks_per_unit)
    }

    fn from_comment(text: &str) -> Option<VcdScale> {
        let rest = text.trim().strip_prefix("ars ")?;
        let mut origin = None;
        let mut ticks = None;
        for part in rest.split_whitespace() {
            match part.split_once('=')? {
                ("origin", v) => origin = v.parse().ok(),
                ("ticks-per-unit", v) => ticks = v.parse().ok().filter(|&k: &i64| k > 0),
                _ => return None,
            }
        }
        Some(VcdScale {
            origin: origin?,
            ticks_per_unit: ticks?,
        })
    }
}

fn bit(b: bool) -> Value {
    if b {
        Value::V1
    } else {
        Value::V0
    }
}

/// Writes one scalar wire per coordinate and returns the scale used.
pub fn write_vcd<W: Write>(x: &Signal, out: W) -> Result<VcdScale, TraceError> {
    let scale = VcdScale::for_signal(x);
    let mut w = vcd::Writer::new(out);
    w.comment(&scale.comment())?;
    w.add_module("ars")?;
    let ids = (1..=x.width())
        .map(|i| w.add_wire(1, &format!("x{i}")))
        .collect::<Result<Vec<IdCode>, _>>()?;
    w.upscope()?;
    w.enddefinitions()?;
    w.timestamp(0)?;
    w.begin(SimulationCommand::Dumpvars)?;
    for (id, b) in ids.iter().zip(x.initial_value().iter()) {
        w.change_scalar(*id, bit(b))?;
    }
    w.end()?;
    let mut prev = x.initial_value();
    for &(t, v) in x.switches() {
        w.timestamp(scale.tick(t)?)?;
        for (i, id) in ids.iter().enumerate() {
            if prev.get(i + 1) != v.get(i + 1) {
                w.change_scalar(*id, bit(v.get(i + 1)))?;
            }
        }
        prev = v;
    }
    w.flush()?;
    Ok(scale)
}

pub fn read_vcd<R: BufRead>(input: R) -> Result<Signal, TraceError> {
    let mut parser = vcd::Parser::new(input);
    let header = parser.parse_header()?;
    let mut scale = None;
    let mut wires: Vec<(IdCode, usize)> = Vec::new();
    for item in &header.items {
        match item {
            ScopeItem::Comment(c) => scale = scale.or_else(|| VcdScale::from_comment(c)),
            ScopeItem::Scope(s) if s.identifier == "ars" => {
                for var in &s.items {
                    if let ScopeItem::Var(v) = var {
                        let index = v
                            .reference
                            .strip_prefix('x')
                            .and_then(|i| i.parse::<usize>().ok())
                            .ok_or_else(|| format_error(format!("unexpected wire `{}`", v.reference)))?;
                        wires.push((v.code, index));
                    }
                }
            }
            _ => {}
        }
    }
    let scale = scale.ok_or_else(|| format_error("missing scale comment"))?;
    let n = wires.len();
    let mut indices: Vec<usize> = wires.iter().map(|&(_, i)| i).collect();
    indices.sort_unstable();
    if n == 0 || indices != (1..=n).collect::<Vec<_>>() {
        return Err(format_error("wires must be x1..xn"));
    }

    let mut value = BitVector::zeros(n)?;
    let mut initial = None;
    let mut current_tick = None;
    let mut raw = Vec::new();
    let flush = |tick: Option<u64>, value: BitVector, initial: &mut Option<BitVector>, raw: &mut Vec<_>| {
        match tick {
            Some(0) => *initial = Some(value),
            Some(k) => raw.push((scale.time(k)?, value)),
            None => {}
        }
        Ok::<_, TraceError>(())
    };
    for command in parser {
        match command? {
            Command::Timestamp(k) => {
                flush(current_tick, value, &mut initial, &mut raw)?;
                current_tick = Some(k);
            }
            Command::ChangeScalar(id, v) => {
                let &(_, i) = wires
                    .iter()
                    .find(|(code, _)| *code == id)
                    .ok_or_else(|| format_error("change to an undeclared wire"))?;
                let b = match v {
                    Value::V0 => false,
                    Value::V1 => true,
                    other => return Err(format_error(format!("unsupported value {other}"))),
                };
                value = value.with(i, b);
            }
            _ => {}
        }
    }
    flush(current_tick, value, &mut initial, &mut raw)?;
    let initial = initial.ok_or_else(|| format_error("no initial dump at tick 0"))?;
    Ok(Signal::canonicalize(initial, raw)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(text: &str) {
        let x: Signal = text.parse().unwrap();
        let mut csv = Vec::new();
        write_csv(&x, &mut csv).unwrap();
        assert_eq!(read_csv(&csv[..]).unwrap(), x);
        let mut vcd = Vec::new();
        let scale = write_vcd(&x, &mut vcd).unwrap();
        assert_eq!(read_vcd(&vcd[..]).unwrap(), x);
        for &(t, _) in x.switches() {
            assert_eq!(scale.time(scale.tick(t).unwrap()).unwrap(), t);
        }
    }

    #[test]
    fn follower_trace_rows() {
        let x: Signal = "init 0 ; 1:1".parse().unwrap();
        let mut out = Vec::new();
        write_csv(&x, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "time,x1\n-inf,0\n1,1\n");
    }

    #[test]
    fn round_trips() {
        round_trip("init 0");
        round_trip("init 01 ; 1/2:11 ; 3:10");
        round_trip("init 101 ; -5/3:001 ; 0:111 ; 7/4:000");
        round_trip("init 1 ; 0:0");
    }

    #[test]
    fn scale_uses_least_common_denominator() {
        let x: Signal = "init 0 ; 1/2:1 ; 4/3:0".parse().unwrap();
        let scale = VcdScale::for_signal(&x);
        assert_eq!(scale.ticks_per_unit, 6);
        assert_eq!(scale.tick(Rational::new(4, 3)).unwrap(), 8);
    }

    #[test]
    fn rejects_missing_initial_row() {
        assert!(read_csv("time,x1\n1,1\n".as_bytes()).is_err());
        assert!(read_csv("time,x1\n-inf,2\n".as_bytes()).is_err());
    }
}
