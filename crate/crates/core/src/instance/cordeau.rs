//! Reader for Cordeau-style MDVRPTW benchmark files.
//!
//! Layout (whitespace separated):
//!
//! ```text
//! type m n t              # m vehicles per depot, n customers, t depots
//! D Q                     # t lines: max route duration, vehicle capacity
//! i x y d q f a l1..la e l   # n customer lines
//! i x y 0 0 0 0 e l          # t depot lines
//! ```
//!
//! Cold-chain fields the benchmark does not carry (ideal earliest time, fuel
//! rates, cost coefficients, speed schedule) come from [`Defaults`].

use super::{Customer, Depot, HighwayNetwork, Instance, InstanceError, VehicleSpec};
use crate::config::Defaults;

struct Tokens<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Tokens {
            lines: text.lines().enumerate().peekable(),
        }
    }

    /// Next non-blank line, split into tokens.
    fn line(&mut self) -> Result<(usize, Vec<&'a str>), InstanceError> {
        for (no, line) in self.lines.by_ref() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if !toks.is_empty() {
                return Ok((no + 1, toks));
            }
        }
        Err(InstanceError::Parse("unexpected end of file".into()))
    }
}

fn field<T: std::str::FromStr>(toks: &[&str], idx: usize, lineno: usize) -> Result<T, InstanceError> {
    let raw = toks.get(idx).ok_or_else(|| {
        InstanceError::Parse(format!("line {lineno}: missing field {}", idx + 1))
    })?;
    raw.parse::<T>()
        .map_err(|_| InstanceError::Parse(format!("line {lineno}: cannot parse `{raw}`")))
}

struct NodeLine {
    id: usize,
    x: f64,
    y: f64,
    service: f64,
    demand: f64,
    earliest: f64,
    latest: f64,
}

fn node_line(toks: &[&str], lineno: usize) -> Result<NodeLine, InstanceError> {
    let a: usize = field(toks, 6, lineno)?;
    let tw = 7 + a;
    Ok(NodeLine {
        id: field(toks, 0, lineno)?,
        x: field(toks, 1, lineno)?,
        y: field(toks, 2, lineno)?,
        service: field(toks, 3, lineno)?,
        demand: field(toks, 4, lineno)?,
        earliest: field(toks, tw, lineno)?,
        latest: field(toks, tw + 1, lineno)?,
    })
}

pub fn parse_cordeau(text: &str, defaults: &Defaults) -> Result<Instance, InstanceError> {
    let mut tokens = Tokens::new(text);
    let (no, header) = tokens.line()?;
    let vehicles_per_depot: u32 = field(&header, 1, no)?;
    let n: usize = field(&header, 2, no)?;
    let t: usize = field(&header, 3, no)?;

    let mut capacity = None;
    for _ in 0..t {
        let (no, toks) = tokens.line()?;
        let q: f64 = field(&toks, 1, no)?;
        capacity.get_or_insert(q);
    }
    let capacity = capacity.ok_or_else(|| InstanceError::Parse("no depot capacity line".into()))?;

    let mut customers = Vec::with_capacity(n);
    for _ in 0..n {
        let (no, toks) = tokens.line()?;
        let c = node_line(&toks, no)?;
        if c.demand.fract() != 0.0 || c.demand < 0.0 {
            return Err(InstanceError::Parse(format!(
                "line {no}: demand {} is not a whole number of units",
                c.demand
            )));
        }
        customers.push(Customer {
            id: c.id,
            x: c.x,
            y: c.y,
            demand: c.demand as u32,
            earliest: c.earliest,
            latest: c.latest,
            ideal_earliest: (c.earliest - defaults.ideal_earliest_offset).max(0.0),
            service_time: c.service,
            bound_depot: None,
        });
    }

    let mut depots = Vec::with_capacity(t);
    for _ in 0..t {
        let (no, toks) = tokens.line()?;
        let d = node_line(&toks, no)?;
        depots.push(Depot {
            id: d.id,
            x: d.x,
            y: d.y,
            fleet_size: vehicles_per_depot,
        });
    }

    Instance::new(
        depots,
        customers,
        VehicleSpec {
            capacity: capacity.round() as u32,
            ..defaults.vehicle()
        },
        defaults.schedule()?,
        defaults.cost_params(),
        HighwayNetwork {
            threshold_km: defaults.highway_threshold,
        },
    )
}
