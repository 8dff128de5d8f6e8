//! When vehicles leave their depots.
//!
//! Clock strings are `HH:MM` wall-clock times; internally everything is
//! minutes after 9:00, the start of the planning horizon.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::route::Route;
use crate::strategies::Solution;
use crate::travel_time::propagate_route_times;

pub const HORIZON_START_HOUR: u32 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeparturePolicy {
    /// Every vehicle leaves at `start`.
    Fixed { start: f64 },
    /// Each vehicle's departure is an independent uniform draw from `[lo, hi]`.
    Flexible { lo: f64, hi: f64, seed: u64 },
}

impl Default for DeparturePolicy {
    fn default() -> Self {
        DeparturePolicy::Fixed { start: 0.0 }
    }
}

/// `"10:00"` -> 60.
pub fn parse_clock(s: &str) -> Result<f64> {
    let bad = || Error::Config(format!("expected HH:MM at or after 09:00, got `{s}`"));
    let (h, m) = s.trim().split_once(':').ok_or_else(bad)?;
    let h: u32 = h.parse().map_err(|_| bad())?;
    let m: u32 = m.parse().map_err(|_| bad())?;
    if m >= 60 || h < HORIZON_START_HOUR {
        return Err(bad());
    }
    Ok(((h - HORIZON_START_HOUR) * 60 + m) as f64)
}

fn format_clock(minutes: f64) -> String {
    let total = minutes.round() as u32 + HORIZON_START_HOUR * 60;
    format!("{:02}:{:02}", total / 60, total % 60)
}

impl DeparturePolicy {
    /// Parses `fixed:HH:MM` or `flexible:HH:MM-HH:MM`; `seed` feeds the
    /// flexible draws.
    pub fn parse(s: &str, seed: u64) -> Result<Self> {
        let policy = if let Some(rest) = s.strip_prefix("fixed:") {
            DeparturePolicy::Fixed {
                start: parse_clock(rest)?,
            }
        } else if let Some(rest) = s.strip_prefix("flexible:") {
            let (lo, hi) = rest
                .split_once('-')
                .ok_or_else(|| Error::Config(format!("expected flexible:HH:MM-HH:MM, got `{s}`")))?;
            DeparturePolicy::Flexible {
                lo: parse_clock(lo)?,
                hi: parse_clock(hi)?,
                seed,
            }
        } else {
            return Err(Error::Config(format!(
                "departure policy must be fixed:HH:MM or flexible:HH:MM-HH:MM, got `{s}`"
            )));
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DeparturePolicy::Fixed { start } if !(start >= 0.0) => {
                Err(Error::Config(format!("fixed departure {start} is negative")))
            }
            DeparturePolicy::Flexible { lo, hi, .. } if !(lo >= 0.0 && lo <= hi) => {
                Err(Error::Config(format!("flexible window [{lo}, {hi}] is empty or negative")))
            }
            _ => Ok(()),
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, DeparturePolicy::Fixed { .. })
    }

    /// Start times for `n` routes, in route order.
    pub fn starts(&self, n: usize) -> Vec<f64> {
        match *self {
            DeparturePolicy::Fixed { start } => vec![start; n],
            DeparturePolicy::Flexible { lo, hi, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n)
                    .map(|_| if lo == hi { lo } else { rng.gen_range(lo..=hi) })
                    .collect()
            }
        }
    }

    /// Sets every route's start and recomputes its arrival times.
    pub fn apply(&self, routes: &mut [Route], instance: &Instance) {
        let starts = self.starts(routes.len());
        for (r, start) in routes.iter_mut().zip(starts) {
            propagate_route_times(r, start, instance);
        }
    }
}

impl fmt::Display for DeparturePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DeparturePolicy::Fixed { start } => write!(f, "fixed:{}", format_clock(start)),
            DeparturePolicy::Flexible { lo, hi, .. } => {
                write!(f, "flexible:{}-{}", format_clock(lo), format_clock(hi))
            }
        }
    }
}

impl FromStr for DeparturePolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DeparturePolicy::parse(s, 0)
    }
}

pub fn assign_departures(solution: &Solution, policy: &DeparturePolicy, instance: &Instance) -> Solution {
    let mut out = solution.clone();
    policy.apply(&mut out.routes, instance);
    out
}
