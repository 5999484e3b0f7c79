//! Schedule constructions for the supported protocol families.
//!
//! Classical slot-based protocols (Quorum, Disco, U-Connect, SearchLight)
//! wake for whole slots that both listen and beacon; the Nihao family talks
//! in many slots but listens in few. Every construction emits beacons at
//! awake/talk slot starts; `BeaconMode::StartEnd` adds a second beacon at
//! the end of each talking slot, which shortens tail latencies at the price
//! of doubled beacon energy.

use crate::discovery::{worst_case_latency, OffsetSweepResult, SweepMode};
use crate::schedule::{Schedule, ScheduleError};
use crate::{frac, Frac, Slot};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ProtocolError {
    #[error("{what} must be at least {min}")]
    TooSmall { what: &'static str, min: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the two primes must be distinct")]
    PrimesNotDistinct,
    #[error("{0} must be an odd prime")]
    NeedOddPrime(u64),
    #[error("slot count {t} must be a multiple of {of}")]
    NotDivisible { t: u64, of: u64 },
    #[error("striped probing relies on start+end beacons; use BeaconMode::StartEnd")]
    StripedNeedsTwoBeacons,
    #[error("start+end beacons need 2·beacon_len ≤ ticks_per_slot ({beacon_ticks_len} vs {ticks_per_slot})")]
    EndBeaconNeedsRoom {
        beacon_ticks_len: u64,
        ticks_per_slot: u64,
    },
    #[error("unrecognized protocol shorthand {0:?}")]
    BadShorthand(String),
    #[error("no parameter meets the duty-cycle target {0}")]
    InfeasibleTarget(String),
    #[error("a guaranteed protocol failed its self-pair sweep: coverage {0}")]
    GuaranteeViolated(String),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    Quorum,
    Disco,
    UConnect,
    SearchLight,
    SNihao,
    GNihao,
    BNihao,
}

/// Where beacons sit inside a talking slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BeaconMode {
    /// One beacon at the slot start.
    #[default]
    Start,
    /// Beacons at both the slot start and the slot end.
    StartEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolParams {
    /// Grid quorum over an n×n matrix: awake in row 0 and column 0.
    Quorum { n: u64 },
    /// Awake in slots divisible by either of two distinct primes.
    Disco { p1: u64, p2: u64 },
    /// Awake every p-th slot plus the run 1..⌈(p−1)/2⌉ once per p² slots.
    UConnect { p: u64 },
    /// t/2 rounds of t slots: anchor slot 0 plus a sweeping probe slot.
    /// Striped probing visits only odd probe positions in t/4 rounds.
    SearchLight { t: u64, striped: bool },
    /// Listen 1 slot in n, beacon every slot.
    SNihao { n: u64 },
    /// Listen m consecutive slots, beacon every m-th slot, period m·n.
    GNihao { m: u64, n: u64 },
    /// Balanced Nihao: listen n consecutive slots, beacon every n-th slot.
    BNihao { n: u64 },
}

impl ProtocolParams {
    pub fn kind(&self) -> ProtocolKind {
        match self {
            ProtocolParams::Quorum { .. } => ProtocolKind::Quorum,
            ProtocolParams::Disco { .. } => ProtocolKind::Disco,
            ProtocolParams::UConnect { .. } => ProtocolKind::UConnect,
            ProtocolParams::SearchLight { .. } => ProtocolKind::SearchLight,
            ProtocolParams::SNihao { .. } => ProtocolKind::SNihao,
            ProtocolParams::GNihao { .. } => ProtocolKind::GNihao,
            ProtocolParams::BNihao { .. } => ProtocolKind::BNihao,
        }
    }

    /// Canonical shorthand, the inverse of [`parse_shorthand`].
    pub fn shorthand(&self) -> String {
        match *self {
            ProtocolParams::Quorum { n } => format!("quorum:{n}"),
            ProtocolParams::Disco { p1, p2 } => format!("disco:{p1}:{p2}"),
            ProtocolParams::UConnect { p } => format!("uconnect:{p}"),
            ProtocolParams::SearchLight { t, striped: false } => format!("searchlight:{t}"),
            ProtocolParams::SearchLight { t, striped: true } => {
                format!("searchlight:{t}:striped")
            }
            ProtocolParams::SNihao { n } => format!("snihao:{n}"),
            ProtocolParams::GNihao { m, n } => format!("gnihao:{m}:{n}"),
            ProtocolParams::BNihao { n } => format!("bnihao:{n}"),
        }
    }

    /// Period length in slots.
    pub fn period_slots(&self) -> u64 {
        match *self {
            ProtocolParams::Quorum { n } => n * n,
            ProtocolParams::Disco { p1, p2 } => p1 * p2,
            ProtocolParams::UConnect { p } => p * p,
            ProtocolParams::SearchLight { t, striped: false } => t * t / 2,
            ProtocolParams::SearchLight { t, striped: true } => t * t / 4,
            ProtocolParams::SNihao { n } => n,
            ProtocolParams::GNihao { m, n } => m * n,
            ProtocolParams::BNihao { n } => n * n,
        }
    }

    /// Does the construction guarantee bidirectional discovery at every
    /// offset (with beacons no longer than the point-beacon regime used for
    /// the guarantee proofs)? Striped SearchLight does not: a small set of
    /// exactly-even slot alignments can dodge its odd-position probes.
    pub fn guarantees_discovery(&self) -> bool {
        !matches!(self, ProtocolParams::SearchLight { striped: true, .. })
    }

    fn validate(&self) -> Result<(), ProtocolError> {
        match *self {
            ProtocolParams::Quorum { n } => {
                if n < 2 {
                    return Err(ProtocolError::TooSmall { what: "quorum n", min: 2 });
                }
            }
            ProtocolParams::Disco { p1, p2 } => {
                for p in [p1, p2] {
                    if !is_prime(p) {
                        return Err(ProtocolError::NotPrime(p));
                    }
                }
                if p1 == p2 {
                    return Err(ProtocolError::PrimesNotDistinct);
                }
            }
            ProtocolParams::UConnect { p } => {
                if !is_prime(p) || p < 3 {
                    return Err(ProtocolError::NeedOddPrime(p));
                }
            }
            ProtocolParams::SearchLight { t, striped } => {
                if t < 2 {
                    return Err(ProtocolError::TooSmall { what: "searchlight t", min: 2 });
                }
                let of = if striped { 4 } else { 2 };
                if t % of != 0 {
                    return Err(ProtocolError::NotDivisible { t, of });
                }
            }
            ProtocolParams::SNihao { n } | ProtocolParams::BNihao { n } => {
                if n < 1 {
                    return Err(ProtocolError::TooSmall { what: "n", min: 1 });
                }
            }
            ProtocolParams::GNihao { m, n } => {
                if m < 1 || n < 1 {
                    return Err(ProtocolError::TooSmall { what: "m and n", min: 1 });
                }
            }
        }
        Ok(())
    }

    /// Slots that listen for the whole slot.
    fn listen_slots(&self) -> Vec<Slot> {
        match *self {
            ProtocolParams::Quorum { .. }
            | ProtocolParams::Disco { .. }
            | ProtocolParams::UConnect { .. }
            | ProtocolParams::SearchLight { .. } => self.awake_slots(),
            ProtocolParams::SNihao { .. } => vec![0],
            ProtocolParams::GNihao { m, .. } => (0..m).collect(),
            ProtocolParams::BNihao { n } => (0..n).collect(),
        }
    }

    /// Slots whose start carries a beacon.
    fn talk_slots(&self) -> Vec<Slot> {
        match *self {
            ProtocolParams::Quorum { .. }
            | ProtocolParams::Disco { .. }
            | ProtocolParams::UConnect { .. }
            | ProtocolParams::SearchLight { .. } => self.awake_slots(),
            ProtocolParams::SNihao { n } => (0..n).collect(),
            ProtocolParams::GNihao { m, n } => (0..n).map(|i| i * m).collect(),
            ProtocolParams::BNihao { n } => (0..n).map(|i| i * n).collect(),
        }
    }

    /// Awake slots of the classical (listen-and-talk) constructions.
    fn awake_slots(&self) -> Vec<Slot> {
        let mut slots: Vec<Slot> = match *self {
            ProtocolParams::Quorum { n } => {
                (0..n).chain((1..n).map(|k| k * n)).collect()
            }
            ProtocolParams::Disco { p1, p2 } => (0..p1 * p2)
                .filter(|s| s % p1 == 0 || s % p2 == 0)
                .collect(),
            ProtocolParams::UConnect { p } => {
                (0..p).map(|k| k * p).chain(1..=(p - 1) / 2).collect()
            }
            ProtocolParams::SearchLight { t, striped } => {
                let rounds = if striped { t / 4 } else { t / 2 };
                (0..rounds)
                    .flat_map(|r| {
                        let probe = if striped { 2 * r + 1 } else { r + 1 };
                        [r * t, r * t + probe]
                    })
                    .collect()
            }
            _ => unreachable!("awake_slots is only defined for classical protocols"),
        };
        slots.sort_unstable();
        slots.dedup();
        slots
    }
}

/// Materialize a protocol as a tick-exact schedule.
pub fn generate(
    params: &ProtocolParams,
    mode: BeaconMode,
    ticks_per_slot: u64,
    beacon_ticks_len: u64,
) -> Result<Schedule, ProtocolError> {
    params.validate()?;
    if matches!(params, ProtocolParams::SearchLight { striped: true, .. })
        && mode == BeaconMode::Start
    {
        return Err(ProtocolError::StripedNeedsTwoBeacons);
    }
    if mode == BeaconMode::StartEnd && 2 * beacon_ticks_len > ticks_per_slot {
        return Err(ProtocolError::EndBeaconNeedsRoom {
            beacon_ticks_len,
            ticks_per_slot,
        });
    }

    let talk = params.talk_slots();
    let mut beacon_starts: Vec<u64> = talk.iter().map(|&s| s * ticks_per_slot).collect();
    if mode == BeaconMode::StartEnd {
        beacon_starts.extend(
            talk.iter()
                .map(|&s| (s + 1) * ticks_per_slot - beacon_ticks_len),
        );
    }

    let schedule = Schedule::new(
        params.period_slots(),
        ticks_per_slot,
        beacon_ticks_len,
        params.listen_slots(),
        beacon_starts,
    )?;
    let tag = match mode {
        BeaconMode::Start => params.shorthand(),
        BeaconMode::StartEnd => format!("{} startend", params.shorthand()),
    };
    Ok(schedule.with_provenance(tag))
}

/// Parse `"disco:5:7"`, `"searchlight:40:striped"`, `"gnihao:4:3"`, ….
pub fn parse_shorthand(text: &str) -> Result<ProtocolParams, ProtocolError> {
    let bad = || ProtocolError::BadShorthand(text.to_string());
    let parts: Vec<&str> = text.trim().split(':').collect();
    let num = |s: &&str| s.parse::<u64>().map_err(|_| bad());
    let params = match parts.as_slice() {
        ["quorum", n] => ProtocolParams::Quorum { n: num(n)? },
        ["disco", p1, p2] => ProtocolParams::Disco { p1: num(p1)?, p2: num(p2)? },
        ["uconnect", p] => ProtocolParams::UConnect { p: num(p)? },
        ["searchlight", t] => ProtocolParams::SearchLight { t: num(t)?, striped: false },
        ["searchlight", t, "striped"] => {
            ProtocolParams::SearchLight { t: num(t)?, striped: true }
        }
        ["snihao", n] => ProtocolParams::SNihao { n: num(n)? },
        ["gnihao", m, n] => ProtocolParams::GNihao { m: num(m)?, n: num(n)? },
        ["bnihao", n] => ProtocolParams::BNihao { n: num(n)? },
        _ => return Err(bad()),
    };
    params.validate()?;
    Ok(params)
}

/// Self-pair sanity sweep: generates the schedule, runs the exact critical
/// sweep against a copy of itself, and — for constructions that promise
/// discovery at every offset — verifies that promise.
pub fn validate_discovery(
    params: &ProtocolParams,
    mode: BeaconMode,
    ticks_per_slot: u64,
    beacon_ticks_len: u64,
) -> Result<OffsetSweepResult, ProtocolError> {
    let schedule = generate(params, mode, ticks_per_slot, beacon_ticks_len)?;
    let sweep = worst_case_latency(&schedule, &schedule, SweepMode::Critical)
        .expect("self pair shares its tick grid");
    if params.guarantees_discovery() && !sweep.coverage.is_one() {
        return Err(ProtocolError::GuaranteeViolated(format!("{}", sweep.coverage)));
    }
    Ok(sweep)
}

/// Pick the parameter whose exact duty cycle lands closest to `target_dc`.
///
/// Classical protocols are matched on their nominal (listen-slot) duty
/// cycle; the Nihao family is beacon-dominated, so its duty cycle depends
/// on the beacon fraction `alpha` = beacon_len / ticks_per_slot and the
/// match accounts for it. `gamma` (talk/listen budget ratio n/m) is only
/// consulted — and required — for G-Nihao. Ties prefer the lower duty
/// cycle. Disco searches balanced prime pairs (p1 < p2 ≤ 2·p1).
pub fn choose_for_dc(
    kind: ProtocolKind,
    target_dc: Frac,
    alpha: Frac,
    gamma: Option<Frac>,
) -> Result<ProtocolParams, ProtocolError> {
    let infeasible = || ProtocolError::InfeasibleTarget(format!("{target_dc}"));
    if target_dc <= Frac::zero() || target_dc > Frac::one() {
        return Err(infeasible());
    }
    let two = frac(2, 1);

    // Pick the better of two candidates by |dc(param) − target|.
    let closer = |lo: u64, hi: u64, dc_of: &dyn Fn(u64) -> Frac| -> u64 {
        let d_lo = (dc_of(lo) - target_dc).abs();
        let d_hi = (dc_of(hi) - target_dc).abs();
        // On a tie the larger parameter has the lower duty cycle.
        if d_lo < d_hi { lo } else { hi }
    };

    match kind {
        ProtocolKind::Quorum => {
            let dc_of = |n: u64| frac(2, n as i128);
            let n0 = (two / target_dc).floor().to_integer().max(2) as u64;
            Ok(ProtocolParams::Quorum { n: closer(n0, n0 + 1, &dc_of) })
        }
        ProtocolKind::UConnect => {
            // Nominal duty cycle 3/(2p); search the primes bracketing 3/(2·dc).
            let dc_of = |p: u64| frac(3, 2 * p as i128);
            let p0 = (frac(3, 2) / target_dc).floor().to_integer().max(3) as u64;
            let lo = prev_prime(p0).ok_or_else(infeasible)?;
            let hi = next_prime(p0 + 1);
            Ok(ProtocolParams::UConnect { p: closer(lo.max(3), hi, &dc_of) })
        }
        ProtocolKind::SearchLight => {
            // Duty cycle 2/t with t even.
            let dc_of = |t: u64| frac(2, t as i128);
            let t0 = (two / target_dc).floor().to_integer().max(2) as u64 & !1;
            Ok(ProtocolParams::SearchLight {
                t: closer(t0.max(2), t0 + 2, &dc_of),
                striped: false,
            })
        }
        ProtocolKind::Disco => {
            let bound = (frac(4, 1) / target_dc).ceil().to_integer() as u64;
            let primes = primes_up_to(bound.max(5));
            let mut best: Option<(Frac, (u64, u64))> = None;
            for (i, &p1) in primes.iter().enumerate() {
                for &p2 in &primes[i + 1..] {
                    if p2 > 2 * p1 {
                        break;
                    }
                    let dc = frac(1, p1 as i128) + frac(1, p2 as i128);
                    let diff = (dc - target_dc).abs();
                    let better = match &best {
                        None => true,
                        Some((d, pair)) => {
                            diff < *d || (diff == *d && p1 * p2 < pair.0 * pair.1)
                        }
                    };
                    if better {
                        best = Some((diff, (p1, p2)));
                    }
                }
            }
            let (_, (p1, p2)) = best.ok_or_else(infeasible)?;
            Ok(ProtocolParams::Disco { p1, p2 })
        }
        ProtocolKind::SNihao => {
            // Exact duty cycle (1 + α(n−1))/n = (1−α)/n + α.
            if target_dc <= alpha {
                return Err(infeasible());
            }
            let dc_of = |n: u64| {
                (Frac::one() + alpha * frac(n as i128 - 1, 1)) / frac(n as i128, 1)
            };
            let n0 = ((Frac::one() - alpha) / (target_dc - alpha))
                .floor()
                .to_integer()
                .max(1) as u64;
            Ok(ProtocolParams::SNihao { n: closer(n0, n0 + 1, &dc_of) })
        }
        ProtocolKind::BNihao => {
            // Exact duty cycle (1 + α)/n.
            let dc_of = |n: u64| (Frac::one() + alpha) / frac(n as i128, 1);
            let n0 = ((Frac::one() + alpha) / target_dc).floor().to_integer().max(1) as u64;
            Ok(ProtocolParams::BNihao { n: closer(n0, n0 + 1, &dc_of) })
        }
        ProtocolKind::GNihao => {
            // Duty cycle (m + αn)/(mn) with n = γ·m: (1 + αγ)/(γm).
            let gamma = gamma.ok_or_else(|| {
                ProtocolError::InfeasibleTarget("G-Nihao needs a gamma target".into())
            })?;
            if gamma <= Frac::zero() {
                return Err(infeasible());
            }
            // n integral: m must be a multiple of denom(γ)/gcd stepping.
            let step = (*gamma.denom() / num_integer::gcd(*gamma.numer(), *gamma.denom()))
                .unsigned_abs() as u64;
            let dc_of = |m: u64| {
                let n = gamma * frac(m as i128, 1);
                (frac(m as i128, 1) + alpha * n) / (frac(m as i128, 1) * n)
            };
            let m_real = (Frac::one() + alpha * gamma) / (gamma * target_dc);
            let m_lo = ((m_real.floor().to_integer().max(1) as u64) / step).max(1) * step;
            let m_hi = m_lo + step;
            let m = closer(m_lo, m_hi, &dc_of);
            let n = (gamma * frac(m as i128, 1)).to_integer() as u64;
            Ok(ProtocolParams::GNihao { m, n })
        }
    }
}

pub(crate) fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    if x.is_multiple_of(2) {
        return x == 2;
    }
    let mut d = 3;
    while d * d <= x {
        if x.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn prev_prime(from: u64) -> Option<u64> {
    (2..=from).rev().find(|&x| is_prime(x))
}

fn next_prime(from: u64) -> u64 {
    (from..).find(|&x| is_prime(x)).unwrap()
}

fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&x| is_prime(x)).collect()
}
