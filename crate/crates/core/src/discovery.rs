//! Exact pairwise discovery analysis.
//!
//! Node `a` is held at phase 0 and node `b` is delayed by an offset of δ
//! ticks. For a direction (one node talking, the other listening) the
//! *reception events* are the tick positions in `[0, H)` — `H` the pair
//! hyperperiod — at which a beacon of the talker lies entirely inside an
//! awake window of the listener. Both event sets repeat with period `H`.
//!
//! The worst-case discovery latency at a given offset is taken over every
//! possible observation origin: an observer starting at tick `x` waits until
//! the next reception event at or after `x` completes. Maximising over `x`
//! turns this into the largest circular gap between consecutive events, so
//!
//! ```text
//! worst ticks = maxgap(E) - 1 + beacon_len,
//! worst slots = ceil(worst ticks / ticks_per_slot).
//! ```
//!
//! Bidirectional discovery needs both directions, and
//! `max_x max_dir wait_dir(x) = max_dir maxgap(E_dir)`, so the bidirectional
//! bound is the larger of the two directional bounds.
//!
//! # Offset space
//!
//! All gap statistics are periodic in δ with period `g = gcd(P_a, P_b)`
//! ticks: adding `g` to δ rotates both event sets by one common shift
//! (choose `u` with `u·P_a ≡ g (mod P_b)`; then `E(δ+g) = E(δ) + u·P_a`),
//! and circular gaps are rotation invariant. The sweep therefore runs over
//! integer offsets `[0, g)`.
//!
//! Within that range the directional bounds are piecewise constant: an
//! event's membership only flips when a beacon endpoint crosses an awake
//! window endpoint. Those *critical offsets* are computed exactly as the
//! left endpoints of the constancy intervals, so sampling each critical
//! offset once covers the whole interval to its successor and span-weighted
//! aggregates (coverage, latency profiles) are exact.

use crate::schedule::Schedule;
use crate::{frac, Frac, Tick};
use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PairError {
    #[error("schedules use different tick grids: {a} vs {b} ticks per slot")]
    MismatchedTickParams { a: u64, b: u64 },
}

/// How to sample the offset space `[0, gcd(P_a, P_b))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Sample exactly one offset per constancy interval (exact, default).
    Critical,
    /// Sample every `step_ticks`-th integer offset. Mostly useful for
    /// cross-checking `Critical` against brute force.
    Exhaustive { step_ticks: u64 },
}

/// Analysis of one sampled offset. `offset` is the number of ticks node `b`
/// is delayed by; the record stands for the `span_ticks` integer offsets
/// `offset, offset+1, …` (all structurally identical in `Critical` mode).
///
/// `first_*` are observed from origin 0 and give the tick by which the
/// first reception of that direction has *completed* (event start + beacon
/// length); `a→b` means `a` talking and `b` listening. `bound_*_slots` are
/// the worst-case-over-origins latencies described at module level; `None`
/// means that direction never receives at this offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OffsetRecord {
    pub offset: Tick,
    pub span_ticks: u64,
    pub first_uni_ab: Option<Tick>,
    pub first_uni_ba: Option<Tick>,
    pub first_bi: Option<Tick>,
    pub bound_ab_slots: Option<u64>,
    pub bound_ba_slots: Option<u64>,
    pub bound_bi_slots: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OffsetSweepResult {
    pub mode: SweepMode,
    pub hyperperiod_ticks: Tick,
    /// Size of the swept offset space: `gcd(P_a, P_b)` ticks.
    pub offset_period_ticks: Tick,
    pub criticals: Vec<Tick>,
    pub records: Vec<OffsetRecord>,
    /// Fraction of offsets at which bidirectional discovery is guaranteed.
    pub coverage: Frac,
    /// Worst bidirectional bound among covered offsets.
    pub worst_covered_slots: Option<u64>,
    /// The unconditional worst case: present only when coverage is 1.
    pub worst_case_slots: Option<u64>,
}

fn check_pair(a: &Schedule, b: &Schedule) -> Result<(), PairError> {
    if a.ticks_per_slot() != b.ticks_per_slot() {
        return Err(PairError::MismatchedTickParams {
            a: a.ticks_per_slot(),
            b: b.ticks_per_slot(),
        });
    }
    Ok(())
}

/// Least common multiple of the two period lengths, in ticks.
pub fn hyperperiod_ticks(a: &Schedule, b: &Schedule) -> Result<Tick, PairError> {
    check_pair(a, b)?;
    Ok(a.period_ticks().lcm(&b.period_ticks()))
}

/// Size of the offset space: `gcd` of the two period lengths, in ticks.
pub fn offset_period_ticks(a: &Schedule, b: &Schedule) -> Result<Tick, PairError> {
    check_pair(a, b)?;
    Ok(a.period_ticks().gcd(&b.period_ticks()))
}

/// All reception-event start ticks in `[0, h)` for one direction, sorted.
fn direction_events(
    talker: &Schedule,
    talker_shift: Tick,
    listener: &Schedule,
    listener_shift: Tick,
    h: Tick,
) -> Vec<Tick> {
    let p_t = talker.period_ticks();
    let len = talker.beacon_ticks_len();
    let copies = h / p_t;
    let mut events = Vec::new();
    for &b in talker.beacon_starts() {
        let base = (b + talker_shift % p_t) % p_t;
        for k in 0..copies {
            let t = base + k * p_t;
            if listener.listens_throughout(listener_shift, t, len) {
                events.push(t);
            }
        }
    }
    events.sort_unstable();
    events
}

/// Largest circular gap between consecutive members of a sorted subset of
/// `[0, h)`; `None` when the set is empty.
fn max_circular_gap(events: &[Tick], h: Tick) -> Option<u64> {
    let (&first, &last) = (events.first()?, events.last()?);
    let mut gap = first + h - last;
    for w in events.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    Some(gap)
}

/// Worst-over-origins latency in slots for an event set with the given gap.
fn gap_to_slots(gap: u64, beacon_len: u64, ticks_per_slot: u64) -> u64 {
    (gap - 1 + beacon_len).div_ceil(ticks_per_slot)
}

fn modg(x: i128, g: i128) -> Tick {
    x.rem_euclid(g) as Tick
}

/// The critical offsets of the pair: the sorted left endpoints, within
/// `[0, gcd(P_a, P_b))`, of the intervals on which both directions' event
/// structures are constant. Always non-empty (a structure with no boundaries
/// yields the single interval starting at 0).
pub fn critical_offsets(a: &Schedule, b: &Schedule) -> Result<Vec<Tick>, PairError> {
    let g = offset_period_ticks(a, b)? as i128;
    let mut crits: Vec<Tick> = Vec::new();

    // Direction a→b: a talks, b listens. The listener is the delayed node,
    // so an occurrence of beacon β sits in window w (length L) for
    // δ ∈ [β − w − (L − B), β − w] modulo g; membership flips at the left
    // endpoint and one past the right endpoint.
    if !b.always_listening() {
        let beacon = a.beacon_ticks_len() as i128;
        for &bs in a.beacon_starts() {
            for w in b.windows() {
                let l = w.len_ticks as i128;
                if l < beacon {
                    continue;
                }
                let anchor = bs as i128 - w.start_tick as i128;
                crits.push(modg(anchor - (l - beacon), g));
                crits.push(modg(anchor + 1, g));
            }
        }
    }

    // Direction b→a: b talks (delayed by δ), a listens. Beacon β sits in
    // window w for δ ∈ [w − β, w − β + (L − B)].
    if !a.always_listening() {
        let beacon = b.beacon_ticks_len() as i128;
        for &bs in b.beacon_starts() {
            for w in a.windows() {
                let l = w.len_ticks as i128;
                if l < beacon {
                    continue;
                }
                let anchor = w.start_tick as i128 - bs as i128;
                crits.push(modg(anchor, g));
                crits.push(modg(anchor + (l - beacon) + 1, g));
            }
        }
    }

    crits.sort_unstable();
    crits.dedup();
    if crits.is_empty() {
        crits.push(0);
    }
    Ok(crits)
}

/// Tick by which the first `talker → listener` reception has completed,
/// observed from origin 0 with the given phase shifts; `None` if the
/// direction never receives.
pub fn first_unidirectional(
    talker: &Schedule,
    talker_shift: Tick,
    listener: &Schedule,
    listener_shift: Tick,
) -> Result<Option<Tick>, PairError> {
    let h = hyperperiod_ticks(talker, listener)?;
    let events = direction_events(talker, talker_shift, listener, listener_shift, h);
    Ok(events.first().map(|&e| e + talker.beacon_ticks_len()))
}

/// Tick by which both directions have completed a first reception, observed
/// from origin 0; `None` if either direction never receives.
pub fn first_bidirectional(
    a: &Schedule,
    a_shift: Tick,
    b: &Schedule,
    b_shift: Tick,
) -> Result<Option<Tick>, PairError> {
    let ab = first_unidirectional(a, a_shift, b, b_shift)?;
    let ba = first_unidirectional(b, b_shift, a, a_shift)?;
    Ok(match (ab, ba) {
        (Some(x), Some(y)) => Some(x.max(y)),
        _ => None,
    })
}

/// Sweep the offset space and bound the worst-case discovery latency.
///
/// `a` stays at phase 0; `b` is delayed by each sampled offset. See the
/// module docs for the exact semantics of the per-offset records and the
/// aggregate fields.
pub fn worst_case_latency(
    a: &Schedule,
    b: &Schedule,
    mode: SweepMode,
) -> Result<OffsetSweepResult, PairError> {
    let h = hyperperiod_ticks(a, b)?;
    let g = offset_period_ticks(a, b)?;
    let s = a.ticks_per_slot();
    let criticals = critical_offsets(a, b)?;

    // (offset, span) pairs partitioning [0, g).
    let samples: Vec<(Tick, u64)> = match mode {
        SweepMode::Critical => {
            let mut v = Vec::with_capacity(criticals.len());
            for (i, &c) in criticals.iter().enumerate() {
                let next = criticals.get(i + 1).copied().unwrap_or(criticals[0] + g);
                v.push((c, next - c));
            }
            v
        }
        SweepMode::Exhaustive { step_ticks } => {
            let step = step_ticks.max(1);
            (0..g)
                .step_by(step as usize)
                .map(|off| (off, step.min(g - off)))
                .collect()
        }
    };

    let mut records = Vec::with_capacity(samples.len());
    let mut covered: u64 = 0;
    let mut worst_covered: Option<u64> = None;
    for (offset, span) in samples {
        let e_ab = direction_events(a, 0, b, offset, h);
        let e_ba = direction_events(b, offset, a, 0, h);
        let bound_ab = max_circular_gap(&e_ab, h)
            .map(|gap| gap_to_slots(gap, a.beacon_ticks_len(), s));
        let bound_ba = max_circular_gap(&e_ba, h)
            .map(|gap| gap_to_slots(gap, b.beacon_ticks_len(), s));
        let first_uni_ab = e_ab.first().map(|&e| e + a.beacon_ticks_len());
        let first_uni_ba = e_ba.first().map(|&e| e + b.beacon_ticks_len());
        let (first_bi, bound_bi) = match (first_uni_ab, first_uni_ba, bound_ab, bound_ba) {
            (Some(x), Some(y), Some(p), Some(q)) => (Some(x.max(y)), Some(p.max(q))),
            _ => (None, None),
        };
        if let Some(bound) = bound_bi {
            covered += span;
            worst_covered = Some(worst_covered.map_or(bound, |w: u64| w.max(bound)));
        }
        records.push(OffsetRecord {
            offset,
            span_ticks: span,
            first_uni_ab,
            first_uni_ba,
            first_bi,
            bound_ab_slots: bound_ab,
            bound_ba_slots: bound_ba,
            bound_bi_slots: bound_bi,
        });
    }

    let total: u64 = records.iter().map(|r| r.span_ticks).sum();
    let coverage = frac(covered as i128, total as i128);
    let worst_case_slots = if coverage == frac(1, 1) { worst_covered } else { None };

    Ok(OffsetSweepResult {
        mode,
        hyperperiod_ticks: h,
        offset_period_ticks: g,
        criticals,
        records,
        coverage,
        worst_covered_slots: worst_covered,
        worst_case_slots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Disco with primes 3 and 5: listen and beacon in every slot whose index
    /// is a multiple of either prime.
    fn disco35() -> Schedule {
        let slots = [0u64, 3, 5, 6, 9, 10, 12];
        Schedule::new(15, 10, 1, slots, slots.map(|x| x * 10)).unwrap()
    }

    fn snihao(n: u64) -> Schedule {
        Schedule::new(n, 10, 1, [0], (0..n).map(|i| i * 10)).unwrap()
    }

    fn gnihao(m: u64, n: u64) -> Schedule {
        Schedule::new(m * n, 10, 1, 0..m, (0..n).map(|i| i * m * 10)).unwrap()
    }

    #[test]
    fn disco_pair_first_reception() {
        let a = disco35();
        let b = disco35();
        // Delay the listener by 7 ticks: the first beacon of `a` that lands
        // fully inside a window of `b` starts at tick 60 — the 7th slot.
        assert_eq!(first_unidirectional(&a, 0, &b, 7), Ok(Some(61)));
        assert_eq!(61u64.div_ceil(10), 7);
        // At offset 0 the schedules coincide: the slot-0 beacon is heard
        // immediately in both directions.
        assert_eq!(first_bidirectional(&a, 0, &b, 0), Ok(Some(1)));
    }

    #[test]
    fn criticals_of_one_window_one_beacon() {
        // `a` only listens (slot 0 of 2), `b` only talks (one beacon at 0).
        let a = Schedule::new(2, 10, 1, [0], []).unwrap();
        let b = Schedule::new(2, 10, 1, [], [0]).unwrap();
        // The beacon sits inside the window for δ ∈ [0, 9]; the structure
        // changes at 0 (enter) and 10 (leave).
        assert_eq!(critical_offsets(&a, &b), Ok(vec![0, 10]));
        let sweep = worst_case_latency(&a, &b, SweepMode::Critical).unwrap();
        // Unidirectional-only pair: bidirectional coverage is zero, but the
        // b→a bound exists on [0, 10).
        assert_eq!(sweep.coverage, frac(0, 1));
        assert_eq!(sweep.records[0].bound_ba_slots, Some(2));
        assert_eq!(sweep.records[0].bound_ab_slots, None);
        assert_eq!(sweep.records[1].bound_ba_slots, None);
    }

    #[test]
    fn snihao_worst_case_is_n_slots() {
        let a = snihao(4);
        let b = snihao(4);
        let sweep = worst_case_latency(&a, &b, SweepMode::Critical).unwrap();
        assert_eq!(sweep.coverage, frac(1, 1));
        assert_eq!(sweep.worst_case_slots, Some(4));
    }

    #[test]
    fn gnihao_self_pair_worst_case_is_mn_slots() {
        let sweep =
            worst_case_latency(&gnihao(4, 3), &gnihao(4, 3), SweepMode::Critical).unwrap();
        assert_eq!(sweep.coverage, frac(1, 1));
        assert_eq!(sweep.worst_case_slots, Some(12));
    }

    #[test]
    fn gnihao_mixed_periods_worst_case() {
        // Same listen length m = 4, talk periods 3 and 6: the slower talker
        // bounds the pair at lcm(12, 24) = 24 slots.
        let sweep =
            worst_case_latency(&gnihao(4, 3), &gnihao(4, 6), SweepMode::Critical).unwrap();
        assert_eq!(sweep.hyperperiod_ticks, 240);
        assert_eq!(sweep.coverage, frac(1, 1));
        assert_eq!(sweep.worst_case_slots, Some(24));
    }

    #[test]
    fn exhaustive_sweep_agrees_with_critical() {
        let a = disco35();
        let b = snihao(5);
        let crit = worst_case_latency(&a, &b, SweepMode::Critical).unwrap();
        let exh =
            worst_case_latency(&a, &b, SweepMode::Exhaustive { step_ticks: 1 }).unwrap();
        assert_eq!(crit.coverage, exh.coverage);
        assert_eq!(crit.worst_case_slots, exh.worst_case_slots);
        assert_eq!(crit.worst_covered_slots, exh.worst_covered_slots);
    }

    #[test]
    fn whole_slot_rotation_leaves_the_sweep_invariant() {
        let a = disco35();
        let b = disco35();
        let base = worst_case_latency(&a, &b, SweepMode::Critical).unwrap();
        for rot in [1u64, 4, 7] {
            let sweep =
                worst_case_latency(&a.rotated_slots(rot), &b, SweepMode::Critical).unwrap();
            assert_eq!(sweep.coverage, base.coverage);
            assert_eq!(sweep.worst_case_slots, base.worst_case_slots);
        }
    }

    #[test]
    fn always_listening_pair_is_immediate() {
        let a = Schedule::new(3, 10, 1, 0..3, [0]).unwrap();
        let sweep = worst_case_latency(&a, &a.clone(), SweepMode::Critical).unwrap();
        assert_eq!(sweep.coverage, frac(1, 1));
        // One beacon per 3-slot period, heard always: worst gap is 30 ticks.
        assert_eq!(sweep.worst_case_slots, Some(3));
    }

    #[test]
    fn mismatched_tick_grids_are_rejected() {
        let a = Schedule::new(2, 10, 1, [0], [0]).unwrap();
        let b = Schedule::new(2, 20, 1, [0], [0]).unwrap();
        assert_eq!(
            hyperperiod_ticks(&a, &b),
            Err(PairError::MismatchedTickParams { a: 10, b: 20 })
        );
    }
}
