//! Independent brute-force reference for pairwise discovery.
//!
//! Deliberately reimplements reception from first principles — per-tick
//! awake bitmaps, literal beacon interval containment, and a linear scan
//! over every origin tick — sharing no code with the library's window
//! arithmetic, so the two can check each other.

/// A schedule described by raw lists, independent of `nihao_core::Schedule`.
#[derive(Debug, Clone)]
pub struct RawSched {
    pub period_slots: u64,
    pub ticks_per_slot: u64,
    pub beacon_len: u64,
    pub listen_slots: Vec<u64>,
    pub beacon_starts: Vec<u64>,
}

impl RawSched {
    pub fn period_ticks(&self) -> u64 {
        self.period_slots * self.ticks_per_slot
    }

    /// Is the radio listening at tick `t` of the unshifted period?
    fn awake(&self, t: u64) -> bool {
        self.listen_slots.contains(&(t / self.ticks_per_slot))
    }

    /// Does a node shifted by `shift` listen during every tick of the
    /// absolute interval `[start, start + len)`?
    fn hears(&self, shift: u64, start: u64, len: u64) -> bool {
        let p = self.period_ticks();
        (start..start + len).all(|t| self.awake((t % p + p - shift % p) % p))
    }
}

/// Start ticks, within `[0, horizon)`, of every beacon of `talker`
/// (shifted by `talker_shift`) that `listener` (shifted by
/// `listener_shift`) hears in full.
fn heard_starts(
    talker: &RawSched,
    talker_shift: u64,
    listener: &RawSched,
    listener_shift: u64,
    horizon: u64,
) -> Vec<u64> {
    let p = talker.period_ticks();
    let mut starts = Vec::new();
    for &b in &talker.beacon_starts {
        let mut t = (b + talker_shift) % p;
        while t < horizon {
            if listener.hears(listener_shift, t, talker.beacon_len) {
                starts.push(t);
            }
            t += p;
        }
    }
    starts.sort_unstable();
    starts
}

/// One direction's ground truth at one offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirTruth {
    /// Completion tick of the first reception seen from origin 0.
    pub first: Option<u64>,
    /// Worst over every origin tick of the period: latency in slots.
    pub bound_slots: Option<u64>,
}

fn direction_truth(
    talker: &RawSched,
    talker_shift: u64,
    listener: &RawSched,
    listener_shift: u64,
    horizon: u64,
) -> DirTruth {
    let starts = heard_starts(talker, talker_shift, listener, listener_shift, horizon);
    if starts.is_empty() {
        return DirTruth { first: None, bound_slots: None };
    }
    let blen = talker.beacon_len;
    // Walk every origin tick and take the literal wait until the next
    // fully-heard beacon completes. Events repeat each hyperperiod, so
    // origins beyond `horizon` repeat too.
    let mut worst = 0u64;
    let mut idx = 0usize;
    for x in 0..horizon {
        while idx < starts.len() && starts[idx] < x {
            idx += 1;
        }
        let next = if idx < starts.len() { starts[idx] } else { starts[0] + horizon };
        worst = worst.max(next - x + blen);
    }
    DirTruth {
        first: Some(starts[0] + blen),
        bound_slots: Some(worst.div_ceil(listener_ticks_per_slot(talker, listener))),
    }
}

fn listener_ticks_per_slot(a: &RawSched, b: &RawSched) -> u64 {
    assert_eq!(a.ticks_per_slot, b.ticks_per_slot, "pairs share a tick grid");
    a.ticks_per_slot
}

/// Ground truth for a pair at offset `delta` (node `a` at phase 0, node
/// `b` delayed): both directions plus the combined bidirectional answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairTruth {
    pub ab: DirTruth,
    pub ba: DirTruth,
    pub first_bi: Option<u64>,
    pub bound_bi_slots: Option<u64>,
}

pub fn pair_truth(a: &RawSched, b: &RawSched, delta: u64) -> PairTruth {
    let horizon = lcm(a.period_ticks(), b.period_ticks());
    let ab = direction_truth(a, 0, b, delta, horizon);
    let ba = direction_truth(b, delta, a, 0, horizon);
    let (first_bi, bound_bi_slots) = match (ab, ba) {
        (
            DirTruth { first: Some(x), bound_slots: Some(p) },
            DirTruth { first: Some(y), bound_slots: Some(q) },
        ) => (Some(x.max(y)), Some(p.max(q))),
        _ => (None, None),
    };
    PairTruth { ab, ba, first_bi, bound_bi_slots }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}
