//! Tick-exact Talk-Listen schedules.
//!
//! A schedule has a period of `period_slots` slots, each `ticks_per_slot`
//! ticks long. Listening is per whole slot; beacons are `beacon_ticks_len`
//! ticks long and may start at any tick. Both patterns repeat with the period.
//!
//! Reception rule: a beacon is received iff its entire transmission interval
//! lies inside one listener awake window, where an awake window is a maximal
//! run of consecutive listen slots (runs merge across the period boundary).

use crate::{Slot, Tick};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("period must be at least one slot")]
    ZeroPeriod,
    #[error("ticks_per_slot must be at least 1")]
    ZeroTicksPerSlot,
    #[error("beacon length {beacon_ticks_len} must be in 1..ticks_per_slot ({ticks_per_slot})")]
    BadBeaconLen {
        beacon_ticks_len: u64,
        ticks_per_slot: u64,
    },
    #[error("listen slot {slot} is outside the period of {period_slots} slots")]
    ListenSlotOutOfRange { slot: Slot, period_slots: u64 },
    #[error("duplicate listen slot {0}")]
    DuplicateListenSlot(Slot),
    #[error("beacon start {tick} is outside the period of {period_ticks} ticks")]
    BeaconOutOfRange { tick: Tick, period_ticks: Tick },
    #[error("duplicate beacon start {0}")]
    DuplicateBeaconStart(Tick),
    #[error("beacons starting at {a} and {b} overlap")]
    OverlappingBeacons { a: Tick, b: Tick },
}

/// A maximal awake window: `len_ticks` consecutive listening ticks starting at
/// `start_tick`, taken modulo the period (a window may wrap past the period
/// end when the run of listen slots does).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub start_tick: Tick,
    pub len_ticks: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    period_slots: u64,
    ticks_per_slot: u64,
    beacon_ticks_len: u64,
    listen_slots: Vec<Slot>,
    beacon_starts: Vec<Tick>,
    windows: Vec<Window>,
    always_listening: bool,
    provenance: Option<String>,
}

impl Schedule {
    /// Validates and builds a schedule. Listen slots and beacon starts may be
    /// given in any order; duplicates are rejected, as are beacon intervals
    /// that overlap modulo the period. Empty listen or beacon sets are legal
    /// (such a node is simply not discovery-capable in that direction).
    pub fn new(
        period_slots: u64,
        ticks_per_slot: u64,
        beacon_ticks_len: u64,
        listen_slots: impl IntoIterator<Item = Slot>,
        beacon_starts: impl IntoIterator<Item = Tick>,
    ) -> Result<Self, ScheduleError> {
        if period_slots == 0 {
            return Err(ScheduleError::ZeroPeriod);
        }
        if ticks_per_slot == 0 {
            return Err(ScheduleError::ZeroTicksPerSlot);
        }
        if beacon_ticks_len == 0 || beacon_ticks_len >= ticks_per_slot {
            return Err(ScheduleError::BadBeaconLen {
                beacon_ticks_len,
                ticks_per_slot,
            });
        }
        let period_ticks = period_slots * ticks_per_slot;

        let mut listen_slots: Vec<Slot> = listen_slots.into_iter().collect();
        listen_slots.sort_unstable();
        for pair in listen_slots.windows(2) {
            if pair[0] == pair[1] {
                return Err(ScheduleError::DuplicateListenSlot(pair[0]));
            }
        }
        if let Some(&last) = listen_slots.last() {
            if last >= period_slots {
                return Err(ScheduleError::ListenSlotOutOfRange {
                    slot: last,
                    period_slots,
                });
            }
        }

        let mut beacon_starts: Vec<Tick> = beacon_starts.into_iter().collect();
        beacon_starts.sort_unstable();
        for pair in beacon_starts.windows(2) {
            if pair[0] == pair[1] {
                return Err(ScheduleError::DuplicateBeaconStart(pair[0]));
            }
            if pair[1] < pair[0] + beacon_ticks_len {
                return Err(ScheduleError::OverlappingBeacons {
                    a: pair[0],
                    b: pair[1],
                });
            }
        }
        if let Some(&last) = beacon_starts.last() {
            if last >= period_ticks {
                return Err(ScheduleError::BeaconOutOfRange {
                    tick: last,
                    period_ticks,
                });
            }
            // Circular overlap between the last interval and the first one.
            if beacon_starts.len() > 1 {
                let first = beacon_starts[0];
                if last + beacon_ticks_len > period_ticks + first {
                    return Err(ScheduleError::OverlappingBeacons { a: last, b: first });
                }
            }
        }

        let (windows, always_listening) =
            merge_windows(&listen_slots, period_slots, ticks_per_slot);

        Ok(Schedule {
            period_slots,
            ticks_per_slot,
            beacon_ticks_len,
            listen_slots,
            beacon_starts,
            windows,
            always_listening,
            provenance: None,
        })
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = Some(provenance.into());
        self
    }

    pub fn period_slots(&self) -> u64 {
        self.period_slots
    }

    pub fn ticks_per_slot(&self) -> u64 {
        self.ticks_per_slot
    }

    pub fn beacon_ticks_len(&self) -> u64 {
        self.beacon_ticks_len
    }

    pub fn period_ticks(&self) -> Tick {
        self.period_slots * self.ticks_per_slot
    }

    pub fn listen_slots(&self) -> &[Slot] {
        &self.listen_slots
    }

    pub fn beacon_starts(&self) -> &[Tick] {
        &self.beacon_starts
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    /// Merged awake windows, sorted by start tick.
    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    /// True when every slot is a listen slot (the radio never sleeps).
    pub fn always_listening(&self) -> bool {
        self.always_listening
    }

    /// ψ_L: does slot `slot` (reduced modulo the period) listen?
    pub fn psi_listen(&self, slot: Slot) -> bool {
        self.listen_slots.binary_search(&(slot % self.period_slots)).is_ok()
    }

    /// ψ_B: does slot `slot` (reduced modulo the period) contain a beacon start?
    pub fn psi_beacon(&self, slot: Slot) -> bool {
        let s = slot % self.period_slots;
        let lo = s * self.ticks_per_slot;
        let hi = lo + self.ticks_per_slot;
        let idx = self.beacon_starts.partition_point(|&b| b < lo);
        self.beacon_starts.get(idx).is_some_and(|&b| b < hi)
    }

    /// Number of listen slots per period (N_L).
    pub fn n_listen(&self) -> u64 {
        self.listen_slots.len() as u64
    }

    /// Number of beacons per period (N_B).
    pub fn n_beacon(&self) -> u64 {
        self.beacon_starts.len() as u64
    }

    /// Number of beacons whose start lies in a listen slot (N_c). Counting per
    /// beacon rather than per slot keeps the duty-cycle identity exact when a
    /// slot carries two beacons (start + end mode).
    pub fn n_common(&self) -> u64 {
        self.beacon_starts
            .iter()
            .filter(|&&b| self.psi_listen(b / self.ticks_per_slot))
            .count() as u64
    }

    /// Exact radio-on ticks per period: whole listen slots plus every beacon
    /// tick that falls outside a listen slot.
    pub fn radio_on_ticks(&self) -> u64 {
        let s = self.ticks_per_slot;
        let mut on = self.n_listen() * s;
        for &b in &self.beacon_starts {
            let slot = b / s;
            let in_first = (s - b % s).min(self.beacon_ticks_len);
            let in_second = self.beacon_ticks_len - in_first;
            if !self.psi_listen(slot) {
                on += in_first;
            }
            if in_second > 0 && !self.psi_listen(slot + 1) {
                on += in_second;
            }
        }
        on
    }

    /// Can this node hear others / be heard?
    pub fn is_listener(&self) -> bool {
        !self.listen_slots.is_empty()
    }

    pub fn is_talker(&self) -> bool {
        !self.beacon_starts.is_empty()
    }

    /// The schedule rotated forward by `slots` whole slots (listen pattern and
    /// beacons alike). Rotation is restricted to whole slots because listening
    /// is slot-aligned by construction.
    pub fn rotated_slots(&self, slots: u64) -> Schedule {
        let t = self.period_slots;
        let ticks = (slots % t) * self.ticks_per_slot;
        let p = self.period_ticks();
        let mut rotated = Schedule::new(
            self.period_slots,
            self.ticks_per_slot,
            self.beacon_ticks_len,
            self.listen_slots.iter().map(|&x| (x + slots) % t),
            self.beacon_starts.iter().map(|&b| (b + ticks) % p),
        )
        .expect("rotation preserves validity");
        rotated.provenance = self.provenance.clone();
        rotated
    }

    /// Is the listener's radio on throughout `[tick, tick + len_ticks)` when
    /// this schedule is phase-shifted by `shift` ticks? Equivalently: does the
    /// interval lie inside one (periodically repeated) awake window? The
    /// interval length is the caller's (usually the talker's beacon length).
    pub fn listens_throughout(&self, shift: Tick, tick: Tick, len_ticks: u64) -> bool {
        if self.always_listening {
            return !self.listen_slots.is_empty();
        }
        if self.windows.is_empty() || len_ticks == 0 {
            return false;
        }
        let p = self.period_ticks();
        let r = (tick + p - shift % p) % p;
        let fit = |w: &Window| -> bool {
            let d = (r + p - w.start_tick % p) % p;
            w.len_ticks >= len_ticks && d <= w.len_ticks - len_ticks
        };
        // Candidates: the latest window starting at or before r, and the last
        // window (whose wrap copy may cover small r).
        let idx = self.windows.partition_point(|w| w.start_tick <= r);
        (idx > 0 && fit(&self.windows[idx - 1])) || fit(self.windows.last().unwrap())
    }
}

/// Merge maximal runs of consecutive listen slots (circularly) into windows.
fn merge_windows(listen_slots: &[Slot], period_slots: u64, ticks_per_slot: u64) -> (Vec<Window>, bool) {
    if listen_slots.is_empty() {
        return (Vec::new(), false);
    }
    if listen_slots.len() as u64 == period_slots {
        return (
            vec![Window {
                start_tick: 0,
                len_ticks: period_slots * ticks_per_slot,
            }],
            true,
        );
    }
    let mut runs: Vec<(Slot, u64)> = Vec::new(); // (first slot, run length)
    for &s in listen_slots {
        match runs.last_mut() {
            Some((start, len)) if *start + *len == s => *len += 1,
            _ => runs.push((s, 1)),
        }
    }
    // Circular merge: a run ending at the last slot continues into slot 0.
    if runs.len() > 1 {
        let (first_start, first_len) = runs[0];
        let &(last_start, last_len) = runs.last().unwrap();
        if first_start == 0 && last_start + last_len == period_slots {
            runs[0] = (last_start, last_len + first_len);
            runs.pop();
        }
    }
    let mut windows: Vec<Window> = runs
        .into_iter()
        .map(|(start, len)| Window {
            start_tick: start * ticks_per_slot,
            len_ticks: len * ticks_per_slot,
        })
        .collect();
    windows.sort_by_key(|w| w.start_tick);
    (windows, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snihao4() -> Schedule {
        // One listen slot, a beacon at the start of each of 4 slots.
        Schedule::new(4, 10, 1, [0], [0, 10, 20, 30]).unwrap()
    }

    #[test]
    fn snihao4_is_valid() {
        let s = snihao4();
        assert_eq!(s.period_ticks(), 40);
        assert_eq!(s.n_listen(), 1);
        assert_eq!(s.n_beacon(), 4);
        assert_eq!(s.n_common(), 1);
    }

    #[test]
    fn duplicate_beacon_start_rejected() {
        let err = Schedule::new(4, 10, 1, [0], [0, 10, 10]).unwrap_err();
        assert_eq!(err, ScheduleError::DuplicateBeaconStart(10));
    }

    #[test]
    fn overlapping_beacons_rejected() {
        let err = Schedule::new(2, 10, 4, [0], [0, 2]).unwrap_err();
        assert_eq!(err, ScheduleError::OverlappingBeacons { a: 0, b: 2 });
        // Wrap-around overlap: [18, 22) mod 20 intersects [0, 4).
        let err = Schedule::new(2, 10, 4, [0], [0, 18]).unwrap_err();
        assert_eq!(err, ScheduleError::OverlappingBeacons { a: 18, b: 0 });
    }

    #[test]
    fn beacon_must_be_shorter_than_slot() {
        assert!(Schedule::new(2, 10, 10, [0], [0]).is_err());
        assert!(Schedule::new(2, 10, 0, [0], [0]).is_err());
    }

    #[test]
    fn gnihao_4_3_shape() {
        // Listen slots 0..4, beacons at the start of slots 0, 4, 8; period 12.
        let s = Schedule::new(12, 10, 1, 0..4, [0, 40, 80]).unwrap();
        assert_eq!(s.listen_slots(), &[0, 1, 2, 3]);
        assert_eq!(s.beacon_starts(), &[0, 40, 80]);
        assert_eq!(s.windows(), &[Window { start_tick: 0, len_ticks: 40 }]);
    }

    #[test]
    fn psi_functions() {
        let s = snihao4();
        assert!(s.psi_listen(0));
        assert!(!s.psi_listen(1));
        assert!(s.psi_listen(4)); // periodic reduction
        assert!(s.psi_beacon(0));
        assert!(s.psi_beacon(3));
        assert!(s.psi_beacon(5));

        // ψ_L of a (4,3) G-Nihao: slots below m listen, slot m does not.
        let g = Schedule::new(12, 10, 1, 0..4, [0, 40, 80]).unwrap();
        assert!(g.psi_listen(3));
        assert!(!g.psi_listen(4));
    }

    #[test]
    fn windows_merge_circularly() {
        let s = Schedule::new(6, 10, 1, [0, 1, 5], [20]).unwrap();
        assert_eq!(
            s.windows(),
            &[Window { start_tick: 50, len_ticks: 30 }]
        );
        assert!(!s.always_listening());
        let all = Schedule::new(3, 10, 1, 0..3, [0]).unwrap();
        assert!(all.always_listening());
    }

    #[test]
    fn listens_throughout_handles_wrap() {
        let s = Schedule::new(6, 10, 1, [0, 1, 5], [20]).unwrap();
        assert!(s.listens_throughout(0, 50, 1));
        assert!(s.listens_throughout(0, 0, 1)); // inside the wrapped tail
        assert!(s.listens_throughout(0, 19, 1));
        assert!(!s.listens_throughout(0, 20, 1));
        // Shift the whole schedule by 10 ticks: the window moves with it.
        assert!(s.listens_throughout(10, 29, 1));
        assert!(!s.listens_throughout(10, 30, 1));
        // The interval must fit entirely: [19, 21) pokes out of the window.
        assert!(s.listens_throughout(0, 18, 2));
        assert!(!s.listens_throughout(0, 19, 2));
        // A window shorter than the interval never fits it.
        let short = Schedule::new(6, 10, 1, [2], []).unwrap();
        assert!(!short.listens_throughout(0, 20, 11));
        assert!(short.listens_throughout(0, 20, 10));
    }

    #[test]
    fn radio_on_ticks_counts_out_of_window_beacons() {
        // G-Nihao(4,3): 4 listen slots, beacon in slot 0 is inside a listen
        // slot, beacons in slots 4 and 8 are not.
        let g = Schedule::new(12, 10, 2, 0..4, [0, 40, 80]).unwrap();
        assert_eq!(g.radio_on_ticks(), 4 * 10 + 2 * 2);
        // A beacon straddling a listen/sleep boundary contributes only its
        // sleeping part: [38, 42) with slot 3 listened, slot 4 not.
        let s = Schedule::new(12, 10, 4, 0..4, [38]).unwrap();
        assert_eq!(s.radio_on_ticks(), 4 * 10 + 2);
    }

    #[test]
    fn rotation_preserves_structure() {
        let s = snihao4();
        let r = s.rotated_slots(3);
        assert_eq!(r.listen_slots(), &[3]);
        assert_eq!(r.beacon_starts(), &[0, 10, 20, 30]);
        assert_eq!(r.n_common(), 1);
    }

    #[test]
    fn empty_sets_are_legal_but_flagged() {
        let listener = Schedule::new(4, 10, 1, [0], []).unwrap();
        assert!(listener.is_listener() && !listener.is_talker());
        let talker = Schedule::new(4, 10, 1, [], [0]).unwrap();
        assert!(!talker.is_listener() && talker.is_talker());
    }
}
