//! Brute-force optimality oracle for Listen-Listen slot schedules.
//!
//! In a Listen-Listen design every awake slot both listens and talks, and two
//! nodes discover each other exactly when their awake slots coincide. For a
//! period of `period` slots and a worst-case slot offset `d`, a schedule with
//! awake set `A ⊆ Z_period` meets every offset iff `|A ∩ (A + d)| ≥ overlaps`
//! for all `d`. The oracle finds the smallest such `|A|` by exhaustive
//! search over bitmask subsets, which is what makes it a trustworthy
//! reference point for the Talk-Listen constructions: any Listen-Listen
//! schedule, no matter how clever, needs at least `k_min` awake slots.
//!
//! Rotation invariance lets the search fix slot 0 as awake; the witness
//! reported is the lexicographically smallest one at the minimal size.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("period must be at least 1 slot")]
    ZeroPeriod,
    #[error("period {period} exceeds the search cap of {cap} slots")]
    PeriodTooLarge { period: u64, cap: u64 },
    #[error("overlaps must be at least 1")]
    ZeroOverlaps,
    #[error("{overlaps} overlaps cannot fit in a period of {period} slots")]
    OverlapsExceedPeriod { overlaps: u64, period: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub period: u64,
    pub overlaps: u64,
    /// Minimal number of awake slots.
    pub k_min: u64,
    /// Lexicographically smallest witness of size `k_min` (starts with 0).
    pub witness: Vec<u64>,
    /// Subsets tested before the witness was found.
    pub subsets_checked: u64,
}

/// Default period cap: combinatorial blow-up guard for the u64-mask search.
pub const DEFAULT_PERIOD_CAP: u64 = 40;

/// Smallest awake-set size (and a witness) so that every circular offset of
/// the period shares at least `overlaps` awake slots with the unshifted set.
pub fn search_min_active(
    period: u64,
    overlaps: u64,
    cap: Option<u64>,
) -> Result<OracleResult, OracleError> {
    let cap = cap.unwrap_or(DEFAULT_PERIOD_CAP).min(63);
    if period == 0 {
        return Err(OracleError::ZeroPeriod);
    }
    if period > cap {
        return Err(OracleError::PeriodTooLarge { period, cap });
    }
    if overlaps == 0 {
        return Err(OracleError::ZeroOverlaps);
    }
    if overlaps > period {
        return Err(OracleError::OverlapsExceedPeriod { overlaps, period });
    }

    let t = period as u32;
    let full: u64 = if t == 64 { !0 } else { (1u64 << t) - 1 };
    let rot = |mask: u64, d: u32| -> u64 {
        if d == 0 {
            mask
        } else {
            ((mask << d) | (mask >> (t - d))) & full
        }
    };
    let ok = |mask: u64| -> bool {
        (1..t).all(|d| (mask & rot(mask, d)).count_ones() as u64 >= overlaps)
    };

    // Two lower bounds: the zero offset shares all k slots (k ≥ overlaps),
    // and summing shared counts over all offsets gives k² ≥ overlaps·period.
    let k_start = overlaps.max((overlaps * period).isqrt_ceil());

    let mut checked: u64 = 0;
    let result = |k: u64, mask: u64, checked: u64| OracleResult {
        period,
        overlaps,
        k_min: k,
        witness: (0..t as u64).filter(|&s| mask >> s & 1 == 1).collect(),
        subsets_checked: checked,
    };

    for k in k_start..=period {
        // Enumerate k-subsets containing slot 0 in lexicographic order:
        // choose the remaining r = k−1 members from 1..period.
        let r = (k - 1) as usize;
        if r == 0 {
            checked += 1;
            if ok(1) {
                return Ok(result(k, 1, checked));
            }
            continue;
        }
        let mut combo: Vec<u32> = (1..=r as u32).collect();
        'subsets: loop {
            let mask = combo.iter().fold(1u64, |m, &s| m | (1u64 << s));
            checked += 1;
            if ok(mask) {
                return Ok(result(k, mask, checked));
            }
            // Next combination: bump the rightmost member that has room
            // (position i may hold at most t − r + i), reset the tail.
            let mut i = r;
            while i > 0 {
                i -= 1;
                if combo[i] < t - (r - i) as u32 {
                    combo[i] += 1;
                    for j in i + 1..r {
                        combo[j] = combo[j - 1] + 1;
                    }
                    continue 'subsets;
                }
            }
            break;
        }
    }
    unreachable!("the full set of {period} slots always satisfies the constraint")
}

trait IsqrtCeil {
    fn isqrt_ceil(self) -> u64;
}

impl IsqrtCeil for u64 {
    /// Smallest k with k² ≥ self.
    fn isqrt_ceil(self) -> u64 {
        let r = self.isqrt();
        if r * r == self {
            r
        } else {
            r + 1
        }
    }
}
