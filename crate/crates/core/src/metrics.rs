//! The metric suite: duty cycle, latency, and the derived trade-off figures.
//!
//! For a schedule with period `T` slots, `N_L` listen slots, `N_B` beacons
//! per period and beacon fraction `α` (beacon ticks / slot ticks):
//!
//! ```text
//! DC  = radio-on ticks / period ticks     duty cycle
//! L   = worst-case latency in slots
//! Λ   = DC · L                            energy–latency product
//! λ   = Λ / √L                            normalized energy–latency
//! η   = N_B / T                           beaconing rate
//! COR = α · η                             channel occupancy ratio
//! γ   = N_B / N_L                         talk/listen ratio
//! A   = Λ · η                             balance figure
//! ```
//!
//! Reports come in two flavours: `closed_form_row` reproduces the published
//! analytical row for a construction (idealized counts, exact rationals),
//! while `measured_report` computes every quantity from an actual schedule
//! and an exact offset sweep. The identities above hold exactly for
//! measured reports on protocol-generated schedules; closed-form rows keep
//! the published idealizations (notably Disco's balanced-pair λ = 2, A = 4,
//! which assume p1 ≈ p2).

use crate::discovery::OffsetSweepResult;
use crate::protocols::ProtocolParams;
use crate::schedule::Schedule;
use crate::{frac, Frac};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("the plan needs at least one duty-cycle target")]
    EmptyTargets,
    #[error("duty-cycle target {0} is not in (0, 1)")]
    BadTarget(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricsSource {
    ClosedForm,
    Measured,
}

/// Parameters accepted by [`closed_form_row`]: every generatable protocol
/// plus two analytical references that exist only as table rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormParams {
    Protocol(ProtocolParams),
    /// Birthday-paradox reference design.
    BlindDate { s: u64 },
    /// The optimal Listen-Listen schedule at duty cycle 1/n.
    LLOptimal { n: u64 },
}

/// One metric row. Counts are rational because closed-form rows use
/// idealized (possibly non-integer) values such as N_B = 3p/2. `latency`,
/// `big_lambda`, `lambda` and `balance` are `None` when the schedule does
/// not guarantee discovery at every offset; `gamma` is `None` for schedules
/// that never listen.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub source: MetricsSource,
    pub label: String,
    pub alpha: Frac,
    pub period_slots: Frac,
    pub n_listen: Frac,
    pub n_beacon: Frac,
    pub n_common: Frac,
    pub dc: Frac,
    pub latency_slots: Option<Frac>,
    pub big_lambda: Option<Frac>,
    pub lambda: Option<f64>,
    pub eta: Frac,
    pub cor: Frac,
    pub gamma: Option<Frac>,
    pub balance: Option<Frac>,
}

fn sqrt_f64(x: Frac) -> f64 {
    x.to_f64().expect("metric magnitudes fit f64").sqrt()
}

/// The published analytical row for a construction, as exact rationals
/// (λ alone is a float). `alpha` only affects the Nihao family.
pub fn closed_form_row(params: ClosedFormParams, alpha: Frac) -> MetricsReport {
    let f = |x: u64| frac(x as i128, 1);
    // (label, T, N_L, N_B, DC, L, η, γ)
    let (label, t, n_l, n_b, dc, lat): (String, Frac, Frac, Frac, Frac, Frac);
    match params {
        ClosedFormParams::Protocol(p) => {
            label = p.shorthand();
            match p {
                ProtocolParams::Quorum { n } => {
                    t = f(n * n);
                    n_l = f(2 * n);
                    n_b = f(2 * n);
                    dc = frac(2, n as i128);
                    lat = f(n * n);
                }
                ProtocolParams::Disco { p1, p2 } => {
                    t = f(p1 * p2);
                    n_l = f(p1 + p2);
                    n_b = f(p1 + p2);
                    dc = frac(1, p1 as i128) + frac(1, p2 as i128);
                    lat = f(p1 * p2);
                }
                ProtocolParams::UConnect { p } => {
                    t = f(p * p);
                    n_l = frac(3 * p as i128, 2);
                    n_b = frac(3 * p as i128, 2);
                    dc = frac(3, 2 * p as i128);
                    lat = f(p * p);
                }
                ProtocolParams::SearchLight { t: tt, striped: false } => {
                    t = frac((tt * tt) as i128, 2);
                    n_l = f(tt);
                    n_b = f(tt);
                    dc = frac(2, tt as i128);
                    lat = frac((tt * tt) as i128, 2);
                }
                ProtocolParams::SearchLight { t: tt, striped: true } => {
                    t = frac((tt * tt) as i128, 4);
                    n_l = frac(tt as i128, 2);
                    n_b = f(tt);
                    dc = frac(2, tt as i128);
                    lat = frac((tt * tt) as i128, 4);
                }
                ProtocolParams::SNihao { n } => {
                    t = f(n);
                    n_l = Frac::one();
                    n_b = f(n);
                    dc = frac(2, n as i128);
                    lat = f(n);
                }
                ProtocolParams::GNihao { m, n } => {
                    t = f(m * n);
                    n_l = f(m);
                    n_b = f(n);
                    dc = (f(m) + alpha * f(n)) / f(m * n);
                    lat = f(m * n);
                }
                ProtocolParams::BNihao { n } => {
                    t = f(n * n);
                    n_l = f(n);
                    n_b = f(n);
                    dc = (Frac::one() + alpha) / f(n);
                    lat = f(n * n);
                }
            }
        }
        ClosedFormParams::BlindDate { s } => {
            label = format!("blinddate:{s}");
            t = frac(5 * (s * s) as i128, 2);
            n_l = frac(3 * s as i128, 2);
            n_b = f(6 * s);
            dc = frac(3, 5 * s as i128);
            lat = frac(5 * (s * s) as i128, 2);
        }
        ClosedFormParams::LLOptimal { n } => {
            label = format!("lloptimal:{n}");
            t = f(n * n);
            n_l = f(n);
            n_b = f(n);
            dc = frac(1, n as i128);
            lat = f(n * n);
        }
    }

    let eta = n_b / t;
    let big_lambda = dc * lat;
    let gamma = n_b / n_l;
    // Classical designs beacon inside their listen slots; the Nihao family
    // only overlaps in slot 0.
    let n_c = match params {
        ClosedFormParams::Protocol(
            ProtocolParams::SNihao { .. }
            | ProtocolParams::GNihao { .. }
            | ProtocolParams::BNihao { .. },
        ) => Frac::one(),
        _ => n_b,
    };
    // Disco's published row assumes a balanced pair; its λ and A cells are
    // the balanced values, not the identity applied to an asymmetric pair.
    let (lambda, balance) = if matches!(
        params,
        ClosedFormParams::Protocol(ProtocolParams::Disco { .. })
    ) {
        (2.0, frac(4, 1))
    } else {
        (big_lambda.to_f64().unwrap() / sqrt_f64(lat), big_lambda * eta)
    };

    MetricsReport {
        source: MetricsSource::ClosedForm,
        label,
        alpha,
        period_slots: t,
        n_listen: n_l,
        n_beacon: n_b,
        n_common: n_c,
        dc,
        latency_slots: Some(lat),
        big_lambda: Some(big_lambda),
        lambda: Some(lambda),
        eta,
        cor: alpha * eta,
        gamma: Some(gamma),
        balance: Some(balance),
    }
}

/// Exact metrics for a concrete schedule. Pass the schedule's self-pair (or
/// representative-pair) sweep to fill in the latency-derived fields; with
/// `None`, or with a sweep whose coverage is below 1, those fields stay
/// `None`.
pub fn measured_report(schedule: &Schedule, sweep: Option<&OffsetSweepResult>) -> MetricsReport {
    let label = schedule.provenance().unwrap_or("custom").to_string();
    let alpha = frac(
        schedule.beacon_ticks_len() as i128,
        schedule.ticks_per_slot() as i128,
    );
    let t = frac(schedule.period_slots() as i128, 1);
    let n_l = frac(schedule.n_listen() as i128, 1);
    let n_b = frac(schedule.n_beacon() as i128, 1);
    let dc = frac(
        schedule.radio_on_ticks() as i128,
        schedule.period_ticks() as i128,
    );
    let eta = n_b / t;

    let latency: Option<Frac> =
        sweep.and_then(|s| s.worst_case_slots).map(|slots| frac(slots as i128, 1));
    let big_lambda = latency.map(|l| dc * l);
    let lambda = latency.map(|l| big_lambda.unwrap().to_f64().unwrap() / sqrt_f64(l));
    let balance = big_lambda.map(|bl| bl * eta);

    MetricsReport {
        source: MetricsSource::Measured,
        label,
        alpha,
        period_slots: t,
        n_listen: n_l,
        n_beacon: n_b,
        n_common: frac(schedule.n_common() as i128, 1),
        dc,
        latency_slots: latency,
        big_lambda,
        lambda,
        eta,
        cor: alpha * eta,
        gamma: (!n_l.is_zero()).then(|| n_b / n_l),
        balance,
    }
}

/// A multi-class G-Nihao deployment plan: one shared listen length `m`, one
/// talk period `n_i` per duty-cycle class.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub m: u64,
    pub n: Vec<u64>,
    /// Per-class talk/listen ratio n_i/m.
    pub gammas: Vec<Frac>,
    /// Π γ_i = Π n_i / m^d; the chosen m makes this as close to 1 as the
    /// integer lattice allows.
    pub gamma_product: Frac,
    pub dc_requested: Vec<Frac>,
    /// Exact duty cycle (m + α·n_i)/(m·n_i) delivered to each class.
    pub dc_achieved: Vec<Frac>,
    /// Exact worst-case latency of the worst pair, in slots: every
    /// direction's receptions recur once per listener period, so a pair of
    /// classes (i, j) is bounded by m·max(n_i, n_j) slots.
    pub latency_bound_slots: u64,
}

/// Plan an asymmetric G-Nihao deployment: every class listens for the same
/// `m` consecutive slots (so any class hears any other), talk periods are
/// set per class from the duty-cycle targets (`n_i` ≈ 1/dc_i), and `m` is
/// chosen so the talk/listen ratios balance — the product of the γ_i is
/// pushed to 1, i.e. `m` tracks the geometric mean of the `n_i`.
pub fn plan_asymmetric(dc_targets: &[Frac], alpha: Frac) -> Result<Plan, MetricsError> {
    if dc_targets.is_empty() {
        return Err(MetricsError::EmptyTargets);
    }
    for &dc in dc_targets {
        if dc <= Frac::zero() || dc >= Frac::one() {
            return Err(MetricsError::BadTarget(format!("{dc}")));
        }
    }
    let n: Vec<u64> = dc_targets
        .iter()
        .map(|&dc| (Frac::one() / dc).round().to_integer().max(1) as u64)
        .collect();
    let d = n.len() as u32;
    let product: i128 = n.iter().map(|&x| x as i128).product();

    // m near the geometric mean of the n_i; candidates m0 − 1, m0, m0 + 1
    // compared by the exact imbalance |Π n_i / m^d − 1|, ties to smaller m.
    let m0 = (product as f64).powf(1.0 / d as f64).round() as i128;
    let mut best: Option<(Frac, i128)> = None;
    for m in [m0 - 1, m0, m0 + 1] {
        if m < 1 {
            continue;
        }
        let imbalance = (frac(product, m.pow(d)) - Frac::one()).abs();
        let better = match &best {
            None => true,
            Some((b, bm)) => imbalance < *b || (imbalance == *b && m < *bm),
        };
        if better {
            best = Some((imbalance, m));
        }
    }
    let (_, m) = best.expect("at least one positive candidate");
    let m = m as u64;

    let gammas: Vec<Frac> = n.iter().map(|&ni| frac(ni as i128, m as i128)).collect();
    let dc_achieved: Vec<Frac> = n
        .iter()
        .map(|&ni| {
            (frac(m as i128, 1) + alpha * frac(ni as i128, 1)) / frac((m * ni) as i128, 1)
        })
        .collect();
    let n_max = *n.iter().max().unwrap();

    Ok(Plan {
        m,
        gamma_product: frac(product, (m as i128).pow(d)),
        n,
        gammas,
        dc_requested: dc_targets.to_vec(),
        dc_achieved,
        latency_bound_slots: m * n_max,
    })
}
