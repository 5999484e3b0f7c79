//! Neighbor discovery for duty-cycled radios under the Talk-Listen model.
//!
//! A schedule is a pair of independent periodic binary functions over slots:
//! "listen" keeps the radio on for a whole slot, "beacon" transmits a short
//! packet anywhere inside a slot. Discovery from node A to node B happens when
//! one of B's beacons lies entirely inside one of A's awake windows.
//!
//! The crate provides:
//!
//! * [`schedule`] — the tick-exact schedule representation and validation;
//! * [`discovery`] — pairwise discovery analysis: first-discovery times at a
//!   given offset, the critical-offset enumeration, and exact worst-case
//!   latency sweeps;
//! * [`protocols`] — generators for the Nihao family (S-, G-, B-) and the
//!   classical slotted protocols (Quorum, Disco, U-Connect, SearchLight);
//! * [`metrics`] — duty cycle, latency, energy (Λ, λ, COR, η, γ, A) both
//!   measured from schedules and as closed-form comparison-table rows, plus
//!   the asymmetric-deployment planner;
//! * [`analysis`] — the scalar-generic analytic curves (balance curves,
//!   latency-energy reference bounds);
//! * [`oracle`] — the brute-force Listen-Listen lower-bound searcher;
//! * [`sim`] — a deterministic multi-node discrete-event simulator;
//! * [`format`] — the on-disk schedule document.
//!
//! All schedule arithmetic is exact: time is integer ticks, metric identities
//! are rational. Floating point appears only where a square root does.

pub mod analysis;
pub mod discovery;
pub mod format;
pub mod metrics;
pub mod oracle;
pub mod protocols;
pub mod schedule;
pub mod sim;

/// Absolute or periodic time in ticks. `ticks_per_slot` ticks make one slot.
pub type Tick = u64;

/// Slot index within a schedule period.
pub type Slot = u64;

/// Exact rational used for all scalar metric values that do not involve a
/// square root (duty cycle, Λ, η, COR, γ, A, coverage fractions).
pub type Frac = num_rational::Ratio<i128>;

/// Convenience constructor for [`Frac`].
pub fn frac(num: i128, den: i128) -> Frac {
    Frac::new(num, den)
}

pub use discovery::{
    critical_offsets, first_bidirectional, first_unidirectional, hyperperiod_ticks,
    offset_period_ticks, worst_case_latency, OffsetRecord, OffsetSweepResult, PairError,
    SweepMode,
};
pub use metrics::{
    closed_form_row, measured_report, plan_asymmetric, ClosedFormParams, MetricsError,
    MetricsReport, MetricsSource, Plan,
};
pub use oracle::{search_min_active, OracleError, OracleResult};
pub use protocols::{
    choose_for_dc, generate, parse_shorthand, validate_discovery, BeaconMode, ProtocolError,
    ProtocolKind, ProtocolParams,
};
pub use schedule::{Schedule, ScheduleError, Window};
pub use sim::{
    build_nodes, cdf, pair_sweep_cdf, run_testbed, Cdf, DiscoveryEvent, DiscoveryLog, EventKind,
    NodeSpec, OffsetRule, Population, SimConfig, SimError,
};
