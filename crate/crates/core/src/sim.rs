//! Deterministic multi-node discrete-event simulator.
//!
//! Every node runs its schedule phase-shifted by a start offset (drawn
//! uniformly over its own period from a per-node seeded RNG, or supplied
//! explicitly). The run enumerates every beacon transmission inside the
//! configured horizon, optionally destroys overlapping transmissions (one
//! shared broadcast domain), applies the listening-throughout reception
//! rule per listener — optionally suppressing reception while the listener
//! itself transmits — and reduces receptions to first-discovery times.
//!
//! Results are bit-for-bit reproducible for a given config: offsets depend
//! only on `(master_seed, node id)`, event order is canonical, and the
//! worker parallelism level never changes the output, only the wall time.

use crate::schedule::Schedule;
use crate::{frac, Frac, Tick};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("the population is empty")]
    NoNodes,
    #[error("duplicate node id {0}")]
    DuplicateNodeId(u32),
    #[error("node {node} uses {got} ticks per slot, the testbed uses {want}")]
    MismatchedTickGrid { node: u32, got: u64, want: u64 },
    #[error("{want} nodes but {got} explicit offsets")]
    OffsetCount { want: usize, got: usize },
    #[error("duration must be at least one slot")]
    ZeroDuration,
}

/// How start offsets are assigned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OffsetRule {
    /// Offset of node `id` is drawn from ChaCha20 seeded with
    /// `(master_seed, id)`, uniform over the node's own period.
    Seeded,
    /// Explicit offsets in node-list order (ticks, taken mod the period).
    Explicit(Vec<Tick>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub id: u32,
    pub group: String,
    pub schedule: Schedule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub ticks_per_slot: u64,
    pub duration_slots: u64,
    pub master_seed: u64,
    /// Destroy every transmission that overlaps another in time.
    pub collision_model: bool,
    /// A node cannot receive while it is itself transmitting.
    pub half_duplex: bool,
    /// Worker threads; 0 uses the process default. Never affects results.
    pub parallelism: usize,
    pub offsets: OffsetRule,
    pub nodes: Vec<NodeSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventKind {
    /// `listener` has heard `talker` for the first time.
    Unidirectional,
    /// Both directions of the pair are complete (ids sorted ascending).
    Bidirectional,
}

/// A discovery milestone. `tick` is the completion tick: the first tick by
/// which the beacon sealing the discovery has fully arrived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscoveryEvent {
    pub tick: Tick,
    pub kind: EventKind,
    pub listener: u32,
    pub talker: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscoveryLog {
    /// (node id, start offset in ticks).
    pub node_offsets: Vec<(u32, Tick)>,
    pub transmissions: u64,
    /// Transmissions destroyed by overlap (0 when the collision model is off).
    pub collisions: u64,
    /// Milestones sorted by (tick, kind, listener, talker).
    pub events: Vec<DiscoveryEvent>,
    /// First completed reception per ordered (talker, listener) pair.
    pub first_uni: BTreeMap<(u32, u32), Tick>,
    /// First mutual completion per unordered pair (smaller id first).
    pub first_bi: BTreeMap<(u32, u32), Tick>,
}

/// A batch of identical nodes, for building populations succinctly.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub group: String,
    pub schedule: Schedule,
    pub count: u32,
}

/// Expand populations into a node list with sequential ids from 0.
pub fn build_nodes(populations: &[Population]) -> Vec<NodeSpec> {
    let mut nodes = Vec::new();
    let mut id = 0u32;
    for p in populations {
        for _ in 0..p.count {
            nodes.push(NodeSpec {
                id,
                group: p.group.clone(),
                schedule: p.schedule.clone(),
            });
            id += 1;
        }
    }
    nodes
}

/// The per-node start offset drawn for `Seeded` mode.
pub fn seeded_offset(master_seed: u64, node_id: u32, period_ticks: Tick) -> Tick {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..12].copy_from_slice(&node_id.to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(seed);
    rng.gen_range(0..period_ticks)
}

struct Tx {
    start: Tick,
    len: u64,
    node: usize, // index into cfg.nodes
    destroyed: bool,
}

/// Run the testbed to the configured horizon.
pub fn run_testbed(cfg: &SimConfig) -> Result<DiscoveryLog, SimError> {
    if cfg.nodes.is_empty() {
        return Err(SimError::NoNodes);
    }
    if cfg.duration_slots == 0 {
        return Err(SimError::ZeroDuration);
    }
    let mut seen = std::collections::BTreeSet::new();
    for n in &cfg.nodes {
        if !seen.insert(n.id) {
            return Err(SimError::DuplicateNodeId(n.id));
        }
        if n.schedule.ticks_per_slot() != cfg.ticks_per_slot {
            return Err(SimError::MismatchedTickGrid {
                node: n.id,
                got: n.schedule.ticks_per_slot(),
                want: cfg.ticks_per_slot,
            });
        }
    }
    let offsets: Vec<Tick> = match &cfg.offsets {
        OffsetRule::Seeded => cfg
            .nodes
            .iter()
            .map(|n| seeded_offset(cfg.master_seed, n.id, n.schedule.period_ticks()))
            .collect(),
        OffsetRule::Explicit(list) => {
            if list.len() != cfg.nodes.len() {
                return Err(SimError::OffsetCount {
                    want: cfg.nodes.len(),
                    got: list.len(),
                });
            }
            list.iter()
                .zip(&cfg.nodes)
                .map(|(&o, n)| o % n.schedule.period_ticks())
                .collect()
        }
    };

    let horizon = cfg.duration_slots * cfg.ticks_per_slot;

    // Every transmission with start < horizon, in canonical order.
    let mut txs: Vec<Tx> = Vec::new();
    for (idx, node) in cfg.nodes.iter().enumerate() {
        let p = node.schedule.period_ticks();
        let len = node.schedule.beacon_ticks_len();
        let off = offsets[idx];
        for &b in node.schedule.beacon_starts() {
            let mut t = (b + off) % p;
            while t < horizon {
                txs.push(Tx { start: t, len, node: idx, destroyed: false });
                t += p;
            }
        }
    }
    txs.sort_by_key(|tx| (tx.start, tx.node));

    // Collision marking: a sweep over the start-sorted list destroys every
    // transmission that overlaps another one in time.
    let mut collisions = 0u64;
    if cfg.collision_model {
        for i in 0..txs.len() {
            let end_i = txs[i].start + txs[i].len;
            for j in i + 1..txs.len() {
                if txs[j].start >= end_i {
                    break;
                }
                txs[i].destroyed = true;
                txs[j].destroyed = true;
            }
        }
        collisions = txs.iter().filter(|t| t.destroyed).count() as u64;
    }

    // Reception fan-out, parallel over transmissions. The indexed collect
    // keeps the canonical order regardless of the worker count.
    let nodes = &cfg.nodes;
    let offsets_ref = &offsets;
    let fan_out = |tx: &Tx| -> Vec<(Tick, u32, u32)> {
        if tx.destroyed {
            return Vec::new();
        }
        let talker = &nodes[tx.node];
        let mut heard = Vec::new();
        for (lidx, listener) in nodes.iter().enumerate() {
            if lidx == tx.node {
                continue;
            }
            if !listener
                .schedule
                .listens_throughout(offsets_ref[lidx], tx.start, tx.len)
            {
                continue;
            }
            if cfg.half_duplex
                && transmitting_during(&listener.schedule, offsets_ref[lidx], tx.start, tx.len)
            {
                continue;
            }
            heard.push((tx.start + tx.len, listener.id, talker.id));
        }
        heard
    };
    let receptions: Vec<(Tick, u32, u32)> = if cfg.parallelism == 1 {
        txs.iter().flat_map(&fan_out).collect()
    } else {
        let run = || txs.par_iter().flat_map_iter(&fan_out).collect();
        if cfg.parallelism == 0 {
            run()
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.parallelism)
                .build()
                .expect("worker pool")
                .install(run)
        }
    };

    // Sequential reduction to first-discovery times and milestone events.
    let mut first_uni: BTreeMap<(u32, u32), Tick> = BTreeMap::new();
    let mut first_bi: BTreeMap<(u32, u32), Tick> = BTreeMap::new();
    let mut events: Vec<DiscoveryEvent> = Vec::new();
    for (done, listener, talker) in receptions {
        if first_uni.contains_key(&(talker, listener)) {
            continue;
        }
        first_uni.insert((talker, listener), done);
        events.push(DiscoveryEvent {
            tick: done,
            kind: EventKind::Unidirectional,
            listener,
            talker,
        });
        if let Some(&other) = first_uni.get(&(listener, talker)) {
            let pair = (talker.min(listener), talker.max(listener));
            let at = done.max(other);
            first_bi.insert(pair, at);
            events.push(DiscoveryEvent {
                tick: at,
                kind: EventKind::Bidirectional,
                listener: pair.0,
                talker: pair.1,
            });
        }
    }
    events.sort_by_key(|e| (e.tick, e.kind, e.listener, e.talker));

    Ok(DiscoveryLog {
        node_offsets: cfg.nodes.iter().map(|n| n.id).zip(offsets).collect(),
        transmissions: txs.len() as u64,
        collisions,
        events,
        first_uni,
        first_bi,
    })
}

/// Is `schedule` (shifted by `shift`) transmitting during any part of
/// `[tick, tick + len)`? Used for the half-duplex reception rule.
fn transmitting_during(schedule: &Schedule, shift: Tick, tick: Tick, len: u64) -> bool {
    let p = schedule.period_ticks();
    let own = schedule.beacon_ticks_len();
    let r = (tick + p - shift % p) % p;
    schedule.beacon_starts().iter().any(|&b| {
        // Distance from the beacon start to the interval start, mod p.
        let d = (r + p - b) % p;
        d < own || d + len > p
    })
}

/// An empirical CDF over pair latencies, in slots. `points` are
/// (latency_slots, cumulative fraction) steps; the curve tops out below 1
/// when some pairs never discovered. Fractions are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct Cdf {
    pub points: Vec<(f64, Frac)>,
    pub pairs_total: u64,
    pub pairs_discovered: u64,
}

impl Cdf {
    /// Fraction of pairs discovered within `slots`.
    pub fn fraction_at(&self, slots: f64) -> Frac {
        let mut best = frac(0, 1);
        for &(x, f) in &self.points {
            if x <= slots {
                best = f;
            } else {
                break;
            }
        }
        best
    }

    /// Smallest latency at which the CDF reaches 1, if it does.
    pub fn completion_slots(&self) -> Option<f64> {
        (self.pairs_discovered == self.pairs_total)
            .then(|| self.points.last().map(|&(x, _)| x))
            .flatten()
    }
}

fn build_cdf(mut weighted: Vec<(f64, u64)>, total: u64) -> Cdf {
    weighted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut points: Vec<(f64, Frac)> = Vec::new();
    let mut cum = 0u64;
    for (x, w) in weighted {
        cum += w;
        match points.last_mut() {
            Some(p) if p.0 == x => p.1 = frac(cum as i128, total as i128),
            _ => points.push((x, frac(cum as i128, total as i128))),
        }
    }
    Cdf {
        points,
        pairs_total: total,
        pairs_discovered: cum,
    }
}

/// CDF of bidirectional discovery latency over node pairs, restricted to
/// pairs with one node in `group_a` and one in `group_b` (same name: pairs
/// within the group). `None` group names mean "all pairs".
pub fn cdf(
    log: &DiscoveryLog,
    cfg: &SimConfig,
    group_a: Option<&str>,
    group_b: Option<&str>,
) -> Cdf {
    let sel = |n: &NodeSpec, g: Option<&str>| g.is_none_or(|name| n.group == name);
    let mut total = 0u64;
    let mut weighted = Vec::new();
    for (i, a) in cfg.nodes.iter().enumerate() {
        for b in &cfg.nodes[i + 1..] {
            let matches = (sel(a, group_a) && sel(b, group_b))
                || (sel(a, group_b) && sel(b, group_a));
            if !matches {
                continue;
            }
            total += 1;
            let pair = (a.id.min(b.id), a.id.max(b.id));
            if let Some(&t) = log.first_bi.get(&pair) {
                weighted.push((t as f64 / cfg.ticks_per_slot as f64, 1));
            }
        }
    }
    build_cdf(weighted, total)
}

/// CDF of the worst-case bidirectional bound over the offset space of a
/// pairwise sweep, weighted by each record's span. Offsets with no
/// bidirectional guarantee keep the curve below 1.
pub fn pair_sweep_cdf(sweep: &crate::discovery::OffsetSweepResult) -> Cdf {
    let total: u64 = sweep.records.iter().map(|r| r.span_ticks).sum();
    let weighted: Vec<(f64, u64)> = sweep
        .records
        .iter()
        .filter_map(|r| r.bound_bi_slots.map(|b| (b as f64, r.span_ticks)))
        .collect();
    build_cdf(weighted, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discovery::{first_bidirectional, worst_case_latency, SweepMode};
    use crate::protocols::{generate, BeaconMode, ProtocolParams};

    fn snihao(n: u64, s: u64) -> Schedule {
        generate(&ProtocolParams::SNihao { n }, BeaconMode::Start, s, 1).unwrap()
    }

    fn config(nodes: Vec<NodeSpec>, s: u64) -> SimConfig {
        SimConfig {
            ticks_per_slot: s,
            duration_slots: 1000,
            master_seed: 1,
            collision_model: false,
            half_duplex: false,
            parallelism: 1,
            offsets: OffsetRule::Seeded,
            nodes,
        }
    }

    fn two_snihao(s: u64) -> Vec<NodeSpec> {
        vec![
            NodeSpec { id: 0, group: "a".into(), schedule: snihao(4, s) },
            NodeSpec { id: 1, group: "a".into(), schedule: snihao(4, s) },
        ]
    }

    #[test]
    fn ideal_channel_matches_the_pairwise_engine() {
        let mut cfg = config(two_snihao(10), 10);
        cfg.offsets = OffsetRule::Explicit(vec![0, 17]);
        let log = run_testbed(&cfg).unwrap();
        let a = snihao(4, 10);
        // The pairwise engine holds node a at 0 and delays node b.
        let expect = first_bidirectional(&a, 0, &a, 17).unwrap().unwrap();
        assert_eq!(log.first_bi.get(&(0, 1)), Some(&expect));
        // Unidirectional events exist for both directions.
        assert!(log.first_uni.contains_key(&(0, 1)));
        assert!(log.first_uni.contains_key(&(1, 0)));
        // And the sim's per-pair latency never beats the exact worst case.
        let sweep = worst_case_latency(&a, &a, SweepMode::Critical).unwrap();
        let worst_ticks = sweep.worst_case_slots.unwrap() * 10;
        assert!(log.first_bi[&(0, 1)] <= worst_ticks);
    }

    #[test]
    fn seeded_offsets_are_reproducible_and_seed_sensitive() {
        let cfg1 = config(two_snihao(10), 10);
        let log1 = run_testbed(&cfg1).unwrap();
        let log2 = run_testbed(&cfg1).unwrap();
        assert_eq!(log1, log2);
        let mut cfg2 = cfg1.clone();
        cfg2.master_seed = 2;
        let log3 = run_testbed(&cfg2).unwrap();
        assert_ne!(log1.node_offsets, log3.node_offsets);
    }

    #[test]
    fn parallelism_never_changes_the_log() {
        let mut nodes = Vec::new();
        for id in 0..6u32 {
            nodes.push(NodeSpec {
                id,
                group: if id % 2 == 0 { "even".into() } else { "odd".into() },
                schedule: snihao(3 + (id as u64 % 3), 10),
            });
        }
        let mut cfg = config(nodes, 10);
        cfg.collision_model = true;
        cfg.half_duplex = true;
        let seq = run_testbed(&cfg).unwrap();
        cfg.parallelism = 4;
        let par = run_testbed(&cfg).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn collisions_destroy_simultaneous_beacons() {
        // Two identical schedules at offset 0: every beacon collides.
        let mut cfg = config(two_snihao(10), 10);
        cfg.offsets = OffsetRule::Explicit(vec![0, 0]);
        cfg.collision_model = true;
        let log = run_testbed(&cfg).unwrap();
        assert_eq!(log.collisions, log.transmissions);
        assert!(log.first_bi.is_empty());
        // Without the collision model the same setup discovers immediately.
        cfg.collision_model = false;
        let log = run_testbed(&cfg).unwrap();
        assert_eq!(log.collisions, 0);
        assert!(log.first_bi.contains_key(&(0, 1)));
    }

    #[test]
    fn half_duplex_suppresses_reception_while_talking() {
        // Node 1 beacons exactly when node 0 beacons (offset 0) and listens
        // in the same slot: full duplex hears, half duplex does not hear at
        // the colliding tick but catches a later beacon.
        let mut cfg = config(two_snihao(10), 10);
        cfg.offsets = OffsetRule::Explicit(vec![0, 0]);
        cfg.half_duplex = true;
        let log = run_testbed(&cfg).unwrap();
        // The slot-0 beacons at tick 0 coincide for both nodes, so neither
        // may receive at tick 0; the next beacon of the talker inside the
        // listener's window is one period later… but those coincide too, so
        // under half duplex this pair never discovers.
        assert!(log.first_bi.is_empty());
        cfg.half_duplex = false;
        let log = run_testbed(&cfg).unwrap();
        assert_eq!(log.first_bi.get(&(0, 1)), Some(&1));
    }

    #[test]
    fn group_filtered_cdf() {
        let nodes = vec![
            NodeSpec { id: 0, group: "g1".into(), schedule: snihao(2, 10) },
            NodeSpec { id: 1, group: "g1".into(), schedule: snihao(2, 10) },
            NodeSpec { id: 2, group: "g2".into(), schedule: snihao(2, 10) },
        ];
        let mut cfg = config(nodes, 10);
        cfg.offsets = OffsetRule::Explicit(vec![0, 5, 13]);
        let log = run_testbed(&cfg).unwrap();
        let all = cdf(&log, &cfg, None, None);
        assert_eq!(all.pairs_total, 3);
        assert_eq!(all.pairs_discovered, 3);
        let within = cdf(&log, &cfg, Some("g1"), Some("g1"));
        assert_eq!(within.pairs_total, 1);
        let cross = cdf(&log, &cfg, Some("g1"), Some("g2"));
        assert_eq!(cross.pairs_total, 2);
        assert_eq!(all.fraction_at(0.0), frac(0, 1));
        assert!(all.completion_slots().is_some());
    }

    #[test]
    fn sweep_cdf_reaches_one_for_guaranteed_protocols() {
        let a = snihao(4, 10);
        let sweep = worst_case_latency(&a, &a, SweepMode::Critical).unwrap();
        let curve = pair_sweep_cdf(&sweep);
        assert_eq!(curve.completion_slots(), Some(4.0));
        assert_eq!(curve.fraction_at(4.0), frac(1, 1));
    }

    #[test]
    fn config_validation() {
        let mut cfg = config(two_snihao(10), 10);
        cfg.nodes[1].id = 0;
        assert_eq!(run_testbed(&cfg), Err(SimError::DuplicateNodeId(0)));
        let mut cfg = config(two_snihao(10), 12);
        cfg.offsets = OffsetRule::Explicit(vec![0]);
        assert!(matches!(
            run_testbed(&cfg),
            Err(SimError::MismatchedTickGrid { .. })
        ));
        let mut cfg = config(two_snihao(10), 10);
        cfg.offsets = OffsetRule::Explicit(vec![0]);
        assert_eq!(run_testbed(&cfg), Err(SimError::OffsetCount { want: 2, got: 1 }));
        assert!(matches!(run_testbed(&config(vec![], 10)), Err(SimError::NoNodes)));
    }

    #[test]
    fn population_expansion() {
        let pops = vec![
            Population { group: "x".into(), schedule: snihao(2, 10), count: 2 },
            Population { group: "y".into(), schedule: snihao(3, 10), count: 1 },
        ];
        let nodes = build_nodes(&pops);
        assert_eq!(nodes.len(), 3);
        assert_eq!(nodes[2].id, 2);
        assert_eq!(nodes[2].group, "y");
    }
}
