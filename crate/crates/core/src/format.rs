//! TOML round-trips for schedules and testbed configurations.

use crate::protocols::{generate, parse_shorthand, BeaconMode, ProtocolError};
use crate::schedule::{Schedule, ScheduleError};
use crate::sim::{build_nodes, NodeSpec, OffsetRule, Population, SimConfig};
use crate::Tick;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("TOML parse: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("TOML write: {0}")]
    Write(#[from] toml::ser::Error),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("offsets must be \"seeded\" or a list of ticks, got {0:?}")]
    BadOffsets(String),
    #[error("beacons must be \"start\" or \"startend\", got {0:?}")]
    BadBeaconMode(String),
    #[error("population {0:?} needs a protocol or a schedule")]
    EmptyPopulation(String),
}

/// On-disk form of a schedule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub period_slots: u64,
    pub ticks_per_slot: u64,
    pub beacon_ticks_len: u64,
    pub listen_slots: Vec<u64>,
    pub beacon_starts: Vec<Tick>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl From<&Schedule> for ScheduleDoc {
    fn from(s: &Schedule) -> Self {
        ScheduleDoc {
            period_slots: s.period_slots(),
            ticks_per_slot: s.ticks_per_slot(),
            beacon_ticks_len: s.beacon_ticks_len(),
            listen_slots: s.listen_slots().to_vec(),
            beacon_starts: s.beacon_starts().to_vec(),
            provenance: s.provenance().map(str::to_owned),
        }
    }
}

impl TryFrom<ScheduleDoc> for Schedule {
    type Error = ScheduleError;
    fn try_from(d: ScheduleDoc) -> Result<Schedule, ScheduleError> {
        let s = Schedule::new(
            d.period_slots,
            d.ticks_per_slot,
            d.beacon_ticks_len,
            d.listen_slots,
            d.beacon_starts,
        )?;
        Ok(match d.provenance {
            Some(p) => s.with_provenance(p),
            None => s,
        })
    }
}

pub fn schedule_to_toml(s: &Schedule) -> Result<String, FormatError> {
    Ok(toml::to_string_pretty(&ScheduleDoc::from(s))?)
}

pub fn schedule_from_toml(text: &str) -> Result<Schedule, FormatError> {
    let doc: ScheduleDoc = toml::from_str(text)?;
    Ok(Schedule::try_from(doc)?)
}

/// One population entry in a testbed config: either a protocol shorthand
/// (e.g. `"bnihao:21"`) or an inline schedule document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PopulationDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<String>,
    /// "start" (default) or "startend"; only used with `protocol`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beacons: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleDoc>,
    pub count: u32,
}

/// On-disk form of a testbed configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimDoc {
    pub ticks_per_slot: u64,
    pub beacon_ticks_len: u64,
    pub duration_slots: u64,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default)]
    pub collision_model: bool,
    #[serde(default)]
    pub half_duplex: bool,
    #[serde(default)]
    pub parallelism: usize,
    /// "seeded" or an explicit list of start offsets in ticks.
    #[serde(default = "default_offsets")]
    pub offsets: toml::Value,
    #[serde(rename = "population")]
    pub populations: Vec<PopulationDoc>,
}

fn default_seed() -> u64 {
    1
}

fn default_offsets() -> toml::Value {
    toml::Value::String("seeded".into())
}

fn beacon_mode(name: Option<&str>) -> Result<BeaconMode, FormatError> {
    match name {
        None | Some("start") => Ok(BeaconMode::Start),
        Some("startend") => Ok(BeaconMode::StartEnd),
        Some(other) => Err(FormatError::BadBeaconMode(other.to_owned())),
    }
}

impl SimDoc {
    /// Resolve the document into a runnable configuration.
    pub fn build(&self) -> Result<SimConfig, FormatError> {
        let mut populations = Vec::new();
        for p in &self.populations {
            let schedule = match (&p.protocol, &p.schedule) {
                (Some(short), _) => {
                    let params = parse_shorthand(short)?;
                    generate(
                        &params,
                        beacon_mode(p.beacons.as_deref())?,
                        self.ticks_per_slot,
                        self.beacon_ticks_len,
                    )?
                }
                (None, Some(doc)) => Schedule::try_from(doc.clone())?,
                (None, None) => return Err(FormatError::EmptyPopulation(p.name.clone())),
            };
            populations.push(Population {
                group: p.name.clone(),
                schedule,
                count: p.count,
            });
        }
        let offsets = match &self.offsets {
            toml::Value::String(s) if s == "seeded" => OffsetRule::Seeded,
            toml::Value::Array(items) => {
                let mut ticks = Vec::with_capacity(items.len());
                for item in items {
                    match item.as_integer() {
                        Some(v) if v >= 0 => ticks.push(v as Tick),
                        _ => return Err(FormatError::BadOffsets(item.to_string())),
                    }
                }
                OffsetRule::Explicit(ticks)
            }
            other => return Err(FormatError::BadOffsets(other.to_string())),
        };
        Ok(SimConfig {
            ticks_per_slot: self.ticks_per_slot,
            duration_slots: self.duration_slots,
            master_seed: self.master_seed,
            collision_model: self.collision_model,
            half_duplex: self.half_duplex,
            parallelism: self.parallelism,
            offsets,
            nodes: build_nodes(&populations),
        })
    }
}

pub fn sim_from_toml(text: &str) -> Result<SimConfig, FormatError> {
    let doc: SimDoc = toml::from_str(text)?;
    doc.build()
}

/// Node specs for a parsed document, preserving group names (useful for
/// labeling per-group outputs without rebuilding).
pub fn sim_doc_from_toml(text: &str) -> Result<SimDoc, FormatError> {
    Ok(toml::from_str(text)?)
}

/// Group names in population order, deduplicated.
pub fn group_names(nodes: &[NodeSpec]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for n in nodes {
        if !names.iter().any(|g| g == &n.group) {
            names.push(n.group.clone());
        }
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::ProtocolParams;

    #[test]
    fn schedule_round_trip() {
        let s = generate(
            &ProtocolParams::GNihao { m: 4, n: 3 },
            BeaconMode::Start,
            10,
            1,
        )
        .unwrap();
        let text = schedule_to_toml(&s).unwrap();
        let back = schedule_from_toml(&text).unwrap();
        assert_eq!(s, back);
        assert!(text.contains("period_slots = 12"));
        assert!(text.contains("gnihao:4:3"));
    }

    #[test]
    fn invalid_schedule_doc_is_rejected() {
        let text = "period_slots = 4\nticks_per_slot = 10\nbeacon_ticks_len = 1\nlisten_slots = [0, 9]\nbeacon_starts = [0]\n";
        assert!(matches!(
            schedule_from_toml(text),
            Err(FormatError::Schedule(_))
        ));
    }

    #[test]
    fn sim_doc_with_shorthand_populations() {
        let text = r#"
ticks_per_slot = 10
beacon_ticks_len = 1
duration_slots = 500
master_seed = 7
collision_model = true

[[population]]
name = "fast"
protocol = "snihao:4"
count = 2

[[population]]
name = "slow"
protocol = "gnihao:4:6"
beacons = "startend"
count = 1
"#;
        let cfg = sim_from_toml(text).unwrap();
        assert_eq!(cfg.nodes.len(), 3);
        assert_eq!(cfg.master_seed, 7);
        assert!(cfg.collision_model);
        assert!(!cfg.half_duplex);
        assert_eq!(cfg.offsets, OffsetRule::Seeded);
        assert_eq!(cfg.nodes[0].group, "fast");
        assert_eq!(cfg.nodes[2].group, "slow");
        // The startend population carries twice the beacons per awake slot.
        assert_eq!(cfg.nodes[2].schedule.n_beacon(), 12);
        assert_eq!(group_names(&cfg.nodes), vec!["fast", "slow"]);
    }

    #[test]
    fn sim_doc_with_explicit_offsets_and_inline_schedule() {
        let text = r#"
ticks_per_slot = 10
beacon_ticks_len = 1
duration_slots = 100
offsets = [0, 17]

[[population]]
name = "pair"
count = 2

[population.schedule]
period_slots = 4
ticks_per_slot = 10
beacon_ticks_len = 1
listen_slots = [0]
beacon_starts = [0, 10, 20, 30]
"#;
        let cfg = sim_from_toml(text).unwrap();
        assert_eq!(cfg.offsets, OffsetRule::Explicit(vec![0, 17]));
        assert_eq!(cfg.nodes.len(), 2);
        assert_eq!(cfg.nodes[0].schedule.period_slots(), 4);
    }

    #[test]
    fn sim_doc_rejects_bad_offsets_and_modes() {
        let base = "ticks_per_slot = 10\nbeacon_ticks_len = 1\nduration_slots = 10\n";
        let bad_offsets = format!(
            "{base}offsets = \"random\"\n[[population]]\nname = \"x\"\nprotocol = \"snihao:2\"\ncount = 1\n"
        );
        assert!(matches!(
            sim_from_toml(&bad_offsets),
            Err(FormatError::BadOffsets(_))
        ));
        let bad_mode = format!(
            "{base}[[population]]\nname = \"x\"\nprotocol = \"snihao:2\"\nbeacons = \"end\"\ncount = 1\n"
        );
        assert!(matches!(
            sim_from_toml(&bad_mode),
            Err(FormatError::BadBeaconMode(_))
        ));
        let no_schedule = format!("{base}[[population]]\nname = \"x\"\ncount = 1\n");
        assert!(sim_from_toml(&no_schedule).is_err());
    }
}
