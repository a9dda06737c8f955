//! Row types for every CSV the CLI emits, in their fixed column order.
//! Each row type reads back into exactly the value that was written.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use wsntrack_core::analytics::CostReport;
use wsntrack_core::protocols::GroupAssignment;
use wsntrack_core::topology::NodeRole;
use wsntrack_core::{MetricsReport, NodeId, Strategy};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub round: u32,
    pub strategy: Strategy,
    pub local_msgs: u64,
    pub group_msgs: u64,
    pub global_msgs: u64,
    pub sink_msgs: u64,
    pub drops: u64,
    pub energy_consumed_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub node_id: u32,
    pub class: NodeRole,
    pub tx_count: u64,
    pub rx_count: u64,
    #[serde(rename = "consumed_mAh")]
    pub consumed_mah: f64,
    #[serde(rename = "remaining_mAh")]
    pub remaining_mah: f64,
    pub est_lifetime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationRow {
    pub round: u32,
    pub target_id: u32,
    /// `FAIL` when the target could not be localized.
    #[serde(serialize_with = "ser_error", deserialize_with = "de_error")]
    pub error_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    pub round: u32,
    pub leader_id: u32,
    /// Space separated; empty for a singleton group.
    #[serde(serialize_with = "ser_ids", deserialize_with = "de_ids")]
    pub member_ids: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub seed: u64,
    pub strategy: Strategy,
    pub sink_msgs: u64,
    pub target_to_target_msgs: u64,
    pub ref_battery_life_s: f64,
    pub target_battery_life_s: f64,
    #[serde(rename = "ref_consumed_mAh")]
    pub ref_consumed_mah: f64,
    #[serde(rename = "target_consumed_mAh")]
    pub target_consumed_mah: f64,
    pub drops: u64,
    pub trajectory_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub variable: String,
    pub setting: f64,
    pub strategy: Strategy,
    pub metric: String,
    pub value: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictRow {
    pub variable: String,
    pub setting: f64,
    pub mode: String,
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
    pub n4: f64,
    pub e_cn: f64,
    pub e_dc: f64,
    pub e_imp: f64,
    pub e_cn_hop_exact: f64,
    pub e_dc_hop_exact: f64,
    pub e_imp_hop_exact: f64,
}

pub fn metrics_rows(report: &MetricsReport) -> Vec<MetricsRow> {
    report
        .rounds
        .iter()
        .map(|r| MetricsRow {
            round: r.round,
            strategy: report.strategy,
            local_msgs: r.local_msgs,
            group_msgs: r.group_msgs,
            global_msgs: r.global_msgs,
            sink_msgs: r.sink_msgs,
            drops: r.drops,
            energy_consumed_total: r.energy_consumed_mah,
        })
        .collect()
}

pub fn energy_rows(report: &MetricsReport) -> Vec<EnergyRow> {
    report
        .energy
        .iter()
        .map(|e| EnergyRow {
            node_id: e.node_id.0,
            class: e.role,
            tx_count: e.tx_count,
            rx_count: e.rx_count,
            consumed_mah: e.consumed_mah,
            remaining_mah: e.remaining_mah,
            est_lifetime_s: e.est_lifetime_s,
        })
        .collect()
}

pub fn localization_rows(report: &MetricsReport) -> Vec<LocalizationRow> {
    report
        .localization
        .iter()
        .map(|l| LocalizationRow {
            round: l.round,
            target_id: l.target.0,
            error_m: l.error_m,
        })
        .collect()
}

pub fn group_rows(assignments: &[GroupAssignment]) -> Vec<GroupRow> {
    assignments
        .iter()
        .flat_map(|a| {
            a.groups.iter().map(move |g| GroupRow {
                round: a.round,
                leader_id: g.leader.0,
                member_ids: g.members.iter().map(|m: &NodeId| m.0).collect(),
            })
        })
        .collect()
}

pub fn compare_row(report: &MetricsReport) -> CompareRow {
    CompareRow {
        seed: report.seed,
        strategy: report.strategy,
        sink_msgs: report.total_sink_msgs(),
        target_to_target_msgs: report.target_to_target_msgs(),
        ref_battery_life_s: report.mean_battery_life_s(NodeRole::Reference),
        target_battery_life_s: report.mean_battery_life_s(NodeRole::Target),
        ref_consumed_mah: report.mean_consumed_mah(NodeRole::Reference),
        target_consumed_mah: report.mean_consumed_mah(NodeRole::Target),
        drops: report.total_drops(),
        trajectory_digest: format!("{:016x}", report.trajectory_digest),
    }
}

/// The compare metrics of one run, in long form.
pub fn sweep_rows(variable: &str, setting: f64, report: &MetricsReport) -> Vec<SweepRow> {
    let c = compare_row(report);
    [
        ("sink_msgs", c.sink_msgs as f64),
        ("target_to_target_msgs", c.target_to_target_msgs as f64),
        ("ref_battery_life_s", c.ref_battery_life_s),
        ("target_battery_life_s", c.target_battery_life_s),
        ("ref_consumed_mAh", c.ref_consumed_mah),
        ("target_consumed_mAh", c.target_consumed_mah),
    ]
    .into_iter()
    .map(|(metric, value)| SweepRow {
        variable: variable.to_owned(),
        setting,
        strategy: c.strategy,
        metric: metric.to_owned(),
        value,
        seed: c.seed,
    })
    .collect()
}

pub fn predict_row(variable: &str, setting: f64, report: &CostReport) -> PredictRow {
    PredictRow {
        variable: variable.to_owned(),
        setting,
        mode: report.mode.as_str().to_owned(),
        n1: report.n1,
        n2: report.n2,
        n3: report.n3,
        n4: report.n4,
        e_cn: report.as_written.centralized,
        e_dc: report.as_written.decentralized,
        e_imp: report.as_written.improved,
        e_cn_hop_exact: report.hop_exact.centralized,
        e_dc_hop_exact: report.hop_exact.decentralized,
        e_imp_hop_exact: report.hop_exact.improved,
    }
}

/// A CSV row type with a fixed column order.
pub trait Table: Serialize + DeserializeOwned {
    const HEADER: &'static [&'static str];
}

macro_rules! table {
    ($($ty:ty => [$($col:literal),* $(,)?];)*) => {
        $(impl Table for $ty {
            const HEADER: &'static [&'static str] = &[$($col),*];
        })*
    };
}

table! {
    MetricsRow => ["round", "strategy", "local_msgs", "group_msgs", "global_msgs", "sink_msgs",
        "drops", "energy_consumed_total"];
    EnergyRow => ["node_id", "class", "tx_count", "rx_count", "consumed_mAh", "remaining_mAh",
        "est_lifetime_s"];
    LocalizationRow => ["round", "target_id", "error_m"];
    GroupRow => ["round", "leader_id", "member_ids"];
    CompareRow => ["seed", "strategy", "sink_msgs", "target_to_target_msgs",
        "ref_battery_life_s", "target_battery_life_s", "ref_consumed_mAh",
        "target_consumed_mAh", "drops", "trajectory_digest"];
    SweepRow => ["variable", "setting", "strategy", "metric", "value", "seed"];
    PredictRow => ["variable", "setting", "mode", "n1", "n2", "n3", "n4", "e_cn", "e_dc",
        "e_imp", "e_cn_hop_exact", "e_dc_hop_exact", "e_imp_hop_exact"];
}

/// Header line first, even when there are no rows.
pub fn write_rows<W: Write, T: Table>(out: W, rows: &[T]) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(T::HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read, T: Table>(input: R) -> Result<Vec<T>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn write_csv<T: Table>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(write_rows(BufWriter::new(file), rows)?)
}

pub fn read_csv<T: Table>(path: &Path) -> Result<Vec<T>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(read_rows(file)?)
}

fn ser_error<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(e) => s.serialize_f64(*e),
        None => s.serialize_str("FAIL"),
    }
}

fn de_error<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    let s = String::deserialize(d)?;
    if s == "FAIL" {
        return Ok(None);
    }
    s.parse().map(Some).map_err(serde::de::Error::custom)
}

fn ser_ids<S: Serializer>(ids: &[u32], s: S) -> Result<S::Ok, S::Error> {
    let text: Vec<String> = ids.iter().map(u32::to_string).collect();
    s.serialize_str(&text.join(" "))
}

fn de_ids<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u32>, D::Error> {
    String::deserialize(d)?
        .split_whitespace()
        .map(|t| t.parse().map_err(serde::de::Error::custom))
        .collect()
}
