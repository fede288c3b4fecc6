//! JSON file formats.
//!
//! * Graph: `{"m": 16, "edges": [[0, 1, 1.0], ...]}` with `i < j`, `w > 0`.
//! * Block spec: `{"n": 5, "blocks": [1.0, 0.0]}`.
//! * Partition: `{"cells": [[0], [3, 5]], "residual": [1, 2]}`.
//! * Schedule: `{"segments": [{"graph": "q5.json" | {...}, "duration": 0.78}]}`,
//!   where string graph references resolve relative to the schedule file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{EvolutionSchedule, Segment};
use crate::graph::Graph;
use crate::switching::{BlockSpec, Partition};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub m: usize,
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<usize, String>>,
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> Self {
        Self {
            m: g.order(),
            edges: g.edges(),
            labels: g.labels().cloned(),
        }
    }
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(j: GraphJson) -> Result<Self> {
        let g = Graph::from_edges(j.m, &j.edges)?;
        match j.labels {
            Some(labels) => g.with_labels(labels),
            None => Ok(g),
        }
    }
}

pub fn graph_to_json(g: &Graph) -> String {
    serde_json::to_string(&GraphJson::from(g)).expect("graph serializes")
}

pub fn graph_from_json(text: &str) -> Result<Graph> {
    serde_json::from_str::<GraphJson>(text)?.try_into()
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    graph_from_json(&fs::read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpecJson {
    pub n: usize,
    pub blocks: Vec<f64>,
}

pub fn block_spec_from_json(text: &str) -> Result<BlockSpec> {
    let j: BlockSpecJson = serde_json::from_str(text)?;
    BlockSpec::from_weights(j.n, &j.blocks)
}

pub fn block_spec_to_json(spec: &BlockSpec) -> String {
    serde_json::to_string(&BlockSpecJson {
        n: spec.dimension(),
        blocks: spec.weights(),
    })
    .expect("block spec serializes")
}

pub fn partition_from_json(text: &str) -> Result<Partition> {
    Ok(serde_json::from_str(text)?)
}

pub fn partition_to_json(p: &Partition) -> String {
    serde_json::to_string(p).expect("partition serializes")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphRef {
    Path(String),
    Inline(GraphJson),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentJson {
    pub graph: GraphRef,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleJson {
    pub segments: Vec<SegmentJson>,
}

/// Parse a schedule; path references are resolved against `base_dir`.
pub fn schedule_from_json(text: &str, base_dir: &Path) -> Result<EvolutionSchedule> {
    let j: ScheduleJson = serde_json::from_str(text)?;
    let segments = j
        .segments
        .into_iter()
        .map(|seg| {
            let graph = match seg.graph {
                GraphRef::Inline(g) => g.try_into()?,
                GraphRef::Path(p) => {
                    let path = PathBuf::from(&p);
                    read_graph(&if path.is_absolute() { path } else { base_dir.join(path) })?
                }
            };
            Ok(Segment { graph, duration: seg.duration })
        })
        .collect::<Result<Vec<_>>>()?;
    EvolutionSchedule::new(segments)
}

pub fn read_schedule(path: &Path) -> Result<EvolutionSchedule> {
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    schedule_from_json(&fs::read_to_string(path)?, base)
}

/// Schedule with every graph inlined.
pub fn schedule_to_json(s: &EvolutionSchedule) -> String {
    let j = ScheduleJson {
        segments: s
            .segments()
            .iter()
            .map(|seg| SegmentJson {
                graph: GraphRef::Inline(GraphJson::from(&seg.graph)),
                duration: seg.duration,
            })
            .collect(),
    };
    serde_json::to_string(&j).expect("schedule serializes")
}
