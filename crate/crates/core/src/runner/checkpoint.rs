//! Population checkpoints: `graph.json`, one instance file per member and
//! `manifest.json` with the cached per-member values.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::diversity::Population;
use crate::error::{Error, Result};
use crate::instance::{ChanceInstance, FeatureKind};
use crate::io::{read_graph, read_to_string, write_graph, write_string};

use super::config::Pair;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const GRAPH_FILE: &str = "graph.json";

/// JSON numbers cannot be infinite; `+∞` is written as the string `"inf"`.
mod extended_f64 {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {t:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberEntry {
    pub file: String,
    pub feature: f64,
    pub r_prime: f64,
    #[serde(with = "extended_f64")]
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub feature_kind: FeatureKind,
    pub pair: Pair,
    pub threshold: f64,
    pub members: Vec<MemberEntry>,
    #[serde(rename = "D_s")]
    pub d_s: f64,
    pub iteration: u64,
    pub seed: u64,
}

fn member_file(k: usize) -> String {
    format!("member_{k:03}.json")
}

/// Write `population` into `dir`, replacing any previous checkpoint files.
pub fn write_checkpoint(dir: &Path, population: &Population, pair: Pair, iteration: u64, seed: u64) -> Result<Manifest> {
    let graph = population.members()[0].instance.graph();
    write_graph(&dir.join(GRAPH_FILE), graph)?;
    let mut members = Vec::with_capacity(population.len());
    for (k, m) in population.members().iter().enumerate() {
        let file = member_file(k);
        write_string(&dir.join(&file), &m.instance.to_json_with_graph_file(GRAPH_FILE))?;
        members.push(MemberEntry {
            file,
            feature: m.feature,
            r_prime: m.r_prime,
            contribution: m.contribution,
        });
    }
    let manifest = Manifest {
        feature_kind: population.feature_kind(),
        pair,
        threshold: population.threshold(),
        members,
        d_s: population.set_diversity(),
        iteration,
        seed,
    };
    write_string(&dir.join(MANIFEST_FILE), &serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

/// Load a checkpoint and verify that every cached value matches a fresh
/// recomputation from the member instances.
pub fn read_checkpoint(dir: &Path) -> Result<(Population, Manifest)> {
    let manifest: Manifest = serde_json::from_str(&read_to_string(&dir.join(MANIFEST_FILE))?)?;
    let graph = Arc::new(read_graph(&dir.join(GRAPH_FILE))?);
    let mut entries = Vec::with_capacity(manifest.members.len());
    for m in &manifest.members {
        let text = read_to_string(&dir.join(&m.file))?;
        entries.push((ChanceInstance::from_json_with_graph(&text, graph.clone())?, m.r_prime));
    }
    let population = Population::new(entries, manifest.feature_kind, manifest.threshold)?;

    for (k, (cached, fresh)) in manifest.members.iter().zip(population.members()).enumerate() {
        if cached.feature != fresh.feature || cached.contribution != fresh.contribution || cached.r_prime != fresh.r_prime {
            return Err(Error::validation(
                "members",
                Some(k),
                format!("cached values of {} do not match the member files", cached.file),
            ));
        }
    }
    if manifest.d_s != population.set_diversity() {
        return Err(Error::validation("D_s", None, "cached set diversity does not match the members"));
    }
    Ok((population, manifest))
}
