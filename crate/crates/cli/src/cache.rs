//! One JSON file per genus, validated by the `P̃` hash it was solved against
//! and a content hash over its own canonical text.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use cubic_hodge::algebra::format::{jet_from_json, jet_to_json, jet_to_text, JsonTerm};
use cubic_hodge::loop_solver::{FreeEnergy, FreeEnergyBody, Provenance, SOLVER_VERSION};
use cubic_hodge::Rational;

use crate::commands::CliError;

const FORMAT: &str = "cubic-hodge-cache/1";

#[derive(Serialize, Deserialize, Debug, Clone)]
struct CacheFile {
    format: String,
    genus: u32,
    solver_version: String,
    ptable_hash: String,
    content_hash: String,
    wall_time_ms: u64,
    z0_anomaly: bool,
    log_z1: Option<String>,
    body: Vec<JsonTerm>,
    gradient: Vec<Vec<JsonTerm>>,
}

impl CacheFile {
    fn digest(&self) -> String {
        let mut h = Sha256::new();
        for part in [&self.format, &self.solver_version, &self.ptable_hash] {
            h.update(part.as_bytes());
            h.update(b"\n");
        }
        h.update(format!("genus {}\nlog {:?}\nz0 {}\n", self.genus, self.log_z1, self.z0_anomaly).as_bytes());
        let text = |terms: &[JsonTerm]| jet_from_json(terms).map(|p| jet_to_text(&p)).unwrap_or_else(|e| e.to_string());
        h.update(text(&self.body).as_bytes());
        h.update(b"\n");
        for g in &self.gradient {
            h.update(text(g).as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

/// Outcome of a cache lookup.
pub enum Lookup {
    Hit(FreeEnergy),
    Miss,
    /// Present but unusable; the reason is reported and the genus recomputed.
    Rejected(String),
}

pub struct GenusCache {
    dir: PathBuf,
}

impl GenusCache {
    pub fn open(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::usage(format!("cache directory {}: {e}", dir.display())))?;
        let meta = fs::metadata(dir).map_err(|e| CliError::usage(format!("cache directory {}: {e}", dir.display())))?;
        if meta.permissions().readonly() {
            return Err(CliError::usage(format!("cache directory {} is not writable", dir.display())));
        }
        Ok(GenusCache { dir: dir.to_path_buf() })
    }

    pub fn path(&self, g: u32) -> PathBuf {
        self.dir.join(format!("genus-{g}.json"))
    }

    pub fn load(&self, g: u32, ptable_hash: &str) -> Lookup {
        let path = self.path(g);
        let Ok(raw) = fs::read_to_string(&path) else {
            return Lookup::Miss;
        };
        match decode(&raw, g, ptable_hash) {
            Ok(e) => Lookup::Hit(e),
            Err(why) => Lookup::Rejected(format!("{}: {why}", path.display())),
        }
    }

    pub fn store(&self, e: &FreeEnergy) -> Result<(), CliError> {
        let mut file = CacheFile {
            format: FORMAT.into(),
            genus: e.genus,
            solver_version: e.provenance.solver_version.clone(),
            ptable_hash: e.provenance.ptable_hash.clone(),
            content_hash: String::new(),
            wall_time_ms: e.provenance.wall_time_ms,
            z0_anomaly: e.provenance.z0_anomaly,
            log_z1: e.log_z1().map(|r| cubic_hodge::algebra::format::rational_to_json(r)),
            body: jet_to_json(e.polynomial()),
            gradient: e.gradient.iter().map(jet_to_json).collect(),
        };
        file.content_hash = file.digest();
        let text = serde_json::to_string_pretty(&file).expect("serializable");
        let path = self.path(e.genus);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, text + "\n").and_then(|_| fs::rename(&tmp, &path)).map_err(|err| CliError::internal("cache", format!("{}: {err}", path.display())))
    }
}

fn decode(raw: &str, g: u32, ptable_hash: &str) -> Result<FreeEnergy, String> {
    let file: CacheFile = serde_json::from_str(raw).map_err(|e| format!("unreadable ({e})"))?;
    if file.format != FORMAT || file.genus != g {
        return Err("format or genus mismatch".into());
    }
    if file.solver_version != SOLVER_VERSION {
        return Err(format!("solver version {} differs", file.solver_version));
    }
    if file.ptable_hash != ptable_hash {
        return Err("P-table hash mismatch".into());
    }
    if file.digest() != file.content_hash {
        return Err("content hash mismatch".into());
    }
    let poly = jet_from_json(&file.body).map_err(|e| e.to_string())?;
    let gradient = file.gradient.iter().map(|t| jet_from_json(t)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let body = match &file.log_z1 {
        Some(c) => FreeEnergyBody::GenusOne { log_z1: c.parse::<Rational>().map_err(|e| e.to_string())?, poly },
        None => FreeEnergyBody::Higher(poly),
    };
    Ok(FreeEnergy {
        genus: g,
        gradient,
        body,
        provenance: Provenance {
            solver_version: file.solver_version,
            ptable_hash: file.ptable_hash,
            wall_time_ms: file.wall_time_ms,
            z0_anomaly: file.z0_anomaly,
        },
    })
}
