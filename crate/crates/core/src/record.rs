//! Persistence: solution JSON, Gram CSV, permutation files and search
//! summaries. Every file is written to a temporary sibling and renamed into
//! place.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{Complex, DVector};
use serde::{Deserialize, Serialize};

use crate::dim::Dimension;
use crate::error::RecordError;
use crate::gram::{GramMatrix, MubSet};
use crate::optimize::SearchResult;
use crate::perm::Perm;
use crate::phases::PhaseVector;

pub const FORMAT_VERSION: u32 = 1;

/// One tensor phase with its multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseCount {
    pub phase: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbolic: Option<String>,
    pub frequency: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generating_set: Vec<PhaseCount>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fluctuation: Option<f64>,
    /// Decimal string; orders can exceed 64 bits in principle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aut_order: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect: Option<i64>,
}

/// A solution on disk. Only `d`, `phases` and `format_version` are
/// required; phases are radians in storage order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub d: usize,
    pub phases: Vec<f64>,
    pub format_version: u32,
    #[serde(rename = "F_final", default, skip_serializing_if = "Option::is_none")]
    pub f_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tool_version: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    /// Basis vectors as `[re, im]` pairs, `bases[μ][i][k]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bases: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

impl SolutionRecord {
    pub fn new(phi: &PhaseVector) -> Self {
        SolutionRecord {
            d: phi.dim().get(),
            phases: phi.as_slice().to_vec(),
            format_version: FORMAT_VERSION,
            f_final: None,
            created_at: None,
            seed: None,
            tool_version: None,
            classification: None,
            bases: None,
        }
    }

    pub fn phase_vector(&self) -> Result<PhaseVector, RecordError> {
        let d = Dimension::new(self.d).map_err(crate::error::PhaseError::from)?;
        Ok(PhaseVector::new(d, self.phases.clone())?)
    }

    pub fn with_bases(mut self, m: &MubSet) -> Self {
        let d = m.dim();
        self.bases = Some(
            (0..d.bases())
                .map(|mu| m.basis(mu).iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect())
                .collect(),
        );
        self
    }

    /// The stored basis vectors, if any.
    pub fn mub_set(&self) -> Result<Option<MubSet>, RecordError> {
        let Some(bases) = &self.bases else { return Ok(None) };
        let d = Dimension::new(self.d).map_err(crate::error::PhaseError::from)?;
        let vectors = bases
            .iter()
            .map(|b| {
                b.iter().map(|v| DVector::from_iterator(v.len(), v.iter().map(|z| Complex::new(z[0], z[1])))).collect()
            })
            .collect();
        MubSet::from_bases(d, vectors).map(Some).map_err(|e| RecordError::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, RecordError> {
        let rec: SolutionRecord = serde_json::from_reader(reader)?;
        if rec.format_version != FORMAT_VERSION {
            return Err(RecordError::Version(rec.format_version));
        }
        rec.phase_vector()?;
        Ok(rec)
    }

    pub fn load(path: &Path) -> Result<Self, RecordError> {
        Self::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))
    }

    pub fn save(&self, path: &Path) -> Result<(), RecordError> {
        let mut text = self.to_json();
        text.push('\n');
        write_atomic(path, text.as_bytes())
    }
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RecordError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| RecordError::Io(e.error))?;
    Ok(())
}

/// Row-major CSV, each row `re,im,re,im,…`.
pub fn gram_csv(g: &GramMatrix) -> String {
    let n = g.dim().states();
    let mut out = String::new();
    for a in 0..n {
        let row: Vec<String> = (0..n)
            .flat_map(|b| {
                let z = g.get(a, b);
                [z.re.to_string(), z.im.to_string()]
            })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Two lines: the degree, then the 1-based images.
pub fn perm_text(p: &Perm) -> String {
    let images: Vec<String> = p.images().iter().map(|x| (x + 1).to_string()).collect();
    format!("{}\n{}\n", p.degree(), images.join(" "))
}

pub fn parse_perm(text: &str) -> Result<Perm, RecordError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n: usize = lines
        .next()
        .and_then(|l| l.trim().parse().ok())
        .ok_or_else(|| RecordError::Malformed("missing degree line".into()))?;
    let images = lines
        .next()
        .ok_or_else(|| RecordError::Malformed("missing image line".into()))?
        .split_whitespace()
        .map(|t| t.parse::<usize>().ok().filter(|&x| x >= 1).map(|x| x - 1))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| RecordError::Malformed("bad image".into()))?;
    if images.len() != n {
        return Err(RecordError::Malformed(format!("expected {n} images, got {}", images.len())));
    }
    Perm::from_images(images).map_err(|e| RecordError::Malformed(e.to_string()))
}

/// `restart,accepted,F_final,iters1,iters2,seconds`, one row per run. With
/// `omit_timing` the seconds column is written as `0`.
pub fn summary_csv(results: &[SearchResult], omit_timing: bool) -> String {
    let mut out = String::from("restart,accepted,F_final,iters1,iters2,seconds\n");
    for (i, r) in results.iter().enumerate() {
        let secs = if omit_timing { 0.0 } else { r.wall_time };
        let _ = writeln!(out, "{},{},{:e},{},{},{:.6}", i, r.accepted, r.f_final, r.iterations.0, r.iterations.1, secs);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn json_round_trip_is_bit_exact() {
        let d = Dimension::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let phi = PhaseVector::new(d, (0..54).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect()).unwrap();
        let mut rec = SolutionRecord::new(&phi);
        rec.f_final = Some(1.5e-15);
        rec.seed = Some(7);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sol.json");
        rec.save(&path).unwrap();
        let back = SolutionRecord::load(&path).unwrap();
        assert_eq!(back, rec);
        for (a, b) in back.phases.iter().zip(phi.as_slice()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn minimal_schema_and_version() {
        let phases = vec![0.0; 54];
        let text = format!("{{\"d\": 3, \"phases\": {:?}, \"format_version\": 1}}", phases);
        assert!(SolutionRecord::from_reader(text.as_bytes()).is_ok());
        let bad = text.replace("\"format_version\": 1", "\"format_version\": 2");
        assert!(matches!(SolutionRecord::from_reader(bad.as_bytes()), Err(RecordError::Version(2))));
        let short = "{\"d\": 3, \"phases\": [0.0], \"format_version\": 1}";
        assert!(matches!(SolutionRecord::from_reader(short.as_bytes()), Err(RecordError::Phase(_))));
    }

    #[test]
    fn perm_file_round_trip() {
        let p = Perm::from_images(vec![2, 0, 1, 3]).unwrap();
        let text = perm_text(&p);
        assert_eq!(text, "4\n3 1 2 4\n");
        assert_eq!(parse_perm(&text).unwrap(), p);
        assert!(parse_perm("3\n1 1 2\n").is_err());
    }
}
