//! Synthetic long-read simulator with exact ground truth.
//!
//! A uniform random reference is sampled, reads are cut at uniform start
//! positions and every template base independently suffers an error with
//! probability `error_rate`, split into insertions, deletions and
//! substitutions.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Read, ReadSet};
use crate::overlap::{reverse_complement, Strand};

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub reference_length: usize,
    pub n_reads: usize,
    pub mean_read_length: usize,
    /// Per-base error probability.
    pub error_rate: f64,
    /// Fractions of errors that are insertions / deletions / substitutions.
    pub error_mix: (f64, f64, f64),
    /// Read lengths are uniform in `mean * (1 -/+ length_spread)`.
    pub length_spread: f64,
    /// Sample reads from both strands; reverse-strand reads are reverse
    /// complemented.
    pub both_strands: bool,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            reference_length: 200_000,
            n_reads: 400,
            mean_read_length: 4_000,
            error_rate: 0.15,
            error_mix: (0.5, 0.35, 0.15),
            length_spread: 0.25,
            both_strands: false,
            seed: 0,
        }
    }
}

/// Where a simulated read came from; reference coordinates are 1-based
/// inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub name: String,
    pub start: usize,
    pub end: usize,
    pub strand: Strand,
    /// Length of the emitted read (after errors).
    pub length: usize,
}

impl Placement {
    /// Length of the intersection of the two reference intervals.
    pub fn overlap_with(&self, other: &Placement) -> usize {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        (hi + 1).saturating_sub(lo)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub placements: Vec<Placement>,
}

impl GroundTruth {
    pub fn get(&self, name: &str) -> Option<&Placement> {
        self.placements.iter().find(|p| p.name == name)
    }

    /// Unordered name pairs (lexicographically ordered within the key) whose
    /// reference intervals share at least `gamma` bases, with the shared
    /// length.
    pub fn overlapping_pairs(&self, gamma: usize) -> BTreeMap<(String, String), usize> {
        let mut sorted: Vec<&Placement> = self.placements.iter().collect();
        sorted.sort_by_key(|p| (p.start, p.end));
        let mut out = BTreeMap::new();
        for (k, a) in sorted.iter().enumerate() {
            for b in &sorted[k + 1..] {
                if b.start > a.end {
                    break;
                }
                let ov = a.overlap_with(b);
                if ov >= gamma.max(1) {
                    out.insert(name_pair(&a.name, &b.name), ov);
                }
            }
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let write_err = |source| Error::Write {
            path: path.to_path_buf(),
            source,
        };
        let mut w = BufWriter::new(File::create(path).map_err(write_err)?);
        writeln!(w, "#name\tref_start\tref_end\tstrand\tread_length").map_err(write_err)?;
        for p in &self.placements {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                p.name,
                p.start,
                p.end,
                p.strand.as_char(),
                p.length
            )
            .map_err(write_err)?;
        }
        w.flush().map_err(write_err)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut placements = Vec::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| Error::Read {
                path: path.to_path_buf(),
                source,
            })?;
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Format {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: msg.to_string(),
            };
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 5 {
                return Err(bad("expected 5 tab-separated fields"));
            }
            let num = |s: &str| s.parse::<usize>().map_err(|_| bad("invalid integer field"));
            let strand = f[3]
                .chars()
                .next()
                .and_then(Strand::from_char)
                .ok_or_else(|| bad("strand must be '+' or '-'"))?;
            let (start, end) = (num(f[1])?, num(f[2])?);
            if start == 0 || start > end {
                return Err(bad("invalid reference interval"));
            }
            placements.push(Placement {
                name: f[0].to_string(),
                start,
                end,
                strand,
                length: num(f[4])?,
            });
        }
        Ok(GroundTruth { placements })
    }
}

pub fn name_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

pub fn random_dna(rng: &mut impl Rng, len: usize) -> Vec<u8> {
    (0..len).map(|_| b"ACGT"[rng.gen_range(0..4)]).collect()
}

/// Applies independent per-base errors to `template`.
pub fn mutate(
    template: &[u8],
    error_rate: f64,
    mix: (f64, f64, f64),
    rng: &mut impl Rng,
) -> Vec<u8> {
    let total = mix.0 + mix.1 + mix.2;
    let (p_ins, p_del) = (mix.0 / total, mix.1 / total);
    let mut out = Vec::with_capacity(template.len() + template.len() / 8);
    for &b in template {
        if rng.gen::<f64>() >= error_rate {
            out.push(b);
            continue;
        }
        let kind = rng.gen::<f64>();
        if kind < p_ins {
            out.push(b"ACGT"[rng.gen_range(0..4)]);
            out.push(b);
        } else if kind < p_ins + p_del {
            // deleted
        } else {
            let others: Vec<u8> = b"ACGT".iter().copied().filter(|&c| c != b).collect();
            out.push(others[rng.gen_range(0..3)]);
        }
    }
    out
}

/// Simulates reads over a fresh random reference. Returns the reads, their
/// ground truth and the reference.
pub fn simulate_reads(cfg: &SimConfig) -> Result<(ReadSet, GroundTruth, Vec<u8>)> {
    if cfg.n_reads < 2 {
        return Err(Error::Config("need at least 2 reads".into()));
    }
    if cfg.mean_read_length == 0 || cfg.mean_read_length > cfg.reference_length {
        return Err(Error::Config(format!(
            "mean read length {} must lie in 1..=reference length {}",
            cfg.mean_read_length, cfg.reference_length
        )));
    }
    if !(0.0..1.0).contains(&cfg.error_rate) {
        return Err(Error::Config(format!(
            "error rate {} must lie in [0, 1)",
            cfg.error_rate
        )));
    }
    if !(0.0..1.0).contains(&cfg.length_spread) {
        return Err(Error::Config("length spread must lie in [0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let reference = random_dna(&mut rng, cfg.reference_length);
    let width = cfg.n_reads.to_string().len();

    let mut reads = Vec::with_capacity(cfg.n_reads);
    let mut placements = Vec::with_capacity(cfg.n_reads);
    let mean = cfg.mean_read_length as f64;
    let lo = (mean * (1.0 - cfg.length_spread)).round().max(1.0) as usize;
    let hi = ((mean * (1.0 + cfg.length_spread)).round() as usize).clamp(lo, cfg.reference_length);
    for k in 0..cfg.n_reads {
        let len = rng.gen_range(lo..=hi);
        let start = rng.gen_range(0..=cfg.reference_length - len);
        let strand = if cfg.both_strands && rng.gen::<bool>() {
            Strand::Reverse
        } else {
            Strand::Forward
        };
        let mut seq = mutate(
            &reference[start..start + len],
            cfg.error_rate,
            cfg.error_mix,
            &mut rng,
        );
        if strand == Strand::Reverse {
            seq = reverse_complement(&seq);
        }
        let name = format!("read{k:0width$}");
        placements.push(Placement {
            name: name.clone(),
            start: start + 1,
            end: start + len,
            strand,
            length: seq.len(),
        });
        reads.push(Read { name, seq });
    }
    Ok((
        ReadSet::from_reads(reads)?,
        GroundTruth { placements },
        reference,
    ))
}
