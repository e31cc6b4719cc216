//! Tab-separated overlap records.
//!
//! ```text
//! #name_i len_i start_i end_i name_j len_j start_j end_j strand n_matches
//! ```
//!
//! Coordinates are 1-based inclusive; data lines are sorted by
//! `(name_i, name_j)`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::ReadSet;
use crate::overlap::{Overlap, Strand};

pub const HEADER: &str =
    "#name_i\tlen_i\tstart_i\tend_i\tname_j\tlen_j\tstart_j\tend_j\tstrand\tn_matches";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OverlapRecord {
    pub name_i: String,
    pub len_i: usize,
    pub start_i: usize,
    pub end_i: usize,
    pub name_j: String,
    pub len_j: usize,
    pub start_j: usize,
    pub end_j: usize,
    pub strand: Strand,
    pub matches: usize,
}

impl OverlapRecord {
    pub fn from_overlap(o: &Overlap, reads: &ReadSet) -> Self {
        let (ri, rj) = (reads.get(o.i), reads.get(o.j));
        OverlapRecord {
            name_i: ri.name.clone(),
            len_i: ri.seq.len(),
            start_i: o.i_start,
            end_i: o.i_end,
            name_j: rj.name.clone(),
            len_j: rj.seq.len(),
            start_j: o.j_start,
            end_j: o.j_end,
            strand: o.strand,
            matches: o.matches,
        }
    }

    /// Resolves read names back to indices.
    pub fn to_overlap(&self, reads: &ReadSet) -> Result<Overlap> {
        let idx = |name: &str| {
            reads
                .index_of(name)
                .ok_or_else(|| Error::UnknownRead(name.to_string()))
        };
        Ok(Overlap {
            i: idx(&self.name_i)?,
            j: idx(&self.name_j)?,
            i_start: self.start_i,
            i_end: self.end_i,
            j_start: self.start_j,
            j_end: self.end_j,
            strand: self.strand,
            matches: self.matches,
        })
    }

    fn sort_key(&self) -> (&str, &str) {
        (&self.name_i, &self.name_j)
    }
}

/// Writes the TSV to any writer.
pub fn format_overlaps<W: Write>(
    overlaps: &[Overlap],
    reads: &ReadSet,
    mut w: W,
) -> std::io::Result<()> {
    let mut records: Vec<OverlapRecord> = overlaps
        .iter()
        .map(|o| OverlapRecord::from_overlap(o, reads))
        .collect();
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()).then_with(|| a.cmp(b)));
    writeln!(w, "{HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.name_i,
            r.len_i,
            r.start_i,
            r.end_i,
            r.name_j,
            r.len_j,
            r.start_j,
            r.end_j,
            r.strand.as_char(),
            r.matches
        )?;
    }
    w.flush()
}

pub fn write_overlaps(overlaps: &[Overlap], reads: &ReadSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let write_err = |source| Error::Write {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(write_err)?;
    format_overlaps(overlaps, reads, BufWriter::new(file)).map_err(write_err)
}

pub fn parse_overlaps<R: BufRead>(reader: R, source: &Path) -> Result<Vec<OverlapRecord>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Read {
            path: source.to_path_buf(),
            source: e,
        })?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::Format {
            path: source.to_path_buf(),
            line: idx + 1,
            msg: msg.to_string(),
        };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 10 {
            return Err(bad("expected 10 tab-separated fields"));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad("invalid integer field"));
        let mut chars = f[8].chars();
        let strand = match (chars.next().and_then(Strand::from_char), chars.next()) {
            (Some(s), None) => s,
            _ => return Err(bad("strand must be '+' or '-'")),
        };
        let rec = OverlapRecord {
            name_i: f[0].to_string(),
            len_i: num(f[1])?,
            start_i: num(f[2])?,
            end_i: num(f[3])?,
            name_j: f[4].to_string(),
            len_j: num(f[5])?,
            start_j: num(f[6])?,
            end_j: num(f[7])?,
            strand,
            matches: num(f[9])?,
        };
        let spans_ok = 1 <= rec.start_i
            && rec.start_i <= rec.end_i
            && rec.end_i <= rec.len_i
            && 1 <= rec.start_j
            && rec.start_j <= rec.end_j
            && rec.end_j <= rec.len_j;
        if !spans_ok {
            return Err(bad("span outside read bounds"));
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn read_overlaps(path: impl AsRef<Path>) -> Result<Vec<OverlapRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_overlaps(BufReader::new(file), path)
}
