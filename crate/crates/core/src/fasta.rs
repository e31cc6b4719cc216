//! FASTA/FASTQ ingestion (plain or gzip) and FASTA output.

use std::fs::File;
use std::io::{BufRead, BufReader, Read as _, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use log::warn;

use crate::error::{Error, Result};
use crate::model::{Read, ReadSet};

/// What to do with characters outside ACGT after uppercasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NonAcgtPolicy {
    #[default]
    Reject,
    /// Replace with 'A'.
    Mask,
}

fn open(path: &Path) -> Result<Box<dyn BufRead>> {
    let read_err = |source| Error::Read {
        path: path.to_path_buf(),
        source,
    };
    let mut file = File::open(path).map_err(read_err)?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic).map_err(read_err)?;
    let file = File::open(path).map_err(read_err)?;
    if n == 2 && magic == [0x1f, 0x8b] {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Loads a FASTA or FASTQ file, detected by its first non-blank character.
pub fn read_fasta(path: impl AsRef<Path>, policy: NonAcgtPolicy) -> Result<ReadSet> {
    let path = path.as_ref();
    parse_reads(open(path)?, path, policy)
}

/// Parses FASTA/FASTQ from any reader; `source` names the input in errors.
pub fn parse_reads<R: BufRead>(reader: R, source: &Path, policy: NonAcgtPolicy) -> Result<ReadSet> {
    let format_err = |line: usize, msg: &str| Error::Format {
        path: source.to_path_buf(),
        line,
        msg: msg.to_string(),
    };
    let mut lines = Vec::new();
    for (idx, l) in reader.lines().enumerate() {
        let l = l.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => format_err(idx + 1, "not valid UTF-8 text"),
            _ => Error::Read {
                path: source.to_path_buf(),
                source: e,
            },
        })?;
        lines.push(l.trim_end_matches('\r').to_string());
    }

    let first = lines.iter().position(|l| !l.trim().is_empty());
    let Some(first) = first else {
        return Err(Error::Empty(source.to_path_buf()));
    };
    let mut raw: Vec<(String, String, usize)> = Vec::new();
    match lines[first].as_bytes()[0] {
        b'>' => {
            for (idx, l) in lines.iter().enumerate().skip(first) {
                if let Some(h) = l.strip_prefix('>') {
                    raw.push((header_name(h), String::new(), idx + 1));
                } else if !l.trim().is_empty() {
                    raw.last_mut()
                        .expect("first line is a header")
                        .1
                        .push_str(l.trim());
                }
            }
        }
        b'@' => {
            let body: Vec<(usize, &String)> = lines
                .iter()
                .enumerate()
                .skip(first)
                .filter(|(_, l)| !l.trim().is_empty())
                .collect();
            if !body.len().is_multiple_of(4) {
                return Err(format_err(
                    body.last().map_or(0, |b| b.0 + 1),
                    "truncated FASTQ record",
                ));
            }
            for rec in body.chunks(4) {
                let (hl, h) = rec[0];
                let h = h
                    .strip_prefix('@')
                    .ok_or_else(|| format_err(hl + 1, "expected '@' header"))?;
                if !rec[2].1.starts_with('+') {
                    return Err(format_err(rec[2].0 + 1, "expected '+' separator"));
                }
                if rec[3].1.trim().len() != rec[1].1.trim().len() {
                    return Err(format_err(
                        rec[3].0 + 1,
                        "quality length differs from sequence length",
                    ));
                }
                raw.push((header_name(h), rec[1].1.trim().to_string(), hl + 1));
            }
        }
        _ => {
            return Err(format_err(
                first + 1,
                "expected '>' or '@' at start of record",
            ))
        }
    }

    let mut reads = Vec::with_capacity(raw.len());
    let mut masked = 0usize;
    for (name, seq, line) in raw {
        if name.is_empty() {
            return Err(format_err(line, "record has an empty name"));
        }
        if seq.is_empty() {
            return Err(format_err(line, "record has an empty sequence"));
        }
        let mut seq = seq.into_bytes();
        seq.make_ascii_uppercase();
        for (offset, b) in seq.iter_mut().enumerate() {
            if !matches!(*b, b'A' | b'C' | b'G' | b'T') {
                match policy {
                    NonAcgtPolicy::Reject => {
                        return Err(Error::NonAcgt {
                            path: source.to_path_buf(),
                            record: name,
                            offset,
                            ch: *b as char,
                        })
                    }
                    NonAcgtPolicy::Mask => {
                        *b = b'A';
                        masked += 1;
                    }
                }
            }
        }
        reads.push(Read { name, seq });
    }
    if masked > 0 {
        warn!(
            "{}: masked {masked} non-ACGT characters as 'A'",
            source.display()
        );
    }
    ReadSet::from_reads(reads)
}

fn header_name(h: &str) -> String {
    h.split_whitespace().next().unwrap_or("").to_string()
}

/// Writes reads as FASTA with 80-column lines.
pub fn write_fasta(reads: &ReadSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let write_err = |source| Error::Write {
        path: path.to_path_buf(),
        source,
    };
    let mut w = std::io::BufWriter::new(File::create(path).map_err(write_err)?);
    for r in reads.iter() {
        writeln!(w, ">{}", r.name).map_err(write_err)?;
        for chunk in r.seq.chunks(80) {
            w.write_all(chunk).map_err(write_err)?;
            w.write_all(b"\n").map_err(write_err)?;
        }
    }
    w.flush().map_err(write_err)
}
