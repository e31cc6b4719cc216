//! Overlap detection: candidate verification by shift/position clustering,
//! shared-substring recovery from the complete match set, and the end-to-end
//! detector.

use std::collections::HashMap;

use log::{debug, info};
use rayon::prelude::*;

use crate::edit::edit_distance_leq;
use crate::error::{Error, Result};
use crate::index::{
    build_all_signatures, build_match_lists, frequency_filter, qgram_at, subsample_signatures,
    MatchList,
};
use crate::model::{derive_randomness, Params, Read, ReadSet, Signature, SmoothQGram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strand {
    Forward,
    Reverse,
}

impl Strand {
    pub fn as_char(self) -> char {
        match self {
            Strand::Forward => '+',
            Strand::Reverse => '-',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '+' => Some(Strand::Forward),
            '-' => Some(Strand::Reverse),
            _ => None,
        }
    }
}

/// A verified overlapping read pair, `j < i`, with shared-substring spans
/// given as 1-based inclusive q-gram start positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Overlap {
    pub i: usize,
    pub j: usize,
    pub i_start: usize,
    pub i_end: usize,
    pub j_start: usize,
    pub j_end: usize,
    /// Strand of `x_j` relative to `x_i`.
    pub strand: Strand,
    /// Complete-set matches supporting the spans.
    pub matches: usize,
}

/// Reference shift and position returned by [`verify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyResult {
    /// Reference shift `u - v`.
    pub offset: i64,
    /// Reference position in `x_i`.
    pub pos: i64,
}

/// Leftmost point covered by the largest number of closed intervals.
///
/// Panics on an empty list.
pub fn max_stab(intervals: &[(f64, f64)]) -> f64 {
    assert!(
        !intervals.is_empty(),
        "max_stab needs at least one interval"
    );
    // (coordinate, kind): starts (0) sort before ends (1) so touching closed
    // intervals count as overlapping.
    let mut events: Vec<(f64, u8)> = Vec::with_capacity(intervals.len() * 2);
    for &(a, b) in intervals {
        debug_assert!(a <= b);
        events.push((a, 0));
        events.push((b, 1));
    }
    events.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let (mut depth, mut best, mut at) = (0usize, 0usize, events[0].0);
    for (x, kind) in events {
        if kind == 0 {
            depth += 1;
            if depth > best {
                best = depth;
                at = x;
            }
        } else {
            depth -= 1;
        }
    }
    at
}

/// Among `centers`, the leftmost one stabbing the most intervals
/// `[c - half, c + half]`, with its depth.
fn densest_center(centers: &[i64], half: f64) -> (i64, usize) {
    let mut sorted = centers.to_vec();
    sorted.sort_unstable();
    let (mut lo, mut hi) = (0usize, 0usize);
    let mut best = (sorted[0], 0usize);
    for (idx, &c) in sorted.iter().enumerate() {
        if idx > 0 && sorted[idx - 1] == c {
            continue;
        }
        while (c - sorted[lo]) as f64 > half {
            lo += 1;
        }
        while hi < sorted.len() && (sorted[hi] - c) as f64 <= half {
            hi += 1;
        }
        if hi - lo > best.1 {
            best = (c, hi - lo);
        }
    }
    best
}

/// Two-stage geometric check of a candidate pair's matches `(u, v)`.
///
/// The reference shift `o` is the match shift stabbing the most intervals
/// `[u - v -/+ (eps/2) L]`; matches with shift outside `o -/+ (eps/2) L` are
/// dropped. The reference position `pos` is then chosen the same way from the
/// intervals `[u -/+ L/2]` and matches with `u` outside `pos -/+ L/2` are
/// dropped. Returns `(o, pos)` when at least `C` matches survive. Ties go to
/// the leftmost value.
pub fn verify(matches: &[(usize, usize)], params: &Params) -> Option<VerifyResult> {
    if matches.len() < params.min_matches {
        return None;
    }
    let tol = params.shift_tolerance();
    let half = params.half_window();
    let shifts: Vec<i64> = matches.iter().map(|&(u, v)| u as i64 - v as i64).collect();
    let (offset, _) = densest_center(&shifts, tol);

    let positions: Vec<i64> = matches
        .iter()
        .zip(&shifts)
        .filter(|&(_, &s)| ((s - offset) as f64).abs() <= tol)
        .map(|(&(u, _), _)| u as i64)
        .collect();
    if positions.len() < params.min_matches {
        return None;
    }
    let (pos, _) = densest_center(&positions, half);
    let survivors = positions
        .iter()
        .filter(|&&u| ((u - pos) as f64).abs() <= half)
        .count();
    (survivors >= params.min_matches).then_some(VerifyResult { offset, pos })
}

/// Every `(p, p')` with identical smooth q-grams in `delta_i`, `delta_j` and
/// q-grams within the edit threshold, sorted.
pub fn complete_matches(
    seq_i: &[u8],
    seq_j: &[u8],
    delta_i: &[Signature],
    delta_j: &[Signature],
    params: &Params,
) -> Vec<(usize, usize)> {
    let mut by_smooth: HashMap<&SmoothQGram, Vec<usize>> = HashMap::new();
    for s in delta_j {
        by_smooth.entry(&s.smooth).or_default().push(s.pos);
    }
    let mut out = Vec::new();
    for s in delta_i {
        let Some(bucket) = by_smooth.get(&s.smooth) else {
            continue;
        };
        let a = qgram_at(seq_i, s.pos, params.q);
        for &pj in bucket {
            if edit_distance_leq(a, qgram_at(seq_j, pj, params.q), params.max_edits).within {
                out.push((s.pos, pj));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Spans recovered by [`find_shared_substrings`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedSpans {
    pub i_start: usize,
    pub i_end: usize,
    pub j_start: usize,
    pub j_end: usize,
    /// Matches in the dense box plus accepted extensions.
    pub support: usize,
}

/// Recovers the shared substrings of a verified pair from its complete match
/// set `matches` (see [`complete_matches`]).
///
/// The span is seeded from the dense box around `(pos, o)` and then extended
/// greedily outward, visiting the matches outside the window in increasing
/// distance from the seed span. Returns `None` when the dense box is empty.
pub fn find_shared_substrings(
    matches: &[(usize, usize)],
    verified: VerifyResult,
    params: &Params,
) -> Option<SharedSpans> {
    let tol = params.shift_tolerance();
    let half = params.half_window();
    let eps = params.epsilon;
    let l = params.overlap_len as i64;
    let in_window = |p: i64| ((p - verified.pos) as f64).abs() <= half;

    let pairs: Vec<(i64, i64)> = matches.iter().map(|&(p, q)| (p as i64, q as i64)).collect();
    let boxed: Vec<(i64, i64)> = pairs
        .iter()
        .copied()
        .filter(|&(p, pj)| in_window(p) && ((p - pj - verified.offset) as f64).abs() <= tol)
        .collect();
    let mut is = boxed.iter().map(|m| m.0).min()?;
    let mut ie = boxed.iter().map(|m| m.0).max()?;
    let mut js = boxed.iter().map(|m| m.1).min()?;
    let mut je = boxed.iter().map(|m| m.1).max()?;
    let mut support = boxed.len();

    let (seed_start, seed_end) = (is, ie);
    let mut rest: Vec<(i64, i64)> = pairs.into_iter().filter(|&(p, _)| !in_window(p)).collect();
    rest.sort_by_key(|&(p, pj)| ((p - seed_end).max(seed_start - p), p, pj));

    for (p, pj) in rest {
        let right = p - ie;
        if 0 < right && right < l && (((p - pj) - (ie - je)).abs() as f64) < eps * right as f64 {
            ie = p;
            je = je.max(pj);
            support += 1;
        }
        let left = is - p;
        if 0 < left && left < l && (((p - pj) - (is - js)).abs() as f64) < eps * left as f64 {
            is = p;
            js = js.min(pj);
            support += 1;
        }
    }
    Some(SharedSpans {
        i_start: is as usize,
        i_end: ie as usize,
        j_start: js as usize,
        j_end: je as usize,
        support,
    })
}

/// Counters reported alongside the detector's output.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PipelineStats {
    pub signatures: usize,
    pub filtered: usize,
    pub subsampled: usize,
    pub candidate_pairs: usize,
    pub verified: usize,
    /// Verified pairs dropped because the complete-set dense box was empty.
    pub empty_box: usize,
}

#[derive(Debug, Clone, Default)]
pub struct OverlapOutput {
    /// Sorted by `(i, j)`.
    pub overlaps: Vec<Overlap>,
    pub stats: PipelineStats,
}

/// Intermediate state of the detector, exposed for testing.
pub struct PreparedIndex {
    /// Frequency-filtered, unsubsampled signatures per read.
    pub signatures: Vec<Vec<Signature>>,
    pub subsampled: Vec<Vec<Signature>>,
    pub matches: MatchList,
    pub filtered: usize,
}

/// Signature generation, frequency filtering, subsampling and the
/// incremental similar-q-gram search.
pub fn prepare_index(reads: &ReadSet, params: &Params) -> Result<PreparedIndex> {
    params.validate()?;
    let rnd = derive_randomness(params.seed, 1, 1, params)?;
    let mut signatures = build_all_signatures(reads, &rnd, params);
    let filtered = frequency_filter(&mut signatures, params.eta);
    let subsampled: Vec<Vec<Signature>> = signatures
        .par_iter()
        .enumerate()
        .map(|(i, d)| subsample_signatures(d, reads.seq(i).len(), params.alpha))
        .collect();
    let matches = build_match_lists(reads, &subsampled, params);
    Ok(PreparedIndex {
        signatures,
        subsampled,
        matches,
        filtered,
    })
}

/// Detects overlapping read pairs and their shared substrings.
pub fn find_overlaps(reads: &ReadSet, params: &Params) -> Result<OverlapOutput> {
    let index = prepare_index(reads, params)?;
    let candidates: Vec<_> = index
        .matches
        .iter()
        .filter(|(_, m)| m.len() >= params.min_matches)
        .collect();

    let results: Vec<(bool, Option<Overlap>)> = candidates
        .par_iter()
        .map(|&((i, j), m)| {
            let Some(v) = verify(m, params) else {
                return (false, None);
            };
            let complete = complete_matches(
                reads.seq(i),
                reads.seq(j),
                &index.signatures[i],
                &index.signatures[j],
                params,
            );
            let overlap = find_shared_substrings(&complete, v, params).map(|s| Overlap {
                i,
                j,
                i_start: s.i_start,
                i_end: s.i_end,
                j_start: s.j_start,
                j_end: s.j_end,
                strand: Strand::Forward,
                matches: s.support,
            });
            (true, overlap)
        })
        .collect();

    let verified = results.iter().filter(|r| r.0).count();
    let overlaps: Vec<Overlap> = results.into_iter().filter_map(|r| r.1).collect();
    let stats = PipelineStats {
        signatures: index.signatures.iter().map(Vec::len).sum::<usize>() + index.filtered,
        filtered: index.filtered,
        subsampled: index.subsampled.iter().map(Vec::len).sum(),
        candidate_pairs: candidates.len(),
        verified,
        empty_box: verified - overlaps.len(),
    };
    if stats.empty_box > 0 {
        debug!("{} verified pairs had an empty dense box", stats.empty_box);
    }
    info!(
        "signatures={} filtered={} subsampled={} candidates={} verified={} reported={}",
        stats.signatures,
        stats.filtered,
        stats.subsampled,
        stats.candidate_pairs,
        stats.verified,
        overlaps.len()
    );
    for o in &overlaps {
        check_overlap(o, reads)?;
    }
    Ok(OverlapOutput { overlaps, stats })
}

fn check_overlap(o: &Overlap, reads: &ReadSet) -> Result<()> {
    let ok = o.j < o.i
        && o.i < reads.len()
        && 1 <= o.i_start
        && o.i_start <= o.i_end
        && o.i_end <= reads.seq(o.i).len()
        && 1 <= o.j_start
        && o.j_start <= o.j_end
        && o.j_end <= reads.seq(o.j).len();
    if ok {
        Ok(())
    } else {
        Err(Error::Invariant(format!("malformed overlap {o:?}")))
    }
}

pub fn reverse_complement(seq: &[u8]) -> Vec<u8> {
    seq.iter()
        .rev()
        .map(|&b| match b {
            b'A' => b'T',
            b'C' => b'G',
            b'G' => b'C',
            b'T' => b'A',
            other => other,
        })
        .collect()
}

/// Runs the detector on the reads plus their reverse complements and reports
/// each pair once, with `x_j`'s strand relative to `x_i` and spans mapped
/// back to forward coordinates.
pub fn find_overlaps_both_strands(reads: &ReadSet, params: &Params) -> Result<OverlapOutput> {
    let n = reads.len();
    let mut doubled: Vec<Read> = reads.reads().to_vec();
    doubled.extend(reads.iter().map(|r| Read {
        name: format!("{}/rc", r.name),
        seq: reverse_complement(&r.seq),
    }));
    let doubled = ReadSet::from_reads(doubled)?;
    let mut out = find_overlaps(&doubled, params)?;

    let q = params.q;
    let to_forward = |idx: usize, start: usize, end: usize| -> (usize, usize, usize, bool) {
        if idx < n {
            (idx, start, end, false)
        } else {
            let len = reads.seq(idx - n).len();
            (idx - n, len + 2 - q - end, len + 2 - q - start, true)
        }
    };
    let mut seen = std::collections::HashSet::new();
    let mut mapped = Vec::new();
    for o in out.overlaps {
        let (a, a_s, a_e, a_rc) = to_forward(o.i, o.i_start, o.i_end);
        let (b, b_s, b_e, b_rc) = to_forward(o.j, o.j_start, o.j_end);
        if a == b {
            continue;
        }
        let strand = if a_rc == b_rc {
            Strand::Forward
        } else {
            Strand::Reverse
        };
        let (i, j, i_s, i_e, j_s, j_e) = if a > b {
            (a, b, a_s, a_e, b_s, b_e)
        } else {
            (b, a, b_s, b_e, a_s, a_e)
        };
        if seen.insert((i, j, strand)) {
            mapped.push(Overlap {
                i,
                j,
                i_start: i_s,
                i_end: i_e,
                j_start: j_s,
                j_end: j_e,
                strand,
                matches: o.matches,
            });
        }
    }
    mapped.sort_by_key(|o| (o.i, o.j, o.strand));
    out.overlaps = mapped;
    Ok(out)
}
