//! Signature generation, frequency filtering, hash-rank subsampling, the
//! bucket table and the two bucket-driven searches: the incremental
//! similar-q-gram search used by the overlap detector and the standalone
//! similar-pair join over a set of q-grams.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::edit::edit_distance_leq;
use crate::embedding::generate_smooth_qgram;
use crate::error::Result;
use crate::model::{derive_randomness, Params, Randomness, ReadSet, Signature, SmoothQGram};

/// The q-gram of `seq` starting at 1-based position `pos`.
#[inline]
pub fn qgram_at(seq: &[u8], pos: usize, q: usize) -> &[u8] {
    &seq[pos - 1..pos - 1 + q]
}

/// One signature per q-gram position of `seq`, in increasing position.
/// Reads shorter than `q` yield no signatures.
pub fn build_signatures(
    seq: &[u8],
    read: usize,
    rnd: &Randomness,
    params: &Params,
) -> Vec<Signature> {
    let q = params.q;
    if seq.len() < q {
        return Vec::new();
    }
    (1..=seq.len() - q + 1)
        .map(|pos| {
            let smooth = generate_smooth_qgram(qgram_at(seq, pos, q), rnd);
            let rank = rnd.rank(&smooth);
            Signature {
                smooth,
                rank,
                read,
                pos,
            }
        })
        .collect()
}

/// Signatures of every read, generated in parallel.
pub fn build_all_signatures(
    reads: &ReadSet,
    rnd: &Randomness,
    params: &Params,
) -> Vec<Vec<Signature>> {
    reads
        .reads()
        .par_iter()
        .enumerate()
        .map(|(i, r)| build_signatures(&r.seq, i, rnd, params))
        .collect()
}

/// Removes every signature whose smooth q-gram accounts for at least an
/// `eta` fraction of all signatures. `eta >= 1` disables the filter.
/// Returns the number of signatures removed.
pub fn frequency_filter(sets: &mut [Vec<Signature>], eta: f64) -> usize {
    if eta >= 1.0 {
        return 0;
    }
    let mut counts: HashMap<&SmoothQGram, usize> = HashMap::new();
    let mut total = 0usize;
    for sig in sets.iter().flatten() {
        *counts.entry(&sig.smooth).or_default() += 1;
        total += 1;
    }
    let threshold = eta * total as f64;
    let frequent: std::collections::HashSet<SmoothQGram> = counts
        .into_iter()
        .filter(|&(_, c)| c as f64 >= threshold)
        .map(|(t, _)| t.clone())
        .collect();
    if frequent.is_empty() {
        return 0;
    }
    let mut removed = 0;
    for set in sets.iter_mut() {
        let before = set.len();
        set.retain(|s| !frequent.contains(&s.smooth));
        removed += before - set.len();
    }
    removed
}

/// Number of signatures kept for a read of length `x_len`: `floor(alpha * x_len)`.
pub fn subsample_size(x_len: usize, alpha: f64) -> usize {
    // The nudge keeps products such as 0.29 * 100 from flooring to 28.
    (alpha * x_len as f64 + 1e-9).floor() as usize
}

/// Keeps the `floor(alpha * x_len)` signatures of smallest rank (ties by
/// read, then position), returned in increasing position.
pub fn subsample_signatures(delta: &[Signature], x_len: usize, alpha: f64) -> Vec<Signature> {
    let keep = subsample_size(x_len, alpha);
    let mut kept: Vec<Signature> = if keep >= delta.len() {
        delta.to_vec()
    } else {
        let mut idx: Vec<usize> = (0..delta.len()).collect();
        idx.select_nth_unstable_by_key(keep, |&k| delta[k].rank_key());
        idx.truncate(keep);
        idx.into_iter().map(|k| delta[k].clone()).collect()
    };
    kept.sort_by_key(|s| s.pos);
    kept
}

/// Buckets of q-gram occurrences keyed by their exact smooth q-gram.
#[derive(Debug, Default)]
pub struct BucketTable {
    buckets: HashMap<SmoothQGram, Vec<(usize, usize)>>,
    len: usize,
}

impl BucketTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, sig: &Signature) {
        self.buckets
            .entry(sig.smooth.clone())
            .or_default()
            .push((sig.read, sig.pos));
        self.len += 1;
    }

    /// `(read, pos)` occurrences stored under `t`, in insertion order.
    pub fn bucket(&self, t: &SmoothQGram) -> &[(usize, usize)] {
        self.buckets.get(t).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }
}

/// Returns `(read', pos, pos')` for every occurrence already in `delta`'s
/// bucket whose q-gram is within edit distance `max_edits` of `delta`'s, then
/// inserts `delta` into the table.
pub fn search_similar_qgrams(
    delta: &Signature,
    table: &mut BucketTable,
    reads: &ReadSet,
    q: usize,
    max_edits: usize,
) -> Vec<(usize, usize, usize)> {
    let s = qgram_at(reads.seq(delta.read), delta.pos, q);
    let found = table
        .bucket(&delta.smooth)
        .iter()
        .filter(|&&(other, pos)| {
            edit_distance_leq(s, qgram_at(reads.seq(other), pos, q), max_edits).within
        })
        .map(|&(other, pos)| (other, delta.pos, pos))
        .collect();
    table.insert(delta);
    found
}

/// Matched q-gram position pairs per read pair `(i, j)` with `j < i`.
/// Each list holds `(u, v)` (positions in `x_i` and `x_j`), sorted and
/// deduplicated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchList {
    lists: BTreeMap<(usize, usize), Vec<(usize, usize)>>,
}

impl MatchList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, i: usize, j: usize, u: usize, v: usize) {
        debug_assert!(j < i);
        self.lists.entry((i, j)).or_default().push((u, v));
    }

    /// Sorts every list and drops duplicate `(u, v)`.
    pub fn canonicalize(&mut self) {
        for l in self.lists.values_mut() {
            l.sort_unstable();
            l.dedup();
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &[(usize, usize)] {
        self.lists.get(&(i, j)).map_or(&[], Vec::as_slice)
    }

    /// Pairs in `(i, j)` order with their matches.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &[(usize, usize)])> {
        self.lists.iter().map(|(&k, v)| (k, v.as_slice()))
    }

    pub fn pair_count(&self) -> usize {
        self.lists.len()
    }

    pub fn total_matches(&self) -> usize {
        self.lists.values().map(Vec::len).sum()
    }
}

/// Runs the incremental bucket search over the subsampled signatures of every
/// read, in read order, and collects the match lists.
pub fn build_match_lists(
    reads: &ReadSet,
    subsampled: &[Vec<Signature>],
    params: &Params,
) -> MatchList {
    let mut table = BucketTable::new();
    let mut matches = MatchList::new();
    for (i, delta_i) in subsampled.iter().enumerate() {
        for sig in delta_i {
            for (j, u, v) in
                search_similar_qgrams(sig, &mut table, reads, params.q, params.max_edits)
            {
                if j < i {
                    matches.push(i, j, u, v);
                }
            }
        }
    }
    matches.canonicalize();
    matches
}

/// A pair of input q-grams (by index, `a < b`) within the edit threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimilarPair {
    pub a: usize,
    pub b: usize,
    pub distance: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimJoinOutput {
    /// Verified pairs sorted by `(a, b)`.
    pub pairs: Vec<SimilarPair>,
    /// Distinct candidate pairs produced by bucket collisions.
    pub candidates: usize,
}

/// Candidate index pairs `(a, b)`, `a < b`, colliding in one
/// (embedding, mask) round, after the per-round frequency filter.
fn round_candidates(
    qgrams: &[Vec<u8>],
    rnd: &Randomness,
    eta: f64,
    out: &mut BTreeSet<(usize, usize)>,
) {
    let n = qgrams.len();
    let smooth: Vec<SmoothQGram> = qgrams
        .par_iter()
        .map(|s| generate_smooth_qgram(s, rnd))
        .collect();
    let mut freq: HashMap<&SmoothQGram, usize> = HashMap::new();
    for t in &smooth {
        *freq.entry(t).or_default() += 1;
    }
    let limit = eta * n as f64;
    let mut table: HashMap<&SmoothQGram, Vec<usize>> = HashMap::new();
    for (i, t) in smooth.iter().enumerate() {
        if eta < 1.0 && freq[t] as f64 >= limit {
            continue;
        }
        let bucket = table.entry(t).or_default();
        out.extend(bucket.iter().map(|&prev| (prev, i)));
        bucket.push(i);
    }
}

/// Finds pairs of q-grams within edit distance `params.max_edits` using
/// `params.embeddings * params.subsamplings` smooth q-gram rounds. Every
/// reported pair is verified, so the output has no false positives; recall
/// grows with the number of rounds.
pub fn find_similar_qgram_pairs(qgrams: &[Vec<u8>], params: &Params) -> Result<SimJoinOutput> {
    params.validate()?;
    if let Some(bad) = qgrams.iter().position(|s| s.len() != params.q) {
        return Err(crate::Error::Config(format!(
            "q-gram {bad} has length {}, expected {}",
            qgrams[bad].len(),
            params.q
        )));
    }
    let mut candidates = BTreeSet::new();
    for j in 1..=params.embeddings {
        for k in 1..=params.subsamplings {
            let rnd = derive_randomness(params.seed, j, k, params)?;
            round_candidates(qgrams, &rnd, params.eta, &mut candidates);
        }
    }
    let candidates: Vec<(usize, usize)> = candidates.into_iter().collect();
    let pairs = candidates
        .par_iter()
        .filter_map(|&(a, b)| {
            let r = edit_distance_leq(&qgrams[a], &qgrams[b], params.max_edits);
            r.distance.map(|distance| SimilarPair { a, b, distance })
        })
        .collect();
    Ok(SimJoinOutput {
        pairs,
        candidates: candidates.len(),
    })
}
