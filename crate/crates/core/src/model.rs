//! Configuration, per-round randomness and the domain types shared by every
//! other module.

use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xxhash_rust::xxh3::{xxh3_64, xxh3_64_with_seed};

use crate::embedding::{ALPHABET_SIZE, GAP};
use crate::error::{Error, Result};

/// All tunable knobs of the detector and the similar-pair join.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    /// q-gram length.
    pub q: usize,
    /// Smooth q-gram length.
    pub m: usize,
    /// Length of a q-gram after CGK embedding.
    pub kappa: usize,
    /// Fraction of a read's length kept as signatures after subsampling.
    pub alpha: f64,
    /// Frequency filter threshold; `1.0` disables the filter.
    pub eta: f64,
    /// Edit distance threshold for matched q-grams (K).
    pub max_edits: usize,
    /// Minimum number of matched signatures for a candidate pair (C).
    pub min_matches: usize,
    /// Targeting overlap length (L).
    pub overlap_len: usize,
    /// Error tolerance rate (epsilon).
    pub epsilon: f64,
    /// Number of CGK embeddings (d), used by the similar-pair join.
    pub embeddings: usize,
    /// Number of subsamplings (z), used by the similar-pair join.
    pub subsamplings: usize,
    /// Master randomness seed.
    pub seed: u64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            q: 14,
            m: 21,
            kappa: 28,
            alpha: 0.15,
            eta: 1.0,
            max_edits: 2,
            min_matches: 3,
            overlap_len: 500,
            epsilon: 0.2,
            embeddings: 1,
            subsamplings: 1,
            seed: 0,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.q == 0 {
            return fail("q must be at least 1".into());
        }
        if self.kappa < self.q {
            return fail(format!("kappa ({}) must be >= q ({})", self.kappa, self.q));
        }
        if self.m == 0 || self.m > self.kappa {
            return fail(format!(
                "m ({}) must lie in 1..=kappa ({})",
                self.m, self.kappa
            ));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return fail(format!("alpha ({}) must lie in (0, 1]", self.alpha));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return fail(format!("eta ({}) must lie in (0, 1]", self.eta));
        }
        if self.min_matches == 0 {
            return fail("C must be at least 1".into());
        }
        if self.overlap_len == 0 {
            return fail("L must be at least 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return fail(format!("epsilon ({}) must lie in (0, 1)", self.epsilon));
        }
        if self.embeddings == 0 || self.subsamplings == 0 {
            return fail("d and z must be at least 1".into());
        }
        Ok(())
    }

    /// Half-width of the shift tolerance, `(epsilon / 2) * L`.
    pub fn shift_tolerance(&self) -> f64 {
        self.epsilon / 2.0 * self.overlap_len as f64
    }

    /// Half-width of the dense window, `L / 2`.
    pub fn half_window(&self) -> f64 {
        self.overlap_len as f64 / 2.0
    }
}

/// The random material of one (embedding, subsampling) round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Randomness {
    /// CGK random bits, `kappa * |alphabet|` of them.
    pub cgk_bits: Vec<bool>,
    /// Subsampling mask over the `kappa` embedded coordinates, exactly `m` set.
    pub mask: Vec<bool>,
    /// Key of the rank hash.
    pub hash_key: u64,
    kept: Vec<usize>,
}

impl Randomness {
    /// Builds randomness from explicit bit strings.
    pub fn from_parts(cgk_bits: Vec<bool>, mask: Vec<bool>, hash_key: u64) -> Result<Self> {
        if cgk_bits.len() != mask.len() * ALPHABET_SIZE {
            return Err(Error::Config(format!(
                "CGK string has {} bits, expected {}",
                cgk_bits.len(),
                mask.len() * ALPHABET_SIZE
            )));
        }
        let kept = mask
            .iter()
            .enumerate()
            .filter_map(|(idx, &b)| b.then_some(idx))
            .collect();
        Ok(Randomness {
            cgk_bits,
            mask,
            hash_key,
            kept,
        })
    }

    pub fn kappa(&self) -> usize {
        self.mask.len()
    }

    /// Number of one-bits in the mask, i.e. the smooth q-gram length.
    pub fn m(&self) -> usize {
        self.kept.len()
    }

    /// Zero-based embedded coordinates selected by the mask, ascending.
    pub fn kept_coordinates(&self) -> &[usize] {
        &self.kept
    }

    /// The rank hash: maps a smooth q-gram to a 64-bit rank. The rank in the
    /// open unit interval is [`rank_to_unit`] of this value.
    pub fn rank(&self, t: &SmoothQGram) -> u64 {
        xxh3_64_with_seed(t.as_codes(), self.hash_key)
    }
}

/// Maps a 64-bit rank into the open interval (0, 1).
pub fn rank_to_unit(rank: u64) -> f64 {
    ((rank >> 12) as f64 + 0.5) / (1u64 << 52) as f64
}

fn stream_seed(seed: u64, tag: u8, j: usize, k: usize) -> u64 {
    let mut buf = [0u8; 17];
    buf[0] = tag;
    buf[1..9].copy_from_slice(&(j as u64).to_le_bytes());
    buf[9..17].copy_from_slice(&(k as u64).to_le_bytes());
    xxh3_64_with_seed(&buf, seed)
}

/// Derives the randomness of round `(j, k)`, both 1-based.
///
/// The CGK bits depend on `(seed, j)` only and the mask on `(seed, j, k)`, so
/// the rounds of a run with `(d, z)` are a prefix of the rounds with larger
/// `d` or `z`. The rank hash key depends on `seed` only.
pub fn derive_randomness(seed: u64, j: usize, k: usize, params: &Params) -> Result<Randomness> {
    if params.m > params.kappa {
        return Err(Error::Config(format!(
            "m ({}) exceeds kappa ({})",
            params.m, params.kappa
        )));
    }
    if j == 0 || k == 0 {
        return Err(Error::Config("round indices are 1-based".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, b'c', j, 0));
    let cgk_bits = (0..params.kappa * ALPHABET_SIZE)
        .map(|_| rng.gen::<bool>())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, b's', j, k));
    let mut mask = vec![false; params.kappa];
    for idx in sample(&mut rng, params.kappa, params.m) {
        mask[idx] = true;
    }

    let hash_key = stream_seed(seed, b'h', 0, 0);
    Randomness::from_parts(cgk_bits, mask, hash_key)
}

/// A length-`m` smooth q-gram, stored as symbol codes (0..4 for ACGT, 4 for
/// the padding symbol).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SmoothQGram(Box<[u8]>);

impl SmoothQGram {
    pub fn from_codes(codes: Vec<u8>) -> Self {
        debug_assert!(codes.iter().all(|&c| c <= GAP));
        SmoothQGram(codes.into_boxed_slice())
    }

    pub fn as_codes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// A stable 64-bit fingerprint, handy for logging.
    pub fn fingerprint(&self) -> u64 {
        xxh3_64(&self.0)
    }
}

impl fmt::Display for SmoothQGram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in self.0.iter() {
            write!(f, "{}", crate::embedding::code_to_char(c))?;
        }
        Ok(())
    }
}

impl fmt::Debug for SmoothQGram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothQGram({self})")
    }
}

/// The signature of one q-gram occurrence.
///
/// The q-gram itself is `reads[read].seq[pos - 1 .. pos - 1 + q]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub smooth: SmoothQGram,
    pub rank: u64,
    /// Zero-based read index.
    pub read: usize,
    /// One-based start of the q-gram in its read.
    pub pos: usize,
}

impl Signature {
    pub fn rank_unit(&self) -> f64 {
        rank_to_unit(self.rank)
    }

    /// Order used for subsampling: by rank, ties by `(read, pos)`.
    pub fn rank_key(&self) -> (u64, usize, usize) {
        (self.rank, self.read, self.pos)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Read {
    pub name: String,
    /// Uppercase ACGT bytes.
    pub seq: Vec<u8>,
}

/// An indexed collection of reads over ACGT. Read `i` keeps its index for the
/// lifetime of the set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReadSet {
    reads: Vec<Read>,
}

impl ReadSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set, rejecting sequences with characters outside ACGT.
    pub fn from_reads(reads: Vec<Read>) -> Result<Self> {
        for r in &reads {
            if let Some(off) = r
                .seq
                .iter()
                .position(|b| !matches!(b, b'A' | b'C' | b'G' | b'T'))
            {
                return Err(Error::Config(format!(
                    "read '{}' has non-ACGT character at offset {}",
                    r.name, off
                )));
            }
        }
        Ok(ReadSet { reads })
    }

    /// Convenience constructor naming reads `r0, r1, ...`.
    pub fn from_seqs<I, S>(seqs: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let reads = seqs
            .into_iter()
            .enumerate()
            .map(|(i, s)| Read {
                name: format!("r{i}"),
                seq: s.as_ref().to_ascii_uppercase(),
            })
            .collect();
        Self::from_reads(reads)
    }

    pub fn len(&self) -> usize {
        self.reads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reads.is_empty()
    }

    pub fn get(&self, i: usize) -> &Read {
        &self.reads[i]
    }

    pub fn seq(&self, i: usize) -> &[u8] {
        &self.reads[i].seq
    }

    pub fn iter(&self) -> impl Iterator<Item = &Read> {
        self.reads.iter()
    }

    pub fn reads(&self) -> &[Read] {
        &self.reads
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.reads.iter().position(|r| r.name == name)
    }
}
