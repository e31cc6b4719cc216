//! CGK embedding of q-grams into Hamming space and smooth q-gram generation.
//!
//! Symbols are coded A=0, C=1, G=2, T=3 and the padding symbol as [`GAP`]
//! (printed as `N`). Step `j` of the embedding (1-based) consumes the block of
//! bits `(j-1)*4 .. j*4` of the CGK string and advances the input pointer by
//! the bit at offset `Index(s[i])` within that block.

use crate::model::{Randomness, SmoothQGram};

pub const ALPHABET_SIZE: usize = 4;
/// Code of the padding symbol.
pub const GAP: u8 = 4;

/// Code of an uppercase nucleotide, `None` for anything else.
#[inline]
pub fn base_code(b: u8) -> Option<u8> {
    match b {
        b'A' => Some(0),
        b'C' => Some(1),
        b'G' => Some(2),
        b'T' => Some(3),
        _ => None,
    }
}

pub fn code_to_char(c: u8) -> char {
    match c {
        0 => 'A',
        1 => 'C',
        2 => 'G',
        3 => 'T',
        _ => 'N',
    }
}

/// A length-kappa embedded string. Once the padding symbol appears, every
/// later symbol is padding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EmbeddedString(Vec<u8>);

impl EmbeddedString {
    pub fn codes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn hamming(&self, other: &EmbeddedString) -> usize {
        hamming(&self.0, &other.0)
    }
}

impl std::fmt::Display for EmbeddedString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0
            .iter()
            .try_for_each(|&c| write!(f, "{}", code_to_char(c)))
    }
}

pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    assert_eq!(a.len(), b.len(), "hamming distance needs equal lengths");
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

#[inline]
fn embed_into(s: &[u8], cgk_bits: &[bool], out: &mut [u8]) {
    let q = s.len();
    let mut i = 0usize;
    for (j, slot) in out.iter_mut().enumerate() {
        if i < q {
            let c = base_code(s[i]).expect("q-gram must be over ACGT");
            *slot = c;
            i += cgk_bits[j * ALPHABET_SIZE + c as usize] as usize;
        } else {
            *slot = GAP;
        }
    }
}

/// CGK-embeds the q-gram `s` (uppercase ACGT) under `cgk_bits`, producing a
/// string of length `cgk_bits.len() / 4`.
///
/// Panics if `s` is longer than the embedded length, is empty, or contains a
/// character outside ACGT.
pub fn cgk_embed(s: &[u8], cgk_bits: &[bool]) -> EmbeddedString {
    assert!(
        cgk_bits.len().is_multiple_of(ALPHABET_SIZE),
        "CGK string length must be a multiple of the alphabet size"
    );
    let kappa = cgk_bits.len() / ALPHABET_SIZE;
    assert!(
        !s.is_empty() && s.len() <= kappa,
        "q-gram length must lie in 1..=kappa"
    );
    let mut out = vec![0u8; kappa];
    embed_into(s, cgk_bits, &mut out);
    EmbeddedString(out)
}

/// Keeps the coordinates of `embedded` selected by `kept` (ascending).
pub fn apply_mask(embedded: &[u8], kept: &[usize]) -> SmoothQGram {
    SmoothQGram::from_codes(kept.iter().map(|&idx| embedded[idx]).collect())
}

/// Generates the smooth q-gram of `s`: its CGK embedding restricted to the
/// one-bits of the round's mask.
pub fn generate_smooth_qgram(s: &[u8], rnd: &Randomness) -> SmoothQGram {
    let kappa = rnd.kappa();
    assert!(
        !s.is_empty() && s.len() <= kappa,
        "q-gram length must lie in 1..=kappa"
    );
    assert_eq!(rnd.cgk_bits.len(), kappa * ALPHABET_SIZE);
    // Small stack buffer covers every practical kappa.
    let mut stack = [0u8; 128];
    let mut heap;
    let buf: &mut [u8] = if kappa <= stack.len() {
        &mut stack[..kappa]
    } else {
        heap = vec![0u8; kappa];
        &mut heap
    };
    embed_into(s, &rnd.cgk_bits, buf);
    apply_mask(buf, rnd.kept_coordinates())
}

/// Probability that `m` coordinates sampled without replacement from two
/// length-`kappa` strings at Hamming distance `d_prime` all agree:
/// `prod_{l < d'} (kappa - m - l) / (kappa - l)`.
pub fn match_probability(kappa: usize, m: usize, d_prime: usize) -> f64 {
    assert!(m <= kappa, "m must not exceed kappa");
    if d_prime > kappa - m {
        return 0.0;
    }
    (0..d_prime)
        .map(|l| (kappa - m - l) as f64 / (kappa - l) as f64)
        .product()
}
