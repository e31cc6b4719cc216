//! Unit-cost edit (Levenshtein) distance: a thresholded banded version used to
//! confirm bucket collisions, and the full quadratic DP used as an oracle.

/// Outcome of a thresholded edit distance query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EditResult {
    pub within: bool,
    /// Exact distance when `within`, otherwise `None`.
    pub distance: Option<usize>,
}

impl EditResult {
    fn exceeded() -> Self {
        EditResult {
            within: false,
            distance: None,
        }
    }
}

const INF: usize = usize::MAX / 4;

/// Decides whether `ED(s, t) <= k`, returning the exact distance if so.
///
/// Only the diagonal band of width `2k + 1` is filled, and the scan stops as
/// soon as every cell of a row exceeds `k`.
pub fn edit_distance_leq(s: &[u8], t: &[u8], k: usize) -> EditResult {
    let (n, m) = (s.len(), t.len());
    if n.abs_diff(m) > k {
        return EditResult::exceeded();
    }
    if n == 0 || m == 0 {
        let d = n.max(m);
        return EditResult {
            within: true,
            distance: Some(d),
        };
    }

    let mut prev = vec![INF; m + 1];
    let mut cur = vec![INF; m + 1];
    for (j, cell) in prev.iter_mut().enumerate().take(k.min(m) + 1) {
        *cell = j;
    }

    for i in 1..=n {
        let lo = i.saturating_sub(k);
        let hi = (i + k).min(m);
        let mut row_min = INF;
        if lo == 0 {
            cur[0] = i;
            row_min = i;
        } else {
            cur[lo - 1] = INF;
        }
        let a = s[i - 1];
        for j in lo.max(1)..=hi {
            let sub = prev[j - 1] + (a != t[j - 1]) as usize;
            let del = prev[j] + 1;
            let ins = cur[j - 1] + 1;
            let v = sub.min(del).min(ins);
            cur[j] = v;
            row_min = row_min.min(v);
        }
        if row_min > k {
            return EditResult::exceeded();
        }
        std::mem::swap(&mut prev, &mut cur);
    }

    let d = prev[m];
    if d <= k {
        EditResult {
            within: true,
            distance: Some(d),
        }
    } else {
        EditResult::exceeded()
    }
}

/// Exact Levenshtein distance by the full `O(|s| |t|)` DP.
pub fn edit_distance_full(s: &[u8], t: &[u8]) -> usize {
    let m = t.len();
    let mut prev: Vec<usize> = (0..=m).collect();
    let mut cur = vec![0usize; m + 1];
    for (i, &a) in s.iter().enumerate() {
        cur[0] = i + 1;
        for j in 1..=m {
            cur[j] = (prev[j - 1] + (a != t[j - 1]) as usize)
                .min(prev[j] + 1)
                .min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}
