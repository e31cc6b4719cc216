//! Accuracy evaluation against simulator truth, and brute-force matched
//! q-gram statistics.

use std::collections::BTreeSet;
use std::fmt;

use log::warn;
use rayon::prelude::*;

use crate::edit::edit_distance_leq;
use crate::error::{Error, Result};
use crate::model::ReadSet;
use crate::sim::{name_pair, GroundTruth};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    /// Minimum true overlap length (bases of shared reference) for a pair to
    /// count as overlapping.
    pub gamma: usize,
    /// Edit-distance threshold of the overlap problem statement. Recorded for
    /// completeness; the evaluator does not use it.
    pub theta: Option<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            gamma: 500,
            theta: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub reported: usize,
    pub truth_pairs: usize,
}

impl EvalReport {
    fn from_counts(tp: usize, reported: usize, truth_pairs: usize) -> Self {
        let precision = if reported == 0 {
            0.0
        } else {
            tp as f64 / reported as f64
        };
        let recall = if truth_pairs == 0 {
            0.0
        } else {
            tp as f64 / truth_pairs as f64
        };
        EvalReport {
            precision,
            recall,
            f1: f1_score(precision, recall),
            true_positives: tp,
            false_positives: reported - tp,
            false_negatives: truth_pairs - tp,
            reported,
            truth_pairs,
        }
    }

    /// Single-line `key=value` summary.
    pub fn summary_line(&self) -> String {
        format!(
            "precision={:.6} recall={:.6} f1={:.6} tp={} fp={} fn={} reported={} truth={}",
            self.precision,
            self.recall,
            self.f1,
            self.true_positives,
            self.false_positives,
            self.false_negatives,
            self.reported,
            self.truth_pairs
        )
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "reported pairs   {}", self.reported)?;
        writeln!(f, "true pairs       {}", self.truth_pairs)?;
        writeln!(f, "true positives   {}", self.true_positives)?;
        writeln!(f, "false positives  {}", self.false_positives)?;
        writeln!(f, "false negatives  {}", self.false_negatives)?;
        writeln!(f, "precision        {:.4}", self.precision)?;
        writeln!(f, "recall           {:.4}", self.recall)?;
        write!(f, "F1               {:.4}", self.f1)
    }
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Scores reported read pairs (by name, either order) against the truth.
///
/// A reported pair is a true positive iff the two reads' reference intervals
/// share at least `gamma` bases. Duplicate reports of the same unordered pair
/// count once. With nothing reported, precision is 0.
pub fn evaluate(
    reported: &[(String, String)],
    truth: &GroundTruth,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    if cfg.gamma == 0 {
        return Err(Error::Config("gamma must be at least 1".into()));
    }
    let known: std::collections::HashMap<&str, &crate::sim::Placement> = truth
        .placements
        .iter()
        .map(|p| (p.name.as_str(), p))
        .collect();
    let mut pairs = BTreeSet::new();
    for (a, b) in reported {
        for name in [a, b] {
            if !known.contains_key(name.as_str()) {
                return Err(Error::UnknownRead(name.clone()));
            }
        }
        if a != b {
            pairs.insert(name_pair(a, b));
        }
    }
    let truth_pairs = truth.overlapping_pairs(cfg.gamma);
    let pairs: Vec<(String, String)> = pairs.into_iter().collect();
    let tp = pairs
        .par_iter()
        .filter(|(a, b)| known[a.as_str()].overlap_with(known[b.as_str()]) >= cfg.gamma)
        .count();
    if pairs.is_empty() {
        warn!("no overlaps reported; precision is defined as 0");
    }
    Ok(EvalReport::from_counts(tp, pairs.len(), truth_pairs.len()))
}

/// Average counts of q-gram position pairs at each exact edit distance
/// `0..=max_ed`, over a list of read pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct QGramHistogram {
    pub q: usize,
    pub pairs: usize,
    /// Summed counts per edit distance.
    pub totals: Vec<u64>,
}

impl QGramHistogram {
    pub fn average(&self, ed: usize) -> f64 {
        if self.pairs == 0 {
            0.0
        } else {
            self.totals[ed] as f64 / self.pairs as f64
        }
    }

    /// Summed count of q-gram pairs with edit distance at most `ed`.
    pub fn cumulative(&self, ed: usize) -> u64 {
        self.totals[..=ed].iter().sum()
    }
}

/// Default upper bound on q-gram pair comparisons for [`count_matched_qgrams`].
pub const DEFAULT_PAIR_BUDGET: u64 = 2_000_000_000;

/// Counts, for every listed read pair, all q-gram position pairs by edit
/// distance up to `max_ed`, by brute force over every pair of positions.
/// Refuses inputs needing more than `budget` q-gram comparisons.
pub fn count_matched_qgrams(
    reads: &ReadSet,
    pairs: &[(usize, usize)],
    q: usize,
    max_ed: usize,
    budget: u64,
) -> Result<QGramHistogram> {
    if q == 0 {
        return Err(Error::Config("q must be at least 1".into()));
    }
    let grams = |i: usize| (reads.seq(i).len() + 1).saturating_sub(q) as u64;
    let work: u64 = pairs.iter().map(|&(a, b)| grams(a) * grams(b)).sum();
    if work > budget {
        return Err(Error::TooLarge(format!(
            "{work} q-gram comparisons exceed the budget of {budget}"
        )));
    }
    let mut totals = vec![0u64; max_ed + 1];
    for &(a, b) in pairs {
        let (x, y) = (reads.seq(a), reads.seq(b));
        if x.len() < q || y.len() < q {
            continue;
        }
        let rows: Vec<Vec<u64>> = (0..=x.len() - q)
            .into_par_iter()
            .map(|u| {
                let mut row = vec![0u64; max_ed + 1];
                let s = &x[u..u + q];
                for v in 0..=y.len() - q {
                    if let Some(d) = edit_distance_leq(s, &y[v..v + q], max_ed).distance {
                        row[d] += 1;
                    }
                }
                row
            })
            .collect();
        for row in rows {
            for (t, c) in totals.iter_mut().zip(row) {
                *t += c;
            }
        }
    }
    Ok(QGramHistogram {
        q,
        pairs: pairs.len(),
        totals,
    })
}
