//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and then
//! asserts. Run with `cargo test --test acceptance -- --nocapture`.

use std::collections::{BTreeSet, HashSet};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use smoothq::edit::edit_distance_full;
use smoothq::embedding::{apply_mask, cgk_embed, generate_smooth_qgram, match_probability, GAP};
use smoothq::eval::{count_matched_qgrams, evaluate, EvalConfig, DEFAULT_PAIR_BUDGET};
use smoothq::index::{find_similar_qgram_pairs, qgram_at};
use smoothq::overlap::{find_overlaps, max_stab, prepare_index, verify, VerifyResult};
use smoothq::sim::{random_dna, simulate_reads, SimConfig};
use smoothq::{derive_randomness, Params, ReadSet};

fn report(n: u32, title: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("{tag} criterion {n:>2}: {title}: {detail}");
}

fn random_qgram(rng: &mut impl Rng, q: usize) -> Vec<u8> {
    random_dna(rng, q)
}

/// Applies `edits` random substitutions, insertions and deletions, keeping
/// length `q` by pairing every insertion with a deletion.
fn perturb(s: &[u8], edits: usize, rng: &mut impl Rng) -> Vec<u8> {
    let mut t = s.to_vec();
    let mut done = 0;
    while done < edits {
        if edits - done >= 2 && rng.gen_bool(0.4) {
            let del = rng.gen_range(0..t.len());
            t.remove(del);
            let ins = rng.gen_range(0..=t.len());
            t.insert(ins, b"ACGT"[rng.gen_range(0..4)]);
            done += 2;
        } else {
            let at = rng.gen_range(0..t.len());
            t[at] = b"ACGT"[rng.gen_range(0..4)];
            done += 1;
        }
    }
    t
}

#[test]
fn criterion_01_exact_match_certainty() {
    let start = Instant::now();
    let p = Params::default();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut failures = 0;
    for trial in 0..100_000u64 {
        let rnd = derive_randomness(trial % 64, 1, 1 + (trial % 7) as usize, &p).unwrap();
        let s = random_qgram(&mut rng, p.q);
        let t = s.clone();
        if generate_smooth_qgram(&s, &rnd) != generate_smooth_qgram(&t, &rnd) {
            failures += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = failures == 0 && secs < 10.0;
    report(
        1,
        "exact-match certainty",
        pass,
        &format!("failures={failures} of 100000, {secs:.2}s"),
    );
    assert!(pass);
}

#[test]
fn criterion_02_match_probability_fidelity() {
    let start = Instant::now();
    let p = Params::default();
    let (kappa, m) = (28, 21);
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut pass = match_probability(kappa, m, 1) == 0.25;
    let mut details = Vec::new();
    for d in 1..=4usize {
        let a: Vec<u8> = (0..kappa).map(|_| rng.gen_range(0..4u8)).collect();
        let mut b = a.clone();
        for idx in rand::seq::index::sample(&mut rng, kappa, d) {
            b[idx] = (b[idx] + 1 + rng.gen_range(0..3u8)) % 4;
        }
        let trials = 10_000u64;
        let mut hits = 0;
        for t in 0..trials {
            let rnd = derive_randomness(1_000_000 + d as u64 * trials + t, 1, 1, &p).unwrap();
            let kept = rnd.kept_coordinates();
            if apply_mask(&a, kept) == apply_mask(&b, kept) {
                hits += 1;
            }
        }
        let freq = hits as f64 / trials as f64;
        let expect = match_probability(kappa, m, d);
        pass &= (freq - expect).abs() <= 0.03;
        details.push(format!("d'={d} mc={freq:.4} exact={expect:.4}"));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 30.0;
    report(
        2,
        "match probability fidelity",
        pass,
        &format!("{} ({secs:.2}s)", details.join(", ")),
    );
    assert!(pass);
}

#[test]
fn criterion_03_near_match_amplification() {
    let start = Instant::now();
    let cfg = SimConfig {
        reference_length: 20_000,
        n_reads: 40,
        mean_read_length: 2_000,
        error_rate: 0.15,
        seed: 303,
        ..SimConfig::default()
    };
    let (reads, truth, _) = simulate_reads(&cfg).unwrap();
    let pairs: Vec<(usize, usize)> = truth
        .overlapping_pairs(500)
        .keys()
        .take(50)
        .map(|(a, b)| (reads.index_of(a).unwrap(), reads.index_of(b).unwrap()))
        .collect();
    assert_eq!(
        pairs.len(),
        50,
        "simulation must yield 50 overlapping pairs"
    );
    let hist = count_matched_qgrams(&reads, &pairs, 12, 2, DEFAULT_PAIR_BUDGET).unwrap();
    let exact = hist.cumulative(0);
    let near = hist.cumulative(2);
    let ratio = near as f64 / exact.max(1) as f64;
    let secs = start.elapsed().as_secs_f64();
    let pass = exact > 0 && ratio >= 5.0 && secs < 120.0;
    report(
        3,
        "near-match amplification",
        pass,
        &format!("pairs=50 exact={exact} within_2={near} ratio={ratio:.2} ({secs:.1}s)"),
    );
    assert!(pass);
}

/// Random q-grams with planted near duplicates at edit distance 1 or 2.
/// Returns the q-grams and the planted index pairs.
fn planted_qgrams(n: usize, planted: usize, seed: u64) -> (Vec<Vec<u8>>, Vec<(usize, usize)>) {
    let q = 14;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grams: Vec<Vec<u8>> = (0..n - planted)
        .map(|_| random_qgram(&mut rng, q))
        .collect();
    let mut pairs = Vec::new();
    for k in 0..planted {
        let base = k * 3;
        loop {
            let t = perturb(&grams[base], rng.gen_range(1..=2), &mut rng);
            if (1..=2).contains(&edit_distance_full(&grams[base], &t)) {
                grams.push(t);
                break;
            }
        }
        pairs.push((base, grams.len() - 1));
    }
    (grams, pairs)
}

fn write_qgrams(grams: &[Vec<u8>], dir: &std::path::Path) -> std::path::PathBuf {
    let path = dir.join("qgrams.txt");
    let text: String = grams
        .iter()
        .map(|g| format!("{}\n", String::from_utf8_lossy(g)))
        .collect();
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn criterion_04_simjoin_soundness_and_determinism() {
    let start = Instant::now();
    let (grams, planted) = planted_qgrams(5_000, 500, 404);
    let p = Params {
        seed: 4,
        ..Params::default()
    };
    let out = find_similar_qgram_pairs(&grams, &p).unwrap();
    let false_pos = out
        .pairs
        .iter()
        .filter(|sp| {
            let d = edit_distance_full(&grams[sp.a], &grams[sp.b]);
            d > p.max_edits || d != sp.distance
        })
        .count();
    let found: HashSet<(usize, usize)> = out.pairs.iter().map(|sp| (sp.a, sp.b)).collect();
    let recall =
        planted.iter().filter(|pr| found.contains(pr)).count() as f64 / planted.len() as f64;

    let dir = tempfile::tempdir().unwrap();
    let input = write_qgrams(&grams, dir.path());
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_smoothq"))
            .args(["simjoin", "--seed", "4", "-o"])
            .arg(&path)
            .arg(&input)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(path).unwrap()
    };
    let (first, second) = (run("a.tsv"), run("b.tsv"));
    let identical = first == second;
    let lines = first.iter().filter(|&&b| b == b'\n').count() - 1;
    let secs = start.elapsed().as_secs_f64();
    let pass = false_pos == 0 && identical && lines == out.pairs.len() && secs < 60.0;
    report(
        4,
        "similar-pair join soundness and determinism",
        pass,
        &format!(
            "pairs={} false_positives={false_pos} byte_identical={identical} planted_recall={recall:.3} ({secs:.1}s)",
            out.pairs.len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_subset_monotonicity() {
    let (grams, planted) = planted_qgrams(5_000, 500, 505);
    let run = |d: usize, z: usize| -> BTreeSet<(usize, usize)> {
        let p = Params {
            embeddings: d,
            subsamplings: z,
            seed: 5,
            ..Params::default()
        };
        find_similar_qgram_pairs(&grams, &p)
            .unwrap()
            .pairs
            .iter()
            .map(|sp| (sp.a, sp.b))
            .collect()
    };
    let (a, b, c) = (run(1, 1), run(2, 1), run(2, 2));
    let recall = |s: &BTreeSet<(usize, usize)>| {
        planted.iter().filter(|pr| s.contains(pr)).count() as f64 / planted.len() as f64
    };
    let (ra, rb, rc) = (recall(&a), recall(&b), recall(&c));
    let pass = a.is_subset(&b) && b.is_subset(&c) && ra <= rb && rb <= rc;
    report(
        5,
        "subset monotonicity",
        pass,
        &format!(
            "sizes {} <= {} <= {}, planted recall {ra:.3} <= {rb:.3} <= {rc:.3}",
            a.len(),
            b.len(),
            c.len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_06_bruteforce_pipeline_equivalence() {
    let start = Instant::now();
    let cfg = SimConfig {
        reference_length: 8_000,
        n_reads: 20,
        mean_read_length: 1_500,
        error_rate: 0.10,
        seed: 606,
        ..SimConfig::default()
    };
    let (reads, _, _) = simulate_reads(&cfg).unwrap();
    assert!(reads.iter().all(|r| r.seq.len() <= 2_000));
    let p = Params {
        alpha: 1.0,
        eta: 1.0,
        seed: 6,
        ..Params::default()
    };
    let index = prepare_index(&reads, &p).unwrap();

    let rnd = derive_randomness(p.seed, 1, 1, &p).unwrap();
    let smooth: Vec<Vec<_>> = reads
        .iter()
        .map(|r| {
            (1..=(r.seq.len() + 1).saturating_sub(p.q))
                .map(|pos| generate_smooth_qgram(qgram_at(&r.seq, pos, p.q), &rnd))
                .collect()
        })
        .collect();
    let mut mismatched = 0;
    let mut total = 0;
    for i in 0..reads.len() {
        for j in 0..i {
            let mut oracle = Vec::new();
            for (u0, su) in smooth[i].iter().enumerate() {
                for (v0, sv) in smooth[j].iter().enumerate() {
                    if su == sv
                        && edit_distance_full(
                            qgram_at(reads.seq(i), u0 + 1, p.q),
                            qgram_at(reads.seq(j), v0 + 1, p.q),
                        ) <= p.max_edits
                    {
                        oracle.push((u0 + 1, v0 + 1));
                    }
                }
            }
            total += oracle.len();
            if index.matches.get(i, j) != oracle.as_slice() {
                mismatched += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = mismatched == 0 && total > 0 && secs < 120.0;
    report(
        6,
        "brute-force pipeline equivalence",
        pass,
        &format!("pairs=190 mismatched_lists={mismatched} oracle_matches={total} ({secs:.1}s)"),
    );
    assert!(pass);
}

#[test]
fn criterion_07_end_to_end_accuracy() {
    let start = Instant::now();
    let (mut sp, mut sr, mut sf) = (0.0, 0.0, 0.0);
    let mut per_seed = Vec::new();
    for seed in 0..3u64 {
        let cfg = SimConfig {
            error_rate: 0.13,
            seed,
            ..SimConfig::default()
        };
        let (reads, truth, _) = simulate_reads(&cfg).unwrap();
        let out = find_overlaps(
            &reads,
            &Params {
                seed,
                ..Params::default()
            },
        )
        .unwrap();
        let names: Vec<(String, String)> = out
            .overlaps
            .iter()
            .map(|o| (reads.get(o.i).name.clone(), reads.get(o.j).name.clone()))
            .collect();
        let r = evaluate(
            &names,
            &truth,
            &EvalConfig {
                gamma: 500,
                theta: None,
            },
        )
        .unwrap();
        sp += r.precision;
        sr += r.recall;
        sf += r.f1;
        per_seed.push(format!("[{}]", r.summary_line()));
    }
    let (p, r, f) = (sp / 3.0, sr / 3.0, sf / 3.0);
    let secs = start.elapsed().as_secs_f64();
    let pass = p >= 0.95 && r >= 0.80 && f >= 0.87 && secs < 600.0;
    report(
        7,
        "end-to-end synthetic accuracy",
        pass,
        &format!(
            "mean precision={p:.4} recall={r:.4} f1={f:.4} ({secs:.1}s) {}",
            per_seed.join(" ")
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_08_noise_rejection() {
    let start = Instant::now();
    let mut reported = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(8_000 + seed);
        let seqs: Vec<Vec<u8>> = (0..100).map(|_| random_dna(&mut rng, 5_000)).collect();
        let reads = ReadSet::from_seqs(seqs).unwrap();
        reported += find_overlaps(
            &reads,
            &Params {
                seed,
                ..Params::default()
            },
        )
        .unwrap()
        .overlaps
        .len();
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = reported == 0;
    report(
        8,
        "noise rejection",
        pass,
        &format!("overlaps over 20 seeds={reported} ({secs:.1}s)"),
    );
    assert!(pass);
}

#[test]
fn criterion_09_verification_geometry() {
    let p = Params::default();
    let far = (10.0 * p.shift_tolerance()) as usize;
    let mut cluster = vec![(1000, 1000), (1100, 1100), (1200, 1200)];
    cluster.extend([(1000 + far, 1000), (1100 + far, 1100)]);
    let checks = [
        verify(&[(100, 50), (200, 150), (300, 250)], &p)
            == Some(VerifyResult {
                offset: 50,
                pos: 100,
            }),
        verify(&[(100, 50), (200, 150)], &p).is_none(),
        verify(&cluster, &p)
            == Some(VerifyResult {
                offset: 0,
                pos: 1000,
            }),
        max_stab(&[(0.0, 10.0)]) == 0.0,
        max_stab(&[(0.0, 4.0), (2.0, 6.0), (5.0, 9.0)]) == 2.0,
        max_stab(&[(0.0, 1.0), (5.0, 6.0)]) == 0.0,
    ];
    let ok = checks.iter().filter(|&&c| c).count();
    let pass = ok == checks.len();
    report(
        9,
        "verification geometry",
        pass,
        &format!("{ok}/{} examples", checks.len()),
    );
    assert!(pass);
}

#[test]
fn criterion_10_cgk_lower_bound() {
    let p = Params::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let (mut ok, mut trials) = (0, 0);
    let mut by_ed = [[0usize; 2]; 5];
    let mut unfinished_failures = 0;
    while trials < 1_000 {
        let s = random_qgram(&mut rng, p.q);
        let t = perturb(&s, rng.gen_range(1..=4), &mut rng);
        let ed = edit_distance_full(&s, &t);
        if ed == 0 || ed > 4 {
            continue;
        }
        let rnd = derive_randomness(50_000 + trials as u64, 1, 1, &p).unwrap();
        let (es, et) = (cgk_embed(&s, &rnd.cgk_bits), cgk_embed(&t, &rnd.cgk_bits));
        let good = es.hamming(&et) >= ed;
        ok += good as usize;
        by_ed[ed][0] += good as usize;
        by_ed[ed][1] += 1;
        // A walk that never reaches padding left part of its input unread.
        if !good && (!es.codes().contains(&GAP) || !et.codes().contains(&GAP)) {
            unfinished_failures += 1;
        }
        trials += 1;
    }
    let rate = ok as f64 / trials as f64;
    let pass = rate >= 0.99;
    let breakdown: Vec<String> = (1..=4)
        .map(|d| format!("ed{d}={}/{}", by_ed[d][0], by_ed[d][1]))
        .collect();
    report(
        10,
        "CGK lower bound",
        pass,
        &format!(
            "HAM>=ED in {ok}/{trials} ({rate:.3}); {}; failures with an unfinished walk={unfinished_failures}",
            breakdown.join(" ")
        ),
    );
    assert!(pass);
}
