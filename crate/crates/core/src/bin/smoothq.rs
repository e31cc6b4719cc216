//! Command-line front end.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;

use smoothq::eval::{count_matched_qgrams, evaluate, EvalConfig, DEFAULT_PAIR_BUDGET};
use smoothq::fasta::{read_fasta, write_fasta, NonAcgtPolicy};
use smoothq::index::find_similar_qgram_pairs;
use smoothq::output::{format_overlaps, read_overlaps};
use smoothq::overlap::{find_overlaps, find_overlaps_both_strands};
use smoothq::sim::{simulate_reads, GroundTruth, SimConfig};
use smoothq::{Error, Params};

#[derive(Parser)]
#[command(
    name = "smoothq",
    version,
    about = "Smooth q-gram overlap detection for long, error-prone reads"
)]
struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect overlapping read pairs and their shared substrings.
    Overlap(OverlapArgs),
    /// Find pairs of q-grams within a small edit distance.
    Simjoin(SimjoinArgs),
    /// Simulate error-prone reads with known placements.
    Simulate(SimulateArgs),
    /// Score reported overlaps against simulated truth.
    Eval(EvalArgs),
    /// Brute-force histogram of matched q-gram pairs by edit distance.
    QgramStats(QgramStatsArgs),
}

#[derive(Args, Clone)]
struct ParamArgs {
    /// q-gram length.
    #[arg(long, default_value_t = 14)]
    q: usize,
    /// Smooth q-gram length.
    #[arg(long, default_value_t = 21)]
    m: usize,
    /// Embedded length [default: 2q].
    #[arg(long)]
    kappa: Option<usize>,
    /// Signature selection rate.
    #[arg(long, default_value_t = 0.15)]
    alpha: f64,
    /// Frequency filter threshold (1 disables the filter).
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Edit distance threshold K.
    #[arg(long = "max-edits", visible_alias = "K", default_value_t = 2)]
    max_edits: usize,
    /// Minimum matched signatures C.
    #[arg(long = "min-matches", visible_alias = "C", default_value_t = 3)]
    min_matches: usize,
    /// Targeting overlap length L.
    #[arg(long = "overlap-len", visible_alias = "L", default_value_t = 500)]
    overlap_len: usize,
    /// Error tolerance rate.
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
    /// Number of CGK embeddings (simjoin).
    #[arg(long, visible_alias = "d", default_value_t = 1)]
    embeddings: usize,
    /// Number of subsamplings (simjoin).
    #[arg(long, visible_alias = "z", default_value_t = 1)]
    subsamplings: usize,
    /// Master randomness seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ParamArgs {
    fn params(&self) -> Result<Params, Error> {
        let p = Params {
            q: self.q,
            m: self.m,
            kappa: self.kappa.unwrap_or(2 * self.q),
            alpha: self.alpha,
            eta: self.eta,
            max_edits: self.max_edits,
            min_matches: self.min_matches,
            overlap_len: self.overlap_len,
            epsilon: self.epsilon,
            embeddings: self.embeddings,
            subsamplings: self.subsamplings,
            seed: self.seed,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NonAcgt {
    Reject,
    Mask,
}

impl From<NonAcgt> for NonAcgtPolicy {
    fn from(v: NonAcgt) -> Self {
        match v {
            NonAcgt::Reject => NonAcgtPolicy::Reject,
            NonAcgt::Mask => NonAcgtPolicy::Mask,
        }
    }
}

#[derive(Args)]
struct OverlapArgs {
    /// FASTA/FASTQ input, plain or gzip.
    reads: PathBuf,
    /// Output TSV [default: stdout].
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = NonAcgt::Reject)]
    non_acgt: NonAcgt,
    /// Also match against reverse complements.
    #[arg(long)]
    both_strands: bool,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct SimjoinArgs {
    /// One q-gram per line, or FASTA/FASTQ with --from-reads.
    input: PathBuf,
    /// Treat the input as reads and join all of their q-grams.
    #[arg(long)]
    from_reads: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Writes <prefix>.fa and <prefix>.truth.tsv.
    #[arg(long)]
    out_prefix: PathBuf,
    #[arg(long, default_value_t = 200_000)]
    reference_length: usize,
    #[arg(long, default_value_t = 400)]
    n_reads: usize,
    #[arg(long, default_value_t = 4_000)]
    mean_read_length: usize,
    #[arg(long, default_value_t = 0.15)]
    error_rate: f64,
    #[arg(long)]
    both_strands: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EvalArgs {
    /// Overlap TSV produced by `overlap`.
    #[arg(long)]
    overlaps: PathBuf,
    /// Truth TSV produced by `simulate`.
    #[arg(long)]
    truth: PathBuf,
    /// Minimum true overlap length.
    #[arg(long, default_value_t = 500)]
    gamma: usize,
    /// Edit-distance threshold (recorded only).
    #[arg(long)]
    theta: Option<usize>,
}

#[derive(Args)]
struct QgramStatsArgs {
    reads: PathBuf,
    /// Use the truly overlapping pairs from this truth TSV; otherwise every
    /// pair of reads is compared.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    gamma: usize,
    #[arg(long, default_value_t = 12)]
    q: usize,
    #[arg(long, default_value_t = 2)]
    max_ed: usize,
    /// Use at most this many read pairs.
    #[arg(long)]
    max_pairs: Option<usize>,
    /// Refuse inputs needing more q-gram comparisons than this.
    #[arg(long, default_value_t = DEFAULT_PAIR_BUDGET)]
    budget: u64,
    #[arg(long, value_enum, default_value_t = NonAcgt::Reject)]
    non_acgt: NonAcgt,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| {
            Error::Write {
                path: p.to_path_buf(),
                source,
            }
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_err(path: Option<&Path>) -> impl Fn(io::Error) -> Error + '_ {
    move |source| Error::Write {
        path: path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf),
        source,
    }
}

fn run_overlap(a: &OverlapArgs) -> Result<(), Error> {
    let params = a.params.params()?;
    let reads = read_fasta(&a.reads, a.non_acgt.into())?;
    let out = if a.both_strands {
        find_overlaps_both_strands(&reads, &params)?
    } else {
        find_overlaps(&reads, &params)?
    };
    let path = a.output.as_deref();
    format_overlaps(&out.overlaps, &reads, sink(path)?).map_err(write_err(path))
}

fn load_qgrams(path: &Path, q: usize) -> Result<Vec<Vec<u8>>, Error> {
    let file = File::open(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let s = line.trim().to_ascii_uppercase();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        if s.len() != q || !s.bytes().all(|b| matches!(b, b'A' | b'C' | b'G' | b'T')) {
            return Err(Error::Format {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("expected a length-{q} ACGT q-gram"),
            });
        }
        out.push(s.into_bytes());
    }
    Ok(out)
}

fn run_simjoin(a: &SimjoinArgs) -> Result<(), Error> {
    let params = a.params.params()?;
    let qgrams = if a.from_reads {
        let reads = read_fasta(&a.input, NonAcgtPolicy::Reject)?;
        reads
            .iter()
            .flat_map(|r| {
                r.seq
                    .windows(params.q)
                    .map(<[u8]>::to_vec)
                    .collect::<Vec<_>>()
            })
            .collect()
    } else {
        load_qgrams(&a.input, params.q)?
    };
    let out = find_similar_qgram_pairs(&qgrams, &params)?;
    let path = a.output.as_deref();
    let mut w = sink(path)?;
    let werr = write_err(path);
    writeln!(w, "#index_a\tindex_b\tqgram_a\tqgram_b\tedit_distance").map_err(&werr)?;
    for p in &out.pairs {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}",
            p.a,
            p.b,
            String::from_utf8_lossy(&qgrams[p.a]),
            String::from_utf8_lossy(&qgrams[p.b]),
            p.distance
        )
        .map_err(&werr)?;
    }
    w.flush().map_err(&werr)
}

fn run_simulate(a: &SimulateArgs) -> Result<(), Error> {
    let cfg = SimConfig {
        reference_length: a.reference_length,
        n_reads: a.n_reads,
        mean_read_length: a.mean_read_length,
        error_rate: a.error_rate,
        both_strands: a.both_strands,
        seed: a.seed,
        ..SimConfig::default()
    };
    let (reads, truth, _) = simulate_reads(&cfg)?;
    let prefix = a.out_prefix.to_string_lossy();
    write_fasta(&reads, format!("{prefix}.fa"))?;
    truth.write(format!("{prefix}.truth.tsv"))
}

fn run_eval(a: &EvalArgs) -> Result<(), Error> {
    let records = read_overlaps(&a.overlaps)?;
    let truth = GroundTruth::read(&a.truth)?;
    let pairs: Vec<(String, String)> = records.into_iter().map(|r| (r.name_i, r.name_j)).collect();
    let cfg = EvalConfig {
        gamma: a.gamma,
        theta: a.theta,
    };
    let report = evaluate(&pairs, &truth, &cfg)?;
    println!("{report}");
    println!("{} gamma={}", report.summary_line(), cfg.gamma);
    Ok(())
}

fn run_qgram_stats(a: &QgramStatsArgs) -> Result<(), Error> {
    let reads = read_fasta(&a.reads, a.non_acgt.into())?;
    let mut pairs: Vec<(usize, usize)> = match &a.truth {
        Some(t) => {
            let truth = GroundTruth::read(t)?;
            truth
                .overlapping_pairs(a.gamma)
                .into_keys()
                .map(|(x, y)| {
                    let idx = |n: &str| {
                        reads
                            .index_of(n)
                            .ok_or_else(|| Error::UnknownRead(n.to_string()))
                    };
                    Ok((idx(&x)?, idx(&y)?))
                })
                .collect::<Result<_, Error>>()?
        }
        None => (0..reads.len())
            .flat_map(|i| (i + 1..reads.len()).map(move |j| (i, j)))
            .collect(),
    };
    if let Some(max) = a.max_pairs {
        pairs.truncate(max);
    }
    let h = count_matched_qgrams(&reads, &pairs, a.q, a.max_ed, a.budget)?;
    println!("#ed\ttotal\taverage_per_pair");
    for ed in 0..=a.max_ed {
        println!("{ed}\t{}\t{:.3}", h.totals[ed], h.average(ed));
    }
    let exact = h.totals[0];
    let near = h.cumulative(a.max_ed);
    let ratio = if exact > 0 {
        near as f64 / exact as f64
    } else {
        f64::INFINITY
    };
    println!(
        "pairs={} q={} exact={} within_{}={} ratio={:.3}",
        h.pairs, a.q, exact, a.max_ed, near, ratio
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            warn!("could not configure thread pool: {e}");
        }
    }
    let result = match &cli.command {
        Command::Overlap(a) => run_overlap(a),
        Command::Simjoin(a) => run_simjoin(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Eval(a) => run_eval(a),
        Command::QgramStats(a) => run_qgram_stats(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
