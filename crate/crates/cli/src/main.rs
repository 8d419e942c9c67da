mod graphfile;

use std::fs::{self, File};
use std::hint::black_box;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use reachlabel::oracle::{generate, verify_labels, GenSpec, GraphKind, VerifyReport};
use reachlabel::{encode, stats, BicliqueProfile, Digraph, EncodeOptions, LabelSet, SchemeId};

#[derive(Parser)]
#[command(name = "rlbl", version, about = "Reachability labels for directed graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random graph as an edge list.
    Generate {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Label every node of a graph file.
    Encode {
        #[command(flatten)]
        enc: EncodeArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Answer one reachability query from a label file.
    Query { labels: PathBuf, u: usize, v: usize },
    /// Label sizes as CSV, from label files or by encoding a graph file.
    Stats {
        labels: Vec<PathBuf>,
        #[arg(long, conflicts_with = "labels")]
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = [SchemeArg::Warmup, SchemeArg::Third, SchemeArg::Average])]
        scheme: Vec<SchemeArg>,
        #[arg(long, value_enum, default_value_t = ProfileArg::Paper)]
        biclique_profile: ProfileArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare labels with BFS reachability.
    Verify(VerifyArgs),
    /// Encode time and query latency at several sizes, as CSV.
    Bench {
        #[arg(long, value_enum, default_value_t = KindArg::Poset)]
        kind: KindArg,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [125, 250, 500, 1000])]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value_t = SchemeArg::Third)]
        scheme: SchemeArg,
        #[arg(long, value_enum, default_value_t = ProfileArg::Paper)]
        biclique_profile: ProfileArg,
        #[arg(long, default_value_t = 20_000)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Clone)]
struct GenArgs {
    #[arg(long, value_enum, default_value_t = KindArg::Digraph)]
    kind: KindArg,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    #[arg(long)]
    layers: Option<usize>,
}

#[derive(Args, Clone, Copy)]
struct EncodeArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::Third)]
    scheme: SchemeArg,
    #[arg(long, value_enum, default_value_t = ProfileArg::Paper)]
    biclique_profile: ProfileArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Verify this graph instead of generated ones.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Check an existing label file for `--input` instead of encoding.
    #[arg(long, requires = "input")]
    labels: Option<PathBuf>,
    #[command(flatten)]
    gen: GenArgs,
    /// Smallest generated n; each trial draws n from `[n-min, n]`.
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Trial `i` uses graph seed `seed + i`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_values_t = [SchemeArg::Warmup, SchemeArg::Third, SchemeArg::Average])]
    scheme: Vec<SchemeArg>,
    #[arg(long, value_enum, default_value_t = ProfileArg::Paper)]
    biclique_profile: ProfileArg,
    /// Also print one CSV row per instance and scheme.
    #[arg(long)]
    csv: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Warmup,
    Third,
    Average,
}

impl SchemeArg {
    fn id(self) -> SchemeId {
        match self {
            Self::Warmup => SchemeId::Warmup,
            Self::Third => SchemeId::Third,
            Self::Average => SchemeId::Average,
        }
    }
}

impl std::fmt::Display for SchemeArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(scheme_name(self.id()))
    }
}

fn scheme_name(s: SchemeId) -> &'static str {
    match s {
        SchemeId::Warmup => "warmup",
        SchemeId::Third => "third",
        SchemeId::Average => "average",
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileArg {
    Paper,
    Force,
}

impl ProfileArg {
    fn profile(self) -> BicliqueProfile {
        match self {
            Self::Paper => BicliqueProfile::Paper,
            Self::Force => BicliqueProfile::Force,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Dag,
    Digraph,
    Poset,
    Layered,
}

impl KindArg {
    fn kind(self) -> GraphKind {
        match self {
            Self::Dag => GraphKind::Dag,
            Self::Digraph => GraphKind::Digraph,
            Self::Poset => GraphKind::Poset,
            Self::Layered => GraphKind::Layered,
        }
    }
}

/// A failed command: its message and process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn mismatch(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<reachlabel::Error> for Failure {
    fn from(e: reachlabel::Error) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn options(enc: EncodeArgs) -> EncodeOptions {
    let mut o = EncodeOptions::new(enc.scheme.id(), enc.biclique_profile.profile());
    o.seed = enc.seed;
    o
}

fn read_graph(path: &Path) -> Result<Digraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let file = graphfile::parse(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    for w in &file.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(file.graph)
}

fn read_labels(path: &Path) -> Result<LabelSet, Failure> {
    let f = File::open(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    LabelSet::read_from(&mut BufReader::new(f)).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn gen_spec(gen: &GenArgs, n: usize, seed: u64) -> Result<GenSpec, Failure> {
    if !(0.0..=1.0).contains(&gen.p) {
        return Err(Failure::usage(format!("--p must lie in [0, 1], got {}", gen.p)));
    }
    if n == 0 {
        return Err(Failure::usage("--n must be at least 1"));
    }
    let mut spec = GenSpec::new(gen.kind.kind(), n, gen.p, seed);
    spec.layers = gen.layers;
    Ok(spec)
}

fn cmd_generate(gen: &GenArgs, seed: u64, output: Option<&Path>) -> CmdResult {
    let text = graphfile::render(&generate(&gen_spec(gen, gen.n, seed)?));
    match output {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_encode(enc: EncodeArgs, input: &Path, output: &Path) -> CmdResult {
    let g = read_graph(input)?;
    let ls = encode(&g, &options(enc))?;
    let mut out = BufWriter::new(File::create(output)?);
    ls.write_to(&mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_query(labels: &Path, u: usize, v: usize) -> CmdResult {
    let f = File::open(labels).map_err(|e| Failure::usage(format!("{}: {e}", labels.display())))?;
    let answer = LabelSet::query_file(&mut BufReader::new(f), u, v)?;
    println!("{answer}");
    Ok(())
}

fn print_stats(out: &mut impl Write, source: &str, ls: &LabelSet) -> CmdResult {
    let s = stats(ls)?;
    let name = scheme_name(s.scheme);
    writeln!(out, "{source},{name},{},total,{},{:.2}", s.n, s.max_bits, s.mean_bits)?;
    for sec in &s.sections {
        writeln!(out, "{source},{name},{},{},{},{:.2}", s.n, sec.name, sec.max_bits, sec.mean_bits)?;
    }
    Ok(())
}

fn cmd_stats(
    labels: &[PathBuf],
    input: Option<&Path>,
    schemes: &[SchemeArg],
    profile: ProfileArg,
    seed: u64,
) -> CmdResult {
    let mut out = io::stdout().lock();
    writeln!(out, "source,scheme,n,section,max_bits,mean_bits")?;
    match input {
        Some(path) => {
            let g = read_graph(path)?;
            for &scheme in schemes {
                let ls = encode(&g, &options(EncodeArgs { scheme, biclique_profile: profile, seed }))?;
                print_stats(&mut out, &path.display().to_string(), &ls)?;
            }
        }
        None if labels.is_empty() => return Err(Failure::usage("give label files or --input")),
        None => {
            for path in labels {
                print_stats(&mut out, &path.display().to_string(), &read_labels(path)?)?;
            }
        }
    }
    Ok(())
}

/// One verified (instance, scheme) pair.
struct Outcome {
    seed: u64,
    scheme: SchemeId,
    report: VerifyReport,
}

fn verify_one(g: &Digraph, seed: u64, scheme: SchemeArg, args: &VerifyArgs) -> Result<Outcome, Failure> {
    let enc = EncodeArgs {
        scheme,
        biclique_profile: args.biclique_profile,
        seed,
    };
    let opts = options(enc);
    let ls = encode(g, &opts)?;
    Ok(Outcome {
        seed,
        scheme: scheme.id(),
        report: verify_labels(g, &ls, opts.exec),
    })
}

fn trial_n(args: &VerifyArgs, seed: u64) -> Result<usize, Failure> {
    let hi = args.gen.n;
    let lo = args.n_min.unwrap_or(hi);
    if lo == 0 || lo > hi {
        return Err(Failure::usage(format!("need 1 <= --n-min <= --n, got {lo} and {hi}")));
    }
    Ok(ChaCha8Rng::seed_from_u64(seed ^ 0x5eed).random_range(lo..=hi))
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let outcomes: Vec<Outcome> = if let Some(input) = &args.input {
        let g = read_graph(input)?;
        match &args.labels {
            Some(path) => {
                let ls = read_labels(path)?;
                if ls.n() != g.n() {
                    return Err(Failure::usage(format!(
                        "label file has {} nodes but the graph has {}",
                        ls.n(),
                        g.n()
                    )));
                }
                vec![Outcome {
                    seed: args.seed,
                    scheme: ls.scheme,
                    report: verify_labels(&g, &ls, Default::default()),
                }]
            }
            None => args
                .scheme
                .iter()
                .map(|&s| verify_one(&g, args.seed, s, args))
                .collect::<Result<_, _>>()?,
        }
    } else {
        let seeds: Vec<u64> = (0..args.trials).map(|i| args.seed.wrapping_add(i)).collect();
        let per_seed: Vec<Vec<Outcome>> = seeds
            .par_iter()
            .map(|&seed| {
                let g = generate(&gen_spec(&args.gen, trial_n(args, seed)?, seed)?);
                args.scheme.iter().map(|&s| verify_one(&g, seed, s, args)).collect()
            })
            .collect::<Result<_, _>>()?;
        per_seed.into_iter().flatten().collect()
    };

    let mut out = io::stdout().lock();
    if args.csv {
        writeln!(out, "seed,scheme,{}", VerifyReport::CSV_HEADER)?;
        for o in &outcomes {
            writeln!(out, "{},{},{}", o.seed, scheme_name(o.scheme), o.report.csv_row())?;
        }
    }
    let instances = if args.input.is_some() { 1 } else { args.trials };
    let pairs: u64 = outcomes.iter().map(|o| o.report.pairs_checked).sum();
    let mismatches: u64 = outcomes.iter().map(|o| o.report.mismatches).sum();
    writeln!(out, "{instances} instances")?;
    writeln!(out, "instances={instances}")?;
    writeln!(out, "encodings={}", outcomes.len())?;
    writeln!(out, "pairs_checked={pairs}")?;
    writeln!(out, "mismatches={mismatches}")?;
    if let Some(max) = outcomes.iter().map(|o| o.report.max_bits).max() {
        writeln!(out, "max_bits={max}")?;
    }
    let first = outcomes
        .iter()
        .find_map(|o| o.report.first_mismatch.map(|(u, v)| (o.seed, o.scheme, u, v)));
    match first {
        None => Ok(()),
        Some((seed, scheme, u, v)) => {
            writeln!(out, "first_failure={seed},{u},{v}")?;
            Err(Failure::mismatch(format!(
                "mismatch: graph seed {seed}, scheme {}, query ({u}, {v})",
                scheme_name(scheme)
            )))
        }
    }
}

/// Query latency counts as flat when the slowest size is within this factor
/// of the fastest.
const FLAT_RATIO: f64 = 2.0;

fn cmd_bench(
    gen: &GenArgs,
    sizes: &[usize],
    enc: EncodeArgs,
    queries: usize,
) -> CmdResult {
    if queries == 0 {
        return Err(Failure::usage("--queries must be positive"));
    }
    let mut out = io::stdout().lock();
    writeln!(out, "scheme,n,encode_ms,query_ns,max_bits,mean_bits")?;
    let mut latencies = Vec::new();
    for &n in sizes {
        let g = generate(&gen_spec(gen, n, enc.seed)?);
        let opts = options(enc);
        let t = Instant::now();
        let ls = encode(&g, &opts)?;
        let encode_ms = t.elapsed().as_secs_f64() * 1e3;
        let mut rng = ChaCha8Rng::seed_from_u64(enc.seed);
        let pairs: Vec<(usize, usize)> = (0..queries)
            .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
            .collect();
        let t = Instant::now();
        for &(u, v) in &pairs {
            black_box(ls.query(black_box(u), black_box(v))?);
        }
        let query_ns = t.elapsed().as_secs_f64() * 1e9 / queries as f64;
        latencies.push(query_ns);
        let s = stats(&ls)?;
        writeln!(
            out,
            "{},{n},{encode_ms:.2},{query_ns:.1},{},{:.2}",
            enc.scheme, s.max_bits, s.mean_bits
        )?;
    }
    let lo = latencies.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = latencies.iter().copied().fold(0.0, f64::max);
    if lo.is_finite() && lo > 0.0 {
        let ratio = hi / lo;
        writeln!(out, "query_latency_ratio={ratio:.2}")?;
        writeln!(out, "query_latency_flat={}", ratio <= FLAT_RATIO)?;
    }
    Ok(())
}

fn configure_threads() -> CmdResult {
    let Ok(v) = std::env::var("RLBL_THREADS") else {
        return Ok(());
    };
    let k: usize = v
        .parse()
        .ok()
        .filter(|&k| k > 0)
        .ok_or_else(|| Failure::usage(format!("RLBL_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn run(cli: Cli) -> CmdResult {
    configure_threads()?;
    match cli.command {
        Command::Generate { gen, seed, output } => cmd_generate(&gen, seed, output.as_deref()),
        Command::Encode { enc, input, output } => cmd_encode(enc, &input, &output),
        Command::Query { labels, u, v } => cmd_query(&labels, u, v),
        Command::Stats {
            labels,
            input,
            scheme,
            biclique_profile,
            seed,
        } => cmd_stats(&labels, input.as_deref(), &scheme, biclique_profile, seed),
        Command::Verify(args) => cmd_verify(&args),
        Command::Bench {
            kind,
            p,
            sizes,
            scheme,
            biclique_profile,
            queries,
            seed,
        } => {
            let gen = GenArgs {
                kind,
                n: 0,
                p,
                layers: None,
            };
            let enc = EncodeArgs {
                scheme,
                biclique_profile,
                seed,
            };
            cmd_bench(&gen, &sizes, enc, queries)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("rlbl: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
