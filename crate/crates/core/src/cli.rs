//! The `typealign` command-line front end.
//!
//! Every stage reads and writes plain files so stages can be rerun on their
//! own; `pipeline` chains them from a single configuration file.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::alignment::{score_all_pairs, AlignmentTable};
use crate::error::{Error, Result};
use crate::evaluation::{
    build_gt1, default_thetas, eval_gt1, eval_gt2, eval_gt3, parse_thetas, InstanceMatchGroundTruth,
    ManualAlignmentGroundTruth, RrMode, Sweep, TypePairGroundTruth, DEFAULT_RETRIEVAL_DEPTH,
};
use crate::ingest::{self, IngestConfig, IngestStats, OWL_SAME_AS, RDF_TYPE};
use crate::keyvalue;
use crate::similarity::SimilarityMeasure;
use crate::stats::{
    consolidate_profiles, count_type_tokens, frequency_histogram, FrequencyHistogram, ProfileSet, SkewLimits,
    DEFAULT_MAX_TOKENS_PER_TYPE, DEFAULT_MIN_TOKEN_COUNT, HISTOGRAM_BUCKETS,
};
use crate::synth::{self, SynthConfig};

#[derive(Debug, Parser)]
#[command(
    name = "typealign",
    version,
    about = "Token-profile type alignment between two RDF knowledge graphs"
)]
pub struct Cli {
    /// Worker threads for shardable stages (defaults to the number of CPUs).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Print subject, triple and type counts of N-Triples files as CSV.
    IngestStats(IngestStatsArgs),
    /// Build the consolidated type-token profile file of one graph.
    Stats(StatsArgs),
    /// Score every cross-graph type pair.
    Align(AlignArgs),
    /// Evaluate an alignment table against a ground truth.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Token type-frequency histogram of both profile files.
    Histogram(HistogramArgs),
    /// Generate two synthetic graphs with planted alignments.
    Synth(SynthArgs),
    /// Run every stage from a key=value configuration file.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    #[arg(long, default_value = RDF_TYPE)]
    pub type_predicate: String,
    /// Keep only type IRIs with this prefix.
    #[arg(long)]
    pub type_namespace: Option<String>,
    /// Abort on the first malformed line instead of skipping it.
    #[arg(long)]
    pub strict: bool,
}

impl GraphArgs {
    fn ingest_config(&self) -> IngestConfig {
        IngestConfig {
            type_predicate: self.type_predicate.clone(),
            type_namespace_filter: self.type_namespace.clone(),
            strict: self.strict,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct IngestStatsArgs {
    /// N-Triples files (optionally .gz); several files are merged.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Also write the CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    /// N-Triples files (optionally .gz); several files are merged.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MIN_TOKEN_COUNT, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_count: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_TOKENS_PER_TYPE as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_tokens: u64,
    #[command(flatten)]
    pub graph: GraphArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AlignArgs {
    #[arg(long)]
    pub profiles_a: PathBuf,
    #[arg(long)]
    pub profiles_b: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma separated subset of jaccard,g_jaccard,log_tf.
    #[arg(long, default_value = "jaccard,g_jaccard,log_tf", value_delimiter = ',', value_parser = parse_measure)]
    pub measures: Vec<SimilarityMeasure>,
}

fn parse_measure(s: &str) -> std::result::Result<SimilarityMeasure, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<RrMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_theta(s: &str) -> std::result::Result<f64, String> {
    parse_thetas(s)
        .map_err(|e| e.to_string())
        .and_then(|v| v.first().copied().ok_or_else(|| "empty threshold".to_string()))
}

fn parse_k(s: &str) -> std::result::Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(format!("k must be a positive integer, got {s:?}")),
    }
}

fn parse_k_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    let ks: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("invalid k {p:?}")))
        .collect::<std::result::Result<_, _>>()?;
    if ks.is_empty() || ks.contains(&0) {
        return Err("every k must be at least 1".into());
    }
    Ok(ks)
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long, value_parser = parse_measure)]
    pub measure: SimilarityMeasure,
    /// Comma separated thresholds in [0, 1]; defaults to 0.00, 0.01, ..., 1.00.
    #[arg(long, value_delimiter = ',', value_parser = parse_theta)]
    pub thetas: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
}

impl SweepArgs {
    fn thetas(&self) -> Vec<f64> {
        self.thetas.clone().unwrap_or_else(default_thetas)
    }
}

#[derive(Debug, Clone, Args)]
pub struct LinkArgs {
    #[arg(long, default_value = OWL_SAME_AS)]
    pub sameas_predicate: String,
    /// IRI prefix of graph A instances; links are oriented A -> B.
    #[arg(long)]
    pub graph_a_prefix: Option<String>,
    /// N-Triples files of graph A.
    #[arg(long, num_args = 1..)]
    pub kg_a: Vec<PathBuf>,
    /// N-Triples files of graph B.
    #[arg(long, num_args = 1..)]
    pub kg_b: Vec<PathBuf>,
    #[arg(long)]
    pub type_namespace_a: Option<String>,
    #[arg(long)]
    pub type_namespace_b: Option<String>,
    #[arg(long, default_value = RDF_TYPE)]
    pub type_predicate: String,
    #[arg(long)]
    pub strict: bool,
}

impl LinkArgs {
    fn config(&self, namespace: Option<&String>) -> IngestConfig {
        IngestConfig {
            type_predicate: self.type_predicate.clone(),
            sameas_predicate: self.sameas_predicate.clone(),
            type_namespace_filter: namespace.cloned(),
            graph_a_prefix: self.graph_a_prefix.clone(),
            strict: self.strict,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Precision/recall sweep against type pairs implied by sameAs links.
    Gt1(Gt1Args),
    /// Pairs completeness / reduction ratio sweep over the instance space.
    Gt2(Gt2Args),
    /// Mapping and top-k coverage against manual judgments.
    Gt3(Gt3Args),
}

#[derive(Debug, Clone, Args)]
pub struct Gt1Args {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// GT1 TSV (`type_a \t type_b`). Without it, GT1 is built from
    /// --sameas, --kg-a and --kg-b.
    #[arg(long)]
    pub gt: Option<PathBuf>,
    #[arg(long)]
    pub sameas: Option<PathBuf>,
    /// Write the GT1 built from sameAs links here.
    #[arg(long)]
    pub write_gt: Option<PathBuf>,
    #[command(flatten)]
    pub links: LinkArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Gt2Args {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// sameAs N-Triples file.
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long, default_value = "lower-bound", value_parser = parse_mode)]
    pub mode: RrMode,
    #[command(flatten)]
    pub links: LinkArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Gt3Args {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long, value_parser = parse_measure)]
    pub measure: SimilarityMeasure,
    /// Accepted pairs TSV (`source_type \t target_type`).
    #[arg(long)]
    pub gt: PathBuf,
    /// Sampled source types, one per line.
    #[arg(long)]
    pub sources: Option<PathBuf>,
    #[arg(long = "k", default_value = "1,3,5", value_delimiter = ',', value_parser = parse_k)]
    pub k_list: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_RETRIEVAL_DEPTH)]
    pub depth: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct HistogramArgs {
    #[arg(long)]
    pub profiles_a: PathBuf,
    #[arg(long)]
    pub profiles_b: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// key=value file with synthetic graph parameters.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub config: PathBuf,
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let mut stdout = std::io::stdout().lock();
    match run(cli, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_data_error() {
                2
            } else {
                1
            }
        }
    }
}

/// Runs a parsed command on a pool of the requested size, writing the
/// human-readable summary to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n as usize);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?;
    let mut buffer = Vec::new();
    let result = pool.install(|| dispatch(cli.command, &mut buffer));
    out.write_all(&buffer).map_err(|e| Error::io("<stdout>", e))?;
    result
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::IngestStats(a) => ingest_stats(&a, out),
        Command::Stats(a) => stats(&a, out),
        Command::Align(a) => align(&a, out),
        Command::Eval(EvalCommand::Gt1(a)) => eval_gt1_cmd(&a, out),
        Command::Eval(EvalCommand::Gt2(a)) => eval_gt2_cmd(&a, out),
        Command::Eval(EvalCommand::Gt3(a)) => eval_gt3_cmd(&a, out),
        Command::Histogram(a) => histogram(&a, out),
        Command::Synth(a) => synth_cmd(&a, out),
        Command::Pipeline(a) => pipeline(&a, out),
    }
}

fn require_inputs<'a>(paths: impl IntoIterator<Item = &'a Path>) -> Result<()> {
    for p in paths {
        if !p.exists() {
            return Err(Error::io(
                p,
                std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
            ));
        }
    }
    Ok(())
}

fn say(out: &mut dyn Write, msg: impl AsRef<str>) -> Result<()> {
    writeln!(out, "{}", msg.as_ref()).map_err(|e| Error::io("<stdout>", e))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::io(path, e))
}

fn ingest_stats(a: &IngestStatsArgs, out: &mut dyn Write) -> Result<()> {
    require_inputs(a.input.iter().map(PathBuf::as_path))?;
    let config = a.graph.ingest_config();
    let parsed = ingest::read_many(&a.input, config.strict)?;
    let stats = IngestStats::compute(&parsed, &config);
    let csv = format!("{}\n{}\n", IngestStats::CSV_HEADER, stats.csv_row());
    if let Some(path) = &a.out {
        write_file(path, &csv)?;
    }
    out.write_all(csv.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

fn stats(a: &StatsArgs, out: &mut dyn Write) -> Result<()> {
    require_inputs(a.input.iter().map(PathBuf::as_path))?;
    let limits = SkewLimits::new(a.min_count, a.max_tokens as usize)?;
    let (table, ingest_stats) = ingest::load_graph(&a.input, &a.graph.ingest_config())?;
    if ingest_stats.malformed_lines > 0 {
        log::warn!("skipped {} malformed lines", ingest_stats.malformed_lines);
    }
    let counts = count_type_tokens(table.records());
    let profiles = consolidate_profiles(&counts, limits);
    profiles.save(&a.out)?;
    say(
        out,
        format!(
            "{} instances, {} type-token counts -> {} profiles ({} entries) in {}",
            table.len(),
            counts.len(),
            profiles.len(),
            profiles.entry_count(),
            a.out.display()
        ),
    )
}

fn align(a: &AlignArgs, out: &mut dyn Write) -> Result<()> {
    require_inputs([a.profiles_a.as_path(), a.profiles_b.as_path()])?;
    let pa = ProfileSet::load(&a.profiles_a)?;
    let pb = ProfileSet::load(&a.profiles_b)?;
    let mut measures = a.measures.clone();
    measures.sort();
    measures.dedup();
    let table = score_all_pairs(&pa, &pb, &measures)?;
    table.save(&a.out)?;
    say(
        out,
        format!(
            "{} x {} types -> {} pairs in {}",
            pa.len(),
            pb.len(),
            table.len(),
            a.out.display()
        ),
    )
}

fn report_sweep(out: &mut dyn Write, label: &str, sweep: &Sweep, path: &Path) -> Result<()> {
    sweep.save(path)?;
    match sweep.best() {
        Some(best) => say(
            out,
            format!(
                "{label}: best f={:.4} at theta={:.2} ({:.4}, {:.4}) -> {}",
                best.metrics.f_measure,
                best.theta,
                best.metrics.primary,
                best.metrics.secondary,
                path.display()
            ),
        ),
        None => Ok(()),
    }
}

fn load_links_and_tables(
    sameas: &Path,
    links: &LinkArgs,
) -> Result<(ingest::SameAsLinks, ingest::PropertyTable, ingest::PropertyTable)> {
    if links.kg_a.is_empty() || links.kg_b.is_empty() {
        return Err(Error::Config("--kg-a and --kg-b are required".into()));
    }
    require_inputs(
        std::iter::once(sameas)
            .chain(links.kg_a.iter().map(PathBuf::as_path))
            .chain(links.kg_b.iter().map(PathBuf::as_path)),
    )?;
    let link_set = ingest::load_sameas(sameas, &links.config(None))?;
    let (table_a, _) = ingest::load_graph(&links.kg_a, &links.config(links.type_namespace_a.as_ref()))?;
    let (table_b, _) = ingest::load_graph(&links.kg_b, &links.config(links.type_namespace_b.as_ref()))?;
    Ok((link_set, table_a, table_b))
}

fn eval_gt1_cmd(a: &Gt1Args, out: &mut dyn Write) -> Result<()> {
    require_inputs([a.sweep.table.as_path()])?;
    let gt = match (&a.gt, &a.sameas) {
        (Some(path), _) => {
            require_inputs([path.as_path()])?;
            TypePairGroundTruth::load(path)?
        }
        (None, Some(sameas)) => {
            let (links, ta, tb) = load_links_and_tables(sameas, &a.links)?;
            let built = build_gt1(&links, &ta, &tb);
            if built.missing_subjects > 0 {
                log::warn!("{} link endpoints have no record", built.missing_subjects);
            }
            if let Some(path) = &a.write_gt {
                built.ground_truth.save(path)?;
            }
            built.ground_truth
        }
        (None, None) => return Err(Error::Config("either --gt or --sameas is required".into())),
    };
    let table = AlignmentTable::load(&a.sweep.table)?;
    let sweep = crate::evaluation::sweep(&table, a.sweep.measure, &a.sweep.thetas(), |r| eval_gt1(r, &gt))?;
    report_sweep(
        out,
        &format!("gt1 {} (precision, recall)", a.sweep.measure),
        &sweep,
        &a.sweep.out,
    )
}

fn eval_gt2_cmd(a: &Gt2Args, out: &mut dyn Write) -> Result<()> {
    require_inputs([a.sweep.table.as_path()])?;
    let (links, ta, tb) = load_links_and_tables(&a.gt, &a.links)?;
    let gt = InstanceMatchGroundTruth::from_tables(&links, &ta, &tb)?;
    let table = AlignmentTable::load(&a.sweep.table)?;
    let sweep = crate::evaluation::sweep(&table, a.sweep.measure, &a.sweep.thetas(), |r| {
        eval_gt2(r, &gt, a.mode).map(|m| m.metrics)
    })?;
    say(out, format!("gt2 pc_ceiling={:.4}", gt.pc_ceiling()))?;
    report_sweep(out, &format!("gt2 {} (pc, rr)", a.sweep.measure), &sweep, &a.sweep.out)
}

fn eval_gt3_cmd(a: &Gt3Args, out: &mut dyn Write) -> Result<()> {
    require_inputs(
        [a.table.as_path(), a.gt.as_path()]
            .into_iter()
            .chain(a.sources.as_deref()),
    )?;
    let gt = ManualAlignmentGroundTruth::load(&a.gt, a.sources.as_deref())?;
    let table = AlignmentTable::load(&a.table)?;
    let report = eval_gt3(&table, a.measure, &gt, &a.k_list, a.depth)?;
    write_file(&a.out, &format!("{}\n{}\n", report.csv_header(), report.csv_row()))?;
    say(
        out,
        format!(
            "gt3 {}: {} of {} sources covered; {} -> {}",
            a.measure,
            report.covered,
            report.sampled,
            report.csv_row(),
            a.out.display()
        ),
    )
}

fn histogram_csv(rows: &[(&str, &FrequencyHistogram)]) -> String {
    let mut csv = String::from("kg,lower,upper,count\n");
    for (kg, h) in rows {
        for i in 0..HISTOGRAM_BUCKETS {
            let (lo, hi) = FrequencyHistogram::bucket_bounds(i);
            csv.push_str(&format!("{kg},{lo:.1},{hi:.1},{}\n", h.buckets[i]));
        }
    }
    csv
}

fn histogram(a: &HistogramArgs, out: &mut dyn Write) -> Result<()> {
    require_inputs([a.profiles_a.as_path(), a.profiles_b.as_path()])?;
    let ha = frequency_histogram(&ProfileSet::load(&a.profiles_a)?)?;
    let hb = frequency_histogram(&ProfileSet::load(&a.profiles_b)?)?;
    write_file(&a.out, &histogram_csv(&[("a", &ha), ("b", &hb)]))?;
    for (kg, h) in [("a", &ha), ("b", &hb)] {
        say(
            out,
            format!(
                "{kg}: {} tokens over {} types, {} in {}",
                h.total(),
                h.type_count,
                h.buckets[0],
                FrequencyHistogram::label(0)
            ),
        )?;
    }
    Ok(())
}

fn synth_cmd(a: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    require_inputs([a.config.as_path()])?;
    let config = SynthConfig::load(&a.config)?;
    let written = synth::write_dir(&config, &a.out_dir)?;
    say(out, format!("wrote {} files to {}", written.len(), a.out_dir.display()))
}

/// Settings of the `pipeline` command.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub kg_a: Vec<PathBuf>,
    pub kg_b: Vec<PathBuf>,
    pub sameas: PathBuf,
    pub gt1: Option<PathBuf>,
    pub gt3: Option<PathBuf>,
    pub gt3_sources: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub type_predicate: String,
    pub sameas_predicate: String,
    pub type_namespace_filter_a: Option<String>,
    pub type_namespace_filter_b: Option<String>,
    pub graph_a_prefix: Option<String>,
    pub strict: bool,
    pub min_token_count: u64,
    pub max_tokens_per_type: usize,
    pub measures: Vec<SimilarityMeasure>,
    pub thetas: Vec<f64>,
    pub gt2_mode: RrMode,
    pub k_list: Vec<usize>,
    pub retrieval_depth: usize,
}

impl PipelineConfig {
    /// Relative paths resolve against the directory holding the file.
    pub fn load(path: &Path) -> Result<Self> {
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |v: &str| base.join(v);
        let list = |v: &str| -> Vec<PathBuf> {
            v.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(resolve)
                .collect()
        };
        let mut kg_a = Vec::new();
        let mut kg_b = Vec::new();
        let mut sameas = None;
        let mut c = PipelineConfig {
            kg_a: Vec::new(),
            kg_b: Vec::new(),
            sameas: PathBuf::new(),
            gt1: None,
            gt3: None,
            gt3_sources: None,
            out_dir: base.join("out"),
            type_predicate: RDF_TYPE.into(),
            sameas_predicate: OWL_SAME_AS.into(),
            type_namespace_filter_a: None,
            type_namespace_filter_b: None,
            graph_a_prefix: None,
            strict: false,
            min_token_count: DEFAULT_MIN_TOKEN_COUNT,
            max_tokens_per_type: DEFAULT_MAX_TOKENS_PER_TYPE,
            measures: SimilarityMeasure::ALL.to_vec(),
            thetas: default_thetas(),
            gt2_mode: RrMode::default(),
            k_list: crate::evaluation::DEFAULT_TOP_K.to_vec(),
            retrieval_depth: DEFAULT_RETRIEVAL_DEPTH,
        };
        for (k, v) in keyvalue::read(path)? {
            match k.as_str() {
                "kg_a" => kg_a = list(&v),
                "kg_b" => kg_b = list(&v),
                "sameas" => sameas = Some(resolve(&v)),
                "gt1" => c.gt1 = Some(resolve(&v)),
                "gt3" => c.gt3 = Some(resolve(&v)),
                "gt3_sources" => c.gt3_sources = Some(resolve(&v)),
                "out_dir" => c.out_dir = resolve(&v),
                "type_predicate" => c.type_predicate = v,
                "sameas_predicate" => c.sameas_predicate = v,
                "type_namespace_filter_a" => c.type_namespace_filter_a = Some(v),
                "type_namespace_filter_b" => c.type_namespace_filter_b = Some(v),
                "graph_a_prefix" => c.graph_a_prefix = Some(v),
                "strict" => c.strict = keyvalue::value(&k, &v)?,
                "min_token_count" => c.min_token_count = keyvalue::value(&k, &v)?,
                "max_tokens_per_type" => c.max_tokens_per_type = keyvalue::value(&k, &v)?,
                "measures" => c.measures = SimilarityMeasure::parse_list(&v)?,
                "thetas" => c.thetas = parse_thetas(&v)?,
                "gt2_mode" => c.gt2_mode = v.parse()?,
                "k_list" => c.k_list = parse_k_list(&v).map_err(Error::Config)?,
                "retrieval_depth" => c.retrieval_depth = keyvalue::value(&k, &v)?,
                other => return Err(Error::Config(format!("unknown pipeline key {other:?}"))),
            }
        }
        if kg_a.is_empty() || kg_b.is_empty() {
            return Err(Error::Config("pipeline needs kg_a and kg_b".into()));
        }
        c.kg_a = kg_a;
        c.kg_b = kg_b;
        c.sameas = sameas.ok_or_else(|| Error::Config("pipeline needs sameas".into()))?;
        SkewLimits::new(c.min_token_count, c.max_tokens_per_type)?;
        Ok(c)
    }

    fn graph(&self, namespace: &Option<String>) -> GraphArgs {
        GraphArgs {
            type_predicate: self.type_predicate.clone(),
            type_namespace: namespace.clone(),
            strict: self.strict,
        }
    }

    fn links(&self) -> LinkArgs {
        LinkArgs {
            sameas_predicate: self.sameas_predicate.clone(),
            graph_a_prefix: self.graph_a_prefix.clone(),
            kg_a: self.kg_a.clone(),
            kg_b: self.kg_b.clone(),
            type_namespace_a: self.type_namespace_filter_a.clone(),
            type_namespace_b: self.type_namespace_filter_b.clone(),
            type_predicate: self.type_predicate.clone(),
            strict: self.strict,
        }
    }
}

/// Runs ingest-stats, stats, align, histogram and every evaluation as the
/// standalone subcommands would, writing into `out_dir`.
fn pipeline(a: &PipelineArgs, out: &mut dyn Write) -> Result<()> {
    require_inputs([a.config.as_path()])?;
    let c = PipelineConfig::load(&a.config)?;
    require_inputs(
        c.kg_a
            .iter()
            .chain(&c.kg_b)
            .chain([&c.sameas])
            .chain(c.gt1.iter())
            .chain(c.gt3.iter())
            .chain(c.gt3_sources.iter())
            .map(PathBuf::as_path),
    )?;
    fs::create_dir_all(&c.out_dir).map_err(|e| Error::io(&c.out_dir, e))?;
    let dir = &c.out_dir;

    let graphs = [
        ("a", &c.kg_a, &c.type_namespace_filter_a),
        ("b", &c.kg_b, &c.type_namespace_filter_b),
    ];
    for (kg, inputs, namespace) in graphs {
        let stats_file = dir.join(format!("ingest_stats_{kg}.csv"));
        ingest_stats(
            &IngestStatsArgs {
                input: inputs.clone(),
                graph: c.graph(namespace),
                out: Some(stats_file),
            },
            &mut std::io::sink(),
        )?;
        stats(
            &StatsArgs {
                input: inputs.clone(),
                out: dir.join(format!("profiles_{kg}.tsv")),
                min_count: c.min_token_count,
                max_tokens: c.max_tokens_per_type as u64,
                graph: c.graph(namespace),
            },
            out,
        )?;
    }
    let table = dir.join("alignment.tsv");
    align(
        &AlignArgs {
            profiles_a: dir.join("profiles_a.tsv"),
            profiles_b: dir.join("profiles_b.tsv"),
            out: table.clone(),
            measures: c.measures.clone(),
        },
        out,
    )?;
    histogram(
        &HistogramArgs {
            profiles_a: dir.join("profiles_a.tsv"),
            profiles_b: dir.join("profiles_b.tsv"),
            out: dir.join("histogram.csv"),
        },
        out,
    )?;

    let built_gt1 = dir.join("gt1_from_sameas.tsv");
    for &measure in &c.measures {
        let sweep = |name: &str| SweepArgs {
            table: table.clone(),
            measure,
            thetas: Some(c.thetas.clone()),
            out: dir.join(format!("{name}_{measure}.csv")),
        };
        eval_gt1_cmd(
            &Gt1Args {
                sweep: sweep("gt1"),
                gt: c.gt1.clone(),
                sameas: Some(c.sameas.clone()),
                write_gt: c.gt1.is_none().then(|| built_gt1.clone()),
                links: c.links(),
            },
            out,
        )?;
        eval_gt2_cmd(
            &Gt2Args {
                sweep: sweep("gt2"),
                gt: c.sameas.clone(),
                mode: c.gt2_mode,
                links: c.links(),
            },
            out,
        )?;
        if let Some(gt3) = &c.gt3 {
            eval_gt3_cmd(
                &Gt3Args {
                    table: table.clone(),
                    measure,
                    gt: gt3.clone(),
                    sources: c.gt3_sources.clone(),
                    k_list: c.k_list.clone(),
                    depth: c.retrieval_depth,
                    out: dir.join(format!("gt3_{measure}.csv")),
                },
                out,
            )?;
        }
    }
    say(out, format!("pipeline outputs in {}", dir.display()))
}
