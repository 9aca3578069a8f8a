//! Batch command line over the whole pipeline.
//!
//! Every flag may also come from a TOML file given with `--config`. Keys
//! are flag names with `_` for `-`, either at top level or in a table named
//! after the subcommand (`[spectrum]`), which wins over top level. Flags on
//! the command line win over both.
//!
//! Exit codes: 0 success, 1 validation error, 2 I/O error. Errors go to
//! stderr prefixed `error[validation]:` or `error[io]:`.

use std::ffi::OsString;
use std::io::Write;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_rational::Rational64;

use crate::corpus::{
    load_corpus, normalize_author, parse_export, save_corpus, AuthorName, ExportFormat, IngestError, Record,
};
use crate::dedup::{
    load_sidecar, save_sidecar, sidecar_path, DedupConfig, DedupError, MergeProposal, ProposalStatus, Sidecar,
    VolumePageRule, SIDECAR_VERSION,
};
use crate::filters::PipelineConfig;
use crate::fraction::{parse_decimal, rational_to_decimal, Fraction};
use crate::pipeline::{analyze, merge, Occurrences, PipelineError, SpectrumConfig};
use crate::report::{journal_table, window_stats, write_csv, ReportError, Table};
use crate::service::{serve, AppState, ServiceConfig};
use crate::spectroscopy::top_keys_for_year;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
        }
    }

    fn prefix(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "error[validation]",
            CliError::Io(_) => "error[io]",
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<DedupError> for CliError {
    fn from(e: DedupError) -> Self {
        match e {
            DedupError::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Dedup(e) => e.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "rpys", version, about = "Reference publication year spectroscopy")]
pub struct Cli {
    /// TOML file supplying default flag values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory that relative corpus paths resolve against.
    #[arg(long, global = true, env = "RPYS_CORPUS_DIR")]
    pub corpus_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse an export file into a stored corpus.
    Parse(ParseArgs),
    /// Propose variant clusters and record verdicts in a sidecar.
    Dedup(DedupArgs),
    /// Build a dataset and its spectrogram.
    Spectrum(SpectrumArgs),
    /// List the most cited keys of one RPY.
    TopCrs(TopArgs),
    /// Venue table and publication window statistics.
    Report(ReportArgs),
    /// Serve the HTTP API on loopback.
    Serve(ServeArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Parse(_) => "parse",
            Command::Dedup(_) => "dedup",
            Command::Spectrum(_) => "spectrum",
            Command::TopCrs(_) => "top-crs",
            Command::Report(_) => "report",
            Command::Serve(_) => "serve",
        }
    }
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    pub file: PathBuf,
    /// `tagged` or `tab` [default: tagged]
    #[arg(long)]
    pub format: Option<ExportFormat>,
    /// Corpus file to write [default: corpus.db]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MergeFlags {
    /// Similarity needed without a volume/page match [default: 0.75]
    #[arg(long)]
    pub threshold: Option<Fraction>,
    /// Similarity needed with a volume/page match [default: 0.5]
    #[arg(long)]
    pub floor: Option<Fraction>,
    /// `require-equal` or `ignore` [default: require-equal]
    #[arg(long)]
    pub vp_rule: Option<String>,
    /// Sidecar with verdicts [default: `<corpus>.clusters.json` when present]
    #[arg(long)]
    pub session: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DedupArgs {
    pub corpus: PathBuf,
    #[command(flatten)]
    pub merge: MergeFlags,
    /// Accept every proposal without review.
    #[arg(long)]
    pub auto_accept: bool,
}

#[derive(Debug, Args)]
pub struct DatasetFlags {
    /// 1: share threshold only; 2: self-citations removed first [default: 1]
    #[arg(long)]
    pub dataset: Option<u8>,
    #[arg(long)]
    pub self_author: Option<String>,
    /// Minimum occurrence share per RPY [default: 0.1]
    #[arg(long)]
    pub min_share: Option<Fraction>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    pub corpus: PathBuf,
    #[command(flatten)]
    pub merge: MergeFlags,
    #[command(flatten)]
    pub dataset: DatasetFlags,
    /// Median window, odd [default: 5]
    #[arg(long)]
    pub window: Option<usize>,
    /// Peaks must exceed this deviation [default: 0]
    #[arg(long)]
    pub min_deviation: Option<String>,
    /// Write the spectrum CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the filter report CSV here.
    #[arg(long)]
    pub report_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TopArgs {
    pub corpus: PathBuf,
    #[command(flatten)]
    pub merge: MergeFlags,
    #[arg(long)]
    pub year: Option<i32>,
    #[arg(long)]
    pub min_occ: Option<u64>,
    #[arg(long)]
    pub limit: Option<usize>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    pub corpus: PathBuf,
    /// Print the venue table.
    #[arg(long)]
    pub journals: bool,
    /// [default: 10]
    #[arg(long)]
    pub min_papers: Option<u64>,
    /// First year of the window, inclusive.
    #[arg(long)]
    pub from: Option<i32>,
    /// Last year of the window, inclusive.
    #[arg(long)]
    pub to: Option<i32>,
    /// Venue whose share of the window is reported.
    #[arg(long)]
    pub venue: Option<String>,
    /// Write the venue table CSV here instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    pub corpus: PathBuf,
    #[command(flatten)]
    pub merge: MergeFlags,
    /// [default: 7878]
    #[arg(long)]
    pub port: Option<u16>,
    /// Default self author for dataset 2 requests.
    #[arg(long)]
    pub self_author: Option<String>,
}

/// Flag values from the config file, flattened for one subcommand.
#[derive(Debug, Default)]
struct FileConfig {
    values: toml::Table,
}

impl FileConfig {
    fn load(path: Option<&Path>, command: &str) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let table: toml::Table = text
            .parse()
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let mut values = toml::Table::new();
        for (k, v) in &table {
            if !v.is_table() {
                values.insert(k.replace('-', "_"), v.clone());
            }
        }
        if let Some(section) = table.get(command).and_then(toml::Value::as_table) {
            for (k, v) in section {
                values.insert(k.replace('-', "_"), v.clone());
            }
        }
        Ok(FileConfig { values })
    }

    fn text(&self, key: &str) -> Option<String> {
        match self.values.get(key)? {
            toml::Value::String(s) => Some(s.clone()),
            toml::Value::Integer(i) => Some(i.to_string()),
            toml::Value::Float(f) => Some(f.to_string()),
            toml::Value::Boolean(b) => Some(b.to_string()),
            other => Some(other.to_string()),
        }
    }

    /// The command line value, else the config value parsed the same way.
    fn or<T: FromStr>(&self, cli: Option<T>, key: &str) -> CliResult<Option<T>> {
        if cli.is_some() {
            return Ok(cli);
        }
        self.text(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| CliError::Validation(format!("config value {key} = {v:?} is invalid")))
            })
            .transpose()
    }

    fn flag(&self, cli: bool, key: &str) -> CliResult<bool> {
        Ok(cli || self.or::<bool>(None, key)?.unwrap_or(false))
    }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let text = e.render().to_string();
                    let _ = write!(err, "error[validation]: {}", text.trim_start_matches("error: "));
                    1
                }
            };
        }
    };
    match execute(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{}: {e}", e.prefix());
            e.exit_code()
        }
    }
}

pub fn main() {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let cfg = FileConfig::load(cli.config.as_deref(), cli.command.name())?;
    let corpus_dir = match cli.corpus_dir {
        Some(d) => Some(d),
        None => cfg.or::<PathBuf>(None, "corpus_dir")?,
    };
    let resolve = |p: &Path| match &corpus_dir {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    };
    let w = |out: &mut dyn Write, text: String| out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()));

    match cli.command {
        Command::Parse(a) => {
            let format = cfg.or(a.format, "format")?.unwrap_or(ExportFormat::TaggedPlaintext);
            let out_path = resolve(&cfg.or(a.out, "out")?.unwrap_or_else(|| PathBuf::from("corpus.db")));
            let file = std::fs::File::open(&a.file).map_err(|e| io_err(&a.file, e))?;
            let parsed = parse_export(std::io::BufReader::new(file), format)?;
            for warning in &parsed.warnings {
                writeln!(err, "warning: {warning}").map_err(|e| CliError::Io(e.to_string()))?;
            }
            let stats = save_corpus(&parsed.records, &out_path)?;
            let span = |s: Option<(i32, i32)>| s.map(|(a, b)| format!("{a}-{b}")).unwrap_or_else(|| "none".into());
            w(
                out,
                format!(
                    "records={} cr_occurrences={} distinct_crs={} years={} rpys={} warnings={}\n",
                    stats.n_records,
                    stats.n_cr_occurrences,
                    stats.n_distinct_crs,
                    span(stats.year_span),
                    span(stats.rpy_span),
                    parsed.warnings.len()
                ),
            )
        }
        Command::Dedup(a) => {
            let corpus = resolve(&a.corpus);
            let records = load(&corpus)?;
            let dedup = dedup_config(&a.merge, &cfg)?;
            let auto = cfg.flag(a.auto_accept, "auto_accept")?;
            let session = cfg.or(a.merge.session.clone(), "session")?.map(|p| resolve(&p));
            if auto == session.is_some() {
                return Err(CliError::Validation(
                    "give exactly one of --auto-accept or --session <file>".into(),
                ));
            }
            let occ = Occurrences::from_records(&records);
            let mut proposals = occ.propose(&dedup)?;
            let target = match session {
                Some(path) => {
                    if path.exists() {
                        let previous = load_sidecar(&path, occ.fingerprint())?;
                        carry_verdicts(&mut proposals, &previous.proposals);
                    }
                    path
                }
                None => {
                    crate::dedup::auto_accept(&mut proposals);
                    sidecar_path(&corpus)
                }
            };
            let merged = merge(&occ, &proposals)?;
            let count = |s: ProposalStatus| proposals.iter().filter(|p| p.status == s).count();
            save_sidecar(
                &Sidecar {
                    version: SIDECAR_VERSION,
                    config: dedup,
                    fingerprint: occ.fingerprint(),
                    proposals: proposals.clone(),
                },
                &target,
            )?;
            w(
                out,
                format!(
                    "proposals={} accepted={} rejected={} pending={} keys_unmerged={} keys={} occurrences={} imprecise={} after_merge={}\nsidecar={}\n",
                    proposals.len(),
                    count(ProposalStatus::Accepted),
                    count(ProposalStatus::Rejected),
                    count(ProposalStatus::Proposed),
                    merged.n_keys_unmerged,
                    merged.keys.len(),
                    merged.n_occurrences,
                    merged.n_imprecise,
                    merged.n_after_merge,
                    target.display()
                ),
            )
        }
        Command::Spectrum(a) => {
            let corpus = resolve(&a.corpus);
            let records = load(&corpus)?;
            let (dataset, pipeline) = pipeline_config(&a.dataset, &cfg)?;
            let mut spec = SpectrumConfig::default();
            if let Some(window) = cfg.or(a.window, "window")? {
                spec.window = window;
            }
            if let Some(d) = cfg.or(a.min_deviation, "min_deviation")? {
                spec.min_deviation = parse_rational(&d, "min_deviation")?;
            }
            let keys = merged_keys(&records, &corpus, &a.merge, &cfg, err, &resolve)?;
            let analysis = analyze(&keys, &pipeline, &spec)?;
            let r = &analysis.report;
            let mut text = format!(
                "dataset={dataset} input={} removed_by_share={} removed_as_self={} kept={}\n",
                r.input_keys, r.removed_by_share, r.removed_as_self, r.output_keys
            );
            if let Some(n) = r.self_below_threshold {
                text.push_str(&format!(
                    "self_removed_occurrences={} self_below_threshold={n}\n",
                    r.removed_self_occurrences
                ));
            }
            for p in &analysis.peaks {
                let top = p
                    .contributing_keys
                    .iter()
                    .map(|k| format!("{} ({})", k.representative.raw, k.occurrences))
                    .collect::<Vec<_>>()
                    .join("; ");
                text.push_str(&format!(
                    "peak year={} deviation={} top={top}\n",
                    p.year,
                    rational_to_decimal(&p.deviation)
                ));
            }
            if let Some(path) = cfg.or(a.csv, "csv")? {
                write_file(&resolve(&path), &write_csv(Table::Spectrum(&analysis.points))?)?;
            }
            if let Some(path) = cfg.or(a.report_csv, "report_csv")? {
                write_file(&resolve(&path), &write_csv(Table::FilterReport(&analysis.report))?)?;
            }
            w(out, text)
        }
        Command::TopCrs(a) => {
            let corpus = resolve(&a.corpus);
            let records = load(&corpus)?;
            let year = cfg
                .or(a.year, "year")?
                .ok_or_else(|| CliError::Validation("--year is required".into()))?;
            let keys = merged_keys(&records, &corpus, &a.merge, &cfg, err, &resolve)?;
            let top = top_keys_for_year(&keys, year, cfg.or(a.limit, "limit")?, cfg.or(a.min_occ, "min_occ")?);
            let bytes = write_csv(Table::TopKeys(&top))?;
            match cfg.or(a.csv, "csv")? {
                Some(path) => write_file(&resolve(&path), &bytes),
                None => out.write_all(&bytes).map_err(|e| CliError::Io(e.to_string())),
            }
        }
        Command::Report(a) => {
            let records = load(&resolve(&a.corpus))?;
            let from = cfg.or(a.from, "from")?;
            let to = cfg.or(a.to, "to")?;
            let venue = cfg.or(a.venue, "venue")?;
            let journals = cfg.flag(a.journals, "journals")? || (from.is_none() && to.is_none());
            if journals {
                let min_papers = cfg.or(a.min_papers, "min_papers")?.unwrap_or(10);
                let table = journal_table(&records, min_papers)?;
                let bytes = write_csv(Table::Journals(&table))?;
                match cfg.or(a.csv, "csv")? {
                    Some(path) => write_file(&resolve(&path), &bytes)?,
                    None => out.write_all(&bytes).map_err(|e| CliError::Io(e.to_string()))?,
                }
                writeln!(
                    err,
                    "listed={} share_of_corpus={} ({}/{})",
                    table.rows.len(),
                    table.cumulative_share.percent(),
                    table.rows.iter().map(|r| r.n_papers).sum::<u64>(),
                    table.n_records
                )
                .map_err(|e| CliError::Io(e.to_string()))?;
            }
            if from.is_some() || to.is_some() {
                let (Some(y0), Some(y1)) = (from, to) else {
                    return Err(CliError::Validation("--from and --to go together".into()));
                };
                let s = window_stats(&records, y0, y1, venue.as_deref())?;
                let mut text = format!(
                    "window={y0}-{y1} in_window={} records={} share_of_corpus={} ({}/{}) papers_per_year={}",
                    s.n_in_window,
                    s.n_records,
                    s.share_of_corpus.percent(),
                    s.n_in_window,
                    s.n_records,
                    s.papers_per_year_mean.to_decimal_string()
                );
                if let (Some(v), Some(n), Some(share)) = (&s.venue, s.n_in_named_venue, s.share_in_named_venue) {
                    text.push_str(&format!(
                        " venue=\"{v}\" in_venue={n} share_in_venue={} ({n}/{})",
                        share.percent(),
                        s.n_in_window
                    ));
                }
                text.push('\n');
                w(out, text)?;
            }
            Ok(())
        }
        Command::Serve(a) => {
            let corpus = resolve(&a.corpus);
            let records = load(&corpus)?;
            let dedup = dedup_config(&a.merge, &cfg)?;
            let self_author = cfg.or(a.self_author, "self_author")?.map(|s| author(&s)).transpose()?;
            let port = cfg.or(a.port, "port")?.unwrap_or(7878);
            let sidecar = cfg
                .or(a.merge.session.clone(), "session")?
                .map(|p| resolve(&p))
                .unwrap_or_else(|| sidecar_path(&corpus));
            let occ = Occurrences::from_records(&records);
            let proposals = if sidecar.exists() {
                Some(load_sidecar(&sidecar, occ.fingerprint())?.proposals)
            } else {
                None
            };
            let state = AppState::new(ServiceConfig {
                dedup,
                default_self_author: self_author,
            });
            let id = state.add_corpus(records, proposals, Some(sidecar))?;
            let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, port));
            writeln!(out, "listening on http://{addr} corpus_id={id}").map_err(|e| CliError::Io(e.to_string()))?;
            out.flush().map_err(|e| CliError::Io(e.to_string()))?;
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
            runtime
                .block_on(serve(state, addr))
                .map_err(|e| CliError::Io(format!("{addr}: {e}")))
        }
    }
}

fn load(path: &Path) -> CliResult<Vec<Record>> {
    load_corpus(path).map_err(|e| match e {
        IngestError::Io(e) => io_err(path, e),
        other => CliError::Validation(format!("{}: {other}", path.display())),
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn author(s: &str) -> CliResult<AuthorName> {
    normalize_author(s).map_err(|e| CliError::Validation(e.to_string()))
}

fn parse_rational(s: &str, name: &str) -> CliResult<Rational64> {
    parse_decimal(s).ok_or_else(|| CliError::Validation(format!("invalid {name} {s:?}")))
}

fn dedup_config(flags: &MergeFlags, cfg: &FileConfig) -> CliResult<DedupConfig> {
    let mut dedup = DedupConfig::default();
    if let Some(t) = cfg.or(flags.threshold, "threshold")? {
        dedup.similarity_threshold = t;
    }
    if let Some(f) = cfg.or(flags.floor, "floor")? {
        dedup.similarity_floor_with_vp_match = f;
    }
    if let Some(rule) = cfg.or(flags.vp_rule.clone(), "vp_rule")? {
        dedup.volume_page_rule = match rule.as_str() {
            "require-equal" | "require_equal_when_both_present" => VolumePageRule::RequireEqualWhenBothPresent,
            "ignore" => VolumePageRule::Ignore,
            other => return Err(CliError::Validation(format!("unknown vp rule {other:?}"))),
        };
    }
    dedup.validate()?;
    Ok(dedup)
}

fn pipeline_config(flags: &DatasetFlags, cfg: &FileConfig) -> CliResult<(u8, PipelineConfig)> {
    let dataset = cfg.or(flags.dataset, "dataset")?.unwrap_or(1);
    let self_author = cfg.or(flags.self_author.clone(), "self_author")?;
    let mut pipeline = match (dataset, self_author) {
        (1, _) => PipelineConfig::dataset1(),
        (2, Some(a)) => PipelineConfig::dataset2(author(&a)?),
        (2, None) => return Err(CliError::Validation("--dataset 2 needs --self-author".into())),
        (d, _) => return Err(CliError::Validation(format!("--dataset must be 1 or 2, got {d}"))),
    };
    if let Some(share) = cfg.or(flags.min_share, "min_share")? {
        pipeline.min_share_per_rpy = share;
    }
    Ok((dataset, pipeline))
}

/// Merged keys under the sidecar's verdicts, or with every proposal
/// accepted when there is no sidecar.
fn merged_keys(
    records: &[Record],
    corpus: &Path,
    flags: &MergeFlags,
    cfg: &FileConfig,
    err: &mut dyn Write,
    resolve: &dyn Fn(&Path) -> PathBuf,
) -> CliResult<Vec<crate::dedup::CRKey>> {
    let occ = Occurrences::from_records(records);
    let explicit = cfg.or(flags.session.clone(), "session")?.map(|p| resolve(&p));
    let path = explicit.clone().unwrap_or_else(|| sidecar_path(corpus));
    let proposals = if explicit.is_some() || path.exists() {
        load_sidecar(&path, occ.fingerprint())?.proposals
    } else {
        writeln!(err, "note: no sidecar at {}; accepting all proposals", path.display())
            .map_err(|e| CliError::Io(e.to_string()))?;
        occ.auto_accepted(&dedup_config(flags, cfg)?)?
    };
    Ok(merge(&occ, &proposals)?.keys)
}

/// Copies verdicts from an earlier run onto proposals with the same
/// variant set.
fn carry_verdicts(proposals: &mut [MergeProposal], previous: &[MergeProposal]) {
    for p in proposals.iter_mut() {
        if let Some(old) = previous.iter().find(|o| o.variant_raws == p.variant_raws) {
            p.status = old.status;
        }
    }
}
