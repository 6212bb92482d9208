//! `biasprobe` command line.
//!
//! Exit codes: 0 success, 1 validation findings, 2 usage error, 3 runtime
//! error. Data goes to stdout or files; diagnostics go to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use biasprobe::corpus::{parse_template_document, validate_parallel, BiasSample, TemplateSet};
use biasprobe::experiments::{
    emit_report, expand_from_config, load_config, load_predictions, load_report, report_json,
    resolve_output_dir, run_phase1, run_phase2, run_phase3, score_models, EmitFormat,
    ExperimentConfig, Report,
};
use biasprobe::scoring::{score_samples, ScorerConfig, ScorerMode};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "biasprobe", version, about = "Multilingual sentiment-bias probing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expand templates and lexicons into bias samples (JSONL).
    Expand {
        #[arg(long)]
        config: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check template files for missing variants and placeholder defects.
    Validate {
        #[arg(long, num_args = 1.., required_unless_present = "config")]
        templates: Vec<PathBuf>,
        /// Comma-separated language codes; defaults to every language the files mention.
        #[arg(long, value_delimiter = ',')]
        languages: Vec<String>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Score bias samples with one model (JSONL of score records).
    Score {
        #[arg(long)]
        config: PathBuf,
        /// Samples JSONL as written by `expand`; expanded from the config when omitted.
        #[arg(long)]
        samples: Option<PathBuf>,
        #[command(flatten)]
        scorer: ScorerArgs,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Task-accuracy parity across languages.
    Phase1 {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = parse_alpha)]
        alpha: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-cell bias metrics and significance tests.
    Phase2 {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: Option<u64>,
        #[command(flatten)]
        scorer: ScorerArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monolingual versus multilingual comparisons.
    Phase3 {
        #[arg(long)]
        config: PathBuf,
        /// Phase 2 report to compare; recomputed from the config when omitted.
        #[arg(long)]
        phase2: Option<PathBuf>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: Option<u64>,
        #[command(flatten)]
        scorer: ScorerArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-emit a saved report as JSON and/or CSV tables.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Both)]
        format: FormatArg,
    },
}

#[derive(Debug, Clone, Default, Args)]
struct ScorerArgs {
    /// Replace the configured models with a single scorer of this kind.
    #[arg(long, value_enum)]
    scorer: Option<ScorerArg>,
    #[arg(long)]
    model_id: Option<String>,
    /// Seed for every mock scorer.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long = "score-file")]
    score_files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScorerArg {
    File,
    Remote,
    Mock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Both,
}

impl FormatArg {
    fn formats(self) -> &'static [EmitFormat] {
        match self {
            Self::Json => &[EmitFormat::Json],
            Self::Csv => &[EmitFormat::Csv],
            Self::Both => &[EmitFormat::Json, EmitFormat::Csv],
        }
    }
}

fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    let a: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if a > 0.0 && a < 1.0 {
        Ok(a)
    } else {
        Err(format!("alpha must lie in (0, 1), got {a}"))
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match run(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_RUNTIME
        }
    }
}

fn run(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Expand { config, out } => {
            let config = load_config(&config)?;
            let samples = expand_from_config(&config)?;
            write_jsonl(samples_jsonl(&samples)?, out.as_deref(), stdout)?;
            writeln!(stderr, "expanded {} samples", samples.len())?;
        }
        Command::Validate {
            templates,
            languages,
            config,
        } => return validate(templates, languages, config, stdout),
        Command::Score {
            config,
            samples,
            scorer,
            out,
        } => {
            let config = load_config(&config)?;
            let samples = match samples {
                Some(path) => read_samples(&path)?,
                None => expand_from_config(&config)?,
            };
            let model = select_model(&config, &scorer)?;
            let table = score_samples(&samples, &model)?;
            write_jsonl(table.to_jsonl(), out.as_deref(), stdout)?;
            writeln!(stderr, "scored {} samples with {}", table.len(), model.model_id)?;
        }
        Command::Phase1 { config, alpha, out } => {
            let config = load_config(&config)?;
            let predictions = load_predictions(&config)?;
            let report = run_phase1(&predictions, alpha.unwrap_or(config.alpha))?;
            publish(&Report::Phase1(report), FormatArg::Both, out.as_deref(), Some(&config), stdout, stderr)?;
        }
        Command::Phase2 {
            config,
            jobs,
            scorer,
            out,
        } => {
            let config = apply_overrides(load_config(&config)?, jobs, &scorer)?;
            let report = phase2(&config)?;
            publish(&Report::Phase2(report), FormatArg::Both, out.as_deref(), Some(&config), stdout, stderr)?;
        }
        Command::Phase3 {
            config,
            phase2: saved,
            jobs,
            scorer,
            out,
        } => {
            let config = apply_overrides(load_config(&config)?, jobs, &scorer)?;
            if config.comparisons.is_empty() {
                bail!("config lists no comparisons");
            }
            let p2 = match saved {
                Some(path) => match load_report(&read(&path)?)? {
                    Report::Phase2(r) => r,
                    other => bail!("{} holds a {} report, expected phase2", path.display(), other.name()),
                },
                None => phase2(&config)?,
            };
            let report = run_phase3(&config.comparisons, &p2)?;
            publish(&Report::Phase3(report), FormatArg::Both, out.as_deref(), Some(&config), stdout, stderr)?;
        }
        Command::Report { input, out, format } => {
            let report = load_report(&read(&input)?)?;
            publish(&report, format, out.as_deref(), None, stdout, stderr)?;
        }
    }
    Ok(EXIT_OK)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn samples_jsonl(samples: &[BiasSample]) -> Result<String> {
    let mut text = String::new();
    for s in samples {
        text.push_str(&serde_json::to_string(s)?);
        text.push('\n');
    }
    Ok(text)
}

fn read_samples(path: &Path) -> Result<Vec<BiasSample>> {
    let bytes = read(path)?;
    let text = std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).with_context(|| format!("{} line {}", path.display(), i + 1))
        })
        .collect()
}

fn write_jsonl(text: String, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn validate(
    files: Vec<PathBuf>,
    languages: Vec<String>,
    config: Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<i32> {
    let config = config.map(|p| load_config(&p)).transpose()?;
    let mut paths = files;
    if paths.is_empty() {
        paths = config.as_ref().map(|c| c.templates.clone()).unwrap_or_default();
    }
    let mut sets = Vec::new();
    for path in &paths {
        sets.push(parse_template_document(&read(path)?).with_context(|| path.display().to_string())?);
    }
    let set = TemplateSet::merge(sets);
    let languages = if !languages.is_empty() {
        languages
    } else if let Some(c) = &config {
        c.languages.clone()
    } else {
        set.languages()
    };
    let report = validate_parallel(&set, &languages);
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    stdout.write_all(text.as_bytes())?;
    Ok(if report.is_clean() { EXIT_OK } else { EXIT_FINDINGS })
}

/// The scorer a single-model command uses: built from flags when `--scorer`
/// is given, otherwise the configured model named by `--model-id` or the
/// only configured model.
fn select_model(config: &ExperimentConfig, args: &ScorerArgs) -> Result<ScorerConfig> {
    if let Some(kind) = args.scorer {
        return flag_model(config, args, kind);
    }
    let mut model = match (&args.model_id, config.models.as_slice()) {
        (Some(id), models) => models
            .iter()
            .find(|m| &m.model_id == id)
            .cloned()
            .with_context(|| format!("no configured model `{id}`"))?,
        (None, [only]) => only.clone(),
        (None, []) => bail!("config lists no models; pass --scorer"),
        (None, _) => bail!("config lists several models; pass --model-id"),
    };
    if let (Some(seed), ScorerMode::Mock) = (args.seed, model.mode) {
        model.seed = Some(seed);
    }
    Ok(model)
}

fn flag_model(config: &ExperimentConfig, args: &ScorerArgs, kind: ScorerArg) -> Result<ScorerConfig> {
    let id = args.model_id.clone().unwrap_or_else(|| "model".to_string());
    let model = match kind {
        ScorerArg::Mock => {
            let seed = args
                .seed
                .or(config.seed)
                .context("mock scorer needs --seed or a config seed")?;
            ScorerConfig::mock(id, seed)
        }
        ScorerArg::Remote => {
            let endpoint = args.endpoint.clone().context("remote scorer needs --endpoint")?;
            ScorerConfig::remote(id, endpoint)
        }
        ScorerArg::File => {
            if args.score_files.is_empty() {
                bail!("file scorer needs at least one --score-file");
            }
            ScorerConfig::files(id, args.score_files.clone())
        }
    };
    model.validate()?;
    Ok(model)
}

fn apply_overrides(mut config: ExperimentConfig, jobs: Option<u64>, args: &ScorerArgs) -> Result<ExperimentConfig> {
    if let Some(jobs) = jobs {
        config.jobs = usize::try_from(jobs)?;
    }
    if let Some(kind) = args.scorer {
        config.models = vec![flag_model(&config, args, kind)?];
    } else if let Some(seed) = args.seed {
        config.seed = Some(seed);
        for model in config.models.iter_mut().filter(|m| m.mode == ScorerMode::Mock) {
            model.seed = Some(seed);
        }
    }
    if config.models.is_empty() {
        bail!("config lists no models; pass --scorer");
    }
    Ok(config)
}

fn phase2(config: &ExperimentConfig) -> Result<biasprobe::experiments::Phase2Report> {
    let samples = expand_from_config(config)?;
    let scores = score_models(config, &samples)?;
    Ok(run_phase2(config, &samples, &scores)?)
}

/// Writes report files into the resolved output directory, or the JSON
/// report to stdout when no directory is configured.
fn publish(
    report: &Report,
    format: FormatArg,
    out: Option<&Path>,
    config: Option<&ExperimentConfig>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let Some(dir) = resolve_output_dir(out, config) else {
        if format == FormatArg::Csv {
            bail!("CSV output needs --out or {}", biasprobe::experiments::OUTPUT_ENV);
        }
        stdout.write_all(report_json(report).as_bytes())?;
        return Ok(());
    };
    for f in format.formats() {
        for path in emit_report(report, *f, &dir)? {
            writeln!(stderr, "wrote {}", path.display())?;
        }
    }
    Ok(())
}
