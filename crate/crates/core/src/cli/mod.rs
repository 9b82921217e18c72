//! Batch command-line pipelines over the JSONL formats.
//!
//! Every subcommand reads standard input when its input path is omitted and
//! writes standard output when `-o` is omitted. Exit codes: 0 success,
//! 1 usage, 2 data or schema error, 3 internal invariant violation.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::datagen::{generate_dataset, GenConfig};
use crate::decoder::{decode, decode_proof, decode_unconstrained, Connectivity, PredictionRecord};
use crate::evalharness::aggregate_report;
use crate::potentials::lexical::{edge_examples, gold_node_labels, Hyperparameters};
use crate::potentials::{derive_seed, export_labels, fit_linear_scorer, oracle_potentials, LinearScorer, PotentialsRecord};
use crate::proofgraph::verify_with;
use crate::reasoner::{critical_sentences, proof_depth, Reasoner, DEFAULT_MAX_PROOFS};
use crate::theory::{parse_theories, write_theories, Format, Theory};

#[derive(Debug, Parser)]
#[command(name = "ruleproof", version, about = "Rule-base reasoning, proof decoding and evaluation")]
pub struct Cli {
    /// Worker threads for per-example work (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InputFormat {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct Io {
    /// Input file (standard input when omitted).
    pub input: Option<PathBuf>,
    /// Output file (standard output when omitted).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate train/dev/test theory files and a manifest.
    Generate {
        /// JSON generator config; defaults apply to omitted fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        /// Overrides the config's theory count.
        #[arg(long)]
        num_theories: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Annotate every question with its answer.
    Answer {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value = "json")]
        format: InputFormat,
    },
    /// Annotate every question with answer, gold proofs and depth.
    Prove {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value = "json")]
        format: InputFormat,
        #[arg(long, default_value_t = DEFAULT_MAX_PROOFS)]
        max_proofs: usize,
    },
    /// Export node and edge training labels with masked cells.
    MaskExport {
        #[command(flatten)]
        io: Io,
    },
    /// Gold indicators blurred by uniform noise.
    OraclePotentials {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        noise: f64,
        #[arg(long)]
        seed: u64,
    },
    /// Fit the lexical edge scorer.
    TrainBaseline {
        /// Training theories.
        train: PathBuf,
        /// Held-out theories for an accuracy report on standard error.
        #[arg(long)]
        dev: Option<PathBuf>,
        #[arg(long, default_value_t = 2000)]
        epochs: usize,
        #[arg(long, default_value_t = 1.0)]
        learning_rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Potentials from a fitted lexical scorer.
    ScoreEdges {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        model: PathBuf,
    },
    /// Decode proofs from potentials.
    Decode {
        #[command(flatten)]
        io: Io,
        /// Drop the connectivity constraint.
        #[arg(long, conflicts_with = "unconstrained")]
        no_connectivity: bool,
        /// Threshold every pair with no constraints at all.
        #[arg(long)]
        unconstrained: bool,
    },
    /// Score predictions against gold theories.
    Eval {
        /// Predictions (standard input when omitted).
        predictions: Option<PathBuf>,
        #[arg(long)]
        theories: PathBuf,
        #[arg(long, default_value = "eval")]
        label: String,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Table destination (standard output when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sentences whose removal flips each answer.
    Critical {
        #[command(flatten)]
        io: Io,
    },
    /// One DOT file per gold proof.
    RenderDot {
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn io_err(e: io::Error) -> CliError {
    CliError::Data(e.to_string())
}

/// Standard streams, replaceable in tests.
pub struct Streams<'a> {
    pub stdin: &'a mut (dyn Read + Send),
    pub stdout: &'a mut (dyn Write + Send),
    pub stderr: &'a mut (dyn Write + Send),
}

/// Parses `argv` and runs it; returns the process exit code.
pub fn run_command<I, T>(argv: I, s: Streams<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(s.stdout, "{text}") } else { write!(s.stderr, "{text}") };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(s.stderr, "usage error: {e}");
            return 1;
        }
    };
    let Streams { stdin, stdout, stderr } = s;
    match pool.install(|| execute(cli.command, stdin, stdout, stderr)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.code()
        }
    }
}

fn require_file(p: &Path) -> Result<(), CliError> {
    if p.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{} is not a readable file", p.display())))
    }
}

fn require_parent(p: &Path) -> Result<(), CliError> {
    match p.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(CliError::Usage(format!("directory {} does not exist", dir.display())))
        }
        _ => Ok(()),
    }
}

fn validate_io(io: &Io) -> Result<(), CliError> {
    if let Some(p) = &io.input {
        require_file(p)?;
    }
    if let Some(p) = &io.output {
        require_parent(p)?;
    }
    Ok(())
}

fn open_input<'a>(path: &Option<PathBuf>, stdin: &'a mut dyn Read) -> Result<Box<dyn BufRead + 'a>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufReader::new(File::open(p).map_err(io_err)?)),
        None => Box::new(BufReader::new(stdin)),
    })
}

fn with_output(
    path: &Option<PathBuf>,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(io_err)?);
            body(&mut w)?;
            w.flush().map_err(io_err)
        }
        None => {
            body(stdout)?;
            stdout.flush().map_err(io_err)
        }
    }
}

fn read_theories(path: &Option<PathBuf>, stdin: &mut dyn Read, format: InputFormat) -> Result<Vec<Theory>, CliError> {
    let format = match format {
        InputFormat::Json => Format::StructuredJson,
        InputFormat::Text => Format::SentenceText,
    };
    parse_theories(open_input(path, stdin)?, format, None).map_err(data)
}

fn read_jsonl<T: serde::de::DeserializeOwned>(input: impl BufRead) -> Result<Vec<T>, CliError> {
    let mut out = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| CliError::Data(format!("line {}: {e}", n + 1)))?);
    }
    Ok(out)
}

fn write_jsonl<T: Serialize>(w: &mut dyn Write, items: &[T]) -> Result<(), CliError> {
    for item in items {
        serde_json::to_writer(&mut *w, item).map_err(data)?;
        writeln!(w).map_err(io_err)?;
    }
    Ok(())
}

fn write_theory_file(w: &mut dyn Write, ts: &[Theory]) -> Result<(), CliError> {
    write_theories(w, ts, Format::StructuredJson).map_err(io_err)
}

/// Runs `f` over theories in parallel, keeping input order.
fn per_theory<T: Send>(
    ts: &[Theory],
    f: impl Fn(usize, &Theory) -> Result<T, CliError> + Sync + Send,
) -> Result<Vec<T>, CliError> {
    ts.par_iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

fn annotate(t: &Theory, max_proofs: Option<usize>) -> Result<Theory, CliError> {
    let mut out = t.clone();
    for q in &mut out.questions {
        let r = Reasoner::with_literal(t, Some(&q.literal)).map_err(|e| CliError::Data(format!("{}: {e}", t.id)))?;
        q.answer = Some(r.answer(&q.literal).map_err(data)?);
        if let Some(max) = max_proofs {
            let proofs = r.prove(&q.literal, max).map_err(data)?;
            for p in &proofs {
                if !verify_with(&r, q, p).map_err(|e| CliError::Internal(e.to_string()))? {
                    return Err(CliError::Internal(format!("{}/{}: prover emitted an invalid proof", t.id, q.id)));
                }
            }
            q.depth = proofs.iter().map(proof_depth).max();
            q.proofs = Some(proofs);
        }
    }
    Ok(out)
}

#[derive(Clone, Serialize)]
struct CriticalRecord {
    theory_id: String,
    question_id: String,
    answer: bool,
    critical: Vec<String>,
}

fn execute(
    cmd: Command,
    stdin: &mut (dyn Read + Send),
    stdout: &mut (dyn Write + Send),
    stderr: &mut (dyn Write + Send),
) -> Result<(), CliError> {
    match cmd {
        Command::Generate { config, seed, num_theories, output } => {
            let mut cfg = match &config {
                Some(p) => {
                    require_file(p)?;
                    serde_json::from_reader(BufReader::new(File::open(p).map_err(io_err)?)).map_err(data)?
                }
                None => GenConfig::default(),
            };
            cfg.seed = seed;
            if let Some(n) = num_theories {
                cfg.num_theories = n;
            }
            cfg.validate().map_err(data)?;
            let d = generate_dataset(&cfg).map_err(data)?;
            d.write_to(&output).map_err(data)?;
            let _ = writeln!(
                stderr,
                "wrote {}/{}/{} theories to {}",
                d.train.len(),
                d.dev.len(),
                d.test.len(),
                output.display()
            );
            Ok(())
        }
        Command::Answer { io, format } => {
            validate_io(&io)?;
            let ts = read_theories(&io.input, stdin, format)?;
            let out = per_theory(&ts, |_, t| annotate(t, None))?;
            with_output(&io.output, stdout, |w| write_theory_file(w, &out))
        }
        Command::Prove { io, format, max_proofs } => {
            validate_io(&io)?;
            if max_proofs == 0 {
                return Err(CliError::Usage("--max-proofs must be positive".into()));
            }
            let ts = read_theories(&io.input, stdin, format)?;
            let out = per_theory(&ts, |_, t| annotate(t, Some(max_proofs)))?;
            with_output(&io.output, stdout, |w| write_theory_file(w, &out))
        }
        Command::MaskExport { io } => {
            validate_io(&io)?;
            let ts = read_theories(&io.input, stdin, InputFormat::Json)?;
            let recs = per_theory(&ts, |_, t| export_labels(t).map_err(data))?;
            with_output(&io.output, stdout, |w| write_jsonl(w, &recs.concat()))
        }
        Command::OraclePotentials { io, noise, seed } => {
            validate_io(&io)?;
            if !(0.0..0.5).contains(&noise) {
                return Err(CliError::Usage(format!("--noise {noise} outside [0, 0.5)")));
            }
            let ts = read_theories(&io.input, stdin, InputFormat::Json)?;
            let recs = per_theory(&ts, |ti, t| {
                let mut out = Vec::new();
                for (qi, q) in t.questions.iter().enumerate() {
                    let (Some(answer), Some(gold)) = (q.answer, q.proofs.as_ref().and_then(|p| p.first())) else {
                        continue;
                    };
                    let p = oracle_potentials(t, gold, noise, derive_seed(seed, ti as u64, qi as u64)).map_err(data)?;
                    out.push(PotentialsRecord::new(&t.id, &q.id, f64::from(u8::from(answer)), p));
                }
                Ok(out)
            })?;
            with_output(&io.output, stdout, |w| write_jsonl(w, &recs.concat()))
        }
        Command::TrainBaseline { train, dev, epochs, learning_rate, seed, output } => {
            require_file(&train)?;
            if let Some(d) = &dev {
                require_file(d)?;
            }
            if let Some(o) = &output {
                require_parent(o)?;
            }
            let examples = |p: &PathBuf, stdin: &mut dyn Read| -> Result<Vec<_>, CliError> {
                let ts = read_theories(&Some(p.clone()), stdin, InputFormat::Json)?;
                Ok(per_theory(&ts, |_, t| edge_examples(t).map_err(data))?.concat())
            };
            let train_set = examples(&train, stdin)?;
            let hyper = Hyperparameters { learning_rate, epochs, seed };
            let model = fit_linear_scorer(&train_set, hyper).map_err(data)?;
            let _ = writeln!(stderr, "train edge accuracy {:.4} on {} cells", model.accuracy(&train_set), train_set.len());
            if let Some(d) = &dev {
                let dev_set = examples(d, stdin)?;
                let untrained = fit_linear_scorer(&train_set, Hyperparameters { epochs: 0, ..hyper }).map_err(data)?;
                let _ = writeln!(
                    stderr,
                    "dev edge accuracy {:.4} (untrained {:.4}) on {} cells",
                    model.accuracy(&dev_set),
                    untrained.accuracy(&dev_set),
                    dev_set.len()
                );
            }
            with_output(&output, stdout, |w| {
                serde_json::to_writer_pretty(&mut *w, &model).map_err(data)?;
                writeln!(w).map_err(io_err)
            })
        }
        Command::ScoreEdges { io, model } => {
            validate_io(&io)?;
            require_file(&model)?;
            let scorer: LinearScorer =
                serde_json::from_reader(BufReader::new(File::open(&model).map_err(io_err)?)).map_err(data)?;
            let ts = read_theories(&io.input, stdin, InputFormat::Json)?;
            let recs = per_theory(&ts, |_, t| {
                let mut out = Vec::new();
                for q in &t.questions {
                    let (Some(answer), Some(gold)) = (q.answer, q.proofs.as_ref().and_then(|p| p.first())) else {
                        continue;
                    };
                    let p = scorer.potentials(t, &gold_node_labels(t.layout(), gold));
                    out.push(PotentialsRecord::new(&t.id, &q.id, f64::from(u8::from(answer)), p));
                }
                Ok(out)
            })?;
            with_output(&io.output, stdout, |w| write_jsonl(w, &recs.concat()))
        }
        Command::Decode { io, no_connectivity, unconstrained } => {
            validate_io(&io)?;
            let recs: Vec<PotentialsRecord> = read_jsonl(open_input(&io.input, stdin)?)?;
            let preds: Vec<PredictionRecord> = recs
                .par_iter()
                .map(|rec| {
                    let ids = format!("{}/{}", rec.theory_id, rec.question_id);
                    let p = rec.potentials().map_err(|e| CliError::Data(format!("{ids}: {e}")))?;
                    let r = if unconstrained {
                        decode_unconstrained(&p)
                    } else if no_connectivity {
                        decode_proof(&p, Connectivity::Off)
                    } else {
                        decode(&p, Connectivity::On)
                    }
                    .map_err(|e| CliError::Data(format!("{ids}: {e}")))?;
                    if !r.optimal && !r.connectivity_relaxed {
                        return Err(CliError::Internal(format!("{ids}: connected output without a flow certificate")));
                    }
                    Ok(PredictionRecord::new(&rec.theory_id, &rec.question_id, rec.qa_prob >= 0.5, &r))
                })
                .collect::<Result<_, _>>()?;
            with_output(&io.output, stdout, |w| write_jsonl(w, &preds))
        }
        Command::Eval { predictions, theories, label, json, output } => {
            require_file(&theories)?;
            if let Some(p) = &predictions {
                require_file(p)?;
            }
            for p in [&json, &output].into_iter().flatten() {
                require_parent(p)?;
            }
            let ts = read_theories(&Some(theories), stdin, InputFormat::Json)?;
            let preds: Vec<PredictionRecord> = read_jsonl(open_input(&predictions, stdin)?)?;
            let report = aggregate_report(&ts, &preds, &label).map_err(data)?;
            if report.skipped > 0 {
                let _ = writeln!(stderr, "warning: {} questions without gold proofs skipped", report.skipped);
            }
            if let Some(j) = &json {
                let mut w = BufWriter::new(File::create(j).map_err(io_err)?);
                serde_json::to_writer_pretty(&mut w, &report).map_err(data)?;
                writeln!(w).map_err(io_err)?;
                w.flush().map_err(io_err)?;
            }
            with_output(&output, stdout, |w| w.write_all(report.to_table().as_bytes()).map_err(io_err))
        }
        Command::Critical { io } => {
            validate_io(&io)?;
            let ts = read_theories(&io.input, stdin, InputFormat::Json)?;
            let recs = per_theory(&ts, |_, t| {
                t.questions
                    .iter()
                    .map(|q| {
                        let answer = crate::reasoner::answer_question(t, q).map_err(data)?;
                        let crit = critical_sentences(t, q).map_err(data)?;
                        Ok(CriticalRecord {
                            theory_id: t.id.clone(),
                            question_id: q.id.clone(),
                            answer,
                            critical: crit.iter().map(|id| id.node().to_string()).collect(),
                        })
                    })
                    .collect::<Result<Vec<_>, CliError>>()
            })?;
            with_output(&io.output, stdout, |w| write_jsonl(w, &recs.concat()))
        }
        Command::RenderDot { input, output } => {
            if let Some(p) = &input {
                require_file(p)?;
            }
            let ts = read_theories(&input, stdin, InputFormat::Json)?;
            std::fs::create_dir_all(&output).map_err(io_err)?;
            let mut written = 0;
            for t in &ts {
                for q in &t.questions {
                    for (k, p) in q.proofs.iter().flatten().enumerate() {
                        let name = format!("{}_{}_{}", t.id, q.id, k + 1);
                        std::fs::write(output.join(format!("{name}.dot")), p.to_dot(&name, Some(t))).map_err(io_err)?;
                        written += 1;
                    }
                }
            }
            let _ = writeln!(stderr, "wrote {written} DOT files to {}", output.display());
            Ok(())
        }
    }
}
