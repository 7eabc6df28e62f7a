//! `ctr`: build decoders, normalize typed text, and run evaluation
//! experiments from the command line.
//!
//! Exit status is 0 on success, 1 for configuration errors (bad flags or
//! parameters) and 2 for data errors (unreadable or malformed files).

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctr_core::eval::{evaluate_pairs, parse_pairs, EvaluationKey, EvaluationReport};
use ctr_core::ld::{ClassInventory, LdKind, LinguisticDecoder, TaggedCorpus};
use ctr_core::od::{build_od, ErrorType, ErrorTypeSet, KeyboardMap, OdSet, TrainingParams, Vocabulary};
use ctr_core::pipeline::{
    derive_vocabulary, dialogue_lines_to_string, estimate_ld, generate_car_corpus, parse_dialogue_lines, read_file,
    run_experiment_with_od, run_recognize, synthesize_corpus, write_file, ExperimentConfig, ExperimentData,
    SyntheticErrorSpec, CAR_CLASSES, DEFAULT_BEAM, DEFAULT_LD_DELTA,
};
use ctr_core::token::BeamConfig;

const OD_DIR: &str = "od";
const LD_FILE: &str = "ld.txt";

#[derive(Parser)]
#[command(name = "ctr", version, about = "Connected text recognition with layered HMMs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one character-level word model per vocabulary entry.
    BuildOd(BuildOdArgs),
    /// Estimate the linguistic decoder over an existing orthographic decoder.
    BuildLd(BuildLdArgs),
    /// Normalize a file of typed utterances, one per line.
    Recognize(RecognizeArgs),
    /// Score `original<TAB>normalized` pairs against a key.
    Evaluate(EvaluateArgs),
    /// Cross-validated experiment over a tagged corpus.
    Experiment(ExperimentArgs),
    /// Add seeded typing errors to a clean corpus and write the key.
    Synth(SynthArgs),
}

#[derive(Args)]
struct OdTraining {
    /// Baum-Welch iterations per word model.
    #[arg(long, default_value_t = 10)]
    bw_iters: usize,
    /// Copies of the clean word in each training corpus.
    #[arg(long, default_value_t = 5)]
    clean_weight: usize,
    /// Initial emission probability of a state's own character.
    #[arg(long, default_value_t = 0.9)]
    bias: f64,
    /// Error types used for training corpora, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![
        "substitution".to_string(), "deletion".to_string(), "white-space-insertion".to_string()
    ])]
    errors: Vec<String>,
    /// Keyboard neighbour file; QWERTY when absent.
    #[arg(long)]
    keyboard: Option<PathBuf>,
}

#[derive(Args)]
struct BuildOdArgs {
    /// Vocabulary file, one entry per line.
    #[arg(long, conflicts_with = "corpus", required_unless_present = "corpus")]
    vocab: Option<PathBuf>,
    /// Derive the vocabulary from a (tagged or untagged) corpus instead.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Extra entries, typically multi-word ones, added to a derived vocabulary.
    #[arg(long, requires = "corpus")]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    model_dir: PathBuf,
    /// Emission smoothing constant.
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
    #[command(flatten)]
    training: OdTraining,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Baseline,
    Unigram,
    Biclass,
}

impl From<Kind> for LdKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Baseline => LdKind::Baseline,
            Kind::Unigram => LdKind::Unigram,
            Kind::Biclass => LdKind::Biclass,
        }
    }
}

#[derive(Args)]
struct BuildLdArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Directory holding the orthographic decoder; the result goes here too.
    #[arg(long)]
    model_dir: PathBuf,
    #[arg(long, value_enum, default_value = "baseline")]
    ld: Kind,
    /// Class inventory, one class per line (biclass only).
    #[arg(long)]
    classes: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_LD_DELTA)]
    delta: f64,
}

#[derive(Args)]
struct RecognizeArgs {
    #[arg(long)]
    model_dir: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Beam width, or `inf` for none.
    #[arg(long, default_value_t = BeamConfig::Width(DEFAULT_BEAM))]
    beam: BeamConfig,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Tsv,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long)]
    key: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Experiment name in the table heading.
    #[arg(long, default_value = "run")]
    label: String,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Clean tagged corpus.
    #[arg(long)]
    corpus: PathBuf,
    /// Typed utterances parallel to the corpus; synthesized when absent.
    #[arg(long, requires = "key")]
    noisy: Option<PathBuf>,
    #[arg(long, requires = "noisy")]
    key: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "baseline")]
    ld: Kind,
    #[arg(long)]
    classes: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = BeamConfig::Width(DEFAULT_BEAM))]
    beam: BeamConfig,
    /// Linguistic decoder smoothing constant.
    #[arg(long, default_value_t = DEFAULT_LD_DELTA)]
    delta: f64,
    /// Word model emission smoothing constant.
    #[arg(long, default_value_t = 1e-3)]
    od_delta: f64,
    #[command(flatten)]
    training: OdTraining,
    #[command(flatten)]
    rates: ErrorRates,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Also print every fold's report.
    #[arg(long)]
    per_fold: bool,
    /// Write the pooled pair stream here.
    #[arg(long)]
    pairs_out: Option<PathBuf>,
}

#[derive(Args)]
struct ErrorRates {
    /// Per-character substitution rate for synthesized errors.
    #[arg(long, default_value_t = 0.004)]
    sub_rate: f64,
    /// Per-character deletion rate (also drops separating spaces).
    #[arg(long, default_value_t = 0.003)]
    del_rate: f64,
    /// Per-character space insertion rate.
    #[arg(long, default_value_t = 0.002)]
    space_rate: f64,
    /// Per-word neighbour-key insertion rate.
    #[arg(long, default_value_t = 0.0)]
    ins_rate: f64,
    /// Per-word transposition rate.
    #[arg(long, default_value_t = 0.0)]
    trans_rate: f64,
    /// Per-word double-stroke rate.
    #[arg(long, default_value_t = 0.0)]
    double_rate: f64,
}

impl ErrorRates {
    fn spec(&self, seed: u64) -> SyntheticErrorSpec {
        SyntheticErrorSpec {
            substitution: self.sub_rate,
            deletion: self.del_rate,
            space_insertion: self.space_rate,
            insertion: self.ins_rate,
            transposition: self.trans_rate,
            double_stroke: self.double_rate,
            seed,
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Clean tagged corpus; a car-dialogue corpus is generated when absent.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Dialogues to generate.
    #[arg(long, default_value_t = 20, conflicts_with = "corpus")]
    dialogues: usize,
    /// Utterances per generated dialogue.
    #[arg(long, default_value_t = 15, conflicts_with = "corpus")]
    utterances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    keyboard: Option<PathBuf>,
    #[command(flatten)]
    rates: ErrorRates,
    /// Typed utterances, one per line with `##dialogue` separators.
    #[arg(long)]
    noisy_out: PathBuf,
    #[arg(long)]
    key_out: PathBuf,
    /// Where to write the generated clean corpus.
    #[arg(long)]
    corpus_out: Option<PathBuf>,
    /// Where to write the class inventory of the generated corpus.
    #[arg(long)]
    classes_out: Option<PathBuf>,
}

enum CliError {
    Config(String),
    Core(ctr_core::Error),
}

impl From<ctr_core::Error> for CliError {
    fn from(e: ctr_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(e) if e.is_config() => 1,
            CliError::Core(_) => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn keyboard(path: Option<&Path>) -> CliResult<KeyboardMap> {
    match path {
        Some(p) => Ok(KeyboardMap::parse(&read_file(p)?).map_err(|e| e.with_path(p))?),
        None => Ok(KeyboardMap::qwerty()),
    }
}

fn error_types(names: &[String]) -> CliResult<ErrorTypeSet> {
    let types = names
        .iter()
        .map(|n| n.trim().parse::<ErrorType>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ErrorTypeSet::of(&types))
}

fn training_params(t: &OdTraining, delta: f64) -> TrainingParams {
    TrainingParams {
        bias: t.bias,
        bw_iterations: t.bw_iters,
        smoothing_delta: delta,
        clean_weight: t.clean_weight,
    }
}

fn corpus(path: &Path) -> CliResult<TaggedCorpus> {
    Ok(TaggedCorpus::parse(&read_file(path)?).map_err(|e| e.with_path(path))?)
}

fn inventory(path: Option<&Path>, kind: LdKind) -> CliResult<Option<ClassInventory>> {
    match (path, kind) {
        (Some(p), _) => Ok(Some(ClassInventory::parse(&read_file(p)?).map_err(|e| e.with_path(p))?)),
        (None, LdKind::Biclass) => Err(CliError::Config("--ld biclass needs --classes".into())),
        (None, _) => Ok(None),
    }
}

fn build_od_cmd(a: BuildOdArgs) -> CliResult<()> {
    let vocab = match (&a.vocab, &a.corpus) {
        (Some(v), _) => Vocabulary::parse(&read_file(v)?).map_err(|e| e.with_path(v))?,
        (None, Some(c)) => {
            let lexicon = match &a.lexicon {
                Some(l) => Some(Vocabulary::parse(&read_file(l)?).map_err(|e| e.with_path(l))?),
                None => None,
            };
            derive_vocabulary(&corpus(c)?, lexicon.as_ref())?
        }
        (None, None) => return Err(CliError::Config("give --vocab or --corpus".into())),
    };
    let kb = keyboard(a.training.keyboard.as_deref())?;
    let types = error_types(&a.training.errors)?;
    let od = build_od(&vocab, types, &kb, &training_params(&a.training, a.delta))?;
    od.save(&a.model_dir.join(OD_DIR))?;
    println!(
        "built {} word models in {}",
        od.len(),
        a.model_dir.join(OD_DIR).display()
    );
    Ok(())
}

fn load_od(model_dir: &Path) -> CliResult<OdSet> {
    Ok(OdSet::load(&model_dir.join(OD_DIR))?)
}

fn build_ld_cmd(a: BuildLdArgs) -> CliResult<()> {
    let kind = LdKind::from(a.ld);
    let od = load_od(&a.model_dir)?;
    let inv = inventory(a.classes.as_deref(), kind)?;
    let corpus = match (&a.corpus, kind) {
        (Some(p), _) => corpus(p)?,
        (None, LdKind::Baseline) => TaggedCorpus::default(),
        (None, _) => return Err(CliError::Config(format!("--ld {kind} needs --corpus"))),
    };
    let ld = estimate_ld(kind, &corpus, od.vocabulary(), inv.as_ref(), a.delta)?;
    let path = a.model_dir.join(LD_FILE);
    write_file(&path, &ld.to_file_string(od.vocabulary())?)?;
    println!("wrote {kind} decoder to {}", path.display());
    Ok(())
}

fn recognize_cmd(a: RecognizeArgs) -> CliResult<()> {
    let od = load_od(&a.model_dir)?;
    let path = a.model_dir.join(LD_FILE);
    let (ld, labels) = LinguisticDecoder::parse(&read_file(&path)?).map_err(|e| e.with_path(&path))?;
    if labels != od.vocabulary().entries() {
        return Err(ctr_core::Error::InvalidModel(format!(
            "{} was built over a different vocabulary than the word models",
            path.display()
        ))
        .into());
    }
    let n = run_recognize(&ld, &od, a.beam, &a.input, &a.output)?;
    println!("normalized {n} utterances into {}", a.output.display());
    Ok(())
}

fn print_report(report: &EvaluationReport, label: &str, format: Format) {
    match format {
        Format::Table => print!("{}", report.to_table(label)),
        Format::Tsv => print!("{}", report.to_tsv()),
    }
}

fn evaluate_cmd(a: EvaluateArgs) -> CliResult<()> {
    let pairs = parse_pairs(&read_file(&a.pairs)?).map_err(|e| e.with_path(&a.pairs))?;
    let key = EvaluationKey::parse(&read_file(&a.key)?).map_err(|e| e.with_path(&a.key))?;
    print_report(&evaluate_pairs(&pairs, &key), &a.label, a.format);
    Ok(())
}

fn experiment_cmd(a: ExperimentArgs) -> CliResult<()> {
    let kind = LdKind::from(a.ld);
    let clean = corpus(&a.corpus)?;
    let inv = inventory(a.classes.as_deref(), kind)?;
    let kb = keyboard(a.training.keyboard.as_deref())?;
    let (noisy, key) = match (&a.noisy, &a.key) {
        (Some(n), Some(k)) => (
            parse_dialogue_lines(&read_file(n)?),
            EvaluationKey::parse(&read_file(k)?).map_err(|e| e.with_path(k))?,
        ),
        _ => {
            let s = synthesize_corpus(&clean, &a.rates.spec(a.seed), &kb)?;
            (s.noisy, s.key)
        }
    };
    let config = ExperimentConfig {
        ld_kind: kind,
        od_params: training_params(&a.training, a.od_delta),
        error_types: error_types(&a.training.errors)?,
        ld_delta: a.delta,
        beam: a.beam,
        folds: a.folds,
        seed: a.seed,
    };
    let data = ExperimentData {
        corpus: &clean,
        noisy: &noisy,
        key: &key,
        inventory: inv.as_ref(),
    };
    let vocab = derive_vocabulary(&clean, None)?;
    let od = build_od(&vocab, config.error_types, &kb, &config.od_params)?;
    let result = run_experiment_with_od(&config, &data, &od)?;
    if a.per_fold {
        for (i, fold) in result.folds.iter().enumerate() {
            print_report(&fold.report, &format!("{kind}, fold {}", i + 1), a.format);
            println!();
        }
    }
    print_report(&result.pooled, &format!("{kind}, pooled"), a.format);
    if let Some(out) = &a.pairs_out {
        let pairs: Vec<_> = result.folds.iter().flat_map(|f| f.pairs.iter().cloned()).collect();
        write_file(out, &ctr_core::eval::pairs_to_string(&pairs))?;
    }
    Ok(())
}

fn synth_cmd(a: SynthArgs) -> CliResult<()> {
    let clean = match &a.corpus {
        Some(p) => corpus(p)?,
        None => generate_car_corpus(a.dialogues, a.utterances, a.seed),
    };
    let kb = keyboard(a.keyboard.as_deref())?;
    let s = synthesize_corpus(&clean, &a.rates.spec(a.seed), &kb)?;
    write_file(&a.noisy_out, &dialogue_lines_to_string(&s.noisy))?;
    write_file(&a.key_out, &s.key.to_file_string())?;
    if let Some(p) = &a.corpus_out {
        write_file(p, &clean.to_file_string())?;
    }
    if let Some(p) = &a.classes_out {
        let classes = match &a.corpus {
            Some(_) => clean.class_tags(),
            None => CAR_CLASSES.iter().map(|c| c.to_string()).collect(),
        };
        write_file(p, &(classes.join("\n") + "\n"))?;
    }
    println!("{} utterances, {} erroneous", clean.utterance_count(), s.key.len());
    for (cat, n) in s.category_counts() {
        println!("{}\t{n}", cat.name());
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::BuildOd(a) => build_od_cmd(a),
        Command::BuildLd(a) => build_ld_cmd(a),
        Command::Recognize(a) => recognize_cmd(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Experiment(a) => experiment_cmd(a),
        Command::Synth(a) => synth_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ctr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
