//! Command-line front end. Every subcommand resolves its configuration the
//! same way: JSON config file first, then flag overrides, with the
//! HYBRIDSIG_SEED environment variable as a last-resort seed when neither
//! flag nor file picks one. The resolved config is logged to stderr before
//! any work starts, and exit codes are stable for scripting: 0 success,
//! 1 runtime or I/O failure, 2 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hybridsig_modem::{normalize_segment, ModulationScheme, SEGMENT_LEN};
use hybridsig_nn::{image_to_tensor, load_model, save_model};
use hybridsig_pipeline::{
    compare_representations, evaluate, generate_dataset, load_dataset_manifest,
    load_image_manifest, parse_snr, read_iq, render_dataset, render_segment, train,
    ConfusionMatrix, ExperimentConfig, PipelineError,
};
use hybridsig_raster::{decode_image, encode_image, stack_iq, Representation};

#[derive(Parser)]
#[command(
    name = "hybridsig",
    version,
    about = "Modulation classification pipeline: synthesize IQ datasets, render image representations, train and compare classifiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the labeled IQ dataset and its manifest
    Generate(GenerateArgs),
    /// Render a dataset into one image representation
    Render(RenderArgs),
    /// Train a classifier on a rendered image tree
    Train(TrainArgs),
    /// Score a saved model on an image tree's test split
    Eval(EvalArgs),
    /// Run the full four-representation comparison
    Compare(CompareArgs),
    /// Classify a single stored IQ segment
    Predict(PredictArgs),
    /// Describe a saved model: layers, shapes, parameter count
    Inspect(InspectArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Directory to create the dataset under
    #[arg(long)]
    out: PathBuf,
    /// JSON experiment config; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Channel SNR in dB, or "inf" for a noiseless channel
    #[arg(long, value_parser = snr_flag)]
    snr: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Train+validation segments per class
    #[arg(long)]
    per_class: Option<usize>,
    /// Held-out test segments per class
    #[arg(long)]
    test_per_class: Option<usize>,
}

#[derive(Args)]
struct RenderArgs {
    /// Dataset directory produced by `generate`
    #[arg(long)]
    dataset: PathBuf,
    /// Representation to render: time, psd, spec, or hybrid
    #[arg(long, value_parser = rep_flag)]
    rep: Option<Representation>,
    /// Directory to write images and their index under
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Square image edge in pixels (multiple of 8)
    #[arg(long)]
    canvas: Option<usize>,
    /// dB span mapped onto pixel intensity in spectral renders
    #[arg(long)]
    db_range: Option<f64>,
    /// Render this many segments in parallel
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct TrainArgs {
    /// Image tree produced by `render`
    #[arg(long)]
    images: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Mini-batch size
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    learning_rate: Option<f64>,
    /// File to write the trained model to
    #[arg(long)]
    model_out: PathBuf,
    /// Per-sample parallelism inside a batch; values other than 1 are
    /// deterministic per value but not bit-identical to the reference
    #[arg(long)]
    jobs_train: Option<usize>,
}

#[derive(Args)]
struct EvalArgs {
    /// Saved model file
    #[arg(long)]
    model: PathBuf,
    /// Image tree produced by `render`
    #[arg(long)]
    images: PathBuf,
    /// Optional JSON report destination
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory to leave the dataset, images, models, and reports under
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_parser = snr_flag)]
    snr: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Render this many segments in parallel
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Per-sample training parallelism (non-reference mode)
    #[arg(long)]
    jobs_train: Option<usize>,
}

#[derive(Args)]
struct PredictArgs {
    /// Saved model file
    #[arg(long)]
    model: PathBuf,
    /// Stored IQ segment (little-endian f32 interleaved I,Q)
    #[arg(long)]
    iq: PathBuf,
    /// Representation the model was trained on
    #[arg(long, value_parser = rep_flag)]
    rep: Option<Representation>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    db_range: Option<f64>,
}

#[derive(Args)]
struct InspectArgs {
    /// Saved model file
    #[arg(long)]
    model: PathBuf,
}

fn snr_flag(text: &str) -> Result<f64, String> {
    parse_snr(text).map_err(|e| e.to_string())
}

fn rep_flag(text: &str) -> Result<Representation, String> {
    Representation::ALL
        .into_iter()
        .find(|r| r.name() == text)
        .ok_or_else(|| format!("unknown representation {text:?}; expected time, psd, spec, or hybrid"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests land here too; only genuine usage
            // errors take the error path.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                PipelineError::InvalidArgument(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Generate(a) => cmd_generate(a),
        Command::Render(a) => cmd_render(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Inspect(a) => cmd_inspect(a),
    }
}

struct FileConfig {
    cfg: ExperimentConfig,
    file_sets_seed: bool,
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig, PipelineError> {
    let Some(path) = path else {
        return Ok(FileConfig {
            cfg: ExperimentConfig::default(),
            file_sets_seed: false,
        });
    };
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let raw: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| PipelineError::Format(format!("{}: {e}", path.display())))?;
    let file_sets_seed = raw.get("seed").is_some();
    Ok(FileConfig {
        cfg: ExperimentConfig::from_json(&text)?,
        file_sets_seed,
    })
}

/// Seed precedence: --seed flag, then the config file, then HYBRIDSIG_SEED,
/// then the built-in default already present in `cfg`.
fn resolve_seed(
    flag: Option<u64>,
    file_sets_seed: bool,
    cfg: &mut ExperimentConfig,
) -> Result<(), PipelineError> {
    if let Some(seed) = flag {
        cfg.seed = seed;
        return Ok(());
    }
    if file_sets_seed {
        return Ok(());
    }
    if let Ok(text) = std::env::var("HYBRIDSIG_SEED") {
        cfg.seed = text.trim().parse().map_err(|_| {
            PipelineError::InvalidArgument(format!(
                "HYBRIDSIG_SEED must be an unsigned integer, got {text:?}"
            ))
        })?;
    }
    Ok(())
}

fn log_config(cfg: &ExperimentConfig) {
    eprint!("resolved config:\n{}", cfg.to_json());
}

/// Writes a line to stdout, swallowing broken-pipe errors so piping into
/// `head` and friends does not turn into a panic.
fn say(text: impl AsRef<str>) {
    use std::io::Write as _;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_ref().as_bytes());
    let _ = out.write_all(b"\n");
}

/// Like [`say`] but without the trailing newline, for preformatted blocks.
fn say_raw(text: impl AsRef<str>) {
    use std::io::Write as _;
    let _ = std::io::stdout().lock().write_all(text.as_ref().as_bytes());
}

fn cmd_generate(a: GenerateArgs) -> Result<(), PipelineError> {
    let FileConfig {
        mut cfg,
        file_sets_seed,
    } = load_file_config(a.config.as_deref())?;
    if let Some(v) = a.snr {
        cfg.snr_db = v;
    }
    if let Some(v) = a.per_class {
        cfg.per_class = v;
    }
    if let Some(v) = a.test_per_class {
        cfg.test_per_class = v;
    }
    resolve_seed(a.seed, file_sets_seed, &mut cfg)?;
    cfg.validate()?;
    log_config(&cfg);
    let manifest = generate_dataset(&cfg, &a.out)?;
    say(format!(
        "wrote {} segments and manifest.json under {}",
        manifest.entries.len(),
        a.out.display()
    ));
    Ok(())
}

fn cmd_render(a: RenderArgs) -> Result<(), PipelineError> {
    let FileConfig { mut cfg, .. } = load_file_config(a.config.as_deref())?;
    if let Some(v) = a.canvas {
        cfg.canvas = v;
    }
    if let Some(v) = a.db_range {
        cfg.db_range = v;
    }
    if let Some(r) = a.rep {
        cfg.representation = Some(r);
    }
    let rep = cfg.representation.ok_or_else(|| {
        PipelineError::InvalidArgument(
            "no representation selected: pass --rep or set it in the config".into(),
        )
    })?;
    cfg.validate()?;
    log_config(&cfg);
    let manifest = load_dataset_manifest(&a.dataset.join("manifest.json"))?;
    let images = render_dataset(
        &a.dataset,
        &manifest,
        rep,
        cfg.canvas,
        cfg.db_range,
        &a.out,
        a.jobs,
    )?;
    let files: usize = images.entries.iter().map(|e| e.paths.len()).sum();
    say(format!(
        "rendered {} segments as {} ({} files) under {}",
        images.entries.len(),
        rep.name(),
        files,
        a.out.display()
    ));
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Result<(), PipelineError> {
    let FileConfig {
        mut cfg,
        file_sets_seed,
    } = load_file_config(a.config.as_deref())?;
    if let Some(v) = a.epochs {
        cfg.train.epochs = v;
    }
    if let Some(v) = a.batch {
        cfg.train.batch_size = v;
    }
    if let Some(v) = a.learning_rate {
        cfg.train.learning_rate = v;
    }
    if let Some(v) = a.jobs_train {
        cfg.train.jobs = v;
    }
    resolve_seed(a.seed, file_sets_seed, &mut cfg)?;
    cfg.train.validate()?;
    log_config(&cfg);
    let images = load_image_manifest(&a.images.join("images.json"))?;
    let (model, history) = train(&images, &a.images, &cfg.train, cfg.seed, |e| {
        eprintln!(
            "epoch {:>3}  loss {:.4}  train acc {:.4}  val acc {:.4}",
            e.epoch, e.train_loss, e.train_accuracy, e.val_accuracy
        );
    })?;
    if let Some(parent) = a.model_out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| PipelineError::Io {
                path: parent.display().to_string(),
                source: e,
            })?;
        }
    }
    save_model(&a.model_out, &model, None)?;
    let last = history.last().expect("at least one epoch");
    say(format!(
        "trained {} epochs, final val accuracy {:.4}, model written to {}",
        history.len(),
        last.val_accuracy,
        a.model_out.display()
    ));
    Ok(())
}

#[derive(serde::Serialize)]
struct EvalReport<'a> {
    accuracy: f64,
    confusion: &'a ConfusionMatrix,
}

fn cmd_eval(a: EvalArgs) -> Result<(), PipelineError> {
    let (model, _) = load_model(&a.model)?;
    let images = load_image_manifest(&a.images.join("images.json"))?;
    let matrix = evaluate(&model, &images, &a.images)?;
    say(format!("accuracy {:.4}", matrix.accuracy()));
    say_raw(matrix.to_text(""));
    if let Some(report_path) = a.report {
        let report = EvalReport {
            accuracy: matrix.accuracy(),
            confusion: &matrix,
        };
        let mut json = serde_json::to_string_pretty(&report)
            .map_err(|e| PipelineError::Format(e.to_string()))?;
        json.push('\n');
        std::fs::write(&report_path, json).map_err(|e| PipelineError::Io {
            path: report_path.display().to_string(),
            source: e,
        })?;
    }
    Ok(())
}

fn cmd_compare(a: CompareArgs) -> Result<(), PipelineError> {
    let FileConfig {
        mut cfg,
        file_sets_seed,
    } = load_file_config(a.config.as_deref())?;
    if let Some(v) = a.snr {
        cfg.snr_db = v;
    }
    if let Some(v) = a.jobs_train {
        cfg.train.jobs = v;
    }
    resolve_seed(a.seed, file_sets_seed, &mut cfg)?;
    cfg.validate()?;
    log_config(&cfg);
    let report = compare_representations(&cfg, &a.out, a.jobs, |line| eprintln!("{line}"))?;
    say_raw(report.to_text());
    Ok(())
}

fn cmd_predict(a: PredictArgs) -> Result<(), PipelineError> {
    let (model, _) = load_model(&a.model)?;
    let FileConfig { mut cfg, .. } = load_file_config(a.config.as_deref())?;
    if let Some(v) = a.db_range {
        cfg.db_range = v;
    }
    if let Some(r) = a.rep {
        cfg.representation = Some(r);
    }
    let rep = cfg.representation.ok_or_else(|| {
        PipelineError::InvalidArgument(
            "no representation selected: pass --rep or set it in the config".into(),
        )
    })?;
    if model.input_channels != rep.model_channels() {
        return Err(PipelineError::InvalidArgument(format!(
            "model expects {} input channels but the {} representation provides {}",
            model.input_channels,
            rep.name(),
            rep.model_channels()
        )));
    }
    let size = std::fs::metadata(&a.iq)
        .map_err(|e| PipelineError::Io {
            path: a.iq.display().to_string(),
            source: e,
        })?
        .len();
    let expected = (SEGMENT_LEN * 8) as u64;
    if size != expected {
        return Err(PipelineError::InvalidArgument(format!(
            "segment file must hold {SEGMENT_LEN} samples ({expected} bytes), got {size} bytes"
        )));
    }

    let samples = normalize_segment(&read_iq(&a.iq)?)?;
    let rendered = render_segment(&samples, rep, model.canvas, cfg.db_range)?;
    // Round-trip through the codec so inference sees the same 8-bit
    // quantization as the images the model was trained on.
    let mut quantized = Vec::with_capacity(rendered.len());
    for img in &rendered {
        quantized.push(decode_image(&encode_image(img)?)?);
    }
    let img = match rep {
        Representation::TimeIq => stack_iq(&quantized[0], &quantized[1])?,
        _ => quantized.pop().expect("render produced one image"),
    };
    let (label, probs) = model.predict(&image_to_tensor(&img)?)?;
    say(format!(
        "{} {:.6} {:.6} {:.6} {:.6}",
        ModulationScheme::ALL[label].name(),
        probs[0],
        probs[1],
        probs[2],
        probs[3]
    ));
    Ok(())
}

fn cmd_inspect(a: InspectArgs) -> Result<(), PipelineError> {
    let (model, opt) = load_model(&a.model)?;
    say(format!("input channels {}", model.input_channels));
    say(format!("canvas {}x{}", model.canvas, model.canvas));
    for line in model.summary() {
        say(line);
    }
    say(format!("total parameters {}", model.param_count()));
    say(format!(
        "optimizer state {}",
        if opt.is_some() { "present" } else { "absent" }
    ));
    Ok(())
}
