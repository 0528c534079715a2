use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cough_core::annotation::Annotations;
use cough_core::binio;
use cough_core::config::PipelineConfig;
use cough_core::dataset::DatasetManifest;
use cough_core::dsp::load_wav;
use cough_core::evaluation::Confusion;
use cough_core::features::{FeatureExtractor, FeatureTable};
use cough_core::pipeline::{
    cross_validate, extract_manifest, extract_signal, observations, run_selection, train_detectors, Detector,
    GroupPrediction, Recording, TrainMode,
};
use cough_core::selection::SelectionReport;
use cough_core::synth::write_corpus;
use log::{info, warn};

use crate::{Cli, Command, Failure};

type Outcome<T = ()> = std::result::Result<T, Failure>;

const FEATURE_EXT: &str = "cft";
const SELECTION_JSON: &str = "selection.json";
const SELECTION_TXT: &str = "selection.txt";
const REPORT_STEM: &str = "evaluation";

struct Context {
    config: PipelineConfig,
    output_dir: PathBuf,
}

impl Context {
    fn path(&self, p: &Path) -> PathBuf {
        PipelineConfig::resolve(&self.output_dir, p)
    }

    fn features_dir(&self) -> PathBuf {
        self.path(&self.config.paths.features)
    }

    fn selection_dir(&self) -> PathBuf {
        self.path(&self.config.paths.selection)
    }

    fn models_dir(&self) -> PathBuf {
        self.path(&self.config.paths.models)
    }
}

fn load_config(cli: &Cli) -> Outcome<PipelineConfig> {
    let mut config = match &cli.global.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.global.seed {
        config.seed = seed;
    }
    Ok(config)
}

pub fn run(cli: &Cli) -> Outcome {
    let ctx = Context {
        config: load_config(cli)?,
        output_dir: cli.global.output_dir.clone(),
    };
    match &cli.command {
        Command::Synth { out } => synth(&ctx, out.as_deref()),
        Command::Extract { manifest, csv } => extract(&ctx, manifest.as_deref(), *csv),
        Command::Select => select(&ctx),
        Command::Train { mode, representation } => {
            let mut ctx = ctx;
            if let Some(r) = representation {
                ctx.config.representation.kind = *r;
            }
            train(&ctx, mode.unwrap_or(ctx.config.training.mode))
        }
        Command::Predict { model, inputs } => predict(&ctx, model.as_deref(), inputs),
        Command::Evaluate {
            scheme,
            representation,
            modes,
            guard_groups,
        } => {
            let mut ctx = ctx;
            let e = &mut ctx.config.evaluation;
            if let Some(s) = scheme {
                e.scheme = *s;
            }
            if !modes.is_empty() {
                e.modes = modes.clone();
            }
            if let Some(g) = guard_groups {
                e.guard_groups = *g;
            }
            if let Some(r) = representation {
                ctx.config.representation.kind = *r;
            }
            evaluate(&ctx)
        }
        Command::Config => {
            print!("{}", ctx.config.to_toml()?);
            Ok(())
        }
    }
}

fn synth(ctx: &Context, out: Option<&Path>) -> Outcome {
    let dir = out.map_or_else(|| ctx.path(&ctx.config.paths.corpus), Path::to_path_buf);
    let manifest = write_corpus(&dir, &ctx.config.synth, ctx.config.seed)?;
    info!(
        "wrote {} recordings and manifest.csv to {}",
        manifest.entries.len(),
        dir.display()
    );
    Ok(())
}

fn extract(ctx: &Context, manifest: Option<&Path>, csv: bool) -> Outcome {
    let path = manifest.map_or_else(
        || ctx.path(&ctx.config.paths.corpus).join("manifest.csv"),
        Path::to_path_buf,
    );
    if !path.is_file() {
        return Err(Failure::Input(format!(
            "manifest {} not found; pass --manifest or run `coughdet synth` first",
            path.display()
        )));
    }
    let manifest = DatasetManifest::load(&path)?;
    if manifest.entries.is_empty() {
        warn!("manifest {} lists no recordings; nothing to extract", path.display());
        return Ok(());
    }
    let (tables, failures) = extract_manifest(&manifest, &ctx.config.extraction)?;
    let dir = ctx.features_dir();
    for t in &tables {
        let stem = dir.join(&t.recording_id);
        t.write_bin(&stem.with_extension(FEATURE_EXT))?;
        if csv {
            t.write_csv(&stem.with_extension("csv"))?;
        }
    }
    info!(
        "extracted {} of {} recordings into {}",
        tables.len(),
        manifest.entries.len(),
        dir.display()
    );
    if failures.is_empty() {
        return Ok(());
    }
    for f in &failures {
        eprintln!("failed: {}: {}", f.wav.display(), f.error);
    }
    let internal = failures.iter().any(|f| !f.error.is_input_error());
    let msg = format!(
        "{} of {} recordings could not be extracted",
        failures.len(),
        manifest.entries.len()
    );
    Err(if internal {
        Failure::Internal(msg)
    } else {
        Failure::Input(msg)
    })
}

fn load_feature_dir(dir: &Path) -> Outcome<Vec<FeatureTable>> {
    let missing = || {
        Failure::Input(format!(
            "no feature files in {}; run `coughdet extract` first",
            dir.display()
        ))
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|_| missing())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == FEATURE_EXT))
        .collect();
    if paths.is_empty() {
        return Err(missing());
    }
    paths.sort();
    paths
        .iter()
        .map(|p| FeatureTable::read_bin(p).map_err(Failure::from))
        .collect()
}

fn load_selection(ctx: &Context) -> Outcome<SelectionReport> {
    let path = ctx.selection_dir().join(SELECTION_JSON);
    if !path.is_file() {
        return Err(Failure::Input(format!(
            "no selection report at {}; run `coughdet select` first",
            path.display()
        )));
    }
    Ok(SelectionReport::load(&path)?)
}

fn recordings(ctx: &Context, tables: &[FeatureTable], features: &[String]) -> Outcome<Vec<Recording>> {
    tables
        .iter()
        .map(|t| Recording::from_table(t, features, ctx.config.normalize_recordings).map_err(Failure::from))
        .collect()
}

fn select(ctx: &Context) -> Outcome {
    let tables = load_feature_dir(&ctx.features_dir())?;
    let outcome = run_selection(&tables, &ctx.config)?;
    let report = SelectionReport::from_outcome(&outcome);
    let dir = ctx.selection_dir();
    report.save(&dir.join(SELECTION_JSON), &dir.join(SELECTION_TXT))?;
    info!(
        "selected {} of {} features from {} recordings; report in {}",
        report.selected_names.len(),
        outcome.feature_names.len(),
        tables.len(),
        dir.display()
    );
    Ok(())
}

fn model_file(mode: TrainMode, d: &Detector) -> String {
    match d.scenario {
        Some(s) => format!("{mode}-{s}.cdet"),
        None => format!("{mode}.cdet"),
    }
}

fn train(ctx: &Context, mode: TrainMode) -> Outcome {
    let tables = load_feature_dir(&ctx.features_dir())?;
    let selection = load_selection(ctx)?;
    let recs = recordings(ctx, &tables, &selection.selected_names)?;
    let obs = observations(&recs);
    let detectors = train_detectors(&recs, &obs, mode, &selection.selected_names, &ctx.config)?;
    let dir = ctx.models_dir();
    for d in &detectors {
        let path = dir.join(model_file(mode, d));
        d.save(&path)?;
        info!("wrote {}", path.display());
    }
    Ok(())
}

fn prediction_csv(preds: &[GroupPrediction]) -> String {
    let mut out = String::from("group,start_s,end_s,score,label,truth\n");
    for p in preds {
        let truth = p.truth.map_or(String::new(), |t| u8::from(t).to_string());
        let _ = writeln!(
            out,
            "{},{:.4},{:.4},{:.6},{},{}",
            p.group,
            p.start_s,
            p.end_s,
            p.score,
            u8::from(p.label),
            truth
        );
    }
    out
}

fn expand_inputs(inputs: &[PathBuf]) -> Outcome<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|q| q.extension().is_some_and(|x| x == FEATURE_EXT))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn load_input(ctx: &Context, path: &Path) -> Outcome<FeatureTable> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    match ext.as_str() {
        "wav" => {
            let signal = load_wav(path)?;
            let annotation = path.with_extension("csv");
            let ann = if annotation.is_file() {
                Some(Annotations::load(&annotation)?)
            } else {
                None
            };
            let extractor = FeatureExtractor::new(&ctx.config.extraction)?;
            let mut t = extract_signal(&extractor, &signal, ann.as_ref()).map_err(|e| e.with_path(path))?;
            t.recording_id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok(t)
        }
        "cft" => Ok(FeatureTable::read_bin(path)?),
        "csv" => Ok(FeatureTable::read_csv(path)?),
        _ => Err(Failure::Input(format!(
            "{}: expected a .wav, .cft or .csv input",
            path.display()
        ))),
    }
}

fn predict(ctx: &Context, model: Option<&Path>, inputs: &[PathBuf]) -> Outcome {
    let model = model.map_or_else(
        || ctx.models_dir().join(format!("{}.cdet", ctx.config.training.mode)),
        Path::to_path_buf,
    );
    if !model.is_file() {
        return Err(Failure::Input(format!(
            "no detector at {}; run `coughdet train` first or pass --model",
            model.display()
        )));
    }
    let detector = Detector::load(&model)?;
    let inputs = if inputs.is_empty() {
        vec![ctx.features_dir()]
    } else {
        inputs.to_vec()
    };
    let files = expand_inputs(&inputs)?;
    if files.is_empty() {
        warn!("no inputs to label");
        return Ok(());
    }
    let layout = *FeatureExtractor::new(&ctx.config.extraction)?.layout();
    let dir = ctx.path(&ctx.config.paths.predictions);
    let mut conf = Confusion::default();
    let mut graded = false;
    for f in &files {
        let table = load_input(ctx, f)?;
        let preds = detector
            .predict_table(&table, &layout)
            .map_err(|e| Failure::Input(format!("{}: {e}", f.display())))?;
        let (labels, truth): (Vec<bool>, Vec<bool>) =
            preds.iter().filter_map(|p| p.truth.map(|t| (p.label, t))).unzip();
        if !truth.is_empty() {
            conf += Confusion::from_predictions(&labels, &truth)?;
            graded = true;
        }
        let out = dir.join(format!("{}.csv", table.recording_id));
        binio::write_atomic(&out, prediction_csv(&preds).as_bytes())?;
        let coughs = preds.iter().filter(|p| p.label).count();
        info!(
            "{}: {coughs} of {} groups labelled cough",
            table.recording_id,
            preds.len()
        );
    }
    if graded {
        println!(
            "SEN {:.2}  SPE {:.2}  ACC {:.2}  ({} groups with ground truth)",
            conf.sen(),
            conf.spe(),
            conf.acc(),
            conf.total()
        );
    }
    info!("predictions in {}", dir.display());
    Ok(())
}

fn evaluate(ctx: &Context) -> Outcome {
    let tables = load_feature_dir(&ctx.features_dir())?;
    let selection = load_selection(ctx)?;
    let recs = recordings(ctx, &tables, &selection.selected_names)?;
    let summary = cross_validate(&recs, &selection.selected_names, &ctx.config)?;
    let dir = ctx.path(&ctx.config.paths.reports);
    summary.save(&dir, REPORT_STEM)?;
    print!("{}", summary.to_text());
    info!("reports in {}", dir.display());
    Ok(())
}
