//! End-to-end pipeline: parse -> restrict -> keyframes -> features ->
//! normalize -> PCA -> windows -> repeated seeded clustering -> evaluation,
//! with per-run and aggregate artifacts written to the output directory.
//!
//! Ground-truth labels ride in a side channel: after parsing, nothing reads
//! them until window majority-labeling and evaluation.

use std::fs;
use std::path::{Path, PathBuf};

use had_core::cluster;
use had_core::eval;
use had_core::features::{self, FeatureLayout, FrameFeatureVector, SequenceStats};
use had_core::formats::{self, Format};
use had_core::keyframes;
use had_core::reduce::{self, WindowSample};
use had_core::skeleton::{self, JointModel, SkeletonFrame, SkeletonSequence};

use crate::config::{Algorithm, InputFormat, RunConfig};
use crate::error::{stage, Error, Result};
use crate::report::{aggregate, ExperimentReport, RunRecord};
use crate::svg;

/// Everything the pre-processing stages produce, kept around for stage dumps.
pub struct PreparedData {
    pub sequence: SkeletonSequence,
    pub flagged: Vec<usize>,
    pub energy: keyframes::EnergySeries,
    pub keyframes: keyframes::KeyframeSet,
    pub layout: FeatureLayout,
    pub pca: reduce::PcaModel,
    pub windows: Vec<WindowSample>,
    pub feature_names: Vec<String>,
    pub features: Vec<FrameFeatureVector>,
}

fn load_inputs(config: &RunConfig) -> Result<SkeletonSequence> {
    let model = JointModel::cad60();
    let mut frames: Vec<SkeletonFrame> = Vec::new();
    let mut ids: Vec<String> = Vec::new();
    let mut next_index = 0usize;
    for path in &config.inputs {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let seq = match config.format {
            InputFormat::Csv | InputFormat::Cad60 => {
                let file = fs::File::open(path).map_err(Error::Io)?;
                let format = if config.format == InputFormat::Csv { Format::Csv } else { Format::Cad60 };
                formats::parse_sequence(file, format, &model, &id)
                    .map_err(stage("skeleton_io", &id))?
            }
            InputFormat::Cad60Dir => formats::load_cad60_subject_dir(path, &model)
                .map_err(stage("skeleton_io", &id))?,
        };
        for mut f in seq.frames {
            f.index = next_index;
            next_index += 1;
            frames.push(f);
        }
        ids.push(seq.source_id);
    }
    let source_id = ids.join("+");
    SkeletonSequence::new(source_id.clone(), model, frames).map_err(stage("skeleton_io", &source_id))
}

fn load_neutral_override(path: &Path, full_model: &JointModel) -> Result<SkeletonSequence> {
    let file = fs::File::open(path).map_err(Error::Io)?;
    let id = path.display().to_string();
    let seq = formats::parse_sequence(file, Format::Csv, full_model, &id)
        .map_err(stage("features", &id))?;
    skeleton::restrict_joints(&seq).map_err(stage("features", &id))
}

/// Run every stage up to (and including) windowing.
pub fn prepare(config: &RunConfig) -> Result<PreparedData> {
    let raw = load_inputs(config)?;
    let id = raw.source_id.clone();

    // skeleton_io: joint restriction and corruption flagging.
    let restricted = skeleton::restrict_joints(&raw).map_err(stage("skeleton_io", &id))?;
    let flagged = skeleton::flag_corrupt_frames(&restricted, config.bone_tolerance)
        .map_err(stage("skeleton_io", &id))?;
    let sequence = if config.drop_corrupt && !flagged.is_empty() {
        let keep: Vec<SkeletonFrame> = restricted
            .frames
            .iter()
            .filter(|f| !flagged.contains(&f.index))
            .cloned()
            .collect();
        SkeletonSequence::new(restricted.source_id.clone(), restricted.joint_model.clone(), keep)
            .map_err(stage("skeleton_io", &id))?
    } else {
        restricted
    };

    // keyframes: kinetic energy extrema.
    let energy = keyframes::kinetic_energy(&sequence).map_err(stage("keyframes", &id))?;
    let kf = keyframes::select_keyframes(&energy, config.smoothing_window)
        .map_err(stage("keyframes", &id))?;

    // features: neutral pose, stream statistics, per-keyframe extraction,
    // min-max normalization.
    let neutral = match &config.neutral_frame {
        Some(path) => {
            let seq = load_neutral_override(path, &JointModel::cad60())?;
            seq.frames[0].clone()
        }
        None => sequence
            .frames
            .iter()
            .find(|f| !flagged.contains(&f.index))
            .cloned()
            .ok_or_else(|| Error::Stage {
                stage: "features",
                input: id.clone(),
                source: had_core::Error::EmptyInput("no clean frame for the neutral pose"),
            })?,
    };
    let layout = FeatureLayout::default_for(&sequence.joint_model, neutral)
        .map_err(stage("features", &id))?;
    let kf_frames: Vec<&SkeletonFrame> = kf.indices.iter().map(|&i| &sequence.frames[i]).collect();
    let stats = SequenceStats::fit(&kf_frames).map_err(stage("features", &id))?;
    let mut raw_features = Vec::with_capacity(kf_frames.len());
    for (pos, &frame) in kf_frames.iter().enumerate() {
        let prev = if pos == 0 { frame } else { kf_frames[pos - 1] };
        let v = features::extract_frame_features(frame, prev, &layout, &stats)
            .map_err(stage("features", &id))?;
        raw_features.push(v);
    }
    let normalizer = features::fit_normalizer(&raw_features).map_err(stage("features", &id))?;
    let normalized: Vec<FrameFeatureVector> = raw_features
        .iter()
        .map(|v| features::apply_normalizer(&normalizer, v))
        .collect::<had_core::Result<_>>()
        .map_err(stage("features", &id))?;

    // reduce_sample: PCA and overlapping windows.
    let pca = reduce::fit_pca(&normalized, config.variance_threshold)
        .map_err(stage("reduce_sample", &id))?;
    let reduced: Vec<Vec<f64>> = normalized
        .iter()
        .map(|v| reduce::pca_transform(&pca, v))
        .collect::<had_core::Result<_>>()
        .map_err(stage("reduce_sample", &id))?;
    let labels: Vec<Option<String>> = kf_frames.iter().map(|f| f.label.clone()).collect();
    let windows = reduce::window_samples(&reduced, &labels, config.window_len)
        .map_err(stage("reduce_sample", &id))?;

    let feature_names = layout.feature_names(&sequence.joint_model);
    Ok(PreparedData {
        sequence,
        flagged,
        energy,
        keyframes: kf,
        layout,
        pca,
        windows,
        feature_names,
        features: normalized,
    })
}

/// Cluster the window samples `repeat` times with seeds base, base+1, ... and
/// evaluate each run against the window majority labels.
pub fn run_experiments(config: &RunConfig, data: &PreparedData) -> Result<Vec<RunRecord>> {
    let points: Vec<Vec<f64>> = data.windows.iter().map(|w| w.values.clone()).collect();
    // All three algorithms live in the clustering module; errors carry its name.
    let stage_name: &'static str = "hpgmk";
    let id = &data.sequence.source_id;
    let labeled: Vec<(usize, String)> = data
        .windows
        .iter()
        .enumerate()
        .filter_map(|(i, w)| w.majority_label.clone().map(|l| (i, l)))
        .collect();
    let mut runs = Vec::with_capacity(config.repeat);
    for r in 0..config.repeat {
        let seed = config.seed.wrapping_add(r as u64);
        let params = config.hpgmk_params(seed);
        let result = match config.algorithm {
            Algorithm::Hpgmk => cluster::run_hpgmk(&points, &params),
            Algorithm::Pso => cluster::run_pso(&points, &params),
            Algorithm::Kmeans => cluster::run_kmeans(&points, config.k, seed),
        }
        .map_err(stage(stage_name, id))?;
        let metrics = if labeled.is_empty() {
            None
        } else {
            let pred: Vec<usize> = labeled.iter().map(|&(i, _)| result.assignments[i]).collect();
            let truth: Vec<String> = labeled.iter().map(|(_, l)| l.clone()).collect();
            let (_, mapping) =
                eval::clustering_accuracy(&pred, &truth).map_err(stage("eval", id))?;
            let (_, report) =
                eval::confusion_and_fscores(&pred, &truth, &mapping).map_err(stage("eval", id))?;
            Some(report)
        };
        runs.push(RunRecord { seed, params, result, metrics });
    }
    Ok(runs)
}

/// Full pipeline: prepare, run, aggregate, and write artifacts. Returns the
/// report and the directory it was written to.
pub fn run_pipeline(config: &RunConfig, out_name: &str) -> Result<(ExperimentReport, PathBuf)> {
    let data = prepare(config)?;
    let runs = run_experiments(config, &data)?;
    let agg = aggregate(&runs);
    let purities: Vec<f64> = data
        .windows
        .iter()
        .filter(|w| w.majority_label.is_some())
        .map(|w| w.label_purity)
        .collect();
    let report = ExperimentReport {
        fixture_id: data.sequence.source_id.clone(),
        algorithm: config.algorithm.name().to_string(),
        window_count: data.windows.len(),
        mean_label_purity: (!purities.is_empty())
            .then(|| purities.iter().sum::<f64>() / purities.len() as f64),
        config: config.clone(),
        runs,
        aggregate: agg,
    };

    let out_dir = config.out_dir(out_name);
    write_artifacts(&report, &data, &out_dir)?;
    Ok((report, out_dir))
}

fn write_artifacts(report: &ExperimentReport, data: &PreparedData, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir.join("runs"))?;
    fs::write(out_dir.join("report.json"), report.to_json()?)?;
    for (i, run) in report.runs.iter().enumerate() {
        fs::write(
            out_dir.join("runs").join(format!("run_{i}.json")),
            serde_json::to_string_pretty(run)?,
        )?;
        if let Some(metrics) = &run.metrics {
            let labeled: Vec<(usize, String)> = data
                .windows
                .iter()
                .enumerate()
                .filter_map(|(w, s)| s.majority_label.clone().map(|l| (w, l)))
                .collect();
            let pred: Vec<usize> =
                labeled.iter().map(|&(w, _)| run.result.assignments[w]).collect();
            let truth: Vec<String> = labeled.into_iter().map(|(_, l)| l).collect();
            let (matrix, _) = eval::confusion_and_fscores(&pred, &truth, &metrics.mapping)?;
            fs::write(out_dir.join(format!("confusion_{i}.csv")), matrix.to_csv())?;
        }
    }
    svg::emit_plots(report, out_dir)?;
    if report.config.dump_stages {
        dump_stages(data, out_dir)?;
        for (i, run) in report.runs.iter().enumerate() {
            if !run.result.convergence.is_empty() {
                fs::write(
                    out_dir.join(format!("convergence_{i}.csv")),
                    run.result.convergence_csv(),
                )?;
            }
        }
    }
    Ok(())
}

/// Optional intermediate dumps: energy series, feature matrix, PCA model,
/// and window samples.
fn dump_stages(data: &PreparedData, out_dir: &Path) -> Result<()> {
    let mut energy = String::from("frame_index,energy,is_keyframe\n");
    // Frame 0 precedes the energy series and is always a boundary keyframe.
    let first = &data.sequence.frames[0];
    energy.push_str(&format!("{},,{}\n", first.index, true as u8));
    for (i, &e) in data.energy.values.iter().enumerate() {
        let pos = data.energy.frame_index(i);
        let is_kf = data.keyframes.indices.contains(&pos);
        energy.push_str(&format!("{},{},{}\n", data.sequence.frames[pos].index, e, is_kf as u8));
    }
    fs::write(out_dir.join("energy.csv"), energy)?;

    let mut feats = data.feature_names.join(",");
    feats.push('\n');
    for v in &data.features {
        let row: Vec<String> = v.values.iter().map(|x| x.to_string()).collect();
        feats.push_str(&row.join(","));
        feats.push('\n');
    }
    fs::write(out_dir.join("features.csv"), feats)?;

    fs::write(out_dir.join("pca_model.json"), serde_json::to_string_pretty(&data.pca)?)?;

    let mut samples = String::from("start_keyframe,majority_label,label_purity\n");
    for w in &data.windows {
        samples.push_str(&format!(
            "{},{},{}\n",
            w.start_keyframe,
            w.majority_label.as_deref().unwrap_or(""),
            w.label_purity
        ));
    }
    fs::write(out_dir.join("samples.csv"), samples)?;
    Ok(())
}
