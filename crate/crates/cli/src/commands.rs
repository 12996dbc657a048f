use std::ffi::OsString;
use std::path::{Path, PathBuf};

use gtdist::cluster::ClusterConfig;
use gtdist::config::KeyValues;
use gtdist::estimation::infer_volume;
use gtdist::gt::{model_ground_truth_volume, GtConfig};
use gtdist::io::{self, ModesDocument, PixelModes};
use gtdist::metrics::{end_point_error, outlier_rate, MetricThreshold};
use gtdist::modes::{separate_modes, SeparationConfig};
use gtdist::synth::{block_match, gen_scene, perturb_ensemble, PerturbSpec, SceneSpec};
use gtdist::volume::{DisparityMap, EnsembleVolumes, ProbabilityVolume};
use gtdist::{map_indexed, Estimator, GtError, Result};

use crate::{Command, EvalArgs, InferArgs, MatchArgs, ModelGtArgs, SeparateArgs, SynthArgs};

// Files hold f32 samples, so the CLI computes at that precision too.
type S = f32;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::ModelGt(a) => model_gt(a),
        Command::Separate(a) => separate(a),
        Command::Infer(a) => infer(a),
        Command::Eval(a) => eval(a),
        Command::Synth(a) => synth(a),
        Command::Match(a) => block_match_cmd(a),
    }
}

/// Path of the validity mask written next to a model-gt output.
pub fn mask_path(out: &Path) -> PathBuf {
    let mut s = OsString::from(out.as_os_str());
    s.push(".mask.pfm");
    PathBuf::from(s)
}

struct ModelGtSettings {
    cfg: GtConfig<S>,
    workers: Option<usize>,
}

fn model_gt_settings(a: &ModelGtArgs) -> Result<ModelGtSettings> {
    let mut kv = match &a.config {
        Some(path) => KeyValues::load(path)?,
        None => KeyValues::default(),
    };
    let overrides: [(&str, Option<String>); 7] = [
        ("eps", a.eps.map(|v| v.to_string())),
        ("min_pts", a.min_pts.map(|v| v.to_string())),
        ("epsilon", a.epsilon.map(|v| v.to_string())),
        ("sigma", a.sigma.map(|v| v.to_string())),
        ("label_w", a.label_w.map(|v| v.to_string())),
        ("label_b", a.label_b.map(|v| v.to_string())),
        ("workers", a.workers.map(|v| v.to_string())),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            kv.set(key, v);
        }
    }
    if a.keep_noise {
        kv.set("keep_noise", true);
    }
    if a.ensemble_only {
        kv.set("ensemble_only", true);
    }

    let d = GtConfig::<S>::default();
    let cfg = GtConfig {
        separation: SeparationConfig::new(
            kv.take_or("epsilon", d.separation.epsilon)?,
            kv.take_or("sigma", d.separation.sigma)?,
        )?,
        cluster: ClusterConfig::new(kv.take_or("eps", d.cluster.eps)?, kv.take_or("min_pts", d.cluster.min_pts)?)?,
        label_w: kv.take_or("label_w", d.label_w)?,
        label_b: kv.take_or("label_b", d.label_b)?,
        keep_noise: kv.take_or("keep_noise", d.keep_noise)?,
        ensemble_only: kv.take_or("ensemble_only", d.ensemble_only)?,
    };
    let workers = kv.take("workers")?;
    kv.finish()?;
    cfg.validate()?;
    Ok(ModelGtSettings { cfg, workers })
}

fn model_gt(a: ModelGtArgs) -> Result<()> {
    let ModelGtSettings { cfg, workers } = model_gt_settings(&a)?;
    let parts = a
        .ensemble
        .iter()
        .map(io::read_volume::<S>)
        .collect::<Result<Vec<_>>>()?;
    let ensemble = EnsembleVolumes::concat(parts)?;
    let labels = io::read_pfm::<S>(&a.labels)?;

    let gt = model_ground_truth_volume(&ensemble, &labels, &cfg, workers)?;
    let (h, w, d) = (gt.volume.height(), gt.volume.width(), gt.volume.disparities());

    if let Some(path) = &a.modes_json {
        let pixels = gt
            .mixtures
            .iter()
            .enumerate()
            .filter_map(|(i, mix)| {
                mix.as_ref().map(|m| PixelModes {
                    y: i / w,
                    x: i % w,
                    noise_count: m.noise_count,
                    label_cluster: m.label_cluster_index,
                    modes: m.modes.clone(),
                })
            })
            .collect();
        io::write_modes_json(path, &ModesDocument { height: h, width: w, disparities: d, pixels })?;
    }

    let mask_values = gt.mask.iter().map(|&v| if v { 1.0 } else { 0.0 }).collect();
    let mask = DisparityMap::<S>::new(h, w, mask_values)?;
    io::write_volume(&a.out, &EnsembleVolumes::new(vec![gt.volume])?)?;
    io::write_pfm(mask_path(&a.out), &mask)?;
    Ok(())
}

fn single_member(path: &Path) -> Result<ProbabilityVolume<S>> {
    let ensemble = io::read_volume::<S>(path)?;
    if ensemble.len() != 1 {
        return Err(GtError::Data(format!(
            "{} holds {} members; this command takes a single-member volume",
            path.display(),
            ensemble.len()
        )));
    }
    Ok(ensemble.into_members().remove(0))
}

fn separate(a: SeparateArgs) -> Result<()> {
    let cfg = SeparationConfig::new(a.epsilon, a.sigma)?;
    let vol = single_member(&a.volume)?;
    let w = vol.width();
    let pixels = map_indexed(vol.pixel_count(), a.workers, |i| PixelModes {
        y: i / w,
        x: i % w,
        noise_count: 0,
        label_cluster: None,
        modes: vol.distribution_at(i).map(|p| separate_modes(&p, &cfg)).unwrap_or_default(),
    })?;
    let doc = ModesDocument {
        height: vol.height(),
        width: w,
        disparities: vol.disparities(),
        pixels,
    };
    io::write_modes_json(&a.out, &doc)
}

fn infer(a: InferArgs) -> Result<()> {
    let estimator: Estimator = a.estimator.parse()?;
    let cfg = SeparationConfig::new(a.epsilon, a.sigma)?;
    let vol = single_member(&a.volume)?;
    let map = infer_volume(&vol, estimator, &cfg, a.workers)?;
    io::write_pfm(&a.out, &map)
}

fn eval(a: EvalArgs) -> Result<()> {
    let threshold = MetricThreshold::new(a.threshold)?;
    let pred = io::read_pfm::<f64>(&a.pred)?;
    let gt = io::read_pfm::<f64>(&a.gt)?;
    let rate = outlier_rate(&pred, &gt, threshold)?;
    let epe = if a.epe { Some(end_point_error(&pred, &gt)?) } else { None };
    println!("outliers_gt_{}px={rate:.4}", a.threshold);
    if let Some(e) = epe {
        println!("epe={e:.4}");
    }
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    let mut kv = KeyValues::load(&a.spec)?;
    let scene_spec = SceneSpec::from_config(&mut kv)?;
    let perturb_spec = PerturbSpec::from_config(&mut kv)?;
    kv.finish()?;

    let scene = gen_scene::<S>(&scene_spec)?;
    io::write_pfm(&a.out_labels, &scene.labels)?;
    let ensemble = perturb_ensemble(&scene, &perturb_spec)?.ensemble;
    io::write_volume(&a.out_truth, &EnsembleVolumes::new(vec![scene.truth])?)?;
    io::write_volume(&a.out_ensemble, &ensemble)
}

fn block_match_cmd(a: MatchArgs) -> Result<()> {
    let left = io::read_pgm::<S>(&a.left)?;
    let right = io::read_pgm::<S>(&a.right)?;
    let vol = block_match(&left, &right, a.dmax, a.window, a.tau)?;
    io::write_volume(&a.out, &EnsembleVolumes::new(vec![vol])?)
}
