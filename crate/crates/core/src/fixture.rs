//! Deterministic synthetic test data: scripted skeleton streams on the
//! 15-joint model and Gaussian blob point sets for the clustering engine.

use rand::distributions::Distribution;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::skeleton::{JointModel, SkeletonFrame, SkeletonSequence};

/// Base standing pose for the 15-joint CAD-60 layout, meters.
fn standing_pose() -> [Vec3; 15] {
    [
        [0.0, 1.70, 0.0],   // head
        [0.0, 1.55, 0.0],   // neck
        [0.0, 1.25, 0.0],   // torso
        [-0.20, 1.50, 0.0], // left_shoulder
        [-0.25, 1.25, 0.0], // left_elbow
        [0.20, 1.50, 0.0],  // right_shoulder
        [0.25, 1.25, 0.0],  // right_elbow
        [-0.10, 0.95, 0.0], // left_hip
        [-0.12, 0.55, 0.0], // left_knee
        [0.10, 0.95, 0.0],  // right_hip
        [0.12, 0.55, 0.0],  // right_knee
        [-0.28, 1.00, 0.0], // left_hand
        [0.28, 1.00, 0.0],  // right_hand
        [-0.13, 0.08, 0.0], // left_foot
        [0.13, 0.08, 0.0],  // right_foot
    ]
}

const HEAD: usize = 0;
const NECK: usize = 1;
const TORSO: usize = 2;
const L_SHOULDER: usize = 3;
const L_ELBOW: usize = 4;
const R_SHOULDER: usize = 5;
const R_ELBOW: usize = 6;
const L_HIP: usize = 7;
const L_KNEE: usize = 8;
const R_HIP: usize = 9;
const R_KNEE: usize = 10;
const L_HAND: usize = 11;
const R_HAND: usize = 12;
const L_FOOT: usize = 13;
const R_FOOT: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Activity {
    Still,
    Wave,
    Walk,
    SitStand,
}

impl Activity {
    fn parse(name: &str) -> Result<Self> {
        match name {
            "still" => Ok(Activity::Still),
            "wave" => Ok(Activity::Wave),
            "walk" => Ok(Activity::Walk),
            "sitstand" => Ok(Activity::SitStand),
            other => Err(Error::UnknownActivity(other.to_string())),
        }
    }

    fn label(self) -> &'static str {
        match self {
            Activity::Still => "still",
            Activity::Wave => "wave",
            Activity::Walk => "walk",
            Activity::SitStand => "sitstand",
        }
    }
}

/// Per-segment motion parameters, jittered once per segment from the seed so
/// distinct seeds give distinct streams. `still` takes no parameters and
/// always emits identical frames.
#[derive(Debug, Clone)]
struct SegmentParams {
    phase: f64,
    amplitude: f64,
}

/// Pose of one activity at local frame t (30 fps nominal).
///
/// Each active posture pairs a large static component (what separates the
/// activities) with a small localized oscillation (what generates kinetic
/// energy and keyframes).
fn activity_pose(activity: Activity, t: f64, p: &SegmentParams) -> [Vec3; 15] {
    let mut pose = standing_pose();
    let tau = std::f64::consts::TAU;
    match activity {
        Activity::Still => {}
        Activity::Wave => {
            // Left arm held overhead; right hand traces a small circle.
            pose[L_SHOULDER] = [-0.22, 1.58, 0.0];
            pose[L_ELBOW] = [-0.30, 1.85, 0.05];
            pose[L_HAND] = [-0.25, 2.10, 0.10];
            let w = tau / 8.0;
            let s = (w * t + p.phase).sin();
            let c = (w * t + p.phase).cos();
            pose[R_HAND][0] += p.amplitude * 0.04 * s;
            pose[R_HAND][1] += p.amplitude * 0.04 * c;
        }
        Activity::Walk => {
            // Frozen mid-stride stance with a rhythmic swing on top.
            pose[L_FOOT][2] += 0.30;
            pose[L_KNEE][2] += 0.18;
            pose[L_KNEE][1] += 0.06;
            pose[R_FOOT][2] -= 0.25;
            pose[R_KNEE][2] -= 0.15;
            pose[L_HAND][2] -= 0.25;
            pose[R_HAND][2] += 0.25;
            pose[L_ELBOW][2] -= 0.12;
            pose[R_ELBOW][2] += 0.12;
            let w = tau / 8.0;
            let s = (w * t + p.phase).sin();
            let swing = p.amplitude * 0.04;
            pose[L_FOOT][2] += swing * s;
            pose[R_FOOT][2] -= swing * s;
            pose[L_HAND][2] -= 0.8 * swing * s;
            pose[R_HAND][2] += 0.8 * swing * s;
        }
        Activity::SitStand => {
            // Static half squat, arms reaching forward; only the hands and
            // head carry the oscillation.
            let drop = 0.32;
            for j in [
                HEAD, NECK, TORSO, L_SHOULDER, L_ELBOW, R_SHOULDER, R_ELBOW, L_HIP, R_HIP,
                L_HAND, R_HAND,
            ] {
                pose[j][1] -= drop;
            }
            pose[L_KNEE][1] -= 0.5 * drop;
            pose[R_KNEE][1] -= 0.5 * drop;
            pose[L_KNEE][2] += 0.6 * drop;
            pose[R_KNEE][2] += 0.6 * drop;
            pose[L_HAND][2] += 0.45;
            pose[R_HAND][2] += 0.45;
            let w = tau / 10.0;
            let s = (w * t + p.phase).sin();
            pose[L_HAND][2] += p.amplitude * 0.05 * s;
            pose[R_HAND][2] += p.amplitude * 0.05 * s;
            pose[HEAD][1] += p.amplitude * 0.03 * s;
        }
    }
    pose
}

fn lerp_pose(a: &[Vec3; 15], b: &[Vec3; 15], alpha: f64) -> [Vec3; 15] {
    let mut out = *a;
    for (o, (pa, pb)) in out.iter_mut().zip(a.iter().zip(b.iter())) {
        for k in 0..3 {
            o[k] = pa[k] + alpha * (pb[k] - pa[k]);
        }
    }
    out
}

const TRANSITION_FRAMES: usize = 8;

/// Generate a labeled synthetic skeleton stream from an activity script like
/// `"wave:300,walk:300,sitstand:300"`. Segments are joined by short linear
/// transitions labeled with the incoming activity. Output is fully
/// deterministic for a given script and seed.
pub fn generate_fixture(script: &str, seed: u64) -> Result<SkeletonSequence> {
    let mut segments = Vec::new();
    for part in script.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, frames) = part
            .split_once(':')
            .ok_or_else(|| Error::BadScriptSegment(part.to_string()))?;
        let frames: usize = frames
            .trim()
            .parse()
            .map_err(|_| Error::BadScriptSegment(part.to_string()))?;
        if frames == 0 {
            return Err(Error::BadScriptSegment(part.to_string()));
        }
        segments.push((Activity::parse(name.trim())?, frames));
    }
    if segments.is_empty() {
        return Err(Error::EmptyInput("fixture script"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frames: Vec<SkeletonFrame> = Vec::new();
    let mut index = 0usize;
    let mut prev_end: Option<[Vec3; 15]> = None;
    for &(activity, count) in &segments {
        let params = SegmentParams {
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
            amplitude: rng.gen_range(0.9..1.1),
        };
        let start_pose = activity_pose(activity, 0.0, &params);
        if let Some(prev) = prev_end {
            for t in 1..=TRANSITION_FRAMES {
                let alpha = t as f64 / (TRANSITION_FRAMES + 1) as f64;
                let pose = lerp_pose(&prev, &start_pose, alpha);
                frames.push(SkeletonFrame {
                    index,
                    joints: pose.to_vec(),
                    label: Some(activity.label().to_string()),
                });
                index += 1;
            }
        }
        let mut last = start_pose;
        for t in 0..count {
            last = activity_pose(activity, t as f64, &params);
            frames.push(SkeletonFrame {
                index,
                joints: last.to_vec(),
                label: Some(activity.label().to_string()),
            });
            index += 1;
        }
        prev_end = Some(last);
    }
    SkeletonSequence::new(format!("fixture:{script}:{seed}"), JointModel::cad60(), frames)
}

/// Gaussian blobs around the given centers; returns points and the blob id of
/// each point.
pub fn gaussian_blobs(
    centers: &[Vec<f64>],
    per_blob: usize,
    sigma: f64,
    seed: u64,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut points = Vec::with_capacity(centers.len() * per_blob);
    let mut truth = Vec::with_capacity(centers.len() * per_blob);
    for (ci, c) in centers.iter().enumerate() {
        for _ in 0..per_blob {
            let p: Vec<f64> = c
                .iter()
                .map(|&x| {
                    let g: f64 = normal.sample(&mut rng);
                    x + sigma * g
                })
                .collect();
            points.push(p);
            truth.push(ci);
        }
    }
    (points, truth)
}

/// The 4-blob benchmark set: 200 points, sigma 0.05, unit-square corners.
pub fn four_corner_blobs(seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let centers = vec![
        vec![0.0, 0.0],
        vec![0.0, 1.0],
        vec![1.0, 0.0],
        vec![1.0, 1.0],
    ];
    gaussian_blobs(&centers, 50, 0.05, seed)
}
