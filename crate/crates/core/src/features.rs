//! Per-keyframe feature extraction: spatial and temporal joint displacement,
//! statistical position offsets, and bone orientation/angle features, plus
//! min-max normalization of the assembled vectors.

use crate::error::{Error, Result};
use crate::geom::{self, Vec3};
use crate::skeleton::{JointModel, SkeletonFrame};

/// Which joints and bones feed each feature family, plus the neutral
/// reference posture for absolute temporal displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureLayout {
    /// Pairs measured by within-frame Euclidean distance.
    pub spatial_pairs: Vec<(usize, usize)>,
    /// Joints measured against the previous keyframe and the neutral pose,
    /// and against the stream mean/std.
    pub temporal_joints: Vec<usize>,
    /// Adjacent-bone pairs for rotation and angle features; the two bones of
    /// a pair share a joint.
    pub angle_bone_pairs: Vec<((usize, usize), (usize, usize))>,
    pub neutral_frame: SkeletonFrame,
}

impl FeatureLayout {
    /// Default layout for the restricted CAD-60 model (13 kept joints):
    /// the five paper pairs for spatial distances, the twelve limb joints for
    /// temporal and statistical features, and eight adjacent bone pairs (the
    /// four limb junctions plus the four girdle junctions) for orientation.
    pub fn default_for(model: &JointModel, neutral_frame: SkeletonFrame) -> Result<Self> {
        let j = |name: &str| {
            model
                .joint_index(name)
                .ok_or_else(|| Error::InvalidParams(format!("joint {name:?} missing from model")))
        };
        let head = j("head")?;
        let (sh_l, sh_r) = (j("left_shoulder")?, j("right_shoulder")?);
        let (el_l, el_r) = (j("left_elbow")?, j("right_elbow")?);
        let (ha_l, ha_r) = (j("left_hand")?, j("right_hand")?);
        let (hi_l, hi_r) = (j("left_hip")?, j("right_hip")?);
        let (kn_l, kn_r) = (j("left_knee")?, j("right_knee")?);
        let (fo_l, fo_r) = (j("left_foot")?, j("right_foot")?);

        let spatial_pairs = vec![
            (ha_l, ha_r),
            (ha_l, head),
            (ha_r, head),
            (hi_l, fo_l),
            (hi_r, fo_r),
        ];
        let temporal_joints = vec![
            sh_l, el_l, sh_r, el_r, hi_l, kn_l, hi_r, kn_r, ha_l, ha_r, fo_l, fo_r,
        ];
        let angle_bone_pairs = vec![
            ((sh_l, el_l), (el_l, ha_l)),
            ((sh_r, el_r), (el_r, ha_r)),
            ((hi_l, kn_l), (kn_l, fo_l)),
            ((hi_r, kn_r), (kn_r, fo_r)),
            ((sh_l, sh_r), (sh_l, el_l)),
            ((sh_r, sh_l), (sh_r, el_r)),
            ((hi_l, hi_r), (hi_l, kn_l)),
            ((hi_r, hi_l), (hi_r, kn_r)),
        ];
        let layout = Self { spatial_pairs, temporal_joints, angle_bone_pairs, neutral_frame };
        layout.validate(model)?;
        Ok(layout)
    }

    pub fn validate(&self, model: &JointModel) -> Result<()> {
        let n = model.joint_count;
        let check = |j: usize| {
            (j < n).then_some(()).ok_or_else(|| {
                Error::InvalidParams(format!("layout joint {j} exceeds joint count {n}"))
            })
        };
        for &(a, b) in &self.spatial_pairs {
            check(a)?;
            check(b)?;
        }
        for &j in &self.temporal_joints {
            check(j)?;
        }
        for &((a, b), (c, d)) in &self.angle_bone_pairs {
            for j in [a, b, c, d] {
                check(j)?;
            }
            if a != c && a != d && b != c && b != d {
                return Err(Error::InvalidParams(format!(
                    "bones ({a},{b}) and ({c},{d}) share no joint"
                )));
            }
        }
        if self.neutral_frame.joints.len() != n {
            return Err(Error::JointCountMismatch {
                line: 0,
                expected: n,
                found: self.neutral_frame.joints.len(),
            });
        }
        Ok(())
    }

    /// Output length of [`extract_frame_features`] under this layout.
    pub fn feature_len(&self) -> usize {
        self.spatial_pairs.len()
            + 6 * self.temporal_joints.len()
            + 6 * self.temporal_joints.len()
            + 3 * self.angle_bone_pairs.len()
            + self.angle_bone_pairs.len()
    }

    /// Column names for CSV export, in extraction order.
    pub fn feature_names(&self, model: &JointModel) -> Vec<String> {
        let name = |j: usize| model.joint_names[j].clone();
        let mut out = Vec::with_capacity(self.feature_len());
        for &(a, b) in &self.spatial_pairs {
            out.push(format!("spat_{}_{}", name(a), name(b)));
        }
        for &j in &self.temporal_joints {
            for axis in ["x", "y", "z"] {
                out.push(format!("dprev_{axis}_{}", name(j)));
            }
            for axis in ["x", "y", "z"] {
                out.push(format!("dneutral_{axis}_{}", name(j)));
            }
        }
        for &j in &self.temporal_joints {
            for axis in ["x", "y", "z"] {
                out.push(format!("dmean_{axis}_{}", name(j)));
            }
            for axis in ["x", "y", "z"] {
                out.push(format!("dstd_{axis}_{}", name(j)));
            }
        }
        for &((a, b), (c, d)) in &self.angle_bone_pairs {
            let shared = if a == c || a == d { a } else { b };
            for axis in ["x", "y", "z"] {
                out.push(format!("rot_{axis}_{}", name(shared)));
            }
        }
        for &((a, b), (c, d)) in &self.angle_bone_pairs {
            let shared = if a == c || a == d { a } else { b };
            out.push(format!("ang_{}", name(shared)));
        }
        out
    }

    /// Stable fingerprint binding feature vectors to the layout that
    /// produced them (FNV-1a over the layout contents).
    pub fn tag(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |v: u64| {
            for byte in v.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x100_0000_01b3);
            }
        };
        for &(a, b) in &self.spatial_pairs {
            eat(a as u64);
            eat(b as u64);
        }
        eat(u64::MAX);
        for &j in &self.temporal_joints {
            eat(j as u64);
        }
        eat(u64::MAX);
        for &((a, b), (c, d)) in &self.angle_bone_pairs {
            eat(a as u64);
            eat(b as u64);
            eat(c as u64);
            eat(d as u64);
        }
        eat(u64::MAX);
        for c in self.neutral_frame.joints.iter().flatten() {
            eat(c.to_bits());
        }
        h
    }
}

/// One keyframe's assembled feature values.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameFeatureVector {
    pub values: Vec<f64>,
    pub layout_tag: u64,
}

/// Per-joint mean and per-coordinate standard deviation over the keyframes
/// of a stream (population form, divisor N).
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceStats {
    pub mean: Vec<Vec3>,
    pub std: Vec<Vec3>,
    pub frame_count: usize,
}

impl SequenceStats {
    /// Fit over exactly the given keyframes.
    pub fn fit(keyframes: &[&SkeletonFrame]) -> Result<Self> {
        let n = keyframes.len();
        if n == 0 {
            return Err(Error::EmptyInput("keyframes"));
        }
        let joint_count = keyframes[0].joints.len();
        let mut mean = vec![[0.0; 3]; joint_count];
        for f in keyframes {
            for (j, p) in f.joints.iter().enumerate() {
                for (m, x) in mean[j].iter_mut().zip(p) {
                    *m += x;
                }
            }
        }
        for m in mean.iter_mut().flatten() {
            *m /= n as f64;
        }
        let mut std = vec![[0.0; 3]; joint_count];
        for f in keyframes {
            for (j, p) in f.joints.iter().enumerate() {
                for ((s, x), m) in std[j].iter_mut().zip(p).zip(&mean[j]) {
                    let d = x - m;
                    *s += d * d;
                }
            }
        }
        for s in std.iter_mut().flatten() {
            *s = (*s / n as f64).sqrt();
        }
        Ok(Self { mean, std, frame_count: n })
    }
}

/// Within-frame Euclidean distances for the given joint pairs.
pub fn spatial_displacement(frame: &SkeletonFrame, pairs: &[(usize, usize)]) -> Vec<f64> {
    pairs
        .iter()
        .map(|&(a, b)| geom::distance(frame.joints[a], frame.joints[b]))
        .collect()
}

/// Componentwise displacement of each joint from the previous keyframe and
/// from the neutral pose: six values per joint.
pub fn temporal_displacement(
    curr: &SkeletonFrame,
    prev: &SkeletonFrame,
    neutral: &SkeletonFrame,
    joints: &[usize],
) -> Vec<f64> {
    let mut out = Vec::with_capacity(6 * joints.len());
    for &j in joints {
        let dp = geom::sub(curr.joints[j], prev.joints[j]);
        let dn = geom::sub(curr.joints[j], neutral.joints[j]);
        out.extend_from_slice(&dp);
        out.extend_from_slice(&dn);
    }
    out
}

/// Componentwise offset of each joint from the stream mean and from the
/// per-coordinate standard deviation: six values per joint.
pub fn statistical_features(
    curr: &SkeletonFrame,
    stats: &SequenceStats,
    joints: &[usize],
) -> Vec<f64> {
    let mut out = Vec::with_capacity(6 * joints.len());
    for &j in joints {
        let dm = geom::sub(curr.joints[j], stats.mean[j]);
        let ds = geom::sub(curr.joints[j], stats.std[j]);
        out.extend_from_slice(&dm);
        out.extend_from_slice(&ds);
    }
    out
}

/// Bone vector `P_i - P_j` for the (i, j) joint pair.
pub fn bone_vector(frame: &SkeletonFrame, bone: (usize, usize)) -> Vec3 {
    geom::sub(frame.joints[bone.0], frame.joints[bone.1])
}

/// Angle between two bones in degrees, in [180, 360]: parallel bones give
/// 180, perpendicular 270, antiparallel 360.
pub fn bone_angle(a: Vec3, b: Vec3) -> Result<f64> {
    if geom::dot(a, a) == 0.0 || geom::dot(b, b) == 0.0 {
        return Err(Error::ZeroLengthBone);
    }
    let theta = geom::norm(geom::cross(a, b)).atan2(geom::dot(a, b));
    Ok(180.0 * theta / std::f64::consts::PI + 180.0)
}

/// Intrinsic XYZ Euler angles, in degrees, of the minimal rotation aligning
/// unit(a) with unit(b). Parallel bones give (0, 0, 0).
pub fn bone_rotation_angles(a: Vec3, b: Vec3) -> Result<(f64, f64, f64)> {
    let r = geom::rotation_between(a, b)?;
    let (alpha, beta, gamma) = geom::euler_xyz(&r);
    Ok((alpha.to_degrees(), beta.to_degrees(), gamma.to_degrees()))
}

/// Assemble the per-keyframe feature vector: spatial distances, temporal
/// displacements, statistical offsets, rotation angles, bone angles — in
/// that fixed order.
pub fn extract_frame_features(
    curr: &SkeletonFrame,
    prev: &SkeletonFrame,
    layout: &FeatureLayout,
    stats: &SequenceStats,
) -> Result<FrameFeatureVector> {
    let mut values = Vec::with_capacity(layout.feature_len());
    values.extend(spatial_displacement(curr, &layout.spatial_pairs));
    values.extend(temporal_displacement(curr, prev, &layout.neutral_frame, &layout.temporal_joints));
    values.extend(statistical_features(curr, stats, &layout.temporal_joints));
    let mut angles = Vec::with_capacity(layout.angle_bone_pairs.len());
    for &(bone_a, bone_b) in &layout.angle_bone_pairs {
        let a = bone_vector(curr, bone_a);
        let b = bone_vector(curr, bone_b);
        let (alpha, beta, gamma) = bone_rotation_angles(a, b)?;
        values.push(alpha);
        values.push(beta);
        values.push(gamma);
        angles.push(bone_angle(a, b)?);
    }
    values.extend(angles);
    Ok(FrameFeatureVector { values, layout_tag: layout.tag() })
}

/// Per-dimension min-max scaling fitted on a feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

/// Fit min-max bounds per dimension over the given vectors.
pub fn fit_normalizer(vectors: &[FrameFeatureVector]) -> Result<Normalizer> {
    if vectors.is_empty() {
        return Err(Error::EmptyInput("feature vectors"));
    }
    if vectors.len() < 2 {
        return Err(Error::InvalidParams(
            "normalizer needs at least 2 vectors to fit a range".into(),
        ));
    }
    let dim = vectors[0].values.len();
    let mut min = vec![f64::INFINITY; dim];
    let mut max = vec![f64::NEG_INFINITY; dim];
    for v in vectors {
        if v.values.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.values.len() });
        }
        for (d, &x) in v.values.iter().enumerate() {
            min[d] = min[d].min(x);
            max[d] = max[d].max(x);
        }
    }
    Ok(Normalizer { min, max })
}

/// Scale each dimension into [0, 1]; dimensions that were constant during
/// fitting map to 0.
pub fn apply_normalizer(n: &Normalizer, v: &FrameFeatureVector) -> Result<FrameFeatureVector> {
    if v.values.len() != n.min.len() {
        return Err(Error::DimensionMismatch { expected: n.min.len(), found: v.values.len() });
    }
    let values = v
        .values
        .iter()
        .enumerate()
        .map(|(d, &x)| {
            let span = n.max[d] - n.min[d];
            if span == 0.0 {
                0.0
            } else {
                (x - n.min[d]) / span
            }
        })
        .collect();
    Ok(FrameFeatureVector { values, layout_tag: v.layout_tag })
}
