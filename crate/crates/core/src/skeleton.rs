//! In-memory skeleton sequence model: joint layout, frames, joint restriction,
//! and corrupt-frame flagging.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, Vec3};

/// Joint layout shared by every frame of a sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointModel {
    pub joint_count: usize,
    pub joint_names: Vec<String>,
    /// Bones as (parent, child) joint index pairs.
    pub adjacency: Vec<(usize, usize)>,
    /// Joints kept by [`restrict_joints`], ascending.
    #[serde(rename = "informative_set")]
    pub informative: Vec<usize>,
}

impl JointModel {
    pub fn new(
        joint_names: Vec<String>,
        adjacency: Vec<(usize, usize)>,
        informative: Vec<usize>,
    ) -> Result<Self> {
        let joint_count = joint_names.len();
        if joint_count == 0 {
            return Err(Error::InvalidJointModel("no joints".into()));
        }
        for &(a, b) in &adjacency {
            if a >= joint_count || b >= joint_count {
                return Err(Error::InvalidJointModel(format!(
                    "bone ({a}, {b}) exceeds joint count {joint_count}"
                )));
            }
        }
        if informative.is_empty() {
            return Err(Error::EmptyInformativeSet);
        }
        let mut seen = vec![false; joint_count];
        for &j in &informative {
            if j >= joint_count {
                return Err(Error::InvalidJointModel(format!(
                    "informative joint {j} exceeds joint count {joint_count}"
                )));
            }
            if seen[j] {
                return Err(Error::InvalidJointModel(format!(
                    "informative joint {j} listed twice"
                )));
            }
            seen[j] = true;
        }
        Ok(Self { joint_count, joint_names, adjacency, informative })
    }

    /// The 15-joint CAD-60 layout. Kept joints are the limb joints named in
    /// the feature design (hands, feet, hips, shoulders, elbows, knees) plus
    /// the head, which the spatial hand-head distances need.
    pub fn cad60() -> Self {
        let names = [
            "head",
            "neck",
            "torso",
            "left_shoulder",
            "left_elbow",
            "right_shoulder",
            "right_elbow",
            "left_hip",
            "left_knee",
            "right_hip",
            "right_knee",
            "left_hand",
            "right_hand",
            "left_foot",
            "right_foot",
        ];
        let adjacency = vec![
            (0, 1),  // head-neck
            (1, 2),  // neck-torso
            (1, 3),  // neck-left_shoulder
            (1, 5),  // neck-right_shoulder
            (3, 4),  // left_shoulder-left_elbow
            (5, 6),  // right_shoulder-right_elbow
            (4, 11), // left_elbow-left_hand
            (6, 12), // right_elbow-right_hand
            (2, 7),  // torso-left_hip
            (2, 9),  // torso-right_hip
            (7, 8),  // left_hip-left_knee
            (9, 10), // right_hip-right_knee
            (8, 13), // left_knee-left_foot
            (10, 14),// right_knee-right_foot
        ];
        let informative = vec![0, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14];
        Self::new(names.iter().map(|s| s.to_string()).collect(), adjacency, informative)
            .expect("built-in model is valid")
    }

    pub fn joint_index(&self, name: &str) -> Option<usize> {
        self.joint_names.iter().position(|n| n == name)
    }
}

/// One skeleton posture: 3D joint positions plus an optional ground-truth label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonFrame {
    pub index: usize,
    pub joints: Vec<Vec3>,
    pub label: Option<String>,
}

impl SkeletonFrame {
    pub fn is_finite(&self) -> bool {
        self.joints.iter().flatten().all(|c| c.is_finite())
    }
}

/// An ordered stream of frames over one joint model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonSequence {
    pub source_id: String,
    pub joint_model: JointModel,
    pub frames: Vec<SkeletonFrame>,
}

impl SkeletonSequence {
    pub fn new(source_id: String, joint_model: JointModel, frames: Vec<SkeletonFrame>) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::EmptyStream);
        }
        let mut prev: Option<usize> = None;
        for (n, f) in frames.iter().enumerate() {
            if f.joints.len() != joint_model.joint_count {
                return Err(Error::JointCountMismatch {
                    line: n + 1,
                    expected: joint_model.joint_count,
                    found: f.joints.len(),
                });
            }
            if let Some(p) = prev {
                if f.index <= p {
                    return Err(Error::MalformedRecord {
                        line: n + 1,
                        column: 1,
                        message: format!("frame index {} not greater than previous {}", f.index, p),
                    });
                }
            }
            prev = Some(f.index);
        }
        Ok(Self { source_id, joint_model, frames })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Project a sequence down to its informative joints.
///
/// Joints keep the joint-model order; bones with both endpoints informative are
/// remapped onto the surviving indices. The restricted model marks every joint
/// informative, so the operation is idempotent.
pub fn restrict_joints(seq: &SkeletonSequence) -> Result<SkeletonSequence> {
    let model = &seq.joint_model;
    if model.informative.is_empty() {
        return Err(Error::EmptyInformativeSet);
    }
    let mut keep = model.informative.clone();
    keep.sort_unstable();
    let mut new_index = vec![usize::MAX; model.joint_count];
    for (new, &old) in keep.iter().enumerate() {
        new_index[old] = new;
    }
    let adjacency = model
        .adjacency
        .iter()
        .filter_map(|&(a, b)| {
            let (na, nb) = (new_index[a], new_index[b]);
            (na != usize::MAX && nb != usize::MAX).then_some((na, nb))
        })
        .collect();
    let joint_names = keep.iter().map(|&j| model.joint_names[j].clone()).collect();
    let restricted_model = JointModel::new(joint_names, adjacency, (0..keep.len()).collect())?;
    let frames = seq
        .frames
        .iter()
        .map(|f| SkeletonFrame {
            index: f.index,
            joints: keep.iter().map(|&j| f.joints[j]).collect(),
            label: f.label.clone(),
        })
        .collect();
    SkeletonSequence::new(seq.source_id.clone(), restricted_model, frames)
}

/// Indices of frames that are structurally implausible: any non-finite
/// coordinate, or any bone whose length deviates from that bone's
/// sequence-median length by more than `tolerance` as a ratio of the median.
pub fn flag_corrupt_frames(seq: &SkeletonSequence, bone_length_tolerance: f64) -> Result<Vec<usize>> {
    if bone_length_tolerance <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "bone length tolerance must be > 0, got {bone_length_tolerance}"
        )));
    }
    let bones = &seq.joint_model.adjacency;
    let mut medians = Vec::with_capacity(bones.len());
    for &(a, b) in bones {
        let mut lengths: Vec<f64> = seq
            .frames
            .iter()
            .map(|f| geom::distance(f.joints[a], f.joints[b]))
            .filter(|l| l.is_finite())
            .collect();
        lengths.sort_by(|x, y| x.total_cmp(y));
        medians.push(median_of_sorted(&lengths));
    }
    let mut flagged = Vec::new();
    for f in &seq.frames {
        let mut bad = !f.is_finite();
        if !bad {
            for (bi, &(a, b)) in bones.iter().enumerate() {
                let Some(m) = medians[bi] else { continue };
                if m == 0.0 {
                    continue;
                }
                let len = geom::distance(f.joints[a], f.joints[b]);
                if !len.is_finite() || (len - m).abs() / m > bone_length_tolerance {
                    bad = true;
                    break;
                }
            }
        }
        if bad {
            flagged.push(f.index);
        }
    }
    Ok(flagged)
}

fn median_of_sorted(sorted: &[f64]) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let n = sorted.len();
    Some(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    })
}
