//! Kinetic-energy keyframe selection over an unsegmented stream.
//!
//! The energy of frame i is half the sum over informative joints of the
//! squared displacement from frame i-1. Frames at local energy extrema are
//! keyframes; stream boundaries are always kept.

use crate::error::{Error, Result};
use crate::geom;
use crate::skeleton::SkeletonSequence;

/// Per-frame kinetic energy. `values[i]` belongs to frame `i + 1` of the
/// source sequence; frame 0 has no predecessor and no energy.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySeries {
    pub values: Vec<f64>,
}

impl EnergySeries {
    pub const FRAME_OFFSET: usize = 1;

    /// Frame index of `values[i]` in the source sequence.
    pub fn frame_index(&self, i: usize) -> usize {
        i + Self::FRAME_OFFSET
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Strictly increasing frame indices selected as keyframes.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyframeSet {
    pub indices: Vec<usize>,
}

/// Kinetic energy of each frame after the first, summed over the informative
/// joints of the sequence's model.
pub fn kinetic_energy(seq: &SkeletonSequence) -> Result<EnergySeries> {
    if seq.len() < 2 {
        return Err(Error::TooFewFrames { needed: 2, found: seq.len() });
    }
    let joints = &seq.joint_model.informative;
    let values = seq
        .frames
        .windows(2)
        .map(|w| {
            0.5 * joints
                .iter()
                .map(|&j| {
                    let d = geom::sub(w[1].joints[j], w[0].joints[j]);
                    geom::dot(d, d)
                })
                .sum::<f64>()
        })
        .collect();
    Ok(EnergySeries { values })
}

/// Select keyframes: local maxima and minima of the (optionally smoothed)
/// energy series, plus the first and last frames of the sequence.
///
/// Extrema use strict comparison against the immediate neighbors. A run of
/// equal smoothed values contributes its first frame when the run as a whole
/// is an extremum, and nothing otherwise.
pub fn select_keyframes(energy: &EnergySeries, smoothing_window: usize) -> Result<KeyframeSet> {
    if energy.is_empty() {
        return Err(Error::EmptyInput("energy series"));
    }
    if smoothing_window == 0 || smoothing_window.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!(
            "smoothing window must be a positive odd integer, got {smoothing_window}"
        )));
    }
    let smoothed = moving_average(&energy.values, smoothing_window);
    let n = smoothed.len();
    let last_frame = energy.frame_index(n - 1);

    let mut indices = vec![0];
    let mut run_start = 0;
    for i in 1..=n {
        if i < n && smoothed[i] == smoothed[run_start] {
            continue;
        }
        // Run [run_start, i) of equal values ended.
        let run_end = i - 1;
        if run_start > 0 && run_end < n - 1 {
            let before = smoothed[run_start - 1];
            let after = smoothed[run_end + 1];
            let here = smoothed[run_start];
            if (here > before && here > after) || (here < before && here < after) {
                indices.push(energy.frame_index(run_start));
            }
        }
        run_start = i;
    }
    if *indices.last().unwrap() != last_frame {
        indices.push(last_frame);
    }
    Ok(KeyframeSet { indices })
}

/// Centered moving average with edge truncation; window 1 is the identity.
fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    if window == 1 {
        return values.to_vec();
    }
    let half = window / 2;
    let n = values.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            values[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}
