//! Dimensionality reduction and sampling: PCA over frame feature vectors and
//! overlapping fixed-length window samples over the reduced keyframe stream.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FrameFeatureVector;

/// Fitted PCA basis: column means, retained orthonormal components (rows),
/// and their explained-variance ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    pub components: Vec<Vec<f64>>,
    pub explained_variance_ratio: Vec<f64>,
    pub retained: usize,
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }
}

/// Fit PCA on the rows of `matrix` and retain the minimal prefix of
/// components whose cumulative explained variance reaches `variance_threshold`.
///
/// The principal axes come from a Jacobi eigendecomposition of the sample
/// covariance matrix. Each component's largest-magnitude entry is made
/// positive so outputs are deterministic.
#[allow(clippy::needless_range_loop)]
pub fn fit_pca(matrix: &[FrameFeatureVector], variance_threshold: f64) -> Result<PcaModel> {
    if matrix.len() < 2 {
        return Err(Error::InvalidParams(format!(
            "PCA needs at least 2 rows, got {}",
            matrix.len()
        )));
    }
    if !(variance_threshold > 0.0 && variance_threshold <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "variance threshold must be in (0, 1], got {variance_threshold}"
        )));
    }
    let n = matrix.len();
    let dim = matrix[0].values.len();
    for row in matrix {
        if row.values.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: row.values.len() });
        }
    }
    let mut mean = vec![0.0; dim];
    for row in matrix {
        for (d, &x) in row.values.iter().enumerate() {
            mean[d] += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    // Sample covariance, divisor n - 1.
    let mut cov = vec![vec![0.0; dim]; dim];
    for row in matrix {
        let centered: Vec<f64> = row.values.iter().zip(&mean).map(|(x, m)| x - m).collect();
        for i in 0..dim {
            if centered[i] == 0.0 {
                continue;
            }
            for j in i..dim {
                cov[i][j] += centered[i] * centered[j];
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            cov[i][j] /= (n - 1) as f64;
            cov[j][i] = cov[i][j];
        }
    }

    let (mut eigvals, eigvecs) = jacobi_eigen(cov);
    for v in &mut eigvals {
        if *v < 0.0 {
            *v = 0.0; // rounding noise on a PSD matrix
        }
    }
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eigvals[b].total_cmp(&eigvals[a]).then(a.cmp(&b)));

    let total: f64 = order.iter().map(|&i| eigvals[i]).sum();
    if total == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let rank = order.iter().take_while(|&&i| eigvals[i] > 0.0).count();
    let mut retained = rank;
    let mut cum = 0.0;
    for (pos, &i) in order.iter().take(rank).enumerate() {
        cum += eigvals[i];
        if cum >= variance_threshold * total {
            retained = pos + 1;
            break;
        }
    }

    let mut components = Vec::with_capacity(retained);
    let mut ratios = Vec::with_capacity(retained);
    for &i in order.iter().take(retained) {
        let mut comp: Vec<f64> = (0..dim).map(|r| eigvecs[r][i]).collect();
        let lead = comp
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
            .map(|(_, &v)| v)
            .unwrap_or(0.0);
        if lead < 0.0 {
            for c in &mut comp {
                *c = -*c;
            }
        }
        components.push(comp);
        ratios.push(eigvals[i] / total);
    }
    Ok(PcaModel { mean, components, explained_variance_ratio: ratios, retained })
}

/// Project a feature vector onto the retained components.
pub fn pca_transform(model: &PcaModel, v: &FrameFeatureVector) -> Result<Vec<f64>> {
    if v.values.len() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            found: v.values.len(),
        });
    }
    let centered: Vec<f64> = v.values.iter().zip(&model.mean).map(|(x, m)| x - m).collect();
    Ok(model
        .components
        .iter()
        .map(|comp| comp.iter().zip(&centered).map(|(c, x)| c * x).sum())
        .collect())
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// eigenvalues and the orthogonal eigenvector matrix (columns).
#[allow(clippy::needless_range_loop)]
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    if n < 2 {
        return (a.iter().enumerate().map(|(i, r)| r.get(i).copied().unwrap_or(0.0)).collect(), v);
    }
    let frob: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let tol = 1e-14 * frob.max(1.0);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= tol {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                if a[p][q].abs() <= tol * 1e-2 {
                    continue;
                }
                // Rotation zeroing a[p][q].
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let eig = (0..n).map(|i| a[i][i]).collect();
    (eig, v)
}

/// One clustering sample: `window_len` consecutive reduced keyframe vectors
/// flattened into a single point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSample {
    pub values: Vec<f64>,
    pub start_keyframe: usize,
    pub majority_label: Option<String>,
    pub label_purity: f64,
}

/// Segment the reduced keyframe stream into overlapping windows: the first
/// window covers keyframes [0, window_len) and each later window starts at
/// the previous window's last keyframe. A partial tail is dropped.
///
/// `labels[i]` is the ground-truth label of reduced keyframe i, if any; the
/// majority label is the modal label among a window's keyframes, ties broken
/// by earliest occurrence inside the window.
pub fn window_samples(
    reduced: &[Vec<f64>],
    labels: &[Option<String>],
    window_len: usize,
) -> Result<Vec<WindowSample>> {
    if window_len < 2 {
        return Err(Error::InvalidParams(format!(
            "window length must be at least 2, got {window_len}"
        )));
    }
    if reduced.len() < window_len {
        return Err(Error::StreamTooShort { window_len, found: reduced.len() });
    }
    if labels.len() != reduced.len() {
        return Err(Error::DimensionMismatch { expected: reduced.len(), found: labels.len() });
    }
    let stride = window_len - 1;
    let mut out = Vec::new();
    let mut start = 0;
    while start + window_len <= reduced.len() {
        let slice = start..start + window_len;
        let values: Vec<f64> = reduced[slice.clone()].iter().flatten().copied().collect();
        let (majority_label, label_purity) = majority(&labels[slice], window_len);
        out.push(WindowSample { values, start_keyframe: start, majority_label, label_purity });
        start += stride;
    }
    Ok(out)
}

fn majority(labels: &[Option<String>], window_len: usize) -> (Option<String>, f64) {
    let mut counts: Vec<(&str, usize)> = Vec::new();
    for l in labels.iter().flatten() {
        match counts.iter_mut().find(|(name, _)| *name == l) {
            Some((_, c)) => *c += 1,
            None => counts.push((l, 1)),
        }
    }
    // Strict comparison so ties keep the earliest-occurring label.
    let mut best: Option<(&str, usize)> = None;
    for &(name, c) in &counts {
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((name, c));
        }
    }
    match best {
        Some((name, c)) => (Some(name.to_string()), c as f64 / window_len as f64),
        None => (None, 0.0),
    }
}
