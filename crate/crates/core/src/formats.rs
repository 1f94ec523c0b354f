//! Parsers and serializers for skeleton streams.
//!
//! Supported inputs:
//! - CSV: one row per frame, `frame_index, j0_x, j0_y, j0_z, ..., jN_z [, label]`,
//!   optional header row detected by a non-numeric first cell.
//! - CAD-60 native: comma-separated lines of per-joint orientation+position
//!   fields terminated by `END`; only the three position fields per joint are
//!   consumed. An optional trailing non-numeric field is taken as a label.
//!
//! Output: the same CSV dialect (bit-exact round trip) and a JSON document
//! `{ "source_id", "joint_model", "frames" }`.

use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::skeleton::{JointModel, SkeletonFrame, SkeletonSequence};

/// Input format descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Cad60,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "cad60" | "cad-60" => Ok(Format::Cad60),
            other => Err(Error::InvalidParams(format!("unknown format {other:?}"))),
        }
    }
}

/// Parse a skeleton stream in the given format.
pub fn parse_sequence<R: Read>(
    stream: R,
    format: Format,
    joint_model: &JointModel,
    source_id: &str,
) -> Result<SkeletonSequence> {
    match format {
        Format::Csv => parse_csv(stream, joint_model, source_id),
        Format::Cad60 => parse_cad60(stream, joint_model, source_id),
    }
}

fn parse_cell(raw: &str, line: usize, column: usize) -> Result<f64> {
    raw.trim().parse::<f64>().map_err(|_| Error::MalformedRecord {
        line,
        column,
        message: format!("expected a number, found {:?}", raw.trim()),
    })
}

fn parse_csv<R: Read>(stream: R, model: &JointModel, source_id: &str) -> Result<SkeletonSequence> {
    let reader = BufReader::new(stream);
    let base = 1 + 3 * model.joint_count;
    let mut frames = Vec::new();
    for (li, line) in reader.lines().enumerate() {
        let line_no = li + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let cells: Vec<&str> = trimmed.split(',').collect();
        if frames.is_empty() && cells[0].trim().parse::<f64>().is_err() {
            // Header row.
            continue;
        }
        if cells.len() != base && cells.len() != base + 1 {
            let found = (cells.len().max(1) - 1) / 3;
            return Err(Error::JointCountMismatch {
                line: line_no,
                expected: model.joint_count,
                found,
            });
        }
        let index = cells[0].trim().parse::<usize>().map_err(|_| Error::MalformedRecord {
            line: line_no,
            column: 1,
            message: format!("expected a frame index, found {:?}", cells[0].trim()),
        })?;
        let mut joints: Vec<Vec3> = Vec::with_capacity(model.joint_count);
        for j in 0..model.joint_count {
            let at = 1 + 3 * j;
            joints.push([
                parse_cell(cells[at], line_no, at + 1)?,
                parse_cell(cells[at + 1], line_no, at + 2)?,
                parse_cell(cells[at + 2], line_no, at + 3)?,
            ]);
        }
        let label = (cells.len() == base + 1).then(|| cells[base].trim().to_string());
        frames.push(SkeletonFrame { index, joints, label });
    }
    SkeletonSequence::new(source_id.to_string(), model.clone(), frames)
}

/// CAD-60 record layout: frame id, then 11 joints with 9 orientation values,
/// an orientation confidence, 3 positions and a position confidence, then 4
/// joints with 3 positions and a confidence. Lines end with a trailing comma;
/// the stream terminates at `END`.
const CAD60_ORIENTED_JOINTS: usize = 11;
const CAD60_POSITION_JOINTS: usize = 4;
const CAD60_FIELDS: usize = 1 + CAD60_ORIENTED_JOINTS * 14 + CAD60_POSITION_JOINTS * 4;

fn parse_cad60<R: Read>(stream: R, model: &JointModel, source_id: &str) -> Result<SkeletonSequence> {
    let expected_joints = CAD60_ORIENTED_JOINTS + CAD60_POSITION_JOINTS;
    if model.joint_count != expected_joints {
        return Err(Error::InvalidParams(format!(
            "CAD-60 format carries {expected_joints} joints but the joint model has {}",
            model.joint_count
        )));
    }
    let reader = BufReader::new(stream);
    let mut frames = Vec::new();
    for (li, line) in reader.lines().enumerate() {
        let line_no = li + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "END" {
            break;
        }
        let mut cells: Vec<&str> = trimmed.split(',').collect();
        if cells.last().is_some_and(|c| c.trim().is_empty()) {
            cells.pop();
        }
        let label = if cells.len() == CAD60_FIELDS + 1 {
            let last = cells[CAD60_FIELDS].trim();
            if last.parse::<f64>().is_err() {
                cells.pop();
                Some(last.to_string())
            } else {
                None
            }
        } else {
            None
        };
        if cells.len() != CAD60_FIELDS {
            return Err(Error::MalformedRecord {
                line: line_no,
                column: cells.len(),
                message: format!("expected {CAD60_FIELDS} fields, found {}", cells.len()),
            });
        }
        let index = cells[0].trim().parse::<usize>().map_err(|_| Error::MalformedRecord {
            line: line_no,
            column: 1,
            message: format!("expected a frame index, found {:?}", cells[0].trim()),
        })?;
        let mut joints: Vec<Vec3> = Vec::with_capacity(expected_joints);
        for j in 0..CAD60_ORIENTED_JOINTS {
            let at = 1 + j * 14 + 10;
            joints.push([
                parse_cell(cells[at], line_no, at + 1)?,
                parse_cell(cells[at + 1], line_no, at + 2)?,
                parse_cell(cells[at + 2], line_no, at + 3)?,
            ]);
        }
        for j in 0..CAD60_POSITION_JOINTS {
            let at = 1 + CAD60_ORIENTED_JOINTS * 14 + j * 4;
            joints.push([
                parse_cell(cells[at], line_no, at + 1)?,
                parse_cell(cells[at + 1], line_no, at + 2)?,
                parse_cell(cells[at + 2], line_no, at + 3)?,
            ]);
        }
        frames.push(SkeletonFrame { index, joints, label });
    }
    SkeletonSequence::new(source_id.to_string(), model.clone(), frames)
}

/// Serialize a sequence to the CSV dialect accepted by [`parse_sequence`].
/// Coordinates use the shortest round-trip decimal form, so parsing the
/// output reproduces the sequence bit for bit.
pub fn to_csv(seq: &SkeletonSequence) -> String {
    let mut out = String::new();
    for f in &seq.frames {
        out.push_str(&f.index.to_string());
        for j in &f.joints {
            for c in j {
                out.push(',');
                out.push_str(&c.to_string());
            }
        }
        if let Some(label) = &f.label {
            out.push(',');
            out.push_str(label);
        }
        out.push('\n');
    }
    out
}

/// Serialize a sequence as JSON.
pub fn to_json(seq: &SkeletonSequence) -> Result<String> {
    Ok(serde_json::to_string_pretty(seq)?)
}

/// Load a CAD-60 subject directory: reads `activityLabel.txt` lines of
/// `<file-id>,<activity>` and concatenates each `<file-id>.txt` into one
/// labeled untrimmed stream, re-basing frame indices.
pub fn load_cad60_subject_dir(dir: &Path, model: &JointModel) -> Result<SkeletonSequence> {
    let label_file = dir.join("activityLabel.txt");
    let listing = fs::read_to_string(&label_file)?;
    let mut frames = Vec::new();
    let mut next_index = 0usize;
    for raw in listing.lines() {
        let line = raw.trim().trim_end_matches(',');
        if line.is_empty() || line == "END" {
            continue;
        }
        let (id, activity) = line.split_once(',').ok_or_else(|| Error::InvalidParams(format!(
            "activityLabel line {line:?} is not <id>,<activity>"
        )))?;
        let path = dir.join(format!("{}.txt", id.trim()));
        let file = fs::File::open(&path)?;
        let video = parse_cad60(file, model, id.trim())?;
        for mut f in video.frames {
            f.index = next_index;
            f.label = Some(activity.trim().to_string());
            frames.push(f);
            next_index += 1;
        }
    }
    let source_id = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    SkeletonSequence::new(source_id, model.clone(), frames)
}
