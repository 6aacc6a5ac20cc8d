//! Ground-truth evaluation.
//!
//! The error statistic counts a pixel as correct when its estimated disparity
//! differs from ground truth by strictly less than one pixel; unmatched
//! pixels count as errors, which keeps comparisons fair between solutions of
//! different density. Scoring runs over non-occluded pixels, identified by
//! left-right cross-checking the two ground-truth maps.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::imaging::DisparityMap;

/// Accuracy of one variant on one scene.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub scene: String,
    pub variant: String,
    pub accuracy_percent: f64,
    pub correct: u64,
    pub wrong: u64,
    pub unmatched: u64,
    pub evaluated_pixels: u64,
}

impl EvaluationReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }

    pub fn table_row(&self) -> String {
        format!(
            "{:<16} {:<12} {:>7.2}%  correct {:>9}  wrong {:>9}  unmatched {:>9}  of {:>9}",
            self.scene,
            self.variant,
            self.accuracy_percent,
            self.correct,
            self.wrong,
            self.unmatched,
            self.evaluated_pixels
        )
    }
}

/// Non-occluded mask by left-right consistency: pixel `(u, v)` passes when
/// the left disparity `d` lands on a valid right pixel whose disparity
/// agrees within one pixel.
pub fn nonoccluded_mask(gt_left: &DisparityMap, gt_right: &DisparityMap) -> Result<Vec<bool>> {
    if !gt_left.same_size(gt_right) {
        return Err(Error::SizeMismatch(format!(
            "ground-truth maps differ: {}x{} vs {}x{}",
            gt_left.width(),
            gt_left.height(),
            gt_right.width(),
            gt_right.height()
        )));
    }
    let (w, h) = (gt_left.width(), gt_left.height());
    let mut mask = vec![false; w * h];
    for v in 0..h {
        for u in 0..w {
            let Some(d) = gt_left.get(u, v) else { continue };
            let up = (u as f64 - f64::from(d)).round() as i64;
            if up < 0 || up >= w as i64 {
                continue;
            }
            if let Some(d_right) = gt_right.get(up as usize, v) {
                if (d - d_right).abs() <= 1.0 {
                    mask[v * w + u] = true;
                }
            }
        }
    }
    Ok(mask)
}

/// Scores `est` against `gt` over the masked pixels with valid ground truth.
pub fn evaluate(
    est: &DisparityMap,
    gt: &DisparityMap,
    mask: &[bool],
    scene: &str,
    variant: &str,
) -> Result<EvaluationReport> {
    if !est.same_size(gt) {
        return Err(Error::SizeMismatch(format!(
            "estimate {}x{} vs ground truth {}x{}",
            est.width(),
            est.height(),
            gt.width(),
            gt.height()
        )));
    }
    if mask.len() != gt.width() * gt.height() {
        return Err(Error::SizeMismatch(format!(
            "mask length {} does not match {}x{}",
            mask.len(),
            gt.width(),
            gt.height()
        )));
    }

    let (mut correct, mut wrong, mut unmatched) = (0u64, 0u64, 0u64);
    for v in 0..gt.height() {
        for u in 0..gt.width() {
            if !mask[v * gt.width() + u] {
                continue;
            }
            let Some(d_gt) = gt.get(u, v) else { continue };
            match est.get(u, v) {
                Some(d_est) if (d_est - d_gt).abs() < 1.0 => correct += 1,
                Some(_) => wrong += 1,
                None => unmatched += 1,
            }
        }
    }
    let evaluated = correct + wrong + unmatched;
    Ok(EvaluationReport {
        scene: scene.into(),
        variant: variant.into(),
        accuracy_percent: if evaluated == 0 {
            0.0
        } else {
            100.0 * correct as f64 / evaluated as f64
        },
        correct,
        wrong,
        unmatched,
        evaluated_pixels: evaluated,
    })
}
