//! Pooled per-class precision, recall and F1 against ground truth.

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::io::ClassMap;
use crate::shadow::PixelClass;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

/// Metrics for one class; `None` where the ratio has a zero denominator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub counts: Confusion,
}

impl ClassScore {
    pub fn from_counts(c: Confusion) -> Self {
        let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
        Self {
            precision: ratio(c.tp, c.tp + c.fp),
            recall: ratio(c.tp, c.tp + c.fn_),
            f1: ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn_),
            counts: c,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub frames_scored: usize,
    pub foreground: ClassScore,
    pub shadow: ClassScore,
}

/// Scores `pred` against `truth`, skipping the first `warmup` frames.
pub fn score(pred: &[ClassMap], truth: &[ClassMap], warmup: usize) -> Result<ScoreReport, EvalError> {
    if pred.len() != truth.len() {
        return Err(EvalError::LengthMismatch { pred: pred.len(), truth: truth.len() });
    }
    let mut fg = Confusion::default();
    let mut sh = Confusion::default();
    let mut frames_scored = 0;
    for (i, (p, t)) in pred.iter().zip(truth).enumerate() {
        if p.dims() != t.dims() {
            return Err(EvalError::DimensionMismatch { frame: i, pred: p.dims(), truth: t.dims() });
        }
        if i < warmup {
            continue;
        }
        frames_scored += 1;
        for (&pc, &tc) in p.classes.iter().zip(&t.classes) {
            for (class, acc) in [(PixelClass::Foreground, &mut fg), (PixelClass::Shadow, &mut sh)] {
                match (pc == class, tc == class) {
                    (true, true) => acc.tp += 1,
                    (true, false) => acc.fp += 1,
                    (false, true) => acc.fn_ += 1,
                    (false, false) => {}
                }
            }
        }
    }
    Ok(ScoreReport {
        frames_scored,
        foreground: ClassScore::from_counts(fg),
        shadow: ClassScore::from_counts(sh),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(classes: &[PixelClass]) -> ClassMap {
        ClassMap::from_classes(classes.len(), 1, classes.to_vec())
    }

    use PixelClass::{Background as B, Foreground as F, Shadow as S};

    #[test]
    fn perfect_prediction() {
        let truth = vec![map(&[B, F, S, F])];
        let r = score(&truth, &truth, 0).unwrap();
        for c in [r.foreground, r.shadow] {
            assert_eq!((c.precision, c.recall, c.f1), (Some(1.0), Some(1.0), Some(1.0)));
        }
    }

    #[test]
    fn all_background_prediction() {
        let r = score(&[map(&[B, B, B])], &[map(&[F, B, B])], 0).unwrap();
        assert_eq!(r.foreground.recall, Some(0.0));
        assert_eq!(r.foreground.precision, None);
        assert_eq!(r.foreground.f1, Some(0.0));
        assert_eq!(r.shadow.f1, None);
    }

    #[test]
    fn warmup_and_errors() {
        let truth = vec![map(&[F]), map(&[B])];
        let pred = vec![map(&[B]), map(&[B])];
        let r = score(&pred, &truth, 1).unwrap();
        assert_eq!(r.frames_scored, 1);
        assert_eq!(r.foreground.counts, Confusion::default());
        assert!(matches!(score(&pred[..1], &truth, 0), Err(EvalError::LengthMismatch { .. })));
        let wide = vec![map(&[B, B]), map(&[B])];
        assert!(matches!(score(&wide, &truth, 0), Err(EvalError::DimensionMismatch { frame: 0, .. })));
    }
}
