//! Exact-match span scoring in the style of the CoNLL evaluation script.

use crate::corpus::OUTSIDE;
use crate::{Error, Result};

/// Entity span within one sentence, `end` exclusive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Span {
    pub kind: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpanScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_positives: usize,
    pub predicted: usize,
    pub gold: usize,
}

/// Maximal spans of an IOB2 sequence. An `I-X` that does not continue an
/// `X` span opens a new one.
pub fn extract_spans(labels: &[String]) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut open: Option<Span> = None;
    for (i, label) in labels.iter().enumerate() {
        let (begin, kind) = match label.split_once('-') {
            Some(("B", k)) => (true, Some(k)),
            Some(("I", k)) => (false, Some(k)),
            _ if label == OUTSIDE => (false, None),
            _ => (true, Some(label.as_str())),
        };
        let continues = !begin && matches!((&open, kind), (Some(s), Some(k)) if s.kind == k);
        if continues {
            if let Some(s) = open.as_mut() {
                s.end = i + 1;
            }
            continue;
        }
        spans.extend(open.take());
        open = kind.map(|k| Span {
            kind: k.to_string(),
            start: i,
            end: i + 1,
        });
    }
    spans.extend(open);
    spans
}

/// Precision, recall and F1 over exact `(type, start, end)` matches.
/// Zero denominators score 0.
pub fn span_f1(gold: &[Vec<String>], pred: &[Vec<String>]) -> Result<SpanScores> {
    if gold.len() != pred.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} gold sentences vs {} predicted",
            gold.len(),
            pred.len()
        )));
    }
    let (mut tp, mut n_pred, mut n_gold) = (0, 0, 0);
    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(Error::ShapeMismatch(format!(
                "sentence {i}: {} gold tokens vs {} predicted",
                g.len(),
                p.len()
            )));
        }
        let gs = extract_spans(g);
        let ps = extract_spans(p);
        tp += ps.iter().filter(|s| gs.contains(s)).count();
        n_pred += ps.len();
        n_gold += gs.len();
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = ratio(tp, n_pred);
    let recall = ratio(tp, n_gold);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(SpanScores {
        precision,
        recall,
        f1,
        true_positives: tp,
        predicted: n_pred,
        gold: n_gold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn identical_sequences_score_one() {
        let g = vec![s(&["B-PER", "I-PER", "O"])];
        let r = span_f1(&g, &g).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn missed_span_halves_recall() {
        let g = vec![s(&["B-PER", "I-PER", "O", "B-LOC"])];
        let p = vec![s(&["B-PER", "I-PER", "O", "O"])];
        let r = span_f1(&g, &p).unwrap();
        assert_eq!((r.precision, r.recall), (1.0, 0.5));
        assert!((r.f1 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn no_predictions_scores_zero() {
        let g = vec![s(&["B-PER", "O"])];
        let p = vec![s(&["O", "O"])];
        let r = span_f1(&g, &p).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn swapping_swaps_precision_and_recall() {
        let g = vec![s(&["B-PER", "I-PER", "B-LOC", "O", "B-ORG"])];
        let p = vec![s(&["B-PER", "B-PER", "B-LOC", "O", "O"])];
        let a = span_f1(&g, &p).unwrap();
        let b = span_f1(&p, &g).unwrap();
        assert_eq!((a.precision, a.recall), (b.recall, b.precision));
    }

    #[test]
    fn shape_mismatch() {
        assert!(span_f1(&[s(&["O"])], &[]).is_err());
        assert!(span_f1(&[s(&["O"])], &[s(&["O", "O"])]).is_err());
    }

    #[test]
    fn spans_of_tricky_sequences() {
        let spans = extract_spans(&s(&["I-PER", "B-PER", "I-LOC", "I-LOC", "O", "B-ORG"]));
        let got: Vec<_> = spans.iter().map(|x| (x.kind.as_str(), x.start, x.end)).collect();
        assert_eq!(got, [("PER", 0, 1), ("PER", 1, 2), ("LOC", 2, 4), ("ORG", 5, 6)]);
    }
}
