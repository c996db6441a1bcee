use super::{EmbeddingTable, LabeledCorpus};
use crate::{Error, Result};

/// Tokens on each side of the center word.
pub const CONTEXT: usize = 3;

/// A center token with three tokens of context on each side.
///
/// `None` is the padding sentinel used past sentence boundaries; it embeds
/// to the zero vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSample {
    pub left: [Option<String>; CONTEXT],
    pub center: String,
    pub right: [Option<String>; CONTEXT],
    pub center_label: String,
}

impl WindowSample {
    /// The seven slots, left to right.
    pub fn slots(&self) -> impl Iterator<Item = Option<&str>> {
        self.left
            .iter()
            .map(|s| s.as_deref())
            .chain(std::iter::once(Some(self.center.as_str())))
            .chain(self.right.iter().map(|s| s.as_deref()))
    }
}

/// Window centred on token `pos` of sentence `sent`.
pub fn window_at(corpus: &LabeledCorpus, sent: usize, pos: usize) -> WindowSample {
    let tokens = &corpus.sentences()[sent];
    let at = |i: isize| -> Option<String> {
        usize::try_from(i)
            .ok()
            .and_then(|i| tokens.get(i))
            .map(|t| t.surface.clone())
    };
    let p = pos as isize;
    let c = CONTEXT as isize;
    WindowSample {
        left: std::array::from_fn(|k| at(p - c + k as isize)),
        center: tokens[pos].surface.clone(),
        right: std::array::from_fn(|k| at(p + 1 + k as isize)),
        center_label: tokens[pos].label.clone(),
    }
}

/// Windows for the first `n` tokens of the corpus, in corpus order.
pub fn extract_windows(corpus: &LabeledCorpus, n: usize) -> Result<Vec<WindowSample>> {
    let available = corpus.token_count();
    if n > available {
        return Err(Error::NotEnoughTokens {
            requested: n,
            available,
        });
    }
    Ok(corpus
        .sentences()
        .iter()
        .enumerate()
        .flat_map(|(s, sentence)| (0..sentence.len()).map(move |p| (s, p)))
        .take(n)
        .map(|(s, p)| window_at(corpus, s, p))
        .collect())
}

/// Concatenated slot embeddings, `7 * dim` values.
pub fn embed_window(window: &WindowSample, table: &EmbeddingTable) -> Vec<f64> {
    let mut out = vec![0.0; (2 * CONTEXT + 1) * table.dim()];
    for (slot, chunk) in window.slots().zip(out.chunks_exact_mut(table.dim())) {
        if let Some(word) = slot {
            chunk.copy_from_slice(&table.lookup(word));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_conll;

    fn abc() -> LabeledCorpus {
        parse_conll("a O\nb B-PER\nc O\n\nd O\n").unwrap()
    }

    #[test]
    fn pads_sentence_boundaries() {
        let w = extract_windows(&abc(), 3).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w[0].left, [None, None, None]);
        assert_eq!(w[0].center, "a");
        assert_eq!(w[0].right, [Some("b".into()), Some("c".into()), None]);
        assert_eq!(w[1].center_label, "B-PER");
    }

    #[test]
    fn context_does_not_cross_sentences() {
        let w = extract_windows(&abc(), 4).unwrap();
        assert_eq!(w[3].center, "d");
        assert!(w[3].left.iter().chain(&w[3].right).all(Option::is_none));
    }

    #[test]
    fn zero_and_too_many() {
        assert!(extract_windows(&abc(), 0).unwrap().is_empty());
        assert!(matches!(
            extract_windows(&abc(), 5),
            Err(Error::NotEnoughTokens { requested: 5, available: 4 })
        ));
    }

    #[test]
    fn every_valid_n_gives_exactly_n() {
        let c = abc();
        for n in 0..=c.token_count() {
            assert_eq!(extract_windows(&c, n).unwrap().len(), n);
        }
    }

    #[test]
    fn sentinel_embeds_to_zero_and_repeats_are_identical() {
        let table = EmbeddingTable::hashed(8, 1);
        let pad = WindowSample {
            left: [None, None, None],
            center: "x".into(),
            right: [None, None, None],
            center_label: "O".into(),
        };
        let v = embed_window(&pad, &table);
        assert_eq!(v.len(), 56);
        assert!(v[..24].iter().chain(&v[32..]).all(|&x| x == 0.0));

        let twice = WindowSample {
            left: [None, Some("Paris".into()), None],
            center: "paris".into(),
            right: [None, None, None],
            center_label: "O".into(),
        };
        let v = embed_window(&twice, &table);
        assert_eq!(v[8..16], v[24..32]);
        assert_eq!(v, embed_window(&twice, &table));
    }
}
