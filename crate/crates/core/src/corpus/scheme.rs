use super::OUTSIDE;

/// Entity type of a tag: `B-PER` and `I-PER` and `PER` all give `PER`.
pub fn label_type(label: &str) -> &str {
    label
        .strip_prefix("B-")
        .or_else(|| label.strip_prefix("I-"))
        .unwrap_or(label)
}

pub fn strip_prefix(label: &str) -> String {
    label_type(label).to_string()
}

/// Each maximal run of one IO type becomes `B-X I-X ...`.
///
/// Adjacent entities of the same type are indistinguishable in IO and merge
/// into one span.
pub fn convert_io_to_iob2(labels: &[String]) -> Vec<String> {
    let mut prev = OUTSIDE;
    labels
        .iter()
        .map(|label| {
            let ty = label_type(label);
            let out = if ty == OUTSIDE {
                OUTSIDE.to_string()
            } else if ty == prev {
                format!("I-{ty}")
            } else {
                format!("B-{ty}")
            };
            prev = ty;
            out
        })
        .collect()
}

/// IOB1 marks `B-` only between adjacent same-type spans; IOB2 marks every
/// span start.
pub fn iob1_to_iob2(labels: &[String]) -> Vec<String> {
    let mut prev = OUTSIDE.to_string();
    labels
        .iter()
        .map(|label| {
            let out = match label.strip_prefix("I-") {
                Some(ty) if label_type(&prev) != ty => format!("B-{ty}"),
                _ => label.clone(),
            };
            prev = out.clone();
            out
        })
        .collect()
}
