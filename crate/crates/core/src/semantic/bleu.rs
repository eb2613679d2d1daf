use std::collections::HashMap;

use super::SemanticError;

/// Lowercases, turns every non-alphanumeric character into a separator and
/// splits on whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    text.chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect::<String>()
        .to_lowercase()
        .split_whitespace()
        .map(str::to_owned)
        .collect()
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w.iter().map(AsRef::as_ref).collect()).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped n-gram matches and the candidate's n-gram total for order `n`.
pub fn clipped_matches<S: AsRef<str>>(candidate: &[S], reference: &[S], n: usize) -> (usize, usize) {
    let cand = ngram_counts(candidate, n);
    let refc = ngram_counts(reference, n);
    let matched = cand
        .iter()
        .map(|(g, &c)| c.min(refc.get(g).copied().unwrap_or(0)))
        .sum();
    (matched, candidate.len().saturating_sub(n - 1))
}

/// Sentence BLEU over orders `1..=max_n` with a brevity penalty.
///
/// Unigram precision is used as is, so a candidate sharing no token with the
/// reference scores 0. For higher orders a zero match count is smoothed to
/// `1 / (total + 1)`.
pub fn bleu<S: AsRef<str>>(candidate: &[S], reference: &[S], max_n: usize) -> Result<f64, SemanticError> {
    if reference.is_empty() {
        return Err(SemanticError::EmptyReference);
    }
    if max_n == 0 {
        return Err(SemanticError::InvalidOrder);
    }
    if candidate.is_empty() {
        return Ok(0.0);
    }
    let mut log_sum = 0.0;
    for n in 1..=max_n {
        let (m, total) = clipped_matches(candidate, reference, n);
        let p = if m > 0 {
            m as f64 / total as f64
        } else if n == 1 {
            return Ok(0.0);
        } else {
            1.0 / (total as f64 + 1.0)
        };
        log_sum += p.ln();
    }
    let (c, r) = (candidate.len() as f64, reference.len() as f64);
    let bp = if c >= r { 1.0 } else { (1.0 - r / c).exp() };
    Ok(bp * (log_sum / max_n as f64).exp())
}

/// Tokenises both strings and scores with BLEU-`max_n`.
pub fn bleu_text(candidate: &str, reference: &str, max_n: usize) -> Result<f64, SemanticError> {
    bleu(&tokenize(candidate), &tokenize(reference), max_n)
}
