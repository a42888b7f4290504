use std::collections::HashMap;
use std::hash::Hash;

use super::EvalError;

fn ngram_counts<T: Eq + Hash>(tokens: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut counts = HashMap::new();
    if n > 0 {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Sentence BLEU of `candidate` against `references`.
///
/// Modified n-gram precisions are clipped by the largest count in any single
/// reference and combined by geometric mean over orders `1..=min(max_n, |candidate|)`.
/// A zero unigram match gives 0; a zero match count at a higher order is
/// replaced by `1 / (2 |candidate|)`. The brevity penalty uses the reference
/// length closest to the candidate's (the shorter one on ties).
pub fn bleu<T: Eq + Hash>(candidate: &[T], references: &[Vec<T>], max_n: usize) -> Result<f64, EvalError> {
    if candidate.is_empty() || references.iter().all(|r| r.is_empty()) || max_n == 0 {
        return Err(EvalError::EmptyInput);
    }
    let c = candidate.len();
    let orders = max_n.min(c);
    let mut log_sum = 0.0;
    for n in 1..=orders {
        let cand = ngram_counts(candidate, n);
        let ref_counts: Vec<_> = references.iter().map(|r| ngram_counts(r, n)).collect();
        let matched: usize = cand
            .iter()
            .map(|(gram, &count)| {
                let max_ref = ref_counts.iter().map(|rc| rc.get(gram).copied().unwrap_or(0)).max().unwrap_or(0);
                count.min(max_ref)
            })
            .sum();
        let total = c + 1 - n;
        let precision = if matched > 0 {
            matched as f64 / total as f64
        } else if n == 1 {
            return Ok(0.0);
        } else {
            1.0 / (2.0 * c as f64)
        };
        log_sum += precision.ln();
    }
    let r = references
        .iter()
        .map(Vec::len)
        .filter(|&len| len > 0)
        .min_by_key(|&len| (len.abs_diff(c), len))
        .expect("at least one non-empty reference");
    let bp = if c < r { (1.0 - r as f64 / c as f64).exp() } else { 1.0 };
    Ok(bp * (log_sum / orders as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn identity() {
        for s in ["a", "a b", "a b c d e", "move_forward move_forward turn_left"] {
            assert_eq!(bleu(&toks(s), &[toks(s)], 4).unwrap(), 1.0);
        }
    }

    #[test]
    fn brevity_penalty_case() {
        let got = bleu(&toks("a b c d"), &[toks("a b c d e f")], 4).unwrap();
        assert!((got - (-0.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn disjoint_is_zero() {
        assert_eq!(bleu(&toks("a b"), &[toks("c d")], 4).unwrap(), 0.0);
    }

    #[test]
    fn empty_input() {
        assert_eq!(bleu::<&str>(&[], &[toks("a")], 4), Err(EvalError::EmptyInput));
        assert_eq!(bleu(&toks("a"), &[vec![]], 4), Err(EvalError::EmptyInput));
    }

    #[test]
    fn clipping() {
        // p1 = 2/4 (two "the" clipped to one, "cat" once), p2 = 1/3, lengths equal.
        let got = bleu(&toks("the the the cat"), &[toks("the cat sat on")], 2).unwrap();
        let expected = ((2.0f64 / 4.0).ln() / 2.0 + (1.0f64 / 3.0).ln() / 2.0).exp();
        assert!((got - expected).abs() < 1e-12);
    }
}
