use std::collections::BTreeMap;

use chrono::{DateTime, Duration, Utc};
use llmss::dsl::gen::{random_ast, AstShape};
use llmss::evalharness::{aggregate_success_rates, bleu, compute_q_overall, success_rate, Group, Metric, Rating};
use llmss::prompting::Attempt;
use llmss::{parse_code, print_code};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn parse_print_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let shape = AstShape { max_depth: 4, ..AstShape::default() };
    for _ in 0..10_000 {
        let ast = random_ast(&mut rng, shape);
        assert!(ast.depth() <= 4);
        let text = print_code(&ast);
        let back = parse_code(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
        assert_eq!(back, ast, "{text}");
        assert_eq!(print_code(&back), text);
    }
}

#[test]
fn printing_normalizes_layout() {
    let messy = "repeat ( 3 ){move_forward\n\n turn_left}  if(path_ahead){move_forward}else{turn_right}";
    let canonical = print_code(&parse_code(messy).unwrap());
    assert_eq!(print_code(&parse_code(&canonical).unwrap()), canonical);
}

/// Counts occurrences of `gram` in `tokens` by direct comparison.
fn occurrences(tokens: &[u8], gram: &[u8]) -> usize {
    (0..tokens.len()).filter(|&i| tokens[i..].starts_with(gram)).count()
}

/// Straight transcription of sentence BLEU, one n-gram position at a time.
fn bleu_oracle(c: &[u8], refs: &[Vec<u8>], max_n: usize) -> f64 {
    let orders = max_n.min(c.len());
    let mut product = 1.0;
    for n in 1..=orders {
        let mut distinct: Vec<&[u8]> = Vec::new();
        for i in 0..=c.len() - n {
            if !distinct.contains(&&c[i..i + n]) {
                distinct.push(&c[i..i + n]);
            }
        }
        let mut clipped = 0;
        for g in distinct {
            let best_ref = refs.iter().map(|r| occurrences(r, g)).max().unwrap();
            clipped += occurrences(c, g).min(best_ref);
        }
        let p = if clipped == 0 {
            if n == 1 {
                return 0.0;
            }
            0.5 / c.len() as f64
        } else {
            clipped as f64 / (c.len() - n + 1) as f64
        };
        product *= p;
    }
    let mut r = usize::MAX;
    for len in refs.iter().map(Vec::len).filter(|&l| l > 0) {
        let (d_new, d_old) = (len.abs_diff(c.len()), r.abs_diff(c.len()));
        if d_new < d_old || (d_new == d_old && len < r) {
            r = len;
        }
    }
    let bp = if c.len() >= r { 1.0 } else { (1.0 - r as f64 / c.len() as f64).exp() };
    bp * product.powf(1.0 / orders as f64)
}

#[test]
fn bleu_matches_brute_force_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let seq = |rng: &mut ChaCha8Rng| -> Vec<u8> {
        let len = rng.random_range(1..=14);
        (0..len).map(|_| rng.random_range(0..4)).collect()
    };
    for _ in 0..500 {
        let c = seq(&mut rng);
        let refs: Vec<Vec<u8>> = (0..rng.random_range(1..=3)).map(|_| seq(&mut rng)).collect();
        let got = bleu(&c, &refs, 4).unwrap();
        let want = bleu_oracle(&c, &refs, 4);
        assert!((got - want).abs() < 1e-9, "{c:?} {refs:?}: {got} vs {want}");
    }
}

#[test]
fn bleu_fixed_points() {
    for x in [vec!["a"], vec!["a", "b"], vec!["move_forward", "turn_left", "move_forward", "repeat", "(", "3", ")"]] {
        assert_eq!(bleu(&x, &[x.clone()], 4).unwrap(), 1.0);
    }
    let c = ["a", "b", "c", "d"].map(String::from).to_vec();
    let r = ["a", "b", "c", "d", "e", "f"].map(String::from).to_vec();
    assert!((bleu(&c, &[r], 4).unwrap() - (-0.5f64).exp()).abs() < 1e-9);
    assert!(bleu::<u8>(&[], &[vec![1]], 4).is_err());
}

#[test]
fn q_overall_truth_table() {
    assert_eq!(compute_q_overall(0, 0), 0);
    assert_eq!(compute_q_overall(0, 1), 0);
    assert_eq!(compute_q_overall(1, 0), 0);
    assert_eq!(compute_q_overall(1, 1), 1);
}

#[test]
fn rates_over_eighteen_scenarios() {
    for (s, want) in [(16, 88.9), (14, 77.8), (12, 66.7), (7, 38.9)] {
        assert_eq!(success_rate(s, 18), want);
    }
}

fn at(secs: i64) -> DateTime<Utc> {
    DateTime::UNIX_EPOCH + Duration::seconds(secs)
}

fn fixture_attempts(n: usize) -> (Vec<Attempt>, BTreeMap<String, String>) {
    let code = parse_code("move_forward").unwrap();
    let attempts: Vec<Attempt> =
        (0..n).map(|i| Attempt::new(format!("s{i}"), "m", code.clone(), 0, "d", at(0)).unwrap()).collect();
    let refs = (0..n).map(|i| (format!("s{i}"), "ref".to_string())).collect();
    (attempts, refs)
}

fn counts(cells: &[llmss::evalharness::ReportCell]) -> BTreeMap<Metric, usize> {
    cells.iter().map(|c| (c.metric, c.successes)).collect()
}

prop_compose! {
    fn rating_set(n: usize)(raw in prop::collection::vec((0..n, 0..3usize, 0u8..2, 0u8..2, 0i64..5), 1..60)) -> Vec<(usize, usize, u8, u8, i64)> {
        raw
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn q_overall_is_product(a in 0u8..2, b in 0u8..2) {
        prop_assert_eq!(compute_q_overall(a, b), a * b);
        let r = Rating::new("r", "x", a, b, at(0)).unwrap();
        prop_assert_eq!(r.q_overall(), a * b);
    }

    #[test]
    fn overall_never_exceeds_either_criterion(raw in rating_set(18), shuffle_seed in any::<u64>()) {
        let (attempts, refs) = fixture_attempts(18);
        let mut ratings: Vec<Rating> = raw
            .iter()
            .map(|&(a, r, s, t, ts)| Rating::new(format!("r{r}"), attempts[a].id(), s, t, at(ts)).unwrap())
            .collect();
        let group = Group::new("ref", "m");
        let cells = aggregate_success_rates(&ratings, &attempts, &refs, &group).unwrap();
        let c = counts(&cells);
        prop_assert!(c[&Metric::QOverall] <= c[&Metric::QStu].min(c[&Metric::QTask]));

        use rand::seq::SliceRandom;
        ratings.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
        let again = aggregate_success_rates(&ratings, &attempts, &refs, &group).unwrap();
        prop_assert_eq!(cells, again);
    }
}

#[test]
fn later_rating_supersedes() {
    let (attempts, refs) = fixture_attempts(1);
    let id = attempts[0].id();
    let ratings = vec![Rating::new("r1", id, 1, 1, at(5)).unwrap(), Rating::new("r1", id, 1, 0, at(9)).unwrap()];
    let c = counts(&aggregate_success_rates(&ratings, &attempts, &refs, &Group::new("ref", "m")).unwrap());
    assert_eq!((c[&Metric::QStu], c[&Metric::QTask], c[&Metric::QOverall]), (1, 0, 0));
}
