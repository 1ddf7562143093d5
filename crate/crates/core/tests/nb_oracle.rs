mod common;

use common::rational_affinities;
use concernmap_core::bayes::train;
use concernmap_core::corpus::{TokenBag, TrainingCorpus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: [&str; 10] = ["aa", "bb", "cc", "dd", "ee", "ff", "gg", "hh", "ii", "jj"];

fn random_bag(rng: &mut ChaCha8Rng, vocab: usize, max_len: usize) -> TokenBag {
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| WORDS[rng.gen_range(0..vocab)]).collect()
}

fn random_corpus(rng: &mut ChaCha8Rng) -> TrainingCorpus {
    let k = rng.gen_range(2..=4);
    let vocab = rng.gen_range(2..=WORDS.len());
    let groups = (0..k)
        .map(|c| {
            let docs = (0..rng.gen_range(1..=3)).map(|_| random_bag(rng, vocab, 5)).collect();
            (format!("c{c}"), docs)
        })
        .collect();
    TrainingCorpus::new(groups).unwrap()
}

#[test]
fn float_model_agrees_with_exact_arithmetic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for round in 0..500 {
        let corpus = random_corpus(&mut rng);
        let (num, den) = [(1, 1), (1, 2), (2, 1), (1, 10)][round % 4];
        let model = train(&corpus, num as f64 / den as f64).unwrap();
        for _ in 0..4 {
            let doc = random_bag(&mut rng, WORDS.len(), 5);
            let got = model.affinity_vector(&doc);
            let want = rational_affinities(&corpus, (num, den), &doc);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-9, "round {round}: {got:?} vs {want:?}");
            }
        }
    }
}

#[test]
fn hand_computed_two_thirds() {
    let bag = |w: &[&str]| w.iter().copied().collect::<TokenBag>();
    let corpus = TrainingCorpus::new(vec![
        ("Database".into(), vec![bag(&["sql", "query", "table"])]),
        ("Networking".into(), vec![bag(&["socket", "ip", "packet"])]),
    ])
    .unwrap();
    let model = train(&corpus, 1.0).unwrap();
    let a = model.affinity_vector(&bag(&["sql"]));
    assert_eq!(rational_affinities(&corpus, (1, 1), &bag(&["sql"]))[0], 2.0 / 3.0);
    assert!((a[0] - 2.0 / 3.0).abs() < 1e-15, "{a:?}");
    assert_eq!(format!("{:.3}", a[0]), "0.667");
}
