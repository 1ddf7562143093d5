//! Test oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use concernmap_core::corpus::{TokenBag, TrainingCorpus};
use concernmap_core::metrics::Partition;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

/// Partition of `0..n` as a restricted growth string.
pub type Rgs = Vec<u8>;

pub fn canonical(labels: &[u8]) -> Rgs {
    let mut map = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len() as u8;
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

/// Every partition of `0..n`.
pub fn all_partitions(n: usize) -> Vec<Rgs> {
    fn go(prefix: &mut Rgs, max: u8, n: usize, out: &mut Vec<Rgs>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let limit = if prefix.is_empty() { 0 } else { max + 1 };
        for l in 0..=limit {
            prefix.push(l);
            go(prefix, max.max(l), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), 0, n, &mut out);
    out
}

pub fn random_partition(rng: &mut impl Rng, n: usize) -> Rgs {
    let k = rng.gen_range(1..=n) as u8;
    let labels: Vec<u8> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    canonical(&labels)
}

pub fn to_partition(rgs: &[u8]) -> Partition {
    let k = rgs.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut groups = vec![Vec::new(); k];
    for (item, &l) in rgs.iter().enumerate() {
        groups[l as usize].push(format!("e{item}"));
    }
    Partition::from_groups(groups).unwrap()
}

/// Distances over the graph whose edges are single Move or Join operations.
pub struct MojoOracle {
    index: HashMap<Rgs, usize>,
    neighbours: Vec<Vec<usize>>,
}

impl MojoOracle {
    pub fn new(n: usize) -> Self {
        let states = all_partitions(n);
        let index: HashMap<Rgs, usize> =
            states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let neighbours = states
            .iter()
            .map(|s| {
                let k = s.iter().copied().max().unwrap_or(0) + 1;
                let mut next = Vec::new();
                // move one object to another cluster or to a new one
                for e in 0..s.len() {
                    for target in 0..=k {
                        if target == s[e] {
                            continue;
                        }
                        let mut t = s.clone();
                        t[e] = target;
                        next.push(index[&canonical(&t)]);
                    }
                }
                // join two clusters
                for a in 0..k {
                    for b in a + 1..k {
                        let t: Vec<u8> = s.iter().map(|&l| if l == b { a } else { l }).collect();
                        next.push(index[&canonical(&t)]);
                    }
                }
                next.sort_unstable();
                next.dedup();
                next
            })
            .collect();
        MojoOracle { index, neighbours }
    }

    /// Shortest operation count from `a` to every partition.
    pub fn distances_from(&self, a: &[u8]) -> Vec<u32> {
        let start = self.index[a];
        let mut dist = vec![u32::MAX; self.neighbours.len()];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.neighbours[u] {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: &[u8], b: &[u8]) -> u32 {
        self.distances_from(a)[self.index[b]]
    }

    pub fn index_of(&self, p: &[u8]) -> usize {
        self.index[p]
    }
}

/// Exact one-vs-rest multinomial Naive Bayes posterior in rational
/// arithmetic. `alpha` is `num/den`.
pub fn rational_affinities(corpus: &TrainingCorpus, alpha: (i64, i64), doc: &TokenBag) -> Vec<f64> {
    let alpha = BigRational::new(BigInt::from(alpha.0), BigInt::from(alpha.1));
    let k = corpus.concerns().len();
    let mut vocab: Vec<&str> = corpus
        .labelled()
        .flat_map(|(_, bag)| bag.iter().map(|(t, _)| t))
        .collect();
    vocab.sort_unstable();
    vocab.dedup();
    let v = BigRational::from_integer(BigInt::from(vocab.len()));
    let n_docs = corpus.document_count();
    let int = |x: u64| BigRational::from_integer(BigInt::from(x));

    (0..k)
        .map(|c| {
            let mut counts = [HashMap::<&str, u64>::new(), HashMap::new()];
            let mut totals = [0u64; 2];
            let mut docs = [0u64; 2];
            for (label, bag) in corpus.labelled() {
                let side = usize::from(label != c);
                docs[side] += 1;
                for (t, n) in bag.iter() {
                    *counts[side].entry(t).or_default() += n as u64;
                    totals[side] += n as u64;
                }
            }
            assert_eq!(docs[0] + docs[1], n_docs as u64);
            let mut score = [int(docs[0]) / int(n_docs as u64), int(docs[1]) / int(n_docs as u64)];
            for (t, n) in doc.iter() {
                if vocab.binary_search(&t).is_err() {
                    continue;
                }
                for side in 0..2 {
                    let num = int(counts[side].get(t).copied().unwrap_or(0)) + &alpha;
                    let den = int(totals[side]) + &alpha * &v;
                    let p = num / den;
                    let mut pow = BigRational::one();
                    for _ in 0..n {
                        pow *= &p;
                    }
                    score[side] *= pow;
                }
            }
            let total = &score[0] + &score[1];
            assert!(!total.is_zero());
            (&score[0] / total).to_f64().unwrap()
        })
        .collect()
}
