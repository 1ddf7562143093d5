mod common;

use common::{all_partitions, random_partition, to_partition, MojoOracle};
use concernmap_core::metrics::{max_mno, mno, mojofm, Partition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn matches_breadth_first_search_exhaustively_up_to_five() {
    for n in 1..=5 {
        let oracle = MojoOracle::new(n);
        let parts = all_partitions(n);
        for a in &parts {
            let dist = oracle.distances_from(a);
            for b in &parts {
                let got = mno(&to_partition(a), &to_partition(b)).unwrap();
                assert_eq!(got, dist[oracle.index_of(b)] as u64, "a={a:?} b={b:?}");
            }
        }
    }
}

#[test]
fn matches_breadth_first_search_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for n in [6, 7] {
        let oracle = MojoOracle::new(n);
        for _ in 0..1000 {
            let a = random_partition(&mut rng, n);
            let b = random_partition(&mut rng, n);
            let got = mno(&to_partition(&a), &to_partition(&b)).unwrap();
            assert_eq!(got, oracle.distance(&a, &b) as u64, "a={a:?} b={b:?}");
        }
    }
}

/// One partition of 0..n per multiset of block sizes.
fn size_representatives(n: usize) -> Vec<Vec<u8>> {
    fn sizes(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for s in (1..=n.min(max)).rev() {
            prefix.push(s);
            sizes(n - s, s, prefix, out);
            prefix.pop();
        }
    }
    let mut shapes = Vec::new();
    sizes(n, n, &mut Vec::new(), &mut shapes);
    shapes
        .into_iter()
        .map(|shape| {
            shape
                .iter()
                .enumerate()
                .flat_map(|(label, &s)| std::iter::repeat_n(label as u8, s))
                .collect()
        })
        .collect()
}

#[test]
fn closed_form_maximum_matches_enumeration_up_to_eight() {
    for n in 2..=8 {
        let all: Vec<Partition> = all_partitions(n).iter().map(|p| to_partition(p)).collect();
        for b in size_representatives(n) {
            let b = to_partition(&b);
            let worst = all.iter().map(|a| mno(a, &b).unwrap()).max().unwrap();
            assert_eq!(max_mno(&b).unwrap(), worst, "n={n}");
        }
    }
}

#[test]
fn bounds_and_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let n = rng.gen_range(2..=12);
        let a = to_partition(&random_partition(&mut rng, n));
        let b = to_partition(&random_partition(&mut rng, n));
        let d = mno(&a, &b).unwrap();
        assert!(d <= max_mno(&b).unwrap());
        let fm = mojofm(&a, &b).unwrap();
        assert!((0.0..=100.0).contains(&fm));
        assert_eq!(fm == 100.0, a.groups().map(|(_, g)| g.to_vec()).collect::<std::collections::BTreeSet<_>>()
            == b.groups().map(|(_, g)| g.to_vec()).collect());
        assert_eq!(mojofm(&a, &a).unwrap(), 100.0);
    }
}

#[test]
fn relabeling_groups_keeps_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let n = rng.gen_range(2..=10);
        let a = random_partition(&mut rng, n);
        let b = to_partition(&random_partition(&mut rng, n));
        let k = a.iter().copied().max().unwrap() + 1;
        let shift = rng.gen_range(1..=k);
        let relabelled: Vec<u8> = a.iter().map(|l| (l + shift) % k).collect();
        // same groups under different names and order
        let mut groups: Vec<(String, Vec<String>)> = (0..k)
            .map(|l| {
                (
                    format!("renamed{l}"),
                    relabelled
                        .iter()
                        .enumerate()
                        .filter(|(_, &x)| x == l)
                        .map(|(i, _)| format!("e{i}"))
                        .collect(),
                )
            })
            .collect();
        groups.reverse();
        let renamed = Partition::new(groups).unwrap();
        assert_eq!(mno(&renamed, &b).unwrap(), mno(&to_partition(&a), &b).unwrap());
    }
}
