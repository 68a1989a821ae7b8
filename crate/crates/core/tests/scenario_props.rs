//! Popularity profiles and placement-family enumeration.

use cacheveil_core::enumeration::{count_placements, enumerate, Family, Partition};
use cacheveil_core::scenario::{zipf_popularity, ZipfSpec};
use cacheveil_core::Scenario;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn zipf_is_sorted_and_normalized(n in 1usize..60, alpha in 0.0f64..3.0) {
        let p = zipf_popularity(ZipfSpec { alpha, n }).unwrap();
        prop_assert_eq!(p.len(), n);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(p.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn joint_request_distribution_is_proper(
        weights in proptest::collection::vec(1u32..100, 2..8),
        gen in proptest::collection::vec(1u32..100, 1..4),
    ) {
        let n = weights.len();
        let pt: f64 = weights.iter().map(|&w| f64::from(w)).sum();
        let gt: f64 = gen.iter().map(|&w| f64::from(w)).sum();
        let p: Vec<f64> = weights.iter().map(|&w| f64::from(w) / pt).collect();
        let g: Vec<f64> = gen.iter().map(|&w| f64::from(w) / gt).collect();
        let s = Scenario::new(n, g.len(), 1, 1, &p, &g).unwrap();
        prop_assert!(s.popularity().windows(2).all(|w| w[0] >= w[1]));
        let mut total = 0.0;
        for k in 0..s.num_caches() {
            for i in 0..n {
                let v = s.joint_request_prob(k, i).unwrap();
                prop_assert!(v >= 0.0);
                total += v;
            }
        }
        prop_assert!((total - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn counts_match_enumeration(
        n in 2usize..7,
        c in 1usize..4,
        m_frac in 0.0f64..1.0,
        cuts in proptest::collection::vec(1usize..4, 7),
    ) {
        let m = 1 + ((n - 1) as f64 * m_frac) as usize % (n - 1);
        let p = vec![1.0 / n as f64; n];
        let s = Scenario::new(n, 1, m, c, &p, &[1.0]).unwrap();
        let mut sizes = Vec::new();
        let mut left = n;
        for &cut in &cuts {
            if left == 0 { break; }
            let take = cut.min(left);
            sizes.push(take);
            left -= take;
        }
        let part = Partition::new(&sizes, n).unwrap();
        for (family, partition) in [(Family::Chunk, None), (Family::File, None), (Family::Subset, Some(&part))] {
            let count = count_placements(&s, family, partition).unwrap();
            prop_assume!(count <= 100_000);
            let set = enumerate(&s, family, partition, 100_000).unwrap();
            prop_assert_eq!(set.len() as u128, count);
            let rows: Vec<Vec<u32>> = set.iter().map(<[u32]>::to_vec).collect();
            let mut sorted = rows.clone();
            sorted.sort();
            sorted.dedup();
            prop_assert_eq!(&sorted, &rows, "canonical ascending order without duplicates");
            for z in &rows {
                prop_assert_eq!(z.iter().map(|&x| x as usize).sum::<usize>(), m * c);
                match family {
                    Family::Chunk => prop_assert!(z.iter().all(|&x| x as usize <= c)),
                    Family::File => prop_assert!(z.iter().all(|&x| x == 0 || x as usize == c)),
                    Family::Subset => {
                        for (l, &x) in z.iter().enumerate() {
                            prop_assert!(x as usize <= part.size(l) * c);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn single_chunk_chunk_family_equals_file_family() {
    for (n, m) in [(4, 2), (5, 2), (6, 3), (7, 1)] {
        let p = vec![1.0 / n as f64; n];
        let s = Scenario::new(n, 1, m, 1, &p, &[1.0]).unwrap();
        let a = enumerate(&s, Family::Chunk, None, 10_000).unwrap();
        let b = enumerate(&s, Family::File, None, 10_000).unwrap();
        assert!(a.iter().eq(b.iter()));
    }
}
