use contactnet_core::community::{spectral_cluster, spectral_cluster_detailed, Partition, SpectralConfig};
use contactnet_core::graph::Graph;
use contactnet_core::seed::stream;
use proptest::prelude::*;
use rand::Rng;

fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = stream(seed, &[0]);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

fn check_partition(g: &Graph, p: &Partition) -> Result<(), TestCaseError> {
    p.validate().map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(p.n_nodes(), g.n_nodes());
    prop_assert!(p.sizes().iter().all(|&s| s > 0));
    let mut total = 0;
    for a in 0..p.k() {
        for b in a..p.k() {
            total += p.block_edges(a, b);
        }
    }
    prop_assert_eq!(total as usize, g.n_edges());
    // labels are canonical: first appearance order
    let mut next = 0;
    for &c in p.assignments() {
        prop_assert!(c <= next);
        if c == next {
            next += 1;
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectral_output_is_a_valid_pure_partition(n in 4usize..40, p in 0.05f64..0.6, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        // the default tau is the average degree, which is 0 (singular) without edges
        prop_assume!(g.n_edges() > 0);
        let cfg = SpectralConfig { seed, ..SpectralConfig::default() };
        let a = spectral_cluster(&g, &cfg).unwrap();
        check_partition(&g, &a)?;
        let b = spectral_cluster(&g, &cfg).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn relabeling_does_not_change_canonical_partition(n in 2usize..30, raw in proptest::collection::vec(0usize..5, 30), shift in 1usize..5) {
        let g = random_graph(n, 0.3, n as u64);
        let raw = &raw[..n];
        let permuted: Vec<usize> = raw.iter().map(|&c| (c + shift) % 5).collect();
        prop_assert_eq!(Partition::canonical(&g, raw).unwrap(), Partition::canonical(&g, &permuted).unwrap());
    }

    #[test]
    fn components_stay_together_when_k_matches(sizes in proptest::collection::vec(3usize..10, 2..4), seed in any::<u64>()) {
        // disjoint cliques: each component is one community
        let mut edges = Vec::new();
        let mut comp = Vec::new();
        let mut offset = 0;
        for (c, &s) in sizes.iter().enumerate() {
            for i in 0..s {
                comp.push(c);
                for j in i + 1..s {
                    edges.push((offset + i, offset + j));
                }
            }
            offset += s;
        }
        let g = Graph::from_edges(offset, edges).unwrap();
        let cfg = SpectralConfig { k_fixed: Some(sizes.len()), seed, ..SpectralConfig::default() };
        let out = spectral_cluster_detailed(&g, &cfg).unwrap();
        check_partition(&g, &out.partition)?;
        let expected = Partition::canonical(&g, &comp).unwrap();
        prop_assert_eq!(out.partition.assignments(), expected.assignments());
    }
}
