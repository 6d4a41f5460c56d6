use num_bigint::BigInt;
use proptest::prelude::*;

use invgraph::bridge::{self, BridgeSpec};
use invgraph::census;
use invgraph::exact::{self, IntMatrix};
use invgraph::graphs::{canonical_key, io, Graph};
use invgraph::invert::{self, InvertibilityClass, Sign};
use invgraph::spectra;

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (2usize..=7).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs: Vec<(usize, usize)> = (1..=n)
                .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
                .zip(bits)
                .filter_map(|(p, keep)| keep.then_some(p))
                .collect();
            Graph::from_simple_edges(n, &pairs).unwrap()
        })
    })
}

fn relabel(g: &Graph, perm: &[usize]) -> Graph {
    let edges: Vec<(usize, usize, u64)> = g.edges().into_iter().map(|(u, v, w)| (perm[u - 1] + 1, perm[v - 1] + 1, w)).collect();
    Graph::from_edges(g.n(), &edges).unwrap()
}

proptest! {
    #[test]
    fn inverse_times_adjacency_is_identity(g in graph_strategy()) {
        let a = g.adjacency();
        match exact::inverse_exact(&a) {
            Ok(inv) => {
                prop_assert_eq!(a.to_rational().multiply(&inv.matrix).unwrap(), exact::RatMatrix::identity(g.n()));
                prop_assert_ne!(exact::det(&a).unwrap(), BigInt::from(0));
            }
            Err(_) => prop_assert_eq!(exact::det(&a).unwrap(), BigInt::from(0)),
        }
    }

    #[test]
    fn class_and_key_invariant_under_relabeling(g in graph_strategy(), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..g.n()).collect();
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let h = relabel(&g, &perm);
        prop_assert_eq!(invert::classify(&g), invert::classify(&h));
        prop_assert_eq!(canonical_key(&g).unwrap(), canonical_key(&h).unwrap());
    }

    #[test]
    fn text_formats_round_trip(g in graph_strategy()) {
        prop_assert_eq!(&io::parse_graph(&io::to_json(&g)).unwrap(), &g);
        prop_assert_eq!(&io::parse_graph(&io::to_edge_list(&g)).unwrap(), &g);
        prop_assert_eq!(&io::parse_dot(&io::to_dot(&g)).unwrap(), &g);
    }
}

#[test]
fn signed_inverse_graph_inverts_back() {
    for r in census::run_census(6).unwrap() {
        for sign in [Sign::Positive, Sign::Negative] {
            if !r.class.allows(sign) {
                continue;
            }
            let res = invert::inverse_graph_with_sign(&r.graph, sign).unwrap();
            let back = exact::inverse_exact(&res.inverse_graph.adjacency()).unwrap().integral().unwrap();
            let mut want = res.signature.conjugate(&r.graph.adjacency());
            if sign == Sign::Negative {
                want = want.scale(&BigInt::from(-1));
            }
            assert_eq!(back, want);
        }
    }
}

#[test]
fn sign_preserving_bridges_keep_their_class() {
    let records = census::run_census(6).unwrap();
    let positive: Vec<_> = records.iter().filter(|r| r.class.allows(Sign::Positive)).collect();
    let mut checked = 0;
    for a in &positive {
        for b in &positive {
            let Some(subset) = b.bridgeable.get(&1).and_then(|s| s.first()) else {
                continue;
            };
            let spec = BridgeSpec::new(vec![(1, subset[0])]).unwrap();
            let c = bridge::bridge(&a.graph, &b.graph, &spec).unwrap();
            let Some(pres) = bridge::sign_preservation(&a.graph, &b.graph, &spec).unwrap() else {
                continue;
            };
            if pres.preserved.includes(Sign::Positive) {
                assert!(invert::classify(&c).allows(Sign::Positive));
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn nonsingular_census_spectra_avoid_zero() {
    for m in census::SUPPORTED_SIZES {
        for r in census::run_census(m).unwrap() {
            if r.class == InvertibilityClass::NonIntegralInvertible || r.class.is_integral() {
                assert!(spectra::lambda_min_pos(&r.graph).unwrap() > 0.0);
                let s = spectra::spectrum(&r.graph).unwrap();
                assert!(s.eigenvalues.iter().all(|v| v.abs() > 1e-6));
            }
        }
    }
}

#[test]
fn worked_bridge_matches_adjacency_blocks() {
    let ga = Graph::from_simple_edges(4, &[(1, 2), (2, 3), (1, 4)]).unwrap();
    let gb = Graph::from_simple_edges(4, &[(1, 3), (1, 4), (2, 3)]).unwrap();
    let spec: BridgeSpec = "3:1,4:2".parse().unwrap();
    let c = bridge::bridge(&ga, &gb, &spec).unwrap();
    let blocks = IntMatrix::block(&ga.adjacency(), &spec.coupling(4, 4), &spec.coupling(4, 4).transpose(), &gb.adjacency()).unwrap();
    assert_eq!(c.adjacency(), blocks);
}
