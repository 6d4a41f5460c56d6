use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;

use super::{Graph, GraphError, Result};

/// Exhaustive canonicalization tries all `n!` relabelings.
pub const MAX_CANONICAL_N: usize = 8;

/// Byte string identifying an isomorphism class.
///
/// Layout: `n` as 4 big-endian bytes, then the upper triangle (diagonal
/// included, row-major) of the canonically relabeled adjacency matrix, 8
/// big-endian bytes per entry. Byte order therefore agrees with the order of
/// the entry sequences.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(pub Vec<u8>);

impl CanonicalKey {
    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn upper_triangle(g: &Graph, order: &[usize]) -> Vec<u64> {
    let n = g.n();
    let mut code = Vec::with_capacity(n * (n + 1) / 2);
    for a in 0..n {
        for b in a..n {
            code.push(g.entry(order[a], order[b]));
        }
    }
    code
}

/// Relabeling order minimizing the upper-triangle code, compared entry by entry.
fn best_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut best: Vec<usize> = (0..n).collect();
    let mut best_code = upper_triangle(g, &best);
    for order in (0..n).permutations(n) {
        // Lexicographic comparison with early exit.
        let mut k = 0;
        let mut ordering = std::cmp::Ordering::Equal;
        'outer: for a in 0..n {
            for b in a..n {
                let v = g.entry(order[a], order[b]);
                match v.cmp(&best_code[k]) {
                    std::cmp::Ordering::Equal => {}
                    o => {
                        ordering = o;
                        break 'outer;
                    }
                }
                k += 1;
            }
        }
        if ordering == std::cmp::Ordering::Less {
            best_code = upper_triangle(g, &order);
            best = order;
        }
    }
    best
}

fn encode(n: usize, code: &[u64]) -> CanonicalKey {
    let mut bytes = Vec::with_capacity(4 + 8 * code.len());
    bytes.extend_from_slice(&(n as u32).to_be_bytes());
    for v in code {
        bytes.extend_from_slice(&v.to_be_bytes());
    }
    CanonicalKey(bytes)
}

/// Canonical key and the graph relabeled into canonical vertex order.
pub fn canonical_form(g: &Graph) -> Result<(CanonicalKey, Graph)> {
    let n = g.n();
    if n > MAX_CANONICAL_N {
        return Err(GraphError::TooLarge { n, max: MAX_CANONICAL_N });
    }
    let order = best_order(g);
    let key = encode(n, &upper_triangle(g, &order));
    // order[a] is the old vertex placed at new position a.
    let mut perm = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        perm[old] = new;
    }
    Ok((key, g.relabel(&perm)))
}

pub fn canonical_key(g: &Graph) -> Result<CanonicalKey> {
    canonical_form(g).map(|(k, _)| k)
}

/// One representative per isomorphism class of connected simple graphs on
/// `n` vertices satisfying `predicate`, relabeled canonically and sorted by key.
///
/// Scans all `2^(n(n-1)/2)` labeled graphs.
pub fn enumerate_connected_simple<P>(n: usize, predicate: P) -> Result<Vec<(CanonicalKey, Graph)>>
where
    P: Fn(&Graph) -> bool + Sync,
{
    if n > MAX_CANONICAL_N {
        return Err(GraphError::TooLarge { n, max: MAX_CANONICAL_N });
    }
    let pairs: Vec<(usize, usize)> = (1..=n).tuple_combinations().collect();
    let total: u64 = 1 << pairs.len();
    let found: Vec<(CanonicalKey, Graph)> = (0..total)
        .into_par_iter()
        .filter_map(|mask| {
            let mut g = Graph::empty(n);
            for (bit, &(u, v)) in pairs.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    g.add_edge(u, v, 1).ok()?;
                }
            }
            if !g.is_connected() || !predicate(&g) {
                return None;
            }
            canonical_form(&g).ok()
        })
        .collect();
    let unique: BTreeMap<CanonicalKey, Graph> = found.into_iter().collect();
    Ok(unique.into_iter().collect())
}
