//! The recursive fulvene family `F_n`.
//!
//! `F_0` is fulvene: a 5-cycle `1..5` with a pendant vertex 6 on vertex 4.
//! Its inverse vanishes on `{1, 2}`, so copies can be hung from any graph
//! by their vertices 1 and 2 without losing integral invertibility.
//!
//! Generation `n ≥ 2` adds `f_n` copies. First, each pendant vertex left by
//! generation `n − 2` receives two copies by their vertex 1; each copy's
//! vertex 2 goes to the nearest unused degree-2 vertex. The remaining
//! degree-2 vertices are then paired greedily by distance, one copy per
//! pair. Distances are taken in `F_{n−1}`, ties go to lower indices.
//! `F_1` is two copies of `F_0` joined `1–1'`, `2–2'`.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::exact;
use crate::graphs::Graph;
use crate::spectra::{self, SpectraError};

pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// Generations above this are refused (`F_6` already has 240 vertices).
pub const MAX_GENERATION: usize = 6;

const BASE_EDGES: [(usize, usize); 6] = [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5), (4, 6)];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FulveneError {
    #[error("generation {n} exceeds the supported maximum {max}")]
    GenerationTooLarge { n: usize, max: usize },
    #[error("construction broke a count identity at generation {generation}: {detail}")]
    ContractViolation { generation: usize, detail: String },
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

pub type Result<T, E = FulveneError> = std::result::Result<T, E>;

/// `f_0 = 0`, `f_1 = f_2 = 2`, `f_k = f_{k−1} + f_{k−2}`.
pub fn fibonacci_f(n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    let (mut a, mut b) = (2u64, 2u64);
    for _ in 2..n {
        (a, b) = (b, a + b);
    }
    b
}

pub fn fulvene_base() -> Graph {
    Graph::from_simple_edges(6, &BASE_EDGES).expect("fulvene edges are valid")
}

#[derive(Clone, Debug, Serialize)]
pub struct FulveneGen {
    pub n: usize,
    #[serde(skip)]
    pub graph: Graph,
    /// `f_1..f_n`.
    pub f: Vec<u64>,
    /// Vertices of degree 1, 2 and 3.
    pub degree_counts: [usize; 3],
}

impl FulveneGen {
    pub fn vertex_count(&self) -> usize {
        self.graph.n()
    }

    pub fn cubic_ratio(&self) -> f64 {
        self.degree_counts[2] as f64 / self.graph.n() as f64
    }
}

struct Builder {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    /// (generation, first vertex) of every copy, 0-based
    copies: Vec<(usize, usize)>,
}

impl Builder {
    fn add_copy(&mut self, generation: usize) -> usize {
        let off = self.vertices;
        self.vertices += 6;
        self.edges.extend(BASE_EDGES.iter().map(|&(u, v)| (off + u - 1, off + v - 1)));
        self.copies.push((generation, off));
        off
    }

    fn graph(&self) -> Graph {
        let mut g = Graph::empty(self.vertices);
        for &(u, v) in &self.edges {
            g.add_edge(u + 1, v + 1, 1).expect("builder edges are valid");
        }
        g
    }
}

fn degree_counts(g: &Graph) -> [usize; 3] {
    let mut counts = [0; 3];
    for d in g.degrees() {
        if (1..=3).contains(&d) {
            counts[d as usize - 1] += 1;
        }
    }
    counts
}

fn check_contract(generation: usize, g: &Graph) -> Result<[usize; 3]> {
    let counts = degree_counts(g);
    let f = fibonacci_f(generation) as usize;
    let f_prev = if generation == 0 { 0 } else { fibonacci_f(generation - 1) as usize };
    let total: usize = if generation == 0 {
        6
    } else {
        (1..=generation).map(|k| 6 * fibonacci_f(k) as usize).sum()
    };
    let mut problems = Vec::new();
    if g.n() != total {
        problems.push(format!("|V| = {} but 6·Σf_k = {total}", g.n()));
    }
    if g.max_degree() > 3 {
        problems.push(format!("maximum degree {}", g.max_degree()));
    }
    if generation > 0 {
        if counts[0] != f + f_prev {
            problems.push(format!("|V1| = {} but f_n + f_(n-1) = {}", counts[0], f + f_prev));
        }
        if counts[1] != 2 * f {
            problems.push(format!("|V2| = {} but 2f_n = {}", counts[1], 2 * f));
        }
    }
    if counts.iter().sum::<usize>() != g.n() {
        problems.push("isolated vertex".into());
    }
    if problems.is_empty() {
        Ok(counts)
    } else {
        Err(FulveneError::ContractViolation {
            generation,
            detail: problems.join("; "),
        })
    }
}

/// `F_0, …, F_n`.
pub fn fulvene_sequence(n: usize) -> Result<Vec<FulveneGen>> {
    if n > MAX_GENERATION {
        return Err(FulveneError::GenerationTooLarge { n, max: MAX_GENERATION });
    }
    let mut b = Builder {
        vertices: 0,
        edges: Vec::new(),
        copies: Vec::new(),
    };
    b.add_copy(1);
    let mut out = Vec::with_capacity(n + 1);
    let g = b.graph();
    out.push(FulveneGen {
        n: 0,
        degree_counts: check_contract(0, &g)?,
        graph: g,
        f: Vec::new(),
    });
    for generation in 1..=n {
        if generation == 1 {
            let off = b.add_copy(1);
            b.edges.push((0, off));
            b.edges.push((1, off + 1));
        } else {
            grow(&mut b, generation)?;
        }
        let g = b.graph();
        out.push(FulveneGen {
            n: generation,
            degree_counts: check_contract(generation, &g)?,
            graph: g,
            f: (1..=generation).map(fibonacci_f).collect(),
        });
    }
    Ok(out)
}

fn grow(b: &mut Builder, generation: usize) -> Result<()> {
    let g = b.graph();
    let degrees = g.degrees();
    let dist: Vec<Vec<usize>> = (0..g.n())
        .map(|s| g.bfs_distances(s).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect())
        .collect();
    let degree_two: Vec<usize> = (0..g.n()).filter(|&v| degrees[v] == 2).collect();
    let pendants: Vec<usize> = b
        .copies
        .iter()
        .filter(|c| c.0 + 2 == generation)
        .map(|c| c.1 + 5)
        .collect();

    let violation = |detail: &str| FulveneError::ContractViolation {
        generation,
        detail: detail.into(),
    };
    let mut used = vec![false; g.n()];
    let mut attach = Vec::new();
    for &p in &pendants {
        for _ in 0..2 {
            let w = degree_two
                .iter()
                .copied()
                .filter(|&x| !used[x])
                .min_by_key(|&x| (dist[p][x], x))
                .ok_or_else(|| violation("no free degree-2 vertex for a pendant"))?;
            used[w] = true;
            attach.push((p, w));
        }
    }
    let mut rest: Vec<usize> = degree_two.into_iter().filter(|&x| !used[x]).collect();
    while !rest.is_empty() {
        if rest.len() == 1 {
            return Err(violation("odd number of free degree-2 vertices"));
        }
        let mut best = (usize::MAX, 0, 0);
        for i in 0..rest.len() {
            for j in i + 1..rest.len() {
                let key = (dist[rest[i]][rest[j]], rest[i], rest[j]);
                if key < best {
                    best = key;
                }
            }
        }
        rest.retain(|&x| x != best.1 && x != best.2);
        attach.push((best.1, best.2));
    }
    if attach.len() as u64 != fibonacci_f(generation) {
        return Err(violation(&format!(
            "{} copies attached, f_n = {}",
            attach.len(),
            fibonacci_f(generation)
        )));
    }
    for (a, w) in attach {
        let off = b.add_copy(generation);
        b.edges.push((a, off));
        b.edges.push((w, off + 1));
    }
    Ok(())
}

pub fn fulvene_family(n: usize) -> Result<FulveneGen> {
    Ok(fulvene_sequence(n)?.pop().expect("sequence is nonempty"))
}

/// `(1/q) · 5 / (6^(n+1) − 1)`.
pub fn eigenvalue_bound(n: usize) -> f64 {
    5.0 / (GOLDEN_RATIO * (6f64.powi(n as i32 + 1) - 1.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct GenerationReport {
    pub n: usize,
    pub vertex_count: usize,
    pub expected_vertex_count: usize,
    pub degree_counts: [usize; 3],
    /// `[f_n + f_{n−1}, 2 f_n]`; absent for `n = 0`.
    pub expected_low_degree_counts: Option<[usize; 2]>,
    pub counts_ok: bool,
    #[serde(serialize_with = "crate::exact::serialize_bigint")]
    pub det: BigInt,
    pub integrally_invertible: bool,
    pub max_degree: u64,
    pub lambda_min_pos: f64,
    pub bound: f64,
    pub bound_holds: bool,
    pub cubic_ratio: f64,
    /// Ratio not below the previous generation's (`n ≥ 2`).
    pub ratio_nondecreasing: Option<bool>,
    /// `1/λ₁⁺(F_n) ≤ 6/λ₁⁺(F_{n−1}) + q` (`n ≥ 1`).
    pub recursion_holds: Option<bool>,
}

impl GenerationReport {
    pub fn all_hold(&self) -> bool {
        self.counts_ok
            && self.integrally_invertible
            && self.max_degree <= 3
            && self.bound_holds
            && self.ratio_nondecreasing.unwrap_or(true)
            && self.recursion_holds.unwrap_or(true)
    }
}

/// Checks invertibility, degree counts and the eigenvalue bound for `F_n`.
pub fn verify_generation(n: usize) -> Result<GenerationReport> {
    let seq = fulvene_sequence(n)?;
    let gen = &seq[n];
    let g = &gen.graph;
    let det = exact::det(&g.adjacency()).expect("adjacency is square");
    let lambda = spectra::lambda_min_pos(g)?;
    let bound = eigenvalue_bound(n);
    let expected_low = (n > 0).then(|| {
        let f = fibonacci_f(n) as usize;
        [f + fibonacci_f(n - 1) as usize, 2 * f]
    });
    let expected_vertex_count = if n == 0 {
        6
    } else {
        (1..=n).map(|k| 6 * fibonacci_f(k) as usize).sum()
    };
    let counts_ok = g.n() == expected_vertex_count
        && expected_low.map_or(true, |e| e[0] == gen.degree_counts[0] && e[1] == gen.degree_counts[1]);
    let ratio_nondecreasing = (n >= 2).then(|| gen.cubic_ratio() >= seq[n - 1].cubic_ratio());
    let recursion_holds = if n >= 1 {
        let prev = spectra::lambda_min_pos(&seq[n - 1].graph)?;
        Some(1.0 / lambda <= 6.0 / prev + GOLDEN_RATIO + 1e-9)
    } else {
        None
    };
    Ok(GenerationReport {
        n,
        vertex_count: g.n(),
        expected_vertex_count,
        degree_counts: gen.degree_counts,
        expected_low_degree_counts: expected_low,
        counts_ok,
        integrally_invertible: det.abs() == BigInt::one(),
        det,
        max_degree: g.max_degree(),
        lambda_min_pos: lambda,
        bound,
        // at n = 0 the bound is attained; allow float noise
        bound_holds: lambda >= bound * (1.0 - 1e-9),
        cubic_ratio: gen.cubic_ratio(),
        ratio_nondecreasing,
        recursion_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge;
    use crate::exact::IntMatrix;
    use crate::invert::{self, InvertibilityClass};

    #[test]
    fn sequence_values() {
        let got: Vec<u64> = (0..=8).map(fibonacci_f).collect();
        assert_eq!(got, vec![0, 2, 2, 4, 6, 10, 16, 26, 42]);
        // f_n = 2·Fib(n), Binet form with (-q)^(-n)
        let s5 = 5f64.sqrt();
        for n in 1..40 {
            let binet = 2.0 / s5 * (GOLDEN_RATIO.powi(n as i32) - (-GOLDEN_RATIO).powi(-(n as i32)));
            assert!((binet - fibonacci_f(n) as f64).abs() < 1e-6 * binet.max(1.0));
        }
        assert!((GOLDEN_RATIO - (1.0 + s5) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn base_inverse() {
        let inv = exact::inverse_exact(&fulvene_base().adjacency()).unwrap().integral().unwrap();
        #[rustfmt::skip]
        let expected = IntMatrix::from_i64(6, 6, &[
            0, 0, 0, 0, 1, -1,
            0, 0, 1, 0, 0, -1,
            0, 1, 0, 0, -1, 1,
            0, 0, 0, 0, 0, 1,
            1, 0, -1, 0, 0, 1,
            -1, -1, 1, 1, 1, -2,
        ]).unwrap();
        assert_eq!(inv, expected);
        assert_eq!(invert::classify(&fulvene_base()), InvertibilityClass::Negative);
        assert!(bridge::arbitrarily_bridgeable_subsets(&fulvene_base(), 2)
            .unwrap()
            .contains(&vec![1, 2]));
    }

    #[test]
    fn first_generations() {
        let seq = fulvene_sequence(5).unwrap();
        let sizes: Vec<usize> = seq.iter().map(FulveneGen::vertex_count).collect();
        assert_eq!(sizes, vec![6, 12, 24, 48, 84, 144]);
        let counts: Vec<[usize; 3]> = seq.iter().map(|g| g.degree_counts).collect();
        assert_eq!(
            counts,
            vec![[1, 4, 1], [2, 4, 6], [4, 4, 16], [6, 8, 34], [10, 12, 62], [16, 20, 108]]
        );
        assert_eq!(seq[3].f, vec![2, 2, 4]);
        for g in &seq {
            assert!(g.graph.is_connected());
            assert!(g.graph.is_simple());
        }
    }

    #[test]
    fn f1_is_two_joined_copies() {
        let f1 = fulvene_family(1).unwrap().graph;
        let direct = bridge::bridge(&fulvene_base(), &fulvene_base(), &"1:1,2:2".parse().unwrap()).unwrap();
        assert_eq!(f1, direct);
    }

    #[test]
    fn too_large() {
        assert!(matches!(
            fulvene_family(7),
            Err(FulveneError::GenerationTooLarge { n: 7, max: 6 })
        ));
    }

    #[test]
    fn generation_reports() {
        for n in 0..=5 {
            let r = verify_generation(n).unwrap();
            assert!(r.all_hold(), "{r:?}");
        }
        let r0 = verify_generation(0).unwrap();
        assert!((r0.lambda_min_pos - 1.0 / GOLDEN_RATIO).abs() < 1e-12);
        assert!((r0.bound - 1.0 / GOLDEN_RATIO).abs() < 1e-15);
        let r1 = verify_generation(1).unwrap();
        assert!((r1.bound - 0.0883).abs() < 1e-4);
        assert_eq!(r1.degree_counts[..2], [2, 4]);
    }

    #[test]
    fn generations_keep_integral_inverse() {
        for n in 0..=3 {
            let g = fulvene_family(n).unwrap().graph;
            assert!(invert::analyze(&g).integral_inverse().is_some());
        }
    }
}
