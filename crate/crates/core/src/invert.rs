//! Integral, positive and negative invertibility of graphs.
//!
//! A graph is integrally invertible when its adjacency matrix has an integral
//! inverse (`det = ±1`). It is positively (negatively) invertible when some
//! ±1 signature `D` makes `D A⁻¹ D` nonnegative (nonpositive). The inverse
//! graph then has adjacency `D A⁻¹ D` (respectively `-D A⁻¹ D`).

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{self, ExactInverse, IntMatrix};
use crate::graphs::{Graph, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvertError {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("graph is not signable (class {0})")]
    NotSignable(InvertibilityClass),
    #[error("signature entries must be +1 or -1")]
    BadSignature,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub type Result<T, E = InvertError> = std::result::Result<T, E>;

/// Diagonal ±1 matrix, stored as its diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Signature(Vec<i8>);

impl Signature {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.iter().any(|&d| d != 1 && d != -1) {
            return Err(InvertError::BadSignature);
        }
        Ok(Signature(entries))
    }

    pub fn all_ones(n: usize) -> Self {
        Signature(vec![1; n])
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negated(&self) -> Self {
        Signature(self.0.iter().map(|d| -d).collect())
    }

    /// `D M D`, entry `(i, j)` scaled by `d_i d_j`.
    pub fn conjugate(&self, m: &IntMatrix) -> IntMatrix {
        assert_eq!(m.rows(), self.len(), "signature length");
        IntMatrix::from_fn(m.rows(), m.cols(), |i, j| {
            let v = &m[(i, j)];
            if self.0[i] * self.0[j] == 1 {
                v.clone()
            } else {
                -v.clone()
            }
        })
    }

    pub fn as_matrix(&self) -> IntMatrix {
        IntMatrix::from_fn(self.len(), self.len(), |i, j| {
            if i == j {
                BigInt::from(self.0[i])
            } else {
                BigInt::zero()
            }
        })
    }

    /// Concatenation `diag(self, other)`.
    pub fn concat(&self, other: &Signature) -> Signature {
        Signature(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "diag({})", parts.join(","))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignTarget {
    Nonnegative,
    Nonpositive,
}

impl SignTarget {
    fn accepts(self, v: &BigInt) -> bool {
        match self {
            SignTarget::Nonnegative => !v.is_negative(),
            SignTarget::Nonpositive => !v.is_positive(),
        }
    }

    fn unit(self) -> i8 {
        match self {
            SignTarget::Nonnegative => 1,
            SignTarget::Nonpositive => -1,
        }
    }
}

/// Sign of an inverse graph.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn target(self) -> SignTarget {
        match self {
            Sign::Positive => SignTarget::Nonnegative,
            Sign::Negative => SignTarget::Nonpositive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Positive => "positive",
            Sign::Negative => "negative",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InvertibilityClass {
    Singular,
    NonIntegralInvertible,
    IntegralOnly,
    Positive,
    Negative,
    PositiveAndNegative,
}

impl InvertibilityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            InvertibilityClass::Singular => "singular",
            InvertibilityClass::NonIntegralInvertible => "non_integral_invertible",
            InvertibilityClass::IntegralOnly => "integral_only",
            InvertibilityClass::Positive => "positive",
            InvertibilityClass::Negative => "negative",
            InvertibilityClass::PositiveAndNegative => "positive_and_negative",
        }
    }

    pub fn is_integral(self) -> bool {
        matches!(
            self,
            InvertibilityClass::IntegralOnly
                | InvertibilityClass::Positive
                | InvertibilityClass::Negative
                | InvertibilityClass::PositiveAndNegative
        )
    }

    pub fn allows(self, sign: Sign) -> bool {
        match sign {
            Sign::Positive => matches!(
                self,
                InvertibilityClass::Positive | InvertibilityClass::PositiveAndNegative
            ),
            Sign::Negative => matches!(
                self,
                InvertibilityClass::Negative | InvertibilityClass::PositiveAndNegative
            ),
        }
    }
}

impl fmt::Display for InvertibilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A signature together with the connected components of the sign-constraint
/// graph. Flipping any union of components gives another valid signature,
/// and every valid signature arises this way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignSolution {
    pub signature: Signature,
    /// Component id per 0-based vertex, numbered by lowest member.
    pub component: Vec<usize>,
    pub component_count: usize,
}

impl SignSolution {
    /// Signature with the components whose bit is set in `flips` negated.
    pub fn flipped(&self, flips: &[bool]) -> Signature {
        Signature(
            self.signature
                .0
                .iter()
                .zip(&self.component)
                .map(|(&d, &c)| if flips[c] { -d } else { d })
                .collect(),
        )
    }
}

/// Signature making `D M D` match `target`, if one exists.
///
/// Diagonal entries are unaffected by `D` and must already have the target
/// sign. Each nonzero off-diagonal `m_ij` forces `d_i d_j`, which is a
/// 2-colouring problem on the graph of nonzero entries. Within each
/// component the orientation with fewer `-1` entries is returned; on a tie
/// the component's lowest vertex gets `-1`.
pub fn solve_signature(m: &IntMatrix, target: SignTarget) -> Result<Option<SignSolution>> {
    if !m.is_symmetric() {
        return Err(InvertError::NotSymmetric);
    }
    let n = m.rows();
    if (0..n).any(|i| !target.accepts(&m[(i, i)])) {
        return Ok(None);
    }
    let want = target.unit();
    let mut sign: Vec<i8> = vec![0; n];
    let mut component = vec![usize::MAX; n];
    let mut count = 0;
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = count;
        count += 1;
        component[start] = id;
        sign[start] = 1;
        let mut members = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if v == u || m[(u, v)].is_zero() {
                    continue;
                }
                let entry_sign: i8 = if m[(u, v)].is_positive() { 1 } else { -1 };
                // d_u * d_v * sign(m_uv) must equal the target sign.
                let required = want * entry_sign * sign[u];
                if component[v] == usize::MAX {
                    component[v] = id;
                    sign[v] = required;
                    members.push(v);
                    queue.push_back(v);
                } else if sign[v] != required {
                    return Ok(None);
                }
            }
        }
        let minus = members.iter().filter(|&&v| sign[v] == -1).count();
        let plus = members.len() - minus;
        if minus > plus || (minus == plus && sign[start] == 1) {
            for &v in &members {
                sign[v] = -sign[v];
            }
        }
    }
    Ok(Some(SignSolution {
        signature: Signature(sign),
        component,
        component_count: count,
    }))
}

pub fn find_signature(m: &IntMatrix, target: SignTarget) -> Result<Option<Signature>> {
    Ok(solve_signature(m, target)?.map(|s| s.signature))
}

/// Does `D M D` have the target sign everywhere?
pub fn verify_signature(m: &IntMatrix, d: &Signature, target: SignTarget) -> bool {
    d.len() == m.rows() && d.conjugate(m).iter().all(|v| target.accepts(v))
}

/// Everything `classify` learns about a graph.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub class: InvertibilityClass,
    pub det: BigInt,
    pub inverse: Option<ExactInverse>,
    pub positive: Option<SignSolution>,
    pub negative: Option<SignSolution>,
}

impl Analysis {
    pub fn integral_inverse(&self) -> Option<IntMatrix> {
        self.inverse.as_ref().and_then(ExactInverse::integral)
    }

    pub fn solution(&self, sign: Sign) -> Option<&SignSolution> {
        match sign {
            Sign::Positive => self.positive.as_ref(),
            Sign::Negative => self.negative.as_ref(),
        }
    }
}

/// Classifies an adjacency-like symmetric integer matrix.
pub fn analyze_matrix(a: &IntMatrix) -> Result<Analysis> {
    if !a.is_symmetric() {
        return Err(InvertError::NotSymmetric);
    }
    let det = exact::det(a).expect("symmetric matrices are square");
    if det.is_zero() {
        return Ok(Analysis {
            class: InvertibilityClass::Singular,
            det,
            inverse: None,
            positive: None,
            negative: None,
        });
    }
    let inverse = exact::inverse_exact(a).expect("nonzero determinant");
    if det.abs() != BigInt::one() {
        return Ok(Analysis {
            class: InvertibilityClass::NonIntegralInvertible,
            det,
            inverse: Some(inverse),
            positive: None,
            negative: None,
        });
    }
    let inv = inverse.integral().expect("unimodular matrix has integral inverse");
    let positive = solve_signature(&inv, SignTarget::Nonnegative)?;
    let negative = solve_signature(&inv, SignTarget::Nonpositive)?;
    let class = match (positive.is_some(), negative.is_some()) {
        (true, true) => InvertibilityClass::PositiveAndNegative,
        (true, false) => InvertibilityClass::Positive,
        (false, true) => InvertibilityClass::Negative,
        (false, false) => InvertibilityClass::IntegralOnly,
    };
    Ok(Analysis {
        class,
        det,
        inverse: Some(inverse),
        positive,
        negative,
    })
}

pub fn analyze(g: &Graph) -> Analysis {
    analyze_matrix(&g.adjacency()).expect("graph adjacency is symmetric")
}

pub fn classify(g: &Graph) -> InvertibilityClass {
    analyze(g).class
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseGraphResult {
    /// Multigraph (possibly with loops) of the signed inverse.
    pub inverse_graph: Graph,
    pub signature: Signature,
    pub sign: Sign,
}

/// Inverse graph of the requested sign.
pub fn inverse_graph_with_sign(g: &Graph, sign: Sign) -> Result<InverseGraphResult> {
    let analysis = analyze(g);
    let solution = analysis
        .solution(sign)
        .ok_or(InvertError::NotSignable(analysis.class))?;
    let inv = analysis.integral_inverse().expect("signable implies integral");
    let mut signed = solution.signature.conjugate(&inv);
    if sign == Sign::Negative {
        signed = signed.scale(&BigInt::from(-1));
    }
    Ok(InverseGraphResult {
        inverse_graph: Graph::from_adjacency(&signed)?,
        signature: solution.signature.clone(),
        sign,
    })
}

/// Inverse graph, positive when both signs are available.
pub fn inverse_graph(g: &Graph) -> Result<InverseGraphResult> {
    let class = classify(g);
    let sign = if class.allows(Sign::Positive) {
        Sign::Positive
    } else if class.allows(Sign::Negative) {
        Sign::Negative
    } else {
        return Err(InvertError::NotSignable(class));
    };
    inverse_graph_with_sign(g, sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::canonical_key;

    fn fulvene() -> Graph {
        Graph::from_simple_edges(6, &[(1, 2), (2, 3), (3, 4), (4, 5), (1, 5), (4, 6)]).unwrap()
    }

    fn fulvene_inverse() -> IntMatrix {
        IntMatrix::from_i64(
            6,
            6,
            &[
                0, 0, 0, 0, 1, -1, //
                0, 0, 1, 0, 0, -1, //
                0, 1, 0, 0, -1, 1, //
                0, 0, 0, 0, 0, 1, //
                1, 0, -1, 0, 0, 1, //
                -1, -1, 1, 1, 1, -2,
            ],
        )
        .unwrap()
    }

    fn brute_force(m: &IntMatrix, target: SignTarget) -> Vec<Signature> {
        let n = m.rows();
        (0..1u32 << n)
            .map(|bits| Signature((0..n).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect()))
            .filter(|d| verify_signature(m, d, target))
            .collect()
    }

    #[test]
    fn fulvene_signature_is_the_published_one() {
        let d = find_signature(&fulvene_inverse(), SignTarget::Nonpositive).unwrap().unwrap();
        assert_eq!(d.entries(), &[-1, -1, 1, 1, 1, -1]);
        assert!(verify_signature(&fulvene_inverse(), &d, SignTarget::Nonpositive));
        // the diagonal entry -2 rules out the nonnegative target outright
        assert_eq!(find_signature(&fulvene_inverse(), SignTarget::Nonnegative).unwrap(), None);
    }

    #[test]
    fn nonnegative_matrix_gets_all_ones() {
        let m = IntMatrix::from_i64(3, 3, &[0, 1, 2, 1, 0, 1, 2, 1, 0]).unwrap();
        let d = find_signature(&m, SignTarget::Nonnegative).unwrap().unwrap();
        assert_eq!(d, Signature::all_ones(3));
    }

    #[test]
    fn diagonal_obstruction() {
        let m = IntMatrix::from_i64(2, 2, &[1, 1, 1, 0]).unwrap();
        assert_eq!(find_signature(&m, SignTarget::Nonpositive).unwrap(), None);
    }

    #[test]
    fn not_symmetric_is_an_error() {
        let m = IntMatrix::from_i64(2, 2, &[0, 1, 0, 0]).unwrap();
        assert_eq!(find_signature(&m, SignTarget::Nonnegative), Err(InvertError::NotSymmetric));
    }

    #[test]
    fn signature_validation() {
        assert_eq!(Signature::new(vec![1, 0]), Err(InvertError::BadSignature));
        let d = Signature::new(vec![1, -1]).unwrap();
        assert_eq!(d.to_string(), "diag(1,-1)");
        let dd = d.as_matrix().multiply(&d.as_matrix()).unwrap();
        assert_eq!(dd, IntMatrix::identity(2));
    }

    #[test]
    fn classes() {
        assert_eq!(classify(&fulvene()), InvertibilityClass::Negative);
        let k2 = Graph::from_simple_edges(2, &[(1, 2)]).unwrap();
        assert_eq!(classify(&k2), InvertibilityClass::PositiveAndNegative);
        let triangle = Graph::from_simple_edges(3, &[(1, 2), (2, 3), (1, 3)]).unwrap();
        // det 2
        assert_eq!(classify(&triangle), InvertibilityClass::NonIntegralInvertible);
        let p3 = Graph::from_simple_edges(3, &[(1, 2), (2, 3)]).unwrap();
        assert_eq!(classify(&p3), InvertibilityClass::Singular);
    }

    #[test]
    fn k2_is_self_inverse() {
        let k2 = Graph::from_simple_edges(2, &[(1, 2)]).unwrap();
        let inv = inverse_graph(&k2).unwrap();
        assert_eq!(inv.sign, Sign::Positive);
        assert_eq!(inv.inverse_graph, k2);
    }

    #[test]
    fn fulvene_negative_inverse_has_double_loop() {
        let inv = inverse_graph(&fulvene()).unwrap();
        assert_eq!(inv.sign, Sign::Negative);
        assert_eq!(inv.signature.entries(), &[-1, -1, 1, 1, 1, -1]);
        let h = &inv.inverse_graph;
        assert_eq!(h.entry(5, 5), 2);
        let expected = inv
            .signature
            .conjugate(&fulvene_inverse())
            .scale(&BigInt::from(-1));
        assert_eq!(h.adjacency(), expected);
        assert!(matches!(
            inverse_graph_with_sign(&fulvene(), Sign::Positive),
            Err(InvertError::NotSignable(InvertibilityClass::Negative))
        ));
    }

    #[test]
    fn path_example_positive_inverse() {
        let ga = Graph::from_simple_edges(4, &[(1, 2), (2, 3), (1, 4)]).unwrap();
        let inv = inverse_graph(&ga).unwrap();
        assert_eq!(inv.sign, Sign::Positive);
        assert_eq!(inv.signature.entries(), &[-1, 1, 1, -1]);
        let a_inv = IntMatrix::from_i64(4, 4, &[0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, -1, 1, 0, -1, 0]).unwrap();
        assert_eq!(inv.inverse_graph.adjacency(), a_inv.map(|x| num_traits::abs(x.clone())));
        let neg = inverse_graph_with_sign(&ga, Sign::Negative).unwrap();
        assert_eq!(neg.signature.entries(), &[-1, -1, 1, 1]);
    }

    #[test]
    fn double_inverse_returns_the_graph() {
        for g in [
            Graph::from_simple_edges(4, &[(1, 2), (2, 3), (1, 4)]).unwrap(),
            fulvene(),
            Graph::from_simple_edges(2, &[(1, 2)]).unwrap(),
        ] {
            let once = inverse_graph(&g).unwrap();
            let twice = inverse_graph_with_sign(&once.inverse_graph, once.sign).unwrap();
            assert_eq!(
                canonical_key(&twice.inverse_graph).unwrap(),
                canonical_key(&g).unwrap()
            );
        }
    }

    #[test]
    fn solver_agrees_with_brute_force_on_fulvene() {
        for target in [SignTarget::Nonnegative, SignTarget::Nonpositive] {
            let all = brute_force(&fulvene_inverse(), target);
            let found = find_signature(&fulvene_inverse(), target).unwrap();
            assert_eq!(found.is_some(), !all.is_empty());
            if let Some(d) = found {
                assert!(all.contains(&d));
            }
        }
    }

    #[test]
    fn flips_enumerate_every_solution() {
        // two disconnected blocks: 2 components, 4 solutions
        let m = IntMatrix::from_i64(4, 4, &[0, -1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0]).unwrap();
        let sol = solve_signature(&m, SignTarget::Nonnegative).unwrap().unwrap();
        assert_eq!(sol.component_count, 2);
        let mut all: Vec<Signature> = (0..4)
            .map(|bits| sol.flipped(&[bits & 1 == 1, bits & 2 == 2]))
            .collect();
        all.sort_by(|a, b| a.entries().cmp(b.entries()));
        let mut brute = brute_force(&m, SignTarget::Nonnegative);
        brute.sort_by(|a, b| a.entries().cmp(b.entries()));
        assert_eq!(all, brute);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn symmetric(max_n: usize) -> impl Strategy<Value = IntMatrix> {
            (1..=max_n).prop_flat_map(|n| {
                proptest::collection::vec(-2i64..=2, n * n).prop_map(move |v| {
                    IntMatrix::from_fn(n, n, |i, j| {
                        let (a, b) = if i <= j { (i, j) } else { (j, i) };
                        BigInt::from(v[a * n + b])
                    })
                })
            })
        }

        proptest! {
            #[test]
            fn solver_matches_exhaustive_search(m in symmetric(7)) {
                for target in [SignTarget::Nonnegative, SignTarget::Nonpositive] {
                    let brute = brute_force(&m, target);
                    let found = find_signature(&m, target).unwrap();
                    prop_assert_eq!(found.is_some(), !brute.is_empty());
                    if let Some(d) = found {
                        prop_assert!(verify_signature(&m, &d, target));
                    }
                }
            }
        }
    }
}
