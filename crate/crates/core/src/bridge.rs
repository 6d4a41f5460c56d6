//! Bridging two graphs by a matching between vertex subsets.
//!
//! `bridge(G_A, G_B, pairs)` joins vertex `a_i` of `G_A` to vertex `b_i` of
//! `G_B` for each pair. Its adjacency is `C = [[A, H], [Hᵀ, B]]` with the 0/1
//! coupling `H = F Eᵀ`. With `P = A⁻¹[a, a]` and `R = B⁻¹[b, b]`, `C` is
//! integrally invertible whenever `A`, `B` are and `PR = 0` or `PR = 2I`.
//! If in addition both graphs are positively (or both negatively)
//! invertible, `PR = 0`, and some valid signatures make `D^A H D^B`
//! nonnegative or nonpositive, the bridged graph keeps that sign.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Num, One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{self, ExactError, IntMatrix, Matrix, RatMatrix};
use crate::graphs::Graph;
use crate::invert::{self, Analysis, InvertibilityClass, Sign, SignSolution, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BridgeError {
    #[error("invalid bridge specification: {0}")]
    InvalidSpec(String),
    #[error("graphs do not share a sign class ({left} vs {right})")]
    SignClassMismatch {
        left: InvertibilityClass,
        right: InvertibilityClass,
    },
    #[error("graph is not integrally invertible (class {0})")]
    NotIntegrallyInvertible(InvertibilityClass),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

pub type Result<T, E = BridgeError> = std::result::Result<T, E>;

/// Ordered bridge pairs `(a_i, b_i)`, 1-based: `a_i` in the first graph, `b_i` in the second.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BridgeSpec {
    pairs: Vec<(usize, usize)>,
}

impl BridgeSpec {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(BridgeError::InvalidSpec("at least one pair is required".into()));
        }
        if pairs.iter().any(|&(a, b)| a == 0 || b == 0) {
            return Err(BridgeError::InvalidSpec("vertex labels are 1-based".into()));
        }
        if !pairs.iter().map(|p| p.0).all_unique() {
            return Err(BridgeError::InvalidSpec("repeated vertex on the left".into()));
        }
        if !pairs.iter().map(|p| p.1).all_unique() {
            return Err(BridgeError::InvalidSpec("repeated vertex on the right".into()));
        }
        Ok(BridgeSpec { pairs })
    }

    /// Pairs `(a_i, i)`: the paper-style "first k vertices of `G_B`" form.
    pub fn onto_first(a: &[usize]) -> Result<Self> {
        Self::new(a.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect())
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn left(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.0 - 1).collect()
    }

    pub fn right(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.1 - 1).collect()
    }

    /// 0-based pairs.
    pub fn zero_based(&self) -> Vec<(usize, usize)> {
        self.pairs.iter().map(|&(a, b)| (a - 1, b - 1)).collect()
    }

    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        if self.k() > n.min(m) {
            return Err(BridgeError::InvalidSpec(format!(
                "{} pairs exceed min({n}, {m})",
                self.k()
            )));
        }
        for &(a, b) in &self.pairs {
            if a > n || b > m {
                return Err(BridgeError::InvalidSpec(format!(
                    "pair {a}:{b} out of range for {n} and {m} vertices"
                )));
            }
        }
        Ok(())
    }

    /// The `n × m` coupling matrix `H`.
    pub fn coupling(&self, n: usize, m: usize) -> IntMatrix {
        let mut h = IntMatrix::zeros(n, m);
        for &(a, b) in &self.pairs {
            h[(a - 1, b - 1)] = BigInt::one();
        }
        h
    }
}

impl FromStr for BridgeSpec {
    type Err = BridgeError;

    /// Parses `"3:1,4:2"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (a, b) = item
                .split_once(':')
                .ok_or_else(|| BridgeError::InvalidSpec(format!("expected a:b, got {item:?}")))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| BridgeError::InvalidSpec(format!("bad vertex {t:?}")))
            };
            pairs.push((parse(a)?, parse(b)?));
        }
        BridgeSpec::new(pairs)
    }
}

impl fmt::Display for BridgeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(a, b)| format!("{a}:{b}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// The bridged graph on `n + m` vertices; `G_B`'s vertices are shifted by `n`.
pub fn bridge(ga: &Graph, gb: &Graph, spec: &BridgeSpec) -> Result<Graph> {
    if ga.n() == 0 || gb.n() == 0 {
        return Err(BridgeError::InvalidSpec("graphs must be nonempty".into()));
    }
    spec.validate(ga.n(), gb.n())?;
    let mut g = ga.disjoint_union(gb);
    for &(a, b) in spec.pairs() {
        g.add_edge(a, ga.n() + b, 1)
            .expect("validated bridge endpoints are distinct and in range");
    }
    Ok(g)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BridgeCondition {
    PrZero,
    PrTwoI,
    None,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PreservedSign {
    Positive,
    Negative,
    Both,
}

impl PreservedSign {
    pub fn includes(self, sign: Sign) -> bool {
        matches!(
            (self, sign),
            (PreservedSign::Both, _)
                | (PreservedSign::Positive, Sign::Positive)
                | (PreservedSign::Negative, Sign::Negative)
        )
    }
}

#[derive(Clone, Debug)]
pub struct BridgeReport {
    pub bridged: Graph,
    /// `A⁻¹` restricted to the bridged vertices of `G_A` (integral inputs only).
    pub p: Option<IntMatrix>,
    /// `B⁻¹` restricted to the bridged vertices of `G_B` (integral inputs only).
    pub r: Option<IntMatrix>,
    pub condition: BridgeCondition,
    pub det: BigInt,
    pub integrally_invertible: bool,
    /// `C⁻¹` by direct exact inversion, when `C` is nonsingular.
    pub inverse: Option<RatMatrix>,
    /// Whether the Schur-complement assembly equals the direct inverse; only
    /// computed when the condition holds.
    pub schur_agrees: Option<bool>,
    pub sign_result: Option<PreservedSign>,
}

/// Evaluates the integral-invertibility conditions for a bridging.
///
/// When either input is not integrally invertible the condition is `None`
/// and only the direct inversion of `C` is reported.
pub fn check_invertibility_conditions(ga: &Graph, gb: &Graph, spec: &BridgeSpec) -> Result<BridgeReport> {
    let bridged = bridge(ga, gb, spec)?;
    let c = bridged.adjacency();
    let direct = exact::inverse_exact(&c);
    let det = exact::det(&c)?;

    let a = invert::analyze(ga);
    let b = invert::analyze(gb);
    let (mut p, mut r, mut condition, mut schur_agrees) = (None, None, BridgeCondition::None, None);
    if let (Some(ainv), Some(binv)) = (a.integral_inverse(), b.integral_inverse()) {
        let (pm, rm) = exact::bridge_blocks(&ainv, &binv, &spec.zero_based())?;
        let pr = pm.multiply(&rm)?;
        condition = if pr.is_zero() {
            BridgeCondition::PrZero
        } else if pr == IntMatrix::identity(spec.k()).scale(&BigInt::from(2)) {
            BridgeCondition::PrTwoI
        } else {
            BridgeCondition::None
        };
        if condition != BridgeCondition::None {
            let h = spec.coupling(ga.n(), gb.n());
            let schur = exact::schur_block_inverse(&ainv, &binv, &h)?;
            schur_agrees = Some(direct.as_ref().map(|d| d.matrix == schur).unwrap_or(false));
        }
        p = Some(pm);
        r = Some(rm);
    }
    let sign_result = sign_preservation_from(&a, &b, ga.n(), gb.n(), spec)
        .ok()
        .flatten()
        .map(|w| w.preserved);
    Ok(BridgeReport {
        bridged,
        p,
        r,
        condition,
        integrally_invertible: det.abs() == BigInt::one(),
        det,
        inverse: direct.ok().map(|d| d.matrix),
        schur_agrees,
        sign_result,
    })
}

/// Signatures certifying a preserved sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignWitness {
    pub sign: Sign,
    pub d_a: Signature,
    pub d_b: Signature,
    /// Signature of the bridged graph: `diag(D^A, ±D^B)`.
    pub d_c: Signature,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignPreservation {
    pub preserved: PreservedSign,
    pub witnesses: Vec<SignWitness>,
}

/// Sign kept by the bridged graph under the sufficient condition, or `None`
/// when the hypotheses fail (which proves nothing about the bridged graph).
pub fn check_sign_preservation(ga: &Graph, gb: &Graph, spec: &BridgeSpec) -> Result<Option<PreservedSign>> {
    Ok(sign_preservation(ga, gb, spec)?.map(|s| s.preserved))
}

pub fn sign_preservation(ga: &Graph, gb: &Graph, spec: &BridgeSpec) -> Result<Option<SignPreservation>> {
    spec.validate(ga.n(), gb.n())?;
    let a = invert::analyze(ga);
    let b = invert::analyze(gb);
    sign_preservation_from(&a, &b, ga.n(), gb.n(), spec)
}

fn sign_preservation_from(
    a: &Analysis,
    b: &Analysis,
    n: usize,
    m: usize,
    spec: &BridgeSpec,
) -> Result<Option<SignPreservation>> {
    spec.validate(n, m)?;
    let shared: Vec<Sign> = [Sign::Positive, Sign::Negative]
        .into_iter()
        .filter(|&s| a.class.allows(s) && b.class.allows(s))
        .collect();
    if shared.is_empty() {
        return Err(BridgeError::SignClassMismatch {
            left: a.class,
            right: b.class,
        });
    }
    let ainv = a.integral_inverse().expect("signable implies integral");
    let binv = b.integral_inverse().expect("signable implies integral");
    let (p, r) = exact::bridge_blocks(&ainv, &binv, &spec.zero_based())?;
    if !p.multiply(&r)?.is_zero() {
        return Ok(None);
    }
    let pairs = spec.zero_based();
    let mut witnesses = Vec::new();
    for sign in shared {
        let (Some(sa), Some(sb)) = (a.solution(sign), b.solution(sign)) else {
            continue;
        };
        if let Some((d_a, d_b, coupling_sign)) = uniform_coupling_signatures(sa, sb, &pairs) {
            // D^A H D^B >= 0 needs -D^B for positive, D^B for negative; flipped when <= 0.
            let sign_unit: i8 = if sign == Sign::Positive { 1 } else { -1 };
            let d_c = if -coupling_sign * sign_unit == 1 {
                d_a.concat(&d_b)
            } else {
                d_a.concat(&d_b.negated())
            };
            witnesses.push(SignWitness { sign, d_a, d_b, d_c });
        }
    }
    let preserved = match (
        witnesses.iter().any(|w| w.sign == Sign::Positive),
        witnesses.iter().any(|w| w.sign == Sign::Negative),
    ) {
        (true, true) => PreservedSign::Both,
        (true, false) => PreservedSign::Positive,
        (false, true) => PreservedSign::Negative,
        (false, false) => return Ok(None),
    };
    Ok(Some(SignPreservation { preserved, witnesses }))
}

/// Finds component flips of the two signature families such that every
/// bridged entry `d^A_a d^B_b` has one common sign `s`. Returns the chosen
/// signatures and `s`.
///
/// Unknowns are one ±1 flip per component on either side, and each pair
/// fixes the product of two of them, so this is a parity 2-colouring.
pub fn uniform_coupling_signatures(
    sa: &SignSolution,
    sb: &SignSolution,
    pairs: &[(usize, usize)],
) -> Option<(Signature, Signature, i8)> {
    let ca = sa.component_count;
    let cb = sb.component_count;
    let base_a = sa.signature.entries();
    let base_b = sb.signature.entries();
    // try the sign the unflipped signatures already give on the first pair
    let first = pairs.first().map_or(1, |&(a, b)| base_a[a] * base_b[b]);
    for s in [first, -first] {
        // nodes 0..ca are A components, ca..ca+cb are B components
        let mut adj: Vec<Vec<(usize, i8)>> = vec![Vec::new(); ca + cb];
        for &(a, b) in pairs {
            let parity = s * base_a[a] * base_b[b];
            let (u, v) = (sa.component[a], ca + sb.component[b]);
            adj[u].push((v, parity));
            adj[v].push((u, parity));
        }
        let mut flip: Vec<Option<i8>> = vec![None; ca + cb];
        let mut ok = true;
        'search: for start in 0..ca + cb {
            if flip[start].is_some() {
                continue;
            }
            flip[start] = Some(1);
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                let fu = flip[u].unwrap_or(1);
                for &(v, parity) in &adj[u] {
                    let want = parity * fu;
                    match flip[v] {
                        None => {
                            flip[v] = Some(want);
                            queue.push_back(v);
                        }
                        Some(f) if f != want => {
                            ok = false;
                            break 'search;
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        if ok {
            let fa: Vec<bool> = (0..ca).map(|c| flip[c] == Some(-1)).collect();
            let fb: Vec<bool> = (0..cb).map(|c| flip[ca + c] == Some(-1)).collect();
            return Some((sa.flipped(&fa), sb.flipped(&fb), s));
        }
    }
    None
}

/// All `k`-subsets `S` (0-based, lexicographic) with `inv[S, S] = 0`.
pub fn zero_block_subsets<T: Clone + Num>(inv: &Matrix<T>, k: usize) -> Vec<Vec<usize>> {
    let n = inv.rows();
    if k == 0 || 2 * k > n {
        return Vec::new();
    }
    // only vertices with a zero diagonal can take part
    let candidates: Vec<usize> = (0..n).filter(|&i| inv[(i, i)].is_zero()).collect();
    candidates
        .into_iter()
        .combinations(k)
        .filter(|s| s.iter().tuple_combinations().all(|(&i, &j)| inv[(i, j)].is_zero()))
        .collect()
}

/// Arbitrarily bridgeable `k`-subsets: 1-based, sorted lexicographically.
/// Requests with `k > n/2` yield an empty list.
pub fn arbitrarily_bridgeable_subsets(g: &Graph, k: usize) -> Result<Vec<Vec<usize>>> {
    let analysis = invert::analyze(g);
    let inv = analysis
        .integral_inverse()
        .ok_or(BridgeError::NotIntegrallyInvertible(analysis.class))?;
    Ok(zero_block_subsets(&inv, k)
        .into_iter()
        .map(|s| s.into_iter().map(|i| i + 1).collect())
        .collect())
}
