//! Connected graphs with a unique perfect matching on 2, 4 and 6 vertices.
//!
//! Each record carries the invertibility class, spectrum and the
//! arbitrarily bridgeable subsets for `k = 1..m/2`. The reference catalogue
//! holds published spectra, classes and per-k subset counts; matching is
//! done on label-invariant data only (spectrum, then counts).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::bridge;
use crate::exact;
use crate::graphs::{self, CanonicalKey, Graph, GraphError};
use crate::invert::{self, InvertibilityClass};
use crate::spectra::{self, round_to, SpectraError, Spectrum};

pub const SUPPORTED_SIZES: [usize; 3] = [2, 4, 6];

/// Per-eigenvalue tolerance when matching against the catalogue.
pub const MATCH_TOL: f64 = 5e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CensusError {
    #[error("census size {0} is not supported (use 2, 4 or 6)")]
    UnsupportedSize(usize),
    #[error("graph {key} matches no reference row (spectrum {spectrum:?})")]
    UnmatchedGraph { key: String, spectrum: Vec<f64> },
    #[error("graph {key} matches several reference rows: {labels:?}")]
    AmbiguousMatch { key: String, labels: Vec<String> },
    #[error("reference row {0} matched by more than one graph")]
    DuplicateMatch(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

pub type Result<T, E = CensusError> = std::result::Result<T, E>;

#[derive(Clone, Debug)]
pub struct CensusRecord {
    /// Canonically labeled.
    pub graph: Graph,
    pub key: CanonicalKey,
    pub class: InvertibilityClass,
    pub det: BigInt,
    pub spectrum: Spectrum,
    /// `k → ` bridgeable `k`-subsets (1-based). Empty without an integral inverse.
    pub bridgeable: BTreeMap<usize, Vec<Vec<usize>>>,
    /// Some edge of the unique perfect matching is a bridge.
    pub kotzig: bool,
}

/// Spectrum in units of 1e-4 plus subset counts per `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint {
    pub spectrum: Vec<i64>,
    pub counts: Vec<usize>,
}

impl CensusRecord {
    pub fn counts(&self) -> Vec<usize> {
        self.bridgeable.values().map(Vec::len).collect()
    }

    pub fn fingerprint(&self) -> Fingerprint {
        Fingerprint {
            spectrum: self
                .spectrum
                .eigenvalues
                .iter()
                .map(|x| (x * 1e4).round() as i64)
                .collect(),
            counts: self.counts(),
        }
    }
}

fn record(graph: Graph, key: CanonicalKey) -> Result<CensusRecord> {
    let analysis = invert::analyze(&graph);
    let det = exact::det(&graph.adjacency()).expect("adjacency is square");
    let spectrum = spectra::spectrum(&graph)?;
    let mut bridgeable = BTreeMap::new();
    if analysis.class.is_integral() {
        for k in 1..=graph.n() / 2 {
            let subsets = bridge::arbitrarily_bridgeable_subsets(&graph, k).expect("integral inverse checked");
            bridgeable.insert(k, subsets);
        }
    }
    Ok(CensusRecord {
        kotzig: graph.has_bridge_in_one_factor(),
        class: analysis.class,
        det,
        spectrum,
        bridgeable,
        graph,
        key,
    })
}

/// All isomorphism classes for `m ∈ {2, 4, 6}`, ordered by canonical key.
pub fn run_census(m: usize) -> Result<Vec<CensusRecord>> {
    if !SUPPORTED_SIZES.contains(&m) {
        return Err(CensusError::UnsupportedSize(m));
    }
    let graphs = graphs::enumerate_connected_simple(m, |g| g.count_one_factors() == 1)?;
    graphs.into_par_iter().map(|(key, g)| record(g, key)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceRow {
    pub label: &'static str,
    pub class: InvertibilityClass,
    pub spectrum: &'static [f64],
    /// Bridgeable subset counts for `k = 1..m/2`; `None` when not applicable.
    pub counts: Option<&'static [usize]>,
}

use InvertibilityClass::{IntegralOnly, Negative, NonIntegralInvertible, Positive, PositiveAndNegative};

macro_rules! row {
    ($label:expr, $class:expr, [$($s:expr),*], $counts:expr) => {
        ReferenceRow { label: $label, class: $class, spectrum: &[$($s),*], counts: $counts }
    };
}

static REFERENCE_2: [ReferenceRow; 1] = [row!("K2", PositiveAndNegative, [-1.0, 1.0], Some(&[2]))];

// Q1 is the path (bipartite). Q2 is the paw: the listing names one
// bridgeable pair, but the automorphism swapping the two degree-2 vertices
// maps it to a second one, so the count is 2.
static REFERENCE_4: [ReferenceRow; 2] = [
    row!("Q1", PositiveAndNegative, [-1.6180, -0.6180, 0.6180, 1.6180], Some(&[4, 3])),
    row!("Q2", Positive, [-1.4812, -1.0, 0.3111, 2.1701], Some(&[3, 2])),
];

static REFERENCE_6: [ReferenceRow; 20] = [
    row!("H1", PositiveAndNegative, [-1.8019, -1.2470, -0.4450, 0.4450, 1.2470, 1.8019], Some(&[6, 9, 4])),
    row!("H2", PositiveAndNegative, [-1.9319, -1.0000, -0.5176, 0.5176, 1.0000, 1.9319], Some(&[6, 10, 5])),
    row!("H3", Positive, [-1.7397, -1.3738, -0.5945, 0.2742, 1.0996, 2.3342], Some(&[5, 7, 3])),
    row!("H4", Positive, [-1.7746, -1.0000, -1.0000, 0.1859, 1.3604, 2.2283], Some(&[4, 5, 2])),
    row!("H5", Negative, [-1.6180, -1.6180, -0.4142, 0.6180, 0.6180, 2.4142], Some(&[6, 9, 4])),
    row!("H6", PositiveAndNegative, [-2.2470, -0.8019, -0.5550, 0.5550, 0.8019, 2.2470], Some(&[6, 10, 4])),
    row!("H7", Positive, [-1.8942, -1.3293, -0.6093, 0.3064, 0.7727, 2.7537], Some(&[5, 7, 3])),
    row!("H8", Positive, [-1.9032, -1.0000, -1.0000, 0.1939, 1.0000, 2.7093], Some(&[4, 5, 2])),
    row!("H9", Positive, [-1.6180, -1.3914, -1.0000, 0.2271, 0.6180, 3.1642], Some(&[4, 5, 2])),
    row!("H10", Negative, [-1.8608, -1.6180, -0.2541, 0.6180, 1.0000, 2.1149], Some(&[5, 7, 3])),
    row!("H11", IntegralOnly, [-1.8241, -1.6180, -0.5482, 0.3285, 0.6180, 3.0437], Some(&[5, 7, 3])),
    row!("H12", Negative, [-2.1420, -1.3053, -0.3848, 0.4669, 0.7661, 2.5991], Some(&[6, 8, 3])),
    row!("H13", Positive, [-1.8563, -1.4780, -0.7248, 0.1967, 0.8481, 3.0143], Some(&[4, 5, 2])),
    row!("H14", Positive, [-1.9202, -1.0000, -0.7510, 0.2914, 1.0000, 2.3799], Some(&[5, 8, 4])),
    row!("H15", Positive, [-1.6783, -1.3198, -1.0000, 0.1397, 1.2297, 2.6287], Some(&[4, 5, 2])),
    row!("H16", Positive, [-2.1364, -1.2061, -0.5406, 0.2611, 1.0825, 2.5395], Some(&[5, 6, 2])),
    row!("H17", Positive, [-1.8619, -1.2827, -1.0000, 0.2512, 0.4897, 3.4037], Some(&[4, 5, 2])),
    row!("H18", Positive, [-1.9032, -1.0000, -1.0000, 0.1939, 1.0000, 2.7093], Some(&[5, 8, 4])),
    row!("H19", NonIntegralInvertible, [-1.7321, -1.0000, -1.0000, -0.4142, 1.7321, 2.4142], None),
    row!("H20", Positive, [-2.3117, -1.0000, -0.6570, 0.3088, 0.7272, 2.9327], Some(&[5, 7, 2])),
];

pub fn reference_rows(m: usize) -> &'static [ReferenceRow] {
    match m {
        2 => &REFERENCE_2,
        4 => &REFERENCE_4,
        6 => &REFERENCE_6,
        _ => &[],
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RowMatch {
    pub label: &'static str,
    /// Index into the census records.
    pub record: usize,
    pub max_spectrum_delta: f64,
    pub class_expected: InvertibilityClass,
    pub class_actual: InvertibilityClass,
    pub counts_expected: Option<Vec<usize>>,
    pub counts_actual: Vec<usize>,
}

impl RowMatch {
    pub fn class_ok(&self) -> bool {
        self.class_expected == self.class_actual
    }

    pub fn counts_ok(&self) -> bool {
        match &self.counts_expected {
            Some(c) => *c == self.counts_actual,
            None => self.counts_actual.is_empty(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    /// In catalogue order.
    pub matches: Vec<RowMatch>,
}

impl TableReport {
    pub fn all_ok(&self) -> bool {
        self.matches.iter().all(|m| m.class_ok() && m.counts_ok())
    }

    pub fn label_of(&self, record: usize) -> Option<&'static str> {
        self.matches.iter().find(|m| m.record == record).map(|m| m.label)
    }
}

fn spectrum_delta(a: &[f64], b: &[f64]) -> Option<f64> {
    (a.len() == b.len()).then(|| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Assigns each record a catalogue label: by spectrum within [`MATCH_TOL`],
/// then by subset counts when several rows share a spectrum.
pub fn match_reference_tables(records: &[CensusRecord]) -> Result<TableReport> {
    let mut by_row: BTreeMap<usize, RowMatch> = BTreeMap::new();
    for (idx, rec) in records.iter().enumerate() {
        let rows = reference_rows(rec.graph.n());
        let counts = rec.counts();
        let mut candidates: Vec<(usize, f64)> = rows
            .iter()
            .enumerate()
            .filter_map(|(i, row)| {
                spectrum_delta(&rec.spectrum.eigenvalues, row.spectrum)
                    .filter(|&d| d <= MATCH_TOL)
                    .map(|d| (i, d))
            })
            .collect();
        if candidates.len() > 1 {
            candidates.retain(|&(i, _)| rows[i].counts.map(<[usize]>::to_vec).unwrap_or_default() == counts);
        }
        let (row_idx, delta) = match candidates.as_slice() {
            [] => {
                return Err(CensusError::UnmatchedGraph {
                    key: rec.key.to_hex(),
                    spectrum: rec.spectrum.rounded(4),
                })
            }
            [one] => *one,
            many => {
                return Err(CensusError::AmbiguousMatch {
                    key: rec.key.to_hex(),
                    labels: many.iter().map(|&(i, _)| rows[i].label.to_string()).collect(),
                })
            }
        };
        let row = &rows[row_idx];
        let m = RowMatch {
            label: row.label,
            record: idx,
            max_spectrum_delta: delta,
            class_expected: row.class,
            class_actual: rec.class,
            counts_expected: row.counts.map(<[usize]>::to_vec),
            counts_actual: counts,
        };
        if by_row.insert(row_idx, m).is_some() {
            return Err(CensusError::DuplicateMatch(row.label.to_string()));
        }
    }
    Ok(TableReport {
        matches: by_row.into_values().collect(),
    })
}

/// Count of records per class.
pub fn class_tally(records: &[CensusRecord]) -> BTreeMap<InvertibilityClass, usize> {
    let mut tally = BTreeMap::new();
    for r in records {
        *tally.entry(r.class).or_insert(0) += 1;
    }
    tally
}

/// Pairs of records whose 4-decimal spectra coincide.
pub fn isospectral_pairs(records: &[CensusRecord]) -> Vec<(usize, usize)> {
    let fps: Vec<Vec<i64>> = records.iter().map(|r| r.fingerprint().spectrum).collect();
    let mut out = Vec::new();
    for i in 0..records.len() {
        for j in i + 1..records.len() {
            if fps[i] == fps[j] {
                out.push((i, j));
            }
        }
    }
    out
}

fn label(report: Option<&TableReport>, idx: usize) -> String {
    report
        .and_then(|r| r.label_of(idx))
        .map_or_else(|| format!("#{}", idx + 1), str::to_string)
}

fn fmt_fixed(x: f64, precision: usize) -> String {
    format!("{:.*}", precision, round_to(x, precision as u32))
}

/// Table with columns label, class, determinant, spectrum, per-k counts.
pub fn table1_tsv(records: &[CensusRecord], precision: usize) -> String {
    let report = match_reference_tables(records).ok();
    let mut out = String::from("label\tclass\tdet\tspectrum\tbridgeable_counts\n");
    for (i, r) in records.iter().enumerate() {
        let spectrum: Vec<String> = r.spectrum.eigenvalues.iter().map(|&x| fmt_fixed(x, precision)).collect();
        let counts: Vec<String> = r.counts().iter().map(usize::to_string).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            label(report.as_ref(), i),
            r.class.as_str(),
            r.det,
            spectrum.join(","),
            if counts.is_empty() { "-".to_string() } else { counts.join("/") }
        ));
    }
    out
}

/// Full record details, including bridgeable subsets under canonical labels.
pub fn records_json(records: &[CensusRecord], precision: usize) -> Value {
    let report = match_reference_tables(records).ok();
    let rows: Vec<Value> = records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let bridgeable: BTreeMap<String, &Vec<Vec<usize>>> =
                r.bridgeable.iter().map(|(k, v)| (k.to_string(), v)).collect();
            json!({
                "label": label(report.as_ref(), i),
                "key": r.key.to_hex(),
                "class": r.class,
                "det": r.det.to_string(),
                "spectrum": r.spectrum.rounded(precision as u32),
                "counts": r.counts(),
                "bridgeable": bridgeable,
                "kotzig": r.kotzig,
                "graph": graphs::io::to_json_value(&r.graph),
            })
        })
        .collect();
    json!({
        "schema": graphs::io::SCHEMA_VERSION,
        "m": records.first().map_or(0, |r| r.graph.n()),
        "records": rows,
    })
}

/// Label used for file names: the catalogue label, or the record position.
pub fn record_labels(records: &[CensusRecord]) -> Vec<String> {
    let report = match_reference_tables(records).ok();
    (0..records.len()).map(|i| label(report.as_ref(), i)).collect()
}
