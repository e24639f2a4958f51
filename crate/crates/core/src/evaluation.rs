//! Three ways of grading an alignment table.
//!
//! * **GT1**: type pairs covering at least one `sameAs` instance pair, scored
//!   with precision and recall.
//! * **GT2**: the alignment treated as a blocking scheme over the instance pair
//!   space, scored with pairs completeness (PC) and reduction ratio (RR).
//! * **GT3**: manual judgments over each sampled source's top retrievals,
//!   scored with mapping coverage and top-k coverage.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;

use crate::alignment::{AlignmentTable, TypePair};
use crate::error::{Error, Result};
use crate::ingest::{PropertyTable, SameAsLinks};
use crate::similarity::SimilarityMeasure;

/// `2ps/(p+s)`, or 0 when both are 0.
pub fn harmonic_mean(p: f64, s: f64) -> f64 {
    if p + s > 0.0 {
        2.0 * p * s / (p + s)
    } else {
        0.0
    }
}

/// A pair of complementary metrics (precision/recall or PC/RR) and their F.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub primary: f64,
    pub secondary: f64,
    pub f_measure: f64,
}

impl Metrics {
    pub fn new(primary: f64, secondary: f64) -> Self {
        Metrics {
            primary,
            secondary,
            f_measure: harmonic_mean(primary, secondary),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricPoint {
    pub theta: f64,
    pub metrics: Metrics,
}

fn read_pairs(path: &Path, header: (&str, &str)) -> Result<Vec<(String, String)>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = line
            .split_once('\t')
            .ok_or_else(|| Error::format(path, i + 1, "expected two tab-separated columns"))?;
        if b.contains('\t') {
            return Err(Error::format(path, i + 1, "expected two tab-separated columns"));
        }
        if i == 0 && (a, b) == header {
            continue;
        }
        out.push((a.to_string(), b.to_string()));
    }
    Ok(out)
}

fn write_pairs<'a, W: Write>(mut w: W, pairs: impl IntoIterator<Item = &'a TypePair>) -> std::io::Result<()> {
    for (a, b) in pairs {
        writeln!(w, "{a}\t{b}")?;
    }
    w.flush()
}

// ---------------------------------------------------------------------------
// Ground truth 1

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypePairGroundTruth {
    pub pairs: BTreeSet<TypePair>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Gt1Build {
    pub ground_truth: TypePairGroundTruth,
    /// Link endpoints absent from their record set.
    pub missing_subjects: usize,
}

/// Every `types(left) × types(right)` over all links.
pub fn build_gt1(links: &SameAsLinks, records_a: &PropertyTable, records_b: &PropertyTable) -> Gt1Build {
    let mut out = Gt1Build::default();
    for link in &links.links {
        let (a, b) = (records_a.get(&link.left), records_b.get(&link.right));
        out.missing_subjects += usize::from(a.is_none()) + usize::from(b.is_none());
        let (Some(a), Some(b)) = (a, b) else { continue };
        for ta in &a.types {
            for tb in &b.types {
                out.ground_truth.pairs.insert((ta.clone(), tb.clone()));
            }
        }
    }
    if out.ground_truth.pairs.is_empty() {
        log::warn!("ground truth 1 is empty");
    }
    out
}

impl TypePairGroundTruth {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(TypePairGroundTruth {
            pairs: read_pairs(path, ("type_a", "type_b"))?.into_iter().collect(),
        })
    }

    pub fn write_tsv<W: Write>(&self, w: W) -> std::io::Result<()> {
        write_pairs(w, &self.pairs)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_tsv(std::io::BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }
}

/// Precision and recall of the retrieved pairs.
pub fn eval_gt1(retrieved: &BTreeSet<TypePair>, gt: &TypePairGroundTruth) -> Result<Metrics> {
    if gt.pairs.is_empty() {
        return Err(Error::EmptyGroundTruth);
    }
    let tp = retrieved.intersection(&gt.pairs).count() as f64;
    let precision = if retrieved.is_empty() {
        0.0
    } else {
        tp / retrieved.len() as f64
    };
    Ok(Metrics::new(precision, tp / gt.pairs.len() as f64))
}

// ---------------------------------------------------------------------------
// Ground truth 2

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RrMode {
    /// Candidate pairs are deduplicated across overlapping blocks.
    Exact,
    /// Each retrieved pair's block is counted in full.
    #[default]
    LowerBound,
}

impl FromStr for RrMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(RrMode::Exact),
            "lower-bound" | "lower_bound" => Ok(RrMode::LowerBound),
            other => Err(Error::Config(format!(
                "unknown RR mode {other:?} (expected exact or lower-bound)"
            ))),
        }
    }
}

/// One side of the instance space with instances interned to dense ids.
#[derive(Debug, Clone, Default)]
struct Side {
    universe: u64,
    instance_ids: HashMap<String, u32>,
    type_ids: HashMap<String, u32>,
    type_names: Vec<String>,
    /// Sorted, deduplicated instance ids per type.
    extents: Vec<Vec<u32>>,
    /// Type ids per instance id.
    types_of: Vec<Vec<u32>>,
}

impl Side {
    fn new(extents: &BTreeMap<String, BTreeSet<String>>, universe: u64, name: &str) -> Result<Self> {
        let mut side = Side {
            universe,
            ..Default::default()
        };
        for (ty, members) in extents {
            let tid = side.type_names.len() as u32;
            side.type_ids.insert(ty.clone(), tid);
            side.type_names.push(ty.clone());
            let mut ext = Vec::with_capacity(members.len());
            for inst in members {
                let next = side.instance_ids.len() as u32;
                let iid = *side.instance_ids.entry(inst.clone()).or_insert(next);
                if iid as usize == side.types_of.len() {
                    side.types_of.push(Vec::new());
                }
                side.types_of[iid as usize].push(tid);
                ext.push(iid);
            }
            ext.sort_unstable();
            side.extents.push(ext);
        }
        if side.instance_ids.len() as u64 > universe {
            return Err(Error::Config(format!(
                "graph {name}: {} typed instances exceed universe size {universe}",
                side.instance_ids.len()
            )));
        }
        Ok(side)
    }

    fn extent_len(&self, ty: &str) -> u64 {
        self.type_ids
            .get(ty)
            .map_or(0, |&t| self.extents[t as usize].len() as u64)
    }
}

/// The instance-matching ground truth plus the type extents of both graphs.
#[derive(Debug, Clone)]
pub struct InstanceMatchGroundTruth {
    duplicates: BTreeSet<TypePair>,
    a: Side,
    b: Side,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gt2Metrics {
    /// PC as primary, RR as secondary.
    pub metrics: Metrics,
    /// Candidate instance pairs counted for RR (deduplicated in exact mode).
    pub candidate_pairs: u128,
    pub true_positives: u64,
}

fn extents_of(table: &PropertyTable) -> BTreeMap<String, BTreeSet<String>> {
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for r in table.records() {
        for ty in &r.types {
            out.entry(ty.clone()).or_default().insert(r.subject.clone());
        }
    }
    out
}

impl InstanceMatchGroundTruth {
    pub fn new(
        duplicates: BTreeSet<TypePair>,
        extent_a: &BTreeMap<String, BTreeSet<String>>,
        extent_b: &BTreeMap<String, BTreeSet<String>>,
        universe_a: u64,
        universe_b: u64,
    ) -> Result<Self> {
        Ok(InstanceMatchGroundTruth {
            duplicates,
            a: Side::new(extent_a, universe_a, "A")?,
            b: Side::new(extent_b, universe_b, "B")?,
        })
    }

    /// Extents from the property tables; each universe is all subjects of the
    /// graph.
    pub fn from_tables(links: &SameAsLinks, table_a: &PropertyTable, table_b: &PropertyTable) -> Result<Self> {
        let duplicates = links.links.iter().map(|l| (l.left.clone(), l.right.clone())).collect();
        Self::new(
            duplicates,
            &extents_of(table_a),
            &extents_of(table_b),
            table_a.len() as u64,
            table_b.len() as u64,
        )
    }

    pub fn duplicates(&self) -> &BTreeSet<TypePair> {
        &self.duplicates
    }

    pub fn universe(&self) -> (u64, u64) {
        (self.a.universe, self.b.universe)
    }

    /// `|Ω| = |I_A|·|I_B|`.
    pub fn omega(&self) -> u128 {
        self.a.universe as u128 * self.b.universe as u128
    }

    /// Fraction of duplicates whose endpoints both carry a type: the PC of
    /// retrieving every type pair, and an upper bound on any alignment's PC.
    pub fn pc_ceiling(&self) -> f64 {
        if self.duplicates.is_empty() {
            return 0.0;
        }
        let typed = self
            .duplicates
            .iter()
            .filter(|(x, y)| self.a.instance_ids.contains_key(x) && self.b.instance_ids.contains_key(y))
            .count();
        typed as f64 / self.duplicates.len() as f64
    }

    fn retrieved_ids(&self, retrieved: &BTreeSet<TypePair>) -> HashSet<(u32, u32)> {
        retrieved
            .iter()
            .filter_map(|(ta, tb)| Some((*self.a.type_ids.get(ta)?, *self.b.type_ids.get(tb)?)))
            .collect()
    }

    /// `|⋃ extent_a[T_A] × extent_b[T_B]|` without materializing pairs: each
    /// instance of A is grouped by the set of B types it is aligned to, and
    /// each distinct group's B-side union is counted by a sorted merge.
    fn exact_candidates(&self, retrieved: &HashSet<(u32, u32)>) -> u128 {
        let mut aligned: Vec<Vec<u32>> = vec![Vec::new(); self.a.extents.len()];
        for &(ta, tb) in retrieved {
            aligned[ta as usize].push(tb);
        }
        let mut signatures: HashMap<Vec<u32>, u64> = HashMap::new();
        for types in &self.a.types_of {
            let mut sig: Vec<u32> = types
                .iter()
                .flat_map(|&t| aligned[t as usize].iter().copied())
                .collect();
            if sig.is_empty() {
                continue;
            }
            sig.sort_unstable();
            sig.dedup();
            *signatures.entry(sig).or_insert(0) += 1;
        }
        signatures
            .par_iter()
            .map(|(sig, &count)| {
                let union = sig
                    .iter()
                    .map(|&tb| self.b.extents[tb as usize].iter())
                    .kmerge()
                    .dedup()
                    .count();
                count as u128 * union as u128
            })
            .sum()
    }

    fn lower_bound_candidates(&self, retrieved: &BTreeSet<TypePair>) -> u128 {
        retrieved
            .iter()
            .map(|(ta, tb)| self.a.extent_len(ta) as u128 * self.b.extent_len(tb) as u128)
            .sum()
    }

    fn true_positives(&self, retrieved: &HashSet<(u32, u32)>) -> u64 {
        self.duplicates
            .iter()
            .filter(|(x, y)| {
                let (Some(&ia), Some(&ib)) = (self.a.instance_ids.get(x), self.b.instance_ids.get(y)) else {
                    return false;
                };
                let types_b = &self.b.types_of[ib as usize];
                self.a.types_of[ia as usize]
                    .iter()
                    .any(|&ta| types_b.iter().any(|&tb| retrieved.contains(&(ta, tb))))
            })
            .count() as u64
    }
}

/// Pairs completeness and reduction ratio of the retrieved alignment.
pub fn eval_gt2(retrieved: &BTreeSet<TypePair>, gt: &InstanceMatchGroundTruth, mode: RrMode) -> Result<Gt2Metrics> {
    if gt.duplicates.is_empty() {
        return Err(Error::EmptyGroundTruth);
    }
    let omega = gt.omega();
    if omega == 0 {
        return Err(Error::EmptyUniverse);
    }
    let ids = gt.retrieved_ids(retrieved);
    let tp = gt.true_positives(&ids);
    let candidates = match mode {
        RrMode::Exact => gt.exact_candidates(&ids),
        RrMode::LowerBound => gt.lower_bound_candidates(retrieved),
    };
    let pc = tp as f64 / gt.duplicates.len() as f64;
    let rr = (1.0 - candidates as f64 / omega as f64).max(0.0);
    Ok(Gt2Metrics {
        metrics: Metrics::new(pc, rr),
        candidate_pairs: candidates,
        true_positives: tp,
    })
}

// ---------------------------------------------------------------------------
// Ground truth 3

pub const DEFAULT_RETRIEVAL_DEPTH: usize = 10;
pub const DEFAULT_TOP_K: [usize; 3] = [1, 3, 5];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ManualAlignmentGroundTruth {
    accepted: BTreeMap<String, BTreeSet<String>>,
    sampled_sources: Vec<String>,
}

impl ManualAlignmentGroundTruth {
    pub fn new(accepted: BTreeMap<String, BTreeSet<String>>, sampled_sources: Vec<String>) -> Result<Self> {
        let sampled: HashSet<&str> = sampled_sources.iter().map(String::as_str).collect();
        if sampled.len() != sampled_sources.len() {
            return Err(Error::Config("sampled sources contain duplicates".into()));
        }
        if let Some(k) = accepted.keys().find(|k| !sampled.contains(k.as_str())) {
            return Err(Error::Config(format!(
                "accepted source {k} is not among the sampled sources"
            )));
        }
        Ok(ManualAlignmentGroundTruth {
            accepted,
            sampled_sources,
        })
    }

    /// Loads accepted pairs and, optionally, the sampled source list. Without
    /// a list, the sources with at least one accepted target are used.
    pub fn load(pairs_path: &Path, sources_path: Option<&Path>) -> Result<Self> {
        let mut accepted: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (s, t) in read_pairs(pairs_path, ("source_type", "target_type"))? {
            accepted.entry(s).or_default().insert(t);
        }
        let sampled = match sources_path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                text.lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(String::from)
                    .collect()
            }
            None => accepted.keys().cloned().collect(),
        };
        Self::new(accepted, sampled)
    }

    pub fn sampled_sources(&self) -> &[String] {
        &self.sampled_sources
    }

    pub fn accepted(&self, source: &str) -> Option<&BTreeSet<String>> {
        self.accepted.get(source)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gt3Report {
    pub mapping_coverage: f64,
    /// `(k, coverage)` in the order requested.
    pub top_k_coverage: Vec<(usize, f64)>,
    pub covered: usize,
    pub sampled: usize,
    /// Set when no source is covered, so top-k coverages are reported as 0.
    pub undefined_top_k: bool,
}

impl Gt3Report {
    pub fn csv_header(&self) -> String {
        let mut h = String::from("mapping_coverage");
        for (k, _) in &self.top_k_coverage {
            write!(h, ",top{k}").unwrap();
        }
        h
    }

    pub fn csv_row(&self) -> String {
        let mut r = format!("{:.6}", self.mapping_coverage);
        for (_, v) in &self.top_k_coverage {
            write!(r, ",{v:.6}").unwrap();
        }
        r
    }
}

/// Mapping coverage at `depth`, then top-k coverage over the covered sources.
/// A source with several accepted targets in range counts once.
pub fn eval_gt3(
    table: &AlignmentTable,
    measure: SimilarityMeasure,
    gt: &ManualAlignmentGroundTruth,
    k_list: &[usize],
    depth: usize,
) -> Result<Gt3Report> {
    if gt.sampled_sources.is_empty() {
        return Err(Error::EmptyGroundTruth);
    }
    if depth == 0 || k_list.contains(&0) {
        return Err(Error::Config("retrieval depth and every k must be at least 1".into()));
    }
    let max_k = k_list.iter().copied().max().unwrap_or(0).max(depth);
    let empty = BTreeSet::new();
    // Rank of the best accepted target per source, if one is within max_k.
    let mut first_hit: Vec<Option<usize>> = Vec::with_capacity(gt.sampled_sources.len());
    for source in &gt.sampled_sources {
        let accepted = gt.accepted.get(source).unwrap_or(&empty);
        let ranked = table.top_k(source, measure, max_k)?;
        first_hit.push(ranked.iter().position(|(t, _)| accepted.contains(*t)));
    }
    let covered: Vec<usize> = first_hit.iter().flatten().copied().filter(|&r| r < depth).collect();
    let mapping_coverage = covered.len() as f64 / gt.sampled_sources.len() as f64;
    let undefined_top_k = covered.is_empty();
    if undefined_top_k {
        log::warn!("no sampled source is covered at depth {depth}; top-k coverage reported as 0");
    }
    let top_k_coverage = k_list
        .iter()
        .map(|&k| {
            let hits = covered.iter().filter(|&&r| r < k).count();
            let v = if undefined_top_k {
                0.0
            } else {
                hits as f64 / covered.len() as f64
            };
            (k, v)
        })
        .collect();
    Ok(Gt3Report {
        mapping_coverage,
        top_k_coverage,
        covered: covered.len(),
        sampled: gt.sampled_sources.len(),
        undefined_top_k,
    })
}

// ---------------------------------------------------------------------------
// Threshold sweeps

/// `{0.00, 0.01, …, 1.00}`.
pub fn default_thetas() -> Vec<f64> {
    (0..=100).map(|i| i as f64 / 100.0).collect()
}

pub fn parse_thetas(s: &str) -> Result<Vec<f64>> {
    let thetas: Vec<f64> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Error::Config(format!("invalid threshold {p:?}")))
        })
        .collect::<Result<_>>()?;
    validate_thetas(&thetas)?;
    Ok(thetas)
}

fn validate_thetas(thetas: &[f64]) -> Result<()> {
    if thetas.is_empty() {
        return Err(Error::Config("no thresholds given".into()));
    }
    if let Some(t) = thetas.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::Config(format!("threshold {t} outside [0, 1]")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub points: Vec<MetricPoint>,
}

impl Sweep {
    pub const CSV_HEADER: &'static str = "theta,primary,secondary,f";

    /// Highest F; the lowest threshold wins ties.
    pub fn best(&self) -> Option<&MetricPoint> {
        self.points.iter().reduce(|best, p| {
            if p.metrics.f_measure > best.metrics.f_measure {
                p
            } else {
                best
            }
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for p in &self.points {
            writeln!(
                w,
                "{:.6},{:.6},{:.6},{:.6}",
                p.theta, p.metrics.primary, p.metrics.secondary, p.metrics.f_measure
            )?;
        }
        w.flush()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }
}

/// Applies [`AlignmentTable::threshold_filter`] at each threshold and grades
/// the retrieved set with `evaluator`.
pub fn sweep<F>(table: &AlignmentTable, measure: SimilarityMeasure, thetas: &[f64], evaluator: F) -> Result<Sweep>
where
    F: Fn(&BTreeSet<TypePair>) -> Result<Metrics> + Sync,
{
    validate_thetas(thetas)?;
    let points = thetas
        .par_iter()
        .map(|&theta| {
            let retrieved = table.threshold_filter(measure, theta)?;
            Ok(MetricPoint {
                theta,
                metrics: evaluator(&retrieved)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::AlignmentEntry;
    use crate::ingest::{InstanceRecord, SameAsLink};
    use SimilarityMeasure::*;

    fn pair(a: &str, b: &str) -> TypePair {
        (a.to_string(), b.to_string())
    }

    fn pairs(items: &[(&str, &str)]) -> BTreeSet<TypePair> {
        items.iter().map(|(a, b)| pair(a, b)).collect()
    }

    fn table_of(records: &[(&str, &[&str])]) -> PropertyTable {
        PropertyTable::from_records(records.iter().map(|(s, types)| InstanceRecord {
            subject: s.to_string(),
            types: types.iter().map(|t| t.to_string()).collect(),
            value_fields: vec![],
        }))
    }

    fn links(items: &[(&str, &str)]) -> SameAsLinks {
        SameAsLinks {
            links: items
                .iter()
                .map(|(l, r)| SameAsLink {
                    left: l.to_string(),
                    right: r.to_string(),
                })
                .collect(),
            ..Default::default()
        }
    }

    #[test]
    fn f_is_harmonic_mean() {
        assert!((harmonic_mean(0.3236, 0.7417) - 0.4506).abs() < 5e-4);
        assert_eq!(harmonic_mean(0.0, 0.0), 0.0);
        assert_eq!(Metrics::new(0.5, 0.25).f_measure, 1.0 / 3.0);
    }

    #[test]
    fn gt1_cross_product() {
        let a = table_of(&[("i1", &["T1"]), ("i2", &[])]);
        let b = table_of(&[("j1", &["U1", "U2"]), ("j2", &["U1"])]);
        let built = build_gt1(
            &links(&[("i1", "j1"), ("i2", "j2"), ("i1", "j2"), ("zz", "j1")]),
            &a,
            &b,
        );
        assert_eq!(built.ground_truth.pairs, pairs(&[("T1", "U1"), ("T1", "U2")]));
        assert_eq!(built.missing_subjects, 1);
    }

    #[test]
    fn gt1_metrics() {
        let gt = TypePairGroundTruth {
            pairs: pairs(&[("a", "1"), ("b", "2"), ("c", "3"), ("d", "4")]),
        };
        let m = eval_gt1(&gt.pairs, &gt).unwrap();
        assert_eq!((m.primary, m.secondary, m.f_measure), (1.0, 1.0, 1.0));
        let m = eval_gt1(&pairs(&[("x", "y")]), &gt).unwrap();
        assert_eq!((m.primary, m.secondary, m.f_measure), (0.0, 0.0, 0.0));
        let m = eval_gt1(&pairs(&[("a", "1"), ("x", "y")]), &gt).unwrap();
        assert_eq!((m.primary, m.secondary), (0.5, 0.25));
        assert!((m.f_measure - 1.0 / 3.0).abs() < 1e-12);
        assert!(matches!(
            eval_gt1(&gt.pairs, &TypePairGroundTruth::default()),
            Err(Error::EmptyGroundTruth)
        ));
        assert_eq!(eval_gt1(&BTreeSet::new(), &gt).unwrap().primary, 0.0);
    }

    fn extents(items: &[(&str, &[&str])]) -> BTreeMap<String, BTreeSet<String>> {
        items
            .iter()
            .map(|(t, xs)| (t.to_string(), xs.iter().map(|x| x.to_string()).collect()))
            .collect()
    }

    fn small_gt2() -> InstanceMatchGroundTruth {
        InstanceMatchGroundTruth::new(
            pairs(&[("a1", "b1")]),
            &extents(&[("T1", &["a1", "a2"])]),
            &extents(&[("U1", &["b1"]), ("U2", &["b2"])]),
            2,
            2,
        )
        .unwrap()
    }

    #[test]
    fn gt2_worked_example() {
        let gt = small_gt2();
        for mode in [RrMode::Exact, RrMode::LowerBound] {
            let r = eval_gt2(&pairs(&[("T1", "U1")]), &gt, mode).unwrap();
            assert_eq!(r.candidate_pairs, 2);
            assert_eq!(r.metrics.primary, 1.0);
            assert_eq!(r.metrics.secondary, 0.5);
            assert!((r.metrics.f_measure - 2.0 / 3.0).abs() < 1e-12);
        }
        let r = eval_gt2(&BTreeSet::new(), &gt, RrMode::Exact).unwrap();
        assert_eq!(
            (r.metrics.primary, r.metrics.secondary, r.metrics.f_measure),
            (0.0, 1.0, 0.0)
        );
    }

    #[test]
    fn gt2_overlapping_blocks() {
        // a1 is both T1 and T2; aligning both to U1 double-counts (a1, b1).
        let gt = InstanceMatchGroundTruth::new(
            pairs(&[("a1", "b1")]),
            &extents(&[("T1", &["a1", "a2"]), ("T2", &["a1"])]),
            &extents(&[("U1", &["b1", "b2"])]),
            4,
            2,
        )
        .unwrap();
        let r = pairs(&[("T1", "U1"), ("T2", "U1")]);
        let exact = eval_gt2(&r, &gt, RrMode::Exact).unwrap();
        let lower = eval_gt2(&r, &gt, RrMode::LowerBound).unwrap();
        assert_eq!(exact.candidate_pairs, 4);
        assert_eq!(lower.candidate_pairs, 6);
        assert_eq!(exact.metrics.secondary, 0.5);
        assert_eq!(lower.metrics.secondary, 0.25);
    }

    #[test]
    fn gt2_lower_bound_clamps_at_zero() {
        let gt = InstanceMatchGroundTruth::new(
            pairs(&[("a1", "b1")]),
            &extents(&[("T1", &["a1"]), ("T2", &["a1"]), ("T3", &["a1"])]),
            &extents(&[("U1", &["b1"])]),
            1,
            1,
        )
        .unwrap();
        let r = pairs(&[("T1", "U1"), ("T2", "U1"), ("T3", "U1")]);
        assert_eq!(eval_gt2(&r, &gt, RrMode::LowerBound).unwrap().metrics.secondary, 0.0);
    }

    #[test]
    fn gt2_errors_and_ceiling() {
        let empty = InstanceMatchGroundTruth::new(BTreeSet::new(), &extents(&[]), &extents(&[]), 1, 1).unwrap();
        assert!(matches!(
            eval_gt2(&BTreeSet::new(), &empty, RrMode::Exact),
            Err(Error::EmptyGroundTruth)
        ));
        let no_space = InstanceMatchGroundTruth::new(pairs(&[("a", "b")]), &extents(&[]), &extents(&[]), 0, 3).unwrap();
        assert!(matches!(
            eval_gt2(&BTreeSet::new(), &no_space, RrMode::Exact),
            Err(Error::EmptyUniverse)
        ));
        assert!(
            InstanceMatchGroundTruth::new(BTreeSet::new(), &extents(&[("T", &["x", "y"])]), &extents(&[]), 1, 1)
                .is_err()
        );

        let gt = InstanceMatchGroundTruth::new(
            pairs(&[("a1", "b1"), ("a2", "b9")]),
            &extents(&[("T1", &["a1", "a2"])]),
            &extents(&[("U1", &["b1"])]),
            2,
            3,
        )
        .unwrap();
        assert_eq!(gt.pc_ceiling(), 0.5);
    }

    #[test]
    fn gt2_from_tables() {
        let a = table_of(&[("a1", &["T1"]), ("a2", &["T1"]), ("a3", &[])]);
        let b = table_of(&[("b1", &["U1"])]);
        let gt = InstanceMatchGroundTruth::from_tables(&links(&[("a1", "b1")]), &a, &b).unwrap();
        assert_eq!(gt.universe(), (3, 1));
        let r = eval_gt2(&pairs(&[("T1", "U1")]), &gt, RrMode::Exact).unwrap();
        assert_eq!(r.candidate_pairs, 2);
    }

    fn gt3_table() -> AlignmentTable {
        let scores: &[(&str, &[(&str, f64)])] = &[
            ("S1", &[("X", 0.9), ("Y", 0.8), ("Z", 0.1)]),
            ("S2", &[("X", 0.2), ("Y", 0.9), ("Z", 0.5)]),
            ("S3", &[("X", 0.7), ("Y", 0.6), ("Z", 0.8)]),
            ("S4", &[("X", 0.3), ("Y", 0.2), ("Z", 0.1)]),
        ];
        let entries = scores
            .iter()
            .flat_map(|(s, row)| {
                row.iter()
                    .map(move |(t, v)| AlignmentEntry::new(*s, *t).with_score(Jaccard, *v))
            })
            .collect();
        AlignmentTable::new(vec![Jaccard], entries).unwrap()
    }

    fn gt3(accepted: &[(&str, &[&str])]) -> ManualAlignmentGroundTruth {
        ManualAlignmentGroundTruth::new(
            accepted
                .iter()
                .map(|(s, ts)| (s.to_string(), ts.iter().map(|t| t.to_string()).collect()))
                .collect(),
            ["S1", "S2", "S3", "S4"].map(String::from).to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn gt3_coverage() {
        // S1 hit at rank 1, S2 at rank 1, S3 at rank 2, S4 has nothing accepted
        // in range.
        let gt = gt3(&[("S1", &["X", "Y"]), ("S2", &["Y"]), ("S3", &["X"]), ("S4", &["W"])]);
        let r = eval_gt3(&gt3_table(), Jaccard, &gt, &[1, 3, 5], 3).unwrap();
        assert_eq!(r.mapping_coverage, 0.75);
        assert_eq!(r.top_k_coverage[0], (1, 2.0 / 3.0));
        assert_eq!(r.top_k_coverage[1], (3, 1.0));
        assert_eq!(r.csv_header(), "mapping_coverage,top1,top3,top5");
        assert_eq!(r.csv_row(), "0.750000,0.666667,1.000000,1.000000");
    }

    #[test]
    fn gt3_depth_limits_coverage() {
        let gt = gt3(&[("S1", &["Z"])]);
        let r = eval_gt3(&gt3_table(), Jaccard, &gt, &[1], 2).unwrap();
        assert_eq!(r.mapping_coverage, 0.0);
        assert!(r.undefined_top_k);
        assert_eq!(r.top_k_coverage, vec![(1, 0.0)]);
    }

    #[test]
    fn gt3_validation() {
        let bad = ManualAlignmentGroundTruth::new(
            BTreeMap::from([("S9".to_string(), BTreeSet::from(["X".to_string()]))]),
            vec!["S1".into()],
        );
        assert!(bad.is_err());
        let unknown = ManualAlignmentGroundTruth::new(BTreeMap::new(), vec!["S9".into()]).unwrap();
        assert!(matches!(
            eval_gt3(&gt3_table(), Jaccard, &unknown, &[1], 10),
            Err(Error::UnknownType(_))
        ));
    }

    #[test]
    fn sweep_points_and_best() {
        let table = gt3_table();
        let gt = TypePairGroundTruth {
            pairs: pairs(&[("S1", "X"), ("S2", "Y")]),
        };
        let s = sweep(&table, Jaccard, &[0.0, 0.85, 1.0], |r| eval_gt1(r, &gt)).unwrap();
        assert_eq!(s.points.len(), 3);
        assert_eq!(s.points[0].metrics.secondary, 1.0);
        let best = s.best().unwrap();
        assert_eq!(best.theta, 0.85);
        assert_eq!(best.metrics.f_measure, 1.0);
        assert!(sweep(&table, Jaccard, &[], |r| eval_gt1(r, &gt)).is_err());

        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("theta,primary,secondary,f\n0.000000,0.166667,1.000000,0.285714\n"));
    }

    #[test]
    fn thetas() {
        let d = default_thetas();
        assert_eq!(d.len(), 101);
        assert_eq!((d[0], d[50], d[100]), (0.0, 0.5, 1.0));
        assert_eq!(parse_thetas("0.1, 0.5").unwrap(), vec![0.1, 0.5]);
        assert!(parse_thetas("1.5").is_err());
        assert!(parse_thetas("x").is_err());
        assert!("exact".parse::<RrMode>().is_ok() && "lower-bound".parse::<RrMode>().is_ok());
    }
}
