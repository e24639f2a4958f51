//! Exhaustive cross-graph scoring of type pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Write};
use std::ops::Range;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::similarity::{rank_order, SimilarityMeasure};
use crate::stats::ProfileSet;

pub type TypePair = (String, String);

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentEntry {
    pub type_a: String,
    pub type_b: String,
    scores: [Option<f64>; 3],
}

impl AlignmentEntry {
    pub fn new(type_a: impl Into<String>, type_b: impl Into<String>) -> Self {
        AlignmentEntry {
            type_a: type_a.into(),
            type_b: type_b.into(),
            scores: [None; 3],
        }
    }

    pub fn with_score(mut self, measure: SimilarityMeasure, score: f64) -> Self {
        self.scores[measure.index()] = Some(score);
        self
    }

    pub fn score(&self, measure: SimilarityMeasure) -> Option<f64> {
        self.scores[measure.index()]
    }

    pub fn pair(&self) -> TypePair {
        (self.type_a.clone(), self.type_b.clone())
    }
}

/// All scored `(type_a, type_b)` pairs, sorted by `(type_a, type_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentTable {
    measures: Vec<SimilarityMeasure>,
    entries: Vec<AlignmentEntry>,
    by_source: BTreeMap<String, Range<usize>>,
}

/// Scores every pair in `profiles_a × profiles_b` under each measure. Rows are
/// computed on the current rayon pool.
pub fn score_all_pairs(
    profiles_a: &ProfileSet,
    profiles_b: &ProfileSet,
    measures: &[SimilarityMeasure],
) -> Result<AlignmentTable> {
    if profiles_a.is_empty() || profiles_b.is_empty() {
        return Err(Error::NoProfiles);
    }
    let measures = canonical(measures)?;
    let entries: Vec<AlignmentEntry> = profiles_a
        .as_slice()
        .par_iter()
        .flat_map_iter(|a| {
            let measures = &measures;
            profiles_b.iter().map(move |b| {
                measures
                    .iter()
                    .fold(AlignmentEntry::new(&a.type_iri, &b.type_iri), |e, &m| {
                        e.with_score(m, m.score(a, b))
                    })
            })
        })
        .collect();
    AlignmentTable::new(measures, entries)
}

fn canonical(measures: &[SimilarityMeasure]) -> Result<Vec<SimilarityMeasure>> {
    let mut m = measures.to_vec();
    m.sort();
    m.dedup();
    if m.is_empty() {
        return Err(Error::Config("no similarity measures enabled".into()));
    }
    Ok(m)
}

impl AlignmentTable {
    /// Validates that every entry carries exactly the enabled scores, all in
    /// `[0, 1]`, with unique pairs.
    pub fn new(measures: Vec<SimilarityMeasure>, mut entries: Vec<AlignmentEntry>) -> Result<Self> {
        let measures = canonical(&measures)?;
        entries.sort_by(|x, y| (&x.type_a, &x.type_b).cmp(&(&y.type_a, &y.type_b)));
        if let Some(w) = entries
            .windows(2)
            .find(|w| w[0].type_a == w[1].type_a && w[0].type_b == w[1].type_b)
        {
            return Err(Error::Config(format!(
                "duplicate pair ({}, {})",
                w[0].type_a, w[0].type_b
            )));
        }
        for e in &entries {
            for m in SimilarityMeasure::ALL {
                match (measures.contains(&m), e.score(m)) {
                    (true, Some(s)) if (0.0..=1.0).contains(&s) => {}
                    (false, None) => {}
                    (true, Some(s)) => {
                        return Err(Error::Config(format!(
                            "{m} score {s} out of range for ({}, {})",
                            e.type_a, e.type_b
                        )))
                    }
                    (true, None) => {
                        return Err(Error::Config(format!(
                            "missing {m} score for ({}, {})",
                            e.type_a, e.type_b
                        )))
                    }
                    (false, Some(_)) => {
                        return Err(Error::Config(format!(
                            "unexpected {m} score for ({}, {})",
                            e.type_a, e.type_b
                        )))
                    }
                }
            }
        }
        let mut by_source: BTreeMap<String, Range<usize>> = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            by_source
                .entry(e.type_a.clone())
                .and_modify(|r| r.end = i + 1)
                .or_insert(i..i + 1);
        }
        Ok(AlignmentTable {
            measures,
            entries,
            by_source,
        })
    }

    pub fn measures(&self) -> &[SimilarityMeasure] {
        &self.measures
    }

    pub fn entries(&self) -> &[AlignmentEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.by_source.keys().map(String::as_str)
    }

    pub fn targets(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|e| e.type_b.as_str()).collect()
    }

    pub fn get(&self, type_a: &str, type_b: &str) -> Option<&AlignmentEntry> {
        let range = self.by_source.get(type_a)?.clone();
        let row = &self.entries[range];
        row.binary_search_by(|e| e.type_b.as_str().cmp(type_b))
            .ok()
            .map(|i| &row[i])
    }

    fn check_measure(&self, measure: SimilarityMeasure) -> Result<()> {
        if self.measures.contains(&measure) {
            Ok(())
        } else {
            Err(Error::MeasureNotEnabled(measure))
        }
    }

    /// Pairs scoring at least `theta` under `measure`.
    pub fn threshold_filter(&self, measure: SimilarityMeasure, theta: f64) -> Result<BTreeSet<TypePair>> {
        self.check_measure(measure)?;
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::Config(format!("threshold {theta} outside [0, 1]")));
        }
        Ok(self
            .entries
            .iter()
            .filter(|e| e.score(measure).is_some_and(|s| s >= theta))
            .map(AlignmentEntry::pair)
            .collect())
    }

    /// The `k` best targets for `source`, by descending score with ties in
    /// lexicographic target order.
    pub fn top_k(&self, source: &str, measure: SimilarityMeasure, k: usize) -> Result<Vec<(&str, f64)>> {
        self.check_measure(measure)?;
        if k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        let range = self
            .by_source
            .get(source)
            .ok_or_else(|| Error::UnknownType(source.to_string()))?;
        let mut ranked: Vec<(&str, f64)> = self.entries[range.clone()]
            .iter()
            .map(|e| (e.type_b.as_str(), e.score(measure).expect("validated")))
            .collect();
        ranked.sort_by(|x, y| rank_order(*x, *y));
        ranked.truncate(k);
        Ok(ranked)
    }

    pub fn header(&self) -> String {
        let mut h = String::from("type_a\ttype_b");
        for m in &self.measures {
            h.push('\t');
            h.push_str(m.name());
        }
        h
    }

    /// TSV with a header row and six-decimal scores.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", self.header())?;
        for e in &self.entries {
            write!(w, "{}\t{}", e.type_a, e.type_b)?;
            for &m in &self.measures {
                write!(w, "\t{:.6}", e.score(m).expect("validated"))?;
            }
            writeln!(w)?;
        }
        w.flush()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_tsv(std::io::BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }

    pub fn read_tsv<R: BufRead>(reader: R, path: &Path) -> Result<Self> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(l) => l.map_err(|e| Error::io(path, e))?,
            None => return Err(Error::format(path, 1, "missing header")),
        };
        let cols: Vec<&str> = header.split('\t').collect();
        if cols.len() < 3 || cols[0] != "type_a" || cols[1] != "type_b" {
            return Err(Error::format(path, 1, format!("unexpected header {header:?}")));
        }
        let measures: Vec<SimilarityMeasure> = cols[2..]
            .iter()
            .map(|c| c.parse())
            .collect::<Result<_>>()
            .map_err(|e| Error::format(path, 1, e.to_string()))?;
        let mut entries = Vec::new();
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != cols.len() {
                return Err(Error::format(path, lineno, format!("expected {} columns", cols.len())));
            }
            let mut e = AlignmentEntry::new(fields[0], fields[1]);
            for (&m, raw) in measures.iter().zip(&fields[2..]) {
                let s: f64 = raw
                    .parse()
                    .map_err(|_| Error::format(path, lineno, format!("invalid score {raw:?}")))?;
                e = e.with_score(m, s);
            }
            entries.push(e);
        }
        AlignmentTable::new(measures, entries).map_err(|e| match e {
            Error::Config(m) => Error::format(path, 0, m),
            other => other,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_tsv(BufReader::new(file), path)
    }
}
