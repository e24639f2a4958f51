//! Ingestion of N-Triples dumps into a per-subject property table.

mod ntriples;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub use ntriples::{parse_line, parse_ntriples, parse_ntriples_str, ParsedTriples, Term, Triple};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const OWL_SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestConfig {
    pub type_predicate: String,
    pub sameas_predicate: String,
    /// Only type IRIs starting with this prefix are kept.
    pub type_namespace_filter: Option<String>,
    /// When set, sameAs links are oriented so that `left` carries this prefix.
    pub graph_a_prefix: Option<String>,
    pub strict: bool,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            type_predicate: RDF_TYPE.to_string(),
            sameas_predicate: OWL_SAME_AS.to_string(),
            type_namespace_filter: None,
            graph_a_prefix: None,
            strict: false,
        }
    }
}

impl IngestConfig {
    fn accepts_type(&self, iri: &str) -> bool {
        self.type_namespace_filter
            .as_deref()
            .is_none_or(|prefix| iri.starts_with(prefix))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub unique_subjects: u64,
    pub unique_triples: u64,
    pub unique_types: u64,
    pub malformed_lines: u64,
}

impl IngestStats {
    pub const CSV_HEADER: &'static str = "unique_subjects,unique_triples,unique_types,malformed_lines";

    pub fn compute(parsed: &ParsedTriples, config: &IngestConfig) -> Self {
        let triples = &parsed.triples;
        let subjects: HashSet<&str> = triples.iter().map(|t| t.subject.as_str()).collect();
        let unique: HashSet<&Triple> = triples.iter().collect();
        let types: HashSet<&str> = triples
            .iter()
            .filter(|t| t.predicate == config.type_predicate && config.accepts_type(t.object.as_str()))
            .map(|t| t.object.as_str())
            .collect();
        IngestStats {
            unique_subjects: subjects.len() as u64,
            unique_triples: unique.len() as u64,
            unique_types: types.len() as u64,
            malformed_lines: parsed.malformed_lines as u64,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.unique_subjects, self.unique_triples, self.unique_types, self.malformed_lines
        )
    }
}

fn open(path: &Path) -> Result<Box<dyn BufRead>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let gz = path.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("gz"));
    Ok(if gz {
        Box::new(BufReader::new(MultiGzDecoder::new(file)))
    } else {
        Box::new(BufReader::new(file))
    })
}

/// Reads an N-Triples file, transparently decompressing `.gz` inputs.
pub fn read_ntriples_file(path: &Path, strict: bool) -> Result<ParsedTriples> {
    parse_ntriples(open(path)?, strict).map_err(|e| match e {
        Error::Syntax { line, message } => Error::format(path, line, message),
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Concatenates the triples of a type-assertion file and a facts file.
/// Grouping by subject downstream unifies the two halves of each instance.
pub fn merge_sources(type_file: &Path, facts_file: &Path, strict: bool) -> Result<ParsedTriples> {
    read_many(&[type_file, facts_file], strict)
}

pub fn read_many<P: AsRef<Path>>(paths: &[P], strict: bool) -> Result<ParsedTriples> {
    let mut out = ParsedTriples::default();
    for p in paths {
        out.extend(read_ntriples_file(p.as_ref(), strict)?);
    }
    Ok(out)
}

/// One row of the logical property table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceRecord {
    pub subject: String,
    pub types: BTreeSet<String>,
    pub value_fields: Vec<String>,
}

impl InstanceRecord {
    pub fn new(subject: impl Into<String>) -> Self {
        InstanceRecord {
            subject: subject.into(),
            types: BTreeSet::new(),
            value_fields: Vec::new(),
        }
    }

    fn absorb(&mut self, other: InstanceRecord) {
        self.types.extend(other.types);
        self.value_fields.extend(other.value_fields);
    }
}

/// Substring after the last `/` or `#`, ignoring trailing separators.
pub fn local_name(iri: &str) -> &str {
    let trimmed = iri.trim_end_matches(['/', '#']);
    match trimmed.rfind(['/', '#']) {
        Some(i) => &trimmed[i + 1..],
        None => trimmed,
    }
}

/// Records sorted by subject, one per distinct subject.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropertyTable {
    records: Vec<InstanceRecord>,
}

#[derive(Default)]
struct PartialTable(BTreeMap<String, InstanceRecord>);

impl PartialTable {
    fn insert(&mut self, record: InstanceRecord) {
        match self.0.get_mut(&record.subject) {
            Some(existing) => existing.absorb(record),
            None => {
                self.0.insert(record.subject.clone(), record);
            }
        }
    }

    /// Union by subject: types are set-merged, value fields of `other` are
    /// appended.
    fn merge(mut self, other: PartialTable) -> PartialTable {
        for record in other.0.into_values() {
            self.insert(record);
        }
        self
    }

    fn add_triple(&mut self, t: &Triple, config: &IngestConfig) {
        let record = self
            .0
            .entry(t.subject.clone())
            .or_insert_with(|| InstanceRecord::new(&t.subject));
        if t.predicate == config.type_predicate {
            if config.accepts_type(t.object.as_str()) {
                record.types.insert(t.object.as_str().to_string());
            }
            return;
        }
        let value = match &t.object {
            Term::Iri(iri) => local_name(iri),
            Term::Literal(lit) => lit.as_str(),
        };
        record.value_fields.push(value.to_string());
    }
}

impl PropertyTable {
    /// Builds a table from arbitrary records, merging records that share a
    /// subject.
    pub fn from_records(records: impl IntoIterator<Item = InstanceRecord>) -> Self {
        let mut partial = PartialTable::default();
        for r in records {
            partial.insert(r);
        }
        partial.into()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, subject: &str) -> Option<&InstanceRecord> {
        self.records
            .binary_search_by(|r| r.subject.as_str().cmp(subject))
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn records(&self) -> &[InstanceRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<InstanceRecord> {
        self.records
    }
}

impl From<PartialTable> for PropertyTable {
    fn from(p: PartialTable) -> Self {
        PropertyTable {
            records: p.0.into_values().collect(),
        }
    }
}

/// Groups triples by subject. Shards are built on the current rayon pool and
/// merged in input order.
pub fn build_property_table(triples: &[Triple], config: &IngestConfig) -> PropertyTable {
    let shard = triples.len().div_ceil(rayon::current_num_threads().max(1)).max(1);
    triples
        .par_chunks(shard)
        .map(|chunk| {
            let mut table = PartialTable::default();
            for t in chunk {
                table.add_triple(t, config);
            }
            table
        })
        .reduce(PartialTable::default, PartialTable::merge)
        .into()
}

/// Reads the given files and builds their combined property table.
pub fn load_graph<P: AsRef<Path>>(paths: &[P], config: &IngestConfig) -> Result<(PropertyTable, IngestStats)> {
    let parsed = read_many(paths, config.strict)?;
    let stats = IngestStats::compute(&parsed, config);
    let table = build_property_table(&parsed.triples, config);
    Ok((table, stats))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SameAsLink {
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SameAsLinks {
    pub links: BTreeSet<SameAsLink>,
    /// sameAs triples whose object was a literal.
    pub literal_objects: usize,
    /// Links from an IRI to itself.
    pub reflexive: usize,
    pub malformed_lines: usize,
}

impl SameAsLinks {
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }
}

pub fn sameas_from_triples(parsed: &ParsedTriples, config: &IngestConfig) -> Result<SameAsLinks> {
    let mut out = SameAsLinks {
        malformed_lines: parsed.malformed_lines,
        ..Default::default()
    };
    for t in parsed.triples.iter().filter(|t| t.predicate == config.sameas_predicate) {
        let object = match &t.object {
            Term::Iri(iri) => iri,
            Term::Literal(lit) => {
                if config.strict {
                    return Err(Error::Config(format!(
                        "sameAs triple for {} has literal object {lit:?}",
                        t.subject
                    )));
                }
                out.literal_objects += 1;
                continue;
            }
        };
        if *object == t.subject {
            out.reflexive += 1;
            continue;
        }
        let (mut left, mut right) = (t.subject.clone(), object.clone());
        if let Some(prefix) = config.graph_a_prefix.as_deref() {
            if !left.starts_with(prefix) && right.starts_with(prefix) {
                std::mem::swap(&mut left, &mut right);
            }
        }
        out.links.insert(SameAsLink { left, right });
    }
    Ok(out)
}

/// Loads a deduplicated sameAs link set from an N-Triples file.
pub fn load_sameas(path: &Path, config: &IngestConfig) -> Result<SameAsLinks> {
    let parsed = read_ntriples_file(path, config.strict)?;
    sameas_from_triples(&parsed, config).map_err(|e| match e {
        Error::Config(msg) => Error::format(path, 0, msg),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const T1: &str = "http://x/T1";
    const T2: &str = "http://x/T2";

    fn iri(s: &str) -> Term {
        Term::Iri(s.to_string())
    }

    fn lit(s: &str) -> Term {
        Term::Literal(s.to_string())
    }

    #[test]
    fn record_from_type_and_name() {
        let triples = vec![
            Triple::new("http://x/a", RDF_TYPE, iri(T1)),
            Triple::new("http://x/a", "http://x/name", lit("Bob")),
        ];
        let table = build_property_table(&triples, &IngestConfig::default());
        let rec = table.get("http://x/a").unwrap();
        assert_eq!(rec.types, BTreeSet::from([T1.to_string()]));
        assert_eq!(rec.value_fields, vec!["Bob"]);
    }

    #[test]
    fn two_type_triples_union() {
        let triples = vec![
            Triple::new("http://x/a", RDF_TYPE, iri(T1)),
            Triple::new("http://x/a", RDF_TYPE, iri(T2)),
            Triple::new("http://x/a", RDF_TYPE, iri(T2)),
        ];
        let table = build_property_table(&triples, &IngestConfig::default());
        assert_eq!(table.get("http://x/a").unwrap().types.len(), 2);
    }

    #[test]
    fn iri_objects_use_local_name() {
        let triples = vec![Triple::new("http://x/a", "http://x/knows", iri("http://x/Carol_Smith"))];
        let table = build_property_table(&triples, &IngestConfig::default());
        assert_eq!(table.get("http://x/a").unwrap().value_fields, vec!["Carol_Smith"]);
        assert_eq!(local_name("http://x/ns#Thing"), "Thing");
        assert_eq!(local_name("http://x/y/"), "y");
        assert_eq!(local_name("plain"), "plain");
    }

    #[test]
    fn namespace_filter_drops_foreign_types_entirely() {
        let config = IngestConfig {
            type_namespace_filter: Some("http://dbpedia.org/ontology/".into()),
            ..Default::default()
        };
        let triples = vec![
            Triple::new("http://x/a", RDF_TYPE, iri("http://dbpedia.org/ontology/City")),
            Triple::new("http://x/a", RDF_TYPE, iri("http://schema.org/Place")),
        ];
        let table = build_property_table(&triples, &config);
        let rec = table.get("http://x/a").unwrap();
        assert_eq!(rec.types.len(), 1);
        assert!(rec.value_fields.is_empty());
        let stats = IngestStats::compute(
            &ParsedTriples {
                triples,
                malformed_lines: 0,
            },
            &config,
        );
        assert_eq!(stats.unique_types, 1);
    }

    #[test]
    fn stats_counts_distinct() {
        let text = "\
<http://x/a> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://x/T1> .
<http://x/a> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://x/T1> .
<http://x/b> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://x/T2> .
<http://x/b> <http://x/name> \"B\" .
not a triple
";
        let parsed = parse_ntriples_str(text, false).unwrap();
        let stats = IngestStats::compute(&parsed, &IngestConfig::default());
        assert_eq!(
            stats,
            IngestStats {
                unique_subjects: 2,
                unique_triples: 3,
                unique_types: 2,
                malformed_lines: 1
            }
        );
        assert_eq!(stats.csv_row(), "2,3,2,1");
    }

    #[test]
    fn merge_concatenates_files() {
        let dir = tempfile::tempdir().unwrap();
        let types = dir.path().join("types.nt");
        let facts = dir.path().join("facts.nt");
        std::fs::write(
            &types,
            "<http://x/a> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://x/T1> .\n",
        )
        .unwrap();
        std::fs::write(
            &facts,
            "<http://x/a> <http://x/p> \"1\" .\n<http://x/a> <http://x/q> \"2\" .\n",
        )
        .unwrap();
        assert_eq!(merge_sources(&types, &facts, true).unwrap().triples.len(), 3);

        std::fs::write(&types, "").unwrap();
        assert_eq!(merge_sources(&types, &facts, true).unwrap().triples.len(), 2);
        std::fs::write(&facts, "").unwrap();
        assert!(merge_sources(&types, &facts, true).unwrap().triples.is_empty());
    }

    #[test]
    fn gzip_input_detected_by_extension() {
        use std::io::Write;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kg.nt.gz");
        let mut enc = flate2::write::GzEncoder::new(File::create(&path).unwrap(), flate2::Compression::default());
        enc.write_all(b"<http://x/a> <http://x/p> \"v\" .\n").unwrap();
        enc.finish().unwrap();
        assert_eq!(read_ntriples_file(&path, true).unwrap().triples.len(), 1);
    }

    #[test]
    fn strict_file_error_names_path_and_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.nt");
        std::fs::write(&path, "<http://x/a> <http://x/p> \"v\" .\nbroken\n").unwrap();
        let err = read_ntriples_file(&path, true).unwrap_err();
        assert!(matches!(err, Error::Format { line: 2, .. }), "{err}");
        assert!(err.to_string().contains("bad.nt"));
    }

    fn sameas(lines: &str, config: &IngestConfig) -> Result<SameAsLinks> {
        sameas_from_triples(&parse_ntriples_str(lines, false).unwrap(), config)
    }

    #[test]
    fn sameas_dedup_and_empty() {
        let line = "<http://a/1> <http://www.w3.org/2002/07/owl#sameAs> <http://b/1> .\n";
        let config = IngestConfig::default();
        assert_eq!(sameas(line, &config).unwrap().len(), 1);
        assert_eq!(sameas(&line.repeat(2), &config).unwrap().len(), 1);
        assert!(sameas("<http://a/1> <http://x/p> <http://b/1> .\n", &config)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn sameas_orientation_and_literals() {
        let config = IngestConfig {
            graph_a_prefix: Some("http://a/".into()),
            ..Default::default()
        };
        let text = "\
<http://b/1> <http://www.w3.org/2002/07/owl#sameAs> <http://a/1> .
<http://a/2> <http://www.w3.org/2002/07/owl#sameAs> \"oops\" .
<http://a/3> <http://www.w3.org/2002/07/owl#sameAs> <http://a/3> .
";
        let links = sameas(text, &config).unwrap();
        assert_eq!(
            links.links.iter().next().unwrap(),
            &SameAsLink {
                left: "http://a/1".into(),
                right: "http://b/1".into()
            }
        );
        assert_eq!(links.literal_objects, 1);
        assert_eq!(links.reflexive, 1);

        let strict = IngestConfig { strict: true, ..config };
        assert!(sameas(text, &strict).is_err());
    }
}
