//! Per-type token statistics.
//!
//! The first stage counts, for every `(type, token)` pair, how many distinct
//! instances of the type contain the token. The second stage consolidates each
//! type's counts into a [`TypeTokenProfile`], applying the two skew filters:
//! a minimum count, then a per-type cap on the number of tokens kept.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::InstanceRecord;

pub const DEFAULT_MIN_TOKEN_COUNT: u64 = 5;
pub const DEFAULT_MAX_TOKENS_PER_TYPE: usize = 30_000;

/// Splits on every non-alphanumeric character and lowercases.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// The set of tokens of an instance; repeated tokens count once.
pub fn tokenize_instance(record: &InstanceRecord) -> BTreeSet<String> {
    record.value_fields.iter().flat_map(|v| tokenize(v)).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeCounts {
    pub instances: u64,
    pub tokens: HashMap<String, u64>,
}

/// Output of the counting stage. Partial counts form a commutative monoid
/// under [`TypeTokenCounts::merge`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeTokenCounts {
    types: BTreeMap<String, TypeCounts>,
}

impl TypeTokenCounts {
    pub fn add_record(&mut self, record: &InstanceRecord) {
        if record.types.is_empty() {
            return;
        }
        let tokens = tokenize_instance(record);
        for ty in &record.types {
            let entry = self.types.entry(ty.clone()).or_default();
            entry.instances += 1;
            for tok in &tokens {
                *entry.tokens.entry(tok.clone()).or_insert(0) += 1;
            }
        }
    }

    /// Adds one `(type, token)` observation `count` times.
    pub fn add(&mut self, ty: &str, token: &str, count: u64) {
        let entry = self.types.entry(ty.to_string()).or_default();
        *entry.tokens.entry(token.to_string()).or_insert(0) += count;
    }

    pub fn merge(mut self, other: TypeTokenCounts) -> TypeTokenCounts {
        for (ty, counts) in other.types {
            match self.types.get_mut(&ty) {
                None => {
                    self.types.insert(ty, counts);
                }
                Some(mine) => {
                    mine.instances += counts.instances;
                    for (tok, c) in counts.tokens {
                        *mine.tokens.entry(tok).or_insert(0) += c;
                    }
                }
            }
        }
        self
    }

    pub fn get(&self, ty: &str, token: &str) -> u64 {
        self.types
            .get(ty)
            .and_then(|t| t.tokens.get(token))
            .copied()
            .unwrap_or(0)
    }

    pub fn types(&self) -> impl Iterator<Item = (&str, &TypeCounts)> {
        self.types.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Number of distinct `(type, token)` entries.
    pub fn len(&self) -> usize {
        self.types.values().map(|t| t.tokens.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All entries sorted by `(type, token)`.
    pub fn entries(&self) -> Vec<(&str, &str, u64)> {
        let mut out: Vec<_> = self
            .types
            .iter()
            .flat_map(|(ty, tc)| tc.tokens.iter().map(move |(tok, &c)| (ty.as_str(), tok.as_str(), c)))
            .collect();
        out.sort_unstable();
        out
    }
}

/// Counts over `shards` contiguous shards in parallel and merges the partials.
pub fn count_type_tokens_sharded(records: &[InstanceRecord], shards: usize) -> TypeTokenCounts {
    let size = records.len().div_ceil(shards.max(1)).max(1);
    records
        .par_chunks(size)
        .map(|chunk| {
            let mut partial = TypeTokenCounts::default();
            for r in chunk {
                partial.add_record(r);
            }
            partial
        })
        .reduce(TypeTokenCounts::default, TypeTokenCounts::merge)
}

/// Shards by the size of the current rayon pool.
pub fn count_type_tokens(records: &[InstanceRecord]) -> TypeTokenCounts {
    count_type_tokens_sharded(records, rayon::current_num_threads())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkewLimits {
    pub min_token_count: u64,
    pub max_tokens_per_type: usize,
}

impl Default for SkewLimits {
    fn default() -> Self {
        SkewLimits {
            min_token_count: DEFAULT_MIN_TOKEN_COUNT,
            max_tokens_per_type: DEFAULT_MAX_TOKENS_PER_TYPE,
        }
    }
}

impl SkewLimits {
    pub fn new(min_token_count: u64, max_tokens_per_type: usize) -> Result<Self> {
        if min_token_count < 1 {
            return Err(Error::Config("min_token_count must be at least 1".into()));
        }
        if max_tokens_per_type < 1 {
            return Err(Error::Config("max_tokens_per_type must be at least 1".into()));
        }
        Ok(SkewLimits {
            min_token_count,
            max_tokens_per_type,
        })
    }
}

/// A type and its consolidated token counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeTokenProfile {
    pub type_iri: String,
    pub tokens: BTreeMap<String, u64>,
    /// Known when built from records; not stored in the profile file.
    pub instance_count: Option<u64>,
}

impl TypeTokenProfile {
    pub fn new(type_iri: impl Into<String>, tokens: impl IntoIterator<Item = (String, u64)>) -> Self {
        TypeTokenProfile {
            type_iri: type_iri.into(),
            tokens: tokens.into_iter().collect(),
            instance_count: None,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens by descending count, ties in lexicographic order.
    pub fn ranked_tokens(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<_> = self.tokens.iter().map(|(t, &c)| (t.as_str(), c)).collect();
        v.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }
}

fn consolidate_one(ty: &str, counts: &TypeCounts, limits: SkewLimits) -> Option<TypeTokenProfile> {
    let mut kept: Vec<(&String, u64)> = counts
        .tokens
        .iter()
        .filter(|(_, &c)| c >= limits.min_token_count)
        .map(|(t, &c)| (t, c))
        .collect();
    if kept.is_empty() {
        return None;
    }
    if kept.len() > limits.max_tokens_per_type {
        kept.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        kept.truncate(limits.max_tokens_per_type);
    }
    Some(TypeTokenProfile {
        type_iri: ty.to_string(),
        tokens: kept.into_iter().map(|(t, c)| (t.clone(), c)).collect(),
        instance_count: Some(counts.instances),
    })
}

/// Drops tokens below the minimum count, then keeps at most the cap per type
/// (highest counts first). Types left without tokens are omitted.
pub fn consolidate_profiles(counts: &TypeTokenCounts, limits: SkewLimits) -> ProfileSet {
    let types: Vec<_> = counts.types.iter().collect();
    let profiles = types
        .par_iter()
        .filter_map(|(ty, tc)| consolidate_one(ty, tc, limits))
        .collect();
    ProfileSet { profiles }
}

/// Profiles of one graph, sorted by type IRI.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProfileSet {
    profiles: Vec<TypeTokenProfile>,
}

fn escape_token(tok: &str, out: &mut String) {
    for c in tok.chars() {
        match c {
            '%' => out.push_str("%25"),
            ':' => out.push_str("%3A"),
            '\t' => out.push_str("%09"),
            '\n' => out.push_str("%0A"),
            '\r' => out.push_str("%0D"),
            c => out.push(c),
        }
    }
}

fn unescape_token(s: &str) -> std::result::Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(i) = rest.find('%') {
        out.push_str(&rest[..i]);
        let code = rest
            .get(i + 1..i + 3)
            .ok_or_else(|| format!("truncated escape in token {s:?}"))?;
        let byte = u8::from_str_radix(code, 16).map_err(|_| format!("bad escape %{code} in token {s:?}"))?;
        out.push(byte as char);
        rest = &rest[i + 3..];
    }
    out.push_str(rest);
    Ok(out)
}

impl ProfileSet {
    /// Sorts and checks type uniqueness and non-emptiness.
    pub fn new(mut profiles: Vec<TypeTokenProfile>) -> Result<Self> {
        profiles.sort_by(|a, b| a.type_iri.cmp(&b.type_iri));
        if let Some(w) = profiles.windows(2).find(|w| w[0].type_iri == w[1].type_iri) {
            return Err(Error::Config(format!("duplicate profile for type {}", w[0].type_iri)));
        }
        if let Some(p) = profiles.iter().find(|p| p.is_empty()) {
            return Err(Error::Config(format!("profile for type {} has no tokens", p.type_iri)));
        }
        Ok(ProfileSet { profiles })
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TypeTokenProfile> {
        self.profiles.iter()
    }

    pub fn as_slice(&self) -> &[TypeTokenProfile] {
        &self.profiles
    }

    pub fn get(&self, type_iri: &str) -> Option<&TypeTokenProfile> {
        self.profiles
            .binary_search_by(|p| p.type_iri.as_str().cmp(type_iri))
            .ok()
            .map(|i| &self.profiles[i])
    }

    /// Total `(type, token)` entries.
    pub fn entry_count(&self) -> usize {
        self.profiles.iter().map(TypeTokenProfile::len).sum()
    }

    /// One line per type: `type \t token:count \t ...`, tokens in ranked order.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut line = String::new();
        for p in &self.profiles {
            line.clear();
            line.push_str(&p.type_iri);
            for (tok, count) in p.ranked_tokens() {
                line.push('\t');
                escape_token(tok, &mut line);
                write!(line, ":{count}").unwrap();
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        w.flush()
    }

    pub fn to_tsv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("profiles are UTF-8")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_tsv(std::io::BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }

    pub fn read_tsv<R: BufRead>(reader: R, path: &Path) -> Result<Self> {
        let mut profiles = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let ty = fields.next().unwrap_or_default();
            if ty.is_empty() {
                return Err(Error::format(path, lineno, "empty type IRI"));
            }
            let mut tokens = BTreeMap::new();
            for field in fields {
                let (tok, count) = field
                    .rsplit_once(':')
                    .ok_or_else(|| Error::format(path, lineno, format!("expected token:count, got {field:?}")))?;
                let count: u64 = count
                    .parse()
                    .map_err(|_| Error::format(path, lineno, format!("invalid count in {field:?}")))?;
                let tok = unescape_token(tok).map_err(|m| Error::format(path, lineno, m))?;
                if tokens.insert(tok, count).is_some() {
                    return Err(Error::format(path, lineno, format!("duplicate token in {field:?}")));
                }
            }
            if tokens.is_empty() {
                return Err(Error::format(path, lineno, format!("type {ty} has no tokens")));
            }
            profiles.push(TypeTokenProfile {
                type_iri: ty.to_string(),
                tokens,
                instance_count: None,
            });
        }
        ProfileSet::new(profiles).map_err(|e| match e {
            Error::Config(m) => Error::format(path, 0, m),
            other => other,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_tsv(BufReader::new(file), path)
    }
}

impl<'a> IntoIterator for &'a ProfileSet {
    type Item = &'a TypeTokenProfile;
    type IntoIter = std::slice::Iter<'a, TypeTokenProfile>;

    fn into_iter(self) -> Self::IntoIter {
        self.profiles.iter()
    }
}

pub const HISTOGRAM_BUCKETS: usize = 10;

/// Distribution of token type-frequencies: the fraction of a graph's types
/// whose profile contains the token.
///
/// Bucket 0 covers `[0.0, 0.1]`; bucket `i > 0` covers `(i/10, (i+1)/10]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyHistogram {
    pub buckets: [u64; HISTOGRAM_BUCKETS],
    pub type_count: usize,
}

impl FrequencyHistogram {
    pub fn total(&self) -> u64 {
        self.buckets.iter().sum()
    }

    pub fn bucket_bounds(i: usize) -> (f64, f64) {
        (i as f64 / 10.0, (i + 1) as f64 / 10.0)
    }

    /// Bucket for a token appearing in `containing` of `types` types.
    pub fn bucket_of(containing: usize, types: usize) -> usize {
        // ceil(10 * c / n) - 1, exact in integers.
        let scaled = (HISTOGRAM_BUCKETS * containing).div_ceil(types);
        scaled.clamp(1, HISTOGRAM_BUCKETS) - 1
    }

    pub fn label(i: usize) -> String {
        let (lo, hi) = Self::bucket_bounds(i);
        let open = if i == 0 { '[' } else { '(' };
        format!("{open}{lo:.1},{hi:.1}]")
    }
}

pub fn frequency_histogram(profiles: &ProfileSet) -> Result<FrequencyHistogram> {
    if profiles.is_empty() {
        return Err(Error::NoProfiles);
    }
    let mut containing: HashMap<&str, usize> = HashMap::new();
    for p in profiles {
        for tok in p.tokens.keys() {
            *containing.entry(tok.as_str()).or_insert(0) += 1;
        }
    }
    let mut buckets = [0u64; HISTOGRAM_BUCKETS];
    for &c in containing.values() {
        buckets[FrequencyHistogram::bucket_of(c, profiles.len())] += 1;
    }
    Ok(FrequencyHistogram {
        buckets,
        type_count: profiles.len(),
    })
}
