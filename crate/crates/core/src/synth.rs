//! Two synthetic graphs with planted type alignments.
//!
//! Planted pair `i` pairs a type of graph A with a type of graph B; both draw
//! instance tokens from one shared vocabulary, and instance `j` of either side
//! starts from the same token window, so the two are linked by `sameAs`.
//! Every other type draws from its own disjoint vocabulary. Noise replaces a
//! token by a distractor from a pool shared by both graphs.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::{Term, Triple, OWL_SAME_AS, RDF_TYPE};
use crate::keyvalue;

pub const KG_A_TYPE_NS: &str = "http://kg-a.example/ontology/";
pub const KG_A_RESOURCE_NS: &str = "http://kg-a.example/resource/";
pub const KG_B_TYPE_NS: &str = "http://kg-b.example/type/";
pub const KG_B_RESOURCE_NS: &str = "http://kg-b.example/entity/";
const KG_A_DESCRIPTION: &str = "http://kg-a.example/property/description";
const KG_B_DESCRIPTION: &str = "http://kg-b.example/property/summary";

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub types_per_kg: usize,
    pub planted_pairs: usize,
    pub instances_per_type: usize,
    /// Vocabulary size of each planted pair and of each unplanted type.
    pub shared_vocab_size: usize,
    pub tokens_per_instance: usize,
    /// Size of the distractor pool used by noise.
    pub distractor_vocab_size: usize,
    /// Probability that a token is replaced by a random distractor.
    pub noise_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            types_per_kg: 20,
            planted_pairs: 10,
            instances_per_type: 50,
            shared_vocab_size: 40,
            tokens_per_instance: 10,
            distractor_vocab_size: 10_000,
            noise_rate: 0.0,
            seed: 1,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("types_per_kg", self.types_per_kg),
            ("planted_pairs", self.planted_pairs),
            ("instances_per_type", self.instances_per_type),
            ("shared_vocab_size", self.shared_vocab_size),
            ("tokens_per_instance", self.tokens_per_instance),
            ("distractor_vocab_size", self.distractor_vocab_size),
        ];
        if let Some((k, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{k} must be at least 1")));
        }
        if self.planted_pairs > self.types_per_kg {
            return Err(Error::Config("planted_pairs must not exceed types_per_kg".into()));
        }
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return Err(Error::Config("noise_rate must be in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn from_key_values(pairs: &[(String, String)]) -> Result<Self> {
        let mut c = SynthConfig::default();
        for (k, v) in pairs {
            match k.as_str() {
                "types_per_kg" => c.types_per_kg = keyvalue::value(k, v)?,
                "planted_pairs" => c.planted_pairs = keyvalue::value(k, v)?,
                "instances_per_type" => c.instances_per_type = keyvalue::value(k, v)?,
                "shared_vocab_size" => c.shared_vocab_size = keyvalue::value(k, v)?,
                "tokens_per_instance" => c.tokens_per_instance = keyvalue::value(k, v)?,
                "distractor_vocab_size" => c.distractor_vocab_size = keyvalue::value(k, v)?,
                "noise_rate" => c.noise_rate = keyvalue::value(k, v)?,
                "seed" => c.seed = keyvalue::value(k, v)?,
                other => return Err(Error::Config(format!("unknown synth key {other:?}"))),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_key_values(&keyvalue::read(path)?)
    }

    pub fn to_key_values(&self) -> String {
        format!(
            "types_per_kg={}\nplanted_pairs={}\ninstances_per_type={}\nshared_vocab_size={}\n\
             tokens_per_instance={}\ndistractor_vocab_size={}\nnoise_rate={}\nseed={}\n",
            self.types_per_kg,
            self.planted_pairs,
            self.instances_per_type,
            self.shared_vocab_size,
            self.tokens_per_instance,
            self.distractor_vocab_size,
            self.noise_rate,
            self.seed
        )
    }
}

pub fn type_a(i: usize) -> String {
    format!("{KG_A_TYPE_NS}TypeA{i:03}")
}

pub fn type_b(i: usize) -> String {
    format!("{KG_B_TYPE_NS}TypeB{i:03}")
}

fn instance_a(t: usize, j: usize) -> String {
    format!("{KG_A_RESOURCE_NS}a{t:03}_{j:05}")
}

fn instance_b(t: usize, j: usize) -> String {
    format!("{KG_B_RESOURCE_NS}b{t:03}_{j:05}")
}

/// Generated file contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthOutput {
    pub kg_a: String,
    pub kg_b: String,
    pub sameas: String,
    pub gt1: String,
    pub gt3: String,
    pub gt3_sources: String,
    /// `(type_a, type_b)` of every planted pair.
    pub planted: BTreeSet<(String, String)>,
}

pub const KG_A_FILE: &str = "kg_a.nt";
pub const KG_B_FILE: &str = "kg_b.nt";
pub const SAMEAS_FILE: &str = "sameas.nt";
pub const GT1_FILE: &str = "gt1.tsv";
pub const GT3_FILE: &str = "gt3.tsv";
pub const GT3_SOURCES_FILE: &str = "gt3_sources.txt";
pub const PIPELINE_FILE: &str = "pipeline.cfg";

struct Vocab {
    base: usize,
}

struct Generator<'a> {
    config: &'a SynthConfig,
    rng: ChaCha8Rng,
    distractor_base: usize,
}

impl Generator<'_> {
    fn tokens(&mut self, vocab: &Vocab, j: usize) -> String {
        let c = self.config;
        let mut out = String::new();
        for r in 0..c.tokens_per_instance {
            let id = if c.noise_rate > 0.0 && self.rng.random_bool(c.noise_rate) {
                self.distractor_base + self.rng.random_range(0..c.distractor_vocab_size)
            } else {
                vocab.base + (j * c.tokens_per_instance + r) % c.shared_vocab_size
            };
            if r > 0 {
                out.push(' ');
            }
            write!(out, "tok{id}").unwrap();
        }
        out
    }
}

fn emit(out: &mut String, triple: Triple) {
    writeln!(out, "{triple}").unwrap();
}

/// Deterministic for a fixed config, seed included.
pub fn generate(config: &SynthConfig) -> Result<SynthOutput> {
    config.validate()?;
    let n = config.types_per_kg;
    let v = config.shared_vocab_size;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // Planted pair i joins A type i with B type partner[i].
    let mut partner: Vec<usize> = (0..n).collect();
    partner.shuffle(&mut rng);

    // Vocabulary blocks: A type t owns block t (shared with its partner when
    // planted), unplanted B types take blocks from n on, then the distractor
    // pool.
    let planted = config.planted_pairs;
    let vocab_a: Vec<Vocab> = (0..n).map(|t| Vocab { base: t * v }).collect();
    let mut vocab_b: Vec<Vocab> = (0..n).map(|_| Vocab { base: 0 }).collect();
    let mut next_block = n;
    for (i, &b) in partner.iter().enumerate() {
        if i < planted {
            vocab_b[b].base = i * v;
        } else {
            vocab_b[b].base = next_block * v;
            next_block += 1;
        }
    }
    let mut gen = Generator {
        config,
        rng,
        distractor_base: next_block * v,
    };

    let mut kg_a = String::new();
    for (t, vocab) in vocab_a.iter().enumerate() {
        for j in 0..config.instances_per_type {
            let s = instance_a(t, j);
            emit(&mut kg_a, Triple::new(&s, RDF_TYPE, Term::Iri(type_a(t))));
            let toks = gen.tokens(vocab, j);
            emit(&mut kg_a, Triple::new(&s, KG_A_DESCRIPTION, Term::Literal(toks)));
        }
    }
    let mut kg_b = String::new();
    for (t, vocab) in vocab_b.iter().enumerate() {
        for j in 0..config.instances_per_type {
            let s = instance_b(t, j);
            emit(&mut kg_b, Triple::new(&s, RDF_TYPE, Term::Iri(type_b(t))));
            let toks = gen.tokens(vocab, j);
            emit(&mut kg_b, Triple::new(&s, KG_B_DESCRIPTION, Term::Literal(toks)));
        }
    }

    let mut sameas = String::new();
    let mut planted_pairs = BTreeSet::new();
    for (i, &b) in partner.iter().enumerate().take(planted) {
        planted_pairs.insert((type_a(i), type_b(b)));
        for j in 0..config.instances_per_type {
            emit(
                &mut sameas,
                Triple::new(instance_a(i, j), OWL_SAME_AS, Term::Iri(instance_b(b, j))),
            );
        }
    }
    let pair_lines: String = planted_pairs.iter().map(|(a, b)| format!("{a}\t{b}\n")).collect();
    let gt3_sources: String = (0..n).map(|t| format!("{}\n", type_a(t))).collect();

    Ok(SynthOutput {
        kg_a,
        kg_b,
        sameas,
        gt1: pair_lines.clone(),
        gt3: pair_lines,
        gt3_sources,
        planted: planted_pairs,
    })
}

/// Pipeline configuration matching the files written by [`write_dir`].
/// Paths are relative to the configuration file.
pub fn pipeline_config(min_token_count: u64) -> String {
    format!(
        "# Generated by `typealign synth`.\n\
         kg_a = {KG_A_FILE}\n\
         kg_b = {KG_B_FILE}\n\
         sameas = {SAMEAS_FILE}\n\
         gt1 = {GT1_FILE}\n\
         gt3 = {GT3_FILE}\n\
         gt3_sources = {GT3_SOURCES_FILE}\n\
         graph_a_prefix = {KG_A_RESOURCE_NS}\n\
         min_token_count = {min_token_count}\n\
         out_dir = out\n"
    )
}

/// Writes every generated file plus `synth.cfg` and `pipeline.cfg` into
/// `dir`, returning the paths written.
pub fn write_dir(config: &SynthConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let out = generate(config)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = [
        (KG_A_FILE, out.kg_a.as_str()),
        (KG_B_FILE, out.kg_b.as_str()),
        (SAMEAS_FILE, out.sameas.as_str()),
        (GT1_FILE, out.gt1.as_str()),
        (GT3_FILE, out.gt3.as_str()),
        (GT3_SOURCES_FILE, out.gt3_sources.as_str()),
        ("synth.cfg", &config.to_key_values()),
        (PIPELINE_FILE, &pipeline_config(1)),
    ];
    let mut written = Vec::new();
    for (name, content) in files {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
