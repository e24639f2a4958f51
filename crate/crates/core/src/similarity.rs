//! Set-based similarity between two type profiles.
//!
//! All three measures are pure functions of the two profiles and return a
//! value in `[0, 1]`. Tokens present in only one profile count as zero in the
//! other. The count-weighted measures are evaluated with exact integer
//! arithmetic up to a final division, which makes them exactly symmetric and
//! exactly 1.0 on identical inputs.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use itertools::{EitherOrBoth, Itertools};

use crate::error::Error;
use crate::stats::TypeTokenProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimilarityMeasure {
    Jaccard,
    GJaccard,
    LogTf,
}

impl SimilarityMeasure {
    pub const ALL: [SimilarityMeasure; 3] = [
        SimilarityMeasure::Jaccard,
        SimilarityMeasure::GJaccard,
        SimilarityMeasure::LogTf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SimilarityMeasure::Jaccard => "jaccard",
            SimilarityMeasure::GJaccard => "g_jaccard",
            SimilarityMeasure::LogTf => "log_tf",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn score(self, a: &TypeTokenProfile, b: &TypeTokenProfile) -> f64 {
        match self {
            SimilarityMeasure::Jaccard => jaccard(a, b),
            SimilarityMeasure::GJaccard => g_jaccard(a, b),
            SimilarityMeasure::LogTf => log_tf(a, b),
        }
    }

    /// Parses a comma separated list, deduplicated and in canonical order.
    pub fn parse_list(s: &str) -> Result<Vec<SimilarityMeasure>, Error> {
        let mut out: Vec<SimilarityMeasure> = s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()?;
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(Error::Config("no similarity measures given".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for SimilarityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SimilarityMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jaccard" => Ok(SimilarityMeasure::Jaccard),
            "g_jaccard" | "g-jaccard" | "gjaccard" => Ok(SimilarityMeasure::GJaccard),
            "log_tf" | "log-tf" | "logtf" => Ok(SimilarityMeasure::LogTf),
            other => Err(Error::Config(format!(
                "unknown measure {other:?} (expected jaccard, g_jaccard or log_tf)"
            ))),
        }
    }
}

/// Walks the token union of both profiles in lexicographic order, yielding
/// `(count_a, count_b)` with zero for a missing side.
fn union_counts<'a>(a: &'a TypeTokenProfile, b: &'a TypeTokenProfile) -> impl Iterator<Item = (u64, u64)> + 'a {
    a.tokens
        .iter()
        .merge_join_by(b.tokens.iter(), |x, y| x.0.cmp(y.0))
        .map(|e| match e {
            EitherOrBoth::Both(x, y) => (*x.1, *y.1),
            EitherOrBoth::Left(x) => (*x.1, 0),
            EitherOrBoth::Right(y) => (0, *y.1),
        })
}

/// `|A ∩ B| / |A ∪ B|` over token keys; counts are ignored.
pub fn jaccard(a: &TypeTokenProfile, b: &TypeTokenProfile) -> f64 {
    let (mut inter, mut union) = (0u64, 0u64);
    for (x, y) in union_counts(a, b) {
        union += 1;
        if x > 0 && y > 0 {
            inter += 1;
        }
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Generalized Jaccard over L1-normalized counts:
/// `Σ min(a_i/|a|₁, b_i/|b|₁) / Σ max(a_i/|a|₁, b_i/|b|₁)`.
///
/// Multiplying every term by `|a|₁·|b|₁` leaves the ratio unchanged, so it is
/// computed as `Σ min(a_i·|b|₁, b_i·|a|₁) / Σ max(a_i·|b|₁, b_i·|a|₁)`.
pub fn g_jaccard(a: &TypeTokenProfile, b: &TypeTokenProfile) -> f64 {
    let norm_a: u128 = a.tokens.values().map(|&c| c as u128).sum();
    let norm_b: u128 = b.tokens.values().map(|&c| c as u128).sum();
    if norm_a == 0 || norm_b == 0 {
        return 0.0;
    }
    let (mut num, mut den) = (0u128, 0u128);
    for (x, y) in union_counts(a, b) {
        let (x, y) = (x as u128 * norm_b, y as u128 * norm_a);
        num += x.min(y);
        den += x.max(y);
    }
    if den == 0 {
        0.0
    } else {
        (num as f64 / den as f64).clamp(0.0, 1.0)
    }
}

/// Dot product of the L2-normalized count vectors, in `[0, 1]`.
pub fn normalized_dot(a: &TypeTokenProfile, b: &TypeTokenProfile) -> f64 {
    let sq_a: u128 = a.tokens.values().map(|&c| (c as u128).pow(2)).sum();
    let sq_b: u128 = b.tokens.values().map(|&c| (c as u128).pow(2)).sum();
    if sq_a == 0 || sq_b == 0 {
        return 0.0;
    }
    let dot: u128 = union_counts(a, b).map(|(x, y)| x as u128 * y as u128).sum();
    if dot == 0 {
        return 0.0;
    }
    // Cauchy-Schwarz equality: parallel vectors have a unit dot product.
    if dot
        .checked_mul(dot)
        .is_some_and(|d2| sq_a.checked_mul(sq_b) == Some(d2))
    {
        return 1.0;
    }
    let d = dot as f64 / ((sq_a as f64).sqrt() * (sq_b as f64).sqrt());
    d.clamp(0.0, 1.0)
}

/// Log-TF: `ln(1 + d) / ln 2` where `d` is [`normalized_dot`]. Strictly
/// increasing in `d`, so rankings and threshold sweeps follow `d` exactly.
pub fn log_tf(a: &TypeTokenProfile, b: &TypeTokenProfile) -> f64 {
    log_tf_from_dot(normalized_dot(a, b))
}

pub fn log_tf_from_dot(d: f64) -> f64 {
    (d.ln_1p() / std::f64::consts::LN_2).clamp(0.0, 1.0)
}

/// Descending score, ties broken by ascending name.
pub fn rank_order(a: (&str, f64), b: (&str, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0))
}
