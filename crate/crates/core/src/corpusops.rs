//! Dataset assembly: leakage-free splitting of parallel clusters into
//! per-direction train/validation/test sets, re-balancing of an existing
//! per-direction corpus, and temperature-weighted direction sampling.
//!
//! The anti-leakage guarantee comes from assigning every cluster a single
//! global split label before any direction is materialized: a source text
//! can then never appear in the training set of one direction and the test
//! set of another.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::textcore::Language;

/// An ordered (source, target) language pair, rendered as `"en-zh"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Direction {
    /// Document language.
    pub src: Language,
    /// Summary language.
    pub tgt: Language,
}

impl Direction {
    /// Construct a direction (source may equal target).
    pub fn new(src: Language, tgt: Language) -> Direction {
        Direction { src, tgt }
    }

    /// Whether source and target language coincide.
    pub fn is_monolingual(self) -> bool {
        self.src == self.tgt
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.src.code(), self.tgt.code())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (src, tgt) = s
            .split_once('-')
            .ok_or_else(|| Error::Parse(format!("direction {s:?} is not \"src-tgt\"")))?;
        Ok(Direction {
            src: Language::from_code(src)?,
            tgt: Language::from_code(tgt)?,
        })
    }
}

impl TryFrom<String> for Direction {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Direction> for String {
    fn from(d: Direction) -> String {
        d.to_string()
    }
}

/// One language's document and summary inside a cluster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterMember {
    /// Document text.
    pub doc: String,
    /// Summary text.
    pub summary: String,
}

/// A set of parallel document/summary pairs describing the same content in
/// several languages (at most one member per language).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParallelCluster {
    /// Stable cluster identifier.
    pub cluster_id: String,
    /// Per-language document/summary pairs.
    pub members: BTreeMap<Language, ClusterMember>,
}

/// The three dataset splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitKind {
    /// Training split.
    Train,
    /// Validation split.
    Validation,
    /// Test split.
    Test,
}

impl fmt::Display for SplitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitKind::Train => "train",
            SplitKind::Validation => "validation",
            SplitKind::Test => "test",
        })
    }
}

/// One materialized example: a source document with a target-language
/// summary, tagged with its provenance id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitExample {
    /// Originating cluster.
    pub cluster_id: String,
    /// Source-language document text.
    pub document: String,
    /// Target-language summary text.
    pub summary: String,
}

/// Train/validation/test example lists for one direction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DirectionSplit {
    /// Training examples.
    pub train: Vec<SplitExample>,
    /// Validation examples.
    pub validation: Vec<SplitExample>,
    /// Test examples.
    pub test: Vec<SplitExample>,
}

impl DirectionSplit {
    /// Total example count across the three splits.
    pub fn len(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }

    /// Whether all three splits are empty.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A full per-direction dataset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    /// Split example lists per direction.
    pub directions: BTreeMap<Direction, DirectionSplit>,
}

/// Desired split sizes.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitTargets {
    /// Global proportions applied to the cluster pool.
    Proportions {
        /// Train fraction.
        train: f64,
        /// Validation fraction.
        validation: f64,
        /// Test fraction.
        test: f64,
    },
    /// Desired per-direction example counts; label assignment is
    /// proportioned to their aggregate, and shortfalls are reported.
    PerDirection(BTreeMap<Direction, SplitSizes>),
}

/// A (train, validation, test) count triple.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    /// Training examples.
    pub train: usize,
    /// Validation examples.
    pub validation: usize,
    /// Test examples.
    pub test: usize,
}

impl SplitTargets {
    fn fractions(&self) -> Result<(f64, f64, f64), Error> {
        let (t, v, e) = match self {
            SplitTargets::Proportions {
                train,
                validation,
                test,
            } => (*train, *validation, *test),
            SplitTargets::PerDirection(map) => {
                let mut sums = (0.0, 0.0, 0.0);
                for sizes in map.values() {
                    sums.0 += sizes.train as f64;
                    sums.1 += sizes.validation as f64;
                    sums.2 += sizes.test as f64;
                }
                sums
            }
        };
        if t < 0.0 || v < 0.0 || e < 0.0 || !(t + v + e).is_finite() || t + v + e <= 0.0 {
            return Err(Error::InvalidConfig(
                "split targets must be non-negative with a positive sum".to_string(),
            ));
        }
        let total = t + v + e;
        Ok((t / total, v / total, e / total))
    }
}

/// Requested-versus-materialized gap for one direction and split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shortfall {
    /// Direction that came up short.
    pub direction: Direction,
    /// Split that came up short.
    pub split: SplitKind,
    /// Examples asked for.
    pub requested: usize,
    /// Examples actually materialized.
    pub materialized: usize,
}

/// Bookkeeping emitted alongside a split.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    /// Example counts per direction.
    pub per_direction: BTreeMap<Direction, SplitSizes>,
    /// Directions whose requested sizes could not be filled (warning-level).
    pub shortfalls: Vec<Shortfall>,
    /// Result of the exhaustive leakage scan; zero by construction.
    pub leakage_violations: usize,
}

/// Split parallel clusters into per-direction datasets without leakage.
///
/// Every cluster receives one global label — the shuffled cluster pool is
/// sliced in proportion to the aggregate targets — and each direction
/// `(a, b)` materializes an example from every cluster containing both
/// languages, placed in that cluster's split. Directions touching a
/// language in `zero_shot` keep validation/test but drop train examples.
pub fn split_m2ms(
    clusters: &[ParallelCluster],
    targets: &SplitTargets,
    zero_shot: &[Language],
    seed: u64,
) -> Result<(DatasetSplit, SplitReport), Error> {
    let (f_train, f_val, _) = targets.fractions()?;
    for cluster in clusters {
        if cluster.members.is_empty() {
            return Err(Error::Parse(format!(
                "cluster {:?} has no members",
                cluster.cluster_id
            )));
        }
    }

    let mut order: Vec<usize> = (0..clusters.len()).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let n = clusters.len();
    let n_train = ((n as f64) * f_train).round() as usize;
    let n_val = (((n as f64) * f_val).round() as usize).min(n - n_train.min(n));
    let mut labels = vec![SplitKind::Test; n];
    for (rank, &idx) in order.iter().enumerate() {
        labels[idx] = if rank < n_train {
            SplitKind::Train
        } else if rank < n_train + n_val {
            SplitKind::Validation
        } else {
            SplitKind::Test
        };
    }

    let mut split = DatasetSplit::default();
    for (cluster, label) in clusters.iter().zip(&labels) {
        for (&src, src_member) in &cluster.members {
            for (&tgt, tgt_member) in &cluster.members {
                if *label == SplitKind::Train
                    && (zero_shot.contains(&src) || zero_shot.contains(&tgt))
                {
                    continue;
                }
                let example = SplitExample {
                    cluster_id: cluster.cluster_id.clone(),
                    document: src_member.doc.clone(),
                    summary: tgt_member.summary.clone(),
                };
                let entry = split
                    .directions
                    .entry(Direction::new(src, tgt))
                    .or_default();
                match label {
                    SplitKind::Train => entry.train.push(example),
                    SplitKind::Validation => entry.validation.push(example),
                    SplitKind::Test => entry.test.push(example),
                }
            }
        }
    }
    split.directions.retain(|_, d| !d.is_empty());

    let mut report = SplitReport {
        leakage_violations: leakage_violations(&split),
        ..Default::default()
    };
    for (direction, lists) in &split.directions {
        report.per_direction.insert(
            *direction,
            SplitSizes {
                train: lists.train.len(),
                validation: lists.validation.len(),
                test: lists.test.len(),
            },
        );
    }
    if let SplitTargets::PerDirection(wanted) = targets {
        for (direction, sizes) in wanted {
            let got = report
                .per_direction
                .get(direction)
                .copied()
                .unwrap_or_default();
            for (kind, requested, materialized) in [
                (SplitKind::Train, sizes.train, got.train),
                (SplitKind::Validation, sizes.validation, got.validation),
                (SplitKind::Test, sizes.test, got.test),
            ] {
                if materialized < requested {
                    report.shortfalls.push(Shortfall {
                        direction: *direction,
                        split: kind,
                        requested,
                        materialized,
                    });
                }
            }
        }
    }
    Ok((split, report))
}

/// Exhaustive membership scan: counts cluster ids that appear in
/// conflicting splits anywhere in the dataset (test vs train, test vs
/// validation, validation vs train). Zero means the no-leakage invariant
/// holds.
pub fn leakage_violations(split: &DatasetSplit) -> usize {
    let mut presence: BTreeMap<&str, [bool; 3]> = BTreeMap::new();
    for lists in split.directions.values() {
        for (slot, examples) in [
            (0, &lists.train),
            (1, &lists.validation),
            (2, &lists.test),
        ] {
            for example in examples {
                presence.entry(&example.cluster_id).or_default()[slot] = true;
            }
        }
    }
    presence
        .values()
        .map(|[train, val, test]| {
            usize::from(*test && *train) + usize::from(*test && *val) + usize::from(*val && *train)
        })
        .sum()
}

/// Re-balance an existing per-direction corpus.
///
/// Directions with fewer than 1,000 examples become zero-shot: no train
/// split, the pool divided evenly between validation and test (odd
/// remainder to test). Monolingual directions with at least 10,000
/// examples are truncated to 10,000 and re-split 8:1:1. Everything else
/// keeps its provided splits. Pools are shuffled with the seeded generator
/// before truncation or division.
pub fn crosssum_split(
    provided: &BTreeMap<Direction, DirectionSplit>,
    seed: u64,
) -> Result<DatasetSplit, Error> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = DatasetSplit::default();
    for (direction, lists) in provided {
        let total = lists.len();
        if total == 0 {
            continue;
        }
        let rebalanced = if total < 1000 {
            let mut pool = Vec::with_capacity(total);
            pool.extend(lists.train.iter().cloned());
            pool.extend(lists.validation.iter().cloned());
            pool.extend(lists.test.iter().cloned());
            pool.shuffle(&mut rng);
            let n_val = total / 2;
            let test = pool.split_off(n_val);
            DirectionSplit {
                train: Vec::new(),
                validation: pool,
                test,
            }
        } else if direction.is_monolingual() && total >= 10_000 {
            let mut pool = Vec::with_capacity(total);
            pool.extend(lists.train.iter().cloned());
            pool.extend(lists.validation.iter().cloned());
            pool.extend(lists.test.iter().cloned());
            pool.shuffle(&mut rng);
            pool.truncate(10_000);
            let mut validation = pool.split_off(8_000);
            let test = validation.split_off(1_000);
            DirectionSplit {
                train: pool,
                validation,
                test,
            }
        } else {
            lists.clone()
        };
        out.directions.insert(*direction, rebalanced);
    }
    Ok(out)
}

/// Temperature-sampling knobs: exponent α over per-direction train counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Smoothing exponent; α = 1 reproduces raw proportions, values below
    /// 1 flatten toward uniform.
    pub alpha: f64,
    /// Training example count per direction.
    pub direction_counts: BTreeMap<Direction, u64>,
}

/// Sampling probability per direction: `|D|^α / Σ |D'|^α`.
///
/// Zero-count directions get weight zero and are never drawn.
pub fn direction_weights(cfg: &SamplerConfig) -> Result<BTreeMap<Direction, f64>, Error> {
    if !cfg.alpha.is_finite() || cfg.alpha <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "sampling exponent must be positive (got {})",
            cfg.alpha
        )));
    }
    if cfg.direction_counts.is_empty() {
        return Err(Error::EmptyInput);
    }
    if cfg.direction_counts.values().all(|&c| c == 0) {
        return Err(Error::AllEmpty);
    }
    let weights: BTreeMap<Direction, f64> = cfg
        .direction_counts
        .iter()
        .map(|(&d, &c)| (d, (c as f64).powf(cfg.alpha)))
        .collect();
    let total: f64 = weights.values().sum();
    Ok(weights.into_iter().map(|(d, w)| (d, w / total)).collect())
}

/// Draw one direction from normalized weights.
pub fn sample_direction<R: Rng + ?Sized>(
    weights: &BTreeMap<Direction, f64>,
    rng: &mut R,
) -> Result<Direction, Error> {
    let total: f64 = weights.values().sum();
    if weights.is_empty() || total <= 0.0 {
        return Err(Error::AllEmpty);
    }
    let draw = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = None;
    for (&direction, &weight) in weights {
        if weight <= 0.0 {
            continue;
        }
        acc += weight;
        last_positive = Some(direction);
        if draw < acc {
            return Ok(direction);
        }
    }
    // Floating-point residue can leave `draw` marginally past the last
    // accumulated weight; the final positive-weight direction absorbs it.
    Ok(last_positive.expect("at least one positive weight exists"))
}
