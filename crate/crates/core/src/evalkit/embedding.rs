//! Word-embedding drift analysis: parse per-language embedding files,
//! project all vectors into two dimensions with PCA, and measure how far
//! one language's centroid sits from the others.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::textcore::Language;

/// Convergence tolerance for the power iteration.
const POWER_TOLERANCE: f64 = 1e-10;
/// Iteration cap for the power iteration.
const POWER_MAX_ITERATIONS: usize = 10_000;
/// A trailing eigenvalue at or below this fraction of the leading one is
/// treated as numerically zero.
const RANK_EPSILON: f64 = 1e-12;

/// Per-language word vectors sharing one dimensionality.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    /// Shared vector dimension (at least 2).
    pub dim: usize,
    /// Word/vector lists per language, in file order.
    pub by_language: BTreeMap<Language, Vec<(String, Vec<f64>)>>,
}

/// Parse one language's embedding file: lines of `word<TAB>v1 v2 ... vd`.
pub fn parse_embedding_lines(text: &str) -> Result<Vec<(String, Vec<f64>)>, Error> {
    let mut rows: Vec<(String, Vec<f64>)> = Vec::new();
    let mut dim: Option<usize> = None;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (word, rest) = line
            .split_once('\t')
            .ok_or_else(|| Error::Parse(format!("embedding line {}: missing tab", lineno + 1)))?;
        let vector = rest
            .split_whitespace()
            .map(|v| {
                v.parse::<f64>().map_err(|_| {
                    Error::Parse(format!("embedding line {}: bad value {v:?}", lineno + 1))
                })
            })
            .collect::<Result<Vec<f64>, Error>>()?;
        match dim {
            None => dim = Some(vector.len()),
            Some(expected) if expected != vector.len() => {
                return Err(Error::DimensionMismatch {
                    expected,
                    got: vector.len(),
                });
            }
            Some(_) => {}
        }
        rows.push((word.to_string(), vector));
    }
    Ok(rows)
}

impl EmbeddingSet {
    /// Assemble a set from per-language file contents, enforcing a shared
    /// dimension of at least 2 and a non-empty list per language.
    pub fn from_language_texts(texts: &BTreeMap<Language, String>) -> Result<EmbeddingSet, Error> {
        if texts.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut by_language = BTreeMap::new();
        let mut dim: Option<usize> = None;
        for (&lang, text) in texts {
            let rows = parse_embedding_lines(text)?;
            if rows.is_empty() {
                return Err(Error::MissingLanguage(lang));
            }
            let this_dim = rows[0].1.len();
            match dim {
                None => dim = Some(this_dim),
                Some(expected) if expected != this_dim => {
                    return Err(Error::DimensionMismatch {
                        expected,
                        got: this_dim,
                    });
                }
                Some(_) => {}
            }
            by_language.insert(lang, rows);
        }
        let dim = dim.expect("at least one language present");
        if dim < 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: dim });
        }
        Ok(EmbeddingSet { dim, by_language })
    }

    /// Total number of word vectors across languages.
    pub fn len(&self) -> usize {
        self.by_language.values().map(Vec::len).sum()
    }

    /// Whether the set holds no vectors.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Componentwise arithmetic mean of equal-length vectors.
///
/// Used to form a word's embedding from its constituent token vectors.
pub fn average_word_embedding(vectors: &[Vec<f64>]) -> Result<Vec<f64>, Error> {
    let first = vectors.first().ok_or(Error::EmptyInput)?;
    let dim = first.len();
    let mut mean = vec![0.0; dim];
    for vector in vectors {
        if vector.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: vector.len(),
            });
        }
        for (acc, v) in mean.iter_mut().zip(vector) {
            *acc += v;
        }
    }
    let n = vectors.len() as f64;
    for acc in &mut mean {
        *acc /= n;
    }
    Ok(mean)
}

/// A two-dimensional PCA projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// Projected points, one row per input row, two columns.
    pub coords: Array2<f64>,
    /// True when fewer than two nonzero eigenvalues were found; the
    /// second (or both) coordinate columns are zero-filled then.
    pub degenerate_rank: bool,
}

/// Project points onto their top two principal components.
///
/// Columns are centered, the sample covariance (divisor n − 1) is
/// decomposed by power iteration with deflation, and each eigenvector's
/// sign is fixed so its largest-magnitude entry is positive.
pub fn pca_project(points: &Array2<f64>) -> Result<Projection, Error> {
    let n = points.nrows();
    let d = points.ncols();
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "projection needs at least two points (got {n})"
        )));
    }
    if d < 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: d });
    }
    let mean = points.mean_axis(Axis(0)).expect("n >= 2");
    let centered = points - &mean.view().insert_axis(Axis(0));
    let covariance = centered.t().dot(&centered) / (n as f64 - 1.0);

    let (v1, lambda1) = top_eigenpair(&covariance);
    let outer = v1
        .view()
        .insert_axis(Axis(1))
        .dot(&v1.view().insert_axis(Axis(0)));
    let deflated = &covariance - &(lambda1 * outer);
    let (v2, lambda2) = top_eigenpair(&deflated);

    let mut degenerate_rank = false;
    let first = if lambda1.abs() <= f64::EPSILON {
        degenerate_rank = true;
        Array1::zeros(n)
    } else {
        centered.dot(&v1)
    };
    let second = if lambda2.abs() <= RANK_EPSILON * lambda1.abs() {
        degenerate_rank = true;
        Array1::zeros(n)
    } else {
        centered.dot(&v2)
    };
    let coords = Array2::from_shape_fn((n, 2), |(i, j)| if j == 0 { first[i] } else { second[i] });
    Ok(Projection {
        coords,
        degenerate_rank,
    })
}

/// Largest-|λ| eigenpair of a symmetric matrix by power iteration.
///
/// Starts from the normalized all-ones vector and falls back to basis
/// vectors when a start lies in the null space; a zero matrix yields the
/// pair (e₀, 0).
fn top_eigenpair(matrix: &Array2<f64>) -> (Array1<f64>, f64) {
    let d = matrix.nrows();
    let mut starts: Vec<Array1<f64>> = Vec::with_capacity(d + 1);
    starts.push(Array1::from_elem(d, 1.0 / (d as f64).sqrt()));
    for i in 0..d {
        let mut basis = Array1::zeros(d);
        basis[i] = 1.0;
        starts.push(basis);
    }
    for start in starts {
        let mut v = start;
        let mut stalled = false;
        for _ in 0..POWER_MAX_ITERATIONS {
            let next = matrix.dot(&v);
            let norm = next.dot(&next).sqrt();
            if norm <= f64::MIN_POSITIVE {
                stalled = true;
                break;
            }
            let next = next / norm;
            let drift = (&next - &v).dot(&(&next - &v)).sqrt();
            let flipped = (&next + &v).dot(&(&next + &v)).sqrt();
            v = next;
            if drift.min(flipped) < POWER_TOLERANCE {
                break;
            }
        }
        if stalled {
            continue;
        }
        let v = fix_sign(v);
        let lambda = v.dot(&matrix.dot(&v));
        return (v, lambda);
    }
    let mut e0 = Array1::zeros(d);
    e0[0] = 1.0;
    (e0, 0.0)
}

/// Negate the vector if its largest-magnitude entry is negative; the
/// first index attaining the maximum decides.
fn fix_sign(v: Array1<f64>) -> Array1<f64> {
    let mut idx = 0;
    for (i, value) in v.iter().enumerate() {
        if value.abs() > v[idx].abs() {
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        -v
    } else {
        v
    }
}

/// Mean Euclidean distance from the focal language's centroid to every
/// other language's centroid, with centroids taken over each language's
/// projected points.
pub fn centroid_drift(points: &[(Language, [f64; 2])], focal: Language) -> Result<f64, Error> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sums: BTreeMap<Language, ([f64; 2], usize)> = BTreeMap::new();
    for &(lang, [x, y]) in points {
        let entry = sums.entry(lang).or_insert(([0.0, 0.0], 0));
        entry.0[0] += x;
        entry.0[1] += y;
        entry.1 += 1;
    }
    let centroids: BTreeMap<Language, [f64; 2]> = sums
        .into_iter()
        .map(|(lang, ([sx, sy], n))| (lang, [sx / n as f64, sy / n as f64]))
        .collect();
    let focal_centroid = centroids.get(&focal).ok_or(Error::MissingLanguage(focal))?;
    let others: Vec<&[f64; 2]> = centroids
        .iter()
        .filter(|(&lang, _)| lang != focal)
        .map(|(_, c)| c)
        .collect();
    if others.is_empty() {
        return Err(Error::EmptyInput);
    }
    let total: f64 = others
        .iter()
        .map(|c| ((c[0] - focal_centroid[0]).powi(2) + (c[1] - focal_centroid[1]).powi(2)).sqrt())
        .sum();
    Ok(total / others.len() as f64)
}

/// Summary of a drift analysis run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    /// Language whose centroid is measured against the rest.
    pub focal: Language,
    /// Per-language centroid in the projected plane.
    pub centroids: BTreeMap<Language, [f64; 2]>,
    /// Mean Euclidean distance from the focal centroid to the others.
    pub mean_distance: f64,
    /// Whether the projection had fewer than two usable components.
    pub degenerate_rank: bool,
}

/// Full drift pipeline: stack every language's word vectors, project them
/// jointly to 2D, and compare the focal language's centroid to the rest.
pub fn drift_analysis(set: &EmbeddingSet, focal: Language) -> Result<DriftReport, Error> {
    if !set.by_language.contains_key(&focal) {
        return Err(Error::MissingLanguage(focal));
    }
    let n = set.len();
    let mut matrix = Array2::zeros((n, set.dim));
    let mut labels = Vec::with_capacity(n);
    let mut row = 0;
    for (&lang, words) in &set.by_language {
        for (_, vector) in words {
            for (j, &value) in vector.iter().enumerate() {
                matrix[(row, j)] = value;
            }
            labels.push(lang);
            row += 1;
        }
    }
    let projection = pca_project(&matrix)?;
    let labeled: Vec<(Language, [f64; 2])> = labels
        .iter()
        .enumerate()
        .map(|(i, &lang)| (lang, [projection.coords[(i, 0)], projection.coords[(i, 1)]]))
        .collect();
    let mean_distance = centroid_drift(&labeled, focal)?;
    let mut sums: BTreeMap<Language, ([f64; 2], usize)> = BTreeMap::new();
    for (lang, [x, y]) in &labeled {
        let entry = sums.entry(*lang).or_insert(([0.0, 0.0], 0));
        entry.0[0] += x;
        entry.0[1] += y;
        entry.1 += 1;
    }
    let centroids = sums
        .into_iter()
        .map(|(lang, ([sx, sy], n))| (lang, [sx / n as f64, sy / n as f64]))
        .collect();
    Ok(DriftReport {
        focal,
        centroids,
        mean_distance,
        degenerate_rank: projection.degenerate_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::Rng;

    use crate::seeding::record_rng;

    #[test]
    fn embedding_lines_parse_and_validate() {
        let rows = parse_embedding_lines("cat\t1.0 2.0\ndog\t3 4\n").unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0], ("cat".to_string(), vec![1.0, 2.0]));
        assert!(matches!(
            parse_embedding_lines("cat\t1.0 2.0\ndog\t3\n"),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(matches!(
            parse_embedding_lines("cat 1.0 2.0\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_embedding_lines("cat\tx y\n"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn set_assembly_enforces_shared_dimension_and_presence() {
        let mut texts = BTreeMap::new();
        texts.insert(Language::En, "a\t1 2\n".to_string());
        texts.insert(Language::Fr, "b\t3 4 5\n".to_string());
        assert!(matches!(
            EmbeddingSet::from_language_texts(&texts),
            Err(Error::DimensionMismatch { .. })
        ));
        texts.insert(Language::Fr, String::new());
        assert_eq!(
            EmbeddingSet::from_language_texts(&texts),
            Err(Error::MissingLanguage(Language::Fr))
        );
        texts.insert(Language::Fr, "b\t3 4\n".to_string());
        let set = EmbeddingSet::from_language_texts(&texts).unwrap();
        assert_eq!(set.dim, 2);
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn one_dimensional_vectors_are_rejected() {
        let mut texts = BTreeMap::new();
        texts.insert(Language::En, "a\t1\n".to_string());
        assert!(matches!(
            EmbeddingSet::from_language_texts(&texts),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn averaging_means_componentwise() {
        assert_eq!(
            average_word_embedding(&[vec![1.0, 0.0]]).unwrap(),
            vec![1.0, 0.0]
        );
        assert_eq!(
            average_word_embedding(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
            vec![0.5, 0.5]
        );
        assert_eq!(
            average_word_embedding(&[vec![2.0, 4.0], vec![4.0, 8.0], vec![0.0, 0.0]]).unwrap(),
            vec![2.0, 4.0]
        );
        assert_eq!(average_word_embedding(&[]), Err(Error::EmptyInput));
        assert!(matches!(
            average_word_embedding(&[vec![1.0, 2.0], vec![1.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn axis_aligned_points_recover_the_axis() {
        let points = array![[1.0, 0.0], [2.0, 0.0], [4.0, 0.0], [9.0, 0.0]];
        let projection = pca_project(&points).unwrap();
        assert!(projection.degenerate_rank, "rank-1 input must be flagged");
        let mean = 4.0;
        for (i, &x) in [1.0, 2.0, 4.0, 9.0].iter().enumerate() {
            assert!(
                (projection.coords[(i, 0)] - (x - mean)).abs() < 1e-9,
                "first component must be the centered x-coordinate"
            );
            assert_eq!(projection.coords[(i, 1)], 0.0);
        }
    }

    #[test]
    fn identical_points_project_to_zero_with_flag() {
        let points = array![[3.0, 5.0], [3.0, 5.0], [3.0, 5.0]];
        let projection = pca_project(&points).unwrap();
        assert!(projection.degenerate_rank);
        assert!(projection.coords.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn projected_variances_are_non_increasing() {
        let mut rng = record_rng(5, "pca-variance");
        for _ in 0..50 {
            let points = Array2::from_shape_fn((8, 4), |_| rng.gen_range(-3.0..3.0));
            let projection = pca_project(&points).unwrap();
            let var = |col: usize| {
                let column = projection.coords.column(col);
                let mean = column.sum() / column.len() as f64;
                column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (column.len() as f64 - 1.0)
            };
            assert!(
                var(0) >= var(1) - 1e-9,
                "leading component must carry at least as much variance"
            );
        }
    }

    #[test]
    fn projected_columns_are_uncorrelated() {
        let mut rng = record_rng(6, "pca-decorrelation");
        for _ in 0..20 {
            let points = Array2::from_shape_fn((10, 3), |_| rng.gen_range(-2.0..2.0));
            let projection = pca_project(&points).unwrap();
            let a = projection.coords.column(0);
            let b = projection.coords.column(1);
            let mean_a = a.sum() / a.len() as f64;
            let mean_b = b.sum() / b.len() as f64;
            let cov: f64 = a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| (x - mean_a) * (y - mean_b))
                .sum::<f64>()
                / (a.len() as f64 - 1.0);
            let var_a: f64 = a.iter().map(|x| (x - mean_a).powi(2)).sum::<f64>()
                / (a.len() as f64 - 1.0);
            assert!(
                cov.abs() < 1e-6 * var_a.max(1e-12),
                "off-diagonal covariance {cov} too large"
            );
        }
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let one_row = Array2::from_shape_fn((1, 3), |_| 1.0);
        assert!(matches!(
            pca_project(&one_row),
            Err(Error::InvalidConfig(_))
        ));
        let one_col = Array2::from_shape_fn((3, 1), |_| 1.0);
        assert!(matches!(
            pca_project(&one_col),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn drift_matches_the_three_four_five_triangle() {
        let points = vec![
            (Language::Tr, [0.0, 0.0]),
            (Language::En, [3.0, 4.0]),
        ];
        assert_eq!(centroid_drift(&points, Language::Tr), Ok(5.0));
    }

    #[test]
    fn drift_is_zero_for_coincident_centroids() {
        let points = vec![
            (Language::Tr, [1.0, 2.0]),
            (Language::Tr, [3.0, 4.0]),
            (Language::En, [3.0, 4.0]),
            (Language::En, [1.0, 2.0]),
        ];
        assert_eq!(centroid_drift(&points, Language::Tr), Ok(0.0));
    }

    #[test]
    fn drift_is_translation_invariant_and_scales_linearly() {
        let mut rng = record_rng(9, "drift-invariance");
        let base: Vec<(Language, [f64; 2])> = (0..12)
            .map(|i| {
                let lang = match i % 3 {
                    0 => Language::Tr,
                    1 => Language::En,
                    _ => Language::Zh,
                };
                (lang, [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)])
            })
            .collect();
        let reference = centroid_drift(&base, Language::Tr).unwrap();
        let shifted: Vec<_> = base
            .iter()
            .map(|&(l, [x, y])| (l, [x + 11.5, y - 3.25]))
            .collect();
        let scaled: Vec<_> = base.iter().map(|&(l, [x, y])| (l, [x * 4.0, y * 4.0])).collect();
        assert!((centroid_drift(&shifted, Language::Tr).unwrap() - reference).abs() < 1e-9);
        assert!((centroid_drift(&scaled, Language::Tr).unwrap() - 4.0 * reference).abs() < 1e-9);
    }

    #[test]
    fn drift_errors_on_missing_languages() {
        let points = vec![(Language::En, [0.0, 0.0])];
        assert_eq!(
            centroid_drift(&points, Language::Tr),
            Err(Error::MissingLanguage(Language::Tr))
        );
        assert_eq!(
            centroid_drift(&points, Language::En),
            Err(Error::EmptyInput)
        );
        assert_eq!(centroid_drift(&[], Language::En), Err(Error::EmptyInput));
    }

    #[test]
    fn drift_analysis_runs_end_to_end() {
        let mut texts = BTreeMap::new();
        // Three tight clusters; Tr sits far from En/Fr along the first axis.
        texts.insert(
            Language::En,
            "a\t0.0 0.1 0.0\nb\t0.1 0.0 0.0\n".to_string(),
        );
        texts.insert(
            Language::Fr,
            "c\t0.0 1.0 0.1\nd\t0.1 1.0 0.0\n".to_string(),
        );
        texts.insert(
            Language::Tr,
            "e\t9.0 0.5 0.0\nf\t9.1 0.5 0.1\n".to_string(),
        );
        let set = EmbeddingSet::from_language_texts(&texts).unwrap();
        let report = drift_analysis(&set, Language::Tr).unwrap();
        assert_eq!(report.focal, Language::Tr);
        assert_eq!(report.centroids.len(), 3);
        assert!(report.mean_distance > 5.0, "Tr must sit far from the rest");
        assert!(!report.degenerate_rank);
        let en_fr = {
            let a = report.centroids[&Language::En];
            let b = report.centroids[&Language::Fr];
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
        };
        assert!(en_fr < report.mean_distance, "En and Fr stay close together");
    }
}
