//! Multi-annotator rating ingestion and label aggregation.
//!
//! Raw per-item rating multisets are normalized to `[0, 1]`, averaged into
//! soft labels, and binarized into hard labels either by thresholding the
//! soft label or by majority vote over binary ratings. The raw multisets are
//! kept around untouched because the bootstrap resamples them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::kahan_sum;
use crate::scalar::Scalar;

/// Declared bounds of the ordinal rating scale. Never inferred from data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatingScale<S> {
    min_value: S,
    max_value: S,
}

impl<S: Scalar> RatingScale<S> {
    pub fn new(min_value: S, max_value: S) -> Result<Self> {
        if !min_value.is_finite() || !max_value.is_finite() || max_value <= min_value {
            return Err(Error::InvalidScale {
                min: min_value.as_f64(),
                max: max_value.as_f64(),
            });
        }
        Ok(Self {
            min_value,
            max_value,
        })
    }

    /// The unit scale `[0, 1]`, under which ratings pass through unchanged.
    pub fn unit() -> Self {
        Self {
            min_value: S::zero(),
            max_value: S::one(),
        }
    }

    pub fn min_value(&self) -> S {
        self.min_value
    }

    pub fn max_value(&self) -> S {
        self.max_value
    }

    /// Affine map of a rating onto `[0, 1]`: 0 at the scale minimum, 1 at the
    /// scale maximum, strictly increasing in between.
    pub fn normalize(&self, rating: S) -> Result<S> {
        normalize_rating(rating, self)
    }

    pub fn contains(&self, rating: S) -> bool {
        rating.is_finite() && rating >= self.min_value && rating <= self.max_value
    }
}

/// Normalize a rating on `scale` to `[0, 1]`.
pub fn normalize_rating<S: Scalar>(rating: S, scale: &RatingScale<S>) -> Result<S> {
    if !rating.is_finite() {
        return Err(Error::NonFiniteRating {
            item_id: String::new(),
        });
    }
    if rating < scale.min_value || rating > scale.max_value {
        return Err(Error::RatingOutOfRange {
            item_id: String::new(),
            rating: rating.as_f64(),
            min: scale.min_value.as_f64(),
            max: scale.max_value.as_f64(),
        });
    }
    Ok((rating - scale.min_value) / (scale.max_value - scale.min_value))
}

/// Probability that an item is positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SoftLabel<S>(S);

impl<S: Scalar> SoftLabel<S> {
    pub fn new(p: S) -> Result<Self> {
        if !p.is_finite() || p < S::zero() || p > S::one() {
            return Err(Error::InvalidProbability { value: p.as_f64() });
        }
        Ok(Self(p))
    }

    pub fn probability(&self) -> S {
        self.0
    }
}

/// Binary label obtained by thresholding or majority voting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HardLabel(bool);

impl HardLabel {
    pub fn new(positive: bool) -> Self {
        Self(positive)
    }

    pub fn is_positive(&self) -> bool {
        self.0
    }

    /// The label as 0 or 1 in the scalar type, for feeding hard labels
    /// through the soft kernels.
    pub fn as_scalar<S: Scalar>(&self) -> S {
        if self.0 {
            S::one()
        } else {
            S::zero()
        }
    }
}

/// One item's raw rating multiset.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationItem<S> {
    pub item_id: String,
    pub ratings: Vec<S>,
    pub annotator_ids: Option<Vec<String>>,
}

impl<S: Scalar> AnnotationItem<S> {
    pub fn new(item_id: impl Into<String>, ratings: Vec<S>) -> Self {
        Self {
            item_id: item_id.into(),
            ratings,
            annotator_ids: None,
        }
    }
}

/// Validated collection of raw multi-annotator ratings on a declared scale.
///
/// Item order is preserved from construction; it is the canonical order for
/// everything downstream, including bootstrap resampling.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationTable<S> {
    items: Vec<AnnotationItem<S>>,
    scale: RatingScale<S>,
}

impl<S: Scalar> AnnotationTable<S> {
    /// Validates that item ids are unique, every item carries at least one
    /// rating, every rating is finite and within the scale, and annotator id
    /// lists (when present) align with the ratings. Missing or NaN ratings
    /// are rejected here rather than skipped: silently dropping one would
    /// change the multiset the bootstrap resamples.
    pub fn new(items: Vec<AnnotationItem<S>>, scale: RatingScale<S>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for item in &items {
            if !seen.insert(item.item_id.clone()) {
                return Err(Error::DuplicateItemId {
                    item_id: item.item_id.clone(),
                });
            }
            if item.ratings.is_empty() {
                return Err(Error::EmptyAnnotations {
                    item_id: item.item_id.clone(),
                });
            }
            for &r in &item.ratings {
                if !r.is_finite() {
                    return Err(Error::NonFiniteRating {
                        item_id: item.item_id.clone(),
                    });
                }
                if !scale.contains(r) {
                    return Err(Error::RatingOutOfRange {
                        item_id: item.item_id.clone(),
                        rating: r.as_f64(),
                        min: scale.min_value.as_f64(),
                        max: scale.max_value.as_f64(),
                    });
                }
            }
            if let Some(ids) = &item.annotator_ids {
                if ids.len() != item.ratings.len() {
                    return Err(Error::MismatchedAnnotators {
                        item_id: item.item_id.clone(),
                        ratings: item.ratings.len(),
                        annotators: ids.len(),
                    });
                }
            }
        }
        Ok(Self { items, scale })
    }

    pub fn items(&self) -> &[AnnotationItem<S>] {
        &self.items
    }

    pub fn scale(&self) -> &RatingScale<S> {
        &self.scale
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Arithmetic mean of normalized ratings.
pub fn aggregate_mean<S: Scalar>(normalized: &[S]) -> Result<SoftLabel<S>> {
    if normalized.is_empty() {
        return Err(Error::EmptyAnnotations {
            item_id: String::new(),
        });
    }
    let mean = kahan_sum(normalized) / S::from_count(normalized.len());
    // Guard against accumulation nudging the mean a hair outside [0, 1].
    let mean = mean.max(S::zero()).min(S::one());
    SoftLabel::new(mean)
}

/// Threshold a soft label into a hard one. Strict mode requires `p > t`,
/// inclusive mode `p >= t`.
pub fn binarize_threshold<S: Scalar>(label: SoftLabel<S>, threshold: S, inclusive: bool) -> HardLabel {
    let p = label.probability();
    HardLabel::new(if inclusive { p >= threshold } else { p > threshold })
}

/// Resolution for an exactly split majority vote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    /// Treat a split vote as "finding absent" (the default).
    Negative,
    Positive,
    /// Refuse to aggregate and surface the tie to the caller.
    Error,
}

impl Default for TiePolicy {
    fn default() -> Self {
        TiePolicy::Negative
    }
}

impl std::fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TiePolicy::Negative => write!(f, "negative"),
            TiePolicy::Positive => write!(f, "positive"),
            TiePolicy::Error => write!(f, "error"),
        }
    }
}

/// Majority vote over binary votes; `y = 1` iff strictly more ones than
/// zeros. Exact ties resolve per `tie_policy`.
pub fn majority_vote<S: Scalar>(votes: &[S], tie_policy: TiePolicy) -> Result<HardLabel> {
    if votes.is_empty() {
        return Err(Error::EmptyAnnotations {
            item_id: String::new(),
        });
    }
    let mut ones = 0usize;
    let mut zeros = 0usize;
    for &v in votes {
        if v == S::one() {
            ones += 1;
        } else if v == S::zero() {
            zeros += 1;
        } else {
            return Err(Error::InvalidVote {
                item_id: String::new(),
                value: v.as_f64(),
            });
        }
    }
    if ones == zeros {
        return match tie_policy {
            TiePolicy::Negative => Ok(HardLabel::new(false)),
            TiePolicy::Positive => Ok(HardLabel::new(true)),
            TiePolicy::Error => Err(Error::TiedVote {
                item_id: String::new(),
            }),
        };
    }
    Ok(HardLabel::new(ones > zeros))
}

/// How hard labels are derived from an item's ratings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Binarization<S> {
    /// Threshold the mean normalized rating.
    Threshold { threshold: S, inclusive: bool },
    /// Majority vote over the normalized ratings, which must be binary.
    Majority { tie_policy: TiePolicy },
}

impl<S: Scalar> Binarization<S> {
    pub fn threshold(threshold: S, inclusive: bool) -> Result<Self> {
        if !threshold.is_finite() || threshold < S::zero() || threshold > S::one() {
            return Err(Error::InvalidThreshold {
                threshold: threshold.as_f64(),
            });
        }
        Ok(Self::Threshold {
            threshold,
            inclusive,
        })
    }

    pub fn majority(tie_policy: TiePolicy) -> Self {
        Self::Majority { tie_policy }
    }
}

/// Aggregated labels for one item, with the tie flagged when a majority vote
/// split exactly and the policy resolved it.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedItem<S> {
    pub item_id: String,
    pub soft: SoftLabel<S>,
    pub hard: HardLabel,
    pub tie_resolved: bool,
}

/// Full normalization + aggregation pipeline: scale, mean, binarization rule.
///
/// This is the unit the bootstrap re-runs on every resampled replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregationPipeline<S> {
    pub scale: RatingScale<S>,
    pub binarization: Binarization<S>,
}

impl<S: Scalar> AggregationPipeline<S> {
    pub fn new(scale: RatingScale<S>, binarization: Binarization<S>) -> Self {
        Self {
            scale,
            binarization,
        }
    }

    /// Aggregate one rating multiset into a (soft, hard) label pair.
    pub fn aggregate_ratings(&self, ratings: &[S]) -> Result<AggregatedItem<S>> {
        let normalized: Vec<S> = ratings
            .iter()
            .map(|&r| self.scale.normalize(r))
            .collect::<Result<_>>()?;
        let soft = aggregate_mean(&normalized)?;
        let (hard, tie_resolved) = match self.binarization {
            Binarization::Threshold {
                threshold,
                inclusive,
            } => (binarize_threshold(soft, threshold, inclusive), false),
            Binarization::Majority { tie_policy } => {
                let ones = normalized.iter().filter(|&&v| v == S::one()).count();
                let zeros = normalized.iter().filter(|&&v| v == S::zero()).count();
                let hard = majority_vote(&normalized, tie_policy)?;
                (hard, ones == zeros)
            }
        };
        Ok(AggregatedItem {
            item_id: String::new(),
            soft,
            hard,
            tie_resolved,
        })
    }

    /// Aggregate a whole table, preserving item order.
    pub fn aggregate(&self, table: &AnnotationTable<S>) -> Result<Vec<AggregatedItem<S>>> {
        table
            .items()
            .iter()
            .map(|item| {
                let mut agg = self
                    .aggregate_ratings(&item.ratings)
                    .map_err(|e| e.for_item(&item.item_id))?;
                agg.item_id = item.item_id.clone();
                Ok(agg)
            })
            .collect()
    }
}
