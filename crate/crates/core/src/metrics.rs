//! Soft and ordinary ranking metrics over probabilistic labels.
//!
//! Items are sorted once in canonical order (descending score, ties broken by
//! ascending item id), after which soft AUROC and soft AP are single linear
//! passes over expected-positive / expected-negative prefix sums. Quadratic
//! pairwise double sums are kept alongside as oracles for the linear kernels.
//! With binary labels every soft metric reduces exactly to its ordinary
//! counterpart, so ordinary AUROC/AP are computed by feeding hard labels
//! through the same kernels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, LabelMass, Result};
use crate::labels::{HardLabel, SoftLabel};
use crate::numeric::KahanSum;
use crate::scalar::Scalar;

/// One item: a model score, a soft label, and optionally a hard label.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredItem<S> {
    pub item_id: String,
    pub score: S,
    pub soft: SoftLabel<S>,
    pub hard: Option<HardLabel>,
}

impl<S: Scalar> ScoredItem<S> {
    pub fn new(item_id: impl Into<String>, score: S, soft: SoftLabel<S>) -> Self {
        Self {
            item_id: item_id.into(),
            score,
            soft,
            hard: None,
        }
    }

    pub fn with_hard(mut self, hard: HardLabel) -> Self {
        self.hard = Some(hard);
        self
    }
}

/// Canonical order: descending score, ties by ascending item id.
///
/// Ids are unique, so this is a total order and results are deterministic
/// across runs and platforms regardless of input row order.
pub fn canonical_sort<S: Scalar>(items: &mut [ScoredItem<S>]) {
    items.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .expect("scores validated finite")
            .then_with(|| a.item_id.cmp(&b.item_id))
    });
}

/// A validated, canonically sorted score set.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledScoreSet<S> {
    items: Vec<ScoredItem<S>>,
}

impl<S: Scalar> LabeledScoreSet<S> {
    /// Validates unique item ids and finite scores, then sorts canonically.
    pub fn new(mut items: Vec<ScoredItem<S>>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for item in &items {
            if !item.score.is_finite() {
                return Err(Error::NonFiniteScore {
                    item_id: item.item_id.clone(),
                });
            }
            if !seen.insert(item.item_id.clone()) {
                return Err(Error::DuplicateItemId {
                    item_id: item.item_id.clone(),
                });
            }
        }
        canonical_sort(&mut items);
        Ok(Self { items })
    }

    /// Items in canonical order.
    pub fn items(&self) -> &[ScoredItem<S>] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Soft labels in canonical order.
    pub fn soft_probs(&self) -> Vec<S> {
        self.items.iter().map(|i| i.soft.probability()).collect()
    }

    /// Hard labels in canonical order as 0/1 scalars, if every item has one.
    pub fn hard_probs(&self) -> Option<Vec<S>> {
        self.items
            .iter()
            .map(|i| i.hard.map(|h| h.as_scalar()))
            .collect()
    }

    pub fn soft_auroc(&self) -> Result<S> {
        soft_auroc_from_sorted(&self.soft_probs())
    }

    pub fn soft_ap(&self) -> Result<S> {
        soft_ap_from_sorted(&self.soft_probs())
    }

    pub fn roc_curve(&self) -> Result<Vec<RocPoint<S>>> {
        roc_curve_from_sorted(&self.soft_probs())
    }

    pub fn pr_curve(&self) -> Result<Vec<PrPoint<S>>> {
        pr_curve_from_sorted(&self.soft_probs())
    }

    /// All four metrics. Ordinary AUROC/AP run the hard labels through the
    /// same kernels and are undefined when any item lacks a hard label.
    /// Degenerate cells (vanished `n+` or `n-`) come back as `None` without
    /// aborting the other cells.
    pub fn metric_quad(&self) -> MetricQuad<S> {
        let soft = self.soft_probs();
        let hard = self.hard_probs();
        MetricQuad {
            auroc: hard
                .as_deref()
                .and_then(|h| soft_auroc_from_sorted(h).ok()),
            ap: hard.as_deref().and_then(|h| soft_ap_from_sorted(h).ok()),
            s_auroc: soft_auroc_from_sorted(&soft).ok(),
            s_ap: soft_ap_from_sorted(&soft).ok(),
        }
    }
}

/// Expected-positive and expected-negative prefix sums over score-sorted
/// items: `n_pos[i] = sum of p over the top i+1 items`, `n_neg` likewise for
/// `1 - p`. Compensated summation keeps long prefixes accurate.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeCounts<S> {
    n_pos: Vec<S>,
    n_neg: Vec<S>,
}

impl<S: Scalar> CumulativeCounts<S> {
    pub fn n_pos(&self) -> &[S] {
        &self.n_pos
    }

    pub fn n_neg(&self) -> &[S] {
        &self.n_neg
    }

    /// Total expected positives `n+`; 0 for an empty set.
    pub fn total_pos(&self) -> S {
        self.n_pos.last().copied().unwrap_or_else(S::zero)
    }

    /// Total expected negatives `n-`; 0 for an empty set.
    pub fn total_neg(&self) -> S {
        self.n_neg.last().copied().unwrap_or_else(S::zero)
    }

    pub fn len(&self) -> usize {
        self.n_pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_pos.is_empty()
    }
}

/// Single-pass prefix sums over canonically sorted soft labels.
pub fn cumulative_counts<S: Scalar>(sorted_p: &[S]) -> CumulativeCounts<S> {
    let mut pos = KahanSum::new();
    let mut neg = KahanSum::new();
    let mut n_pos = Vec::with_capacity(sorted_p.len());
    let mut n_neg = Vec::with_capacity(sorted_p.len());
    for &p in sorted_p {
        pos.add(p);
        neg.add(S::one() - p);
        n_pos.push(pos.value());
        n_neg.push(neg.value());
    }
    CumulativeCounts { n_pos, n_neg }
}

fn check_totals<S: Scalar>(total_pos: S, total_neg: Option<S>) -> Result<()> {
    if total_pos <= S::zero() {
        return Err(Error::DegenerateLabels {
            missing: LabelMass::Positive,
        });
    }
    if let Some(neg) = total_neg {
        if neg <= S::zero() {
            return Err(Error::DegenerateLabels {
                missing: LabelMass::Negative,
            });
        }
    }
    Ok(())
}

/// Soft AUROC over canonically sorted soft labels: the right-Riemann area
/// `sum_i TPR_i * (FPR_i - FPR_{i-1})` with `FPR_0 = 0`, evaluated as
/// `sum_i n_pos[i] * (1 - p_i) / (n+ n-)` in one linear pass.
pub fn soft_auroc_from_sorted<S: Scalar>(sorted_p: &[S]) -> Result<S> {
    let mut pos = KahanSum::new();
    let mut neg = KahanSum::new();
    let mut area = KahanSum::new();
    for &p in sorted_p {
        pos.add(p);
        neg.add(S::one() - p);
        area.add(pos.value() * (S::one() - p));
    }
    check_totals(pos.value(), Some(neg.value()))?;
    Ok(area.value() / (pos.value() * neg.value()))
}

/// Soft AP over canonically sorted soft labels: `sum_i P_i * (R_i - R_{i-1})`
/// with `R_0 = 0`, i.e. `sum_i (n_pos[i] / (i+1)) * p_i / n+`, one linear pass.
pub fn soft_ap_from_sorted<S: Scalar>(sorted_p: &[S]) -> Result<S> {
    let mut pos = KahanSum::new();
    let mut area = KahanSum::new();
    for (i, &p) in sorted_p.iter().enumerate() {
        pos.add(p);
        area.add(pos.value() / S::from_count(i + 1) * p);
    }
    check_totals(pos.value(), None)?;
    Ok(area.value() / pos.value())
}

/// Whether the pairwise double sums include the diagonal `j = i` terms.
///
/// `Included` is the exact expansion of the Riemann-sum soft AUROC.
/// `Excluded` stops the inner sum at `j = i - 1`; the two differ by
/// `sum_i (1 - p_i) p_i / (n+ n-)`, which vanishes for binary labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalTerms {
    Included,
    Excluded,
}

/// Quadratic double-sum soft AUROC: `sum_i sum_j (1 - p_i) p_j / (n+ n-)`
/// with `j` ranging up to `i` or `i - 1` per `diagonal`.
pub fn soft_auroc_pairwise_oracle<S: Scalar>(
    set: &LabeledScoreSet<S>,
    diagonal: DiagonalTerms,
) -> Result<S> {
    let p = set.soft_probs();
    let counts = cumulative_counts(&p);
    check_totals(counts.total_pos(), Some(counts.total_neg()))?;
    let mut sum = KahanSum::new();
    for i in 0..p.len() {
        let j_end = match diagonal {
            DiagonalTerms::Included => i + 1,
            DiagonalTerms::Excluded => i,
        };
        for j in 0..j_end {
            sum.add((S::one() - p[i]) * p[j]);
        }
    }
    Ok(sum.value() / (counts.total_pos() * counts.total_neg()))
}

/// Quadratic double-sum soft AP: `sum_i sum_{j<=i} (p_i / i) (p_j / n+)`.
/// Exactly consistent with [`soft_ap_from_sorted`].
pub fn soft_ap_pairwise_oracle<S: Scalar>(set: &LabeledScoreSet<S>) -> Result<S> {
    let p = set.soft_probs();
    let counts = cumulative_counts(&p);
    check_totals(counts.total_pos(), None)?;
    let mut sum = KahanSum::new();
    for i in 0..p.len() {
        for j in 0..=i {
            sum.add(p[i] / S::from_count(i + 1) * p[j]);
        }
    }
    Ok(sum.value() / counts.total_pos())
}

/// One point of the rank-indexed ROC step curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint<S> {
    pub fpr: S,
    pub tpr: S,
}

/// One point of the rank-indexed precision-recall step curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint<S> {
    pub recall: S,
    pub precision: S,
}

/// ROC step curve including the rank-0 origin `(0, 0)`; `n + 1` points.
pub fn roc_curve_from_sorted<S: Scalar>(sorted_p: &[S]) -> Result<Vec<RocPoint<S>>> {
    let counts = cumulative_counts(sorted_p);
    check_totals(counts.total_pos(), Some(counts.total_neg()))?;
    let mut points = Vec::with_capacity(sorted_p.len() + 1);
    points.push(RocPoint {
        fpr: S::zero(),
        tpr: S::zero(),
    });
    for i in 0..counts.len() {
        points.push(RocPoint {
            fpr: counts.n_neg()[i] / counts.total_neg(),
            tpr: counts.n_pos()[i] / counts.total_pos(),
        });
    }
    Ok(points)
}

/// Precision-recall step curve with a rank-0 anchor at recall 0; `n + 1`
/// points. The anchor's precision carries the rank-1 value, the limit of
/// `P_i` as recall approaches 0 from above.
pub fn pr_curve_from_sorted<S: Scalar>(sorted_p: &[S]) -> Result<Vec<PrPoint<S>>> {
    let counts = cumulative_counts(sorted_p);
    check_totals(counts.total_pos(), None)?;
    let mut points = Vec::with_capacity(sorted_p.len() + 1);
    points.push(PrPoint {
        recall: S::zero(),
        precision: counts.n_pos()[0],
    });
    for i in 0..counts.len() {
        points.push(PrPoint {
            recall: counts.n_pos()[i] / counts.total_pos(),
            precision: counts.n_pos()[i] / S::from_count(i + 1),
        });
    }
    Ok(points)
}

/// Tie-aware soft AUROC: items sharing a score collapse into one block and
/// the area across each block is trapezoidal instead of right-Riemann. The
/// default per-item kernel is [`soft_auroc_from_sorted`]; this variant
/// matches the usual tie-corrected ordinary AUROC when labels are binary.
pub fn soft_auroc_tie_aware<S: Scalar>(set: &LabeledScoreSet<S>) -> Result<S> {
    let items = set.items();
    let mut pos = KahanSum::<S>::new();
    let mut neg = KahanSum::<S>::new();
    let mut area = KahanSum::<S>::new();
    let mut i = 0;
    // (n_pos, n_neg) at the previous block boundary.
    let mut prev_pos = S::zero();
    let mut prev_neg = S::zero();
    while i < items.len() {
        let mut j = i;
        while j < items.len() && items[j].score == items[i].score {
            pos.add(items[j].soft.probability());
            neg.add(S::one() - items[j].soft.probability());
            j += 1;
        }
        let two = S::from_count(2);
        area.add((pos.value() + prev_pos) / two * (neg.value() - prev_neg));
        prev_pos = pos.value();
        prev_neg = neg.value();
        i = j;
    }
    check_totals(pos.value(), Some(neg.value()))?;
    Ok(area.value() / (pos.value() * neg.value()))
}

/// The four scores for one model on one task. `None` marks an undefined
/// cell (degenerate labels or missing hard labels), never a silent default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricQuad<S> {
    pub auroc: Option<S>,
    pub ap: Option<S>,
    pub s_auroc: Option<S>,
    pub s_ap: Option<S>,
}

impl<S: Scalar> MetricQuad<S> {
    pub fn get(&self, metric: MetricName) -> Option<S> {
        match metric {
            MetricName::Auroc => self.auroc,
            MetricName::Ap => self.ap,
            MetricName::SoftAuroc => self.s_auroc,
            MetricName::SoftAp => self.s_ap,
        }
    }
}

/// The four metric columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    Auroc,
    Ap,
    #[serde(rename = "s_auroc")]
    SoftAuroc,
    #[serde(rename = "s_ap")]
    SoftAp,
}

impl MetricName {
    pub const ALL: [MetricName; 4] = [
        MetricName::Auroc,
        MetricName::Ap,
        MetricName::SoftAuroc,
        MetricName::SoftAp,
    ];

    /// Stable snake_case key used in JSON and CSV output.
    pub fn key(&self) -> &'static str {
        match self {
            MetricName::Auroc => "auroc",
            MetricName::Ap => "ap",
            MetricName::SoftAuroc => "s_auroc",
            MetricName::SoftAp => "s_ap",
        }
    }
}

impl std::fmt::Display for MetricName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricName::Auroc => write!(f, "AUROC"),
            MetricName::Ap => write!(f, "AP"),
            MetricName::SoftAuroc => write!(f, "s-AUROC"),
            MetricName::SoftAp => write!(f, "s-AP"),
        }
    }
}

/// The two ordinary-vs-soft metric pairings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricPair {
    AurocVsSoftAuroc,
    ApVsSoftAp,
}

impl MetricPair {
    pub const ALL: [MetricPair; 2] = [MetricPair::AurocVsSoftAuroc, MetricPair::ApVsSoftAp];

    pub fn ordinary(&self) -> MetricName {
        match self {
            MetricPair::AurocVsSoftAuroc => MetricName::Auroc,
            MetricPair::ApVsSoftAp => MetricName::Ap,
        }
    }

    pub fn soft(&self) -> MetricName {
        match self {
            MetricPair::AurocVsSoftAuroc => MetricName::SoftAuroc,
            MetricPair::ApVsSoftAp => MetricName::SoftAp,
        }
    }

    pub fn key(&self) -> &'static str {
        match self {
            MetricPair::AurocVsSoftAuroc => "auroc_vs_s_auroc",
            MetricPair::ApVsSoftAp => "ap_vs_s_ap",
        }
    }
}

impl std::fmt::Display for MetricPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} vs {}", self.ordinary(), self.soft())
    }
}
