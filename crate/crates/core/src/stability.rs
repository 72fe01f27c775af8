//! Ranking stability under annotation resampling.
//!
//! The bootstrap draws each item's rating multiset with replacement,
//! re-aggregates labels, recomputes all four metrics for every model,
//! re-ranks, and correlates each replicate ranking against the original
//! order. Replicates use independent RNG substreams indexed by iteration,
//! so reports are bit-identical for any degree of parallelism.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::labels::{AggregationPipeline, AnnotationTable};
use crate::metrics::{soft_ap_from_sorted, soft_auroc_from_sorted, MetricName, MetricPair};
use crate::numeric::KahanSum;
use crate::scalar::Scalar;

/// Deterministic RNG for one bootstrap replicate: ChaCha8 keyed by the master
/// seed with the iteration index as the stream. Substreams are independent
/// and the output is stable across platforms and thread schedules.
pub fn replicate_rng(seed: u64, iteration: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration);
    rng
}

/// Same-length draw, i.i.d. uniform with replacement from the multiset.
pub fn bootstrap_resample_item<S: Scalar, R: Rng>(ratings: &[S], rng: &mut R) -> Result<Vec<S>> {
    if ratings.is_empty() {
        return Err(Error::EmptyAnnotations {
            item_id: String::new(),
        });
    }
    Ok((0..ratings.len())
        .map(|_| ratings[rng.random_range(0..ratings.len())])
        .collect())
}

/// Average ranks (1 = best) for metric values, higher value ranking first.
/// Exact value ties share the mean of the positions they occupy.
pub fn ranks_from_values<S: Scalar>(values: &[S]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .expect("metric values are finite")
            .then(a.cmp(&b))
    });
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Positions i+1 ..= j averaged over the tie group.
        let avg = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = avg;
        }
        i = j;
    }
    ranks
}

/// A ranking of models under one metric, ties resolved by average rank.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelRanking {
    pub metric: MetricName,
    ranks: BTreeMap<String, f64>,
}

impl ModelRanking {
    /// Rank models by metric value, 1 = best.
    pub fn from_values<S: Scalar>(metric: MetricName, values: &[(&str, S)]) -> Self {
        let raw: Vec<S> = values.iter().map(|&(_, v)| v).collect();
        let ranks = ranks_from_values(&raw);
        Self {
            metric,
            ranks: values
                .iter()
                .zip(ranks)
                .map(|(&(id, _), r)| (id.to_string(), r))
                .collect(),
        }
    }

    pub fn ranks(&self) -> &BTreeMap<String, f64> {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Rank vectors aligned on the shared model set; `None` if the model
    /// sets differ.
    fn aligned(&self, other: &Self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.ranks.len() != other.ranks.len() {
            return None;
        }
        let mut a = Vec::with_capacity(self.ranks.len());
        let mut b = Vec::with_capacity(self.ranks.len());
        for (id, &ra) in &self.ranks {
            a.push(ra);
            b.push(*other.ranks.get(id)?);
        }
        Some((a, b))
    }
}

/// Squared Pearson correlation; `None` when fewer than two points or either
/// side has zero variance.
pub fn pearson_r2<S: Scalar>(xs: &[S], ys: &[S]) -> Option<S> {
    pearson_r(xs, ys).map(|r| (r * r).min(S::one()))
}

fn pearson_r<S: Scalar>(xs: &[S], ys: &[S]) -> Option<S> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = S::from_count(xs.len());
    let mean_x = crate::numeric::kahan_sum(xs) / n;
    let mean_y = crate::numeric::kahan_sum(ys) / n;
    let mut cov = KahanSum::new();
    let mut var_x = KahanSum::new();
    let mut var_y = KahanSum::new();
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        cov.add(dx * dy);
        var_x.add(dx * dx);
        var_y.add(dy * dy);
    }
    let denom = var_x.value() * var_y.value();
    if denom <= S::zero() {
        return None;
    }
    Some(cov.value() / denom.sqrt())
}

fn spearman_from_rank_vectors(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() < 2 {
        return None;
    }
    if a == b {
        // Identical orderings, ties included, correlate perfectly even when
        // the rank variance is zero.
        return Some(1.0);
    }
    pearson_r(a, b).map(|r| r.clamp(-1.0, 1.0))
}

fn kendall_from_rank_vectors(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len();
    if n < 2 {
        return None;
    }
    if a == b {
        return Some(1.0);
    }
    let mut concordant = 0u64;
    let mut discordant = 0u64;
    let mut tied_a = 0u64;
    let mut tied_b = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            let da = a[i] - a[j];
            let db = b[i] - b[j];
            if da == 0.0 {
                tied_a += 1;
                if db == 0.0 {
                    tied_b += 1;
                }
            } else if db == 0.0 {
                tied_b += 1;
            } else if da * db > 0.0 {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let total = (n * (n - 1) / 2) as f64;
    let denom = (total - tied_a as f64) * (total - tied_b as f64);
    if denom <= 0.0 {
        return None;
    }
    let tau = (concordant as f64 - discordant as f64) / denom.sqrt();
    Some(tau.clamp(-1.0, 1.0))
}

/// Spearman's rho between two rankings over the same model set: the Pearson
/// correlation of average ranks. `None` for fewer than two models, mismatched
/// model sets, or zero rank variance with non-identical orderings.
pub fn spearman_rho(ranks_a: &ModelRanking, ranks_b: &ModelRanking) -> Option<f64> {
    let (a, b) = ranks_a.aligned(ranks_b)?;
    spearman_from_rank_vectors(&a, &b)
}

/// Kendall's tau-b between two rankings over the same model set, tie
/// corrected. `None` under the same conditions as [`spearman_rho`].
pub fn kendall_tau(ranks_a: &ModelRanking, ranks_b: &ModelRanking) -> Option<f64> {
    let (a, b) = ranks_a.aligned(ranks_b)?;
    kendall_from_rank_vectors(&a, &b)
}

/// One-sided exact sign test: the p-value `P[X >= wins_a]` for
/// `X ~ Binomial(wins_a + wins_b, 1/2)`. Ties must be excluded beforehand;
/// zero informative trials yield `None`.
pub fn sign_test(wins_a: u64, wins_b: u64) -> Option<f64> {
    let n = wins_a.checked_add(wins_b)?;
    if n == 0 {
        return None;
    }
    Some(binomial_upper_tail(n, wins_a))
}

/// `P[X >= k]` for `X ~ Binomial(n, 1/2)`.
///
/// Exact (correctly rounded) for n <= 52 via integer binomial sums; the
/// symmetric midpoint is exactly 1/2; lower-half arguments complement the
/// mirrored upper tail so that `P[X >= k] + P[X <= k - 1] == 1` holds
/// exactly for every n.
fn binomial_upper_tail(n: u64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    if 2 * k == n + 1 {
        return 0.5;
    }
    if 2 * k <= n {
        return 1.0 - binomial_upper_tail(n, n - k + 1);
    }
    if n <= 52 {
        // All C(n, j) and their partial sums stay below 2^53.
        let mut coeff: u64 = 1;
        let mut sum: u64 = 0;
        for j in 0..=n {
            if j >= k {
                sum += coeff;
            }
            if j < n {
                coeff = coeff * (n - j) / (j + 1);
            }
        }
        return sum as f64 / 2f64.powi(n as i32);
    }
    // Large n: first term in log space, then the term recurrence.
    let mut ln_c = 0.0f64;
    for j in 0..k {
        ln_c += ((n - j) as f64).ln() - ((j + 1) as f64).ln();
    }
    let mut term = (ln_c - n as f64 * std::f64::consts::LN_2).exp();
    let mut sum = KahanSum::new();
    for j in k..=n {
        sum.add(term);
        term = term * (n - j) as f64 / (j + 1) as f64;
    }
    sum.value().clamp(0.0, 1.0)
}

/// Scores of one model, keyed by item id.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelScores<S> {
    pub model_id: String,
    pub scores: Vec<(String, S)>,
}

impl<S: Scalar> ModelScores<S> {
    pub fn new(model_id: impl Into<String>, scores: Vec<(String, S)>) -> Self {
        Self {
            model_id: model_id.into(),
            scores,
        }
    }
}

/// Bootstrap parameters: replicate count, master seed, and the aggregation
/// pipeline re-run on every replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapConfig<S> {
    pub iterations: u64,
    pub seed: u64,
    pub pipeline: AggregationPipeline<S>,
}

/// Per-metric stability: average rank correlation of replicate rankings
/// against the original, with the count of replicates skipped because the
/// metric was degenerate or its correlation undefined.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct MetricStability {
    pub mean_spearman: Option<f64>,
    pub mean_kendall: Option<f64>,
    pub skipped_iterations: u64,
}

/// Win/loss/tie counts for soft-vs-ordinary per-replicate comparisons under
/// one correlation statistic, with the one-sided sign-test p-value for
/// "soft is more stable". Replicates where either side was unavailable
/// count as ties, so wins + losses + ties always equals the iteration count.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PairCounts {
    pub wins_soft: u64,
    pub wins_ordinary: u64,
    pub ties: u64,
    pub p_value: Option<f64>,
}

/// Pair comparison under both statistics. Kendall is the headline statistic;
/// Spearman is reported alongside.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PairStability {
    pub kendall: PairCounts,
    pub spearman: PairCounts,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PerMetricStability {
    pub auroc: MetricStability,
    pub ap: MetricStability,
    pub s_auroc: MetricStability,
    pub s_ap: MetricStability,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PerPairStability {
    pub auroc_vs_s_auroc: PairStability,
    pub ap_vs_s_ap: PairStability,
}

/// Full stability report; `seed` and `iterations` are carried for provenance.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct StabilityReport {
    pub seed: u64,
    pub iterations: u64,
    pub metrics: PerMetricStability,
    pub pairs: PerPairStability,
}

impl StabilityReport {
    pub fn metric(&self, name: MetricName) -> &MetricStability {
        match name {
            MetricName::Auroc => &self.metrics.auroc,
            MetricName::Ap => &self.metrics.ap,
            MetricName::SoftAuroc => &self.metrics.s_auroc,
            MetricName::SoftAp => &self.metrics.s_ap,
        }
    }

    pub fn pair(&self, pair: MetricPair) -> &PairStability {
        match pair {
            MetricPair::AurocVsSoftAuroc => &self.pairs.auroc_vs_s_auroc,
            MetricPair::ApVsSoftAp => &self.pairs.ap_vs_s_ap,
        }
    }

    pub fn to_canon_value(&self) -> crate::json::Value {
        use crate::json::Value;
        let mut root = Value::object();
        root.insert("seed", Value::UInt(self.seed));
        root.insert("iterations", Value::UInt(self.iterations));

        let mut metrics = Value::object();
        for name in MetricName::ALL {
            let m = self.metric(name);
            let mut obj = Value::object();
            obj.insert("mean_spearman", Value::opt_float(m.mean_spearman));
            obj.insert("mean_kendall", Value::opt_float(m.mean_kendall));
            obj.insert("skipped_iterations", Value::UInt(m.skipped_iterations));
            metrics.insert(name.key(), obj);
        }
        root.insert("metrics", metrics);

        let mut pairs = Value::object();
        for pair in MetricPair::ALL {
            let p = self.pair(pair);
            let mut obj = Value::object();
            for (stat, counts) in [("kendall", &p.kendall), ("spearman", &p.spearman)] {
                let mut c = Value::object();
                c.insert("wins_soft", Value::UInt(counts.wins_soft));
                c.insert("wins_ordinary", Value::UInt(counts.wins_ordinary));
                c.insert("ties", Value::UInt(counts.ties));
                c.insert("p_value", Value::opt_float(counts.p_value));
                obj.insert(stat, c);
            }
            pairs.insert(pair.key(), obj);
        }
        root.insert("pairs", pairs);
        root
    }

    /// Canonical JSON: fixed key order, 17-significant-digit reals.
    pub fn to_canonical_json(&self) -> String {
        let mut out = self.to_canon_value().render();
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Correlations of one replicate's rankings against the original order,
/// indexed like [`MetricName::ALL`]. `None` marks a skipped metric.
type ReplicateCorrelations = [Option<(f64, f64)>; 4];

struct Prepared<S> {
    // For each model, table-item indices in that model's canonical order.
    perms: Vec<Vec<usize>>,
    ratings: Vec<Vec<S>>,
}

fn prepare<S: Scalar>(
    models: &[ModelScores<S>],
    table: &AnnotationTable<S>,
) -> Result<Prepared<S>> {
    if models.len() < 2 {
        return Err(Error::TooFewModels {
            found: models.len(),
        });
    }
    let mut ids = std::collections::HashSet::new();
    for m in models {
        if !ids.insert(m.model_id.as_str()) {
            return Err(Error::DuplicateModelId {
                model_id: m.model_id.clone(),
            });
        }
    }
    let index: HashMap<&str, usize> = table
        .items()
        .iter()
        .enumerate()
        .map(|(i, item)| (item.item_id.as_str(), i))
        .collect();
    let mut perms = Vec::with_capacity(models.len());
    for m in models {
        let mut seen = std::collections::HashSet::new();
        let mut rows: Vec<(usize, &str, S)> = Vec::with_capacity(m.scores.len());
        let mut unknown: Vec<&str> = Vec::new();
        for (item_id, score) in &m.scores {
            if !score.is_finite() {
                return Err(Error::NonFiniteScore {
                    item_id: item_id.clone(),
                });
            }
            if !seen.insert(item_id.as_str()) {
                return Err(Error::DuplicateItemId {
                    item_id: item_id.clone(),
                });
            }
            match index.get(item_id.as_str()) {
                Some(&i) => rows.push((i, item_id.as_str(), *score)),
                None => unknown.push(item_id.as_str()),
            }
        }
        let missing: Vec<&str> = if rows.len() < table.len() {
            table
                .items()
                .iter()
                .map(|it| it.item_id.as_str())
                .filter(|id| !seen.contains(*id))
                .collect()
        } else {
            Vec::new()
        };
        if !unknown.is_empty() || !missing.is_empty() {
            return Err(Error::ItemIdMismatch {
                model_id: m.model_id.clone(),
                description: describe_mismatch(&unknown, &missing),
            });
        }
        // Canonical order: descending score, item id ascending on ties.
        rows.sort_by(|a, b| {
            b.2.partial_cmp(&a.2)
                .expect("scores validated finite")
                .then_with(|| a.1.cmp(b.1))
        });
        perms.push(rows.into_iter().map(|(i, _, _)| i).collect());
    }
    Ok(Prepared {
        perms,
        ratings: table
            .items()
            .iter()
            .map(|item| item.ratings.clone())
            .collect(),
    })
}

fn describe_mismatch(unknown: &[&str], missing: &[&str]) -> String {
    let mut parts = Vec::new();
    if !unknown.is_empty() {
        parts.push(format!(
            "{} scored item(s) without annotations (first: {})",
            unknown.len(),
            unknown.iter().take(10).cloned().collect::<Vec<_>>().join(", ")
        ));
    }
    if !missing.is_empty() {
        parts.push(format!(
            "{} annotated item(s) without scores (first: {})",
            missing.len(),
            missing.iter().take(10).cloned().collect::<Vec<_>>().join(", ")
        ));
    }
    parts.join("; ")
}

/// Metric values per model for one set of labels, or `None` when the metric
/// is degenerate on these labels (shared across models, since labels are).
fn metric_values<S: Scalar>(
    prepared: &Prepared<S>,
    labels: &[S],
    needs_negatives: bool,
    auroc_kernel: bool,
    buf: &mut Vec<S>,
) -> Option<Vec<S>> {
    let mut pos = KahanSum::new();
    let mut neg = KahanSum::new();
    for &v in labels {
        pos.add(v);
        neg.add(S::one() - v);
    }
    if pos.value() <= S::zero() || (needs_negatives && neg.value() <= S::zero()) {
        return None;
    }
    let mut out = Vec::with_capacity(prepared.perms.len());
    for perm in &prepared.perms {
        buf.clear();
        buf.extend(perm.iter().map(|&i| labels[i]));
        let value = if auroc_kernel {
            soft_auroc_from_sorted(buf)
        } else {
            soft_ap_from_sorted(buf)
        };
        out.push(value.ok()?);
    }
    Some(out)
}

fn rank_vector<S: Scalar>(values: &[S]) -> Vec<f64> {
    ranks_from_values(values)
}

/// Per-metric rank vectors for one label assignment. Index order follows
/// [`MetricName::ALL`]: AUROC, AP, s-AUROC, s-AP.
fn replicate_rank_vectors<S: Scalar>(
    prepared: &Prepared<S>,
    soft: &[S],
    hard: &[S],
    buf: &mut Vec<S>,
) -> [Option<Vec<f64>>; 4] {
    let auroc = metric_values(prepared, hard, true, true, buf).map(|v| rank_vector(&v));
    let ap = metric_values(prepared, hard, false, false, buf).map(|v| rank_vector(&v));
    let s_auroc = metric_values(prepared, soft, true, true, buf).map(|v| rank_vector(&v));
    let s_ap = metric_values(prepared, soft, false, false, buf).map(|v| rank_vector(&v));
    [auroc, ap, s_auroc, s_ap]
}

fn run_replicate<S: Scalar>(
    prepared: &Prepared<S>,
    pipeline: &AggregationPipeline<S>,
    originals: &[Option<Vec<f64>>; 4],
    seed: u64,
    iteration: u64,
) -> Result<ReplicateCorrelations> {
    let mut rng = replicate_rng(seed, iteration);
    let n = prepared.ratings.len();
    let mut soft = Vec::with_capacity(n);
    let mut hard = Vec::with_capacity(n);
    let mut draw = Vec::new();
    for ratings in &prepared.ratings {
        draw.clear();
        for _ in 0..ratings.len() {
            draw.push(ratings[rng.random_range(0..ratings.len())]);
        }
        let agg = pipeline.aggregate_ratings(&draw)?;
        soft.push(agg.soft.probability());
        hard.push(agg.hard.as_scalar::<S>());
    }
    let mut buf = Vec::new();
    let replicate = replicate_rank_vectors(prepared, &soft, &hard, &mut buf);
    let mut out: ReplicateCorrelations = [None; 4];
    for (slot, (orig, repl)) in out.iter_mut().zip(originals.iter().zip(&replicate)) {
        if let (Some(o), Some(r)) = (orig, repl) {
            let rho = spearman_from_rank_vectors(o, r);
            let tau = kendall_from_rank_vectors(o, r);
            if let (Some(rho), Some(tau)) = (rho, tau) {
                *slot = Some((rho, tau));
            }
        }
    }
    Ok(out)
}

/// Annotation-bootstrap stability analysis.
///
/// `threads` caps worker parallelism (`<= 1` runs sequentially). The report
/// is bit-identical for any thread count: every replicate derives its RNG
/// from `(seed, iteration)` and aggregation runs in iteration order.
pub fn bootstrap_stability<S: Scalar>(
    models: &[ModelScores<S>],
    table: &AnnotationTable<S>,
    config: &BootstrapConfig<S>,
    threads: usize,
) -> Result<StabilityReport> {
    if config.iterations == 0 {
        return Err(Error::ZeroIterations);
    }
    let prepared = prepare(models, table)?;
    let pipeline = &config.pipeline;

    let original_labels = pipeline.aggregate(table)?;
    let soft: Vec<S> = original_labels.iter().map(|a| a.soft.probability()).collect();
    let hard: Vec<S> = original_labels.iter().map(|a| a.hard.as_scalar()).collect();
    let mut buf = Vec::new();
    let originals = replicate_rank_vectors(&prepared, &soft, &hard, &mut buf);

    let iterations = config.iterations;
    let run = |t: u64| run_replicate(&prepared, pipeline, &originals, config.seed, t);
    let replicates: Vec<ReplicateCorrelations> = if threads <= 1 {
        (0..iterations).map(run).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            (0..iterations)
                .into_par_iter()
                .map(run)
                .collect::<Result<_>>()
        })?
    };

    let mut metrics = Vec::with_capacity(4);
    for (idx, _name) in MetricName::ALL.iter().enumerate() {
        let mut rho_sum = KahanSum::new();
        let mut tau_sum = KahanSum::new();
        let mut kept = 0u64;
        for r in &replicates {
            if let Some((rho, tau)) = r[idx] {
                rho_sum.add(rho);
                tau_sum.add(tau);
                kept += 1;
            }
        }
        metrics.push(MetricStability {
            mean_spearman: (kept > 0).then(|| rho_sum.value() / kept as f64),
            mean_kendall: (kept > 0).then(|| tau_sum.value() / kept as f64),
            skipped_iterations: iterations - kept,
        });
    }

    let pair_counts = |ordinary: usize, soft_idx: usize, use_kendall: bool| {
        let mut wins_soft = 0u64;
        let mut wins_ordinary = 0u64;
        let mut ties = 0u64;
        for r in &replicates {
            match (r[ordinary], r[soft_idx]) {
                (Some(o), Some(s)) => {
                    let (o, s) = if use_kendall { (o.1, s.1) } else { (o.0, s.0) };
                    if s > o {
                        wins_soft += 1;
                    } else if o > s {
                        wins_ordinary += 1;
                    } else {
                        ties += 1;
                    }
                }
                // A replicate where either side is unavailable is
                // uninformative; count it as a tie so the totals close.
                _ => ties += 1,
            }
        }
        PairCounts {
            wins_soft,
            wins_ordinary,
            ties,
            p_value: sign_test(wins_soft, wins_ordinary),
        }
    };
    let pair = |ordinary: usize, soft_idx: usize| PairStability {
        kendall: pair_counts(ordinary, soft_idx, true),
        spearman: pair_counts(ordinary, soft_idx, false),
    };

    let mut it = metrics.into_iter();
    let report = StabilityReport {
        seed: config.seed,
        iterations,
        metrics: PerMetricStability {
            auroc: it.next().unwrap(),
            ap: it.next().unwrap(),
            s_auroc: it.next().unwrap(),
            s_ap: it.next().unwrap(),
        },
        pairs: PerPairStability {
            auroc_vs_s_auroc: pair(0, 2),
            ap_vs_s_ap: pair(1, 3),
        },
    };
    debug_assert!(MetricPair::ALL.iter().all(|&p| {
        let c = &report.pair(p).kendall;
        c.wins_soft + c.wins_ordinary + c.ties == iterations
    }));
    Ok(report)
}
