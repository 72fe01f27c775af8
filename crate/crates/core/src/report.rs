//! Ordinary-vs-soft comparison reports.
//!
//! Assembles per-model metric quads into rankings, rank-flip sets, and
//! Pearson R² summaries, and serializes them canonically so golden-file
//! comparisons are stable across platforms.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::json::{format_float, Value};
use crate::labels::AggregatedItem;
use crate::metrics::{LabeledScoreSet, MetricName, MetricPair, MetricQuad, ScoredItem};
use crate::scalar::Scalar;
use crate::stability::{pearson_r2, ranks_from_values, ModelScores};

/// One pair of models whose relative order inverts between an ordinary
/// metric and its soft counterpart. `model_a < model_b` by id.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Flip {
    pub model_a: String,
    pub model_b: String,
    /// The model ahead under the ordinary metric (the other leads under the
    /// soft one).
    pub ordinary_leader: String,
    pub soft_leader: String,
}

/// Flip analysis for one metric pair. Models with an undefined value on
/// either metric of the pair are excluded and listed; `compared_pairs`
/// counts the pairs actually examined, out of `total_pairs = C(m, 2)`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PairFlips {
    pub flips: Vec<Flip>,
    pub excluded_models: Vec<String>,
    pub compared_pairs: u64,
    pub total_pairs: u64,
}

/// All unordered model pairs whose relative order differs between the two
/// metrics of `pair`. Exact value ties on either metric are unordered and
/// never count as flips. Output is sorted by `(model_a, model_b)`.
pub fn detect_flips<S: Scalar>(
    quads: &BTreeMap<String, MetricQuad<S>>,
    pair: MetricPair,
) -> PairFlips {
    let mut included: Vec<(&String, S, S)> = Vec::new();
    let mut excluded: Vec<String> = Vec::new();
    for (id, quad) in quads {
        match (quad.get(pair.ordinary()), quad.get(pair.soft())) {
            (Some(o), Some(s)) => included.push((id, o, s)),
            _ => excluded.push(id.clone()),
        }
    }
    let mut flips = Vec::new();
    for i in 0..included.len() {
        for j in (i + 1)..included.len() {
            let (id_a, ord_a, soft_a) = (&included[i].0, included[i].1, included[i].2);
            let (id_b, ord_b, soft_b) = (&included[j].0, included[j].1, included[j].2);
            let ordinary_says_a = ord_a > ord_b;
            let soft_says_a = soft_a > soft_b;
            if ord_a == ord_b || soft_a == soft_b || ordinary_says_a == soft_says_a {
                continue;
            }
            let (ordinary_leader, soft_leader) = if ordinary_says_a {
                (id_a, id_b)
            } else {
                (id_b, id_a)
            };
            flips.push(Flip {
                model_a: (*id_a).clone(),
                model_b: (*id_b).clone(),
                ordinary_leader: (*ordinary_leader).clone(),
                soft_leader: (*soft_leader).clone(),
            });
        }
    }
    let m = quads.len() as u64;
    let k = included.len() as u64;
    PairFlips {
        flips,
        excluded_models: excluded,
        compared_pairs: k * k.saturating_sub(1) / 2,
        total_pairs: m * m.saturating_sub(1) / 2,
    }
}

/// Pearson R² between each ordinary metric and its soft counterpart across
/// models. `None` when fewer than two models have both values or either
/// column has zero variance.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct R2Summary {
    pub auroc_vs_s_auroc: Option<f64>,
    pub ap_vs_s_ap: Option<f64>,
}

impl R2Summary {
    pub fn get(&self, pair: MetricPair) -> Option<f64> {
        match pair {
            MetricPair::AurocVsSoftAuroc => self.auroc_vs_s_auroc,
            MetricPair::ApVsSoftAp => self.ap_vs_s_ap,
        }
    }
}

pub fn summarize_r2<S: Scalar>(quads: &BTreeMap<String, MetricQuad<S>>) -> R2Summary {
    let r2_for = |pair: MetricPair| {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for quad in quads.values() {
            if let (Some(o), Some(s)) = (quad.get(pair.ordinary()), quad.get(pair.soft())) {
                xs.push(o);
                ys.push(s);
            }
        }
        pearson_r2(&xs, &ys).map(|v| v.as_f64())
    };
    R2Summary {
        auroc_vs_s_auroc: r2_for(MetricPair::AurocVsSoftAuroc),
        ap_vs_s_ap: r2_for(MetricPair::ApVsSoftAp),
    }
}

/// Average ranks (1 = best) per metric, over the models with a defined value.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
pub struct RankingsByMetric {
    pub auroc: BTreeMap<String, f64>,
    pub ap: BTreeMap<String, f64>,
    pub s_auroc: BTreeMap<String, f64>,
    pub s_ap: BTreeMap<String, f64>,
}

impl RankingsByMetric {
    pub fn get(&self, metric: MetricName) -> &BTreeMap<String, f64> {
        match metric {
            MetricName::Auroc => &self.auroc,
            MetricName::Ap => &self.ap,
            MetricName::SoftAuroc => &self.s_auroc,
            MetricName::SoftAp => &self.s_ap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct FlipsByPair {
    pub auroc_vs_s_auroc: PairFlips,
    pub ap_vs_s_ap: PairFlips,
}

impl FlipsByPair {
    pub fn get(&self, pair: MetricPair) -> &PairFlips {
        match pair {
            MetricPair::AurocVsSoftAuroc => &self.auroc_vs_s_auroc,
            MetricPair::ApVsSoftAp => &self.ap_vs_s_ap,
        }
    }
}

/// Ordinary-vs-soft comparison of all models on one task.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ComparisonReport {
    pub task_id: String,
    pub models: BTreeMap<String, MetricQuad<f64>>,
    pub rankings: RankingsByMetric,
    pub flips: FlipsByPair,
    pub r2: R2Summary,
}

impl ComparisonReport {
    /// Assemble the full report from per-model quads.
    pub fn build(task_id: impl Into<String>, models: BTreeMap<String, MetricQuad<f64>>) -> Self {
        let mut rankings = RankingsByMetric::default();
        for metric in MetricName::ALL {
            let defined: Vec<(&str, f64)> = models
                .iter()
                .filter_map(|(id, quad)| quad.get(metric).map(|v| (id.as_str(), v)))
                .collect();
            if defined.is_empty() {
                continue;
            }
            let values: Vec<f64> = defined.iter().map(|&(_, v)| v).collect();
            let ranks = ranks_from_values(&values);
            let map = match metric {
                MetricName::Auroc => &mut rankings.auroc,
                MetricName::Ap => &mut rankings.ap,
                MetricName::SoftAuroc => &mut rankings.s_auroc,
                MetricName::SoftAp => &mut rankings.s_ap,
            };
            for ((id, _), rank) in defined.iter().zip(ranks) {
                map.insert((*id).to_string(), rank);
            }
        }
        let flips = FlipsByPair {
            auroc_vs_s_auroc: detect_flips(&models, MetricPair::AurocVsSoftAuroc),
            ap_vs_s_ap: detect_flips(&models, MetricPair::ApVsSoftAp),
        };
        let r2 = summarize_r2(&models);
        let report = Self {
            task_id: task_id.into(),
            models,
            rankings,
            flips,
            r2,
        };
        report.assert_pair_arithmetic();
        report
    }

    /// Compared plus excluded pairs must tile C(m, 2) exactly.
    fn assert_pair_arithmetic(&self) {
        let m = self.models.len() as u64;
        let total = m * m.saturating_sub(1) / 2;
        for pair in MetricPair::ALL {
            let f = self.flips.get(pair);
            let k = m - f.excluded_models.len() as u64;
            assert_eq!(f.total_pairs, total, "pair totals must cover C(m,2)");
            assert_eq!(
                f.compared_pairs,
                k * k.saturating_sub(1) / 2,
                "compared pairs must be C(m - excluded, 2)"
            );
        }
    }

    pub fn to_canon_value(&self) -> Value {
        let mut root = Value::object();
        root.insert("task_id", Value::Str(self.task_id.clone()));

        let mut models = Value::object();
        for (id, quad) in &self.models {
            let mut q = Value::object();
            for metric in MetricName::ALL {
                q.insert(
                    metric.key(),
                    Value::opt_float(quad.get(metric)),
                );
            }
            models.insert(id, q);
        }
        root.insert("models", models);

        let mut rankings = Value::object();
        for metric in MetricName::ALL {
            let mut r = Value::object();
            for (id, rank) in self.rankings.get(metric) {
                r.insert(id, Value::Float(*rank));
            }
            rankings.insert(metric.key(), r);
        }
        root.insert("rankings", rankings);

        let mut flips = Value::object();
        for pair in MetricPair::ALL {
            let f = self.flips.get(pair);
            let mut p = Value::object();
            p.insert(
                "flips",
                Value::Array(
                    f.flips
                        .iter()
                        .map(|fl| {
                            let mut o = Value::object();
                            o.insert("model_a", Value::Str(fl.model_a.clone()));
                            o.insert("model_b", Value::Str(fl.model_b.clone()));
                            o.insert("ordinary_leader", Value::Str(fl.ordinary_leader.clone()));
                            o.insert("soft_leader", Value::Str(fl.soft_leader.clone()));
                            o
                        })
                        .collect(),
                ),
            );
            p.insert(
                "excluded_models",
                Value::Array(
                    f.excluded_models
                        .iter()
                        .map(|id| Value::Str(id.clone()))
                        .collect(),
                ),
            );
            p.insert("compared_pairs", Value::UInt(f.compared_pairs));
            p.insert("total_pairs", Value::UInt(f.total_pairs));
            flips.insert(pair.key(), p);
        }
        root.insert("flips", flips);

        let mut r2 = Value::object();
        r2.insert(
            "auroc_vs_s_auroc",
            Value::opt_float(self.r2.auroc_vs_s_auroc),
        );
        r2.insert("ap_vs_s_ap", Value::opt_float(self.r2.ap_vs_s_ap));
        root.insert("r2", r2);
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

    /// Flat CSV: one row per model with metric values and ranks; undefined
    /// cells stay empty.
    pub fn flat_csv(&self) -> String {
        let mut out = String::from(
            "task,model,auroc,ap,s_auroc,s_ap,rank_auroc,rank_ap,rank_s_auroc,rank_s_ap\n",
        );
        for (id, quad) in &self.models {
            let mut row: Vec<String> = vec![csv_field(&self.task_id), csv_field(id)];
            for metric in MetricName::ALL {
                row.push(quad.get(metric).map(format_float).unwrap_or_default());
            }
            for metric in MetricName::ALL {
                row.push(
                    self.rankings
                        .get(metric)
                        .get(id)
                        .map(|r| format_float(*r))
                        .unwrap_or_default(),
                );
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Plot-ready CSV of (ordinary, soft) point pairs, one row per model and
    /// metric pair, for scatter reproduction.
    pub fn scatter_csv(&self) -> String {
        let mut out = String::from("task,model,pair,ordinary,soft\n");
        for pair in MetricPair::ALL {
            for (id, quad) in &self.models {
                if let (Some(o), Some(s)) = (quad.get(pair.ordinary()), quad.get(pair.soft())) {
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        csv_field(&self.task_id),
                        csv_field(id),
                        pair.key(),
                        format_float(o),
                        format_float(s)
                    ));
                }
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Join model scores with aggregated labels and compute each model's quad.
/// Every model must score exactly the labeled item set.
pub fn evaluate_models<S: Scalar>(
    models: &[ModelScores<S>],
    labels: &[AggregatedItem<S>],
) -> Result<BTreeMap<String, MetricQuad<S>>> {
    let by_id: BTreeMap<&str, &AggregatedItem<S>> = labels
        .iter()
        .map(|item| (item.item_id.as_str(), item))
        .collect();
    let mut out = BTreeMap::new();
    for model in models {
        if out.contains_key(&model.model_id) {
            return Err(Error::DuplicateModelId {
                model_id: model.model_id.clone(),
            });
        }
        let mut items = Vec::with_capacity(model.scores.len());
        let mut unknown = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (item_id, score) in &model.scores {
            if !seen.insert(item_id.as_str()) {
                return Err(Error::DuplicateItemId {
                    item_id: item_id.clone(),
                });
            }
            match by_id.get(item_id.as_str()) {
                Some(label) => items.push(
                    ScoredItem::new(item_id.clone(), *score, label.soft).with_hard(label.hard),
                ),
                None => unknown.push(item_id.as_str()),
            }
        }
        let missing: Vec<&str> = if items.len() < labels.len() {
            labels
                .iter()
                .map(|l| l.item_id.as_str())
                .filter(|id| !seen.contains(*id))
                .collect()
        } else {
            Vec::new()
        };
        if !unknown.is_empty() || !missing.is_empty() {
            let mut parts = Vec::new();
            if !unknown.is_empty() {
                parts.push(format!(
                    "{} scored item(s) without labels (first: {})",
                    unknown.len(),
                    unknown.iter().take(10).cloned().collect::<Vec<_>>().join(", ")
                ));
            }
            if !missing.is_empty() {
                parts.push(format!(
                    "{} labeled item(s) without scores (first: {})",
                    missing.len(),
                    missing.iter().take(10).cloned().collect::<Vec<_>>().join(", ")
                ));
            }
            return Err(Error::ItemIdMismatch {
                model_id: model.model_id.clone(),
                description: parts.join("; "),
            });
        }
        let set = LabeledScoreSet::new(items)?;
        out.insert(model.model_id.clone(), set.metric_quad());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::{HardLabel, SoftLabel};
    use proptest::prelude::*;

    fn quad(auroc: f64, ap: f64, s_auroc: f64, s_ap: f64) -> MetricQuad<f64> {
        MetricQuad {
            auroc: Some(auroc),
            ap: Some(ap),
            s_auroc: Some(s_auroc),
            s_ap: Some(s_ap),
        }
    }

    fn quads(entries: &[(&str, MetricQuad<f64>)]) -> BTreeMap<String, MetricQuad<f64>> {
        entries
            .iter()
            .map(|(id, q)| (id.to_string(), *q))
            .collect()
    }

    #[test]
    fn constructed_inversion_is_detected() {
        // AP: A 0.9 > B 0.8; s-AP: B 0.75 > A 0.7.
        let q = quads(&[
            ("A", quad(0.5, 0.9, 0.5, 0.7)),
            ("B", quad(0.5, 0.8, 0.5, 0.75)),
        ]);
        let f = detect_flips(&q, MetricPair::ApVsSoftAp);
        assert_eq!(f.flips.len(), 1);
        assert_eq!(f.flips[0].model_a, "A");
        assert_eq!(f.flips[0].model_b, "B");
        assert_eq!(f.flips[0].ordinary_leader, "A");
        assert_eq!(f.flips[0].soft_leader, "B");
        assert_eq!(f.compared_pairs, 1);
    }

    #[test]
    fn identical_orderings_have_no_flips() {
        let q = quads(&[
            ("A", quad(0.9, 0.9, 0.8, 0.8)),
            ("B", quad(0.8, 0.8, 0.7, 0.7)),
            ("C", quad(0.7, 0.7, 0.6, 0.6)),
        ]);
        for pair in MetricPair::ALL {
            assert!(detect_flips(&q, pair).flips.is_empty());
        }
    }

    #[test]
    fn exact_ties_are_unordered_and_never_flip() {
        let q = quads(&[
            ("A", quad(0.5, 0.9, 0.5, 0.7)),
            ("B", quad(0.5, 0.9, 0.5, 0.8)),
        ]);
        assert!(detect_flips(&q, MetricPair::ApVsSoftAp).flips.is_empty());
    }

    #[test]
    fn undefined_models_are_excluded_with_note() {
        let mut q = quads(&[
            ("A", quad(0.9, 0.9, 0.8, 0.8)),
            ("B", quad(0.8, 0.7, 0.9, 0.9)),
        ]);
        q.insert(
            "C".into(),
            MetricQuad {
                auroc: None,
                ap: Some(0.5),
                s_auroc: None,
                s_ap: Some(0.5),
            },
        );
        let f = detect_flips(&q, MetricPair::AurocVsSoftAuroc);
        assert_eq!(f.excluded_models, vec!["C".to_string()]);
        assert_eq!(f.compared_pairs, 1);
        assert_eq!(f.total_pairs, 3);
        assert_eq!(f.flips.len(), 1);
    }

    #[test]
    fn r2_two_models_is_one_and_constant_is_undefined() {
        let q = quads(&[
            ("A", quad(0.9, 0.9, 0.8, 0.8)),
            ("B", quad(0.8, 0.7, 0.9, 0.9)),
        ]);
        let r2 = summarize_r2(&q);
        assert_eq!(r2.auroc_vs_s_auroc, Some(1.0));
        assert_eq!(r2.ap_vs_s_ap, Some(1.0));

        let same = quad(0.5, 0.5, 0.5, 0.5);
        let q = quads(&[("A", same), ("B", same), ("C", same)]);
        let r2 = summarize_r2(&q);
        assert_eq!(r2.auroc_vs_s_auroc, None);
        assert_eq!(r2.ap_vs_s_ap, None);
    }

    #[test]
    fn r2_matches_direct_column_correlation() {
        let q = quads(&[
            ("A", quad(0.636, 0.571, 0.585, 0.592)),
            ("B", quad(0.656, 0.621, 0.593, 0.618)),
            ("C", quad(0.707, 0.655, 0.617, 0.625)),
            ("D", quad(0.635, 0.600, 0.594, 0.621)),
        ]);
        let r2 = summarize_r2(&q);
        let auroc: Vec<f64> = q.values().map(|v| v.auroc.unwrap()).collect();
        let s_auroc: Vec<f64> = q.values().map(|v| v.s_auroc.unwrap()).collect();
        assert_eq!(r2.auroc_vs_s_auroc, pearson_r2(&auroc, &s_auroc));
    }

    #[test]
    fn report_round_trip_is_byte_identical() {
        let q = quads(&[
            ("vgg-16", quad(0.928, 0.232, 0.924, 0.224)),
            ("resnet-50", quad(0.877, 0.090, 0.866, 0.082)),
            ("vit-base", quad(0.915, 0.093, 0.912, 0.096)),
        ]);
        let report = ComparisonReport::build("vindr-pneumothorax", q);
        let first = report.to_canonical_json();
        let parsed = ComparisonReport::from_json(&first).unwrap();
        assert_eq!(parsed, report);
        let second = parsed.to_canonical_json();
        assert_eq!(first, second);
    }

    #[test]
    fn flat_and_scatter_exports_carry_all_models() {
        let q = quads(&[
            ("A", quad(0.9, 0.9, 0.8, 0.8)),
            ("B", quad(0.8, 0.7, 0.9, 0.9)),
        ]);
        let report = ComparisonReport::build("t", q);
        let flat = report.flat_csv();
        assert_eq!(flat.lines().count(), 3);
        assert!(flat.starts_with("task,model,auroc"));
        let scatter = report.scatter_csv();
        // 2 models x 2 pairs + header.
        assert_eq!(scatter.lines().count(), 5);
    }

    #[test]
    fn evaluate_models_rejects_misaligned_ids() {
        let labels = vec![
            AggregatedItem {
                item_id: "a".into(),
                soft: SoftLabel::new(1.0).unwrap(),
                hard: HardLabel::new(true),
                tie_resolved: false,
            },
            AggregatedItem {
                item_id: "b".into(),
                soft: SoftLabel::new(0.0).unwrap(),
                hard: HardLabel::new(false),
                tie_resolved: false,
            },
        ];
        let good = ModelScores::new("m", vec![("a".into(), 0.9), ("b".into(), 0.1)]);
        let quads = evaluate_models(&[good], &labels).unwrap();
        assert_eq!(quads["m"].auroc, Some(1.0));
        assert_eq!(quads["m"].s_ap, Some(1.0));

        let unknown = ModelScores::new("m", vec![("a".into(), 0.9), ("zz".into(), 0.1)]);
        assert!(matches!(
            evaluate_models(&[unknown], &labels),
            Err(Error::ItemIdMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn flips_empty_iff_orderings_identical(
            ord in proptest::collection::vec(0.0f64..=1.0, 2..6),
            soft in proptest::collection::vec(0.0f64..=1.0, 6),
        ) {
            // Index-scaled nudges keep every value distinct so both metrics
            // induce total orders.
            let m = ord.len();
            let q: BTreeMap<String, MetricQuad<f64>> = (0..m)
                .map(|i| {
                    let o = (ord[i] * 8.0).round() / 8.0 + (i + 1) as f64 * 1e-9;
                    let s = (soft[i] * 8.0).round() / 8.0 + (i + 1) as f64 * 2e-9;
                    (format!("m{i}"), quad(o, 0.5, s, 0.5))
                })
                .collect();
            let f = detect_flips(&q, MetricPair::AurocVsSoftAuroc);
            let vals: Vec<(f64, f64)> = q.values().map(|v| (v.auroc.unwrap(), v.s_auroc.unwrap())).collect();
            let mut identical = true;
            for i in 0..m {
                for j in (i + 1)..m {
                    if (vals[i].0 > vals[j].0) != (vals[i].1 > vals[j].1) {
                        identical = false;
                    }
                }
            }
            prop_assert_eq!(f.flips.is_empty(), identical);
        }
    }
}
