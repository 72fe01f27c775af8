//! CSV ingestion and export.
//!
//! Annotations arrive in long form (`item_id,annotator_id,rating`), scores
//! either narrow (`item_id,score`, one file per model) or wide
//! (`item_id,score_<model>,...`). Scale bounds are always supplied
//! out-of-band, never inferred from data. All reals are written with 17
//! significant digits so files round-trip exactly.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::json::format_float;
use crate::labels::{AggregatedItem, AnnotationItem, AnnotationTable, RatingScale};
use crate::metrics::{MetricQuad, PrPoint, RocPoint};
use crate::stability::ModelScores;

fn schema_error(path: &str, line: u64, message: impl Into<String>) -> Error {
    Error::CsvSchema {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn headers<R: Read>(reader: &mut csv::Reader<R>, path: &str) -> Result<Vec<String>> {
    Ok(reader
        .headers()
        .map_err(|e| schema_error(path, 1, e.to_string()))?
        .iter()
        .map(|h| h.to_string())
        .collect())
}

/// Read long-form annotations. Rows sharing an `item_id` merge into that
/// item's rating multiset; item order follows first appearance.
pub fn read_annotations<R: Read>(
    input: R,
    path: &str,
    scale: RatingScale<f64>,
) -> Result<AnnotationTable<f64>> {
    let mut reader = csv_reader(input);
    let header = headers(&mut reader, path)?;
    if header == ["item_id", "p", "y"] {
        return Err(schema_error(
            path,
            1,
            "this is an aggregated label file (`item_id,p,y`); aggregation discards the \
             per-annotator rating multisets, so aggregated labels cannot be resampled — \
             supply the raw annotation CSV instead",
        ));
    }
    if header != ["item_id", "annotator_id", "rating"] {
        return Err(schema_error(
            path,
            1,
            format!(
                "expected header `item_id,annotator_id,rating`, found `{}`",
                header.join(",")
            ),
        ));
    }
    let mut order: Vec<String> = Vec::new();
    let mut ratings: BTreeMap<String, (Vec<f64>, Vec<Option<String>>)> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| schema_error(path, 0, e.to_string()))?;
        let line = record_line(&record);
        if record.len() != 3 {
            return Err(schema_error(path, line, "expected 3 columns"));
        }
        let item_id = record[0].to_string();
        if item_id.is_empty() {
            return Err(schema_error(path, line, "empty item_id"));
        }
        let annotator = (!record[1].is_empty()).then(|| record[1].to_string());
        let rating: f64 = record[2].parse().map_err(|_| {
            schema_error(path, line, format!("rating `{}` is not a number", &record[2]))
        })?;
        if !rating.is_finite() {
            return Err(schema_error(
                path,
                line,
                format!("rating for item `{item_id}` is not finite"),
            ));
        }
        let entry = ratings.entry(item_id.clone()).or_insert_with(|| {
            order.push(item_id);
            (Vec::new(), Vec::new())
        });
        entry.0.push(rating);
        entry.1.push(annotator);
    }
    if order.is_empty() {
        return Err(schema_error(path, 1, "no annotation rows"));
    }
    let items = order
        .into_iter()
        .map(|id| {
            let (values, annotators) = ratings.remove(&id).expect("collected above");
            let annotator_ids: Option<Vec<String>> = annotators.into_iter().collect();
            AnnotationItem {
                item_id: id,
                ratings: values,
                annotator_ids,
            }
        })
        .collect();
    AnnotationTable::new(items, scale)
}

pub fn read_annotations_file(path: &Path, scale: RatingScale<f64>) -> Result<AnnotationTable<f64>> {
    let file = open(path)?;
    read_annotations(file, &path.display().to_string(), scale)
}

/// Read model scores. A `item_id,score` header yields one model named
/// `default_model_id`; a wide `item_id,score_<model>,...` header yields one
/// model per column.
pub fn read_scores<R: Read>(
    input: R,
    path: &str,
    default_model_id: &str,
) -> Result<Vec<ModelScores<f64>>> {
    let mut reader = csv_reader(input);
    let header = headers(&mut reader, path)?;
    let model_ids: Vec<String> = if header == ["item_id", "score"] {
        vec![default_model_id.to_string()]
    } else if header.len() >= 2
        && header[0] == "item_id"
        && header[1..].iter().all(|h| h.starts_with("score_"))
    {
        let ids: Vec<String> = header[1..]
            .iter()
            .map(|h| h["score_".len()..].to_string())
            .collect();
        if ids.iter().any(|id| id.is_empty()) {
            return Err(schema_error(path, 1, "empty model id in `score_` column"));
        }
        let mut seen = std::collections::HashSet::new();
        for id in &ids {
            if !seen.insert(id) {
                return Err(Error::DuplicateModelId {
                    model_id: id.clone(),
                });
            }
        }
        ids
    } else {
        return Err(schema_error(
            path,
            1,
            format!(
                "expected `item_id,score` or `item_id,score_<model>...`, found `{}`",
                header.join(",")
            ),
        ));
    };

    let mut scores: Vec<Vec<(String, f64)>> = vec![Vec::new(); model_ids.len()];
    let mut seen_items = std::collections::HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| schema_error(path, 0, e.to_string()))?;
        let line = record_line(&record);
        if record.len() != model_ids.len() + 1 {
            return Err(schema_error(
                path,
                line,
                format!("expected {} columns", model_ids.len() + 1),
            ));
        }
        let item_id = record[0].to_string();
        if item_id.is_empty() {
            return Err(schema_error(path, line, "empty item_id"));
        }
        if !seen_items.insert(item_id.clone()) {
            return Err(schema_error(
                path,
                line,
                format!("duplicate score row for item `{item_id}`"),
            ));
        }
        for (k, column) in scores.iter_mut().enumerate() {
            let raw = &record[k + 1];
            let value: f64 = raw.parse().map_err(|_| {
                schema_error(path, line, format!("score `{raw}` is not a number"))
            })?;
            if !value.is_finite() {
                return Err(schema_error(
                    path,
                    line,
                    format!("score for item `{item_id}` is not finite"),
                ));
            }
            column.push((item_id.clone(), value));
        }
    }
    if seen_items.is_empty() {
        return Err(schema_error(path, 1, "no score rows"));
    }
    Ok(model_ids
        .into_iter()
        .zip(scores)
        .map(|(model_id, scores)| ModelScores { model_id, scores })
        .collect())
}

pub fn read_scores_file(path: &Path) -> Result<Vec<ModelScores<f64>>> {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| path.display().to_string());
    let file = open(path)?;
    read_scores(file, &path.display().to_string(), &stem)
}

/// Manifest mapping model ids to score file paths: header `model_id,path`.
pub fn read_manifest<R: Read>(input: R, path: &str) -> Result<Vec<(String, String)>> {
    let mut reader = csv_reader(input);
    let header = headers(&mut reader, path)?;
    if header != ["model_id", "path"] {
        return Err(schema_error(
            path,
            1,
            format!("expected header `model_id,path`, found `{}`", header.join(",")),
        ));
    }
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| schema_error(path, 0, e.to_string()))?;
        let line = record_line(&record);
        let model_id = record[0].to_string();
        if model_id.is_empty() || record[1].is_empty() {
            return Err(schema_error(path, line, "empty model_id or path"));
        }
        if !seen.insert(model_id.clone()) {
            return Err(Error::DuplicateModelId { model_id });
        }
        out.push((model_id, record[1].to_string()));
    }
    if out.is_empty() {
        return Err(schema_error(path, 1, "no manifest rows"));
    }
    Ok(out)
}

/// Aggregated labels as `item_id,p,y`.
pub fn write_labels(items: &[AggregatedItem<f64>]) -> String {
    let mut out = String::from("item_id,p,y\n");
    for item in items {
        out.push_str(&format!(
            "{},{},{}\n",
            csv_field(&item.item_id),
            format_float(item.soft.probability()),
            u8::from(item.hard.is_positive())
        ));
    }
    out
}

/// Precomputed quads: header `model,auroc,ap,s_auroc,s_ap` with an optional
/// leading `task` column; empty cells mark undefined values. Extra columns
/// (such as the rank columns in the flat export) are ignored.
pub fn read_quads<R: Read>(
    input: R,
    path: &str,
) -> Result<Vec<(String, String, MetricQuad<f64>)>> {
    let mut reader = csv_reader(input);
    let header = headers(&mut reader, path)?;
    let col = |name: &str| header.iter().position(|h| h == name);
    let task_col = col("task");
    let model_col = col("model")
        .ok_or_else(|| schema_error(path, 1, "missing `model` column"))?;
    let metric_cols: Vec<usize> = ["auroc", "ap", "s_auroc", "s_ap"]
        .iter()
        .map(|name| {
            col(name).ok_or_else(|| schema_error(path, 1, format!("missing `{name}` column")))
        })
        .collect::<Result<_>>()?;

    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| schema_error(path, 0, e.to_string()))?;
        let line = record_line(&record);
        let task = task_col
            .map(|c| record[c].to_string())
            .unwrap_or_else(|| "default".to_string());
        let model = record[model_col].to_string();
        if model.is_empty() {
            return Err(schema_error(path, line, "empty model id"));
        }
        let mut cells = [None; 4];
        for (slot, &c) in cells.iter_mut().zip(&metric_cols) {
            let raw = &record[c];
            if raw.is_empty() {
                continue;
            }
            let value: f64 = raw.parse().map_err(|_| {
                schema_error(path, line, format!("metric `{raw}` is not a number"))
            })?;
            if !value.is_finite() {
                return Err(schema_error(path, line, "metric value is not finite"));
            }
            *slot = Some(value);
        }
        out.push((
            task,
            model,
            MetricQuad {
                auroc: cells[0],
                ap: cells[1],
                s_auroc: cells[2],
                s_ap: cells[3],
            },
        ));
    }
    if out.is_empty() {
        return Err(schema_error(path, 1, "no quad rows"));
    }
    Ok(out)
}

pub fn read_quads_file(path: &Path) -> Result<Vec<(String, String, MetricQuad<f64>)>> {
    let file = open(path)?;
    read_quads(file, &path.display().to_string())
}

/// ROC step curve as `rank,fpr,tpr`.
pub fn write_roc_curve(points: &[RocPoint<f64>]) -> String {
    let mut out = String::from("rank,fpr,tpr\n");
    for (rank, p) in points.iter().enumerate() {
        out.push_str(&format!(
            "{rank},{},{}\n",
            format_float(p.fpr),
            format_float(p.tpr)
        ));
    }
    out
}

/// PR step curve as `rank,recall,precision`.
pub fn write_pr_curve(points: &[PrPoint<f64>]) -> String {
    let mut out = String::from("rank,recall,precision\n");
    for (rank, p) in points.iter().enumerate() {
        out.push_str(&format!(
            "{rank},{},{}\n",
            format_float(p.recall),
            format_float(p.precision)
        ));
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|source| Error::ReadInput {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_scale() -> RatingScale<f64> {
        RatingScale::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn annotations_merge_duplicate_item_rows() {
        let csv = "item_id,annotator_id,rating\na,r1,1\nb,r1,0\na,r2,0\na,r3,1\n";
        let table = read_annotations(csv.as_bytes(), "test.csv", unit_scale()).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table.items()[0].item_id, "a");
        assert_eq!(table.items()[0].ratings, vec![1.0, 0.0, 1.0]);
        assert_eq!(
            table.items()[0].annotator_ids,
            Some(vec!["r1".into(), "r2".into(), "r3".into()])
        );
    }

    #[test]
    fn annotations_reject_bad_rows_with_line_numbers() {
        let csv = "item_id,annotator_id,rating\na,r1,1\nb,r1,oops\n";
        match read_annotations(csv.as_bytes(), "test.csv", unit_scale()) {
            Err(Error::CsvSchema { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected schema error, got {other:?}"),
        }
        let csv = "item_id,annotator_id,rating\na,r1,NaN\n";
        assert!(read_annotations(csv.as_bytes(), "test.csv", unit_scale()).is_err());
        let csv = "wrong,header,here\na,r1,1\n";
        assert!(read_annotations(csv.as_bytes(), "test.csv", unit_scale()).is_err());
        let csv = "item_id,annotator_id,rating\n";
        assert!(read_annotations(csv.as_bytes(), "test.csv", unit_scale()).is_err());
    }

    #[test]
    fn annotations_with_partial_annotator_ids_drop_the_list() {
        let csv = "item_id,annotator_id,rating\na,r1,1\na,,0\n";
        let table = read_annotations(csv.as_bytes(), "test.csv", unit_scale()).unwrap();
        assert_eq!(table.items()[0].annotator_ids, None);
    }

    #[test]
    fn narrow_scores_take_model_id_from_caller() {
        let csv = "item_id,score\na,0.9\nb,0.1\n";
        let models = read_scores(csv.as_bytes(), "m1.csv", "m1").unwrap();
        assert_eq!(models.len(), 1);
        assert_eq!(models[0].model_id, "m1");
        assert_eq!(models[0].scores, vec![("a".into(), 0.9), ("b".into(), 0.1)]);
    }

    #[test]
    fn wide_scores_split_into_models() {
        let csv = "item_id,score_vgg,score_vit\na,0.9,0.2\nb,0.1,0.8\n";
        let models = read_scores(csv.as_bytes(), "wide.csv", "ignored").unwrap();
        assert_eq!(models.len(), 2);
        assert_eq!(models[0].model_id, "vgg");
        assert_eq!(models[1].model_id, "vit");
        assert_eq!(models[1].scores[1], ("b".into(), 0.8));
    }

    #[test]
    fn score_reader_rejects_duplicates_and_bad_headers() {
        let csv = "item_id,score\na,0.9\na,0.1\n";
        assert!(read_scores(csv.as_bytes(), "m.csv", "m").is_err());
        let csv = "item,value\na,0.9\n";
        assert!(read_scores(csv.as_bytes(), "m.csv", "m").is_err());
        let csv = "item_id,score_x,score_x\na,0.9,0.8\n";
        assert!(matches!(
            read_scores(csv.as_bytes(), "m.csv", "m"),
            Err(Error::DuplicateModelId { .. })
        ));
    }

    #[test]
    fn labels_round_trip_17_digits() {
        let item = AggregatedItem {
            item_id: "x".into(),
            soft: crate::labels::SoftLabel::new(1.0 / 3.0).unwrap(),
            hard: crate::labels::HardLabel::new(false),
            tie_resolved: false,
        };
        let text = write_labels(&[item]);
        let line = text.lines().nth(1).unwrap();
        let p: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(p.to_bits(), (1.0f64 / 3.0).to_bits());
        assert!(line.ends_with(",0"));
    }

    #[test]
    fn quads_parse_flat_export_columns() {
        let csv = "task,model,auroc,ap,s_auroc,s_ap,rank_auroc,rank_ap,rank_s_auroc,rank_s_ap\n\
                   t1,m1,0.9,0.8,0.7,0.6,1,1,1,1\n\
                   t1,m2,,0.5,0.4,0.3,,2,2,2\n";
        let rows = read_quads(csv.as_bytes(), "q.csv").unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].0, "t1");
        assert_eq!(rows[0].1, "m1");
        assert_eq!(rows[0].2.auroc, Some(0.9));
        assert_eq!(rows[1].2.auroc, None);
        assert_eq!(rows[1].2.s_ap, Some(0.3));
    }

    #[test]
    fn manifest_rejects_duplicates() {
        let csv = "model_id,path\nm1,a.csv\nm1,b.csv\n";
        assert!(matches!(
            read_manifest(csv.as_bytes(), "man.csv"),
            Err(Error::DuplicateModelId { .. })
        ));
    }

    #[test]
    fn curve_export_matches_schema() {
        let roc = write_roc_curve(&[
            RocPoint { fpr: 0.0, tpr: 0.0 },
            RocPoint { fpr: 0.2, tpr: 0.8 },
        ]);
        let mut lines = roc.lines();
        assert_eq!(lines.next(), Some("rank,fpr,tpr"));
        assert!(lines.next().unwrap().starts_with("0,"));
        let pr = write_pr_curve(&[PrPoint {
            recall: 0.0,
            precision: 1.0,
        }]);
        assert!(pr.starts_with("rank,recall,precision\n0,"));
    }
}
