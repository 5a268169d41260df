//! CSV, JSON and plain-text renderings of counts, predictions and scores.
//!
//! Rows are always ordered by team, then level, then kind name, so the
//! same inputs render byte-identical output.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Map, Value};
use smm_core::predictor::{Measure, PredictionReport};
use smm_core::scoring::ScoreCard;
use smm_core::{DiscrepancyKind, EpisodeCounts};

/// Column order for count tables.
pub const COUNT_COLUMNS: [DiscrepancyKind; 4] = [
    DiscrepancyKind::BeliefContradiction,
    DiscrepancyKind::Omission,
    DiscrepancyKind::UnsupportedBelief,
    DiscrepancyKind::FalseBelief,
];

fn csv_string(write: impl FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> csv::Result<()>) -> String {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        write(&mut w).expect("writing CSV to memory");
        w.flush().expect("flushing CSV to memory");
    }
    String::from_utf8(buf).expect("CSV of UTF-8 fields")
}

fn sorted(counts: &[EpisodeCounts]) -> Vec<&EpisodeCounts> {
    let mut rows: Vec<_> = counts.iter().collect();
    rows.sort_by_key(|c| (c.team, c.level));
    rows
}

/// `team,level,contradiction,omission,unsupported,false,total`
pub fn counts_csv(counts: &[EpisodeCounts]) -> String {
    csv_string(|w| {
        let mut header = vec!["team", "level"];
        header.extend(COUNT_COLUMNS.iter().map(|k| k.short_name()));
        header.push("total");
        w.write_record(&header)?;
        for c in sorted(counts) {
            let mut row = vec![c.team.to_string(), c.level.to_string()];
            row.extend(COUNT_COLUMNS.iter().map(|k| c.by_kind.get(*k).to_string()));
            row.push(c.total().to_string());
            w.write_record(&row)?;
        }
        Ok(())
    })
}

/// Long format for plotting: `team,level,kind,count`, one row per kind
/// and one for the total.
pub fn counts_long_csv(counts: &[EpisodeCounts]) -> String {
    csv_string(|w| {
        w.write_record(["team", "level", "kind", "count"])?;
        for c in sorted(counts) {
            for m in Measure::BY_NAME {
                let (team, level) = (c.team.to_string(), c.level.to_string());
                w.write_record([team.as_str(), &level, m.name(), &m.of(c).to_string()])?;
            }
        }
        Ok(())
    })
}

fn count_row_json(c: &EpisodeCounts) -> Value {
    let mut row = Map::new();
    row.insert("team".into(), json!(c.team.0));
    row.insert("level".into(), json!(c.level.0));
    for k in COUNT_COLUMNS {
        row.insert(k.short_name().into(), json!(c.by_kind.get(k)));
    }
    row.insert("total".into(), json!(c.total()));
    Value::Object(row)
}

pub fn counts_json(counts: &[EpisodeCounts]) -> String {
    let rows: Vec<Value> = sorted(counts).into_iter().map(count_row_json).collect();
    pretty(&rows)
}

pub fn counts_table(counts: &[EpisodeCounts]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:>5} {:>5}", "team", "level");
    for k in COUNT_COLUMNS {
        let _ = write!(out, " {:>13}", k.short_name());
    }
    let _ = writeln!(out, " {:>6}", "total");
    for c in sorted(counts) {
        let _ = write!(out, "{:>5} {:>5}", c.team, c.level);
        for k in COUNT_COLUMNS {
            let _ = write!(out, " {:>13}", c.by_kind.get(k));
        }
        let _ = writeln!(out, " {:>6}", c.total());
    }
    out
}

fn pretty<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory values serialize");
    s.push('\n');
    s
}

fn summary_lines(report: &PredictionReport) -> Vec<String> {
    let mut lines = Vec::new();
    let mae: Vec<String> = report
        .mae_by_kind
        .iter()
        .map(|(m, v)| format!("{}={}", m.name(), v))
        .collect();
    lines.push(format!("mae: {}", mae.join(" ")));
    match &report.pearson {
        Ok(c) => lines.push(format!(
            "pearson on totals: r={} p={} n={}",
            c.r, c.p_value, c.n
        )),
        Err(e) => lines.push(format!("pearson on totals: undefined ({e})")),
    }
    lines.push(report.note.to_string());
    lines
}

/// `team,kind,predicted,actual,error`, followed by `#`-prefixed summary
/// lines (mean absolute error, correlation and the autocorrelation note).
pub fn predictions_csv(report: &PredictionReport) -> String {
    let mut out = predictions_csv_body(report);
    for line in summary_lines(report) {
        out.push_str("# ");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// The CSV rows alone, without summary comments.
pub fn predictions_csv_body(report: &PredictionReport) -> String {
    csv_string(|w| {
        w.write_record(["team", "kind", "predicted", "actual", "error"])?;
        for p in &report.predictions {
            w.write_record([
                p.team.to_string(),
                p.kind.name().to_string(),
                p.predicted.to_string(),
                p.actual.to_string(),
                p.error.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn predictions_value(report: &PredictionReport) -> Value {
    let weights: Map<String, Value> = report
        .weights
        .iter()
        .map(|(l, w)| (l.to_string(), json!(w)))
        .collect();
    let mae: Map<String, Value> = report
        .mae_by_kind
        .iter()
        .map(|(m, v)| (m.name().to_string(), json!(v)))
        .collect();
    let pearson = match &report.pearson {
        Ok(c) => json!({"r": c.r, "p": c.p_value, "n": c.n}),
        Err(e) => {
            json!({"r": null, "p": null, "n": report.totals().count(), "error": e.to_string()})
        }
    };
    json!({
        "target": report.target.0,
        "weights": weights,
        "predictions": report.predictions.iter().map(|p| json!({
            "team": p.team.0,
            "kind": p.kind.name(),
            "predicted": p.predicted,
            "actual": p.actual,
            "error": p.error,
        })).collect::<Vec<_>>(),
        "aggregate": {
            "mae_by_kind": mae,
            "pearson": pearson,
        },
        "note": report.note,
    })
}

pub fn predictions_json(report: &PredictionReport) -> String {
    pretty(&predictions_value(report))
}

pub fn predictions_table(report: &PredictionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "target level {}", report.target);
    let _ = writeln!(
        out,
        "{:>5} {:>13} {:>10} {:>7} {:>9}",
        "team", "kind", "predicted", "actual", "error"
    );
    for p in &report.predictions {
        let _ = writeln!(
            out,
            "{:>5} {:>13} {:>10.3} {:>7} {:>9.3}",
            p.team,
            p.kind.name(),
            p.predicted,
            p.actual,
            p.error
        );
    }
    for line in summary_lines(report) {
        let _ = writeln!(out, "{line}");
    }
    out
}

/// Score table laid out with one row per target, a totals row, and one
/// column per team.
pub fn score_table(cards: &[ScoreCard]) -> String {
    let mut out = String::new();
    let Some(first) = cards.first() else {
        return out;
    };
    let labels: Vec<String> = first
        .per_target
        .iter()
        .map(|t| format!("{} ({})", t.name, t.difficulty))
        .collect();
    let width = labels.iter().map(String::len).max().unwrap_or(6).max(6);
    let _ = write!(out, "{:<width$} {:>4}", "Target", "Max");
    for c in cards {
        let _ = write!(out, "  {:<12}", format!("Team {}", c.team));
    }
    out.push('\n');
    for (i, label) in labels.iter().enumerate() {
        let _ = write!(out, "{:<width$} {:>4}", label, first.per_target[i].max);
        for c in cards {
            let _ = write!(out, "  {:<12}", c.per_target[i].cell().to_string());
        }
        out.push('\n');
    }
    let _ = write!(out, "{:<width$} {:>4}", "Total", first.total_max);
    for c in cards {
        let _ = write!(out, "  {:<12}", c.total_cell().to_string());
    }
    out.push('\n');
    // trailing padding is noise in diffs
    out.lines()
        .map(str::trim_end)
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

/// `team,target,earned,max,percent` with a `total` row per team.
pub fn score_csv(cards: &[ScoreCard]) -> String {
    csv_string(|w| {
        w.write_record(["team", "target", "earned", "max", "percent"])?;
        for c in cards {
            for t in &c.per_target {
                w.write_record([
                    c.team.to_string(),
                    t.target.clone(),
                    t.earned.to_string(),
                    t.max.to_string(),
                    t.percent.to_string(),
                ])?;
            }
            w.write_record([
                c.team.to_string(),
                "total".to_string(),
                c.total_earned.to_string(),
                c.total_max.to_string(),
                c.total_percent.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn score_value(cards: &[ScoreCard]) -> Value {
    Value::Array(
        cards
            .iter()
            .map(|c| {
                json!({
                    "team": c.team.0,
                    "targets": c.per_target.iter().map(|t| json!({
                        "target": t.target,
                        "difficulty": t.difficulty,
                        "earned": t.earned,
                        "max": t.max,
                        "percent": t.percent.to_string(),
                    })).collect::<Vec<_>>(),
                    "total": {
                        "earned": c.total_earned,
                        "max": c.total_max,
                        "percent": c.total_percent.to_string(),
                    },
                })
            })
            .collect(),
    )
}

pub fn score_json(cards: &[ScoreCard]) -> String {
    pretty(&score_value(cards))
}

#[cfg(test)]
mod tests {
    use super::*;
    use smm_core::{LevelId, TeamId};

    fn counts() -> Vec<EpisodeCounts> {
        let mut a = EpisodeCounts::zero(TeamId(2), LevelId(1));
        a.by_kind.set(DiscrepancyKind::Omission, 4);
        let mut b = EpisodeCounts::zero(TeamId(1), LevelId(2));
        b.by_kind.set(DiscrepancyKind::FalseBelief, 1);
        b.by_kind.set(DiscrepancyKind::BeliefContradiction, 2);
        vec![a, b, EpisodeCounts::zero(TeamId(1), LevelId(1))]
    }

    #[test]
    fn counts_csv_layout() {
        let csv = counts_csv(&counts());
        assert_eq!(
            csv,
            "team,level,contradiction,omission,unsupported,false,total\n\
             1,1,0,0,0,0,0\n\
             1,2,2,0,0,1,3\n\
             2,1,0,4,0,0,4\n"
        );
    }

    #[test]
    fn long_csv_sorted_by_kind_name() {
        let csv = counts_long_csv(&counts()[..1]);
        let kinds: Vec<&str> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap())
            .collect();
        assert_eq!(
            kinds,
            ["contradiction", "false", "omission", "total", "unsupported"]
        );
    }

    #[test]
    fn counts_json_has_total() {
        let v: Value = serde_json::from_str(&counts_json(&counts())).unwrap();
        assert_eq!(v[1]["total"], 3);
        assert_eq!(v[1]["false"], 1);
    }
}
