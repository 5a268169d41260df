//! Weighted-sum prediction of a target level's discrepancy counts.
//!
//! The prediction for a target level is `Σ w_i · count_i` over every other
//! level `i`, with weights summing to one. The uniform scheme (`w_i = 1/n`)
//! is the baseline; any other weighting that sums to one is accepted,
//! including negative weights.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::belief::{LevelId, TeamId};
use crate::discrepancy::DiscrepancyKind;
use crate::episode::{EpisodeCounts, TeamHistory};
use crate::stats::{pearson, CorrelationResult, StatsError};

pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Printed with every report.
pub const AUTOCORRELATION_NOTE: &str = "note: counts for the target level are likely \
autocorrelated with the predictor levels; r may reflect stable team-specific baseline \
rates rather than predictive signal.";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PredictError {
    #[error("predictor level set is empty")]
    EmptyPredictorSet,
    #[error("weight for level {0} is not finite")]
    NonFiniteWeight(LevelId),
    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error("level {0} is given more than one weight")]
    DuplicateWeight(LevelId),
    #[error("cannot parse weight list: {0}")]
    Parse(String),
    #[error("weight scheme levels do not match the history's levels other than the target")]
    SchemeMismatch,
    #[error("target level {target} is missing from team {team}")]
    UnknownTarget { team: TeamId, target: LevelId },
    #[error("no team histories to report on")]
    NoHistories,
}

/// Weights over predictor levels. The target level is never included.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightScheme {
    weights: BTreeMap<LevelId, f64>,
    #[serde(skip)]
    uniform: bool,
}

impl WeightScheme {
    pub fn new(weights: impl IntoIterator<Item = (LevelId, f64)>) -> Result<Self, PredictError> {
        let mut map = BTreeMap::new();
        for (level, w) in weights {
            if !w.is_finite() {
                return Err(PredictError::NonFiniteWeight(level));
            }
            if map.insert(level, w).is_some() {
                return Err(PredictError::DuplicateWeight(level));
            }
        }
        if map.is_empty() {
            return Err(PredictError::EmptyPredictorSet);
        }
        let sum: f64 = map.values().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(PredictError::WeightSum(sum));
        }
        Ok(Self {
            weights: map,
            uniform: false,
        })
    }

    /// `1/n` for each of the `n` predictor levels.
    pub fn uniform(levels: impl IntoIterator<Item = LevelId>) -> Result<Self, PredictError> {
        let mut weights: BTreeMap<LevelId, f64> = levels.into_iter().map(|l| (l, 0.0)).collect();
        if weights.is_empty() {
            return Err(PredictError::EmptyPredictorSet);
        }
        let w = 1.0 / weights.len() as f64;
        weights.values_mut().for_each(|v| *v = w);
        Ok(Self {
            weights,
            uniform: true,
        })
    }

    /// Uniform weights over `1..=levels` except `target`.
    pub fn uniform_leave_one_out(levels: u32, target: LevelId) -> Result<Self, PredictError> {
        Self::uniform((1..=levels).map(LevelId).filter(|l| *l != target))
    }

    pub fn weight(&self, level: LevelId) -> Option<f64> {
        self.weights.get(&level).copied()
    }

    pub fn levels(&self) -> impl Iterator<Item = LevelId> + '_ {
        self.weights.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (LevelId, f64)> + '_ {
        self.weights.iter().map(|(l, w)| (*l, *w))
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    fn apply(&self, counts: impl Iterator<Item = (LevelId, u64)>) -> f64 {
        if self.uniform {
            // Sum first, divide once: the baseline is exactly the mean.
            let sum: f64 = counts.map(|(_, c)| c as f64).sum();
            sum / self.weights.len() as f64
        } else {
            counts
                .map(|(level, c)| self.weights[&level] * c as f64)
                .sum()
        }
    }
}

/// Parses an explicit list such as `1:0.5,2:0.3,3:0.2`.
impl FromStr for WeightScheme {
    type Err = PredictError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut pairs = Vec::new();
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (level, weight) = item
                .split_once(':')
                .ok_or_else(|| PredictError::Parse(item.into()))?;
            let level: u32 = level
                .trim()
                .parse()
                .map_err(|_| PredictError::Parse(item.into()))?;
            let weight: f64 = weight
                .trim()
                .parse()
                .map_err(|_| PredictError::Parse(item.into()))?;
            pairs.push((LevelId(level), weight));
        }
        Self::new(pairs)
    }
}

/// Which count a prediction is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Measure {
    Kind(DiscrepancyKind),
    Total,
}

impl Measure {
    /// Every measure, ordered by name.
    pub const BY_NAME: [Measure; 5] = [
        Measure::Kind(DiscrepancyKind::BeliefContradiction),
        Measure::Kind(DiscrepancyKind::FalseBelief),
        Measure::Kind(DiscrepancyKind::Omission),
        Measure::Total,
        Measure::Kind(DiscrepancyKind::UnsupportedBelief),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Kind(k) => k.short_name(),
            Measure::Total => "total",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::BY_NAME.into_iter().find(|m| m.name() == name)
    }

    pub fn of(self, counts: &EpisodeCounts) -> u64 {
        match self {
            Measure::Kind(k) => counts.by_kind.get(k),
            Measure::Total => counts.total(),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Measure {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    pub team: TeamId,
    pub target: LevelId,
    pub kind: Measure,
    pub predicted: f64,
    pub actual: u64,
    /// `predicted − actual`.
    pub error: f64,
    pub abs_error: f64,
}

pub fn predict(
    history: &TeamHistory,
    target: LevelId,
    scheme: &WeightScheme,
    measure: Measure,
) -> Result<Prediction, PredictError> {
    let actual = history
        .get(target)
        .map(|c| measure.of(c))
        .ok_or(PredictError::UnknownTarget {
            team: history.team,
            target,
        })?;
    let predictors = history.levels().filter(|l| *l != target);
    if !predictors.eq(scheme.levels()) {
        return Err(PredictError::SchemeMismatch);
    }
    let predicted = scheme.apply(
        history
            .episodes
            .iter()
            .filter(|e| e.level != target)
            .map(|e| (e.level, measure.of(e))),
    );
    let error = predicted - actual as f64;
    Ok(Prediction {
        team: history.team,
        target,
        kind: measure,
        predicted,
        actual,
        error,
        abs_error: error.abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionReport {
    pub target: LevelId,
    pub weights: WeightScheme,
    /// Ordered by team, then measure name.
    pub predictions: Vec<Prediction>,
    /// Mean absolute error across teams, ordered by measure name.
    pub mae_by_kind: Vec<(Measure, f64)>,
    /// Correlation of predicted against actual totals across teams.
    #[serde(serialize_with = "serialize_correlation")]
    pub pearson: Result<CorrelationResult, StatsError>,
    pub note: &'static str,
}

fn serialize_correlation<S: Serializer>(
    value: &Result<CorrelationResult, StatsError>,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    match value {
        Ok(c) => c.serialize(serializer),
        Err(_) => serializer.serialize_none(),
    }
}

impl PredictionReport {
    pub fn mae(&self, measure: Measure) -> Option<f64> {
        self.mae_by_kind
            .iter()
            .find(|(m, _)| *m == measure)
            .map(|(_, v)| *v)
    }

    pub fn totals(&self) -> impl Iterator<Item = &Prediction> {
        self.predictions.iter().filter(|p| p.kind == Measure::Total)
    }
}

pub fn batch_report(
    histories: &[TeamHistory],
    target: LevelId,
    scheme: &WeightScheme,
) -> Result<PredictionReport, PredictError> {
    if histories.is_empty() {
        return Err(PredictError::NoHistories);
    }
    let mut predictions = Vec::with_capacity(histories.len() * Measure::BY_NAME.len());
    for history in histories {
        for measure in Measure::BY_NAME {
            predictions.push(predict(history, target, scheme, measure)?);
        }
    }
    predictions.sort_by(|a, b| a.team.cmp(&b.team).then(a.kind.name().cmp(b.kind.name())));

    let n = histories.len() as f64;
    let mae_by_kind = Measure::BY_NAME
        .into_iter()
        .map(|m| {
            let sum: f64 = predictions
                .iter()
                .filter(|p| p.kind == m)
                .map(|p| p.abs_error)
                .sum();
            (m, sum / n)
        })
        .collect();

    let (predicted, actual): (Vec<f64>, Vec<f64>) = predictions
        .iter()
        .filter(|p| p.kind == Measure::Total)
        .map(|p| (p.predicted, p.actual as f64))
        .unzip();

    Ok(PredictionReport {
        target,
        weights: scheme.clone(),
        predictions,
        mae_by_kind,
        pearson: pearson(&predicted, &actual),
        note: AUTOCORRELATION_NOTE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::episode::KindCounts;
    use alloc::vec;
    use proptest::prelude::*;

    fn history(team: u32, rows: &[[u64; 4]]) -> TeamHistory {
        TeamHistory {
            team: TeamId(team),
            episodes: rows
                .iter()
                .enumerate()
                .map(|(i, r)| EpisodeCounts {
                    team: TeamId(team),
                    level: LevelId(i as u32 + 1),
                    by_kind: DiscrepancyKind::ALL
                        .into_iter()
                        .zip(r.iter().copied())
                        .collect(),
                })
                .collect(),
        }
    }

    fn totals_history(totals: &[u64]) -> TeamHistory {
        let rows: Vec<[u64; 4]> = totals.iter().map(|t| [0, *t, 0, 0]).collect();
        history(1, &rows)
    }

    #[test]
    fn uniform_weights() {
        let s = WeightScheme::uniform([LevelId(1), LevelId(2), LevelId(3)]).unwrap();
        for l in 1..=3 {
            assert_eq!(s.weight(LevelId(l)), Some(1.0 / 3.0));
        }
        let s = WeightScheme::uniform([LevelId(1)]).unwrap();
        assert_eq!(s.weight(LevelId(1)), Some(1.0));
        let s = WeightScheme::uniform_leave_one_out(4, LevelId(2)).unwrap();
        assert_eq!(s.levels().map(|l| l.0).collect::<Vec<_>>(), vec![1, 3, 4]);
        assert!(s.iter().all(|(_, w)| w == 1.0 / 3.0));
        assert_eq!(
            WeightScheme::uniform([]),
            Err(PredictError::EmptyPredictorSet)
        );
    }

    #[test]
    fn mean_of_ten_twenty_thirty() {
        let h = totals_history(&[10, 20, 30, 20]);
        let s = WeightScheme::uniform_leave_one_out(4, LevelId(4)).unwrap();
        let p = predict(&h, LevelId(4), &s, Measure::Total).unwrap();
        assert_eq!(p.predicted, 20.0);
        assert_eq!(p.error, 0.0);
        assert_eq!(p.actual, 20);
    }

    #[test]
    fn explicit_weights_dot_product() {
        let h = totals_history(&[10, 20, 30, 0]);
        let s: WeightScheme = "1:0.5,2:0.3,3:0.2".parse().unwrap();
        let p = predict(&h, LevelId(4), &s, Measure::Total).unwrap();
        // 0.5*10 + 0.3*20 + 0.2*30 = 5 + 6 + 6
        let independent = [(0.5, 10.0), (0.3, 20.0), (0.2, 30.0)]
            .iter()
            .fold(0.0, |acc, (w, c)| acc + w * c);
        assert!((p.predicted - 17.0).abs() < 1e-9);
        assert!((p.predicted - independent).abs() < 1e-12);
    }

    #[test]
    fn zero_history_predicts_zero() {
        let h = totals_history(&[0, 0, 0, 0]);
        let s = WeightScheme::uniform_leave_one_out(4, LevelId(4)).unwrap();
        assert_eq!(
            predict(&h, LevelId(4), &s, Measure::Total)
                .unwrap()
                .predicted,
            0.0
        );
    }

    #[test]
    fn weight_list_errors() {
        assert!(matches!(
            "1:0.5,2:0.6".parse::<WeightScheme>(),
            Err(PredictError::WeightSum(_))
        ));
        assert!(matches!(
            "1:0.5,x".parse::<WeightScheme>(),
            Err(PredictError::Parse(_))
        ));
        assert!(matches!(
            "1:0.5,1:0.5".parse::<WeightScheme>(),
            Err(PredictError::DuplicateWeight(_))
        ));
        assert_eq!(
            "".parse::<WeightScheme>(),
            Err(PredictError::EmptyPredictorSet)
        );
        // negative weights are allowed when the sum is 1
        assert!("1:-0.5,2:1.5".parse::<WeightScheme>().is_ok());
    }

    #[test]
    fn scheme_must_match_predictors() {
        let h = totals_history(&[1, 2, 3, 4]);
        let s = WeightScheme::uniform([LevelId(1), LevelId(2)]).unwrap();
        assert_eq!(
            predict(&h, LevelId(4), &s, Measure::Total),
            Err(PredictError::SchemeMismatch)
        );
        let s = WeightScheme::uniform_leave_one_out(5, LevelId(5)).unwrap();
        assert!(matches!(
            predict(&h, LevelId(5), &s, Measure::Total),
            Err(PredictError::UnknownTarget { .. })
        ));
    }

    #[test]
    fn constant_teams_have_zero_error() {
        let histories: Vec<_> = (1..=20)
            .map(|t| history(t, &[[1, u64::from(t), 0, 2]; 4]))
            .collect();
        let s = WeightScheme::uniform_leave_one_out(4, LevelId(4)).unwrap();
        let report = batch_report(&histories, LevelId(4), &s).unwrap();
        assert!(report.predictions.iter().all(|p| p.error == 0.0));
        assert_eq!(report.pearson.unwrap().r, 1.0);
        assert_eq!(report.predictions.len(), 100);
        assert_eq!(report.predictions[0].kind.name(), "contradiction");
        assert_eq!(report.predictions[3].kind, Measure::Total);
    }

    #[test]
    fn single_team_report_has_no_correlation() {
        let s = WeightScheme::uniform_leave_one_out(4, LevelId(4)).unwrap();
        let report = batch_report(&[history(1, &[[1, 2, 3, 4]; 4])], LevelId(4), &s).unwrap();
        assert_eq!(report.pearson, Err(StatsError::TooFewSamples(1)));
        assert_eq!(report.mae(Measure::Total), Some(0.0));
    }

    fn counts_row() -> impl Strategy<Value = [u64; 4]> {
        prop::array::uniform4(0u64..50)
    }

    fn scheme_weights() -> impl Strategy<Value = [f64; 2]> {
        prop::array::uniform2(-2.0f64..2.0)
    }

    proptest! {
        #[test]
        fn linear_and_additive(rows in prop::array::uniform4(counts_row()), w in scheme_weights(), scale in 0u64..10, bump in 0u64..100) {
            let h = history(1, &rows);
            let explicit = WeightScheme::new([
                (LevelId(1), w[0]),
                (LevelId(2), w[1]),
                (LevelId(3), 1.0 - w[0] - w[1]),
            ]).unwrap();
            let uniform = WeightScheme::uniform_leave_one_out(4, LevelId(4)).unwrap();
            for s in [&explicit, &uniform] {
                let total = predict(&h, LevelId(4), s, Measure::Total).unwrap();
                let parts: f64 = DiscrepancyKind::ALL.iter()
                    .map(|k| predict(&h, LevelId(4), s, Measure::Kind(*k)).unwrap().predicted)
                    .sum();
                prop_assert!((total.predicted - parts).abs() < 1e-9);

                let scaled_rows: Vec<[u64; 4]> = rows.iter().map(|r| r.map(|c| c * scale)).collect();
                let scaled = predict(&history(1, &scaled_rows), LevelId(4), s, Measure::Total).unwrap();
                prop_assert!((scaled.predicted - scale as f64 * total.predicted).abs() < 1e-6);

                // Changing the target's own count never moves the prediction.
                let mut bumped = rows;
                bumped[3][0] += bump;
                let moved = predict(&history(1, &bumped), LevelId(4), s, Measure::Total).unwrap();
                prop_assert_eq!(moved.predicted, total.predicted);
                prop_assert_eq!(moved.abs_error, moved.error.abs());
            }
            let mean = rows[..3].iter().map(|r| r.iter().sum::<u64>() as f64).sum::<f64>() / 3.0;
            let u = predict(&h, LevelId(4), &uniform, Measure::Total).unwrap();
            prop_assert!((u.predicted - mean).abs() < 1e-9);
            prop_assert!(u.predicted >= 0.0);
        }
    }

    #[test]
    fn kind_counts_sum_matches_total() {
        let c: KindCounts = [
            (DiscrepancyKind::Omission, 3),
            (DiscrepancyKind::FalseBelief, 2),
        ]
        .into_iter()
        .collect();
        assert_eq!(c.total(), 5);
    }
}
