//! Objective target-identification scoring.
//!
//! A team earns an element's points only when it explicitly confirmed
//! seeing that element. Percentages are kept in tenths of a percent and
//! rounded half-up, so `8/19` prints as `42.1`.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::TeamId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    Easy,
    Hard,
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Difficulty::Easy => f.write_str("Easy"),
            Difficulty::Hard => f.write_str("Hard"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Element {
    pub id: String,
    pub points: u32,
}

impl Element {
    pub fn new(id: impl Into<String>, points: u32) -> Self {
        Self {
            id: id.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub id: String,
    /// Display name for tables; falls back to `id`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub difficulty: Difficulty,
    pub elements: Vec<Element>,
    pub max_points: u32,
}

impl TargetSpec {
    pub fn new(id: impl Into<String>, difficulty: Difficulty, elements: Vec<Element>) -> Self {
        let max_points = elements.iter().map(|e| e.points).sum();
        Self {
            id: id.into(),
            label: None,
            difficulty,
            elements,
            max_points,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn name(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.id)
    }

    pub fn validate(&self) -> Result<(), ScoreError> {
        if self.elements.is_empty() {
            return Err(ScoreError::EmptyTarget(self.id.clone()));
        }
        let mut seen = BTreeSet::new();
        for e in &self.elements {
            if e.points == 0 {
                return Err(ScoreError::ZeroPoints(e.id.clone()));
            }
            if !seen.insert(e.id.as_str()) {
                return Err(ScoreError::DuplicateElement(e.id.clone()));
            }
        }
        let sum: u32 = self.elements.iter().map(|e| e.points).sum();
        if sum != self.max_points {
            return Err(ScoreError::MaxMismatch {
                target: self.id.clone(),
                declared: self.max_points,
                sum,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoreError {
    #[error("confirmed element `{0}` is not part of any target")]
    UnknownElement(String),
    #[error("target `{0}` has no elements")]
    EmptyTarget(String),
    #[error("element `{0}` must be worth at least one point")]
    ZeroPoints(String),
    #[error("element `{0}` is declared more than once")]
    DuplicateElement(String),
    #[error("target `{target}` declares max_points {declared} but its elements sum to {sum}")]
    MaxMismatch {
        target: String,
        declared: u32,
        sum: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfirmationLog {
    pub team: TeamId,
    pub confirmed: BTreeSet<String>,
}

impl ConfirmationLog {
    pub fn new(team: TeamId) -> Self {
        Self {
            team,
            confirmed: BTreeSet::new(),
        }
    }

    pub fn confirm(&mut self, element: impl Into<String>) {
        self.confirmed.insert(element.into());
    }
}

/// A percentage stored as tenths of a percent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Percent(u32);

impl Percent {
    /// `100 * earned / max`, rounded half-up to one decimal. `max == 0`
    /// yields zero.
    pub fn of(earned: u32, max: u32) -> Self {
        if max == 0 {
            return Percent(0);
        }
        let (earned, max) = (u64::from(earned), u64::from(max));
        Percent(((2000 * earned + max) / (2 * max)) as u32)
    }

    pub fn tenths(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 10.0
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.0 / 10, self.0 % 10)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetScore {
    pub target: String,
    pub name: String,
    pub difficulty: Difficulty,
    pub earned: u32,
    pub max: u32,
    pub percent: Percent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreCard {
    pub team: TeamId,
    /// One row per target, in declaration order.
    pub per_target: Vec<TargetScore>,
    pub total_earned: u32,
    pub total_max: u32,
    pub total_percent: Percent,
}

/// Formats `earned (percent%)` the way score tables print a cell.
pub struct Cell {
    pub earned: u32,
    pub percent: Percent,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}%)", self.earned, self.percent)
    }
}

impl TargetScore {
    pub fn cell(&self) -> Cell {
        Cell {
            earned: self.earned,
            percent: self.percent,
        }
    }
}

impl ScoreCard {
    pub fn total_cell(&self) -> Cell {
        Cell {
            earned: self.total_earned,
            percent: self.total_percent,
        }
    }
}

pub fn score(targets: &[TargetSpec], log: &ConfirmationLog) -> Result<ScoreCard, ScoreError> {
    for element in &log.confirmed {
        let known = targets
            .iter()
            .any(|t| t.elements.iter().any(|e| &e.id == element));
        if !known {
            return Err(ScoreError::UnknownElement(element.clone()));
        }
    }

    let per_target: Vec<TargetScore> = targets
        .iter()
        .map(|t| {
            let earned = t
                .elements
                .iter()
                .filter(|e| log.confirmed.contains(&e.id))
                .map(|e| e.points)
                .sum();
            TargetScore {
                target: t.id.clone(),
                name: t.name().into(),
                difficulty: t.difficulty,
                earned,
                max: t.max_points,
                percent: Percent::of(earned, t.max_points),
            }
        })
        .collect();

    let total_earned = per_target.iter().map(|s| s.earned).sum();
    let total_max = per_target.iter().map(|s| s.max).sum();
    Ok(ScoreCard {
        team: log.team,
        per_target,
        total_earned,
        total_max,
        total_percent: Percent::of(total_earned, total_max),
    })
}
