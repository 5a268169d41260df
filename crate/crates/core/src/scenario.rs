//! Scenario description and event-stream records.
//!
//! A scenario declares the roles, the levels with their durations, the
//! ground truth for each level and the scoring targets. Records are the
//! items of an annotation stream: mental-model updates and target
//! confirmations.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::{AgentId, LevelId, Polarity, PropId, TeamId, UpdateEvent};
use crate::scoring::TargetSpec;

pub const SCHEMA_VERSION: u32 = 1;

/// Authoritative facts for one level plus role expectations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    #[serde(default)]
    pub facts: BTreeMap<PropId, Polarity>,
    /// Ids for which ground truth is authoritative. Superset of `facts`.
    #[serde(default)]
    pub coverage: BTreeSet<PropId>,
    /// Ids each role is expected to hold. Need not lie in `coverage`.
    #[serde(default)]
    pub expected_knowledge: BTreeMap<AgentId, BTreeSet<PropId>>,
}

impl GroundTruth {
    pub fn fact(&self, id: &PropId) -> Option<Polarity> {
        self.facts.get(id).copied()
    }

    pub fn covers(&self, id: &PropId) -> bool {
        self.coverage.contains(id)
    }

    pub fn expects(&self, agent: &AgentId, id: &PropId) -> bool {
        self.expected_knowledge
            .get(agent)
            .is_some_and(|ids| ids.contains(id))
    }

    /// Checks `facts ⊆ coverage`.
    pub fn validate(&self) -> Result<(), PropId> {
        match self.facts.keys().find(|id| !self.coverage.contains(*id)) {
            Some(id) => Err(id.clone()),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSpec {
    pub level: LevelId,
    pub duration_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub schema_version: u32,
    pub roles: Vec<AgentId>,
    pub levels: Vec<LevelSpec>,
    pub ground_truth: BTreeMap<LevelId, GroundTruth>,
    #[serde(default)]
    pub targets: Vec<TargetSpec>,
}

/// Whether a scenario problem is a malformed value or a reference to
/// something that is not declared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Malformed,
    UnknownVersion,
    Dangling,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("unsupported schema_version {0}")]
    UnknownVersion(u32),
    #[error("scenario declares no roles")]
    NoRoles,
    #[error("duplicate agent id `{id}`")]
    DuplicateRole { index: usize, id: AgentId },
    #[error("scenario declares no levels")]
    NoLevels,
    #[error("duplicate level {level}")]
    DuplicateLevel { index: usize, level: LevelId },
    #[error("level ids must be numbered from 1 without gaps, found {level}")]
    NonContiguousLevel { index: usize, level: LevelId },
    #[error("level {level} has non-positive or non-finite duration")]
    BadDuration { index: usize, level: LevelId },
    #[error("no ground truth for declared level {0}")]
    MissingGroundTruth(LevelId),
    #[error("ground truth given for undeclared level {0}")]
    UndeclaredLevel(LevelId),
    #[error("level {level}: fact `{id}` is outside the coverage set")]
    FactOutsideCoverage { level: LevelId, id: PropId },
    #[error("level {level}: expected_knowledge names undeclared agent `{agent}`")]
    UnknownAgent { level: LevelId, agent: AgentId },
    #[error("target {index}: {source}")]
    Target {
        index: usize,
        source: crate::scoring::ScoreError,
    },
    #[error("element id `{id}` appears in more than one target")]
    DuplicateElement { id: String },
}

impl ScenarioError {
    pub fn class(&self) -> ErrorClass {
        match self {
            ScenarioError::UnknownVersion(_) => ErrorClass::UnknownVersion,
            ScenarioError::MissingGroundTruth(_)
            | ScenarioError::UndeclaredLevel(_)
            | ScenarioError::UnknownAgent { .. } => ErrorClass::Dangling,
            _ => ErrorClass::Malformed,
        }
    }

    /// JSON-pointer style location of the offending value.
    pub fn pointer(&self) -> String {
        match self {
            ScenarioError::UnknownVersion(_) => "/schema_version".into(),
            ScenarioError::NoRoles => "/roles".into(),
            ScenarioError::DuplicateRole { index, .. } => format!("/roles/{index}"),
            ScenarioError::NoLevels => "/levels".into(),
            ScenarioError::DuplicateLevel { index, .. }
            | ScenarioError::NonContiguousLevel { index, .. }
            | ScenarioError::BadDuration { index, .. } => format!("/levels/{index}"),
            ScenarioError::MissingGroundTruth(level) | ScenarioError::UndeclaredLevel(level) => {
                format!("/ground_truth/{level}")
            }
            ScenarioError::FactOutsideCoverage { level, id } => {
                format!("/ground_truth/{level}/facts/{id}")
            }
            ScenarioError::UnknownAgent { level, agent } => {
                format!("/ground_truth/{level}/expected_knowledge/{agent}")
            }
            ScenarioError::Target { index, .. } => format!("/targets/{index}"),
            ScenarioError::DuplicateElement { .. } => "/targets".into(),
        }
    }
}

impl Scenario {
    /// Checks every cross-reference and structural invariant.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ScenarioError::UnknownVersion(self.schema_version));
        }
        if self.roles.is_empty() {
            return Err(ScenarioError::NoRoles);
        }
        let mut seen = BTreeSet::new();
        for (index, role) in self.roles.iter().enumerate() {
            if !seen.insert(role) {
                return Err(ScenarioError::DuplicateRole {
                    index,
                    id: role.clone(),
                });
            }
        }

        if self.levels.is_empty() {
            return Err(ScenarioError::NoLevels);
        }
        let mut levels = BTreeSet::new();
        for (index, spec) in self.levels.iter().enumerate() {
            if !levels.insert(spec.level) {
                return Err(ScenarioError::DuplicateLevel {
                    index,
                    level: spec.level,
                });
            }
            if !(spec.duration_seconds.is_finite() && spec.duration_seconds > 0.0) {
                return Err(ScenarioError::BadDuration {
                    index,
                    level: spec.level,
                });
            }
        }
        for (index, spec) in self.levels.iter().enumerate() {
            if spec.level.0 == 0 || spec.level.0 as usize > self.levels.len() {
                return Err(ScenarioError::NonContiguousLevel {
                    index,
                    level: spec.level,
                });
            }
        }

        for spec in &self.levels {
            if !self.ground_truth.contains_key(&spec.level) {
                return Err(ScenarioError::MissingGroundTruth(spec.level));
            }
        }
        for (level, gt) in &self.ground_truth {
            if !levels.contains(level) {
                return Err(ScenarioError::UndeclaredLevel(*level));
            }
            if let Err(id) = gt.validate() {
                return Err(ScenarioError::FactOutsideCoverage { level: *level, id });
            }
            if let Some(agent) = gt.expected_knowledge.keys().find(|a| !seen.contains(a)) {
                return Err(ScenarioError::UnknownAgent {
                    level: *level,
                    agent: agent.clone(),
                });
            }
        }

        let mut elements = BTreeSet::new();
        for (index, target) in self.targets.iter().enumerate() {
            target
                .validate()
                .map_err(|source| ScenarioError::Target { index, source })?;
            for element in &target.elements {
                if !elements.insert(element.id.as_str()) {
                    return Err(ScenarioError::DuplicateElement {
                        id: element.id.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn level(&self, level: LevelId) -> Option<&LevelSpec> {
        self.levels.iter().find(|l| l.level == level)
    }

    pub fn ground_truth(&self, level: LevelId) -> Option<&GroundTruth> {
        self.ground_truth.get(&level)
    }

    pub fn has_role(&self, agent: &AgentId) -> bool {
        self.roles.contains(agent)
    }

    pub fn has_element(&self, element: &str) -> bool {
        self.targets
            .iter()
            .any(|t| t.elements.iter().any(|e| e.id == element))
    }

    /// Level ids in ascending order.
    pub fn level_ids(&self) -> Vec<LevelId> {
        let mut ids: Vec<_> = self.levels.iter().map(|l| l.level).collect();
        ids.sort();
        ids
    }

    /// Checks a record against the declarations. Ordinal ordering is the
    /// caller's concern since it depends on the stream.
    pub fn check_record(&self, record: &Record) -> Result<(), RecordError> {
        let (team, level, t) = match record {
            Record::Update(e) => (e.team, e.level, e.t),
            Record::Confirmation(c) => (c.team, c.level, c.t),
        };
        if team.0 == 0 {
            return Err(RecordError::InvalidTeam(team));
        }
        let spec = self.level(level).ok_or(RecordError::UnknownLevel(level))?;
        if !(t.is_finite() && t >= 0.0 && t <= spec.duration_seconds) {
            return Err(RecordError::OutOfRangeTime {
                t,
                duration: spec.duration_seconds,
            });
        }
        match record {
            Record::Update(e) if !self.has_role(&e.actor) => {
                Err(RecordError::UnknownAgent(e.actor.clone()))
            }
            Record::Confirmation(c) if !self.has_element(&c.element_id) => {
                Err(RecordError::UnknownElement(c.element_id.clone()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecordError {
    #[error("team ids start at 1, found {0}")]
    InvalidTeam(TeamId),
    #[error("undeclared level {0}")]
    UnknownLevel(LevelId),
    #[error("t = {t} outside [0, {duration}]")]
    OutOfRangeTime { t: f64, duration: f64 },
    #[error("undeclared agent `{0}`")]
    UnknownAgent(AgentId),
    #[error("undeclared target element `{0}`")]
    UnknownElement(String),
}

/// A team explicitly confirmed seeing one target element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Confirmation {
    pub team: TeamId,
    pub level: LevelId,
    pub t: f64,
    pub element_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Record {
    Update(UpdateEvent),
    Confirmation(Confirmation),
}

impl Record {
    pub fn team(&self) -> TeamId {
        match self {
            Record::Update(e) => e.team,
            Record::Confirmation(c) => c.team,
        }
    }

    pub fn level(&self) -> LevelId {
        match self {
            Record::Update(e) => e.level,
            Record::Confirmation(c) => c.level,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::{Difficulty, Element};
    use alloc::vec;

    fn agent(s: &str) -> AgentId {
        AgentId::new(s).unwrap()
    }

    fn pid(s: &str) -> PropId {
        PropId::new(s).unwrap()
    }

    fn scenario() -> Scenario {
        let mut ground_truth = BTreeMap::new();
        for level in 1..=4 {
            ground_truth.insert(LevelId(level), GroundTruth::default());
        }
        Scenario {
            schema_version: SCHEMA_VERSION,
            roles: vec![agent("spotter"), agent("photographer")],
            levels: (1..=4)
                .map(|l| LevelSpec {
                    level: LevelId(l),
                    duration_seconds: 480.0,
                })
                .collect(),
            ground_truth,
            targets: vec![TargetSpec::new(
                "t1",
                Difficulty::Easy,
                vec![Element::new("a", 2), Element::new("b", 3)],
            )],
        }
    }

    #[test]
    fn valid_scenario_passes() {
        scenario().validate().unwrap();
    }

    #[test]
    fn duplicate_role_is_malformed() {
        let mut s = scenario();
        s.roles.push(agent("spotter"));
        let err = s.validate().unwrap_err();
        assert_eq!(err.class(), ErrorClass::Malformed);
        assert_eq!(err.pointer(), "/roles/2");
        assert!(format!("{err}").contains("spotter"));
    }

    #[test]
    fn missing_ground_truth_is_dangling() {
        let mut s = scenario();
        s.ground_truth.remove(&LevelId(3));
        let err = s.validate().unwrap_err();
        assert_eq!(err, ScenarioError::MissingGroundTruth(LevelId(3)));
        assert_eq!(err.class(), ErrorClass::Dangling);
    }

    #[test]
    fn fact_must_be_covered() {
        let mut s = scenario();
        let gt = s.ground_truth.get_mut(&LevelId(2)).unwrap();
        gt.facts.insert(pid("x"), Polarity::Positive);
        assert!(matches!(
            s.validate(),
            Err(ScenarioError::FactOutsideCoverage { .. })
        ));
        s.ground_truth
            .get_mut(&LevelId(2))
            .unwrap()
            .coverage
            .insert(pid("x"));
        s.validate().unwrap();
    }

    #[test]
    fn expected_knowledge_for_unknown_agent() {
        let mut s = scenario();
        s.ground_truth
            .get_mut(&LevelId(1))
            .unwrap()
            .expected_knowledge
            .insert(agent("medic"), BTreeSet::new());
        assert_eq!(s.validate().unwrap_err().class(), ErrorClass::Dangling);
    }

    #[test]
    fn level_gaps_rejected() {
        let mut s = scenario();
        s.levels[3].level = LevelId(5);
        assert!(matches!(
            s.validate(),
            Err(ScenarioError::NonContiguousLevel { .. })
        ));
    }

    #[test]
    fn check_record_bounds() {
        let s = scenario();
        let c = |t: f64, element: &str| {
            Record::Confirmation(Confirmation {
                team: TeamId(1),
                level: LevelId(1),
                t,
                element_id: element.into(),
            })
        };
        s.check_record(&c(480.0, "a")).unwrap();
        assert!(matches!(
            s.check_record(&c(481.0, "a")),
            Err(RecordError::OutOfRangeTime { .. })
        ));
        assert!(matches!(
            s.check_record(&c(1.0, "zz")),
            Err(RecordError::UnknownElement(_))
        ));
    }
}
