//! Discrepancy detection over a team's mental models.
//!
//! The four batch detectors compare snapshots against each other and
//! against a level's [`GroundTruth`]. [`EngineState`] maintains the same
//! open set incrementally over an event stream: every detector is local to
//! one proposition id, so an update only needs the findings for the id it
//! touched to be recomputed.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::{
    AgentId, BeliefError, Entry, Holdings, LevelId, MentalModel, PropId, Snapshot, TeamId,
    UpdateEvent,
};
use crate::scenario::{GroundTruth, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyKind {
    BeliefContradiction,
    Omission,
    UnsupportedBelief,
    FalseBelief,
}

impl DiscrepancyKind {
    pub const ALL: [DiscrepancyKind; 4] = [
        DiscrepancyKind::BeliefContradiction,
        DiscrepancyKind::Omission,
        DiscrepancyKind::UnsupportedBelief,
        DiscrepancyKind::FalseBelief,
    ];

    /// Short column name used in tables and CSV headers.
    pub fn short_name(self) -> &'static str {
        match self {
            DiscrepancyKind::BeliefContradiction => "contradiction",
            DiscrepancyKind::Omission => "omission",
            DiscrepancyKind::UnsupportedBelief => "unsupported",
            DiscrepancyKind::FalseBelief => "false",
        }
    }

    pub fn from_short_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.short_name() == name)
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for DiscrepancyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Identity of a discrepancy: at most one is open per key at any time.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DiscrepancyKey {
    pub kind: DiscrepancyKind,
    pub proposition_id: PropId,
    /// Agent whose entry triggers the discrepancy.
    pub holder: AgentId,
    /// Contradicting agent, or the agent missing an expected proposition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterpart: Option<AgentId>,
}

impl DiscrepancyKey {
    fn new(
        kind: DiscrepancyKind,
        id: &PropId,
        holder: &AgentId,
        counterpart: Option<&AgentId>,
    ) -> Self {
        Self {
            kind,
            proposition_id: id.clone(),
            holder: holder.clone(),
            counterpart: counterpart.cloned(),
        }
    }
}

/// A discrepancy with its provenance and open interval in event ordinals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    #[serde(flatten)]
    pub key: DiscrepancyKey,
    pub team: TeamId,
    pub level: LevelId,
    pub opened_at: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_at: Option<u64>,
}

impl Discrepancy {
    pub fn kind(&self) -> DiscrepancyKind {
        self.key.kind
    }

    pub fn is_open(&self) -> bool {
        self.closed_at.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("more than one model is owned by `{0}`")]
    DuplicateOwner(AgentId),
    #[error("agent `{0}` is not part of this team")]
    UnknownAgent(AgentId),
    #[error("level {0} is not declared by the scenario")]
    UnknownLevel(LevelId),
    #[error("event for team {team} level {level} sent to engine for team {expected_team} level {expected_level}")]
    WrongEpisode {
        team: TeamId,
        level: LevelId,
        expected_team: TeamId,
        expected_level: LevelId,
    },
    #[error(transparent)]
    Belief(#[from] BeliefError),
}

fn check_distinct<M: Holdings>(models: &[M]) -> Result<(), EngineError> {
    let mut owners = BTreeSet::new();
    for m in models {
        if !owners.insert(m.owner()) {
            return Err(EngineError::DuplicateOwner(m.owner().clone()));
        }
    }
    Ok(())
}

/// One record per unordered agent pair and id where the two agents hold the
/// same attitude with opposite polarity. The holder is the smaller agent id.
pub fn detect_contradictions<M: Holdings>(
    models: &[M],
) -> Result<BTreeSet<DiscrepancyKey>, EngineError> {
    check_distinct(models)?;
    let mut found = BTreeSet::new();
    for (i, a) in models.iter().enumerate() {
        for b in &models[i + 1..] {
            for (id, ea) in a.entries() {
                let Some(eb) = b.entry(id) else { continue };
                if ea.polarity != eb.polarity && ea.attitude == eb.attitude {
                    let (lo, hi) = if a.owner() < b.owner() {
                        (a.owner(), b.owner())
                    } else {
                        (b.owner(), a.owner())
                    };
                    found.insert(DiscrepancyKey::new(
                        DiscrepancyKind::BeliefContradiction,
                        id,
                        lo,
                        Some(hi),
                    ));
                }
            }
        }
    }
    Ok(found)
}

/// Expected ids missing from an agent's model while some teammate holds
/// them. Holder is the teammate, counterpart the agent lacking the id.
pub fn detect_omissions<M: Holdings>(
    models: &[M],
    gt: &GroundTruth,
) -> Result<BTreeSet<DiscrepancyKey>, EngineError> {
    check_distinct(models)?;
    let mut found = BTreeSet::new();
    for lacking in models {
        let expected = gt
            .expected_knowledge
            .get(lacking.owner())
            .ok_or_else(|| EngineError::UnknownAgent(lacking.owner().clone()))?;
        for id in expected {
            if lacking.holds(id) {
                continue;
            }
            for holder in models {
                if holder.owner() != lacking.owner() && holder.holds(id) {
                    found.insert(DiscrepancyKey::new(
                        DiscrepancyKind::Omission,
                        id,
                        holder.owner(),
                        Some(lacking.owner()),
                    ));
                }
            }
        }
    }
    Ok(found)
}

/// Entries outside ground-truth coverage that no other agent holds.
pub fn detect_unsupported<M: Holdings>(models: &[M], gt: &GroundTruth) -> BTreeSet<DiscrepancyKey> {
    let mut found = BTreeSet::new();
    for (i, m) in models.iter().enumerate() {
        for id in m.entries().keys() {
            if gt.covers(id) {
                continue;
            }
            let corroborated = models
                .iter()
                .enumerate()
                .any(|(j, other)| j != i && other.holds(id));
            if !corroborated {
                found.insert(DiscrepancyKey::new(
                    DiscrepancyKind::UnsupportedBelief,
                    id,
                    m.owner(),
                    None,
                ));
            }
        }
    }
    found
}

/// Entries whose polarity disagrees with a ground-truth fact.
pub fn detect_false_beliefs<M: Holdings>(
    models: &[M],
    gt: &GroundTruth,
) -> BTreeSet<DiscrepancyKey> {
    let mut found = BTreeSet::new();
    for m in models {
        for (id, e) in m.entries() {
            if gt.fact(id).is_some_and(|p| p != e.polarity) {
                found.insert(DiscrepancyKey::new(
                    DiscrepancyKind::FalseBelief,
                    id,
                    m.owner(),
                    None,
                ));
            }
        }
    }
    found
}

/// Union of the four detectors.
pub fn detect_all<M: Holdings>(
    models: &[M],
    gt: &GroundTruth,
) -> Result<BTreeSet<DiscrepancyKey>, EngineError> {
    let mut all = detect_contradictions(models)?;
    all.extend(detect_omissions(models, gt)?);
    all.extend(detect_unsupported(models, gt));
    all.extend(detect_false_beliefs(models, gt));
    Ok(all)
}

/// Discrepancies that changed state on one [`EngineState::step`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepDelta {
    pub opened: Vec<Discrepancy>,
    pub closed: Vec<Discrepancy>,
}

/// Incremental detector state for one team in one level.
#[derive(Debug, Clone)]
pub struct EngineState {
    team: TeamId,
    level: LevelId,
    gt: GroundTruth,
    models: BTreeMap<AgentId, MentalModel>,
    /// Open keys, grouped by proposition id, mapped to their `log` index.
    open: BTreeMap<PropId, BTreeMap<DiscrepancyKey, usize>>,
    log: Vec<Discrepancy>,
}

impl EngineState {
    /// Starts with an empty model for every role. Roles without an
    /// expected-knowledge entry are given an empty expectation.
    pub fn new(
        team: TeamId,
        level: LevelId,
        roles: &[AgentId],
        gt: &GroundTruth,
    ) -> Result<Self, EngineError> {
        let mut models = BTreeMap::new();
        let mut gt = gt.clone();
        for role in roles {
            if models
                .insert(role.clone(), MentalModel::new(role.clone()))
                .is_some()
            {
                return Err(EngineError::DuplicateOwner(role.clone()));
            }
            gt.expected_knowledge.entry(role.clone()).or_default();
        }
        Ok(Self {
            team,
            level,
            gt,
            models,
            open: BTreeMap::new(),
            log: Vec::new(),
        })
    }

    pub fn for_scenario(
        scenario: &Scenario,
        team: TeamId,
        level: LevelId,
    ) -> Result<Self, EngineError> {
        let gt = scenario
            .ground_truth(level)
            .ok_or(EngineError::UnknownLevel(level))?;
        Self::new(team, level, &scenario.roles, gt)
    }

    pub fn team(&self) -> TeamId {
        self.team
    }

    pub fn level(&self) -> LevelId {
        self.level
    }

    pub fn ground_truth(&self) -> &GroundTruth {
        &self.gt
    }

    pub fn model(&self, agent: &AgentId) -> Option<&MentalModel> {
        self.models.get(agent)
    }

    pub fn snapshots(&self) -> Vec<Snapshot> {
        self.models.values().map(MentalModel::snapshot).collect()
    }

    /// Applies one event and reports the discrepancies it opened or closed.
    /// On error the state is unchanged.
    pub fn step(&mut self, event: &UpdateEvent) -> Result<StepDelta, EngineError> {
        if event.team != self.team || event.level != self.level {
            return Err(EngineError::WrongEpisode {
                team: event.team,
                level: event.level,
                expected_team: self.team,
                expected_level: self.level,
            });
        }
        let model = self
            .models
            .get_mut(&event.actor)
            .ok_or_else(|| EngineError::UnknownAgent(event.actor.clone()))?;
        model.apply_update(event)?;

        let id = &event.proposition.id;
        let now = findings_for(&self.models, &self.gt, id);
        let before = self.open.remove(id).unwrap_or_default();

        let mut delta = StepDelta::default();
        let mut still_open = BTreeMap::new();
        for (key, index) in before {
            if now.contains(&key) {
                still_open.insert(key, index);
            } else {
                self.log[index].closed_at = Some(event.ordinal);
                delta.closed.push(self.log[index].clone());
            }
        }
        for key in now {
            if still_open.contains_key(&key) {
                continue;
            }
            let record = Discrepancy {
                key: key.clone(),
                team: self.team,
                level: self.level,
                opened_at: event.ordinal,
                closed_at: None,
            };
            still_open.insert(key, self.log.len());
            delta.opened.push(record.clone());
            self.log.push(record);
        }
        if !still_open.is_empty() {
            self.open.insert(id.clone(), still_open);
        }
        Ok(delta)
    }

    pub fn open_keys(&self) -> BTreeSet<DiscrepancyKey> {
        self.open.values().flat_map(|m| m.keys().cloned()).collect()
    }

    /// Every record opened so far, in opening order. Closed records carry
    /// their `closed_at` ordinal.
    pub fn records(&self) -> &[Discrepancy] {
        &self.log
    }

    pub fn into_records(self) -> Vec<Discrepancy> {
        self.log
    }

    /// Runs the batch detectors on the current models.
    pub fn recompute(&self) -> Result<BTreeSet<DiscrepancyKey>, EngineError> {
        let models: Vec<&MentalModel> = self.models.values().collect();
        detect_all(&models, &self.gt)
    }
}

/// All findings that mention `id`, given the current models.
fn findings_for(
    models: &BTreeMap<AgentId, MentalModel>,
    gt: &GroundTruth,
    id: &PropId,
) -> BTreeSet<DiscrepancyKey> {
    let holders: Vec<(&AgentId, &Entry)> = models
        .iter()
        .filter_map(|(agent, m)| m.entry(id).map(|e| (agent, e)))
        .collect();
    let mut found = BTreeSet::new();

    // `models` iterates in agent order, so `a < b` below.
    for (i, (a, ea)) in holders.iter().enumerate() {
        for (b, eb) in &holders[i + 1..] {
            if ea.polarity != eb.polarity && ea.attitude == eb.attitude {
                found.insert(DiscrepancyKey::new(
                    DiscrepancyKind::BeliefContradiction,
                    id,
                    a,
                    Some(b),
                ));
            }
        }
    }

    for (agent, model) in models {
        if !model.holds(id) && gt.expects(agent, id) {
            for (holder, _) in &holders {
                found.insert(DiscrepancyKey::new(
                    DiscrepancyKind::Omission,
                    id,
                    holder,
                    Some(agent),
                ));
            }
        }
    }

    if let [(only, _)] = holders.as_slice() {
        if !gt.covers(id) {
            found.insert(DiscrepancyKey::new(
                DiscrepancyKind::UnsupportedBelief,
                id,
                only,
                None,
            ));
        }
    }

    if let Some(truth) = gt.fact(id) {
        for (holder, e) in &holders {
            if e.polarity != truth {
                found.insert(DiscrepancyKey::new(
                    DiscrepancyKind::FalseBelief,
                    id,
                    holder,
                    None,
                ));
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::{Attitude, Op, Polarity, Proposition};
    use alloc::string::String;
    use alloc::vec;

    fn pid(s: &str) -> PropId {
        PropId::new(s).unwrap()
    }

    fn agent(s: &str) -> AgentId {
        AgentId::new(s).unwrap()
    }

    fn snap(owner: &str, entries: &[(&str, Polarity)]) -> Snapshot {
        Snapshot::from_entries(
            agent(owner),
            entries
                .iter()
                .map(|(id, p)| (Proposition::new(pid(id), *p), Attitude::Belief)),
        )
    }

    use Polarity::{Negative as N, Positive as P};

    fn gt_with_roles(roles: &[&str]) -> GroundTruth {
        let mut gt = GroundTruth::default();
        for r in roles {
            gt.expected_knowledge.insert(agent(r), BTreeSet::new());
        }
        gt
    }

    #[test]
    fn east_wing_contradiction() {
        let leader = snap("team_leader", &[("eastwing_stable", N)]);
        let officer = snap("safety_officer", &[("eastwing_stable", P)]);
        let found = detect_contradictions(&[leader, officer]).unwrap();
        assert_eq!(found.len(), 1);
        let d = found.iter().next().unwrap();
        assert_eq!(d.proposition_id, pid("eastwing_stable"));
        assert_eq!(d.holder, agent("safety_officer"));
        assert_eq!(d.counterpart, Some(agent("team_leader")));
    }

    #[test]
    fn agreement_is_not_a_contradiction() {
        let a = snap("a", &[("p", P), ("q", N)]);
        let b = snap("b", &[("p", P), ("q", N)]);
        assert!(detect_contradictions(&[a, b]).unwrap().is_empty());
    }

    #[test]
    fn contradiction_brute_force_example() {
        let a = snap("a", &[("p", P), ("q", N)]);
        let b = snap("b", &[("p", N), ("q", N), ("r", P)]);
        // Brute force over every id of either snapshot.
        let mut expected = 0;
        for (ida, pa) in [("p", P), ("q", N)] {
            for (idb, pb) in [("p", N), ("q", N), ("r", P)] {
                if ida == idb && pa != pb {
                    expected += 1;
                }
            }
        }
        let found = detect_contradictions(&[a, b]).unwrap();
        assert_eq!(found.len(), expected);
        assert_eq!(found.len(), 1);
        assert_eq!(found.iter().next().unwrap().proposition_id, pid("p"));
    }

    #[test]
    fn different_attitudes_do_not_contradict() {
        let a = Snapshot::from_entries(
            agent("a"),
            [(Proposition::positive(pid("p")), Attitude::Goal)],
        );
        let b = Snapshot::from_entries(
            agent("b"),
            [(Proposition::negative(pid("p")), Attitude::Belief)],
        );
        assert!(detect_contradictions(&[a, b]).unwrap().is_empty());
    }

    #[test]
    fn duplicate_owner_rejected() {
        let a = snap("a", &[]);
        assert_eq!(
            detect_contradictions(&[a.clone(), a]),
            Err(EngineError::DuplicateOwner(agent("a")))
        );
    }

    #[test]
    fn hazmat_omission() {
        let hazmat = snap("hazmat", &[("gear_needed_50ft", P)]);
        let leader = snap("leader", &[]);
        let mut gt = gt_with_roles(&["hazmat", "leader"]);
        gt.expected_knowledge
            .get_mut(&agent("leader"))
            .unwrap()
            .insert(pid("gear_needed_50ft"));
        let found = detect_omissions(&[hazmat.clone(), leader], &gt).unwrap();
        assert_eq!(
            found.into_iter().collect::<Vec<_>>(),
            vec![DiscrepancyKey {
                kind: DiscrepancyKind::Omission,
                proposition_id: pid("gear_needed_50ft"),
                holder: agent("hazmat"),
                counterpart: Some(agent("leader")),
            }]
        );

        let leader = snap("leader", &[("gear_needed_50ft", P)]);
        assert!(detect_omissions(&[hazmat, leader], &gt).unwrap().is_empty());
    }

    #[test]
    fn omission_needs_a_teammate_holder() {
        let mut gt = gt_with_roles(&["a", "b"]);
        gt.expected_knowledge
            .get_mut(&agent("b"))
            .unwrap()
            .insert(pid("q"));
        let found = detect_omissions(&[snap("a", &[]), snap("b", &[])], &gt).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn vacuous_expectation_yields_nothing() {
        let gt = gt_with_roles(&["a", "b"]);
        let a = snap("a", &[("p", P), ("q", N)]);
        let b = snap("b", &[("r", P)]);
        assert!(detect_omissions(&[a, b], &gt).unwrap().is_empty());
    }

    #[test]
    fn omission_requires_known_agents() {
        let gt = gt_with_roles(&["a"]);
        assert_eq!(
            detect_omissions(&[snap("a", &[]), snap("b", &[])], &gt),
            Err(EngineError::UnknownAgent(agent("b")))
        );
    }

    #[test]
    fn unsupported_tapping() {
        let gt = GroundTruth::default();
        let a = snap("searcher", &[("tapping_northwest", P)]);
        let b = snap("beacon_op", &[]);
        let found = detect_unsupported(&[a.clone(), b], &gt);
        assert_eq!(found.len(), 1);
        assert_eq!(found.iter().next().unwrap().holder, agent("searcher"));

        let b = snap("beacon_op", &[("tapping_northwest", P)]);
        assert!(detect_unsupported(&[a, b], &gt).is_empty());
    }

    #[test]
    fn covered_and_correct_is_supported() {
        let mut gt = GroundTruth::default();
        gt.coverage.insert(pid("p"));
        gt.facts.insert(pid("p"), P);
        let a = snap("a", &[("p", P)]);
        assert!(detect_unsupported(core::slice::from_ref(&a), &gt).is_empty());
        assert!(detect_false_beliefs(&[a], &gt).is_empty());
    }

    #[test]
    fn hikers_false_belief() {
        let mut gt = GroundTruth::default();
        gt.coverage.insert(pid("hikers_north"));
        gt.facts.insert(pid("hikers_north"), N);
        let nav = snap("navigator", &[("hikers_north", P)]);
        let found = detect_false_beliefs(&[nav], &gt);
        assert_eq!(found.len(), 1);
        assert_eq!(
            found.iter().next().unwrap().kind,
            DiscrepancyKind::FalseBelief
        );
    }

    #[test]
    fn two_wrong_holders_two_records() {
        let mut gt = GroundTruth::default();
        gt.coverage.insert(pid("x"));
        gt.facts.insert(pid("x"), N);
        let models = [snap("a", &[("x", P)]), snap("b", &[("x", P)])];
        let expected: usize = models
            .iter()
            .filter(|m| m.entry(&pid("x")).is_some_and(|e| e.polarity != N))
            .count();
        assert_eq!(detect_false_beliefs(&models, &gt).len(), expected);
        assert_eq!(expected, 2);
    }

    #[test]
    fn contradiction_and_false_belief_coexist() {
        let mut gt = gt_with_roles(&["a", "b"]);
        gt.coverage.insert(pid("x"));
        gt.facts.insert(pid("x"), N);
        let models = [snap("a", &[("x", P)]), snap("b", &[("x", N)])];
        let all = detect_all(&models, &gt).unwrap();
        let kinds: Vec<_> = all.iter().map(|k| k.kind).collect();
        assert_eq!(
            kinds,
            vec![
                DiscrepancyKind::BeliefContradiction,
                DiscrepancyKind::FalseBelief
            ]
        );
    }

    fn event(ordinal: u64, actor: &str, op: Op, id: &str, polarity: Polarity) -> UpdateEvent {
        UpdateEvent {
            ordinal,
            team: TeamId(1),
            level: LevelId(1),
            t: ordinal as f64,
            actor: agent(actor),
            op,
            proposition: Proposition::new(pid(id), polarity),
            attitude: Attitude::Belief,
            utterance_ref: None::<String>,
        }
    }

    #[test]
    fn step_reports_contradiction_delta() {
        let mut gt = GroundTruth::default();
        gt.coverage.insert(pid("p"));
        let roles = [agent("a"), agent("b")];
        let mut engine = EngineState::new(TeamId(1), LevelId(1), &roles, &gt).unwrap();
        let d = engine.step(&event(1, "a", Op::Assert, "p", P)).unwrap();
        assert_eq!(d, StepDelta::default());
        let d = engine.step(&event(2, "b", Op::Assert, "p", N)).unwrap();
        assert_eq!(d.opened.len(), 1);
        assert!(d.closed.is_empty());
        assert_eq!(d.opened[0].kind(), DiscrepancyKind::BeliefContradiction);
        assert_eq!(d.opened[0].opened_at, 2);
    }

    #[test]
    fn step_closes_resolved_omission() {
        let mut gt = GroundTruth::default();
        gt.coverage.insert(pid("q"));
        gt.facts.insert(pid("q"), P);
        gt.expected_knowledge
            .insert(agent("b"), [pid("q")].into_iter().collect());
        let roles = [agent("a"), agent("b")];
        let mut engine = EngineState::new(TeamId(1), LevelId(1), &roles, &gt).unwrap();
        let d = engine.step(&event(1, "a", Op::Assert, "q", P)).unwrap();
        assert_eq!(d.opened.len(), 1);
        assert_eq!(d.opened[0].kind(), DiscrepancyKind::Omission);
        let d = engine.step(&event(2, "b", Op::Assert, "q", P)).unwrap();
        assert!(d.opened.is_empty());
        assert_eq!(d.closed.len(), 1);
        assert_eq!(d.closed[0].closed_at, Some(2));
        assert!(engine.open_keys().is_empty());
        assert_eq!(engine.records().len(), 1);
    }

    #[test]
    fn step_errors_leave_state_alone() {
        let gt = GroundTruth::default();
        let roles = [agent("a"), agent("b")];
        let mut engine = EngineState::new(TeamId(1), LevelId(1), &roles, &gt).unwrap();
        engine.step(&event(1, "a", Op::Assert, "p", P)).unwrap();
        assert!(matches!(
            engine.step(&event(1, "a", Op::Assert, "q", P)),
            Err(EngineError::Belief(BeliefError::StaleEvent { .. }))
        ));
        assert!(matches!(
            engine.step(&event(2, "c", Op::Assert, "q", P)),
            Err(EngineError::UnknownAgent(_))
        ));
        let mut wrong = event(3, "a", Op::Assert, "q", P);
        wrong.level = LevelId(2);
        assert!(matches!(
            engine.step(&wrong),
            Err(EngineError::WrongEpisode { .. })
        ));
        assert_eq!(engine.open_keys(), engine.recompute().unwrap());
        assert_eq!(engine.records().len(), 1);
    }

    #[test]
    fn reopening_gets_a_new_record() {
        let gt = GroundTruth::default();
        let roles = [agent("a"), agent("b")];
        let mut engine = EngineState::new(TeamId(1), LevelId(1), &roles, &gt).unwrap();
        engine.step(&event(1, "a", Op::Assert, "u", P)).unwrap();
        engine.step(&event(2, "a", Op::Retract, "u", P)).unwrap();
        engine.step(&event(3, "a", Op::Assert, "u", N)).unwrap();
        let recs = engine.records();
        assert_eq!(recs.len(), 2);
        assert_eq!((recs[0].opened_at, recs[0].closed_at), (1, Some(2)));
        assert_eq!((recs[1].opened_at, recs[1].closed_at), (3, None));
    }
}
