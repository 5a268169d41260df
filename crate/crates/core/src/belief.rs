//! Propositions, attitudes and per-agent mental models.
//!
//! A proposition is a canonical id plus a polarity bit; the negation of a
//! proposition shares its id. A [`MentalModel`] holds at most one entry per
//! id and advances its clock with every applied [`UpdateEvent`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Canonical proposition key. Opaque, case-sensitive and never empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PropId(String);

impl PropId {
    pub fn new(id: impl Into<String>) -> Result<Self, BeliefError> {
        let id = id.into();
        if id.is_empty() {
            return Err(BeliefError::EmptyId);
        }
        Ok(Self(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for PropId {
    type Error = BeliefError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<PropId> for String {
    fn from(id: PropId) -> Self {
        id.0
    }
}

impl fmt::Display for PropId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Role-bearing agent identifier, e.g. `spotter` or `photographer`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AgentId(String);

impl AgentId {
    pub fn new(id: impl Into<String>) -> Result<Self, BeliefError> {
        let id = id.into();
        if id.is_empty() {
            return Err(BeliefError::EmptyId);
        }
        Ok(Self(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for AgentId {
    type Error = BeliefError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<AgentId> for String {
    fn from(id: AgentId) -> Self {
        id.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TeamId(pub u32);

impl fmt::Display for TeamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Episode index. Levels are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LevelId(pub u32);

impl fmt::Display for LevelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attitude {
    Belief,
    Goal,
    Commitment,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Proposition {
    pub id: PropId,
    pub polarity: Polarity,
}

impl Proposition {
    pub fn new(id: PropId, polarity: Polarity) -> Self {
        Self { id, polarity }
    }

    pub fn positive(id: PropId) -> Self {
        Self::new(id, Polarity::Positive)
    }

    pub fn negative(id: PropId) -> Self {
        Self::new(id, Polarity::Negative)
    }

    /// Same id, opposite polarity. `p.negate().negate() == p`.
    pub fn negate(&self) -> Self {
        Self {
            id: self.id.clone(),
            polarity: self.polarity.flip(),
        }
    }

    pub fn is_negation_of(&self, other: &Proposition) -> bool {
        self.id == other.id && self.polarity != other.polarity
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Positive => write!(f, "{}+", self.id),
            Polarity::Negative => write!(f, "{}-", self.id),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    Assert,
    Retract,
}

/// One annotated dialogue move applied to the actor's mental model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateEvent {
    pub ordinal: u64,
    pub team: TeamId,
    pub level: LevelId,
    /// Seconds into the level.
    pub t: f64,
    pub actor: AgentId,
    pub op: Op,
    pub proposition: Proposition,
    pub attitude: Attitude,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utterance_ref: Option<String>,
}

/// A held proposition: polarity, attitude and the ordinal it was set at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Entry {
    pub polarity: Polarity,
    pub attitude: Attitude,
    pub since: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BeliefError {
    #[error("identifier must not be empty")]
    EmptyId,
    #[error("stale event: ordinal {ordinal} is not after model clock {clock}")]
    StaleEvent { ordinal: u64, clock: u64 },
    #[error("retract of `{id}`, which the model does not hold")]
    RetractMissing { id: PropId },
    #[error("event actor `{found}` does not own model `{expected}`")]
    ActorMismatch { expected: AgentId, found: AgentId },
}

/// Read access to an agent's held entries.
pub trait Holdings {
    fn owner(&self) -> &AgentId;
    fn entries(&self) -> &BTreeMap<PropId, Entry>;

    fn entry(&self, id: &PropId) -> Option<&Entry> {
        self.entries().get(id)
    }

    fn holds(&self, id: &PropId) -> bool {
        self.entries().contains_key(id)
    }
}

impl<M: Holdings> Holdings for &M {
    fn owner(&self) -> &AgentId {
        (**self).owner()
    }

    fn entries(&self) -> &BTreeMap<PropId, Entry> {
        (**self).entries()
    }
}

/// One agent's current set of attitude-tagged propositions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MentalModel {
    owner: AgentId,
    entries: BTreeMap<PropId, Entry>,
    clock: Option<u64>,
}

impl MentalModel {
    pub fn new(owner: AgentId) -> Self {
        Self {
            owner,
            entries: BTreeMap::new(),
            clock: None,
        }
    }

    /// Ordinal of the last applied event, `None` before any update.
    pub fn clock(&self) -> Option<u64> {
        self.clock
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Applies one update. The model is left untouched on error.
    ///
    /// Asserting an id replaces whatever entry the id had, including one of
    /// opposite polarity. Re-asserting an identical entry keeps its `since`
    /// ordinal but still advances the clock.
    pub fn apply_update(&mut self, event: &UpdateEvent) -> Result<(), BeliefError> {
        if event.actor != self.owner {
            return Err(BeliefError::ActorMismatch {
                expected: self.owner.clone(),
                found: event.actor.clone(),
            });
        }
        if let Some(clock) = self.clock {
            if event.ordinal <= clock {
                return Err(BeliefError::StaleEvent {
                    ordinal: event.ordinal,
                    clock,
                });
            }
        }
        let id = &event.proposition.id;
        match event.op {
            Op::Assert => {
                let same = self.entries.get(id).is_some_and(|e| {
                    e.polarity == event.proposition.polarity && e.attitude == event.attitude
                });
                if !same {
                    self.entries.insert(
                        id.clone(),
                        Entry {
                            polarity: event.proposition.polarity,
                            attitude: event.attitude,
                            since: event.ordinal,
                        },
                    );
                }
            }
            Op::Retract => {
                if self.entries.remove(id).is_none() {
                    return Err(BeliefError::RetractMissing { id: id.clone() });
                }
            }
        }
        self.clock = Some(event.ordinal);
        Ok(())
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            owner: self.owner.clone(),
            entries: self.entries.clone(),
        }
    }
}

impl Holdings for MentalModel {
    fn owner(&self) -> &AgentId {
        &self.owner
    }

    fn entries(&self) -> &BTreeMap<PropId, Entry> {
        &self.entries
    }
}

/// Immutable copy of a model's entries at one point in the stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    owner: AgentId,
    entries: BTreeMap<PropId, Entry>,
}

impl Snapshot {
    /// Builds a snapshot directly, e.g. for detector tests.
    pub fn from_entries(
        owner: AgentId,
        entries: impl IntoIterator<Item = (Proposition, Attitude)>,
    ) -> Self {
        let entries = entries
            .into_iter()
            .map(|(p, attitude)| {
                (
                    p.id,
                    Entry {
                        polarity: p.polarity,
                        attitude,
                        since: 0,
                    },
                )
            })
            .collect();
        Self { owner, entries }
    }

    pub fn propositions(&self) -> BTreeSet<(Proposition, Attitude)> {
        self.entries
            .iter()
            .map(|(id, e)| (Proposition::new(id.clone(), e.polarity), e.attitude))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Holdings for Snapshot {
    fn owner(&self) -> &AgentId {
        &self.owner
    }

    fn entries(&self) -> &BTreeMap<PropId, Entry> {
        &self.entries
    }
}
