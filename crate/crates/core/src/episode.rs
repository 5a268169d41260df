//! Per-team, per-level discrepancy counts.
//!
//! A discrepancy counts toward the level in which it was opened, once, even
//! if it is resolved before the level ends. Engine state does not carry over
//! between levels.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::belief::{LevelId, TeamId};
use crate::discrepancy::{Discrepancy, DiscrepancyKind, EngineError, EngineState};
use crate::scenario::{Record, Scenario};

/// Count per discrepancy kind. The total is always the sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct KindCounts([u64; 4]);

impl KindCounts {
    pub fn get(&self, kind: DiscrepancyKind) -> u64 {
        self.0[kind.index()]
    }

    pub fn set(&mut self, kind: DiscrepancyKind, count: u64) {
        self.0[kind.index()] = count;
    }

    pub fn increment(&mut self, kind: DiscrepancyKind) {
        self.0[kind.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (DiscrepancyKind, u64)> + '_ {
        DiscrepancyKind::ALL.into_iter().map(|k| (k, self.get(k)))
    }
}

impl FromIterator<(DiscrepancyKind, u64)> for KindCounts {
    fn from_iter<I: IntoIterator<Item = (DiscrepancyKind, u64)>>(iter: I) -> Self {
        let mut counts = KindCounts::default();
        for (kind, n) in iter {
            counts.0[kind.index()] += n;
        }
        counts
    }
}

impl Add for KindCounts {
    type Output = KindCounts;

    fn add(mut self, rhs: KindCounts) -> KindCounts {
        self += rhs;
        self
    }
}

impl AddAssign for KindCounts {
    fn add_assign(&mut self, rhs: KindCounts) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Serialize for KindCounts {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(4))?;
        for (kind, n) in self.iter() {
            map.serialize_entry(kind.short_name(), &n)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EpisodeCounts {
    pub team: TeamId,
    pub level: LevelId,
    pub by_kind: KindCounts,
}

impl EpisodeCounts {
    pub fn zero(team: TeamId, level: LevelId) -> Self {
        Self {
            team,
            level,
            by_kind: KindCounts::default(),
        }
    }

    pub fn total(&self) -> u64 {
        self.by_kind.total()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TeamHistory {
    pub team: TeamId,
    /// One entry per level, ascending from level 1.
    pub episodes: Vec<EpisodeCounts>,
}

impl TeamHistory {
    pub fn get(&self, level: LevelId) -> Option<&EpisodeCounts> {
        self.episodes.iter().find(|e| e.level == level)
    }

    pub fn levels(&self) -> impl Iterator<Item = LevelId> + '_ {
        self.episodes.iter().map(|e| e.level)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpisodeError {
    #[error(
        "record for team {found_team} level {found_level} counted as team {team} level {level}"
    )]
    MixedTeamOrLevel {
        team: TeamId,
        level: LevelId,
        found_team: TeamId,
        found_level: LevelId,
    },
    #[error("team {team} has more than one count for level {level}")]
    DuplicateEpisode { team: TeamId, level: LevelId },
    #[error("team {team} is missing level {level}")]
    MissingLevel { team: TeamId, level: LevelId },
}

/// Tallies the records opened in one level by kind.
pub fn count_level(
    records: &[Discrepancy],
    team: TeamId,
    level: LevelId,
) -> Result<EpisodeCounts, EpisodeError> {
    let mut counts = EpisodeCounts::zero(team, level);
    for r in records {
        if r.team != team || r.level != level {
            return Err(EpisodeError::MixedTeamOrLevel {
                team,
                level,
                found_team: r.team,
                found_level: r.level,
            });
        }
        counts.by_kind.increment(r.kind());
    }
    Ok(counts)
}

/// Groups counts by team with levels in ascending order. Every team must
/// cover levels `1..=max` without gaps.
pub fn build_history(all_counts: &[EpisodeCounts]) -> Result<Vec<TeamHistory>, EpisodeError> {
    let mut by_team: BTreeMap<TeamId, BTreeMap<LevelId, EpisodeCounts>> = BTreeMap::new();
    for c in all_counts {
        if by_team
            .entry(c.team)
            .or_default()
            .insert(c.level, *c)
            .is_some()
        {
            return Err(EpisodeError::DuplicateEpisode {
                team: c.team,
                level: c.level,
            });
        }
    }
    by_team
        .into_iter()
        .map(|(team, levels)| {
            for (expected, level) in (1..).map(LevelId).zip(levels.keys()) {
                if *level != expected {
                    return Err(EpisodeError::MissingLevel {
                        team,
                        level: expected,
                    });
                }
            }
            Ok(TeamHistory {
                team,
                episodes: levels.into_values().collect(),
            })
        })
        .collect()
}

/// Output of running the engine over a whole stream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Analysis {
    /// One entry per (team, declared level), sorted by team then level.
    pub counts: Vec<EpisodeCounts>,
    /// Every opened discrepancy, grouped by team then level, in opening order.
    pub records: Vec<Discrepancy>,
}

/// Runs a fresh engine per (team, level) over the update records in stream
/// order and counts what each opened. Every team in `teams` or in the stream
/// gets a row for every declared level.
pub fn analyze(
    scenario: &Scenario,
    records: &[Record],
    teams: impl IntoIterator<Item = TeamId>,
) -> Result<Analysis, EngineError> {
    let mut engines: BTreeMap<(TeamId, LevelId), EngineState> = BTreeMap::new();
    for team in teams {
        for level in scenario.level_ids() {
            engines.insert(
                (team, level),
                EngineState::for_scenario(scenario, team, level)?,
            );
        }
    }
    for record in records {
        let Record::Update(event) = record else {
            continue;
        };
        if !engines.contains_key(&(event.team, event.level)) {
            if scenario.level(event.level).is_none() {
                return Err(EngineError::UnknownLevel(event.level));
            }
            for level in scenario.level_ids() {
                engines.insert(
                    (event.team, level),
                    EngineState::for_scenario(scenario, event.team, level)?,
                );
            }
        }
        engines
            .get_mut(&(event.team, event.level))
            .expect("engine created above")
            .step(event)?;
    }

    let mut analysis = Analysis::default();
    for ((team, level), engine) in engines {
        let records = engine.into_records();
        let counts = count_level(&records, team, level).expect("engine records share its episode");
        analysis.counts.push(counts);
        analysis.records.extend(records);
    }
    Ok(analysis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::{AgentId, PropId};
    use crate::discrepancy::DiscrepancyKey;
    use alloc::vec;
    use proptest::prelude::*;

    fn rec(kind: DiscrepancyKind, n: u32, closed: Option<u64>) -> Discrepancy {
        Discrepancy {
            key: DiscrepancyKey {
                kind,
                proposition_id: PropId::new(alloc::format!("p{n}")).unwrap(),
                holder: AgentId::new("a").unwrap(),
                counterpart: None,
            },
            team: TeamId(1),
            level: LevelId(1),
            opened_at: u64::from(n) + 1,
            closed_at: closed,
        }
    }

    #[test]
    fn no_records_all_zero() {
        let c = count_level(&[], TeamId(1), LevelId(1)).unwrap();
        assert_eq!(c.total(), 0);
        assert!(c.by_kind.iter().all(|(_, n)| n == 0));
    }

    #[test]
    fn closures_do_not_decrement() {
        let recs = vec![
            rec(DiscrepancyKind::Omission, 0, None),
            rec(DiscrepancyKind::Omission, 1, Some(10)),
            rec(DiscrepancyKind::Omission, 2, None),
        ];
        let c = count_level(&recs, TeamId(1), LevelId(1)).unwrap();
        assert_eq!(c.by_kind.get(DiscrepancyKind::Omission), 3);
        assert_eq!(c.total(), 3);
    }

    #[test]
    fn mixed_episode_rejected() {
        let mut r = rec(DiscrepancyKind::FalseBelief, 0, None);
        r.level = LevelId(2);
        assert!(matches!(
            count_level(&[r], TeamId(1), LevelId(1)),
            Err(EpisodeError::MixedTeamOrLevel { .. })
        ));
    }

    fn ec(team: u32, level: u32, total: u64) -> EpisodeCounts {
        let mut c = EpisodeCounts::zero(TeamId(team), LevelId(level));
        c.by_kind.set(DiscrepancyKind::Omission, total);
        c
    }

    #[test]
    fn twenty_teams_four_levels() {
        let mut all = Vec::new();
        for team in 1..=20 {
            for level in 1..=4 {
                all.push(ec(team, level, u64::from(team * level)));
            }
        }
        let h = build_history(&all).unwrap();
        assert_eq!(h.len(), 20);
        assert!(h.iter().all(|t| t.episodes.len() == 4));
    }

    #[test]
    fn shuffled_levels_sorted() {
        let all = vec![ec(1, 3, 3), ec(1, 1, 1), ec(1, 4, 4), ec(1, 2, 2)];
        let h = build_history(&all).unwrap();
        let levels: Vec<_> = h[0].levels().map(|l| l.0).collect();
        assert_eq!(levels, vec![1, 2, 3, 4]);
    }

    #[test]
    fn gap_rejected() {
        let all = vec![ec(1, 1, 1), ec(1, 2, 2), ec(1, 4, 4)];
        assert_eq!(
            build_history(&all),
            Err(EpisodeError::MissingLevel {
                team: TeamId(1),
                level: LevelId(3)
            })
        );
        let all = vec![ec(1, 1, 1), ec(1, 1, 2)];
        assert!(matches!(
            build_history(&all),
            Err(EpisodeError::DuplicateEpisode { .. })
        ));
    }

    fn kind_strategy() -> impl Strategy<Value = DiscrepancyKind> {
        prop::sample::select(DiscrepancyKind::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn counts_match_tally(kinds in prop::collection::vec(kind_strategy(), 0..60), split in 0usize..60) {
            let recs: Vec<_> = kinds.iter().enumerate().map(|(i, k)| rec(*k, i as u32, None)).collect();
            let c = count_level(&recs, TeamId(1), LevelId(1)).unwrap();
            for k in DiscrepancyKind::ALL {
                let tally = kinds.iter().filter(|x| **x == k).count() as u64;
                prop_assert_eq!(c.by_kind.get(k), tally);
            }
            prop_assert_eq!(c.total(), kinds.len() as u64);

            let mut reversed = recs.clone();
            reversed.reverse();
            prop_assert_eq!(count_level(&reversed, TeamId(1), LevelId(1)).unwrap(), c);

            let split = split.min(recs.len());
            let (left, right) = recs.split_at(split);
            let l = count_level(left, TeamId(1), LevelId(1)).unwrap();
            let r = count_level(right, TeamId(1), LevelId(1)).unwrap();
            prop_assert_eq!(l.by_kind + r.by_kind, c.by_kind);
        }
    }
}
