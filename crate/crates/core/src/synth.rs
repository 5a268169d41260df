//! Synthetic annotation corpora with a ledger of planted discrepancies.
//!
//! Every planted discrepancy is realized by a short event template that
//! triggers exactly that discrepancy and nothing else, so the ledger is an
//! exact oracle for the detectors. Filler templates that never trigger a
//! discrepancy are interleaved with the plantings.
//!
//! Per team and kind a baseline rate is drawn once as
//! `rate · max(0, 1 + spread · z)`; the count for each level is then
//! `min(cap, max(0, round(b + noise · sqrt(b) · z')))` with fresh `z'`.
//! The generator is ChaCha8 seeded from the 64-bit config seed.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::{
    AgentId, Attitude, LevelId, Op, Polarity, PropId, Proposition, TeamId, UpdateEvent,
};
use crate::discrepancy::DiscrepancyKind;
use crate::scenario::{Confirmation, GroundTruth, LevelSpec, Record, Scenario, SCHEMA_VERSION};
use crate::scoring::{Difficulty, Element, TargetSpec};

pub const RNG_NAME: &str = "ChaCha8Rng";
pub const GENERATOR_NAME: &str = "smm-synth/1";

/// One value per discrepancy kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerKind<T> {
    pub contradiction: T,
    pub omission: T,
    pub unsupported: T,
    #[serde(rename = "false")]
    pub false_belief: T,
}

impl<T: Copy> PerKind<T> {
    pub fn get(&self, kind: DiscrepancyKind) -> T {
        match kind {
            DiscrepancyKind::BeliefContradiction => self.contradiction,
            DiscrepancyKind::Omission => self.omission,
            DiscrepancyKind::UnsupportedBelief => self.unsupported,
            DiscrepancyKind::FalseBelief => self.false_belief,
        }
    }

    pub fn uniform(value: T) -> Self {
        Self {
            contradiction: value,
            omission: value,
            unsupported: value,
            false_belief: value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub teams: u32,
    pub levels: u32,
    pub seed: u64,
    pub roles: Vec<AgentId>,
    /// Expected plantings per level for an average team.
    pub rate_by_kind: PerKind<f64>,
    /// Optional hard ceiling per level.
    pub max_per_level: PerKind<Option<u32>>,
    /// Relative cross-team spread of the baseline rates.
    pub team_baseline_spread: f64,
    /// Level-to-level jitter, in units of `sqrt(baseline)`.
    pub noise: f64,
    /// Minimum number of update events per (team, level).
    pub events_per_level: u32,
    /// Probability that a planted discrepancy is resolved later in the level.
    pub resolve_fraction: f64,
    pub level_duration: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            teams: 20,
            levels: 4,
            seed: 0,
            roles: vec![
                AgentId::new("photographer").expect("non-empty"),
                AgentId::new("spotter").expect("non-empty"),
            ],
            rate_by_kind: PerKind {
                contradiction: 5.0,
                omission: 11.0,
                unsupported: 0.08,
                false_belief: 0.08,
            },
            max_per_level: PerKind {
                contradiction: None,
                omission: None,
                unsupported: Some(2),
                false_belief: Some(2),
            },
            team_baseline_spread: 0.5,
            noise: 1.0,
            events_per_level: 60,
            resolve_fraction: 0.25,
            level_duration: 480.0,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |why: &str| Err(GenError::InvalidConfig(why.into()));
        if self.teams == 0 {
            return bad("teams must be at least 1");
        }
        if self.levels == 0 {
            return bad("levels must be at least 1");
        }
        if self.roles.len() < 2 {
            return bad("at least two roles are needed");
        }
        if self.roles.iter().collect::<BTreeSet<_>>().len() != self.roles.len() {
            return bad("roles must be distinct");
        }
        for kind in DiscrepancyKind::ALL {
            let r = self.rate_by_kind.get(kind);
            if !(r.is_finite() && r >= 0.0) {
                return bad("rates must be finite and non-negative");
            }
        }
        if !(self.team_baseline_spread.is_finite() && self.team_baseline_spread >= 0.0) {
            return bad("team_baseline_spread must be finite and non-negative");
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return bad("noise must be finite and non-negative");
        }
        if !(0.0..=1.0).contains(&self.resolve_fraction) {
            return bad("resolve_fraction must lie in [0, 1]");
        }
        if !(self.level_duration.is_finite() && self.level_duration > 0.0) {
            return bad("level_duration must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
}

/// One planted discrepancy and the ordinals of the events realizing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Planted {
    pub team: TeamId,
    pub level: LevelId,
    pub kind: DiscrepancyKind,
    pub proposition_id: PropId,
    pub holder: AgentId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterpart: Option<AgentId>,
    pub positions: Vec<u64>,
    pub resolved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantLedger {
    pub generator: String,
    pub rng: String,
    pub config: GenConfig,
    pub planted: Vec<Planted>,
}

impl PlantLedger {
    /// Planted count per (team, level, kind).
    pub fn tally(&self) -> BTreeMap<(TeamId, LevelId, DiscrepancyKind), u64> {
        let mut out = BTreeMap::new();
        for p in &self.planted {
            *out.entry((p.team, p.level, p.kind)).or_insert(0) += 1;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub scenario: Scenario,
    pub records: Vec<Record>,
    pub ledger: PlantLedger,
}

/// Targets used by generated scenarios and the bundled fixtures. Element
/// splits inside each target are illustrative; only the per-target maxima
/// (6, 6 and 7 points) are fixed.
pub fn default_targets() -> Vec<TargetSpec> {
    vec![
        TargetSpec::new(
            "target_1",
            Difficulty::Hard,
            vec![
                Element::new("open_field", 2),
                Element::new("kangaroos", 2),
                Element::new("poacher", 2),
            ],
        )
        .with_label("Target 1"),
        TargetSpec::new(
            "target_2",
            Difficulty::Easy,
            vec![
                Element::new("building", 1),
                Element::new("helipad", 2),
                Element::new("helicopter", 2),
                Element::new("suited_individual", 1),
            ],
        )
        .with_label("Target 2"),
        TargetSpec::new(
            "target_3",
            Difficulty::Easy,
            vec![
                Element::new("water_tower", 4),
                Element::new("white_vehicle", 1),
                Element::new("cargo", 2),
            ],
        )
        .with_label("Target 3"),
    ]
}

#[derive(Debug, Clone)]
struct Step {
    actor: usize,
    op: Op,
    id: PropId,
    polarity: Polarity,
    attitude: Attitude,
}

/// A template instance: steps that must stay in order, plus the planting
/// they realize, if any.
struct Script {
    steps: Vec<Step>,
    planted: Option<PlantSpec>,
}

struct PlantSpec {
    kind: DiscrepancyKind,
    id: PropId,
    holder: usize,
    counterpart: Option<usize>,
    resolved: bool,
}

/// Per-level id pools. Ground truth is shared across teams, so each pool
/// is sized to the largest demand of any team.
#[derive(Default)]
struct Pools {
    facts: usize,
    open: usize,
    rumors: usize,
    expected: Vec<usize>,
}

fn id(s: String) -> PropId {
    PropId::new(s).expect("generated ids are non-empty")
}

fn fact_id(i: usize) -> PropId {
    id(format!("fact_{i:03}"))
}

fn open_id(i: usize) -> PropId {
    id(format!("open_{i:03}"))
}

fn rumor_id(i: usize) -> PropId {
    id(format!("rumor_{i:03}"))
}

fn expected_id(role: &AgentId, i: usize) -> PropId {
    id(format!("exp_{role}_{i:03}"))
}

/// Ground-truth polarity of a fact or expected id, fixed by its index so
/// that every team sees the same truth.
fn truth(i: usize) -> Polarity {
    if i % 3 == 1 {
        Polarity::Negative
    } else {
        Polarity::Positive
    }
}

struct Allocator {
    facts: usize,
    open: usize,
    rumors: usize,
    expected: Vec<usize>,
}

impl Allocator {
    fn new(roles: usize) -> Self {
        Self {
            facts: 0,
            open: 0,
            rumors: 0,
            expected: vec![0; roles],
        }
    }

    fn next(counter: &mut usize) -> usize {
        let i = *counter;
        *counter += 1;
        i
    }

    fn grow(&self, pools: &mut Pools) {
        pools.facts = pools.facts.max(self.facts);
        pools.open = pools.open.max(self.open);
        pools.rumors = pools.rumors.max(self.rumors);
        if pools.expected.len() < self.expected.len() {
            pools.expected.resize(self.expected.len(), 0);
        }
        for (p, a) in pools.expected.iter_mut().zip(&self.expected) {
            *p = (*p).max(*a);
        }
    }
}

fn attitude(rng: &mut ChaCha8Rng) -> Attitude {
    match rng.random_range(0..10) {
        0 => Attitude::Goal,
        1 => Attitude::Commitment,
        _ => Attitude::Belief,
    }
}

fn two_agents(rng: &mut ChaCha8Rng, roles: usize) -> (usize, usize) {
    let a = rng.random_range(0..roles);
    let mut b = rng.random_range(0..roles - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

fn plant(
    kind: DiscrepancyKind,
    rng: &mut ChaCha8Rng,
    alloc: &mut Allocator,
    roles: &[AgentId],
    resolve: bool,
) -> Script {
    let step = |actor, op, id: &PropId, polarity, attitude| Step {
        actor,
        op,
        id: id.clone(),
        polarity,
        attitude,
    };
    let (a, b) = two_agents(rng, roles.len());
    let att = attitude(rng);
    match kind {
        DiscrepancyKind::BeliefContradiction => {
            let pid = open_id(Allocator::next(&mut alloc.open));
            let pol = if rng.random_bool(0.5) {
                Polarity::Positive
            } else {
                Polarity::Negative
            };
            let mut steps = vec![
                step(a, Op::Assert, &pid, pol, att),
                step(b, Op::Assert, &pid, pol.flip(), att),
            ];
            if resolve {
                steps.push(step(b, Op::Assert, &pid, pol, att));
            }
            let (holder, counterpart) = if roles[a] < roles[b] { (a, b) } else { (b, a) };
            Script {
                steps,
                planted: Some(PlantSpec {
                    kind,
                    id: pid,
                    holder,
                    counterpart: Some(counterpart),
                    resolved: resolve,
                }),
            }
        }
        DiscrepancyKind::Omission => {
            let i = Allocator::next(&mut alloc.expected[b]);
            let pid = expected_id(&roles[b], i);
            let mut steps = vec![step(a, Op::Assert, &pid, truth(i), att)];
            if resolve {
                steps.push(step(b, Op::Assert, &pid, truth(i), attitude(rng)));
            }
            Script {
                steps,
                planted: Some(PlantSpec {
                    kind,
                    id: pid,
                    holder: a,
                    counterpart: Some(b),
                    resolved: resolve,
                }),
            }
        }
        DiscrepancyKind::FalseBelief => {
            let i = Allocator::next(&mut alloc.facts);
            let pid = fact_id(i);
            let mut steps = vec![step(a, Op::Assert, &pid, truth(i).flip(), att)];
            if resolve {
                steps.push(step(a, Op::Assert, &pid, truth(i), att));
            }
            Script {
                steps,
                planted: Some(PlantSpec {
                    kind,
                    id: pid,
                    holder: a,
                    counterpart: None,
                    resolved: resolve,
                }),
            }
        }
        DiscrepancyKind::UnsupportedBelief => {
            let pid = rumor_id(Allocator::next(&mut alloc.rumors));
            let pol = if rng.random_bool(0.5) {
                Polarity::Positive
            } else {
                Polarity::Negative
            };
            let mut steps = vec![step(a, Op::Assert, &pid, pol, att)];
            if resolve {
                steps.push(step(a, Op::Retract, &pid, pol, att));
            }
            Script {
                steps,
                planted: Some(PlantSpec {
                    kind,
                    id: pid,
                    holder: a,
                    counterpart: None,
                    resolved: resolve,
                }),
            }
        }
    }
}

/// A template that never opens a discrepancy at any point.
fn filler(rng: &mut ChaCha8Rng, alloc: &mut Allocator, roles: &[AgentId]) -> Script {
    let (a, b) = two_agents(rng, roles.len());
    let att = attitude(rng);
    let steps = match rng.random_range(0..5) {
        // A covered fact, stated correctly and then dropped.
        0 => {
            let i = Allocator::next(&mut alloc.facts);
            let pid = fact_id(i);
            vec![
                Step {
                    actor: a,
                    op: Op::Assert,
                    id: pid.clone(),
                    polarity: truth(i),
                    attitude: att,
                },
                Step {
                    actor: a,
                    op: Op::Retract,
                    id: pid,
                    polarity: truth(i),
                    attitude: att,
                },
            ]
        }
        // A role states something it is expected to know; a teammate echoes it.
        1 => {
            let i = Allocator::next(&mut alloc.expected[a]);
            let pid = expected_id(&roles[a], i);
            vec![
                Step {
                    actor: a,
                    op: Op::Assert,
                    id: pid.clone(),
                    polarity: truth(i),
                    attitude: att,
                },
                Step {
                    actor: b,
                    op: Op::Assert,
                    id: pid,
                    polarity: truth(i),
                    attitude: attitude(rng),
                },
            ]
        }
        // Shared agreement on a covered id without a fact, then a change of attitude.
        2 => {
            let pid = open_id(Allocator::next(&mut alloc.open));
            let pol = if rng.random_bool(0.5) {
                Polarity::Positive
            } else {
                Polarity::Negative
            };
            let other = match att {
                Attitude::Belief => Attitude::Commitment,
                _ => Attitude::Belief,
            };
            vec![
                Step {
                    actor: a,
                    op: Op::Assert,
                    id: pid.clone(),
                    polarity: pol,
                    attitude: att,
                },
                Step {
                    actor: b,
                    op: Op::Assert,
                    id: pid.clone(),
                    polarity: pol,
                    attitude: att,
                },
                Step {
                    actor: a,
                    op: Op::Assert,
                    id: pid,
                    polarity: pol,
                    attitude: other,
                },
            ]
        }
        // A correct fact repeated verbatim.
        3 => {
            let i = Allocator::next(&mut alloc.facts);
            let pid = fact_id(i);
            vec![
                Step {
                    actor: a,
                    op: Op::Assert,
                    id: pid.clone(),
                    polarity: truth(i),
                    attitude: att,
                },
                Step {
                    actor: a,
                    op: Op::Assert,
                    id: pid,
                    polarity: truth(i),
                    attitude: att,
                },
            ]
        }
        // A correct fact held by both.
        _ => {
            let i = Allocator::next(&mut alloc.facts);
            let pid = fact_id(i);
            vec![
                Step {
                    actor: a,
                    op: Op::Assert,
                    id: pid.clone(),
                    polarity: truth(i),
                    attitude: att,
                },
                Step {
                    actor: b,
                    op: Op::Assert,
                    id: pid,
                    polarity: truth(i),
                    attitude: att,
                },
            ]
        }
    };
    Script {
        steps,
        planted: None,
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Random interleaving of the scripts that keeps each script's own order.
fn interleave(rng: &mut ChaCha8Rng, scripts: &[Script]) -> Vec<(usize, usize)> {
    let mut slots: Vec<usize> = scripts
        .iter()
        .enumerate()
        .flat_map(|(i, s)| core::iter::repeat_n(i, s.steps.len()))
        .collect();
    slots.shuffle(rng);
    let mut next = vec![0usize; scripts.len()];
    slots
        .into_iter()
        .map(|s| {
            let step = next[s];
            next[s] += 1;
            (s, step)
        })
        .collect()
}

/// Sorted event times in whole milliseconds within `[0, duration]`.
fn times(rng: &mut ChaCha8Rng, n: usize, duration: f64) -> Vec<f64> {
    let max_ms = libm::floor(duration * 1000.0) as u64;
    let mut ms: Vec<u64> = (0..n).map(|_| rng.random_range(0..=max_ms)).collect();
    ms.sort_unstable();
    ms.into_iter().map(|m| m as f64 / 1000.0).collect()
}

pub fn generate(config: &GenConfig) -> Result<Corpus, GenError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let roles = &config.roles;
    let targets = default_targets();

    let baselines: Vec<PerKind<f64>> = (0..config.teams)
        .map(|_| {
            let mut draw = |kind| {
                let rate: f64 = config.rate_by_kind.get(kind);
                rate * (1.0 + config.team_baseline_spread * normal(&mut rng)).max(0.0)
            };
            PerKind {
                contradiction: draw(DiscrepancyKind::BeliefContradiction),
                omission: draw(DiscrepancyKind::Omission),
                unsupported: draw(DiscrepancyKind::UnsupportedBelief),
                false_belief: draw(DiscrepancyKind::FalseBelief),
            }
        })
        .collect();

    let mut per_level_pools: Vec<Pools> = (0..config.levels).map(|_| Pools::default()).collect();
    // scripts[team][level]
    let mut plans: Vec<Vec<Vec<Script>>> = Vec::new();
    for baseline in &baselines {
        let mut team_plans = Vec::new();
        for pools in per_level_pools.iter_mut() {
            let mut alloc = Allocator::new(roles.len());
            let mut scripts = Vec::new();
            for kind in DiscrepancyKind::ALL {
                let b = baseline.get(kind);
                let jitter = config.noise * libm::sqrt(b) * normal(&mut rng);
                let mut n = libm::round(b + jitter).max(0.0) as u32;
                if let Some(cap) = config.max_per_level.get(kind) {
                    n = n.min(cap);
                }
                for _ in 0..n {
                    let resolve = rng.random_bool(config.resolve_fraction);
                    scripts.push(plant(kind, &mut rng, &mut alloc, roles, resolve));
                }
            }
            let mut events: usize = scripts.iter().map(|s| s.steps.len()).sum();
            while events < config.events_per_level as usize {
                let s = filler(&mut rng, &mut alloc, roles);
                events += s.steps.len();
                scripts.push(s);
            }
            alloc.grow(pools);
            team_plans.push(scripts);
        }
        plans.push(team_plans);
    }

    let mut ground_truth = BTreeMap::new();
    for (l, pools) in per_level_pools.iter().enumerate() {
        let mut gt = GroundTruth::default();
        for i in 0..pools.facts {
            gt.facts.insert(fact_id(i), truth(i));
            gt.coverage.insert(fact_id(i));
        }
        for i in 0..pools.open {
            gt.coverage.insert(open_id(i));
        }
        for (r, role) in roles.iter().enumerate() {
            let n = pools.expected.get(r).copied().unwrap_or(0);
            let mut ids = BTreeSet::new();
            for i in 0..n {
                let pid = expected_id(role, i);
                gt.facts.insert(pid.clone(), truth(i));
                gt.coverage.insert(pid.clone());
                ids.insert(pid);
            }
            gt.expected_knowledge.insert(role.clone(), ids);
        }
        ground_truth.insert(LevelId(l as u32 + 1), gt);
    }

    let scenario = Scenario {
        schema_version: SCHEMA_VERSION,
        roles: roles.clone(),
        levels: (1..=config.levels)
            .map(|l| LevelSpec {
                level: LevelId(l),
                duration_seconds: config.level_duration,
            })
            .collect(),
        ground_truth,
        targets: targets.clone(),
    };

    let elements: Vec<&str> = targets
        .iter()
        .flat_map(|t| t.elements.iter().map(|e| e.id.as_str()))
        .collect();
    let mut records = Vec::new();
    let mut planted = Vec::new();
    let mut ordinal = 0u64;
    for (t, team_plans) in plans.into_iter().enumerate() {
        let team = TeamId(t as u32 + 1);
        for (l, scripts) in team_plans.into_iter().enumerate() {
            let level = LevelId(l as u32 + 1);
            let order = interleave(&mut rng, &scripts);
            let stamps = times(&mut rng, order.len(), config.level_duration);
            let mut positions: Vec<Vec<u64>> = vec![Vec::new(); scripts.len()];
            for ((s, k), t) in order.into_iter().zip(stamps) {
                ordinal += 1;
                let step = &scripts[s].steps[k];
                positions[s].push(ordinal);
                records.push(Record::Update(UpdateEvent {
                    ordinal,
                    team,
                    level,
                    t,
                    actor: roles[step.actor].clone(),
                    op: step.op,
                    proposition: Proposition::new(step.id.clone(), step.polarity),
                    attitude: step.attitude,
                    utterance_ref: None,
                }));
            }
            for (script, pos) in scripts.iter().zip(positions) {
                if let Some(p) = &script.planted {
                    planted.push(Planted {
                        team,
                        level,
                        kind: p.kind,
                        proposition_id: p.id.clone(),
                        holder: roles[p.holder].clone(),
                        counterpart: p.counterpart.map(|c| roles[c].clone()),
                        positions: pos,
                        resolved: p.resolved,
                    });
                }
            }
            if level.0 == config.levels {
                let mut confirmed: Vec<&str> = elements
                    .iter()
                    .copied()
                    .filter(|_| rng.random_bool(0.4))
                    .collect();
                confirmed.shuffle(&mut rng);
                let stamps = times(&mut rng, confirmed.len(), config.level_duration);
                for (element, t) in confirmed.into_iter().zip(stamps) {
                    records.push(Record::Confirmation(Confirmation {
                        team,
                        level,
                        t,
                        element_id: element.into(),
                    }));
                }
            }
        }
    }
    planted.sort_by(|a, b| {
        (a.team, a.level, a.positions.first()).cmp(&(b.team, b.level, b.positions.first()))
    });

    Ok(Corpus {
        scenario,
        records,
        ledger: PlantLedger {
            generator: GENERATOR_NAME.into(),
            rng: RNG_NAME.into(),
            config: config.clone(),
            planted,
        },
    })
}

/// An unstructured random update stream over a small id universe, for
/// checking the incremental engine against batch recomputation. Unlike
/// [`generate`], nothing is planted and any discrepancy may occur.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomStream {
    pub team: TeamId,
    pub level: LevelId,
    pub roles: Vec<AgentId>,
    pub ground_truth: GroundTruth,
    pub events: Vec<UpdateEvent>,
}

pub fn random_stream(seed: u64, len: usize) -> RandomStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_roles = rng.random_range(2..=3);
    let roles: Vec<AgentId> = ["alpha", "bravo", "charlie"][..n_roles]
        .iter()
        .map(|r| AgentId::new(*r).expect("non-empty"))
        .collect();
    let universe: Vec<PropId> = (0..rng.random_range(4..=10))
        .map(|i| id(format!("p{i}")))
        .collect();

    let mut gt = GroundTruth::default();
    for pid in &universe {
        if rng.random_bool(0.6) {
            gt.coverage.insert(pid.clone());
            if rng.random_bool(0.6) {
                let pol = if rng.random_bool(0.5) {
                    Polarity::Positive
                } else {
                    Polarity::Negative
                };
                gt.facts.insert(pid.clone(), pol);
            }
        }
    }
    for role in &roles {
        let ids = universe
            .iter()
            .filter(|_| rng.random_bool(0.3))
            .cloned()
            .collect();
        gt.expected_knowledge.insert(role.clone(), ids);
    }

    let mut held: Vec<BTreeSet<PropId>> = vec![BTreeSet::new(); roles.len()];
    let mut events = Vec::with_capacity(len);
    for ordinal in 1..=len as u64 {
        let actor = rng.random_range(0..roles.len());
        let retract = !held[actor].is_empty() && rng.random_bool(0.25);
        let (op, pid) = if retract {
            let ids: Vec<&PropId> = held[actor].iter().collect();
            (Op::Retract, ids[rng.random_range(0..ids.len())].clone())
        } else {
            (
                Op::Assert,
                universe[rng.random_range(0..universe.len())].clone(),
            )
        };
        match op {
            Op::Assert => held[actor].insert(pid.clone()),
            Op::Retract => held[actor].remove(&pid),
        };
        let polarity = if rng.random_bool(0.5) {
            Polarity::Positive
        } else {
            Polarity::Negative
        };
        let attitude = match rng.random_range(0..6) {
            0 => Attitude::Goal,
            1 => Attitude::Commitment,
            _ => Attitude::Belief,
        };
        events.push(UpdateEvent {
            ordinal,
            team: TeamId(1),
            level: LevelId(1),
            t: ordinal as f64,
            actor: roles[actor].clone(),
            op,
            proposition: Proposition::new(pid, polarity),
            attitude,
            utterance_ref: None,
        });
    }
    RandomStream {
        team: TeamId(1),
        level: LevelId(1),
        roles,
        ground_truth: gt,
        events,
    }
}
