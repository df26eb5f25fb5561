//! Trial lifecycle: sense, act, move, resolve contacts, then update doors,
//! laps, rewards and home returns.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Segment, Vec2};
use crate::maze::collision::resolve_against;
use crate::maze::layout::{DoorStates, MazeLayout, Texture};
use crate::maze::{step_kinematics, Pose, RobotBody};
use crate::rnn::{obstacle_avoidance, shuffle_frame, Ablation, AvoidanceConfig};
use crate::sensors::{sense, SensorConfig, N_INPUTS};

/// Anything that maps the 91 inputs to a raw `(left, right)` wheel command.
pub trait Controller {
    fn reset(&mut self);

    /// Raw command before obstacle avoidance and clamping.
    fn act(&mut self, inputs: &[f64; N_INPUTS], pose: &Pose) -> [f64; 2];

    /// Internal activity to log each step; empty for controllers without one.
    fn activities(&self) -> &[f64] {
        &[]
    }

    /// Called every step before `act` when a weight ablation is active.
    fn ablate_weights(&mut self, _ablation: Ablation, _rng: &mut dyn RngCore) {}
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrialConfig {
    pub max_steps: usize,
    /// Half-width of the uniform start position jitter (m).
    pub start_jitter_position: f64,
    /// Half-width of the uniform start heading jitter (rad).
    pub start_jitter_heading: f64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            max_steps: 5000,
            start_jitter_position: 0.003,
            start_jitter_heading: 0.05,
        }
    }
}

/// Immutable inputs shared by every trial of an experiment.
#[derive(Debug, Clone)]
pub struct Environment {
    pub layout: MazeLayout,
    pub body: RobotBody,
    pub sensors: SensorConfig,
    pub avoidance: AvoidanceConfig,
    pub trial: TrialConfig,
}

impl Environment {
    pub fn new(layout: MazeLayout) -> Self {
        Environment {
            layout,
            body: RobotBody::default(),
            sensors: SensorConfig::default(),
            avoidance: AvoidanceConfig::default(),
            trial: TrialConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    LapStart,
    DoorClosed(String),
    Reward(u8),
    Repeat(u8),
    Home,
    DoorsOpened,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::LapStart => f.write_str("lap"),
            Event::DoorClosed(id) => write!(f, "door:{id}"),
            Event::Reward(k) => write!(f, "reward:{k}"),
            Event::Repeat(k) => write!(f, "repeat:{k}"),
            Event::Home => f.write_str("home"),
            Event::DoorsOpened => f.write_str("open"),
        }
    }
}

impl FromStr for Event {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("unknown event `{s}`"));
        let path = |v: &str| v.parse::<u8>().map_err(|_| bad());
        match s.split_once(':') {
            None => match s {
                "lap" => Ok(Event::LapStart),
                "home" => Ok(Event::Home),
                "open" => Ok(Event::DoorsOpened),
                _ => Err(bad()),
            },
            Some(("door", id)) if !id.is_empty() => Ok(Event::DoorClosed(id.to_string())),
            Some(("reward", k)) => Ok(Event::Reward(path(k)?)),
            Some(("repeat", k)) => Ok(Event::Repeat(path(k)?)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathVisit {
    pub path: u8,
    pub returned_home: bool,
    /// Step at which the reward site was reached.
    pub step: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Outbound,
    Returning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialState {
    pub step: usize,
    pub pose: Pose,
    pub prev_velocity: Vec2,
    pub velocity: Vec2,
    pub rewards_obtained: BTreeSet<u8>,
    pub visits: Vec<PathVisit>,
    pub num_repeats: u32,
    pub phase: Phase,
    pub doors: DoorStates,
    pub seed: u64,
    /// Set on entering the lap start region, cleared once a visit is credited.
    pub reward_armed: bool,
    pub in_home: bool,
    pub in_lap_start: bool,
    pub done: bool,
}

impl TrialState {
    pub fn new(layout: &MazeLayout, start: Pose, seed: u64) -> Self {
        TrialState {
            step: 0,
            pose: start,
            prev_velocity: Vec2::default(),
            velocity: Vec2::default(),
            rewards_obtained: BTreeSet::new(),
            visits: Vec::new(),
            num_repeats: 0,
            phase: Phase::Outbound,
            doors: layout.initial_doors(),
            seed,
            reward_armed: false,
            in_home: start.position().dist(layout.home.position()) < layout.home_radius,
            in_lap_start: layout.lap_start.contains(start.position()),
            done: false,
        }
    }

    /// Close every open door whose trigger region holds the robot centre.
    pub fn update_doors(&mut self, layout: &MazeLayout, events: &mut Vec<Event>) -> bool {
        let p = self.pose.position();
        let mut changed = false;
        for (i, d) in layout.doors.iter().enumerate() {
            if !self.doors.is_closed(i) && d.trigger.contains(p) && self.doors.close(i) {
                events.push(Event::DoorClosed(d.id.clone()));
                changed = true;
            }
        }
        changed
    }

    /// Credit at most one reward visit per lap.
    pub fn check_reward(&mut self, layout: &MazeLayout, events: &mut Vec<Event>) {
        if !self.reward_armed {
            return;
        }
        let p = self.pose.position();
        let Some(site) = layout.rewards.iter().find(|r| r.pos.dist(p) < layout.reward_radius) else {
            return;
        };
        self.reward_armed = false;
        self.phase = Phase::Returning;
        self.visits.push(PathVisit {
            path: site.path,
            returned_home: false,
            step: self.step,
        });
        if self.rewards_obtained.insert(site.path) {
            events.push(Event::Reward(site.path));
        } else {
            self.num_repeats += 1;
            events.push(Event::Repeat(site.path));
        }
    }

    /// Lap start and home entry bookkeeping. Returns true when doors reopened.
    pub fn update_regions(&mut self, layout: &MazeLayout, events: &mut Vec<Event>) -> bool {
        let p = self.pose.position();
        let in_lap = layout.lap_start.contains(p);
        if in_lap && !self.in_lap_start {
            self.reward_armed = true;
            events.push(Event::LapStart);
        }
        self.in_lap_start = in_lap;

        let in_home = p.dist(layout.home.position()) < layout.home_radius;
        let entered = in_home && !self.in_home;
        self.in_home = in_home;
        if !entered {
            return false;
        }
        events.push(Event::Home);
        if let Some(last) = self.visits.last_mut() {
            last.returned_home = true;
        }
        self.phase = Phase::Outbound;
        if !self.visits.is_empty() && self.rewards_obtained.len() == layout.reward_count() {
            self.done = true;
        }
        let reopened = self.doors.closed_count() > 0;
        if reopened {
            self.doors.open_all();
            events.push(Event::DoorsOpened);
        }
        reopened
    }

    pub fn summary(&self) -> TrialSummary {
        let mut s = TrialSummary {
            fitness: 0.0,
            elapsed_steps: self.step,
            visits: self.visits.clone(),
            rewards_obtained: self.rewards_obtained.iter().copied().collect(),
            num_repeats: self.num_repeats,
        };
        s.fitness = compute_fitness(&s);
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub fitness: f64,
    pub elapsed_steps: usize,
    pub visits: Vec<PathVisit>,
    pub rewards_obtained: Vec<u8>,
    pub num_repeats: u32,
}

impl TrialSummary {
    pub fn returned_count(&self) -> usize {
        self.visits.iter().filter(|v| v.returned_home).count()
    }

    pub fn path_order(&self) -> Vec<u8> {
        self.visits.iter().map(|v| v.path).collect()
    }
}

/// Rewards collected, plus the fraction of visits followed by a home return,
/// minus 0.2 per repeated visit.
pub fn compute_fitness(s: &TrialSummary) -> f64 {
    let portion = if s.visits.is_empty() {
        0.0
    } else {
        s.returned_count() as f64 / s.visits.len() as f64
    };
    s.rewards_obtained.len() as f64 + portion - 0.2 * s.num_repeats as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub step: usize,
    /// Pose after this step's move.
    pub pose: Pose,
    /// Inputs as the controller saw them (after any sensor ablation).
    pub inputs: Vec<f64>,
    pub activities: Vec<f64>,
    /// Clamped wheel command actually applied.
    pub motor: [f64; 2],
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialLog {
    pub rows: Vec<LogRow>,
    pub summary: TrialSummary,
}

pub fn start_pose(layout: &MazeLayout, cfg: &TrialConfig, rng: &mut impl Rng) -> Pose {
    let mut u = || 2.0 * rng.random::<f64>() - 1.0;
    let dx = cfg.start_jitter_position * u();
    let dy = cfg.start_jitter_position * u();
    let dh = cfg.start_jitter_heading * u();
    Pose::new(layout.home.x + dx, layout.home.y + dy, layout.home.heading + dh)
}

pub fn run_trial(ctrl: &mut dyn Controller, env: &Environment, seed: u64, ablation: Ablation) -> Result<TrialLog> {
    simulate(ctrl, env, seed, ablation, true)
}

/// Like [`run_trial`] but keeps no per-step rows.
pub fn run_trial_summary(
    ctrl: &mut dyn Controller,
    env: &Environment,
    seed: u64,
    ablation: Ablation,
) -> Result<TrialSummary> {
    simulate(ctrl, env, seed, ablation, false).map(|l| l.summary)
}

fn simulate(
    ctrl: &mut dyn Controller,
    env: &Environment,
    seed: u64,
    ablation: Ablation,
    record: bool,
) -> Result<TrialLog> {
    let layout = &env.layout;
    let body: &RobotBody = &env.body;
    let dt = body.control_dt;
    let radius = body.body_radius;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = TrialState::new(layout, start_pose(layout, &env.trial, &mut rng), seed);
    ctrl.reset();
    let mut obstacles: Vec<(Segment, Texture)> = layout.obstacles(&st.doors).collect();
    let mut rows = Vec::new();

    while st.step < env.trial.max_steps && !st.done {
        let frame = sense(&st.pose, radius, st.prev_velocity, st.velocity, dt, &obstacles, &env.sensors);
        let mut seen = frame;
        if ablation.is_sensor() {
            shuffle_frame(ablation, &mut seen, &mut rng);
        }
        if ablation.is_weight() {
            ctrl.ablate_weights(ablation, &mut rng);
        }
        let inputs = seen.flatten();
        let cmd = ctrl.act(&inputs, &st.pose);
        // the reflex reads the true proximity values, not the ablated copy
        let oa = obstacle_avoidance(&frame.proximity, &env.avoidance);
        let wheels = body.clamp_speeds([cmd[0] + oa[0], cmd[1] + oa[1]]);
        let moved = step_kinematics(st.pose, wheels, body, dt);
        let next = resolve_against(moved, radius, &obstacles)?;

        st.prev_velocity = st.velocity;
        st.velocity = (next.position() - st.pose.position()).scale(1.0 / dt);
        st.pose = next;
        st.step += 1;

        let mut events = Vec::new();
        let reopened = st.update_regions(layout, &mut events);
        let closed = st.update_doors(layout, &mut events);
        st.check_reward(layout, &mut events);
        if reopened || closed {
            obstacles.clear();
            obstacles.extend(layout.obstacles(&st.doors));
        }
        if record {
            rows.push(LogRow {
                step: st.step - 1,
                pose: st.pose,
                inputs: inputs.to_vec(),
                activities: ctrl.activities().to_vec(),
                motor: wheels,
                events,
            });
        }
    }
    Ok(TrialLog {
        rows,
        summary: st.summary(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(rewards: &[u8], returned: &[bool], repeats: u32) -> TrialSummary {
        TrialSummary {
            fitness: 0.0,
            elapsed_steps: 0,
            visits: returned
                .iter()
                .enumerate()
                .map(|(i, &r)| PathVisit {
                    path: (i % 4) as u8 + 1,
                    returned_home: r,
                    step: i,
                })
                .collect(),
            rewards_obtained: rewards.to_vec(),
            num_repeats: repeats,
        }
    }

    #[test]
    fn fitness_examples() {
        assert_eq!(compute_fitness(&summary(&[1, 2, 3, 4], &[true; 4], 0)), 5.0);
        assert_eq!(compute_fitness(&summary(&[], &[], 0)), 0.0);
        let f = compute_fitness(&summary(&[1, 2, 3], &[true, true, true, false], 1));
        assert!((f - 3.55).abs() < 1e-12);
    }

    #[test]
    fn event_tokens_round_trip() {
        for e in [
            Event::LapStart,
            Event::DoorClosed("T1-left".into()),
            Event::Reward(3),
            Event::Repeat(2),
            Event::Home,
            Event::DoorsOpened,
        ] {
            assert_eq!(e.to_string().parse::<Event>().unwrap(), e);
        }
        assert!("door:".parse::<Event>().is_err());
        assert!("x".parse::<Event>().is_err());
    }
}
