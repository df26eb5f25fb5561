//! Fully connected leaky recurrent controller, its genotype encoding, the
//! reflexive obstacle-avoidance mixer and the per-step shuffle ablations.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maze::{Controller, Pose};
use crate::sensors::{SensorFrame, LEFT_SENSORS, N_INPUTS, N_PROXIMITY, RIGHT_SENSORS};

pub const N_HIDDEN: usize = 50;
pub const N_OUTPUTS: usize = 2;
pub const XR_LEN: usize = N_INPUTS * N_HIDDEN;
pub const RR_LEN: usize = N_HIDDEN * N_HIDDEN;
pub const RY_LEN: usize = N_HIDDEN * N_OUTPUTS;
pub const GENE_COUNT: usize = XR_LEN + RR_LEN + RY_LEN;
pub const DEFAULT_LEAK: f64 = 0.01;

/// Flat weight vector laid out as `[W_xr | W_rr | W_ry]`, each block row-major
/// with the source neuron as the row.
#[derive(Debug, Clone, PartialEq)]
pub struct Genotype(Vec<f64>);

impl Genotype {
    pub fn new(genes: Vec<f64>) -> Result<Self> {
        if genes.len() != GENE_COUNT {
            return Err(Error::BadLength {
                expected: GENE_COUNT,
                found: genes.len(),
            });
        }
        if let Some(i) = genes.iter().position(|g| !g.is_finite()) {
            return Err(Error::Invalid(format!("gene {i} is not finite")));
        }
        Ok(Genotype(genes))
    }

    pub fn zeros() -> Self {
        Genotype(vec![0.0; GENE_COUNT])
    }

    pub fn genes(&self) -> &[f64] {
        &self.0
    }

    pub fn genes_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_genes(self) -> Vec<f64> {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    /// `w_xr[k * N_HIDDEN + i]`: input k to recurrent neuron i.
    pub w_xr: Vec<f64>,
    /// `w_rr[j * N_HIDDEN + i]`: neuron j to neuron i. The diagonal is stored but unused.
    pub w_rr: Vec<f64>,
    /// `w_ry[i * N_OUTPUTS + m]`: neuron i to motor m (0 left, 1 right).
    pub w_ry: Vec<f64>,
}

impl WeightSet {
    pub fn zeros() -> Self {
        WeightSet {
            w_xr: vec![0.0; XR_LEN],
            w_rr: vec![0.0; RR_LEN],
            w_ry: vec![0.0; RY_LEN],
        }
    }

    pub fn xr(&self, k: usize, i: usize) -> f64 {
        self.w_xr[k * N_HIDDEN + i]
    }

    pub fn rr(&self, j: usize, i: usize) -> f64 {
        self.w_rr[j * N_HIDDEN + i]
    }

    pub fn ry(&self, i: usize, m: usize) -> f64 {
        self.w_ry[i * N_OUTPUTS + m]
    }
}

pub fn decode_genotype(genes: &[f64]) -> Result<WeightSet> {
    if genes.len() != GENE_COUNT {
        return Err(Error::BadLength {
            expected: GENE_COUNT,
            found: genes.len(),
        });
    }
    Ok(WeightSet {
        w_xr: genes[..XR_LEN].to_vec(),
        w_rr: genes[XR_LEN..XR_LEN + RR_LEN].to_vec(),
        w_ry: genes[XR_LEN + RR_LEN..].to_vec(),
    })
}

pub fn encode_weights(w: &WeightSet) -> Genotype {
    let mut g = Vec::with_capacity(GENE_COUNT);
    g.extend_from_slice(&w.w_xr);
    g.extend_from_slice(&w.w_rr);
    g.extend_from_slice(&w.w_ry);
    Genotype(g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RnnState {
    pub r: [f64; N_HIDDEN],
}

impl Default for RnnState {
    fn default() -> Self {
        RnnState { r: [0.0; N_HIDDEN] }
    }
}

/// One recurrent update: `R_i <- (1 - p) tanh(syn_i) + p R_i`, with self
/// connections left out of `syn_i`.
pub fn rnn_step(state: &RnnState, inputs: &[f64], w: &WeightSet, leak: f64) -> RnnState {
    debug_assert_eq!(inputs.len(), N_INPUTS);
    let mut syn = [0.0; N_HIDDEN];
    for (k, &x) in inputs.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        let row = &w.w_xr[k * N_HIDDEN..(k + 1) * N_HIDDEN];
        for (s, &wk) in syn.iter_mut().zip(row) {
            *s += wk * x;
        }
    }
    for (j, &rj) in state.r.iter().enumerate() {
        if rj == 0.0 {
            continue;
        }
        let row = &w.w_rr[j * N_HIDDEN..(j + 1) * N_HIDDEN];
        for i in (0..j).chain(j + 1..N_HIDDEN) {
            syn[i] += row[i] * rj;
        }
    }
    let mut next = RnnState::default();
    for ((n, s), r) in next.r.iter_mut().zip(syn).zip(state.r) {
        *n = (1.0 - leak) * s.tanh() + leak * r;
    }
    next
}

/// Unclamped motor drive `Rᵀ W_ry`.
pub fn raw_motor(state: &RnnState, w: &WeightSet) -> [f64; N_OUTPUTS] {
    let mut out = [0.0; N_OUTPUTS];
    for (i, &ri) in state.r.iter().enumerate() {
        out[0] += ri * w.w_ry[i * N_OUTPUTS];
        out[1] += ri * w.w_ry[i * N_OUTPUTS + 1];
    }
    out
}

pub fn motor_output(state: &RnnState, w: &WeightSet, min: f64, max: f64) -> [f64; N_OUTPUTS] {
    raw_motor(state, w).map(|v| v.clamp(min, max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AvoidanceConfig {
    /// Reflex engages only when some proximity reading exceeds this.
    pub threshold: f64,
    pub gain: f64,
    /// Front pair readings above this add a backward escape push.
    pub front_saturation: f64,
    pub escape: f64,
}

impl Default for AvoidanceConfig {
    fn default() -> Self {
        Self {
            threshold: 0.8,
            gain: 1.0,
            front_saturation: 0.9,
            escape: 2.0,
        }
    }
}

/// Additive wheel command turning away from near contacts.
pub fn obstacle_avoidance(prox: &[f64; N_PROXIMITY], cfg: &AvoidanceConfig) -> [f64; 2] {
    let max = prox.iter().copied().fold(0.0, f64::max);
    if max <= cfg.threshold {
        return [0.0, 0.0];
    }
    let left: f64 = LEFT_SENSORS.iter().map(|&i| prox[i]).sum();
    let right: f64 = RIGHT_SENSORS.iter().map(|&i| prox[i]).sum();
    let d = cfg.gain * (left - right);
    let mut out = [d, -d];
    if prox[0] > cfg.front_saturation && prox[7] > cfg.front_saturation {
        out[0] -= cfg.escape;
        out[1] -= cfg.escape;
    }
    out
}

/// What a per-step shuffle ablation scrambles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Ablation {
    #[default]
    None,
    Proximity,
    Accelerometer,
    Vision,
    InputWeights,
    RecurrentWeights,
    OutputWeights,
}

impl Ablation {
    pub const ALL: [Ablation; 7] = [
        Ablation::None,
        Ablation::Proximity,
        Ablation::Accelerometer,
        Ablation::Vision,
        Ablation::InputWeights,
        Ablation::RecurrentWeights,
        Ablation::OutputWeights,
    ];

    pub fn is_sensor(self) -> bool {
        matches!(self, Ablation::Proximity | Ablation::Accelerometer | Ablation::Vision)
    }

    pub fn is_weight(self) -> bool {
        matches!(self, Ablation::InputWeights | Ablation::RecurrentWeights | Ablation::OutputWeights)
    }
}

impl fmt::Display for Ablation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ablation::None => "none",
            Ablation::Proximity => "proximity",
            Ablation::Accelerometer => "accelerometer",
            Ablation::Vision => "vision",
            Ablation::InputWeights => "input-weights",
            Ablation::RecurrentWeights => "recurrent-weights",
            Ablation::OutputWeights => "output-weights",
        })
    }
}

impl FromStr for Ablation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ablation::ALL
            .into_iter()
            .find(|a| a.to_string() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown ablation `{s}`")))
    }
}

/// Shuffle the sensor group named by `ablation` in place.
pub fn shuffle_frame<R: Rng + ?Sized>(ablation: Ablation, frame: &mut SensorFrame, rng: &mut R) {
    match ablation {
        Ablation::Proximity => frame.proximity.shuffle(rng),
        Ablation::Accelerometer => frame.accel.shuffle(rng),
        Ablation::Vision => frame.pixels.shuffle(rng),
        _ => {}
    }
}

/// Shuffle the weight matrix named by `ablation` in place.
pub fn shuffle_weights<R: Rng + ?Sized>(ablation: Ablation, w: &mut WeightSet, rng: &mut R) {
    match ablation {
        Ablation::InputWeights => w.w_xr.shuffle(rng),
        Ablation::RecurrentWeights => w.w_rr.shuffle(rng),
        Ablation::OutputWeights => w.w_ry.shuffle(rng),
        _ => {}
    }
}

/// Pure form of the per-step ablation: returns scrambled copies.
pub fn apply_ablation<R: Rng + ?Sized>(
    ablation: Ablation,
    frame: &SensorFrame,
    w: &WeightSet,
    rng: &mut R,
) -> (SensorFrame, WeightSet) {
    let mut f = *frame;
    let mut w = w.clone();
    shuffle_frame(ablation, &mut f, rng);
    shuffle_weights(ablation, &mut w, rng);
    (f, w)
}

/// The evolved controller. Weight ablations scramble a scratch copy that is
/// refreshed from the decoded weights every step.
#[derive(Debug, Clone)]
pub struct RnnController {
    base: WeightSet,
    scratch: Option<WeightSet>,
    state: RnnState,
    leak: f64,
}

impl RnnController {
    pub fn new(weights: WeightSet, leak: f64) -> Self {
        RnnController {
            base: weights,
            scratch: None,
            state: RnnState::default(),
            leak,
        }
    }

    pub fn from_genotype(g: &Genotype, leak: f64) -> Result<Self> {
        Ok(Self::new(decode_genotype(g.genes())?, leak))
    }

    pub fn weights(&self) -> &WeightSet {
        &self.base
    }

    pub fn state(&self) -> &RnnState {
        &self.state
    }
}

impl Controller for RnnController {
    fn reset(&mut self) {
        self.state = RnnState::default();
        self.scratch = None;
    }

    fn act(&mut self, inputs: &[f64; N_INPUTS], _pose: &Pose) -> [f64; 2] {
        let w = self.scratch.as_ref().unwrap_or(&self.base);
        self.state = rnn_step(&self.state, inputs, w, self.leak);
        raw_motor(&self.state, w)
    }

    fn activities(&self) -> &[f64] {
        &self.state.r
    }

    fn ablate_weights(&mut self, ablation: Ablation, rng: &mut dyn rand::RngCore) {
        let scratch = self.scratch.get_or_insert_with(|| self.base.clone());
        match ablation {
            Ablation::InputWeights => scratch.w_xr.copy_from_slice(&self.base.w_xr),
            Ablation::RecurrentWeights => scratch.w_rr.copy_from_slice(&self.base.w_rr),
            Ablation::OutputWeights => scratch.w_ry.copy_from_slice(&self.base.w_ry),
            _ => return,
        }
        shuffle_weights(ablation, scratch, rng);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gene_count_matches_architecture() {
        assert_eq!(GENE_COUNT, 7150);
        assert_eq!(91 * 50 + 50 * 50 + 50 * 2, GENE_COUNT);
    }

    #[test]
    fn iota_slices() {
        let g: Vec<f64> = (0..GENE_COUNT).map(|i| i as f64).collect();
        let w = decode_genotype(&g).unwrap();
        assert_eq!(w.xr(0, 0), 0.0);
        assert_eq!(w.rr(0, 0), 4550.0);
        assert_eq!(w.ry(0, 0), 7050.0);
        assert_eq!(w.xr(1, 0), 50.0);
        assert_eq!(encode_weights(&w).genes(), &g[..]);
    }

    #[test]
    fn bad_length_rejected() {
        assert!(matches!(
            decode_genotype(&[0.0; 7100]),
            Err(Error::BadLength { expected: 7150, found: 7100 })
        ));
        assert!(Genotype::new(vec![0.0; 7151]).is_err());
    }

    #[test]
    fn leak_only_dynamics() {
        let s = RnnState { r: [1.0; N_HIDDEN] };
        let n = rnn_step(&s, &[0.0; N_INPUTS], &WeightSet::zeros(), DEFAULT_LEAK);
        assert!(n.r.iter().all(|&v| v == 0.01));
    }

    #[test]
    fn single_input_scalar() {
        let mut w = WeightSet::zeros();
        w.w_xr[3 * N_HIDDEN + 7] = 1.0;
        let mut x = [0.0; N_INPUTS];
        x[3] = 1.0;
        let n = rnn_step(&RnnState::default(), &x, &w, DEFAULT_LEAK);
        assert!((n.r[7] - 0.99 * 1f64.tanh()).abs() < 1e-15);
        assert!((n.r[7] - 0.753978).abs() < 1e-6);
    }

    #[test]
    fn motor_clamp() {
        let mut w = WeightSet::zeros();
        w.w_ry[0] = 10.0;
        w.w_ry[1] = -10.0;
        let mut s = RnnState::default();
        s.r[0] = 1.0;
        assert_eq!(motor_output(&s, &w, -3.14, 6.28), [6.28, -3.14]);
        assert_eq!(motor_output(&RnnState::default(), &w, -3.14, 6.28), [0.0, 0.0]);
    }

    #[test]
    fn avoidance_turns_away_from_left_contact() {
        let cfg = AvoidanceConfig::default();
        assert_eq!(obstacle_avoidance(&[0.0; 8], &cfg), [0.0, 0.0]);
        let mut p = [0.0; 8];
        p[5] = 0.95;
        let [l, r] = obstacle_avoidance(&p, &cfg);
        assert!(l > 0.0 && r < 0.0);
    }

    #[test]
    fn ablation_names_round_trip() {
        for a in Ablation::ALL {
            assert_eq!(a.to_string().parse::<Ablation>().unwrap(), a);
        }
    }
}
