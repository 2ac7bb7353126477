//! Model predictive path integral control.
//!
//! Each control step samples `K` perturbations of the nominal thrust
//! sequence, rolls every one out through the vessel model, scores it with
//! the docking cost and blends the samples with softmax weights
//! `exp(−(S_k − S_min)/λ)`. Sample `k` at control step `i` draws from RNG
//! substream `(seed, i, k)`, and the weighted sum is an ordered fold, so the
//! result is the same for any number of workers.

use rand_distr::{Distribution, StandardNormal};

use crate::cost::{CostBreakdown, CostContext};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::rng::{substream, Purpose};
use crate::vessel::{step, ThrustCommand, VesselParams, VesselState};

/// Finite stand-in for the cost of a rollout that left the finite reals.
pub const COST_SURROGATE: f64 = f64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct MppiConfig {
    /// Number of sampled sequences `K`.
    pub samples: usize,
    /// Horizon length `T` in steps.
    pub horizon: usize,
    /// Temperature `λ`.
    pub lambda: f64,
    /// Diagonal of the sampling covariance `Σ` [N²].
    pub sigma: [f64; 4],
    /// Scalar multiplier on `Σ` when sampling.
    pub exploration_scale: f64,
    /// Control period and integration step [s].
    pub dt: f64,
    pub seed: u64,
}

impl Default for MppiConfig {
    fn default() -> Self {
        Self {
            samples: 512,
            horizon: 40,
            lambda: 0.5,
            sigma: [4.0; 4],
            exploration_scale: 1.0,
            dt: 0.05,
            seed: 0,
        }
    }
}

impl MppiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 || self.horizon == 0 {
            return Err(Error::config("mppi samples and horizon must be at least 1"));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::config("mppi lambda must be positive"));
        }
        if self.sigma.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::config("mppi sigma entries must be positive"));
        }
        if !(self.exploration_scale >= 0.0) {
            return Err(Error::config("exploration_scale must be non-negative"));
        }
        if !(self.dt > 0.0) {
            return Err(Error::config("mppi dt must be positive"));
        }
        Ok(())
    }

    fn noise_std(&self) -> [f64; 4] {
        self.sigma.map(|s| (self.exploration_scale * s).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ControlSequence(pub Vec<ThrustCommand>);

impl ControlSequence {
    pub fn zeros(horizon: usize) -> Self {
        ControlSequence(vec![ThrustCommand::ZERO; horizon])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Drops the first entry and repeats the last.
    pub fn shifted(&self) -> Self {
        let mut v = self.0.clone();
        if let Some(&last) = v.last() {
            v.remove(0);
            v.push(last);
        }
        ControlSequence(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RolloutResult {
    pub trajectory: Vec<VesselState>,
    pub cost: f64,
    /// Per-term sums over the stage and terminal costs.
    pub breakdown: CostBreakdown,
}

/// Sample `k` of control step `step_index`: nominal plus Gaussian noise,
/// clamped to the thrust bounds.
pub fn sample_sequence(
    nominal: &ControlSequence,
    config: &MppiConfig,
    t_max: f64,
    step_index: u64,
    k: usize,
) -> ControlSequence {
    let std = config.noise_std();
    let mut rng = substream(config.seed, Purpose::Sampling, step_index, k as u64);
    ControlSequence(
        nominal
            .0
            .iter()
            .map(|u| {
                let mut t = u.0;
                for (c, s) in t.iter_mut().zip(std) {
                    let n: f64 = StandardNormal.sample(&mut rng);
                    *c += s * n;
                }
                ThrustCommand(t).clamped(t_max)
            })
            .collect(),
    )
}

pub fn sample_perturbations(
    nominal: &ControlSequence,
    config: &MppiConfig,
    t_max: f64,
    step_index: u64,
) -> Vec<ControlSequence> {
    (0..config.samples)
        .map(|k| sample_sequence(nominal, config, t_max, step_index, k))
        .collect()
}

fn rollout_inner(
    x0: &VesselState,
    seq: &ControlSequence,
    ctx: &CostContext<'_>,
    params: &VesselParams,
    dt: f64,
    mut record: Option<&mut Vec<VesselState>>,
) -> (f64, CostBreakdown) {
    let mut x = *x0;
    let mut cost = 0.0;
    let mut sum = CostBreakdown::default();
    if let Some(r) = record.as_deref_mut() {
        r.push(x);
    }
    for u in &seq.0 {
        let c = ctx.stage(&x);
        cost += c.total();
        sum += c;
        x = match step(&x, u, dt, params) {
            Ok(next) => next,
            Err(_) => return (COST_SURROGATE, sum),
        };
        if let Some(r) = record.as_deref_mut() {
            r.push(x);
        }
    }
    let terminal = ctx.terminal(&x);
    cost += terminal.total();
    sum += terminal;
    if !cost.is_finite() {
        cost = COST_SURROGATE;
    }
    (cost, sum)
}

/// `S = Σ_{t<T} c(x_t) + c_T(x_T)` along the trajectory driven by `seq`.
pub fn rollout(
    x0: &VesselState,
    seq: &ControlSequence,
    ctx: &CostContext<'_>,
    params: &VesselParams,
    dt: f64,
) -> RolloutResult {
    let mut trajectory = Vec::with_capacity(seq.len() + 1);
    let (cost, breakdown) = rollout_inner(x0, seq, ctx, params, dt, Some(&mut trajectory));
    RolloutResult {
        trajectory,
        cost,
        breakdown,
    }
}

/// Softmax importance weights, shifted by the minimum cost for stability.
pub fn compute_weights(costs: &[f64], lambda: f64) -> Vec<f64> {
    let s_min = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = costs
        .iter()
        .map(|s| {
            let d = s - s_min;
            if d == 0.0 {
                1.0
            } else {
                (-d / lambda).exp()
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub s_min: f64,
    /// Effective sample size `1/Σ w²`.
    pub ess: f64,
    pub best_index: usize,
    /// Every rollout hit the cost surrogate.
    pub starved: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutput {
    /// First entry of the optimal sequence, to be applied now.
    pub command: ThrustCommand,
    pub sequence: ControlSequence,
    /// Warm start for the next control step.
    pub next_nominal: ControlSequence,
    pub diagnostics: Diagnostics,
}

/// One MPPI update for an arbitrary sequence cost. `evaluate` must be a pure
/// function of the sequence.
pub fn optimize<F>(
    nominal: &ControlSequence,
    config: &MppiConfig,
    t_max: f64,
    step_index: u64,
    exec: Execution,
    evaluate: F,
) -> SolveOutput
where
    F: Fn(&ControlSequence) -> f64 + Sync + Send,
{
    let scored: Vec<(ControlSequence, f64)> = exec.map(config.samples, |k| {
        let seq = sample_sequence(nominal, config, t_max, step_index, k);
        let cost = evaluate(&seq);
        (seq, cost)
    });
    let costs: Vec<f64> = scored.iter().map(|(_, c)| *c).collect();

    let (best_index, s_min) =
        costs.iter().copied().enumerate().fold(
            (0, f64::INFINITY),
            |best, (k, c)| if c < best.1 { (k, c) } else { best },
        );

    if costs.iter().all(|&c| c >= COST_SURROGATE) {
        let zeros = ControlSequence::zeros(nominal.len());
        return SolveOutput {
            command: ThrustCommand::ZERO,
            sequence: zeros.clone(),
            next_nominal: zeros,
            diagnostics: Diagnostics {
                s_min,
                ess: 0.0,
                best_index,
                starved: true,
            },
        };
    }

    let weights = compute_weights(&costs, config.lambda);
    let mut avg = vec![[0.0f64; 4]; nominal.len()];
    for ((seq, _), w) in scored.iter().zip(&weights) {
        if *w == 0.0 {
            continue;
        }
        for (acc, u) in avg.iter_mut().zip(&seq.0) {
            for (a, x) in acc.iter_mut().zip(u.0) {
                *a += w * x;
            }
        }
    }
    let sequence = ControlSequence(avg.into_iter().map(|t| ThrustCommand(t).clamped(t_max)).collect());
    let ess = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
    SolveOutput {
        command: sequence.0.first().copied().unwrap_or(ThrustCommand::ZERO),
        next_nominal: sequence.shifted(),
        sequence,
        diagnostics: Diagnostics {
            s_min,
            ess,
            best_index,
            starved: false,
        },
    }
}

/// MPPI update for the docking problem from the measured state `x0`.
pub fn solve(
    x0: &VesselState,
    nominal: &ControlSequence,
    ctx: &CostContext<'_>,
    config: &MppiConfig,
    params: &VesselParams,
    step_index: u64,
    exec: Execution,
) -> SolveOutput {
    optimize(nominal, config, params.t_max, step_index, exec, |seq| {
        rollout_inner(x0, seq, ctx, params, config.dt, None).0
    })
}

/// Receding-horizon controller state: configuration, warm-start sequence and
/// control step counter.
#[derive(Debug, Clone)]
pub struct MppiController {
    pub config: MppiConfig,
    pub nominal: ControlSequence,
    pub step_index: u64,
    pub exec: Execution,
}

impl MppiController {
    pub fn new(config: MppiConfig) -> Result<Self> {
        config.validate()?;
        let nominal = ControlSequence::zeros(config.horizon);
        Ok(Self {
            config,
            nominal,
            step_index: 0,
            exec: Execution::default(),
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    /// Solves from `x0`, advances the warm start and the step counter.
    pub fn control(&mut self, x0: &VesselState, ctx: &CostContext<'_>, params: &VesselParams) -> SolveOutput {
        let out = solve(x0, &self.nominal, ctx, &self.config, params, self.step_index, self.exec);
        self.nominal = out.next_nominal.clone();
        self.step_index += 1;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostWeights;

    #[test]
    fn equal_costs_equal_weights() {
        assert_eq!(compute_weights(&[1.0, 1.0], 1.0), vec![0.5, 0.5]);
    }

    #[test]
    fn softmax_closed_form() {
        let w = compute_weights(&[0.0, 3f64.ln()], 1.0);
        assert!((w[0] - 0.75).abs() < 1e-12);
        assert!((w[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn surrogate_costs_get_zero_weight() {
        let w = compute_weights(&[COST_SURROGATE, 2.0, COST_SURROGATE], 0.5);
        assert_eq!(w, vec![0.0, 1.0, 0.0]);
        let w = compute_weights(&[COST_SURROGATE; 4], 0.5);
        assert_eq!(w, vec![0.25; 4]);
    }

    #[test]
    fn zero_exploration_reproduces_nominal() {
        let nominal = ControlSequence(vec![ThrustCommand([1.0, -2.0, 3.0, 0.5]); 5]);
        let cfg = MppiConfig {
            samples: 8,
            exploration_scale: 0.0,
            ..Default::default()
        };
        for s in sample_perturbations(&nominal, &cfg, 20.0, 0) {
            assert_eq!(s, nominal);
        }
    }

    #[test]
    fn samples_respect_bounds_and_seed() {
        let nominal = ControlSequence(vec![ThrustCommand([19.0, -19.0, 0.0, 0.0]); 10]);
        let cfg = MppiConfig {
            samples: 64,
            sigma: [25.0; 4],
            ..Default::default()
        };
        let a = sample_perturbations(&nominal, &cfg, 20.0, 3);
        assert!(a.iter().all(|s| s.0.iter().all(|u| u.within(20.0))));
        assert_eq!(a, sample_perturbations(&nominal, &cfg, 20.0, 3));
        assert_ne!(a, sample_perturbations(&nominal, &cfg, 20.0, 4));
    }

    #[test]
    fn shift_repeats_last() {
        let a = ThrustCommand([1.0, 0.0, 0.0, 0.0]);
        let b = ThrustCommand([2.0, 0.0, 0.0, 0.0]);
        assert_eq!(ControlSequence(vec![a, b]).shifted(), ControlSequence(vec![b, b]));
    }

    #[test]
    fn single_step_rollout_from_rest() {
        let w = CostWeights::default();
        let p = VesselParams::default();
        let x0 = VesselState::at_rest(1.0, 2.0, 0.0);
        let ctx = CostContext::new(&w, &p, None, &x0);
        let r = rollout(&x0, &ControlSequence::zeros(1), &ctx, &p, 0.05);
        assert_eq!(r.trajectory, vec![x0, x0]);
        assert_eq!(r.cost, ctx.stage(&x0).total() + ctx.terminal(&x0).total());
        assert_eq!(r, rollout(&x0, &ControlSequence::zeros(1), &ctx, &p, 0.05));
    }

    #[test]
    fn single_sample_is_returned_verbatim() {
        let nominal = ControlSequence(vec![ThrustCommand([1.0, 2.0, 3.0, 4.0]); 6]);
        let cfg = MppiConfig {
            samples: 1,
            ..Default::default()
        };
        let out = optimize(&nominal, &cfg, 20.0, 0, Execution::Sequential, |s| s.0[0].0[0]);
        assert_eq!(out.sequence, sample_sequence(&nominal, &cfg, 20.0, 0, 0));
        assert_eq!(out.command, out.sequence.0[0]);
        assert_eq!(out.diagnostics.ess, 1.0);
    }

    #[test]
    fn identical_samples_average_to_themselves() {
        let nominal = ControlSequence(vec![ThrustCommand([1.0, 2.0, 3.0, 4.0]); 6]);
        let cfg = MppiConfig {
            samples: 16,
            exploration_scale: 0.0,
            ..Default::default()
        };
        let out = optimize(&nominal, &cfg, 20.0, 0, Execution::Sequential, |s| s.0[0].0[0]);
        for (u, n) in out.sequence.0.iter().zip(&nominal.0) {
            for c in 0..4 {
                assert!((u.0[c] - n.0[c]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn starved_solver_returns_zero_thrust() {
        let nominal = ControlSequence(vec![ThrustCommand([5.0; 4]); 4]);
        let cfg = MppiConfig {
            samples: 8,
            ..Default::default()
        };
        let out = optimize(&nominal, &cfg, 20.0, 0, Execution::Sequential, |_| COST_SURROGATE);
        assert!(out.diagnostics.starved);
        assert_eq!(out.command, ThrustCommand::ZERO);
    }

    #[test]
    fn config_validation() {
        assert!(MppiConfig::default().validate().is_ok());
        for bad in [
            MppiConfig {
                samples: 0,
                ..Default::default()
            },
            MppiConfig {
                horizon: 0,
                ..Default::default()
            },
            MppiConfig {
                lambda: 0.0,
                ..Default::default()
            },
            MppiConfig {
                sigma: [1.0, 0.0, 1.0, 1.0],
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
