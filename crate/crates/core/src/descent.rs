//! The subgradient loop: perturb into the local regime, pick a direction
//! from the feasibility cone, step, repeat.

use std::time::Instant;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cone::{build_cone, descent_direction, Certificate, ConeStatus, Objective};
use crate::error::{Error, Result};
use crate::geom::{Polytope, Zonotope};
use crate::hausdorff::{all_pairs, coarse_hausdorff_distance, hausdorff_distance, locality_from_pairs, select_active};
use crate::subgrad::{coarse_subdifferential, subdifferential_from_pairs};
use crate::tol::Settings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepRule {
    Conservative,
    Random,
    Aggressive,
    /// Aggressive for the first `switch_at` iterations (default a third of
    /// the step budget), conservative afterwards.
    Hybrid {
        switch_at: Option<usize>,
    },
}

impl StepRule {
    fn effective(self, iter: usize, max_steps: usize) -> StepRule {
        match self {
            StepRule::Hybrid { switch_at } => {
                if iter < switch_at.unwrap_or(max_steps / 3) {
                    StepRule::Aggressive
                } else {
                    StepRule::Conservative
                }
            }
            r => r,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            StepRule::Conservative => "conservative",
            StepRule::Random => "random",
            StepRule::Aggressive => "aggressive",
            StepRule::Hybrid { .. } => "hybrid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DescentConfig {
    pub rank: usize,
    pub max_steps: usize,
    pub threshold: f64,
    pub rule: StepRule,
    pub seed: u64,
    /// Perturbation half-width relative to the longest generator.
    pub perturb_scale: f64,
    pub max_perturb_tries: usize,
    pub objective: Objective,
    pub cone_fallback: bool,
    /// Halve conservative steps until the objective decreases.
    pub conservative_backtracking: bool,
    pub settings: Settings,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            rank: 4,
            max_steps: 500,
            threshold: 1e-9,
            rule: StepRule::Conservative,
            seed: 0,
            perturb_scale: 1e-6,
            max_perturb_tries: 50,
            objective: Objective::Exact,
            cone_fallback: false,
            conservative_backtracking: true,
            settings: Settings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub d_exact: f64,
    pub d_coarse: f64,
    pub step: f64,
    pub rule: String,
    pub active_pairs: usize,
    pub cone_status: String,
    pub ms: f64,
    /// Objective after the step, when one was taken.
    #[serde(skip)]
    pub d_after_step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Threshold,
    MaxSteps,
    CertifiedOrFeasibleEmpty,
    /// No positive step along the direction lowered the objective.
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescentTrace {
    pub records: Vec<TraceRecord>,
    pub termination: Termination,
    pub certificate: Option<Certificate>,
}

/// Step length from the per-pair limits.
pub fn choose_step(rule: StepRule, taus: &[f64], rng: &mut impl Rng) -> Result<f64> {
    if taus.is_empty() {
        return Err(Error::EmptyTaus);
    }
    let min = taus.iter().copied().fold(f64::INFINITY, f64::min);
    let max = taus.iter().copied().fold(0.0, f64::max);
    Ok(match rule {
        StepRule::Conservative => 0.5 * min,
        StepRule::Aggressive | StepRule::Hybrid { .. } => 0.5 * max,
        StepRule::Random => 0.5 * taus[rng.gen_range(0..taus.len())],
    })
}

fn perturb(z: &Zonotope, sigma: f64, rng: &mut ChaCha8Rng) -> Result<Zonotope> {
    let p = z.to_params();
    let noise = DVector::from_fn(p.len(), |_, _| rng.gen_range(-sigma..=sigma));
    Zonotope::from_params(z.rank(), z.dim(), &(p + noise))
}

fn is_local(poly: &Polytope, z: &Zonotope, objective: Objective, s: &Settings) -> Result<bool> {
    match objective {
        Objective::Exact => {
            let pairs = all_pairs(poly, z, s)?;
            Ok(locality_from_pairs(poly, z, &pairs, s).holds())
        }
        Objective::Coarse => Ok(z.is_general_position(s.tol.general_position)),
    }
}

/// Add cumulative uniform noise of half-width `sigma_rel · max‖g_i‖` until the
/// locality conditions hold. An already local zonotope is returned as is.
pub fn perturb_until_local(
    poly: &Polytope,
    z: &Zonotope,
    sigma_rel: f64,
    rng: &mut ChaCha8Rng,
    max_tries: usize,
    objective: Objective,
    s: &Settings,
) -> Result<Zonotope> {
    if is_local(poly, z, objective, s)? {
        return Ok(z.clone());
    }
    let sigma = sigma_rel * z.max_generator_norm().max(1e-12);
    let mut cur = z.clone();
    for _ in 0..max_tries {
        cur = perturb(&cur, sigma, rng)?;
        if is_local(poly, &cur, objective, s)? {
            return Ok(cur);
        }
    }
    Err(Error::PerturbationBudgetExceeded(max_tries))
}

fn objective_value(poly: &Polytope, z: &Zonotope, objective: Objective, s: &Settings) -> Result<f64> {
    Ok(match objective {
        Objective::Exact => hausdorff_distance(poly, z, s)?.value,
        Objective::Coarse => coarse_hausdorff_distance(poly, z, s)?.value,
    })
}

enum Outcome {
    Continue(Zonotope),
    Stop(Termination, Option<Certificate>),
}

struct Loop<'a> {
    poly: &'a Polytope,
    cfg: &'a DescentConfig,
    rng: ChaCha8Rng,
    records: Vec<TraceRecord>,
}

impl Loop<'_> {
    fn iteration(&mut self, iter: usize, z: &Zonotope, started: Instant) -> Result<Outcome> {
        let (poly, cfg, s) = (self.poly, self.cfg, &self.cfg.settings);
        let ms = || started.elapsed().as_secs_f64() * 1e3;
        let d0 = objective_value(poly, z, cfg.objective, s)?;
        let record =
            |z: &Zonotope, rec: &mut Vec<TraceRecord>, step, rule: &str, active, status: &str, after| -> Result<()> {
                rec.push(TraceRecord {
                    iter,
                    d_exact: hausdorff_distance(poly, z, s)?.value,
                    d_coarse: coarse_hausdorff_distance(poly, z, s)?.value,
                    step,
                    rule: rule.to_string(),
                    active_pairs: active,
                    cone_status: status.to_string(),
                    ms: ms(),
                    d_after_step: after,
                });
                Ok(())
            };
        if d0 <= cfg.threshold {
            record(z, &mut self.records, 0.0, "", 0, "threshold", None)?;
            return Ok(Outcome::Stop(Termination::Threshold, None));
        }
        if iter >= cfg.max_steps {
            record(z, &mut self.records, 0.0, "", 0, "max_steps", None)?;
            return Ok(Outcome::Stop(Termination::MaxSteps, None));
        }
        let z =
            perturb_until_local(poly, z, cfg.perturb_scale, &mut self.rng, cfg.max_perturb_tries, cfg.objective, s)?;
        let d = objective_value(poly, &z, cfg.objective, s)?;

        let (pairs, subdiff) = match cfg.objective {
            Objective::Exact => {
                let pairs = select_active(all_pairs(poly, &z, s)?, s.tol.active).pairs;
                let sd = subdifferential_from_pairs(&pairs, &z)?;
                (pairs, sd)
            }
            Objective::Coarse => {
                let pairs = coarse_hausdorff_distance(poly, &z, s)?.pairs;
                let sd = coarse_subdifferential(&pairs)?;
                (pairs, sd)
            }
        };
        let cone = build_cone(&pairs);
        let dim = z.rank() * z.dim() + z.dim();
        let dir = descent_direction(&cone, &subdiff, cfg.objective, dim, cfg.cone_fallback, s)?;
        let rule = cfg.rule.effective(iter, cfg.max_steps);
        let ConeStatus::Descent { direction, taus } = &dir.status else {
            record(&z, &mut self.records, 0.0, rule.label(), pairs.len(), dir.status.label(), None)?;
            return Ok(Outcome::Stop(Termination::CertifiedOrFeasibleEmpty, Some(dir.certificate)));
        };
        let mut h = choose_step(rule, taus, &mut self.rng)?;
        let mut next = z.step(direction, h)?;
        let mut d_next = objective_value(poly, &next, cfg.objective, s)?;
        if rule == StepRule::Conservative && cfg.conservative_backtracking {
            let mut halvings = 0;
            while !(d_next < d) && halvings < 60 {
                h *= 0.5;
                halvings += 1;
                next = z.step(direction, h)?;
                d_next = objective_value(poly, &next, cfg.objective, s)?;
            }
            if !(d_next < d) {
                record(&z, &mut self.records, 0.0, rule.label(), pairs.len(), "stalled", None)?;
                return Ok(Outcome::Stop(Termination::Stalled, Some(Certificate::Heuristic)));
            }
        }
        record(&z, &mut self.records, h, rule.label(), pairs.len(), dir.status.label(), Some(d_next))?;
        Ok(Outcome::Continue(next.canonicalize()))
    }
}

/// Run the descent from `z0`. Deterministic in `cfg.seed`.
pub fn optimize(poly: &Polytope, z0: &Zonotope, cfg: &DescentConfig) -> Result<(Zonotope, DescentTrace)> {
    if z0.rank() != cfg.rank {
        return Err(Error::DimensionMismatch { expected: cfg.rank, found: z0.rank() });
    }
    if z0.dim() != poly.dim() {
        return Err(Error::DimensionMismatch { expected: poly.dim(), found: z0.dim() });
    }
    if cfg.max_steps == 0 || !(cfg.threshold >= 0.0) || !(cfg.perturb_scale > 0.0) {
        return Err(Error::InvalidInput("need max_steps ≥ 1, threshold ≥ 0, perturb_scale > 0".into()));
    }
    let mut lp = Loop { poly, cfg, rng: ChaCha8Rng::seed_from_u64(cfg.seed), records: Vec::new() };
    let mut z = z0.canonicalize();
    let mut iter = 0;
    loop {
        let started = Instant::now();
        let outcome = match lp.iteration(iter, &z, started) {
            Ok(o) => o,
            Err(e @ Error::PerturbationBudgetExceeded(_)) => return Err(e),
            Err(first) => {
                let sigma = cfg.perturb_scale * z.max_generator_norm().max(1e-12);
                let retry = perturb(&z, sigma, &mut lp.rng)?;
                match lp.iteration(iter, &retry, started) {
                    Ok(o) => o,
                    Err(e @ Error::PerturbationBudgetExceeded(_)) => return Err(e),
                    Err(second) => {
                        return Err(Error::DescentAborted {
                            iter,
                            reason: format!("{first}; after perturbation: {second}"),
                        })
                    }
                }
            }
        };
        match outcome {
            Outcome::Continue(next) => z = next,
            Outcome::Stop(termination, certificate) => {
                return Ok((z, DescentTrace { records: lp.records, termination, certificate }));
            }
        }
        iter += 1;
    }
}
