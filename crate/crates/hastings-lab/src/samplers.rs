//! Seeded chain drivers and acceptance-rejection samplers.
//!
//! [`step_generic`] advances any rule with one proposal and one uniform.
//! [`step_l`] is the two-stage realization of the k-dial rule: the first
//! uniform tests k gamma(x|y) / p(x), the second (drawn only if the first
//! passes) tests p(y) / (k gamma(y|x)). Rejections are tagged by the stage
//! that produced them, so duplications of the current state split into a
//! type-x kind (impossible once k >= H everywhere) and a type-y kind
//! (impossible once k <= L everywhere).
//!
//! For independent proposals the module also provides the classical
//! acceptance-rejection sampler over a constant majorizer ([`ArSampler`]),
//! its Markovian form IMAR, and the minorizing pair IMIR / IMJ
//! ([`ImirSampler`]), where IMJ draws the accept decision before the
//! proposal.

use crate::acceptance::{AcceptanceRule, Role, SymmetricFn};
use crate::error::{Error, Result};
use crate::model::{DiscreteModel, ModelOps, StateType};
use crate::rng::RngStream;
use std::fmt;

/// How a rejected proposal duplicated the current state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Duplication {
    /// The proposal was accepted; nothing was duplicated.
    None,
    /// Stage-one rejection of the two-stage driver (the k gamma(x|y) / p(x)
    /// test failed).
    TypeX,
    /// Stage-two rejection (the p(y) / (k gamma(y|x)) test failed).
    TypeY,
    /// Single-stage rejection; the two kinds are indistinguishable.
    Unclassified,
}

impl fmt::Display for Duplication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Duplication::None => "none",
            Duplication::TypeX => "typex",
            Duplication::TypeY => "typey",
            Duplication::Unclassified => "n/a",
        })
    }
}

/// Result of one chain step.
#[derive(Clone, Copy, Debug)]
pub struct StepOutcome<S: StateType> {
    pub next: S,
    pub proposed: S,
    pub accepted: bool,
    pub duplication: Duplication,
}

/// One step of any single-stage rule: one proposal, one uniform.
pub fn step_generic<Mo: ModelOps>(
    model: &Mo,
    rule: &AcceptanceRule<Mo::State>,
    x: Mo::State,
    rng: &mut RngStream,
) -> Result<StepOutcome<Mo::State>> {
    let y = model.propose(x, rng);
    let alpha = rule.alpha(model, x, y)?;
    let u = rng.next_f64();
    if u <= alpha {
        Ok(StepOutcome {
            next: y,
            proposed: y,
            accepted: true,
            duplication: Duplication::None,
        })
    } else {
        Ok(StepOutcome {
            next: x,
            proposed: y,
            accepted: false,
            duplication: Duplication::Unclassified,
        })
    }
}

/// One step of the two-stage k-dial driver. The second uniform is drawn only
/// when the first test passes, so the per-step draw count is data dependent.
pub fn step_l<Mo: ModelOps>(
    model: &Mo,
    k: &SymmetricFn<Mo::State>,
    x: Mo::State,
    rng: &mut RngStream,
) -> Result<StepOutcome<Mo::State>> {
    if k.role() != Role::K {
        return Err(Error::RoleMismatch {
            rule: "L",
            found: k.role().tag(),
        });
    }
    let lpx = model.log_p(x);
    if lpx == f64::NEG_INFINITY {
        return Err(Error::ZeroMassState(format!("{x:?}")));
    }
    let y = model.propose(x, rng);
    let kv = k.eval(x, y);
    if !(kv > 0.0) {
        return Err(Error::InvalidParam(format!(
            "k({x:?}, {y:?}) = {kv} is not positive"
        )));
    }
    let lk = kv.ln();
    let stage1 = (lk + model.log_gamma(x, y) - lpx).min(0.0).exp();
    if rng.next_f64() > stage1 {
        return Ok(StepOutcome {
            next: x,
            proposed: y,
            accepted: false,
            duplication: Duplication::TypeX,
        });
    }
    let stage2 = (model.log_p(y) - lk - model.log_gamma(y, x)).min(0.0).exp();
    if rng.next_f64() > stage2 {
        return Ok(StepOutcome {
            next: x,
            proposed: y,
            accepted: false,
            duplication: Duplication::TypeY,
        });
    }
    Ok(StepOutcome {
        next: y,
        proposed: y,
        accepted: true,
        duplication: Duplication::None,
    })
}

/// What advances a chain: a single-stage rule or the two-stage k-dial driver.
#[derive(Clone, Debug)]
pub enum Driver<S: StateType> {
    Rule(AcceptanceRule<S>),
    TwoStage(SymmetricFn<S>),
}

impl<S: StateType> Driver<S> {
    pub fn name(&self) -> &'static str {
        match self {
            Driver::Rule(r) => r.name(),
            Driver::TwoStage(_) => "L",
        }
    }

    pub fn is_two_stage(&self) -> bool {
        matches!(self, Driver::TwoStage(_))
    }
}

/// A completed run: the start state, one outcome per step, and the stream key
/// that reproduces it.
#[derive(Clone, Debug)]
pub struct ChainRun<S: StateType> {
    pub start: S,
    pub outcomes: Vec<StepOutcome<S>>,
    pub rule_name: &'static str,
    pub two_stage: bool,
    pub seed_key: u64,
}

impl<S: StateType> ChainRun<S> {
    /// Visited states after each step (start excluded), length = steps.
    pub fn states(&self) -> Vec<S> {
        self.outcomes.iter().map(|o| o.next).collect()
    }

    pub fn accepted(&self) -> usize {
        self.outcomes.iter().filter(|o| o.accepted).count()
    }

    pub fn rejected(&self) -> usize {
        self.outcomes.len() - self.accepted()
    }

    pub fn duplications(&self, kind: Duplication) -> usize {
        self.outcomes.iter().filter(|o| o.duplication == kind).count()
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.accepted() as f64 / self.outcomes.len() as f64
    }
}

/// Run `steps` steps from `start`, which must carry positive target mass.
pub fn run_chain<Mo: ModelOps>(
    model: &Mo,
    driver: &Driver<Mo::State>,
    start: Mo::State,
    steps: usize,
    rng: &mut RngStream,
) -> Result<ChainRun<Mo::State>> {
    if steps == 0 {
        return Err(Error::EmptyChain);
    }
    if model.log_p(start) == f64::NEG_INFINITY {
        return Err(Error::ZeroMassState(format!("{start:?}")));
    }
    let seed_key = rng.key();
    let mut outcomes = Vec::with_capacity(steps);
    let mut x = start;
    for _ in 0..steps {
        let out = match driver {
            Driver::Rule(rule) => step_generic(model, rule, x, rng)?,
            Driver::TwoStage(k) => step_l(model, k, x, rng)?,
        };
        x = out.next;
        outcomes.push(out);
    }
    Ok(ChainRun {
        start,
        outcomes,
        rule_name: driver.name(),
        two_stage: driver.is_two_stage(),
        seed_key,
    })
}

/// Classical acceptance-rejection over an independent discrete proposal with
/// a constant majorizer: big_m * gamma(z) >= p(z) for every state z.
#[derive(Debug)]
pub struct ArSampler {
    p: Vec<f64>,
    row: Vec<f64>,
    cum: Vec<f64>,
    big_m: f64,
    deficient: bool,
}

impl ArSampler {
    pub fn new(model: &DiscreteModel, big_m: f64) -> Result<Self> {
        Self::build(model, big_m, false)
    }

    /// Skip the majorization check; the acceptance ratio is clamped to 1 and
    /// the output is only approximately the target.
    pub fn new_deficient(model: &DiscreteModel, big_m: f64) -> Result<Self> {
        Self::build(model, big_m, true)
    }

    fn build(model: &DiscreteModel, big_m: f64, deficient: bool) -> Result<Self> {
        if !(big_m > 0.0) {
            return Err(Error::InvalidParam(format!(
                "majorizing constant must be positive, got {big_m}"
            )));
        }
        let row = model.independent_row().ok_or(Error::ProposalNotIndependent)?;
        if !deficient {
            for (z, (&g, &p)) in row.iter().zip(model.p()).enumerate() {
                let bound = big_m * g;
                if bound < p * (1.0 - 1e-12) {
                    return Err(Error::MajorizationViolated {
                        index: z,
                        bound,
                        mass: p,
                    });
                }
            }
        }
        let mut cum = Vec::with_capacity(row.len());
        let mut acc = 0.0;
        for &g in &row {
            acc += g;
            cum.push(acc);
        }
        Ok(ArSampler {
            p: model.p().to_vec(),
            row,
            cum,
            big_m,
            deficient,
        })
    }

    fn accept_prob(&self, z: usize) -> f64 {
        let g = self.row[z];
        if g == 0.0 {
            // Unreachable proposal; the majorization check already forced
            // p(z) = 0 in the exact mode.
            return 0.0;
        }
        let a = self.p[z] / (self.big_m * g);
        if self.deficient {
            a.min(1.0)
        } else {
            a
        }
    }

    /// Draw one output; returns the accepted state and the number of trials
    /// it took. Each trial consumes exactly one proposal and one uniform.
    pub fn sample(&self, rng: &mut RngStream) -> (usize, u64) {
        let mut trials = 0;
        loop {
            trials += 1;
            let z = rng.next_index(&self.cum);
            if rng.next_f64() <= self.accept_prob(z) {
                return (z, trials);
            }
        }
    }

    /// One step of the Markovian form: the trial loop is unrolled into the
    /// chain, so a rejection duplicates the current state. Accepted steps of
    /// this chain reproduce [`ArSampler::sample`] outputs draw for draw on a
    /// shared stream.
    pub fn step_imar(&self, x: usize, rng: &mut RngStream) -> StepOutcome<usize> {
        let y = rng.next_index(&self.cum);
        if rng.next_f64() <= self.accept_prob(y) {
            StepOutcome {
                next: y,
                proposed: y,
                accepted: true,
                duplication: Duplication::None,
            }
        } else {
            StepOutcome {
                next: x,
                proposed: y,
                accepted: false,
                duplication: Duplication::Unclassified,
            }
        }
    }
}

/// Minorizing samplers over an independent discrete proposal with a constant
/// minorizer: small_m * gamma(z) <= p(z) for every state z.
#[derive(Debug)]
pub struct ImirSampler {
    p: Vec<f64>,
    row: Vec<f64>,
    cum: Vec<f64>,
    small_m: f64,
}

impl ImirSampler {
    pub fn new(model: &DiscreteModel, small_m: f64) -> Result<Self> {
        if !(small_m > 0.0) {
            return Err(Error::InvalidParam(format!(
                "minorizing constant must be positive, got {small_m}"
            )));
        }
        let row = model.independent_row().ok_or(Error::ProposalNotIndependent)?;
        for (z, (&g, &p)) in row.iter().zip(model.p()).enumerate() {
            let bound = small_m * g;
            if bound > p * (1.0 + 1e-12) {
                return Err(Error::MinorizationViolated {
                    index: z,
                    bound,
                    mass: p,
                });
            }
        }
        let mut cum = Vec::with_capacity(row.len());
        let mut acc = 0.0;
        for &g in &row {
            acc += g;
            cum.push(acc);
        }
        Ok(ImirSampler {
            p: model.p().to_vec(),
            row,
            cum,
            small_m,
        })
    }

    /// Probability of leaving the current state x; with an independent
    /// proposal the minorizing acceptance does not depend on the proposal.
    pub fn move_prob(&self, x: usize) -> f64 {
        self.small_m * self.row[x] / self.p[x]
    }

    /// IMIR step: proposal first, then the accept decision.
    pub fn step(&self, x: usize, rng: &mut RngStream) -> StepOutcome<usize> {
        let y = rng.next_index(&self.cum);
        if rng.next_f64() <= self.move_prob(x) {
            StepOutcome {
                next: y,
                proposed: y,
                accepted: true,
                duplication: Duplication::None,
            }
        } else {
            StepOutcome {
                next: x,
                proposed: y,
                accepted: false,
                duplication: Duplication::Unclassified,
            }
        }
    }

    /// IMJ step: decide first, draw the proposal only on acceptance. Same
    /// law as [`ImirSampler::step`], fewer proposal draws.
    pub fn step_imj(&self, x: usize, rng: &mut RngStream) -> StepOutcome<usize> {
        if rng.next_f64() <= self.move_prob(x) {
            let y = rng.next_index(&self.cum);
            StepOutcome {
                next: y,
                proposed: y,
                accepted: true,
                duplication: Duplication::None,
            }
        } else {
            StepOutcome {
                next: x,
                proposed: x,
                accepted: false,
                duplication: Duplication::Unclassified,
            }
        }
    }
}
