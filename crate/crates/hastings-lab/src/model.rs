//! State spaces, un-normalized targets and proposal kernels.
//!
//! Everything downstream is a pure function of a model. Densities are stored
//! and exchanged in log space (zero mass is a -inf log); acceptance ratios
//! are assembled as sums and differences of logs and exponentiated once.
//! Models are immutable after construction and shareable across threads;
//! sampling takes an explicit [`RngStream`] owned by the caller.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use std::fmt;

/// Tolerance on proposal row sums at construction.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Bounds shared by every state representation.
pub trait StateType: Copy + PartialEq + PartialOrd + fmt::Debug + Send + Sync + 'static {}
impl<T: Copy + PartialEq + PartialOrd + fmt::Debug + Send + Sync + 'static> StateType for T {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateSpace {
    Discrete { n: usize },
    Continuous1D,
}

/// An un-normalized target paired with a proposal kernel over one space.
pub trait ModelOps: Send + Sync + 'static {
    type State: StateType;

    fn space(&self) -> StateSpace;

    /// Log of the un-normalized target mass at `x` (-inf for zero mass).
    fn log_p(&self, x: Self::State) -> f64;

    /// Log proposal density of `to` given the chain stands at `from`.
    fn log_gamma(&self, to: Self::State, from: Self::State) -> f64;

    /// Draw one proposal from gamma(. | from).
    fn propose(&self, from: Self::State, rng: &mut RngStream) -> Self::State;
}

/// Finite state space with a materialized target vector and a row-stochastic
/// proposal matrix.
#[derive(Clone, Debug)]
pub struct DiscreteModel {
    n: usize,
    p: Vec<f64>,
    log_p: Vec<f64>,
    gamma: Vec<f64>,     // row-major: gamma[from * n + to]
    log_gamma: Vec<f64>, // same layout
    cum: Vec<f64>,       // cumulative rows for sampling
}

impl DiscreteModel {
    pub fn new(p: Vec<f64>, gamma: Vec<Vec<f64>>) -> Result<Self> {
        let n = p.len();
        if n < 2 {
            return Err(Error::Dimension(format!(
                "need at least 2 states, got {n}"
            )));
        }
        for (i, &v) in p.iter().enumerate() {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::NegativeEntry {
                    index: format!("p[{i}]"),
                    value: v,
                });
            }
        }
        if !p.iter().any(|&v| v > 0.0) {
            return Err(Error::EmptyTarget);
        }
        if gamma.len() != n {
            return Err(Error::Dimension(format!(
                "gamma has {} rows, expected {n}",
                gamma.len()
            )));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in gamma.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "gamma row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            let mut sum = 0.0;
            for (j, &g) in row.iter().enumerate() {
                if !(g >= 0.0) || !g.is_finite() {
                    return Err(Error::NegativeEntry {
                        index: format!("gamma[{i}][{j}]"),
                        value: g,
                    });
                }
                sum += g;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::RowSum { row: i, sum });
            }
            flat.extend_from_slice(row);
        }
        let log_p = p.iter().map(|&v| v.ln()).collect();
        let log_gamma = flat.iter().map(|&v| v.ln()).collect();
        let mut cum = Vec::with_capacity(n * n);
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += flat[i * n + j];
                cum.push(acc);
            }
        }
        Ok(DiscreteModel {
            n,
            p,
            log_p,
            gamma: flat,
            log_gamma,
            cum,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn gamma(&self, to: usize, from: usize) -> f64 {
        self.gamma[from * self.n + to]
    }

    pub fn normalized_target(&self) -> Vec<f64> {
        let total: f64 = self.p.iter().sum();
        self.p.iter().map(|&v| v / total).collect()
    }

    /// The common proposal row, when every row is the same (the proposal does
    /// not depend on the current state).
    pub fn independent_row(&self) -> Option<Vec<f64>> {
        let first = &self.gamma[..self.n];
        for i in 1..self.n {
            let row = &self.gamma[i * self.n..(i + 1) * self.n];
            if row
                .iter()
                .zip(first)
                .any(|(a, b)| (a - b).abs() > ROW_SUM_TOL)
            {
                return None;
            }
        }
        Some(first.to_vec())
    }
}

impl ModelOps for DiscreteModel {
    type State = usize;

    fn space(&self) -> StateSpace {
        StateSpace::Discrete { n: self.n }
    }

    fn log_p(&self, x: usize) -> f64 {
        self.log_p[x]
    }

    fn log_gamma(&self, to: usize, from: usize) -> f64 {
        self.log_gamma[from * self.n + to]
    }

    fn propose(&self, from: usize, rng: &mut RngStream) -> usize {
        rng.next_index(&self.cum[from * self.n..(from + 1) * self.n])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProposalKind {
    /// Symmetric kernel: y ~ Normal(x, sigma^2).
    RandomWalk,
    /// Asymmetric kernel: y ~ Normal(a * x, sigma^2) with a in (0, 1).
    Autoregressive { a: f64 },
}

/// Standard normal target on the whole real line, up to normalization:
/// log p(x) = -x^2 / 2.
#[derive(Clone, Debug)]
pub struct NormalModel {
    sigma: f64,
    kind: ProposalKind,
    log_norm: f64,
}

impl NormalModel {
    pub fn new(sigma: f64, kind: ProposalKind) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::NonPositiveSigma(sigma));
        }
        if let ProposalKind::Autoregressive { a } = kind {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::BadArCoefficient(a));
            }
        }
        Ok(NormalModel {
            sigma,
            kind,
            log_norm: sigma.ln() + 0.5 * std::f64::consts::TAU.ln(),
        })
    }

    fn proposal_mean(&self, from: f64) -> f64 {
        match self.kind {
            ProposalKind::RandomWalk => from,
            ProposalKind::Autoregressive { a } => a * from,
        }
    }
}

impl ModelOps for NormalModel {
    type State = f64;

    fn space(&self) -> StateSpace {
        StateSpace::Continuous1D
    }

    fn log_p(&self, x: f64) -> f64 {
        -0.5 * x * x
    }

    fn log_gamma(&self, to: f64, from: f64) -> f64 {
        let z = (to - self.proposal_mean(from)) / self.sigma;
        -0.5 * z * z - self.log_norm
    }

    fn propose(&self, from: f64, rng: &mut RngStream) -> f64 {
        self.proposal_mean(from) + self.sigma * rng.next_standard_normal()
    }
}

/// Random strictly-positive discrete model for sweeps: target entries in
/// [0.1, 2.1) and proposal rows from normalized weights in [0.05, 1.05).
pub fn random_discrete_model(n: usize, rng: &mut RngStream) -> DiscreteModel {
    let p: Vec<f64> = (0..n).map(|_| 0.1 + 2.0 * rng.next_f64()).collect();
    let mut gamma = Vec::with_capacity(n);
    for _ in 0..n {
        let w: Vec<f64> = (0..n).map(|_| 0.05 + rng.next_f64()).collect();
        let s: f64 = w.iter().sum();
        gamma.push(w.into_iter().map(|v| v / s).collect());
    }
    DiscreteModel::new(p, gamma).expect("construction from positive entries")
}
