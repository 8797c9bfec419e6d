//! Brute-force verification on tabulated discrete kernels.
//!
//! For a finite model the full transition matrix of any rule fits in memory:
//! P(y|x) = alpha(x,y) gamma(y|x) off the diagonal, with the rejected mass
//! folded back into P(x|x). That makes the core claims checkable exactly:
//! detailed balance entry by entry, the stationary distribution by power
//! iteration, and the pointwise maximality of Metropolis-Hastings by direct
//! comparison.

use crate::acceptance::{alpha_mh, AcceptanceRule};
use crate::error::{Error, Result};
use crate::exec;
use crate::mappings;
use crate::model::{DiscreteModel, ModelOps};
use std::sync::Arc;

/// States above this are too big to tabulate.
pub const MAX_TABULATED: usize = 4096;

/// Tolerance on stationary-distribution agreement with the normalized target.
pub const STATIONARY_TOL: f64 = 1e-10;

const POWER_RESIDUAL: f64 = 1e-13;
const POWER_MAX_ITER: usize = 1_000_000;

/// A row-stochastic transition matrix, row-major.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    n: usize,
    rows: Vec<f64>,
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// P(to | from).
    pub fn entry(&self, to: usize, from: usize) -> f64 {
        self.rows[from * self.n + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.rows[from * self.n..(from + 1) * self.n]
    }

    pub fn max_row_sum_error(&self) -> f64 {
        (0..self.n)
            .map(|i| (self.row(i).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Tabulate the full kernel of a rule. Rows at zero-mass states (which a
/// correctly started chain never visits) are set to self loops.
pub fn build_kernel(
    model: &DiscreteModel,
    rule: &AcceptanceRule<usize>,
) -> Result<TransitionMatrix> {
    let n = model.n();
    if n > MAX_TABULATED {
        return Err(Error::TooLarge(n));
    }
    let mut rows = vec![0.0; n * n];
    for x in 0..n {
        if model.log_p(x) == f64::NEG_INFINITY {
            rows[x * n + x] = 1.0;
            continue;
        }
        let mut stay = 0.0;
        for y in 0..n {
            let g = model.gamma(y, x);
            if g == 0.0 {
                continue;
            }
            let a = rule.alpha(model, x, y)?;
            rows[x * n + y] = a * g;
            stay += (1.0 - a) * g;
        }
        rows[x * n + x] += stay;
    }
    Ok(TransitionMatrix { n, rows })
}

/// Corrupt one off-diagonal entry of the kernel (row 1, column 0, scaled by
/// 1.01) and compensate on the diagonal so rows still sum to one. Used to
/// prove the balance check can fail.
pub fn inject_fault(kernel: &mut TransitionMatrix) {
    let n = kernel.n;
    assert!(n >= 2);
    let bump = kernel.rows[n] * 0.01;
    kernel.rows[n] += bump;
    kernel.rows[n + 1] -= bump;
}

/// Worst detailed-balance violation of a kernel against the target.
#[derive(Clone, Copy, Debug)]
pub struct BalanceReport {
    pub max_violation: f64,
    pub worst_pair: (usize, usize),
    /// Scale-aware pass bound: 1e-12 times the largest target mass.
    pub tolerance: f64,
    pub pass: bool,
}

pub fn check_detailed_balance(model: &DiscreteModel, kernel: &TransitionMatrix) -> BalanceReport {
    let n = model.n();
    let p = model.p();
    let tolerance = 1e-12 * p.iter().cloned().fold(0.0, f64::max);
    let mut max_violation = 0.0;
    let mut worst_pair = (0, 0);
    for x in 0..n {
        for y in (x + 1)..n {
            let v = (p[x] * kernel.entry(y, x) - p[y] * kernel.entry(x, y)).abs();
            if v > max_violation {
                max_violation = v;
                worst_pair = (x, y);
            }
        }
    }
    BalanceReport {
        max_violation,
        worst_pair,
        tolerance,
        pass: max_violation <= tolerance,
    }
}

/// Stationary distribution by power iteration from the uniform vector,
/// stopping when successive iterates agree to 1e-13 in the sup norm.
pub fn stationary_distribution(kernel: &TransitionMatrix) -> Result<Vec<f64>> {
    let n = kernel.n();
    if (0..n).all(|x| (0..n).all(|y| x == y || kernel.entry(y, x) == 0.0)) {
        return Err(Error::DegenerateKernel);
    }
    let mut v = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..POWER_MAX_ITER {
        next.iter_mut().for_each(|e| *e = 0.0);
        for (x, &vx) in v.iter().enumerate() {
            if vx == 0.0 {
                continue;
            }
            for (y, &pxy) in kernel.row(x).iter().enumerate() {
                next[y] += vx * pxy;
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|e| *e /= total);
        let residual = v
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut v, &mut next);
        if residual <= POWER_RESIDUAL {
            return Ok(v);
        }
    }
    Err(Error::NonConvergence(POWER_MAX_ITER))
}

/// Sup-norm distance between the kernel's stationary distribution and the
/// normalized target.
pub fn stationary_error(model: &DiscreteModel, kernel: &TransitionMatrix) -> Result<f64> {
    let pi = stationary_distribution(kernel)?;
    let target = model.normalized_target();
    Ok(pi
        .iter()
        .zip(&target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// How a rule's acceptance and off-diagonal kernel entries sit relative to
/// Metropolis-Hastings on the same model.
#[derive(Clone, Copy, Debug)]
pub struct DominanceReport {
    /// Largest amount by which the rule's alpha exceeds the MH alpha.
    pub worst_alpha_excess: f64,
    /// Largest amount by which an off-diagonal kernel entry exceeds MH's.
    pub worst_kernel_excess: f64,
    /// Largest |alpha - alpha_mh| over moving pairs, for equality checks.
    pub max_alpha_gap: f64,
    pub pass: bool,
}

/// Check that MH dominates `rule` pointwise in alpha and entrywise off the
/// kernel diagonal. Pairs starting at zero-mass states are skipped.
pub fn mh_dominance(model: &DiscreteModel, rule: &AcceptanceRule<usize>) -> Result<DominanceReport> {
    let n = model.n();
    let kernel = build_kernel(model, rule)?;
    let mh_kernel = build_kernel(model, &AcceptanceRule::mh())?;
    let mut worst_alpha_excess: f64 = 0.0;
    let mut worst_kernel_excess: f64 = 0.0;
    let mut max_alpha_gap: f64 = 0.0;
    for x in 0..n {
        if model.log_p(x) == f64::NEG_INFINITY {
            continue;
        }
        for y in 0..n {
            if y != x {
                worst_kernel_excess =
                    worst_kernel_excess.max(kernel.entry(y, x) - mh_kernel.entry(y, x));
            }
            if model.gamma(y, x) == 0.0 && model.gamma(x, y) == 0.0 {
                continue;
            }
            let a = rule.alpha(model, x, y)?;
            let mh = alpha_mh(model, x, y)?;
            worst_alpha_excess = worst_alpha_excess.max(a - mh);
            max_alpha_gap = max_alpha_gap.max((a - mh).abs());
        }
    }
    let pass = worst_alpha_excess <= 1e-12 && worst_kernel_excess <= 1e-12;
    Ok(DominanceReport {
        worst_alpha_excess,
        worst_kernel_excess,
        max_alpha_gap,
        pass,
    })
}

/// The reference battery of rules exercised against every model: each named
/// rule plus the k dial in all three regimes and both coefficient forms.
pub fn standard_rule_family(
    model: &Arc<DiscreteModel>,
) -> Vec<(String, AcceptanceRule<usize>)> {
    use crate::acceptance::{Role, SymmetricFn};
    let mut out: Vec<(String, AcceptanceRule<usize>)> = vec![
        ("MH".into(), AcceptanceRule::mh()),
        ("BK".into(), AcceptanceRule::bk()),
        ("SPECIAL".into(), AcceptanceRule::special()),
        (
            "HA[s=1]".into(),
            AcceptanceRule::hastings(SymmetricFn::constant(Role::S, 1.0)).unwrap(),
        ),
        (
            "HA[s_mh]".into(),
            AcceptanceRule::hastings(mappings::s_mh(model)).unwrap(),
        ),
        (
            "HA[s_special]".into(),
            AcceptanceRule::hastings(mappings::s_special(model)).unwrap(),
        ),
        (
            "ST[min_product]".into(),
            AcceptanceRule::stein(mappings::min_product_delta(model)).unwrap(),
        ),
        (
            "M[k=2H]".into(),
            AcceptanceRule::algorithm_m(mappings::k_scaled_h(model, 2.0)).unwrap(),
        ),
        (
            "M[k=sqrt(LH)]".into(),
            AcceptanceRule::algorithm_m(mappings::k_geometric_mid(model)).unwrap(),
        ),
        (
            "M[k=L/2]".into(),
            AcceptanceRule::algorithm_m(mappings::k_scaled_l(model, 0.5)).unwrap(),
        ),
        (
            "MAR[C=1]".into(),
            AcceptanceRule::mar(SymmetricFn::constant(Role::RelCoeff, 1.0)).unwrap(),
        ),
        (
            "MAR[C_barker]".into(),
            AcceptanceRule::mar(mappings::c_barker(model)).unwrap(),
        ),
        (
            "MAR[C=2]".into(),
            AcceptanceRule::mar(SymmetricFn::constant(Role::RelCoeff, 2.0)).unwrap(),
        ),
        (
            "MIR[m=L]".into(),
            AcceptanceRule::mir(mappings::minorizer_from_c(model, 1.0)).unwrap(),
        ),
        (
            "MIR[m=L/2]".into(),
            AcceptanceRule::mir(mappings::minorizer_from_c(model, 2.0)).unwrap(),
        ),
    ];
    out.shrink_to_fit();
    out
}

/// Result of one (model, rule) cell of a sweep.
#[derive(Clone, Debug)]
pub struct SweepEntry {
    pub model_index: usize,
    pub rule_label: String,
    pub balance: BalanceReport,
    pub stationary_gap: f64,
}

impl SweepEntry {
    pub fn pass(&self) -> bool {
        self.balance.pass && self.stationary_gap <= STATIONARY_TOL
    }
}

/// Run the standard rule battery over every model, checking detailed balance
/// and stationarity of each tabulated kernel. With `parallel` the models fan
/// out over the thread pool (a no-op without the `parallel` feature).
pub fn balance_sweep(models: &[Arc<DiscreteModel>], parallel: bool) -> Result<Vec<SweepEntry>> {
    let work = |(&idx, model): (&usize, &Arc<DiscreteModel>)| -> Result<Vec<SweepEntry>> {
        let mut entries = Vec::new();
        for (label, rule) in standard_rule_family(model) {
            let kernel = build_kernel(model, &rule)?;
            let balance = check_detailed_balance(model, &kernel);
            let stationary_gap = stationary_error(model, &kernel)?;
            entries.push(SweepEntry {
                model_index: idx,
                rule_label: label,
                balance,
                stationary_gap,
            });
        }
        Ok(entries)
    };
    let indices: Vec<usize> = (0..models.len()).collect();
    let pairs: Vec<(&usize, &Arc<DiscreteModel>)> = indices.iter().zip(models).collect();
    let nested = if parallel {
        exec::par_map(&pairs, |pair| work(*pair))
    } else {
        exec::seq_map(&pairs, |pair| work(*pair))
    };
    let mut out = Vec::new();
    for group in nested {
        out.extend(group?);
    }
    Ok(out)
}
