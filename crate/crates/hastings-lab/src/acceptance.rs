//! Acceptance probabilities for the whole Hastings family.
//!
//! Every rule here is a pure function alpha(x, y) in [0, 1] of a model and a
//! role-tagged symmetric function of the pair. Ratios are evaluated as a
//! single product gamma(x|y) p(y) / (p(x) gamma(y|x)) in log space: a zero
//! numerator contributes alpha = 0, a zero denominator with a positive
//! numerator gives 1 (the ratio is treated as +inf), and 0/0 is a
//! degenerate-pair error, since a correctly started chain never stands at a
//! zero-mass state.

use crate::error::{Error, Result};
use crate::model::{ModelOps, StateType};
use std::fmt;
use std::sync::Arc;

/// Absolute slack allowed on exact algebraic identities in double precision.
pub const IDENTITY_TOL: f64 = 1e-12;

const NEG_INF: f64 = f64::NEG_INFINITY;

/// Which slot of the family a symmetric function fills.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    /// The free dial of the generic rule.
    K,
    /// Hastings' symmetric factor, constrained to keep alpha within [0, 1].
    S,
    /// Stein's numerator, bounded by p(x) gamma(y|x).
    Delta,
    /// Relative majorizing coefficient, at least H.
    Majorizer,
    /// Relative minorizing coefficient, at most L.
    Minorizer,
    /// Rejection surcharge C >= 1 shared by the majorizing and minorizing forms.
    RelCoeff,
}

impl Role {
    pub fn tag(self) -> &'static str {
        match self {
            Role::K => "k",
            Role::S => "s",
            Role::Delta => "delta",
            Role::Majorizer => "M",
            Role::Minorizer => "m",
            Role::RelCoeff => "C",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A role-tagged symmetric function of a state pair.
#[derive(Clone)]
pub struct SymmetricFn<S: StateType> {
    role: Role,
    label: String,
    f: Arc<dyn Fn(S, S) -> f64 + Send + Sync>,
}

impl<S: StateType> SymmetricFn<S> {
    /// Wrap an arbitrary function. The caller promises symmetry; use
    /// [`validate_symmetric_fn`] to fuzz-check untrusted inputs.
    pub fn new(
        role: Role,
        label: impl Into<String>,
        f: impl Fn(S, S) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SymmetricFn {
            role,
            label: label.into(),
            f: Arc::new(f),
        }
    }

    /// Symmetric by construction: arguments are ordered before `f` sees them.
    pub fn from_unordered(
        role: Role,
        label: impl Into<String>,
        f: impl Fn(S, S) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(role, label, move |x, y| if y < x { f(y, x) } else { f(x, y) })
    }

    pub fn constant(role: Role, value: f64) -> Self {
        Self::new(role, format!("{}={value}", role.tag()), move |_, _| value)
    }

    pub fn eval(&self, x: S, y: S) -> f64 {
        (self.f)(x, y)
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl<S: StateType> fmt::Debug for SymmetricFn<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymmetricFn[{}: {}]", self.role, self.label)
    }
}

/// The four log terms every rule is assembled from.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PairTerms {
    pub lpx: f64,
    pub lpy: f64,
    /// log gamma(x | y)
    pub lg_xy: f64,
    /// log gamma(y | x)
    pub lg_yx: f64,
}

impl PairTerms {
    /// log of gamma(x|y) p(y), the numerator of the common ratio.
    #[inline]
    pub fn forward(&self) -> f64 {
        self.lg_xy + self.lpy
    }

    /// log of p(x) gamma(y|x), the denominator of the common ratio.
    #[inline]
    pub fn backward(&self) -> f64 {
        self.lpx + self.lg_yx
    }

    #[inline]
    pub fn is_degenerate(&self) -> bool {
        self.forward() == NEG_INF && self.backward() == NEG_INF
    }

    /// Logs of the two mass-to-proposal ratios p(x)/gamma(x|y) and
    /// p(y)/gamma(y|x). A zero mass gives -inf; a zero proposal density under
    /// positive mass gives +inf.
    #[inline]
    pub fn log_ratios(&self) -> (f64, f64) {
        let ratio = |lp: f64, lg: f64| {
            if lp == NEG_INF {
                NEG_INF
            } else if lg == NEG_INF {
                f64::INFINITY
            } else {
                lp - lg
            }
        };
        (ratio(self.lpx, self.lg_xy), ratio(self.lpy, self.lg_yx))
    }
}

pub(crate) fn pair_terms<Mo: ModelOps>(model: &Mo, x: Mo::State, y: Mo::State) -> PairTerms {
    PairTerms {
        lpx: model.log_p(x),
        lpy: model.log_p(y),
        lg_xy: model.log_gamma(x, y),
        lg_yx: model.log_gamma(y, x),
    }
}

fn degenerate<S: StateType>(x: S, y: S) -> Error {
    Error::DegeneratePair {
        x: format!("{x:?}"),
        y: format!("{y:?}"),
    }
}

/// Numerically stable (1 + e^t)^-1.
#[inline]
pub(crate) fn inv_one_plus_exp(t: f64) -> f64 {
    if t > 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

#[inline]
fn rel_slack(v: f64) -> f64 {
    IDENTITY_TOL * v.abs().max(1.0)
}

/// The two mass-to-proposal ratios as (L, H) = (min, max). A ratio with a
/// zero proposal density under positive mass comes back as the +inf sentinel.
pub fn bounds_lh<Mo: ModelOps>(model: &Mo, x: Mo::State, y: Mo::State) -> Result<(f64, f64)> {
    let t = pair_terms(model, x, y);
    if t.lpx == NEG_INF && t.lpy == NEG_INF {
        return Err(degenerate(x, y));
    }
    let (r1, r2) = t.log_ratios();
    Ok((r1.min(r2).exp(), r1.max(r2).exp()))
}

/// min{ gamma(x|y) p(y) / (p(x) gamma(y|x)), 1 }.
pub fn alpha_mh<Mo: ModelOps>(model: &Mo, x: Mo::State, y: Mo::State) -> Result<f64> {
    let t = pair_terms(model, x, y);
    if t.is_degenerate() {
        return Err(degenerate(x, y));
    }
    let (num, den) = (t.forward(), t.backward());
    if num == NEG_INF {
        return Ok(0.0);
    }
    if den == NEG_INF {
        return Ok(1.0);
    }
    Ok((num - den).min(0.0).exp())
}

/// (1 + p(x) gamma(y|x) / (gamma(x|y) p(y)))^-1.
pub fn alpha_bk<Mo: ModelOps>(model: &Mo, x: Mo::State, y: Mo::State) -> Result<f64> {
    let t = pair_terms(model, x, y);
    if t.is_degenerate() {
        return Err(degenerate(x, y));
    }
    Ok(inv_one_plus_exp(t.backward() - t.forward()))
}

/// s(x,y) (1 + p(x) gamma(y|x) / (gamma(x|y) p(y)))^-1 for a symmetric s
/// that keeps the result within [0, 1].
pub fn alpha_hastings<Mo: ModelOps>(
    model: &Mo,
    s: &SymmetricFn<Mo::State>,
    x: Mo::State,
    y: Mo::State,
) -> Result<f64> {
    expect_role(s, Role::S, "HA")?;
    let base = alpha_bk(model, x, y)?;
    let a = s.eval(x, y) * base;
    if !(-IDENTITY_TOL..=1.0 + IDENTITY_TOL).contains(&a) {
        return Err(Error::HastingsCondition {
            x: format!("{x:?}"),
            y: format!("{y:?}"),
            alpha: a,
        });
    }
    Ok(a.clamp(0.0, 1.0))
}

/// delta(x,y) / (p(x) gamma(y|x)) for a symmetric delta bounded by the
/// denominator.
pub fn alpha_stein<Mo: ModelOps>(
    model: &Mo,
    delta: &SymmetricFn<Mo::State>,
    x: Mo::State,
    y: Mo::State,
) -> Result<f64> {
    expect_role(delta, Role::Delta, "ST")?;
    let t = pair_terms(model, x, y);
    if t.is_degenerate() {
        return Err(degenerate(x, y));
    }
    let d = delta.eval(x, y);
    if d == 0.0 {
        return Ok(0.0);
    }
    let ratio = (d.ln() - t.backward()).exp();
    if ratio > 1.0 + IDENTITY_TOL {
        return Err(Error::SteinCondition {
            x: format!("{x:?}"),
            y: format!("{y:?}"),
            ratio,
        });
    }
    Ok(ratio.min(1.0))
}

/// min{ k gamma(x|y) / p(x), 1 } min{ p(y) / (k gamma(y|x)), 1 }.
pub fn alpha_m<Mo: ModelOps>(
    model: &Mo,
    k: &SymmetricFn<Mo::State>,
    x: Mo::State,
    y: Mo::State,
) -> Result<f64> {
    expect_role(k, Role::K, "M")?;
    let t = pair_terms(model, x, y);
    if t.lpx == NEG_INF {
        return Err(Error::ZeroMassState(format!("{x:?}")));
    }
    let kv = k.eval(x, y);
    if !(kv > 0.0) {
        return Err(Error::InvalidParam(format!(
            "k({x:?}, {y:?}) = {kv} is not positive"
        )));
    }
    let lk = kv.ln();
    let first = (lk + t.lg_xy - t.lpx).min(0.0);
    let second = (t.lpy - lk - t.lg_yx).min(0.0);
    Ok((first + second).exp())
}

/// Three-branch form of [`alpha_m`] keyed on where k sits relative to the
/// ratio bounds. Ties are routed to the adjacent closed-form branch (k = H to
/// the high branch, k = L to the low branch); both branches agree there.
pub fn alpha_m_piecewise<Mo: ModelOps>(
    model: &Mo,
    k: &SymmetricFn<Mo::State>,
    x: Mo::State,
    y: Mo::State,
) -> Result<f64> {
    expect_role(k, Role::K, "M")?;
    let t = pair_terms(model, x, y);
    if t.lpx == NEG_INF {
        return Err(Error::ZeroMassState(format!("{x:?}")));
    }
    let kv = k.eval(x, y);
    if !(kv > 0.0) {
        return Err(Error::InvalidParam(format!(
            "k({x:?}, {y:?}) = {kv} is not positive"
        )));
    }
    let lk = kv.ln();
    let (r1, r2) = t.log_ratios();
    let (lo, hi) = (r1.min(r2), r1.max(r2));
    let a = if lk >= hi {
        (t.lpy - lk - t.lg_yx).exp()
    } else if lk <= lo {
        (lk + t.lg_xy - t.lpx).exp()
    } else {
        (t.forward() - t.backward()).min(0.0).exp()
    };
    Ok(a.min(1.0))
}

/// p(y) / (M(x,y) gamma(y|x)) with M at least H, or the surcharge form
/// (1/C) min{ratio, 1} with C at least 1.
pub fn alpha_mar<Mo: ModelOps>(
    model: &Mo,
    param: &SymmetricFn<Mo::State>,
    x: Mo::State,
    y: Mo::State,
) -> Result<f64> {
    let t = pair_terms(model, x, y);
    if t.is_degenerate() {
        return Err(degenerate(x, y));
    }
    match param.role() {
        Role::Majorizer => {
            let mv = param.eval(x, y);
            let (r1, r2) = t.log_ratios();
            let h = r1.max(r2).exp();
            if mv < h - rel_slack(h) {
                return Err(Error::NotMajorizer {
                    x: format!("{x:?}"),
                    y: format!("{y:?}"),
                    value: mv,
                    bound: h,
                });
            }
            if mv == f64::INFINITY {
                return Ok(0.0);
            }
            Ok((t.lpy - mv.ln() - t.lg_yx).exp().min(1.0))
        }
        Role::RelCoeff => {
            let c = param.eval(x, y);
            if c < 1.0 - IDENTITY_TOL {
                return Err(Error::InvalidParam(format!(
                    "C({x:?}, {y:?}) = {c} is below 1"
                )));
            }
            let base = (t.forward() - t.backward()).min(0.0).exp();
            Ok((base / c).min(1.0))
        }
        other => Err(Error::RoleMismatch {
            rule: "MAR",
            found: other.tag(),
        }),
    }
}

/// m(x,y) gamma(x|y) / p(x) with m at most L.
pub fn alpha_mir<Mo: ModelOps>(
    model: &Mo,
    m: &SymmetricFn<Mo::State>,
    x: Mo::State,
    y: Mo::State,
) -> Result<f64> {
    expect_role(m, Role::Minorizer, "MIR")?;
    let t = pair_terms(model, x, y);
    if t.lpx == NEG_INF {
        return Err(Error::ZeroMassState(format!("{x:?}")));
    }
    let mv = m.eval(x, y);
    let (r1, r2) = t.log_ratios();
    let l = r1.min(r2).exp();
    if mv > l + rel_slack(l) {
        return Err(Error::NotMinorizer {
            x: format!("{x:?}"),
            y: format!("{y:?}"),
            value: mv,
            bound: l,
        });
    }
    if mv == 0.0 {
        return Ok(0.0);
    }
    Ok((mv.ln() + t.lg_xy - t.lpx).exp().min(1.0))
}

/// min{ gamma(x|y) / p(x), 1 } min{ p(y) / gamma(y|x), 1 }; the constant-k=1
/// member of the family.
pub fn alpha_special<Mo: ModelOps>(model: &Mo, x: Mo::State, y: Mo::State) -> Result<f64> {
    let t = pair_terms(model, x, y);
    if t.lpx == NEG_INF {
        return Err(Error::ZeroMassState(format!("{x:?}")));
    }
    let first = (t.lg_xy - t.lpx).min(0.0);
    let second = (t.lpy - t.lg_yx).min(0.0);
    Ok((first + second).exp())
}

fn expect_role<S: StateType>(
    f: &SymmetricFn<S>,
    want: Role,
    rule: &'static str,
) -> Result<()> {
    if f.role() != want {
        return Err(Error::RoleMismatch {
            rule,
            found: f.role().tag(),
        });
    }
    Ok(())
}

/// A named rule bound to its parameter, evaluating alpha(x, y).
#[derive(Clone, Debug)]
pub enum AcceptanceRule<S: StateType> {
    MetropolisHastings,
    Barker,
    Special,
    Hastings(SymmetricFn<S>),
    Stein(SymmetricFn<S>),
    AlgorithmM(SymmetricFn<S>),
    Mar(SymmetricFn<S>),
    Mir(SymmetricFn<S>),
}

impl<S: StateType> AcceptanceRule<S> {
    pub fn mh() -> Self {
        AcceptanceRule::MetropolisHastings
    }

    pub fn bk() -> Self {
        AcceptanceRule::Barker
    }

    pub fn special() -> Self {
        AcceptanceRule::Special
    }

    pub fn hastings(s: SymmetricFn<S>) -> Result<Self> {
        expect_role(&s, Role::S, "HA")?;
        Ok(AcceptanceRule::Hastings(s))
    }

    pub fn stein(delta: SymmetricFn<S>) -> Result<Self> {
        expect_role(&delta, Role::Delta, "ST")?;
        Ok(AcceptanceRule::Stein(delta))
    }

    pub fn algorithm_m(k: SymmetricFn<S>) -> Result<Self> {
        expect_role(&k, Role::K, "M")?;
        Ok(AcceptanceRule::AlgorithmM(k))
    }

    /// Accepts either a majorizer M >= H or a surcharge C >= 1.
    pub fn mar(param: SymmetricFn<S>) -> Result<Self> {
        match param.role() {
            Role::Majorizer | Role::RelCoeff => Ok(AcceptanceRule::Mar(param)),
            other => Err(Error::RoleMismatch {
                rule: "MAR",
                found: other.tag(),
            }),
        }
    }

    pub fn mir(m: SymmetricFn<S>) -> Result<Self> {
        expect_role(&m, Role::Minorizer, "MIR")?;
        Ok(AcceptanceRule::Mir(m))
    }

    pub fn name(&self) -> &'static str {
        match self {
            AcceptanceRule::MetropolisHastings => "MH",
            AcceptanceRule::Barker => "BK",
            AcceptanceRule::Special => "SPECIAL",
            AcceptanceRule::Hastings(_) => "HA",
            AcceptanceRule::Stein(_) => "ST",
            AcceptanceRule::AlgorithmM(_) => "M",
            AcceptanceRule::Mar(_) => "MAR",
            AcceptanceRule::Mir(_) => "MIR",
        }
    }

    pub fn param(&self) -> Option<&SymmetricFn<S>> {
        match self {
            AcceptanceRule::MetropolisHastings
            | AcceptanceRule::Barker
            | AcceptanceRule::Special => None,
            AcceptanceRule::Hastings(f)
            | AcceptanceRule::Stein(f)
            | AcceptanceRule::AlgorithmM(f)
            | AcceptanceRule::Mar(f)
            | AcceptanceRule::Mir(f) => Some(f),
        }
    }

    pub fn alpha<Mo: ModelOps<State = S>>(&self, model: &Mo, x: S, y: S) -> Result<f64> {
        match self {
            AcceptanceRule::MetropolisHastings => alpha_mh(model, x, y),
            AcceptanceRule::Barker => alpha_bk(model, x, y),
            AcceptanceRule::Special => alpha_special(model, x, y),
            AcceptanceRule::Hastings(s) => alpha_hastings(model, s, x, y),
            AcceptanceRule::Stein(d) => alpha_stein(model, d, x, y),
            AcceptanceRule::AlgorithmM(k) => alpha_m(model, k, x, y),
            AcceptanceRule::Mar(p) => alpha_mar(model, p, x, y),
            AcceptanceRule::Mir(m) => alpha_mir(model, m, x, y),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Violation<S: StateType> {
    pub x: S,
    pub y: S,
    pub kind: &'static str,
    pub magnitude: f64,
}

/// Findings of [`validate_symmetric_fn`]; an empty report is a clean pass.
#[derive(Clone, Debug)]
pub struct ValidationReport<S: StateType> {
    pub symmetry: Vec<Violation<S>>,
    pub role: Vec<Violation<S>>,
}

impl<S: StateType> Default for ValidationReport<S> {
    fn default() -> Self {
        ValidationReport {
            symmetry: Vec::new(),
            role: Vec::new(),
        }
    }
}

impl<S: StateType> ValidationReport<S> {
    pub fn is_clean(&self) -> bool {
        self.symmetry.is_empty() && self.role.is_empty()
    }

    pub fn worst_symmetry(&self) -> f64 {
        self.symmetry
            .iter()
            .map(|v| v.magnitude)
            .fold(0.0, f64::max)
    }

    pub fn worst_role(&self) -> f64 {
        self.role.iter().map(|v| v.magnitude).fold(0.0, f64::max)
    }
}

/// Fuzz-check symmetry and the role constraint of `f` over a pair sample.
/// Degenerate pairs (zero mass in both directions) are skipped.
pub fn validate_symmetric_fn<Mo: ModelOps>(
    model: &Mo,
    f: &SymmetricFn<Mo::State>,
    pairs: &[(Mo::State, Mo::State)],
) -> ValidationReport<Mo::State> {
    let mut report = ValidationReport::default();
    for &(x, y) in pairs {
        let a = f.eval(x, y);
        let b = f.eval(y, x);
        let diff = (a - b).abs();
        if diff > IDENTITY_TOL * a.abs().max(b.abs()).max(1.0) {
            report.symmetry.push(Violation {
                x,
                y,
                kind: "asymmetric",
                magnitude: diff,
            });
        }
        let t = pair_terms(model, x, y);
        if t.is_degenerate() {
            continue;
        }
        let (r1, r2) = t.log_ratios();
        match f.role() {
            Role::K => {
                if !(a > 0.0) {
                    report.role.push(Violation {
                        x,
                        y,
                        kind: "k not positive",
                        magnitude: -a,
                    });
                }
            }
            Role::S => {
                for (u, v) in [(x, y), (y, x)] {
                    if let Err(Error::HastingsCondition { alpha, .. }) =
                        alpha_hastings(model, f, u, v)
                    {
                        report.role.push(Violation {
                            x: u,
                            y: v,
                            kind: "Hastings bound",
                            magnitude: (alpha - 1.0).max(-alpha),
                        });
                    }
                }
            }
            Role::Delta => {
                for bound in [t.backward(), t.forward()] {
                    if a > 0.0 && a.ln() > bound + IDENTITY_TOL {
                        report.role.push(Violation {
                            x,
                            y,
                            kind: "delta exceeds mass-proposal product",
                            magnitude: (a.ln() - bound).exp() - 1.0,
                        });
                    }
                }
            }
            Role::Majorizer => {
                let h = r1.max(r2).exp();
                if a < h - rel_slack(h) {
                    report.role.push(Violation {
                        x,
                        y,
                        kind: "below H",
                        magnitude: (h - a) / h,
                    });
                }
            }
            Role::Minorizer => {
                let l = r1.min(r2).exp();
                if a > l + rel_slack(l) {
                    report.role.push(Violation {
                        x,
                        y,
                        kind: "above L",
                        magnitude: (a - l) / l.max(f64::MIN_POSITIVE),
                    });
                }
            }
            Role::RelCoeff => {
                if a < 1.0 - IDENTITY_TOL {
                    report.role.push(Violation {
                        x,
                        y,
                        kind: "C below 1",
                        magnitude: 1.0 - a,
                    });
                }
            }
        }
    }
    report
}

/// All ordered pairs of a discrete space, diagonal included.
pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            out.push((x, y));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DiscreteModel;

    fn d2() -> DiscreteModel {
        DiscreteModel::new(vec![1.0, 2.0], vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn bounds_on_d2() {
        let m = d2();
        let (l, h) = bounds_lh(&m, 0, 1).unwrap();
        assert!(close(l, 2.0) && close(h, 4.0));
        let (l, h) = bounds_lh(&m, 1, 1).unwrap();
        assert!(close(l, 4.0) && close(h, 4.0));
    }

    #[test]
    fn zero_proposal_density_gives_infinite_h() {
        let m = DiscreteModel::new(vec![1.0, 2.0], vec![vec![1.0, 0.0], vec![0.5, 0.5]])
            .unwrap();
        let (_, h) = bounds_lh(&m, 0, 1).unwrap();
        assert_eq!(h, f64::INFINITY);
    }

    #[test]
    fn mh_on_d2() {
        let m = d2();
        assert_eq!(alpha_mh(&m, 0, 1).unwrap(), 1.0);
        assert!(close(alpha_mh(&m, 1, 0).unwrap(), 0.5));
        assert_eq!(alpha_mh(&m, 1, 1).unwrap(), 1.0);
    }

    #[test]
    fn bk_on_d2() {
        let m = d2();
        assert!(close(alpha_bk(&m, 0, 1).unwrap(), 2.0 / 3.0));
        assert!(close(alpha_bk(&m, 1, 0).unwrap(), 1.0 / 3.0));
        assert!(close(alpha_bk(&m, 0, 0).unwrap(), 0.5));
    }

    #[test]
    fn hastings_with_unit_s_is_barker() {
        let m = d2();
        let s = SymmetricFn::constant(Role::S, 1.0);
        assert!(close(alpha_hastings(&m, &s, 0, 1).unwrap(), 2.0 / 3.0));
    }

    #[test]
    fn hastings_condition_violation_detected() {
        let m = d2();
        let s = SymmetricFn::constant(Role::S, 2.0);
        assert!(matches!(
            alpha_hastings(&m, &s, 0, 1).unwrap_err(),
            Error::HastingsCondition { .. }
        ));
    }

    #[test]
    fn stein_min_product_on_d2() {
        let m = d2();
        let delta = SymmetricFn::constant(Role::Delta, 0.5);
        assert!(close(alpha_stein(&m, &delta, 0, 1).unwrap(), 1.0));
        assert!(close(alpha_stein(&m, &delta, 1, 0).unwrap(), 0.5));
        let zero = SymmetricFn::constant(Role::Delta, 0.0);
        assert_eq!(alpha_stein(&m, &zero, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn algorithm_m_regimes_on_d2() {
        let m = d2();
        let k6 = SymmetricFn::constant(Role::K, 6.0);
        let k3 = SymmetricFn::constant(Role::K, 3.0);
        let k1 = SymmetricFn::constant(Role::K, 1.0);
        assert!(close(alpha_m(&m, &k6, 0, 1).unwrap(), 2.0 / 3.0));
        assert!(close(alpha_m(&m, &k3, 1, 0).unwrap(), 0.5));
        assert!(close(alpha_m(&m, &k1, 1, 0).unwrap(), 0.25));
    }

    #[test]
    fn piecewise_matches_product_form_and_boundary() {
        let m = d2();
        for kv in [0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 10.0] {
            let k = SymmetricFn::constant(Role::K, kv);
            for (x, y) in [(0usize, 1usize), (1, 0)] {
                let a = alpha_m(&m, &k, x, y).unwrap();
                let b = alpha_m_piecewise(&m, &k, x, y).unwrap();
                assert!(
                    (a - b).abs() <= 1e-12,
                    "k={kv} ({x},{y}): {a} vs {b}"
                );
            }
        }
        // k = H: the high branch value coincides with the middle one.
        let k4 = SymmetricFn::constant(Role::K, 4.0);
        assert!(close(alpha_m_piecewise(&m, &k4, 0, 1).unwrap(), 1.0));
    }

    #[test]
    fn mar_forms_on_d2() {
        let m = d2();
        let c1 = SymmetricFn::constant(Role::RelCoeff, 1.0);
        assert!(close(alpha_mar(&m, &c1, 0, 1).unwrap(), 1.0));
        let m8 = SymmetricFn::constant(Role::Majorizer, 8.0);
        assert!(close(alpha_mar(&m, &m8, 1, 0).unwrap(), 0.25));
        let m2 = SymmetricFn::constant(Role::Majorizer, 2.0);
        assert!(matches!(
            alpha_mar(&m, &m2, 0, 1).unwrap_err(),
            Error::NotMajorizer { .. }
        ));
    }

    #[test]
    fn mir_forms_on_d2() {
        let m = d2();
        let l = SymmetricFn::constant(Role::Minorizer, 2.0);
        assert!(close(alpha_mir(&m, &l, 1, 0).unwrap(), 0.5));
        let m1 = SymmetricFn::constant(Role::Minorizer, 1.0);
        assert!(close(alpha_mir(&m, &m1, 1, 0).unwrap(), 0.25));
        let m43 = SymmetricFn::constant(Role::Minorizer, 4.0 / 3.0);
        assert!(close(alpha_mir(&m, &m43, 0, 1).unwrap(), 2.0 / 3.0));
        let too_big = SymmetricFn::constant(Role::Minorizer, 3.0);
        assert!(matches!(
            alpha_mir(&m, &too_big, 0, 1).unwrap_err(),
            Error::NotMinorizer { .. }
        ));
    }

    #[test]
    fn special_on_d2() {
        let m = d2();
        assert!(close(alpha_special(&m, 0, 1).unwrap(), 0.5));
        assert!(close(alpha_special(&m, 1, 0).unwrap(), 0.25));
        let k1 = SymmetricFn::constant(Role::K, 1.0);
        assert!(close(
            alpha_special(&m, 0, 1).unwrap(),
            alpha_m(&m, &k1, 0, 1).unwrap()
        ));
    }

    #[test]
    fn degenerate_pair_is_an_error() {
        let m = DiscreteModel::new(
            vec![0.0, 0.0, 1.0],
            vec![
                vec![1.0 / 3.0; 3],
                vec![1.0 / 3.0; 3],
                vec![1.0 / 3.0; 3],
            ],
        )
        .unwrap();
        assert!(matches!(
            alpha_mh(&m, 0, 1).unwrap_err(),
            Error::DegeneratePair { .. }
        ));
    }

    #[test]
    fn validator_flags_bad_s_and_asymmetry() {
        let m = d2();
        let pairs = all_pairs(2);
        let s2 = SymmetricFn::constant(Role::S, 2.0);
        let report = validate_symmetric_fn(&m, &s2, &pairs);
        assert!(!report.role.is_empty());

        let skew = SymmetricFn::new(Role::K, "skewed", |x: usize, y: usize| {
            if (x, y) == (0, 1) {
                3.0
            } else if (x, y) == (1, 0) {
                3.1
            } else {
                3.0
            }
        });
        let report = validate_symmetric_fn(&m, &skew, &pairs);
        assert!((report.worst_symmetry() - 0.1).abs() < 1e-12);

        let c1 = SymmetricFn::constant(Role::RelCoeff, 1.0);
        assert!(validate_symmetric_fn(&m, &c1, &pairs).is_clean());
    }

    #[test]
    fn identity_state_values() {
        let m = d2();
        for x in 0..2 {
            assert_eq!(alpha_mh(&m, x, x).unwrap(), 1.0);
            assert!(close(alpha_bk(&m, x, x).unwrap(), 0.5));
        }
    }

    #[test]
    fn rule_constructors_enforce_roles() {
        let s = SymmetricFn::constant(Role::S, 1.0);
        assert!(AcceptanceRule::<usize>::algorithm_m(s).is_err());
        let k = SymmetricFn::constant(Role::K, 1.0);
        assert!(AcceptanceRule::<usize>::algorithm_m(k).is_ok());
    }
}
