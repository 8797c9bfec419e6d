//! Transforms between the parameterizations of the family.
//!
//! Every named rule is the same algorithm wearing a different parameter: a
//! symmetric s, a free dial k, a numerator delta, a relative majorizer M, a
//! relative minorizer m, or a surcharge C. Each transform here takes a model
//! and a parameter in one role and produces the equivalent parameter in
//! another, so the acceptance probability is preserved pointwise. All
//! arithmetic happens in log space on the two mass-to-proposal ratios
//! r1 = log(p(x)/gamma(x|y)) and r2 = log(p(y)/gamma(y|x)).

use crate::acceptance::{pair_terms, AcceptanceRule, Role, SymmetricFn};
use crate::error::{Error, Result};
use crate::model::{ModelOps, StateType};
use std::sync::Arc;

/// log(e^a + e^b), stable for widely separated and infinite arguments.
#[inline]
pub(crate) fn log_sum_exp(a: f64, b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if hi == f64::INFINITY {
        return f64::INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

fn ratios<Mo: ModelOps>(model: &Mo, x: Mo::State, y: Mo::State) -> (f64, f64) {
    pair_terms(model, x, y).log_ratios()
}

/// The symmetric factor that turns the Barker base into Metropolis-Hastings:
/// s(x,y) = 1 + e^{-|r1 - r2|}.
pub fn s_mh<Mo: ModelOps>(model: &Arc<Mo>) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    SymmetricFn::new(Role::S, "s_mh", move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        1.0 + (-(r1 - r2).abs()).exp()
    })
}

/// The symmetric factor of the k = 1 member:
/// log s = min(-r1, 0) + min(-r2, 0) + log(e^{r1} + e^{r2}).
pub fn s_special<Mo: ModelOps>(model: &Arc<Mo>) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    SymmetricFn::new(Role::S, "s_special", move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        ((-r1).min(0.0) + (-r2).min(0.0) + log_sum_exp(r1, r2)).exp()
    })
}

/// M(x,y) = (e^{r1} + e^{r2}) / s(x,y). A valid s always yields M >= H.
pub fn m_upper_from_s<Mo: ModelOps>(
    model: &Arc<Mo>,
    s: &SymmetricFn<Mo::State>,
) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    let s = s.clone();
    SymmetricFn::new(Role::Majorizer, format!("M_from[{}]", s.label()), move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        (log_sum_exp(r1, r2) - s.eval(x, y).ln()).exp()
    })
}

/// m(x,y) = s(x,y) / (e^{-r1} + e^{-r2}). A valid s always yields m <= L.
pub fn m_lower_from_s<Mo: ModelOps>(
    model: &Arc<Mo>,
    s: &SymmetricFn<Mo::State>,
) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    let s = s.clone();
    SymmetricFn::new(Role::Minorizer, format!("m_from[{}]", s.label()), move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        (s.eval(x, y).ln() - log_sum_exp(-r1, -r2)).exp()
    })
}

/// The symmetric factor equivalent to a dial k, by regime: above H it is
/// (e^{r1} + e^{r2})/k, strictly between the bounds it collapses to the
/// Metropolis-Hastings factor, and below L it is k (e^{-r1} + e^{-r2}).
pub fn s_from_k<Mo: ModelOps>(
    model: &Arc<Mo>,
    k: &SymmetricFn<Mo::State>,
) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    let k = k.clone();
    SymmetricFn::new(Role::S, format!("s_from[{}]", k.label()), move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        let lk = k.eval(x, y).ln();
        if lk >= r1.max(r2) {
            (log_sum_exp(r1, r2) - lk).exp()
        } else if lk <= r1.min(r2) {
            (lk + log_sum_exp(-r1, -r2)).exp()
        } else {
            1.0 + (-(r1 - r2).abs()).exp()
        }
    })
}

/// The numerator delta equivalent to a dial k, by regime: p(x)p(y)/k above H,
/// min{p(y) gamma(x|y), p(x) gamma(y|x)} strictly between the bounds, and
/// k gamma(x|y) gamma(y|x) below L.
pub fn delta_from_k<Mo: ModelOps>(
    model: &Arc<Mo>,
    k: &SymmetricFn<Mo::State>,
) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    let k = k.clone();
    SymmetricFn::new(Role::Delta, format!("delta_from[{}]", k.label()), move |x, y| {
        let t = pair_terms(m.as_ref(), x, y);
        let (r1, r2) = t.log_ratios();
        let lk = k.eval(x, y).ln();
        if lk >= r1.max(r2) {
            (t.lpx + t.lpy - lk).exp()
        } else if lk <= r1.min(r2) {
            (lk + t.lg_xy + t.lg_yx).exp()
        } else {
            t.forward().min(t.backward()).exp()
        }
    })
}

/// M(x,y) = p(x) p(y) / delta(x,y).
pub fn m_upper_from_delta<Mo: ModelOps>(
    model: &Arc<Mo>,
    delta: &SymmetricFn<Mo::State>,
) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    let delta = delta.clone();
    SymmetricFn::new(
        Role::Majorizer,
        format!("M_from[{}]", delta.label()),
        move |x, y| {
            let t = pair_terms(m.as_ref(), x, y);
            (t.lpx + t.lpy - delta.eval(x, y).ln()).exp()
        },
    )
}

/// m(x,y) = delta(x,y) / (gamma(x|y) gamma(y|x)).
pub fn m_lower_from_delta<Mo: ModelOps>(
    model: &Arc<Mo>,
    delta: &SymmetricFn<Mo::State>,
) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    let delta = delta.clone();
    SymmetricFn::new(
        Role::Minorizer,
        format!("m_from[{}]", delta.label()),
        move |x, y| {
            let t = pair_terms(m.as_ref(), x, y);
            (delta.eval(x, y).ln() - t.lg_xy - t.lg_yx).exp()
        },
    )
}

/// The majorizer equivalent to a dial k: clip k up to each ratio,
/// log M = log k + max(r1 - log k, 0) + max(r2 - log k, 0).
pub fn m_upper_from_k<Mo: ModelOps>(
    model: &Arc<Mo>,
    k: &SymmetricFn<Mo::State>,
) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    let k = k.clone();
    SymmetricFn::new(Role::Majorizer, format!("M_from[{}]", k.label()), move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        let lk = k.eval(x, y).ln();
        (lk + (r1 - lk).max(0.0) + (r2 - lk).max(0.0)).exp()
    })
}

/// The minorizer equivalent to a dial k: clip k down to each ratio,
/// log m = log k + min(r1 - log k, 0) + min(r2 - log k, 0).
pub fn m_lower_from_k<Mo: ModelOps>(
    model: &Arc<Mo>,
    k: &SymmetricFn<Mo::State>,
) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    let k = k.clone();
    SymmetricFn::new(Role::Minorizer, format!("m_from[{}]", k.label()), move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        let lk = k.eval(x, y).ln();
        (lk + (r1 - lk).min(0.0) + (r2 - lk).min(0.0)).exp()
    })
}

/// s(x,y) = (e^{r1} + e^{r2}) / M(x,y), inverse of [`m_upper_from_s`].
pub fn s_from_m_upper<Mo: ModelOps>(
    model: &Arc<Mo>,
    maj: &SymmetricFn<Mo::State>,
) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    let maj = maj.clone();
    SymmetricFn::new(Role::S, format!("s_from[{}]", maj.label()), move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        (log_sum_exp(r1, r2) - maj.eval(x, y).ln()).exp()
    })
}

/// s(x,y) = m(x,y) (e^{-r1} + e^{-r2}), inverse of [`m_lower_from_s`].
pub fn s_from_m_lower<Mo: ModelOps>(
    model: &Arc<Mo>,
    min: &SymmetricFn<Mo::State>,
) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    let min = min.clone();
    SymmetricFn::new(Role::S, format!("s_from[{}]", min.label()), move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        (min.eval(x, y).ln() + log_sum_exp(-r1, -r2)).exp()
    })
}

/// The pairwise surcharge whose majorizing chain reproduces Barker:
/// C(x,y) = 1 + e^{-|r1 - r2|}.
pub fn c_barker<Mo: ModelOps>(model: &Arc<Mo>) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    SymmetricFn::new(Role::RelCoeff, "C_barker", move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        1.0 + (-(r1 - r2).abs()).exp()
    })
}

// --- ready-made dials -------------------------------------------------------

/// k(x,y) = factor * H(x,y); factor >= 1 keeps the dial in the high regime.
pub fn k_scaled_h<Mo: ModelOps>(model: &Arc<Mo>, factor: f64) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    SymmetricFn::new(Role::K, format!("k={factor}*H"), move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        factor * r1.max(r2).exp()
    })
}

/// k(x,y) = sqrt(L H), the geometric midpoint of the two ratios; collapses
/// the rule to Metropolis-Hastings wherever L < H.
pub fn k_geometric_mid<Mo: ModelOps>(model: &Arc<Mo>) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    SymmetricFn::new(Role::K, "k=sqrt(LH)", move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        (0.5 * (r1 + r2)).exp()
    })
}

/// k(x,y) = factor * L(x,y); factor <= 1 keeps the dial in the low regime.
pub fn k_scaled_l<Mo: ModelOps>(model: &Arc<Mo>, factor: f64) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    SymmetricFn::new(Role::K, format!("k={factor}*L"), move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        factor * r1.min(r2).exp()
    })
}

/// k(x,y) = e^{r1} + e^{r2}; always at least H, and the resulting rule is
/// exactly Barker.
pub fn barker_sum_k<Mo: ModelOps>(model: &Arc<Mo>) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    SymmetricFn::new(Role::K, "k=barker_sum", move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        log_sum_exp(r1, r2).exp()
    })
}

/// k(x,y) = (e^{-r1} + e^{-r2})^{-1}; always at most L, and the resulting
/// rule is again Barker, from below.
pub fn inv_barker_sum_k<Mo: ModelOps>(model: &Arc<Mo>) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    SymmetricFn::new(Role::K, "k=inv_barker_sum", move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        (-log_sum_exp(-r1, -r2)).exp()
    })
}

/// delta(x,y) = min{p(y) gamma(x|y), p(x) gamma(y|x)}; the numerator that
/// collapses the rule to Metropolis-Hastings.
pub fn min_product_delta<Mo: ModelOps>(model: &Arc<Mo>) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    SymmetricFn::new(Role::Delta, "delta=min_product", move |x, y| {
        let t = pair_terms(m.as_ref(), x, y);
        t.forward().min(t.backward()).exp()
    })
}

/// m(x,y) = L(x,y) / c for a surcharge c >= 1.
pub fn minorizer_from_c<Mo: ModelOps>(model: &Arc<Mo>, c: f64) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    SymmetricFn::new(Role::Minorizer, format!("m=L/{c}"), move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        r1.min(r2).exp() / c
    })
}

/// M(x,y) = c * H(x,y) for a surcharge c >= 1.
pub fn majorizer_from_c<Mo: ModelOps>(model: &Arc<Mo>, c: f64) -> SymmetricFn<Mo::State> {
    let m = Arc::clone(model);
    SymmetricFn::new(Role::Majorizer, format!("M={c}*H"), move |x, y| {
        let (r1, r2) = ratios(m.as_ref(), x, y);
        c * r1.max(r2).exp()
    })
}

// --- bulk mapping ------------------------------------------------------------

/// One transform application: the parameter it came from, the equivalent
/// parameter in the new role, and a short description of the construction.
#[derive(Clone, Debug)]
pub struct MappedFn<S: StateType> {
    pub source: SymmetricFn<S>,
    pub result: SymmetricFn<S>,
    pub construction: &'static str,
}

/// Every transform applicable to `source`, by its role.
pub fn transforms_for<Mo: ModelOps>(
    model: &Arc<Mo>,
    source: &SymmetricFn<Mo::State>,
) -> Vec<MappedFn<Mo::State>> {
    let entry = |result, construction| MappedFn {
        source: source.clone(),
        result,
        construction,
    };
    match source.role() {
        Role::S => vec![
            entry(m_upper_from_s(model, source), "M = (e^r1 + e^r2) / s"),
            entry(m_lower_from_s(model, source), "m = s / (e^-r1 + e^-r2)"),
        ],
        Role::K => vec![
            entry(s_from_k(model, source), "s from k by regime"),
            entry(delta_from_k(model, source), "delta from k by regime"),
            entry(m_upper_from_k(model, source), "M = k clipped up to the ratios"),
            entry(m_lower_from_k(model, source), "m = k clipped down to the ratios"),
        ],
        Role::Delta => vec![
            entry(m_upper_from_delta(model, source), "M = p(x) p(y) / delta"),
            entry(
                m_lower_from_delta(model, source),
                "m = delta / (gamma(x|y) gamma(y|x))",
            ),
        ],
        Role::Majorizer => vec![entry(
            s_from_m_upper(model, source),
            "s = (e^r1 + e^r2) / M",
        )],
        Role::Minorizer => vec![entry(
            s_from_m_lower(model, source),
            "s = m (e^-r1 + e^-r2)",
        )],
        Role::RelCoeff => Vec::new(),
    }
}

/// The rule a parameter naturally drives, by role. A surcharge C goes to the
/// majorizing form.
pub fn rule_for<S: StateType>(param: SymmetricFn<S>) -> Result<AcceptanceRule<S>> {
    match param.role() {
        Role::S => AcceptanceRule::hastings(param),
        Role::K => AcceptanceRule::algorithm_m(param),
        Role::Delta => AcceptanceRule::stein(param),
        Role::Majorizer | Role::RelCoeff => AcceptanceRule::mar(param),
        Role::Minorizer => AcceptanceRule::mir(param),
    }
    .map_err(|e| match e {
        Error::RoleMismatch { rule, found } => Error::RoleMismatch { rule, found },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acceptance::{alpha_bk, alpha_mh};
    use crate::model::DiscreteModel;

    fn d2() -> Arc<DiscreteModel> {
        Arc::new(
            DiscreteModel::new(vec![1.0, 2.0], vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(),
        )
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn lse_edge_cases() {
        assert_eq!(log_sum_exp(f64::NEG_INFINITY, f64::NEG_INFINITY), f64::NEG_INFINITY);
        assert!(close(log_sum_exp(0.0, 0.0), 2.0f64.ln()));
        assert!(close(log_sum_exp(f64::NEG_INFINITY, 1.0), 1.0));
        assert_eq!(log_sum_exp(f64::INFINITY, 0.0), f64::INFINITY);
    }

    #[test]
    fn s_mh_reproduces_mh() {
        let m = d2();
        let s = s_mh(&m);
        assert!(close(s.eval(0, 1), 1.5));
        for (x, y) in [(0usize, 1usize), (1, 0), (0, 0), (1, 1)] {
            let a = s.eval(x, y) * alpha_bk(m.as_ref(), x, y).unwrap();
            assert!(close(a, alpha_mh(m.as_ref(), x, y).unwrap()));
        }
    }

    #[test]
    fn s_special_values_on_d2() {
        let m = d2();
        let s = s_special(&m);
        assert!(close(s.eval(0, 1), 0.75));
        assert!(close(s.eval(1, 0), 0.75));
    }

    #[test]
    fn s_to_majorizer_and_minorizer_on_d2() {
        let m = d2();
        let one = SymmetricFn::constant(Role::S, 1.0);
        assert!(close(m_upper_from_s(&m, &one).eval(0, 1), 6.0));
        assert!(close(m_lower_from_s(&m, &one).eval(0, 1), 4.0 / 3.0));
    }

    #[test]
    fn s_from_k_by_regime_on_d2() {
        let m = d2();
        let s6 = s_from_k(&m, &SymmetricFn::constant(Role::K, 6.0));
        let s3 = s_from_k(&m, &SymmetricFn::constant(Role::K, 3.0));
        let s1 = s_from_k(&m, &SymmetricFn::constant(Role::K, 1.0));
        assert!(close(s6.eval(0, 1), 1.0));
        assert!(close(s3.eval(0, 1), 1.5));
        assert!(close(s1.eval(0, 1), 0.75));
    }

    #[test]
    fn delta_from_k_by_regime_on_d2() {
        let m = d2();
        let d6 = delta_from_k(&m, &SymmetricFn::constant(Role::K, 6.0));
        let d3 = delta_from_k(&m, &SymmetricFn::constant(Role::K, 3.0));
        let d1 = delta_from_k(&m, &SymmetricFn::constant(Role::K, 1.0));
        assert!(close(d6.eval(0, 1), 1.0 / 3.0));
        assert!(close(d3.eval(0, 1), 0.5));
        assert!(close(d1.eval(0, 1), 0.25));
    }

    #[test]
    fn delta_to_coefficients_on_d2() {
        let m = d2();
        let half = SymmetricFn::constant(Role::Delta, 0.5);
        assert!(close(m_upper_from_delta(&m, &half).eval(0, 1), 4.0));
        assert!(close(m_lower_from_delta(&m, &half).eval(0, 1), 2.0));
    }

    #[test]
    fn k_to_coefficients_on_d2() {
        let m = d2();
        let k3 = SymmetricFn::constant(Role::K, 3.0);
        let k1 = SymmetricFn::constant(Role::K, 1.0);
        let k6 = SymmetricFn::constant(Role::K, 6.0);
        assert!(close(m_upper_from_k(&m, &k3).eval(0, 1), 4.0));
        assert!(close(m_upper_from_k(&m, &k1).eval(0, 1), 8.0));
        assert!(close(m_upper_from_k(&m, &k6).eval(0, 1), 6.0));
        assert!(close(m_lower_from_k(&m, &k3).eval(0, 1), 2.0));
        assert!(close(m_lower_from_k(&m, &k1).eval(0, 1), 1.0));
        assert!(close(m_lower_from_k(&m, &k6).eval(0, 1), 4.0 / 3.0));
    }

    #[test]
    fn coefficient_round_trips_on_d2() {
        let m = d2();
        let one = SymmetricFn::constant(Role::S, 1.0);
        let maj = m_upper_from_s(&m, &one);
        let min = m_lower_from_s(&m, &one);
        assert!(close(s_from_m_upper(&m, &maj).eval(0, 1), 1.0));
        assert!(close(s_from_m_lower(&m, &min).eval(0, 1), 1.0));
    }

    #[test]
    fn c_barker_matches_s_mh_value() {
        let m = d2();
        assert!(close(c_barker(&m).eval(0, 1), 1.5));
    }

    #[test]
    fn ready_made_dials_on_d2() {
        let m = d2();
        assert!(close(k_scaled_h(&m, 2.0).eval(0, 1), 8.0));
        assert!(close(k_geometric_mid(&m).eval(0, 1), 8.0f64.sqrt()));
        assert!(close(k_scaled_l(&m, 0.5).eval(0, 1), 1.0));
        assert!(close(barker_sum_k(&m).eval(0, 1), 6.0));
        assert!(close(inv_barker_sum_k(&m).eval(0, 1), 4.0 / 3.0));
        assert!(close(min_product_delta(&m).eval(0, 1), 0.5));
        assert!(close(minorizer_from_c(&m, 2.0).eval(0, 1), 1.0));
        assert!(close(majorizer_from_c(&m, 2.0).eval(0, 1), 8.0));
    }

    #[test]
    fn transforms_cover_every_source_role() {
        let m = d2();
        assert_eq!(transforms_for(&m, &s_mh(&m)).len(), 2);
        assert_eq!(
            transforms_for(&m, &SymmetricFn::constant(Role::K, 3.0)).len(),
            4
        );
        assert_eq!(transforms_for(&m, &min_product_delta(&m)).len(), 2);
        assert_eq!(transforms_for(&m, &majorizer_from_c(&m, 1.0)).len(), 1);
        assert_eq!(transforms_for(&m, &minorizer_from_c(&m, 1.0)).len(), 1);
        assert!(transforms_for(&m, &c_barker(&m)).is_empty());
    }

    #[test]
    fn mapped_rules_preserve_alpha_on_d2() {
        let m = d2();
        let sources = vec![
            s_mh(&m),
            s_special(&m),
            SymmetricFn::constant(Role::K, 3.0),
            SymmetricFn::constant(Role::K, 6.0),
            SymmetricFn::constant(Role::K, 1.0),
            min_product_delta(&m),
        ];
        for src in sources {
            let base = rule_for(src.clone()).unwrap();
            for mapped in transforms_for(&m, &src) {
                let rule = rule_for(mapped.result.clone()).unwrap();
                for (x, y) in [(0usize, 1usize), (1, 0), (0, 0), (1, 1)] {
                    let a = base.alpha(m.as_ref(), x, y).unwrap();
                    let b = rule.alpha(m.as_ref(), x, y).unwrap();
                    assert!(
                        (a - b).abs() <= 1e-12,
                        "{} -> {} at ({x},{y}): {a} vs {b}",
                        src.label(),
                        mapped.result.label()
                    );
                }
            }
        }
    }
}
