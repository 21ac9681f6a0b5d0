use std::fmt;

use super::Formula;

/// Why a formula falls outside the supported fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// A temporal operator sits inside another one in a shape other than
    /// `G (a -> F b)`.
    NestedTemporal,
    /// `!` applied to a formula containing `G` or `F`.
    NegatedTemporal,
    /// The antecedent of `->` contains `G` or `F`.
    TemporalAntecedent,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("formula outside the supported fragment at `{subformula}`: {kind}")]
pub struct FragmentViolation {
    pub subformula: Formula,
    pub kind: ViolationKind,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::NestedTemporal => {
                "temporal operator nested under another temporal operator"
            }
            ViolationKind::NegatedTemporal => "negation of a temporal subformula",
            ViolationKind::TemporalAntecedent => {
                "temporal operator in the antecedent of an implication"
            }
        })
    }
}

/// Accepts boolean combinations of temporal-free formulas, `G a`, `F a` and
/// `G (a -> F b)` where `a` and `b` are temporal-free. Negation and implication
/// antecedents must be temporal-free.
pub fn fragment_check(f: &Formula) -> Result<(), FragmentViolation> {
    if f.is_temporal_free() {
        return Ok(());
    }
    match f {
        Formula::Atom(_) => Ok(()),
        Formula::And(a, b) | Formula::Or(a, b) => {
            fragment_check(a)?;
            fragment_check(b)
        }
        Formula::Implies(a, b) => {
            if !a.is_temporal_free() {
                return Err(violation(
                    innermost_temporal(a),
                    ViolationKind::TemporalAntecedent,
                ));
            }
            fragment_check(b)
        }
        Formula::Not(a) => Err(violation(
            innermost_temporal(a),
            ViolationKind::NegatedTemporal,
        )),
        Formula::Eventually(body) => temporal_free_body(body),
        Formula::Always(body) => match &**body {
            Formula::Implies(trigger, response) => match &**response {
                Formula::Eventually(target) if trigger.is_temporal_free() => {
                    temporal_free_body(target)
                }
                _ => {
                    temporal_free_body(trigger)?;
                    temporal_free_body(response)
                }
            },
            _ => temporal_free_body(body),
        },
    }
}

fn temporal_free_body(body: &Formula) -> Result<(), FragmentViolation> {
    if body.is_temporal_free() {
        Ok(())
    } else {
        Err(violation(
            innermost_temporal(body),
            ViolationKind::NestedTemporal,
        ))
    }
}

fn violation(subformula: &Formula, kind: ViolationKind) -> FragmentViolation {
    FragmentViolation {
        subformula: subformula.clone(),
        kind,
    }
}

// Follows the leftmost chain of temporal operators down to the deepest one.
fn innermost_temporal(f: &Formula) -> &Formula {
    let Some(first) = first_temporal(f) else {
        return f;
    };
    match first {
        Formula::Always(body) | Formula::Eventually(body) if !body.is_temporal_free() => {
            innermost_temporal(body)
        }
        _ => first,
    }
}

fn first_temporal(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::Atom(_) => None,
        Formula::Always(_) | Formula::Eventually(_) => Some(f),
        Formula::Not(a) => first_temporal(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            first_temporal(a).or_else(|| first_temporal(b))
        }
    }
}
