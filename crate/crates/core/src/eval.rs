//! Exact winning-probability evaluation by enumeration.
//!
//! One engine serves every strategy family: anything that can hand back a
//! joint move-rank distribution per ordered start pair is evaluated by the
//! same weighted sum over starts and outcomes. Classical product strategies,
//! entangled qubit/qutrit strategies, and role-splitting constructions all
//! plug in through [`JointOutcomeProvider`].

use crate::error::{Error, Result};
use crate::game::{resolve_round, GameConfig, SameStartRule};
use crate::graph::{Graph, Vertex};
use crate::quantum::OutcomeDistribution;

/// Source of the joint move distribution for a given ordered start pair.
///
/// Implementations must return a `d x d` distribution indexed by the two
/// players' move ranks, where `d` matches the graph degree.
pub trait JointOutcomeProvider {
    fn arity(&self) -> usize;
    fn distribution(&self, a: Vertex, b: Vertex) -> OutcomeDistribution;
}

/// Exact winning probability under uniformly random starts.
///
/// Starts are weighted `1/N^2` when shared starts are allowed (the diagonal
/// contributing exactly 1 under check-first play) and `1/(N^2 - N)` over
/// distinct pairs otherwise. Every distribution returned by the provider is
/// re-validated, so an inconsistent joint matrix surfaces as an error rather
/// than a silently skewed average.
pub fn exact_win_probability(
    g: &Graph,
    cfg: &GameConfig,
    joint: &dyn JointOutcomeProvider,
) -> Result<f64> {
    let d = g.degree();
    if joint.arity() != d {
        return Err(Error::Validation(format!(
            "strategy arity {} does not match graph degree {d}",
            joint.arity()
        )));
    }
    let n = g.vertex_count();
    let mut total = 0.0;
    for a in 1..=n {
        for b in 1..=n {
            if a == b {
                if !cfg.same_start_allowed {
                    continue;
                }
                if cfg.same_start_variant == SameStartRule::CheckFirst {
                    total += 1.0;
                    continue;
                }
            }
            let dist = joint.distribution(a, b);
            dist.validate()?;
            if dist.arity() != d {
                return Err(Error::Validation(format!(
                    "provider returned arity {} for pair ({a}, {b})",
                    dist.arity()
                )));
            }
            for ra in 0..d {
                for rb in 0..d {
                    let p = dist.prob(ra, rb);
                    if p == 0.0 {
                        continue;
                    }
                    if resolve_round(g, cfg, a, b, ra, rb)?.is_win() {
                        total += p;
                    }
                }
            }
        }
    }
    let pairs = if cfg.same_start_allowed { n * n } else { n * n - n };
    Ok(total / pairs as f64)
}

/// Provider backed by an arbitrary closure; mainly useful in tests and for
/// one-off constructions.
pub struct FnProvider<F> {
    arity: usize,
    f: F,
}

impl<F> FnProvider<F>
where
    F: Fn(Vertex, Vertex) -> OutcomeDistribution,
{
    pub fn new(arity: usize, f: F) -> Self {
        FnProvider { arity, f }
    }
}

impl<F> JointOutcomeProvider for FnProvider<F>
where
    F: Fn(Vertex, Vertex) -> OutcomeDistribution,
{
    fn arity(&self) -> usize {
        self.arity
    }

    fn distribution(&self, a: Vertex, b: Vertex) -> OutcomeDistribution {
        (self.f)(a, b)
    }
}
