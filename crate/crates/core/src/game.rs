//! Game variant flags, single-round adjudication, and the probability
//! conversion between the two same-start conventions.
//!
//! A round is: both players start on (uniformly random) vertices, each makes
//! exactly one move along an edge, and the game is won if they end on the
//! same vertex. Two boolean flags select the variant: whether exact
//! transposition along a shared edge also counts as meeting, and whether the
//! random starts may coincide. When they may coincide, play either checks
//! co-location before moving (an automatic win) or only after.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// How a shared starting vertex is handled when such starts are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SameStartRule {
    /// Players notice they are co-located before moving and win outright.
    CheckFirst,
    /// Players move first and must still end co-located.
    CheckLater,
}

/// Variant flags for a one-step, two-player rendezvous game.
///
/// Waiting in place is never a legal move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    /// Whether swapping positions along a shared edge counts as meeting.
    pub meet_on_edges: bool,
    /// Whether the uniform random starts include identical vertices.
    pub same_start_allowed: bool,
    /// Same-start handling; ignored when `same_start_allowed` is false.
    pub same_start_variant: SameStartRule,
}

impl GameConfig {
    pub fn new(meet_on_edges: bool, same_start_allowed: bool, variant: SameStartRule) -> Self {
        GameConfig {
            meet_on_edges,
            same_start_allowed,
            same_start_variant: variant,
        }
    }

    /// Flat key-value record, e.g. `e=0,s=1,variant=later`.
    pub fn to_record(&self) -> String {
        format!(
            "e={},s={},variant={}",
            self.meet_on_edges as u8,
            self.same_start_allowed as u8,
            match self.same_start_variant {
                SameStartRule::CheckFirst => "first",
                SameStartRule::CheckLater => "later",
            }
        )
    }

    /// Parses the record format produced by [`GameConfig::to_record`].
    pub fn from_record(s: &str) -> Result<Self> {
        let mut e = None;
        let mut start = None;
        let mut variant = SameStartRule::CheckLater;
        for part in s.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, value) = part.split_once('=').ok_or_else(|| {
                Error::Validation(format!("bad config field `{part}`, expected key=value"))
            })?;
            match (key.trim(), value.trim()) {
                ("e", "0") => e = Some(false),
                ("e", "1") => e = Some(true),
                ("s", "0") => start = Some(false),
                ("s", "1") => start = Some(true),
                ("variant", "first") => variant = SameStartRule::CheckFirst,
                ("variant", "later") => variant = SameStartRule::CheckLater,
                (k, v) => {
                    return Err(Error::Validation(format!(
                        "bad config field `{k}={v}`"
                    )))
                }
            }
        }
        match (e, start) {
            (Some(e), Some(s)) => Ok(GameConfig::new(e, s, variant)),
            _ => Err(Error::Validation(
                "config record needs both e= and s= fields".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GameResult {
    Win,
    Loss,
}

/// Outcome of one adjudicated round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundOutcome {
    pub result: GameResult,
    pub final_a: Vertex,
    pub final_b: Vertex,
    /// True when the win came from an exact transposition along an edge.
    pub met_on_edge: bool,
}

impl RoundOutcome {
    pub fn is_win(&self) -> bool {
        self.result == GameResult::Win
    }
}

/// Adjudicates one round: players at `a` and `b` move along the edges named
/// by `move_a` and `move_b` (neighbor ranks).
///
/// With check-first semantics a shared start wins immediately and no move is
/// consumed; the reported final positions are then the starts themselves.
pub fn resolve_round(
    g: &Graph,
    cfg: &GameConfig,
    a: Vertex,
    b: Vertex,
    move_a: usize,
    move_b: usize,
) -> Result<RoundOutcome> {
    if !g.contains(a) {
        return Err(Error::InvalidVertex(a));
    }
    if !g.contains(b) {
        return Err(Error::InvalidVertex(b));
    }
    if a == b {
        if !cfg.same_start_allowed {
            return Err(Error::InvalidStart(a));
        }
        if cfg.same_start_variant == SameStartRule::CheckFirst {
            return Ok(RoundOutcome {
                result: GameResult::Win,
                final_a: a,
                final_b: b,
                met_on_edge: false,
            });
        }
    }
    let final_a = g.ranked_neighbor(a, move_a)?;
    let final_b = g.ranked_neighbor(b, move_b)?;
    let met_on_edge = cfg.meet_on_edges && a != b && final_a == b && final_b == a;
    let win = final_a == final_b || met_on_edge;
    Ok(RoundOutcome {
        result: if win { GameResult::Win } else { GameResult::Loss },
        final_a,
        final_b,
        met_on_edge,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConversionDirection {
    /// From the all-starts average to the distinct-starts average.
    S1ToS0,
    /// From the distinct-starts average to the all-starts average.
    S0ToS1,
}

/// Converts a winning probability between the two start conventions on an
/// `n`-vertex graph.
///
/// The relation assumes check-first semantics, where a shared start is an
/// automatic win: `p_all = ((n-1) * p_distinct + 1) / n` and its inverse.
/// Calling it on check-later data is permitted but is a documented misuse,
/// since the identity does not hold there.
pub fn convert_win_probability(p: f64, n: usize, direction: ConversionDirection) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("probability {p} outside [0, 1]")));
    }
    if n < 2 {
        return Err(Error::InvalidSize(format!(
            "conversion needs at least 2 vertices, got {n}"
        )));
    }
    let nf = n as f64;
    match direction {
        ConversionDirection::S0ToS1 => Ok(((nf - 1.0) * p + 1.0) / nf),
        ConversionDirection::S1ToS0 => {
            let wins = nf * p - 1.0;
            // p below 1/n implies a negative count of distinct-start wins.
            if wins < -1e-12 {
                return Err(Error::OutOfRange(format!(
                    "probability {p} below 1/{n}; inconsistent with an automatic win on shared starts"
                )));
            }
            Ok((wins / (nf - 1.0)).clamp(0.0, 1.0))
        }
    }
}
