//! Entanglement-assisted strategies: per-site measurement angles, their
//! closed-form winning probabilities on cycles, the optimal-angle search,
//! large-cycle asymptotics, non-signalling ceilings, and the role-splitting
//! construction from shared anticorrelated bits.

use std::f64::consts::{FRAC_PI_2, PI};

use serde_json::{json, Value};

use crate::classical::{ClassicalPair, ClassicalStrategy};
use crate::error::{Error, Result};
use crate::eval::{exact_win_probability, JointOutcomeProvider};
use crate::game::{GameConfig, SameStartRule};
use crate::graph::{Graph, Vertex};
use crate::quantum::{
    outcome_matrix_qubit, outcome_matrix_qutrit, EulerAngles, OutcomeDistribution,
};

/// One measurement angle per site for the shared-qubit-pair strategy on a
/// degree-2 graph.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitStrategy {
    pub thetas: Vec<f64>,
}

impl QubitStrategy {
    pub fn new(thetas: Vec<f64>) -> Self {
        QubitStrategy { thetas }
    }

    /// Linear angle ramp with a half-turn offset at the two wraparound sites:
    /// `theta_j = (j - 1) * theta`, plus `pi` at sites 1 and n. The offset
    /// undoes the labelling artifact that otherwise makes those sites special.
    pub fn cycle_ansatz(n: usize, theta: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSize(format!(
                "cycle strategies need n >= 3, got {n}"
            )));
        }
        let thetas = (1..=n)
            .map(|j| {
                let mut t = (j - 1) as f64 * theta;
                if j == 1 || j == n {
                    t += PI;
                }
                t
            })
            .collect();
        Ok(QubitStrategy { thetas })
    }

    /// The plain ramp without endpoint offsets. Kept as a negative control:
    /// its best winning probability sits strictly below the offset ansatz
    /// optimum on odd cycles of five or more sites.
    pub fn cycle_ramp_no_offset(n: usize, theta: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSize(format!(
                "cycle strategies need n >= 3, got {n}"
            )));
        }
        Ok(QubitStrategy {
            thetas: (1..=n).map(|j| (j - 1) as f64 * theta).collect(),
        })
    }

    /// The optimal triangle angles 0, pi/3, 2*pi/3.
    pub fn k3_optimal() -> Self {
        QubitStrategy {
            thetas: vec![0.0, PI / 3.0, 2.0 * PI / 3.0],
        }
    }

    pub fn site_count(&self) -> usize {
        self.thetas.len()
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        if g.degree() != 2 {
            return Err(Error::Validation(
                "qubit strategies require a degree-2 graph".into(),
            ));
        }
        if self.thetas.len() != g.vertex_count() {
            return Err(Error::Validation(format!(
                "strategy covers {} sites but the graph has {}",
                self.thetas.len(),
                g.vertex_count()
            )));
        }
        if self.thetas.iter().any(|t| !t.is_finite()) {
            return Err(Error::Validation("non-finite angle".into()));
        }
        Ok(())
    }
}

impl JointOutcomeProvider for QubitStrategy {
    fn arity(&self) -> usize {
        2
    }

    fn distribution(&self, a: Vertex, b: Vertex) -> OutcomeDistribution {
        outcome_matrix_qubit(self.thetas[a - 1], self.thetas[b - 1])
    }
}

/// One Euler-angle triple per site for the shared-qutrit-pair strategy on a
/// cubic graph, optionally with groups of sites tied to a single triple.
#[derive(Debug, Clone, PartialEq)]
pub struct QutritStrategy {
    site_angles: Vec<EulerAngles>,
    tie_groups: Option<Vec<Vec<Vertex>>>,
}

impl QutritStrategy {
    pub fn per_site(site_angles: Vec<EulerAngles>) -> Self {
        QutritStrategy {
            site_angles,
            tie_groups: None,
        }
    }

    /// Builds a strategy where every site in `groups[k]` shares `triples[k]`.
    /// The groups must partition `1..=n` for some n.
    pub fn tied(groups: Vec<Vec<Vertex>>, triples: Vec<EulerAngles>) -> Result<Self> {
        if groups.len() != triples.len() {
            return Err(Error::Validation(format!(
                "{} tie groups but {} angle triples",
                groups.len(),
                triples.len()
            )));
        }
        let n: usize = groups.iter().map(Vec::len).sum();
        let mut site_angles = vec![None; n];
        for (group, triple) in groups.iter().zip(&triples) {
            for &v in group {
                if v < 1 || v > n {
                    return Err(Error::Validation(format!(
                        "tied site {v} outside 1..={n}"
                    )));
                }
                if site_angles[v - 1].is_some() {
                    return Err(Error::Validation(format!("site {v} tied twice")));
                }
                site_angles[v - 1] = Some(*triple);
            }
        }
        Ok(QutritStrategy {
            site_angles: site_angles.into_iter().map(Option::unwrap).collect(),
            tie_groups: Some(groups),
        })
    }

    /// A rotation assignment achieving the optimal winning probability on the
    /// tetrahedron (0.645 with shared starts, check-later, no edge meetings).
    /// One of many degenerate optima.
    pub fn k4_optimal() -> Self {
        QutritStrategy::per_site(k4_optimal_triples().to_vec())
    }

    /// The tetrahedron optimum replayed on both components of `2K4`:
    /// corresponding sites of the two tetrahedra share each triple.
    pub fn k4_optimal_on_2k4() -> Self {
        let triples = k4_optimal_triples();
        let groups: Vec<Vec<Vertex>> = (0..4).map(|k| vec![2 * k + 1, 2 * k + 2]).collect();
        QutritStrategy::tied(groups, triples.to_vec()).expect("static construction")
    }

    pub fn site_count(&self) -> usize {
        self.site_angles.len()
    }

    pub fn angles(&self, v: Vertex) -> &EulerAngles {
        &self.site_angles[v - 1]
    }

    pub fn site_angles(&self) -> &[EulerAngles] {
        &self.site_angles
    }

    pub fn tie_groups(&self) -> Option<&[Vec<Vertex>]> {
        self.tie_groups.as_deref()
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        if g.degree() != 3 {
            return Err(Error::Validation(
                "qutrit strategies require a degree-3 graph".into(),
            ));
        }
        if self.site_angles.len() != g.vertex_count() {
            return Err(Error::Validation(format!(
                "strategy covers {} sites but the graph has {}",
                self.site_angles.len(),
                g.vertex_count()
            )));
        }
        for (i, a) in self.site_angles.iter().enumerate() {
            if ![a.alpha, a.beta, a.gamma].iter().all(|x| x.is_finite()) {
                return Err(Error::Validation(format!(
                    "non-finite angles at site {}",
                    i + 1
                )));
            }
        }
        if let Some(groups) = &self.tie_groups {
            for group in groups {
                let first = self.site_angles[group[0] - 1];
                for &v in group {
                    if self.site_angles[v - 1] != first {
                        return Err(Error::Validation(format!(
                            "tied site {v} does not share its group's angles"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

// four-decimal reference values, quoted as-is
#[allow(clippy::approx_constant)]
fn k4_optimal_triples() -> [EulerAngles; 4] {
    [
        EulerAngles::new(4.0841, 2.4784, 1.5708),
        EulerAngles::new(0.4538, 3.2638, 4.9393),
        EulerAngles::new(0.4538, 2.7925, 4.4244),
        EulerAngles::new(0.0262, 3.0543, 0.7069),
    ]
}

impl JointOutcomeProvider for QutritStrategy {
    fn arity(&self) -> usize {
        3
    }

    fn distribution(&self, a: Vertex, b: Vertex) -> OutcomeDistribution {
        outcome_matrix_qutrit(&self.site_angles[a - 1], &self.site_angles[b - 1])
    }
}

/// Any per-site strategy the toolkit can evaluate or simulate.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Classical(ClassicalStrategy),
    Qubit(QubitStrategy),
    Qutrit(QutritStrategy),
}

impl Strategy {
    pub fn validate(&self, g: &Graph) -> Result<()> {
        match self {
            Strategy::Classical(s) => s.validate(g),
            Strategy::Qubit(s) => s.validate(g),
            Strategy::Qutrit(s) => s.validate(g),
        }
    }

    /// Exact winning probability with both players following this strategy.
    pub fn exact_win_probability(&self, g: &Graph, cfg: &GameConfig) -> Result<f64> {
        self.validate(g)?;
        match self {
            Strategy::Classical(s) => {
                let pair = ClassicalPair::symmetric(g, s)?;
                exact_win_probability(g, cfg, &pair)
            }
            Strategy::Qubit(s) => exact_win_probability(g, cfg, s),
            Strategy::Qutrit(s) => exact_win_probability(g, cfg, s),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Strategy::Classical(s) => s.to_json(),
            Strategy::Qubit(s) => json!({ "kind": "qubit", "thetas": s.thetas }),
            Strategy::Qutrit(s) => {
                let angles: Vec<[f64; 3]> = s
                    .site_angles
                    .iter()
                    .map(|a| {
                        let c = a.canonical();
                        [c.alpha, c.beta, c.gamma]
                    })
                    .collect();
                match &s.tie_groups {
                    Some(groups) => json!({
                        "kind": "qutrit",
                        "angles": angles,
                        "tie_groups": groups,
                    }),
                    None => json!({ "kind": "qutrit", "angles": angles }),
                }
            }
        }
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let kind = value
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Validation("strategy JSON needs a `kind` field".into()))?;
        match kind {
            "deterministic" | "randomized" => {
                Ok(Strategy::Classical(ClassicalStrategy::from_json(value)?))
            }
            "qubit" => {
                let thetas = value
                    .get("thetas")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Validation("missing `thetas` array".into()))?
                    .iter()
                    .map(|v| {
                        v.as_f64()
                            .ok_or_else(|| Error::Validation("angle must be a number".into()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Strategy::Qubit(QubitStrategy::new(thetas)))
            }
            "qutrit" => {
                let angles = value
                    .get("angles")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Validation("missing `angles` array".into()))?
                    .iter()
                    .map(|row| {
                        let row = row
                            .as_array()
                            .filter(|r| r.len() == 3)
                            .ok_or_else(|| {
                                Error::Validation("each site needs [alpha, beta, gamma]".into())
                            })?;
                        let get = |i: usize| {
                            row[i].as_f64().ok_or_else(|| {
                                Error::Validation("angle must be a number".into())
                            })
                        };
                        Ok(EulerAngles::new(get(0)?, get(1)?, get(2)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut strategy = QutritStrategy::per_site(angles);
                if let Some(groups) = value.get("tie_groups").and_then(Value::as_array) {
                    let groups = groups
                        .iter()
                        .map(|g| {
                            g.as_array()
                                .map(|sites| {
                                    sites
                                        .iter()
                                        .filter_map(Value::as_u64)
                                        .map(|v| v as usize)
                                        .collect::<Vec<_>>()
                                })
                                .ok_or_else(|| {
                                    Error::Validation("tie group must be an array".into())
                                })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    strategy.tie_groups = Some(groups);
                }
                Ok(Strategy::Qutrit(strategy))
            }
            other => Err(Error::Validation(format!(
                "unknown strategy kind `{other}`"
            ))),
        }
    }
}

/// Closed-form winning probability of the offset-ramp strategy on the
/// `n`-cycle at angle increment `theta`, with shared starts allowed (the two
/// same-start conventions coincide for this strategy family).
pub fn closed_form_cycle_quantum(n: usize, theta: f64, meet_on_edges: bool) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidSize(format!(
            "cycle closed forms need n >= 3, got {n}"
        )));
    }
    let nf = n as f64;
    let s = |x: f64| x.sin() * x.sin();
    let mut v = nf + (nf - 2.0) * s(theta) + 2.0 * s((nf - 2.0) / 2.0 * theta);
    if meet_on_edges {
        v += s((nf - 1.0) / 2.0 * theta) + (nf - 1.0) * s(theta / 2.0);
    }
    Ok(v / (nf * nf))
}

/// Result of the optimal-angle search on a cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaOptimum {
    /// Smallest maximizing angle in `[0, pi]`, radians.
    pub theta_max: f64,
    pub p_max: f64,
    /// Every global maximizer (ascending), for graphs with degenerate optima.
    pub all_maxima: Vec<f64>,
}

/// Globally maximizes the closed-form winning probability over
/// `theta in [0, pi]` (the objective is symmetric about pi) by dense scan
/// plus golden-section refinement. Maximizers within 1e-9 of the best value
/// are all reported.
pub fn optimal_theta(n: usize, meet_on_edges: bool) -> Result<ThetaOptimum> {
    if n < 3 {
        return Err(Error::InvalidSize(format!(
            "optimal angle search needs n >= 3, got {n}"
        )));
    }
    let f = |theta: f64| closed_form_cycle_quantum(n, theta, meet_on_edges).unwrap();
    const POINTS: usize = 10_001;
    let step = PI / (POINTS - 1) as f64;
    let vals: Vec<f64> = (0..POINTS).map(|i| f(i as f64 * step)).collect();

    // refine every interior local maximum plus the two endpoints
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    for i in 0..POINTS {
        let here = vals[i];
        let left_ok = i == 0 || vals[i - 1] <= here;
        let right_ok = i == POINTS - 1 || vals[i + 1] <= here;
        if left_ok && right_ok {
            let lo = if i == 0 { 0.0 } else { (i - 1) as f64 * step };
            let hi = if i == POINTS - 1 {
                PI
            } else {
                (i + 1) as f64 * step
            };
            candidates.push(golden_section_max(&f, lo, hi));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    // merge refinements that converged to the same angle
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (theta, p) in candidates {
        match merged.last_mut() {
            Some((t, best)) if (theta - *t).abs() < 1e-6 => {
                if p > *best {
                    *t = theta;
                    *best = p;
                }
            }
            _ => merged.push((theta, p)),
        }
    }
    let p_max = merged
        .iter()
        .map(|&(_, p)| p)
        .fold(f64::NEG_INFINITY, f64::max);
    let all_maxima: Vec<f64> = merged
        .iter()
        .filter(|&&(_, p)| p_max - p <= 1e-9)
        .map(|&(t, _)| t)
        .collect();
    Ok(ThetaOptimum {
        theta_max: all_maxima[0],
        p_max,
        all_maxima,
    })
}

fn golden_section_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > 1e-12 {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// Large-cycle behavior of the optimal offset-ramp strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleAsymptote {
    /// Limit of `n * P_max` as the cycle grows.
    pub n_p_limit: f64,
    /// Maximizing angle increment in the large-cycle limit, radians.
    pub theta_limit: f64,
}

pub fn cycle_asymptote(meet_on_edges: bool) -> CycleAsymptote {
    if meet_on_edges {
        CycleAsymptote {
            n_p_limit: 41.0 / 16.0,
            theta_limit: (-0.25f64).acos(),
        }
    } else {
        CycleAsymptote {
            n_p_limit: 2.0,
            theta_limit: FRAC_PI_2,
        }
    }
}

/// Winning-probability ceiling on the `n`-cycle under general non-signalling
/// correlations: `2/n` without edge meetings, `3/n` with them.
pub fn nst_bound(n: usize, meet_on_edges: bool) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidSize(format!(
            "the bound requires n >= 3, got {n}"
        )));
    }
    Ok(if meet_on_edges { 3.0 } else { 2.0 } / n as f64)
}

/// An integer pair certifying that the two-qubit strategy reaches the
/// non-signalling ceiling, together with the maximizing angle it implies.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct NstWitness {
    pub nu: u32,
    pub mu: u32,
    /// `(2 nu + 1) * pi / 2`, radians.
    pub theta_max: f64,
}

/// Searches small integers `nu, mu <= 100` for the ceiling-attainability
/// condition `(n - 2) / 2 = (2 mu + 1) / (2 nu + 1)` (no edge meetings).
/// At any witness, the angle `(2 nu + 1) * pi / 2` drives every winning term
/// of the closed form to its maximum simultaneously.
pub fn nst_attainable(n: usize) -> Result<(bool, Vec<NstWitness>)> {
    if n < 3 {
        return Err(Error::InvalidSize(format!(
            "attainability needs n >= 3, got {n}"
        )));
    }
    const CAP: u32 = 100;
    let mut witnesses = Vec::new();
    for nu in 0..=CAP {
        for mu in 0..=CAP {
            if (n as u64 - 2) * (2 * nu as u64 + 1) == 2 * (2 * mu as u64 + 1) {
                witnesses.push(NstWitness {
                    nu,
                    mu,
                    theta_max: (2.0 * nu as f64 + 1.0) * FRAC_PI_2,
                });
            }
        }
    }
    Ok((!witnesses.is_empty(), witnesses))
}

/// The role-splitting strategy on the triangle with distinct starts: a shared
/// anticorrelated bit pair assigns one player the forward direction around
/// the ring and the other the backward direction, while keeping the strategy
/// player-symmetric.
pub struct RoleSplitC3;

/// Step forward around the triangle (1 -> 2 -> 3 -> 1).
fn c3_forward(v: Vertex) -> Vertex {
    v % 3 + 1
}

/// Step backward around the triangle.
fn c3_backward(v: Vertex) -> Vertex {
    (v + 1) % 3 + 1
}

/// Rank of destination `w` among the sorted neighbors of `v` on the triangle.
fn c3_rank(v: Vertex, w: Vertex) -> usize {
    let others = match v {
        1 => [2, 3],
        2 => [1, 3],
        _ => [1, 2],
    };
    if others[0] == w {
        0
    } else {
        1
    }
}

impl JointOutcomeProvider for RoleSplitC3 {
    fn arity(&self) -> usize {
        2
    }

    fn distribution(&self, a: Vertex, b: Vertex) -> OutcomeDistribution {
        let mut probs = vec![0.0; 4];
        // the shared bits are always opposite, each assignment with weight 1/2
        for (role_a, role_b) in [(0usize, 1usize), (1, 0)] {
            let dest_a = if role_a == 0 { c3_forward(a) } else { c3_backward(a) };
            let dest_b = if role_b == 0 { c3_forward(b) } else { c3_backward(b) };
            probs[c3_rank(a, dest_a) * 2 + c3_rank(b, dest_b)] += 0.5;
        }
        OutcomeDistribution::new(2, probs).expect("role split distribution")
    }
}

/// Evaluation of the role-splitting strategy on the triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedRandomnessReport {
    pub description: String,
    pub win_probability: f64,
}

/// Evaluates the role-splitting strategy exactly: triangle, distinct starts,
/// no edge meetings.
pub fn shared_randomness_strategy_c3() -> SharedRandomnessReport {
    let g = Graph::cycle(3).expect("triangle");
    let cfg = GameConfig::new(false, false, SameStartRule::CheckLater);
    let win_probability =
        exact_win_probability(&g, &cfg, &RoleSplitC3).expect("static evaluation");
    SharedRandomnessReport {
        description: "shared anticorrelated bit assigns forward/backward roles on the triangle"
            .into(),
        win_probability,
    }
}
