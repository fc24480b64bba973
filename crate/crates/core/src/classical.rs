//! Classical per-site strategies and their exact winning probabilities.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::eval::JointOutcomeProvider;
use crate::graph::{Graph, Vertex};
use crate::quantum::OutcomeDistribution;

/// A classical per-site strategy: either a fixed move rank per site or an
/// independent probability vector over move ranks per site.
///
/// Site `v` is stored at index `v - 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalStrategy {
    Deterministic { moves: Vec<usize> },
    Randomized { dist: Vec<Vec<f64>> },
}

impl ClassicalStrategy {
    /// Always move to the lowest-labelled neighbor (rank 0 everywhere).
    pub fn go_to_lowest(g: &Graph) -> Self {
        ClassicalStrategy::Deterministic {
            moves: vec![0; g.vertex_count()],
        }
    }

    /// Always move to the highest-labelled neighbor.
    pub fn go_to_highest(g: &Graph) -> Self {
        ClassicalStrategy::Deterministic {
            moves: vec![g.degree() - 1; g.vertex_count()],
        }
    }

    /// Independent fair d-sided coin at every site.
    pub fn uniform_random(g: &Graph) -> Self {
        let d = g.degree();
        ClassicalStrategy::Randomized {
            dist: vec![vec![1.0 / d as f64; d]; g.vertex_count()],
        }
    }

    pub fn site_count(&self) -> usize {
        match self {
            ClassicalStrategy::Deterministic { moves } => moves.len(),
            ClassicalStrategy::Randomized { dist } => dist.len(),
        }
    }

    /// Checks the strategy against a graph: one entry per site, ranks within
    /// degree, probability rows non-negative and summing to 1.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let n = g.vertex_count();
        let d = g.degree();
        if self.site_count() != n {
            return Err(Error::Validation(format!(
                "strategy covers {} sites but the graph has {n}",
                self.site_count()
            )));
        }
        match self {
            ClassicalStrategy::Deterministic { moves } => {
                for (i, &rank) in moves.iter().enumerate() {
                    if rank >= d {
                        return Err(Error::Arity { rank, degree: d });
                    }
                    let _ = i;
                }
            }
            ClassicalStrategy::Randomized { dist } => {
                for (i, row) in dist.iter().enumerate() {
                    if row.len() != d {
                        return Err(Error::Validation(format!(
                            "site {} has {} move probabilities, expected {d}",
                            i + 1,
                            row.len()
                        )));
                    }
                    let mut total = 0.0;
                    for &p in row {
                        if p < 0.0 {
                            return Err(Error::Validation(format!(
                                "negative move probability {p} at site {}",
                                i + 1
                            )));
                        }
                        total += p;
                    }
                    if (total - 1.0).abs() > 1e-12 {
                        return Err(Error::Validation(format!(
                            "move probabilities at site {} sum to {total}",
                            i + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Move-rank distribution at site `v` as a length-`d` probability row.
    pub fn move_distribution(&self, v: Vertex, d: usize) -> Vec<f64> {
        match self {
            ClassicalStrategy::Deterministic { moves } => {
                let mut row = vec![0.0; d];
                row[moves[v - 1]] = 1.0;
                row
            }
            ClassicalStrategy::Randomized { dist } => dist[v - 1].clone(),
        }
    }

    /// Deterministic move rank at `v`, if the strategy is deterministic.
    pub fn fixed_move(&self, v: Vertex) -> Option<usize> {
        match self {
            ClassicalStrategy::Deterministic { moves } => Some(moves[v - 1]),
            ClassicalStrategy::Randomized { .. } => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            ClassicalStrategy::Deterministic { moves } => {
                let mut map = Map::new();
                for (i, &rank) in moves.iter().enumerate() {
                    map.insert((i + 1).to_string(), json!(rank));
                }
                json!({ "kind": "deterministic", "moves": Value::Object(map) })
            }
            ClassicalStrategy::Randomized { dist } => {
                let mut map = Map::new();
                for (i, row) in dist.iter().enumerate() {
                    map.insert((i + 1).to_string(), json!(row));
                }
                json!({ "kind": "randomized", "dist": Value::Object(map) })
            }
        }
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let kind = value
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Validation("strategy JSON needs a `kind` field".into()))?;
        match kind {
            "deterministic" => {
                let map = value
                    .get("moves")
                    .and_then(Value::as_object)
                    .ok_or_else(|| Error::Validation("missing `moves` object".into()))?;
                let moves = sites_from_map(map, |v| {
                    v.as_u64()
                        .map(|r| r as usize)
                        .ok_or_else(|| Error::Validation("move rank must be an integer".into()))
                })?;
                Ok(ClassicalStrategy::Deterministic { moves })
            }
            "randomized" => {
                let map = value
                    .get("dist")
                    .and_then(Value::as_object)
                    .ok_or_else(|| Error::Validation("missing `dist` object".into()))?;
                let dist = sites_from_map(map, |v| {
                    v.as_array()
                        .map(|row| row.iter().filter_map(Value::as_f64).collect::<Vec<_>>())
                        .ok_or_else(|| Error::Validation("move row must be an array".into()))
                })?;
                Ok(ClassicalStrategy::Randomized { dist })
            }
            other => Err(Error::Validation(format!(
                "unknown classical strategy kind `{other}`"
            ))),
        }
    }
}

/// Converts a `{"1": x, "2": y, ...}` map into a dense per-site vector,
/// requiring every label 1..=N to appear exactly once.
fn sites_from_map<T, F>(map: &Map<String, Value>, parse: F) -> Result<Vec<T>>
where
    F: Fn(&Value) -> Result<T>,
{
    let n = map.len();
    let mut out: Vec<Option<T>> = (0..n).map(|_| None).collect();
    for (key, value) in map {
        let label: usize = key
            .parse()
            .map_err(|_| Error::Validation(format!("bad site label `{key}`")))?;
        if label < 1 || label > n {
            return Err(Error::Validation(format!(
                "site label {label} outside 1..={n}"
            )));
        }
        if out[label - 1].is_some() {
            return Err(Error::Validation(format!("site {label} listed twice")));
        }
        out[label - 1] = Some(parse(value)?);
    }
    Ok(out.into_iter().map(Option::unwrap).collect())
}

/// Joint provider for a (possibly player-asymmetric) pair of classical
/// strategies: the joint distribution is the outer product of the two
/// players' independent move rows.
pub struct ClassicalPair<'a> {
    alice: &'a ClassicalStrategy,
    bob: &'a ClassicalStrategy,
    d: usize,
}

impl<'a> ClassicalPair<'a> {
    pub fn new(g: &Graph, alice: &'a ClassicalStrategy, bob: &'a ClassicalStrategy) -> Result<Self> {
        alice.validate(g)?;
        bob.validate(g)?;
        Ok(ClassicalPair {
            alice,
            bob,
            d: g.degree(),
        })
    }

    pub fn symmetric(g: &Graph, s: &'a ClassicalStrategy) -> Result<Self> {
        Self::new(g, s, s)
    }
}

impl JointOutcomeProvider for ClassicalPair<'_> {
    fn arity(&self) -> usize {
        self.d
    }

    fn distribution(&self, a: Vertex, b: Vertex) -> OutcomeDistribution {
        let row_a = self.alice.move_distribution(a, self.d);
        let row_b = self.bob.move_distribution(b, self.d);
        let mut probs = Vec::with_capacity(self.d * self.d);
        for &pa in &row_a {
            for &pb in &row_b {
                probs.push(pa * pb);
            }
        }
        OutcomeDistribution::new(self.d, probs).expect("product of probability rows")
    }
}

/// Cycle-graph strategy whose closed-form winning probability is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleClassicalVariant {
    /// Both players move to the lowest-labelled neighbor.
    GoToLowest,
    /// Independent fair coins, co-location checked only after moving.
    RandomCheckLater,
    /// Independent fair coins, shared starts win before moving.
    RandomCheckFirst,
}

/// Closed-form winning probability of the named classical strategy on the
/// `n`-cycle with shared starts allowed and no edge meetings.
///
/// Go-to-lowest scores `(n + 4) / n^2` for `n >= 4` and `5/9` on the
/// triangle, independent of the same-start convention. The coin strategies
/// score `1/n` (check-later) and `3/(2n)` (check-first).
pub fn closed_form_cycle_classical(n: usize, variant: CycleClassicalVariant) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidSize(format!(
            "cycle closed forms need n >= 3, got {n}"
        )));
    }
    let nf = n as f64;
    Ok(match variant {
        CycleClassicalVariant::GoToLowest => {
            if n == 3 {
                5.0 / 9.0
            } else {
                (nf + 4.0) / (nf * nf)
            }
        }
        CycleClassicalVariant::RandomCheckLater => 1.0 / nf,
        CycleClassicalVariant::RandomCheckFirst => 1.5 / nf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::exact_win_probability;
    use crate::game::{GameConfig, SameStartRule};

    fn later(e: bool) -> GameConfig {
        GameConfig::new(e, true, SameStartRule::CheckLater)
    }

    fn first(e: bool) -> GameConfig {
        GameConfig::new(e, true, SameStartRule::CheckFirst)
    }

    fn eval_symmetric(g: &Graph, cfg: &GameConfig, s: &ClassicalStrategy) -> f64 {
        let pair = ClassicalPair::symmetric(g, s).unwrap();
        exact_win_probability(g, cfg, &pair).unwrap()
    }

    #[test]
    fn go_to_lowest_destinations() {
        let c3 = Graph::cycle(3).unwrap();
        let s = ClassicalStrategy::go_to_lowest(&c3);
        let dest: Vec<_> = c3
            .vertices()
            .map(|v| c3.ranked_neighbor(v, s.fixed_move(v).unwrap()).unwrap())
            .collect();
        assert_eq!(dest, vec![2, 1, 1]);

        let c5 = Graph::cycle(5).unwrap();
        let s5 = ClassicalStrategy::go_to_lowest(&c5);
        let dest5: Vec<_> = c5
            .vertices()
            .map(|v| c5.ranked_neighbor(v, s5.fixed_move(v).unwrap()).unwrap())
            .collect();
        assert_eq!(dest5, vec![2, 1, 2, 3, 1]);

        let k4 = Graph::named_cubic("K4").unwrap();
        let sk = ClassicalStrategy::go_to_lowest(&k4);
        for v in k4.vertices() {
            assert_eq!(
                k4.ranked_neighbor(v, sk.fixed_move(v).unwrap()).unwrap(),
                k4.neighbors(v)[0]
            );
        }
    }

    #[test]
    fn uniform_random_rows() {
        let c3 = Graph::cycle(3).unwrap();
        match ClassicalStrategy::uniform_random(&c3) {
            ClassicalStrategy::Randomized { dist } => {
                assert_eq!(dist, vec![vec![0.5, 0.5]; 3]);
            }
            _ => panic!("expected randomized"),
        }
        let k4 = Graph::named_cubic("K4").unwrap();
        match ClassicalStrategy::uniform_random(&k4) {
            ClassicalStrategy::Randomized { dist } => {
                assert_eq!(dist.len(), 4);
                for row in dist {
                    assert_eq!(row.len(), 3);
                    assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-15);
                }
            }
            _ => panic!("expected randomized"),
        }
    }

    #[test]
    fn triangle_go_to_lowest_is_five_ninths() {
        let g = Graph::cycle(3).unwrap();
        let s = ClassicalStrategy::go_to_lowest(&g);
        assert_eq!(eval_symmetric(&g, &later(false), &s), 5.0 / 9.0);
        assert_eq!(eval_symmetric(&g, &first(false), &s), 5.0 / 9.0);
    }

    #[test]
    fn triangle_fair_coins() {
        let g = Graph::cycle(3).unwrap();
        let s = ClassicalStrategy::uniform_random(&g);
        assert!((eval_symmetric(&g, &later(false), &s) - 1.0 / 3.0).abs() < 1e-15);
        assert!((eval_symmetric(&g, &first(false), &s) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tetrahedron_go_to_lowest() {
        let g = Graph::named_cubic("K4").unwrap();
        let s = ClassicalStrategy::go_to_lowest(&g);
        assert_eq!(eval_symmetric(&g, &later(false), &s), 0.625);
    }

    #[test]
    fn prism_go_to_lowest() {
        let g = Graph::named_cubic("Y3").unwrap();
        let s = ClassicalStrategy::go_to_lowest(&g);
        let p = eval_symmetric(&g, &later(false), &s);
        assert!((p - 14.0 / 36.0).abs() < 1e-15);
        assert!((p - 0.3889).abs() < 5e-5);
    }

    #[test]
    fn closed_form_examples() {
        use CycleClassicalVariant::*;
        assert_eq!(closed_form_cycle_classical(4, GoToLowest).unwrap(), 0.5);
        assert!(
            (closed_form_cycle_classical(9, GoToLowest).unwrap() - 13.0 / 81.0).abs() < 1e-15
        );
        let coin9 = closed_form_cycle_classical(9, RandomCheckFirst).unwrap();
        assert!((coin9 - 1.0 / 6.0).abs() < 1e-15);
        // the coin strategy overtakes go-to-lowest beyond 8 vertices
        assert!(coin9 > closed_form_cycle_classical(9, GoToLowest).unwrap());
        assert!(closed_form_cycle_classical(2, GoToLowest).is_err());
    }

    #[test]
    fn closed_form_matches_enumeration_both_variants() {
        for n in 3..=50 {
            let g = Graph::cycle(n).unwrap();
            let s = ClassicalStrategy::go_to_lowest(&g);
            let expect =
                closed_form_cycle_classical(n, CycleClassicalVariant::GoToLowest).unwrap();
            for cfg in [later(false), first(false)] {
                let p = eval_symmetric(&g, &cfg, &s);
                assert!((p - expect).abs() < 1e-12, "n={n}");
            }
        }
        for n in [3usize, 5, 12, 30] {
            let g = Graph::cycle(n).unwrap();
            let s = ClassicalStrategy::uniform_random(&g);
            let pl = eval_symmetric(&g, &later(false), &s);
            let pf = eval_symmetric(&g, &first(false), &s);
            assert!((pl - 1.0 / n as f64).abs() < 1e-12);
            assert!((pf - 1.5 / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_probabilities_approach_their_limits() {
        use CycleClassicalVariant::*;
        let at = |n: usize| n as f64 * closed_form_cycle_classical(n, GoToLowest).unwrap();
        assert!(at(1_000) > at(10_000));
        assert!((at(1_000) - 1.0).abs() < 1e-2);
        assert!((at(10_000) - 1.0).abs() < 1e-2);
        for n in [1_000usize, 10_000] {
            let coin = n as f64 * closed_form_cycle_classical(n, RandomCheckFirst).unwrap();
            assert!((coin - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn lowest_and_highest_tie_on_cycles() {
        for n in 3..=20 {
            let g = Graph::cycle(n).unwrap();
            let lo = eval_symmetric(&g, &later(false), &ClassicalStrategy::go_to_lowest(&g));
            let hi = eval_symmetric(&g, &later(false), &ClassicalStrategy::go_to_highest(&g));
            assert!((lo - hi).abs() < 1e-15, "n={n}");
        }
    }

    #[test]
    fn asymmetric_pairs_are_supported() {
        let g = Graph::cycle(3).unwrap();
        let lo = ClassicalStrategy::go_to_lowest(&g);
        let hi = ClassicalStrategy::go_to_highest(&g);
        let pair = ClassicalPair::new(&g, &lo, &hi).unwrap();
        // lowest destinations (2,1,1), highest destinations (3,3,2): the only
        // co-location is (a,b) = (1,3), both landing on 2
        let p = exact_win_probability(&g, &later(false), &pair).unwrap();
        assert!((p - 1.0 / 9.0).abs() < 1e-15);
        // with edge meetings, (3,1) transposes: 3 -> 1 while 1 -> 3
        let p = exact_win_probability(&g, &later(true), &pair).unwrap();
        assert!((p - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn validation_catches_bad_strategies() {
        let g = Graph::cycle(4).unwrap();
        let short = ClassicalStrategy::Deterministic { moves: vec![0; 3] };
        assert!(short.validate(&g).is_err());
        let bad_rank = ClassicalStrategy::Deterministic { moves: vec![0, 0, 2, 0] };
        assert!(bad_rank.validate(&g).is_err());
        let bad_row = ClassicalStrategy::Randomized {
            dist: vec![vec![0.7, 0.7]; 4],
        };
        assert!(bad_row.validate(&g).is_err());
    }

    #[test]
    fn check_first_dominates_check_later() {
        // a shared start can only help when it wins outright before moving
        for n in [3usize, 4, 7] {
            let g = Graph::cycle(n).unwrap();
            for s in [
                ClassicalStrategy::go_to_lowest(&g),
                ClassicalStrategy::uniform_random(&g),
            ] {
                for e in [false, true] {
                    let pf = eval_symmetric(&g, &first(e), &s);
                    let pl = eval_symmetric(&g, &later(e), &s);
                    assert!(pf >= pl - 1e-15, "n={n} e={e}: {pf} < {pl}");
                }
            }
        }
        let k4 = Graph::named_cubic("K4").unwrap();
        let coins = ClassicalStrategy::uniform_random(&k4);
        assert!(
            eval_symmetric(&k4, &first(false), &coins)
                >= eval_symmetric(&k4, &later(false), &coins)
        );
    }

    #[test]
    fn json_round_trip_and_shape() {
        let g = Graph::cycle(3).unwrap();
        let s = ClassicalStrategy::go_to_lowest(&g);
        let v = s.to_json();
        assert_eq!(v["kind"], "deterministic");
        assert_eq!(v["moves"]["1"], 0);
        assert_eq!(ClassicalStrategy::from_json(&v).unwrap(), s);

        let r = ClassicalStrategy::uniform_random(&g);
        let v = r.to_json();
        assert_eq!(v["kind"], "randomized");
        assert_eq!(ClassicalStrategy::from_json(&v).unwrap(), r);

        assert!(ClassicalStrategy::from_json(&serde_json::json!({"kind":"nope"})).is_err());
    }
}
