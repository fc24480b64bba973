//! Derivative-free maximization of the exact rendezvous objective over
//! per-site Euler-angle strategies on cubic graphs.
//!
//! The objective is the exact enumeration of the winning probability, so each
//! evaluation is an `O(N^2)` sum of small matrix products with no sampling
//! noise. Maximization runs a multi-restart downhill simplex over the 3N
//! angle coordinates (fewer when isomorphic components are tied), restarts in
//! parallel, with a deterministic best-of merge.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::exact_win_probability;
use crate::game::{GameConfig, SameStartRule};
use crate::graph::{Graph, Vertex};
use crate::quantum::{mat3_mul, mat3_transpose, spin_rotation, EulerAngles, Mat3};
use crate::strategies::QutritStrategy;

/// Budget and reproducibility knobs for [`optimize`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerConfig {
    /// Independent simplex starts; the identity point is always restart 0.
    pub restarts: usize,
    /// Objective-evaluation budget per restart.
    pub max_evals: usize,
    pub seed: u64,
    /// Convergence tolerance on the simplex objective spread.
    pub tolerance: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 64,
            max_evals: 6_000,
            seed: 0,
            tolerance: 1e-12,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::Validation("restarts must be at least 1".into()));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::Validation("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Whether to constrain isomorphic disconnected components to share one
/// angle assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieComponents {
    /// Tie exactly when the graph splits into label-aligned isomorphic
    /// components (the default).
    Auto,
    /// Require tying; error if the components do not match up.
    On,
    /// Optimize every site independently.
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestartTrace {
    pub restart: usize,
    pub objective: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub strategy: QutritStrategy,
    pub objective: f64,
    pub trace: Vec<RestartTrace>,
    pub total_evaluations: usize,
    pub tied: bool,
}

/// Exact winning probability of a qutrit strategy on a cubic graph; the
/// objective the optimizer maximizes.
pub fn cubic_objective(g: &Graph, cfg: &GameConfig, s: &QutritStrategy) -> Result<f64> {
    if g.degree() != 3 {
        return Err(Error::Validation(format!(
            "the objective is defined on cubic graphs; degree is {}",
            g.degree()
        )));
    }
    s.validate(g)?;
    exact_win_probability(g, cfg, s)
}

/// Win masks per ordered start pair, with matrix-entry indices precomputed so
/// the hot loop touches nothing but the rotation products.
struct ObjectiveTables {
    n: usize,
    /// For pair index `a * n + b`, the (row, col) entries of the joint matrix
    /// that score a win.
    masks: Vec<Vec<(usize, usize)>>,
    diagonal_auto_win: bool,
    same_start_allowed: bool,
    norm: f64,
}

impl ObjectiveTables {
    fn build(g: &Graph, cfg: &GameConfig) -> ObjectiveTables {
        let n = g.vertex_count();
        let mut masks = vec![Vec::new(); n * n];
        for a in 1..=n {
            for b in 1..=n {
                let mut cells = Vec::new();
                for ra in 0..3 {
                    for rb in 0..3 {
                        let fa = g.ranked_neighbor(a, ra).unwrap();
                        let fb = g.ranked_neighbor(b, rb).unwrap();
                        let win =
                            fa == fb || (cfg.meet_on_edges && a != b && fa == b && fb == a);
                        if win {
                            cells.push((ra, rb));
                        }
                    }
                }
                masks[(a - 1) * n + (b - 1)] = cells;
            }
        }
        let pairs = if cfg.same_start_allowed { n * n } else { n * n - n };
        ObjectiveTables {
            n,
            masks,
            diagonal_auto_win: cfg.same_start_allowed
                && cfg.same_start_variant == SameStartRule::CheckFirst,
            same_start_allowed: cfg.same_start_allowed,
            norm: pairs as f64,
        }
    }

    /// Objective for per-site spin rotations. Matches the provider-based
    /// evaluation path up to summation order.
    fn evaluate(&self, rotations: &[Mat3]) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    if !self.same_start_allowed {
                        continue;
                    }
                    if self.diagonal_auto_win {
                        total += 1.0;
                        continue;
                    }
                }
                let m = mat3_mul(&rotations[a], &mat3_transpose(&rotations[b]));
                let mut mass = 0.0;
                for &(ra, rb) in &self.masks[a * n + b] {
                    mass += m[ra][rb] * m[ra][rb];
                }
                total += mass / 3.0;
            }
        }
        total / self.norm
    }
}

/// Groups of sites constrained to share one angle triple. Without tying each
/// site forms its own group.
fn resolve_tie_groups(g: &Graph, tie: TieComponents) -> Result<(Vec<Vec<Vertex>>, bool)> {
    let singletons = || g.vertices().map(|v| vec![v]).collect::<Vec<_>>();
    match tie {
        TieComponents::Off => Ok((singletons(), false)),
        TieComponents::Auto | TieComponents::On => {
            let comps = g.components();
            let aligned = comps.len() >= 2 && label_aligned_isomorphic(g, &comps);
            if aligned {
                let m = comps[0].len();
                let groups = (0..m)
                    .map(|k| comps.iter().map(|c| c[k]).collect::<Vec<_>>())
                    .collect();
                Ok((groups, true))
            } else if tie == TieComponents::On {
                Err(Error::Validation(
                    "component tying requires two or more label-aligned isomorphic components"
                        .into(),
                ))
            } else {
                Ok((singletons(), false))
            }
        }
    }
}

/// True when every component has the same size and the map sending the k-th
/// smallest vertex of one component to the k-th smallest of another is a
/// graph isomorphism. That alignment also preserves neighbor ranks, so tied
/// sites play identical games.
fn label_aligned_isomorphic(g: &Graph, comps: &[Vec<Vertex>]) -> bool {
    let m = comps[0].len();
    if comps.iter().any(|c| c.len() != m) {
        return false;
    }
    let reference = &comps[0];
    for other in &comps[1..] {
        for i in 0..m {
            for j in 0..m {
                if g.adjacent(reference[i], reference[j]) != g.adjacent(other[i], other[j]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Maximizes the exact objective over per-site (or per-group) Euler angles.
///
/// Restart 0 always starts from the identity rotation at every site; later
/// restarts start from a seeded stratified lattice over `[0, 2*pi)^dim`.
/// The returned objective is re-evaluated through [`cubic_objective`], so it
/// is exactly what an independent evaluation of the returned strategy gives.
pub fn optimize(
    g: &Graph,
    cfg: &GameConfig,
    oc: &OptimizerConfig,
    tie: TieComponents,
) -> Result<OptimizationResult> {
    if g.degree() != 3 {
        return Err(Error::Validation(format!(
            "optimization is defined on cubic graphs; degree is {}",
            g.degree()
        )));
    }
    oc.validate()?;
    let (groups, tied) = resolve_tie_groups(g, tie)?;
    let n = g.vertex_count();
    let dim = 3 * groups.len();
    let tables = ObjectiveTables::build(g, cfg);

    // site index -> group index, for expanding parameter vectors
    let mut site_group = vec![0usize; n];
    for (gi, group) in groups.iter().enumerate() {
        for &v in group {
            site_group[v - 1] = gi;
        }
    }

    let evaluate = |params: &[f64]| -> f64 {
        let group_rots: Vec<Mat3> = params
            .chunks_exact(3)
            .map(|c| spin_rotation(&EulerAngles::new(c[0], c[1], c[2])))
            .collect();
        let site_rots: Vec<Mat3> = (0..n).map(|i| group_rots[site_group[i]]).collect();
        tables.evaluate(&site_rots)
    };

    let offsets = lattice_offsets(dim, oc.seed);
    let outcomes: Vec<(usize, Vec<f64>, f64, usize)> = (0..oc.restarts)
        .into_par_iter()
        .map(|r| {
            let x0 = if r == 0 {
                vec![0.0; dim]
            } else {
                lattice_point(dim, r, &offsets)
            };
            let mut evals = 0usize;
            let mut best =
                nelder_mead_max(&evaluate, &x0, 0.6, oc.tolerance, oc.max_evals, &mut evals);
            // polish with a tight simplex around the found point
            let polish_budget = oc.max_evals / 2;
            let polished = nelder_mead_max(
                &evaluate,
                &best.0,
                0.05,
                oc.tolerance,
                polish_budget,
                &mut evals,
            );
            if polished.1 > best.1 {
                best = polished;
            }
            (r, best.0, best.1, evals)
        })
        .collect();

    let mut trace: Vec<RestartTrace> = outcomes
        .iter()
        .map(|(r, _, f, e)| RestartTrace {
            restart: *r,
            objective: *f,
            evaluations: *e,
        })
        .collect();
    trace.sort_by_key(|t| t.restart);
    let total_evaluations = trace.iter().map(|t| t.evaluations).sum();

    // deterministic merge: best objective, ties to the lowest restart index
    let (_, best_params, _, _) = outcomes
        .iter()
        .max_by(|a, b| a.2.total_cmp(&b.2).then(b.0.cmp(&a.0)))
        .expect("at least one restart");

    let triples: Vec<EulerAngles> = best_params
        .chunks_exact(3)
        .map(|c| EulerAngles::new(c[0], c[1], c[2]).canonical())
        .collect();
    let strategy = if tied {
        QutritStrategy::tied(groups, triples)?
    } else {
        QutritStrategy::per_site(triples)
    };
    let objective = cubic_objective(g, cfg, &strategy)?;
    Ok(OptimizationResult {
        strategy,
        objective,
        trace,
        total_evaluations,
        tied,
    })
}

/// Seeded per-coordinate offsets for the restart lattice.
fn lattice_offsets(dim: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..dim).map(|_| rng.gen::<f64>()).collect()
}

/// Low-discrepancy restart point: a Kronecker lattice driven by the
/// generalized golden ratio for the given dimension, shifted by the seeded
/// offsets and scaled to `[0, 2*pi)`.
fn lattice_point(dim: usize, index: usize, offsets: &[f64]) -> Vec<f64> {
    // unique positive root of x^(dim+1) = x + 1
    let mut phi = 1.5f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
    }
    let mut alpha = 1.0;
    (0..dim)
        .map(|i| {
            alpha /= phi;
            let u = (offsets[i] + index as f64 * alpha).fract();
            u * std::f64::consts::TAU
        })
        .collect()
}

/// Downhill simplex (adaptive coefficients), maximizing `f`. Returns the best
/// point and value; `evals` accumulates objective calls.
fn nelder_mead_max(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    tolerance: f64,
    max_evals: usize,
    evals: &mut usize,
) -> (Vec<f64>, f64) {
    let dim = x0.len();
    let nf = dim as f64;
    // dimension-adaptive coefficients
    let alpha = 1.0;
    let beta = 1.0 + 2.0 / nf;
    let gamma = 0.75 - 1.0 / (2.0 * nf);
    let delta = 1.0 - 1.0 / nf;

    let used = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        used.set(used.get() + 1);
        -f(x) // minimize the negative
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| eval(p)).collect();

    let budget = max_evals.max(dim + 2);
    while used.get() < budget {
        // order ascending (best first, since values are negated objectives)
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        if values[worst] - values[best] <= tolerance {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for &i in order.iter().take(dim) {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x / nf;
            }
        }

        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&simplex[worst])
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        let f_reflect = eval(&reflect);

        if f_reflect < values[best] {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&reflect)
                .map(|(c, r)| c + beta * (r - c))
                .collect();
            let f_expand = eval(&expand);
            if f_expand < f_reflect {
                simplex[worst] = expand;
                values[worst] = f_expand;
            } else {
                simplex[worst] = reflect;
                values[worst] = f_reflect;
            }
        } else if f_reflect < values[second_worst] {
            simplex[worst] = reflect;
            values[worst] = f_reflect;
        } else {
            // contraction, outside or inside of the worst vertex
            let (contract, f_contract) = if f_reflect < values[worst] {
                let c: Vec<f64> = centroid
                    .iter()
                    .zip(&reflect)
                    .map(|(c, r)| c + gamma * (r - c))
                    .collect();
                let fc = eval(&c);
                (c, fc)
            } else {
                let c: Vec<f64> = centroid
                    .iter()
                    .zip(&simplex[worst])
                    .map(|(c, w)| c - gamma * (c - w))
                    .collect();
                let fc = eval(&c);
                (c, fc)
            };
            if f_contract < values[worst].min(f_reflect) {
                simplex[worst] = contract;
                values[worst] = f_contract;
            } else {
                // shrink toward the best vertex
                let anchor = simplex[best].clone();
                for i in 0..=dim {
                    if i == best {
                        continue;
                    }
                    for (x, a) in simplex[i].iter_mut().zip(&anchor) {
                        *x = a + delta * (*x - a);
                    }
                    values[i] = eval(&simplex[i]);
                }
            }
        }
    }

    *evals += used.get();
    let mut best_idx = 0;
    for i in 1..=dim {
        if values[i] < values[best_idx] {
            best_idx = i;
        }
    }
    (simplex[best_idx].clone(), -values[best_idx])
}

impl OptimizationResult {
    /// JSON view of the result (strategy angles canonicalized); byte-stable
    /// for a fixed seed and configuration.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "objective": self.objective,
            "tied": self.tied,
            "total_evaluations": self.total_evaluations,
            "strategy": crate::strategies::Strategy::Qutrit(self.strategy.clone()).to_json(),
            "trace": self.trace,
        })
    }
}
