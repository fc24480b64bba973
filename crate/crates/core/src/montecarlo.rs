//! Finite-trial game simulation: analytic sampling, pre-generated outcome
//! tables (the workflow a gate-based processor actually supports), and the
//! discard-and-fall-back mitigation for invalid two-bit readouts.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classical::ClassicalStrategy;
use crate::error::{Error, Result};
use crate::game::{resolve_round, GameConfig, SameStartRule};
use crate::graph::{Graph, Vertex};
use crate::quantum::{
    noisy_sample_from, outcome_matrix_fourqubit, outcome_matrix_qubit, outcome_matrix_qutrit,
    NoiseParams, OutcomeDistribution,
};
use crate::strategies::Strategy;

/// What kind of shots a table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    /// Single-qubit readouts per player: move ranks 0 or 1.
    Qubit,
    /// Two-qubit readouts per player: values 0..=3, where 3 is the unused
    /// 11 pattern that only noise can produce.
    FourQubit,
}

/// Where a table's shots came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableProvenance {
    Ideal,
    Noisy(NoiseParams),
    Imported(String),
}

/// Pre-generated measurement outcomes keyed by ordered start pair, consumed
/// sequentially through per-pair cursors.
#[derive(Debug, Clone)]
pub struct QuantumTable {
    kind: TableKind,
    entries: BTreeMap<(Vertex, Vertex), Vec<(u8, u8)>>,
    cursors: BTreeMap<(Vertex, Vertex), usize>,
    provenance: TableProvenance,
}

/// Shot generator used when building a table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampler {
    Ideal,
    Noisy(NoiseParams),
}

impl QuantumTable {
    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn provenance(&self) -> &TableProvenance {
        &self.provenance
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.entries.keys().copied()
    }

    pub fn shots_for(&self, a: Vertex, b: Vertex) -> usize {
        self.entries.get(&(a, b)).map_or(0, Vec::len)
    }

    pub fn total_shots(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    /// Fraction of stored shots containing an invalid (11) readout on either
    /// side. Always zero for qubit tables.
    pub fn invalid_outcome_fraction(&self) -> f64 {
        let total = self.total_shots();
        if total == 0 {
            return 0.0;
        }
        let invalid: usize = self
            .entries
            .values()
            .flatten()
            .filter(|&&(n, m)| n == 3 || m == 3)
            .count();
        invalid as f64 / total as f64
    }

    /// Next unconsumed shot for the pair; exhaustion is an error unless
    /// `recycle` wraps the cursor around.
    pub fn next_outcome(&mut self, a: Vertex, b: Vertex, recycle: bool) -> Result<(u8, u8)> {
        let shots = self
            .entries
            .get(&(a, b))
            .ok_or(Error::TableExhausted(a, b))?;
        let cursor = self.cursors.entry((a, b)).or_insert(0);
        if *cursor >= shots.len() {
            if !recycle {
                return Err(Error::TableExhausted(a, b));
            }
            *cursor = 0;
        }
        let shot = shots[*cursor];
        *cursor += 1;
        Ok(shot)
    }

    /// Uniformly random shot for the pair, with replacement.
    pub fn probe_random<R: Rng>(&self, a: Vertex, b: Vertex, rng: &mut R) -> Result<(u8, u8)> {
        let shots = self
            .entries
            .get(&(a, b))
            .filter(|s| !s.is_empty())
            .ok_or(Error::TableExhausted(a, b))?;
        Ok(shots[rng.gen_range(0..shots.len())])
    }

    pub fn reset_cursors(&mut self) {
        self.cursors.clear();
    }

    /// CSV with header `a,b,n,m`. Qubit shots print ranks; two-bit shots
    /// print the bit patterns 00..11.
    pub fn export<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "a,b,n,m")?;
        for (&(a, b), shots) in &self.entries {
            for &(n, m) in shots {
                match self.kind {
                    TableKind::Qubit => writeln!(w, "{a},{b},{n},{m}")?,
                    TableKind::FourQubit => {
                        writeln!(w, "{a},{b},{:02b},{:02b}", n, m)?
                    }
                }
            }
        }
        Ok(())
    }

    pub fn export_to_string(&self) -> String {
        let mut buf = Vec::new();
        self.export(&mut buf).expect("write to memory");
        String::from_utf8(buf).expect("ascii csv")
    }

    /// Parses the CSV format written by [`QuantumTable::export`]. The readout
    /// encoding (ranks vs two-bit patterns) is inferred from the first data
    /// row and must be consistent throughout.
    pub fn import<R: BufRead>(reader: R, source: &str) -> Result<QuantumTable> {
        let mut entries: BTreeMap<(Vertex, Vertex), Vec<(u8, u8)>> = BTreeMap::new();
        let mut kind: Option<TableKind> = None;
        let mut saw_header = false;
        let mut rows = 0usize;
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if !saw_header {
                let normalized: String =
                    line.chars().filter(|c| !c.is_whitespace()).collect();
                if normalized != "a,b,n,m" {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected header `a,b,n,m`, found `{line}`"),
                    });
                }
                saw_header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 4 fields, found {}", fields.len()),
                });
            }
            let a: usize = fields[0].parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad start label `{}`", fields[0]),
            })?;
            let b: usize = fields[1].parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad start label `{}`", fields[1]),
            })?;
            if a < 1 || b < 1 {
                return Err(Error::Validation(format!(
                    "line {line_no}: start labels must be 1-based, got ({a}, {b})"
                )));
            }
            let row_kind = readout_kind(fields[2]).ok_or(Error::Parse {
                line: line_no,
                message: format!("bad readout `{}`", fields[2]),
            })?;
            match kind {
                None => kind = Some(row_kind),
                Some(k) if k != row_kind => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "mixed readout encodings in one table".into(),
                    })
                }
                _ => {}
            }
            let n = parse_readout(fields[2], row_kind).ok_or(Error::Parse {
                line: line_no,
                message: format!("bad readout `{}`", fields[2]),
            })?;
            let m = parse_readout(fields[3], row_kind).ok_or(Error::Parse {
                line: line_no,
                message: format!("bad readout `{}`", fields[3]),
            })?;
            entries.entry((a, b)).or_default().push((n, m));
            rows += 1;
        }
        if rows == 0 {
            return Err(Error::Validation(format!(
                "`{source}` holds no shots; an empty table is not usable"
            )));
        }
        Ok(QuantumTable {
            kind: kind.expect("rows imply a kind"),
            entries,
            cursors: BTreeMap::new(),
            provenance: TableProvenance::Imported(source.to_string()),
        })
    }

    pub fn import_path(path: &std::path::Path) -> Result<QuantumTable> {
        let file = std::fs::File::open(path)?;
        Self::import(std::io::BufReader::new(file), &path.display().to_string())
    }

    /// Summary fields used by reporting code.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind,
            "pairs": self.entries.len(),
            "total_shots": self.total_shots(),
            "invalid_outcome_fraction": self.invalid_outcome_fraction(),
            "provenance": self.provenance,
        })
    }
}

fn readout_kind(field: &str) -> Option<TableKind> {
    match field.len() {
        1 => Some(TableKind::Qubit),
        2 => Some(TableKind::FourQubit),
        _ => None,
    }
}

fn parse_readout(field: &str, kind: TableKind) -> Option<u8> {
    match kind {
        TableKind::Qubit => match field {
            "0" => Some(0),
            "1" => Some(1),
            _ => None,
        },
        TableKind::FourQubit => match field {
            "00" => Some(0),
            "01" => Some(1),
            "10" => Some(2),
            "11" => Some(3),
            _ => None,
        },
    }
}

/// Generates a table of shots for every ordered distinct start pair of the
/// graph. Shots for a pair depend only on the seed and the pair itself, not
/// on generation order. Shared starts are never tabled: the diagonal is
/// either an automatic win or handled analytically during simulation.
pub fn build_table(
    g: &Graph,
    strategy: &Strategy,
    shots_per_pair: usize,
    sampler: &Sampler,
    seed: u64,
) -> Result<QuantumTable> {
    if shots_per_pair == 0 {
        return Err(Error::InvalidSize("shots_per_pair must be at least 1".into()));
    }
    strategy.validate(g)?;
    let n = g.vertex_count();
    let (kind, dists): (TableKind, BTreeMap<(Vertex, Vertex), OutcomeDistribution>) =
        match strategy {
            Strategy::Qubit(s) => {
                let mut map = BTreeMap::new();
                for a in 1..=n {
                    for b in 1..=n {
                        if a != b {
                            map.insert(
                                (a, b),
                                outcome_matrix_qubit(s.thetas[a - 1], s.thetas[b - 1]),
                            );
                        }
                    }
                }
                (TableKind::Qubit, map)
            }
            Strategy::Qutrit(s) => {
                let mut map = BTreeMap::new();
                for a in 1..=n {
                    for b in 1..=n {
                        if a != b {
                            map.insert((a, b), outcome_matrix_fourqubit(s.angles(a), s.angles(b)));
                        }
                    }
                }
                (TableKind::FourQubit, map)
            }
            Strategy::Classical(_) => {
                return Err(Error::Validation(
                    "outcome tables hold quantum shots; classical strategies need none".into(),
                ))
            }
        };
    if matches!(sampler, Sampler::Noisy(_)) && kind != TableKind::FourQubit {
        return Err(Error::Validation(
            "the gate-failure noise model applies to the two-qubit-per-player circuits".into(),
        ));
    }
    let mut entries: BTreeMap<(Vertex, Vertex), Vec<(u8, u8)>> = BTreeMap::new();
    for (&(a, b), dist) in &dists {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(((a as u64) << 32) | b as u64);
        let shots = (0..shots_per_pair)
            .map(|_| match sampler {
                Sampler::Ideal => {
                    let (x, y) = dist.sample(&mut rng);
                    (x as u8, y as u8)
                }
                Sampler::Noisy(noise) => noisy_sample_from(dist, noise, &mut rng),
            })
            .collect();
        entries.insert((a, b), shots);
    }
    Ok(QuantumTable {
        kind,
        entries,
        cursors: BTreeMap::new(),
        provenance: match sampler {
            Sampler::Ideal => TableProvenance::Ideal,
            Sampler::Noisy(p) => TableProvenance::Noisy(*p),
        },
    })
}

/// Where each trial's measurement outcomes come from.
pub enum SimSource<'a> {
    /// Sample the exact outcome distribution directly.
    Analytic,
    /// Consume a pre-generated table.
    Table {
        table: &'a mut QuantumTable,
        mode: TableMode,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableMode {
    /// Consume shots in order; exhausting a pair is an error.
    Sequential,
    /// Consume in order, wrapping around on exhaustion.
    SequentialRecycle,
    /// Probe uniformly with replacement.
    RandomProbe,
}

/// Handling of invalid (11) readouts.
pub enum Mitigation<'a> {
    /// An invalid readout forfeits the round.
    None,
    /// The affected player discards the readout and moves by the fallback
    /// classical strategy instead; the round then resolves normally.
    DiscardFallback(&'a ClassicalStrategy),
}

/// Result of a finite-trial simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub trials: u64,
    pub wins: u64,
    pub win_fraction: f64,
    pub seed: u64,
    /// `(trials so far, win fraction)` at every power of two, ending with the
    /// final count.
    pub convergence: Vec<(u64, f64)>,
    /// Trials in which at least one player discarded an invalid readout.
    pub discarded_shots: u64,
}

impl SimResult {
    /// Two-column CSV of the convergence checkpoints.
    pub fn convergence_csv(&self) -> String {
        let mut out = String::from("log2_trials,win_fraction\n");
        for &(t, f) in &self.convergence {
            out.push_str(&format!("{},{}\n", (t as f64).log2(), f));
        }
        out
    }
}

/// Runs `trials` rounds with uniformly random starts and the given outcome
/// source, collecting win fractions at power-of-two checkpoints.
///
/// Identical inputs produce identical results: the pair draws and the
/// outcome draws run on separate streams of one seeded generator.
pub fn simulate(
    g: &Graph,
    cfg: &GameConfig,
    strategy: &Strategy,
    trials: u64,
    seed: u64,
    mut source: SimSource,
    mitigation: Mitigation,
) -> Result<SimResult> {
    if trials == 0 {
        return Err(Error::InvalidSize("trials must be at least 1".into()));
    }
    strategy.validate(g)?;
    let n = g.vertex_count();
    let d = g.degree();

    if let Mitigation::DiscardFallback(fallback) = &mitigation {
        fallback.validate(g)?;
        if !matches!(strategy, Strategy::Qutrit(_)) {
            return Err(Error::Validation(
                "discard mitigation applies to two-bit readouts of qutrit strategies".into(),
            ));
        }
    }

    // pre-flight for table mode: right readout kind, every pair present
    if let SimSource::Table { table, .. } = &source {
        let compatible = matches!(
            (strategy, table.kind()),
            (Strategy::Qubit(_), TableKind::Qubit) | (Strategy::Qutrit(_), TableKind::FourQubit)
        );
        if !compatible {
            return Err(Error::Validation(format!(
                "table kind {:?} does not match the strategy",
                table.kind()
            )));
        }
        for a in 1..=n {
            for b in 1..=n {
                if a != b && table.shots_for(a, b) == 0 {
                    return Err(Error::Validation(format!(
                        "table has no shots for start pair ({a}, {b})"
                    )));
                }
            }
        }
    }

    // exact distributions for analytic sampling (and the analytic diagonal
    // used in table mode)
    let analytic: Option<Vec<OutcomeDistribution>> = match strategy {
        Strategy::Qubit(s) => Some(
            (0..n * n)
                .map(|i| outcome_matrix_qubit(s.thetas[i / n], s.thetas[i % n]))
                .collect(),
        ),
        Strategy::Qutrit(s) => Some(
            (0..n * n)
                .map(|i| outcome_matrix_qutrit(s.angles(i / n + 1), s.angles(i % n + 1)))
                .collect(),
        ),
        Strategy::Classical(_) => None,
    };

    let mut rng_pairs = ChaCha8Rng::seed_from_u64(seed);
    rng_pairs.set_stream(0);
    let mut rng_outcomes = ChaCha8Rng::seed_from_u64(seed);
    rng_outcomes.set_stream(1);

    let mut wins = 0u64;
    let mut discarded = 0u64;
    let mut convergence = Vec::new();
    let mut next_checkpoint = 1u64;

    for t in 1..=trials {
        let a = rng_pairs.gen_range(1..=n);
        let b = if cfg.same_start_allowed {
            rng_pairs.gen_range(1..=n)
        } else {
            let mut b = rng_pairs.gen_range(1..n);
            if b >= a {
                b += 1;
            }
            b
        };

        let won = if a == b && cfg.same_start_variant == SameStartRule::CheckFirst {
            true
        } else {
            let moves: Option<(usize, usize)> = match strategy {
                Strategy::Classical(s) => Some((
                    sample_classical_move(s, a, d, &mut rng_outcomes),
                    sample_classical_move(s, b, d, &mut rng_outcomes),
                )),
                Strategy::Qubit(_) => {
                    let (ra, rb) = match (&mut source, a == b) {
                        (SimSource::Analytic, _) | (_, true) => analytic.as_ref().unwrap()
                            [(a - 1) * n + (b - 1)]
                            .sample(&mut rng_outcomes),
                        (SimSource::Table { table, mode }, false) => {
                            let (x, y) = draw_from_table(table, *mode, a, b, &mut rng_outcomes)?;
                            (x as usize, y as usize)
                        }
                    };
                    Some((ra, rb))
                }
                Strategy::Qutrit(_) => {
                    let (va, vb) = match (&mut source, a == b) {
                        (SimSource::Analytic, _) | (_, true) => {
                            let (x, y) = analytic.as_ref().unwrap()[(a - 1) * n + (b - 1)]
                                .sample(&mut rng_outcomes);
                            (x as u8, y as u8)
                        }
                        (SimSource::Table { table, mode }, false) => {
                            draw_from_table(table, *mode, a, b, &mut rng_outcomes)?
                        }
                    };
                    resolve_two_bit_moves(
                        va,
                        vb,
                        a,
                        b,
                        &mitigation,
                        &mut discarded,
                    )
                }
            };
            match moves {
                Some((ra, rb)) => resolve_round(g, cfg, a, b, ra, rb)?.is_win(),
                None => false, // an unmitigated invalid readout forfeits the round
            }
        };

        if won {
            wins += 1;
        }
        if t == next_checkpoint {
            convergence.push((t, wins as f64 / t as f64));
            next_checkpoint = next_checkpoint.saturating_mul(2);
        }
    }

    let win_fraction = wins as f64 / trials as f64;
    if convergence.last().map(|&(t, _)| t) != Some(trials) {
        convergence.push((trials, win_fraction));
    }
    Ok(SimResult {
        trials,
        wins,
        win_fraction,
        seed,
        convergence,
        discarded_shots: discarded,
    })
}

fn sample_classical_move<R: Rng>(
    s: &ClassicalStrategy,
    v: Vertex,
    d: usize,
    rng: &mut R,
) -> usize {
    if let Some(rank) = s.fixed_move(v) {
        return rank;
    }
    let row = s.move_distribution(v, d);
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (rank, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return rank;
        }
    }
    d - 1
}

fn draw_from_table<R: Rng>(
    table: &mut QuantumTable,
    mode: TableMode,
    a: Vertex,
    b: Vertex,
    rng: &mut R,
) -> Result<(u8, u8)> {
    match mode {
        TableMode::Sequential => table.next_outcome(a, b, false),
        TableMode::SequentialRecycle => table.next_outcome(a, b, true),
        TableMode::RandomProbe => table.probe_random(a, b, rng),
    }
}

/// Maps a pair of two-bit readouts to move ranks, applying the discard
/// mitigation per player. Returns `None` when an invalid readout is left
/// unmitigated.
fn resolve_two_bit_moves(
    va: u8,
    vb: u8,
    a: Vertex,
    b: Vertex,
    mitigation: &Mitigation,
    discarded: &mut u64,
) -> Option<(usize, usize)> {
    let fallback = match mitigation {
        Mitigation::None => None,
        Mitigation::DiscardFallback(s) => Some(*s),
    };
    let mut fired = false;
    let mut rank_of = |v: u8, site: Vertex| -> Option<usize> {
        if v < 3 {
            Some(v as usize)
        } else if let Some(s) = fallback {
            fired = true;
            // the fallback is validated as deterministic-compatible upstream;
            // randomized fallbacks take their most likely move
            Some(s.fixed_move(site).unwrap_or_else(|| {
                let row = s.move_distribution(site, 3);
                row.iter()
                    .enumerate()
                    .max_by(|x, y| x.1.total_cmp(y.1))
                    .map(|(i, _)| i)
                    .unwrap_or(0)
            }))
        } else {
            None
        }
    };
    let ra = rank_of(va, a);
    let rb = rank_of(vb, b);
    if fired {
        *discarded += 1;
    }
    match (ra, rb) {
        (Some(x), Some(y)) => Some((x, y)),
        _ => None,
    }
}
