//! The artificial hummingbird optimizer: a population metaheuristic over
//! mixed integer/continuous boxes with a visit table steering target
//! selection, three masked flight patterns, guided and territorial
//! foraging, and periodic migration of the worst member.
//!
//! The source description states the visit table only through its
//! initialization; the full bookkeeping here (increment unvisited levels,
//! reset the visited target, promote an improved source to every other
//! bird's most-overdue target) follows the canonical reference
//! implementation of the algorithm.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{CoreError, Result};

/// One search dimension: box bounds plus an integrality flag.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Dimension {
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
}

impl Dimension {
    pub fn continuous(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            integer: false,
        }
    }

    pub fn integer(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            integer: true,
        }
    }
}

/// A box search domain.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SearchSpace {
    dims: Vec<Dimension>,
}

impl SearchSpace {
    pub fn new(dims: Vec<Dimension>) -> Result<Self> {
        if dims.is_empty() {
            return Err(CoreError::InvalidArgument(
                "search space needs at least one dimension".into(),
            ));
        }
        for (i, d) in dims.iter().enumerate() {
            if !(d.lower.is_finite() && d.upper.is_finite() && d.upper >= d.lower) {
                return Err(CoreError::InvalidArgument(format!(
                    "dimension {i}: invalid bounds [{}, {}]",
                    d.lower, d.upper
                )));
            }
            if d.integer && d.lower.ceil() > d.upper.floor() {
                return Err(CoreError::InvalidArgument(format!(
                    "dimension {i}: no integer inside [{}, {}]",
                    d.lower, d.upper
                )));
            }
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Clamp to the box; integer dimensions are rounded first and clamped
    /// onto the integer lattice inside the box.
    fn repair(&self, position: &mut [f64]) {
        for (v, d) in position.iter_mut().zip(self.dims.iter()) {
            if d.integer {
                *v = v.round().clamp(d.lower.ceil(), d.upper.floor());
            } else {
                *v = v.clamp(d.lower, d.upper);
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut pos: Vec<f64> = self
            .dims
            .iter()
            .map(|d| d.lower + rng.random::<f64>() * (d.upper - d.lower))
            .collect();
        self.repair(&mut pos);
        pos
    }
}

/// Optimizer settings.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AhaConfig {
    /// Population size (number of food sources), at least 2.
    pub pop_size: usize,
    /// Number of iterations.
    pub max_iter: usize,
    /// RNG seed; identical configs reproduce bit-identically.
    pub seed: u64,
}

impl Default for AhaConfig {
    fn default() -> Self {
        Self {
            pop_size: 30,
            max_iter: 20,
            seed: 0,
        }
    }
}

impl AhaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 {
            return Err(CoreError::InvalidConfig("pop_size must be >= 2".into()));
        }
        if self.max_iter < 1 {
            return Err(CoreError::InvalidConfig("max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a run: elitist best position and fitness, the per-iteration
/// best-fitness trace, and the iterations at which migration fired.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OptResult {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub history: Vec<f64>,
    pub migrations: Vec<usize>,
}

/// The three flight patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlightKind {
    Axial,
    Diagonal,
    Omni,
}

/// Coordinate mask for one move.
///
/// Axial selects a single random coordinate; omnidirectional selects all.
/// Diagonal selects a random subset of size `ceil(R (d-2)) + 1` (R uniform),
/// which ranges over [2, d-1] for d >= 3 and degenerates to a single
/// coordinate for smaller spaces.
pub fn flight_direction(kind: FlightKind, d: usize, rng: &mut ChaCha8Rng) -> Vec<bool> {
    assert!(d >= 1, "dimension count must be positive");
    let mut mask = vec![false; d];
    match kind {
        FlightKind::Omni => mask.iter_mut().for_each(|m| *m = true),
        FlightKind::Axial => mask[rng.random_range(0..d)] = true,
        FlightKind::Diagonal => {
            let r: f64 = rng.random::<f64>();
            let k = (r * d.saturating_sub(2) as f64).ceil() as usize + 1;
            let k = if d >= 3 {
                k.clamp(2, d - 1)
            } else {
                k.clamp(1, d)
            };
            // partial Fisher-Yates: first k entries of a random permutation
            let mut idx: Vec<usize> = (0..d).collect();
            for i in 0..k {
                let j = rng.random_range(i..d);
                idx.swap(i, j);
                mask[idx[i]] = true;
            }
        }
    }
    mask
}

fn pick_flight(rng: &mut ChaCha8Rng) -> FlightKind {
    match rng.random_range(0..3u8) {
        0 => FlightKind::Axial,
        1 => FlightKind::Diagonal,
        _ => FlightKind::Omni,
    }
}

/// Visit levels: how long each bird has left each food source unvisited.
/// Row i is bird i's view; the diagonal is never read.
struct VisitTable {
    levels: Vec<Vec<f64>>,
}

impl VisitTable {
    fn new(m: usize) -> Self {
        Self {
            levels: vec![vec![0.0; m]; m],
        }
    }

    /// Most-overdue source for bird `i`; fitness breaks level ties.
    fn target_for(&self, i: usize, fitness: &[f64]) -> usize {
        let row = &self.levels[i];
        let mut best: Option<usize> = None;
        for j in 0..row.len() {
            if j == i {
                continue;
            }
            best = match best {
                None => Some(j),
                Some(b) => {
                    if row[j] > row[b] || (row[j] == row[b] && fitness[j] < fitness[b]) {
                        Some(j)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        best.expect("population has at least two members")
    }

    /// Bird `i` foraged: every other source it did not visit ages by one;
    /// a visited target resets.
    fn after_forage(&mut self, i: usize, target: Option<usize>) {
        let m = self.levels.len();
        for j in 0..m {
            if j != i {
                self.levels[i][j] += 1.0;
            }
        }
        if let Some(t) = target {
            self.levels[i][t] = 0.0;
        }
    }

    /// Source `i` improved: it becomes the most overdue target for every
    /// other bird.
    fn promote(&mut self, i: usize) {
        let m = self.levels.len();
        for r in 0..m {
            if r == i {
                continue;
            }
            let row_max = (0..m)
                .filter(|&j| j != r && j != i)
                .map(|j| self.levels[r][j])
                .fold(0.0f64, f64::max);
            self.levels[r][i] = row_max + 1.0;
        }
    }
}

/// Minimize `objective` over `space`.
///
/// Each iteration every bird flips a fair coin between guided foraging
/// (move relative to its visit-table target) and territorial foraging
/// (move relative to itself), with the step masked by a uniformly chosen
/// flight pattern and scaled by a standard normal draw. Candidates are
/// clamped to the box (integer dimensions rounded) and accepted greedily.
/// Every `2 * pop_size` iterations the worst bird migrates to a fresh
/// uniform position.
///
/// The objective must return finite values everywhere in the box; a
/// non-finite value aborts with a diagnostic.
pub fn aha_minimize<F>(mut objective: F, space: &SearchSpace, cfg: &AhaConfig) -> Result<OptResult>
where
    F: FnMut(&[f64]) -> f64,
{
    cfg.validate()?;
    let m = cfg.pop_size;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let eval = |pos: &[f64], objective: &mut F| -> Result<f64> {
        let v = objective(pos);
        if !v.is_finite() {
            return Err(CoreError::NumericalFailure(format!(
                "objective returned non-finite value {v} at {pos:?}"
            )));
        }
        Ok(v)
    };

    let mut positions: Vec<Vec<f64>> = (0..m).map(|_| space.sample(&mut rng)).collect();
    let mut fitness = Vec::with_capacity(m);
    for p in &positions {
        fitness.push(eval(p, &mut objective)?);
    }

    let mut visits = VisitTable::new(m);
    let (mut best_pos, mut best_fit) = {
        let mut b = 0;
        for i in 1..m {
            if fitness[i] < fitness[b] {
                b = i;
            }
        }
        (positions[b].clone(), fitness[b])
    };

    let mut history = Vec::with_capacity(cfg.max_iter);
    let mut migrations = Vec::new();

    for iter in 1..=cfg.max_iter {
        for i in 0..m {
            let guided = rng.random::<f64>() < 0.5;
            let mask = flight_direction(pick_flight(&mut rng), space.len(), &mut rng);
            let step: f64 = rng.sample(StandardNormal);

            let (mut candidate, target) = if guided {
                let t = visits.target_for(i, &fitness);
                let cand: Vec<f64> = positions[i]
                    .iter()
                    .zip(positions[t].iter())
                    .zip(mask.iter())
                    .map(|((&xi, &xt), &on)| if on { xt + step * (xi - xt) } else { xt })
                    .collect();
                (cand, Some(t))
            } else {
                let cand: Vec<f64> = positions[i]
                    .iter()
                    .zip(mask.iter())
                    .map(|(&xi, &on)| if on { xi + step * xi } else { xi })
                    .collect();
                (cand, None)
            };
            space.repair(&mut candidate);
            let cand_fit = eval(&candidate, &mut objective)?;

            visits.after_forage(i, target);
            if cand_fit < fitness[i] {
                positions[i] = candidate;
                fitness[i] = cand_fit;
                visits.promote(i);
                if cand_fit < best_fit {
                    best_fit = cand_fit;
                    best_pos = positions[i].clone();
                }
            }
        }

        if iter % (2 * m) == 0 {
            let mut worst = 0;
            for i in 1..m {
                if fitness[i] > fitness[worst] {
                    worst = i;
                }
            }
            positions[worst] = space.sample(&mut rng);
            fitness[worst] = eval(&positions[worst], &mut objective)?;
            visits.after_forage(worst, None);
            visits.promote(worst);
            if fitness[worst] < best_fit {
                best_fit = fitness[worst];
                best_pos = positions[worst].clone();
            }
            migrations.push(iter);
        }

        history.push(best_fit);
    }

    Ok(OptResult {
        best_position: best_pos,
        best_fitness: best_fit,
        history,
        migrations,
    })
}
