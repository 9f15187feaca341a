use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{step, ClassicalError, PhasePoint};
use crate::observables::{CurrentSeries, NeumaierSum};
use crate::params::SimulationParams;
use crate::rng::NoiseStreams;

/// Trajectories per work item. Fixed so reductions do not depend on the
/// thread pool.
const CHUNK: usize = 1024;

/// Rectangle of initial conditions, `x in [x_min, x_max)`, `p in [p_min, p_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellRegion {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
}

impl Default for CellRegion {
    fn default() -> Self {
        Self { x_min: 0.0, x_max: PI, p_min: -PI, p_max: PI }
    }
}

impl CellRegion {
    /// The whole circle in `x` with `p in [-pi, pi]`.
    pub fn full_circle() -> Self {
        Self { x_max: 2.0 * PI, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), ClassicalError> {
        let ok = [self.x_min, self.x_max, self.p_min, self.p_max].iter().all(|v| v.is_finite())
            && self.x_min < self.x_max
            && self.p_min <= self.p_max;
        if ok {
            Ok(())
        } else {
            Err(ClassicalError::BadRegion(format!("{self:?}")))
        }
    }
}

/// A bundle of trajectories evolved in lockstep.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    points: Vec<PhasePoint>,
    /// Words consumed so far from each trajectory's noise stream.
    word_pos: Vec<u64>,
    streams: NoiseStreams,
    step_count: u64,
}

impl Ensemble {
    pub fn from_points(points: Vec<PhasePoint>, streams: NoiseStreams) -> Result<Self, ClassicalError> {
        if points.is_empty() {
            return Err(ClassicalError::EmptyEnsemble);
        }
        let word_pos = vec![0; points.len()];
        Ok(Self { points, word_pos, streams, step_count: 0 })
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn mean_momentum(&self) -> (f64, f64) {
        let mut sum = NeumaierSum::default();
        let mut sq = NeumaierSum::default();
        for pt in &self.points {
            sum.add(pt.p);
            sq.add(pt.p * pt.p);
        }
        mean_and_stderr(&sum, &sq, self.points.len())
    }

    /// Applies `steps` kicks. When `record` is set, returns per-kick momentum
    /// sums and sums of squares reduced in trajectory order.
    fn run(&mut self, params: &SimulationParams, steps: usize, record: bool) -> Vec<(NeumaierSum, NeumaierSum)> {
        let width = if record { steps } else { 0 };
        let partials: Vec<Vec<(NeumaierSum, NeumaierSum)>> = self.map_chunks(params, steps, |_, _| {
            vec![(NeumaierSum::default(), NeumaierSum::default()); width]
        }, |acc, _, s, p| {
            if record {
                acc[s].0.add(p);
                acc[s].1.add(p * p);
            }
        });
        let mut total = vec![(NeumaierSum::default(), NeumaierSum::default()); width];
        for part in &partials {
            for (t, (s, q)) in total.iter_mut().zip(part) {
                t.0.merge(s);
                t.1.merge(q);
            }
        }
        total
    }

    /// Drives every trajectory through `steps` kicks in fixed chunks. `init`
    /// builds one accumulator per chunk (given the chunk index and size) and
    /// `observe(acc, trajectory, kick, p)` sees each new momentum.
    fn map_chunks<A, I, O>(&mut self, params: &SimulationParams, steps: usize, init: I, observe: O) -> Vec<A>
    where
        A: Send,
        I: Fn(usize, usize) -> A + Sync,
        O: Fn(&mut A, usize, usize, f64) + Sync,
    {
        let sigma = params.noise_std();
        let streams = self.streams;
        let out = self
            .points
            .par_chunks_mut(CHUNK)
            .zip(self.word_pos.par_chunks_mut(CHUNK))
            .enumerate()
            .map(|(chunk, (points, words))| {
                let mut acc = init(chunk, points.len());
                for (i, (pt, word)) in points.iter_mut().zip(words.iter_mut()).enumerate() {
                    let index = chunk * CHUNK + i;
                    let mut state = *pt;
                    if sigma > 0.0 {
                        let mut rng = streams.stream(index as u64, *word as u128);
                        for s in 0..steps {
                            let xi: f64 = rng.sample(StandardNormal);
                            state = step(state, params, sigma * xi);
                            observe(&mut acc, index, s, state.p);
                        }
                        *word = rng.get_word_pos() as u64;
                    } else {
                        for s in 0..steps {
                            state = step(state, params, 0.0);
                            observe(&mut acc, index, s, state.p);
                        }
                    }
                    *pt = state;
                }
                acc
            })
            .collect();
        self.step_count += steps as u64;
        out
    }

    /// Applies `steps` kicks and returns the momenta visited, trajectory by
    /// trajectory, keeping every `stride`-th value of that ordering.
    pub fn collect_momenta(&mut self, params: &SimulationParams, steps: usize, stride: usize) -> Vec<f64> {
        let stride = stride.max(1);
        self.map_chunks(params, steps, |_, n| Vec::with_capacity(n * steps / stride + 1), |acc, traj, s, p| {
            if (traj * steps + s) % stride == 0 {
                acc.push(p);
            }
        })
        .concat()
    }

    /// Applies `steps` kicks without recording the current.
    pub fn advance(&mut self, params: &SimulationParams, steps: usize) {
        self.run(params, steps, false);
    }
}

fn mean_and_stderr(sum: &NeumaierSum, sq: &NeumaierSum, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = sum.value() / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = ((sq.value() - nf * mean * mean) / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}

/// Uniform initial conditions inside `region`, drawn from the seed's
/// dedicated initial-condition stream.
pub fn sample_initial(count: usize, region: &CellRegion, seed: u64) -> Result<Ensemble, ClassicalError> {
    if count == 0 {
        return Err(ClassicalError::EmptyEnsemble);
    }
    region.validate()?;
    let streams = NoiseStreams::new(seed);
    let mut rng = streams.initial_conditions();
    let points = (0..count)
        .map(|_| {
            let x = rng.random_range(region.x_min..region.x_max);
            let p = if region.p_min < region.p_max {
                rng.random_range(region.p_min..=region.p_max)
            } else {
                region.p_min
            };
            PhasePoint { x, p }
        })
        .collect();
    Ensemble::from_points(points, streams)
}

/// Applies `steps` kicks to every trajectory and records `J(t)`, the ensemble
/// mean momentum, together with its standard error, at the current kick and
/// after each new one.
pub fn evolve(ensemble: &mut Ensemble, params: &SimulationParams, steps: usize) -> CurrentSeries {
    let start = ensemble.step_count;
    let mut series = CurrentSeries::new();
    let (j0, e0) = ensemble.mean_momentum();
    series.push(start, j0, Some(e0));
    let n = ensemble.len();
    for (s, (sum, sq)) in ensemble.run(params, steps, true).iter().enumerate() {
        let (j, e) = mean_and_stderr(sum, sq, n);
        series.push(start + s as u64 + 1, j, Some(e));
    }
    series
}
