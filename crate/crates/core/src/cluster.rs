//! The clustering engine: PSO with time-varying coefficients, greedy Gaussian
//! mutation of the global best, and k-means refinement (HPGMK), plus plain
//! k-means and plain PSO baselines.
//!
//! All randomness flows through seed-derived ChaCha streams: one per particle
//! plus one for mutation and one for initialization-independent choices, so
//! results are bit-reproducible for a given seed regardless of scheduling.

use rand::distributions::Distribution;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// HPGMK parameters. Defaults follow the published experiment settings:
/// swarm of 20, 50 iterations, 10 mutation trials, inertia 0.9 -> 0.4,
/// acceleration coefficients swept between 2.5 and 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpgmkParams {
    pub k: usize,
    pub swarm_size: usize,
    pub max_iterations: usize,
    pub mutation_iterations: usize,
    pub w_max: f64,
    pub w_min: f64,
    pub c1_max: f64,
    pub c1_min: f64,
    pub c2_max: f64,
    pub c2_min: f64,
    pub h0: f64,
    pub seed: u64,
}

impl HpgmkParams {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            swarm_size: 20,
            max_iterations: 50,
            mutation_iterations: 10,
            w_max: 0.9,
            w_min: 0.4,
            c1_max: 2.5,
            c1_min: 0.0,
            c2_max: 2.5,
            c2_min: 0.0,
            h0: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidParams(format!("k must be >= 2, got {}", self.k)));
        }
        if self.swarm_size < 2 {
            return Err(Error::InvalidParams(format!(
                "swarm size must be >= 2, got {}",
                self.swarm_size
            )));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidParams("max iterations must be >= 1".into()));
        }
        if self.w_min.is_nan() || self.w_max.is_nan() || self.w_min >= self.w_max {
            return Err(Error::InvalidParams(format!(
                "w_min {} must be below w_max {}",
                self.w_min, self.w_max
            )));
        }
        if self.h0.is_nan() || self.h0 <= 0.0 {
            return Err(Error::InvalidParams(format!("h0 must be > 0, got {}", self.h0)));
        }
        Ok(())
    }
}

/// One candidate solution: k centroid positions flattened into a single
/// vector, with the velocity and personal best alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub pbest_position: Vec<f64>,
    pub pbest_fitness: f64,
    pub fitness: f64,
}

/// Final clustering outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringResult {
    pub centroids: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    pub sse: f64,
    /// Global-best fitness after each outer PSO iteration; empty for the
    /// k-means baseline.
    pub convergence: Vec<f64>,
    pub refine_iterations: usize,
    pub seed: u64,
}

impl ClusteringResult {
    /// Convergence history as `iteration,gbest_sse` CSV.
    pub fn convergence_csv(&self) -> String {
        let mut out = String::from("iteration,gbest_sse\n");
        for (t, v) in self.convergence.iter().enumerate() {
            out.push_str(&format!("{t},{v}\n"));
        }
        out
    }
}

/// Sum of squared Euclidean distances of each point to its nearest centroid,
/// with the assignment vector. Distance ties go to the lowest centroid index.
pub fn sse(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> Result<(f64, Vec<usize>)> {
    if points.is_empty() {
        return Err(Error::EmptyInput("points"));
    }
    if centroids.is_empty() {
        return Err(Error::EmptyInput("centroids"));
    }
    let dim = points[0].len();
    for c in centroids {
        if c.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: c.len() });
        }
    }
    let mut total = 0.0;
    let mut assignments = Vec::with_capacity(points.len());
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (ci, c) in centroids.iter().enumerate() {
            let d: f64 = p.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best_d {
                best_d = d;
                best = ci;
            }
        }
        total += best_d;
        assignments.push(best);
    }
    Ok((total, assignments))
}

/// Linear coefficient schedules: inertia w falls w_max -> w_min, cognitive c1
/// falls c1_max -> c1_min, social c2 rises c2_min -> c2_max across the run.
pub fn schedule(t: usize, params: &HpgmkParams) -> Result<(f64, f64, f64)> {
    if t >= params.max_iterations {
        return Err(Error::IterationOutOfRange { t, t_max: params.max_iterations });
    }
    let span = (params.max_iterations - 1).max(1) as f64;
    let frac = t as f64 / span;
    let w = params.w_max - (params.w_max - params.w_min) * frac;
    let c1 = params.c1_max - (params.c1_max - params.c1_min) * frac;
    let c2 = params.c2_min + (params.c2_max - params.c2_min) * frac;
    Ok((w, c1, c2))
}

/// Per-dimension data extent (min, max), used for initialization, the
/// velocity clamp, and mutation scaling.
#[derive(Debug, Clone)]
pub struct DataBounds {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl DataBounds {
    pub fn of(points: &[Vec<f64>]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("points"));
        }
        let dim = points[0].len();
        let mut min = vec![f64::INFINITY; dim];
        let mut max = vec![f64::NEG_INFINITY; dim];
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            for (d, &x) in p.iter().enumerate() {
                min[d] = min[d].min(x);
                max[d] = max[d].max(x);
            }
        }
        Ok(Self { min, max })
    }

    fn span(&self, data_dim: usize) -> f64 {
        self.max[data_dim] - self.min[data_dim]
    }

    fn dim(&self) -> usize {
        self.min.len()
    }
}

fn uniform_in(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

/// One velocity/position update against a frozen global best. Draws r1 then
/// r2 per scalar dimension; the velocity is clamped per dimension to the data
/// span; the personal best updates on strict improvement.
pub fn update_particle(
    p: &mut Particle,
    gbest_position: &[f64],
    t: usize,
    params: &HpgmkParams,
    bounds: &DataBounds,
    points: &[Vec<f64>],
    rng: &mut impl Rng,
) -> Result<()> {
    if p.position.len() != gbest_position.len() {
        return Err(Error::DimensionMismatch {
            expected: p.position.len(),
            found: gbest_position.len(),
        });
    }
    let (w, c1, c2) = schedule(t, params)?;
    let dim = bounds.dim();
    #[allow(clippy::needless_range_loop)]
    for d in 0..p.position.len() {
        let r1: f64 = rng.gen();
        let r2: f64 = rng.gen();
        let v = w * p.velocity[d]
            + c1 * r1 * (p.pbest_position[d] - p.position[d])
            + c2 * r2 * (gbest_position[d] - p.position[d]);
        let limit = bounds.span(d % dim);
        p.velocity[d] = v.clamp(-limit, limit);
        p.position[d] += p.velocity[d];
    }
    let centroids = decode(&p.position, dim);
    p.fitness = sse(points, &centroids)?.0;
    if p.fitness < p.pbest_fitness {
        p.pbest_fitness = p.fitness;
        p.pbest_position.copy_from_slice(&p.position);
    }
    Ok(())
}

/// Greedy Gaussian mutation of the global best: `trials` times, pick one
/// centroid at random, perturb its velocity and position with zero-mean
/// Gaussian draws of variance h scaled by the data span, and keep the mutant
/// only when its SSE strictly improves. Accepted mutants become the base for
/// the remaining trials.
pub fn gaussian_mutate_gbest(
    gbest: &mut Particle,
    h: f64,
    bounds: &DataBounds,
    trials: usize,
    points: &[Vec<f64>],
    rng: &mut impl Rng,
) -> Result<()> {
    if trials == 0 {
        return Ok(());
    }
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidParams(format!("mutation variance must be > 0, got {h}")));
    }
    let dim = bounds.dim();
    let k = gbest.position.len() / dim;
    let sd = h.sqrt();
    let normal = StandardNormal;
    for _ in 0..trials {
        let q = rng.gen_range(0..k);
        let mut position = gbest.position.clone();
        let mut velocity = gbest.velocity.clone();
        for local in 0..dim {
            let d = q * dim + local;
            let g1: f64 = normal.sample(rng);
            let g2: f64 = normal.sample(rng);
            velocity[d] = gbest.velocity[d] * (g1 * sd) * bounds.span(local);
            position[d] = gbest.position[d] + (g2 * sd) * velocity[d];
        }
        let fitness = sse(points, &decode(&position, dim))?.0;
        if fitness < gbest.fitness {
            gbest.position = position;
            gbest.velocity = velocity;
            gbest.fitness = fitness;
            gbest.pbest_position.copy_from_slice(&gbest.position);
            gbest.pbest_fitness = gbest.fitness;
        }
    }
    Ok(())
}

/// One step of the mutation-variance decay, floored so the Gaussian stays
/// proper.
pub fn decay_h(h: f64, t_max: usize) -> f64 {
    const H_FLOOR: f64 = 1e-6;
    (h - 1.0 / t_max as f64).max(H_FLOOR)
}

fn decode(position: &[f64], dim: usize) -> Vec<Vec<f64>> {
    position.chunks(dim).map(|c| c.to_vec()).collect()
}

/// Lloyd refinement of the given centroids, also returning the SSE recorded
/// after each iteration. Empty clusters are re-seeded to the point farthest
/// from its assigned centroid.
pub fn kmeans_refine_traced(
    points: &[Vec<f64>],
    centroids: &[Vec<f64>],
) -> Result<(ClusteringResult, Vec<f64>)> {
    let k = centroids.len();
    if k == 0 {
        return Err(Error::EmptyInput("centroids"));
    }
    if k > points.len() {
        return Err(Error::InvalidParams(format!(
            "k = {k} exceeds the number of points {}",
            points.len()
        )));
    }
    // Assignment space is finite and the objective non-increasing, so the
    // loop terminates; the cap guards against tie-induced oscillation on
    // degenerate (duplicate-point) inputs.
    const MAX_ITERATIONS: usize = 1000;
    let dim = points[0].len();
    let mut centroids: Vec<Vec<f64>> = centroids.to_vec();
    let (_, mut assignments) = sse(points, &centroids)?;
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        // Means of the assigned points.
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignments) {
            counts[a] += 1;
            for (s, &x) in sums[a].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for d in 0..dim {
                    centroids[c][d] = sums[c][d] / counts[c] as f64;
                }
            }
        }
        // Re-seed empty clusters onto the worst-served points.
        let mut taken: Vec<usize> = Vec::new();
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let mut far_point = None;
            let mut far_d = -1.0;
            for (pi, p) in points.iter().enumerate() {
                if taken.contains(&pi) {
                    continue;
                }
                let a = assignments[pi];
                let d: f64 = p.iter().zip(&centroids[a]).map(|(x, y)| (x - y) * (x - y)).sum();
                if d > far_d {
                    far_d = d;
                    far_point = Some(pi);
                }
            }
            if let Some(pi) = far_point {
                centroids[c] = points[pi].clone();
                taken.push(pi);
            }
        }
        let (total, new_assignments) = sse(points, &centroids)?;
        trace.push(total);
        if new_assignments == assignments || iterations >= MAX_ITERATIONS {
            let result = ClusteringResult {
                centroids,
                assignments: new_assignments,
                sse: total,
                convergence: Vec::new(),
                refine_iterations: iterations,
                seed: 0,
            };
            return Ok((result, trace));
        }
        assignments = new_assignments;
    }
}

/// Lloyd refinement of the given centroids until assignments stop changing.
pub fn kmeans_refine(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> Result<ClusteringResult> {
    Ok(kmeans_refine_traced(points, centroids)?.0)
}

struct SwarmRun {
    gbest: Particle,
    convergence: Vec<f64>,
}

/// Core PSO loop shared by HPGMK and the plain-PSO baseline. Particles update
/// against the global best frozen at the iteration barrier; mutation (when
/// `mutation_iterations > 0`) runs once per outer iteration on the global
/// best, and h decays once per outer iteration.
fn run_swarm(points: &[Vec<f64>], params: &HpgmkParams) -> Result<SwarmRun> {
    params.validate()?;
    if points.is_empty() {
        return Err(Error::EmptyInput("points"));
    }
    if params.k > points.len() {
        return Err(Error::InvalidParams(format!(
            "k = {} exceeds the number of points {}",
            params.k,
            points.len()
        )));
    }
    let bounds = DataBounds::of(points)?;
    let dim = bounds.dim();
    let len = params.k * dim;

    let mut particle_rngs: Vec<ChaCha8Rng> = (0..params.swarm_size)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(i as u64 + 1);
            rng
        })
        .collect();
    let mut mutation_rng = ChaCha8Rng::seed_from_u64(params.seed);
    mutation_rng.set_stream(0);

    // Positions uniform in the data bounds, velocities within ±10% of the span.
    let mut particles: Vec<Particle> = Vec::with_capacity(params.swarm_size);
    for rng in particle_rngs.iter_mut() {
        let mut position = Vec::with_capacity(len);
        let mut velocity = Vec::with_capacity(len);
        for d in 0..len {
            let lo = bounds.min[d % dim];
            let hi = bounds.max[d % dim];
            position.push(uniform_in(rng, lo, hi));
        }
        for d in 0..len {
            let half = 0.1 * bounds.span(d % dim);
            velocity.push(uniform_in(rng, -half, half));
        }
        let fitness = sse(points, &decode(&position, dim))?.0;
        particles.push(Particle {
            pbest_position: position.clone(),
            pbest_fitness: fitness,
            position,
            velocity,
            fitness,
        });
    }

    let mut gbest = best_of(&particles).clone();
    let mut h = params.h0;
    let mut convergence = Vec::with_capacity(params.max_iterations);
    for t in 0..params.max_iterations {
        let frozen = gbest.position.clone();
        for (p, rng) in particles.iter_mut().zip(particle_rngs.iter_mut()) {
            update_particle(p, &frozen, t, params, &bounds, points, rng)?;
        }
        let candidate = best_of(&particles);
        if candidate.pbest_fitness < gbest.fitness {
            gbest = Particle {
                position: candidate.pbest_position.clone(),
                velocity: candidate.velocity.clone(),
                pbest_position: candidate.pbest_position.clone(),
                pbest_fitness: candidate.pbest_fitness,
                fitness: candidate.pbest_fitness,
            };
        }
        gaussian_mutate_gbest(
            &mut gbest,
            h,
            &bounds,
            params.mutation_iterations,
            points,
            &mut mutation_rng,
        )?;
        h = decay_h(h, params.max_iterations);
        convergence.push(gbest.fitness);
    }
    Ok(SwarmRun { gbest, convergence })
}

/// Ties on pbest fitness go to the lowest particle index.
fn best_of(particles: &[Particle]) -> &Particle {
    particles
        .iter()
        .min_by(|a, b| a.pbest_fitness.total_cmp(&b.pbest_fitness))
        .expect("swarm is non-empty")
}

/// Full HPGMK: PSO with Gaussian mutation, then k-means refinement of the
/// final global-best centroids. Also returns the refinement SSE trace.
pub fn run_hpgmk_traced(
    points: &[Vec<f64>],
    params: &HpgmkParams,
) -> Result<(ClusteringResult, Vec<f64>)> {
    let run = run_swarm(points, params)?;
    let dim = points[0].len();
    let (mut result, trace) = kmeans_refine_traced(points, &decode(&run.gbest.position, dim))?;
    result.convergence = run.convergence;
    result.seed = params.seed;
    Ok((result, trace))
}

/// Full HPGMK: PSO with Gaussian mutation, then k-means refinement.
pub fn run_hpgmk(points: &[Vec<f64>], params: &HpgmkParams) -> Result<ClusteringResult> {
    Ok(run_hpgmk_traced(points, params)?.0)
}

/// Plain PSO baseline: HPGMK with zero mutation trials and no refinement.
pub fn run_pso(points: &[Vec<f64>], params: &HpgmkParams) -> Result<ClusteringResult> {
    let params = HpgmkParams { mutation_iterations: 0, ..params.clone() };
    let run = run_swarm(points, &params)?;
    let dim = points[0].len();
    let centroids = decode(&run.gbest.position, dim);
    let (total, assignments) = sse(points, &centroids)?;
    Ok(ClusteringResult {
        centroids,
        assignments,
        sse: total,
        convergence: run.convergence,
        refine_iterations: 0,
        seed: params.seed,
    })
}

/// Plain k-means baseline: k distinct data points as initial centroids, then
/// Lloyd refinement. The convergence list stays empty (no swarm history).
pub fn run_kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<ClusteringResult> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be >= 1".into()));
    }
    if k > points.len() {
        return Err(Error::InvalidParams(format!(
            "k = {k} exceeds the number of points {}",
            points.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = rand::seq::index::sample(&mut rng, points.len(), k);
    let centroids: Vec<Vec<f64>> = chosen.iter().map(|i| points[i].clone()).collect();
    let mut result = kmeans_refine(points, &centroids)?;
    result.seed = seed;
    Ok(result)
}
