//! Brute-force reference implementations and random instance generators
//! shared by the integration tests. Nothing here calls the library's
//! solvers, cost matrices or base metric.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trajmetric::{
    BernoulliDensity, BernoulliSequence, Density, MetricParams, SequenceSet, StateVector,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// 2-Wasserstein distance between planar densities through the 2x2 closed
/// form `tr sqrt(A^1/2 B A^1/2) = sqrt(tr(AB) + 2 sqrt(det A det B))`.
pub fn w2_planar(a: &Density, b: &Density) -> f64 {
    let (ma, mb) = (a.mean().as_slice(), b.mean().as_slice());
    assert_eq!(ma.len(), 2, "planar oracle only");
    let dm = (ma[0] - mb[0]).powi(2) + (ma[1] - mb[1]).powi(2);
    let zero = DMatrix::zeros(2, 2);
    let ca = a.covariance().unwrap_or(&zero);
    let cb = b.covariance().unwrap_or(&zero);
    let det = |m: &DMatrix<f64>| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).max(0.0);
    let tr_ab = ca[(0, 0)] * cb[(0, 0)] + ca[(0, 1)] * cb[(1, 0)] + ca[(1, 0)] * cb[(0, 1)] + ca[(1, 1)] * cb[(1, 1)];
    let cross = (tr_ab + 2.0 * (det(ca) * det(cb)).sqrt()).max(0.0).sqrt();
    let tr = ca[(0, 0)] + ca[(1, 1)] + cb[(0, 0)] + cb[(1, 1)];
    (dm + tr - 2.0 * cross).max(0.0).sqrt()
}

fn tau(seq: &BernoulliSequence, k: usize) -> Option<&BernoulliDensity> {
    let t = seq.start_time();
    (k >= t && k < t + seq.densities().len()).then(|| &seq.densities()[k - t])
}

/// All injective assignment vectors: entry `i` is 0 (unassigned) or `j + 1`.
pub fn assignment_vectors(nx: usize, ny: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, nx: usize, ny: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == nx {
            out.push(cur.clone());
            return;
        }
        cur.push(0);
        rec(i + 1, nx, ny, used, cur, out);
        cur.pop();
        for j in 0..ny {
            if !used[j] {
                used[j] = true;
                cur.push(j + 1);
                rec(i + 1, nx, ny, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(0, nx, ny, &mut vec![false; ny], &mut Vec::new(), &mut out);
    out
}

fn switch_units(a: &[usize], b: &[usize]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&u, &v)| match (u, v) {
            _ if u == v => 0.0,
            (0, _) | (_, 0) => 0.5,
            _ => 1.0,
        })
        .sum()
}

/// Minimum over every sequence of assignment vectors of the step costs plus
/// switching costs, in p-th power.
fn min_over_vector_sequences(
    nx: usize,
    ny: usize,
    window: usize,
    step_cost: impl Fn(usize, &[usize]) -> f64,
    params: &MetricParams,
) -> f64 {
    let vectors = assignment_vectors(nx, ny);
    let v = vectors.len();
    let costs: Vec<Vec<f64>> = (1..=window)
        .map(|k| vectors.iter().map(|pi| step_cost(k, pi)).collect())
        .collect();
    let gamma_p = params.switch_cost().powf(params.order());
    let mut best = f64::INFINITY;
    let mut idx = vec![0usize; window];
    loop {
        let mut total = 0.0;
        for k in 0..window {
            total += costs[k][idx[k]];
            if k + 1 < window {
                total += gamma_p * switch_units(&vectors[idx[k]], &vectors[idx[k + 1]]);
            }
        }
        best = best.min(total);
        let mut pos = 0;
        loop {
            if pos == window {
                return best;
            }
            idx[pos] += 1;
            if idx[pos] < v {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// PTGOSPA in p-th power straight from the multidimensional-assignment definition.
pub fn brute_force_ptgospa(x: &SequenceSet, y: &SequenceSet, params: &MetricParams) -> f64 {
    let (c, p) = (params.cutoff(), params.order());
    let half = c.powf(p) / 2.0;
    let (xs, ys) = (x.sequences(), y.sequences());
    let step = |k: usize, pi: &[usize]| {
        let mut cost = 0.0;
        let mut y_in_pair = vec![false; ys.len()];
        for (i, &a) in pi.iter().enumerate() {
            let xi = tau(&xs[i], k);
            let yj = if a > 0 { tau(&ys[a - 1], k) } else { None };
            match (xi, yj) {
                (Some(u), Some(v)) if w2_planar(u.density(), v.density()) < c => {
                    let d = w2_planar(u.density(), v.density());
                    let (rx, ry) = (u.existence(), v.existence());
                    cost += rx.min(ry) * d.powf(p) + (rx - ry).abs() * half;
                    y_in_pair[a - 1] = true;
                }
                (Some(u), _) => cost += u.existence() * half,
                (None, _) => {}
            }
        }
        for (j, s) in ys.iter().enumerate() {
            if let (false, Some(v)) = (y_in_pair[j], tau(s, k)) {
                cost += v.existence() * half;
            }
        }
        cost
    };
    min_over_vector_sequences(xs.len(), ys.len(), x.window_length(), step, params)
}

/// Point-trajectory GOSPA over time (r = 1, Dirac) from its own definition,
/// using Euclidean distances between the points.
pub fn brute_force_tgospa(x: &SequenceSet, y: &SequenceSet, params: &MetricParams) -> f64 {
    let (c, p) = (params.cutoff(), params.order());
    let half = c.powf(p) / 2.0;
    let (xs, ys) = (x.sequences(), y.sequences());
    let point = |b: &BernoulliDensity| b.density().mean().as_slice().to_vec();
    let step = |k: usize, pi: &[usize]| {
        let mut cost = 0.0;
        let mut y_taken = vec![false; ys.len()];
        for (i, &a) in pi.iter().enumerate() {
            let xi = tau(&xs[i], k);
            let yj = if a > 0 { tau(&ys[a - 1], k) } else { None };
            if a > 0 {
                y_taken[a - 1] = true;
            }
            cost += match (xi, yj) {
                (Some(u), Some(v)) => {
                    let (pu, pv) = (point(u), point(v));
                    let d = pu.iter().zip(&pv).map(|(s, t)| (s - t).powi(2)).sum::<f64>().sqrt();
                    d.min(c).powf(p)
                }
                (Some(_), None) | (None, Some(_)) => half,
                (None, None) => 0.0,
            };
        }
        for (j, s) in ys.iter().enumerate() {
            if !y_taken[j] && tau(s, k).is_some() {
                cost += half;
            }
        }
        cost
    };
    min_over_vector_sequences(xs.len(), ys.len(), x.window_length(), step, params)
}

/// PGOSPA in p-th power over all assignment sets between two lists of
/// Bernoulli densities.
pub fn brute_force_pgospa(x: &[BernoulliDensity], y: &[BernoulliDensity], params: &MetricParams) -> f64 {
    let (c, p) = (params.cutoff(), params.order());
    let half = c.powf(p) / 2.0;
    assignment_vectors(x.len(), y.len())
        .iter()
        .map(|theta| {
            let mut cost = 0.0;
            let mut y_free = vec![true; y.len()];
            for (i, &a) in theta.iter().enumerate() {
                if a == 0 {
                    cost += x[i].existence() * half;
                } else {
                    let (u, v) = (&x[i], &y[a - 1]);
                    let d = w2_planar(u.density(), v.density());
                    let (rx, ry) = (u.existence(), v.existence());
                    cost += rx.min(ry) * d.powf(p) + (rx - ry).abs() * half;
                    y_free[a - 1] = false;
                }
            }
            cost + y.iter().zip(&y_free).filter(|(_, f)| **f).map(|(v, _)| v.existence() * half).sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Random existence, Dirac or Gaussian densities.
    Mixed,
    /// Existence one, Dirac densities.
    Points,
}

fn random_density(rng: &mut ChaCha8Rng, centre: [f64; 2], kind: Kind) -> BernoulliDensity {
    let mean = StateVector::new(centre.to_vec()).unwrap();
    if kind == Kind::Points {
        return BernoulliDensity::certain(mean);
    }
    let r = rng.random_range(0.05..=1.0);
    let density = if rng.random_bool(0.5) {
        Density::dirac(mean)
    } else {
        let (a, b, d) = (rng.random_range(0.0..2.0), rng.random_range(-1.0..1.0), rng.random_range(0.0..2.0));
        let l = DMatrix::from_row_slice(2, 2, &[a, 0.0, b, d]);
        let cov = &l * l.transpose();
        let cov = (&cov + cov.transpose()) * 0.5;
        Density::gaussian(mean, cov).unwrap()
    };
    BernoulliDensity::new(r, density).unwrap()
}

/// Up to `max_n` sequences on random walks in a 12 x 12 box.
pub fn random_set(rng: &mut ChaCha8Rng, window: usize, max_n: usize, kind: Kind) -> SequenceSet {
    let n = rng.random_range(0..=max_n);
    let sequences = (0..n)
        .map(|_| {
            let start = rng.random_range(1..=window);
            let len = rng.random_range(1..=window - start + 1);
            let mut pos = [rng.random_range(0.0..12.0), rng.random_range(0.0..12.0)];
            let densities = (0..len)
                .map(|_| {
                    let d = random_density(rng, pos, kind);
                    pos[0] += rng.random_range(-3.0..3.0);
                    pos[1] += rng.random_range(-3.0..3.0);
                    d
                })
                .collect();
            BernoulliSequence::new(start, densities).unwrap()
        })
        .collect();
    SequenceSet::new(window, sequences).unwrap()
}

/// A copy of `set` with jittered means, so that related sets are close.
pub fn jitter(rng: &mut ChaCha8Rng, set: &SequenceSet, scale: f64) -> SequenceSet {
    let sequences = set
        .sequences()
        .iter()
        .map(|s| {
            let densities = s
                .densities()
                .iter()
                .map(|b| {
                    let m = b.density().mean().as_slice();
                    let mean = StateVector::new(
                        m.iter().map(|v| v + rng.random_range(-scale..scale)).collect(),
                    )
                    .unwrap();
                    let density = match b.density().covariance() {
                        Some(c) => Density::gaussian(mean, c.clone()).unwrap(),
                        None => Density::dirac(mean),
                    };
                    BernoulliDensity::new(b.existence(), density).unwrap()
                })
                .collect();
            BernoulliSequence::new(s.start_time(), densities).unwrap()
        })
        .collect();
    SequenceSet::new(set.window_length(), sequences).unwrap()
}

/// The Bernoulli densities present at step `k`.
pub fn present(set: &SequenceSet, k: usize) -> Vec<BernoulliDensity> {
    set.sequences().iter().filter_map(|s| tau(s, k).cloned()).collect()
}
