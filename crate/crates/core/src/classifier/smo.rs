//! Sequential minimal optimisation for the C-SVM dual with per-sample bounds.
//!
//! Working pairs are chosen by second-order gain: the first index maximally
//! violates the optimality conditions, the second maximises the decrease of
//! the objective along the pair.

use std::sync::Arc;

use super::kernel::PolyKernel;
use crate::matrix::Matrix;
use crate::par;

const TAU: f64 = 1e-12;

/// Kernel rows kept under a least-recently-used policy.
struct RowCache<'a> {
    data: &'a Matrix,
    kernel: PolyKernel,
    slots: Vec<Option<Arc<[f64]>>>,
    last_use: Vec<u64>,
    clock: u64,
    resident: usize,
    capacity: usize,
}

impl<'a> RowCache<'a> {
    fn new(data: &'a Matrix, kernel: PolyKernel, cache_bytes: usize) -> Self {
        let n = data.rows();
        let capacity = (cache_bytes / (8 * n.max(1))).clamp(2, n.max(2));
        Self {
            data,
            kernel,
            slots: vec![None; n],
            last_use: vec![0; n],
            clock: 0,
            resident: 0,
            capacity,
        }
    }

    fn row(&mut self, i: usize) -> Arc<[f64]> {
        self.clock += 1;
        self.last_use[i] = self.clock;
        if let Some(r) = &self.slots[i] {
            return Arc::clone(r);
        }
        if self.resident >= self.capacity {
            let victim = (0..self.slots.len())
                .filter(|&k| k != i && self.slots[k].is_some())
                .min_by_key(|&k| self.last_use[k]);
            if let Some(v) = victim {
                self.slots[v] = None;
                self.resident -= 1;
            }
        }
        let xi = self.data.row(i);
        let (data, kernel) = (self.data, self.kernel);
        let row: Arc<[f64]> = par::map_range(data.rows(), |j| kernel.eval(xi, data.row(j))).into();
        self.slots[i] = Some(Arc::clone(&row));
        self.resident += 1;
        row
    }
}

pub(crate) struct SmoProblem<'a> {
    pub data: &'a Matrix,
    /// +1 or -1.
    pub y: &'a [f64],
    /// Upper bound of every multiplier.
    pub bounds: &'a [f64],
    pub kernel: PolyKernel,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub cache_bytes: usize,
}

pub(crate) struct SmoSolution {
    pub alpha: Vec<f64>,
    /// Decision offset: f(x) = sum alpha_i y_i K(x_i, x) + bias.
    pub bias: f64,
    /// Final maximal violation of the optimality conditions.
    pub gap: f64,
    pub iterations: usize,
}

pub(crate) fn solve(p: &SmoProblem) -> SmoSolution {
    let n = p.data.rows();
    let (y, c) = (p.y, p.bounds);
    let diag: Vec<f64> = (0..n).map(|i| p.kernel.eval(p.data.row(i), p.data.row(i))).collect();
    let mut cache = RowCache::new(p.data, p.kernel, p.cache_bytes);
    let mut alpha = vec![0.0; n];
    // gradient of 1/2 a'Qa - e'a
    let mut grad = vec![-1.0; n];
    let up = |a: f64, y: f64, c: f64| (y > 0.0 && a < c) || (y < 0.0 && a > 0.0);
    let low = |a: f64, y: f64, c: f64| (y > 0.0 && a > 0.0) || (y < 0.0 && a < c);
    let mut iterations = 0;
    let mut gap;
    loop {
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        let mut gmin = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if up(alpha[t], y[t], c[t]) && v > gmax {
                gmax = v;
                i = t;
            }
            if low(alpha[t], y[t], c[t]) && v < gmin {
                gmin = v;
            }
        }
        gap = gmax - gmin;
        if i == usize::MAX || gap < p.tolerance || iterations >= p.max_iterations {
            break;
        }
        let ki = cache.row(i);
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if !low(alpha[t], y[t], c[t]) {
                continue;
            }
            let b = gmax + y[t] * grad[t];
            if b > 0.0 {
                let a = diag[i] + diag[t] - 2.0 * ki[t];
                let a = if a > 0.0 { a } else { TAU };
                let gain = -(b * b) / a;
                if gain <= best {
                    best = gain;
                    j = t;
                }
            }
        }
        if j == usize::MAX {
            break;
        }
        iterations += 1;
        let kj = cache.row(j);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (ci, cj) = (c[i], c[j]);
        let qij = y[i] * y[j] * ki[j];
        if y[i] != y[j] {
            let quad = (diag[i] + diag[j] + 2.0 * qij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if alpha[j] > cj {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let quad = (diag[i] + diag[j] - 2.0 * qij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
        }
    }
    if iterations >= p.max_iterations {
        log::warn!("SMO stopped after {iterations} iterations with gap {gap:.3e}");
    }
    // offset from free multipliers, or the middle of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free_sum, mut free) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        let at_upper = alpha[t] >= c[t];
        let at_lower = alpha[t] <= 0.0;
        if at_upper {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if at_lower {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 {
        free_sum / free as f64
    } else {
        (ub + lb) / 2.0
    };
    SmoSolution {
        alpha,
        bias: -rho,
        gap: gap.max(0.0),
        iterations,
    }
}
