//! Bounded Levenberg-Marquardt least squares for small curve models.

use nalgebra::{DMatrix, DVector};

/// A smooth scalar model `y = f(x; q)` with an analytic gradient in `q`.
pub trait CurveModel: Sync {
    fn name(&self) -> &'static str;
    fn parameter_names(&self) -> &'static [&'static str];
    fn value(&self, x: f64, q: &[f64]) -> f64;
    /// Writes `∂f/∂q_k` into `grad`.
    fn gradient(&self, x: f64, q: &[f64], grad: &mut [f64]);

    fn n_params(&self) -> usize {
        self.parameter_names().len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Relative (scaled) step below which the iteration stops.
    pub xtol: f64,
    /// Max-norm of the scaled gradient below which the iteration stops.
    pub gtol: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions { max_iterations: 500, xtol: 1e-10, gtol: 1e-12 }
    }
}

/// Data, optional weights and per-parameter bounds / freeze mask.
pub struct Problem<'a> {
    pub model: &'a dyn CurveModel,
    pub x: &'a [f64],
    pub y: &'a [f64],
    /// Inverse standard deviations; `None` means unweighted.
    pub weights: Option<Vec<f64>>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub free: Vec<bool>,
}

impl<'a> Problem<'a> {
    pub fn new(model: &'a dyn CurveModel, x: &'a [f64], y: &'a [f64]) -> Self {
        let k = model.n_params();
        Problem {
            model,
            x,
            y,
            weights: None,
            lower: vec![f64::NEG_INFINITY; k],
            upper: vec![f64::INFINITY; k],
            free: vec![true; k],
        }
    }

    pub fn n_free(&self) -> usize {
        self.free.iter().filter(|f| **f).count()
    }

    fn free_indices(&self) -> Vec<usize> {
        (0..self.free.len()).filter(|&i| self.free[i]).collect()
    }

    fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    pub fn residuals(&self, q: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.x.len(),
            self.x.iter().zip(self.y).enumerate().map(|(i, (&x, &y))| (y - self.model.value(x, q)) * self.weight(i)),
        )
    }

    /// Weighted Jacobian of the model over the free parameters.
    pub fn jacobian(&self, q: &[f64]) -> DMatrix<f64> {
        let idx = self.free_indices();
        let mut grad = vec![0.0; q.len()];
        let mut j = DMatrix::zeros(self.x.len(), idx.len());
        for (i, &x) in self.x.iter().enumerate() {
            self.model.gradient(x, q, &mut grad);
            let w = self.weight(i);
            for (c, &k) in idx.iter().enumerate() {
                j[(i, c)] = grad[k] * w;
            }
        }
        j
    }

    fn clamp(&self, q: &mut [f64]) {
        for (k, v) in q.iter_mut().enumerate() {
            *v = v.clamp(self.lower[k], self.upper[k]);
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmSolution {
    pub params: Vec<f64>,
    /// Sum of squared weighted residuals.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
}

fn solve_damped(a: &DMatrix<f64>, g: &DVector<f64>, diag: &[f64], lambda: f64) -> Option<DVector<f64>> {
    let mut m = a.clone();
    for (k, d) in diag.iter().enumerate() {
        m[(k, k)] += lambda * d;
    }
    if let Some(ch) = m.clone().cholesky() {
        return Some(ch.solve(g));
    }
    let svd = m.svd(true, true);
    svd.solve(g, 1e-14 * svd.singular_values.max()).ok()
}

/// Minimizes the weighted squared residual starting from `start`.
pub fn solve(problem: &Problem, start: &[f64], options: &LmOptions) -> LmSolution {
    let idx = problem.free_indices();
    let mut q = start.to_vec();
    problem.clamp(&mut q);
    let mut r = problem.residuals(&q);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let mut scale = vec![0.0; idx.len()];
    let mut gradient_norm = f64::INFINITY;

    if idx.is_empty() || !cost.is_finite() {
        return LmSolution { params: q, cost, iterations: 0, converged: idx.is_empty(), gradient_norm: 0.0 };
    }

    for iteration in 1..=options.max_iterations {
        let j = problem.jacobian(&q);
        let a = j.transpose() * &j;
        let g = j.transpose() * &r;
        for (k, s) in scale.iter_mut().enumerate() {
            *s = f64::max(*s, a[(k, k)]);
        }
        let floor = scale.iter().copied().fold(0.0, f64::max) * 1e-30 + f64::MIN_POSITIVE;
        let diag: Vec<f64> = scale.iter().map(|s| s.max(floor)).collect();

        // cosine between the residual and each Jacobian column
        gradient_norm = if cost > 0.0 {
            g.iter().zip(&diag).map(|(gk, d)| (gk / d.sqrt()).abs()).fold(0.0, f64::max) / cost.sqrt()
        } else {
            0.0
        };
        if gradient_norm < options.gtol {
            return LmSolution { params: q, cost, iterations: iteration, converged: true, gradient_norm };
        }

        loop {
            let Some(step) = solve_damped(&a, &g, &diag, lambda) else {
                lambda *= 10.0;
                if lambda > 1e20 {
                    return LmSolution { params: q, cost, iterations: iteration, converged: true, gradient_norm };
                }
                continue;
            };
            let mut trial = q.clone();
            for (c, &k) in idx.iter().enumerate() {
                trial[k] += step[c];
            }
            problem.clamp(&mut trial);
            let r_new = problem.residuals(&trial);
            let cost_new = r_new.norm_squared();

            let step_norm: f64 = idx.iter().enumerate().map(|(c, &k)| diag[c] * (trial[k] - q[k]).powi(2)).sum::<f64>().sqrt();
            let x_norm: f64 = idx.iter().enumerate().map(|(c, &k)| diag[c] * q[k].powi(2)).sum::<f64>().sqrt();
            let small_step = step_norm <= options.xtol * (x_norm + options.xtol);

            if cost_new.is_finite() && cost_new <= cost {
                q = trial;
                r = r_new;
                let improved = cost_new < cost;
                cost = cost_new;
                lambda = (lambda / 3.0).max(1e-15);
                if small_step || !improved {
                    return LmSolution { params: q, cost, iterations: iteration, converged: true, gradient_norm };
                }
                break;
            }
            if small_step {
                // no downhill step exists at this resolution
                return LmSolution { params: q, cost, iterations: iteration, converged: true, gradient_norm };
            }
            lambda *= 4.0;
            if lambda > 1e20 {
                return LmSolution { params: q, cost, iterations: iteration, converged: true, gradient_norm };
            }
        }
    }
    LmSolution { params: q, cost, iterations: options.max_iterations, converged: false, gradient_norm }
}

/// Parameter covariance `(JᵀJ)⁺ · χ²/(n − p)` over the free parameters,
/// embedded in the full parameter space (fixed rows/columns are zero), plus
/// the indices of parameters lying in the numerical null space.
pub fn covariance(problem: &Problem, sol: &LmSolution) -> (DMatrix<f64>, Vec<usize>) {
    let k = problem.model.n_params();
    let idx = problem.free_indices();
    let n = problem.x.len();
    let mut cov = DMatrix::zeros(k, k);
    let mut unidentifiable = Vec::new();
    if idx.is_empty() {
        return (cov, unidentifiable);
    }
    let j = problem.jacobian(&sol.params);
    let a = j.transpose() * &j;
    let p = idx.len();
    let dof = n.saturating_sub(p);
    let chi2_red = if dof > 0 { sol.cost / dof as f64 } else { 0.0 };

    // normalize to unit diagonal before the pseudo-inverse
    let d: Vec<f64> = (0..p).map(|c| a[(c, c)].sqrt()).collect();
    let dmax = d.iter().copied().fold(0.0, f64::max);
    let mut scaled = DMatrix::zeros(p, p);
    for r in 0..p {
        for c in 0..p {
            if d[r] > 1e-14 * dmax && d[c] > 1e-14 * dmax {
                scaled[(r, c)] = a[(r, c)] / (d[r] * d[c]);
            }
        }
    }
    let svd = scaled.svd(true, true);
    let smax = svd.singular_values.max();
    let tol = 1e-12 * smax.max(f64::MIN_POSITIVE);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let mut pinv = DMatrix::zeros(p, p);
    for (s_idx, &s) in svd.singular_values.iter().enumerate() {
        if s > tol {
            pinv += (vt.row(s_idx).transpose() * u.column(s_idx).transpose()) / s;
        } else {
            for c in 0..p {
                if vt[(s_idx, c)].abs() > 0.1 && !unidentifiable.contains(&idx[c]) {
                    unidentifiable.push(idx[c]);
                }
            }
        }
    }
    for (c, &dc) in d.iter().enumerate() {
        if dc <= 1e-14 * dmax && !unidentifiable.contains(&idx[c]) {
            unidentifiable.push(idx[c]);
        }
    }
    for (r, &ir) in idx.iter().enumerate() {
        for (c, &ic) in idx.iter().enumerate() {
            if d[r] > 0.0 && d[c] > 0.0 {
                cov[(ir, ic)] = pinv[(r, c)] / (d[r] * d[c]) * chi2_red;
            }
        }
    }
    for &u in &unidentifiable {
        cov[(u, u)] = f64::INFINITY;
    }
    unidentifiable.sort_unstable();
    (cov, unidentifiable)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Line;
    impl CurveModel for Line {
        fn name(&self) -> &'static str {
            "line"
        }
        fn parameter_names(&self) -> &'static [&'static str] {
            &["slope", "intercept"]
        }
        fn value(&self, x: f64, q: &[f64]) -> f64 {
            q[0] * x + q[1]
        }
        fn gradient(&self, x: f64, _q: &[f64], g: &mut [f64]) {
            g[0] = x;
            g[1] = 1.0;
        }
    }

    #[test]
    fn linear_problem_converges_exactly() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|x| 3.0 * x - 2.0).collect();
        let p = Problem::new(&Line, &x, &y);
        let s = solve(&p, &[0.0, 0.0], &LmOptions::default());
        assert!(s.converged);
        assert!((s.params[0] - 3.0).abs() < 1e-10 && (s.params[1] + 2.0).abs() < 1e-10);
    }

    #[test]
    fn frozen_and_bounded_parameters() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|x| 3.0 * x - 2.0).collect();
        let mut p = Problem::new(&Line, &x, &y);
        p.free[1] = false;
        let s = solve(&p, &[0.0, 0.0], &LmOptions::default());
        assert_eq!(s.params[1], 0.0);
        let mut p = Problem::new(&Line, &x, &y);
        p.upper[0] = 2.0;
        let s = solve(&p, &[0.0, 0.0], &LmOptions::default());
        assert_eq!(s.params[0], 2.0);
        let (cov, _) = covariance(&p, &s);
        assert!(cov[(0, 0)] >= 0.0 && cov[(1, 1)] >= 0.0);
    }

    #[test]
    fn degenerate_column_is_unidentifiable() {
        let x = vec![0.0; 6];
        let y = vec![1.0; 6];
        let p = Problem::new(&Line, &x, &y);
        let s = solve(&p, &[0.0, 0.0], &LmOptions::default());
        let (cov, bad) = covariance(&p, &s);
        assert_eq!(bad, vec![0]);
        assert!(cov[(0, 0)].is_infinite());
        assert!((s.params[1] - 1.0).abs() < 1e-10);
    }
}
