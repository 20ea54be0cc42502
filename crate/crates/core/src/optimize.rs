//! Derivative-free minimization.

/// Nelder–Mead settings.
#[derive(Clone, Copy, Debug)]
pub struct NelderMead {
    /// Edge length of the initial simplex.
    pub step: f64,
    /// Stop when the spread of simplex values falls below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            step: 0.5,
            tol: 1e-6,
            max_iter: 5000,
        }
    }
}

impl NelderMead {
    /// Minimizes `f` from `x0`; returns the best point and its value.
    pub fn minimize(&self, f: impl Fn(&[f64]) -> f64, x0: &[f64]) -> (Vec<f64>, f64) {
        let d = x0.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
        simplex.push((x0.to_vec(), f(x0)));
        for i in 0..d {
            let mut x = x0.to_vec();
            x[i] += self.step;
            let v = f(&x);
            simplex.push((x, v));
        }
        let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
        for _ in 0..self.max_iter {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if (simplex[d].1 - simplex[0].1).abs() <= self.tol {
                break;
            }
            let mut centroid = vec![0.0; d];
            for (x, _) in &simplex[..d] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / d as f64;
                }
            }
            let toward = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[d].0)
                    .map(|(c, w)| c + t * (w - c))
                    .collect()
            };
            let xr = toward(-alpha);
            let fr = f(&xr);
            if fr < simplex[0].1 {
                let xe = toward(-gamma);
                let fe = f(&xe);
                simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[d - 1].1 {
                simplex[d] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < simplex[d].1 {
                let x = toward(-rho);
                let v = f(&x);
                (x, v)
            } else {
                let x = toward(rho);
                let v = f(&x);
                (x, v)
            };
            if fc < simplex[d].1.min(fr) {
                simplex[d] = (xc, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for (x, v) in simplex.iter_mut().skip(1) {
                for (xi, bi) in x.iter_mut().zip(&best) {
                    *xi = bi + sigma * (*xi - bi);
                }
                *v = f(x);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        simplex.swap_remove(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2) + 0.5;
        let nm = NelderMead { tol: 1e-14, ..Default::default() };
        let (x, v) = nm.minimize(f, &[0.0, 0.0]);
        assert!((x[0] - 1.0).abs() < 1e-5 && (x[1] + 2.0).abs() < 1e-5);
        assert!((v - 0.5).abs() < 1e-10);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let nm = NelderMead { tol: 1e-16, max_iter: 20000, ..Default::default() };
        let (x, _) = nm.minimize(f, &[-1.2, 1.0]);
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] - 1.0).abs() < 1e-4, "{x:?}");
    }
}
