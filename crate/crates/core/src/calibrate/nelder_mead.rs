//! Nelder-Mead simplex search with dimension-adaptive coefficients.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stop {
    Converged,
    Stalled,
    Budget,
}

#[derive(Debug, Clone)]
pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub stop: Stop,
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct NelderMead {
    pub max_evaluations: usize,
    pub patience: usize,
    pub initial_step: f64,
    /// Stop once the simplex values agree to this and its vertices to
    /// `x_tolerance`.
    pub f_tolerance: f64,
    pub x_tolerance: f64,
}

impl NelderMead {
    pub fn new(max_evaluations: usize, patience: usize) -> Self {
        Self {
            max_evaluations,
            patience,
            initial_step: 1.0,
            f_tolerance: 1e-14,
            x_tolerance: 1e-9,
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.initial_step = step;
        self
    }

    pub fn minimize(&self, mut f: impl FnMut(&[f64]) -> f64, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let nf = n.max(1) as f64;
        let (reflect, expand, contract, shrink) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
        let mut evaluations = 0;
        let mut eval = |x: &[f64], count: &mut usize| {
            *count += 1;
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let v0 = eval(x0, &mut evaluations);
        simplex.push((x0.to_vec(), v0));
        if n == 0 {
            return Minimum {
                x: x0.to_vec(),
                value: v0,
                evaluations,
                iterations: 0,
                stop: Stop::Converged,
                trace: vec![v0],
            };
        }
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += self.initial_step;
            let v = eval(&x, &mut evaluations);
            simplex.push((x, v));
        }

        let mut trace = Vec::new();
        let mut best = f64::INFINITY;
        let mut since_improvement = 0;
        let mut iterations = 0;
        let stop = loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let low = simplex[0].1;
            let high = simplex[n].1;
            trace.push(low);
            if low < best - 1e-15 * best.abs().max(1e-300) {
                best = low;
                since_improvement = 0;
            } else {
                since_improvement += 1;
            }
            let spread = (high - low).abs();
            let diameter = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if spread <= self.f_tolerance && diameter <= self.x_tolerance {
                break Stop::Converged;
            }
            if since_improvement >= self.patience {
                break Stop::Stalled;
            }
            if evaluations >= self.max_evaluations {
                break Stop::Budget;
            }
            iterations += 1;

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }
            let toward = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = toward(reflect);
            let vr = eval(&xr, &mut evaluations);
            if vr < simplex[0].1 {
                let xe = toward(reflect * expand);
                let ve = eval(&xe, &mut evaluations);
                simplex[n] = if ve < vr { (xe, ve) } else { (xr, vr) };
                continue;
            }
            if vr < simplex[n - 1].1 {
                simplex[n] = (xr, vr);
                continue;
            }
            let (xc, vc) = if vr < simplex[n].1 {
                let xc = toward(reflect * contract);
                let vc = eval(&xc, &mut evaluations);
                (xc, vc)
            } else {
                let xc = toward(-contract);
                let vc = eval(&xc, &mut evaluations);
                (xc, vc)
            };
            if vc < vr.min(simplex[n].1) {
                simplex[n] = (xc, vc);
                continue;
            }
            let anchor = simplex[0].0.clone();
            for (x, v) in simplex.iter_mut().skip(1) {
                for (xi, a) in x.iter_mut().zip(&anchor) {
                    *xi = a + shrink * (*xi - a);
                }
                *v = eval(x, &mut evaluations);
            }
        };
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        Minimum {
            x,
            value,
            evaluations,
            iterations,
            stop,
            trace,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = NelderMead::new(20_000, 2_000).minimize(f, &[-1.2, 1.0]);
        assert!(m.value < 1e-10, "{}", m.value);
        assert!((m.x[0] - 1.0).abs() < 1e-4);
        assert_eq!(m.stop, Stop::Converged);
    }

    #[test]
    fn quadratic_in_many_dimensions() {
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * (v - 0.5).powi(2)).sum::<f64>();
        let m = NelderMead::new(50_000, 5_000).minimize(f, &[0.0; 8]);
        assert!(m.value < 1e-8, "{}", m.value);
    }

    #[test]
    fn trace_never_increases() {
        let f = |x: &[f64]| (x[0] - 3.0).abs() + (x[1] + 1.0).powi(2);
        let m = NelderMead::new(500, 100).minimize(f, &[0.0, 0.0]);
        assert!(m.trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(m.evaluations <= 500 + 3);
    }

    #[test]
    fn infinite_values_are_avoided() {
        let f = |x: &[f64]| if x[0] < 0.0 { f64::INFINITY } else { (x[0] - 0.2).powi(2) };
        let m = NelderMead::new(2_000, 500).minimize(f, &[1.0]);
        assert!((m.x[0] - 0.2).abs() < 1e-5);
    }
}
