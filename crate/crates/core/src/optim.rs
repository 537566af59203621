//! Small derivative-free minimizers used by the fitter.

/// Axis-aligned box constraint; points are projected onto it.
#[derive(Debug, Clone)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    fn project(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(*lo, *hi);
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    /// Relative simplex size at which to stop.
    pub x_tol: f64,
    /// Absolute spread of objective values at which to stop.
    pub f_tol: f64,
    pub max_iterations: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            x_tol: 1e-6,
            f_tol: 1e-15,
            max_iterations: 2000,
        }
    }
}

impl NelderMead {
    /// Minimizes `f` from `start` with initial step `scale` per coordinate.
    pub fn minimize<F>(&self, mut f: F, start: &[f64], scale: &[f64], bounds: Option<&Bounds>) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = start.len();
        let project = |x: &mut Vec<f64>| {
            if let Some(b) = bounds {
                b.project(x);
            }
        };
        let mut eval = |x: &[f64]| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let mut x0 = start.to_vec();
        project(&mut x0);
        let f0 = eval(&x0);
        simplex.push((x0.clone(), f0));
        for i in 0..n {
            let mut x = x0.clone();
            x[i] += scale[i];
            project(&mut x);
            if x[i] == x0[i] {
                // Pinned against a bound: step the other way.
                x[i] -= 2.0 * scale[i];
                project(&mut x);
            }
            let v = eval(&x);
            simplex.push((x, v));
        }

        let mut iterations = 0;
        while iterations < self.max_iterations {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = &simplex[0];
            let worst_f = simplex[n].1;
            let size = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs() / (1.0 + b.abs())))
                .fold(0.0, f64::max);
            if size <= self.x_tol && (worst_f - best.1).abs() <= self.f_tol.max(self.x_tol * 1e-9) {
                break;
            }
            if size <= self.x_tol * 1e-3 {
                break;
            }
            iterations += 1;

            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
                .collect();
            let toward = |coef: f64, from: &[f64]| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(from)
                    .map(|(c, w)| c + coef * (c - w))
                    .collect()
            };

            let worst = simplex[n].0.clone();
            let mut reflected = toward(1.0, &worst);
            project(&mut reflected);
            let fr = eval(&reflected);

            if fr < simplex[0].1 {
                let mut expanded = toward(2.0, &worst);
                project(&mut expanded);
                let fe = eval(&expanded);
                simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (reflected, fr);
                continue;
            }
            let (mut contracted, outside) = if fr < simplex[n].1 {
                (toward(0.5, &worst), true)
            } else {
                (toward(-0.5, &worst), false)
            };
            project(&mut contracted);
            let fc = eval(&contracted);
            if (outside && fc <= fr) || (!outside && fc < simplex[n].1) {
                simplex[n] = (contracted, fc);
                continue;
            }
            // Shrink toward the best vertex.
            let best_x = simplex[0].0.clone();
            for entry in simplex.iter_mut().skip(1) {
                let mut x: Vec<f64> = best_x
                    .iter()
                    .zip(&entry.0)
                    .map(|(b, x)| b + 0.5 * (x - b))
                    .collect();
                project(&mut x);
                let v = eval(&x);
                *entry = (x, v);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        Minimum {
            x,
            value,
            iterations,
        }
    }
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
/// Returns `(argmin, value, iterations)`.
pub fn golden_section<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64, max_iterations: usize) -> (f64, f64, usize)
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (hi - lo).abs() > tol * (1.0 + lo.abs().max(hi.abs())) && iterations < max_iterations {
        iterations += 1;
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc, iterations)
    } else {
        (d, fd, iterations)
    }
}
