//! Small derivative-free minimizers used by the least-squares fits.

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn clamp_into(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((v, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
        *v = v.clamp(*lo, *hi);
    }
}

/// Nelder-Mead with every trial point clamped into the box. Converged once
/// all vertices lie within `xtol` of the best one in every coordinate.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    step: &[f64],
    lower: &[f64],
    upper: &[f64],
    xtol: f64,
    max_iter: usize,
) -> Minimum {
    let dim = x0.len();
    let eval = |mut x: Vec<f64>| {
        clamp_into(&mut x, lower, upper);
        let v = f(&x);
        (x, if v.is_nan() { f64::INFINITY } else { v })
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push(eval(x0.to_vec()));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += step[i];
        if x[i] > upper[i] {
            x[i] = x0[i] - step[i];
        }
        simplex.push(eval(x));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].0.clone();
        let spread = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&best).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread < xtol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / dim as f64;
            }
        }
        let toward = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };
        let reflected = eval(toward(alpha));
        if reflected.1 < simplex[0].1 {
            let expanded = eval(toward(gamma));
            simplex[dim] = if expanded.1 < reflected.1 { expanded } else { reflected };
        } else if reflected.1 < simplex[dim - 1].1 {
            simplex[dim] = reflected;
        } else {
            let contracted = if reflected.1 < simplex[dim].1 {
                eval(toward(rho))
            } else {
                eval(toward(-rho))
            };
            if contracted.1 < simplex[dim].1.min(reflected.1) {
                simplex[dim] = contracted;
            } else {
                for i in 1..=dim {
                    let x: Vec<f64> = best
                        .iter()
                        .zip(&simplex[i].0)
                        .map(|(b, v)| b + sigma * (v - b))
                        .collect();
                    simplex[i] = eval(x);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    Minimum {
        x,
        f,
        iterations,
        converged,
    }
}

/// Golden-section search for a minimum on [a, b].
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
