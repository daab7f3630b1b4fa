/// Nelder–Mead simplex minimisation.
///
/// `step` sets the initial simplex edge along each axis. Stops when the spread
/// of simplex values drops below `tol` or after `max_iter` iterations. Returns
/// the best vertex and its value.
pub fn nelder_mead<F>(
    f: F,
    start: &[f64],
    step: &[f64],
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
    assert_eq!(dim, step.len());
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), eval(start)));
    for i in 0..dim {
        let mut x = start.to_vec();
        x[i] += step[i];
        let v = eval(&x);
        simplex.push((x, v));
    }

    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(ai, bi)| ai + t * (bi - ai)).collect()
    };

    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if (worst - best).abs() <= tol * (1.0 + best.abs()) {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }

        let worst_x = simplex[dim].0.clone();
        // reflection through the centroid
        let reflected = combine(&centroid, &worst_x, -1.0);
        let fr = eval(&reflected);
        if fr < simplex[0].1 {
            let expanded = combine(&centroid, &worst_x, -2.0);
            let fe = eval(&expanded);
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let contracted = if fr < worst {
            combine(&centroid, &reflected, 0.5)
        } else {
            combine(&centroid, &worst_x, 0.5)
        };
        let fc = eval(&contracted);
        if fc < worst.min(fr) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        // shrink toward the best vertex
        let best_x = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = combine(&best_x, &vertex.0, 0.5);
            let v = eval(&x);
            *vertex = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_rosenbrock_minimum() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let (x, v) = nelder_mead(rosen, &[-1.2, 1.0], &[0.1, 0.1], 1e-14, 5000);
        assert!(v < 1e-8, "{v}");
        assert!((x[0] - 1.0).abs() < 1e-3 && (x[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn respects_infinite_walls() {
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::INFINITY
            } else {
                (x[0] - 0.3).powi(2)
            }
        };
        let (x, _) = nelder_mead(f, &[1.0], &[0.5], 1e-12, 500);
        assert!((x[0] - 0.3).abs() < 1e-4);
    }
}
