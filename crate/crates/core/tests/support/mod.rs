//! Independent oracles for the acceptance and oracle-check suites. These
//! deliberately avoid the library's own numeric paths: the erf oracles are
//! brute-force series with explicit truncation bounds, and the ridge oracle
//! is plain gradient descent on the penalized objective.

/// Alternating Maclaurin series for erf, accurate to ~1e-15 for |x| <= 2
/// (beyond that, f64 cancellation degrades it; use `erf_series` instead).
/// The alternating-series bound caps the truncation error by the first
/// omitted term.
pub fn erf_taylor_alternating(x: f64) -> f64 {
    let two_over_sqrt_pi = 2.0 / std::f64::consts::PI.sqrt();
    let mut term = x;
    let mut sum = 0.0;
    let mut n = 0u32;
    loop {
        sum += term / f64::from(2 * n + 1);
        n += 1;
        term *= -x * x / f64::from(n);
        if term.abs() / f64::from(2 * n + 1) < 1e-18 {
            break;
        }
    }
    two_over_sqrt_pi * sum
}

/// All-positive-term series `erf(x) = (2/sqrt(pi)) e^{-x^2} sum_k
/// (2x^2)^k x / (2k+1)!!`, free of cancellation for any x; truncation error
/// is bounded by the next term times a geometric factor once the term ratio
/// `2x^2/(2k+3)` drops below one.
pub fn erf_series(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x < 0.0 {
        return -erf_series(-x);
    }
    if x > 7.0 {
        return 1.0; // erfc(7) ~ 4e-23, far below every tolerance here
    }
    let two_over_sqrt_pi = 2.0 / std::f64::consts::PI.sqrt();
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= 2.0 * x2 / f64::from(2 * k + 1);
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    two_over_sqrt_pi * (-x2).exp() * sum
}

/// Ridge objective `sum_i (y_i - w.x_i - c)^2 + lambda |w|^2` minimized by
/// gradient descent with backtracking until the gradient is tiny. Slow and
/// independent of the normal-equations path.
pub fn ridge_gradient_descent_oracle(
    xs: &[Vec<f64>],
    ys: &[f64],
    lambda: f64,
    tol: f64,
) -> (Vec<f64>, f64) {
    let n = xs.len();
    let p = xs[0].len();
    let mut w = vec![0.0; p];
    let mut c = 0.0;

    let gradient = |w: &[f64], c: f64| -> (Vec<f64>, f64) {
        let mut gw = vec![0.0; p];
        let mut gc = 0.0;
        for (x, &y) in xs.iter().zip(ys) {
            let pred: f64 = c + w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>();
            let r = pred - y;
            gc += 2.0 * r;
            for j in 0..p {
                gw[j] += 2.0 * r * x[j];
            }
        }
        for j in 0..p {
            gw[j] += 2.0 * lambda * w[j];
        }
        (gw, gc)
    };
    let objective = |w: &[f64], c: f64| -> f64 {
        let mut obj = 0.0;
        for (x, &y) in xs.iter().zip(ys) {
            let pred: f64 = c + w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>();
            obj += (pred - y) * (pred - y);
        }
        obj + lambda * w.iter().map(|wi| wi * wi).sum::<f64>()
    };

    let mut step = 1.0 / n as f64;
    for _ in 0..2_000_000 {
        let (gw, gc) = gradient(&w, c);
        let gnorm: f64 = (gw.iter().map(|g| g * g).sum::<f64>() + gc * gc).sqrt();
        if gnorm < tol {
            break;
        }
        // backtracking line search on the objective
        let base = objective(&w, c);
        loop {
            let w_next: Vec<f64> = w.iter().zip(&gw).map(|(wi, g)| wi - step * g).collect();
            let c_next = c - step * gc;
            if objective(&w_next, c_next) <= base - 0.5 * step * gnorm * gnorm {
                w = w_next;
                c = c_next;
                step *= 1.2;
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                return (w, c);
            }
        }
    }
    (w, c)
}

/// Spearman rank correlation (no tie correction; inputs here are distinct).
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rank = |vs: &[f64]| -> Vec<f64> {
        let mut idx: Vec<usize> = (0..vs.len()).collect();
        idx.sort_by(|&a, &b| vs[a].partial_cmp(&vs[b]).unwrap());
        let mut ranks = vec![0.0; vs.len()];
        for (r, &i) in idx.iter().enumerate() {
            ranks[i] = r as f64;
        }
        ranks
    };
    let rx = rank(xs);
    let ry = rank(ys);
    let n = xs.len() as f64;
    let mean = (n - 1.0) / 2.0;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for i in 0..xs.len() {
        let a = rx[i] - mean;
        let b = ry[i] - mean;
        num += a * b;
        dx += a * a;
        dy += b * b;
    }
    num / (dx * dy).sqrt()
}
