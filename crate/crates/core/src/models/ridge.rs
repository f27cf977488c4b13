//! Ridge regression by normal equations, with the exact leave-one-out
//! shortcut through the hat matrix.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::data::Dataset;
use crate::error::{Error, Result};

use super::Model;

/// A fitted ridge model plus the quantities needed for residual analysis
/// and leave-one-out error without retraining.
#[derive(Clone, Debug)]
pub struct RidgeFit {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
    /// In-sample residuals `y_i - y_hat_i`.
    pub residuals: Vec<f64>,
    /// Mean squared training residual (the model's `L_S`).
    pub training_loss: f64,
    /// Diagonal of `X (X^T X + Lambda)^-1 X^T`.
    pub hat_diagonal: Vec<f64>,
}

impl RidgeFit {
    pub fn into_model(self) -> Model {
        Model::Linear {
            weights: self.weights,
            intercept: self.intercept,
        }
    }

    /// Exact leave-one-out squared-error mean via `e_i / (1 - h_ii)`.
    /// Agrees with naive per-fold retraining to floating-point accuracy.
    pub fn loo_mean_squared_error(&self) -> f64 {
        let n = self.residuals.len() as f64;
        self.residuals
            .iter()
            .zip(&self.hat_diagonal)
            .map(|(e, h)| {
                let loo = e / (1.0 - h);
                loo * loo
            })
            .sum::<f64>()
            / n
    }
}

/// Minimize `sum_i (y_i - w.x_i - c)^2 + lambda |w|^2` exactly. The
/// intercept `c` is not penalized, so `lambda -> inf` shrinks to the mean
/// response. Real-valued responses are required.
pub fn train_ridge(s: &Dataset, lambda: f64) -> Result<RidgeFit> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::Precondition(format!(
            "ridge lambda must be finite and >= 0, got {lambda}"
        )));
    }
    let n = s.len();
    let p = s.input_dim();
    let cols = p + 1; // intercept column appended last

    let mut design = DMatrix::zeros(n, cols);
    let mut y = DVector::zeros(n);
    for (i, z) in s.points().iter().enumerate() {
        let x = z.model_input();
        for (j, v) in x.iter().enumerate() {
            design[(i, j)] = *v;
        }
        design[(i, p)] = 1.0;
        y[i] = z.response.as_real()?;
    }

    let mut gram = design.transpose() * &design;
    for j in 0..p {
        gram[(j, j)] += lambda;
    }

    let chol = Cholesky::new(gram).ok_or(Error::RegularizationRequired)?;
    let rhs = design.transpose() * &y;
    let beta = chol.solve(&rhs);

    let fitted = &design * &beta;
    let residuals: Vec<f64> = (0..n).map(|i| y[i] - fitted[i]).collect();
    let training_loss = residuals.iter().map(|e| e * e).sum::<f64>() / n as f64;

    // h_ii = x_i^T (X^T X + Lambda)^-1 x_i
    let mut hat_diagonal = Vec::with_capacity(n);
    for i in 0..n {
        let xi = design.row(i).transpose();
        let solved = chol.solve(&xi);
        hat_diagonal.push((xi.transpose() * solved)[(0, 0)]);
    }

    Ok(RidgeFit {
        weights: beta.as_slice()[..p].to_vec(),
        intercept: beta[p],
        lambda,
        residuals,
        training_loss,
        hat_diagonal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DataPoint, Provenance};

    fn dataset(rows: &[(Vec<f64>, f64)]) -> Dataset {
        let points = rows
            .iter()
            .map(|(x, y)| DataPoint::regression(x.clone(), None, *y))
            .collect();
        Dataset::new(points, Provenance::Synthetic).unwrap()
    }

    #[test]
    fn interpolates_an_exact_line() {
        let s = dataset(&[
            (vec![0.0], 1.0),
            (vec![1.0], 3.0),
            (vec![2.0], 5.0),
            (vec![3.0], 7.0),
        ]);
        let fit = train_ridge(&s, 0.0).unwrap();
        assert!(fit.residuals.iter().all(|e| e.abs() < 1e-10));
        assert!((fit.weights[0] - 2.0).abs() < 1e-10);
        assert!((fit.intercept - 1.0).abs() < 1e-10);
    }

    #[test]
    fn huge_lambda_shrinks_to_mean_response() {
        let s = dataset(&[
            (vec![0.0], 1.0),
            (vec![1.0], 2.0),
            (vec![2.0], 6.0),
        ]);
        let fit = train_ridge(&s, 1e12).unwrap();
        assert!(fit.weights[0].abs() < 1e-6);
        assert!((fit.intercept - 3.0).abs() < 1e-6);
    }

    #[test]
    fn singular_design_needs_regularization() {
        // duplicated feature column makes X^T X singular
        let s = dataset(&[
            (vec![1.0, 1.0], 1.0),
            (vec![2.0, 2.0], 2.0),
            (vec![3.0, 3.0], 3.0),
        ]);
        assert!(matches!(
            train_ridge(&s, 0.0),
            Err(Error::RegularizationRequired)
        ));
        assert!(train_ridge(&s, 0.1).is_ok());
    }

    #[test]
    fn training_loss_monotone_in_lambda() {
        let s = dataset(&[
            (vec![0.1, 2.0], 1.4),
            (vec![1.3, -0.4], 0.2),
            (vec![2.2, 0.9], 3.1),
            (vec![-0.7, 1.1], -0.5),
            (vec![0.4, -1.8], 2.2),
        ]);
        let lambdas = [0.0, 0.01, 0.1, 1.0, 10.0, 100.0];
        let losses: Vec<f64> = lambdas
            .iter()
            .map(|&l| train_ridge(&s, l).unwrap().training_loss)
            .collect();
        for w in losses.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "losses not monotone: {losses:?}");
        }
    }
}
