use super::{LossReport, Reduction};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

/// Summed squared error between a reconstruction and its target. Rows are
/// samples; per-sample terms are row sums.
pub fn mse_loss<T: Real>(
    reconstructed: &Matrix<T>,
    target: &Matrix<T>,
    reduction: Reduction,
) -> Result<LossReport<T>> {
    if reconstructed.shape() != target.shape() {
        return Err(Error::DimensionMismatch {
            expected: target.as_slice().len(),
            got: reconstructed.as_slice().len(),
        });
    }
    let (rows, cols) = target.shape();
    let scale: T = reduction.factor(rows);
    let two = T::lit(2.0);
    let mut grad = Matrix::zeros(rows, cols);
    let mut per_sample = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut acc = T::zero();
        for ((g, &a), &b) in grad
            .row_mut(i)
            .iter_mut()
            .zip(reconstructed.row(i))
            .zip(target.row(i))
        {
            let d = a - b;
            acc += d * d;
            *g = two * d * scale;
        }
        per_sample.push(acc);
    }
    let value = per_sample.iter().copied().sum::<T>() * scale;
    Ok(LossReport {
        value,
        per_sample,
        grad,
        grad_weights: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::{central_diff, max_rel_err, random_matrix};

    #[test]
    fn identical_inputs_give_zero() {
        let a = random_matrix(3, 4, 1);
        let r = mse_loss(&a, &a, Reduction::Sum).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.grad.as_slice().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn small_example() {
        let a = Matrix::from_vec(1, 2, vec![1.0f64, 2.0]).unwrap();
        let b = Matrix::zeros(1, 2);
        let r = mse_loss(&a, &b, Reduction::Sum).unwrap();
        assert_eq!(r.value, 5.0);
        assert_eq!(r.grad.as_slice(), &[2.0, 4.0]);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let a = random_matrix(1, 16, 2);
        let b = random_matrix(1, 16, 3);
        let r = mse_loss(&a, &b, Reduction::Sum).unwrap();
        let fd = central_diff(a.as_slice(), 1e-5, |x| {
            let m = Matrix::from_vec(1, 16, x.to_vec()).unwrap();
            mse_loss(&m, &b, Reduction::Sum).unwrap().value
        });
        assert!(max_rel_err(r.grad.as_slice(), &fd) < 1e-8);
    }

    #[test]
    fn shape_mismatch() {
        let a = Matrix::<f64>::zeros(2, 2);
        let b = Matrix::<f64>::zeros(1, 4);
        assert!(mse_loss(&a, &b, Reduction::Sum).is_err());
    }
}
