use crate::error::{Error, Result};

/// Central-difference gradient: `(f(x + h e_j) - f(x - h e_j)) / 2h` per
/// coordinate. The oracle against which every analytic gradient is checked.
pub fn finite_difference_gradient(
    f: &dyn Fn(&[f64]) -> f64,
    params: &[f64],
    step: f64,
) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        return Err(Error::param("finite-difference step must be positive"));
    }
    let mut grad = Vec::with_capacity(params.len());
    let mut work = params.to_vec();
    for j in 0..params.len() {
        let orig = work[j];
        work[j] = orig + step;
        let plus = f(&work);
        work[j] = orig - step;
        let minus = f(&work);
        work[j] = orig;
        grad.push((plus - minus) / (2.0 * step));
    }
    Ok(grad)
}

/// Relative sup-norm error between two gradients.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let scale = a
        .iter()
        .chain(b)
        .map(|v| v.abs())
        .fold(0.0f64, f64::max)
        .max(1e-12);
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0f64, f64::max) / scale
}

/// Cosine similarity; `None` when either vector is (numerically) zero.
pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let na: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if na < 1e-12 || nb < 1e-12 {
        return None;
    }
    Some(a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / (na * nb))
}
