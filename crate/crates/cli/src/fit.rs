//! Least-squares fits for the two scaling laws observed in the experiments.
//!
//! * Blocking-pair decay: `mean_nbp = a * n^2 * 2^(-b * t / n)`. Taking
//!   log2, `log2(y) - 2 log2(n) = log2(a) - b * (t/n)`, which is linear in
//!   `(log2(a), b)`; rows with zero mean are skipped.
//! * Median steps to stability: `t_med = c * n * (d + 2 log2(n))`, linear in
//!   the basis `{n, n log2(n)}` with coefficients `(c*d, 2c)`.

use serde::Serialize;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FitModel {
    BlockingDecay,
    TMed,
}

/// Fitted parameters: `(a, b)` for the decay model, `(c, d)` for the
/// median-steps model. `residual` is the sum of squared errors in the space
/// the fit ran in (log2 for the decay model, steps for the other).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub model: FitModel,
    pub params: (f64, f64),
    pub residual: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} usable data points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("normal equations are singular; the data cannot identify the parameters")]
    DegenerateFit,
}

/// Row of decay data: `(n, t, mean_nbp)`.
pub type DecayPoint = (usize, usize, f64);
/// Row of median-steps data: `(n, median_steps)`.
pub type MedianPoint = (usize, f64);

pub fn fit_blocking_decay(rows: &[DecayPoint]) -> Result<FitResult, FitError> {
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter(|&&(_, _, y)| y > 0.0)
        .map(|&(n, t, y)| {
            let x = t as f64 / n as f64;
            let z = y.log2() - 2.0 * (n as f64).log2();
            (x, z)
        })
        .collect();
    if usable.len() < 3 {
        return Err(FitError::InsufficientData {
            needed: 3,
            got: usable.len(),
        });
    }
    // z = alpha - b x: ordinary least squares on (1, -x).
    let (alpha, minus_b) = solve_two_basis(&usable, |_| 1.0, |x| x)?;
    let a = alpha.exp2();
    let b = -minus_b;
    let residual = usable
        .iter()
        .map(|&(x, z)| {
            let e = z - (alpha + minus_b * x);
            e * e
        })
        .sum();
    Ok(FitResult {
        model: FitModel::BlockingDecay,
        params: (a, b),
        residual,
    })
}

pub fn fit_tmed(rows: &[MedianPoint]) -> Result<FitResult, FitError> {
    if rows.len() < 3 {
        return Err(FitError::InsufficientData {
            needed: 3,
            got: rows.len(),
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|&(n, y)| (n as f64, y)).collect();
    // y = alpha n + beta n log2 n with alpha = c d and beta = 2 c.
    let (alpha, beta) = solve_two_basis(&pts, |n| n, |n| n * n.log2())?;
    if beta.abs() < 1e-12 {
        return Err(FitError::DegenerateFit);
    }
    let c = beta / 2.0;
    let d = alpha / c;
    let residual = pts
        .iter()
        .map(|&(n, y)| {
            let e = y - (alpha * n + beta * n * n.log2());
            e * e
        })
        .sum();
    Ok(FitResult {
        model: FitModel::TMed,
        params: (c, d),
        residual,
    })
}

/// Coefficient of determination of a median-steps fit against its data.
pub fn tmed_r_squared(rows: &[MedianPoint], fit: &FitResult) -> f64 {
    let (c, d) = fit.params;
    let mean_y = rows.iter().map(|&(_, y)| y).sum::<f64>() / rows.len() as f64;
    let ss_tot: f64 = rows
        .iter()
        .map(|&(_, y)| (y - mean_y) * (y - mean_y))
        .sum();
    let ss_err: f64 = rows
        .iter()
        .map(|&(n, y)| {
            let n = n as f64;
            let pred = c * n * (d + 2.0 * n.log2());
            (y - pred) * (y - pred)
        })
        .sum();
    if ss_tot == 0.0 {
        return if ss_err == 0.0 { 1.0 } else { f64::NEG_INFINITY };
    }
    1.0 - ss_err / ss_tot
}

/// Predicted mean blocking pairs from a decay fit.
pub fn decay_prediction(fit: &FitResult, n: usize, t: usize) -> f64 {
    let (a, b) = fit.params;
    let n = n as f64;
    a * n * n * (-b * t as f64 / n).exp2()
}

/// Least squares for `y = alpha f(x) + beta g(x)` via the 2x2 normal
/// equations.
fn solve_two_basis(
    pts: &[(f64, f64)],
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
) -> Result<(f64, f64), FitError> {
    let (mut sff, mut sfg, mut sgg, mut sfy, mut sgy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y) in pts {
        let (fx, gx) = (f(x), g(x));
        sff += fx * fx;
        sfg += fx * gx;
        sgg += gx * gx;
        sfy += fx * y;
        sgy += gx * y;
    }
    let det = sff * sgg - sfg * sfg;
    let scale = sff.abs().max(sgg.abs()).max(1e-300);
    if det.abs() < 1e-12 * scale * scale {
        return Err(FitError::DegenerateFit);
    }
    let alpha = (sfy * sgg - sgy * sfg) / det;
    let beta = (sgy * sff - sfy * sfg) / det;
    Ok((alpha, beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_recovers_its_own_model() {
        let (a, b) = (0.25, 5.7);
        let mut rows = Vec::new();
        for n in [100usize, 300, 500] {
            for t in (0..(3 * n)).step_by(n / 20) {
                let nf = n as f64;
                let y = a * nf * nf * (-b * t as f64 / nf).exp2();
                if y > 1e-9 {
                    rows.push((n, t, y));
                }
            }
        }
        let fit = fit_blocking_decay(&rows).unwrap();
        assert!((fit.params.0 - a).abs() < 1e-6, "a = {}", fit.params.0);
        assert!((fit.params.1 - b).abs() < 1e-6, "b = {}", fit.params.1);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn tmed_recovers_its_own_model() {
        let (c, d) = (0.26, -5.7);
        let rows: Vec<MedianPoint> = [100usize, 200, 300, 400, 500]
            .iter()
            .map(|&n| {
                let nf = n as f64;
                (n, c * nf * (d + 2.0 * nf.log2()))
            })
            .collect();
        let fit = fit_tmed(&rows).unwrap();
        assert!((fit.params.0 - c).abs() < 1e-9);
        assert!((fit.params.1 - d).abs() < 1e-6);
        assert!(fit.residual < 1e-12);
        assert!((tmed_r_squared(&rows, &fit) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn insufficient_data_detected() {
        assert_eq!(
            fit_tmed(&[(100, 1.0), (200, 2.0)]).unwrap_err(),
            FitError::InsufficientData { needed: 3, got: 2 }
        );
        assert!(matches!(
            fit_blocking_decay(&[(100, 0, 0.0), (100, 1, 0.0), (100, 2, 0.0)]),
            Err(FitError::InsufficientData { got: 0, .. })
        ));
    }

    #[test]
    fn degenerate_fit_detected() {
        // One distinct size: the two basis vectors are collinear.
        let rows: Vec<MedianPoint> = vec![(100, 10.0), (100, 11.0), (100, 12.0)];
        assert_eq!(fit_tmed(&rows).unwrap_err(), FitError::DegenerateFit);
    }
}
