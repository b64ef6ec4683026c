//! Log-log exponent fitting for the scaling experiments.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {min} points, got {got}")]
    TooFewPoints { got: usize, min: usize },
    #[error("x must be strictly increasing (x[{index}] = {x})")]
    NotIncreasing { index: usize, x: f64 },
    #[error("point {index} = ({x}, {cost}) is not positive and finite")]
    NotPositive { index: usize, x: f64, cost: f64 },
    #[error("cell {index} has no trials")]
    EmptyCell { index: usize },
    #[error("confidence level {0} is not in (0, 1)")]
    Level(f64),
}

pub const MIN_POINTS: usize = 4;

/// `log cost ≈ slope·log x + intercept` (natural logs), with an optional
/// bootstrap interval for the slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub ci: Option<(f64, f64)>,
}

fn check(points: &[(f64, f64)]) -> Result<(), FitError> {
    if points.len() < MIN_POINTS {
        return Err(FitError::TooFewPoints {
            got: points.len(),
            min: MIN_POINTS,
        });
    }
    for (index, &(x, cost)) in points.iter().enumerate() {
        if !(x > 0.0 && x.is_finite() && cost > 0.0 && cost.is_finite()) {
            return Err(FitError::NotPositive { index, x, cost });
        }
        if index > 0 && x <= points[index - 1].0 {
            return Err(FitError::NotIncreasing { index, x });
        }
    }
    Ok(())
}

/// Ordinary least squares on `(ln x, ln y)`, inputs already checked.
fn ols(points: impl Iterator<Item = (f64, f64)> + Clone) -> (f64, f64) {
    let n = points.clone().count() as f64;
    let (sx, sy) = points
        .clone()
        .fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x.ln(), sy + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = points.fold((0.0, 0.0), |(sxx, sxy), (x, y)| {
        let dx = x.ln() - mx;
        (sxx + dx * dx, sxy + dx * (y.ln() - my))
    });
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fits `cost ∝ x^slope` through at least four points with strictly
/// increasing, positive `x` and positive cost.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<Fit, FitError> {
    check(points)?;
    let (slope, intercept) = ols(points.iter().copied());
    Ok(Fit {
        slope,
        intercept,
        ci: None,
    })
}

/// Fits the per-cell mean cost and adds a percentile bootstrap interval for
/// the slope: each resample redraws every cell's trials with replacement and
/// refits on the resampled means.
pub fn fit_exponent_bootstrap<R: Rng + ?Sized>(
    cells: &[(f64, Vec<f64>)],
    resamples: usize,
    level: f64,
    rng: &mut R,
) -> Result<Fit, FitError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(FitError::Level(level));
    }
    if let Some(index) = cells.iter().position(|(_, t)| t.is_empty()) {
        return Err(FitError::EmptyCell { index });
    }
    if let Some((index, (x, cost))) = cells
        .iter()
        .flat_map(|(x, t)| t.iter().map(move |&c| (*x, c)))
        .enumerate()
        .find(|(_, (_, c))| !(*c > 0.0 && c.is_finite()))
    {
        return Err(FitError::NotPositive { index, x, cost });
    }
    let mean = |t: &[f64]| t.iter().sum::<f64>() / t.len() as f64;
    let points: Vec<(f64, f64)> = cells.iter().map(|(x, t)| (*x, mean(t))).collect();
    let mut fit = fit_exponent(&points)?;

    let mut slopes: Vec<f64> = (0..resamples)
        .map(|_| {
            let resampled = cells.iter().map(|(x, t)| {
                let s: f64 = (0..t.len()).map(|_| t[rng.gen_range(0..t.len())]).sum();
                (*x, s / t.len() as f64)
            });
            ols(resampled.collect::<Vec<_>>().into_iter()).0
        })
        .collect();
    if !slopes.is_empty() {
        slopes.sort_by(f64::total_cmp);
        let tail = (1.0 - level) / 2.0;
        let at = |q: f64| slopes[((q * (slopes.len() - 1) as f64).round() as usize).min(slopes.len() - 1)];
        fit.ci = Some((at(tail), at(1.0 - tail)));
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;

    fn octaves(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (8..=16).map(|e| (2f64.powi(e), f(2f64.powi(e)))).collect()
    }

    #[test]
    fn exact_power_law() {
        let fit = fit_exponent(&octaves(|x| x.powf(0.75))).unwrap();
        assert!((fit.slope - 0.75).abs() < 1e-9);
        assert!(fit.intercept.abs() < 1e-9);
    }

    #[test]
    fn constant_cost() {
        let fit = fit_exponent(&octaves(|_| 42.0)).unwrap();
        assert!(fit.slope.abs() < 1e-9);
        assert!((fit.intercept - 42f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn x_log_x() {
        let fit = fit_exponent(&octaves(|x| x * x.log2())).unwrap();
        assert!(fit.slope > 1.0 && fit.slope < 1.2, "{}", fit.slope);
    }

    #[test]
    fn degenerate_points() {
        let p = [(1.0, 1.0), (2.0, 2.0), (4.0, 4.0)];
        assert!(matches!(fit_exponent(&p), Err(FitError::TooFewPoints { got: 3, .. })));
        let p = [(1.0, 1.0), (2.0, 2.0), (2.0, 4.0), (8.0, 8.0)];
        assert!(matches!(fit_exponent(&p), Err(FitError::NotIncreasing { index: 2, .. })));
        let p = [(1.0, 1.0), (2.0, 0.0), (4.0, 4.0), (8.0, 8.0)];
        assert!(matches!(fit_exponent(&p), Err(FitError::NotPositive { index: 1, .. })));
    }

    #[test]
    fn bootstrap_interval_brackets_the_slope() {
        let mut rng = seeds::rng(4);
        let cells: Vec<(f64, Vec<f64>)> = (6..=12)
            .map(|e| {
                let x = 2f64.powi(e);
                (x, (0..20).map(|_| x.sqrt() * rng.gen_range(0.8..1.2)).collect())
            })
            .collect();
        let fit = fit_exponent_bootstrap(&cells, 500, 0.95, &mut rng).unwrap();
        let (lo, hi) = fit.ci.unwrap();
        assert!(lo <= fit.slope && fit.slope <= hi);
        assert!(lo > 0.45 && hi < 0.55, "({lo}, {hi})");

        let exact: Vec<(f64, Vec<f64>)> = (0..5).map(|e| (2f64.powi(e), vec![2f64.powi(e); 3])).collect();
        let fit = fit_exponent_bootstrap(&exact, 50, 0.95, &mut rng).unwrap();
        let (lo, hi) = fit.ci.unwrap();
        assert!((lo - 1.0).abs() < 1e-9 && (hi - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bootstrap_errors() {
        let mut rng = seeds::rng(0);
        let cells = vec![(1.0, vec![1.0]), (2.0, vec![]), (3.0, vec![1.0]), (4.0, vec![1.0])];
        assert!(matches!(
            fit_exponent_bootstrap(&cells, 10, 0.95, &mut rng),
            Err(FitError::EmptyCell { index: 1 })
        ));
        assert!(matches!(
            fit_exponent_bootstrap(&cells, 10, 1.5, &mut rng),
            Err(FitError::Level(_))
        ));
    }
}
