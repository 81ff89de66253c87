use crate::error::{CliError, Result};
use crate::records::ConvergenceRecord;

/// Errors below this are treated as roundoff and left out of fits.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

/// Smallest number of points a fit is made from.
pub const MIN_FIT_POINTS: usize = 4;

/// Observed order of convergence: minus the least-squares slope of
/// `ln(error)` against `ln(param)`.
///
/// Only points above [`ROUNDOFF_FLOOR`] count, and of those the finest half
/// (never fewer than [`MIN_FIT_POINTS`]) so that the pre-asymptotic regime at
/// coarse resolution does not bias the slope.
pub fn fit_order<'a, I>(records: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a ConvergenceRecord>,
{
    let mut pts: Vec<(f64, f64)> = records
        .into_iter()
        .filter(|r| r.param > 0 && r.error.is_finite() && r.error > ROUNDOFF_FLOOR)
        .map(|r| (r.param as f64, r.error))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(CliError::Fit(format!(
            "{} points above the {ROUNDOFF_FLOOR:e} floor, need {MIN_FIT_POINTS}",
            pts.len()
        )));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let window = pts.len().div_ceil(2).max(MIN_FIT_POINTS);
    let pts = &pts[pts.len() - window..];
    let slope = loglog_slope(pts)
        .ok_or_else(|| CliError::Fit("parameters in the fit window coincide".into()))?;
    Ok(-slope)
}

fn loglog_slope(pts: &[(f64, f64)]) -> Option<f64> {
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(order: f64, params: &[usize]) -> Vec<ConvergenceRecord> {
        params
            .iter()
            .map(|&p| ConvergenceRecord {
                method: "x".into(),
                param: p,
                error: 3.0 * (p as f64).powf(-order),
                iterations: None,
                wall_time_s: 0.0,
            })
            .collect()
    }

    #[test]
    fn exact_power_laws() {
        let params: Vec<usize> = (5..=12).map(|e| 1 << e).collect();
        assert!((fit_order(&synthetic(2.0, &params)).unwrap() - 2.0).abs() < 1e-12);
        assert!((fit_order(&synthetic(4.0, &params[..4])).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn roundoff_points_are_dropped() {
        let params: Vec<usize> = (5..=12).map(|e| 1 << e).collect();
        let mut recs = synthetic(2.0, &params);
        recs.push(ConvergenceRecord {
            param: 1 << 13,
            error: 1e-14,
            ..recs[0].clone()
        });
        assert!((fit_order(&recs).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        assert!(fit_order(&synthetic(2.0, &[8, 16, 32])).is_err());
        let mut recs = synthetic(2.0, &[8, 16, 32, 64]);
        recs[3].error = 0.0;
        assert!(fit_order(&recs).is_err());
        assert!(fit_order(&synthetic(2.0, &[8, 8, 8, 8])).is_err());
    }
}
