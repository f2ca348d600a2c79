use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector3};

use super::{DynamicsError, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFit {
    pub center: (f64, f64),
    pub radius: f64,
}

/// Algebraic least-squares circle through the samples: minimizes
/// `Σ (x² + y² + Dx + Ey + F)²`.
pub fn fit_circle(x: &[f64], y: &[f64]) -> Option<CircleFit> {
    let n = x.len().min(y.len());
    if n < 3 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    for (xi, yi) in x.iter().zip(y) {
        let (u, v) = (xi - mx, yi - my);
        let row = Vector3::new(u, v, 1.0);
        ata += row * row.transpose();
        atb += row * -(u * u + v * v);
    }
    let sol = ata.lu().solve(&atb)?;
    let (cu, cv) = (-sol[0] / 2.0, -sol[1] / 2.0);
    let r2 = cu * cu + cv * cv - sol[2];
    (r2 > 0.0).then(|| CircleFit {
        center: (cu + mx, cv + my),
        radius: r2.sqrt(),
    })
}

/// Angular frequency of the rotation of `(x, y)` about its fitted center, as
/// the slope of the unwrapped phase regressed on time.
pub fn measure_frequency_xy(times: &[f64], x: &[f64], y: &[f64]) -> Result<f64, DynamicsError> {
    let fit = fit_circle(x, y).ok_or(DynamicsError::InsufficientPeriods { periods: 0.0 })?;
    let (cx, cy) = fit.center;
    let mut phase = Vec::with_capacity(x.len());
    let mut last = 0.0;
    let mut offset = 0.0;
    for (k, (xi, yi)) in x.iter().zip(y).enumerate() {
        let raw = (yi - cy).atan2(xi - cx);
        if k > 0 {
            let jump = raw - last;
            if jump > std::f64::consts::PI {
                offset -= TAU;
            } else if jump < -std::f64::consts::PI {
                offset += TAU;
            }
        }
        last = raw;
        phase.push(raw + offset);
    }
    let periods = (phase[phase.len() - 1] - phase[0]).abs() / TAU;
    if periods < 3.0 {
        return Err(DynamicsError::InsufficientPeriods { periods });
    }
    let n = phase.len() as f64;
    let mt = times.iter().sum::<f64>() / n;
    let mp = phase.iter().sum::<f64>() / n;
    let (num, den) = times.iter().zip(&phase).fold((0.0, 0.0), |(num, den), (t, p)| {
        (num + (t - mt) * (p - mp), den + (t - mt).powi(2))
    });
    Ok(num / den)
}

/// [`measure_frequency_xy`] on the first two state variables.
pub fn measure_frequency(t: &Trajectory) -> Result<f64, DynamicsError> {
    let [x, y, ..] = t.states() else {
        return Err(DynamicsError::NotPlanar);
    };
    let times: Vec<f64> = t.times().collect();
    measure_frequency_xy(&times, x, y)
}
