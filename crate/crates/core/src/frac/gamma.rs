//! Gamma function on the real line.

use std::f64::consts::PI;

use thiserror::Error;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("gamma has a pole at non-positive integer {0}")]
pub struct PoleAtNonPositiveInteger(pub f64);

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0))
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Γ(x) by the Lanczos approximation, with reflection below 1/2.
///
/// Positive integers up to 171 are returned as exact factorials.
pub fn gamma(x: f64) -> Result<f64, PoleAtNonPositiveInteger> {
    if is_pole(x) {
        return Err(PoleAtNonPositiveInteger(x));
    }
    if x == x.floor() && x <= 171.0 {
        return Ok((2..x as u32).fold(1.0, |acc, k| acc * k as f64));
    }
    if x < 0.5 {
        return Ok(PI / ((PI * x).sin() * gamma(1.0 - x)?));
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    Ok((2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * lanczos_sum(x))
}

/// ln |Γ(x)|, usable where Γ itself overflows.
pub fn ln_gamma(x: f64) -> Result<f64, PoleAtNonPositiveInteger> {
    if is_pole(x) {
        return Err(PoleAtNonPositiveInteger(x));
    }
    if x < 0.5 {
        return Ok((PI / (PI * x).sin().abs()).ln() - ln_gamma(1.0 - x)?);
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + lanczos_sum(x).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Stirling series with upward recurrence, independent of the Lanczos fit.
    fn stirling_gamma(x: f64) -> f64 {
        let mut shift = 1.0;
        let mut z = x;
        while z < 15.0 {
            shift *= z;
            z += 1.0;
        }
        let series =
            1.0 / (12.0 * z) - 1.0 / (360.0 * z.powi(3)) + 1.0 / (1260.0 * z.powi(5)) - 1.0 / (1680.0 * z.powi(7));
        ((z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series).exp() / shift
    }

    #[test]
    fn integers_are_factorials() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(2.0).unwrap(), 1.0);
        assert_eq!(gamma(5.0).unwrap(), 24.0);
    }

    #[test]
    fn half_integer() {
        let v = gamma(0.5).unwrap();
        assert!((v - 1.772_453_850_905_516).abs() < 1e-13);
        assert!((gamma(1.5).unwrap() - 0.886_226_925_452_758).abs() < 1e-13);
    }

    #[test]
    fn near_one_expansion() {
        let v = gamma(1.0 + 1e-8).unwrap();
        assert!((v - (1.0 - 1e-8 * EULER_GAMMA)).abs() < 1e-15);
        assert!((v - 0.999_999_994_227_9).abs() < 1e-13);
    }

    #[test]
    fn matches_stirling_oracle() {
        let mut x = 0.1;
        while x <= 10.0 {
            let want = stirling_gamma(x);
            let got = gamma(x).unwrap();
            assert!(((got - want) / want).abs() < 1e-12, "x={x}: {got} vs {want}");
            x += 0.0731;
        }
    }

    #[test]
    fn reflection_and_poles() {
        assert!(gamma(0.0).is_err());
        assert!(gamma(-3.0).is_err());
        let v = gamma(-0.5).unwrap();
        assert!((v + 2.0 * PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn log_gamma_agrees() {
        for x in [0.3, 1.7, 4.2, 9.9] {
            assert!((ln_gamma(x).unwrap() - gamma(x).unwrap().ln()).abs() < 1e-12);
        }
        assert!((ln_gamma(200.0).unwrap() - 857.933_669_825_857_2).abs() < 1e-9);
    }
}
