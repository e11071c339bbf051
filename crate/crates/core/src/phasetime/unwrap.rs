use std::f64::consts::PI;

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Removes 2π jumps so that adjacent samples differ by less than π.
///
/// Each output sample is `input[i] + 2π·m_i` with integer `m_i`, `m_0 = 0`,
/// chosen to minimise the step from the previous output. A wrapped step of
/// exactly ±π has no unique minimiser and is reported as an error.
pub fn unwrap_phase(phase: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(phase.len());
    let Some(&first) = phase.first() else {
        return Ok(out);
    };
    out.push(first);
    let mut cycles = 0.0f64;
    for i in 1..phase.len() {
        let raw = phase[i] - phase[i - 1];
        let turns = (raw / TWO_PI).round();
        let step = raw - TWO_PI * turns;
        if step.abs() == PI {
            return Err(Error::UnwrapAmbiguity { index: i - 1 });
        }
        cycles -= turns;
        out.push(phase[i] + TWO_PI * cycles);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_unchanged() {
        let v = vec![0.7; 10];
        assert_eq!(unwrap_phase(&v).unwrap(), v);
    }

    #[test]
    fn crossing_the_branch_cut() {
        let out = unwrap_phase(&[3.1, -3.1]).unwrap();
        assert_eq!(out[0], 3.1);
        assert!((out[1] - (2.0 * PI - 3.1)).abs() < 1e-15);
        assert!((out[1] - 3.183).abs() < 1e-3);
    }

    #[test]
    fn exact_pi_jump_is_ambiguous() {
        assert_eq!(
            unwrap_phase(&[0.0, 0.5, 0.5 + PI]),
            Err(Error::UnwrapAmbiguity { index: 1 })
        );
    }

    #[test]
    fn empty_and_single() {
        assert!(unwrap_phase(&[]).unwrap().is_empty());
        assert_eq!(unwrap_phase(&[-2.0]).unwrap(), vec![-2.0]);
    }

    #[test]
    fn recovers_a_steep_ramp() {
        let truth: Vec<f64> = (0..500).map(|i| 0.9 * i as f64 - 1.0).collect();
        let wrapped: Vec<f64> = truth.iter().map(|p| p.sin().atan2(p.cos())).collect();
        let out = unwrap_phase(&wrapped).unwrap();
        let offset = out[0] - truth[0];
        for (o, t) in out.iter().zip(&truth) {
            assert!((o - t - offset).abs() < 1e-9);
        }
    }
}
