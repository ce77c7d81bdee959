//! Parameter and time grids.

use crate::error::{Error, Result};

/// Inclusive range `start, start + step, ...` up to `stop`.
///
/// A degenerate range with `start == stop` yields the single point; the
/// step must still be positive. Points are `start + i * step`, so the grid
/// never accumulates summation drift.
pub fn linear_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(Error::InvalidGrid("range bounds must be finite".into()));
    }
    if step <= 0.0 {
        return Err(Error::InvalidGrid(format!("step {step} must be positive")));
    }
    if stop < start {
        return Err(Error::InvalidGrid(format!(
            "empty range {start}:{stop}:{step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Parses `start:stop:step`.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidGrid(format!(
            "expected start:stop:step, got `{spec}`"
        )));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p
            .trim()
            .parse()
            .map_err(|_| Error::InvalidGrid(format!("`{p}` is not a number")))?;
    }
    linear_range(v[0], v[1], v[2])
}

/// `samples` equally spaced times from 0 to `tmax` inclusive.
pub fn time_grid(tmax: f64, samples: usize) -> Result<Vec<f64>> {
    if !tmax.is_finite() || tmax < 0.0 {
        return Err(Error::InvalidGrid(format!("tmax {tmax} must be >= 0")));
    }
    match samples {
        0 => Err(Error::InvalidGrid("at least one sample is required".into())),
        1 => Ok(vec![0.0]),
        _ => {
            let dt = tmax / (samples - 1) as f64;
            Ok((0..samples).map(|k| k as f64 * dt).collect())
        }
    }
}
