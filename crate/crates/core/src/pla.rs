//! Per-frame least-squares line fits and the residual distance between a
//! series and its piecewise-linear approximant.

use crate::error::{Error, Result};
use crate::ops::OpCounts;
use crate::sax::check_frames;

/// A fitted line over one frame, in frame-local coordinates `0..width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSegment {
    pub slope: f64,
    pub intercept: f64,
}

impl LineSegment {
    #[inline]
    pub fn at(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaApprox {
    pub segments: Vec<LineSegment>,
    pub n: usize,
}

impl PlaApprox {
    pub fn frames(&self) -> usize {
        self.segments.len()
    }

    pub fn width(&self) -> usize {
        self.n / self.segments.len()
    }
}

fn fit_line(frame: &[f64]) -> LineSegment {
    let len = frame.len();
    if len == 1 {
        return LineSegment {
            slope: 0.0,
            intercept: frame[0],
        };
    }
    let l = len as f64;
    let x_mean = (l - 1.0) / 2.0;
    let sxx = l * (l * l - 1.0) / 12.0;
    let y_mean = frame.iter().sum::<f64>() / l;
    // sum of (x - x_mean) * y equals the centered cross product
    let sxy: f64 = frame
        .iter()
        .enumerate()
        .map(|(x, y)| (x as f64 - x_mean) * y)
        .sum();
    let slope = sxy / sxx;
    LineSegment {
        slope,
        intercept: y_mean - slope * x_mean,
    }
}

/// Least-squares line per frame over `frames` equal frames.
pub fn fit_pla(values: &[f64], frames: usize) -> Result<PlaApprox> {
    let n = values.len();
    check_frames(n, frames)?;
    let segments = values.chunks_exact(n / frames).map(fit_line).collect();
    Ok(PlaApprox { segments, n })
}

/// Samples the approximant at all `n` positions.
pub fn evaluate(p: &PlaApprox) -> Vec<f64> {
    let width = p.width();
    p.segments
        .iter()
        .flat_map(|seg| (0..width).map(move |x| seg.at(x as f64)))
        .collect()
}

/// Euclidean distance between a series and a piecewise-linear approximant.
pub fn residual(values: &[f64], p: &PlaApprox) -> Result<f64> {
    if values.len() != p.n || p.segments.is_empty() || !p.n.is_multiple_of(p.frames()) {
        return Err(Error::Shape(format!(
            "series of length {} against an approximation of {} frames over {} points",
            values.len(),
            p.frames(),
            p.n
        )));
    }
    let sum: f64 = values
        .chunks_exact(p.width())
        .zip(&p.segments)
        .map(|(frame, seg)| frame_sq_error(frame, seg))
        .sum();
    Ok(sum.sqrt())
}

fn frame_sq_error(frame: &[f64], seg: &LineSegment) -> f64 {
    frame
        .iter()
        .enumerate()
        .map(|(x, y)| {
            let d = y - seg.at(x as f64);
            d * d
        })
        .sum()
}

/// Residual of a series against its own optimal fit, without materializing
/// the approximation. Bitwise equal to `residual(values, &fit_pla(values, frames)?)`.
pub fn fit_residual(values: &[f64], frames: usize) -> Result<f64> {
    let n = values.len();
    check_frames(n, frames)?;
    let sum: f64 = values
        .chunks_exact(n / frames)
        .map(|frame| frame_sq_error(frame, &fit_line(frame)))
        .sum();
    Ok(sum.sqrt())
}

/// Operations spent by [`fit_residual`] on a length-`n` series.
pub fn fit_residual_cost(n: usize, frames: usize) -> OpCounts {
    let width = (n / frames) as u64;
    let frames = frames as u64;
    if width == 1 {
        return OpCounts {
            sqrts: 1,
            ..OpCounts::ZERO
        };
    }
    // fit: sum, centering, cross-product accumulation, intercept
    // residual: evaluate line, subtract, accumulate square
    let per_frame = OpCounts {
        adds: 6 * width + 1,
        mults: 3 * width + 3,
        ..OpCounts::ZERO
    };
    per_frame.times(frames)
        + OpCounts {
            sqrts: 1,
            ..OpCounts::ZERO
        }
}
