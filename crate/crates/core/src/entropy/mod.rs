//! Topological entropy: lap-number growth for any piecewise monotone map,
//! exact transfer matrices for stunted maps with finite plateau orbits, and
//! positive-entropy witnesses.

pub mod laps;
pub mod markov;
pub mod witness;

use serde::Serialize;

use crate::error::{Error, Result};

pub use laps::{lap_count, lap_series, LapCount, LapDynamics, LapSeries, DEFAULT_LAP_CAP};
pub use markov::{entropy_markov, finite_orbit, plateau_orbits, FiniteOrbit, MarkovConfig, MarkovState, TransitionMatrix};
pub use witness::{positive_entropy_witness, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyMethod {
    LapRegression,
    MarkovExact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub method: EntropyMethod,
    /// Iterates used in the fit, or the number of Markov states.
    pub n_used: usize,
    /// RMS residual of the fit, or relative eigenvalue bracket width.
    pub residual: f64,
    /// The lap cap was hit before `n_max`.
    pub saturated: bool,
}

/// Least-squares slope of `log ℓ(fⁿ)` over `n ∈ [n_max/2, n_max]`.
pub fn entropy_lap<D: LapDynamics + ?Sized>(map: &D, n_max: usize) -> Result<EntropyEstimate> {
    if n_max < 8 {
        return Err(Error::invalid(format!("entropy_lap needs n_max >= 8, got {n_max}")));
    }
    let series = lap_series(map, n_max, DEFAULT_LAP_CAP);
    let reached = series.counts.len();
    let lo = (n_max / 2).max(1);
    let pts: Vec<(f64, f64)> = series
        .counts
        .iter()
        .filter(|c| c.n >= lo)
        .map(|c| (c.n as f64, (c.laps as f64).ln()))
        .collect();
    // After saturation fall back to the last stretch that was counted.
    let pts = if pts.len() >= 2 {
        pts
    } else {
        let from = reached.saturating_sub((reached / 2).max(2));
        series.counts[from..].iter().map(|c| (c.n as f64, (c.laps as f64).ln())).collect()
    };
    if pts.len() < 2 {
        return Err(Error::budget("too few lap counts below the cap to fit a slope"));
    }
    let (slope, residual) = fit_line(&pts);
    Ok(EntropyEstimate {
        value: slope.max(0.0),
        method: EntropyMethod::LapRegression,
        n_used: pts.len(),
        residual,
        saturated: series.saturated,
    })
}

/// Slope and RMS residual of the least-squares line through `pts`.
fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{FnMap, Interval, StuntedSawtooth};
    use crate::rational::ratio;

    #[test]
    fn trapezoid_and_fixed_plateau() {
        let t = StuntedSawtooth::from_parts(1, 1, vec![ratio(3, 2)]).unwrap();
        let h = entropy_lap(&t, 24).unwrap();
        assert!((h.value - 2f64.ln()).abs() < 1e-12);
        assert!(h.residual < 1e-12);
        let t = StuntedSawtooth::from_parts(1, 1, vec![ratio(1, 2)]).unwrap();
        assert!(entropy_lap(&t, 24).unwrap().value < 1e-6);
    }

    #[test]
    fn constant_slope_three() {
        // Three full branches of slope ±3 on [0, 1]; oracle: the 3×3 all-ones
        // matrix has spectral radius 3.
        let f = FnMap::new(Interval::new(0.0, 1.0).unwrap(), vec![1.0 / 3.0, 2.0 / 3.0], |x: f64| {
            let y = 3.0 * x;
            match y as usize {
                0 => y,
                1 => 2.0 - y,
                _ => y - 2.0,
            }
        });
        let h = entropy_lap(&f, 16).unwrap();
        assert!((h.value - 3f64.ln()).abs() < 1e-2, "{h:?}");
    }

    #[test]
    fn rejects_short_window() {
        let t = StuntedSawtooth::from_parts(1, 1, vec![ratio(3, 2)]).unwrap();
        assert!(entropy_lap(&t, 4).is_err());
    }

    #[test]
    fn fit_line_exact() {
        let (s, r) = fit_line(&[(1.0, 2.0), (2.0, 4.0), (3.0, 6.0)]);
        assert!((s - 2.0).abs() < 1e-15 && r < 1e-15);
    }
}
