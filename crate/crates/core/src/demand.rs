//! Demand distributions on a shared grid of width-`delta` cells.
//!
//! Cell `k` (1-based) covers demand values in `[(k-1)*delta, k*delta)` and
//! carries one probability. Expectations use cell midpoints as
//! representatives; the generator descriptor is kept alongside so demand
//! outcomes can be drawn without losing the underlying distribution.

use rand::Rng;

use crate::params::Player;
use crate::{Error, Result};

/// Midpoint of 1-based cell `k` on a `delta` grid. All modules share this
/// so representative values compare bitwise-equal across call sites.
pub(crate) fn cell_midpoint(delta: f64, k: usize) -> f64 {
    (k as f64 - 0.5) * delta
}

/// Descriptor of the continuous distribution a grid was built from.
#[derive(Debug, Clone, PartialEq)]
pub enum DemandGenerator {
    /// Uniform on `[0, max]`.
    Uniform { max: f64 },
    /// No continuous form; the grid's own cells are the distribution.
    Cells,
}

/// A local-demand distribution discretized onto width-`delta` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandGrid {
    delta: f64,
    cells: Vec<f64>,
    cdf: Vec<f64>,
    generator: DemandGenerator,
}

impl DemandGrid {
    /// Discretizes a uniform distribution on `[0, max]`.
    pub fn uniform(max: f64, delta: f64) -> Result<Self> {
        if !max.is_finite() || max <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "uniform max must be > 0, got {max}"
            )));
        }
        if !delta.is_finite() || delta <= 0.0 || delta > max {
            return Err(Error::InvalidGrid(format!(
                "delta must lie in (0, max], got delta={delta}, max={max}"
            )));
        }
        let n = (max / delta - 1e-9).ceil().max(1.0) as usize;
        let mut cells = vec![delta / max; n];
        // last cell may be partial when max is not a multiple of delta
        cells[n - 1] = (max - (n as f64 - 1.0) * delta) / max;
        Self::build(delta, cells, DemandGenerator::Uniform { max })
    }

    /// Wraps an arbitrary cell-probability vector. The vector is normalized
    /// if its sum is within 1e-9 of one, and rejected otherwise.
    pub fn from_cells(delta: f64, cells: Vec<f64>) -> Result<Self> {
        Self::build(delta, cells, DemandGenerator::Cells)
    }

    fn build(delta: f64, mut cells: Vec<f64>, generator: DemandGenerator) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "delta must be > 0, got {delta}"
            )));
        }
        if cells.is_empty() {
            return Err(Error::InvalidGrid("cell vector is empty".into()));
        }
        if cells.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::InvalidGrid(
                "cell probabilities must be finite and >= 0".into(),
            ));
        }
        let sum: f64 = cells.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidGrid(format!(
                "cell probabilities must sum to 1 (got {sum})"
            )));
        }
        for p in &mut cells {
            *p /= sum;
        }
        let mut cdf = Vec::with_capacity(cells.len());
        let mut acc = 0.0;
        for &p in &cells {
            acc += p;
            cdf.push(acc);
        }
        // guard against accumulation drift
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(Self {
            delta,
            cells,
            cdf,
            generator,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn cdf(&self) -> &[f64] {
        &self.cdf
    }

    pub fn generator(&self) -> &DemandGenerator {
        &self.generator
    }

    /// Upper edge of the last cell.
    pub fn max_value(&self) -> f64 {
        self.cells.len() as f64 * self.delta
    }

    /// Probability of 1-based cell `k`.
    pub fn cell_prob(&self, k: usize) -> f64 {
        self.cells[k - 1]
    }

    /// Midpoint representative of 1-based cell `k`.
    pub fn midpoint(&self, k: usize) -> f64 {
        cell_midpoint(self.delta, k)
    }

    /// Mean of the cell distribution under midpoint representatives.
    pub fn mean_midpoint(&self) -> f64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, &p)| p * self.midpoint(i + 1))
            .sum()
    }

    /// Inverse CDF at `u` in `[0, 1)`. Uniform generators invert the
    /// continuous distribution; cell-vector grids return the midpoint of the
    /// cell containing `u`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self.generator {
            DemandGenerator::Uniform { max } => u.clamp(0.0, 1.0) * max,
            DemandGenerator::Cells => self.midpoint(self.cell_at_quantile(u)),
        }
    }

    /// 1-based index of the cell containing quantile `u`.
    pub fn cell_at_quantile(&self, u: f64) -> usize {
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.cells.len() - 1) + 1
    }

    /// Draws one demand outcome. Reproducible given the generator state.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.gen::<f64>())
    }

    /// Draws a cell index from the cell distribution (1-based).
    pub fn sample_cell<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.cell_at_quantile(rng.gen::<f64>())
    }
}

/// Distribution of one player's total demand (local demand plus received
/// spillover) on the shared grid, for a fixed opponent action.
#[derive(Debug, Clone)]
pub struct TotalDemandDist {
    delta: f64,
    cells: Vec<f64>,
    cdf: Vec<f64>,
}

impl TotalDemandDist {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Upper edge of the support.
    pub fn support_upper(&self) -> f64 {
        self.cells.len() as f64 * self.delta
    }

    /// CDF evaluated at `y`: total mass of cells lying entirely at or below
    /// `y` (step function on the grid).
    pub fn cdf_at(&self, y: f64) -> f64 {
        let k = ((y / self.delta) + 1e-9).floor() as i64;
        if k <= 0 {
            0.0
        } else {
            let k = (k as usize).min(self.cells.len());
            self.cdf[k - 1]
        }
    }

    pub fn mean_midpoint(&self) -> f64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, &p)| p * cell_midpoint(self.delta, i + 1))
            .sum()
    }
}

/// Distribution of `player`'s total demand given the opponent holds
/// `y_opp`. Spillover amounts are floored to the containing grid cell so the
/// result lives on the same grid as the local demands.
pub fn total_demand_dist(
    params: &crate::params::GameParams,
    player: Player,
    y_opp: f64,
) -> TotalDemandDist {
    debug_assert!(y_opp >= 0.0);
    let own = params.demand(player);
    let opp = params.demand(player.other());
    let alpha = params.player(player).spillover;
    let delta = own.delta();

    // spillover cell offset per opponent cell
    let offsets: Vec<usize> = (1..=opp.n_cells())
        .map(|m| {
            let spill = alpha * (opp.midpoint(m) - y_opp).max(0.0);
            (spill / delta + 1e-9).floor() as usize
        })
        .collect();
    let max_off = offsets.iter().copied().max().unwrap_or(0);

    if max_off == 0 {
        // no spillover anywhere: the total demand IS the local demand
        return TotalDemandDist {
            delta,
            cells: own.cells().to_vec(),
            cdf: own.cdf().to_vec(),
        };
    }

    let mut cells = vec![0.0; own.n_cells() + max_off];
    for (m_idx, &off) in offsets.iter().enumerate() {
        let qm = opp.cell_prob(m_idx + 1);
        if qm == 0.0 {
            continue;
        }
        for l in 1..=own.n_cells() {
            cells[l + off - 1] += own.cell_prob(l) * qm;
        }
    }

    let mut cdf = Vec::with_capacity(cells.len());
    let mut acc = 0.0;
    for &p in &cells {
        acc += p;
        cdf.push(acc);
    }
    TotalDemandDist { delta, cells, cdf }
}
