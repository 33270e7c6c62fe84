//! Feasibility map over the `(sigma1, eta_a1)` plane.
//!
//! Every condition is linear in the shipped volume `k = sigma1 (eta_a1 - 1)`,
//! so the feasible region is bounded by two hyperbolas `sigma1 (eta_a1 - 1) = const`.
//! The scanner evaluates nodes independently; [`feasible_k_interval`] solves
//! the same conditions in closed form.

use rayon::prelude::*;

use crate::error::{ModelError, Result};
use crate::model::TwoGoodScenario;
use crate::money::{feasibility_at, margins, FeasibilityResult};

/// Rectangular grid over `sigma1` (columns) and `eta_a1` (rows).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub sigma1_min: f64,
    pub sigma1_max: f64,
    pub sigma1_steps: usize,
    pub eta_min: f64,
    pub eta_max: f64,
    pub eta_steps: usize,
}

impl GridSpec {
    /// The default scan window, sigma1 in [0.5, 10] and eta_a1 in [1.5, 10].
    pub fn standard(sigma1_steps: usize, eta_steps: usize) -> Self {
        Self {
            sigma1_min: 0.5,
            sigma1_max: 10.0,
            sigma1_steps,
            eta_min: 1.5,
            eta_max: 10.0,
            eta_steps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ModelError::InvalidInput(msg));
        for (name, v) in [
            ("sigma1_min", self.sigma1_min),
            ("sigma1_max", self.sigma1_max),
            ("eta_min", self.eta_min),
            ("eta_max", self.eta_max),
        ] {
            if !v.is_finite() {
                return Err(ModelError::NonFinite { name, value: v });
            }
        }
        if self.sigma1_min >= self.sigma1_max {
            return bad(format!(
                "grid: sigma1_min {} must be < sigma1_max {}",
                self.sigma1_min, self.sigma1_max
            ));
        }
        if self.eta_min >= self.eta_max {
            return bad(format!(
                "grid: eta_min {} must be < eta_max {}",
                self.eta_min, self.eta_max
            ));
        }
        if self.sigma1_steps < 2 || self.eta_steps < 2 {
            return bad(format!(
                "grid: need at least 2 steps per axis, got {} x {}",
                self.sigma1_steps, self.eta_steps
            ));
        }
        if self.sigma1_min < 0.0 {
            return bad(format!("grid: sigma1_min must be >= 0, got {}", self.sigma1_min));
        }
        if self.eta_min < 1.0 {
            return bad(format!("grid: eta_min must be >= 1, got {}", self.eta_min));
        }
        Ok(())
    }

    pub fn sigma1_at(&self, i: usize) -> f64 {
        affine(self.sigma1_min, self.sigma1_max, i, self.sigma1_steps)
    }

    pub fn eta_at(&self, j: usize) -> f64 {
        affine(self.eta_min, self.eta_max, j, self.eta_steps)
    }

    pub fn node_count(&self) -> usize {
        self.sigma1_steps * self.eta_steps
    }
}

// Endpoint-exact interpolation; no accumulated increments.
fn affine(lo: f64, hi: f64, i: usize, steps: usize) -> f64 {
    let t = i as f64 / (steps - 1) as f64;
    lo * (1.0 - t) + hi * t
}

/// One evaluated grid node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionNode {
    pub sigma1: f64,
    pub eta_a1: f64,
    pub result: FeasibilityResult,
}

/// Scan output, stored row-major: one row per `eta_a1` value, one column per `sigma1` value.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    pub grid: GridSpec,
    pub cells: Vec<FeasibilityResult>,
}

impl RegionMap {
    pub fn get(&self, eta_index: usize, sigma1_index: usize) -> &FeasibilityResult {
        &self.cells[eta_index * self.grid.sigma1_steps + sigma1_index]
    }

    pub fn row(&self, eta_index: usize) -> &[FeasibilityResult] {
        let n = self.grid.sigma1_steps;
        &self.cells[eta_index * n..(eta_index + 1) * n]
    }

    /// Flat table of nodes in storage order.
    pub fn nodes(&self) -> impl Iterator<Item = RegionNode> + '_ {
        let n = self.grid.sigma1_steps;
        self.cells.iter().enumerate().map(move |(idx, r)| RegionNode {
            sigma1: self.grid.sigma1_at(idx % n),
            eta_a1: self.grid.eta_at(idx / n),
            result: *r,
        })
    }

    pub fn feasible_count(&self) -> usize {
        self.cells.iter().filter(|c| c.feasible()).count()
    }
}

fn scan_cells(s: &TwoGoodScenario, grid: &GridSpec) -> Vec<FeasibilityResult> {
    let n = grid.sigma1_steps;
    (0..grid.node_count())
        .into_par_iter()
        .map(|idx| feasibility_at(s, grid.sigma1_at(idx % n), grid.eta_at(idx / n)))
        .collect()
}

/// Evaluates every grid node on the global thread pool.
pub fn scan_region(s: &TwoGoodScenario, grid: &GridSpec) -> Result<RegionMap> {
    grid.validate()?;
    Ok(RegionMap {
        grid: *grid,
        cells: scan_cells(s, grid),
    })
}

/// Like [`scan_region`] but on a dedicated pool of `threads` workers.
pub fn scan_region_with_threads(
    s: &TwoGoodScenario,
    grid: &GridSpec,
    threads: usize,
) -> Result<RegionMap> {
    grid.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| ModelError::InvalidInput(format!("thread pool: {e}")))?;
    let cells = pool.install(|| scan_cells(s, grid));
    Ok(RegionMap { grid: *grid, cells })
}

/// Closed interval of feasible shipped volumes `k`; `hi` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeasibleVolumes {
    Empty,
    Interval { lo: f64, hi: f64 },
}

impl FeasibleVolumes {
    pub fn contains(&self, k: f64) -> bool {
        match *self {
            FeasibleVolumes::Empty => false,
            FeasibleVolumes::Interval { lo, hi } => lo <= k && k <= hi,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, FeasibleVolumes::Empty)
    }

    /// Feasible `sigma1` range on the row `eta_a1` (requires `eta_a1 > 1`).
    pub fn sigma1_range(&self, eta_a1: f64) -> Option<(f64, f64)> {
        match *self {
            FeasibleVolumes::Interval { lo, hi } if eta_a1 > 1.0 => {
                Some((lo / (eta_a1 - 1.0), hi / (eta_a1 - 1.0)))
            }
            _ => None,
        }
    }
}

/// A condition `offset + slope * k >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearCondition {
    pub name: &'static str,
    pub offset: f64,
    pub slope: f64,
}

/// The four feasibility conditions as linear functions of `k`.
pub fn volume_conditions(s: &TwoGoodScenario) -> [LinearCondition; 4] {
    let m = margins(s);
    let r = s.prices1.y / s.prices2.y;
    [
        LinearCondition {
            name: "dm_a",
            offset: m.alpha1 * s.good1.c_a + m.alpha2 * s.good2.c_a,
            slope: m.alpha1 - m.alpha2 * r,
        },
        LinearCondition {
            name: "dm_b",
            offset: m.beta1 * s.good1.c_b + m.beta2 * s.good2.c_b,
            slope: -m.beta1 + m.beta2 * r,
        },
        LinearCondition {
            name: "p_a2",
            offset: s.good2.c_a,
            slope: -r,
        },
        LinearCondition {
            name: "p_b1",
            offset: s.good1.c_b,
            slope: -1.0,
        },
    ]
}

/// Intersects the four conditions with the admissible domain `k >= 0`.
pub fn feasible_k_interval(s: &TwoGoodScenario) -> FeasibleVolumes {
    let mut lo = 0.0_f64;
    let mut hi = f64::INFINITY;
    for c in volume_conditions(s) {
        if c.slope > 0.0 {
            lo = lo.max(-c.offset / c.slope);
        } else if c.slope < 0.0 {
            hi = hi.min(c.offset / -c.slope);
        } else if c.offset < 0.0 {
            return FeasibleVolumes::Empty;
        }
    }
    if lo <= hi {
        FeasibleVolumes::Interval { lo, hi }
    } else {
        FeasibleVolumes::Empty
    }
}
