#![allow(dead_code)]

use wardrop::solver::SolverConfig;

/// Default solve, fewer restarts: the corpus instances all have unique
/// equilibria, so extra restarts only cost time.
pub fn fast_cfg() -> SolverConfig {
    SolverConfig { restarts: 2, ..SolverConfig::default() }
}

/// Worst-case scans restricted to the extremal mass splits (all-low, even,
/// all-high), for grid searches where the full 51-point sweep is overkill.
pub fn extremal_cfg() -> SolverConfig {
    SolverConfig { restarts: 2, mass_grid: 3, ..SolverConfig::default() }
}
