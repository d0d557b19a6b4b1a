/// Numerical tolerance and sampling parameters shared by every check.
///
/// Values are read-only during a computation; callers pass a `Config`
/// explicitly instead of relying on global state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    /// Absolute entrywise tolerance.
    pub tolerance: f64,
    /// Number of random PSD probes drawn in sampled positivity checks.
    pub samples: usize,
    /// Seed for every randomized probe.
    pub seed: u64,
}

impl Config {
    pub const DEFAULT_TOLERANCE: f64 = 1e-9;

    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Tolerance for an aggregate quantity over a `dim`-dimensional object.
    pub fn scaled(&self, dim: usize) -> f64 {
        self.tolerance * (dim.max(1) as f64)
    }
}

impl Default for Config {
    fn default() -> Self {
        Self {
            tolerance: Self::DEFAULT_TOLERANCE,
            samples: 32,
            seed: 0x5eed,
        }
    }
}
