//! Initial conditions. Every variant stays within `[-1, 1]`.

use nlac_core::{sample_function, Field, Grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, InitialKind};
use crate::error::{HarnessError, Result};

/// Generator behind the random initial condition, recorded in run metadata.
pub const RNG_NAME: &str = "ChaCha8Rng::seed_from_u64 (rand_chacha 0.3), row-major fill, uniform [-A, A]";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// `A sin x sin y`.
    Sine { amplitude: f64 },
    /// Independent uniform samples on `[-A, A]`.
    Random { amplitude: f64, seed: u64 },
    /// `tanh((R - rho) / (sqrt(2) w))`, `rho` the distance to the domain centre.
    Bubble { radius: f64, width: f64 },
}

impl InitialCondition {
    pub fn from_config(c: &ExperimentConfig) -> Result<Self> {
        let ic = match c.initial {
            InitialKind::Sine => InitialCondition::Sine { amplitude: c.amplitude },
            InitialKind::Random => InitialCondition::Random { amplitude: c.amplitude, seed: c.seed },
            InitialKind::Bubble => InitialCondition::Bubble {
                radius: c.bubble_radius.unwrap_or(c.extent / 4.0),
                width: c.bubble_width.unwrap_or(c.eps),
            },
        };
        ic.validate()?;
        Ok(ic)
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            InitialCondition::Sine { amplitude } | InitialCondition::Random { amplitude, .. } => {
                (0.0..=1.0).contains(&amplitude)
            }
            InitialCondition::Bubble { radius, width } => radius > 0.0 && width > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(HarnessError::Usage(format!("invalid initial condition {self:?}")))
        }
    }

    pub fn sample(&self, grid: Grid) -> Field {
        match *self {
            InitialCondition::Sine { amplitude } => sample_function(grid, |x, y| amplitude * x.sin() * y.sin()),
            InitialCondition::Random { amplitude, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let values = (0..grid.len()).map(|_| rng.gen_range(-amplitude..=amplitude)).collect();
                Field::new(grid, values).expect("finite samples")
            }
            InitialCondition::Bubble { radius, width } => {
                let c = grid.extent() / 2.0;
                let scale = std::f64::consts::SQRT_2 * width;
                sample_function(grid, |x, y| ((radius - (x - c).hypot(y - c)) / scale).tanh())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nlac_core::max_norm;
    use std::f64::consts::PI;

    #[test]
    fn sine_peak_on_grid() {
        let grid = Grid::new(16, 2.0 * PI).unwrap();
        let u = InitialCondition::Sine { amplitude: 0.5 }.sample(grid);
        assert!((u.get(4, 4) - 0.5).abs() < 1e-15);
        assert!((max_norm(&u) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn random_is_seeded_and_bounded() {
        let grid = Grid::new(32, 1.0).unwrap();
        let ic = InitialCondition::Random { amplitude: 0.9, seed: 7 };
        let a = ic.sample(grid);
        assert_eq!(a, ic.sample(grid));
        assert!(max_norm(&a) <= 0.9);
        let b = InitialCondition::Random { amplitude: 0.9, seed: 8 }.sample(grid);
        assert_ne!(a, b);
        let mean = a.values().iter().sum::<f64>() / a.values().len() as f64;
        assert!(mean.abs() < 0.05, "{mean}");
    }

    #[test]
    fn bubble_is_positive_inside() {
        let grid = Grid::new(64, 2.0 * PI).unwrap();
        let u = InitialCondition::Bubble { radius: PI / 2.0, width: 0.1 }.sample(grid);
        assert!(u.get(32, 32) > 0.99);
        assert!(u.get(0, 0) < -0.99);
        assert!(max_norm(&u) <= 1.0);
    }

    #[test]
    fn rejects_out_of_range_amplitude() {
        let mut c = ExperimentConfig::defaults(crate::config::ExperimentKind::Run);
        c.amplitude = 1.5;
        assert!(InitialCondition::from_config(&c).is_err());
    }
}
