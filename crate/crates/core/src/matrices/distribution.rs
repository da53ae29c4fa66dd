use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Entry distribution of a random measurement ensemble. Every variant is
/// scaled to the same per-entry variance, so the tags differ only in shape.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryDistribution {
    #[default]
    Gaussian,
    Rademacher,
    Uniform,
}

impl EntryDistribution {
    pub const ALL: [EntryDistribution; 3] = [Self::Gaussian, Self::Rademacher, Self::Uniform];

    /// Draw one zero-mean, unit-variance value.
    pub fn sample_unit<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Self::Gaussian => StandardNormal.sample(rng),
            Self::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            // U[-√3, √3] has variance 1.
            Self::Uniform => (2.0 * rng.random::<f64>() - 1.0) * 3f64.sqrt(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R, std_dev: f64) -> f64 {
        std_dev * self.sample_unit(rng)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Rademacher => "rademacher",
            Self::Uniform => "uniform",
        }
    }
}

impl fmt::Display for EntryDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntryDistribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(Self::Gaussian),
            "rademacher" => Ok(Self::Rademacher),
            "uniform" => Ok(Self::Uniform),
            other => Err(format!("unknown distribution `{other}` (expected gaussian, rademacher or uniform)")),
        }
    }
}
