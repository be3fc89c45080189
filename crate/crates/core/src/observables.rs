//! Magnon statistics of a density matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::expectation;
use crate::liouville::DensityMatrix;
use crate::model::ModelOperators;

/// Occupation below which g²(0) is reported as undefined.
pub const OCCUPATION_FLOOR: f64 = 1e-12;
/// Half-width of the band around 1 classified as Poissonian.
pub const POISSON_BAND: f64 = 1e-6;
/// Default g²(0) below which the blockade flag is raised.
pub const BLOCKADE_THRESHOLD: f64 = 1e-2;

const IMAG_TOLERANCE: f64 = 1e-10;
const POSITIVITY_FLOOR: f64 = -1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MagnonStats {
    pub g2_zero: f64,
    pub mean_number: f64,
    /// Magnon marginal p_n for n = 0..=n_max.
    pub fock_populations: Vec<f64>,
    pub top_level_population: f64,
}

/// Equal-time second-order correlation `<m†m†mm> / <m†m>²`.
pub fn g2_zero(rho: &DensityMatrix) -> Result<f64> {
    let (pair, number) = moments(rho)?;
    ratio(pair, number)
}

fn moments(rho: &DensityMatrix) -> Result<(f64, f64)> {
    let ops = ModelOperators::new(rho.dims())?;
    let number = expectation(rho, &ops.magnon_number())?;
    let pair = expectation(rho, &ops.pair_number())?;
    for z in [number, pair] {
        if z.im.abs() > IMAG_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "moment has imaginary part {:e}; density matrix is not Hermitian",
                z.im
            )));
        }
    }
    Ok((pair.re, number.re))
}

pub(crate) fn ratio(pair: f64, number: f64) -> Result<f64> {
    if !(number > OCCUPATION_FLOOR) {
        return Err(Error::NoExcitation(number));
    }
    if pair < POSITIVITY_FLOOR {
        return Err(Error::Positivity(pair));
    }
    Ok(pair.max(0.0) / (number * number))
}

/// Photon-statistics regime of a g²(0) value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistics {
    Bunching,
    Antibunching,
    Poissonian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub statistics: Statistics,
    pub blockade: bool,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self.statistics {
            Statistics::Bunching => "bunching",
            Statistics::Antibunching => "antibunching",
            Statistics::Poissonian => "poissonian",
        };
        if self.blockade {
            write!(f, "{s}+blockade")
        } else {
            f.write_str(s)
        }
    }
}

pub fn classify(g2: f64) -> Result<Classification> {
    classify_with(g2, BLOCKADE_THRESHOLD)
}

pub fn classify_with(g2: f64, blockade_threshold: f64) -> Result<Classification> {
    if !(g2 >= 0.0) {
        return Err(Error::Domain(format!("g2 must be non-negative, got {g2}")));
    }
    let statistics = if g2 > 1.0 + POISSON_BAND {
        Statistics::Bunching
    } else if g2 < 1.0 - POISSON_BAND {
        Statistics::Antibunching
    } else {
        Statistics::Poissonian
    };
    Ok(Classification {
        statistics,
        blockade: g2 < blockade_threshold,
    })
}

/// Fock populations of the magnon after tracing out the qubit.
pub fn magnon_marginal(rho: &DensityMatrix) -> Vec<f64> {
    let dims = rho.dims();
    let mut p = vec![0.0; dims.magnon_dim()];
    let m = rho.matrix();
    for (i, n) in dims.magnon_numbers().enumerate() {
        p[n] += m[(i, i)].re;
    }
    p
}

pub fn magnon_stats(rho: &DensityMatrix) -> Result<MagnonStats> {
    let (pair, number) = moments(rho)?;
    let g2 = ratio(pair, number)?;
    let fock_populations = magnon_marginal(rho);
    let top_level_population = *fock_populations.last().expect("at least two Fock levels");
    Ok(MagnonStats {
        g2_zero: g2,
        mean_number: number,
        fock_populations,
        top_level_population,
    })
}
