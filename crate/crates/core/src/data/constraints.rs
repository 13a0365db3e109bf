use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tensor::{self, Vec3};
use super::InitialData;
use crate::error::{Error, Result};

/// Local energy density `μ` and momentum density `J` (covariant).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyMomentum {
    pub mu: f64,
    pub j: Vec3,
    /// `|J|_g`
    pub j_norm: f64,
}

/// `2μ = R_g + (tr k)² − |k|²`, `J = div(k − (tr k) g)`.
pub fn energy_momentum(data: &dyn InitialData, x: &Vec3) -> Result<EnergyMomentum> {
    data.check_domain(x)?;
    let g = data.g(x);
    let ginv = tensor::inverse(&g)
        .filter(|_| tensor::is_positive_definite(&g))
        .ok_or_else(|| Error::InvalidParameter(format!("metric not positive definite at {x:?}")))?;
    let dg = data.dg(x);
    let ddg = data.ddg(x);
    let k = data.k(x);
    let dk = data.dk(x);

    let r = tensor::scalar_curvature(&ginv, &dg, &ddg);
    let trk = tensor::trace(&ginv, &k);
    let k2 = tensor::contract2(&ginv, &k, &k);
    let mu = 0.5 * (r + trk * trk - k2);

    let gam = tensor::christoffel(&ginv, &dg);
    let mut j = [0.0; 3];
    for i in 0..3 {
        // g^{jl} ∇_l k_ij
        let mut div = 0.0;
        for a in 0..3 {
            for l in 0..3 {
                let mut cov = dk[l][i][a];
                for m in 0..3 {
                    cov -= gam[m][l][i] * k[m][a] + gam[m][l][a] * k[i][m];
                }
                div += ginv[a][l] * cov;
            }
        }
        // ∂_i tr k = ∂_i g^{ab} k_ab + g^{ab} ∂_i k_ab
        let mut dtr = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let mut dginv = 0.0;
                for c in 0..3 {
                    for d in 0..3 {
                        dginv -= ginv[a][c] * dg[i][c][d] * ginv[d][b];
                    }
                }
                dtr += dginv * k[a][b] + ginv[a][b] * dk[i][a][b];
            }
        }
        j[i] = div - dtr;
    }
    let j_norm = tensor::bilinear(&ginv, &j, &j).max(0.0).sqrt();
    Ok(EnergyMomentum { mu, j, j_norm })
}

/// `min (μ − |J|_g)` over the samples.
pub fn dec_margin(data: &dyn InitialData, samples: &[Vec3]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let mut best = f64::INFINITY;
    for x in samples {
        let em = energy_momentum(data, x)?;
        best = best.min(em.mu - em.j_norm);
    }
    Ok(best)
}

/// Reproducible random points in the shell `r_min ≤ |x| ≤ r_max`, where
/// `r_min` clears the excised region.
pub fn sample_points(data: &dyn InitialData, n: usize, seed: u64) -> Vec<Vec3> {
    let r_min = (2.0 * data.excision_radius()).max(0.3);
    let r_max = r_min + 5.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z: f64 = rng.random_range(-1.0..=1.0);
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let r: f64 = rng.random_range(r_min..=r_max);
            let s = (1.0 - z * z).sqrt();
            [r * s * phi.cos(), r * s * phi.sin(), r * z]
        })
        .collect()
}
