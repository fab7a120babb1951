//! Born-rule simulation of measurements on Choi states `|v(U)⟩ = (U ⊗ I)|Φ⁺⟩`.
//!
//! Choi vectors are never materialized; every probability is computed from
//! Hilbert–Schmidt overlaps or from the Pauli spectrum.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hs_inner, ComplexMatrix};
use crate::pauli::{PauliSpectrum, PauliString};
use crate::rng::RngStream;

/// Largest tolerated deviation of a spectrum's total mass from 1.
pub const MASS_TOL: f64 = 1e-6;

/// `⟨v(u)|v(v)⟩ = ⟨u, v⟩/N`.
pub fn choi_overlap(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Complex64> {
    Ok(hs_inner(u, v)? / u.dim() as f64)
}

/// Inverse-CDF sampler over the `4ⁿ` outcomes of a Pauli–Choi measurement.
#[derive(Clone, Debug)]
pub struct PauliSampler {
    n: usize,
    cumulative: Vec<f64>,
}

impl PauliSampler {
    pub fn new(spectrum: &PauliSpectrum) -> Result<Self> {
        let total = spectrum.total_probability();
        if !total.is_finite() || (total - 1.0).abs() > MASS_TOL {
            return Err(Error::ProbabilityMass(total));
        }
        let mut acc = 0.0;
        let cumulative = spectrum
            .probabilities()
            .iter()
            .map(|&p| {
                acc += p / total;
                acc
            })
            .collect();
        Ok(Self {
            n: spectrum.n(),
            cumulative,
        })
    }

    pub fn sample_index(&self, rng: &mut RngStream) -> usize {
        let target = rng.uniform();
        let i = self.cumulative.partition_point(|&c| c <= target);
        // Float drift can leave the last cumulative entry a hair below 1.
        let i = i.min(self.cumulative.len() - 1);
        // Never return a zero-probability outcome.
        self.skip_empty(i)
    }

    fn skip_empty(&self, mut i: usize) -> usize {
        let prob = |j: usize| {
            if j == 0 {
                self.cumulative[0]
            } else {
                self.cumulative[j] - self.cumulative[j - 1]
            }
        };
        while prob(i) <= 0.0 && i > 0 {
            i -= 1;
        }
        i
    }

    pub fn sample(&self, rng: &mut RngStream) -> PauliString {
        PauliString::from_index(self.sample_index(rng), self.n)
    }
}

/// One measurement of `|v(U)⟩` in the basis `{|v(σ_x)⟩}`.
pub fn sample_pauli_measurement(spectrum: &PauliSpectrum, rng: &mut RngStream) -> Result<PauliString> {
    Ok(PauliSampler::new(spectrum)?.sample(rng))
}

/// `|tr(u uᵀ)|²/N²`, the chance that `(U ⊗ U)|Φ⁺⟩` is found in `|Φ⁺⟩`.
pub fn bell_test_success_prob(u: &ComplexMatrix) -> f64 {
    let d = u.dim() as f64;
    // tr(u uᵀ) = Σ_ij u_ij²
    let tr: Complex64 = u.entries().iter().map(|z| z * z).sum();
    tr.norm_sqr() / (d * d)
}

/// Bernoulli draw with the success probability of [`bell_test_success_prob`].
pub fn sample_bell_test(u: &ComplexMatrix, rng: &mut RngStream) -> bool {
    rng.bernoulli(bell_test_success_prob(u))
}
