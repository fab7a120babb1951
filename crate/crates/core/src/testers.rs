//! Classical simulations of the five unitary property testers.
//!
//! Every tester is one-sided: class members are accepted with probability one.
//! Rejection stops a run early, and `queries_used` counts only the black-box
//! uses actually spent.

use num_complex::Complex64;
use serde::Serialize;

use crate::choi::{choi_overlap, sample_bell_test, PauliSampler};
use crate::error::{Error, Result};
use crate::generators::{permutation_matrix, Permutation};
use crate::linalg::{hs_inner_unchecked, jacobi_svd, require_unitary, ComplexMatrix};
use crate::pauli::{pauli_matrix, pauli_spectrum, support, PauliString};
use crate::rng::RngStream;

/// Constant `c` in the Pauli tester's sample count `max(2, ⌈c/ε²⌉)`.
pub const PAULI_CONSTANT: f64 = 2.0;
/// Rounds of the Clifford tester.
pub const CLIFFORD_ROUNDS: usize = 5;
/// Ceiling on the junta tester's sample count.
pub const JUNTA_MAX_SAMPLES: usize = 1_000_000;
/// Largest register for which all `n!` permutations are materialized.
pub const PERMUTATION_MAX_QUBITS: usize = 6;
/// Relative cutoff for singular values kept in the Gram pseudoinverse.
pub const PINV_RTOL: f64 = 1e-10;
/// Members whose phase-free overlap gap is below this are duplicates.
pub const DEGENERATE_TOL: f64 = 1e-10;

/// One step of a tester's trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IterationRecord {
    Bell {
        success: bool,
    },
    Junta {
        outcome: PauliString,
        support: Vec<usize>,
    },
    Pauli {
        outcome: PauliString,
    },
    Clifford {
        x: PauliString,
        accepted: bool,
        outcomes: Vec<PauliString>,
    },
    Subset {
        copies: usize,
        probability: f64,
        accepted: bool,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct TestVerdict {
    pub accepted: bool,
    pub queries_used: u64,
    pub iterations: Vec<IterationRecord>,
    pub epsilon: f64,
    pub policy: String,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(())
}

/// `⌈1/ε²⌉` Bell rounds.
pub fn orthogonal_iterations(epsilon: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    Ok((1.0 / (epsilon * epsilon)).ceil() as usize)
}

/// Smallest `m > k` with `k ln m − (ε²/4)(m − k) ≤ ln(1/3)`.
pub fn junta_sample_count(k: usize, epsilon: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    let rate = epsilon * epsilon / 4.0;
    let target = (1.0f64 / 3.0).ln();
    let kf = k as f64;
    (k + 1..=JUNTA_MAX_SAMPLES)
        .find(|&m| kf * (m as f64).ln() - rate * (m - k) as f64 <= target)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "junta sample count exceeds {JUNTA_MAX_SAMPLES} for k = {k}, epsilon = {epsilon}"
            ))
        })
}

/// `max(2, ⌈2/ε²⌉)` measurements.
pub fn pauli_sample_count(epsilon: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    Ok(((PAULI_CONSTANT / (epsilon * epsilon)).ceil() as usize).max(2))
}

/// `K = ⌈ln(5M) / min(ε², δ)⌉` copies.
pub fn finite_subset_copies(members: usize, epsilon: f64, delta: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "subset separation must be positive, got {delta}"
        )));
    }
    let rate = (epsilon * epsilon).min(delta);
    Ok(((5.0 * members as f64).ln() / rate).ceil().max(1.0) as usize)
}

/// `Σ_x |μ_x(u)|^{2m}`, the Pauli tester's exact acceptance probability.
pub fn pauli_accept_probability(u: &ComplexMatrix, samples: usize) -> f64 {
    pauli_spectrum(u)
        .probabilities()
        .iter()
        .map(|p| p.powi(samples as i32))
        .sum()
}

/// `ε` ∈ (0,1) and `u` unitary — shared preconditions.
fn check_inputs(u: &ComplexMatrix, epsilon: f64) -> Result<()> {
    check_epsilon(epsilon)?;
    require_unitary(u, "input operator")
}

pub fn test_orthogonal(u: &ComplexMatrix, epsilon: f64, rng: &mut RngStream) -> Result<TestVerdict> {
    check_inputs(u, epsilon)?;
    let rounds = orthogonal_iterations(epsilon)?;
    let mut iterations = Vec::new();
    let mut accepted = true;
    for _ in 0..rounds {
        let success = sample_bell_test(u, rng);
        iterations.push(IterationRecord::Bell { success });
        if !success {
            accepted = false;
            break;
        }
    }
    Ok(TestVerdict {
        accepted,
        queries_used: 2 * iterations.len() as u64,
        iterations,
        epsilon,
        policy: format!("bell rounds R = ceil(1/eps^2) = {rounds}, 2 queries each"),
    })
}

pub fn test_junta(
    u: &ComplexMatrix,
    k: usize,
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<TestVerdict> {
    check_inputs(u, epsilon)?;
    let n = u.n_qubits();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "k must satisfy 1 <= k <= n = {n}, got {k}"
        )));
    }
    let samples = junta_sample_count(k, epsilon)?;
    let sampler = PauliSampler::new(&pauli_spectrum(u))?;
    let mut witness = std::collections::BTreeSet::new();
    let mut iterations = Vec::new();
    let mut accepted = true;
    for _ in 0..samples {
        let outcome = sampler.sample(rng);
        witness.extend(support(&outcome));
        iterations.push(IterationRecord::Junta {
            outcome,
            support: witness.iter().copied().collect(),
        });
        if witness.len() > k {
            accepted = false;
            break;
        }
    }
    Ok(TestVerdict {
        accepted,
        queries_used: iterations.len() as u64,
        iterations,
        epsilon,
        policy: format!(
            "support union over m = {samples} samples (k ln m - (eps^2/4)(m-k) <= ln 1/3)"
        ),
    })
}

/// Draws up to `samples` outcomes, stopping at the first disagreement.
fn run_pauli_samples(
    sampler: &PauliSampler,
    samples: usize,
    rng: &mut RngStream,
) -> (bool, Vec<PauliString>) {
    let mut outcomes: Vec<PauliString> = Vec::with_capacity(samples.min(64));
    for _ in 0..samples {
        let outcome = sampler.sample(rng);
        let differs = outcomes.first().is_some_and(|first| *first != outcome);
        outcomes.push(outcome);
        if differs {
            return (false, outcomes);
        }
    }
    (true, outcomes)
}

pub fn test_pauli(u: &ComplexMatrix, epsilon: f64, rng: &mut RngStream) -> Result<TestVerdict> {
    check_inputs(u, epsilon)?;
    let samples = pauli_sample_count(epsilon)?;
    let sampler = PauliSampler::new(&pauli_spectrum(u))?;
    let (accepted, outcomes) = run_pauli_samples(&sampler, samples, rng);
    Ok(TestVerdict {
        accepted,
        queries_used: outcomes.len() as u64,
        iterations: outcomes
            .into_iter()
            .map(|outcome| IterationRecord::Pauli { outcome })
            .collect(),
        epsilon,
        policy: format!("identical outcomes over m = max(2, ceil(2/eps^2)) = {samples}"),
    })
}

pub fn test_clifford(u: &ComplexMatrix, epsilon: f64, rng: &mut RngStream) -> Result<TestVerdict> {
    check_inputs(u, epsilon)?;
    let inner_eps = epsilon / 8.0;
    let samples = pauli_sample_count(inner_eps)?;
    let n = u.n_qubits();
    let ud = u.adjoint();
    let mut iterations = Vec::new();
    let mut queries = 0u64;
    let mut accepted = true;
    for _ in 0..CLIFFORD_ROUNDS {
        let x = PauliString::from_index(rng.below(1 << (2 * n)), n);
        let conj = u.matmul(&pauli_matrix(&x)).matmul(&ud);
        let sampler = PauliSampler::new(&pauli_spectrum(&conj))?;
        let (ok, outcomes) = run_pauli_samples(&sampler, samples, rng);
        queries += 2 * outcomes.len() as u64;
        iterations.push(IterationRecord::Clifford {
            x,
            accepted: ok,
            outcomes,
        });
        if !ok {
            accepted = false;
            break;
        }
    }
    Ok(TestVerdict {
        accepted,
        queries_used: queries,
        iterations,
        epsilon,
        policy: format!(
            "{CLIFFORD_ROUNDS} rounds of the Pauli test at eps/8 (m = {samples}), 2 queries per sample"
        ),
    })
}

/// A finite set of pairwise phase-inequivalent unitaries.
#[derive(Clone, Debug)]
pub struct FiniteSubset {
    members: Vec<ComplexMatrix>,
    /// Row-major `M × M` table of `⟨W_i, W_j⟩/N`.
    overlaps: Vec<Complex64>,
    delta: f64,
}

impl FiniteSubset {
    pub fn new(members: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::InvalidParameter("subset has no members".into()));
        };
        let dim = first.dim();
        for m in &members {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: m.dim(),
                });
            }
            require_unitary(m, "subset member")?;
        }
        let count = members.len();
        let mut overlaps = vec![Complex64::new(0.0, 0.0); count * count];
        for i in 0..count {
            for j in i..count {
                let ov = hs_inner_unchecked(&members[i], &members[j]) / dim as f64;
                overlaps[i * count + j] = ov;
                overlaps[j * count + i] = ov.conj();
            }
        }
        Self::from_parts(members, overlaps)
    }

    /// Builds from a precomputed overlap table; `delta` is derived from it.
    pub(crate) fn from_parts(members: Vec<ComplexMatrix>, overlaps: Vec<Complex64>) -> Result<Self> {
        let count = members.len();
        let mut worst = (0, 0, 0.0f64);
        for i in 0..count {
            for j in i + 1..count {
                let ov = overlaps[i * count + j].norm();
                if ov > worst.2 {
                    worst = (i, j, ov);
                }
            }
        }
        // A single member is at distance 1 from nothing; take δ = 1.
        let delta = 1.0 - worst.2;
        if delta <= DEGENERATE_TOL {
            return Err(Error::DegenerateSubset {
                first: worst.0,
                second: worst.1,
                delta,
            });
        }
        Ok(Self {
            members,
            overlaps,
            delta,
        })
    }

    pub fn members(&self) -> &[ComplexMatrix] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    /// `1 − max_{i<j} |⟨W_i, W_j⟩|/N`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn overlap(&self, i: usize, j: usize) -> Complex64 {
        self.overlaps[i * self.len() + j]
    }
}

/// All `n!` qubit permutations, with overlaps `2^{cycles(τ_i⁻¹τ_j)}/N`.
pub fn permutation_subset(n: usize) -> Result<FiniteSubset> {
    if n == 0 || n > PERMUTATION_MAX_QUBITS {
        return Err(Error::Guard(format!(
            "permutation tester materializes n! members only for 1 <= n <= {PERMUTATION_MAX_QUBITS} (got n = {n})"
        )));
    }
    let perms = Permutation::all(n);
    let members = perms
        .iter()
        .map(permutation_matrix)
        .collect::<Result<Vec<_>>>()?;
    let count = perms.len();
    let mut overlaps = Vec::with_capacity(count * count);
    for a in &perms {
        let inv = a.inverse();
        for b in &perms {
            let cycles = inv.compose(b).cycle_count();
            overlaps.push(Complex64::new(2f64.powi(cycles as i32 - n as i32), 0.0));
        }
    }
    FiniteSubset::from_parts(members, overlaps)
}

/// `⟨ψ|Π_K|ψ⟩` for `ψ = v(u)^{⊗K}` and `Π_K` the projector onto
/// `span{v(W_j)^{⊗K}}`, computed as `c† G⁺ c` from overlaps alone.
pub fn finite_subset_accept_probability(
    u: &ComplexMatrix,
    s: &FiniteSubset,
    copies: usize,
) -> Result<f64> {
    if u.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: s.dim(),
        });
    }
    let m = s.len();
    let k = u32::try_from(copies)
        .map_err(|_| Error::InvalidParameter(format!("copies = {copies} too large")))?;
    let gram: Vec<Complex64> = s.overlaps.iter().map(|z| z.powu(k)).collect();
    let c = s
        .members
        .iter()
        .map(|w| choi_overlap(w, u).map(|z| z.powu(k)))
        .collect::<Result<Vec<_>>>()?;
    let raw = jacobi_svd(m, &gram);
    let top = raw.singular_values.first().copied().unwrap_or(0.0);
    let mut p = Complex64::new(0.0, 0.0);
    for (i, &sv) in raw.singular_values.iter().enumerate() {
        if sv <= PINV_RTOL * top || sv == 0.0 {
            continue;
        }
        // G⁺ = Σ v_i u_i† / σ_i with G = Σ σ_i u_i v_i†; `right` holds rows v_i†.
        let left_dot: Complex64 = (0..m).map(|r| raw.left[r * m + i].conj() * c[r]).sum();
        let right_dot: Complex64 = (0..m).map(|r| c[r].conj() * raw.right[i * m + r].conj()).sum();
        p += right_dot * left_dot / sv;
    }
    Ok(p.re)
}

pub fn test_finite_subset(
    u: &ComplexMatrix,
    s: &FiniteSubset,
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<TestVerdict> {
    check_inputs(u, epsilon)?;
    let copies = finite_subset_copies(s.len(), epsilon, s.delta())?;
    let probability = finite_subset_accept_probability(u, s, copies)?.clamp(0.0, 1.0);
    let accepted = rng.bernoulli(probability);
    Ok(TestVerdict {
        accepted,
        queries_used: copies as u64,
        iterations: vec![IterationRecord::Subset {
            copies,
            probability,
            accepted,
        }],
        epsilon,
        policy: format!(
            "span projection on K = ceil(ln(5M)/min(eps^2, delta)) = {copies} copies (M = {}, delta = {})",
            s.len(),
            s.delta()
        ),
    })
}

pub fn test_permutation(u: &ComplexMatrix, epsilon: f64, rng: &mut RngStream) -> Result<TestVerdict> {
    check_inputs(u, epsilon)?;
    let s = permutation_subset(u.n_qubits())?;
    test_finite_subset(u, &s, epsilon, rng)
}
