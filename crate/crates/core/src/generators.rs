//! Reproducible class members, permutations and calibrated far instances.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{c64, embed, expm_from_eigen, hermitian_eigen, ComplexMatrix, MAX_QUBITS};
use crate::oracles::ClassOracle;
use crate::rng::RngStream;

const BISECTION_STEPS: usize = 60;
const FAR_WINDOW: f64 = 0.05;
const SCAN_STEP: f64 = 0.02;

fn check_register(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::Guard(format!("n = {n} outside 1..={max}")));
    }
    Ok(())
}

/// Orthonormalizes the columns of `a` by modified Gram–Schmidt run twice.
///
/// The resulting `R` has a positive real diagonal, which is the phase (or
/// sign) correction that makes the Q factor of a Ginibre matrix Haar
/// distributed.
fn qr_q_factor(a: &ComplexMatrix) -> ComplexMatrix {
    let d = a.dim();
    let mut cols: Vec<Vec<_>> = (0..d).map(|j| (0..d).map(|i| a[(i, j)]).collect()).collect();
    for j in 0..d {
        for _ in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let qk = &done[k];
                let proj: num_complex::Complex64 =
                    qk.iter().zip(&rest[0]).map(|(q, x)| q.conj() * x).sum();
                for (x, q) in rest[0].iter_mut().zip(qk) {
                    *x -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    ComplexMatrix::from_fn(a.n_qubits(), |r, c| cols[c][r])
}

/// Haar-random unitary on `n` qubits.
pub fn haar_unitary(n: usize, rng: &mut RngStream) -> Result<ComplexMatrix> {
    check_register(n, MAX_QUBITS)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let g = ComplexMatrix::from_fn(n, |_, _| c64(s * rng.gaussian(), s * rng.gaussian()));
    Ok(qr_q_factor(&g))
}

/// Haar-random real orthogonal matrix on `n` qubits.
pub fn random_orthogonal(n: usize, rng: &mut RngStream) -> Result<ComplexMatrix> {
    check_register(n, MAX_QUBITS)?;
    let g = ComplexMatrix::from_fn(n, |_, _| c64(rng.gaussian(), 0.0));
    Ok(qr_q_factor(&g))
}

/// Elementary Clifford gates: `H_i`, `S_i` and `CNOT_{ij}` for `i ≠ j`.
pub fn clifford_generators(n: usize) -> Vec<(String, ComplexMatrix)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let had = ComplexMatrix::from_real(1, &[h, h, h, -h]).unwrap();
    let s = ComplexMatrix::diagonal(&[c64(1.0, 0.0), c64(0.0, 1.0)]).unwrap();
    let cnot = ComplexMatrix::from_real(
        2,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
    .unwrap();
    let mut gens = Vec::new();
    for q in 1..=n {
        gens.push((format!("H{q}"), embed(&had, &[q], n).unwrap()));
        gens.push((format!("S{q}"), embed(&s, &[q], n).unwrap()));
    }
    for control in 1..=n {
        for target in 1..=n {
            if control == target {
                continue;
            }
            let m = if control < target {
                embed(&cnot, &[control, target], n).unwrap()
            } else {
                // Qubit order inside `embed` follows the sorted targets, so
                // conjugate by H⊗H to swap control and target roles.
                let hh = had.kron(&had);
                let flipped = hh.matmul(&cnot).matmul(&hh);
                embed(&flipped, &[target, control], n).unwrap()
            };
            gens.push((format!("CNOT{control}{target}"), m));
        }
    }
    gens
}

/// Product of `depth` steps of a lazy random walk on the elementary Clifford
/// gates: each step applies a uniformly chosen gate or, with the same weight,
/// does nothing.
///
/// The idle option matters: `H` and `S` both act as odd permutations of the
/// Pauli axes, so words of a fixed length only reach half of the group.
pub fn random_clifford(n: usize, depth: usize, rng: &mut RngStream) -> Result<ComplexMatrix> {
    check_register(n, 4)?;
    if depth < 20 * n {
        return Err(Error::InvalidParameter(format!(
            "depth {depth} is below the minimum 20·n = {}",
            20 * n
        )));
    }
    let gens = clifford_generators(n);
    let mut u = ComplexMatrix::identity(n);
    for _ in 0..depth {
        if let Some((_, g)) = gens.get(rng.below(gens.len() + 1)) {
            u = g.matmul(&u);
        }
    }
    Ok(u)
}

/// Uniform `k`-subset of `1..=n`, sorted.
fn random_subset(n: usize, k: usize, rng: &mut RngStream) -> Vec<usize> {
    let mut pool: Vec<usize> = (1..=n).collect();
    for i in 0..k {
        let j = i + rng.below(n - i);
        pool.swap(i, j);
    }
    let mut t = pool[..k].to_vec();
    t.sort_unstable();
    t
}

/// Haar unitary on a uniform random `k`-subset of qubits, identity elsewhere.
///
/// Returns the matrix and the chosen subset.
pub fn random_junta_with_support(
    n: usize,
    k: usize,
    rng: &mut RngStream,
) -> Result<(ComplexMatrix, Vec<usize>)> {
    check_register(n, MAX_QUBITS)?;
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("k = {k} outside 1..={n}")));
    }
    let t = random_subset(n, k, rng);
    let v = haar_unitary(k, rng)?;
    Ok((embed(&v, &t, n)?, t))
}

pub fn random_junta(n: usize, k: usize, rng: &mut RngStream) -> Result<ComplexMatrix> {
    random_junta_with_support(n, k, rng).map(|(u, _)| u)
}

/// Qubit relabeling `τ`, stored as the 1-based image list `τ(1) … τ(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n + 1];
        for &m in &mapping {
            if m == 0 || m > n || seen[m] {
                return Err(Error::InvalidParameter(format!(
                    "{mapping:?} is not a bijection on 1..={n}"
                )));
            }
            seen[m] = true;
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (1..=n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i - 1]
    }

    /// `self ∘ other`, i.e. `j ↦ self(other(j))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            mapping: other.mapping.iter().map(|&j| self.apply(j)).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m - 1] = i + 1;
        }
        Permutation { mapping: inv }
    }

    /// Number of cycles, fixed points counted as 1-cycles.
    pub fn cycle_count(&self) -> usize {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut cycles = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.mapping[i] - 1;
            }
        }
        cycles
    }

    /// All `n!` permutations in lexicographic order of their image lists.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (1..=n).collect();
        loop {
            out.push(Permutation {
                mapping: current.clone(),
            });
            // Next lexicographic permutation.
            let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }

    pub fn random(n: usize, rng: &mut RngStream) -> Permutation {
        let mut mapping: Vec<usize> = (1..=n).collect();
        for i in (1..n).rev() {
            mapping.swap(i, rng.below(i + 1));
        }
        Permutation { mapping }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.mapping.iter().map(|m| m.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mapping = s
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::InvalidParameter(format!("bad permutation entry {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(mapping)
    }
}

/// Basis-state action `τ|i₁…iₙ⟩ = |i_{τ(1)} … i_{τ(n)}⟩`.
pub fn permute_basis_index(p: &Permutation, index: usize) -> usize {
    let n = p.len();
    (1..=n).fold(0, |acc, j| {
        let bit = (index >> (n - p.apply(j))) & 1;
        (acc << 1) | bit
    })
}

/// 0/1 matrix of the qubit relabeling `p`.
pub fn permutation_matrix(p: &Permutation) -> Result<ComplexMatrix> {
    check_register(p.len(), MAX_QUBITS)?;
    let mut m = ComplexMatrix::zeros(p.len());
    for col in 0..m.dim() {
        m[(permute_basis_index(p, col), col)] = c64(1.0, 0.0);
    }
    Ok(m)
}

/// Random Hermitian, traceless, unit Frobenius norm matrix.
pub fn random_hermitian_direction(n: usize, rng: &mut RngStream) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, |_, _| c64(rng.gaussian(), rng.gaussian()));
    let h = (&g + &g.adjoint()).scale(c64(0.5, 0.0));
    let shift = h.trace() / h.dim() as f64;
    let h = &h - &ComplexMatrix::identity(n).scale(shift);
    let norm = crate::linalg::frobenius_norm(&h);
    h.scale(c64(1.0 / norm, 0.0))
}

/// Moves `base` along `t ↦ base·exp(i t H)` for a random direction `H` until
/// the class distance lands in `[epsilon, epsilon + 0.05]`.
///
/// The path is scanned in steps of 0.02 until the distance first reaches
/// `epsilon`, then bisected on the bracketing step.
pub fn perturb_toward_far(
    base: &ComplexMatrix,
    oracle: &ClassOracle<'_>,
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<ComplexMatrix> {
    crate::linalg::require_unitary(base, "base")?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} outside (0, 1)"
        )));
    }
    let h = random_hermitian_direction(base.n_qubits(), rng);
    let (values, vectors) = hermitian_eigen(&h);
    let at = |t: f64| base.matmul(&expm_from_eigen(&values, &vectors, t));
    let dist = |t: f64| -> Result<f64> { oracle.distance(&at(t)) };

    let t_max = 2.0 * std::f64::consts::PI * (base.dim() as f64).sqrt();
    let mut lo = 0.0;
    let mut hi = None;
    let mut t = SCAN_STEP;
    while t <= t_max {
        if dist(t)? >= epsilon {
            hi = Some(t);
            break;
        }
        lo = t;
        t += SCAN_STEP;
    }
    let Some(mut hi) = hi else {
        return Err(Error::Bisection(format!(
            "distance never reached {epsilon} along the sampled direction"
        )));
    };
    for _ in 0..BISECTION_STEPS {
        let d_hi = dist(hi)?;
        if d_hi <= epsilon + FAR_WINDOW {
            return Ok(at(hi));
        }
        let mid = 0.5 * (lo + hi);
        if dist(mid)? >= epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::Bisection(format!(
        "no point with distance in [{epsilon}, {}] after {BISECTION_STEPS} steps",
        epsilon + FAR_WINDOW
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hs_inner, is_unitary};
    use crate::oracles;
    use crate::pauli::{pauli_matrix, pauli_spectrum, support, PauliString};

    #[test]
    fn haar_is_unitary_and_deterministic() {
        for n in 1..=4 {
            let a = haar_unitary(n, &mut RngStream::new(9, n as u64)).unwrap();
            let b = haar_unitary(n, &mut RngStream::new(9, n as u64)).unwrap();
            assert!(is_unitary(&a, 1e-9));
            assert_eq!(a, b);
        }
        assert!(haar_unitary(0, &mut RngStream::new(0, 0)).is_err());
        assert!(haar_unitary(9, &mut RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn haar_trace_moment() {
        let mut rng = RngStream::new(10, 0);
        let draws = 10_000;
        let samples: Vec<f64> = (0..draws)
            .map(|_| haar_unitary(2, &mut rng).unwrap().trace().norm_sqr())
            .collect();
        let mean = samples.iter().sum::<f64>() / draws as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        let se = (var / draws as f64).sqrt();
        assert!((mean - 1.0).abs() <= 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn orthogonal_is_real_with_unit_bell_probability() {
        let mut rng = RngStream::new(11, 0);
        for n in 1..=3 {
            let u = random_orthogonal(n, &mut rng).unwrap();
            assert!(u.is_real());
            assert!(is_unitary(&u, 1e-9));
            let tr = u.matmul(&u.transpose()).trace();
            assert!((tr - c64(u.dim() as f64, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn clifford_conjugates_paulis_to_paulis() {
        let mut rng = RngStream::new(12, 0);
        for n in 1..=3 {
            let u = random_clifford(n, 20 * n + 5, &mut rng).unwrap();
            for x in PauliString::all(n) {
                let conj = u.matmul(&pauli_matrix(&x)).matmul(&u.adjoint());
                let d = oracles::dist_to_pauli_group(&conj).value;
                assert!(d < 1e-8, "{x}: {d}");
            }
        }
        assert!(random_clifford(2, 39, &mut rng).is_err());
        assert!(random_clifford(5, 200, &mut rng).is_err());
    }

    #[test]
    fn single_qubit_circuits_reach_every_clifford_class() {
        let table = oracles::enumerate_clifford(1).unwrap();
        let mut rng = RngStream::new(13, 0);
        let mut seen = vec![0usize; table.len()];
        for _ in 0..10_000 {
            let u = random_clifford(1, 40, &mut rng).unwrap();
            let r = oracles::dist_to_clifford(&u, &table).unwrap();
            assert!(r.value < 1e-8);
            seen[r.witness_index.unwrap()] += 1;
        }
        assert!(seen.iter().all(|&c| c > 0), "{seen:?}");
    }

    #[test]
    fn generators_have_expected_names() {
        let names: Vec<String> = clifford_generators(2).into_iter().map(|g| g.0).collect();
        assert_eq!(names, ["H1", "S1", "H2", "S2", "CNOT12", "CNOT21"]);
        // CNOT21 flips qubit 1 when qubit 2 is set.
        let gens = clifford_generators(2);
        let cnot21 = &gens[5].1;
        for b in 0..4usize {
            let target = if b & 1 == 1 { b ^ 2 } else { b };
            assert!((cnot21[(target, b)] - c64(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn junta_spectrum_supported_on_subset() {
        let mut rng = RngStream::new(13, 0);
        for (n, k) in [(3, 1), (3, 2), (4, 2), (2, 2)] {
            let (u, t) = random_junta_with_support(n, k, &mut rng).unwrap();
            assert!(is_unitary(&u, 1e-9));
            let spec = pauli_spectrum(&u);
            for x in PauliString::all(n) {
                if !support(&x).iter().all(|q| t.contains(q)) {
                    assert_eq!(spec.coefficient(&x).norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn permutation_matrix_examples() {
        assert_eq!(
            permutation_matrix(&Permutation::identity(3)).unwrap(),
            ComplexMatrix::identity(3)
        );
        let swap12: Permutation = "2 1 3".parse().unwrap();
        let m = permutation_matrix(&swap12).unwrap();
        assert_eq!(m.trace(), c64(4.0, 0.0));
        assert_eq!(swap12.cycle_count(), 2);
        assert!(is_unitary(&m, 1e-12) && m.is_real());
    }

    #[test]
    fn permutation_action_on_basis_states() {
        // τ|i1 i2 i3⟩ = |i_τ(1) i_τ(2) i_τ(3)⟩ with τ = (2 3 1).
        let p: Permutation = "2 3 1".parse().unwrap();
        let m = permutation_matrix(&p).unwrap();
        for b in 0..8usize {
            let bits = [(b >> 2) & 1, (b >> 1) & 1, b & 1];
            let out = (bits[1] << 2) | (bits[2] << 1) | bits[0];
            assert_eq!(m[(out, b)], c64(1.0, 0.0));
        }
    }

    #[test]
    fn permutation_composition_convention() {
        // matrix(p)·matrix(q) = matrix(q ∘ p), checked by brute-force basis action.
        let all = Permutation::all(3);
        for p in &all {
            for q in &all {
                let lhs = permutation_matrix(p).unwrap().matmul(&permutation_matrix(q).unwrap());
                let rhs = permutation_matrix(&q.compose(p)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn permutation_parsing_and_enumeration() {
        assert!("1 1 2".parse::<Permutation>().is_err());
        assert!("0 1".parse::<Permutation>().is_err());
        assert!("a".parse::<Permutation>().is_err());
        assert_eq!(Permutation::all(4).len(), 24);
        let p: Permutation = "3 1 2".parse().unwrap();
        assert_eq!(p.to_string(), "3 1 2");
        assert_eq!(p.compose(&p.inverse()), Permutation::identity(3));
    }

    #[test]
    fn permutation_inner_products_are_powers_of_two() {
        for n in 1..=4 {
            let all = Permutation::all(n);
            let mats: Vec<_> = all.iter().map(|p| permutation_matrix(p).unwrap()).collect();
            for (a, ma) in all.iter().zip(&mats) {
                for (b, mb) in all.iter().zip(&mats) {
                    let ip = hs_inner(ma, mb).unwrap();
                    let l = a.inverse().compose(b).cycle_count();
                    assert_eq!(ip, c64((1u64 << l) as f64, 0.0));
                }
            }
        }
    }

    #[test]
    fn perturbation_lands_in_window() {
        let mut rng = RngStream::new(14, 0);
        let base = pauli_matrix(&"XZ".parse().unwrap());
        let u = perturb_toward_far(&base, &ClassOracle::Pauli, 0.3, &mut rng).unwrap();
        assert!(is_unitary(&u, 1e-9));
        let d = oracles::dist_to_pauli_group(&u).value;
        assert!((0.3..=0.35).contains(&d), "{d}");
        assert!(perturb_toward_far(&base, &ClassOracle::Pauli, 1.5, &mut rng).is_err());
    }
}
