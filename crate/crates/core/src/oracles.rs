//! Brute-force distance oracles and conjugation-tableau diagnostics.
//!
//! Each oracle reports the distance together with a class element attaining
//! it; the value is the residual distance to that element, so it is an exact
//! upper bound and coincides with the class distance at the optimum.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::clifford_generators;
use crate::io::MatrixFile;
use crate::linalg::{
    aligned_residual, embed, hs_inner_unchecked, nearest_unitary,
    nuclear_norm, partial_trace, svd, wrap_phase, ComplexMatrix, DistanceReport,
};
use crate::pauli::{commutes, oplus, pauli_matrix, pauli_spectrum, PauliSpectrum, PauliString};
use crate::testers::FiniteSubset;

/// Default grid size for [`dist_to_orthogonal`].
pub const ORTHOGONAL_GRID: usize = 256;
/// Default golden-section iterations for [`dist_to_orthogonal`].
pub const ORTHOGONAL_REFINEMENTS: usize = 60;
/// Largest register for [`dist_to_juntas`].
pub const JUNTA_MAX_QUBITS: usize = 4;
/// Largest register for [`extract_tableau`] and [`good_fraction`].
pub const TABLEAU_MAX_QUBITS: usize = 3;
/// Rounding slack for the δ-good predicate.
pub const GOOD_TOL: f64 = 1e-12;
/// Version tag of the cached Clifford table format.
pub const CLIFFORD_CACHE_VERSION: u32 = 1;

const SNAP_TOL: f64 = 1e-6;
const KEY_SCALE: f64 = 1e6;

/// A class whose distance can be computed exactly.
#[derive(Clone, Copy, Debug)]
pub enum ClassOracle<'a> {
    Pauli,
    Orthogonal,
    Junta { k: usize },
    Clifford(&'a CliffordTable),
    Subset(&'a FiniteSubset),
}

impl ClassOracle<'_> {
    pub fn report(&self, u: &ComplexMatrix) -> Result<DistanceReport> {
        match self {
            ClassOracle::Pauli => Ok(dist_to_pauli_group(u)),
            ClassOracle::Orthogonal => {
                dist_to_orthogonal(u, ORTHOGONAL_GRID, ORTHOGONAL_REFINEMENTS)
            }
            ClassOracle::Junta { k } => dist_to_juntas(u, *k),
            ClassOracle::Clifford(table) => dist_to_clifford(u, table),
            ClassOracle::Subset(s) => dist_to_finite_subset(u, s),
        }
    }

    pub fn distance(&self, u: &ComplexMatrix) -> Result<f64> {
        self.report(u).map(|r| r.value)
    }
}

/// `D` to the Pauli group given a spectrum of a unitary.
///
/// Uses `1 − |μ| = (1 − |μ|²)/(1 + |μ|)` with `1 − |μ|²` summed from the other
/// coefficients, which keeps exact members at zero instead of `√ulp`.
pub(crate) fn pauli_distance_from_spectrum(spec: &PauliSpectrum) -> (f64, usize) {
    let best = spec.argmax();
    let probs = spec.probabilities();
    let rest: f64 = probs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, &p)| p)
        .sum();
    let top = probs[best].sqrt();
    ((rest / (1.0 + top)).max(0.0).sqrt(), best)
}

/// Distance to the Pauli group `P_n`: `sqrt(1 − max_x |μ_x(u)|)`.
pub fn dist_to_pauli_group(u: &ComplexMatrix) -> DistanceReport {
    let spec = pauli_spectrum(u);
    let (value, best) = pauli_distance_from_spectrum(&spec);
    let mu = spec.coefficients()[best];
    DistanceReport {
        value,
        witness_phase: wrap_phase(-mu.arg()),
        witness_index: Some(best),
        witness_label: Some(PauliString::from_index(best, u.n_qubits()).to_string()),
    }
}

fn orthogonal_objective(u: &ComplexMatrix, theta: f64) -> f64 {
    nuclear_norm(&u.scale(Complex64::from_polar(1.0, theta)).real_part())
}

/// Distance to the real orthogonal group.
///
/// For a fixed phase `θ` the closest orthogonal matrix to `e^{iθ}u` is the
/// polar factor of `Re(e^{iθ}u)` and the overlap is its nuclear norm. The
/// objective has period `π`; it is maximized by a grid over `[0, π)` and
/// golden-section refinement around the best grid point.
pub fn dist_to_orthogonal(
    u: &ComplexMatrix,
    grid: usize,
    refinements: usize,
) -> Result<DistanceReport> {
    if grid < 64 {
        return Err(Error::InvalidParameter(format!("grid = {grid} < 64")));
    }
    let step = PI / grid as f64;
    let (mut best_theta, mut best_val) = (0.0, f64::NEG_INFINITY);
    for i in 0..grid {
        let theta = i as f64 * step;
        let val = orthogonal_objective(u, theta);
        if val > best_val {
            best_val = val;
            best_theta = theta;
        }
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best_theta - step, best_theta + step);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (orthogonal_objective(u, c), orthogonal_objective(u, d));
    for _ in 0..refinements {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = orthogonal_objective(u, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = orthogonal_objective(u, d);
        }
    }
    let (theta, val) = if fc > fd { (c, fc) } else { (d, fd) };
    let (theta, _) = if val >= best_val {
        (theta, val)
    } else {
        (best_theta, best_val)
    };
    let rotated = u.scale(Complex64::from_polar(1.0, theta));
    let q = nearest_unitary(&rotated.real_part()).real_part();
    let value = aligned_residual(u, &q, hs_inner_unchecked(u, &q));
    Ok(DistanceReport {
        value,
        witness_phase: wrap_phase(theta),
        witness_index: None,
        witness_label: None,
    })
}

/// Closest operator of the form `V_T ⊗ I` to `u` and its distance.
pub fn nearest_junta_on(u: &ComplexMatrix, subset: &[usize]) -> Result<(ComplexMatrix, f64)> {
    let reduced = partial_trace(u, subset)?;
    let v = nearest_unitary(&reduced);
    let w = embed(&v, subset, u.n_qubits())?;
    let d = aligned_residual(u, &w, hs_inner_unchecked(u, &w));
    Ok((w, d))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (1..=k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(current.clone());
        let Some(i) = (0..k).rev().find(|&i| current[i] < n - k + 1 + i) else {
            break;
        };
        current[i] += 1;
        for j in i + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
    out
}

fn format_subset(t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().map(|q| q.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Distance to the `k`-juntas: the best subset `T` maximizes the nuclear norm
/// of the partial trace of `u` onto `T`.
pub fn dist_to_juntas(u: &ComplexMatrix, k: usize) -> Result<DistanceReport> {
    let n = u.n_qubits();
    if n > JUNTA_MAX_QUBITS {
        return Err(Error::Guard(format!(
            "junta oracle enumerates subsets only for n <= {JUNTA_MAX_QUBITS} (got n = {n})"
        )));
    }
    if k > n {
        return Err(Error::Guard(format!("k = {k} exceeds n = {n}")));
    }
    let mut best: Option<(usize, Vec<usize>, f64, ComplexMatrix)> = None;
    for (idx, t) in combinations(n, k).into_iter().enumerate() {
        let score = nuclear_norm(&partial_trace(u, &t)?);
        if best.as_ref().is_none_or(|b| score > b.2 + 1e-14) {
            let (w, _) = nearest_junta_on(u, &t)?;
            best = Some((idx, t, score, w));
        }
    }
    let (idx, t, _, w) = best.expect("at least one subset");
    let ip = hs_inner_unchecked(u, &w);
    Ok(DistanceReport {
        value: aligned_residual(u, &w, ip),
        witness_phase: wrap_phase(ip.arg()),
        witness_index: Some(idx),
        witness_label: Some(format_subset(&t)),
    })
}

/// One representative per phase class of the Clifford group on `n ≤ 2` qubits.
#[derive(Clone, Debug)]
pub struct CliffordTable {
    pub n: usize,
    pub elements: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct CliffordCache {
    format_version: u32,
    n: usize,
    elements: Vec<MatrixFile>,
}

impl CliffordTable {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let cache = CliffordCache {
            format_version: CLIFFORD_CACHE_VERSION,
            n: self.n,
            elements: self.elements.iter().map(MatrixFile::from).collect(),
        };
        std::fs::write(path, serde_json::to_vec(&cache)?)?;
        Ok(())
    }

    /// Loads a cached table, checking version and register size.
    pub fn load(path: &Path, n: usize) -> Result<Self> {
        let cache: CliffordCache = serde_json::from_slice(&std::fs::read(path)?)?;
        if cache.format_version != CLIFFORD_CACHE_VERSION || cache.n != n {
            return Err(Error::Format(format!(
                "cache {} holds version {} for n = {}, expected version {} for n = {}",
                path.display(),
                cache.format_version,
                cache.n,
                CLIFFORD_CACHE_VERSION,
                n
            )));
        }
        let elements = cache
            .elements
            .into_iter()
            .map(ComplexMatrix::try_from)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, elements })
    }

    /// Reads the cache at `path` when valid, otherwise enumerates and writes it.
    pub fn load_or_build(path: &Path, n: usize) -> Result<Self> {
        if let Ok(table) = Self::load(path, n) {
            return Ok(table);
        }
        let table = enumerate_clifford(n)?;
        table.save(path)?;
        Ok(table)
    }
}

/// Rounded entries after dividing out the phase of the first nonzero entry.
fn canonical_key(m: &ComplexMatrix) -> Vec<(i64, i64)> {
    let pivot = m
        .entries()
        .iter()
        .find(|z| z.norm() > 1e-6)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = (pivot / pivot.norm()).conj();
    m.entries()
        .iter()
        .map(|z| {
            let w = z * phase;
            (
                (w.re * KEY_SCALE).round() as i64,
                (w.im * KEY_SCALE).round() as i64,
            )
        })
        .collect()
}

/// Breadth-first closure of `{H_i, S_i, CNOT_ij}` modulo global phase.
pub fn enumerate_clifford(n: usize) -> Result<CliffordTable> {
    if !(1..=2).contains(&n) {
        return Err(Error::Guard(format!(
            "Clifford enumeration supports n in {{1, 2}}, got {n}"
        )));
    }
    let gens: Vec<ComplexMatrix> = clifford_generators(n).into_iter().map(|g| g.1).collect();
    let start = ComplexMatrix::identity(n);
    let mut seen = HashSet::new();
    seen.insert(canonical_key(&start));
    let mut elements = vec![start];
    let mut head = 0;
    while head < elements.len() {
        let g = elements[head].clone();
        head += 1;
        for gen in &gens {
            let h = gen.matmul(&g);
            if seen.insert(canonical_key(&h)) {
                elements.push(h);
            }
        }
    }
    Ok(CliffordTable { n, elements })
}

/// Minimum distance over an explicit list, with the attaining index.
fn nearest_member<'a>(
    u: &ComplexMatrix,
    members: impl Iterator<Item = &'a ComplexMatrix>,
) -> DistanceReport {
    let mut best: Option<(usize, Complex64, &ComplexMatrix)> = None;
    for (i, m) in members.enumerate() {
        let ip = hs_inner_unchecked(m, u);
        if best.is_none_or(|(_, b, _)| ip.norm() > b.norm()) {
            best = Some((i, ip, m));
        }
    }
    let (i, ip, m) = best.expect("non-empty member list");
    DistanceReport {
        value: aligned_residual(u, m, ip.conj()),
        witness_phase: wrap_phase(-ip.arg()),
        witness_index: Some(i),
        witness_label: None,
    }
}

pub fn dist_to_clifford(u: &ComplexMatrix, table: &CliffordTable) -> Result<DistanceReport> {
    if u.n_qubits() != table.n {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: 1 << table.n,
        });
    }
    Ok(nearest_member(u, table.elements.iter()))
}

pub fn dist_to_finite_subset(u: &ComplexMatrix, s: &FiniteSubset) -> Result<DistanceReport> {
    if u.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: s.dim(),
        });
    }
    Ok(nearest_member(u, s.members().iter()))
}

/// Per-string nearest Pauli of the conjugates `u σ_x u†`.
#[derive(Clone, Debug, Serialize)]
pub struct TableauExtract {
    pub n: usize,
    /// `F(x)`, indexed by the lexicographic index of `x`.
    pub f_map: Vec<PauliString>,
    /// `Θ(x)` snapped to `0` or `π`.
    pub theta_map: Vec<f64>,
    /// Phase of the dominant coefficient before snapping.
    pub raw_phases: Vec<f64>,
    /// Whether the raw phase was more than `1e-6` away from `{0, π}`.
    pub snapped: Vec<bool>,
    /// `D(u σ_x u†, P_n)`.
    pub deviations: Vec<f64>,
    /// Whether the dominant coefficient was tied with another string.
    pub ties: Vec<bool>,
}

impl TableauExtract {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().cloned().fold(0.0, f64::max)
    }

    pub fn is_bijection(&self) -> bool {
        let set: HashSet<&PauliString> = self.f_map.iter().collect();
        set.len() == self.f_map.len()
    }

    /// `F(x ⊕ y) = F(x) ⊕ F(y)` for every pair.
    pub fn is_additive(&self) -> bool {
        let len = self.f_map.len();
        (0..len).all(|i| {
            (0..len).all(|j| {
                let x = PauliString::from_index(i, self.n);
                let y = PauliString::from_index(j, self.n);
                let xy = oplus(&x, &y).unwrap();
                oplus(&self.f_map[i], &self.f_map[j]).unwrap() == self.f_map[xy.index()]
            })
        })
    }

    /// `σ_x, σ_y` commute iff `σ_F(x), σ_F(y)` commute, for every pair.
    pub fn preserves_commutation(&self) -> bool {
        let len = self.f_map.len();
        (0..len).all(|i| {
            (0..len).all(|j| {
                let x = PauliString::from_index(i, self.n);
                let y = PauliString::from_index(j, self.n);
                commutes(&x, &y).unwrap()
                    == commutes(&self.f_map[i], &self.f_map[j]).unwrap()
            })
        })
    }

    pub fn thetas_exact(&self) -> bool {
        self.theta_map.iter().all(|&t| t == 0.0 || t == PI) && !self.snapped.iter().any(|&s| s)
    }
}

fn check_tableau_register(u: &ComplexMatrix) -> Result<()> {
    if u.n_qubits() > TABLEAU_MAX_QUBITS || u.n_qubits() == 0 {
        return Err(Error::Guard(format!(
            "tableau diagnostics support 1 <= n <= {TABLEAU_MAX_QUBITS}, got {}",
            u.n_qubits()
        )));
    }
    Ok(())
}

/// `u σ_x u†` for every `x`, in lexicographic order.
pub fn conjugated_paulis(u: &ComplexMatrix) -> Vec<ComplexMatrix> {
    let ud = u.adjoint();
    PauliString::all(u.n_qubits())
        .map(|x| u.matmul(&pauli_matrix(&x)).matmul(&ud))
        .collect()
}

pub fn extract_tableau(u: &ComplexMatrix) -> Result<TableauExtract> {
    check_tableau_register(u)?;
    let n = u.n_qubits();
    let mut out = TableauExtract {
        n,
        f_map: Vec::new(),
        theta_map: Vec::new(),
        raw_phases: Vec::new(),
        snapped: Vec::new(),
        deviations: Vec::new(),
        ties: Vec::new(),
    };
    for conj in conjugated_paulis(u) {
        let spec = pauli_spectrum(&conj);
        let (deviation, best) = pauli_distance_from_spectrum(&spec);
        let mu = spec.coefficients()[best];
        let top = spec.probabilities()[best];
        let tie = spec
            .probabilities()
            .iter()
            .enumerate()
            .any(|(i, &p)| i != best && (p - top).abs() <= 1e-12);
        let raw = mu.arg();
        let near_real = raw.abs() <= SNAP_TOL || (PI - raw.abs()) <= SNAP_TOL;
        out.f_map.push(PauliString::from_index(best, n));
        out.theta_map.push(if mu.re > 0.0 { 0.0 } else { PI });
        out.raw_phases.push(raw);
        out.snapped.push(!near_real);
        out.deviations.push(deviation);
        out.ties.push(tie);
    }
    Ok(out)
}

/// Fraction of `x` whose conjugate `u σ_x u†` is within `delta` of `P_n`.
pub fn good_fraction(u: &ComplexMatrix, delta: f64) -> Result<f64> {
    check_tableau_register(u)?;
    let conj = conjugated_paulis(u);
    let good = conj
        .iter()
        .filter(|c| dist_to_pauli_group(c).value <= delta + GOOD_TOL)
        .count();
    Ok(good as f64 / conj.len() as f64)
}

/// Pairwise phase-class separation of the table: the smallest `D` between
/// two entries, checked over at most `limit` leading elements.
pub fn min_pairwise_distance(table: &CliffordTable, limit: usize) -> f64 {
    let m = table.elements.len().min(limit);
    let mut best = f64::INFINITY;
    for i in 0..m {
        for j in (i + 1)..m {
            let d = crate::linalg::distance_unchecked(&table.elements[i], &table.elements[j]);
            best = best.min(d);
        }
    }
    best
}

/// Singular values of the partial trace onto `t`, exposed for diagnostics.
pub fn junta_singular_values(u: &ComplexMatrix, t: &[usize]) -> Result<Vec<f64>> {
    Ok(svd(&partial_trace(u, t)?).singular_values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{random_clifford, random_junta, random_orthogonal};
    use crate::linalg::{c64, distance_d};
    use crate::rng::RngStream;

    fn had() -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real(1, &[h, h, h, -h]).unwrap()
    }

    fn t_gate() -> ComplexMatrix {
        ComplexMatrix::diagonal(&[c64(1.0, 0.0), Complex64::from_polar(1.0, PI / 4.0)]).unwrap()
    }

    fn cnot() -> ComplexMatrix {
        clifford_generators(2)[4].1.clone()
    }

    #[test]
    fn pauli_oracle_examples() {
        let x = pauli_matrix(&"XY".parse().unwrap());
        let r = dist_to_pauli_group(&x);
        assert_eq!(r.value, 0.0);
        assert_eq!(r.witness_label.as_deref(), Some("XY"));
        let phased = x.scale(Complex64::from_polar(1.0, 2.0));
        let r = dist_to_pauli_group(&phased);
        assert_eq!(r.value, 0.0);
        assert!((r.witness_phase - wrap_phase(-2.0)).abs() < 1e-12);
        let expected = (1.0 - std::f64::consts::FRAC_1_SQRT_2).sqrt();
        let r = dist_to_pauli_group(&had());
        assert!((r.value - expected).abs() < 1e-12);
        // Tie between X and Z resolves to the smaller index.
        assert_eq!(r.witness_label.as_deref(), Some("X"));
    }

    #[test]
    fn orthogonal_oracle_examples() {
        let mut rng = RngStream::new(1, 0);
        let o = random_orthogonal(2, &mut rng).unwrap();
        assert!(dist_to_orthogonal(&o, 256, 60).unwrap().value < 1e-8);
        let phased = o.scale(Complex64::from_polar(1.0, 0.9));
        let r = dist_to_orthogonal(&phased, 256, 60).unwrap();
        assert!(r.value < 1e-8, "{}", r.value);

        let s = ComplexMatrix::diagonal(&[c64(1.0, 0.0), c64(0.0, 1.0)]).unwrap();
        let expected = (1.0 - std::f64::consts::FRAC_1_SQRT_2).sqrt();
        let r = dist_to_orthogonal(&s, 256, 60).unwrap();
        assert!((r.value - expected).abs() < 1e-9);
        // Both θ = ±π/4 (mod π) attain the maximum.
        let th = r.witness_phase.rem_euclid(PI);
        assert!(
            (th - PI / 4.0).abs() < 1e-6 || (th - 3.0 * PI / 4.0).abs() < 1e-6,
            "{th}"
        );
        assert!(dist_to_orthogonal(&s, 10, 60).is_err());
    }

    #[test]
    fn orthogonal_oracle_matches_dense_grid() {
        let mut rng = RngStream::new(2, 0);
        for i in 0..50 {
            let u = crate::generators::haar_unitary(i % 3 + 1, &mut rng).unwrap();
            let fine = (0..4096)
                .map(|i| orthogonal_objective(&u, i as f64 * PI / 4096.0))
                .fold(f64::NEG_INFINITY, f64::max);
            let dense = (1.0 - fine / u.dim() as f64).max(0.0).sqrt();
            let r = dist_to_orthogonal(&u, 256, 60).unwrap();
            assert!(r.value <= dense + 1e-6);
            assert!((r.value - dense).abs() < 1e-6);
        }
    }

    #[test]
    fn oracles_vanish_on_members_and_respect_triangle() {
        let tables = [enumerate_clifford(1).unwrap(), enumerate_clifford(2).unwrap()];
        let mut rng = RngStream::new(8, 0);
        let phase = |rng: &mut RngStream| Complex64::from_polar(1.0, 6.0 * rng.uniform());
        for i in 0..50 {
            let n = i % 2 + 1;
            let v = crate::generators::haar_unitary(n, &mut rng).unwrap();
            let x = PauliString::from_index(rng.below(1 << (2 * n)), n);
            let members = [
                (ClassOracle::Pauli, pauli_matrix(&x).scale(phase(&mut rng))),
                (
                    ClassOracle::Orthogonal,
                    random_orthogonal(n, &mut rng).unwrap().scale(phase(&mut rng)),
                ),
                (ClassOracle::Junta { k: 1 }, random_junta(n, 1, &mut rng).unwrap()),
                (
                    ClassOracle::Clifford(&tables[n - 1]),
                    random_clifford(n, 40, &mut rng).unwrap().scale(phase(&mut rng)),
                ),
            ];
            for (oracle, m) in &members {
                assert!(oracle.distance(m).unwrap() < 1e-8, "{oracle:?}");
                // D(v, class) ≤ D(v, m) + D(m, class) = D(v, m).
                let dv = oracle.distance(&v).unwrap();
                assert!(dv <= distance_d(&v, m).unwrap() + 1e-8, "{oracle:?}");
            }
        }
    }

    #[test]
    fn junta_oracle_examples() {
        let mut rng = RngStream::new(3, 0);
        let u = random_junta(3, 2, &mut rng).unwrap();
        assert!(dist_to_juntas(&u, 2).unwrap().value < 1e-8);
        let r = dist_to_juntas(&cnot(), 1).unwrap();
        assert!((r.value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(dist_to_juntas(&ComplexMatrix::identity(2), 0).unwrap().value, 0.0);
        assert!(matches!(dist_to_juntas(&cnot(), 3), Err(Error::Guard(_))));
        assert!(matches!(
            dist_to_juntas(&ComplexMatrix::identity(5), 1),
            Err(Error::Guard(_))
        ));
    }

    #[test]
    fn combinations_enumerate_subsets() {
        assert_eq!(combinations(3, 2), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(2, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(4, 4).len(), 1);
    }

    #[test]
    fn clifford_enumeration_sizes() {
        let t1 = enumerate_clifford(1).unwrap();
        assert_eq!(t1.len(), 24);
        assert!(min_pairwise_distance(&t1, usize::MAX) > 1e-6);
        let t2 = enumerate_clifford(2).unwrap();
        assert_eq!(t2.len(), 11520);
        assert!(min_pairwise_distance(&t2, 400) > 1e-6);
        assert!(enumerate_clifford(3).is_err());
        assert!(enumerate_clifford(0).is_err());
    }

    #[test]
    fn clifford_table_elements_normalize_paulis() {
        let t1 = enumerate_clifford(1).unwrap();
        for e in &t1.elements {
            for c in conjugated_paulis(e) {
                assert!(dist_to_pauli_group(&c).value < 1e-9);
            }
        }
    }

    #[test]
    fn clifford_oracle_examples() {
        let t1 = enumerate_clifford(1).unwrap();
        let s = ComplexMatrix::diagonal(&[c64(1.0, 0.0), c64(0.0, 1.0)]).unwrap();
        let hs = had().matmul(&s);
        assert!(dist_to_clifford(&hs, &t1).unwrap().value < 1e-12);
        let phased = hs.scale(Complex64::from_polar(1.0, 4.0));
        assert!(dist_to_clifford(&phased, &t1).unwrap().value < 1e-12);
        let expected = (1.0 - (PI / 8.0).cos()).sqrt();
        let r = dist_to_clifford(&t_gate(), &t1).unwrap();
        assert!((r.value - expected).abs() < 1e-12);
        assert!(dist_to_clifford(&cnot(), &t1).is_err());
    }

    #[test]
    fn clifford_cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c1.json");
        let built = CliffordTable::load_or_build(&path, 1).unwrap();
        let loaded = CliffordTable::load(&path, 1).unwrap();
        assert_eq!(built.elements, loaded.elements);
        assert!(CliffordTable::load(&path, 2).is_err());
    }

    #[test]
    fn tableau_of_clifford_is_symplectic() {
        let mut rng = RngStream::new(4, 0);
        for n in 1..=2 {
            let u = random_clifford(n, 40 * n, &mut rng).unwrap();
            let t = extract_tableau(&u).unwrap();
            assert!(t.max_deviation() < 1e-8);
            assert!(t.is_bijection());
            assert!(t.is_additive());
            assert!(t.preserves_commutation());
            assert!(t.thetas_exact());
            assert!(t.f_map[0].is_identity());
            assert_eq!(t.theta_map[0], 0.0);
        }
        assert!(extract_tableau(&ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn good_fraction_examples() {
        let mut rng = RngStream::new(5, 0);
        let u = random_clifford(2, 60, &mut rng).unwrap();
        assert_eq!(good_fraction(&u, 0.0).unwrap(), 1.0);
        assert_eq!(good_fraction(&t_gate(), 0.1).unwrap(), 0.5);
    }

    #[test]
    fn finite_subset_oracle_examples() {
        let s = FiniteSubset::new(vec![ComplexMatrix::identity(1)]).unwrap();
        let x = pauli_matrix(&"X".parse().unwrap());
        assert!((dist_to_finite_subset(&x, &s).unwrap().value - 1.0).abs() < 1e-15);
        assert_eq!(
            dist_to_finite_subset(&ComplexMatrix::identity(1), &s).unwrap().value,
            0.0
        );
        assert!(dist_to_finite_subset(&ComplexMatrix::identity(2), &s).is_err());
    }

    #[test]
    fn oracles_agree_with_distance_to_witness() {
        let t1 = enumerate_clifford(1).unwrap();
        let mut rng = RngStream::new(6, 0);
        for _ in 0..10 {
            let u = crate::generators::haar_unitary(1, &mut rng).unwrap();
            let r = dist_to_clifford(&u, &t1).unwrap();
            let w = &t1.elements[r.witness_index.unwrap()];
            assert!((distance_d(&u, w).unwrap() - r.value).abs() < 1e-12);
        }
    }
}
