//! Dense complex matrices on `n` qubits and the Hilbert–Schmidt geometry.
//!
//! Qubits are numbered from 1. Qubit 1 is the most significant bit of a
//! basis index, so `a ⊗ b` places `a` on qubit 1.

use std::f64::consts::PI;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for [`is_unitary`] checks.
pub const UNITARY_TOL: f64 = 1e-9;

/// Largest supported register.
pub const MAX_QUBITS: usize = 8;

const JACOBI_MAX_SWEEPS: usize = 80;
const JACOBI_OFF_TOL: f64 = 1e-12;

#[inline]
pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense `2^n × 2^n` complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    n_qubits: usize,
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Wraps row-major `entries`; the length must be `4^n_qubits`.
    pub fn new(n_qubits: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::Guard(format!(
                "n_qubits = {n_qubits} exceeds the supported maximum {MAX_QUBITS}"
            )));
        }
        let dim = 1usize << n_qubits;
        if entries.len() != dim * dim {
            return Err(Error::Format(format!(
                "expected {} entries for {} qubits, found {}",
                dim * dim,
                n_qubits,
                entries.len()
            )));
        }
        Ok(Self {
            n_qubits,
            dim,
            entries,
        })
    }

    /// Infers the qubit count from a square row-major array.
    pub fn from_entries(entries: Vec<Complex64>) -> Result<Self> {
        let len = entries.len();
        let n_qubits = (0..=MAX_QUBITS)
            .find(|&n| 1usize << (2 * n) == len)
            .ok_or_else(|| {
                Error::Format(format!("{len} entries is not 4^n for any n <= {MAX_QUBITS}"))
            })?;
        Self::new(n_qubits, entries)
    }

    pub fn from_fn(n_qubits: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let dim = 1usize << n_qubits;
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        Self {
            n_qubits,
            dim,
            entries,
        }
    }

    pub fn zeros(n_qubits: usize) -> Self {
        Self::from_fn(n_qubits, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::from_fn(n_qubits, |r, c| {
            if r == c {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        })
    }

    /// Diagonal matrix; `diag.len()` must be a power of two.
    pub fn diagonal(diag: &[Complex64]) -> Result<Self> {
        let n_qubits = (0..=MAX_QUBITS)
            .find(|&n| 1usize << n == diag.len())
            .ok_or_else(|| Error::Format(format!("diagonal length {} is not 2^n", diag.len())))?;
        Ok(Self::from_fn(n_qubits, |r, c| {
            if r == c {
                diag[r]
            } else {
                c64(0.0, 0.0)
            }
        }))
    }

    /// Builds a matrix from real row-major data.
    pub fn from_real(n_qubits: usize, data: &[f64]) -> Result<Self> {
        Self::new(n_qubits, data.iter().map(|&x| c64(x, 0.0)).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n_qubits, |r, c| self[(c, r)].conj())
    }

    /// Plain transpose, no conjugation.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n_qubits, |r, c| self[(c, r)])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            dim: self.dim,
            entries: self.entries.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map(|z| z * factor)
    }

    /// Entrywise real part, returned as a complex matrix with zero imaginary part.
    pub fn real_part(&self) -> Self {
        self.map(|z| c64(z.re, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }

    /// Matrix product; panics on dimension mismatch (use [`ComplexMatrix::try_matmul`]).
    pub fn matmul(&self, rhs: &Self) -> Self {
        self.try_matmul(rhs).expect("matmul dimension mismatch")
    }

    pub fn try_matmul(&self, rhs: &Self) -> Result<Self> {
        check_dims(self, rhs)?;
        let d = self.dim;
        let mut out = vec![c64(0.0, 0.0); d * d];
        for r in 0..d {
            let row = &self.entries[r * d..(r + 1) * d];
            let out_row = &mut out[r * d..(r + 1) * d];
            for (k, &a) in row.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.entries[k * d..(k + 1) * d];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            dim: d,
            entries: out,
        })
    }

    /// Kronecker product `self ⊗ rhs`; `self` occupies the leading qubits.
    pub fn kron(&self, rhs: &Self) -> Self {
        let n = self.n_qubits + rhs.n_qubits;
        let db = rhs.dim;
        Self::from_fn(n, |r, c| {
            self[(r / db, c / db)] * rhs[(r % db, c % db)]
        })
    }

    /// `‖self − rhs‖_F`.
    pub fn frobenius_distance(&self, rhs: &Self) -> Result<f64> {
        check_dims(self, rhs)?;
        Ok(self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.entries[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[r * self.dim + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        ComplexMatrix {
            n_qubits: self.n_qubits,
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        ComplexMatrix {
            n_qubits: self.n_qubits,
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

fn check_dims(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(())
}

/// Left factor, singular values (descending) and right factor with
/// `a = left · diag(singular_values) · right`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub left: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub right: ComplexMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let scaled = ComplexMatrix::from_fn(self.left.n_qubits, |r, c| {
            self.left[(r, c)] * self.singular_values[c]
        });
        scaled.matmul(&self.right)
    }
}

/// Distance of an operator to a set, with the element that attains it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub value: f64,
    /// Phase `θ` in `[0, 2π)` such that `e^{iθ}·u` is aligned with the witness.
    pub witness_phase: f64,
    pub witness_index: Option<usize>,
    /// Human-readable witness, e.g. a Pauli string or a qubit subset.
    pub witness_label: Option<String>,
}

impl DistanceReport {
    pub fn new(value: f64) -> Self {
        Self {
            value,
            witness_phase: 0.0,
            witness_index: None,
            witness_label: None,
        }
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_phase(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t >= 2.0 * PI {
        0.0
    } else {
        t
    }
}

/// Hilbert–Schmidt inner product `tr(a† b)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    check_dims(a, b)?;
    Ok(hs_inner_unchecked(a, b))
}

pub(crate) fn hs_inner_unchecked(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| x.conj() * y)
        .sum()
}

pub fn frobenius_norm(a: &ComplexMatrix) -> f64 {
    a.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖a†a − I‖_F`.
pub fn unitarity_residual(a: &ComplexMatrix) -> f64 {
    let g = a.adjoint().matmul(a);
    let d = a.dim;
    let mut acc = 0.0;
    for r in 0..d {
        for c in 0..d {
            let target = if r == c { 1.0 } else { 0.0 };
            acc += (g[(r, c)] - c64(target, 0.0)).norm_sqr();
        }
    }
    acc.sqrt()
}

pub fn is_unitary(a: &ComplexMatrix, tol: f64) -> bool {
    unitarity_residual(a) <= tol
}

pub(crate) fn require_unitary(a: &ComplexMatrix, which: &'static str) -> Result<()> {
    let residual = unitarity_residual(a);
    if residual.is_nan() || residual > UNITARY_TOL {
        return Err(Error::NotUnitary {
            which,
            residual,
            tol: UNITARY_TOL,
        });
    }
    Ok(())
}

/// Phase-minimized normalized distance `D(u, v)` between unitaries.
///
/// Equal to `sqrt(1 − |⟨u,v⟩|/N)`. It is evaluated as the residual
/// `‖e^{iφ/2}u − e^{−iφ/2}v‖/√(2N)` with `φ = arg⟨u,v⟩`, which avoids the
/// cancellation in `1 − |⟨u,v⟩|/N` near zero and is exactly symmetric.
pub fn distance_d(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    check_dims(u, v)?;
    require_unitary(u, "first argument")?;
    require_unitary(v, "second argument")?;
    Ok(distance_unchecked(u, v))
}

pub(crate) fn distance_unchecked(u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    let ip = hs_inner_unchecked(u, v);
    aligned_residual(u, v, ip)
}

/// Residual distance given a precomputed `⟨u, v⟩`.
pub(crate) fn aligned_residual(u: &ComplexMatrix, v: &ComplexMatrix, ip: Complex64) -> f64 {
    let half = if ip.norm() > 0.0 { ip.arg() / 2.0 } else { 0.0 };
    let a = Complex64::from_polar(1.0, half);
    let b = Complex64::from_polar(1.0, -half);
    let sum: f64 = u
        .entries
        .iter()
        .zip(&v.entries)
        .map(|(x, y)| (a * x - b * y).norm_sqr())
        .sum();
    (sum / (2.0 * u.dim as f64)).sqrt()
}

/// Normalized distance `‖u − a‖/√(2N)` without phase minimization.
///
/// Used where `a` is not unitary.
pub fn unphased_distance(u: &ComplexMatrix, a: &ComplexMatrix) -> Result<f64> {
    Ok(u.frobenius_distance(a)? / (2.0 * u.dim as f64).sqrt())
}

/// Singular value decomposition by one-sided Jacobi rotations.
pub fn svd(a: &ComplexMatrix) -> SvdResult {
    let raw = jacobi_svd(a.dim, &a.entries);
    SvdResult {
        left: ComplexMatrix {
            n_qubits: a.n_qubits,
            dim: a.dim,
            entries: raw.left,
        },
        singular_values: raw.singular_values,
        right: ComplexMatrix {
            n_qubits: a.n_qubits,
            dim: a.dim,
            entries: raw.right,
        },
    }
}

/// Unitary polar factor `left · right` of `a`.
pub fn nearest_unitary(a: &ComplexMatrix) -> ComplexMatrix {
    let s = svd(a);
    s.left.matmul(&s.right)
}

pub fn nuclear_norm(a: &ComplexMatrix) -> f64 {
    svd(a).singular_values.iter().sum()
}

fn check_qubit_set(n_qubits: usize, qubits: &[usize]) -> Result<Vec<usize>> {
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != qubits.len() {
        return Err(Error::InvalidParameter(format!(
            "qubit list {qubits:?} contains duplicates"
        )));
    }
    if let Some(&bad) = sorted.iter().find(|&&q| q == 0 || q > n_qubits) {
        return Err(Error::InvalidQubit {
            index: bad,
            n_qubits,
        });
    }
    Ok(sorted)
}

/// Bit position (from the least significant end) of 1-based qubit `q`.
#[inline]
fn shift_of(n_qubits: usize, q: usize) -> usize {
    n_qubits - q
}

/// Scatters the bits of `value` (most significant first) onto `qubits`.
fn scatter(n_qubits: usize, qubits: &[usize], value: usize) -> usize {
    let k = qubits.len();
    qubits.iter().enumerate().fold(0, |acc, (i, &q)| {
        let bit = (value >> (k - 1 - i)) & 1;
        acc | (bit << shift_of(n_qubits, q))
    })
}

/// Traces out every qubit not in `keep`; kept qubits retain their relative order.
pub fn partial_trace(a: &ComplexMatrix, keep: &[usize]) -> Result<ComplexMatrix> {
    let n = a.n_qubits;
    let keep = check_qubit_set(n, keep)?;
    let traced: Vec<usize> = (1..=n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let dk = 1usize << k;
    let dt = 1usize << traced.len();
    let keep_offsets: Vec<usize> = (0..dk).map(|v| scatter(n, &keep, v)).collect();
    let traced_offsets: Vec<usize> = (0..dt).map(|v| scatter(n, &traced, v)).collect();
    let mut out = vec![c64(0.0, 0.0); dk * dk];
    for (r, &ro) in keep_offsets.iter().enumerate() {
        for (c, &co) in keep_offsets.iter().enumerate() {
            out[r * dk + c] = traced_offsets
                .iter()
                .map(|&t| a[(ro | t, co | t)])
                .sum();
        }
    }
    ComplexMatrix::new(k, out)
}

/// Embeds `v` on `targets` of an `n_qubits` register, identity elsewhere.
///
/// Qubit `i` of `v` lands on the `i`-th smallest target.
pub fn embed(v: &ComplexMatrix, targets: &[usize], n_qubits: usize) -> Result<ComplexMatrix> {
    let targets = check_qubit_set(n_qubits, targets)?;
    if targets.len() != v.n_qubits {
        return Err(Error::InvalidParameter(format!(
            "operator on {} qubits cannot be embedded on {} targets",
            v.n_qubits,
            targets.len()
        )));
    }
    let target_mask = targets
        .iter()
        .fold(0usize, |m, &q| m | (1 << shift_of(n_qubits, q)));
    let gather = |full: usize| -> usize {
        targets
            .iter()
            .fold(0, |acc, &q| (acc << 1) | ((full >> shift_of(n_qubits, q)) & 1))
    };
    Ok(ComplexMatrix::from_fn(n_qubits, |r, c| {
        if (r & !target_mask) != (c & !target_mask) {
            c64(0.0, 0.0)
        } else {
            v[(gather(r), gather(c))]
        }
    }))
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues and the unitary
/// whose columns are the matching eigenvectors.
pub fn hermitian_eigen(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let (values, vectors) = hermitian_eigen_raw(h.dim, &h.entries);
    (
        values,
        ComplexMatrix {
            n_qubits: h.n_qubits,
            dim: h.dim,
            entries: vectors,
        },
    )
}

/// `exp(i·t·h)` for Hermitian `h`, via its eigen-decomposition.
pub fn expm_hermitian(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let (values, vectors) = hermitian_eigen(h);
    expm_from_eigen(&values, &vectors, t)
}

pub(crate) fn expm_from_eigen(values: &[f64], vectors: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let scaled = ComplexMatrix::from_fn(vectors.n_qubits, |r, c| {
        vectors[(r, c)] * Complex64::from_polar(1.0, t * values[c])
    });
    scaled.matmul(&vectors.adjoint())
}

pub(crate) struct RawSvd {
    /// Row-major `d × d`.
    pub left: Vec<Complex64>,
    pub singular_values: Vec<f64>,
    /// Row-major `d × d`.
    pub right: Vec<Complex64>,
}

fn col_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn col_norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// One-sided Jacobi SVD of a square row-major matrix of any size.
///
/// Columns of `a·V` are rotated pairwise until mutually orthogonal; the
/// rotation for a pair first absorbs the phase of their inner product so the
/// 2×2 problem is real symmetric.
pub(crate) fn jacobi_svd(d: usize, a: &[Complex64]) -> RawSvd {
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|j| (0..d).map(|i| a[i * d + j]).collect())
        .collect();
    let mut v: Vec<Vec<Complex64>> = (0..d)
        .map(|j| {
            (0..d)
                .map(|i| if i == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) })
                .collect()
        })
        .collect();
    let frob_sqr: f64 = a.iter().map(|z| z.norm_sqr()).sum();

    if frob_sqr > 0.0 {
        for _sweep in 0..JACOBI_MAX_SWEEPS {
            let mut off_sqr = 0.0;
            let mut rotated = false;
            for p in 0..d {
                for q in (p + 1)..d {
                    let alpha = col_norm_sqr(&cols[p]);
                    let beta = col_norm_sqr(&cols[q]);
                    let gamma = col_dot(&cols[p], &cols[q]);
                    let g = gamma.norm();
                    off_sqr += 2.0 * g * g;
                    if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let phase = (gamma / g).conj();
                    let zeta = (beta - alpha) / (2.0 * g);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let cs = 1.0 / (1.0 + t * t).sqrt();
                    let sn = cs * t;
                    rotate_pair(&mut cols, p, q, phase, cs, sn);
                    rotate_pair(&mut v, p, q, phase, cs, sn);
                }
            }
            if !rotated || off_sqr.sqrt() < JACOBI_OFF_TOL * frob_sqr {
                break;
            }
        }
    }

    let norms: Vec<f64> = cols.iter().map(|c| col_norm_sqr(c).sqrt()).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));
    let smax = norms.iter().cloned().fold(0.0, f64::max);
    let cutoff = smax * (d as f64) * f64::EPSILON;

    let mut left_cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    let mut missing = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        if norms[j] > cutoff && norms[j] > 0.0 {
            let inv = 1.0 / norms[j];
            left_cols.push(cols[j].iter().map(|z| z * inv).collect());
        } else {
            left_cols.push(Vec::new());
            missing.push(slot);
        }
    }
    complete_basis(d, &mut left_cols, &missing);

    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut left = vec![c64(0.0, 0.0); d * d];
    let mut right = vec![c64(0.0, 0.0); d * d];
    for (slot, &j) in order.iter().enumerate() {
        for i in 0..d {
            left[i * d + slot] = left_cols[slot][i];
            // right = V†: row `slot` is the conjugated column j of V.
            right[slot * d + i] = v[j][i].conj();
        }
    }
    RawSvd {
        left,
        singular_values,
        right,
    }
}

fn rotate_pair(
    cols: &mut [Vec<Complex64>],
    p: usize,
    q: usize,
    phase: Complex64,
    cs: f64,
    sn: f64,
) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let xw = *y * phase;
        *x = xp * cs - xw * sn;
        *y = xp * sn + xw * cs;
    }
}

/// Fills the `missing` columns with unit vectors orthogonal to all others.
fn complete_basis(d: usize, cols: &mut [Vec<Complex64>], missing: &[usize]) {
    for &slot in missing {
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for k in 0..d {
            let mut e: Vec<Complex64> = (0..d)
                .map(|i| if i == k { c64(1.0, 0.0) } else { c64(0.0, 0.0) })
                .collect();
            for _ in 0..2 {
                for other in cols.iter().filter(|c| !c.is_empty()) {
                    let proj = col_dot(other, &e);
                    for (x, o) in e.iter_mut().zip(other) {
                        *x -= proj * o;
                    }
                }
            }
            let n = col_norm_sqr(&e).sqrt();
            if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
                best = Some((n, e));
            }
        }
        let (n, e) = best.expect("d > 0");
        cols[slot] = e.into_iter().map(|z| z / n).collect();
    }
}

/// Eigenpairs of a Hermitian row-major matrix.
///
/// The matrix is shifted by its Frobenius norm so it becomes positive
/// semidefinite; for such a matrix the right singular vectors are
/// eigenvectors and the singular values are the shifted eigenvalues.
pub(crate) fn hermitian_eigen_raw(d: usize, h: &[Complex64]) -> (Vec<f64>, Vec<Complex64>) {
    let shift: f64 = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() + 1.0;
    let mut shifted = h.to_vec();
    for i in 0..d {
        shifted[i * d + i] += shift;
    }
    let raw = jacobi_svd(d, &shifted);
    let values: Vec<f64> = raw.singular_values.iter().map(|s| s - shift).collect();
    // Columns of V = rows of V† conjugated.
    let mut vectors = vec![c64(0.0, 0.0); d * d];
    for slot in 0..d {
        for i in 0..d {
            vectors[i * d + slot] = raw.right[slot * d + i].conj();
        }
    }
    (values, vectors)
}
