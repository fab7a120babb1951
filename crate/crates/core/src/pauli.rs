//! Pauli strings over `Z₄ⁿ`, their product algebra, and the Pauli
//! decomposition of dense operators.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix};

/// `σ_a σ_b = i^{PHASE[a][b]} σ_{a xor b}` for single-qubit symbols
/// `0 = I, 1 = X, 2 = Y, 3 = Z`.
const PHASE: [[u8; 4]; 4] = [
    [0, 0, 0, 0],
    [0, 0, 1, 3], // XY = iZ, XZ = -iY
    [0, 3, 0, 1], // YX = -iZ, YZ = iX
    [0, 1, 3, 0], // ZX = iY, ZY = -iX
];

/// Tensor product of single-qubit Paulis, qubit 1 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    symbols: Vec<u8>,
}

impl PauliString {
    pub fn new(symbols: Vec<u8>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidParameter("empty Pauli string".into()));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s > 3) {
            return Err(Error::InvalidParameter(format!(
                "Pauli symbol {s} is not in {{0,1,2,3}}"
            )));
        }
        Ok(Self { symbols })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            symbols: vec![0; n],
        }
    }

    /// Decodes a lexicographic index (base 4, qubit 1 most significant).
    pub fn from_index(index: usize, n: usize) -> Self {
        let symbols = (0..n)
            .map(|i| ((index >> (2 * (n - 1 - i))) & 3) as u8)
            .collect();
        Self { symbols }
    }

    pub fn index(&self) -> usize {
        self.symbols
            .iter()
            .fold(0, |acc, &s| (acc << 2) | s as usize)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn is_identity(&self) -> bool {
        self.symbols.iter().all(|&s| s == 0)
    }

    /// All `4ⁿ` strings in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        (0..1usize << (2 * n)).map(move |i| PauliString::from_index(i, n))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.symbols {
            f.write_str(["I", "X", "Y", "Z"][s as usize])?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|ch| match ch {
                'I' => Ok(0),
                'X' => Ok(1),
                'Y' => Ok(2),
                'Z' => Ok(3),
                other => Err(Error::InvalidParameter(format!(
                    "invalid Pauli character {other:?}"
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        PauliString::new(symbols)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn single_qubit(symbol: u8) -> [Complex64; 4] {
    let o = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    match symbol {
        0 => [one, o, o, one],
        1 => [o, one, one, o],
        2 => [o, c64(0.0, -1.0), c64(0.0, 1.0), o],
        _ => [one, o, o, -one],
    }
}

/// Dense matrix of `σ_x`.
pub fn pauli_matrix(s: &PauliString) -> ComplexMatrix {
    let n = s.len();
    // Every row of a Pauli string has exactly one nonzero entry.
    let mut m = ComplexMatrix::zeros(n);
    let dim = 1usize << n;
    for r in 0..dim {
        let mut c = 0usize;
        let mut value = c64(1.0, 0.0);
        for (i, &sym) in s.symbols.iter().enumerate() {
            let shift = n - 1 - i;
            let rb = (r >> shift) & 1;
            let table = single_qubit(sym);
            let cb = if sym == 1 || sym == 2 { rb ^ 1 } else { rb };
            value *= table[2 * rb + cb];
            c |= cb << shift;
        }
        m[(r, c)] = value;
    }
    m
}

fn check_lengths(x: &PauliString, y: &PauliString) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

/// The string `z` with `σ_x σ_y ∝ σ_z`.
pub fn oplus(x: &PauliString, y: &PauliString) -> Result<PauliString> {
    check_lengths(x, y)?;
    Ok(PauliString {
        symbols: x.symbols.iter().zip(&y.symbols).map(|(a, b)| a ^ b).collect(),
    })
}

/// Exponent `k ∈ Z₄` with `σ_x σ_y = i^k σ_{x⊕y}`.
pub fn odot(x: &PauliString, y: &PauliString) -> Result<u8> {
    check_lengths(x, y)?;
    Ok(x
        .symbols
        .iter()
        .zip(&y.symbols)
        .fold(0u8, |acc, (&a, &b)| (acc + PHASE[a as usize][b as usize]) % 4))
}

pub fn commutes(x: &PauliString, y: &PauliString) -> Result<bool> {
    check_lengths(x, y)?;
    let clashes = x
        .symbols
        .iter()
        .zip(&y.symbols)
        .filter(|(&a, &b)| a != 0 && b != 0 && a != b)
        .count();
    Ok(clashes % 2 == 0)
}

/// 1-based positions of the non-identity symbols.
pub fn support(x: &PauliString) -> BTreeSet<usize> {
    x.symbols
        .iter()
        .enumerate()
        .filter(|(_, &s)| s != 0)
        .map(|(i, _)| i + 1)
        .collect()
}

/// Pauli coefficients `μ_x = ⟨σ_x, A⟩/N` of an operator and their squared moduli.
#[derive(Clone, Debug)]
pub struct PauliSpectrum {
    n: usize,
    coefficients: Vec<Complex64>,
    probabilities: Vec<f64>,
}

impl PauliSpectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Indexed by [`PauliString::index`].
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn coefficient(&self, x: &PauliString) -> Complex64 {
        self.coefficients[x.index()]
    }

    pub fn total_probability(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Index of the largest `|μ_x|`, smallest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probabilities.iter().enumerate() {
            if p > self.probabilities[best] {
                best = i;
            }
        }
        best
    }

    /// `Σ_x μ_x σ_x`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.n);
        for (i, &mu) in self.coefficients.iter().enumerate() {
            if mu.norm_sqr() == 0.0 {
                continue;
            }
            let p = pauli_matrix(&PauliString::from_index(i, self.n));
            acc = &acc + &p.scale(mu);
        }
        acc
    }
}

/// Per-qubit change of basis: row `x`, column `2r + c` holds `(σ_x)_{c r}`.
fn transform_rows() -> [[Complex64; 4]; 4] {
    let mut t = [[c64(0.0, 0.0); 4]; 4];
    for (x, row) in t.iter_mut().enumerate() {
        let s = single_qubit(x as u8);
        for r in 0..2 {
            for c in 0..2 {
                row[2 * r + c] = s[2 * c + r];
            }
        }
    }
    t
}

/// Pauli decomposition of `u` by a tensor-structured transform.
///
/// The entries are regrouped so that each qubit contributes one base-4 digit
/// `2r + c`, after which a 4×4 map is applied along every digit axis. Cost is
/// `O(n·4ⁿ)`.
pub fn pauli_spectrum(u: &ComplexMatrix) -> PauliSpectrum {
    let n = u.n_qubits();
    let dim = u.dim();
    let len = dim * dim;
    let mut v = vec![c64(0.0, 0.0); len];
    for r in 0..dim {
        for c in 0..dim {
            let mut idx = 0usize;
            for i in 0..n {
                let shift = n - 1 - i;
                let digit = 2 * ((r >> shift) & 1) + ((c >> shift) & 1);
                idx = (idx << 2) | digit;
            }
            v[idx] = u[(r, c)];
        }
    }
    let t = transform_rows();
    for axis in 0..n {
        let stride = 1usize << (2 * (n - 1 - axis));
        let block = stride * 4;
        for base in (0..len).step_by(block) {
            for off in 0..stride {
                let i0 = base + off;
                let inp = [
                    v[i0],
                    v[i0 + stride],
                    v[i0 + 2 * stride],
                    v[i0 + 3 * stride],
                ];
                for (x, row) in t.iter().enumerate() {
                    let mut acc = c64(0.0, 0.0);
                    for (k, &w) in row.iter().enumerate() {
                        if w.re != 0.0 || w.im != 0.0 {
                            acc += w * inp[k];
                        }
                    }
                    v[i0 + x * stride] = acc;
                }
            }
        }
    }
    let inv = 1.0 / dim as f64;
    let coefficients: Vec<Complex64> = v.into_iter().map(|z| z * inv).collect();
    let probabilities = coefficients.iter().map(|z| z.norm_sqr()).collect();
    PauliSpectrum {
        n,
        coefficients,
        probabilities,
    }
}
