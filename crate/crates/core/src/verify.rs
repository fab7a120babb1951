//! Batch property suites: distance-measure laws, approximation lemmas and
//! conjugation-tableau statements, each checked on seeded random instances.
//!
//! Every check draws from its own stream, runs single-threaded and reports
//! its worst margin, so a report is a pure function of `(suite, seed,
//! instances)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::{
    haar_unitary, random_clifford, random_hermitian_direction, random_junta_with_support,
    random_orthogonal,
};
use crate::linalg::{
    distance_d, expm_hermitian, hs_inner, nearest_unitary, svd, unphased_distance, ComplexMatrix,
};
use crate::oracles::{
    dist_to_clifford, dist_to_juntas, dist_to_orthogonal, enumerate_clifford, extract_tableau,
    good_fraction, CliffordTable, ORTHOGONAL_GRID, ORTHOGONAL_REFINEMENTS,
};
use crate::pauli::{pauli_spectrum, support, PauliString};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lemmas,
    Metrics,
    Appendix,
}

impl Suite {
    pub fn default_instances(self) -> usize {
        match self {
            Suite::Lemmas => 200,
            Suite::Metrics => 500,
            Suite::Appendix => 50,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Lemmas => "lemmas",
            Suite::Metrics => "metrics",
            Suite::Appendix => "appendix",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemmas" => Ok(Suite::Lemmas),
            "metrics" => Ok(Suite::Metrics),
            "appendix" => Ok(Suite::Appendix),
            other => Err(Error::InvalidParameter(format!("unknown suite {other:?}"))),
        }
    }
}

/// Outcome of one named property over all its instances.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub instances: usize,
    pub violations: usize,
    /// Smallest `bound − observed` seen; negative means a violation.
    pub worst_margin: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub instances: usize,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

struct Check {
    name: &'static str,
    instances: usize,
    violations: usize,
    worst: f64,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            instances: 0,
            violations: 0,
            worst: f64::INFINITY,
        }
    }

    /// Records `observed ≤ bound`.
    fn le(&mut self, observed: f64, bound: f64) {
        self.margin(bound - observed);
    }

    /// Records `|a − b| ≤ tol`.
    fn close(&mut self, a: f64, b: f64, tol: f64) {
        self.margin(tol - (a - b).abs());
    }

    fn holds(&mut self, ok: bool) {
        self.margin(if ok { 0.0 } else { -1.0 });
    }

    fn margin(&mut self, m: f64) {
        self.instances += 1;
        // NaN counts as a violation.
        if m.is_nan() || m < 0.0 {
            self.violations += 1;
        }
        self.worst = if m.is_nan() { f64::NEG_INFINITY } else { self.worst.min(m) };
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            instances: self.instances,
            violations: self.violations,
            worst_margin: self.worst,
            passed: self.violations == 0 && self.instances > 0,
        }
    }
}

/// Runs `suite` with `instances` random cases per check (suite default when `None`).
pub fn run_suite(suite: Suite, seed: u64, instances: Option<usize>) -> Result<VerifyReport> {
    let count = instances.unwrap_or_else(|| suite.default_instances());
    if count == 0 {
        return Err(Error::InvalidParameter("instances must be positive".into()));
    }
    let checks = match suite {
        Suite::Lemmas => lemma_suite(seed, count)?,
        Suite::Metrics => metric_suite(seed, count)?,
        Suite::Appendix => appendix_suite(seed, count)?,
    };
    let checks: Vec<CheckResult> = checks.into_iter().map(Check::finish).collect();
    Ok(VerifyReport {
        schema: 1,
        suite: suite.to_string(),
        seed,
        instances: count,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn perturbed(base: &ComplexMatrix, t: f64, rng: &mut RngStream) -> ComplexMatrix {
    let h = random_hermitian_direction(base.n_qubits(), rng);
    base.matmul(&expm_hermitian(&h, t))
}

/// Qubit count cycling through `1..=max`.
fn cycle_n(i: usize, max: usize) -> usize {
    i % max + 1
}

fn metric_suite(seed: u64, count: usize) -> Result<Vec<Check>> {
    let mut rng = RngStream::new(seed, 0x4d45);
    let mut nonneg = Check::new("non-negativity, zero exactly on phase-equivalent pairs");
    let mut symmetry = Check::new("symmetry");
    let mut triangle = Check::new("triangle inequality");
    let mut closed = Check::new("closed form D^2 = 1 - |<U,V>|/N against phase grid");
    let mut bounded = Check::new("D(U,V) <= 1");
    let mut left = Check::new("left invariance D(UV1,UV2) = D(V1,V2)");
    let mut tensor = Check::new("tensor invariance D(U x V1, U x V2) = D(V1,V2)");
    let mut prod_sub = Check::new("product subadditivity");
    let mut tens_sub = Check::new("tensor subadditivity");

    for i in 0..count {
        let n = cycle_n(i, 3);
        let u = haar_unitary(n, &mut rng)?;
        let v = haar_unitary(n, &mut rng)?;
        let w = haar_unitary(n, &mut rng)?;
        let duv = distance_d(&u, &v)?;
        let dvu = distance_d(&v, &u)?;
        let phase = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * rng.uniform());
        let same = distance_d(&u, &u.scale(phase))?;
        nonneg.holds(duv >= 0.0);
        nonneg.le(same, 1e-8);
        let full_overlap = (hs_inner(&u, &v)?.norm() - u.dim() as f64).abs() <= 1e-8;
        nonneg.holds((duv <= 1e-8) == full_overlap);

        symmetry.holds(duv == dvu);
        triangle.le(distance_d(&u, &w)?, duv + distance_d(&v, &w)? + 1e-8);

        // The closed form must be the minimum of the explicit phase scan.
        let d = u.dim() as f64;
        let scanned = (0..720)
            .map(|j| {
                let th = Complex64::from_polar(1.0, j as f64 * std::f64::consts::PI / 360.0);
                unphased_distance(&v, &u.scale(th)).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        let ip = hs_inner(&u, &v)?.norm();
        closed.close((1.0 - ip / d).max(0.0), duv * duv, 1e-12);
        closed.le(duv, scanned + 1e-12);
        closed.le(scanned, duv + 5e-3);

        bounded.le(duv, 1.0 + 1e-12);
        left.close(distance_d(&w.matmul(&u), &w.matmul(&v))?, duv, 1e-10);

        let m = cycle_n(i / 3, 2);
        let a = haar_unitary(m, &mut rng)?;
        tensor.close(distance_d(&a.kron(&u), &a.kron(&v))?, duv, 1e-10);

        let (u2, v2) = (w, haar_unitary(n, &mut rng)?);
        let bound = duv + distance_d(&u2, &v2)?;
        prod_sub.le(distance_d(&u.matmul(&u2), &v.matmul(&v2))?, bound + 1e-8);
        let b1 = haar_unitary(m, &mut rng)?;
        let b2 = haar_unitary(m, &mut rng)?;
        tens_sub.le(
            distance_d(&u.kron(&b1), &v.kron(&b2))?,
            duv + distance_d(&b1, &b2)? + 1e-8,
        );
    }
    Ok(vec![
        nonneg, symmetry, triangle, closed, bounded, left, tensor, prod_sub, tens_sub,
    ])
}

fn lemma_suite(seed: u64, count: usize) -> Result<Vec<Check>> {
    Ok(vec![
        lemma_nearest_unitary(seed, count)?,
        lemma_orthogonal(seed, count)?,
        lemma_clifford(seed, count)?,
        lemma_good_propagation(seed, count)?,
        junta_reconstruction(seed, count)?,
    ])
}

/// Contractions `a` with `‖a‖² ≥ N(1 − ε)` are within `√(ε/2)` of unitary.
fn lemma_nearest_unitary(seed: u64, count: usize) -> Result<Check> {
    let mut rng = RngStream::new(seed, 0x4c31);
    let mut check = Check::new("nearest unitary within sqrt(eps/2) of a contraction");
    for i in 0..count {
        let n = cycle_n(i, 3);
        let left = haar_unitary(n, &mut rng)?;
        let right = haar_unitary(n, &mut rng)?;
        let spread = rng.uniform();
        let sv: Vec<Complex64> = (0..1usize << n)
            .map(|_| Complex64::new(1.0 - spread * rng.uniform(), 0.0))
            .collect();
        let a = left.matmul(&ComplexMatrix::diagonal(&sv)?).matmul(&right);
        let d = a.dim() as f64;
        let norm_sq: f64 = svd(&a).singular_values.iter().map(|s| s * s).sum();
        let eps = (1.0 - norm_sq / d).max(0.0);
        let dist = unphased_distance(&nearest_unitary(&a), &a)?;
        check.le(dist, (eps / 2.0).sqrt() + 1e-9);
    }
    Ok(check)
}

/// `|tr(uuᵀ)| ≥ N(1 − δ)` implies `D(u, O_N) ≤ √δ`.
fn lemma_orthogonal(seed: u64, count: usize) -> Result<Check> {
    let mut rng = RngStream::new(seed, 0x4c32);
    let mut check = Check::new("orthogonal distance within sqrt(delta) of |tr(uu^T)|");
    let total = count + count / 2;
    for i in 0..total {
        let n = cycle_n(i, 3);
        let u = if i < count {
            haar_unitary(n, &mut rng)?
        } else {
            let base = random_orthogonal(n, &mut rng)?;
            let t = 0.5 * rng.uniform();
            perturbed(&base, t, &mut rng)
        };
        let d = u.dim() as f64;
        let tr: Complex64 = u.entries().iter().map(|z| z * z).sum();
        let delta = (1.0 - tr.norm() / d).max(0.0);
        let dist = dist_to_orthogonal(&u, ORTHOGONAL_GRID, ORTHOGONAL_REFINEMENTS)?.value;
        check.le(dist, delta.sqrt() + 1e-6);
    }
    Ok(check)
}

fn clifford_tables() -> Result<[CliffordTable; 2]> {
    Ok([enumerate_clifford(1)?, enumerate_clifford(2)?])
}

/// Conjugates within `δ` of Paulis for every `x` imply `D(u, C_n) ≤ 4δ`.
fn lemma_clifford(seed: u64, count: usize) -> Result<Check> {
    let tables = clifford_tables()?;
    let mut rng = RngStream::new(seed, 0x4c34);
    let mut check = Check::new("Clifford distance within 4 delta of worst conjugate deviation");
    for i in 0..count {
        let n = cycle_n(i, 2);
        let base = random_clifford(n, 20 * n + 20, &mut rng)?;
        let t = 0.6 * rng.uniform() * (base.dim() as f64).sqrt();
        let u = perturbed(&base, t, &mut rng);
        let delta = extract_tableau(&u)?.max_deviation();
        let dist = dist_to_clifford(&u, &tables[n - 1])?.value;
        check.le(dist, 4.0 * delta + 1e-6);
    }
    Ok(check)
}

/// A 2/3 fraction of δ-good strings makes every string 2δ-good.
fn lemma_good_propagation(seed: u64, count: usize) -> Result<Check> {
    let mut rng = RngStream::new(seed, 0x4c35);
    let mut check = Check::new("two-thirds delta-good implies all 2 delta-good");
    for i in 0..count {
        let n = cycle_n(i, 2);
        let u = if i % 4 < 2 {
            haar_unitary(n, &mut rng)?
        } else {
            let base = random_clifford(n, 20 * n + 20, &mut rng)?;
            let t = 0.6 * rng.uniform() * (base.dim() as f64).sqrt();
            perturbed(&base, t, &mut rng)
        };
        let mut devs = extract_tableau(&u)?.deviations;
        devs.sort_by(f64::total_cmp);
        // Smallest δ for which at least 2/3 of the strings are δ-good.
        let needed = (2 * devs.len()).div_ceil(3);
        let delta = devs[needed - 1];
        check.holds(good_fraction(&u, delta)? >= 2.0 / 3.0);
        check.le(*devs.last().unwrap(), 2.0 * delta + 1e-9);
    }
    Ok(check)
}

/// Pauli weight `≥ 1 − δ` on strings supported in `T` puts `u` within `2√δ`
/// of a junta on `T`.
fn junta_reconstruction(seed: u64, count: usize) -> Result<Check> {
    let mut rng = RngStream::new(seed, 0x4a32);
    let mut check = Check::new("junta distance within 2 sqrt(delta) of off-support Pauli weight");
    for i in 0..count {
        let n = cycle_n(i, 3);
        let k = 1 + rng.below(n);
        let (base, t_set) = random_junta_with_support(n, k, &mut rng)?;
        let u = if i % 5 == 4 {
            haar_unitary(n, &mut rng)?
        } else {
            let t = 0.5 * rng.uniform();
            perturbed(&base, t, &mut rng)
        };
        let spec = pauli_spectrum(&u);
        let inside: f64 = PauliString::all(n)
            .zip(spec.probabilities())
            .filter(|(x, _)| support(x).iter().all(|q| t_set.contains(q)))
            .map(|(_, p)| p)
            .sum();
        let delta = (1.0 - inside).max(0.0);
        let dist = dist_to_juntas(&u, k)?.value;
        check.le(dist, 2.0 * delta.sqrt() + 1e-6);
    }
    Ok(check)
}

fn appendix_suite(seed: u64, count: usize) -> Result<Vec<Check>> {
    let mut rng = RngStream::new(seed, 0x4150);
    let mut exact = Check::new("conjugates are exact phased Paulis");
    let mut identity = Check::new("F fixes the identity string with zero phase");
    let mut theta = Check::new("Theta takes values in {0, pi}");
    let mut bijective = Check::new("F is a bijection");
    let mut additive = Check::new("F(x + y) = F(x) + F(y)");
    let mut commutation = Check::new("commutation preserved under F");
    for i in 0..count {
        let n = cycle_n(i, 2);
        let u = random_clifford(n, 20 * n + 20, &mut rng)?;
        let t = extract_tableau(&u)?;
        exact.le(t.max_deviation(), 1e-8);
        identity.holds(t.f_map[0].is_identity() && t.theta_map[0] == 0.0);
        theta.holds(t.thetas_exact());
        bijective.holds(t.is_bijection());
        additive.holds(t.is_additive());
        commutation.holds(t.preserves_commutation());
    }
    Ok(vec![exact, identity, theta, bijective, additive, commutation])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_parse() {
        assert_eq!("lemmas".parse::<Suite>().unwrap(), Suite::Lemmas);
        assert_eq!(Suite::Appendix.to_string(), "appendix");
        assert!("lemma".parse::<Suite>().is_err());
    }

    #[test]
    fn check_bookkeeping() {
        let mut c = Check::new("x");
        c.le(1.0, 2.0);
        c.close(1.0, 1.0 + 1e-3, 1e-6);
        c.le(f64::NAN, 1.0);
        let r = c.finish();
        assert_eq!((r.instances, r.violations, r.passed), (3, 2, false));
        assert_eq!(r.worst_margin, f64::NEG_INFINITY);
    }

    #[test]
    fn small_metric_run_passes_and_reproduces() {
        let a = run_suite(Suite::Metrics, 9, Some(20)).unwrap();
        assert!(a.passed, "{a:?}");
        let b = run_suite(Suite::Metrics, 9, Some(20)).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn small_appendix_run_passes() {
        let r = run_suite(Suite::Appendix, 3, Some(6)).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn zero_instances_rejected() {
        assert!(run_suite(Suite::Metrics, 0, Some(0)).is_err());
    }
}
