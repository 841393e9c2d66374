//! Small dense complex-vector routines used by the beamformers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `aᴴ b`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Scales `v` to unit norm; `None` when `‖v‖ <= tol`.
pub fn normalized(v: &[Complex64], tol: f64) -> Option<Vec<Complex64>> {
    let n = norm(v);
    if n.is_nan() || n <= tol {
        return None;
    }
    Some(v.iter().map(|z| z / n).collect())
}

/// Rotates `v` so its largest-modulus entry is real and positive.
pub fn fix_global_phase(v: &mut [Complex64]) {
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
        .unwrap_or(ZERO);
    if pivot.norm() == 0.0 {
        return;
    }
    let rot = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z *= rot;
    }
}

/// Elementwise `conj(phases) ⊙ v`.
pub fn derotate(phases: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    phases.iter().zip(v).map(|(p, x)| p.conj() * x).collect()
}

/// Orthonormal basis for the orthogonal complement of a single vector.
///
/// Column `k` (0-based) is column `k + 1` of the Householder reflector that
/// maps `c` onto the first coordinate axis. Since the reflector is unitary and
/// its first column is parallel to `c`, the remaining columns are orthonormal
/// and orthogonal to `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct NullBasis {
    columns: Vec<Vec<Complex64>>,
}

impl NullBasis {
    pub fn of(c: &[Complex64]) -> Result<Self> {
        let dim = c.len();
        let c_norm = norm(c);
        if dim < 2 || c_norm.is_nan() || c_norm <= 1e-12 {
            return Err(Error::DegenerateConstraint("null space of a zero vector"));
        }
        // alpha = -e^{j arg c_0} ‖c‖ keeps u_0 = c_0 - alpha away from cancellation.
        let lead = if c[0].norm() > 0.0 {
            c[0] / c[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -lead * c_norm;
        let mut u = c.to_vec();
        u[0] -= alpha;
        let u_sq: f64 = u.iter().map(|z| z.norm_sqr()).sum();

        // H = I - 2 u uᴴ / (uᴴ u); keep columns 1..dim.
        let columns = (1..dim)
            .map(|j| {
                let scale = 2.0 * u[j].conj() / u_sq;
                (0..dim)
                    .map(|i| {
                        let id = if i == j { 1.0 } else { 0.0 };
                        Complex64::new(id, 0.0) - u[i] * scale
                    })
                    .collect()
            })
            .collect();
        Ok(Self { columns })
    }

    pub fn columns(&self) -> &[Vec<Complex64>] {
        &self.columns
    }

    /// Ambient dimension N.
    pub fn dim(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    /// `Fᴴ x`, length N-1.
    pub fn project(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.columns.iter().map(|col| inner(col, x)).collect()
    }

    /// `F y`, length N.
    pub fn lift(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.dim()];
        for (col, &coef) in self.columns.iter().zip(y) {
            for (o, c) in out.iter_mut().zip(col) {
                *o += c * coef;
            }
        }
        out
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim(), self.columns.len(), |i, j| self.columns[j][i])
    }
}

pub const POWER_ITERATION_TOL: f64 = 1e-12;
pub const POWER_ITERATION_MAX: usize = 10_000;

/// Dominant eigenvector of `m` by power iteration from a fixed pseudo-random
/// start. Iterates are phase-fixed before comparison so a complex eigenvalue
/// does not read as non-convergence.
pub fn dominant_eigenvector(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    assert!(m.is_square(), "power iteration needs a square matrix");
    let dim = m.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_F1E1);
    let start: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random::<f64>() + 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let mut v = DVector::from_vec(normalized(&start, 0.0).expect("nonzero start"));

    for _ in 0..POWER_ITERATION_MAX {
        let w = m * &v;
        let Some(mut next) = normalized(w.as_slice(), 1e-300) else {
            // Start vector was annihilated; no dominant direction reachable.
            return Err(Error::NoConvergence(0));
        };
        fix_global_phase(&mut next);
        let delta = next
            .iter()
            .zip(v.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        v = DVector::from_vec(next);
        if delta < POWER_ITERATION_TOL {
            return Ok(v.as_slice().to_vec());
        }
    }
    Err(Error::NoConvergence(POWER_ITERATION_MAX))
}
