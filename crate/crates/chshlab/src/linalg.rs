//! Small dense complex matrices and a cyclic-Jacobi eigensolver for Hermitian
//! input. Everything here is sized for the 2×2 and 4×4 operators of the CHSH
//! scenario; no attempt is made at large-matrix performance.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Off-diagonal Frobenius mass below which a Jacobi iteration counts as
/// converged.
pub const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-14;

const MAX_SWEEPS: usize = 64;

/// A dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    /// Builds from a row-major slice; length must be `dim²`.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(ComplexMatrix {
            dim,
            data: entries.to_vec(),
        })
    }

    /// 2×2 matrix from real/imaginary parts given row-major.
    pub fn two_by_two(entries: [Complex64; 4]) -> Self {
        ComplexMatrix {
            dim: 2,
            data: entries.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Tensor (Kronecker) product; (A ⊗ B) has dimension dim_A · dim_B.
    pub fn kron(&self, other: &Self) -> Self {
        let (na, nb) = (self.dim, other.dim);
        let n = na * nb;
        let mut out = Self::zeros(n);
        for i in 0..na {
            for j in 0..na {
                let aij = self.get(i, j);
                for k in 0..nb {
                    for l in 0..nb {
                        out.set(i * nb + k, j * nb + l, aij * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// AB − BA.
    pub fn commutator(a: &Self, b: &Self) -> Self {
        a.mul(b).sub(&b.mul(a))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest magnitude |a_ij − conj(a_ji)| over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// ⟨ψ|M|ψ⟩ for a column vector of matching dimension.
    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        assert_eq!(psi.len(), self.dim);
        let mut acc = Complex64::ZERO;
        for i in 0..self.dim {
            let mut row = Complex64::ZERO;
            for j in 0..self.dim {
                row += self.get(i, j) * psi[j];
            }
            acc += psi[i].conj() * row;
        }
        acc
    }

    fn off_diagonal_mass(&self) -> f64 {
        let n = self.dim;
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    sum += self.get(i, j).norm_sqr();
                }
            }
        }
        sum.sqrt()
    }
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues ascending, and
/// a unitary whose columns are the matching eigenvectors.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Frobenius norm of V·diag(λ)·V† − M; the solver's self-check.
    pub fn reconstruction_residual(&self, original: &ComplexMatrix) -> f64 {
        let n = original.dim();
        let mut rebuilt = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::ZERO;
                for (k, &lambda) in self.values.iter().enumerate() {
                    acc += self.vectors.get(i, k) * lambda * self.vectors.get(j, k).conj();
                }
                rebuilt.set(i, j, acc);
            }
        }
        rebuilt.sub(original).frobenius_norm()
    }
}

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
///
/// Each pivot (p, q) is annihilated by a unitary plane rotation: the pivot's
/// phase is absorbed first, reducing the 2×2 block to the real symmetric case,
/// then the classic tangent formula picks the inner rotation. Sweeps repeat
/// until the off-diagonal Frobenius mass falls below
/// [`JACOBI_OFF_DIAGONAL_TOL`].
pub fn hermitian_eigen(matrix: &ComplexMatrix) -> Result<HermitianEigen> {
    let asym = matrix.hermiticity_error();
    if asym > 1e-9 {
        return Err(Error::NonHermitian(asym));
    }
    let n = matrix.dim();
    let mut a = matrix.clone();
    let mut v = ComplexMatrix::identity(n);

    let mut converged = a.off_diagonal_mass() <= JACOBI_OFF_DIAGONAL_TOL;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = a.off_diagonal_mass() <= JACOBI_OFF_DIAGONAL_TOL;
    }
    if !converged {
        return Err(Error::EigenNoConvergence(a.off_diagonal_mass()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<Complex64> = (0..n).map(|i| a.get(i, i)).collect();
    order.sort_by(|&i, &j| diag[i].re.total_cmp(&diag[j].re));

    let mut values = Vec::with_capacity(n);
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        values.push(diag[src].re);
        for row in 0..n {
            vectors.set(row, col, v.get(row, src));
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// One complex Jacobi rotation annihilating the (p, q) entry of `a`,
/// accumulating the transformation into `v`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let u = apq / r; // phase of the pivot
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Unitary R: R_pp = c, R_pq = s, R_qp = −ū·s, R_qq = ū·c.
    let u_bar = u.conj();
    let n = a.dim();

    // A ← A·R (columns p, q).
    for i in 0..n {
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        a.set(i, p, aip * c - aiq * u_bar * s);
        a.set(i, q, aip * s + aiq * u_bar * c);
    }
    // A ← R†·A (rows p, q).
    for j in 0..n {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, apj * c - aqj * u * s);
        a.set(q, j, apj * s + aqj * u * c);
    }
    // The pivot is annihilated exactly; pin it and keep the diagonal real.
    a.set(p, q, Complex64::ZERO);
    a.set(q, p, Complex64::ZERO);
    let dpp = a.get(p, p);
    let dqq = a.get(q, q);
    a.set(p, p, Complex64::new(dpp.re, 0.0));
    a.set(q, q, Complex64::new(dqq.re, 0.0));

    // V ← V·R.
    for i in 0..n {
        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.set(i, p, vip * c - viq * u_bar * s);
        v.set(i, q, vip * s + viq * u_bar * c);
    }
}

/// Spectral norm (largest |eigenvalue|) of a Hermitian matrix.
pub fn spectral_norm(matrix: &ComplexMatrix) -> Result<f64> {
    let eigen = hermitian_eigen(matrix)?;
    Ok(eigen
        .values
        .iter()
        .fold(0.0_f64, |acc, &l| acc.max(l.abs())))
}
