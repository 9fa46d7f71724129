//! Minimal dense complex matrices — just what the spectral oracle needs.
//!
//! Everything here is square and small (a few hundred rows at most), so the
//! naive O(n³) products are fine and keep the dependency surface at zero.

use num_complex::Complex64;

/// Square row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Self {
        let mut m = CMatrix::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, Complex64::new(e, 0.0));
        }
        m
    }

    /// Orthogonal projection onto the coordinate subspace spanned by `idx`.
    pub fn coordinate_projection(n: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in idx {
            assert!(i < n, "projection index {i} out of range for dim {n}");
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.n + j] = z;
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch in matrix product");
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let n = self.n;
        CMatrix::from_fn(n, |i, j| self.at(j, i).conj())
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x += y;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x -= y;
        }
        out
    }

    pub fn scale(&self, z: Complex64) -> CMatrix {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x *= z;
        }
        out
    }

    #[allow(clippy::needless_range_loop)]
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.n, v.len(), "dimension mismatch in matrix apply");
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += self.data[i * n + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self.at(i, j)).collect()
    }

    /// Adds `coef · u v*` in place.
    #[allow(clippy::needless_range_loop)]
    pub fn add_scaled_outer(&mut self, coef: f64, u: &[Complex64], v: &[Complex64]) {
        assert_eq!(self.n, u.len());
        assert_eq!(self.n, v.len());
        let n = self.n;
        for i in 0..n {
            let cu = u[i] * coef;
            for j in 0..n {
                self.data[i * n + j] += cu * v[j].conj();
            }
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ‖M − M*‖_F, zero exactly when Hermitian.
    pub fn hermitian_defect(&self) -> f64 {
        self.sub(&self.adjoint()).frobenius()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.at(i, i)).sum()
    }
}

/// ⟨u, v⟩ with the convention of conjugating the first argument.
pub fn vdot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vnorm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}
