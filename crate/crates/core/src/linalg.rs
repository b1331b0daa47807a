//! Small dense complex linear algebra.
//!
//! Everything here is sized for the Sᶻ = 0 sector of at most twelve spins
//! (dimension 924), so plain row-major storage and cyclic Jacobi sweeps are
//! accurate to ~1e-12 and fast enough.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from row slices; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Complex64>]) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged columns");
            for (i, &z) in c.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let base = i * other.cols;
                for (j, &b) in orow.iter().enumerate() {
                    out.data[base + j] += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "vector length differs from column count");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest |A_ij − conj(A_ji)|; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered like `eigenvalues`.
    pub eigenvectors: Option<CMatrix>,
}

impl Spectrum {
    pub fn eigenvector(&self, k: usize) -> Option<Vec<Complex64>> {
        self.eigenvectors.as_ref().map(|v| v.column(k))
    }
}

/// Hermiticity tolerance accepted by [`hermitian_eig`], relative to max(1, max|A_ij|).
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix
/// by cyclic complex Jacobi rotations.
pub fn hermitian_eig(m: &CMatrix) -> Result<Spectrum> {
    jacobi(m, true)
}

/// Eigenvalues only; skips the eigenvector accumulation.
pub fn hermitian_eigvals(m: &CMatrix) -> Result<Vec<f64>> {
    jacobi(m, false).map(|s| s.eigenvalues)
}

fn jacobi(m: &CMatrix, want_vectors: bool) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            got: m.cols(),
        });
    }
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.rows();
    // Symmetrize so rounding noise in the input cannot bias the result.
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let h = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            a[(i, j)] = h;
            a[(j, i)] = h.conj();
        }
    }
    let mut v = want_vectors.then(|| CMatrix::identity(n));
    let scale = a.frobenius_norm();

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = a[(p, q)];
                let g_abs = g.norm();
                if g_abs <= f64::MIN_POSITIVE || g_abs <= 1e-18 * scale {
                    continue;
                }
                let phase = g / g_abs;
                let zeta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g_abs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U = diag(1, conj(phase)) · [[c, s], [-s, c]]
                let u_pp = Complex64::new(c, 0.0);
                let u_pq = Complex64::new(s, 0.0);
                let u_qp = -s * phase.conj();
                let u_qq = c * phase.conj();
                rotate(&mut a, p, q, u_pp, u_pq, u_qp, u_qq);
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * u_pp + vkq * u_qp;
                        v[(k, q)] = vkp * u_pq + vkq * u_qq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = v.map(|v| {
        let mut sorted = CMatrix::zeros(n, n);
        for (new, &old) in order.iter().enumerate() {
            for k in 0..n {
                sorted[(k, new)] = v[(k, old)];
            }
        }
        sorted
    });
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// A ← Uᴴ A U for a unitary acting on the (p, q) plane.
fn rotate(
    a: &mut CMatrix,
    p: usize,
    q: usize,
    u_pp: Complex64,
    u_pq: Complex64,
    u_qp: Complex64,
    u_qq: Complex64,
) {
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

/// Result of a one-sided Jacobi SVD: singular values (descending) and the
/// matching left singular vectors.
#[derive(Debug, Clone)]
pub struct ColumnSpace {
    pub singular_values: Vec<f64>,
    pub left_vectors: Vec<Vec<Complex64>>,
}

impl ColumnSpace {
    /// Number of singular values above `rel_tol · σ_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        if smax == 0.0 {
            return 0;
        }
        self.singular_values
            .iter()
            .filter(|&&s| s > rel_tol * smax)
            .count()
    }

    /// Orthonormal basis of the numerical column space.
    pub fn basis(&self, rel_tol: f64) -> &[Vec<Complex64>] {
        &self.left_vectors[..self.rank(rel_tol)]
    }

    /// ‖v − P v‖ where P projects onto the numerical column space.
    pub fn residual(&self, v: &[Complex64], rel_tol: f64) -> f64 {
        let mut r = v.to_vec();
        for u in self.basis(rel_tol) {
            let c = dot(u, &r);
            for (ri, ui) in r.iter_mut().zip(u) {
                *ri -= c * ui;
            }
        }
        norm(&r)
    }
}

/// Singular values and left singular vectors of the matrix whose columns are
/// `columns`, by one-sided (Hestenes) Jacobi.
pub fn column_space(columns: &[Vec<Complex64>]) -> ColumnSpace {
    let mut cols: Vec<Vec<Complex64>> = columns.to_vec();
    let n = cols.len();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = dot(&cols[p], &cols[q]);
                let g_abs = gamma.norm();
                if g_abs <= 1e-15 * (alpha * beta).sqrt() || g_abs == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g_abs;
                let zeta = (beta - alpha) / (2.0 * g_abs);
                let t = if zeta >= 0.0 { 1.0 } else { -1.0 } / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let cp = &mut left[p];
                let cq = &mut right[0];
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let yt = *y * phase.conj();
                    let nx = c * *x - s * yt;
                    let ny = s * *x + c * yt;
                    *x = nx;
                    *y = ny;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut pairs: Vec<(f64, Vec<Complex64>)> = cols
        .into_iter()
        .map(|c| {
            let s = norm(&c);
            let u = if s > 0.0 {
                c.iter().map(|z| z / s).collect()
            } else {
                c
            };
            (s, u)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (singular_values, left_vectors) = pairs.into_iter().unzip();
    ColumnSpace {
        singular_values,
        left_vectors,
    }
}

/// Numerical rank of the matrix with the given columns (threshold relative to σ_max).
pub fn rank_of_columns(columns: &[Vec<Complex64>], rel_tol: f64) -> usize {
    column_space(columns).rank(rel_tol)
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
pub fn solve(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.rows();
    if !a.is_square() || b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| m[(x, col)].norm().total_cmp(&m[(y, col)].norm()))
            .expect("non-empty range");
        if m[(piv, col)].norm() <= 1e-14 * scale {
            return Err(Error::Internal("singular linear system".into()));
        }
        if piv != col {
            for k in 0..n {
                let tmp = m[(col, k)];
                m[(col, k)] = m[(piv, k)];
                m[(piv, k)] = tmp;
            }
            rhs.swap(col, piv);
        }
        let d = m[(col, col)];
        for r in col + 1..n {
            let f = m[(r, col)] / d;
            if f == ZERO {
                continue;
            }
            for k in col..n {
                let v = m[(col, k)];
                m[(r, k)] -= f * v;
            }
            let v = rhs[col];
            rhs[r] -= f * v;
        }
    }
    let mut x = vec![ZERO; n];
    for r in (0..n).rev() {
        let s: Complex64 = (r + 1..n).map(|k| m[(r, k)] * x[k]).sum();
        x[r] = (rhs[r] - s) / m[(r, r)];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual_ok(m: &CMatrix, s: &Spectrum) {
        let v = s.eigenvectors.as_ref().unwrap();
        let scale = m.frobenius_norm().max(1.0);
        for (k, &lam) in s.eigenvalues.iter().enumerate() {
            let col = v.column(k);
            let hv = m.mul_vec(&col);
            let r: f64 = hv
                .iter()
                .zip(&col)
                .map(|(a, b)| (a - lam * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(r <= 1e-9 * scale, "residual {r}");
        }
        let vhv = v.adjoint().matmul(v);
        assert!(vhv.sub(&CMatrix::identity(m.rows())).max_abs() < 1e-9);
    }

    #[test]
    fn diagonal_matrix() {
        let m = CMatrix::from_diag(&[3.0, 1.0, 2.0]);
        let s = hermitian_eig(&m).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 2.0, 3.0]);
        residual_ok(&m, &s);
    }

    #[test]
    fn pauli_x_tensor_identity() {
        let mut m = CMatrix::zeros(4, 4);
        // σx ⊗ I in |00>,|01>,|10>,|11> order
        m[(0, 2)] = c(1.0, 0.0);
        m[(2, 0)] = c(1.0, 0.0);
        m[(1, 3)] = c(1.0, 0.0);
        m[(3, 1)] = c(1.0, 0.0);
        let s = hermitian_eig(&m).unwrap();
        for (got, want) in s.eigenvalues.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        residual_ok(&m, &s);
    }

    #[test]
    fn isotropic_pair_matrix_at_minus_one_twelfth() {
        let cz = -1.0 / 12.0;
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(0.25 + cz, 0.0);
        m[(1, 1)] = c(0.25 - cz, 0.0);
        m[(2, 2)] = c(0.25 - cz, 0.0);
        m[(3, 3)] = c(0.25 + cz, 0.0);
        m[(1, 2)] = c(2.0 * cz, 0.0);
        m[(2, 1)] = c(2.0 * cz, 0.0);
        let ev = hermitian_eigvals(&m).unwrap();
        let want = [1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.5];
        for (g, w) in ev.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn complex_hermitian_residuals() {
        let mut m = CMatrix::zeros(3, 3);
        m[(0, 0)] = c(2.0, 0.0);
        m[(1, 1)] = c(-1.0, 0.0);
        m[(2, 2)] = c(0.5, 0.0);
        m[(0, 1)] = c(0.3, 0.7);
        m[(1, 0)] = c(0.3, -0.7);
        m[(1, 2)] = c(-0.2, 0.1);
        m[(2, 1)] = c(-0.2, -0.1);
        m[(0, 2)] = c(0.0, 1.1);
        m[(2, 0)] = c(0.0, -1.1);
        let s = hermitian_eig(&m).unwrap();
        residual_ok(&m, &s);
        let sum: f64 = s.eigenvalues.iter().sum();
        assert!((sum - m.trace().re).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn column_space_rank_and_residual() {
        let a = vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let b = vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)];
        let sum: Vec<_> = a.iter().zip(&b).map(|(x, y)| x + 2.0 * y).collect();
        let cs = column_space(&[a.clone(), b.clone(), sum.clone()]);
        assert_eq!(cs.rank(1e-8), 2);
        assert!(cs.residual(&sum, 1e-8) < 1e-12);
        let e = vec![c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)];
        assert!(cs.residual(&e, 1e-8) > 0.1);
    }

    #[test]
    fn linear_solve() {
        let a = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(2.0, 1.0)],
            vec![c(1.0, 0.0), c(1.0, 0.0)],
        ]);
        let x = solve(&a, &[c(2.0, 1.0), c(3.0, 0.0)]).unwrap();
        assert!((x[0] - c(2.0, 0.0)).norm() < 1e-14);
        assert!((x[1] - c(1.0, 0.0)).norm() < 1e-14);
    }
}
