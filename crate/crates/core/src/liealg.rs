//! Metric Lie algebras so(n), u(n), iso(n) = so(n)⋉ℝⁿ and u(n)⋉ℝ²ⁿ with
//! orthonormal bases, structure constants, adjoint/coadjoint maps and
//! complexification.
//!
//! Conventions, fixed once and used everywhere:
//! - so(n) basis is {e_i∧e_j, i<j} in lexicographic order, where
//!   (e_i∧e_j)e_k = δ_jk e_i − δ_ik e_j, i.e. the matrix E_ij − E_ji.
//!   The scalar product ⟨A,B⟩ = −½tr(AB) makes this basis orthonormal.
//! - u(n) is the space of skew-Hermitian n×n matrices with ⟨A,B⟩ = −tr(AB),
//!   which is exactly the scalar product induced by its embedding into
//!   so(2n) (real part block / imaginary part block layout).
//! - iso(n) carries the so(n) basis followed by translations ∂t∧e_k with
//!   ⟨∂t∧v, ∂t∧w⟩ = v·w and bracket
//!   [(X,v),(Y,w)] = (XY−YX, Xw−Yv).
//! - uiso(n) = u(n)⋉ℝ²ⁿ is the isometry algebra of the Kähler flat space,
//!   with the u(n) basis acting on ℝ²ⁿ through the realification.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CurvError, Result};

/// Which algebra a [`MetricLieAlgebra`] realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraName {
    /// so(n): skew-symmetric real matrices.
    So,
    /// u(n): skew-Hermitian complex matrices.
    U,
    /// iso(n) = so(n) ⋉ ℝⁿ.
    Iso,
    /// u(n) ⋉ ℝ²ⁿ, the isometry algebra of flat Kähler space.
    UIso,
}

impl AlgebraName {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgebraName::So => "so",
            AlgebraName::U => "u",
            AlgebraName::Iso => "iso",
            AlgebraName::UIso => "uiso",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "so" => Ok(AlgebraName::So),
            "u" => Ok(AlgebraName::U),
            "iso" => Ok(AlgebraName::Iso),
            "uiso" => Ok(AlgebraName::UIso),
            other => Err(CurvError::InvalidParameter(format!(
                "unknown algebra name '{other}' (expected so|u|iso|uiso)"
            ))),
        }
    }
}

/// Element of g⊗ℂ stored as a pair of real coordinate vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexVector {
    pub re: DVector<f64>,
    pub im: DVector<f64>,
}

impl ComplexVector {
    pub fn zero(dim: usize) -> Self {
        Self {
            re: DVector::zeros(dim),
            im: DVector::zeros(dim),
        }
    }

    pub fn from_real(re: DVector<f64>) -> Self {
        let im = DVector::zeros(re.len());
        Self { re, im }
    }

    pub fn new(re: DVector<f64>, im: DVector<f64>) -> Result<Self> {
        if re.len() != im.len() {
            return Err(CurvError::DimensionMismatch(format!(
                "re has length {}, im has length {}",
                re.len(),
                im.len()
            )));
        }
        Ok(Self { re, im })
    }

    pub fn dim(&self) -> usize {
        self.re.len()
    }

    /// Squared Hermitian norm ‖re‖² + ‖im‖².
    pub fn norm_sq(&self) -> f64 {
        self.re.norm_squared() + self.im.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            re: &self.re * c.re - &self.im * c.im,
            im: &self.re * c.im + &self.im * c.re,
        }
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self {
            re: &self.re / n,
            im: &self.im / n,
        }
    }

    /// Pack into a complex nalgebra vector.
    pub fn to_complex(&self) -> DVector<Complex64> {
        DVector::from_fn(self.re.len(), |i, _| Complex64::new(self.re[i], self.im[i]))
    }

    pub fn from_complex(v: &DVector<Complex64>) -> Self {
        Self {
            re: DVector::from_fn(v.len(), |i, _| v[i].re),
            im: DVector::from_fn(v.len(), |i, _| v[i].im),
        }
    }
}

/// Shared, cached algebra instances. Construction is deterministic, so the
/// cache is purely an allocation saver.
pub fn shared(name: AlgebraName, n: usize) -> Result<std::sync::Arc<MetricLieAlgebra>> {
    use std::collections::HashMap;
    use std::sync::{Arc, LazyLock, Mutex};
    static CACHE: LazyLock<Mutex<HashMap<(AlgebraName, usize), Arc<MetricLieAlgebra>>>> =
        LazyLock::new(|| Mutex::new(HashMap::new()));
    let mut cache = CACHE.lock().unwrap();
    if let Some(a) = cache.get(&(name, n)) {
        return Ok(a.clone());
    }
    let alg = Arc::new(MetricLieAlgebra::build(name, n)?);
    cache.insert((name, n), alg.clone());
    Ok(alg)
}

/// A finite-dimensional real Lie algebra with a fixed orthonormal basis.
///
/// Structure constants are stored through the precomputed adjoint matrices
/// of the basis: `ad_basis[a][k][b] = c_ab^k` with [b_a, b_b] = Σ_k c_ab^k b_k.
/// Immutable after construction; cheap to share behind an `Arc`.
#[derive(Debug, Clone)]
pub struct MetricLieAlgebra {
    name: AlgebraName,
    n: usize,
    dim: usize,
    /// ad_basis[a] is the matrix of ad_{b_a}: column b holds the
    /// coordinates of [b_a, b_b].
    ad_basis: Vec<DMatrix<f64>>,
    /// adtr_basis[a] is the matrix of x ↦ ad_x^tr b_a.
    adtr_basis: Vec<DMatrix<f64>>,
}

fn adtr_from_ad(ad_basis: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    let dim = ad_basis.len();
    let mut out = Vec::with_capacity(dim);
    for a in 0..dim {
        // entry (k,b) = ⟨b_a, [b_b, b_k]⟩ = c_bk^a
        let m = DMatrix::from_fn(dim, dim, |k, b| ad_basis[b][(a, k)]);
        out.push(m);
    }
    out
}

impl MetricLieAlgebra {
    pub fn build(name: AlgebraName, n: usize) -> Result<Self> {
        match name {
            AlgebraName::So => Self::so(n),
            AlgebraName::U => Self::u(n),
            AlgebraName::Iso => Self::iso(n),
            AlgebraName::UIso => Self::uiso(n),
        }
    }

    pub fn so(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(CurvError::InvalidParameter(format!(
                "so(n) requires n >= 2, got {n}"
            )));
        }
        let dim = n * (n - 1) / 2;
        let basis: Vec<DMatrix<f64>> = (0..dim).map(|a| so_basis_matrix(n, a)).collect();
        let ad_basis = ad_from_real_matrix_bracket(&basis, |x, y| x * y - y * x, |m| {
            so_matrix_to_coords(m)
        });
        let adtr_basis = adtr_from_ad(&ad_basis);
        Ok(Self {
            name: AlgebraName::So,
            n,
            dim,
            ad_basis,
            adtr_basis,
        })
    }

    pub fn u(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(CurvError::InvalidParameter(format!(
                "u(n) requires n >= 1, got {n}"
            )));
        }
        let dim = n * n;
        let basis: Vec<DMatrix<Complex64>> = (0..dim).map(|a| u_basis_matrix(n, a)).collect();
        let mut ad_basis = Vec::with_capacity(dim);
        for a in 0..dim {
            let mut ad = DMatrix::zeros(dim, dim);
            for b in 0..dim {
                let br = &basis[a] * &basis[b] - &basis[b] * &basis[a];
                let coords = u_matrix_to_coords(&br);
                ad.set_column(b, &coords);
            }
            ad_basis.push(ad);
        }
        let adtr_basis = adtr_from_ad(&ad_basis);
        Ok(Self {
            name: AlgebraName::U,
            n,
            dim,
            ad_basis,
            adtr_basis,
        })
    }

    pub fn iso(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(CurvError::InvalidParameter(format!(
                "iso(n) requires n >= 2, got {n}"
            )));
        }
        let dso = n * (n - 1) / 2;
        let dim = dso + n;
        let mut ad_basis = vec![DMatrix::zeros(dim, dim); dim];
        let so = Self::so(n)?;
        // rotation-rotation block: so(n) structure
        for a in 0..dso {
            for b in 0..dso {
                for k in 0..dso {
                    ad_basis[a][(k, b)] = so.ad_basis[a][(k, b)];
                }
            }
            // rotation acting on translations: [X, ∂t∧e_k] = ∂t∧(X e_k)
            let xa = so_basis_matrix(n, a);
            for k in 0..n {
                for l in 0..n {
                    ad_basis[a][(dso + l, dso + k)] = xa[(l, k)];
                }
            }
        }
        // translation acting on rotations: [∂t∧e_j, Y] = −∂t∧(Y e_j)
        for j in 0..n {
            let a = dso + j;
            for b in 0..dso {
                let yb = so_basis_matrix(n, b);
                for l in 0..n {
                    ad_basis[a][(dso + l, b)] = -yb[(l, j)];
                }
            }
            // translations commute
        }
        let adtr_basis = adtr_from_ad(&ad_basis);
        Ok(Self {
            name: AlgebraName::Iso,
            n,
            dim,
            ad_basis,
            adtr_basis,
        })
    }

    pub fn uiso(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(CurvError::InvalidParameter(format!(
                "uiso(n) requires n >= 1, got {n}"
            )));
        }
        let du = n * n;
        let nt = 2 * n;
        let dim = du + nt;
        let mut ad_basis = vec![DMatrix::zeros(dim, dim); dim];
        let u = Self::u(n)?;
        for a in 0..du {
            for b in 0..du {
                for k in 0..du {
                    ad_basis[a][(k, b)] = u.ad_basis[a][(k, b)];
                }
            }
            // u(n) acting on ℝ²ⁿ through the realification
            let ra = realify(&u_basis_matrix(n, a));
            for k in 0..nt {
                for l in 0..nt {
                    ad_basis[a][(du + l, du + k)] = ra[(l, k)];
                }
            }
        }
        for j in 0..nt {
            let a = du + j;
            for b in 0..du {
                let rb = realify(&u_basis_matrix(n, b));
                for l in 0..nt {
                    ad_basis[a][(du + l, b)] = -rb[(l, j)];
                }
            }
        }
        let adtr_basis = adtr_from_ad(&ad_basis);
        Ok(Self {
            name: AlgebraName::UIso,
            n,
            dim,
            ad_basis,
            adtr_basis,
        })
    }

    pub fn name(&self) -> AlgebraName {
        self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the rotational part (whole algebra for so/u).
    pub fn rot_dim(&self) -> usize {
        match self.name {
            AlgebraName::So | AlgebraName::U => self.dim,
            AlgebraName::Iso => self.dim - self.n,
            AlgebraName::UIso => self.dim - 2 * self.n,
        }
    }

    /// Whether the scalar product is invariant under the adjoint representation.
    pub fn is_ad_invariant(&self) -> bool {
        matches!(self.name, AlgebraName::So | AlgebraName::U)
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.name == other.name && self.n == other.n
    }

    pub fn ad_of_basis(&self, a: usize) -> &DMatrix<f64> {
        &self.ad_basis[a]
    }

    /// Matrix of x ↦ ad_x^tr b_a for the a-th basis vector.
    pub fn adtr_of_basis(&self, a: usize) -> &DMatrix<f64> {
        &self.adtr_basis[a]
    }

    /// Structure constant c_ab^k with [b_a, b_b] = Σ_k c_ab^k b_k.
    pub fn structure_constant(&self, a: usize, b: usize, k: usize) -> f64 {
        self.ad_basis[a][(k, b)]
    }

    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        Ok(self.ad_matrix_unchecked(x) * y)
    }

    /// Matrix of ad_x: y ↦ [x,y].
    pub fn ad_matrix(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_len(x.len())?;
        Ok(self.ad_matrix_unchecked(x))
    }

    fn ad_matrix_unchecked(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for a in 0..self.dim {
            let c = x[a];
            if c != 0.0 {
                m += &self.ad_basis[a] * c;
            }
        }
        m
    }

    /// Matrix of the skew-adjoint map x ↦ ad_x^tr v for a fixed v, where
    /// ⟨ad_z^tr x, w⟩ = ⟨x,[z,w]⟩.
    ///
    /// Entry (k,a) is ⟨v, [b_a, b_k]⟩.
    pub fn adtr_matrix(&self, v: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_len(v.len())?;
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for a in 0..self.dim {
            let col = self.ad_basis[a].tr_mul(v); // col[k] = ⟨v, [b_a, b_k]⟩
            m.set_column(a, &col);
        }
        Ok(m)
    }

    /// Complex-bilinear extension of the bracket.
    pub fn complex_bracket(&self, x: &ComplexVector, y: &ComplexVector) -> Result<ComplexVector> {
        self.check_len(x.dim())?;
        self.check_len(y.dim())?;
        let rr = self.ad_matrix_unchecked(&x.re) * &y.re;
        let ii = self.ad_matrix_unchecked(&x.im) * &y.im;
        let ri = self.ad_matrix_unchecked(&x.re) * &y.im;
        let ir = self.ad_matrix_unchecked(&x.im) * &y.re;
        Ok(ComplexVector {
            re: rr - ii,
            im: ri + ir,
        })
    }

    /// Complex-bilinear extension of (x,v) ↦ ad_x^tr v, returned as the value
    /// at (x, v).
    pub fn complex_adtr_action(
        &self,
        x: &ComplexVector,
        v: &ComplexVector,
    ) -> Result<ComplexVector> {
        let axr = self.ad_matrix(&x.re)?.transpose();
        let axi = self.ad_matrix(&x.im)?.transpose();
        let rr = &axr * &v.re;
        let ii = &axi * &v.im;
        let ri = &axr * &v.im;
        let ir = &axi * &v.re;
        Ok(ComplexVector {
            re: rr - ii,
            im: ri + ir,
        })
    }

    /// Complexified ad matrix of a complex element: Σ (re_a + i·im_a) ad_a.
    pub fn complex_ad_matrix(&self, x: &ComplexVector) -> Result<DMatrix<Complex64>> {
        self.check_len(x.dim())?;
        let re = self.ad_matrix_unchecked(&x.re);
        let im = self.ad_matrix_unchecked(&x.im);
        Ok(complexify_pair(&re, &im))
    }

    /// Complexified matrix of ad_x^tr (the transpose of the complexified ad).
    ///
    /// `Ad^tr_{exp(tx)} = exp(t·ad_x^tr)` generates the coadjoint orbits used
    /// by the Harnack-side cone families.
    pub fn complex_adtr_rep_matrix(&self, x: &ComplexVector) -> Result<DMatrix<Complex64>> {
        Ok(self.complex_ad_matrix(x)?.transpose())
    }

    /// Residual of the Jacobi identity over all basis triples (max abs).
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for a in 0..d {
            let ada = &self.ad_basis[a];
            for b in 0..d {
                let adb = &self.ad_basis[b];
                // [a,[b,e]] - [b,[a,e]] - [[a,b],e] = 0 as matrices:
                // ad_[a,b] = ad_a ad_b - ad_b ad_a
                let lhs = ada * adb - adb * ada;
                let ab = ada.column(b).into_owned();
                let rhs = self.ad_matrix_unchecked(&ab);
                worst = worst.max((lhs - rhs).amax());
            }
        }
        worst
    }

    /// Residual of ⟨[x,y],z⟩ + ⟨y,[x,z]⟩ over all basis triples (max abs).
    pub fn ad_invariance_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..self.dim {
            let ada = &self.ad_basis[a];
            // skewness of ad_a in the orthonormal basis
            worst = worst.max((ada.transpose() + ada).amax());
        }
        worst
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(CurvError::DimensionMismatch(format!(
                "expected coordinate vector of length {}, got {}",
                self.dim, len
            )));
        }
        Ok(())
    }
}

fn ad_from_real_matrix_bracket<F, G>(
    basis: &[DMatrix<f64>],
    bracket: F,
    to_coords: G,
) -> Vec<DMatrix<f64>>
where
    F: Fn(&DMatrix<f64>, &DMatrix<f64>) -> DMatrix<f64>,
    G: Fn(&DMatrix<f64>) -> DVector<f64>,
{
    let dim = basis.len();
    let mut out = Vec::with_capacity(dim);
    for a in 0..dim {
        let mut ad = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let br = bracket(&basis[a], &basis[b]);
            ad.set_column(b, &to_coords(&br));
        }
        out.push(ad);
    }
    out
}

// ---------------------------------------------------------------------------
// so(n) realization
// ---------------------------------------------------------------------------

/// Index of the basis element e_i∧e_j (i<j) in lexicographic order.
pub fn so_pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Inverse of [`so_pair_index`].
pub fn so_index_pair(n: usize, mut idx: usize) -> (usize, usize) {
    for i in 0..n {
        let row = n - 1 - i;
        if idx < row {
            return (i, i + 1 + idx);
        }
        idx -= row;
    }
    unreachable!("index out of range")
}

/// Matrix of the basis element with the given index: E_ij − E_ji.
pub fn so_basis_matrix(n: usize, idx: usize) -> DMatrix<f64> {
    let (i, j) = so_index_pair(n, idx);
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m[(j, i)] = -1.0;
    m
}

/// Coordinates of a skew-symmetric matrix in the wedge basis.
pub fn so_matrix_to_coords(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows();
    let d = n * (n - 1) / 2;
    let mut v = DVector::zeros(d);
    for i in 0..n {
        for j in (i + 1)..n {
            v[so_pair_index(n, i, j)] = m[(i, j)];
        }
    }
    v
}

pub fn so_coords_to_matrix(n: usize, v: &DVector<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let c = v[so_pair_index(n, i, j)];
            m[(i, j)] = c;
            m[(j, i)] = -c;
        }
    }
    m
}

/// Complex skew matrix from a complexified so(n) coordinate vector.
pub fn so_complex_matrix(n: usize, v: &ComplexVector) -> DMatrix<Complex64> {
    let re = so_coords_to_matrix(n, &v.re);
    let im = so_coords_to_matrix(n, &v.im);
    complexify_pair(&re, &im)
}

/// Coordinates of a complex skew matrix.
pub fn so_complex_coords(m: &DMatrix<Complex64>) -> ComplexVector {
    let n = m.nrows();
    let re = DMatrix::from_fn(n, n, |i, j| m[(i, j)].re);
    let im = DMatrix::from_fn(n, n, |i, j| m[(i, j)].im);
    ComplexVector {
        re: so_matrix_to_coords(&re),
        im: so_matrix_to_coords(&im),
    }
}

// ---------------------------------------------------------------------------
// u(n) realization
// ---------------------------------------------------------------------------

/// Orthonormal basis of u(n) under ⟨A,B⟩ = −tr(AB):
/// indices 0..n are iE_kk; then per pair (j<k) the two elements
/// (E_jk−E_kj)/√2 and i(E_jk+E_kj)/√2.
pub fn u_basis_matrix(n: usize, idx: usize) -> DMatrix<Complex64> {
    let i = Complex64::i();
    let mut m = DMatrix::zeros(n, n);
    if idx < n {
        m[(idx, idx)] = i;
        return m;
    }
    let p = idx - n;
    let (j, k) = so_index_pair(n, p / 2);
    let s = 1.0 / 2.0_f64.sqrt();
    if p % 2 == 0 {
        m[(j, k)] = Complex64::new(s, 0.0);
        m[(k, j)] = Complex64::new(-s, 0.0);
    } else {
        m[(j, k)] = i * s;
        m[(k, j)] = i * s;
    }
    m
}

/// Coordinates of a skew-Hermitian matrix in the u(n) basis.
pub fn u_matrix_to_coords(m: &DMatrix<Complex64>) -> DVector<f64> {
    let n = m.nrows();
    let mut v = DVector::zeros(n * n);
    for k in 0..n {
        v[k] = m[(k, k)].im;
    }
    let s = 2.0_f64.sqrt();
    for j in 0..n {
        for k in (j + 1)..n {
            let p = so_pair_index(n, j, k);
            v[n + 2 * p] = s * m[(j, k)].re;
            v[n + 2 * p + 1] = s * m[(j, k)].im;
        }
    }
    v
}

pub fn u_coords_to_matrix(n: usize, v: &DVector<f64>) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(n, n);
    let i = Complex64::i();
    for k in 0..n {
        m[(k, k)] = i * v[k];
    }
    let s = 1.0 / 2.0_f64.sqrt();
    for j in 0..n {
        for k in (j + 1)..n {
            let p = so_pair_index(n, j, k);
            let a = v[n + 2 * p];
            let b = v[n + 2 * p + 1];
            m[(j, k)] = Complex64::new(a * s, b * s);
            m[(k, j)] = Complex64::new(-a * s, b * s);
        }
    }
    m
}

/// gl(n,ℂ) matrix from a complexified u(n) coordinate vector:
/// A = X + iY with X = mat(re), Y = mat(im).
pub fn gl_from_complexified(n: usize, v: &ComplexVector) -> DMatrix<Complex64> {
    let x = u_coords_to_matrix(n, &v.re);
    let y = u_coords_to_matrix(n, &v.im);
    x + y * Complex64::i()
}

/// Inverse of [`gl_from_complexified`]: splits A into skew-Hermitian parts
/// X = (A−A†)/2 and Y = (A+A†)/(2i).
pub fn gl_to_complexified(a: &DMatrix<Complex64>) -> ComplexVector {
    let adj = a.adjoint();
    let x = (a - &adj) * Complex64::new(0.5, 0.0);
    let y = (a + &adj) * (Complex64::new(0.0, -0.5));
    ComplexVector {
        re: u_matrix_to_coords(&x),
        im: u_matrix_to_coords(&y),
    }
}

/// Realification of a complex n×n matrix as a 2n×2n real matrix in the
/// (Re, Im) block layout: X+iY ↦ [[X, −Y],[Y, X]].
pub fn realify(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut r = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            r[(i, j)] = z.re;
            r[(i, j + n)] = -z.im;
            r[(i + n, j)] = z.im;
            r[(i + n, j + n)] = z.re;
        }
    }
    r
}

/// Matrix of the complex structure J (multiplication by i) on ℝ²ⁿ.
pub fn complex_structure(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, k + n)] = -1.0;
        j[(k + n, k)] = 1.0;
    }
    j
}

/// Isometric embedding u(n) → so(2n): column a holds the so(2n) coordinates
/// of the realified a-th u(n) basis element. Columns are orthonormal.
pub fn u_embedding_matrix(n: usize) -> DMatrix<f64> {
    let du = n * n;
    let dso = 2 * n * (2 * n - 1) / 2;
    let mut e = DMatrix::zeros(dso, du);
    for a in 0..du {
        let r = realify(&u_basis_matrix(n, a));
        e.set_column(a, &so_matrix_to_coords(&r));
    }
    e
}

fn complexify_pair(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
        Complex64::new(re[(i, j)], im[(i, j)])
    })
}

// ---------------------------------------------------------------------------
// iso(n) and uiso(n) coordinate helpers
// ---------------------------------------------------------------------------

/// Split complexified iso/uiso coordinates into (rotational part, translation part).
pub fn split_semidirect(alg: &MetricLieAlgebra, v: &ComplexVector) -> (ComplexVector, ComplexVector) {
    let dr = alg.rot_dim();
    let rot = ComplexVector {
        re: v.re.rows(0, dr).into_owned(),
        im: v.im.rows(0, dr).into_owned(),
    };
    let nt = alg.dim() - dr;
    let tr = ComplexVector {
        re: v.re.rows(dr, nt).into_owned(),
        im: v.im.rows(dr, nt).into_owned(),
    };
    (rot, tr)
}

pub fn join_semidirect(rot: &ComplexVector, tr: &ComplexVector) -> ComplexVector {
    let mut re = DVector::zeros(rot.dim() + tr.dim());
    let mut im = DVector::zeros(rot.dim() + tr.dim());
    re.rows_mut(0, rot.dim()).copy_from(&rot.re);
    im.rows_mut(0, rot.dim()).copy_from(&rot.im);
    re.rows_mut(rot.dim(), tr.dim()).copy_from(&tr.re);
    im.rows_mut(rot.dim(), tr.dim()).copy_from(&tr.im);
    ComplexVector { re, im }
}

/// Embed v ∈ ℂⁿ into the (1,0) part of ℝ²ⁿ⊗ℂ, i.e. the +i eigenspace of J:
/// v ↦ (v, −iv) in the (Re, Im) block layout.
pub fn holomorphic_translation(v: &DVector<Complex64>) -> ComplexVector {
    let n = v.len();
    let mut re = DVector::zeros(2 * n);
    let mut im = DVector::zeros(2 * n);
    for k in 0..n {
        // first block: v_k ; second block: -i v_k
        re[k] = v[k].re;
        im[k] = v[k].im;
        re[n + k] = v[k].im;
        im[n + k] = -v[k].re;
    }
    ComplexVector { re, im }
}

/// Project a complexified translation x ∈ ℝ²ⁿ⊗ℂ onto its (1,0) and (0,1)
/// parts; returns (v, w) with x = (v, −iv) + (w, iw).
pub fn translation_components(x: &ComplexVector) -> (DVector<Complex64>, DVector<Complex64>) {
    let n2 = x.dim();
    debug_assert!(n2 % 2 == 0);
    let n = n2 / 2;
    let xc = x.to_complex();
    let i = Complex64::i();
    let half = Complex64::new(0.5, 0.0);
    let mut v = DVector::zeros(n);
    let mut w = DVector::zeros(n);
    for k in 0..n {
        let a = xc[k];
        let b = xc[n + k];
        v[k] = (a + i * b) * half;
        w[k] = (a - i * b) * half;
    }
    (v, w)
}

// ---------------------------------------------------------------------------
// complex dense matrix exponential (scaling and squaring)
// ---------------------------------------------------------------------------

/// exp(M) for a complex square matrix via scaling-and-squaring with a Taylor
/// core. Accurate to near machine precision for the small matrices used here.
pub fn expm_complex(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let norm = m.iter().map(|z| z.norm()).fold(0.0_f64, f64::max) * n as f64;
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let t = m / Complex64::new(2.0_f64.powi(s as i32), 0.0);
    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=24 {
        term = (&term * &t) / Complex64::new(k as f64, 0.0);
        result += &term;
        if term.iter().map(|z| z.norm()).fold(0.0_f64, f64::max) < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// exp(M) for a real square matrix.
pub fn expm_real(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm = m.amax() * n as f64;
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let t = m / 2.0_f64.powi(s as i32);
    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=24 {
        term = (&term * &t) / (k as f64);
        result += &term;
        if term.amax() < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}
