//! The Kähler curvature-operator calculus on u(n).
//!
//! S²_K(u(n)) is realized concretely: a symmetric operator R on u(n) is a
//! Kähler curvature operator when its extension by zero on u(n)^⊥ ⊂ so(2n)
//! satisfies the first Bianchi identity. The basis of that subspace is
//! computed once per n and cached.
//!
//! The ⋆-product of Hermitian matrices is
//!   2⟨A⋆B u,v⟩ = −tr(AuBv) − tr(AvBu) − tr(Au)tr(Bv) − tr(Av)tr(Bu),
//! E = id⋆id is the Fubini–Study model (eigenvalue 1 with multiplicity n²−1,
//! eigenvalue n+1 on the Kähler form), and the deformation
//!   l_s(R) = R + 2s·Ric(R)⋆id + s²·scal(R)·E
//! pulls the Ricci flow ODE back to X(s)(R) = l_s⁻¹(l_s(R)² + l_s(R)^#).

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::curvop::{
    bianchi_residual_mat, hermitian_eigenvalues, kernel_basis, ric_wedge_id, sym_to_vec,
    vec_to_sym, SymOperator,
};
use crate::error::{CurvError, Result};
use crate::liealg::{self, complex_structure, u_embedding_matrix, AlgebraName, MetricLieAlgebra};

// ---------------------------------------------------------------------------
// Hermitian matrix coordinates
// ---------------------------------------------------------------------------

/// Isometric real coordinates of a Hermitian n×n matrix: n diagonal entries,
/// then √2·(Re, Im) of each upper off-diagonal entry.
pub fn hermitian_to_vec(h: &DMatrix<Complex64>) -> DVector<f64> {
    let n = h.nrows();
    let mut v = DVector::zeros(n * n);
    for k in 0..n {
        v[k] = h[(k, k)].re;
    }
    let s = 2.0_f64.sqrt();
    let mut idx = n;
    for i in 0..n {
        for j in (i + 1)..n {
            v[idx] = s * h[(i, j)].re;
            v[idx + 1] = s * h[(i, j)].im;
            idx += 2;
        }
    }
    v
}

pub fn vec_to_hermitian(n: usize, v: &DVector<f64>) -> DMatrix<Complex64> {
    let mut h = DMatrix::zeros(n, n);
    for k in 0..n {
        h[(k, k)] = Complex64::new(v[k], 0.0);
    }
    let s = 1.0 / 2.0_f64.sqrt();
    let mut idx = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = Complex64::new(v[idx] * s, v[idx + 1] * s);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            idx += 2;
        }
    }
    h
}

fn check_hermitian(a: &DMatrix<Complex64>) -> Result<()> {
    let scale = a.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    let res = (a - a.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if res / scale > 1e-12 {
        return Err(CurvError::InvalidParameter(format!(
            "matrix is not Hermitian (residual {res:.3e})"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// the star product
// ---------------------------------------------------------------------------

/// A⋆B for Hermitian A, B, as a symmetric operator on u(n).
pub fn star(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Result<SymOperator> {
    check_hermitian(a)?;
    check_hermitian(b)?;
    let n = a.nrows();
    if b.nrows() != n {
        return Err(CurvError::DimensionMismatch("A and B differ in size".into()));
    }
    let alg = liealg::shared(AlgebraName::U, n)?;
    let d = alg.dim();
    let basis: Vec<DMatrix<Complex64>> = (0..d).map(|i| liealg::u_basis_matrix(n, i)).collect();
    let au: Vec<DMatrix<Complex64>> = basis.iter().map(|u| a * u).collect();
    let bu: Vec<DMatrix<Complex64>> = basis.iter().map(|u| b * u).collect();
    let tr_au: Vec<Complex64> = au.iter().map(|m| m.trace()).collect();
    let tr_bu: Vec<Complex64> = bu.iter().map(|m| m.trace()).collect();
    let mut out = DMatrix::zeros(d, d);
    for p in 0..d {
        for q in p..d {
            // u = basis_q, v = basis_p
            let t1 = (&au[q] * &bu[p]).trace();
            let t2 = (&au[p] * &bu[q]).trace();
            let t3 = tr_au[q] * tr_bu[p];
            let t4 = tr_au[p] * tr_bu[q];
            let val = -(t1 + t2 + t3 + t4) * Complex64::new(0.5, 0.0);
            debug_assert!(val.im.abs() < 1e-10);
            out[(p, q)] = val.re;
            out[(q, p)] = val.re;
        }
    }
    SymOperator::new(alg, out)
}

/// E = id⋆id, the curvature operator of CP^n normalized so the sectional
/// curvature lies in [1/2, 2].
pub fn e_operator(n: usize) -> Result<SymOperator> {
    let id = DMatrix::<Complex64>::identity(n, n);
    star(&id, &id)
}

/// Curvature operator of CP^k × C^{n−k}: E(k) block-embedded into u(n),
/// zero on the complement.
pub fn r_k(k: usize, n: usize) -> Result<SymOperator> {
    if k < 1 || k > n {
        return Err(CurvError::InvalidParameter(format!(
            "r_k requires 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    let ek = e_operator(k)?;
    let alg = liealg::shared(AlgebraName::U, n)?;
    let dn = alg.dim();
    let dk = k * k;
    // index map u(k) basis -> u(n) basis
    let mut map = vec![0usize; dk];
    for j in 0..k {
        map[j] = j;
    }
    for i in 0..k {
        for j in (i + 1)..k {
            let pk = liealg::so_pair_index(k, i, j);
            let pn = liealg::so_pair_index(n, i, j);
            map[k + 2 * pk] = n + 2 * pn;
            map[k + 2 * pk + 1] = n + 2 * pn + 1;
        }
    }
    let mut out = DMatrix::zeros(dn, dn);
    for a in 0..dk {
        for b in 0..dk {
            out[(map[a], map[b])] = ek.mat()[(a, b)];
        }
    }
    SymOperator::new(alg, out)
}

// ---------------------------------------------------------------------------
// S²_K(u(n)) basis and cached linear maps
// ---------------------------------------------------------------------------

/// Cached per-n data for the Kähler operator subspace.
pub struct KahlerBasis {
    pub n: usize,
    u_alg: Arc<MetricLieAlgebra>,
    so2n_alg: Arc<MetricLieAlgebra>,
    /// embedding u(n) → so(2n), orthonormal columns
    embed: DMatrix<f64>,
    /// m_u × m_K orthonormal columns spanning S²_K in isometric vec coords
    kernel: DMatrix<f64>,
    /// Ricci as a linear map: Kähler coords → Hermitian coords (n² × m_K)
    ric_map: DMatrix<f64>,
    /// A ↦ A⋆id as a linear map: Hermitian coords → Kähler coords (m_K × n²)
    star_id_map: DMatrix<f64>,
    /// E in Kähler coords
    e_coords: DVector<f64>,
    /// scal as a functional on Kähler coords
    scal_row: DVector<f64>,
    /// orthonormal basis of the Ricci-flat (Weyl) subspace ⟨W⟩ ⊂ S²_K
    weyl: DMatrix<f64>,
}

static KAHLER_CACHE: LazyLock<Mutex<HashMap<usize, Arc<KahlerBasis>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

pub fn kahler_basis(n: usize) -> Result<Arc<KahlerBasis>> {
    {
        let cache = KAHLER_CACHE.lock().unwrap();
        if let Some(b) = cache.get(&n) {
            return Ok(b.clone());
        }
    }
    let b = Arc::new(KahlerBasis::build(n)?);
    KAHLER_CACHE.lock().unwrap().insert(n, b.clone());
    Ok(b)
}

impl KahlerBasis {
    fn build(n: usize) -> Result<Self> {
        let u_alg = liealg::shared(AlgebraName::U, n)?;
        let so2n_alg = liealg::shared(AlgebraName::So, 2 * n)?;
        let embed = u_embedding_matrix(n);
        let du = u_alg.dim();
        let m_u = du * (du + 1) / 2;
        let n2 = 2 * n;

        // Bianchi constraints on the zero-extension, pulled back to u(n):
        // each 4-subset of {1..2n} gives tr(W · ιRιᵀ) = ⟨ιᵀWι, R⟩.
        let mut rows: Vec<DVector<f64>> = Vec::new();
        for i in 0..n2 {
            for j in (i + 1)..n2 {
                for k in (j + 1)..n2 {
                    for l in (k + 1)..n2 {
                        let mut w = DMatrix::zeros(so2n_alg.dim(), so2n_alg.dim());
                        let terms = [
                            (liealg::so_pair_index(n2, i, j), liealg::so_pair_index(n2, k, l), 1.0),
                            (liealg::so_pair_index(n2, j, k), liealg::so_pair_index(n2, i, l), 1.0),
                            (liealg::so_pair_index(n2, i, k), liealg::so_pair_index(n2, j, l), -1.0),
                        ];
                        for (p, q, sg) in terms {
                            w[(p, q)] += 0.5 * sg;
                            w[(q, p)] += 0.5 * sg;
                        }
                        let c = embed.tr_mul(&w) * &embed;
                        rows.push(sym_to_vec(&c));
                    }
                }
            }
        }
        let nrows = rows.len().max(1);
        let mut cmat = DMatrix::zeros(nrows, m_u);
        for (r, row) in rows.iter().enumerate() {
            cmat.set_row(r, &row.transpose());
        }
        let kernel = kernel_basis(&cmat, 1e-10);
        let m_k = kernel.ncols();

        // Ricci map on the Kähler basis
        let mut ric_map = DMatrix::zeros(n * n, m_k);
        for j in 0..m_k {
            let op = SymOperator::from_mat_unchecked(
                u_alg.clone(),
                vec_to_sym(du, &kernel.column(j).into_owned()),
            );
            let h = ricci_k_with(&op, &embed, &so2n_alg)?;
            ric_map.set_column(j, &hermitian_to_vec(&h));
        }

        // A ↦ A⋆id in coordinates
        let mut star_id_map = DMatrix::zeros(m_k, n * n);
        let id = DMatrix::<Complex64>::identity(n, n);
        for j in 0..n * n {
            let mut e = DVector::zeros(n * n);
            e[j] = 1.0;
            let a = vec_to_hermitian(n, &e);
            let sa = star(&a, &id)?;
            star_id_map.set_column(j, &(kernel.tr_mul(&sym_to_vec(sa.mat()))));
        }

        let e_op = e_operator(n)?;
        let e_coords = kernel.tr_mul(&sym_to_vec(e_op.mat()));

        // scal functional: scal = trace of the real 2n Ricci = 2·tr(Hermitian)
        let mut scal_row = DVector::zeros(m_k);
        for j in 0..m_k {
            let hvec = ric_map.column(j);
            let mut tr = 0.0;
            for k in 0..n {
                tr += hvec[k];
            }
            scal_row[j] = 2.0 * tr;
        }

        let weyl = kernel_basis(&ric_map, 1e-10);

        Ok(Self {
            n,
            u_alg,
            so2n_alg,
            embed,
            kernel,
            ric_map,
            star_id_map,
            e_coords,
            scal_row,
            weyl,
        })
    }

    pub fn subspace_dim(&self) -> usize {
        self.kernel.ncols()
    }

    pub fn weyl_dim(&self) -> usize {
        self.weyl.ncols()
    }

    pub fn u_algebra(&self) -> &Arc<MetricLieAlgebra> {
        &self.u_alg
    }

    pub fn so2n_algebra(&self) -> &Arc<MetricLieAlgebra> {
        &self.so2n_alg
    }

    /// Coordinates in the orthonormal S²_K basis (an orthogonal projection).
    pub fn coords_of(&self, r: &SymOperator) -> DVector<f64> {
        self.kernel.tr_mul(&sym_to_vec(r.mat()))
    }

    pub fn op_from_coords(&self, c: &DVector<f64>) -> SymOperator {
        SymOperator::from_mat_unchecked(
            self.u_alg.clone(),
            vec_to_sym(self.u_alg.dim(), &(&self.kernel * c)),
        )
    }

    pub fn project(&self, r: &SymOperator) -> SymOperator {
        self.op_from_coords(&self.coords_of(r))
    }

    /// Distance to S²_K in the Frobenius norm.
    pub fn residual(&self, r: &SymOperator) -> f64 {
        let v = sym_to_vec(r.mat());
        let p = &self.kernel * (self.kernel.tr_mul(&v));
        (v - p).norm()
    }

    pub fn random_kahler<R: Rng>(&self, rng: &mut R) -> SymOperator {
        let c = DVector::from_fn(self.subspace_dim(), |_, _| rng.gen_range(-1.0..1.0));
        self.op_from_coords(&c)
    }

    /// Random element of the Ricci-flat (Weyl) subspace.
    pub fn random_weyl<R: Rng>(&self, rng: &mut R) -> SymOperator {
        let c = DVector::from_fn(self.weyl_dim(), |_, _| rng.gen_range(-1.0..1.0));
        self.op_from_coords(&(&self.weyl * c))
    }

    /// Matrix of l_s on the Kähler subspace: I + 2s·(⋆id)∘Ric + s²·E·scal.
    pub fn l_s_matrix(&self, s: f64) -> DMatrix<f64> {
        let m = self.subspace_dim();
        let mut out = DMatrix::identity(m, m);
        out += (&self.star_id_map * &self.ric_map) * (2.0 * s);
        out += (&self.e_coords * self.scal_row.transpose()) * (s * s);
        out
    }

    /// The orthogonal complement claim: ⟨A⋆id⟩ = ⟨W⟩^⊥ within S²_K.
    /// Returns (dim star_id range, weyl dim, max |⟨star_id col, weyl col⟩|).
    pub fn star_id_complement_check(&self) -> (usize, usize, f64) {
        let range_rank = self
            .star_id_map
            .clone()
            .svd(false, false)
            .rank(1e-10);
        let mut worst = 0.0_f64;
        for j in 0..self.star_id_map.ncols() {
            for k in 0..self.weyl.ncols() {
                let ip = self.star_id_map.column(j).dot(&self.weyl.column(k));
                worst = worst.max(ip.abs());
            }
        }
        (range_rank, self.weyl.ncols(), worst)
    }
}

// ---------------------------------------------------------------------------
// Ricci, scalar, and the deformation
// ---------------------------------------------------------------------------

fn check_u_operator(r: &SymOperator) -> Result<usize> {
    if r.algebra().name() != AlgebraName::U {
        return Err(CurvError::InvalidParameter(
            "expected an operator on u(n)".into(),
        ));
    }
    Ok(r.algebra().n())
}

/// Zero-extension of an operator on u(n) to so(2n).
pub fn zero_extend(r: &SymOperator) -> Result<SymOperator> {
    let n = check_u_operator(r)?;
    let basis = kahler_basis(n)?;
    Ok(SymOperator::from_mat_unchecked(
        basis.so2n_alg.clone(),
        &basis.embed * r.mat() * basis.embed.transpose(),
    ))
}

/// Residual of the first Bianchi identity for the zero-extension; the
/// membership test for S²_K.
pub fn kahler_bianchi_residual(r: &SymOperator) -> Result<f64> {
    let n = check_u_operator(r)?;
    let ext = zero_extend(r)?;
    Ok(bianchi_residual_mat(2 * n, ext.mat()))
}

fn ricci_k_with(
    r: &SymOperator,
    embed: &DMatrix<f64>,
    so2n_alg: &Arc<MetricLieAlgebra>,
) -> Result<DMatrix<Complex64>> {
    let ext = SymOperator::from_mat_unchecked(
        so2n_alg.clone(),
        embed * r.mat() * embed.transpose(),
    );
    let ric = ext.ricci()?;
    let n = so2n_alg.n() / 2;
    // reassemble as Hermitian: S = [[A, −B],[B, A]] with H = A + iB
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let a = 0.5 * (ric[(i, j)] + ric[(i + n, j + n)]);
            let b = 0.5 * (ric[(i + n, j)] - ric[(j + n, i)]);
            h[(i, j)] = Complex64::new(a, b);
        }
    }
    Ok(h)
}

/// Ricci curvature of a Kähler operator as a Hermitian n×n matrix, through
/// the so(2n) contraction.
pub fn ricci_k(r: &SymOperator) -> Result<DMatrix<Complex64>> {
    let n = check_u_operator(r)?;
    let basis = kahler_basis(n)?;
    ricci_k_with(r, &basis.embed, &basis.so2n_alg)
}

/// Scalar curvature: trace of the real 2n-dimensional Ricci.
pub fn scal_k(r: &SymOperator) -> Result<f64> {
    let h = ricci_k(r)?;
    Ok(2.0 * h.trace().re)
}

/// l_s(R) = R + 2s·Ric(R)⋆id + s²·scal(R)·E.
pub fn l_s_kahler(r: &SymOperator, s: f64) -> Result<SymOperator> {
    let n = check_u_operator(r)?;
    let ric = ricci_k(r)?;
    let scal = 2.0 * ric.trace().re;
    let id = DMatrix::<Complex64>::identity(n, n);
    let term1 = star(&ric, &id)?;
    let e = e_operator(n)?;
    r.add(&term1.scale(2.0 * s))?.add(&e.scale(s * s * scal))
}

/// Inverse of l_s within S²_K.
pub fn l_s_kahler_inverse(r: &SymOperator, s: f64) -> Result<SymOperator> {
    let n = check_u_operator(r)?;
    let basis = kahler_basis(n)?;
    let m = basis.l_s_matrix(s);
    let coords = basis.coords_of(r);
    let sol = m
        .lu()
        .solve(&coords)
        .ok_or_else(|| CurvError::Singular(format!("l_s singular at s = {s}")))?;
    Ok(basis.op_from_coords(&sol))
}

/// D(s)(R) = l_s⁻¹(l_s(R)² + l_s(R)^#) − R² − R^#.
pub fn d_of_s(r: &SymOperator, s: f64) -> Result<SymOperator> {
    let ls = l_s_kahler(r, s)?;
    let x_ls = ls.square().add(&ls.sharp_adjoint()?)?;
    let pulled = l_s_kahler_inverse(&x_ls, s)?;
    let x_r = r.square().add(&r.sharp_adjoint()?)?;
    pulled.sub(&x_r)
}

/// Report for the derivative check d/ds D(s)(R)|₀ = 2·Ric(R)⋆Ric(R).
#[derive(Debug, Clone, serde::Serialize)]
pub struct LemmaKahlerReport {
    pub s_values: Vec<f64>,
    pub rel_errors: Vec<f64>,
    /// error ratio when s halves; ≈ 4 for second-order central differences
    pub ratios: Vec<f64>,
}

pub fn lemma_kaehler_check(r: &SymOperator, s_values: &[f64]) -> Result<LemmaKahlerReport> {
    let ric = ricci_k(r)?;
    let target = star(&ric, &ric)?.scale(2.0);
    let tnorm = target.norm().max(1e-300);
    let mut rel_errors = Vec::new();
    for &s in s_values {
        let dp = d_of_s(r, s)?;
        let dm = d_of_s(r, -s)?;
        let fd = dp.sub(&dm)?.scale(1.0 / (2.0 * s));
        rel_errors.push(fd.sub(&target)?.norm() / tnorm);
    }
    let mut ratios = Vec::new();
    for w in 0..s_values.len().saturating_sub(1) {
        // interpret consecutive entries as s and s/2
        if (s_values[w] / s_values[w + 1] - 2.0).abs() < 1e-9 {
            ratios.push(rel_errors[w] / rel_errors[w + 1].max(1e-300));
        }
    }
    Ok(LemmaKahlerReport {
        s_values: s_values.to_vec(),
        rel_errors,
        ratios,
    })
}

// ---------------------------------------------------------------------------
// Bochner operator
// ---------------------------------------------------------------------------

/// 𝓡 = Ric∧id − R̃ on so(2n), where R̃ is the zero-extension of R.
pub fn bochner(r: &SymOperator) -> Result<SymOperator> {
    let ext = zero_extend(r)?;
    let ric = ext.ricci()?;
    let wedge = ric_wedge_id(ext.algebra(), &ric)?;
    wedge.sub(&ext)
}

/// Off-block norm of an operator on so(2n) with respect to the
/// u(n) ⊕ u(n)^⊥ splitting; zero when the operator preserves u(n).
pub fn u_invariance_residual(op: &SymOperator) -> Result<f64> {
    let n2 = op.algebra().n();
    if op.algebra().name() != AlgebraName::So || n2 % 2 != 0 {
        return Err(CurvError::InvalidParameter(
            "expected an operator on so(2n)".into(),
        ));
    }
    let n = n2 / 2;
    let basis = kahler_basis(n)?;
    let e = &basis.embed;
    let d = op.dim();
    let proj_u = e * e.transpose();
    let proj_perp = DMatrix::identity(d, d) - &proj_u;
    Ok((&proj_perp * op.mat() * &proj_u).amax())
}

/// Direction of the Kähler form ω inside u(n) coordinates (i·Id, normalized).
pub fn kahler_form_coords(n: usize) -> DVector<f64> {
    let id = DMatrix::<Complex64>::identity(n, n) * Complex64::i();
    let v = liealg::u_matrix_to_coords(&id);
    let norm = v.norm();
    v / norm
}

/// Both sides of the eigenvector identity
/// 2⟨𝓡ω,ω⟩ = Σ_{j≠k}(λ_j−λ_k)²(K(v_j,v_k)+K(v_j,iv_k)),
/// evaluated independently from R for a unitary frame and weights λ.
/// Returns |lhs − rhs|.
pub fn bochner_formula_check(
    r: &SymOperator,
    frame: &DMatrix<Complex64>,
    lambda: &[f64],
) -> Result<f64> {
    let n = check_u_operator(r)?;
    if frame.nrows() != n || frame.ncols() != n || lambda.len() != n {
        return Err(CurvError::DimensionMismatch("frame/lambda sizes".into()));
    }
    // orthonormality of the unitary frame
    let gram = frame.adjoint() * frame;
    let id = DMatrix::<Complex64>::identity(n, n);
    let res = (&gram - &id).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if res > 1e-10 {
        return Err(CurvError::InvalidParameter(format!(
            "frame is not unitary (residual {res:.2e})"
        )));
    }
    let ext = zero_extend(r)?;
    let boch = bochner(r)?;
    let jmat = complex_structure(n);

    // real 2n-vectors of the frame columns
    let cols: Vec<DVector<f64>> = (0..n)
        .map(|j| {
            DVector::from_fn(2 * n, |i, _| {
                if i < n {
                    frame[(i, j)].re
                } else {
                    frame[(i - n, j)].im
                }
            })
        })
        .collect();

    let wedge = |a: &DVector<f64>, b: &DVector<f64>| -> DVector<f64> {
        let m = a * b.transpose() - b * a.transpose();
        liealg::so_matrix_to_coords(&m)
    };

    // ω = Σ λ_j v_j ∧ (J v_j)
    let mut omega = DVector::zeros(ext.dim());
    for j in 0..n {
        let jv = &jmat * &cols[j];
        omega += wedge(&cols[j], &jv) * lambda[j];
    }
    let lhs = 2.0 * (boch.mat() * &omega).dot(&omega);

    let sec = |a: &DVector<f64>, b: &DVector<f64>| -> f64 {
        let w = wedge(a, b);
        (ext.mat() * &w).dot(&w)
    };
    let mut rhs = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let jvk = &jmat * &cols[k];
            let dl = lambda[j] - lambda[k];
            rhs += dl * dl * (sec(&cols[j], &cols[k]) + sec(&cols[j], &jvk));
        }
    }
    Ok((lhs - rhs).abs())
}

// ---------------------------------------------------------------------------
// pair-Ricci (Claim 1) and the C₂(p) constraint
// ---------------------------------------------------------------------------

/// Minimum of Ric(v₁,v₁)+Ric(v₂,v₂) over Hermitian-orthonormal pairs
/// ℂv₁ ⊥ ℂv₂, which is the sum of the two smallest eigenvalues of the
/// Hermitian Ricci matrix.
pub fn claim1_min(r: &SymOperator) -> Result<f64> {
    let h = ricci_k(r)?;
    let ev = hermitian_eigenvalues(&h);
    if ev.len() < 2 {
        return Err(CurvError::InvalidParameter(
            "claim1 needs complex dimension >= 2".into(),
        ));
    }
    Ok(ev[0] + ev[1])
}

/// λ_min(Ric − p·scal/(2n)·id): nonnegative exactly on C₂(p).
pub fn c2p_margin(r: &SymOperator, p: f64) -> Result<f64> {
    let n = check_u_operator(r)?;
    let h = ricci_k(r)?;
    let scal = 2.0 * h.trace().re;
    let shifted = h - DMatrix::<Complex64>::identity(n, n)
        * Complex64::new(p * scal / (2.0 * n as f64), 0.0);
    Ok(hermitian_eigenvalues(&shifted)[0])
}
