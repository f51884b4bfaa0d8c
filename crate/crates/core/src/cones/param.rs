//! Explicit parametrizations of the Ad-invariant families.
//!
//! Each family maps a real parameter vector onto a constraint-satisfying
//! element of g⊗ℂ. Constraints are enforced by construction (wedges, outer
//! products, orthonormal frames, matrix exponentials), never by penalty.
//! Scale-invariant families return unit Hermitian norm elements.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::liealg::{
    self, expm_complex, gl_to_complexified, holomorphic_translation, join_semidirect,
    so_complex_coords, ComplexVector,
};

use super::FamilyKind;

/// Parameter-space description of one family.
pub struct Parametrization {
    pub kind: FamilyKind,
    pub n: usize,
    /// real parameter dimension
    pub dim: usize,
    /// cap on the norm of designated non-compact parameter blocks
    cap: f64,
    /// precomputed nilradical generators for NilpotentAll (in so(n,ℂ))
    nilradical: Vec<DMatrix<Complex64>>,
}

const TRACE1_CAP: f64 = 50.0;
const SHIFT_CAP: f64 = 1e3;
const EXP_CAP: f64 = 5.0;
const BOUNDED_NORM_CAP: f64 = 50.0;
const EIGENPAIR_NORM_CAP: f64 = 50.0;

impl Parametrization {
    pub fn new(kind: FamilyKind, n: usize) -> Self {
        let dso = n * (n - 1) / 2;
        let (dim, cap) = match kind {
            FamilyKind::FullSO => (2 * dso, f64::INFINITY),
            FamilyKind::TraceSquareZero => (2 * dso, f64::INFINITY),
            FamilyKind::NilpotentRank2 => (4 * n, f64::INFINITY),
            FamilyKind::Rank2CubeZero => (4 * n + 4, f64::INFINITY),
            FamilyKind::Rank2 => (4 * n, f64::INFINITY),
            FamilyKind::UnitEigen => (2 * dso, EXP_CAP),
            FamilyKind::BoundedEigen => (2 * dso, BOUNDED_NORM_CAP),
            FamilyKind::NilpotentAll => {
                let nil = nilradical_basis(n);
                let d = 2 * nil.len() + 2 * dso;
                return Self {
                    kind,
                    n,
                    dim: d,
                    cap: EXP_CAP,
                    nilradical: nil,
                };
            }
            FamilyKind::Rank2UnitEigenpair => (4 * n, EIGENPAIR_NORM_CAP),
            FamilyKind::KahlerRank1 => (4 * n, f64::INFINITY),
            FamilyKind::KahlerRank1Nilpotent => (4 * n, f64::INFINITY),
            FamilyKind::KahlerRank1Trace1 => (4 * n, TRACE1_CAP),
            FamilyKind::KahlerRank1Trace1Shifted(_) => (4 * n + 2, TRACE1_CAP),
            FamilyKind::HarnackBrendle => (4 * n + 4, f64::INFINITY),
            FamilyKind::HarnackKahler => (4 * n + 2, f64::INFINITY),
        };
        Self {
            kind,
            n,
            dim,
            cap,
            nilradical: Vec::new(),
        }
    }

    pub fn random_theta(&self, rng: &mut ChaCha8Rng) -> DVector<f64> {
        DVector::from_fn(self.dim, |_, _| {
            // Box-Muller normal
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        })
    }

    /// Map parameters onto a feasible element. `None` when the map degenerates
    /// (parallel vectors, vanishing wedge).
    pub fn value(&self, theta: &DVector<f64>) -> Option<ComplexVector> {
        let n = self.n;
        match self.kind {
            FamilyKind::FullSO => {
                let d = theta.len() / 2;
                let v = ComplexVector {
                    re: theta.rows(0, d).into_owned(),
                    im: theta.rows(d, d).into_owned(),
                };
                let nrm = v.norm();
                if nrm < 1e-12 {
                    return None;
                }
                Some(v.scale(Complex64::new(1.0 / nrm, 0.0)))
            }
            FamilyKind::TraceSquareZero => {
                let d = theta.len() / 2;
                let cols = [theta.rows(0, d).into_owned(), theta.rows(d, d).into_owned()];
                let q = gram_schmidt(&cols)?;
                let s = 1.0 / 2.0_f64.sqrt();
                Some(ComplexVector {
                    re: &q[0] * s,
                    im: &q[1] * s,
                })
            }
            FamilyKind::NilpotentRank2 => {
                let q = frame4(theta, n)?;
                let a = iso_vec(&q[0], &q[1]);
                let b = iso_vec(&q[2], &q[3]);
                let x = wedge_c(&a, &b);
                normalized_so_coords(&x)
            }
            FamilyKind::Rank2CubeZero => {
                let q = frame4(&theta.rows(0, 4 * n).into_owned(), n)?;
                let z = theta.rows(4 * n, 4).into_owned();
                let zn = z.norm();
                if zn < 1e-12 {
                    return None;
                }
                let z3 = Complex64::new(z[0], z[1]) / zn;
                let z4 = Complex64::new(z[2], z[3]) / zn;
                let a = iso_vec(&q[0], &q[1]);
                let b = cvec_scale(&real_to_c(&q[2]), z3) + cvec_scale(&real_to_c(&q[3]), z4);
                let x = wedge_c(&a, &b);
                normalized_so_coords(&x)
            }
            FamilyKind::Rank2 => {
                let (a, b) = two_cvecs(theta, n);
                let x = wedge_c(&a, &b);
                normalized_so_coords(&x)
            }
            FamilyKind::UnitEigen => {
                let d = theta.len() / 2;
                let s = ComplexVector {
                    re: theta.rows(0, d).into_owned(),
                    im: theta.rows(d, d).into_owned(),
                };
                let smat = liealg::so_complex_matrix(n, &s);
                let g = expm_complex(&smat);
                let j0 = standard_complex_structure_c(n);
                let x = &g * j0 * g.transpose();
                Some(so_complex_coords(&x))
            }
            FamilyKind::BoundedEigen => {
                let d = theta.len() / 2;
                let v = ComplexVector {
                    re: theta.rows(0, d).into_owned(),
                    im: theta.rows(d, d).into_owned(),
                };
                let x = liealg::so_complex_matrix(n, &v);
                let rho = spectral_radius(&x);
                let x = if rho > 1.0 {
                    x / Complex64::new(rho, 0.0)
                } else {
                    x
                };
                Some(so_complex_coords(&x))
            }
            FamilyKind::NilpotentAll => {
                let nn = self.nilradical.len();
                let mut y = DMatrix::<Complex64>::zeros(n, n);
                for (j, gen) in self.nilradical.iter().enumerate() {
                    let c = Complex64::new(theta[2 * j], theta[2 * j + 1]);
                    y += gen * c;
                }
                let d = (theta.len() - 2 * nn) / 2;
                let s = ComplexVector {
                    re: theta.rows(2 * nn, d).into_owned(),
                    im: theta.rows(2 * nn + d, d).into_owned(),
                };
                let g = expm_complex(&liealg::so_complex_matrix(n, &s));
                let x = &g * y * g.transpose();
                normalized_so_coords(&x)
            }
            FamilyKind::Rank2UnitEigenpair => {
                let (a, b) = two_cvecs(theta, n);
                let x = wedge_c(&a, &b);
                // X³ = (γ²−αβ)X on wedges; normalize the eigenvalue pair to ±1
                let alpha = bilinear(&a, &a);
                let beta = bilinear(&b, &b);
                let gamma = bilinear(&a, &b);
                let t = gamma * gamma - alpha * beta;
                if t.norm() < 1e-10 {
                    return None;
                }
                let x = x / t.sqrt();
                Some(so_complex_coords(&x))
            }
            FamilyKind::KahlerRank1 => {
                let (v, w) = two_cvecs(theta, n);
                let x = &v * w.transpose();
                normalized_gl_coords(&x)
            }
            FamilyKind::KahlerRank1Nilpotent => {
                let (v, u) = two_cvecs(theta, n);
                let vn2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
                if vn2 < 1e-18 {
                    return None;
                }
                // w ⊥_bilinear v, stably: w = u − conj(v)·(vᵀu)/‖v‖²
                let vdotu: Complex64 = v.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
                let w = &u - v.map(|z| z.conj()) * (vdotu / vn2);
                let x = &v * w.transpose();
                normalized_gl_coords(&x)
            }
            FamilyKind::KahlerRank1Trace1 => {
                let (v, u) = two_cvecs(theta, n);
                let x = trace1_matrix(&v, &u)?;
                Some(gl_to_complexified(&x))
            }
            FamilyKind::KahlerRank1Trace1Shifted(l) => {
                let (v, u) = two_cvecs(&theta.rows(0, 4 * n).into_owned(), n);
                let x = trace1_matrix(&v, &u)?;
                let zcap = l.min(SHIFT_CAP);
                let mut z = Complex64::new(theta[4 * n], theta[4 * n + 1]);
                if z.norm() > zcap {
                    z *= zcap / z.norm();
                }
                let shifted = x + DMatrix::<Complex64>::identity(n, n) * z;
                Some(gl_to_complexified(&shifted))
            }
            FamilyKind::HarnackBrendle => {
                let (a, b) = two_cvecs(&theta.rows(0, 4 * n).into_owned(), n);
                let alpha = Complex64::new(theta[4 * n], theta[4 * n + 1]);
                let beta = Complex64::new(theta[4 * n + 2], theta[4 * n + 3]);
                let x = wedge_c(&a, &b);
                let nrm = cmat_norm(&x);
                if nrm < 1e-10 {
                    return None;
                }
                let v = a * alpha + b * beta;
                let rot = so_complex_coords(&x);
                let tr = ComplexVector::from_complex(&v);
                let joined = join_semidirect(&rot, &tr);
                Some(joined.normalized())
            }
            FamilyKind::HarnackKahler => {
                let (a, b) = two_cvecs(&theta.rows(0, 4 * n).into_owned(), n);
                let alpha = Complex64::new(theta[4 * n], theta[4 * n + 1]);
                let x = &a * b.transpose();
                let nrm = cmat_norm(&x);
                if nrm < 1e-10 {
                    return None;
                }
                let rot = gl_to_complexified(&x);
                let tr = holomorphic_translation(&(a * alpha));
                let joined = join_semidirect(&rot, &tr);
                Some(joined.normalized())
            }
        }
    }

    /// Re-condition parameters after a gradient step.
    pub fn retract(&self, theta: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        match self.kind {
            FamilyKind::FullSO | FamilyKind::TraceSquareZero => renorm(theta, 1.0),
            FamilyKind::NilpotentRank2 | FamilyKind::Rank2 => renorm(theta, 2.0),
            FamilyKind::Rank2CubeZero => {
                let mut out = theta.clone();
                let frame = renorm(&theta.rows(0, 4 * n).into_owned(), 2.0);
                out.rows_mut(0, 4 * n).copy_from(&frame);
                let z = renorm(&theta.rows(4 * n, 4).into_owned(), 1.0);
                out.rows_mut(4 * n, 4).copy_from(&z);
                out
            }
            FamilyKind::UnitEigen => clamp_norm(theta, self.cap),
            FamilyKind::BoundedEigen => {
                // keep the resulting element norm under the cap
                if let Some(v) = self.value(theta) {
                    let nrm = v.norm();
                    if nrm > self.cap {
                        return theta * (self.cap / nrm);
                    }
                }
                theta.clone()
            }
            FamilyKind::NilpotentAll => {
                let nn = 2 * self.nilradical.len();
                let mut out = theta.clone();
                let c = renorm(&theta.rows(0, nn).into_owned(), 1.0);
                out.rows_mut(0, nn).copy_from(&c);
                let rest = clamp_norm(&theta.rows(nn, theta.len() - nn).into_owned(), self.cap);
                out.rows_mut(nn, theta.len() - nn).copy_from(&rest);
                out
            }
            FamilyKind::Rank2UnitEigenpair => {
                // normalize the raw wedge so the eigenvalue-normalizing division
                // measures distance to the nilpotent cone
                renorm(theta, 2.0)
            }
            FamilyKind::KahlerRank1 | FamilyKind::KahlerRank1Nilpotent => renorm(theta, 2.0),
            FamilyKind::KahlerRank1Trace1 => {
                let mut out = theta.clone();
                let v = renorm(&theta.rows(0, 2 * n).into_owned(), 1.0);
                out.rows_mut(0, 2 * n).copy_from(&v);
                let u = clamp_norm(&theta.rows(2 * n, 2 * n).into_owned(), self.cap);
                out.rows_mut(2 * n, 2 * n).copy_from(&u);
                out
            }
            FamilyKind::KahlerRank1Trace1Shifted(l) => {
                let mut out = theta.clone();
                let v = renorm(&theta.rows(0, 2 * n).into_owned(), 1.0);
                out.rows_mut(0, 2 * n).copy_from(&v);
                let u = clamp_norm(&theta.rows(2 * n, 2 * n).into_owned(), self.cap);
                out.rows_mut(2 * n, 2 * n).copy_from(&u);
                let zcap = l.min(SHIFT_CAP);
                let z = clamp_norm(&theta.rows(4 * n, 2).into_owned(), zcap);
                out.rows_mut(4 * n, 2).copy_from(&z);
                out
            }
            FamilyKind::HarnackBrendle | FamilyKind::HarnackKahler => renorm(theta, 2.0),
        }
    }

    /// How close the parameters are to the domain cap, in [0,1];
    /// 0 for compact or scale-invariant parametrizations.
    pub fn divergence_measure(&self, theta: &DVector<f64>) -> f64 {
        let n = self.n;
        match self.kind {
            FamilyKind::UnitEigen => theta.norm() / self.cap,
            FamilyKind::BoundedEigen => self
                .value(theta)
                .map(|v| v.norm() / self.cap)
                .unwrap_or(0.0),
            FamilyKind::KahlerRank1Trace1 => {
                theta.rows(2 * n, 2 * n).norm() / self.cap
            }
            FamilyKind::KahlerRank1Trace1Shifted(l) => {
                let udiv = theta.rows(2 * n, 2 * n).norm() / self.cap;
                if l.is_finite() {
                    udiv
                } else {
                    udiv.max(theta.rows(4 * n, 2).norm() / SHIFT_CAP)
                }
            }
            FamilyKind::Rank2UnitEigenpair => self
                .value(theta)
                .map(|v| v.norm() / self.cap)
                .unwrap_or(1.0),
            _ => 0.0,
        }
    }
}

// ---------------------------------------------------------------------------
// small helpers
// ---------------------------------------------------------------------------

fn renorm(v: &DVector<f64>, target: f64) -> DVector<f64> {
    let n = v.norm();
    if n < 1e-14 {
        v.clone()
    } else {
        v * (target / n)
    }
}

fn clamp_norm(v: &DVector<f64>, cap: f64) -> DVector<f64> {
    let n = v.norm();
    if n > cap {
        v * (cap / n)
    } else {
        v.clone()
    }
}

/// Modified Gram–Schmidt; `None` on near-degenerate input. Smooth away from
/// degeneracy, which keeps finite differences through it meaningful.
fn gram_schmidt(cols: &[DVector<f64>]) -> Option<Vec<DVector<f64>>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(cols.len());
    for c in cols {
        let mut v = c.clone();
        // two projection passes keep orthogonality at machine precision
        for _ in 0..2 {
            for q in &out {
                let ip = q.dot(&v);
                v -= q * ip;
            }
        }
        let n = v.norm();
        if n < 1e-9 * c.norm().max(1e-12) {
            return None;
        }
        out.push(v / n);
    }
    Some(out)
}

fn frame4(theta: &DVector<f64>, n: usize) -> Option<Vec<DVector<f64>>> {
    let cols: Vec<DVector<f64>> = (0..4).map(|j| theta.rows(j * n, n).into_owned()).collect();
    gram_schmidt(&cols)
}

fn real_to_c(v: &DVector<f64>) -> DVector<Complex64> {
    v.map(|x| Complex64::new(x, 0.0))
}

fn iso_vec(q1: &DVector<f64>, q2: &DVector<f64>) -> DVector<Complex64> {
    let s = 1.0 / 2.0_f64.sqrt();
    DVector::from_fn(q1.len(), |i, _| Complex64::new(q1[i] * s, q2[i] * s))
}

fn cvec_scale(v: &DVector<Complex64>, c: Complex64) -> DVector<Complex64> {
    v * c
}

fn two_cvecs(theta: &DVector<f64>, n: usize) -> (DVector<Complex64>, DVector<Complex64>) {
    let a = DVector::from_fn(n, |i, _| Complex64::new(theta[i], theta[n + i]));
    let b = DVector::from_fn(n, |i, _| Complex64::new(theta[2 * n + i], theta[3 * n + i]));
    (a, b)
}

fn wedge_c(a: &DVector<Complex64>, b: &DVector<Complex64>) -> DMatrix<Complex64> {
    a * b.transpose() - b * a.transpose()
}

fn bilinear(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn cmat_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalized_so_coords(x: &DMatrix<Complex64>) -> Option<ComplexVector> {
    let v = so_complex_coords(x);
    let n = v.norm();
    if n < 1e-10 {
        return None;
    }
    Some(v.scale(Complex64::new(1.0 / n, 0.0)))
}

fn normalized_gl_coords(x: &DMatrix<Complex64>) -> Option<ComplexVector> {
    let v = gl_to_complexified(x);
    let n = v.norm();
    if n < 1e-10 {
        return None;
    }
    Some(v.scale(Complex64::new(1.0 / n, 0.0)))
}

/// Rank-1 matrix with trace 1: v̂·wᵀ with w = conj(v̂) + (u − conj(v̂)(v̂ᵀu)).
fn trace1_matrix(v: &DVector<Complex64>, u: &DVector<Complex64>) -> Option<DMatrix<Complex64>> {
    let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if vn < 1e-12 {
        return None;
    }
    let vh = v / Complex64::new(vn, 0.0);
    let vdotu: Complex64 = vh.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
    let w = vh.map(|z| z.conj()) + u - vh.map(|z| z.conj()) * vdotu;
    Some(&vh * w.transpose())
}

/// J₀ as a complex matrix: block-diagonal rotation by 90 degrees.
fn standard_complex_structure_c(n: usize) -> DMatrix<Complex64> {
    debug_assert!(n % 2 == 0);
    let mut j = DMatrix::zeros(n, n);
    for k in 0..n / 2 {
        j[(2 * k, 2 * k + 1)] = Complex64::new(-1.0, 0.0);
        j[(2 * k + 1, 2 * k)] = Complex64::new(1.0, 0.0);
    }
    j
}

/// Spectral radius of a complex matrix via its complex Schur form.
/// (The real 2n-embedding has a doubly degenerate spectrum on which the
/// real QR iteration can stall, so it is avoided here.)
pub fn spectral_radius(m: &DMatrix<Complex64>) -> f64 {
    if let Some(schur) = m.clone().try_schur(1e-13, 5000) {
        let t = schur.unpack().1;
        return (0..t.nrows()).map(|i| t[(i, i)].norm()).fold(0.0, f64::max);
    }
    // rare non-convergence: break degeneracies with a tiny perturbation
    let scale = m.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    let mut pert = m.clone();
    let mut state = 0x9e3779b97f4a7c15_u64;
    for z in pert.iter_mut() {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let eps = ((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 1e-11 * scale;
        *z += Complex64::new(eps, eps);
    }
    let t = pert
        .try_schur(1e-12, 10000)
        .expect("perturbed Schur converges")
        .unpack()
        .1;
    (0..t.nrows()).map(|i| t[(i, i)].norm()).fold(0.0, f64::max)
}

/// Generators of the nilradical of a Borel subalgebra of so(n,ℂ), expressed
/// in the standard skew-matrix realization. Every nilpotent element of
/// so(n,ℂ) is SO(n,ℂ)-conjugate to a combination of these.
fn nilradical_basis(n: usize) -> Vec<DMatrix<Complex64>> {
    // Witt basis columns t_i with B(t_i, t_j) = δ_{i+j,n+1} (1-based)
    let m = n / 2;
    let s = Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    let i_c = Complex64::i();
    let mut t = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..m {
        // u_k = (e_{2k} + i e_{2k+1})/√2 in column k
        t[(2 * k, k)] = s;
        t[(2 * k + 1, k)] = s * i_c;
        // v_k = (e_{2k} − i e_{2k+1})/√2 in column n−1−k
        t[(2 * k, n - 1 - k)] = s;
        t[(2 * k + 1, n - 1 - k)] = -s * i_c;
    }
    if n % 2 == 1 {
        t[(n - 1, m)] = Complex64::new(1.0, 0.0);
    }
    let t_inv = t.clone().lu().try_inverse().expect("Witt basis invertible");

    let mut out = Vec::new();
    // strictly upper generators of so(K): E_ij − E_{n+1−j, n+1−i} (1-based),
    // for i<j with i+j < n+1
    for i in 0..n {
        for j in (i + 1)..n {
            if i + j + 2 < n + 1 {
                let mut y = DMatrix::<Complex64>::zeros(n, n);
                y[(i, j)] = Complex64::new(1.0, 0.0);
                y[(n - 1 - j, n - 1 - i)] = Complex64::new(-1.0, 0.0);
                let gen = &t * y * &t_inv;
                out.push(gen);
            }
        }
    }
    out
}
