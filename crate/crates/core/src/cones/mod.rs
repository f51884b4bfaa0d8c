//! Ad-invariant subsets S ⊂ g⊗ℂ and the membership oracle
//! min over unit-norm S of the Hermitian form R(v,v̄).
//!
//! Families are parametrized explicitly (see [`param`]) and minimized by
//! multistart projected gradient descent. The minimum over S decides
//! membership in C(S,h) = {R | R(v,v̄) ≥ h on S}.

mod optimize;
mod param;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;

use crate::curvop::{eigenvalues_sorted, SymOperator};
use crate::error::{CurvError, Result};
use crate::kahler;
use crate::liealg::{
    self, gl_from_complexified, so_complex_matrix, split_semidirect, translation_components,
    AlgebraName, ComplexVector, MetricLieAlgebra,
};

pub use optimize::OptimizerSettings;
use optimize::{minimize_start, StartOutcome};
use param::Parametrization;

/// The family catalogue. Rank and nilpotency constraints hold by
/// construction of the samplers and parametrizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyKind {
    /// all of so(n,ℂ)
    FullSO,
    /// {X ∈ so(n,ℂ) | tr(X²) = 0}
    TraceSquareZero,
    /// {X ∈ so(n,ℂ) | rank X = 2, X² = 0}: totally isotropic 2-planes
    NilpotentRank2,
    /// {X ∈ so(n,ℂ) | rank X = 2, X³ = 0}
    Rank2CubeZero,
    /// {X ∈ so(n,ℂ) | rank X = 2}
    Rank2,
    /// {X ∈ so(n,ℂ) | X² = −id}, n even
    UnitEigen,
    /// {X ∈ so(n,ℂ) | all eigenvalues have |λ| ≤ 1}
    BoundedEigen,
    /// {X ∈ so(n,ℂ) | Xⁿ = 0}
    NilpotentAll,
    /// {X ∈ so(n,ℂ) | rank X = 2, eigenvalues ±1}
    Rank2UnitEigenpair,
    /// {X ∈ gl(n,ℂ) | rank X = 1}
    KahlerRank1,
    /// {X ∈ gl(n,ℂ) | rank X = 1, X² = 0}
    KahlerRank1Nilpotent,
    /// {X ∈ gl(n,ℂ) | rank X = trace X = 1}
    KahlerRank1Trace1,
    /// {X + zI | rank X = trace X = 1, |z| < L}
    KahlerRank1Trace1Shifted(f64),
    /// {(A,v) ∈ iso(n,ℂ) | rank A = 2, v ∈ A(ℂⁿ)}
    HarnackBrendle,
    /// {(A,v,0) | A ∈ gl(n,ℂ), rank A = 1, v ∈ A(ℂⁿ)} in (u(n)⋉ℝ²ⁿ)⊗ℂ
    HarnackKahler,
}

impl FamilyKind {
    pub fn tag(&self) -> String {
        match self {
            FamilyKind::FullSO => "fullso".into(),
            FamilyKind::TraceSquareZero => "tracesq0".into(),
            FamilyKind::NilpotentRank2 => "nilrank2".into(),
            FamilyKind::Rank2CubeZero => "rank2cube0".into(),
            FamilyKind::Rank2 => "rank2".into(),
            FamilyKind::UnitEigen => "uniteigen".into(),
            FamilyKind::BoundedEigen => "boundedeigen".into(),
            FamilyKind::NilpotentAll => "nilpotent".into(),
            FamilyKind::Rank2UnitEigenpair => "rank2pm1".into(),
            FamilyKind::KahlerRank1 => "kahlerrank1".into(),
            FamilyKind::KahlerRank1Nilpotent => "kahlerrank1nil".into(),
            FamilyKind::KahlerRank1Trace1 => "kahlerrank1tr1".into(),
            FamilyKind::KahlerRank1Trace1Shifted(l) => {
                if l.is_finite() {
                    format!("kahlerrank1tr1shift:{l}")
                } else {
                    "kahlerrank1tr1shift:inf".into()
                }
            }
            FamilyKind::HarnackBrendle => "harnackbrendle".into(),
            FamilyKind::HarnackKahler => "harnackkahler".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if let Some(rest) = t.strip_prefix("kahlerrank1tr1shift:") {
            let l = if rest == "inf" {
                f64::INFINITY
            } else {
                rest.parse::<f64>().map_err(|_| {
                    CurvError::InvalidParameter(format!("bad shift bound '{rest}'"))
                })?
            };
            return Ok(FamilyKind::KahlerRank1Trace1Shifted(l));
        }
        Ok(match t.as_str() {
            "fullso" => FamilyKind::FullSO,
            "tracesq0" => FamilyKind::TraceSquareZero,
            "nilrank2" => FamilyKind::NilpotentRank2,
            "rank2cube0" => FamilyKind::Rank2CubeZero,
            "rank2" => FamilyKind::Rank2,
            "uniteigen" => FamilyKind::UnitEigen,
            "boundedeigen" => FamilyKind::BoundedEigen,
            "nilpotent" => FamilyKind::NilpotentAll,
            "rank2pm1" => FamilyKind::Rank2UnitEigenpair,
            "kahlerrank1" => FamilyKind::KahlerRank1,
            "kahlerrank1nil" => FamilyKind::KahlerRank1Nilpotent,
            "kahlerrank1tr1" => FamilyKind::KahlerRank1Trace1,
            "harnackbrendle" => FamilyKind::HarnackBrendle,
            "harnackkahler" => FamilyKind::HarnackKahler,
            other => {
                return Err(CurvError::UnsupportedFamily(format!(
                    "unknown family tag '{other}'"
                )))
            }
        })
    }

    pub fn scale_invariant(&self) -> bool {
        !matches!(
            self,
            FamilyKind::UnitEigen
                | FamilyKind::BoundedEigen
                | FamilyKind::Rank2UnitEigenpair
                | FamilyKind::KahlerRank1Trace1
                | FamilyKind::KahlerRank1Trace1Shifted(_)
        )
    }

    fn algebra_name(&self) -> AlgebraName {
        match self {
            FamilyKind::FullSO
            | FamilyKind::TraceSquareZero
            | FamilyKind::NilpotentRank2
            | FamilyKind::Rank2CubeZero
            | FamilyKind::Rank2
            | FamilyKind::UnitEigen
            | FamilyKind::BoundedEigen
            | FamilyKind::NilpotentAll
            | FamilyKind::Rank2UnitEigenpair => AlgebraName::So,
            FamilyKind::KahlerRank1
            | FamilyKind::KahlerRank1Nilpotent
            | FamilyKind::KahlerRank1Trace1
            | FamilyKind::KahlerRank1Trace1Shifted(_) => AlgebraName::U,
            FamilyKind::HarnackBrendle => AlgebraName::Iso,
            FamilyKind::HarnackKahler => AlgebraName::UIso,
        }
    }

    /// Whether the membership certificates use the coadjoint form of ad.
    pub fn uses_coadjoint(&self) -> bool {
        matches!(self, FamilyKind::HarnackBrendle | FamilyKind::HarnackKahler)
    }
}

/// A family instantiated on a concrete algebra.
pub struct ConeFamily {
    kind: FamilyKind,
    n: usize,
    algebra: Arc<MetricLieAlgebra>,
    param: Parametrization,
}

impl ConeFamily {
    pub fn new(kind: FamilyKind, n: usize) -> Result<Self> {
        let min_n: usize = match kind {
            FamilyKind::FullSO | FamilyKind::Rank2 | FamilyKind::Rank2UnitEigenpair => 2,
            FamilyKind::TraceSquareZero | FamilyKind::NilpotentAll => 3,
            FamilyKind::NilpotentRank2 | FamilyKind::Rank2CubeZero => 4,
            FamilyKind::UnitEigen | FamilyKind::BoundedEigen => 2,
            FamilyKind::KahlerRank1
            | FamilyKind::KahlerRank1Trace1
            | FamilyKind::KahlerRank1Trace1Shifted(_) => 1,
            FamilyKind::KahlerRank1Nilpotent => 2,
            FamilyKind::HarnackBrendle => 2,
            FamilyKind::HarnackKahler => 1,
        };
        if n < min_n {
            return Err(CurvError::InvalidParameter(format!(
                "family {} needs n >= {min_n}, got {n}",
                kind.tag()
            )));
        }
        if matches!(kind, FamilyKind::UnitEigen) && n % 2 != 0 {
            return Err(CurvError::InvalidParameter(
                "uniteigen needs even n (orthogonal complex structures)".into(),
            ));
        }
        if let FamilyKind::KahlerRank1Trace1Shifted(l) = kind {
            if !(l > 0.0) {
                return Err(CurvError::InvalidParameter(
                    "shift bound L must be positive".into(),
                ));
            }
        }
        let algebra = liealg::shared(kind.algebra_name(), n)?;
        let param = Parametrization::new(kind, n);
        Ok(Self {
            kind,
            n,
            algebra,
            param,
        })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn algebra(&self) -> &Arc<MetricLieAlgebra> {
        &self.algebra
    }

    pub fn scale_invariant(&self) -> bool {
        self.kind.scale_invariant()
    }

    /// Constraint-satisfying sample; unit Hermitian norm for scale-invariant
    /// families.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> ComplexVector {
        loop {
            let theta = self.param.random_theta(rng);
            if let Some(v) = self.param.value(&theta) {
                return v;
            }
        }
    }

    pub fn sample_theta(&self, rng: &mut ChaCha8Rng) -> DVector<f64> {
        self.param.random_theta(rng)
    }

    pub fn value_of_theta(&self, theta: &DVector<f64>) -> Option<ComplexVector> {
        self.param.value(theta)
    }

    /// Max violation of the family's defining constraints, scale-free.
    pub fn constraint_residual(&self, v: &ComplexVector) -> f64 {
        let n = self.n;
        match self.kind {
            FamilyKind::FullSO => 0.0,
            FamilyKind::TraceSquareZero => {
                let x = so_complex_matrix(n, v);
                let tr2 = (&x * &x).trace();
                tr2.norm() / v.norm_sq().max(1e-300)
            }
            FamilyKind::NilpotentRank2 => {
                let x = so_complex_matrix(n, v);
                let nrm2 = cmat_norm(&x).powi(2);
                let sq = cmat_norm(&(&x * &x)) / nrm2.max(1e-300);
                sq.max(rank_gap(&x, 2))
            }
            FamilyKind::Rank2CubeZero => {
                let x = so_complex_matrix(n, v);
                let nrm3 = cmat_norm(&x).powi(3);
                let cube = cmat_norm(&(&x * &x * &x)) / nrm3.max(1e-300);
                cube.max(rank_gap(&x, 2))
            }
            FamilyKind::Rank2 => {
                let x = so_complex_matrix(n, v);
                rank_gap(&x, 2)
            }
            FamilyKind::UnitEigen => {
                let x = so_complex_matrix(n, v);
                let id = DMatrix::<Complex64>::identity(n, n);
                cmat_norm(&(&x * &x + id)) / (1.0 + cmat_norm(&x).powi(2))
            }
            FamilyKind::BoundedEigen => {
                let x = so_complex_matrix(n, v);
                (param::spectral_radius(&x) - 1.0).max(0.0)
            }
            FamilyKind::NilpotentAll => {
                let x = so_complex_matrix(n, v);
                let s1 = singular_values_desc(&x)[0].max(1e-300);
                let xh = x / Complex64::new(s1, 0.0);
                let mut p = xh.clone();
                for _ in 1..n {
                    p = &p * &xh;
                }
                cmat_norm(&p)
            }
            FamilyKind::Rank2UnitEigenpair => {
                let x = so_complex_matrix(n, v);
                let x3 = &x * &x * &x;
                let diff = &x3 - &x;
                cmat_norm(&diff) / cmat_norm(&x).max(1e-300)
            }
            FamilyKind::KahlerRank1 => {
                let a = gl_from_complexified(n, v);
                rank_gap(&a, 1)
            }
            FamilyKind::KahlerRank1Nilpotent => {
                let a = gl_from_complexified(n, v);
                let tr = a.trace().norm() / cmat_norm(&a).max(1e-300);
                rank_gap(&a, 1).max(tr)
            }
            FamilyKind::KahlerRank1Trace1 => {
                let a = gl_from_complexified(n, v);
                let tr = (a.trace() - Complex64::new(1.0, 0.0)).norm();
                rank_gap(&a, 1).max(tr)
            }
            FamilyKind::KahlerRank1Trace1Shifted(l) => {
                let a = gl_from_complexified(n, v);
                let z = (a.trace() - Complex64::new(1.0, 0.0)) / Complex64::new(n as f64, 0.0);
                let x = &a - DMatrix::<Complex64>::identity(n, n) * z;
                let zres = if l.is_finite() {
                    (z.norm() - l).max(0.0)
                } else {
                    0.0
                };
                rank_gap(&x, 1).max(zres)
            }
            FamilyKind::HarnackBrendle => {
                let (rot, tr) = split_semidirect(&self.algebra, v);
                let a = so_complex_matrix(n, &rot);
                let trans = tr.to_complex();
                let im_dist = column_space_distance(&a, &trans);
                rank_gap(&a, 2).max(im_dist)
            }
            FamilyKind::HarnackKahler => {
                let (rot, tr) = split_semidirect(&self.algebra, v);
                let a = gl_from_complexified(n, &rot);
                let (hol, antihol) = translation_components(&tr);
                let anti = antihol.norm() / tr.norm().max(1e-300);
                let im_dist = column_space_distance(&a, &hol);
                rank_gap(&a, 1).max(anti).max(im_dist)
            }
        }
    }

    /// The analytic boundary-at-infinity table.
    pub fn boundary_at_infinity(&self) -> Result<ConeFamily> {
        let target = match self.kind {
            FamilyKind::KahlerRank1Trace1 => FamilyKind::KahlerRank1Nilpotent,
            FamilyKind::KahlerRank1Trace1Shifted(l) if l.is_finite() => {
                FamilyKind::KahlerRank1Nilpotent
            }
            FamilyKind::UnitEigen => FamilyKind::NilpotentRank2,
            FamilyKind::BoundedEigen => FamilyKind::NilpotentAll,
            FamilyKind::Rank2UnitEigenpair => FamilyKind::Rank2CubeZero,
            other => {
                return Err(CurvError::UnsupportedFamily(format!(
                    "no boundary-at-infinity entry for {}",
                    other.tag()
                )))
            }
        };
        ConeFamily::new(target, self.n)
    }
}

fn cmat_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular values via the real 2n-embedding (full floating-point accuracy,
/// unlike the A†A route), descending. Each value of A appears twice in the
/// embedding.
fn singular_values_desc(m: &DMatrix<Complex64>) -> Vec<f64> {
    let r = liealg::realify(m);
    let svd = r.svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv.into_iter().step_by(2).collect()
}

/// σ_{r+1}/σ_1: zero when rank(A) ≤ r.
fn rank_gap(m: &DMatrix<Complex64>, r: usize) -> f64 {
    let sv = singular_values_desc(m);
    if sv.len() <= r || sv[0] < 1e-300 {
        return 0.0;
    }
    sv[r] / sv[0]
}

/// Hermitian distance of v to the column space of A, relative to ‖v‖.
fn column_space_distance(a: &DMatrix<Complex64>, v: &DVector<Complex64>) -> f64 {
    let vn = v.norm();
    if vn < 1e-12 {
        return 0.0;
    }
    let scale = a.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    for j in 0..a.ncols() {
        let mut col = a.column(j).into_owned();
        for q in &basis {
            let ip: Complex64 = q.iter().zip(col.iter()).map(|(x, y)| x.conj() * y).sum();
            col -= q * ip;
        }
        let n = col.norm();
        if n > 1e-8 * scale.max(1e-300) {
            basis.push(col / Complex64::new(n, 0.0));
        }
    }
    let mut res = v.clone();
    for q in &basis {
        let ip: Complex64 = q.iter().zip(res.iter()).map(|(x, y)| x.conj() * y).sum();
        res -= q * ip;
    }
    res.norm() / vn
}

// ---------------------------------------------------------------------------
// the membership oracle
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct MinFormOptions {
    pub starts: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub seed: u64,
    /// membership threshold used for the in_cone flag
    pub h: f64,
    /// membership tolerance; default 1e−7·(1+‖R‖)
    pub tol: Option<f64>,
    /// extra start points (e.g. the previous argmin along a trajectory)
    pub warm_thetas: Vec<DVector<f64>>,
}

impl MinFormOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            starts: 32,
            max_iters: 500,
            grad_tol: 1e-8,
            seed,
            h: 0.0,
            tol: None,
            warm_thetas: Vec::new(),
        }
    }

    pub fn starts(mut self, n: usize) -> Self {
        self.starts = n;
        self
    }

    pub fn h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }
}

/// Result of minimizing R(v,v̄) over a family.
#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    pub family: String,
    pub min_value: f64,
    pub argmin: ComplexVector,
    pub h: f64,
    pub in_cone: bool,
    pub n_starts: usize,
    pub converged_fraction: f64,
    /// best argmin sits near the parameter-domain cap: the infimum may not
    /// be attained (boundary at infinity)
    pub diverged: bool,
    pub constraint_residual: f64,
    pub warning: Option<String>,
    #[serde(skip)]
    pub argmin_theta: Option<DVector<f64>>,
}

/// Multistart minimization of the Hermitian form over the family.
pub fn min_form(
    r: &SymOperator,
    family: &ConeFamily,
    opts: &MinFormOptions,
) -> Result<MembershipReport> {
    if !r.algebra().same_as(&family.algebra) {
        return Err(CurvError::DimensionMismatch(format!(
            "operator on {}({}) vs family on {}({})",
            r.algebra().name().as_str(),
            r.algebra().n(),
            family.algebra.name().as_str(),
            family.n
        )));
    }
    let settings = OptimizerSettings {
        max_iters: opts.max_iters,
        grad_tol: opts.grad_tol,
    };
    let objective = |theta: &DVector<f64>| -> Option<f64> {
        family.param.value(theta).map(|v| r.hermitian_form(&v))
    };
    // Rayleigh-quotient gradient on the full algebra; other families use
    // central differences through their constraint maps.
    let rayleigh_grad = |theta: &DVector<f64>| -> DVector<f64> {
        let d = theta.len() / 2;
        let re = theta.rows(0, d).into_owned();
        let im = theta.rows(d, d).into_owned();
        let rre = r.mat() * &re;
        let rim = r.mat() * &im;
        let nsq = theta.norm_squared().max(1e-300);
        let f = (rre.dot(&re) + rim.dot(&im)) / nsq;
        let mut g = DVector::zeros(theta.len());
        g.rows_mut(0, d).copy_from(&(&rre - &re * f));
        g.rows_mut(d, d).copy_from(&(&rim - &im * f));
        g * (2.0 / nsq)
    };
    let use_rayleigh = matches!(family.kind, FamilyKind::FullSO);
    let total = opts.starts.max(opts.warm_thetas.len().min(opts.starts).max(1));
    let outcomes: Vec<StartOutcome> = (0..total)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(s as u64));
            let theta0 = if s < opts.warm_thetas.len() {
                opts.warm_thetas[s].clone()
            } else {
                family.param.random_theta(&mut rng)
            };
            minimize_start(
                &family.param,
                &objective,
                if use_rayleigh { Some(&rayleigh_grad) } else { None },
                &theta0,
                &mut rng,
                &settings,
            )
        })
        .collect();

    if std::env::var("CURVCONE_DEBUG_OPT").is_ok() {
        for (i, o) in outcomes.iter().enumerate().take(4) {
            eprintln!(
                "start {i}: value {:.3e} gn {:.3e} iters {} conv {}",
                o.value, o.grad_norm, o.iters, o.converged
            );
        }
    }
    let mut best: Option<&StartOutcome> = None;
    for o in &outcomes {
        let v = if o.value.is_nan() {
            f64::INFINITY
        } else {
            o.value
        };
        if best.map_or(true, |b| v < b.value) {
            best = Some(o);
        }
    }
    let best = best.expect("at least one start");
    let converged = outcomes.iter().filter(|o| o.converged).count();
    let converged_fraction = converged as f64 / outcomes.len() as f64;

    let argmin = family
        .param
        .value(&best.theta)
        .ok_or_else(|| CurvError::OptimizerFailure("best start degenerated".into()))?;
    let min_value = r.hermitian_form(&argmin);
    let tol = opts.tol.unwrap_or(1e-7 * (1.0 + r.norm()));
    let diverged = best.divergence > 0.95;
    let warning = if converged == 0 {
        Some("no start converged to the gradient tolerance".to_string())
    } else if diverged {
        Some("argmin at the parameter-domain cap; infimum may not be attained".to_string())
    } else {
        None
    };
    Ok(MembershipReport {
        family: family.kind.tag(),
        min_value,
        constraint_residual: family.constraint_residual(&argmin),
        argmin,
        h: opts.h,
        in_cone: min_value >= opts.h - tol,
        n_starts: outcomes.len(),
        converged_fraction,
        diverged,
        warning,
        argmin_theta: Some(best.theta.clone()),
    })
}

/// Closed forms used to cross-check the optimizer.
pub fn closed_form_min(r: &SymOperator, family: &ConeFamily) -> Result<f64> {
    match family.kind {
        FamilyKind::FullSO => Ok(eigenvalues_sorted(r.mat())[0]),
        FamilyKind::TraceSquareZero => {
            let ev = eigenvalues_sorted(r.mat());
            Ok(0.5 * (ev[0] + ev[1]))
        }
        other => Err(CurvError::UnsupportedFamily(format!(
            "no closed form for {}",
            other.tag()
        ))),
    }
}

/// Membership R ∈ C(S,h) with tolerance.
pub fn in_cone(
    r: &SymOperator,
    family: &ConeFamily,
    h: f64,
    tol: Option<f64>,
    opts: &MinFormOptions,
) -> Result<(bool, MembershipReport)> {
    let mut o = opts.clone();
    o.h = h;
    o.tol = tol.or(opts.tol);
    let rep = min_form(r, family, &o)?;
    Ok((rep.in_cone, rep))
}

/// Minimum of R(v,v̄) + h₂·|tr(v_gl)|² over a Kähler family. Since
/// |tr(v)|² is the Hermitian form of E − id, this is min_form of the shifted
/// operator R + h₂(E − id).
pub fn generalized_margin(
    r: &SymOperator,
    family: &ConeFamily,
    h2: f64,
    opts: &MinFormOptions,
) -> Result<MembershipReport> {
    if family.algebra.name() != AlgebraName::U {
        return Err(CurvError::UnsupportedFamily(
            "generalized margin requires a Kähler family".into(),
        ));
    }
    let e = kahler::e_operator(family.n)?;
    let id = SymOperator::identity(family.algebra.clone());
    let shifted = r.add(&e.sub(&id)?.scale(h2))?;
    min_form(&shifted, family, opts)
}

/// R + c·I with c chosen so the membership margin equals `margin`.
/// Valid for unit-normalized scale-invariant families, where the identity
/// has Hermitian form 1 on every sample.
pub fn shift_into_cone(
    r: &SymOperator,
    family: &ConeFamily,
    margin: f64,
    opts: &MinFormOptions,
) -> Result<SymOperator> {
    if !family.scale_invariant() {
        return Err(CurvError::UnsupportedFamily(format!(
            "shift_into_cone needs a scale-invariant family, got {}",
            family.kind.tag()
        )));
    }
    let rep = min_form(r, family, opts)?;
    let c = margin - rep.min_value;
    r.add(&SymOperator::identity(r.algebra().clone()).scale(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvop::{model_operator, random_group_adjoint, ModelOperatorTag};
    use approx::assert_relative_eq;
    use rand::Rng;

    fn opts(seed: u64) -> MinFormOptions {
        MinFormOptions::with_seed(seed)
    }

    fn so_alg(n: usize) -> Arc<MetricLieAlgebra> {
        liealg::shared(AlgebraName::So, n).unwrap()
    }

    #[test]
    fn samples_satisfy_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let families = [
            (FamilyKind::FullSO, 5),
            (FamilyKind::TraceSquareZero, 5),
            (FamilyKind::NilpotentRank2, 6),
            (FamilyKind::Rank2CubeZero, 5),
            (FamilyKind::Rank2, 5),
            (FamilyKind::UnitEigen, 4),
            (FamilyKind::BoundedEigen, 4),
            (FamilyKind::NilpotentAll, 5),
            (FamilyKind::Rank2UnitEigenpair, 4),
            (FamilyKind::KahlerRank1, 3),
            (FamilyKind::KahlerRank1Nilpotent, 3),
            (FamilyKind::KahlerRank1Trace1, 3),
            (FamilyKind::KahlerRank1Trace1Shifted(2.0), 3),
            (FamilyKind::HarnackBrendle, 4),
            (FamilyKind::HarnackKahler, 2),
        ];
        for (kind, n) in families {
            let fam = ConeFamily::new(kind, n).unwrap();
            for _ in 0..20 {
                let v = fam.sample(&mut rng);
                let res = fam.constraint_residual(&v);
                assert!(
                    res < 1e-10,
                    "sample violates constraints for {} (residual {res:.2e})",
                    kind.tag()
                );
                if fam.scale_invariant() {
                    assert_relative_eq!(v.norm(), 1.0, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn family_constructor_rejects_degenerate() {
        assert!(ConeFamily::new(FamilyKind::NilpotentRank2, 3).is_err());
        assert!(ConeFamily::new(FamilyKind::UnitEigen, 5).is_err());
        assert!(ConeFamily::new(FamilyKind::TraceSquareZero, 2).is_err());
        assert!(ConeFamily::new(FamilyKind::KahlerRank1Trace1Shifted(-1.0), 2).is_err());
    }

    #[test]
    fn fullso_matches_lambda_min() {
        let fam = ConeFamily::new(FamilyKind::FullSO, 5).unwrap();
        let alg = so_alg(5);
        let id = SymOperator::identity(alg.clone());
        let rep = min_form(&id, &fam, &opts(1)).unwrap();
        assert_relative_eq!(rep.min_value, 1.0, epsilon = 1e-8);

        let cyl = model_operator(ModelOperatorTag::SphereCrossLine(5)).unwrap();
        let rep = min_form(&cyl, &fam, &opts(2)).unwrap();
        assert!(rep.min_value.abs() < 1e-8);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..5 {
            let r = SymOperator::random(alg.clone(), &mut rng);
            let rep = min_form(&r, &fam, &opts(100 + trial)).unwrap();
            let lam = closed_form_min(&r, &fam).unwrap();
            assert!(
                (rep.min_value - lam).abs() < 1e-7,
                "min {} vs eigen {}",
                rep.min_value,
                lam
            );
            assert!(rep.converged_fraction > 0.5);
        }
    }

    #[test]
    fn trace_square_zero_closed_form_and_oracle() {
        let fam = ConeFamily::new(FamilyKind::TraceSquareZero, 5).unwrap();
        let alg = so_alg(5);
        let id = SymOperator::identity(alg.clone());
        assert_relative_eq!(closed_form_min(&id, &fam).unwrap(), 1.0, epsilon = 1e-14);
        let rep = min_form(&id, &fam, &opts(4)).unwrap();
        assert_relative_eq!(rep.min_value, 1.0, epsilon = 1e-8);

        // dense random-search oracle with local refinement validates the
        // closed form (λ₁+λ₂)/2 before it is trusted
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = SymOperator::random(alg.clone(), &mut rng);
        let mut best = f64::INFINITY;
        for _ in 0..100_000 {
            let v = fam.sample(&mut rng);
            best = best.min(r.hermitian_form(&v));
        }
        let rep = min_form(&r, &fam, &opts(6)).unwrap();
        let cf = closed_form_min(&r, &fam).unwrap();
        assert!(rep.min_value <= best + 1e-9, "optimizer above random search");
        assert!((rep.min_value - cf).abs() < 1e-6, "optimizer vs closed form");
        assert!(best - cf < 0.5, "random search sanity");
    }

    #[test]
    fn in_cone_basics() {
        let fam = ConeFamily::new(FamilyKind::FullSO, 4).unwrap();
        let alg = so_alg(4);
        let id = SymOperator::identity(alg.clone());
        let (ok, _) = in_cone(&id, &fam, 0.0, None, &opts(7)).unwrap();
        assert!(ok);
        let (bad, rep) = in_cone(&id.scale(-1.0), &fam, 0.0, None, &opts(8)).unwrap();
        assert!(!bad);
        assert!(rep.min_value < -0.9);

        // S^{n−1}×ℝ satisfies C(S,0) strictly for S = {X² = −id}, n even
        let cyl = model_operator(ModelOperatorTag::SphereCrossLine(4)).unwrap();
        let unit = ConeFamily::new(FamilyKind::UnitEigen, 4).unwrap();
        let rep = min_form(&cyl, &unit, &opts(9)).unwrap();
        assert!(
            rep.min_value > 1e-3,
            "cylinder should be strictly inside: min {}",
            rep.min_value
        );
    }

    #[test]
    fn monotone_under_identity_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let fam = ConeFamily::new(FamilyKind::NilpotentRank2, 5).unwrap();
        let r = SymOperator::random(so_alg(5), &mut rng);
        let c = 0.7;
        let shifted = r
            .add(&SymOperator::identity(r.algebra().clone()).scale(c))
            .unwrap();
        let m1 = min_form(&r, &fam, &opts(11)).unwrap().min_value;
        let m2 = min_form(&shifted, &fam, &opts(11)).unwrap().min_value;
        assert!((m2 - m1 - c).abs() < 1e-7, "m1 {m1}, m2 {m2}");
    }

    #[test]
    fn orbit_invariance_of_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for (kind, n) in [
            (FamilyKind::NilpotentRank2, 4),
            (FamilyKind::KahlerRank1, 2),
        ] {
            let fam = ConeFamily::new(kind, n).unwrap();
            let r = SymOperator::random(fam.algebra().clone(), &mut rng);
            let ad = random_group_adjoint(fam.algebra(), &mut rng);
            let m1 = min_form(&r, &fam, &opts(13)).unwrap().min_value;
            let m2 = min_form(&r.conjugate(&ad), &fam, &opts(14)).unwrap().min_value;
            assert!(
                (m1 - m2).abs() < 1e-6,
                "orbit invariance broken for {}: {m1} vs {m2}",
                kind.tag()
            );
        }
    }

    #[test]
    fn complex_orbit_constraint_stability() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for (kind, n) in [
            (FamilyKind::NilpotentRank2, 5),
            (FamilyKind::Rank2CubeZero, 5),
            (FamilyKind::Rank2, 4),
            (FamilyKind::KahlerRank1, 3),
            (FamilyKind::KahlerRank1Nilpotent, 3),
            (FamilyKind::HarnackBrendle, 4),
            (FamilyKind::HarnackKahler, 2),
        ] {
            let fam = ConeFamily::new(kind, n).unwrap();
            let alg = fam.algebra().clone();
            for _ in 0..5 {
                let v = fam.sample(&mut rng);
                let d = alg.dim();
                let x = ComplexVector {
                    re: DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0)),
                    im: DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0)),
                }
                .normalized();
                let gen = if kind.uses_coadjoint() {
                    alg.complex_adtr_rep_matrix(&x).unwrap()
                } else {
                    alg.complex_ad_matrix(&x).unwrap()
                };
                for t in [0.1_f64, 1.0] {
                    let flow = liealg::expm_complex(&(&gen * Complex64::new(t, 0.0)));
                    let w = ComplexVector::from_complex(&(&flow * v.to_complex()));
                    let res = fam.constraint_residual(&w);
                    assert!(
                        res < 1e-8,
                        "orbit leaves {} at t={t}: residual {res:.2e}",
                        kind.tag()
                    );
                }
            }
        }
    }

    #[test]
    fn generalized_margin_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let n = 2;
        let basis = kahler::kahler_basis(n).unwrap();
        let r = basis.random_kahler(&mut rng);

        let nil = ConeFamily::new(FamilyKind::KahlerRank1Nilpotent, n).unwrap();
        let m0 = generalized_margin(&r, &nil, 0.0, &opts(17)).unwrap().min_value;
        let plain = min_form(&r, &nil, &opts(17)).unwrap().min_value;
        assert!((m0 - plain).abs() < 1e-9, "h2=0 equals min_form");
        // trace vanishes on the nilpotent family: margin independent of h2
        let m1 = generalized_margin(&r, &nil, 3.0, &opts(17)).unwrap().min_value;
        assert!((m1 - m0).abs() < 1e-7, "{m1} vs {m0}");

        // |trace|² = 1 on the trace-one family: margin shifts by exactly h2
        let tr1 = ConeFamily::new(FamilyKind::KahlerRank1Trace1, n).unwrap();
        let b0 = generalized_margin(&r, &tr1, 0.0, &opts(18)).unwrap().min_value;
        let b1 = generalized_margin(&r, &tr1, 0.5, &opts(18)).unwrap().min_value;
        assert!((b1 - b0 - 0.5).abs() < 1e-6, "b0 {b0}, b1 {b1}");

        // rejects non-Kähler families
        let so_fam = ConeFamily::new(FamilyKind::FullSO, 4).unwrap();
        let so_r = SymOperator::identity(so_alg(4));
        assert!(generalized_margin(&so_r, &so_fam, 1.0, &opts(19)).is_err());
    }

    #[test]
    fn shift_into_cone_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let fam = ConeFamily::new(FamilyKind::FullSO, 4).unwrap();
        let alg = so_alg(4);
        let r = SymOperator::random(alg.clone(), &mut rng);
        let shifted = shift_into_cone(&r, &fam, 0.0, &opts(21)).unwrap();
        let rep = min_form(&shifted, &fam, &opts(22)).unwrap();
        assert!(rep.min_value.abs() < 1e-7, "margin {}", rep.min_value);

        // margin 1 on R = 0 is the identity
        let zero = SymOperator::zero(alg.clone());
        let one = shift_into_cone(&zero, &fam, 1.0, &opts(23)).unwrap();
        assert!((one.mat() - DMatrix::<f64>::identity(6, 6)).amax() < 1e-7);

        // idempotence: re-shifting an on-boundary operator changes nothing
        let again = shift_into_cone(&shifted, &fam, 0.0, &opts(24)).unwrap();
        assert!((again.mat() - shifted.mat()).amax() < 1e-7);

        // rejected for non-scale-invariant families
        let tr1 = ConeFamily::new(FamilyKind::KahlerRank1Trace1, 2).unwrap();
        let basis = kahler::kahler_basis(2).unwrap();
        let rk = basis.random_kahler(&mut rng);
        assert!(shift_into_cone(&rk, &tr1, 0.0, &opts(25)).is_err());
    }

    #[test]
    fn boundary_at_infinity_table() {
        let t = |k: FamilyKind, n: usize| {
            ConeFamily::new(k, n)
                .unwrap()
                .boundary_at_infinity()
                .map(|f| f.kind())
        };
        assert_eq!(
            t(FamilyKind::KahlerRank1Trace1, 2).unwrap(),
            FamilyKind::KahlerRank1Nilpotent
        );
        assert_eq!(
            t(FamilyKind::KahlerRank1Trace1Shifted(2.0), 2).unwrap(),
            FamilyKind::KahlerRank1Nilpotent
        );
        assert_eq!(t(FamilyKind::UnitEigen, 4).unwrap(), FamilyKind::NilpotentRank2);
        assert_eq!(t(FamilyKind::BoundedEigen, 4).unwrap(), FamilyKind::NilpotentAll);
        assert_eq!(
            t(FamilyKind::Rank2UnitEigenpair, 4).unwrap(),
            FamilyKind::Rank2CubeZero
        );
        assert!(t(FamilyKind::FullSO, 4).is_err());
        assert!(t(FamilyKind::KahlerRank1Trace1Shifted(f64::INFINITY), 2).is_err());

        // sampling oracle: scaling source samples toward zero kills the
        // nilpotency-type quantities that define the target
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let fam = ConeFamily::new(FamilyKind::UnitEigen, 4).unwrap();
        for _ in 0..100 {
            let v = fam.sample(&mut rng);
            let x = so_complex_matrix(4, &v);
            for lam in [1e-2_f64, 1e-4] {
                let xs = &x * Complex64::new(lam, 0.0);
                let sq = (&xs * &xs).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                assert!(sq < 10.0 * lam * lam * (1.0 + cmat_norm(&x).powi(2)));
            }
        }
    }

    #[test]
    fn family_tag_roundtrip() {
        for kind in [
            FamilyKind::FullSO,
            FamilyKind::TraceSquareZero,
            FamilyKind::NilpotentRank2,
            FamilyKind::Rank2CubeZero,
            FamilyKind::Rank2,
            FamilyKind::UnitEigen,
            FamilyKind::BoundedEigen,
            FamilyKind::NilpotentAll,
            FamilyKind::Rank2UnitEigenpair,
            FamilyKind::KahlerRank1,
            FamilyKind::KahlerRank1Nilpotent,
            FamilyKind::KahlerRank1Trace1,
            FamilyKind::KahlerRank1Trace1Shifted(2.5),
            FamilyKind::KahlerRank1Trace1Shifted(f64::INFINITY),
            FamilyKind::HarnackBrendle,
            FamilyKind::HarnackKahler,
        ] {
            let parsed = FamilyKind::parse(&kind.tag()).unwrap();
            assert_eq!(parsed, kind);
        }
        assert!(FamilyKind::parse("nope").is_err());
    }
}
