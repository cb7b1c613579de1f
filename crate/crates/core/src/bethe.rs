//! Evaluation of the Bethe-equation system for the spin-1/2 isotropic chain:
//! cleared-denominator residuals, energies, the singular-solution criterion
//! and regularization constant, and off-shell transfer-matrix eigenvalue
//! coefficients `Λ`, `Λ_k`.
//!
//! The residual of equation `k` is stored in cleared form
//!
//! ```text
//! F_k = (λ_k + i/2)^N Π_{j≠k} (λ_k − λ_j − i)  −  (λ_k − i/2)^N Π_{j≠k} (λ_k − λ_j + i)
//! ```
//!
//! scaled by `1 / max(1, |λ_k|+1)^{N+ℓ−1}` to tame the dynamic range. The
//! cleared form stays finite at the singular pair `±i/2` and at root
//! collisions, so one residual serves every solution class. Acceptance of a
//! candidate root additionally requires the *relative* residual
//! `|T1 − T2| / max(|T1|, |T2|)` to be small: near-degenerate points (for
//! example perturbations of the singular pair, where both cleared terms
//! underflow) pass any absolute threshold but fail the relative one.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Big, BigField, Cx, Field, Scalar};

/// A root is identified with `±i/2` when within this distance.
pub const SINGULAR_PAIR_TOL: f64 = 1e-8;
/// Tolerance on `|LHS − 1|` for the physical-singular criterion.
pub const NW_CRITERION_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum BetheError {
    #[error("solution is not singular (no ±i/2 pair)")]
    NotSingular,
    #[error("divergent energy: root at ±i/2 but solution not classified singular")]
    DivergentEnergy,
    #[error("spectral parameter coincides with root {0} within tolerance")]
    PoleAtRoot(usize),
    #[error("energy has non-real residue {0:.3e}")]
    ComplexEnergy(f64),
    #[error("log-derivative extrapolations disagree across ε decades: {0:.3e}")]
    ExtrapolationMismatch(f64),
}

/// Classification of a pairwise-distinct solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionClass {
    Regular,
    PhysicalSingular,
    UnphysicalSingular,
    Unverified,
}

/// A solution of the Bethe equations for a sector `(N, ℓ)`.
///
/// Roots are kept in canonical order (descending real part, then descending
/// imaginary part). When the solver ran in extended precision the exact
/// working-precision roots ride along in `roots_hp`, index-aligned with
/// `roots`; the `f64` projection alone cannot represent string deviations
/// below ~1e-16.
#[derive(Clone, Debug)]
pub struct BetheSolution {
    pub n_sites: u32,
    pub roots: Vec<Complex64>,
    pub roots_hp: Option<Vec<Cx<Big>>>,
    pub residual_norm: f64,
    pub classification: SolutionClass,
}

impl BetheSolution {
    /// Build from raw roots: canonicalize order, classify by the ±i/2 pair,
    /// and record the scaled residual norm.
    pub fn from_roots(n_sites: u32, mut roots: Vec<Complex64>) -> Self {
        sort_canonical(&mut roots);
        let residual = residual_norms_f64(n_sites, &roots).scaled;
        let classification = classify(n_sites, &roots);
        BetheSolution {
            n_sites,
            roots,
            roots_hp: None,
            residual_norm: residual,
            classification,
        }
    }

    pub fn ell(&self) -> u32 {
        self.roots.len() as u32
    }

    pub fn is_singular(&self) -> bool {
        matches!(
            self.classification,
            SolutionClass::PhysicalSingular | SolutionClass::UnphysicalSingular
        )
    }

    /// Indices of the `+i/2` and `−i/2` roots, if both are present.
    pub fn singular_pair(&self) -> Option<(usize, usize)> {
        singular_pair(&self.roots)
    }

    /// Roots with the singular pair removed (the `λ_3, …, λ_ℓ` of the
    /// regularization scheme).
    pub fn singular_rest(&self) -> Result<Vec<Complex64>, BetheError> {
        let (p, m) = self.singular_pair().ok_or(BetheError::NotSingular)?;
        Ok(self
            .roots
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != p && i != m)
            .map(|(_, &z)| z)
            .collect())
    }

    /// All roots real within `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.roots.iter().all(|z| z.im.abs() < tol)
    }

    /// Energy eigenvalue; regular solutions use the direct sum, singular
    /// ones the regularized formula over the remaining roots.
    pub fn energy(&self, j_coupling: f64) -> Result<f64, BetheError> {
        match self.classification {
            SolutionClass::Regular | SolutionClass::Unverified => {
                if singular_pair(&self.roots).is_some()
                    || self
                        .roots
                        .iter()
                        .any(|z| (z - Complex64::new(0.0, 0.5)).norm() < SINGULAR_PAIR_TOL
                            || (z + Complex64::new(0.0, 0.5)).norm() < SINGULAR_PAIR_TOL)
                {
                    return Err(BetheError::DivergentEnergy);
                }
                energy_sum(&self.roots, j_coupling, 0.0)
            }
            SolutionClass::PhysicalSingular | SolutionClass::UnphysicalSingular => {
                let rest = self.singular_rest()?;
                energy_sum(&rest, j_coupling, -j_coupling)
            }
        }
    }
}

fn energy_sum(roots: &[Complex64], j: f64, offset: f64) -> Result<f64, BetheError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for z in roots {
        acc += 1.0 / (z * z + 0.25);
    }
    let e = offset - j / 2.0 * acc.re;
    let resid = (j / 2.0 * acc.im).abs();
    if resid > 1e-10 * e.abs().max(1.0) {
        return Err(BetheError::ComplexEnergy(resid));
    }
    Ok(e)
}

/// Canonical root order: descending real part, then descending imaginary part.
pub fn sort_canonical(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap()
            .then(b.im.partial_cmp(&a.im).unwrap())
    });
}

/// Locate the +i/2 and −i/2 roots within [`SINGULAR_PAIR_TOL`].
pub fn singular_pair(roots: &[Complex64]) -> Option<(usize, usize)> {
    let plus = roots
        .iter()
        .position(|z| (z - Complex64::new(0.0, 0.5)).norm() < SINGULAR_PAIR_TOL)?;
    let minus = roots
        .iter()
        .position(|z| (z + Complex64::new(0.0, 0.5)).norm() < SINGULAR_PAIR_TOL)?;
    Some((plus, minus))
}

/// Classify by presence of the singular pair and the Nepomechie–Wang
/// criterion.
pub fn classify(n_sites: u32, roots: &[Complex64]) -> SolutionClass {
    match singular_pair(roots) {
        None => SolutionClass::Regular,
        Some((p, m)) => {
            let rest: Vec<Complex64> = roots
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != p && i != m)
                .map(|(_, &z)| z)
                .collect();
            if nw_criterion_value(n_sites, &rest) {
                SolutionClass::PhysicalSingular
            } else {
                SolutionClass::UnphysicalSingular
            }
        }
    }
}

/// The two cleared terms `(T1_k, T2_k)` of every equation, unscaled.
pub fn residual_terms<F: Field>(
    f: &F,
    n_sites: u32,
    roots: &[Cx<F::R>],
) -> Vec<(Cx<F::R>, Cx<F::R>)> {
    let half_i = Cx::from_f64(f, 0.0, 0.5);
    let i = Cx::from_f64(f, 0.0, 1.0);
    roots
        .iter()
        .enumerate()
        .map(|(k, lk)| {
            let mut t1 = lk.add(&half_i).powu(n_sites);
            let mut t2 = lk.sub(&half_i).powu(n_sites);
            for (j, lj) in roots.iter().enumerate() {
                if j != k {
                    let d = lk.sub(lj);
                    t1 = t1.mul(&d.sub(&i));
                    t2 = t2.mul(&d.add(&i));
                }
            }
            (t1, t2)
        })
        .collect()
}

/// Scaled cleared residuals, one per equation. All-zero within tolerance
/// iff the roots are on-shell.
pub fn bethe_residual<F: Field>(f: &F, n_sites: u32, roots: &[Cx<F::R>]) -> Vec<Cx<F::R>> {
    let ell = roots.len() as u32;
    residual_terms(f, n_sites, roots)
        .into_iter()
        .zip(roots)
        .map(|((t1, t2), lk)| {
            let s = residual_scale(f, n_sites, ell, lk);
            t1.sub(&t2).scale(&s)
        })
        .collect()
}

fn residual_scale<F: Field>(f: &F, n_sites: u32, ell: u32, lk: &Cx<F::R>) -> F::R {
    let one = f.real(1.0);
    let m = lk.modulus().add(&one);
    let base = if m > one { m } else { one };
    let mut acc = f.real(1.0);
    for _ in 0..(n_sites + ell - 1) {
        acc = acc.mul(&base);
    }
    f.real(1.0).div(&acc)
}

/// Residual norms of a candidate root set.
pub struct ResidualNorms {
    /// Max over equations of the scaled cleared residual modulus.
    pub scaled: f64,
    /// Max over equations of `|T1 − T2| / max(|T1|, |T2|)`; zero when both
    /// terms vanish identically (pinned singular pair).
    pub relative: f64,
}

pub fn residual_norms<F: Field>(f: &F, n_sites: u32, roots: &[Cx<F::R>]) -> ResidualNorms {
    let ell = roots.len() as u32;
    let terms = residual_terms(f, n_sites, roots);
    let mut scaled = 0.0f64;
    let mut relative = 0.0f64;
    for ((t1, t2), lk) in terms.iter().zip(roots) {
        let diff = t1.sub(t2).modulus().to_f64();
        let s = residual_scale(f, n_sites, ell, lk).to_f64();
        scaled = scaled.max(diff * s);
        let m1 = t1.modulus().to_f64();
        let m2 = t2.modulus().to_f64();
        let denom = m1.max(m2);
        if denom > 0.0 {
            relative = relative.max(diff / denom);
        } else if diff > 0.0 {
            relative = 1.0f64.max(relative);
        }
    }
    ResidualNorms { scaled, relative }
}

pub fn residual_norms_f64(n_sites: u32, roots: &[Complex64]) -> ResidualNorms {
    let f = crate::scalar::F64Field;
    let rs: Vec<Cx<f64>> = roots.iter().map(|z| Cx::new(z.re, z.im)).collect();
    residual_norms(&f, n_sites, &rs)
}

/// Nepomechie–Wang criterion on the remaining roots `λ_3, …, λ_ℓ`:
/// `(−Π (λ_j + i/2)/(λ_j − i/2))^N = 1` within tolerance.
pub fn nw_criterion_value(n_sites: u32, rest: &[Complex64]) -> bool {
    let mut prod = Complex64::new(1.0, 0.0);
    for z in rest {
        prod *= (z + Complex64::new(0.0, 0.5)) / (z - Complex64::new(0.0, 0.5));
    }
    let lhs = (-prod).powu(n_sites);
    (lhs - 1.0).norm() < NW_CRITERION_TOL
}

/// Criterion for a classified solution; errors when not singular.
pub fn nw_criterion(sol: &BetheSolution) -> Result<bool, BetheError> {
    let rest = sol.singular_rest()?;
    Ok(nw_criterion_value(sol.n_sites, &rest))
}

/// Regularization constant `c = 2 i^{N+1} Π (λ_j + 3i/2)/(λ_j − i/2)`.
///
/// The alternative expression `c′ = −2 i^{−(N+1)} Π (λ_j − 3i/2)/(λ_j + i/2)`
/// must agree whenever the criterion holds (the compatibility theorem);
/// agreement is asserted.
pub fn nw_constant(sol: &BetheSolution) -> Result<Complex64, BetheError> {
    let rest = sol.singular_rest()?;
    let (c, c_alt) = nw_constant_pair(sol.n_sites, &rest);
    if nw_criterion_value(sol.n_sites, &rest) {
        assert!(
            (c - c_alt).norm() < 1e-8 * c.norm().max(1.0),
            "regularization constants disagree on a physical singular solution: {c} vs {c_alt}"
        );
    }
    Ok(c)
}

/// Both expressions for the constant, for compatibility checks.
pub fn nw_constant_pair(n_sites: u32, rest: &[Complex64]) -> (Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let ip = i.powu(n_sites + 1);
    let mut c = 2.0 * ip;
    let mut c_alt = -2.0 / ip;
    for z in rest {
        c *= (z + 1.5 * i) / (z - 0.5 * i);
        c_alt *= (z - 1.5 * i) / (z + 0.5 * i);
    }
    (c, c_alt)
}

/// Regularization data: shift `ε` and constant `c`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SingularRegularization {
    pub epsilon: f64,
    pub c: Complex64,
}

/// Perturbed roots `λ_1 = i/2 + ε + c ε^N`, `λ_2 = −i/2 + ε`, others kept.
pub fn regularized_roots(
    sol: &BetheSolution,
    reg: &SingularRegularization,
) -> Result<Vec<Complex64>, BetheError> {
    let rest = sol.singular_rest()?;
    let n = sol.n_sites as i32;
    let eps = reg.epsilon;
    let mut out = Vec::with_capacity(sol.roots.len());
    out.push(Complex64::new(0.0, 0.5) + eps + reg.c * eps.powi(n));
    out.push(Complex64::new(0.0, -0.5) + eps);
    out.extend(rest);
    Ok(out)
}

/// Extended-precision regularized roots with the constant recomputed at
/// working precision from the remaining roots.
pub fn regularized_roots_big(
    f: &BigField,
    sol: &BetheSolution,
    epsilon: &Big,
) -> Result<Vec<Cx<Big>>, BetheError> {
    let rest = sol.singular_rest()?;
    let rest_big: Vec<Cx<Big>> = match &sol.roots_hp {
        Some(hp) => {
            let (p, m) = sol.singular_pair().ok_or(BetheError::NotSingular)?;
            hp.iter()
                .enumerate()
                .filter(|&(i, _)| i != p && i != m)
                .map(|(_, z)| z.clone())
                .collect()
        }
        None => rest.iter().map(|z| Cx::from_f64(f, z.re, z.im)).collect(),
    };
    let i = Cx::from_f64(f, 0.0, 1.0);
    let half_i = Cx::from_f64(f, 0.0, 0.5);
    let three_half_i = Cx::from_f64(f, 0.0, 1.5);
    let mut c = i.powu(sol.n_sites + 1).scale(&f.real(2.0));
    for z in &rest_big {
        c = c.mul(&z.add(&three_half_i)).div(&z.sub(&half_i));
    }
    let eps = Cx::new(epsilon.clone(), f.real(0.0));
    let mut eps_n = Cx::one();
    for _ in 0..sol.n_sites {
        eps_n = eps_n.mul(&eps);
    }
    let mut out = Vec::with_capacity(rest_big.len() + 2);
    out.push(half_i.add(&eps).add(&c.mul(&eps_n)));
    out.push(half_i.neg().add(&eps));
    out.extend(rest_big);
    Ok(out)
}

/// Off-shell transfer-matrix eigenvalue
/// `Λ(λ) = (λ+i/2)^N Π (λ−λ_j−i)/(λ−λ_j) + (λ−i/2)^N Π (λ_j−λ−i)/(λ_j−λ)`.
pub fn offshell_eigenvalue<F: Field>(
    f: &F,
    lambda: &Cx<F::R>,
    n_sites: u32,
    roots: &[Cx<F::R>],
) -> Result<Cx<F::R>, BetheError> {
    check_poles(f, lambda, roots)?;
    let half_i = Cx::from_f64(f, 0.0, 0.5);
    let i = Cx::from_f64(f, 0.0, 1.0);
    let mut a = lambda.add(&half_i).powu(n_sites);
    let mut b = lambda.sub(&half_i).powu(n_sites);
    for lj in roots {
        let d = lambda.sub(lj);
        a = a.mul(&d.sub(&i)).div(&d);
        b = b.mul(&d.neg().sub(&i)).div(&d.neg());
    }
    Ok(a.add(&b))
}

/// Derivative `dΛ/dλ` by the product rule, safe at the zeros of either
/// branch (in particular at `λ = i/2` where `(λ−i/2)^N` vanishes).
pub fn offshell_eigenvalue_derivative<F: Field>(
    f: &F,
    lambda: &Cx<F::R>,
    n_sites: u32,
    roots: &[Cx<F::R>],
) -> Result<Cx<F::R>, BetheError> {
    check_poles(f, lambda, roots)?;
    let half_i = Cx::from_f64(f, 0.0, 0.5);
    let i = Cx::from_f64(f, 0.0, 1.0);
    let n_real = Cx::from_f64(f, n_sites as f64, 0.0);

    // Branch (λ±i/2)^N Π ratio_j: derivative as
    //   N (λ±i/2)^{N−1} Π ratio_j + (λ±i/2)^N Σ_m ratio'_m Π_{j≠m} ratio_j
    // with ratio'_m = ±i / (den_m)².
    let branch = |pow_base: Cx<F::R>, ratios: &[(Cx<F::R>, Cx<F::R>)], sign_i: Cx<F::R>| {
        let pow_nm1 = pow_base.powu(n_sites - 1);
        let pow_n = pow_nm1.mul(&pow_base);
        let mut prod_all = Cx::one();
        for (num, den) in ratios {
            prod_all = prod_all.mul(num).div(den);
        }
        let mut sum = Cx::zero();
        for m in 0..ratios.len() {
            let mut partial = sign_i.div(&ratios[m].1.mul(&ratios[m].1));
            for (j, (num, den)) in ratios.iter().enumerate() {
                if j != m {
                    partial = partial.mul(num).div(den);
                }
            }
            sum = sum.add(&partial);
        }
        pow_nm1.mul(&n_real).mul(&prod_all).add(&pow_n.mul(&sum))
    };

    let ratios_a: Vec<(Cx<F::R>, Cx<F::R>)> = roots
        .iter()
        .map(|lj| {
            let d = lambda.sub(lj);
            (d.sub(&i), d)
        })
        .collect();
    let ratios_b: Vec<(Cx<F::R>, Cx<F::R>)> = roots
        .iter()
        .map(|lj| {
            let d = lj.sub(lambda);
            (d.sub(&i), d)
        })
        .collect();
    let da = branch(lambda.add(&half_i), &ratios_a, i.clone());
    let db = branch(lambda.sub(&half_i), &ratios_b, i.neg());
    Ok(da.add(&db))
}

/// Off-shell coefficient `Λ_k`; vanishes on-shell for every `k`.
pub fn offshell_coefficient<F: Field>(
    f: &F,
    k: usize,
    lambda: &Cx<F::R>,
    n_sites: u32,
    roots: &[Cx<F::R>],
) -> Result<Cx<F::R>, BetheError> {
    assert!(k < roots.len(), "coefficient index in 0..ell");
    let lk = &roots[k];
    let tol = f.real(1e-12);
    if lambda.sub(lk).modulus() < tol {
        return Err(BetheError::PoleAtRoot(k));
    }
    let half_i = Cx::from_f64(f, 0.0, 0.5);
    let i = Cx::from_f64(f, 0.0, 1.0);
    let mut a = lk.add(&half_i).powu(n_sites);
    let mut b = lk.sub(&half_i).powu(n_sites);
    for (j, lj) in roots.iter().enumerate() {
        if j != k {
            let d = lk.sub(lj);
            a = a.mul(&d.sub(&i)).div(&d);
            b = b.mul(&d.neg().sub(&i)).div(&d.neg());
        }
    }
    Ok(i.div(&lambda.sub(lk)).mul(&a.sub(&b)))
}

fn check_poles<F: Field>(
    f: &F,
    lambda: &Cx<F::R>,
    roots: &[Cx<F::R>],
) -> Result<(), BetheError> {
    let tol = f.real(1e-12);
    for (j, lj) in roots.iter().enumerate() {
        if lambda.sub(lj).modulus() < tol {
            return Err(BetheError::PoleAtRoot(j));
        }
    }
    Ok(())
}

/// Energy of a physical singular solution from the transfer-matrix
/// log-derivative `i Λ'(i/2)/Λ(i/2)` under regularization, extrapolated
/// over a decreasing `ε` sequence. Cross-checks the closed-form energy.
pub fn singular_energy_logderivative(
    sol: &BetheSolution,
    j_coupling: f64,
) -> Result<f64, BetheError> {
    if sol.classification != SolutionClass::PhysicalSingular {
        return Err(BetheError::NotSingular);
    }
    let c = nw_constant(sol)?;
    let f = crate::scalar::F64Field;
    let lam = Cx::new(0.0, 0.5);
    let eval = |eps: f64| -> Result<f64, BetheError> {
        let reg = SingularRegularization { epsilon: eps, c };
        let roots = regularized_roots(sol, &reg)?;
        let rs: Vec<Cx<f64>> = roots.iter().map(|z| Cx::new(z.re, z.im)).collect();
        let num = offshell_eigenvalue_derivative(&f, &lam, sol.n_sites, &rs)?;
        let den = offshell_eigenvalue(&f, &lam, sol.n_sites, &rs)?;
        let val = Cx::new(0.0, 1.0).mul(&num).div(&den);
        Ok(val.re)
    };
    // ε_val(ε) → N − 2 − Σ 1/(λ_j²+¼) with O(ε) error; eliminate the linear
    // term from consecutive pairs and compare across decades.
    let e1 = eval(1e-3)?;
    let e2 = eval(1e-4)?;
    let e3 = eval(1e-5)?;
    let x1 = (1e-3 * e2 - 1e-4 * e1) / (1e-3 - 1e-4);
    let x2 = (1e-4 * e3 - 1e-5 * e2) / (1e-4 - 1e-5);
    if (x1 - x2).abs() > 1e-6 * x1.abs().max(1.0) {
        return Err(BetheError::ExtrapolationMismatch((x1 - x2).abs()));
    }
    Ok(j_coupling / 2.0 * (x2 - sol.n_sites as f64))
}

/// Helpers between storage and kernel root representations.
pub fn roots_to_cx<F: Field>(f: &F, roots: &[Complex64]) -> Vec<Cx<F::R>> {
    roots.iter().map(|z| Cx::from_f64(f, z.re, z.im)).collect()
}

#[derive(Serialize, Deserialize)]
struct SolutionRecord {
    n: u32,
    ell: u32,
    roots: Vec<[f64; 2]>,
    residual: f64,
    class: SolutionClass,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    roots_hp: Option<Vec<[String; 2]>>,
}

impl Serialize for BetheSolution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rec = SolutionRecord {
            n: self.n_sites,
            ell: self.ell(),
            roots: self.roots.iter().map(|z| [z.re, z.im]).collect(),
            residual: self.residual_norm,
            class: self.classification,
            roots_hp: self.roots_hp.as_ref().map(|hp| {
                hp.iter()
                    .map(|z| {
                        [
                            crate::scalar::big_to_decimal_string(&z.re),
                            crate::scalar::big_to_decimal_string(&z.im),
                        ]
                    })
                    .collect()
            }),
        };
        rec.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BetheSolution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let rec = SolutionRecord::deserialize(d)?;
        if rec.roots.len() as u32 != rec.ell {
            return Err(D::Error::custom("ell does not match number of roots"));
        }
        let roots_hp = match rec.roots_hp {
            None => None,
            Some(hp) => {
                let mut out = Vec::with_capacity(hp.len());
                for [re, im] in hp {
                    let re = crate::scalar::big_from_decimal_string(&re, HP_STORAGE_BITS)
                        .map_err(D::Error::custom)?;
                    let im = crate::scalar::big_from_decimal_string(&im, HP_STORAGE_BITS)
                        .map_err(D::Error::custom)?;
                    out.push(Cx::new(re, im));
                }
                Some(out)
            }
        };
        Ok(BetheSolution {
            n_sites: rec.n,
            roots: rec.roots.iter().map(|r| Complex64::new(r[0], r[1])).collect(),
            roots_hp,
            residual_norm: rec.residual,
            classification: rec.class,
        })
    }
}

/// Precision attached to extended roots parsed back from JSON.
pub const HP_STORAGE_BITS: usize = 220;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::F64Field;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn residual_trivial_cases() {
        // N=2, root {0}: (i/2)^2 = (−i/2)^2
        let norms = residual_norms_f64(2, &[c(0.0, 0.0)]);
        assert!(norms.scaled < 1e-15);
        assert!(norms.relative < 1e-15);

        // N=4 singular pair in cleared form
        let norms = residual_norms_f64(4, &[c(0.0, 0.5), c(0.0, -0.5)]);
        assert_eq!(norms.scaled, 0.0);
        assert_eq!(norms.relative, 0.0);
    }

    #[test]
    fn residual_quintic_solution() {
        // smallest positive quintic root, 15 digits
        let l2 = 0.178978221719006;
        let roots = vec![c(0.0, 0.5), c(l2, 0.0), c(0.0, 0.0), c(-l2, 0.0), c(0.0, -0.5)];
        let norms = residual_norms_f64(12, &roots);
        assert!(norms.scaled < 1e-10, "scaled {}", norms.scaled);
    }

    #[test]
    fn classification_and_energy() {
        let sing4 = BetheSolution::from_roots(4, vec![c(0.0, 0.5), c(0.0, -0.5)]);
        assert_eq!(sing4.classification, SolutionClass::PhysicalSingular);
        assert!((sing4.energy(1.0).unwrap() - (-1.0)).abs() < 1e-12);

        let single = BetheSolution::from_roots(6, vec![c(0.0, 0.0)]);
        assert_eq!(single.classification, SolutionClass::Regular);
        assert!((single.energy(1.0).unwrap() - (-2.0)).abs() < 1e-12);

        let sing25 = BetheSolution::from_roots(25, vec![c(0.0, 0.5), c(0.0, -0.5)]);
        assert_eq!(sing25.classification, SolutionClass::UnphysicalSingular);
    }

    #[test]
    fn energy_divergent_flag() {
        let mut sol = BetheSolution::from_roots(4, vec![c(0.0, 0.5), c(0.0, -0.5)]);
        sol.classification = SolutionClass::Regular;
        assert!(matches!(sol.energy(1.0), Err(BetheError::DivergentEnergy)));
    }

    #[test]
    fn nw_criterion_cases() {
        // even N, empty product
        let s4 = BetheSolution::from_roots(4, vec![c(0.0, 0.5), c(0.0, -0.5)]);
        assert!(nw_criterion(&s4).unwrap());
        // odd N: (−1)^25 = −1
        let s25 = BetheSolution::from_roots(25, vec![c(0.0, 0.5), c(0.0, -0.5)]);
        assert!(!nw_criterion(&s25).unwrap());
        // not singular
        let reg = BetheSolution::from_roots(4, vec![c(0.5, 0.0)]);
        assert!(nw_criterion(&reg).is_err());
    }

    #[test]
    fn nw_constant_cases() {
        let s4 = BetheSolution::from_roots(4, vec![c(0.0, 0.5), c(0.0, -0.5)]);
        let c4 = nw_constant(&s4).unwrap();
        assert!((c4 - c(0.0, 2.0)).norm() < 1e-14);

        // N=25: c = 2 i^26 = −2, compatibility must fail (criterion false)
        let s25 = BetheSolution::from_roots(25, vec![c(0.0, 0.5), c(0.0, -0.5)]);
        let (c25, c25_alt) = nw_constant_pair(25, &[]);
        assert!((c25 - c(-2.0, 0.0)).norm() < 1e-14);
        assert!((c25 - c25_alt).norm() > 1.0);
        assert_eq!(nw_constant(&s25).unwrap(), c25);
    }

    #[test]
    fn regularized_roots_values() {
        let s4 = BetheSolution::from_roots(4, vec![c(0.0, 0.5), c(0.0, -0.5)]);
        let reg = SingularRegularization {
            epsilon: 1e-2,
            c: c(0.0, 2.0),
        };
        let r = regularized_roots(&s4, &reg).unwrap();
        assert!((r[0] - c(0.01, 0.5 + 2e-8)).norm() < 1e-15);
        assert!((r[1] - c(0.01, -0.5)).norm() < 1e-15);

        // ε → 0 recovers the original pair
        let reg0 = SingularRegularization {
            epsilon: 0.0,
            c: c(0.0, 2.0),
        };
        let r0 = regularized_roots(&s4, &reg0).unwrap();
        assert_eq!(r0[0], c(0.0, 0.5));
        assert_eq!(r0[1], c(0.0, -0.5));
    }

    #[test]
    fn offshell_empty_and_n2() {
        let f = F64Field;
        // ℓ=0: Λ(λ) = (λ+i/2)^N + (λ−i/2)^N
        let lam = Cx::new(0.7, 0.3);
        let v = offshell_eigenvalue(&f, &lam, 6, &[]).unwrap().to_c64();
        let expect = c(0.7, 0.8).powi(6) + c(0.7, -0.2).powi(6);
        assert!((v - expect).norm() < 1e-12 * expect.norm());

        // N=2, root {0}, λ=1: hand value 7/2
        let v = offshell_eigenvalue(&f, &Cx::new(1.0, 0.0), 2, &[Cx::new(0.0, 0.0)])
            .unwrap()
            .to_c64();
        assert!((v - c(3.5, 0.0)).norm() < 1e-14);

        // Λ_1 for that root vanishes at any λ ≠ 0
        let l1 = offshell_coefficient(&f, 0, &Cx::new(0.4, 0.2), 2, &[Cx::new(0.0, 0.0)])
            .unwrap()
            .to_c64();
        assert!(l1.norm() < 1e-14);
    }

    #[test]
    fn offshell_derivative_matches_finite_difference() {
        let f = F64Field;
        let roots = vec![Cx::new(0.3, 0.0), Cx::new(-0.9, 0.0)];
        let lam = Cx::new(0.1, 0.45);
        let h = 1e-6;
        let up = offshell_eigenvalue(&f, &Cx::new(0.1 + h, 0.45), 8, &roots).unwrap();
        let dn = offshell_eigenvalue(&f, &Cx::new(0.1 - h, 0.45), 8, &roots).unwrap();
        let fd = up.sub(&dn).scale(&(1.0 / (2.0 * h))).to_c64();
        let an = offshell_eigenvalue_derivative(&f, &lam, 8, &roots)
            .unwrap()
            .to_c64();
        assert!((fd - an).norm() < 1e-6 * an.norm().max(1.0));
    }

    #[test]
    fn pole_detection() {
        let f = F64Field;
        let root = Cx::new(0.25, 0.0);
        assert!(matches!(
            offshell_eigenvalue(&f, &Cx::new(0.25, 0.0), 4, &[root.clone()]),
            Err(BetheError::PoleAtRoot(0))
        ));
        let root2 = Cx::new(0.25, 0.0);
        assert!(matches!(
            offshell_coefficient(&f, 0, &Cx::new(0.25, 1e-14), 4, &[root2]),
            Err(BetheError::PoleAtRoot(0))
        ));
    }

    #[test]
    fn logderivative_energy_n4() {
        let s4 = BetheSolution::from_roots(4, vec![c(0.0, 0.5), c(0.0, -0.5)]);
        let e = singular_energy_logderivative(&s4, 1.0).unwrap();
        assert!((e - (-1.0)).abs() < 1e-8, "got {e}");
    }

    #[test]
    fn ell2_singular_energy_is_minus_j_for_even_n() {
        for n in [4u32, 6, 8, 12] {
            let s = BetheSolution::from_roots(n, vec![c(0.0, 0.5), c(0.0, -0.5)]);
            assert_eq!(s.classification, SolutionClass::PhysicalSingular);
            let e = singular_energy_logderivative(&s, 1.0).unwrap();
            assert!((e + 1.0).abs() < 1e-7, "N={n}: {e}");
        }
    }

    #[test]
    fn canonical_order_permutation_invariance() {
        let a = vec![c(0.1, 0.9), c(-0.4, 0.0), c(0.1, -0.9)];
        let mut b = vec![c(-0.4, 0.0), c(0.1, -0.9), c(0.1, 0.9)];
        sort_canonical(&mut b);
        let sa = BetheSolution::from_roots(10, a);
        assert_eq!(sa.roots, b);
        let norms_a = residual_norms_f64(10, &sa.roots);
        let norms_b = residual_norms_f64(10, &b);
        assert_eq!(norms_a.scaled, norms_b.scaled);
    }
}
