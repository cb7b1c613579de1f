//! Independent verification engine: dense `2^N` state vectors, the
//! Heisenberg Hamiltonian applied bond-wise, sector spectra by exact
//! diagonalization, transfer-matrix blocks built by the site recursion
//! `T_N = L_N T_{N−1}`, Bethe vectors and regularized singular vectors.
//!
//! Basis convention: basis states are indexed by binary spin configuration
//! with site 1 at the most significant position and up spin = 0 bit, so the
//! all-up reference state is index 0. Site `k` of an `N`-site chain acts on
//! bit `N − k`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bethe::{BetheSolution, BetheError, SolutionClass};
use crate::scalar::{Big, BigField, Cx, F64Field, Field, Scalar};
use crate::solver::SectorCensus;

/// Dense-vector size cap of the standard oracle.
pub const ORACLE_MAX_SITES: u32 = 14;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("chain length {0} exceeds the oracle cap of {ORACLE_MAX_SITES} sites")]
    SizeCap(u32),
    #[error("ε^N = {0:.3e} underflows the working precision ({1} digits)")]
    PrecisionLoss(f64, u32),
    #[error(transparent)]
    Bethe(#[from] BetheError),
}

/// Dense complex state vector of dimension `2^N`.
#[derive(Clone, Debug)]
pub struct StateVector<R> {
    pub n_sites: u32,
    pub amp: Vec<Cx<R>>,
}

impl<R: Scalar> StateVector<R> {
    pub fn zeros(n_sites: u32) -> Self {
        StateVector {
            n_sites,
            amp: vec![Cx::zero(); 1 << n_sites],
        }
    }

    /// The all-up reference state `|0⟩_N`.
    pub fn vacuum(n_sites: u32) -> Self {
        let mut v = Self::zeros(n_sites);
        v.amp[0] = Cx::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn norm(&self) -> R {
        let mut acc = R::zero();
        for a in &self.amp {
            acc = acc.add(&a.norm_sqr());
        }
        acc.sqrt()
    }

    pub fn sub(&self, other: &Self) -> Self {
        StateVector {
            n_sites: self.n_sites,
            amp: self
                .amp
                .iter()
                .zip(&other.amp)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Cx<R>) -> Self {
        StateVector {
            n_sites: self.n_sites,
            amp: self.amp.iter().map(|a| a.mul(s)).collect(),
        }
    }

    /// Down-spin count if the vector lies in a single magnetization sector.
    pub fn magnetization_sector(&self, tol: f64) -> Option<u32> {
        let mut sector: Option<u32> = None;
        let norm = self.norm().to_f64();
        for (idx, a) in self.amp.iter().enumerate() {
            if a.modulus().to_f64() > tol * norm.max(1e-300) {
                let ell = (idx as u64).count_ones();
                match sector {
                    None => sector = Some(ell),
                    Some(s) if s == ell => {}
                    _ => return None,
                }
            }
        }
        sector
    }

    /// Unit norm with the largest-magnitude amplitude rotated to the
    /// positive real axis.
    pub fn aligned(&self) -> Self {
        let mut best = 0usize;
        let mut best_mag = R::zero();
        for (i, a) in self.amp.iter().enumerate() {
            let m = a.norm_sqr();
            if m > best_mag {
                best_mag = m;
                best = i;
            }
        }
        let phase_mag = self.amp[best].modulus();
        let norm = self.norm();
        let factor = self.amp[best]
            .conj()
            .scale(&R::one().div(&phase_mag.mul(&norm)));
        self.scale(&factor)
    }

    pub fn to_f64(&self) -> StateVector<f64> {
        StateVector {
            n_sites: self.n_sites,
            amp: self.amp.iter().map(|a| Cx::new(a.re.to_f64(), a.im.to_f64())).collect(),
        }
    }
}

/// Apply the Hamiltonian
/// `H = J/4 Σ_k (σ¹σ¹ + σ²σ² + σ³σ³ − 1)` with periodic closure, bond by
/// bond without materializing the matrix. Magnetization-sector preserving.
pub fn hamiltonian_apply<F: Field>(
    f: &F,
    v: &StateVector<F::R>,
    j_coupling: f64,
) -> StateVector<F::R> {
    let n = v.n_sites;
    let mut out = StateVector::zeros(n);
    let half_j = f.real(j_coupling / 2.0);
    for k in 1..=n {
        let b1 = n - k;
        let b2 = if k == n { n - 1 } else { n - k - 1 };
        let mask = (1usize << b1) | (1usize << b2);
        for s in 0..v.dim() {
            let x1 = (s >> b1) & 1;
            let x2 = (s >> b2) & 1;
            if x1 != x2 {
                let t = s ^ mask;
                let w = v.amp[s].scale(&half_j);
                out.amp[t] = out.amp[t].add(&w);
                out.amp[s] = out.amp[s].sub(&w);
            }
        }
    }
    out
}

/// Relative eigen-residual `‖Hv − Ev‖ / ‖v‖`.
pub fn eigen_residual<F: Field>(
    f: &F,
    v: &StateVector<F::R>,
    energy: f64,
    j_coupling: f64,
) -> f64 {
    let hv = hamiltonian_apply(f, v, j_coupling);
    let e = Cx::from_f64(f, energy, 0.0);
    let r = hv.sub(&v.scale(&e));
    r.norm().to_f64() / v.norm().to_f64()
}

/// Monodromy-matrix block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    A,
    B,
    C,
    D,
}

/// Apply all four blocks of `T_N(λ)` to `v` by folding the Lax operator in
/// site by site. Cost `O(N·2^N)` per block.
pub fn transfer_apply_all<F: Field>(
    f: &F,
    lambda: &Cx<F::R>,
    v: &StateVector<F::R>,
) -> [StateVector<F::R>; 4] {
    let n = v.n_sites;
    let up_a = lambda.add(&Cx::from_f64(f, 0.0, 0.5));
    let dn_a = lambda.sub(&Cx::from_f64(f, 0.0, 0.5));
    let i = Cx::from_f64(f, 0.0, 1.0);

    let mut a = v.clone();
    let mut b = StateVector::zeros(n);
    let mut c = StateVector::zeros(n);
    let mut d = v.clone();

    for k in 1..=n {
        let bit = n - k;
        let mask = 1usize << bit;
        let mut na = StateVector::zeros(n);
        let mut nb = StateVector::zeros(n);
        let mut nc = StateVector::zeros(n);
        let mut nd = StateVector::zeros(n);
        for s in 0..v.dim() {
            let up = s & mask == 0;
            let (ac, dc) = if up { (&up_a, &dn_a) } else { (&dn_a, &up_a) };
            // a_k on the diagonal
            na.amp[s] = na.amp[s].add(&a.amp[s].mul(ac));
            nb.amp[s] = nb.amp[s].add(&b.amp[s].mul(ac));
            // d_k on the diagonal
            nc.amp[s] = nc.amp[s].add(&c.amp[s].mul(dc));
            nd.amp[s] = nd.amp[s].add(&d.amp[s].mul(dc));
            if up {
                // b_k = i σ⁻/… : flips this site down
                let t = s | mask;
                na.amp[t] = na.amp[t].add(&c.amp[s].mul(&i));
                nb.amp[t] = nb.amp[t].add(&d.amp[s].mul(&i));
            } else {
                // c_k flips this site up
                let t = s & !mask;
                nc.amp[t] = nc.amp[t].add(&a.amp[s].mul(&i));
                nd.amp[t] = nd.amp[t].add(&b.amp[s].mul(&i));
            }
        }
        a = na;
        b = nb;
        c = nc;
        d = nd;
    }
    [a, b, c, d]
}

/// Apply one block of the monodromy matrix.
pub fn transfer_block_apply<F: Field>(
    f: &F,
    block: Block,
    lambda: &Cx<F::R>,
    v: &StateVector<F::R>,
) -> StateVector<F::R> {
    let [a, b, c, d] = transfer_apply_all(f, lambda, v);
    match block {
        Block::A => a,
        Block::B => b,
        Block::C => c,
        Block::D => d,
    }
}

/// Transfer-matrix application `τ(λ) v = (A + D) v`.
pub fn transfer_matrix_apply<F: Field>(
    f: &F,
    lambda: &Cx<F::R>,
    v: &StateVector<F::R>,
) -> StateVector<F::R> {
    let [a, _, _, d] = transfer_apply_all(f, lambda, v);
    StateVector {
        n_sites: v.n_sites,
        amp: a.amp.iter().zip(&d.amp).map(|(x, y)| x.add(y)).collect(),
    }
}

/// Bethe vector `B(λ_1)⋯B(λ_ℓ)|0⟩`.
pub fn bethe_vector<F: Field>(f: &F, roots: &[Cx<F::R>], n: u32) -> Result<StateVector<F::R>, OracleError> {
    if n > ORACLE_MAX_SITES {
        return Err(OracleError::SizeCap(n));
    }
    let mut v = StateVector::vacuum(n);
    for lam in roots {
        v = transfer_block_apply(f, Block::B, lam, &v);
    }
    Ok(v)
}

pub fn bethe_vector_f64(roots: &[Complex64], n: u32) -> Result<StateVector<f64>, OracleError> {
    let f = F64Field;
    let rs: Vec<Cx<f64>> = roots.iter().map(|z| Cx::new(z.re, z.im)).collect();
    bethe_vector(&f, &rs, n)
}

/// Regularized singular vector
/// `ε^{−N} B(i/2+ε+cε^N) B(−i/2+ε) B(λ_3)⋯|0⟩` in extended precision.
///
/// Errors when `ε^N` underflows the working precision (four guard digits).
pub fn regularized_singular_vector(
    f: &BigField,
    sol: &BetheSolution,
    epsilon: f64,
) -> Result<StateVector<Big>, OracleError> {
    if sol.n_sites > ORACLE_MAX_SITES {
        return Err(OracleError::SizeCap(sol.n_sites));
    }
    let digits = f.decimal_digits();
    let eps_pow = epsilon.powi(sol.n_sites as i32);
    if eps_pow < 10f64.powi(-((digits - 4) as i32)) {
        return Err(OracleError::PrecisionLoss(eps_pow, digits));
    }
    let eps = f.real(epsilon);
    let roots = crate::bethe::regularized_roots_big(f, sol, &eps)?;
    let v = bethe_vector(f, &roots, sol.n_sites)?;
    // scale by ε^{−N}
    let mut inv = f.real(1.0);
    for _ in 0..sol.n_sites {
        inv = inv.div(&eps);
    }
    Ok(v.scale(&Cx::new(inv, f.real(0.0))))
}

/// Sector spectrum record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub n_sites: u32,
    pub ell: u32,
    /// Sector eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Sector-ℓ spectrum minus sector-(ℓ−1) spectrum as multisets: the
    /// energies of the highest-weight states.
    pub highest_weight_energies: Vec<f64>,
}

/// Basis states of the ℓ-down-spin sector.
pub fn sector_basis(n: u32, ell: u32) -> Vec<usize> {
    (0..(1usize << n))
        .filter(|s| (*s as u64).count_ones() == ell)
        .collect()
}

fn sector_eigenvalues(n: u32, ell: u32, j_coupling: f64) -> Vec<f64> {
    let basis = sector_basis(n, ell);
    let dim = basis.len();
    let mut pos = vec![usize::MAX; 1 << n];
    for (i, &s) in basis.iter().enumerate() {
        pos[s] = i;
    }
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let half_j = j_coupling / 2.0;
    for (col, &s) in basis.iter().enumerate() {
        for k in 1..=n {
            let b1 = n - k;
            let b2 = if k == n { n - 1 } else { n - k - 1 };
            let mask = (1usize << b1) | (1usize << b2);
            if ((s >> b1) & 1) != ((s >> b2) & 1) {
                let t = s ^ mask;
                h[(pos[t], col)] += half_j;
                h[(col, col)] -= half_j;
            }
        }
    }
    let mut eig: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Eigenvalues of the ℓ-down-spin sector and the highest-weight multiset.
pub fn sector_spectrum(n: u32, ell: u32, j_coupling: f64) -> Result<SpectrumRecord, OracleError> {
    if n > ORACLE_MAX_SITES {
        return Err(OracleError::SizeCap(n));
    }
    assert!(ell <= n);
    let eigenvalues = sector_eigenvalues(n, ell, j_coupling);
    let highest_weight_energies = if ell == 0 {
        eigenvalues.clone()
    } else {
        multiset_difference(&eigenvalues, &sector_eigenvalues(n, ell - 1, j_coupling), 1e-7)
    };
    Ok(SpectrumRecord {
        n_sites: n,
        ell,
        eigenvalues,
        highest_weight_energies,
    })
}

/// Sorted multiset difference with tolerance matching.
pub fn multiset_difference(a: &[f64], b: &[f64], tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut j = 0usize;
    for &x in a {
        if j < b.len() && (x - b[j]).abs() <= tol {
            j += 1;
        } else {
            out.push(x);
        }
    }
    out
}

/// Per-solution verification detail.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionCheck {
    pub index: usize,
    pub class: SolutionClass,
    pub energy: Option<f64>,
    pub eigen_residual: Option<f64>,
}

/// Outcome of the completeness verification of one census.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub n_sites: u32,
    pub ell: u32,
    pub rc_count: u64,
    pub physical_count: usize,
    pub count_match: bool,
    /// Highest-weight ED energies with no Bethe partner within tolerance.
    pub unmatched_ed: Vec<f64>,
    /// Bethe energies with no ED partner.
    pub unmatched_bethe: Vec<f64>,
    pub energy_match: bool,
    pub max_eigen_residual: f64,
    pub eigen_pass: bool,
    pub checks: Vec<SolutionCheck>,
    pub pass: bool,
}

/// Verify a census against exact diagonalization: counts, the energy
/// multiset, and the eigen-residual of every physical solution's Bethe (or
/// regularized) vector. Mismatches are reported, not raised.
pub fn completeness_check(
    n: u32,
    ell: u32,
    census: &SectorCensus,
    j_coupling: f64,
) -> Result<CompletenessReport, OracleError> {
    if n > ORACLE_MAX_SITES {
        return Err(OracleError::SizeCap(n));
    }
    let spectrum = sector_spectrum(n, ell, j_coupling)?;
    let physical: Vec<(usize, &BetheSolution)> = census
        .solutions
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            matches!(
                s.classification,
                SolutionClass::Regular | SolutionClass::PhysicalSingular
            )
        })
        .collect();
    let count_match = physical.len() as u64 == census.rc_count
        && census.rc_count as u128
            == crate::binomial(n as u64, ell as u64) - crate::binomial(n as u64, ell as u64 - 1);

    let mut checks = Vec::new();
    let mut bethe_energies = Vec::new();
    let mut max_resid = 0.0f64;
    for (idx, sol) in &physical {
        let energy = sol.energy(j_coupling).ok();
        let resid = energy.map(|e| solution_eigen_residual(sol, e, j_coupling));
        if let Some(r) = resid {
            max_resid = max_resid.max(r);
        }
        if let Some(e) = energy {
            bethe_energies.push(e);
        }
        checks.push(SolutionCheck {
            index: *idx,
            class: sol.classification,
            energy,
            eigen_residual: resid,
        });
    }
    bethe_energies.sort_by(f64::total_cmp);
    let mut hw = spectrum.highest_weight_energies.clone();
    hw.sort_by(f64::total_cmp);
    let unmatched_ed = multiset_difference(&hw, &bethe_energies, 1e-8);
    let unmatched_bethe = multiset_difference(&bethe_energies, &hw, 1e-8);
    let energy_match = unmatched_ed.is_empty()
        && unmatched_bethe.is_empty()
        && bethe_energies.len() == hw.len();
    let eigen_pass = max_resid < 1e-6 && checks.iter().all(|c| c.eigen_residual.is_some());
    let pass = count_match && energy_match && eigen_pass;
    Ok(CompletenessReport {
        n_sites: n,
        ell,
        rc_count: census.rc_count,
        physical_count: physical.len(),
        count_match,
        unmatched_ed,
        unmatched_bethe,
        energy_match,
        max_eigen_residual: max_resid,
        eigen_pass,
        checks,
        pass,
    })
}

/// Eigen-residual of one physical solution, choosing the plain or the
/// regularized vector by class.
pub fn solution_eigen_residual(sol: &BetheSolution, energy: f64, j_coupling: f64) -> f64 {
    match sol.classification {
        SolutionClass::PhysicalSingular => {
            let eps = 1e-8;
            let digits = (8 * sol.n_sites + 24).max(60);
            let f = BigField::with_decimal_digits(digits);
            match regularized_singular_vector(&f, sol, eps) {
                Ok(v) => eigen_residual(&f, &v, energy, j_coupling),
                Err(_) => f64::INFINITY,
            }
        }
        _ => {
            let f = F64Field;
            let roots: Vec<Cx<f64>> = sol.roots.iter().map(|z| Cx::new(z.re, z.im)).collect();
            match bethe_vector(&f, &roots, sol.n_sites) {
                Ok(v) => eigen_residual(&f, &v, energy, j_coupling),
                Err(_) => f64::INFINITY,
            }
        }
    }
}

/// Reproduction of the explicit 16-component regularized vector of the
/// four-site chain with `c = 2i`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorCheck {
    pub max_component_diff: f64,
    pub eigen_residual: f64,
    pub pass: bool,
}

pub fn n4_vector_check() -> VectorCheck {
    let sol = BetheSolution::from_roots(
        4,
        vec![Complex64::new(0.0, 0.5), Complex64::new(0.0, -0.5)],
    );
    let f = BigField::with_decimal_digits(60);
    let v = regularized_singular_vector(&f, &sol, 1e-10).expect("within precision budget");
    // expected limit: entries 2, −2, ic, 2 at the four adjacent-pair states
    let c = Complex64::new(0.0, 2.0);
    let mut expected = vec![Complex64::new(0.0, 0.0); 16];
    expected[3] = Complex64::new(2.0, 0.0);
    expected[6] = Complex64::new(-2.0, 0.0);
    expected[9] = Complex64::new(0.0, 1.0) * c;
    expected[12] = Complex64::new(2.0, 0.0);
    let vf = v.to_f64();
    let mut diff = 0.0f64;
    for (a, e) in vf.amp.iter().zip(&expected) {
        diff = diff.max((a.to_c64() - e).norm());
    }
    let resid = eigen_residual(&f, &v, -1.0, 1.0);
    VectorCheck {
        max_component_diff: diff,
        eigen_residual: resid,
        pass: diff < 1e-6 && resid < 1e-8,
    }
}

/// Log–log slope of `‖B(λ_1^ε)B(λ_2^ε)|0⟩‖` over a decade sequence of ε;
/// the well-definedness lemma predicts slope `N`.
pub fn singular_pair_norm_scaling(n: u32, sol: &BetheSolution) -> Result<f64, OracleError> {
    let f = BigField::with_decimal_digits((8 * n + 24).max(60));
    let eps_list = [1e-1, 1e-2, 1e-3];
    let mut logs = Vec::new();
    for &eps in &eps_list {
        let reg = regularized_singular_vector(&f, sol, eps)?;
        // undo the ε^{-N} scaling to recover the raw pair norm growth
        let raw = Scalar::to_f64(&reg.norm()) * eps.powi(n as i32);
        logs.push(raw.ln());
    }
    // least-squares slope over ln ε
    let xs: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let xm = xs.iter().sum::<f64>() / 3.0;
    let ym = logs.iter().sum::<f64>() / 3.0;
    let num: f64 = xs.iter().zip(&logs).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let den: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::F64Field;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_annihilated_by_hamiltonian() {
        let f = F64Field;
        let v = StateVector::<f64>::vacuum(6);
        let hv = hamiltonian_apply(&f, &v, 1.0);
        assert!(hv.norm() < 1e-15);
    }

    #[test]
    fn two_site_hand_computation() {
        // |↑↓⟩ is index 0b01 = 1; H|↑↓⟩ = J(|↓↑⟩ − |↑↓⟩) with the doubled bond
        let f = F64Field;
        let mut v = StateVector::<f64>::zeros(2);
        v.amp[1] = Cx::one();
        let hv = hamiltonian_apply(&f, &v, 1.0);
        assert!((hv.amp[2].re - 1.0).abs() < 1e-15);
        assert!((hv.amp[1].re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn n2_sector_spectrum() {
        let spec = sector_spectrum(2, 1, 1.0).unwrap();
        assert_eq!(spec.eigenvalues.len(), 2);
        assert!((spec.eigenvalues[0] + 2.0).abs() < 1e-12);
        assert!(spec.eigenvalues[1].abs() < 1e-12);
        assert_eq!(spec.highest_weight_energies.len(), 1);
        assert!((spec.highest_weight_energies[0] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn n4_ell2_contains_minus_j() {
        let spec = sector_spectrum(4, 2, 1.0).unwrap();
        assert!(spec
            .highest_weight_energies
            .iter()
            .any(|e| (e + 1.0).abs() < 1e-10));
        // ℓ=0 sector is the vacuum
        let vac = sector_spectrum(4, 0, 1.0).unwrap();
        assert_eq!(vac.eigenvalues, vec![0.0]);
    }

    #[test]
    fn transfer_blocks_on_vacuum() {
        let f = F64Field;
        let lam = Cx::new(0.37, -0.21);
        let v = StateVector::<f64>::vacuum(5);
        let [a, _b, c, d] = transfer_apply_all(&f, &lam, &v);
        // A|0⟩ = (λ+i/2)^N |0⟩, D|0⟩ = (λ−i/2)^N |0⟩, C|0⟩ = 0
        let ap = Cx::new(0.37, 0.29).powu(5);
        let dp = Cx::new(0.37, -0.71).powu(5);
        assert!(a.amp[0].sub(&ap).modulus() < 1e-13);
        assert!(d.amp[0].sub(&dp).modulus() < 1e-13);
        assert!(a.amp[1..].iter().all(|x| x.modulus() < 1e-14));
        assert!(c.norm() < 1e-14);
    }

    #[test]
    fn bethe_vector_sector_and_eigenvalue() {
        // N=2, root {0}: one-down-spin eigenvector with E = −2J
        let v = bethe_vector_f64(&[c64(0.0, 0.0)], 2).unwrap();
        assert_eq!(v.magnetization_sector(1e-10), Some(1));
        let f = F64Field;
        let r = eigen_residual(&f, &v, -2.0, 1.0);
        assert!(r < 1e-12, "residual {r}");
    }

    #[test]
    fn b_operators_commute() {
        let f = F64Field;
        let l1 = Cx::new(0.4, 0.17);
        let l2 = Cx::new(-0.8, -0.4);
        let v = StateVector::<f64>::vacuum(6);
        let b12 = transfer_block_apply(
            &f,
            Block::B,
            &l1,
            &transfer_block_apply(&f, Block::B, &l2, &v),
        );
        let b21 = transfer_block_apply(
            &f,
            Block::B,
            &l2,
            &transfer_block_apply(&f, Block::B, &l1, &v),
        );
        let diff = b12.sub(&b21);
        assert!(diff.norm() / b12.norm() < 1e-12);
    }

    #[test]
    fn transfer_eigenvalue_matches_offshell_lambda() {
        // on-shell ℓ=1 solution of N=4: λ = 1/2 (BT number k=1: cot(π/4)/2)
        let root = c64(0.5, 0.0);
        let norms = crate::bethe::residual_norms_f64(4, &[root]);
        assert!(norms.scaled < 1e-12);
        let v = bethe_vector_f64(&[root], 4).unwrap();
        let f = F64Field;
        let lam = Cx::new(0.9, 0.3);
        let tv = transfer_matrix_apply(&f, &lam, &v);
        let expect = crate::bethe::offshell_eigenvalue(
            &f,
            &lam,
            4,
            &[Cx::new(0.5, 0.0)],
        )
        .unwrap();
        let diff = tv.sub(&v.scale(&expect));
        assert!(diff.norm() / tv.norm() < 1e-12);
    }

    #[test]
    fn eq15_reproduction() {
        let check = n4_vector_check();
        assert!(check.pass, "{check:?}");
    }

    #[test]
    fn scaling_exponent_n4() {
        let sol = BetheSolution::from_roots(4, vec![c64(0.0, 0.5), c64(0.0, -0.5)]);
        let slope = singular_pair_norm_scaling(4, &sol).unwrap();
        assert!((slope - 4.0).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn size_cap() {
        assert!(matches!(
            sector_spectrum(20, 2, 1.0),
            Err(OracleError::SizeCap(20))
        ));
        assert!(matches!(
            bethe_vector_f64(&[c64(0.0, 0.0)], 15),
            Err(OracleError::SizeCap(15))
        ));
    }

    #[test]
    fn regularized_vector_precision_guard() {
        let sol = BetheSolution::from_roots(
            12,
            vec![c64(0.0, 0.5), c64(0.0, -0.5), c64(0.0, 0.0), c64(0.18, 0.0), c64(-0.18, 0.0)],
        );
        let f = BigField::with_decimal_digits(30);
        // ε^12 = 1e-36 < 1e-26 ⇒ refuse
        assert!(matches!(
            regularized_singular_vector(&f, &sol, 1e-3),
            Err(OracleError::PrecisionLoss(_, _))
        ));
    }
}
