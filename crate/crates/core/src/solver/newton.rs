//! Damped Newton iteration on the cleared-denominator Bethe system with an
//! analytic Jacobian, generic over working precision.
//!
//! Singular candidates pin the `±i/2` pair exactly and iterate only on the
//! remaining roots; the pinned equations vanish identically in cleared form.

use crate::bethe::{residual_norms, ResidualNorms};
use crate::scalar::{Cx, Field, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NewtonFailure {
    MaxIters,
    Diverged,
    RepeatedRoot,
    SingularJacobian,
}

pub struct Refined<R> {
    /// Full root set, pinned ones first.
    pub roots: Vec<Cx<R>>,
    pub norms: ResidualNorms,
    pub iters: u32,
}

pub struct NewtonParams {
    pub tol_scaled: f64,
    /// Relative-residual convergence requirement. Without it the iteration
    /// would stop on degenerate near-manifold points where both cleared
    /// terms are tiny and any absolute norm is already below tolerance.
    pub tol_rel: f64,
    pub max_iters: u32,
    pub dedup_tol: f64,
    pub divergence: f64,
    pub max_halvings: u32,
    /// Give up when the best objective has not improved tenfold within
    /// this many iterations (hopeless seeds dominate search cost).
    pub stall_iters: u32,
}

/// Residuals F_k and Jacobian for the unknown block, with `pinned` roots
/// participating in the products but carrying no equations.
fn system<F: Field>(
    f: &F,
    n_sites: u32,
    pinned: &[Cx<F::R>],
    unknowns: &[Cx<F::R>],
) -> (Vec<Cx<F::R>>, Vec<Vec<Cx<F::R>>>) {
    let m = unknowns.len();
    let half_i = Cx::from_f64(f, 0.0, 0.5);
    let i = Cx::from_f64(f, 0.0, 1.0);
    let all: Vec<&Cx<F::R>> = pinned.iter().chain(unknowns.iter()).collect();
    let np = pinned.len();
    let mut residual = Vec::with_capacity(m);
    let mut jacobian = vec![vec![Cx::zero(); m]; m];
    for k in 0..m {
        let lk = &unknowns[k];
        let others: Vec<(usize, &Cx<F::R>)> = all
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != np + k)
            .map(|(j, z)| (j, *z))
            .collect();
        let a = lk.add(&half_i).powu(n_sites);
        let b = lk.sub(&half_i).powu(n_sites);
        let da = lk.add(&half_i).powu(n_sites - 1).scale(&f.real(n_sites as f64));
        let db = lk.sub(&half_i).powu(n_sites - 1).scale(&f.real(n_sites as f64));
        let mut p1 = Cx::one();
        let mut p2 = Cx::one();
        for &(_, lj) in &others {
            let d = lk.sub(lj);
            p1 = p1.mul(&d.sub(&i));
            p2 = p2.mul(&d.add(&i));
        }
        residual.push(a.mul(&p1).sub(&b.mul(&p2)));

        // ∂F_k/∂λ_k and cross terms via leave-one-out products
        let mut dkk = da.mul(&p1).sub(&db.mul(&p2));
        for (idx, &(j, _)) in others.iter().enumerate() {
            let mut q1 = Cx::one();
            let mut q2 = Cx::one();
            for (idx2, &(_, lj2)) in others.iter().enumerate() {
                if idx2 != idx {
                    let d = lk.sub(lj2);
                    q1 = q1.mul(&d.sub(&i));
                    q2 = q2.mul(&d.add(&i));
                }
            }
            dkk = dkk.add(&a.mul(&q1).sub(&b.mul(&q2)));
            if j >= np {
                // cross derivative w.r.t. unknown j−np
                let cross = b.mul(&q2).sub(&a.mul(&q1));
                jacobian[k][j - np] = cross;
            }
        }
        jacobian[k][k] = dkk;
    }
    (residual, jacobian)
}

/// Solve `J x = r` by Gaussian elimination with partial pivoting.
fn solve_linear<R: Scalar>(
    mut j: Vec<Vec<Cx<R>>>,
    mut r: Vec<Cx<R>>,
) -> Result<Vec<Cx<R>>, NewtonFailure> {
    let n = r.len();
    for col in 0..n {
        let mut best = col;
        let mut best_mag = j[col][col].norm_sqr();
        for row in col + 1..n {
            let mag = j[row][col].norm_sqr();
            if mag > best_mag {
                best_mag = mag;
                best = row;
            }
        }
        if best_mag.to_f64() == 0.0 {
            return Err(NewtonFailure::SingularJacobian);
        }
        j.swap(col, best);
        r.swap(col, best);
        for row in col + 1..n {
            let factor = j[row][col].div(&j[col][col]);
            for c in col..n {
                let t = factor.mul(&j[col][c]);
                j[row][c] = j[row][c].sub(&t);
            }
            let t = factor.mul(&r[col]);
            r[row] = r[row].sub(&t);
        }
    }
    let mut x = vec![Cx::zero(); n];
    for row in (0..n).rev() {
        let mut acc = r[row].clone();
        for c in row + 1..n {
            let t = j[row][c].mul(&x[c]);
            acc = acc.sub(&t);
        }
        x[row] = acc.div(&j[row][row]);
    }
    Ok(x)
}

/// Line-search objective: both criteria as a max of ratios to their
/// tolerances; below 1 means converged.
fn objective(norms: &ResidualNorms, params: &NewtonParams) -> f64 {
    (norms.scaled / params.tol_scaled).max(norms.relative / params.tol_rel)
}

/// Damped Newton refinement. `pinned` roots stay fixed; `seed` provides the
/// unknowns. Returns the full root set on convergence.
pub fn refine<F: Field>(
    f: &F,
    n_sites: u32,
    pinned: &[Cx<F::R>],
    seed: &[Cx<F::R>],
    params: &NewtonParams,
) -> Result<Refined<F::R>, NewtonFailure> {
    let mut unknowns: Vec<Cx<F::R>> = seed.to_vec();
    let assemble = |u: &[Cx<F::R>]| -> Vec<Cx<F::R>> {
        pinned.iter().cloned().chain(u.iter().cloned()).collect()
    };
    let mut current = objective(&residual_norms(f, n_sites, &assemble(&unknowns)), params);
    // The residual landscape is non-convex near degenerate manifolds where
    // monotone line search stalls; a bounded number of consecutive full
    // steps without decrease keeps pure Newton's quadratic basin reachable.
    let mut forced = 0u32;
    let mut best = current;
    let mut best_iter = 0u32;
    for it in 0..=params.max_iters {
        if current < best / 10.0 {
            best = current;
            best_iter = it;
        } else if it > best_iter + params.stall_iters {
            return Err(NewtonFailure::MaxIters);
        }
        if current < 1.0 {
            let all = assemble(&unknowns);
            if has_repeats(&all, params.dedup_tol) {
                return Err(NewtonFailure::RepeatedRoot);
            }
            return Ok(Refined {
                norms: residual_norms(f, n_sites, &all),
                roots: all,
                iters: it,
            });
        }
        if it == params.max_iters {
            break;
        }
        let (residual, jacobian) = system(f, n_sites, pinned, &unknowns);
        let step = solve_linear(jacobian, residual)?;
        let mut factor = f.real(1.0);
        let mut accepted = false;
        for _ in 0..=params.max_halvings {
            let trial: Vec<Cx<F::R>> = unknowns
                .iter()
                .zip(&step)
                .map(|(u, s)| u.sub(&s.scale(&factor)))
                .collect();
            if trial.iter().all(|z| z.is_finite()) {
                let norm = objective(&residual_norms(f, n_sites, &assemble(&trial)), params);
                if norm < current {
                    unknowns = trial;
                    current = norm;
                    accepted = true;
                    forced = 0;
                    break;
                }
            }
            factor = factor.div(&f.real(2.0));
        }
        if !accepted {
            forced += 1;
            if forced > 12 {
                return Err(NewtonFailure::MaxIters);
            }
            let trial: Vec<Cx<F::R>> = unknowns
                .iter()
                .zip(&step)
                .map(|(u, s)| u.sub(s))
                .collect();
            if !trial.iter().all(|z| z.is_finite()) {
                return Err(NewtonFailure::Diverged);
            }
            current = objective(&residual_norms(f, n_sites, &assemble(&trial)), params);
            unknowns = trial;
        }
        if unknowns
            .iter()
            .any(|z| z.modulus().to_f64() > params.divergence)
        {
            return Err(NewtonFailure::Diverged);
        }
    }
    Err(NewtonFailure::MaxIters)
}

fn has_repeats<R: Scalar>(roots: &[Cx<R>], tol: f64) -> bool {
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if roots[i].sub(&roots[j]).modulus().to_f64() < tol {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{BigField, F64Field};

    fn params() -> NewtonParams {
        NewtonParams {
            tol_scaled: 1e-12,
            tol_rel: 1e-8,
            max_iters: 200,
            dedup_tol: 1e-8,
            divergence: 1e6,
            max_halvings: 10,
            stall_iters: 60,
        }
    }

    #[test]
    fn n2_single_root_converges_to_zero() {
        let f = F64Field;
        let seed = vec![Cx::new(0.3, 0.0)];
        let out = refine(&f, 2, &[], &seed, &params()).unwrap();
        assert!(out.roots[0].modulus() < 1e-9);
        assert!(out.norms.relative < 1e-12);
    }

    #[test]
    fn quintic_singular_solution_via_pinned_pair() {
        // f64 refinement alone localizes the roots; high accuracy is the
        // polish stage's job (see solver::newton_refine)
        let f = F64Field;
        let pinned = vec![Cx::new(0.0, 0.5), Cx::new(0.0, -0.5)];
        let seed = vec![Cx::new(0.0, 0.0), Cx::new(0.18, 0.0), Cx::new(-0.18, 0.0)];
        let out = refine(&f, 12, &pinned, &seed, &params()).unwrap();
        let mut vals: Vec<f64> = out.roots[2..].iter().map(|z| z.re).collect();
        vals.sort_by(f64::total_cmp);
        assert!((vals[2] - 0.178978221719006).abs() < 1e-7, "{}", vals[2]);
        assert!((vals[0] + 0.178978221719006).abs() < 1e-7);

        let fx = BigField::with_decimal_digits(60);
        let p = NewtonParams {
            tol_scaled: 1e-50,
            tol_rel: 1e-20,
            ..params()
        };
        let pinned: Vec<Cx<crate::scalar::Big>> =
            vec![Cx::from_f64(&fx, 0.0, 0.5), Cx::from_f64(&fx, 0.0, -0.5)];
        let seed: Vec<Cx<crate::scalar::Big>> = out.roots[2..]
            .iter()
            .map(|z| Cx::from_f64(&fx, z.re, z.im))
            .collect();
        let polished = refine(&fx, 12, &pinned, &seed, &p).unwrap();
        let mut vals: Vec<f64> = polished.roots[2..]
            .iter()
            .map(|z| Scalar::to_f64(&z.re))
            .collect();
        vals.sort_by(f64::total_cmp);
        assert!((vals[2] - 0.178978221719006).abs() < 1e-14);
    }

    #[test]
    fn converged_roots_are_pairwise_distinct() {
        let f = F64Field;
        let seed = vec![Cx::new(0.05, 0.0), Cx::new(-0.05, 0.0)];
        if let Ok(out) = refine(&f, 2, &[], &seed, &params()) {
            for i in 0..out.roots.len() {
                for j in i + 1..out.roots.len() {
                    assert!(out.roots[i].sub(&out.roots[j]).modulus() > 1e-8);
                }
            }
        }
    }

    #[test]
    fn extended_inner_two_string_resolves() {
        // N=25 inner 2-string near a ≈ 0.063 has deviation ~1e-30: only the
        // extended mode separates it from the degenerate manifold.
        let f = BigField::with_decimal_digits(60);
        let seed = vec![Cx::from_f64(&f, 0.09, 0.55), Cx::from_f64(&f, 0.09, -0.55)];
        let p = NewtonParams {
            tol_scaled: 1e-50,
            tol_rel: 1e-20,
            ..params()
        };
        let out = refine(&f, 25, &[], &seed, &p).unwrap();
        assert!(out.norms.relative < 1e-25);
        let a = Scalar::to_f64(&out.roots[0].re);
        assert!((a - 0.0629146).abs() < 1e-4, "center {a}");
    }
}
