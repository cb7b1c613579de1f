//! Bethe ansatz root censuses for the spin-1/2 isotropic Heisenberg chain,
//! classified and labelled by rigged configurations, with an independent
//! exact-diagonalization oracle for cross-checking every claim at small `N`.
//!
//! The crate is organized around five subsystems:
//!
//! - [`rigged`] — integer partitions, vacancy numbers, admissibility and
//!   enumeration of rigged configurations `(ν, J)`.
//! - [`bethe`] — evaluation of Bethe-equation residuals, energies, the
//!   singular-solution criterion and regularization constants, and off-shell
//!   transfer-matrix eigenvalue coefficients.
//! - [`solver`] — multi-start damped Newton search over a sector `(N, ℓ)`
//!   with deduplication, classification and completeness accounting, plus a
//!   direct polynomial root finder.
//! - [`strings`] — string decomposition of solutions, ordering keys, rigging
//!   assignment and exceptional-solution detection.
//! - [`oracle`] — dense `2^N` state vectors: Hamiltonian application, sector
//!   spectra, transfer-matrix blocks, Bethe vectors and regularized singular
//!   vectors.
//!
//! Floating arithmetic is generic over [`scalar::Field`]; the standard mode
//! runs in `f64`, the extended mode in arbitrary-precision binary floats
//! (≥ 30 significant decimal digits, default 60).

pub mod bethe;
pub mod manifest;
pub mod oracle;
pub mod report;
pub mod rigged;
pub mod scalar;
pub mod solver;
pub mod strings;

pub use bethe::{BetheSolution, SolutionClass};
pub use rigged::{Partition, RiggedConfiguration, SectorShape};
pub use solver::{SectorCensus, SolverConfig};

/// Binomial coefficient C(n, k) in exact integer arithmetic.
///
/// Sufficient range for every sector size this crate handles (N ≤ 64).
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::binomial;

    #[test]
    fn binomial_basics() {
        assert_eq!(binomial(25, 2), 300);
        assert_eq!(binomial(25, 1), 25);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(14, 7), 3432);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(0, 0), 1);
    }
}
