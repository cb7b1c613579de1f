//! Rigged configurations: integer partitions `ν`, vacancy numbers `P_k(ν)`,
//! admissibility, enumeration, counting and the rigging flip.
//!
//! A rigged configuration is a partition together with one integer rigging
//! per row, bounded by `0 ≤ J_i ≤ P_{ν_i}(ν)`. Rows of equal length form a
//! multiset; the canonical stored form keeps their riggings weakly
//! decreasing so multiset equality is plain list equality.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::binomial;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RiggedError {
    #[error("partition parts must be weakly decreasing and positive: {0:?}")]
    InvalidPartition(Vec<u32>),
    #[error("rigging {rigging} out of bounds 0..={bound} for row length {row}")]
    RiggingOutOfBounds { row: u32, rigging: i64, bound: i64 },
    #[error("riggings of equal-length rows must be weakly decreasing")]
    NonCanonicalRiggings,
    #[error("partition {0:?} is not admissible for this shape")]
    NotAdmissible(Vec<u32>),
}

/// Weakly decreasing list of positive integers (row lengths of a Young diagram).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, RiggedError> {
        if parts.iter().any(|&p| p == 0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(RiggedError::InvalidPartition(parts));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Total number of boxes `|ν|`.
    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Boxes contained in the first `k` columns: `Σ_j min(k, ν_j)`.
    pub fn boxes_in_first_columns(&self, k: u32) -> u32 {
        self.parts.iter().map(|&p| p.min(k)).sum()
    }

    /// All partitions of `n`, in descending lexicographic order.
    pub fn all_of(n: u32) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(remaining: u32, max_part: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if remaining == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            let hi = remaining.min(max_part);
            for p in (1..=hi).rev() {
                cur.push(p);
                rec(remaining - p, p, cur, out);
                cur.pop();
            }
        }
        rec(n, n, &mut cur, &mut out);
        out
    }

    /// Distinct row lengths with multiplicities, longest first.
    pub fn runs(&self) -> Vec<(u32, usize)> {
        let mut runs: Vec<(u32, usize)> = Vec::new();
        for &p in &self.parts {
            match runs.last_mut() {
                Some((len, m)) if *len == p => *m += 1,
                _ => runs.push((p, 1)),
            }
        }
        runs
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Shape `μ` of the space of states. Spin-1/2 chains use `μ = (1, …, 1)`
/// with `N` entries; higher-spin shapes are supported for vacancy-number
/// and admissibility queries only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorShape {
    pub mu: Vec<u32>,
    pub n_sites: u32,
}

impl SectorShape {
    /// Spin-1/2 chain of length `n`.
    pub fn spin_half(n: u32) -> Self {
        SectorShape {
            mu: vec![1; n as usize],
            n_sites: n,
        }
    }

    pub fn is_spin_half(&self) -> bool {
        self.mu.len() == self.n_sites as usize && self.mu.iter().all(|&m| m == 1)
    }
}

/// Vacancy number `P_k(ν) = Σ_j min(k, μ_j) − 2 Σ_j min(k, ν_j)`.
///
/// Total over all partitions; the result may be negative. Exact integers
/// throughout.
pub fn vacancy_number(shape: &SectorShape, nu: &Partition, k: u32) -> i64 {
    let mu_sum: i64 = shape.mu.iter().map(|&m| m.min(k) as i64).sum();
    let nu_sum = nu.boxes_in_first_columns(k) as i64;
    mu_sum - 2 * nu_sum
}

/// A partition is admissible when every row length has a non-negative
/// vacancy number.
pub fn is_admissible(shape: &SectorShape, nu: &Partition) -> bool {
    let ok = nu
        .runs()
        .iter()
        .all(|&(len, _)| vacancy_number(shape, nu, len) >= 0);
    if shape.is_spin_half() {
        // The column-count formula makes this equivalent to |ν| ≤ N/2.
        debug_assert_eq!(ok, 2 * nu.weight() <= shape.n_sites);
    }
    ok
}

/// Partition plus one rigging per row, index-aligned with `nu.parts()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RiggedConfiguration {
    pub nu: Partition,
    pub riggings: Vec<i64>,
}

impl RiggedConfiguration {
    /// Validate bounds and canonical ordering against a shape.
    pub fn new(
        nu: Partition,
        riggings: Vec<i64>,
        shape: &SectorShape,
    ) -> Result<Self, RiggedError> {
        if !is_admissible(shape, &nu) {
            return Err(RiggedError::NotAdmissible(nu.parts().to_vec()));
        }
        assert_eq!(nu.len(), riggings.len(), "one rigging per row");
        for (i, (&row, &r)) in nu.parts().iter().zip(&riggings).enumerate() {
            let bound = vacancy_number(shape, &nu, row);
            if r < 0 || r > bound {
                return Err(RiggedError::RiggingOutOfBounds {
                    row,
                    rigging: r,
                    bound,
                });
            }
            if i > 0 && nu.parts()[i - 1] == row && riggings[i - 1] < r {
                return Err(RiggedError::NonCanonicalRiggings);
            }
        }
        Ok(RiggedConfiguration { nu, riggings })
    }

    /// Vacancy numbers per row, index-aligned with the riggings.
    pub fn vacancies(&self, shape: &SectorShape) -> Vec<i64> {
        self.nu
            .parts()
            .iter()
            .map(|&row| vacancy_number(shape, &self.nu, row))
            .collect()
    }

    /// Serialize as `{"nu": [...], "riggings": [...], "vacancy": [...]}`.
    pub fn to_json(&self, shape: &SectorShape) -> serde_json::Value {
        serde_json::json!({
            "nu": self.nu.parts(),
            "riggings": self.riggings,
            "vacancy": self.vacancies(shape),
        })
    }

    /// Text rendering in the style of vacancy | diagram | rigging rows.
    pub fn render(&self, shape: &SectorShape) -> String {
        let vac = self.vacancies(shape);
        let width = vac.iter().map(|v| v.to_string().len()).max().unwrap_or(1);
        let mut out = String::new();
        for ((&row, &r), v) in self.nu.parts().iter().zip(&self.riggings).zip(&vac) {
            let boxes = "[]".repeat(row as usize);
            out.push_str(&format!("{v:>width$} {boxes} {r}\n"));
        }
        out
    }
}

/// All canonical rigged configurations with `|ν| = ell`, optionally
/// restricted to one partition. Deterministic order: partitions in
/// descending lexicographic order, riggings ascending lexicographically.
pub fn enumerate_rigged_configs(
    shape: &SectorShape,
    ell: u32,
    content_filter: Option<&Partition>,
) -> Vec<RiggedConfiguration> {
    let mut out = Vec::new();
    let partitions = match content_filter {
        Some(p) => {
            if p.weight() == ell {
                vec![p.clone()]
            } else {
                Vec::new()
            }
        }
        None => Partition::all_of(ell),
    };
    for nu in partitions {
        if !is_admissible(shape, &nu) {
            continue;
        }
        // Per run of equal-length rows: weakly decreasing riggings in 0..=P.
        let runs = nu.runs();
        let bounds: Vec<i64> = runs
            .iter()
            .map(|&(len, _)| vacancy_number(shape, &nu, len))
            .collect();
        let mut riggings: Vec<Vec<i64>> = vec![Vec::new()];
        for (&(_, mult), &bound) in runs.iter().zip(&bounds) {
            let mut next = Vec::new();
            for prefix in &riggings {
                let mut stack: Vec<Vec<i64>> = vec![Vec::new()];
                for _ in 0..mult {
                    let mut grown = Vec::new();
                    for run in &stack {
                        let hi = run.last().copied().unwrap_or(bound);
                        for r in 0..=hi {
                            let mut g = run.clone();
                            g.push(r);
                            grown.push(g);
                        }
                    }
                    stack = grown;
                }
                for run in stack {
                    let mut full = prefix.clone();
                    full.extend(run);
                    next.push(full);
                }
            }
            riggings = next;
        }
        riggings.sort();
        for r in riggings {
            out.push(RiggedConfiguration {
                nu: nu.clone(),
                riggings: r,
            });
        }
    }
    out
}

/// Number of rigged configurations in the sector, computed from per-run
/// multichoose products without materializing the list. For spin-1/2 this
/// must agree with `C(N, ℓ) − C(N, ℓ−1)`; the identity is asserted.
pub fn count_rigged_configs(shape: &SectorShape, ell: u32) -> u128 {
    let mut total: u128 = 0;
    for nu in Partition::all_of(ell) {
        if !is_admissible(shape, &nu) {
            continue;
        }
        let mut prod: u128 = 1;
        for (len, mult) in nu.runs() {
            let p = vacancy_number(shape, &nu, len);
            debug_assert!(p >= 0);
            // weakly decreasing tuples of length mult from 0..=p
            prod *= binomial(p as u64 + mult as u64, mult as u64);
        }
        total += prod;
    }
    if shape.is_spin_half() && 2 * ell <= shape.n_sites {
        let n = shape.n_sites as u64;
        let closed = binomial(n, ell as u64) - binomial(n, ell as u64 - 1);
        assert_eq!(
            total, closed,
            "rigged configuration count disagrees with binomial formula"
        );
    }
    total
}

/// Complement every rigging: `r_i → P_{ν_i}(ν) − r_i`, then restore the
/// canonical order of equal-length rows. An involution on valid inputs.
pub fn flip(rc: &RiggedConfiguration, shape: &SectorShape) -> RiggedConfiguration {
    let vac = rc.vacancies(shape);
    let mut riggings: Vec<i64> = rc
        .riggings
        .iter()
        .zip(&vac)
        .map(|(&r, &p)| p - r)
        .collect();
    let mut start = 0;
    for (_, mult) in rc.nu.runs() {
        riggings[start..start + mult].sort_unstable_by(|a, b| b.cmp(a));
        start += mult;
    }
    RiggedConfiguration {
        nu: rc.nu.clone(),
        riggings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn vacancy_examples() {
        // mu = (1^14), nu = (3,2,1,1): P_3 = 0, P_2 = 2, P_1 = 6
        let shape = SectorShape::spin_half(14);
        let nu = part(&[3, 2, 1, 1]);
        assert_eq!(vacancy_number(&shape, &nu, 3), 0);
        assert_eq!(vacancy_number(&shape, &nu, 2), 2);
        assert_eq!(vacancy_number(&shape, &nu, 1), 6);

        // spin-1, N=2: mu = (2,2), nu = (1,1) has P_1 = -2
        let spin1 = SectorShape {
            mu: vec![2, 2],
            n_sites: 2,
        };
        assert_eq!(vacancy_number(&spin1, &part(&[1, 1]), 1), -2);

        // empty nu: P_k = N for k >= 1
        let shape = SectorShape::spin_half(9);
        assert_eq!(vacancy_number(&shape, &Partition::empty(), 1), 9);
        assert_eq!(vacancy_number(&shape, &Partition::empty(), 5), 9);
        assert_eq!(vacancy_number(&shape, &Partition::empty(), 0), 0);
    }

    #[test]
    fn admissibility() {
        assert!(is_admissible(
            &SectorShape::spin_half(25),
            &part(&[1, 1])
        ));
        let spin1 = SectorShape {
            mu: vec![2, 2],
            n_sites: 2,
        };
        assert!(!is_admissible(&spin1, &part(&[1, 1])));
        assert!(is_admissible(&spin1, &part(&[2])));
        assert!(is_admissible(&spin1, &part(&[1])));
        // zero vacancy is allowed
        assert!(is_admissible(&SectorShape::spin_half(4), &part(&[1, 1])));
    }

    #[test]
    fn enumerate_n12_content_321() {
        let shape = SectorShape::spin_half(12);
        let rcs = enumerate_rigged_configs(&shape, 6, Some(&part(&[3, 2, 1])));
        assert_eq!(rcs.len(), 21);
        for rc in &rcs {
            assert_eq!(rc.riggings[0], 0); // P_3 = 0 forces the 3-row rigging
            assert!((0..=2).contains(&rc.riggings[1]));
            assert!((0..=6).contains(&rc.riggings[2]));
        }
    }

    #[test]
    fn enumerate_n25_ell2() {
        let shape = SectorShape::spin_half(25);
        let pairs = enumerate_rigged_configs(&shape, 2, Some(&part(&[1, 1])));
        assert_eq!(pairs.len(), 253);
        assert!(pairs
            .iter()
            .all(|rc| rc.riggings[0] >= rc.riggings[1] && rc.riggings[0] <= 21));
        let all = enumerate_rigged_configs(&shape, 2, None);
        assert_eq!(all.len(), 275);
        assert_eq!(count_rigged_configs(&shape, 2), 275);
    }

    #[test]
    fn count_small_sectors() {
        assert_eq!(count_rigged_configs(&SectorShape::spin_half(4), 2), 2);
        assert_eq!(count_rigged_configs(&SectorShape::spin_half(2), 1), 1);
    }

    #[test]
    fn count_matches_enumeration_and_binomial() {
        for n in 2..=16u32 {
            let shape = SectorShape::spin_half(n);
            for ell in 1..=n / 2 {
                let listed = enumerate_rigged_configs(&shape, ell, None);
                let counted = count_rigged_configs(&shape, ell);
                assert_eq!(listed.len() as u128, counted, "N={n} ell={ell}");
                // no duplicates, all valid
                for (i, rc) in listed.iter().enumerate() {
                    assert!(RiggedConfiguration::new(
                        rc.nu.clone(),
                        rc.riggings.clone(),
                        &shape
                    )
                    .is_ok());
                    for other in &listed[i + 1..] {
                        assert_ne!(rc, other);
                    }
                }
            }
        }
    }

    #[test]
    fn flip_examples() {
        let shape25 = SectorShape::spin_half(25);
        let rc = RiggedConfiguration::new(part(&[2]), vec![1], &shape25).unwrap();
        assert_eq!(flip(&rc, &shape25).riggings, vec![20]);

        let shape12 = SectorShape::spin_half(12);
        let rc = RiggedConfiguration::new(part(&[3, 2, 1]), vec![0, 0, 5], &shape12).unwrap();
        let f = flip(&rc, &shape12);
        assert_eq!(f.riggings, vec![0, 2, 1]);

        // all-zero riggings map to the vacancy numbers
        let rc = RiggedConfiguration::new(part(&[2, 1]), vec![0, 0], &shape12).unwrap();
        let f = flip(&rc, &shape12);
        assert_eq!(f.riggings, rc.vacancies(&shape12));
    }

    #[test]
    fn flip_is_involution() {
        let shape = SectorShape::spin_half(12);
        for ell in 1..=6 {
            for rc in enumerate_rigged_configs(&shape, ell, None) {
                let back = flip(&flip(&rc, &shape), &shape);
                assert_eq!(back, rc);
            }
        }
    }

    #[test]
    fn rigging_validation() {
        let shape = SectorShape::spin_half(12);
        assert!(matches!(
            RiggedConfiguration::new(part(&[3, 2, 1]), vec![1, 0, 0], &shape),
            Err(RiggedError::RiggingOutOfBounds { .. })
        ));
        assert!(matches!(
            RiggedConfiguration::new(part(&[1, 1]), vec![0, 3], &shape),
            Err(RiggedError::NonCanonicalRiggings)
        ));
        assert!(matches!(
            RiggedConfiguration::new(part(&[4, 3]), vec![0, 0], &shape),
            Err(RiggedError::NotAdmissible(_))
        ));
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
    }
}
