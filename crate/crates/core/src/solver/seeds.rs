//! Seed generation for the multi-start search: real grid tuples, string
//! ladders per admissible content, and singular cores with the `±i/2` pair
//! pinned.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SolverConfig;
use crate::rigged::{is_admissible, Partition, SectorShape};

/// One Newton start: optional pinned singular pair plus the free roots.
#[derive(Clone, Debug)]
pub struct SeedSpec {
    pub pinned_singular: bool,
    pub unknowns: Vec<Complex64>,
}

/// Per-round adjustments applied by the completeness escalation.
#[derive(Clone, Debug)]
pub struct RoundParams {
    /// Grid density multiplier (1 on the first pass, 4 when escalating).
    pub density: u32,
    /// Extra string deviations beyond the configured list.
    pub extra_deviations: Vec<f64>,
    /// Replace the configured deviation list entirely (extended rounds hunt
    /// sub-f64 deviations near the exact-string manifold).
    pub override_deviations: Option<Vec<f64>>,
}

impl Default for RoundParams {
    fn default() -> Self {
        RoundParams {
            density: 1,
            extra_deviations: Vec::new(),
            override_deviations: None,
        }
    }
}

/// Largest real 1-string root grows like cot(π/N)/2; clip wide grids there
/// so tuple budgets go to the populated region.
fn real_root_bound(n: u32) -> f64 {
    0.5 / (std::f64::consts::PI / n as f64).tan() + 1.0
}

/// Center bound for an m-string row: the outermost m-string of a sector
/// sits near cot(mπ/2N)/2.
fn row_center_bound(n: u32, len: u32) -> f64 {
    if len <= 1 {
        real_root_bound(n)
    } else {
        0.5 / (len as f64 * std::f64::consts::PI / (2.0 * n as f64)).tan() + 0.75
    }
}

fn grid_points(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step).round() as usize + 1;
    (0..count).map(|k| lo + k as f64 * step).collect()
}

/// Symmetric grid `{0, ±step, ±2·step, …}` out to `±bound`; string centers
/// use this so seed sets share the census's negation symmetry.
fn grid_points_symmetric(bound: f64, step: f64) -> Vec<f64> {
    let half = (bound / step).floor() as i64;
    (-half..=half).map(|k| k as f64 * step).collect()
}

fn combinations(n: usize, m: usize) -> u128 {
    crate::binomial(n as u64, m as u64)
}

/// Strictly increasing index tuples mapped through a value grid.
fn increasing_tuples(values: &[f64], m: usize, out: &mut Vec<Vec<f64>>) {
    let mut idx: Vec<usize> = (0..m).collect();
    if values.len() < m {
        return;
    }
    loop {
        out.push(idx.iter().map(|&i| values[i]).collect());
        // advance combination
        let mut pos = m;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] != pos + values.len() - m {
                break;
            }
            if pos == 0 {
                return;
            }
        }
        idx[pos] += 1;
        for k in pos + 1..m {
            idx[k] = idx[k - 1] + 1;
        }
    }
}

/// Ideal ladder for a row of length `len` centered at `a`, imaginary
/// offsets scaled by `1 + dev`.
fn ladder(a: f64, len: u32, dev: f64) -> Vec<Complex64> {
    (0..len)
        .map(|s| {
            let off = (len as f64 - 1.0) / 2.0 - s as f64;
            Complex64::new(a, off * (1.0 + dev))
        })
        .collect()
}

/// Push near-coincident seed components apart so Newton does not start on
/// the collapsed manifold. Deterministic.
fn nudge(mut roots: Vec<Complex64>) -> Vec<Complex64> {
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < 0.04 {
                if (roots[i].im - roots[j].im).abs() < 0.02 {
                    roots[i] += Complex64::new(0.0, 0.02);
                    roots[j] -= Complex64::new(0.0, 0.02);
                } else {
                    roots[i] += Complex64::new(0.02, 0.0);
                    roots[j] -= Complex64::new(0.02, 0.0);
                }
            }
        }
    }
    roots
}

/// Seed tuples for one content: the product of per-row center grids with a
/// shared deviation applied to all ladders.
fn content_family(
    n: u32,
    content: &Partition,
    cfg: &SolverConfig,
    round: &RoundParams,
    budget: usize,
    out: &mut Vec<Vec<Complex64>>,
) {
    // Real roots crowd like tan(πI/N): the near-origin spacing shrinks with
    // N, so the configured step (tuned for N=25) coarsens for shorter chains.
    let step = cfg.seed_grid.step * (25.0 / n as f64).max(1.0) / round.density as f64;
    let all_ones = content.parts().iter().all(|&p| p == 1);

    let mut devs: Vec<f64> = if all_ones {
        vec![0.0]
    } else if let Some(over) = &round.override_deviations {
        over.clone()
    } else {
        let mut d = cfg.string_seed_deviations.clone();
        d.extend(round.extra_deviations.iter().copied());
        d.sort_by(f64::total_cmp);
        d.dedup();
        d
    };
    if devs.is_empty() {
        devs.push(0.0);
    }

    // Budget is shared across deviations and split across the per-run
    // center-combination product.
    let per_dev = (budget / devs.len()).max(1);
    let runs = content.runs();

    // Allocate grid points per run so the product of combination counts
    // stays within budget, shrinking all runs' grids by a common factor.
    let use_plain_grid = all_ones && content.len() <= 2;
    let plain_lo = cfg.seed_grid.lo.max(-real_root_bound(n));
    let plain_hi = cfg.seed_grid.hi.min(real_root_bound(n));
    let run_bound = |len: u32| -> f64 { row_center_bound(n, len).min(cfg.seed_grid.hi) };
    let mut shrink = 1.0f64;
    let tuples_for = |shrink: f64| -> u128 {
        let mut total: u128 = 1;
        for &(len, mult) in &runs {
            let pts = if use_plain_grid {
                grid_points(plain_lo, plain_hi, step * shrink).len()
            } else {
                grid_points_symmetric(run_bound(len), step * shrink).len()
            };
            total = total.saturating_mul(combinations(pts, mult));
        }
        total
    };
    while tuples_for(shrink) > per_dev as u128 && shrink < 1e4 {
        shrink *= 1.15;
    }

    for &dev in &devs {
        let mut run_choices: Vec<Vec<Vec<f64>>> = Vec::new();
        for &(len, mult) in &runs {
            let values = if use_plain_grid {
                grid_points(plain_lo, plain_hi, step * shrink)
            } else {
                grid_points_symmetric(run_bound(len), step * shrink)
            };
            let mut tuples = Vec::new();
            increasing_tuples(&values, mult, &mut tuples);
            run_choices.push(tuples);
        }
        // cartesian product across runs
        let mut stack: Vec<Vec<f64>> = vec![Vec::new()];
        for choices in &run_choices {
            let mut next = Vec::with_capacity(stack.len() * choices.len());
            for prefix in &stack {
                for c in choices {
                    let mut t = prefix.clone();
                    t.extend(c);
                    next.push(t);
                }
            }
            stack = next;
            if stack.len() > per_dev {
                stack.truncate(per_dev);
            }
        }
        for centers in stack {
            let mut roots = Vec::with_capacity(content.weight() as usize);
            let mut ci = 0;
            for &(len, mult) in &runs {
                for _ in 0..mult {
                    roots.extend(ladder(centers[ci], len, dev));
                    ci += 1;
                }
            }
            out.push(nudge(roots));
        }
    }
}

/// Union of regular-content families, singular-core families, and jittered
/// restart copies.
pub fn seed_set(n: u32, ell: u32, cfg: &SolverConfig, round: &RoundParams) -> Vec<SeedSpec> {
    let shape = SectorShape::spin_half(n);
    let mut seeds: Vec<SeedSpec> = Vec::new();

    let contents: Vec<Partition> = Partition::all_of(ell)
        .into_iter()
        .filter(|nu| is_admissible(&shape, nu))
        .collect();
    let n_families = contents.len().max(1);
    let family_budget = (cfg.max_seeds / (2 * n_families)).max(1000);

    for content in &contents {
        let mut tuples = Vec::new();
        content_family(n, content, cfg, round, family_budget, &mut tuples);
        seeds.extend(tuples.into_iter().map(|unknowns| SeedSpec {
            pinned_singular: false,
            unknowns,
        }));
    }

    // Singular cores: the ±i/2 pair pinned, remaining ℓ−2 roots seeded from
    // every admissible content of the reduced sector.
    if ell >= 2 {
        if ell == 2 {
            seeds.push(SeedSpec {
                pinned_singular: true,
                unknowns: Vec::new(),
            });
        } else {
            let rest_contents: Vec<Partition> = Partition::all_of(ell - 2);
            let rest_budget = (cfg.max_seeds / (2 * rest_contents.len().max(1))).max(1000);
            for content in &rest_contents {
                let mut tuples = Vec::new();
                content_family(n, content, cfg, round, rest_budget, &mut tuples);
                for unknowns in tuples {
                    // keep free roots away from the pinned pair
                    let adjusted: Vec<Complex64> = unknowns
                        .iter()
                        .map(|&z| {
                            if (z - Complex64::new(0.0, 0.5)).norm() < 0.03
                                || (z + Complex64::new(0.0, 0.5)).norm() < 0.03
                            {
                                z + Complex64::new(0.03, 0.0)
                            } else {
                                z
                            }
                        })
                        .collect();
                    seeds.push(SeedSpec {
                        pinned_singular: true,
                        unknowns: adjusted,
                    });
                }
            }
        }
    }

    // Deterministic jittered restarts.
    if cfg.jitter_restarts > 0 {
        let step = cfg.seed_grid.step * (25.0 / n as f64).max(1.0) / round.density as f64;
        let base = seeds.len();
        let mut extra = Vec::with_capacity(base * cfg.jitter_restarts as usize);
        for copy in 0..cfg.jitter_restarts {
            for (idx, seed) in seeds.iter().enumerate() {
                let mut rng = ChaCha8Rng::seed_from_u64(
                    cfg.rng_seed ^ (copy as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
                        ^ (idx as u64).wrapping_mul(0x2545_f491_4f6c_dd1d),
                );
                let unknowns = seed
                    .unknowns
                    .iter()
                    .map(|z| {
                        z + Complex64::new(
                            rng.random_range(-0.3..0.3) * step,
                            rng.random_range(-0.03..0.03),
                        )
                    })
                    .collect();
                extra.push(SeedSpec {
                    pinned_singular: seed.pinned_singular,
                    unknowns,
                });
            }
        }
        seeds.extend(extra);
    }

    if seeds.len() > cfg.max_seeds {
        seeds.truncate(cfg.max_seeds);
    }
    seeds
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladders() {
        let l = ladder(0.4, 3, 0.0);
        assert_eq!(l[0], Complex64::new(0.4, 1.0));
        assert_eq!(l[1], Complex64::new(0.4, 0.0));
        assert_eq!(l[2], Complex64::new(0.4, -1.0));
        let two = ladder(-1.0, 2, 0.1);
        assert!((two[0].im - 0.55).abs() < 1e-15);
    }

    #[test]
    fn nudge_separates_collisions() {
        let r = nudge(vec![Complex64::new(0.4, 0.0), Complex64::new(0.4, 0.0)]);
        assert!((r[0] - r[1]).norm() > 0.03);
    }

    #[test]
    fn seed_families_cover_expected_patterns() {
        let cfg = SolverConfig::default();
        let seeds = seed_set(12, 6, &cfg, &RoundParams::default());
        assert!(seeds.len() <= cfg.max_seeds);
        assert!(seeds.iter().any(|s| s.pinned_singular));
        assert!(seeds.iter().any(|s| !s.pinned_singular && s.unknowns.len() == 6));
        // ℓ=2 singular core has no unknowns
        let s2 = seed_set(4, 2, &cfg, &RoundParams::default());
        assert!(s2.iter().any(|s| s.pinned_singular && s.unknowns.is_empty()));
    }

    #[test]
    fn increasing_tuples_count() {
        let vals = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let mut out = Vec::new();
        increasing_tuples(&vals, 2, &mut out);
        assert_eq!(out.len(), 10);
        assert!(out.iter().all(|t| t[0] < t[1]));
    }

    #[test]
    fn family_budget_respected() {
        let cfg = SolverConfig {
            max_seeds: 50_000,
            ..SolverConfig::default()
        };
        let seeds = seed_set(10, 4, &cfg, &RoundParams::default());
        assert!(seeds.len() <= 50_000);
    }
}
