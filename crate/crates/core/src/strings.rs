//! String decomposition of Bethe solutions and the assignment of riggings.
//!
//! A solution's roots are grouped into strings (ladders `a + k·i` with unit
//! imaginary spacing). Solutions of one string content are ordered by the
//! real parts of their longest strings; riggings are then read off from the
//! block/chain structure of that order. Solutions that violate the block
//! structure are the exceptional ones; for two-down-spin sectors they join
//! the one-row family together with the physical complex solutions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bethe::BetheSolution;
use crate::rigged::{
    enumerate_rigged_configs, vacancy_number, Partition, RiggedConfiguration, SectorShape,
};

#[derive(Debug, Error)]
pub enum StringsError {
    #[error("solution is not conjugation-closed within tolerance {0:.1e}")]
    NotConjugationClosed(f64),
    #[error("no string grouping matches content {0} within tolerance")]
    DecompositionFailure(Partition),
    #[error("solution count {found} differs from rigged-configuration count {expected} for content {content}")]
    CountMismatch {
        content: Partition,
        found: usize,
        expected: usize,
    },
    #[error("block-monotone structure cannot be restored for content {0}")]
    AssignmentFailure(Partition),
}

/// A group of roots forming one (possibly deformed) string.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StringGroup {
    pub length: u32,
    pub center: f64,
    pub members: Vec<Complex64>,
    /// Max distance of a member from the ideal ladder through the center.
    pub deviation: f64,
    pub self_conjugate: bool,
}

/// Decomposition of a full solution into strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StringDecomposition {
    /// Sorted by length descending, then ordering key descending.
    pub groups: Vec<StringGroup>,
    pub content: Partition,
    /// True when some group is not self-conjugate although the full root
    /// multiset is conjugation-closed (fused strings).
    pub non_self_conjugate: bool,
}

/// Which members of the longest string supply the ordering key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KeyConvention {
    /// Mean real part of members possessing a conjugate partner in the
    /// group (the `η^(±i)` members).
    #[default]
    ConjugatePairMembers,
    /// Mean real part of the unpaired members (the `η^(0)` member).
    MiddleMembers,
}

const CONJ_MATCH_TOL: f64 = 1e-6;

fn members_with_partner(members: &[Complex64]) -> Vec<bool> {
    members
        .iter()
        .map(|z| {
            members
                .iter()
                .any(|w| (w - z.conj()).norm() < CONJ_MATCH_TOL && (w - z).norm() > 1e-12)
        })
        .collect()
}

/// Ordering key of one group under a convention.
pub fn group_key(group: &StringGroup, convention: KeyConvention) -> f64 {
    let paired = members_with_partner(&group.members);
    let pick = |want: bool| -> Option<f64> {
        let sel: Vec<f64> = group
            .members
            .iter()
            .zip(&paired)
            .filter(|&(_, &p)| p == want)
            .map(|(z, _)| z.re)
            .collect();
        if sel.is_empty() {
            None
        } else {
            Some(sel.iter().sum::<f64>() / sel.len() as f64)
        }
    };
    let all = || group.members.iter().map(|z| z.re).sum::<f64>() / group.members.len() as f64;
    match convention {
        KeyConvention::ConjugatePairMembers => pick(true).unwrap_or_else(all),
        KeyConvention::MiddleMembers => pick(false).unwrap_or_else(all),
    }
}

/// Key of the longest string of a decomposition.
pub fn longest_string_key(dec: &StringDecomposition, convention: KeyConvention) -> f64 {
    group_key(&dec.groups[0], convention)
}

/// Lexicographic ordering key: group keys in (length desc, key desc) group
/// order, then the roots themselves as a final tie break.
pub fn order_key(dec: &StringDecomposition, convention: KeyConvention) -> Vec<f64> {
    let mut key: Vec<f64> = dec
        .groups
        .iter()
        .map(|g| group_key(g, convention))
        .collect();
    for g in &dec.groups {
        for m in &g.members {
            key.push(m.re);
            key.push(m.im);
        }
    }
    key
}

/// (center, max member distance from the ideal ladder).
fn ladder_stats(members: &[Complex64]) -> (f64, f64) {
    let m = members.len();
    let center = members.iter().map(|z| z.re).sum::<f64>() / m as f64;
    let mut sorted: Vec<Complex64> = members.to_vec();
    sorted.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap());
    let mut deviation = 0.0f64;
    for (s, z) in sorted.iter().enumerate() {
        let off = (m as f64 - 1.0) / 2.0 - s as f64;
        deviation = deviation.max((z - Complex64::new(center, off)).norm());
    }
    (center, deviation)
}

/// Max deviation of adjacent imaginary spacings from 1.
fn spacing_dev(members: &[Complex64]) -> f64 {
    let mut ims: Vec<f64> = members.iter().map(|z| z.im).collect();
    ims.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut dev = 0.0f64;
    for w in ims.windows(2) {
        dev = dev.max((w[0] - w[1] - 1.0).abs());
    }
    dev
}

fn make_group(members: Vec<Complex64>) -> StringGroup {
    let (center, deviation) = ladder_stats(&members);
    let self_conjugate = is_conjugation_closed(&members, CONJ_MATCH_TOL);
    StringGroup {
        length: members.len() as u32,
        center,
        members,
        deviation,
        self_conjugate,
    }
}

/// Multiset conjugation closure within `tol`.
pub fn is_conjugation_closed(roots: &[Complex64], tol: f64) -> bool {
    let mut used = vec![false; roots.len()];
    for z in roots {
        let mut found = false;
        for (j, w) in roots.iter().enumerate() {
            if !used[j] && (w - z.conj()).norm() < tol {
                used[j] = true;
                found = true;
                break;
            }
        }
        if !found {
            return false;
        }
    }
    true
}

/// Decompose a solution into strings.
///
/// With `target_content` the grouping matching that content with minimum
/// total deviation wins (ties resolved toward positive-imaginary orphan
/// members in longer strings); the per-rung spacing slack is
/// `max(0.2, 10·tol)`. Without a target, roots are clustered by real part
/// and each cluster is decomposed by minimum deviation over all partitions
/// of its size.
pub fn decompose(
    sol: &BetheSolution,
    target_content: Option<&Partition>,
    tol: f64,
) -> Result<StringDecomposition, StringsError> {
    let roots = &sol.roots;
    let closure_tol = tol.max(1e-7);
    if !is_conjugation_closed(roots, closure_tol) {
        return Err(StringsError::NotConjugationClosed(closure_tol));
    }
    let groups = match target_content {
        Some(content) => {
            let slack = (10.0 * tol).max(0.2);
            match best_grouping(roots, content.parts(), slack) {
                Some(g) => g,
                None => return Err(StringsError::DecompositionFailure(content.clone())),
            }
        }
        None => greedy_grouping(roots),
    };
    let mut groups: Vec<StringGroup> = groups.into_iter().map(make_group).collect();
    groups.sort_by(|a, b| {
        b.length.cmp(&a.length).then(
            group_key(b, KeyConvention::ConjugatePairMembers)
                .partial_cmp(&group_key(a, KeyConvention::ConjugatePairMembers))
                .unwrap(),
        )
    });
    let mut lengths: Vec<u32> = groups.iter().map(|g| g.length).collect();
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    let content = Partition::new(lengths).expect("group lengths form a partition");
    let non_self_conjugate = groups.iter().any(|g| !g.self_conjugate);
    Ok(StringDecomposition {
        groups,
        content,
        non_self_conjugate,
    })
}

/// Bitmasks of all size-`m` subsets of `avail`.
fn subset_masks(avail: &[usize], m: usize) -> Vec<u32> {
    let n = avail.len();
    if m > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        out.push(idx.iter().map(|&k| 1u32 << avail[k]).sum());
        let mut pos = m;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] != pos + n - m {
                break;
            }
            if pos == 0 {
                return out;
            }
        }
        idx[pos] += 1;
        for k in pos + 1..m {
            idx[k] = idx[k - 1] + 1;
        }
    }
}

fn mask_members(roots: &[Complex64], mask: u32) -> Vec<Complex64> {
    (0..roots.len())
        .filter(|&j| mask & (1 << j) != 0)
        .map(|j| roots[j])
        .collect()
}

/// Exhaustive min-deviation assignment of roots to rows (ℓ ≤ 12).
fn best_grouping(roots: &[Complex64], rows: &[u32], slack: f64) -> Option<Vec<Vec<Complex64>>> {
    fn rec(
        roots: &[Complex64],
        rows: &[u32],
        row_idx: usize,
        used: u32,
        masks: &mut Vec<u32>,
        dev_sum: f64,
        slack: f64,
        best: &mut Option<((f64, f64), Vec<u32>)>,
    ) {
        if row_idx == rows.len() {
            // tiebreak: prefer positive-imaginary members in longer strings
            let mut weighted = 0.0;
            for (ri, &mask) in masks.iter().enumerate() {
                for (j, z) in roots.iter().enumerate() {
                    if mask & (1 << j) != 0 {
                        weighted -= rows[ri] as f64 * z.im;
                    }
                }
            }
            let score = (dev_sum, weighted);
            if best.as_ref().is_none_or(|(s, _)| score < *s) {
                *best = Some((score, masks.clone()));
            }
            return;
        }
        let avail: Vec<usize> = (0..roots.len()).filter(|&j| used & (1 << j) == 0).collect();
        for mask in subset_masks(&avail, rows[row_idx] as usize) {
            // equal-length rows in ascending mask order to kill permutations
            if row_idx > 0 && rows[row_idx - 1] == rows[row_idx] && masks[row_idx - 1] >= mask {
                continue;
            }
            let members = mask_members(roots, mask);
            if members.len() > 1 && spacing_dev(&members) > slack {
                continue;
            }
            let (_, dev) = ladder_stats(&members);
            if members.len() > 1 && dev > slack.max(1.0) {
                continue;
            }
            if let Some(((best_dev, _), _)) = best {
                if dev_sum + dev > *best_dev {
                    continue;
                }
            }
            masks.push(mask);
            rec(roots, rows, row_idx + 1, used | mask, masks, dev_sum + dev, slack, best);
            masks.pop();
        }
    }
    let mut best = None;
    let mut masks = Vec::new();
    rec(roots, rows, 0, 0, &mut masks, 0.0, slack, &mut best);
    best.map(|(_, group_masks)| {
        group_masks
            .iter()
            .map(|&mask| mask_members(roots, mask))
            .collect()
    })
}

/// Cluster roots by real part, then best-partition each cluster.
fn greedy_grouping(roots: &[Complex64]) -> Vec<Vec<Complex64>> {
    let mut sorted: Vec<Complex64> = roots.to_vec();
    sorted.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
    let cluster = |threshold: f64| -> Vec<Vec<Complex64>> {
        let mut clusters: Vec<Vec<Complex64>> = Vec::new();
        for &z in &sorted {
            match clusters.last_mut() {
                Some(c) if z.re - c.last().unwrap().re <= threshold => c.push(z),
                _ => clusters.push(vec![z]),
            }
        }
        clusters
    };
    // adapt the split threshold to 5× the median in-cluster spacing
    let first = cluster(0.2);
    let mut gaps: Vec<f64> = Vec::new();
    for c in &first {
        for w in c.windows(2) {
            gaps.push(w[1].re - w[0].re);
        }
    }
    let threshold = if gaps.is_empty() {
        0.2
    } else {
        gaps.sort_by(f64::total_cmp);
        (5.0 * gaps[gaps.len() / 2]).clamp(0.05, 0.2)
    };
    let clusters = cluster(threshold);

    let mut groups = Vec::new();
    for c in clusters {
        let mut best: Option<(f64, Vec<Vec<Complex64>>)> = None;
        for p in Partition::all_of(c.len() as u32) {
            if let Some(g) = best_grouping(&c, p.parts(), 0.2) {
                let dev: f64 = g.iter().map(|members| ladder_stats(members).1).sum();
                if best.as_ref().is_none_or(|(d, _)| dev < *d) {
                    best = Some((dev, g));
                }
            }
        }
        match best {
            Some((_, g)) => groups.extend(g),
            None => groups.extend(c.into_iter().map(|z| vec![z])),
        }
    }
    groups
}

/// One solution's place in the assignment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssignEntry {
    /// Index into the census solution list.
    pub solution: usize,
    pub rc: Option<RiggedConfiguration>,
    pub exceptional: bool,
}

/// Assignment of rigged configurations to solutions.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RiggingAssignment {
    pub entries: Vec<AssignEntry>,
    /// Census indices of solutions outside the monotone scheme.
    pub exceptional: Vec<usize>,
    /// Contents handled by the generalized fallback rather than one of the
    /// demonstrated ordering procedures.
    pub heuristic_contents: Vec<Partition>,
}

impl RiggingAssignment {
    pub fn rc_for(&self, solution: usize) -> Option<&RiggedConfiguration> {
        self.entries
            .iter()
            .find(|e| e.solution == solution)
            .and_then(|e| e.rc.as_ref())
    }

    pub fn merge(&mut self, other: RiggingAssignment) {
        self.entries.extend(other.entries);
        self.exceptional.extend(other.exceptional);
        self.heuristic_contents.extend(other.heuristic_contents);
    }
}

struct Ordered {
    /// (census index, group keys in (len desc, key desc) order), sorted
    /// descending lexicographically.
    items: Vec<(usize, Vec<f64>)>,
}

fn order_content_solutions(
    solutions: &[(usize, StringDecomposition)],
    convention: KeyConvention,
) -> Ordered {
    let mut items: Vec<(usize, Vec<f64>)> = solutions
        .iter()
        .map(|(idx, dec)| (*idx, order_key(dec, convention)))
        .collect();
    items.sort_by(|a, b| {
        for (x, y) in a.1.iter().zip(&b.1) {
            match y.partial_cmp(x).unwrap() {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
    Ordered { items }
}

/// Capacity-constrained monotone chains for a content of two equal rows.
///
/// The list comes ordered by larger key descending; block `b` holds
/// `P+1−b` members whose smaller key strictly increases. A member that
/// overflows a full block while stranding its successor is ejected as
/// exceptional; members left once all blocks are full are exceptional too.
fn equal_pair_blocks(
    ordered: &[(usize, f64, f64)],
    vacancy: i64,
) -> (Vec<Vec<usize>>, Vec<usize>) {
    let p = vacancy as usize;
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut exceptional: Vec<usize> = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    let mut cap = p + 1;
    let mut last_small = f64::NEG_INFINITY;
    let mut i = 0;
    while i < ordered.len() {
        let (pos, _, small) = ordered[i];
        if blocks.len() == p + 1 {
            exceptional.push(pos);
            i += 1;
            continue;
        }
        if cur.is_empty() {
            cur.push(pos);
            last_small = small;
            i += 1;
        } else if small > last_small && cur.len() < cap {
            cur.push(pos);
            last_small = small;
            i += 1;
        } else if small > last_small {
            // extends past a full block: eject if the next element would
            // otherwise strand, else close the block here
            if i + 1 < ordered.len() && ordered[i + 1].2 < small {
                exceptional.push(pos);
                i += 1;
            } else {
                blocks.push(std::mem::take(&mut cur));
                cap = cap.saturating_sub(1);
                last_small = f64::NEG_INFINITY;
            }
        } else {
            blocks.push(std::mem::take(&mut cur));
            cap = cap.saturating_sub(1);
            last_small = f64::NEG_INFINITY;
        }
    }
    if !cur.is_empty() {
        if blocks.len() < p + 1 {
            blocks.push(cur);
        } else {
            exceptional.extend(cur);
        }
    }
    (blocks, exceptional)
}

/// Detect exceptional solutions of a two-equal-row content.
///
/// The block scan runs on the given order and on the mirrored
/// (negated-root) order; the union of flagged positions is returned
/// (indices into `ordered_solutions`).
pub fn detect_exceptional(
    ordered_solutions: &[&BetheSolution],
    content: &Partition,
) -> Vec<usize> {
    let runs = content.runs();
    if !(runs.len() == 1 && runs[0].1 == 2) {
        return Vec::new();
    }
    let n = match ordered_solutions.first() {
        Some(s) => s.n_sites,
        None => return Vec::new(),
    };
    let shape = SectorShape::spin_half(n);
    let vac = vacancy_number(&shape, content, runs[0].0);
    let keys: Vec<(usize, f64, f64)> = ordered_solutions
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let dec = decompose(s, Some(content), 0.05).expect("content matches");
            let a = group_key(&dec.groups[0], KeyConvention::ConjugatePairMembers);
            let b = group_key(&dec.groups[1], KeyConvention::ConjugatePairMembers);
            (i, a.max(b), a.min(b))
        })
        .collect();

    let (_, mut exc) = equal_pair_blocks(&keys, vac);

    let mut mirrored: Vec<(usize, f64, f64)> = keys
        .iter()
        .map(|&(i, large, small)| (i, -small, -large))
        .collect();
    mirrored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let (_, exc2) = equal_pair_blocks(&mirrored, vac);
    exc.extend(exc2);
    exc.sort_unstable();
    exc.dedup();
    exc
}

/// Assign riggings to the solutions of one string content.
///
/// `solutions` pairs census indices with decompositions matching `content`.
/// Implements the demonstrated schemes — single row, two equal rows
/// (capacity chains with exceptional ejection), two or three distinct rows
/// (block structure), one long row plus an equal pair (iterative peeling) —
/// and a generalized fallback flagged as heuristic.
pub fn assign_riggings(
    n_sites: u32,
    solutions: &[(usize, StringDecomposition)],
    content: &Partition,
    convention: KeyConvention,
) -> Result<RiggingAssignment, StringsError> {
    let shape = SectorShape::spin_half(n_sites);
    let rcs = enumerate_rigged_configs(&shape, content.weight(), Some(content));
    let runs = content.runs();
    let vac: Vec<i64> = runs
        .iter()
        .map(|&(len, _)| vacancy_number(&shape, content, len))
        .collect();
    let ordered = order_content_solutions(solutions, convention);
    let mut assignment = RiggingAssignment::default();

    let make_rc = |riggings: Vec<i64>| -> RiggedConfiguration {
        RiggedConfiguration::new(content.clone(), riggings, &shape)
            .expect("scheme produces valid riggings")
    };

    match runs.as_slice() {
        [(_, 1)] => {
            if solutions.len() != (vac[0] + 1) as usize {
                return Err(StringsError::CountMismatch {
                    content: content.clone(),
                    found: solutions.len(),
                    expected: (vac[0] + 1) as usize,
                });
            }
            // descending order: the rightmost key gets the top rigging
            for (rank, (idx, _)) in ordered.items.iter().enumerate() {
                assignment.entries.push(AssignEntry {
                    solution: *idx,
                    rc: Some(make_rc(vec![vac[0] - rank as i64])),
                    exceptional: false,
                });
            }
        }
        [(_, 2)] => {
            let keys: Vec<(usize, f64, f64)> = ordered
                .items
                .iter()
                .map(|(idx, key)| (*idx, key[0], key[1]))
                .collect();
            let (blocks, exceptional) = equal_pair_blocks(&keys, vac[0]);
            let placed: usize = blocks.iter().map(Vec::len).sum();
            if placed != rcs.len() {
                return Err(StringsError::AssignmentFailure(content.clone()));
            }
            for (b, block) in blocks.iter().enumerate() {
                let r1 = vac[0] - b as i64;
                for (pos, &idx) in block.iter().enumerate() {
                    assignment.entries.push(AssignEntry {
                        solution: idx,
                        rc: Some(make_rc(vec![r1, pos as i64])),
                        exceptional: false,
                    });
                }
            }
            for idx in exceptional {
                assignment.entries.push(AssignEntry {
                    solution: idx,
                    rc: None,
                    exceptional: true,
                });
                assignment.exceptional.push(idx);
            }
        }
        [(_, 1), (_, 1)] | [(_, 1), (_, 1), (_, 1)] => {
            let d = runs.len();
            let blocks = monotone_blocks(&ordered, d - 1);
            let shortest_cap = (vac[d - 1] + 1) as usize;
            if blocks.iter().any(|b| b.len() != shortest_cap) || solutions.len() != rcs.len() {
                return Err(StringsError::AssignmentFailure(content.clone()));
            }
            // rank blocks by the next-shortest row's mean key, ascending
            let mid = d - 2;
            let key_of = |i: usize| -> f64 {
                ordered
                    .items
                    .iter()
                    .find(|(idx, _)| *idx == i)
                    .map(|(_, k)| k[mid])
                    .unwrap()
            };
            let mid_groups = (vac[mid] + 1) as usize;
            // for three rows the longest rigging advances once per
            // (P_mid+1) blocks; rank middles within each advance group
            let group_of = |b: usize| if d == 3 { b / mid_groups } else { 0 };
            let mut mid_rigging = vec![0i64; blocks.len()];
            let n_groups = blocks.len().div_ceil(mid_groups.max(1)).max(1);
            for g in 0..n_groups {
                let members: Vec<usize> = (0..blocks.len()).filter(|&b| group_of(b) == g).collect();
                let mut by_key = members.clone();
                by_key.sort_by(|&x, &y| {
                    let kx = blocks[x].iter().map(|&i| key_of(i)).sum::<f64>() / blocks[x].len() as f64;
                    let ky = blocks[y].iter().map(|&i| key_of(i)).sum::<f64>() / blocks[y].len() as f64;
                    kx.partial_cmp(&ky).unwrap()
                });
                for (r, &b) in by_key.iter().enumerate() {
                    mid_rigging[b] = r as i64;
                }
            }
            for (b, block) in blocks.iter().enumerate() {
                for (pos, &idx) in block.iter().enumerate() {
                    let mut riggings = vec![0i64; d];
                    riggings[d - 1] = pos as i64;
                    riggings[mid] = mid_rigging[b];
                    riggings[0] = if d == 3 {
                        vac[0] - group_of(b) as i64
                    } else {
                        vac[0] - b as i64
                    };
                    assignment.entries.push(AssignEntry {
                        solution: idx,
                        rc: Some(make_rc(riggings)),
                        exceptional: false,
                    });
                }
            }
        }
        [(_, 1), (_, 2)] => {
            peel_long_plus_pair(&ordered, &vac, content, &mut assignment, &make_rc)?;
        }
        _ => {
            assignment.heuristic_contents.push(content.clone());
            if solutions.len() != rcs.len() {
                return Err(StringsError::CountMismatch {
                    content: content.clone(),
                    found: solutions.len(),
                    expected: rcs.len(),
                });
            }
            let mut rcs_sorted = rcs.clone();
            rcs_sorted.sort_by(|a, b| b.riggings.cmp(&a.riggings));
            for ((idx, _), rc) in ordered.items.iter().zip(rcs_sorted) {
                assignment.entries.push(AssignEntry {
                    solution: *idx,
                    rc: Some(rc),
                    exceptional: false,
                });
            }
        }
    }

    let mut seen: Vec<&RiggedConfiguration> = Vec::new();
    for e in &assignment.entries {
        if let Some(rc) = &e.rc {
            assert!(rcs.contains(rc), "assigned rigging outside bounds");
            assert!(!seen.contains(&rc), "assignment not injective");
            seen.push(rc);
        }
    }
    Ok(assignment)
}

/// Maximal runs where the key at `key_idx` strictly increases.
fn monotone_blocks(ordered: &Ordered, key_idx: usize) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for (idx, key) in &ordered.items {
        let k = key[key_idx];
        if blocks.is_empty() || k <= last {
            blocks.push(vec![*idx]);
        } else {
            blocks.last_mut().unwrap().push(*idx);
        }
        last = k;
    }
    blocks
}

/// Peeling for contents of one long row plus two equal rows: inside each
/// long-row block, repeatedly select the chain whose smaller key decreases
/// while the larger key increases.
fn peel_long_plus_pair(
    ordered: &Ordered,
    vac: &[i64],
    content: &Partition,
    assignment: &mut RiggingAssignment,
    make_rc: &dyn Fn(Vec<i64>) -> RiggedConfiguration,
) -> Result<(), StringsError> {
    let p_long = vac[0];
    let p_pair = vac[1];
    let block_size: usize = ((p_pair + 1) * (p_pair + 2) / 2) as usize;
    let total = ordered.items.len();
    if total != ((p_long + 1) as usize) * block_size {
        return Err(StringsError::CountMismatch {
            content: content.clone(),
            found: total,
            expected: ((p_long + 1) as usize) * block_size,
        });
    }
    for b in 0..=(p_long as usize) {
        let slice = &ordered.items[b * block_size..(b + 1) * block_size];
        let mut remaining: Vec<(usize, f64, f64)> = slice
            .iter()
            .map(|(idx, key)| (*idx, key[2], key[1])) // (idx, smaller, larger)
            .collect();
        for chain_idx in 0..=(p_pair as usize) {
            let capacity = (p_pair as usize + 1) - chain_idx;
            let mut chain: Vec<usize> = Vec::new();
            let mut keep: Vec<(usize, f64, f64)> = Vec::new();
            let mut last: Option<(f64, f64)> = None;
            for &(idx, small, large) in remaining.iter() {
                let take = chain.len() < capacity
                    && match last {
                        None => true,
                        Some((ps, pl)) => small < ps && large > pl,
                    };
                if take {
                    chain.push(idx);
                    last = Some((small, large));
                } else {
                    keep.push((idx, small, large));
                }
            }
            if chain.len() != capacity {
                return Err(StringsError::AssignmentFailure(content.clone()));
            }
            for (pos, idx) in chain.into_iter().enumerate() {
                let r_small = chain_idx as i64;
                let r_large = r_small + pos as i64;
                assignment.entries.push(AssignEntry {
                    solution: idx,
                    rc: Some(make_rc(vec![p_long - b as i64, r_large, r_small])),
                    exceptional: false,
                });
            }
            remaining = keep;
        }
    }
    Ok(())
}

/// Merge family for the ℓ=2 analysis: exceptional real solutions joined
/// with the physical one-row (2-string) solutions, riggings by center
/// ascending. `family` pairs census indices with mean real parts.
pub fn assign_exceptional_with_complex(
    n_sites: u32,
    family: &[(usize, f64)],
    row_len: u32,
) -> Result<RiggingAssignment, StringsError> {
    let shape = SectorShape::spin_half(n_sites);
    let content = Partition::new(vec![row_len]).unwrap();
    let p = vacancy_number(&shape, &content, row_len);
    if family.len() != (p + 1) as usize {
        return Err(StringsError::CountMismatch {
            content,
            found: family.len(),
            expected: (p + 1) as usize,
        });
    }
    let mut sorted = family.to_vec();
    sorted.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let mut assignment = RiggingAssignment::default();
    for (r, (idx, _)) in sorted.iter().enumerate() {
        assignment.entries.push(AssignEntry {
            solution: *idx,
            rc: Some(
                RiggedConfiguration::new(
                    Partition::new(vec![row_len]).unwrap(),
                    vec![r as i64],
                    &shape,
                )
                .unwrap(),
            ),
            exceptional: false,
        });
    }
    Ok(assignment)
}

/// Mean real part of all roots (center of a merged-family member).
pub fn mean_real(sol: &BetheSolution) -> f64 {
    sol.roots.iter().map(|z| z.re).sum::<f64>() / sol.roots.len().max(1) as f64
}

/// Assign rigged configurations to every physical solution of a census.
///
/// Solutions are bucketed by their best-matching content and each content
/// group runs its ordering scheme. When a two-equal-row group ejects
/// exceptional solutions and the sector has a matching one-row content
/// (the ℓ=2 situation), the exceptional solutions merge into that one-row
/// family and the merged family is ordered by center instead.
pub fn assign_census(
    census: &crate::solver::SectorCensus,
    convention: KeyConvention,
) -> Result<RiggingAssignment, StringsError> {
    use crate::bethe::SolutionClass;

    let n = census.n_sites;
    // bucket physical solutions by content
    let mut groups: Vec<(Partition, Vec<(usize, StringDecomposition)>)> = Vec::new();
    for (idx, sol) in census.solutions.iter().enumerate() {
        if !matches!(
            sol.classification,
            SolutionClass::Regular | SolutionClass::PhysicalSingular
        ) {
            continue;
        }
        let dec = crate::solver::best_decomposition(sol)
            .ok_or_else(|| StringsError::DecompositionFailure(Partition::empty()))?;
        match groups.iter_mut().find(|(c, _)| *c == dec.content) {
            Some((_, v)) => v.push((idx, dec)),
            None => groups.push((dec.content.clone(), vec![(idx, dec)])),
        }
    }
    groups.sort_by(|a, b| b.0.cmp(&a.0));

    let mut assignment = RiggingAssignment::default();
    let mut deferred_single_row: Option<(u32, Vec<(usize, StringDecomposition)>)> = None;
    let mut exceptional_pool: Vec<usize> = Vec::new();

    for (content, members) in &groups {
        let runs = content.runs();
        match runs.as_slice() {
            [(len, 1)] if content.len() == 1 => {
                // defer: may need to absorb exceptional solutions
                deferred_single_row = Some((*len, members.clone()));
            }
            _ => {
                let sub = assign_riggings(n, members, content, convention)?;
                exceptional_pool.extend(sub.exceptional.iter().copied());
                assignment.merge(sub);
            }
        }
    }

    if let Some((row_len, members)) = deferred_single_row {
        if exceptional_pool.is_empty() {
            let content = Partition::new(vec![row_len]).unwrap();
            assignment.merge(assign_riggings(n, &members, &content, convention)?);
        } else {
            // merged family: one-row solutions plus the exceptional ones,
            // ordered by center
            let mut family: Vec<(usize, f64)> = members
                .iter()
                .map(|(idx, _)| (*idx, mean_real(&census.solutions[*idx])))
                .collect();
            for &idx in &exceptional_pool {
                family.push((idx, mean_real(&census.solutions[idx])));
            }
            let merged = assign_exceptional_with_complex(n, &family, row_len)?;
            // exceptional entries gain an rc; drop their placeholder entries
            assignment
                .entries
                .retain(|e| !exceptional_pool.contains(&e.solution));
            for mut e in merged.entries {
                if exceptional_pool.contains(&e.solution) {
                    e.exceptional = true;
                }
                assignment.entries.push(e);
            }
        }
    }

    assignment.entries.sort_by_key(|e| e.solution);
    assignment.exceptional.sort_unstable();
    Ok(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol(n: u32, roots: &[(f64, f64)]) -> BetheSolution {
        BetheSolution::from_roots(
            n,
            roots.iter().map(|&(re, im)| Complex64::new(re, im)).collect(),
        )
    }

    #[test]
    fn perfect_two_string() {
        let s = sol(25, &[(1.3, 0.51), (1.3, -0.51)]);
        let dec = decompose(&s, None, 0.02).unwrap();
        assert_eq!(dec.content.parts(), &[2]);
        assert!((dec.groups[0].deviation - 0.01).abs() < 1e-9);
        assert!(dec.groups[0].self_conjugate);
        assert!(!dec.non_self_conjugate);
    }

    #[test]
    fn group2_11_star_decomposition() {
        let s = sol(
            12,
            &[
                (0.0, 0.018539900),
                (0.0, 0.99377501),
                (0.0, -0.99377501),
                (0.0, 0.5),
                (0.0, -0.5),
                (0.0, -0.018539900),
            ],
        );
        let content = Partition::new(vec![3, 2, 1]).unwrap();
        let dec = decompose(&s, Some(&content), 0.02).unwrap();
        assert_eq!(dec.content.parts(), &[3, 2, 1]);
        assert!(dec.non_self_conjugate);
        let three = &dec.groups[0];
        assert_eq!(three.length, 3);
        // the +iδ member sits in the 3-string, its conjugate is the 1-string
        assert!(three.members.iter().any(|z| (z.im - 0.018539900).abs() < 1e-9));
        assert!(!three.self_conjugate);
        let one = &dec.groups[2];
        assert!((one.members[0].im + 0.018539900).abs() < 1e-9);
        assert!(!one.self_conjugate);
        assert!(dec.groups[1].self_conjugate);
        assert!(longest_string_key(&dec, KeyConvention::ConjugatePairMembers).abs() < 1e-12);
    }

    #[test]
    fn group1_6_star_decomposition() {
        let s = sol(
            12,
            &[
                (0.38490522, 0.01906127),
                (0.36730804, 0.99179719),
                (0.36730804, -0.99179719),
                (-0.75221326, 0.50729383),
                (-0.75221326, -0.50729383),
                (0.38490522, -0.01906127),
            ],
        );
        let content = Partition::new(vec![3, 2, 1]).unwrap();
        let dec = decompose(&s, Some(&content), 0.02).unwrap();
        assert!(dec.non_self_conjugate);
        let three = &dec.groups[0];
        assert!((group_key(three, KeyConvention::ConjugatePairMembers) - 0.36730804).abs() < 1e-8);
        assert!((group_key(three, KeyConvention::MiddleMembers) - 0.38490522).abs() < 1e-8);
        let one = &dec.groups[2];
        assert!((one.members[0].re - 0.38490522).abs() < 1e-8);
        assert!((one.members[0].im + 0.01906127).abs() < 1e-8);
    }

    #[test]
    fn single_string_key_is_its_position() {
        let s = sol(8, &[(0.7, 0.0)]);
        let dec = decompose(&s, None, 0.02).unwrap();
        assert_eq!(
            longest_string_key(&dec, KeyConvention::ConjugatePairMembers),
            0.7
        );
    }

    #[test]
    fn conjugation_closure_required() {
        let s = sol(8, &[(0.1, 0.3), (0.4, 0.0)]);
        assert!(matches!(
            decompose(&s, None, 0.02),
            Err(StringsError::NotConjugationClosed(_))
        ));
    }

    #[test]
    fn negation_mirrors_decomposition() {
        let roots = [
            (0.38490522, 0.01906127),
            (0.36730804, 0.99179719),
            (0.36730804, -0.99179719),
            (-0.75221326, 0.50729383),
            (-0.75221326, -0.50729383),
            (0.38490522, -0.01906127),
        ];
        let s = sol(12, &roots);
        let neg: Vec<(f64, f64)> = roots.iter().map(|&(a, b)| (-a, -b)).collect();
        let sn = sol(12, &neg);
        let content = Partition::new(vec![3, 2, 1]).unwrap();
        let d1 = decompose(&s, Some(&content), 0.02).unwrap();
        let d2 = decompose(&sn, Some(&content), 0.02).unwrap();
        assert_eq!(d1.content, d2.content);
        for (g1, g2) in d1.groups.iter().zip(&d2.groups) {
            assert_eq!(g1.length, g2.length);
        }
        let mut c1: Vec<f64> = d1.groups.iter().map(|g| g.center).collect();
        let mut c2: Vec<f64> = d2.groups.iter().map(|g| -g.center).collect();
        c1.sort_by(f64::total_cmp);
        c2.sort_by(f64::total_cmp);
        for (a, b) in c1.iter().zip(&c2) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn toy_monotone_list_has_no_exceptionals() {
        // negation-closed toy census with block sizes 3, 2, 1 (P = 2)
        let sols: Vec<BetheSolution> = [
            (-3.0, 3.0),
            (-2.0, 2.9),
            (-1.0, 2.8),
            (-2.9, 2.0),
            (-1.9, 1.9),
            (-2.8, 1.0),
        ]
        .iter()
        .map(|&(a, b)| sol(6, &[(a, 0.0), (b, 0.0)]))
        .collect();
        let refs: Vec<&BetheSolution> = sols.iter().collect();
        let content = Partition::new(vec![1, 1]).unwrap();
        assert!(detect_exceptional(&refs, &content).is_empty());
    }

    #[test]
    fn forced_single_solution_gets_zero_riggings() {
        // N=6, content (3): P_3 = 0, a single solution, rigging 0
        let s = sol(6, &[(0.0, 1.0), (0.0, 0.0), (0.0, -1.0)]);
        let content = Partition::new(vec![3]).unwrap();
        let dec = decompose(&s, Some(&content), 0.02).unwrap();
        let a = assign_riggings(6, &[(0, dec)], &content, KeyConvention::default()).unwrap();
        assert_eq!(a.entries.len(), 1);
        assert_eq!(a.entries[0].rc.as_ref().unwrap().riggings, vec![0]);
    }
}
