//! Text and JSON rendering of censuses and assignments in the style of the
//! reference tables: solutions numbered in census order, one string per
//! line, eight decimal digits.

use num_complex::Complex64;
use serde_json::json;

use crate::bethe::SolutionClass;
use crate::rigged::SectorShape;
use crate::solver::{best_decomposition, SectorCensus};
use crate::strings::RiggingAssignment;

fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.8}", z.re)
    } else if z.re == 0.0 {
        format!("{:.8}i", z.im)
    } else if z.im < 0.0 {
        format!("{:.8}-{:.8}i", z.re, -z.im)
    } else {
        format!("{:.8}+{:.8}i", z.re, z.im)
    }
}

fn class_tag(c: SolutionClass) -> &'static str {
    match c {
        SolutionClass::Regular => "regular",
        SolutionClass::PhysicalSingular => "physical singular",
        SolutionClass::UnphysicalSingular => "unphysical singular",
        SolutionClass::Unverified => "unverified",
    }
}

/// Human-readable census report: counts, completeness ratio, solutions with
/// their strings, riggings and exceptional marks.
pub fn census_report(census: &SectorCensus) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "sector N={} ell={}{}\n",
        census.n_sites,
        census.ell,
        match &census.content_filter {
            Some(c) => format!(" content={c}"),
            None => String::new(),
        }
    ));
    out.push_str(&format!(
        "solutions: {} ({} real, {} complex, {} singular)\n",
        census.solutions.len(),
        census.counts.real,
        census.counts.complex,
        census.counts.singular
    ));
    out.push_str(&format!(
        "completeness: {}/{} physical\n",
        census.counts.physical, census.rc_count
    ));
    if census.solutions.is_empty() {
        return out;
    }
    out.push('\n');
    let shape = SectorShape::spin_half(census.n_sites);
    for (idx, sol) in census.solutions.iter().enumerate() {
        let star = if census.exceptional.contains(&idx) {
            "*"
        } else {
            ""
        };
        out.push_str(&format!(
            "#{}{}  [{}]  residual {:.2e}\n",
            idx + 1,
            star,
            class_tag(sol.classification),
            sol.residual_norm
        ));
        match best_decomposition(sol) {
            Some(dec) => {
                for g in &dec.groups {
                    let line: Vec<String> = g.members.iter().map(|&m| fmt_c(m)).collect();
                    let tag = if g.self_conjugate { "" } else { "  (non self-conjugate)" };
                    out.push_str(&format!("    {}{}\n", line.join("  "), tag));
                }
            }
            None => {
                let line: Vec<String> = sol.roots.iter().map(|&m| fmt_c(m)).collect();
                out.push_str(&format!("    {}\n", line.join("  ")));
            }
        }
        if let Some(assign) = &census.assignment {
            if let Some(rc) = assign.rc_for(idx) {
                out.push_str(&format!("    rigged configuration:\n"));
                for line in rc.render(&shape).lines() {
                    out.push_str(&format!("      {line}\n"));
                }
            }
        }
    }
    if let Some(assign) = &census.assignment {
        if !assign.heuristic_contents.is_empty() {
            let list: Vec<String> = assign
                .heuristic_contents
                .iter()
                .map(|c| c.to_string())
                .collect();
            out.push_str(&format!(
                "\nnote: contents {} assigned by the generalized (heuristic) scheme\n",
                list.join(", ")
            ));
        }
    }
    out
}

/// JSON census report.
pub fn census_report_json(census: &SectorCensus) -> serde_json::Value {
    let shape = SectorShape::spin_half(census.n_sites);
    let solutions: Vec<serde_json::Value> = census
        .solutions
        .iter()
        .enumerate()
        .map(|(idx, sol)| {
            let mut v = serde_json::to_value(sol).unwrap();
            if let Some(assign) = &census.assignment {
                if let Some(rc) = assign.rc_for(idx) {
                    v["rc"] = rc.to_json(&shape);
                }
                if census.exceptional.contains(&idx) {
                    v["exceptional"] = json!(true);
                }
            }
            v
        })
        .collect();
    json!({
        "n": census.n_sites,
        "ell": census.ell,
        "content": census.content_filter.as_ref().map(|c| c.parts().to_vec()),
        "counts": census.counts,
        "rc_count": census.rc_count,
        "complete": census.is_complete(),
        "solutions": solutions,
    })
}

/// Assignment JSON: per solution the roots plus its rigged configuration or
/// the exceptional mark.
pub fn assignment_json(census: &SectorCensus, assign: &RiggingAssignment) -> serde_json::Value {
    let shape = SectorShape::spin_half(census.n_sites);
    let entries: Vec<serde_json::Value> = assign
        .entries
        .iter()
        .map(|e| {
            let sol = &census.solutions[e.solution];
            let mut v = json!({
                "solution": e.solution + 1,
                "roots": sol.roots.iter().map(|z| vec![z.re, z.im]).collect::<Vec<_>>(),
            });
            if let Some(rc) = &e.rc {
                v["rc"] = rc.to_json(&shape);
            }
            if e.exceptional {
                v["exceptional"] = json!(true);
            }
            v
        })
        .collect();
    json!({
        "n": census.n_sites,
        "ell": census.ell,
        "entries": entries,
        "exceptional": assign.exceptional.iter().map(|&i| i + 1).collect::<Vec<_>>(),
        "heuristic_contents": assign
            .heuristic_contents
            .iter()
            .map(|c| c.parts().to_vec())
            .collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_sector, SolverConfig};

    #[test]
    fn empty_and_small_reports() {
        let census = solve_sector(2, 1, &SolverConfig::default(), None);
        let text = census_report(&census);
        assert!(text.contains("completeness: 1/1"));
        let j = census_report_json(&census);
        assert_eq!(j["solutions"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn complex_formatting() {
        assert_eq!(fmt_c(Complex64::new(0.5, 0.0)), "0.50000000");
        assert_eq!(fmt_c(Complex64::new(0.0, -0.5)), "-0.50000000i");
        assert_eq!(
            fmt_c(Complex64::new(0.54455699, -0.99639165)),
            "0.54455699-0.99639165i"
        );
    }
}
