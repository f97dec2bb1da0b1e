use serde::{Deserialize, Serialize};

use super::PropositionReport;
use crate::error::{Error, Result};
use crate::formulations::{build_p_dl, build_p_mtz, build_p_scf, BuildOptions};
use crate::graph::ArcSpace;
use crate::lp::{is_redundant, LinSys};
use crate::params::{Family, Param};
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowCensus {
    pub tag: String,
    pub nonredundant: bool,
    /// Strictly satisfied at the uniform point `(1/(n-1))·1`.
    pub strict: bool,
    pub facet: bool,
    pub predicted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetCensus {
    pub family: Family,
    pub n: usize,
    pub rows: Vec<RowCensus>,
}

impl FacetCensus {
    pub fn facets(&self) -> impl Iterator<Item = &RowCensus> {
        self.rows.iter().filter(|r| r.facet)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &RowCensus> {
        self.rows.iter().filter(|r| r.facet != r.predicted)
    }
}

/// The family rows of the unpruned system with their predicted facet status.
fn predicted_rows(family: Family, param: &Param, space: &ArcSpace) -> Result<(LinSys, Vec<(String, bool)>)> {
    let n = space.n();
    let opts = BuildOptions::default();
    let mut rows = Vec::new();
    let sys = match (family, param) {
        (Family::Mtz, Param::D(d)) => {
            for c in space.enumerate_cycles(2, n - 1)? {
                let pred = facet_predicate(family, c.len(), d.cycle_sum(&c), n);
                rows.push((format!("circuit{c}"), pred));
            }
            build_p_mtz(space, d, &opts)?
        }
        (Family::Dl, Param::D(d)) => {
            for (i, j) in space.arcs_a1().filter(|(i, j)| i < j) {
                rows.push((format!("pair({i},{j})"), true));
            }
            if n > 3 {
                for c in space.enumerate_cycles(3, n - 1)? {
                    let pred = facet_predicate(family, c.len(), d.cycle_sum(&c), n);
                    rows.push((format!("dl{c}"), pred));
                }
            }
            build_p_dl(space, d, &opts)?
        }
        (Family::Scf, Param::B(b)) => {
            for s in space.enumerate_subsets(2, n - 1)? {
                let pred = b.subset_sum(s).is_positive() && s.len() < n - 1;
                rows.push((format!("cut{s}"), pred));
            }
            build_p_scf(space, b, &opts)?
        }
        _ => return Err(Error::arg("parameter shape does not match the family")),
    };
    Ok((sys, rows))
}

/// Facet predicate for a cycle row with `len` arcs and parameter sum `sum`.
pub fn facet_predicate(family: Family, len: usize, sum: Rat, n: usize) -> bool {
    match family {
        Family::Mtz => sum.is_positive() && len <= n - 2,
        Family::Dl => len == 2 || (sum.is_positive() && 3 <= len && len <= n - 2),
        Family::Scf => unreachable!("subset rows use their own predicate"),
    }
}

/// Decides facet-hood of every family row by non-redundancy plus strict satisfaction at
/// the uniform point, and records the predicted status next to it.
pub fn facet_census(family: Family, param: &Param, space: &ArcSpace) -> Result<FacetCensus> {
    let (sys, predicted) = predicted_rows(family, param, space)?;
    let uniform = vec![Rat::new(1, space.n() as i64 - 1); sys.num_vars()];
    let mut rows = Vec::with_capacity(predicted.len());
    for (tag, pred) in predicted {
        let row = sys
            .row(&tag)
            .ok_or_else(|| Error::Internal(format!("row {tag} missing from built system")))?;
        let strict = row.slack(&uniform).is_positive();
        let nonredundant = !is_redundant(&sys, &tag)?.is_redundant();
        rows.push(RowCensus {
            tag,
            nonredundant,
            strict,
            facet: nonredundant && strict,
            predicted: pred,
        });
    }
    Ok(FacetCensus {
        family,
        n: space.n(),
        rows,
    })
}

fn family_key(f: Family) -> &'static str {
    match f {
        Family::Mtz => "mtz",
        Family::Dl => "dl",
        Family::Scf => "scf",
    }
}

/// A census wrapped as a report; verified iff there are zero mismatches.
pub fn census_report(family: Family, params: &[(&str, Param)], space: &ArcSpace) -> Result<PropositionReport> {
    let mut rep = PropositionReport::new(&format!("facets.{}", family_key(family)), space.n());
    for (label, param) in params {
        rep.param(serde_json::json!({ "label": label, "value": param.to_json() }));
        let census = facet_census(family, param, space)?;
        let bad: Vec<&str> = census.mismatches().map(|r| r.tag.as_str()).collect();
        rep.check(
            format!("census[{label}]"),
            bad.is_empty(),
            format!(
                "{} rows, {} facets, mismatches: [{}]",
                census.rows.len(),
                census.facets().count(),
                bad.join(" ")
            ),
        );
    }
    Ok(rep.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{sample_interior_d, BVec};

    #[test]
    fn mtz_interior_at_five() {
        let sp = ArcSpace::new(5).unwrap();
        let d = Param::D(sample_interior_d(&sp, 3).unwrap());
        let c = facet_census(Family::Mtz, &d, &sp).unwrap();
        assert_eq!(c.mismatches().count(), 0);
        assert_eq!(c.facets().count(), 14);
        assert!(c
            .rows
            .iter()
            .filter(|r| r.tag.matches(',').count() == 3)
            .all(|r| !r.facet));
    }

    #[test]
    fn scf_vertex_at_five() {
        let sp = ArcSpace::new(5).unwrap();
        let b = Param::B(BVec::unit(&sp, 3));
        let c = facet_census(Family::Scf, &b, &sp).unwrap();
        assert_eq!(c.mismatches().count(), 0);
        // subsets of N1 \ {3} of size >= 1 joined with 3, excluding N1 itself
        assert_eq!(c.facets().count(), 6);
    }
}
