use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{x_point, PropositionReport};
use crate::error::{Error, Result};
use crate::formulations::{x_names, BuildOptions, FamilyId, FormulationId};
use crate::graph::{ArcSpace, Cycle, NodeSubset};
use crate::lp::{includes, min_row_lhs, Inclusion};
use crate::params::{
    antisymmetric_perturbation, d_membership, d_mtz, sample_interior_b, sample_interior_d, BVec, DVec, Membership,
    Param,
};
use crate::point::XPoint;
use crate::projection::membership;
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    /// The first set is strictly inside the second.
    FirstInSecond,
    SecondInFirst,
    Incomparable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub relation: Relation,
    /// A point of the first set outside the second.
    pub first_only: Option<XPoint>,
    pub second_only: Option<XPoint>,
    /// Every witness passed exact membership on both sides.
    pub rechecked: bool,
}

fn witness(
    a: &FormulationId,
    b: &FormulationId,
    inc: &Inclusion,
    space: &ArcSpace,
    opts: &BuildOptions,
) -> Result<(Option<XPoint>, bool)> {
    match inc {
        Inclusion::Included { .. } => Ok((None, true)),
        Inclusion::NotIncluded { point, .. } => {
            let p = x_point(space, point)?;
            let ok = membership(a, &p, opts)?.member && !membership(b, &p, opts)?.member;
            Ok((Some(p), ok))
        }
    }
}

/// Classifies two formulations by exact inclusion of their `x`-projections.
pub fn compare_pair(a: &FormulationId, b: &FormulationId, space: &ArcSpace, opts: &BuildOptions) -> Result<Comparison> {
    let sa = a.build(space, opts)?;
    let sb = b.build(space, opts)?;
    let vars = x_names(space);
    let ab = includes(&sa, &sb, &vars)?;
    let ba = includes(&sb, &sa, &vars)?;
    let (first_only, ok1) = witness(a, b, &ab, space, opts)?;
    let (second_only, ok2) = witness(b, a, &ba, space, opts)?;
    let relation = match (ab.holds(), ba.holds()) {
        (true, true) => Relation::Equal,
        (true, false) => Relation::FirstInSecond,
        (false, true) => Relation::SecondInFirst,
        (false, false) => Relation::Incomparable,
    };
    Ok(Comparison {
        relation,
        first_only,
        second_only,
        rechecked: ok1 && ok2,
    })
}

fn p_mtz(d: &DVec) -> Result<FormulationId> {
    FormulationId::parametric(FamilyId::DMtz, Param::D(d.clone()), false)
}

fn p_dl(d: &DVec) -> Result<FormulationId> {
    FormulationId::parametric(FamilyId::DDl, Param::D(d.clone()), false)
}

fn p_scf(b: &BVec) -> Result<FormulationId> {
    FormulationId::parametric(FamilyId::BScf, Param::B(b.clone()), false)
}

/// `d + ε·1` with `ε = ½ min_C (1 - Σ_C d)/|C|`, which stays interior and tightens
/// every cycle row.
pub fn mtz_strict_improvement(d: &DVec) -> Result<DVec> {
    let sp = *d.space();
    let mut eps: Option<Rat> = None;
    sp.for_each_cycle(2, sp.n() - 1, |c| {
        let v = (Rat::one() - d.cycle_sum(c)) / Rat::from(c.len());
        if eps.as_ref().is_none_or(|e| v < *e) {
            eps = Some(v);
        }
    })?;
    let eps = eps.expect("n >= 4 has cycles") / Rat::from_int(2);
    if !eps.is_positive() {
        return Err(Error::Domain("d is not in the interior: some cycle sums to 1".into()));
    }
    Ok(d.plus(&DVec::uniform(&sp, eps)))
}

fn record_comparison(
    rep: &mut PropositionReport,
    name: &str,
    a: &FormulationId,
    b: &FormulationId,
    cmp: &Comparison,
    expected: Relation,
) -> bool {
    if let Some(p) = &cmp.first_only {
        rep.witness(format!("{name}: first only"), p, &[a], &[b]);
    }
    if let Some(p) = &cmp.second_only {
        rep.witness(format!("{name}: second only"), p, &[b], &[a]);
    }
    rep.check(
        name,
        cmp.relation == expected && cmp.rechecked,
        format!(
            "relation {:?}, expected {:?}, witnesses rechecked: {}",
            cmp.relation, expected, cmp.rechecked
        ),
    )
}

/// Interior `d` is strictly improved by `d + ε·1`.
pub fn mtz_strict_report(space: &ArcSpace, seeds: &[u64]) -> Result<PropositionReport> {
    let mut rep = PropositionReport::new("compare.mtz-improve", space.n());
    let opts = BuildOptions::pruned();
    for &s in seeds {
        let d = sample_interior_d(space, s)?;
        let d2 = mtz_strict_improvement(&d)?;
        let m = d_membership(&d2)?;
        rep.check(
            format!("seed {s}: improved d interior"),
            m.status == Membership::Interior && m.worst_sum < Rat::one(),
            format!("worst cycle sum {}", m.worst_sum),
        );
        let (a, b) = (p_mtz(&d2)?, p_mtz(&d)?);
        let cmp = compare_pair(&a, &b, space, &opts)?;
        record_comparison(
            &mut rep,
            &format!("seed {s}: P(d+eps) strictly inside P(d)"),
            &a,
            &b,
            &cmp,
            Relation::FirstInSecond,
        );
        rep.param(json!({ "seed": s, "d": Param::D(d).to_json() }));
    }
    Ok(rep.finish())
}

/// A point of `D̄` in the relative interior of the facet `Σ_C d <= 1`: every entry
/// positive, only `C` tight.
pub fn facet_interior_d(space: &ArcSpace, c: &Cycle) -> DVec {
    let len = c.len() as i64;
    let eps = Rat::new(1, 2 * len * (space.n() as i64 - 1));
    let on = (Rat::one() - &eps * Rat::from_int(len)) / Rat::from_int(len);
    DVec::from_fn(space, |i, j| {
        if c.contains_arc((i, j)) {
            &eps + &on
        } else {
            eps.clone()
        }
    })
}

/// Parameters on two different facets of `D̄` give incomparable formulations.
pub fn mtz_facet_pair_report(space: &ArcSpace, pairs: &[(Cycle, Cycle)]) -> Result<PropositionReport> {
    let mut rep = PropositionReport::new("compare.mtz-facets", space.n());
    let opts = BuildOptions::pruned();
    for (c1, c2) in pairs {
        let (d1, d2) = (facet_interior_d(space, c1), facet_interior_d(space, c2));
        let tight = d1.cycle_sum(c1) == Rat::one()
            && d2.cycle_sum(c2) == Rat::one()
            && d_membership(&d1)?.worst_sum == Rat::one()
            && d_membership(&d2)?.worst_sum == Rat::one();
        rep.check(
            format!("{c1} vs {c2}: parameters on facets"),
            tight,
            "both cycle sums equal 1",
        );
        let (a, b) = (p_mtz(&d1)?, p_mtz(&d2)?);
        let cmp = compare_pair(&a, &b, space, &opts)?;
        record_comparison(&mut rep, &format!("{c1} vs {c2}"), &a, &b, &cmp, Relation::Incomparable);
    }
    Ok(rep.finish())
}

/// Anti-symmetric perturbations with a nonzero sum on some cycle of length at least
/// three give incomparable DL formulations.
pub fn dl_antisymmetric_report(space: &ArcSpace, count: usize, seed: u64) -> Result<PropositionReport> {
    let mut rep = PropositionReport::new("compare.dl-antisymmetric", space.n());
    let opts = BuildOptions::pruned();
    // Rows of cycles with n-1 arcs are implied, so at n = 4 no cycle of length three
    // carries a facet and the two formulations share every facet.
    let expect = if space.n() >= 5 {
        Relation::Incomparable
    } else {
        rep.note("at n = 4 every cycle with three or more arcs has n-1 arcs; its rows are implied, so the formulations coincide");
        Relation::Equal
    };
    let mut done = 0;
    let mut s = seed;
    while done < count {
        if s > seed + 50 * count as u64 {
            rep.check("sampling", false, "could not find enough admissible perturbations");
            break;
        }
        let d = sample_interior_d(space, s)?;
        let pert = antisymmetric_perturbation(&d, s, true)?;
        s += 1;
        if pert.gradient || !pert.long_cycle_nonzero {
            continue;
        }
        let d2 = d.plus(&pert.delta);
        let (a, b) = (p_dl(&d)?, p_dl(&d2)?);
        let cmp = compare_pair(&a, &b, space, &opts)?;
        record_comparison(&mut rep, &format!("seed {}", s - 1), &a, &b, &cmp, expect);
        rep.param(json!({ "seed": s - 1, "d": Param::D(d).to_json(), "delta": Param::D(pert.delta).to_json() }));
        done += 1;
    }
    Ok(rep.finish())
}

/// At `d^MTZ`, an admissible anti-symmetric perturbation whose formulation is inside
/// the original one gives the same formulation.
pub fn mtz_rigidity_report(space: &ArcSpace, count: usize, seed: u64) -> Result<PropositionReport> {
    let mut rep = PropositionReport::new("compare.mtz-rigidity", space.n());
    let opts = BuildOptions::pruned();
    let base = d_mtz(space);
    let sb = p_mtz(&base)?.build(space, &opts)?;
    let vars = x_names(space);
    let mut gradients = 0;
    let mut included = 0;
    for t in 0..count as u64 {
        let pert = antisymmetric_perturbation(&base, seed + t, true)?;
        gradients += usize::from(pert.gradient);
        let sp = p_mtz(&base.plus(&pert.delta))?.build(space, &opts)?;
        let inside = includes(&sp, &sb, &vars)?.holds();
        let ok = if inside {
            included += 1;
            includes(&sb, &sp, &vars)?.holds()
        } else {
            true
        };
        rep.check(
            format!("seed {}", seed + t),
            ok,
            format!("inclusion {inside}, equality {}", inside && ok),
        );
    }
    rep.note(format!(
        "{included} of {count} perturbed formulations were inside the original; {gradients} perturbations were potential differences"
    ));
    Ok(rep.finish())
}

/// Different simplex points give incomparable SCF formulations; the rows on the two
/// nodes with the smallest and the two with the largest `b' - b` separate them.
pub fn scf_incomparability_report(space: &ArcSpace, count: usize, seed: u64) -> Result<PropositionReport> {
    let mut rep = PropositionReport::new("compare.scf", space.n());
    let opts = BuildOptions::pruned();
    for t in 0..count as u64 {
        let b = sample_interior_b(space, seed + 2 * t);
        let b2 = sample_interior_b(space, seed + 2 * t + 1);
        let (a, c) = (p_scf(&b)?, p_scf(&b2)?);
        let cmp = compare_pair(&a, &c, space, &opts)?;
        let name = format!("pair {t}");
        record_comparison(&mut rep, &name, &a, &c, &cmp, Relation::Incomparable);

        let mut order: Vec<usize> = space.n1().collect();
        order.sort_by(|&i, &j| (b2.get(i) - b.get(i)).cmp(&(b2.get(j) - b.get(j))).then(i.cmp(&j)));
        let low = NodeSubset::from_nodes(order[..2].iter().copied());
        let high = NodeSubset::from_nodes(order[order.len() - 2..].iter().copied());
        let sys_b = a.build(space, &opts)?;
        let sys_b2 = c.build(space, &opts)?;
        // min over P(b') of the cut on `low` drops below Σ_low b, and symmetrically
        let cut = |s: NodeSubset| -> Result<Vec<(usize, Rat)>> {
            Ok(space
                .delta_plus(s)?
                .into_iter()
                .map(|(i, j)| (space.arc_index(i, j), Rat::one()))
                .collect())
        };
        let m1 = min_row_lhs(&sys_b2, &cut(low)?)?;
        let m2 = min_row_lhs(&sys_b, &cut(high)?)?;
        let sep1 = m1.as_ref().is_some_and(|v| *v < b.subset_sum(low));
        let sep2 = m2.as_ref().is_some_and(|v| *v < b2.subset_sum(high));
        rep.check(
            format!("{name}: separating subsets {low} and {high}"),
            sep1 && sep2,
            format!(
                "min cut({low}) over P(b') = {}, b sum {}; min cut({high}) over P(b) = {}, b' sum {}",
                fmt_opt(&m1),
                b.subset_sum(low),
                fmt_opt(&m2),
                b2.subset_sum(high)
            ),
        );
    }
    Ok(rep.finish())
}

fn fmt_opt(v: &Option<Rat>) -> String {
    v.as_ref().map_or("unbounded".into(), Rat::to_string)
}
