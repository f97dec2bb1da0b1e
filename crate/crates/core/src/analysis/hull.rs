use serde::{Deserialize, Serialize};
use serde_json::json;

use super::PropositionReport;
use crate::error::Result;
use crate::lp::{fourier_motzkin, includes, is_redundant, min_row_lhs, FmOptions, LinSys};
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HullFamily {
    Mtz,
    Dl,
}

const VARS: [&str; 4] = ["u_i", "u_j", "x_ij", "x_ji"];

fn r(v: i64) -> Rat {
    Rat::from_int(v)
}

/// The disjunctive lifting over the three admissible `(x_ij, x_ji)` patterns, in
/// variables `u, x, v^1..v^3, λ`, and the claimed hull description in `u, x`.
pub fn hull_systems(family: HullFamily, dij: &Rat, dji: &Rat) -> Result<(LinSys, LinSys)> {
    let one = Rat::one;
    let mut lifted = LinSys::with_vars(
        VARS.iter()
            .copied()
            .chain(["vi1", "vj1", "vi2", "vj2", "vi3", "vj3", "l1", "l2", "l3"]),
    )?;
    let id = |s: &LinSys, n: &str| s.var_id(n).unwrap();
    let (ui, uj, xij, xji) = (
        id(&lifted, "u_i"),
        id(&lifted, "u_j"),
        id(&lifted, "x_ij"),
        id(&lifted, "x_ji"),
    );
    let v = |s: &LinSys, n: &str| id(s, n);
    let (vi1, vj1, vi2, vj2, vi3, vj3) = (
        v(&lifted, "vi1"),
        v(&lifted, "vj1"),
        v(&lifted, "vi2"),
        v(&lifted, "vj2"),
        v(&lifted, "vi3"),
        v(&lifted, "vj3"),
    );
    let (l1, l2, l3) = (v(&lifted, "l1"), v(&lifted, "l2"), v(&lifted, "l3"));
    let m1 = -one();
    lifted.add_eq(
        "split-i",
        vec![(ui, one()), (vi1, m1.clone()), (vi2, m1.clone()), (vi3, m1.clone())],
        r(0),
    )?;
    lifted.add_eq(
        "split-j",
        vec![(uj, one()), (vj1, m1.clone()), (vj2, m1.clone()), (vj3, m1.clone())],
        r(0),
    )?;
    lifted.add_eq("x_ij=l1", vec![(xij, one()), (l1, m1.clone())], r(0))?;
    lifted.add_eq("x_ji=l2", vec![(xji, one()), (l2, m1.clone())], r(0))?;
    lifted.add_eq("convex", vec![(l1, one()), (l2, one()), (l3, one())], r(1))?;
    for (k, l) in [(l1, "l1"), (l2, "l2"), (l3, "l3")] {
        lifted.add_le(format!("{l}>=0"), vec![(k, m1.clone())], r(0))?;
    }
    let cij = one() - dij;
    let cji = one() - dji;
    match family {
        HullFamily::Mtz => {
            lifted.add_le("d1a", vec![(vi1, one()), (vj1, m1.clone()), (l1, dij.clone())], r(0))?;
            lifted.add_le("d1b", vec![(vj1, one()), (vi1, m1.clone()), (l1, -&cji)], r(0))?;
            lifted.add_le("d2a", vec![(vj2, one()), (vi2, m1.clone()), (l2, dji.clone())], r(0))?;
            lifted.add_le("d2b", vec![(vi2, one()), (vj2, m1.clone()), (l2, -&cij)], r(0))?;
        }
        HullFamily::Dl => {
            lifted.add_eq("d1", vec![(vi1, one()), (vj1, m1.clone()), (l1, dij.clone())], r(0))?;
            lifted.add_eq("d2", vec![(vj2, one()), (vi2, m1.clone()), (l2, dji.clone())], r(0))?;
        }
    }
    lifted.add_le("d3a", vec![(vi3, one()), (vj3, m1.clone()), (l3, -&cij)], r(0))?;
    lifted.add_le("d3b", vec![(vj3, one()), (vi3, m1.clone()), (l3, -&cji)], r(0))?;

    let mut stated = LinSys::with_vars(VARS)?;
    let (ui, uj, xij, xji) = (0, 1, 2, 3);
    match family {
        HullFamily::Mtz => {
            stated.add_le("row-ij", vec![(ui, one()), (uj, m1.clone()), (xij, one())], cij.clone())?;
            stated.add_le("row-ji", vec![(uj, one()), (ui, m1.clone()), (xji, one())], cji.clone())?;
            stated.add_le("pair", vec![(xij, one()), (xji, one())], r(1))?;
        }
        HullFamily::Dl => {
            let cross = one() - dij - dji;
            stated.add_le(
                "row-ij",
                vec![(ui, one()), (uj, m1.clone()), (xij, one()), (xji, cross.clone())],
                cij.clone(),
            )?;
            stated.add_le(
                "row-ji",
                vec![(uj, one()), (ui, m1.clone()), (xji, one()), (xij, cross)],
                cji.clone(),
            )?;
        }
    }
    stated.add_le("x_ij>=0", vec![(xij, m1.clone())], r(0))?;
    stated.add_le("x_ji>=0", vec![(xji, m1)], r(0))?;
    Ok((lifted, stated))
}

/// Projects the disjunctive lifting by Fourier–Motzkin and certifies mutual inclusion
/// with the claimed hull. MTZ additionally checks that the two potential rows are
/// facets; DL checks that `x_ij + x_ji <= 1` is implied.
pub fn verify_local_hull(family: HullFamily, dij: &Rat, dji: &Rat) -> Result<PropositionReport> {
    let id = match family {
        HullFamily::Mtz => "hull.mtz",
        HullFamily::Dl => "hull.dl",
    };
    let mut rep = PropositionReport::new(id, 2);
    rep.param(json!({ "d_ij": dij, "d_ji": dji }));
    let (lifted, stated) = hull_systems(family, dij, dji)?;
    let elim = ["vi1", "vj1", "vi2", "vj2", "vi3", "vj3", "l1", "l2", "l3"];
    let projected = fourier_motzkin(&lifted, &elim, FmOptions::default())?;
    let vars: Vec<String> = VARS.iter().map(|s| s.to_string()).collect();
    let a = includes(&projected, &stated, &vars)?;
    let b = includes(&stated, &projected, &vars)?;
    rep.check(
        "projection equals stated hull",
        a.holds() && b.holds(),
        format!(
            "projection has {} rows; inclusions {} / {}",
            projected.num_rows(),
            a.holds(),
            b.holds()
        ),
    );
    match family {
        HullFamily::Mtz => {
            for tag in ["row-ij", "row-ji"] {
                let nonred = !is_redundant(&stated, tag)?.is_redundant();
                let row = stated.row(tag).unwrap();
                let strict = min_row_lhs(&stated, &row.coeffs)?.is_none_or(|m| m < row.rhs);
                rep.check(
                    format!("{tag} is a facet"),
                    nonred && strict,
                    format!("non-redundant {nonred}, strict {strict}"),
                );
            }
        }
        HullFamily::Dl => {
            let mut with_pair = stated.clone();
            with_pair.add_le("pair", vec![(2, Rat::one()), (3, Rat::one())], Rat::one())?;
            let red = is_redundant(&with_pair, "pair")?.is_redundant();
            rep.check("x_ij + x_ji <= 1 implied", red, format!("redundant {red}"));
            if dij != dji {
                let alt = swap_rhs(&stated)?;
                let eq = includes(&projected, &alt, &vars)?.holds() && includes(&alt, &projected, &vars)?.holds();
                rep.note(format!(
                    "exchanging the right-hand sides of the two potential rows still describes the hull: {eq}"
                ));
            }
        }
    }
    Ok(rep.finish())
}

/// `stated` with the right-hand sides of its two potential rows exchanged.
fn swap_rhs(stated: &LinSys) -> Result<LinSys> {
    let mut out = LinSys::with_vars(VARS)?;
    for row in stated.rows() {
        let rhs = match row.tag.as_str() {
            "row-ij" => stated.row("row-ji").unwrap().rhs.clone(),
            "row-ji" => stated.row("row-ij").unwrap().rhs.clone(),
            _ => row.rhs.clone(),
        };
        out.add_row(row.tag.clone(), row.kind, row.coeffs.clone(), rhs)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn mtz_quarter() {
        let rep = verify_local_hull(HullFamily::Mtz, &rat(1, 4), &rat(1, 4)).unwrap();
        assert!(rep.verified(), "{}", rep.to_text());
    }

    #[test]
    fn dl_half_and_asymmetric() {
        let rep = verify_local_hull(HullFamily::Dl, &rat(1, 2), &rat(1, 2)).unwrap();
        assert!(rep.verified(), "{}", rep.to_text());
        let rep = verify_local_hull(HullFamily::Dl, &rat(1, 5), &rat(3, 5)).unwrap();
        assert!(rep.verified(), "{}", rep.to_text());
        assert!(rep.notes[0].ends_with("false"));
    }
}
