//! Closures of the parametric families and the stacked extended formulations.

use std::collections::BTreeMap;

use super::parametric::{add_flow_block, add_potential_block};
use super::{
    add_pair_rows, build_ap, build_circuit, build_dfj_clique, build_dfj_cut, check_b, check_d, cycles, int, one, x,
    BuildOptions, FamilyId, ScfForm,
};
use crate::error::{Error, Result};
use crate::graph::{ArcSpace, Cycle};
use crate::lp::LinSys;
use crate::params::{canonical_vertices, Family, Param};

/// `P̄_MTZ`: the circuit rows.
pub fn build_cl_mtz(space: &ArcSpace, opts: &BuildOptions) -> Result<LinSys> {
    build_circuit(space, opts)
}

/// `P̄_SCF`: the DFJ subset rows in the form selected by `opts.scf_form`.
pub fn build_cl_scf(space: &ArcSpace, opts: &BuildOptions) -> Result<LinSys> {
    match opts.scf_form {
        ScfForm::Cut => build_dfj_cut(space, opts),
        ScfForm::Clique => build_dfj_clique(space, opts),
    }
}

fn both_ways(space: &ArcSpace, c: &Cycle) -> Vec<(usize, crate::rat::Rat)> {
    c.arcs()
        .flat_map(|(i, j)| [(x(space, i, j), one()), (x(space, j, i), one())])
        .collect()
}

/// `P̄_DL`: `Σ_C (x_ij + x_ji) - x_lk <= |C| - 1` for every cycle with `|C| >= 3` and
/// every `kl ∈ C`, tagged `lifted(C)[k,l]`, plus the pair rows.
pub fn build_cl_dl(space: &ArcSpace, opts: &BuildOptions) -> Result<LinSys> {
    let mut sys = build_ap(space);
    for c in cycles(space, 3, opts)? {
        if opts.prune && c.len() == space.n() - 1 {
            continue;
        }
        for (k, l) in c.arcs() {
            let mut terms = both_ways(space, &c);
            terms.push((x(space, l, k), -one()));
            sys.add_le(format!("lifted{c}[{k},{l}]"), terms, int(c.len() - 1))?;
        }
    }
    add_pair_rows(&mut sys, space)?;
    Ok(sys)
}

/// The closure of `P_DL` over `V_MTZ`: for every cycle with `|C| >= 3` and `k ∈ C`,
/// `Σ_C (x_ij + x_ji) - x_{k,k⁻} - x_{k⁺,k} <= |C| - 1` (tagged `vmtz(C)[k]`), plus the
/// pair rows.
pub fn build_cl_dl_on_vmtz(space: &ArcSpace, opts: &BuildOptions) -> Result<LinSys> {
    let mut sys = build_ap(space);
    for c in cycles(space, 3, opts)? {
        if opts.prune && c.len() == space.n() - 1 {
            continue;
        }
        for &k in c.nodes() {
            let (prev, next) = (c.pred(k).unwrap(), c.succ(k).unwrap());
            let mut terms = both_ways(space, &c);
            terms.push((x(space, k, prev), -one()));
            terms.push((x(space, next, k), -one()));
            sys.add_le(format!("vmtz{c}[{k}]"), terms, int(c.len() - 1))?;
        }
    }
    add_pair_rows(&mut sys, space)?;
    Ok(sys)
}

/// Block label for the `t`-th parameter of a stacked formulation: `k` for `d^k` or
/// `b^k`, `k,l` for `d^{kl}`, otherwise `p<t>`.
pub fn vertex_label(p: &Param, t: usize) -> String {
    match p {
        Param::D(d) => {
            let ones: Vec<_> = d.iter().filter(|(_, v)| !v.is_zero()).collect();
            if ones.iter().all(|(_, v)| v.is_one()) {
                if let [((k, l), _)] = ones[..] {
                    return format!("{k},{l}");
                }
                let space = d.space();
                if let Some(((k, _), _)) = ones.first() {
                    let k = *k;
                    if ones.len() == space.n() - 2 && ones.iter().all(|((i, _), _)| *i == k) {
                        return k.to_string();
                    }
                }
            }
            format!("p{t}")
        }
        Param::B(b) => {
            let support: Vec<_> = b.iter().filter(|(_, v)| !v.is_zero()).collect();
            match support[..] {
                [(k, v)] if v.is_one() => k.to_string(),
                _ => format!("p{t}"),
            }
        }
    }
}

/// `Ef(Q(𝒫))`: the assignment rows once and one auxiliary block per listed parameter.
/// Blocks are named `u[label][i]` or `f[label][i,j]` with labels from [`vertex_label`].
pub fn build_ef(space: &ArcSpace, family: Family, vertices: &[Param]) -> Result<LinSys> {
    if vertices.is_empty() {
        return Err(Error::arg("stacked formulation needs at least one parameter"));
    }
    let mut sys = build_ap(space);
    for (t, p) in vertices.iter().enumerate() {
        let label = vertex_label(p, t);
        match (family, p) {
            (Family::Mtz | Family::Dl, Param::D(d)) => {
                check_d(space, d)?;
                add_potential_block(&mut sys, space, d, Some(&label), family == Family::Dl)?;
            }
            (Family::Scf, Param::B(b)) => {
                check_b(space, b)?;
                add_flow_block(&mut sys, space, b, Some(&label))?;
            }
            _ => return Err(Error::arg(format!("parameter {t} has the wrong shape"))),
        }
    }
    Ok(sys)
}

/// `P̄_MTZ`, `P̄_DL`, `P̄_SCF`, the closure of `P_DL` over `V_MTZ`, and the three
/// stacked formulations over the canonical vertex sets.
pub fn build_closures(space: &ArcSpace, opts: &BuildOptions) -> Result<BTreeMap<String, LinSys>> {
    let mut out = BTreeMap::new();
    out.insert(FamilyId::ClMtz.to_string(), build_cl_mtz(space, opts)?);
    out.insert(FamilyId::ClDl.to_string(), build_cl_dl(space, opts)?);
    out.insert(FamilyId::ClScf.to_string(), build_cl_scf(space, opts)?);
    out.insert(FamilyId::ClDlOnVmtz.to_string(), build_cl_dl_on_vmtz(space, opts)?);
    for (id, fam) in [
        (FamilyId::EfMtz, Family::Mtz),
        (FamilyId::EfDl, Family::Dl),
        (FamilyId::EfScf, Family::Scf),
    ] {
        out.insert(id.to_string(), build_ef(space, fam, &canonical_vertices(fam, space))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{d_mtz, d_tail, d_unit, BVec};

    #[test]
    fn cl_dl_row_count_at_five() {
        let sp = ArcSpace::new(5).unwrap();
        let s = build_cl_dl(&sp, &BuildOptions::pruned()).unwrap();
        let lifted = s.inequalities().filter(|r| r.tag.starts_with("lifted")).count();
        let pairs = s.inequalities().filter(|r| r.tag.starts_with("pair")).count();
        assert_eq!((lifted, pairs), (24, 6));
        let full = build_cl_dl(&sp, &BuildOptions::default()).unwrap();
        let all = full.inequalities().filter(|r| r.tag.starts_with("lifted")).count();
        assert_eq!(all, 24 + 6 * 4);
    }

    #[test]
    fn labels() {
        let sp = ArcSpace::new(5).unwrap();
        assert_eq!(vertex_label(&Param::D(d_tail(&sp, 3)), 0), "3");
        assert_eq!(vertex_label(&Param::D(d_unit(&sp, 3, 5)), 0), "3,5");
        assert_eq!(vertex_label(&Param::D(d_mtz(&sp)), 7), "p7");
        assert_eq!(vertex_label(&Param::B(BVec::unit(&sp, 4)), 0), "4");
    }

    #[test]
    fn ef_block_layout() {
        let sp = ArcSpace::new(5).unwrap();
        let ef = build_ef(&sp, Family::Mtz, &canonical_vertices(Family::Mtz, &sp)).unwrap();
        assert_eq!(ef.num_vars(), 20 + 4 * 4);
        assert!(ef.var_id("u[2][3]").is_some());
        let r = ef.row("mtz[2](2,3)").unwrap();
        assert!(r.rhs.is_zero());
        assert!(build_ef(&sp, Family::Mtz, &[]).is_err());
    }
}
