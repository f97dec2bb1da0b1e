//! The classic systems: DFJ, circuit families, MTZ, DL, SCF and their disaggregations.

use std::collections::BTreeMap;

use super::{add_pair_rows, add_subset_row, build_ap, cycles, int, one, subsets, x, BuildOptions, FamilyId, ScfForm};
use crate::error::Result;
use crate::graph::{ArcSpace, Cycle};
use crate::lp::LinSys;
use crate::rat::Rat;

fn n1_share(space: &ArcSpace, count: usize) -> Rat {
    Rat::from(count) / Rat::from(space.n() - 1)
}

fn subset_system(space: &ArcSpace, opts: &BuildOptions, form: ScfForm, rhs: impl Fn(usize) -> Rat) -> Result<LinSys> {
    let mut sys = build_ap(space);
    let prefix = match form {
        ScfForm::Cut => "cut",
        ScfForm::Clique => "clique",
    };
    for s in subsets(space, opts)? {
        if opts.prune && s.len() == space.n() - 1 {
            continue;
        }
        add_subset_row(&mut sys, space, prefix, s, rhs(s.len()), form)?;
    }
    Ok(sys)
}

/// Clique rows `Σ_{A(S)} x <= |S| - 1`, tagged `clique{S}`.
pub fn build_dfj_clique(space: &ArcSpace, opts: &BuildOptions) -> Result<LinSys> {
    subset_system(space, opts, ScfForm::Clique, |_| one())
}

/// Cut rows `Σ_{δ⁺(S)} x >= 1`, tagged `cut{S}`.
pub fn build_dfj_cut(space: &ArcSpace, opts: &BuildOptions) -> Result<LinSys> {
    subset_system(space, opts, ScfForm::Cut, |_| one())
}

/// `Σ_{A(S)} x <= |S| - |S|/(n-1)`, tagged `clique{S}`.
pub fn build_weak_clique(space: &ArcSpace, opts: &BuildOptions) -> Result<LinSys> {
    subset_system(space, opts, ScfForm::Clique, |k| n1_share(space, k))
}

fn cycle_system(space: &ArcSpace, opts: &BuildOptions, slack: impl Fn(&Cycle) -> Rat) -> Result<LinSys> {
    let mut sys = build_ap(space);
    for c in cycles(space, 2, opts)? {
        if opts.prune && c.len() == space.n() - 1 {
            continue;
        }
        let terms = c.arcs().map(|(i, j)| (x(space, i, j), one()));
        sys.add_le(format!("circuit{c}"), terms, int(c.len()) - slack(&c))?;
    }
    Ok(sys)
}

/// `Σ_C x <= |C| - 1`, tagged `circuit(C)`.
pub fn build_circuit(space: &ArcSpace, opts: &BuildOptions) -> Result<LinSys> {
    cycle_system(space, opts, |_| one())
}

/// `Σ_C x <= |C| - |C|/(n-1)`, tagged `circuit(C)`.
pub fn build_weak_circuit(space: &ArcSpace, opts: &BuildOptions) -> Result<LinSys> {
    cycle_system(space, opts, |c| n1_share(space, c.len()))
}

/// `Σ_C x + (n-3)/(n-1) Σ_{reverse C} x <= |C| - |C|/(n-1)` for `|C| >= 3`, tagged
/// `dl(C)`, together with the pair rows `x_ij + x_ji <= 1`.
pub fn build_lifted_weak_circuit(space: &ArcSpace, opts: &BuildOptions) -> Result<LinSys> {
    let mut sys = build_ap(space);
    let back = n1_share(space, space.n() - 3);
    for c in cycles(space, 3, opts)? {
        if opts.prune && c.len() == space.n() - 1 {
            continue;
        }
        let terms = c
            .arcs()
            .flat_map(|(i, j)| [(x(space, i, j), one()), (x(space, j, i), back.clone())]);
        sys.add_le(format!("dl{c}"), terms, int(c.len()) - n1_share(space, c.len()))?;
    }
    add_pair_rows(&mut sys, space)?;
    Ok(sys)
}

/// Precedence variables `v[k,i]` for distinct `k, i ∈ N1`, bounded to `[0, 1]`.
fn add_precedence_vars(sys: &mut LinSys, space: &ArcSpace) -> Result<Vec<Vec<usize>>> {
    let n = space.n();
    let mut v = vec![vec![usize::MAX; n + 1]; n + 1];
    for (k, i) in space.arcs_a1() {
        v[k][i] = sys.add_var(format!("v[{k},{i}]"))?;
    }
    for (k, i) in space.arcs_a1() {
        sys.add_ge(format!("vlb({k},{i})"), [(v[k][i], one())], Rat::zero())?;
        sys.add_le(format!("vub({k},{i})"), [(v[k][i], one())], one())?;
    }
    Ok(v)
}

fn precedence_system(space: &ArcSpace, lifted: bool) -> LinSys {
    let mut sys = build_ap(space);
    add_precedence_rows(&mut sys, space, lifted).expect("fresh variable names");
    sys
}

fn add_precedence_rows(sys: &mut LinSys, space: &ArcSpace, lifted: bool) -> Result<()> {
    let v = add_precedence_vars(sys, space)?;
    for (i, j) in space.arcs_a1() {
        for k in space.n1().filter(|&k| k != i && k != j) {
            let mut terms = vec![(x(space, i, j), one()), (v[k][i], one()), (v[k][j], -one())];
            if lifted {
                terms.push((x(space, j, i), one()));
            }
            sys.add_le(format!("prec({k};{i},{j})"), terms, one())?;
        }
    }
    for (i, j) in space.arcs_a1() {
        sys.add_le(
            format!("before({i},{j})"),
            [(x(space, i, j), one()), (v[i][j], -one())],
            Rat::zero(),
        )?;
        sys.add_le(
            format!("after({i},{j})"),
            [(x(space, i, j), one()), (v[j][i], one())],
            one(),
        )?;
    }
    Ok(())
}

/// RMTZ over `(x, v)`.
pub fn build_rmtz(space: &ArcSpace) -> LinSys {
    precedence_system(space, false)
}

/// L1RMTZ: RMTZ with `x_ji` lifted into the three-index rows.
pub fn build_l1rmtz(space: &ArcSpace) -> LinSys {
    precedence_system(space, true)
}

/// MCF over `(x, f[k][i,j])`: one unit commodity from node 1 to each `k ∈ N1`.
pub fn build_mcf(space: &ArcSpace) -> LinSys {
    let mut sys = build_ap(space);
    let mut go = || -> Result<()> {
        for k in space.n1() {
            let base = sys.num_vars();
            for (i, j) in space.arcs() {
                sys.add_var(format!("f[{k}][{i},{j}]"))?;
            }
            let f = |i: usize, j: usize| base + space.arc_index(i, j);
            for i in space.nodes() {
                let terms = space
                    .nodes()
                    .filter(|&j| j != i)
                    .flat_map(|j| [(f(i, j), one()), (f(j, i), -one())]);
                let rhs = if i == 1 {
                    one()
                } else if i == k {
                    -one()
                } else {
                    Rat::zero()
                };
                sys.add_eq(format!("flow[{k}]({i})"), terms, rhs)?;
            }
            for (i, j) in space.arcs() {
                sys.add_le(
                    format!("cap[{k}]({i},{j})"),
                    [(f(i, j), one()), (x(space, i, j), -one())],
                    Rat::zero(),
                )?;
                sys.add_ge(format!("fnn[{k}]({i},{j})"), [(f(i, j), one())], Rat::zero())?;
            }
        }
        Ok(())
    };
    go().expect("fresh variable names");
    sys
}

fn classic_potential(space: &ArcSpace, lifted: bool) -> LinSys {
    let mut sys = build_ap(space);
    let n = space.n();
    let mut u = vec![usize::MAX; n + 1];
    for i in space.n1() {
        u[i] = sys.add_var(format!("u[{i}]")).expect("fresh variable names");
    }
    let kind = if lifted { "dl" } else { "mtz" };
    for (i, j) in space.arcs_a1() {
        let mut terms = vec![(u[i], one()), (u[j], -one()), (x(space, i, j), int(n - 1))];
        if lifted {
            terms.push((x(space, j, i), int(n - 3)));
        }
        sys.add_le(format!("{kind}({i},{j})"), terms, int(n - 2))
            .expect("rows over known variables");
    }
    sys
}

/// `u_i - u_j + (n-1) x_ij <= n-2`.
pub fn build_classic_mtz(space: &ArcSpace) -> LinSys {
    classic_potential(space, false)
}

/// `u_i - u_j + (n-1) x_ij + (n-3) x_ji <= n-2`.
pub fn build_classic_dl(space: &ArcSpace) -> LinSys {
    classic_potential(space, true)
}

/// SCF with supply `n-1` at node 1, demand 1 elsewhere and `f <= (n-1) x`.
pub fn build_classic_scf(space: &ArcSpace) -> LinSys {
    let mut sys = build_ap(space);
    add_classic_flow(&mut sys, space).expect("fresh variable names");
    sys
}

fn add_classic_flow(sys: &mut LinSys, space: &ArcSpace) -> Result<()> {
    let n = space.n();
    let base = sys.num_vars();
    for (i, j) in space.arcs() {
        sys.add_var(format!("f[{i},{j}]"))?;
    }
    let f = |i: usize, j: usize| base + space.arc_index(i, j);
    for i in space.nodes() {
        let terms = space
            .nodes()
            .filter(|&j| j != i)
            .flat_map(|j| [(f(i, j), one()), (f(j, i), -one())]);
        let rhs = if i == 1 { int(n - 1) } else { -one() };
        sys.add_eq(format!("flow({i})"), terms, rhs)?;
    }
    for (i, j) in space.arcs() {
        sys.add_le(
            format!("cap({i},{j})"),
            [(f(i, j), one()), (x(space, i, j), -int(n - 1))],
            Rat::zero(),
        )?;
        sys.add_ge(format!("fnn({i},{j})"), [(f(i, j), one())], Rat::zero())?;
    }
    Ok(())
}

/// Every classic system keyed by name: the non-parametric families plus `MTZ`, `DL`
/// and `SCF`.
pub fn build_classics(space: &ArcSpace, opts: &BuildOptions) -> Result<BTreeMap<String, LinSys>> {
    let mut out = BTreeMap::new();
    out.insert(FamilyId::DfjClique.to_string(), build_dfj_clique(space, opts)?);
    out.insert(FamilyId::DfjCut.to_string(), build_dfj_cut(space, opts)?);
    out.insert(FamilyId::Circuit.to_string(), build_circuit(space, opts)?);
    out.insert(FamilyId::WeakCircuit.to_string(), build_weak_circuit(space, opts)?);
    out.insert(FamilyId::WeakClique.to_string(), build_weak_clique(space, opts)?);
    out.insert(
        FamilyId::LiftedWeakCircuit.to_string(),
        build_lifted_weak_circuit(space, opts)?,
    );
    out.insert(FamilyId::Rmtz.to_string(), build_rmtz(space));
    out.insert(FamilyId::L1Rmtz.to_string(), build_l1rmtz(space));
    out.insert(FamilyId::Mcf.to_string(), build_mcf(space));
    out.insert("MTZ".to_string(), build_classic_mtz(space));
    out.insert("DL".to_string(), build_classic_dl(space));
    out.insert("SCF".to_string(), build_classic_scf(space));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clique_count_at_five() {
        let sp = ArcSpace::new(5).unwrap();
        let s = build_dfj_clique(&sp, &BuildOptions::default()).unwrap();
        assert_eq!(s.inequalities().filter(|r| r.tag.starts_with("clique")).count(), 11);
        let pruned = build_dfj_clique(&sp, &BuildOptions::pruned()).unwrap();
        assert_eq!(
            pruned.inequalities().filter(|r| r.tag.starts_with("clique")).count(),
            10
        );
    }

    #[test]
    fn mcf_variable_count() {
        for n in 4..=6 {
            let sp = ArcSpace::new(n).unwrap();
            assert_eq!(build_mcf(&sp).num_vars(), n * (n - 1) + (n - 1) * n * (n - 1));
        }
    }

    #[test]
    fn rmtz_catalog() {
        let sp = ArcSpace::new(5).unwrap();
        let s = build_rmtz(&sp);
        assert_eq!(s.num_vars(), 20 + 12);
        assert!(s.has_tag("prec(4;2,3)"));
        assert!(s.var_id("v[2,3]").is_some());
    }
}
