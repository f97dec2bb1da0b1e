//! `Q_MTZ(d)`, `Q_DL(d)`, `Q_SCF(b)` and their projections.

use super::{
    add_pair_rows, add_subset_row, build_ap, check_b, check_d, cycles, int, one, subsets, x, BuildOptions, ScfForm,
};
use crate::error::Result;
use crate::graph::ArcSpace;
use crate::lp::LinSys;
use crate::params::{BVec, DVec};
use crate::rat::Rat;

fn block_var(base: &str, label: Option<&str>, idx: &str) -> String {
    match label {
        Some(l) => format!("{base}[{l}][{idx}]"),
        None => format!("{base}[{idx}]"),
    }
}

/// Adds one `u` block and its rows: `u_i - u_j + x_ij <= 1 - d_ij`, or with `lifted`
/// the DL rows `u_i - u_j + x_ij + (1 - d_ij - d_ji) x_ji <= 1 - d_ij`.
pub(super) fn add_potential_block(
    sys: &mut LinSys,
    space: &ArcSpace,
    d: &DVec,
    label: Option<&str>,
    lifted: bool,
) -> Result<()> {
    let mut u = vec![usize::MAX; space.n() + 1];
    for i in space.n1() {
        u[i] = sys.add_var(block_var("u", label, &i.to_string()))?;
    }
    let kind = if lifted { "dl" } else { "mtz" };
    for (i, j) in space.arcs_a1() {
        let mut terms = vec![(u[i], one()), (u[j], -one()), (x(space, i, j), one())];
        if lifted {
            terms.push((x(space, j, i), one() - d.get(i, j) - d.get(j, i)));
        }
        let tag = match label {
            Some(l) => format!("{kind}[{l}]({i},{j})"),
            None => format!("{kind}({i},{j})"),
        };
        sys.add_le(tag, terms, one() - d.get(i, j))?;
    }
    Ok(())
}

/// Adds one flow block: balance `-b_i` at every `i ∈ N1`, `0 <= f <= x`.
pub(super) fn add_flow_block(sys: &mut LinSys, space: &ArcSpace, b: &BVec, label: Option<&str>) -> Result<()> {
    let base = sys.num_vars();
    for (i, j) in space.arcs() {
        sys.add_var(block_var("f", label, &format!("{i},{j}")))?;
    }
    let f = |i: usize, j: usize| base + space.arc_index(i, j);
    let tag = |kind: &str, rest: String| match label {
        Some(l) => format!("{kind}[{l}]({rest})"),
        None => format!("{kind}({rest})"),
    };
    for i in space.n1() {
        let terms = space
            .nodes()
            .filter(|&j| j != i)
            .flat_map(|j| [(f(i, j), one()), (f(j, i), -one())]);
        sys.add_eq(tag("flow", i.to_string()), terms, -b.get(i).clone())?;
    }
    for (i, j) in space.arcs() {
        sys.add_le(
            tag("cap", format!("{i},{j}")),
            [(f(i, j), one()), (x(space, i, j), -one())],
            Rat::zero(),
        )?;
    }
    for (i, j) in space.arcs() {
        sys.add_ge(tag("fnn", format!("{i},{j}")), [(f(i, j), one())], Rat::zero())?;
    }
    Ok(())
}

/// `Q_MTZ(d)` over `(x, u)` with `u` free.
pub fn build_q_mtz(space: &ArcSpace, d: &DVec) -> Result<LinSys> {
    check_d(space, d)?;
    let mut sys = build_ap(space);
    add_potential_block(&mut sys, space, d, None, false)?;
    Ok(sys)
}

/// `Q_DL(d)` over `(x, u)` with `u` free.
pub fn build_q_dl(space: &ArcSpace, d: &DVec) -> Result<LinSys> {
    check_d(space, d)?;
    let mut sys = build_ap(space);
    add_potential_block(&mut sys, space, d, None, true)?;
    Ok(sys)
}

/// `Q_SCF(b)` over `(x, f)`; the balance at node 1 is left out.
pub fn build_q_scf(space: &ArcSpace, b: &BVec) -> Result<LinSys> {
    check_b(space, b)?;
    let mut sys = build_ap(space);
    add_flow_block(&mut sys, space, b, None)?;
    Ok(sys)
}

/// `P_MTZ(d)`: `Σ_C x <= |C| - Σ_C d` for every cycle of `A1`, tagged `circuit(C)`.
pub fn build_p_mtz(space: &ArcSpace, d: &DVec, opts: &BuildOptions) -> Result<LinSys> {
    check_d(space, d)?;
    let mut sys = build_ap(space);
    for c in cycles(space, 2, opts)? {
        let sum = d.cycle_sum(&c);
        if opts.prune && (c.len() == space.n() - 1 || sum.is_zero()) {
            continue;
        }
        let terms = c.arcs().map(|(i, j)| (x(space, i, j), one()));
        sys.add_le(format!("circuit{c}"), terms, int(c.len()) - sum)?;
    }
    Ok(sys)
}

/// `P_DL(d)`: for cycles of length at least 3,
/// `Σ_C (x_ij + x_ji) - Σ_C (d_ij + d_ji) x_ji <= |C| - Σ_C d`, plus the pair rows.
pub fn build_p_dl(space: &ArcSpace, d: &DVec, opts: &BuildOptions) -> Result<LinSys> {
    check_d(space, d)?;
    let mut sys = build_ap(space);
    for c in cycles(space, 3, opts)? {
        let sum = d.cycle_sum(&c);
        if opts.prune && (c.len() == space.n() - 1 || sum.is_zero()) {
            continue;
        }
        let terms = c.arcs().flat_map(|(i, j)| {
            [
                (x(space, i, j), one()),
                (x(space, j, i), one() - d.get(i, j) - d.get(j, i)),
            ]
        });
        sys.add_le(format!("dl{c}"), terms, int(c.len()) - sum)?;
    }
    add_pair_rows(&mut sys, space)?;
    Ok(sys)
}

/// `P_SCF(b)`: one row per `S ∈ 𝒮1` with right-hand side `Σ_S b`, tagged `cut{S}` or
/// `clique{S}` according to `opts.scf_form`.
pub fn build_p_scf(space: &ArcSpace, b: &BVec, opts: &BuildOptions) -> Result<LinSys> {
    check_b(space, b)?;
    let mut sys = build_ap(space);
    let prefix = match opts.scf_form {
        ScfForm::Cut => "cut",
        ScfForm::Clique => "clique",
    };
    for s in subsets(space, opts)? {
        let sum = b.subset_sum(s);
        if opts.prune && (s.len() == space.n() - 1 || sum.is_zero()) {
            continue;
        }
        add_subset_row(&mut sys, space, prefix, s, sum, opts.scf_form)?;
    }
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::d_mtz;
    use crate::rat::rat;

    #[test]
    fn mtz_rows_at_uniform_parameter() {
        let sp = ArcSpace::new(5).unwrap();
        let q = build_q_mtz(&sp, &d_mtz(&sp)).unwrap();
        let r = q.row("mtz(2,3)").unwrap();
        assert_eq!(r.rhs, rat(3, 4));
        assert_eq!(q.num_vars(), 20 + 4);
    }

    #[test]
    fn dl_lifting_coefficient() {
        let sp = ArcSpace::new(6).unwrap();
        let q = build_q_dl(&sp, &d_mtz(&sp)).unwrap();
        let r = q.row("dl(2,3)").unwrap();
        assert_eq!(r.coeff(x(&sp, 3, 2)), rat(3, 5));
    }

    #[test]
    fn negative_parameter_rejected() {
        let sp = ArcSpace::new(4).unwrap();
        let mut d = d_mtz(&sp);
        d.set(2, 3, rat(-1, 5));
        assert!(build_q_mtz(&sp, &d).is_err());
    }
}
