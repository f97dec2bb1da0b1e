//! Fourier–Motzkin projection.
//!
//! Equalities that mention an eliminated variable are used to substitute it out
//! first. The remaining eliminated variables are split into groups that never share
//! a row; each group is projected on its own, since the projection of the whole is
//! the intersection of the per-group projections.

use std::collections::{BTreeSet, HashMap};

use super::simplex::{LpStatus, Sense, Simplex};
use super::{normalize_coeffs, LinSys, Row, RowKind};
use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Copy, Debug)]
pub struct FmOptions {
    /// Remove LP-redundant rows after every elimination step.
    pub prune: bool,
}

impl Default for FmOptions {
    fn default() -> Self {
        FmOptions { prune: true }
    }
}

fn mentions(r: &Row, v: usize) -> Option<&Rat> {
    r.coeffs
        .binary_search_by_key(&v, |(w, _)| *w)
        .ok()
        .map(|k| &r.coeffs[k].1)
}

/// `r - factor·e`, used for substitution.
fn sub_scaled(r: &Row, factor: &Rat, e: &Row) -> Row {
    let coeffs = normalize_coeffs(
        r.coeffs
            .iter()
            .cloned()
            .chain(e.coeffs.iter().map(|(w, a)| (*w, -(a * factor)))),
    );
    Row {
        tag: r.tag.clone(),
        kind: r.kind,
        coeffs,
        rhs: &r.rhs - &(&e.rhs * factor),
    }
}

/// Scales so the first coefficient has absolute value one.
fn scale_key(r: &Row) -> (Vec<(usize, Rat)>, Rat) {
    match r.coeffs.first() {
        None => (Vec::new(), r.rhs.clone()),
        Some((_, a)) => {
            let s = a.abs().recip();
            (r.coeffs.iter().map(|(v, c)| (*v, c * &s)).collect(), &r.rhs * &s)
        }
    }
}

/// Drops trivially satisfied rows and keeps the tightest of parallel `Le` rows.
/// Returns `None` if some row is trivially infeasible.
fn tidy(rows: Vec<Row>) -> Option<Vec<Row>> {
    let mut out: Vec<Row> = Vec::with_capacity(rows.len());
    let mut seen: HashMap<Vec<(usize, Rat)>, usize> = HashMap::new();
    for r in rows {
        if r.coeffs.is_empty() {
            let ok = match r.kind {
                RowKind::Le => !r.rhs.is_negative(),
                RowKind::Eq => r.rhs.is_zero(),
            };
            if ok {
                continue;
            }
            return None;
        }
        if r.kind == RowKind::Eq {
            out.push(r);
            continue;
        }
        let (key, rhs) = scale_key(&r);
        match seen.get(&key) {
            Some(&k) => {
                let (_, old) = scale_key(&out[k]);
                if rhs < old {
                    out[k] = r;
                }
            }
            None => {
                seen.insert(key, out.len());
                out.push(r);
            }
        }
    }
    Some(out)
}

fn infeasible_row() -> Row {
    Row {
        tag: "infeasible".into(),
        kind: RowKind::Le,
        coeffs: Vec::new(),
        rhs: -Rat::one(),
    }
}

/// Removes rows of `rows` implied by the rest together with `context`.
fn prune(rows: Vec<Row>, context: &[Row], nvars: usize) -> Vec<Row> {
    let mut keep = vec![true; rows.len()];
    for k in (0..rows.len()).rev() {
        if rows[k].kind != RowKind::Le {
            continue;
        }
        let others: Vec<Row> = context
            .iter()
            .cloned()
            .chain(
                rows.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k && keep[j])
                    .map(|(_, r)| r.clone()),
            )
            .collect();
        let mut sx = Simplex::from_rows(nvars, others);
        if !sx.is_feasible() {
            return vec![infeasible_row()];
        }
        let res = sx
            .optimize(&rows[k].coeffs, Sense::Max)
            .expect("row variables are cataloged");
        if res.status == LpStatus::Optimal && res.value.unwrap() <= rows[k].rhs {
            keep[k] = false;
        }
    }
    rows.into_iter().zip(keep).filter(|(_, k)| *k).map(|(r, _)| r).collect()
}

fn eliminate_one(rows: Vec<Row>, v: usize) -> Vec<Row> {
    let (mut pos, mut neg, mut out) = (Vec::new(), Vec::new(), Vec::new());
    for r in rows {
        match mentions(&r, v).map(Rat::signum) {
            Some(1) => pos.push(r),
            Some(-1) => neg.push(r),
            _ => out.push(r),
        }
    }
    for p in &pos {
        let pv = mentions(p, v).unwrap().clone();
        for q in &neg {
            let qv = -mentions(q, v).unwrap();
            let coeffs = normalize_coeffs(
                p.coeffs
                    .iter()
                    .map(|(w, a)| (*w, a * &qv))
                    .chain(q.coeffs.iter().map(|(w, a)| (*w, a * &pv))),
            );
            out.push(Row {
                tag: String::new(),
                kind: RowKind::Le,
                coeffs,
                rhs: &p.rhs * &qv + &q.rhs * &pv,
            });
        }
    }
    out
}

fn project_group(
    mut rows: Vec<Row>,
    mut group: BTreeSet<usize>,
    context: &[Row],
    nvars: usize,
    opts: FmOptions,
) -> Vec<Row> {
    while !group.is_empty() {
        // Cheapest elimination first: fewest generated rows.
        let v = *group
            .iter()
            .min_by_key(|&&v| {
                let (mut p, mut n) = (0usize, 0usize);
                for r in &rows {
                    match mentions(r, v).map(Rat::signum) {
                        Some(1) => p += 1,
                        Some(-1) => n += 1,
                        _ => {}
                    }
                }
                (p * n) as isize - (p + n) as isize
            })
            .unwrap();
        group.remove(&v);
        rows = match tidy(eliminate_one(rows, v)) {
            Some(r) => r,
            None => return vec![infeasible_row()],
        };
        if opts.prune {
            rows = prune(rows, context, nvars);
        }
    }
    rows
}

/// Projects `sys` onto the variables not listed in `eliminate`.
pub fn fourier_motzkin(sys: &LinSys, eliminate: &[&str], opts: FmOptions) -> Result<LinSys> {
    let nvars = sys.num_vars();
    let mut elim = vec![false; nvars];
    for name in eliminate {
        elim[sys.require_var(name)?] = true;
    }
    let mut rows: Vec<Row> = sys.rows().to_vec();

    // Substitute out eliminated variables that occur in equalities.
    while let Some((k, v)) = rows.iter().enumerate().find_map(|(k, r)| {
        (r.kind == RowKind::Eq)
            .then(|| r.coeffs.iter().find(|(w, _)| elim[*w]).map(|(w, _)| (k, *w)))
            .flatten()
    }) {
        let e = rows.swap_remove(k);
        let a = mentions(&e, v).unwrap().clone();
        rows = rows
            .into_iter()
            .map(|r| match mentions(&r, v) {
                Some(b) => {
                    let f = b / &a;
                    sub_scaled(&r, &f, &e)
                }
                None => r,
            })
            .collect();
    }
    rows.sort_by_key(|r| sys.row_index(&r.tag).unwrap_or(usize::MAX));

    let has_elim = |r: &Row| r.coeffs.iter().any(|(w, _)| elim[*w]);
    let (touched, base): (Vec<Row>, Vec<Row>) = rows.into_iter().partition(|r| has_elim(r));

    // Union-find over eliminated variables sharing a row.
    let mut parent: Vec<usize> = (0..nvars).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let nx = p[c];
            p[c] = r;
            c = nx;
        }
        r
    }
    for r in &touched {
        let vs: Vec<usize> = r.coeffs.iter().map(|(w, _)| *w).filter(|&w| elim[w]).collect();
        for w in vs.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut groups: Vec<(usize, BTreeSet<usize>, Vec<Row>)> = Vec::new();
    for r in touched {
        let first = r.coeffs.iter().find(|(w, _)| elim[*w]).unwrap().0;
        let root = find(&mut parent, first);
        let slot = match groups.iter().position(|g| g.0 == root) {
            Some(k) => k,
            None => {
                groups.push((root, BTreeSet::new(), Vec::new()));
                groups.len() - 1
            }
        };
        groups[slot]
            .1
            .extend(r.coeffs.iter().map(|(w, _)| *w).filter(|&w| elim[w]));
        groups[slot].2.push(r);
    }

    let Some(base) = tidy(base) else {
        return finish(sys, &elim, vec![infeasible_row()]);
    };
    let mut result = base.clone();
    for (_, group, grows) in groups {
        result.extend(project_group(grows, group, &base, nvars, opts));
    }
    let Some(mut result) = tidy(result) else {
        return finish(sys, &elim, vec![infeasible_row()]);
    };
    if opts.prune {
        result = prune(result, &[], nvars);
    }
    finish(sys, &elim, result)
}

fn finish(sys: &LinSys, elim: &[bool], rows: Vec<Row>) -> Result<LinSys> {
    let kept: Vec<usize> = (0..sys.num_vars()).filter(|&v| !elim[v]).collect();
    let mut remap = vec![usize::MAX; sys.num_vars()];
    for (k, &v) in kept.iter().enumerate() {
        remap[v] = k;
    }
    let mut out = LinSys::with_vars(kept.iter().map(|&v| sys.var_name(v).to_string()))?;
    let mut fresh = 0;
    for r in rows {
        if r.coeffs.iter().any(|(w, _)| elim[*w]) {
            return Err(Error::Internal("eliminated variable survived projection".into()));
        }
        let tag = if r.tag.is_empty() || out.has_tag(&r.tag) {
            fresh += 1;
            format!("fm{fresh}")
        } else {
            r.tag.clone()
        };
        out.add_row(tag, r.kind, r.coeffs.iter().map(|(w, a)| (remap[*w], a.clone())), r.rhs)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{includes, Inclusion};
    use crate::rat::rat;
    use proptest::prelude::*;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    #[test]
    fn interval_projection() {
        // {0 <= u <= x, x <= 1} projects to {0 <= x <= 1}.
        let mut s = LinSys::with_vars(["x", "u"]).unwrap();
        s.add_le("a", [(1, r(1)), (0, r(-1))], r(0)).unwrap();
        s.add_ge("b", [(1, r(1))], r(0)).unwrap();
        s.add_le("c", [(0, r(1))], r(1)).unwrap();
        let p = fourier_motzkin(&s, &["u"], FmOptions::default()).unwrap();
        assert_eq!(p.vars(), &["x".to_string()]);
        for k in -4..=8 {
            let x = rat(k, 4);
            let inside = x >= r(0) && x <= r(1);
            assert_eq!(p.contains(&[x]), inside);
        }
    }

    #[test]
    fn equality_substitution() {
        // u = x + y, 0 <= u <= 1
        let mut s = LinSys::with_vars(["x", "y", "u"]).unwrap();
        s.add_eq("e", [(2, r(1)), (0, r(-1)), (1, r(-1))], r(0)).unwrap();
        s.add_ge("lo", [(2, r(1))], r(0)).unwrap();
        s.add_le("hi", [(2, r(1))], r(1)).unwrap();
        let p = fourier_motzkin(&s, &["u"], FmOptions::default()).unwrap();
        assert!(p.contains(&[rat(1, 2), rat(1, 2)]));
        assert!(!p.contains(&[rat(1, 2), rat(2, 3)]));
        assert!(!p.contains(&[rat(-1, 2), rat(1, 3)]));
    }

    #[test]
    fn identity_projection_is_equivalent() {
        let mut s = LinSys::with_vars(["x", "y"]).unwrap();
        s.add_le("a", [(0, r(1)), (1, r(1))], r(1)).unwrap();
        s.add_ge("b", [(0, r(1))], r(0)).unwrap();
        s.add_ge("c", [(1, r(1))], r(0)).unwrap();
        s.add_le("d", [(0, r(1))], r(3)).unwrap();
        let p = fourier_motzkin(&s, &[], FmOptions::default()).unwrap();
        let on = ["x".to_string(), "y".to_string()];
        assert!(matches!(includes(&s, &p, &on).unwrap(), Inclusion::Included { .. }));
        assert!(matches!(includes(&p, &s, &on).unwrap(), Inclusion::Included { .. }));
        assert!(p.num_rows() < s.num_rows());
    }

    /// Feasibility of the lifted system at fixed projected coordinates.
    fn lifts(s: &LinSys, fixed: &[(usize, Rat)]) -> bool {
        let mut t = s.clone();
        for (k, (v, val)) in fixed.iter().enumerate() {
            t.add_eq(format!("fix{k}"), [(*v, r(1))], val.clone()).unwrap();
        }
        Simplex::new(&t).is_feasible()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn sound_against_lifted_lp(
            rows in proptest::collection::vec(
                (-3i64..4, -3i64..4, -3i64..4, -3i64..4, 0i64..6), 3..8),
            prune in any::<bool>(),
            pts in proptest::collection::vec((-8i64..9, -8i64..9), 12),
        ) {
            let mut s = LinSys::with_vars(["x", "y", "u", "w"]).unwrap();
            for (k, &(a, b, c, d, e)) in rows.iter().enumerate() {
                s.add_le(format!("r{k}"), [(0, r(a)), (1, r(b)), (2, r(c)), (3, r(d))], r(e)).unwrap();
            }
            for v in 0..4 {
                s.add_le(format!("box{v}"), [(v, r(1))], r(4)).unwrap();
                s.add_ge(format!("neg{v}"), [(v, r(1))], r(-4)).unwrap();
            }
            let p = fourier_motzkin(&s, &["u", "w"], FmOptions { prune }).unwrap();
            for (a, b) in pts {
                let (x, y) = (rat(a, 2), rat(b, 2));
                prop_assert_eq!(
                    p.contains(&[x.clone(), y.clone()]),
                    lifts(&s, &[(0, x), (1, y)])
                );
            }
        }
    }
}
