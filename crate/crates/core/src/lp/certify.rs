//! Redundancy and inclusion decided by exact LPs, with checkable certificates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fm::{fourier_motzkin, FmOptions};
use super::simplex::{Certificate, LpResult, LpStatus, Sense, Simplex};
use super::{LinSys, RowKind};
use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Redundancy {
    /// The row is implied: `multipliers` (one per system row, zero on the row itself)
    /// combine the other rows into `a·z <= bound` with `bound <= rhs`.
    Redundant { multipliers: Vec<Rat>, bound: Rat },
    /// A point satisfying every other row and violating this one.
    NonRedundant { point: Vec<Rat> },
}

impl Redundancy {
    pub fn is_redundant(&self) -> bool {
        matches!(self, Redundancy::Redundant { .. })
    }
}

/// Point of `res` pushed along its ray until `coeffs·z` exceeds `target`.
fn escape(res: &LpResult, coeffs: &[(usize, Rat)], target: &Rat) -> Vec<Rat> {
    let p = res.point.clone().expect("unbounded results carry a point");
    let Certificate::Ray(ray) = &res.certificate else {
        return p;
    };
    let dot = |z: &[Rat]| -> Rat { coeffs.iter().map(|(v, a)| a * &z[*v]).sum() };
    let (lp, lr) = (dot(&p), dot(ray));
    let t = if lp > *target {
        Rat::zero()
    } else {
        (target - &lp) / &lr + Rat::one()
    };
    p.iter().zip(ray).map(|(a, b)| a + &(&t * b)).collect()
}

fn redundancy_of(sys: &LinSys, idx: usize) -> Result<Redundancy> {
    let row = &sys.rows()[idx];
    let others: Vec<_> = sys
        .rows()
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != idx)
        .map(|(_, r)| r.clone())
        .collect();
    let mut sx = Simplex::from_rows(sys.num_vars(), others);
    if !sx.is_feasible() {
        return Err(Error::Infeasible(format!("rows other than {} are infeasible", row.tag)));
    }
    let res = sx.optimize(&row.coeffs, Sense::Max)?;
    match res.status {
        LpStatus::Optimal => {
            let val = res.value.clone().unwrap();
            if val <= row.rhs {
                let Certificate::Dual(y) = res.certificate else {
                    return Err(Error::Internal("optimal LP without duals".into()));
                };
                let mut multipliers = y;
                multipliers.insert(idx, Rat::zero());
                Ok(Redundancy::Redundant {
                    multipliers,
                    bound: val,
                })
            } else {
                Ok(Redundancy::NonRedundant {
                    point: res.point.unwrap(),
                })
            }
        }
        LpStatus::Unbounded => Ok(Redundancy::NonRedundant {
            point: escape(&res, &row.coeffs, &row.rhs),
        }),
        LpStatus::Infeasible => unreachable!("feasibility checked above"),
    }
}

/// Decides whether the inequality tagged `tag` can be dropped without enlarging the
/// feasible set of `sys`.
pub fn is_redundant(sys: &LinSys, tag: &str) -> Result<Redundancy> {
    let idx = sys
        .row_index(tag)
        .ok_or_else(|| Error::arg(format!("unknown row tag {tag}")))?;
    if sys.rows()[idx].kind != RowKind::Le {
        return Err(Error::arg(format!("row {tag} is an equality")));
    }
    if !Simplex::new(sys).is_feasible() {
        return Err(Error::Infeasible("redundancy is undefined on an empty system".into()));
    }
    redundancy_of(sys, idx)
}

/// Minimum of `coeffs·z` over `sys`; `None` when unbounded below.
pub fn min_row_lhs(sys: &LinSys, coeffs: &[(usize, Rat)]) -> Result<Option<Rat>> {
    let res = Simplex::new(sys).optimize(coeffs, Sense::Min)?;
    match res.status {
        LpStatus::Optimal => Ok(res.value),
        LpStatus::Unbounded => Ok(None),
        LpStatus::Infeasible => Err(Error::Infeasible("empty system".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowWitness {
    pub tag: String,
    /// Maximum (or, for the lower side of an equality, minimum) of the row's left side.
    pub extreme: Option<Rat>,
    pub rhs: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inclusion {
    /// Every row of the containing system is valid; `rows` records each row's
    /// extreme value over the contained system.
    Included { rows: Vec<RowWitness> },
    /// `point` (over the shared variables) lies in the first system and violates `row`.
    NotIncluded {
        row: RowWitness,
        point: BTreeMap<String, Rat>,
    },
}

impl Inclusion {
    pub fn holds(&self) -> bool {
        matches!(self, Inclusion::Included { .. })
    }
}

/// Decides `proj(a) ⊆ proj(b)` on `on_vars`. Variables of `b` outside `on_vars` are
/// projected out of `b` first; variables of `a` outside `on_vars` stay free in the LPs.
pub fn includes(a: &LinSys, b: &LinSys, on_vars: &[String]) -> Result<Inclusion> {
    for v in on_vars {
        a.require_var(v)?;
        b.require_var(v)?;
    }
    let extra: Vec<&str> = b
        .vars()
        .iter()
        .filter(|v| !on_vars.contains(v))
        .map(String::as_str)
        .collect();
    let projected;
    let b = if extra.is_empty() {
        b
    } else {
        projected = fourier_motzkin(b, &extra, FmOptions::default())?;
        &projected
    };
    let map: Vec<usize> = b.vars().iter().map(|name| a.require_var(name)).collect::<Result<_>>()?;

    let mut sx = Simplex::new(a);
    if !sx.is_feasible() {
        return Err(Error::Infeasible("contained system is empty".into()));
    }
    let shared = |p: &[Rat]| -> BTreeMap<String, Rat> {
        on_vars
            .iter()
            .map(|v| (v.clone(), p[a.var_id(v).unwrap()].clone()))
            .collect()
    };
    let mut rows = Vec::new();
    for row in b.rows() {
        let obj: Vec<(usize, Rat)> = row.coeffs.iter().map(|(v, c)| (map[*v], c.clone())).collect();
        let senses: &[Sense] = match row.kind {
            RowKind::Le => &[Sense::Max],
            RowKind::Eq => &[Sense::Max, Sense::Min],
        };
        for &sense in senses {
            let res = sx.optimize(&obj, sense)?;
            let bad_point = match res.status {
                LpStatus::Unbounded => {
                    let target = match sense {
                        Sense::Max => row.rhs.clone(),
                        Sense::Min => -&row.rhs,
                    };
                    let oriented: Vec<(usize, Rat)> = match sense {
                        Sense::Max => obj.clone(),
                        Sense::Min => obj.iter().map(|(v, c)| (*v, -c)).collect(),
                    };
                    Some(escape(&res, &oriented, &target))
                }
                LpStatus::Optimal => {
                    let val = res.value.as_ref().unwrap();
                    let violated = match sense {
                        Sense::Max => *val > row.rhs,
                        Sense::Min => *val < row.rhs,
                    };
                    violated.then(|| res.point.clone().unwrap())
                }
                LpStatus::Infeasible => unreachable!("feasibility checked above"),
            };
            let witness = RowWitness {
                tag: row.tag.clone(),
                extreme: res.value.clone(),
                rhs: row.rhs.clone(),
            };
            if let Some(p) = bad_point {
                return Ok(Inclusion::NotIncluded {
                    row: witness,
                    point: shared(&p),
                });
            }
            rows.push(witness);
        }
    }
    Ok(Inclusion::Included { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    #[test]
    fn dominated_bound_redundant() {
        let mut s = LinSys::with_vars(["x"]).unwrap();
        s.add_le("x<=1", [(0, r(1))], r(1)).unwrap();
        s.add_le("x<=2", [(0, r(1))], r(2)).unwrap();
        let red = is_redundant(&s, "x<=2").unwrap();
        let Redundancy::Redundant { multipliers, bound } = red else {
            panic!()
        };
        assert_eq!(bound, r(1));
        assert_eq!(multipliers, vec![r(1), r(0)]);
        match is_redundant(&s, "x<=1").unwrap() {
            Redundancy::NonRedundant { point } => {
                assert!(point[0] > r(1) && point[0] <= r(2));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn unbounded_side_gives_violating_point() {
        let mut s = LinSys::with_vars(["x", "y"]).unwrap();
        s.add_le("a", [(0, r(1))], r(3)).unwrap();
        s.add_le("b", [(0, r(1)), (1, r(1))], r(1)).unwrap();
        match is_redundant(&s, "b").unwrap() {
            Redundancy::NonRedundant { point } => {
                assert!(&point[0] + &point[1] > r(1));
                assert!(point[0] <= r(3));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn errors() {
        let mut s = LinSys::with_vars(["x"]).unwrap();
        s.add_eq("e", [(0, r(1))], r(1)).unwrap();
        s.add_le("a", [(0, r(1))], r(0)).unwrap();
        assert!(is_redundant(&s, "e").is_err());
        assert!(matches!(is_redundant(&s, "a"), Err(Error::Infeasible(_))));
        assert!(is_redundant(&s, "zzz").is_err());
    }

    #[test]
    fn inclusion_with_witness() {
        let mut a = LinSys::with_vars(["x", "y"]).unwrap();
        a.add_ge("x0", [(0, r(1))], r(0)).unwrap();
        a.add_ge("y0", [(1, r(1))], r(0)).unwrap();
        a.add_le("s", [(0, r(1)), (1, r(1))], r(1)).unwrap();
        let mut b = LinSys::with_vars(["y", "x"]).unwrap();
        b.add_le("xb", [(1, r(1))], rat(1, 2)).unwrap();
        let on = ["x".to_string(), "y".to_string()];
        assert!(includes(&a, &a, &on).unwrap().holds());
        match includes(&a, &b, &on).unwrap() {
            Inclusion::NotIncluded { point, row } => {
                assert_eq!(row.tag, "xb");
                assert!(point["x"] > rat(1, 2));
            }
            _ => panic!(),
        }
        let mut c = LinSys::with_vars(["x", "y", "t"]).unwrap();
        // t >= x, t >= y, t <= 1/2 : projection is the box [.., 1/2]^2
        c.add_le("tx", [(0, r(1)), (2, r(-1))], r(0)).unwrap();
        c.add_le("ty", [(1, r(1)), (2, r(-1))], r(0)).unwrap();
        c.add_le("t", [(2, r(1))], rat(1, 2)).unwrap();
        assert!(includes(&c, &b, &on).unwrap().holds());
        assert!(!includes(&b, &c, &on).unwrap().holds());
    }
}
