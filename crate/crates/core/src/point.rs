//! Points in arc space.

use std::collections::BTreeMap;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::formulations::build_ap;
use crate::graph::{cover_arcs, tour_arcs, Arc, ArcSpace};
use crate::rat::Rat;

/// A vector `x ∈ R^A`, stored densely in arc-index order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct XPoint {
    space: ArcSpace,
    vals: Vec<Rat>,
}

impl XPoint {
    pub fn zeros(space: &ArcSpace) -> Self {
        XPoint {
            space: *space,
            vals: vec![Rat::zero(); space.num_arcs()],
        }
    }

    pub fn uniform(space: &ArcSpace, v: Rat) -> Self {
        XPoint {
            space: *space,
            vals: vec![v; space.num_arcs()],
        }
    }

    pub fn from_fn(space: &ArcSpace, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        XPoint {
            space: *space,
            vals: space.arcs().map(|(i, j)| f(i, j)).collect(),
        }
    }

    pub fn from_values(space: &ArcSpace, vals: Vec<Rat>) -> Result<Self> {
        if vals.len() != space.num_arcs() {
            return Err(Error::arg(format!(
                "expected {} arc values, got {}",
                space.num_arcs(),
                vals.len()
            )));
        }
        Ok(XPoint { space: *space, vals })
    }

    /// Indicator of a set of arcs.
    pub fn indicator(space: &ArcSpace, arcs: impl IntoIterator<Item = Arc>) -> Self {
        let mut p = Self::zeros(space);
        for (i, j) in arcs {
            p.set(i, j, Rat::one());
        }
        p
    }

    /// Indicator of the tour visiting `order` cyclically.
    pub fn tour(space: &ArcSpace, order: &[usize]) -> Self {
        Self::indicator(space, tour_arcs(order))
    }

    /// Indicator of a cycle cover given by successor array (index 0 unused).
    pub fn cover(space: &ArcSpace, succ: &[usize]) -> Self {
        Self::indicator(space, cover_arcs(succ))
    }

    pub fn space(&self) -> &ArcSpace {
        &self.space
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.vals[self.space.arc_index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        let k = self.space.arc_index(i, j);
        self.vals[k] = v;
    }

    pub fn values(&self) -> &[Rat] {
        &self.vals
    }

    pub fn iter(&self) -> impl Iterator<Item = (Arc, &Rat)> + '_ {
        self.space.arcs().zip(self.vals.iter())
    }

    pub fn sum_over(&self, arcs: impl IntoIterator<Item = Arc>) -> Rat {
        arcs.into_iter().map(|(i, j)| self.get(i, j)).sum()
    }

    pub fn is_integral(&self) -> bool {
        self.vals.iter().all(Rat::is_integer)
    }

    /// Tag of the first violated assignment row, if any.
    pub fn ap_violation(&self) -> Option<String> {
        build_ap(&self.space).first_violation(&self.vals).map(|r| r.tag.clone())
    }

    pub fn require_ap(&self) -> Result<()> {
        match self.ap_violation() {
            Some(tag) => Err(Error::Domain(format!("x violates assignment row {tag}"))),
            None => Ok(()),
        }
    }

    /// `{"i,j": "p/q"}` over the nonzero entries.
    pub fn to_json(&self) -> Value {
        let map: Map<String, Value> = self
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((i, j), v)| (format!("{i},{j}"), Value::String(v.to_string())))
            .collect();
        Value::Object(map)
    }

    /// Reads `{"i,j": "p/q" | number}`; absent arcs are zero.
    pub fn from_json(v: &Value, space: &ArcSpace) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::arg("x file must be a JSON object"))?;
        let mut p = Self::zeros(space);
        for (key, val) in obj {
            let (i, j) = parse_arc_key(key)?;
            if !space.is_arc((i, j)) {
                return Err(Error::arg(format!("{key} is not an arc for n = {}", space.n())));
            }
            p.set(i, j, json_rat(val)?);
        }
        Ok(p)
    }

    /// Named values `x[i,j]` for use with [`crate::lp::LinSys::point_from_names`].
    pub fn named(&self) -> BTreeMap<String, Rat> {
        self.iter()
            .map(|((i, j), v)| (crate::formulations::x_name(i, j), v.clone()))
            .collect()
    }
}

pub(crate) fn parse_arc_key(key: &str) -> Result<Arc> {
    let bad = || Error::arg(format!("bad arc key {key:?}, expected \"i,j\""));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let i = a.trim().parse().map_err(|_| bad())?;
    let j = b.trim().parse().map_err(|_| bad())?;
    Ok((i, j))
}

pub(crate) fn json_rat(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => s.parse().map_err(|e| Error::arg(format!("bad rational {s:?}: {e}"))),
        Value::Number(n) => n
            .as_i64()
            .map(Rat::from_int)
            .ok_or_else(|| Error::arg(format!("non-integer number {n}; write it as \"p/q\""))),
        _ => Err(Error::arg(format!("expected a rational, got {v}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn json_round_trip_and_ap() {
        let sp = ArcSpace::new(4).unwrap();
        let t = XPoint::tour(&sp, &[1, 2, 3, 4]);
        assert!(t.ap_violation().is_none());
        let back = XPoint::from_json(&t.to_json(), &sp).unwrap();
        assert_eq!(back, t);
        let u = XPoint::uniform(&sp, rat(1, 3));
        assert!(u.ap_violation().is_none());
        let z = XPoint::zeros(&sp);
        assert_eq!(z.ap_violation().as_deref(), Some("AP-out(1)"));
    }

    #[test]
    fn rejects_bad_keys() {
        let sp = ArcSpace::new(4).unwrap();
        let v: Value = serde_json::json!({"2,2": "1"});
        assert!(XPoint::from_json(&v, &sp).is_err());
        let v: Value = serde_json::json!({"2-3": "1"});
        assert!(XPoint::from_json(&v, &sp).is_err());
        let v: Value = serde_json::json!({"2,3": 0.5});
        assert!(XPoint::from_json(&v, &sp).is_err());
    }
}
