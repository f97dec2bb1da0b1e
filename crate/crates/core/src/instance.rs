//! ATSP instances: cost vectors on the arcs of a complete digraph.
//!
//! The text format is line oriented:
//!
//! ```text
//! ATSP <name> <n>
//! * 3 7/2 1
//! 2 * 5 4
//! ...
//! ```
//!
//! with `n` rows of `n` entries, `*` on the diagonal.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ArcSpace;
use crate::point::XPoint;
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    pub space: ArcSpace,
    /// Costs indexed like [`ArcSpace::arc_index`].
    pub costs: Vec<Rat>,
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GenMode {
    Uniform,
    EuclideanAsym,
}

impl std::str::FromStr for GenMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(GenMode::Uniform),
            "euclidean-asym" => Ok(GenMode::EuclideanAsym),
            _ => Err(Error::arg(format!("unknown generator {s:?} (uniform, euclidean-asym)"))),
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::Domain(format!(
            "instances are defined on n >= 4 nodes, got n = {n}"
        )));
    }
    Ok(())
}

impl Instance {
    pub fn from_fn(name: &str, n: usize, mut c: impl FnMut(usize, usize) -> Rat) -> Result<Self> {
        check_n(n)?;
        let space = ArcSpace::new(n)?;
        Ok(Instance {
            name: name.to_string(),
            costs: space.arcs().map(|(i, j)| c(i, j)).collect(),
            space,
            seed: None,
        })
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn cost(&self, i: usize, j: usize) -> &Rat {
        &self.costs[self.space.arc_index(i, j)]
    }

    /// Objective as `(variable id, coefficient)` pairs over the `x` block.
    pub fn objective(&self) -> Vec<(usize, Rat)> {
        self.costs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c.clone()))
            .collect()
    }

    pub fn eval(&self, x: &XPoint) -> Rat {
        x.values().iter().zip(&self.costs).map(|(a, b)| a * b).sum()
    }

    pub fn tour_cost(&self, order: &[usize]) -> Rat {
        crate::graph::tour_arcs(order)
            .into_iter()
            .map(|(i, j)| self.cost(i, j))
            .sum()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, col: usize, msg: String| Error::Parse { line, col, msg };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l))
            .filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or_else(|| err(1, 1, "empty file".into()))?;
        let toks = tokens(header);
        let [(c0, kw), (_, name), (cn, n)] = toks.as_slice() else {
            return Err(err(hl, 1, "expected header `ATSP <name> <n>`".into()));
        };
        if *kw != "ATSP" {
            return Err(err(hl, *c0, format!("expected `ATSP`, found {kw:?}")));
        }
        let n: usize = n.parse().map_err(|_| err(hl, *cn, format!("bad node count {n:?}")))?;
        check_n(n)?;
        let space = ArcSpace::new(n)?;
        let mut costs = vec![Rat::zero(); space.num_arcs()];
        for i in 1..=n {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| err(hl + i, 1, format!("expected {n} cost rows, found {}", i - 1)))?;
            let toks = tokens(line);
            if toks.len() != n {
                return Err(err(ln, 1, format!("expected {n} entries, found {}", toks.len())));
            }
            for (j, (col, tok)) in (1..=n).zip(toks) {
                if i == j {
                    if tok != "*" {
                        return Err(err(ln, col, format!("diagonal entry must be `*`, found {tok:?}")));
                    }
                    continue;
                }
                let v: Rat = tok.parse().map_err(|_| err(ln, col, format!("bad cost {tok:?}")))?;
                costs[space.arc_index(i, j)] = v;
            }
        }
        if let Some((ln, _)) = lines.next() {
            return Err(err(ln, 1, "trailing content after cost rows".into()));
        }
        Ok(Instance {
            name: name.to_string(),
            space,
            costs,
            seed: None,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::arg(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Canonical text: single spaces, normalized rationals, trailing newline.
    pub fn to_text(&self) -> String {
        let n = self.n();
        let mut s = format!("ATSP {} {n}\n", self.name);
        for i in 1..=n {
            let row: Vec<String> = (1..=n)
                .map(|j| {
                    if i == j {
                        "*".to_string()
                    } else {
                        self.cost(i, j).to_string()
                    }
                })
                .collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::arg(format!("cannot write {}: {e}", path.display())))
    }

    /// Seeded instance; identical for identical `(n, seed, mode)`.
    pub fn generate(n: usize, seed: u64, mode: GenMode) -> Result<Self> {
        check_n(n)?;
        let space = ArcSpace::new(n)?;
        space.check_cap(crate::formulations::DEFAULT_BUILD_CAP, "instance generation")?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut costs: Vec<Rat> = match mode {
            GenMode::Uniform => space.arcs().map(|_| Rat::from_int(rng.gen_range(1..=100))).collect(),
            GenMode::EuclideanAsym => {
                let pts: Vec<(f64, f64)> = (0..=n)
                    .map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
                    .collect();
                space
                    .arcs()
                    .map(|(i, j)| {
                        let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
                        let base = dx.hypot(dy).round() as i64;
                        Rat::from_int(base.max(1) + rng.gen_range(0..=10))
                    })
                    .collect()
            }
        };
        if mode == GenMode::EuclideanAsym
            && space
                .arcs()
                .all(|(i, j)| costs[space.arc_index(i, j)] == costs[space.arc_index(j, i)])
        {
            costs[space.arc_index(1, 2)] += Rat::one();
        }
        let tag = match mode {
            GenMode::Uniform => "uniform",
            GenMode::EuclideanAsym => "euclid",
        };
        Ok(Instance {
            name: format!("{tag}-n{n}-s{seed}"),
            space,
            costs,
            seed: Some(seed),
        })
    }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(k),
            (true, Some(s)) => {
                out.push((line[..s].chars().count() + 1, &line[s..k]));
                start = None;
            }
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    const SAMPLE: &str = "ATSP tiny 4\n* 1 2 3\n4 * 7/2 6\n7 8 * 9\n1 2 3 *\n";

    #[test]
    fn parse_and_round_trip() {
        let inst = Instance::parse(SAMPLE).unwrap();
        assert_eq!(inst.n(), 4);
        assert_eq!(inst.costs.len(), 12);
        assert_eq!(*inst.cost(2, 3), rat(7, 2));
        assert_eq!(inst.to_text(), SAMPLE);
    }

    #[test]
    fn parse_errors() {
        let diag = SAMPLE.replace("* 1 2 3", "0 1 2 3");
        match Instance::parse(&diag) {
            Err(Error::Parse { line: 2, col: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        let bad = SAMPLE.replace("7/2", "7/x");
        match Instance::parse(&bad) {
            Err(Error::Parse { line: 3, col: 5, .. }) => {}
            other => panic!("{other:?}"),
        }
        let small = "ATSP t 3\n* 1 1\n1 * 1\n1 1 *\n";
        assert!(matches!(Instance::parse(small), Err(Error::Domain(_))));
    }

    #[test]
    fn generators() {
        let a = Instance::generate(5, 42, GenMode::Uniform).unwrap();
        assert_eq!(a, Instance::generate(5, 42, GenMode::Uniform).unwrap());
        assert!(a.costs.iter().all(|c| *c >= Rat::one() && *c <= Rat::from_int(100)));
        let e = Instance::generate(6, 3, GenMode::EuclideanAsym).unwrap();
        assert!(e.space.arcs().any(|(i, j)| e.cost(i, j) != e.cost(j, i)));
        assert!(matches!(
            Instance::generate(3, 1, GenMode::Uniform),
            Err(Error::Domain(_))
        ));
    }
}
