//! Conditional uniforms `u_{v|D}` by memoized recursion over the h-functions
//! of already fitted trees.

use std::collections::HashMap;
use std::rc::Rc;

use super::structure::Edge;
use crate::bicop::{CondOn, PairCopulaSpec};
use crate::error::{Error, Result};
use crate::numeric::clamp_unit;

pub(crate) struct Propagator {
    /// Per tree: union of each edge -> (edge, copula).
    levels: Vec<HashMap<Vec<usize>, (Edge, PairCopulaSpec)>>,
    base: Vec<Rc<Vec<f64>>>,
    cache: HashMap<(usize, Vec<usize>), Rc<Vec<f64>>>,
}

impl Propagator {
    pub(crate) fn new(base: Vec<Vec<f64>>) -> Self {
        Self { levels: Vec::new(), base: base.into_iter().map(Rc::new).collect(), cache: HashMap::new() }
    }

    pub(crate) fn push_level(&mut self, edges: impl IntoIterator<Item = (Edge, PairCopulaSpec)>) {
        self.levels.push(edges.into_iter().map(|(e, c)| (e.union(), (e, c))).collect());
    }

    pub(crate) fn set_base(&mut self, var: usize, column: Vec<f64>) {
        self.base[var] = Rc::new(column);
    }

    /// `u_{v|D}` for every observation; `d` must be sorted.
    pub(crate) fn cond(&mut self, v: usize, d: &[usize]) -> Result<Rc<Vec<f64>>> {
        if d.is_empty() {
            return Ok(self.base[v].clone());
        }
        if let Some(c) = self.cache.get(&(v, d.to_vec())) {
            return Ok(c.clone());
        }
        let level = d.len();
        let mut key = d.to_vec();
        key.push(v);
        key.sort_unstable();
        let (edge, spec) = self
            .levels
            .get(level - 1)
            .and_then(|m| m.get(&key))
            .cloned()
            .ok_or(Error::MissingAncestor { level: level + 1 })?;
        let (a, b) = (self.cond(edge.i, &edge.d)?, self.cond(edge.j, &edge.d)?);
        let out: Vec<f64> = if v == edge.i {
            a.iter().zip(b.iter()).map(|(&x, &y)| clamp_unit(spec.hfunc(CondOn::Second, y, x))).collect()
        } else if v == edge.j {
            a.iter().zip(b.iter()).map(|(&x, &y)| clamp_unit(spec.hfunc(CondOn::First, x, y))).collect()
        } else {
            return Err(Error::Structure(format!("variable {} is not conditioned in edge {edge}", v + 1)));
        };
        let out = Rc::new(out);
        self.cache.insert((v, d.to_vec()), out.clone());
        Ok(out)
    }

    /// Copula inputs `(u_{i|D}, u_{j|D})` of an edge.
    pub(crate) fn inputs(&mut self, edge: &Edge) -> Result<(Rc<Vec<f64>>, Rc<Vec<f64>>)> {
        Ok((self.cond(edge.i, &edge.d)?, self.cond(edge.j, &edge.d)?))
    }
}
