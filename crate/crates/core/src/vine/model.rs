use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::propagate::Propagator;
use super::structure::{
    allowed_edges, complete_graph, max_spanning_tree, Edge, VineStructure,
};
use crate::bicop::{
    default_candidates, select_family, CondOn, Criterion, Family, FittedPairCopula, PairCopulaSpec,
    Rotation,
};
use crate::dependence::kendall_tau;
use crate::error::{Error, Result};
use crate::marginals::MarginalModel;
use crate::numeric::clamp_unit;

/// Smallest sample accepted by [`fit_vine`].
pub const MIN_VINE_OBS: usize = 30;

/// Marginal part of a vine model.
#[derive(Debug, Clone, PartialEq)]
pub enum Margins {
    /// The copula was fitted to rank-based pseudo-observations; no
    /// data-space density is available.
    PseudoObservations,
    Fitted(Vec<MarginalModel>),
}

/// Fitted copula of one edge with the Kendall's tau of its training inputs
/// (sample tau in tree 1, partial tau deeper).
#[derive(Debug, Clone, PartialEq)]
pub struct PairFit {
    pub copula: FittedPairCopula,
    pub tau: f64,
}

/// A vine copula model: structure, one pair-copula per edge and the margins.
#[derive(Debug, Clone, PartialEq)]
pub struct VineModel {
    pub structure: VineStructure,
    /// Aligned with `structure.trees()`.
    pub pairs: Vec<Vec<PairFit>>,
    pub margins: Margins,
    pub n_obs: usize,
    /// Per-edge fit failures replaced by the independence copula.
    pub warnings: Vec<String>,
}

/// Options of [`fit_vine`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub candidates: Vec<(Family, Rotation)>,
    pub criterion: Criterion,
    /// Trees deeper than this level get the independence copula.
    pub trunc_level: Option<usize>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { candidates: default_candidates(), criterion: Criterion::Aic, trunc_level: None }
    }
}

/// Model-level log-likelihood with information criteria over the copula
/// parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLik {
    pub loglik: f64,
    pub n_params: usize,
    pub n_obs: usize,
    pub aic: f64,
    pub bic: f64,
}

impl LogLik {
    pub fn new(loglik: f64, n_params: usize, n_obs: usize) -> Self {
        let k = n_params as f64;
        Self {
            loglik,
            n_params,
            n_obs,
            aic: 2.0 * k - 2.0 * loglik,
            bic: k * (n_obs as f64).ln() - 2.0 * loglik,
        }
    }
}

/// Values at which the variables outside a density slice are held.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum FixPolicy {
    #[default]
    Median,
    /// One data-space value per variable; entries of the sliced pair are ignored.
    Values(Vec<f64>),
}

impl VineModel {
    /// A model with given copulas, e.g. as a simulation generator. Edge taus
    /// are set to the copulas' own Kendall's tau.
    pub fn from_specs(
        structure: VineStructure,
        copulas: Vec<Vec<PairCopulaSpec>>,
        margins: Margins,
    ) -> Result<Self> {
        let shape_ok = copulas.len() == structure.trees().len()
            && copulas.iter().zip(structure.trees()).all(|(c, t)| c.len() == t.len());
        if !shape_ok {
            return Err(Error::Structure("one copula per edge is required".into()));
        }
        if let Margins::Fitted(m) = &margins {
            if m.len() != structure.dim() {
                return Err(Error::LengthMismatch { left: m.len(), right: structure.dim() });
            }
        }
        let pairs = copulas
            .into_iter()
            .map(|tree| {
                tree.into_iter()
                    .map(|spec| {
                        let tau = spec.tau();
                        PairFit { copula: FittedPairCopula::from_spec(spec, 0.0, 0), tau }
                    })
                    .collect()
            })
            .collect();
        Ok(Self { structure, pairs, margins, n_obs: 0, warnings: Vec::new() })
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    pub fn labels(&self) -> &[String] {
        self.structure.labels()
    }

    /// Total number of copula parameters.
    pub fn n_params(&self) -> usize {
        self.pairs.iter().flatten().map(|p| p.copula.spec.n_params()).sum()
    }

    /// `(edge, pair)` in tree order.
    pub fn edges(&self) -> impl Iterator<Item = (&Edge, &PairFit)> {
        self.structure.trees().iter().flatten().zip(self.pairs.iter().flatten())
    }

    pub fn variable_index(&self, name: &str) -> Result<usize> {
        self.labels()
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    fn propagator(&self, base: Vec<Vec<f64>>) -> Propagator {
        let mut prop = Propagator::new(base);
        for (tree, pairs) in self.structure.trees().iter().zip(&self.pairs) {
            prop.push_level(tree.iter().cloned().zip(pairs.iter().map(|p| p.copula.spec.clone())));
        }
        prop
    }

    fn marginal_models(&self) -> Result<&[MarginalModel]> {
        match &self.margins {
            Margins::Fitted(m) => Ok(m),
            Margins::PseudoObservations => Err(Error::MarginsAbsent),
        }
    }
}

fn check_columns(columns: &[Vec<f64>], d: usize) -> Result<usize> {
    if columns.len() != d {
        return Err(Error::LengthMismatch { left: columns.len(), right: d });
    }
    let n = columns.first().map_or(0, Vec::len);
    if let Some(bad) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch { left: bad.len(), right: n });
    }
    Ok(n)
}

/// Algorithm 1: tree by tree, weight the allowed edges by the absolute
/// empirical Kendall's tau of their conditional inputs, keep the maximum
/// spanning tree, select a pair-copula per edge and propagate the
/// h-function outputs to the next level.
pub fn fit_vine(uniforms: &[Vec<f64>], labels: &[String], options: &FitOptions) -> Result<VineModel> {
    let d = uniforms.len();
    if d < 2 {
        return Err(Error::InvalidParameter("a vine needs at least two columns".into()));
    }
    if labels.len() != d {
        return Err(Error::LengthMismatch { left: labels.len(), right: d });
    }
    let n = check_columns(uniforms, d)?;
    if n < MIN_VINE_OBS {
        return Err(Error::InvalidParameter(format!(
            "vine fitting needs at least {MIN_VINE_OBS} observations, got {n}"
        )));
    }
    if uniforms.iter().flatten().any(|&u| !(u > 0.0 && u < 1.0)) {
        return Err(Error::InvalidParameter("uniforms must lie strictly inside (0, 1)".into()));
    }
    if options.candidates.is_empty() {
        return Err(Error::InvalidParameter("empty candidate set".into()));
    }

    let mut prop = Propagator::new(uniforms.to_vec());
    let mut trees: Vec<Vec<Edge>> = Vec::with_capacity(d - 1);
    let mut pairs: Vec<Vec<PairFit>> = Vec::with_capacity(d - 1);
    let mut warnings = Vec::new();
    for level in 1..d {
        let mut candidates = if level == 1 {
            complete_graph(d)
        } else {
            allowed_edges(&trees[level - 2])
        };
        for c in candidates.iter_mut() {
            let (a, b) = prop.inputs(&c.edge)?;
            let tau = kendall_tau(&a, &b)?;
            c.weight = if tau.is_finite() { tau } else { 0.0 };
        }
        let mut tree = max_spanning_tree(d - level + 1, &candidates)?;
        tree.sort_by(|x, y| x.edge.cmp(&y.edge));

        let truncated = options.trunc_level.is_some_and(|t| level > t);
        let mut level_pairs = Vec::with_capacity(tree.len());
        for c in &tree {
            let fitted = if truncated {
                FittedPairCopula::from_spec(PairCopulaSpec::independence(), 0.0, n)
            } else {
                let (a, b) = prop.inputs(&c.edge)?;
                match select_family(&a, &b, &options.candidates, options.criterion) {
                    Ok(f) => f,
                    Err(e) => {
                        let msg = format!("edge {}: {e}; using the independence copula", c.edge);
                        log::warn!("{msg}");
                        warnings.push(msg);
                        FittedPairCopula::from_spec(PairCopulaSpec::independence(), 0.0, n)
                    }
                }
            };
            log::debug!("tree {level} edge {} -> {} (tau {:.4})", c.edge, fitted.spec.label(), c.weight);
            level_pairs.push(PairFit { copula: fitted, tau: c.weight });
        }
        let edges: Vec<Edge> = tree.into_iter().map(|c| c.edge).collect();
        prop.push_level(edges.iter().cloned().zip(level_pairs.iter().map(|p| p.copula.spec.clone())));
        trees.push(edges);
        pairs.push(level_pairs);
    }
    let structure = VineStructure::new(labels.to_vec(), trees)?;
    Ok(VineModel { structure, pairs, margins: Margins::PseudoObservations, n_obs: n, warnings })
}

/// Copula inputs `(u_{i|D}, u_{j|D})` of `edge` for every row of `uniforms`.
pub fn conditional_uniforms(
    model: &VineModel,
    edge: &Edge,
    uniforms: &[Vec<f64>],
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_columns(uniforms, model.dim())?;
    let mut prop = model.propagator(uniforms.to_vec());
    let (a, b) = prop.inputs(edge)?;
    Ok((a.to_vec(), b.to_vec()))
}

/// Copula log-density for every row of column-major uniforms.
pub fn vine_log_density_columns(model: &VineModel, uniforms: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = check_columns(uniforms, model.dim())?;
    let mut prop = model.propagator(uniforms.to_vec());
    let mut out = vec![0.0; n];
    for (edge, pair) in model.edges() {
        let spec = &pair.copula.spec;
        if spec.family() == Family::Independence {
            continue;
        }
        let (a, b) = prop.inputs(edge)?;
        for (o, (&x, &y)) in out.iter_mut().zip(a.iter().zip(b.iter())) {
            *o += spec.log_pdf(x, y);
        }
    }
    Ok(out)
}

/// Copula log-density at one point of `(0, 1)^d`.
pub fn vine_log_density(model: &VineModel, u: &[f64]) -> Result<f64> {
    let cols: Vec<Vec<f64>> = u.iter().map(|&v| vec![clamp_unit(v)]).collect();
    Ok(vine_log_density_columns(model, &cols)?[0])
}

/// Joint log-density for every row of column-major data; `-inf` where a
/// coordinate lies outside its margin's support.
pub fn joint_log_density_columns(model: &VineModel, data: &[Vec<f64>]) -> Result<Vec<f64>> {
    let margins = model.marginal_models()?;
    let n = check_columns(data, model.dim())?;
    let mut log_f = vec![0.0; n];
    let mut u = Vec::with_capacity(data.len());
    for (col, m) in data.iter().zip(margins) {
        for (lf, &x) in log_f.iter_mut().zip(col) {
            let f = m.pdf(x);
            *lf += if f > 0.0 && f.is_finite() { f.ln() } else { f64::NEG_INFINITY };
        }
        u.push(col.iter().map(|&x| clamp_unit(m.cdf(x))).collect::<Vec<_>>());
    }
    let copula = vine_log_density_columns(model, &u)?;
    Ok(log_f
        .into_iter()
        .zip(copula)
        .map(|(lf, lc)| if lf == f64::NEG_INFINITY { lf } else { lf + lc })
        .collect())
}

/// Joint log-density at one data-space point.
pub fn joint_log_density(model: &VineModel, x: &[f64]) -> Result<f64> {
    let cols: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
    Ok(joint_log_density_columns(model, &cols)?[0])
}

/// Log-likelihood of column-major data: data space when margins are
/// present, uniforms otherwise.
pub fn loglik(model: &VineModel, data: &[Vec<f64>]) -> Result<LogLik> {
    let n = check_columns(data, model.dim())?;
    if n == 0 {
        return Err(Error::InvalidParameter("log-likelihood of an empty sample".into()));
    }
    let values = match model.margins {
        Margins::PseudoObservations => vine_log_density_columns(model, data)?,
        Margins::Fitted(_) => joint_log_density_columns(model, data)?,
    };
    Ok(LogLik::new(values.iter().sum(), model.n_params(), n))
}

/// Order in which variables are peeled off the vine: each step removes a
/// conditioned variable of the single top edge of the remaining sub-vine,
/// together with its chain of edges, one per tree, from the top down.
fn peeling_order(model: &VineModel) -> Result<(usize, Vec<(usize, Vec<(Edge, PairCopulaSpec)>)>)> {
    let index: Vec<HashMap<Vec<usize>, (Edge, PairCopulaSpec)>> = model
        .structure
        .trees()
        .iter()
        .zip(&model.pairs)
        .map(|(t, p)| {
            t.iter().zip(p).map(|(e, p)| (e.union(), (e.clone(), p.copula.spec.clone()))).collect()
        })
        .collect();
    let lookup = |u: &[usize]| {
        index[u.len() - 2]
            .get(u)
            .cloned()
            .ok_or_else(|| Error::Structure(format!("no edge with variables {u:?}")))
    };
    let mut remaining: Vec<usize> = (0..model.dim()).collect();
    let mut steps = Vec::new();
    while remaining.len() > 1 {
        let (top, _) = lookup(&remaining)?;
        let x = top.j;
        let mut chain = Vec::new();
        let mut union = remaining.clone();
        while union.len() >= 2 {
            let (edge, spec) = lookup(&union)?;
            if edge.i != x && edge.j != x {
                return Err(Error::Structure(format!("variable {} leaves edge chain at {edge}", x + 1)));
            }
            let partner = if edge.i == x { edge.j } else { edge.i };
            union.retain(|&v| v != partner);
            chain.push((edge, spec));
        }
        remaining.retain(|&v| v != x);
        steps.push((x, chain));
    }
    Ok((remaining[0], steps))
}

/// Inverse Rosenblatt sampling of `n` rows, returned column-major; data
/// space when margins are present, uniforms otherwise. Deterministic per seed.
pub fn simulate(model: &VineModel, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let d = model.dim();
    let (first, steps) = peeling_order(model)?;
    let mut sample_order = vec![first];
    sample_order.extend(steps.iter().rev().map(|(x, _)| *x));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = vec![vec![0.0; n]; d];
    for r in 0..n {
        for &v in &sample_order {
            w[v][r] = clamp_unit(rng.random::<f64>());
        }
    }

    let mut prop = model.propagator(vec![Vec::new(); d]);
    prop.set_base(first, w[first].clone());
    for (x, chain) in steps.iter().rev() {
        let mut p = w[*x].clone();
        for (edge, spec) in chain {
            let partner = if edge.i == *x { edge.j } else { edge.i };
            let cond_on = if edge.i == *x { CondOn::Second } else { CondOn::First };
            let given = prop.cond(partner, &edge.d)?;
            for (pk, &g) in p.iter_mut().zip(given.iter()) {
                *pk = clamp_unit(spec.hinv(cond_on, g, *pk));
            }
        }
        prop.set_base(*x, p);
    }
    let uniforms: Vec<Vec<f64>> = (0..d).map(|v| prop.cond(v, &[]).map(|c| c.to_vec())).collect::<Result<_>>()?;
    match &model.margins {
        Margins::PseudoObservations => Ok(uniforms),
        Margins::Fitted(m) => crate::marginals::inverse_pit(&uniforms, m),
    }
}

/// Joint density on the grid `xs` x `ys` for variables `var_i`, `var_j`
/// (labels), the rest held per `fix`. `out[a][b]` is the density at
/// `(xs[a], ys[b])`.
pub fn density_slice(
    model: &VineModel,
    var_i: &str,
    var_j: &str,
    xs: &[f64],
    ys: &[f64],
    fix: &FixPolicy,
) -> Result<Vec<Vec<f64>>> {
    let i = model.variable_index(var_i)?;
    let j = model.variable_index(var_j)?;
    if i == j {
        return Err(Error::UnknownVariable(format!("{var_j} (same as the first variable)")));
    }
    let margins = model.marginal_models()?;
    let fixed: Vec<f64> = match fix {
        FixPolicy::Median => margins.iter().map(MarginalModel::median).collect(),
        FixPolicy::Values(v) => {
            if v.len() != model.dim() {
                return Err(Error::LengthMismatch { left: v.len(), right: model.dim() });
            }
            v.clone()
        }
    };
    let m = xs.len() * ys.len();
    let mut cols: Vec<Vec<f64>> = fixed.iter().map(|&v| vec![v; m]).collect();
    for (a, &x) in xs.iter().enumerate() {
        for (b, &y) in ys.iter().enumerate() {
            cols[i][a * ys.len() + b] = x;
            cols[j][a * ys.len() + b] = y;
        }
    }
    let values = joint_log_density_columns(model, &cols)?;
    Ok(values.chunks(ys.len().max(1)).take(xs.len()).map(|r| r.iter().map(|v| v.exp()).collect()).collect())
}

/// One row of the edge report.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeReport {
    pub tree: usize,
    pub edge: String,
    pub family: Family,
    pub rotation: u32,
    pub par1: Option<f64>,
    /// Always empty: every family in scope has one parameter.
    pub par2: Option<f64>,
    pub tau: f64,
    pub ltd: f64,
    pub utd: f64,
}

/// Edge report rows ordered by tree, then edge label.
pub fn report(model: &VineModel) -> Vec<EdgeReport> {
    model
        .edges()
        .map(|(edge, pair)| {
            let spec = &pair.copula.spec;
            let (ltd, utd) = spec.tail_dependence();
            EdgeReport {
                tree: edge.level(),
                edge: edge.label(),
                family: spec.family(),
                rotation: spec.rotation().degrees(),
                par1: spec.params().first().copied(),
                par2: spec.params().get(1).copied(),
                tau: pair.tau,
                ltd,
                utd,
            }
        })
        .collect()
}

/// CSV with header `tree,edge,family,rotation,par1,par2,tau,ltd,utd`;
/// missing parameters are empty cells.
pub fn report_csv(rows: &[EdgeReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let opt = |v: Option<f64>| v.map(crate::fmt_f64).unwrap_or_default();
    w.write_record(["tree", "edge", "family", "rotation", "par1", "par2", "tau", "ltd", "utd"])
        .expect("in-memory write");
    for r in rows {
        w.write_record([
            r.tree.to_string(),
            r.edge.clone(),
            r.family.name().to_string(),
            r.rotation.to_string(),
            opt(r.par1),
            opt(r.par2),
            crate::fmt_f64(r.tau),
            crate::fmt_f64(r.ltd),
            crate::fmt_f64(r.utd),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// Indented per-tree listing of edges, families and (partial) taus.
pub fn tree_summary(model: &VineModel) -> String {
    let mut out = String::new();
    for (t, (tree, pairs)) in model.structure.trees().iter().zip(&model.pairs).enumerate() {
        let what = if t == 0 { "tau" } else { "partial tau" };
        out.push_str(&format!("Tree {}\n", t + 1));
        for (edge, pair) in tree.iter().zip(pairs) {
            out.push_str(&format!(
                "  {:<12} {:<16} {what} = {:.2}\n",
                edge.label(),
                pair.copula.spec.label(),
                pair.tau
            ));
        }
    }
    out
}
