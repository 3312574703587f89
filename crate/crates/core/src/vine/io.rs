//! Versioned JSON model documents.

use serde::{Deserialize, Serialize};

use super::model::{Margins, PairFit, VineModel};
use super::structure::{Edge, VineStructure};
use crate::bicop::{Family, FittedPairCopula, PairCopulaSpec, Rotation};
use crate::error::{Error, Result};
use crate::marginals::{EmpiricalCdf, GldParams, JohnsonParams, JohnsonVariant, MarginalModel};

/// Current model document version.
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    version: u32,
    labels: Vec<String>,
    n_obs: usize,
    trees: Vec<TreeDoc>,
    margins: MarginsDoc,
}

#[derive(Serialize, Deserialize)]
struct TreeDoc {
    level: usize,
    edges: Vec<EdgeDoc>,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    i: usize,
    j: usize,
    #[serde(rename = "D")]
    d: Vec<usize>,
    family: String,
    rotation: u32,
    params: Vec<f64>,
    tau: f64,
    ltd: f64,
    utd: f64,
    loglik: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum MarginsDoc {
    #[serde(rename = "pseudo-observations")]
    Pseudo,
    #[serde(rename = "fitted")]
    Fitted { models: Vec<MarginDoc> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum MarginDoc {
    Gld { params: [f64; 4] },
    Johnson { variant: String, params: [f64; 4] },
    Empirical { sample: Vec<f64> },
}

/// Model document as pretty-printed JSON. Floats are written in shortest
/// round-trip form, so parameters survive a round trip bit for bit.
pub fn serialize(model: &VineModel) -> String {
    let trees = model
        .structure
        .trees()
        .iter()
        .zip(&model.pairs)
        .enumerate()
        .map(|(t, (edges, pairs))| TreeDoc {
            level: t + 1,
            edges: edges
                .iter()
                .zip(pairs)
                .map(|(e, p)| {
                    let spec = &p.copula.spec;
                    EdgeDoc {
                        i: e.i,
                        j: e.j,
                        d: e.d.clone(),
                        family: spec.family().name().to_string(),
                        rotation: spec.rotation().degrees(),
                        params: spec.params().to_vec(),
                        tau: p.tau,
                        ltd: p.copula.lambda_lower,
                        utd: p.copula.lambda_upper,
                        loglik: p.copula.loglik,
                    }
                })
                .collect(),
        })
        .collect();
    let margins = match &model.margins {
        Margins::PseudoObservations => MarginsDoc::Pseudo,
        Margins::Fitted(models) => MarginsDoc::Fitted {
            models: models
                .iter()
                .map(|m| match m {
                    MarginalModel::Gld(p) => MarginDoc::Gld { params: p.to_array() },
                    MarginalModel::Johnson(p) => MarginDoc::Johnson {
                        variant: p.variant.as_str().to_string(),
                        params: [p.gamma, p.eta, p.epsilon, p.lambda],
                    },
                    MarginalModel::Empirical(e) => MarginDoc::Empirical { sample: e.sample().to_vec() },
                })
                .collect(),
        },
    };
    let doc = ModelDoc {
        version: MODEL_VERSION,
        labels: model.labels().to_vec(),
        n_obs: model.n_obs,
        trees,
        margins,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("model documents always serialize");
    s.push('\n');
    s
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedDocument(msg.into())
}

/// Parse a model document, validating its version, structure and parameters.
pub fn deserialize(document: &str) -> Result<VineModel> {
    let value: serde_json::Value = serde_json::from_str(document).map_err(|e| malformed(e.to_string()))?;
    let version = value
        .get("version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| malformed("missing version"))?;
    if version != u64::from(MODEL_VERSION) {
        return Err(Error::SchemaVersion {
            found: u32::try_from(version).unwrap_or(u32::MAX),
            expected: MODEL_VERSION,
        });
    }
    let doc: ModelDoc = serde_json::from_value(value).map_err(|e| malformed(e.to_string()))?;
    let d = doc.labels.len();
    if d < 2 {
        return Err(malformed("a model needs at least two variables"));
    }
    if doc.trees.len() != d - 1 {
        return Err(malformed(format!("expected {} trees, found {}", d - 1, doc.trees.len())));
    }
    let mut trees = Vec::with_capacity(d - 1);
    let mut pairs = Vec::with_capacity(d - 1);
    for (t, tree) in doc.trees.into_iter().enumerate() {
        if tree.level != t + 1 {
            return Err(malformed(format!("tree level {} found where {} was expected", tree.level, t + 1)));
        }
        let mut edges = Vec::with_capacity(tree.edges.len());
        for e in tree.edges {
            let family = Family::parse(&e.family)
                .ok_or_else(|| malformed(format!("unknown family {:?}", e.family)))?;
            let rotation = Rotation::from_degrees(e.rotation)
                .ok_or_else(|| malformed(format!("invalid rotation {}", e.rotation)))?;
            let spec = PairCopulaSpec::new(family, rotation, e.params).map_err(|err| malformed(err.to_string()))?;
            let edge = Edge::new(e.i, e.j, e.d);
            edges.push((edge, PairFit { copula: FittedPairCopula::from_spec(spec, e.loglik, doc.n_obs), tau: e.tau }));
        }
        // the structure sorts edges by label; keep the fits aligned with it
        edges.sort_by(|a, b| a.0.cmp(&b.0));
        let (es, ps): (Vec<Edge>, Vec<PairFit>) = edges.into_iter().unzip();
        trees.push(es);
        pairs.push(ps);
    }
    let structure = VineStructure::new(doc.labels, trees).map_err(|e| malformed(e.to_string()))?;
    let margins = match doc.margins {
        MarginsDoc::Pseudo => Margins::PseudoObservations,
        MarginsDoc::Fitted { models } => {
            if models.len() != d {
                return Err(malformed(format!("{} margins for {d} variables", models.len())));
            }
            let models = models
                .into_iter()
                .map(|m| -> Result<MarginalModel> {
                    Ok(match m {
                        MarginDoc::Gld { params: [a, b, c, e] } => MarginalModel::Gld(GldParams::new(a, b, c, e)?),
                        MarginDoc::Johnson { variant, params: [g, h, e, l] } => {
                            let v = JohnsonVariant::parse(&variant)
                                .ok_or_else(|| malformed(format!("unknown Johnson variant {variant:?}")))?;
                            MarginalModel::Johnson(JohnsonParams::new(v, g, h, e, l)?)
                        }
                        MarginDoc::Empirical { sample } => MarginalModel::Empirical(EmpiricalCdf::new(&sample)?),
                    })
                })
                .collect::<Result<Vec<_>>>()
                .map_err(|e| match e {
                    Error::MalformedDocument(_) => e,
                    other => malformed(other.to_string()),
                })?;
            Margins::Fitted(models)
        }
    };
    Ok(VineModel { structure, pairs, margins, n_obs: doc.n_obs, warnings: Vec::new() })
}
