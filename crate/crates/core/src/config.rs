//! JSON configuration: a Satake datum, named iweights, an optional quiver orientation, the
//! series truncation order and the sign convention for `Q^ı`.
//!
//! ```json
//! {"nodes": ["1", "2"], "cartan": [[2, -1], [-1, 2]], "d": [1, 1],
//!  "tau": {"1": "2", "2": "1"}, "varsigma": {"1": 1, "2": 0},
//!  "orientation": {"1->2": 1},
//!  "weights": {"L0": {"lam": {"1": 0}, "parity": {}}},
//!  "order": 20, "sign_convention": "body"}
//! ```

use std::collections::BTreeMap;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::klr::{default_orientation, geometric_qtable, Orientation, QTable, SignConvention};
use crate::satake::{IWeight, Node, SatakeDatum, Severity};

/// Default truncation order for series output.
pub const DEFAULT_ORDER: i64 = 20;

/// A validated configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub datum: SatakeDatum,
    pub weights: BTreeMap<String, IWeight>,
    pub orientation: Orientation,
    pub order: i64,
    pub sign_convention: SignConvention,
}

impl Config {
    /// The geometric `Q^ı` table for the configured orientation and sign convention.
    pub fn qtable(&self) -> Result<QTable> {
        geometric_qtable(&self.datum, &self.orientation, self.sign_convention)
    }

    /// Looks up a named weight.
    pub fn weight(&self, name: &str) -> Result<&IWeight> {
        self.weights.get(name).ok_or_else(|| cfg_err(format!("weights.{name}"), "no weight with this name".into()))
    }
}

fn cfg_err(path: impl Into<String>, message: String) -> Error {
    Error::Config { path: path.into(), message }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| cfg_err(path, "expected an object".into()))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| cfg_err(path, "expected an array".into()))
}

fn as_int(v: &Value, path: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| cfg_err(path, "expected an integer".into()))
}

fn required<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| cfg_err(key, "missing field".into()))
}

/// Path of the field that a violated datum constraint refers to.
fn constraint_path(constraint: &str) -> &'static str {
    match constraint {
        "names" | "nonempty" => "nodes",
        "symmetrizer" => "d",
        "tau" | "tau-cartan" | "tau-involution" | "tau-symmetrizer" => "tau",
        "recap" | "varsigma-sign" | "varsigma-fixed" | "varsigma-zero" => "varsigma",
        "dimensions" => "$",
        _ => "cartan",
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<Config> {
    let root: Value = serde_json::from_str(text).map_err(|e| cfg_err("$", e.to_string()))?;
    let obj = as_object(&root, "$")?;
    const KEYS: [&str; 9] =
        ["nodes", "cartan", "d", "tau", "varsigma", "orientation", "weights", "order", "sign_convention"];
    if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(cfg_err(k.clone(), "unknown field".into()));
    }

    let mut names = Vec::new();
    for (k, v) in as_array(required(obj, "nodes")?, "nodes")?.iter().enumerate() {
        let name = v.as_str().ok_or_else(|| cfg_err(format!("nodes[{k}]"), "expected a string".into()))?;
        if name.is_empty() || name.contains(char::is_whitespace) || name.contains(['^', '(', ')', ';']) {
            return Err(cfg_err(format!("nodes[{k}]"), format!("invalid node name {name:?}")));
        }
        names.push(name.to_string());
    }
    let node = |name: &str, path: &str| -> Result<Node> {
        names.iter().position(|n| n == name).ok_or_else(|| cfg_err(path, format!("unknown node {name:?}")))
    };

    let mut cartan = Vec::new();
    for (r, row) in as_array(required(obj, "cartan")?, "cartan")?.iter().enumerate() {
        let path = format!("cartan[{r}]");
        let mut out = Vec::new();
        for (c, v) in as_array(row, &path)?.iter().enumerate() {
            out.push(as_int(v, &format!("cartan[{r}][{c}]"))?);
        }
        cartan.push(out);
    }
    let mut d = Vec::new();
    for (k, v) in as_array(required(obj, "d")?, "d")?.iter().enumerate() {
        d.push(as_int(v, &format!("d[{k}]"))?);
    }

    let mut tau = vec![None; names.len()];
    for (k, v) in as_object(required(obj, "tau")?, "tau")? {
        let path = format!("tau.{k}");
        let i = node(k, &path)?;
        let t = v.as_str().ok_or_else(|| cfg_err(&path, "expected a node name".into()))?;
        tau[i] = Some(node(t, &path)?);
    }
    let tau: Vec<Node> = tau
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.ok_or_else(|| cfg_err(format!("tau.{}", names[i]), "missing entry".into())))
        .collect::<Result<_>>()?;

    let mut varsigma = vec![None; names.len()];
    for (k, v) in as_object(required(obj, "varsigma")?, "varsigma")? {
        let path = format!("varsigma.{k}");
        varsigma[node(k, &path)?] = Some(as_int(v, &path)?);
    }
    let varsigma: Vec<i64> = varsigma
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| cfg_err(format!("varsigma.{}", names[i]), "missing entry".into())))
        .collect::<Result<_>>()?;

    let datum = SatakeDatum::new_unchecked(names.clone(), cartan, d, tau, varsigma);
    if let Some(diag) = datum.validate().into_iter().find(|g| g.severity == Severity::Error) {
        return Err(cfg_err(constraint_path(&diag.constraint), format!("{}: {}", diag.constraint, diag.message)));
    }

    let orientation = match obj.get("orientation") {
        None => default_orientation(&datum),
        Some(v) => {
            let mut o = Orientation::new();
            for (k, c) in as_object(v, "orientation")? {
                let path = format!("orientation.{k}");
                let (a, b) =
                    k.split_once("->").ok_or_else(|| cfg_err(&path, "expected a key of the form \"i->j\"".into()))?;
                let (a, b) = (node(a.trim(), &path)?, node(b.trim(), &path)?);
                let c = as_int(c, &path)?;
                if c < 0 {
                    return Err(cfg_err(path, "edge counts must be nonnegative".into()));
                }
                o.insert((a, b), c as u32);
            }
            o
        }
    };

    let mut weights = BTreeMap::new();
    if let Some(v) = obj.get("weights") {
        for (wname, w) in as_object(v, "weights")? {
            let base = format!("weights.{wname}");
            let wobj = as_object(w, &base)?;
            if let Some(k) = wobj.keys().find(|k| *k != "lam" && *k != "parity") {
                return Err(cfg_err(format!("{base}.{k}"), "unknown field".into()));
            }
            let mut lam: Vec<Option<i64>> = vec![None; datum.rank()];
            if let Some(l) = wobj.get("lam") {
                for (k, v) in as_object(l, &format!("{base}.lam"))? {
                    let path = format!("{base}.lam.{k}");
                    let i = node(k, &path)?;
                    let x = as_int(v, &path)?;
                    if datum.is_fixed(i) && x != 0 {
                        return Err(cfg_err(path, format!("lambda_{k} must be 0 at a tau-fixed node")));
                    }
                    lam[i] = Some(x);
                }
            }
            let mut pairs = Vec::new();
            for i in datum.nodes() {
                let t = datum.tau(i);
                match (lam[i], lam[t]) {
                    (Some(a), Some(b)) if t != i && a != -b => {
                        return Err(cfg_err(
                            format!("{base}.lam.{}", datum.name(t)),
                            format!("lambda_{} must equal -lambda_{}", datum.name(t), datum.name(i)),
                        ));
                    }
                    (Some(a), _) => pairs.push((i, a)),
                    _ => {}
                }
            }
            let mut par = Vec::new();
            let pobj = match wobj.get("parity") {
                Some(p) => Some(as_object(p, &format!("{base}.parity"))?),
                None => None,
            };
            if let Some(p) = pobj {
                for (k, v) in p {
                    let path = format!("{base}.parity.{k}");
                    let i = node(k, &path)?;
                    if !datum.is_fixed(i) {
                        return Err(cfg_err(path, format!("node {k} is not tau-fixed")));
                    }
                    let x = as_int(v, &path)?;
                    if x != 0 && x != 1 {
                        return Err(cfg_err(path, "parity must be 0 or 1".into()));
                    }
                    par.push((i, x as u8));
                }
            }
            for i in datum.nodes().filter(|&i| datum.is_fixed(i)) {
                if !par.iter().any(|&(j, _)| j == i) {
                    return Err(cfg_err(
                        format!("{base}.parity.{}", datum.name(i)),
                        format!("missing parity for tau-fixed node {}", datum.name(i)),
                    ));
                }
            }
            let w = datum.weight(&pairs, &par).map_err(|e| cfg_err(&base, e.to_string()))?;
            weights.insert(wname.clone(), w);
        }
    }

    let order = match obj.get("order") {
        None => DEFAULT_ORDER,
        Some(v) => {
            let n = as_int(v, "order")?;
            if n < 0 {
                return Err(cfg_err("order", "must be nonnegative".into()));
            }
            n
        }
    };
    let sign_convention = match obj.get("sign_convention") {
        None => SignConvention::Body,
        Some(v) => match v.as_str() {
            Some("body") => SignConvention::Body,
            Some("intro") => SignConvention::Intro,
            _ => return Err(cfg_err("sign_convention", "expected \"body\" or \"intro\"".into())),
        },
    };
    Ok(Config { datum, weights, orientation, order, sign_convention })
}

/// The configurations shipped with the crate, by file stem.
pub fn shipped_configs() -> Vec<(&'static str, &'static str)> {
    vec![
        ("split_a1", include_str!("../configs/split_a1.json")),
        ("diagonal_a1a1", include_str!("../configs/diagonal_a1a1.json")),
        ("quasi_split_a2", include_str!("../configs/quasi_split_a2.json")),
        ("quasi_split_a3", include_str!("../configs/quasi_split_a3.json")),
        ("split_a2", include_str!("../configs/split_a2.json")),
        ("split_a1a1", include_str!("../configs/split_a1a1.json")),
        ("split_affine_a1", include_str!("../configs/split_affine_a1.json")),
    ]
}

/// A shipped configuration by file stem.
pub fn shipped_config(stem: &str) -> Result<Config> {
    let (_, text) = shipped_configs()
        .into_iter()
        .find(|(s, _)| *s == stem)
        .ok_or_else(|| cfg_err("$", format!("no shipped config named {stem}")))?;
    parse_config(text)
}
