//! JSON descriptions of operators, expressions and experiment configs.
//!
//! Errors carry a JSONPath-like location such as
//! `$.operators.F.diagonals[1].left[0]`.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::asymptotics::{GridSpec, NRange, QuantityKind};
use crate::error::{FsaError, Result};
use crate::expression::FSExpression;
use crate::operator::{BandOperator, Exponent, OperatorDomain};
use crate::scalar::C64;
use crate::sequence::EventuallyPeriodicSequence;
use crate::spectral::pseudo::{GridBox, Resolution};

fn err(path: &str, message: impl Into<String>) -> FsaError {
    FsaError::Format { path: path.to_string(), message: message.into() }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| err(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    m.get(key).ok_or_else(|| err(path, format!("missing key '{key}'")))
}

fn only_keys(m: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    match m.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(err(&format!("{path}.{k}"), "unknown key")),
        None => Ok(()),
    }
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| err(path, "expected a finite number"))
}

fn positive(v: &Value, path: &str) -> Result<f64> {
    let x = number(v, path)?;
    if x <= 0.0 {
        return Err(err(path, "expected a positive number"));
    }
    Ok(x)
}

fn integer(v: &Value, path: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| err(path, "expected an integer"))
}

fn unsigned(v: &Value, path: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| err(path, "expected a nonnegative integer"))
}

/// A number or an `[re, im]` pair.
pub fn parse_scalar(v: &Value, path: &str) -> Result<C64> {
    if let Some(pair) = v.as_array() {
        if pair.len() != 2 {
            return Err(err(path, "complex entries are [re, im] pairs"));
        }
        return Ok(C64::new(number(&pair[0], &format!("{path}[0]"))?, number(&pair[1], &format!("{path}[1]"))?));
    }
    Ok(C64::new(number(v, path)?, 0.0))
}

fn scalars(v: &Value, path: &str) -> Result<Vec<C64>> {
    array(v, path)?.iter().enumerate().map(|(k, x)| parse_scalar(x, &format!("{path}[{k}]"))).collect()
}

fn scalar_to_json(z: C64) -> Value {
    if z.im == 0.0 {
        json!(z.re)
    } else {
        json!([z.re, z.im])
    }
}

fn scalars_to_json(zs: &[C64]) -> Value {
    Value::Array(zs.iter().map(|&z| scalar_to_json(z)).collect())
}

/// `"Z"`, `{"geq": a}` or `{"leq": b}`.
pub fn parse_domain(v: &Value, path: &str) -> Result<OperatorDomain> {
    if v.as_str() == Some("Z") {
        return Ok(OperatorDomain::FullLine);
    }
    let m = v.as_object().ok_or_else(|| err(path, "expected \"Z\", {\"geq\": a} or {\"leq\": b}"))?;
    only_keys(m, &["geq", "leq"], path)?;
    match (m.get("geq"), m.get("leq")) {
        (Some(a), None) => Ok(OperatorDomain::HalfLinePlus(integer(a, &format!("{path}.geq"))?)),
        (None, Some(b)) => Ok(OperatorDomain::HalfLineMinus(integer(b, &format!("{path}.leq"))?)),
        _ => Err(err(path, "expected exactly one of 'geq' and 'leq'")),
    }
}

pub fn domain_to_json(d: OperatorDomain) -> Value {
    match d {
        OperatorDomain::FullLine => json!("Z"),
        OperatorDomain::HalfLinePlus(a) => json!({ "geq": a }),
        OperatorDomain::HalfLineMinus(b) => json!({ "leq": b }),
    }
}

/// `1`, `2` or `"inf"`.
pub fn parse_exponent(v: &Value, path: &str) -> Result<Exponent> {
    match (v.as_u64(), v.as_str()) {
        (Some(1), _) => Ok(Exponent::One),
        (Some(2), _) => Ok(Exponent::Two),
        (_, Some("inf")) => Ok(Exponent::Inf),
        _ => Err(err(path, "expected 1, 2 or \"inf\"")),
    }
}

pub fn exponent_to_json(p: Exponent) -> Value {
    match p {
        Exponent::One => json!(1),
        Exponent::Two => json!(2),
        Exponent::Inf => json!("inf"),
    }
}

/// `{"left": [..], "center": [..], "center_start": s, "right": [..]}`; the
/// left pattern repeats to the left of `center_start`, the right pattern
/// starts right after the center.
pub fn parse_sequence(m: &Map<String, Value>, path: &str) -> Result<EventuallyPeriodicSequence> {
    let left = scalars(field(m, "left", path)?, &format!("{path}.left"))?;
    let right = scalars(field(m, "right", path)?, &format!("{path}.right"))?;
    let center = match m.get("center") {
        Some(c) => scalars(c, &format!("{path}.center"))?,
        None => Vec::new(),
    };
    let center_start = match m.get("center_start") {
        Some(s) => integer(s, &format!("{path}.center_start"))?,
        None => 0,
    };
    EventuallyPeriodicSequence::new(left, center, center_start, right).map_err(|e| err(path, e.to_string()))
}

pub fn parse_operator(v: &Value, path: &str) -> Result<BandOperator> {
    let m = object(v, path)?;
    only_keys(m, &["domain", "p", "diagonals"], path)?;
    let domain = match m.get("domain") {
        Some(d) => parse_domain(d, &format!("{path}.domain"))?,
        None => OperatorDomain::FullLine,
    };
    let p = match m.get("p") {
        Some(p) => parse_exponent(p, &format!("{path}.p"))?,
        None => Exponent::Two,
    };
    let dpath = format!("{path}.diagonals");
    let mut diagonals = Vec::new();
    for (k, d) in array(field(m, "diagonals", path)?, &dpath)?.iter().enumerate() {
        let here = format!("{dpath}[{k}]");
        let dm = object(d, &here)?;
        only_keys(dm, &["offset", "left", "center", "center_start", "right"], &here)?;
        let offset = integer(field(dm, "offset", &here)?, &format!("{here}.offset"))?;
        diagonals.push((offset, parse_sequence(dm, &here)?));
    }
    Ok(BandOperator::new(diagonals, domain, p))
}

pub fn operator_to_json(op: &BandOperator) -> Value {
    let diagonals: Vec<Value> = op
        .diagonals()
        .iter()
        .map(|(k, s)| {
            json!({
                "offset": k,
                "left": scalars_to_json(s.left_pattern()),
                "center": scalars_to_json(s.center()),
                "center_start": s.center_start(),
                "right": scalars_to_json(s.right_pattern()),
            })
        })
        .collect();
    json!({
        "domain": domain_to_json(op.domain()),
        "p": exponent_to_json(op.exponent()),
        "diagonals": diagonals,
    })
}

/// `{"leaf": name}`, `{"sum": [..]}`, `{"product": [..]}` or
/// `{"scale": α, "child": ..}`, with leaves looked up in `ops`.
pub fn parse_expression(v: &Value, ops: &BTreeMap<String, BandOperator>, path: &str) -> Result<FSExpression> {
    let m = object(v, path)?;
    let list = |key: &str| -> Result<Vec<FSExpression>> {
        let here = format!("{path}.{key}");
        let items = array(&m[key], &here)?;
        if items.is_empty() {
            return Err(err(&here, "must not be empty"));
        }
        items.iter().enumerate().map(|(k, c)| parse_expression(c, ops, &format!("{here}[{k}]"))).collect()
    };
    if let Some(name) = m.get("leaf") {
        only_keys(m, &["leaf"], path)?;
        let name = name.as_str().ok_or_else(|| err(&format!("{path}.leaf"), "expected a name"))?;
        let op = ops.get(name).ok_or_else(|| err(&format!("{path}.leaf"), format!("unknown operator '{name}'")))?;
        return Ok(FSExpression::leaf(name, op.clone()));
    }
    if m.contains_key("sum") {
        only_keys(m, &["sum"], path)?;
        return Ok(FSExpression::Sum(list("sum")?));
    }
    if m.contains_key("product") {
        only_keys(m, &["product"], path)?;
        return Ok(FSExpression::Product(list("product")?));
    }
    if let Some(alpha) = m.get("scale") {
        only_keys(m, &["scale", "child"], path)?;
        let alpha = parse_scalar(alpha, &format!("{path}.scale"))?;
        let child = parse_expression(field(m, "child", path)?, ops, &format!("{path}.child"))?;
        return Ok(FSExpression::scale(alpha, child));
    }
    Err(err(path, "expected one of 'leaf', 'sum', 'product', 'scale'"))
}

/// The tree with leaves by name, and the table of the named operators.
pub fn expression_to_json(expr: &FSExpression) -> (Value, Value) {
    fn tree(e: &FSExpression) -> Value {
        match e {
            FSExpression::Leaf { name, .. } => json!({ "leaf": name }),
            FSExpression::Sum(c) => json!({ "sum": c.iter().map(tree).collect::<Vec<_>>() }),
            FSExpression::Product(c) => json!({ "product": c.iter().map(tree).collect::<Vec<_>>() }),
            FSExpression::Scale(a, c) => json!({ "scale": scalar_to_json(*a), "child": tree(c) }),
        }
    }
    let table: Map<String, Value> =
        expr.leaves().into_iter().map(|(name, op)| (name.to_string(), operator_to_json(op))).collect();
    (tree(expr), Value::Object(table))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoConfig {
    pub epsilons: Vec<f64>,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PollutionConfig {
    pub lambdas: Vec<C64>,
    pub epsilon: f64,
    pub window: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub operators: BTreeMap<String, BandOperator>,
    pub expression: FSExpression,
    pub n_range: NRange,
    pub tol: f64,
    pub m_max: usize,
    pub pseudo: Option<PseudoConfig>,
    /// Quantities for convergence verdicts; pseudospectra are added per ε
    /// when a grid is configured.
    pub quantities: Vec<QuantityKind>,
    pub pollution: Option<PollutionConfig>,
    /// The JSON this config was read from, with overrides applied.
    pub source: Value,
}

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_M_MAX: usize = 200;

fn parse_quantity(v: &Value, path: &str) -> Result<QuantityKind> {
    match v.as_str() {
        Some("norm") => Ok(QuantityKind::Norm),
        Some("inv_norm") => Ok(QuantityKind::InvNorm),
        Some("kappa") => Ok(QuantityKind::Kappa),
        _ => Err(err(path, "expected \"norm\", \"inv_norm\" or \"kappa\"")),
    }
}

fn parse_grid(m: &Map<String, Value>, path: &str) -> Result<GridSpec> {
    let bpath = format!("{path}.box");
    let b = object(field(m, "box", path)?, &bpath)?;
    only_keys(b, &["re_min", "re_max", "im_min", "im_max"], &bpath)?;
    let get = |k: &str| number(field(b, k, &bpath)?, &format!("{bpath}.{k}"));
    let bbox = GridBox::new(get("re_min")?, get("re_max")?, get("im_min")?, get("im_max")?)
        .map_err(|e| err(&bpath, e.to_string()))?;
    let rpath = format!("{path}.resolution");
    let r = object(field(m, "resolution", path)?, &rpath)?;
    only_keys(r, &["nx", "ny"], &rpath)?;
    let resolution = Resolution {
        nx: unsigned(field(r, "nx", &rpath)?, &format!("{rpath}.nx"))? as usize,
        ny: unsigned(field(r, "ny", &rpath)?, &format!("{rpath}.ny"))? as usize,
    };
    let flat = bbox.im_min == bbox.im_max;
    if resolution.nx < 2 || (flat && resolution.ny != 1) || (!flat && resolution.ny < 2) {
        return Err(err(&rpath, "need nx >= 2, and ny >= 2 (or ny = 1 on a real segment)"));
    }
    let window = unsigned(field(m, "window", path)?, &format!("{path}.window"))? as usize;
    if window == 0 {
        return Err(err(&format!("{path}.window"), "must be positive"));
    }
    Ok(GridSpec { bbox, resolution, window })
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| err("$", format!("invalid JSON: {e}")))?;
        Self::from_value(&v)
    }

    /// Reads a config, or the `inputs` embedded in a report.
    pub fn from_value(v: &Value) -> Result<Self> {
        if let Some(inputs) = v.get("inputs") {
            return Self::from_value(inputs);
        }
        let m = object(v, "$")?;
        only_keys(
            m,
            &["name", "operators", "expression", "n_range", "tol", "m_max", "pseudo", "converge", "pollution"],
            "$",
        )?;
        let name = match m.get("name") {
            Some(n) => n.as_str().ok_or_else(|| err("$.name", "expected a string"))?.to_string(),
            None => String::from("experiment"),
        };
        let mut operators = BTreeMap::new();
        for (k, op) in object(field(m, "operators", "$")?, "$.operators")? {
            operators.insert(k.clone(), parse_operator(op, &format!("$.operators.{k}"))?);
        }
        let expression = parse_expression(field(m, "expression", "$")?, &operators, "$.expression")?;
        expression.validate().map_err(|e| err("$.expression", e.to_string()))?;

        let r = object(field(m, "n_range", "$")?, "$.n_range")?;
        only_keys(r, &["start", "end"], "$.n_range")?;
        let n_range = NRange {
            start: unsigned(field(r, "start", "$.n_range")?, "$.n_range.start")?,
            end: unsigned(field(r, "end", "$.n_range")?, "$.n_range.end")?,
        };
        n_range.validate().map_err(|e| err("$.n_range", e.to_string()))?;

        let tol = match m.get("tol") {
            Some(t) => positive(t, "$.tol")?,
            None => DEFAULT_TOL,
        };
        let m_max = match m.get("m_max") {
            Some(t) => unsigned(t, "$.m_max")? as usize,
            None => DEFAULT_M_MAX,
        };
        if m_max == 0 {
            return Err(err("$.m_max", "must be positive"));
        }

        let pseudo = match m.get("pseudo") {
            None => None,
            Some(p) => {
                let pm = object(p, "$.pseudo")?;
                only_keys(pm, &["epsilons", "box", "resolution", "window"], "$.pseudo")?;
                let epsilons = array(field(pm, "epsilons", "$.pseudo")?, "$.pseudo.epsilons")?
                    .iter()
                    .enumerate()
                    .map(|(k, e)| positive(e, &format!("$.pseudo.epsilons[{k}]")))
                    .collect::<Result<Vec<_>>>()?;
                if epsilons.is_empty() {
                    return Err(err("$.pseudo.epsilons", "must not be empty"));
                }
                Some(PseudoConfig { epsilons, grid: parse_grid(pm, "$.pseudo")? })
            }
        };

        let quantities = match m.get("converge") {
            None => vec![QuantityKind::Norm, QuantityKind::InvNorm, QuantityKind::Kappa],
            Some(c) => {
                let cm = object(c, "$.converge")?;
                only_keys(cm, &["quantities"], "$.converge")?;
                array(field(cm, "quantities", "$.converge")?, "$.converge.quantities")?
                    .iter()
                    .enumerate()
                    .map(|(k, q)| parse_quantity(q, &format!("$.converge.quantities[{k}]")))
                    .collect::<Result<Vec<_>>>()?
            }
        };

        let pollution = match m.get("pollution") {
            None => None,
            Some(p) => {
                let pm = object(p, "$.pollution")?;
                only_keys(pm, &["lambdas", "epsilon", "window"], "$.pollution")?;
                Some(PollutionConfig {
                    lambdas: scalars(field(pm, "lambdas", "$.pollution")?, "$.pollution.lambdas")?,
                    epsilon: positive(field(pm, "epsilon", "$.pollution")?, "$.pollution.epsilon")?,
                    window: unsigned(field(pm, "window", "$.pollution")?, "$.pollution.window")? as usize,
                })
            }
        };

        Ok(Self {
            name,
            operators,
            expression,
            n_range,
            tol,
            m_max,
            pseudo,
            quantities,
            pollution,
            source: v.clone(),
        })
    }

    /// Replaces `n_range.end` and `tol`, keeping `source` in step.
    pub fn with_overrides(mut self, n_max: Option<u64>, tol: Option<f64>) -> Result<Self> {
        if let Some(n) = n_max {
            let r = NRange { start: self.n_range.start, end: n };
            r.validate().map_err(|e| err("--n-max", e.to_string()))?;
            self.n_range = r;
            self.source["n_range"]["end"] = json!(n);
        }
        if let Some(t) = tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(err("--tol", "expected a positive number"));
            }
            self.tol = t;
            self.source["tol"] = json!(t);
        }
        Ok(self)
    }

    /// Every scheduled verdict quantity, pseudospectra included.
    pub fn verdict_quantities(&self) -> Vec<QuantityKind> {
        let mut q = self.quantities.clone();
        if let Some(p) = &self.pseudo {
            q.extend(p.epsilons.iter().map(|&epsilon| QuantityKind::PseudoSet { epsilon }));
        }
        q
    }
}
