//! Structured-text (JSON) formats shared by every module: matrices, map
//! specifications, certificates and spectral scales. Matrix entries are
//! written in decimal scientific notation with 17 significant digits, which
//! round-trips f64 exactly.

use serde_json::Value;
use std::fmt::Write as _;

use crate::certify::{InequalityCertificate, TheoremId};
use crate::error::{Error, Result};
use crate::linalg::{c64, CMatrix, Tolerance};
use crate::posmaps::{MapKind, PositiveMapSpec};
use crate::spectral::{SpectralScale, TraceMode};

fn sci17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Matrix interchange document:
/// {"rows": n, "cols": m, "data": [[re, im], ...]} with data row-major.
pub fn matrix_to_json(m: &CMatrix) -> String {
    let mut s = String::new();
    write!(s, "{{\"rows\": {}, \"cols\": {}, \"data\": [", m.nrows(), m.ncols()).unwrap();
    let mut first = true;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if !first {
                s.push_str(", ");
            }
            first = false;
            let z = m[(i, j)];
            write!(s, "[{}, {}]", sci17(z.re), sci17(z.im)).unwrap();
        }
    }
    s.push_str("]}");
    s
}

fn parse_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| Error::Parse(format!("expected a number for {what}, got {v}")))
}

fn parse_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("expected a non-negative integer for {what}, got {v}")))
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| Error::Parse(format!("missing field \"{name}\"")))
}

/// Parse the matrix interchange document from a JSON value.
pub fn matrix_from_value(v: &Value) -> Result<CMatrix> {
    let rows = parse_usize(field(v, "rows")?, "rows")?;
    let cols = parse_usize(field(v, "cols")?, "cols")?;
    let data = field(v, "data")?
        .as_array()
        .ok_or_else(|| Error::Parse("\"data\" must be an array".into()))?;
    if data.len() != rows * cols {
        return Err(Error::Parse(format!(
            "data length {} does not match rows*cols = {}",
            data.len(),
            rows * cols
        )));
    }
    let mut m = CMatrix::zeros(rows, cols);
    for (k, entry) in data.iter().enumerate() {
        let pair = entry
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| Error::Parse(format!("data[{k}] must be a [re, im] pair")))?;
        let re = parse_f64(&pair[0], "re")?;
        let im = parse_f64(&pair[1], "im")?;
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::NonFinite);
        }
        m[(k / cols, k % cols)] = c64(re, im);
    }
    Ok(m)
}

/// Parse the matrix interchange document from text.
pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    matrix_from_value(&v)
}

/// Map serialization: a "variant" tag plus the variant's payload.
pub fn map_to_json(m: &PositiveMapSpec) -> String {
    match m.kind() {
        MapKind::Kraus { weights } => {
            let ws: Vec<String> = weights.iter().map(matrix_to_json).collect();
            format!("{{\"variant\": \"kraus\", \"weights\": [{}]}}", ws.join(", "))
        }
        MapKind::Schur { multiplier } => {
            format!("{{\"variant\": \"schur\", \"multiplier\": {}}}", matrix_to_json(multiplier))
        }
        MapKind::SchurRaw { multiplier } => {
            format!(
                "{{\"variant\": \"schur_raw\", \"multiplier\": {}}}",
                matrix_to_json(multiplier)
            )
        }
        MapKind::Pinching { blocks } => {
            let bs: Vec<String> = blocks
                .iter()
                .map(|b| {
                    let idx: Vec<String> = b.iter().map(|i| i.to_string()).collect();
                    format!("[{}]", idx.join(", "))
                })
                .collect();
            format!(
                "{{\"variant\": \"pinching\", \"dim\": {}, \"blocks\": [{}]}}",
                m.input_dim(),
                bs.join(", ")
            )
        }
        MapKind::LiftSum { inner } => {
            format!("{{\"variant\": \"lift_sum\", \"inner\": {}}}", map_to_json(inner))
        }
        MapKind::LiftCorner { inner } => {
            format!("{{\"variant\": \"lift_corner\", \"inner\": {}}}", map_to_json(inner))
        }
        MapKind::Compose { outer, inner } => {
            format!(
                "{{\"variant\": \"compose\", \"outer\": {}, \"inner\": {}}}",
                map_to_json(outer),
                map_to_json(inner)
            )
        }
    }
}

/// Parse a map specification; Schur multipliers are re-certified PSD here.
pub fn map_from_value(v: &Value) -> Result<PositiveMapSpec> {
    let variant = field(v, "variant")?
        .as_str()
        .ok_or_else(|| Error::Parse("\"variant\" must be a string".into()))?;
    match variant {
        "kraus" => {
            let ws = field(v, "weights")?
                .as_array()
                .ok_or_else(|| Error::Parse("\"weights\" must be an array".into()))?;
            let weights = ws.iter().map(matrix_from_value).collect::<Result<Vec<_>>>()?;
            PositiveMapSpec::kraus(weights)
        }
        "schur" => {
            let mult = matrix_from_value(field(v, "multiplier")?)?;
            PositiveMapSpec::schur(&mult, Tolerance::default())
        }
        "schur_raw" => {
            let mult = matrix_from_value(field(v, "multiplier")?)?;
            PositiveMapSpec::schur_multiplier_unchecked(mult)
        }
        "pinching" => {
            let dim = parse_usize(field(v, "dim")?, "dim")?;
            let bs = field(v, "blocks")?
                .as_array()
                .ok_or_else(|| Error::Parse("\"blocks\" must be an array".into()))?;
            let mut blocks = Vec::with_capacity(bs.len());
            for b in bs {
                let arr = b
                    .as_array()
                    .ok_or_else(|| Error::Parse("each block must be an index list".into()))?;
                blocks.push(
                    arr.iter().map(|i| parse_usize(i, "block index")).collect::<Result<Vec<_>>>()?,
                );
            }
            PositiveMapSpec::pinching(blocks, dim)
        }
        "lift_sum" => Ok(PositiveMapSpec::lift_sum(map_from_value(field(v, "inner")?)?)),
        "lift_corner" => Ok(PositiveMapSpec::lift_corner(map_from_value(field(v, "inner")?)?)),
        "compose" => PositiveMapSpec::compose(
            map_from_value(field(v, "outer")?)?,
            map_from_value(field(v, "inner")?)?,
        ),
        other => Err(Error::Parse(format!("unknown map variant \"{other}\""))),
    }
}

pub fn map_from_json(text: &str) -> Result<PositiveMapSpec> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    map_from_value(&v)
}

/// Certificate document: theorem tag, margin, acceptance, beta where
/// applicable, and the three embedded matrices in the shared format.
pub fn certificate_to_json(c: &InequalityCertificate) -> String {
    let beta = match c.beta {
        Some(b) => format!(", \"beta\": {}", sci17(b)),
        None => String::new(),
    };
    format!(
        "{{\"theorem_id\": \"{}\", \"margin\": {}, \"accepted\": {}{}, \"lhs\": {}, \"rhs\": {}, \"isometry\": {}}}",
        c.theorem_id.as_str(),
        sci17(c.margin),
        c.accepted,
        beta,
        matrix_to_json(&c.lhs),
        matrix_to_json(&c.rhs),
        matrix_to_json(&c.isometry),
    )
}

pub fn certificate_from_json(text: &str) -> Result<InequalityCertificate> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let tag = field(&v, "theorem_id")?
        .as_str()
        .ok_or_else(|| Error::Parse("\"theorem_id\" must be a string".into()))?;
    let theorem_id = TheoremId::from_str_tag(tag)
        .ok_or_else(|| Error::Parse(format!("unknown theorem id \"{tag}\"")))?;
    let margin = parse_f64(field(&v, "margin")?, "margin")?;
    let accepted = field(&v, "accepted")?
        .as_bool()
        .ok_or_else(|| Error::Parse("\"accepted\" must be a boolean".into()))?;
    let beta = match v.get("beta") {
        Some(b) => Some(parse_f64(b, "beta")?),
        None => None,
    };
    Ok(InequalityCertificate {
        theorem_id,
        lhs: matrix_from_value(field(&v, "lhs")?)?,
        rhs: matrix_from_value(field(&v, "rhs")?)?,
        isometry: matrix_from_value(field(&v, "isometry")?)?,
        margin,
        accepted,
        beta,
    })
}

/// Spectral-scale document: the trace-mode tag plus (left endpoint, value)
/// pairs, one per interval, starting at 0.
pub fn scale_to_json(s: &SpectralScale) -> String {
    let mode = match s.trace_mode() {
        TraceMode::Normalized => "normalized",
        TraceMode::Unnormalized => "unnormalized",
    };
    let mut pairs = Vec::with_capacity(s.values().len());
    for (k, v) in s.values().iter().enumerate() {
        let left = if k == 0 { 0.0 } else { s.breakpoints()[k - 1] };
        pairs.push(format!("[{}, {}]", sci17(left), sci17(*v)));
    }
    format!("{{\"trace_mode\": \"{}\", \"steps\": [{}]}}", mode, pairs.join(", "))
}

/// Input document for the certify command: the map plus the operand(s) the
/// chosen theorem needs.
#[derive(Debug, Clone, Default)]
pub struct CertifyInput {
    pub map: Option<PositiveMapSpec>,
    pub operand: Option<CMatrix>,
    pub second: Option<CMatrix>,
    pub operands: Vec<CMatrix>,
}

pub fn certify_input_from_json(text: &str) -> Result<CertifyInput> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut input = CertifyInput::default();
    if let Some(m) = v.get("map") {
        input.map = Some(map_from_value(m)?);
    }
    if let Some(m) = v.get("operand") {
        input.operand = Some(matrix_from_value(m)?);
    }
    if let Some(m) = v.get("second") {
        input.second = Some(matrix_from_value(m)?);
    }
    if let Some(list) = v.get("operands") {
        let arr = list
            .as_array()
            .ok_or_else(|| Error::Parse("\"operands\" must be an array".into()))?;
        input.operands = arr.iter().map(matrix_from_value).collect::<Result<Vec<_>>>()?;
    }
    Ok(input)
}
