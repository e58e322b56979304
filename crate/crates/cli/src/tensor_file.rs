//! Plain-text tensor documents.
//!
//! ```text
//! kind matrix
//! shape 2 2
//! row_space name=V family=Lagrange degree=1 cells=1 length=1 dual=false
//! col_space name=V family=Lagrange degree=1 cells=1 length=1 dual=false
//! 3.3333333333333331e-1 1.6666666666666666e-1
//! 1.6666666666666666e-1 3.3333333333333331e-1
//! ```
//!
//! Numbers carry 17 significant digits, so they re-parse to the same bits.

use dualform::analysis::SpaceNames;
use dualform::assembler::{AssembledTensor, DenseMatrix, DenseVector};
use dualform::fem::{function_space, make_interval_mesh, Element, Family, Space};

pub fn number(x: f64) -> String {
    // adding zero folds -0 into +0
    format!("{:.16e}", x + 0.0)
}

fn descriptor(key: &str, space: Space, names: &SpaceNames) -> String {
    let family = match space.element().family() {
        Family::Lagrange => "Lagrange",
    };
    let mesh = space.mesh();
    format!(
        "{key} name={} family={family} degree={} cells={} length={} dual={}\n",
        names.name(space).replace(' ', "_"),
        space.degree(),
        mesh.n_cells(),
        mesh.length(),
        space.is_dual()
    )
}

fn row(values: &[f64]) -> String {
    let mut s = values.iter().map(|&v| number(v)).collect::<Vec<_>>().join(" ");
    s.push('\n');
    s
}

pub fn write(t: &AssembledTensor, names: &SpaceNames) -> String {
    let mut out = format!("kind {}\n", t.kind());
    let shape: Vec<String> = t.shape().iter().map(usize::to_string).collect();
    out.push_str(&format!("shape {}\n", shape.join(" ")).replace("shape \n", "shape\n"));
    match t {
        AssembledTensor::Scalar(s) => out.push_str(&row(&[*s])),
        AssembledTensor::Vector(v) => {
            out.push_str(&descriptor("space", v.space(), names));
            out.push_str(&row(v.values()));
        }
        AssembledTensor::Matrix(m) => {
            out.push_str(&descriptor("row_space", m.row_space(), names));
            out.push_str(&descriptor("col_space", m.col_space(), names));
            for i in 0..m.rows() {
                out.push_str(&row(m.row(i)));
            }
        }
    }
    out
}

fn value<T: std::str::FromStr>(field: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("bad value in `{field}`"))
}

fn parse_space(line: &str, key: &str) -> Result<Space, String> {
    let rest = line
        .strip_prefix(key)
        .ok_or_else(|| format!("expected `{key}` line, got `{line}`"))?;
    let mut degree = None;
    let mut cells = None;
    let mut length = None;
    let mut dual = None;
    for field in rest.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| format!("malformed field `{field}`"))?;
        match k {
            "name" => {}
            "family" if v == "Lagrange" => {}
            "family" => return Err(format!("unknown family `{v}`")),
            "degree" => degree = Some(value(field, v)?),
            "cells" => cells = Some(value(field, v)?),
            "length" => length = Some(value(field, v)?),
            "dual" => dual = Some(value(field, v)?),
            _ => return Err(format!("unknown field `{k}`")),
        }
    }
    let missing = || format!("incomplete `{key}` descriptor");
    let mesh = make_interval_mesh(cells.ok_or_else(missing)?, length.ok_or_else(missing)?)
        .map_err(|e| e.to_string())?;
    let element = Element::lagrange(degree.ok_or_else(missing)?).map_err(|e| e.to_string())?;
    let space = function_space(mesh, element);
    Ok(if dual.ok_or_else(missing)? { space.dual() } else { space })
}

pub fn parse(text: &str) -> Result<AssembledTensor, String> {
    let mut lines = text.lines();
    let mut next = || lines.next().ok_or_else(|| "unexpected end of document".to_string());
    let kind = next()?
        .strip_prefix("kind ")
        .ok_or("expected `kind` line")?
        .to_string();
    let shape_line = next()?;
    let shape: Vec<usize> = shape_line
        .strip_prefix("shape")
        .ok_or("expected `shape` line")?
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| format!("bad shape `{shape_line}`")))
        .collect::<Result<_, _>>()?;
    let mut header = Vec::new();
    let n_spaces = match kind.as_str() {
        "scalar" => 0,
        "vector" => 1,
        "matrix" => 2,
        other => return Err(format!("unknown kind `{other}`")),
    };
    for _ in 0..n_spaces {
        header.push(next()?.to_string());
    }
    let values: Vec<f64> = lines
        .flat_map(str::split_whitespace)
        .map(|s| s.parse::<f64>().map_err(|_| format!("bad number `{s}`")))
        .collect::<Result<_, _>>()?;
    let expected: usize = shape.iter().product();
    if values.len() != expected {
        return Err(format!("expected {expected} values, found {}", values.len()));
    }
    match n_spaces {
        0 => Ok(AssembledTensor::Scalar(values[0])),
        1 => DenseVector::new(parse_space(&header[0], "space")?, values)
            .map(AssembledTensor::Vector)
            .map_err(|e| e.to_string()),
        _ => DenseMatrix::new(
            parse_space(&header[0], "row_space")?,
            parse_space(&header[1], "col_space")?,
            values,
        )
        .map(AssembledTensor::Matrix)
        .map_err(|e| e.to_string()),
    }
}
