//! Scenario files: JSON documents declaring meshes, spaces, terminals, form
//! trees and the requests to run against them.

use std::collections::{BTreeMap, HashMap};

use dualform::analysis::SpaceNames;
use dualform::fem::{function_space, make_interval_mesh, Element, Family, Mesh, Space};
use dualform::symbolic::{
    action, adjoint, argument, coefficient, delta, external_operator, form_add, integral,
    make_cofunction, make_function, replace, ActionOperand, Coefficient, DualOperand, Expr, Form,
    Measure, Terminal,
};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    #[serde(default)]
    pub meshes: BTreeMap<String, MeshSpec>,
    #[serde(default)]
    pub elements: BTreeMap<String, ElementSpec>,
    #[serde(default)]
    pub spaces: BTreeMap<String, SpaceSpec>,
    #[serde(default)]
    pub terminals: BTreeMap<String, TerminalSpec>,
    #[serde(default)]
    pub forms: BTreeMap<String, Node>,
    #[serde(default)]
    pub requests: Vec<Request>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub n_cells: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub family: String,
    pub degree: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub mesh: String,
    pub element: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dual: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalKindSpec {
    Argument,
    Coargument,
    Coefficient,
    Cofunction,
    SpatialCoordinate,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminalSpec {
    pub kind: TerminalKindSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub number: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

/// A node of a form tree: a reference to a named terminal or form, or an
/// operator applied to child nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    Ref(RefNode),
    Op(OpNode),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefNode {
    #[serde(rename = "ref")]
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum OpNode {
    Add {
        terms: Vec<Node>,
    },
    Mul {
        factors: Vec<Node>,
    },
    Scale {
        factor: f64,
        arg: Box<Node>,
    },
    Integral {
        integrand: Box<Node>,
        measure: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mesh: Option<String>,
    },
    Delta {
        operand: Box<Node>,
        dual_operand: Box<Node>,
    },
    Adjoint {
        form: Box<Node>,
    },
    Action {
        form: Box<Node>,
        operand: Box<Node>,
    },
    Replace {
        form: Box<Node>,
        mapping: Vec<MappingEntry>,
    },
    External {
        operands: Vec<Node>,
        space: String,
        evaluator: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingEntry {
    pub from: Node,
    pub to: Node,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RequestAction {
    Validate,
    Assemble,
    Signature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Request {
    pub target: String,
    pub action: RequestAction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0}; expected {SCHEMA_VERSION}")]
    Schema(u32),
}

impl ParseError {
    /// 1-based line and column of a syntax or shape error, when known.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            ParseError::Json(e) if e.line() > 0 => Some((e.line(), e.column())),
            _ => None,
        }
    }
}

pub fn parse(text: &str) -> Result<Scenario, ParseError> {
    let s: Scenario = serde_json::from_str(text)?;
    if s.schema != SCHEMA_VERSION {
        return Err(ParseError::Schema(s.schema));
    }
    Ok(s)
}

pub fn dump(s: &Scenario) -> String {
    let mut out = serde_json::to_string_pretty(s).expect("scenario serializes");
    out.push('\n');
    out
}

/// Failures while turning a parsed scenario into forms. `code` uses the
/// library's diagnostic codes plus `UNRESOLVED` for dangling names.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolveError {
    pub code: String,
    pub message: String,
}

impl std::fmt::Display for ResolveError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl From<dualform::Error> for ResolveError {
    fn from(e: dualform::Error) -> Self {
        ResolveError {
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }
}

fn unresolved(what: &str, name: &str) -> ResolveError {
    ResolveError {
        code: "UNRESOLVED".into(),
        message: format!("unknown {what} `{name}`"),
    }
}

fn invalid(message: String) -> ResolveError {
    ResolveError {
        code: "INVALID_ARGUMENT".into(),
        message,
    }
}

/// Value of a resolved node.
#[derive(Debug, Clone)]
enum Value {
    Expr(Expr),
    Form(Form),
}

/// Scenario with every name resolved to library objects.
pub struct Resolved {
    meshes: BTreeMap<String, Mesh>,
    pub spaces: BTreeMap<String, Space>,
    pub names: SpaceNames,
    terminals: HashMap<String, Terminal>,
    forms: BTreeMap<String, Node>,
    cache: HashMap<String, Form>,
    active: Vec<String>,
}

pub fn resolve(s: &Scenario) -> Result<Resolved, ResolveError> {
    let mut meshes = BTreeMap::new();
    for (name, m) in &s.meshes {
        meshes.insert(name.clone(), make_interval_mesh(m.n_cells, m.length)?);
    }
    let mut elements = BTreeMap::new();
    for (name, e) in &s.elements {
        let family = match e.family.as_str() {
            "Lagrange" | "lagrange" | "P" | "CG" => Family::Lagrange,
            other => {
                return Err(ResolveError {
                    code: "UNSUPPORTED_ELEMENT".into(),
                    message: format!("unknown element family `{other}`"),
                })
            }
        };
        elements.insert(name.clone(), Element::new(family, e.degree)?);
    }
    let mut spaces = BTreeMap::new();
    let mut names = SpaceNames::new();
    for (name, sp) in &s.spaces {
        let mesh: Mesh = *meshes.get(&sp.mesh).ok_or_else(|| unresolved("mesh", &sp.mesh))?;
        let el = *elements
            .get(&sp.element)
            .ok_or_else(|| unresolved("element", &sp.element))?;
        let mut space = function_space(mesh, el);
        if sp.dual {
            space = space.dual();
        }
        spaces.insert(name.clone(), space);
        names.insert(name, space);
    }
    let mut terminals = HashMap::new();
    for (name, t) in &s.terminals {
        let space = || -> Result<Space, ResolveError> {
            let n = t
                .space
                .as_deref()
                .ok_or_else(|| invalid(format!("terminal `{name}` needs a space")))?;
            spaces.get(n).copied().ok_or_else(|| unresolved("space", n))
        };
        let number = || -> Result<i64, ResolveError> {
            t.number
                .ok_or_else(|| invalid(format!("terminal `{name}` needs a number")))
        };
        let term: Terminal = match t.kind {
            TerminalKindSpec::Argument => argument(space()?, number()?)?.named(name).into(),
            TerminalKindSpec::Coargument => {
                let s = space()?;
                let s = if s.is_dual() { s } else { s.dual() };
                argument(s, number()?)?.named(name).into()
            }
            TerminalKindSpec::Coefficient => {
                let s = space()?;
                let c: Coefficient = match &t.values {
                    Some(v) => make_function(s, v.clone())?,
                    None => coefficient(s),
                };
                c.named(name).into()
            }
            TerminalKindSpec::Cofunction => {
                let s = space()?;
                let s = if s.is_dual() { s } else { s.dual() };
                let c: Coefficient = match &t.values {
                    Some(v) => make_cofunction(s, v.clone())?,
                    None => coefficient(s),
                };
                c.named(name).into()
            }
            TerminalKindSpec::SpatialCoordinate => Terminal::SpatialCoordinate,
            TerminalKindSpec::Constant => Terminal::Constant(
                t.value
                    .ok_or_else(|| invalid(format!("constant `{name}` needs a value")))?,
            ),
        };
        terminals.insert(name.clone(), term);
    }
    for name in s.forms.keys() {
        if terminals.contains_key(name) {
            return Err(invalid(format!("`{name}` names both a terminal and a form")));
        }
    }
    Ok(Resolved {
        meshes,
        spaces,
        names,
        terminals,
        forms: s.forms.clone(),
        cache: HashMap::new(),
        active: Vec::new(),
    })
}

fn as_expr(v: Value) -> Expr {
    match v {
        Value::Expr(e) => e,
        Value::Form(f) => Expr::from(f),
    }
}

fn as_form(v: Value, what: &str) -> Result<Form, ResolveError> {
    match v {
        Value::Form(f) => Ok(f),
        Value::Expr(Expr::Form(f)) => Ok(*f),
        Value::Expr(Expr::Terminal(Terminal::Coefficient(c))) if c.is_cofunction() => {
            Ok(Form::from_cofunction(&c)?)
        }
        Value::Expr(e) => Err(invalid(format!("{what} must be a form, got `{e}`"))),
    }
}

impl Resolved {
    /// Named form, built on first use.
    pub fn form(&mut self, name: &str) -> Result<Form, ResolveError> {
        match self.lookup(name)? {
            Value::Form(f) => Ok(f),
            v => as_form(v, &format!("`{name}`")),
        }
    }

    fn lookup(&mut self, name: &str) -> Result<Value, ResolveError> {
        if let Some(t) = self.terminals.get(name) {
            return Ok(Value::Expr(Expr::Terminal(t.clone())));
        }
        if let Some(f) = self.cache.get(name) {
            return Ok(Value::Form(f.clone()));
        }
        let node = self
            .forms
            .get(name)
            .cloned()
            .ok_or_else(|| unresolved("terminal or form", name))?;
        if self.active.iter().any(|a| a == name) {
            let mut chain = self.active.clone();
            chain.push(name.into());
            return Err(ResolveError {
                code: "CYCLE".into(),
                message: format!("form references loop: {}", chain.join(" -> ")),
            });
        }
        self.active.push(name.into());
        let value = self.node(&node);
        self.active.pop();
        let value = value?;
        if let Value::Form(f) = &value {
            self.cache.insert(name.into(), f.clone());
        }
        Ok(value)
    }

    fn space(&self, name: &str) -> Result<Space, ResolveError> {
        self.spaces.get(name).copied().ok_or_else(|| unresolved("space", name))
    }

    fn node(&mut self, node: &Node) -> Result<Value, ResolveError> {
        let op = match node {
            Node::Ref(r) => return self.lookup(&r.name),
            Node::Op(op) => op,
        };
        Ok(match op {
            OpNode::Add { terms } => {
                let values = terms
                    .iter()
                    .map(|t| self.node(t))
                    .collect::<Result<Vec<_>, _>>()?;
                let any_form = values.iter().any(|v| {
                    matches!(v, Value::Form(_))
                        || matches!(v, Value::Expr(Expr::Terminal(Terminal::Coefficient(c))) if c.is_cofunction())
                });
                if any_form {
                    let mut acc: Option<Form> = None;
                    for v in values {
                        let f = as_form(v, "a summand of a form sum")?;
                        acc = Some(match acc {
                            None => f,
                            Some(a) => form_add(&a, &f)?,
                        });
                    }
                    Value::Form(acc.ok_or_else(|| invalid("empty sum".into()))?)
                } else {
                    let mut it = values.into_iter().map(as_expr);
                    let first = it.next().ok_or_else(|| invalid("empty sum".into()))?;
                    Value::Expr(it.fold(first, |a, b| a + b))
                }
            }
            OpNode::Mul { factors } => {
                let mut it = factors
                    .iter()
                    .map(|f| self.node(f).map(as_expr))
                    .collect::<Result<Vec<_>, _>>()?
                    .into_iter();
                let first = it.next().ok_or_else(|| invalid("empty product".into()))?;
                Value::Expr(it.fold(first, |a, b| a * b))
            }
            OpNode::Scale { factor, arg } => match self.node(arg)? {
                Value::Form(f) => Value::Form(*factor * f),
                Value::Expr(e) => Value::Expr(*factor * e),
            },
            OpNode::Integral {
                integrand,
                measure,
                mesh,
            } => {
                if measure != "dx" {
                    return Err(invalid(format!("unsupported measure `{measure}`")));
                }
                let e = as_expr(self.node(integrand)?);
                let m = match mesh {
                    None => Measure::dx(),
                    Some(name) => Measure::dx_over(
                        *self.meshes.get(name).ok_or_else(|| unresolved("mesh", name))?,
                    ),
                };
                Value::Form(integral(e, m)?)
            }
            OpNode::Delta {
                operand,
                dual_operand,
            } => {
                let e = as_expr(self.node(operand)?);
                let d: DualOperand = match self.node(dual_operand)? {
                    Value::Form(f) => f.into(),
                    Value::Expr(Expr::Form(f)) => (*f).into(),
                    Value::Expr(Expr::Terminal(Terminal::Argument(a))) => a.into(),
                    Value::Expr(Expr::Terminal(Terminal::Coefficient(c))) => c.into(),
                    Value::Expr(other) => {
                        return Err(ResolveError {
                            code: "SPACE_KIND".into(),
                            message: format!("`{other}` cannot fill the dual slot of a delta"),
                        })
                    }
                };
                Value::Form(delta(e, d)?)
            }
            OpNode::Adjoint { form } => {
                let f = as_form(self.node(form)?, "the operand of adjoint")?;
                Value::Form(adjoint(&f)?)
            }
            OpNode::Action { form, operand } => {
                let f = as_form(self.node(form)?, "the first operand of action")?;
                let o: ActionOperand = match self.node(operand)? {
                    Value::Expr(Expr::Terminal(Terminal::Coefficient(c))) => c.into(),
                    v => as_form(v, "the operand of action")?.into(),
                };
                Value::Form(action(&f, o)?)
            }
            OpNode::Replace { form, mapping } => {
                let f = as_form(self.node(form)?, "the operand of replace")?;
                let pairs = mapping
                    .iter()
                    .map(|m| Ok((as_expr(self.node(&m.from)?), as_expr(self.node(&m.to)?))))
                    .collect::<Result<Vec<_>, ResolveError>>()?;
                Value::Form(replace(&f, &pairs)?)
            }
            OpNode::External {
                operands,
                space,
                evaluator,
            } => {
                let ops = operands
                    .iter()
                    .map(|o| self.node(o).map(as_expr))
                    .collect::<Result<Vec<_>, _>>()?;
                Value::Form(external_operator(ops, self.space(space)?, evaluator)?)
            }
        })
    }
}
