use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Severity {
    Error,
    Warning,
}

/// Stable diagnostic codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Code {
    DupArgNumber,
    SpaceMismatch,
    NumberGap,
    MeshMismatch,
    SignatureMismatch,
    Cycle,
}

impl Code {
    pub fn as_str(&self) -> &'static str {
        match self {
            Code::DupArgNumber => "DUP_ARG_NUMBER",
            Code::SpaceMismatch => "SPACE_MISMATCH",
            Code::NumberGap => "NUMBER_GAP",
            Code::MeshMismatch => "MESH_MISMATCH",
            Code::SignatureMismatch => "SIGNATURE_MISMATCH",
            Code::Cycle => "CYCLE",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A well-formedness violation.
///
/// `path` lists child indices from the root form: a term index, then for an
/// integral `0` (the integrand) followed by expression child indices; for a
/// delta `0` (operand) or `1` (dual operand); for an external operator the
/// operand index; for an adjoint or a nested form `0` followed by the inner
/// term index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub path: Vec<usize>,
}

impl Diagnostic {
    pub fn error(code: Code, message: impl Into<String>, path: Vec<usize>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            path,
        }
    }

    pub fn path_string(&self) -> String {
        if self.path.is_empty() {
            return "/".into();
        }
        self.path.iter().map(|i| format!("/{i}")).collect()
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.path_string(), self.message)
    }
}
