use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("evaluation domain error in `{subexpr}`: {reason}")]
    Domain { reason: String, subexpr: String },

    #[error("{kind} index {index} out of range: {available} provided")]
    Arity {
        kind: &'static str,
        index: usize,
        available: usize,
    },

    #[error("cannot differentiate `{node}` symbolically with respect to t{param}")]
    Unsupported { node: String, param: usize },
}

pub type Result<T> = std::result::Result<T, DslError>;
