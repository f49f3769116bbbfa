use std::fmt;

use crate::parse::SourceSpan;
use crate::vocab::Diagnostic;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{span}: {message}")]
    Syntax { span: SourceSpan, message: String },
    #[error("invalid problem: {}", DiagnosticList(.0))]
    Invalid(Vec<(Diagnostic, Option<SourceSpan>)>),
    #[error("enumeration cap exceeded: {fluents} fluents > limit {limit}")]
    CapExceeded { fluents: usize, limit: usize },
    #[error("empty query")]
    EmptyQuery,
}

pub type Result<T> = std::result::Result<T, Error>;

struct DiagnosticList<'a>(&'a [(Diagnostic, Option<SourceSpan>)]);

impl fmt::Display for DiagnosticList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (d, span)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            match span {
                Some(s) => write!(f, "{s}: {}", d.kind)?,
                None => write!(f, "{d}")?,
            }
        }
        Ok(())
    }
}
