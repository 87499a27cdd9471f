//! The VL surface language: lexer, parser, pretty-printer, repository
//! loader and a call-by-need evaluator.

mod ast;
pub mod eval;
mod lexer;
mod parser;
mod pretty;
mod repo;

use std::path::PathBuf;

use itertools::Itertools;
use thiserror::Error;

pub use ast::{Definition, SPattern, Span, SurfaceModule, SurfaceTerm, TermKind};
pub use lexer::is_keyword;
pub use parser::{parse_module, parse_term};
pub use pretty::{is_operator, pretty_module, pretty_pattern, pretty_term, BINARY_OPS};
pub use repo::{discover_registry, load_repository, Repository};

use crate::version::{ModuleName, Version, VersionError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("{}:{}: syntax error: expected {}, found {found}", span.line, span.col, expected.join(" or "))]
    Syntax { span: Span, expected: Vec<String>, found: String },
    #[error("`{0}` is defined more than once")]
    DuplicateDefinition(String),
    #[error("recursive definition of {0} (recursion is not supported)")]
    RecursiveDefinition(String),
    #[error("variable `{0}` is bound twice in one pattern")]
    DuplicatePatternVar(String),
    #[error("module {module} version {version} is registered but has no source file")]
    MissingModuleVersion { module: ModuleName, version: Version },
    #[error("module {module} imports unknown module {import}")]
    UnknownImport { module: ModuleName, import: ModuleName },
    #[error("import cycle among modules {}", .0.iter().join(", "))]
    ImportCycle(Vec<ModuleName>),
    #[error("file declares module {found} but lives under {expected}")]
    ModuleNameMismatch { expected: ModuleName, found: ModuleName },
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    InFile { path: PathBuf, source: Box<SurfaceError> },
    #[error(transparent)]
    Version(#[from] VersionError),
}
