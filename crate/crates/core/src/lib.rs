//! Compiler core for VL, a small functional language whose programs may use
//! several versions of one module at once.
//!
//! Pipeline: [`surface`] parses modules, [`girard`] translates them to
//! [`vlmini`], [`infer`] synthesizes graded types and dependency
//! constraints, [`bundle`] merges per-version interfaces, [`solver`] picks a
//! version label for every resource variable, and [`codegen`] emits a
//! version-specialized program. [`lambdavl`] is the core calculus used as a
//! typing and evaluation oracle. [`driver`] strings the stages together.

pub mod version;
pub mod vlmini;
pub mod builtins;
pub mod surface;
pub mod girard;
pub mod infer;
pub mod bundle;
pub mod solver;
pub mod lambdavl;
pub mod diag;
pub mod driver;
pub mod codegen;
pub mod bench;
