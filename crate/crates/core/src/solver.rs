//! Dependency constraint solver over the finite label universe.
//!
//! A label is a vector with one version index per registered module.
//! Variable dependencies are component-wise equality, so they are handled
//! with union-find; label dependencies fix components; disjunctions are
//! decided by backtracking with unit propagation. Among all models the
//! solver returns the maximum under the newest-preference order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::version::{ModuleName, ModuleRegistry, PartialLabel, Var, Version, VersionLabel};
use crate::vlmini::DependencyConstraint as C;

pub type Assignment = BTreeMap<Var, VersionLabel>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    /// `core` indexes the conjuncts handed to the solver.
    #[error("constraints are unsatisfiable")]
    Unsat { core: Vec<usize> },
    #[error("unknown module or version in {0}")]
    UnknownModule(PartialLabel),
}

/// Compiled constraint over dense variable and module indices.
#[derive(Debug, Clone)]
enum Node {
    And(Vec<Node>),
    Or(Vec<Node>),
    Eq(usize, usize),
    Fix(usize, Vec<(usize, u16)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    True,
    False,
    Open,
}

#[derive(Debug, Clone)]
struct State {
    parent: Vec<usize>,
    /// Partial label of each class, valid at the class root.
    vals: Vec<Vec<Option<u16>>>,
}

impl State {
    fn new(nvars: usize, nmods: usize) -> State {
        State { parent: (0..nvars).collect(), vals: vec![vec![None; nmods]; nvars] }
    }

    fn find(&self, mut a: usize) -> usize {
        while self.parent[a] != a {
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return true;
        }
        let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
        for m in 0..self.vals[keep].len() {
            match (self.vals[keep][m], self.vals[drop][m]) {
                (Some(x), Some(y)) if x != y => return false,
                (None, y) => self.vals[keep][m] = y,
                _ => {}
            }
        }
        self.parent[drop] = keep;
        true
    }

    fn fix(&mut self, a: usize, comps: &[(usize, u16)]) -> bool {
        let r = self.find(a);
        for &(m, i) in comps {
            match self.vals[r][m] {
                Some(x) if x != i => return false,
                _ => self.vals[r][m] = Some(i),
            }
        }
        true
    }

    fn status(&self, n: &Node) -> Status {
        match n {
            Node::Eq(a, b) => {
                let (ra, rb) = (self.find(*a), self.find(*b));
                if ra == rb {
                    return Status::True;
                }
                let (va, vb) = (&self.vals[ra], &self.vals[rb]);
                if va.iter().zip(vb).any(|(x, y)| matches!((x, y), (Some(x), Some(y)) if x != y)) {
                    Status::False
                } else if va.iter().all(Option::is_some) && va == vb {
                    Status::True
                } else {
                    Status::Open
                }
            }
            Node::Fix(a, comps) => {
                let v = &self.vals[self.find(*a)];
                let mut st = Status::True;
                for &(m, i) in comps {
                    match v[m] {
                        Some(x) if x != i => return Status::False,
                        None => st = Status::Open,
                        _ => {}
                    }
                }
                st
            }
            Node::And(ns) => {
                let mut st = Status::True;
                for n in ns {
                    match self.status(n) {
                        Status::False => return Status::False,
                        Status::Open => st = Status::Open,
                        Status::True => {}
                    }
                }
                st
            }
            Node::Or(ns) => {
                let mut st = Status::False;
                for n in ns {
                    match self.status(n) {
                        Status::True => return Status::True,
                        Status::Open => st = Status::Open,
                        Status::False => {}
                    }
                }
                st
            }
        }
    }

    /// Asserts `n`; disjunctions are queued in `ors` instead of decided.
    fn apply<'a>(&mut self, n: &'a Node, ors: &mut Vec<&'a Node>) -> bool {
        match n {
            Node::And(ns) => ns.iter().all(|n| self.apply(n, ors)),
            Node::Or(ns) if ns.len() == 1 => self.apply(&ns[0], ors),
            Node::Or(_) => {
                ors.push(n);
                true
            }
            Node::Eq(a, b) => self.union(*a, *b),
            Node::Fix(a, comps) => self.fix(*a, comps),
        }
    }
}

fn search(mut state: State, mut ors: Vec<&Node>) -> Option<State> {
    loop {
        let mut changed = false;
        let mut next = Vec::new();
        for o in std::mem::take(&mut ors) {
            let Node::Or(ds) = o else { unreachable!() };
            let mut live = Vec::new();
            let mut done = false;
            for d in ds {
                match state.status(d) {
                    Status::True => {
                        done = true;
                        break;
                    }
                    Status::Open => live.push(d),
                    Status::False => {}
                }
            }
            if done {
                continue;
            }
            match live.len() {
                0 => return None,
                1 => {
                    if !state.apply(live[0], &mut next) {
                        return None;
                    }
                    changed = true;
                }
                _ => next.push(o),
            }
        }
        ors = next;
        if !changed {
            break;
        }
    }
    let Some((first, rest)) = ors.split_first() else {
        return Some(state);
    };
    let Node::Or(ds) = first else { unreachable!() };
    // Later disjuncts first: bundled disjuncts are listed oldest version first.
    for d in ds.iter().rev() {
        if state.status(d) == Status::False {
            continue;
        }
        let mut s = state.clone();
        let mut more = rest.to_vec();
        if s.apply(d, &mut more) {
            if let Some(found) = search(s, more) {
                return Some(found);
            }
        }
    }
    None
}

struct Problem<'r> {
    reg: &'r ModuleRegistry,
    modules: Vec<ModuleName>,
    versions: Vec<Vec<Version>>,
    vars: Vec<Var>,
    index: BTreeMap<Var, usize>,
}

impl<'r> Problem<'r> {
    fn new(reg: &'r ModuleRegistry, vars: BTreeSet<Var>) -> Problem<'r> {
        let modules: Vec<ModuleName> = reg.modules().cloned().collect();
        let versions = modules.iter().map(|m| reg.versions(m).unwrap_or(&[]).to_vec()).collect();
        let vars: Vec<Var> = vars.into_iter().collect();
        let index = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        Problem { reg, modules, versions, vars, index }
    }

    fn compile(&self, c: &C) -> Result<Node, SolveError> {
        Ok(match c {
            C::Top => Node::And(vec![]),
            C::And(..) => Node::And(c.conjuncts().into_iter().map(|c| self.compile(c)).collect::<Result<_, _>>()?),
            C::Or(..) => Node::Or(c.disjuncts().into_iter().map(|c| self.compile(c)).collect::<Result<_, _>>()?),
            C::VarDep(a, b) => Node::Eq(self.index[a], self.index[b]),
            C::LabelDep(a, d) => {
                let mut comps = Vec::new();
                for (m, v) in d.iter() {
                    let mi = self.modules.iter().position(|x| x == m);
                    let vi = self.reg.index_of(m, v);
                    match (mi, vi) {
                        (Some(mi), Some(vi)) => comps.push((mi, vi as u16)),
                        _ => return Err(SolveError::UnknownModule(d.clone())),
                    }
                }
                Node::Fix(self.index[a], comps)
            }
        })
    }

    fn fresh(&self) -> State {
        State::new(self.vars.len(), self.modules.len())
    }

    fn sat(&self, root: &Node, fixes: &[(usize, usize, u16)]) -> Option<State> {
        let mut s = self.fresh();
        let mut ors = Vec::new();
        for &(v, m, i) in fixes {
            if !s.fix(v, &[(m, i)]) {
                return None;
            }
        }
        if !s.apply(root, &mut ors) {
            return None;
        }
        search(s, ors)
    }

    /// Component of `v` in a model, completing open components with the
    /// newest version.
    fn value(&self, s: &State, v: usize, m: usize) -> u16 {
        s.vals[s.find(v)][m].unwrap_or(self.versions[m].len() as u16 - 1)
    }

    fn label(&self, s: &State, v: usize) -> VersionLabel {
        VersionLabel::new(
            self.modules.iter().enumerate().map(|(m, name)| (name.clone(), self.versions[m][self.value(s, v, m) as usize].clone())),
        )
    }
}

/// Solves `c`, assigning a label to each of its variables and to `extra`.
pub fn solve(c: &C, reg: &ModuleRegistry) -> Result<Assignment, SolveError> {
    solve_items(&c.conjuncts().into_iter().cloned().collect::<Vec<_>>(), &[], reg)
}

/// Solves the conjunction of `items`. On failure the unsat core indexes
/// `items`.
pub fn solve_items(items: &[C], extra: &[Var], reg: &ModuleRegistry) -> Result<Assignment, SolveError> {
    let mut vars: BTreeSet<Var> = extra.iter().copied().collect();
    for c in items {
        vars.extend(c.vars());
    }
    let p = Problem::new(reg, vars);
    let nodes: Vec<Node> = items.iter().map(|c| p.compile(c)).collect::<Result<_, _>>()?;
    let root = Node::And(nodes.clone());
    let Some(mut witness) = p.sat(&root, &[]) else {
        return Err(SolveError::Unsat { core: unsat_core(&p, &nodes) });
    };
    let mut fixes = Vec::new();
    for v in 0..p.vars.len() {
        for m in 0..p.modules.len() {
            let newest = p.versions[m].len() as u16 - 1;
            let mut best = p.value(&witness, v, m);
            for i in (best + 1..=newest).rev() {
                let mut trial = fixes.clone();
                trial.push((v, m, i));
                if let Some(s) = p.sat(&root, &trial) {
                    witness = s;
                    best = i;
                    break;
                }
            }
            fixes.push((v, m, best));
        }
    }
    Ok(p.vars.iter().enumerate().map(|(i, var)| (*var, p.label(&witness, i))).collect())
}

/// Greedy deletion: drop every item whose removal keeps the rest unsat.
fn unsat_core(p: &Problem, nodes: &[Node]) -> Vec<usize> {
    let mut core: Vec<usize> = (0..nodes.len()).collect();
    let mut i = 0;
    while i < core.len() {
        let without: Vec<Node> = core.iter().filter(|&&j| j != core[i]).map(|&j| nodes[j].clone()).collect();
        if p.sat(&Node::And(without), &[]).is_none() {
            core.remove(i);
        } else {
            i += 1;
        }
    }
    core
}

/// Direct semantic evaluation of `c` under `a`.
pub fn holds(c: &C, a: &Assignment) -> bool {
    match c {
        C::Top => true,
        C::And(x, y) => holds(x, a) && holds(y, a),
        C::Or(x, y) => holds(x, a) || holds(y, a),
        C::VarDep(x, y) => matches!((a.get(x), a.get(y)), (Some(l1), Some(l2)) if l1 == l2),
        C::LabelDep(x, d) => a.get(x).is_some_and(|l| l.agrees_with(d)),
    }
}

/// Per-module version indices of a label, in registry module order.
pub fn label_key(l: &VersionLabel, reg: &ModuleRegistry) -> Vec<usize> {
    reg.modules().map(|m| l.get(m).and_then(|v| reg.index_of(m, v)).unwrap_or(0)).collect()
}

/// Newest-preference order: variables in ascending order, each compared by
/// its label's version indices, module by module.
pub fn compare_assignments(a: &Assignment, b: &Assignment, reg: &ModuleRegistry) -> Ordering {
    let vars: BTreeSet<&Var> = a.keys().chain(b.keys()).collect();
    for v in vars {
        let ka = a.get(v).map(|l| label_key(l, reg));
        let kb = b.get(v).map(|l| label_key(l, reg));
        match ka.cmp(&kb) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

pub fn prefer_newest(candidates: &[Assignment], reg: &ModuleRegistry) -> Option<Assignment> {
    candidates.iter().max_by(|a, b| compare_assignments(a, b, reg)).cloned()
}

fn smt_var(v: Var, module: &str) -> String {
    format!("alpha{}_{module}", v.0)
}

/// SMT-LIB2 encoding: one integer per (variable, module), holding the
/// index of the version in the registry.
pub fn export_smt2(c: &C, reg: &ModuleRegistry) -> String {
    let mut out = String::from("(set-logic QF_LIA)\n");
    let modules: Vec<&ModuleName> = reg.modules().collect();
    for v in c.vars() {
        for m in &modules {
            let n = reg.versions(m).map_or(0, |vs| vs.len());
            let x = smt_var(v, m);
            let _ = writeln!(out, "(declare-const {x} Int)");
            let _ = writeln!(out, "(assert (and (>= {x} 0) (< {x} {n})))");
        }
    }
    let _ = writeln!(out, "(assert {})", smt_term(c, reg, &modules));
    out.push_str("(check-sat)\n(get-model)\n");
    out
}

fn smt_term(c: &C, reg: &ModuleRegistry, modules: &[&ModuleName]) -> String {
    match c {
        C::Top => "true".into(),
        C::And(..) => {
            format!("(and {})", c.conjuncts().iter().map(|c| smt_term(c, reg, modules)).collect::<Vec<_>>().join(" "))
        }
        C::Or(..) => {
            format!("(or {})", c.disjuncts().iter().map(|c| smt_term(c, reg, modules)).collect::<Vec<_>>().join(" "))
        }
        C::VarDep(a, b) => {
            let eqs: Vec<String> =
                modules.iter().map(|m| format!("(= {} {})", smt_var(*a, m), smt_var(*b, m))).collect();
            conj(eqs)
        }
        C::LabelDep(a, d) => {
            let eqs: Vec<String> = d
                .iter()
                .map(|(m, v)| match reg.index_of(m, v) {
                    Some(i) => format!("(= {} {i})", smt_var(*a, m)),
                    None => "false".into(),
                })
                .collect();
            conj(eqs)
        }
    }
}

fn conj(mut parts: Vec<String>) -> String {
    match parts.len() {
        0 => "true".into(),
        1 => parts.pop().unwrap(),
        _ => format!("(and {})", parts.join(" ")),
    }
}
