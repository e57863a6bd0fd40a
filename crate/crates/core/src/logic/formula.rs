use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Dense handle for a propositional variable within a [`VariablePool`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub u32);

impl VarId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Interned variable names; ids are dense in `0..len()` in registration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VariablePool {
    names: Vec<String>,
    by_name: HashMap<String, VarId>,
}

impl VariablePool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Pool with variables named `x1..=xn`, as used for DIMACS inputs.
    pub fn numbered(n: usize) -> Self {
        let mut pool = Self::new();
        for i in 1..=n {
            pool.intern(&format!("x{i}"));
        }
        pool
    }

    /// Returns the id for `name`, registering it if unseen.
    pub fn intern(&mut self, name: &str) -> VarId {
        if let Some(&id) = self.by_name.get(name) {
            return id;
        }
        let id = VarId(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.by_name.insert(name.to_owned(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, id: VarId) -> Option<&str> {
        self.names.get(id.index()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.names.len() as u32).map(VarId)
    }
}

/// Propositional formula AST.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Var(VarId),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(id: VarId) -> Self {
        Formula::Var(id)
    }

    pub fn lit(id: VarId, positive: bool) -> Self {
        if positive {
            Formula::Var(id)
        } else {
            Formula::Var(id).not()
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(vec![self, other])
    }

    pub fn or(self, other: Formula) -> Self {
        Formula::Or(vec![self, other])
    }

    pub fn implies(self, other: Formula) -> Self {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn iff(self, other: Formula) -> Self {
        Formula::Iff(Box::new(self), Box::new(other))
    }

    pub fn xor(self, other: Formula) -> Self {
        self.iff(other).not()
    }

    /// Evaluates under a total assignment indexed by `VarId`.
    ///
    /// Panics if a referenced variable is outside `assignment`.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Var(v) => assignment[v.index()],
            Formula::Not(f) => !f.eval(assignment),
            Formula::And(fs) => fs.iter().all(|f| f.eval(assignment)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(assignment)),
            Formula::Implies(a, b) => !a.eval(assignment) || b.eval(assignment),
            Formula::Iff(a, b) => a.eval(assignment) == b.eval(assignment),
        }
    }

    /// Evaluates with variable `v` read from bit `v` of `bits`.
    pub fn eval_bits(&self, bits: u64) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Var(v) => (bits >> v.0) & 1 == 1,
            Formula::Not(f) => !f.eval_bits(bits),
            Formula::And(fs) => fs.iter().all(|f| f.eval_bits(bits)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval_bits(bits)),
            Formula::Implies(a, b) => !a.eval_bits(bits) || b.eval_bits(bits),
            Formula::Iff(a, b) => a.eval_bits(bits) == b.eval_bits(bits),
        }
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Var(v) => {
                out.insert(*v);
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Variables in order of first appearance (left to right).
    pub fn vars_in_order(&self) -> Vec<VarId> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.visit_vars(&mut |v| {
            if seen.insert(v) {
                out.push(v);
            }
        });
        out
    }

    fn visit_vars(&self, f: &mut impl FnMut(VarId)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Var(v) => f(*v),
            Formula::Not(g) => g.visit_vars(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_vars(f)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
        }
    }

    /// Largest referenced id plus one, or 0 for a constant formula.
    pub fn var_bound(&self) -> usize {
        self.vars().last().map_or(0, |v| v.index() + 1)
    }

    /// Renders with names from `pool`, in the syntax accepted by the parser.
    pub fn display<'a>(&'a self, pool: &'a VariablePool) -> impl fmt::Display + 'a {
        Display { f: self, pool }
    }
}

struct Display<'a> {
    f: &'a Formula,
    pool: &'a VariablePool,
}

impl Display<'_> {
    fn write(&self, f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |out: &mut fmt::Formatter<'_>, fs: &[Formula], op: &str| -> fmt::Result {
            write!(out, "(")?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(out, " {op} ")?;
                }
                self.write(g, out)?;
            }
            write!(out, ")")
        };
        match f {
            Formula::True => write!(out, "true"),
            Formula::False => write!(out, "false"),
            Formula::Var(v) => match self.pool.name(*v) {
                Some(name) => write!(out, "{name}"),
                None => write!(out, "{v}"),
            },
            Formula::Not(g) => {
                write!(out, "!")?;
                self.write(g, out)
            }
            Formula::And(gs) if gs.is_empty() => write!(out, "true"),
            Formula::Or(gs) if gs.is_empty() => write!(out, "false"),
            Formula::And(gs) => join(out, gs, "&"),
            Formula::Or(gs) => join(out, gs, "|"),
            Formula::Implies(a, b) => {
                write!(out, "(")?;
                self.write(a, out)?;
                write!(out, " -> ")?;
                self.write(b, out)?;
                write!(out, ")")
            }
            Formula::Iff(a, b) => {
                write!(out, "(")?;
                self.write(a, out)?;
                write!(out, " <-> ")?;
                self.write(b, out)?;
                write!(out, ")")
            }
        }
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.f, out)
    }
}
