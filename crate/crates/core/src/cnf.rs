//! Literals, clauses, CNF formulas, assignments and the DIMACS format.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Variables are 1-based.
pub type Var = u32;

/// A DIMACS-style literal: `+v` or `-v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lit(i32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Self {
        assert!(var >= 1 && var <= i32::MAX as u32, "variable {var} out of range");
        Lit(if positive { var as i32 } else { -(var as i32) })
    }

    pub fn pos(var: Var) -> Self {
        Lit::new(var, true)
    }

    pub fn neg(var: Var) -> Self {
        Lit::new(var, false)
    }

    pub fn from_dimacs(x: i32) -> Option<Self> {
        (x != 0 && x != i32::MIN).then_some(Lit(x))
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> Var {
        self.0.unsigned_abs()
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn negate(self) -> Self {
        Lit(-self.0)
    }

    /// Truth value under a value for the variable.
    pub fn eval(self, value: bool) -> bool {
        value == self.is_positive()
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("variable {0} occurs twice in a clause")]
    RepeatedVariable(Var),
    #[error("variable {var} exceeds variable count {count}")]
    VariableOutOfRange { var: Var, count: u32 },
    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },
}

/// A clause: literals over pairwise distinct variables, kept sorted by variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Clause(Vec<Lit>);

impl Clause {
    pub fn new(mut lits: Vec<Lit>) -> Result<Self, CnfError> {
        lits.sort_by_key(|l| (l.var(), l.is_positive()));
        for w in lits.windows(2) {
            if w[0].var() == w[1].var() {
                return Err(CnfError::RepeatedVariable(w[0].var()));
            }
        }
        Ok(Clause(lits))
    }

    /// Builds a clause, merging duplicate literals; fails on a clash.
    pub fn merged(mut lits: Vec<Lit>) -> Result<Self, CnfError> {
        lits.sort_by_key(|l| (l.var(), l.is_positive()));
        lits.dedup();
        Clause::new(lits)
    }

    pub fn empty() -> Self {
        Clause(Vec::new())
    }

    pub fn from_dimacs(lits: &[i32]) -> Result<Self, CnfError> {
        Clause::new(lits.iter().map(|&x| Lit::from_dimacs(x).expect("nonzero literal")).collect())
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.0
            .binary_search_by_key(&(lit.var(), lit.is_positive()), |l| (l.var(), l.is_positive()))
            .is_ok()
    }

    /// Literal on `var`, if any.
    pub fn lit_of(&self, var: Var) -> Option<Lit> {
        self.0
            .binary_search_by_key(&var, |l| l.var())
            .ok()
            .map(|i| self.0[i])
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|l| l.var())
    }

    pub fn is_subset_of(&self, other: &Clause) -> bool {
        self.0.iter().all(|&l| other.contains(l))
    }

    pub fn max_var(&self) -> Var {
        self.0.iter().map(|l| l.var()).max().unwrap_or(0)
    }

    /// The resolvent on `pivot`, or `None` if the premises do not clash on it
    /// or the result would be tautological.
    pub fn resolve(&self, other: &Clause, pivot: Var) -> Option<Clause> {
        if !self.contains(Lit::pos(pivot)) || !other.contains(Lit::neg(pivot)) {
            return None;
        }
        let lits: Vec<Lit> = self
            .0
            .iter()
            .chain(other.0.iter())
            .copied()
            .filter(|l| l.var() != pivot)
            .collect();
        Clause::merged(lits).ok()
    }

    /// Whether the assignment sets every literal to false.
    pub fn is_falsified_by(&self, rho: &Assignment) -> bool {
        self.0.iter().all(|l| rho.get(l.var()) == Some(!l.is_positive()))
    }

    /// The minimal partial assignment falsifying this clause.
    pub fn falsifying_assignment(&self) -> Assignment {
        Assignment::from_pairs(self.0.iter().map(|l| (l.var(), !l.is_positive())))
    }

    /// Evaluates under a total assignment given as a bit vector indexed by `var - 1`.
    pub fn eval_total(&self, values: &[bool]) -> bool {
        self.0.iter().any(|l| l.eval(values[l.var() as usize - 1]))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// Partial assignment, sorted by variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Assignment(Vec<(Var, bool)>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(Vec::new())
    }

    /// Later pairs override earlier ones on the same variable.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, bool)>) -> Self {
        let mut a = Assignment::new();
        for (v, b) in pairs {
            a.set(v, b);
        }
        a
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        self.0
            .binary_search_by_key(&var, |p| p.0)
            .ok()
            .map(|i| self.0[i].1)
    }

    pub fn set(&mut self, var: Var, value: bool) {
        match self.0.binary_search_by_key(&var, |p| p.0) {
            Ok(i) => self.0[i].1 = value,
            Err(i) => self.0.insert(i, (var, value)),
        }
    }

    pub fn unset(&mut self, var: Var) {
        if let Ok(i) = self.0.binary_search_by_key(&var, |p| p.0) {
            self.0.remove(i);
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Var, bool)] {
        &self.0
    }

    /// Every assigned variable of `self` has the same value in `other`.
    pub fn is_sub_of(&self, other: &Assignment) -> bool {
        self.0.iter().all(|&(v, b)| other.get(v) == Some(b))
    }

    /// The clause falsified exactly by this assignment's extensions.
    pub fn to_clause(&self) -> Clause {
        Clause(self.0.iter().map(|&(v, b)| Lit::new(v, !b)).collect())
    }
}

/// A CNF formula with an optional variable-name table.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Cnf {
    pub num_vars: u32,
    pub clauses: Vec<Clause>,
    pub names: Option<Vec<String>>,
}

impl Cnf {
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Result<Self, CnfError> {
        for c in &clauses {
            if c.max_var() > num_vars {
                return Err(CnfError::VariableOutOfRange { var: c.max_var(), count: num_vars });
            }
        }
        Ok(Cnf { num_vars, clauses, names: None })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.num_vars as usize);
        self.names = Some(names);
        self
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Maximum clause width.
    pub fn width(&self) -> usize {
        self.clauses.iter().map(Clause::width).max().unwrap_or(0)
    }

    /// Sum of clause widths.
    pub fn width_sum(&self) -> usize {
        self.clauses.iter().map(Clause::width).sum()
    }

    pub fn eval_total(&self, values: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.eval_total(values))
    }
}

pub fn export_dimacs(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.num_vars, cnf.clauses.len());
    for c in &cnf.clauses {
        for l in c.lits() {
            out.push_str(&l.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

pub fn import_dimacs(text: &str) -> Result<Cnf, CnfError> {
    let err = |line: usize, msg: &str| CnfError::ParseError { line, msg: msg.to_string() };
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() || parts.len() != 4 || parts[1] != "cnf" {
                return Err(err(line_no, "bad problem line"));
            }
            let v = parts[2].parse().map_err(|_| err(line_no, "bad variable count"))?;
            let c = parts[3].parse().map_err(|_| err(line_no, "bad clause count"))?;
            header = Some((v, c));
            continue;
        }
        let (nv, _) = header.ok_or_else(|| err(line_no, "clause before problem line"))?;
        for tok in line.split_whitespace() {
            let x: i32 = tok.parse().map_err(|_| err(line_no, &format!("bad literal {tok:?}")))?;
            if x == 0 {
                let clause = Clause::from_dimacs(&current).map_err(|e| err(line_no, &e.to_string()))?;
                if clause.max_var() > nv {
                    return Err(err(line_no, "literal exceeds variable count"));
                }
                clauses.push(clause);
                current.clear();
            } else {
                if x == i32::MIN {
                    return Err(err(line_no, "literal out of range"));
                }
                current.push(x);
            }
        }
    }
    let (nv, nc) = header.ok_or_else(|| err(0, "missing problem line"))?;
    if !current.is_empty() {
        return Err(err(text.lines().count(), "unterminated clause"));
    }
    if clauses.len() != nc {
        return Err(err(0, &format!("expected {nc} clauses, found {}", clauses.len())));
    }
    Ok(Cnf { num_vars: nv, clauses, names: None })
}

/// Sidecar name table: one `var <id> <description>` line per variable.
pub fn export_name_table(cnf: &Cnf) -> String {
    let mut out = String::new();
    for v in 1..=cnf.num_vars {
        let name = cnf
            .names
            .as_ref()
            .map(|n| n[v as usize - 1].clone())
            .unwrap_or_else(|| format!("x{v}"));
        out.push_str(&format!("var {v} {name}\n"));
    }
    out
}

pub fn import_name_table(text: &str) -> Result<Vec<String>, CnfError> {
    let mut names = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.splitn(3, ' ');
        let (tag, id, desc) = (parts.next(), parts.next(), parts.next());
        let expected = (names.len() + 1).to_string();
        if tag != Some("var") || id != Some(expected.as_str()) || desc.is_none() {
            return Err(CnfError::ParseError { line: idx + 1, msg: "bad name line".into() });
        }
        names.push(desc.unwrap().to_string());
    }
    Ok(names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dimacs_golden() {
        let cnf = Cnf::new(2, vec![Clause::from_dimacs(&[1, -2]).unwrap()]).unwrap();
        assert_eq!(export_dimacs(&cnf), "p cnf 2 1\n1 -2 0\n");
    }

    #[test]
    fn malformed_literal_reports_line() {
        let e = import_dimacs("p cnf 2 1\n1 x 0\n").unwrap_err();
        assert_eq!(e, CnfError::ParseError { line: 2, msg: "bad literal \"x\"".into() });
        assert!(import_dimacs("p cnf 1 1\n1 -1 0\n").is_err());
    }

    #[test]
    fn resolve_basic() {
        let a = Clause::from_dimacs(&[1, 2]).unwrap();
        let b = Clause::from_dimacs(&[-1, 3]).unwrap();
        assert_eq!(a.resolve(&b, 1), Some(Clause::from_dimacs(&[2, 3]).unwrap()));
        assert_eq!(b.resolve(&a, 1), None);
        let c = Clause::from_dimacs(&[-1, -2]).unwrap();
        assert_eq!(a.resolve(&c, 1), None);
    }

    #[test]
    fn name_table_round_trip() {
        let cnf = Cnf::new(2, vec![]).unwrap().with_names(vec!["a b".into(), "c".into()]);
        let text = export_name_table(&cnf);
        assert_eq!(text, "var 1 a b\nvar 2 c\n");
        assert_eq!(import_name_table(&text).unwrap(), vec!["a b".to_string(), "c".to_string()]);
    }

    fn arb_cnf() -> impl Strategy<Value = Cnf> {
        (1u32..8).prop_flat_map(|n| {
            let clause = proptest::collection::btree_map(1..=n, any::<bool>(), 0..=n as usize)
                .prop_map(|m| Clause::new(m.into_iter().map(|(v, b)| Lit::new(v, b)).collect()).unwrap());
            proptest::collection::vec(clause, 0..10).prop_map(move |cs| Cnf::new(n, cs).unwrap())
        })
    }

    proptest! {
        #[test]
        fn dimacs_round_trip(cnf in arb_cnf()) {
            prop_assert_eq!(import_dimacs(&export_dimacs(&cnf)).unwrap(), cnf);
        }

        #[test]
        fn falsifying_assignment_falsifies(cnf in arb_cnf()) {
            for c in &cnf.clauses {
                let rho = c.falsifying_assignment();
                prop_assert!(c.is_falsified_by(&rho));
                prop_assert_eq!(rho.to_clause(), c.clone());
            }
        }
    }
}
