//! Gadget lifting of CNF formulas (XOR, indexing and its 3-CNF variant),
//! line-by-line simulation of refutations, decision-tree extraction from XOR
//! lifts and random restrictions of indexing lifts.

mod extract;
mod restrict;
mod simulate;

pub use extract::{
    check_composed_leaves, extract_decision_tree, relabel_leaves, unfold_to_tree, Extraction, ExtractionCase, ExtractionStep,
};
pub use restrict::{
    apply_restriction_to_cnf, apply_restriction_to_proof, exact_width_distribution, export_restriction,
    import_restriction, restricted_width, restriction_width_tail, sample_restriction, Restriction, TailRow,
};
pub use simulate::{simulate_ind_refutation, simulate_xor_refutation, IndSimulation, IND_SIZE_CONSTANT};

use crate::cnf::{Clause, Cnf, CnfError, Lit, Var};
use crate::resolution::ResolutionError;
use thiserror::Error;

/// Largest number of clauses a lift may produce.
pub const LIFT_CLAUSE_LIMIT: u128 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("lift would have {clauses} clauses, limit {limit}")]
    ExpansionBudget { clauses: u128, limit: u128 },
    /// Node counts saturate at `u128::MAX`.
    #[error("unfolded tree would have {nodes} nodes, limit {limit}")]
    TreeTooLarge { nodes: u128, limit: usize },
    #[error("gadget size {0} is too small")]
    GadgetTooSmall(usize),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error("invalid decision tree: {0}")]
    InvalidTree(String),
    #[error("variable domain mismatch: {0}")]
    VariableDomainMismatch(String),
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gadget {
    Xor(usize),
    Ind(usize),
    Ind3(usize),
}

/// What a lifted variable stands for. Blocks and indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarRole {
    Y { block: Var, index: usize },
    X { block: Var, index: usize },
    /// Chaining variable of a block's pointer clause.
    Ext { block: Var, index: usize },
    /// `x_{C,J}`, `y_{C,J}` and their chaining variables.
    Aux,
}

/// Layout of lifted variables. XOR: `y_{i,1..ℓ}` contiguous per block.
/// Indexing: per block `x_{i,1..m}` then `y_{i,1..m}`; all blocks' chaining
/// variables follow, then any auxiliary variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockVariableMap {
    pub gadget: Gadget,
    pub blocks: Var,
    roles: Vec<VarRole>,
}

fn ext_count(m: usize) -> usize {
    m.saturating_sub(3)
}

impl BlockVariableMap {
    fn new(gadget: Gadget, blocks: Var) -> Self {
        let n = blocks as usize;
        let mut roles = Vec::new();
        match gadget {
            Gadget::Xor(l) => {
                for b in 1..=blocks {
                    roles.extend((1..=l).map(|index| VarRole::Y { block: b, index }));
                }
            }
            Gadget::Ind(m) | Gadget::Ind3(m) => {
                for b in 1..=blocks {
                    roles.extend((1..=m).map(|index| VarRole::X { block: b, index }));
                    roles.extend((1..=m).map(|index| VarRole::Y { block: b, index }));
                }
                roles.reserve(n * ext_count(m));
                for b in 1..=blocks {
                    roles.extend((1..=ext_count(m)).map(|index| VarRole::Ext { block: b, index }));
                }
            }
        }
        BlockVariableMap { gadget, blocks, roles }
    }

    /// Gadget size: `ℓ` or `m`.
    pub fn size(&self) -> usize {
        match self.gadget {
            Gadget::Xor(s) | Gadget::Ind(s) | Gadget::Ind3(s) => s,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.roles.len() as u32
    }

    pub fn role(&self, v: Var) -> Option<VarRole> {
        self.roles.get((v as usize).checked_sub(1)?).copied()
    }

    /// The source variable whose block contains `v`.
    pub fn block_of(&self, v: Var) -> Option<Var> {
        match self.role(v)? {
            VarRole::Y { block, .. } | VarRole::X { block, .. } | VarRole::Ext { block, .. } => Some(block),
            VarRole::Aux => None,
        }
    }

    pub fn y(&self, block: Var, j: usize) -> Var {
        let s = self.size() as u32;
        match self.gadget {
            Gadget::Xor(_) => (block - 1) * s + j as u32,
            _ => (block - 1) * 2 * s + s + j as u32,
        }
    }

    pub fn x(&self, block: Var, j: usize) -> Var {
        assert!(!matches!(self.gadget, Gadget::Xor(_)), "XOR lifts have no x variables");
        (block - 1) * 2 * self.size() as u32 + j as u32
    }

    pub fn ext(&self, block: Var, t: usize) -> Var {
        let m = self.size();
        (self.blocks as usize * 2 * m + (block as usize - 1) * ext_count(m) + t) as Var
    }

    fn push_aux(&mut self) -> Var {
        self.roles.push(VarRole::Aux);
        self.roles.len() as Var
    }

    fn names(&self, source: &Cnf) -> Vec<String> {
        let src = |b: Var| match &source.names {
            Some(names) => names[b as usize - 1].clone(),
            None => format!("z{b}"),
        };
        let mut aux = 0;
        self.roles
            .iter()
            .map(|r| match *r {
                VarRole::Y { block, index } => format!("y[{},{index}]", src(block)),
                VarRole::X { block, index } => format!("x[{},{index}]", src(block)),
                VarRole::Ext { block, index } => format!("e[{},{index}]", src(block)),
                VarRole::Aux => {
                    aux += 1;
                    format!("aux{aux}")
                }
            })
            .collect()
    }
}

/// A lifted formula with its variable map and, per lifted clause, the source
/// clause it expands (`None` for pointer-encoding clauses).
#[derive(Clone, Debug)]
pub struct Lifted {
    pub cnf: Cnf,
    pub map: BlockVariableMap,
    pub origin: Vec<Option<usize>>,
}

fn budget(clauses: u128) -> Result<(), LiftError> {
    if clauses > LIFT_CLAUSE_LIMIT {
        Err(LiftError::ExpansionBudget { clauses, limit: LIFT_CLAUSE_LIMIT })
    } else {
        Ok(())
    }
}

/// Even- or odd-parity vectors of length `l` as masks; bit `l - j` holds the
/// `j`-th entry, so increasing masks are lexicographic order.
fn parity_vectors(l: usize, parity: bool) -> Vec<u32> {
    (0..1u32 << l).filter(|v| (v.count_ones() % 2 == 1) == parity).collect()
}

/// All clauses of `XOR_ℓ(c)`: one per falsifying assignment of the blocks,
/// in lexicographic order of the per-literal block vectors.
pub(crate) fn xor_expand(map: &BlockVariableMap, c: &Clause) -> Vec<Clause> {
    let l = map.size();
    let choices: Vec<(Var, Vec<u32>)> =
        c.lits().iter().map(|lit| (lit.var(), parity_vectors(l, !lit.is_positive()))).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; choices.len()];
    loop {
        let mut lits = Vec::with_capacity(l * choices.len());
        for (k, (var, vecs)) in choices.iter().enumerate() {
            let bits = vecs[idx[k]];
            for j in 1..=l {
                // Exclude the assignment: literal is true iff y differs from the bit.
                let set = bits >> (l - j) & 1 == 1;
                lits.push(Lit::new(map.y(*var, j), !set));
            }
        }
        out.push(Clause::new(lits).expect("blocks are disjoint"));
        let mut k = choices.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < choices[k].1.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

pub fn xor_lift(cnf: &Cnf, l: usize) -> Result<Lifted, LiftError> {
    if l < 2 {
        return Err(LiftError::GadgetTooSmall(l));
    }
    let total: u128 = cnf.clauses.iter().map(|c| 1u128 << ((l - 1) * c.width()).min(127)).sum();
    budget(total)?;
    let map = BlockVariableMap::new(Gadget::Xor(l), cnf.num_vars);
    let mut clauses = Vec::new();
    let mut origin = Vec::new();
    for (i, c) in cnf.clauses.iter().enumerate() {
        let e = xor_expand(&map, c);
        origin.extend(std::iter::repeat_n(Some(i), e.len()));
        clauses.extend(e);
    }
    let names = map.names(cnf);
    let cnf = Cnf::new(map.num_vars(), clauses)?.with_names(names);
    Ok(Lifted { cnf, map, origin })
}

/// `OR(lits)` as a 3-CNF chain `(l1 ∨ l2 ∨ e1), (¬e1 ∨ l3 ∨ e2), …,
/// (¬e_{t-3} ∨ l_{t-1} ∨ l_t)`; `e_s` stands for the disjunction of the
/// literals after position `s + 1`.
fn chain_or(lits: &[Lit], ext: impl Fn(usize) -> Var) -> Vec<Clause> {
    let t = lits.len();
    if t <= 3 {
        return vec![Clause::new(lits.to_vec()).expect("distinct variables")];
    }
    let mut out = vec![Clause::new(vec![lits[0], lits[1], Lit::pos(ext(1))]).unwrap()];
    for s in 2..t - 2 {
        out.push(Clause::new(vec![Lit::neg(ext(s - 1)), lits[s], Lit::pos(ext(s))]).unwrap());
    }
    out.push(Clause::new(vec![Lit::neg(ext(t - 3)), lits[t - 2], lits[t - 1]]).unwrap());
    out
}

/// Pointer tuples `J ∈ [m]^w` in lexicographic order.
pub(crate) fn pointer_tuples(m: usize, w: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = m.pow(w as u32);
    (0..total).map(move |mut t| {
        let mut j = vec![0; w];
        for slot in j.iter_mut().rev() {
            *slot = t % m + 1;
            t /= m;
        }
        j
    })
}

/// `C_J = ∨_ℓ (¬x_{i_ℓ,j_ℓ} ∨ y_{i_ℓ,j_ℓ}^{β_ℓ})`.
pub(crate) fn ind_clause(map: &BlockVariableMap, c: &Clause, j: &[usize]) -> Clause {
    let mut lits = Vec::with_capacity(2 * c.width());
    for (lit, &jj) in c.lits().iter().zip(j) {
        lits.push(Lit::neg(map.x(lit.var(), jj)));
        lits.push(Lit::new(map.y(lit.var(), jj), lit.is_positive()));
    }
    Clause::new(lits).expect("blocks are disjoint")
}

/// The encoded pointer clause `x_{i,1} ∨ … ∨ x_{i,m}` of a block.
pub(crate) fn pointer_clauses(map: &BlockVariableMap, block: Var) -> Vec<Clause> {
    let m = map.size();
    let lits: Vec<Lit> = (1..=m).map(|j| Lit::pos(map.x(block, j))).collect();
    chain_or(&lits, |t| map.ext(block, t))
}

fn ind_budget(cnf: &Cnf, m: usize, per_tuple: u128) -> Result<(), LiftError> {
    let tuples: u128 = cnf.clauses.iter().map(|c| (m as u128).saturating_pow(c.width() as u32)).sum();
    budget(tuples.saturating_mul(per_tuple).saturating_add((cnf.num_vars as u128) * m as u128))
}

/// Expansions `C_J` of every clause, then each block's pointer clauses.
pub fn ind_lift(cnf: &Cnf, m: usize) -> Result<Lifted, LiftError> {
    if m < 1 {
        return Err(LiftError::GadgetTooSmall(m));
    }
    ind_budget(cnf, m, 1)?;
    let map = BlockVariableMap::new(Gadget::Ind(m), cnf.num_vars);
    let mut clauses = Vec::new();
    let mut origin = Vec::new();
    for (i, c) in cnf.clauses.iter().enumerate() {
        for j in pointer_tuples(m, c.width()) {
            clauses.push(ind_clause(&map, c, &j));
            origin.push(Some(i));
        }
    }
    for b in 1..=cnf.num_vars {
        for c in pointer_clauses(&map, b) {
            clauses.push(c);
            origin.push(None);
        }
    }
    let names = map.names(cnf);
    let cnf = Cnf::new(map.num_vars(), clauses)?.with_names(names);
    Ok(Lifted { cnf, map, origin })
}

/// The 3-CNF indexing lift: per clause `C` and tuple `J`, chained encodings of
/// `∧ x_{i_ℓ,j_ℓ} → x_{C,J}`, the 2-clause `x_{C,J} → y_{C,J}`, and
/// `y_{C,J} → ∨ y_{i_ℓ,j_ℓ}^{β_ℓ}`; then each block's pointer clauses.
pub fn ind_lift_3cnf(cnf: &Cnf, m: usize) -> Result<Lifted, LiftError> {
    if m < 1 {
        return Err(LiftError::GadgetTooSmall(m));
    }
    let w = cnf.width() as u128;
    ind_budget(cnf, m, 2 * w + 2)?;
    let mut map = BlockVariableMap::new(Gadget::Ind3(m), cnf.num_vars);
    let mut clauses = Vec::new();
    let mut origin = Vec::new();
    for (i, c) in cnf.clauses.iter().enumerate() {
        for j in pointer_tuples(m, c.width()) {
            let xc = map.push_aux();
            let yc = map.push_aux();
            let mut body: Vec<Lit> = c.lits().iter().zip(&j).map(|(l, &jj)| Lit::neg(map.x(l.var(), jj))).collect();
            body.push(Lit::pos(xc));
            let mut head = vec![Lit::neg(yc)];
            head.extend(c.lits().iter().zip(&j).map(|(l, &jj)| Lit::new(map.y(l.var(), jj), l.is_positive())));
            let mut chain = |lits: Vec<Lit>| {
                let fresh: Vec<Var> = (0..lits.len().saturating_sub(3)).map(|_| map.push_aux()).collect();
                chain_or(&lits, |t| fresh[t - 1])
            };
            let mut new = chain(body);
            new.push(Clause::new(vec![Lit::neg(xc), Lit::pos(yc)]).unwrap());
            new.extend(chain(head));
            origin.extend(std::iter::repeat_n(Some(i), new.len()));
            clauses.extend(new);
        }
    }
    for b in 1..=cnf.num_vars {
        for c in pointer_clauses(&map, b) {
            clauses.push(c);
            origin.push(None);
        }
    }
    let names = map.names(cnf);
    let cnf = Cnf::new(map.num_vars(), clauses)?.with_names(names);
    Ok(Lifted { cnf, map, origin })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(n: u32, clauses: &[&[i32]]) -> Cnf {
        Cnf::new(n, clauses.iter().map(|c| Clause::from_dimacs(c).unwrap()).collect()).unwrap()
    }

    fn satisfiable(f: &Cnf) -> bool {
        let n = f.num_vars as usize;
        (0..1u64 << n).any(|bits| {
            let values: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            f.eval_total(&values)
        })
    }

    #[test]
    fn xor_expansion_of_a_two_literal_clause() {
        let f = cnf(5, &[&[4, -5]]);
        let lifted = xor_lift(&f, 2).unwrap();
        let m = &lifted.map;
        let (y41, y42, y51, y52) = (m.y(4, 1) as i32, m.y(4, 2) as i32, m.y(5, 1) as i32, m.y(5, 2) as i32);
        let expected: Vec<Clause> = [
            [y41, y42, y51, -y52],
            [y41, y42, -y51, y52],
            [-y41, -y42, y51, -y52],
            [-y41, -y42, -y51, y52],
        ]
        .iter()
        .map(|c| Clause::from_dimacs(c).unwrap())
        .collect();
        assert_eq!(lifted.cnf.clauses, expected);
        assert_eq!(lifted.cnf.names.as_ref().unwrap()[y41 as usize - 1], "y[z4,1]");
        assert_eq!(xor_lift(&f, 1).unwrap_err(), LiftError::GadgetTooSmall(1));
    }

    #[test]
    fn lifted_clauses_map_back_to_falsified_source_clauses() {
        for l in 2..=3 {
            for c in [&[1][..], &[1, -2], &[-1, 2, 3]] {
                let f = cnf(3, &[c]);
                let lifted = xor_lift(&f, l).unwrap();
                assert_eq!(lifted.cnf.len(), 1 << ((l - 1) * c.len()));
                let n = lifted.cnf.num_vars as usize;
                for bits in 0..1u64 << n {
                    let y: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
                    let x: Vec<bool> =
                        (1..=3).map(|b| (1..=l).fold(false, |acc, j| acc ^ y[lifted.map.y(b, j) as usize - 1])).collect();
                    for lc in &lifted.cnf.clauses {
                        if !lc.eval_total(&y) {
                            assert!(!f.clauses[0].eval_total(&x));
                        }
                    }
                    assert_eq!(lifted.cnf.eval_total(&y), f.eval_total(&x));
                }
            }
        }
    }

    #[test]
    fn indexing_unit_clause() {
        let f = cnf(1, &[&[1]]);
        let lifted = ind_lift(&f, 2).unwrap();
        let m = &lifted.map;
        let expected = vec![
            Clause::new(vec![Lit::neg(m.x(1, 1)), Lit::pos(m.y(1, 1))]).unwrap(),
            Clause::new(vec![Lit::neg(m.x(1, 2)), Lit::pos(m.y(1, 2))]).unwrap(),
            Clause::new(vec![Lit::pos(m.x(1, 1)), Lit::pos(m.x(1, 2))]).unwrap(),
        ];
        assert_eq!(lifted.cnf.clauses, expected);
        assert_eq!(lifted.origin, vec![Some(0), Some(0), None]);
    }

    #[test]
    fn indexing_widths_and_counts() {
        let f = cnf(4, &[&[1, -2, 3], &[-1, 4], &[2, -3, -4]]);
        for m in 1..=5 {
            let lifted = ind_lift(&f, m).unwrap();
            let expansions: Vec<&Clause> =
                lifted.cnf.clauses.iter().zip(&lifted.origin).filter(|(_, o)| o.is_some()).map(|(c, _)| c).collect();
            assert_eq!(expansions.iter().map(|c| c.width()).max(), Some(2 * f.width()));
            assert!(lifted.cnf.len() <= m.pow(f.width() as u32) * f.len() + f.num_vars as usize * m);
            let small = ind_lift_3cnf(&f, m).unwrap();
            assert!(small.cnf.width() <= 3);
            let bound = f.width() * f.len() * m.pow(f.width() as u32) + f.num_vars as usize * m;
            assert!(small.cnf.len() <= 4 * bound && (small.cnf.num_vars as usize) <= 4 * bound);
        }
    }

    #[test]
    fn lifts_preserve_satisfiability() {
        let sat = cnf(2, &[&[1, 2], &[-1]]);
        let unsat = cnf(2, &[&[1, 2], &[-1], &[-2]]);
        for f in [&sat, &unsat] {
            assert_eq!(satisfiable(&xor_lift(f, 2).unwrap().cnf), satisfiable(f));
            assert_eq!(satisfiable(&ind_lift(f, 2).unwrap().cnf), satisfiable(f));
            assert_eq!(satisfiable(&ind_lift(f, 4).unwrap().cnf), satisfiable(f));
        }
        assert!(satisfiable(&ind_lift_3cnf(&sat, 2).unwrap().cnf));
        assert!(!satisfiable(&ind_lift_3cnf(&unsat, 1).unwrap().cnf));
    }

    #[test]
    fn block_map_is_invertible() {
        let f = cnf(3, &[&[1, 2, 3]]);
        for lifted in [xor_lift(&f, 3).unwrap(), ind_lift(&f, 5).unwrap()] {
            let map = &lifted.map;
            let mut seen = std::collections::HashSet::new();
            for b in 1..=3 {
                for j in 1..=map.size() {
                    let y = map.y(b, j);
                    assert_eq!(map.role(y), Some(VarRole::Y { block: b, index: j }));
                    assert!(seen.insert(y));
                    if lifted.map.gadget != Gadget::Xor(3) {
                        let x = map.x(b, j);
                        assert_eq!(map.role(x), Some(VarRole::X { block: b, index: j }));
                        assert!(seen.insert(x));
                    }
                }
            }
        }
    }
}
