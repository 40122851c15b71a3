//! Tseitin formulas, their compressed versions and a brute-force oracle.

use crate::cnf::{Clause, Cnf, Lit, Var};
use crate::graph::{Cylinder, Graph, GraphCompression, Vertex};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TseitinError {
    #[error("vertex {vertex} has degree {degree}, above the expansion limit")]
    DegreeTooLarge { vertex: Vertex, degree: usize },
    #[error("charges differ inside the class of vertex {0}")]
    ChargeNotClassConstant(Vertex),
    #[error("substitution repeats a variable in the clauses of vertex {0}")]
    DegenerateClause(Vertex),
    #[error("charge vector has the wrong length or an even total")]
    BadCharge,
    #[error("{0} variables exceed the brute-force limit")]
    TooManyVariables(u32),
}

pub const MAX_DEGREE: usize = 30;
pub const BRUTE_FORCE_LIMIT: u32 = 26;

/// A charged graph whose charges sum to an odd number.
#[derive(Clone, Debug)]
pub struct TseitinInstance<'g> {
    pub graph: &'g Graph,
    pub charge: Vec<bool>,
}

impl<'g> TseitinInstance<'g> {
    pub fn new(graph: &'g Graph, charge: Vec<bool>) -> Result<Self, TseitinError> {
        if charge.len() != graph.num_vertices() || charge.iter().filter(|&&b| b).count() % 2 == 0 {
            return Err(TseitinError::BadCharge);
        }
        Ok(TseitinInstance { graph, charge })
    }

    /// Skips the odd-total check; used to exercise non-nice instances.
    pub fn with_any_charge(graph: &'g Graph, charge: Vec<bool>) -> Self {
        assert_eq!(charge.len(), graph.num_vertices());
        TseitinInstance { graph, charge }
    }

    /// The cylinder instance with the single odd charge at `(1,1)`.
    pub fn cylinder(cyl: &'g Cylinder) -> Self {
        let mut charge = vec![false; cyl.graph().num_vertices()];
        charge[cyl.vertex(1, 1)] = true;
        TseitinInstance { graph: cyl.graph(), charge }
    }
}

/// Parity clauses over `vars`: one clause excluding each assignment whose
/// parity differs from `charge`. Assignment bit `p` belongs to `vars[p]`.
pub(crate) fn parity_clauses(vars: &[Var], charge: bool) -> Vec<Clause> {
    let d = vars.len();
    let mut out = Vec::with_capacity(1 << d.saturating_sub(1));
    for bits in 0u64..(1u64 << d) {
        if (bits.count_ones() % 2 == 1) == charge {
            continue;
        }
        let lits = (0..d).map(|p| Lit::new(vars[p], bits >> p & 1 == 0)).collect();
        out.push(Clause::new(lits).expect("distinct variables"));
    }
    out
}

pub fn build_tseitin(instance: &TseitinInstance) -> Result<Cnf, TseitinError> {
    let g = instance.graph;
    let mut clauses = Vec::new();
    for v in 0..g.num_vertices() {
        if g.degree(v) > MAX_DEGREE {
            return Err(TseitinError::DegreeTooLarge { vertex: v, degree: g.degree(v) });
        }
        let vars: Vec<Var> = g.incident(v).iter().map(|&e| e as Var + 1).collect();
        clauses.extend(parity_clauses(&vars, instance.charge[v]));
    }
    let mut cnf = Cnf::new(g.num_edges() as u32, clauses).expect("edge variables in range");
    cnf.names = Some((0..g.num_edges()).map(|e| {
        let (a, b) = g.endpoints(e);
        format!("e{}-{}", a + 1, b + 1)
    }).collect());
    Ok(cnf)
}

/// Tseitin formula after identifying the variables of each edge class.
///
/// Each vertex class contributes the clauses of its first member; all members
/// yield the same clauses after substitution.
pub fn compress_tseitin(
    instance: &TseitinInstance,
    comp: &GraphCompression,
) -> Result<Cnf, TseitinError> {
    compress_tseitin_named(instance, comp, |e| {
        let (a, b) = instance.graph.endpoints(e);
        format!("e{}-{}", a + 1, b + 1)
    })
}

/// As [`compress_tseitin`], naming each class variable after its first edge.
pub fn compress_tseitin_named(
    instance: &TseitinInstance,
    comp: &GraphCompression,
    edge_name: impl Fn(usize) -> String,
) -> Result<Cnf, TseitinError> {
    let g = instance.graph;
    for v in 0..g.num_vertices() {
        let rep = comp.class_of(v)[0];
        if instance.charge[rep] != instance.charge[v] {
            return Err(TseitinError::ChargeNotClassConstant(v));
        }
    }
    let mut clauses = Vec::new();
    for class in 0..comp.num_vertex_classes() {
        let rep = comp.vertex_class_members(class)[0];
        if g.degree(rep) > MAX_DEGREE {
            return Err(TseitinError::DegreeTooLarge { vertex: rep, degree: g.degree(rep) });
        }
        let vars: Vec<Var> = g.incident(rep).iter().map(|&e| comp.edge_class(e) as Var + 1).collect();
        let mut sorted = vars.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != vars.len() {
            return Err(TseitinError::DegenerateClause(rep));
        }
        clauses.extend(parity_clauses(&vars, instance.charge[rep]));
    }
    let names = (0..comp.num_edge_classes())
        .map(|c| {
            let members = comp.edge_class_members(c);
            format!("{}x{}", edge_name(members[0]), members.len())
        })
        .collect();
    Ok(Cnf::new(comp.num_edge_classes() as u32, clauses)
        .expect("class variables in range")
        .with_names(names))
}

/// Compressed Tseitin of a cylinder with cylinder-coordinate variable names.
pub fn cylinder_tseitin(cyl: &Cylinder, comp: &GraphCompression) -> Cnf {
    let inst = TseitinInstance::cylinder(cyl);
    compress_tseitin_named(&inst, comp, |e| cyl.edge_label(e)).expect("cylinder instance")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NicenessCertificate {
    pub is_nice: bool,
    /// Vertex classes whose parity constraint the candidate violates.
    pub falsified_classes: Vec<usize>,
}

/// Checks whether a total assignment to edge classes violates exactly one
/// vertex class.
pub fn check_niceness(
    instance: &TseitinInstance,
    comp: &GraphCompression,
    candidate: &[bool],
) -> NicenessCertificate {
    assert_eq!(candidate.len(), comp.num_edge_classes());
    let g = instance.graph;
    let constant = (0..g.num_vertices())
        .all(|v| instance.charge[v] == instance.charge[comp.class_of(v)[0]]);
    let falsified: Vec<usize> = (0..comp.num_vertex_classes())
        .filter(|&class| {
            let rep = comp.vertex_class_members(class)[0];
            let parity = g
                .incident(rep)
                .iter()
                .filter(|&&e| candidate[comp.edge_class(e)])
                .count()
                % 2
                == 1;
            parity != instance.charge[rep]
        })
        .collect();
    NicenessCertificate { is_nice: constant && falsified.len() == 1, falsified_classes: falsified }
}

/// Exhaustive satisfiability check.
pub fn brute_force_satisfiable(cnf: &Cnf) -> Result<bool, TseitinError> {
    let n = cnf.num_vars;
    if n > BRUTE_FORCE_LIMIT {
        return Err(TseitinError::TooManyVariables(n));
    }
    let masks: Vec<(u32, u32)> = cnf
        .clauses
        .iter()
        .map(|c| {
            c.lits().iter().fold((0u32, 0u32), |(p, q), l| {
                let bit = 1u32 << (l.var() - 1);
                if l.is_positive() {
                    (p | bit, q)
                } else {
                    (p, q | bit)
                }
            })
        })
        .collect();
    let sat = |a: u32| masks.iter().all(|&(p, q)| a & p != 0 || !a & q != 0);
    if n <= 16 {
        return Ok((0..1u32 << n).any(sat));
    }
    let low = n - 8;
    Ok((0u32..256).into_par_iter().any(|hi| {
        let base = hi << low;
        (0..1u32 << low).any(|lo| sat(base | lo))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cylinder_compression, Cylinder};

    fn cycle(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn single_edge() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let inst = TseitinInstance::new(&g, vec![true, false]).unwrap();
        let cnf = build_tseitin(&inst).unwrap();
        assert_eq!(
            cnf.clauses,
            vec![Clause::from_dimacs(&[1]).unwrap(), Clause::from_dimacs(&[-1]).unwrap()]
        );
        assert!(!brute_force_satisfiable(&cnf).unwrap());
    }

    #[test]
    fn four_cycle_counts() {
        let g = cycle(4);
        let inst = TseitinInstance::new(&g, vec![true, false, false, false]).unwrap();
        let cnf = build_tseitin(&inst).unwrap();
        assert_eq!(cnf.len(), 8);
        assert_eq!(cnf.width(), 2);
        assert_eq!(cnf.width_sum(), 16);
        assert!(!brute_force_satisfiable(&cnf).unwrap());
    }

    #[test]
    fn identity_compression_is_plain_tseitin() {
        let cyl = Cylinder::new(3, 1, vec![3, 3, 3], 3, 1).unwrap();
        let inst = TseitinInstance::cylinder(&cyl);
        let id = GraphCompression::identity(cyl.graph());
        assert_eq!(
            compress_tseitin(&inst, &id).unwrap().clauses,
            build_tseitin(&inst).unwrap().clauses
        );
    }

    #[test]
    fn toy_cylinder_is_nice_and_narrow() {
        let cyl = Cylinder::new(2, 1, vec![6, 15], 30, 3).unwrap();
        let comp = cylinder_compression(&cyl);
        let cnf = cylinder_tseitin(&cyl, &comp);
        assert!(cnf.width() <= 4);
        assert_eq!(cnf.num_vars as usize, comp.num_edge_classes());
        let inst = TseitinInstance::cylinder(&cyl);
        let cert = check_niceness(&inst, &comp, &vec![false; comp.num_edge_classes()]);
        assert!(cert.is_nice);
        assert_eq!(cert.falsified_classes, vec![comp.vertex_class(cyl.vertex(1, 1))]);
    }

    #[test]
    fn niceness_failures() {
        let g = cycle(4);
        let even = TseitinInstance::with_any_charge(&g, vec![true, true, false, false]);
        let id = GraphCompression::identity(&g);
        for bits in 0..16u32 {
            let cand: Vec<bool> = (0..4).map(|i| bits >> i & 1 == 1).collect();
            let cert = check_niceness(&even, &id, &cand);
            assert!(!cert.is_nice);
            assert!(cert.falsified_classes.len().is_multiple_of(2));
        }
        let odd = TseitinInstance::new(&g, vec![true, false, false, false]).unwrap();
        let mut matching = vec![false; 4];
        matching[g.edge_between(0, 1).unwrap()] = true;
        matching[g.edge_between(2, 3).unwrap()] = true;
        let cert = check_niceness(&odd, &id, &matching);
        assert!(!cert.is_nice);
        assert_eq!(cert.falsified_classes.len(), 3);
    }

    #[test]
    fn class_charge_must_be_constant() {
        let cyl = Cylinder::new(2, 1, vec![3, 3], 6, 1).unwrap();
        let comp = cylinder_compression(&cyl);
        let mut charge = vec![false; cyl.graph().num_vertices()];
        charge[cyl.vertex(1, 2)] = true;
        let inst = TseitinInstance::new(cyl.graph(), charge).unwrap();
        assert!(matches!(compress_tseitin(&inst, &comp), Err(TseitinError::ChargeNotClassConstant(_))));
    }

    #[test]
    fn brute_force_edges() {
        assert!(brute_force_satisfiable(&Cnf::new(0, vec![]).unwrap()).unwrap());
        let contradiction = Cnf::new(
            1,
            vec![Clause::from_dimacs(&[1]).unwrap(), Clause::from_dimacs(&[-1]).unwrap()],
        )
        .unwrap();
        assert!(!brute_force_satisfiable(&contradiction).unwrap());
        assert!(brute_force_satisfiable(&Cnf::new(30, vec![]).unwrap()).is_err());
        let wide = Cnf::new(20, vec![Clause::from_dimacs(&[-20]).unwrap()]).unwrap();
        assert!(brute_force_satisfiable(&wide).unwrap());
    }
}
