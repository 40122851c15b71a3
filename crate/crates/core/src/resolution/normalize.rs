use super::{ResolutionProof, StepKind};
use crate::cnf::Lit;

/// Removes weakening by carrying, for each step, a weakening-free derivation
/// of a subclause; unused steps are dropped afterwards. Expects a sound proof.
pub fn eliminate_weakening(proof: &ResolutionProof) -> ResolutionProof {
    if !proof.has_weakening() {
        return proof.clone();
    }
    let mut out = ResolutionProof::default();
    // Step of `out` deriving a subclause of each input step.
    let mut sub = Vec::with_capacity(proof.len());
    for step in &proof.steps {
        let id = match step.kind {
            StepKind::Axiom(_) => out.push(step.kind, step.clause.clone()),
            StepKind::Weaken(a) => sub[a],
            StepKind::Resolve(a, b, x) => {
                let (da, db) = (sub[a], sub[b]);
                if !out.clause(da).contains(Lit::pos(x)) {
                    da
                } else if !out.clause(db).contains(Lit::neg(x)) {
                    db
                } else {
                    let r = out.clause(da).resolve(out.clause(db), x).expect("subclauses of a sound step");
                    out.push(StepKind::Resolve(da, db, x), r)
                }
            }
        };
        sub.push(id);
    }
    let last = *sub.last().expect("nonempty proof");
    out.steps.truncate(last + 1);
    prune(&out)
}

/// Keeps only the steps the final step depends on.
fn prune(proof: &ResolutionProof) -> ResolutionProof {
    let used = proof.used_steps();
    let mut remap = vec![usize::MAX; proof.len()];
    let mut out = ResolutionProof::default();
    for (i, step) in proof.steps.iter().enumerate() {
        if !used[i] {
            continue;
        }
        let kind = match step.kind {
            StepKind::Axiom(j) => StepKind::Axiom(j),
            StepKind::Resolve(a, b, x) => StepKind::Resolve(remap[a], remap[b], x),
            StepKind::Weaken(a) => StepKind::Weaken(remap[a]),
        };
        remap[i] = out.push(kind, step.clause.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{Clause, Cnf};
    use crate::resolution::check_refutation;
    use crate::resolution::tests::{contradiction, contradiction_proof};

    #[test]
    fn weakening_free_is_identity() {
        assert_eq!(eliminate_weakening(&contradiction_proof()), contradiction_proof());
    }

    #[test]
    fn single_weakening_removed() {
        // {x1}, {¬x1 ∨ x2}, {¬x2}: weaken {x1} to {x1 ∨ x2} before resolving.
        let cnf = Cnf::new(
            2,
            vec![
                Clause::from_dimacs(&[1]).unwrap(),
                Clause::from_dimacs(&[-1, 2]).unwrap(),
                Clause::from_dimacs(&[-2]).unwrap(),
            ],
        )
        .unwrap();
        let c = |l: &[i32]| Clause::from_dimacs(l).unwrap();
        let mut p = ResolutionProof::default();
        p.push(StepKind::Axiom(0), c(&[1]));
        p.push(StepKind::Weaken(0), c(&[1, 2]));
        p.push(StepKind::Axiom(1), c(&[-1, 2]));
        p.push(StepKind::Resolve(1, 2, 1), c(&[2]));
        p.push(StepKind::Axiom(2), c(&[-2]));
        p.push(StepKind::Resolve(3, 4, 2), Clause::empty());
        let before = check_refutation(&cnf, &p).unwrap();
        let q = eliminate_weakening(&p);
        let after = check_refutation(&cnf, &q).unwrap();
        assert!(!q.has_weakening());
        assert!(after.size <= before.size && after.width <= before.width && after.depth <= before.depth);
        assert_eq!(after.size, 5);
    }

    #[test]
    fn shortcut_through_weakened_pivot() {
        // Weakening introduces the pivot; the resolution collapses onto a premise.
        let c = |l: &[i32]| Clause::from_dimacs(l).unwrap();
        let mut p = ResolutionProof::default();
        p.push(StepKind::Axiom(0), c(&[1]));
        p.push(StepKind::Axiom(1), c(&[-1]));
        p.push(StepKind::Resolve(0, 1, 1), Clause::empty());
        p.push(StepKind::Weaken(2), c(&[1]));
        p.push(StepKind::Resolve(3, 1, 1), Clause::empty());
        check_refutation(&contradiction(), &p).unwrap();
        let q = eliminate_weakening(&p);
        assert_eq!(q, contradiction_proof());
    }
}
