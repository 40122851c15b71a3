//! Refutation, game and oracle measurements on the toy cylinders.

use crate::cylinder::{CylArgs, Instance};
use anyhow::Result;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use supercrit::game::{guaranteed_rounds, run_match, LockstepCops, PaperRobber, RandomRobber, RefutationCops};
use supercrit::resolution::{
    check_refutation, min_depth_at_width, min_refutation_width, small_width_refutation, OracleOptions, ResolutionError,
};
use supercrit::tseitin::cylinder_tseitin;

pub const COLUMNS: &str = "instance,k,moduli,L,r,compressed,P1,P2,P3,P4,vars,clauses,\
ref_size,ref_width,ref_depth,refcops,refcops_win_round,depth_plus_one,refcops_vs_random,\
lockstep_survived,guaranteed_rounds,oracle_width,oracle_depth";

/// Rounds given to every match, raised to depth + 2 for deep refutations.
const MAX_ROUNDS: usize = 1000;

fn cell<T: ToString>(r: Result<Option<T>, ResolutionError>) -> Result<String> {
    match r {
        Ok(Some(x)) => Ok(x.to_string()),
        Ok(None) => Ok("none".into()),
        Err(ResolutionError::ResourceBudgetExceeded(_)) => Ok("budget".into()),
        Err(e) => Err(e.into()),
    }
}

fn row(name: &str, inst: &Instance, seed: u64, budget: usize) -> Result<String> {
    let cnf = cylinder_tseitin(&inst.cyl, &inst.comp);
    let proof = small_width_refutation(&inst.cyl, &inst.comp, &cnf)?;
    let m = check_refutation(&cnf, &proof)?;
    let board = inst.board();
    let rounds = MAX_ROUNDS.max(m.depth + 2);

    let mut cops = RefutationCops::new(&board, &cnf, &proof, m.width + 1, false)?;
    let t = run_match(&board, &mut cops, &mut PaperRobber::new(), rounds);
    let win = t.verdict.winning_round().map_or("none".into(), |r| r.to_string());
    let mut cops = RefutationCops::new(&board, &cnf, &proof, m.width + 1, false)?;
    let t = run_match(&board, &mut cops, &mut RandomRobber::new(seed), rounds);
    let vs_random = t.verdict.winning_round().map_or("none".into(), |r| r.to_string());

    let t = run_match(&board, &mut LockstepCops::new(&board), &mut PaperRobber::new(), rounds);
    let survived = t.verdict.survived_rounds();

    let opts = OracleOptions { clause_budget: budget, ..Default::default() };
    // Saturation below the reference width is cheap; no refutation there
    // means the reference width is the minimum.
    let width = min_refutation_width(&cnf, m.width - 1, &opts).map(|w| Some(w.unwrap_or(m.width)));
    let depth = match &width {
        Ok(Some(w)) => cell(min_depth_at_width(&cnf, *w, m.depth, &opts))?,
        _ => "-".into(),
    };
    let width = cell(width)?;

    let moduli: Vec<String> = inst.cyl.moduli.iter().map(|x| x.to_string()).collect();
    let p = &inst.properties;
    let yn = |b: bool| if b { "pass" } else { "fail" };
    Ok(format!(
        "{name},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{win},{},{vs_random},{survived},{},{width},{depth}",
        inst.cyl.k,
        moduli.join(" "),
        inst.cyl.middle,
        inst.cyl.ear,
        inst.compressed,
        yn(p.p1.holds),
        yn(p.p2.holds),
        yn(p.p3.holds),
        yn(p.p4.holds),
        cnf.num_vars,
        cnf.len(),
        m.size,
        m.width,
        m.depth,
        m.width + 1,
        m.depth + 1,
        guaranteed_rounds(&board),
    ))
}

/// The CSV text, starting with `header` as a comment line.
pub fn run(header: &str, seed: u64, budget: usize) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = format!("{header}\n{COLUMNS}\n");
    for k in [2, 3] {
        for uncompressed in [false, true] {
            let inst = CylArgs { uncompressed, ..CylArgs::toy(k) }.build()?;
            let name = format!("toy{k}{}", if uncompressed { "-identity" } else { "" });
            out.push_str(&row(&name, &inst, rng.next_u64(), budget)?);
            out.push('\n');
        }
    }
    Ok(out)
}
