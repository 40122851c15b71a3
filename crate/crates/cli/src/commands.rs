use crate::cylinder::Instance;
use crate::{tradeoff, Command, CopKind, GadgetKind, RobberKind, UsageError, ValidationError};
use anyhow::{Context, Result};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write;
use std::path::{Path, PathBuf};
use supercrit::cnf::{export_dimacs, export_name_table, import_dimacs, Clause, Cnf, Lit, Var};
use supercrit::game::{
    replay, run_match, ChaserCops, CopController, LockstepCops, PaperRobber, RandomCops, RandomRobber,
    RefutationCops, RobberController,
};
use supercrit::lifting::*;
use supercrit::resolution::{
    check_refutation, decision_dag_to_resolution, export_trace, import_trace, min_depth_at_width,
    min_refutation_width, resolution_to_decision_dag, small_width_refutation, OracleOptions, ResolutionProof,
    SWEEP_SIZE_CONSTANT,
};
use supercrit::tseitin::cylinder_tseitin;
use supercrit::wl::{
    build_cfi, compress_cfi, export_colored_graph, import_colored_graph, make_charge_functions,
    wl_distinguish_report, ColoredGraph, Distinguish,
};

/// Text written to standard output, starting with the run header.
pub struct Report(String);

impl Report {
    fn new(header: &str, seed: Option<u64>) -> Self {
        let seed = seed.map_or("none".to_string(), |s| s.to_string());
        Report(format!("{header} seed {seed}\n"))
    }

    pub fn line(&mut self, text: impl AsRef<str>) {
        self.0.push_str(text.as_ref());
        self.0.push('\n');
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".names");
    PathBuf::from(s)
}

fn read_cnf(path: &Path) -> Result<Cnf> {
    import_dimacs(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_proof(path: &Path) -> Result<ResolutionProof> {
    Ok(import_trace(&read(path)?).with_context(|| format!("parsing {}", path.display()))?.1)
}

/// DIMACS with the header as comment lines, plus the name table if any.
fn write_cnf(path: &Path, cnf: &Cnf, header: &str) -> Result<()> {
    write(path, &format!("c {}\n{}", header.trim_start_matches("# "), export_dimacs(cnf)))?;
    if cnf.names.is_some() {
        write(&sidecar(path), &export_name_table(cnf))?;
    }
    Ok(())
}

fn write_trace(path: &Path, num_vars: u32, proof: &ResolutionProof, header: &str) -> Result<()> {
    write(path, &format!("c {}\n{}", header.trim_start_matches("# "), export_trace(num_vars, proof)))
}

fn metrics_line(m: &supercrit::resolution::ProofMetrics) -> String {
    format!("size {} width {} depth {}", m.size, m.width, m.depth)
}

fn seed_of(command: &Command) -> Option<u64> {
    match command {
        Command::Play { seed, .. }
        | Command::Restrict { seed, .. }
        | Command::TailExperiment { seed, .. }
        | Command::TradeoffExperiment { seed, .. } => Some(*seed),
        _ => None,
    }
}

pub fn run(command: Command, header: &str) -> Result<Report> {
    let mut r = Report::new(header, seed_of(&command));
    let file_header = r.0.lines().next().unwrap_or_default().to_string();
    match command {
        Command::GenFormula { cyl, out } => {
            let inst = cyl.build()?;
            let cnf = cylinder_tseitin(&inst.cyl, &inst.comp);
            write_cnf(&out, &cnf, &file_header)?;
            r.line(format!("instance {}", inst.describe()));
            r.line(format!("properties {}", inst.property_line()));
            r.line(format!(
                "vertices {} vertex_classes {} edge_classes {} clauses {}",
                inst.cyl.graph().num_vertices(),
                inst.comp.num_vertex_classes(),
                cnf.num_vars,
                cnf.len()
            ));
        }
        Command::Refute { cyl, out, formula_out } => {
            let inst = cyl.build()?;
            let cnf = cylinder_tseitin(&inst.cyl, &inst.comp);
            let proof = small_width_refutation(&inst.cyl, &inst.comp, &cnf)?;
            let m = check_refutation(&cnf, &proof)?;
            write_trace(&out, cnf.num_vars, &proof, &file_header)?;
            if let Some(path) = formula_out {
                write_cnf(&path, &cnf, &file_header)?;
            }
            let k = inst.cyl.k;
            r.line(format!("instance {}", inst.describe()));
            r.line(metrics_line(&m));
            r.line(format!(
                "width_bound {} size_bound {}",
                k + 3,
                SWEEP_SIZE_CONSTANT * (inst.cyl.middle + inst.cyl.ear) * (1 << k) * k
            ));
        }
        Command::CheckProof { cnf, trace } => {
            let f = read_cnf(&cnf)?;
            let proof = read_proof(&trace)?;
            let m = check_refutation(&f, &proof).map_err(|e| ValidationError(format!("rejected: {e}")))?;
            r.line(format!("valid refutation {}", metrics_line(&m)));
        }
        Command::OracleWidth { cnf, max_width, budget } => {
            let f = read_cnf(&cnf)?;
            let opts = OracleOptions { clause_budget: budget.budget, ..Default::default() };
            let cap = max_width.unwrap_or(f.num_vars as usize);
            match min_refutation_width(&f, cap, &opts)? {
                Some(w) => r.line(format!("min_width {w}")),
                None => r.line(format!("min_width none (no refutation up to width {cap})")),
            }
        }
        Command::OracleDepth { cnf, width, max_depth, budget } => {
            let f = read_cnf(&cnf)?;
            let opts = OracleOptions { clause_budget: budget.budget, ..Default::default() };
            match min_depth_at_width(&f, width, max_depth.unwrap_or(usize::MAX), &opts)? {
                Some(d) => r.line(format!("min_depth {d} at width {width}")),
                None => r.line(format!("min_depth none at width {width}")),
            }
        }
        Command::Play { cyl, cops, num_cops, robber, max_rounds, seed, strict, out } => {
            let inst = cyl.build()?;
            play(&mut r, &inst, cops, num_cops, robber, max_rounds, seed, strict, out.as_deref())?;
        }
        Command::WlRun { dim, g, h, cyl, max_rounds } => {
            let (a, b) = match (g, h) {
                (Some(g), Some(h)) => (
                    import_colored_graph(&read(&g)?).with_context(|| format!("parsing {}", g.display()))?,
                    import_colored_graph(&read(&h)?).with_context(|| format!("parsing {}", h.display()))?,
                ),
                _ => {
                    let inst = cyl.build()?;
                    r.line(format!("instance {}", inst.describe()));
                    cfi_pair(&inst)?
                }
            };
            let report = wl_distinguish_report(&a, &b, dim, max_rounds)?;
            r.line(format!("graphs {} {} vertices, dimension {dim}", a.num_vertices(), b.num_vertices()));
            r.line("t,classes_g,classes_h,differ");
            for (t, x, y, d) in &report.rows {
                r.line(format!("{t},{x},{y},{d}"));
            }
            match report.result {
                Distinguish::At(t) => r.line(format!("distinguished at round {t}")),
                Distinguish::NotDistinguished { rounds, stabilized } => {
                    r.line(format!("not distinguished after {rounds} rounds (stabilized {stabilized})"))
                }
            }
        }
        Command::CfiGen { cyl, out_f, out_g } => {
            let inst = cyl.build()?;
            let (a, b) = cfi_pair(&inst)?;
            write(&out_f, &export_colored_graph(&a))?;
            write(&out_g, &export_colored_graph(&b))?;
            r.line(format!("instance {}", inst.describe()));
            r.line(format!("vertices {} edges {} / {}", a.num_vertices(), a.num_edges(), b.num_edges()));
        }
        Command::Lift { cnf, gadget, size, out, proof, proof_out } => {
            let f = read_cnf(&cnf)?;
            let lifted = match gadget {
                GadgetKind::Xor => xor_lift(&f, size)?,
                GadgetKind::Ind => ind_lift(&f, size)?,
                GadgetKind::Ind3 => ind_lift_3cnf(&f, size)?,
            };
            write_cnf(&out, &lifted.cnf, &file_header)?;
            r.line(format!(
                "source vars {} clauses {} width {}",
                f.num_vars,
                f.len(),
                f.width()
            ));
            r.line(format!(
                "lifted vars {} clauses {} width {}",
                lifted.cnf.num_vars,
                lifted.cnf.len(),
                lifted.cnf.width()
            ));
            if let (Some(p), Some(pout)) = (proof, proof_out) {
                let source = read_proof(&p)?;
                let sm = check_refutation(&f, &source).map_err(|e| ValidationError(format!("source proof rejected: {e}")))?;
                let (cnf, sim) = match gadget {
                    GadgetKind::Xor => {
                        let (l, q) = simulate_xor_refutation(&f, &source, size)?;
                        (l.cnf, q)
                    }
                    GadgetKind::Ind => {
                        let s = simulate_ind_refutation(&f, &source, size)?;
                        (s.lifted.cnf, s.proof)
                    }
                    GadgetKind::Ind3 => return Err(UsageError("refutations are simulated for xor and ind only".into()).into()),
                };
                let lm = check_refutation(&cnf, &sim)?;
                write_trace(&pout, cnf.num_vars, &sim, &file_header)?;
                r.line(format!("source proof {}", metrics_line(&sm)));
                r.line(format!("lifted proof {}", metrics_line(&lm)));
            }
        }
        Command::ExtractTree { cnf, trace, l, max_nodes, out } => {
            let f = read_cnf(&cnf)?;
            let lifted = xor_lift(&f, l)?;
            let proof = read_proof(&trace)?;
            let dag = resolution_to_decision_dag(&proof, &lifted.cnf)?;
            let tree = unfold_to_tree(&dag, max_nodes)?;
            let ex = extract_decision_tree(&relabel_leaves(&tree, &lifted)?, &lifted)?;
            let m = ex.tree.validate(&f)?;
            let count = |c: ExtractionCase| ex.steps.iter().filter(|s| s.case == c).count();
            r.line(format!("input tree size {} width {} depth {}", ex.input.size, ex.input.width, ex.input.depth));
            r.line(format!("output tree size {} width {} depth {}", m.size, m.width, m.depth));
            r.line(format!(
                "bounds width {} depth {}",
                ex.input.width / (l - 1),
                ex.input.size.ilog2()
            ));
            r.line(format!(
                "cases halving {} forced {} query {} leaf {}",
                count(ExtractionCase::Halving),
                count(ExtractionCase::Forced),
                count(ExtractionCase::Query),
                count(ExtractionCase::Leaf)
            ));
            if let Some(path) = out {
                let p = decision_dag_to_resolution(&ex.tree, &f)?;
                write_trace(&path, f.num_vars, &p, &file_header)?;
            }
        }
        Command::Restrict { cnf, m, seed, out, proof, proof_out } => {
            let f = read_cnf(&cnf)?;
            let lifted = ind_lift(&f, m)?;
            let rho = sample_restriction(f.num_vars as usize, m, seed);
            let restricted = apply_restriction_to_cnf(&lifted, &rho)?;
            let same = restricted.num_vars == f.num_vars && restricted.clauses == f.clauses;
            if let Some(path) = out {
                write(&path, &export_restriction(&rho))?;
            } else {
                r.0.push_str(&export_restriction(&rho));
            }
            r.line(format!("restricted lift equals source: {same}"));
            if !same {
                return Err(ValidationError("restricted lift differs from the source".into()).into());
            }
            if let (Some(p), Some(pout)) = (proof, proof_out) {
                let lp = read_proof(&p)?;
                let before = check_refutation(&lifted.cnf, &lp)
                    .map_err(|e| ValidationError(format!("proof of the lift rejected: {e}")))?;
                let q = apply_restriction_to_proof(&lifted, &rho, &lp)?;
                let after = check_refutation(&restricted, &q)?;
                write_trace(&pout, restricted.num_vars, &q, &file_header)?;
                r.line(format!("lifted proof {}", metrics_line(&before)));
                r.line(format!("restricted proof {}", metrics_line(&after)));
            }
        }
        Command::TailExperiment { m, blocks, trials, seed, clause, out } => {
            if m == 0 || blocks == 0 || trials == 0 {
                return Err(UsageError("m, blocks and trials must be positive".into()).into());
            }
            let map = ind_lift(&Cnf::new(blocks, Vec::new())?, m)?.map;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = match clause {
                Some(text) => {
                    let lits: Vec<i32> = text
                        .split_whitespace()
                        .map(|t| t.parse().map_err(|_| UsageError(format!("bad literal {t:?}"))))
                        .collect::<Result<_, _>>()?;
                    let c = Clause::from_dimacs(&lits)?;
                    if c.max_var() > map.num_vars() {
                        return Err(UsageError(format!("clause exceeds the {} lifted variables", map.num_vars())).into());
                    }
                    c
                }
                None => random_block_clause(&mut rng, &map, blocks),
            };
            let rows = restriction_width_tail(&map, &c, trials, rng.next_u64());
            let mut csv = String::new();
            writeln!(csv, "{}", r.0.lines().next().unwrap_or_default()).unwrap();
            writeln!(csv, "# clause {c}").unwrap();
            writeln!(csv, "w,empirical,bound,ci_low,ci_high").unwrap();
            for row in &rows {
                writeln!(csv, "{},{:.6},{:.6},{:.6},{:.6}", row.w, row.empirical, row.bound, row.ci_low, row.ci_high).unwrap();
            }
            let within = rows.iter().all(|row| row.empirical <= row.bound + 3.0 * (row.bound * (1.0 - row.bound) / trials as f64).sqrt());
            match out {
                Some(path) => write(&path, &csv)?,
                None => r.0.push_str(csv.split_once('\n').map_or("", |x| x.1)),
            }
            r.line(format!("tail within 3 sigma of the bound: {within}"));
        }
        Command::TradeoffExperiment { seed, out, budget } => {
            let csv = tradeoff::run(&file_header, seed, budget)?;
            match out {
                Some(path) => {
                    write(&path, &csv)?;
                    r.line(format!("rows {}", csv.lines().filter(|l| !l.starts_with('#')).count() - 1));
                }
                None => r.0.push_str(csv.split_once('\n').map_or("", |x| x.1)),
            }
        }
    }
    Ok(r)
}

pub fn cfi_pair(inst: &Instance) -> Result<(ColoredGraph, ColoredGraph)> {
    let (f, g) = make_charge_functions(&inst.cyl);
    let base = inst.cyl.graph();
    let (a, b) = (build_cfi(base, &f)?, build_cfi(base, &g)?);
    if inst.compressed {
        Ok((compress_cfi(&a, &inst.comp)?, compress_cfi(&b, &inst.comp)?))
    } else {
        Ok((a.graph, b.graph))
    }
}

/// Per block one or two random y-literals.
pub fn random_block_clause(rng: &mut ChaCha8Rng, map: &BlockVariableMap, blocks: Var) -> Clause {
    let m = map.size();
    let mut lits = Vec::new();
    for b in 1..=blocks {
        let mut js: Vec<usize> = (1..=m).collect();
        js.shuffle(rng);
        let take = rng.gen_range(1..=2.min(m));
        lits.extend(js[..take].iter().map(|&j| Lit::new(map.y(b, j), rng.gen_bool(0.5))));
    }
    Clause::new(lits).expect("distinct variables")
}

#[allow(clippy::too_many_arguments)]
fn play(
    r: &mut Report,
    inst: &Instance,
    cops: CopKind,
    num_cops: Option<usize>,
    robber: RobberKind,
    max_rounds: usize,
    seed: u64,
    strict: bool,
    out: Option<&Path>,
) -> Result<()> {
    let board = inst.board();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (cop_seed, robber_seed) = (rng.next_u64(), rng.next_u64());
    let k = inst.cyl.k;
    let mut cops: Box<dyn CopController> = match cops {
        CopKind::Lockstep => {
            if num_cops.is_some_and(|n| n != k + 1) {
                return Err(UsageError(format!("lockstep cops are always k + 1 = {}", k + 1)).into());
            }
            Box::new(LockstepCops::new(&board))
        }
        CopKind::Random => Box::new(RandomCops::new(num_cops.unwrap_or(k + 1), cop_seed)),
        CopKind::Chaser => Box::new(ChaserCops::new(num_cops.unwrap_or(k + 1))),
        CopKind::Refutation => {
            let cnf = cylinder_tseitin(&inst.cyl, &inst.comp);
            let proof = small_width_refutation(&inst.cyl, &inst.comp, &cnf)?;
            let width = check_refutation(&cnf, &proof)?.width;
            Box::new(RefutationCops::new(&board, &cnf, &proof, num_cops.unwrap_or(width + 1), strict)?)
        }
    };
    let mut robber: Box<dyn RobberController> = match robber {
        RobberKind::Paper => Box::new(PaperRobber::new()),
        RobberKind::Random => Box::new(RandomRobber::new(robber_seed)),
    };
    let t = run_match(&board, cops.as_mut(), robber.as_mut(), max_rounds);
    let json = serde_json::to_string_pretty(&t)?;
    let replayed = replay(&t)?;
    match out {
        Some(path) => write(path, &(json + "\n"))?,
        None => r.line(json),
    }
    if replayed != t.verdict {
        return Err(ValidationError(format!("replay gives {replayed:?}, match gave {:?}", t.verdict)).into());
    }
    r.line(format!("instance {}", inst.describe()));
    r.line(format!("verdict {:?} ({} cops: {}, robber: {})", t.verdict, t.num_cops, t.cops, t.robber_strategy));
    Ok(())
}
