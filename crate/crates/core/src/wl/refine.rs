//! Tuple-colour refinement with one renumbering table shared by all graphs
//! of a run, so colour ids are comparable across graphs.

use super::{ColoredGraph, WlError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

/// Largest number of k-tuples per graph.
pub const TUPLE_LIMIT: u128 = 1 << 24;

/// Bits per colour when packing a vector of colours into a `u128`.
const PACK_BITS: u32 = 25;

/// Previous colour, then the sorted multiset of packed colour vectors.
type Signature = (u32, Vec<u128>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WlColoring {
    pub k: usize,
    /// `rounds[t][tuple]`; tuple `(u_1, …, u_k)` has index `Σ u_j n^(j-1)`.
    pub rounds: Vec<Vec<u32>>,
    pub class_counts: Vec<usize>,
    /// Least `t` after which the colouring is stable, if reached.
    pub iteration: Option<usize>,
}

impl WlColoring {
    pub fn stabilized(&self) -> bool {
        self.iteration.is_some()
    }

    pub fn final_colors(&self) -> &[u32] {
        self.rounds.last().unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Distinguish {
    At(usize),
    /// Not distinguished within `rounds` rounds; `stabilized` when the joint
    /// colouring became stable, so no later round distinguishes either.
    NotDistinguished { rounds: usize, stabilized: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointReport {
    /// `(round, classes in G, classes in H, distinguished)`.
    pub rows: Vec<(usize, usize, usize, bool)>,
    pub result: Distinguish,
}

impl JointReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,class_count_G,class_count_H,distinguished\n");
        for &(t, a, b, d) in &self.rows {
            writeln!(out, "{t},{a},{b},{d}").unwrap();
        }
        out
    }
}

struct Tuples {
    n: usize,
    k: usize,
    pow: Vec<usize>,
    len: usize,
}

impl Tuples {
    fn new(n: usize, k: usize) -> Result<Self, WlError> {
        if k == 0 {
            return Err(WlError::BadDimension);
        }
        let count = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if count > TUPLE_LIMIT || k as u32 * PACK_BITS > 128 {
            return Err(WlError::BudgetExceeded { tuples: count, limit: TUPLE_LIMIT });
        }
        let pow: Vec<usize> = (0..k).map(|j| n.pow(j as u32)).collect();
        Ok(Tuples { n, k, pow, len: count as usize })
    }

    fn entry(&self, t: usize, j: usize) -> usize {
        t / self.pow[j] % self.n
    }
}

fn fingerprint<T: Hash>(x: &T) -> u64 {
    let mut h = DefaultHasher::new();
    x.hash(&mut h);
    h.finish()
}

/// Dense ids for the signatures of every tuple of every graph, numbered in
/// sorted signature order. Fingerprints group the tuples; every tuple is then
/// compared exactly with its group's representative.
fn renumber<S, F>(sizes: &[usize], sig: F) -> Vec<Vec<u32>>
where
    S: Ord + Hash + Eq + Send + Sync,
    F: Fn(usize, usize) -> S + Sync,
{
    let fps: Vec<Vec<u64>> =
        sizes.iter().enumerate().map(|(g, &n)| (0..n).into_par_iter().map(|t| fingerprint(&sig(g, t))).collect()).collect();
    let mut reps: HashMap<u64, S> = HashMap::new();
    for (g, fp) in fps.iter().enumerate() {
        for (t, &f) in fp.iter().enumerate() {
            reps.entry(f).or_insert_with(|| sig(g, t));
        }
    }
    let clean = fps.iter().enumerate().all(|(g, fp)| fp.par_iter().enumerate().all(|(t, f)| reps[f] == sig(g, t)));
    if !clean {
        // Fingerprint collision: number the exact signatures instead.
        let all: Vec<Vec<S>> = sizes.iter().enumerate().map(|(g, &n)| (0..n).map(|t| sig(g, t)).collect()).collect();
        let mut ids: BTreeMap<&S, u32> = all.iter().flatten().map(|s| (s, 0)).collect();
        for (i, v) in ids.values_mut().enumerate() {
            *v = i as u32;
        }
        return all.iter().map(|v| v.iter().map(|s| ids[s]).collect()).collect();
    }
    let mut order: Vec<(&S, u64)> = reps.iter().map(|(f, s)| (s, *f)).collect();
    order.sort_unstable();
    let ids: HashMap<u64, u32> = order.iter().enumerate().map(|(i, &(_, f))| (f, i as u32)).collect();
    fps.iter().map(|fp| fp.iter().map(|f| ids[f]).collect()).collect()
}

/// Round 0: the isomorphism type of each tuple (colours, equalities, edges).
fn initial(graphs: &[&ColoredGraph], spaces: &[Tuples]) -> Vec<Vec<u32>> {
    let sizes: Vec<usize> = spaces.iter().map(|s| s.len).collect();
    renumber(&sizes, |g, t| {
        let (graph, sp) = (graphs[g], &spaces[g]);
        let u: Vec<usize> = (0..sp.k).map(|j| sp.entry(t, j)).collect();
        let mut key: Vec<u32> = u.iter().map(|&x| graph.color(x)).collect();
        for i in 0..sp.k {
            for j in i + 1..sp.k {
                key.push(u32::from(u[i] == u[j]));
                key.push(u32::from(graph.adjacent(u[i], u[j])));
            }
        }
        key
    })
}

fn pack(colors: impl Iterator<Item = u32>) -> u128 {
    colors.fold(0u128, |acc, c| (acc << PACK_BITS) | c as u128)
}

/// One refinement round. For `k = 1` this is colour refinement over
/// neighbourhoods; otherwise each tuple collects, for every vertex `v`, the
/// colours of its `k` substitutions `ū[v/u_j]`.
fn step(graphs: &[&ColoredGraph], spaces: &[Tuples], prev: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let sizes: Vec<usize> = spaces.iter().map(|s| s.len).collect();
    renumber(&sizes, |g, t| -> Signature {
        let (graph, sp, colors) = (graphs[g], &spaces[g], &prev[g]);
        let mut multiset: Vec<u128> = if sp.k == 1 {
            graph.neighbors(t).iter().map(|&v| colors[v] as u128).collect()
        } else {
            let u: Vec<usize> = (0..sp.k).map(|j| sp.entry(t, j)).collect();
            (0..sp.n)
                .map(|v| pack((0..sp.k).map(|j| colors[t - u[j] * sp.pow[j] + v * sp.pow[j]])))
                .collect()
        };
        multiset.sort_unstable();
        (colors[t], multiset)
    })
}

fn class_count(colors: &[u32]) -> usize {
    let mut seen: Vec<u32> = colors.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

fn histogram(colors: &[u32]) -> BTreeMap<u32, usize> {
    let mut h = BTreeMap::new();
    for &c in colors {
        *h.entry(c).or_insert(0) += 1;
    }
    h
}

/// k-WL on one graph: rounds until stable or `max_rounds`.
pub fn wl_refine(g: &ColoredGraph, k: usize, max_rounds: usize) -> Result<WlColoring, WlError> {
    let graphs = [g];
    let spaces = [Tuples::new(g.num_vertices(), k)?];
    let mut current = initial(&graphs, &spaces);
    let mut out = WlColoring { k, rounds: Vec::new(), class_counts: vec![class_count(&current[0])], iteration: None };
    for t in 0..max_rounds {
        let next = step(&graphs, &spaces, &current);
        let count = class_count(&next[0]);
        out.rounds.push(std::mem::replace(&mut current, next).pop().unwrap());
        if count == out.class_counts[t] {
            out.iteration = Some(t);
            return Ok(out);
        }
        out.class_counts.push(count);
    }
    out.rounds.push(current.pop().unwrap());
    Ok(out)
}

/// Joint k-WL on `g` and `h`, with per-round class counts.
pub fn wl_distinguish_report(g: &ColoredGraph, h: &ColoredGraph, k: usize, max_rounds: usize) -> Result<JointReport, WlError> {
    let graphs = [g, h];
    let spaces = [Tuples::new(g.num_vertices(), k)?, Tuples::new(h.num_vertices(), k)?];
    let mut current = initial(&graphs, &spaces);
    let mut rows = Vec::new();
    let mut joint = class_count(&current.concat());
    for t in 0.. {
        let differ = histogram(&current[0]) != histogram(&current[1]);
        rows.push((t, class_count(&current[0]), class_count(&current[1]), differ));
        if differ {
            return Ok(JointReport { rows, result: Distinguish::At(t) });
        }
        if t == max_rounds {
            return Ok(JointReport { rows, result: Distinguish::NotDistinguished { rounds: t, stabilized: false } });
        }
        let next = step(&graphs, &spaces, &current);
        let count = class_count(&next.concat());
        if count == joint {
            return Ok(JointReport { rows, result: Distinguish::NotDistinguished { rounds: t, stabilized: true } });
        }
        joint = count;
        current = next;
    }
    unreachable!()
}

/// Least round at which some colour has different multiplicities in `g` and `h`.
pub fn wl_distinguish(g: &ColoredGraph, h: &ColoredGraph, k: usize, max_rounds: usize) -> Result<Distinguish, WlError> {
    Ok(wl_distinguish_report(g, h, k, max_rounds)?.result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path(n: usize) -> ColoredGraph {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        ColoredGraph::new(n, &edges, vec![0; n]).unwrap()
    }

    fn cycle(n: usize) -> ColoredGraph {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        ColoredGraph::new(n, &edges, vec![0; n]).unwrap()
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> ColoredGraph {
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.gen_bool(p)).collect();
        let colors = (0..n).map(|_| rng.gen_range(0..2)).collect();
        ColoredGraph::new(n, &edges, colors).unwrap()
    }

    /// Whether partition `b` refines partition `a`.
    fn refines(a: &[u32], b: &[u32]) -> bool {
        let mut seen: HashMap<u32, u32> = HashMap::new();
        a.iter().zip(b).all(|(&x, &y)| *seen.entry(y).or_insert(x) == x)
    }

    #[test]
    fn edgeless_graph_is_stable_at_once() {
        let g = ColoredGraph::new(5, &[], vec![0; 5]).unwrap();
        for k in 1..=2 {
            let c = wl_refine(&g, k, 10).unwrap();
            assert_eq!(c.iteration, Some(0));
            assert_eq!(c.class_counts[0], if k == 1 { 1 } else { 2 });
        }
    }

    #[test]
    fn path_and_triangle() {
        assert_eq!(wl_distinguish(&path(3), &cycle(3), 1, 5).unwrap(), Distinguish::At(1));
        // Round 0 already sees the edge counts among 2-tuples.
        assert_eq!(wl_distinguish(&path(3), &cycle(3), 2, 5).unwrap(), Distinguish::At(0));
    }

    #[test]
    fn regular_graphs_fool_colour_refinement() {
        let two_triangles = ColoredGraph::new(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)], vec![0; 6]).unwrap();
        assert_eq!(
            wl_distinguish(&cycle(6), &two_triangles, 1, 10).unwrap(),
            Distinguish::NotDistinguished { rounds: 0, stabilized: true }
        );
        assert!(matches!(wl_distinguish(&cycle(6), &two_triangles, 2, 10).unwrap(), Distinguish::At(_)));
    }

    #[test]
    fn refinement_is_monotone_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = rng.gen_range(4..12);
            let g = random_graph(&mut rng, n, 0.3);
            for k in 1..=2 {
                let c = wl_refine(&g, k, 1000).unwrap();
                for w in c.rounds.windows(2) {
                    assert!(refines(&w[0], &w[1]));
                }
                assert!(c.class_counts.windows(2).all(|w| w[0] < w[1]));
                assert!(c.iteration.unwrap() < n.pow(k as u32));
            }
        }
    }

    #[test]
    fn relabelings_are_never_distinguished() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let n = rng.gen_range(5..10);
            let g = random_graph(&mut rng, n, 0.4);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            for k in 1..=3 {
                assert!(matches!(
                    wl_distinguish(&g, &g.permuted(&perm), k, 100).unwrap(),
                    Distinguish::NotDistinguished { stabilized: true, .. }
                ));
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let g = path(300);
        assert!(matches!(wl_refine(&g, 3, 1), Err(WlError::BudgetExceeded { .. })));
        assert_eq!(wl_refine(&g, 0, 1), Err(WlError::BadDimension));
    }

    #[test]
    fn report_lists_rounds() {
        let r = wl_distinguish_report(&path(4), &cycle(4), 1, 10).unwrap();
        assert_eq!(r.result, Distinguish::At(1));
        assert_eq!(r.to_csv(), "round,class_count_G,class_count_H,distinguished\n0,1,1,false\n1,2,1,true\n");
    }
}
