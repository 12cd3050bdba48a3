//! Community detection by Louvain modularity maximization.
//!
//! The influence graph is directed; modularity and Louvain operate on the
//! symmetrized graph (an undirected edge wherever either direction is
//! present). Node visit order is shuffled per pass from the seed, ties in
//! modularity gain break toward the lowest community id, and a move must
//! strictly improve modularity, so a run is fully determined by the seed.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::graph::{NodeId, SocialGraph};
use crate::seeding;

/// Stop once a full local-move pass gains less than this much modularity.
const PASS_GAIN_EPS: f64 = 1e-9;
/// A single move must beat staying put by this much (scaled by m) to count.
const MOVE_EPS: f64 = 1e-12;

/// Node-to-community assignment with its recomputed modularity.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityPartition {
    /// Community id per dense node index; ids are dense in `[0, community_count)`.
    pub assignment: Vec<usize>,
    pub community_count: usize,
    pub modularity: f64,
    pub seed: u64,
}

impl CommunityPartition {
    pub fn community_of(&self, v: NodeId) -> usize {
        self.assignment[v.index()]
    }
}

/// Pass-level modularity values, for convergence checks in tests.
#[derive(Debug, Clone)]
pub struct LouvainTrace {
    /// Modularity of the flattened assignment after each local-move pass.
    pub pass_modularity: Vec<f64>,
}

/// Newman modularity Q = Σ_c (e_c − a_c²) of a complete assignment over the
/// symmetrized graph. `assignment[v]` is the community of dense node v;
/// ids need not be dense. A graph without edges has Q = 0 by convention.
pub fn modularity(g: &SocialGraph, assignment: &[usize]) -> Result<f64> {
    if assignment.len() != g.node_count() {
        return Err(Error::PartialPartition {
            got: assignment.len(),
            expected: g.node_count(),
        });
    }
    let m = g.sym_edge_count();
    if m == 0 {
        return Ok(0.0);
    }

    // Integer tallies per community keep the textbook cases exact.
    let mut intra: BTreeMap<usize, u64> = BTreeMap::new();
    let mut degree: BTreeMap<usize, u64> = BTreeMap::new();
    for v in g.nodes() {
        let c = assignment[v.index()];
        *degree.entry(c).or_insert(0) += g.sym_of(v).len() as u64;
        for &w in g.sym_of(v) {
            if w > v && assignment[w.index()] == c {
                *intra.entry(c).or_insert(0) += 1;
            }
        }
    }

    let m = m as f64;
    let mut q = 0.0;
    for (&c, &deg) in &degree {
        let e_c = intra.get(&c).copied().unwrap_or(0) as f64 / m;
        let a_c = deg as f64 / (2.0 * m);
        q += e_c - a_c * a_c;
    }
    Ok(q)
}

/// Weighted working graph for one aggregation level. Adjacency entries are
/// directed mirrors of undirected edges; self-loop weight is kept apart and
/// contributes twice to a node's degree.
struct LevelGraph {
    adj: Vec<Vec<(usize, f64)>>,
    self_w: Vec<f64>,
    degree: Vec<f64>,
    two_m: f64,
}

impl LevelGraph {
    fn from_social(g: &SocialGraph) -> LevelGraph {
        let n = g.node_count();
        let mut adj = vec![Vec::new(); n];
        for v in g.nodes() {
            for &w in g.sym_of(v) {
                adj[v.index()].push((w.index(), 1.0));
            }
        }
        let degree: Vec<f64> = adj.iter().map(|l| l.len() as f64).collect();
        let two_m = degree.iter().sum();
        LevelGraph {
            adj,
            self_w: vec![0.0; n],
            degree,
            two_m,
        }
    }

    fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// One local-move pass in the seeded order. Returns (modularity gain, moves).
    fn pass(
        &self,
        order: &[usize],
        node_to_comm: &mut [usize],
        sigma_tot: &mut [f64],
    ) -> (f64, usize) {
        let m = self.two_m / 2.0;
        let mut gain = 0.0;
        let mut moves = 0;
        let mut comm_w: BTreeMap<usize, f64> = BTreeMap::new();

        for &v in order {
            let old = node_to_comm[v];
            let k_v = self.degree[v];

            comm_w.clear();
            for &(u, w) in &self.adj[v] {
                if u != v {
                    *comm_w.entry(node_to_comm[u]).or_insert(0.0) += w;
                }
            }

            // Detach v, then score candidate communities; the score is
            // m·ΔQ of inserting v as an isolated node.
            sigma_tot[old] -= k_v;
            let score = |c: usize, w_to_c: f64| w_to_c - sigma_tot[c] * k_v / self.two_m;
            let stay = score(old, comm_w.get(&old).copied().unwrap_or(0.0));

            let mut best_comm = old;
            let mut best = stay;
            for (&c, &w) in &comm_w {
                if c == old {
                    continue;
                }
                let s = score(c, w);
                if s > best + MOVE_EPS * m.max(1.0) || (s == best && c < best_comm) {
                    best = s;
                    best_comm = c;
                }
            }

            sigma_tot[best_comm] += k_v;
            if best_comm != old {
                node_to_comm[v] = best_comm;
                gain += (best - stay) / m;
                moves += 1;
            }
        }
        (gain, moves)
    }

    /// Collapse communities into super-nodes. `node_to_comm` must be dense.
    fn aggregate(&self, node_to_comm: &[usize], comm_count: usize) -> LevelGraph {
        let mut new_self = vec![0.0; comm_count];
        let mut maps: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); comm_count];
        for v in 0..self.node_count() {
            let c = node_to_comm[v];
            new_self[c] += self.self_w[v];
            for &(u, w) in &self.adj[v] {
                let d = node_to_comm[u];
                if d == c {
                    // both directed mirrors land here, halve at the end
                    new_self[c] += w / 2.0;
                } else {
                    *maps[c].entry(d).or_insert(0.0) += w;
                }
            }
        }
        let adj: Vec<Vec<(usize, f64)>> = maps
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect();
        let degree: Vec<f64> = (0..comm_count)
            .map(|c| adj[c].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * new_self[c])
            .collect();
        LevelGraph {
            adj,
            self_w: new_self,
            degree,
            two_m: self.two_m,
        }
    }
}

/// Renumber community ids densely by first occurrence. Returns the count.
fn densify(assignment: &mut [usize]) -> usize {
    let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
    let mut next = 0;
    for a in assignment.iter_mut() {
        let id = *remap.entry(*a).or_insert_with(|| {
            let id = next;
            next += 1;
            id
        });
        *a = id;
    }
    next
}

pub fn louvain(g: &SocialGraph, seed: u64) -> Result<CommunityPartition> {
    louvain_traced(g, seed).map(|(p, _)| p)
}

/// Louvain with a per-pass modularity trace.
pub fn louvain_traced(g: &SocialGraph, seed: u64) -> Result<(CommunityPartition, LouvainTrace)> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let n = g.node_count();
    // membership of the original nodes, flattened across levels
    let mut membership: Vec<usize> = (0..n).collect();
    let mut level = LevelGraph::from_social(g);
    let mut trace = LouvainTrace {
        pass_modularity: Vec::new(),
    };
    let mut level_idx = 0u64;

    loop {
        let ln = level.node_count();
        let mut node_to_comm: Vec<usize> = (0..ln).collect();
        let mut sigma_tot: Vec<f64> = level.degree.clone();
        let mut order: Vec<usize> = (0..ln).collect();
        let mut improved_level = false;

        let mut pass_idx = 0u64;
        loop {
            let mut rng = seeding::rng_for(seed, "louvain-pass", level_idx << 32 | pass_idx);
            order.shuffle(&mut rng);
            let (gain, moves) = level.pass(&order, &mut node_to_comm, &mut sigma_tot);
            if moves > 0 {
                improved_level = true;
                let mut flat: Vec<usize> = membership.iter().map(|&s| node_to_comm[s]).collect();
                densify(&mut flat);
                trace
                    .pass_modularity
                    .push(modularity(g, &flat).expect("complete assignment"));
            }
            pass_idx += 1;
            if gain < PASS_GAIN_EPS {
                break;
            }
        }

        if !improved_level {
            break;
        }
        let comm_count = densify(&mut node_to_comm);
        for m in membership.iter_mut() {
            *m = node_to_comm[*m];
        }
        if comm_count == ln {
            break;
        }
        level = level.aggregate(&node_to_comm, comm_count);
        level_idx += 1;
    }

    let community_count = densify(&mut membership);
    let q = modularity(g, &membership)?;
    Ok((
        CommunityPartition {
            assignment: membership,
            community_count,
            modularity: q,
            seed,
        },
        trace,
    ))
}

/// TSV export: header comment with modularity and seed, then
/// `user_id<TAB>community_id` in dense node order.
pub fn write_partition_tsv<W: Write>(
    g: &SocialGraph,
    partition: &CommunityPartition,
    mut w: W,
) -> Result<()> {
    writeln!(
        w,
        "# modularity={} seed={}",
        partition.modularity, partition.seed
    )?;
    for v in g.nodes() {
        writeln!(w, "{}\t{}", g.source_id(v), partition.assignment[v.index()])?;
    }
    Ok(())
}

/// Read a partition export back against the same graph; modularity is
/// recomputed rather than trusted from the header.
pub fn read_partition_tsv(path: &Path, g: &SocialGraph) -> Result<CommunityPartition> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let origin = path.display().to_string();
    let mut assignment = vec![usize::MAX; g.node_count()];
    let mut seed = 0u64;
    let mut seen = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            for field in rest.split_whitespace() {
                if let Some(s) = field.strip_prefix("seed=") {
                    seed = s.parse().unwrap_or(0);
                }
            }
            continue;
        }
        let mut cols = trimmed.split('\t');
        let err = |msg: String| Error::Parse {
            path: origin.clone(),
            line: lineno + 1,
            message: msg,
        };
        let user: u64 = cols
            .next()
            .ok_or_else(|| err("missing user id".into()))?
            .parse()
            .map_err(|e| err(format!("bad user id: {e}")))?;
        let comm: usize = cols
            .next()
            .ok_or_else(|| err("missing community id".into()))?
            .parse()
            .map_err(|e| err(format!("bad community id: {e}")))?;
        let v = g
            .node_id(user)
            .ok_or_else(|| err(format!("user {user} not in graph")))?;
        if assignment[v.index()] == usize::MAX {
            seen += 1;
        }
        assignment[v.index()] = comm;
    }
    if seen != g.node_count() {
        return Err(Error::PartialPartition {
            got: seen,
            expected: g.node_count(),
        });
    }
    let community_count = densify(&mut assignment);
    let q = modularity(g, &assignment)?;
    Ok(CommunityPartition {
        assignment,
        community_count,
        modularity: q,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::RepostEvent;

    fn graph_from(pairs: &[(u64, u64)]) -> SocialGraph {
        let events: Vec<RepostEvent> = pairs
            .iter()
            .map(|&(p, r)| RepostEvent {
                poster: p,
                reposter: r,
                time: 0,
            })
            .collect();
        SocialGraph::from_events(&events)
    }

    fn clique(ids: std::ops::Range<u64>) -> Vec<(u64, u64)> {
        let ids: Vec<u64> = ids.collect();
        let mut out = Vec::new();
        for i in 0..ids.len() {
            for j in (i + 1)..ids.len() {
                out.push((ids[i], ids[j]));
            }
        }
        out
    }

    #[test]
    fn one_community_has_zero_modularity() {
        let g = graph_from(&[(1, 2), (2, 3), (3, 1), (3, 4)]);
        // e_c = 1 and a_c = 1, so Q = 1 − 1 = 0
        let q = modularity(&g, &vec![0; g.node_count()]).unwrap();
        assert_eq!(q, 0.0);
    }

    #[test]
    fn two_disjoint_triangles_split_scores_exactly_half() {
        let mut edges = vec![(1, 2), (2, 3), (3, 1)];
        edges.extend([(4, 5), (5, 6), (6, 4)]);
        let g = graph_from(&edges);
        let assignment: Vec<usize> = g
            .nodes()
            .map(|v| usize::from(g.source_id(v) > 3))
            .collect();
        assert_eq!(modularity(&g, &assignment).unwrap(), 0.5);
    }

    #[test]
    fn singleton_partition_is_non_positive() {
        let g = graph_from(&[(1, 2), (2, 3), (3, 1)]);
        let assignment: Vec<usize> = (0..g.node_count()).collect();
        let q = modularity(&g, &assignment).unwrap();
        // triangle: each k_v = 2, 2m = 6 → −3·(1/3)² = −1/3
        assert!((q - (-1.0 / 3.0)).abs() < 1e-12);
        assert!(q <= 0.0);
    }

    #[test]
    fn partial_assignment_is_an_error() {
        let g = graph_from(&[(1, 2)]);
        assert!(matches!(
            modularity(&g, &[0]),
            Err(Error::PartialPartition { got: 1, expected: 2 })
        ));
    }

    /// Enumerate all partitions of `n` items into at most `max_blocks`
    /// blocks via restricted growth strings.
    fn enumerate_partitions(n: usize, max_blocks: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut current = vec![0usize; n];
        fn rec(
            i: usize,
            used: usize,
            max_blocks: usize,
            current: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if i == current.len() {
                out.push(current.clone());
                return;
            }
            for b in 0..=used.min(max_blocks - 1) {
                current[i] = b;
                let next_used = if b == used { used + 1 } else { used };
                rec(i + 1, next_used, max_blocks, current, out);
            }
        }
        rec(0, 0, max_blocks, &mut current, &mut out);
        out
    }

    #[test]
    fn louvain_recovers_two_cliques_and_matches_brute_force_optimum() {
        let mut edges = clique(0..5);
        edges.extend(clique(10..15));
        let g = graph_from(&edges);

        let part = louvain(&g, 42).unwrap();
        assert_eq!(part.community_count, 2);
        // every clique lands in a single community
        let c0 = part.community_of(g.node_id(0).unwrap());
        for id in 0..5 {
            assert_eq!(part.community_of(g.node_id(id).unwrap()), c0);
        }
        let c1 = part.community_of(g.node_id(10).unwrap());
        assert_ne!(c0, c1);
        for id in 10..15 {
            assert_eq!(part.community_of(g.node_id(id).unwrap()), c1);
        }

        // brute force over all partitions into ≤3 blocks confirms optimality
        let mut best = f64::NEG_INFINITY;
        for cand in enumerate_partitions(g.node_count(), 3) {
            best = best.max(modularity(&g, &cand).unwrap());
        }
        assert!((part.modularity - best).abs() < 1e-12);
    }

    #[test]
    fn single_edge_merges_into_one_community() {
        let g = graph_from(&[(1, 2)]);
        let part = louvain(&g, 0).unwrap();
        assert_eq!(part.community_count, 1);
        assert_eq!(part.modularity, 0.0);
    }

    #[test]
    fn ring_of_thirty_is_fully_assigned_with_positive_modularity() {
        let edges: Vec<(u64, u64)> = (0..30).map(|i| (i, (i + 1) % 30)).collect();
        let g = graph_from(&edges);
        let part = louvain(&g, 7).unwrap();
        assert_eq!(part.assignment.len(), 30);
        assert!(part.community_count >= 1);
        assert!(part.modularity > 0.0);
    }

    #[test]
    fn empty_graph_is_an_error() {
        let g = SocialGraph::from_events(&[]);
        assert!(matches!(louvain(&g, 1), Err(Error::EmptyGraph)));
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let mut edges = clique(0..6);
        edges.extend(clique(20..26));
        edges.push((0, 20));
        let g = graph_from(&edges);
        let a = louvain(&g, 123).unwrap();
        let b = louvain(&g, 123).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn passes_strictly_increase_modularity() {
        let mut edges = clique(0..6);
        edges.extend(clique(20..26));
        edges.extend(clique(40..46));
        edges.push((0, 20));
        edges.push((20, 40));
        let g = graph_from(&edges);
        let (part, trace) = louvain_traced(&g, 5).unwrap();
        for w in trace.pass_modularity.windows(2) {
            assert!(w[1] > w[0] - 1e-12, "pass modularity dropped: {w:?}");
        }
        let singleton: Vec<usize> = (0..g.node_count()).collect();
        assert!(part.modularity >= modularity(&g, &singleton).unwrap());
    }

    #[test]
    fn partition_tsv_round_trip() {
        let mut edges = clique(0..5);
        edges.extend(clique(10..15));
        let g = graph_from(&edges);
        let part = louvain(&g, 9).unwrap();
        let mut buf = Vec::new();
        write_partition_tsv(&g, &part, &mut buf).unwrap();

        let dir = std::env::temp_dir().join("socinf-test-partition");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("partition.tsv");
        std::fs::write(&path, &buf).unwrap();
        let back = read_partition_tsv(&path, &g).unwrap();
        assert_eq!(back.assignment, part.assignment);
        assert_eq!(back.seed, part.seed);
        assert!((back.modularity - part.modularity).abs() < 1e-12);
    }
}
