//! Directed influence graph built from repost events.
//!
//! An edge (v, v') exists when the source data contains at least one
//! microblog posted by v that was reposted by v'. Nodes are renumbered
//! densely in order of first appearance; the mapping back to source user
//! ids is kept for export.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Dense node index into the graph's adjacency arrays.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(raw: u32) -> Self {
        NodeId(raw)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn raw(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// One repost observation: `reposter` reposted a microblog of `poster`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepostEvent {
    pub poster: u64,
    pub reposter: u64,
    pub time: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
}

/// Counters from graph construction, kept for diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub events: usize,
    pub self_loops_dropped: usize,
    /// Repost events beyond the first for an already known (poster, reposter) pair.
    pub duplicate_reposts: usize,
}

/// Immutable directed influence graph with both adjacency directions.
pub struct SocialGraph {
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    /// Symmetrized neighbor lists (union of in and out), used by community
    /// detection and ego-network measures.
    sym_adj: Vec<Vec<NodeId>>,
    edge_count: usize,
    sym_edge_count: usize,
    source_ids: Vec<u64>,
    index: HashMap<u64, NodeId>,
    stats: BuildStats,
}

impl SocialGraph {
    /// Build the graph from repost events: one directed edge per distinct
    /// (poster → reposter) pair. Self-reposts are dropped and counted.
    /// Node numbering follows first appearance in the event sequence.
    pub fn from_events(events: &[RepostEvent]) -> SocialGraph {
        let mut source_ids: Vec<u64> = Vec::new();
        let mut index: HashMap<u64, NodeId> = HashMap::new();
        let mut stats = BuildStats {
            events: events.len(),
            ..BuildStats::default()
        };

        let mut intern = |id: u64, source_ids: &mut Vec<u64>, index: &mut HashMap<u64, NodeId>| {
            *index.entry(id).or_insert_with(|| {
                let n = NodeId(source_ids.len() as u32);
                source_ids.push(id);
                n
            })
        };

        let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(events.len());
        for ev in events {
            if ev.poster == ev.reposter {
                stats.self_loops_dropped += 1;
                continue;
            }
            let p = intern(ev.poster, &mut source_ids, &mut index);
            let r = intern(ev.reposter, &mut source_ids, &mut index);
            edges.push((p, r));
        }

        let n = source_ids.len();
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        stats.duplicate_reposts = before - edges.len();

        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(p, r) in &edges {
            out_adj[p.index()].push(r);
            in_adj[r.index()].push(p);
        }
        // out lists are sorted by construction; in lists need it
        for l in &mut in_adj {
            l.sort_unstable();
        }

        let mut sym_adj = vec![Vec::new(); n];
        let mut sym_edge_count = 0;
        for v in 0..n {
            let mut merged: Vec<NodeId> = out_adj[v]
                .iter()
                .chain(in_adj[v].iter())
                .copied()
                .collect();
            merged.sort_unstable();
            merged.dedup();
            sym_edge_count += merged.len();
            sym_adj[v] = merged;
        }
        sym_edge_count /= 2;

        SocialGraph {
            out_adj,
            in_adj,
            sym_adj,
            edge_count: edges.len(),
            sym_edge_count,
            source_ids,
            index,
            stats,
        }
    }

    pub fn node_count(&self) -> usize {
        self.source_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Number of undirected edges after symmetrization.
    pub fn sym_edge_count(&self) -> usize {
        self.sym_edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.source_ids.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.source_ids.len() as u32).map(NodeId)
    }

    pub fn stats(&self) -> BuildStats {
        self.stats
    }

    fn check(&self, v: NodeId) -> Result<()> {
        if v.index() < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidNode {
                node: v.0,
                node_count: self.node_count(),
            })
        }
    }

    /// η_v^in or η_v^out, sorted by node id.
    pub fn neighbors(&self, v: NodeId, direction: Direction) -> Result<&[NodeId]> {
        self.check(v)?;
        Ok(match direction {
            Direction::In => &self.in_adj[v.index()],
            Direction::Out => &self.out_adj[v.index()],
        })
    }

    pub fn degree(&self, v: NodeId, direction: Direction) -> Result<usize> {
        Ok(self.neighbors(v, direction)?.len())
    }

    pub(crate) fn in_of(&self, v: NodeId) -> &[NodeId] {
        &self.in_adj[v.index()]
    }

    pub(crate) fn out_of(&self, v: NodeId) -> &[NodeId] {
        &self.out_adj[v.index()]
    }

    pub(crate) fn sym_of(&self, v: NodeId) -> &[NodeId] {
        &self.sym_adj[v.index()]
    }

    /// Directed edge test.
    pub fn has_edge(&self, from: NodeId, to: NodeId) -> bool {
        from.index() < self.node_count() && self.out_adj[from.index()].binary_search(&to).is_ok()
    }

    /// Undirected (symmetrized) edge test.
    pub fn has_sym_edge(&self, a: NodeId, b: NodeId) -> bool {
        a.index() < self.node_count() && self.sym_adj[a.index()].binary_search(&b).is_ok()
    }

    pub fn node_id(&self, source: u64) -> Option<NodeId> {
        self.index.get(&source).copied()
    }

    pub fn source_id(&self, v: NodeId) -> u64 {
        self.source_ids[v.index()]
    }

    /// Edge list with original source ids, sorted by dense node order.
    pub fn edges_by_source_id(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for v in self.nodes() {
            for &w in self.out_of(v) {
                out.push((self.source_id(v), self.source_id(w)));
            }
        }
        out
    }

    /// TSV export: `poster_id<TAB>reposter_id` per edge.
    pub fn write_edges_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        for (p, r) in self.edges_by_source_id() {
            writeln!(w, "{p}\t{r}")?;
        }
        Ok(())
    }
}

/// Parse input format A: one repost event per line,
/// `poster_id<TAB>reposter_id<TAB>repost_unix_time`.
pub fn parse_events_tsv<R: BufRead>(reader: R, origin: &str) -> Result<Vec<RepostEvent>> {
    let mut events = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut cols = trimmed.split('\t');
        let parse = |cols: &mut std::str::Split<'_, char>, what: &str| -> Result<u64> {
            cols.next()
                .ok_or_else(|| parse_err(origin, lineno, format!("missing {what}")))?
                .trim()
                .parse::<u64>()
                .map_err(|e| parse_err(origin, lineno, format!("bad {what}: {e}")))
        };
        let poster = parse(&mut cols, "poster id")?;
        let reposter = parse(&mut cols, "reposter id")?;
        let time = cols
            .next()
            .ok_or_else(|| parse_err(origin, lineno, "missing repost time".into()))?
            .trim()
            .parse::<i64>()
            .map_err(|e| parse_err(origin, lineno, format!("bad repost time: {e}")))?;
        events.push(RepostEvent {
            poster,
            reposter,
            time,
        });
    }
    Ok(events)
}

pub fn read_events_tsv(path: &Path) -> Result<Vec<RepostEvent>> {
    let file = std::fs::File::open(path)?;
    parse_events_tsv(std::io::BufReader::new(file), &path.display().to_string())
}

/// Rebuild a graph from an exported edge list (`poster<TAB>reposter` lines).
pub fn read_edges_tsv(path: &Path) -> Result<SocialGraph> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let origin = path.display().to_string();
    let mut events = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut cols = trimmed.split('\t');
        let mut next = |what: &str| -> Result<u64> {
            cols.next()
                .ok_or_else(|| parse_err(&origin, lineno, format!("missing {what}")))?
                .trim()
                .parse::<u64>()
                .map_err(|e| parse_err(&origin, lineno, format!("bad {what}: {e}")))
        };
        let poster = next("poster id")?;
        let reposter = next("reposter id")?;
        events.push(RepostEvent {
            poster,
            reposter,
            time: 0,
        });
    }
    Ok(SocialGraph::from_events(&events))
}

fn parse_err(path: &str, lineno: usize, message: String) -> Error {
    Error::Parse {
        path: path.to_string(),
        line: lineno + 1,
        message,
    }
}
