//! Vertex maps on trees and on general graphs.
//!
//! Edges are stored 0-indexed with an orientation `(tail, head)`; vertices are
//! labeled `1..=v` at the API. A route is a sequence of oriented edges
//! `(edge, sign)`, `+` when the edge is traversed from tail to head.

use std::collections::VecDeque;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DynError, Result};
use crate::markov::{MarkovGraph, Sign};
use crate::orders::PeriodClass;
use crate::permutation::Permutation;
use crate::walks::{
    find_negative_nonrepetitive, forcing_walk_in_graph, negative_power_of_two_walk, SearchCaps, Walk,
};
use crate::IntMatrix;

/// Sequence of oriented edges, 0-indexed.
pub type Route = Vec<(usize, Sign)>;

/// A tree on vertices `1..=v` with `v - 1` oriented edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    v: usize,
    edges: Vec<(usize, usize)>,
    // adj[x] = (neighbour, edge index), 0-indexed vertices
    adj: Vec<Vec<(usize, usize)>>,
}

impl Tree {
    /// Edges given as unordered pairs; each is oriented from the smaller label
    /// to the larger one.
    pub fn new(v: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let oriented: Vec<_> = pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        Tree::with_orientation(v, &oriented)
    }

    /// Edges kept in the orientation given.
    pub fn with_orientation(v: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if v == 0 {
            return Err(DynError::domain("a tree needs at least one vertex"));
        }
        if edges.len() != v - 1 {
            return Err(DynError::domain(format!(
                "a tree on {v} vertices has {} edges, got {}",
                v - 1,
                edges.len()
            )));
        }
        let mut adj = vec![Vec::new(); v];
        for (idx, &(a, b)) in edges.iter().enumerate() {
            if a == 0 || b == 0 || a > v || b > v {
                return Err(DynError::domain(format!("edge E{} = ({a},{b}) leaves 1..{v}", idx + 1)));
            }
            if a == b {
                return Err(DynError::domain(format!("edge E{} is a loop at {a}", idx + 1)));
            }
            adj[a - 1].push((b - 1, idx));
            adj[b - 1].push((a - 1, idx));
        }
        let mut seen = vec![false; v];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    reached += 1;
                    queue.push_back(y);
                }
            }
        }
        if reached != v {
            return Err(DynError::domain("edges do not form a connected graph"));
        }
        Ok(Tree {
            v,
            edges: edges.to_vec(),
            adj,
        })
    }

    /// The path `1 - 2 - … - n` with `E_i = (i, i+1)`.
    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        Tree::new(n, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Oriented edges `(tail, head)`, 1-indexed labels.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// The unique simple path from `u` to `w`.
    pub fn reduced_path(&self, u: usize, w: usize) -> Result<Route> {
        for x in [u, w] {
            if x == 0 || x > self.v {
                return Err(DynError::domain(format!("vertex {x} not in 1..{}", self.v)));
            }
        }
        let (u, w) = (u - 1, w - 1);
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.v];
        let mut seen = vec![false; self.v];
        seen[u] = true;
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            if x == w {
                break;
            }
            for &(y, e) in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((x, e));
                    queue.push_back(y);
                }
            }
        }
        let mut route = Vec::new();
        let mut cur = w;
        while let Some((prev, e)) = parent[cur] {
            let sign = if self.edges[e].0 - 1 == prev {
                Sign::Plus
            } else {
                Sign::Minus
            };
            route.push((e, sign));
            cur = prev;
        }
        route.reverse();
        Ok(route)
    }
}

/// A permutation of the vertices of a tree, extended across each edge along
/// the reduced path between the images of its endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeVertexMap {
    tree: Tree,
    perm: Permutation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TreeFile {
    v: usize,
    edges: Vec<[usize; 2]>,
    perm: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphFile {
    v: usize,
    edges: Vec<[usize; 2]>,
    perm: Vec<usize>,
    routes: Vec<Vec<i64>>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| DynError::Parse(e.to_string()))
}

impl TreeVertexMap {
    pub fn new(tree: Tree, perm: Permutation) -> Result<Self> {
        if perm.len() != tree.v {
            return Err(DynError::domain(format!(
                "permutation acts on {} points but the tree has {} vertices",
                perm.len(),
                tree.v
            )));
        }
        Ok(TreeVertexMap { tree, perm })
    }

    /// Reads `{"v": …, "edges": [[a, b], …], "perm": [images]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: TreeFile = parse_json(text)?;
        let pairs: Vec<_> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        let tree = Tree::new(file.v, &pairs)?;
        TreeVertexMap::new(tree, Permutation::from_image(&file.perm)?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TreeFile {
            v: self.tree.v,
            edges: self.tree.edges.iter().map(|&(a, b)| [a, b]).collect(),
            perm: self.perm.image(),
        })
        .expect("plain data serializes")
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    /// Image route of every edge.
    pub fn routes(&self) -> Vec<Route> {
        self.tree
            .edges
            .iter()
            .map(|&(a, b)| {
                self.tree
                    .reduced_path(self.perm.apply(a), self.perm.apply(b))
                    .expect("permutation images are vertices")
            })
            .collect()
    }

    pub fn graph(&self) -> Result<MarkovGraph> {
        edge_graph(self.tree.edge_count(), &self.routes())
    }

    /// `(M, OM)`.
    pub fn matrices(&self) -> Result<(IntMatrix, IntMatrix)> {
        let om = route_matrix(self.tree.edge_count(), &self.routes())?;
        Ok((om.abs(), om))
    }
}

fn edge_graph(e: usize, routes: &[Route]) -> Result<MarkovGraph> {
    if e == 0 {
        return Err(DynError::domain("no edges, so no Markov graph"));
    }
    MarkovGraph::from_routes(e, routes)
}

/// `OM(i, j)` = signed occurrences of `E_i` in the route of `E_j`.
pub fn route_matrix(e: usize, routes: &[Route]) -> Result<IntMatrix> {
    if routes.len() != e {
        return Err(DynError::Dimension {
            left: e,
            right: routes.len(),
        });
    }
    let mut om = IntMatrix::zeros(e);
    for (j, route) in routes.iter().enumerate() {
        for &(i, s) in route {
            if i >= e {
                return Err(DynError::contract(format!("route mentions E{} of {e}", i + 1)));
            }
            *om.get_mut(i, j) += s.value();
        }
    }
    Ok(om)
}

/// `(M, OM)` of a tree vertex map.
pub fn tree_matrices(tvm: &TreeVertexMap) -> Result<(IntMatrix, IntMatrix)> {
    tvm.matrices()
}

/// Cancels `±E ∓E` pairs until none remain.
pub fn reduce_route(route: &[(usize, Sign)]) -> Route {
    let mut out: Route = Vec::with_capacity(route.len());
    for &(e, s) in route {
        match out.last() {
            Some(&(f, t)) if f == e && t != s => {
                out.pop();
            }
            _ => out.push((e, s)),
        }
    }
    out
}

/// Routes of `outer ∘ inner`: substitute the `outer` route of each edge met
/// along an `inner` route (reversed on `-` steps), then reduce.
pub fn compose_routes(outer: &[Route], inner: &[Route]) -> Vec<Route> {
    inner
        .iter()
        .map(|route| {
            let mut expanded = Vec::new();
            for &(i, s) in route {
                match s {
                    Sign::Plus => expanded.extend(outer[i].iter().copied()),
                    Sign::Minus => expanded.extend(outer[i].iter().rev().map(|&(e, t)| (e, t * Sign::Minus))),
                }
            }
            reduce_route(&expanded)
        })
        .collect()
}

/// Routes of the `k`-th iterate, `k ≥ 1`.
pub fn iterate_routes(routes: &[Route], k: usize) -> Result<Vec<Route>> {
    if k == 0 {
        return Err(DynError::domain("iterate count must be positive"));
    }
    let mut cur = routes.to_vec();
    for _ in 1..k {
        cur = compose_routes(routes, &cur);
    }
    Ok(cur)
}

/// Trace of `OM` together with the dot count behind the `-1` identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DotCertificate {
    pub trace: i64,
    /// Dots placed on each edge: one per moved vertex, on the first edge of
    /// its path to its image.
    pub dots: Vec<usize>,
    pub total: usize,
    pub diagonal: Vec<i64>,
}

impl DotCertificate {
    /// Whether each edge carries `1 - OM_ii` dots.
    pub fn matches_diagonal(&self) -> bool {
        self.dots
            .iter()
            .zip(&self.diagonal)
            .all(|(&d, &m)| d as i64 == 1 - m)
    }
}

pub fn tree_trace_check(tvm: &TreeVertexMap) -> Result<DotCertificate> {
    let (_, om) = tvm.matrices()?;
    let diagonal: Vec<i64> = om
        .diagonal()
        .iter()
        .map(|x| x.to_i64().ok_or_else(|| DynError::invariant("tree matrix entry out of range")))
        .collect::<Result<_>>()?;
    let mut dots = vec![0usize; tvm.tree.edge_count()];
    for x in 1..=tvm.tree.v {
        let y = tvm.perm.apply(x);
        if y != x {
            let path = tvm.tree.reduced_path(x, y)?;
            dots[path[0].0] += 1;
        }
    }
    let total = dots.iter().sum();
    Ok(DotCertificate {
        trace: diagonal.iter().sum(),
        dots,
        total,
        diagonal,
    })
}

/// A negative non-repetitive closed walk of length `m` in the Markov graph
/// of a tree map whose vertices form one orbit.
///
/// Powers of two use the least negative walk of that length; `m = 2^k·s`
/// with `v = 2^k·r`, `s > r` goes through the same splice-and-reorder
/// construction as for interval maps; anything else falls back to an
/// exhaustive search under `caps`.
pub fn tree_walk_witnesses(tvm: &TreeVertexMap, m: usize, caps: SearchCaps) -> Result<Option<Walk>> {
    let v = tvm.tree.v;
    if v < 2 || !tvm.perm.is_full_cycle() {
        return Err(DynError::domain("the vertices must form a single periodic orbit"));
    }
    if m == 0 {
        return Err(DynError::domain("walk length must be positive"));
    }
    let g = tvm.graph()?;
    if m.is_power_of_two() && m % v != 0 {
        if let Some(w) = negative_power_of_two_walk(&g, m.trailing_zeros())? {
            return Ok(Some(w));
        }
    }
    let vc = PeriodClass::of(v as u64);
    if vc.s > 1 && m % (1usize << vc.k) == 0 {
        let s = (m >> vc.k) as u64;
        if s > vc.s {
            return forcing_walk_in_graph(&g, vc.k, vc.s, s).map(Some);
        }
    }
    find_negative_nonrepetitive(&g, m, caps)
}

/// A vertex map on a connected graph with explicit edge routes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphVertexMap {
    v: usize,
    edges: Vec<(usize, usize)>,
    perm: Permutation,
    routes: Vec<Route>,
}

impl GraphVertexMap {
    /// `routes[j]` lists signed 1-indexed edge ids (`-3` is `E_3` against its
    /// orientation).
    pub fn new(v: usize, edges: &[(usize, usize)], perm: Permutation, routes: &[Vec<i64>]) -> Result<Self> {
        if v == 0 || edges.is_empty() {
            return Err(DynError::domain("a graph map needs vertices and edges"));
        }
        if perm.len() != v {
            return Err(DynError::domain(format!("permutation acts on {} points, graph has {v}", perm.len())));
        }
        if routes.len() != edges.len() {
            return Err(DynError::Validation(format!(
                "{} edges but {} routes",
                edges.len(),
                routes.len()
            )));
        }
        let mut adj = vec![Vec::new(); v];
        for (idx, &(a, b)) in edges.iter().enumerate() {
            if a == 0 || b == 0 || a > v || b > v {
                return Err(DynError::domain(format!("edge E{} = ({a},{b}) leaves 1..{v}", idx + 1)));
            }
            adj[a - 1].push(b - 1);
            adj[b - 1].push(a - 1);
        }
        let mut seen = vec![false; v];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(DynError::domain("graph is not connected"));
        }
        let mut parsed = Vec::with_capacity(routes.len());
        for (j, raw) in routes.iter().enumerate() {
            let mut route = Route::with_capacity(raw.len());
            for &id in raw {
                let i = id.unsigned_abs() as usize;
                if id == 0 || i > edges.len() {
                    return Err(DynError::Validation(format!("route of E{} names unknown edge {id}", j + 1)));
                }
                route.push((i - 1, if id > 0 { Sign::Plus } else { Sign::Minus }));
            }
            let (tail, head) = edges[j];
            let mut at = perm.apply(tail);
            for &(i, s) in &route {
                let (a, b) = edges[i];
                let (from, to) = if s == Sign::Plus { (a, b) } else { (b, a) };
                if from != at {
                    return Err(DynError::Validation(format!(
                        "route of E{} leaves vertex {at} along E{} which starts at {from}",
                        j + 1,
                        i + 1
                    )));
                }
                at = to;
            }
            if at != perm.apply(head) {
                return Err(DynError::Validation(format!(
                    "route of E{} ends at {at}, expected {}",
                    j + 1,
                    perm.apply(head)
                )));
            }
            if reduce_route(&route).len() != route.len() {
                return Err(DynError::Validation(format!("route of E{} backtracks", j + 1)));
            }
            parsed.push(route);
        }
        Ok(GraphVertexMap {
            v,
            edges: edges.to_vec(),
            perm,
            routes: parsed,
        })
    }

    /// Reads the tree format plus `"routes": [[signed edge ids], …]`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = parse_json(text)?;
        let edges: Vec<_> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        GraphVertexMap::new(file.v, &edges, Permutation::from_image(&file.perm)?, &file.routes)
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn routes(&self) -> &[Route] {
        &self.routes
    }

    pub fn graph(&self) -> Result<MarkovGraph> {
        edge_graph(self.edges.len(), &self.routes)
    }

    /// `(M, OM)`; `M` counts occurrences without sign.
    pub fn matrices(&self) -> Result<(IntMatrix, IntMatrix)> {
        let e = self.edges.len();
        let om = route_matrix(e, &self.routes)?;
        let mut m = IntMatrix::zeros(e);
        for (j, route) in self.routes.iter().enumerate() {
            for &(i, _) in route {
                *m.get_mut(i, j) += 1;
            }
        }
        Ok((m, om))
    }
}

pub fn graph_matrices(gvm: &GraphVertexMap) -> Result<(IntMatrix, IntMatrix)> {
    gvm.matrices()
}

/// Decodes a Prüfer sequence over labels `1..=v` (length `v - 2`).
pub fn prufer_decode(v: usize, code: &[usize]) -> Result<Tree> {
    if v < 2 || code.len() != v - 2 {
        return Err(DynError::domain(format!("a Prüfer code for {v} vertices has length {}", v.saturating_sub(2))));
    }
    let mut degree = vec![1usize; v + 1];
    for &c in code {
        if c == 0 || c > v {
            return Err(DynError::domain(format!("Prüfer entry {c} outside 1..{v}")));
        }
        degree[c] += 1;
    }
    let mut edges = Vec::with_capacity(v - 1);
    for &c in code {
        let leaf = (1..=v).find(|&x| degree[x] == 1).expect("a leaf always exists");
        edges.push((leaf, c));
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let rest: Vec<usize> = (1..=v).filter(|&x| degree[x] == 1).collect();
    edges.push((rest[0], rest[1]));
    Tree::new(v, &edges)
}

/// Every labeled tree on `v ≥ 2` vertices, in Prüfer-code order.
pub fn all_labeled_trees(v: usize) -> Result<impl Iterator<Item = Tree>> {
    if v < 2 {
        return Err(DynError::domain("labeled trees are enumerated for v >= 2"));
    }
    let len = v - 2;
    let total = v.pow(len as u32);
    Ok((0..total).map(move |mut n| {
        let mut code = vec![0; len];
        for slot in code.iter_mut() {
            *slot = n % v + 1;
            n /= v;
        }
        prufer_decode(v, &code).expect("codes in range decode")
    }))
}

pub fn random_tree<R: Rng + ?Sized>(v: usize, rng: &mut R) -> Result<Tree> {
    if v < 2 {
        return Tree::new(v, &[]);
    }
    let code: Vec<usize> = (0..v - 2).map(|_| rng.gen_range(1..=v)).collect();
    prufer_decode(v, &code)
}

/// Uniform fixed-point-free permutation of `1..=v`, `v ≥ 2`.
pub fn random_derangement<R: Rng + ?Sized>(v: usize, rng: &mut R) -> Result<Permutation> {
    if v < 2 {
        return Err(DynError::domain("no derangement on fewer than two points"));
    }
    let mut image: Vec<usize> = (1..=v).collect();
    loop {
        image.shuffle(rng);
        if image.iter().enumerate().all(|(i, &x)| x != i + 1) {
            return Permutation::from_image(&image);
        }
    }
}
