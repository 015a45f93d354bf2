//! Backtracking isomorphism search for small vertex-coloured graphs.
//!
//! Colour refinement on the disjoint union prunes candidates; the search
//! then extends a partial map along a BFS order so every new vertex after
//! the first of its component has an already mapped neighbour.

use std::collections::{BTreeMap, VecDeque};

use crate::complex::{Complex, SignedGraph};

#[derive(Clone, Debug)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    colors: Vec<u32>,
}

impl Graph {
    /// Simple graph from an edge list; duplicate edges are ignored.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        Graph { adj, colors: vec![0; n] }
    }

    pub fn with_colors(mut self, colors: Vec<u32>) -> Self {
        assert_eq!(colors.len(), self.adj.len());
        self.colors = colors;
        self
    }

    pub fn from_signed(g: &SignedGraph) -> Self {
        Graph::new(g.order(), g.edges().iter().map(|&(a, b, _)| (a, b)))
    }

    /// Vertex-facet incidence graph, coloured by kind and facet dimension.
    pub fn incidence(k: &Complex) -> Self {
        let verts = k.vertices();
        let pos: BTreeMap<u32, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let facets = k.facets();
        let mut colors = vec![0u32; verts.len()];
        let mut edges = Vec::new();
        for (j, f) in facets.iter().enumerate() {
            colors.push(f.len() as u32);
            for v in f {
                edges.push((pos[v], verts.len() + j));
            }
        }
        Graph::new(verts.len() + facets.len(), edges).with_colors(colors)
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }
}

/// Stable colour refinement of `g` and `h` together.
fn refine(g: &Graph, h: &Graph) -> (Vec<u32>, Vec<u32>) {
    let n = g.order();
    let mut cg: Vec<u32> = Vec::new();
    let mut ch: Vec<u32> = Vec::new();
    let mut table: BTreeMap<(u32, usize), u32> = BTreeMap::new();
    for (graph, out) in [(g, &mut cg), (h, &mut ch)] {
        for v in 0..graph.order() {
            let key = (graph.colors[v], graph.adj[v].len());
            let next = table.len() as u32;
            out.push(*table.entry(key).or_insert(next));
        }
    }
    let mut classes = table.len();
    loop {
        let mut table: BTreeMap<(u32, Vec<u32>), u32> = BTreeMap::new();
        let mut ng = Vec::with_capacity(n);
        let mut nh = Vec::with_capacity(n);
        for (graph, cur, out) in [(g, &cg, &mut ng), (h, &ch, &mut nh)] {
            for v in 0..graph.order() {
                let mut nb: Vec<u32> = graph.adj[v].iter().map(|&w| cur[w]).collect();
                nb.sort_unstable();
                let next = table.len() as u32;
                out.push(*table.entry((cur[v], nb)).or_insert(next));
            }
        }
        cg = ng;
        ch = nh;
        if table.len() == classes {
            return (cg, ch);
        }
        classes = table.len();
    }
}

/// An isomorphism `g -> h` as a vertex map, if one exists.
pub fn find_isomorphism(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    let n = g.order();
    if n != h.order() || g.edge_count() != h.edge_count() {
        return None;
    }
    let (cg, ch) = refine(g, h);
    let mut hg = cg.clone();
    let mut hh = ch.clone();
    hg.sort_unstable();
    hh.sort_unstable();
    if hg != hh {
        return None;
    }
    let mut class_size: BTreeMap<u32, usize> = BTreeMap::new();
    for &c in &cg {
        *class_size.entry(c).or_default() += 1;
    }

    // BFS order over g, each component rooted at a vertex of a rarest colour
    let mut order = Vec::with_capacity(n);
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut roots: Vec<usize> = (0..n).collect();
    roots.sort_by_key(|&v| (class_size[&cg[v]], v));
    for &r in &roots {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        let mut q = VecDeque::from([r]);
        while let Some(u) = q.pop_front() {
            order.push(u);
            for &w in &g.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = u;
                    q.push_back(w);
                }
            }
        }
    }

    let mut by_color: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (v, &c) in ch.iter().enumerate() {
        by_color.entry(c).or_default().push(v);
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend(0, &order, &parent, g, h, &cg, &ch, &by_color, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn extend(
    depth: usize,
    order: &[usize],
    parent: &[usize],
    g: &Graph,
    h: &Graph,
    cg: &[u32],
    ch: &[u32],
    by_color: &BTreeMap<u32, Vec<usize>>,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let u = order[depth];
    let candidates: Vec<usize> = if parent[u] == usize::MAX {
        by_color[&cg[u]].clone()
    } else {
        h.adj[map[parent[u]]].iter().copied().filter(|&c| ch[c] == cg[u]).collect()
    };
    let mapped_nb: Vec<usize> = g.adj[u].iter().copied().filter(|&x| map[x] != usize::MAX).collect();
    for c in candidates {
        if used[c] {
            continue;
        }
        if !mapped_nb.iter().all(|&x| h.has_edge(c, map[x])) {
            continue;
        }
        let hc = h.adj[c].iter().filter(|&&y| used[y]).count();
        if hc != mapped_nb.len() {
            continue;
        }
        map[u] = c;
        used[c] = true;
        if extend(depth + 1, order, parent, g, h, cg, ch, by_color, map, used) {
            return true;
        }
        map[u] = usize::MAX;
        used[c] = false;
    }
    false
}

pub fn is_isomorphic(g: &Graph, h: &Graph) -> bool {
    find_isomorphism(g, h).is_some()
}

/// Checks that `map` is an isomorphism `g -> h`.
pub fn verify_map(g: &Graph, h: &Graph, map: &[usize]) -> bool {
    let n = g.order();
    if map.len() != n || h.order() != n {
        return false;
    }
    let mut hit = vec![false; n];
    for &m in map {
        if m >= n || hit[m] {
            return false;
        }
        hit[m] = true;
    }
    (0..n).all(|v| {
        g.colors[v] == h.colors[map[v]]
            && g.adj[v].len() == h.adj[map[v]].len()
            && g.adj[v].iter().all(|&w| h.has_edge(map[v], map[w]))
    })
}

pub fn complexes_isomorphic(a: &Complex, b: &Complex) -> bool {
    a.f_vector() == b.f_vector() && is_isomorphic(&Graph::incidence(a), &Graph::incidence(b))
}
