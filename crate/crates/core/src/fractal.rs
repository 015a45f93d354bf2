//! Dual graphs of iterated subdivisions of a simplex as iterated graph
//! substitutions.
//!
//! The level-0 graph is the top dual graph of one subdivided simplex with a
//! loop for every facet side lying on the simplex boundary. Each facet's
//! vertices are put in an order (its "positions") so that the vertex
//! opposite a face on boundary side `j` sits at position `j`. Level `k` is
//! then built from level `k-1` by placing one copy in every level-0 vertex
//! and joining copies across shared faces through the permutation action of
//! `S_{d+1}` on the previous level.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::complex::{Complex, Face, Vertex};
use crate::error::{Error, Result};
use crate::iso::{find_isomorphism, verify_map, Graph};
use crate::spectral::eigenvalues_int;
use crate::subdivide::{iterate, permutations, subdivide, Kind, SubdivisionResult, VertexKey};

pub type Perm = Vec<usize>;

pub fn compose(a: &[usize], b: &[usize]) -> Perm {
    b.iter().map(|&x| a[x]).collect()
}

pub fn inverse(a: &[usize]) -> Perm {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x] = i;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Incidence {
    /// Edge to another level-0 vertex.
    Edge(usize),
    /// Loop for boundary side `j`.
    Loop(usize),
}

#[derive(Clone, Debug)]
pub struct FractalData {
    pub kind: Kind,
    pub d: usize,
    pub subdivision: SubdivisionResult,
    /// Vertices of each facet of the subdivided simplex, by position.
    pub order: Vec<Vec<Vertex>>,
    /// `incidence[i][p]`: what lies across the face opposite position `p` of facet `i`.
    pub incidence: Vec<Vec<Incidence>>,
    pub edges: Vec<(usize, usize)>,
    /// `boundary[j]`: facets with a face on the side opposite simplex vertex `j`.
    pub boundary: Vec<Vec<usize>>,
    pub rho: BTreeMap<(usize, usize), Perm>,
    /// `S_{d+1}` in lexicographic order.
    pub perms: Vec<Perm>,
    /// `action[s][i]`: image of facet `i` under `perms[s]`.
    pub action: Vec<Vec<usize>>,
    /// `nu[s][i]`: index into `perms` of the position permutation induced on facet `i`.
    pub nu: Vec<Vec<usize>>,
}

impl FractalData {
    pub fn n_facets(&self) -> usize {
        self.order.len()
    }

    pub fn boundary_size(&self) -> usize {
        self.boundary[0].len()
    }

    /// Position at facet `i` of the face shared with facet `j`.
    pub fn kappa(&self, i: usize, j: usize) -> Option<usize> {
        self.incidence[i].iter().position(|&e| e == Incidence::Edge(j))
    }

    pub fn perm_index(&self, p: &[usize]) -> usize {
        self.perms.binary_search_by(|q| q.as_slice().cmp(p)).expect("permutation")
    }
}

fn transport(res: &SubdivisionResult, p: &[usize], v: Vertex) -> Option<Vertex> {
    let key = res.vertex_keys.iter().find(|(_, &x)| x == v)?.0;
    let mut moved: VertexKey = key.iter().map(|&(u, w)| (p[u as usize] as Vertex, w)).collect();
    moved.sort_unstable();
    res.vertex_keys.get(&moved).copied()
}

pub fn derive_fractal_data(kind: Kind, d: usize) -> Result<FractalData> {
    if d < 2 {
        return Err(Error::InvalidArgument("fractal data needs d >= 2".into()));
    }
    let res = subdivide(kind, &Complex::simplex(d))?;
    let child = &res.child;
    let facets: Vec<Face> = child.faces(d).to_vec();
    let n = facets.len();
    let cof = child.cofaces(d - 1);

    let side_of = |face: &Face| -> Option<usize> {
        let c = &res.carrier[face];
        (0..=d).find(|&j| !c.contains(&(j as Vertex)))
    };

    let mut order = Vec::with_capacity(n);
    let mut incidence = Vec::with_capacity(n);
    let mut boundary = vec![Vec::new(); d + 1];
    for (i, tau) in facets.iter().enumerate() {
        let mut pos: Vec<Option<Vertex>> = vec![None; d + 1];
        let mut rest = Vec::new();
        for &x in tau {
            let nu: Face = tau.iter().copied().filter(|&y| y != x).collect();
            let others = cof[child.index_of(&nu).unwrap()].len();
            if others == 1 {
                let j = side_of(&nu)
                    .ok_or_else(|| Error::Invariant(format!("boundary face {nu:?} off the simplex boundary")))?;
                if pos[j].is_some() {
                    return Err(Error::Invariant(format!("facet {tau:?} meets side {j} twice")));
                }
                pos[j] = Some(x);
                boundary[j].push(i);
            } else {
                rest.push(x);
            }
        }
        let mut rest = rest.into_iter();
        let ord: Vec<Vertex> = pos.into_iter().map(|p| p.or_else(|| rest.next()).unwrap()).collect();
        let inc: Vec<Incidence> = (0..=d)
            .map(|p| {
                let nu: Face = tau.iter().copied().filter(|&y| y != ord[p]).collect();
                match cof[child.index_of(&nu).unwrap()].iter().find(|c| c.0 != i) {
                    Some(&(j, _)) => Incidence::Edge(j),
                    None => Incidence::Loop(p),
                }
            })
            .collect();
        order.push(ord);
        incidence.push(inc);
    }
    let edges: Vec<(usize, usize)> = child.dual_graph(d)?.edge_set().into_iter().collect();

    let mut rho = BTreeMap::new();
    for &(i, j) in &edges {
        for (a, b) in [(i, j), (j, i)] {
            let apex_b = *order[b].iter().find(|x| !order[a].contains(x)).unwrap();
            let p: Perm = order[a]
                .iter()
                .map(|x| {
                    let target = if order[b].contains(x) { *x } else { apex_b };
                    order[b].iter().position(|&y| y == target).unwrap()
                })
                .collect();
            rho.insert((a, b), p);
        }
    }

    let perms = permutations(d + 1);
    let mut action = Vec::with_capacity(perms.len());
    let mut nu = Vec::with_capacity(perms.len());
    for p in &perms {
        let mut act = Vec::with_capacity(n);
        let mut nus = Vec::with_capacity(n);
        for ord in &order {
            let img: Vec<Vertex> = ord
                .iter()
                .map(|&v| transport(&res, p, v))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::Invariant("vertex permutation does not transport".into()))?;
            let mut face = img.clone();
            face.sort_unstable();
            let target = child
                .index_of(&face)
                .filter(|&t| t < n && face.len() == d + 1)
                .ok_or_else(|| Error::Invariant("permuted facet missing".into()))?;
            let q: Perm = img.iter().map(|v| order[target].iter().position(|w| w == v).unwrap()).collect();
            act.push(target);
            nus.push(q);
        }
        action.push(act);
        nu.push(nus);
    }
    let nu: Vec<Vec<usize>> = nu
        .into_iter()
        .map(|row| row.iter().map(|q| perms.binary_search(q).unwrap()).collect())
        .collect();

    let data = FractalData { kind, d, subdivision: res, order, incidence, edges, boundary, rho, perms, action, nu };
    check_data(&data)?;
    Ok(data)
}

fn check_data(data: &FractalData) -> Result<()> {
    let d = data.d;
    let n = data.n_facets();
    let sizes: BTreeSet<usize> = data.boundary.iter().map(Vec::len).collect();
    if sizes.len() != 1 {
        return Err(Error::Invariant(format!("boundary sides differ in size: {sizes:?}")));
    }
    for (i, inc) in data.incidence.iter().enumerate() {
        for (p, e) in inc.iter().enumerate() {
            if let Incidence::Edge(j) = *e {
                let q = data.kappa(j, i).ok_or_else(|| Error::Invariant("edge not mirrored".into()))?;
                if data.rho[&(i, j)][p] != q {
                    return Err(Error::Invariant(format!("rho({i},{j}) misses the shared face")));
                }
                if data.rho[&(j, i)] != inverse(&data.rho[&(i, j)]) {
                    return Err(Error::Invariant(format!("rho({j},{i}) is not inverse to rho({i},{j})")));
                }
            }
        }
    }
    let id = data.perm_index(&(0..=d).collect::<Vec<_>>());
    if data.action[id] != (0..n).collect::<Vec<_>>() {
        return Err(Error::Invariant("identity acts nontrivially".into()));
    }
    for (s, p) in data.perms.iter().enumerate() {
        for i in 0..n {
            let si = data.action[s][i];
            let q = &data.perms[data.nu[s][i]];
            // positions follow incidences
            for (pos, e) in data.incidence[i].iter().enumerate() {
                let expect = match *e {
                    Incidence::Edge(j) => Incidence::Edge(data.action[s][j]),
                    Incidence::Loop(j) => Incidence::Loop(p[j]),
                };
                if data.incidence[si][q[pos]] != expect {
                    return Err(Error::Invariant("action does not respect incidences".into()));
                }
            }
        }
        for j in 0..=d {
            let mut img: Vec<usize> = data.boundary[j].iter().map(|&i| data.action[s][i]).collect();
            img.sort_unstable();
            if img != data.boundary[p[j]] {
                return Err(Error::Invariant(format!("side {j} not carried to side {}", p[j])));
            }
        }
        for (&(i, j), r) in &data.rho {
            let (si, sj) = (data.action[s][i], data.action[s][j]);
            let lhs = &data.rho[&(si, sj)];
            let rhs = compose(&data.perms[data.nu[s][j]], &compose(r, &inverse(&data.perms[data.nu[s][i]])));
            if *lhs != rhs {
                return Err(Error::Invariant(format!("rho({i},{j}) is not equivariant")));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelGraph {
    pub k: usize,
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize)>,
    /// Boundary sides carrying a loop at each vertex.
    pub loop_sides: Vec<Vec<usize>>,
    pub boundary: Vec<Vec<usize>>,
    #[serde(skip)]
    pub action: Vec<Vec<usize>>,
}

impl LevelGraph {
    pub fn loop_count(&self) -> usize {
        self.loop_sides.iter().map(Vec::len).sum()
    }

    pub fn graph(&self) -> Graph {
        Graph::new(self.n_vertices, self.edges.iter().copied())
    }

    /// Vertex `v` as a tuple of level-0 indices, outermost copy first.
    pub fn tuple(&self, n_facets: usize, mut v: usize) -> Vec<usize> {
        let mut t = vec![0; self.k + 1];
        for slot in t.iter_mut().rev() {
            *slot = v % n_facets;
            v /= n_facets;
        }
        t
    }

    pub fn adjacency(&self) -> nalgebra::DMatrix<i64> {
        let mut m = nalgebra::DMatrix::zeros(self.n_vertices, self.n_vertices);
        for &(a, b) in &self.edges {
            m[(a, b)] = 1;
            m[(b, a)] = 1;
        }
        m
    }
}

pub fn level0(data: &FractalData) -> LevelGraph {
    let loop_sides = data
        .incidence
        .iter()
        .map(|inc| inc.iter().filter_map(|e| match e { Incidence::Loop(j) => Some(*j), _ => None }).collect())
        .collect();
    LevelGraph {
        k: 0,
        n_vertices: data.n_facets(),
        edges: data.edges.clone(),
        loop_sides,
        boundary: data.boundary.clone(),
        action: data.action.clone(),
    }
}

pub fn next_level(prev: &LevelGraph, data: &FractalData) -> Result<LevelGraph> {
    let n = data.n_facets();
    let m = prev.n_vertices;
    let total = n.checked_mul(m).ok_or(Error::Overflow)?;
    crate::check_budget(total)?;
    let idx = |i: usize, v: usize| i * m + v;

    let mut edges = BTreeSet::new();
    for i in 0..n {
        for &(a, b) in &prev.edges {
            edges.insert((idx(i, a), idx(i, b)));
        }
    }
    let prev_side: Vec<BTreeSet<usize>> = prev.boundary.iter().map(|b| b.iter().copied().collect()).collect();
    for &(i, j) in &data.edges {
        let p = data.kappa(i, j).unwrap();
        let q = data.kappa(j, i).unwrap();
        let r = data.perm_index(&data.rho[&(i, j)]);
        for &v in &prev.boundary[p] {
            let w = prev.action[r][v];
            if !prev_side[q].contains(&w) {
                return Err(Error::Invariant(format!("rho({i},{j}) leaves side {q}")));
            }
            let (a, b) = (idx(i, v), idx(j, w));
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let mut loop_sides = vec![Vec::new(); total];
    let mut boundary = vec![Vec::new(); data.d + 1];
    for (j, side) in data.boundary.iter().enumerate() {
        for &i in side {
            for &v in &prev.boundary[j] {
                loop_sides[idx(i, v)].push(j);
                boundary[j].push(idx(i, v));
            }
        }
        boundary[j].sort_unstable();
    }
    for l in &mut loop_sides {
        l.sort_unstable();
    }
    let action: Vec<Vec<usize>> = (0..data.perms.len())
        .map(|s| {
            (0..total)
                .map(|x| {
                    let (i, v) = (x / m, x % m);
                    idx(data.action[s][i], prev.action[data.nu[s][i]][v])
                })
                .collect()
        })
        .collect();
    let g = LevelGraph { k: prev.k + 1, n_vertices: total, edges: edges.into_iter().collect(), loop_sides, boundary, action };
    check_level(&g, data)?;
    Ok(g)
}

fn check_level(g: &LevelGraph, data: &FractalData) -> Result<()> {
    let mut deg = vec![0usize; g.n_vertices];
    for &(a, b) in &g.edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    if let Some(v) = (0..g.n_vertices).find(|&v| deg[v] + g.loop_sides[v].len() != data.d + 1) {
        return Err(Error::Invariant(format!("vertex {v} has degree {} with {} loops", deg[v], g.loop_sides[v].len())));
    }
    let edge_set: BTreeSet<(usize, usize)> = g.edges.iter().copied().collect();
    for (s, p) in data.perms.iter().enumerate() {
        let act = &g.action[s];
        for &(a, b) in &g.edges {
            let (x, y) = (act[a], act[b]);
            if !edge_set.contains(&(x.min(y), x.max(y))) {
                return Err(Error::Invariant("action does not preserve edges".into()));
            }
        }
        for j in 0..=data.d {
            let mut img: Vec<usize> = g.boundary[j].iter().map(|&v| act[v]).collect();
            img.sort_unstable();
            if img != g.boundary[p[j]] {
                return Err(Error::Invariant("action does not permute boundary sides".into()));
            }
        }
    }
    Ok(())
}

pub fn levels(data: &FractalData, k: usize) -> Result<Vec<LevelGraph>> {
    let mut out = vec![level0(data)];
    for _ in 0..k {
        let next = next_level(out.last().unwrap(), data)?;
        out.push(next);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub n_vertices: usize,
    pub loops: usize,
    pub expected_loops: usize,
    pub spectra_match: bool,
    pub isomorphic: bool,
}

impl DualityReport {
    pub fn holds(&self) -> bool {
        self.loops == self.expected_loops && self.spectra_match && self.isomorphic
    }
}

/// Compares level `k` with the top dual graph of the (k+1)-fold subdivision.
pub fn verify_duality(kind: Kind, d: usize, k: usize) -> Result<DualityReport> {
    let data = derive_fractal_data(kind, d)?;
    let g = levels(&data, k)?.pop().unwrap();
    let reference = iterate(kind, &Complex::simplex(d), k + 1)?.pop().unwrap().dual_graph(d)?;
    let h = Graph::from_signed(&reference);
    let ours = g.graph();
    let spectra_match = g.n_vertices == reference.order() && {
        let a = eigenvalues_int(&g.adjacency())?;
        let b = eigenvalues_int(&reference.unsigned_adjacency())?;
        a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-8)
    };
    let isomorphic = spectra_match
        && match find_isomorphism(&ours, &h) {
            Some(map) => verify_map(&ours, &h, &map),
            None => false,
        };
    let side = data.boundary_size();
    let expected_loops = (d + 1) * side.pow(k as u32 + 1);
    Ok(DualityReport { n_vertices: g.n_vertices, loops: g.loop_count(), expected_loops, spectra_match, isomorphic })
}

/// `((position, facet), (position, facet))`.
pub type Relation = ((usize, usize), (usize, usize));

/// Position-level gluing relation `((kappa_i(e), i), (kappa_j(e), j))` of a
/// subdivision whose boundary sides each meet a single facet.
pub fn finitely_ramified_relation(data: &FractalData) -> Result<Vec<Relation>> {
    if data.boundary_size() != 1 {
        return Err(Error::Unsupported(format!(
            "{} meets each boundary side in {} facets",
            data.kind.name(),
            data.boundary_size()
        )));
    }
    Ok(data
        .edges
        .iter()
        .map(|&(i, j)| ((data.kappa(i, j).unwrap(), i), (data.kappa(j, i).unwrap(), j)))
        .collect())
}

#[derive(Serialize)]
struct GraphFile<'a> {
    kind: String,
    d: usize,
    k: usize,
    vertices: Vec<Vec<usize>>,
    edges: &'a [(usize, usize)],
    loops: Vec<(usize, usize)>,
    boundary: &'a [Vec<usize>],
}

pub fn level_json(g: &LevelGraph, data: &FractalData) -> String {
    let file = GraphFile {
        kind: data.kind.name(),
        d: data.d,
        k: g.k,
        vertices: (0..g.n_vertices).map(|v| g.tuple(data.n_facets(), v)).collect(),
        edges: &g.edges,
        loops: g
            .loop_sides
            .iter()
            .enumerate()
            .flat_map(|(v, s)| s.iter().map(move |&j| (v, j)))
            .collect(),
        boundary: &g.boundary,
    };
    serde_json::to_string(&file).expect("serialize")
}
