//! Finite abstract simplicial complexes, boundary operators, Laplacians and
//! dual graphs.
//!
//! Faces are strictly ascending vertex lists. Faces of each dimension are
//! kept in lexicographic order and that order indexes rows and columns of
//! every matrix produced here.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = u32;
pub type Face = Vec<Vertex>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    faces: Vec<Vec<Face>>,
    index: Vec<HashMap<Face, usize>>,
}

#[derive(Serialize, Deserialize)]
struct ComplexFile {
    facets: Vec<Vec<Vertex>>,
}

impl Complex {
    /// Downward closure of `facets`. Vertices inside a facet may come in any
    /// order but must be distinct.
    pub fn from_facets<F: AsRef<[Vertex]>>(facets: &[F]) -> Result<Self> {
        if facets.is_empty() {
            return Err(Error::InvalidComplex("empty facet list".into()));
        }
        let mut by_dim: Vec<BTreeSet<Face>> = Vec::new();
        for f in facets {
            let mut f = f.as_ref().to_vec();
            if f.is_empty() {
                return Err(Error::InvalidComplex("empty facet".into()));
            }
            f.sort_unstable();
            if f.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidComplex(format!(
                    "facet {f:?} repeats a vertex"
                )));
            }
            if f.len() > 24 {
                return Err(Error::InvalidComplex("facet too large".into()));
            }
            if by_dim.len() < f.len() {
                by_dim.resize_with(f.len(), BTreeSet::new);
            }
            for mask in 1u32..(1u32 << f.len()) {
                let sub: Face = f
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| mask & (1 << j) != 0)
                    .map(|(_, &v)| v)
                    .collect();
                by_dim[sub.len() - 1].insert(sub);
            }
        }
        let faces: Vec<Vec<Face>> = by_dim.into_iter().map(|s| s.into_iter().collect()).collect();
        let index = faces
            .iter()
            .map(|fs| fs.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect())
            .collect();
        Ok(Complex { faces, index })
    }

    /// The full simplex on vertices `0..=d`.
    pub fn simplex(d: usize) -> Self {
        let f: Face = (0..=d as Vertex).collect();
        Complex::from_facets(&[f]).expect("simplex")
    }

    /// The boundary of the simplex on `0..=d`, a pure (d-1)-complex.
    pub fn simplex_boundary(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("boundary of a point is empty".into()));
        }
        let facets: Vec<Face> = (0..=d as Vertex)
            .map(|skip| (0..=d as Vertex).filter(|&v| v != skip).collect())
            .collect();
        Complex::from_facets(&facets)
    }

    pub fn dim(&self) -> usize {
        self.faces.len() - 1
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.faces.iter().map(Vec::len).collect()
    }

    pub fn faces(&self, i: usize) -> &[Face] {
        self.faces.get(i).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn index_of(&self, face: &[Vertex]) -> Option<usize> {
        if face.is_empty() {
            return None;
        }
        self.index.get(face.len() - 1)?.get(face).copied()
    }

    pub fn contains(&self, face: &[Vertex]) -> bool {
        self.index_of(face).is_some()
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        self.faces[0].iter().map(|f| f[0]).collect()
    }

    pub fn max_vertex(&self) -> Vertex {
        self.faces[0].last().map(|f| f[0]).unwrap_or(0)
    }

    /// Maximal faces, ordered by dimension then lexicographically.
    pub fn facets(&self) -> Vec<Face> {
        let mut out = Vec::new();
        for i in 0..=self.dim() {
            let covered: HashSet<Face> = if i < self.dim() {
                self.faces[i + 1]
                    .iter()
                    .flat_map(|f| facets_of(f).map(|(_, g)| g))
                    .collect()
            } else {
                HashSet::new()
            };
            out.extend(self.faces[i].iter().filter(|f| !covered.contains(*f)).cloned());
        }
        out
    }

    pub fn is_pure(&self) -> bool {
        let d = self.dim();
        self.facets().iter().all(|f| f.len() == d + 1)
    }

    /// Pure, and every codimension-one face lies in at most two facets.
    pub fn is_pseudomanifold(&self) -> bool {
        if !self.is_pure() {
            return false;
        }
        let d = self.dim();
        if d == 0 {
            return true;
        }
        self.cofaces(d - 1).iter().all(|c| c.len() <= 2)
    }

    /// For every (i)-face, the (i+1)-faces containing it with the boundary
    /// coefficient of the pair.
    pub fn cofaces(&self, i: usize) -> Vec<Vec<(usize, i64)>> {
        let mut out = vec![Vec::new(); self.faces(i).len()];
        for (t, tau) in self.faces(i + 1).iter().enumerate() {
            for (j, nu) in facets_of(tau) {
                let r = self.index[i][&nu];
                out[r].push((t, sign(j)));
            }
        }
        out
    }

    /// Boundary operator from i-chains to (i-1)-chains, 1 <= i <= dim.
    pub fn boundary_matrix(&self, i: usize) -> Result<SparseMatrix> {
        self.check_range(i, 1, self.dim())?;
        let mut entries = Vec::new();
        for (c, tau) in self.faces[i].iter().enumerate() {
            for (j, nu) in facets_of(tau) {
                entries.push((self.index[i - 1][&nu], c, sign(j)));
            }
        }
        entries.sort_unstable();
        Ok(SparseMatrix {
            rows: self.faces[i - 1].len(),
            cols: self.faces[i].len(),
            entries,
        })
    }

    /// Down Laplacian on i-chains, 1 <= i <= dim.
    pub fn down_laplacian(&self, i: usize) -> Result<DMatrix<i64>> {
        self.check_range(i, 1, self.dim())?;
        let n = self.faces[i].len();
        let mut m = DMatrix::<i64>::zeros(n, n);
        for cof in self.cofaces(i - 1) {
            for &(a, sa) in &cof {
                for &(b, sb) in &cof {
                    m[(a, b)] += sa * sb;
                }
            }
        }
        Ok(m)
    }

    /// Up Laplacian on i-chains, 0 <= i <= dim. Zero at the top dimension.
    pub fn up_laplacian(&self, i: usize) -> Result<DMatrix<i64>> {
        self.check_range(i, 0, self.dim())?;
        let n = self.faces[i].len();
        let mut m = DMatrix::<i64>::zeros(n, n);
        for rho in self.faces(i + 1) {
            let bd: Vec<(usize, i64)> = facets_of(rho)
                .map(|(j, nu)| (self.index[i][&nu], sign(j)))
                .collect();
            for &(a, sa) in &bd {
                for &(b, sb) in &bd {
                    m[(a, b)] += sa * sb;
                }
            }
        }
        Ok(m)
    }

    pub fn full_laplacian(&self, i: usize) -> Result<DMatrix<i64>> {
        let mut m = self.up_laplacian(i)?;
        if i >= 1 {
            m += self.down_laplacian(i)?;
        }
        Ok(m)
    }

    /// Graph on the i-faces with an edge whenever two faces share an
    /// (i-1)-face, signed by the product of the two boundary coefficients.
    pub fn dual_graph(&self, i: usize) -> Result<SignedGraph> {
        self.check_range(i, 1, self.dim())?;
        let mut g = SignedGraph::new(self.faces[i].len());
        for cof in self.cofaces(i - 1) {
            for (x, &(a, sa)) in cof.iter().enumerate() {
                for &(b, sb) in &cof[x + 1..] {
                    g.add_edge(a, b, (sa * sb) as i8)?;
                }
            }
        }
        Ok(g)
    }

    /// Subcomplex of faces whose vertices all lie in `verts`.
    pub fn induced(&self, verts: &HashSet<Vertex>) -> Vec<Vec<Face>> {
        self.faces
            .iter()
            .map(|fs| {
                fs.iter()
                    .filter(|f| f.iter().all(|v| verts.contains(v)))
                    .cloned()
                    .collect()
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ComplexFile { facets: self.facets() }).expect("serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: ComplexFile =
            serde_json::from_str(s).map_err(|e| Error::InvalidComplex(e.to_string()))?;
        Complex::from_facets(&f.facets)
    }

    fn check_range(&self, i: usize, lo: usize, hi: usize) -> Result<()> {
        if i < lo || i > hi {
            return Err(Error::DimOutOfRange { got: i, lo, hi });
        }
        Ok(())
    }
}

fn sign(j: usize) -> i64 {
    if j.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Codimension-one faces of `f` paired with the position of the removed
/// vertex.
pub fn facets_of(f: &[Vertex]) -> impl Iterator<Item = (usize, Face)> + '_ {
    (0..f.len()).filter(move |_| f.len() > 1).map(move |j| {
        let mut g = f.to_vec();
        g.remove(j);
        (j, g)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    /// `(row, col, value)` sorted by row then column.
    pub entries: Vec<(usize, usize, i64)>,
}

impl SparseMatrix {
    pub fn to_dense(&self) -> DMatrix<i64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn from_dense(m: &DMatrix<i64>) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)] != 0 {
                    entries.push((r, c, m[(r, c)]));
                }
            }
        }
        SparseMatrix { rows: m.nrows(), cols: m.ncols(), entries }
    }

    /// `row,col,value` triplets with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,col,value\n");
        for &(r, c, v) in &self.entries {
            let _ = writeln!(s, "{r},{c},{v}");
        }
        s
    }
}

/// Graph with edge signs in {-1, +1} and unsigned loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedGraph {
    n: usize,
    edges: Vec<(usize, usize, i8)>,
    loops: Vec<u32>,
}

impl SignedGraph {
    pub fn new(n: usize) -> Self {
        SignedGraph { n, edges: Vec::new(), loops: vec![0; n] }
    }

    pub fn add_edge(&mut self, a: usize, b: usize, s: i8) -> Result<()> {
        if a == b || a >= self.n || b >= self.n || (s != 1 && s != -1) {
            return Err(Error::InvalidArgument(format!("bad edge ({a},{b},{s})")));
        }
        self.edges.push((a.min(b), a.max(b), s));
        Ok(())
    }

    pub fn add_loop(&mut self, v: usize) {
        self.loops[v] += 1;
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, i8)] {
        &self.edges
    }

    pub fn loops(&self) -> &[u32] {
        &self.loops
    }

    pub fn loop_count(&self) -> usize {
        self.loops.iter().map(|&l| l as usize).sum()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v || e.1 == v).count()
    }

    /// Unsigned edge set with endpoints ordered.
    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.edges.iter().map(|&(a, b, _)| (a, b)).collect()
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.n];
        for &(a, b, _) in &self.edges {
            nb[a].push(b);
            nb[b].push(a);
        }
        for l in &mut nb {
            l.sort_unstable();
        }
        nb
    }

    pub fn signed_adjacency(&self) -> DMatrix<i64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for &(a, b, s) in &self.edges {
            m[(a, b)] += s as i64;
            m[(b, a)] += s as i64;
        }
        m
    }

    pub fn unsigned_adjacency(&self) -> DMatrix<i64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for &(a, b, _) in &self.edges {
            m[(a, b)] += 1;
            m[(b, a)] += 1;
        }
        m
    }
}

/// `D + A` with graph degrees on the diagonal. Loops are ignored.
pub fn signed_laplacian(g: &SignedGraph) -> DMatrix<i64> {
    let mut m = g.signed_adjacency();
    for v in 0..g.n {
        m[(v, v)] += g.degree(v) as i64;
    }
    m
}

/// `(i+1) I + A`: the down Laplacian of the complex whose i-th dual graph is `g`.
pub fn complex_laplacian_of_dual(g: &SignedGraph, i: usize) -> DMatrix<i64> {
    let mut m = g.signed_adjacency();
    for v in 0..g.n {
        m[(v, v)] += i as i64 + 1;
    }
    m
}

#[derive(Clone, Debug)]
pub struct Gluing {
    pub complex: Complex,
    /// Number of identified i-faces, one entry per dimension of the left complex.
    pub r: Vec<usize>,
    pub left_map: HashMap<Vertex, Vertex>,
    pub right_map: HashMap<Vertex, Vertex>,
}

/// Glue `l` onto `k` by identifying `pairs` of (k-vertex, l-vertex). The
/// subcomplexes induced on the paired vertices must correspond under the
/// pairing. Quotient vertices take the smallest label of their class in the
/// disjoint union where `l` is shifted past the largest vertex of `k`.
pub fn glue(k: &Complex, l: &Complex, pairs: &[(Vertex, Vertex)]) -> Result<Gluing> {
    let mut phi = HashMap::new();
    let mut used_l = HashSet::new();
    for &(a, b) in pairs {
        if !k.contains(&[a]) || !l.contains(&[b]) {
            return Err(Error::InvalidGluing(format!("pair ({a},{b}) names a missing vertex")));
        }
        if phi.insert(a, b).is_some() || !used_l.insert(b) {
            return Err(Error::InvalidGluing(format!("vertex in pair ({a},{b}) used twice")));
        }
    }
    let gk: HashSet<Vertex> = phi.keys().copied().collect();
    let sub_k = k.induced(&gk);
    let sub_l = l.induced(&used_l);
    let mapped: BTreeSet<Face> = sub_k
        .iter()
        .flatten()
        .map(|f| {
            let mut g: Face = f.iter().map(|v| phi[v]).collect();
            g.sort_unstable();
            g
        })
        .collect();
    let target: BTreeSet<Face> = sub_l.iter().flatten().cloned().collect();
    if mapped != target {
        return Err(Error::InvalidGluing(
            "induced subcomplexes do not correspond under the pairing".into(),
        ));
    }
    let r: Vec<usize> = (0..=k.dim()).map(|i| sub_k.get(i).map_or(0, Vec::len)).collect();

    let offset = k.max_vertex() + 1;
    let inv: HashMap<Vertex, Vertex> = phi.iter().map(|(&a, &b)| (b, a)).collect();
    let left_map: HashMap<Vertex, Vertex> = k.vertices().into_iter().map(|v| (v, v)).collect();
    let right_map: HashMap<Vertex, Vertex> = l
        .vertices()
        .into_iter()
        .map(|w| (w, inv.get(&w).copied().unwrap_or(offset + w)))
        .collect();
    let mut facets = k.facets();
    facets.extend(
        l.facets()
            .iter()
            .map(|f| f.iter().map(|w| right_map[w]).collect::<Face>()),
    );
    Ok(Gluing { complex: Complex::from_facets(&facets)?, r, left_map, right_map })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_boundary() {
        let k = Complex::from_facets(&[[0, 1, 2]]).unwrap();
        assert_eq!(k.f_vector(), vec![3, 3, 1]);
        let b = k.boundary_matrix(2).unwrap();
        // faces (0,1) (0,2) (1,2); column entries +1, -1, +1 for removals of 2, 1, 0
        assert_eq!(b.entries, vec![(0, 0, 1), (1, 0, -1), (2, 0, 1)]);
        let d = k.down_laplacian(2).unwrap();
        assert_eq!(d[(0, 0)], 3);
    }

    #[test]
    fn two_triangles_down_laplacian() {
        let k = Complex::from_facets(&[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let d = k.down_laplacian(2).unwrap();
        assert_eq!(d, DMatrix::from_row_slice(2, 2, &[3, 1, 1, 3]));
        let g = k.dual_graph(2).unwrap();
        assert_eq!(g.edges(), &[(0, 1, 1)]);
        assert_eq!(complex_laplacian_of_dual(&g, 2), d);
    }

    #[test]
    fn point_laplacian() {
        let k = Complex::from_facets(&[[5]]).unwrap();
        assert_eq!(k.full_laplacian(0).unwrap(), DMatrix::from_element(1, 1, 0));
        assert!(matches!(k.down_laplacian(1), Err(Error::DimOutOfRange { .. })));
    }

    #[test]
    fn invalid_inputs() {
        assert!(Complex::from_facets::<Vec<u32>>(&[]).is_err());
        assert!(Complex::from_facets(&[vec![0, 0, 1]]).is_err());
        assert!(Complex::from_facets(&[Vec::<u32>::new()]).is_err());
    }

    #[test]
    fn unsorted_facets_are_normalised() {
        let k = Complex::from_facets(&[[2, 0, 1]]).unwrap();
        assert_eq!(k.facets(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn graph_laplacians() {
        let g = SignedGraph::new(3);
        assert_eq!(signed_laplacian(&g), DMatrix::zeros(3, 3));
        let mut k3 = SignedGraph::new(3);
        k3.add_edge(0, 1, -1).unwrap();
        k3.add_edge(0, 2, -1).unwrap();
        k3.add_edge(1, 2, -1).unwrap();
        let expect = DMatrix::from_row_slice(3, 3, &[2, -1, -1, -1, 2, -1, -1, -1, 2]);
        assert_eq!(signed_laplacian(&k3), expect);
    }

    #[test]
    fn glue_along_edge() {
        let a = Complex::from_facets(&[[0, 1, 2]]).unwrap();
        let b = Complex::from_facets(&[[0, 1, 2]]).unwrap();
        let g = glue(&a, &b, &[(1, 0), (2, 1)]).unwrap();
        assert_eq!(g.complex.f_vector(), vec![4, 5, 2]);
        assert_eq!(g.r, vec![2, 1, 0]);
        assert_eq!(g.complex.facets(), vec![vec![0, 1, 2], vec![1, 2, 5]]);
    }

    #[test]
    fn glue_whole_triangle() {
        let a = Complex::simplex(2);
        let g = glue(&a, &a, &[(0, 0), (1, 1), (2, 2)]).unwrap();
        assert_eq!(g.r, vec![3, 3, 1]);
        assert_eq!(g.complex.f_vector(), vec![3, 3, 1]);
    }

    #[test]
    fn glue_rejects_mismatch() {
        let a = Complex::from_facets(&[vec![0, 1], vec![1, 2]]).unwrap();
        let b = Complex::from_facets(&[vec![0, 1], vec![2, 3]]).unwrap();
        // {0,1} spans an edge in a, {0,2} does not in b
        assert!(glue(&a, &b, &[(0, 0), (1, 2)]).is_err());
        assert!(glue(&a, &b, &[(0, 0), (0, 1)]).is_err());
        assert!(glue(&a, &b, &[(9, 0)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let k = Complex::from_facets(&[vec![0, 1, 2], vec![2, 3]]).unwrap();
        let back = Complex::from_json(&k.to_json()).unwrap();
        assert_eq!(k, back);
        assert!(!k.is_pure());
    }
}
