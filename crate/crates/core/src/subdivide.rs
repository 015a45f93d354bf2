//! Cone, barycentric and edgewise subdivisions.
//!
//! Every vertex of a subdivision is identified by a point of the parent
//! given as integer barycentric weights over parent vertices. The weights
//! are canonical, so faces shared by two parent facets receive the same
//! child vertices, and vertex permutations of the parent can be transported
//! to the child.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Ratio;

use crate::complex::{Complex, Face, Vertex};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Cone,
    Barycentric,
    /// Edgewise subdivision with parameter r >= 2, for complexes of dimension at most 2.
    Edgewise(u32),
}

impl Kind {
    pub fn parse(name: &str, r: Option<u32>) -> Result<Kind> {
        match name {
            "cd" => Ok(Kind::Cone),
            "sd" => Ok(Kind::Barycentric),
            "esd" => Ok(Kind::Edgewise(r.ok_or_else(|| {
                Error::InvalidArgument("esd needs r".into())
            })?)),
            _ => Err(Error::InvalidArgument(format!("unknown subdivision kind {name}"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Kind::Cone => "cd".into(),
            Kind::Barycentric => "sd".into(),
            Kind::Edgewise(r) => format!("esd{r}"),
        }
    }
}

/// Sorted `(parent vertex, weight)` pairs with positive weights.
pub type VertexKey = Vec<(Vertex, u32)>;

#[derive(Clone, Debug)]
pub struct SubdivisionResult {
    pub kind: Kind,
    pub parent: Complex,
    pub child: Complex,
    /// Smallest parent face containing each child face.
    pub carrier: HashMap<Face, Face>,
    /// Parent face carrying each newly created vertex.
    pub new_vertex_provenance: BTreeMap<Vertex, Face>,
    pub vertex_keys: BTreeMap<VertexKey, Vertex>,
}

impl SubdivisionResult {
    /// Child faces carried by `tau`, as a complex.
    pub fn restriction(&self, tau: &[Vertex]) -> Result<Complex> {
        let mut faces: Vec<&Face> = self
            .carrier
            .iter()
            .filter(|(_, c)| c.iter().all(|v| tau.contains(v)))
            .map(|(f, _)| f)
            .collect();
        faces.sort();
        Complex::from_facets(&faces)
    }
}

pub fn subdivide(kind: Kind, k: &Complex) -> Result<SubdivisionResult> {
    let keyed: Vec<Vec<VertexKey>> = match kind {
        Kind::Cone => cone_facets(k)?,
        Kind::Barycentric => barycentric_facets(k),
        Kind::Edgewise(r) => edgewise_facets(k, r)?,
    };
    assemble(kind, k, keyed)
}

pub fn cone_subdivide(k: &Complex) -> Result<SubdivisionResult> {
    subdivide(Kind::Cone, k)
}

pub fn barycentric_subdivide(k: &Complex) -> Result<SubdivisionResult> {
    subdivide(Kind::Barycentric, k)
}

pub fn edgewise_subdivide(k: &Complex, r: u32) -> Result<SubdivisionResult> {
    subdivide(Kind::Edgewise(r), k)
}

/// `[K, div K, ..., div^n K]` with the subdivision data of each step.
pub fn iterate_results(kind: Kind, k: &Complex, n: usize) -> Result<Vec<SubdivisionResult>> {
    let mut out: Vec<SubdivisionResult> = Vec::with_capacity(n);
    let mut cur = k.clone();
    for _ in 0..n {
        let res = subdivide(kind, &cur)?;
        let top = *res.child.f_vector().last().unwrap();
        crate::check_budget(top)?;
        cur = res.child.clone();
        out.push(res);
    }
    Ok(out)
}

/// Levels `0..=n`, starting with `k` itself.
pub fn iterate(kind: Kind, k: &Complex, n: usize) -> Result<Vec<Complex>> {
    let mut levels = vec![k.clone()];
    levels.extend(iterate_results(kind, k, n)?.into_iter().map(|r| r.child));
    Ok(levels)
}

/// The subdivision of a single simplex of dimension `i` as performed inside
/// a complex of dimension `ambient`. The cone subdivision leaves faces below
/// the top dimension alone.
pub fn scheme(kind: Kind, i: usize, ambient: usize) -> Result<Complex> {
    let s = Complex::simplex(i);
    if i == 0 || (kind == Kind::Cone && i < ambient) {
        return Ok(s);
    }
    Ok(subdivide(kind, &s)?.child)
}

/// `f_{d-1}(div) / f_d(div)`: facets of the subdivided simplex against the
/// codimension-one faces lying in one boundary facet.
pub fn q_ratio(kind: Kind, d: usize) -> Result<Ratio<u64>> {
    if d == 0 {
        return Err(Error::InvalidArgument("q ratio needs d >= 1".into()));
    }
    let res = subdivide(kind, &Complex::simplex(d))?;
    let side: Face = (1..=d as Vertex).collect();
    let on_side = res.child.faces(d - 1)
        .iter()
        .filter(|f| res.carrier[*f].iter().all(|v| side.contains(v)))
        .count();
    let top = res.child.faces(d).len();
    Ok(Ratio::new(on_side as u64, top as u64))
}

fn cone_facets(k: &Complex) -> Result<Vec<Vec<VertexKey>>> {
    let d = k.dim();
    if d == 0 {
        return Err(Error::Unsupported("cone subdivision of a 0-dimensional complex".into()));
    }
    if !k.is_pure() {
        return Err(Error::NotPure);
    }
    let mut out = Vec::new();
    for sigma in k.faces(d) {
        let apex: VertexKey = sigma.iter().map(|&v| (v, 1)).collect();
        for skip in 0..sigma.len() {
            let mut f: Vec<VertexKey> = sigma
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != skip)
                .map(|(_, &v)| vec![(v, 1)])
                .collect();
            f.push(apex.clone());
            out.push(f);
        }
    }
    Ok(out)
}

fn barycentric_facets(k: &Complex) -> Vec<Vec<VertexKey>> {
    let mut out = Vec::new();
    for sigma in k.facets() {
        for p in permutations(sigma.len()) {
            let mut chain = Vec::with_capacity(sigma.len());
            for len in 1..=sigma.len() {
                let mut key: VertexKey = p[..len].iter().map(|&j| (sigma[j], 1)).collect();
                key.sort_unstable();
                chain.push(key);
            }
            out.push(chain);
        }
    }
    out
}

fn edgewise_facets(k: &Complex, r: u32) -> Result<Vec<Vec<VertexKey>>> {
    if r < 2 {
        return Err(Error::InvalidArgument("edgewise subdivision needs r >= 2".into()));
    }
    if k.dim() > 2 {
        return Err(Error::Unsupported("edgewise subdivision above dimension 2".into()));
    }
    let point = |verts: &[Vertex], w: &[u32]| -> VertexKey {
        verts.iter().zip(w).filter(|(_, &x)| x > 0).map(|(&v, &x)| (v, x)).collect()
    };
    let mut out = Vec::new();
    for sigma in k.facets() {
        match sigma.len() {
            1 => out.push(vec![vec![(sigma[0], r)]]),
            2 => {
                for i in 0..r {
                    out.push(vec![point(&sigma, &[r - i, i]), point(&sigma, &[r - i - 1, i + 1])]);
                }
            }
            _ => {
                for i in 0..r {
                    for j in 0..r - i {
                        let c = r - 1 - i - j;
                        out.push(vec![
                            point(&sigma, &[i + 1, j, c]),
                            point(&sigma, &[i, j + 1, c]),
                            point(&sigma, &[i, j, c + 1]),
                        ]);
                        if c >= 1 {
                            out.push(vec![
                                point(&sigma, &[i, j + 1, c]),
                                point(&sigma, &[i + 1, j, c]),
                                point(&sigma, &[i + 1, j + 1, c - 1]),
                            ]);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn assemble(kind: Kind, parent: &Complex, keyed: Vec<Vec<VertexKey>>) -> Result<SubdivisionResult> {
    let all: BTreeSet<&VertexKey> = keyed.iter().flatten().collect();
    let mut fresh: Vec<&VertexKey> = all.iter().copied().filter(|k| k.len() > 1).collect();
    fresh.sort_by(|a, b| {
        let sa: Face = a.iter().map(|p| p.0).collect();
        let sb: Face = b.iter().map(|p| p.0).collect();
        (sa.len(), sa, *a).cmp(&(sb.len(), sb, *b))
    });
    let mut vertex_keys = BTreeMap::new();
    let mut support: HashMap<Vertex, Face> = HashMap::new();
    for key in all.iter().filter(|k| k.len() == 1) {
        vertex_keys.insert((*key).clone(), key[0].0);
        support.insert(key[0].0, vec![key[0].0]);
    }
    let mut next = parent.max_vertex() + 1;
    let mut new_vertex_provenance = BTreeMap::new();
    for key in fresh {
        let face: Face = key.iter().map(|p| p.0).collect();
        vertex_keys.insert(key.clone(), next);
        support.insert(next, face.clone());
        new_vertex_provenance.insert(next, face);
        next += 1;
    }
    let facets: Vec<Face> = keyed
        .iter()
        .map(|f| f.iter().map(|k| vertex_keys[k]).collect())
        .collect();
    let child = Complex::from_facets(&facets)?;
    let mut carrier = HashMap::new();
    for i in 0..=child.dim() {
        for f in child.faces(i) {
            let c: BTreeSet<Vertex> = f.iter().flat_map(|v| support[v].iter().copied()).collect();
            let c: Face = c.into_iter().collect();
            if !parent.contains(&c) {
                return Err(Error::Invariant(format!("carrier {c:?} is not a parent face")));
            }
            carrier.insert(f.clone(), c);
        }
    }
    Ok(SubdivisionResult {
        kind,
        parent: parent.clone(),
        child,
        carrier,
        new_vertex_provenance,
        vertex_keys,
    })
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cone_triangle() {
        let r = cone_subdivide(&Complex::simplex(2)).unwrap();
        assert_eq!(r.child.f_vector(), vec![4, 6, 3]);
        assert_eq!(r.new_vertex_provenance.get(&3), Some(&vec![0, 1, 2]));
        let edge = Complex::simplex(1);
        let r = cone_subdivide(&edge).unwrap();
        assert_eq!(r.child.facets(), vec![vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn cone_needs_pure() {
        let k = Complex::from_facets(&[vec![0, 1, 2], vec![2, 3]]).unwrap();
        assert!(matches!(cone_subdivide(&k), Err(Error::NotPure)));
    }

    #[test]
    fn barycentric_counts() {
        let r = barycentric_subdivide(&Complex::simplex(2)).unwrap();
        assert_eq!(r.child.f_vector(), vec![7, 12, 6]);
        let r = barycentric_subdivide(&Complex::simplex(3)).unwrap();
        assert_eq!(r.child.faces(3).len(), 24);
    }

    #[test]
    fn edgewise_counts() {
        let r = edgewise_subdivide(&Complex::simplex(2), 3).unwrap();
        assert_eq!(r.child.faces(2).len(), 9);
        assert_eq!(r.child.faces(0).len(), 10);
        let r = edgewise_subdivide(&Complex::simplex(1), 4).unwrap();
        assert_eq!(r.child.f_vector(), vec![5, 4]);
        assert!(edgewise_subdivide(&Complex::simplex(3), 2).is_err());
        assert!(edgewise_subdivide(&Complex::simplex(2), 1).is_err());
    }

    #[test]
    fn shared_edges_are_identified() {
        let k = Complex::from_facets(&[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let r = edgewise_subdivide(&k, 2).unwrap();
        // 4 + 4 triangles, 4 old vertices, 5 edge midpoints
        assert_eq!(r.child.f_vector(), vec![9, 16, 8]);
        let s = barycentric_subdivide(&k).unwrap();
        assert_eq!(s.child.f_vector()[0], 4 + 5 + 2);
    }

    #[test]
    fn q_ratios() {
        for d in 1..=4 {
            assert_eq!(q_ratio(Kind::Cone, d).unwrap(), Ratio::new(1, d as u64 + 1));
            assert_eq!(q_ratio(Kind::Barycentric, d).unwrap(), Ratio::new(1, d as u64 + 1));
        }
        assert_eq!(q_ratio(Kind::Edgewise(3), 2).unwrap(), Ratio::new(1, 3));
    }

    #[test]
    fn iterate_levels() {
        let l = iterate(Kind::Cone, &Complex::simplex(2), 3).unwrap();
        let tops: Vec<usize> = l.iter().map(|c| c.faces(2).len()).collect();
        assert_eq!(tops, vec![1, 3, 9, 27]);
    }

    #[test]
    fn perms() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(3)[1], vec![0, 2, 1]);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }
}
