#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;
use simplicial_spectra::complex::{complex_laplacian_of_dual, glue, Complex, Face};
use simplicial_spectra::iso::complexes_isomorphic;
use simplicial_spectra::spectral::eigenvalues_int;
use simplicial_spectra::subdivide::{scheme, subdivide, Kind};

pub type Check = Result<(), String>;

/// Deterministic proptest configuration.
pub fn fixed_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x51_3b_1c),
        failure_persistence: None,
        ..Default::default()
    }
}

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Pure complex whose facets are `count` random `(d+1)`-subsets of `0..verts`.
pub fn random_pure(rng: &mut StdRng, d: usize, verts: u32, count: usize) -> Complex {
    let pool: Vec<u32> = (0..verts).collect();
    let facets: Vec<Vec<u32>> = (0..count)
        .map(|_| pool.choose_multiple(rng, d + 1).copied().collect())
        .collect();
    Complex::from_facets(&facets).unwrap()
}

/// A strip of `len` triangles `{i, i+1, i+2}` with labels shifted by `base`.
pub fn strip(len: u32, base: u32) -> Complex {
    let facets: Vec<Vec<u32>> = (0..len).map(|i| vec![base + i, base + i + 1, base + i + 2]).collect();
    Complex::from_facets(&facets).unwrap()
}

pub fn euler(k: &Complex) -> i64 {
    k.f_vector().iter().enumerate().map(|(i, &f)| if i % 2 == 0 { f as i64 } else { -(f as i64) }).sum()
}

pub fn boundary_squares_to_zero(k: &Complex) -> Check {
    for i in 2..=k.dim() {
        let a = k.boundary_matrix(i - 1).unwrap().to_dense();
        let b = k.boundary_matrix(i).unwrap().to_dense();
        ensure((a * b).iter().all(|&x| x == 0), || format!("boundary^2 != 0 at {i}"))?;
    }
    Ok(())
}

pub fn laplacians_consistent(k: &Complex) -> Check {
    for i in 1..=k.dim() {
        let bd = k.boundary_matrix(i).unwrap().to_dense();
        let down = k.down_laplacian(i).unwrap();
        ensure(down == bd.transpose() * &bd, || format!("down Laplacian at {i}"))?;
        ensure(down.diagonal().iter().all(|&x| x == i as i64 + 1), || "diagonal".into())?;
        let dual = k.dual_graph(i).unwrap();
        ensure(complex_laplacian_of_dual(&dual, i) == down, || format!("dual graph form at {i}"))?;
        let up = k.up_laplacian(i - 1).unwrap();
        ensure(up == &bd * bd.transpose(), || format!("up Laplacian at {}", i - 1))?;
        let ev = eigenvalues_int(&k.full_laplacian(i).unwrap()).unwrap();
        ensure(ev.first().is_none_or(|&x| x > -1e-9), || "Laplacian not PSD".into())?;
    }
    Ok(())
}

/// Flipping the orientation of a set of top faces conjugates the top down
/// Laplacian by a diagonal sign matrix and leaves its spectrum unchanged.
pub fn orientation_flip(k: &Complex, flips: &[bool]) -> Check {
    let d = k.dim();
    if d == 0 {
        return Ok(());
    }
    let bd = k.boundary_matrix(d).unwrap().to_dense();
    let n = bd.ncols();
    let s = DMatrix::<i64>::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        (0..n).map(|j| if flips.get(j).copied().unwrap_or(false) { -1 } else { 1 }),
    ));
    let flipped = &bd * &s;
    let l = k.down_laplacian(d).unwrap();
    let lf = flipped.transpose() * &flipped;
    ensure(lf == &s * &l * &s, || "flip is not a conjugation".into())?;
    let a = eigenvalues_int(&l).unwrap();
    let b = eigenvalues_int(&lf).unwrap();
    ensure(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9), || "flip changed the spectrum".into())
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Face counts, Euler characteristic, carriers and inclusion-uniformity.
pub fn subdivision_structure(kind: Kind, k: &Complex) -> Check {
    let res = subdivide(kind, k).map_err(|e| e.to_string())?;
    let d = k.dim();
    let child = &res.child;
    ensure(euler(child) == euler(k), || format!("{kind:?} changed the Euler characteristic"))?;
    let top_parent: usize = k.facets().iter().filter(|f| f.len() == d + 1).count();
    let per_facet = match kind {
        Kind::Cone => d + 1,
        Kind::Barycentric => factorial(d + 1),
        Kind::Edgewise(r) => (r as usize).pow(d as u32),
    };
    ensure(child.faces(d).len() == top_parent * per_facet, || format!("{kind:?}: top face count"))?;
    if kind == Kind::Cone {
        ensure(child.is_pure(), || "cone subdivision lost purity".into())?;
        ensure(!k.is_pseudomanifold() || child.is_pseudomanifold(), || "cone subdivision lost pseudomanifoldness".into())?;
    }
    for i in 0..=child.dim() {
        for f in child.faces(i) {
            let c = &res.carrier[f];
            ensure(k.contains(c), || format!("carrier {c:?} not a face"))?;
            let support: BTreeSet<u32> = f
                .iter()
                .flat_map(|v| res.new_vertex_provenance.get(v).cloned().unwrap_or_else(|| vec![*v]))
                .collect();
            ensure(support.into_iter().collect::<Face>() == *c, || format!("carrier of {f:?} not minimal"))?;
        }
    }
    for i in 0..=d {
        for tau in k.faces(i) {
            let r = res.restriction(tau).map_err(|e| e.to_string())?;
            let model = scheme(kind, i, d).map_err(|e| e.to_string())?;
            ensure(complexes_isomorphic(&r, &model), || format!("{kind:?}: restriction to {tau:?} is not the model"))?;
        }
    }
    Ok(())
}

/// Glue two strips along random boundary edges and check the Laplacian
/// block form. Relabelling can reorient faces, so blocks agree up to sign.
pub fn gluing_block_form(rng: &mut StdRng, len_a: u32, len_b: u32) -> Check {
    let a = strip(len_a, 0);
    let b = strip(len_b, 0);
    let boundary_edges = |k: &Complex| -> Vec<Face> {
        let cof = k.cofaces(1);
        k.faces(1).iter().zip(&cof).filter(|(_, c)| c.len() == 1).map(|(f, _)| f.clone()).collect()
    };
    let ea = boundary_edges(&a);
    let eb = boundary_edges(&b);
    let x = ea.choose(rng).unwrap();
    let y = eb.choose(rng).unwrap();
    let (p, q) = if rng.gen_bool(0.5) { (y[0], y[1]) } else { (y[1], y[0]) };
    let pairs = [(x[0], p), (x[1], q)];
    let g = glue(&a, &b, &pairs).map_err(|e| e.to_string())?;
    ensure(g.r == vec![2, 1, 0], || format!("r = {:?}", g.r))?;
    let k = &g.complex;
    let l = k.down_laplacian(2).unwrap();
    let la = a.down_laplacian(2).unwrap();
    let lb = b.down_laplacian(2).unwrap();
    let ia: Vec<usize> = a.faces(2).iter().map(|f| {
        let mut h: Face = f.iter().map(|v| g.left_map[v]).collect();
        h.sort_unstable();
        k.index_of(&h).unwrap()
    }).collect();
    let ib: Vec<usize> = b.faces(2).iter().map(|f| {
        let mut h: Face = f.iter().map(|v| g.right_map[v]).collect();
        h.sort_unstable();
        k.index_of(&h).unwrap()
    }).collect();
    let set_a: HashSet<usize> = ia.iter().copied().collect();
    ensure(ib.iter().all(|j| !set_a.contains(j)), || "top faces identified".into())?;
    for (x, &gx) in ia.iter().enumerate() {
        for (y, &gy) in ia.iter().enumerate() {
            ensure(l[(gx, gy)].abs() == la[(x, y)].abs(), || "left block".into())?;
        }
    }
    for (x, &gx) in ib.iter().enumerate() {
        for (y, &gy) in ib.iter().enumerate() {
            ensure(l[(gx, gy)].abs() == lb[(x, y)].abs(), || "right block".into())?;
        }
    }
    let cross: i64 = ia.iter().flat_map(|&x| ib.iter().map(move |&y| (x, y))).map(|(x, y)| l[(x, y)].abs()).sum();
    ensure(cross as usize <= g.r[1], || format!("cross block norm {cross} > r = {}", g.r[1]))
}

/// Subdividing a glued complex agrees with gluing the subdivisions along
/// the subdivided gluing set.
pub fn subdivision_gluing(kind: Kind) -> Check {
    let a = Complex::simplex(2);
    let b = Complex::simplex(2);
    let pairs = [(1u32, 0u32), (2, 1)];
    let glued = glue(&a, &b, &pairs).unwrap();
    let lhs = subdivide(kind, &glued.complex).unwrap().child;
    let sa = subdivide(kind, &a).unwrap();
    let sb = subdivide(kind, &b).unwrap();
    let phi: std::collections::HashMap<u32, u32> = pairs.iter().copied().collect();
    let mut new_pairs: Vec<(u32, u32)> = pairs.to_vec();
    for (key, &v) in &sa.vertex_keys {
        if key.len() > 1 && key.iter().all(|(u, _)| phi.contains_key(u)) {
            let mut moved: Vec<(u32, u32)> = key.iter().map(|&(u, w)| (phi[&u], w)).collect();
            moved.sort_unstable();
            new_pairs.push((v, sb.vertex_keys[&moved]));
        }
    }
    let rhs = glue(&sa.child, &sb.child, &new_pairs).map_err(|e| e.to_string())?;
    ensure(complexes_isomorphic(&lhs, &rhs.complex), || format!("{kind:?}: subdivision does not commute with gluing"))?;
    let per_edge = sa.child.faces(1).iter().filter(|f| {
        sa.carrier[*f].iter().all(|v| phi.contains_key(v)) && sa.carrier[*f].len() == 2
    }).count();
    ensure(rhs.r[1] == per_edge * glued.r[1], || format!("r' = {} vs {} * {}", rhs.r[1], per_edge, glued.r[1]))
}

pub fn random_symmetric(rng: &mut StdRng, n: usize, scale: f64) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let x = rng.gen_range(-scale..scale);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}
