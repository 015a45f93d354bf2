//! Schreier graphs of the self-similar group generated by `a` and `b` on
//! words over `{1, ..., d+1}`, and the facet addressing that identifies
//! them with dual graphs of iterated cone subdivisions of a simplex.
//!
//! `a` rotates the last letter through the cycle `d+1 -> d -> ... -> 1 -> d+1`.
//! `b` acts by
//!
//! ```text
//! b(w x)     = a^(d+1-x)(w) (d+1-x)   for x != d+1
//! b(w (d+1)) = b(w) (d+1)
//! b(x)       = x
//! ```
//!
//! Words are indexed with the last letter most significant, so the block of
//! rows for words ending in `i` is the i-th block.

use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;

use crate::complex::{Complex, SignedGraph, SparseMatrix};
use crate::error::{Error, Result};
use crate::subdivide::{iterate_results, Kind};

pub type Word = Vec<u8>;

fn check_params(d: usize, n: usize) -> Result<()> {
    if d == 0 || d > 254 {
        return Err(Error::InvalidArgument(format!("d = {d} out of range")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(())
}

fn order_of(d: usize, n: usize) -> Result<usize> {
    (d + 1).checked_pow(n as u32).ok_or(Error::Budget { order: usize::MAX, limit: crate::max_order() })
}

pub fn word_index(d: usize, w: &[u8]) -> usize {
    w.iter().rev().fold(0, |acc, &x| acc * (d + 1) + (x as usize - 1))
}

pub fn index_word(d: usize, n: usize, mut idx: usize) -> Word {
    let mut w = Vec::with_capacity(n);
    for _ in 0..n {
        w.push((idx % (d + 1)) as u8 + 1);
        idx /= d + 1;
    }
    w
}

/// The letter permutation `d+1 -> d -> ... -> 1 -> d+1`.
pub fn alpha(d: usize, x: u8) -> u8 {
    if x == 1 {
        d as u8 + 1
    } else {
        x - 1
    }
}

pub fn act_a(d: usize, w: &[u8], k: usize) -> Word {
    let mut out = w.to_vec();
    if let Some(last) = out.last_mut() {
        for _ in 0..k % (d + 1) {
            *last = alpha(d, *last);
        }
    }
    out
}

pub fn act_b(d: usize, w: &[u8]) -> Word {
    if w.len() <= 1 {
        return w.to_vec();
    }
    let (head, x) = (&w[..w.len() - 1], w[w.len() - 1]);
    let top = d as u8 + 1;
    let mut out = if x == top {
        act_b(d, head)
    } else {
        act_a(d, head, (top - x) as usize)
    };
    out.push(if x == top { top } else { top - x });
    out
}

#[derive(Clone, Debug)]
pub struct SchreierGraph {
    pub d: usize,
    pub n: usize,
    /// `(row, col, count)` for generators `a, ..., a^d, b`, row = image.
    pub adjacency: SparseMatrix,
}

impl SchreierGraph {
    pub fn order(&self) -> usize {
        self.adjacency.rows
    }

    /// The adjacency matrix with loops on the diagonal.
    pub fn dense(&self) -> DMatrix<i64> {
        self.adjacency.to_dense()
    }

    pub fn loop_count(&self) -> usize {
        self.adjacency
            .entries
            .iter()
            .filter(|e| e.0 == e.1)
            .map(|e| e.2 as usize)
            .sum()
    }

    /// `(d+1) I - adjacency`.
    pub fn laplacian(&self) -> DMatrix<i64> {
        let n = self.order();
        DMatrix::<i64>::identity(n, n) * (self.d as i64 + 1) - self.dense()
    }

    /// The graph with loops removed and every edge signed `+1`.
    pub fn reduced(&self) -> Result<(SignedGraph, usize)> {
        let mut g = SignedGraph::new(self.order());
        for &(r, c, v) in &self.adjacency.entries {
            if r < c {
                if v != 1 {
                    return Err(Error::Invariant(format!("multi-edge {r}-{c}")));
                }
                g.add_edge(r, c, 1)?;
            }
        }
        Ok((g, self.loop_count()))
    }
}

pub fn build_schreier(d: usize, n: usize) -> Result<SchreierGraph> {
    check_params(d, n)?;
    let order = order_of(d, n)?;
    crate::check_budget(order)?;
    let mut counts: HashMap<(usize, usize), i64> = HashMap::new();
    for idx in 0..order {
        let w = index_word(d, n, idx);
        for k in 1..=d {
            *counts.entry((word_index(d, &act_a(d, &w, k)), idx)).or_default() += 1;
        }
        *counts.entry((word_index(d, &act_b(d, &w)), idx)).or_default() += 1;
    }
    let mut entries: Vec<(usize, usize, i64)> = counts.into_iter().map(|((r, c), v)| (r, c, v)).collect();
    entries.sort_unstable();
    let g = SchreierGraph { d, n, adjacency: SparseMatrix { rows: order, cols: order, entries } };
    if g.dense() != g.dense().transpose() {
        return Err(Error::Invariant("Schreier adjacency is not symmetric".into()));
    }
    Ok(g)
}

fn kron(a: &DMatrix<i64>, b: &DMatrix<i64>) -> DMatrix<i64> {
    a.kronecker(b)
}

fn rep_a(d: usize, m: usize) -> DMatrix<i64> {
    if m == 0 {
        return DMatrix::identity(1, 1);
    }
    let mut p = DMatrix::<i64>::zeros(d + 1, d + 1);
    for x in 1..=d as u8 + 1 {
        p[(alpha(d, x) as usize - 1, x as usize - 1)] = 1;
    }
    let inner = (d + 1).pow(m as u32 - 1);
    kron(&p, &DMatrix::identity(inner, inner))
}

fn rep_b(d: usize, m: usize) -> DMatrix<i64> {
    if m <= 1 {
        let s = (d + 1).pow(m as u32);
        return DMatrix::identity(s, s);
    }
    let inner = (d + 1).pow(m as u32 - 1);
    let a = rep_a(d, m - 1);
    let mut out = DMatrix::<i64>::zeros(inner * (d + 1), inner * (d + 1));
    let mut pw = DMatrix::<i64>::identity(inner, inner);
    for r in 1..=d {
        pw = &a * &pw;
        let c = d + 1 - r;
        out.view_mut(((r - 1) * inner, (c - 1) * inner), (inner, inner)).copy_from(&pw);
    }
    out.view_mut((d * inner, d * inner), (inner, inner)).copy_from(&rep_b(d, m - 1));
    out
}

/// The adjacency of the Schreier graph assembled from its block recursion.
pub fn block_form(d: usize, n: usize) -> Result<DMatrix<i64>> {
    check_params(d, n)?;
    crate::check_budget(order_of(d, n)?)?;
    let inner = (d + 1).pow(n as u32 - 1);
    let ones = DMatrix::<i64>::from_element(d + 1, d + 1, 1) - DMatrix::identity(d + 1, d + 1);
    Ok(kron(&ones, &DMatrix::identity(inner, inner)) + rep_b(d, n))
}

/// `lambda (sum_k rho(a^k)) + rho(b) - mu I` at level `n`.
pub fn xi_matrix(d: usize, n: usize, mu: f64, lambda: f64) -> Result<DMatrix<f64>> {
    let g = build_schreier(d, n)?;
    let order = g.order();
    let mut m = DMatrix::<f64>::zeros(order, order);
    for idx in 0..order {
        let w = index_word(d, n, idx);
        for k in 1..=d {
            m[(word_index(d, &act_a(d, &w, k)), idx)] += lambda;
        }
        m[(word_index(d, &act_b(d, &w)), idx)] += 1.0;
        m[(idx, idx)] -= mu;
    }
    Ok(m)
}

/// Facets of `cd^n` of the simplex on `0..=d` with their addresses.
#[derive(Clone, Debug)]
pub struct FacetLabeling {
    pub complex: Complex,
    /// Address of the i-th facet in lexicographic order.
    pub words: Vec<Word>,
}

/// Addresses for `cd^n`, with the first-level facet missing vertex `j`
/// labelled `first[j]`.
pub fn facet_labeling_with(d: usize, n: usize, first: &[u8]) -> Result<FacetLabeling> {
    check_params(d, n)?;
    let mut sorted = first.to_vec();
    sorted.sort_unstable();
    if sorted != (1..=d as u8 + 1).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument("first-level labels must permute 1..=d+1".into()));
    }
    let levels = iterate_results(Kind::Cone, &Complex::simplex(d), n)?;
    let top = d as u8 + 1;

    let l1 = &levels[0];
    let mut words: Vec<Word> = l1
        .child
        .faces(d)
        .iter()
        .map(|f| {
            let missing = (0..=d as u32).find(|v| !f.contains(v)).unwrap();
            vec![first[missing as usize]]
        })
        .collect();

    for res in &levels[1..] {
        let parent = &res.parent;
        let cof = parent.cofaces(d - 1);
        let mut next = Vec::with_capacity(res.child.faces(d).len());
        for tau in res.child.faces(d) {
            let nu = &res.carrier[tau];
            let apex = *tau.iter().find(|v| res.new_vertex_provenance.contains_key(v)).unwrap();
            let sigma: Vec<u32> = tau.iter().copied().filter(|&v| v != apex).collect();
            let a = parent.index_of(nu).unwrap();
            let wa = &words[a];
            let s = parent.index_of(&sigma).unwrap();
            let letter = match cof[s].iter().map(|c| c.0).find(|&c| c != a) {
                None => top,
                Some(b) => {
                    let wb = &words[b];
                    let k = wa.len();
                    if wa[..k - 1] == wb[..k - 1] {
                        let l = (wb[k - 1] as i32 - wa[k - 1] as i32).rem_euclid(top as i32);
                        l as u8
                    } else {
                        top
                    }
                }
            };
            let mut w = wa.clone();
            w.push(letter);
            next.push(w);
        }
        let distinct: BTreeSet<&Word> = next.iter().collect();
        if distinct.len() != next.len() {
            return Err(Error::Invariant("facet labeling is not injective".into()));
        }
        words = next;
    }
    let complex = levels.last().unwrap().child.clone();
    Ok(FacetLabeling { complex, words })
}

pub fn facet_labeling(d: usize, n: usize) -> Result<FacetLabeling> {
    let first: Vec<u8> = (1..=d as u8 + 1).collect();
    facet_labeling_with(d, n, &first)
}

/// Whether the labeling maps the top dual graph of `cd^n` onto the Schreier
/// graph with loops removed.
pub fn verify_approx(d: usize, n: usize) -> Result<bool> {
    verify_labeling(&facet_labeling(d, n)?, d, n)
}

pub fn verify_labeling(lab: &FacetLabeling, d: usize, n: usize) -> Result<bool> {
    let dual = lab.complex.dual_graph(d)?;
    let (g, loops) = build_schreier(d, n)?.reduced()?;
    let mapped: BTreeSet<(usize, usize)> = dual
        .edge_set()
        .into_iter()
        .map(|(a, b)| {
            let (x, y) = (word_index(d, &lab.words[a]), word_index(d, &lab.words[b]));
            (x.min(y), x.max(y))
        })
        .collect();
    Ok(loops == d + 1 && mapped == g.edge_set())
}
