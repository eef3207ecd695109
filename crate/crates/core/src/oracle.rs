//! Brute-force 1-D finite elements on the limit graph.
//!
//! Independent of the closed-form code in [`crate::graph`]: every edge is
//! meshed with P1 elements and the weighted Kirchhoff conditions come out of
//! the variational form. Only the lower half of the graph (`y ≤ 0`) is kept;
//! the symmetric class gets a natural condition at `y = 0`, the
//! antisymmetric class a Dirichlet one.
//!
//! The perturbed graph is truncated at the horizontal mid-edges
//! `x = ±(N + ½)` with natural conditions. Those are mirror lines of the
//! periodic graph, so the truncation creates no spurious modes in the gaps.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigensolve::{eig_sparse_with, CsrMatrix, ShiftInvertOptions, TripletBuilder};
use crate::error::{Error, Result};
use crate::params::{LadderParams, SymmetryClass};

/// Graph edge an element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeId {
    /// Horizontal piece starting at abscissa `j` (half pieces at the ends).
    Horizontal(i64),
    /// Lower half of rung `j`.
    Rung(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineElement {
    pub nodes: [usize; 2],
    pub length: f64,
    pub weight: f64,
    pub edge: EdgeId,
}

/// Assembled P1 pencil of the truncated half-graph.
#[derive(Debug, Clone)]
pub struct GraphDiscretization {
    pub params: LadderParams,
    pub class: SymmetryClass,
    pub cells: usize,
    pub h: f64,
    pub positions: Vec<(f64, f64)>,
    pub elements: Vec<LineElement>,
    pub k: CsrMatrix<f64>,
    pub m: CsrMatrix<f64>,
}

fn divisions(len: f64, h: f64) -> usize {
    ((len / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

struct Builder {
    positions: Vec<(f64, f64)>,
    elements: Vec<LineElement>,
    /// Node index of each dropped (Dirichlet) node is `None`.
    dirichlet: Vec<bool>,
}

impl Builder {
    fn node(&mut self, p: (f64, f64)) -> usize {
        self.positions.push(p);
        self.dirichlet.push(false);
        self.positions.len() - 1
    }

    /// Meshes the segment from existing node `a` to `b_pos`; returns the last node.
    fn segment(
        &mut self,
        a: usize,
        b: Option<usize>,
        b_pos: (f64, f64),
        h: f64,
        weight: f64,
        edge: EdgeId,
    ) -> usize {
        let pa = self.positions[a];
        let len = ((b_pos.0 - pa.0).powi(2) + (b_pos.1 - pa.1).powi(2)).sqrt();
        let n = divisions(len, h);
        let mut prev = a;
        for i in 1..=n {
            let t = i as f64 / n as f64;
            let cur = if i == n {
                b.unwrap_or_else(|| self.node(b_pos))
            } else {
                self.node((pa.0 + t * (b_pos.0 - pa.0), pa.1 + t * (b_pos.1 - pa.1)))
            };
            self.elements.push(LineElement {
                nodes: [prev, cur],
                length: len / n as f64,
                weight,
                edge,
            });
            prev = cur;
        }
        prev
    }
}

/// Assembles `K`, `M` from line elements, dropping Dirichlet nodes and
/// tying node `slave` to `master` with `u_slave = phase · u_master`.
fn assemble<T: crate::eigensolve::Scalar>(
    n_nodes: usize,
    elements: &[LineElement],
    dirichlet: &[bool],
    tie: Option<(usize, usize, T)>,
) -> (CsrMatrix<T>, CsrMatrix<T>, Vec<Option<usize>>) {
    let mut dof = vec![None; n_nodes];
    let mut next = 0;
    for i in 0..n_nodes {
        let tied = tie.is_some_and(|(s, _, _)| s == i);
        if !dirichlet[i] && !tied {
            dof[i] = Some(next);
            next += 1;
        }
    }
    let map = |node: usize| -> Option<(usize, T)> {
        match tie {
            Some((s, mst, p)) if s == node => dof[mst].map(|d| (d, p)),
            _ => dof[node].map(|d| (d, T::from_re(1.0))),
        }
    };
    let mut kb = TripletBuilder::new(next);
    let mut mb = TripletBuilder::new(next);
    for e in elements {
        let ke = e.weight / e.length;
        let me = e.weight * e.length / 6.0;
        let loc = [map(e.nodes[0]), map(e.nodes[1])];
        for a in 0..2 {
            for b in 0..2 {
                if let (Some((da, ca)), Some((db, cb))) = (loc[a], loc[b]) {
                    let c = ca.conj() * cb;
                    let (kv, mv) = if a == b { (ke, 2.0 * me) } else { (-ke, me) };
                    kb.add(da, db, c.scale(kv));
                    mb.add(da, db, c.scale(mv));
                }
            }
        }
    }
    (kb.build(), mb.build(), dof)
}

/// P1 discretisation of the perturbed half-graph with `|j| ≤ cells`.
pub fn discretize_graph(
    params: &LadderParams,
    class: SymmetryClass,
    cells: usize,
    h: f64,
) -> Result<GraphDiscretization> {
    params.validate()?;
    if cells < 5 {
        return Err(Error::param(
            "cells",
            format!("need at least 5 cells, got {cells}"),
        ));
    }
    if !(h > 0.0 && h <= 0.1) {
        return Err(Error::param("h", format!("need 0 < h ≤ 1/10, got {h}")));
    }
    let l = params.l();
    let n = cells as i64;
    let mut b = Builder {
        positions: Vec::new(),
        elements: Vec::new(),
        dirichlet: Vec::new(),
    };
    let y0 = -l / 2.0;
    let mut prev = b.node((-(n as f64) - 0.5, y0));
    for j in -n..=n {
        let x = j as f64;
        let start = if j == -n { x - 0.5 } else { x - 1.0 };
        let v = b.segment(
            prev,
            None,
            (x, y0),
            h,
            1.0,
            EdgeId::Horizontal(start.floor() as i64),
        );
        let top = b.segment(v, None, (x, 0.0), h, params.rung_weight(j), EdgeId::Rung(j));
        if class == SymmetryClass::Antisymmetric {
            b.dirichlet[top] = true;
        }
        prev = v;
    }
    b.segment(
        prev,
        None,
        (n as f64 + 0.5, y0),
        h,
        1.0,
        EdgeId::Horizontal(n),
    );
    let (k, m, _) = assemble::<f64>(b.positions.len(), &b.elements, &b.dirichlet, None);
    Ok(GraphDiscretization {
        params: *params,
        class,
        cells,
        h,
        positions: b.positions,
        elements: b.elements,
        k,
        m,
    })
}

/// Eigenvalues `λ` of the truncated graph pencil inside `window`.
///
/// Shift-invert at the window centre, enlarging the request until some
/// returned value falls outside the window, so nothing inside is missed.
pub fn oracle_gap_eigenvalues(disc: &GraphDiscretization, window: (f64, f64)) -> Result<Vec<f64>> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::param("window", format!("empty window ({lo}, {hi})")));
    }
    let mut nev = 4;
    loop {
        let mut opts = ShiftInvertOptions::new(0.5 * (lo + hi), nev, 1e-10);
        opts.window = Some(window);
        opts.want_vectors = false;
        let r = eig_sparse_with(&disc.k, &disc.m, &opts)?;
        let inside = r.values_in_window();
        if inside.len() < r.len() || nev >= disc.k.n {
            return Ok(inside);
        }
        nev *= 2;
    }
}

/// Lowest `count` eigenvalues `λ` of the single-cell graph operator at quasimomentum `theta`.
///
/// The cell is `x ∈ [−½, ½]` with its vertex at the origin; the node at
/// `x = ½` is tied to the one at `x = −½` by `u(½) = e^{−iθ} u(−½)`.
pub fn oracle_band_edges(
    params: &LadderParams,
    class: SymmetryClass,
    theta: f64,
    h: f64,
    count: usize,
) -> Result<Vec<f64>> {
    params.validate()?;
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::param(
            "theta",
            format!("must lie in [0, π], got {theta}"),
        ));
    }
    if !(h > 0.0 && h <= 0.1) {
        return Err(Error::param("h", format!("need 0 < h ≤ 1/10, got {h}")));
    }
    let l = params.l();
    let y0 = -l / 2.0;
    let mut b = Builder {
        positions: Vec::new(),
        elements: Vec::new(),
        dirichlet: Vec::new(),
    };
    let left = b.node((-0.5, y0));
    let v = b.segment(left, None, (0.0, y0), h, 1.0, EdgeId::Horizontal(-1));
    let top = b.segment(v, None, (0.0, 0.0), h, 1.0, EdgeId::Rung(0));
    if class == SymmetryClass::Antisymmetric {
        b.dirichlet[top] = true;
    }
    let right = b.segment(v, None, (0.5, y0), h, 1.0, EdgeId::Horizontal(0));
    let phase = if theta == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if theta == PI {
        Complex64::new(-1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, -theta)
    };
    let (k, m, _) = assemble(
        b.positions.len(),
        &b.elements,
        &b.dirichlet,
        Some((right, left, phase)),
    );
    let count = count.min(k.n);
    let mut opts = ShiftInvertOptions::new(-1.0, count, 1e-10);
    opts.want_vectors = false;
    Ok(eig_sparse_with(&k, &m, &opts)?.values)
}

/// Observed order `log₂(|e₁ − e₂| / |e₂ − e₃|)` from three values at `h, h/2, h/4`.
pub fn richardson_order(values: [f64; 3]) -> f64 {
    ((values[0] - values[1]).abs() / (values[1] - values[2]).abs()).log2()
}

/// Richardson extrapolation of an `O(h²)` sequence at `h` and `h/2`.
pub fn richardson_extrapolate(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bloch_curves, discrete_eigenvalues, gaps};
    use crate::params::LengthSpec;

    fn params(mu: f64) -> LadderParams {
        LadderParams::graph(LengthSpec::integer(2), mu).unwrap()
    }

    #[test]
    fn constants_in_kernel_and_weights() {
        let d = discretize_graph(&params(1.0), SymmetryClass::Symmetric, 5, 0.05).unwrap();
        let ones = vec![1.0; d.k.n];
        assert!(d.k.matvec(&ones).iter().all(|v| v.abs() < 1e-10));
        assert_eq!(d.k.hermitian_defect(), 0.0);
        let d = discretize_graph(&params(0.25), SymmetryClass::Symmetric, 5, 0.05).unwrap();
        for e in &d.elements {
            let want = if e.edge == EdgeId::Rung(0) { 0.25 } else { 1.0 };
            assert_eq!(e.weight, want);
        }
        assert!(discretize_graph(&params(1.0), SymmetryClass::Symmetric, 4, 0.05).is_err());
        assert!(discretize_graph(&params(1.0), SymmetryClass::Symmetric, 5, 0.2).is_err());
    }

    #[test]
    fn cell_matches_bloch_curves() {
        let p = params(1.0);
        for (class, theta) in [
            (SymmetryClass::Symmetric, 0.0),
            (SymmetryClass::Symmetric, PI / 2.0),
            (SymmetryClass::Antisymmetric, 1.0),
        ] {
            let exact = &bloch_curves(2.0, class, 6.0, &[theta]).roots[0];
            let vals: Vec<Vec<f64>> = [0.02, 0.01]
                .iter()
                .map(|&h| oracle_band_edges(&p, class, theta, h, 3).unwrap())
                .collect();
            for i in 0..3 {
                let ex = richardson_extrapolate(vals[0][i], vals[1][i]);
                let w = exact[i];
                assert!(
                    (ex - w * w).abs() < 1e-5 * (1.0 + w * w),
                    "{class} θ={theta}: {ex} vs {}",
                    w * w
                );
            }
        }
        let sym0 = oracle_band_edges(&p, SymmetryClass::Symmetric, 0.0, 0.02, 1).unwrap();
        assert!(sym0[0].abs() < 1e-10);
        let anti = oracle_band_edges(&p, SymmetryClass::Antisymmetric, PI, 0.02, 1).unwrap();
        assert!(anti[0] > 0.1);
    }

    #[test]
    fn gap_eigenvalues_match_closed_form() {
        let gap = gaps(2.0, SymmetryClass::Symmetric, 3.0).unwrap()[0];
        let exact = discrete_eigenvalues(2.0, 0.25, SymmetryClass::Symmetric, &gap);
        let d = discretize_graph(&params(0.25), SymmetryClass::Symmetric, 10, 0.01).unwrap();
        let got =
            oracle_gap_eigenvalues(&d, (gap.lambda_b() + 1e-3, gap.lambda_t() - 1e-3)).unwrap();
        assert_eq!(got.len(), 2);
        for (g, e) in got.iter().zip(&exact) {
            assert!((g - e.lambda).abs() < 1e-3 * e.lambda);
        }
        let d = discretize_graph(&params(1.0), SymmetryClass::Symmetric, 10, 0.01).unwrap();
        assert!(
            oracle_gap_eigenvalues(&d, (gap.lambda_b() + 1e-3, gap.lambda_t() - 1e-3))
                .unwrap()
                .is_empty()
        );
    }
}
