use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{LadderParams, SymmetryClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryTag {
    Neumann,
    LeftMaster,
    RightSlave,
    SymmetryAxis,
}

impl BoundaryTag {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryTag::Neumann => "neumann",
            BoundaryTag::LeftMaster => "left_master",
            BoundaryTag::RightSlave => "right_slave",
            BoundaryTag::SymmetryAxis => "symmetry_axis",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshKind {
    Cell,
    Supercell { n_cells: usize },
}

/// Structured P1 triangulation of the lower half (`y ≤ 0`) of a ladder piece.
///
/// The horizontal strip occupies `y ∈ [−L/2, −L/2 + ε]`; rung `j` occupies
/// `|x − j| < w_j/2` above it, up to the symmetry axis `y = 0`.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<BoundaryEdge>,
    pub h: f64,
    pub params: LadderParams,
    pub class: SymmetryClass,
    pub kind: MeshKind,
    /// `(left, right)` node pairs at `x = ∓½` for quasi-periodic tying.
    pub periodic_pairs: Vec<(usize, usize)>,
}

struct Interval {
    a: f64,
    b: f64,
    rung: bool,
}

fn subdivide(iv: &Interval, h: f64, min_div: usize) -> usize {
    (((iv.b - iv.a) / h) * (1.0 - 1e-12))
        .ceil()
        .max(min_div as f64) as usize
}

/// Tensor-grid mesh over the given x intervals; rung intervals get the vertical part.
fn build(
    params: &LadderParams,
    class: SymmetryClass,
    kind: MeshKind,
    xs_iv: &[Interval],
    h: f64,
) -> Result<Mesh> {
    let l = params.l();
    let eps = params.eps;
    let y_iv = [
        Interval {
            a: -l / 2.0,
            b: -l / 2.0 + eps,
            rung: false,
        },
        Interval {
            a: -l / 2.0 + eps,
            b: 0.0,
            rung: true,
        },
    ];
    let mut xs = vec![xs_iv[0].a];
    let mut x_rung = Vec::new();
    for iv in xs_iv {
        let n = subdivide(iv, h, if iv.rung { 3 } else { 1 });
        for k in 1..=n {
            xs.push(if k == n {
                iv.b
            } else {
                iv.a + (iv.b - iv.a) * k as f64 / n as f64
            });
            x_rung.push(iv.rung);
        }
    }
    let mut ys = vec![y_iv[0].a];
    let mut y_upper = Vec::new();
    for (idx, iv) in y_iv.iter().enumerate() {
        let n = subdivide(iv, h, if idx == 0 { 3 } else { 1 });
        for k in 1..=n {
            ys.push(if k == n {
                iv.b
            } else {
                iv.a + (iv.b - iv.a) * k as f64 / n as f64
            });
            y_upper.push(iv.rung);
        }
    }
    let (nx, ny) = (xs.len() - 1, ys.len() - 1);
    let active = |i: usize, j: usize| !y_upper[j] || x_rung[i];

    let mut index = vec![usize::MAX; (nx + 1) * (ny + 1)];
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            let used = [
                (i.wrapping_sub(1), j.wrapping_sub(1)),
                (i, j.wrapping_sub(1)),
                (i.wrapping_sub(1), j),
                (i, j),
            ]
            .iter()
            .any(|&(ci, cj)| ci < nx && cj < ny && active(ci, cj));
            if used {
                index[id(i, j)] = vertices.len();
                vertices.push([xs[i], ys[j]]);
            }
        }
    }
    let mut triangles = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if !active(i, j) {
                continue;
            }
            let a = index[id(i, j)];
            let b = index[id(i + 1, j)];
            let c = index[id(i + 1, j + 1)];
            let d = index[id(i, j + 1)];
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }

    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for t in &triangles {
        for k in 0..3 {
            let (p, q) = (t[k], t[(k + 1) % 3]);
            *count.entry((p.min(q), p.max(q))).or_default() += 1;
        }
    }
    let (x_lo, x_hi) = (xs[0], xs[nx]);
    let mut boundary: Vec<BoundaryEdge> = count
        .into_iter()
        .filter(|&(_, c)| c == 1)
        .map(|((p, q), _)| {
            let (vp, vq) = (vertices[p], vertices[q]);
            let tag = if vp[0] == x_lo && vq[0] == x_lo && kind == MeshKind::Cell {
                BoundaryTag::LeftMaster
            } else if vp[0] == x_hi && vq[0] == x_hi && kind == MeshKind::Cell {
                BoundaryTag::RightSlave
            } else if vp[1] == 0.0 && vq[1] == 0.0 {
                BoundaryTag::SymmetryAxis
            } else {
                BoundaryTag::Neumann
            };
            BoundaryEdge { nodes: [p, q], tag }
        })
        .collect();
    boundary.sort_by_key(|e| e.nodes);

    let periodic_pairs = if kind == MeshKind::Cell {
        (0..=ny)
            .filter_map(|j| {
                let (a, b) = (index[id(0, j)], index[id(nx, j)]);
                (a != usize::MAX && b != usize::MAX).then_some((a, b))
            })
            .collect()
    } else {
        Vec::new()
    };

    Ok(Mesh {
        vertices,
        triangles,
        boundary,
        h,
        params: *params,
        class,
        kind,
        periodic_pairs,
    })
}

fn check_h(params: &LadderParams, h: f64) -> Result<()> {
    params.validate()?;
    if !(h > 0.0) {
        return Err(Error::param("h", format!("must be positive, got {h}")));
    }
    if h > params.eps / 3.0 * (1.0 + 1e-12) {
        return Err(Error::Geometry(format!(
            "h = {h} is too coarse: need h ≤ eps/3 = {} for three elements across a rung",
            params.eps / 3.0
        )));
    }
    Ok(())
}

fn rung_intervals(x_lo: f64, x_hi: f64, rungs: &[(f64, f64)]) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut cur = x_lo;
    for &(c, w) in rungs {
        out.push(Interval {
            a: cur,
            b: c - w / 2.0,
            rung: false,
        });
        out.push(Interval {
            a: c - w / 2.0,
            b: c + w / 2.0,
            rung: true,
        });
        cur = c + w / 2.0;
    }
    out.push(Interval {
        a: cur,
        b: x_hi,
        rung: false,
    });
    out
}

/// Half periodicity cell `x ∈ [−½, ½]` with one rung of width `ε` at `x = 0`.
pub fn build_cell_mesh(params: &LadderParams, class: SymmetryClass, h: f64) -> Result<Mesh> {
    check_h(params, h)?;
    build(
        params,
        class,
        MeshKind::Cell,
        &rung_intervals(-0.5, 0.5, &[(0.0, params.eps)]),
        h,
    )
}

/// Half ladder `|x| ≤ n_cells + ½` with the central rung of width `με`.
///
/// The global size `h` must satisfy `h ≤ ε/3`; the central rung always gets
/// at least three elements across, even when `με < 3h`.
pub fn build_supercell_mesh(
    params: &LadderParams,
    class: SymmetryClass,
    n_cells: usize,
    h: f64,
) -> Result<Mesh> {
    check_h(params, h)?;
    if n_cells < 4 {
        return Err(Error::param(
            "cells",
            format!("need at least 4 cells, got {n_cells}"),
        ));
    }
    let n = n_cells as i64;
    let rungs: Vec<(f64, f64)> = (-n..=n)
        .map(|j| (j as f64, params.rung_weight(j) * params.eps))
        .collect();
    if params.mu * params.eps >= 1.0 {
        return Err(Error::Geometry("central rung wider than the cell".into()));
    }
    let x = n as f64 + 0.5;
    build(
        params,
        class,
        MeshKind::Supercell { n_cells },
        &rung_intervals(-x, x, &rungs),
        h,
    )
}

impl Mesh {
    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|i| self.vertices[i]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    /// Analytic area of the half domain this mesh represents.
    pub fn analytic_area(&self) -> f64 {
        let (eps, l, mu) = (self.params.eps, self.params.l(), self.params.mu);
        let cell = eps * (1.0 - eps) + eps * l / 2.0;
        match self.kind {
            MeshKind::Cell => cell,
            MeshKind::Supercell { n_cells } => {
                (2 * n_cells + 1) as f64 * cell + (mu - 1.0) * eps * (l / 2.0 - eps)
            }
        }
    }

    pub fn nodes_with_tag(&self, tag: BoundaryTag) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .boundary
            .iter()
            .filter(|e| e.tag == tag)
            .flat_map(|e| e.nodes)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Plain-text export: vertex table, triangle table, tag table.
    ///
    /// ```text
    /// # ladder-mesh v1
    /// vertices <n>
    /// <x> <y>             (n lines)
    /// triangles <m>
    /// <a> <b> <c>         (m lines, 0-based, counter-clockwise)
    /// tags <k>
    /// <a> <b> <tag>       (k boundary edges)
    /// ```
    ///
    /// An optional nodal field is appended as `field <n>` followed by one
    /// `<re> <im>` line per vertex.
    pub fn to_text(&self, field: Option<&[(f64, f64)]>) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# ladder-mesh v1");
        let _ = writeln!(
            s,
            "# L={} eps={} mu={} class={} h={}",
            self.params.length, self.params.eps, self.params.mu, self.class, self.h
        );
        let _ = writeln!(s, "vertices {}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{:.17e} {:.17e}", v[0], v[1]);
        }
        let _ = writeln!(s, "triangles {}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        let _ = writeln!(s, "tags {}", self.boundary.len());
        for e in &self.boundary {
            let _ = writeln!(s, "{} {} {}", e.nodes[0], e.nodes[1], e.tag.as_str());
        }
        if let Some(f) = field {
            let _ = writeln!(s, "field {}", f.len());
            for (re, im) in f {
                let _ = writeln!(s, "{re:.17e} {im:.17e}");
            }
        }
        s
    }

    pub fn write_text(&self, path: &std::path::Path, field: Option<&[(f64, f64)]>) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_text(field).as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::LengthSpec;

    fn p(eps: f64, mu: f64) -> LadderParams {
        LadderParams::new(LengthSpec::integer(2), eps, mu).unwrap()
    }

    #[test]
    fn cell_area_and_pairs() {
        let m = build_cell_mesh(&p(0.1, 1.0), SymmetryClass::Symmetric, 0.1 / 3.0).unwrap();
        assert!((m.area() - m.analytic_area()).abs() < 1e-12);
        assert!(!m.periodic_pairs.is_empty());
        for &(a, b) in &m.periodic_pairs {
            assert_eq!(m.vertices[b][0] - m.vertices[a][0], 1.0);
            assert_eq!(m.vertices[a][1], m.vertices[b][1]);
        }
        let left = m.nodes_with_tag(BoundaryTag::LeftMaster);
        assert_eq!(left.len(), m.periodic_pairs.len());
        // three layers across the rung
        let across = m.vertices.iter().filter(|v| v[1] == 0.0).count();
        assert!(across >= 4);
        let h2 = m.h * m.h;
        assert!((0..m.triangles.len()).all(|t| m.triangle_area(t) > h2 / 100.0));
    }

    #[test]
    fn coarse_h_rejected() {
        assert!(matches!(
            build_cell_mesh(&p(0.1, 1.0), SymmetryClass::Symmetric, 0.05),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn supercell_area_with_correction() {
        let m = build_supercell_mesh(&p(0.1, 0.25), SymmetryClass::Symmetric, 4, 0.025).unwrap();
        assert!((m.area() - m.analytic_area()).abs() < 1e-12);
        let central: Vec<&[f64; 2]> = m
            .vertices
            .iter()
            .filter(|v| v[1] == 0.0 && v[0].abs() < 0.1)
            .collect();
        assert_eq!(central.len(), 4);
        assert!(central.iter().all(|v| v[0].abs() <= 0.0125 + 1e-15));
        assert!(m.nodes_with_tag(BoundaryTag::LeftMaster).is_empty());
    }

    #[test]
    fn unperturbed_supercell_is_translation_periodic() {
        let m = build_supercell_mesh(&p(0.1, 1.0), SymmetryClass::Symmetric, 4, 0.025).unwrap();
        let mut a: Vec<(i64, i64)> = Vec::new();
        let mut b: Vec<(i64, i64)> = Vec::new();
        let key = |x: f64, y: f64| ((x * 1e9).round() as i64, (y * 1e9).round() as i64);
        for v in &m.vertices {
            if v[0] >= -0.5 - 1e-9 && v[0] <= 0.5 + 1e-9 {
                a.push(key(v[0], v[1]));
            }
            if v[0] >= 0.5 - 1e-9 && v[0] <= 1.5 + 1e-9 {
                b.push(key(v[0] - 1.0, v[1]));
            }
        }
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }
}
