use std::f64::consts::PI;

use num_complex::Complex64;

use super::mesh::{BoundaryTag, Mesh, MeshKind};
use crate::eigensolve::{CsrMatrix, Scalar, TripletBuilder};
use crate::error::{Error, Result};
use crate::params::SymmetryClass;

/// Maps mesh nodes to unknowns: `u_node = coeff · x_dof`, `None` for Dirichlet nodes.
#[derive(Debug, Clone)]
pub struct DofMap<T> {
    pub node_to_dof: Vec<Option<(usize, T)>>,
    pub n_dof: usize,
}

impl<T: Scalar> DofMap<T> {
    /// Nodal values from a solution vector.
    pub fn expand(&self, x: &[T]) -> Vec<T> {
        self.node_to_dof
            .iter()
            .map(|m| m.map_or(T::default(), |(d, c)| c * x[d]))
            .collect()
    }

    /// Solution vector from nodal values (slave and Dirichlet nodes ignored).
    pub fn restrict(&self, u: &[T]) -> Vec<T> {
        let mut x = vec![T::default(); self.n_dof];
        for (node, m) in self.node_to_dof.iter().enumerate() {
            if let Some((d, c)) = m {
                if *c == T::from_re(1.0) {
                    x[*d] = u[node];
                }
            }
        }
        x
    }
}

/// Stiffness/mass pair with its constraint record.
#[derive(Debug, Clone)]
pub struct HermitianPencil<T> {
    pub k: CsrMatrix<T>,
    pub m: CsrMatrix<T>,
    pub dofs: DofMap<T>,
}

/// P1 element matrices of a triangle: `(stiffness, mass)`.
pub fn element_matrices(p: [[f64; 2]; 3]) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    let area = 0.5 * det;
    // gradients of barycentric coordinates
    let g = [
        [(p[1][1] - p[2][1]) / det, (p[2][0] - p[1][0]) / det],
        [(p[2][1] - p[0][1]) / det, (p[0][0] - p[2][0]) / det],
        [(p[0][1] - p[1][1]) / det, (p[1][0] - p[0][0]) / det],
    ];
    let mut k = [[0.0; 3]; 3];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
            m[i][j] = area / 12.0 * if i == j { 2.0 } else { 1.0 };
        }
    }
    (k, m)
}

/// Assembles `K[a, b] += conj(c_a) K_e c_b`, which is Hermitian entry by entry.
pub fn assemble_with_map<T: Scalar>(mesh: &Mesh, dofs: DofMap<T>) -> HermitianPencil<T> {
    let mut kb = TripletBuilder::new(dofs.n_dof);
    let mut mb = TripletBuilder::new(dofs.n_dof);
    for t in &mesh.triangles {
        let (ke, me) = element_matrices(t.map(|i| mesh.vertices[i]));
        let loc = t.map(|i| dofs.node_to_dof[i]);
        for a in 0..3 {
            let Some((da, ca)) = loc[a] else { continue };
            for b in 0..3 {
                let Some((db, cb)) = loc[b] else { continue };
                let c = ca.conj() * cb;
                kb.add(da, db, c.scale(ke[a][b]));
                mb.add(da, db, c.scale(me[a][b]));
            }
        }
    }
    HermitianPencil {
        k: kb.build(),
        m: mb.build(),
        dofs,
    }
}

fn dirichlet_nodes(mesh: &Mesh) -> Vec<bool> {
    let mut d = vec![false; mesh.vertices.len()];
    if mesh.class == SymmetryClass::Antisymmetric {
        for n in mesh.nodes_with_tag(BoundaryTag::SymmetryAxis) {
            d[n] = true;
        }
    }
    d
}

/// Floquet phase `e^{−iθ}`, exact at `θ ∈ {0, π}`.
pub fn bloch_phase(theta: f64) -> Complex64 {
    if theta == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if theta == PI {
        Complex64::new(-1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, -theta)
    }
}

/// Pencil of the cell operator at quasimomentum `theta`: `u|_{right} = e^{−iθ} u|_{left}`.
pub fn assemble_bloch_pencil(mesh: &Mesh, theta: f64) -> Result<HermitianPencil<Complex64>> {
    if mesh.kind != MeshKind::Cell {
        return Err(Error::Tying(
            "quasi-periodic tying needs a cell mesh".into(),
        ));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::param(
            "theta",
            format!("must lie in [0, π], got {theta}"),
        ));
    }
    let left = mesh.nodes_with_tag(BoundaryTag::LeftMaster);
    let right = mesh.nodes_with_tag(BoundaryTag::RightSlave);
    if left.len() != mesh.periodic_pairs.len() || right.len() != mesh.periodic_pairs.len() {
        return Err(Error::Tying(format!(
            "{} left and {} right nodes for {} pairs",
            left.len(),
            right.len(),
            mesh.periodic_pairs.len()
        )));
    }
    for &(a, b) in &mesh.periodic_pairs {
        let (va, vb) = (mesh.vertices[a], mesh.vertices[b]);
        if vb[0] - va[0] != 1.0 || va[1] != vb[1] {
            return Err(Error::Tying(format!(
                "nodes {a} and {b} are not translates"
            )));
        }
    }
    let dirichlet = dirichlet_nodes(mesh);
    let mut slave_of = vec![None; mesh.vertices.len()];
    for &(a, b) in &mesh.periodic_pairs {
        slave_of[b] = Some(a);
    }
    let p = bloch_phase(theta);
    let mut node_to_dof: Vec<Option<(usize, Complex64)>> = vec![None; mesh.vertices.len()];
    let mut n_dof = 0;
    for i in 0..mesh.vertices.len() {
        if slave_of[i].is_none() && !dirichlet[i] {
            node_to_dof[i] = Some((n_dof, Complex64::new(1.0, 0.0)));
            n_dof += 1;
        }
    }
    for (i, s) in slave_of.iter().enumerate() {
        if let Some(a) = s {
            node_to_dof[i] = node_to_dof[*a].map(|(d, _)| (d, p));
        }
    }
    Ok(assemble_with_map(mesh, DofMap { node_to_dof, n_dof }))
}

/// Real pencil of a supercell (natural conditions at the ends).
pub fn assemble_supercell_pencil(mesh: &Mesh) -> HermitianPencil<f64> {
    let dirichlet = dirichlet_nodes(mesh);
    let mut node_to_dof = vec![None; mesh.vertices.len()];
    let mut n_dof = 0;
    for i in 0..mesh.vertices.len() {
        if !dirichlet[i] {
            node_to_dof[i] = Some((n_dof, 1.0));
            n_dof += 1;
        }
    }
    assemble_with_map(mesh, DofMap { node_to_dof, n_dof })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::{eig_sparse_shift_invert, norm2};
    use crate::fem::build_cell_mesh;
    use crate::params::{LadderParams, LengthSpec};

    fn mesh(class: SymmetryClass) -> Mesh {
        let p = LadderParams::new(LengthSpec::integer(2), 0.1, 1.0).unwrap();
        build_cell_mesh(&p, class, 0.1 / 3.0).unwrap()
    }

    #[test]
    fn hermitian_by_construction() {
        let m = mesh(SymmetryClass::Symmetric);
        let p = assemble_bloch_pencil(&m, PI / 2.0).unwrap();
        assert_eq!(p.k.hermitian_defect(), 0.0);
        assert_eq!(p.m.hermitian_defect(), 0.0);
        assert!(!p.k.is_real());
        assert!(assemble_bloch_pencil(&m, PI).unwrap().k.is_real());
        assert!(assemble_bloch_pencil(&m, 0.0).unwrap().k.is_real());
        assert!(assemble_bloch_pencil(&m, 4.0).is_err());
    }

    #[test]
    fn constant_mode_at_zero_quasimomentum() {
        let m = mesh(SymmetryClass::Symmetric);
        let p = assemble_bloch_pencil(&m, 0.0).unwrap();
        let ones = vec![Complex64::new(1.0, 0.0); p.dofs.n_dof];
        assert!(norm2(&p.k.matvec(&ones)) < 1e-10);
        let r = eig_sparse_shift_invert(&p.k, &p.m, -1.0, 1, 1e-10).unwrap();
        assert!(r.values[0].abs() < 1e-9);
        let anti = assemble_bloch_pencil(&mesh(SymmetryClass::Antisymmetric), 0.0).unwrap();
        assert!(anti.dofs.n_dof < p.dofs.n_dof);
    }

    #[test]
    fn element_matrix_row_sums() {
        let (k, m) = element_matrices([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        for row in k {
            assert!(row.iter().sum::<f64>().abs() < 1e-15);
        }
        let total: f64 = m.iter().flatten().sum();
        assert!((total - 0.5).abs() < 1e-15);
    }
}
