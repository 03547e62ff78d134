//! Shared meshes and systems for unit tests.

use crate::complex::{
    build_complex, compute_dual_geometry, generate_interval_mesh, Point, SimplicialComplex,
};
use crate::dirac::{assemble_dirac, DiracVariant};
use crate::operators::hodge_diagonal;
use crate::phs::{assemble_phs, PortHamiltonianSystem, QuadraticHamiltonian, SystemLabel};

/// The two-triangle complex (counterclockwise faces [v0,v1,v2], [v1,v3,v2])
/// with acute, well-centered geometry.
pub fn two_triangle_complex() -> SimplicialComplex {
    build_complex(
        vec![
            Point::new(vec![0.0, 0.0]),
            Point::new(vec![2.0, 0.0]),
            Point::new(vec![1.0, 1.5]),
            Point::new(vec![3.0, 1.5]),
        ],
        &[vec![0, 1, 2], vec![1, 3, 2]],
    )
    .unwrap()
}

/// Lexicographic edge ids of the two-triangle complex for the oriented
/// edge order [v0,v1], [v1,v2], [v2,v0], [v1,v3], [v3,v2], with the sign
/// relating that oriented basis to our sorted basis.
pub const TWO_TRIANGLE_EDGE_MAP: [(usize, i64); 5] = [(0, 1), (2, 1), (1, -1), (3, 1), (4, -1)];

/// Current-input telegraph line with unit materials on [0, 1].
pub fn telegraph_current(n_edges: usize) -> PortHamiltonianSystem {
    let (k, g) = generate_interval_mesh(n_edges, 1.0).unwrap();
    let d = assemble_dirac(&k, &g, 1, 1, DiracVariant::PrimalStored).unwrap();
    let h0 = hodge_diagonal(&k, &g, 0).unwrap();
    let h1 = hodge_diagonal(&k, &g, 1).unwrap();
    let qp: Vec<f64> = h0.iter().map(|v| 1.0 / v).collect();
    let ham = QuadraticHamiltonian::new(qp, h1).unwrap();
    assemble_phs(&d, &ham, SystemLabel::TelegraphCurrentInput).unwrap()
}

/// Voltage-input telegraph line with unit materials on [0, 1].
pub fn telegraph_voltage(n_edges: usize) -> PortHamiltonianSystem {
    let (k, g) = generate_interval_mesh(n_edges, 1.0).unwrap();
    let d = assemble_dirac(&k, &g, 1, 1, DiracVariant::DualStored).unwrap();
    let h0 = hodge_diagonal(&k, &g, 0).unwrap();
    let h1 = hodge_diagonal(&k, &g, 1).unwrap();
    let qq: Vec<f64> = h0.iter().map(|v| 1.0 / v).collect();
    let ham = QuadraticHamiltonian::new(h1, qq).unwrap();
    assemble_phs(&d, &ham, SystemLabel::TelegraphVoltageInput).unwrap()
}

/// Unit-material wave system on the two-triangle mesh.
pub fn wave_two_triangle() -> PortHamiltonianSystem {
    let k = two_triangle_complex();
    let g = compute_dual_geometry(&k).unwrap();
    let d = assemble_dirac(&k, &g, 2, 1, DiracVariant::PrimalStored).unwrap();
    let h0 = hodge_diagonal(&k, &g, 0).unwrap();
    let h1 = hodge_diagonal(&k, &g, 1).unwrap();
    let qp: Vec<f64> = h0.iter().map(|v| 1.0 / v).collect();
    let ham = QuadraticHamiltonian::new(qp, h1).unwrap();
    assemble_phs(&d, &ham, SystemLabel::Wave2d).unwrap()
}
