use super::*;
use crate::complex::{compute_dual_geometry, generate_interval_mesh, generate_strip_mesh};
use crate::operators::{coboundary, dual_boundary_derivative, dual_derivative, trace_matrix};
use crate::test_fixtures::two_triangle_complex;

fn two_triangle_with_geometry() -> (
    crate::complex::SimplicialComplex,
    crate::complex::DualGeometry,
) {
    let k = two_triangle_complex();
    let g = compute_dual_geometry(&k).unwrap();
    (k, g)
}

#[test]
fn wave_structure_blocks() {
    // p = 2, q = 1 on the two-triangle mesh: blocks [[0, -dᵢ¹],[d⁰, 0]],
    // B = -[d_b¹; 0], C = [tr⁰, 0].
    let (k, g) = two_triangle_with_geometry();
    let d = assemble_dirac(&k, &g, 2, 1, DiracVariant::PrimalStored).unwrap();
    assert_eq!(d.r, 3);
    let di1 = dual_derivative(&k, 1).unwrap();
    assert_eq!(d.j12, di1.matrix.as_int().unwrap().neg());
    let d0 = coboundary(&k, 0).unwrap();
    assert_eq!(d.j21, *d0.matrix.as_int().unwrap());
    let db1 = dual_boundary_derivative(&k, 1).unwrap();
    assert_eq!(d.b_block, db1.matrix.as_int().unwrap().neg());
    let tr0 = trace_matrix(&k, 0).unwrap();
    assert_eq!(d.c_block, *tr0.matrix.as_int().unwrap());
    assert_eq!(d.boundary_input_row, 0);
    assert_eq!(d.dims, (4, 5, 4));
}

#[test]
fn telegraph_voltage_structure_blocks() {
    // p = q = 1, dual-stored on a 2-edge interval: [[0, d⁰],[dᵢ⁰, 0]] with
    // B = [0; d_b⁰] and e_b = -tr⁰ e_q.
    let (k, g) = generate_interval_mesh(2, 1.0).unwrap();
    let d = assemble_dirac(&k, &g, 1, 1, DiracVariant::DualStored).unwrap();
    let d0 = coboundary(&k, 0).unwrap();
    assert_eq!(d.j12, *d0.matrix.as_int().unwrap());
    let di0 = dual_derivative(&k, 0).unwrap();
    assert_eq!(d.j21, *di0.matrix.as_int().unwrap());
    let db0 = dual_boundary_derivative(&k, 0).unwrap();
    assert_eq!(d.b_block, *db0.matrix.as_int().unwrap());
    assert_eq!(d.boundary_input_row, 1);
    let tr0 = trace_matrix(&k, 0).unwrap();
    assert_eq!(d.c_block, tr0.matrix.as_int().unwrap().neg());

    // Hand-checked entries for the n = 2 mesh.
    assert_eq!(d.j12.get(0, 0), -1);
    assert_eq!(d.j12.get(0, 1), 1);
    assert_eq!(d.j12.get(1, 1), -1);
    assert_eq!(d.j12.get(1, 2), 1);
    assert_eq!(d.b_block.get(0, 0), -1);
    assert_eq!(d.b_block.get(2, 1), 1);
    assert_eq!(d.c_block.get(0, 0), 1);
    assert_eq!(d.c_block.get(1, 2), -1);
}

#[test]
fn telegraph_current_structure_blocks() {
    // p = q = 1, primal-stored: [[0, dᵢ⁰],[d⁰, 0]], B = [d_b⁰; 0],
    // f_b = -tr⁰ e_p.
    let (k, g) = generate_interval_mesh(3, 1.0).unwrap();
    let d = assemble_dirac(&k, &g, 1, 1, DiracVariant::PrimalStored).unwrap();
    assert_eq!(d.r, 2);
    let di0 = dual_derivative(&k, 0).unwrap();
    assert_eq!(d.j12, *di0.matrix.as_int().unwrap());
    let d0 = coboundary(&k, 0).unwrap();
    assert_eq!(d.j21, *d0.matrix.as_int().unwrap());
    let db0 = dual_boundary_derivative(&k, 0).unwrap();
    assert_eq!(d.b_block, *db0.matrix.as_int().unwrap());
    let tr0 = trace_matrix(&k, 0).unwrap();
    assert_eq!(d.c_block, tr0.matrix.as_int().unwrap().neg());
    assert_eq!(d.boundary_input_row, 0);
}

#[test]
fn invalid_degrees_rejected() {
    let (k, g) = two_triangle_with_geometry();
    assert!(matches!(
        assemble_dirac(&k, &g, 1, 1, DiracVariant::PrimalStored),
        Err(Error::InvalidDegrees(_))
    ));
    assert!(matches!(
        assemble_dirac(&k, &g, 3, 0, DiracVariant::PrimalStored),
        Err(Error::InvalidDegrees(_))
    ));
}

fn all_structures() -> Vec<SimplicialDirac> {
    let mut out = Vec::new();
    for n_edges in [1usize, 2, 4, 7] {
        let (k, g) = generate_interval_mesh(n_edges, 1.0).unwrap();
        for variant in [DiracVariant::PrimalStored, DiracVariant::DualStored] {
            out.push(assemble_dirac(&k, &g, 1, 1, variant).unwrap());
        }
    }
    let (k, g) = two_triangle_with_geometry();
    for (p, q) in [(2usize, 1usize), (1, 2)] {
        for variant in [DiracVariant::PrimalStored, DiracVariant::DualStored] {
            out.push(assemble_dirac(&k, &g, p, q, variant).unwrap());
        }
    }
    let (k, g) = generate_strip_mesh(2, 3, 3.0, 2.0).unwrap();
    for variant in [DiracVariant::PrimalStored, DiracVariant::DualStored] {
        out.push(assemble_dirac(&k, &g, 2, 1, variant).unwrap());
    }
    out
}

#[test]
fn bordered_operator_is_exactly_skew() {
    for d in all_structures() {
        assert_eq!(
            d.skew_residual(),
            0,
            "variant {} p={} q={} n={}",
            d.variant,
            d.p,
            d.q,
            d.n
        );
    }
}

#[test]
fn pairing_with_zero_tuple_vanishes_and_is_symmetric() {
    let (k, g) = two_triangle_with_geometry();
    let d = assemble_dirac(&k, &g, 2, 1, DiracVariant::PrimalStored).unwrap();
    let mut rng = crate::rng::Rng::new(17);
    let elem = d
        .element_from_efforts(
            &rng.vec_signed(d.j21.cols()),
            &rng.vec_signed(d.j12.cols()),
            &rng.vec_signed(d.dims.2),
        )
        .unwrap();
    let zero = d
        .element_from_efforts(
            &vec![0.0; d.j21.cols()],
            &vec![0.0; d.j12.cols()],
            &vec![0.0; d.dims.2],
        )
        .unwrap();
    assert_eq!(bilinear_pairing(&d, &elem, &zero).unwrap(), 0.0);

    let elem2 = d
        .element_from_efforts(
            &rng.vec_signed(d.j21.cols()),
            &rng.vec_signed(d.j12.cols()),
            &rng.vec_signed(d.dims.2),
        )
        .unwrap();
    let ab = bilinear_pairing(&d, &elem, &elem2).unwrap();
    let ba = bilinear_pairing(&d, &elem2, &elem).unwrap();
    assert_eq!(ab, ba, "the pairing formula is symmetric");
}

#[test]
fn isotropy_and_graph_dimension() {
    for d in all_structures() {
        let report = verify_dirac(&d, 100, 7);
        assert_eq!(report.skew_residual, 0);
        assert!(
            report.isotropy_max_rel < 1e-12,
            "isotropy {:.3e} for {} p={} q={} n={}",
            report.isotropy_max_rel,
            d.variant,
            d.p,
            d.q,
            d.n
        );
        assert_eq!(report.graph_dim, report.expected_graph_dim);
        assert!(report.passed());
    }
}

#[test]
fn telegraph_n4_graph_dimension_is_eleven() {
    let (k, g) = generate_interval_mesh(4, 1.0).unwrap();
    let d = assemble_dirac(&k, &g, 1, 1, DiracVariant::DualStored).unwrap();
    let report = verify_dirac(&d, 10, 1);
    assert_eq!(report.expected_graph_dim, 4 + 5 + 2);
    assert_eq!(report.graph_dim, 11);
}

#[test]
fn corrupted_sign_has_nonzero_skew_residual() {
    let (k, g) = generate_interval_mesh(4, 1.0).unwrap();
    let mut d = assemble_dirac(&k, &g, 1, 1, DiracVariant::PrimalStored).unwrap();
    assert_eq!(d.skew_residual(), 0);
    d.corrupt_boundary_sign();
    assert!(d.skew_residual() > 0);
    let report = verify_dirac(&d, 10, 1);
    assert!(!report.passed());
}
