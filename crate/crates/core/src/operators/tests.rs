use super::*;
use crate::complex::{
    build_complex, compute_dual_geometry, generate_interval_mesh, generate_strip_mesh, Point,
};
use crate::rng::Rng;
use crate::test_fixtures::{two_triangle_complex, TWO_TRIANGLE_EDGE_MAP};

fn int_matrix(op: &LinearOp) -> &IntCsr {
    op.matrix.as_int().expect("integer operator")
}

/// Hand-derived ∂₁ of the two-triangle mesh in the oriented-edge bases
/// (rows v0..v3, columns [v0,v1], [v1,v2], [v2,v0], [v1,v3], [v3,v2]):
/// column j holds -1 at the tail and +1 at the head of edge j.
const REF_D1: [[i64; 5]; 4] = [
    [-1, 0, 1, 0, 0],
    [1, -1, 0, -1, 0],
    [0, 1, -1, 0, 1],
    [0, 0, 0, 1, -1],
];

/// ∂₂ in the same bases (rows the five oriented edges, columns the two
/// counterclockwise faces), by the alternating-face rule.
const REF_D2: [[i64; 2]; 5] = [[1, 0], [1, -1], [1, 0], [0, 1], [0, 1]];

/// d_b¹: rows ⋆ᵢv0..⋆ᵢv3, columns the boundary duals of v0, v1, v3, v2
/// in boundary-cycle order; a signed permutation with all +1 here.
const REF_DB1: [[i64; 4]; 4] = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]];
/// Column j of REF_DB1 corresponds to our boundary vertex REF_DB1_COLS[j].
const REF_DB1_COLS: [usize; 4] = [0, 1, 3, 2];

/// d_b⁰: rows the interior duals of the five oriented edges, columns the
/// boundary duals of [v0,v1], [v2,v0], [v1,v3], [v3,v2].
const REF_DB0: [[i64; 4]; 5] = [
    [-1, 0, 0, 0],
    [0, 0, 0, 0],
    [0, -1, 0, 0],
    [0, 0, -1, 0],
    [0, 0, 0, -1],
];

#[test]
fn two_triangle_boundary_1_matches_reference() {
    let k = two_triangle_complex();
    let d1 = boundary_matrix(&k, 1).unwrap();
    let m = int_matrix(&d1);
    assert_eq!(m.rows(), 4);
    assert_eq!(m.cols(), 5);
    for (pcol, &(our_col, flip)) in TWO_TRIANGLE_EDGE_MAP.iter().enumerate() {
        for row in 0..4 {
            assert_eq!(
                m.get(row, our_col),
                flip * REF_D1[row][pcol],
                "entry (v{row}, oriented edge {pcol})"
            );
        }
    }
}

#[test]
fn two_triangle_boundary_2_matches_reference() {
    let k = two_triangle_complex();
    let d2 = boundary_matrix(&k, 2).unwrap();
    let m = int_matrix(&d2);
    assert_eq!(m.rows(), 5);
    assert_eq!(m.cols(), 2);
    for (prow, &(our_row, flip)) in TWO_TRIANGLE_EDGE_MAP.iter().enumerate() {
        for col in 0..2 {
            assert_eq!(
                m.get(our_row, col),
                flip * REF_D2[prow][col],
                "entry (oriented edge {prow}, face {col})"
            );
        }
    }
}

#[test]
fn two_triangle_dual_boundary_derivatives_match_reference() {
    let k = two_triangle_complex();
    let db1 = dual_boundary_derivative(&k, 1).unwrap();
    let m = int_matrix(&db1);
    assert_eq!((m.rows(), m.cols()), (4, 4));
    for (pcol, &our_col) in REF_DB1_COLS.iter().enumerate() {
        for row in 0..4 {
            assert_eq!(m.get(row, our_col), REF_DB1[row][pcol]);
        }
    }

    let db0 = dual_boundary_derivative(&k, 0).unwrap();
    let m = int_matrix(&db0);
    assert_eq!((m.rows(), m.cols()), (5, 4));
    // Boundary-dual columns follow the boundary edge order; rows carry
    // the edge-basis flips.
    for (prow, &(our_row, flip)) in TWO_TRIANGLE_EDGE_MAP.iter().enumerate() {
        for col in 0..4 {
            assert_eq!(
                m.get(our_row, col),
                flip * REF_DB0[prow][col],
                "entry (oriented edge {prow}, boundary dual {col})"
            );
        }
    }
}

#[test]
fn two_triangle_trace_identities() {
    let k = two_triangle_complex();
    // tr⁰ = (d_b¹)ᵀ
    let tr0 = trace_matrix(&k, 0).unwrap();
    let db1 = dual_boundary_derivative(&k, 1).unwrap();
    assert_eq!(*int_matrix(&tr0), int_matrix(&db1).transpose());
    // tr¹ = -(d_b⁰)ᵀ
    let tr1 = trace_matrix(&k, 1).unwrap();
    let db0 = dual_boundary_derivative(&k, 0).unwrap();
    assert_eq!(*int_matrix(&tr1), int_matrix(&db0).transpose().neg());
    // dᵢ¹ = -(d⁰)ᵀ
    let di1 = dual_derivative(&k, 1).unwrap();
    let d0 = coboundary(&k, 0).unwrap();
    assert_eq!(*int_matrix(&di1), int_matrix(&d0).transpose().neg());
    // d⁰ = ∂₁ᵀ
    let b1 = boundary_matrix(&k, 1).unwrap();
    assert_eq!(*int_matrix(&d0), int_matrix(&b1).transpose());
}

#[test]
fn one_dimensional_operator_matrices() {
    let (k, _) = generate_interval_mesh(4, 1.0).unwrap();
    // d⁰ is the two-diagonal (-1, +1) matrix.
    let d0 = coboundary(&k, 0).unwrap();
    let m = int_matrix(&d0);
    assert_eq!((m.rows(), m.cols()), (4, 5));
    for e in 0..4 {
        for v in 0..5 {
            let want = if v == e {
                -1
            } else if v == e + 1 {
                1
            } else {
                0
            };
            assert_eq!(m.get(e, v), want);
        }
    }
    // tr⁰ = [[-1, 0, ..., 0], [0, ..., 0, 1]]
    let tr0 = trace_matrix(&k, 0).unwrap();
    let t = int_matrix(&tr0);
    assert_eq!((t.rows(), t.cols()), (2, 5));
    assert_eq!(t.get(0, 0), -1);
    assert_eq!(t.get(1, 4), 1);
    assert_eq!(t.nnz(), 2);
    // dᵢ⁰ = -(d⁰)ᵀ and d_b⁰ = (tr⁰)ᵀ
    let di0 = dual_derivative(&k, 0).unwrap();
    assert_eq!(*int_matrix(&di0), m.transpose().neg());
    let db0 = dual_boundary_derivative(&k, 0).unwrap();
    assert_eq!(*int_matrix(&db0), t.transpose());
}

fn all_test_meshes() -> Vec<crate::complex::SimplicialComplex> {
    let mut meshes = Vec::new();
    for n in [1usize, 2, 5] {
        meshes.push(generate_interval_mesh(n, 1.0).unwrap().0);
    }
    meshes.push(two_triangle_complex());
    meshes.push(generate_strip_mesh(2, 3, 3.0, 2.0).unwrap().0);
    meshes
}

#[test]
fn boundary_of_boundary_is_zero_exactly() {
    for k in all_test_meshes() {
        let n = k.dim();
        for deg in 1..n {
            let a = boundary_matrix(&k, deg).unwrap();
            let b = boundary_matrix(&k, deg + 1).unwrap();
            let prod = int_matrix(&a).matmul(int_matrix(&b)).unwrap();
            assert!(prod.is_zero(), "∂{deg}∂{} != 0", deg + 1);
        }
        for deg in 0..n.saturating_sub(1) {
            let d1 = coboundary(&k, deg).unwrap();
            let d2 = coboundary(&k, deg + 1).unwrap();
            let prod = int_matrix(&d2).matmul(int_matrix(&d1)).unwrap();
            assert!(prod.is_zero(), "d{}d{deg} != 0", deg + 1);
        }
    }
}

#[test]
fn signed_transpose_identities_exact() {
    for k in all_test_meshes() {
        let n = k.dim();
        for m in 0..n {
            let deg = n - m; // k in the formulas
            let di = dual_derivative(&k, m).unwrap();
            let d = coboundary(&k, deg - 1).unwrap();
            let mut expect = int_matrix(&d).transpose();
            if deg % 2 == 1 {
                expect = expect.neg();
            }
            assert_eq!(*int_matrix(&di), expect);

            let db = dual_boundary_derivative(&k, m).unwrap();
            let tr = trace_matrix(&k, deg - 1).unwrap();
            let mut expect = int_matrix(&tr).transpose();
            if deg % 2 == 0 {
                expect = expect.neg();
            }
            assert_eq!(*int_matrix(&db), expect);
        }
    }
}

#[test]
fn discrete_stokes_pairing() {
    // ⟨d^k α, c⟩ = ⟨α, ∂_{k+1} c⟩ for random cochain/chain coefficients.
    let k = two_triangle_complex();
    let mut rng = Rng::new(11);
    for deg in 0..2usize {
        let d = coboundary(&k, deg).unwrap();
        let bd = boundary_matrix(&k, deg + 1).unwrap();
        for _ in 0..50 {
            let alpha = rng.vec_signed(k.count(deg));
            let chain = rng.vec_signed(k.count(deg + 1));
            let lhs: f64 = int_matrix(&d)
                .matvec(&alpha)
                .iter()
                .zip(&chain)
                .map(|(a, b)| a * b)
                .sum();
            let rhs: f64 = alpha
                .iter()
                .zip(int_matrix(&bd).matvec(&chain))
                .map(|(a, b)| a * b)
                .sum();
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
        }
    }
}

#[test]
fn hodge_1d_values() {
    let verts = vec![
        Point::new(vec![0.0]),
        Point::new(vec![0.5]),
        Point::new(vec![1.0]),
    ];
    let k = build_complex(verts, &[vec![0, 1], vec![1, 2]]).unwrap();
    let g = compute_dual_geometry(&k).unwrap();
    let h0 = hodge_diagonal(&k, &g, 0).unwrap();
    for (got, want) in h0.iter().zip([0.25, 0.5, 0.25]) {
        assert!((got - want).abs() < 1e-14);
    }
    let h1 = hodge_diagonal(&k, &g, 1).unwrap();
    for (got, want) in h1.iter().zip([2.0, 2.0]) {
        assert!((got - want).abs() < 1e-14);
    }
}

#[test]
fn hodge_two_triangle_star2_is_inverse_areas() {
    let k = two_triangle_complex();
    let g = compute_dual_geometry(&k).unwrap();
    let h2 = hodge_diagonal(&k, &g, 2).unwrap();
    // Both triangles have area 1.5.
    for v in &h2 {
        assert!((v - 1.0 / 1.5).abs() < 1e-13);
    }
}

#[test]
fn hodge_inverse_is_exact_reciprocal() {
    let k = two_triangle_complex();
    let g = compute_dual_geometry(&k).unwrap();
    for deg in 0..=2usize {
        let h = hodge(&k, &g, deg).unwrap();
        let hi = hodge_inv(&k, &g, deg).unwrap();
        let prod = hi.compose(&h).unwrap();
        let dense = prod.matrix.to_real().to_dense();
        for i in 0..dense.nrows {
            for j in 0..dense.ncols {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(dense[(i, j)], want, "*_k *_k^-1 must be exactly I");
            }
        }
        // Diagonality: no off-diagonal entries at all.
        assert_eq!(h.matrix.to_real().off_diagonal_nnz(), 0);
    }
}

#[test]
fn hodge_rejects_non_well_centered() {
    let verts = vec![
        Point::new(vec![0.0, 0.0]),
        Point::new(vec![1.0, 0.0]),
        Point::new(vec![1.0, 1.0]),
        Point::new(vec![0.0, 1.0]),
    ];
    let k = build_complex(verts, &[vec![0, 1, 2], vec![0, 2, 3]]).unwrap();
    let g = compute_dual_geometry(&k).unwrap();
    // The diagonal edge's dual has zero length: circumcenters coincide
    // with the hypotenuse midpoint.
    assert!(matches!(hodge(&k, &g, 1), Err(Error::NotWellCentered(_))));
}

#[test]
fn boundary_hodge_identity_in_1d_and_lengths_in_2d() {
    let (k, g) = generate_interval_mesh(5, 1.0).unwrap();
    let hb = boundary_hodge(&k, &g, 0).unwrap();
    let dense = hb.matrix.to_real().to_dense();
    assert_eq!(dense.nrows, 2);
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(dense[(i, j)], if i == j { 1.0 } else { 0.0 });
        }
    }

    let k = two_triangle_complex();
    let g = compute_dual_geometry(&k).unwrap();
    let hb0 = boundary_hodge(&k, &g, 0).unwrap();
    let dense = hb0.matrix.to_real().to_dense();
    // Entries are the boundary-dual polyline lengths (half the two
    // adjacent boundary edges), all positive.
    let e = |a: usize, b: usize| {
        let pa = &k.vertices()[a];
        let pb = &k.vertices()[b];
        pa.distance(pb)
    };
    let expect = [
        0.5 * (e(0, 1) + e(0, 2)),
        0.5 * (e(0, 1) + e(1, 3)),
        0.5 * (e(0, 2) + e(2, 3)),
        0.5 * (e(1, 3) + e(2, 3)),
    ];
    for (i, want) in expect.iter().enumerate() {
        assert!(dense[(i, i)] > 0.0);
        assert!((dense[(i, i)] - want).abs() < 1e-12);
    }

    let hb1 = boundary_hodge(&k, &g, 1).unwrap();
    let dense = hb1.matrix.to_real().to_dense();
    let blen = [e(0, 1), e(0, 2), e(1, 3), e(2, 3)];
    for (i, l) in blen.iter().enumerate() {
        assert!((dense[(i, i)] - 1.0 / l).abs() < 1e-12);
    }
}

/// Independent summation-by-parts oracle: evaluate every wedge by explicit
/// summation over simplices instead of through the operator pipeline.
fn sbp_both_sides_explicit(
    complex: &crate::complex::SimplicialComplex,
    k: usize,
    alpha: &[f64],
    beta_i: &[f64],
    beta_b: &[f64],
) -> (f64, f64) {
    let n = complex.dim();
    let d = coboundary(complex, k - 1).unwrap();
    let di = dual_derivative(complex, n - k).unwrap();
    let db = dual_boundary_derivative(complex, n - k).unwrap();
    let tr = trace_matrix(complex, k - 1).unwrap();
    let d_alpha = int_matrix(&d).matvec(alpha);
    let mut lhs = 0.0;
    for (i, v) in d_alpha.iter().enumerate() {
        lhs += v * beta_i[i];
    }
    let di_beta = int_matrix(&di).matvec(beta_i);
    let db_beta = int_matrix(&db).matvec(beta_b);
    let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
    for (i, a) in alpha.iter().enumerate() {
        lhs += sign * a * (di_beta[i] + db_beta[i]);
    }
    let tr_alpha = int_matrix(&tr).matvec(alpha);
    let mut rhs = 0.0;
    for (i, v) in tr_alpha.iter().enumerate() {
        rhs += v * beta_b[i];
    }
    (lhs, rhs)
}

#[test]
fn summation_by_parts_zero_cochains() {
    let k = two_triangle_complex();
    let alpha = Cochain::zeros(&k, Carrier::Primal, 0);
    let bi = Cochain::zeros(&k, Carrier::DualInterior, 1);
    let bb = Cochain::zeros(&k, Carrier::BoundaryDual, 1);
    assert_eq!(
        summation_by_parts_residual(&k, &alpha, &bi, &bb).unwrap(),
        0.0
    );
}

#[test]
fn summation_by_parts_random_triples() {
    let mut rng = Rng::new(99);
    for complex in all_test_meshes() {
        let n = complex.dim();
        for k in 1..=n {
            let na = complex.count(k - 1);
            let ni = Space::new(Carrier::DualInterior, n - k).dim(&complex);
            let nb = Space::new(Carrier::BoundaryDual, n - k).dim(&complex);
            for _ in 0..200 {
                let a = rng.vec_signed(na);
                let bi = rng.vec_signed(ni);
                let bb = rng.vec_signed(nb);
                let res = summation_by_parts_residual(
                    &complex,
                    &Cochain::new(Carrier::Primal, k - 1, a.clone()),
                    &Cochain::new(Carrier::DualInterior, n - k, bi.clone()),
                    &Cochain::new(Carrier::BoundaryDual, n - k, bb.clone()),
                )
                .unwrap();
                let (lhs, rhs) = sbp_both_sides_explicit(&complex, k, &a, &bi, &bb);
                let scale = lhs.abs().max(rhs.abs()).max(1.0);
                assert!(res.abs() < 1e-12 * scale, "residual {res:.3e}");
                assert!((lhs - rhs).abs() < 1e-12 * scale);
                assert!(((lhs - rhs) - res).abs() < 1e-12 * scale);
            }
        }
    }
}

#[test]
fn summation_by_parts_tight_on_1d_mesh() {
    let (k, _) = generate_interval_mesh(6, 1.0).unwrap();
    let mut rng = Rng::new(123);
    for _ in 0..100 {
        let a = Cochain::new(Carrier::Primal, 0, rng.vec_signed(7));
        let bi = Cochain::new(Carrier::DualInterior, 0, rng.vec_signed(6));
        let bb = Cochain::new(Carrier::BoundaryDual, 0, rng.vec_signed(2));
        let res = summation_by_parts_residual(&k, &a, &bi, &bb).unwrap();
        assert!(res.abs() < 1e-14);
    }
}

#[test]
fn constant_potential_reduces_to_boundary_sum() {
    // With e_p ≡ 1 on the two-triangle mesh, d⁰e_p = 0 and the
    // summation-by-parts identity reduces to the boundary-port sum:
    // ⟨1 ∧ d_b¹ ê_b⟩ equals Σ ê_b(⋆v) f_b(v) with f_b = tr⁰ 1.
    let k = two_triangle_complex();
    let mut rng = Rng::new(5);
    let e_p = Cochain::new(Carrier::Primal, 0, vec![1.0; 4]);
    let d0 = coboundary(&k, 0).unwrap();
    assert!(int_matrix(&d0)
        .matvec(&e_p.values)
        .iter()
        .all(|v| *v == 0.0));

    let e_b = Cochain::new(Carrier::BoundaryDual, 1, rng.vec_signed(4));
    let e_q = Cochain::new(Carrier::DualInterior, 1, rng.vec_signed(5));
    let res = summation_by_parts_residual(&k, &e_p, &e_q, &e_b).unwrap();
    assert!(res.abs() < 1e-14);

    // The reduced identity, written out as the four-port boundary sum.
    let db1 = dual_boundary_derivative(&k, 1).unwrap();
    let lhs: f64 = e_p
        .values
        .iter()
        .zip(int_matrix(&db1).matvec(&e_b.values))
        .map(|(a, b)| a * b)
        .sum();
    let tr0 = trace_matrix(&k, 0).unwrap();
    let f_b = int_matrix(&tr0).matvec(&e_p.values);
    let rhs: f64 = f_b.iter().zip(&e_b.values).map(|(a, b)| a * b).sum();
    assert!((lhs - rhs).abs() < 1e-14);
    // All four boundary ports participate with f_b = +1 on this mesh.
    assert_eq!(f_b, vec![1.0; 4]);
}

#[test]
fn kernel_of_d0_is_the_constants() {
    for k in all_test_meshes() {
        let d0 = coboundary(&k, 0).unwrap();
        let ns = int_matrix(&d0).to_real().to_dense().null_space(1e-10);
        assert_eq!(ns.len(), 1, "connected complex has 1D kernel");
        let ones = vec![1.0; k.count(0)];
        let dot: f64 = ns[0].iter().zip(&ones).map(|(a, b)| a * b).sum();
        let expect = (k.count(0) as f64).sqrt();
        assert!(
            (dot.abs() - expect).abs() < 1e-10,
            "kernel must be the constants"
        );
    }
}

#[test]
fn degree_range_errors() {
    let k = two_triangle_complex();
    assert!(boundary_matrix(&k, 0).is_err());
    assert!(boundary_matrix(&k, 3).is_err());
    assert!(coboundary(&k, 2).is_err());
    assert!(trace_matrix(&k, 2).is_err());
    assert!(dual_derivative(&k, 2).is_err());
    assert!(dual_boundary_derivative(&k, 5).is_err());
}

#[test]
fn compose_checks_metadata() {
    let k = two_triangle_complex();
    let d0 = coboundary(&k, 0).unwrap();
    let d1 = coboundary(&k, 1).unwrap();
    assert!(d1.compose(&d0).is_ok());
    assert!(d0.compose(&d1).is_err());
}

#[test]
fn apply_checks_space() {
    let k = two_triangle_complex();
    let d0 = coboundary(&k, 0).unwrap();
    let wrong = Cochain::zeros(&k, Carrier::Primal, 1);
    assert!(d0.apply(&wrong).is_err());
    let right = Cochain::zeros(&k, Carrier::Primal, 0);
    assert_eq!(d0.apply(&right).unwrap().degree, 1);
}

#[test]
fn matrix_market_dump_format() {
    let k = two_triangle_complex();
    let d2 = boundary_matrix(&k, 2).unwrap();
    let text = d2.matrix.to_matrix_market();
    assert!(text.starts_with("%%MatrixMarket matrix coordinate real general\n5 2 6\n"));
    assert_eq!(text.lines().count(), 2 + 6);
}
