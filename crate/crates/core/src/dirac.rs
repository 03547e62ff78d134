//! Simplicial Dirac structures: the two finite-dimensional Dirac
//! structures built from coboundary, dual-derivative, and trace matrices,
//! together with checks of their defining properties (skewness of the
//! bordered operator, isotropy under the discrete bilinear pairing,
//! maximal dimension).
//!
//! Elements of a structure are represented by their generating efforts
//! (plus the free boundary variable); membership is by construction, which
//! mirrors the fact that the structure is the graph of a skew map.

use crate::cochain::{Carrier, Cochain, Space};
use crate::complex::{is_well_centered, DualGeometry, SimplicialComplex};
use crate::operators::{coboundary, dual_boundary_derivative, dual_derivative, trace_matrix};
use crate::rng::Rng;
use crate::sparse::{block_matrix, IntCsr};
use crate::{Error, Result};

/// Which of the two simplicial Dirac structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiracVariant {
    /// Flows (f̂_p, f_q, f_b), free boundary variable ê_b (boundary effort
    /// is the control; the p-state lives on the dual mesh).
    PrimalStored,
    /// Flows (f_p, f̂_q), free boundary variable f̂_b (boundary flows are
    /// the control; boundary efforts e_b are determined by the dynamics).
    DualStored,
}

impl std::fmt::Display for DiracVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiracVariant::PrimalStored => write!(f, "primal-stored"),
            DiracVariant::DualStored => write!(f, "dual-stored"),
        }
    }
}

/// A simplicial Dirac structure as a typed block operator.
///
/// The interior structure map is [[0, j12],[j21, 0]] acting on the stacked
/// efforts; `b_block` multiplies the free boundary variable and enters the
/// row given by `boundary_input_row`; `c_block` produces the bound
/// boundary variable from the effort column `boundary_output_col`.
#[derive(Clone, Debug)]
pub struct SimplicialDirac {
    pub variant: DiracVariant,
    pub p: usize,
    pub q: usize,
    pub n: usize,
    /// r = pq + 1.
    pub r: usize,
    pub j12: IntCsr,
    pub j21: IntCsr,
    pub b_block: IntCsr,
    pub c_block: IntCsr,
    /// 0 for the primal-stored variant, 1 for the dual-stored one.
    pub boundary_input_row: usize,
    /// Which effort slot the boundary output reads (0 or 1).
    pub boundary_output_col: usize,
    /// Graded signs (s1, s2, sb) of the three wedge pairings in the
    /// bilinear form; the bordered operator is skew after weighting the
    /// flow rows by these signs.
    pub pairing_signs: (i64, i64, i64),
    /// Spaces of (flow1, flow2, boundary flow-side slot).
    pub flow_spaces: [Space; 3],
    /// Spaces of (effort1, effort2, boundary effort-side slot).
    pub effort_spaces: [Space; 3],
    /// (dim flow1, dim flow2, dim boundary).
    pub dims: (usize, usize, usize),
    /// Parent-complex ids of the boundary simplices carrying the ports, in
    /// port order.
    pub boundary_cells: Vec<usize>,
}

fn pow_sign(e: usize) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

fn scaled(m: &IntCsr, s: i64) -> IntCsr {
    if s == 1 {
        m.clone()
    } else {
        m.neg()
    }
}

/// Assemble the simplicial Dirac structure for degrees p + q = n + 1 on a
/// well-centered complex.
pub fn assemble_dirac(
    complex: &SimplicialComplex,
    geometry: &DualGeometry,
    p: usize,
    q: usize,
    variant: DiracVariant,
) -> Result<SimplicialDirac> {
    let n = complex.dim();
    if p + q != n + 1 || p < 1 || q < 1 || p > n || q > n {
        return Err(Error::InvalidDegrees(format!(
            "need p + q = n + 1 with 1 <= p, q <= n; got p={p}, q={q}, n={n}"
        )));
    }
    let report = is_well_centered(complex, geometry);
    if !report.ok {
        return Err(Error::NotWellCentered(format!(
            "{} offending simplices",
            report.offenders.len()
        )));
    }
    let r = p * q + 1;
    match variant {
        DiracVariant::PrimalStored => {
            let di = dual_derivative(complex, n - q)?;
            let d = coboundary(complex, n - p)?;
            let db = dual_boundary_derivative(complex, n - q)?;
            let tr = trace_matrix(complex, n - p)?;
            let j12 = scaled(di.matrix.as_int().unwrap(), pow_sign(r));
            let j21 = d.matrix.as_int().unwrap().clone();
            let b_block = scaled(db.matrix.as_int().unwrap(), pow_sign(r));
            let c_block = scaled(tr.matrix.as_int().unwrap(), pow_sign(p));
            let flow_spaces = [
                Space::new(Carrier::DualInterior, p),
                Space::new(Carrier::Primal, q),
                Space::new(Carrier::BoundaryPrimal, n - p),
            ];
            let effort_spaces = [
                Space::new(Carrier::Primal, n - p),
                Space::new(Carrier::DualInterior, n - q),
                Space::new(Carrier::BoundaryDual, n - q),
            ];
            let dims = (
                flow_spaces[0].dim(complex),
                flow_spaces[1].dim(complex),
                flow_spaces[2].dim(complex),
            );
            let boundary_cells = complex.boundary_ids(n - p);
            Ok(SimplicialDirac {
                variant,
                p,
                q,
                n,
                r,
                j12,
                j21,
                b_block,
                c_block,
                boundary_input_row: 0,
                boundary_output_col: 0,
                pairing_signs: (1, pow_sign(q * (n - q)), pow_sign((n - p) * (p - 1))),
                flow_spaces,
                effort_spaces,
                dims,
                boundary_cells,
            })
        }
        DiracVariant::DualStored => {
            let d = coboundary(complex, n - q)?;
            let di = dual_derivative(complex, n - p)?;
            let db = dual_boundary_derivative(complex, n - p)?;
            let tr = trace_matrix(complex, n - q)?;
            let j12 = scaled(d.matrix.as_int().unwrap(), pow_sign(p * q + 1));
            let j21 = di.matrix.as_int().unwrap().clone();
            let b_block = db.matrix.as_int().unwrap().clone();
            let c_block = scaled(tr.matrix.as_int().unwrap(), pow_sign(p));
            let flow_spaces = [
                Space::new(Carrier::Primal, p),
                Space::new(Carrier::DualInterior, q),
                Space::new(Carrier::BoundaryDual, n - p),
            ];
            let effort_spaces = [
                Space::new(Carrier::DualInterior, n - p),
                Space::new(Carrier::Primal, n - q),
                Space::new(Carrier::BoundaryPrimal, n - q),
            ];
            let dims = (
                flow_spaces[0].dim(complex),
                flow_spaces[1].dim(complex),
                flow_spaces[2].dim(complex),
            );
            let boundary_cells = complex.boundary_ids(n - q);
            Ok(SimplicialDirac {
                variant,
                p,
                q,
                n,
                r,
                j12,
                j21,
                b_block,
                c_block,
                boundary_input_row: 1,
                boundary_output_col: 1,
                pairing_signs: (pow_sign(p * (n - p)), 1, 1),
                flow_spaces,
                effort_spaces,
                dims,
                boundary_cells,
            })
        }
    }
}

/// An element of the structure: flow and effort tuples, one cochain per
/// slot. Slot 2 holds the boundary pair (bound output and free variable).
#[derive(Clone, Debug)]
pub struct DiracElement {
    pub flows: [Cochain; 3],
    pub efforts: [Cochain; 3],
}

impl SimplicialDirac {
    /// The bordered operator mapping the stacked input (effort1, effort2,
    /// free boundary variable) to (flow1, flow2, bound boundary variable).
    pub fn bordered(&self) -> IntCsr {
        let (n1, n2, nb) = self.dims;
        let mut blocks: Vec<Vec<Option<&IntCsr>>> = vec![vec![None; 3]; 3];
        blocks[0][1] = Some(&self.j12);
        blocks[1][0] = Some(&self.j21);
        blocks[self.boundary_input_row][2] = Some(&self.b_block);
        blocks[2][self.boundary_output_col] = Some(&self.c_block);
        block_matrix(
            &[n1, n2, nb],
            &[self.j21.cols(), self.j12.cols(), nb],
            &blocks,
        )
    }

    /// Diagonal of graded pairing signs expanded to the stacked dimension.
    pub fn sign_diagonal(&self) -> Vec<i64> {
        let (n1, n2, nb) = self.dims;
        let (s1, s2, sb) = self.pairing_signs;
        let mut d = Vec::with_capacity(n1 + n2 + nb);
        d.extend(std::iter::repeat(s1).take(n1));
        d.extend(std::iter::repeat(s2).take(n2));
        d.extend(std::iter::repeat(sb).take(nb));
        d
    }

    /// Max-abs entry of S·L + (S·L)ᵀ in exact integer arithmetic; zero for
    /// a correctly assembled structure.
    pub fn skew_residual(&self) -> i64 {
        let l = self.bordered();
        let s = self.sign_diagonal();
        let sl_triplets: Vec<(usize, usize, i64)> =
            l.iter().map(|(r, c, v)| (r, c, s[r] * v)).collect();
        let sl = IntCsr::from_triplets(l.rows(), l.cols(), &sl_triplets);
        let sym = sl.add(&sl.transpose()).expect("square");
        sym.max_abs() as i64
    }

    /// Build a structure element from effort vectors and the free boundary
    /// variable by pushing them through the blocks.
    pub fn element_from_efforts(&self, e1: &[f64], e2: &[f64], eb: &[f64]) -> Result<DiracElement> {
        let nb = self.dims.2;
        if e1.len() != self.j21.cols() || e2.len() != self.j12.cols() || eb.len() != nb {
            return Err(Error::DimensionMismatch(format!(
                "effort lengths ({}, {}, {}) do not match structure ({}, {}, {})",
                e1.len(),
                e2.len(),
                eb.len(),
                self.j21.cols(),
                self.j12.cols(),
                nb
            )));
        }
        let mut f1 = self.j12.matvec(e2);
        let mut f2 = self.j21.matvec(e1);
        let binput = self.b_block.matvec(eb);
        match self.boundary_input_row {
            0 => {
                for (a, b) in f1.iter_mut().zip(&binput) {
                    *a += b;
                }
            }
            _ => {
                for (a, b) in f2.iter_mut().zip(&binput) {
                    *a += b;
                }
            }
        }
        let bound = self.c_block.matvec(if self.boundary_output_col == 0 {
            e1
        } else {
            e2
        });
        // Slot 2: the flow-side cochain and the effort-side cochain of the
        // boundary pair, per variant.
        let (flow_b, effort_b) = match self.variant {
            DiracVariant::PrimalStored => (bound, eb.to_vec()),
            DiracVariant::DualStored => (eb.to_vec(), bound),
        };
        Ok(DiracElement {
            flows: [
                Cochain::new(self.flow_spaces[0].carrier, self.flow_spaces[0].degree, f1),
                Cochain::new(self.flow_spaces[1].carrier, self.flow_spaces[1].degree, f2),
                Cochain::new(
                    self.flow_spaces[2].carrier,
                    self.flow_spaces[2].degree,
                    flow_b,
                ),
            ],
            efforts: [
                Cochain::new(
                    self.effort_spaces[0].carrier,
                    self.effort_spaces[0].degree,
                    e1.to_vec(),
                ),
                Cochain::new(
                    self.effort_spaces[1].carrier,
                    self.effort_spaces[1].degree,
                    e2.to_vec(),
                ),
                Cochain::new(
                    self.effort_spaces[2].carrier,
                    self.effort_spaces[2].degree,
                    effort_b,
                ),
            ],
        })
    }

    /// Flip the sign of one entry of the boundary input block. Negative
    /// control for the verification suite: the skew residual becomes
    /// nonzero.
    pub fn corrupt_boundary_sign(&mut self) {
        let triplets: Vec<(usize, usize, i64)> = self
            .b_block
            .iter()
            .enumerate()
            .map(|(i, (r, c, v))| (r, c, if i == 0 { -v } else { v }))
            .collect();
        self.b_block = IntCsr::from_triplets(self.b_block.rows(), self.b_block.cols(), &triplets);
    }
}

/// Evaluate the discrete bilinear pairing of two tuples against a
/// structure's slot typing: the symmetric sum of graded wedge products
/// over K plus the boundary pairings over ∂K.
pub fn bilinear_pairing(
    dirac: &SimplicialDirac,
    elem1: &DiracElement,
    elem2: &DiracElement,
) -> Result<f64> {
    for elem in [elem1, elem2] {
        for (slot, (f, e)) in elem.flows.iter().zip(&elem.efforts).enumerate() {
            if f.space() != dirac.flow_spaces[slot] || e.space() != dirac.effort_spaces[slot] {
                return Err(Error::DimensionMismatch(format!(
                    "element slot {slot} does not match the structure's spaces"
                )));
            }
            if f.len() != elem1.flows[slot].len() || e.len() != elem1.efforts[slot].len() {
                return Err(Error::DimensionMismatch("element lengths disagree".into()));
            }
        }
    }
    let (s1, s2, sb) = dirac.pairing_signs;
    let dot = |a: &Cochain, b: &Cochain| -> f64 {
        a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum()
    };
    let mut acc = 0.0;
    let signs = [s1 as f64, s2 as f64, sb as f64];
    for slot in 0..3 {
        acc += signs[slot]
            * (dot(&elem1.efforts[slot], &elem2.flows[slot])
                + dot(&elem2.efforts[slot], &elem1.flows[slot]));
    }
    Ok(acc)
}

/// Verification report for a simplicial Dirac structure.
#[derive(Clone, Debug)]
pub struct DiracReport {
    pub variant: DiracVariant,
    pub degrees: (usize, usize, usize),
    /// Exact integer skewness residual of the sign-weighted bordered map.
    pub skew_residual: i64,
    /// Largest relative pairing of sampled structure-element pairs.
    pub isotropy_max_rel: f64,
    pub samples: usize,
    /// Rank of [L | I], the dimension of the structure's graph.
    pub graph_dim: usize,
    /// dim F = N_p + N_q + N_boundary.
    pub expected_graph_dim: usize,
}

impl DiracReport {
    pub fn passed(&self) -> bool {
        self.skew_residual == 0
            && self.isotropy_max_rel < 1e-12
            && self.graph_dim == self.expected_graph_dim
    }
}

/// Check skewness, isotropy on sampled elements, and maximal dimension.
pub fn verify_dirac(dirac: &SimplicialDirac, samples: usize, seed: u64) -> DiracReport {
    let skew_residual = dirac.skew_residual();

    let mut rng = Rng::new(seed);
    let mut isotropy_max_rel: f64 = 0.0;
    for _ in 0..samples {
        let e1a = rng.vec_signed(dirac.j21.cols());
        let e2a = rng.vec_signed(dirac.j12.cols());
        let eba = rng.vec_signed(dirac.dims.2);
        let e1b = rng.vec_signed(dirac.j21.cols());
        let e2b = rng.vec_signed(dirac.j12.cols());
        let ebb = rng.vec_signed(dirac.dims.2);
        let elem1 = dirac.element_from_efforts(&e1a, &e2a, &eba).unwrap();
        let elem2 = dirac.element_from_efforts(&e1b, &e2b, &ebb).unwrap();
        let pairing = bilinear_pairing(dirac, &elem1, &elem2).unwrap();
        let scale: f64 = elem1
            .flows
            .iter()
            .chain(&elem1.efforts)
            .chain(&elem2.flows)
            .chain(&elem2.efforts)
            .flat_map(|c| c.values.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .max(1.0);
        isotropy_max_rel = isotropy_max_rel.max(pairing.abs() / scale);
    }

    // Graph dimension: rank of [L | I] over the stacked flow space.
    let l = dirac.bordered();
    let total = l.rows();
    let mut aug = crate::linalg::DMat::zeros(total, 2 * total);
    for (r, c, v) in l.iter() {
        aug[(r, c)] = v as f64;
    }
    for i in 0..total {
        aug[(i, total + i)] = 1.0;
    }
    let graph_dim = aug.rank(1e-10);

    DiracReport {
        variant: dirac.variant,
        degrees: (dirac.p, dirac.q, dirac.n),
        skew_residual,
        isotropy_max_rel,
        samples,
        graph_dim,
        expected_graph_dim: total,
    }
}

#[cfg(test)]
mod tests;
