//! The sparse linear operators of discrete exterior calculus on a complex
//! and its circumcentric dual: boundary/coboundary, trace, dual
//! derivatives, dual boundary derivatives, and the diagonal Hodge stars.
//!
//! The dual operators are defined algebraically by their signed-transpose
//! formulas, never re-derived from dual-mesh incidence, so the
//! summation-by-parts identity holds by construction:
//!
//! - dᵢ^{n-k} = (-1)^k (d^{k-1})ᵀ
//! - d_b^{n-k} = (-1)^{k-1} (tr^{k-1})ᵀ
//!
//! Incidence-type matrices keep integer entries; Hodge stars are real
//! diagonals.

use crate::cochain::{boundary_wedge_pair, wedge_pair, Carrier, Cochain, Space};
use crate::complex::{DualGeometry, SimplicialComplex};
use crate::sparse::{IntCsr, RealCsr};
use crate::{Error, Result};

/// A sparse linear operator with typed domain and codomain.
#[derive(Clone, Debug)]
pub struct LinearOp {
    pub matrix: OpMatrix,
    pub domain: Space,
    pub codomain: Space,
}

/// Integer matrices stay exact; real ones appear once Hodge stars enter.
#[derive(Clone, Debug)]
pub enum OpMatrix {
    Int(IntCsr),
    Real(RealCsr),
}

impl OpMatrix {
    pub fn rows(&self) -> usize {
        match self {
            OpMatrix::Int(m) => m.rows(),
            OpMatrix::Real(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            OpMatrix::Int(m) => m.cols(),
            OpMatrix::Real(m) => m.cols(),
        }
    }

    pub fn to_real(&self) -> RealCsr {
        match self {
            OpMatrix::Int(m) => m.to_real(),
            OpMatrix::Real(m) => m.clone(),
        }
    }

    pub fn as_int(&self) -> Option<&IntCsr> {
        match self {
            OpMatrix::Int(m) => Some(m),
            OpMatrix::Real(_) => None,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        match self {
            OpMatrix::Int(m) => m.matvec(x),
            OpMatrix::Real(m) => m.matvec(x),
        }
    }

    pub fn to_matrix_market(&self) -> String {
        match self {
            OpMatrix::Int(m) => m.to_matrix_market(),
            OpMatrix::Real(m) => m.to_matrix_market(),
        }
    }
}

impl LinearOp {
    fn int(matrix: IntCsr, domain: Space, codomain: Space) -> Self {
        LinearOp {
            matrix: OpMatrix::Int(matrix),
            domain,
            codomain,
        }
    }

    fn real(matrix: RealCsr, domain: Space, codomain: Space) -> Self {
        LinearOp {
            matrix: OpMatrix::Real(matrix),
            domain,
            codomain,
        }
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// Apply to a typed cochain, producing a cochain in the codomain.
    pub fn apply(&self, x: &Cochain) -> Result<Cochain> {
        if x.space() != self.domain {
            return Err(Error::CarrierMismatch {
                expected: self.domain.to_string(),
                got: x.space().to_string(),
            });
        }
        if x.values.len() != self.cols() {
            return Err(Error::DimensionMismatch(format!(
                "operator takes {} values, cochain has {}",
                self.cols(),
                x.values.len()
            )));
        }
        Ok(Cochain::new(
            self.codomain.carrier,
            self.codomain.degree,
            self.matrix.matvec(&x.values),
        ))
    }

    /// Compose `self ∘ other`; the domain/codomain metadata must chain.
    pub fn compose(&self, other: &LinearOp) -> Result<LinearOp> {
        if other.codomain != self.domain {
            return Err(Error::CarrierMismatch {
                expected: self.domain.to_string(),
                got: other.codomain.to_string(),
            });
        }
        let matrix = match (&self.matrix, &other.matrix) {
            (OpMatrix::Int(a), OpMatrix::Int(b)) => OpMatrix::Int(a.matmul(b)?),
            (a, b) => OpMatrix::Real(a.to_real().matmul(&b.to_real())?),
        };
        Ok(LinearOp {
            matrix,
            domain: other.domain,
            codomain: self.codomain,
        })
    }
}

/// Incidence matrix ∂_k from k-chains to (k-1)-chains: the column of a
/// k-simplex holds ±1 at each face, with the alternating-face sign times
/// the stored orientation signs. Entries are exact integers.
pub fn boundary_matrix(complex: &SimplicialComplex, k: usize) -> Result<LinearOp> {
    let n = complex.dim();
    if k == 0 || k > n {
        return Err(Error::DegreeOutOfRange(format!(
            "boundary_matrix needs 1 <= k <= {n}, got {k}"
        )));
    }
    let mut triplets = Vec::new();
    for id in 0..complex.count(k) {
        for &(fid, sign) in complex.faces_of(k, id) {
            triplets.push((fid, id, sign as i64));
        }
    }
    let m = IntCsr::from_triplets(complex.count(k - 1), complex.count(k), &triplets);
    Ok(LinearOp::int(
        m,
        Space::new(Carrier::Primal, k),
        Space::new(Carrier::Primal, k - 1),
    ))
}

/// Discrete exterior derivative d^k = ∂_{k+1}ᵀ on primal k-cochains.
pub fn coboundary(complex: &SimplicialComplex, k: usize) -> Result<LinearOp> {
    let n = complex.dim();
    if k >= n {
        return Err(Error::DegreeOutOfRange(format!(
            "coboundary needs 0 <= k < {n}, got {k}"
        )));
    }
    let bd = boundary_matrix(complex, k + 1)?;
    let m = bd
        .matrix
        .as_int()
        .expect("boundary matrix is integer")
        .transpose();
    Ok(LinearOp::int(
        m,
        Space::new(Carrier::Primal, k),
        Space::new(Carrier::Primal, k + 1),
    ))
}

/// Trace operator tr^k: restriction of primal k-cochains to the boundary
/// complex. Each row selects one boundary simplex's coefficient with the
/// sign relating the parent basis to the induced boundary basis; exactly
/// one nonzero per row.
pub fn trace_matrix(complex: &SimplicialComplex, k: usize) -> Result<LinearOp> {
    let n = complex.dim();
    if n == 0 || k > n - 1 {
        return Err(Error::DegreeOutOfRange(format!(
            "trace needs 0 <= k <= {}, got {k}",
            n.saturating_sub(1)
        )));
    }
    let ids = complex.boundary_ids(k);
    let mut triplets = Vec::new();
    for (row, &id) in ids.iter().enumerate() {
        // For k = n-1 the boundary basis carries the induced orientation
        // s_τ · basis_K(τ); lower-dimensional boundary simplices keep the
        // parent basis.
        let sign = if k == n - 1 {
            complex.induced_sign(id) as i64
        } else {
            1
        };
        triplets.push((row, id, sign));
    }
    let m = IntCsr::from_triplets(ids.len(), complex.count(k), &triplets);
    Ok(LinearOp::int(
        m,
        Space::new(Carrier::Primal, k),
        Space::new(Carrier::BoundaryPrimal, k),
    ))
}

/// Dual exterior derivative dᵢ^{n-k} = (-1)^k (d^{k-1})ᵀ on interior dual
/// cochains. The argument is the dual degree m = n-k with 1 <= k <= n.
pub fn dual_derivative(complex: &SimplicialComplex, m: usize) -> Result<LinearOp> {
    let n = complex.dim();
    if n == 0 || m > n - 1 {
        return Err(Error::DegreeOutOfRange(format!(
            "dual_derivative needs dual degree <= {}, got {m}",
            n.saturating_sub(1)
        )));
    }
    let k = n - m;
    let d = coboundary(complex, k - 1)?;
    let mut t = d
        .matrix
        .as_int()
        .expect("coboundary is integer")
        .transpose();
    if k % 2 == 1 {
        t = t.neg();
    }
    Ok(LinearOp::int(
        t,
        Space::new(Carrier::DualInterior, m),
        Space::new(Carrier::DualInterior, m + 1),
    ))
}

/// Dual boundary exterior derivative d_b^{n-k} = (-1)^{k-1} (tr^{k-1})ᵀ,
/// injecting boundary-dual (n-k)-cochains into interior-dual
/// (n-k+1)-cochains.
pub fn dual_boundary_derivative(complex: &SimplicialComplex, m: usize) -> Result<LinearOp> {
    let n = complex.dim();
    if n == 0 || m > n - 1 {
        return Err(Error::DegreeOutOfRange(format!(
            "dual_boundary_derivative needs dual degree <= {}, got {m}",
            n.saturating_sub(1)
        )));
    }
    let k = n - m;
    let tr = trace_matrix(complex, k - 1)?;
    let mut t = tr.matrix.as_int().expect("trace is integer").transpose();
    if k % 2 == 0 {
        t = t.neg();
    }
    Ok(LinearOp::int(
        t,
        Space::new(Carrier::BoundaryDual, m),
        Space::new(Carrier::DualInterior, m + 1),
    ))
}

/// Diagonal Hodge star *_k with entries |⋆ᵢσ^k| / |σ^k|, mapping primal
/// k-cochains to interior-dual (n-k)-cochains. Requires a well-centered
/// complex (strictly positive dual volumes).
pub fn hodge(complex: &SimplicialComplex, geometry: &DualGeometry, k: usize) -> Result<LinearOp> {
    let n = complex.dim();
    if k > n {
        return Err(Error::DegreeOutOfRange(format!(
            "hodge needs 0 <= k <= {n}, got {k}"
        )));
    }
    let diag = hodge_diagonal(complex, geometry, k)?;
    Ok(LinearOp::real(
        RealCsr::from_diag(&diag),
        Space::new(Carrier::Primal, k),
        Space::new(Carrier::DualInterior, n - k),
    ))
}

/// Exact entrywise reciprocal of [`hodge`].
pub fn hodge_inv(
    complex: &SimplicialComplex,
    geometry: &DualGeometry,
    k: usize,
) -> Result<LinearOp> {
    let n = complex.dim();
    let diag = hodge_diagonal(complex, geometry, k)?;
    let inv: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();
    Ok(LinearOp::real(
        RealCsr::from_diag(&inv),
        Space::new(Carrier::DualInterior, n - k),
        Space::new(Carrier::Primal, k),
    ))
}

/// The diagonal entries |⋆ᵢσ^k| / |σ^k| of the Hodge star.
pub fn hodge_diagonal(
    complex: &SimplicialComplex,
    geometry: &DualGeometry,
    k: usize,
) -> Result<Vec<f64>> {
    let mut diag = Vec::with_capacity(complex.count(k));
    for id in 0..complex.count(k) {
        let dual = geometry.dual_vol_interior[k][id];
        let primal = geometry.primal_vol[k][id];
        if !(dual > 0.0) {
            return Err(Error::NotWellCentered(format!(
                "{k}-simplex {id} has nonpositive dual volume {dual:.3e}"
            )));
        }
        diag.push(dual / primal);
    }
    Ok(diag)
}

/// Boundary Hodge star *_b on ∂K for boundary-primal degree k: diagonal
/// entries |⋆_bσ| / |σ| over boundary k-simplices. The identity in 1D.
pub fn boundary_hodge(
    complex: &SimplicialComplex,
    geometry: &DualGeometry,
    k: usize,
) -> Result<LinearOp> {
    let n = complex.dim();
    if n == 0 || k > n - 1 {
        return Err(Error::DegreeOutOfRange(format!(
            "boundary_hodge needs 0 <= k <= {}, got {k}",
            n.saturating_sub(1)
        )));
    }
    let ids = complex.boundary_ids(k);
    let mut diag = Vec::with_capacity(ids.len());
    for &id in &ids {
        let dual = geometry.dual_vol_boundary[k][id];
        let primal = geometry.primal_vol[k][id];
        if !(dual > 0.0) {
            return Err(Error::NotWellCentered(format!(
                "boundary {k}-simplex {id} has nonpositive boundary dual volume {dual:.3e}"
            )));
        }
        diag.push(dual / primal);
    }
    Ok(LinearOp::real(
        RealCsr::from_diag(&diag),
        Space::new(Carrier::BoundaryPrimal, k),
        Space::new(Carrier::BoundaryDual, n - 1 - k),
    ))
}

/// Residual of the summation-by-parts formula
/// ⟨d^{k-1}α ∧ β̂ᵢ, K⟩ + (-1)^{k-1} ⟨α ∧ (dᵢ^{n-k}β̂ᵢ + d_b^{n-k}β̂_b), K⟩
///   − ⟨tr^{k-1}α ∧ β̂_b, ∂K⟩.
/// Vanishes identically because the dual operators are signed transposes.
pub fn summation_by_parts_residual(
    complex: &SimplicialComplex,
    alpha: &Cochain,
    beta_i: &Cochain,
    beta_b: &Cochain,
) -> Result<f64> {
    let n = complex.dim();
    let k = alpha.degree + 1;
    if alpha.carrier != Carrier::Primal || k > n {
        return Err(Error::DimensionMismatch(format!(
            "alpha must be primal of degree <= {}",
            n.saturating_sub(1)
        )));
    }
    if beta_i.degree != n - k || beta_i.carrier != Carrier::DualInterior {
        return Err(Error::DimensionMismatch(format!(
            "beta_i must be interior-dual of degree {}",
            n - k
        )));
    }
    if beta_b.degree != n - k || beta_b.carrier != Carrier::BoundaryDual {
        return Err(Error::DimensionMismatch(format!(
            "beta_b must be boundary-dual of degree {}",
            n - k
        )));
    }
    let d = coboundary(complex, k - 1)?;
    let di = dual_derivative(complex, n - k)?;
    let db = dual_boundary_derivative(complex, n - k)?;
    let tr = trace_matrix(complex, k - 1)?;

    let d_alpha = d.apply(alpha)?;
    let di_beta = di.apply(beta_i)?;
    let db_beta = db.apply(beta_b)?;
    let sum = Cochain::new(
        di_beta.carrier,
        di_beta.degree,
        di_beta
            .values
            .iter()
            .zip(&db_beta.values)
            .map(|(a, b)| a + b)
            .collect(),
    );
    let tr_alpha = tr.apply(alpha)?;

    let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let term1 = wedge_pair(complex, &d_alpha, beta_i)?;
    let term2 = sign * wedge_pair(complex, alpha, &sum)?;
    let term3 = boundary_wedge_pair(complex, &tr_alpha, beta_b)?;
    Ok(term1 + term2 - term3)
}

#[cfg(test)]
mod tests;
