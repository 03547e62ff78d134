//! Discrete differential forms: coefficient vectors over the four carriers,
//! and the primal-dual wedge pairings.
//!
//! Interior-dual cells are indexed by the id of their primal partner
//! (k-simplices of K pair with interior (n-k)-cells), and boundary-dual
//! cells by their boundary-primal partner, so both pairings are plain dot
//! products of coefficient vectors.

use crate::complex::SimplicialComplex;
use crate::{Error, Result};

/// Which cell complex a cochain lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Carrier {
    /// k-simplices of K.
    Primal,
    /// Interior dual (n-k)... a degree-k dual cochain is indexed by the
    /// primal (n-k)-simplices.
    DualInterior,
    /// k-simplices of the boundary complex ∂K.
    BoundaryPrimal,
    /// Boundary dual cells, indexed by their boundary-primal partners of
    /// degree n-1-k.
    BoundaryDual,
}

impl std::fmt::Display for Carrier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Carrier::Primal => "primal",
            Carrier::DualInterior => "interior dual",
            Carrier::BoundaryPrimal => "boundary primal",
            Carrier::BoundaryDual => "boundary dual",
        };
        write!(f, "{s}")
    }
}

/// A (carrier, degree) pair; the type tag of cochain spaces and operator
/// domains/codomains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Space {
    pub carrier: Carrier,
    pub degree: usize,
}

impl Space {
    pub fn new(carrier: Carrier, degree: usize) -> Self {
        Space { carrier, degree }
    }

    /// Number of cells of this space on a given complex.
    pub fn dim(&self, complex: &SimplicialComplex) -> usize {
        let n = complex.dim();
        match self.carrier {
            Carrier::Primal => complex.count(self.degree),
            Carrier::DualInterior => complex.count(n - self.degree),
            Carrier::BoundaryPrimal => complex.boundary_count(self.degree),
            Carrier::BoundaryDual => complex.boundary_count(n - 1 - self.degree),
        }
    }

    pub fn valid_on(&self, complex: &SimplicialComplex) -> bool {
        let n = complex.dim();
        match self.carrier {
            Carrier::Primal | Carrier::DualInterior => self.degree <= n,
            Carrier::BoundaryPrimal | Carrier::BoundaryDual => n >= 1 && self.degree < n,
        }
    }
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}-cochains", self.carrier, self.degree)
    }
}

/// A discrete k-form: a coefficient vector tagged by its carrier.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub carrier: Carrier,
    pub degree: usize,
    pub values: Vec<f64>,
}

impl Cochain {
    pub fn new(carrier: Carrier, degree: usize, values: Vec<f64>) -> Self {
        Cochain {
            carrier,
            degree,
            values,
        }
    }

    pub fn zeros(complex: &SimplicialComplex, carrier: Carrier, degree: usize) -> Self {
        let space = Space::new(carrier, degree);
        Cochain {
            carrier,
            degree,
            values: vec![0.0; space.dim(complex)],
        }
    }

    pub fn space(&self) -> Space {
        Space::new(self.carrier, self.degree)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Validate the vector length against a complex.
    pub fn check_on(&self, complex: &SimplicialComplex) -> Result<()> {
        let want = self.space().dim(complex);
        if self.values.len() != want {
            return Err(Error::DimensionMismatch(format!(
                "cochain of {} has {} values, complex has {} cells",
                self.space(),
                self.values.len(),
                want
            )));
        }
        Ok(())
    }

    /// CSV with one column per cell, headers `<symbol>[<cell-id>]`.
    pub fn to_csv(&self, symbol: &str) -> String {
        let header: Vec<String> = (0..self.values.len())
            .map(|i| format!("{symbol}[{i}]"))
            .collect();
        let row: Vec<String> = self.values.iter().map(|v| format!("{v}")).collect();
        format!("{}\n{}\n", header.join(","), row.join(","))
    }
}

/// The discrete primal-dual wedge product summed over K:
/// ⟨α ∧ β̂, K⟩ = αᵀβ̂ for a primal k-cochain α and an interior-dual
/// (n-k)-cochain β̂.
///
/// The reversed pairing satisfies ⟨β̂ ∧ α, K⟩ = (-1)^{k(n-k)} ⟨α ∧ β̂, K⟩;
/// the sign is exposed as [`wedge_reversal_sign`] rather than as a second
/// operation.
pub fn wedge_pair(complex: &SimplicialComplex, alpha: &Cochain, beta_hat: &Cochain) -> Result<f64> {
    let n = complex.dim();
    if alpha.carrier != Carrier::Primal {
        return Err(Error::CarrierMismatch {
            expected: "primal".into(),
            got: alpha.carrier.to_string(),
        });
    }
    if beta_hat.carrier != Carrier::DualInterior {
        return Err(Error::CarrierMismatch {
            expected: "interior dual".into(),
            got: beta_hat.carrier.to_string(),
        });
    }
    if beta_hat.degree != n - alpha.degree {
        return Err(Error::DegreeMismatch {
            expected: n - alpha.degree,
            got: beta_hat.degree,
        });
    }
    alpha.check_on(complex)?;
    beta_hat.check_on(complex)?;
    Ok(dot(&alpha.values, &beta_hat.values))
}

/// Primal-dual pairing on the boundary: ⟨α_b ∧ β̂_b, ∂K⟩ = α_bᵀβ̂_b for a
/// boundary-primal k-cochain and a boundary-dual (n-1-k)-cochain.
pub fn boundary_wedge_pair(
    complex: &SimplicialComplex,
    alpha_b: &Cochain,
    beta_b_hat: &Cochain,
) -> Result<f64> {
    let n = complex.dim();
    if alpha_b.carrier != Carrier::BoundaryPrimal {
        return Err(Error::CarrierMismatch {
            expected: "boundary primal".into(),
            got: alpha_b.carrier.to_string(),
        });
    }
    if beta_b_hat.carrier != Carrier::BoundaryDual {
        return Err(Error::CarrierMismatch {
            expected: "boundary dual".into(),
            got: beta_b_hat.carrier.to_string(),
        });
    }
    if n == 0 || beta_b_hat.degree != n - 1 - alpha_b.degree {
        return Err(Error::DegreeMismatch {
            expected: n.saturating_sub(1 + alpha_b.degree),
            got: beta_b_hat.degree,
        });
    }
    alpha_b.check_on(complex)?;
    beta_b_hat.check_on(complex)?;
    Ok(dot(&alpha_b.values, &beta_b_hat.values))
}

/// Sign picked up when the wedge arguments are exchanged on K.
pub fn wedge_reversal_sign(n: usize, k: usize) -> f64 {
    if (k * (n - k)) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign picked up when the boundary wedge arguments are exchanged.
pub fn boundary_wedge_reversal_sign(n: usize, k: usize) -> f64 {
    if (k * (n - 1 - k)) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
