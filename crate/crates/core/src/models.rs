//! Concrete models: the 2D wave equation on a triangulated surface and the
//! 1D telegraph line in both causality variants, plus LC-ladder
//! realization extraction and analytic/discrete spectra for convergence
//! studies.

use crate::complex::{DualGeometry, SimplicialComplex};
use crate::dirac::{assemble_dirac, DiracVariant};
use crate::linalg::{jacobi_eigenvalues, DMat};
use crate::operators::hodge_diagonal;
use crate::phs::{
    assemble_phs, MaterialField, PortHamiltonianSystem, QuadraticHamiltonian, SystemLabel,
};
use crate::{Error, Result};

/// Which boundary variable drives a telegraph line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Causality {
    /// Boundary voltages in, currents out: charge on primal edges, flux on
    /// the dual mesh (the dual-stored structure).
    VoltageInput,
    /// Boundary currents in, voltages out: charge on the dual mesh, flux
    /// on primal edges (the primal-stored structure).
    CurrentInput,
}

/// The 2D wave equation as a primal-stored system with p = 2, q = 1:
/// state (kinetic momentum p̂ on vertex-dual 2-cells, strain ε on primal
/// edges), velocity effort v = *₀⁻¹p̂/μ, stress effort σ̂ = E·*₁ε. Input:
/// boundary stress; output: boundary velocity, one port per boundary
/// vertex.
pub fn build_wave2d(
    complex: &SimplicialComplex,
    geometry: &DualGeometry,
    mu: &MaterialField,
    young: &MaterialField,
) -> Result<PortHamiltonianSystem> {
    if complex.dim() != 2 {
        return Err(Error::InvalidInput(format!(
            "wave2d needs a 2-dimensional complex, got dimension {}",
            complex.dim()
        )));
    }
    if mu.len() != complex.count(0) || young.len() != complex.count(1) {
        return Err(Error::DimensionMismatch(format!(
            "need mu per vertex ({}) and E per edge ({}), got ({}, {})",
            complex.count(0),
            complex.count(1),
            mu.len(),
            young.len()
        )));
    }
    let dirac = assemble_dirac(complex, geometry, 2, 1, DiracVariant::PrimalStored)?;
    let star0 = hodge_diagonal(complex, geometry, 0)?;
    let star1 = hodge_diagonal(complex, geometry, 1)?;
    let qp: Vec<f64> = star0
        .iter()
        .zip(&mu.values)
        .map(|(s, m)| 1.0 / (m * s))
        .collect();
    let qq: Vec<f64> = star1
        .iter()
        .zip(&young.values)
        .map(|(s, e)| e * s)
        .collect();
    let ham = QuadraticHamiltonian::new(qp, qq)?;
    assemble_phs(&dirac, &ham, SystemLabel::Wave2d)
}

/// The telegraph equations on a 1D mesh. Voltage input: capacitance per
/// primal edge, inductance per vertex-dual cell. Current input:
/// capacitance per vertex-dual cell, inductance per primal edge.
pub fn build_telegraph(
    complex: &SimplicialComplex,
    geometry: &DualGeometry,
    capacitance: &MaterialField,
    inductance: &MaterialField,
    causality: Causality,
) -> Result<PortHamiltonianSystem> {
    if complex.dim() != 1 {
        return Err(Error::InvalidInput(format!(
            "telegraph needs a 1-dimensional complex, got dimension {}",
            complex.dim()
        )));
    }
    let n0 = complex.count(0);
    let n1 = complex.count(1);
    let star0 = hodge_diagonal(complex, geometry, 0)?;
    let star1 = hodge_diagonal(complex, geometry, 1)?;
    match causality {
        Causality::VoltageInput => {
            if capacitance.len() != n1 || inductance.len() != n0 {
                return Err(Error::DimensionMismatch(format!(
                    "voltage input needs C per edge ({n1}) and L per dual cell ({n0}), \
                     got ({}, {})",
                    capacitance.len(),
                    inductance.len()
                )));
            }
            let dirac = assemble_dirac(complex, geometry, 1, 1, DiracVariant::DualStored)?;
            // Efforts: *₁ q / C (voltages) and *₀⁻¹ φ̂ / L̂ (currents).
            let qp: Vec<f64> = star1
                .iter()
                .zip(&capacitance.values)
                .map(|(s, c)| s / c)
                .collect();
            let qq: Vec<f64> = star0
                .iter()
                .zip(&inductance.values)
                .map(|(s, l)| 1.0 / (l * s))
                .collect();
            assemble_phs(
                &dirac,
                &QuadraticHamiltonian::new(qp, qq)?,
                SystemLabel::TelegraphVoltageInput,
            )
        }
        Causality::CurrentInput => {
            if capacitance.len() != n0 || inductance.len() != n1 {
                return Err(Error::DimensionMismatch(format!(
                    "current input needs C per dual cell ({n0}) and L per edge ({n1}), \
                     got ({}, {})",
                    capacitance.len(),
                    inductance.len()
                )));
            }
            let dirac = assemble_dirac(complex, geometry, 1, 1, DiracVariant::PrimalStored)?;
            let qp: Vec<f64> = star0
                .iter()
                .zip(&capacitance.values)
                .map(|(s, c)| 1.0 / (c * s))
                .collect();
            let qq: Vec<f64> = star1
                .iter()
                .zip(&inductance.values)
                .map(|(s, l)| s / l)
                .collect();
            assemble_phs(
                &dirac,
                &QuadraticHamiltonian::new(qp, qq)?,
                SystemLabel::TelegraphCurrentInput,
            )
        }
    }
}

/// LC-ladder realization of a telegraph system: each element value is the
/// integral of the distributed parameter over its carrying cell, read off
/// the Hodge-composed energy matrix as the reciprocal diagonal.
#[derive(Clone, Debug)]
pub struct LCLadder {
    pub causality: Causality,
    pub inductances: Vec<f64>,
    pub capacitances: Vec<f64>,
}

pub fn extract_lc_ladder(sys: &PortHamiltonianSystem) -> Result<LCLadder> {
    let causality = match sys.label {
        SystemLabel::TelegraphVoltageInput => Causality::VoltageInput,
        SystemLabel::TelegraphCurrentInput => Causality::CurrentInput,
        _ => {
            return Err(Error::InvalidInput(
                "LC ladder extraction applies to telegraph systems".into(),
            ))
        }
    };
    let (n1, _) = sys.partition;
    // Charge block first in both variants: capacitors from Qp, inductors
    // from Qq.
    let capacitances: Vec<f64> = sys.q_diag[..n1].iter().map(|q| 1.0 / q).collect();
    let inductances: Vec<f64> = sys.q_diag[n1..].iter().map(|q| 1.0 / q).collect();
    Ok(LCLadder {
        causality,
        inductances,
        capacitances,
    })
}

/// Boundary conditions of the continuous line for the analytic spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineBoundary {
    /// Both ends shorted (zero voltage).
    ShortShort,
    /// Both ends open (zero current).
    OpenOpen,
    /// Shorted at one end, open at the other.
    ShortOpen,
}

/// Angular eigenfrequencies of the ideal lossless line of the given length
/// with uniform parameters: wave speed c = 1/sqrt(Lc·Cc); kπc/length for
/// matching ends, (k-½)πc/length for mixed ends, k = 1..n_modes.
pub fn analytic_spectrum_telegraph(
    n_modes: usize,
    length: f64,
    lc: f64,
    cc: f64,
    bc: LineBoundary,
) -> Vec<f64> {
    let c = 1.0 / (lc * cc).sqrt();
    (1..=n_modes)
        .map(|k| match bc {
            LineBoundary::ShortShort | LineBoundary::OpenOpen => {
                k as f64 * std::f64::consts::PI * c / length
            }
            LineBoundary::ShortOpen => (k as f64 - 0.5) * std::f64::consts::PI * c / length,
        })
        .collect()
}

/// Positive angular frequencies of ẋ = J Q x under the homogeneous
/// boundary closure u ≡ 0 (open circuit for current input, short circuit
/// for voltage input).
///
/// A = JQ is similar to the skew-symmetric S = Q^½ J Q^½, so the spectrum
/// is purely imaginary ±iω; the ω are the square roots of the eigenvalues
/// of SᵀS, which occur in pairs. Zero modes (conservation laws) are
/// excluded.
pub fn discrete_spectrum(sys: &PortHamiltonianSystem) -> Result<Vec<f64>> {
    let dim = sys.state_dim();
    let jd = sys.j.to_dense();
    let sq: Vec<f64> = sys.q_diag.iter().map(|q| q.max(0.0).sqrt()).collect();
    let mut s = DMat::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            s[(i, j)] = sq[i] * jd[(i, j)] * sq[j];
        }
    }
    let st_s = s.transpose().matmul(&s);
    let eigs = jacobi_eigenvalues(&st_s, 60);
    let max = eigs.last().copied().unwrap_or(0.0).max(1e-300);
    // Zero modes (conservation laws) sit at rounding level; the smallest
    // physical mode of the models stays many orders above this cutoff.
    let mut omegas: Vec<f64> = eigs
        .iter()
        .filter(|&&v| v > 1e-10 * max)
        .map(|v| v.sqrt())
        .collect();
    omegas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Each frequency appears twice (±iω); fold the pairs, checking they
    // really pair up.
    if omegas.len() % 2 != 0 {
        return Err(Error::SingularSystem(
            "eigenvalues of a skew similarity must pair up".into(),
        ));
    }
    let mut out = Vec::with_capacity(omegas.len() / 2);
    for pair in omegas.chunks(2) {
        let rel = (pair[0] - pair[1]).abs() / pair[1].max(1e-300);
        if rel > 1e-6 {
            return Err(Error::SingularSystem(format!(
                "unpaired eigenfrequencies {} vs {}",
                pair[0], pair[1]
            )));
        }
        out.push(0.5 * (pair[0] + pair[1]));
    }
    Ok(out)
}

/// The skewness residual of Q^½ J Q^½, reported alongside spectra as the
/// bound on eigenvalue real parts.
pub fn spectrum_skewness_residual(sys: &PortHamiltonianSystem) -> f64 {
    let dim = sys.state_dim();
    let jd = sys.j.to_dense();
    let sq: Vec<f64> = sys.q_diag.iter().map(|q| q.max(0.0).sqrt()).collect();
    let mut max = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let sij = sq[i] * jd[(i, j)] * sq[j];
            let sji = sq[j] * jd[(j, i)] * sq[i];
            max = max.max((sij + sji).abs());
        }
    }
    max
}
