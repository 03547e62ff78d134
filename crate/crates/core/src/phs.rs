//! Explicit input-output port-Hamiltonian systems assembled from a
//! simplicial Dirac structure and a quadratic Hamiltonian, with energy and
//! power diagnostics, conservation-law discovery, passivation feedback,
//! and energy-Casimir controller interconnection.
//!
//! The lift from the Dirac blocks substitutes the Hamiltonian gradient for
//! the efforts; the effort slot whose wedge pairing is graded picks up the
//! parity sign, which makes the structure matrix J = [[0, Dᵀ],[-D, 0]]
//! exactly skew-symmetric and the ports collocated: d/dt H = yᵀu.

use crate::dirac::{DiracVariant, SimplicialDirac};
use crate::linalg::{orthonormalize_sign_fixed, DMat};
use crate::operators::LinearOp;
use crate::sparse::{block_matrix, IntCsr, RealCsr};
use crate::{Error, Result};

/// Per-cell positive material coefficients (mass density, Young's modulus,
/// distributed capacitance or inductance).
#[derive(Clone, Debug)]
pub struct MaterialField {
    pub values: Vec<f64>,
}

impl MaterialField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput(
                "material coefficients must be strictly positive".into(),
            ));
        }
        Ok(MaterialField { values })
    }

    pub fn uniform(value: f64, len: usize) -> Result<Self> {
        MaterialField::new(vec![value; len])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Quadratic Hamiltonian H(x) = ½(x_pᵀ Qp x_p + x_qᵀ Qq x_q) with diagonal
/// positive blocks pairing each state with its effort.
#[derive(Clone, Debug)]
pub struct QuadraticHamiltonian {
    pub qp: Vec<f64>,
    pub qq: Vec<f64>,
}

impl QuadraticHamiltonian {
    /// The standard constructor enforces strictly positive diagonals.
    pub fn new(qp: Vec<f64>, qq: Vec<f64>) -> Result<Self> {
        if qp.iter().chain(&qq).any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput(
                "energy matrix diagonals must be strictly positive".into(),
            ));
        }
        Ok(QuadraticHamiltonian { qp, qq })
    }
}

/// What physical model a system was built as; used by realization
/// extraction and reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemLabel {
    Wave2d,
    TelegraphVoltageInput,
    TelegraphCurrentInput,
    Custom,
}

/// Explicit input-output port-Hamiltonian system
/// ẋ = J Q x + G u, y = Goutᵀ Q x, with Jᵀ = -J exactly and Gout = G
/// (collocated ports).
#[derive(Clone, Debug)]
pub struct PortHamiltonianSystem {
    pub variant: DiracVariant,
    pub p: usize,
    pub q: usize,
    pub n: usize,
    /// Skew structure matrix on the stacked state.
    pub j: RealCsr,
    /// Input matrix.
    pub g: RealCsr,
    /// Output matrix; y = Goutᵀ Q x.
    pub gout: RealCsr,
    /// Diagonal of the block energy matrix.
    pub q_diag: Vec<f64>,
    /// State partition: (dim p-state, dim q-state).
    pub partition: (usize, usize),
    /// Number of controller states appended by [`close_loop`]; 0 for plants.
    pub controller_dim: usize,
    /// Parent-complex ids of the boundary cells carrying the ports.
    pub port_cells: Vec<usize>,
    pub label: SystemLabel,
    /// Integer operator whose kernel yields p-block conservation laws.
    pub(crate) p_kernel_op: IntCsr,
    /// Integer operator whose kernel yields q-block conservation laws.
    pub(crate) q_kernel_op: IntCsr,
}

/// Lift a Dirac structure and a quadratic Hamiltonian into the explicit
/// ẋ = J Q x + G u form.
pub fn assemble_phs(
    dirac: &SimplicialDirac,
    ham: &QuadraticHamiltonian,
    label: SystemLabel,
) -> Result<PortHamiltonianSystem> {
    let (n1, n2, nb) = dirac.dims;
    if ham.qp.len() != n1 || ham.qq.len() != n2 {
        return Err(Error::DimensionMismatch(format!(
            "energy blocks ({}, {}) do not match state partition ({n1}, {n2})",
            ham.qp.len(),
            ham.qq.len()
        )));
    }
    // The graded-hat lift gives the same shape for both variants:
    //   primal-stored: J = [[0, j21ᵀ],[-j21, 0]], G = [-b; 0], y from C.
    //   dual-stored:   J = [[0, -j12],[j12ᵀ, 0]], G = [0; -b], y from C.
    let (j12, j21, g_blocks, gout_blocks) = match dirac.variant {
        DiracVariant::PrimalStored => {
            let j12 = dirac.j21.transpose();
            let j21 = dirac.j21.neg();
            let gb = dirac.b_block.neg();
            let go = dirac.c_block.transpose();
            (j12, j21, (Some(gb), None), (Some(go), None))
        }
        DiracVariant::DualStored => {
            let j12 = dirac.j12.neg();
            let j21 = dirac.j12.transpose();
            let gb = dirac.b_block.neg();
            let go = dirac.c_block.transpose();
            (j12, j21, (None, Some(gb)), (None, Some(go)))
        }
    };
    let j_int = block_matrix(
        &[n1, n2],
        &[n1, n2],
        &[vec![None, Some(&j12)], vec![Some(&j21), None]],
    );
    let g_int = block_matrix(
        &[n1, n2],
        &[nb],
        &[vec![g_blocks.0.as_ref()], vec![g_blocks.1.as_ref()]],
    );
    let gout_int = block_matrix(
        &[n1, n2],
        &[nb],
        &[vec![gout_blocks.0.as_ref()], vec![gout_blocks.1.as_ref()]],
    );
    if g_int != gout_int {
        return Err(Error::InvalidDegrees(
            "boundary rows are not collocated for these degrees".into(),
        ));
    }

    let (p_kernel_op, q_kernel_op) = match dirac.variant {
        DiracVariant::PrimalStored => (dirac.j21.clone(), dirac.j21.transpose()),
        DiracVariant::DualStored => (dirac.j12.transpose(), dirac.j12.clone()),
    };

    let mut q_diag = ham.qp.clone();
    q_diag.extend_from_slice(&ham.qq);

    let sys = PortHamiltonianSystem {
        variant: dirac.variant,
        p: dirac.p,
        q: dirac.q,
        n: dirac.n,
        j: j_int.to_real(),
        g: g_int.to_real(),
        gout: gout_int.to_real(),
        q_diag,
        partition: (n1, n2),
        controller_dim: 0,
        port_cells: dirac.boundary_cells.clone(),
        label,
        p_kernel_op,
        q_kernel_op,
    };
    debug_assert_eq!(sys.skew_residual(), 0.0);
    Ok(sys)
}

impl PortHamiltonianSystem {
    pub fn state_dim(&self) -> usize {
        self.partition.0 + self.partition.1 + self.controller_dim
    }

    pub fn port_count(&self) -> usize {
        self.g.cols()
    }

    /// Max-abs entry of J + Jᵀ; exactly zero for every assembled system.
    pub fn skew_residual(&self) -> f64 {
        self.j.add(&self.j.transpose()).expect("square").max_abs()
    }

    /// H(x) = ½ xᵀ Q x.
    pub fn energy(&self, x: &[f64]) -> f64 {
        0.5 * x
            .iter()
            .zip(&self.q_diag)
            .map(|(xi, qi)| qi * xi * xi)
            .sum::<f64>()
    }

    /// ∇H(x) = Q x.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.q_diag).map(|(xi, qi)| qi * xi).collect()
    }

    /// ẋ = J Q x + G u.
    pub fn xdot(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        let mut v = self.j.matvec(&self.gradient(x));
        let gu = self.g.matvec(u);
        for (a, b) in v.iter_mut().zip(&gu) {
            *a += b;
        }
        v
    }

    /// y = Goutᵀ Q x.
    pub fn output(&self, x: &[f64]) -> Vec<f64> {
        self.gout.matvec_transpose(&self.gradient(x))
    }

    /// |∇H(x)ᵀ ẋ - yᵀu| relative to the gross magnitude of the summands
    /// (both sides are heavily cancelled sums); vanishes by skewness plus
    /// collocation.
    pub fn power_residual(&self, x: &[f64], u: &[f64]) -> f64 {
        let grad = self.gradient(x);
        let xdot = self.xdot(x, u);
        let supplied: f64 = self.output(x).iter().zip(u).map(|(a, b)| a * b).sum();
        let stored: f64 = grad.iter().zip(&xdot).map(|(a, b)| a * b).sum();
        let gross: f64 = grad
            .iter()
            .zip(&xdot)
            .map(|(a, b)| (a * b).abs())
            .sum::<f64>()
            + self
                .output(x)
                .iter()
                .zip(u)
                .map(|(a, b)| (a * b).abs())
                .sum::<f64>();
        (stored - supplied).abs() / gross.max(1.0)
    }

    /// Dense A = (J + G F Goutᵀ) Q, the closed-loop generator when an
    /// output feedback u = F y is installed.
    pub fn a_matrix(&self, feedback: Option<&FeedbackLaw>) -> DMat {
        let dim = self.state_dim();
        let mut jeff = self.j.to_dense();
        if let Some(fb) = feedback {
            let g = self.g.to_dense();
            let gout_t = self.gout.to_dense().transpose();
            let gf = g.matmul(&fb.gain.to_dense());
            let gfg = gf.matmul(&gout_t);
            for i in 0..dim {
                for jj in 0..dim {
                    jeff[(i, jj)] += gfg[(i, jj)];
                }
            }
        }
        let mut a = DMat::zeros(dim, dim);
        for i in 0..dim {
            for jj in 0..dim {
                a[(i, jj)] = jeff[(i, jj)] * self.q_diag[jj];
            }
        }
        a
    }
}

/// Which state block a conservation law's gradient lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateBlock {
    P,
    Q,
}

/// A linear conservation law C(x) = cᵀx with balance dC/dt = mᵀu.
#[derive(Clone, Debug)]
pub struct ConservationLaw {
    pub block: StateBlock,
    /// Full-state coefficient vector (orthonormalized, sign-fixed).
    pub coefficients: Vec<f64>,
    /// Boundary flow map: dC/dt equals this vector dotted with the input.
    pub boundary_map: Vec<f64>,
}

/// Linear conservation laws of an open system: a basis of the p-block and
/// q-block kernels, each with its boundary balance map Gᵀc.
pub fn conservation_laws(sys: &PortHamiltonianSystem) -> Result<Vec<ConservationLaw>> {
    if sys.controller_dim != 0 {
        return Err(Error::InvalidInput(
            "conservation_laws applies to open systems; use closed_loop_casimirs".into(),
        ));
    }
    let (n1, n2) = sys.partition;
    let mut laws = Vec::new();
    let p_basis = sys.p_kernel_op.to_real().to_dense().null_space(1e-10);
    for c_p in p_basis {
        let mut full = vec![0.0; n1 + n2];
        full[..n1].copy_from_slice(&c_p);
        let map = sys.g.matvec_transpose(&full);
        laws.push(ConservationLaw {
            block: StateBlock::P,
            coefficients: full,
            boundary_map: map,
        });
    }
    let q_basis = sys.q_kernel_op.to_real().to_dense().null_space(1e-10);
    for c_q in q_basis {
        let mut full = vec![0.0; n1 + n2];
        full[n1..].copy_from_slice(&c_q);
        let map = sys.g.matvec_transpose(&full);
        laws.push(ConservationLaw {
            block: StateBlock::Q,
            coefficients: full,
            boundary_map: map,
        });
    }
    Ok(laws)
}

/// A static output feedback u = F y.
#[derive(Clone, Debug)]
pub struct FeedbackLaw {
    pub gain: RealCsr,
}

impl FeedbackLaw {
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        self.gain.matvec(y)
    }
}

/// The passivating boundary feedback u = (-1)^{(n-p)(n-q)-1} *_b y. With it
/// installed the energy rate becomes -yᵀ*_b y <= 0.
pub fn passivation_feedback(sys: &PortHamiltonianSystem, star_b: &LinearOp) -> Result<FeedbackLaw> {
    if sys.variant != DiracVariant::PrimalStored {
        return Err(Error::InvalidInput(
            "passivation feedback applies to primal-stored systems (boundary efforts as inputs)"
                .into(),
        ));
    }
    let nb = sys.port_count();
    if star_b.rows() != nb || star_b.cols() != nb {
        return Err(Error::DimensionMismatch(format!(
            "boundary Hodge is {}x{}, system has {nb} ports",
            star_b.rows(),
            star_b.cols()
        )));
    }
    let exp = (sys.n - sys.p) * (sys.n - sys.q) + 1;
    let sign = if exp % 2 == 0 { 1.0 } else { -1.0 };
    let gain = star_b.matrix.to_real().scale(sign);
    Ok(FeedbackLaw { gain })
}

/// An integrator-backed controller ζ̇ = g_c u_c, y_c = g_cᵀ ∂H_c/∂ζ with a
/// quadratic diagonal Hamiltonian H_c(ζ) = ½ ζᵀ diag(hc) ζ.
#[derive(Clone, Debug)]
pub struct Controller {
    pub gc: DMat,
    pub hc_diag: Vec<f64>,
}

impl Controller {
    pub fn new(gc_rows: Vec<Vec<f64>>, hc_diag: Vec<f64>) -> Result<Self> {
        if gc_rows.len() != hc_diag.len() {
            return Err(Error::DimensionMismatch(format!(
                "gc has {} rows but Hc has {} entries",
                gc_rows.len(),
                hc_diag.len()
            )));
        }
        if hc_diag.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidInput(
                "controller Hamiltonian diagonal must be positive".into(),
            ));
        }
        Ok(Controller {
            gc: DMat::from_rows(&gc_rows),
            hc_diag,
        })
    }
}

/// Power-preserving interconnection of a primal-stored plant with the
/// controller: the external port is kept, the controller couples through
/// the boundary, and the extended structure matrix
/// J_cl = [[J, G g_cᵀ],[-g_c Goutᵀ, 0]] is exactly skew.
pub fn close_loop(sys: &PortHamiltonianSystem, ctrl: &Controller) -> Result<PortHamiltonianSystem> {
    if sys.variant != DiracVariant::PrimalStored {
        return Err(Error::InvalidInput(
            "close_loop expects a primal-stored plant (boundary efforts as inputs)".into(),
        ));
    }
    if sys.controller_dim != 0 {
        return Err(Error::InvalidInput("plant is already a closed loop".into()));
    }
    let nb = sys.port_count();
    if ctrl.gc.ncols != nb {
        return Err(Error::DimensionMismatch(format!(
            "gc has {} columns, plant has {nb} ports",
            ctrl.gc.ncols
        )));
    }
    let m = ctrl.gc.nrows;
    let nx = sys.state_dim();

    let gc_csr = dense_to_csr(&ctrl.gc);
    let g_gct = sys.g.matmul(&gc_csr.transpose())?;
    let gc_goutt = gc_csr.matmul(&sys.gout.transpose())?.neg();

    let j_cl = block_matrix(
        &[nx, m],
        &[nx, m],
        &[
            vec![Some(&sys.j), Some(&g_gct)],
            vec![Some(&gc_goutt), None],
        ],
    );
    let g_cl = block_matrix(&[nx, m], &[nb], &[vec![Some(&sys.g)], vec![None]]);
    let gout_cl = block_matrix(&[nx, m], &[nb], &[vec![Some(&sys.gout)], vec![None]]);

    let mut q_diag = sys.q_diag.clone();
    q_diag.extend_from_slice(&ctrl.hc_diag);

    Ok(PortHamiltonianSystem {
        variant: sys.variant,
        p: sys.p,
        q: sys.q,
        n: sys.n,
        j: j_cl,
        g: g_cl,
        gout: gout_cl,
        q_diag,
        partition: sys.partition,
        controller_dim: m,
        port_cells: sys.port_cells.clone(),
        label: sys.label,
        p_kernel_op: sys.p_kernel_op.clone(),
        q_kernel_op: sys.q_kernel_op.clone(),
    })
}

fn dense_to_csr(m: &DMat) -> RealCsr {
    let mut triplets = Vec::new();
    for i in 0..m.nrows {
        for j in 0..m.ncols {
            if m[(i, j)] != 0.0 {
                triplets.push((i, j, m[(i, j)]));
            }
        }
    }
    RealCsr::from_triplets(m.nrows, m.ncols, &triplets)
}

/// A linear Casimir of a closed loop: cᵀ J_cl = 0 exactly, so cᵀx is
/// conserved for every Hamiltonian. `drive_invariant` marks Casimirs that
/// additionally satisfy cᵀG = 0 and hence stay conserved under arbitrary
/// external boundary drive.
#[derive(Clone, Debug)]
pub struct Casimir {
    pub coefficients: Vec<f64>,
    pub drive_invariant: bool,
}

/// Basis of linear Casimirs of a closed-loop system: the null space of
/// J_clᵀ, orthonormalized and sign-fixed.
pub fn closed_loop_casimirs(sys: &PortHamiltonianSystem) -> Result<Vec<Casimir>> {
    if sys.controller_dim == 0 {
        return Err(Error::InvalidInput(
            "closed_loop_casimirs expects a system produced by close_loop".into(),
        ));
    }
    let jt = sys.j.transpose().to_dense();
    let basis = jt.null_space(1e-10);
    let basis = orthonormalize_sign_fixed(basis);
    Ok(basis
        .into_iter()
        .map(|c| {
            let gtc = sys.g.matvec_transpose(&c);
            let drive_invariant = gtc.iter().all(|v| v.abs() < 1e-10);
            Casimir {
                coefficients: c,
                drive_invariant,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests;
