//! Circumcentric geometry: circumcenters, primal volumes, and the signed
//! elementary-dual-simplex accumulation of interior and boundary dual
//! volumes.

use super::{DualGeometry, Point, Simplex, SimplicialComplex};
use crate::linalg::DMat;
use crate::{Error, Result};

/// Unsigned k-volume of the simplex spanned by `pts`, with |σ⁰| = 1.
/// Computed as sqrt(det Gram)/k! so it works in any embedding dimension.
pub(crate) fn simplex_volume(pts: &[&Point]) -> f64 {
    let k = pts.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let gram = edge_gram(pts);
    let det = det_in_place(gram).max(0.0);
    det.sqrt() / factorial(k)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product::<f64>().max(1.0)
}

fn edge_gram(pts: &[&Point]) -> DMat {
    let k = pts.len() - 1;
    let d = pts[0].dim();
    let mut g = DMat::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let mut acc = 0.0;
            for c in 0..d {
                acc += (pts[i + 1].coords[c] - pts[0].coords[c])
                    * (pts[j + 1].coords[c] - pts[0].coords[c]);
            }
            g[(i, j)] = acc;
        }
    }
    g
}

fn det_in_place(mut a: DMat) -> f64 {
    let n = a.nrows;
    let mut det = 1.0;
    for k in 0..n {
        let mut p = k;
        for i in (k + 1)..n {
            if a[(i, k)].abs() > a[(p, k)].abs() {
                p = i;
            }
        }
        if a[(p, k)] == 0.0 {
            return 0.0;
        }
        if p != k {
            det = -det;
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(p, j)];
                a[(p, j)] = tmp;
            }
        }
        det *= a[(k, k)];
        for i in (k + 1)..n {
            let m = a[(i, k)] / a[(k, k)];
            for j in k..n {
                a[(i, j)] -= m * a[(k, j)];
            }
        }
    }
    det
}

/// Circumcenter of the simplex spanned by `pts`: the unique point of the
/// affine hull equidistant from all vertices.
pub fn circumcenter_of(pts: &[&Point]) -> Result<Point> {
    let k = pts.len() - 1;
    if k == 0 {
        return Ok(pts[0].clone());
    }
    let d = pts[0].dim();
    let mut g = edge_gram(pts);
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] *= 2.0;
        }
    }
    let b: Vec<f64> = (1..=k)
        .map(|i| {
            (0..d)
                .map(|c| (pts[i].coords[c] - pts[0].coords[c]).powi(2))
                .sum()
        })
        .collect();
    let lu = g.lu().map_err(|_| {
        Error::DegenerateSimplex("circumcenter of an affinely dependent simplex".into())
    })?;
    let lam = lu.solve(&b);
    let mut coords = pts[0].coords.clone();
    for (i, l) in lam.iter().enumerate() {
        for c in 0..d {
            coords[c] += l * (pts[i + 1].coords[c] - pts[0].coords[c]);
        }
    }
    Ok(Point::new(coords))
}

/// Circumcenter of a simplex of a complex.
pub fn circumcenter(simplex: &Simplex, vertices: &[Point]) -> Result<Point> {
    let pts: Vec<&Point> = simplex.vertices.iter().map(|&v| &vertices[v]).collect();
    circumcenter_of(&pts)
}

/// Project `target` onto the affine hull of `pts`, returning the projection.
fn project_affine(pts: &[&Point], target: &Point) -> Point {
    let k = pts.len() - 1;
    if k == 0 {
        return pts[0].clone();
    }
    let d = pts[0].dim();
    let g = edge_gram(pts);
    let b: Vec<f64> = (1..=k)
        .map(|i| {
            (0..d)
                .map(|c| {
                    (pts[i].coords[c] - pts[0].coords[c]) * (target.coords[c] - pts[0].coords[c])
                })
                .sum()
        })
        .collect();
    match g.lu() {
        Ok(lu) => {
            let lam = lu.solve(&b);
            let mut coords = pts[0].coords.clone();
            for (i, l) in lam.iter().enumerate() {
                for c in 0..d {
                    coords[c] += l * (pts[i + 1].coords[c] - pts[0].coords[c]);
                }
            }
            Point::new(coords)
        }
        Err(_) => pts[0].clone(),
    }
}

/// Elementary-dual sign for the chain step σ ⊂ τ: +1 when the circumcenter
/// of τ lies on the same side of aff(σ) as the vertex of τ opposite σ.
fn halfspace_sign(
    complex: &SimplicialComplex,
    k: usize,
    sid: usize,
    tid: usize,
    cc_tau: &Point,
) -> f64 {
    let spts: Vec<&Point> = complex
        .simplex(k, sid)
        .vertices
        .iter()
        .map(|&v| &complex.vertices()[v])
        .collect();
    let tau = complex.simplex(k + 1, tid);
    let opp = *tau
        .vertices
        .iter()
        .find(|v| !complex.simplex(k, sid).vertices.contains(v))
        .expect("face must omit one vertex");
    let vopp = &complex.vertices()[opp];
    let proj_c = project_affine(&spts, cc_tau);
    let proj_v = project_affine(&spts, vopp);
    let d = vopp.dim();
    let dot: f64 = (0..d)
        .map(|c| (cc_tau.coords[c] - proj_c.coords[c]) * (vopp.coords[c] - proj_v.coords[c]))
        .sum();
    if dot > 0.0 {
        1.0
    } else if dot < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Signed interior dual volumes for all dimensions of a complex, by
/// summation of elementary dual simplices (chains of circumcenters).
fn dual_interior_volumes(complex: &SimplicialComplex, cc: &[Vec<Point>]) -> Vec<Vec<f64>> {
    let n = complex.dim();
    let mut dual: Vec<Vec<f64>> = (0..=n).map(|k| vec![0.0; complex.count(k)]).collect();
    for i in 0..complex.count(n) {
        dual[n][i] = 1.0;
    }
    // Walk ascending chains σ^k ⊂ σ^{k+1} ⊂ … ⊂ σ^n, accumulating the
    // signed volume of [c(σ^k), …, c(σ^n)] into σ^k.
    for k in 0..n {
        for sid in 0..complex.count(k) {
            let mut total = 0.0;
            let mut stack: Vec<(usize, usize, Vec<Point>, f64)> =
                vec![(k, sid, vec![cc[k][sid].clone()], 1.0)];
            while let Some((j, id, pts, sign)) = stack.pop() {
                if j == n {
                    let refs: Vec<&Point> = pts.iter().collect();
                    total += sign * simplex_volume(&refs);
                    continue;
                }
                for &(cid, _) in complex.cofaces_of(j, id) {
                    let c_next = &cc[j + 1][cid];
                    let s = halfspace_sign(complex, j, id, cid, c_next);
                    let mut next_pts = pts.clone();
                    next_pts.push(c_next.clone());
                    stack.push((j + 1, cid, next_pts, sign * s));
                }
            }
            dual[k][sid] = total;
        }
    }
    dual
}

/// Compute circumcenters, primal volumes, and interior/boundary dual
/// volumes of a complex.
pub fn compute_dual_geometry(complex: &SimplicialComplex) -> Result<DualGeometry> {
    let n = complex.dim();
    let mut cc: Vec<Vec<Point>> = Vec::with_capacity(n + 1);
    let mut primal: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut level_cc = Vec::with_capacity(complex.count(k));
        let mut level_vol = Vec::with_capacity(complex.count(k));
        for s in complex.simplices(k) {
            level_cc.push(circumcenter(s, complex.vertices())?);
            let pts: Vec<&Point> = s.vertices.iter().map(|&v| &complex.vertices()[v]).collect();
            let vol = simplex_volume(&pts);
            if k > 0 && vol <= 0.0 {
                return Err(Error::DegenerateSimplex(format!(
                    "{k}-simplex {:?} has zero volume",
                    s.vertices
                )));
            }
            level_vol.push(vol);
        }
        cc.push(level_cc);
        primal.push(level_vol);
    }

    let dual_vol_interior = dual_interior_volumes(complex, &cc);

    // Boundary duals: the same construction one dimension down on ∂K.
    let mut dual_vol_boundary: Vec<Vec<f64>> =
        (0..n.max(1)).map(|k| vec![0.0; complex.count(k)]).collect();
    if n >= 1 {
        let (bc, maps) = complex.boundary_complex()?;
        let bn = bc.dim();
        let mut bcc: Vec<Vec<Point>> = Vec::with_capacity(bn + 1);
        for k in 0..=bn {
            let level: Result<Vec<Point>> = bc
                .simplices(k)
                .iter()
                .map(|s| circumcenter(s, bc.vertices()))
                .collect();
            bcc.push(level?);
        }
        let bdual = dual_interior_volumes(&bc, &bcc);
        for k in 0..=bn {
            for (bid, &parent) in maps.to_parent[k].iter().enumerate() {
                dual_vol_boundary[k][parent] = bdual[k][bid];
            }
        }
    }

    Ok(DualGeometry {
        circumcenter: cc,
        primal_vol: primal,
        dual_vol_interior,
        dual_vol_boundary,
    })
}

/// Result of the well-centeredness check.
#[derive(Clone, Debug)]
pub struct WellCenteredReport {
    pub ok: bool,
    /// (dimension, simplex id) of each simplex whose circumcenter is not
    /// strictly interior.
    pub offenders: Vec<(usize, usize)>,
    /// Smallest barycentric coordinate seen across all simplices.
    pub min_margin: f64,
}

/// Strict interiority margin on barycentric coordinates.
pub const WELL_CENTERED_MARGIN: f64 = 1e-9;

/// A complex is well-centered when every simplex of dimension >= 1 contains
/// its own circumcenter strictly inside.
pub fn is_well_centered(
    complex: &SimplicialComplex,
    geometry: &DualGeometry,
) -> WellCenteredReport {
    let n = complex.dim();
    let mut offenders = Vec::new();
    let mut min_margin = f64::INFINITY;
    for k in 1..=n {
        for s in complex.simplices(k) {
            let pts: Vec<&Point> = s.vertices.iter().map(|&v| &complex.vertices()[v]).collect();
            let c = &geometry.circumcenter[k][s.id];
            let lam = barycentric(&pts, c);
            let m = lam.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            min_margin = min_margin.min(m);
            if !(m > WELL_CENTERED_MARGIN) {
                offenders.push((k, s.id));
            }
        }
    }
    WellCenteredReport {
        ok: offenders.is_empty(),
        offenders,
        min_margin,
    }
}

/// Barycentric coordinates of `target` with respect to the simplex `pts`
/// (valid within the affine hull).
pub fn barycentric(pts: &[&Point], target: &Point) -> Vec<f64> {
    let k = pts.len() - 1;
    if k == 0 {
        return vec![1.0];
    }
    let d = pts[0].dim();
    let g = edge_gram(pts);
    let b: Vec<f64> = (1..=k)
        .map(|i| {
            (0..d)
                .map(|c| {
                    (pts[i].coords[c] - pts[0].coords[c]) * (target.coords[c] - pts[0].coords[c])
                })
                .sum()
        })
        .collect();
    match g.lu() {
        Ok(lu) => {
            let lam = lu.solve(&b);
            let mut out = Vec::with_capacity(k + 1);
            out.push(1.0 - lam.iter().sum::<f64>());
            out.extend(lam);
            out
        }
        Err(_) => vec![f64::NEG_INFINITY; k + 1],
    }
}
