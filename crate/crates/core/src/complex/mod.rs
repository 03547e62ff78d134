//! Oriented manifold-like simplicial complexes and their circumcentric duals.
//!
//! A complex is built from its top-dimensional simplices; all lower face
//! tables are enumerated with deterministic ids (lexicographic order of the
//! sorted vertex tuples) and simplices store a separate orientation sign
//! relative to the sorted order. Boundary flags come from the one-coface
//! rule. The dual geometry assigns circumcenters, primal volumes, and
//! signed interior/boundary dual volumes to every simplex.

mod generators;
mod geometry;
mod json;

pub use generators::{generate_interval_mesh, generate_strip_mesh};
pub use geometry::{circumcenter, compute_dual_geometry, is_well_centered, WellCenteredReport};
pub use json::{mesh_from_json, mesh_to_json};

use crate::{Error, Result};

/// A point of the embedding space. Embedding dimension equals the
/// topological dimension of the complex (flat Euclidean domains).
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// An oriented k-simplex: sorted vertex ids plus a sign saying how the
/// basis chain relates to the sorted tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplex {
    /// Strictly increasing vertex ids.
    pub vertices: Vec<usize>,
    /// +1 or -1 relative to the sorted vertex order.
    pub orientation: i8,
    /// Dense index within its dimension.
    pub id: usize,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Orientation sign of a vertex tuple relative to its sorted order, or
/// `None` if the tuple has repeated vertices.
pub(crate) fn permutation_sign(tuple: &[usize]) -> Option<i8> {
    let mut v = tuple.to_vec();
    let mut sign = 1i8;
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            match v[j].cmp(&v[i]) {
                std::cmp::Ordering::Less => {
                    v.swap(i, j);
                    sign = -sign;
                }
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Greater => {}
            }
        }
    }
    Some(sign)
}

/// Oriented manifold-like simplicial complex with dense face tables.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    dim: usize,
    vertices: Vec<Point>,
    /// simplices[k] lists the k-simplices in id order.
    simplices: Vec<Vec<Simplex>>,
    /// faces[k][i] = (face id, incidence sign) for each (k-1)-face of
    /// k-simplex i, ordered by the alternating-face index. Empty for k = 0.
    faces: Vec<Vec<Vec<(usize, i8)>>>,
    /// cofaces[k][i] = (coface id, incidence sign) of each (k+1)-coface.
    cofaces: Vec<Vec<Vec<(usize, i8)>>>,
    /// boundary_flag[k][i] for k = 0..n-1; top dimension has no flags.
    boundary_flag: Vec<Vec<bool>>,
}

impl SimplicialComplex {
    /// Topological dimension n.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of k-simplices.
    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, |s| s.len())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn simplices(&self, k: usize) -> &[Simplex] {
        &self.simplices[k]
    }

    pub fn simplex(&self, k: usize, id: usize) -> &Simplex {
        &self.simplices[k][id]
    }

    /// (face id, incidence sign) pairs of a k-simplex, k >= 1.
    pub fn faces_of(&self, k: usize, id: usize) -> &[(usize, i8)] {
        &self.faces[k][id]
    }

    /// (coface id, incidence sign) pairs of a k-simplex, k <= n-1.
    pub fn cofaces_of(&self, k: usize, id: usize) -> &[(usize, i8)] {
        &self.cofaces[k][id]
    }

    pub fn is_boundary(&self, k: usize, id: usize) -> bool {
        if k >= self.dim {
            return false;
        }
        self.boundary_flag[k][id]
    }

    /// Ids of boundary k-simplices in increasing id order.
    pub fn boundary_ids(&self, k: usize) -> Vec<usize> {
        if k >= self.dim {
            return Vec::new();
        }
        (0..self.count(k))
            .filter(|&i| self.boundary_flag[k][i])
            .collect()
    }

    pub fn boundary_count(&self, k: usize) -> usize {
        self.boundary_ids(k).len()
    }

    /// Vertex coordinates of a simplex.
    pub fn simplex_points(&self, k: usize, id: usize) -> Vec<&Point> {
        self.simplices[k][id]
            .vertices
            .iter()
            .map(|&v| &self.vertices[v])
            .collect()
    }

    /// Position of a k-simplex id in the boundary id list, if any.
    pub fn boundary_position(&self, k: usize, id: usize) -> Option<usize> {
        self.boundary_ids(k).iter().position(|&b| b == id)
    }

    /// Induced boundary orientation sign of a boundary (n-1)-simplex: its
    /// incidence sign in the unique top coface.
    pub fn induced_sign(&self, id: usize) -> i8 {
        let k = self.dim - 1;
        debug_assert!(self.boundary_flag[k][id]);
        let (coface, sign) = self.cofaces[k][id][0];
        let _ = coface;
        sign
    }

    /// The boundary complex of dimension n-1 together with index maps:
    /// `maps.to_parent[k]` sends boundary ids to parent ids and
    /// `maps.from_parent[k]` inverts it.
    pub fn boundary_complex(&self) -> Result<(SimplicialComplex, BoundaryMaps)> {
        build_boundary_complex(self)
    }
}

/// Bijective index maps between a boundary complex and its parent.
#[derive(Clone, Debug)]
pub struct BoundaryMaps {
    /// Per dimension, boundary id -> parent id.
    pub to_parent: Vec<Vec<usize>>,
    /// Per dimension, parent id -> boundary id (None off the boundary).
    pub from_parent: Vec<Vec<Option<usize>>>,
}

/// Construct a complex from vertices and top-dimensional simplices given as
/// vertex-id tuples whose order defines the orientation.
///
/// Rejects non-manifold input ((n-1)-simplices with more than two cofaces,
/// or pinched vertex stars), disconnected complexes, inconsistently
/// oriented top simplices, and degenerate (zero-volume) simplices.
pub fn build_complex(
    vertices: Vec<Point>,
    top_simplices: &[Vec<usize>],
) -> Result<SimplicialComplex> {
    build_complex_with_options(vertices, top_simplices, true)
}

pub(crate) fn build_complex_with_options(
    vertices: Vec<Point>,
    top_simplices: &[Vec<usize>],
    require_connected: bool,
) -> Result<SimplicialComplex> {
    if top_simplices.is_empty() {
        return Err(Error::InvalidInput("no top-dimensional simplices".into()));
    }
    let arity = top_simplices[0].len();
    if arity == 0 {
        return Err(Error::InvalidInput("empty simplex tuple".into()));
    }
    let n = arity - 1;
    for t in top_simplices {
        if t.len() != arity {
            return Err(Error::InvalidInput(format!(
                "mixed simplex arity: expected {arity}, got {}",
                t.len()
            )));
        }
        for &v in t {
            if v >= vertices.len() {
                return Err(Error::InvalidInput(format!("vertex id {v} out of range")));
            }
        }
    }
    for (i, p) in vertices.iter().enumerate() {
        if p.coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "vertex {i} has non-finite coordinates"
            )));
        }
        if p.dim() != vertices[0].dim() {
            return Err(Error::InvalidInput(
                "vertices with mixed embedding dimensions".into(),
            ));
        }
    }
    if n > 0 && vertices[0].dim() != n {
        return Err(Error::InvalidInput(format!(
            "embedding dimension {} must equal topological dimension {n}",
            vertices[0].dim()
        )));
    }

    // Top-level simplices: sorted tuple + orientation from input order.
    let mut top: Vec<(Vec<usize>, i8)> = Vec::with_capacity(top_simplices.len());
    for t in top_simplices {
        let sign = permutation_sign(t)
            .ok_or_else(|| Error::DegenerateSimplex(format!("repeated vertex in simplex {t:?}")))?;
        let mut sorted = t.clone();
        sorted.sort_unstable();
        top.push((sorted, sign));
    }

    // Enumerate every dimension: sorted unique tuples in lexicographic order.
    let mut tuples: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n + 1];
    tuples[n] = {
        let mut ts: Vec<Vec<usize>> = top.iter().map(|(t, _)| t.clone()).collect();
        ts.sort();
        ts.dedup();
        ts
    };
    if tuples[n].len() != top.len() {
        return Err(Error::NonManifold(
            "duplicate top-dimensional simplex".into(),
        ));
    }
    for k in (0..n).rev() {
        let mut ts: Vec<Vec<usize>> = Vec::new();
        for t in &tuples[k + 1] {
            for omit in 0..t.len() {
                let mut f: Vec<usize> = t.clone();
                f.remove(omit);
                ts.push(f);
            }
        }
        ts.sort();
        ts.dedup();
        tuples[k] = ts;
    }
    if tuples[0].len() != vertices.len() {
        return Err(Error::InvalidInput(format!(
            "{} vertices supplied but only {} referenced by simplices",
            vertices.len(),
            tuples[0].len()
        )));
    }

    // Simplex tables with orientations: top from input, lower default +1.
    let mut simplices: Vec<Vec<Simplex>> = Vec::with_capacity(n + 1);
    for ts in tuples.iter() {
        let table: Vec<Simplex> = ts
            .iter()
            .enumerate()
            .map(|(id, t)| Simplex {
                vertices: t.clone(),
                orientation: 1,
                id,
            })
            .collect();
        simplices.push(table);
    }
    for (sorted, sign) in &top {
        let id = tuples[n].binary_search(sorted).unwrap();
        simplices[n][id].orientation = *sign;
    }

    // Face tables with incidence signs or(σ)·or(τ)·(-1)^j.
    let mut faces: Vec<Vec<Vec<(usize, i8)>>> = vec![Vec::new(); n + 1];
    let mut cofaces: Vec<Vec<Vec<(usize, i8)>>> = vec![Vec::new(); n + 1];
    for k in 0..=n {
        faces[k] = vec![Vec::new(); simplices[k].len()];
        cofaces[k] = vec![Vec::new(); simplices[k].len()];
    }
    for k in 1..=n {
        for id in 0..simplices[k].len() {
            let or_s = simplices[k][id].orientation;
            let t = simplices[k][id].vertices.clone();
            for omit in 0..t.len() {
                let mut f: Vec<usize> = t.clone();
                f.remove(omit);
                let fid = tuples[k - 1].binary_search(&f).unwrap();
                let or_f = simplices[k - 1][fid].orientation;
                let sign = or_s * or_f * if omit % 2 == 0 { 1 } else { -1 };
                faces[k][id].push((fid, sign));
                cofaces[k - 1][fid].push((id, sign));
            }
        }
    }

    // Manifold-like: every (n-1)-simplex has one or two top cofaces.
    if n >= 1 {
        for (fid, cf) in cofaces[n - 1].iter().enumerate() {
            if cf.is_empty() || cf.len() > 2 {
                return Err(Error::NonManifold(format!(
                    "(n-1)-simplex {:?} has {} cofaces",
                    tuples[n - 1][fid],
                    cf.len()
                )));
            }
        }
    }

    // Orientation consistency: interior (n-1)-faces must see opposite signs.
    if n >= 1 {
        for (fid, cf) in cofaces[n - 1].iter().enumerate() {
            if cf.len() == 2 && cf[0].1 * cf[1].1 != -1 {
                return Err(Error::InconsistentOrientation(format!(
                    "top simplices disagree across face {:?}",
                    tuples[n - 1][fid]
                )));
            }
        }
    }

    // Pinch check: the top cofaces of each vertex must be connected through
    // (n-1)-faces containing that vertex (catches e.g. two triangles glued
    // at a single vertex).
    if n >= 2 {
        for v in 0..vertices.len() {
            let star: Vec<usize> = simplices[n]
                .iter()
                .filter(|s| s.vertices.contains(&v))
                .map(|s| s.id)
                .collect();
            if star.len() <= 1 {
                continue;
            }
            let mut reached = vec![false; star.len()];
            let mut stack = vec![0usize];
            reached[0] = true;
            while let Some(si) = stack.pop() {
                let sid = star[si];
                for &(fid, _) in &faces[n][sid] {
                    if !simplices[n - 1][fid].vertices.contains(&v) {
                        continue;
                    }
                    for &(other, _) in &cofaces[n - 1][fid] {
                        if let Some(oi) = star.iter().position(|&s| s == other) {
                            if !reached[oi] {
                                reached[oi] = true;
                                stack.push(oi);
                            }
                        }
                    }
                }
            }
            if reached.iter().any(|r| !r) {
                return Err(Error::NonManifold(format!(
                    "vertex {v} has a disconnected star (pinch point)"
                )));
            }
        }
    }

    // Connectivity through shared (n-1)-faces.
    if require_connected && n >= 1 {
        let nt = simplices[n].len();
        let mut reached = vec![false; nt];
        let mut stack = vec![0usize];
        reached[0] = true;
        while let Some(sid) = stack.pop() {
            for &(fid, _) in &faces[n][sid] {
                for &(other, _) in &cofaces[n - 1][fid] {
                    if !reached[other] {
                        reached[other] = true;
                        stack.push(other);
                    }
                }
            }
        }
        if reached.iter().any(|r| !r) {
            return Err(Error::Disconnected);
        }
    }

    // Degeneracy: every top simplex needs positive volume.
    for s in &simplices[n] {
        let pts: Vec<&Point> = s.vertices.iter().map(|&v| &vertices[v]).collect();
        let vol = geometry::simplex_volume(&pts);
        let scale: f64 = pts
            .iter()
            .skip(1)
            .map(|p| p.distance(pts[0]))
            .fold(0.0, f64::max);
        if !(vol > 1e-12 * scale.powi(n as i32).max(1e-300)) {
            return Err(Error::DegenerateSimplex(format!(
                "simplex {:?} has volume {vol:.3e}",
                s.vertices
            )));
        }
    }

    // Boundary flags: (n-1)-simplices with one coface, then their closures.
    let mut boundary_flag: Vec<Vec<bool>> = Vec::new();
    for k in 0..n {
        boundary_flag.push(vec![false; simplices[k].len()]);
    }
    if n >= 1 {
        for (fid, cf) in cofaces[n - 1].iter().enumerate() {
            if cf.len() == 1 {
                boundary_flag[n - 1][fid] = true;
            }
        }
        for k in (0..n.saturating_sub(1)).rev() {
            for id in 0..simplices[k + 1].len() {
                if boundary_flag[k + 1][id] {
                    for &(fid, _) in &faces[k + 1][id] {
                        boundary_flag[k][fid] = true;
                    }
                }
            }
        }
    }

    Ok(SimplicialComplex {
        dim: n,
        vertices,
        simplices,
        faces,
        cofaces,
        boundary_flag,
    })
}

/// Build the boundary complex with induced orientations. Dimension n-1; the
/// 1D case yields a 0-dimensional complex of two signed vertices.
fn build_boundary_complex(k: &SimplicialComplex) -> Result<(SimplicialComplex, BoundaryMaps)> {
    let n = k.dim();
    if n == 0 {
        return Err(Error::InvalidInput(
            "0-dimensional complex has no boundary complex".into(),
        ));
    }
    // Order-preserving vertex relabeling keeps lexicographic ids aligned
    // between parent and boundary tables.
    let bverts = k.boundary_ids(0);
    let mut vmap: Vec<Option<usize>> = vec![None; k.count(0)];
    for (new, &old) in bverts.iter().enumerate() {
        vmap[old] = Some(new);
    }
    let vertices: Vec<Point> = bverts.iter().map(|&v| k.vertices()[v].clone()).collect();

    let mut simplices: Vec<Vec<Simplex>> = Vec::with_capacity(n);
    let mut to_parent: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut from_parent: Vec<Vec<Option<usize>>> = Vec::with_capacity(n);
    for bk in 0..n {
        let ids = k.boundary_ids(bk);
        let mut table = Vec::with_capacity(ids.len());
        let mut back = vec![None; k.count(bk)];
        for (new, &old) in ids.iter().enumerate() {
            let parent = k.simplex(bk, old);
            let verts: Vec<usize> = parent.vertices.iter().map(|&v| vmap[v].unwrap()).collect();
            // Induced orientation on the top boundary dimension; +1 below.
            let orientation = if bk == n - 1 {
                k.induced_sign(old) * parent.orientation
            } else {
                1
            };
            table.push(Simplex {
                vertices: verts,
                orientation,
                id: new,
            });
            back[old] = Some(new);
        }
        simplices.push(table);
        to_parent.push(ids);
        from_parent.push(back);
    }

    // Face/coface tables inside the boundary complex.
    let bn = n - 1;
    let mut faces: Vec<Vec<Vec<(usize, i8)>>> = vec![Vec::new(); bn + 1];
    let mut cofaces: Vec<Vec<Vec<(usize, i8)>>> = vec![Vec::new(); bn + 1];
    for bk in 0..=bn {
        faces[bk] = vec![Vec::new(); simplices[bk].len()];
        cofaces[bk] = vec![Vec::new(); simplices[bk].len()];
    }
    for bk in 1..=bn {
        let lower_tuples: Vec<Vec<usize>> = simplices[bk - 1]
            .iter()
            .map(|s| s.vertices.clone())
            .collect();
        for id in 0..simplices[bk].len() {
            let or_s = simplices[bk][id].orientation;
            let t = simplices[bk][id].vertices.clone();
            for omit in 0..t.len() {
                let mut f = t.clone();
                f.remove(omit);
                let fid = lower_tuples.binary_search(&f).map_err(|_| {
                    Error::InvalidInput("boundary complex face table incomplete".into())
                })?;
                let or_f = simplices[bk - 1][fid].orientation;
                let sign = or_s * or_f * if omit % 2 == 0 { 1 } else { -1 };
                faces[bk][id].push((fid, sign));
                cofaces[bk - 1][fid].push((id, sign));
            }
        }
    }

    let boundary_flag: Vec<Vec<bool>> =
        (0..bn).map(|bk| vec![false; simplices[bk].len()]).collect();

    Ok((
        SimplicialComplex {
            dim: bn,
            vertices,
            simplices,
            faces,
            cofaces,
            boundary_flag,
        },
        BoundaryMaps {
            to_parent,
            from_parent,
        },
    ))
}

/// Circumcenters, primal volumes, and signed dual volumes of a complex.
/// All tables are indexed `[dimension][simplex id]`.
#[derive(Clone, Debug)]
pub struct DualGeometry {
    /// Circumcenter of every simplex.
    pub circumcenter: Vec<Vec<Point>>,
    /// Primal volumes, with the |σ⁰| = 1 convention.
    pub primal_vol: Vec<Vec<f64>>,
    /// Signed volume of the interior dual (n-k)-cell of each k-simplex;
    /// the dual of a top simplex is a 0-cell of volume 1.
    pub dual_vol_interior: Vec<Vec<f64>>,
    /// For boundary k-simplices (k <= n-1), the volume of the boundary
    /// dual (n-1-k)-cell, indexed by parent id; zero for interior
    /// simplices.
    pub dual_vol_boundary: Vec<Vec<f64>>,
}
