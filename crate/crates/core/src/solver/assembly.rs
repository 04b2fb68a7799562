//! Residual and exact Jacobian of the weak form
//! `R_i = Σ_T |T| [ (g·b_i)/W + F λ²/3 ]` over interior nodes, with `g` the
//! constant gradient on `T`, `b_i` the basis gradients and `λ` taken at the centroid.

use super::{ProblemKind, SolverError};
use crate::geom::Point;
use crate::mesh::TriMesh;
use crate::metric::ConformalMetric;

/// Compressed-row sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from unsorted triplets, summing duplicates.
    pub fn from_triplets(n: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<f64> = Vec::with_capacity(t.len());
        let mut last = None;
        for (i, j, v) in t {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(|k| (self.cols[k], self.vals[k]))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|A_ij − A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub(crate) fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        use faer::linalg::solvers::Solve;
        use faer::sparse::{SparseColMat, Triplet};
        let mut trips = Vec::with_capacity(self.vals.len());
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                trips.push(Triplet::new(i, j, v));
            }
        }
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(self.n, self.n, &trips).ok()?;
        let lu = a.sp_lu().ok()?;
        let mut b = faer::Mat::from_fn(self.n, 1, |i, _| rhs[i]);
        lu.solve_in_place(b.as_mut());
        let x: Vec<f64> = (0..self.n).map(|i| b[(i, 0)]).collect();
        x.iter().all(|v| v.is_finite()).then_some(x)
    }
}

/// Per-triangle constants shared by residual and Jacobian.
pub(crate) struct Element {
    pub nodes: [usize; 3],
    pub grads: [Point; 3],
    pub area: f64,
    pub lambda_sq: f64,
}

pub(crate) fn elements(mesh: &TriMesh, metric: &ConformalMetric) -> Result<Vec<Element>, SolverError> {
    let mut out = Vec::with_capacity(mesh.triangles.len());
    for (t, &nodes) in mesh.triangles.iter().enumerate() {
        let [a, b, c] = mesh.triangle_points(t);
        let twice = crate::geom::orient(a, b, c);
        // gradient of the hat function at a vertex is the rotated opposite edge over twice the area
        let grads = [
            (c - b).perp() * (1.0 / twice),
            (a - c).perp() * (1.0 / twice),
            (b - a).perp() * (1.0 / twice),
        ];
        let centroid = (a + b + c) * (1.0 / 3.0);
        let lambda = metric.lambda(centroid)?;
        out.push(Element {
            nodes,
            grads,
            area: 0.5 * twice,
            lambda_sq: lambda * lambda,
        });
    }
    Ok(out)
}

/// Map from mesh node to interior unknown index.
pub(crate) fn dof_map(mesh: &TriMesh) -> (Vec<Option<usize>>, Vec<usize>) {
    let interior = mesh.interior_nodes();
    let mut map = vec![None; mesh.vertices.len()];
    for (k, &v) in interior.iter().enumerate() {
        map[v] = Some(k);
    }
    (map, interior)
}

fn check_finite(u: &[f64]) -> Result<(), SolverError> {
    match u.iter().position(|x| !x.is_finite()) {
        Some(node) => Err(SolverError::NonFinite { node }),
        None => Ok(()),
    }
}

pub(crate) struct Local {
    pub g: Point,
    pub w: f64,
}

pub(crate) fn local(e: &Element, u: &[f64]) -> Local {
    let g = e.grads[0] * u[e.nodes[0]] + e.grads[1] * u[e.nodes[1]] + e.grads[2] * u[e.nodes[2]];
    let w = (1.0 + g.norm_sq() / e.lambda_sq).sqrt();
    Local { g, w }
}

fn source(kind: ProblemKind, w: f64) -> f64 {
    match kind {
        ProblemKind::Minimal => 0.0,
        ProblemKind::Cmc { h0 } => h0,
        ProblemKind::Translator { c } => c / w,
    }
}

pub(crate) fn residual_with(
    elems: &[Element],
    map: &[Option<usize>],
    n: usize,
    u: &[f64],
    kind: ProblemKind,
) -> Vec<f64> {
    let mut r = vec![0.0; n];
    for e in elems {
        let Local { g, w } = local(e, u);
        let f = source(kind, w) * e.lambda_sq / 3.0;
        for a in 0..3 {
            if let Some(i) = map[e.nodes[a]] {
                r[i] += e.area * (g.dot(e.grads[a]) / w + f);
            }
        }
    }
    r
}

pub(crate) fn jacobian_with(
    elems: &[Element],
    map: &[Option<usize>],
    n: usize,
    u: &[f64],
    kind: ProblemKind,
) -> SparseMatrix {
    let mut t = Vec::with_capacity(9 * elems.len());
    for e in elems {
        let Local { g, w } = local(e, u);
        let w3 = w * w * w;
        for a in 0..3 {
            let Some(i) = map[e.nodes[a]] else { continue };
            let gi = g.dot(e.grads[a]);
            for b in 0..3 {
                let Some(j) = map[e.nodes[b]] else { continue };
                let gj = g.dot(e.grads[b]);
                let mut v = e.grads[a].dot(e.grads[b]) / w - gi * gj / (e.lambda_sq * w3);
                if let ProblemKind::Translator { c } = kind {
                    v -= c * gj / (3.0 * w3);
                }
                t.push((i, j, e.area * v));
            }
        }
    }
    SparseMatrix::from_triplets(n, t)
}

/// Weak-form residual at the interior nodes, ordered as `mesh.interior_nodes()`.
pub fn assemble_residual(
    mesh: &TriMesh,
    metric: &ConformalMetric,
    u: &[f64],
    kind: ProblemKind,
) -> Result<Vec<f64>, SolverError> {
    check_finite(u)?;
    let elems = elements(mesh, metric)?;
    let (map, interior) = dof_map(mesh);
    Ok(residual_with(&elems, &map, interior.len(), u, kind))
}

/// Exact derivative of [`assemble_residual`] with respect to the interior values.
pub fn assemble_jacobian(
    mesh: &TriMesh,
    metric: &ConformalMetric,
    u: &[f64],
    kind: ProblemKind,
) -> Result<SparseMatrix, SolverError> {
    check_finite(u)?;
    let elems = elements(mesh, metric)?;
    let (map, interior) = dof_map(mesh);
    Ok(jacobian_with(&elems, &map, interior.len(), u, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::presets::rectangle;
    use crate::domain::ArcKind::*;
    use crate::mesh::generate_mesh;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square_mesh(h: f64) -> TriMesh {
        let d = rectangle("sq", (0.0, 1.0), (0.0, 1.0), [C, C, C, C], "0").unwrap();
        generate_mesh(&d, h, 1.0).unwrap()
    }

    #[test]
    fn zero_field_has_zero_minimal_residual() {
        let m = square_mesh(0.2);
        let u = vec![0.0; m.vertices.len()];
        let r = assemble_residual(&m, &ConformalMetric::euclidean(), &u, ProblemKind::Minimal).unwrap();
        assert!(r.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn zero_field_jacobian_is_stiffness_matrix() {
        let m = square_mesh(0.25);
        let u = vec![0.0; m.vertices.len()];
        let j = assemble_jacobian(&m, &ConformalMetric::euclidean(), &u, ProblemKind::Minimal).unwrap();
        let (map, interior) = dof_map(&m);
        let mut k = vec![vec![0.0; interior.len()]; interior.len()];
        for (t, tri) in m.triangles.iter().enumerate() {
            let [a, b, c] = m.triangle_points(t);
            let p = [a, b, c];
            let area = crate::geom::triangle_area(a, b, c);
            for x in 0..3 {
                for y in 0..3 {
                    let (Some(i), Some(jj)) = (map[tri[x]], map[tri[y]]) else { continue };
                    // cotangent form: edge vectors opposite each vertex
                    let ex = p[(x + 2) % 3] - p[(x + 1) % 3];
                    let ey = p[(y + 2) % 3] - p[(y + 1) % 3];
                    k[i][jj] += ex.dot(ey) / (4.0 * area);
                }
            }
        }
        for i in 0..interior.len() {
            for jj in 0..interior.len() {
                assert!((j.get(i, jj) - k[i][jj]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let m = square_mesh(0.25);
        let metric = ConformalMetric::custom("1 + 0.3*x*y").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in [
            ProblemKind::Minimal,
            ProblemKind::Cmc { h0: 0.7 },
            ProblemKind::Translator { c: 1.3 },
        ] {
            let u: Vec<f64> = m.vertices.iter().map(|p| (2.0 * p.x).sin() + p.y * p.y + rng.random::<f64>() * 0.1).collect();
            let j = assemble_jacobian(&m, &metric, &u, kind).unwrap();
            let (map, interior) = dof_map(&m);
            let step = 1e-6;
            let mut worst = 0.0f64;
            for (col, &v) in interior.iter().enumerate() {
                let mut up = u.clone();
                let mut dn = u.clone();
                up[v] += step;
                dn[v] -= step;
                let rp = assemble_residual(&m, &metric, &up, kind).unwrap();
                let rm = assemble_residual(&m, &metric, &dn, kind).unwrap();
                for row in 0..interior.len() {
                    let fd = (rp[row] - rm[row]) / (2.0 * step);
                    worst = worst.max((fd - j.get(row, col)).abs());
                }
                assert_eq!(map[v], Some(col));
            }
            assert!(worst / j.max_abs() < 1e-6, "{kind:?} {worst}");
            if !matches!(kind, ProblemKind::Translator { .. }) {
                assert!(j.asymmetry() < 1e-13 * j.max_abs());
            }
        }
    }

    #[test]
    fn non_finite_values_are_reported() {
        let m = square_mesh(0.5);
        let mut u = vec![0.0; m.vertices.len()];
        u[2] = f64::NAN;
        assert!(matches!(
            assemble_residual(&m, &ConformalMetric::euclidean(), &u, ProblemKind::Minimal),
            Err(SolverError::NonFinite { node: 2 })
        ));
    }
}
