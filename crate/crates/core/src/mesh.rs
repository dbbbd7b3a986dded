//! Boundary-graded meshes on (0,1) and the radial unit disk, grid
//! functions, the boundary distance field and the discrete r-Laplacian.

use crate::error::SolverError;
use crate::scalar::Real;
use std::sync::Arc;

/// Domain geometry of a 1D computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// The unit interval (0, 1) with Dirichlet boundary at both ends.
    Interval,
    /// The unit disk in `R^dim` reduced to the radial coordinate; the only
    /// Dirichlet boundary is the outer radius 1, the origin is closed by
    /// radial symmetry (`u'(0) = 0`).
    RadialDisk { dim: u32 },
}

impl Geometry {
    /// Diameter of the underlying domain.
    pub fn diameter<T: Real>(self) -> T {
        match self {
            Geometry::Interval => T::one(),
            Geometry::RadialDisk { .. } => T::two(),
        }
    }
}

/// Node coordinates of a graded mesh, before validation.
///
/// Interval: the uniform grid is mapped through `ξ ↦ ½(2ξ)^s` on `[0, ½]`
/// and mirrored, clustering nodes at both endpoints. Radial disk:
/// `r_i = 1 − (1 − ξ_i)^s`, clustering at the outer boundary only.
pub fn node_positions<T: Real>(geometry: Geometry, n: usize, s: T) -> Vec<T> {
    let last = T::from_usize(n - 1).unwrap();
    (0..n)
        .map(|i| {
            let xi = T::from_usize(i).unwrap() / last;
            match geometry {
                Geometry::Interval => {
                    if xi <= T::half() {
                        T::half() * (T::two() * xi).powf(s)
                    } else {
                        T::one() - T::half() * (T::two() * (T::one() - xi)).powf(s)
                    }
                }
                Geometry::RadialDisk { .. } => T::one() - (T::one() - xi).powf(s),
            }
        })
        .collect()
}

/// Boundary-graded mesh on `[0, 1]` (interval coordinate or disk radius).
#[derive(Debug, Clone)]
pub struct GradedMesh1D<T> {
    geometry: Geometry,
    grading: T,
    nodes: Vec<T>,
}

impl<T: Real> GradedMesh1D<T> {
    /// Builds a mesh with `n ≥ 16` nodes and grading power `s ≥ 1`.
    pub fn build(geometry: Geometry, n: usize, s: T) -> Result<Arc<Self>, SolverError> {
        if n < 16 {
            return Err(SolverError::InvalidInput(format!(
                "mesh needs at least 16 nodes, got {n}"
            )));
        }
        if s < T::one() {
            return Err(SolverError::InvalidInput(format!(
                "grading power must be >= 1, got {s}"
            )));
        }
        if let Geometry::RadialDisk { dim } = geometry {
            if dim < 2 {
                return Err(SolverError::InvalidInput(format!(
                    "radial disk dimension must be >= 2, got {dim}"
                )));
            }
        }
        let nodes = node_positions(geometry, n, s);
        Ok(Arc::new(Self {
            geometry,
            grading: s,
            nodes,
        }))
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn grading(&self) -> T {
        self.grading
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> T {
        self.nodes[i]
    }

    /// Diameter of the underlying domain (1 for the interval, 2 for disks).
    pub fn diameter(&self) -> T {
        self.geometry.diameter()
    }

    /// Whether node `i` carries a Dirichlet boundary condition.
    pub fn is_boundary(&self, i: usize) -> bool {
        match self.geometry {
            Geometry::Interval => i == 0 || i == self.nodes.len() - 1,
            Geometry::RadialDisk { .. } => i == self.nodes.len() - 1,
        }
    }

    /// Distance from node `i` to the Dirichlet boundary.
    pub fn distance(&self, i: usize) -> T {
        let x = self.nodes[i];
        match self.geometry {
            Geometry::Interval => x.min(T::one() - x),
            Geometry::RadialDisk { .. } => T::one() - x,
        }
    }

    /// Indices of non-boundary nodes (includes the disk origin).
    pub fn interior_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| !self.is_boundary(i))
    }

    /// `ρ^{N-1}` flux weight at the midpoint of cell face `(i, i+1)`.
    fn face_weight(&self, i: usize) -> T {
        match self.geometry {
            Geometry::Interval => T::one(),
            Geometry::RadialDisk { dim } => {
                let rho = (self.nodes[i] + self.nodes[i + 1]) * T::half();
                rho.powi(dim as i32 - 1)
            }
        }
    }

    /// Measure of the dual cell around node `i` (with the radial weight).
    fn cell_measure(&self, i: usize) -> T {
        match self.geometry {
            Geometry::Interval => {
                let left = if i == 0 { self.nodes[0] } else { self.nodes[i - 1] };
                let right = if i == self.nodes.len() - 1 {
                    self.nodes[i]
                } else {
                    self.nodes[i + 1]
                };
                (right - left) * T::half()
            }
            Geometry::RadialDisk { dim } => {
                let n = T::from_u32(dim).unwrap();
                let lo = if i == 0 {
                    T::zero()
                } else {
                    (self.nodes[i - 1] + self.nodes[i]) * T::half()
                };
                let hi = if i == self.nodes.len() - 1 {
                    self.nodes[i]
                } else {
                    (self.nodes[i] + self.nodes[i + 1]) * T::half()
                };
                // ∫ ρ^{N-1} dρ over the dual cell
                (hi.powi(dim as i32) - lo.powi(dim as i32)) / n
            }
        }
    }
}

/// Values attached to the nodes of a shared mesh.
#[derive(Debug, Clone)]
pub struct GridFunction<T> {
    mesh: Arc<GradedMesh1D<T>>,
    values: Vec<T>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(mesh: Arc<GradedMesh1D<T>>, values: Vec<T>) -> Self {
        assert_eq!(mesh.len(), values.len(), "value count must match node count");
        Self { mesh, values }
    }

    pub fn zeros(mesh: Arc<GradedMesh1D<T>>) -> Self {
        let values = vec![T::zero(); mesh.len()];
        Self { mesh, values }
    }

    /// Samples `f` at every node.
    pub fn from_fn(mesh: Arc<GradedMesh1D<T>>, f: impl Fn(T) -> T) -> Self {
        let values = mesh.nodes().iter().map(|&x| f(x)).collect();
        Self { mesh, values }
    }

    /// Samples `f(d)` at interior nodes and puts zero on the boundary.
    pub fn from_distance_fn(mesh: Arc<GradedMesh1D<T>>, f: impl Fn(T) -> T) -> Self {
        let values = (0..mesh.len())
            .map(|i| {
                if mesh.is_boundary(i) {
                    T::zero()
                } else {
                    f(mesh.distance(i))
                }
            })
            .collect();
        Self { mesh, values }
    }

    pub fn mesh(&self) -> &Arc<GradedMesh1D<T>> {
        &self.mesh
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn get(&self, i: usize) -> T {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            mesh: Arc::clone(&self.mesh),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| c * v)
    }

    /// Supremum norm over all nodes.
    pub fn sup_norm(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// Supremum of `|self - other|` over all nodes.
    pub fn sup_distance(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }
}

/// The boundary distance `d(x)` as a grid function (zero on the boundary).
pub fn distance_fn<T: Real>(mesh: &Arc<GradedMesh1D<T>>) -> GridFunction<T> {
    let values = (0..mesh.len()).map(|i| mesh.distance(i)).collect();
    GridFunction::new(Arc::clone(mesh), values)
}

/// Discrete residual of `−Δ_r u − rhs` with gradient regularization.
///
/// Interior node `i` receives the finite-volume flux difference
/// `−[w·s]_{i-1/2}^{i+1/2} / measure_i − rhs_i` where `s` is the one-sided
/// slope and `w = (s² + ε²)^{(r−2)/2}`; radial geometries weight the fluxes
/// by `ρ^{N−1}`. Boundary entries are zero. The disk origin uses the
/// symmetric closure (zero flux through `ρ = 0`).
pub fn r_laplacian_residual<T: Real>(
    u: &GridFunction<T>,
    r: T,
    rhs: &GridFunction<T>,
    eps_grad: T,
) -> GridFunction<T> {
    let mesh = u.mesh();
    let n = mesh.len();
    let mut out = vec![T::zero(); n];
    let flux = |i: usize| -> T {
        let h = mesh.node(i + 1) - mesh.node(i);
        let slope = (u.get(i + 1) - u.get(i)) / h;
        let w = (slope * slope + eps_grad * eps_grad).powf((r - T::two()) * T::half());
        mesh.face_weight(i) * w * slope
    };
    for i in 0..n {
        if mesh.is_boundary(i) {
            continue;
        }
        let outgoing = if i + 1 < n { flux(i) } else { T::zero() };
        let incoming = if i > 0 { flux(i - 1) } else { T::zero() };
        out[i] = -(outgoing - incoming) / mesh.cell_measure(i) - rhs.get(i);
    }
    GridFunction::new(Arc::clone(mesh), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_interval_positions() {
        let nodes = node_positions::<f64>(Geometry::Interval, 5, 1.0);
        assert_eq!(nodes, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn graded_interval_positions() {
        let nodes = node_positions::<f64>(Geometry::Interval, 5, 2.0);
        assert_eq!(nodes, vec![0.0, 0.125, 0.5, 0.875, 1.0]);
    }

    #[test]
    fn uniform_disk_positions() {
        let nodes = node_positions::<f64>(Geometry::RadialDisk { dim: 2 }, 5, 1.0);
        for (a, b) in nodes.iter().zip([0.0, 0.25, 0.5, 0.75, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn build_rejects_bad_parameters() {
        assert!(GradedMesh1D::<f64>::build(Geometry::Interval, 15, 2.0).is_err());
        assert!(GradedMesh1D::<f64>::build(Geometry::Interval, 33, 0.5).is_err());
        assert!(GradedMesh1D::<f64>::build(Geometry::RadialDisk { dim: 1 }, 33, 2.0).is_err());
        assert!(GradedMesh1D::<f64>::build(Geometry::Interval, 33, 2.0).is_ok());
    }

    #[test]
    fn distance_values() {
        let mesh = GradedMesh1D::<f64>::build(Geometry::Interval, 17, 1.0).unwrap();
        let d = distance_fn(&mesh);
        for i in 0..mesh.len() {
            let x = mesh.node(i);
            assert!((d.get(i) - x.min(1.0 - x)).abs() < 1e-15);
            if mesh.is_boundary(i) {
                assert_eq!(d.get(i), 0.0);
            } else {
                assert!(d.get(i) > 0.0);
            }
        }
        let disk = GradedMesh1D::<f64>::build(Geometry::RadialDisk { dim: 2 }, 17, 1.0).unwrap();
        let dd = distance_fn(&disk);
        for i in 0..disk.len() {
            assert!((dd.get(i) - (1.0 - disk.node(i))).abs() < 1e-15);
        }
        // origin is interior on the disk
        assert!(!disk.is_boundary(0));
        assert_eq!(dd.get(0), 1.0);
    }

    #[test]
    fn distance_is_lipschitz_across_nodes() {
        let mesh = GradedMesh1D::<f64>::build(Geometry::Interval, 65, 3.0).unwrap();
        let d = distance_fn(&mesh);
        for i in 0..mesh.len() - 1 {
            let dd = (d.get(i + 1) - d.get(i)).abs();
            let dx = mesh.node(i + 1) - mesh.node(i);
            assert!(dd <= dx + 1e-15);
        }
    }

    fn max_residual(geometry: Geometry, n: usize, u: impl Fn(f64) -> f64, rhs: impl Fn(f64) -> f64, r: f64) -> f64 {
        let mesh = GradedMesh1D::<f64>::build(geometry, n, 1.0).unwrap();
        let uf = GridFunction::from_fn(Arc::clone(&mesh), u);
        let rf = GridFunction::from_fn(Arc::clone(&mesh), rhs);
        r_laplacian_residual(&uf, r, &rf, 0.0).sup_norm()
    }

    #[test]
    fn residual_of_quadratic_poisson_solution() {
        let err = max_residual(Geometry::Interval, 257, |x| 0.5 * x * (1.0 - x), |_| 1.0, 2.0);
        assert!(err <= 1e-3, "residual {err}");
    }

    #[test]
    fn residual_of_zero_is_zero() {
        let err = max_residual(Geometry::Interval, 33, |_| 0.0, |_| 0.0, 3.0);
        assert_eq!(err, 0.0);
    }

    #[test]
    fn residual_of_eigenfunction() {
        let pi = std::f64::consts::PI;
        let err = max_residual(
            Geometry::Interval,
            513,
            move |x| (pi * x).sin(),
            move |x| pi * pi * (pi * x).sin(),
            2.0,
        );
        assert!(err <= 1e-3, "residual {err}");
    }

    #[test]
    fn residual_on_disk_for_radial_poisson() {
        // -Δu = 1 on the unit disk (N = 2) has u = (1 - ρ²)/4.
        let err = max_residual(
            Geometry::RadialDisk { dim: 2 },
            257,
            |rho| 0.25 * (1.0 - rho * rho),
            |_| 1.0,
            2.0,
        );
        assert!(err <= 1e-3, "residual {err}");
    }

    #[test]
    fn residual_linear_in_u_at_r_two() {
        let mesh = GradedMesh1D::<f64>::build(Geometry::Interval, 33, 2.0).unwrap();
        let zero = GridFunction::zeros(Arc::clone(&mesh));
        let u = GridFunction::from_fn(Arc::clone(&mesh), |x| (3.1 * x).sin());
        let w = GridFunction::from_fn(Arc::clone(&mesh), |x| x * x * (1.0 - x));
        let (alpha, beta) = (1.7, -0.6);
        let combo = GridFunction::new(
            Arc::clone(&mesh),
            u.values()
                .iter()
                .zip(w.values())
                .map(|(&a, &b)| alpha * a + beta * b)
                .collect(),
        );
        let ru = r_laplacian_residual(&u, 2.0, &zero, 0.0);
        let rw = r_laplacian_residual(&w, 2.0, &zero, 0.0);
        let rc = r_laplacian_residual(&combo, 2.0, &zero, 0.0);
        for i in 0..mesh.len() {
            let expected = alpha * ru.get(i) + beta * rw.get(i);
            assert!((rc.get(i) - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn refinement_reduces_manufactured_residual() {
        let cases: [(fn(f64) -> f64, fn(f64) -> f64); 2] = [
            (|x| 0.5 * x * (1.0 - x), |_| 1.0),
            (
                |x| (std::f64::consts::PI * x).sin(),
                |x| std::f64::consts::PI.powi(2) * (std::f64::consts::PI * x).sin(),
            ),
        ];
        for (u, rhs) in cases {
            let coarse = max_residual(Geometry::Interval, 257, u, rhs, 2.0);
            let fine = max_residual(Geometry::Interval, 513, u, rhs, 2.0);
            if coarse > 1e-13 {
                assert!(
                    fine * 3.0 <= coarse,
                    "refinement factor too small: {coarse} -> {fine}"
                );
            }
        }
    }

    #[test]
    fn mesh_is_generic_over_scalar() {
        let mesh = GradedMesh1D::<f32>::build(Geometry::Interval, 17, 2.0).unwrap();
        assert_eq!(mesh.len(), 17);
        assert!((mesh.node(16) - 1.0).abs() < 1e-6);
    }
}
