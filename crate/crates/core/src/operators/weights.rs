use crate::mesh::Mesh;

/// Weighted volumes and the edge factors derived from them.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSet {
    /// `Omega^sigma_i`.
    pub volumes: Vec<f64>,
    /// `sigma-bar_i = Omega^sigma_i / Omega_i`.
    pub mean: Vec<f64>,
    /// `rho-hat_ij = (sigma-bar_i + sigma-bar_j) / 2`.
    pub rho: Vec<f64>,
    /// `sigma_ij = (rho-hat_ij / 2)(1/sigma-bar_i + 1/sigma-bar_j)`.
    pub sigma: Vec<f64>,
}

impl WeightSet {
    /// Plain areas: every mean weight, `rho-hat` and `sigma` is exactly one.
    pub fn uniform(mesh: &Mesh) -> Self {
        WeightSet {
            volumes: mesh.areas.clone(),
            mean: vec![1.0; mesh.n_cells()],
            rho: vec![1.0; mesh.n_edges()],
            sigma: vec![1.0; mesh.n_edges()],
        }
    }

    pub fn from_volumes(mesh: &Mesh, volumes: Vec<f64>) -> Self {
        let mean: Vec<f64> = volumes.iter().zip(&mesh.areas).map(|(w, a)| w / a).collect();
        let (rho, sigma) = mesh
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (mean[e.cells[0]], mean[e.cells[1]]);
                let r = 0.5 * (a + b);
                (r, 0.5 * r * (1.0 / a + 1.0 / b))
            })
            .unzip();
        WeightSet { volumes, mean, rho, sigma }
    }
}
