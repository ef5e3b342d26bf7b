//! P1 finite elements on triangles: nodal fields, sparse assembly,
//! Dirichlet elimination and a Jacobi-preconditioned conjugate gradient
//! solver.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::ops::{Index, IndexMut};
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Continuous piecewise-linear field given by its nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField(Vec<f64>);

impl NodalField {
    pub fn new(values: Vec<f64>) -> Self {
        NodalField(values)
    }

    pub fn zeros(len: usize) -> Self {
        NodalField(vec![0.0; len])
    }

    pub fn constant(mesh: &Mesh, value: f64) -> Self {
        NodalField(vec![value; mesh.num_nodes()])
    }

    pub fn from_fn(mesh: &Mesh, f: impl Fn([f64; 2]) -> f64) -> Self {
        NodalField(mesh.nodes().iter().map(|&p| f(p)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        NodalField(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &NodalField) -> Self {
        NodalField(self.0.iter().zip(&other.0).map(|(a, b)| a + factor * b).collect())
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn check_mesh(&self, mesh: &Mesh, what: &'static str) -> Result<()> {
        Error::check_len(what, mesh.num_nodes(), self.len())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("node,value\n");
        for (i, v) in self.0.iter().enumerate() {
            writeln!(s, "{i},{v:?}").unwrap();
        }
        s
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::File::create(path)
            .and_then(|mut f| f.write_all(self.to_csv().as_bytes()))
            .map_err(|e| Error::io(path, e))
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(BufReader::new(file), path)
    }

    pub fn read_csv(reader: impl BufRead, origin: impl AsRef<Path>) -> Result<Self> {
        let origin = origin.as_ref();
        let mut values = Vec::new();
        for (k, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(origin, e))?;
            let line = line.trim();
            if k == 0 {
                if line != "node,value" {
                    return Err(Error::malformed(origin, 1, "expected header \"node,value\""));
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let parsed = line
                .split_once(',')
                .and_then(|(i, v)| Some((i.trim().parse::<usize>().ok()?, v.trim().parse::<f64>().ok()?)));
            match parsed {
                Some((i, v)) if i == values.len() => values.push(v),
                Some((i, _)) => {
                    return Err(Error::malformed(
                        origin,
                        k + 1,
                        format!("node index {i} out of order, expected {}", values.len()),
                    ))
                }
                None => return Err(Error::malformed(origin, k + 1, format!("cannot parse {line:?}"))),
            }
        }
        Ok(NodalField(values))
    }
}

impl Index<usize> for NodalField {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for NodalField {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl From<Vec<f64>> for NodalField {
    fn from(v: Vec<f64>) -> Self {
        NodalField(v)
    }
}

/// Square sparse matrix in compressed-row layout with sorted columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Zero matrix on the node adjacency pattern of `mesh`.
    pub fn mesh_pattern(mesh: &Mesh) -> Self {
        let neighbors = mesh.node_neighbors();
        let mut row_ptr = Vec::with_capacity(neighbors.len() + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for row in neighbors {
            col_idx.extend(row);
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        SparseMatrix {
            dim: mesh.num_nodes(),
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        }
    }

    pub fn identity(dim: usize) -> Self {
        SparseMatrix {
            dim,
            row_ptr: (0..=dim).collect(),
            col_idx: (0..dim).collect(),
            values: vec![1.0; dim],
        }
    }

    /// Builds a matrix from a dense row-major array, dropping exact zeros
    /// off the diagonal.
    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "dense matrix must be square");
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 || i == j {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix {
            dim,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[lo..hi].binary_search(&j).ok().map(|k| lo + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |k| self.values[k])
    }

    /// Adds `v` to entry (i, j), which must be in the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .position(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) not in sparsity pattern"));
        self.values[k] += v;
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[lo..hi].iter().copied().zip(self.values[lo..hi].iter().copied())
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn add_diagonal(&mut self, d: &[f64]) {
        for (i, &v) in d.iter().enumerate() {
            self.add(i, i, v);
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
            *yi = self.col_idx[lo..hi]
                .iter()
                .zip(&self.values[lo..hi])
                .map(|(&j, &a)| a * x[j])
                .sum();
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// max |A[i][j] - A[j][i]| over stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.dim]; self.dim];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }
}

fn check_field(mesh: &Mesh, field: &NodalField, what: &'static str) -> Result<()> {
    field.check_mesh(mesh, what)?;
    if field.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("{what} has non-finite values")));
    }
    Ok(())
}

/// K[i][j] = ∫ γ ∇φ_i·∇φ_j with γ piecewise linear.
pub fn assemble_stiffness(mesh: &Mesh, gamma: &NodalField) -> Result<SparseMatrix> {
    check_field(mesh, gamma, "stiffness coefficient")?;
    let mut k = SparseMatrix::mesh_pattern(mesh);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let grads = mesh.basis_gradients(t);
        let mean = tri.iter().map(|&i| gamma[i]).sum::<f64>() / 3.0;
        let scale = mean * mesh.triangle_area(t);
        for a in 0..3 {
            for b in 0..3 {
                let dot = grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1];
                k.add(tri[a], tri[b], scale * dot);
            }
        }
    }
    Ok(k)
}

/// M[i][j] = ∫ w φ_i φ_j with w piecewise linear, integrated exactly.
pub fn assemble_weighted_mass(mesh: &Mesh, weight: &NodalField) -> Result<SparseMatrix> {
    check_field(mesh, weight, "mass weight")?;
    let mut m = SparseMatrix::mesh_pattern(mesh);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.triangle_area(t);
        let w = tri.map(|i| weight[i]);
        let w_sum = w[0] + w[1] + w[2];
        for a in 0..3 {
            for b in 0..3 {
                // ∫ φ_a φ_b φ_c = 2|T| α! / (|α| + 2)! for the multi-index α
                let entry = if a == b {
                    area * (2.0 * w[a] + w_sum) / 30.0
                } else {
                    area * (w_sum + w[a] + w[b]) / 60.0
                };
                m.add(tri[a], tri[b], entry);
            }
        }
    }
    Ok(m)
}

/// Load vector `b_i = ∫ f φ_i` for a P1 interpolant `f`.
pub fn assemble_load(mesh: &Mesh, f: &NodalField) -> Result<Vec<f64>> {
    let mass = assemble_weighted_mass(mesh, &NodalField::constant(mesh, 1.0))?;
    check_field(mesh, f, "load density")?;
    Ok(mass.mul_vec(f.values()))
}

/// Row sums of the unweighted mass matrix: ∫ φ_i = (area of the patch) / 3.
pub fn lumped_mass(mesh: &Mesh) -> Vec<f64> {
    let mut m = vec![0.0; mesh.num_nodes()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let third = mesh.triangle_area(t) / 3.0;
        for &i in tri {
            m[i] += third;
        }
    }
    m
}

/// Imposes Dirichlet values by symmetric elimination.
///
/// Constrained rows and columns become identity rows and columns; their
/// former column contributions move into the right-hand side.
pub fn apply_dirichlet(
    mesh: &Mesh,
    a: &SparseMatrix,
    b: &[f64],
    boundary_values: &BTreeMap<usize, f64>,
) -> Result<(SparseMatrix, Vec<f64>)> {
    Error::check_len("matrix dimension", mesh.num_nodes(), a.dim())?;
    Error::check_len("load vector", a.dim(), b.len())?;
    let mut fixed = vec![None; a.dim()];
    for (&node, &value) in boundary_values {
        if node >= mesh.num_nodes() || !mesh.is_boundary(node) {
            return Err(Error::NotBoundaryNode(node));
        }
        fixed[node] = Some(value);
    }
    Ok(eliminate(a, b, &fixed))
}

pub(crate) fn eliminate(a: &SparseMatrix, b: &[f64], fixed: &[Option<f64>]) -> (SparseMatrix, Vec<f64>) {
    let mut out = a.clone();
    let mut rhs = b.to_vec();
    for i in 0..a.dim {
        let (lo, hi) = (a.row_ptr[i], a.row_ptr[i + 1]);
        if let Some(value) = fixed[i] {
            for k in lo..hi {
                out.values[k] = if a.col_idx[k] == i { 1.0 } else { 0.0 };
            }
            rhs[i] = value;
        } else {
            for k in lo..hi {
                if let Some(gj) = fixed[a.col_idx[k]] {
                    rhs[i] -= a.values[k] * gj;
                    out.values[k] = 0.0;
                }
            }
        }
    }
    (out, rhs)
}

/// Iteration cap and tolerance for [`solve_linear_with`].
#[derive(Debug, Clone, Copy)]
pub struct CgSettings {
    pub tol: f64,
    pub max_iterations: usize,
}

impl CgSettings {
    pub fn for_dim(dim: usize, tol: f64) -> Self {
        CgSettings {
            tol,
            max_iterations: (20 * dim).max(200),
        }
    }
}

/// Solves the SPD system `A x = b` to relative residual `tol`.
pub fn solve_linear(a: &SparseMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    solve_linear_with(a, b, None, CgSettings::for_dim(a.dim(), tol)).map(|(x, _)| x)
}

/// Jacobi-preconditioned conjugate gradients with an optional initial guess.
/// Returns the solution and the number of iterations used.
pub fn solve_linear_with(
    a: &SparseMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    settings: CgSettings,
) -> Result<(Vec<f64>, usize)> {
    let n = a.dim();
    Error::check_len("right-hand side", n, b.len())?;
    if !(settings.tol > 0.0) {
        return Err(Error::InvalidArgument("solver tolerance must be positive".into()));
    }
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((vec![0.0; n], 0));
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut x = match x0 {
        Some(x0) => {
            Error::check_len("initial guess", n, x0.len())?;
            x0.to_vec()
        }
        None => vec![0.0; n],
    };

    let mut ax = vec![0.0; n];
    let mut q = vec![0.0; n];
    let mut iterations = 0;
    // Recurrence residuals drift; restart from the true residual until it
    // also meets the tolerance.
    loop {
        a.mul_vec_into(&x, &mut ax);
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let true_residual = norm(&r) / b_norm;
        if true_residual <= settings.tol {
            return Ok((x, iterations));
        }
        if iterations >= settings.max_iterations {
            return Err(Error::LinearSolver {
                iterations,
                residual: true_residual,
            });
        }
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let start = iterations;
        while iterations < settings.max_iterations {
            a.mul_vec_into(&p, &mut q);
            let pq = dot(&p, &q);
            if !(pq > 0.0) {
                break;
            }
            let alpha = rz / pq;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            iterations += 1;
            if norm(&r) / b_norm <= 0.5 * settings.tol {
                break;
            }
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        if iterations == start {
            a.mul_vec_into(&x, &mut ax);
            let residual = norm(&b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect::<Vec<_>>()) / b_norm;
            return Err(Error::LinearSolver { iterations, residual });
        }
    }
}

/// Interpolates a P1 field from one mesh onto the nodes of another.
///
/// Target nodes must lie inside the source domain up to a small relative
/// tolerance; identical meshes reproduce the field exactly.
pub fn transfer_field(source: &Mesh, field: &NodalField, target: &Mesh) -> Result<NodalField> {
    field.check_mesh(source, "transferred field")?;
    let locator = PointLocator::new(source);
    let mut out = Vec::with_capacity(target.num_nodes());
    for (k, &p) in target.nodes().iter().enumerate() {
        let (t, bary) = locator
            .locate(p)
            .ok_or_else(|| Error::InvalidArgument(format!("target node {k} at {p:?} lies outside the source mesh")))?;
        let tri = source.triangles()[t];
        out.push((0..3).map(|a| bary[a] * field[tri[a]]).sum());
    }
    Ok(NodalField(out))
}

/// Uniform bucket grid over triangle bounding boxes.
struct PointLocator<'a> {
    mesh: &'a Mesh,
    origin: [f64; 2],
    cell: [f64; 2],
    dims: [usize; 2],
    buckets: Vec<Vec<usize>>,
}

impl<'a> PointLocator<'a> {
    fn new(mesh: &'a Mesh) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in mesh.nodes() {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let side = ((mesh.num_triangles() as f64).sqrt().ceil() as usize).max(1);
        let extent = [(hi[0] - lo[0]).max(f64::MIN_POSITIVE), (hi[1] - lo[1]).max(f64::MIN_POSITIVE)];
        let cell = [extent[0] / side as f64, extent[1] / side as f64];
        let tol = 1e-10 * extent[0].max(extent[1]);
        let mut locator = PointLocator {
            mesh,
            origin: lo,
            cell,
            dims: [side, side],
            buckets: vec![Vec::new(); side * side],
        };
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let pts = tri.map(|i| mesh.nodes()[i]);
            let bmin = [pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min), pts.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min)];
            let bmax = [pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max), pts.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max)];
            let (i0, j0) = locator.cell_of([bmin[0] - tol, bmin[1] - tol]);
            let (i1, j1) = locator.cell_of([bmax[0] + tol, bmax[1] + tol]);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    locator.buckets[j * side + i].push(t);
                }
            }
        }
        locator
    }

    fn cell_of(&self, p: [f64; 2]) -> (usize, usize) {
        let clamp = |v: f64, d: usize| -> usize {
            let k = ((v - self.origin[d]) / self.cell[d]).floor();
            (k.max(0.0) as usize).min(self.dims[d] - 1)
        };
        (clamp(p[0], 0), clamp(p[1], 1))
    }

    fn locate(&self, p: [f64; 2]) -> Option<(usize, [f64; 3])> {
        let (i, j) = self.cell_of(p);
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &t in &self.buckets[j * self.dims[0] + i] {
            let bary = self.mesh.barycentric(t, p);
            let worst = bary.iter().copied().fold(f64::INFINITY, f64::min);
            if best.as_ref().is_none_or(|b| worst > b.2) {
                best = Some((t, bary, worst));
            }
        }
        let (t, bary, worst) = best?;
        if worst < -1e-9 {
            return None;
        }
        // snap tiny negative weights from points on shared edges
        let clipped = bary.map(|b| b.max(0.0));
        let sum: f64 = clipped.iter().sum();
        Some((t, clipped.map(|b| b / sum)))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
