//! Conforming triangular meshes of planar polygonal domains.
//!
//! A [`Mesh`] owns its node coordinates and counterclockwise triangles and
//! derives the boundary from edge adjacency, so every constructed value
//! satisfies the conformity invariants. Meshes are immutable once built.
//!
//! The text format written by [`Mesh::save`] is
//!
//! ```text
//! nodes <N>
//! x y            (N lines)
//! triangles <T>
//! i j k          (T lines, 0-based)
//! boundary_edges <B>
//! i j            (B lines)
//! ```
//!
//! Clockwise triangles in input files are reoriented on load; degenerate
//! triangles are rejected.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<[usize; 2]>,
    boundary_nodes: Vec<usize>,
    is_boundary: Vec<bool>,
}

impl Mesh {
    /// Builds a mesh from nodes and triangles, reorienting clockwise
    /// triangles and deriving the boundary edges.
    pub fn new(nodes: Vec<[f64; 2]>, mut triangles: Vec<[usize; 3]>) -> Result<Self> {
        if nodes.is_empty() || triangles.is_empty() {
            return Err(Error::InvalidMesh("mesh needs at least one triangle".into()));
        }
        if let Some(p) = nodes.iter().find(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidMesh(format!("non-finite node coordinate {p:?}")));
        }
        for (t, tri) in triangles.iter_mut().enumerate() {
            if let Some(&i) = tri.iter().find(|&&i| i >= nodes.len()) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} references node {i} but mesh has {} nodes",
                    nodes.len()
                )));
            }
            let area = signed_area(&nodes, tri);
            if area == 0.0 || !area.is_finite() {
                return Err(Error::InvalidMesh(format!("triangle {t} is degenerate")));
            }
            if area < 0.0 {
                tri.swap(1, 2);
            }
        }
        let boundary_edges = find_boundary_edges(&triangles)?;
        let mut is_boundary = vec![false; nodes.len()];
        for e in &boundary_edges {
            is_boundary[e[0]] = true;
            is_boundary[e[1]] = true;
        }
        let boundary_nodes = (0..nodes.len()).filter(|&i| is_boundary[i]).collect();
        Ok(Mesh {
            nodes,
            triangles,
            boundary_edges,
            boundary_nodes,
            is_boundary,
        })
    }

    /// Structured mesh of (-1, 1)^2 with `n` cells per side, each cell split
    /// along its lower-left to upper-right diagonal.
    pub fn square(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "square mesh needs at least one subdivision per side".into(),
            ));
        }
        let stride = n + 1;
        let h = 2.0 / n as f64;
        let mut nodes = Vec::with_capacity(stride * stride);
        for j in 0..=n {
            for i in 0..=n {
                nodes.push([-1.0 + h * i as f64, -1.0 + h * j as f64]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let a = j * stride + i;
                let b = a + 1;
                let c = a + stride + 1;
                let d = a + stride;
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        Mesh::new(nodes, triangles)
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Boundary edges, oriented so the domain lies to their left.
    pub fn boundary_edges(&self) -> &[[usize; 2]] {
        &self.boundary_edges
    }

    /// Sorted indices of nodes on the boundary.
    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary_nodes
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.is_boundary[node]
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| !self.is_boundary[i])
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        signed_area(&self.nodes, &self.triangles[t])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Gradients of the three barycentric basis functions on triangle `t`.
    pub fn basis_gradients(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t].map(|i| self.nodes[i]);
        let two_area = 2.0 * self.triangle_area(t);
        [
            [(b[1] - c[1]) / two_area, (c[0] - b[0]) / two_area],
            [(c[1] - a[1]) / two_area, (a[0] - c[0]) / two_area],
            [(a[1] - b[1]) / two_area, (b[0] - a[0]) / two_area],
        ]
    }

    /// Barycentric coordinates of `p` with respect to triangle `t`.
    pub fn barycentric(&self, t: usize, p: [f64; 2]) -> [f64; 3] {
        let [a, b, c] = self.triangles[t].map(|i| self.nodes[i]);
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det;
        let l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
        [1.0 - l1 - l2, l1, l2]
    }

    /// Node-to-node adjacency (including the node itself), sorted per row.
    pub fn node_neighbors(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![BTreeSet::new(); self.nodes.len()];
        for tri in &self.triangles {
            for &i in tri {
                for &j in tri {
                    sets[i].insert(j);
                }
            }
        }
        sets.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        w.write_all(self.to_text().as_bytes())
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "nodes {}", self.nodes.len()).unwrap();
        for p in &self.nodes {
            writeln!(s, "{:?} {:?}", p[0], p[1]).unwrap();
        }
        writeln!(s, "triangles {}", self.triangles.len()).unwrap();
        for t in &self.triangles {
            writeln!(s, "{} {} {}", t[0], t[1], t[2]).unwrap();
        }
        writeln!(s, "boundary_edges {}", self.boundary_edges.len()).unwrap();
        for e in &self.boundary_edges {
            writeln!(s, "{} {}", e[0], e[1]).unwrap();
        }
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(file), path)
    }

    /// Parses the mesh text format; `origin` is only used in error messages.
    pub fn read(reader: impl BufRead, origin: impl AsRef<Path>) -> Result<Self> {
        let origin = origin.as_ref();
        let mut lines = Vec::new();
        for (k, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(origin, e))?;
            if !line.trim().is_empty() {
                lines.push((k + 1, line));
            }
        }
        let mut cursor = LineCursor {
            lines: &lines,
            pos: 0,
            origin,
        };

        let n_nodes = cursor.header("nodes")?;
        let mut nodes = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            let (line, fields) = cursor.record::<f64>(2, "node")?;
            if !fields.iter().all(|v| v.is_finite()) {
                return Err(Error::malformed(origin, line, "non-finite coordinate"));
            }
            nodes.push([fields[0], fields[1]]);
        }

        let n_tris = cursor.header("triangles")?;
        let mut triangles = Vec::with_capacity(n_tris);
        for _ in 0..n_tris {
            let (line, f) = cursor.record::<usize>(3, "triangle")?;
            if let Some(&bad) = f.iter().find(|&&i| i >= n_nodes) {
                return Err(Error::malformed(
                    origin,
                    line,
                    format!("triangle node index {bad} out of range for {n_nodes} nodes"),
                ));
            }
            let tri = [f[0], f[1], f[2]];
            if signed_area(&nodes, &tri) == 0.0 {
                return Err(Error::malformed(origin, line, "degenerate triangle"));
            }
            triangles.push(tri);
        }

        let n_edges = cursor.header("boundary_edges")?;
        let mut listed = BTreeSet::new();
        for _ in 0..n_edges {
            let (line, f) = cursor.record::<usize>(2, "boundary edge")?;
            if let Some(&bad) = f.iter().find(|&&i| i >= n_nodes) {
                return Err(Error::malformed(
                    origin,
                    line,
                    format!("boundary edge node index {bad} out of range for {n_nodes} nodes"),
                ));
            }
            listed.insert((f[0].min(f[1]), f[0].max(f[1])));
        }
        if let Some((line, _)) = cursor.lines.get(cursor.pos) {
            return Err(Error::malformed(origin, *line, "unexpected trailing content"));
        }

        let mesh = Mesh::new(nodes, triangles).map_err(|e| match e {
            Error::InvalidMesh(msg) => Error::malformed(origin, 0, msg),
            other => other,
        })?;
        let derived: BTreeSet<_> = mesh
            .boundary_edges
            .iter()
            .map(|e| (e[0].min(e[1]), e[0].max(e[1])))
            .collect();
        if derived != listed {
            let last_line = lines.last().map_or(0, |l| l.0);
            return Err(Error::malformed(
                origin,
                last_line,
                "boundary_edges do not match the edges bounding a single triangle",
            ));
        }
        Ok(mesh)
    }
}

struct LineCursor<'a> {
    lines: &'a [(usize, String)],
    pos: usize,
    origin: &'a Path,
}

impl LineCursor<'_> {
    fn next(&mut self, expecting: &str) -> Result<&(usize, String)> {
        let last = self.lines.last().map_or(0, |l| l.0);
        let item = self.lines.get(self.pos).ok_or_else(|| {
            Error::malformed(self.origin, last + 1, format!("unexpected end of file, expected {expecting}"))
        })?;
        self.pos += 1;
        Ok(item)
    }

    fn header(&mut self, keyword: &str) -> Result<usize> {
        let origin = self.origin;
        let (line, text) = self.next(keyword)?;
        let mut parts = text.split_whitespace();
        match (parts.next(), parts.next().map(str::parse::<usize>), parts.next()) {
            (Some(k), Some(Ok(count)), None) if k == keyword => Ok(count),
            _ => Err(Error::malformed(
                origin,
                *line,
                format!("expected \"{keyword} <count>\", found {text:?}"),
            )),
        }
    }

    fn record<T: std::str::FromStr>(&mut self, arity: usize, what: &str) -> Result<(usize, Vec<T>)> {
        let origin = self.origin;
        let (line, text) = self.next(what)?;
        let values: Option<Vec<T>> = text.split_whitespace().map(|s| s.parse().ok()).collect();
        match values {
            Some(v) if v.len() == arity => Ok((*line, v)),
            _ => Err(Error::malformed(
                origin,
                *line,
                format!("expected {arity} values for {what}, found {text:?}"),
            )),
        }
    }
}

fn signed_area(nodes: &[[f64; 2]], tri: &[usize; 3]) -> f64 {
    let [a, b, c] = tri.map(|i| nodes[i]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn find_boundary_edges(triangles: &[[usize; 3]]) -> Result<Vec<[usize; 2]>> {
    // key: sorted edge, value: (use count, oriented edge, first-seen order)
    let mut edges: HashMap<(usize, usize), (u8, [usize; 2], usize)> = HashMap::new();
    let mut order = 0;
    for tri in triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let entry = edges.entry((a.min(b), a.max(b))).or_insert_with(|| {
                order += 1;
                (0, [a, b], order)
            });
            entry.0 += 1;
            if entry.0 > 2 {
                return Err(Error::InvalidMesh(format!(
                    "edge ({a}, {b}) is shared by more than two triangles"
                )));
            }
        }
    }
    let mut boundary: Vec<_> = edges
        .into_values()
        .filter(|(count, _, _)| *count == 1)
        .map(|(_, e, ord)| (ord, e))
        .collect();
    boundary.sort_unstable_by_key(|(ord, _)| *ord);
    Ok(boundary.into_iter().map(|(_, e)| e).collect())
}
