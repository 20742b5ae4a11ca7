//! Finite regions of `Z^d`: boxes `Λ_n = [−n, n]^d`, rectangles
//! `R(n, m) = [0, n] × [0, m]`, and planar duality.
//!
//! Vertices are numbered lexicographically by coordinates (first
//! coordinate most significant). Edges are numbered by their smaller
//! endpoint, then by axis; every configuration bit array uses this order.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::Configuration;
use crate::error::{Error, Result};

/// Largest edge count a region may allocate.
pub const MAX_REGION_EDGES: usize = 1 << 26;

/// Undirected graph with dense vertex and edge indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= num_vertices || v >= num_vertices || u == v) {
            return Err(Error::Input(format!("edge ({u}, {v}) is not a proper edge on {num_vertices} vertices")));
        }
        Ok(Self { num_vertices, edges })
    }

    /// The cycle on `k ≥ 3` vertices, edge `i` joining `i` and `i + 1 mod k`.
    pub fn cycle(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::Input(format!("a cycle needs at least 3 vertices, got {k}")));
        }
        Self::new(k, (0..k).map(|i| (i, (i + 1) % k)).collect())
    }

    /// The path with `k ≥ 1` edges.
    pub fn path(k: usize) -> Result<Self> {
        Self::new(k + 1, (0..k).map(|i| (i, i + 1)).collect())
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// Incident edge ids per vertex.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.num_vertices];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            inc[u].push(e);
            inc[v].push(e);
        }
        inc
    }
}

/// The box `Λ_n = [−n, n]^d ∩ Z^d` with its nearest-neighbour edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxRegion {
    d: usize,
    n: usize,
    side: usize,
    graph: Graph,
}

impl BoxRegion {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Input("dimension must be at least 1".into()));
        }
        let side = 2 * n + 1;
        let too_big = || Error::TooLarge { what: format!("box of radius {n} in dimension {d}"), cap: MAX_REGION_EDGES };
        let vertices = (0..d).try_fold(1usize, |acc, _| acc.checked_mul(side)).ok_or_else(too_big)?;
        if vertices.saturating_mul(d) > MAX_REGION_EDGES {
            return Err(too_big());
        }
        let strides: Vec<usize> = (0..d).map(|a| side.pow((d - 1 - a) as u32)).collect();
        let mut edges = Vec::with_capacity(d * vertices);
        for v in 0..vertices {
            for &stride in &strides {
                if v / stride % side + 1 < side {
                    edges.push((v, v + stride));
                }
            }
        }
        Ok(Self { d, n, side, graph: Graph { num_vertices: vertices, edges } })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn radius(&self) -> usize {
        self.n
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    /// Coordinates of vertex `v`, each in `[−n, n]`.
    pub fn coords(&self, v: usize) -> Vec<i64> {
        let mut out = vec![0i64; self.d];
        let mut rest = v;
        for a in (0..self.d).rev() {
            out[a] = (rest % self.side) as i64 - self.n as i64;
            rest /= self.side;
        }
        out
    }

    pub fn index(&self, coords: &[i64]) -> Option<usize> {
        if coords.len() != self.d {
            return None;
        }
        coords.iter().try_fold(0usize, |acc, &x| {
            let shifted = x + self.n as i64;
            (0..self.side as i64).contains(&shifted).then(|| acc * self.side + shifted as usize)
        })
    }

    pub fn origin(&self) -> usize {
        self.index(&vec![0; self.d]).expect("origin lies in every box")
    }

    /// `max_j |x_j|`.
    pub fn sup_norm(&self, v: usize) -> usize {
        self.coords(v).iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Whether `v ∈ ∂Λ_k = Λ_k \ Λ_{k−1}`.
    pub fn on_boundary(&self, v: usize, k: usize) -> bool {
        self.sup_norm(v) == k
    }

    pub fn boundary(&self, k: usize) -> Vec<usize> {
        (0..self.graph.num_vertices).filter(|&v| self.on_boundary(v, k)).collect()
    }

    fn planar_coords(&self) -> Result<Vec<(i64, i64)>> {
        if self.d != 2 {
            return Err(Error::Unsupported(format!("planar duality in dimension {}", self.d)));
        }
        Ok((0..self.graph.num_vertices).map(|v| {
            let c = self.coords(v);
            (c[0], c[1])
        }).collect())
    }

    pub fn describe(&self) -> RegionDescription {
        RegionDescription {
            kind: "box".into(),
            vertices: (0..self.graph.num_vertices).map(|v| self.coords(v)).collect(),
            edges: self.graph.edges.clone(),
            sides: BTreeMap::from([("boundary".to_string(), self.boundary(self.n))]),
        }
    }
}

/// The rectangle `R(n, m) = [0, n] × [0, m]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectangleRegion {
    width: usize,
    height: usize,
    graph: Graph,
}

impl RectangleRegion {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Input(format!("rectangle R({width}, {height}) needs positive sides")));
        }
        let rows = height + 1;
        let vertices = (width + 1) * rows;
        if 2 * vertices > MAX_REGION_EDGES {
            return Err(Error::TooLarge { what: format!("rectangle R({width}, {height})"), cap: MAX_REGION_EDGES });
        }
        let mut edges = Vec::with_capacity(2 * vertices);
        for x in 0..=width {
            for y in 0..=height {
                let v = x * rows + y;
                if x < width {
                    edges.push((v, v + rows));
                }
                if y < height {
                    edges.push((v, v + 1));
                }
            }
        }
        Ok(Self { width, height, graph: Graph { num_vertices: vertices, edges } })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    pub fn vertex(&self, x: usize, y: usize) -> usize {
        assert!(x <= self.width && y <= self.height, "({x}, {y}) outside R({}, {})", self.width, self.height);
        x * (self.height + 1) + y
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v / (self.height + 1), v % (self.height + 1))
    }

    /// Edge id joining two adjacent vertices.
    pub fn edge_between(&self, a: (usize, usize), b: (usize, usize)) -> Option<usize> {
        let (u, v) = (self.vertex(a.0, a.1), self.vertex(b.0, b.1));
        let key = (u.min(v), u.max(v));
        self.graph.edges.iter().position(|&e| e == key)
    }

    /// `{0} × [0, m]`
    pub fn left(&self) -> Vec<usize> {
        (0..=self.height).map(|y| self.vertex(0, y)).collect()
    }

    /// `{n} × [0, m]`
    pub fn right(&self) -> Vec<usize> {
        (0..=self.height).map(|y| self.vertex(self.width, y)).collect()
    }

    /// `[0, n] × {0}`
    pub fn bottom(&self) -> Vec<usize> {
        (0..=self.width).map(|x| self.vertex(x, 0)).collect()
    }

    /// `[0, n] × {m}`
    pub fn top(&self) -> Vec<usize> {
        (0..=self.width).map(|x| self.vertex(x, self.height)).collect()
    }

    fn planar_coords(&self) -> Vec<(i64, i64)> {
        (0..self.graph.num_vertices).map(|v| {
            let (x, y) = self.coords(v);
            (x as i64, y as i64)
        }).collect()
    }

    pub fn describe(&self) -> RegionDescription {
        RegionDescription {
            kind: "rectangle".into(),
            vertices: (0..self.graph.num_vertices).map(|v| {
                let (x, y) = self.coords(v);
                vec![x as i64, y as i64]
            }).collect(),
            edges: self.graph.edges.clone(),
            sides: BTreeMap::from([
                ("left".to_string(), self.left()),
                ("right".to_string(), self.right()),
                ("bottom".to_string(), self.bottom()),
                ("top".to_string(), self.top()),
            ]),
        }
    }
}

/// JSON dump of a region for golden-file inspection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionDescription {
    pub kind: String,
    pub vertices: Vec<Vec<i64>>,
    pub edges: Vec<(usize, usize)>,
    pub sides: BTreeMap<String, Vec<usize>>,
}

/// The dual graph of a planar region: dual edge `i` crosses primal edge
/// `i` at its midpoint.
///
/// Dual vertices sit at `(a + ½, b + ½)` and are stored as `(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualMap {
    vertices: Vec<(i64, i64)>,
    graph: Graph,
}

impl DualMap {
    pub fn for_rectangle(rect: &RectangleRegion) -> Self {
        Self::build(&rect.planar_coords(), rect.graph())
    }

    pub fn for_box(region: &BoxRegion) -> Result<Self> {
        Ok(Self::build(&region.planar_coords()?, region.graph()))
    }

    fn build(coords: &[(i64, i64)], graph: &Graph) -> Self {
        let ends: Vec<((i64, i64), (i64, i64))> = graph
            .edges()
            .iter()
            .map(|&(u, v)| {
                let ((x0, y0), (x1, y1)) = (coords[u].min(coords[v]), coords[u].max(coords[v]));
                if y0 == y1 {
                    // horizontal primal edge, vertical dual edge
                    ((x0, y0 - 1), (x0, y0))
                } else {
                    debug_assert_eq!(x0, x1);
                    ((x0 - 1, y0), (x0, y0))
                }
            })
            .collect();
        let mut vertices: Vec<(i64, i64)> = ends.iter().flat_map(|&(a, b)| [a, b]).collect();
        vertices.sort_unstable();
        vertices.dedup();
        let index = |c: (i64, i64)| vertices.binary_search(&c).expect("dual endpoint registered");
        let edges = ends.iter().map(|&(a, b)| (index(a), index(b))).collect();
        let graph = Graph { num_vertices: vertices.len(), edges };
        Self { vertices, graph }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Dual vertex `v` as `(a, b)`, meaning the point `(a + ½, b + ½)`.
    pub fn vertex(&self, v: usize) -> (i64, i64) {
        self.vertices[v]
    }

    /// Dual vertices with the largest second coordinate.
    pub fn top(&self) -> Vec<usize> {
        let max = self.vertices.iter().map(|c| c.1).max().unwrap_or(0);
        (0..self.vertices.len()).filter(|&v| self.vertices[v].1 == max).collect()
    }

    /// Dual vertices with the smallest second coordinate.
    pub fn bottom(&self) -> Vec<usize> {
        let min = self.vertices.iter().map(|c| c.1).min().unwrap_or(0);
        (0..self.vertices.len()).filter(|&v| self.vertices[v].1 == min).collect()
    }

    /// The dual map of this dual graph. Its vertices are offset by
    /// `(1, 1)` from the primal ones, i.e. `(a, b)` there is the primal
    /// point `(a + 1, b + 1)`.
    pub fn dual_of_dual(&self) -> DualMap {
        Self::build(&self.vertices, &self.graph)
    }

    /// `(e, e*)` correspondence as pairs of endpoint coordinates, for
    /// inspection in tests.
    pub fn correspondence(&self) -> Vec<(usize, ((i64, i64), (i64, i64)))> {
        self.graph
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(a, b))| (e, (self.vertices[a], self.vertices[b])))
            .collect()
    }
}

/// `ω*_{e*} = 1 − ω_e`, indexed by the shared edge index.
pub fn dual_configuration(dual: &DualMap, omega: &Configuration) -> Result<Configuration> {
    if omega.len() != dual.graph.num_edges() {
        return Err(Error::SizeMismatch { expected: dual.graph.num_edges(), actual: omega.len() });
    }
    Ok(omega.complement())
}
