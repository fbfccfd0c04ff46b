//! Graphs, QUBO formulations and their diagonal Hamiltonians.
//!
//! The three problems are written as minimization QUBOs `xᵀQx + c` with `Q` upper
//! triangular. `c` carries the constant part of the vertex-cover penalty so that
//! energies equal the cover cost plus `P` per uncovered edge.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::MAX_QUBITS;
use crate::seed;

/// Default weight of constraint penalties.
pub const DEFAULT_PENALTY: f64 = 2.0;

const REGULAR_RETRIES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    ThreeRegular,
    #[serde(rename = "grid2d")]
    Grid2D,
    Star,
    Cycle,
    /// Edge probability.
    ErdosRenyi(f64),
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::ThreeRegular => f.write_str("three_regular"),
            Topology::Grid2D => f.write_str("grid2d"),
            Topology::Star => f.write_str("star"),
            Topology::Cycle => f.write_str("cycle"),
            Topology::ErdosRenyi(p) => write!(f, "erdos_renyi_{p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    MaxCut,
    MaxClique,
    MinVertexCover,
}

impl ProblemKind {
    pub fn is_constrained(self) -> bool {
        !matches!(self, ProblemKind::MaxCut)
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::MaxCut => "max_cut",
            ProblemKind::MaxClique => "max_clique",
            ProblemKind::MinVertexCover => "min_vertex_cover",
        })
    }
}

/// Simple undirected graph with sorted, deduplicated edges `(i, j)`, `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    topology: Topology,
}

impl Graph {
    pub fn from_edges(n_vertices: usize, edges: &[(usize, usize)], topology: Topology) -> Result<Self> {
        let mut norm = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidInput(format!("self-loop on vertex {a}")));
            }
            if a.max(b) >= n_vertices {
                return Err(Error::InvalidInput(format!(
                    "edge ({a}, {b}) outside {n_vertices} vertices"
                )));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        let before = norm.len();
        norm.dedup();
        if norm.len() != before {
            return Err(Error::InvalidInput("duplicate edge".into()));
        }
        Ok(Graph { n_vertices, edges: norm, topology })
    }

    /// Complete graph, handy for small hand-checked instances.
    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Graph { n_vertices: n, edges, topology: Topology::ErdosRenyi(1.0) }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vertices];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn is_connected(&self) -> bool {
        if self.n_vertices == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.n_vertices];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.n_vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// `rows × cols` used for a 2D grid on `n` vertices (`rows ≤ cols`).
pub fn grid_shape(n: usize) -> Result<(usize, usize)> {
    match n {
        8 => return Ok((2, 4)),
        14 => return Ok((2, 7)),
        16 => return Ok((4, 4)),
        _ => {}
    }
    if n < 2 {
        return Err(Error::Config(format!("a grid needs at least 2 vertices, got {n}")));
    }
    let rows = (1..=n).take_while(|r| r * r <= n).filter(|r| n % r == 0).last().unwrap_or(1);
    if rows == 1 && n > 3 {
        return Err(Error::Config(format!("{n} vertices admit no 2D grid factorization")));
    }
    Ok((rows, n / rows))
}

pub fn generate_graph(topology: Topology, n: usize, seed: u64) -> Result<Graph> {
    let edges = match topology {
        Topology::Star => {
            require(n >= 3, "star graphs need at least 3 vertices")?;
            (1..n).map(|v| (0, v)).collect()
        }
        Topology::Cycle => {
            require(n >= 3, "cycle graphs need at least 3 vertices")?;
            (0..n).map(|v| (v, (v + 1) % n)).collect()
        }
        Topology::Grid2D => {
            let (rows, cols) = grid_shape(n)?;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    let v = r * cols + c;
                    if c + 1 < cols {
                        edges.push((v, v + 1));
                    }
                    if r + 1 < rows {
                        edges.push((v, v + cols));
                    }
                }
            }
            edges
        }
        Topology::ThreeRegular => {
            require(n >= 4 && n % 2 == 0, "3-regular graphs need an even n ≥ 4")?;
            random_regular(n, 3, seed)?
        }
        Topology::ErdosRenyi(p) => {
            require(n >= 2, "Erdős–Rényi graphs need at least 2 vertices")?;
            require((0.0..=1.0).contains(&p), "edge probability must lie in [0, 1]")?;
            let mut rng = seed::rng(seed);
            (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|_| rng.gen::<f64>() < p)
                .collect()
        }
    };
    Graph::from_edges(n, &edges, topology)
}

fn require(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(msg.to_string()))
    }
}

/// Configuration model: shuffle `degree` stubs per vertex and pair them up,
/// rejecting self-loops and multi-edges.
fn random_regular(n: usize, degree: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    let mut rng = seed::rng(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(degree)).collect();
    'attempt: for _ in 0..REGULAR_RETRIES {
        stubs.shuffle(&mut rng);
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(stubs.len() / 2);
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a == b || edges.contains(&(a, b)) {
                continue 'attempt;
            }
            edges.push((a, b));
        }
        return Ok(edges);
    }
    Err(Error::Config(format!(
        "no simple {degree}-regular graph on {n} vertices after {REGULAR_RETRIES} attempts"
    )))
}

/// Upper-triangular QUBO `xᵀQx + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboMatrix {
    n: usize,
    q: Vec<f64>,
    offset: f64,
}

impl QuboMatrix {
    pub fn zeros(n: usize) -> Self {
        QuboMatrix { n, q: vec![0.0; n * n], offset: 0.0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n + j]
    }

    /// Adds `w` to the coefficient of `x_i x_j`, folding it into the upper triangle.
    pub fn add(&mut self, i: usize, j: usize, w: f64) {
        let (a, b) = (i.min(j), i.max(j));
        self.q[a * self.n + b] += w;
    }

    pub fn add_offset(&mut self, c: f64) {
        self.offset += c;
    }

    /// `xᵀQx + offset` with `x_i` the bit `i` of `bits`.
    pub fn evaluate(&self, bits: usize) -> f64 {
        let mut total = self.offset;
        for i in (0..self.n).filter(|i| bits >> i & 1 == 1) {
            for j in (i..self.n).filter(|j| bits >> j & 1 == 1) {
                total += self.get(i, j);
            }
        }
        total
    }

    pub fn to_ising(&self) -> IsingModel {
        let n = self.n;
        let mut fields = vec![0.0; n];
        let mut couplings = Vec::new();
        let mut constant = self.offset;
        for i in 0..n {
            let d = self.get(i, i);
            constant += d / 2.0;
            fields[i] -= d / 2.0;
            for j in i + 1..n {
                let w = self.get(i, j);
                if w != 0.0 {
                    constant += w / 4.0;
                    fields[i] -= w / 4.0;
                    fields[j] -= w / 4.0;
                    couplings.push((i, j, w / 4.0));
                }
            }
        }
        IsingModel { n, constant, fields, couplings }
    }
}

/// `E(z) = constant + Σ h_i z_i + Σ J_ij z_i z_j` with `z_i = +1` for bit 0.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub n: usize,
    pub constant: f64,
    pub fields: Vec<f64>,
    pub couplings: Vec<(usize, usize, f64)>,
}

impl IsingModel {
    pub fn energy(&self, bits: usize) -> f64 {
        let z = |i: usize| if bits >> i & 1 == 1 { -1.0 } else { 1.0 };
        self.constant
            + self.fields.iter().enumerate().map(|(i, h)| h * z(i)).sum::<f64>()
            + self.couplings.iter().map(|&(i, j, w)| w * z(i) * z(j)).sum::<f64>()
    }
}

pub fn build_qubo(graph: &Graph, kind: ProblemKind, penalty: f64) -> Result<QuboMatrix> {
    if kind.is_constrained() && !(penalty > 1.0 && penalty.is_finite()) {
        return Err(Error::Config(format!("penalty must exceed 1 for {kind}, got {penalty}")));
    }
    let n = graph.n_vertices();
    let mut q = QuboMatrix::zeros(n);
    match kind {
        ProblemKind::MaxCut => {
            for &(i, j) in graph.edges() {
                q.add(i, j, 2.0);
                q.add(i, i, -1.0);
                q.add(j, j, -1.0);
            }
        }
        ProblemKind::MinVertexCover => {
            for i in 0..n {
                q.add(i, i, 1.0);
            }
            // P(1 - x_i)(1 - x_j) per edge
            for &(i, j) in graph.edges() {
                q.add_offset(penalty);
                q.add(i, i, -penalty);
                q.add(j, j, -penalty);
                q.add(i, j, penalty);
            }
        }
        ProblemKind::MaxClique => {
            for i in 0..n {
                q.add(i, i, -1.0);
                for j in i + 1..n {
                    if !graph.has_edge(i, j) {
                        q.add(i, j, penalty);
                    }
                }
            }
        }
    }
    Ok(q)
}

/// Energy of every bitstring.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalHamiltonian {
    n_qubits: usize,
    energies: Vec<f64>,
}

impl DiagonalHamiltonian {
    pub fn from_energies(energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() || !energies.len().is_power_of_two() {
            return Err(Error::InvalidInput("energy table length must be 2^n".into()));
        }
        let n_qubits = energies.len().trailing_zeros() as usize;
        Ok(DiagonalHamiltonian { n_qubits, energies })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, bits: usize) -> f64 {
        self.energies[bits]
    }

    pub fn mean(&self) -> f64 {
        self.energies.iter().sum::<f64>() / self.energies.len() as f64
    }

    /// Bitstrings attaining the minimum energy, in increasing order, at most `limit`.
    pub fn ground_states(&self, limit: usize) -> Vec<usize> {
        let min = self.energies.iter().copied().fold(f64::INFINITY, f64::min);
        self.energies
            .iter()
            .enumerate()
            .filter(|(_, &e)| e == min)
            .map(|(b, _)| b)
            .take(limit)
            .collect()
    }
}

/// Tabulates `xᵀQx + c` over all `2^n` bitstrings.
pub fn qubo_to_hamiltonian(qubo: &QuboMatrix) -> Result<DiagonalHamiltonian> {
    let n = qubo.n();
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::Config(format!("QUBO size {n} outside 1..={MAX_QUBITS}")));
    }
    let mut energies = vec![0.0; 1 << n];
    energies[0] = qubo.offset();
    // E(b) = E(b without its top bit k) + Q_kk + Σ_{i<k, x_i=1} Q_ik
    for k in 0..n {
        let top = 1usize << k;
        for rest in 0..top {
            let mut delta = qubo.get(k, k);
            for i in (0..k).filter(|i| rest >> i & 1 == 1) {
                delta += qubo.get(i, k);
            }
            energies[top | rest] = energies[rest] + delta;
        }
    }
    DiagonalHamiltonian::from_energies(energies)
}

pub fn is_feasible(kind: ProblemKind, graph: &Graph, bits: usize) -> bool {
    let set = |v: usize| bits >> v & 1 == 1;
    match kind {
        ProblemKind::MaxCut => true,
        ProblemKind::MinVertexCover => graph.edges().iter().all(|&(i, j)| set(i) || set(j)),
        ProblemKind::MaxClique => {
            let members: Vec<usize> = (0..graph.n_vertices()).filter(|&v| set(v)).collect();
            members
                .iter()
                .enumerate()
                .all(|(k, &a)| members[k + 1..].iter().all(|&b| graph.has_edge(a, b)))
        }
    }
}

/// Exact energy extrema and the approximation ratio of the worst feasible bitstring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub e_min: f64,
    pub e_max: f64,
    /// `None` when undefined (degenerate constrained spectrum or no feasible bitstring).
    pub feasibility_threshold_ar: Option<f64>,
    pub degenerate: bool,
}

pub fn brute_force_spectrum(ham: &DiagonalHamiltonian, kind: ProblemKind, graph: &Graph) -> Result<Spectrum> {
    if ham.n_qubits() != graph.n_vertices() {
        return Err(Error::InvalidInput("Hamiltonian and graph sizes differ".into()));
    }
    let e = ham.energies();
    let e_min = e.iter().copied().fold(f64::INFINITY, f64::min);
    let e_max = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let degenerate = e_min == e_max;
    let feasibility_threshold_ar = match kind {
        ProblemKind::MaxCut => Some(0.0),
        _ if degenerate => None,
        _ => e
            .iter()
            .enumerate()
            .filter(|&(b, _)| is_feasible(kind, graph, b))
            .map(|(_, &en)| en)
            .reduce(f64::max)
            .map(|worst| (worst - e_max) / (e_min - e_max)),
    };
    Ok(Spectrum { e_min, e_max, feasibility_threshold_ar, degenerate })
}

/// A fully prepared problem: graph, QUBO, energy table and spectrum.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub graph: Graph,
    pub kind: ProblemKind,
    pub penalty: f64,
    pub seed: u64,
    pub qubo: QuboMatrix,
    pub ham: DiagonalHamiltonian,
    pub spectrum: Spectrum,
}

impl ProblemInstance {
    pub fn new(graph: Graph, kind: ProblemKind, penalty: f64, seed: u64) -> Result<Self> {
        let qubo = build_qubo(&graph, kind, penalty)?;
        let ham = qubo_to_hamiltonian(&qubo)?;
        let spectrum = brute_force_spectrum(&ham, kind, &graph)?;
        Ok(ProblemInstance { graph, kind, penalty, seed, qubo, ham, spectrum })
    }

    pub fn generate(topology: Topology, n: usize, kind: ProblemKind, penalty: f64, seed: u64) -> Result<Self> {
        ProblemInstance::new(generate_graph(topology, n, seed)?, kind, penalty, seed)
    }

    pub fn n_qubits(&self) -> usize {
        self.graph.n_vertices()
    }

    pub fn to_spec(&self) -> InstanceSpec {
        InstanceSpec {
            n: self.graph.n_vertices(),
            topology: self.graph.topology(),
            seed: self.seed,
            edges: self.graph.edges().iter().map(|&(a, b)| [a, b]).collect(),
            kind: self.kind,
            penalty: self.penalty,
        }
    }
}

/// On-disk description of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    pub topology: Topology,
    pub seed: u64,
    pub edges: Vec<[usize; 2]>,
    pub kind: ProblemKind,
    pub penalty: f64,
}

impl InstanceSpec {
    pub fn to_instance(&self) -> Result<ProblemInstance> {
        let edges: Vec<_> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let graph = Graph::from_edges(self.n, &edges, self.topology)?;
        ProblemInstance::new(graph, self.kind, self.penalty, self.seed)
    }

    /// Whether regenerating from `(topology, n, seed)` reproduces the stored edges.
    pub fn matches_regeneration(&self) -> Result<bool> {
        let regen = generate_graph(self.topology, self.n, self.seed)?;
        let stored: Vec<_> = self.edges.iter().map(|e| (e[0].min(e[1]), e[0].max(e[1]))).collect();
        let mut stored = stored;
        stored.sort_unstable();
        Ok(regen.edges() == stored.as_slice())
    }
}
