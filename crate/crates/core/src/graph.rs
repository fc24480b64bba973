//! Labelled undirected graphs with rank-ordered adjacency.
//!
//! Vertices carry 1-based labels and every interface speaks those labels.
//! Each neighbor list is kept sorted ascending so a move can be named by its
//! *rank*: rank 0 is the lowest-labelled neighbor, rank `d-1` the highest.
//! All graphs are required to be regular, since per-site strategies index
//! moves by rank within a fixed arity.

use crate::error::{Error, Result};

/// 1-based vertex label.
pub type Vertex = usize;

/// An undirected, regular graph with sorted neighbor lists.
///
/// Immutable after construction; freely shareable across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<Vertex>>,
    degree: usize,
}

impl Graph {
    /// Builds a graph from per-vertex neighbor lists (`lists[i]` belongs to
    /// vertex `i + 1`) and validates it: symmetric edges, no self-loops or
    /// duplicates, strictly ascending lists, uniform degree.
    pub fn from_adjacency(lists: Vec<Vec<Vertex>>) -> Result<Self> {
        let n = lists.len();
        if n == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        let degree = lists[0].len();
        if degree == 0 {
            return Err(Error::InvalidGraph("vertex 1 has no neighbors".into()));
        }
        for (i, list) in lists.iter().enumerate() {
            let v = i + 1;
            if list.len() != degree {
                return Err(Error::InvalidGraph(format!(
                    "vertex {v} has degree {} but vertex 1 has degree {degree}; graphs must be regular",
                    list.len()
                )));
            }
            for (k, &w) in list.iter().enumerate() {
                if w < 1 || w > n {
                    return Err(Error::InvalidGraph(format!(
                        "vertex {v} lists neighbor {w} outside 1..={n}"
                    )));
                }
                if w == v {
                    return Err(Error::InvalidGraph(format!("vertex {v} has a self-loop")));
                }
                if k > 0 && list[k - 1] >= w {
                    return Err(Error::InvalidGraph(format!(
                        "neighbor list of vertex {v} is not strictly ascending"
                    )));
                }
            }
        }
        // Symmetry after the per-list checks so error messages stay precise.
        for (i, list) in lists.iter().enumerate() {
            let v = i + 1;
            for &w in list {
                if !lists[w - 1].contains(&v) {
                    return Err(Error::InvalidGraph(format!(
                        "edge {v}-{w} is one-sided: {w} does not list {v}"
                    )));
                }
            }
        }
        Ok(Graph {
            adjacency: lists,
            degree,
        })
    }

    /// The cycle graph `C_n`: vertex `i` adjacent to `i-1` and `i+1` with
    /// 1-based wraparound. Requires `n >= 3`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSize(format!(
                "cycle graphs need at least 3 vertices, got {n}"
            )));
        }
        let lists = (1..=n)
            .map(|v| {
                let prev = if v == 1 { n } else { v - 1 };
                let next = if v == n { 1 } else { v + 1 };
                let mut l = vec![prev, next];
                l.sort_unstable();
                l.dedup(); // n == 3 has prev != next already; keep for clarity
                l
            })
            .collect();
        Self::from_adjacency(lists)
    }

    /// One of the five named cubic graphs used throughout the crate.
    ///
    /// * `Y3` — triangular prism (6 vertices)
    /// * `K4` — complete graph on 4 vertices
    /// * `2K4` — two disconnected copies of `K4` (odd and even labels)
    /// * `cubic6` — an 8-vertex cubic graph
    /// * `Q3` — the cube graph (8 vertices)
    pub fn named_cubic(name: &str) -> Result<Self> {
        let lists: Vec<Vec<Vertex>> = match normalize_name(name).as_str() {
            "y3" => vec![
                vec![2, 3, 4],
                vec![1, 3, 5],
                vec![1, 2, 6],
                vec![1, 5, 6],
                vec![2, 4, 6],
                vec![3, 4, 5],
            ],
            "k4" => vec![vec![2, 3, 4], vec![1, 3, 4], vec![1, 2, 4], vec![1, 2, 3]],
            "2k4" => vec![
                vec![3, 5, 7],
                vec![4, 6, 8],
                vec![1, 5, 7],
                vec![2, 6, 8],
                vec![1, 3, 7],
                vec![2, 4, 8],
                vec![1, 3, 5],
                vec![2, 4, 6],
            ],
            "cubic6" => vec![
                vec![2, 3, 4],
                vec![1, 3, 6],
                vec![1, 2, 8],
                vec![1, 5, 7],
                vec![4, 6, 8],
                vec![2, 5, 7],
                vec![4, 6, 8],
                vec![3, 5, 7],
            ],
            "q3" => vec![
                vec![2, 4, 5],
                vec![1, 3, 6],
                vec![2, 4, 7],
                vec![1, 3, 8],
                vec![1, 6, 8],
                vec![2, 5, 7],
                vec![3, 6, 8],
                vec![4, 5, 7],
            ],
            _ => return Err(Error::UnknownGraph(name.to_string())),
        };
        Self::from_adjacency(lists)
    }

    /// Resolves a graph by name: `C<n>` (or `K3`, an alias for `C3`) builds a
    /// cycle, anything else is looked up among the named cubic graphs.
    pub fn from_name(name: &str) -> Result<Self> {
        let norm = normalize_name(name);
        if norm == "k3" {
            return Self::cycle(3);
        }
        if let Some(rest) = norm.strip_prefix('c') {
            if let Ok(n) = rest.parse::<usize>() {
                return Self::cycle(n);
            }
        }
        Self::named_cubic(name)
    }

    /// Parses the plain-text adjacency format: one `label: n1 n2 ...` line per
    /// vertex. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows: Vec<(usize, Vec<Vertex>, usize)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (label, rest) = line.split_once(':').ok_or(Error::Parse {
                line: line_no,
                message: "expected `label: n1 n2 ...`".into(),
            })?;
            let label: usize = label.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad vertex label `{}`", label.trim()),
            })?;
            let mut nbrs = Vec::new();
            for tok in rest.split_whitespace() {
                let w: usize = tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad neighbor label `{tok}`"),
                })?;
                nbrs.push(w);
            }
            rows.push((label, nbrs, line_no));
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "no vertex lines".into(),
            });
        }
        let n = rows.len();
        let mut lists: Vec<Option<Vec<Vertex>>> = vec![None; n];
        for (label, nbrs, line_no) in rows {
            if label < 1 || label > n {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("vertex label {label} outside 1..={n}"),
                });
            }
            if lists[label - 1].is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("vertex {label} listed twice"),
                });
            }
            lists[label - 1] = Some(nbrs);
        }
        let lists = lists
            .into_iter()
            .enumerate()
            .map(|(i, l)| {
                l.ok_or(Error::Parse {
                    line: 0,
                    message: format!("vertex {} missing", i + 1),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_adjacency(lists)
    }

    /// Renders the graph in the same plain-text format accepted by [`Graph::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in self.vertices() {
            out.push_str(&v.to_string());
            out.push(':');
            for w in self.neighbors(v) {
                out.push(' ');
                out.push_str(&w.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Uniform vertex degree (2 for cycles, 3 for cubic graphs).
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.adjacency.len()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v >= 1 && v <= self.adjacency.len()
    }

    /// Sorted neighbor list of `v`. Panics if `v` is out of range.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v - 1]
    }

    /// The `rank`-th smallest neighbor of `v` (rank 0 = lowest label).
    pub fn ranked_neighbor(&self, v: Vertex, rank: usize) -> Result<Vertex> {
        if !self.contains(v) {
            return Err(Error::InvalidVertex(v));
        }
        if rank >= self.degree {
            return Err(Error::Arity {
                rank,
                degree: self.degree,
            });
        }
        Ok(self.adjacency[v - 1][rank])
    }

    pub fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.contains(u) && self.contains(v) && self.adjacency[u - 1].contains(&v)
    }

    /// Connected components as sorted vertex lists, ordered by smallest label.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n + 1];
        let mut comps = Vec::new();
        for start in 1..=n {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            let mut comp = Vec::new();
            seen[start] = true;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }
}

fn normalize_name(name: &str) -> String {
    name.trim()
        .chars()
        .filter(|c| *c != '-' && *c != '_')
        .collect::<String>()
        .to_ascii_lowercase()
}
