//! Generalized Tanner graphs: the bipartite variable/check graph of a generalized
//! parity-check matrix, with hidden partial-parity variables that can be conditioned
//! (fixed to a known bit) to break cycles.
//!
//! The recursive model for RM(1,m) lives here too. Writing a codeword as `(u, u+v)`
//! with `v` a repetition word, each level `t ∈ {m, …, 3}` contributes one hidden
//! variable `v_t` and `2^(t−1)` checks `c_j + c_{j+2^(t−1)} + v_t = 0`; the innermost
//! four coordinates carry a single [4,3,2] parity check. Fixing the `m−2` hidden
//! variables leaves a forest.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::codes::BitMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarLabel {
    /// An observed code coordinate.
    Coordinate(usize),
    /// A hidden partial parity. `support` is its defining index set when known.
    Hidden {
        column: usize,
        support: Option<Vec<usize>>,
    },
}

impl VarLabel {
    pub fn is_hidden(&self) -> bool {
        matches!(self, VarLabel::Hidden { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedTannerGraph {
    variables: Vec<VarLabel>,
    checks: Vec<Vec<usize>>,
    var_checks: Vec<Vec<usize>>,
    conditioned: BTreeMap<usize, u8>,
}

impl GeneralizedTannerGraph {
    /// One variable per column and one check per row of `h`, with an edge wherever
    /// `h_ij = 1`. The last `hidden_count` columns are hidden variables.
    pub fn from_parity_check(h: &BitMatrix, hidden_count: usize) -> Result<Self> {
        if hidden_count > h.cols() {
            return Err(Error::IndexOutOfRange {
                index: hidden_count,
                limit: h.cols(),
            });
        }
        let visible = h.cols() - hidden_count;
        let variables = (0..h.cols())
            .map(|c| {
                if c < visible {
                    VarLabel::Coordinate(c)
                } else {
                    VarLabel::Hidden {
                        column: c,
                        support: None,
                    }
                }
            })
            .collect();
        let checks = (0..h.rows()).map(|r| h.row_support(r)).collect();
        Ok(Self::from_adjacency(variables, checks))
    }

    fn from_adjacency(variables: Vec<VarLabel>, checks: Vec<Vec<usize>>) -> Self {
        let mut var_checks = vec![Vec::new(); variables.len()];
        for (c, vars) in checks.iter().enumerate() {
            for &v in vars {
                var_checks[v].push(c);
            }
        }
        GeneralizedTannerGraph {
            variables,
            checks,
            var_checks,
            conditioned: BTreeMap::new(),
        }
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn num_edges(&self) -> usize {
        self.checks.iter().map(Vec::len).sum()
    }

    /// Edges not removed by conditioning.
    pub fn active_edge_count(&self) -> usize {
        self.checks
            .iter()
            .flatten()
            .filter(|v| !self.conditioned.contains_key(v))
            .count()
    }

    pub fn variables(&self) -> &[VarLabel] {
        &self.variables
    }

    /// Variable neighbours of check `c`.
    pub fn check_neighbors(&self, c: usize) -> &[usize] {
        &self.checks[c]
    }

    /// Check neighbours of variable `v`.
    pub fn variable_neighbors(&self, v: usize) -> &[usize] {
        &self.var_checks[v]
    }

    pub fn visible_variables(&self) -> Vec<usize> {
        (0..self.variables.len())
            .filter(|&v| !self.variables[v].is_hidden())
            .collect()
    }

    pub fn hidden_variables(&self) -> Vec<usize> {
        (0..self.variables.len())
            .filter(|&v| self.variables[v].is_hidden())
            .collect()
    }

    pub fn conditioned(&self) -> &BTreeMap<usize, u8> {
        &self.conditioned
    }

    pub fn is_conditioned(&self, v: usize) -> bool {
        self.conditioned.contains_key(&v)
    }

    /// Incidence matrix (checks × variables).
    pub fn incidence_matrix(&self) -> BitMatrix {
        let mut h = BitMatrix::zeros(self.checks.len(), self.variables.len());
        for (c, vars) in self.checks.iter().enumerate() {
            for &v in vars {
                h.set(c, v, true);
            }
        }
        h
    }

    /// Fixes variable `var` to `bit`. Incident checks see it as a known parity offset.
    pub fn condition(&self, var: usize, bit: u8) -> Result<Self> {
        if var >= self.variables.len() {
            return Err(Error::IndexOutOfRange {
                index: var,
                limit: self.variables.len(),
            });
        }
        if self.conditioned.contains_key(&var) {
            return Err(Error::AlreadyConditioned(var));
        }
        let mut g = self.clone();
        g.conditioned.insert(var, bit & 1);
        Ok(g)
    }

    pub fn uncondition(&self, var: usize) -> Result<Self> {
        if !self.conditioned.contains_key(&var) {
            return Err(Error::NotConditioned(var));
        }
        let mut g = self.clone();
        g.conditioned.remove(&var);
        Ok(g)
    }

    /// Known parity offset of check `c`: the sum of its conditioned neighbours.
    pub fn check_offset(&self, c: usize) -> u8 {
        self.checks[c]
            .iter()
            .filter_map(|v| self.conditioned.get(v))
            .fold(0, |acc, &b| acc ^ b)
    }

    /// Forest test on the graph with conditioned variables (and their edges) removed.
    pub fn is_cycle_free(&self) -> bool {
        let nv = self.variables.len();
        let mut uf = UnionFind::new(nv + self.checks.len());
        for (c, vars) in self.checks.iter().enumerate() {
            for &v in vars {
                if self.conditioned.contains_key(&v) {
                    continue;
                }
                if !uf.union(v, nv + c) {
                    return false;
                }
            }
        }
        true
    }

    fn var_name(&self, v: usize) -> String {
        match &self.variables[v] {
            VarLabel::Coordinate(i) => format!("c{}", i + 1),
            VarLabel::Hidden {
                support: Some(s), ..
            } => s
                .iter()
                .map(|i| format!("c{}", i + 1))
                .collect::<Vec<_>>()
                .join("+"),
            VarLabel::Hidden { column, .. } => format!("h{}", column + 1),
        }
    }

    /// Adjacency list: `+` lines for parity checks, `=` lines for variables (repetition
    /// constraints), hidden variables marked with `*` and conditioned ones with their bit.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (c, vars) in self.checks.iter().enumerate() {
            let names: Vec<String> = vars.iter().map(|&v| self.var_name(v)).collect();
            let offset = self.check_offset(c);
            let _ = writeln!(s, "+ w{}: {}  [offset {offset}]", c + 1, names.join(" "));
        }
        for v in 0..self.variables.len() {
            let marker = if self.variables[v].is_hidden() {
                "*"
            } else {
                ""
            };
            let state = match self.conditioned.get(&v) {
                Some(b) => format!("  [fixed {b}]"),
                None => String::new(),
            };
            let nbrs: Vec<String> = self.var_checks[v]
                .iter()
                .map(|c| format!("w{}", c + 1))
                .collect();
            let _ = writeln!(
                s,
                "= {}{marker}: {}{state}",
                self.var_name(v),
                nbrs.join(" ")
            );
        }
        s
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// One recursion level `t` of the RM(1,m) model: coordinates `j` and `j + half`
/// (for `j < half = 2^(t−1)`) are tied through the hidden repetition value `v_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcfLevel {
    pub t: usize,
    pub half: usize,
    pub hidden_var: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcfModel {
    m: usize,
    /// Outermost first: `v_m, v_(m−1), …, v_3`.
    levels: Vec<CcfLevel>,
}

impl CcfModel {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn levels(&self) -> &[CcfLevel] {
        &self.levels
    }

    /// Variable indices (in the flattened graph) to condition, outermost level first.
    pub fn conditioning_vars(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.hidden_var).collect()
    }

    pub fn degree(&self) -> usize {
        self.levels.len()
    }
}

/// The recursive conditionally cycle-free model for RM(1,m), `m ≥ 2`.
pub fn build_ccf_model(m: usize) -> Result<CcfModel> {
    if !(2..=20).contains(&m) {
        return Err(Error::InvalidParameters(format!(
            "CCF model needs 2 ≤ m ≤ 20, got {m}"
        )));
    }
    let n = 1usize << m;
    let levels = (3..=m)
        .rev()
        .map(|t| CcfLevel {
            t,
            half: 1 << (t - 1),
            hidden_var: n + (t - 3),
        })
        .collect();
    Ok(CcfModel { m, levels })
}

/// Materializes the model as an explicit graph over `2^m` coordinates plus the `m−2`
/// hidden repetition values. Check order: the base parity check, then the level
/// checks from the innermost level outwards, so `m = 3` reproduces the row order of
/// the worked RM(1,3) parity-check matrix.
pub fn flatten(model: &CcfModel) -> GeneralizedTannerGraph {
    let n = 1usize << model.m;
    let mut variables: Vec<VarLabel> = (0..n).map(VarLabel::Coordinate).collect();
    let mut checks = vec![vec![0, 1, 2, 3]];
    let mut inner_first = model.levels.clone();
    inner_first.sort_by_key(|l| l.t);
    for level in &inner_first {
        debug_assert_eq!(level.hidden_var, variables.len());
        variables.push(VarLabel::Hidden {
            column: level.hidden_var,
            support: Some(vec![level.half - 1, 2 * level.half - 1]),
        });
        for j in 0..level.half {
            checks.push(vec![j, j + level.half, level.hidden_var]);
        }
    }
    GeneralizedTannerGraph::from_adjacency(variables, checks)
}

/// The flattened model with every conditioning variable fixed to the given bits
/// (outermost level first).
pub fn conditioned_model(model: &CcfModel, bits: &[u8]) -> Result<GeneralizedTannerGraph> {
    let vars = model.conditioning_vars();
    if bits.len() != vars.len() {
        return Err(Error::LengthMismatch {
            expected: vars.len(),
            actual: bits.len(),
        });
    }
    let mut g = flatten(model);
    for (&v, &b) in vars.iter().zip(bits) {
        g = g.condition(v, b)?;
    }
    Ok(g)
}

/// The generalized parity-check matrix of the worked RM(1,3) example: the [4,3,2]
/// check on the first half plus `c_j + c_(j+4) + (c_4 + c_8) = 0`.
pub fn rm13_extended_parity_check() -> BitMatrix {
    BitMatrix::parse_rows(&[
        "111100000",
        "100010001",
        "010001001",
        "001000101",
        "000100011",
    ])
    .expect("static matrix")
}
