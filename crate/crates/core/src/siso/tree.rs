use super::{
    llr_from_pair, normalization_offset, pair_from_llr, rescale, Counted, DecodeResult, Pair, Ring,
    Semiring,
};
use crate::error::{Error, Result};
use crate::gtg::{GeneralizedTannerGraph, VarLabel};
use crate::with_semiring;

/// Optimal SISO decoding on a cycle-free (possibly conditioned) generalized Tanner
/// graph by a two-pass message schedule. Conditioned hidden variables enter their
/// checks as parity offsets; unconditioned hidden variables get flat priors.
pub fn tree_siso(
    graph: &GeneralizedTannerGraph,
    input: &[f64],
    ring: Ring,
) -> Result<DecodeResult> {
    let visible = graph.visible_variables();
    if input.len() != visible.len() {
        return Err(Error::LengthMismatch {
            expected: visible.len(),
            actual: input.len(),
        });
    }
    if let Some(&v) = visible.iter().find(|&&v| graph.is_conditioned(v)) {
        return Err(Error::Unsupported(format!(
            "visible variable {v} is conditioned"
        )));
    }
    if !graph.is_cycle_free() {
        return Err(Error::CyclicGraph);
    }
    with_semiring!(ring, S => run::<S>(graph, input))
}

struct Graph<'a> {
    g: &'a GeneralizedTannerGraph,
    nv: usize,
}

impl Graph<'_> {
    fn neighbors(&self, node: usize) -> Vec<usize> {
        if node < self.nv {
            if self.g.is_conditioned(node) {
                return Vec::new();
            }
            self.g
                .variable_neighbors(node)
                .iter()
                .map(|c| self.nv + c)
                .collect()
        } else {
            self.g
                .check_neighbors(node - self.nv)
                .iter()
                .copied()
                .filter(|&v| !self.g.is_conditioned(v))
                .collect()
        }
    }
}

fn run<S: Semiring>(graph: &GeneralizedTannerGraph, input: &[f64]) -> Result<DecodeResult> {
    let nv = graph.num_variables();
    let nc = graph.num_checks();
    let total = nv + nc;
    let view = Graph { g: graph, nv };
    let adj: Vec<Vec<usize>> = (0..total).map(|x| view.neighbors(x)).collect();

    let mut prior = vec![[S::one(); 2]; nv];
    let mut coord_of = vec![None; nv];
    for (v, label) in graph.variables().iter().enumerate() {
        if let VarLabel::Coordinate(i) = label {
            prior[v] = pair_from_llr::<S>(input[*i]);
            coord_of[v] = Some(*i);
        }
    }

    let mut ops = Counted::<S>::new();
    let mut parent = vec![usize::MAX; total];
    let mut visited = vec![false; total];
    // up[x]: message from x to its parent; down[x]: message from parent to x.
    let mut up = vec![[S::one(); 2]; total];
    let mut down = vec![[S::one(); 2]; total];
    let mut log_z = 0.0;
    let mut app = vec![0.0; input.len()];

    for root in 0..total {
        if visited[root] || (root < nv && graph.is_conditioned(root)) {
            continue;
        }
        let mut order = vec![root];
        visited[root] = true;
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            head += 1;
            for &y in &adj[x] {
                if !visited[y] {
                    visited[y] = true;
                    parent[y] = x;
                    order.push(y);
                }
            }
        }

        // Up pass: leaves towards the root.
        for &x in order.iter().rev() {
            let children = adj[x].iter().filter(|&&y| parent[y] == x && y != parent[x]);
            let mut msg = if x < nv {
                let mut acc = prior[x];
                for &y in children {
                    acc = ops.combine(acc, up[y]);
                }
                acc
            } else {
                let mut acc = [S::one(), S::zero()];
                let mut first = true;
                for &y in children {
                    acc = if first { up[y] } else { ops.parity(acc, up[y]) };
                    first = false;
                }
                if graph.check_offset(x - nv) == 1 {
                    acc = [acc[1], acc[0]];
                }
                acc
            };
            if x == root {
                // A check root must close with even parity; a variable root sums both.
                let z = if x < nv {
                    S::plus(msg[0], msg[1])
                } else {
                    msg[0]
                };
                log_z += S::to_metric(z);
            } else {
                log_z += rescale::<S>(&mut msg);
                up[x] = msg;
            }
        }

        // Down pass: root towards the leaves.
        for &x in &order {
            let children: Vec<usize> = adj[x]
                .iter()
                .copied()
                .filter(|&y| parent[y] == x && y != parent[x])
                .collect();
            let from_parent = (x != root).then(|| down[x]);
            if x < nv {
                // Prefix/suffix products over the children exclude each one in turn.
                let mut base = prior[x];
                if let Some(p) = from_parent {
                    base = ops.combine(base, p);
                }
                let k = children.len();
                let mut suffix = vec![[S::one(); 2]; k + 1];
                for i in (0..k).rev() {
                    suffix[i] = if i + 1 == k {
                        up[children[i]]
                    } else {
                        ops.combine(up[children[i]], suffix[i + 1])
                    };
                }
                let mut prefix = base;
                for i in 0..k {
                    let mut msg = if i + 1 < k {
                        ops.combine(prefix, suffix[i + 1])
                    } else {
                        prefix
                    };
                    rescale::<S>(&mut msg);
                    down[children[i]] = msg;
                    prefix = ops.combine(prefix, up[children[i]]);
                }
                if let Some(i) = coord_of[x] {
                    let belief = prefix;
                    let ext = if k == 0 && from_parent.is_none() {
                        0.0
                    } else {
                        llr_from_pair::<S>(belief) - llr_from_pair::<S>(prior[x])
                    };
                    app[i] = ext + input[i];
                }
            } else {
                let offset = graph.check_offset(x - nv);
                let mut inputs: Vec<Pair> = children.iter().map(|&y| up[y]).collect();
                if let Some(p) = from_parent {
                    inputs.push(p);
                }
                let k = children.len();
                let total_in = inputs.len();
                let even = [S::one(), S::zero()];
                let mut suffix = vec![even; total_in + 1];
                for i in (0..total_in).rev() {
                    suffix[i] = if i + 1 == total_in {
                        inputs[i]
                    } else {
                        ops.parity(inputs[i], suffix[i + 1])
                    };
                }
                let mut prefix: Option<Pair> = None;
                for i in 0..k {
                    let rest = match (prefix, i + 1 < total_in) {
                        (Some(p), true) => ops.parity(p, suffix[i + 1]),
                        (Some(p), false) => p,
                        (None, true) => suffix[i + 1],
                        (None, false) => even,
                    };
                    let mut msg = if offset == 1 {
                        [rest[1], rest[0]]
                    } else {
                        rest
                    };
                    rescale::<S>(&mut msg);
                    down[children[i]] = msg;
                    prefix = Some(match prefix {
                        Some(p) => ops.parity(p, inputs[i]),
                        None => inputs[i],
                    });
                }
            }
        }
    }

    let evidence = log_z + normalization_offset(input);
    Ok(DecodeResult::from_app(input, app, ops.ops, evidence))
}
