//! Tree construction and the variation operators.
//!
//! Every operator returns a well-formed tree no deeper than [`MAX_DEPTH`].

use rand::Rng;

use super::{Expr, GpConfig, Node, Op, MAX_DEPTH};

const RETRIES: usize = 5;

fn random_terminal(cfg: &GpConfig, n_vars: usize, rng: &mut impl Rng) -> Node {
    if rng.random_bool(0.5) {
        Node::Var(rng.random_range(0..n_vars))
    } else {
        let (lo, hi) = cfg.const_range;
        Node::Const(rng.random_range(lo..=hi))
    }
}

fn random_op(rng: &mut impl Rng) -> Op {
    Op::ALL[rng.random_range(0..Op::ALL.len())]
}

/// Target shape: exactly `max_depth` levels when `full`, otherwise at most
/// `max_depth` levels with operator nodes forced above `min_depth`.
struct Shape {
    min_depth: usize,
    max_depth: usize,
    full: bool,
}

fn build(out: &mut Vec<Node>, depth: usize, shape: &Shape, cfg: &GpConfig, n_vars: usize, rng: &mut impl Rng) {
    let want_op = if depth >= shape.max_depth {
        false
    } else if shape.full || depth < shape.min_depth {
        true
    } else {
        // Grow picks uniformly among all primitives and terminal kinds.
        rng.random_range(0..Op::ALL.len() + 2) < Op::ALL.len()
    };
    if !want_op {
        out.push(random_terminal(cfg, n_vars, rng));
        return;
    }
    let op = random_op(rng);
    out.push(Node::Op(op));
    for _ in 0..op.arity() {
        build(out, depth + 1, shape, cfg, n_vars, rng);
    }
}

/// Ramped half-and-half: depth uniform in `cfg.init_depth`, full or grow
/// with equal probability, leaves half variables and half constants.
pub fn random_expr(cfg: &GpConfig, n_vars: usize, rng: &mut impl Rng) -> Expr {
    assert!(n_vars >= 1, "need at least one input variable");
    let (lo, hi) = cfg.init_depth;
    let depth = rng.random_range(lo..=hi.min(MAX_DEPTH));
    let full = rng.random_bool(0.5);
    let mut nodes = Vec::new();
    let shape = Shape {
        min_depth: lo.min(depth),
        max_depth: depth,
        full,
    };
    build(&mut nodes, 0, &shape, cfg, n_vars, rng);
    Expr::from_valid(nodes)
}

fn random_subtree(e: &Expr, rng: &mut impl Rng) -> (usize, usize) {
    let start = rng.random_range(0..e.len());
    (start, e.subtree_end(start))
}

/// `None` when the result would exceed the depth limit.
fn splice(e: &Expr, start: usize, end: usize, donor: &[Node]) -> Option<Expr> {
    let nodes = e.nodes();
    let mut out = Vec::with_capacity(nodes.len() - (end - start) + donor.len());
    out.extend_from_slice(&nodes[..start]);
    out.extend_from_slice(donor);
    out.extend_from_slice(&nodes[end..]);
    Expr::new(out).ok()
}

/// Replaces a random subtree of `a` with a random subtree of `b`.
pub fn subtree_crossover(a: &Expr, b: &Expr, rng: &mut impl Rng) -> Expr {
    for _ in 0..RETRIES {
        let (start, end) = random_subtree(a, rng);
        let (ds, de) = random_subtree(b, rng);
        if let Some(child) = splice(a, start, end, &b.nodes()[ds..de]) {
            return child;
        }
    }
    a.clone()
}

/// Replaces a random subtree with a freshly generated tree.
pub fn mutate_subtree(e: &Expr, cfg: &GpConfig, n_vars: usize, rng: &mut impl Rng) -> Expr {
    for _ in 0..RETRIES {
        let donor = random_expr(cfg, n_vars, rng);
        let (start, end) = random_subtree(e, rng);
        if let Some(child) = splice(e, start, end, donor.nodes()) {
            return child;
        }
    }
    e.clone()
}

/// Replaces a random subtree with one of its own subtrees.
pub fn mutate_hoist(e: &Expr, rng: &mut impl Rng) -> Expr {
    let (start, end) = random_subtree(e, rng);
    let inner = rng.random_range(start..end);
    let inner_end = e.subtree_end(inner);
    let donor = e.nodes()[inner..inner_end].to_vec();
    splice(e, start, end, &donor).expect("hoisting never deepens a tree")
}

/// Swaps one node: an operator for another of the same arity, a leaf for a
/// new variable or constant.
pub fn mutate_point(e: &Expr, cfg: &GpConfig, n_vars: usize, rng: &mut impl Rng) -> Expr {
    let at = rng.random_range(0..e.len());
    let mut nodes = e.nodes().to_vec();
    nodes[at] = match nodes[at] {
        Node::Op(op) => {
            let peers: Vec<Op> = Op::ALL
                .into_iter()
                .filter(|o| o.arity() == op.arity() && *o != op)
                .collect();
            Node::Op(peers[rng.random_range(0..peers.len())])
        }
        _ => random_terminal(cfg, n_vars, rng),
    };
    Expr::from_valid(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    fn cfg() -> GpConfig {
        GpConfig::default()
    }

    #[test]
    fn initial_depth_within_bounds() {
        let mut rng = seed::rng(1);
        for _ in 0..2000 {
            let e = random_expr(&cfg(), 3, &mut rng);
            assert!((2..=6).contains(&e.depth()), "{} has depth {}", e, e.depth());
        }
    }

    #[test]
    fn single_variable_leaves_are_x1() {
        let mut rng = seed::rng(2);
        for _ in 0..200 {
            let e = random_expr(&cfg(), 1, &mut rng);
            assert!(e.nodes().iter().all(|n| !matches!(n, Node::Var(i) if *i != 0)));
        }
    }

    #[test]
    fn same_seed_same_tree() {
        let a = random_expr(&cfg(), 2, &mut seed::rng(5));
        let b = random_expr(&cfg(), 2, &mut seed::rng(5));
        assert_eq!(a, b);
    }

    #[test]
    fn leaf_crossover_picks_a_leaf() {
        let a = Expr::var(0);
        let b = Expr::constant(0.25);
        let mut rng = seed::rng(3);
        for _ in 0..20 {
            let c = subtree_crossover(&a, &b, &mut rng);
            assert_eq!(c, b);
        }
    }

    #[test]
    fn self_crossover_uses_own_nodes() {
        let mut rng = seed::rng(4);
        let a = random_expr(&cfg(), 2, &mut rng);
        for _ in 0..100 {
            let c = subtree_crossover(&a, &a, &mut rng);
            assert!(c.nodes().iter().all(|n| a.nodes().contains(n)));
        }
    }

    #[test]
    fn crossover_respects_depth_cap() {
        let chain = |leaf: &str| {
            let text = format!("{}{leaf}{}", "neg(".repeat(MAX_DEPTH), ")".repeat(MAX_DEPTH));
            text.parse::<Expr>().unwrap()
        };
        let (a, b) = (chain("x1"), chain("0.5"));
        let mut rng = seed::rng(6);
        for _ in 0..200 {
            assert!(subtree_crossover(&a, &b, &mut rng).depth() <= MAX_DEPTH);
        }
    }

    #[test]
    fn hoist_on_leaf_is_identity() {
        let e = Expr::constant(0.3);
        assert_eq!(mutate_hoist(&e, &mut seed::rng(1)), e);
    }

    #[test]
    fn hoist_never_deepens_and_point_keeps_size() {
        let mut rng = seed::rng(7);
        for _ in 0..1000 {
            let e = random_expr(&cfg(), 3, &mut rng);
            assert!(mutate_hoist(&e, &mut rng).depth() <= e.depth());
            let p = mutate_point(&e, &cfg(), 3, &mut rng);
            assert_eq!(p.len(), e.len());
        }
    }
}
