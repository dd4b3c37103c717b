//! The escalator tree: each non-universal node is extended by every term
//! allowed by the escalation rule, until all leaves are universal at the
//! classification cap.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::sums::{PolygonalSum, Term, Truant};

pub const DEFAULT_CAP: u64 = 100_000;

/// The Euler pair: `P4+2P3` represents the same integers as `P3+P3`, so its
/// subtree can be pruned without losing any truants.
fn euler_redundant() -> PolygonalSum {
    PolygonalSum::from_pairs(&[(1, 4), (2, 3)]).unwrap()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum NodeStatus {
    Universal(UniversalityCertificate),
    NonUniversal { truant: u64 },
    Pruned { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniversalityCertificate {
    pub checked_bound: u64,
    pub method: CertificateMethod,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CertificateMethod {
    BruteForceToBound,
    ParentFamilyEscape,
    Cited(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EscalatorNode {
    pub sum: PolygonalSum,
    pub depth: u32,
    pub status: NodeStatus,
    pub children: Vec<EscalatorNode>,
}

impl EscalatorNode {
    /// Pre-order walk over the whole tree.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a EscalatorNode)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    pub fn nodes(&self) -> Vec<&EscalatorNode> {
        let mut out = Vec::new();
        self.walk(&mut |n| out.push(n));
        out
    }

    /// All truants of non-universal nodes, deduplicated and sorted.
    pub fn truant_set(&self) -> Vec<u64> {
        let mut out = Vec::new();
        self.walk(&mut |n| {
            if let NodeStatus::NonUniversal { truant } = n.status {
                out.push(truant);
            }
        });
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Non-universal nodes of the given depth with their truants, in
    /// canonical order.
    pub fn truant_table(&self, depth: u32) -> Vec<(PolygonalSum, u64)> {
        let mut out = Vec::new();
        self.walk(&mut |n| {
            if n.depth == depth {
                if let NodeStatus::NonUniversal { truant } = n.status {
                    out.push((n.sum.clone(), truant));
                }
            }
        });
        out.sort();
        out
    }

    pub fn max_non_universal_depth(&self) -> u32 {
        let mut max = 0;
        self.walk(&mut |n| {
            if matches!(n.status, NodeStatus::NonUniversal { .. }) {
                max = max.max(n.depth);
            }
        });
        max
    }
}

/// Sums allowed as extensions of a non-universal node with the given
/// truant: coefficients between the last coefficient and the truant, orders
/// in {3, 4}, and order non-decreasing when the coefficient repeats.
pub fn children(sum: &PolygonalSum, truant: u64) -> Vec<PolygonalSum> {
    let (last_coeff, last_order) = match sum.terms().last() {
        Some(t) => (t.coeff, t.order),
        None => (1, 3),
    };
    let mut out = Vec::new();
    for a in last_coeff..=truant {
        for m in [3u32, 4] {
            if a == last_coeff && !sum.is_empty() && m < last_order {
                continue;
            }
            out.push(sum.extended(Term::new(a, m).unwrap()));
        }
    }
    out.sort();
    out
}

/// Brute-force status of a sum at the cap. "Universal" means verified on
/// `[1, cap]` and is labeled with that bound.
pub fn classify(sum: &PolygonalSum, cap: u64) -> Result<NodeStatus> {
    assert!(cap >= 48, "classification cap must cover the critical set");
    Ok(match sum.truant(cap)? {
        Truant::Truant(t) => NodeStatus::NonUniversal { truant: t },
        Truant::UniversalUpTo(b) => NodeStatus::Universal(UniversalityCertificate {
            checked_bound: b,
            method: CertificateMethod::BruteForceToBound,
        }),
    })
}

#[derive(Clone, Copy, Debug)]
pub struct TreeOptions {
    pub cap: u64,
    pub prune_euler: bool,
    pub parallel: bool,
}

impl Default for TreeOptions {
    fn default() -> Self {
        TreeOptions {
            cap: DEFAULT_CAP,
            prune_euler: true,
            parallel: true,
        }
    }
}

/// Builds the full escalator tree rooted at the empty sum.
pub fn build_tree(opts: &TreeOptions) -> Result<EscalatorNode> {
    let root = PolygonalSum::empty();
    build_node(&root, 0, opts)
}

fn build_node(sum: &PolygonalSum, depth: u32, opts: &TreeOptions) -> Result<EscalatorNode> {
    if opts.prune_euler && *sum == euler_redundant() {
        return Ok(EscalatorNode {
            sum: sum.clone(),
            depth,
            status: NodeStatus::Pruned {
                reason: "represents the same integers as P3+P3 (Euler)".into(),
            },
            children: Vec::new(),
        });
    }
    let status = if sum.is_empty() {
        // Root truant is 1 by convention.
        NodeStatus::NonUniversal { truant: 1 }
    } else {
        classify(sum, opts.cap)?
    };
    let children = match &status {
        NodeStatus::NonUniversal { truant } => {
            let child_sums = children(sum, *truant);
            if opts.parallel {
                child_sums
                    .par_iter()
                    .map(|c| build_node(c, depth + 1, opts))
                    .collect::<Result<Vec<_>>>()?
            } else {
                child_sums
                    .iter()
                    .map(|c| build_node(c, depth + 1, opts))
                    .collect::<Result<Vec<_>>>()?
            }
        }
        _ => Vec::new(),
    };
    Ok(EscalatorNode {
        sum: sum.clone(),
        depth,
        status,
        children,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(pairs: &[(u64, u32)]) -> PolygonalSum {
        PolygonalSum::from_pairs(pairs).unwrap()
    }

    #[test]
    fn root_children() {
        let kids = children(&PolygonalSum::empty(), 1);
        assert_eq!(kids, vec![sum(&[(1, 3)]), sum(&[(1, 4)])]);
    }

    #[test]
    fn depth_two_children() {
        let kids = children(&sum(&[(1, 4)]), 2);
        assert_eq!(
            kids,
            vec![
                sum(&[(1, 4), (1, 4)]),
                sum(&[(1, 4), (2, 3)]),
                sum(&[(1, 4), (2, 4)]),
            ]
        );
        let kids = children(&sum(&[(1, 3)]), 2);
        assert_eq!(
            kids,
            vec![
                sum(&[(1, 3), (1, 3)]),
                sum(&[(1, 3), (1, 4)]),
                sum(&[(1, 3), (2, 3)]),
                sum(&[(1, 3), (2, 4)]),
            ]
        );
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify(&sum(&[(1, 4), (1, 4), (3, 3)]), 10_000).unwrap(),
            NodeStatus::NonUniversal { truant: 6 }
        );
        assert!(matches!(
            classify(&sum(&[(1, 3), (2, 3), (2, 3)]), 10_000).unwrap(),
            NodeStatus::Universal(_)
        ));
        assert_eq!(
            classify(&sum(&[(1, 3), (1, 4), (7, 4), (7, 4), (21, 3)]), 10_000).unwrap(),
            NodeStatus::NonUniversal { truant: 48 }
        );
    }

    #[test]
    fn depth_two_truant_table() {
        let tree = build_tree(&TreeOptions {
            cap: 1_000,
            ..Default::default()
        })
        .unwrap();
        let table = tree.truant_table(2);
        let expect = vec![
            (sum(&[(1, 3), (1, 3)]), 5),
            (sum(&[(1, 3), (1, 4)]), 8),
            (sum(&[(1, 3), (2, 3)]), 4),
            (sum(&[(1, 3), (2, 4)]), 4),
            (sum(&[(1, 4), (1, 4)]), 3),
            (sum(&[(1, 4), (2, 4)]), 5),
        ];
        assert_eq!(table, expect);
        // The Euler node is retained as pruned, not dropped.
        let pruned: Vec<_> = tree
            .nodes()
            .into_iter()
            .filter(|n| matches!(n.status, NodeStatus::Pruned { .. }))
            .collect();
        assert_eq!(pruned.len(), 1);
        assert_eq!(pruned[0].sum, sum(&[(1, 4), (2, 3)]));
        assert!(pruned[0].children.is_empty());
    }

    #[test]
    fn parallel_and_sequential_trees_agree() {
        let mk = |parallel| {
            build_tree(&TreeOptions {
                cap: 1_000,
                prune_euler: true,
                parallel,
            })
            .unwrap()
        };
        assert_eq!(mk(true), mk(false));
    }

    #[test]
    fn unpruned_euler_subtree_matches_truants() {
        let tree = build_tree(&TreeOptions {
            cap: 1_000,
            prune_euler: false,
            parallel: true,
        })
        .unwrap();
        let find = |target: &PolygonalSum| {
            tree.nodes()
                .into_iter()
                .find(|n| n.sum == *target)
                .unwrap()
                .clone()
        };
        let a = find(&sum(&[(1, 3), (1, 3)]));
        let b = find(&sum(&[(1, 4), (2, 3)]));
        for depth in 2..=6u32 {
            let mut ta: Vec<u64> = a.truant_table(depth).into_iter().map(|(_, t)| t).collect();
            let mut tb: Vec<u64> = b.truant_table(depth).into_iter().map(|(_, t)| t).collect();
            ta.sort_unstable();
            ta.dedup();
            tb.sort_unstable();
            tb.dedup();
            assert_eq!(ta, tb, "depth {depth}");
        }
    }

    #[test]
    fn children_grow_represented_sets() {
        let parent = sum(&[(1, 4), (2, 4)]);
        let pset = parent.represented_set(500).unwrap();
        for child in children(&parent, 5) {
            let cset = child.represented_set(500).unwrap();
            for n in 0..=500u64 {
                assert!(!pset.contains(n) || cset.contains(n));
            }
        }
    }
}
