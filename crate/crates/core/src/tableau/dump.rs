use std::fmt::Write;

use super::{BranchStatus, TruthTree};

pub(super) fn render(tree: &TruthTree) -> String {
    let mut out = String::new();
    if !tree.nodes.is_empty() {
        walk(tree, 0, 0, &mut out);
    }
    out
}

fn walk(tree: &TruthTree, mut node: usize, depth: usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    loop {
        let n = &tree.nodes[node];
        writeln!(out, "{indent}{}", n.entry).expect("write to string");
        if let Some(b) = n.leaf_of {
            let branch = &tree.branches[b];
            match (branch.status, branch.closing_pair) {
                (BranchStatus::Closed, Some((i, j))) => writeln!(out, "{indent}CLOSED({i},{j})"),
                _ => writeln!(out, "{indent}OPEN"),
            }
            .expect("write to string");
        }
        match n.children.as_slice() {
            [] => return,
            [only] => node = *only,
            many => {
                for &child in many {
                    walk(tree, child, depth + 1, out);
                }
                return;
            }
        }
    }
}
