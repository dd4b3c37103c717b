//! Build the full escalator tree and show its truant structure: every
//! missing integer appearing anywhere in the tree, and the deepest
//! non-universal nodes.

use polysum::escalator::{build_tree, TreeOptions};

fn main() {
    let tree = build_tree(&TreeOptions {
        cap: 20_000,
        ..Default::default()
    })
    .unwrap();
    println!("nodes: {}", tree.nodes().len());
    println!("truant set ({}): {:?}", tree.truant_set().len(), tree.truant_set());
    for depth in 1..=tree.max_non_universal_depth() {
        let rows = tree.truant_table(depth);
        println!("depth {depth}: {} non-universal nodes", rows.len());
        if depth >= 4 {
            for (sum, t) in rows {
                println!("  {sum} -> {t}");
            }
        }
    }
}
