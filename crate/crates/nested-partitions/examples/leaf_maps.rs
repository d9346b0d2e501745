//! Build an endomorphism from local maps, read its leaf action, and induce
//! endomorphisms back from bare leaf maps (with rejection diagnostics).
//!
//! Run with: cargo run --example leaf_maps

use nested_partitions::partition::{
    points_at_level, Endomorphism, LeafMapOutcome, LocalMap, PartitionType, Point,
};

fn main() {
    let ty = PartitionType::new(&[2, 2]).unwrap();

    // f[*] = const 2, f[(1)] = id, f[(2)] = swap.
    let f = Endomorphism::from_local_table(
        &ty,
        &[
            (Point::root(), LocalMap::constant(2, 2).unwrap()),
            (Point::new(vec![1]), LocalMap::identity(2)),
            (Point::new(vec![2]), LocalMap::transposition(2, 1, 2).unwrap()),
        ],
    )
    .unwrap();

    println!("leaf action of f:");
    let leaves = points_at_level(&ty, 2).unwrap();
    for (p, &img) in leaves.iter().zip(f.leaf_map().iter()) {
        println!("  {p} -> {}", leaves[img as usize]);
    }
    println!("commuting squares hold: {}", f.verify_commuting());
    println!("as JSON: {}", serde_json::to_string(&f).unwrap());

    // A leaf map that splits a block is rejected with the violating block.
    let outcome = Endomorphism::from_leaf_map(&ty, &[0, 2, 2, 3]).unwrap();
    match outcome {
        LeafMapOutcome::Rejected { level, block } => {
            println!("splitting map rejected at level {level}, block {block}");
        }
        LeafMapOutcome::Accepted(_) => unreachable!(),
    }

    // Exactly 64 of the 256 leaf self-maps respect the partition.
    let mut accepted = 0;
    for code in 0..256u32 {
        let images: Vec<u64> = (0..4).map(|i| ((code >> (2 * i)) & 3) as u64).collect();
        if Endomorphism::from_leaf_map(&ty, &images)
            .unwrap()
            .accepted()
            .is_some()
        {
            accepted += 1;
        }
    }
    println!("{accepted} of 256 leaf maps respect the partition");
}
