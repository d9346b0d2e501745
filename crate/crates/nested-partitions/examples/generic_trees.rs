//! Nested partitions over arbitrary rooted trees, including unequal leaf
//! depths, and the generic respect checker with its induced level maps.
//!
//! Run with: cargo run --example generic_trees

use nested_partitions::nested::{respects_map, standard_partition, NestedPartition, RespectOutcome};
use nested_partitions::partition::PartitionType;

fn main() {
    // A tree with leaves at unequal depths: root {1,2,3} with children
    // {1,2} (split again) and {3} (a shallow leaf).
    let uneven = NestedPartition::new(
        vec![None, Some(0), Some(0), Some(1), Some(1)],
        vec![vec![1, 2, 3], vec![1, 2], vec![3], vec![1], vec![2]],
    )
    .unwrap();
    let swap12 = |&x: &u32| if x == 1 { 2 } else if x == 2 { 1 } else { x };
    match respects_map(swap12, &uneven, &uneven).unwrap() {
        RespectOutcome::Respects {
            vertex_map,
            squares_commute,
        } => println!("swap(1,2) respects the uneven tree: vertex map {vertex_map:?}, squares commute: {squares_commute}"),
        RespectOutcome::Violation(v) => println!("violation at vertex {} (level {})", v.vertex, v.level),
    }

    // Sending 2 across the block boundary is caught, with the culprit named.
    let split = |&x: &u32| if x == 2 { 3 } else { x };
    match respects_map(split, &uneven, &uneven).unwrap() {
        RespectOutcome::Violation(v) => {
            println!("block-splitting map rejected at vertex {} (level {})", v.vertex, v.level);
        }
        RespectOutcome::Respects { .. } => unreachable!(),
    }

    // The standard partition of a type, viewed generically, accepts exactly
    // the maps the leaf-map filter accepts.
    let ty = PartitionType::new(&[2, 2]).unwrap();
    let std_tree = standard_partition(&ty).unwrap();
    let rotate_block = |&x: &u64| [1u64, 0, 2, 3][x as usize];
    let ok = respects_map(rotate_block, &std_tree, &std_tree)
        .unwrap()
        .respects();
    println!("swap inside the first block respects the standard tree: {ok}");
}
