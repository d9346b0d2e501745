//! Step witnesses and conjugation transport: one extra element per level
//! bridges consecutive invertibility strata, and an involutive automorphism
//! moves its anchor anywhere on the level.
//!
//! Run with: cargo run --example step_witnesses

use nested_partitions::elementary::bracket;
use nested_partitions::partition::{points_at_level, Endomorphism, PartitionType, Point};
use nested_partitions::predicates::{conjugator_h, step_witness, stratum};

fn main() {
    let ty = PartitionType::new(&[3, 3]).unwrap();
    let id = Endomorphism::identity(&ty);
    for j in 1..=ty.depth() {
        let w = step_witness(&ty, j).unwrap();
        println!(
            "witness at level {j}: leaf map {:?}, stratum {}",
            w.leaf_map(),
            stratum(&w)
        );
        let tau = w.local(&Point::new(vec![1; j - 1])).unwrap();
        for v in points_at_level(&ty, j - 1).unwrap() {
            let h = conjugator_h(&ty, j, &v).unwrap();
            let transported = h.compose(&w).unwrap().compose(&h).unwrap();
            assert_eq!(transported, bracket(&ty, &tau, &v).unwrap());
            assert_eq!(h.compose(&h).unwrap(), id);
        }
        println!("  conjugation transport verified for every level-{} anchor", j - 1);
    }
}
