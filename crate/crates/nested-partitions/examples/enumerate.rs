//! Count a monoid: total size, per-level invertible counts, and strata.
//!
//! Run with: cargo run --example enumerate

use nested_partitions::partition::{Endomorphism, PartitionType};
use nested_partitions::predicates::stratum;

fn main() {
    for levels in [vec![2u32], vec![3], vec![2, 2], vec![3, 3]] {
        let ty = PartitionType::new(&levels).unwrap();
        println!("type {ty}:");
        println!("  |P| = {}", ty.monoid_size().unwrap());
        for j in 1..=ty.depth() {
            println!(
                "  invertible through level {j}: {}",
                ty.invertible_count(j).unwrap().unwrap()
            );
        }
        // Strata by direct enumeration where cheap.
        if ty.monoid_size().unwrap() <= 10_000 {
            let mut counts = vec![0u64; ty.depth() + 1];
            for f in Endomorphism::enumerate(&ty).unwrap() {
                counts[stratum(&f)] += 1;
            }
            println!("  strata (largest invertible level): {counts:?}");
        }
    }
}
