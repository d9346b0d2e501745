//! The k-element generating set of the automorphism group, verified by
//! closure, plus the depth-1 edge where a single element cannot suffice.
//!
//! Run with: cargo run --example group_generators

use nested_partitions::partition::{Endomorphism, PartitionType};
use nested_partitions::rank::{closure, ClosureOptions};
use nested_partitions::wreath::group_generators;
use nested_partitions::Error;

fn main() {
    let ty = PartitionType::new(&[3, 3]).unwrap();
    let gens = group_generators(&ty).unwrap();
    println!("generators for the automorphism group of {ty}:");
    for g in &gens {
        println!("  {}", serde_json::to_string(g).unwrap());
    }
    let out = closure(
        &gens,
        Some(&Endomorphism::identity(&ty)),
        |a, b| a.compose(b).unwrap(),
        &ClosureOptions {
            target_size: Some(1296),
            ..Default::default()
        },
    )
    .unwrap();
    println!(
        "closure: {} of {} expected",
        out.report.size,
        ty.automorphism_count().unwrap()
    );

    // Level sizes below 3 are refused outright.
    match group_generators(&PartitionType::new(&[2, 2]).unwrap()) {
        Err(Error::UnsupportedConstruction { level, size }) => {
            println!("type (2,2): unsupported construction (level {level} has size {size})");
        }
        other => println!("unexpected: {other:?}"),
    }

    // Depth 1 runs but cannot generate: the closure misses.
    let t3 = PartitionType::new(&[3]).unwrap();
    let gens3 = group_generators(&t3).unwrap();
    let out3 = closure(
        &gens3,
        None,
        |a: &Endomorphism, b| a.compose(b).unwrap(),
        &ClosureOptions::default(),
    )
    .unwrap();
    println!(
        "type (3): {} generator closes to {} of 6 automorphisms (depth-1 edge)",
        gens3.len(),
        out3.report.size
    );
}
