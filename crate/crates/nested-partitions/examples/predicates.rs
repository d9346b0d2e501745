//! Level-invertibility predicates: primitivity scans and strata.
//!
//! Run with: cargo run --example predicates

use nested_partitions::partition::{Endomorphism, PartitionType};
use nested_partitions::predicates::{check_primitive, stratum, PredicateId, PrimitivityOutcome};

fn main() {
    let ty = PartitionType::new(&[2, 2]).unwrap();
    for pred in [
        PredicateId::Level(1),
        PredicateId::Level(2),
        PredicateId::Conjunction(vec![1, 2]),
    ] {
        match check_primitive(&pred, &ty, 1).unwrap() {
            PrimitivityOutcome::Primitive { pairs_checked } => {
                println!("{pred} is primitive ({pairs_checked} ordered pairs)");
            }
            PrimitivityOutcome::Counterexample { a, b } => {
                println!("{pred} fails on {a:?} * {b:?}");
            }
        }
    }

    let mut counts = [0u64; 3];
    for f in Endomorphism::enumerate(&ty).unwrap() {
        counts[stratum(&f)] += 1;
    }
    println!("strata of P((2,2)): {counts:?} (stratum = largest invertible level)");
}
