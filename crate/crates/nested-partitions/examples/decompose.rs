//! Factor an endomorphism through its levels and put it back together.
//! The deepest factor applies first; the example shows why the other order
//! fails.
//!
//! Run with: cargo run --example decompose

use nested_partitions::elementary::{decompose, recompose};
use nested_partitions::partition::{Endomorphism, LocalMap, PartitionType, Point};

fn main() {
    let ty = PartitionType::new(&[2, 2]).unwrap();
    let f = Endomorphism::from_local_table(
        &ty,
        &[
            (Point::root(), LocalMap::constant(2, 2).unwrap()),
            (Point::new(vec![1]), LocalMap::identity(2)),
            (Point::new(vec![2]), LocalMap::transposition(2, 1, 2).unwrap()),
        ],
    )
    .unwrap();

    let parts = decompose(&f);
    for (j, t) in parts.iter().enumerate() {
        println!("t_{}(f) leaf map: {:?}", j + 1, t.leaf_map());
    }
    let back = recompose(&parts).unwrap();
    println!("recomposed == f: {}", back == f);

    // Folding the other way applies the top level first and misses.
    let wrong = parts
        .iter()
        .skip(1)
        .fold(parts[0].clone(), |acc, t| t.compose(&acc).unwrap());
    println!("top-first fold == f: {} (expected false)", wrong == f);

    // Over all 64 elements the factorization is exact.
    let all_exact = Endomorphism::enumerate(&ty)
        .unwrap()
        .all(|f| recompose(&decompose(&f)).unwrap() == f);
    println!("recomposition exact on all 64 elements: {all_exact}");
}
