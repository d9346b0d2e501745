//! Transport automorphisms into the iterated wreath product and back, and
//! read off levelwise signs.
//!
//! Run with: cargo run --example wreath_isomorphism

use nested_partitions::partition::{Endomorphism, PartitionType};
use nested_partitions::wreath::{
    endo_to_wreath, iterated, parity, wreath_to_endo, Group, WREATH_ORIENTATION,
};

fn main() {
    let ty = PartitionType::new(&[2, 2]).unwrap();
    let iw = iterated(&ty);
    println!("wreath product order: {}", iw.order().unwrap());

    let autos = Endomorphism::enumerate_automorphisms(&ty).unwrap();
    println!("automorphisms: {}", autos.len());
    for f in &autos {
        let x = endo_to_wreath(f).unwrap();
        assert_eq!(wreath_to_endo(&ty, &x).unwrap(), *f);
        println!(
            "  sign {} <- {}",
            parity(f).unwrap(),
            serde_json::to_string(&x).unwrap()
        );
    }

    // The transport reverses products; verify on one pair.
    let f = &autos[3];
    let g = &autos[5];
    let lhs = endo_to_wreath(&f.compose(g).unwrap()).unwrap();
    let rhs = iw.mul(&endo_to_wreath(g).unwrap(), &endo_to_wreath(f).unwrap());
    assert_eq!(lhs, rhs);
    println!("orientation: {WREATH_ORIENTATION}");
}
