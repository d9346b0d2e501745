//! Recover the two commuting factors of `[g,i] * pi` as powers of the
//! product, when the orders of `g` and `pi` are coprime and `pi` fixes `i`.
//!
//! Run with: cargo run --example coprime_split

use nested_partitions::perm::Perm;
use nested_partitions::wreath::{coprime_split, Group, SymmetricGroup, WreathProduct};

fn main() {
    let w = WreathProduct::new(SymmetricGroup::new(3), 3).unwrap();
    let g = Perm::full_cycle(3); // order 3
    let pi = Perm::transposition(3, 1, 2).unwrap(); // order 2, fixes 3
    let x = w.mul(&w.embed(&g, 3).unwrap(), &w.top_perm(&pi).unwrap());

    let split = coprime_split(&w, &x, 3).unwrap();
    let c = &split.certificate;
    println!(
        "orders {} and {}, Bezout {:?}, |x| = {}",
        c.order_embedded, c.order_top, c.bezout, c.element_order
    );
    println!("x^{} = top permutation {}", c.exponent_top, pi);
    println!("x^{} = embedded [{g}, 3]", c.exponent_embedded);
    assert_eq!(w.mul(&split.embedded, &split.top_part), x);
    println!("product of the parts reconstructs x");
}
