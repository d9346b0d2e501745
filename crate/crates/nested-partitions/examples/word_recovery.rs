//! From the two elements `a = [sigma,2](1,...,m)` and `b = [g,3](1,2)`,
//! recover `[g,3]`, `[sigma,1]`, the full cycle, and the transposition as
//! explicit words in `{a, b, a^-1}`.
//!
//! Run with: cargo run --example word_recovery

use nested_partitions::perm::Perm;
use nested_partitions::wreath::{strannaya_extract, SymmetricGroup, WreathProduct};

fn main() {
    let w = WreathProduct::new(SymmetricGroup::new(3), 4).unwrap();
    let g = Perm::full_cycle(3); // odd order
    let sigma = Perm::transposition(3, 1, 2).unwrap(); // order 2

    let witness = strannaya_extract(&w, &g, &sigma).unwrap();
    println!("verified identities:");
    for name in &witness.verified_identities {
        println!("  {name}");
    }
    println!();
    println!("word certificates:");
    println!("  [g,3]      = {}", witness.embedded_g.word);
    println!("  (1,2)      = {}", witness.transposition.word);
    println!("  [sigma,1]  = {}", witness.sigma_first.word);
    println!("  (1,...,m)  = {}", witness.full_cycle.word);
}
