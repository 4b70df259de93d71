//! Uniform moduli on Cantor space and the special fan construction,
//! checked against random binary trees.

use nsakit::gh::{fan_modulus, special_fan, verify_scf, BinaryTree, Library};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let trees: Vec<BinaryTree> = (0..100).map(|_| BinaryTree::random(&mut rng, 8)).collect();
    for g in Library::bundled().fan {
        let m = fan_modulus(&g, 12).unwrap();
        let out = special_fan(&g, 12).unwrap();
        let ok = trees.iter().filter(|t| verify_scf(&out, &g, t)).count();
        println!("{:8} N={} B={} bound={} witnesses={:2} trees passed {ok}/100", g.name, m.n, m.b, out.bound, out.witnesses.len());
    }
}
