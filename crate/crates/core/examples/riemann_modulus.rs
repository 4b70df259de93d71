//! Riemann sums over exact rational partitions and the integration modulus.

use nsakit::analysis::{check_cri, integration_modulus, mesh, riemann_sum, Partition, RealFunction, Tag};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let sq = RealFunction::square();
    for cells in [4, 16, 64] {
        let p = Partition::uniform(cells, Tag::Mid);
        let s = riemann_sum(&sq, &p, 24);
        println!("midpoint sum of x^2 on {cells:3} cells: {s} (mesh {})", mesh(&p));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let g = sq.modulus.unwrap();
    for n in [1, 3, 10] {
        let m = integration_modulus(|k| g.at(k), n);
        let (p, q) = (Partition::random(&mut rng, m), Partition::random(&mut rng, m));
        let c = check_cri(&sq, n, &p, &q).unwrap();
        println!("n={n:2}: mesh < 1/{m}, {} vs {} cells, |S-S'| = {} within 1/{n}: {}", p.cells(), q.cells(), c.deviation, c.holds);
    }
    println!("coarse: {}", check_cri(&sq, 3, &Partition::uniform(2, Tag::Left), &Partition::uniform(3, Tag::Left)).unwrap_err());
}
