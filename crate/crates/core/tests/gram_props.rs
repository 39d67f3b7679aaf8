use g2mut::mutation::{gram_mutate_left, gram_mutate_right, GramMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_unitriangular(rng: &mut ChaCha8Rng) -> GramMatrix {
    let mut m = vec![vec![0i128; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
        for cell in &mut row[i + 1..] {
            *cell = rng.gen_range(-20..=20);
        }
    }
    GramMatrix(m)
}

#[test]
fn inverse_and_braid_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6232);
    for _ in 0..2000 {
        let g = random_unitriangular(&mut rng);
        for i in 0..2 {
            let l = gram_mutate_left(&g, i);
            assert!(l.is_upper_unitriangular());
            assert_eq!(gram_mutate_right(&l, i), g);
            assert_eq!(gram_mutate_left(&gram_mutate_right(&g, i), i), g);
        }
        let lhs = gram_mutate_left(&gram_mutate_left(&gram_mutate_left(&g, 0), 1), 0);
        let rhs = gram_mutate_left(&gram_mutate_left(&gram_mutate_left(&g, 1), 0), 1);
        assert_eq!(lhs, rhs);
        let lhs = gram_mutate_right(&gram_mutate_right(&gram_mutate_right(&g, 0), 1), 0);
        let rhs = gram_mutate_right(&gram_mutate_right(&gram_mutate_right(&g, 1), 0), 1);
        assert_eq!(lhs, rhs);
    }
}
