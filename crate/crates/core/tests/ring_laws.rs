use proptest::prelude::*;
use vlwe::ring::{coord_mul_ntt, coord_mul_schoolbook, scale_round};
use vlwe::sampling::sample_uniform_elem;
use vlwe::{CoordPoly, DefiningPoly, Ring, RingElem, Sampler, VarietyParams};

fn ntt_ring() -> Ring {
    Ring::new(&VarietyParams::negacyclic(4, 16, 7681, 257, 3.2).unwrap()).unwrap()
}

/// Mixed coordinates: x^3 + 2x + 1, x^2 + 1 and x^4 + 1 over a prime-power modulus.
fn general_ring() -> Ring {
    let f = vec![
        DefiningPoly::new(vec![1, 2, 0, 1]).unwrap(),
        DefiningPoly::negacyclic(2),
        DefiningPoly::negacyclic(4),
    ];
    Ring::from_parts(f, 3u64.pow(7)).unwrap()
}

fn triple(ring: &Ring, seed: u64) -> (RingElem, RingElem, RingElem) {
    let mut rng = Sampler::from_u64(seed);
    (
        sample_uniform_elem(ring, &mut rng),
        sample_uniform_elem(ring, &mut rng),
        sample_uniform_elem(ring, &mut rng),
    )
}

fn check_laws(ring: &Ring, g: &RingElem, h: &RingElem, k: &RingElem) {
    let add = |a: &RingElem, b: &RingElem| ring.add(a, b).unwrap();
    let mul = |a: &RingElem, b: &RingElem| ring.mul(a, b).unwrap();
    assert_eq!(add(g, h), add(h, g));
    assert_eq!(mul(g, h), mul(h, g));
    assert_eq!(add(&add(g, h), k), add(g, &add(h, k)));
    assert_eq!(mul(&mul(g, h), k), mul(g, &mul(h, k)));
    assert_eq!(mul(g, &add(h, k)), add(&mul(g, h), &mul(g, k)));
    assert_eq!(add(g, &ring.zero()), *g);
    assert_eq!(mul(g, &ring.one()), *g);
    assert!(add(g, &ring.neg(g).unwrap()).is_zero());
    assert_eq!(add(&ring.sub(g, h).unwrap(), h), *g);
    for e in [add(g, h), mul(g, h)] {
        ring.check(&e).unwrap();
    }
}

/// Convolution followed by reduction with `x^d = -Σ f_j x^j`, written independently of
/// the library.
fn oracle_mul(a: &[u64], b: &[u64], f: &[i64], q: u64) -> Vec<u64> {
    let d = f.len() - 1;
    let q = q as i128;
    let mut prod = vec![0i128; 2 * d];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as i128 * y as i128) % q;
        }
    }
    for top in (d..2 * d).rev() {
        let c = prod[top];
        prod[top] = 0;
        for (j, &fj) in f[..d].iter().enumerate() {
            prod[top - d + j] = (prod[top - d + j] - c * fj as i128).rem_euclid(q);
        }
    }
    prod.truncate(d);
    prod.into_iter().map(|x| x.rem_euclid(q) as u64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn laws_hold_on_the_ntt_ring(seed in any::<u64>()) {
        let ring = ntt_ring();
        let (g, h, k) = triple(&ring, seed);
        check_laws(&ring, &g, &h, &k);
    }

    #[test]
    fn laws_hold_on_general_coordinates(seed in any::<u64>()) {
        let ring = general_ring();
        let (g, h, k) = triple(&ring, seed);
        check_laws(&ring, &g, &h, &k);
    }

    #[test]
    fn products_match_the_reduction_oracle(seed in any::<u64>()) {
        let ring = general_ring();
        let (g, h, _) = triple(&ring, seed);
        let prod = ring.mul(&g, &h).unwrap();
        for (i, f) in ring.defining_polys().iter().enumerate() {
            let want = oracle_mul(g.coord(i).coeffs(), h.coord(i).coeffs(), f.coeffs(), ring.modulus());
            prop_assert_eq!(prod.coord(i).coeffs(), &want[..]);
        }
    }

    #[test]
    fn ntt_equals_schoolbook(seed in any::<u64>(), log_d in 0u32..9) {
        let d = 1usize << log_d;
        let q = 7681;
        let ring = Ring::from_parts(vec![DefiningPoly::negacyclic(d)], q).unwrap();
        let (a, b, _) = triple(&ring, seed);
        let (a, b) = (a.coord(0), b.coord(0));
        let fast = coord_mul_ntt(a, b, q).unwrap();
        let slow = coord_mul_schoolbook(a, b, &DefiningPoly::negacyclic(d), q).unwrap();
        prop_assert_eq!(&fast, &slow);
        prop_assert_eq!(fast.coeffs(), &oracle_mul(a.coeffs(), b.coeffs(), DefiningPoly::negacyclic(d).coeffs(), q)[..]);
    }

    #[test]
    fn coordinates_are_independent(seed in any::<u64>(), j in 0usize..4) {
        let ring = ntt_ring();
        let (g, h, k) = triple(&ring, seed);
        // g2 differs from g only in coordinate j
        let mut coords: Vec<Vec<u64>> = g.coords().iter().map(|c| c.coeffs().to_vec()).collect();
        coords[j] = k.coord(j).coeffs().to_vec();
        let g2 = ring.from_coeffs(coords).unwrap();
        for (x, y) in [(ring.add(&g, &h).unwrap(), ring.add(&g2, &h).unwrap()), (ring.mul(&g, &h).unwrap(), ring.mul(&g2, &h).unwrap())] {
            for i in 0..4 {
                if i != j {
                    prop_assert_eq!(x.coord(i), y.coord(i));
                }
            }
        }
    }

    #[test]
    fn decomposition_round_trips(seed in any::<u64>()) {
        let ring = ntt_ring();
        let (g, h, _) = triple(&ring, seed);
        prop_assert_eq!(ring.recompose(ring.decompose(&g).unwrap()).unwrap(), g.clone());
        let (gs, hs) = (ring.decompose(&g).unwrap(), ring.decompose(&h).unwrap());
        let parts: Vec<CoordPoly> = (0..4).map(|i| ring.coord_mul(i, &gs[i], &hs[i])).collect();
        prop_assert_eq!(ring.recompose(parts).unwrap(), ring.mul(&g, &h).unwrap());
    }

    #[test]
    fn scale_round_matches_rational_rounding(seed in any::<u64>(), q_to in 2u64..7681) {
        let ring = ntt_ring();
        let (g, _, _) = triple(&ring, seed);
        let out = scale_round(&g, q_to).unwrap();
        for (ci, co) in g.coords().iter().zip(out.coords()) {
            for (&x, &y) in ci.coeffs().iter().zip(co.coeffs()) {
                let c = if x > 7681 / 2 { x as i64 - 7681 } else { x as i64 };
                // round(c·q_to/7681), halves away from -∞
                let num = 2 * c * q_to as i64 + 7681;
                let r = num.div_euclid(2 * 7681);
                prop_assert_eq!(y, r.rem_euclid(q_to as i64) as u64);
            }
        }
    }
}

#[test]
fn scale_round_examples() {
    let ring = Ring::from_parts(vec![DefiningPoly::negacyclic(2)], 16).unwrap();
    let e = ring.from_coeffs(vec![vec![7, 15]]).unwrap();
    assert_eq!(scale_round(&e, 4).unwrap().coord(0).coeffs(), &[2, 0]);
    assert!(scale_round(&ring.zero(), 4).unwrap().is_zero());
}
