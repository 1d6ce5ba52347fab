//! Property tests over randomized diagrams and matrices.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use proptest::prelude::*;

use cruxkh::diagram::{braid_closure, Diagram, VertexKind};
use cruxkh::exactalg::{snf_invariant_factors, SparseMat, GF, ZZ};
use cruxkh::frobenius::FrobParams;
use cruxkh::khovanov::kh_complex;
use cruxkh::smoothing::{effective_range, enumerate_resolutions, saddle, smooth, SaddleDescriptor};

fn arb_braid() -> impl Strategy<Value = Diagram> {
    let letter = (0usize..2, prop::bool::ANY);
    prop::collection::vec(letter, 1..5).prop_map(|word| {
        let letters: Vec<(usize, VertexKind)> = word
            .into_iter()
            .map(|(i, pos)| {
                (
                    i,
                    if pos {
                        VertexKind::Pos
                    } else {
                        VertexKind::Neg
                    },
                )
            })
            .collect();
        braid_closure(3, &letters)
    })
}

fn arb_zmat() -> impl Strategy<Value = SparseMat<ZZ>> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
        prop::collection::vec(-4i64..5, r * c).prop_map(move |vals| {
            SparseMat::from_triplets(
                ZZ,
                r,
                c,
                vals.iter()
                    .enumerate()
                    .map(|(k, v)| (k / c, k % c, BigInt::from(*v))),
            )
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parse_serialize_round_trip(d in arb_braid()) {
        let text = d.serialize();
        let back = Diagram::parse(&text).unwrap();
        prop_assert_eq!(&d, &back);
        prop_assert_eq!(text, back.serialize());
    }

    #[test]
    fn snf_stable_under_unimodular_ops(m in arb_zmat(), seed in 0u64..1000) {
        let before = snf_invariant_factors(&m);
        // apply a few deterministic row/column operations derived from seed
        let mut trip: Vec<(usize, usize, BigInt)> =
            m.entries().map(|(r, c, v)| (r, c, v.clone())).collect();
        let (rows, cols) = (m.rows(), m.cols());
        let mut s = seed;
        for _ in 0..3 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let kind = s % 2;
            if kind == 0 && rows >= 2 {
                let a = (s / 2) as usize % rows;
                let b = (s / 7) as usize % rows;
                if a != b {
                    // row_a += 2 row_b
                    let extra: Vec<_> = trip
                        .iter()
                        .filter(|(r, _, _)| *r == b)
                        .map(|(_, c, v)| (a, *c, v * 2))
                        .collect();
                    trip.extend(extra);
                }
            } else if cols >= 2 {
                let a = (s / 3) as usize % cols;
                let b = (s / 11) as usize % cols;
                if a != b {
                    let extra: Vec<_> = trip
                        .iter()
                        .filter(|(_, c, _)| *c == b)
                        .map(|(r, _, v)| (*r, a, -v))
                        .collect();
                    trip.extend(extra);
                }
            }
        }
        let m2 = SparseMat::from_triplets(ZZ, rows, cols, trip);
        prop_assert_eq!(before, snf_invariant_factors(&m2));
    }

    #[test]
    fn saddles_change_circles_by_one(d in arb_braid()) {
        let vertices: Vec<u32> = d.vertices.iter().map(|v| v.id).collect();
        for alpha in enumerate_resolutions(&d, &vertices) {
            for v in &d.vertices {
                let (_, hi) = effective_range(v.kind);
                if alpha[&v.id] >= hi {
                    continue;
                }
                let src = smooth(&d, &alpha).unwrap();
                let sd = saddle(&d, &alpha, v.id).unwrap();
                let mut next = alpha.clone();
                *next.get_mut(&v.id).unwrap() += 1;
                let tgt = smooth(&d, &next).unwrap();
                match sd {
                    SaddleDescriptor::Merge { .. } =>
                        prop_assert_eq!(src.n_circles, tgt.n_circles + 1),
                    SaddleDescriptor::Split { .. } =>
                        prop_assert_eq!(src.n_circles + 1, tgt.n_circles),
                }
            }
        }
    }

    #[test]
    fn universal_coefficients_fp(d in arb_braid(), p in prop::sample::select(vec![2u64, 3, 5])) {
        // dim_Fp H^i = rank_Z H^i + #p-torsion(H^i) + #p-torsion(H^{i+1})
        let hz = kh_complex(&d, &FrobParams::new(ZZ, 0, 0)).unwrap().homology();
        let hp = kh_complex(&d, &FrobParams::new(GF::new(p).unwrap(), 0, 0))
            .unwrap()
            .homology();
        let p_big = BigInt::from(p);
        let torsion_p = |i: i64| -> usize {
            hz.get(&i)
                .map(|h| {
                    h.torsion
                        .iter()
                        .filter(|t| (*t % &p_big) == BigInt::from(0))
                        .count()
                })
                .unwrap_or(0)
        };
        let degrees: std::collections::BTreeSet<i64> =
            hz.keys().chain(hp.keys()).cloned().collect();
        for i in degrees {
            let expected = hz.get(&i).map(|h| h.free_rank).unwrap_or(0)
                + torsion_p(i)
                + torsion_p(i + 1);
            let got = hp.get(&i).map(|h| h.free_rank).unwrap_or(0);
            prop_assert_eq!(got, expected, "degree {} over F{}", i, p);
        }
    }

    #[test]
    fn euler_characteristic_matches_cube(d in arb_braid()) {
        let cube = cruxkh::khovanov::build_cube(&d, &FrobParams::new(ZZ, 0, 0)).unwrap();
        let cx = cruxkh::mcomplex::tot(&cube.mc).unwrap();
        let mut chi = 0i64;
        for i in cx.degrees() {
            let s = cx.dim(i) as i64;
            chi += if i.rem_euclid(2) == 0 { s } else { -s };
        }
        prop_assert_eq!(chi, cruxkh::khovanov::euler_characteristic(&cube));
    }

    #[test]
    fn jones_r1_invariance(d in arb_braid()) {
        let base = cruxkh::jones::kauffman_state_sum(&d).unwrap();
        let e = d.vertices[0].ports[0];
        for sign in [VertexKind::Pos, VertexKind::Neg] {
            let v = cruxkh::diagram::r1_variant(&d, e, sign);
            prop_assert_eq!(
                &cruxkh::jones::kauffman_state_sum(&v).unwrap(),
                &base
            );
        }
    }
}

#[test]
fn tot_always_squares_to_zero_on_random_cubes() {
    // sampled deterministically rather than via proptest: the cube builder
    // asserts d^2 = 0 internally, so reaching homology means it held
    let words: Vec<Vec<(usize, VertexKind)>> = vec![
        vec![(0, VertexKind::Pos), (1, VertexKind::Neg)],
        vec![
            (0, VertexKind::Neg),
            (1, VertexKind::Neg),
            (0, VertexKind::Pos),
        ],
        vec![
            (1, VertexKind::Pos),
            (1, VertexKind::Pos),
            (0, VertexKind::Neg),
        ],
    ];
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for w in words {
        let d = braid_closure(3, &w);
        let cx = kh_complex(&d, &FrobParams::new(ZZ, 0, 0)).unwrap();
        cx.verify().unwrap();
        seen.insert(d.serialize(), cx.total_rank());
    }
    assert_eq!(seen.len(), 3);
}
