//! The TQFT-evaluated cube of smoothings of a singular diagram, the
//! universal Khovanov complex, and the genus-one chain map with its skein
//! cone.
//!
//! Crossing rows of the cube are two-term saddles (`delta_-` unsigned on
//! negative crossings, `-delta_+` on positive ones); double-point rows are
//! the four-term sequence `-delta_-, Phi, -delta_+`. The local `Phi` acts on
//! the two circles through the double point, the module factor being the
//! circle through the `out_l` strand, and vanishes when both strands lie on
//! one circle.

use std::collections::BTreeMap;

use crate::diagram::{Diagram, VertexId, VertexKind, OUT_L, OUT_R};
use crate::exactalg::{Ring, SparseMat};
use crate::frobenius::FrobParams;
use crate::mcomplex::{
    cone_decomposition, tot, ChainComplex, ComplexError, ConeDecomposition, MIndex, MObject,
    MultiComplex,
};
use crate::smoothing::{
    check_range, effective_range, enumerate_resolutions, gradings, smooth, ResolutionMap,
    SaddleDescriptor, SmoothError, Smoothing,
};

use thiserror::Error;

#[derive(Error, Debug)]
pub enum KhError {
    #[error(transparent)]
    Smooth(#[from] SmoothError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Diagram(#[from] crate::diagram::DiagramError),
}

/// Which Frobenius operation a transition applies, with circle roles
/// resolved. Merge-shaped ops take two source circles to one target circle,
/// split-shaped ops the reverse; `Phi` and `EtaEps` are endomorphisms.
#[derive(Clone, Debug)]
pub enum CircleOp {
    MergePlain(SaddleDescriptor),
    SplitPlain(SaddleDescriptor),
    /// Twisted action: `module_src` carries the twisted arc.
    MergeTwisted {
        sd: SaddleDescriptor,
        module_src: usize,
    },
    /// Twisted coaction: `module_tgt` is the output with the twisted arc.
    SplitTwisted {
        sd: SaddleDescriptor,
        module_tgt: usize,
    },
    /// Genus-one endomorphism on circles `(module, acting)` of one smoothing.
    Phi {
        module: usize,
        acting: usize,
    },
    /// Contraction piece `id (x) eps`: cap the non-module source circle,
    /// the module circle continuing into the merged target.
    CapActing {
        sd: SaddleDescriptor,
        module_src: usize,
    },
    /// Contraction piece `id (x) eta`: the module circle continues into
    /// `module_tgt`, the other target circle is born with label 1.
    BirthActing {
        sd: SaddleDescriptor,
        module_tgt: usize,
    },
    /// Contraction piece `id (x) eta.eps` on one smoothing.
    EtaEps {
        module: usize,
        acting: usize,
    },
    Zero,
}

/// Matrix of a circle operation between two smoothings. `corr` maps each
/// target circle not produced by the operation to its source circle.
pub fn op_matrix<R: Ring>(
    p: &FrobParams<R>,
    src: &Smoothing,
    tgt: &Smoothing,
    corr: &[Option<usize>],
    op: &CircleOp,
) -> SparseMat<R> {
    let ring = p.ring.clone();
    let n_src = src.n_circles;
    let n_tgt = tgt.n_circles;
    let rows = 1usize << n_tgt;
    let cols = 1usize << n_src;
    let mut trip: Vec<(usize, usize, R::Elem)> = Vec::new();

    let carry = |mask: usize, skip_tgt: &[usize]| -> usize {
        let mut out = 0usize;
        for (tc, oc) in corr.iter().enumerate() {
            if skip_tgt.contains(&tc) {
                continue;
            }
            let sc = oc.expect("correspondence defined for untouched circle");
            if mask & (1 << sc) != 0 {
                out |= 1 << tc;
            }
        }
        out
    };

    match op {
        CircleOp::Zero => {}
        CircleOp::Phi { module, acting } | CircleOp::EtaEps { module, acting } => {
            debug_assert_eq!(n_src, n_tgt);
            let etaeps = matches!(op, CircleOp::EtaEps { .. });
            for mask in 0..cols {
                let a = mask & (1 << module) != 0;
                let b = mask & (1 << acting) != 0;
                let rest = mask & !(1 << module) & !(1 << acting);
                let terms = if etaeps {
                    // a (x) b -> eps(b) a (x) 1
                    if b {
                        vec![((a, false), p.ring.one())]
                    } else {
                        vec![]
                    }
                } else {
                    p.phi_basis(a, b)
                };
                for ((oa, ob), c) in terms {
                    let mut out = rest;
                    if oa {
                        out |= 1 << module;
                    }
                    if ob {
                        out |= 1 << acting;
                    }
                    trip.push((out, mask, c));
                }
            }
        }
        CircleOp::MergePlain(sd)
        | CircleOp::MergeTwisted { sd, .. }
        | CircleOp::CapActing { sd, .. } => {
            let (src_a, src_b, t) = match sd {
                SaddleDescriptor::Merge { src_a, src_b, tgt } => (*src_a, *src_b, *tgt),
                _ => unreachable!("merge-shaped op with split descriptor"),
            };
            let (m_src, o_src) = match op {
                CircleOp::MergeTwisted { module_src, .. }
                | CircleOp::CapActing { module_src, .. } => {
                    let other = if *module_src == src_a { src_b } else { src_a };
                    (*module_src, other)
                }
                _ => (src_a, src_b),
            };
            for mask in 0..cols {
                let a = mask & (1 << m_src) != 0;
                let b = mask & (1 << o_src) != 0;
                let base = carry(mask, &[t]);
                let terms = match op {
                    CircleOp::MergeTwisted { .. } => p.twisted_mu_basis(a, b),
                    CircleOp::CapActing { .. } => {
                        // eps on the acting circle, module label carried
                        if b {
                            vec![(a, p.ring.one())]
                        } else {
                            vec![]
                        }
                    }
                    _ => p.mu_basis(a, b),
                };
                for (o, c) in terms {
                    let mut out = base;
                    if o {
                        out |= 1 << t;
                    }
                    trip.push((out, mask, c));
                }
            }
        }
        CircleOp::SplitPlain(sd)
        | CircleOp::SplitTwisted { sd, .. }
        | CircleOp::BirthActing { sd, .. } => {
            let (s, t1, t2) = match sd {
                SaddleDescriptor::Split { src, tgt_a, tgt_b } => (*src, *tgt_a, *tgt_b),
                _ => unreachable!("split-shaped op with merge descriptor"),
            };
            let (t_mod, t_act) = match op {
                CircleOp::SplitTwisted { module_tgt, .. }
                | CircleOp::BirthActing { module_tgt, .. } => {
                    let other = if *module_tgt == t1 { t2 } else { t1 };
                    (*module_tgt, other)
                }
                _ => (t1, t2),
            };
            for mask in 0..cols {
                let a = mask & (1 << s) != 0;
                let base = carry(mask, &[t_mod, t_act]);
                let terms = match op {
                    CircleOp::SplitTwisted { .. } => p.twisted_delta_basis(a),
                    CircleOp::BirthActing { .. } => {
                        // a -> a (x) 1
                        vec![((a, false), p.ring.one())]
                    }
                    _ => p.delta_basis(a),
                };
                for ((om, oa), c) in terms {
                    let mut out = base;
                    if om {
                        out |= 1 << t_mod;
                    }
                    if oa {
                        out |= 1 << t_act;
                    }
                    trip.push((out, mask, c));
                }
            }
        }
    }
    SparseMat::from_triplets(ring, rows, cols, trip)
}

/// The evaluated cube of smoothings.
pub struct Cube<R: Ring> {
    pub diagram: Diagram,
    pub params: FrobParams<R>,
    /// Direction order used for sign conventions (vertex ids).
    pub directions: Vec<VertexId>,
    pub mc: MultiComplex<R>,
    pub smoothings: BTreeMap<MIndex, Smoothing>,
}

fn to_mindex(directions: &[VertexId], alpha: &ResolutionMap) -> MIndex {
    directions.iter().map(|v| alpha[v]).collect()
}

/// Build the cube with an explicit direction order. `phi_sign` scales the
/// double-point middle map (used by the sign-robustness check).
pub fn build_cube_with_order<R: Ring>(
    d: &Diagram,
    params: &FrobParams<R>,
    directions: &[VertexId],
    phi_sign: i64,
) -> Result<Cube<R>, KhError> {
    let ring = params.ring.clone();
    let w_tilde = d.stats().w_tilde;
    let graded = params.graded();
    let minus_one = ring.neg(&ring.one());

    let mut objects = BTreeMap::new();
    let mut smoothings = BTreeMap::new();
    for alpha in enumerate_resolutions(d, directions) {
        check_range(d, &alpha)?;
        let sm = smooth(d, &alpha)?;
        let idx = to_mindex(directions, &alpha);
        let n = sm.n_circles;
        let qlabels = graded.then(|| {
            let gr = gradings(d, &alpha).expect("in range");
            (0..1u64 << n)
                .map(|mask| FrobParams::<R>::quantum_degree(mask, n) + gr.q_alpha + w_tilde)
                .collect()
        });
        objects.insert(
            idx.clone(),
            MObject {
                dim: 1usize << n,
                qlabels,
                _ring: Default::default(),
            },
        );
        smoothings.insert(idx, sm);
    }

    let mut diffs = BTreeMap::new();
    for (idx, src_sm) in &smoothings {
        for (k, vid) in directions.iter().enumerate() {
            let vert = d.vertex(*vid)?;
            let a = idx[k];
            let (_, hi) = effective_range(vert.kind);
            if a >= hi {
                continue;
            }
            let mut nidx = idx.clone();
            nidx[k] += 1;
            let tgt_sm = &smoothings[&nidx];
            // choose the operation and its sign per the row tables
            let (op, sign): (CircleOp, i64) = if vert.kind == VertexKind::Dbl && a == -1 {
                // Phi edge: both smoothings are the V state; module factor is
                // the circle through the out_l strand
                let c_mod = src_sm.circle_of_slot[&(*vid, OUT_L)];
                let c_act = src_sm.circle_of_slot[&(*vid, OUT_R)];
                if c_mod == c_act {
                    (CircleOp::Zero, 1)
                } else {
                    (
                        CircleOp::Phi {
                            module: c_mod,
                            acting: c_act,
                        },
                        phi_sign,
                    )
                }
            } else {
                let sd = crate::smoothing::saddle_between(src_sm, tgt_sm, d, *vid)?;
                let op = match sd {
                    SaddleDescriptor::Merge { .. } => CircleOp::MergePlain(sd),
                    SaddleDescriptor::Split { .. } => CircleOp::SplitPlain(sd),
                };
                let sign = match vert.kind {
                    VertexKind::Neg => 1,
                    VertexKind::Pos => -1,
                    // double point saddles -2 -> -1 and 0 -> 1 carry -delta
                    VertexKind::Dbl => -1,
                };
                (op, sign)
            };
            let corr = if matches!(op, CircleOp::Phi { .. } | CircleOp::Zero) {
                // identity correspondence away from the two Phi circles; for
                // Zero the matrix is empty anyway
                (0..tgt_sm.n_circles).map(Some).collect::<Vec<_>>()
            } else {
                crate::smoothing::circle_correspondence(src_sm, tgt_sm, *vid)
            };
            let mut m = match op {
                CircleOp::Zero => SparseMat::zero(
                    ring.clone(),
                    1usize << tgt_sm.n_circles,
                    1usize << src_sm.n_circles,
                ),
                CircleOp::Phi { .. } => op_matrix(params, src_sm, src_sm, &corr, &op),
                _ => op_matrix(params, src_sm, tgt_sm, &corr, &op),
            };
            if sign == -1 {
                m = m.scale(&minus_one);
            } else if sign != 1 {
                m = m.scale(&ring.from_i64(sign));
            }
            diffs.insert((idx.clone(), k), m);
        }
    }
    let mc = MultiComplex {
        ring,
        directions: directions.to_vec(),
        objects,
        diffs,
    };
    mc.verify()?;
    Ok(Cube {
        diagram: d.clone(),
        params: params.clone(),
        directions: directions.to_vec(),
        mc,
        smoothings,
    })
}

/// Cube with the default direction order (ascending vertex id).
pub fn build_cube<R: Ring>(d: &Diagram, params: &FrobParams<R>) -> Result<Cube<R>, KhError> {
    let dirs: Vec<VertexId> = d.vertices.iter().map(|v| v.id).collect();
    build_cube_with_order(d, params, &dirs, 1)
}

/// The universal Khovanov complex: total complex of the cube, quantum-graded
/// when `h = t = 0`.
pub fn kh_complex<R: Ring>(
    d: &Diagram,
    params: &FrobParams<R>,
) -> Result<ChainComplex<R>, KhError> {
    let cube = build_cube(d, params)?;
    Ok(tot(&cube.mc)?)
}

/// The genus-one chain map at a negative crossing `v` of `d_minus`, together
/// with the skein-cone data: `Cone(phi_hat)` is isomorphic to the complex of
/// the doubled diagram via the recorded witness.
pub struct PhiHat<R: Ring> {
    pub doubled: Diagram,
    pub d_plus: Diagram,
    pub dec: ConeDecomposition<R>,
}

pub fn phi_hat<R: Ring>(
    d_minus: &Diagram,
    v: VertexId,
    params: &FrobParams<R>,
) -> Result<PhiHat<R>, KhError> {
    let vert = d_minus.vertex(v)?;
    if vert.kind != VertexKind::Neg {
        return Err(KhError::Diagram(
            crate::diagram::DiagramError::WrongVertexKind(v),
        ));
    }
    let doubled = crate::diagram::make_double(d_minus, v)?;
    let d_plus = crate::diagram::resolve_double(&doubled, v, VertexKind::Pos)?;
    let cube = build_cube(&doubled, params)?;
    let a0 = cube
        .directions
        .iter()
        .position(|x| *x == v)
        .expect("direction present");
    let dec = cone_decomposition(&cube.mc, a0, 0)?;
    // the shifted low part is literally the cube of d_minus, the high part
    // the cube of d_plus; cross-check the identification
    debug_assert_eq!(dec.source.dims, kh_complex(d_minus, params)?.dims);
    debug_assert_eq!(dec.target.dims, kh_complex(&d_plus, params)?.dims);
    Ok(PhiHat {
        doubled,
        d_plus,
        dec,
    })
}

/// Dimensions of the cube split by wide/V type at one vertex, used by tests.
pub fn euler_characteristic<R: Ring>(cube: &Cube<R>) -> i64 {
    let mut chi = 0i64;
    for (idx, sm) in &cube.smoothings {
        let deg: i64 = idx.iter().map(|x| *x as i64).sum();
        let dim = 1i64 << sm.n_circles;
        chi += if deg.rem_euclid(2) == 0 { dim } else { -dim };
    }
    chi
}
