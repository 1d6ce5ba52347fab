//! Brute-force bigraded Khovanov homology at (h, t) = (0, 0) over Z,
//! independent of the production pipeline: its own resolution enumerator,
//! its own circle walker, the lambda sign convention (signs from entries
//! *below* the stepped direction instead of above), hand-written local maps
//! and dense textbook linear algebra over BigInt.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use cruxkh::diagram::{Diagram, VertexKind};

type State = Vec<i32>;

fn ranges(d: &Diagram) -> Vec<(i32, i32)> {
    d.vertices
        .iter()
        .map(|v| match v.kind {
            VertexKind::Dbl => (-2, 1),
            VertexKind::Neg => (-1, 0),
            VertexKind::Pos => (0, 1),
        })
        .collect()
}

fn enumerate_states(d: &Diagram) -> Vec<State> {
    let rs = ranges(d);
    let mut out: Vec<State> = vec![Vec::new()];
    for (lo, hi) in rs {
        let mut next = Vec::new();
        for s in &out {
            for a in lo..=hi {
                let mut s2 = s.clone();
                s2.push(a);
                next.push(s2);
            }
        }
        out = next;
    }
    out
}

fn wide(kind: VertexKind, a: i32) -> bool {
    match kind {
        VertexKind::Dbl => a == -2 || a == 1,
        VertexKind::Neg => a == -1,
        VertexKind::Pos => a == 1,
    }
}

/// Circles as sorted lists of (vertex index, slot); own walker.
fn circles(d: &Diagram, s: &State) -> Vec<Vec<(usize, usize)>> {
    let n = d.vertices.len();
    // next-slot map: follow the edge at (v, slot), then the local pairing
    let mut edge_other: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    let mut by_edge: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for (vi, v) in d.vertices.iter().enumerate() {
        for slot in 0..4 {
            by_edge.entry(v.ports[slot]).or_default().push((vi, slot));
        }
    }
    for ends in by_edge.values() {
        edge_other.insert(ends[0], ends[1]);
        edge_other.insert(ends[1], ends[0]);
    }
    let pair = |vi: usize, slot: usize| -> usize {
        let w = wide(d.vertices[vi].kind, s[vi]);
        match (w, slot) {
            (true, 0) => 1,
            (true, 1) => 0,
            (true, 2) => 3,
            (true, 3) => 2,
            (false, 0) => 2,
            (false, 2) => 0,
            (false, 1) => 3,
            (false, 3) => 1,
            _ => unreachable!("slots are 0..4"),
        }
    };
    let mut seen = vec![[false; 4]; n];
    let mut out = Vec::new();
    for vi in 0..n {
        for slot in 0..4 {
            if seen[vi][slot] {
                continue;
            }
            let mut comp = Vec::new();
            let mut cur = (vi, slot);
            loop {
                if seen[cur.0][cur.1] {
                    break;
                }
                seen[cur.0][cur.1] = true;
                comp.push(cur);
                let far = edge_other[&cur];
                if !seen[far.0][far.1] {
                    seen[far.0][far.1] = true;
                    comp.push(far);
                }
                cur = (far.0, pair(far.0, far.1));
            }
            comp.sort();
            out.push(comp);
        }
    }
    out.sort();
    out
}

/// Dense integer matrix.
#[derive(Clone)]
pub struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<Vec<BigInt>>,
}

impl Dense {
    fn zero(rows: usize, cols: usize) -> Self {
        Dense {
            rows,
            cols,
            a: vec![vec![BigInt::zero(); cols]; rows],
        }
    }

    pub fn rank(&self) -> usize {
        // fraction-free Gaussian elimination
        let mut a = self.a.clone();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..self.cols {
            let piv = (row..self.rows).find(|r| !a[*r][col].is_zero());
            let piv = match piv {
                Some(p) => p,
                None => continue,
            };
            a.swap(row, piv);
            for r in (row + 1)..self.rows {
                if a[r][col].is_zero() {
                    continue;
                }
                let (p, q) = (a[row][col].clone(), a[r][col].clone());
                for c in col..self.cols {
                    let val = &a[r][c] * &p - &a[row][c] * &q;
                    a[r][c] = val;
                }
                // keep entries small-ish
                let g = a[r][col..].iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
                if g.abs() > BigInt::from(1) {
                    for c in col..self.cols {
                        a[r][c] = &a[r][c] / &g;
                    }
                }
            }
            rank += 1;
            row += 1;
            if row == self.rows {
                break;
            }
        }
        rank
    }

    /// Textbook Smith normal form diagonal (nonzero entries).
    pub fn snf(&self) -> Vec<BigInt> {
        let mut a = self.a.clone();
        let (nr, nc) = (self.rows, self.cols);
        let mut top = 0;
        let mut left = 0;
        let mut diag = Vec::new();
        while top < nr && left < nc {
            let mut best: Option<(usize, usize)> = None;
            for r in top..nr {
                for c in left..nc {
                    if !a[r][c].is_zero()
                        && best
                            .map(|(br, bc)| a[r][c].abs() < a[br][bc].abs())
                            .unwrap_or(true)
                    {
                        best = Some((r, c));
                    }
                }
            }
            let (pr, pc) = match best {
                Some(p) => p,
                None => break,
            };
            a.swap(top, pr);
            for row in a.iter_mut() {
                row.swap(left, pc);
            }
            let pval = a[top][left].clone();
            let mut dirty = false;
            for r in (top + 1)..nr {
                if !a[r][left].is_zero() {
                    let q = div_round(&a[r][left], &pval);
                    for c in left..nc {
                        let d = &q * &a[top][c];
                        a[r][c] = &a[r][c] - d;
                    }
                    if !a[r][left].is_zero() {
                        dirty = true;
                    }
                }
            }
            for c in (left + 1)..nc {
                if !a[top][c].is_zero() {
                    let q = div_round(&a[top][c], &pval);
                    for r in top..nr {
                        let d = &q * &a[r][left];
                        a[r][c] = &a[r][c] - d;
                    }
                    if !a[top][c].is_zero() {
                        dirty = true;
                    }
                }
            }
            if !dirty {
                diag.push(a[top][left].abs());
                top += 1;
                left += 1;
            }
        }
        // divisibility chain
        loop {
            let mut done = true;
            for i in 0..diag.len() {
                for j in (i + 1)..diag.len() {
                    if !(diag[j].clone() % &diag[i]).is_zero() {
                        let g = diag[i].gcd(&diag[j]);
                        let l = &diag[i] * &diag[j] / &g;
                        diag[i] = g;
                        diag[j] = l;
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        diag.sort();
        diag
    }
}

fn div_round(x: &BigInt, m: &BigInt) -> BigInt {
    let (q, r) = x.div_rem(m);
    if r.abs() * 2 > m.abs() {
        if (x * m).sign() == num_bigint::Sign::Minus {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

// local (0,0) maps on basis labels: false = 1, true = x
fn mu00(a: bool, b: bool) -> Vec<(bool, i64)> {
    match (a, b) {
        (false, false) => vec![(false, 1)],
        (true, true) => vec![],
        _ => vec![(true, 1)],
    }
}
fn delta00(a: bool) -> Vec<((bool, bool), i64)> {
    if a {
        vec![((true, true), 1)]
    } else {
        vec![((false, true), 1), ((true, false), 1)]
    }
}
fn phi00(a: bool, b: bool) -> Vec<((bool, bool), i64)> {
    // Phi = (Delta - mu Delta (x) eta)(mu - mu Delta (x) eps) at h = t = 0
    match (a, b) {
        (false, false) => vec![((false, true), 1), ((true, false), -1)],
        (true, false) => vec![((true, true), 1)],
        (false, true) => vec![((true, true), -1)],
        (true, true) => vec![],
    }
}

/// Bigraded homology over Z at (0,0) by direct kernel/image computation:
/// `(free rank, invariant factors > 1)` per `(i, j)`.
pub fn kh_bigraded(d: &Diagram) -> BTreeMap<(i64, i64), (usize, Vec<BigInt>)> {
    let states = enumerate_states(d);
    let w_tilde = d.stats().w_tilde;
    // basis: per state, circle count n -> 2^n monomials (bit = x)
    struct Block {
        state: State,
        circ: Vec<Vec<(usize, usize)>>,
        degree: i64,
        q_alpha: i64,
    }
    let mut blocks: Vec<Block> = Vec::new();
    for s in states {
        let circ = circles(d, &s);
        let degree: i64 = s.iter().map(|x| *x as i64).sum();
        let q_alpha: i64 = d
            .vertices
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let a = s[k] as i64;
                if v.kind == VertexKind::Dbl && a < 0 {
                    a - 1
                } else {
                    a
                }
            })
            .sum();
        blocks.push(Block {
            state: s,
            circ,
            degree,
            q_alpha,
        });
    }
    // global basis identifiers: (block index, monomial mask) with (i, j)
    let n_free = d.free_loops;
    let mut basis: BTreeMap<(i64, i64), Vec<(usize, u64)>> = BTreeMap::new();
    for (bi, b) in blocks.iter().enumerate() {
        let n = b.circ.len() + n_free;
        for mask in 0..(1u64 << n) {
            let deg_m = n as i64 - 2 * mask.count_ones() as i64;
            let j = deg_m + b.q_alpha + w_tilde;
            basis.entry((b.degree, j)).or_default().push((bi, mask));
        }
    }
    let index_of: BTreeMap<(usize, u64), ((i64, i64), usize)> = basis
        .iter()
        .flat_map(|(k, v)| {
            v.iter()
                .enumerate()
                .map(move |(pos, b)| (*b, (*k, pos)))
                .collect::<Vec<_>>()
        })
        .collect();

    // differential entries: for each block and direction
    let block_index: BTreeMap<State, usize> = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| (b.state.clone(), i))
        .collect();
    let mut mats: BTreeMap<(i64, i64), Dense> = BTreeMap::new();
    for (k, v) in &basis {
        let rows = basis.get(&(k.0 + 1, k.1)).map(|x| x.len()).unwrap_or(0);
        mats.insert(*k, Dense::zero(rows, v.len()));
    }
    for (bi, b) in blocks.iter().enumerate() {
        for (k, vert) in d.vertices.iter().enumerate() {
            let hi = match vert.kind {
                VertexKind::Dbl => 1,
                VertexKind::Neg => 0,
                VertexKind::Pos => 1,
            };
            if b.state[k] >= hi {
                continue;
            }
            let mut s2 = b.state.clone();
            s2[k] += 1;
            let ti = block_index[&s2];
            let t = &blocks[ti];
            // lambda sign: entries before position k
            let lam: i64 = if b.state[..k]
                .iter()
                .map(|x| *x as i64)
                .sum::<i64>()
                .rem_euclid(2)
                == 0
            {
                1
            } else {
                -1
            };
            // row sign per the multicomplex tables
            let row_sign: i64 = match vert.kind {
                VertexKind::Neg => 1,
                VertexKind::Pos => -1,
                VertexKind::Dbl => {
                    if b.state[k] == -1 {
                        1 // Phi edge carries its own signs
                    } else {
                        -1
                    }
                }
            };
            let n_src = b.circ.len();
            let n_tgt = t.circ.len();
            // circle correspondence by shared (vertex, slot) membership away from k
            let find_tgt = |src_circle: usize| -> Option<usize> {
                let rep = b.circ[src_circle].iter().find(|(v2, _)| *v2 != k)?;
                t.circ.iter().position(|c| c.contains(rep))
            };
            let src_at = |slot: usize| b.circ.iter().position(|c| c.contains(&(k, slot))).unwrap();
            let tgt_at = |slot: usize| t.circ.iter().position(|c| c.contains(&(k, slot))).unwrap();
            let is_phi = vert.kind == VertexKind::Dbl && b.state[k] == -1;
            for mask in 0..(1u64 << (n_src + n_free)) {
                let label = |c: usize| mask & (1 << c) != 0;
                let mut terms: Vec<(u64, i64)> = Vec::new();
                if is_phi {
                    let cm = src_at(2); // circle through out_l
                    let ca = src_at(3);
                    if cm == ca {
                        continue;
                    }
                    let rest = mask & !(1 << cm) & !(1 << ca);
                    for ((om, oa), c) in phi00(label(cm), label(ca)) {
                        let mut out = rest;
                        if om {
                            out |= 1 << cm;
                        }
                        if oa {
                            out |= 1 << ca;
                        }
                        terms.push((out, c));
                    }
                } else {
                    // merge or split by membership
                    let pairs_wide = wide(vert.kind, b.state[k]);
                    let (s1, s2s) = if pairs_wide { (0, 2) } else { (0, 1) };
                    let c1 = src_at(s1);
                    let c2 = src_at(s2s);
                    let carry = |m: u64, skip: &[usize], tcount: usize| -> u64 {
                        let mut out = 0u64;
                        for tc in 0..tcount {
                            if skip.contains(&tc) {
                                continue;
                            }
                            // shared representative
                            let rep = t.circ[tc].iter().find(|(v2, _)| *v2 != k).unwrap();
                            let sc = b.circ.iter().position(|c| c.contains(rep)).unwrap();
                            if m & (1 << sc) != 0 {
                                out |= 1 << tc;
                            }
                        }
                        // free loops occupy the high bits in both
                        for fl in 0..n_free {
                            if m & (1 << (n_src + fl)) != 0 {
                                out |= 1 << (n_tgt + fl);
                            }
                        }
                        out
                    };
                    if c1 != c2 {
                        // merge
                        let tc = tgt_at(0);
                        let base = carry(mask, &[tc], n_tgt);
                        for (o, c) in mu00(label(c1), label(c2)) {
                            let mut out = base;
                            if o {
                                out |= 1 << tc;
                            }
                            terms.push((out, c));
                        }
                    } else {
                        let pairs_wide_t = wide(vert.kind, s2[k]);
                        let (t1s, t2s) = if pairs_wide_t { (0, 2) } else { (0, 1) };
                        let t1 = tgt_at(t1s);
                        let t2 = tgt_at(t2s);
                        let base = carry(mask, &[t1, t2], n_tgt);
                        for ((o1, o2), c) in delta00(label(c1)) {
                            let mut out = base;
                            if o1 {
                                out |= 1 << t1;
                            }
                            if o2 {
                                out |= 1 << t2;
                            }
                            terms.push((out, c));
                        }
                    }
                }
                let (src_key, src_pos) = index_of[&(bi, mask)];
                for (out_mask, coeff) in terms {
                    let (tgt_key, tgt_pos) = index_of[&(ti, out_mask)];
                    assert_eq!(tgt_key.0, src_key.0 + 1);
                    assert_eq!(tgt_key.1, src_key.1, "j-degree preserved");
                    let m = mats.get_mut(&src_key).unwrap();
                    let v = coeff * lam * row_sign;
                    m.a[tgt_pos][src_pos] += BigInt::from(v);
                }
            }
        }
    }
    // d^2 = 0 sanity on the oracle's own matrices
    for (k, m) in &mats {
        if let Some(next) = mats.get(&(k.0 + 1, k.1)) {
            for c in 0..m.cols {
                let mut col = vec![BigInt::zero(); m.rows];
                for r in 0..m.rows {
                    col[r] = m.a[r][c].clone();
                }
                for r2 in 0..next.rows {
                    let mut acc = BigInt::zero();
                    for r in 0..m.rows {
                        acc += &next.a[r2][r] * &col[r];
                    }
                    assert!(acc.is_zero(), "oracle d^2 != 0");
                }
            }
        }
    }
    // homology per (i, j)
    let mut out = BTreeMap::new();
    for (k, v) in &basis {
        let dim = v.len();
        let d_out_rank = mats[k].rank();
        let (d_in_rank, torsion) = match mats.get(&(k.0 - 1, k.1)) {
            Some(m) => {
                let f = m.snf();
                let rank = f.len();
                (
                    rank,
                    f.into_iter()
                        .filter(|x| x.abs() > BigInt::from(1))
                        .collect::<Vec<_>>(),
                )
            }
            None => (0, Vec::new()),
        };
        let free = dim - d_out_rank - d_in_rank;
        if free > 0 || !torsion.is_empty() {
            out.insert(*k, (free, torsion));
        }
    }
    out
}
