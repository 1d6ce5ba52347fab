//! Exact coefficient rings, sparse matrices, Smith normal form, and
//! homology of a pair of composable boundary maps.
//!
//! Everything here is exact: integers are arbitrary precision, rationals are
//! exact fractions, and prime fields reduce modulo `p`. Matrices are stored
//! sparsely (column major); cube differentials are >= 90% zero, and integer
//! SNF intermediates can swell past any fixed width, hence `BigInt`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Coefficient ring selector, as exposed on the CLI.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RingKind {
    Integers,
    Rationals,
    PrimeField(u64),
}

impl RingKind {
    pub fn is_field(self) -> bool {
        !matches!(self, RingKind::Integers)
    }
}

impl fmt::Display for RingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingKind::Integers => write!(f, "Z"),
            RingKind::Rationals => write!(f, "Q"),
            RingKind::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AlgError {
    #[error("boundary maps do not compose: d_out has {out_cols} columns, d_in has {in_rows} rows")]
    DimensionMismatch { out_cols: usize, in_rows: usize },
    #[error("d_out . d_in != 0, not a chain complex at this degree")]
    CompositionNonzero,
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// A coefficient ring carried as a value, so prime fields can hold their
/// modulus at runtime.
pub trait Ring: Clone + Send + Sync + 'static {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn kind(&self) -> RingKind;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Multiplicative inverse; `None` when not invertible.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn is_field(&self) -> bool {
        self.kind().is_field()
    }

    /// Rank of a matrix over the fraction field.
    fn rank_of(&self, m: &SparseMat<Self>) -> usize;

    /// Rank together with the nontrivial invariant factors of the matrix
    /// viewed as a map of free modules (empty over a field).
    fn rank_and_torsion(&self, m: &SparseMat<Self>) -> (usize, Vec<BigInt>) {
        (self.rank_of(m), Vec::new())
    }
}

/// The integers, with arbitrary-precision elements.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZZ;

impl Ring for ZZ {
    type Elem = BigInt;

    fn kind(&self) -> RingKind {
        RingKind::Integers
    }
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn from_i64(&self, n: i64) -> BigInt {
        BigInt::from(n)
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn inv(&self, a: &BigInt) -> Option<BigInt> {
        if a.abs().is_one() {
            Some(a.clone())
        } else {
            None
        }
    }
    fn rank_of(&self, m: &SparseMat<Self>) -> usize {
        snf_invariant_factors(m).len()
    }
    fn rank_and_torsion(&self, m: &SparseMat<Self>) -> (usize, Vec<BigInt>) {
        let factors = snf_invariant_factors(m);
        let rank = factors.len();
        (rank, factors.into_iter().filter(|d| !d.is_one()).collect())
    }
}

/// The rationals.
#[derive(Clone, Copy, Debug, Default)]
pub struct QQ;

impl Ring for QQ {
    type Elem = BigRational;

    fn kind(&self) -> RingKind {
        RingKind::Rationals
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn rank_of(&self, m: &SparseMat<Self>) -> usize {
        field_rank(m)
    }
}

/// The prime field `F_p`, elements stored reduced in `0..p`.
#[derive(Clone, Copy, Debug)]
pub struct GF {
    p: u64,
}

impl GF {
    pub fn new(p: u64) -> Result<Self, AlgError> {
        if is_prime(p) {
            Ok(GF { p })
        } else {
            Err(AlgError::NotPrime(p))
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Ring for GF {
    type Elem = u64;

    fn kind(&self) -> RingKind {
        RingKind::PrimeField(self.p)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_i64(&self, n: i64) -> u64 {
        let p = self.p as i64;
        (((n % p) + p) % p) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b % self.p) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a % self.p) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        a % self.p == 0
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if self.is_zero(a) {
            return None;
        }
        let mut result = 1u64;
        let mut base = a % self.p;
        let mut e = self.p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        Some(result)
    }
    fn rank_of(&self, m: &SparseMat<Self>) -> usize {
        field_rank(m)
    }
}

/// Sparse matrix over `R`, column major, entries sorted by row, no stored zeros.
#[derive(Clone, Debug)]
pub struct SparseMat<R: Ring> {
    pub ring: R,
    rows: usize,
    cols: usize,
    col_data: Vec<Vec<(usize, R::Elem)>>,
}

impl<R: Ring> PartialEq for SparseMat<R> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.col_data == other.col_data
    }
}

impl<R: Ring> SparseMat<R> {
    pub fn zero(ring: R, rows: usize, cols: usize) -> Self {
        SparseMat {
            ring,
            rows,
            cols,
            col_data: vec![Vec::new(); cols],
        }
    }

    pub fn identity(ring: R, n: usize) -> Self {
        let mut m = SparseMat::zero(ring.clone(), n, n);
        for i in 0..n {
            m.col_data[i].push((i, ring.one()));
        }
        m
    }

    pub fn from_triplets(
        ring: R,
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, R::Elem)>,
    ) -> Self {
        let mut acc: Vec<BTreeMap<usize, R::Elem>> = vec![BTreeMap::new(); cols];
        for (r, c, v) in triplets {
            assert!(
                r < rows && c < cols,
                "entry ({r},{c}) out of bounds {rows}x{cols}"
            );
            if ring.is_zero(&v) {
                continue;
            }
            match acc[c].remove(&r) {
                Some(old) => {
                    let s = ring.add(&old, &v);
                    if !ring.is_zero(&s) {
                        acc[c].insert(r, s);
                    }
                }
                None => {
                    acc[c].insert(r, v);
                }
            }
        }
        SparseMat {
            ring,
            rows,
            cols,
            col_data: acc.into_iter().map(|m| m.into_iter().collect()).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, c: usize) -> &[(usize, R::Elem)] {
        &self.col_data[c]
    }

    pub fn nnz(&self) -> usize {
        self.col_data.iter().map(|c| c.len()).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &R::Elem)> {
        self.col_data
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> R::Elem {
        match self.col_data[c].binary_search_by_key(&r, |e| e.0) {
            Ok(i) => self.col_data[c][i].1.clone(),
            Err(_) => self.ring.zero(),
        }
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.col_data.iter().all(|c| c.is_empty())
    }

    pub fn transpose(&self) -> Self {
        SparseMat::from_triplets(
            self.ring.clone(),
            self.cols,
            self.rows,
            self.entries().map(|(r, c, v)| (c, r, v.clone())),
        )
    }

    pub fn scale(&self, s: &R::Elem) -> Self {
        SparseMat::from_triplets(
            self.ring.clone(),
            self.rows,
            self.cols,
            self.entries().map(|(r, c, v)| (r, c, self.ring.mul(v, s))),
        )
    }

    pub fn neg(&self) -> Self {
        self.scale(&self.ring.neg(&self.ring.one()))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        SparseMat::from_triplets(
            self.ring.clone(),
            self.rows,
            self.cols,
            self.entries()
                .map(|(r, c, v)| (r, c, v.clone()))
                .chain(other.entries().map(|(r, c, v)| (r, c, v.clone()))),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let ring = &self.ring;
        let mut out_cols: Vec<Vec<(usize, R::Elem)>> = Vec::with_capacity(other.cols);
        for bc in &other.col_data {
            let mut acc: BTreeMap<usize, R::Elem> = BTreeMap::new();
            for (k, bv) in bc {
                for (r, av) in &self.col_data[*k] {
                    let prod = ring.mul(av, bv);
                    if ring.is_zero(&prod) {
                        continue;
                    }
                    match acc.remove(r) {
                        Some(old) => {
                            let s = ring.add(&old, &prod);
                            if !ring.is_zero(&s) {
                                acc.insert(*r, s);
                            }
                        }
                        None => {
                            acc.insert(*r, prod);
                        }
                    }
                }
            }
            out_cols.push(acc.into_iter().collect());
        }
        SparseMat {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: other.cols,
            col_data: out_cols,
        }
    }

    /// Apply to a dense vector of length `cols`.
    pub fn apply(&self, v: &[R::Elem]) -> Vec<R::Elem> {
        assert_eq!(v.len(), self.cols);
        let ring = &self.ring;
        let mut out = vec![ring.zero(); self.rows];
        for (c, col) in self.col_data.iter().enumerate() {
            if ring.is_zero(&v[c]) {
                continue;
            }
            for (r, a) in col {
                out[*r] = ring.add(&out[*r], &ring.mul(a, &v[c]));
            }
        }
        out
    }

    /// Keep the listed rows/columns (in the given order) as a submatrix.
    pub fn submatrix(&self, keep_rows: &[usize], keep_cols: &[usize]) -> Self {
        let row_pos: BTreeMap<usize, usize> =
            keep_rows.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        SparseMat::from_triplets(
            self.ring.clone(),
            keep_rows.len(),
            keep_cols.len(),
            keep_cols.iter().enumerate().flat_map(|(cj, c)| {
                self.col_data[*c]
                    .iter()
                    .filter_map(|(r, v)| row_pos.get(r).map(|ri| (*ri, cj, v.clone())))
                    .collect::<Vec<_>>()
            }),
        )
    }

    pub fn rank(&self) -> usize {
        self.ring.clone().rank_of(self)
    }
}

/// Sparse Gaussian elimination rank over a field.
pub fn field_rank<R: Ring>(m: &SparseMat<R>) -> usize {
    assert!(m.ring.is_field());
    elimination(m, false).rank
}

struct Elim<R: Ring> {
    rank: usize,
    kernel: Option<SparseMat<R>>,
}

/// Column-based Gaussian elimination over a field; column operations are
/// recorded when a kernel basis is requested.
fn elimination<R: Ring>(m: &SparseMat<R>, want_kernel: bool) -> Elim<R> {
    let ring = m.ring.clone();
    let mut cols: Vec<BTreeMap<usize, R::Elem>> = m
        .col_data
        .iter()
        .map(|c| c.iter().cloned().collect())
        .collect();
    let mut trans: Vec<BTreeMap<usize, R::Elem>> = if want_kernel {
        (0..m.cols)
            .map(|j| BTreeMap::from([(j, ring.one())]))
            .collect()
    } else {
        Vec::new()
    };

    let mut pivot_of_row: BTreeMap<usize, usize> = BTreeMap::new();
    let mut is_pivot_col = vec![false; m.cols];

    let mut order: Vec<usize> = (0..m.cols).collect();
    order.sort_by_key(|j| cols[*j].len());

    for &j in &order {
        loop {
            let hit = cols[j]
                .iter()
                .find_map(|(r, _)| pivot_of_row.get(r).map(|pc| (*r, *pc)));
            match hit {
                Some((r, pc)) => {
                    let factor = {
                        let a = cols[j].get(&r).unwrap().clone();
                        let p = cols[pc].get(&r).unwrap().clone();
                        ring.mul(&a, &ring.inv(&p).expect("pivot invertible"))
                    };
                    col_axpy(&ring, &mut cols, j, pc, &factor);
                    if want_kernel {
                        trans_axpy(&ring, &mut trans, j, pc, &factor);
                    }
                }
                None => break,
            }
        }
        if let Some((r, _)) = cols[j].iter().next() {
            pivot_of_row.insert(*r, j);
            is_pivot_col[j] = true;
        }
    }

    let rank = pivot_of_row.len();
    let kernel = want_kernel.then(|| {
        let free: Vec<usize> = (0..m.cols)
            .filter(|j| !is_pivot_col[*j] && cols[*j].is_empty())
            .collect();
        SparseMat::from_triplets(
            ring.clone(),
            m.cols,
            free.len(),
            free.iter().enumerate().flat_map(|(kj, j)| {
                trans[*j]
                    .iter()
                    .map(|(orig, v)| (*orig, kj, v.clone()))
                    .collect::<Vec<_>>()
            }),
        )
    });
    Elim { rank, kernel }
}

fn col_axpy<R: Ring>(
    ring: &R,
    cols: &mut [BTreeMap<usize, R::Elem>],
    j: usize,
    pc: usize,
    factor: &R::Elem,
) {
    let updates: Vec<(usize, R::Elem)> = cols[pc]
        .iter()
        .map(|(rr, v)| (*rr, ring.mul(v, factor)))
        .collect();
    for (rr, dv) in updates {
        let cur = cols[j].remove(&rr).unwrap_or_else(|| ring.zero());
        let nv = ring.sub(&cur, &dv);
        if !ring.is_zero(&nv) {
            cols[j].insert(rr, nv);
        }
    }
}

fn trans_axpy<R: Ring>(
    ring: &R,
    trans: &mut [BTreeMap<usize, R::Elem>],
    j: usize,
    pc: usize,
    factor: &R::Elem,
) {
    let updates: Vec<(usize, R::Elem)> = trans[pc]
        .iter()
        .map(|(k, v)| (*k, ring.mul(v, factor)))
        .collect();
    for (k, dv) in updates {
        let cur = trans[j].remove(&k).unwrap_or_else(|| ring.zero());
        let nv = ring.sub(&cur, &dv);
        if !ring.is_zero(&nv) {
            trans[j].insert(k, nv);
        }
    }
}

/// Basis of the right kernel over a field, as matrix columns.
pub fn field_kernel_basis<R: Ring>(m: &SparseMat<R>) -> SparseMat<R> {
    assert!(m.ring.is_field());
    elimination(m, true).kernel.unwrap()
}

/// Solve `M x = b` over a field for every column `b` of `rhs`.
/// Returns `None` as soon as one column is inconsistent.
pub fn field_solve<R: Ring>(m: &SparseMat<R>, rhs: &SparseMat<R>) -> Option<SparseMat<R>> {
    assert!(m.ring.is_field());
    assert_eq!(m.rows(), rhs.rows());
    let ring = m.ring.clone();
    let mut cols: Vec<BTreeMap<usize, R::Elem>> = m
        .col_data
        .iter()
        .map(|c| c.iter().cloned().collect())
        .collect();
    let mut trans: Vec<BTreeMap<usize, R::Elem>> = (0..m.cols())
        .map(|j| BTreeMap::from([(j, ring.one())]))
        .collect();
    let mut pivot_of_row: BTreeMap<usize, usize> = BTreeMap::new();
    for j in 0..m.cols() {
        loop {
            let hit = cols[j].iter().find_map(|(r, _)| {
                pivot_of_row
                    .get(r)
                    .filter(|pc| **pc != j)
                    .map(|pc| (*r, *pc))
            });
            match hit {
                Some((r, pc)) => {
                    let factor = {
                        let a = cols[j].get(&r).unwrap().clone();
                        let p = cols[pc].get(&r).unwrap().clone();
                        ring.mul(&a, &ring.inv(&p).unwrap())
                    };
                    col_axpy(&ring, &mut cols, j, pc, &factor);
                    trans_axpy(&ring, &mut trans, j, pc, &factor);
                }
                None => break,
            }
        }
        if let Some((r, _)) = cols[j].iter().next() {
            pivot_of_row.insert(*r, j);
        }
    }
    let mut out: Vec<Vec<(usize, R::Elem)>> = Vec::with_capacity(rhs.cols());
    for bc in 0..rhs.cols() {
        let mut b: BTreeMap<usize, R::Elem> = rhs.col_data[bc].iter().cloned().collect();
        let mut combo: BTreeMap<usize, R::Elem> = BTreeMap::new();
        loop {
            let hit = b
                .iter()
                .find_map(|(r, _)| pivot_of_row.get(r).map(|pc| (*r, *pc)));
            match hit {
                Some((r, pc)) => {
                    let factor = {
                        let a = b.get(&r).unwrap().clone();
                        let p = cols[pc].get(&r).unwrap().clone();
                        ring.mul(&a, &ring.inv(&p).unwrap())
                    };
                    for (rr, v) in cols[pc].clone() {
                        let cur = b.remove(&rr).unwrap_or_else(|| ring.zero());
                        let nv = ring.sub(&cur, &ring.mul(&v, &factor));
                        if !ring.is_zero(&nv) {
                            b.insert(rr, nv);
                        }
                    }
                    for (k, v) in trans[pc].clone() {
                        let cur = combo.remove(&k).unwrap_or_else(|| ring.zero());
                        let nv = ring.add(&cur, &ring.mul(&v, &factor));
                        if !ring.is_zero(&nv) {
                            combo.insert(k, nv);
                        }
                    }
                }
                None => break,
            }
        }
        if !b.is_empty() {
            return None;
        }
        out.push(combo.into_iter().collect());
    }
    Some(SparseMat {
        ring,
        rows: m.cols(),
        cols: rhs.cols(),
        col_data: out,
    })
}

/// Smith normal form over the integers: the nonzero invariant factors
/// `d_1 | d_2 | ... | d_k`, all positive. The rank is `k`.
pub fn snf_invariant_factors(m: &SparseMat<ZZ>) -> Vec<BigInt> {
    if m.rows() * m.cols() > 0
        && m.rows() < 64
        && m.cols() < 64
        && m.nnz() * 4 > m.rows() * m.cols()
    {
        return snf_dense(m);
    }
    snf_sparse(m)
}

fn snf_sparse(m: &SparseMat<ZZ>) -> Vec<BigInt> {
    let mut rows: Vec<BTreeMap<usize, BigInt>> = vec![BTreeMap::new(); m.rows()];
    for (r, c, v) in m.entries() {
        rows[r].insert(c, v.clone());
    }
    let mut col_occ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols()];
    for (r, row) in rows.iter().enumerate() {
        for c in row.keys() {
            col_occ[*c].insert(r);
        }
    }
    let mut alive: BTreeSet<usize> = (0..m.rows()).filter(|r| !rows[*r].is_empty()).collect();
    let mut diag: Vec<BigInt> = Vec::new();

    loop {
        // pivot selection: prefer units, then small magnitude, then low fill
        let mut best: Option<(usize, usize, BigInt, usize)> = None;
        'scan: for &r in &alive {
            for (c, v) in &rows[r] {
                let fill = (rows[r].len() - 1) * (col_occ[*c].len() - 1);
                let a = v.abs();
                let better = match &best {
                    None => true,
                    Some((_, _, bv, bf)) => {
                        let ua = a.is_one();
                        let ub = bv.is_one();
                        if ua != ub {
                            ua
                        } else if ua {
                            fill < *bf
                        } else {
                            a < *bv || (a == *bv && fill < *bf)
                        }
                    }
                };
                if better {
                    let perfect = a.is_one() && fill == 0;
                    best = Some((r, *c, a, fill));
                    if perfect {
                        break 'scan;
                    }
                }
            }
        }
        let (mut pr, mut pc) = match best {
            Some((r, c, _, _)) => (r, c),
            None => break,
        };

        'clear: loop {
            let pval = rows[pr].get(&pc).unwrap().clone();

            // clear the pivot column with row operations
            let others: Vec<usize> = col_occ[pc].iter().cloned().filter(|r| *r != pr).collect();
            for r in &others {
                let v = rows[*r].get(&pc).unwrap().clone();
                let q = div_round(&v, &pval);
                if q.is_zero() {
                    continue;
                }
                let updates: Vec<(usize, BigInt)> =
                    rows[pr].iter().map(|(c, x)| (*c, &q * x)).collect();
                for (c, dv) in updates {
                    let cur = rows[*r].remove(&c);
                    let had = cur.is_some();
                    let nv = cur.unwrap_or_else(BigInt::zero) - dv;
                    if nv.is_zero() {
                        if had {
                            col_occ[c].remove(r);
                        }
                    } else {
                        if !had {
                            col_occ[c].insert(*r);
                        }
                        rows[*r].insert(c, nv);
                    }
                }
                if rows[*r].is_empty() {
                    alive.remove(r);
                }
            }
            // a nonzero remainder smaller than the pivot becomes the new pivot
            if let Some(r) = col_occ[pc].iter().cloned().find(|r| *r != pr) {
                pr = r;
                continue 'clear;
            }

            // clear the pivot row with column operations; the pivot column now
            // meets only row pr, so these touch row pr alone
            let pval = rows[pr].get(&pc).unwrap().clone();
            let row_cols: Vec<usize> = rows[pr].keys().cloned().filter(|c| *c != pc).collect();
            for c in row_cols {
                let v = rows[pr].get(&c).unwrap().clone();
                let q = div_round(&v, &pval);
                let nv = v - &q * &pval;
                if nv.is_zero() {
                    rows[pr].remove(&c);
                    col_occ[c].remove(&pr);
                } else {
                    rows[pr].insert(c, nv);
                }
            }
            if rows[pr].len() > 1 {
                // remainder left in the row: smallest becomes the pivot
                let (c, _) = rows[pr]
                    .iter()
                    .min_by_key(|(_, v)| v.abs())
                    .map(|(c, v)| (*c, v.clone()))
                    .unwrap();
                pc = c;
                continue 'clear;
            }
            break;
        }

        let pval = rows[pr].remove(&pc).unwrap();
        col_occ[pc].remove(&pr);
        alive.remove(&pr);
        diag.push(pval.abs());
    }

    fix_divisibility(diag)
}

fn snf_dense(m: &SparseMat<ZZ>) -> Vec<BigInt> {
    let (nr, nc) = (m.rows(), m.cols());
    let mut a = vec![vec![BigInt::zero(); nc]; nr];
    for (r, c, v) in m.entries() {
        a[r][c] = v.clone();
    }
    let mut diag = Vec::new();
    let mut top = 0usize;
    let mut left = 0usize;
    while top < nr && left < nc {
        // find the minimal nonzero entry
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
        let mut clean = true;
        let pval = a[top][left].clone();
        for r in (top + 1)..nr {
            if !a[r][left].is_zero() {
                let q = div_round(&a[r][left], &pval);
                for c in left..nc {
                    let d = &q * &a[top][c];
                    a[r][c] = &a[r][c] - d;
                }
                if !a[r][left].is_zero() {
                    clean = false;
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
                    clean = false;
                }
            }
        }
        if clean {
            diag.push(a[top][left].abs());
            top += 1;
            left += 1;
        }
    }
    fix_divisibility(diag)
}

fn fix_divisibility(mut diag: Vec<BigInt>) -> Vec<BigInt> {
    let n = diag.len();
    loop {
        let mut done = true;
        for i in 0..n {
            for j in (i + 1)..n {
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

/// Division rounding to nearest to keep SNF remainders small.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if r.abs() * 2 > b.abs() {
        if (a * b).sign() == num_bigint::Sign::Minus {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

/// One homology group: free rank plus torsion invariant factors (each > 1,
/// forming a divisibility chain). Empty torsion over a field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn zero() -> Self {
        HomologyGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        HomologyGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut torsion: Vec<BigInt> = self
            .torsion
            .iter()
            .chain(other.torsion.iter())
            .cloned()
            .collect();
        torsion.sort();
        HomologyGroup {
            free_rank: self.free_rank + other.free_rank,
            torsion,
        }
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.free_rank == 1 {
            parts.push("Z".to_string());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        for t in &self.torsion {
            parts.push(format!("Z/{}", t));
        }
        write!(f, "{}", parts.join("+"))
    }
}

/// Homology at the middle of `d_in: C' -> C` and `d_out: C -> C''`:
/// `ker(d_out) / im(d_in)` as an abstract group.
///
/// Over the integers the free rank is `dim - rank(d_out) - rank(d_in)` and
/// the torsion is the multiset of nontrivial invariant factors of `d_in`
/// (the kernel of `d_out` is a saturated sublattice, so the inclusion of the
/// image does not change elementary divisors).
pub fn homology_at<R: Ring>(
    d_in: &SparseMat<R>,
    d_out: &SparseMat<R>,
) -> Result<HomologyGroup, AlgError> {
    if d_out.cols() != d_in.rows() {
        return Err(AlgError::DimensionMismatch {
            out_cols: d_out.cols(),
            in_rows: d_in.rows(),
        });
    }
    if !d_out.mul(d_in).is_zero_matrix() {
        return Err(AlgError::CompositionNonzero);
    }
    let dim = d_in.rows();
    let ring = d_in.ring.clone();
    let (r_in, torsion) = ring.rank_and_torsion(d_in);
    let r_out = ring.rank_of(d_out);
    Ok(HomologyGroup {
        free_rank: dim - r_out - r_in,
        torsion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn zmat(rows: usize, cols: usize, ts: &[(usize, usize, i64)]) -> SparseMat<ZZ> {
        SparseMat::from_triplets(
            ZZ,
            rows,
            cols,
            ts.iter().map(|(r, c, v)| (*r, *c, BigInt::from(*v))),
        )
    }

    #[test]
    fn snf_already_diagonal() {
        let m = zmat(2, 2, &[(0, 0, 2)]);
        assert_eq!(snf_invariant_factors(&m), vec![BigInt::from(2)]);
    }

    #[test]
    fn snf_identity() {
        let m = SparseMat::identity(ZZ, 2);
        assert_eq!(
            snf_invariant_factors(&m),
            vec![BigInt::from(1), BigInt::from(1)]
        );
    }

    #[test]
    fn snf_hand_example() {
        // d1 = gcd of entries = 2, d1*d2 = |det| = 8, so (2, 4)
        let m = zmat(2, 2, &[(0, 0, 2), (0, 1, 4), (1, 0, 6), (1, 1, 8)]);
        assert_eq!(
            snf_invariant_factors(&m),
            vec![BigInt::from(2), BigInt::from(4)]
        );
    }

    #[test]
    fn snf_diag_2_3_combines() {
        let m = zmat(2, 2, &[(0, 0, 2), (1, 1, 3)]);
        assert_eq!(
            snf_invariant_factors(&m),
            vec![BigInt::from(1), BigInt::from(6)]
        );
    }

    #[test]
    fn snf_empty() {
        let m = zmat(0, 0, &[]);
        assert!(snf_invariant_factors(&m).is_empty());
        let m = zmat(3, 2, &[]);
        assert!(snf_invariant_factors(&m).is_empty());
    }

    #[test]
    fn snf_sparse_path_agrees_with_dense() {
        // force both code paths on the same matrix
        let ts: Vec<(usize, usize, i64)> = vec![
            (0, 0, 2),
            (0, 3, -4),
            (1, 1, 6),
            (1, 2, 9),
            (2, 0, 3),
            (2, 2, 12),
            (3, 3, 30),
            (3, 1, 5),
        ];
        let m = zmat(4, 4, &ts);
        assert_eq!(snf_dense(&m), snf_sparse(&m));
    }

    #[test]
    fn homology_times_two() {
        let d_out = zmat(1, 1, &[(0, 0, 2)]);
        let d_in = zmat(1, 0, &[]);
        let h = homology_at(&d_in, &d_out).unwrap();
        assert_eq!(h, HomologyGroup::free(0));

        let d_in = zmat(1, 1, &[(0, 0, 2)]);
        let d_out = zmat(0, 1, &[]);
        let h = homology_at(&d_in, &d_out).unwrap();
        assert_eq!(
            h,
            HomologyGroup {
                free_rank: 0,
                torsion: vec![BigInt::from(2)]
            }
        );
    }

    #[test]
    fn homology_zero_maps() {
        let d_in = zmat(3, 0, &[]);
        let d_out = zmat(0, 3, &[]);
        assert_eq!(homology_at(&d_in, &d_out).unwrap(), HomologyGroup::free(3));
    }

    #[test]
    fn homology_diag_2_3() {
        let d_in = zmat(2, 2, &[(0, 0, 2), (1, 1, 3)]);
        let d_out = zmat(0, 2, &[]);
        assert_eq!(
            homology_at(&d_in, &d_out).unwrap(),
            HomologyGroup {
                free_rank: 0,
                torsion: vec![BigInt::from(6)]
            }
        );
    }

    #[test]
    fn homology_composition_check() {
        let d_in = zmat(1, 1, &[(0, 0, 1)]);
        let d_out = zmat(1, 1, &[(0, 0, 1)]);
        assert_eq!(
            homology_at(&d_in, &d_out),
            Err(AlgError::CompositionNonzero)
        );
    }

    #[test]
    fn field_rank_and_kernel() {
        let gf2 = GF::new(2).unwrap();
        let m = SparseMat::from_triplets(
            gf2,
            2,
            3,
            [
                (0usize, 0usize, 1u64),
                (1, 0, 1),
                (0, 1, 1),
                (1, 1, 1),
                (0, 2, 1),
            ],
        );
        assert_eq!(field_rank(&m), 2);
        let k = field_kernel_basis(&m);
        assert_eq!(k.cols(), 1);
        assert!(m.mul(&k).is_zero_matrix());
    }

    #[test]
    fn solve_over_q() {
        let m = SparseMat::from_triplets(
            QQ,
            2,
            2,
            [
                (0usize, 0usize, QQ.from_i64(1)),
                (1, 0, QQ.from_i64(1)),
                (0, 1, QQ.from_i64(2)),
            ],
        );
        let b = SparseMat::from_triplets(
            QQ,
            2,
            1,
            [(0usize, 0usize, QQ.from_i64(3)), (1, 0, QQ.from_i64(1))],
        );
        let x = field_solve(&m, &b).unwrap();
        assert!(m.mul(&x).sub(&b).is_zero_matrix());
    }

    #[test]
    fn prime_field_rejects_composite() {
        assert!(GF::new(4).is_err());
        assert!(GF::new(3).is_ok());
    }

    #[test]
    fn f2_homology_matches_brute_force_enumeration() {
        // enumerate ker/im over F2 vector-by-vector on small complexes and
        // compare against the rank-based computation
        let gf2 = GF::new(2).unwrap();
        let cases: Vec<(SparseMat<GF>, SparseMat<GF>)> = vec![
            // d_in: F2^2 -> F2^3, d_out: F2^3 -> F2^1 with d_out d_in = 0
            (
                SparseMat::from_triplets(
                    gf2,
                    3,
                    2,
                    [(0usize, 0usize, 1u64), (1, 0, 1), (1, 1, 1), (2, 1, 1)],
                ),
                SparseMat::from_triplets(gf2, 1, 3, [(0usize, 0usize, 1u64), (0, 1, 1), (0, 2, 1)]),
            ),
            (
                SparseMat::zero(gf2, 3, 0),
                SparseMat::from_triplets(gf2, 2, 3, [(0usize, 0usize, 1u64), (1, 2, 1)]),
            ),
        ];
        for (d_in, d_out) in cases {
            let dim = d_in.rows();
            let mut kernel = 0usize;
            for v in 0..(1u64 << dim) {
                let vec: Vec<u64> = (0..dim).map(|k| (v >> k) & 1).collect();
                if d_out.apply(&vec).iter().all(|x| x % 2 == 0) {
                    kernel += 1;
                }
            }
            let mut image = std::collections::BTreeSet::new();
            for v in 0..(1u64 << d_in.cols()) {
                let vec: Vec<u64> = (0..d_in.cols()).map(|k| (v >> k) & 1).collect();
                let w: Vec<u64> = d_in.apply(&vec).iter().map(|x| x % 2).collect();
                image.insert(w);
            }
            let brute = (kernel / image.len()).trailing_zeros() as usize;
            let h = homology_at(&d_in, &d_out).unwrap();
            assert_eq!(h.free_rank, brute);
        }
    }

    #[test]
    fn snf_invariant_under_unimodular_ops() {
        let m = zmat(3, 3, &[(0, 0, 2), (1, 1, 4), (0, 1, 6)]);
        let before = snf_invariant_factors(&m);
        // swap columns and add row 0 to row 2
        let m2 = zmat(
            3,
            3,
            &[(0, 1, 2), (2, 1, 2), (1, 0, 4), (0, 0, 6), (2, 0, 6)],
        );
        assert_eq!(before, snf_invariant_factors(&m2));
    }
}
