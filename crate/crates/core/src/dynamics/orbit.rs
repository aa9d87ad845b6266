//! Density matrices invariant under permutations of the spins within each
//! group, stored by orbit of the pair `(a, b)` of configurations.
//!
//! For one group of `n` spins an orbit is the count of sites of each type
//! `(a_i, b_i)`: `(n11, n10, n01, n00)`, with bit 1 meaning spin down. The
//! representation is exact for permutation-invariant Hamiltonians and
//! uniform local dephasing.

use crate::error::{Error, Result};
use crate::models::{build_h_split, BasisKind, ModelSpec};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use std::sync::OnceLock;

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Orbits of a single group.
#[derive(Clone, Debug)]
pub struct GroupOrbits {
    pub n: usize,
    /// `(n11, n10, n01, n00)` per orbit.
    pub types: Vec<[usize; 4]>,
    lookup: Vec<usize>,
}

impl GroupOrbits {
    pub fn new(n: usize) -> Self {
        let mut types = Vec::new();
        let mut lookup = vec![usize::MAX; (n + 1).pow(3)];
        for n11 in 0..=n {
            for n10 in 0..=n - n11 {
                for n01 in 0..=n - n11 - n10 {
                    lookup[(n11 * (n + 1) + n10) * (n + 1) + n01] = types.len();
                    types.push([n11, n10, n01, n - n11 - n10 - n01]);
                }
            }
        }
        Self { n, types, lookup }
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn index(&self, n11: usize, n10: usize, n01: usize) -> usize {
        let n = self.n + 1;
        self.lookup[(n11 * n + n10) * n + n01]
    }

    /// Orbit of a pair of `n`-bit configurations.
    pub fn of_pair(&self, a: usize, b: usize) -> usize {
        let mask = (1usize << self.n) - 1;
        let n11 = (a & b).count_ones() as usize;
        let n10 = (a & !b & mask).count_ones() as usize;
        let n01 = (!a & b & mask).count_ones() as usize;
        self.index(n11, n10, n01)
    }

    pub fn multiplicity(&self, o: usize) -> f64 {
        let t = self.types[o];
        factorial(self.n) / t.iter().map(|&k| factorial(k)).product::<f64>()
    }

    /// Orbits reached by flipping one spin of `a` (left) or `b` (right),
    /// with the number of sites producing each.
    fn flips(&self, o: usize, left: bool) -> Vec<(usize, f64)> {
        let [n11, n10, n01, n00] = self.types[o];
        let mut out = Vec::with_capacity(4);
        let mut push = |w: usize, t: [usize; 3]| {
            if w > 0 {
                out.push((self.index(t[0], t[1], t[2]), w as f64));
            }
        };
        if left {
            if n11 > 0 {
                push(n11, [n11 - 1, n10, n01 + 1]);
            }
            if n10 > 0 {
                push(n10, [n11, n10 - 1, n01]);
            }
            if n01 > 0 {
                push(n01, [n11 + 1, n10, n01 - 1]);
            }
            push(n00, [n11, n10 + 1, n01]);
        } else {
            if n11 > 0 {
                push(n11, [n11 - 1, n10 + 1, n01]);
            }
            if n10 > 0 {
                push(n10, [n11 + 1, n10 - 1, n01]);
            }
            if n01 > 0 {
                push(n01, [n11, n10, n01 - 1]);
            }
            push(n00, [n11, n10, n01 + 1]);
        }
        out
    }
}

/// Product of per-group orbit sets for one model.
#[derive(Debug)]
pub struct OrbitSpace {
    pub groups: Vec<GroupOrbits>,
    pub reduced: BasisKind,
    len: usize,
    /// Reduced-basis index of the `a` and `b` configurations of each orbit.
    red_a: Vec<usize>,
    red_b: Vec<usize>,
    mismatch: Vec<f64>,
    /// `1 / sqrt(prod C(n_g, ups))` for the `a` and `b` sides.
    norm_ab: Vec<f64>,
    mult: Vec<f64>,
    /// Flip neighbours: left flips with weight `+w`, right flips with `-w`.
    nb_ptr: Vec<usize>,
    nb_idx: Vec<u32>,
    nb_w: Vec<f64>,
    sectors: OnceLock<Vec<GroupSectors>>,
}

impl OrbitSpace {
    pub fn new(group_sizes: &[usize], reduced: BasisKind) -> Self {
        let groups: Vec<GroupOrbits> = group_sizes.iter().map(|&n| GroupOrbits::new(n)).collect();
        let len = groups.iter().map(|g| g.len()).product();
        let mut red_a = vec![0; len];
        let mut red_b = vec![0; len];
        let mut mismatch = vec![0.0; len];
        let mut norm_ab = vec![1.0; len];
        let mut mult = vec![1.0; len];
        let mut nb_ptr = vec![0usize];
        let mut nb_idx = Vec::new();
        let mut nb_w = Vec::new();
        for o in 0..len {
            let parts = split_index(&groups, o);
            let (mut ra, mut rb) = (0, 0);
            for (g, &p) in groups.iter().zip(&parts) {
                let [n11, n10, n01, _] = g.types[p];
                let ups_a = g.n - n11 - n10;
                let ups_b = g.n - n11 - n01;
                ra = ra * (g.n + 1) + ups_a;
                rb = rb * (g.n + 1) + ups_b;
                mismatch[o] += (n10 + n01) as f64;
                norm_ab[o] /= (binomial(g.n, ups_a) * binomial(g.n, ups_b)).sqrt();
                mult[o] *= g.multiplicity(p);
            }
            red_a[o] = ra;
            red_b[o] = rb;
            for (gi, g) in groups.iter().enumerate() {
                for is_left in [true, false] {
                    for (q, w) in g.flips(parts[gi], is_left) {
                        let mut p2 = parts.clone();
                        p2[gi] = q;
                        nb_idx.push(join_index(&groups, &p2) as u32);
                        nb_w.push(if is_left { w } else { -w });
                    }
                }
            }
            nb_ptr.push(nb_idx.len());
        }
        Self {
            groups,
            reduced,
            len,
            red_a,
            red_b,
            mismatch,
            norm_ab,
            mult,
            nb_ptr,
            nb_idx,
            nb_w,
            sectors: OnceLock::new(),
        }
    }

    /// Orbit space for a p-spin or biclique model.
    pub fn for_model(spec: &ModelSpec) -> Result<Self> {
        match *spec {
            ModelSpec::PSpin { l, .. } => Ok(Self::new(&[l], spec.reduced_basis())),
            ModelSpec::Biclique { l_a, l_b, .. } => Ok(Self::new(&[l_a, l_b], spec.reduced_basis())),
            ModelSpec::Grover { .. } => Err(Error::InvalidModel("grover has no permutation-symmetric form".into())),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn total_spins(&self) -> usize {
        self.groups.iter().map(|g| g.n).sum()
    }

    /// Orbit of a pair of full configurations; group 0 occupies the lowest bits.
    pub fn of_pair(&self, a: usize, b: usize) -> usize {
        let mut parts = Vec::with_capacity(self.groups.len());
        let mut shift = 0;
        for g in &self.groups {
            let mask = (1usize << g.n) - 1;
            parts.push(g.of_pair(a >> shift & mask, b >> shift & mask));
            shift += g.n;
        }
        join_index(&self.groups, &parts)
    }

    /// `|phi><psi|` for symmetric states given in the reduced basis.
    pub fn outer(&self, phi: &[C64], psi: &[C64]) -> Vec<C64> {
        (0..self.len).map(|o| phi[self.red_a[o]] * psi[self.red_b[o]].conj() * self.norm_ab[o]).collect()
    }

    /// `<phi|rho|phi>` for a symmetric state given in the reduced basis.
    pub fn expectation(&self, rho: &[C64], phi: &[C64]) -> C64 {
        (0..self.len).map(|o| phi[self.red_a[o]].conj() * phi[self.red_b[o]] * rho[o] * (self.mult[o] * self.norm_ab[o])).sum()
    }

    /// Populations of the reduced-basis labels (magnetization sectors).
    pub fn populations(&self, rho: &[C64]) -> Vec<f64> {
        let mut p = vec![0.0; self.reduced.dim()];
        for o in 0..self.len {
            if self.mismatch[o] == 0.0 {
                p[self.red_a[o]] += self.mult[o] * rho[o].re;
            }
        }
        p
    }

    pub fn trace(&self, rho: &[C64]) -> f64 {
        self.populations(rho).iter().sum()
    }

    /// `d rho/dt = -i(a [H1, rho] + b x [Sx, rho]) - 2 gamma (mismatches) rho`
    /// for diagonal `H1` (given on the reduced basis) and `H2 = x Sx`.
    pub fn rhs(&self, h1_diag: &[f64], x: f64, a: f64, b: f64, gamma: f64, rho: &[C64], out: &mut [C64]) {
        let bx = b * x;
        for o in 0..self.len {
            let mut flip = C64::default();
            for k in self.nb_ptr[o]..self.nb_ptr[o + 1] {
                flip += rho[self.nb_idx[k] as usize] * self.nb_w[k];
            }
            let hr = rho[o] * (a * (h1_diag[self.red_a[o]] - h1_diag[self.red_b[o]])) + flip * bx;
            // -i hr
            out[o] = C64::new(hr.im, -hr.re) - rho[o] * (2.0 * gamma * self.mismatch[o]);
        }
    }

    /// Expands to the full `2^L` density matrix.
    pub fn to_dense(&self, rho: &[C64]) -> Result<DMatrix<C64>> {
        let l = self.total_spins();
        if l > 12 {
            return Err(Error::TooLarge { size: l, limit: 12 });
        }
        let dim = 1usize << l;
        Ok(DMatrix::from_fn(dim, dim, |a, b| rho[self.of_pair(a, b)]))
    }

    fn sectors(&self) -> &[GroupSectors] {
        self.sectors.get_or_init(|| self.groups.iter().map(GroupSectors::new).collect())
    }

    /// Irreducible blocks `(multiplicity, rho_j)` with
    /// `rho = sum_j rho_j (x) 1_{d_j}`.
    pub fn blocks(&self, rho: &[C64]) -> Vec<(f64, DMatrix<C64>)> {
        let sectors = self.sectors();
        match sectors.len() {
            1 => sectors[0]
                .blocks
                .iter()
                .map(|blk| {
                    let d = blk.dim;
                    let m = DMatrix::from_fn(d, d, |i, k| {
                        blk.weights[i * d + k].iter().map(|&(o, w)| rho[o] * w).sum::<C64>()
                    });
                    (blk.multiplicity, m)
                })
                .collect(),
            2 => {
                let nb = self.groups[1].len();
                let mut out = Vec::new();
                for ba in &sectors[0].blocks {
                    for bb in &sectors[1].blocks {
                        let (da, db) = (ba.dim, bb.dim);
                        let d = da * db;
                        let mut m = DMatrix::zeros(d, d);
                        for ia in 0..da {
                            for ka in 0..da {
                                let wa = &ba.weights[ia * da + ka];
                                if wa.is_empty() {
                                    continue;
                                }
                                for ib in 0..db {
                                    for kb in 0..db {
                                        let wb = &bb.weights[ib * db + kb];
                                        let mut acc = C64::default();
                                        for &(oa, xa) in wa {
                                            let base = oa * nb;
                                            let mut inner = C64::default();
                                            for &(ob, xb) in wb {
                                                inner += rho[base + ob] * xb;
                                            }
                                            acc += inner * xa;
                                        }
                                        m[(ia * db + ib, ka * db + kb)] = acc;
                                    }
                                }
                            }
                        }
                        out.push((ba.multiplicity * bb.multiplicity, m));
                    }
                }
                out
            }
            _ => unreachable!("at most two groups"),
        }
    }
}

fn split_index(groups: &[GroupOrbits], mut o: usize) -> Vec<usize> {
    let mut parts = vec![0; groups.len()];
    for (i, g) in groups.iter().enumerate().rev() {
        parts[i] = o % g.len();
        o /= g.len();
    }
    parts
}

fn join_index(groups: &[GroupOrbits], parts: &[usize]) -> usize {
    groups.iter().zip(parts).fold(0, |acc, (g, &p)| acc * g.len() + p)
}

/// One irreducible block of a group: `<j,m|rho|j,m'>` as a weighted sum
/// over orbits.
#[derive(Debug)]
struct SectorBlock {
    dim: usize,
    multiplicity: f64,
    weights: Vec<Vec<(usize, f64)>>,
}

#[derive(Debug)]
struct GroupSectors {
    blocks: Vec<SectorBlock>,
}

impl GroupSectors {
    fn new(g: &GroupOrbits) -> Self {
        let n = g.n;
        let mut blocks = Vec::new();
        // 2j = n, n-2, ...
        let mut two_j = n as isize;
        while two_j >= 0 {
            let tj = two_j as usize;
            let pairs = (n - tj) / 2;
            let multiplicity = binomial(n, pairs) - if pairs > 0 { binomial(n, pairs - 1) } else { 0.0 };
            let vecs = spin_multiplet(n, tj);
            let d = tj + 1;
            let mut weights = Vec::with_capacity(d * d);
            for v in &vecs {
                for w in &vecs {
                    let mut acc = vec![0.0; g.len()];
                    for &(a, x) in v {
                        for &(b, y) in w {
                            acc[g.of_pair(a, b)] += x * y;
                        }
                    }
                    weights.push(acc.into_iter().enumerate().filter(|(_, x)| *x != 0.0).collect());
                }
            }
            blocks.push(SectorBlock { dim: d, multiplicity, weights });
            two_j -= 2;
        }
        Self { blocks }
    }
}

/// Orthonormal `|j, m>` for `2j = two_j`, `m = j, j-1, ..., -j`: up spins on
/// the first `2j` sites, singlets on the remaining pairs, lowered with `J_-`.
fn spin_multiplet(n: usize, two_j: usize) -> Vec<Vec<(usize, f64)>> {
    let dim = 1usize << n;
    let mut hw = vec![0.0; dim];
    let pairs = (n - two_j) / 2;
    let amp = 0.5f64.powf(pairs as f64 / 2.0);
    for choice in 0..(1usize << pairs) {
        let mut cfg = 0usize;
        let mut sign = 1.0;
        for p in 0..pairs {
            let (s0, s1) = (two_j + 2 * p, two_j + 2 * p + 1);
            // singlet (|up down> - |down up>)/sqrt 2
            if choice >> p & 1 == 0 {
                cfg |= 1 << s1;
            } else {
                cfg |= 1 << s0;
                sign = -sign;
            }
        }
        hw[cfg] = sign * amp;
    }
    let mut out = Vec::with_capacity(two_j + 1);
    let mut cur = hw;
    for k in 0..=two_j {
        out.push(cur.iter().enumerate().filter(|(_, x)| **x != 0.0).map(|(i, &x)| (i, x)).collect());
        if k == two_j {
            break;
        }
        let mut next = vec![0.0; dim];
        for (a, &x) in cur.iter().enumerate() {
            if x != 0.0 {
                for i in 0..n {
                    if a >> i & 1 == 0 {
                        next[a | 1 << i] += x;
                    }
                }
            }
        }
        let nrm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        next.iter_mut().for_each(|x| *x /= nrm);
        cur = next;
    }
    out
}

/// Permutation-symmetric density matrix of a p-spin or biclique model.
#[derive(Clone, Debug)]
pub struct SymmetricState {
    pub space: std::sync::Arc<OrbitSpace>,
    pub values: Vec<C64>,
}

impl SymmetricState {
    pub fn pure(space: std::sync::Arc<OrbitSpace>, reduced: &DVector<C64>) -> Self {
        let values = space.outer(reduced.as_slice(), reduced.as_slice());
        Self { space, values }
    }

    pub fn populations(&self) -> Vec<f64> {
        self.space.populations(&self.values)
    }

    pub fn trace(&self) -> f64 {
        self.space.trace(&self.values)
    }

    pub fn fidelity_with(&self, reduced: &DVector<C64>) -> f64 {
        self.space.expectation(&self.values, reduced.as_slice()).re
    }

    pub fn blocks(&self) -> Vec<(f64, DMatrix<C64>)> {
        self.space.blocks(&self.values)
    }

    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        self.space.to_dense(&self.values)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks()
            .into_iter()
            .map(|(_, m)| nalgebra::SymmetricEigen::new(m).eigenvalues.min())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Diagonal of `H1` on the reduced basis and the sign `x` with `H2 = x Sx`.
pub(crate) fn orbit_generator(spec: &ModelSpec) -> Result<(Vec<f64>, f64)> {
    let split = build_h_split(spec)?;
    if !split.h1.matrix.is_diagonal() {
        return Err(Error::InvalidModel("permutation-orbit evolution needs a diagonal H1 (p-spin with lambda = 1, or biclique)".into()));
    }
    let diag = (0..split.h1.dim()).map(|i| split.h1.matrix.get(i, i)).collect();
    let x = match spec {
        ModelSpec::PSpin { .. } => -1.0,
        _ => 1.0,
    };
    Ok((diag, x))
}
