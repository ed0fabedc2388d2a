//! Reference computations that do not go through the double complex, and a
//! seeded generator of random instances.
//!
//! The persistent cohomology here is computed slice by slice from the
//! coboundary matrices, with barcodes recovered from the rank function by
//! inclusion–exclusion. Nothing in this module touches the spectral code.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{restriction, FilteredComplex, Simplex, SimplicialComplex};
use crate::cover::{CoverPiece, SimplicialMap};
use crate::field::Field;
use crate::instance::Instance;
use crate::linalg::{column_basis, kernel, rank, solve, Matrix};
use crate::persistence::{Barcode, Interval, PersistenceModule};

/// `H^q(c)` as its dimension, a basis of cycle representatives and a basis
/// of coboundaries.
#[derive(Clone, Debug)]
pub struct DirectCohomology<S> {
    pub dim: usize,
    pub representatives: Matrix<S>,
    pub coboundaries: Matrix<S>,
    pub cocycles: Matrix<S>,
}

pub fn direct_cohomology<S: Field>(c: &SimplicialComplex, q: usize) -> DirectCohomology<S> {
    let n = c.count(q);
    let cocycles = kernel(&c.coboundary::<S>(q));
    let coboundaries = match q.checked_sub(1) {
        Some(prev) => column_basis(&c.coboundary::<S>(prev)),
        None => Matrix::zeros(n, 0),
    };
    // extend the coboundary basis greedily by cocycles
    let mut reps = Vec::new();
    let mut current = coboundaries.clone();
    for z in cocycles.columns() {
        let trial = Matrix::hstack(n, &[&current, &Matrix::from_columns(n, std::slice::from_ref(&z))]);
        if rank(&trial) > current.cols() {
            current = trial;
            reps.push(z);
        }
    }
    DirectCohomology {
        dim: reps.len(),
        representatives: Matrix::from_columns(n, &reps),
        coboundaries,
        cocycles,
    }
}

/// The persistence module `H^q(K_0) -> … -> H^q(K_N)`, each map found by
/// solving for restricted representatives in `[coboundaries | reps]`.
pub fn direct_tower<S: Field>(k: &FilteredComplex, q: usize) -> PersistenceModule<S> {
    let slices: Vec<SimplicialComplex> = (0..=k.len()).map(|i| k.slice(i).expect("in range")).collect();
    let groups: Vec<DirectCohomology<S>> = slices.iter().map(|s| direct_cohomology(s, q)).collect();
    let maps = (0..k.len())
        .map(|i| {
            let res = restriction::<S>(&slices[i], &slices[i + 1], q);
            let target = &groups[i + 1];
            let n = slices[i + 1].count(q);
            let nb = target.coboundaries.cols();
            let system = Matrix::hstack(n, &[&target.coboundaries, &target.representatives]);
            let cols: Vec<Vec<S>> = groups[i]
                .representatives
                .columns()
                .into_iter()
                .map(|z| {
                    let image = res.mul_vec(&z);
                    let x = solve(&system, &image)
                        .expect("shapes agree")
                        .expect("restricted cocycle is a cocycle");
                    x[nb..].to_vec()
                })
                .collect();
            Matrix::from_columns(target.dim, &cols)
        })
        .collect();
    PersistenceModule::new(groups.iter().map(|g| g.dim).collect(), maps).expect("shapes chain")
}

/// Rank of `H^q(K_i) -> H^q(K_j)`:
/// `rank[res(Z_i) | B_j] - rank B_j`.
pub fn direct_rank<S: Field>(k: &FilteredComplex, q: usize, i: usize, j: usize) -> usize {
    let ki = k.slice(i).expect("in range");
    let kj = k.slice(j).expect("in range");
    let zi = kernel(&ki.coboundary::<S>(q));
    let res = restriction::<S>(&ki, &kj, q).mul(&zi);
    let bj = match q.checked_sub(1) {
        Some(prev) => kj.coboundary::<S>(prev),
        None => Matrix::zeros(kj.count(q), 0),
    };
    rank(&Matrix::hstack(kj.count(q), &[&res, &bj])) - rank(&bj)
}

/// The barcode of `H^q` by inclusion–exclusion on the rank function.
///
/// With `r(i, j)` the rank from `i` to `j` and `r(-1, ·) = 0`, the number of
/// bars `[b, d)` is `r(b, d-1) - r(b-1, d-1) - r(b, d) + r(b-1, d)`, and the
/// number alive at `N` is `r(b, N) - r(b-1, N)`.
pub fn direct_barcode<S: Field>(k: &FilteredComplex, q: usize) -> Barcode {
    let n = k.len();
    let table: Vec<Vec<usize>> = (0..=n)
        .map(|i| (0..=n).map(|j| if j >= i { direct_rank::<S>(k, q, i, j) } else { 0 }).collect())
        .collect();
    let r = |i: i64, j: usize| -> i64 {
        if i < 0 {
            0
        } else {
            table[i as usize][j] as i64
        }
    };
    let mut bars = Vec::new();
    for b in 0..=n {
        let bi = b as i64;
        for d in b + 1..=n {
            let mult = r(bi, d - 1) - r(bi - 1, d - 1) - r(bi, d) + r(bi - 1, d);
            assert!(mult >= 0, "rank function is not a barcode");
            bars.extend(std::iter::repeat_n(Interval::new(b, d), mult as usize));
        }
        let alive = r(bi, n) - r(bi - 1, n);
        assert!(alive >= 0, "rank function is not a barcode");
        bars.extend(std::iter::repeat_n(Interval { birth: b, death: None }, alive as usize));
    }
    Barcode::new(bars)
}

/// Size limits for [`random_instance`]. All maxima are inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Cap on the number of simplices of the source complex.
    pub max_simplices: usize,
    /// Vertices of the target complex.
    pub max_y: usize,
    pub max_pieces: usize,
    pub max_len: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_simplices: 30,
            max_y: 10,
            max_pieces: 4,
            max_len: 6,
        }
    }
}

impl Bounds {
    pub fn minimal() -> Self {
        Bounds {
            max_simplices: 1,
            max_y: 1,
            max_pieces: 1,
            max_len: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RandomInstance {
    pub seed: u64,
    pub instance: Instance,
    /// A piece had to be enlarged to the whole target after repeated
    /// failures to draw a covering family.
    pub enlarged: bool,
}

const COVER_ATTEMPTS: usize = 100;
const MAX_VERTICES: usize = 12;

/// A random filtered complex `X`, a simplicial map onto a random `Y`, and a
/// random cover of `Y` by subcomplexes whose pullback covers `X`.
/// Deterministic in `seed`.
pub fn random_instance(seed: u64, bounds: Bounds) -> RandomInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ny = rng.gen_range(1..=bounds.max_y.max(1)) as u32;

    let y = random_complex(&mut rng, ny);
    let max_x = bounds.max_simplices.max(1);
    let nx = rng.gen_range(1..=max_x.min(MAX_VERTICES)) as u32;
    let vertex_map: BTreeMap<u32, u32> = (0..nx).map(|v| (v, rng.gen_range(0..ny))).collect();
    let f = SimplicialMap::new(vertex_map);

    // grow X by random simplices whose image lies in Y, within the size cap
    let mut top: Vec<Simplex> = (0..nx).map(Simplex::vertex).collect();
    let mut x = SimplicialComplex::closure(top.clone());
    let verts: Vec<u32> = (0..nx).collect();
    let tries = rng.gen_range(0..=3 * nx as usize);
    for _ in 0..tries {
        let size = rng.gen_range(2..=4usize);
        if (nx as usize) < size {
            continue;
        }
        let pick: Vec<u32> = verts.choose_multiple(&mut rng, size).copied().collect();
        let s = Simplex::new(pick).expect("distinct vertices");
        if !f.image(&s).is_some_and(|img| y.contains(&img)) || x.contains(&s) {
            continue;
        }
        top.push(s);
        let grown = SimplicialComplex::closure(top.clone());
        if grown.len() > max_x {
            top.pop();
        } else {
            x = grown;
        }
    }

    let len = rng.gen_range(1..=bounds.max_len.max(1));
    let mut levels: BTreeMap<Simplex, usize> = x.iter().map(|s| (s.clone(), rng.gen_range(1..=len))).collect();
    for d in (1..=x.dim().unwrap_or(0)).rev() {
        for s in x.simplices(d) {
            let l = levels[s];
            for face in s.facets() {
                let e = levels.get_mut(&face).expect("closed");
                *e = (*e).max(l);
            }
        }
    }
    let complex = FilteredComplex::build(levels)
        .expect("levels are monotone")
        .0
        .with_len(len)
        .expect("levels bounded by len");

    let n_pieces = rng.gen_range(1..=bounds.max_pieces.max(1));
    let needed: BTreeSet<Simplex> = x.iter().filter_map(|s| f.image(s)).collect();
    let y_simplices: Vec<Simplex> = y.iter().cloned().collect();
    let mut enlarged = false;
    let mut pieces = None;
    for _ in 0..COVER_ATTEMPTS {
        let candidate: Vec<SimplicialComplex> = (0..n_pieces)
            .map(|_| SimplicialComplex::closure(y_simplices.iter().filter(|_| rng.gen_bool(0.5)).cloned()))
            .collect();
        if needed.iter().all(|s| candidate.iter().any(|c| c.contains(s))) {
            pieces = Some(candidate);
            break;
        }
    }
    let pieces = pieces.unwrap_or_else(|| {
        enlarged = true;
        let mut c: Vec<SimplicialComplex> = (0..n_pieces)
            .map(|_| SimplicialComplex::closure(y_simplices.iter().filter(|_| rng.gen_bool(0.5)).cloned()))
            .collect();
        c[0] = y.clone();
        c
    });
    let pieces = pieces
        .into_iter()
        .enumerate()
        .map(|(id, c)| CoverPiece::new(id as i64, c))
        .collect();
    let instance = Instance::new(complex, y, f, pieces).expect("generated instance is valid");
    RandomInstance {
        seed,
        instance,
        enlarged,
    }
}

fn random_complex(rng: &mut ChaCha8Rng, n: u32) -> SimplicialComplex {
    let verts: Vec<u32> = (0..n).collect();
    let mut top: Vec<Simplex> = (0..n).map(Simplex::vertex).collect();
    for size in [2usize, 3] {
        if (n as usize) < size {
            continue;
        }
        let count = rng.gen_range(0..=n as usize * 2 / size);
        for _ in 0..count {
            let pick: Vec<u32> = verts.choose_multiple(rng, size).copied().collect();
            top.push(Simplex::new(pick).expect("distinct vertices"));
        }
    }
    SimplicialComplex::closure(top)
}
