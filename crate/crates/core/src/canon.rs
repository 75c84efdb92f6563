//! Isomorphism classes of tiny graphs and the exact quotient edit distance.
//!
//! Everything here works on the u64 upper-triangle bitmask from [`Graph`],
//! minimizing over all n! vertex permutations. Caps: single-pair edit
//! distance up to n = 8, full enumeration and distance matrices up to n = 7.

use std::sync::OnceLock;

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Cap for a single exact edit-distance evaluation.
pub const EDIT_DISTANCE_CAP: usize = 8;
/// Cap for full class enumeration / distance matrices.
pub const ENUMERATION_CAP: usize = 7;

/// Per-permutation maps from pair rank to pair rank, for one fixed n.
struct PermTable {
    n: usize,
    pair_count: usize,
    /// maps[p * pair_count + r] = rank of the image of pair r under perm p.
    maps: Vec<u8>,
    perms: usize,
}

impl PermTable {
    fn build(n: usize) -> PermTable {
        let pair_count = n * (n - 1) / 2;
        let mut maps = Vec::new();
        let mut perms = 0;
        for perm in (0..n).permutations(n) {
            for i in 0..n {
                for j in (i + 1)..n {
                    let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
                    maps.push(Graph::pair_rank(n, a, b) as u8);
                }
            }
            perms += 1;
        }
        PermTable {
            n,
            pair_count,
            maps,
            perms,
        }
    }

    #[inline]
    fn apply(&self, perm: usize, mask: u64) -> u64 {
        let map = &self.maps[perm * self.pair_count..(perm + 1) * self.pair_count];
        let mut out = 0u64;
        let mut rest = mask;
        while rest != 0 {
            let r = rest.trailing_zeros() as usize;
            out |= 1 << map[r];
            rest &= rest - 1;
        }
        out
    }
}

fn perm_table(n: usize) -> &'static PermTable {
    static TABLES: [OnceLock<PermTable>; EDIT_DISTANCE_CAP + 1] =
        [const { OnceLock::new() }; EDIT_DISTANCE_CAP + 1];
    TABLES[n].get_or_init(|| PermTable::build(n))
}

/// True if edge set `a` precedes `b` lexicographically (as sorted pair
/// lists). For masks over the same n this is: at the lowest differing pair
/// rank, `a` has the edge.
#[inline]
fn lex_precedes(a: u64, b: u64) -> bool {
    let d = a ^ b;
    d != 0 && (a >> d.trailing_zeros()) & 1 == 1
}

/// One isomorphism class of n-vertex graphs.
#[derive(Debug, Clone)]
pub struct CanonicalClass {
    /// Lexicographically least edge set over all relabelings.
    pub representative: Graph,
    /// Number of labeled graphs in the class.
    pub class_size: u64,
    /// Position within the enumeration (sorted by edge count, then lex).
    pub index: usize,
}

/// All isomorphism classes for one n, plus the labeled-graph lookup table.
pub struct ClassEnumeration {
    n: usize,
    classes: Vec<CanonicalClass>,
    mask_to_class: Vec<u32>,
}

impl ClassEnumeration {
    /// Enumerates every isomorphism class by sweeping orbits of the
    /// permutation action over all 2^C(n,2) labeled graphs.
    pub fn enumerate(n: usize) -> Result<ClassEnumeration> {
        if n == 0 || n > ENUMERATION_CAP {
            return Err(Error::CapExceeded {
                what: "class enumeration",
                cap: ENUMERATION_CAP,
                got: n,
            });
        }
        let table = perm_table(n);
        let total = 1u64 << table.pair_count;
        let mut mask_to_class = vec![u32::MAX; total as usize];
        let mut reps: Vec<(u64, u64)> = Vec::new(); // (canonical mask, orbit size)
        let mut orbit = Vec::with_capacity(table.perms);
        for mask in 0..total {
            if mask_to_class[mask as usize] != u32::MAX {
                continue;
            }
            orbit.clear();
            for p in 0..table.perms {
                orbit.push(table.apply(p, mask));
            }
            orbit.sort_unstable();
            orbit.dedup();
            let rep = *orbit
                .iter()
                .reduce(|best, g| if lex_precedes(*g, *best) { g } else { best })
                .unwrap();
            let idx = reps.len() as u32;
            for &g in &orbit {
                mask_to_class[g as usize] = idx;
            }
            reps.push((rep, orbit.len() as u64));
        }
        // stable indexing: ascending edge count, then lexicographic
        let mut order: Vec<usize> = (0..reps.len()).collect();
        order.sort_by(|&a, &b| {
            let (ma, mb) = (reps[a].0, reps[b].0);
            ma.count_ones().cmp(&mb.count_ones()).then_with(|| {
                if lex_precedes(ma, mb) {
                    std::cmp::Ordering::Less
                } else if ma == mb {
                    std::cmp::Ordering::Equal
                } else {
                    std::cmp::Ordering::Greater
                }
            })
        });
        let mut remap = vec![0u32; reps.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new as u32;
        }
        for entry in mask_to_class.iter_mut() {
            *entry = remap[*entry as usize];
        }
        let classes = order
            .iter()
            .enumerate()
            .map(|(index, &old)| CanonicalClass {
                representative: Graph::from_mask(n, reps[old].0),
                class_size: reps[old].1,
                index,
            })
            .collect();
        Ok(ClassEnumeration {
            n,
            classes,
            mask_to_class,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn classes(&self) -> &[CanonicalClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Class index of an arbitrary labeled graph on the same n.
    pub fn class_of(&self, g: &Graph) -> Result<usize> {
        if g.n() != self.n {
            return Err(Error::SizeMismatch {
                left: g.n(),
                right: self.n,
            });
        }
        Ok(self.mask_to_class[g.edge_mask()? as usize] as usize)
    }
}

/// Exact edit distance: minimum symmetric difference over all relabelings
/// of `g`, with an early exit at the edge-count lower bound.
pub fn edit_distance(g: &Graph, h: &Graph) -> Result<u64> {
    if g.n() != h.n() {
        return Err(Error::SizeMismatch {
            left: g.n(),
            right: h.n(),
        });
    }
    let n = g.n();
    if n > EDIT_DISTANCE_CAP {
        return Err(Error::CapExceeded {
            what: "exact edit distance",
            cap: EDIT_DISTANCE_CAP,
            got: n,
        });
    }
    if n <= 1 {
        return Ok(0);
    }
    let (a, b) = (g.edge_mask()?, h.edge_mask()?);
    Ok(mask_edit_distance(n, a, b))
}

fn mask_edit_distance(n: usize, a: u64, b: u64) -> u64 {
    let lower = (a.count_ones() as i64 - b.count_ones() as i64).unsigned_abs();
    let table = perm_table(n);
    let mut best = u64::MAX;
    for p in 0..table.perms {
        let d = (table.apply(p, a) ^ b).count_ones() as u64;
        if d < best {
            best = d;
            if best == lower {
                break;
            }
        }
    }
    best
}

/// Symmetric matrix of pairwise distances between class representatives.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    k: usize,
    d: Vec<u32>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.d[i * self.k + j]
    }
}

/// Pairwise exact edit distances between all representatives, parallel over
/// the upper triangle.
pub fn distance_matrix(enumeration: &ClassEnumeration) -> Result<DistanceMatrix> {
    let n = enumeration.n();
    let k = enumeration.len();
    let masks: Vec<u64> = enumeration
        .classes()
        .iter()
        .map(|c| c.representative.edge_mask())
        .collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| ((i + 1)..k).map(move |j| (i, j)))
        .collect();
    let dists: Vec<u32> = pairs
        .par_iter()
        .map(|&(i, j)| mask_edit_distance(n, masks[i], masks[j]) as u32)
        .collect();
    let mut d = vec![0u32; k * k];
    for (&(i, j), &dist) in pairs.iter().zip(&dists) {
        d[i * k + j] = dist;
        d[j * k + i] = dist;
    }
    Ok(DistanceMatrix { k, d })
}
