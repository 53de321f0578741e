//! Finite groups as multiplication tables, product groups, subgroup
//! embeddings and the joint-conjugacy combinatorics of tuples.

use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use std::sync::Arc;

/// Order bound for groups meant to feed the cohomology engine.
pub const MAX_COHOMOLOGY_ORDER: usize = 64;
/// Hard bound for any table we are willing to construct (products included).
pub const MAX_TABLE_ORDER: usize = 4096;
const TUPLE_BUDGET: usize = 1_000_000;

/// A finite group given by its multiplication table.
#[derive(Clone)]
pub struct GroupTable {
    name: String,
    order: usize,
    /// table[a * order + b] = a * b
    table: Vec<u32>,
    identity: usize,
    inverse: Vec<u32>,
    /// set when the table was built as a direct product
    product_of: Option<(Arc<GroupTable>, Arc<GroupTable>)>,
}

impl GroupTable {
    /// Validate and wrap a raw multiplication table. Associativity is
    /// checked exhaustively up to order 64 and on a fixed-seed sample above.
    pub fn new(name: impl Into<String>, order: usize, table: Vec<u32>) -> Result<Self> {
        let name = name.into();
        if order == 0 || table.len() != order * order {
            return Err(Error::InvalidInput(format!(
                "table for {name} must be {order}x{order}"
            )));
        }
        if order > MAX_TABLE_ORDER {
            return Err(Error::OrderTooLarge(format!("{name} has order {order}")));
        }
        for &x in &table {
            if x as usize >= order {
                return Err(Error::InvalidInput(format!(
                    "table entry {x} out of range in {name}"
                )));
            }
        }
        // Latin square
        for a in 0..order {
            let mut seen_row = vec![false; order];
            let mut seen_col = vec![false; order];
            for b in 0..order {
                let r = table[a * order + b] as usize;
                let c = table[b * order + a] as usize;
                if seen_row[r] || seen_col[c] {
                    return Err(Error::InvalidInput(format!(
                        "table of {name} is not a Latin square"
                    )));
                }
                seen_row[r] = true;
                seen_col[c] = true;
            }
        }
        let identity = (0..order)
            .find(|&e| {
                (0..order).all(|a| {
                    table[e * order + a] as usize == a && table[a * order + e] as usize == a
                })
            })
            .ok_or_else(|| Error::InvalidInput(format!("{name} has no identity")))?;
        let mut inverse = vec![u32::MAX; order];
        for a in 0..order {
            let inv = (0..order)
                .find(|&b| {
                    table[a * order + b] as usize == identity
                        && table[b * order + a] as usize == identity
                })
                .ok_or_else(|| Error::InvalidInput(format!("{name} lacks inverses")))?;
            inverse[a] = inv as u32;
        }
        let mul = |a: usize, b: usize| table[a * order + b] as usize;
        if order <= MAX_COHOMOLOGY_ORDER {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                            return Err(Error::InvalidInput(format!(
                                "{name} is not associative"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x6a55);
            for _ in 0..20_000 {
                let (a, b, c) = (
                    rng.gen_range(0..order),
                    rng.gen_range(0..order),
                    rng.gen_range(0..order),
                );
                if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                    return Err(Error::InvalidInput(format!("{name} is not associative")));
                }
            }
        }
        Ok(GroupTable { name, order, table, identity, inverse, product_of: None })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    /// h g h^{-1}
    pub fn conjugate(&self, h: usize, g: usize) -> usize {
        self.mul(self.mul(h, g), self.inv(h))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut n = 1;
        while x != self.identity {
            x = self.mul(x, g);
            n += 1;
        }
        n
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// An element of full order, when the group is cyclic.
    pub fn cyclic_generator(&self) -> Option<usize> {
        (0..self.order).find(|&g| self.element_order(g) == self.order)
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic_generator().is_some()
    }

    pub fn factors(&self) -> Option<(Arc<GroupTable>, Arc<GroupTable>)> {
        self.product_of.clone()
    }

    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.order.to_le_bytes());
        for &x in &self.table {
            h.update(x.to_le_bytes());
        }
        crate::linalg::hex_string(&h.finalize())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<u32>> = (0..self.order)
            .map(|a| self.table[a * self.order..(a + 1) * self.order].to_vec())
            .collect();
        serde_json::json!({ "order": self.order, "table": rows })
    }

    pub fn from_json(name: &str, value: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            order: usize,
            table: Vec<Vec<u32>>,
        }
        let raw: Raw = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidInput(format!("group json: {e}")))?;
        if raw.table.len() != raw.order || raw.table.iter().any(|r| r.len() != raw.order) {
            return Err(Error::InvalidInput("group json table shape".into()));
        }
        let flat: Vec<u32> = raw.table.into_iter().flatten().collect();
        GroupTable::new(name, raw.order, flat)
    }
}

impl std::fmt::Debug for GroupTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}(order {})", self.name, self.order)
    }
}

/// Group families constructible by name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric3,
    Quaternion8,
    Product(Box<GroupSpec>, Box<GroupSpec>),
}

impl GroupSpec {
    /// Parse names like "c4", "d3", "s3", "q8", "c2xc2".
    pub fn parse(s: &str) -> Result<GroupSpec> {
        let s = s.trim().to_ascii_lowercase();
        if let Some((left, right)) = s.split_once('x') {
            return Ok(GroupSpec::Product(
                Box::new(GroupSpec::parse(left)?),
                Box::new(GroupSpec::parse(right)?),
            ));
        }
        if s == "s3" {
            return Ok(GroupSpec::Symmetric3);
        }
        if s == "q8" {
            return Ok(GroupSpec::Quaternion8);
        }
        if let Some(n) = s.strip_prefix('c') {
            let n: usize = n.parse().map_err(|_| Error::UnknownFamily(s.clone()))?;
            return Ok(GroupSpec::Cyclic(n));
        }
        if let Some(n) = s.strip_prefix('d') {
            let n: usize = n.parse().map_err(|_| Error::UnknownFamily(s.clone()))?;
            return Ok(GroupSpec::Dihedral(n));
        }
        Err(Error::UnknownFamily(s))
    }
}

/// Build a named finite group. Index 0 is always the identity.
pub fn named_group(spec: &GroupSpec) -> Result<Arc<GroupTable>> {
    match spec {
        GroupSpec::Cyclic(n) => {
            if *n == 0 {
                return Err(Error::UnknownFamily("c0".into()));
            }
            if *n > MAX_COHOMOLOGY_ORDER {
                return Err(Error::OrderTooLarge(format!("c{n}")));
            }
            let table: Vec<u32> = (0..*n)
                .flat_map(|a| (0..*n).map(move |b| ((a + b) % n) as u32))
                .collect();
            Ok(Arc::new(GroupTable::new(format!("c{n}"), *n, table)?))
        }
        GroupSpec::Dihedral(n) => {
            if *n == 0 {
                return Err(Error::UnknownFamily("d0".into()));
            }
            let order = 2 * n;
            if order > MAX_COHOMOLOGY_ORDER {
                return Err(Error::OrderTooLarge(format!("d{n}")));
            }
            // elements: r^i at index i, s r^i at index n + i
            let idx = |flip: bool, i: usize| if flip { n + i } else { i };
            let mut table = vec![0u32; order * order];
            for f1 in [false, true] {
                for i in 0..*n {
                    for f2 in [false, true] {
                        for j in 0..*n {
                            // r^i s = s r^{-i}:
                            //   (r^i)(r^j) = r^{i+j}
                            //   (r^i)(s r^j) = s r^{j-i}
                            //   (s r^i)(r^j) = s r^{i+j}
                            //   (s r^i)(s r^j) = r^{j-i}
                            let (f, k) = match (f1, f2) {
                                (false, false) => (false, (i + j) % n),
                                (false, true) => (true, (j + n - i) % n),
                                (true, false) => (true, (i + j) % n),
                                (true, true) => (false, (j + n - i) % n),
                            };
                            table[idx(f1, i) * order + idx(f2, j)] = idx(f, k) as u32;
                        }
                    }
                }
            }
            Ok(Arc::new(GroupTable::new(format!("d{n}"), order, table)?))
        }
        GroupSpec::Symmetric3 => {
            // permutations of {0,1,2}: identity, 3-cycles, transpositions
            let perms: [[usize; 3]; 6] = [
                [0, 1, 2],
                [1, 2, 0],
                [2, 0, 1],
                [1, 0, 2],
                [0, 2, 1],
                [2, 1, 0],
            ];
            let find = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap();
            let mut table = vec![0u32; 36];
            for (a, pa) in perms.iter().enumerate() {
                for (b, pb) in perms.iter().enumerate() {
                    let comp = [pa[pb[0]], pa[pb[1]], pa[pb[2]]];
                    table[a * 6 + b] = find(&comp) as u32;
                }
            }
            Ok(Arc::new(GroupTable::new("s3", 6, table)?))
        }
        GroupSpec::Quaternion8 => {
            // 1, -1, i, -i, j, -j, k, -k
            let base_mul = |a: usize, b: usize| -> usize {
                let unit = |x: usize| x / 2; // 0:1, 1:i, 2:j, 3:k
                let sign = |x: usize| x % 2 == 1;
                let (ua, sa) = (unit(a), sign(a));
                let (ub, sb) = (unit(b), sign(b));
                let (uc, sc) = match (ua, ub) {
                    (0, u) => (u, false),
                    (u, 0) => (u, false),
                    (1, 1) | (2, 2) | (3, 3) => (0, true),
                    (1, 2) => (3, false),
                    (2, 1) => (3, true),
                    (2, 3) => (1, false),
                    (3, 2) => (1, true),
                    (3, 1) => (2, false),
                    (1, 3) => (2, true),
                    _ => unreachable!(),
                };
                uc * 2 + usize::from(sa ^ sb ^ sc)
            };
            let mut table = vec![0u32; 64];
            for a in 0..8 {
                for b in 0..8 {
                    table[a * 8 + b] = base_mul(a, b) as u32;
                }
            }
            Ok(Arc::new(GroupTable::new("q8", 8, table)?))
        }
        GroupSpec::Product(l, r) => {
            let lg = named_group(l)?;
            let rg = named_group(r)?;
            product(&lg, &rg)
        }
    }
}

/// Direct product with lexicographic indexing (g, h) -> g * |H| + h.
pub fn product(g: &Arc<GroupTable>, h: &Arc<GroupTable>) -> Result<Arc<GroupTable>> {
    let order = g.order() * h.order();
    if order > MAX_TABLE_ORDER {
        return Err(Error::OrderTooLarge(format!(
            "{} x {} has order {order}",
            g.name(),
            h.name()
        )));
    }
    let hn = h.order();
    let mut table = vec![0u32; order * order];
    for a1 in 0..g.order() {
        for a2 in 0..hn {
            for b1 in 0..g.order() {
                for b2 in 0..hn {
                    let prod = g.mul(a1, b1) * hn + h.mul(a2, b2);
                    table[(a1 * hn + a2) * order + (b1 * hn + b2)] = prod as u32;
                }
            }
        }
    }
    let mut gt = GroupTable::new(format!("{}x{}", g.name(), h.name()), order, table)?;
    gt.product_of = Some((g.clone(), h.clone()));
    Ok(Arc::new(gt))
}

/// Group homomorphism given by its image array; the homomorphism property is
/// checked exhaustively on construction.
#[derive(Clone)]
pub struct GroupHom {
    pub source: Arc<GroupTable>,
    pub target: Arc<GroupTable>,
    image: Vec<u32>,
}

impl GroupHom {
    pub fn new(
        source: Arc<GroupTable>,
        target: Arc<GroupTable>,
        image: Vec<u32>,
    ) -> Result<Self> {
        if image.len() != source.order() {
            return Err(Error::InvalidInput("image array length".into()));
        }
        for a in source.elements() {
            for b in source.elements() {
                let lhs = target.mul(image[a] as usize, image[b] as usize);
                let rhs = image[source.mul(a, b)] as usize;
                if lhs != rhs {
                    return Err(Error::InvalidInput(format!(
                        "not a homomorphism at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(GroupHom { source, target, image })
    }

    pub fn apply(&self, a: usize) -> usize {
        self.image[a] as usize
    }

    pub fn identity(g: &Arc<GroupTable>) -> Self {
        GroupHom {
            source: g.clone(),
            target: g.clone(),
            image: (0..g.order() as u32).collect(),
        }
    }

    /// g -> (g, g) into the product G x G.
    pub fn diagonal(g: &Arc<GroupTable>, gxg: &Arc<GroupTable>) -> Result<Self> {
        let n = g.order();
        if gxg.order() != n * n {
            return Err(Error::GroupMismatch("diagonal needs G x G".into()));
        }
        GroupHom::new(g.clone(), gxg.clone(), (0..n).map(|a| (a * n + a) as u32).collect())
    }

    /// g -> (g, e) into the product G x G (the left factor).
    pub fn left_inclusion(g: &Arc<GroupTable>, gxg: &Arc<GroupTable>) -> Result<Self> {
        let n = g.order();
        if gxg.order() != n * n {
            return Err(Error::GroupMismatch("left inclusion needs G x G".into()));
        }
        GroupHom::new(g.clone(), gxg.clone(), (0..n).map(|a| (a * n) as u32).collect())
    }
}

/// Joint conjugacy class of s-tuples with its stabilizer.
#[derive(Clone, Debug)]
pub struct TupleOrbit {
    pub arity: usize,
    /// lexicographically minimal member
    pub representative: Vec<usize>,
    /// sorted orbit members
    pub members: Vec<Vec<usize>>,
    /// intersection of the centralizers of the representative entries
    pub stabilizer: Vec<usize>,
}

/// Centralizer of an element, as a sorted element list.
pub fn centralizer(g: &GroupTable, a: usize) -> Vec<usize> {
    g.elements().filter(|&h| g.mul(h, a) == g.mul(a, h)).collect()
}

/// Orbits of (nontrivial) s-tuples under simultaneous conjugation, sorted by
/// representative. Representatives are lexicographically minimal.
pub fn tuple_conjugacy_classes(
    g: &Arc<GroupTable>,
    s: usize,
    nontrivial_only: bool,
) -> Result<Vec<TupleOrbit>> {
    let m = g.order();
    let pool: Vec<usize> = if nontrivial_only {
        g.elements().filter(|&x| x != g.identity()).collect()
    } else {
        g.elements().collect()
    };
    let count = pool
        .len()
        .checked_pow(s as u32)
        .filter(|&c| c <= TUPLE_BUDGET)
        .ok_or_else(|| Error::TooManyTuples(format!("{}^{s} tuples", pool.len())))?;
    let _ = count;
    let mut seen: std::collections::HashSet<Vec<usize>> = std::collections::HashSet::new();
    let mut orbits = Vec::new();
    let mut indices = vec![0usize; s];
    let mut tuple = vec![0usize; s];
    'outer: loop {
        for (t, &i) in tuple.iter_mut().zip(&indices) {
            *t = pool[i];
        }
        if !seen.contains(&tuple) {
            let mut members: Vec<Vec<usize>> = g
                .elements()
                .map(|h| tuple.iter().map(|&x| g.conjugate(h, x)).collect())
                .collect();
            members.sort();
            members.dedup();
            for mem in &members {
                seen.insert(mem.clone());
            }
            let representative = members[0].clone();
            let stabilizer: Vec<usize> = g
                .elements()
                .filter(|&h| representative.iter().all(|&x| g.conjugate(h, x) == x))
                .collect();
            debug_assert_eq!(members.len() * stabilizer.len(), m);
            orbits.push(TupleOrbit { arity: s, representative, members, stabilizer });
        }
        if s == 0 {
            break;
        }
        let mut pos = s;
        loop {
            if pos == 0 {
                break 'outer;
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < pool.len() {
                break;
            }
            indices[pos] = 0;
        }
    }
    orbits.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(orbits)
}

/// The subgroup on the given element list (which must be closed), as its own
/// GroupTable plus the embedding back into the ambient group.
pub fn subgroup_table(
    g: &Arc<GroupTable>,
    elements: &[usize],
) -> Result<(Arc<GroupTable>, GroupHom)> {
    let mut elems = elements.to_vec();
    elems.sort();
    elems.dedup();
    let pos = |x: usize| -> Option<usize> { elems.binary_search(&x).ok() };
    let n = elems.len();
    let mut table = vec![0u32; n * n];
    for (i, &a) in elems.iter().enumerate() {
        for (j, &b) in elems.iter().enumerate() {
            let ab = g.mul(a, b);
            let k = pos(ab).ok_or_else(|| {
                Error::InvalidInput("element list is not closed under multiplication".into())
            })?;
            table[i * n + j] = k as u32;
        }
    }
    let sub = Arc::new(GroupTable::new(format!("{}-sub{}", g.name(), n), n, table)?);
    let hom =
        GroupHom::new(sub.clone(), g.clone(), elems.iter().map(|&x| x as u32).collect())?;
    Ok((sub, hom))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_groups() {
        let c1 = named_group(&GroupSpec::Cyclic(1)).unwrap();
        assert_eq!(c1.order(), 1);
        let c2 = named_group(&GroupSpec::Cyclic(2)).unwrap();
        assert_eq!(c2.order(), 2);
        assert_eq!(c2.inv(1), 1);
        assert!(c2.is_cyclic());
    }

    #[test]
    fn symmetric_three_census() {
        let s3 = named_group(&GroupSpec::Symmetric3).unwrap();
        assert_eq!(s3.order(), 6);
        let involutions = s3.elements().filter(|&g| s3.element_order(g) == 2).count();
        assert_eq!(involutions, 3);
        let threes = s3.elements().filter(|&g| s3.element_order(g) == 3).count();
        assert_eq!(threes, 2);
        assert!(!s3.is_abelian());
    }

    #[test]
    fn dihedral_and_quaternion() {
        let d3 = named_group(&GroupSpec::Dihedral(3)).unwrap();
        assert_eq!(d3.order(), 6);
        assert!(!d3.is_abelian());
        let q8 = named_group(&GroupSpec::Quaternion8).unwrap();
        assert_eq!(q8.order(), 8);
        // exactly one involution in q8
        assert_eq!(q8.elements().filter(|&g| q8.element_order(g) == 2).count(), 1);
    }

    #[test]
    fn products() {
        let c2 = named_group(&GroupSpec::Cyclic(2)).unwrap();
        let c3 = named_group(&GroupSpec::Cyclic(3)).unwrap();
        let klein = product(&c2, &c2).unwrap();
        assert!(klein.elements().skip(1).all(|g| klein.element_order(g) == 2));
        let c6 = product(&c2, &c3).unwrap();
        assert!(c6.is_cyclic());
        let trivial = named_group(&GroupSpec::Cyclic(1)).unwrap();
        let same = product(&trivial, &c3).unwrap();
        assert!(same.is_cyclic());
        assert_eq!(same.order(), 3);
    }

    #[test]
    fn centralizers_in_s3() {
        let s3 = named_group(&GroupSpec::Symmetric3).unwrap();
        assert_eq!(centralizer(&s3, s3.identity()).len(), 6);
        for g in s3.elements() {
            match s3.element_order(g) {
                2 => assert_eq!(centralizer(&s3, g).len(), 2),
                3 => assert_eq!(centralizer(&s3, g).len(), 3),
                _ => {}
            }
        }
    }

    #[test]
    fn tuple_orbits() {
        let c2 = named_group(&GroupSpec::Cyclic(2)).unwrap();
        let orbits = tuple_conjugacy_classes(&c2, 1, true).unwrap();
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].stabilizer.len(), 2);

        let s3 = named_group(&GroupSpec::Symmetric3).unwrap();
        let o1 = tuple_conjugacy_classes(&s3, 1, true).unwrap();
        assert_eq!(o1.len(), 2);
        let mut stab_sizes: Vec<usize> = o1.iter().map(|o| o.stabilizer.len()).collect();
        stab_sizes.sort();
        assert_eq!(stab_sizes, vec![2, 3]);
        // Burnside: (25 + 3*1 + 2*4) / 6 = 6 orbits of nontrivial pairs
        let o2 = tuple_conjugacy_classes(&s3, 2, true).unwrap();
        assert_eq!(o2.len(), 6);
        for orbit in &o2 {
            assert_eq!(orbit.members.len() * orbit.stabilizer.len(), 6);
        }
    }

    #[test]
    fn orbit_census_invariant_under_relabeling() {
        let s3 = named_group(&GroupSpec::Symmetric3).unwrap();
        let perm: Vec<usize> = vec![0, 2, 1, 5, 3, 4];
        let mut inv_perm = vec![0; 6];
        for (i, &x) in perm.iter().enumerate() {
            inv_perm[x] = i;
        }
        let table: Vec<u32> = (0..6)
            .flat_map(|a| {
                let (perm, inv_perm, s3) = (perm.clone(), inv_perm.clone(), s3.clone());
                (0..6).map(move |b| perm[s3.mul(inv_perm[a], inv_perm[b])] as u32)
            })
            .collect();
        let relabeled = Arc::new(GroupTable::new("s3-relabeled", 6, table).unwrap());
        let canon = |orbits: &[TupleOrbit]| {
            let mut v: Vec<(usize, usize)> = orbits
                .iter()
                .map(|o| (o.members.len(), o.stabilizer.len()))
                .collect();
            v.sort();
            v
        };
        let a = tuple_conjugacy_classes(&s3, 2, true).unwrap();
        let b = tuple_conjugacy_classes(&relabeled, 2, true).unwrap();
        assert_eq!(canon(&a), canon(&b));
    }

    #[test]
    fn abelian_singleton_orbits() {
        let c4 = named_group(&GroupSpec::Cyclic(4)).unwrap();
        let orbits = tuple_conjugacy_classes(&c4, 1, true).unwrap();
        assert_eq!(orbits.len(), 3);
        assert!(orbits.iter().all(|o| o.members.len() == 1 && o.stabilizer.len() == 4));
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(GroupSpec::parse("c4").unwrap(), GroupSpec::Cyclic(4));
        assert_eq!(GroupSpec::parse("S3").unwrap(), GroupSpec::Symmetric3);
        assert!(matches!(GroupSpec::parse("c2xc2").unwrap(), GroupSpec::Product(_, _)));
        assert!(GroupSpec::parse("z5").is_err());
        assert!(named_group(&GroupSpec::Cyclic(100)).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let s3 = named_group(&GroupSpec::Symmetric3).unwrap();
        let j = s3.to_json();
        let back = GroupTable::from_json("s3", &j).unwrap();
        assert_eq!(back.order(), 6);
        assert_eq!(back.content_hash(), s3.content_hash());
    }

    #[test]
    fn subgroup_embedding() {
        let s3 = named_group(&GroupSpec::Symmetric3).unwrap();
        let z = centralizer(&s3, 1); // centralizer of a 3-cycle
        let (sub, emb) = subgroup_table(&s3, &z).unwrap();
        assert_eq!(sub.order(), 3);
        assert!(sub.is_cyclic());
        assert_eq!(emb.apply(sub.identity()), s3.identity());
    }
}
