//! Modules over group rings: free-over-Z modules with an action by
//! invertible integer matrices, and the constructions the cohomology engine
//! feeds on (the group-ring bimodule, augmentation ideals and their tensor
//! powers, twisted Hom modules, restrictions, coinduced modules, evaluation
//! and pairing maps).

use crate::groups::{GroupHom, GroupTable};
use crate::linalg::IntMatrix;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::{Arc, OnceLock};

const EXHAUSTIVE_ACTION_CHECK: usize = 12;

/// A finitely generated free-over-Z module with a group action.
pub struct GModule {
    name: String,
    group: Arc<GroupTable>,
    rank: usize,
    action: Vec<IntMatrix>,
    labels: Option<Vec<String>>,
    /// Some(p): coefficients are to be reduced mod p downstream
    characteristic: Option<u64>,
    hash: OnceLock<String>,
}

impl GModule {
    /// Validate the action: identity acts as identity, the homomorphism law
    /// holds (exhaustively for |G| <= 12, fixed-seed sampled above), and
    /// every action matrix is invertible over Z.
    pub fn new(
        name: impl Into<String>,
        group: Arc<GroupTable>,
        rank: usize,
        action: Vec<IntMatrix>,
    ) -> Result<Arc<Self>> {
        let name = name.into();
        if action.len() != group.order() {
            return Err(Error::InvalidInput(format!(
                "{name}: one action matrix per group element"
            )));
        }
        for (g, m) in action.iter().enumerate() {
            if m.rows() != rank || m.cols() != rank {
                return Err(Error::InvalidInput(format!(
                    "{name}: action matrix of element {g} is not {rank}x{rank}"
                )));
            }
        }
        if !action[group.identity()].is_identity() {
            return Err(Error::InvalidInput(format!("{name}: identity must act as identity")));
        }
        let check_pair = |a: usize, b: usize| -> bool {
            action[a].mul(&action[b]) == action[group.mul(a, b)]
        };
        if group.order() <= EXHAUSTIVE_ACTION_CHECK {
            for a in group.elements() {
                for b in group.elements() {
                    if !check_pair(a, b) {
                        return Err(Error::InvalidInput(format!(
                            "{name}: action law fails at ({a}, {b})"
                        )));
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x4d0d);
            for _ in 0..48 {
                let a = rng.gen_range(0..group.order());
                let b = rng.gen_range(0..group.order());
                if !check_pair(a, b) {
                    return Err(Error::InvalidInput(format!(
                        "{name}: action law fails at ({a}, {b})"
                    )));
                }
            }
        }
        // invertibility over Z is forced by the group law; assert it
        for g in group.elements() {
            if !action[g].mul(&action[group.inv(g)]).is_identity() {
                return Err(Error::InvalidInput(format!(
                    "{name}: action of element {g} is not invertible over Z"
                )));
            }
        }
        Ok(Arc::new(GModule {
            name,
            group,
            rank,
            action,
            labels: None,
            characteristic: None,
            hash: OnceLock::new(),
        }))
    }

    pub fn with_labels(self: Arc<Self>, labels: Vec<String>) -> Arc<Self> {
        let mut m = GModule {
            name: self.name.clone(),
            group: self.group.clone(),
            rank: self.rank,
            action: self.action.clone(),
            labels: Some(labels),
            characteristic: self.characteristic,
            hash: OnceLock::new(),
        };
        m.labels.as_ref().map(|l| assert_eq!(l.len(), m.rank));
        Arc::new(m)
    }

    pub fn with_characteristic(self: &Arc<Self>, p: u64) -> Arc<Self> {
        Arc::new(GModule {
            name: format!("{}%{}", self.name, p),
            group: self.group.clone(),
            rank: self.rank,
            action: self.action.clone(),
            labels: self.labels.clone(),
            characteristic: Some(p),
            hash: OnceLock::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> &Arc<GroupTable> {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn act(&self, g: usize) -> &IntMatrix {
        &self.action[g]
    }

    pub fn characteristic(&self) -> Option<u64> {
        self.characteristic
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn same_group(&self, other: &GModule) -> bool {
        self.group.order() == other.group.order()
            && self.group.content_hash() == other.group.content_hash()
    }

    pub fn content_hash(&self) -> &str {
        self.hash.get_or_init(|| {
            use sha2::{Digest, Sha256};
            let mut h = Sha256::new();
            h.update(self.group.content_hash().as_bytes());
            h.update(self.rank.to_le_bytes());
            if let Some(p) = self.characteristic {
                h.update(p.to_le_bytes());
            }
            for m in &self.action {
                h.update(m.content_hash().as_bytes());
            }
            crate::linalg::hex_string(&h.finalize())
        })
    }
}

impl std::fmt::Debug for GModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (rank {} over {:?})", self.name, self.rank, self.group)
    }
}

/// Equivariant map between modules of the same acting group.
#[derive(Clone)]
pub struct ModuleMap {
    pub source: Arc<GModule>,
    pub target: Arc<GModule>,
    pub matrix: IntMatrix,
}

impl ModuleMap {
    pub fn new(source: Arc<GModule>, target: Arc<GModule>, matrix: IntMatrix) -> Result<Self> {
        if !source.same_group(&target) {
            return Err(Error::GroupMismatch(format!(
                "{} and {} live over different groups",
                source.name(),
                target.name()
            )));
        }
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(Error::DimensionMismatch(format!(
                "map {}x{} between ranks {} -> {}",
                matrix.rows(),
                matrix.cols(),
                source.rank(),
                target.rank()
            )));
        }
        let group = source.group().clone();
        let check = |g: usize| -> bool {
            matrix.mul(source.act(g)) == target.act(g).mul(&matrix)
        };
        if group.order() <= EXHAUSTIVE_ACTION_CHECK {
            for g in group.elements() {
                if !check(g) {
                    return Err(Error::InvalidInput(format!(
                        "map {} -> {} is not equivariant at element {g}",
                        source.name(),
                        target.name()
                    )));
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x33aa);
            for _ in 0..32 {
                let g = rng.gen_range(0..group.order());
                if !check(g) {
                    return Err(Error::InvalidInput(format!(
                        "map {} -> {} is not equivariant at element {g}",
                        source.name(),
                        target.name()
                    )));
                }
            }
        }
        Ok(ModuleMap { source, target, matrix })
    }

    pub fn identity(m: &Arc<GModule>) -> Self {
        ModuleMap {
            source: m.clone(),
            target: m.clone(),
            matrix: IntMatrix::identity(m.rank()),
        }
    }

    pub fn zero(source: &Arc<GModule>, target: &Arc<GModule>) -> Result<Self> {
        ModuleMap::new(
            source.clone(),
            target.clone(),
            IntMatrix::zero(target.rank(), source.rank()),
        )
    }

    pub fn compose(&self, inner: &ModuleMap) -> Result<ModuleMap> {
        ModuleMap::new(
            inner.source.clone(),
            self.target.clone(),
            self.matrix.mul(&inner.matrix),
        )
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.matrix.apply(v)
    }
}

/// The trivial module Z.
pub fn trivial_z(group: &Arc<GroupTable>) -> Arc<GModule> {
    let action = vec![IntMatrix::identity(1); group.order()];
    GModule::new(format!("Z[{}-triv]", group.name()), group.clone(), 1, action)
        .expect("trivial module is valid")
}

/// The trivial module with coefficients to be reduced mod p downstream.
pub fn trivial_fp(group: &Arc<GroupTable>, p: u64) -> Arc<GModule> {
    trivial_z(group).with_characteristic(p)
}

/// Rank-one module twisted by a homomorphism to {+-1}, found as an index-2
/// subgroup when one exists (trivial action otherwise).
pub fn sign_module(group: &Arc<GroupTable>) -> Arc<GModule> {
    let n = group.order();
    let chi: Vec<i64> = if n % 2 == 0 {
        index_two_subgroup(group)
            .map(|sub| {
                (0..n)
                    .map(|g| if sub.contains(&g) { 1 } else { -1 })
                    .collect()
            })
            .unwrap_or_else(|| vec![1; n])
    } else {
        vec![1; n]
    };
    let action: Vec<IntMatrix> = chi
        .iter()
        .map(|&s| IntMatrix::from_dense(&[vec![s]]))
        .collect();
    GModule::new(format!("Z[{}-sign]", group.name()), group.clone(), 1, action)
        .expect("sign module is valid")
}

/// First index-2 subgroup in lexicographic order, by brute force; only used
/// for small named groups.
fn index_two_subgroup(group: &Arc<GroupTable>) -> Option<Vec<usize>> {
    let n = group.order();
    if n % 2 != 0 || n > 16 {
        return None;
    }
    // a subgroup of index 2 is a union of cosets; search over subsets
    // generated by candidate element sets
    let half = n / 2;
    let elements: Vec<usize> = group.elements().collect();
    let mut best: Option<Vec<usize>> = None;
    let mut try_subset = |subset: &Vec<usize>| {
        if subset.len() != half || !subset.contains(&group.identity()) {
            return;
        }
        let set: std::collections::HashSet<usize> = subset.iter().copied().collect();
        let closed = subset
            .iter()
            .all(|&a| subset.iter().all(|&b| set.contains(&group.mul(a, b))));
        if closed {
            match &best {
                Some(b) if *b <= *subset => {}
                _ => best = Some(subset.clone()),
            }
        }
    };
    // enumerate candidate subgroups as subsets of size n/2 via bitmask
    if n <= 16 {
        let total: u32 = 1 << n;
        for mask in 0..total {
            if (mask as u32).count_ones() as usize != half {
                continue;
            }
            let subset: Vec<usize> = elements
                .iter()
                .copied()
                .filter(|&g| mask & (1 << g) != 0)
                .collect();
            try_subset(&subset);
        }
    }
    best
}

/// The group ring Z[G] as a module over G x G: (g, h) . a = g a h^{-1}.
/// The basis is indexed by the elements of G.
pub fn group_ring_bimodule(
    g: &Arc<GroupTable>,
    gamma: &Arc<GroupTable>,
) -> Result<Arc<GModule>> {
    let n = g.order();
    if gamma.order() != n * n {
        return Err(Error::GroupMismatch("bimodule needs the product group G x G".into()));
    }
    let action: Vec<IntMatrix> = gamma
        .elements()
        .map(|gh| {
            let (gg, hh) = (gh / n, gh % n);
            IntMatrix::from_triples(
                n,
                n,
                (0..n).map(|a| (g.mul(g.mul(gg, a), g.inv(hh)), a, BigInt::one())),
            )
        })
        .collect();
    GModule::new(format!("Z[{}]", g.name()), gamma.clone(), n, action)
}

/// The augmentation ideal I of Z[G] as a G x G module, with its inclusion
/// into the group-ring bimodule and the augmentation onto the trivial
/// module. Basis: g - 1 for g != e, ordered by element index.
pub fn augmentation_ideal(
    g: &Arc<GroupTable>,
    gamma: &Arc<GroupTable>,
) -> Result<(Arc<GModule>, ModuleMap, ModuleMap)> {
    let n = g.order();
    let zg = group_ring_bimodule(g, gamma)?;
    let basis: Vec<usize> = g.elements().filter(|&x| x != g.identity()).collect();
    let pos = |x: usize| -> Option<usize> { basis.binary_search(&x).ok() };
    let rank = basis.len();
    let action: Vec<IntMatrix> = gamma
        .elements()
        .map(|gh| {
            let (gg, hh) = (gh / n, gh % n);
            let mut triples: Vec<(usize, usize, BigInt)> = Vec::new();
            for (col, &a) in basis.iter().enumerate() {
                // (g,h).(a-1) = (g a h^{-1} - 1) - (g h^{-1} - 1)
                let lead = g.mul(g.mul(gg, a), g.inv(hh));
                let tail = g.mul(gg, g.inv(hh));
                if let Some(r) = pos(lead) {
                    triples.push((r, col, BigInt::one()));
                }
                if let Some(r) = pos(tail) {
                    triples.push((r, col, -BigInt::one()));
                }
            }
            IntMatrix::from_triples(rank, rank, triples)
        })
        .collect();
    let labels: Vec<String> = basis.iter().map(|&x| format!("g{}-1", x)).collect();
    let ideal = GModule::new(format!("I[{}]", g.name()), gamma.clone(), rank, action)?
        .with_labels(labels);
    // inclusion I -> Z[G]: (a - 1) -> e_a - e_identity
    let incl = ModuleMap::new(
        ideal.clone(),
        zg.clone(),
        IntMatrix::from_triples(
            n,
            rank,
            basis.iter().enumerate().flat_map(|(col, &a)| {
                vec![
                    (a, col, BigInt::one()),
                    (g.identity(), col, -BigInt::one()),
                ]
            }),
        ),
    )?;
    // augmentation Z[G] -> Z
    let aug = ModuleMap::new(
        zg,
        trivial_z(gamma),
        IntMatrix::from_triples(1, n, (0..n).map(|a| (0usize, a, BigInt::one()))),
    )?;
    Ok((ideal, incl, aug))
}

/// Tensor product with the diagonal action; basis (a_i x b_j) indexed by
/// i * rank(B) + j.
pub fn tensor_diagonal(a: &Arc<GModule>, b: &Arc<GModule>) -> Result<Arc<GModule>> {
    if !a.same_group(b) {
        return Err(Error::GroupMismatch("tensor factors over different groups".into()));
    }
    let rank = a
        .rank()
        .checked_mul(b.rank())
        .filter(|&r| r <= 1 << 22)
        .ok_or_else(|| Error::RankTooLarge(format!("{} x {}", a.rank(), b.rank())))?;
    let action: Vec<IntMatrix> = a
        .group()
        .elements()
        .map(|g| a.act(g).kronecker(b.act(g)))
        .collect();
    let m = GModule::new(
        format!("({})x({})", a.name(), b.name()),
        a.group().clone(),
        rank,
        action,
    )?;
    Ok(match (a.characteristic(), b.characteristic()) {
        (Some(p), _) | (_, Some(p)) => m.with_characteristic(p),
        _ => m,
    })
}

/// s-fold diagonal tensor power; s = 0 gives the trivial module.
pub fn tensor_power_diagonal(m: &Arc<GModule>, s: usize) -> Result<Arc<GModule>> {
    let mut acc = trivial_z(m.group());
    for _ in 0..s {
        acc = tensor_diagonal(&acc, m)?;
    }
    Ok(acc)
}

/// Hom_Z(A, B) with the twisted action ((g,h).f)(a) = g f(g^{-1} a h) h^{-1}
/// realized as f -> act_B(gamma) f act_A(gamma)^{-1}. Basis: matrix units
/// indexed by (source p, target q) -> p * rank(B) + q.
pub fn hom_z_module(a: &Arc<GModule>, b: &Arc<GModule>) -> Result<Arc<GModule>> {
    if !a.same_group(b) {
        return Err(Error::GroupMismatch("hom factors over different groups".into()));
    }
    let rank = a
        .rank()
        .checked_mul(b.rank())
        .filter(|&r| r <= 1 << 22)
        .ok_or_else(|| Error::RankTooLarge(format!("hom {}x{}", a.rank(), b.rank())))?;
    let group = a.group().clone();
    let action: Vec<IntMatrix> = group
        .elements()
        .map(|g| {
            let a_inv_t = a.act(group.inv(g)).transpose();
            a_inv_t.kronecker(b.act(g))
        })
        .collect();
    let m = GModule::new(
        format!("Hom({},{})", a.name(), b.name()),
        group,
        rank,
        action,
    )?;
    Ok(match (a.characteristic(), b.characteristic()) {
        (Some(p), _) | (_, Some(p)) => m.with_characteristic(p),
        _ => m,
    })
}

/// View the matrix of f: A -> B as a Hom-module coordinate vector.
pub fn hom_element_from_matrix(f: &IntMatrix) -> Vec<BigInt> {
    let mut v = vec![BigInt::from(0); f.rows() * f.cols()];
    for (q, p, x) in f.triples() {
        v[p * f.rows() + q] = x.clone();
    }
    v
}

/// Inverse of `hom_element_from_matrix`.
pub fn hom_matrix_from_element(v: &[BigInt], source_rank: usize, target_rank: usize) -> IntMatrix {
    assert_eq!(v.len(), source_rank * target_rank);
    IntMatrix::from_triples(
        target_rank,
        source_rank,
        v.iter().enumerate().filter(|(_, x)| !num_traits::Zero::is_zero(*x)).map(
            |(idx, x)| {
                let p = idx / target_rank;
                let q = idx % target_rank;
                (q, p, x.clone())
            },
        ),
    )
}

/// Precomposition Hom(X, A) -> Hom(Y, A) with an equivariant phi: Y -> X.
pub fn hom_precompose(
    phi: &ModuleMap,
    hom_x_a: &Arc<GModule>,
    hom_y_a: &Arc<GModule>,
    a_rank: usize,
) -> Result<ModuleMap> {
    // f -> f . phi ; on coordinates: kron(phi^T, id_A)
    let matrix = phi.matrix.transpose().kronecker(&IntMatrix::identity(a_rank));
    ModuleMap::new(hom_x_a.clone(), hom_y_a.clone(), matrix)
}

/// Postcomposition Hom(X, A) -> Hom(X, B) with an equivariant psi: A -> B.
pub fn hom_postcompose(
    psi: &ModuleMap,
    hom_x_a: &Arc<GModule>,
    hom_x_b: &Arc<GModule>,
    x_rank: usize,
) -> Result<ModuleMap> {
    let matrix = IntMatrix::identity(x_rank).kronecker(&psi.matrix);
    ModuleMap::new(hom_x_a.clone(), hom_x_b.clone(), matrix)
}

/// Restriction of a module along a group homomorphism.
pub fn restrict_along(h: &GroupHom, m: &Arc<GModule>) -> Result<Arc<GModule>> {
    if m.group().content_hash() != h.target.content_hash() {
        return Err(Error::GroupMismatch(format!(
            "module {} does not live over the homomorphism target",
            m.name()
        )));
    }
    let action: Vec<IntMatrix> = h
        .source
        .elements()
        .map(|g| m.act(h.apply(g)).clone())
        .collect();
    let out = GModule::new(
        format!("{}|{}", m.name(), h.source.name()),
        h.source.clone(),
        m.rank(),
        action,
    )?;
    Ok(match m.characteristic() {
        Some(p) => out.with_characteristic(p),
        None => out,
    })
}

/// Functions on a conjugacy class, with (g.f)(h) = f(g^{-1} h g): the
/// permutation-dual module of rank |C|.
pub fn coinduced_from_class(
    g: &Arc<GroupTable>,
    class_members: &[usize],
) -> Result<Arc<GModule>> {
    let mut class = class_members.to_vec();
    class.sort();
    class.dedup();
    let pos = |x: usize| -> Result<usize> {
        class
            .binary_search(&x)
            .map_err(|_| Error::InvalidInput("set is not closed under conjugation".into()))
    };
    let rank = class.len();
    let mut action = Vec::with_capacity(g.order());
    for h in g.elements() {
        let mut triples = Vec::with_capacity(rank);
        for (col, &c) in class.iter().enumerate() {
            // h . delta_c = delta_{h c h^{-1}}
            let image = g.conjugate(h, c);
            triples.push((pos(image)?, col, BigInt::one()));
        }
        action.push(IntMatrix::from_triples(rank, rank, triples));
    }
    GModule::new(
        format!("Z^C[{}:{}]", g.name(), class[0]),
        g.clone(),
        rank,
        action,
    )
}

/// Contraction ev: I x Hom(I^{s+1}, A) -> Hom(I^s, A),
/// x0 tensor f -> (y -> f(x0 tensor y)).
pub fn evaluation_map(
    ideal: &Arc<GModule>,
    a: &Arc<GModule>,
    s: usize,
) -> Result<ModuleMap> {
    let ri = ideal.rank();
    let i_s = tensor_power_diagonal(ideal, s)?;
    let i_s1 = tensor_power_diagonal(ideal, s + 1)?;
    let hom_hi = hom_z_module(&i_s1, a)?;
    let hom_lo = hom_z_module(&i_s, a)?;
    let source = tensor_diagonal(ideal, &hom_hi)?;
    let ra = a.rank();
    let pow_s = i_s.rank();
    let mut triples: Vec<(usize, usize, BigInt)> = Vec::new();
    // source index: w * (rank hom_hi) + (p * ra + q) with p < ri * pow_s
    for w in 0..ri {
        for p in 0..i_s1.rank() {
            let head = p / pow_s;
            let tail = p % pow_s;
            if head != w {
                continue;
            }
            for q in 0..ra {
                let col = w * hom_hi.rank() + p * ra + q;
                let row = tail * ra + q;
                triples.push((row, col, BigInt::one()));
            }
        }
    }
    let matrix = IntMatrix::from_triples(hom_lo.rank(), source.rank(), triples);
    ModuleMap::new(source, hom_lo, matrix)
}

/// Pairing psi: I^k x Hom(I^k, A) -> A with reversed argument order,
/// x1...xk tensor f -> f(xk tensor ... tensor x1).
pub fn pairing_psi(ideal: &Arc<GModule>, a: &Arc<GModule>, k: usize) -> Result<ModuleMap> {
    let ri = ideal.rank();
    let i_k = tensor_power_diagonal(ideal, k)?;
    let hom = hom_z_module(&i_k, a)?;
    let source = tensor_diagonal(&i_k, &hom)?;
    let ra = a.rank();
    let reverse_index = |mut u: usize| -> usize {
        let mut digits = Vec::with_capacity(k);
        for _ in 0..k {
            digits.push(u % ri);
            u /= ri;
        }
        // digits holds the tuple right-to-left; recomposing in that order
        // with the last entry most significant reverses the tuple
        let mut rev = 0;
        for d in digits {
            rev = rev * ri + d;
        }
        rev
    };
    let mut triples: Vec<(usize, usize, BigInt)> = Vec::new();
    for u in 0..i_k.rank() {
        let rev = reverse_index(u);
        for q in 0..ra {
            let col = u * hom.rank() + rev * ra + q;
            triples.push((q, col, BigInt::one()));
        }
    }
    let matrix = IntMatrix::from_triples(ra, source.rank(), triples);
    ModuleMap::new(source, a.clone(), matrix)
}

/// Named module shortcuts used by the CLI and report layers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleShortcut {
    TrivialZ,
    TrivialFp(u64),
    Sign,
    GroupRing,
    AugIdeal,
    AugIdealPower(usize),
    Coinduced(usize),
}

impl ModuleShortcut {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("trivial-Z") || s.eq_ignore_ascii_case("trivial-z") {
            return Ok(ModuleShortcut::TrivialZ);
        }
        if let Some(p) = s.strip_prefix("trivial-Fp:").or_else(|| s.strip_prefix("trivial-fp:")) {
            let p: u64 = p.parse().map_err(|_| Error::UnknownSpec(s.into()))?;
            return Ok(ModuleShortcut::TrivialFp(p));
        }
        if s.eq_ignore_ascii_case("sign") {
            return Ok(ModuleShortcut::Sign);
        }
        if s.eq_ignore_ascii_case("group-ring") {
            return Ok(ModuleShortcut::GroupRing);
        }
        if s.eq_ignore_ascii_case("aug-ideal") {
            return Ok(ModuleShortcut::AugIdeal);
        }
        if let Some(k) = s.strip_prefix("aug-ideal-power:") {
            let k: usize = k.parse().map_err(|_| Error::UnknownSpec(s.into()))?;
            return Ok(ModuleShortcut::AugIdealPower(k));
        }
        if let Some(rep) = s.strip_prefix("coinduced:") {
            let rep: usize = rep.parse().map_err(|_| Error::UnknownSpec(s.into()))?;
            return Ok(ModuleShortcut::Coinduced(rep));
        }
        Err(Error::UnknownSpec(s.into()))
    }

    /// True when the shortcut produces a module over G x G rather than G.
    pub fn over_product(&self) -> bool {
        matches!(
            self,
            ModuleShortcut::GroupRing
                | ModuleShortcut::AugIdeal
                | ModuleShortcut::AugIdealPower(_)
        )
    }

    /// Build the module; `gamma` must be the product G x G when the shortcut
    /// needs it, and is ignored otherwise.
    pub fn build(
        &self,
        g: &Arc<GroupTable>,
        gamma: Option<&Arc<GroupTable>>,
    ) -> Result<Arc<GModule>> {
        match self {
            ModuleShortcut::TrivialZ => Ok(trivial_z(g)),
            ModuleShortcut::TrivialFp(p) => Ok(trivial_fp(g, *p)),
            ModuleShortcut::Sign => Ok(sign_module(g)),
            ModuleShortcut::GroupRing => {
                let gamma = gamma.ok_or_else(|| {
                    Error::GroupMismatch("group-ring shortcut needs G x G".into())
                })?;
                group_ring_bimodule(g, gamma)
            }
            ModuleShortcut::AugIdeal => {
                let gamma = gamma.ok_or_else(|| {
                    Error::GroupMismatch("aug-ideal shortcut needs G x G".into())
                })?;
                Ok(augmentation_ideal(g, gamma)?.0)
            }
            ModuleShortcut::AugIdealPower(k) => {
                let gamma = gamma.ok_or_else(|| {
                    Error::GroupMismatch("aug-ideal-power shortcut needs G x G".into())
                })?;
                let (ideal, _, _) = augmentation_ideal(g, gamma)?;
                tensor_power_diagonal(&ideal, *k)
            }
            ModuleShortcut::Coinduced(rep) => {
                if *rep >= g.order() {
                    return Err(Error::InvalidInput(format!(
                        "class representative {rep} out of range"
                    )));
                }
                let class: Vec<usize> = {
                    let mut c: Vec<usize> =
                        g.elements().map(|h| g.conjugate(h, *rep)).collect();
                    c.sort();
                    c.dedup();
                    c
                };
                coinduced_from_class(g, &class)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{named_group, product, GroupSpec};

    fn c2_setup() -> (Arc<GroupTable>, Arc<GroupTable>) {
        let c2 = named_group(&GroupSpec::Cyclic(2)).unwrap();
        let gamma = product(&c2, &c2).unwrap();
        (c2, gamma)
    }

    #[test]
    fn bimodule_of_c2() {
        let (c2, gamma) = c2_setup();
        let zg = group_ring_bimodule(&c2, &gamma).unwrap();
        assert_eq!(zg.rank(), 2);
        // (g, 1) = index 1*2 + 0 = 2 acts by swapping the basis {1, g}
        let swap = IntMatrix::from_dense(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(*zg.act(2), swap);
        // (g, g) = index 3 acts identically in an abelian group
        assert!(zg.act(3).is_identity());
        // trivial group
        let c1 = named_group(&GroupSpec::Cyclic(1)).unwrap();
        let gamma1 = product(&c1, &c1).unwrap();
        let z1 = group_ring_bimodule(&c1, &gamma1).unwrap();
        assert_eq!(z1.rank(), 1);
    }

    #[test]
    fn augmentation_ideal_of_c2() {
        let (c2, gamma) = c2_setup();
        let (ideal, incl, aug) = augmentation_ideal(&c2, &gamma).unwrap();
        assert_eq!(ideal.rank(), 1);
        // (g,1) acts by -1 on g-1 since g(g-1) = 1-g
        assert_eq!(ideal.act(2).get(0, 0), BigInt::from(-1));
        // (g,g) acts by +1
        assert_eq!(ideal.act(3).get(0, 0), BigInt::from(1));
        // aug . incl = 0
        assert!(aug.compose(&incl).unwrap().matrix.is_zero_matrix());
        // trivial group: I = 0
        let c1 = named_group(&GroupSpec::Cyclic(1)).unwrap();
        let gamma1 = product(&c1, &c1).unwrap();
        let (i1, _, _) = augmentation_ideal(&c1, &gamma1).unwrap();
        assert_eq!(i1.rank(), 0);
    }

    #[test]
    fn tensor_powers() {
        let (c2, gamma) = c2_setup();
        let (ideal, _, _) = augmentation_ideal(&c2, &gamma).unwrap();
        let sq = tensor_power_diagonal(&ideal, 2).unwrap();
        assert_eq!(sq.rank(), 1);
        // (g,1) acts by (-1)^2 = +1
        assert!(sq.act(2).is_identity());
        let zero = tensor_power_diagonal(&ideal, 0).unwrap();
        assert_eq!(zero.rank(), 1);
        assert!(zero.act(2).is_identity());
        let one = tensor_power_diagonal(&ideal, 1).unwrap();
        assert_eq!(one.act(2).get(0, 0), BigInt::from(-1));
    }

    #[test]
    fn hom_module_action_realizes_twist() {
        let (c2, gamma) = c2_setup();
        let zg = group_ring_bimodule(&c2, &gamma).unwrap();
        let triv = trivial_z(&gamma);
        let hom = hom_z_module(&zg, &triv).unwrap();
        assert_eq!(hom.rank(), 2);
        // ((g,h).f)(a) = f(g^{-1} a h): dual permutation action; for
        // (g,1): f -> f(g^{-1} a): dual basis swaps
        let swap = IntMatrix::from_dense(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(*hom.act(2), swap);
        // unit object is a two-sided identity: Hom(Z, B) = B
        let hom_unit = hom_z_module(&triv, &zg).unwrap();
        assert_eq!(hom_unit.rank(), zg.rank());
        for g in gamma.elements() {
            assert_eq!(hom_unit.act(g), zg.act(g));
        }
    }

    #[test]
    fn restriction_along_diagonal_and_left() {
        let (c2, gamma) = c2_setup();
        let (ideal, _, _) = augmentation_ideal(&c2, &gamma).unwrap();
        let diag = GroupHom::diagonal(&c2, &gamma).unwrap();
        let conj = restrict_along(&diag, &ideal).unwrap();
        // conjugation acts trivially on rank-1 I for abelian G
        assert!(conj.act(1).is_identity());
        let left = GroupHom::left_inclusion(&c2, &gamma).unwrap();
        let zg = group_ring_bimodule(&c2, &gamma).unwrap();
        let left_reg = restrict_along(&left, &zg).unwrap();
        // left translation swaps the basis
        assert_eq!(*left_reg.act(1), IntMatrix::from_dense(&[vec![0, 1], vec![1, 0]]));
        let ident = GroupHom::identity(&gamma);
        let same = restrict_along(&ident, &ideal).unwrap();
        assert_eq!(same.rank(), ideal.rank());
    }

    #[test]
    fn coinduced_modules() {
        let s3 = named_group(&GroupSpec::Symmetric3).unwrap();
        // class of a transposition has size 3
        let class: Vec<usize> = {
            let mut c: Vec<usize> = s3.elements().map(|h| s3.conjugate(h, 3)).collect();
            c.sort();
            c.dedup();
            c
        };
        let m = coinduced_from_class(&s3, &class).unwrap();
        assert_eq!(m.rank(), 3);
        // central element in abelian group: rank 1 trivial
        let c2 = named_group(&GroupSpec::Cyclic(2)).unwrap();
        let m2 = coinduced_from_class(&c2, &[1]).unwrap();
        assert_eq!(m2.rank(), 1);
        assert!(m2.act(1).is_identity());
    }

    #[test]
    fn evaluation_contraction() {
        let (c2, gamma) = c2_setup();
        let (ideal, _, _) = augmentation_ideal(&c2, &gamma).unwrap();
        let triv = trivial_z(&gamma);
        // s = 0: ev(x0 tensor f) = f(x0), a 1x1 identity here
        let ev0 = evaluation_map(&ideal, &triv, 0).unwrap();
        assert!(ev0.matrix.is_identity());
        let ev1 = evaluation_map(&ideal, &triv, 1).unwrap();
        assert_eq!(ev1.matrix.rows(), 1);
        assert_eq!(ev1.matrix.cols(), 1);
        assert!(ev1.matrix.is_identity());
    }

    #[test]
    fn psi_reverses_arguments() {
        // need rank >= 2 for the reversal to matter: use c3
        let c3 = named_group(&GroupSpec::Cyclic(3)).unwrap();
        let gamma = product(&c3, &c3).unwrap();
        let (ideal, _, _) = augmentation_ideal(&c3, &gamma).unwrap();
        let triv = trivial_z(&gamma);
        let psi = pairing_psi(&ideal, &triv, 2).unwrap();
        // source basis: (u, p, q): psi(e1 x e2 x f) = f(e2 x e1)
        let ri = ideal.rank(); // 2
        let hom_rank = ri * ri; // Hom(I^2, Z)
        // u = (0,1) -> index 1; f = dual of (1,0) -> p = 2, q = 0
        let col = 1 * hom_rank + 2;
        assert_eq!(psi.matrix.get(0, col), BigInt::one());
        // f = dual of (0,1) pairs to zero with u = (0,1)
        let col_wrong = 1 * hom_rank + 1;
        assert_eq!(psi.matrix.get(0, col_wrong), BigInt::from(0));
        // k = 1 psi equals s = 0 ev
        let psi1 = pairing_psi(&ideal, &triv, 1).unwrap();
        let ev0 = evaluation_map(&ideal, &triv, 0).unwrap();
        assert_eq!(psi1.matrix, ev0.matrix);
    }

    #[test]
    fn shortcut_parsing() {
        assert_eq!(ModuleShortcut::parse("trivial-Z").unwrap(), ModuleShortcut::TrivialZ);
        assert_eq!(
            ModuleShortcut::parse("trivial-Fp:2").unwrap(),
            ModuleShortcut::TrivialFp(2)
        );
        assert_eq!(
            ModuleShortcut::parse("aug-ideal-power:3").unwrap(),
            ModuleShortcut::AugIdealPower(3)
        );
        assert!(ModuleShortcut::parse("bogus").is_err());
        assert!(ModuleShortcut::parse("aug-ideal").unwrap().over_product());
        assert!(!ModuleShortcut::parse("trivial-Z").unwrap().over_product());
    }

    #[test]
    fn sign_modules() {
        let c4 = named_group(&GroupSpec::Cyclic(4)).unwrap();
        let sgn = sign_module(&c4);
        assert_eq!(sgn.act(1).get(0, 0), BigInt::from(-1));
        assert_eq!(sgn.act(2).get(0, 0), BigInt::from(1));
        let s3 = named_group(&GroupSpec::Symmetric3).unwrap();
        let par = sign_module(&s3);
        // 3-cycles are even, transpositions odd
        assert_eq!(par.act(1).get(0, 0), BigInt::from(1));
        assert_eq!(par.act(3).get(0, 0), BigInt::from(-1));
        let c3 = named_group(&GroupSpec::Cyclic(3)).unwrap();
        assert!(sign_module(&c3).act(1).is_identity());
    }
}
