//! The obstruction engine: an exact couple built from the augmentation-ideal
//! splices, its derived pages, the obstruction sequence deciding whether a
//! class is essential (a coefficient pushforward of a power of the canonical
//! class), the Phi and Gamma isomorphisms, the centralizer decomposition
//! oracle for the E_0 term, and the resulting topological-complexity lower
//! bounds.

use crate::canonical::{canonical_cocycle, canonical_power, CanonicalClassBundle, PiContext};
use crate::cohomology::{
    cochain_complex, cohomology, connecting_hom, convert_to_resolution, cup_product,
    pushforward, restriction, Cohomology, CohomologyClass, SplitExactSequence,
};
use crate::groups::{subgroup_table, tuple_conjugacy_classes, GroupHom, GroupTable, TupleOrbit};
use crate::linalg::{direct_sum_factors, AbHom, ColumnEchelon, IntMatrix, Lattice, PresentedAbelianGroup};
use crate::modules::{
    evaluation_map, hom_element_from_matrix, hom_matrix_from_element, hom_precompose,
    hom_z_module, restrict_along, tensor_diagonal, tensor_power_diagonal, GModule, ModuleMap,
};
use crate::resolutions::{bar_resolution, default_engine_resolution, FreeResolution};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

/// One bigraded spot of the couple.
pub type Bidegree = (usize, usize);

/// Everything fixed by (group, coefficients): the spliced short exact
/// sequences in dualized form, the Hom coefficient modules, and the two
/// resolutions the engine computes on (a small one for groups and maps, the
/// bar resolution for cup products).
pub struct ExactCouple {
    pub ctx: Arc<PiContext>,
    pub coeffs: Arc<GModule>,
    pub n_max: usize,
    pub s_max: usize,
    pub res: Arc<FreeResolution>,
    pub bundle: CanonicalClassBundle,
    /// Hom(I^s, A) for s = 0..=s_max
    hom_modules: Vec<Arc<GModule>>,
    /// Hom(Z[G] (x) I^s, A) for s = 0..s_max
    mid_modules: Vec<Arc<GModule>>,
    /// dualized splice sequences, one per s
    dual_seqs: Vec<SplitExactSequence>,
    /// lazily built page-0 groups
    d0: Vec<Vec<OnceLock<Arc<PageHost>>>>,
    e0: Vec<Vec<OnceLock<Arc<PageHost>>>>,
}

/// A page-0 cohomology group wrapped with its presented form.
pub struct PageHost {
    pub cohomology: Cohomology,
    pub group: Arc<PresentedAbelianGroup>,
}

impl PageHost {
    fn new(c: Cohomology) -> Arc<Self> {
        let group = Arc::new(c.group());
        Arc::new(PageHost { cohomology: c, group })
    }

    /// Canonical coordinates of a class, as generator coordinates of the
    /// presented group.
    pub fn coords(&self, class: &CohomologyClass) -> Result<Vec<BigInt>> {
        self.cohomology.project(class)
    }
}

/// A subquotient of a page-0 group: generators as host-coordinate columns
/// plus a presentation in those generators.
#[derive(Clone)]
pub struct PageGroup {
    pub host: Bidegree,
    /// host generator coordinates of this page's generators
    pub gens: IntMatrix,
    pub group: Arc<PresentedAbelianGroup>,
}

impl PageGroup {
    fn full(host: Bidegree, host_group: &Arc<PresentedAbelianGroup>) -> PageGroup {
        PageGroup {
            host,
            gens: IntMatrix::identity(host_group.generators()),
            group: host_group.clone(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.group.invariant_factors().is_empty()
    }

    /// Express a host vector in this page's generators, modulo the host
    /// relations of the page presentation: solve gens * x = v - relations.
    fn express(&self, host_rels: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let stacked = self.gens.hstack(host_rels);
        let ech = ColumnEchelon::with_transform(&stacked);
        let sol = ech.solve(v)?;
        Some(sol[..self.gens.cols()].to_vec())
    }
}

const GRID_MODULE_RANK_CAP: usize = 20_000;

impl ExactCouple {
    /// Build the couple context. The grid covers r <= n_max and
    /// s <= s_max, where s_max widens with the page depth the group can
    /// afford (rank-one augmentation ideals cost nothing).
    pub fn new(ctx: Arc<PiContext>, coeffs: Arc<GModule>, n_max: usize) -> Result<Self> {
        if coeffs.characteristic().is_some() {
            return Err(Error::InvalidInput(
                "exact couples are computed with integral coefficients".into(),
            ));
        }
        if coeffs.group().content_hash() != ctx.gamma.content_hash() {
            return Err(Error::GroupMismatch("coefficients must live over G x G".into()));
        }
        let deep = n_max + n_max * (n_max + 1) / 2 + 1;
        let ri = ctx.ideal.rank().max(1);
        let mut s_max = n_max.max(1);
        for cand in (n_max + 1)..=deep {
            let mid_rank = ctx.g.order() * ri.pow(cand as u32) * coeffs.rank();
            if mid_rank > GRID_MODULE_RANK_CAP {
                break;
            }
            s_max = cand;
        }
        let res = default_engine_resolution(&ctx.gamma, n_max + 1)?;
        let bundle = canonical_cocycle(&ctx, n_max + 1)?;
        let zg = ctx.incl.target.clone();
        let mut hom_modules = Vec::with_capacity(s_max + 1);
        let mut mid_modules = Vec::with_capacity(s_max + 1);
        let mut dual_seqs = Vec::with_capacity(s_max);
        for s in 0..=s_max {
            let i_s = tensor_power_diagonal(&ctx.ideal, s)?;
            hom_modules.push(hom_z_module(&i_s, &coeffs)?);
            mid_modules.push(hom_z_module(&tensor_diagonal(&zg, &i_s)?, &coeffs)?);
        }
        for s in 0..s_max {
            dual_seqs.push(dual_splice_sequence(
                &ctx,
                &coeffs,
                s,
                &hom_modules,
                &mid_modules,
            )?);
        }
        let d0 = (0..=n_max)
            .map(|_| (0..=s_max).map(|_| OnceLock::new()).collect())
            .collect();
        let e0 = (0..=n_max)
            .map(|_| (0..=s_max).map(|_| OnceLock::new()).collect())
            .collect();
        Ok(ExactCouple {
            ctx,
            coeffs,
            n_max,
            s_max,
            res,
            bundle,
            hom_modules,
            mid_modules,
            dual_seqs,
            d0,
            e0,
        })
    }

    pub fn in_grid(&self, (r, s): Bidegree) -> bool {
        r <= self.n_max && s <= self.s_max
    }

    pub fn hom_module(&self, s: usize) -> &Arc<GModule> {
        &self.hom_modules[s]
    }

    /// D_0^{rs} = H^r(G x G, Hom(I^s, A)).
    pub fn d0(&self, (r, s): Bidegree) -> Result<Arc<PageHost>> {
        if !self.in_grid((r, s)) {
            return Err(Error::DegreeOutOfRange { degree: r + s, d_max: self.n_max + self.s_max });
        }
        if let Some(found) = self.d0[r][s].get() {
            return Ok(found.clone());
        }
        let cx = cochain_complex(&self.res, &self.hom_modules[s])?;
        let host = PageHost::new(cohomology(&cx, r)?);
        let _ = self.d0[r][s].set(host.clone());
        Ok(host)
    }

    /// E_0^{rs} = H^r(G x G, Hom(Z[G] (x) I^s, A)).
    pub fn e0(&self, (r, s): Bidegree) -> Result<Arc<PageHost>> {
        if !self.in_grid((r, s)) {
            return Err(Error::DegreeOutOfRange { degree: r + s, d_max: self.n_max + self.s_max });
        }
        if let Some(found) = self.e0[r][s].get() {
            return Ok(found.clone());
        }
        let cx = cochain_complex(&self.res, &self.mid_modules[s])?;
        let host = PageHost::new(cohomology(&cx, r)?);
        let _ = self.e0[r][s].set(host.clone());
        Ok(host)
    }

    /// Cochain-level i_0: the connecting homomorphism of the dualized splice
    /// sequence, D_0^{r, s+1} -> D_0^{r+1, s}.
    pub fn i0_class(&self, s: usize, u: &CohomologyClass) -> Result<CohomologyClass> {
        connecting_hom(&self.dual_seqs[s], u)
    }

    /// Cochain-level j_0: pushforward along Hom(I^s, A) -> Hom(mid_s, A).
    pub fn j0_class(&self, s: usize, u: &CohomologyClass) -> Result<CohomologyClass> {
        pushforward(&self.dual_seqs[s].incl, u)
    }

    /// Cochain-level k_0: pushforward along Hom(mid_s, A) -> Hom(I^{s+1}, A).
    pub fn k0_class(&self, s: usize, u: &CohomologyClass) -> Result<CohomologyClass> {
        pushforward(&self.dual_seqs[s].proj, u)
    }

    /// i_0 as a homomorphism of presented groups.
    pub fn i0_hom(&self, (r, s): Bidegree) -> Result<AbHom> {
        // D_0^{r, s+1} -> D_0^{r+1, s}
        let source = self.d0((r, s + 1))?;
        let target = self.d0((r + 1, s))?;
        self.class_level_hom(&source, &target, |u| self.i0_class(s, u))
    }

    pub fn j0_hom(&self, (r, s): Bidegree) -> Result<AbHom> {
        let source = self.d0((r, s))?;
        let target = self.e0((r, s))?;
        self.class_level_hom(&source, &target, |u| self.j0_class(s, u))
    }

    pub fn k0_hom(&self, (r, s): Bidegree) -> Result<AbHom> {
        let source = self.e0((r, s))?;
        let target = self.d0((r, s + 1))?;
        self.class_level_hom(&source, &target, |u| self.k0_class(s, u))
    }

    fn class_level_hom(
        &self,
        source: &PageHost,
        target: &PageHost,
        f: impl Fn(&CohomologyClass) -> Result<CohomologyClass>,
    ) -> Result<AbHom> {
        let mut cols = Vec::with_capacity(source.group.generators());
        for gen in source.cohomology.generators() {
            let image = f(&gen)?;
            cols.push(target.coords(&image)?);
        }
        let matrix = IntMatrix::from_columns(target.group.generators(), &cols);
        AbHom::new(source.group.clone(), target.group.clone(), matrix)
    }

    /// d_0 = j_0 . k_0 : E_0^{rs} -> E_0^{r, s+1}.
    pub fn d0_hom(&self, (r, s): Bidegree) -> Result<AbHom> {
        let j = self.j0_hom((r, s + 1))?;
        let k = self.k0_hom((r, s))?;
        j.compose(&k)
    }

    /// Exactness of the long exact sequence at every node the grid covers:
    /// ... -> D^{rs} -j-> E^{rs} -k-> D^{r,s+1} -i-> D^{r+1,s} -j-> ...
    pub fn verify_page0_exactness(&self) -> Result<Vec<String>> {
        let mut checked = Vec::new();
        for r in 0..=self.n_max {
            for s in 0..=self.s_max {
                // at E^{rs}: ker k_0 = im j_0
                if self.in_grid((r, s + 1)) {
                    let j = self.j0_hom((r, s))?;
                    let k = self.k0_hom((r, s))?;
                    if !j.exact_at(&k) {
                        return Err(Error::ExactnessCheckFailed(format!(
                            "at E_0^({r},{s})"
                        )));
                    }
                    checked.push(format!("E0({r},{s})"));
                }
                // at D^{r,s+1}: ker i_0 = im k_0
                if r + 1 <= self.n_max && s + 1 <= self.s_max {
                    let k = self.k0_hom((r, s))?;
                    let i = self.i0_hom((r, s))?;
                    if !k.exact_at(&i) {
                        return Err(Error::ExactnessCheckFailed(format!(
                            "at D_0^({r},{}) as target of k_0",
                            s + 1
                        )));
                    }
                    checked.push(format!("D0({r},{})", s + 1));
                }
                // at D^{r+1,s}: ker j_0 = im i_0
                if r + 1 <= self.n_max && s + 1 <= self.s_max {
                    let i = self.i0_hom((r, s))?;
                    let j = self.j0_hom((r + 1, s))?;
                    if !i.exact_at(&j) {
                        return Err(Error::ExactnessCheckFailed(format!(
                            "at D_0^({},{s}) as target of i_0",
                            r + 1
                        )));
                    }
                    checked.push(format!("D0({},{s})", r + 1));
                }
                // left edge: j_0 out of D^{0,s} is injective (nothing maps in)
                if r == 0 {
                    let j = self.j0_hom((0, s))?;
                    if !j.is_injective() {
                        return Err(Error::ExactnessCheckFailed(format!(
                            "j_0 out of D_0^(0,{s}) is not injective"
                        )));
                    }
                    checked.push(format!("D0(0,{s})-edge"));
                }
            }
        }
        Ok(checked)
    }
}

/// The dualized splice sequence at stage s:
/// 0 -> Hom(I^s, A) -> Hom(Z[G] (x) I^s, A) -> Hom(I^{s+1}, A) -> 0
/// with its explicit Z-splitting.
fn dual_splice_sequence(
    ctx: &PiContext,
    coeffs: &Arc<GModule>,
    s: usize,
    hom_modules: &[Arc<GModule>],
    mid_modules: &[Arc<GModule>],
) -> Result<SplitExactSequence> {
    let n = ctx.g.order();
    let ri = ctx.ideal.rank();
    let i_s = tensor_power_diagonal(&ctx.ideal, s)?;
    let i_s1 = tensor_power_diagonal(&ctx.ideal, s + 1)?;
    let zg = ctx.incl.target.clone();
    let mid = tensor_diagonal(&zg, &i_s)?;
    // eps (x) 1 : mid -> I^s and i (x) 1 : I^{s+1} -> mid
    let eps_tensor = ModuleMap::new(
        mid.clone(),
        i_s.clone(),
        ctx.aug.matrix.kronecker(&IntMatrix::identity(i_s.rank())),
    )?;
    let incl_tensor = ModuleMap::new(
        i_s1.clone(),
        mid.clone(),
        ctx.incl.matrix.kronecker(&IntMatrix::identity(i_s.rank())),
    )?;
    // dualize: incl of the sequence is precomposition with eps (x) 1
    let seq_incl = hom_precompose(&eps_tensor, &hom_modules[s], &mid_modules[s], coeffs.rank())?;
    let seq_proj = hom_precompose(&incl_tensor, &mid_modules[s], &hom_modules[s + 1], coeffs.rank())?;
    // Z-splitting: section = precompose with (a (x) y -> (a - eps a) (x) y),
    // retraction = precompose with (y -> 1 (x) y)
    let mut rho_triples = Vec::new();
    let mut pa = 0usize;
    for a in ctx.g.elements() {
        if a == ctx.g.identity() {
            continue;
        }
        for u in 0..i_s.rank() {
            rho_triples.push((pa * i_s.rank() + u, a * i_s.rank() + u, BigInt::one()));
        }
        pa += 1;
    }
    let rho = IntMatrix::from_triples(ri * i_s.rank(), n * i_s.rank(), rho_triples);
    let sigma = IntMatrix::from_triples(
        n * i_s.rank(),
        i_s.rank(),
        (0..i_s.rank()).map(|u| (ctx.g.identity() * i_s.rank() + u, u, BigInt::one())),
    );
    let section = rho.transpose().kronecker(&IntMatrix::identity(coeffs.rank()));
    let retraction = sigma.transpose().kronecker(&IntMatrix::identity(coeffs.rank()));
    SplitExactSequence::new(seq_incl, seq_proj, Some((section, retraction)))
}

/// Pages above zero, derived spot by spot. Holds per page and bidegree the
/// subquotient data relative to the page-0 host.
pub struct DerivedPages<'a> {
    pub couple: &'a ExactCouple,
    d: HashMap<(usize, Bidegree), Option<PageGroup>>,
    e: HashMap<(usize, Bidegree), Option<PageGroup>>,
}

impl<'a> DerivedPages<'a> {
    pub fn new(couple: &'a ExactCouple) -> Self {
        DerivedPages { couple, d: HashMap::new(), e: HashMap::new() }
    }

    /// D_p^{rs} = Im[i_0^p : D_0^{r-p, s+p} -> D_0^{rs}]; None when the grid
    /// cannot host the computation.
    pub fn d_group(&mut self, p: usize, (r, s): Bidegree) -> Result<Option<PageGroup>> {
        if let Some(found) = self.d.get(&(p, (r, s))) {
            return Ok(found.clone());
        }
        let value = self.compute_d(p, (r, s))?;
        self.d.insert((p, (r, s)), value.clone());
        Ok(value)
    }

    fn compute_d(&mut self, p: usize, (r, s): Bidegree) -> Result<Option<PageGroup>> {
        if !self.couple.in_grid((r, s)) {
            return Ok(None);
        }
        let host = self.couple.d0((r, s))?;
        if p == 0 {
            return Ok(Some(PageGroup::full((r, s), &host.group)));
        }
        if r < p {
            // image of a zero group
            return Ok(Some(PageGroup {
                host: (r, s),
                gens: IntMatrix::zero(host.group.generators(), 0),
                group: Arc::new(PresentedAbelianGroup::trivial()),
            }));
        }
        if !self.couple.in_grid((r - p, s + p)) {
            return Ok(None);
        }
        // composite i_0^p from (r-p, s+p)
        let mut composite: Option<AbHom> = None;
        for step in 0..p {
            let hom = self.couple.i0_hom((r - p + step, s + p - step - 1))?;
            composite = Some(match composite {
                None => hom,
                Some(prev) => hom.compose(&prev)?,
            });
        }
        let composite = composite.expect("p >= 1");
        let gens = composite.matrix.clone();
        let group = Arc::new(host.group.subgroup(&gens));
        Ok(Some(PageGroup { host: (r, s), gens, group }))
    }

    /// E_p^{rs}, derived as iterated homology of d = j . k; None when the
    /// grid cannot host the computation.
    pub fn e_group(&mut self, p: usize, (r, s): Bidegree) -> Result<Option<PageGroup>> {
        if let Some(found) = self.e.get(&(p, (r, s))) {
            return Ok(found.clone());
        }
        let value = self.compute_e(p, (r, s))?;
        self.e.insert((p, (r, s)), value.clone());
        Ok(value)
    }

    fn compute_e(&mut self, p: usize, (r, s): Bidegree) -> Result<Option<PageGroup>> {
        if !self.couple.in_grid((r, s)) {
            return Ok(None);
        }
        let host = self.couple.e0((r, s))?;
        if p == 0 {
            return Ok(Some(PageGroup::full((r, s), &host.group)));
        }
        let q = p - 1;
        // d_q out of (r, s) lands in (r - q, s + q + 1); d_q into (r, s)
        // comes from (r + q, s - q - 1)
        let Some(here) = self.e_group(q, (r, s))? else { return Ok(None) };
        let out_spot = (r.wrapping_sub(q), s + q + 1);
        let outgoing = if r >= q && self.couple.in_grid(out_spot) {
            match self.d_page_hom(q, (r, s), out_spot)? {
                Some(m) => Some(m),
                None => return Ok(None),
            }
        } else if r < q {
            None // genuine zero target
        } else {
            return Ok(None); // unknowable within the grid
        };
        let in_spot_ok = s >= q + 1;
        let incoming = if in_spot_ok {
            let src = (r + q, s - q - 1);
            if r + q > self.couple.n_max {
                // genuine zero source: r + q beyond the top row means the
                // host cohomology is out of the grid; treat as unknowable
                // unless the source is structurally zero (negative r is the
                // only structural zero for incoming)
                return Ok(None);
            }
            match self.d_page_hom(q, src, (r, s))? {
                Some(m) => Some(m),
                None => return Ok(None),
            }
        } else {
            None // structurally zero source
        };
        // cycles: kernel of outgoing within `here`
        let host_rels = host.group.relations();
        let cycle_gens: IntMatrix = match &outgoing {
            None => IntMatrix::identity(here.group.generators()),
            Some(m) => m.kernel_generators(),
        };
        // boundaries: image of incoming, expressed in here coordinates
        let boundary_in_here: IntMatrix = match &incoming {
            None => IntMatrix::zero(here.group.generators(), 0),
            Some(m) => m.image_generators(),
        };
        // present the quotient: generators = cycle gens (in here coords);
        // relations: solvability into boundaries + here relations
        let rel_span = boundary_in_here.hstack(here.group.relations());
        let relations = crate::linalg::solvability_lattice(&cycle_gens, &rel_span);
        let group = Arc::new(PresentedAbelianGroup::new(cycle_gens.cols(), relations));
        let gens = here.gens.mul(&cycle_gens);
        let _ = host_rels;
        Ok(Some(PageGroup { host: (r, s), gens, group }))
    }

    /// d_q as a homomorphism E_q(source) -> E_q(target), in page-q
    /// generator coordinates. None when the grid cannot host it.
    fn d_page_hom(
        &mut self,
        q: usize,
        source_spot: Bidegree,
        target_spot: Bidegree,
    ) -> Result<Option<AbHom>> {
        let Some(source) = self.e_group(q, source_spot)? else { return Ok(None) };
        let Some(target) = self.e_group(q, target_spot)? else { return Ok(None) };
        let target_host = self.couple.e0(target_spot)?;
        // evaluate d_q on each source generator: k_0 then (i_0-preimage)^q
        // then j_0, all at the class level
        let mut cols = Vec::with_capacity(source.group.generators());
        for jcol in 0..source.group.generators() {
            let host_vec = source.gens.column(jcol);
            let class = self.couple.e0(source_spot)?.cohomology.lift(
                &self.couple.e0(source_spot)?.group.reduce(&host_vec),
            );
            let image = self.apply_dq(q, source_spot, &class)?;
            let coords = target_host.coords(&image)?;
            let in_target = target.express(target_host.group.relations(), &coords).ok_or_else(
                || Error::ExactnessCheckFailed(format!(
                    "d_{q} image leaves the page subquotient at {target_spot:?}"
                )),
            )?;
            cols.push(in_target);
        }
        let matrix = IntMatrix::from_columns(target.group.generators(), &cols);
        Ok(Some(AbHom::new(source.group.clone(), target.group.clone(), matrix)?))
    }

    /// d_q(x) = j_q(k_q(x)) = j_0( i_0-preimage^q ( k_0(x) ) ).
    fn apply_dq(
        &mut self,
        q: usize,
        (r, s): Bidegree,
        class: &CohomologyClass,
    ) -> Result<CohomologyClass> {
        // k_0 : E^{rs} -> D^{r, s+1}
        let mut current = self.couple.k0_class(s, class)?;
        let mut spot = (r, s + 1);
        // walk back through q preimages of i_0
        for _ in 0..q {
            let src_spot = (spot.0 - 1, spot.1 + 1);
            let ihom = self.couple.i0_hom((spot.0 - 1, spot.1))?;
            let host = self.couple.d0(spot)?;
            let coords = host.coords(&current)?;
            let pre = ihom.preimage(&coords).ok_or_else(|| {
                Error::ExactnessCheckFailed(format!(
                    "k-image is not divisible by i_0 at {spot:?} (page {q})"
                ))
            })?;
            let src_host = self.couple.d0(src_spot)?;
            current = src_host.cohomology.lift(&src_host.group.reduce(&pre));
            spot = src_spot;
        }
        // j_0 at the final spot
        self.couple.j0_class(spot.1, &current)
    }

    /// The derivation identity E_{p+1} = H(E_p, d_p) is how e_group computes
    /// pages; this re-checks one instance against a direct recomputation
    /// through independent kernels, returning the invariant factors of both
    /// sides.
    pub fn verify_derivation(
        &mut self,
        p: usize,
        spot: Bidegree,
    ) -> Result<Option<(Vec<BigInt>, Vec<BigInt>)>> {
        let Some(next) = self.e_group(p + 1, spot)? else { return Ok(None) };
        // recompute: homology of d_p at spot from scratch
        let Some(here) = self.e_group(p, spot)? else { return Ok(None) };
        let (r, s) = spot;
        let outgoing = if r >= p && self.couple.in_grid((r - p, s + p + 1)) {
            self.d_page_hom(p, spot, (r - p, s + p + 1))?
        } else if r < p {
            None
        } else {
            return Ok(None);
        };
        let incoming = if s >= p + 1 && r + p <= self.couple.n_max {
            self.d_page_hom(p, (r + p, s - p - 1), spot)?
        } else if s < p + 1 {
            None
        } else {
            return Ok(None);
        };
        let ker = match &outgoing {
            None => IntMatrix::identity(here.group.generators()),
            Some(m) => m.kernel_generators(),
        };
        let im = match &incoming {
            None => IntMatrix::zero(here.group.generators(), 0),
            Some(m) => m.image_generators(),
        };
        let rel_span = im.hstack(here.group.relations());
        let relations = crate::linalg::solvability_lattice(&ker, &rel_span);
        let direct = PresentedAbelianGroup::new(ker.cols(), relations);
        Ok(Some((next.group.invariant_factors(), direct.invariant_factors())))
    }

    /// Exactness of the page-p couple at the D-node: ker j_p = im i_p inside
    /// D_p^{rs}. None when out of grid.
    pub fn verify_derived_exactness_at_d(
        &mut self,
        p: usize,
        (r, s): Bidegree,
    ) -> Result<Option<bool>> {
        if p == 0 {
            return Ok(Some(true)); // covered by verify_page0_exactness
        }
        // i_p : D_p^{r-1, s+1} -> D_p^{rs}, j_p : D_p^{rs} -> E_p^{r-p, s+p}
        let Some(dp) = self.d_group(p, (r, s))? else { return Ok(None) };
        let Some(dp_prev) = (if r >= 1 { self.d_group(p, (r - 1, s + 1))? } else {
            Some(PageGroup {
                host: (r, s),
                gens: IntMatrix::zero(0, 0),
                group: Arc::new(PresentedAbelianGroup::trivial()),
            })
        }) else {
            return Ok(None);
        };
        if r < p {
            return Ok(Some(true)); // D_p = 0 there
        }
        let ep_spot = (r - p, s + p);
        let Some(ep) = self.e_group(p, ep_spot)? else { return Ok(None) };
        let host = self.couple.d0((r, s))?;
        // im i_p in D_p coordinates: i_0 applied to D_p^{r-1,s+1} gens
        let mut image_cols: Vec<Vec<BigInt>> = Vec::new();
        if r >= 1 && dp_prev.gens.rows() > 0 {
            let ihom = self.couple.i0_hom((r - 1, s))?;
            for j in 0..dp_prev.gens.cols() {
                let coords = ihom.matrix.apply(&dp_prev.gens.column(j));
                let expressed = dp
                    .express(host.group.relations(), &coords)
                    .ok_or_else(|| Error::ExactnessCheckFailed(
                        "i_p image leaves D_p".into(),
                    ))?;
                image_cols.push(expressed);
            }
        }
        let image = IntMatrix::from_columns(dp.group.generators(), &image_cols);
        // ker j_p in D_p coordinates
        let jp = self.jp_hom(p, (r, s), &dp, &ep)?;
        let kernel = jp.kernel_generators();
        let im_span = image.hstack(dp.group.relations());
        let ok = Lattice::from_generators(&im_span).equals_generated_by(&kernel);
        Ok(Some(ok))
    }

    /// j_p : D_p^{rs} -> E_p^{r-p, s+p} on page coordinates.
    fn jp_hom(
        &mut self,
        p: usize,
        (r, s): Bidegree,
        dp: &PageGroup,
        ep: &PageGroup,
    ) -> Result<AbHom> {
        let host_e = self.couple.e0((r - p, s + p))?;
        let mut cols = Vec::with_capacity(dp.group.generators());
        for j in 0..dp.group.generators() {
            let host_coords = dp.gens.column(j);
            // walk p preimages of i_0 back to (r - p, s + p), then j_0
            let host_d = self.couple.d0((r, s))?;
            let mut current = host_d.cohomology.lift(&host_d.group.reduce(&host_coords));
            let mut spot = (r, s);
            for _ in 0..p {
                let src_spot = (spot.0 - 1, spot.1 + 1);
                let ihom = self.couple.i0_hom((spot.0 - 1, spot.1))?;
                let host = self.couple.d0(spot)?;
                let coords = host.coords(&current)?;
                let pre = ihom.preimage(&coords).ok_or_else(|| {
                    Error::ExactnessCheckFailed("D_p generator has no i_0 chain".into())
                })?;
                let src_host = self.couple.d0(src_spot)?;
                current = src_host.cohomology.lift(&src_host.group.reduce(&pre));
                spot = src_spot;
            }
            let image = self.couple.j0_class(spot.1, &current)?;
            let coords = host_e.coords(&image)?;
            let expressed = ep.express(host_e.group.relations(), &coords).ok_or_else(|| {
                Error::ExactnessCheckFailed("j_p image leaves E_p".into())
            })?;
            cols.push(expressed);
        }
        AbHom::new(
            dp.group.clone(),
            ep.group.clone(),
            IntMatrix::from_columns(ep.group.generators(), &cols),
        )
    }
}

/// One obstruction value.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ObstructionValue {
    pub s: usize,
    pub page: usize,
    pub bidegree: (usize, usize),
    pub value: Vec<String>,
    pub vanishes: bool,
}

/// The verdict of the obstruction sequence.
#[derive(Clone, Debug, serde::Serialize)]
pub enum Verdict {
    Essential,
    BlockedAt(usize),
}

pub struct ObstructionReport {
    pub degree: usize,
    pub class_coords: Vec<BigInt>,
    pub obstructions: Vec<ObstructionValue>,
    pub verdict: Verdict,
    pub zero_divisor: bool,
    /// equivariant certificate mu: I^n -> A with mu_*(v^n) = class
    pub certificate: Option<ModuleMap>,
}

/// Evaluate the full obstruction sequence of a class in H^n(G x G, A).
/// Obstruction s is only evaluated once obstructions 0..s-1 vanished; when
/// all n vanish, an essentiality certificate is extracted from the membership
/// in the image of the n-fold connecting composite and verified by
/// pushforward against the power of the canonical class.
pub fn obstruction_sequence(
    couple: &ExactCouple,
    alpha: &CohomologyClass,
) -> Result<ObstructionReport> {
    let n = alpha.degree;
    if n == 0 || n > couple.n_max {
        return Err(Error::InvalidInput(format!(
            "obstruction sequence needs 1 <= degree <= n_max, got {n}"
        )));
    }
    // alpha lives in D_0^{n, 0}: its coefficients must be Hom(I^0, A) = A
    let alpha = reframe_to_d0(couple, alpha)?;
    let host = couple.d0((n, 0))?;
    let class_coords = host.coords(&alpha)?;
    let mut pages = DerivedPages::new(couple);
    let mut obstructions = Vec::new();
    // j_0
    let e00 = couple.e0((n, 0))?;
    let j0 = couple.j0_class(0, &alpha)?;
    let j0_coords = e00.coords(&j0)?;
    let vanishes = j0_coords.iter().all(|x| x.is_zero());
    obstructions.push(ObstructionValue {
        s: 0,
        page: 0,
        bidegree: (n, 0),
        value: j0_coords.iter().map(|x| x.to_string()).collect(),
        vanishes,
    });
    let zero_divisor = vanishes;
    if !vanishes {
        return Ok(ObstructionReport {
            degree: n,
            class_coords,
            obstructions,
            verdict: Verdict::BlockedAt(0),
            zero_divisor,
            certificate: None,
        });
    }
    // stages s = 1..n-1: alpha is in D_s; j_s(alpha) = [j_0(y)] in E_s for
    // any y with i_0^s(y) = alpha
    for s in 1..n {
        let spot = (n - s, s);
        // membership in im(i_0^s) and a preimage
        let composite = i0_composite(couple, n, s)?;
        let Some(y_coords) = composite.preimage(&class_coords) else {
            // the previous obstruction vanished in E_s yet the membership
            // failed: the couple machinery is inconsistent
            return Err(Error::ExactnessCheckFailed(format!(
                "obstruction {s} undetermined: no preimage under the connecting composite"
            )));
        };
        let src_host = couple.d0(spot)?;
        let y = src_host.cohomology.lift(&src_host.group.reduce(&y_coords));
        let jy = couple.j0_class(spot.1, &y)?;
        let e_host = couple.e0(spot)?;
        let jy_host_coords = e_host.coords(&jy)?;
        let value_page = pages.e_group(s, spot)?;
        let (value, vanishes) = match &value_page {
            Some(pg) => {
                let expressed =
                    pg.express(e_host.group.relations(), &jy_host_coords).ok_or_else(|| {
                        Error::ExactnessCheckFailed(format!(
                            "obstruction {s} representative is not a page-{s} cycle"
                        ))
                    })?;
                let canon = pg.group.reduce(&expressed);
                let vanish = canon.iter().all(|x| x.is_zero());
                (canon.iter().map(|x| x.to_string()).collect(), vanish)
            }
            None => {
                // grid cannot host the page; fall back to the direct
                // membership test for "does alpha survive to stage s+1"
                let next = i0_composite(couple, n, s + 1)?;
                let vanish = next.preimage(&class_coords).is_some();
                (vec![format!("(page out of grid)")], vanish)
            }
        };
        obstructions.push(ObstructionValue {
            s,
            page: s,
            bidegree: spot,
            value,
            vanishes,
        });
        if !vanishes {
            return Ok(ObstructionReport {
                degree: n,
                class_coords,
                obstructions,
                verdict: Verdict::BlockedAt(s),
                zero_divisor,
                certificate: None,
            });
        }
    }
    // all n obstructions vanish: extract mu from D_0^{0, n}
    let composite = i0_composite(couple, n, n)?;
    let Some(mu_coords) = composite.preimage(&class_coords) else {
        return Err(Error::ExactnessCheckFailed(
            "all obstructions vanish but no certificate preimage exists".into(),
        ));
    };
    let bottom = couple.d0((0, n))?;
    let mu_class = bottom.cohomology.lift(&bottom.group.reduce(&mu_coords));
    // degree-0 classes of Hom(I^n, A) are invariant vectors; the resolution
    // has a single degree-0 generator, so the cocycle is the element itself
    let hom_rank = couple.hom_modules[n].rank();
    let mu_vec = mu_class.cocycle[..hom_rank].to_vec();
    let power_module = tensor_power_diagonal(&couple.ctx.ideal, n)?;
    let mu_matrix = hom_matrix_from_element(&mu_vec, power_module.rank(), couple.coeffs.rank());
    let mu = ModuleMap::new(power_module, couple.coeffs.clone(), mu_matrix)?;
    let mu = verify_certificate(couple, &alpha, mu)?;
    Ok(ObstructionReport {
        degree: n,
        class_coords,
        obstructions,
        verdict: Verdict::Essential,
        zero_divisor,
        certificate: Some(mu),
    })
}

/// Mandatory certificate check: mu_*(v^n) must reproduce the class (the
/// preimage is only defined up to sign conventions of the connecting chain,
/// so both signs are tried; failure of both is a hard error).
fn verify_certificate(
    couple: &ExactCouple,
    alpha: &CohomologyClass,
    mu: ModuleMap,
) -> Result<ModuleMap> {
    let n = alpha.degree;
    let vn = canonical_power(&couple.bundle, n)?;
    let alpha_on_bar = convert_to_resolution(alpha, &couple.bundle.bar_gamma)?;
    let pushed = pushforward(&mu, &vn)?;
    if pushed.equal_to(&alpha_on_bar)? {
        return Ok(mu);
    }
    let neg = ModuleMap::new(mu.source.clone(), mu.target.clone(), mu.matrix.neg())?;
    let pushed_neg = pushforward(&neg, &vn)?;
    if pushed_neg.equal_to(&alpha_on_bar)? {
        return Ok(neg);
    }
    Err(Error::CrossCheckFailed(
        "essentiality certificate fails the pushforward check".into(),
    ))
}

/// The composite of s connecting maps D_0^{n-s, s} -> ... -> D_0^{n, 0}.
fn i0_composite(couple: &ExactCouple, n: usize, s: usize) -> Result<AbHom> {
    let mut composite: Option<AbHom> = None;
    for step in 0..s {
        let hom = couple.i0_hom((n - s + step, s - step - 1))?;
        composite = Some(match composite {
            None => hom,
            Some(prev) => hom.compose(&prev)?,
        });
    }
    composite.ok_or_else(|| Error::InvalidInput("composite of zero maps".into()))
}

/// Put a class with coefficients A into the D_0^{n,0} frame (coefficients
/// Hom(I^0, A), same underlying module) on the couple's resolution.
fn reframe_to_d0(couple: &ExactCouple, alpha: &CohomologyClass) -> Result<CohomologyClass> {
    let on_res = convert_to_resolution(alpha, &couple.res)?;
    if on_res.coeffs().content_hash() == couple.hom_modules[0].content_hash() {
        let cx = cochain_complex(&couple.res, &couple.hom_modules[0])?;
        return cx.class(on_res.degree, on_res.cocycle);
    }
    Err(Error::GroupMismatch(
        "class coefficients do not match the couple coefficients".into(),
    ))
}

/// Zero-divisor test: restriction along the diagonal vanishes.
pub fn is_zero_divisor(couple: &ExactCouple, alpha: &CohomologyClass) -> Result<bool> {
    let bar_g = &couple.bundle.bar_g;
    let restricted = restriction(alpha, &couple.ctx.diag, bar_g)?;
    restricted.is_zero()
}

/// Both computations of the connecting homomorphism: the snake construction
/// of the dualized sequence, against -ev_*(v cup u). Returns the pair.
pub fn bockstein_both_paths(
    couple: &ExactCouple,
    s: usize,
    u: &CohomologyClass,
) -> Result<(CohomologyClass, CohomologyClass)> {
    // path A: snake
    let snake = couple.i0_class(s, u)?;
    // path B: -ev_*(v cup u) on the bar resolution
    let u_bar = convert_to_resolution(u, &couple.bundle.bar_gamma)?;
    let cup = cup_product(&couple.bundle.v, &u_bar)?;
    let ev = evaluation_map(&couple.ctx.ideal, &couple.coeffs, s)?;
    let pushed = pushforward(&ev, &cup)?;
    let neg = pushed.negated();
    let back = convert_to_resolution(&neg, &couple.res)?;
    Ok((snake, back))
}

static GLOBAL_SIGN: OnceLock<i8> = OnceLock::new();

/// The single global sign relating the snake connecting map and the
/// evaluation formula, pinned once per process on the first reference
/// instance (the cyclic group of order two with integral coefficients, spots
/// scanned from (0, 0) upward by total degree then r) whose groups are rich
/// enough to see a sign. All later sign-sensitive checks use this value.
pub fn pinned_global_sign() -> Result<i8> {
    if let Some(found) = GLOBAL_SIGN.get() {
        return Ok(*found);
    }
    let c2 = crate::groups::named_group(&crate::groups::GroupSpec::Cyclic(2))?;
    let ctx = Arc::new(PiContext::new(&c2)?);
    let coeffs = crate::modules::trivial_z(&ctx.gamma);
    let couple = ExactCouple::new(ctx, coeffs, 2)?;
    let mut spots: Vec<(usize, usize)> = Vec::new();
    for total in 0..=2 {
        for r in 0..=total {
            spots.push((r, total - r));
        }
    }
    let mut sign: Option<i8> = None;
    'outer: for (r, s) in spots {
        if !couple.in_grid((r, s + 1)) || r + 1 > couple.n_max {
            continue;
        }
        let host = couple.d0((r, s + 1))?;
        for u in host.cohomology.enumerate_torsion() {
            let (snake, ev) = bockstein_both_paths(&couple, s, &u)?;
            if snake.is_zero()? {
                continue;
            }
            if snake.equal_to(&ev)? {
                sign = Some(1);
            } else if snake.equal_to(&ev.negated())? {
                sign = Some(-1);
            } else {
                return Err(Error::CrossCheckFailed(
                    "connecting map differs from the evaluation formula by more than a sign"
                        .into(),
                ));
            }
            break 'outer;
        }
    }
    let value = sign.unwrap_or(1);
    let _ = GLOBAL_SIGN.set(value);
    Ok(value)
}

/// Assert that both connecting computations agree up to the pinned sign.
pub fn bockstein_cross_check(
    couple: &ExactCouple,
    s: usize,
    u: &CohomologyClass,
) -> Result<CohomologyClass> {
    let eps = pinned_global_sign()?;
    let (snake, ev) = bockstein_both_paths(couple, s, u)?;
    let adjusted = if eps == 1 { ev.clone() } else { ev.negated() };
    if !snake.equal_to(&adjusted)? {
        return Err(Error::CrossCheckFailed(format!(
            "connecting map and evaluation formula disagree (pinned sign {eps})"
        )));
    }
    Ok(snake)
}

/// The mutually inverse isomorphisms between equivariant maps out of
/// Z[G] (x) M over G x G and conjugation-equivariant maps M -> N over G.
pub struct PhiIsomorphism {
    /// basis of Hom_{Z[G x G]}(Z[G] (x) M, N), as Hom-coordinate columns
    pub lhs_basis: IntMatrix,
    /// basis of Hom_{Z[G]}(M~, N~)
    pub rhs_basis: IntMatrix,
    /// Phi on basis coordinates
    pub phi: IntMatrix,
    /// Psi on basis coordinates
    pub psi: IntMatrix,
}

/// Basis of the lattice of equivariant maps source -> target (modules over
/// the same group), as Hom-coordinate columns.
fn equivariant_hom_basis(source: &Arc<GModule>, target: &Arc<GModule>) -> IntMatrix {
    let group = source.group().clone();
    let (rs, rt) = (source.rank(), target.rank());
    let dim = rs * rt;
    // constraints: X act_S(g) - act_T(g) X = 0 for all g; coordinates of X
    // are (p source, q target) -> p * rt + q
    let mut triples: Vec<(usize, usize, BigInt)> = Vec::new();
    let mut row_off = 0usize;
    for g in group.elements() {
        let a = source.act(g);
        let b = target.act(g);
        // (X A)[q, p'] = sum_p X[q, p] A[p, p'] -> rows indexed (p', q)
        for (p, pp, v) in a.triples() {
            for q in 0..rt {
                triples.push((row_off + pp * rt + q, p * rt + q, v.clone()));
            }
        }
        // (B X)[q', p'] = sum_q B[q', q] X[q, p']
        for (qq, q, v) in b.triples() {
            for p in 0..rs {
                triples.push((row_off + p * rt + qq, p * rt + q, -v));
            }
        }
        row_off += dim;
    }
    let constraint = IntMatrix::from_triples(row_off, dim, triples);
    ColumnEchelon::with_transform(&constraint).kernel_basis()
}

/// Build Phi and Psi for modules M, N over G x G and verify that they are
/// mutually inverse on the computed bases.
pub fn phi_isomorphism(
    ctx: &Arc<PiContext>,
    m: &Arc<GModule>,
    n: &Arc<GModule>,
) -> Result<PhiIsomorphism> {
    let zg = ctx.incl.target.clone();
    let mid = tensor_diagonal(&zg, m)?;
    let m_tilde = restrict_along(&ctx.diag, m)?;
    let n_tilde = restrict_along(&ctx.diag, n)?;
    let lhs_basis = equivariant_hom_basis(&mid, n);
    let rhs_basis = equivariant_hom_basis(&m_tilde, &n_tilde);
    let ng = ctx.g.order();
    let (rm, rn) = (m.rank(), n.rank());
    // Phi: f -> f | e (x) M. mid index (a, u) = a * rm + u.
    let phi_on_hom = |f: &IntMatrix| -> IntMatrix {
        // f is rn x (ng * rm); take the block at a = identity
        IntMatrix::from_triples(
            rn,
            rm,
            f.triples().filter_map(|(q, col, v)| {
                let (a, u) = (col / rm, col % rm);
                (a == ctx.g.identity()).then(|| (q, u, v.clone()))
            }),
        )
    };
    // Psi: phi -> (a (x) u -> (a, e) . phi((a^{-1}, a^{-1}) . u))
    let psi_on_hom = |phi: &IntMatrix| -> IntMatrix {
        let mut triples: Vec<(usize, usize, BigInt)> = Vec::new();
        for a in ctx.g.elements() {
            let left = n.act(a * ng + ctx.g.identity());
            let conj = m.act(ctx.g.inv(a) * ng + ctx.g.inv(a));
            let block = left.mul(&phi.mul(&conj));
            for (q, u, v) in block.triples() {
                triples.push((q, a * rm + u, v.clone()));
            }
        }
        IntMatrix::from_triples(rn, ng * rm, triples)
    };
    // matrices of Phi and Psi on the computed bases
    let rhs_solver = ColumnEchelon::with_transform(&rhs_basis);
    let lhs_solver = ColumnEchelon::with_transform(&lhs_basis);
    let mut phi_cols = Vec::with_capacity(lhs_basis.cols());
    for j in 0..lhs_basis.cols() {
        let f = hom_matrix_from_element(&lhs_basis.column(j), mid.rank(), rn);
        let image = phi_on_hom(&f);
        let coords = rhs_solver
            .solve(&hom_element_from_matrix(&image))
            .ok_or_else(|| Error::CrossCheckFailed("Phi image leaves the target lattice".into()))?;
        phi_cols.push(coords);
    }
    let mut psi_cols = Vec::with_capacity(rhs_basis.cols());
    for j in 0..rhs_basis.cols() {
        let f = hom_matrix_from_element(&rhs_basis.column(j), rm, rn);
        let image = psi_on_hom(&f);
        // equivariance of the produced map, rechecked numerically
        ModuleMap::new(mid.clone(), n.clone(), image.clone())?;
        let coords = lhs_solver
            .solve(&hom_element_from_matrix(&image))
            .ok_or_else(|| Error::CrossCheckFailed("Psi image leaves the source lattice".into()))?;
        psi_cols.push(coords);
    }
    let phi = IntMatrix::from_columns(rhs_basis.cols(), &phi_cols);
    let psi = IntMatrix::from_columns(lhs_basis.cols(), &psi_cols);
    if !phi.mul(&psi).is_identity() || !psi.mul(&phi).is_identity() {
        return Err(Error::CrossCheckFailed("Phi and Psi are not mutually inverse".into()));
    }
    Ok(PhiIsomorphism { lhs_basis, rhs_basis, phi, psi })
}

/// Gamma: H^i(G x G, Hom(Z[G], A)) -> H^i(G, A~), as v -> omega_*(v | diag)
/// with omega(f) = f(e). Returns the homomorphism on presented groups,
/// asserted to be an isomorphism.
pub fn gamma_isomorphism(
    ctx: &Arc<PiContext>,
    coeffs: &Arc<GModule>,
    i: usize,
) -> Result<(AbHom, PresentedAbelianGroup, PresentedAbelianGroup)> {
    let zg = ctx.incl.target.clone();
    let hom_coeffs = hom_z_module(&zg, coeffs)?;
    let res_gamma = default_engine_resolution(&ctx.gamma, i + 1)?;
    let res_g = default_engine_resolution(&ctx.g, i + 1)?;
    let cx_gamma = cochain_complex(&res_gamma, &hom_coeffs)?;
    let source = cohomology(&cx_gamma, i)?;
    let a_tilde = restrict_along(&ctx.diag, coeffs)?;
    let cx_g = cochain_complex(&res_g, &a_tilde)?;
    let target = cohomology(&cx_g, i)?;
    // omega: Hom(Z[G], A) | diag -> A~, f -> f(e)
    let restricted_hom = restrict_along(&ctx.diag, &hom_coeffs)?;
    let ng = ctx.g.order();
    let ra = coeffs.rank();
    let omega = ModuleMap::new(
        restricted_hom,
        a_tilde,
        IntMatrix::from_triples(
            ra,
            ng * ra,
            (0..ra).map(|q| (q, ctx.g.identity() * ra + q, BigInt::one())),
        ),
    )?;
    let source_group = Arc::new(source.group());
    let target_group = Arc::new(target.group());
    let mut cols = Vec::with_capacity(source_group.generators());
    for gen in source.generators() {
        let restricted = restriction(&gen, &ctx.diag, &res_g)?;
        let pushed = pushforward(&omega, &restricted)?;
        cols.push(target.project(&pushed)?);
    }
    let hom = AbHom::new(
        source_group.clone(),
        target_group.clone(),
        IntMatrix::from_columns(target_group.generators(), &cols),
    )?;
    if !hom.is_isomorphism() {
        return Err(Error::CrossCheckFailed(format!(
            "Gamma is not an isomorphism at degree {i}"
        )));
    }
    Ok((hom, source.group(), target.group()))
}

/// Direct computation of E_0^{rs} by Ext over the product group.
pub fn e0_direct_factors(
    ctx: &Arc<PiContext>,
    coeffs: &Arc<GModule>,
    r: usize,
    s: usize,
) -> Result<Vec<BigInt>> {
    let zg = ctx.incl.target.clone();
    let i_s = tensor_power_diagonal(&ctx.ideal, s)?;
    let mid = tensor_diagonal(&zg, &i_s)?;
    let hom = hom_z_module(&mid, coeffs)?;
    let res = default_engine_resolution(&ctx.gamma, r + 1)?;
    let cx = cochain_complex(&res, &hom)?;
    crate::cohomology::cohomology_invariant_factors(&cx, r)
}

/// The centralizer decomposition oracle: E_0^{rs} decomposes as the product
/// over joint conjugacy classes of nontrivial s-tuples of the cohomology of
/// the stabilizer with diagonally restricted coefficients.
pub struct E0OracleReport {
    pub factors: Vec<BigInt>,
    pub per_orbit: Vec<(Vec<usize>, Vec<BigInt>)>,
}

pub fn e0_oracle(
    ctx: &Arc<PiContext>,
    coeffs: &Arc<GModule>,
    r: usize,
    s: usize,
) -> Result<E0OracleReport> {
    if s == 0 {
        return Err(Error::InvalidInput("the decomposition needs s >= 1".into()));
    }
    let orbits = tuple_conjugacy_classes(&ctx.g, s, true)?;
    let mut groups: Vec<PresentedAbelianGroup> = Vec::new();
    let mut per_orbit = Vec::new();
    for orbit in &orbits {
        let factors = orbit_cohomology(ctx, coeffs, orbit, r)?;
        per_orbit.push((orbit.representative.clone(), factors.clone()));
        let as_group = PresentedAbelianGroup::from_factors(
            &factors
                .iter()
                .map(|d| d.to_string().parse::<i64>().unwrap_or(0))
                .collect::<Vec<_>>(),
        );
        groups.push(as_group);
    }
    let refs: Vec<&PresentedAbelianGroup> = groups.iter().collect();
    Ok(E0OracleReport { factors: direct_sum_factors(&refs), per_orbit })
}

fn orbit_cohomology(
    ctx: &Arc<PiContext>,
    coeffs: &Arc<GModule>,
    orbit: &TupleOrbit,
    r: usize,
) -> Result<Vec<BigInt>> {
    let (sub, embed) = subgroup_table(&ctx.g, &orbit.stabilizer)?;
    // composite N_C -> G -> diagonal of G x G
    let image: Vec<u32> = sub
        .elements()
        .map(|x| {
            let g = embed.apply(x);
            (ctx.diag.apply(g)) as u32
        })
        .collect();
    let hom = GroupHom::new(sub.clone(), ctx.gamma.clone(), image)?;
    let restricted = restrict_along(&hom, coeffs)?;
    let res = default_engine_resolution(&sub, r + 1)?;
    let cx = cochain_complex(&res, &restricted)?;
    crate::cohomology::cohomology_invariant_factors(&cx, r)
}

/// Scan for the largest k with D_k^{n,0} nonzero; k + 1 is the algebraic
/// lower bound for the topological complexity. For finite groups this is a
/// formal output of the algebra (the classifying space has no finite model);
/// the report flags that.
#[derive(Debug, serde::Serialize)]
pub struct TcLowerBoundReport {
    pub bound: usize,
    pub witness: Option<(usize, usize)>,
    pub formal_for_finite_group: bool,
}

pub fn tc_lower_bound(couple: &ExactCouple) -> Result<TcLowerBoundReport> {
    let mut best = 0usize;
    let mut witness = None;
    // deterministic scan order: by total degree, then r
    for n in 1..=couple.n_max {
        for k in 1..=n {
            if !couple.in_grid((n - k, k)) {
                continue;
            }
            let composite = i0_composite(couple, n, k)?;
            let host = couple.d0((n, 0))?;
            let nonzero = (0..composite.matrix.cols()).any(|j| {
                !host.group.is_zero_class(&composite.matrix.column(j))
            });
            if nonzero && k + 1 > best {
                best = k + 1;
                witness = Some((n, k));
            }
        }
    }
    Ok(TcLowerBoundReport { bound: best, witness, formal_for_finite_group: true })
}

/// Essentiality test specialized to degree one, where it must coincide with
/// the zero-divisor property.
pub fn degree_one_essential_matches_zero_divisor(
    couple: &ExactCouple,
    alpha: &CohomologyClass,
) -> Result<(bool, bool)> {
    let report = obstruction_sequence(couple, alpha)?;
    let essential = matches!(report.verdict, Verdict::Essential);
    let zd = is_zero_divisor(couple, alpha)?;
    Ok((essential, zd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{named_group, GroupSpec};
    use crate::modules::trivial_z;

    fn c2_couple() -> ExactCouple {
        let g = named_group(&GroupSpec::Cyclic(2)).unwrap();
        let ctx = Arc::new(PiContext::new(&g).unwrap());
        let ideal = ctx.ideal.clone();
        ExactCouple::new(ctx, ideal, 2).unwrap()
    }

    #[test]
    fn page0_groups_match_direct_computations() {
        let g = named_group(&GroupSpec::Cyclic(2)).unwrap();
        let ctx = Arc::new(PiContext::new(&g).unwrap());
        let coeffs = trivial_z(&ctx.gamma);
        let couple = ExactCouple::new(ctx.clone(), coeffs, 2).unwrap();
        // D_0^{n,0} = H^n(gamma, A): for n = 0 this is Z
        let d00 = couple.d0((0, 0)).unwrap();
        assert_eq!(d00.group.invariant_factors(), vec![BigInt::zero()]);
        // E_0^{r,1} = H^r(C2, Z) for r <= 2 via the oracle side
        for r in 0..=2 {
            let direct = e0_direct_factors(&ctx, &trivial_z(&ctx.gamma), r, 1).unwrap();
            let oracle = e0_oracle(&ctx, &trivial_z(&ctx.gamma), r, 1).unwrap();
            assert_eq!(direct, oracle.factors, "E_0^({r},1) for c2");
        }
    }

    #[test]
    fn page0_exactness_for_c2() {
        let couple = c2_couple();
        let checked = couple.verify_page0_exactness().unwrap();
        assert!(checked.len() > 10);
    }

    #[test]
    fn canonical_class_is_essential_with_identity_certificate() {
        let couple = c2_couple();
        let report = obstruction_sequence(&couple, &couple.bundle.v).unwrap();
        assert!(matches!(report.verdict, Verdict::Essential));
        assert!(report.zero_divisor);
        let mu = report.certificate.unwrap();
        // the certificate for v itself can be taken to be the identity;
        // whatever was extracted must push v to v, which the construction
        // already verified. Sanity: mu is a map I -> I.
        assert_eq!(mu.source.rank(), couple.ctx.ideal.rank());
        assert_eq!(mu.target.rank(), couple.ctx.ideal.rank());
    }

    #[test]
    fn zero_class_is_essential() {
        let couple = c2_couple();
        let cx = cochain_complex(&couple.res, &couple.hom_module(0)).unwrap();
        let zero = cx.zero_class(1);
        let report = obstruction_sequence(&couple, &zero).unwrap();
        assert!(matches!(report.verdict, Verdict::Essential));
    }

    #[test]
    fn degree_one_essential_iff_zero_divisor_c2() {
        let couple = c2_couple();
        let host = couple.d0((1, 0)).unwrap();
        for alpha in host.cohomology.enumerate_torsion() {
            let (essential, zd) =
                degree_one_essential_matches_zero_divisor(&couple, &alpha).unwrap();
            assert_eq!(essential, zd);
        }
    }

    #[test]
    fn pinned_sign_is_consistent() {
        let eps = pinned_global_sign().unwrap();
        assert!(eps == 1 || eps == -1);
        // the sign must make every c2 instance agree
        let couple = c2_couple();
        for s in 0..=1 {
            let host = couple.d0((1, s + 1)).unwrap();
            for u in host.cohomology.enumerate_torsion() {
                bockstein_cross_check(&couple, s, &u).unwrap();
            }
        }
    }

    #[test]
    fn tc_lower_bound_from_canonical_class() {
        // D_1^{1,0} contains the nonzero zero-divisor v: bound >= 2
        let couple = c2_couple();
        let report = tc_lower_bound(&couple).unwrap();
        assert!(report.bound >= 2, "bound {}", report.bound);
        assert!(report.formal_for_finite_group);
        // trivial group: no bound
        let c1 = named_group(&GroupSpec::Cyclic(1)).unwrap();
        let ctx1 = Arc::new(PiContext::new(&c1).unwrap());
        let couple1 = ExactCouple::new(ctx1.clone(), trivial_z(&ctx1.gamma), 2).unwrap();
        let report1 = tc_lower_bound(&couple1).unwrap();
        assert_eq!(report1.bound, 0);
    }

    #[test]
    fn phi_isomorphism_for_c2_ideal() {
        let g = named_group(&GroupSpec::Cyclic(2)).unwrap();
        let ctx = Arc::new(PiContext::new(&g).unwrap());
        let phi = phi_isomorphism(&ctx, &ctx.ideal, &ctx.ideal).unwrap();
        assert_eq!(phi.lhs_basis.cols(), phi.rhs_basis.cols());
        // trivial modules: both sides Z, phi the identity
        let triv = trivial_z(&ctx.gamma);
        let phi_t = phi_isomorphism(&ctx, &triv, &triv).unwrap();
        assert_eq!(phi_t.lhs_basis.cols(), 1);
        assert!(phi_t.phi.is_identity());
    }

    #[test]
    fn gamma_isomorphism_small_cases() {
        let c2 = named_group(&GroupSpec::Cyclic(2)).unwrap();
        let ctx = Arc::new(PiContext::new(&c2).unwrap());
        // i = 0, trivial coefficients: both sides Z
        let (_, src, tgt) = gamma_isomorphism(&ctx, &trivial_z(&ctx.gamma), 0).unwrap();
        assert_eq!(src.invariant_factors(), vec![BigInt::zero()]);
        assert_eq!(tgt.invariant_factors(), vec![BigInt::zero()]);
        // i = 2 over c3: both sides Z/3
        let c3 = named_group(&GroupSpec::Cyclic(3)).unwrap();
        let ctx3 = Arc::new(PiContext::new(&c3).unwrap());
        let (_, src3, tgt3) = gamma_isomorphism(&ctx3, &trivial_z(&ctx3.gamma), 2).unwrap();
        assert_eq!(src3.invariant_factors(), vec![BigInt::from(3)]);
        assert_eq!(tgt3.invariant_factors(), vec![BigInt::from(3)]);
    }

    #[test]
    fn e0_oracle_for_s3_degree_two() {
        let s3 = named_group(&GroupSpec::Symmetric3).unwrap();
        let ctx = Arc::new(PiContext::new(&s3).unwrap());
        let report = e0_oracle(&ctx, &trivial_z(&ctx.gamma), 2, 1).unwrap();
        // orbits: transpositions (N_C = C2) and 3-cycles (N_C = C3):
        // H^2(C2, Z) x H^2(C3, Z) = Z/2 x Z/3 = Z/6
        assert_eq!(report.factors, vec![BigInt::from(6)]);
        assert_eq!(report.per_orbit.len(), 2);
    }

    #[test]
    fn derived_pages_for_c2() {
        let couple = c2_couple();
        let mut pages = DerivedPages::new(&couple);
        // d_0 with zero differential leaves E unchanged where both exist
        if let Some((lhs, rhs)) = pages.verify_derivation(0, (1, 1)).unwrap() {
            assert_eq!(lhs, rhs);
        }
        // exactness of the derived couple at reachable D nodes
        for r in 1..=2 {
            for s in 0..=1 {
                if let Some(ok) = pages.verify_derived_exactness_at_d(1, (r, s)).unwrap() {
                    assert!(ok, "derived exactness at ({r},{s})");
                }
            }
        }
    }
}
