//! Unified cohomology handles for groups of any size.
//!
//! Small groups get a resolution and honest cocycle bases. Groups whose
//! order is coprime to `ell` keep only fixed points. Everything else is
//! Sylow-reduced: classes live as stable elements inside the Sylow
//! subgroup's cohomology — the image of the idempotent
//! `[G:P]^{-1} res cor`, computed by the double-coset formula — and all
//! induced maps in and out of large groups are routed through the Sylow
//! subgroup by the same formula.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::QdpError;
use crate::field::{Fp, PrimeField};
use crate::linalg::{Mat, RowSpace, Solver};

use super::cohomology::CohomologySpace;
use super::gmodule::GModule;
use super::group::FiniteGroup;
use super::maps::{
    build_chain_down, build_chain_up, inclusion_indices, pullback_class_matrix,
    transfer_class_matrix,
};
use super::resolution::{Res, ResRegistry};

/// Order bound below which ell-groups get their own (minimal) resolution.
pub const DIRECT_ORDER_BOUND: usize = 400;

/// Order bound below which any group of order divisible by ell is resolved
/// directly; the lean resolution may be non-minimal there, which is
/// affordable at this size.
pub const SMALL_DIRECT_BOUND: usize = 60;

pub enum Backing {
    Direct {
        res: Arc<Res>,
        spaces: Vec<Arc<CohomologySpace>>,
    },
    /// order coprime to ell: only fixed points in degree 0
    Averaged { fixed: Mat },
    Stable(StableData),
}

pub struct StableData {
    pub sylow: Arc<FiniteGroup>,
    pub res: Arc<Res>,
    pub module_p: Arc<GModule>,
    pub spaces: Vec<Arc<CohomologySpace>>,
    /// per degree: stable basis rows (vectors in H^t(P) class coords) and
    /// a solver expressing stable vectors in that basis
    pub per_t: Vec<StableSpace>,
}

pub struct StableSpace {
    pub basis: Mat,
    pub solver: Solver,
}

pub struct GroupCohomology {
    pub group: Arc<FiniteGroup>,
    pub module: Arc<GModule>,
    pub field: PrimeField,
    pub t_max: usize,
    pub backing: Backing,
}

impl GroupCohomology {
    pub fn dim(&self, t: usize) -> usize {
        match &self.backing {
            Backing::Direct { spaces, .. } => spaces[t].dim(),
            Backing::Averaged { fixed } => {
                if t == 0 {
                    fixed.rows
                } else {
                    0
                }
            }
            Backing::Stable(sd) => sd.per_t[t].basis.rows,
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..=self.t_max).map(|t| self.dim(t)).collect()
    }

    /// The unit class in `H^0` (trivial-coefficient handles only).
    pub fn unit(&self) -> Vec<Fp> {
        assert!(self.module.is_trivial_action() && self.module.dim == 1);
        match &self.backing {
            Backing::Direct { spaces, .. } => spaces[0]
                .class_of(&[1])
                .expect("constant functional is a cocycle"),
            Backing::Averaged { .. } => vec![1],
            Backing::Stable(sd) => {
                let v = sd.spaces[0].class_of(&[1]).expect("unit on the Sylow");
                sd.per_t[0]
                    .solver
                    .solve(&v)
                    .expect("unit is a stable element")
            }
        }
    }

    /// For a stable-backed group: the `H^t(P)` class-coordinate vector of a
    /// class (its restriction to the Sylow subgroup).
    pub fn stable_vector(&self, t: usize, coords: &[Fp]) -> Vec<Fp> {
        match &self.backing {
            Backing::Stable(sd) => {
                let f = &self.field;
                let b = &sd.per_t[t].basis;
                let mut out = vec![0; b.cols];
                for (i, &c) in coords.iter().enumerate() {
                    if c != 0 {
                        for (o, &x) in out.iter_mut().zip(b.row(i).iter()) {
                            *o = f.add(*o, f.mul(c, x));
                        }
                    }
                }
                out
            }
            _ => panic!("stable_vector on a non-stable backing"),
        }
    }
}

/// Session context: field, depth, budget, and caches for handles and the
/// induced-map matrices.
pub struct CohCtx {
    pub field: PrimeField,
    pub t_max: usize,
    pub budget: u64,
    /// force direct computation regardless of order (testing aid)
    pub force_direct: bool,
    handles: Mutex<HashMap<u64, Arc<GroupCohomology>>>,
    res_cache: Mutex<HashMap<(u64, u64, usize), Arc<Mat>>>,
    cor_cache: Mutex<HashMap<(u64, u64, usize), Arc<Mat>>>,
    conjugator_cache: Mutex<HashMap<(u64, u64, u64), u32>>,
}

impl CohCtx {
    pub fn new(ell: u64, t_max: usize, budget: u64) -> Result<CohCtx, QdpError> {
        Ok(CohCtx {
            field: PrimeField::new(ell)?,
            t_max,
            budget,
            force_direct: false,
            handles: Mutex::new(HashMap::new()),
            res_cache: Mutex::new(HashMap::new()),
            cor_cache: Mutex::new(HashMap::new()),
            conjugator_cache: Mutex::new(HashMap::new()),
        })
    }

    /// Trivial-coefficient handle, cached per group.
    pub fn handle(&self, group: &Arc<FiniteGroup>) -> Arc<GroupCohomology> {
        if let Some(h) = self.handles.lock().unwrap().get(&group.id) {
            return h.clone();
        }
        let module = GModule::trivial(group, &self.field);
        let h = Arc::new(self.build(group, &module));
        self.handles.lock().unwrap().insert(group.id, h.clone());
        h
    }

    /// Handle with explicit coefficients (not cached).
    pub fn handle_with_module(
        &self,
        group: &Arc<FiniteGroup>,
        module: &Arc<GModule>,
    ) -> Arc<GroupCohomology> {
        Arc::new(self.build(group, module))
    }

    fn build(&self, group: &Arc<FiniteGroup>, module: &Arc<GModule>) -> GroupCohomology {
        let ell = self.field.ell();
        let n = group.order() as u64;
        let mut m = n;
        while m % ell == 0 {
            m /= ell;
        }
        let is_ell_group = m == 1;
        // lean resolutions are minimal only over local group algebras;
        // other groups go through their Sylow subgroup unless tiny
        let direct = (is_ell_group && group.order() <= DIRECT_ORDER_BOUND)
            || group.order() <= SMALL_DIRECT_BOUND
            || (self.force_direct && group.order() <= DIRECT_ORDER_BOUND);
        if !direct && n % ell != 0 {
            // coprime order: only fixed points
            let fixed = fixed_point_basis(group, module, &self.field);
            return GroupCohomology {
                group: group.clone(),
                module: module.clone(),
                field: self.field,
                t_max: self.t_max,
                backing: Backing::Averaged { fixed },
            };
        }
        if direct {
            let res = ResRegistry::global().atomic(group, &self.field, self.t_max + 1);
            let spaces = (0..=self.t_max)
                .map(|t| Arc::new(CohomologySpace::compute(&res, module, t)))
                .collect();
            return GroupCohomology {
                group: group.clone(),
                module: module.clone(),
                field: self.field,
                t_max: self.t_max,
                backing: Backing::Direct { res, spaces },
            };
        }
        self.build_stable(group, module)
    }

    /// The Sylow-reduced construction; public only for consistency tests
    /// that force it on small groups.
    pub fn build_stable_for_tests(&self, group: &Arc<FiniteGroup>) -> GroupCohomology {
        let module = GModule::trivial(group, &self.field);
        self.build_stable(group, &module)
    }

    fn build_stable(&self, group: &Arc<FiniteGroup>, module: &Arc<GModule>) -> GroupCohomology {
        let sylow = group.sylow(self.field.ell());
        let res = ResRegistry::global().atomic(&sylow, &self.field, self.t_max + 1);
        self.build_stable_with(group, module, sylow, res)
    }

    /// Sylow-reduced handle over a prescribed Sylow subgroup and resolution
    /// (used to align product cells with tensor resolutions).
    pub fn build_stable_with(
        &self,
        group: &Arc<FiniteGroup>,
        module: &Arc<GModule>,
        sylow: Arc<FiniteGroup>,
        res: Arc<Res>,
    ) -> GroupCohomology {
        let ell = self.field.ell();
        let module_p = GModule::restrict_to_subgroup(module, &sylow);
        let spaces: Vec<Arc<CohomologySpace>> = (0..=self.t_max)
            .map(|t| Arc::new(CohomologySpace::compute(&res, &module_p, t)))
            .collect();
        let index = (group.order() / sylow.order()) as u64;
        let index_inv = self
            .field
            .inv(self.field.reduce(index))
            .expect("Sylow index is invertible");
        // Mackey idempotent per degree
        let cosets = group.double_cosets(&sylow, &sylow);
        let mut per_t = Vec::with_capacity(self.t_max + 1);
        let mut term_data: Vec<MackeyTerm> = Vec::new();
        for &(g, _) in &cosets {
            term_data.push(self.mackey_term_groups(group, &sylow, &sylow, g));
        }
        for t in 0..=self.t_max {
            let dim_hp = spaces[t].dim();
            let mut f_mat = Mat::zeros(dim_hp, dim_hp);
            for term in &term_data {
                if t >= 1 && term.q.order() as u64 % ell != 0 {
                    continue; // trivial intersection contributes nothing
                }
                let m = self.mackey_term_matrix(
                    term,
                    group,
                    module,
                    &sylow,
                    &res,
                    &spaces,
                    &sylow,
                    &res,
                    &spaces,
                    &module_p,
                    &module_p,
                    t,
                );
                f_mat = f_mat.add_mat(&m, &self.field);
            }
            let f_mat = f_mat.scale(index_inv, &self.field);
            // idempotency is a strong internal consistency check
            debug_assert_eq!(
                f_mat.matmul(&f_mat, &self.field),
                f_mat,
                "stable idempotent must square to itself"
            );
            // image basis: row space of the transpose
            let tr = f_mat.transpose();
            let mut rs = RowSpace::new(dim_hp, self.field);
            for i in 0..tr.rows {
                rs.push_row(tr.row(i).to_vec());
            }
            let basis = rs.basis();
            let solver = Solver::new(&basis.transpose(), &self.field);
            per_t.push(StableSpace { basis, solver });
        }
        GroupCohomology {
            group: group.clone(),
            module: module.clone(),
            field: self.field,
            t_max: self.t_max,
            backing: Backing::Stable(StableData {
                sylow,
                res,
                module_p,
                spaces,
                per_t,
            }),
        }
    }

    /// Subgroup data of one Mackey double-coset term for
    /// `res_P cor_K`: `q = P  ^ g K g^{-1}` and `kg = g^{-1} P g ^ K`.
    fn mackey_term_groups(
        &self,
        ambient: &Arc<FiniteGroup>,
        p: &Arc<FiniteGroup>,
        k: &Arc<FiniteGroup>,
        g: u32,
    ) -> MackeyTerm {
        let ginv = ambient.inv(g);
        let mut q_codes = Vec::new();
        for &pc in p.codes() {
            let pi = ambient.index_of_code(pc).unwrap();
            let moved = ambient.mul(ambient.mul(ginv, pi), g);
            if k.contains_code(ambient.code(moved)) {
                q_codes.push(pc);
            }
        }
        let q = p.subgroup_from_codes(format!("{}^g^{}", p.name, k.name), q_codes.clone());
        let kg_codes: Vec<u64> = q_codes
            .iter()
            .map(|&pc| {
                let pi = ambient.index_of_code(pc).unwrap();
                ambient.code(ambient.mul(ambient.mul(ginv, pi), g))
            })
            .collect();
        let kg = k.subgroup_from_codes(format!("g^{}^{}", p.name, k.name), kg_codes);
        MackeyTerm { g, q, kg }
    }

    /// The matrix of one Mackey term
    /// `cor^P_Q conj_g res^K_{K_g} : H^t(K) -> H^t(P)`
    /// expressed on the given bases (the K side being the Sylow spaces of K
    /// when K is stable, or K's own spaces when direct).
    #[allow(clippy::too_many_arguments)]
    fn mackey_term_matrix(
        &self,
        term: &MackeyTerm,
        ambient: &Arc<FiniteGroup>,
        ambient_module: &Arc<GModule>,
        _p: &Arc<FiniteGroup>,
        p_res: &Arc<Res>,
        p_spaces: &[Arc<CohomologySpace>],
        k: &Arc<FiniteGroup>,
        k_res: &Arc<Res>,
        k_spaces: &[Arc<CohomologySpace>],
        _p_module: &Arc<GModule>,
        _k_module: &Arc<GModule>,
        t: usize,
    ) -> Mat {
        let f = &self.field;
        let g = term.g;
        // resolutions and spaces on q and kg
        let mod_q = GModule::restrict_to_subgroup(ambient_module, &term.q);
        let mod_kg = GModule::restrict_to_subgroup(ambient_module, &term.kg);
        let res_q = ResRegistry::global().atomic(&term.q, f, self.t_max + 1);
        let res_kg = ResRegistry::global().atomic(&term.kg, f, self.t_max + 1);
        let sp_q = CohomologySpace::compute(&res_q, &mod_q, t);
        let sp_kg = CohomologySpace::compute(&res_kg, &mod_kg, t);
        // res^K_{K_g}
        let inc = inclusion_indices(&term.kg, k);
        let up = build_chain_up(&res_kg, k_res, &|i| inc[i as usize], t);
        let res_m = pullback_class_matrix(&up, &sp_kg, &k_spaces[t], t, None);
        // conj: H(K_g) -> H(Q): pullback along Q -> K_g, q |-> g^{-1} q g,
        // with coefficient twist rho_V(g)
        let ginv = ambient.inv(g);
        let phi: Vec<u32> = term
            .q
            .codes()
            .iter()
            .map(|&qc| {
                let qi = ambient.index_of_code(qc).unwrap();
                let moved = ambient.mul(ambient.mul(ginv, qi), g);
                term.kg
                    .index_of_code(ambient.code(moved))
                    .expect("conjugation maps Q onto K_g")
            })
            .collect();
        let up_conj = build_chain_up(&res_q, &res_kg, &|i| phi[i as usize], t);
        let twist = if ambient_module.is_trivial_action() {
            None
        } else {
            Some(ambient_module.act_mat(g))
        };
        let conj_m = pullback_class_matrix(&up_conj, &sp_q, &sp_kg, t, twist.as_ref());
        // cor^P_Q
        let down = build_chain_down(p_res, &res_q, t);
        let cor_m = transfer_class_matrix(&down, &p_spaces[t], &sp_q, t);
        cor_m.matmul(&conj_m.matmul(&res_m, f), f)
    }

    /// Restriction from a stable-backed group to an ell-subgroup `sub`,
    /// expressed in the provided target space coordinates. Routes through
    /// the Sylow subgroup: conjugate `sub` into it, restrict there, and
    /// transport back.
    fn res_stable_to_small(
        &self,
        gh: &Arc<GroupCohomology>,
        sub: &Arc<FiniteGroup>,
        sub_res: &Arc<Res>,
        sub_space: &CohomologySpace,
        t: usize,
    ) -> Mat {
        let f = &self.field;
        let sd = match &gh.backing {
            Backing::Stable(sd) => sd,
            _ => unreachable!(),
        };
        let x = self.find_conjugator(&gh.group, sub, &sd.sylow);
        let xinv = gh.group.inv(x);
        let a_codes: Vec<u64> = sub
            .codes()
            .iter()
            .map(|&c| {
                let ci = gh.group.index_of_code(c).unwrap();
                gh.group.code(gh.group.mul(gh.group.mul(x, ci), xinv))
            })
            .collect();
        let a = sd.sylow.subgroup_from_codes("conj-sub".into(), a_codes);
        let mod_a = GModule::restrict_to_subgroup(&gh.module, &a);
        let res_a = ResRegistry::global().atomic(&a, f, self.t_max + 1);
        let sp_a = CohomologySpace::compute(&res_a, &mod_a, t);
        let inc = inclusion_indices(&a, &sd.sylow);
        let up = build_chain_up(&res_a, &sd.res, &|i| inc[i as usize], t);
        let r1 = pullback_class_matrix(&up, &sp_a, &sd.spaces[t], t, None);
        // transport H(A) -> H(sub): pullback along sub -> A, s |-> x s x^{-1},
        // twisted by rho(x^{-1})
        let phi: Vec<u32> = sub
            .codes()
            .iter()
            .map(|&c| {
                let ci = gh.group.index_of_code(c).unwrap();
                a.index_of_code(gh.group.code(gh.group.mul(gh.group.mul(x, ci), xinv)))
                    .unwrap()
            })
            .collect();
        let upc = build_chain_up(sub_res, &res_a, &|i| phi[i as usize], t);
        let twist = if gh.module.is_trivial_action() {
            None
        } else {
            Some(gh.module.act_mat(xinv))
        };
        let r2 = pullback_class_matrix(&upc, sub_space, &sp_a, t, twist.as_ref());
        let to_sub = r2.matmul(&r1, f);
        // apply to stable basis vectors
        let mut out = Mat::zeros(sub_space.dim(), gh.dim(t));
        for col in 0..gh.dim(t) {
            let mut e = vec![0; gh.dim(t)];
            e[col] = 1;
            let hp = gh.stable_vector(t, &e);
            let v = to_sub.apply(&hp, f);
            for (r, &c) in v.iter().enumerate() {
                if c != 0 {
                    out.set(r, col, c);
                }
            }
        }
        out
    }

    /// Finds `x` in `ambient` with `x A x^{-1}` inside `P`, for an
    /// ell-subgroup `A`.
    fn find_conjugator(
        &self,
        ambient: &Arc<FiniteGroup>,
        a: &Arc<FiniteGroup>,
        p: &Arc<FiniteGroup>,
    ) -> u32 {
        let key = (ambient.id, a.id, p.id);
        if let Some(&x) = self.conjugator_cache.lock().unwrap().get(&key) {
            return x;
        }
        let gens: Vec<u32> = a
            .generators()
            .iter()
            .map(|&i| ambient.index_of_code(a.code(i)).unwrap())
            .collect();
        let mut found = None;
        'outer: for x in 0..ambient.order() as u32 {
            let xinv = ambient.inv(x);
            for &s in &gens {
                let moved = ambient.mul(ambient.mul(x, s), xinv);
                if !p.contains_code(ambient.code(moved)) {
                    continue 'outer;
                }
            }
            found = Some(x);
            break;
        }
        let x = found.expect("Sylow conjugacy provides a conjugator");
        self.conjugator_cache.lock().unwrap().insert(key, x);
        x
    }

    /// Restriction `H^t(G) -> H^t(K)` for `K <= G` in a shared universe.
    pub fn res_map(
        &self,
        gh: &Arc<GroupCohomology>,
        kh: &Arc<GroupCohomology>,
        t: usize,
    ) -> Arc<Mat> {
        let key = (gh.group.id, kh.group.id, t);
        if let Some(m) = self.res_cache.lock().unwrap().get(&key) {
            return m.clone();
        }
        let m = Arc::new(self.res_map_uncached(gh, kh, t));
        self.res_cache.lock().unwrap().insert(key, m.clone());
        m
    }

    fn res_map_uncached(
        &self,
        gh: &Arc<GroupCohomology>,
        kh: &Arc<GroupCohomology>,
        t: usize,
    ) -> Mat {
        let f = &self.field;
        match (&gh.backing, &kh.backing) {
            (Backing::Direct { res: rg, spaces: sg }, Backing::Direct { res: rk, spaces: sk }) => {
                let inc = inclusion_indices(&kh.group, &gh.group);
                let up = build_chain_up(rk, rg, &|i| inc[i as usize], t);
                pullback_class_matrix(&up, &sk[t], &sg[t], t, None)
            }
            (Backing::Averaged { .. }, _) => {
                // only degree 0 carries classes
                let mut m = Mat::zeros(kh.dim(t), gh.dim(t));
                if t == 0 && gh.dim(0) == 1 && kh.dim(0) >= 1 {
                    // trivial coefficients: unit to unit
                    let unit_k = kh.unit();
                    for (r, &c) in unit_k.iter().enumerate() {
                        m.set(r, 0, c);
                    }
                }
                m
            }
            (_, Backing::Averaged { .. }) => {
                let mut m = Mat::zeros(kh.dim(t), gh.dim(t));
                if t == 0 && kh.dim(0) == 1 && gh.dim(0) == 1 {
                    m.set(0, 0, 1);
                }
                m
            }
            (Backing::Stable(sd), _) => {
                // route through the Sylow subgroup of K
                let (pk, pk_handle_needed) = match &kh.backing {
                    Backing::Stable(ksd) => (ksd.sylow.clone(), false),
                    _ => (kh.group.sylow(f.ell()), true),
                };
                let _ = pk_handle_needed;
                let x = self.find_conjugator(&gh.group, &pk, &sd.sylow);
                // A' = x P_K x^{-1} inside P
                let xinv = gh.group.inv(x);
                let a_codes: Vec<u64> = pk
                    .codes()
                    .iter()
                    .map(|&c| {
                        let ci = gh.group.index_of_code(c).unwrap();
                        gh.group.code(gh.group.mul(gh.group.mul(x, ci), xinv))
                    })
                    .collect();
                let a = sd.sylow.subgroup_from_codes("conj-sylow".into(), a_codes);
                let mod_a = GModule::restrict_to_subgroup(&gh.module, &a);
                let res_a = ResRegistry::global().atomic(&a, f, self.t_max + 1);
                let sp_a = CohomologySpace::compute(&res_a, &mod_a, t);
                // res^P_{A'}
                let inc = inclusion_indices(&a, &sd.sylow);
                let up = build_chain_up(&res_a, &sd.res, &|i| inc[i as usize], t);
                let r1 = pullback_class_matrix(&up, &sp_a, &sd.spaces[t], t, None);
                // conj transport H(A') -> H(P_K): pullback along
                // P_K -> A', c |-> x c x^{-1}, twist rho(x^{-1})
                let mod_pk = GModule::restrict_to_subgroup(&gh.module, &pk);
                let res_pk = ResRegistry::global().atomic(&pk, f, self.t_max + 1);
                let sp_pk = CohomologySpace::compute(&res_pk, &mod_pk, t);
                let phi: Vec<u32> = pk
                    .codes()
                    .iter()
                    .map(|&c| {
                        let ci = gh.group.index_of_code(c).unwrap();
                        a.index_of_code(gh.group.code(gh.group.mul(gh.group.mul(x, ci), xinv)))
                            .unwrap()
                    })
                    .collect();
                let upc = build_chain_up(&res_pk, &res_a, &|i| phi[i as usize], t);
                let twist = if gh.module.is_trivial_action() {
                    None
                } else {
                    Some(gh.module.act_mat(xinv))
                };
                let r2 = pullback_class_matrix(&upc, &sp_pk, &sp_a, t, twist.as_ref());
                // stable vectors of G -> H^t(P_K) class coords
                let to_pk = r2.matmul(&r1, f);
                let mut out = Mat::zeros(kh.dim(t), gh.dim(t));
                for col in 0..gh.dim(t) {
                    let mut e = vec![0; gh.dim(t)];
                    e[col] = 1;
                    let hp_vec = gh.stable_vector(t, &e);
                    let s_k = to_pk.apply(&hp_vec, f);
                    let coords = match &kh.backing {
                        Backing::Stable(ksd) => ksd.per_t[t]
                            .solver
                            .solve(&s_k)
                            .expect("restriction lands in stable subspace"),
                        Backing::Direct { res: rk, spaces: sk } => {
                            // solve through the injective res^K_{P_K}
                            let inc2 = inclusion_indices(&pk, &kh.group);
                            let up2 = build_chain_up(&res_pk, rk, &|i| inc2[i as usize], t);
                            let rk_m =
                                pullback_class_matrix(&up2, &sp_pk, &sk[t], t, None);
                            Solver::new(&rk_m, f)
                                .solve(&s_k)
                                .expect("restriction to Sylow is injective on H(K)")
                        }
                        Backing::Averaged { .. } => unreachable!(),
                    };
                    for (r, &c) in coords.iter().enumerate() {
                        if c != 0 {
                            out.set(r, col, c);
                        }
                    }
                }
                out
            }
            (Backing::Direct { .. }, Backing::Stable(_)) => {
                unreachable!("subgroup of a direct-size group is direct")
            }
        }
    }

    /// Corestriction `H^t(K) -> H^t(G)` for `K <= G` in a shared universe.
    pub fn cor_map(
        &self,
        gh: &Arc<GroupCohomology>,
        kh: &Arc<GroupCohomology>,
        t: usize,
    ) -> Arc<Mat> {
        let key = (gh.group.id, kh.group.id, t);
        if let Some(m) = self.cor_cache.lock().unwrap().get(&key) {
            return m.clone();
        }
        let m = Arc::new(self.cor_map_uncached(gh, kh, t));
        self.cor_cache.lock().unwrap().insert(key, m.clone());
        m
    }

    fn cor_map_uncached(
        &self,
        gh: &Arc<GroupCohomology>,
        kh: &Arc<GroupCohomology>,
        t: usize,
    ) -> Mat {
        let f = &self.field;
        let ell = f.ell();
        match (&gh.backing, &kh.backing) {
            (Backing::Direct { res: rg, spaces: sg }, Backing::Direct { res: rk, spaces: sk }) => {
                let down = build_chain_down(rg, rk, t);
                transfer_class_matrix(&down, &sg[t], &sk[t], t)
            }
            (Backing::Averaged { .. }, _) => {
                let mut m = Mat::zeros(gh.dim(t), kh.dim(t));
                if t == 0 && gh.dim(0) == 1 && kh.dim(0) == 1 {
                    let index = (gh.group.order() / kh.group.order()) as u64;
                    m.set(0, 0, f.reduce(index));
                }
                m
            }
            (Backing::Stable(sd), _) => {
                // Mackey: res^G_P cor^G_K as a sum over P\G/K double cosets
                let cosets = gh.group.double_cosets(&sd.sylow, &kh.group);
                let dim_hp = sd.spaces[t].dim();
                let mut total = Mat::zeros(dim_hp, kh.dim(t));
                for &(g, _) in &cosets {
                    let term = self.mackey_term_groups(&gh.group, &sd.sylow, &kh.group, g);
                    if t >= 1 && term.q.order() as u64 % ell != 0 {
                        continue;
                    }
                    // res^K_{K_g} on K's backing, expressed in sp_kg coords
                    let mod_kg = GModule::restrict_to_subgroup(&gh.module, &term.kg);
                    let res_kg = ResRegistry::global().atomic(&term.kg, f, self.t_max + 1);
                    let sp_kg = CohomologySpace::compute(&res_kg, &mod_kg, t);
                    let res_m: Mat = match &kh.backing {
                        Backing::Direct { res: rk, spaces: sk } => {
                            let inc = inclusion_indices(&term.kg, &kh.group);
                            let up = build_chain_up(&res_kg, rk, &|i| inc[i as usize], t);
                            pullback_class_matrix(&up, &sp_kg, &sk[t], t, None)
                        }
                        Backing::Stable(_) => {
                            self.res_stable_to_small(kh, &term.kg, &res_kg, &sp_kg, t)
                        }
                        Backing::Averaged { fixed } => {
                            // only degree 0 carries classes; a fixed vector
                            // restricts to itself as an H^0 functional
                            let mut m = Mat::zeros(sp_kg.dim(), kh.dim(t));
                            if t == 0 {
                                for col in 0..fixed.rows {
                                    let coords = sp_kg
                                        .class_of(fixed.row(col))
                                        .expect("fixed vector is a 0-cocycle");
                                    for (r, &c) in coords.iter().enumerate() {
                                        if c != 0 {
                                            m.set(r, col, c);
                                        }
                                    }
                                }
                            }
                            m
                        }
                    };
                    // conj + cor into P
                    let mod_q = GModule::restrict_to_subgroup(&gh.module, &term.q);
                    let res_q = ResRegistry::global().atomic(&term.q, f, self.t_max + 1);
                    let sp_q = CohomologySpace::compute(&res_q, &mod_q, t);
                    let ginv = gh.group.inv(term.g);
                    let phi: Vec<u32> = term
                        .q
                        .codes()
                        .iter()
                        .map(|&qc| {
                            let qi = gh.group.index_of_code(qc).unwrap();
                            let moved = gh.group.mul(gh.group.mul(ginv, qi), term.g);
                            term.kg.index_of_code(gh.group.code(moved)).unwrap()
                        })
                        .collect();
                    let upc = build_chain_up(&res_q, &res_kg, &|i| phi[i as usize], t);
                    let twist = if gh.module.is_trivial_action() {
                        None
                    } else {
                        Some(gh.module.act_mat(term.g))
                    };
                    let conj_m = pullback_class_matrix(&upc, &sp_q, &sp_kg, t, twist.as_ref());
                    let down = build_chain_down(&sd.res, &res_q, t);
                    let cor_m = transfer_class_matrix(&down, &sd.spaces[t], &sp_q, t);
                    let term_m = cor_m.matmul(&conj_m.matmul(&res_m, f), f);
                    total = total.add_mat(&term_m, f);
                }
                // express in the stable basis
                let mut out = Mat::zeros(gh.dim(t), kh.dim(t));
                for col in 0..kh.dim(t) {
                    let v: Vec<Fp> = (0..dim_hp).map(|r| total.get(r, col)).collect();
                    let coords = sd.per_t[t]
                        .solver
                        .solve(&v)
                        .expect("corestriction lands in the stable subspace");
                    for (r, &c) in coords.iter().enumerate() {
                        if c != 0 {
                            out.set(r, col, c);
                        }
                    }
                }
                out
            }
            (Backing::Direct { res: rg, spaces: sg }, Backing::Averaged { fixed }) => {
                // only degree 0 carries classes: transfer a fixed vector by
                // summing its translates over coset representatives
                let mut out = Mat::zeros(gh.dim(t), kh.dim(t));
                if t == 0 {
                    let reps = gh.group.left_coset_reps(&kh.group);
                    let _ = rg;
                    for col in 0..fixed.rows {
                        let mut acc = vec![0 as Fp; gh.module.dim];
                        for &c in &reps {
                            let moved = gh.module.act_vec(c, fixed.row(col));
                            for (a, &v) in acc.iter_mut().zip(moved.iter()) {
                                *a = f.add(*a, v);
                            }
                        }
                        let coords = sg[0]
                            .class_of(&acc)
                            .expect("transferred fixed vector is invariant");
                        for (r, &v) in coords.iter().enumerate() {
                            if v != 0 {
                                out.set(r, col, v);
                            }
                        }
                    }
                }
                out
            }
            (Backing::Direct { .. }, _) => {
                unreachable!("corestriction into a direct group from a stable subgroup")
            }
        }
    }

    /// Inflation `H^t(Q) -> H^t(G)` along a surjection `pi: G -> Q` given
    /// on element indices.
    pub fn infl_map(
        &self,
        gh: &Arc<GroupCohomology>,
        qh: &Arc<GroupCohomology>,
        pi: &[u32],
        t: usize,
    ) -> Mat {
        self.pullback_general(gh, qh, pi, t)
    }

    /// The pullback `H^t(Q) -> H^t(G)` along any homomorphism
    /// `phi: G -> Q` given on element indices, for trivial coefficients in
    /// the non-direct cases. Probing from the ell-((sub))group side: the
    /// image of an ell-subgroup of `G` is an ell-subgroup of `Q`, so a
    /// class on `Q` restricts through a conjugate inside the Sylow
    /// subgroup of `Q`, and the result is recovered on `G` through its own
    /// Sylow restriction (injective on classes).
    pub fn pullback_general(
        &self,
        gh: &Arc<GroupCohomology>,
        qh: &Arc<GroupCohomology>,
        phi: &[u32],
        t: usize,
    ) -> Mat {
        let f = &self.field;
        if let Backing::Averaged { .. } = &gh.backing {
            let mut m = Mat::zeros(gh.dim(t), qh.dim(t));
            if t == 0 && gh.dim(0) == 1 && qh.dim(0) == 1 {
                m.set(0, 0, 1);
            }
            return m;
        }
        // probe ell-group on the G side with its resolution and space:
        // the group itself when direct, the Sylow subgroup when stable
        let (_probe, probe_res, probe_space, probe_incl): (
            Arc<FiniteGroup>,
            Arc<Res>,
            Arc<CohomologySpace>,
            Vec<u32>,
        ) = match &gh.backing {
            Backing::Direct { res, spaces } => (
                gh.group.clone(),
                res.clone(),
                spaces[t].clone(),
                (0..gh.group.order() as u32).collect(),
            ),
            Backing::Stable(sd) => (
                sd.sylow.clone(),
                sd.res.clone(),
                sd.spaces[t].clone(),
                inclusion_indices(&sd.sylow, &gh.group),
            ),
            Backing::Averaged { .. } => unreachable!(),
        };
        // phi restricted to the probe
        let probe_phi: Vec<u32> = probe_incl.iter().map(|&i| phi[i as usize]).collect();
        // matrix H^t(Q) -> H^t(probe)
        let to_probe: Mat = match &qh.backing {
            Backing::Direct { res: rq, spaces: sq } => {
                let up = build_chain_up(&probe_res, rq, &|i| probe_phi[i as usize], t);
                pullback_class_matrix(&up, &probe_space, &sq[t], t, None)
            }
            Backing::Averaged { .. } => {
                let mut m = Mat::zeros(probe_space.dim(), qh.dim(t));
                if t == 0 && qh.dim(0) == 1 {
                    let coords = probe_space
                        .class_of(&[1])
                        .expect("unit functional is a cocycle");
                    for (r, &c) in coords.iter().enumerate() {
                        m.set(r, 0, c);
                    }
                }
                m
            }
            Backing::Stable(qsd) => {
                assert!(
                    qh.module.is_trivial_action(),
                    "general pullback from a stable source needs trivial coefficients"
                );
                // image of the probe is an ell-subgroup of Q; conjugate it
                // into Q's Sylow subgroup
                let img_codes: Vec<u64> = {
                    let mut set: Vec<u64> = probe_phi
                        .iter()
                        .map(|&i| qh.group.code(i))
                        .collect();
                    set.sort_unstable();
                    set.dedup();
                    set
                };
                let img = qh.group.subgroup_from_codes("im(phi)".into(), img_codes);
                let u = self.find_conjugator(&qh.group, &img, &qsd.sylow);
                let uinv = qh.group.inv(u);
                // psi: probe -> Q-sylow, s |-> u phi(s) u^{-1}
                let psi: Vec<u32> = probe_phi
                    .iter()
                    .map(|&i| {
                        let moved = qh.group.mul(qh.group.mul(u, i), uinv);
                        qsd.sylow
                            .index_of_code(qh.group.code(moved))
                            .expect("conjugated image in the Sylow subgroup")
                    })
                    .collect();
                let up = build_chain_up(&probe_res, &qsd.res, &|i| psi[i as usize], t);
                let m0 = pullback_class_matrix(&up, &probe_space, &qsd.spaces[t], t, None);
                // precompose with the stable vectors of Q's classes
                let mut m = Mat::zeros(probe_space.dim(), qh.dim(t));
                for col in 0..qh.dim(t) {
                    let mut e = vec![0; qh.dim(t)];
                    e[col] = 1;
                    let v = qh.stable_vector(t, &e);
                    let w = m0.apply(&v, f);
                    for (r, &c) in w.iter().enumerate() {
                        if c != 0 {
                            m.set(r, col, c);
                        }
                    }
                }
                m
            }
        };
        // recover classes on G from the probe values
        match &gh.backing {
            Backing::Direct { .. } => to_probe,
            Backing::Stable(sd) => {
                let mut out = Mat::zeros(gh.dim(t), qh.dim(t));
                for col in 0..qh.dim(t) {
                    let v: Vec<Fp> = (0..to_probe.rows).map(|r| to_probe.get(r, col)).collect();
                    let coords = sd.per_t[t]
                        .solver
                        .solve(&v)
                        .expect("pullback lands in the stable subspace");
                    for (r, &c) in coords.iter().enumerate() {
                        if c != 0 {
                            out.set(r, col, c);
                        }
                    }
                }
                out
            }
            Backing::Averaged { .. } => unreachable!(),
        }
    }
}

struct MackeyTerm {
    g: u32,
    q: Arc<FiniteGroup>,
    kg: Arc<FiniteGroup>,
}


/// Basis of the fixed points `V^G`, via the generators' fixed spaces.
fn fixed_point_basis(group: &Arc<FiniteGroup>, module: &GModule, f: &PrimeField) -> Mat {
    let dv = module.dim;
    if module.is_trivial_action() || group.generators().is_empty() {
        return Mat::identity(dv);
    }
    let mut rows = Vec::new();
    for &g in group.generators() {
        let m = module.act_mat(g);
        let diff = m.sub_mat(&Mat::identity(dv), f);
        for i in 0..diff.rows {
            rows.push(diff.row(i).to_vec());
        }
    }
    Mat::from_rows(rows, dv).nullspace(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_matches_direct_on_gl3_f2() {
        // GL_3(F_2) has order 168 <= bound: compute directly, then force the
        // stable machinery to reproduce the same dimensions
        let g = FiniteGroup::gl(3, 2).unwrap();
        let direct = {
            let ctx = CohCtx::new(3, 3, 10_000_000).unwrap();
            ctx.handle(&g).dims()
        };
        let stable = {
            let mut ctx = CohCtx::new(3, 3, 10_000_000).unwrap();
            // shrink the bound by forcing stable: emulate by building from a
            // fresh context where the group is treated as large
            ctx.force_direct = false;
            let h = build_forced_stable(&ctx, &g);
            h.dims()
        };
        assert_eq!(direct, stable, "stable elements reproduce H^*(GL_3(F_2); F_3)");
        assert_eq!(direct, vec![1, 0, 0, 1]);
    }

    /// Test helper: force the Sylow-reduced path regardless of order.
    fn build_forced_stable(ctx: &CohCtx, group: &Arc<FiniteGroup>) -> Arc<GroupCohomology> {
        // reproduce CohCtx::build's stable branch by temporarily treating
        // the group as large: order > bound is the only gate, so just call
        // the internal pieces through a shim context with a tiny bound.
        // Simplest: call build on a context whose field sees the group as
        // big. The bound is a constant, so instead construct via the same
        // code path: make a wrapper group? The clean route: a dedicated
        // builder.
        Arc::new(ctx.build_stable_for_tests(group))
    }

    #[test]
    fn stable_matches_direct_on_s4_mod2() {
        let g = FiniteGroup::symmetric(4);
        let ctx = CohCtx::new(2, 3, 10_000_000).unwrap();
        let direct = ctx.handle(&g).dims();
        let stable = Arc::new(ctx.build_stable_for_tests(&g)).dims();
        assert_eq!(direct, stable);
    }

    #[test]
    fn stable_matches_direct_on_gl2_f3_mod2() {
        let g = FiniteGroup::gl(2, 3).unwrap();
        let ctx = CohCtx::new(2, 3, 10_000_000).unwrap();
        let direct = ctx.handle(&g).dims();
        let stable = Arc::new(ctx.build_stable_for_tests(&g)).dims();
        assert_eq!(direct, stable);
    }

    #[test]
    fn averaged_backing_for_coprime_order() {
        let g = FiniteGroup::gl(3, 2).unwrap(); // order 168, coprime to 5
        let ctx = CohCtx::new(5, 3, 10_000_000).unwrap();
        let h = ctx.handle(&g);
        assert_eq!(h.dims(), vec![1, 0, 0, 0]);
        assert!(matches!(h.backing, Backing::Averaged { .. }));
    }

    #[test]
    fn res_and_cor_between_direct_groups_compose_to_index() {
        let f = PrimeField::new(2).unwrap();
        let _ = f;
        let s5 = FiniteGroup::symmetric(5);
        let s4codes: Vec<u64> = s5
            .codes()
            .iter()
            .copied()
            .filter(|&c| ((c >> 16) & 0xf) == 4)
            .collect();
        let s4 = s5.subgroup_from_codes("S4".into(), s4codes);
        let ctx = CohCtx::new(2, 2, 10_000_000).unwrap();
        let hg = ctx.handle(&s5);
        let hk = ctx.handle(&s4);
        for t in 0..=2usize {
            let r = ctx.res_map(&hg, &hk, t);
            let c = ctx.cor_map(&hg, &hk, t);
            let comp = c.matmul(&r, &ctx.field);
            // [S5:S4] = 5 = 1 mod 2
            assert_eq!(comp, Mat::identity(hg.dim(t)), "t={t}");
        }
    }

    #[test]
    fn stable_restriction_to_direct_subgroup() {
        // GL_3(F_3) mod 2 is stable-backed; restrict to GL_2(F_3) x 1
        let g3 = FiniteGroup::gl(3, 3).unwrap();
        let p21 = FiniteGroup::parabolic(3, &[2, 1], &[false, true], &[]).unwrap();
        let ctx = CohCtx::new(2, 2, 10_000_000).unwrap();
        let hg = ctx.handle(&g3);
        let hk = ctx.handle(&p21);
        assert!(matches!(hg.backing, Backing::Stable(_)));
        for t in 0..=2usize {
            let r = ctx.res_map(&hg, &hk, t);
            assert_eq!(r.cols, hg.dim(t));
            assert_eq!(r.rows, hk.dim(t));
        }
        // unit restricts to unit
        let r0 = ctx.res_map(&hg, &hk, 0);
        assert_eq!(r0.apply(&hg.unit(), &ctx.field), hk.unit());
    }

    #[test]
    fn stable_cor_res_composite_is_index_on_classes() {
        // cor^G_P res^G_P = [G:P] id on H^t(G) for the Sylow subgroup
        let g = FiniteGroup::gl(3, 3).unwrap(); // 11232 = 2^5 * 351
        let ctx = CohCtx::new(2, 2, 10_000_000).unwrap();
        let hg = ctx.handle(&g);
        let sylow = match &hg.backing {
            Backing::Stable(sd) => sd.sylow.clone(),
            _ => unreachable!(),
        };
        let hp = ctx.handle(&sylow);
        let f = &ctx.field;
        let index = f.reduce((g.order() / sylow.order()) as u64);
        for t in 0..=2usize {
            let r = ctx.res_map(&hg, &hp, t);
            let c = ctx.cor_map(&hg, &hp, t);
            let comp = c.matmul(&r, f);
            assert_eq!(comp, Mat::identity(hg.dim(t)).scale(index, f), "t={t}");
        }
    }
}
