//! Induced maps on cohomology at the class level: pullbacks along group
//! homomorphisms (restriction, inflation, conjugation), corestriction
//! (transfer) along finite-index inclusions, and cross products into
//! tensor resolutions.
//!
//! Every map is realized by lifting a chain map between resolutions and
//! expressing the resulting cocycle in the target's chosen basis. Lifts
//! into atomic resolutions solve against the precomputed boundary
//! factorizations; lifts into tensor resolutions use the contracting
//! homotopy.

use std::sync::Arc;

use crate::field::Fp;
use crate::linalg::Mat;

use super::cohomology::{evaluate_functional, CohomologySpace};
use super::group::FiniteGroup;
use super::resolution::Res;

/// A chain map `M^src -> M^dst` over a homomorphism `phi: src -> dst`,
/// covering the identity of the trivial module. Stored per degree as a
/// dense matrix applied to source chain vectors.
pub struct ChainUp {
    pub maps: Vec<Mat>,
}

/// Builds the chain map along `phi` (given on source element indices).
/// The source resolution must be atomic.
pub fn build_chain_up(
    res_src: &Res,
    res_dst: &Res,
    phi: &dyn Fn(u32) -> u32,
    depth: usize,
) -> ChainUp {
    let f = res_src.field();
    let src_group = res_src.group().clone();
    let n_src = src_group.order();
    let _ = n_src;
    let mut maps: Vec<Mat> = Vec::new();
    for t in 0..=depth {
        let src_dim = res_src.dim_f(t);
        let dst_dim = res_dst.dim_f(t);
        let mut m = Mat::zeros(dst_dim, src_dim);
        let gen_flats = res_src.generator_flats(t);
        for (k, &gf) in gen_flats.iter().enumerate() {
            // image of the k-th generator
            let y: Vec<Fp> = if t == 0 {
                let mut e = vec![0; dst_dim];
                e[res_dst.eta_flat()] = 1;
                e
            } else {
                let mut e = vec![0; src_dim];
                e[gf] = 1;
                let de = res_src.boundary_apply(t, &e);
                let rhs = maps[t - 1].apply(&de, &f);
                res_dst
                    .solve_boundary(t, &rhs)
                    .expect("chain map lift exists by exactness")
            };
            // translate over the source group: column (k, h) = phi(h) . y
            for h in 0..n_src as u32 {
                let col = res_src.flat_compose(t, k, h);
                let moved = res_dst.act(t, phi(h), &y);
                for (row, &v) in moved.iter().enumerate() {
                    if v != 0 {
                        m.set(row, col, v);
                    }
                }
            }
        }
        maps.push(m);
    }
    ChainUp { maps }
}

/// The class-level pullback along `phi: src_group -> dst_group`:
/// a matrix `H^t(dst) -> H^t(src)` in the chosen bases. `twist` is an
/// optional coefficient map applied to evaluated values (conjugation uses
/// the action of the conjugating element; restriction and inflation pass
/// identity coefficients via module compatibility).
pub fn pullback_class_matrix(
    chain: &ChainUp,
    src_space: &CohomologySpace,
    dst_space: &CohomologySpace,
    t: usize,
    twist: Option<&Mat>,
) -> Mat {
    let f = src_space.res.field();
    let dv = src_space.module.dim;
    let src_group = src_space.res.group();
    let n_src = src_group.order();
    let mut out = Mat::zeros(src_space.dim(), dst_space.dim());
    let gen_flats = src_space.res.generator_flats(t);
    for b in 0..dst_space.dim() {
        let x = dst_space.rep(b);
        // source functional: values on source generators
        let mut func = vec![0 as Fp; src_space.res.gen_count(t) * dv];
        for (k, &gf) in gen_flats.iter().enumerate() {
            let col = (gf / n_src) * n_src + (gf % n_src); // gf itself
            let _ = col;
            let mut e = vec![0 as Fp; src_space.res.dim_f(t)];
            e[gf] = 1;
            let img = chain.maps[t].apply(&e, &f);
            let mut val = evaluate_functional(&dst_space.res, &dst_space.module, x, t, &img);
            if let Some(w) = twist {
                val = w.apply(&val, &f);
            }
            func[k * dv..(k + 1) * dv].copy_from_slice(&val);
        }
        let coords = src_space
            .class_of(&func)
            .expect("pullback of a cocycle is a cocycle");
        for (r, &c) in coords.iter().enumerate() {
            if c != 0 {
                out.set(r, b, c);
            }
        }
    }
    out
}

/// A chain map `M^sup|_sub -> M^sub` of sub-group modules covering the
/// identity, used by the transfer.
pub struct ChainDown {
    pub maps: Vec<Mat>,
}

/// Builds the transfer chain map for an inclusion `sub <= sup` (same
/// universe). The `sup` resolution may be any kind; lifting solves in the
/// `sub` resolution.
pub fn build_chain_down(
    res_sup: &Res,
    res_sub: &Res,
    depth: usize,
) -> ChainDown {
    let f = res_sup.field();
    let sup = res_sup.group().clone();
    let sub = res_sub.group().clone();
    let n_sup = sup.order();
    // decompose each sup element as h * d with d a right-coset rep
    let reps = sup.right_coset_reps(&sub);
    let mut rep_of = vec![(0u32, 0u32); n_sup]; // (sub element index, rep ordinal)
    for (ri, &d) in reps.iter().enumerate() {
        for hs in 0..sub.order() as u32 {
            let h_sup = sup
                .index_of_code(sub.code(hs))
                .expect("subgroup in universe");
            let g = sup.mul(h_sup, d);
            rep_of[g as usize] = (hs, ri as u32);
        }
    }
    let mut maps: Vec<Mat> = Vec::new();
    for t in 0..=depth {
        let sup_dim = res_sup.dim_f(t);
        let sub_dim = res_sub.dim_f(t);
        let mut m = Mat::zeros(sub_dim, sup_dim);
        // per sup generator and coset rep: the lifted image
        let gen_flats = res_sup.generator_flats(t);
        for &gf in gen_flats.iter() {
            let (k, _) = res_sup.flat_decompose(t, gf);
            for (ri, &d) in reps.iter().enumerate() {
                // base column: image of (k-th gen) * d
                let mut e = vec![0 as Fp; sup_dim];
                e[gf] = 1;
                let ed = res_sup.act(t, d, &e);
                let y: Vec<Fp> = if t == 0 {
                    let mut out = vec![0; sub_dim];
                    out[res_sub.eta_flat()] = 1;
                    out
                } else {
                    let de = res_sup.boundary_apply(t, &ed);
                    let rhs = maps[t - 1].apply(&de, &f);
                    res_sub
                        .solve_boundary(t, &rhs)
                        .expect("transfer lift exists by exactness")
                };
                // all columns h * (gen_k * d): translate by h in sub
                for hs in 0..sub.order() as u32 {
                    let h_sup = sup.index_of_code(sub.code(hs)).unwrap();
                    let g = sup.mul(h_sup, d);
                    let (hcheck, rcheck) = rep_of[g as usize];
                    debug_assert_eq!((hcheck, rcheck as usize), (hs, ri));
                    let col = res_sup.flat_compose(t, k, g);
                    let moved = res_sub.act(t, hs, &y);
                    for (row, &v) in moved.iter().enumerate() {
                        if v != 0 {
                            m.set(row, col, v);
                        }
                    }
                }
            }
        }
        maps.push(m);
    }
    ChainDown { maps }
}

/// The class-level corestriction `H^t(sub, V) -> H^t(sup, V)` for an
/// inclusion of groups sharing a universe; `V` is a module over `sup`
/// restricted to `sub` on the source side.
pub fn transfer_class_matrix(
    chain: &ChainDown,
    sup_space: &CohomologySpace,
    sub_space: &CohomologySpace,
    t: usize,
) -> Mat {
    let f = sup_space.res.field();
    let dv = sup_space.module.dim;
    let sup = sup_space.res.group().clone();
    let sub = sub_space.res.group().clone();
    let n_sup = sup.order();
    let left_reps = sup.left_coset_reps(&sub);
    let mut out = Mat::zeros(sup_space.dim(), sub_space.dim());
    let gen_flats = sup_space.res.generator_flats(t);
    for b in 0..sub_space.dim() {
        let y = sub_space.rep(b);
        let mut func = vec![0 as Fp; sup_space.res.gen_count(t) * dv];
        for (k, &gf) in gen_flats.iter().enumerate() {
            let mut acc = vec![0 as Fp; dv];
            for &c in &left_reps {
                let cinv = sup.inv(c);
                let mut e = vec![0 as Fp; sup_space.res.dim_f(t)];
                e[gf] = 1;
                let moved = sup_space.res.act(t, cinv, &e);
                let down = chain.maps[t].apply(&moved, &f);
                let val =
                    evaluate_functional(&sub_space.res, &sub_space.module, y, t, &down);
                // rho_V(c) applied in the sup module
                let lifted = sup_space.module.act_vec(c, &val);
                for (a, &v) in acc.iter_mut().zip(lifted.iter()) {
                    *a = f.add(*a, v);
                }
            }
            func[k * dv..(k + 1) * dv].copy_from_slice(&acc);
        }
        let coords = sup_space
            .class_of(&func)
            .expect("transfer of a cocycle is a cocycle");
        for (r, &c) in coords.iter().enumerate() {
            if c != 0 {
                out.set(r, b, c);
            }
        }
    }
    let _ = n_sup;
    out
}

/// Cross product of two trivial-coefficient cocycles into the tensor
/// resolution: `x` in degree `i` on the left factor, `y` in degree `j` on
/// the right, giving a functional in degree `i + j`.
pub fn cross_cocycle(
    tensor: &Res,
    x_func: &[Fp],
    i: usize,
    y_func: &[Fp],
    j: usize,
) -> Vec<Fp> {
    let (left, right) = match tensor {
        Res::Tensor(tr) => (&tr.left, &tr.right),
        _ => panic!("cross product targets a tensor resolution"),
    };
    let f = tensor.field();
    let t = i + j;
    let mut out = vec![0 as Fp; tensor.gen_count(t)];
    let mut gen_offset = 0usize;
    for a in 0..=t {
        let b = t - a;
        let gl = left.gen_count(a);
        let gr = right.gen_count(b);
        if a == i {
            for jl in 0..gl {
                for jr in 0..gr {
                    out[gen_offset + jl * gr + jr] = f.mul(x_func[jl], y_func[jr]);
                }
            }
        }
        gen_offset += gl * gr;
    }
    out
}

/// The inclusion map on element indices, as a closure-friendly vector.
pub fn inclusion_indices(sub: &FiniteGroup, sup: &Arc<FiniteGroup>) -> Vec<u32> {
    sub.codes()
        .iter()
        .map(|&c| sup.index_of_code(c).expect("subgroup of the universe"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::gcoh::gmodule::GModule;
    use crate::gcoh::group::FiniteGroup;
    use crate::gcoh::resolution::ResRegistry;

    fn space(
        g: &Arc<FiniteGroup>,
        ell: u64,
        t_max: usize,
    ) -> (Arc<Res>, Vec<CohomologySpace>) {
        let f = PrimeField::new(ell).unwrap();
        let res = ResRegistry::global().atomic(g, &f, t_max + 1);
        let v = GModule::trivial(g, &f);
        let spaces = (0..=t_max)
            .map(|t| CohomologySpace::compute(&res, &v, t))
            .collect();
        (res, spaces)
    }

    #[test]
    fn restriction_to_sylow_is_injective() {
        // S_3 -> Z/3 on H^t mod 3: dims 1,0,0,1 vs 1,1,1,1; restriction is
        // injective in every degree
        let s3 = FiniteGroup::symmetric(3);
        let z3 = s3.sylow(3);
        let (res_g, sp_g) = space(&s3, 3, 3);
        let (res_h, sp_h) = space(&z3, 3, 3);
        let inc = inclusion_indices(&z3, &s3);
        let chain = build_chain_up(&res_h, &res_g, &|i| inc[i as usize], 4);
        for t in 0..=3usize {
            let m = pullback_class_matrix(&chain, &sp_h[t], &sp_g[t], t, None);
            assert_eq!(m.rank(&PrimeField::new(3).unwrap()), sp_g[t].dim(), "t={t}");
        }
    }

    #[test]
    fn cor_res_is_multiplication_by_index() {
        let f = PrimeField::new(3).unwrap();
        let s3 = FiniteGroup::symmetric(3);
        let z3 = s3.sylow(3);
        let (res_g, sp_g) = space(&s3, 3, 3);
        let (res_h, sp_h) = space(&z3, 3, 3);
        let inc = inclusion_indices(&z3, &s3);
        let up = build_chain_up(&res_h, &res_g, &|i| inc[i as usize], 4);
        let down = build_chain_down(&res_g, &res_h, 4);
        for t in 0..=3usize {
            let res_m = pullback_class_matrix(&up, &sp_h[t], &sp_g[t], t, None);
            let cor_m = transfer_class_matrix(&down, &sp_g[t], &sp_h[t], t);
            let comp = cor_m.matmul(&res_m, &f);
            // [S_3 : Z/3] = 2
            let expect = Mat::identity(sp_g[t].dim()).scale(2, &f);
            assert_eq!(comp, expect, "cor res = index at t={t}");
        }
    }

    #[test]
    fn transfer_on_h0_is_index() {
        let f = PrimeField::new(5).unwrap();
        let s4 = FiniteGroup::symmetric(4);
        let s3codes: Vec<u64> = s4
            .codes()
            .iter()
            .copied()
            .filter(|&c| ((c >> 12) & 0xf) == 3)
            .collect();
        let s3 = s4.subgroup_from_codes("S3".into(), s3codes);
        assert_eq!(s3.order(), 6);
        let res_g = ResRegistry::global().atomic(&s4, &f, 2);
        let res_h = ResRegistry::global().atomic(&s3, &f, 2);
        let v_g = GModule::trivial(&s4, &f);
        let v_h = GModule::trivial(&s3, &f);
        let sp_g = CohomologySpace::compute(&res_g, &v_g, 0);
        let sp_h = CohomologySpace::compute(&res_h, &v_h, 0);
        let down = build_chain_down(&res_g, &res_h, 1);
        let cor_m = transfer_class_matrix(&down, &sp_g, &sp_h, 0);
        // index [S4:S3] = 4
        assert_eq!(cor_m.get(0, 0), 4 % 5);
    }

    #[test]
    fn restriction_transitivity() {
        let f = PrimeField::new(2).unwrap();
        let s4 = FiniteGroup::symmetric(4);
        let d8 = s4.sylow(2);
        // Z/2 inside D8: generated by the first order-2 element
        let z2gen = (0..d8.order() as u32)
            .find(|&i| d8.element_order(i) == 2)
            .unwrap();
        let z2 = d8.generated_subgroup("Z2".into(), &[z2gen]);
        let (res4, sp4) = {
            let res = ResRegistry::global().atomic(&s4, &f, 3);
            let v = GModule::trivial(&s4, &f);
            let sp: Vec<_> = (0..=2).map(|t| CohomologySpace::compute(&res, &v, t)).collect();
            (res, sp)
        };
        let (res8, sp8) = {
            let res = ResRegistry::global().atomic(&d8, &f, 3);
            let v = GModule::trivial(&d8, &f);
            let sp: Vec<_> = (0..=2).map(|t| CohomologySpace::compute(&res, &v, t)).collect();
            (res, sp)
        };
        let (res2, sp2) = {
            let res = ResRegistry::global().atomic(&z2, &f, 3);
            let v = GModule::trivial(&z2, &f);
            let sp: Vec<_> = (0..=2).map(|t| CohomologySpace::compute(&res, &v, t)).collect();
            (res, sp)
        };
        let i84 = inclusion_indices(&d8, &s4);
        let i28 = inclusion_indices(&z2, &d8);
        let i24 = inclusion_indices(&z2, &s4);
        let c84 = build_chain_up(&res8, &res4, &|i| i84[i as usize], 3);
        let c28 = build_chain_up(&res2, &res8, &|i| i28[i as usize], 3);
        let c24 = build_chain_up(&res2, &res4, &|i| i24[i as usize], 3);
        for t in 0..=2usize {
            let r84 = pullback_class_matrix(&c84, &sp8[t], &sp4[t], t, None);
            let r28 = pullback_class_matrix(&c28, &sp2[t], &sp8[t], t, None);
            let r24 = pullback_class_matrix(&c24, &sp2[t], &sp4[t], t, None);
            assert_eq!(r28.matmul(&r84, &f), r24, "transitivity at t={t}");
        }
    }

    #[test]
    fn cross_product_units_multiply() {
        // 1 x 1 = 1 in the tensor resolution of S_2 x S_2
        let f = PrimeField::new(2).unwrap();
        let data = crate::gcoh::group::levi_sym(2, 2);
        let left = ResRegistry::global().atomic(&data.left, &f, 3);
        let right = ResRegistry::global().atomic(&data.right, &f, 3);
        let tr = Arc::new(Res::Tensor(crate::gcoh::resolution::TensorRes::new(
            data.levi.clone(),
            left.clone(),
            right.clone(),
            data.split.clone(),
        )));
        let vl = GModule::trivial(&data.left, &f);
        let vy = GModule::trivial(&data.levi, &f);
        let spl = CohomologySpace::compute(&left, &vl, 0);
        let vr = GModule::trivial(&data.right, &f);
        let spr = CohomologySpace::compute(&right, &vr, 0);
        let spy = CohomologySpace::compute(&tr, &vy, 0);
        let z = cross_cocycle(&tr, spl.rep(0), 0, spr.rep(0), 0);
        let coords = spy.class_of(&z).unwrap();
        assert_eq!(coords.len(), 1);
        assert_eq!(coords[0], 1);
    }

    #[test]
    fn cross_product_degrees_add_and_are_nonzero() {
        let f = PrimeField::new(2).unwrap();
        let data = crate::gcoh::group::levi_sym(2, 2);
        let left = ResRegistry::global().atomic(&data.left, &f, 3);
        let right = ResRegistry::global().atomic(&data.right, &f, 3);
        let tr = Arc::new(Res::Tensor(crate::gcoh::resolution::TensorRes::new(
            data.levi.clone(),
            left.clone(),
            right.clone(),
            data.split.clone(),
        )));
        let vl = GModule::trivial(&data.left, &f);
        let vr = GModule::trivial(&data.right, &f);
        let vy = GModule::trivial(&data.levi, &f);
        // H^1(Z/2) x H^1(Z/2) -> H^2(Z/2 x Z/2), Kunneth: nonzero
        let spl = CohomologySpace::compute(&left, &vl, 1);
        let spr = CohomologySpace::compute(&right, &vr, 1);
        let spy2 = CohomologySpace::compute(&tr, &vy, 2);
        assert_eq!(spl.dim(), 1);
        assert_eq!(spr.dim(), 1);
        assert_eq!(spy2.dim(), 3);
        let z = cross_cocycle(&tr, spl.rep(0), 1, spr.rep(0), 1);
        let coords = spy2.class_of(&z).unwrap();
        assert!(coords.iter().any(|&c| c != 0), "Kunneth class nonzero");
    }
}
