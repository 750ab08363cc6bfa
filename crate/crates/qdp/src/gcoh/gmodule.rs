//! Coefficient modules for group cohomology.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::field::{Fp, PrimeField};
use crate::linalg::{Mat, Solver};

use super::group::{FiniteGroup, GroupHom};

#[derive(Debug)]
enum GAction {
    Trivial,
    /// one matrix per group element index
    Dense(Vec<Mat>),
    /// permutation action: images of basis indices, per group element
    Perm(Vec<Vec<u16>>),
    /// submodule of a parent module, spanned by the rows of `basis`
    Sub {
        parent: Arc<GModule>,
        basis: Mat,
        solver: Solver,
        cache: Mutex<HashMap<u32, Mat>>,
    },
    /// pullback along a group homomorphism
    Via {
        parent: Arc<GModule>,
        hom: Vec<u32>,
    },
}

/// A finite-dimensional module over a finite group, with exact action.
#[derive(Debug)]
pub struct GModule {
    pub group: Arc<FiniteGroup>,
    pub dim: usize,
    field: PrimeField,
    action: GAction,
}

impl GModule {
    pub fn trivial(group: &Arc<FiniteGroup>, field: &PrimeField) -> Arc<GModule> {
        Arc::new(GModule {
            group: group.clone(),
            dim: 1,
            field: *field,
            action: GAction::Trivial,
        })
    }

    pub fn is_trivial_action(&self) -> bool {
        matches!(self.action, GAction::Trivial)
    }

    pub fn from_matrices(
        group: &Arc<FiniteGroup>,
        field: &PrimeField,
        mats: Vec<Mat>,
    ) -> Arc<GModule> {
        assert_eq!(mats.len(), group.order());
        let dim = mats[0].rows;
        Arc::new(GModule {
            group: group.clone(),
            dim,
            field: *field,
            action: GAction::Dense(mats),
        })
    }

    /// Permutation module: `perms[g][i]` is the image of basis vector `i`.
    pub fn from_permutations(
        group: &Arc<FiniteGroup>,
        field: &PrimeField,
        perms: Vec<Vec<u16>>,
    ) -> Arc<GModule> {
        assert_eq!(perms.len(), group.order());
        let dim = perms[0].len();
        Arc::new(GModule {
            group: group.clone(),
            dim,
            field: *field,
            action: GAction::Perm(perms),
        })
    }

    /// The submodule spanned by the rows of `basis` (must be G-stable;
    /// stability is the caller's obligation and is checked lazily when
    /// action matrices are formed).
    pub fn submodule(parent: &Arc<GModule>, basis: Mat) -> Arc<GModule> {
        let solver = Solver::new(&basis.transpose(), &parent.field);
        Arc::new(GModule {
            group: parent.group.clone(),
            dim: basis.rows,
            field: parent.field,
            action: GAction::Sub {
                parent: parent.clone(),
                basis,
                solver,
                cache: Mutex::new(HashMap::new()),
            },
        })
    }

    /// Pullback along a homomorphism into this module's group.
    pub fn restrict_along(module: &Arc<GModule>, hom: &GroupHom) -> Arc<GModule> {
        assert_eq!(hom.dst.id, module.group.id);
        if module.is_trivial_action() {
            return GModule::trivial(&hom.src, &module.field);
        }
        let images = (0..hom.src.order() as u32).map(|i| hom.apply(i)).collect();
        Arc::new(GModule {
            group: hom.src.clone(),
            dim: module.dim,
            field: module.field,
            action: GAction::Via {
                parent: module.clone(),
                hom: images,
            },
        })
    }

    /// Restriction to a subgroup sharing the ambient universe.
    pub fn restrict_to_subgroup(
        module: &Arc<GModule>,
        sub: &Arc<FiniteGroup>,
    ) -> Arc<GModule> {
        if module.is_trivial_action() {
            return GModule::trivial(sub, &module.field);
        }
        let images: Vec<u32> = sub
            .codes()
            .iter()
            .map(|&c| module.group.index_of_code(c).expect("subgroup"))
            .collect();
        Arc::new(GModule {
            group: sub.clone(),
            dim: module.dim,
            field: module.field,
            action: GAction::Via {
                parent: module.clone(),
                hom: images,
            },
        })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    /// Action of `g` on a column vector.
    pub fn act_vec(&self, g: u32, v: &[Fp]) -> Vec<Fp> {
        match &self.action {
            GAction::Trivial => v.to_vec(),
            GAction::Dense(mats) => mats[g as usize].apply(v, &self.field),
            GAction::Perm(perms) => {
                let p = &perms[g as usize];
                let mut out = vec![0; v.len()];
                for (i, &x) in v.iter().enumerate() {
                    if x != 0 {
                        out[p[i] as usize] = x;
                    }
                }
                out
            }
            GAction::Sub { .. } => self.act_mat(g).apply(v, &self.field),
            GAction::Via { parent, hom } => parent.act_vec(hom[g as usize], v),
        }
    }

    /// Action matrix of `g` (columns = images of basis vectors).
    pub fn act_mat(&self, g: u32) -> Mat {
        match &self.action {
            GAction::Trivial => Mat::identity(self.dim),
            GAction::Dense(mats) => mats[g as usize].clone(),
            GAction::Perm(perms) => {
                let p = &perms[g as usize];
                let mut m = Mat::zeros(self.dim, self.dim);
                for (i, &pi) in p.iter().enumerate() {
                    m.set(pi as usize, i, 1);
                }
                m
            }
            GAction::Sub {
                parent,
                basis,
                solver,
                cache,
            } => {
                if let Some(m) = cache.lock().unwrap().get(&g) {
                    return m.clone();
                }
                // solve basis^T X = parent_act(g) basis^T columnwise
                let mut m = Mat::zeros(self.dim, self.dim);
                for i in 0..self.dim {
                    let moved = parent.act_vec(g, basis.row(i));
                    let coords = solver
                        .solve(&moved)
                        .expect("submodule must be G-stable");
                    for (r, &c) in coords.iter().enumerate() {
                        if c != 0 {
                            m.set(r, i, c);
                        }
                    }
                }
                cache.lock().unwrap().insert(g, m.clone());
                m
            }
            GAction::Via { parent, hom } => parent.act_mat(hom[g as usize]),
        }
    }

    /// Checks multiplicativity of the action on generator pairs.
    pub fn check_action(&self) -> bool {
        let gens = self.group.generators().to_vec();
        for &a in &gens {
            for &b in &gens {
                let ab = self.group.mul(a, b);
                let lhs = self.act_mat(ab);
                let rhs = self.act_mat(a).matmul(&self.act_mat(b), &self.field);
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }
}
