//! Reedy functors and the fibering / cofibering decision procedure.
//!
//! A Reedy functor sends direct morphisms to direct morphisms or
//! identities, and inverse ones to inverse ones or identities. For each
//! object α of the source and each inverse morphism σ out of G α (the
//! identity counts), the inverse factorizations of σ through α form a
//! category; G is fibering when every one of these is empty or connected.
//! Cofibering is the dual condition on direct factorizations into G α.
//!
//! Both verdicts come with witnesses: the anchors whose factorization
//! category falls apart into two or more pieces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{
    comma_object_name, comma_over, comma_under, identity_name, identity_functor, pi0,
    validate_category, validate_functor, CommaCategory, FiniteCategory, FunctorData, RawCategory,
    RawComposition, RawFunctor, RawMorphism,
};
use crate::reedy::{matching_category, LabeledCategory, ReedyCategory};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, PartialEq)]
pub struct ReedyFunctor {
    source: ReedyCategory,
    target: ReedyCategory,
    data: FunctorData,
}

pub fn validate_reedy_functor(
    source: &ReedyCategory,
    target: &ReedyCategory,
    data: &FunctorData,
) -> Result<ReedyFunctor> {
    if data.source() != source.base() {
        return Err(Error::ShapeMismatch {
            detail: "functor data does not live on the given source category".into(),
        });
    }
    if data.target() != target.base() {
        return Err(Error::ShapeMismatch {
            detail: "functor data does not land in the given target category".into(),
        });
    }
    for m in source.base().non_identity_morphisms() {
        let img = data.morphism_image(m);
        if source.is_direct(m) && !target.is_direct_or_id(img) {
            return Err(Error::NotReedy {
                morphism: source.base().morphism_id(m).into(),
                subcategory: "direct".into(),
            });
        }
        if source.is_inverse(m) && !target.is_inverse_or_id(img) {
            return Err(Error::NotReedy {
                morphism: source.base().morphism_id(m).into(),
                subcategory: "inverse".into(),
            });
        }
    }
    Ok(ReedyFunctor {
        source: source.clone(),
        target: target.clone(),
        data: data.clone(),
    })
}

impl ReedyFunctor {
    pub fn source(&self) -> &ReedyCategory {
        &self.source
    }

    pub fn target(&self) -> &ReedyCategory {
        &self.target
    }

    pub fn functor(&self) -> &FunctorData {
        &self.data
    }

    pub fn object_image(&self, o: usize) -> usize {
        self.data.object_image(o)
    }

    pub fn morphism_image(&self, m: usize) -> usize {
        self.data.morphism_image(m)
    }

    pub fn opposite(&self) -> ReedyFunctor {
        validate_reedy_functor(
            &self.source.opposite(),
            &self.target.opposite(),
            &self.data.opposite(),
        )
        .expect("opposite of a Reedy functor is a Reedy functor")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Inverse,
    Direct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactObject {
    /// Morphism of the source category (out of α for the inverse side, into
    /// α for the direct side).
    pub nu: String,
    /// Morphism of the target category completing ν's image to σ.
    pub mu: String,
}

/// The category of factorizations of an anchor σ through an object α.
#[derive(Debug, Clone)]
pub struct FactorizationCategory {
    pub side: Side,
    pub anchor_object: String,
    pub anchor: String,
    pub category: FiniteCategory,
    pub objects: Vec<FactObject>,
    /// Underlying source-category morphism of each category morphism.
    pub morphism_arrows: Vec<String>,
}

impl FactorizationCategory {
    pub fn components(&self) -> usize {
        pi0(&self.category).count()
    }

    pub fn is_empty_or_connected(&self) -> bool {
        self.components() <= 1
    }
}

pub fn fact_object_name(nu: &str, mu: &str) -> String {
    format!("({nu}|{mu})")
}

fn checked_anchor(
    g: &ReedyFunctor,
    alpha: &str,
    sigma: &str,
    side: Side,
) -> Result<(usize, usize)> {
    let a = g
        .source()
        .base()
        .object_index(alpha)
        .ok_or_else(|| Error::DanglingReference {
            context: "factorization anchor object".into(),
            missing: alpha.into(),
        })?;
    let s = g
        .target()
        .base()
        .morphism_index(sigma)
        .ok_or_else(|| Error::DanglingReference {
            context: "factorization anchor morphism".into(),
            missing: sigma.into(),
        })?;
    let d = g.target();
    match side {
        Side::Inverse => {
            if !d.is_inverse_or_id(s) {
                return Err(Error::BadAnchor {
                    detail: format!("`{sigma}` is not inverse or an identity"),
                });
            }
            if d.base().src(s) != g.object_image(a) {
                return Err(Error::BadAnchor {
                    detail: format!("`{sigma}` does not start at the image of `{alpha}`"),
                });
            }
        }
        Side::Direct => {
            if !d.is_direct_or_id(s) {
                return Err(Error::BadAnchor {
                    detail: format!("`{sigma}` is not direct or an identity"),
                });
            }
            if d.base().dst(s) != g.object_image(a) {
                return Err(Error::BadAnchor {
                    detail: format!("`{sigma}` does not end at the image of `{alpha}`"),
                });
            }
        }
    }
    Ok((a, s))
}

/// Objects: pairs (ν, μ) with ν: α → γ a non-identity inverse morphism and
/// μ: G γ → β inverse or an identity, such that μ ∘ G ν = σ. Morphisms
/// (ν, μ) → (ν', μ') are inverse τ with τ ∘ ν = ν' and μ' ∘ G τ = μ.
pub fn inverse_factorizations(
    g: &ReedyFunctor,
    alpha: &str,
    sigma: &str,
) -> Result<FactorizationCategory> {
    factorizations(g, alpha, sigma, Side::Inverse)
}

/// Dual: ν: γ → α non-identity direct, μ: β → G γ direct or an identity,
/// with G ν ∘ μ = σ. Morphisms (ν, μ) → (ν', μ') are direct τ with
/// ν' ∘ τ = ν and G τ ∘ μ = μ'.
pub fn direct_factorizations(
    g: &ReedyFunctor,
    alpha: &str,
    sigma: &str,
) -> Result<FactorizationCategory> {
    factorizations(g, alpha, sigma, Side::Direct)
}

fn factorizations(
    g: &ReedyFunctor,
    alpha: &str,
    sigma: &str,
    side: Side,
) -> Result<FactorizationCategory> {
    let (a, s) = checked_anchor(g, alpha, sigma, side)?;
    let c = g.source();
    let cb = c.base();
    let d = g.target();
    let db = d.base();
    let beta = match side {
        Side::Inverse => db.dst(s),
        Side::Direct => db.src(s),
    };

    let nu_fits = |nu: usize| match side {
        Side::Inverse => c.is_inverse(nu) && cb.src(nu) == a,
        Side::Direct => c.is_direct(nu) && cb.dst(nu) == a,
    };
    // The object of C the candidate ν reaches away from α.
    let foot = |nu: usize| match side {
        Side::Inverse => cb.dst(nu),
        Side::Direct => cb.src(nu),
    };

    let mut objects: Vec<(usize, usize)> = Vec::new();
    for nu in cb.non_identity_morphisms() {
        if !nu_fits(nu) {
            continue;
        }
        let gnu = g.morphism_image(nu);
        let mus = match side {
            Side::Inverse => db.hom(db.dst(gnu), beta),
            Side::Direct => db.hom(beta, db.src(gnu)),
        };
        for &mu in mus {
            let (class_ok, composite) = match side {
                Side::Inverse => (d.is_inverse_or_id(mu), db.compose(gnu, mu)?),
                Side::Direct => (d.is_direct_or_id(mu), db.compose(mu, gnu)?),
            };
            if class_ok && composite == s {
                objects.push((nu, mu));
            }
        }
    }

    let obj_name = |&(nu, mu): &(usize, usize)| {
        fact_object_name(cb.morphism_id(nu), db.morphism_id(mu))
    };

    let mut raw_morphisms = Vec::new();
    let mut arrows: Vec<(usize, usize, usize, String)> = Vec::new();
    for (i, &(nu, mu)) in objects.iter().enumerate() {
        for (j, &(nu2, mu2)) in objects.iter().enumerate() {
            for &tau in cb.hom(foot(nu), foot(nu2)) {
                if cb.is_identity(tau) {
                    continue;
                }
                let gtau = g.morphism_image(tau);
                let fits = match side {
                    Side::Inverse => {
                        c.is_inverse(tau)
                            && cb.compose(nu, tau)? == nu2
                            && db.compose(gtau, mu2)? == mu
                    }
                    Side::Direct => {
                        c.is_direct(tau)
                            && cb.compose(tau, nu2)? == nu
                            && db.compose(mu, gtau)? == mu2
                    }
                };
                if fits {
                    let id = format!("{}[{i}>{j}]", cb.morphism_id(tau));
                    raw_morphisms.push(RawMorphism {
                        id: id.clone(),
                        src: obj_name(&objects[i]),
                        dst: obj_name(&objects[j]),
                    });
                    arrows.push((i, j, tau, id));
                }
            }
        }
    }

    let mut lookup: std::collections::HashMap<(usize, usize, usize), String> =
        std::collections::HashMap::new();
    for &(i, j, tau, ref id) in &arrows {
        lookup.insert((i, j, tau), id.clone());
    }
    for (i, &(nu, _)) in objects.iter().enumerate() {
        lookup.insert(
            (i, i, cb.identity_of(foot(nu))),
            identity_name(&obj_name(&objects[i])),
        );
    }

    let mut compositions = Vec::new();
    for &(i, j, t1, ref id1) in &arrows {
        for &(j2, k, t2, ref id2) in &arrows {
            if j2 != j {
                continue;
            }
            // Arrows i→j→k compose to τ2 ∘ τ1 regardless of side: the τ's
            // point the same way in both variances.
            let t = cb.compose(t1, t2)?;
            let equals = lookup.get(&(i, k, t)).cloned().ok_or_else(|| {
                Error::PreconditionFailed {
                    detail: "factorization category is not closed".into(),
                }
            })?;
            compositions.push(RawComposition {
                first: id1.clone(),
                then: id2.clone(),
                equals,
            });
        }
    }

    let raw = RawCategory {
        objects: objects.iter().map(|o| obj_name(o)).collect(),
        morphisms: raw_morphisms,
        compositions,
    };
    let category = validate_category(&raw)?;

    let mut morphism_arrows = Vec::with_capacity(category.morphism_count());
    for &(nu, _) in &objects {
        morphism_arrows.push(cb.morphism_id(cb.identity_of(foot(nu))).to_string());
    }
    for &(_, _, tau, _) in &arrows {
        morphism_arrows.push(cb.morphism_id(tau).to_string());
    }

    Ok(FactorizationCategory {
        side,
        anchor_object: alpha.into(),
        anchor: sigma.into(),
        category,
        objects: objects
            .into_iter()
            .map(|(nu, mu)| FactObject {
                nu: cb.morphism_id(nu).into(),
                mu: db.morphism_id(mu).into(),
            })
            .collect(),
        morphism_arrows,
    })
}

/// The same category of inverse factorizations, built a second way: as the
/// comma category of the induced functor from the matching category at α to
/// the category of inverse morphisms under G α, over the object (β, σ).
/// Used as an independent oracle for `inverse_factorizations`.
pub fn factorization_via_comma(
    g: &ReedyFunctor,
    alpha: &str,
    sigma: &str,
) -> Result<CommaCategory> {
    let (a, s) = checked_anchor(g, alpha, sigma, Side::Inverse)?;
    let c = g.source();
    let cb = c.base();
    let db = g.target().base();

    let invd = g.target().inverse_subcategory();
    let ga_id = db.object_id(g.object_image(a));
    let under = comma_under(&identity_functor(&invd), ga_id)?;
    let mat = matching_category(c, alpha)?;

    // The induced functor ν ↦ (G γ, G ν), τ ↦ G τ.
    let under_object = |gnu: usize| -> Result<(usize, String)> {
        let obj = db.object_id(db.dst(gnu));
        let arrow = db.morphism_id(gnu);
        let ix = under
            .object_index_of(obj, arrow)
            .ok_or_else(|| Error::PreconditionFailed {
                detail: format!("({obj}|{arrow}) missing from the under category"),
            })?;
        Ok((ix, comma_object_name(obj, arrow)))
    };

    let mut raw = RawFunctor::default();
    let mut under_ix = Vec::with_capacity(mat.category.object_count());
    for i in 0..mat.category.object_count() {
        let nu = cb.morphism_index(&mat.object_arrows[i]).unwrap();
        let (ix, name) = under_object(g.morphism_image(nu))?;
        raw.on_objects
            .insert(mat.category.object_id(i).to_string(), name);
        under_ix.push(ix);
    }
    for m in mat.category.non_identity_morphisms() {
        let tau = cb.morphism_index(&mat.morphism_arrows[m]).unwrap();
        let gtau = g.morphism_image(tau);
        let (i, j) = (under_ix[mat.category.src(m)], under_ix[mat.category.dst(m)]);
        let image = if db.is_identity(gtau) {
            identity_name(under.category.object_id(i))
        } else {
            format!("{}[{i}>{j}]", db.morphism_id(gtau))
        };
        raw.on_morphisms
            .insert(mat.category.morphism_id(m).to_string(), image);
    }
    let g_star = validate_functor(&mat.category, &under.category, &raw)?;

    comma_over(&g_star, &comma_object_name(db.object_id(db.dst(s)), sigma))
}

/// Full subcategory of the matching category at α on the arrows G sends to
/// an identity. Morphisms between kernel objects automatically map to
/// identities as well, so the full subcategory is the whole story.
pub fn g_kernel(g: &ReedyFunctor, alpha: &str) -> Result<LabeledCategory> {
    let mat = matching_category(g.source(), alpha)?;
    let cb = g.source().base();
    let db = g.target().base();
    let keep: Vec<usize> = (0..mat.category.object_count())
        .filter(|&i| {
            let nu = cb.morphism_index(&mat.object_arrows[i]).unwrap();
            db.is_identity(g.morphism_image(nu))
        })
        .collect();
    mat.restrict(&keep)
}

/// When the kernel at `alpha` is empty, G induces a functor between the
/// matching categories at `alpha` and at its image. Returns the source
/// matching category, the full subcategory of the target matching category
/// on the image objects, and the functor into it.
pub fn induced_matching_functor(
    g: &ReedyFunctor,
    alpha: &str,
) -> Result<(LabeledCategory, LabeledCategory, FunctorData)> {
    let cb = g.source().base();
    let db = g.target().base();
    let source_mat = matching_category(g.source(), alpha)?;
    let a = cb.object_index(alpha).expect("checked by matching_category");
    let target_mat = matching_category(g.target(), db.object_id(g.object_image(a)))?;

    let mut image_objects = Vec::with_capacity(source_mat.category.object_count());
    for i in 0..source_mat.category.object_count() {
        let nu = cb.morphism_index(&source_mat.object_arrows[i]).unwrap();
        let gnu = g.morphism_image(nu);
        if db.is_identity(gnu) {
            return Err(Error::PreconditionFailed {
                detail: format!(
                    "`{}` lies in the kernel at `{alpha}`, so no matching functor is induced",
                    source_mat.object_arrows[i]
                ),
            });
        }
        let t = target_mat
            .category
            .object_index(db.morphism_id(gnu))
            .expect("images of matching objects are matching objects");
        image_objects.push(t);
    }
    let mut keep = image_objects.clone();
    keep.sort_unstable();
    keep.dedup();
    let image = target_mat.restrict(&keep)?;

    let mut raw = RawFunctor::default();
    for (i, &t) in image_objects.iter().enumerate() {
        raw.on_objects.insert(
            source_mat.category.object_id(i).into(),
            target_mat.category.object_id(t).into(),
        );
    }
    for k in source_mat.category.non_identity_morphisms() {
        let tau = cb.morphism_index(&source_mat.morphism_arrows[k]).unwrap();
        let gtau = g.morphism_image(tau);
        let src_img = image
            .category
            .object_index(target_mat.category.object_id(image_objects[source_mat.category.src(k)]))
            .unwrap();
        let dst_img = image
            .category
            .object_index(target_mat.category.object_id(image_objects[source_mat.category.dst(k)]))
            .unwrap();
        let value = if db.is_identity(gtau) {
            identity_name(image.category.object_id(src_img))
        } else {
            let gtau_id = db.morphism_id(gtau);
            let found = image
                .category
                .hom(src_img, dst_img)
                .iter()
                .copied()
                .find(|&m| {
                    !image.category.is_identity(m) && image.morphism_arrows[m] == gtau_id
                })
                .ok_or_else(|| Error::PreconditionFailed {
                    detail: format!(
                        "image of `{}` is missing from the induced matching category",
                        source_mat.category.morphism_id(k)
                    ),
                })?;
            image.category.morphism_id(found).to_string()
        };
        raw.on_morphisms
            .insert(source_mat.category.morphism_id(k).into(), value);
    }
    let data = validate_functor(&source_mat.category, &image.category, &raw)?;
    Ok((source_mat, image, data))
}

/// An anchor whose factorization category has two or more connected
/// components, breaking the empty-or-connected requirement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorWitness {
    pub alpha: String,
    pub beta: String,
    pub sigma: String,
    pub side: Side,
    pub components: usize,
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberingReport {
    pub side: Side,
    pub holds: bool,
    pub witnesses: Vec<AnchorWitness>,
}

/// All valid (α, σ) anchor pairs for the given side, in scan order.
pub fn anchor_pairs(g: &ReedyFunctor, side: Side) -> Vec<(String, String)> {
    let cb = g.source().base();
    let d = g.target();
    let db = d.base();
    let mut out = Vec::new();
    for a in 0..cb.object_count() {
        let ga = g.object_image(a);
        for s in 0..db.morphism_count() {
            let ok = match side {
                Side::Inverse => d.is_inverse_or_id(s) && db.src(s) == ga,
                Side::Direct => d.is_direct_or_id(s) && db.dst(s) == ga,
            };
            if ok {
                out.push((cb.object_id(a).to_string(), db.morphism_id(s).to_string()));
            }
        }
    }
    out
}

pub fn is_fibering(g: &ReedyFunctor) -> Result<FiberingReport> {
    anchor_scan(g, Side::Inverse)
}

pub fn is_cofibering(g: &ReedyFunctor) -> Result<FiberingReport> {
    anchor_scan(g, Side::Direct)
}

fn anchor_scan(g: &ReedyFunctor, side: Side) -> Result<FiberingReport> {
    let c = g.source();
    let db = g.target().base();
    let mut witnesses = Vec::new();
    for (alpha, sigma) in anchor_pairs(g, side) {
        let fact = factorizations(g, &alpha, &sigma, side)?;
        let components = fact.components();
        if components >= 2 {
            let s = db.morphism_index(&sigma).unwrap();
            let beta = match side {
                Side::Inverse => db.dst(s),
                Side::Direct => db.src(s),
            };
            witnesses.push(AnchorWitness {
                alpha,
                beta: db.object_id(beta).to_string(),
                sigma,
                side,
                components,
                empty: false,
            });
        }
    }
    witnesses.sort_by(|a, b| {
        let deg = |w: &AnchorWitness| c.degree(c.base().object_index(&w.alpha).unwrap());
        (deg(a), &a.alpha, &a.beta, &a.sigma).cmp(&(deg(b), &b.alpha, &b.beta, &b.sigma))
    });
    Ok(FiberingReport {
        side,
        holds: witnesses.is_empty(),
        witnesses,
    })
}

/// Which matching-category objects at α are reachable from the kernel by
/// the downward induction: kernel arrows are controlled, and an arrow is
/// controlled when it is G-equivalent to a composite ρ ∘ ν with ν already
/// controlled at strictly higher image degree. G-equivalence is generated
/// by matching-category morphisms that G sends to identities.
#[derive(Debug, Clone)]
pub struct ControlledReport {
    pub matching: LabeledCategory,
    pub controlled: Vec<bool>,
    /// G-equivalence classes, each sorted; classes sorted by first member.
    pub classes: Vec<Vec<usize>>,
    pub all_controlled: bool,
}

pub fn controlled_objects(g: &ReedyFunctor, alpha: &str) -> Result<ControlledReport> {
    let c = g.source();
    let cb = c.base();
    let d = g.target();
    let db = d.base();
    let mat = matching_category(c, alpha)?;
    let n = mat.category.object_count();

    let object_arrow = |i: usize| cb.morphism_index(&mat.object_arrows[i]).unwrap();
    let stage: Vec<u32> = (0..n)
        .map(|i| {
            let foot = cb.object_index(&mat.object_base[i]).unwrap();
            d.degree(g.object_image(foot))
        })
        .collect();

    let mut uf = UnionFind::new(n);
    for m in mat.category.non_identity_morphisms() {
        let tau = cb.morphism_index(&mat.morphism_arrows[m]).unwrap();
        if db.is_identity(g.morphism_image(tau)) {
            uf.union(mat.category.src(m), mat.category.dst(m));
        }
    }

    let mut controlled = vec![false; n];
    for i in 0..n {
        if db.is_identity(g.morphism_image(object_arrow(i))) {
            controlled[i] = true;
        }
    }

    let mut stages: Vec<u32> = stage.clone();
    stages.sort_unstable();
    stages.dedup();
    stages.reverse();
    for &s in &stages {
        // Composites through a controlled arrow of strictly higher stage.
        for m in mat.category.non_identity_morphisms() {
            let (i, j) = (mat.category.src(m), mat.category.dst(m));
            if stage[j] == s && stage[i] > s && controlled[i] {
                controlled[j] = true;
            }
        }
        // Close under G-equivalence within the stage.
        for i in 0..n {
            if stage[i] != s || !controlled[i] {
                continue;
            }
            for j in 0..n {
                if stage[j] == s && uf.same(i, j) {
                    controlled[j] = true;
                }
            }
        }
    }

    let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> =
        std::collections::BTreeMap::new();
    for i in 0..n {
        by_root.entry(uf.find(i)).or_default().push(i);
    }
    let mut classes: Vec<Vec<usize>> = by_root.into_values().collect();
    classes.sort_by_key(|c| c[0]);

    Ok(ControlledReport {
        all_controlled: controlled.iter().all(|&b| b),
        matching: mat,
        controlled,
        classes,
    })
}
